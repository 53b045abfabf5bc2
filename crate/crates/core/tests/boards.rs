use std::collections::{BTreeMap, BTreeSet};

use idchain_core::blind::issuer_keygen;
use idchain_core::boards::*;
use idchain_core::crypto::SigningKey;
use idchain_core::identity::*;
use idchain_core::relation::Policy;
use idchain_core::threshold::{chunk_shares, committee_keygen, partial_decrypt, KeyShare};
use idchain_core::{Scalar, G1};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

const SC: [&str; 5] = ["sc1", "sc2", "sc3", "sc4", "sc5"];

struct Net {
    rng: ChaCha20Rng,
    state: BoardState,
    keys: BTreeMap<String, SigningKey>,
    shares: BTreeMap<(u64, String), KeyShare>,
    issuers: BTreeMap<String, CertificateAuthority>,
}

fn over18() -> Policy {
    Policy::new("over18").require(ATTR_OVER18, Scalar::ONE)
}

fn docs(name: &str) -> UserDocs {
    UserDocs::new(format!("passport:{name}").into_bytes(), "DE", 1990)
}

fn motion_of(events: &[BoardEvent]) -> u64 {
    events
        .iter()
        .find_map(|e| match e {
            BoardEvent::MotionOpened { motion, .. } => Some(*motion),
            _ => None,
        })
        .expect("motion opened")
}

impl Net {
    fn new(seed: u64) -> Net {
        Net::with_params(seed, Params::default())
    }

    fn with_params(seed: u64, params: Params) -> Net {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut keys = BTreeMap::new();
        let mut key = |id: &str, rng: &mut ChaCha20Rng| {
            let k = SigningKey::generate(rng);
            keys.insert(id.to_string(), k.clone());
            k.public
        };
        let members: Vec<GenesisMember> = SC
            .iter()
            .map(|id| GenesisMember {
                id: id.to_string(),
                pk: key(id, &mut rng),
                stake: 1_000,
            })
            .collect();
        let accounts: Vec<GenesisAccount> = [
            ("faucet", Role::Faucet, 100_000),
            ("web1", Role::Website, 100),
            ("web2", Role::Website, 10),
            ("ca1", Role::Ca, 10_000),
            ("ca2", Role::Ca, 10_000),
            ("cand", Role::Sc, 5_000),
            ("poor", Role::Sc, 500),
        ]
        .into_iter()
        .map(|(id, role, balance)| GenesisAccount {
            id: id.to_string(),
            pk: key(id, &mut rng),
            role,
            balance,
        })
        .collect();
        let (state, dealt) = genesis(params, members, accounts, &mut rng).unwrap();
        let shares = dealt.into_iter().map(|(id, s)| ((1, id), s)).collect();
        let issuers = ["ca1", "ca2"]
            .into_iter()
            .map(|id| {
                let keys = issuer_keygen(ATTRIBUTE_COUNT, &mut rng).unwrap();
                (id.to_string(), CertificateAuthority::new(id, keys))
            })
            .collect();
        Net {
            rng,
            state,
            keys,
            shares,
            issuers,
        }
    }

    fn sign(&mut self, sender: &str, body: TxBody) -> Transaction {
        let key = self.keys[sender].clone();
        let nonce = self.state.nonce(sender);
        Transaction::sign(sender, nonce, body, &key, &mut self.rng)
    }

    fn send(&mut self, sender: &str, body: TxBody) -> Result<Vec<BoardEvent>, BoardError> {
        let tx = self.sign(sender, body);
        self.submit(&tx)
    }

    fn submit(&mut self, tx: &Transaction) -> Result<Vec<BoardEvent>, BoardError> {
        let before = self.state.snapshot_hash();
        let result = apply(&mut self.state, tx);
        if result.is_err() {
            assert_eq!(
                self.state.snapshot_hash(),
                before,
                "rejection mutated state"
            );
        }
        assert!(self.state.is_conserved());
        result
    }

    fn ok(&mut self, sender: &str, body: TxBody) -> Vec<BoardEvent> {
        self.send(sender, body).unwrap()
    }

    fn advance(&mut self, days: u64) -> Vec<BoardEvent> {
        let events = advance_time(&mut self.state, days).unwrap();
        assert!(self.state.is_conserved());
        events
    }

    fn admit_ca(&mut self, id: &str) {
        let ca_pk = self.issuers[id].public_key().clone();
        let events = self.ok(
            id,
            TxBody::CaJoinRequest {
                ca_pk,
                collateral: 5_000,
                scope: "EU".into(),
            },
        );
        let motion = motion_of(&events);
        for m in &SC[..3] {
            self.ok(m, TxBody::CaVote { motion, yes: true });
        }
        assert_eq!(self.state.cas.cas[id].status, CaStatus::Active);
    }

    fn register(&mut self, ca: &str, name: &str) -> (UserCert, CaRecord) {
        let committee = self.state.committees[&self.state.current_epoch].clone();
        let (cert, record, _) = run_registration(
            &docs(name),
            self.issuers.get_mut(ca).unwrap(),
            &committee,
            self.state.day,
            &ProtocolOptions::default(),
            &mut self.rng,
        )
        .unwrap();
        (cert, record)
    }

    /// Creates, funds, and posts the next account of `cert`.
    fn open_account(&mut self, cert: &mut UserCert) -> (Asd, String) {
        let asd = self.prepare_account(cert);
        let owner = account_id(&asd.statement.pk_acc);
        self.ok(
            &owner,
            TxBody::UserAddAsd {
                asd: Box::new(asd.clone()),
            },
        );
        (asd, owner)
    }

    fn prepare_account(&mut self, cert: &mut UserCert) -> Asd {
        let committee = self.state.committees[&self.state.current_epoch].clone();
        let (asd, sk) = create_account(
            cert,
            &over18(),
            &committee,
            self.state.params.max_acc,
            self.state.day,
            &mut self.rng,
        )
        .unwrap();
        let owner = account_id(&asd.statement.pk_acc);
        self.keys.insert(owner.clone(), SigningKey::from_secret(sk));
        self.ok(
            "faucet",
            TxBody::TokenTransfer {
                to: owner,
                amount: 100,
            },
        );
        asd
    }

    fn eid_share(
        &mut self,
        member: &str,
        reg_id: &str,
    ) -> idchain_core::threshold::DecryptionShare {
        let asd = self.state.users.asds[reg_id].asd.clone();
        let share = self.shares[&(asd.statement.committee_epoch, member.to_string())].clone();
        partial_decrypt(&share, &asd.statement.eid, &mut self.rng)
    }

    fn execute_body(&mut self, proposal: u64, record: &CaRecord, members: &[&str]) -> TxBody {
        let holders: Vec<KeyShare> = members
            .iter()
            .map(|m| self.shares[&(record.committee_epoch, m.to_string())].clone())
            .collect();
        TxBody::RpExecute {
            proposal,
            user_docs: record.user_docs.clone(),
            ereg_id: record.ereg_id.clone(),
            ereg_epoch: record.committee_epoch,
            ereg_shares: chunk_shares(&holders, &record.ereg_id, &mut self.rng),
        }
    }
}

#[test]
fn genesis_examples() {
    let net = Net::new(1);
    assert_eq!(net.state.committees[&1].n, 5);
    assert_eq!(net.state.day, 0);
    assert!(net.state.is_conserved());

    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let member = |id: &str, stake, rng: &mut ChaCha20Rng| GenesisMember {
        id: id.into(),
        pk: SigningKey::generate(rng).public,
        stake,
    };
    let two = vec![member("a", 1_000, &mut rng), member("b", 1_000, &mut rng)];
    assert_eq!(
        genesis(Params::default(), two, vec![], &mut rng).unwrap_err(),
        BoardError::TooFewMembers { need: 3, have: 2 }
    );
    let short = vec![
        member("a", 1_000, &mut rng),
        member("b", 999, &mut rng),
        member("c", 1_000, &mut rng),
    ];
    assert_eq!(
        genesis(Params::default(), short, vec![], &mut rng).unwrap_err(),
        BoardError::InsufficientStake {
            offered: 999,
            required: 1_000
        }
    );
}

#[test]
fn user_add_asd_pays_ca_and_burns() {
    let mut net = Net::new(3);
    net.admit_ca("ca1");
    let (mut cert, _) = net.register("ca1", "alice");
    let ca_before = net.state.balance("ca1");
    let burned_before = net.state.ledger.burned_total;
    let (asd, owner) = net.open_account(&mut cert);
    assert_eq!(net.state.users.asds.len(), 1);
    assert_eq!(net.state.balance("ca1"), ca_before + 10);
    assert_eq!(net.state.ledger.burned_total, burned_before + 5);
    assert_eq!(net.state.balance(&owner), 85);
    assert_eq!(net.state.cas.cas["ca1"].issued_count, 1);

    assert_eq!(
        net.send(&owner, TxBody::UserAddAsd { asd: Box::new(asd) }),
        Err(BoardError::DuplicateRegId)
    );

    let (mut other, _) = net.register("ca2", "bob");
    let orphan = net.prepare_account(&mut other);
    let owner = account_id(&orphan.statement.pk_acc);
    assert!(matches!(
        net.send(
            &owner,
            TxBody::UserAddAsd {
                asd: Box::new(orphan)
            }
        ),
        Err(BoardError::CaInactive(_))
    ));
}

#[test]
fn sc_exit_waits_for_notice_period() {
    let mut net = Net::new(4);
    net.ok("sc5", TxBody::ScExitNotice);
    net.advance(179);
    assert_eq!(
        net.send("sc5", TxBody::ScFinalizeExit),
        Err(BoardError::NoticePeriodNotElapsed { ready_on: 180 })
    );
    let events = net.advance(1);
    assert!(events.contains(&BoardEvent::ExitFinalizable {
        entity: "sc5".into()
    }));
    net.ok("sc5", TxBody::ScFinalizeExit);
    assert_eq!(net.state.balance("sc5"), 1_000);
    assert_eq!(net.state.sc.members["sc5"].status, MemberStatus::Exited);
    assert!(net.state.sc.rekey_pending);
}

#[test]
fn ca_exit_requires_transfer_and_invalidates_asds() {
    let mut net = Net::new(5);
    net.admit_ca("ca1");
    net.admit_ca("ca2");
    let (mut cert, _) = net.register("ca1", "alice");
    let (asd, _) = net.open_account(&mut cert);

    net.advance(10);
    net.ok("ca1", TxBody::CaExitNotice { transfer_to: None });
    net.advance(180);
    assert!(matches!(
        net.send("ca1", TxBody::CaFinalizeExit),
        Err(BoardError::PendingDutiesExist(_))
    ));

    let mut net = Net::new(5);
    net.admit_ca("ca1");
    net.admit_ca("ca2");
    net.advance(10);
    net.ok("ca1", TxBody::CaExitNotice { transfer_to: None });
    net.advance(90);
    let (mut cert, _) = net.register("ca1", "alice");
    let (asd2, _) = net.open_account(&mut cert);
    assert_eq!(asd2.statement.ca_pk, asd.statement.ca_pk);
    net.ok(
        "ca1",
        TxBody::CaExitNotice {
            transfer_to: Some("ca2".into()),
        },
    );
    net.advance(89);
    assert_eq!(
        net.send("ca1", TxBody::CaFinalizeExit),
        Err(BoardError::NoticePeriodNotElapsed { ready_on: 190 })
    );
    net.advance(1);
    let before = net.state.balance("ca1");
    let events = net.ok("ca1", TxBody::CaFinalizeExit);
    assert!(events.iter().any(|e| matches!(
        e,
        BoardEvent::CaExited {
            released: 5_000,
            invalidated: 1,
            ..
        }
    )));
    assert_eq!(net.state.balance("ca1"), before + 5_000);
    let reg_id = asd2.reg_id().to_hex();
    assert!(net.state.users.renewal_due.contains(&reg_id));
    assert_eq!(
        check_account(&asd2, &net.state),
        Err(AsdRejection::CaInactive)
    );
    net.state.users.asds.clear();
    assert!(verify_asd(&asd2, &net.state).is_err());
}

#[test]
fn expulsion_burns_stake() {
    let mut net = Net::new(6);
    let motion = motion_of(&net.ok(
        "sc1",
        TxBody::ScExpel {
            member: "sc5".into(),
            reason: "abstained".into(),
        },
    ));
    let burned = net.state.ledger.burned_total;
    net.ok("sc1", TxBody::ScVote { motion, yes: true });
    net.ok("sc2", TxBody::ScVote { motion, yes: true });
    assert_eq!(net.state.sc.members["sc5"].status, MemberStatus::Active);
    let events = net.ok("sc3", TxBody::ScVote { motion, yes: true });
    assert!(events.contains(&BoardEvent::ScExpelled {
        member: "sc5".into(),
        burned: 1_000
    }));
    assert_eq!(net.state.ledger.burned_total, burned + 1_000);
    assert_eq!(net.state.sc.members["sc5"].status, MemberStatus::Expelled);
    assert_eq!(net.state.sc.expelled, vec!["sc5".to_string()]);
    assert_eq!(
        net.send("sc4", TxBody::ScVote { motion, yes: true }),
        Err(BoardError::VoteClosed)
    );
}

#[test]
fn tie_rejects_and_refunds_candidate() {
    let mut net = Net::new(7);
    let motion = motion_of(&net.ok("cand", TxBody::ScJoinRequest { stake: 1_000 }));
    assert_eq!(net.state.balance("cand"), 5_000 - 1_000 - 20);
    net.ok("sc1", TxBody::ScVote { motion, yes: true });
    net.ok("sc2", TxBody::ScVote { motion, yes: true });
    net.ok("sc3", TxBody::ScVote { motion, yes: false });
    net.ok("sc4", TxBody::ScVote { motion, yes: false });
    let events = net.advance(14);
    assert!(events.contains(&BoardEvent::MotionRejected {
        motion,
        action: "admit_sc:cand".into(),
        non_voters: vec!["sc5".into()],
    }));
    assert_eq!(net.state.balance("cand"), 5_000 - 20);
    assert_eq!(net.state.sc.members["cand"].status, MemberStatus::Rejected);
}

#[test]
fn renewal_boundary_and_rp_deadline() {
    let mut net = Net::new(8);
    net.admit_ca("ca1");
    let (mut cert, _) = net.register("ca1", "alice");
    let (asd, _) = net.open_account(&mut cert);
    let reg_id = asd.reg_id().to_hex();

    let proposal = match net.ok(
        "sc1",
        TxBody::RpSubmit {
            reg_id: reg_id.clone(),
            reason: "fraud".into(),
        },
    )[1]
    {
        BoardEvent::ProposalSubmitted { proposal, .. } => proposal,
        ref e => panic!("unexpected {e:?}"),
    };
    net.ok(
        "sc1",
        TxBody::RpVote {
            proposal,
            yes: true,
        },
    );
    net.ok(
        "sc2",
        TxBody::RpVote {
            proposal,
            yes: true,
        },
    );
    let events = net.advance(14);
    assert!(events.contains(&BoardEvent::ProposalRejected {
        proposal,
        yes: 2,
        non_voters: vec!["sc3".into(), "sc4".into(), "sc5".into()],
    }));

    net.advance(179 - 14);
    assert!(!net.state.users.renewal_due.contains(&reg_id));
    assert_eq!(check_account(&asd, &net.state), Ok(()));
    let events = net.advance(1);
    assert!(events.contains(&BoardEvent::RenewalDue {
        reg_id: reg_id.clone()
    }));
    assert_eq!(check_account(&asd, &net.state), Err(AsdRejection::Expired));
}

#[test]
fn proposals_board_is_sc_only_and_penalty_lowers_score() {
    let mut net = Net::new(9);
    net.admit_ca("ca1");
    let (mut cert, _) = net.register("ca1", "alice");
    let (asd, _) = net.open_account(&mut cert);
    net.ok(
        "sc1",
        TxBody::RpSubmit {
            reg_id: asd.reg_id().to_hex(),
            reason: "fraud".into(),
        },
    );
    let outside = query(&net.state, BoardKind::Proposals, "web1");
    assert_eq!(
        outside,
        serde_json::json!({"board": "proposals", "redacted": true})
    );
    let inside = query(&net.state, BoardKind::Proposals, "sc2");
    assert_eq!(inside["proposals"].as_object().unwrap().len(), 1);
    let users = query(&net.state, BoardKind::Users, "web1");
    assert_eq!(users["asds"].as_object().unwrap().len(), 1);

    let score = |net: &Net| {
        query(&net.state, BoardKind::Cas, "web1")["cas"]["ca1"]["score"]
            .as_u64()
            .unwrap()
    };
    assert_eq!(score(&net), 5 + 1);
    let motion = motion_of(&net.ok(
        "sc1",
        TxBody::CaPenalize {
            ca: "ca1".into(),
            reason: "lost record".into(),
        },
    ));
    for m in &SC[..3] {
        net.ok(m, TxBody::CaVote { motion, yes: true });
    }
    assert_eq!(net.state.cas.cas["ca1"].collateral, 3_750);
    assert_eq!(score(&net), 3 + 1 - 2);
}

#[test]
fn issuance_cap_per_window() {
    let params = Params {
        cap_factor: 1,
        penalty_weight: 0,
        ..Params::default()
    };
    let mut net = Net::with_params(10, params);
    net.admit_ca("ca1");
    net.state.cas.cas.get_mut("ca1").unwrap().window_issued = 5;
    let (mut cert, _) = net.register("ca1", "alice");
    let asd = net.prepare_account(&mut cert);
    let owner = account_id(&asd.statement.pk_acc);
    assert_eq!(
        net.send(
            &owner,
            TxBody::UserAddAsd {
                asd: Box::new(asd.clone())
            }
        ),
        Err(BoardError::IssuanceCapExceeded { cap: 5 })
    );
    net.advance(30);
    net.ok(&owner, TxBody::UserAddAsd { asd: Box::new(asd) });
}

#[test]
fn reveal_needs_threshold_votes_and_shares() {
    let mut net = Net::new(11);
    net.admit_ca("ca1");
    let (mut alice, alice_record) = net.register("ca1", "alice");
    let (mut bob, _) = net.register("ca1", "bob");
    let alice_ids: BTreeSet<String> = (0..3)
        .map(|_| net.open_account(&mut alice).0.reg_id().to_hex())
        .collect();
    let bob_id = net.open_account(&mut bob).0.reg_id().to_hex();
    let target = alice_ids.iter().next().unwrap().clone();

    net.ok(
        "sc1",
        TxBody::RpSubmit {
            reg_id: target.clone(),
            reason: "court order".into(),
        },
    );
    let proposal = 1;
    net.ok(
        "sc1",
        TxBody::RpVote {
            proposal,
            yes: true,
        },
    );
    net.ok(
        "sc2",
        TxBody::RpVote {
            proposal,
            yes: true,
        },
    );
    let share = net.eid_share("sc1", &target);
    assert_eq!(
        net.send("sc1", TxBody::RpShare { proposal, share }),
        Err(BoardError::VoteNotPassed)
    );
    let body = net.execute_body(proposal, &alice_record, &SC[..3]);
    assert_eq!(net.send("sc1", body), Err(BoardError::VoteNotPassed));

    let events = net.ok(
        "sc3",
        TxBody::RpVote {
            proposal,
            yes: true,
        },
    );
    assert!(events.contains(&BoardEvent::ProposalApproved { proposal, yes: 3 }));

    for m in ["sc1", "sc2"] {
        let share = net.eid_share(m, &target);
        net.ok(m, TxBody::RpShare { proposal, share });
    }
    let stolen = net.eid_share("sc3", &target);
    assert!(matches!(
        net.send(
            "sc4",
            TxBody::RpShare {
                proposal,
                share: stolen
            }
        ),
        Err(BoardError::Unauthorized(_))
    ));
    let mut forged = net.eid_share("sc3", &target);
    forged.value += G1::generator();
    assert!(matches!(
        net.send(
            "sc3",
            TxBody::RpShare {
                proposal,
                share: forged
            }
        ),
        Err(BoardError::InvalidShare(_))
    ));

    let body = net.execute_body(proposal, &alice_record, &SC[..3]);
    assert_eq!(
        net.send("sc1", body),
        Err(BoardError::NotEnoughShares { need: 3, have: 2 })
    );
    let share = net.eid_share("sc3", &target);
    net.ok("sc3", TxBody::RpShare { proposal, share });

    let short = net.execute_body(proposal, &alice_record, &SC[..2]);
    assert_eq!(
        net.send("sc1", short),
        Err(BoardError::NotEnoughShares { need: 3, have: 2 })
    );
    let body = net.execute_body(proposal, &alice_record, &SC[2..5]);
    net.ok("sc4", body);

    let record = &net.state.proposals.revealed[0];
    assert_eq!(record.id_cred_pub, alice.id_cred_pub);
    assert_eq!(record.user_docs, docs("alice"));
    let found: BTreeSet<String> = record.accounts.iter().map(|a| a.reg_id.to_hex()).collect();
    assert_eq!(found, alice_ids);
    assert!(!found.contains(&bob_id));
    assert_eq!(
        net.state.proposals.proposals[&proposal].status,
        ProposalStatus::Executed
    );
}

#[test]
fn rekey_after_admission_and_stale_epoch() {
    let mut net = Net::new(12);
    net.admit_ca("ca1");
    let (mut cert, _) = net.register("ca1", "alice");
    let motion = motion_of(&net.ok("cand", TxBody::ScJoinRequest { stake: 1_000 }));
    for m in &SC[..3] {
        net.ok(m, TxBody::ScVote { motion, yes: true });
    }
    assert!(net.state.is_seated("cand"));
    assert!(net.state.sc.rekey_pending);
    let stale = net.prepare_account(&mut cert);

    let (bad, _) = committee_keygen(5, 2, 2, &mut net.rng).unwrap();
    assert!(matches!(
        net.send("sc1", TxBody::ScRekey { keyset: bad }),
        Err(BoardError::InvalidState(_))
    ));
    let (keyset, shares) = committee_keygen(6, 2, 2, &mut net.rng).unwrap();
    let events = net.ok("sc1", TxBody::ScRekey { keyset });
    let members = net.state.committee_members[&2].clone();
    assert!(events.contains(&BoardEvent::CommitteeRekeyed {
        epoch: 2,
        members: members.clone()
    }));
    for (id, share) in members.into_iter().zip(shares) {
        net.shares.insert((2, id), share);
    }
    assert_eq!(net.state.current_epoch, 2);

    let owner = account_id(&stale.statement.pk_acc);
    assert!(matches!(
        net.send(
            &owner,
            TxBody::UserAddAsd {
                asd: Box::new(stale)
            }
        ),
        Err(BoardError::InvalidAsd(_))
    ));
    let (asd, _) = net.open_account(&mut cert);
    assert_eq!(asd.statement.committee_epoch, 2);
}

#[test]
fn reshare_threshold_flags_old_epoch_asds() {
    let params = Params {
        reshare_force_threshold: Some(1),
        notice_period: 30,
        ..Params::default()
    };
    let mut net = Net::with_params(13, params);
    net.admit_ca("ca1");
    let (mut cert, _) = net.register("ca1", "alice");
    let (asd, _) = net.open_account(&mut cert);
    net.ok("sc5", TxBody::ScExitNotice);
    net.advance(30);
    assert!(net.state.users.renewal_due.is_empty());
    let events = net.ok("sc5", TxBody::ScFinalizeExit);
    assert!(events.contains(&BoardEvent::RenewalDue {
        reg_id: asd.reg_id().to_hex()
    }));
}

#[test]
fn signature_and_nonce_are_enforced() {
    let mut net = Net::new(14);
    let body = TxBody::TokenTransfer {
        to: "web1".into(),
        amount: 1,
    };
    let mut tx = net.sign("faucet", body.clone());
    tx.sender = "web2".into();
    assert_eq!(net.submit(&tx), Err(BoardError::BadSignature));
    let mut tx = net.sign("faucet", body.clone());
    tx.nonce = 7;
    assert_eq!(net.submit(&tx), Err(BoardError::BadSignature));
    let key = net.keys["faucet"].clone();
    let tx = Transaction::sign("faucet", 7, body.clone(), &key, &mut net.rng);
    assert_eq!(
        net.submit(&tx),
        Err(BoardError::BadNonce {
            expected: 0,
            got: 7
        })
    );
    let tx = net.sign("faucet", body);
    net.submit(&tx).unwrap();
    assert_eq!(
        net.submit(&tx),
        Err(BoardError::BadNonce {
            expected: 1,
            got: 0
        })
    );
}

/// Every kind is refused once for an unauthorized sender and once for a
/// failed precondition, each time leaving the snapshot hash unchanged.
#[test]
fn governance_rejection_matrix() {
    let mut net = Net::new(15);
    net.admit_ca("ca1");
    let (mut alice, _) = net.register("ca1", "alice");
    let (asd, owner) = net.open_account(&mut alice);
    let reg_id = asd.reg_id().to_hex();
    let (blocked_asd, blocked) = net.open_account(&mut alice);
    let block = motion_of(&net.ok(
        "sc1",
        TxBody::BlockAccount {
            pk_acc: blocked_asd.statement.pk_acc,
            reason: "spam".into(),
        },
    ));
    for m in &SC[..3] {
        net.ok(
            m,
            TxBody::ScVote {
                motion: block,
                yes: true,
            },
        );
    }
    net.ok(
        "sc1",
        TxBody::RpSubmit {
            reg_id: reg_id.clone(),
            reason: "fraud".into(),
        },
    );
    let join = motion_of(&net.ok("cand", TxBody::ScJoinRequest { stake: 1_000 }));
    net.ok(
        "sc1",
        TxBody::ScVote {
            motion: join,
            yes: true,
        },
    );
    net.ok("sc5", TxBody::ScExitNotice);
    let share = net.eid_share("sc1", &reg_id);
    let (keyset, _) = committee_keygen(5, 2, 2, &mut net.rng).unwrap();
    let ca_pk = net.issuers["ca2"].public_key().clone();
    let (_, record) = net.register("ca1", "carol");
    let execute = net.execute_body(1, &record, &SC[..3]);

    let cases: Vec<(TxKind, &str, TxBody, &str, TxBody, &str)> = vec![
        (
            TxKind::ScJoinRequest,
            "web1",
            TxBody::ScJoinRequest { stake: 1_000 },
            "poor",
            TxBody::ScJoinRequest { stake: 999 },
            "InsufficientStake",
        ),
        (
            TxKind::ScVote,
            "web1",
            TxBody::ScVote {
                motion: join,
                yes: true,
            },
            "sc1",
            TxBody::ScVote {
                motion: join,
                yes: true,
            },
            "DuplicateVote",
        ),
        (
            TxKind::ScExitNotice,
            "web1",
            TxBody::ScExitNotice,
            "sc5",
            TxBody::ScExitNotice,
            "InvalidState",
        ),
        (
            TxKind::ScFinalizeExit,
            "web1",
            TxBody::ScFinalizeExit,
            "sc5",
            TxBody::ScFinalizeExit,
            "NoticePeriodNotElapsed",
        ),
        (
            TxKind::ScExpel,
            "web1",
            TxBody::ScExpel {
                member: "sc2".into(),
                reason: String::new(),
            },
            "sc1",
            TxBody::ScExpel {
                member: "web1".into(),
                reason: String::new(),
            },
            "UnknownEntity",
        ),
        (
            TxKind::ScRekey,
            "web1",
            TxBody::ScRekey {
                keyset: keyset.clone(),
            },
            "sc1",
            TxBody::ScRekey { keyset },
            "InvalidState",
        ),
        (
            TxKind::CaJoinRequest,
            "sc1",
            TxBody::CaJoinRequest {
                ca_pk: ca_pk.clone(),
                collateral: 5_000,
                scope: "EU".into(),
            },
            "ca2",
            TxBody::CaJoinRequest {
                ca_pk,
                collateral: 4_999,
                scope: "EU".into(),
            },
            "InsufficientStake",
        ),
        (
            TxKind::CaVote,
            "web1",
            TxBody::CaVote {
                motion: join,
                yes: true,
            },
            "sc2",
            TxBody::CaVote {
                motion: join,
                yes: true,
            },
            "UnknownEntity",
        ),
        (
            TxKind::CaExitNotice,
            "web1",
            TxBody::CaExitNotice { transfer_to: None },
            "ca1",
            TxBody::CaExitNotice {
                transfer_to: Some("ca2".into()),
            },
            "UnknownEntity",
        ),
        (
            TxKind::CaFinalizeExit,
            "web1",
            TxBody::CaFinalizeExit,
            "ca1",
            TxBody::CaFinalizeExit,
            "InvalidState",
        ),
        (
            TxKind::CaPenalize,
            "web1",
            TxBody::CaPenalize {
                ca: "ca1".into(),
                reason: String::new(),
            },
            "sc1",
            TxBody::CaPenalize {
                ca: "ca2".into(),
                reason: String::new(),
            },
            "UnknownEntity",
        ),
        (
            TxKind::UserAddAsd,
            "web1",
            TxBody::UserAddAsd {
                asd: Box::new(asd.clone()),
            },
            &owner,
            TxBody::UserAddAsd {
                asd: Box::new(asd.clone()),
            },
            "DuplicateRegId",
        ),
        (
            TxKind::UserDeactivateAsd,
            "web1",
            TxBody::UserDeactivateAsd {
                reg_id: reg_id.clone(),
            },
            &owner,
            TxBody::UserDeactivateAsd {
                reg_id: "00".into(),
            },
            "UnknownEntity",
        ),
        (
            TxKind::BlockAccount,
            "web1",
            TxBody::BlockAccount {
                pk_acc: asd.statement.pk_acc,
                reason: String::new(),
            },
            "sc1",
            TxBody::BlockAccount {
                pk_acc: blocked_asd.statement.pk_acc,
                reason: String::new(),
            },
            "InvalidState",
        ),
        (
            TxKind::WebsiteComplaint,
            "sc1",
            TxBody::WebsiteComplaint {
                reg_id: reg_id.clone(),
                reason: String::new(),
            },
            "web2",
            TxBody::WebsiteComplaint {
                reg_id: reg_id.clone(),
                reason: String::new(),
            },
            "InsufficientBalance",
        ),
        (
            TxKind::RpSubmit,
            "web1",
            TxBody::RpSubmit {
                reg_id: reg_id.clone(),
                reason: String::new(),
            },
            "sc1",
            TxBody::RpSubmit {
                reg_id: "00".into(),
                reason: String::new(),
            },
            "UnknownEntity",
        ),
        (
            TxKind::RpVote,
            "web1",
            TxBody::RpVote {
                proposal: 1,
                yes: true,
            },
            "sc1",
            TxBody::RpVote {
                proposal: 99,
                yes: true,
            },
            "UnknownEntity",
        ),
        (
            TxKind::RpShare,
            "web1",
            TxBody::RpShare { proposal: 1, share },
            "sc1",
            TxBody::RpShare { proposal: 1, share },
            "VoteNotPassed",
        ),
        (
            TxKind::RpExecute,
            "web1",
            execute.clone(),
            "sc1",
            execute,
            "VoteNotPassed",
        ),
        (
            TxKind::TokenTransfer,
            &blocked,
            TxBody::TokenTransfer {
                to: "web1".into(),
                amount: 1,
            },
            "web2",
            TxBody::TokenTransfer {
                to: "web1".into(),
                amount: 1_000,
            },
            "InsufficientBalance",
        ),
    ];

    let mut covered = BTreeSet::new();
    for (kind, bad_sender, bad_body, sender, body, rule) in cases {
        assert_eq!(bad_body.kind(), kind);
        assert_eq!(body.kind(), kind);
        let err = net.send(bad_sender, bad_body).unwrap_err();
        assert_eq!(err.rule(), "Unauthorized", "{kind:?}: {err}");
        let err = net.send(sender, body).unwrap_err();
        assert_eq!(err.rule(), rule, "{kind:?}: {err}");
        covered.insert(kind);
    }
    assert_eq!(covered.len(), TxKind::ALL.len());
}

#[test]
fn identical_sequences_give_identical_state() {
    let run = || {
        let mut net = Net::new(16);
        net.admit_ca("ca1");
        let (mut cert, _) = net.register("ca1", "alice");
        net.open_account(&mut cert);
        net.advance(3);
        net.ok("sc5", TxBody::ScExitNotice);
        net.state.snapshot_hash()
    };
    assert_eq!(run(), run());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transfers_conserve_supply(ops in prop::collection::vec((0usize..6, 0usize..6, 0u64..3_000, 0u64..3), 1..25)) {
        let ids = ["faucet", "web1", "web2", "ca1", "cand", "poor"];
        let mut net = Net::new(17);
        for (from, to, amount, days) in ops {
            let _ = net.send(ids[from], TxBody::TokenTransfer { to: ids[to].into(), amount });
            if days > 0 {
                net.advance(days);
            }
        }
        let total: u64 = net.state.circulating() + net.state.staked() + net.state.collateral() + net.state.ledger.burned_total;
        prop_assert_eq!(total, net.state.ledger.genesis_total);
    }
}
