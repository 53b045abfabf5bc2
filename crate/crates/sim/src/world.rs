//! Scenario execution. The board state is public; each actor's keys,
//! certificates, and shares live only in the world's private maps.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use idchain_core::blind::{issuer_keygen, IssuerPublicKey};
use idchain_core::boards::{
    account_id, advance_time, apply, genesis, BoardEvent, BoardState, CaStatus, GenesisAccount,
    GenesisMember, MemberStatus, MotionStatus, Params, Role, Transaction, TxBody,
};
use idchain_core::crypto::schnorr::SigningKey;
use idchain_core::identity::{
    check_account, country_code, create_account, revoke_anonymity, run_registration, verify_asd,
    Asd, CaDirectory, CaRecord, CertificateAuthority, ProtocolError, ProtocolOptions,
    RevocationResult, UserCert, UserDocs, ATTRIBUTE_COUNT, ATTR_COUNTRY, ATTR_ISSUANCE_EPOCH,
    ATTR_OVER18, ATTR_SCHEMA_VERSION, CERT_VALIDITY,
};
use idchain_core::prf::{prf_eval, AccountIndex};
use idchain_core::relation::{prove_account, AccountStatement, AccountWitness, Policy};
use idchain_core::threshold::{
    chunk_shares, combine_shares, committee_keygen, encrypt_element, partial_decrypt,
    ChunkedCiphertext, DecryptionShare, KeyShare,
};
use idchain_core::{Scalar, G1};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::log::{advance_event, payload_digest, tx_event, EventLog, Input, Outcome};
use crate::scenario::{Action, Check, Expectation, PolicySpec, PolicyValue, Scenario, Step};
use crate::{actor_rng, sha256_hex, SimError};

pub const FAUCET: &str = "faucet";

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub transactions: u64,
    pub accepted: u64,
    pub rejected: u64,
    pub conservation_checks: u64,
    pub conservation_violations: u64,
    /// Rejected transactions after which the state snapshot differed.
    pub rejections_with_state_change: u64,
    /// Transaction kind to the set of rules it was rejected under.
    pub rejections: BTreeMap<String, BTreeSet<String>>,
    pub registrations: u64,
    pub revocations_checked: u64,
    pub checks_passed: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrafficReport {
    pub board_messages: usize,
    pub ca_messages: usize,
    /// User actor ids found in any message.
    pub actor_id_hits: Vec<String>,
    /// Messages containing a user's K or IDcredSEC.
    pub secret_hits: usize,
}

impl TrafficReport {
    pub fn clean(&self) -> bool {
        self.actor_id_hits.is_empty() && self.secret_hits == 0
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub users: BTreeMap<String, UserTruth>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserTruth {
    pub document: String,
    pub ca: Option<String>,
    pub id_cred_pub: Option<String>,
    pub accounts: BTreeMap<u64, AccountTruth>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccountTruth {
    /// Account index inside the certificate.
    pub x: u64,
    pub reg_id: String,
    pub pk_acc: String,
    pub forged: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSummary {
    pub scenario: String,
    pub seed: u64,
    pub steps: usize,
    pub day: u64,
    pub terminal_hash: String,
    pub state_hash: String,
    pub stats: Stats,
    pub traffic: TrafficReport,
}

#[derive(Clone, Debug)]
struct Account {
    asd: Asd,
}

#[derive(Clone, Debug)]
struct Wallet {
    docs: UserDocs,
    cert: Option<UserCert>,
    accounts: BTreeMap<u64, Account>,
}

#[derive(Default)]
struct Traffic {
    board: Vec<Vec<u8>>,
    ca: Vec<Vec<u8>>,
    secrets: Vec<Vec<u8>>,
}

struct Directory<'a> {
    cas: &'a BTreeMap<String, CertificateAuthority>,
    holders: &'a BTreeMap<String, String>,
}

impl CaDirectory for Directory<'_> {
    fn ca_record(&self, ca_pk: &IssuerPublicKey, id_cred_pub: &G1) -> Option<&CaRecord> {
        let fp = ca_pk.fingerprint();
        let holder = match self.holders.get(&fp) {
            Some(id) => self.cas.get(id)?,
            None => self.cas.values().find(|c| c.keys.pk.fingerprint() == fp)?,
        };
        holder.record(id_cred_pub)
    }
}

type Rejection = (String, String);

pub struct World {
    pub scenario: Scenario,
    pub seed: u64,
    pub params: Params,
    pub options: ProtocolOptions,
    pub state: BoardState,
    pub truth: GroundTruth,
    pub log: EventLog,
    pub inputs: Vec<Input>,
    pub stats: Stats,
    rngs: BTreeMap<String, ChaCha20Rng>,
    keys: BTreeMap<String, SigningKey>,
    cas: BTreeMap<String, CertificateAuthority>,
    /// Issuer fingerprint to the CA currently holding its records.
    record_holders: BTreeMap<String, String>,
    users: BTreeMap<String, Wallet>,
    shares: BTreeMap<(u64, String), KeyShare>,
    proposals: BTreeMap<String, u64>,
    traffic: Traffic,
    step: usize,
    op: String,
    sender_override: Option<String>,
}

impl World {
    /// Sets up keys, runs genesis, and admits the scenario's active CAs.
    pub fn new(scenario: Scenario, seed: u64) -> Result<World, SimError> {
        let params = scenario.params.board_params();
        let options = scenario.params.protocol_options();
        let actors = scenario.actors.clone();

        let mut ids = BTreeSet::new();
        let all_ids = actors
            .sc
            .iter()
            .map(|a| &a.id)
            .chain(actors.candidates.iter().map(|a| &a.id))
            .chain(actors.cas.iter().map(|a| &a.id))
            .chain(actors.users.iter().map(|a| &a.id))
            .chain(actors.websites.iter().map(|a| &a.id));
        for id in all_ids {
            if id == FAUCET || id.contains('/') || id.starts_with("acc:") || !ids.insert(id) {
                return Err(SimError::Parse(format!(
                    "duplicate or reserved actor id {id}"
                )));
            }
        }

        let mut keys = BTreeMap::new();
        let mut key_for = |id: &str| {
            let k = SigningKey::generate(&mut actor_rng(seed, &format!("board-key:{id}")));
            keys.insert(id.to_string(), k.clone());
            k.public
        };
        let members: Vec<GenesisMember> = actors
            .sc
            .iter()
            .map(|a| GenesisMember {
                id: a.id.clone(),
                pk: key_for(&a.id),
                stake: a.stake.unwrap_or(params.sc_stake),
            })
            .collect();
        let mut accounts = vec![GenesisAccount {
            id: FAUCET.into(),
            pk: key_for(FAUCET),
            role: Role::Faucet,
            balance: actors.faucet,
        }];
        for a in &actors.candidates {
            accounts.push(GenesisAccount {
                id: a.id.clone(),
                pk: key_for(&a.id),
                role: Role::Sc,
                balance: a.balance,
            });
        }
        for a in &actors.cas {
            let need = a.collateral.unwrap_or(params.ca_collateral) + params.join_fee_deduction;
            accounts.push(GenesisAccount {
                id: a.id.clone(),
                pk: key_for(&a.id),
                role: Role::Ca,
                balance: if a.balance == 0 && a.active {
                    need
                } else {
                    a.balance
                },
            });
        }
        for a in &actors.websites {
            accounts.push(GenesisAccount {
                id: a.id.clone(),
                pk: key_for(&a.id),
                role: Role::Website,
                balance: a.balance,
            });
        }

        let (state, dealt) = genesis(
            params.clone(),
            members,
            accounts,
            &mut actor_rng(seed, "genesis"),
        )
        .map_err(|e| SimError::Parse(format!("genesis rejected: {e}")))?;

        let mut cas = BTreeMap::new();
        for a in &actors.cas {
            let keys = issuer_keygen(
                ATTRIBUTE_COUNT,
                &mut actor_rng(seed, &format!("issuer:{}", a.id)),
            )
            .map_err(|e| SimError::Parse(e.to_string()))?;
            cas.insert(a.id.clone(), CertificateAuthority::new(a.id.clone(), keys));
        }

        let mut users = BTreeMap::new();
        let mut truth = GroundTruth::default();
        for u in &actors.users {
            let document = u.document.clone().unwrap_or_else(|| {
                let h = sha256_hex(&[b"document", &seed.to_le_bytes(), u.id.as_bytes()]);
                format!("D{}", h[..10].to_uppercase())
            });
            let blob = format!("{}|{}|{}", u.country, document, u.birth_year);
            users.insert(
                u.id.clone(),
                Wallet {
                    docs: UserDocs::new(blob.into_bytes(), u.country.clone(), u.birth_year),
                    cert: None,
                    accounts: BTreeMap::new(),
                },
            );
            truth.users.insert(
                u.id.clone(),
                UserTruth {
                    document,
                    ..Default::default()
                },
            );
        }

        let mut world = World {
            scenario,
            seed,
            params,
            options,
            state,
            truth,
            log: EventLog::default(),
            inputs: vec![],
            stats: Stats::default(),
            rngs: BTreeMap::new(),
            keys,
            cas,
            record_holders: BTreeMap::new(),
            users,
            shares: dealt.into_iter().map(|(id, s)| ((1, id), s)).collect(),
            proposals: BTreeMap::new(),
            traffic: Traffic::default(),
            step: 0,
            op: "genesis".into(),
            sender_override: None,
        };
        let hash = world.state.snapshot_hash();
        world.log.push(0, 0, "genesis", "genesis", &hash);
        world.inputs.push(Input::Genesis {
            state: Box::new(world.state.clone()),
        });
        world.bootstrap_cas(&actors.cas)?;
        Ok(world)
    }

    fn bootstrap_cas(&mut self, cas: &[crate::scenario::CaActor]) -> Result<(), SimError> {
        for a in cas.iter().filter(|a| a.active) {
            self.ca_join(&a.id, a.collateral, &Expectation::Ok)?;
            let motion = self.resolve_motion(&format!("admit_ca:{}", a.id));
            for m in self.state.seated_members() {
                if self.state.motions[&motion].status != MotionStatus::Open {
                    break;
                }
                self.send(&m, TxBody::CaVote { motion, yes: true }, &Expectation::Ok)?;
            }
        }
        Ok(())
    }

    pub fn run(&mut self) -> Result<(), SimError> {
        let steps = self.scenario.steps.clone();
        for (idx, step) in steps.iter().enumerate() {
            self.exec(idx + 1, step)?;
        }
        Ok(())
    }

    /// Runs a single step numbered `index` (1-based in scenario order).
    pub fn exec(&mut self, index: usize, step: &Step) -> Result<(), SimError> {
        self.step = index;
        self.op = serde_json::to_value(&step.action)
            .ok()
            .and_then(|v| v.get("op").and_then(|o| o.as_str().map(str::to_string)))
            .unwrap_or_default();
        self.sender_override = match &step.sender {
            Some(s) => Some(self.resolve_id(s)?),
            None => None,
        };
        let result = self.dispatch(&step.action, &step.expect);
        self.sender_override = None;
        result
    }

    fn fail(&self, reason: impl Into<String>) -> SimError {
        SimError::Step {
            index: self.step,
            op: self.op.clone(),
            reason: reason.into(),
        }
    }

    fn settle<T>(
        &self,
        expect: &Expectation,
        r: Result<T, Rejection>,
    ) -> Result<Option<T>, SimError> {
        match (r, expect) {
            (Ok(v), Expectation::Ok) => Ok(Some(v)),
            (Ok(_), Expectation::Reject(rule)) => {
                Err(self.fail(format!("expected {rule} rejection, step succeeded")))
            }
            (Err((rule, _)), Expectation::Reject(want)) if rule == *want => Ok(None),
            (Err((rule, detail)), _) => Err(self.fail(format!("rejected by {rule}: {detail}"))),
        }
    }

    fn take_rng(&mut self, actor: &str) -> ChaCha20Rng {
        self.rngs
            .remove(actor)
            .unwrap_or_else(|| actor_rng(self.seed, actor))
    }

    fn put_rng(&mut self, actor: &str, rng: ChaCha20Rng) {
        self.rngs.insert(actor.to_string(), rng);
    }

    fn signer(&self, natural: &str) -> String {
        self.sender_override
            .clone()
            .unwrap_or_else(|| natural.to_string())
    }

    fn key_for(&mut self, id: &str) -> SigningKey {
        if let Some(k) = self.keys.get(id) {
            return k.clone();
        }
        let k = SigningKey::generate(&mut actor_rng(self.seed, &format!("stranger:{id}")));
        self.keys.insert(id.to_string(), k.clone());
        k
    }

    /// `user/x` to the account's board id; anything else is taken as is.
    pub fn resolve_id(&self, s: &str) -> Result<String, SimError> {
        match s.split_once('/') {
            Some((user, x)) => {
                let x: u64 = x
                    .parse()
                    .map_err(|_| self.fail(format!("bad account reference {s}")))?;
                Ok(account_id(&self.account(user, x)?.asd.statement.pk_acc))
            }
            None => Ok(s.to_string()),
        }
    }

    fn wallet(&self, user: &str) -> Result<&Wallet, SimError> {
        self.users
            .get(user)
            .ok_or_else(|| self.fail(format!("unknown user {user}")))
    }

    fn account(&self, user: &str, x: u64) -> Result<&Account, SimError> {
        self.wallet(user)?
            .accounts
            .get(&x)
            .ok_or_else(|| self.fail(format!("{user} has no account {x}")))
    }

    fn reg_hex(&self, user: &str, x: u64) -> Result<String, SimError> {
        Ok(self.account(user, x)?.asd.reg_id().to_hex())
    }

    fn resolve_motion(&self, label: &str) -> u64 {
        let label = match label.strip_prefix("block_account:") {
            Some(r) if r.contains('/') => match self.resolve_id(r) {
                Ok(id) => format!("block_account:{}", id.trim_start_matches("acc:")),
                Err(_) => label.to_string(),
            },
            _ => label.to_string(),
        };
        self.state
            .motions
            .iter()
            .rev()
            .find(|(_, m)| m.kind.label() == label)
            .map(|(id, _)| *id)
            .unwrap_or(0)
    }

    fn resolve_proposal(&self, name: &str) -> u64 {
        self.proposals.get(name).copied().unwrap_or(0)
    }

    /// Signs and applies one transaction, checking conservation and that a
    /// rejection leaves the state untouched.
    fn send(
        &mut self,
        signer: &str,
        body: TxBody,
        expect: &Expectation,
    ) -> Result<Option<Vec<BoardEvent>>, SimError> {
        let key = self.key_for(signer);
        let nonce = self.state.nonce(signer);
        let mut rng = self.take_rng(signer);
        let tx = Transaction::sign(signer, nonce, body, &key, &mut rng);
        self.put_rng(signer, rng);
        self.traffic
            .board
            .push(serde_json::to_vec(&tx).expect("transactions serialize"));

        let before = self.state.snapshot_hash();
        let result = apply(&mut self.state, &tx).map_err(|e| (e.rule().to_string(), e.to_string()));
        self.stats.transactions += 1;
        self.stats.conservation_checks += 1;
        if !self.state.is_conserved() {
            self.stats.conservation_violations += 1;
        }
        let logged = result.clone().map_err(|(rule, _)| rule);
        let (kind, digest) = tx_event(&tx, &logged);
        self.log
            .push(self.step, self.state.day, signer, &kind, &digest);
        match &result {
            Ok(_) => self.stats.accepted += 1,
            Err((rule, _)) => {
                self.stats.rejected += 1;
                if self.state.snapshot_hash() != before {
                    self.stats.rejections_with_state_change += 1;
                }
                self.stats
                    .rejections
                    .entry(tx.kind().name().to_string())
                    .or_default()
                    .insert(rule.clone());
            }
        }
        self.inputs.push(Input::Tx {
            i: self.step,
            tx: Box::new(tx),
            outcome: match logged {
                Ok(_) => Outcome::Accepted,
                Err(rule) => Outcome::Rejected(rule),
            },
        });
        self.settle(expect, result)
    }

    fn offchain(&mut self, actor: &str, kind: &str, payload: serde_json::Value) {
        let digest = payload_digest(&payload);
        self.log
            .push(self.step, self.state.day, actor, kind, &digest);
        self.inputs.push(Input::Offchain {
            i: self.step,
            actor: actor.to_string(),
            kind: kind.to_string(),
            payload,
        });
    }

    fn committee(&self) -> idchain_core::threshold::CommitteeKeySet {
        self.state.committees[&self.state.current_epoch].clone()
    }

    fn dispatch(&mut self, action: &Action, expect: &Expectation) -> Result<(), SimError> {
        match action {
            Action::AdvanceTime { days } => {
                let r = advance_time(&mut self.state, *days)
                    .map_err(|e| (e.rule().to_string(), e.to_string()));
                if let Ok(events) = &r {
                    let digest = advance_event(events);
                    self.log
                        .push(self.step, self.state.day, "clock", "advance_time", &digest);
                    self.inputs.push(Input::Advance {
                        i: self.step,
                        days: *days,
                    });
                }
                self.settle(expect, r)?;
            }
            Action::Transfer { from, to, amount } => {
                let from = self.signer(&self.resolve_id(from)?);
                let to = self.resolve_id(to)?;
                self.send(
                    &from,
                    TxBody::TokenTransfer {
                        to,
                        amount: *amount,
                    },
                    expect,
                )?;
            }
            Action::RegisterUser { user, ca } => self.register(user, ca, expect)?,
            Action::CreateAccount { user, policy } => self.create(user, policy, expect)?,
            Action::ForgeAccount { user, x } => self.forge(user, *x)?,
            Action::AddAsd {
                user,
                account,
                fund,
            } => {
                let asd = self.account(user, *account)?.asd.clone();
                let owner = account_id(&asd.statement.pk_acc);
                if *fund {
                    let amount = self.params.reg_fee + self.params.reg_burn;
                    self.send(
                        FAUCET,
                        TxBody::TokenTransfer {
                            to: owner.clone(),
                            amount,
                        },
                        &Expectation::Ok,
                    )?;
                }
                let signer = self.signer(&owner);
                self.send(&signer, TxBody::UserAddAsd { asd: Box::new(asd) }, expect)?;
            }
            Action::VerifyAsd {
                user,
                account,
                valid,
            } => {
                let asd = self.account(user, *account)?.asd.clone();
                let on_board = self.state.users.asds.contains_key(&asd.reg_id().to_hex());
                let r = if on_board {
                    check_account(&asd, &self.state)
                } else {
                    verify_asd(&asd, &self.state)
                };
                let verdict = match &r {
                    Ok(()) => "valid".to_string(),
                    Err(e) => e.to_string(),
                };
                self.offchain(
                    user,
                    "verify_asd",
                    json!({ "asd": asd, "on_board": on_board, "verdict": verdict }),
                );
                if r.is_ok() != *valid {
                    return Err(self.fail(format!("expected valid={valid}, got {verdict}")));
                }
            }
            Action::DeactivateAsd { user, account } => {
                let owner = self.resolve_id(&format!("{user}/{account}"))?;
                let reg_id = self.reg_hex(user, *account)?;
                let signer = self.signer(&owner);
                self.send(&signer, TxBody::UserDeactivateAsd { reg_id }, expect)?;
            }
            Action::ScJoin { member, stake } => {
                let stake = stake.unwrap_or(self.params.sc_stake);
                let signer = self.signer(member);
                self.send(&signer, TxBody::ScJoinRequest { stake }, expect)?;
            }
            Action::ScVote {
                voters,
                motion,
                yes,
            } => {
                let motion = self.resolve_motion(motion);
                for v in voters {
                    let signer = self.signer(v);
                    self.send(&signer, TxBody::ScVote { motion, yes: *yes }, expect)?;
                }
            }
            Action::ScExit { member } => {
                let signer = self.signer(member);
                self.send(&signer, TxBody::ScExitNotice, expect)?;
            }
            Action::ScFinalizeExit { member } => {
                let signer = self.signer(member);
                self.send(&signer, TxBody::ScFinalizeExit, expect)?;
            }
            Action::ScExpel { by, member, reason } => {
                let signer = self.signer(by);
                let body = TxBody::ScExpel {
                    member: member.clone(),
                    reason: reason.clone(),
                };
                self.send(&signer, body, expect)?;
            }
            Action::ScRekey { dealer } => self.rekey(dealer, expect)?,
            Action::CaJoin { ca, collateral } => self.ca_join(ca, *collateral, expect)?,
            Action::CaVote {
                voters,
                motion,
                yes,
            } => {
                let motion = self.resolve_motion(motion);
                for v in voters {
                    let signer = self.signer(v);
                    self.send(&signer, TxBody::CaVote { motion, yes: *yes }, expect)?;
                }
            }
            Action::CaExit { ca, transfer_to } => {
                let signer = self.signer(ca);
                let body = TxBody::CaExitNotice {
                    transfer_to: transfer_to.clone(),
                };
                self.send(&signer, body, expect)?;
            }
            Action::CaFinalizeExit { ca } => {
                let signer = self.signer(ca);
                if self
                    .send(&signer, TxBody::CaFinalizeExit, expect)?
                    .is_some()
                {
                    self.transfer_records(ca);
                }
            }
            Action::CaPenalize { by, ca, reason } => {
                let signer = self.signer(by);
                let body = TxBody::CaPenalize {
                    ca: ca.clone(),
                    reason: reason.clone(),
                };
                self.send(&signer, body, expect)?;
            }
            Action::CaDropRecords { ca } => {
                let entry = self
                    .cas
                    .get_mut(ca)
                    .ok_or_else(|| SimError::Parse(format!("unknown CA {ca}")))?;
                let dropped = entry.records.len();
                entry.records.clear();
                self.offchain(ca, "ca_drop_records", json!({ "dropped": dropped }));
            }
            Action::BlockAccount {
                by,
                user,
                account,
                reason,
            } => {
                let pk_acc = self.account(user, *account)?.asd.statement.pk_acc;
                let signer = self.signer(by);
                let body = TxBody::BlockAccount {
                    pk_acc,
                    reason: reason.clone(),
                };
                self.send(&signer, body, expect)?;
            }
            Action::WebsiteComplaint {
                website,
                user,
                account,
                reason,
            } => {
                let reg_id = self.reg_hex(user, *account)?;
                let signer = self.signer(website);
                let body = TxBody::WebsiteComplaint {
                    reg_id,
                    reason: reason.clone(),
                };
                self.send(&signer, body, expect)?;
            }
            Action::RpSubmit {
                by,
                user,
                account,
                name,
                reason,
            } => {
                let reg_id = self.reg_hex(user, *account)?;
                let signer = self.signer(by);
                let body = TxBody::RpSubmit {
                    reg_id,
                    reason: reason.clone(),
                };
                if let Some(events) = self.send(&signer, body, expect)? {
                    for e in events {
                        if let BoardEvent::ProposalSubmitted { proposal, .. } = e {
                            self.proposals.insert(name.clone(), proposal);
                        }
                    }
                }
            }
            Action::RpVote {
                voters,
                proposal,
                yes,
            } => {
                let proposal = self.resolve_proposal(proposal);
                for v in voters {
                    let signer = self.signer(v);
                    self.send(
                        &signer,
                        TxBody::RpVote {
                            proposal,
                            yes: *yes,
                        },
                        expect,
                    )?;
                }
            }
            Action::RpShare {
                members,
                proposal,
                tamper,
            } => {
                let proposal = self.resolve_proposal(proposal);
                for m in members {
                    let signer = self.signer(m);
                    let mut share = self.eid_share(m, proposal);
                    if *tamper {
                        share.value += G1::generator();
                    }
                    self.send(&signer, TxBody::RpShare { proposal, share }, expect)?;
                }
            }
            Action::RpExecute {
                by,
                proposal,
                holders,
            } => self.execute(by, proposal, holders.as_deref(), expect)?,
            Action::Revoke {
                user,
                account,
                holders,
            } => {
                let r = self.revoke(user, *account, holders.as_deref());
                if let Some(result) = self.settle(expect, r)? {
                    if !self.truth_matches(user, &result) {
                        return Err(self.fail("revocation disagrees with ground truth"));
                    }
                    self.stats.revocations_checked += 1;
                }
            }
            Action::Expect { check } => {
                self.check(check).map_err(|m| self.fail(m))?;
                self.stats.checks_passed += 1;
            }
        }
        Ok(())
    }

    fn register(&mut self, user: &str, ca: &str, expect: &Expectation) -> Result<(), SimError> {
        let committee = self.committee();
        let docs = self.wallet(user)?.docs.clone();
        let mut rng = self.take_rng(user);
        let day = self.state.day;
        let options = self.options;
        let authority = self
            .cas
            .get_mut(ca)
            .ok_or_else(|| SimError::Parse(format!("unknown CA {ca}")))?;
        let r = run_registration(&docs, authority, &committee, day, &options, &mut rng)
            .map_err(|e| (protocol_rule(&e), e.to_string()));
        self.put_rng(user, rng);
        let Some((cert, record, transcript)) = self.settle(expect, r)? else {
            return Ok(());
        };
        self.stats.registrations += 1;
        self.traffic
            .ca
            .extend(transcript.messages.into_iter().map(|(_, m)| m));
        self.traffic
            .secrets
            .push(cert.prf_key.scalar().to_bytes().to_vec());
        self.traffic
            .secrets
            .push(cert.id_cred_sec.to_bytes().to_vec());
        let truth = self
            .truth
            .users
            .get_mut(user)
            .expect("user has truth entry");
        truth.ca = Some(ca.to_string());
        truth.id_cred_pub = Some(hex::encode(cert.id_cred_pub.to_bytes()));
        self.users.get_mut(user).expect("wallet exists").cert = Some(cert);
        self.offchain(
            user,
            "register_user",
            json!({
                "ca": ca,
                "id_cred_pub": hex::encode(record.id_cred_pub.to_bytes()),
                "committee_epoch": record.committee_epoch,
                "ereg_id": record.ereg_id,
            }),
        );
        Ok(())
    }

    fn policy(&self, spec: &PolicySpec) -> Result<Policy, SimError> {
        let mut policy = Policy::new(spec.label.clone());
        for (name, value) in &spec.require {
            let index = match name.as_str() {
                "over18" => ATTR_OVER18,
                "country" => ATTR_COUNTRY,
                "issuance_epoch" => ATTR_ISSUANCE_EPOCH,
                "schema_version" => ATTR_SCHEMA_VERSION,
                other => return Err(SimError::Parse(format!("unknown attribute {other}"))),
            };
            let v = match value {
                PolicyValue::Number(n) => *n,
                PolicyValue::Text(t) => country_code(t)
                    .ok_or_else(|| SimError::Parse(format!("unknown country {t}")))?,
            };
            policy = policy.require(index, Scalar::from_u64(v));
        }
        Ok(policy)
    }

    fn create(
        &mut self,
        user: &str,
        spec: &PolicySpec,
        expect: &Expectation,
    ) -> Result<(), SimError> {
        let policy = self.policy(spec)?;
        let committee = self.committee();
        let (max_acc, day) = (self.params.max_acc, self.state.day);
        let mut rng = self.take_rng(user);
        let mut cert = self
            .wallet(user)?
            .cert
            .clone()
            .ok_or_else(|| self.fail(format!("{user} holds no certificate")))?;
        let r = create_account(&mut cert, &policy, &committee, max_acc, day, &mut rng)
            .map_err(|e| (protocol_rule(&e), e.to_string()));
        self.put_rng(user, rng);
        let Some((asd, sk)) = self.settle(expect, r)? else {
            return Ok(());
        };
        self.users.get_mut(user).expect("wallet exists").cert = Some(cert);
        self.store_account(user, asd, sk, false);
        Ok(())
    }

    /// Runs the account prover at an index the honest client refuses.
    fn forge(&mut self, user: &str, x: u64) -> Result<(), SimError> {
        let cert = self
            .wallet(user)?
            .cert
            .clone()
            .ok_or_else(|| self.fail(format!("{user} holds no certificate")))?;
        let committee = self.committee();
        let policy = self.policy(&PolicySpec::default())?;
        let mut rng = self.take_rng(user);
        let reg_id = prf_eval(&cert.prf_key, AccountIndex::unchecked(x))
            .map_err(|e| self.fail(e.to_string()))?;
        let rho = Scalar::random_nonzero(&mut rng);
        let eid = encrypt_element(&committee.pk, &cert.id_cred_pub, &rho)
            .map_err(|e| self.fail(e.to_string()))?;
        let sk = Scalar::random_nonzero(&mut rng);
        let statement = AccountStatement {
            ca_pk: cert.ca_pk.clone(),
            committee_epoch: committee.epoch,
            committee_pk: committee.pk,
            reg_id,
            x,
            eid,
            pk_acc: G1::generator() * sk,
            policy,
            max_acc: self.params.max_acc,
        };
        let witness = AccountWitness {
            id_cred_sec: cert.id_cred_sec,
            prf_key: cert.prf_key,
            attributes: cert.attributes.values.clone(),
            signature: cert.signature,
            eid_randomness: rho,
            account_secret: sk,
        };
        let proof =
            prove_account(&statement, &witness, &mut rng).map_err(|e| self.fail(e.to_string()))?;
        self.put_rng(user, rng);
        let asd = Asd {
            statement,
            proof,
            created_at: self.state.day,
            expires_at: cert.issued_at + CERT_VALIDITY,
        };
        self.store_account(user, asd, sk, true);
        Ok(())
    }

    fn store_account(&mut self, user: &str, asd: Asd, sk: Scalar, forged: bool) {
        let x = asd.statement.x;
        let handle = self.users[user].accounts.len() as u64 + 1;
        let id = account_id(&asd.statement.pk_acc);
        self.keys.insert(id, SigningKey::from_secret(sk));
        let truth = AccountTruth {
            x,
            reg_id: asd.reg_id().to_hex(),
            pk_acc: hex::encode(asd.statement.pk_acc.to_bytes()),
            forged,
        };
        let payload =
            json!({ "account": handle, "x": x, "reg_id": truth.reg_id, "forged": forged });
        self.truth
            .users
            .get_mut(user)
            .expect("user has truth entry")
            .accounts
            .insert(handle, truth);
        self.users
            .get_mut(user)
            .expect("wallet exists")
            .accounts
            .insert(handle, Account { asd });
        self.offchain(user, "create_account", payload);
    }

    fn rekey(&mut self, dealer: &str, expect: &Expectation) -> Result<(), SimError> {
        let seated = self.state.seated_members();
        let epoch = self.state.current_epoch + 1;
        let mut rng = self.take_rng(dealer);
        let dealt = committee_keygen(seated.len() as u32, self.params.d, epoch, &mut rng);
        self.put_rng(dealer, rng);
        let (keyset, shares) = match dealt {
            Ok(v) => v,
            Err(e) => {
                self.settle(
                    expect,
                    Err::<(), _>(("TooFewMembers".into(), e.to_string())),
                )?;
                return Ok(());
            }
        };
        let signer = self.signer(dealer);
        if self
            .send(&signer, TxBody::ScRekey { keyset }, expect)?
            .is_some()
        {
            for (id, share) in seated.into_iter().zip(shares) {
                self.shares.insert((epoch, id), share);
            }
        }
        Ok(())
    }

    fn ca_join(
        &mut self,
        ca: &str,
        collateral: Option<u64>,
        expect: &Expectation,
    ) -> Result<(), SimError> {
        let ca_pk = self
            .cas
            .get(ca)
            .map(|c| c.keys.pk.clone())
            .ok_or_else(|| SimError::Parse(format!("unknown CA {ca}")))?;
        let scope = self
            .scenario
            .actors
            .cas
            .iter()
            .find(|a| a.id == ca)
            .map(|a| a.scope.clone())
            .unwrap_or_default();
        let body = TxBody::CaJoinRequest {
            ca_pk,
            collateral: collateral.unwrap_or(self.params.ca_collateral),
            scope,
        };
        let signer = self.signer(ca);
        self.send(&signer, body, expect)?;
        Ok(())
    }

    fn transfer_records(&mut self, ca: &str) {
        let Some(target) = self
            .state
            .cas
            .cas
            .get(ca)
            .and_then(|c| c.transfer_to.clone())
        else {
            return;
        };
        let Some(source) = self.cas.get_mut(ca) else {
            return;
        };
        let records = std::mem::take(&mut source.records);
        let fingerprint = source.keys.pk.fingerprint();
        let moved = records.len();
        if let Some(t) = self.cas.get_mut(&target) {
            t.records.extend(records);
        }
        for holder in self.record_holders.values_mut() {
            if holder == ca {
                *holder = target.clone();
            }
        }
        self.record_holders.insert(fingerprint, target.clone());
        self.offchain(
            ca,
            "ca_transfer_records",
            json!({ "to": target, "records": moved }),
        );
    }

    /// The member's decryption share of the proposal's EID, made with the
    /// share for that epoch if it holds one.
    fn eid_share(&mut self, member: &str, proposal: u64) -> DecryptionShare {
        let asd = self
            .state
            .proposals
            .proposals
            .get(&proposal)
            .and_then(|p| self.state.users.asds.get(&p.reg_id))
            .map(|e| e.asd.clone());
        let epoch = asd
            .as_ref()
            .map(|a| a.statement.committee_epoch)
            .unwrap_or(self.state.current_epoch);
        let share = self
            .shares
            .get(&(epoch, member.to_string()))
            .or_else(|| {
                self.shares
                    .iter()
                    .rev()
                    .find(|((_, m), _)| m == member)
                    .map(|(_, s)| s)
            })
            .or_else(|| self.shares.values().next())
            .cloned()
            .expect("genesis dealt shares");
        let eid = asd.map(|a| a.statement.eid).unwrap_or_else(|| {
            encrypt_element(&G1::generator(), &G1::generator(), &Scalar::ONE)
                .expect("placeholder ciphertext")
        });
        let mut rng = self.take_rng(member);
        let s = partial_decrypt(&share, &eid, &mut rng);
        self.put_rng(member, rng);
        s
    }

    fn execute(
        &mut self,
        by: &str,
        name: &str,
        holders: Option<&[String]>,
        expect: &Expectation,
    ) -> Result<(), SimError> {
        let proposal = self.resolve_proposal(name);
        let found = self.state.proposals.proposals.get(&proposal).and_then(|p| {
            let asd = &self.state.users.asds.get(&p.reg_id)?.asd;
            let keyset = self.state.committees.get(&asd.statement.committee_epoch)?;
            let shares: Vec<DecryptionShare> = p.eid_shares.values().copied().collect();
            let id_cred_pub = combine_shares(&asd.statement.eid, &shares, keyset).ok()?;
            Some((asd.statement.ca_pk.clone(), id_cred_pub))
        });
        let body = match found {
            Some((ca_pk, id_cred_pub)) => {
                let directory = Directory {
                    cas: &self.cas,
                    holders: &self.record_holders,
                };
                let Some(record) = directory.ca_record(&ca_pk, &id_cred_pub).cloned() else {
                    self.settle(
                        expect,
                        Err::<(), _>(("CaRecordMissing".into(), "CA holds no record".into())),
                    )?;
                    return Ok(());
                };
                let epoch = record.committee_epoch;
                let chosen: Vec<KeyShare> = match holders {
                    Some(list) => list
                        .iter()
                        .filter_map(|h| self.shares.get(&(epoch, h.clone())).cloned())
                        .collect(),
                    None => self.state.committee_members[&epoch]
                        .iter()
                        .filter(|m| self.state.is_seated(m))
                        .filter_map(|m| self.shares.get(&(epoch, m.clone())).cloned())
                        .take(self.params.d as usize + 1)
                        .collect(),
                };
                let mut rng = self.take_rng(by);
                let ereg_shares = chunk_shares(&chosen, &record.ereg_id, &mut rng);
                self.put_rng(by, rng);
                TxBody::RpExecute {
                    proposal,
                    user_docs: record.user_docs,
                    ereg_id: record.ereg_id,
                    ereg_epoch: epoch,
                    ereg_shares,
                }
            }
            None => TxBody::RpExecute {
                proposal,
                user_docs: UserDocs::new(vec![], "", 0),
                ereg_id: ChunkedCiphertext {
                    chunks: vec![],
                    chunk_bits: 16,
                },
                ereg_epoch: self.state.current_epoch,
                ereg_shares: vec![],
            },
        };
        let signer = self.signer(by);
        self.send(&signer, body, expect)?;
        Ok(())
    }

    /// Off-board revocation of `user/x` by `holders` (default: every seated
    /// member), using all key shares each holder has.
    pub fn revoke(
        &mut self,
        user: &str,
        x: u64,
        holders: Option<&[String]>,
    ) -> Result<RevocationResult, Rejection> {
        let reg_id = self
            .account(user, x)
            .map_err(|e| ("UnknownAccount".to_string(), e.to_string()))?
            .asd
            .reg_id();
        let holders: Vec<String> = match holders {
            Some(h) => h.to_vec(),
            None => self.state.seated_members(),
        };
        let held: Vec<(u64, KeyShare)> = self
            .shares
            .iter()
            .filter(|((_, m), _)| holders.contains(m))
            .map(|((e, _), s)| (*e, s.clone()))
            .collect();
        let mut rng = self.take_rng("revocation");
        let directory = Directory {
            cas: &self.cas,
            holders: &self.record_holders,
        };
        let r = revoke_anonymity(&reg_id, &held, &directory, &self.state, &mut rng)
            .map_err(|e| (protocol_rule(&e), e.to_string()));
        self.put_rng("revocation", rng);
        if let Ok(result) = &r {
            let accounts: Vec<String> = result.accounts.iter().map(|a| a.reg_id.to_hex()).collect();
            self.offchain(
                "committee",
                "revoke",
                json!({
                    "reg_id": reg_id.to_hex(),
                    "id_cred_pub": hex::encode(result.id_cred_pub.to_bytes()),
                    "doc_hash": hex::encode(result.user_docs.doc_hash),
                    "accounts": accounts,
                }),
            );
        }
        r
    }

    /// Whether a revocation result names exactly `user`'s documents and
    /// every one of their accounts on the board.
    pub fn truth_matches(&self, user: &str, result: &RevocationResult) -> bool {
        let (Some(wallet), Some(truth)) = (self.users.get(user), self.truth.users.get(user)) else {
            return false;
        };
        let expected: BTreeSet<String> = truth
            .accounts
            .values()
            .filter(|a| self.state.users.asds.contains_key(&a.reg_id))
            .map(|a| a.reg_id.clone())
            .collect();
        let got: BTreeSet<String> = result.accounts.iter().map(|a| a.reg_id.to_hex()).collect();
        result.user_docs == wallet.docs
            && truth.id_cred_pub.as_deref() == Some(&hex::encode(result.id_cred_pub.to_bytes()))
            && got == expected
    }

    /// Every `(user, x)` whose account is on the users board.
    pub fn board_accounts(&self) -> Vec<(String, u64)> {
        self.truth
            .users
            .iter()
            .flat_map(|(u, t)| {
                t.accounts
                    .iter()
                    .filter(|(_, a)| self.state.users.asds.contains_key(&a.reg_id))
                    .map(move |(x, _)| (u.clone(), *x))
            })
            .collect()
    }

    pub fn asd(&self, user: &str, x: u64) -> Option<&Asd> {
        self.users.get(user)?.accounts.get(&x).map(|a| &a.asd)
    }

    pub fn cert(&self, user: &str) -> Option<&UserCert> {
        self.users.get(user)?.cert.as_ref()
    }

    pub fn key_share(&self, epoch: u64, member: &str) -> Option<&KeyShare> {
        self.shares.get(&(epoch, member.to_string()))
    }

    pub fn traffic_report(&self) -> TrafficReport {
        let user_ids: Vec<&String> = self.users.keys().collect();
        let mut report = TrafficReport {
            board_messages: self.traffic.board.len(),
            ca_messages: self.traffic.ca.len(),
            ..Default::default()
        };
        let needles: Vec<Vec<u8>> = self
            .traffic
            .secrets
            .iter()
            .flat_map(|s| [s.clone(), hex::encode(s).into_bytes()])
            .collect();
        let mut hits = BTreeSet::new();
        for m in self.traffic.board.iter().chain(&self.traffic.ca) {
            for id in &user_ids {
                if contains(m, id.as_bytes()) {
                    hits.insert((*id).clone());
                }
            }
            if needles.iter().any(|n| contains(m, n)) {
                report.secret_hits += 1;
            }
        }
        report.actor_id_hits = hits.into_iter().collect();
        report
    }

    pub fn summary(&self) -> RunSummary {
        RunSummary {
            scenario: self.scenario.name.clone(),
            seed: self.seed,
            steps: self.scenario.steps.len(),
            day: self.state.day,
            terminal_hash: self.log.terminal_hash().to_string(),
            state_hash: self.state.snapshot_hash(),
            stats: self.stats.clone(),
            traffic: self.traffic_report(),
        }
    }

    /// Writes `events.jsonl`, `inputs.jsonl`, `state.json`,
    /// `ground_truth.json`, `summary.json`, and `asds/<user>-<x>.json`.
    pub fn write_outputs(&self, dir: &Path) -> Result<(), SimError> {
        std::fs::create_dir_all(dir.join("asds"))?;
        std::fs::write(dir.join("events.jsonl"), self.log.render())?;
        let mut inputs = String::new();
        for i in &self.inputs {
            inputs.push_str(&serde_json::to_string(i).expect("inputs serialize"));
            inputs.push('\n');
        }
        std::fs::write(dir.join("inputs.jsonl"), inputs)?;
        std::fs::write(dir.join("state.json"), sorted_pretty(&self.state))?;
        std::fs::write(dir.join("ground_truth.json"), sorted_pretty(&self.truth))?;
        std::fs::write(dir.join("summary.json"), sorted_pretty(&self.summary()))?;
        for (user, wallet) in &self.users {
            for (x, acc) in &wallet.accounts {
                std::fs::write(
                    dir.join("asds").join(format!("{user}-{x}.json")),
                    sorted_pretty(&acc.asd),
                )?;
            }
        }
        Ok(())
    }

    fn check(&self, check: &Check) -> Result<(), String> {
        let want = |ok: bool, what: String| if ok { Ok(()) } else { Err(what) };
        let id = |s: &str| self.resolve_id(s).map_err(|e| e.to_string());
        let reg = |u: &str, x: u64| self.reg_hex(u, x).map_err(|e| e.to_string());
        let proposal = |name: &str| {
            self.state
                .proposals
                .proposals
                .get(&self.resolve_proposal(name))
                .ok_or_else(|| format!("no proposal named {name}"))
        };
        match check {
            Check::Balance { id: who, eq } => {
                let got = self.state.balance(&id(who)?);
                want(
                    got == *eq,
                    format!("balance of {who} is {got}, expected {eq}"),
                )
            }
            Check::BurnedTotal { eq } => {
                let got = self.state.ledger.burned_total;
                want(got == *eq, format!("burned total is {got}, expected {eq}"))
            }
            Check::Conserved => want(self.state.is_conserved(), "supply not conserved".into()),
            Check::AsdCount { eq } => {
                let got = self.state.users.asds.len();
                want(
                    got == *eq,
                    format!("{got} ASDs on the board, expected {eq}"),
                )
            }
            Check::RenewalDue { user, account, is } => {
                let got = self.state.users.renewal_due.contains(&reg(user, *account)?);
                want(
                    got == *is,
                    format!("renewal_due for {user}/{account} is {got}"),
                )
            }
            Check::Blocked { user, account, is } => {
                let pk = id(&format!("{user}/{account}"))?;
                let got = self
                    .state
                    .users
                    .blocked_pk_acc
                    .contains(pk.trim_start_matches("acc:"));
                want(got == *is, format!("blocked for {user}/{account} is {got}"))
            }
            Check::MemberStatus { id: who, is } => {
                let got = self
                    .state
                    .sc
                    .members
                    .get(who)
                    .map(|m| member_status(&m.status))
                    .unwrap_or("none");
                want(got == is, format!("{who} is {got}, expected {is}"))
            }
            Check::CaStatus { id: who, is } => {
                let got = self
                    .state
                    .cas
                    .cas
                    .get(who)
                    .map(|c| ca_status(&c.status))
                    .unwrap_or("none");
                want(got == is, format!("{who} is {got}, expected {is}"))
            }
            Check::CaScore { id: who, eq } => {
                let got = self
                    .state
                    .cas
                    .cas
                    .get(who)
                    .map(|c| c.score(&self.state.params))
                    .ok_or_else(|| format!("unknown CA {who}"))?;
                want(
                    got == *eq,
                    format!("score of {who} is {got}, expected {eq}"),
                )
            }
            Check::ProposalStatus { proposal: name, is } => {
                let got = serde_json::to_value(proposal(name)?.status)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_default();
                want(
                    got == *is,
                    format!("proposal {name} is {got}, expected {is}"),
                )
            }
            Check::NonVoters { proposal: name, eq } => {
                let got = &proposal(name)?.non_voters;
                want(
                    got == eq,
                    format!("non-voters of {name} are {got:?}, expected {eq:?}"),
                )
            }
            Check::RevealMatchesTruth { proposal: name } => {
                let id = self.resolve_proposal(name);
                let record = self
                    .state
                    .proposals
                    .revealed
                    .iter()
                    .find(|r| r.proposal == id)
                    .ok_or_else(|| format!("proposal {name} was not revealed"))?;
                let (owner, _) = self
                    .truth
                    .users
                    .iter()
                    .find(|(_, t)| t.accounts.values().any(|a| a.reg_id == record.reg_id))
                    .ok_or("revealed RegID belongs to no user")?;
                let result = RevocationResult {
                    id_cred_pub: record.id_cred_pub,
                    user_docs: record.user_docs.clone(),
                    prf_key: Scalar::ZERO,
                    accounts: record.accounts.clone(),
                };
                want(
                    self.truth_matches(owner, &result),
                    format!("reveal of {name} does not match {owner}'s ground truth"),
                )
            }
            Check::RevealedCount { eq } => {
                let got = self.state.proposals.revealed.len();
                want(got == *eq, format!("{got} reveals, expected {eq}"))
            }
            Check::CurrentEpoch { eq } => {
                let got = self.state.current_epoch;
                want(
                    got == *eq,
                    format!("committee epoch is {got}, expected {eq}"),
                )
            }
            Check::NextAccountIndex { user, eq } => {
                let got = self
                    .users
                    .get(user)
                    .and_then(|w| w.cert.as_ref())
                    .map(|c| c.next_account_index)
                    .ok_or_else(|| format!("{user} holds no certificate"))?;
                want(
                    got == *eq,
                    format!("next index of {user} is {got}, expected {eq}"),
                )
            }
            Check::ComplaintCount { eq } => {
                let got = self.state.users.complaints.len();
                want(got == *eq, format!("{got} complaints, expected {eq}"))
            }
            Check::Unlinkable => self.check_unlinkable(),
            Check::TrafficClean => {
                let r = self.traffic_report();
                want(
                    r.clean(),
                    format!(
                        "actor ids {:?} and {} secret hits in traffic",
                        r.actor_id_hits, r.secret_hits
                    ),
                )
            }
        }
    }

    /// No group element or proof segment repeats across two board ASDs.
    fn check_unlinkable(&self) -> Result<(), String> {
        let mut seen: BTreeMap<Vec<u8>, String> = BTreeMap::new();
        for (reg_id, entry) in &self.state.users.asds {
            let st = &entry.asd.statement;
            let mut parts: Vec<Vec<u8>> = vec![
                st.reg_id.0.to_bytes().to_vec(),
                st.eid.c1.to_bytes().to_vec(),
                st.eid.c2.to_bytes().to_vec(),
                st.pk_acc.to_bytes().to_vec(),
            ];
            parts.extend(
                entry
                    .asd
                    .proof
                    .segments()
                    .into_iter()
                    .filter(|s| s.len() >= 32),
            );
            for p in parts {
                if let Some(other) = seen.insert(p, reg_id.clone()) {
                    if other != *reg_id {
                        return Err(format!("ASDs {other} and {reg_id} share a component"));
                    }
                }
            }
        }
        Ok(())
    }
}

fn contains(haystack: &[u8], needle: &[u8]) -> bool {
    !needle.is_empty() && haystack.windows(needle.len()).any(|w| w == needle)
}

fn sorted_pretty<T: Serialize>(v: &T) -> String {
    let value = serde_json::to_value(v).expect("outputs serialize");
    let mut s = serde_json::to_string_pretty(&value).expect("values serialize");
    s.push('\n');
    s
}

fn member_status(s: &MemberStatus) -> &'static str {
    match s {
        MemberStatus::Candidate => "candidate",
        MemberStatus::Active => "active",
        MemberStatus::Exiting { .. } => "exiting",
        MemberStatus::Exited => "exited",
        MemberStatus::Expelled => "expelled",
        MemberStatus::Rejected => "rejected",
    }
}

fn ca_status(s: &CaStatus) -> &'static str {
    match s {
        CaStatus::Pending => "pending",
        CaStatus::Active => "active",
        CaStatus::Exiting { .. } => "exiting",
        CaStatus::Exited => "exited",
        CaStatus::Rejected => "rejected",
    }
}

fn variant_name(debug: String) -> String {
    debug
        .chars()
        .take_while(|c| c.is_ascii_alphanumeric())
        .collect()
}

/// Rule name of a protocol failure, looking through wrapped errors.
pub fn protocol_rule(e: &ProtocolError) -> String {
    match e {
        ProtocolError::Threshold(t) => variant_name(format!("{t:?}")),
        ProtocolError::Blind(b) => variant_name(format!("{b:?}")),
        ProtocolError::Relation(r) => variant_name(format!("{r:?}")),
        other => variant_name(format!("{other:?}")),
    }
}
