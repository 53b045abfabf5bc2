use super::events::BoardEvent;
use super::state::{
    AsdEntry, BoardState, CaEntry, CaStatus, Complaint, MemberStatus, Motion, MotionKind,
    MotionStatus, Proposal, ProposalStatus, RevealRecord, Role, ScMember, TxLogEntry,
};
use super::tx::{account_id, parse_account_id, Transaction, TxBody, TxKind};
use super::BoardError;
use crate::blind::IssuerPublicKey;
use crate::crypto::G1;
use crate::identity::{collect_accounts, verify_asd, AsdRejection, UserDocs, ATTRIBUTE_COUNT};
use crate::prf::{prf_eval, AccountIndex, PrfKey};
use crate::threshold::{
    combine_shares, decrypt_chunked, verify_share, ChunkedCiphertext, CommitteeKeySet,
    DecryptionShare, ThresholdError,
};

type Events = Vec<BoardEvent>;

/// Applies one signed transaction. On error the state is left untouched.
pub fn apply(state: &mut BoardState, tx: &Transaction) -> Result<Events, BoardError> {
    let mut next = state.clone();
    let events = next.apply_tx(tx)?;
    *state = next;
    Ok(events)
}

fn unauthorized(why: &str) -> BoardError {
    BoardError::Unauthorized(why.to_string())
}

fn invalid(why: &str) -> BoardError {
    BoardError::InvalidState(why.to_string())
}

fn unknown(what: impl Into<String>) -> BoardError {
    BoardError::UnknownEntity(what.into())
}

impl BoardState {
    fn sender_key(&self, sender: &str) -> Result<G1, BoardError> {
        if sender.starts_with("acc:") {
            return parse_account_id(sender).ok_or_else(|| unknown(sender));
        }
        self.identities
            .get(sender)
            .map(|i| i.pk)
            .ok_or_else(|| unknown(sender))
    }

    fn role_of(&self, sender: &str) -> Option<Role> {
        self.identities.get(sender).map(|i| i.role)
    }

    fn apply_tx(&mut self, tx: &Transaction) -> Result<Events, BoardError> {
        let pk = self.sender_key(&tx.sender)?;
        if !tx.verify_signature(&pk) {
            return Err(BoardError::BadSignature);
        }
        let expected = self.nonce(&tx.sender);
        if tx.nonce != expected {
            return Err(BoardError::BadNonce {
                expected,
                got: tx.nonce,
            });
        }

        let sender = tx.sender.as_str();
        let mut events = vec![BoardEvent::Applied {
            kind: tx.kind().name().to_string(),
            sender: sender.to_string(),
        }];
        events.extend(match &tx.body {
            TxBody::ScJoinRequest { stake } => self.sc_join(sender, *stake)?,
            TxBody::ScVote { motion, yes } => self.vote_motion(sender, *motion, *yes, false)?,
            TxBody::ScExitNotice => self.sc_exit_notice(sender)?,
            TxBody::ScFinalizeExit => self.sc_finalize_exit(sender)?,
            TxBody::ScExpel { member, reason } => self.sc_expel(sender, member, reason)?,
            TxBody::ScRekey { keyset } => self.sc_rekey(sender, keyset)?,
            TxBody::CaJoinRequest {
                ca_pk,
                collateral,
                scope,
            } => self.ca_join(sender, ca_pk, *collateral, scope)?,
            TxBody::CaVote { motion, yes } => self.vote_motion(sender, *motion, *yes, true)?,
            TxBody::CaExitNotice { transfer_to } => {
                self.ca_exit_notice(sender, transfer_to.as_deref())?
            }
            TxBody::CaFinalizeExit => self.ca_finalize_exit(sender)?,
            TxBody::CaPenalize { ca, reason } => self.ca_penalize(sender, ca, reason)?,
            TxBody::UserAddAsd { asd } => self.user_add_asd(sender, asd)?,
            TxBody::UserDeactivateAsd { reg_id } => self.user_deactivate(sender, reg_id)?,
            TxBody::BlockAccount { pk_acc, reason } => {
                self.block_account(sender, pk_acc, reason)?
            }
            TxBody::WebsiteComplaint { reg_id, reason } => {
                self.website_complaint(sender, reg_id, reason)?
            }
            TxBody::RpSubmit { reg_id, reason } => self.rp_submit(sender, reg_id, reason)?,
            TxBody::RpVote { proposal, yes } => self.rp_vote(sender, *proposal, *yes)?,
            TxBody::RpShare { proposal, share } => self.rp_share(sender, *proposal, share)?,
            TxBody::RpExecute {
                proposal,
                user_docs,
                ereg_id,
                ereg_epoch,
                ereg_shares,
            } => self.rp_execute(
                sender,
                *proposal,
                user_docs,
                ereg_id,
                *ereg_epoch,
                ereg_shares,
            )?,
            TxBody::TokenTransfer { to, amount } => self.transfer(sender, to, *amount)?,
        });

        self.ledger.nonces.insert(tx.sender.clone(), expected + 1);
        self.seq += 1;
        self.log(tx);
        for reg_id in self.refresh_renewals() {
            events.push(BoardEvent::RenewalDue { reg_id });
        }
        Ok(events)
    }

    fn log(&mut self, tx: &Transaction) {
        let entry = TxLogEntry {
            seq: self.seq,
            day: self.day,
            sender: tx.sender.clone(),
            kind: tx.kind().name().to_string(),
            digest: hex::encode(tx.digest()),
        };
        let log = match tx.kind() {
            TxKind::ScJoinRequest
            | TxKind::ScVote
            | TxKind::ScExitNotice
            | TxKind::ScFinalizeExit
            | TxKind::ScExpel
            | TxKind::ScRekey => &mut self.sc.tx_log,
            TxKind::CaJoinRequest
            | TxKind::CaVote
            | TxKind::CaExitNotice
            | TxKind::CaFinalizeExit
            | TxKind::CaPenalize => &mut self.cas.tx_log,
            TxKind::UserAddAsd
            | TxKind::UserDeactivateAsd
            | TxKind::BlockAccount
            | TxKind::WebsiteComplaint => &mut self.users.tx_log,
            TxKind::RpSubmit | TxKind::RpVote | TxKind::RpShare | TxKind::RpExecute => {
                &mut self.proposals.tx_log
            }
            TxKind::TokenTransfer => &mut self.ledger.tx_log,
        };
        log.push(entry);
    }

    fn debit(&mut self, id: &str, amount: u64) -> Result<(), BoardError> {
        let have = self.balance(id);
        if have < amount {
            return Err(BoardError::InsufficientBalance { need: amount, have });
        }
        self.ledger.balances.insert(id.to_string(), have - amount);
        Ok(())
    }

    fn credit(&mut self, id: &str, amount: u64) {
        *self.ledger.balances.entry(id.to_string()).or_insert(0) += amount;
    }

    fn burn(&mut self, amount: u64) {
        self.ledger.burned_total += amount;
    }

    fn require_seated(&self, sender: &str) -> Result<(), BoardError> {
        if self.is_seated(sender) {
            Ok(())
        } else {
            Err(unauthorized("sender is not a seated SC member"))
        }
    }

    // ---- motions -------------------------------------------------------

    fn open_motion(&mut self, kind: MotionKind, opened_by: &str) -> Events {
        let id = self.next_motion;
        self.next_motion += 1;
        let action = kind.label();
        self.motions.insert(
            id,
            Motion {
                kind,
                opened_by: opened_by.to_string(),
                opened_at: self.day,
                deadline: self.day + self.params.vote_window,
                votes: Default::default(),
                status: MotionStatus::Open,
            },
        );
        vec![BoardEvent::MotionOpened { motion: id, action }]
    }

    fn has_open_motion(&self, pred: impl Fn(&MotionKind) -> bool) -> bool {
        self.motions
            .values()
            .any(|m| m.status == MotionStatus::Open && pred(&m.kind))
    }

    fn vote_motion(
        &mut self,
        sender: &str,
        id: u64,
        yes: bool,
        ca_vote: bool,
    ) -> Result<Events, BoardError> {
        self.require_seated(sender)?;
        let day = self.day;
        let motion = self
            .motions
            .get_mut(&id)
            .filter(|m| m.kind.is_ca_motion() == ca_vote)
            .ok_or_else(|| unknown(format!("motion {id}")))?;
        if motion.status != MotionStatus::Open || day >= motion.deadline {
            return Err(BoardError::VoteClosed);
        }
        if motion.votes.contains_key(sender) {
            return Err(BoardError::DuplicateVote);
        }
        motion.votes.insert(sender.to_string(), yes);
        let yes_count = motion.votes.values().filter(|v| **v).count();
        let no_count = motion.votes.len() - yes_count;
        let electorate = self.seated_members().len();
        if 2 * yes_count > electorate {
            self.pass_motion(id)
        } else if 2 * no_count >= electorate {
            Ok(self.reject_motion(id))
        } else {
            Ok(vec![])
        }
    }

    fn non_voters(&self, votes: &std::collections::BTreeMap<String, bool>) -> Vec<String> {
        self.seated_members()
            .into_iter()
            .filter(|m| !votes.contains_key(m))
            .collect()
    }

    fn pass_motion(&mut self, id: u64) -> Result<Events, BoardError> {
        let motion = self.motions.get_mut(&id).expect("motion exists");
        motion.status = MotionStatus::Passed;
        let kind = motion.kind.clone();
        let mut events = vec![BoardEvent::MotionPassed {
            motion: id,
            action: kind.label(),
        }];
        match kind {
            MotionKind::AdmitSc { candidate } => {
                let m = self
                    .sc
                    .members
                    .get_mut(&candidate)
                    .expect("candidate exists");
                m.status = MemberStatus::Active;
                m.joined_at = self.day;
                self.sc.rekey_pending = true;
                events.push(BoardEvent::ScAdmitted { member: candidate });
                events.push(BoardEvent::RekeyRequired {
                    seated: self.seated_members().len(),
                });
            }
            MotionKind::ExpelSc { member, .. } => {
                let m = self.sc.members.get_mut(&member).expect("member exists");
                if m.is_seated() {
                    m.status = MemberStatus::Expelled;
                    let burned = m.stake;
                    self.burn(burned);
                    self.sc.expelled.push(member.clone());
                    self.sc.rekey_pending = true;
                    events.push(BoardEvent::ScExpelled { member, burned });
                    events.push(BoardEvent::RekeyRequired {
                        seated: self.seated_members().len(),
                    });
                }
            }
            MotionKind::BlockAccount { pk_acc, .. } => {
                let key = hex::encode(pk_acc.to_bytes());
                self.users.blocked_pk_acc.insert(key.clone());
                events.push(BoardEvent::AccountBlocked { pk_acc: key });
            }
            MotionKind::AdmitCa { ca } => {
                let window = self.day / self.params.cap_window;
                let entry = self.cas.cas.get_mut(&ca).expect("ca exists");
                entry.status = CaStatus::Active;
                entry.window = window;
                entry.window_issued = 0;
                events.push(BoardEvent::CaAdmitted { ca });
            }
            MotionKind::PenalizeCa { ca, .. } => {
                let params = self.params.clone();
                let entry = self.cas.cas.get_mut(&ca).expect("ca exists");
                if entry.is_operating() {
                    let burned = entry.collateral * params.penalty_bps / 10_000;
                    entry.collateral -= burned;
                    entry.penalties += 1;
                    let score = entry.score(&params);
                    self.burn(burned);
                    events.push(BoardEvent::CaPenalized { ca, burned, score });
                }
            }
        }
        Ok(events)
    }

    pub(crate) fn reject_motion(&mut self, id: u64) -> Events {
        let motion = self.motions.get_mut(&id).expect("motion exists");
        motion.status = MotionStatus::Rejected;
        let kind = motion.kind.clone();
        let votes = motion.votes.clone();
        match &kind {
            MotionKind::AdmitSc { candidate } => {
                let m = self
                    .sc
                    .members
                    .get_mut(candidate)
                    .expect("candidate exists");
                m.status = MemberStatus::Rejected;
                let refund = m.stake;
                self.credit(candidate, refund);
            }
            MotionKind::AdmitCa { ca } => {
                let entry = self.cas.cas.get_mut(ca).expect("ca exists");
                entry.status = CaStatus::Rejected;
                let refund = entry.collateral;
                self.credit(ca, refund);
            }
            _ => {}
        }
        vec![BoardEvent::MotionRejected {
            motion: id,
            action: kind.label(),
            non_voters: self.non_voters(&votes),
        }]
    }

    // ---- supreme committee ---------------------------------------------

    fn sc_join(&mut self, sender: &str, stake: u64) -> Result<Events, BoardError> {
        if self.role_of(sender) != Some(Role::Sc) {
            return Err(unauthorized("only SC-role identities may apply"));
        }
        if let Some(m) = self.sc.members.get(sender) {
            if !matches!(m.status, MemberStatus::Exited | MemberStatus::Rejected) {
                return Err(unauthorized("sender already has SC standing"));
            }
        }
        if stake < self.params.sc_stake {
            return Err(BoardError::InsufficientStake {
                offered: stake,
                required: self.params.sc_stake,
            });
        }
        let fee = self.params.join_fee_deduction;
        self.debit(sender, stake + fee)?;
        self.burn(fee);
        let pk = self.identities[sender].pk;
        self.sc.members.insert(
            sender.to_string(),
            ScMember {
                pk,
                stake,
                status: MemberStatus::Candidate,
                joined_at: self.day,
                key_epoch: None,
                exit_announced: false,
            },
        );
        Ok(self.open_motion(
            MotionKind::AdmitSc {
                candidate: sender.to_string(),
            },
            sender,
        ))
    }

    fn sc_expel(&mut self, sender: &str, member: &str, reason: &str) -> Result<Events, BoardError> {
        self.require_seated(sender)?;
        if !self.is_seated(member) {
            return Err(unknown(format!("seated member {member}")));
        }
        if member == sender {
            return Err(invalid("members cannot move to expel themselves"));
        }
        if self
            .has_open_motion(|k| matches!(k, MotionKind::ExpelSc { member: m, .. } if m == member))
        {
            return Err(invalid("an expulsion vote is already open"));
        }
        Ok(self.open_motion(
            MotionKind::ExpelSc {
                member: member.to_string(),
                reason: reason.to_string(),
            },
            sender,
        ))
    }

    fn sc_exit_notice(&mut self, sender: &str) -> Result<Events, BoardError> {
        let day = self.day;
        let notice = self.params.notice_period;
        let m = self
            .sc
            .members
            .get_mut(sender)
            .filter(|m| m.is_seated())
            .ok_or_else(|| unauthorized("sender is not a seated SC member"))?;
        if m.status != MemberStatus::Active {
            return Err(invalid("exit already noticed"));
        }
        m.status = MemberStatus::Exiting {
            since: day,
            ready_on: day + notice,
        };
        Ok(vec![BoardEvent::ScExitStarted {
            member: sender.to_string(),
            ready_on: day + notice,
        }])
    }

    fn sc_finalize_exit(&mut self, sender: &str) -> Result<Events, BoardError> {
        let m = self
            .sc
            .members
            .get(sender)
            .filter(|m| m.is_seated())
            .ok_or_else(|| unauthorized("sender is not a seated SC member"))?;
        let MemberStatus::Exiting { ready_on, .. } = m.status else {
            return Err(invalid("no exit notice on record"));
        };
        if self.day < ready_on {
            return Err(BoardError::NoticePeriodNotElapsed { ready_on });
        }
        if self
            .proposals
            .proposals
            .values()
            .any(|p| p.status == ProposalStatus::Approved)
        {
            return Err(BoardError::PendingDutiesExist(
                "approved revealing proposals await execution".into(),
            ));
        }
        let need = self.params.d as usize + 1;
        let have = self.seated_members().len() - 1;
        if have < need {
            return Err(BoardError::TooFewMembers { need, have });
        }
        let released = m.stake;
        self.sc
            .members
            .get_mut(sender)
            .expect("member exists")
            .status = MemberStatus::Exited;
        self.credit(sender, released);
        self.sc.rekey_pending = true;
        Ok(vec![
            BoardEvent::ScExited {
                member: sender.to_string(),
                released,
            },
            BoardEvent::RekeyRequired {
                seated: self.seated_members().len(),
            },
        ])
    }

    fn sc_rekey(&mut self, sender: &str, keyset: &CommitteeKeySet) -> Result<Events, BoardError> {
        self.require_seated(sender)?;
        if !self.sc.rekey_pending {
            return Err(invalid("membership unchanged since last dealing"));
        }
        let seated = self.seated_members();
        let need = self.params.d as usize + 1;
        if seated.len() < need {
            return Err(BoardError::TooFewMembers {
                need,
                have: seated.len(),
            });
        }
        let epoch = self.current_epoch + 1;
        if keyset.epoch != epoch
            || keyset.n as usize != seated.len()
            || keyset.d != self.params.d
            || !keyset.is_consistent()
        {
            return Err(invalid("keyset does not match the seated committee"));
        }
        for id in &seated {
            self.sc.members.get_mut(id).expect("seated").key_epoch = Some(epoch);
        }
        self.committees.insert(epoch, keyset.clone());
        self.committee_members.insert(epoch, seated.clone());
        self.current_epoch = epoch;
        self.sc.rekey_pending = false;
        Ok(vec![BoardEvent::CommitteeRekeyed {
            epoch,
            members: seated,
        }])
    }

    // ---- certificate authorities ---------------------------------------

    fn ca_join(
        &mut self,
        sender: &str,
        ca_pk: &IssuerPublicKey,
        collateral: u64,
        scope: &str,
    ) -> Result<Events, BoardError> {
        if self.role_of(sender) != Some(Role::Ca) {
            return Err(unauthorized("only CA-role identities may apply"));
        }
        if let Some(c) = self.cas.cas.get(sender) {
            if !matches!(c.status, CaStatus::Exited | CaStatus::Rejected) {
                return Err(unauthorized("sender already operates a CA"));
            }
        }
        let fingerprint = ca_pk.fingerprint();
        if self
            .cas
            .cas
            .iter()
            .any(|(id, c)| id != sender && c.fingerprint == fingerprint)
        {
            return Err(invalid("issuer key already registered"));
        }
        if ca_pk.attribute_count() != ATTRIBUTE_COUNT || ca_pk.y_g1.len() != ca_pk.y_tilde.len() {
            return Err(invalid("issuer key does not fit the attribute schema"));
        }
        if collateral < self.params.ca_collateral {
            return Err(BoardError::InsufficientStake {
                offered: collateral,
                required: self.params.ca_collateral,
            });
        }
        let fee = self.params.join_fee_deduction;
        self.debit(sender, collateral + fee)?;
        self.burn(fee);
        self.cas.cas.insert(
            sender.to_string(),
            CaEntry {
                ca_pk: ca_pk.clone(),
                fingerprint,
                collateral,
                scope: scope.to_string(),
                issued_count: 0,
                penalties: 0,
                status: CaStatus::Pending,
                exit_time: None,
                transfer_to: None,
                window: 0,
                window_issued: 0,
                exit_announced: false,
            },
        );
        Ok(self.open_motion(
            MotionKind::AdmitCa {
                ca: sender.to_string(),
            },
            sender,
        ))
    }

    fn ca_exit_notice(
        &mut self,
        sender: &str,
        transfer_to: Option<&str>,
    ) -> Result<Events, BoardError> {
        let entry = self
            .cas
            .cas
            .get(sender)
            .filter(|c| c.is_operating())
            .ok_or_else(|| unauthorized("sender does not operate an active CA"))?;
        if let Some(target) = transfer_to {
            if target == sender {
                return Err(invalid("a CA cannot transfer records to itself"));
            }
            let t = self.cas.cas.get(target).ok_or_else(|| unknown(target))?;
            if t.status != CaStatus::Active {
                return Err(BoardError::CaInactive(target.to_string()));
            }
        }
        let mut events = vec![];
        let (since, ready_on) = match entry.status {
            CaStatus::Exiting { since, ready_on } => {
                if transfer_to.is_none() {
                    return Err(invalid("exit already noticed"));
                }
                (since, ready_on)
            }
            _ => {
                let ready_on = self.day + self.params.notice_period;
                events.push(BoardEvent::CaExitStarted {
                    ca: sender.to_string(),
                    ready_on,
                });
                (self.day, ready_on)
            }
        };
        let entry = self.cas.cas.get_mut(sender).expect("ca exists");
        entry.status = CaStatus::Exiting { since, ready_on };
        entry.exit_time = Some(ready_on);
        if let Some(target) = transfer_to {
            entry.transfer_to = Some(target.to_string());
            events.push(BoardEvent::CaTransferRecorded {
                ca: sender.to_string(),
                to: target.to_string(),
            });
        }
        Ok(events)
    }

    fn ca_finalize_exit(&mut self, sender: &str) -> Result<Events, BoardError> {
        let entry = self
            .cas
            .cas
            .get(sender)
            .filter(|c| c.is_operating())
            .ok_or_else(|| unauthorized("sender does not operate an active CA"))?;
        let CaStatus::Exiting { ready_on, .. } = entry.status else {
            return Err(invalid("no exit notice on record"));
        };
        if self.day < ready_on {
            return Err(BoardError::NoticePeriodNotElapsed { ready_on });
        }
        let transferred = entry
            .transfer_to
            .as_ref()
            .and_then(|t| self.cas.cas.get(t))
            .is_some_and(|t| t.status == CaStatus::Active);
        if !transferred {
            return Err(BoardError::PendingDutiesExist(
                "records not transferred to an active CA".into(),
            ));
        }
        let released = entry.collateral;
        let fingerprint = entry.fingerprint.clone();
        self.cas.cas.get_mut(sender).expect("ca exists").status = CaStatus::Exited;
        self.credit(sender, released);
        let invalidated = self
            .users
            .asds
            .values()
            .filter(|e| e.asd.statement.ca_pk.fingerprint() == fingerprint)
            .count();
        Ok(vec![BoardEvent::CaExited {
            ca: sender.to_string(),
            released,
            invalidated,
        }])
    }

    fn ca_penalize(&mut self, sender: &str, ca: &str, reason: &str) -> Result<Events, BoardError> {
        self.require_seated(sender)?;
        if !self.cas.cas.get(ca).is_some_and(CaEntry::is_operating) {
            return Err(unknown(format!("operating CA {ca}")));
        }
        Ok(self.open_motion(
            MotionKind::PenalizeCa {
                ca: ca.to_string(),
                reason: reason.to_string(),
            },
            sender,
        ))
    }

    // ---- users ---------------------------------------------------------

    fn user_add_asd(
        &mut self,
        sender: &str,
        asd: &crate::identity::Asd,
    ) -> Result<Events, BoardError> {
        let owner = account_id(&asd.statement.pk_acc);
        if sender != owner {
            return Err(unauthorized("sender must be the account named by pk_ACC"));
        }
        let fee = self.params.reg_fee;
        let burn = self.params.reg_burn;
        let have = self.balance(sender);
        if have < fee + burn {
            return Err(BoardError::InsufficientBalance {
                need: fee + burn,
                have,
            });
        }
        if asd.statement.committee_epoch != self.current_epoch {
            return Err(BoardError::InvalidAsd(format!(
                "committee epoch {} is not current epoch {}",
                asd.statement.committee_epoch, self.current_epoch
            )));
        }
        let fingerprint = asd.statement.ca_pk.fingerprint();
        match verify_asd(asd, self) {
            Ok(()) => {}
            Err(AsdRejection::DuplicateRegId) => return Err(BoardError::DuplicateRegId),
            Err(AsdRejection::CaInactive) => return Err(BoardError::CaInactive(fingerprint)),
            Err(other) => return Err(BoardError::InvalidAsd(other.to_string())),
        }
        let ca_id = self
            .ca_by_fingerprint(&fingerprint)
            .map(|(id, _)| id.clone())
            .expect("active CA is on the board");
        let params = self.params.clone();
        let window = self.day / params.cap_window;
        let entry = self.cas.cas.get_mut(&ca_id).expect("ca exists");
        if entry.window != window {
            entry.window = window;
            entry.window_issued = 0;
        }
        let cap = entry.issuance_cap(&params);
        if entry.window_issued >= cap {
            return Err(BoardError::IssuanceCapExceeded { cap });
        }
        entry.window_issued += 1;
        entry.issued_count += 1;

        self.debit(sender, fee + burn)?;
        self.credit(&ca_id, fee);
        self.burn(burn);
        let reg_id = asd.reg_id().to_hex();
        self.users.asds.insert(
            reg_id.clone(),
            AsdEntry {
                asd: asd.clone(),
                owner,
                ca: ca_id.clone(),
                added_at: self.day,
            },
        );
        Ok(vec![BoardEvent::AsdAdded {
            reg_id,
            ca: ca_id,
            fee,
            burned: burn,
        }])
    }

    fn user_deactivate(&mut self, sender: &str, reg_id: &str) -> Result<Events, BoardError> {
        let entry = self
            .users
            .asds
            .get(reg_id)
            .ok_or_else(|| unknown(format!("RegID {reg_id}")))?;
        if entry.owner != sender {
            return Err(unauthorized("only the account owner may deactivate"));
        }
        if !self.users.deactivated.insert(reg_id.to_string()) {
            return Err(invalid("already deactivated"));
        }
        Ok(vec![BoardEvent::AsdDeactivated {
            reg_id: reg_id.to_string(),
        }])
    }

    fn block_account(
        &mut self,
        sender: &str,
        pk_acc: &G1,
        reason: &str,
    ) -> Result<Events, BoardError> {
        self.require_seated(sender)?;
        let key = hex::encode(pk_acc.to_bytes());
        if self.users.blocked_pk_acc.contains(&key) {
            return Err(invalid("account already blocked"));
        }
        if self.has_open_motion(
            |k| matches!(k, MotionKind::BlockAccount { pk_acc: p, .. } if p == pk_acc),
        ) {
            return Err(invalid("a blocking vote is already open"));
        }
        Ok(self.open_motion(
            MotionKind::BlockAccount {
                pk_acc: *pk_acc,
                reason: reason.to_string(),
            },
            sender,
        ))
    }

    fn website_complaint(
        &mut self,
        sender: &str,
        reg_id: &str,
        reason: &str,
    ) -> Result<Events, BoardError> {
        if self.role_of(sender) != Some(Role::Website) {
            return Err(unauthorized("only websites may file complaints"));
        }
        let have = self.balance(sender);
        if have < self.params.website_min_balance {
            return Err(BoardError::InsufficientBalance {
                need: self.params.website_min_balance,
                have,
            });
        }
        if !self.users.asds.contains_key(reg_id) {
            return Err(unknown(format!("RegID {reg_id}")));
        }
        self.users.complaints.push(Complaint {
            website: sender.to_string(),
            reg_id: reg_id.to_string(),
            reason: reason.to_string(),
            day: self.day,
        });
        Ok(vec![BoardEvent::Complaint {
            website: sender.to_string(),
            reg_id: reg_id.to_string(),
            reason: reason.to_string(),
        }])
    }

    // ---- revealing proposals -------------------------------------------

    fn rp_submit(
        &mut self,
        sender: &str,
        reg_id: &str,
        reason: &str,
    ) -> Result<Events, BoardError> {
        self.require_seated(sender)?;
        if !self.users.asds.contains_key(reg_id) {
            return Err(unknown(format!("RegID {reg_id}")));
        }
        if self.proposals.proposals.values().any(|p| {
            p.reg_id == reg_id
                && matches!(p.status, ProposalStatus::Voting | ProposalStatus::Approved)
        }) {
            return Err(invalid("a proposal for this RegID is already open"));
        }
        let id = self.proposals.next_id;
        self.proposals.next_id += 1;
        self.proposals.proposals.insert(
            id,
            Proposal {
                reg_id: reg_id.to_string(),
                reason: reason.to_string(),
                proposer: sender.to_string(),
                votes: Default::default(),
                opened_at: self.day,
                deadline: self.day + self.params.vote_window,
                status: ProposalStatus::Voting,
                eid_shares: Default::default(),
                non_voters: vec![],
            },
        );
        Ok(vec![BoardEvent::ProposalSubmitted {
            proposal: id,
            reg_id: reg_id.to_string(),
        }])
    }

    fn rp_vote(&mut self, sender: &str, id: u64, yes: bool) -> Result<Events, BoardError> {
        self.require_seated(sender)?;
        let need = self.params.d as usize + 1;
        let day = self.day;
        let p = self
            .proposals
            .proposals
            .get_mut(&id)
            .ok_or_else(|| unknown(format!("proposal {id}")))?;
        if p.status != ProposalStatus::Voting || day >= p.deadline {
            return Err(BoardError::VoteClosed);
        }
        if p.votes.contains_key(sender) {
            return Err(BoardError::DuplicateVote);
        }
        p.votes.insert(sender.to_string(), yes);
        let yes_count = p.yes_votes();
        if yes_count >= need {
            p.status = ProposalStatus::Approved;
            return Ok(vec![BoardEvent::ProposalApproved {
                proposal: id,
                yes: yes_count,
            }]);
        }
        Ok(vec![])
    }

    fn approved_proposal(&self, id: u64) -> Result<&Proposal, BoardError> {
        let p = self
            .proposals
            .proposals
            .get(&id)
            .ok_or_else(|| unknown(format!("proposal {id}")))?;
        match p.status {
            ProposalStatus::Approved => Ok(p),
            ProposalStatus::Executed => Err(invalid("proposal already executed")),
            _ => Err(BoardError::VoteNotPassed),
        }
    }

    fn rp_share(
        &mut self,
        sender: &str,
        id: u64,
        share: &DecryptionShare,
    ) -> Result<Events, BoardError> {
        self.require_seated(sender)?;
        let p = self.approved_proposal(id)?;
        let asd = &self.users.asds[&p.reg_id].asd;
        let epoch = asd.statement.committee_epoch;
        let holder = self
            .committee_members
            .get(&epoch)
            .and_then(|ids| ids.get((share.index as usize).wrapping_sub(1)));
        if holder.map(String::as_str) != Some(sender) {
            return Err(unauthorized("share index belongs to another member"));
        }
        if p.eid_shares.contains_key(&share.index) {
            return Err(invalid("share already posted"));
        }
        let keyset = &self.committees[&epoch];
        if !verify_share(keyset, &asd.statement.eid, share) {
            return Err(BoardError::InvalidShare(format!("index {}", share.index)));
        }
        self.proposals
            .proposals
            .get_mut(&id)
            .expect("proposal exists")
            .eid_shares
            .insert(share.index, *share);
        Ok(vec![BoardEvent::ShareAccepted {
            proposal: id,
            member: sender.to_string(),
            index: share.index,
        }])
    }

    fn rp_execute(
        &mut self,
        sender: &str,
        id: u64,
        user_docs: &UserDocs,
        ereg_id: &ChunkedCiphertext,
        ereg_epoch: u64,
        ereg_shares: &[Vec<DecryptionShare>],
    ) -> Result<Events, BoardError> {
        self.require_seated(sender)?;
        let p = self.approved_proposal(id)?;
        let need = self.params.d as usize + 1;
        let seated = self.seated_members().len();
        if seated < need {
            return Err(BoardError::TooFewMembers { need, have: seated });
        }
        let reg_id = p.reg_id.clone();
        let asd = &self.users.asds[&reg_id].asd;
        let keyset = &self.committees[&asd.statement.committee_epoch];
        if p.eid_shares.len() < need {
            return Err(BoardError::NotEnoughShares {
                need,
                have: p.eid_shares.len(),
            });
        }
        let eid_shares: Vec<DecryptionShare> = p.eid_shares.values().copied().collect();
        let id_cred_pub =
            combine_shares(&asd.statement.eid, &eid_shares, keyset).map_err(share_error)?;

        let reg_keyset = self
            .committees
            .get(&ereg_epoch)
            .ok_or_else(|| unknown(format!("committee epoch {ereg_epoch}")))?;
        let k = decrypt_chunked(ereg_id, ereg_shares, reg_keyset).map_err(share_error)?;
        let k =
            PrfKey::new(k).map_err(|_| BoardError::InvalidShare("degenerate PRF key".into()))?;
        let x = AccountIndex::unchecked(asd.statement.x);
        if prf_eval(&k, x).ok() != Some(asd.statement.reg_id) {
            return Err(BoardError::InvalidShare(
                "ERegID does not open to this account's PRF key".into(),
            ));
        }
        let accounts = collect_accounts(&k, asd.statement.max_acc, self);
        let count = accounts.len();
        self.proposals.revealed.push(RevealRecord {
            proposal: id,
            reg_id,
            id_cred_pub,
            user_docs: user_docs.clone(),
            accounts,
            day: self.day,
        });
        self.proposals
            .proposals
            .get_mut(&id)
            .expect("proposal exists")
            .status = ProposalStatus::Executed;
        Ok(vec![BoardEvent::RevealExecuted {
            proposal: id,
            accounts: count,
        }])
    }

    // ---- tokens --------------------------------------------------------

    fn transfer(&mut self, sender: &str, to: &str, amount: u64) -> Result<Events, BoardError> {
        if let Some(pk) = parse_account_id(sender) {
            if self
                .users
                .blocked_pk_acc
                .contains(&hex::encode(pk.to_bytes()))
            {
                return Err(unauthorized("account is blocked"));
            }
        }
        if amount == 0 || to == sender {
            return Err(invalid("empty or self transfer"));
        }
        if !self.identities.contains_key(to) && parse_account_id(to).is_none() {
            return Err(unknown(to));
        }
        self.debit(sender, amount)?;
        self.credit(to, amount);
        Ok(vec![BoardEvent::Transfer {
            from: sender.to_string(),
            to: to.to_string(),
            amount,
        }])
    }
}

fn share_error(e: ThresholdError) -> BoardError {
    match e {
        ThresholdError::NotEnoughShares { need, got } => {
            BoardError::NotEnoughShares { need, have: got }
        }
        other => BoardError::InvalidShare(other.to_string()),
    }
}
