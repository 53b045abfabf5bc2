use std::collections::{BTreeMap, BTreeSet};

use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{BoardError, Params};
use crate::blind::IssuerPublicKey;
use crate::crypto::G1;
use crate::identity::{Asd, AsdIndex, BoardContext, RevokedAccount, UserDocs};
use crate::prf::RegId;
use crate::threshold::{committee_keygen, CommitteeKeySet, DecryptionShare, KeyShare};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Sc,
    Ca,
    Website,
    Faucet,
    User,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Identity {
    pub pk: G1,
    pub role: Role,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MemberStatus {
    Candidate,
    Active,
    Exiting { since: u64, ready_on: u64 },
    Exited,
    Expelled,
    Rejected,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScMember {
    pub pk: G1,
    pub stake: u64,
    pub status: MemberStatus,
    pub joined_at: u64,
    /// Latest committee epoch holding a share for this member.
    pub key_epoch: Option<u64>,
    pub exit_announced: bool,
}

impl ScMember {
    pub fn is_seated(&self) -> bool {
        matches!(
            self.status,
            MemberStatus::Active | MemberStatus::Exiting { .. }
        )
    }

    fn holds_stake(&self) -> bool {
        matches!(
            self.status,
            MemberStatus::Candidate | MemberStatus::Active | MemberStatus::Exiting { .. }
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TxLogEntry {
    pub seq: u64,
    pub day: u64,
    pub sender: String,
    pub kind: String,
    pub digest: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScBoard {
    pub members: BTreeMap<String, ScMember>,
    pub expelled: Vec<String>,
    /// Set when membership changed since the last committee dealing.
    pub rekey_pending: bool,
    pub tx_log: Vec<TxLogEntry>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CaStatus {
    Pending,
    Active,
    Exiting { since: u64, ready_on: u64 },
    Exited,
    Rejected,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaEntry {
    pub ca_pk: IssuerPublicKey,
    pub fingerprint: String,
    pub collateral: u64,
    pub scope: String,
    pub issued_count: u64,
    pub penalties: u64,
    pub status: CaStatus,
    pub exit_time: Option<u64>,
    pub transfer_to: Option<String>,
    pub window: u64,
    pub window_issued: u64,
    pub exit_announced: bool,
}

impl CaEntry {
    pub fn is_operating(&self) -> bool {
        matches!(self.status, CaStatus::Active | CaStatus::Exiting { .. })
    }

    fn holds_collateral(&self) -> bool {
        matches!(
            self.status,
            CaStatus::Pending | CaStatus::Active | CaStatus::Exiting { .. }
        )
    }

    /// `floor(collateral / unit) + issued − weight · penalties`, floored at 0.
    pub fn score(&self, params: &Params) -> u64 {
        let base = self.collateral / params.collateral_unit.max(1) + self.issued_count;
        base.saturating_sub(params.penalty_weight * self.penalties)
    }

    pub fn issuance_cap(&self, params: &Params) -> u64 {
        params.cap_factor * self.score(params)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaBoard {
    pub cas: BTreeMap<String, CaEntry>,
    pub tx_log: Vec<TxLogEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsdEntry {
    pub asd: Asd,
    pub owner: String,
    pub ca: String,
    pub added_at: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Complaint {
    pub website: String,
    pub reg_id: String,
    pub reason: String,
    pub day: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UsersBoard {
    /// Keyed by RegID hex.
    pub asds: BTreeMap<String, AsdEntry>,
    /// pk_ACC hex values.
    pub blocked_pk_acc: BTreeSet<String>,
    pub deactivated: BTreeSet<String>,
    pub renewal_due: BTreeSet<String>,
    pub complaints: Vec<Complaint>,
    pub tx_log: Vec<TxLogEntry>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProposalStatus {
    Voting,
    Approved,
    Rejected,
    Executed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Proposal {
    pub reg_id: String,
    pub reason: String,
    pub proposer: String,
    pub votes: BTreeMap<String, bool>,
    pub opened_at: u64,
    pub deadline: u64,
    pub status: ProposalStatus,
    /// Verified EID decryption shares keyed by committee index.
    pub eid_shares: BTreeMap<u32, DecryptionShare>,
    pub non_voters: Vec<String>,
}

impl Proposal {
    pub fn yes_votes(&self) -> usize {
        self.votes.values().filter(|v| **v).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RevealRecord {
    pub proposal: u64,
    pub reg_id: String,
    pub id_cred_pub: G1,
    pub user_docs: UserDocs,
    pub accounts: Vec<RevokedAccount>,
    pub day: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProposalBoard {
    pub proposals: BTreeMap<u64, Proposal>,
    pub revealed: Vec<RevealRecord>,
    pub next_id: u64,
    pub tx_log: Vec<TxLogEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum MotionKind {
    AdmitSc { candidate: String },
    ExpelSc { member: String, reason: String },
    BlockAccount { pk_acc: G1, reason: String },
    AdmitCa { ca: String },
    PenalizeCa { ca: String, reason: String },
}

impl MotionKind {
    pub fn label(&self) -> String {
        match self {
            MotionKind::AdmitSc { candidate } => format!("admit_sc:{candidate}"),
            MotionKind::ExpelSc { member, .. } => format!("expel_sc:{member}"),
            MotionKind::BlockAccount { pk_acc, .. } => {
                format!("block_account:{}", hex::encode(pk_acc.to_bytes()))
            }
            MotionKind::AdmitCa { ca } => format!("admit_ca:{ca}"),
            MotionKind::PenalizeCa { ca, .. } => format!("penalize_ca:{ca}"),
        }
    }

    /// Motions about CAs are voted with `CaVote`, the rest with `ScVote`.
    pub fn is_ca_motion(&self) -> bool {
        matches!(
            self,
            MotionKind::AdmitCa { .. } | MotionKind::PenalizeCa { .. }
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MotionStatus {
    Open,
    Passed,
    Rejected,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Motion {
    pub kind: MotionKind,
    pub opened_by: String,
    pub opened_at: u64,
    pub deadline: u64,
    pub votes: BTreeMap<String, bool>,
    pub status: MotionStatus,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ledger {
    pub balances: BTreeMap<String, u64>,
    pub burned_total: u64,
    pub genesis_total: u64,
    pub nonces: BTreeMap<String, u64>,
    pub tx_log: Vec<TxLogEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoardState {
    pub params: Params,
    pub day: u64,
    pub seq: u64,
    pub identities: BTreeMap<String, Identity>,
    pub sc: ScBoard,
    pub cas: CaBoard,
    pub users: UsersBoard,
    pub proposals: ProposalBoard,
    pub motions: BTreeMap<u64, Motion>,
    pub next_motion: u64,
    pub ledger: Ledger,
    pub committees: BTreeMap<u64, CommitteeKeySet>,
    /// Member ids per epoch; position `i` holds committee index `i + 1`.
    pub committee_members: BTreeMap<u64, Vec<String>>,
    pub current_epoch: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenesisMember {
    pub id: String,
    pub pk: G1,
    pub stake: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenesisAccount {
    pub id: String,
    pub pk: G1,
    pub role: Role,
    pub balance: u64,
}

/// Seeds the boards and deals the epoch-1 committee. Returns each initial
/// member's key share, to be handed over privately.
pub fn genesis<R: RngCore + CryptoRng>(
    params: Params,
    members: Vec<GenesisMember>,
    accounts: Vec<GenesisAccount>,
    rng: &mut R,
) -> Result<(BoardState, Vec<(String, KeyShare)>), BoardError> {
    let need = params.d as usize + 1;
    if members.len() < need {
        return Err(BoardError::TooFewMembers {
            need,
            have: members.len(),
        });
    }
    if let Some(m) = members.iter().find(|m| m.stake < params.sc_stake) {
        return Err(BoardError::InsufficientStake {
            offered: m.stake,
            required: params.sc_stake,
        });
    }
    if params.collateral_unit == 0 || params.vote_window == 0 || params.cap_window == 0 {
        return Err(BoardError::InvalidParams(
            "zero-length unit or window".into(),
        ));
    }
    if params.penalty_bps > 10_000 {
        return Err(BoardError::InvalidParams("penalty above 100%".into()));
    }

    let mut state = BoardState {
        params,
        day: 0,
        seq: 0,
        identities: BTreeMap::new(),
        sc: ScBoard::default(),
        cas: CaBoard::default(),
        users: UsersBoard::default(),
        proposals: ProposalBoard::default(),
        motions: BTreeMap::new(),
        next_motion: 1,
        ledger: Ledger::default(),
        committees: BTreeMap::new(),
        committee_members: BTreeMap::new(),
        current_epoch: 1,
    };
    state.proposals.next_id = 1;

    for m in &members {
        if m.id.starts_with("acc:") || state.identities.contains_key(&m.id) {
            return Err(BoardError::InvalidParams(format!(
                "duplicate or reserved id {}",
                m.id
            )));
        }
        state.identities.insert(
            m.id.clone(),
            Identity {
                pk: m.pk,
                role: Role::Sc,
            },
        );
        state.sc.members.insert(
            m.id.clone(),
            ScMember {
                pk: m.pk,
                stake: m.stake,
                status: MemberStatus::Active,
                joined_at: 0,
                key_epoch: Some(1),
                exit_announced: false,
            },
        );
        state.ledger.genesis_total += m.stake;
    }
    for a in &accounts {
        if a.id.starts_with("acc:") || state.identities.contains_key(&a.id) {
            return Err(BoardError::InvalidParams(format!(
                "duplicate or reserved id {}",
                a.id
            )));
        }
        state.identities.insert(
            a.id.clone(),
            Identity {
                pk: a.pk,
                role: a.role,
            },
        );
        state.ledger.balances.insert(a.id.clone(), a.balance);
        state.ledger.genesis_total += a.balance;
    }

    let order: Vec<String> = state.sc.members.keys().cloned().collect();
    let (keyset, shares) = committee_keygen(order.len() as u32, state.params.d, 1, rng)
        .map_err(|e| BoardError::InvalidParams(e.to_string()))?;
    state.committees.insert(1, keyset);
    state.committee_members.insert(1, order.clone());
    Ok((state, order.into_iter().zip(shares).collect()))
}

impl BoardState {
    pub fn balance(&self, id: &str) -> u64 {
        self.ledger.balances.get(id).copied().unwrap_or(0)
    }

    pub fn nonce(&self, id: &str) -> u64 {
        self.ledger.nonces.get(id).copied().unwrap_or(0)
    }

    pub fn seated_members(&self) -> Vec<String> {
        self.sc
            .members
            .iter()
            .filter(|(_, m)| m.is_seated())
            .map(|(id, _)| id.clone())
            .collect()
    }

    pub fn is_seated(&self, id: &str) -> bool {
        self.sc.members.get(id).is_some_and(ScMember::is_seated)
    }

    pub fn circulating(&self) -> u64 {
        self.ledger.balances.values().sum()
    }

    pub fn staked(&self) -> u64 {
        self.sc
            .members
            .values()
            .filter(|m| m.holds_stake())
            .map(|m| m.stake)
            .sum()
    }

    pub fn collateral(&self) -> u64 {
        self.cas
            .cas
            .values()
            .filter(|c| c.holds_collateral())
            .map(|c| c.collateral)
            .sum()
    }

    /// Conservation: circulating + staked + collateral + burned = genesis.
    pub fn is_conserved(&self) -> bool {
        self.circulating() + self.staked() + self.collateral() + self.ledger.burned_total
            == self.ledger.genesis_total
    }

    pub fn ca_by_fingerprint(&self, fingerprint: &str) -> Option<(&String, &CaEntry)> {
        self.cas
            .cas
            .iter()
            .find(|(_, c)| c.fingerprint == fingerprint)
    }

    pub fn asd_entry(&self, reg_id: &str) -> Option<&AsdEntry> {
        self.users.asds.get(reg_id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("board state serializes")
    }

    /// SHA-256 over the canonical JSON snapshot.
    pub fn snapshot_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    pub(crate) fn member_lost_count(&self, epoch: u64) -> usize {
        self.committee_members
            .get(&epoch)
            .map(|ids| ids.iter().filter(|id| !self.is_seated(id)).count())
            .unwrap_or(0)
    }

    /// Why an ASD on the board needs renewal, if it does.
    pub fn renewal_reason(&self, entry: &AsdEntry) -> Option<&'static str> {
        if self.day >= entry.asd.expires_at {
            return Some("expired");
        }
        let fp = entry.asd.statement.ca_pk.fingerprint();
        if !self
            .ca_by_fingerprint(&fp)
            .is_some_and(|(_, c)| c.is_operating())
        {
            return Some("ca-inactive");
        }
        if let Some(t) = self.params.reshare_force_threshold {
            if self.member_lost_count(entry.asd.statement.committee_epoch) >= t as usize {
                return Some("committee-reshared");
            }
        }
        None
    }

    /// Recomputes `renewal_due`, returning newly flagged RegIDs.
    pub(crate) fn refresh_renewals(&mut self) -> Vec<String> {
        let due: BTreeSet<String> = self
            .users
            .asds
            .iter()
            .filter(|(id, e)| {
                !self.users.deactivated.contains(*id) && self.renewal_reason(e).is_some()
            })
            .map(|(id, _)| id.clone())
            .collect();
        let fresh = due.difference(&self.users.renewal_due).cloned().collect();
        self.users.renewal_due = due;
        fresh
    }
}

impl BoardContext for BoardState {
    fn today(&self) -> u64 {
        self.day
    }

    fn ca_is_active(&self, ca_pk: &IssuerPublicKey) -> bool {
        self.ca_by_fingerprint(&ca_pk.fingerprint())
            .is_some_and(|(_, c)| c.is_operating() && &c.ca_pk == ca_pk)
    }

    fn committee(&self, epoch: u64) -> Option<&CommitteeKeySet> {
        self.committees.get(&epoch)
    }

    fn regid_registered(&self, reg_id: &RegId) -> bool {
        self.users.asds.contains_key(&reg_id.to_hex())
    }

    fn max_acc(&self) -> u64 {
        self.params.max_acc
    }
}

impl AsdIndex for BoardState {
    fn asd(&self, reg_id: &RegId) -> Option<&Asd> {
        self.users.asds.get(&reg_id.to_hex()).map(|e| &e.asd)
    }

    fn committee(&self, epoch: u64) -> Option<&CommitteeKeySet> {
        self.committees.get(&epoch)
    }
}
