//! The four boards, token ledger, and logical clock as a deterministic
//! transaction-application state machine.
//!
//! Every mutation goes through [`apply`] or [`advance_time`]. A rejected
//! transaction leaves the state untouched and yields a [`BoardError`] whose
//! [`BoardError::rule`] names the violated rule.

mod apply;
mod events;
mod query;
mod state;
mod time;
mod tx;

use serde::{Deserialize, Serialize};

pub use apply::apply;
pub use events::BoardEvent;
pub use query::{query, BoardKind};
pub use state::{
    genesis, AsdEntry, BoardState, CaBoard, CaEntry, CaStatus, Complaint, GenesisAccount,
    GenesisMember, Identity, Ledger, MemberStatus, Motion, MotionKind, MotionStatus, Proposal,
    ProposalBoard, ProposalStatus, RevealRecord, Role, ScBoard, ScMember, TxLogEntry, UsersBoard,
};
pub use time::advance_time;
pub use tx::{account_id, Transaction, TxBody, TxKind};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    /// Reveal threshold: any `d + 1` committee members decrypt.
    pub d: u32,
    pub sc_stake: u64,
    pub ca_collateral: u64,
    /// Paid to the CA named in an ASD.
    pub reg_fee: u64,
    /// Burned when an ASD is added.
    pub reg_burn: u64,
    pub website_min_balance: u64,
    /// Burned from the applicant's balance on every SC or CA join request.
    pub join_fee_deduction: u64,
    pub notice_period: u64,
    pub cert_validity: u64,
    pub max_acc: u64,
    pub vote_window: u64,
    pub collateral_unit: u64,
    pub penalty_weight: u64,
    pub cap_factor: u64,
    /// Collateral fraction burned per accepted penalty, in basis points.
    pub penalty_bps: u64,
    /// Issuance cap window in days.
    pub cap_window: u64,
    /// ASDs whose committee epoch has lost at least this many members are
    /// flagged for renewal. `None` disables the rule.
    pub reshare_force_threshold: Option<u32>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            d: 2,
            sc_stake: 1_000,
            ca_collateral: 5_000,
            reg_fee: 10,
            reg_burn: 5,
            website_min_balance: 50,
            join_fee_deduction: 20,
            notice_period: 180,
            cert_validity: crate::identity::CERT_VALIDITY,
            max_acc: 3,
            vote_window: 14,
            collateral_unit: 1_000,
            penalty_weight: 2,
            cap_factor: 10,
            penalty_bps: 2_500,
            cap_window: 30,
            reshare_force_threshold: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error, Serialize, Deserialize)]
pub enum BoardError {
    #[error("sender not authorized: {0}")]
    Unauthorized(String),
    #[error("insufficient balance: need {need}, have {have}")]
    InsufficientBalance { need: u64, have: u64 },
    #[error("stake {offered} below required {required}")]
    InsufficientStake { offered: u64, required: u64 },
    #[error("motion has not passed")]
    VoteNotPassed,
    #[error("notice period ends on day {ready_on}")]
    NoticePeriodNotElapsed { ready_on: u64 },
    #[error("pending duties: {0}")]
    PendingDutiesExist(String),
    #[error("unknown entity: {0}")]
    UnknownEntity(String),
    #[error("RegID already on the users board")]
    DuplicateRegId,
    #[error("CA is not active: {0}")]
    CaInactive(String),
    #[error("bad transaction signature")]
    BadSignature,
    #[error("expected nonce {expected}, got {got}")]
    BadNonce { expected: u64, got: u64 },
    #[error("ASD rejected: {0}")]
    InvalidAsd(String),
    #[error("sender already voted")]
    DuplicateVote,
    #[error("voting is closed")]
    VoteClosed,
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("decryption share rejected: {0}")]
    InvalidShare(String),
    #[error("need {need} verified shares, have {have}")]
    NotEnoughShares { need: usize, have: usize },
    #[error("CA issuance cap of {cap} per window reached")]
    IssuanceCapExceeded { cap: u64 },
    #[error("need at least {need} committee members, have {have}")]
    TooFewMembers { need: usize, have: usize },
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
}

impl BoardError {
    /// Stable rule identifier for logs and scenario expectations.
    pub fn rule(&self) -> &'static str {
        match self {
            BoardError::Unauthorized(_) => "Unauthorized",
            BoardError::InsufficientBalance { .. } => "InsufficientBalance",
            BoardError::InsufficientStake { .. } => "InsufficientStake",
            BoardError::VoteNotPassed => "VoteNotPassed",
            BoardError::NoticePeriodNotElapsed { .. } => "NoticePeriodNotElapsed",
            BoardError::PendingDutiesExist(_) => "PendingDutiesExist",
            BoardError::UnknownEntity(_) => "UnknownEntity",
            BoardError::DuplicateRegId => "DuplicateRegId",
            BoardError::CaInactive(_) => "CaInactive",
            BoardError::BadSignature => "BadSignature",
            BoardError::BadNonce { .. } => "BadNonce",
            BoardError::InvalidAsd(_) => "InvalidAsd",
            BoardError::DuplicateVote => "DuplicateVote",
            BoardError::VoteClosed => "VoteClosed",
            BoardError::InvalidState(_) => "InvalidState",
            BoardError::InvalidShare(_) => "InvalidShare",
            BoardError::NotEnoughShares { .. } => "NotEnoughShares",
            BoardError::IssuanceCapExceeded { .. } => "IssuanceCapExceeded",
            BoardError::TooFewMembers { .. } => "TooFewMembers",
            BoardError::InvalidParams(_) => "InvalidParams",
        }
    }
}
