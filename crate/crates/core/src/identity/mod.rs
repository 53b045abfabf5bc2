//! The three user-facing protocols: registration with a CA, opening an
//! anonymous account, and threshold revocation of an account's anonymity.

mod account;
mod attributes;
mod registration;
mod revocation;

use serde::{Deserialize, Serialize};

use crate::blind::BlindSigError;
use crate::relation::RelationError;
use crate::threshold::ThresholdError;

pub use account::{check_account, create_account, verify_asd, Asd, AsdRejection, BoardContext};
pub use attributes::{
    ca_extract_attributes, country_code, AttributeList, UserDocs, ATTRIBUTE_COUNT, ATTR_COUNTRY,
    ATTR_ISSUANCE_EPOCH, ATTR_OVER18, ATTR_SCHEMA_VERSION, COUNTRY_CODES, SCHEMA_VERSION,
};
pub use registration::{
    finish_registration, prepare_registration, run_registration, CaRecord, CertificateAuthority,
    IssuanceResponse, IssuanceTranscript, RegistrationRequest, UserCert, UserRegistrationState,
};
pub use revocation::{
    collect_accounts, decrypt_eid, recover_prf_key, revoke_anonymity, AsdIndex, CaDirectory,
    RevocationResult, RevokedAccount,
};

/// Six months of logical days.
pub const CERT_VALIDITY: u64 = 180;
pub const DEFAULT_GENESIS_YEAR: u32 = 2025;

/// Maps logical days to calendar years for age checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Calendar {
    pub genesis_year: u32,
}

impl Default for Calendar {
    fn default() -> Self {
        Calendar {
            genesis_year: DEFAULT_GENESIS_YEAR,
        }
    }
}

impl Calendar {
    pub fn year(&self, day: u64) -> u32 {
        self.genesis_year + (day / 365) as u32
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolOptions {
    pub range_proofs: bool,
    pub calendar: Calendar,
}

impl Default for ProtocolOptions {
    fn default() -> Self {
        ProtocolOptions {
            range_proofs: true,
            calendar: Calendar::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProtocolError {
    #[error("malformed documents: {0}")]
    MalformedDocs(String),
    #[error("documents rejected: {0}")]
    DocsRejected(String),
    #[error("registration proof invalid")]
    RegistrationProofInvalid,
    #[error("IDcredPUB already registered with this CA")]
    DuplicateIdCredPub,
    #[error("issued certificate does not verify")]
    InvalidCertificate,
    #[error("certificate attributes do not satisfy the policy")]
    PolicyUnsatisfied,
    #[error("all account indices up to Max_ACC are used")]
    MaxAccountsReached,
    #[error("certificate expired")]
    CertExpired,
    #[error("need {need} cooperating share holders, got {got}")]
    NotEnoughShares { need: usize, got: usize },
    #[error("RegID not on the users board")]
    UnknownRegId,
    #[error("CA holds no record for the decrypted IDcredPUB")]
    CaRecordMissing,
    #[error("unknown committee epoch {0}")]
    UnknownCommittee(u64),
    #[error(transparent)]
    Threshold(#[from] ThresholdError),
    #[error(transparent)]
    Blind(#[from] BlindSigError),
    #[error(transparent)]
    Relation(#[from] RelationError),
}
