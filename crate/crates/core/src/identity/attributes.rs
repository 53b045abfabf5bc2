use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Calendar, ProtocolError, CERT_VALIDITY};
use crate::crypto::Scalar;

pub const ATTR_OVER18: usize = 0;
pub const ATTR_COUNTRY: usize = 1;
pub const ATTR_ISSUANCE_EPOCH: usize = 2;
pub const ATTR_SCHEMA_VERSION: usize = 3;
pub const ATTRIBUTE_COUNT: usize = 4;
pub const SCHEMA_VERSION: u64 = 1;

/// ISO 3166 alpha-2 to numeric.
pub const COUNTRY_CODES: &[(&str, u64)] = &[
    ("AR", 32),
    ("AU", 36),
    ("AT", 40),
    ("BE", 56),
    ("BR", 76),
    ("CA", 124),
    ("CH", 756),
    ("CN", 156),
    ("DE", 276),
    ("DK", 208),
    ("EE", 233),
    ("ES", 724),
    ("FI", 246),
    ("FR", 250),
    ("GB", 826),
    ("IE", 372),
    ("IN", 356),
    ("IT", 380),
    ("JP", 392),
    ("KR", 410),
    ("MX", 484),
    ("NG", 566),
    ("NL", 528),
    ("NO", 578),
    ("PL", 616),
    ("PT", 620),
    ("SE", 752),
    ("SG", 702),
    ("US", 840),
    ("ZA", 710),
];

pub fn country_code(country: &str) -> Option<u64> {
    COUNTRY_CODES
        .iter()
        .find(|(c, _)| c.eq_ignore_ascii_case(country))
        .map(|(_, n)| *n)
}

/// Simulated identity documents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserDocs {
    #[serde(with = "hex::serde")]
    pub doc_blob: Vec<u8>,
    #[serde(with = "hex::serde")]
    pub doc_hash: [u8; 32],
    pub country: String,
    pub birth_year: u32,
}

impl UserDocs {
    pub fn new(doc_blob: Vec<u8>, country: impl Into<String>, birth_year: u32) -> Self {
        let doc_hash = Sha256::digest(&doc_blob).into();
        UserDocs {
            doc_blob,
            doc_hash,
            country: country.into(),
            birth_year,
        }
    }

    pub fn hash_matches(&self) -> bool {
        <[u8; 32]>::from(Sha256::digest(&self.doc_blob)) == self.doc_hash
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AttributeList {
    pub values: Vec<Scalar>,
}

impl AttributeList {
    pub fn over18(&self) -> bool {
        self.values.get(ATTR_OVER18) == Some(&Scalar::ONE)
    }
}

/// CA-side mapping of documents to the fixed attribute schema.
pub fn ca_extract_attributes(
    docs: &UserDocs,
    day: u64,
    calendar: &Calendar,
) -> Result<AttributeList, ProtocolError> {
    if docs.doc_blob.is_empty() {
        return Err(ProtocolError::MalformedDocs("empty document".into()));
    }
    if !docs.hash_matches() {
        return Err(ProtocolError::MalformedDocs(
            "document hash mismatch".into(),
        ));
    }
    let country = country_code(&docs.country).ok_or_else(|| {
        ProtocolError::MalformedDocs(format!("unknown country {:?}", docs.country))
    })?;
    let year = calendar.year(day);
    if docs.birth_year > year {
        return Err(ProtocolError::MalformedDocs(
            "birth year in the future".into(),
        ));
    }
    let over18 = u64::from(year - docs.birth_year >= 18);
    Ok(AttributeList {
        values: vec![
            Scalar::from_u64(over18),
            Scalar::from_u64(country),
            Scalar::from_u64(day / CERT_VALIDITY),
            Scalar::from_u64(SCHEMA_VERSION),
        ],
    })
}
