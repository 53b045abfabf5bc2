use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::blind::IssuerPublicKey;
use crate::crypto::schnorr::{SchnorrSignature, SigningKey};
use crate::crypto::G1;
use crate::identity::{Asd, UserDocs};
use crate::threshold::{ChunkedCiphertext, CommitteeKeySet, DecryptionShare};

const SIGNING_DOMAIN: &[u8] = b"idchain-tx/v1";

/// Board identity of an anonymous account: self-certifying from `pk_acc`.
pub fn account_id(pk_acc: &G1) -> String {
    format!("acc:{}", hex::encode(pk_acc.to_bytes()))
}

pub(crate) fn parse_account_id(id: &str) -> Option<G1> {
    let bytes = hex::decode(id.strip_prefix("acc:")?).ok()?;
    G1::from_bytes(&bytes).ok().filter(|p| !p.is_identity())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload")]
pub enum TxBody {
    ScJoinRequest {
        stake: u64,
    },
    ScVote {
        motion: u64,
        yes: bool,
    },
    ScExitNotice,
    ScFinalizeExit,
    ScExpel {
        member: String,
        reason: String,
    },
    /// Installs a freshly dealt committee after membership changed.
    ScRekey {
        keyset: CommitteeKeySet,
    },
    CaJoinRequest {
        ca_pk: IssuerPublicKey,
        collateral: u64,
        scope: String,
    },
    CaVote {
        motion: u64,
        yes: bool,
    },
    CaExitNotice {
        transfer_to: Option<String>,
    },
    CaFinalizeExit,
    CaPenalize {
        ca: String,
        reason: String,
    },
    UserAddAsd {
        asd: Box<Asd>,
    },
    UserDeactivateAsd {
        reg_id: String,
    },
    BlockAccount {
        pk_acc: G1,
        reason: String,
    },
    WebsiteComplaint {
        reg_id: String,
        reason: String,
    },
    RpSubmit {
        reg_id: String,
        reason: String,
    },
    RpVote {
        proposal: u64,
        yes: bool,
    },
    RpShare {
        proposal: u64,
        share: DecryptionShare,
    },
    /// Relays the CA record for the revealed IDcredPUB together with the
    /// committee's shares for every ERegID chunk.
    RpExecute {
        proposal: u64,
        user_docs: UserDocs,
        ereg_id: ChunkedCiphertext,
        ereg_epoch: u64,
        ereg_shares: Vec<Vec<DecryptionShare>>,
    },
    TokenTransfer {
        to: String,
        amount: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TxKind {
    ScJoinRequest,
    ScVote,
    ScExitNotice,
    ScFinalizeExit,
    ScExpel,
    ScRekey,
    CaJoinRequest,
    CaVote,
    CaExitNotice,
    CaFinalizeExit,
    CaPenalize,
    UserAddAsd,
    UserDeactivateAsd,
    BlockAccount,
    WebsiteComplaint,
    RpSubmit,
    RpVote,
    RpShare,
    RpExecute,
    TokenTransfer,
}

impl TxKind {
    pub const ALL: [TxKind; 20] = [
        TxKind::ScJoinRequest,
        TxKind::ScVote,
        TxKind::ScExitNotice,
        TxKind::ScFinalizeExit,
        TxKind::ScExpel,
        TxKind::ScRekey,
        TxKind::CaJoinRequest,
        TxKind::CaVote,
        TxKind::CaExitNotice,
        TxKind::CaFinalizeExit,
        TxKind::CaPenalize,
        TxKind::UserAddAsd,
        TxKind::UserDeactivateAsd,
        TxKind::BlockAccount,
        TxKind::WebsiteComplaint,
        TxKind::RpSubmit,
        TxKind::RpVote,
        TxKind::RpShare,
        TxKind::RpExecute,
        TxKind::TokenTransfer,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TxKind::ScJoinRequest => "ScJoinRequest",
            TxKind::ScVote => "ScVote",
            TxKind::ScExitNotice => "ScExitNotice",
            TxKind::ScFinalizeExit => "ScFinalizeExit",
            TxKind::ScExpel => "ScExpel",
            TxKind::ScRekey => "ScRekey",
            TxKind::CaJoinRequest => "CaJoinRequest",
            TxKind::CaVote => "CaVote",
            TxKind::CaExitNotice => "CaExitNotice",
            TxKind::CaFinalizeExit => "CaFinalizeExit",
            TxKind::CaPenalize => "CaPenalize",
            TxKind::UserAddAsd => "UserAddAsd",
            TxKind::UserDeactivateAsd => "UserDeactivateAsd",
            TxKind::BlockAccount => "BlockAccount",
            TxKind::WebsiteComplaint => "WebsiteComplaint",
            TxKind::RpSubmit => "RpSubmit",
            TxKind::RpVote => "RpVote",
            TxKind::RpShare => "RpShare",
            TxKind::RpExecute => "RpExecute",
            TxKind::TokenTransfer => "TokenTransfer",
        }
    }
}

impl TxBody {
    pub fn kind(&self) -> TxKind {
        match self {
            TxBody::ScJoinRequest { .. } => TxKind::ScJoinRequest,
            TxBody::ScVote { .. } => TxKind::ScVote,
            TxBody::ScExitNotice => TxKind::ScExitNotice,
            TxBody::ScFinalizeExit => TxKind::ScFinalizeExit,
            TxBody::ScExpel { .. } => TxKind::ScExpel,
            TxBody::ScRekey { .. } => TxKind::ScRekey,
            TxBody::CaJoinRequest { .. } => TxKind::CaJoinRequest,
            TxBody::CaVote { .. } => TxKind::CaVote,
            TxBody::CaExitNotice { .. } => TxKind::CaExitNotice,
            TxBody::CaFinalizeExit => TxKind::CaFinalizeExit,
            TxBody::CaPenalize { .. } => TxKind::CaPenalize,
            TxBody::UserAddAsd { .. } => TxKind::UserAddAsd,
            TxBody::UserDeactivateAsd { .. } => TxKind::UserDeactivateAsd,
            TxBody::BlockAccount { .. } => TxKind::BlockAccount,
            TxBody::WebsiteComplaint { .. } => TxKind::WebsiteComplaint,
            TxBody::RpSubmit { .. } => TxKind::RpSubmit,
            TxBody::RpVote { .. } => TxKind::RpVote,
            TxBody::RpShare { .. } => TxKind::RpShare,
            TxBody::RpExecute { .. } => TxKind::RpExecute,
            TxBody::TokenTransfer { .. } => TxKind::TokenTransfer,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transaction {
    pub sender: String,
    pub nonce: u64,
    pub body: TxBody,
    pub signature: SchnorrSignature,
}

#[derive(Serialize)]
struct SigningView<'a> {
    sender: &'a str,
    nonce: u64,
    body: &'a TxBody,
}

impl Transaction {
    /// Canonical bytes covered by the signature.
    pub fn signing_bytes(sender: &str, nonce: u64, body: &TxBody) -> Vec<u8> {
        let mut out = SIGNING_DOMAIN.to_vec();
        out.extend(
            serde_json::to_vec(&SigningView {
                sender,
                nonce,
                body,
            })
            .expect("transaction bodies serialize"),
        );
        out
    }

    pub fn sign<R: RngCore + CryptoRng>(
        sender: impl Into<String>,
        nonce: u64,
        body: TxBody,
        key: &SigningKey,
        rng: &mut R,
    ) -> Transaction {
        let sender = sender.into();
        let signature = key.sign(&Self::signing_bytes(&sender, nonce, &body), rng);
        Transaction {
            sender,
            nonce,
            body,
            signature,
        }
    }

    pub fn verify_signature(&self, public: &G1) -> bool {
        self.signature.verify(
            public,
            &Self::signing_bytes(&self.sender, self.nonce, &self.body),
        )
    }

    pub fn kind(&self) -> TxKind {
        self.body.kind()
    }

    pub fn digest(&self) -> [u8; 32] {
        let bytes = serde_json::to_vec(self).expect("transactions serialize");
        Sha256::digest(bytes).into()
    }
}
