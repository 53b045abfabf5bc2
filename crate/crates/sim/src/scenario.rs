//! Scenario files: actors, parameter overrides, and an ordered list of steps.

use std::collections::BTreeMap;
use std::path::Path;

use idchain_core::boards::Params;
use idchain_core::identity::{Calendar, ProtocolOptions};
use schemars::JsonSchema;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};

use crate::SimError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub params: ParamOverrides,
    pub actors: Actors,
    pub steps: Vec<Step>,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Scenario, SimError> {
        serde_json::from_str(text).map_err(|e| SimError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Scenario, SimError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SimError::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            SimError::Parse(m) => SimError::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }
}

/// Overrides applied on top of the default board parameters.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ParamOverrides {
    pub d: Option<u32>,
    pub sc_stake: Option<u64>,
    pub ca_collateral: Option<u64>,
    pub reg_fee: Option<u64>,
    pub reg_burn: Option<u64>,
    pub website_min_balance: Option<u64>,
    pub join_fee_deduction: Option<u64>,
    pub notice_period: Option<u64>,
    pub max_acc: Option<u64>,
    pub vote_window: Option<u64>,
    pub collateral_unit: Option<u64>,
    pub penalty_weight: Option<u64>,
    pub cap_factor: Option<u64>,
    pub penalty_bps: Option<u64>,
    pub cap_window: Option<u64>,
    pub reshare_force_threshold: Option<u32>,
    pub range_proofs: Option<bool>,
    pub genesis_year: Option<u32>,
}

impl ParamOverrides {
    pub fn board_params(&self) -> Params {
        let mut p = Params::default();
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { p.$f = v; } )* };
        }
        set!(
            d,
            sc_stake,
            ca_collateral,
            reg_fee,
            reg_burn,
            website_min_balance,
            join_fee_deduction,
            notice_period,
            max_acc,
            vote_window,
            collateral_unit,
            penalty_weight,
            cap_factor,
            penalty_bps,
            cap_window
        );
        if self.reshare_force_threshold.is_some() {
            p.reshare_force_threshold = self.reshare_force_threshold;
        }
        p
    }

    pub fn protocol_options(&self) -> ProtocolOptions {
        let mut o = ProtocolOptions::default();
        if let Some(r) = self.range_proofs {
            o.range_proofs = r;
        }
        if let Some(y) = self.genesis_year {
            o.calendar = Calendar { genesis_year: y };
        }
        o
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Actors {
    /// Genesis committee members.
    #[serde(default)]
    pub sc: Vec<ScActor>,
    /// SC-role identities that may apply for a seat later.
    #[serde(default)]
    pub candidates: Vec<FundedActor>,
    #[serde(default)]
    pub cas: Vec<CaActor>,
    #[serde(default)]
    pub users: Vec<UserActor>,
    #[serde(default)]
    pub websites: Vec<FundedActor>,
    #[serde(default = "default_faucet")]
    pub faucet: u64,
}

fn default_faucet() -> u64 {
    1_000_000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ScActor {
    pub id: String,
    #[serde(default)]
    pub stake: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct FundedActor {
    pub id: String,
    #[serde(default)]
    pub balance: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct CaActor {
    pub id: String,
    #[serde(default)]
    pub balance: u64,
    /// Admitted by a unanimous committee vote right after genesis.
    #[serde(default = "yes")]
    pub active: bool,
    #[serde(default)]
    pub collateral: Option<u64>,
    #[serde(default)]
    pub scope: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct UserActor {
    pub id: String,
    pub country: String,
    pub birth_year: u32,
    /// Document number presented to the CA; derived from the seed if absent.
    #[serde(default)]
    pub document: Option<String>,
}

fn yes() -> bool {
    true
}

/// Expected outcome of an action step.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    #[default]
    Ok,
    /// Rule name of the expected rejection, e.g. `"Unauthorized"`.
    Reject(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, JsonSchema)]
pub struct Step {
    #[serde(flatten)]
    pub action: Action,
    #[serde(default, skip_serializing_if = "is_ok")]
    pub expect: Expectation,
    /// Signs the step's transactions as this identity instead of the
    /// natural actor.
    #[serde(default, rename = "as", skip_serializing_if = "Option::is_none")]
    pub sender: Option<String>,
}

fn is_ok(e: &Expectation) -> bool {
    *e == Expectation::Ok
}

impl<'de> Deserialize<'de> for Step {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let mut map = serde_json::Map::<String, serde_json::Value>::deserialize(d)?;
        let expect = match map.remove("expect") {
            Some(v) => serde_json::from_value(v).map_err(D::Error::custom)?,
            None => Expectation::Ok,
        };
        let sender = match map.remove("as") {
            Some(v) => Some(serde_json::from_value(v).map_err(D::Error::custom)?),
            None => None,
        };
        let action =
            serde_json::from_value(serde_json::Value::Object(map)).map_err(D::Error::custom)?;
        Ok(Step {
            action,
            expect,
            sender,
        })
    }
}

/// Accounts are addressed as `user/n`, the user's n-th account in creation
/// order. Motions are addressed by their board label, with
/// `block_account:user/n` for account blocks, and proposals by the name
/// given at submission.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum Action {
    AdvanceTime {
        days: u64,
    },
    Transfer {
        from: String,
        to: String,
        amount: u64,
    },
    RegisterUser {
        user: String,
        ca: String,
    },
    CreateAccount {
        user: String,
        #[serde(default)]
        policy: PolicySpec,
    },
    /// Proves the account relation at an index beyond Max_ACC.
    ForgeAccount {
        user: String,
        x: u64,
    },
    AddAsd {
        user: String,
        account: u64,
        #[serde(default = "yes")]
        fund: bool,
    },
    VerifyAsd {
        user: String,
        account: u64,
        valid: bool,
    },
    DeactivateAsd {
        user: String,
        account: u64,
    },
    ScJoin {
        member: String,
        #[serde(default)]
        stake: Option<u64>,
    },
    ScVote {
        voters: Vec<String>,
        motion: String,
        #[serde(default = "yes")]
        yes: bool,
    },
    ScExit {
        member: String,
    },
    ScFinalizeExit {
        member: String,
    },
    ScExpel {
        by: String,
        member: String,
        #[serde(default)]
        reason: String,
    },
    /// Deals a fresh committee over the seated members and posts it.
    ScRekey {
        dealer: String,
    },
    CaJoin {
        ca: String,
        #[serde(default)]
        collateral: Option<u64>,
    },
    CaVote {
        voters: Vec<String>,
        motion: String,
        #[serde(default = "yes")]
        yes: bool,
    },
    CaExit {
        ca: String,
        #[serde(default)]
        transfer_to: Option<String>,
    },
    CaFinalizeExit {
        ca: String,
    },
    CaPenalize {
        by: String,
        ca: String,
        #[serde(default)]
        reason: String,
    },
    /// The CA loses its private registration records.
    CaDropRecords {
        ca: String,
    },
    BlockAccount {
        by: String,
        user: String,
        account: u64,
        #[serde(default)]
        reason: String,
    },
    WebsiteComplaint {
        website: String,
        user: String,
        account: u64,
        #[serde(default)]
        reason: String,
    },
    RpSubmit {
        by: String,
        user: String,
        account: u64,
        name: String,
        #[serde(default)]
        reason: String,
    },
    RpVote {
        voters: Vec<String>,
        proposal: String,
        #[serde(default = "yes")]
        yes: bool,
    },
    RpShare {
        members: Vec<String>,
        proposal: String,
        /// Posts a share whose value was altered after proving.
        #[serde(default)]
        tamper: bool,
    },
    /// Combines the posted shares, fetches the CA record, and posts the
    /// reveal. `holders` decrypt the ERegID chunks; defaults to the first
    /// threshold-many seated holders of that epoch.
    RpExecute {
        by: String,
        proposal: String,
        #[serde(default)]
        holders: Option<Vec<String>>,
    },
    /// Off-chain revocation run by `holders` (default: every seated member).
    Revoke {
        user: String,
        account: u64,
        #[serde(default)]
        holders: Option<Vec<String>>,
    },
    Expect {
        check: Check,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct PolicySpec {
    pub label: String,
    /// Attribute name (`over18`, `country`, `issuance_epoch`,
    /// `schema_version`) to required value.
    pub require: BTreeMap<String, PolicyValue>,
}

impl Default for PolicySpec {
    fn default() -> Self {
        PolicySpec {
            label: "over18".into(),
            require: [("over18".to_string(), PolicyValue::Number(1))].into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(untagged)]
pub enum PolicyValue {
    Number(u64),
    /// Country name, for the `country` attribute.
    Text(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Check {
    Balance {
        id: String,
        eq: u64,
    },
    BurnedTotal {
        eq: u64,
    },
    Conserved,
    AsdCount {
        eq: usize,
    },
    RenewalDue {
        user: String,
        account: u64,
        is: bool,
    },
    Blocked {
        user: String,
        account: u64,
        is: bool,
    },
    MemberStatus {
        id: String,
        is: String,
    },
    CaStatus {
        id: String,
        is: String,
    },
    CaScore {
        id: String,
        eq: u64,
    },
    ProposalStatus {
        proposal: String,
        is: String,
    },
    NonVoters {
        proposal: String,
        eq: Vec<String>,
    },
    RevealMatchesTruth {
        proposal: String,
    },
    RevealedCount {
        eq: usize,
    },
    CurrentEpoch {
        eq: u64,
    },
    NextAccountIndex {
        user: String,
        eq: u64,
    },
    ComplaintCount {
        eq: usize,
    },
    /// No two board ASDs can be grouped by anything but their RegIDs.
    Unlinkable,
    /// No user actor id or CA-hidden secret appears in protocol traffic.
    TrafficClean,
}

pub fn schema() -> schemars::schema::RootSchema {
    schemars::schema_for!(Scenario)
}
