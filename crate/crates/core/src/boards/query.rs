use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::state::BoardState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoardKind {
    Sc,
    Cas,
    Users,
    Proposals,
}

impl std::str::FromStr for BoardKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sc" => Ok(BoardKind::Sc),
            "cas" => Ok(BoardKind::Cas),
            "users" => Ok(BoardKind::Users),
            "proposals" => Ok(BoardKind::Proposals),
            other => Err(format!("unknown board {other}")),
        }
    }
}

/// Read-ACL filtered view. The proposals board is visible to seated SC
/// members only; everyone else gets a view that reveals nothing about it.
pub fn query(state: &BoardState, board: BoardKind, reader: &str) -> Value {
    match board {
        BoardKind::Sc => json!({
            "board": "sc",
            "day": state.day,
            "members": state.sc.members,
            "expelled": state.sc.expelled,
            "burned_total": state.ledger.burned_total,
            "current_epoch": state.current_epoch,
            "committees": state.committees,
            "committee_members": state.committee_members,
            "rekey_pending": state.sc.rekey_pending,
            "motions": state.motions,
            "tx_log": state.sc.tx_log,
        }),
        BoardKind::Cas => {
            let cas: serde_json::Map<String, Value> = state
                .cas
                .cas
                .iter()
                .map(|(id, c)| {
                    let mut v = serde_json::to_value(c).expect("CA entries serialize");
                    v["score"] = json!(c.score(&state.params));
                    v["issuance_cap"] = json!(c.issuance_cap(&state.params));
                    (id.clone(), v)
                })
                .collect();
            json!({
                "board": "cas",
                "day": state.day,
                "cas": cas,
                "tx_log": state.cas.tx_log,
            })
        }
        BoardKind::Users => json!({
            "board": "users",
            "day": state.day,
            "asds": state.users.asds,
            "blocked_pk_acc": state.users.blocked_pk_acc,
            "deactivated": state.users.deactivated,
            "renewal_due": state.users.renewal_due,
            "complaints": state.users.complaints,
            "tx_log": state.users.tx_log,
        }),
        BoardKind::Proposals if state.is_seated(reader) => json!({
            "board": "proposals",
            "day": state.day,
            "proposals": state.proposals.proposals,
            "revealed": state.proposals.revealed,
            "tx_log": state.proposals.tx_log,
        }),
        BoardKind::Proposals => json!({
            "board": "proposals",
            "redacted": true,
        }),
    }
}
