//! Hash-chained event log and the input sidecar it is replayed from.

use idchain_core::boards::{BoardEvent, BoardState, Transaction};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::sha256_hex;

const CHAIN_DOMAIN: &[u8] = b"idchain-events/v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventLog {
    lines: Vec<String>,
    head: String,
}

impl Default for EventLog {
    fn default() -> Self {
        EventLog {
            lines: vec![],
            head: sha256_hex(&[CHAIN_DOMAIN]),
        }
    }
}

impl EventLog {
    pub fn push(&mut self, i: usize, day: u64, actor: &str, kind: &str, digest: &str) {
        let line = json!({
            "i": i,
            "day": day,
            "actor": actor,
            "kind": kind,
            "digest": digest,
        })
        .to_string();
        self.head = sha256_hex(&[self.head.as_bytes(), line.as_bytes()]);
        self.lines.push(line);
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }

    pub fn terminal_hash(&self) -> &str {
        &self.head
    }

    /// JSON lines followed by the terminal hash record.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for l in &self.lines {
            out.push_str(l);
            out.push('\n');
        }
        out.push_str(&json!({ "terminal_hash": self.head }).to_string());
        out.push('\n');
        out
    }

    /// Re-chains a rendered log and returns it if the terminal record
    /// matches.
    pub fn parse(text: &str) -> Result<EventLog, String> {
        let mut lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
        let last = lines.pop().ok_or("empty event log")?;
        let terminal: serde_json::Value =
            serde_json::from_str(last).map_err(|e| format!("terminal record: {e}"))?;
        let claimed = terminal
            .get("terminal_hash")
            .and_then(|v| v.as_str())
            .ok_or("event log has no terminal hash record")?;
        let mut log = EventLog::default();
        for l in lines {
            log.head = sha256_hex(&[log.head.as_bytes(), l.as_bytes()]);
            log.lines.push(l.to_string());
        }
        if log.head != claimed {
            return Err(format!(
                "terminal hash {claimed} does not match the chained lines ({})",
                log.head
            ));
        }
        Ok(log)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Accepted,
    Rejected(String),
}

/// Everything needed to rebuild the event log from the genesis state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Input {
    Genesis {
        state: Box<BoardState>,
    },
    Tx {
        i: usize,
        tx: Box<Transaction>,
        outcome: Outcome,
    },
    Advance {
        i: usize,
        days: u64,
    },
    /// An off-board protocol action; `payload` is what the event digest
    /// commits to.
    Offchain {
        i: usize,
        actor: String,
        kind: String,
        payload: serde_json::Value,
    },
}

pub(crate) fn tx_event(
    tx: &Transaction,
    outcome: &Result<Vec<BoardEvent>, String>,
) -> (String, String) {
    let tx_digest = tx.digest();
    match outcome {
        Ok(events) => {
            let ev = serde_json::to_vec(events).expect("events serialize");
            (tx.kind().name().to_string(), sha256_hex(&[&tx_digest, &ev]))
        }
        Err(rule) => (
            format!("rejected:{}:{rule}", tx.kind().name()),
            sha256_hex(&[&tx_digest, rule.as_bytes()]),
        ),
    }
}

pub(crate) fn advance_event(events: &[BoardEvent]) -> String {
    sha256_hex(&[&serde_json::to_vec(events).expect("events serialize")])
}

pub(crate) fn payload_digest(payload: &serde_json::Value) -> String {
    sha256_hex(&[payload.to_string().as_bytes()])
}
