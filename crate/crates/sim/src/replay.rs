//! Rebuilds the event log from the input sidecar and compares it with the
//! recorded one.

use std::path::Path;

use idchain_core::boards::{advance_time, apply, BoardState};
use idchain_core::identity::{check_account, verify_asd, Asd};

use crate::log::{advance_event, payload_digest, tx_event, EventLog, Input, Outcome};
use crate::SimError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplayReport {
    pub events: usize,
    pub terminal_hash: String,
    pub state_hash: String,
}

fn mismatch(msg: impl Into<String>) -> SimError {
    SimError::Replay(msg.into())
}

/// Replays the `inputs.jsonl` sidecar next to `events` and checks it
/// reproduces the event log line for line, and `state.json` when present.
/// `events` may also name the run directory.
pub fn replay(events: &Path) -> Result<ReplayReport, SimError> {
    let (dir, events_path) = if events.is_dir() {
        (events.to_path_buf(), events.join("events.jsonl"))
    } else {
        let dir = events.parent().unwrap_or(Path::new(".")).to_path_buf();
        (dir, events.to_path_buf())
    };
    let inputs = std::fs::read_to_string(dir.join("inputs.jsonl"))?;
    let events = std::fs::read_to_string(&events_path)?;
    let recorded = EventLog::parse(&events).map_err(mismatch)?;

    let mut log = EventLog::default();
    let mut state: Option<BoardState> = None;
    for (n, line) in inputs
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
    {
        let input: Input = serde_json::from_str(line)
            .map_err(|e| SimError::Parse(format!("inputs.jsonl line {}: {e}", n + 1)))?;
        if let Input::Genesis { state: s } = input {
            log.push(0, 0, "genesis", "genesis", &s.snapshot_hash());
            state = Some(*s);
            continue;
        }
        let st = state
            .as_mut()
            .ok_or_else(|| mismatch("input before genesis"))?;
        match input {
            Input::Genesis { .. } => unreachable!(),
            Input::Tx { i, tx, outcome } => {
                let r = apply(st, &tx).map_err(|e| e.rule().to_string());
                let got = match &r {
                    Ok(_) => Outcome::Accepted,
                    Err(rule) => Outcome::Rejected(rule.clone()),
                };
                if got != outcome {
                    return Err(mismatch(format!(
                        "input line {}: recorded {outcome:?}, replayed {got:?}",
                        n + 1
                    )));
                }
                let (kind, digest) = tx_event(&tx, &r);
                log.push(i, st.day, &tx.sender, &kind, &digest);
            }
            Input::Advance { i, days } => {
                let events = advance_time(st, days).map_err(|e| mismatch(e.to_string()))?;
                log.push(i, st.day, "clock", "advance_time", &advance_event(&events));
            }
            Input::Offchain {
                i,
                actor,
                kind,
                payload,
            } => {
                if kind == "verify_asd" {
                    recheck_verdict(st, &payload)
                        .map_err(|m| mismatch(format!("input line {}: {m}", n + 1)))?;
                }
                log.push(i, st.day, &actor, &kind, &payload_digest(&payload));
            }
        }
    }
    let state = state.ok_or_else(|| mismatch("no genesis input"))?;

    let (want, got) = (recorded.lines(), log.lines());
    if let Some(k) = (0..want.len().min(got.len())).find(|&k| want[k] != got[k]) {
        return Err(mismatch(format!(
            "event {} differs: recorded {} replayed {}",
            k + 1,
            want[k],
            got[k]
        )));
    }
    if want.len() != got.len() {
        return Err(mismatch(format!(
            "recorded {} events, replayed {}",
            want.len(),
            got.len()
        )));
    }
    let state_hash = state.snapshot_hash();
    if let Ok(text) = std::fs::read_to_string(dir.join("state.json")) {
        let saved: BoardState =
            serde_json::from_str(&text).map_err(|e| SimError::Parse(format!("state.json: {e}")))?;
        if saved.snapshot_hash() != state_hash {
            return Err(mismatch("final state differs from state.json"));
        }
    }
    Ok(ReplayReport {
        events: got.len(),
        terminal_hash: log.terminal_hash().to_string(),
        state_hash,
    })
}

fn recheck_verdict(state: &BoardState, payload: &serde_json::Value) -> Result<(), String> {
    let asd: Asd = serde_json::from_value(payload["asd"].clone()).map_err(|e| e.to_string())?;
    let on_board = payload["on_board"].as_bool().unwrap_or(false);
    let r = if on_board {
        check_account(&asd, state)
    } else {
        verify_asd(&asd, state)
    };
    let verdict = match r {
        Ok(()) => "valid".to_string(),
        Err(e) => e.to_string(),
    };
    if payload["verdict"].as_str() != Some(verdict.as_str()) {
        return Err(format!("ASD verdict changed to {verdict}"));
    }
    Ok(())
}
