//! Deterministic multi-actor simulation of the identity chain.
//!
//! A [`Scenario`] names the actors and lists steps. [`World`] executes them
//! against the boards, keeping every actor's private state off-board, and
//! records a hash-chained event log plus an input sidecar from which
//! [`replay`] rebuilds the same log.

pub mod log;
pub mod replay;
pub mod scenario;
pub mod world;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

pub use log::{EventLog, Input, Outcome};
pub use replay::{replay, ReplayReport};
pub use scenario::{Action, Check, Expectation, Scenario, Step};
pub use world::{GroundTruth, RunSummary, Stats, TrafficReport, World};

pub const SEED_ENV: &str = "IDCHAIN_SEED";
pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("scenario parse error: {0}")]
    Parse(String),
    #[error("step {index} ({op}) failed: {reason}")]
    Step {
        index: usize,
        op: String,
        reason: String,
    },
    #[error("replay mismatch: {0}")]
    Replay(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl SimError {
    /// Process exit code for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Parse(_) => 2,
            SimError::Step { .. } | SimError::Io(_) => 3,
            SimError::Replay(_) | SimError::Verification(_) => 4,
        }
    }
}

impl From<std::io::Error> for SimError {
    fn from(e: std::io::Error) -> Self {
        SimError::Io(e.to_string())
    }
}

/// Independent stream for one actor, derived from the run seed.
pub fn actor_rng(seed: u64, actor: &str) -> ChaCha20Rng {
    let mut h = Sha256::new();
    h.update(b"idchain-sim/rng");
    h.update(seed.to_le_bytes());
    h.update(actor.as_bytes());
    ChaCha20Rng::from_seed(h.finalize().into())
}

/// Seed precedence: explicit flag, then the environment, then the scenario.
pub fn resolve_seed(flag: Option<u64>, scenario: Option<u64>) -> Result<u64, SimError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Ok(v) = std::env::var(SEED_ENV) {
        return v
            .trim()
            .parse()
            .map_err(|_| SimError::Parse(format!("{SEED_ENV}={v} is not an unsigned integer")));
    }
    Ok(scenario.unwrap_or(DEFAULT_SEED))
}

pub(crate) fn sha256_hex(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p);
    }
    hex::encode(h.finalize())
}
