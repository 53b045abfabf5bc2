//! Python bindings: run and replay scenarios, check ASDs against a saved
//! state, and evaluate the RegID PRF.

use std::path::PathBuf;

use idchain_core::boards::BoardState;
use idchain_core::identity::{check_account, verify_asd as verify, Asd};
use idchain_core::prf::{prf_eval as eval, AccountIndex, PrfKey};
use idchain_core::Scalar;
use idchain_sim::{replay as replay_run, Scenario, SimError, World};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn sim_err(e: SimError) -> PyErr {
    match e {
        SimError::Parse(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Runs a scenario file and returns its summary as a JSON string. Outputs
/// are written to `out` when given.
#[pyfunction]
#[pyo3(signature = (path, seed=None, out=None))]
fn run_scenario(path: PathBuf, seed: Option<u64>, out: Option<PathBuf>) -> PyResult<String> {
    let scenario = Scenario::load(&path).map_err(sim_err)?;
    let seed = seed.or(scenario.seed).unwrap_or(idchain_sim::DEFAULT_SEED);
    let mut world = World::new(scenario, seed).map_err(sim_err)?;
    let result = world.run();
    if let Some(dir) = out {
        world.write_outputs(&dir).map_err(sim_err)?;
    }
    result.map_err(sim_err)?;
    serde_json::to_string(&world.summary()).map_err(value_err)
}

/// Replays a run's `events.jsonl` (or its directory) and returns the
/// terminal hash.
#[pyfunction]
fn replay(events: PathBuf) -> PyResult<String> {
    Ok(replay_run(&events).map_err(sim_err)?.terminal_hash)
}

/// Checks an ASD (JSON) against a saved state (JSON). Returns `(ok, reason)`.
#[pyfunction]
fn verify_asd(asd_json: &str, state_json: &str) -> PyResult<(bool, String)> {
    let asd: Asd = serde_json::from_str(asd_json).map_err(value_err)?;
    let state: BoardState = serde_json::from_str(state_json).map_err(value_err)?;
    let r = if state.users.asds.contains_key(&asd.reg_id().to_hex()) {
        check_account(&asd, &state)
    } else {
        verify(&asd, &state)
    };
    Ok(match r {
        Ok(()) => (true, String::new()),
        Err(e) => (false, e.to_string()),
    })
}

/// RegID for key `k` (big-endian hex scalar) at index `x`, as hex.
#[pyfunction]
fn prf_eval(key_hex: &str, x: u64, max_acc: u64) -> PyResult<String> {
    let bytes = hex::decode(key_hex).map_err(value_err)?;
    let key = PrfKey::new(Scalar::from_bytes(&bytes).map_err(value_err)?).map_err(value_err)?;
    let index = AccountIndex::new(x, max_acc).map_err(value_err)?;
    Ok(eval(&key, index).map_err(value_err)?.to_hex())
}

#[pymodule]
fn idchain(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(replay, m)?)?;
    m.add_function(wrap_pyfunction!(verify_asd, m)?)?;
    m.add_function(wrap_pyfunction!(prf_eval, m)?)?;
    Ok(())
}
