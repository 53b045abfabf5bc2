use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use idchain_core::blind::issuer_keygen;
use idchain_core::boards::{query, BoardKind, BoardState};
use idchain_core::crypto::schnorr::SigningKey;
use idchain_core::identity::{check_account, verify_asd, Asd, ATTRIBUTE_COUNT};
use idchain_sim::{actor_rng, replay, resolve_seed, Scenario, SimError, World};
use rand::rngs::OsRng;
use serde_json::json;

#[derive(Parser)]
#[command(name = "idchain", version, about = "Identity chain simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a scenario and write its outputs.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// Output directory (default: out/<scenario name>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides IDCHAIN_SEED and the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Rebuild a run's event log from its input sidecar and compare.
    Replay {
        /// events.jsonl of a run (or its output directory).
        #[arg(long)]
        events: PathBuf,
    },
    /// Print one board from a saved state as seen by a reader.
    Inspect {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        board: BoardKind,
        #[arg(long = "as", default_value = "public")]
        reader: String,
    },
    /// Generate a key pair for a role.
    Keygen {
        #[arg(long, value_enum)]
        role: KeyRole,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check an ASD against a saved board state.
    VerifyAsd {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        asd: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KeyRole {
    Sc,
    Ca,
    Website,
    User,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Writes one line to stdout; a closed pipe is not an error.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, SimError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SimError::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| SimError::Parse(format!("{}: {e}", path.display())))
}

fn dispatch(command: Command) -> Result<(), SimError> {
    match command {
        Command::Run {
            scenario,
            out,
            seed,
        } => {
            let scenario = Scenario::load(&scenario)?;
            let seed = resolve_seed(seed, scenario.seed)?;
            let out = out.unwrap_or_else(|| Path::new("out").join(&scenario.name));
            let mut world = World::new(scenario, seed)?;
            let result = world.run();
            world.write_outputs(&out)?;
            result?;
            let summary =
                serde_json::to_string_pretty(&world.summary()).expect("summary serializes");
            emit(&summary);
            Ok(())
        }
        Command::Replay { events } => {
            let report = replay(&events)?;
            emit(&format!(
                "replay ok: {} events, terminal hash {}",
                report.events, report.terminal_hash
            ));
            Ok(())
        }
        Command::Inspect {
            state,
            board,
            reader,
        } => {
            let state: BoardState = read_json(&state)?;
            let view = query(&state, board, &reader);
            emit(&serde_json::to_string_pretty(&view).expect("values serialize"));
            Ok(())
        }
        Command::Keygen { role, seed, out } => {
            let seed = match seed {
                Some(s) => Some(s),
                None => std::env::var(idchain_sim::SEED_ENV)
                    .ok()
                    .map(|v| v.trim().parse())
                    .transpose()
                    .map_err(|_| {
                        SimError::Parse("IDCHAIN_SEED is not an unsigned integer".into())
                    })?,
            };
            let (key, issuer) = match seed {
                Some(s) => {
                    let mut rng = actor_rng(s, "keygen");
                    let key = SigningKey::generate(&mut rng);
                    let issuer = matches!(role, KeyRole::Ca)
                        .then(|| issuer_keygen(ATTRIBUTE_COUNT, &mut rng))
                        .transpose();
                    (key, issuer)
                }
                None => {
                    let key = SigningKey::generate(&mut OsRng);
                    let issuer = matches!(role, KeyRole::Ca)
                        .then(|| issuer_keygen(ATTRIBUTE_COUNT, &mut OsRng))
                        .transpose();
                    (key, issuer)
                }
            };
            let issuer = issuer.map_err(|e| SimError::Io(e.to_string()))?;
            let role = match role {
                KeyRole::Sc => "sc",
                KeyRole::Ca => "ca",
                KeyRole::Website => "website",
                KeyRole::User => "user",
            };
            let doc = json!({ "role": role, "board_key": key, "issuer": issuer });
            let text = serde_json::to_string_pretty(&doc).expect("keys serialize");
            match out {
                Some(path) => std::fs::write(path, text + "\n")?,
                None => emit(&text),
            }
            Ok(())
        }
        Command::VerifyAsd { state, asd } => {
            let state: BoardState = read_json(&state)?;
            let value: serde_json::Value = read_json(&asd)?;
            let asd: Asd = match serde_json::from_value(value) {
                Ok(a) => a,
                Err(e) => {
                    emit(&format!("false: malformed ASD ({e})"));
                    return Err(SimError::Verification("ASD does not verify".into()));
                }
            };
            let on_board = state.users.asds.contains_key(&asd.reg_id().to_hex());
            let r = if on_board {
                check_account(&asd, &state)
            } else {
                verify_asd(&asd, &state)
            };
            match r {
                Ok(()) => {
                    emit("true");
                    Ok(())
                }
                Err(e) => {
                    emit(&format!("false: {e}"));
                    Err(SimError::Verification("ASD does not verify".into()))
                }
            }
        }
    }
}
