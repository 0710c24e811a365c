//! `lmsim` — configuration-driven scenario runner for the light/ensemble
//! interface simulator.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numeric precondition
//! failure, 4 acceptance failure.

mod config;
mod scenarios;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::{parse_sweep, ScenarioConfig};
use scenarios::{run_scenario, Row, RunError, ScenarioOutput};

#[derive(Parser)]
#[command(name = "lmsim", about = "light/atomic-ensemble interface simulator", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario (optionally a parameter sweep).
    Run {
        /// Scenario name: squeeze | entangle | memory | teleport | eit |
        /// dlcz | polarizability.
        #[arg(long)]
        scenario: Option<String>,
        /// Config file with `key = value` lines.
        #[arg(long)]
        config: Option<PathBuf>,
        /// RNG seed for sampling scenarios.
        #[arg(long)]
        seed: Option<u64>,
        /// Sweep spec `param start:stop:step` or `param v1,v2,...`.
        #[arg(long)]
        sweep: Option<String>,
        /// Parameter overrides `key=value` (win over the config file).
        #[arg(short = 'P', long = "param")]
        params: Vec<String>,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run the acceptance-criteria table, one pass/fail line each.
    Acceptance {
        /// Run a single criterion by name.
        #[arg(long)]
        only: Option<String>,
    },
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(RunError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(RunError::Numeric(msg)) => {
            eprintln!("numeric error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn real_main() -> Result<ExitCode, RunError> {
    match Cli::parse().command {
        Command::Run {
            scenario,
            config,
            seed,
            sweep,
            params,
            out,
            format,
        } => {
            let mut cfg = match config {
                Some(path) => ScenarioConfig::from_file(&path).map_err(|e| RunError::Config(e.0))?,
                None => ScenarioConfig::default(),
            };
            if let Some(s) = scenario {
                cfg.scenario = Some(s);
            }
            if let Some(s) = seed {
                cfg.seed = Some(s);
            }
            if let Some(spec) = sweep {
                cfg.sweep = Some(parse_sweep(&spec).map_err(|e| RunError::Config(e.0))?);
            }
            for kv in &params {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| RunError::Config(format!("override `{kv}` is not key=value")))?;
                cfg.set(k.trim(), v.trim()).map_err(|e| RunError::Config(e.0))?;
            }
            let output = run_scenario(&cfg)?;
            let text = match format {
                Format::Csv => render_csv(&cfg, &output),
                Format::Json => render_json(&cfg, &output),
            };
            match out {
                Some(path) => {
                    let mut f = std::fs::File::create(&path)
                        .map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
                    f.write_all(text.as_bytes())
                        .map_err(|e| RunError::Config(e.to_string()))?;
                }
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Acceptance { only } => {
            let outcomes = match only {
                Some(id) => vec![lightmatter::acceptance::run_criterion(&id)],
                None => lightmatter::acceptance::run_all(),
            };
            let mut all_pass = true;
            for o in &outcomes {
                println!("{}", o.line());
                all_pass &= o.passed;
            }
            Ok(if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(4)
            })
        }
    }
}

/// Nine significant digits, so regression diffs are meaningful.
fn fmt_g9(x: f64) -> String {
    format!("{x:.8e}")
}

fn render_csv(cfg: &ScenarioConfig, output: &ScenarioOutput) -> String {
    let mut text = String::new();
    for line in cfg.render().lines() {
        text += &format!("# {line}\n");
    }
    // union of keys, sorted, stable across rows
    let mut keys: Vec<String> = Vec::new();
    for row in &output.rows {
        for k in row.keys() {
            if !keys.contains(k) {
                keys.push(k.clone());
            }
        }
    }
    keys.sort();
    text += &keys.join(",");
    text.push('\n');
    for row in &output.rows {
        let cells: Vec<String> = keys
            .iter()
            .map(|k| row.get(k).map(|&v| fmt_g9(v)).unwrap_or_default())
            .collect();
        text += &cells.join(",");
        text.push('\n');
    }
    text
}

fn render_json(cfg: &ScenarioConfig, output: &ScenarioOutput) -> String {
    let rows: Vec<serde_json::Value> = output
        .rows
        .iter()
        .map(|row: &Row| {
            let obj: serde_json::Map<String, serde_json::Value> = row
                .iter()
                .map(|(k, &v)| (k.clone(), serde_json::json!(fmt_g9(v))))
                .collect();
            serde_json::Value::Object(obj)
        })
        .collect();
    let mut doc = serde_json::json!({
        "config": cfg.render(),
        "rows": rows,
    });
    if let Some(extra) = &output.extra_json {
        doc["tomography"] = extra.clone();
    }
    serde_json::to_string_pretty(&doc).expect("json render") + "\n"
}
