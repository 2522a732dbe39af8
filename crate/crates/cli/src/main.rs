//! Command-line front end: run scenarios, evaluate against references,
//! benchmark planning cost and validate scenario files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use autorvo::bench::{fit_runtime, points_to_csv, sweep};
use autorvo::eval::{compare_algorithms, format_table, parse_configs, EvalError, ReferenceTrajectorySet};
use autorvo::sim::{load_scenario_with_overrides, run, Scenario};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

#[derive(Parser)]
#[command(name = "autorvo", version, about = "Local navigation for heterogeneous road agents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Overrides {
    /// Override a scenario value by dotted path, e.g. `nav.sigma=2`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and write trajectory logs.
    Run {
        scenario: PathBuf,
        /// Output directory.
        #[arg(short, long)]
        out: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Score configurations against a reference trajectory set.
    Eval {
        /// Reference CSV (`frame,id,x,y`).
        reference: PathBuf,
        /// Sidecar JSON with frame rate and agent types.
        sidecar: PathBuf,
        scenario: PathBuf,
        /// JSON list of `{"name": ..., "nav": {...}}` entries.
        configs: PathBuf,
        /// Output directory.
        #[arg(short, long, default_value = ".")]
        out: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Time per-agent planning over neighbour and sample counts.
    Bench {
        scenario: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = vec![1, 2, 4, 8], value_parser = clap::value_parser!(u64).range(1..))]
        neighbors: Vec<u64>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![25, 100, 400], value_parser = clap::value_parser!(u64).range(1..))]
        samples: Vec<u64>,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        reps: u64,
        /// Output directory for `bench.csv` and `bench_fit.json`.
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Load and validate a scenario, printing the effective configuration.
    Validate {
        scenario: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
}

/// Failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    fn io(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

fn write_output(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))
}

fn prepare_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::io(format!("cannot create {}: {e}", dir.display())))
}

fn load(path: &Path, overrides: &Overrides) -> Result<Scenario, Failure> {
    let source = read_input(path)?;
    load_scenario_with_overrides(&source, &overrides.set)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn cmd_run(scenario: &Path, out: &Path, overrides: &Overrides) -> Result<(), Failure> {
    let s = load(scenario, overrides)?;
    prepare_dir(out)?;
    let started = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0);
    let clock = Instant::now();
    let log = run(&s);
    let wall = clock.elapsed().as_secs_f64();

    write_output(&out.join("trajectory.csv"), &log.to_csv())?;
    write_output(&out.join("trajectory.json"), &log.to_json())?;
    let summary = json!({
        "scenario": scenario.display().to_string(),
        "agents": s.agents.len(),
        "steps": log.steps,
        "arrivals": log.arrivals.len(),
        "audit_count": log.audit_count(),
        "emergency_stops": log.emergency_stops,
        "wall_time_s": wall,
        "started_at_unix_s": started,
    });
    write_output(
        &out.join("summary.json"),
        &serde_json::to_string_pretty(&summary).expect("summary serializes"),
    )?;
    println!(
        "steps {}  arrivals {}/{}  audit {}  emergency stops {}  wall {:.3}s",
        log.steps,
        log.arrivals.len(),
        s.agents.len(),
        log.audit_count(),
        log.emergency_stops,
        wall
    );
    if log.audit_count() > 0 {
        return Err(Failure {
            code: 3,
            message: format!(
                "{} overlap event(s) audited, first at step {}",
                log.audit_count(),
                log.audit[0].step
            ),
        });
    }
    Ok(())
}

fn cmd_eval(
    reference: &Path,
    sidecar: &Path,
    scenario: &Path,
    configs: &Path,
    out: &Path,
    overrides: &Overrides,
) -> Result<(), Failure> {
    let csv = read_input(reference)?;
    let side = read_input(sidecar)?;
    let s = load(scenario, overrides)?;
    let configs = parse_configs(&read_input(configs)?).map_err(|e| Failure::input(e.to_string()))?;
    let refs = ReferenceTrajectorySet::parse(&csv, &side).map_err(|e| Failure::input(e.to_string()))?;
    let reports = compare_algorithms(&refs, &s, &configs).map_err(|e| match e {
        EvalError::IdMismatch(_) | EvalError::Parse(_) | EvalError::InsufficientData(_) => {
            Failure::input(e.to_string())
        }
        other => Failure::io(other.to_string()),
    })?;

    prepare_dir(out)?;
    let name = scenario
        .file_stem()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let table = format_table(&[(name, &s, reports.clone())]);
    let doc: serde_json::Map<String, serde_json::Value> = reports
        .iter()
        .map(|(n, r)| (n.clone(), serde_json::to_value(r).expect("report serializes")))
        .collect();
    write_output(
        &out.join("eval_report.json"),
        &serde_json::to_string_pretty(&doc).expect("report serializes"),
    )?;
    write_output(&out.join("eval_report.txt"), &table)?;
    print!("{table}");
    Ok(())
}

fn cmd_bench(
    scenario: &Path,
    neighbors: &[u64],
    samples: &[u64],
    reps: u64,
    out: Option<&Path>,
    overrides: &Overrides,
) -> Result<(), Failure> {
    let s = load(scenario, overrides)?;
    if s.agents.is_empty() {
        return Err(Failure::input(format!(
            "{}: bench needs at least one agent",
            scenario.display()
        )));
    }
    let ns: Vec<usize> = neighbors.iter().map(|&n| n as usize).collect();
    let ms: Vec<usize> = samples.iter().map(|&m| m as usize).collect();
    let points = sweep(&s, &ns, &ms, reps as usize);
    println!("{:>9} {:>8} {:>12} {:>10}", "neighbors", "samples", "mean_ms", "std_ms");
    for p in &points {
        println!(
            "{:>9} {:>8} {:>12.4} {:>10.4}",
            p.neighbors, p.samples, p.mean_ms, p.std_ms
        );
    }
    let fit = fit_runtime(&points);
    match &fit {
        Some(f) => println!(
            "fit: time_ms = {:.3e}*N*M + {:.3e}*N + {:.3e}  (R^2 {:.4}, rms residual {:.3e} ms)",
            f.alpha, f.beta, f.gamma, f.r_squared, f.rms_residual
        ),
        None => println!("fit: needs at least 3 sweep points"),
    }
    if let Some(dir) = out {
        prepare_dir(dir)?;
        write_output(&dir.join("bench.csv"), &points_to_csv(&points))?;
        let doc = json!({ "points": points, "fit": fit });
        write_output(
            &dir.join("bench_fit.json"),
            &serde_json::to_string_pretty(&doc).expect("fit serializes"),
        )?;
    }
    Ok(())
}

fn cmd_validate(scenario: &Path, overrides: &Overrides) -> Result<(), Failure> {
    let s = load(scenario, overrides)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&s.effective).expect("scenario serializes")
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run {
            scenario,
            out,
            overrides,
        } => cmd_run(scenario, out, overrides),
        Command::Eval {
            reference,
            sidecar,
            scenario,
            configs,
            out,
            overrides,
        } => cmd_eval(reference, sidecar, scenario, configs, out, overrides),
        Command::Bench {
            scenario,
            neighbors,
            samples,
            reps,
            out,
            overrides,
        } => cmd_bench(scenario, neighbors, samples, *reps, out.as_deref(), overrides),
        Command::Validate { scenario, overrides } => cmd_validate(scenario, overrides),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
