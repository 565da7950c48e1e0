use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use c3bf::report;
use c3bf::sim::{self, SweepAxis};
use c3bf::{FilterKind, ScenarioConfig, ScenarioDocument};

#[derive(Parser)]
#[command(name = "c3bf", version, about = "Collision-cone CBF safety filter simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one episode and write trajectory.csv and metrics.txt.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run several configurations on the same scenario and tabulate them.
    Compare {
        /// Scenario file; repeat to compare several files.
        #[arg(long, required = true)]
        scenario: Vec<PathBuf>,
        /// Comma-separated filter kinds to run on every scenario.
        #[arg(long, value_delimiter = ',')]
        filters: Vec<FilterKind>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a grid over one or two config keys and write sweep.csv.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        /// `key=[v1, v2, ...]`; give once or twice.
        #[arg(long = "sweep", required = true)]
        sweeps: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Check a scenario and print it with all defaults filled in.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Dotted `key=value` assignment applied to the scenario; repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    tmax: Option<f64>,
    #[arg(long)]
    filter: Option<FilterKind>,
}

type CliResult = Result<ExitCode, String>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // Usage errors exit 1; 2 is reserved for collisions.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Run { scenario, common } => cmd_run(&scenario, &common),
        Command::Compare { scenario, filters, common } => cmd_compare(&scenario, &filters, &common),
        Command::Sweep { scenario, sweeps, common } => cmd_sweep(&scenario, &sweeps, &common),
        Command::Validate { scenario, common } => cmd_validate(&scenario, &common),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn load_document(path: &Path, common: &Common) -> Result<ScenarioDocument, String> {
    let mut doc = ScenarioDocument::load(path).map_err(|e| e.to_string())?;
    let mut shorthand = Vec::new();
    if let Some(dt) = common.dt {
        shorthand.push(("dt", toml::Value::Float(dt)));
    }
    if let Some(t) = common.tmax {
        shorthand.push(("t_max", toml::Value::Float(t)));
    }
    if let Some(kind) = common.filter {
        shorthand.push(("filter_kind", toml::Value::String(kind.as_str().to_string())));
    }
    for (key, value) in shorthand {
        doc.apply_override(key, value).map_err(|e| e.to_string())?;
    }
    for o in &common.overrides {
        doc.apply_override_str(o).map_err(|e| format!("--override {o}: {e}"))?;
    }
    Ok(doc)
}

fn load_config(path: &Path, common: &Common) -> Result<ScenarioConfig, String> {
    load_document(path, common)?.resolve().map_err(|e| e.to_string())
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), String> {
    fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_run(path: &Path, common: &Common) -> CliResult {
    let config = load_config(path, common)?;
    let log = sim::run(&config).map_err(|e| e.to_string())?;
    let metrics = sim::summarize(&log, &config);
    write(&common.out, "trajectory.csv", &report::trajectory_csv(&log))?;
    write(&common.out, "metrics.txt", &report::metrics_text(&metrics))?;
    println!(
        "min_separation={:.3} control_effort={:.4} active_fraction={:.4}{}",
        metrics.min_separation,
        metrics.control_effort,
        metrics.filter_active_fraction,
        if metrics.collision { " COLLISION" } else { "" }
    );
    Ok(if metrics.collision { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn cmd_compare(paths: &[PathBuf], filters: &[FilterKind], common: &Common) -> CliResult {
    let mut configs = Vec::new();
    let mut labels = Vec::new();
    for path in paths {
        let base = load_config(path, common)?;
        let stem = path.file_stem().map_or("scenario".into(), |s| s.to_string_lossy().into_owned());
        if filters.is_empty() {
            labels.push(stem);
            configs.push(base);
        } else {
            for &kind in filters {
                labels.push(if paths.len() > 1 {
                    format!("{stem}_{}", kind.as_str())
                } else {
                    kind.as_str().to_string()
                });
                configs.push(ScenarioConfig { filter_kind: kind, ..base.clone() });
            }
        }
    }
    if configs.len() < 2 {
        return Err(
            "compare needs at least two configurations: repeat --scenario or pass --filters a,b"
                .to_string(),
        );
    }
    dedup_labels(&mut labels);

    let report = sim::compare(&configs).map_err(|e| e.to_string())?;
    for (entry, label) in report.entries.iter().zip(&labels) {
        write(&common.out, &format!("trajectory_{label}.csv"), &report::trajectory_csv(&entry.log))?;
    }
    write(&common.out, "comparison.csv", &report::comparison_csv(&report, &labels))?;
    let mut collided = false;
    for (entry, label) in report.entries.iter().zip(&labels) {
        let m = &entry.metrics;
        collided |= m.collision;
        println!(
            "{label}: min_separation={:.3} control_effort={:.4} active_fraction={:.4}{}",
            m.min_separation,
            m.control_effort,
            m.filter_active_fraction,
            if m.collision { " COLLISION" } else { "" }
        );
    }
    Ok(if collided { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn dedup_labels(labels: &mut [String]) {
    for i in 1..labels.len() {
        if labels[..i].contains(&labels[i]) {
            labels[i] = format!("{}_{i}", labels[i]);
        }
    }
}

fn parse_sweep(spec: &str) -> Result<SweepAxis, String> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| format!("--sweep {spec}: expected key=[v1, v2, ...]"))?;
    let values = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .and_then(|v| match v {
            toml::Value::Array(a) => Some(a),
            _ => None,
        })
        .ok_or_else(|| format!("--sweep {spec}: values must be a TOML array"))?;
    Ok(SweepAxis { key: key.trim().to_string(), values })
}

fn cmd_sweep(path: &Path, specs: &[String], common: &Common) -> CliResult {
    let doc = load_document(path, common)?;
    let axes = specs.iter().map(|s| parse_sweep(s)).collect::<Result<Vec<_>, _>>()?;
    let cells = sim::sweep(&doc, &axes).map_err(|e| e.to_string())?;
    let keys: Vec<String> = axes.iter().map(|a| a.key.clone()).collect();
    write(&common.out, "sweep.csv", &report::sweep_csv(&keys, &cells))?;
    let failed = cells.iter().filter(|c| c.outcome.is_err()).count();
    let collided = cells
        .iter()
        .filter(|c| c.outcome.as_ref().is_ok_and(|m| m.collision))
        .count();
    println!("{} cells, {collided} with collision, {failed} failed", cells.len());
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(path: &Path, common: &Common) -> CliResult {
    let config = load_config(path, common)?;
    print!("{}", config.to_toml_string());
    for (i, o) in config.obstacles().iter().enumerate() {
        println!("# obstacles.{i}: collision radius r = {} m", config.geometry_for(o).radius());
    }
    let violations = config.violations();
    if violations.is_empty() {
        return Ok(ExitCode::SUCCESS);
    }
    for v in &violations {
        eprintln!("invalid: {v}");
    }
    Ok(ExitCode::from(1))
}
