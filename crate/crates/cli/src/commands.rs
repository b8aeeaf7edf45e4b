//! The four subcommands. Each returns the files it wrote; failures carry the
//! exit code they map to.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use anomdiss_core::analysis::{
    analyze_trajectory, format_pairing_report, header, row, run_one, sweep_reports, RunFailure, RunRecord,
};
use anomdiss_core::grid::snapshot::fmt17;
use anomdiss_core::kinetic::plateau_test_function;
use anomdiss_core::{run_sweep, smooth_control, Error, RunConfig, SweepConfig, SweepRecord};
use rayon::prelude::*;

use crate::store::{find_runs, read_trajectory, run_dir_name, write_trajectory};

pub const OUT_ENV: &str = "ANOMDISS_OUT";
pub const RUN_REPORT: &str = "run_report.txt";
pub const PAIRING_REPORT: &str = "pairing_report.txt";
pub const SUMMARY_REPORT: &str = "summary_report.txt";

#[derive(Debug)]
pub enum Failure {
    /// Bad input: config, schema, usage. Exit 2.
    Input(String),
    /// A run broke an invariant or produced nothing. Exit 3.
    Violation(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Violation(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Violation(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_runtime_violation() || matches!(e, Error::EmptySweep) {
            Failure::Violation(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

pub type Outcome = std::result::Result<Vec<PathBuf>, Failure>;

/// Options shared by every subcommand.
#[derive(Debug, Clone, Default)]
pub struct Common {
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub verbose: bool,
}

impl Common {
    /// `ANOMDISS_OUT`, then `--out`, then `fallback`.
    fn out_dir(&self, fallback: &Path) -> PathBuf {
        std::env::var_os(OUT_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
            .or_else(|| self.out.clone())
            .unwrap_or_else(|| fallback.to_path_buf())
    }

    fn workers(&self, cfg: &RunConfig) -> Result<usize, Failure> {
        match self.workers.unwrap_or(cfg.output.workers) {
            0 => Err(Failure::Input("invalid parameter `workers`: must be at least 1".into())),
            k => Ok(k),
        }
    }

    fn note(&self, msg: impl AsRef<str>) {
        if self.verbose {
            eprintln!("anomdiss: {}", msg.as_ref());
        }
    }
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<PathBuf, Failure> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, text)?;
    Ok(path)
}

/// Exit status for a record with failed runs: 3 if any broke an invariant.
fn failures_to_result(failures: &[RunFailure]) -> Result<(), Failure> {
    if failures.is_empty() {
        return Ok(());
    }
    let summary = failures
        .iter()
        .map(|f| format!("kappa={} N={}: {}", f.kappa, f.n, f.message))
        .collect::<Vec<_>>()
        .join("; ");
    if failures.iter().any(|f| f.invariant) {
        Err(Failure::Violation(summary))
    } else {
        Err(Failure::Input(summary))
    }
}

fn run_report(cfg_json: &str, rows: &[(String, RunRecord)], failures: &[RunFailure]) -> String {
    let cols: Vec<String> = [
        "kappa",
        "N",
        "D_tau",
        "D_eta",
        "energy_drop",
        "energy_residual",
        "mean_drift",
        "overshoot",
        "dir",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let mut out = String::new();
    header(&mut out, "run", cfg_json, &cols);
    for (dir, r) in rows {
        row(
            &mut out,
            [
                fmt17(r.kappa),
                r.n.to_string(),
                fmt17(r.dissipation),
                fmt17(r.cutoff_dissipation),
                fmt17(r.energy_drop),
                fmt17(r.energy_residual),
                fmt17(r.mean_drift),
                fmt17(r.overshoot),
                dir.clone(),
            ],
        );
    }
    for f in failures {
        let kind = if f.invariant { "invariant" } else { "error" };
        out.push_str(&format!(
            "# failed kappa={} N={} {kind}: {}\n",
            fmt17(f.kappa),
            f.n,
            f.message
        ));
    }
    out
}

/// Integrates every `(N, κ)` of the config over the full horizon and stores
/// each trajectory in its own directory.
pub fn cmd_run(config: &Path, opts: &Common) -> Outcome {
    let cfg = RunConfig::from_path(config)?;
    let sweep = SweepConfig::from_run_config(&cfg)?;
    let workers = opts.workers(&cfg)?;
    let out = opts.out_dir(&cfg.output.dir);
    fs::create_dir_all(&out)?;
    let jobs: Vec<(usize, usize, f64)> = sweep
        .resolutions
        .iter()
        .flat_map(|&n| sweep.kappas.iter().enumerate().map(move |(i, &k)| (n, i, k)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Failure::Input(e.to_string()))?;
    let writer = Mutex::new(());
    let outcomes: Vec<Result<(String, RunRecord), Error>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(n, idx, kappa)| {
                opts.note(format!("run N={n} kappa={kappa}"));
                let (traj, rec) = run_one(&sweep, kappa, n)?;
                let name = run_dir_name(n, idx);
                let _guard = writer.lock().unwrap_or_else(|p| p.into_inner());
                write_trajectory(&out.join(&name), &cfg, &traj)?;
                opts.note(format!("wrote {name} ({:.1} s)", rec.wall_time.as_secs_f64()));
                Ok((name, rec))
            })
            .collect()
    });
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut written = Vec::new();
    for ((n, _, kappa), outcome) in jobs.into_iter().zip(outcomes) {
        match outcome {
            Ok((name, rec)) => {
                written.push(out.join(&name));
                rows.push((name, rec));
            }
            Err(e) => failures.push(RunFailure {
                kappa,
                n,
                invariant: e.is_runtime_violation(),
                message: e.to_string(),
            }),
        }
    }
    written.push(write_file(
        &out,
        RUN_REPORT,
        &run_report(&cfg.to_json(), &rows, &failures),
    )?);
    failures_to_result(&failures)?;
    Ok(written)
}

/// The anomalous sweep plus its single-stage control, reported as tables.
pub fn cmd_sweep(config: &Path, opts: &Common) -> Outcome {
    let cfg = RunConfig::from_path(config)?;
    let mut sweep = SweepConfig::from_run_config(&cfg)?;
    sweep.workers = opts.workers(&cfg)?;
    sweep.validate()?;
    let out = opts.out_dir(&cfg.output.dir);
    opts.note(format!(
        "anomalous sweep: {} runs",
        sweep.kappas.len() * sweep.resolutions.len()
    ));
    let anomalous = run_sweep(&sweep)?;
    opts.note("smooth control");
    let control = smooth_control(&sweep)?;
    let mut written = Vec::new();
    for (name, text) in sweep_reports(&cfg, &anomalous, &control) {
        written.push(write_file(&out, name, &text)?);
    }
    let mut failures = anomalous.failures.clone();
    failures.extend(control.failures.iter().cloned());
    failures_to_result(&failures)?;
    Ok(written)
}

/// Kinetic parameters for `pair`: explicit `ε` list, then a config file's
/// `[kinetic]` table, then whatever each trajectory was stored with.
#[derive(Debug, Clone, Default)]
pub struct PairParams {
    pub config: Option<PathBuf>,
    pub epsilon: Vec<f64>,
}

/// Re-runs the kinetic analysis on stored trajectories.
pub fn cmd_pair(dir: &Path, params: &PairParams, opts: &Common) -> Outcome {
    let runs = find_runs(dir)?;
    for &eps in &params.epsilon {
        plateau_test_function(eps)?;
    }
    let kinetic = match &params.config {
        Some(path) => Some(RunConfig::from_path(path)?.kinetic),
        None => None,
    };
    let mut record = SweepRecord {
        runs: Vec::new(),
        failures: Vec::new(),
    };
    let mut cfg_json = None;
    for run in &runs {
        opts.note(format!("pair {}", run.display()));
        let (meta, traj) = read_trajectory(run)?;
        let mut cfg = meta.config;
        if let Some(k) = &kinetic {
            cfg.kinetic = k.clone();
        }
        if !params.epsilon.is_empty() {
            cfg.kinetic.epsilon = params.epsilon.clone();
        }
        let sweep = SweepConfig::from_run_config(&cfg)?;
        record.runs.push(analyze_trajectory(&sweep, &traj)?);
        cfg_json.get_or_insert_with(|| cfg.to_json());
    }
    let out = opts.out_dir(dir);
    let text = format_pairing_report(&record, cfg_json.as_deref().unwrap_or("{}"));
    Ok(vec![write_file(&out, PAIRING_REPORT, &text)?])
}

/// A report table: config line, column names, rows keyed by `(kappa, N)`,
/// and trailing `# floor:` line.
struct Table {
    config: String,
    columns: Vec<String>,
    rows: BTreeMap<(String, String), Vec<String>>,
    order: Vec<(String, String)>,
    floor: Option<String>,
}

impl Table {
    fn read(path: &Path) -> Result<Self, Failure> {
        let text =
            fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
        let bad = |what: &str| Failure::Input(format!("{}: {what}", path.display()));
        let mut t = Table {
            config: String::new(),
            columns: Vec::new(),
            rows: BTreeMap::new(),
            order: Vec::new(),
            floor: None,
        };
        for line in text.lines() {
            if let Some(c) = line.strip_prefix("# config: ") {
                t.config = c.to_string();
            } else if let Some(c) = line.strip_prefix("# columns: ") {
                t.columns = c.split_whitespace().map(str::to_string).collect();
            } else if let Some(f) = line.strip_prefix("# floor: ") {
                t.floor = Some(f.to_string());
            } else if !line.starts_with('#') && !line.trim().is_empty() {
                let cells: Vec<String> = line.split_whitespace().map(str::to_string).collect();
                if cells.len() != t.columns.len() {
                    return Err(bad("row width differs from the column list"));
                }
                let key = (cells[0].clone(), cells[1].clone());
                t.order.push(key.clone());
                t.rows.insert(key, cells);
            }
        }
        if t.columns.len() < 3 || t.columns[0] != "kappa" || t.columns[1] != "N" {
            return Err(bad("missing `# columns: kappa N ...` header"));
        }
        Ok(t)
    }

    fn cell(&self, key: &(String, String), column: &str) -> Option<f64> {
        let i = self.columns.iter().position(|c| c == column)?;
        self.rows.get(key)?.get(i)?.parse().ok()
    }
}

/// Joins the sweep and control tables of a sweep directory on `(κ, N)`.
pub fn cmd_report(dir: &Path, opts: &Common) -> Outcome {
    let anomalous = Table::read(&dir.join("sweep_report.txt"))?;
    let control = Table::read(&dir.join("control_report.txt"))?;
    let cols: Vec<String> = [
        "kappa",
        "N",
        "D_anomalous",
        "D_control",
        "ratio",
        "D_eta_anomalous",
        "D_eta_control",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let mut out = String::new();
    header(&mut out, "summary", &anomalous.config, &cols);
    let fmt = |v: Option<f64>| v.map(fmt17).unwrap_or_else(|| "nan".into());
    for key in &anomalous.order {
        let da = anomalous.cell(key, "D_tau");
        let dc = control.cell(key, "D_tau");
        let ratio = da.zip(dc).map(|(a, c)| a / c);
        row(
            &mut out,
            [
                key.0.clone(),
                key.1.clone(),
                fmt(da),
                fmt(dc),
                fmt(ratio),
                fmt(anomalous.cell(key, "D_eta")),
                fmt(control.cell(key, "D_eta")),
            ],
        );
    }
    for (label, t) in [("anomalous", &anomalous), ("control", &control)] {
        if let Some(f) = &t.floor {
            out.push_str(&format!("# floor {label}: {f}\n"));
        }
    }
    print!("{out}");
    let dest = opts.out_dir(dir);
    Ok(vec![write_file(&dest, SUMMARY_REPORT, &out)?])
}
