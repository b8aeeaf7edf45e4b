//! Viscosity sweeps, the smooth-flow control, the unmixing gap, and the
//! plain-text report tables built from them.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::config::{InitialData, RunConfig};
use crate::grid::snapshot::fmt17;
use crate::grid::{l2_norm_sq, PeriodicGrid, ScalarField};
use crate::kinetic::{assemble, plateau_test_function, Renormalizer, SpaceTimeTest, TimeCutoff, XiTestFunction};
use crate::solver::{energy, integrate, segment_snapshot_times, InvariantTolerances, SolverConfig, Trajectory};
use crate::velocity::{build_schedule, ScheduleParams, VelocitySchedule};
use crate::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Strictly positive, strictly decreasing.
    pub kappas: Vec<f64>,
    pub resolutions: Vec<usize>,
    pub schedule: ScheduleParams,
    pub epsilons: Vec<f64>,
    /// Time at which `D(κ, τ)` is reported.
    pub tau: f64,
    pub cutoff: TimeCutoff,
    pub substeps_per_stage: usize,
    pub snapshots_per_stage: usize,
    pub mollify_scale: f64,
    pub initial: InitialData,
    /// Integrate to the full horizon (needed for the unmixing gap) rather
    /// than stopping at `max(τ, cutoff τ)`.
    pub full_horizon: bool,
    pub workers: usize,
    pub tolerances: InvariantTolerances,
}

impl SweepConfig {
    pub fn from_run_config(cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            kappas: cfg.kappas(),
            resolutions: cfg.resolutions(),
            schedule: cfg.velocity.clone(),
            epsilons: cfg.kinetic.epsilon.clone(),
            tau: 0.5 * cfg.velocity.horizon,
            cutoff: cfg.cutoff()?,
            substeps_per_stage: cfg.solver.substeps_per_stage,
            snapshots_per_stage: cfg.solver.snapshots_per_stage,
            mollify_scale: cfg.solver.mollify_scale,
            initial: cfg.solver.initial,
            full_horizon: true,
            workers: cfg.output.workers,
            tolerances: InvariantTolerances::default(),
        })
    }

    /// The same sweep on the single-stage schedule.
    pub fn control(&self) -> Self {
        let mut out = self.clone();
        out.schedule.n_stages = 1;
        out.full_horizon = false;
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.kappas.is_empty() {
            return Err(Error::param("kappa", "at least one value is required"));
        }
        if self.kappas.iter().any(|k| !(k.is_finite() && *k > 0.0)) {
            return Err(Error::param("kappa", "sweep values must be strictly positive"));
        }
        if self.kappas.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::param("kappa", "sweep values must be strictly decreasing"));
        }
        if self.resolutions.is_empty() {
            return Err(Error::param("N", "at least one resolution is required"));
        }
        let lambda_max = self.schedule.max_frequency();
        for &n in &self.resolutions {
            PeriodicGrid::new(n).map_err(|e| Error::param("N", e.to_string()))?;
            if lambda_max.saturating_mul(8) > n as u64 {
                return Err(Error::param("N", format!("finest frequency {lambda_max} exceeds N/8")));
            }
        }
        for &eps in &self.epsilons {
            plateau_test_function(eps)?;
        }
        if self.workers == 0 {
            return Err(Error::param("workers", "must be at least 1"));
        }
        build_schedule(&self.schedule).map(|_| ())
    }

    fn end_time(&self) -> f64 {
        if self.full_horizon {
            self.schedule.horizon
        } else {
            self.tau.max(self.cutoff.tau())
        }
    }
}

/// Kinetic diagnostics of one run for one `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairingRow {
    pub epsilon: f64,
    pub defect: f64,
    pub ktp_residual: f64,
    pub kad_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub kappa: f64,
    pub n: usize,
    /// `D(κ, τ)`.
    pub dissipation: f64,
    /// `∫η κ‖∇θ‖²`.
    pub cutoff_dissipation: f64,
    /// `½‖θ_0‖² − ½‖θ(t_end)‖²`.
    pub energy_drop: f64,
    pub end_time: f64,
    pub min: f64,
    pub max: f64,
    /// `‖θ(T) − θ_0‖`, when the run reached `T` on a mirrored schedule.
    pub unmixing_gap: Option<f64>,
    /// `‖θ_0‖ − ‖θ(T)‖`, the lower bound the gap must respect.
    pub gap_lower_bound: Option<f64>,
    pub energy_residual: f64,
    pub mean_drift: f64,
    pub overshoot: f64,
    pub pairings: Vec<PairingRow>,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub kappa: f64,
    pub n: usize,
    pub invariant: bool,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    /// Successful runs, ordered by resolution then by the configured `κ`.
    pub runs: Vec<RunRecord>,
    pub failures: Vec<RunFailure>,
}

impl SweepRecord {
    /// Runs at resolution `n`, in `κ` order.
    pub fn at_resolution(&self, n: usize) -> Vec<&RunRecord> {
        self.runs.iter().filter(|r| r.n == n).collect()
    }
}

/// Snapshot times used by sweeps: every velocity segment up to `until`.
pub fn sweep_snapshot_times(schedule: &VelocitySchedule, per_segment: usize, tau: f64, until: f64) -> Vec<f64> {
    let mut times = segment_snapshot_times(schedule, per_segment, until, &[tau, until]);
    times.retain(|&t| t <= until);
    times
}

/// Kinetic rows for every `ε`, plus `∫η κ‖∇θ‖²`, with the
/// `x`-independent test function `ψ ≡ 1`.
pub fn pairing_rows(
    traj: &Trajectory,
    schedule: &VelocitySchedule,
    epsilons: &[f64],
    cutoff: TimeCutoff,
    kappa: f64,
) -> Result<(Vec<PairingRow>, f64)> {
    let tfs: Vec<XiTestFunction> = epsilons
        .iter()
        .map(|&e| plateau_test_function(e))
        .collect::<Result<_>>()?;
    let profiles: Vec<&dyn Renormalizer> = tfs.iter().map(|t| t as &dyn Renormalizer).collect();
    let test = SpaceTimeTest {
        cutoff,
        space: ScalarField::constant(traj.grid, 1.0),
    };
    let a = assemble(traj, schedule, &test, &profiles, kappa)?;
    let rows = epsilons
        .iter()
        .zip(&a.terms)
        .map(|(&epsilon, t)| PairingRow {
            epsilon,
            defect: t.defect,
            ktp_residual: t.transport_residual(),
            kad_residual: t.diffusive_residual(),
        })
        .collect();
    Ok((rows, a.cutoff_dissipation))
}

/// Integrates one `(κ, N)` pair and evaluates every diagnostic. Invariant
/// violations are errors.
pub fn run_one(cfg: &SweepConfig, kappa: f64, n: usize) -> Result<(Trajectory, RunRecord)> {
    let started = Instant::now();
    let schedule = build_schedule(&cfg.schedule)?;
    let grid = PeriodicGrid::new(n)?;
    let theta0 = cfg.initial.field(grid);
    let until = cfg.end_time();
    let mut solver = SolverConfig::new(
        kappa,
        grid,
        sweep_snapshot_times(&schedule, cfg.snapshots_per_stage, cfg.tau, until),
    );
    solver.substeps_per_stage = cfg.substeps_per_stage;
    solver.mollify_scale = cfg.mollify_scale;
    let traj = integrate(&theta0, &schedule, &solver)?;
    traj.check_invariants(&cfg.tolerances)?;
    let mut record = analyze_trajectory(cfg, &traj)?;
    record.wall_time = started.elapsed();
    Ok((traj, record))
}

/// Every diagnostic of an already integrated trajectory. `wall_time` is
/// left at zero.
pub fn analyze_trajectory(cfg: &SweepConfig, traj: &Trajectory) -> Result<RunRecord> {
    let schedule = build_schedule(&cfg.schedule)?;
    let theta0 = cfg.initial.field(traj.grid);
    let kappa = traj.kappa;
    let (pairings, cutoff_dissipation) = pairing_rows(traj, &schedule, &cfg.epsilons, cfg.cutoff, kappa)?;
    let last = traj
        .snapshots
        .last()
        .ok_or(Error::InsufficientSnapshots { found: 0, needed: 2 })?;
    let (min, max) = traj
        .extrema
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| {
            (lo.min(e.min), hi.max(e.max))
        });
    let reached_horizon = (last.time - schedule.horizon()).abs() <= 1e-12 * schedule.horizon();
    let (gap, bound) = if reached_horizon && schedule.mirrored() {
        let diff = &last.field - &theta0;
        let bound = l2_norm_sq(&theta0).sqrt() - l2_norm_sq(&last.field).sqrt();
        (Some(l2_norm_sq(&diff).sqrt()), Some(bound))
    } else {
        (None, None)
    };
    Ok(RunRecord {
        kappa,
        n: traj.grid.n(),
        dissipation: traj
            .dissipation_at(cfg.tau)
            .ok_or_else(|| Error::param("tau", "no ledger point at the dissipation time"))?,
        cutoff_dissipation,
        energy_drop: energy(&theta0) - energy(&last.field),
        end_time: last.time,
        min,
        max,
        unmixing_gap: gap,
        gap_lower_bound: bound,
        energy_residual: traj.energy_residual(),
        mean_drift: traj.mean_drift(),
        overshoot: traj.relative_overshoot(),
        pairings,
        wall_time: Duration::ZERO,
    })
}

/// One run per `(N, κ)`, concurrently on `cfg.workers` threads. Failed runs
/// are recorded and the sweep continues; a sweep without any success is an
/// error.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepRecord> {
    cfg.validate()?;
    let jobs: Vec<(usize, f64)> = cfg
        .resolutions
        .iter()
        .flat_map(|&n| cfg.kappas.iter().map(move |&k| (n, k)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::param("workers", e.to_string()))?;
    let outcomes: Vec<Result<RunRecord>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(n, kappa)| run_one(cfg, kappa, n).map(|(_, rec)| rec))
            .collect()
    });
    let mut record = SweepRecord {
        runs: Vec::new(),
        failures: Vec::new(),
    };
    for ((n, kappa), outcome) in jobs.into_iter().zip(outcomes) {
        match outcome {
            Ok(run) => record.runs.push(run),
            Err(e) => record.failures.push(RunFailure {
                kappa,
                n,
                invariant: e.is_runtime_violation(),
                message: e.to_string(),
            }),
        }
    }
    if record.runs.is_empty() {
        return Err(Error::EmptySweep);
    }
    Ok(record)
}

/// The sweep on the single-stage schedule.
pub fn smooth_control(cfg: &SweepConfig) -> Result<SweepRecord> {
    run_sweep(&cfg.control())
}

/// `(κ, ‖θ(T) − θ_0‖)` per run at the first resolution.
pub fn unmixing_report(rec: &SweepRecord) -> Vec<(f64, f64)> {
    let n = rec.runs[0].n;
    rec.at_resolution(n)
        .iter()
        .filter_map(|r| r.unmixing_gap.map(|g| (r.kappa, g)))
        .collect()
}

/// Empirical floor of `D(κ, τ)` and the least-squares slope of
/// `log D` against `log κ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Floor {
    pub min: f64,
    pub max: f64,
    pub slope: f64,
    /// `min_κ ∫η κ‖∇θ‖²`.
    pub cutoff_min: f64,
}

/// Least-squares slope of `ys` against `xs` in log-log coordinates.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InsufficientSnapshots {
            found: xs.len().min(ys.len()),
            needed: 2,
        });
    }
    if xs
        .iter()
        .chain(ys)
        .any(|v| v.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater))
    {
        return Err(Error::param("kappa", "log-log fit needs positive values"));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let m = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / m, ly.iter().sum::<f64>() / m);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// Floor statistics over the runs at the first resolution; needs three
/// distinct `κ`.
pub fn dissipation_floor(rec: &SweepRecord) -> Result<Floor> {
    let runs = match rec.runs.first() {
        Some(r) => rec.at_resolution(r.n),
        None => Vec::new(),
    };
    if runs.len() < 3 {
        return Err(Error::InsufficientSnapshots {
            found: runs.len(),
            needed: 3,
        });
    }
    let ks: Vec<f64> = runs.iter().map(|r| r.kappa).collect();
    let ds: Vec<f64> = runs.iter().map(|r| r.dissipation).collect();
    Ok(Floor {
        min: ds.iter().copied().fold(f64::INFINITY, f64::min),
        max: ds.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        slope: log_log_slope(&ks, &ds)?,
        cutoff_min: runs.iter().map(|r| r.cutoff_dissipation).fold(f64::INFINITY, f64::min),
    })
}

/// Three header lines: title with version, config JSON, column names.
pub fn header(out: &mut String, title: &str, cfg_json: &str, columns: &[String]) {
    let _ = writeln!(out, "# anomdiss {VERSION} {title}");
    let _ = writeln!(out, "# config: {cfg_json}");
    let _ = writeln!(out, "# columns: {}", columns.join(" "));
}

/// One space-separated table row.
pub fn row(out: &mut String, cells: impl IntoIterator<Item = String>) {
    let line: Vec<String> = cells.into_iter().collect();
    let _ = writeln!(out, "{}", line.join(" "));
}

fn opt17(v: Option<f64>) -> String {
    v.map(fmt17).unwrap_or_else(|| "nan".into())
}

fn failure_lines(out: &mut String, rec: &SweepRecord) {
    for f in &rec.failures {
        let kind = if f.invariant { "invariant" } else { "error" };
        let _ = writeln!(out, "# failed kappa={} N={} {kind}: {}", fmt17(f.kappa), f.n, f.message);
    }
}

/// Wide per-run table with the floor diagnostics as trailing comments.
/// Wall times are deliberately left out so reports are reproducible.
pub fn format_sweep_report(title: &str, rec: &SweepRecord, cfg_json: &str) -> String {
    let mut cols: Vec<String> = ["kappa", "N", "D_tau", "D_eta", "energy_drop", "min", "max"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    if let Some(r) = rec.runs.first() {
        for p in &r.pairings {
            cols.push(format!("defect_eps={}", p.epsilon));
        }
    }
    let mut out = String::new();
    header(&mut out, title, cfg_json, &cols);
    for r in &rec.runs {
        let mut cells = vec![
            fmt17(r.kappa),
            r.n.to_string(),
            fmt17(r.dissipation),
            fmt17(r.cutoff_dissipation),
            fmt17(r.energy_drop),
            fmt17(r.min),
            fmt17(r.max),
        ];
        cells.extend(r.pairings.iter().map(|p| fmt17(p.defect)));
        row(&mut out, cells);
    }
    match dissipation_floor(rec) {
        Ok(f) => {
            let _ = writeln!(
                out,
                "# floor: min_D={} max_D={} slope={} min_D_eta={}",
                fmt17(f.min),
                fmt17(f.max),
                fmt17(f.slope),
                fmt17(f.cutoff_min)
            );
        }
        Err(e) => {
            let _ = writeln!(out, "# floor: unavailable ({e})");
        }
    }
    failure_lines(&mut out, rec);
    out
}

/// Long table: one row per `(κ, N, ε)`.
pub fn format_pairing_report(rec: &SweepRecord, cfg_json: &str) -> String {
    let cols: Vec<String> = [
        "kappa",
        "N",
        "epsilon",
        "D_tau",
        "defect",
        "ktp_residual",
        "kad_residual",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let mut out = String::new();
    header(&mut out, "pairing", cfg_json, &cols);
    for r in &rec.runs {
        for p in &r.pairings {
            row(
                &mut out,
                [
                    fmt17(r.kappa),
                    r.n.to_string(),
                    fmt17(p.epsilon),
                    fmt17(r.dissipation),
                    fmt17(p.defect),
                    fmt17(p.ktp_residual),
                    fmt17(p.kad_residual),
                ],
            );
        }
    }
    failure_lines(&mut out, rec);
    out
}

pub fn format_unmixing_report(rec: &SweepRecord, cfg_json: &str) -> String {
    let cols: Vec<String> = ["kappa", "N", "gap", "norm_loss", "D_T"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut out = String::new();
    header(&mut out, "unmixing", cfg_json, &cols);
    for r in &rec.runs {
        row(
            &mut out,
            [
                fmt17(r.kappa),
                r.n.to_string(),
                opt17(r.unmixing_gap),
                opt17(r.gap_lower_bound),
                fmt17(r.energy_drop),
            ],
        );
    }
    failure_lines(&mut out, rec);
    out
}

/// The three report files of a sweep, by file name.
pub fn sweep_reports(cfg: &RunConfig, anomalous: &SweepRecord, control: &SweepRecord) -> Vec<(&'static str, String)> {
    let json = cfg.to_json();
    vec![
        ("sweep_report.txt", format_sweep_report("sweep", anomalous, &json)),
        ("pairing_report.txt", format_pairing_report(anomalous, &json)),
        ("control_report.txt", format_sweep_report("control", control, &json)),
        ("unmixing_report.txt", format_unmixing_report(anomalous, &json)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(ks: &[f64], ds: &[f64]) -> SweepRecord {
        SweepRecord {
            runs: ks
                .iter()
                .zip(ds)
                .map(|(&kappa, &d)| RunRecord {
                    kappa,
                    n: 64,
                    dissipation: d,
                    cutoff_dissipation: 0.5 * d,
                    energy_drop: d,
                    end_time: 1.0,
                    min: -1.0,
                    max: 1.0,
                    unmixing_gap: None,
                    gap_lower_bound: None,
                    energy_residual: 0.0,
                    mean_drift: 0.0,
                    overshoot: 0.0,
                    pairings: Vec::new(),
                    wall_time: Duration::ZERO,
                })
                .collect(),
            failures: Vec::new(),
        }
    }

    fn small(n_stages: usize) -> SweepConfig {
        let mut cfg = SweepConfig::from_run_config(&RunConfig::default()).unwrap();
        cfg.kappas = vec![1e-2, 5e-3, 2.5e-3];
        cfg.resolutions = vec![64];
        cfg.schedule.n_stages = n_stages;
        cfg.substeps_per_stage = 1024;
        cfg.snapshots_per_stage = 8;
        cfg.epsilons = vec![0.1, 0.4];
        cfg
    }

    #[test]
    fn constant_dissipation_has_zero_slope() {
        let f = dissipation_floor(&record(&[1e-2, 5e-3, 2.5e-3], &[0.3, 0.3, 0.3])).unwrap();
        assert_eq!(f.slope, 0.0);
        assert_eq!((f.min, f.max, f.cutoff_min), (0.3, 0.3, 0.15));
    }

    #[test]
    fn power_law_slope_is_recovered() {
        let ks = [1e-2, 5e-3, 2.5e-3, 1.25e-3];
        let ds: Vec<f64> = ks.iter().map(|k: &f64| 3.0 * k.powf(0.7)).collect();
        let f = dissipation_floor(&record(&ks, &ds)).unwrap();
        assert!((f.slope - 0.7).abs() < 1e-12);
    }

    #[test]
    fn floor_needs_three_points() {
        assert!(dissipation_floor(&record(&[1e-2, 5e-3], &[0.1, 0.1])).is_err());
        assert!(log_log_slope(&[1.0, 2.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn sweep_config_validation() {
        let mut cfg = small(2);
        cfg.kappas = vec![1e-3, 1e-2];
        assert!(matches!(
            cfg.validate(),
            Err(Error::InvalidParameter { field: "kappa", .. })
        ));
        cfg.kappas = vec![1e-2, 0.0];
        assert!(cfg.validate().is_err());
        cfg.kappas = vec![1e-2];
        cfg.resolutions = vec![16];
        assert!(matches!(
            cfg.validate(),
            Err(Error::InvalidParameter { field: "N", .. })
        ));
    }

    #[test]
    fn zero_velocity_single_kappa_matches_heat() {
        let mut cfg = small(1);
        cfg.schedule.amplitude = 0.0;
        cfg.kappas = vec![1e-2];
        cfg.initial = InitialData::SinX;
        cfg.substeps_per_stage = 8192;
        let rec = run_sweep(&cfg).unwrap();
        assert_eq!(rec.runs.len(), 1);
        let r = &rec.runs[0];
        let a = 4.0 * std::f64::consts::PI.powi(2) * 1e-2;
        let exact = (1.0 - (-2.0 * a * 0.5f64).exp()) / 4.0;
        assert!((r.dissipation - exact).abs() < 1e-10, "{} vs {exact}", r.dissipation);
        let gap = r.unmixing_gap.unwrap();
        let gap_exact = (1.0 - (-a).exp()) / 2f64.sqrt();
        assert!((gap - gap_exact).abs() < 1e-12);
    }

    #[test]
    fn sweep_runs_diagnostics_hold() {
        let rec = run_sweep(&small(2)).unwrap();
        assert!(rec.failures.is_empty(), "{:?}", rec.failures);
        assert_eq!(
            rec.runs.iter().map(|r| r.kappa).collect::<Vec<_>>(),
            vec![1e-2, 5e-3, 2.5e-3]
        );
        for r in &rec.runs {
            for p in &r.pairings {
                let lo = (1.0 - 2.0 * p.epsilon) * r.cutoff_dissipation;
                assert!(p.defect >= lo && p.defect <= r.cutoff_dissipation);
                assert!((p.ktp_residual - p.defect).abs() < 1e-2 * p.defect);
                assert!(p.kad_residual.abs() < 1e-2 * p.defect);
            }
            let gap = r.unmixing_gap.unwrap();
            assert!(gap >= r.gap_lower_bound.unwrap() && gap > 0.0);
        }
    }

    #[test]
    fn reports_do_not_depend_on_worker_count() {
        let mut one = small(2);
        one.workers = 1;
        let mut three = one.clone();
        three.workers = 3;
        let json = RunConfig::default().to_json();
        let a = format_sweep_report("sweep", &run_sweep(&one).unwrap(), &json);
        let b = format_sweep_report("sweep", &run_sweep(&three).unwrap(), &json);
        assert_eq!(a, b);
        assert!(a.starts_with(&format!("# anomdiss {VERSION} sweep\n# config: {{")));
    }

    #[test]
    fn control_disables_the_cascade() {
        let c = small(5).control();
        assert_eq!(c.schedule.n_stages, 1);
        assert!(!c.full_horizon);
    }

    #[test]
    fn failed_runs_are_recorded_and_all_failed_is_an_error() {
        let mut cfg = small(2);
        cfg.tolerances.energy_relative = 0.0;
        cfg.kappas = vec![1e-2];
        assert!(matches!(run_sweep(&cfg), Err(Error::EmptySweep)));
    }
}

#[cfg(test)]
mod properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(6))]

        #[test]
        fn defect_is_sandwiched_in_every_run(kappa in 1e-3f64..2e-2, n_stages in 1usize..=3) {
            let mut cfg = SweepConfig::from_run_config(&RunConfig::default()).unwrap();
            cfg.resolutions = vec![32];
            cfg.schedule.lambda0 = 1;
            cfg.schedule.n_stages = n_stages;
            cfg.substeps_per_stage = 512;
            cfg.snapshots_per_stage = 8;
            let (_, rec) = run_one(&cfg, kappa, 32).unwrap();
            for p in &rec.pairings {
                let d = rec.cutoff_dissipation;
                prop_assert!(p.defect >= (1.0 - 2.0 * p.epsilon) * d * (1.0 - 1e-12));
                prop_assert!(p.defect <= d * (1.0 + 1e-12));
            }
        }
    }
}
