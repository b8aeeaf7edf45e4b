//! Advection–diffusion integrator on the torus.
//!
//! Each sub-step is the Strang composition `D(dt/2) ∘ A(dt) ∘ D(dt/2)` of
//! two exact propagators: the heat semigroup (a Fourier multiplier) and
//! shear advection (a per-line phase shift, i.e. the method of
//! characteristics on the trigonometric interpolant). Neither sub-step has a
//! CFL restriction and `κ = 0` simply turns `D` into the identity.
//!
//! The dissipation functional `D(κ, t) = κ ∫_0^t ‖∇θ‖² ds` is accumulated by
//! the trapezoid rule on `κ‖∇θ‖²` sampled at sub-step boundaries.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::snapshot::Snapshot;
use crate::grid::spectral::{self, assert_real, assert_real_within, is_nyquist, wavenumber, Plans};
use crate::grid::{l2_norm_sq, PeriodicGrid, ScalarField};
use crate::velocity::{Axis, Segment, ShearStage, VelocitySchedule};

/// Default sub-steps per stage segment.
pub const DEFAULT_SUBSTEPS: usize = 16;

/// Snapshot times closer than this (relative to the horizon) to a sub-step
/// boundary are taken at that boundary.
const TIME_SNAP_TOL: f64 = 1e-12;

/// Roundoff slowly breaks the Hermitian symmetry of the spectral state over
/// thousands of steps; a wavenumber bug shows up as an O(1) residue.
const STATE_RESIDUE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub kappa: f64,
    pub grid: PeriodicGrid,
    pub substeps_per_stage: usize,
    /// Sorted times in `[0, T]` at which the field is stored.
    pub snapshot_times: Vec<f64>,
    /// Gaussian filter scale applied to stored snapshots; 0 disables it.
    pub mollify_scale: f64,
}

impl SolverConfig {
    pub fn new(kappa: f64, grid: PeriodicGrid, snapshot_times: Vec<f64>) -> Self {
        SolverConfig {
            kappa,
            grid,
            substeps_per_stage: DEFAULT_SUBSTEPS,
            snapshot_times,
            mollify_scale: 0.0,
        }
    }

    pub fn validate(&self, horizon: f64) -> Result<()> {
        if !(self.kappa.is_finite() && self.kappa >= 0.0) {
            return Err(Error::param(
                "kappa",
                format!("diffusivity must be >= 0, got {}", self.kappa),
            ));
        }
        if self.substeps_per_stage == 0 {
            return Err(Error::param("substeps_per_stage", "must be at least 1"));
        }
        if !(self.mollify_scale.is_finite() && self.mollify_scale >= 0.0) {
            return Err(Error::param("mollify_scale", "must be >= 0"));
        }
        if self.snapshot_times.is_empty() {
            return Err(Error::param("snapshot_times", "at least one snapshot time is required"));
        }
        if self
            .snapshot_times
            .windows(2)
            .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
        {
            return Err(Error::param("snapshot_times", "times must be strictly increasing"));
        }
        let (first, last) = (self.snapshot_times[0], *self.snapshot_times.last().unwrap());
        if !(first >= 0.0 && last <= horizon) {
            return Err(Error::param(
                "snapshot_times",
                format!("times must lie in [0, {horizon}], got [{first}, {last}]"),
            ));
        }
        Ok(())
    }
}

/// `per_segment + 1` equispaced times on every constant-velocity segment
/// that starts before `until`, clipped to `[0, until]`, plus any `extra`.
pub fn segment_snapshot_times(schedule: &VelocitySchedule, per_segment: usize, until: f64, extra: &[f64]) -> Vec<f64> {
    let per_segment = per_segment.max(1);
    let mut times = Vec::new();
    for seg in schedule.segments() {
        if seg.start >= until && !times.is_empty() {
            break;
        }
        for k in 0..=per_segment {
            let t = if k == per_segment {
                seg.end
            } else {
                seg.start + seg.duration() * k as f64 / per_segment as f64
            };
            if t <= until {
                times.push(t);
            }
        }
    }
    times.extend_from_slice(extra);
    times.sort_by(f64::total_cmp);
    times.dedup_by(|a, b| (*a - *b).abs() <= TIME_SNAP_TOL * schedule.horizon());
    times
}

/// Energy and dissipation bookkeeping at one sub-step boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedgerPoint {
    pub t: f64,
    /// `D(κ, t)`.
    pub dissipation: f64,
    /// `κ‖∇θ(t)‖²`.
    pub rate: f64,
    /// `½‖θ(t)‖²`.
    pub energy: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrema {
    pub t: f64,
    pub min: f64,
    pub max: f64,
}

/// Result of [`integrate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub kappa: f64,
    pub grid: PeriodicGrid,
    /// Stored fields at the requested times (mollified when configured).
    pub snapshots: Vec<Snapshot>,
    /// One point per sub-step boundary, in time order.
    pub ledger: Vec<LedgerPoint>,
    /// Unfiltered field extrema at snapshot times.
    pub extrema: Vec<Extrema>,
    /// `(min θ_0, max θ_0)`.
    pub initial_range: (f64, f64),
}

/// Tolerances for [`Trajectory::check_invariants`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantTolerances {
    pub mean_drift: f64,
    pub energy_relative: f64,
    /// Allowed overshoot as a fraction of the initial oscillation.
    pub overshoot: f64,
}

impl Default for InvariantTolerances {
    fn default() -> Self {
        InvariantTolerances {
            mean_drift: 1e-13,
            energy_relative: 1e-6,
            overshoot: 1e-3,
        }
    }
}

impl Trajectory {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.snapshots.iter().map(|s| s.time)
    }

    pub fn initial_energy(&self) -> f64 {
        self.ledger[0].energy
    }

    pub fn end_time(&self) -> f64 {
        self.ledger.last().map_or(0.0, |p| p.t)
    }

    /// Ledger point at `t`, which must coincide with a sub-step boundary.
    pub fn ledger_at(&self, t: f64) -> Option<&LedgerPoint> {
        let tol = TIME_SNAP_TOL * self.end_time().max(1.0);
        let idx = self.ledger.partition_point(|p| p.t < t - tol);
        self.ledger.get(idx).filter(|p| (p.t - t).abs() <= tol)
    }

    pub fn dissipation_at(&self, t: f64) -> Option<f64> {
        self.ledger_at(t).map(|p| p.dissipation)
    }

    pub fn snapshot_at(&self, t: f64) -> Option<&Snapshot> {
        let tol = TIME_SNAP_TOL * self.end_time().max(1.0);
        self.snapshots.iter().find(|s| (s.time - t).abs() <= tol)
    }

    pub fn final_dissipation(&self) -> f64 {
        self.ledger.last().map_or(0.0, |p| p.dissipation)
    }

    /// `max_t |½‖θ(t)‖² + D(κ,t) - ½‖θ_0‖²| / ½‖θ_0‖²`.
    pub fn energy_residual(&self) -> f64 {
        let e0 = self.initial_energy();
        let worst = self
            .ledger
            .iter()
            .map(|p| (p.energy + p.dissipation - e0).abs())
            .fold(0.0f64, f64::max);
        if e0 > 0.0 {
            worst / e0
        } else {
            worst
        }
    }

    pub fn mean_drift(&self) -> f64 {
        let m0 = self.ledger[0].mean;
        self.ledger.iter().map(|p| (p.mean - m0).abs()).fold(0.0, f64::max)
    }

    /// Largest excursion outside `[min θ_0, max θ_0]`, relative to the
    /// initial oscillation.
    pub fn relative_overshoot(&self) -> f64 {
        let (lo, hi) = self.initial_range;
        let osc = (hi - lo).max(f64::MIN_POSITIVE);
        self.extrema
            .iter()
            .map(|e| (lo - e.min).max(e.max - hi).max(0.0))
            .fold(0.0, f64::max)
            / osc
    }

    /// Checks mean conservation, the energy–dissipation identity and the
    /// maximum principle. The first snapshot must be the initial datum.
    pub fn check_invariants(&self, tol: &InvariantTolerances) -> Result<()> {
        let t_end = self.end_time();
        let drift = self.mean_drift();
        if drift > tol.mean_drift {
            return Err(Error::Invariant {
                t: t_end,
                what: format!("mean drift {drift:e} exceeds {:e}", tol.mean_drift),
            });
        }
        let resid = self.energy_residual();
        if resid > tol.energy_relative {
            return Err(Error::Invariant {
                t: t_end,
                what: format!("energy identity residual {resid:e} exceeds {:e}", tol.energy_relative),
            });
        }
        if !self.extrema.is_empty() {
            let over = self.relative_overshoot();
            if over > tol.overshoot {
                return Err(Error::Invariant {
                    t: t_end,
                    what: format!("maximum principle overshoot {over:e} exceeds {:e}", tol.overshoot),
                });
            }
        }
        Ok(())
    }
}

/// Fourier multiplier of a shift by `shift` at FFT index `m`.
///
/// The Nyquist mode of a real line cannot be phase-shifted and stay real;
/// it is multiplied by the sign of `cos(π n shift)`, which keeps the map an
/// exact isometry, exactly invertible, and exact for whole-node shifts.
#[inline]
fn shift_multiplier(m: usize, n: usize, shift: f64) -> Complex64 {
    if is_nyquist(m, n) {
        let c = (PI * n as f64 * shift).cos();
        return Complex64::new(if c < 0.0 { -1.0 } else { 1.0 }, 0.0);
    }
    let k = wavenumber(m, n) as f64;
    let (s, c) = (-2.0 * PI * k * shift).sin_cos();
    Complex64::new(c, s)
}

/// Exact solution of `∂_t f + u·∇f = 0` over time `dt` for a single shear
/// stage (negative `dt` runs it backwards).
pub fn advect_shear_exact(f: &ScalarField, stage: &ShearStage, dt: f64) -> Result<ScalarField> {
    stage.check_resolved(f.grid())?;
    Ok(advect_by_profile(f, stage.axis, |s| stage.profile(s), dt))
}

/// Shear advection with an arbitrary profile `v`: each line transverse
/// coordinate `s` is translated by `dt · v(s)` along the flow.
pub fn advect_by_profile(f: &ScalarField, axis: Axis, v: impl Fn(f64) -> f64, dt: f64) -> ScalarField {
    let grid = f.grid();
    let n = grid.n();
    let p = spectral::plans(n);
    let mut scratch = p.scratch();
    let mut buf: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let transposed = axis == Axis::Vertical;
    if transposed {
        spectral::transpose(&mut buf, n);
    }
    p.rows_forward(&mut buf, &mut scratch);
    for (r, row) in buf.chunks_mut(n).enumerate() {
        let shift = dt * v(grid.coord(r));
        for (m, z) in row.iter_mut().enumerate() {
            *z *= shift_multiplier(m, n, shift);
        }
    }
    p.rows_inverse(&mut buf, &mut scratch);
    if transposed {
        spectral::transpose(&mut buf, n);
    }
    let (values, residue) = spectral::split_real(&buf);
    assert_real(residue, f.max_abs(), "shear advection");
    ScalarField::from_raw(grid, values)
}

/// Exact heat propagator `e^{κ dt Δ}`.
pub fn diffuse_exact(f: &ScalarField, kappa: f64, dt: f64) -> Result<ScalarField> {
    if !(kappa >= 0.0 && dt >= 0.0) {
        return Err(Error::param("kappa", "heat propagator needs kappa >= 0 and dt >= 0"));
    }
    if kappa == 0.0 || dt == 0.0 {
        return Ok(f.clone());
    }
    let c = -4.0 * PI * PI * kappa * dt;
    Ok(f.apply_even_multiplier(|kx, ky| (c * (kx * kx + ky * ky) as f64).exp()))
}

/// Gaussian spectral filter `exp(-scale² |2πk|² / 2)`.
pub fn mollify(f: &ScalarField, scale: f64) -> Result<ScalarField> {
    if !(scale.is_finite() && scale >= 0.0) {
        return Err(Error::param("mollify_scale", "must be >= 0"));
    }
    if scale == 0.0 {
        return Ok(f.clone());
    }
    let c = -2.0 * PI * PI * scale * scale;
    Ok(f.apply_even_multiplier(|kx, ky| (c * (kx * kx + ky * ky) as f64).exp()))
}

/// Reusable workspace for one integration.
struct Stepper {
    n: usize,
    plans: Arc<Plans>,
    scratch: Vec<Complex64>,
    /// Full spectrum between sub-steps.
    buf: Vec<Complex64>,
    /// Whether storage rows currently index `x` rather than `y`.
    transposed: bool,
    /// `4π²|k|²` in storage order (symmetric under transposition).
    k2: Vec<f64>,
    kappa: f64,
    heat_cache: HashMap<u64, Arc<Vec<f64>>>,
    phase_cache: HashMap<(usize, u64), Arc<Vec<Complex64>>>,
}

impl Stepper {
    fn new(theta0: &ScalarField, kappa: f64) -> Self {
        let n = theta0.grid().n();
        let plans = spectral::plans(n);
        let mut scratch = plans.scratch();
        let mut buf: Vec<Complex64> = theta0.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        plans.rows_forward(&mut buf, &mut scratch);
        spectral::transpose(&mut buf, n);
        plans.rows_forward(&mut buf, &mut scratch);
        let mut k2 = vec![0.0; n * n];
        for a in 0..n {
            let ka = wavenumber(a, n) as f64;
            for b in 0..n {
                let kb = wavenumber(b, n) as f64;
                k2[a * n + b] = 4.0 * PI * PI * (ka * ka + kb * kb);
            }
        }
        Stepper {
            n,
            plans,
            scratch,
            buf,
            transposed: true,
            k2,
            kappa,
            heat_cache: HashMap::new(),
            phase_cache: HashMap::new(),
        }
    }

    fn heat(&mut self, dt: f64) {
        if self.kappa == 0.0 || dt == 0.0 {
            return;
        }
        let table = match self.heat_cache.get(&dt.to_bits()) {
            Some(t) => t.clone(),
            None => {
                let c = -self.kappa * dt;
                let t = Arc::new(self.k2.iter().map(|&k2| (c * k2).exp()).collect::<Vec<_>>());
                self.heat_cache.insert(dt.to_bits(), t.clone());
                t
            }
        };
        for (z, &m) in self.buf.iter_mut().zip(table.iter()) {
            *z *= m;
        }
    }

    /// `(κ‖∇θ‖², ½‖θ‖², mean)` from the full spectrum.
    fn diagnostics(&self) -> (f64, f64, f64) {
        let norm = 1.0 / ((self.n * self.n) as f64).powi(2);
        let mut grad = 0.0;
        let mut energy = 0.0;
        for (z, &k2) in self.buf.iter().zip(&self.k2) {
            let p = z.norm_sqr();
            energy += p;
            grad += k2 * p;
        }
        let mean = self.buf[0].re / (self.n * self.n) as f64;
        (self.kappa * grad * norm, 0.5 * energy * norm, mean)
    }

    fn phase_table(&mut self, key: usize, stage: &ShearStage, sign: f64, dt: f64) -> Arc<Vec<Complex64>> {
        let cache_key = (key, dt.to_bits());
        if let Some(t) = self.phase_cache.get(&cache_key) {
            return t.clone();
        }
        let n = self.n;
        // Folds in the 1/n of the unnormalized inverse row transform.
        let inv_n = 1.0 / n as f64;
        let mut table = Vec::with_capacity(n * n);
        for r in 0..n {
            let shift = dt * sign * stage.profile(r as f64 / n as f64);
            for m in 0..n {
                table.push(shift_multiplier(m, n, shift) * inv_n);
            }
        }
        let table = Arc::new(table);
        self.phase_cache.insert(cache_key, table.clone());
        table
    }

    /// Shear advection over `dt`. Requires the row axis of the intermediate
    /// row-spectral layout to run along the flow.
    fn advect(&mut self, key: usize, stage: &ShearStage, sign: f64, dt: f64) {
        if stage.amplitude * sign == 0.0 || dt == 0.0 {
            return;
        }
        // Horizontal shear acts along x: rows must index y (untransposed).
        let want_rows_transposed = stage.axis == Axis::Vertical;
        let n = self.n;
        let transposed = self.transposed;
        // Full(t) --inverse rows, transpose--> RowSpec(!t); we need !t == want.
        if transposed == want_rows_transposed {
            spectral::transpose(&mut self.buf, n);
        }
        let table = self.phase_table(key, stage, sign, dt);
        self.plans.rows_inverse_raw(&mut self.buf, &mut self.scratch);
        spectral::transpose(&mut self.buf, n);
        for (z, &m) in self.buf.iter_mut().zip(table.iter()) {
            *z *= m;
        }
        spectral::transpose(&mut self.buf, n);
        self.plans.rows_forward(&mut self.buf, &mut self.scratch);
        self.transposed = !want_rows_transposed;
    }

    /// Physical field in canonical orientation, plus the imaginary residue.
    fn physical(&mut self) -> (Vec<f64>, f64) {
        let n = self.n;
        let transposed = self.transposed;
        let mut work = self.buf.clone();
        self.plans.rows_inverse(&mut work, &mut self.scratch);
        spectral::transpose(&mut work, n);
        self.plans.rows_inverse(&mut work, &mut self.scratch);
        // Two transforms plus one transpose flip the orientation once.
        if !transposed {
            spectral::transpose(&mut work, n);
        }
        spectral::split_real(&work)
    }
}

/// Sub-step boundaries of one segment, with requested snapshot times
/// inserted, clipped at `t_end`.
fn segment_boundaries(seg: &Segment, substeps: usize, snaps: &[f64], t_end: f64, tol: f64) -> Vec<f64> {
    let mut ts: Vec<f64> = (0..=substeps)
        .map(|k| {
            if k == substeps {
                seg.end
            } else {
                seg.start + seg.duration() * k as f64 / substeps as f64
            }
        })
        .collect();
    for &s in snaps {
        if s > seg.start + tol && s < seg.end - tol && ts.iter().all(|&b| (b - s).abs() > tol) {
            ts.push(s);
        }
    }
    if t_end > seg.start + tol && t_end < seg.end - tol && ts.iter().all(|&b| (b - t_end).abs() > tol) {
        ts.push(t_end);
    }
    ts.sort_by(f64::total_cmp);
    ts.retain(|&t| t <= t_end + tol);
    ts
}

/// Integrates advection–diffusion from `theta0` under `schedule` up to the
/// last requested snapshot time.
pub fn integrate(theta0: &ScalarField, schedule: &VelocitySchedule, cfg: &SolverConfig) -> Result<Trajectory> {
    cfg.validate(schedule.horizon())?;
    if theta0.grid() != cfg.grid {
        return Err(Error::GridMismatch {
            expected: cfg.grid.n(),
            found: theta0.grid().n(),
        });
    }
    if !theta0.is_finite() {
        return Err(Error::NonFinite { t: 0.0 });
    }
    schedule.check_resolved(cfg.grid)?;

    let tol = TIME_SNAP_TOL * schedule.horizon();
    let t_end = *cfg.snapshot_times.last().unwrap();
    let mut run = Recorder {
        cfg,
        tol,
        oscillation: (theta0.max() - theta0.min()).max(theta0.max_abs()),
        next_snap: 0,
        dissipation: 0.0,
        rate: 0.0,
        traj: Trajectory {
            kappa: cfg.kappa,
            grid: cfg.grid,
            snapshots: Vec::with_capacity(cfg.snapshot_times.len()),
            ledger: Vec::new(),
            extrema: Vec::with_capacity(cfg.snapshot_times.len()),
            initial_range: (theta0.min(), theta0.max()),
        },
    };
    let mut stepper = Stepper::new(theta0, cfg.kappa);
    run.record(&mut stepper, 0.0, 0.0)?;
    for (seg_idx, seg) in schedule.segments().iter().enumerate() {
        if seg.start >= t_end - tol {
            break;
        }
        let stage = seg.stage.map(|k| &schedule.stages()[k]);
        let bounds = segment_boundaries(seg, cfg.substeps_per_stage, &cfg.snapshot_times, t_end, tol);
        for w in bounds.windows(2) {
            let dt = w[1] - w[0];
            stepper.heat(0.5 * dt);
            if let Some(stage) = stage {
                stepper.advect(seg_idx, stage, seg.sign, dt);
            }
            stepper.heat(0.5 * dt);
            run.record(&mut stepper, w[1], dt)?;
        }
    }
    debug_assert_eq!(run.next_snap, cfg.snapshot_times.len(), "missed snapshot times");
    Ok(run.traj)
}

struct Recorder<'a> {
    cfg: &'a SolverConfig,
    tol: f64,
    oscillation: f64,
    next_snap: usize,
    dissipation: f64,
    rate: f64,
    traj: Trajectory,
}

impl Recorder<'_> {
    /// Books the boundary reached after a sub-step of length `dt`.
    fn record(&mut self, stepper: &mut Stepper, t: f64, dt: f64) -> Result<()> {
        let (rate, energy, mean) = stepper.diagnostics();
        if !(rate.is_finite() && energy.is_finite()) {
            return Err(Error::NonFinite { t });
        }
        self.dissipation += 0.5 * dt * (self.rate + rate);
        self.rate = rate;
        self.traj.ledger.push(LedgerPoint {
            t,
            dissipation: self.dissipation,
            rate,
            energy,
            mean,
        });
        let times = &self.cfg.snapshot_times;
        while self.next_snap < times.len() && (times[self.next_snap] - t).abs() <= self.tol {
            let (values, residue) = stepper.physical();
            assert_real_within(residue, self.oscillation, STATE_RESIDUE_TOL, "trajectory snapshot");
            let field = ScalarField::from_raw(self.cfg.grid, values);
            self.traj.extrema.push(Extrema {
                t,
                min: field.min(),
                max: field.max(),
            });
            self.traj.snapshots.push(Snapshot {
                time: times[self.next_snap],
                kappa: self.cfg.kappa,
                field: mollify(&field, self.cfg.mollify_scale)?,
            });
            self.next_snap += 1;
        }
        Ok(())
    }
}

/// `½‖θ‖²`.
pub fn energy(f: &ScalarField) -> f64 {
    0.5 * l2_norm_sq(f)
}

/// Relative L² distance `‖a - b‖ / ‖b‖` (absolute when `b = 0`).
pub fn relative_l2(a: &ScalarField, b: &ScalarField) -> f64 {
    let diff = l2_norm_sq(&(a - b)).sqrt();
    let norm = l2_norm_sq(b).sqrt();
    if norm > 0.0 {
        diff / norm
    } else {
        diff
    }
}
