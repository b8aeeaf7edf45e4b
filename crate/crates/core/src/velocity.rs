//! Alternating sinusoidal shear flows.
//!
//! A schedule is a finite cascade of shear stages on `[0, T/2)` with
//! geometrically growing frequency `λ_n = λ_0 ρ^n` and geometrically
//! shrinking duration `τ_n = (T/2)(1 - q) q^n`; the last stage absorbs the
//! tail so the durations partition `[0, T/2)`. When mirrored, the second
//! half replays the cascade backwards with the sign flipped:
//! `u(t) = -u_*(T - t)` on `[T/2, T]`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{PeriodicGrid, ScalarField};

/// Direction of the shear. `Horizontal` is `u = (v(y), 0)`, `Vertical` is
/// `u = (0, v(x))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Horizontal,
    Vertical,
}

impl Axis {
    pub fn other(self) -> Axis {
        match self {
            Axis::Horizontal => Axis::Vertical,
            Axis::Vertical => Axis::Horizontal,
        }
    }
}

/// One shear stage with profile `v(s) = a sin(2π λ s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShearStage {
    pub axis: Axis,
    pub frequency: u64,
    pub amplitude: f64,
    pub start: f64,
    pub duration: f64,
}

impl ShearStage {
    /// Profile value at transverse coordinate `s`.
    #[inline]
    pub fn profile(&self, s: f64) -> f64 {
        self.amplitude * (2.0 * PI * self.frequency as f64 * s).sin()
    }

    pub fn end(&self) -> f64 {
        self.start + self.duration
    }

    pub fn check_resolved(&self, grid: PeriodicGrid) -> Result<()> {
        if self.frequency as usize > grid.nyquist() {
            return Err(Error::Unresolved {
                frequency: self.frequency,
                n: grid.n(),
                limit: grid.nyquist(),
            });
        }
        Ok(())
    }

    /// Velocity components `(u_x, u_y)` sampled on `grid`, scaled by `sign`.
    pub fn sample(&self, grid: PeriodicGrid, sign: f64) -> (ScalarField, ScalarField) {
        let zero = ScalarField::constant(grid, 0.0);
        match self.axis {
            Axis::Horizontal => (ScalarField::from_fn(grid, |_, y| sign * self.profile(y)), zero),
            Axis::Vertical => (zero, ScalarField::from_fn(grid, |x, _| sign * self.profile(x))),
        }
    }
}

/// Parameters of the shear cascade, as they appear in run configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleParams {
    pub alpha: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub lambda0: u64,
    pub amplitude: f64,
    pub rho: u64,
    pub q: f64,
    pub n_stages: usize,
    pub mirrored: bool,
}

impl Default for ScheduleParams {
    fn default() -> Self {
        ScheduleParams {
            alpha: 0.5,
            horizon: 1.0,
            lambda0: 2,
            amplitude: 1.0,
            rho: 2,
            q: 0.5,
            n_stages: 5,
            mirrored: true,
        }
    }
}

impl ScheduleParams {
    /// Frequency of the last (finest) stage.
    pub fn max_frequency(&self) -> u64 {
        self.lambda0
            .saturating_mul(self.rho.saturating_pow(self.n_stages.saturating_sub(1) as u32))
    }
}

/// A time interval with constant velocity: stage `stage` scaled by `sign`,
/// or no velocity at all when `stage` is `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub stage: Option<usize>,
    pub sign: f64,
}

impl Segment {
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }
}

/// The velocity in effect at some instant.
#[derive(Debug, Clone, Copy)]
pub struct VelocityAt<'a> {
    pub index: usize,
    pub stage: &'a ShearStage,
    pub sign: f64,
}

impl VelocityAt<'_> {
    pub fn effective_amplitude(&self) -> f64 {
        self.sign * self.stage.amplitude
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VelocitySchedule {
    params: ScheduleParams,
    stages: Vec<ShearStage>,
}

/// Builds the cascade described by `params`.
pub fn build_schedule(params: &ScheduleParams) -> Result<VelocitySchedule> {
    let p = params;
    if !(0.0..1.0).contains(&p.alpha) {
        return Err(Error::param(
            "alpha",
            format!("Hölder exponent must lie in [0, 1), got {}", p.alpha),
        ));
    }
    if !(p.horizon.is_finite() && p.horizon > 0.0) {
        return Err(Error::param(
            "T",
            format!("horizon must be positive and finite, got {}", p.horizon),
        ));
    }
    if p.lambda0 == 0 {
        return Err(Error::param("lambda0", "base frequency must be a positive integer"));
    }
    if !p.amplitude.is_finite() {
        return Err(Error::param("amplitude", "amplitude must be finite"));
    }
    if p.rho == 0 {
        return Err(Error::param("rho", "frequency ratio must be a positive integer"));
    }
    if !(p.q > 0.0 && p.q < 1.0) {
        return Err(Error::param(
            "q",
            format!("duration ratio must lie in (0, 1), got {}", p.q),
        ));
    }
    if p.n_stages == 0 {
        return Err(Error::param("n_stages", "at least one stage is required"));
    }
    let growth = p.q * (p.rho as f64).powf(p.alpha);
    if growth >= 1.0 {
        return Err(Error::param(
            "q",
            format!(
                "L1-in-time C^alpha norm diverges: q * rho^alpha = {growth} must be < 1 \
                 (q = {}, rho = {}, alpha = {})",
                p.q, p.rho, p.alpha
            ),
        ));
    }
    let overflows = u32::try_from(p.n_stages - 1)
        .ok()
        .and_then(|e| p.rho.checked_pow(e))
        .and_then(|r| r.checked_mul(p.lambda0))
        .is_none();
    if overflows {
        return Err(Error::param("n_stages", "stage frequencies overflow"));
    }

    let half = 0.5 * p.horizon;
    let mut stages = Vec::with_capacity(p.n_stages);
    let mut start = 0.0;
    let mut axis = Axis::Horizontal;
    for n in 0..p.n_stages {
        let duration = if n + 1 == p.n_stages {
            half - start
        } else {
            half * (1.0 - p.q) * p.q.powi(n as i32)
        };
        stages.push(ShearStage {
            axis,
            frequency: p.lambda0 * p.rho.pow(n as u32),
            amplitude: p.amplitude,
            start,
            duration,
        });
        start += duration;
        axis = axis.other();
    }
    Ok(VelocitySchedule {
        params: params.clone(),
        stages,
    })
}

impl VelocitySchedule {
    pub fn params(&self) -> &ScheduleParams {
        &self.params
    }

    pub fn stages(&self) -> &[ShearStage] {
        &self.stages
    }

    pub fn horizon(&self) -> f64 {
        self.params.horizon
    }

    pub fn half(&self) -> f64 {
        0.5 * self.params.horizon
    }

    pub fn mirrored(&self) -> bool {
        self.params.mirrored
    }

    /// Replaces the stage amplitudes. Used for schedules outside the
    /// constant-amplitude family.
    pub fn with_amplitudes(mut self, amplitudes: &[f64]) -> Result<Self> {
        if amplitudes.len() != self.stages.len() {
            return Err(Error::param(
                "amplitude",
                format!("{} amplitudes for {} stages", amplitudes.len(), self.stages.len()),
            ));
        }
        for (s, &a) in self.stages.iter_mut().zip(amplitudes) {
            if !a.is_finite() {
                return Err(Error::param("amplitude", "amplitude must be finite"));
            }
            s.amplitude = a;
        }
        Ok(self)
    }

    pub fn check_resolved(&self, grid: PeriodicGrid) -> Result<()> {
        self.stages.iter().try_for_each(|s| s.check_resolved(grid))
    }

    /// Time-ordered constant-velocity pieces covering `[0, T]`. Without the
    /// mirror the second half carries no velocity.
    pub fn segments(&self) -> Vec<Segment> {
        let half = self.half();
        let horizon = self.horizon();
        let mut segs: Vec<Segment> = self
            .stages
            .iter()
            .enumerate()
            .map(|(k, s)| Segment {
                start: s.start,
                end: if k + 1 == self.stages.len() {
                    half
                } else {
                    self.stages[k + 1].start
                },
                stage: Some(k),
                sign: 1.0,
            })
            .collect();
        if self.mirrored() {
            let forward = segs.clone();
            segs.extend(forward.iter().rev().map(|s| Segment {
                start: horizon - s.end,
                end: horizon - s.start,
                stage: s.stage,
                sign: -1.0,
            }));
        } else {
            segs.push(Segment {
                start: half,
                end: horizon,
                stage: None,
                sign: 0.0,
            });
        }
        segs
    }

    /// Index of the stage of `u_*` whose interval contains `s ∈ [0, T/2)`.
    fn stage_index(&self, s: f64) -> usize {
        self.stages.partition_point(|st| st.start <= s).saturating_sub(1)
    }

    /// The velocity at time `t`. Returns `Ok(None)` on the quiescent second
    /// half of an unmirrored schedule.
    pub fn velocity_at(&self, t: f64) -> Result<Option<VelocityAt<'_>>> {
        let horizon = self.horizon();
        let half = self.half();
        if !(t >= 0.0 && t < horizon) {
            return Err(Error::TimeOutOfRange { t, horizon });
        }
        if t < half {
            let index = self.stage_index(t);
            return Ok(Some(VelocityAt {
                index,
                stage: &self.stages[index],
                sign: 1.0,
            }));
        }
        if !self.mirrored() {
            return Ok(None);
        }
        if t == half {
            return Err(Error::param("t", "the mirrored velocity is not defined at exactly T/2"));
        }
        let index = self.stage_index(horizon - t);
        Ok(Some(VelocityAt {
            index,
            stage: &self.stages[index],
            sign: -1.0,
        }))
    }

    /// `‖u‖_{L^∞}`: sinusoidal profiles attain their amplitude.
    pub fn sup_norm(&self) -> f64 {
        self.stages.iter().fold(0.0f64, |m, s| m.max(s.amplitude.abs()))
    }

    /// `∫_0^{T/2} ‖u(t)‖_{C^α} dt` with the Hölder seminorm estimated from
    /// `n_samples` equispaced samples of each profile (torus distance).
    pub fn l1_holder_norm(&self, alpha: f64, n_samples: usize) -> f64 {
        self.stages
            .iter()
            .map(|s| {
                if s.amplitude == 0.0 {
                    return 0.0;
                }
                let samples: Vec<f64> = (0..n_samples).map(|i| s.profile(i as f64 / n_samples as f64)).collect();
                s.duration * (s.amplitude.abs() + sampled_holder_seminorm(&samples, alpha))
            })
            .sum()
    }

    /// `Σ τ_n |a_n| (2π λ_n)^α`, the time-integrated `α`-scaled velocity
    /// gradient scale.
    pub fn holder_rate_sum(&self, alpha: f64) -> f64 {
        self.stages
            .iter()
            .map(|s| s.duration * s.amplitude.abs() * (2.0 * PI * s.frequency as f64).powf(alpha))
            .sum()
    }

    /// Upper bound for [`Self::l1_holder_norm`] valid for every truncation
    /// of the constant-amplitude cascade: `(T/2)·(a + 2a (πλ_0)^α (1-q)/(1 - qρ^α))`.
    pub fn holder_bound(&self, alpha: f64) -> f64 {
        let p = &self.params;
        let a = p.amplitude.abs();
        let growth = p.q * (p.rho as f64).powf(alpha);
        self.half() * (a + 2.0 * a * (PI * p.lambda0 as f64).powf(alpha) * (1.0 - p.q) / (1.0 - growth))
    }
}

/// `sup_{i≠j} |v_i - v_j| / d(i, j)^α` over equispaced samples of a periodic
/// function, `d` the torus distance.
pub fn sampled_holder_seminorm(samples: &[f64], alpha: f64) -> f64 {
    let n = samples.len();
    if n < 2 {
        return 0.0;
    }
    // Weight depends only on the index offset.
    let inv_dist: Vec<f64> = (0..n)
        .map(|off| {
            let d = off.min(n - off) as f64 / n as f64;
            if off == 0 {
                0.0
            } else {
                d.powf(-alpha)
            }
        })
        .collect();
    let mut best = 0.0f64;
    for i in 0..n {
        let vi = samples[i];
        for j in (i + 1)..n {
            let q = (vi - samples[j]).abs() * inv_dist[j - i];
            if q > best {
                best = q;
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{gradient, PeriodicGrid};

    fn defaults() -> ScheduleParams {
        ScheduleParams::default()
    }

    #[test]
    fn single_stage_covers_half_horizon() {
        let s = build_schedule(&ScheduleParams {
            n_stages: 1,
            ..defaults()
        })
        .unwrap();
        assert_eq!(s.stages().len(), 1);
        assert_eq!(s.stages()[0].axis, Axis::Horizontal);
        assert_eq!(s.stages()[0].duration, 0.5);
    }

    #[test]
    fn frequencies_durations_and_axes() {
        let s = build_schedule(&defaults()).unwrap();
        let freqs: Vec<u64> = s.stages().iter().map(|st| st.frequency).collect();
        assert_eq!(freqs, vec![2, 4, 8, 16, 32]);
        let durs: Vec<f64> = s.stages().iter().map(|st| st.duration).collect();
        assert_eq!(durs, vec![0.25, 0.125, 0.0625, 0.03125, 0.03125]);
        for w in s.stages().windows(2) {
            assert_ne!(w[0].axis, w[1].axis);
            assert_eq!(w[0].end(), w[1].start);
        }
    }

    #[test]
    fn durations_partition_half_horizon() {
        for (q, n, horizon) in [(0.5, 5, 1.0), (0.3, 7, 2.0), (0.7, 3, 0.9), (0.45, 11, 1.3)] {
            let s = build_schedule(&ScheduleParams {
                q,
                n_stages: n,
                horizon,
                alpha: 0.0,
                ..defaults()
            })
            .unwrap();
            let sum: f64 = s.stages().iter().map(|st| st.duration).sum();
            assert!((sum - horizon / 2.0).abs() <= 1e-15, "{sum}");
        }
    }

    #[test]
    fn per_stage_displacement_is_constant_for_default_ratios() {
        let s = build_schedule(&defaults()).unwrap();
        let p = s.params();
        // a τ_n λ_n = a λ_0 (T/2)(1-q)(qρ)^n, with qρ = 1 (last stage excluded).
        let want = p.amplitude * p.lambda0 as f64 * 0.5 * (1.0 - p.q);
        for st in &s.stages()[..4] {
            assert_eq!(st.amplitude * st.duration * st.frequency as f64, want);
        }
    }

    #[test]
    fn rejects_divergent_holder_norm() {
        let err = build_schedule(&ScheduleParams { q: 0.9, ..defaults() }).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("q * rho^alpha"), "{msg}");
        assert!(build_schedule(&ScheduleParams {
            alpha: 1.0,
            ..defaults()
        })
        .is_err());
        assert!(build_schedule(&ScheduleParams {
            n_stages: 0,
            ..defaults()
        })
        .is_err());
        assert!(build_schedule(&ScheduleParams {
            lambda0: 0,
            ..defaults()
        })
        .is_err());
    }

    #[test]
    fn resolvability() {
        let s = build_schedule(&defaults()).unwrap();
        assert!(s.check_resolved(PeriodicGrid::new(64).unwrap()).is_ok());
        assert!(matches!(
            s.check_resolved(PeriodicGrid::new(32).unwrap()),
            Err(Error::Unresolved { frequency: 32, .. })
        ));
    }

    #[test]
    fn holder_rate_sum_matches_geometric_closed_form() {
        let p = ScheduleParams {
            alpha: 0.5,
            ..defaults()
        };
        let s = build_schedule(&p).unwrap();
        let a = p.amplitude;
        let r = p.q * (p.rho as f64).sqrt();
        let n = p.n_stages as i32;
        // Stages 0..n-2 follow the geometric law; the last one absorbs the tail.
        let head = a * (2.0 * PI * p.lambda0 as f64).sqrt() * 0.5 * (1.0 - p.q) * (1.0 - r.powi(n - 1)) / (1.0 - r);
        let last = a * 0.5 * p.q.powi(n - 1) * (2.0 * PI * p.max_frequency() as f64).sqrt();
        let got = s.holder_rate_sum(0.5);
        assert!((got - (head + last)).abs() <= 1e-12 * got);
    }

    #[test]
    fn velocity_lookup() {
        let s = build_schedule(&defaults()).unwrap();
        let v = s.velocity_at(0.0).unwrap().unwrap();
        assert_eq!((v.index, v.sign), (0, 1.0));
        let v = s.velocity_at(1.0 - 1e-9).unwrap().unwrap();
        assert_eq!((v.index, v.sign), (0, -1.0));
        assert!(s.velocity_at(0.5).is_err());
        assert!(s.velocity_at(1.0).is_err());
        assert!(s.velocity_at(-0.1).is_err());

        // Prefix-sum oracle.
        let durs: Vec<f64> = s.stages().iter().map(|st| st.duration).collect();
        for k in 0..1000 {
            let t = 0.5 * k as f64 / 1000.0;
            let mut acc = 0.0;
            let mut want = 0;
            for (n, d) in durs.iter().enumerate() {
                if acc <= t {
                    want = n;
                }
                acc += d;
            }
            assert_eq!(s.velocity_at(t).unwrap().unwrap().index, want, "t = {t}");
        }
    }

    #[test]
    fn unmirrored_second_half_is_quiescent() {
        let s = build_schedule(&ScheduleParams {
            mirrored: false,
            ..defaults()
        })
        .unwrap();
        assert!(s.velocity_at(0.7).unwrap().is_none());
        let segs = s.segments();
        assert_eq!(segs.last().unwrap().stage, None);
    }

    #[test]
    fn mirror_antisymmetry() {
        let s = build_schedule(&defaults()).unwrap();
        for k in 1..400 {
            let t = k as f64 / 400.0 * 0.5;
            if t == 0.5 {
                continue;
            }
            let a = s.velocity_at(t).unwrap().unwrap();
            let b = s.velocity_at(1.0 - t).unwrap().unwrap();
            assert_eq!(a.index, b.index);
            assert_eq!(a.effective_amplitude(), -b.effective_amplitude());
        }
    }

    #[test]
    fn segments_tile_the_horizon() {
        let s = build_schedule(&defaults()).unwrap();
        let segs = s.segments();
        assert_eq!(segs.len(), 10);
        assert_eq!(segs[0].start, 0.0);
        assert_eq!(segs.last().unwrap().end, 1.0);
        for w in segs.windows(2) {
            assert_eq!(w[0].end, w[1].start);
        }
    }

    #[test]
    fn sup_norm_is_max_amplitude() {
        let s = build_schedule(&ScheduleParams {
            amplitude: 0.7,
            ..defaults()
        })
        .unwrap();
        assert_eq!(s.sup_norm(), 0.7);
        let two = build_schedule(&ScheduleParams {
            n_stages: 2,
            ..defaults()
        })
        .unwrap()
        .with_amplitudes(&[1.0, 0.5])
        .unwrap();
        assert_eq!(two.sup_norm(), 1.0);
        let four = build_schedule(&ScheduleParams {
            n_stages: 4,
            amplitude: 3.0,
            ..defaults()
        })
        .unwrap();
        let decaying: Vec<f64> = (0..4).map(|n| 3.0 * 0.5f64.powi(n)).collect();
        assert_eq!(four.with_amplitudes(&decaying).unwrap().sup_norm(), 3.0);
    }

    #[test]
    fn holder_norm_of_single_stage_at_alpha_zero() {
        let s = build_schedule(&ScheduleParams {
            n_stages: 1,
            amplitude: 1.3,
            ..defaults()
        })
        .unwrap();
        let got = s.l1_holder_norm(0.0, 4096);
        let want = 0.5 * (1.3 + 2.0 * 1.3);
        assert!((got - want).abs() < 1e-3);
    }

    #[test]
    fn holder_norm_of_zero_amplitude() {
        let s = build_schedule(&ScheduleParams {
            amplitude: 0.0,
            ..defaults()
        })
        .unwrap();
        assert_eq!(s.l1_holder_norm(0.5, 512), 0.0);
    }

    #[test]
    fn holder_norm_converges_under_refinement() {
        let s = build_schedule(&defaults()).unwrap();
        let a = s.l1_holder_norm(0.5, 2048);
        let b = s.l1_holder_norm(0.5, 4096);
        assert!((a - b).abs() < 1e-3 * b, "{a} vs {b}");
    }

    #[test]
    fn holder_norm_monotone_in_stages_and_bounded() {
        for alpha in [0.0, 0.3, 0.5, 0.9] {
            let p = ScheduleParams {
                alpha,
                q: 0.5,
                ..defaults()
            };
            let mut prev = 0.0;
            for n in 1..=6 {
                let s = build_schedule(&ScheduleParams {
                    n_stages: n,
                    ..p.clone()
                })
                .unwrap();
                let v = s.l1_holder_norm(alpha, 1024);
                assert!(v >= prev - 1e-12, "alpha {alpha}, n {n}: {v} < {prev}");
                assert!(v <= s.holder_bound(alpha) * (1.0 + 1e-12));
                prev = v;
            }
        }
    }

    #[test]
    fn stage_velocities_are_divergence_free() {
        let grid = PeriodicGrid::new(64).unwrap();
        let s = build_schedule(&defaults()).unwrap();
        for st in s.stages() {
            let (ux, uy) = st.sample(grid, 1.0);
            let div = &gradient(&ux).0 + &gradient(&uy).1;
            assert!(div.max_abs() < 1e-12, "{}", div.max_abs());
        }
    }
}

#[cfg(test)]
mod properties {
    use super::*;
    use crate::grid::{gradient, PeriodicGrid};
    use proptest::prelude::*;

    /// Valid schedules: `q` is drawn below `rho^-alpha`.
    fn params() -> impl Strategy<Value = ScheduleParams> {
        (
            (0.0f64..0.95, 2u64..=3, 1u64..=4, 1usize..=8),
            (0.05f64..0.95, 0.1f64..2.0, 0.1f64..3.0, any::<bool>()),
        )
            .prop_map(
                |((alpha, rho, lambda0, n_stages), (frac, horizon, amplitude, mirrored))| ScheduleParams {
                    alpha,
                    horizon,
                    lambda0,
                    amplitude,
                    rho,
                    q: frac / (rho as f64).powf(alpha),
                    n_stages,
                    mirrored,
                },
            )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn durations_partition_half_horizon(p in params()) {
            let s = build_schedule(&p).unwrap();
            let sum: f64 = s.stages().iter().map(|st| st.duration).sum();
            prop_assert!((sum - p.horizon / 2.0).abs() <= 1e-15 * p.horizon.max(1.0));
            prop_assert!(s.stages().iter().all(|st| st.duration > 0.0));
        }

        #[test]
        fn segments_tile_the_horizon(p in params()) {
            let s = build_schedule(&p).unwrap();
            let segs = s.segments();
            prop_assert_eq!(segs[0].start, 0.0);
            prop_assert_eq!(segs.last().unwrap().end, p.horizon);
            for w in segs.windows(2) {
                prop_assert_eq!(w[0].end, w[1].start);
            }
        }

        #[test]
        fn mirror_antisymmetry(p in params(), frac in 0.0f64..1.0) {
            let p = ScheduleParams { mirrored: true, ..p };
            let s = build_schedule(&p).unwrap();
            let t = frac * p.horizon / 2.0;
            prop_assume!(t != p.horizon / 2.0 && t > 0.0);
            let a = s.velocity_at(t).unwrap().unwrap();
            let b = s.velocity_at(p.horizon - t).unwrap().unwrap();
            prop_assert_eq!(a.index, b.index);
            prop_assert_eq!(a.effective_amplitude(), -b.effective_amplitude());
        }

        #[test]
        fn resolved_stages_are_divergence_free(p in params()) {
            let grid = PeriodicGrid::new(256).unwrap();
            let s = build_schedule(&p).unwrap();
            for st in s.stages().iter().filter(|st| st.frequency <= 32) {
                let (ux, uy) = st.sample(grid, 1.0);
                let div = &gradient(&ux).0 + &gradient(&uy).1;
                prop_assert!(div.max_abs() <= 1e-11 * (1.0 + st.amplitude * st.frequency as f64));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]

        #[test]
        fn holder_norm_monotone_and_bounded(p in params()) {
            let p = ScheduleParams { n_stages: p.n_stages.min(5), ..p };
            let s = build_schedule(&p).unwrap();
            let next = build_schedule(&ScheduleParams { n_stages: p.n_stages + 1, ..p.clone() }).unwrap();
            // Sampling only sees frequencies well below the sample count.
            prop_assume!(next.params().max_frequency() <= 64);
            let a = s.l1_holder_norm(p.alpha, 1024);
            let b = next.l1_holder_norm(p.alpha, 1024);
            prop_assert!(b >= a * (1.0 - 1e-12));
            prop_assert!(a <= s.holder_bound(p.alpha) * (1.0 + 1e-12));
        }
    }
}
