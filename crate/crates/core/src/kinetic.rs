//! Kinetic lift of the scalar: the indicator `χ(θ, ξ) = 1{ξ ≤ θ}`, test
//! functions in the kinetic variable, and weak-form evaluation on stored
//! trajectories.
//!
//! Every weak form here has the same shape. For a profile `R` applied to
//! the scalar and a test function `η(t) ψ(x)`, a smooth solution of
//! `∂_t θ + u·∇θ = κΔθ` satisfies
//!
//! ```text
//! ∫η'∫ψR(θ) + ∫η∫R(θ) u·∇ψ + κ∫η∫R(θ)Δψ − κ∫η∫ψ R''(θ)|∇θ|² + η(0)∫ψR(θ_0) = 0.
//! ```
//!
//! The kinetic form takes `R(θ) = ∫χ(θ, ξ) g(ξ) dξ`, so that
//! `R''(θ) = ∫χ(θ, ξ) g''(ξ) dξ = g'(θ)`.

use crate::grid::{gradient, integrate, laplacian, ScalarField};
use crate::solver::Trajectory;
use crate::velocity::{Axis, VelocitySchedule};
use crate::{Error, Result};

/// `1` when `ξ ≤ θ`, else `0`.
#[inline]
pub fn chi(theta: f64, xi: f64) -> u8 {
    u8::from(xi <= theta)
}

/// Uniform midpoint grid on `[xi_min, xi_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiGrid {
    xi_min: f64,
    xi_max: f64,
    d_xi: f64,
    cells: usize,
}

impl XiGrid {
    pub fn new(xi_min: f64, xi_max: f64, d_xi: f64) -> Result<Self> {
        if !(xi_min.is_finite() && xi_max.is_finite() && xi_min < xi_max) {
            return Err(Error::param("xi_min", "need finite xi_min < xi_max"));
        }
        if !(d_xi.is_finite() && d_xi > 0.0) {
            return Err(Error::param("d_xi", "must be positive"));
        }
        let span = xi_max - xi_min;
        let cells = (span / d_xi).round();
        if cells < 1.0 || (cells * d_xi - span).abs() > 1e-9 * span {
            return Err(Error::param("d_xi", "must divide xi_max - xi_min"));
        }
        Ok(Self {
            xi_min,
            xi_max,
            d_xi,
            cells: cells as usize,
        })
    }

    pub fn xi_min(&self) -> f64 {
        self.xi_min
    }

    pub fn xi_max(&self) -> f64 {
        self.xi_max
    }

    pub fn d_xi(&self) -> f64 {
        self.d_xi
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    #[inline]
    pub fn midpoint(&self, i: usize) -> f64 {
        self.xi_min + (i as f64 + 0.5) * self.d_xi
    }

    pub fn check_contains(&self, tf: &XiTestFunction) -> Result<()> {
        let (lo, hi) = tf.support();
        if lo < self.xi_min || hi > self.xi_max {
            return Err(Error::SupportNotContained {
                lo,
                hi,
                xi_min: self.xi_min,
                xi_max: self.xi_max,
            });
        }
        Ok(())
    }

    /// Midpoint quadrature of `∫(χ(θ, ξ) − χ(0, ξ)) dξ`, which equals `θ`
    /// up to one cell at each end.
    pub fn signed_area(&self, theta: f64) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.cells {
            let xi = self.midpoint(i);
            acc += f64::from(chi(theta, xi)) - f64::from(chi(0.0, xi));
        }
        acc * self.d_xi
    }
}

impl Default for XiGrid {
    fn default() -> Self {
        Self::new(-16.0, 16.0, 1.0 / 256.0).expect("default xi grid is valid")
    }
}

/// A test function in `ξ` given by a piecewise-constant second derivative.
///
/// `g''` equals `values[i]` on `[breakpoints[i], breakpoints[i + 1])` and
/// vanishes outside. `g'`, `g` and `∫g` are the primitives vanishing at
/// `−∞`, evaluated in closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct XiTestFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    epsilon: Option<f64>,
    // Primitives of order 1, 2, 3 at each breakpoint.
    p1: Vec<f64>,
    p2: Vec<f64>,
    p3: Vec<f64>,
}

impl XiTestFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || breakpoints.len() != values.len() + 1 {
            return Err(Error::param("breakpoints", "need one more breakpoint than values"));
        }
        if breakpoints.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::param("breakpoints", "all entries must be finite"));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("breakpoints", "must be strictly increasing"));
        }
        let m = values.len();
        let (mut p1, mut p2, mut p3) = (vec![0.0; m + 1], vec![0.0; m + 1], vec![0.0; m + 1]);
        for i in 0..m {
            let (c, d) = (values[i], breakpoints[i + 1] - breakpoints[i]);
            p1[i + 1] = p1[i] + c * d;
            p2[i + 1] = p2[i] + p1[i] * d + c * d * d / 2.0;
            p3[i + 1] = p3[i] + p2[i] * d + p1[i] * d * d / 2.0 + c * d * d * d / 6.0;
        }
        Ok(Self {
            breakpoints,
            values,
            epsilon: None,
            p1,
            p2,
            p3,
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn epsilon(&self) -> Option<f64> {
        self.epsilon
    }

    /// Closed interval outside of which `g''` vanishes.
    pub fn support(&self) -> (f64, f64) {
        (self.breakpoints[0], *self.breakpoints.last().unwrap())
    }

    pub fn max_abs_second_derivative(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `∫g''` over the whole line, from the segment table.
    pub fn total_mass(&self) -> f64 {
        self.values
            .iter()
            .zip(self.breakpoints.windows(2))
            .map(|(c, w)| c * (w[1] - w[0]))
            .sum()
    }

    /// `[g'', g', g, ∫g]` at `xi`.
    fn eval(&self, xi: f64) -> [f64; 4] {
        let b = &self.breakpoints;
        if xi < b[0] {
            return [0.0; 4];
        }
        let i = b.partition_point(|&x| x <= xi) - 1;
        let c = self.values.get(i).copied().unwrap_or(0.0);
        let d = xi - b[i];
        let (q1, q2, q3) = (self.p1[i], self.p2[i], self.p3[i]);
        [
            c,
            q1 + c * d,
            q2 + q1 * d + c * d * d / 2.0,
            q3 + q2 * d + q1 * d * d / 2.0 + c * d * d * d / 6.0,
        ]
    }

    pub fn second_derivative(&self, xi: f64) -> f64 {
        self.eval(xi)[0]
    }

    pub fn first_derivative(&self, xi: f64) -> f64 {
        self.eval(xi)[1]
    }

    pub fn value(&self, xi: f64) -> f64 {
        self.eval(xi)[2]
    }

    /// `∫_{−∞}^{xi} g`, i.e. `∫χ(xi, ξ) g(ξ) dξ`.
    pub fn antiderivative(&self, xi: f64) -> f64 {
        self.eval(xi)[3]
    }

    /// Multiplies `g''` (and hence every primitive) by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let mut out = Self::new(
            self.breakpoints.clone(),
            self.values.iter().map(|v| v * factor).collect(),
        )?;
        out.epsilon = self.epsilon;
        Ok(out)
    }
}

/// The three-plateau test function with `g'' = −ε` on `[−3 − 1/ε, −3)`,
/// `1` on `[−3, −1)` and `−ε` on `[−1, −1 + 1/ε)`. On `[−1, 1]` its first
/// derivative is `1 − ε(θ + 1) ≥ 1 − 2ε`.
pub fn plateau_test_function(epsilon: f64) -> Result<XiTestFunction> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::param(
            "epsilon",
            format!("got {epsilon}; need 0 < epsilon < 1/2 so that -1 + 1/epsilon > 1"),
        ));
    }
    let w = 1.0 / epsilon;
    let mut tf = XiTestFunction::new(vec![-3.0 - w, -3.0, -1.0, -1.0 + w], vec![-epsilon, 1.0, -epsilon])?;
    tf.epsilon = Some(epsilon);
    Ok(tf)
}

/// Midpoint quadrature of `∫χ(θ, ξ) g''(ξ) dξ` on `grid`.
pub fn xi_pairing_quadrature(theta: f64, tf: &XiTestFunction, grid: &XiGrid) -> Result<f64> {
    grid.check_contains(tf)?;
    let (lo, hi) = tf.support();
    let d = grid.d_xi();
    let first = ((lo - grid.xi_min()) / d).floor().max(0.0) as usize;
    let last = (((hi - grid.xi_min()) / d).ceil() as usize).min(grid.cells());
    let mut acc = 0.0;
    for i in first..last {
        let xi = grid.midpoint(i);
        if chi(theta, xi) == 0 {
            break;
        }
        acc += tf.second_derivative(xi);
    }
    Ok(acc * d)
}

/// Exact `∫χ(θ, ξ) g''(ξ) dξ = g'(θ)`.
pub fn reduced_pairing(theta: f64, tf: &XiTestFunction) -> f64 {
    tf.first_derivative(theta)
}

/// Smooth cutoff in time: `1` on `[0, τ − w]`, `0` on `[τ, ∞)`, with a
/// `C^∞` transition built from `e^{−1/s}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeCutoff {
    tau: f64,
    width: f64,
}

impl TimeCutoff {
    /// Requires `0 < width ≤ tau < horizon`.
    pub fn new(tau: f64, width: f64, horizon: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::param("cutoff_width", "must be positive"));
        }
        if !(tau >= width && tau < horizon) {
            return Err(Error::param(
                "tau",
                format!("need cutoff_width <= tau < T (tau = {tau}, width = {width}, T = {horizon})"),
            ));
        }
        Ok(Self { tau, width })
    }

    /// `τ = T/2`, `w = T/64`.
    pub fn default_for(horizon: f64) -> Self {
        Self {
            tau: horizon / 2.0,
            width: horizon / 64.0,
        }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    fn phase(&self, t: f64) -> f64 {
        (t - (self.tau - self.width)) / self.width
    }

    pub fn value(&self, t: f64) -> f64 {
        let s = self.phase(t);
        if s <= 0.0 {
            1.0
        } else if s >= 1.0 {
            0.0
        } else {
            let (a, b) = (flat(s), flat(1.0 - s));
            b / (a + b)
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let s = self.phase(t);
        if s <= 0.0 || s >= 1.0 {
            return 0.0;
        }
        let (a, b) = (flat(s), flat(1.0 - s));
        let ds = a * b * (1.0 / (s * s) + 1.0 / ((1.0 - s) * (1.0 - s))) / ((a + b) * (a + b));
        -ds / self.width
    }

    /// `∫_0^∞ η = τ − w/2`.
    pub fn mass(&self) -> f64 {
        self.tau - self.width / 2.0
    }
}

#[inline]
fn flat(s: f64) -> f64 {
    (-1.0 / s).exp()
}

/// Septic smoothstep on `[0, 1]` with three vanishing derivatives at the ends.
fn smoothstep(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    s.powi(4) * (35.0 + s * (-84.0 + s * (70.0 - 20.0 * s)))
}

fn smoothstep_slope(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        return 0.0;
    }
    140.0 * (s * (1.0 - s)).powi(3)
}

/// `∫_0^s smoothstep`.
fn smoothstep_primitive(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    s.powi(5) * (7.0 + s * (-14.0 + s * (10.0 - 2.5 * s)))
}

/// A `C^3` compactly supported bump `φ`: `1` on `[c − p, c + p]`, smooth
/// ramps of width `r` on either side. Its primitive `Φ` is the profile used
/// in the renormalized equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpProfile {
    center: f64,
    plateau: f64,
    ramp: f64,
}

impl BumpProfile {
    pub fn new(center: f64, plateau: f64, ramp: f64) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::param("center", "must be finite"));
        }
        if !(plateau.is_finite() && plateau >= 0.0) {
            return Err(Error::param("plateau", "must be non-negative"));
        }
        if !(ramp.is_finite() && ramp > 0.0) {
            return Err(Error::param("ramp", "must be positive"));
        }
        Ok(Self { center, plateau, ramp })
    }

    fn rise_start(&self) -> f64 {
        self.center - self.plateau - self.ramp
    }

    /// `φ(ξ)`.
    pub fn bump(&self, xi: f64) -> f64 {
        let (c, p, r) = (self.center, self.plateau, self.ramp);
        if xi <= c {
            smoothstep((xi - self.rise_start()) / r)
        } else {
            smoothstep((c + p + r - xi) / r)
        }
    }

    /// `Φ(ξ) = ∫_{−∞}^ξ φ`.
    pub fn primitive(&self, xi: f64) -> f64 {
        let (c, p, r) = (self.center, self.plateau, self.ramp);
        if xi <= c - p {
            r * smoothstep_primitive((xi - self.rise_start()) / r)
        } else if xi <= c + p {
            r / 2.0 + (xi - (c - p))
        } else {
            r / 2.0 + 2.0 * p + r * (0.5 - smoothstep_primitive((c + p + r - xi) / r))
        }
    }

    /// `Φ''(ξ) = φ'(ξ)`.
    pub fn curvature(&self, xi: f64) -> f64 {
        let (c, p, r) = (self.center, self.plateau, self.ramp);
        if xi <= c - p {
            smoothstep_slope((xi - self.rise_start()) / r) / r
        } else if xi <= c + p {
            0.0
        } else {
            -smoothstep_slope((c + p + r - xi) / r) / r
        }
    }
}

/// A profile `R` applied pointwise to the scalar inside a weak form.
pub trait Renormalizer {
    fn value(&self, s: f64) -> f64;
    /// Second derivative `R''`.
    fn curvature(&self, s: f64) -> f64;
}

impl Renormalizer for XiTestFunction {
    fn value(&self, s: f64) -> f64 {
        self.antiderivative(s)
    }

    fn curvature(&self, s: f64) -> f64 {
        self.first_derivative(s)
    }
}

impl Renormalizer for BumpProfile {
    fn value(&self, s: f64) -> f64 {
        self.primitive(s)
    }

    fn curvature(&self, s: f64) -> f64 {
        BumpProfile::curvature(self, s)
    }
}

/// `η(t) ψ(x)`, the time-space factor of a separable test function.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeTest {
    pub cutoff: TimeCutoff,
    pub space: ScalarField,
}

/// `φ(t, x, ξ) = η(t) ψ(x) g(ξ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableTest {
    pub space_time: SpaceTimeTest,
    pub xi: XiTestFunction,
}

/// The five integrals of a weak form (see the module docs).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WeakFormTerms {
    /// `∫η'∫ψR(θ)`.
    pub time_derivative: f64,
    /// `∫η∫R(θ) u·∇ψ`.
    pub transport: f64,
    /// `κ∫η∫R(θ)Δψ`.
    pub diffusion: f64,
    /// `κ∫η∫ψR''(θ)|∇θ|²`.
    pub defect: f64,
    /// `η(0)∫ψR(θ_0)`.
    pub initial: f64,
}

impl WeakFormTerms {
    /// Residual of the full advection–diffusion form; vanishes for exact
    /// solutions.
    pub fn diffusive_residual(&self) -> f64 {
        self.time_derivative + self.transport + self.diffusion - self.defect + self.initial
    }

    /// Residual of the pure transport form, which omits both `κ` terms.
    pub fn transport_residual(&self) -> f64 {
        self.time_derivative + self.transport + self.initial
    }
}

/// Weak-form terms for several profiles sharing one time-space test, plus
/// the cutoff-weighted dissipation `∫η κ‖∇θ‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct Assembly {
    pub terms: Vec<WeakFormTerms>,
    pub cutoff_dissipation: f64,
}

/// Checks that snapshots start at `t = 0`, reach `τ`, and put at least two
/// points on every velocity segment the cutoff sees.
fn check_coverage(traj: &Trajectory, schedule: &VelocitySchedule, cutoff: &TimeCutoff) -> Result<()> {
    let times: Vec<f64> = traj.times().collect();
    if times.len() < 2 {
        return Err(Error::InsufficientSnapshots {
            found: times.len(),
            needed: 2,
        });
    }
    if times[0] != 0.0 {
        return Err(Error::Schema(format!(
            "first snapshot is at t = {}, expected 0",
            times[0]
        )));
    }
    let last = *times.last().unwrap();
    if last < cutoff.tau() {
        return Err(Error::param(
            "tau",
            format!("cutoff reaches {} but snapshots end at {last}", cutoff.tau()),
        ));
    }
    for seg in schedule.segments() {
        if seg.start >= cutoff.tau() {
            break;
        }
        let found = times.iter().filter(|&&t| t >= seg.start && t <= seg.end).count();
        if found < 2 {
            return Err(Error::InsufficientSnapshots { found, needed: 2 });
        }
    }
    Ok(())
}

/// Evaluates the weak forms of every profile in `profiles` against the
/// time-space test `test` on the stored trajectory, by the trapezoid rule in
/// time and grid quadrature in space. The `η'` term integrates against the
/// exact increments of `η` over each interval, so it telescopes exactly for
/// a constant scalar. Within each snapshot interval the
/// velocity is that of the segment containing the interval midpoint, so
/// intervals should not straddle segment boundaries.
pub fn assemble(
    traj: &Trajectory,
    schedule: &VelocitySchedule,
    test: &SpaceTimeTest,
    profiles: &[&dyn Renormalizer],
    kappa: f64,
) -> Result<Assembly> {
    let cutoff = &test.cutoff;
    check_coverage(traj, schedule, cutoff)?;
    if test.space.grid() != traj.grid {
        return Err(Error::GridMismatch {
            expected: traj.grid.n(),
            found: test.space.grid().n(),
        });
    }
    let psi = &test.space;
    let (psi_x, psi_y) = gradient(psi);
    let lap_psi = laplacian(psi);
    let segments = schedule.segments();
    // u·∇ψ on every segment the cutoff sees; `None` where the flow is at rest.
    let drifts: Vec<Option<ScalarField>> = segments
        .iter()
        .map(|seg| {
            let stage = &schedule.stages()[seg.stage?];
            if seg.start >= cutoff.tau() {
                return None;
            }
            let v = ScalarField::from_fn(psi.grid(), |x, y| {
                let s = match stage.axis {
                    Axis::Horizontal => y,
                    Axis::Vertical => x,
                };
                seg.sign * stage.profile(s)
            });
            let along = match stage.axis {
                Axis::Horizontal => &psi_x,
                Axis::Vertical => &psi_y,
            };
            Some(v.mul_pointwise(along).expect("same grid"))
        })
        .collect();

    let m = profiles.len();
    let mut terms = vec![WeakFormTerms::default(); m];
    let mut prev: Option<Sample> = None;
    let mut d_eta = 0.0;
    let tau = cutoff.tau();
    for (k, snap) in traj.snapshots.iter().enumerate() {
        let t = snap.time;
        let theta = snap.field.values();
        let (gx, gy) = gradient(&snap.field);
        let grad2: Vec<f64> = gx
            .values()
            .iter()
            .zip(gy.values())
            .map(|(a, b)| a * a + b * b)
            .collect();
        let h = traj.grid.spacing().powi(2);
        let mut sample = Sample {
            t,
            eta: cutoff.value(t),
            grad2: grad2.iter().sum::<f64>() * h,
            values: Vec::with_capacity(m),
            smooth: Vec::with_capacity(m),
        };
        for r in profiles {
            let rv: Vec<f64> = theta.iter().map(|&s| r.value(s)).collect();
            let mut a = 0.0;
            let mut c = 0.0;
            let mut e = 0.0;
            for i in 0..theta.len() {
                a += psi.values()[i] * rv[i];
                c += rv[i] * lap_psi.values()[i];
                e += psi.values()[i] * r.curvature(theta[i]) * grad2[i];
            }
            sample.smooth.push([a * h, c * h, e * h]);
            sample.values.push(rv);
        }
        if k == 0 {
            for (term, s) in terms.iter_mut().zip(&sample.smooth) {
                term.initial = sample.eta * s[0];
            }
        }
        if let Some(p) = prev.take() {
            if p.t < tau {
                let dt = t - p.t;
                let mid = 0.5 * (p.t + t);
                let w = segments
                    .iter()
                    .position(|s| mid >= s.start && mid < s.end)
                    .and_then(|i| drifts[i].as_ref());
                for (j, term) in terms.iter_mut().enumerate() {
                    let (a, b) = (&p.smooth[j], &sample.smooth[j]);
                    term.time_derivative += 0.5 * (sample.eta - p.eta) * (a[0] + b[0]);
                    term.diffusion += 0.5 * dt * kappa * (p.eta * a[1] + sample.eta * b[1]);
                    term.defect += 0.5 * dt * kappa * (p.eta * a[2] + sample.eta * b[2]);
                    if let Some(w) = w {
                        let pa = dot(&p.values[j], w.values()) * h;
                        let pb = dot(&sample.values[j], w.values()) * h;
                        term.transport += 0.5 * dt * (p.eta * pa + sample.eta * pb);
                    }
                }
                d_eta += 0.5 * dt * kappa * (p.eta * p.grad2 + sample.eta * sample.grad2);
            }
        }
        prev = Some(sample);
    }
    Ok(Assembly {
        terms,
        cutoff_dissipation: d_eta,
    })
}

struct Sample {
    t: f64,
    eta: f64,
    grad2: f64,
    values: Vec<Vec<f64>>,
    // ∫ψR, ∫RΔψ, ∫ψR''|∇θ|² (without κ).
    smooth: Vec<[f64; 3]>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn unit_test(traj: &Trajectory, cutoff: TimeCutoff) -> SpaceTimeTest {
    SpaceTimeTest {
        cutoff,
        space: ScalarField::constant(traj.grid, 1.0),
    }
}

/// `∫η(t) κ∫|∇θ|² g'(θ) dx dt`, the defect pairing with an `x`-independent
/// test function.
pub fn defect_functional(
    traj: &Trajectory,
    schedule: &VelocitySchedule,
    tf: &XiTestFunction,
    cutoff: TimeCutoff,
    kappa: f64,
) -> Result<f64> {
    let a = assemble(traj, schedule, &unit_test(traj, cutoff), &[tf], kappa)?;
    Ok(a.terms[0].defect)
}

/// `∫η(t) κ‖∇θ‖² dt`.
pub fn cutoff_dissipation(
    traj: &Trajectory,
    schedule: &VelocitySchedule,
    cutoff: TimeCutoff,
    kappa: f64,
) -> Result<f64> {
    let a = assemble(traj, schedule, &unit_test(traj, cutoff), &[], kappa)?;
    Ok(a.cutoff_dissipation)
}

/// Weak residual of the kinetic advection–diffusion equation against `test`.
pub fn weak_residual_kad(
    traj: &Trajectory,
    schedule: &VelocitySchedule,
    test: &SeparableTest,
    kappa: f64,
) -> Result<f64> {
    let a = assemble(traj, schedule, &test.space_time, &[&test.xi], kappa)?;
    Ok(a.terms[0].diffusive_residual())
}

/// Weak residual of the kinetic transport equation (no `κ` terms).
pub fn weak_residual_ktp(traj: &Trajectory, schedule: &VelocitySchedule, test: &SeparableTest) -> Result<f64> {
    let a = assemble(traj, schedule, &test.space_time, &[&test.xi], 0.0)?;
    Ok(a.terms[0].transport_residual())
}

/// Weak residual of the renormalized equation for `Φ = ∫bump`.
pub fn renormalization_residual(
    traj: &Trajectory,
    schedule: &VelocitySchedule,
    bump: &BumpProfile,
    test: &SpaceTimeTest,
    kappa: f64,
) -> Result<f64> {
    let a = assemble(traj, schedule, test, &[bump], kappa)?;
    Ok(a.terms[0].diffusive_residual())
}

/// `∫Φ(θ) dx` at every snapshot.
pub fn renormalized_mass(traj: &Trajectory, bump: &BumpProfile) -> Vec<(f64, f64)> {
    traj.snapshots
        .iter()
        .map(|s| (s.time, integrate(&s.field.map(|v| bump.primitive(v)))))
        .collect()
}
