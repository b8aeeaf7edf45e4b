//! Periodic uniform grid on the unit torus and the spectral operators that
//! act on fields sampled there.
//!
//! Node `(i, j)` sits at `(x, y) = (i h, j h)` with `h = 1/N`. Values are
//! stored row-major with rows indexed by `j` (constant `y`), so the flat
//! index is `j * N + i`.

pub mod snapshot;
pub(crate) mod spectral;

pub use snapshot::Snapshot;

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use spectral::{assert_real, is_nyquist, plans, wavenumber};

/// Uniform `N × N` grid on `[0, 1)²` with periodic identification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PeriodicGrid {
    n: usize,
}

impl PeriodicGrid {
    /// `n` must be a power of two, at least 4.
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::param(
                "N",
                format!("grid resolution must be a power of two >= 4, got {n}"),
            ));
        }
        Ok(PeriodicGrid { n })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        1.0 / self.n as f64
    }

    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        i as f64 / self.n as f64
    }

    /// Number of nodes, `N²`.
    #[inline]
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    /// Highest frequency a shear profile may carry on this grid.
    #[inline]
    pub fn nyquist(&self) -> usize {
        self.n / 2
    }
}

/// Real scalar field sampled at the nodes of a [`PeriodicGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: PeriodicGrid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn from_values(grid: PeriodicGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Schema(format!(
                "field has {} values, grid N = {} needs {}",
                values.len(),
                grid.n(),
                grid.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Schema(format!("non-finite value at flat index {pos}")));
        }
        Ok(ScalarField { grid, values })
    }

    /// Samples `f(x, y)` at every node.
    pub fn from_fn(grid: PeriodicGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = grid.n();
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..n {
            let y = grid.coord(j);
            for i in 0..n {
                values.push(f(grid.coord(i), y));
            }
        }
        ScalarField { grid, values }
    }

    pub fn constant(grid: PeriodicGrid, c: f64) -> Self {
        ScalarField {
            grid,
            values: vec![c; grid.len()],
        }
    }

    pub(crate) fn from_raw(grid: PeriodicGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        ScalarField { grid, values }
    }

    #[inline]
    pub fn grid(&self) -> PeriodicGrid {
        self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Value at node `(i, j)`, i.e. at `(i h, j h)`.
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.grid.n() + i]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise product.
    pub fn mul_pointwise(&self, other: &ScalarField) -> Result<ScalarField> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn zip_with(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<ScalarField> {
        self.check_same_grid(other)?;
        Ok(ScalarField {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn check_same_grid(&self, other: &ScalarField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch {
                expected: self.grid.n(),
                found: other.grid.n(),
            });
        }
        Ok(())
    }

    /// Normalized Fourier coefficients `c[ky * N + kx]` so that
    /// `f(x, y) = Σ c e^{2πi(kx x + ky y)}`.
    pub fn spectrum(&self) -> Vec<Complex64> {
        let n = self.grid.n();
        let norm = 1.0 / (n * n) as f64;
        let mut c = plans(n).forward_2d(&self.values);
        for z in c.iter_mut() {
            *z *= norm;
        }
        c
    }

    /// Applies the real, even Fourier multiplier `symbol(kx, ky)` (integer
    /// wavenumbers; Nyquist reported as `-N/2`).
    pub fn apply_even_multiplier(&self, symbol: impl Fn(i64, i64) -> f64) -> ScalarField {
        let n = self.grid.n();
        let p = plans(n);
        let mut buf = p.forward_2d(&self.values);
        let mut gain = 0.0f64;
        for my in 0..n {
            let ky = wavenumber(my, n);
            for mx in 0..n {
                let s = symbol(wavenumber(mx, n), ky);
                gain = gain.max(s.abs());
                buf[my * n + mx] *= s;
            }
        }
        let (values, residue) = p.inverse_2d(buf);
        let out = ScalarField::from_raw(self.grid, values);
        assert_real(residue, self.max_abs() * gain.max(1.0), "even multiplier");
        out
    }
}

fn binary(a: &ScalarField, b: &ScalarField, f: impl Fn(f64, f64) -> f64) -> ScalarField {
    assert_eq!(a.grid, b.grid, "field arithmetic across different grids");
    ScalarField {
        grid: a.grid,
        values: a.values.iter().zip(&b.values).map(|(&x, &y)| f(x, y)).collect(),
    }
}

impl Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: &ScalarField) -> ScalarField {
        binary(self, rhs, |a, b| a + b)
    }
}

impl Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: &ScalarField) -> ScalarField {
        binary(self, rhs, |a, b| a - b)
    }
}

impl Mul<f64> for &ScalarField {
    type Output = ScalarField;
    fn mul(self, rhs: f64) -> ScalarField {
        self.map(|v| v * rhs)
    }
}

/// Spectral gradient `(∂x f, ∂y f)`. The Nyquist modes carry no real
/// derivative and are dropped.
pub fn gradient(f: &ScalarField) -> (ScalarField, ScalarField) {
    let grid = f.grid();
    let n = grid.n();
    let p = plans(n);
    let spec = p.forward_2d(f.values());
    let mut dx = spec.clone();
    let mut dy = spec;
    for my in 0..n {
        let ky = if is_nyquist(my, n) { 0 } else { wavenumber(my, n) };
        for mx in 0..n {
            let kx = if is_nyquist(mx, n) { 0 } else { wavenumber(mx, n) };
            let idx = my * n + mx;
            dx[idx] *= Complex64::new(0.0, 2.0 * PI * kx as f64);
            dy[idx] *= Complex64::new(0.0, 2.0 * PI * ky as f64);
        }
    }
    let (gx, rx) = p.inverse_2d(dx);
    let (gy, ry) = p.inverse_2d(dy);
    let scale = f.max_abs() * 2.0 * PI * n as f64;
    assert_real(rx.max(ry), scale, "gradient");
    (ScalarField::from_raw(grid, gx), ScalarField::from_raw(grid, gy))
}

/// Spectral Laplacian, symbol `-4π²(kx² + ky²)`.
pub fn laplacian(f: &ScalarField) -> ScalarField {
    f.apply_even_multiplier(|kx, ky| -4.0 * PI * PI * (kx * kx + ky * ky) as f64)
}

/// `|∇f|²` at every node.
pub fn grad_sq(f: &ScalarField) -> ScalarField {
    let (gx, gy) = gradient(f);
    binary(&gx, &gy, |a, b| a * a + b * b)
}

/// Trapezoid quadrature `h² Σ f`, exact for trigonometric polynomials
/// below Nyquist.
pub fn integrate(f: &ScalarField) -> f64 {
    let h = f.grid().spacing();
    h * h * f.values().iter().sum::<f64>()
}

pub fn mean(f: &ScalarField) -> f64 {
    integrate(f)
}

/// `‖f‖²_{L²}` by periodic trapezoid quadrature.
pub fn l2_norm_sq(f: &ScalarField) -> f64 {
    let h = f.grid().spacing();
    h * h * f.values().iter().map(|v| v * v).sum::<f64>()
}

/// `∫ f g` by periodic trapezoid quadrature.
pub fn inner(f: &ScalarField, g: &ScalarField) -> f64 {
    assert_eq!(f.grid(), g.grid(), "inner product across different grids");
    let h = f.grid().spacing();
    h * h * f.values().iter().zip(g.values()).map(|(a, b)| a * b).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid(n: usize) -> PeriodicGrid {
        PeriodicGrid::new(n).unwrap()
    }

    /// Random real trigonometric polynomial with modes |k| <= kmax, plus its
    /// coefficient list (kx, ky, a, b) for a cos + b sin.
    pub(crate) fn random_trig(g: PeriodicGrid, kmax: i64, seed: u64) -> (ScalarField, Vec<(i64, i64, f64, f64)>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut modes = Vec::new();
        for kx in 0..=kmax {
            for ky in -kmax..=kmax {
                if kx == 0 && ky <= 0 {
                    continue;
                }
                modes.push((kx, ky, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            }
        }
        let m2 = modes.clone();
        let f = ScalarField::from_fn(g, move |x, y| {
            m2.iter()
                .map(|&(kx, ky, a, b)| {
                    let ph = 2.0 * PI * (kx as f64 * x + ky as f64 * y);
                    a * ph.cos() + b * ph.sin()
                })
                .sum()
        });
        (f, modes)
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(PeriodicGrid::new(48).is_err());
        assert!(PeriodicGrid::new(2).is_err());
        assert!(PeriodicGrid::new(64).is_ok());
    }

    #[test]
    fn from_values_validates() {
        let g = grid(4);
        assert!(ScalarField::from_values(g, vec![0.0; 15]).is_err());
        let mut v = vec![0.0; 16];
        v[3] = f64::NAN;
        assert!(ScalarField::from_values(g, v).is_err());
    }

    #[test]
    fn gradient_of_constant_is_zero() {
        let f = ScalarField::constant(grid(32), 1.0);
        let (gx, gy) = gradient(&f);
        assert_eq!(gx.max_abs(), 0.0);
        assert_eq!(gy.max_abs(), 0.0);
        assert_eq!(laplacian(&f).max_abs(), 0.0);
    }

    #[test]
    fn gradient_of_sine() {
        let g = grid(64);
        let f = ScalarField::from_fn(g, |x, _| (2.0 * PI * x).sin());
        let (gx, gy) = gradient(&f);
        let want = ScalarField::from_fn(g, |x, _| 2.0 * PI * (2.0 * PI * x).cos());
        assert!((&gx - &want).max_abs() < 1e-12);
        assert!(gy.max_abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_centered_differences_at_second_order() {
        // Oracle: centered differences of the analytic function, independent
        // of any transform. Error of the oracle itself is O(h²).
        let fun = |x: f64, y: f64| (2.0 * PI * x).sin() * (4.0 * PI * y).cos();
        let mut errs = Vec::new();
        for n in [32usize, 64] {
            let g = grid(n);
            let h = g.spacing();
            let f = ScalarField::from_fn(g, fun);
            let (gx, gy) = gradient(&f);
            let fdx = ScalarField::from_fn(g, |x, y| (fun(x + h, y) - fun(x - h, y)) / (2.0 * h));
            let fdy = ScalarField::from_fn(g, |x, y| (fun(x, y + h) - fun(x, y - h)) / (2.0 * h));
            errs.push((&gx - &fdx).max_abs().max((&gy - &fdy).max_abs()));
        }
        let order = (errs[0] / errs[1]).log2();
        assert!(order >= 1.95, "observed order {order}");
    }

    #[test]
    fn norms_and_means_of_simple_fields() {
        let g = grid(32);
        assert_eq!(l2_norm_sq(&ScalarField::constant(g, 1.0)), 1.0);
        let s = ScalarField::from_fn(g, |x, _| (2.0 * PI * x).sin());
        assert!((l2_norm_sq(&s) - 0.5).abs() < 1e-15);
        assert!(mean(&s).abs() < 1e-16);
        assert!((mean(&ScalarField::constant(g, 2.5)) - 2.5).abs() < 1e-15);
        let t = ScalarField::from_fn(g, |_, y| 0.3 + (2.0 * PI * y).sin());
        assert!((mean(&t) - 0.3).abs() < 1e-14);
    }

    #[test]
    fn laplacian_of_eigenfunction() {
        let g = grid(64);
        let f = ScalarField::from_fn(g, |x, _| (2.0 * PI * x).sin());
        let want = &f * (-4.0 * PI * PI);
        assert!((&laplacian(&f) - &want).max_abs() < 1e-11);
    }

    #[test]
    fn parseval_holds_at_every_resolution() {
        // Oracle: sum of squared coefficients of the random trigonometric
        // polynomial, known from construction.
        for (idx, n) in [32usize, 64, 128, 256].into_iter().enumerate() {
            let (f, modes) = random_trig(grid(n), 6, idx as u64);
            let exact: f64 = modes.iter().map(|&(_, _, a, b)| 0.5 * (a * a + b * b)).sum();
            let quad = l2_norm_sq(&f);
            let coef: f64 = f.spectrum().iter().map(|c| c.norm_sqr()).sum();
            assert!((quad - exact).abs() <= 1e-12 * exact);
            assert!((coef - exact).abs() <= 1e-12 * exact);
        }
    }

    #[test]
    fn laplacian_equals_divergence_of_gradient() {
        let (f, _) = random_trig(grid(64), 10, 7);
        let (gx, gy) = gradient(&f);
        let (gxx, _) = gradient(&gx);
        let (_, gyy) = gradient(&gy);
        let lap = laplacian(&f);
        let diff = (&(&gxx + &gyy) - &lap).max_abs();
        assert!(diff <= 1e-12 * lap.max_abs(), "diff {diff}");
    }

    #[test]
    fn gradient_components_have_zero_mean() {
        let (f, _) = random_trig(grid(64), 8, 3);
        let (gx, gy) = gradient(&f);
        assert!(mean(&gx).abs() < 1e-13);
        assert!(mean(&gy).abs() < 1e-13);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn operators_are_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, s1 in 0u64..1000, s2 in 0u64..1000) {
            let g = grid(32);
            let (f, _) = random_trig(g, 5, s1);
            let (h, _) = random_trig(g, 5, s2);
            let comb = &(&f * a) + &(&h * b);
            let lin = |op: &dyn Fn(&ScalarField) -> ScalarField| {
                let lhs = op(&comb);
                let rhs = &(&op(&f) * a) + &(&op(&h) * b);
                (&lhs - &rhs).max_abs() / lhs.max_abs().max(1e-300)
            };
            prop_assert!(lin(&|x| gradient(x).0) <= 1e-12);
            prop_assert!(lin(&|x| gradient(x).1) <= 1e-12);
            prop_assert!(lin(&laplacian) <= 1e-12);
        }
    }
}
