//! FFT plumbing shared by the grid operators and the time stepper.
//!
//! Complex buffers are square `n × n`, row-major. Transforms are
//! unnormalized in the forward direction; `inverse` divides by `n` per axis.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Tolerated ratio of the imaginary residue to the field scale after an
/// inverse transform of a Hermitian spectrum.
pub const IMAG_RESIDUE_TOL: f64 = 1e-13;

pub struct Plans {
    pub n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

static PLANS: OnceLock<Mutex<HashMap<usize, Arc<Plans>>>> = OnceLock::new();

/// Cached forward/inverse plans for length `n`.
pub fn plans(n: usize) -> Arc<Plans> {
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans {
                n,
                fwd: planner.plan_fft_forward(n),
                inv: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

impl Plans {
    pub fn scratch(&self) -> Vec<Complex64> {
        let len = self
            .fwd
            .get_inplace_scratch_len()
            .max(self.inv.get_inplace_scratch_len());
        vec![Complex64::default(); len]
    }

    /// Forward transform of every length-`n` row of `buf`.
    pub fn rows_forward(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.fwd.process_with_scratch(buf, scratch);
    }

    /// Inverse transform of every row, normalized by `1/n`.
    pub fn rows_inverse(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.inv.process_with_scratch(buf, scratch);
        let s = 1.0 / self.n as f64;
        for z in buf.iter_mut() {
            *z *= s;
        }
    }

    /// Inverse row transforms without the `1/n` normalization.
    pub fn rows_inverse_raw(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.inv.process_with_scratch(buf, scratch);
    }

    /// Full 2D forward transform in canonical layout: `out[ky * n + kx]`.
    pub fn forward_2d(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut scratch = self.scratch();
        self.rows_forward(&mut buf, &mut scratch);
        transpose(&mut buf, self.n);
        self.rows_forward(&mut buf, &mut scratch);
        transpose(&mut buf, self.n);
        buf
    }

    /// Inverse of [`Plans::forward_2d`], returning the real part together
    /// with the largest imaginary magnitude encountered.
    pub fn inverse_2d(&self, mut buf: Vec<Complex64>) -> (Vec<f64>, f64) {
        let mut scratch = self.scratch();
        self.rows_inverse(&mut buf, &mut scratch);
        transpose(&mut buf, self.n);
        self.rows_inverse(&mut buf, &mut scratch);
        transpose(&mut buf, self.n);
        split_real(&buf)
    }
}

pub fn split_real(buf: &[Complex64]) -> (Vec<f64>, f64) {
    let mut residue = 0.0f64;
    let re = buf
        .iter()
        .map(|z| {
            residue = residue.max(z.im.abs());
            z.re
        })
        .collect();
    (re, residue)
}

/// Panics when the imaginary residue is not negligible. A large residue
/// means a multiplier broke Hermitian symmetry, i.e. a wavenumber bug.
pub fn assert_real(residue: f64, scale: f64, what: &str) {
    assert_real_within(residue, scale, IMAG_RESIDUE_TOL, what);
}

pub fn assert_real_within(residue: f64, scale: f64, tol: f64, what: &str) {
    let scale = scale.max(f64::MIN_POSITIVE);
    assert!(
        residue <= tol * scale,
        "{what}: imaginary residue {residue:e} exceeds {tol:e} x scale {scale:e}"
    );
}

/// Signed integer wavenumber of FFT index `m`. The Nyquist index maps to
/// `-n/2`; callers that care about its sign handle it explicitly.
#[inline]
pub fn wavenumber(m: usize, n: usize) -> i64 {
    if m < n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

#[inline]
pub fn is_nyquist(m: usize, n: usize) -> bool {
    m == n / 2
}

/// In-place transpose of a square `n × n` buffer.
pub fn transpose<T: Copy>(buf: &mut [T], n: usize) {
    const BLOCK: usize = 32;
    debug_assert_eq!(buf.len(), n * n);
    for bi in (0..n).step_by(BLOCK) {
        for bj in (bi..n).step_by(BLOCK) {
            for i in bi..(bi + BLOCK).min(n) {
                let j0 = if bi == bj { i + 1 } else { bj };
                for j in j0..(bj + BLOCK).min(n) {
                    buf.swap(i * n + j, j * n + i);
                }
            }
        }
    }
}
