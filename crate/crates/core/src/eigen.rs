//! Top eigenpairs of the symmetric tridiagonal matrices behind the optimal
//! ancilla state.
//!
//! For `n` ancilla pairs the expected squared fidelity of the `|+⟩` input is
//! the quadratic form `fᵀ·A·f` with `A = ¼·tridiag(1, [1,2,…,2,1], 1)` of size
//! `(n+1)×(n+1)`. Its largest eigenvalue `λ_n` is the best achievable success
//! probability and its Perron eigenvector gives the coefficients `f(0..=n)`.
//! The 0/1 path-graph matrix `B` of size `n×n` has top eigenvalue
//! `μ_n = 2·cos(π/(n+1))` and `λ_n = ½ + μ_n/4`.
//!
//! The solver is bisection on Sturm counts for the eigenvalue followed by
//! inverse iteration (pivoted tridiagonal LU) for the eigenvector. Both are
//! deterministic.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Default bisection width for [`largest_eigenpair`].
pub const DEFAULT_TOL: f64 = 1e-12;

/// Residual `‖M·v − λ·v‖∞` every returned [`EigenPair`] satisfies.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Inverse-iteration step budget.
pub const MAX_INVERSE_ITERATIONS: usize = 50;

/// Minimum bisection step budget; the per-matrix cap is `max(10·m, this)`.
pub const MIN_BISECTION_STEPS: usize = 128;

/// Real symmetric tridiagonal matrix stored as its diagonal and first
/// off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::MalformedMatrix("empty diagonal".into()));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::MalformedMatrix(format!(
                "off-diagonal has length {} for a {}×{} matrix",
                offdiag.len(),
                diag.len(),
                diag.len()
            )));
        }
        if diag.iter().chain(&offdiag).any(|x| !x.is_finite()) {
            return Err(Error::MalformedMatrix("non-finite entry".into()));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// Entry `(i, j)` of the full matrix.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.abs_diff(j) {
            0 => self.diag[i],
            1 => self.offdiag[i.min(j)],
            _ => 0.0,
        }
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let m = self.dim();
        assert_eq!(v.len(), m, "vector length must match matrix dimension");
        (0..m)
            .map(|i| {
                let mut acc = self.diag[i] * v[i];
                if i > 0 {
                    acc += self.offdiag[i - 1] * v[i - 1];
                }
                if i + 1 < m {
                    acc += self.offdiag[i] * v[i + 1];
                }
                acc
            })
            .collect()
    }

    /// Gershgorin enclosure `[lo, hi]` of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let m = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..m {
            let left = if i > 0 {
                self.offdiag[i - 1].abs()
            } else {
                0.0
            };
            let right = if i + 1 < m {
                self.offdiag[i].abs()
            } else {
                0.0
            };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// Number of eigenvalues below `x`, from the signs of the LDLᵀ pivots of
    /// `M − x·I`.
    pub fn sturm_count(&self, x: f64) -> usize {
        let pivmin = f64::MIN_POSITIVE * self.offdiag.iter().fold(1.0_f64, |acc, e| acc.max(e * e));
        let mut count = 0;
        let mut q = self.diag[0] - x;
        for i in 0..self.dim() {
            if i > 0 {
                q = (self.diag[i] - x) - self.offdiag[i - 1] * self.offdiag[i - 1] / q;
            }
            if q.abs() <= pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn max_abs_row_sum(&self) -> f64 {
        let m = self.dim();
        (0..m)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.offdiag[i - 1].abs();
                }
                if i + 1 < m {
                    s += self.offdiag[i].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }
}

/// An eigenvalue with a unit-norm eigenvector.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
}

impl EigenPair {
    /// `‖M·v − λ·v‖∞`.
    pub fn residual(&self, m: &SymTridiagonal) -> f64 {
        m.mul_vec(&self.vector)
            .iter()
            .zip(&self.vector)
            .map(|(mv, v)| (mv - self.value * v).abs())
            .fold(0.0, f64::max)
    }
}

/// Normalized real coefficients `(f(0), …, f(n))` of the ancilla state.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientProfile {
    f: Vec<f64>,
}

impl CoefficientProfile {
    /// Tolerance on `Σ f(i)² = 1`.
    pub const NORM_TOL: f64 = 1e-12;

    /// Wraps an already normalized coefficient vector of length `n + 1 ≥ 2`.
    pub fn new(f: Vec<f64>) -> Result<Self> {
        Self::check_shape(&f)?;
        let norm_sq: f64 = f.iter().map(|x| x * x).sum();
        if (norm_sq - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self { f })
    }

    /// Normalizes `values` and returns the profile together with `|‖values‖₂ − 1|`.
    pub fn normalized(values: Vec<f64>) -> Result<(Self, f64)> {
        Self::check_shape(&values)?;
        let norm = values.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidProfile("all coefficients are zero".into()));
        }
        let f = values.iter().map(|x| x / norm).collect();
        Ok((Self { f }, (norm - 1.0).abs()))
    }

    fn check_shape(f: &[f64]) -> Result<()> {
        if f.len() < 2 {
            return Err(Error::InvalidProfile(format!(
                "need at least 2 coefficients (n >= 1), got {}",
                f.len()
            )));
        }
        if f.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidProfile("non-finite coefficient".into()));
        }
        Ok(())
    }

    /// Number of ancilla pairs; the profile has `n + 1` entries.
    pub fn n(&self) -> usize {
        self.f.len() - 1
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.f
    }

    /// `f(i)` with `f(−1) = f(n+1) = 0`.
    pub fn at(&self, i: isize) -> f64 {
        usize::try_from(i)
            .ok()
            .and_then(|i| self.f.get(i).copied())
            .unwrap_or(0.0)
    }

    pub fn is_palindromic(&self, tol: f64) -> bool {
        self.f
            .iter()
            .zip(self.f.iter().rev())
            .all(|(a, b)| (a - b).abs() <= tol)
    }
}

/// `A = ¼·tridiag(1, [1, 2, …, 2, 1], 1)`, size `(n+1)×(n+1)`.
pub fn build_matrix_a(n: usize) -> Result<SymTridiagonal> {
    if n == 0 {
        return Err(Error::ZeroN);
    }
    let mut diag = vec![0.5; n + 1];
    diag[0] = 0.25;
    diag[n] = 0.25;
    SymTridiagonal::new(diag, vec![0.25; n])
}

/// Adjacency matrix of the path graph on `n` vertices.
pub fn build_matrix_b(n: usize) -> Result<SymTridiagonal> {
    if n == 0 {
        return Err(Error::ZeroN);
    }
    SymTridiagonal::new(vec![0.0; n], vec![1.0; n - 1])
}

/// Algebraically largest eigenvalue of `m` with a unit eigenvector whose
/// largest-magnitude entry is positive.
///
/// The eigenvalue is bracketed by bisection until the bracket is narrower
/// than `tol` (or stops shrinking in floating point), with at most
/// `max(10·dim, MIN_BISECTION_STEPS)` steps. The eigenvector comes from at
/// most [`MAX_INVERSE_ITERATIONS`] steps of shifted inverse iteration and
/// the returned value is its Rayleigh quotient. Running out of either budget
/// is reported as [`Error::NonConvergence`].
pub fn largest_eigenpair(m: &SymTridiagonal, tol: f64) -> Result<EigenPair> {
    assert!(tol > 0.0, "tolerance must be positive");
    let dim = m.dim();
    let (g_lo, g_hi) = m.gershgorin();
    let pad = 1e-3 * (g_hi - g_lo).max(g_hi.abs()).max(1.0);
    // count(lo) < dim and count(hi) == dim
    let mut lo = g_lo - pad;
    let mut hi = g_hi + pad;

    let cap = (10 * dim).max(MIN_BISECTION_STEPS);
    let mut steps = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if steps == cap {
            return Err(Error::NonConvergence {
                iterations: steps,
                residual: hi - lo,
            });
        }
        if m.sturm_count(mid) == dim {
            hi = mid;
        } else {
            lo = mid;
        }
        steps += 1;
    }
    let shift = 0.5 * (lo + hi);

    let scale = m.max_abs_row_sum().max(1.0);
    let lu = ShiftedLu::factor(m, shift, f64::EPSILON * scale);
    let mut v = vec![1.0 / (dim as f64).sqrt(); dim];
    let mut residual = f64::INFINITY;
    for step in 0..MAX_INVERSE_ITERATIONS {
        let mut y = lu.solve(&v);
        let norm = y.iter().map(|x| x * x).sum::<f64>().sqrt();
        y.iter_mut().for_each(|x| *x /= norm);
        v = y;

        let mv = m.mul_vec(&v);
        let rq: f64 = mv.iter().zip(&v).map(|(a, b)| a * b).sum();
        residual = mv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - rq * b).abs())
            .fold(0.0, f64::max);
        // one extra solve past the first acceptable residual sharpens the vector
        if step > 0 && residual <= 0.1 * RESIDUAL_TOL {
            let value = if (lo..=hi).contains(&rq) { rq } else { shift };
            orient(&mut v);
            return Ok(EigenPair { value, vector: v });
        }
    }
    Err(Error::NonConvergence {
        iterations: MAX_INVERSE_ITERATIONS,
        residual,
    })
}

fn orient(v: &mut [f64]) {
    let pivot = v.iter().copied().fold(
        0.0_f64,
        |best, x| if x.abs() > best.abs() { x } else { best },
    );
    if pivot < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Partial-pivot LU of `M − σ·I` in the LAPACK `gttrf` layout.
struct ShiftedLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn factor(m: &SymTridiagonal, shift: f64, tiny: f64) -> Self {
        let n = m.dim();
        let mut d: Vec<f64> = m.diag.iter().map(|x| x - shift).collect();
        let mut dl = m.offdiag.clone();
        let mut du = m.offdiag.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        Self {
            dl,
            d,
            du,
            du2,
            swapped,
        }
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        let mut b = rhs.to_vec();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        for i in (0..n).rev() {
            let mut acc = b[i];
            if i + 1 < n {
                acc -= self.du[i] * b[i + 1];
            }
            if i + 2 < n {
                acc -= self.du2[i] * b[i + 2];
            }
            b[i] = acc / self.d[i];
        }
        b
    }
}

/// `½ + ½·cos(π/(n+1))`.
pub fn closed_form_lambda(n: usize) -> f64 {
    0.5 + 0.5 * (PI / (n as f64 + 1.0)).cos()
}

/// `2·cos(π/(n+1))`, the top eigenvalue of [`build_matrix_b`].
pub fn closed_form_mu(n: usize) -> f64 {
    2.0 * (PI / (n as f64 + 1.0)).cos()
}

/// Perron eigenvector of `A(n)`: the coefficients maximizing the `|+⟩`
/// success probability.
pub fn optimal_profile(n: usize, tol: f64) -> Result<CoefficientProfile> {
    let a = build_matrix_a(n)?;
    let pair = largest_eigenpair(&a, tol)?;
    Ok(CoefficientProfile { f: pair.vector })
}

/// The original KLM choice `f(i) = 1/√(n+1)`.
pub fn uniform_profile(n: usize) -> Result<CoefficientProfile> {
    if n == 0 {
        return Err(Error::ZeroN);
    }
    let c = 1.0 / ((n + 1) as f64).sqrt();
    Ok(CoefficientProfile { f: vec![c; n + 1] })
}
