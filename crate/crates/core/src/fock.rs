//! Truncated Fock-space states and density matrices.
//!
//! A [`StateVector`] holds amplitudes over `|0⟩ … |N−1⟩` and is always
//! normalized. A [`DensityMatrix`] is an `N × N` Hermitian, unit-trace array.
//! Constructors for coherent and cat states check that the truncation at `N`
//! discards less than a tail tolerance of probability and then renormalize,
//! so every invariant holds to rounding error.

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::{Error, Result, C64};

/// Default bound on the probability discarded by Fock truncation.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;

/// Truncation dimension for a state with mean photon number around `|α|²`:
/// `ceil(|α|² + 10·sqrt(|α|² + 1)) + 2`.
///
/// The two spare levels keep the state clear of the top of the space, which
/// the raising Kraus operator would otherwise push population out of.
pub fn default_dim(alpha: C64) -> usize {
    let mean = alpha.norm_sqr();
    (mean + 10.0 * (mean + 1.0).sqrt()).ceil() as usize + 2
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Array1<C64>,
}

impl StateVector {
    /// Normalizes `amps` into a state. Fails on an empty, zero or non-finite
    /// vector.
    pub fn new(amps: Array1<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidDim { dim: 0, min: 1 });
        }
        let norm = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidState(format!(
                "amplitudes cannot be normalized (norm = {norm})"
            )));
        }
        Ok(Self { amps: amps.mapv(|c| c / norm) })
    }

    /// Number state `|n⟩` in a space of dimension `dim`.
    pub fn fock(n: usize, dim: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::InvalidDim { dim, min: n + 1 });
        }
        let mut amps = Array1::zeros(dim);
        amps[n] = C64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> ArrayView1<'_, C64> {
        self.amps.view()
    }

    pub fn amplitude(&self, n: usize) -> C64 {
        self.amps[n]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        check_dims(self.dim(), other.dim())?;
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    elems: Array2<C64>,
}

impl DensityMatrix {
    /// Validates Hermiticity and unit trace. Positivity is not checked here;
    /// see [`DensityMatrix::check_positive`].
    pub fn new(elems: Array2<C64>) -> Result<Self> {
        let (rows, cols) = elems.dim();
        if rows != cols {
            return Err(Error::DimMismatch { expected: rows, found: cols });
        }
        if rows == 0 {
            return Err(Error::InvalidDim { dim: 0, min: 1 });
        }
        let rho = Self { elems };
        let herm = rho.hermiticity_error();
        if !(herm < HERMITIAN_TOL) {
            return Err(Error::InvalidState(format!(
                "matrix is not Hermitian (max deviation {herm:.3e})"
            )));
        }
        let trace = rho.trace();
        if !((trace - 1.0).abs() < TRACE_TOL) {
            return Err(Error::InvalidState(format!("trace {trace} is not 1")));
        }
        Ok(rho)
    }

    pub(crate) fn from_elements_unchecked(elems: Array2<C64>) -> Self {
        debug_assert_eq!(elems.nrows(), elems.ncols());
        Self { elems }
    }

    pub fn dim(&self) -> usize {
        self.elems.nrows()
    }

    pub fn elements(&self) -> ArrayView2<'_, C64> {
        self.elems.view()
    }

    pub fn get(&self, n: usize, m: usize) -> C64 {
        self.elems[[n, m]]
    }

    /// Real part of the trace.
    pub fn trace(&self) -> f64 {
        self.elems.diag().iter().map(|c| c.re).sum()
    }

    /// `Tr ρ²`, computed as the squared Frobenius norm (valid for Hermitian ρ).
    pub fn purity(&self) -> f64 {
        self.elems.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.elems[[i, j]] - self.elems[[j, i]].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue. `O(N³)`; meant for validation, not hot loops.
    pub fn min_eigenvalue(&self) -> f64 {
        let n = self.dim();
        let m = DMatrix::from_fn(n, n, |i, j| self.elems[[i, j]]);
        SymmetricEigen::new(m)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Fails if any eigenvalue is below `-tol`.
    pub fn check_positive(&self, tol: f64) -> Result<()> {
        let min = self.min_eigenvalue();
        if min < -tol {
            return Err(Error::InvalidState(format!(
                "matrix is not positive semidefinite (eigenvalue {min:.3e})"
            )));
        }
        Ok(())
    }

    /// Total population on the `levels` highest Fock levels.
    pub fn top_population(&self, levels: usize) -> f64 {
        let n = self.dim();
        (n.saturating_sub(levels)..n).map(|k| self.elems[[k, k]].re).sum()
    }
}

/// A coherent state or an even/odd cat `𝒩^{1/2}(|α⟩ + r|−α⟩)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatSpec {
    alpha: C64,
    parity_r: i8,
    norm_const: f64,
}

impl CatSpec {
    /// `parity_r` must be `+1` (even cat), `0` (coherent state) or `-1`
    /// (odd cat). The odd cat at `α = 0` does not exist.
    pub fn new(alpha: C64, parity_r: i32) -> Result<Self> {
        if !alpha.re.is_finite() || !alpha.im.is_finite() {
            return Err(Error::InvalidCat(format!("alpha must be finite, got {alpha}")));
        }
        let r = match parity_r {
            -1 | 0 | 1 => parity_r as i8,
            other => {
                return Err(Error::InvalidCat(format!(
                    "parity r must be one of +1, 0, -1, got {other}"
                )))
            }
        };
        let overlap = (-2.0 * alpha.norm_sqr()).exp();
        // 1 + r² + 2r·e^{-2|α|²}; the odd case is written with expm1 to keep
        // precision at small |α|.
        let bracket = match r {
            1 => 2.0 + 2.0 * overlap,
            0 => 1.0,
            _ => -2.0 * (-2.0 * alpha.norm_sqr()).exp_m1(),
        };
        if !(bracket > 0.0) {
            return Err(Error::InvalidCat(format!(
                "odd cat with alpha = {alpha} has zero norm"
            )));
        }
        Ok(Self { alpha, parity_r: r, norm_const: 1.0 / bracket })
    }

    pub fn coherent(alpha: C64) -> Self {
        Self::new(alpha, 0).expect("coherent states are always valid")
    }

    pub fn even(alpha: C64) -> Result<Self> {
        Self::new(alpha, 1)
    }

    pub fn odd(alpha: C64) -> Result<Self> {
        Self::new(alpha, -1)
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    pub fn parity_r(&self) -> i32 {
        self.parity_r as i32
    }

    /// `𝒩 = [1 + r² + 2r·exp(−2|α|²)]⁻¹`.
    pub fn norm_const(&self) -> f64 {
        self.norm_const
    }

    /// `1 + r(−1)ⁿ`: 0, 1 or 2, exactly.
    pub(crate) fn parity_factor(&self, n: usize) -> f64 {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        1.0 + f64::from(self.parity_r) * sign
    }

    /// Photon-number probability `P_n^S` of the untruncated state.
    pub fn photon_probability(&self, n: usize) -> f64 {
        let f = self.parity_factor(n);
        if f == 0.0 {
            return 0.0;
        }
        self.norm_const * f * f * poisson_ln_pmf(self.alpha.norm_sqr(), n).exp()
    }

    /// Probability the untruncated state places on levels `≥ dim`.
    pub fn tail_mass(&self, dim: usize) -> f64 {
        let mean = self.alpha.norm_sqr();
        let mut tail = 0.0;
        let mut n = dim;
        loop {
            let p = self.photon_probability(n);
            tail += p;
            if (n as f64 > mean && p < 1e-30 * tail.max(1e-300)) || n > dim + 100_000 {
                break;
            }
            n += 1;
        }
        tail
    }
}

fn poisson_ln_pmf(mean: f64, n: usize) -> f64 {
    if mean == 0.0 {
        return if n == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    -mean + n as f64 * mean.ln() - crate::special::ln_factorial(n)
}

/// Amplitudes `e^{−|α|²/2} αⁿ/√(n!)` for `n < dim`, by a log-space
/// recurrence on the magnitude with the phase `n·arg α` tracked separately.
fn coherent_coefficients(alpha: C64, dim: usize) -> Array1<C64> {
    let mut out = Array1::zeros(dim);
    if dim == 0 {
        return out;
    }
    let r = alpha.norm();
    if r == 0.0 {
        out[0] = C64::new(1.0, 0.0);
        return out;
    }
    let (ln_r, theta) = (r.ln(), alpha.arg());
    let mut ln_mag = -0.5 * r * r;
    for n in 0..dim {
        if n > 0 {
            ln_mag += ln_r - 0.5 * (n as f64).ln();
        }
        out[n] = C64::from_polar(ln_mag.exp(), n as f64 * theta);
    }
    out
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimMismatch { expected, found });
    }
    Ok(())
}

/// Coherent state `|α⟩` truncated to `dim` levels, with the default tail
/// tolerance.
pub fn make_coherent(alpha: C64, dim: usize) -> Result<StateVector> {
    make_coherent_with_tol(alpha, dim, DEFAULT_TAIL_TOL)
}

pub fn make_coherent_with_tol(alpha: C64, dim: usize, tail_tol: f64) -> Result<StateVector> {
    make_cat_with_tol(&CatSpec::coherent(alpha), dim, tail_tol)
}

/// `𝒩^{1/2}(|α⟩ + r|−α⟩)` truncated to `dim` levels and renormalized.
///
/// For `r = ±1` the amplitudes on the opposite parity sector are exactly
/// zero.
pub fn make_cat(spec: &CatSpec, dim: usize) -> Result<StateVector> {
    make_cat_with_tol(spec, dim, DEFAULT_TAIL_TOL)
}

pub fn make_cat_with_tol(spec: &CatSpec, dim: usize, tail_tol: f64) -> Result<StateVector> {
    if dim < 1 {
        return Err(Error::InvalidDim { dim, min: 1 });
    }
    let tail = spec.tail_mass(dim);
    if !(tail < tail_tol) {
        return Err(Error::TruncationTooSmall { dim, tail, tol: tail_tol });
    }
    let mut amps = coherent_coefficients(spec.alpha, dim);
    for (n, c) in amps.iter_mut().enumerate() {
        *c *= spec.parity_factor(n);
    }
    StateVector::new(amps)
}

/// `|ψ⟩⟨ψ|`.
pub fn pure_density(psi: &StateVector) -> DensityMatrix {
    let a = psi.amplitudes();
    let n = a.len();
    let elems = Array2::from_shape_fn((n, n), |(i, j)| a[i] * a[j].conj());
    DensityMatrix::from_elements_unchecked(elems)
}

/// Convex combination `Σ wᵢ ρᵢ`. Weights must be non-negative and sum to 1
/// within `1e−12`.
pub fn mix(components: &[(f64, &DensityMatrix)]) -> Result<DensityMatrix> {
    let sum: f64 = components.iter().map(|(w, _)| w).sum();
    if components.is_empty()
        || components.iter().any(|(w, _)| !(*w >= 0.0))
        || !((sum - 1.0).abs() <= 1e-12)
    {
        return Err(Error::WeightMismatch { sum });
    }
    let dim = components[0].1.dim();
    let mut acc = Array2::<C64>::zeros((dim, dim));
    for (w, rho) in components {
        check_dims(dim, rho.dim())?;
        acc.scaled_add(C64::new(*w, 0.0), &rho.elems);
    }
    Ok(DensityMatrix::from_elements_unchecked(acc))
}

/// Purity defect `ζ = 1 − Tr ρ²`.
pub fn purity_defect(rho: &DensityMatrix) -> f64 {
    1.0 - rho.purity()
}

/// `⟨ψ|ρ|ψ⟩`.
pub fn fidelity_with_pure(rho: &DensityMatrix, psi: &StateVector) -> Result<f64> {
    check_dims(rho.dim(), psi.dim())?;
    let a = psi.amplitudes();
    let rho_psi = rho.elems.dot(&a);
    Ok(a.iter().zip(rho_psi.iter()).map(|(x, y)| x.conj() * y).sum::<C64>().re)
}

/// Diagonal `ρ_nn`, the photon-number distribution.
pub fn photon_distribution(rho: &DensityMatrix) -> Vec<f64> {
    rho.elems.diag().iter().map(|c| c.re).collect()
}
