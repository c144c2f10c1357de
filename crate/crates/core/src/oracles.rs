//! Closed-form series for the coherent-state mixture and for cat states.
//!
//! Nothing here touches the density-matrix engine: every quantity is a
//! Poisson-weighted scalar sum, so these functions serve as an independent
//! cross-check of [`crate::dynamics`].

use std::f64::consts::{FRAC_PI_2, PI};

use ndarray::Array1;

use crate::special::ln_factorial_table;
use crate::{CatSpec, Error, Result, C64, DEFAULT_TAIL_TOL};

/// Poisson weights `P_n = e^{−|α|²}|α|^{2n}/n!` for `n < n_terms`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonWeights {
    alpha: f64,
    terms: Vec<f64>,
}

impl PoissonWeights {
    /// Fails with `TruncationTooSmall` when the weights beyond `n_terms`
    /// carry more than `1e−12` of probability.
    pub fn new(alpha: f64, n_terms: usize) -> Result<Self> {
        let mean = alpha * alpha;
        let tail = poisson_tail(mean, n_terms);
        if !(tail < DEFAULT_TAIL_TOL) {
            return Err(Error::TruncationTooSmall { dim: n_terms, tail, tol: DEFAULT_TAIL_TOL });
        }
        let ln_fact = ln_factorial_table(n_terms);
        let terms = (0..n_terms).map(|n| poisson_pmf(mean, n, ln_fact[n])).collect();
        Ok(Self { alpha, terms })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn terms(&self) -> &[f64] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

fn poisson_pmf(mean: f64, n: usize, ln_n_fact: f64) -> f64 {
    if mean == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    (-mean + n as f64 * mean.ln() - ln_n_fact).exp()
}

/// `Σ_{n ≥ from} P_n` for a Poisson law of the given mean.
fn poisson_tail(mean: f64, from: usize) -> f64 {
    if mean == 0.0 {
        return if from == 0 { 1.0 } else { 0.0 };
    }
    let mut ln_p = -mean + from as f64 * mean.ln() - crate::special::ln_factorial(from);
    let mut tail = 0.0;
    let mut n = from;
    loop {
        let p = ln_p.exp();
        tail += p;
        n += 1;
        if (n as f64 > mean && p <= 1e-30 * tail.max(f64::MIN_POSITIVE)) || n > from + 100_000 {
            break;
        }
        ln_p += mean.ln() - (n as f64).ln();
    }
    tail
}

/// Field purity defect `ζ(τ)` for the mixture `½(|α⟩⟨α| + |−α⟩⟨−α|)` under
/// intensity-dependent evolution with the atom initially excited.
///
/// `ζ = 1 − ½(T₁₊² + T₁₋² + T₂₊² + T₂₋² + 2|T₃₊|² + 2|T₃₋|²)` with
///
/// ```text
/// T₁± = Σ Pₙ (±1)ⁿ     cos²(τ(n+1))
/// T₂± = Σ Pₙ (±1)ⁿ⁺¹   (n/α²) sin²(τn)
/// T₃± = Σ Pₙ (±1)ⁿ⁺¹   cos(τ(n+1)) (i√n/α) sin(τn)
/// ```
///
/// The `½` is the mixing weight squared times the two orderings of each
/// pair of branches.
pub fn purity_mixture_closed(alpha: f64, tau: f64, n_terms: usize) -> Result<f64> {
    let a = alpha.abs();
    let weights = PoissonWeights::new(a, n_terms)?;
    let (mut t1, mut t2, mut t3) = ([0.0f64; 2], [0.0f64; 2], [0.0f64; 2]);
    for (n, &p) in weights.terms().iter().enumerate() {
        let nf = n as f64;
        let c = (tau * (nf + 1.0)).cos();
        let s = (tau * nf).sin();
        // n/α² · Pₙ and √n/α · Pₙ, with the n = 0 terms equal to 0. At α = 0
        // they tend to δ_{n,1} and 0.
        let (w2, w3) = if n == 0 {
            (0.0, 0.0)
        } else if a == 0.0 {
            (if n == 1 { 1.0 } else { 0.0 }, 0.0)
        } else {
            (nf / (a * a) * p, nf.sqrt() / a * p)
        };
        let alt = if n % 2 == 0 { 1.0 } else { -1.0 };
        for (k, sign_n) in [1.0, alt].into_iter().enumerate() {
            // k = 0: (+1)ⁿ, k = 1: (−1)ⁿ
            let sign_n1 = if k == 0 { 1.0 } else { -alt };
            t1[k] += p * sign_n * c * c;
            t2[k] += w2 * sign_n1 * s * s;
            t3[k] += w3 * sign_n1 * c * s;
        }
    }
    let sum = t1[0].powi(2) + t1[1].powi(2) + t2[0].powi(2) + t2[1].powi(2)
        + 2.0 * t3[0].powi(2)
        + 2.0 * t3[1].powi(2);
    Ok(1.0 - 0.5 * sum)
}

/// Closed-form atomic inversion for an initial coherent (`r = 0`), even
/// (`r = 1`) or odd (`r = −1`) cat field and an excited atom:
///
/// ```text
/// W(τ) = [1 + r² + 2r e^{−2α²}]⁻¹ { (1 + r²) e^{−2α² sin²τ} cos(α² sin 2τ + 2τ)
///                                   + 2r e^{−2α² cos²τ} cos(α² sin 2τ − 2τ) }
/// ```
pub fn inversion_cat_closed(alpha: f64, parity_r: i32, tau: f64) -> Result<f64> {
    CatSpec::new(C64::new(alpha, 0.0), parity_r)?;
    let r = f64::from(parity_r);
    let a2 = alpha * alpha;
    let bracket = (1.0 + r * r) + 2.0 * r * (-2.0 * a2).exp();
    let (s, c) = tau.sin_cos();
    let phase = a2 * (2.0 * tau).sin();
    let direct = (1.0 + r * r) * (-2.0 * a2 * s * s).exp() * (phase + 2.0 * tau).cos();
    let crossed = 2.0 * r * (-2.0 * a2 * c * c).exp() * (phase - 2.0 * tau).cos();
    Ok((direct + crossed) / bracket)
}

/// Unnormalized `A|Φ⟩` and `B|Φ⟩` for the cat `|Φ⟩ = 𝒩^{1/2}(|α⟩ + r|−α⟩)`:
///
/// ```text
/// ⟨n|A|Φ⟩ = φₙ cos(τ(n+1))
/// ⟨n|B|Φ⟩ = −i φₙ₋₁ sin(τn)
///         = −i 𝒩^{1/2} (√n/α) e^{−|α|²/2} αⁿ/√(n!) [1 − r(−1)ⁿ] sin(τn)
/// ```
///
/// where `φₙ = 𝒩^{1/2} e^{−|α|²/2} αⁿ/√(n!) [1 + r(−1)ⁿ]` are the untruncated
/// cat amplitudes. The B-branch is evaluated on the shifted index so that
/// `α = 0` needs no special case.
pub fn evolved_cat_branches(
    spec: &CatSpec,
    tau: f64,
    dim: usize,
) -> Result<(Array1<C64>, Array1<C64>)> {
    if dim < 2 {
        return Err(Error::InvalidDim { dim, min: 2 });
    }
    // the B-branch reads one level below the top
    let tail = spec.tail_mass(dim - 1);
    if !(tail < DEFAULT_TAIL_TOL) {
        return Err(Error::TruncationTooSmall { dim: dim - 1, tail, tol: DEFAULT_TAIL_TOL });
    }
    let phi = cat_series(spec, dim);
    let a_branch = Array1::from_shape_fn(dim, |n| phi[n] * (tau * (n as f64 + 1.0)).cos());
    let b_branch = Array1::from_shape_fn(dim, |n| {
        if n == 0 {
            C64::new(0.0, 0.0)
        } else {
            phi[n - 1] * C64::new(0.0, -(tau * n as f64).sin())
        }
    });
    Ok((a_branch, b_branch))
}

fn cat_series(spec: &CatSpec, len: usize) -> Vec<C64> {
    let alpha = spec.alpha();
    let r = f64::from(spec.parity_r());
    let a2 = alpha.norm_sqr();
    let ln_fact = ln_factorial_table(len);
    let prefactor = spec.norm_const().sqrt();
    (0..len)
        .map(|n| {
            let parity = 1.0 + r * if n % 2 == 0 { 1.0 } else { -1.0 };
            if parity == 0.0 {
                return C64::new(0.0, 0.0);
            }
            let coherent = if a2 == 0.0 {
                if n == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }
            } else {
                let ln_mag = -0.5 * a2 + n as f64 * alpha.norm().ln() - 0.5 * ln_fact[n];
                C64::from_polar(ln_mag.exp(), n as f64 * alpha.arg())
            };
            coherent * (prefactor * parity)
        })
        .collect()
}

/// First revival time of the atomic inversion in the intensity-dependent
/// model: `π/λ` for a coherent field, `π/(2λ)` for even and odd cats, whose
/// occupied Rabi frequencies are twice as far apart.
pub fn revival_time(spec: &CatSpec, lambda: f64) -> f64 {
    match spec.parity_r() {
        0 => PI / lambda,
        _ => FRAC_PI_2 / lambda,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn real(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn norm_sqr(v: &Array1<C64>) -> f64 {
        v.iter().map(|c| c.norm_sqr()).sum()
    }

    #[test]
    fn poisson_weights() {
        let w = PoissonWeights::new(5.0, 78).unwrap();
        assert_eq!(w.len(), 78);
        assert_abs_diff_eq!(w.terms().iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        assert!(w.terms().iter().all(|&p| p >= 0.0));
        assert!(matches!(PoissonWeights::new(5.0, 40), Err(Error::TruncationTooSmall { .. })));
        let vac = PoissonWeights::new(0.0, 1).unwrap();
        assert_eq!(vac.terms(), &[1.0]);
    }

    #[test]
    fn mixture_purity_at_zero() {
        assert_abs_diff_eq!(purity_mixture_closed(5.0, 0.0, 78).unwrap(), 0.5, epsilon = 1e-10);
    }

    #[test]
    fn mixture_purifies_at_half_revival() {
        let zeta = purity_mixture_closed(5.0, FRAC_PI_2, 78).unwrap();
        assert!(zeta < 0.02, "zeta(pi/2) = {zeta}");
    }

    #[test]
    fn vacuum_mixture_matches_rabi_formula() {
        // the "mixture" is the vacuum: field is cos τ|0⟩ ⊕ sin τ|1⟩ incoherently
        let tau: f64 = 0.6;
        let (c2, s2) = (tau.cos().powi(2), tau.sin().powi(2));
        let expected = 1.0 - (c2 * c2 + s2 * s2);
        assert_abs_diff_eq!(purity_mixture_closed(0.0, tau, 4).unwrap(), expected, epsilon = 1e-15);
    }

    #[test]
    fn inversion_starts_at_one() {
        for (alpha, r) in [(5.0, 1), (5.0, 0), (5.0, -1), (0.3, -1), (2.0, 1)] {
            assert_eq!(inversion_cat_closed(alpha, r, 0.0).unwrap(), 1.0);
        }
        assert!(matches!(inversion_cat_closed(0.0, -1, 0.3), Err(Error::InvalidCat(_))));
        assert!(matches!(inversion_cat_closed(1.0, 3, 0.3), Err(Error::InvalidCat(_))));
    }

    #[test]
    fn coherent_inversion_matches_fock_sum() {
        let w = PoissonWeights::new(5.0, 100).unwrap();
        for tau in [0.1, 0.5, 1.0] {
            let fock_sum: f64 = w
                .terms()
                .iter()
                .enumerate()
                .map(|(n, p)| p * (2.0 * tau * (n as f64 + 1.0)).cos())
                .sum();
            let closed = inversion_cat_closed(5.0, 0, tau).unwrap();
            let printed = (-50.0 * tau.sin().powi(2)).exp() * (25.0 * (2.0 * tau).sin() + 2.0 * tau).cos();
            assert_abs_diff_eq!(closed, fock_sum, epsilon = 1e-12);
            assert_abs_diff_eq!(closed, printed, epsilon = 1e-15);
        }
    }

    #[test]
    fn even_cat_flips_at_half_revival() {
        let w = inversion_cat_closed(5.0, 1, FRAC_PI_2).unwrap();
        let e50 = (-50f64).exp();
        let c2 = FRAC_PI_2.cos().powi(2);
        let expected = (2.0 * e50 * (25.0 * PI.sin() + PI).cos()
            + 2.0 * (-50.0 * c2).exp() * (25.0 * PI.sin() - PI).cos())
            / (2.0 + 2.0 * e50);
        assert_abs_diff_eq!(w, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w, expected, epsilon = 1e-15);
    }

    #[test]
    fn branches_at_zero() {
        let spec = CatSpec::even(real(2.0)).unwrap();
        let (a, b) = evolved_cat_branches(&spec, 0.0, 40).unwrap();
        let phi = crate::make_cat(&spec, 40).unwrap();
        for n in 0..40 {
            assert_abs_diff_eq!((a[n] - phi.amplitude(n)).norm(), 0.0, epsilon = 1e-12);
        }
        assert!(b.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn even_cat_branches_at_half_revival() {
        let spec = CatSpec::even(real(5.0)).unwrap();
        let (a, b) = evolved_cat_branches(&spec, FRAC_PI_2, 78).unwrap();
        assert!(norm_sqr(&a) < 0.01);
        assert_abs_diff_eq!(norm_sqr(&a) + norm_sqr(&b), 1.0, epsilon = 1e-10);
        // B-branch is a†-dressed, so it only approximates the odd cat at iα.
        let target = crate::make_cat(&CatSpec::odd(C64::new(0.0, 5.0)).unwrap(), 78).unwrap();
        let overlap: C64 = b.iter().zip(target.amplitudes().iter()).map(|(x, y)| y.conj() * x).sum();
        assert_abs_diff_eq!(overlap.norm_sqr() / norm_sqr(&b), 0.98984056, epsilon = 1e-8);
    }

    #[test]
    fn odd_cat_branches_at_half_revival() {
        let spec = CatSpec::odd(real(5.0)).unwrap();
        let (a, b) = evolved_cat_branches(&spec, FRAC_PI_2, 78).unwrap();
        assert!(norm_sqr(&b) < 0.01);
        // A-branch is proportional to |iα⟩ − |−iα⟩
        let target = crate::make_cat(&CatSpec::odd(C64::new(0.0, 5.0)).unwrap(), 78).unwrap();
        let overlap: C64 = a.iter().zip(target.amplitudes().iter()).map(|(x, y)| y.conj() * x).sum();
        assert_abs_diff_eq!(overlap.norm_sqr() / norm_sqr(&a), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn branch_truncation_error() {
        let spec = CatSpec::even(real(5.0)).unwrap();
        assert!(matches!(evolved_cat_branches(&spec, 1.0, 40), Err(Error::TruncationTooSmall { .. })));
    }

    #[test]
    fn revival_times() {
        let even = CatSpec::even(real(5.0)).unwrap();
        let odd = CatSpec::odd(real(5.0)).unwrap();
        let coherent = CatSpec::coherent(real(5.0));
        assert_eq!(revival_time(&even, 1.0), FRAC_PI_2);
        assert_eq!(revival_time(&odd, 1.0), FRAC_PI_2);
        assert_eq!(revival_time(&coherent, 1.0), PI);
        assert_eq!(revival_time(&even, 2.0), PI / 4.0);
    }
}
