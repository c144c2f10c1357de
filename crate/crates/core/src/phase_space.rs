//! Husimi Q-function `Q(β) = ⟨β|ρ|β⟩/π` on points and rectangular grids.

use std::f64::consts::PI;

use ndarray::{Array1, Array2};
use rayon::prelude::*;

use crate::dynamics::DEFAULT_LEAK_TOL;
use crate::special::ln_factorial_table;
use crate::{DensityMatrix, Error, Result, C64};

/// Tolerance on the grid Riemann sum of `Q` when the window covers the state.
pub const DEFAULT_GRID_TOL: f64 = 1e-3;

/// Upper bound on the tail of the closed-form series in [`q_mixture_closed`].
const SERIES_TAIL_TOL: f64 = 1e-14;

/// `conj(⟨n|β⟩) = ⟨β|n⟩ = e^{−|β|²/2} β*ⁿ/√(n!)` for `n < dim`. The magnitude
/// is built in log space and the phase carried separately, which keeps large
/// `|β|` and `n` clear of overflow.
fn coherent_bra(beta: C64, ln_fact: &[f64]) -> Array1<C64> {
    let dim = ln_fact.len();
    let r = beta.norm();
    if r == 0.0 {
        let mut v = Array1::zeros(dim);
        v[0] = C64::new(1.0, 0.0);
        return v;
    }
    let (ln_r, theta) = (r.ln(), -beta.arg());
    Array1::from_shape_fn(dim, |n| {
        let ln_mag = -0.5 * r * r + n as f64 * ln_r - 0.5 * ln_fact[n];
        C64::from_polar(ln_mag.exp(), n as f64 * theta)
    })
}

fn check_support(rho: &DensityMatrix) -> Result<()> {
    let top = rho.top_population(1);
    if !(top <= DEFAULT_LEAK_TOL) {
        return Err(Error::TruncationTooSmall { dim: rho.dim(), tail: top, tol: DEFAULT_LEAK_TOL });
    }
    Ok(())
}

fn q_with_bra(rho: &DensityMatrix, bra: &Array1<C64>) -> f64 {
    let elems = rho.elements();
    let dim = rho.dim();
    let mut acc = 0.0;
    for n in 0..dim {
        let row: C64 = (0..dim).map(|m| elems[[n, m]] * bra[m].conj()).sum();
        acc += (bra[n] * row).re;
    }
    acc / PI
}

/// `Q(β)` of `ρ`.
///
/// `ρ` lives in the truncated space, so only the first `N` components of
/// `|β⟩` enter and the value is exact for any `β`. A state with population
/// on its top level is likely a clipped image of a larger one and is
/// rejected with `TruncationTooSmall`.
pub fn q_at(rho: &DensityMatrix, beta: C64) -> Result<f64> {
    check_support(rho)?;
    let bra = coherent_bra(beta, &ln_factorial_table(rho.dim()));
    Ok(q_with_bra(rho, &bra))
}

/// Rectangular phase-space window `[x_min, x_max] × [y_min, y_max]` sampled
/// at `nx × ny` points including the edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64, nx: usize, ny: usize) -> Result<Self> {
        let ordered = |lo: f64, hi: f64| lo.is_finite() && hi.is_finite() && lo < hi;
        if !ordered(x_min, x_max) || !ordered(y_min, y_max) {
            return Err(Error::InvalidParams(format!(
                "grid bounds must be finite and increasing: x [{x_min}, {x_max}], y [{y_min}, {y_max}]"
            )));
        }
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidParams(format!("grid needs at least 2×2 points, got {nx}×{ny}")));
        }
        Ok(Self { x_min, x_max, y_min, y_max, nx, ny })
    }

    /// `161 × 161` points over `[−(|α|+3), |α|+3]²`.
    pub fn default_for(alpha: f64) -> Self {
        let h = alpha.abs() + 3.0;
        Self { x_min: -h, x_max: h, y_min: -h, y_max: h, nx: 161, ny: 161 }
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / (self.ny - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y_min + j as f64 * self.dy()
    }

    pub fn point(&self, i: usize, j: usize) -> C64 {
        C64::new(self.x(i), self.y(j))
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }
}

/// Q-function sampled on a [`GridSpec`]; `values[[i, j]]` is `Q(x_i + i y_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QGrid {
    spec: GridSpec,
    values: Array2<f64>,
}

impl QGrid {
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn cell_area(&self) -> f64 {
        self.spec.cell_area()
    }

    /// Riemann sum `Σ Q · ΔxΔy`.
    pub fn normalization(&self) -> f64 {
        self.values.sum() * self.cell_area()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Grid index of the largest value among points accepted by `region`.
    /// Ties go to the first point in row-major order.
    pub fn argmax_where(&self, region: impl Fn(C64) -> bool) -> Option<(usize, usize)> {
        let mut best: Option<((usize, usize), f64)> = None;
        for ((i, j), &q) in self.values.indexed_iter() {
            if region(self.spec.point(i, j)) && best.is_none_or(|(_, b)| q > b) {
                best = Some(((i, j), q));
            }
        }
        best.map(|(idx, _)| idx)
    }

    /// `(x, y, Q)` triples, `x` outer and `y` inner.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.values.indexed_iter().map(|((i, j), &q)| (self.spec.x(i), self.spec.y(j), q))
    }
}

/// Q-function of `ρ` on a grid. Rows are evaluated in parallel; each point is
/// independent so the result does not depend on scheduling.
pub fn q_grid(rho: &DensityMatrix, spec: &GridSpec) -> Result<QGrid> {
    check_support(rho)?;
    let ln_fact = ln_factorial_table(rho.dim());
    let rows: Vec<Vec<f64>> = (0..spec.nx)
        .into_par_iter()
        .map(|i| {
            (0..spec.ny)
                .map(|j| q_with_bra(rho, &coherent_bra(spec.point(i, j), &ln_fact)))
                .collect()
        })
        .collect();
    let values = Array2::from_shape_fn((spec.nx, spec.ny), |(i, j)| rows[i][j]);
    Ok(QGrid { spec: *spec, values })
}

/// Closed-form Q-function of the evolved mixture `½(|α⟩⟨α| + |−α⟩⟨−α|)`
/// (intensity-dependent coupling, atom excited):
///
/// ```text
/// Q = (|S₁₊|² + |S₁₋|² + |S₂₊|² + |S₂₋|²) / 2π
/// S₁± = ⟨β|A|±α⟩ = Σ e^{−(|β|²+α²)/2} (β*α)ⁿ (±1)ⁿ / n! · cos(τ(n+1))
/// S₂± = ⟨β|B|±α⟩ = Σ e^{−(|β|²+α²)/2} (β*α)ⁿ (±1)ⁿ / n! · (−i β* sin(τ(n+1)) / √(n+1))
/// ```
///
/// The number of series terms is picked from `|β α|`.
pub fn q_mixture_closed(alpha: f64, tau: f64, beta: C64) -> Result<f64> {
    let z = beta.norm() * alpha.abs();
    let n_terms = (z + 12.0 * (z + 1.0).sqrt()).ceil() as usize + 30;
    q_mixture_closed_with_terms(alpha, tau, beta, n_terms)
}

/// As [`q_mixture_closed`] with an explicit number of terms; fails when the
/// neglected tail could exceed `1e−14`.
pub fn q_mixture_closed_with_terms(alpha: f64, tau: f64, beta: C64, n_terms: usize) -> Result<f64> {
    let b = beta.norm();
    let a = alpha.abs();
    let z = b * a;
    // |termₙ| = e^{−(|β|−α)²/2} · Poisson(n; |βα|); the S₂ factor adds at most |β|.
    let envelope = (-0.5 * (b - a).powi(2)).exp() * (1.0 + b);
    let tail = envelope * poisson_tail(z, n_terms);
    if !(tail < SERIES_TAIL_TOL) {
        return Err(Error::TruncationTooSmall { dim: n_terms, tail, tol: SERIES_TAIL_TOL });
    }

    let ln_fact = ln_factorial_table(n_terms);
    let base = -0.5 * (b * b + a * a);
    let w = beta.conj() * alpha;
    let (ln_z, theta) = (z.ln(), w.arg());
    let mut s1 = [C64::new(0.0, 0.0); 2];
    let mut s2 = [C64::new(0.0, 0.0); 2];
    for n in 0..n_terms {
        let term = if n == 0 {
            C64::new(base.exp(), 0.0)
        } else if z == 0.0 {
            break;
        } else {
            C64::from_polar((base + n as f64 * ln_z - ln_fact[n]).exp(), n as f64 * theta)
        };
        let k = (n + 1) as f64;
        let a_factor = (tau * k).cos();
        let b_factor = beta.conj() * C64::new(0.0, -(tau * k).sin() / k.sqrt());
        let alt = if n % 2 == 0 { 1.0 } else { -1.0 };
        for (idx, sign) in [1.0, alt].into_iter().enumerate() {
            s1[idx] += term * sign * a_factor;
            s2[idx] += term * sign * b_factor;
        }
    }
    let total: f64 = s1.iter().chain(s2.iter()).map(|s| s.norm_sqr()).sum();
    Ok(total / (2.0 * PI))
}

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
