//! Reduced field evolution for a two-level atom prepared in a definite state.
//!
//! In the interaction picture the evolution operator is block diagonal in
//! photon-number pairs. With the atom initially excited, the joint state at
//! time `t` is
//!
//! ```text
//! ρ_af(t) = | AρA†  AρB† |      A = cos(λt √(RR†))
//!           | BρA†  BρB† |,     B = −i R† sin(λt √(RR†)) / √(RR†)
//! ```
//!
//! and tracing out the atom leaves `ρ_f(t) = AρA† + BρB†`. For the
//! intensity-dependent coupling `R = a √(a†a)` the Rabi frequencies grow
//! linearly with `n`, so `A|n⟩ = cos(τ(n+1))|n⟩` and
//! `B|n⟩ = −i sin(τ(n+1))|n+1⟩` with `τ = λt`. The ordinary coupling
//! replaces `n+1` by `√(n+1)`.
//!
//! The free Hamiltonian is dropped: it only contributes phases that leave
//! purity, populations and photon statistics unchanged.

use ndarray::{Array1, Array2};

use crate::fock::DensityMatrix;
use crate::{Error, Result, StateVector, C64};

/// Maximum population allowed on the top two Fock levels before evolution,
/// relative to the trace.
pub const DEFAULT_LEAK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CouplingMode {
    /// `R = a √(a†a)`: Rabi frequencies `2λ(n+1)`, exactly periodic.
    #[default]
    IntensityDependent,
    /// Ordinary Jaynes-Cummings coupling through `a`.
    Ordinary,
}

impl CouplingMode {
    /// `√` of the eigenvalue of `RR†` (or `aa†`) on `|k−1⟩`, i.e. the Rabi
    /// factor of the pair `{|e,k−1⟩, |g,k⟩}`.
    fn rabi_factor(self, k: usize) -> f64 {
        match self {
            CouplingMode::IntensityDependent => k as f64,
            CouplingMode::Ordinary => (k as f64).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AtomInit {
    #[default]
    Excited,
    Ground,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionParams {
    lambda: f64,
    tau: f64,
    mode: CouplingMode,
    dim: usize,
    atom: AtomInit,
}

impl EvolutionParams {
    pub fn new(lambda: f64, tau: f64, mode: CouplingMode, dim: usize) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParams(format!("lambda must be positive, got {lambda}")));
        }
        if dim < 2 {
            return Err(Error::InvalidDim { dim, min: 2 });
        }
        Self { lambda, tau: 0.0, mode, dim, atom: AtomInit::Excited }.at_tau(tau)
    }

    /// Intensity-dependent coupling with `λ = 1` and the atom excited.
    pub fn intensity_dependent(tau: f64, dim: usize) -> Result<Self> {
        Self::new(1.0, tau, CouplingMode::IntensityDependent, dim)
    }

    pub fn ordinary(tau: f64, dim: usize) -> Result<Self> {
        Self::new(1.0, tau, CouplingMode::Ordinary, dim)
    }

    /// Same parameters at another dimensionless time.
    pub fn at_tau(self, tau: f64) -> Result<Self> {
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(Error::InvalidParams(format!("tau must be non-negative, got {tau}")));
        }
        Ok(Self { tau, ..self })
    }

    pub fn with_atom(self, atom: AtomInit) -> Self {
        Self { atom, ..self }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Dimensionless time `τ = λt`.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Physical time `t = τ/λ`.
    pub fn time(&self) -> f64 {
        self.tau / self.lambda
    }

    pub fn mode(&self) -> CouplingMode {
        self.mode
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atom(&self) -> AtomInit {
        self.atom
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderKind {
    /// `R` (or `a`): one level down.
    Lower,
    /// `R†` (or `a†`): one level up.
    Raise,
}

/// Action of `R`, `R†` (intensity-dependent) or `a`, `a†` (ordinary) on the
/// Fock basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LadderAction {
    pub kind: LadderKind,
    pub mode: CouplingMode,
}

impl LadderAction {
    pub fn lower(mode: CouplingMode) -> Self {
        Self { kind: LadderKind::Lower, mode }
    }

    pub fn raise(mode: CouplingMode) -> Self {
        Self { kind: LadderKind::Raise, mode }
    }

    /// Image of `|n⟩` as `(level, coefficient)`, or `None` when it vanishes.
    /// `R|n⟩ = n|n−1⟩`, `R†|n⟩ = (n+1)|n+1⟩`; the ordinary mode uses square
    /// roots of these factors.
    pub fn act(&self, n: usize) -> Option<(usize, f64)> {
        match self.kind {
            LadderKind::Lower if n == 0 => None,
            LadderKind::Lower => Some((n - 1, self.mode.rabi_factor(n))),
            LadderKind::Raise => Some((n + 1, self.mode.rabi_factor(n + 1))),
        }
    }

    /// Dense matrix on `dim` levels; raising out of the space is dropped.
    pub fn to_dense(&self, dim: usize) -> Array2<C64> {
        let mut m = Array2::zeros((dim, dim));
        for n in 0..dim {
            if let Some((k, c)) = self.act(n) {
                if k < dim {
                    m[[k, n]] = C64::new(c, 0.0);
                }
            }
        }
        m
    }
}

/// A real diagonal operator, `⟨n|D|n⟩ = diag[n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalOp {
    diag: Vec<f64>,
}

impl DiagonalOp {
    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// `D|ψ⟩`, unnormalized.
    pub fn apply(&self, psi: &StateVector) -> Result<Array1<C64>> {
        check_dim(self.dim(), psi.dim())?;
        Ok(Array1::from_shape_fn(self.dim(), |n| psi.amplitude(n) * self.diag[n]))
    }

    pub fn to_dense(&self) -> Array2<C64> {
        Array2::from_diag(&Array1::from_iter(self.diag.iter().map(|&d| C64::new(d, 0.0))))
    }

    fn action(&self, n: usize) -> Option<(usize, C64)> {
        Some((n, C64::new(self.diag[n], 0.0)))
    }
}

/// One-step ladder operator, `S|n⟩ = coeffs[n] |n±1⟩`. Components shifted
/// past either end of the space are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftOp {
    kind: LadderKind,
    coeffs: Vec<C64>,
}

impl ShiftOp {
    pub fn kind(&self) -> LadderKind {
        self.kind
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    fn target(&self, n: usize) -> Option<usize> {
        match self.kind {
            LadderKind::Raise => Some(n + 1).filter(|&k| k < self.dim()),
            LadderKind::Lower => n.checked_sub(1),
        }
    }

    /// `S|ψ⟩`, unnormalized.
    pub fn apply(&self, psi: &StateVector) -> Result<Array1<C64>> {
        check_dim(self.dim(), psi.dim())?;
        let mut out = Array1::zeros(self.dim());
        for n in 0..self.dim() {
            if let Some((k, c)) = self.action(n) {
                out[k] += c * psi.amplitude(n);
            }
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> Array2<C64> {
        let mut m = Array2::zeros((self.dim(), self.dim()));
        for n in 0..self.dim() {
            if let Some((k, c)) = self.action(n) {
                m[[k, n]] = c;
            }
        }
        m
    }

    fn action(&self, n: usize) -> Option<(usize, C64)> {
        self.target(n).map(|k| (k, self.coeffs[n]))
    }
}

/// The operator that leaves the atom in its initial state.
///
/// Atom excited: `A = cos(τ√(RR†))`, so `⟨n|A|n⟩ = cos(τ(n+1))` (ordinary:
/// `cos(τ√(n+1))`). Atom in the ground state: `cos(τ√(R†R))`, i.e.
/// `cos(τn)` (ordinary: `cos(τ√n)`).
pub fn op_a(params: &EvolutionParams) -> DiagonalOp {
    let shift = match params.atom {
        AtomInit::Excited => 1,
        AtomInit::Ground => 0,
    };
    let diag = (0..params.dim)
        .map(|n| (params.tau * params.mode.rabi_factor(n + shift)).cos())
        .collect();
    DiagonalOp { diag }
}

/// The operator that flips the atom.
///
/// Atom excited: `B = −iR† sin(τ√(RR†))/√(RR†)`, so
/// `B|n⟩ = −i sin(τ(n+1))|n+1⟩`; the `R†` factor cancels the denominator.
/// Atom in the ground state: `−iR sin(τ√(R†R))/√(R†R)`, so
/// `B|n⟩ = −i sin(τn)|n−1⟩`.
pub fn op_b(params: &EvolutionParams) -> ShiftOp {
    let (kind, shift) = match params.atom {
        AtomInit::Excited => (LadderKind::Raise, 1),
        AtomInit::Ground => (LadderKind::Lower, 0),
    };
    let coeffs = (0..params.dim)
        .map(|n| C64::new(0.0, -(params.tau * params.mode.rabi_factor(n + shift)).sin()))
        .collect();
    ShiftOp { kind, coeffs }
}

#[derive(Clone, Copy)]
enum Kraus<'a> {
    Diag(&'a DiagonalOp),
    Shift(&'a ShiftOp),
}

impl Kraus<'_> {
    fn action(&self, n: usize) -> Option<(usize, C64)> {
        match self {
            Kraus::Diag(d) => d.action(n),
            Kraus::Shift(s) => s.action(n),
        }
    }
}

/// `K ρ L†` in `O(N²)` using the one-entry-per-column structure of both
/// operators.
fn sandwich(left: Kraus<'_>, rho: &DensityMatrix, right: Kraus<'_>) -> Array2<C64> {
    let dim = rho.dim();
    let elems = rho.elements();
    let right_actions: Vec<_> = (0..dim).map(|m| right.action(m)).collect();
    let mut out = Array2::zeros((dim, dim));
    for n in 0..dim {
        let Some((row, kn)) = left.action(n) else { continue };
        for (m, rm) in right_actions.iter().enumerate() {
            if let Some((col, lm)) = rm {
                out[[row, *col]] += kn * elems[[n, m]] * lm.conj();
            }
        }
    }
    out
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimMismatch { expected, found });
    }
    Ok(())
}

fn check_input(rho0: &DensityMatrix, params: &EvolutionParams) -> Result<()> {
    check_dim(params.dim, rho0.dim())?;
    let population = rho0.top_population(2);
    let tol = DEFAULT_LEAK_TOL * rho0.trace().abs();
    if !(population <= tol) {
        return Err(Error::TailLeak { population, tol: DEFAULT_LEAK_TOL });
    }
    Ok(())
}

/// Reduced field state `ρ_f(τ) = AρA† + BρB†`.
pub fn evolve_field(rho0: &DensityMatrix, params: &EvolutionParams) -> Result<DensityMatrix> {
    check_input(rho0, params)?;
    let (a, b) = (op_a(params), op_b(params));
    let mut out = sandwich(Kraus::Diag(&a), rho0, Kraus::Diag(&a));
    out += &sandwich(Kraus::Shift(&b), rho0, Kraus::Shift(&b));
    Ok(DensityMatrix::from_elements_unchecked(out))
}

/// Probability of finding the atom excited at `τ`.
pub fn excited_population(rho0: &DensityMatrix, params: &EvolutionParams) -> Result<f64> {
    check_input(rho0, params)?;
    let diag = rho0.elements().diag().to_owned();
    let p = match params.atom {
        AtomInit::Excited => {
            let a = op_a(params);
            a.diag.iter().zip(diag.iter()).map(|(c, r)| c * c * r.re).sum()
        }
        AtomInit::Ground => {
            let b = op_b(params);
            (1..params.dim).map(|n| b.coeffs[n].norm_sqr() * diag[n].re).sum()
        }
    };
    Ok(p)
}

/// `W = ⟨σ_z⟩ = 2P_e − 1`.
pub fn atomic_inversion(rho0: &DensityMatrix, params: &EvolutionParams) -> Result<f64> {
    Ok(2.0 * excited_population(rho0, params)? - 1.0)
}

/// Joint atom-field density matrix in `2 × 2` block form, indexed by the
/// atomic state (`e` first).
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    pub ee: Array2<C64>,
    pub eg: Array2<C64>,
    pub ge: Array2<C64>,
    pub gg: Array2<C64>,
}

impl JointState {
    pub fn field_dim(&self) -> usize {
        self.ee.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.ee.diag().iter().chain(self.gg.diag().iter()).map(|c| c.re).sum()
    }

    /// `Tr ρ_af²`.
    pub fn purity(&self) -> f64 {
        [&self.ee, &self.eg, &self.ge, &self.gg]
            .iter()
            .flat_map(|b| b.iter())
            .map(|c| c.norm_sqr())
            .sum()
    }

    pub fn excited_population(&self) -> f64 {
        self.ee.diag().iter().map(|c| c.re).sum()
    }

    /// Partial trace over the atom.
    pub fn reduced_field(&self) -> DensityMatrix {
        DensityMatrix::from_elements_unchecked(&self.ee + &self.gg)
    }

    /// `2N × 2N` matrix with the excited block first.
    pub fn to_dense(&self) -> Array2<C64> {
        let n = self.field_dim();
        let mut m = Array2::zeros((2 * n, 2 * n));
        for (block, (r, c)) in [(&self.ee, (0, 0)), (&self.eg, (0, n)), (&self.ge, (n, 0)), (&self.gg, (n, n))] {
            m.slice_mut(ndarray::s![r..r + n, c..c + n]).assign(block);
        }
        m
    }
}

/// Full joint state at `τ`, starting from `ρ_a ⊗ ρ0` with the atom in
/// `params.atom()`.
pub fn joint_state_blocks(rho0: &DensityMatrix, params: &EvolutionParams) -> Result<JointState> {
    check_input(rho0, params)?;
    let (a, b) = (op_a(params), op_b(params));
    let (stay, flip) = (Kraus::Diag(&a), Kraus::Shift(&b));
    // column of U for the initial atomic state: (to e, to g)
    let (to_e, to_g) = match params.atom {
        AtomInit::Excited => (stay, flip),
        AtomInit::Ground => (flip, stay),
    };
    Ok(JointState {
        ee: sandwich(to_e, rho0, to_e),
        eg: sandwich(to_e, rho0, to_g),
        ge: sandwich(to_g, rho0, to_e),
        gg: sandwich(to_g, rho0, to_g),
    })
}
