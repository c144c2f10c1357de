//! The matrix engine against independent routes: a brute-force double sum
//! for the evolved mixture, and the closed-form series in `oracles` and
//! `phase_space`.

use std::f64::consts::{FRAC_PI_2, PI};

use idjc_core::oracles::{evolved_cat_branches, inversion_cat_closed, purity_mixture_closed};
use idjc_core::phase_space::{q_at, q_mixture_closed};
use idjc_core::{
    atomic_inversion, default_dim, evolve_field, make_cat, make_coherent, mix, op_a, op_b,
    pure_density, purity_defect, CatSpec, DensityMatrix, EvolutionParams, C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::ln_gamma;

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn mixture(alpha: f64) -> (DensityMatrix, usize) {
    let dim = default_dim(real(alpha));
    let p = pure_density(&make_coherent(real(alpha), dim).unwrap());
    let m = pure_density(&make_coherent(real(-alpha), dim).unwrap());
    (mix(&[(0.5, &p), (0.5, &m)]).unwrap(), dim)
}

fn id(tau: f64, dim: usize) -> EvolutionParams {
    EvolutionParams::intensity_dependent(tau, dim).unwrap()
}

/// `½ Σ_{n,m} e^{−α²} αⁿ α^m / √(n! m!) [1 + (−1)^{n+m}]
///   { cos(τ(n+1)) cos(τ(m+1)) |n⟩⟨m| + sin(τ(n+1)) sin(τ(m+1)) |n+1⟩⟨m+1| }`
/// evaluated entry by entry with statrs' log-gamma.
fn brute_force_mixture(alpha: f64, tau: f64, dim: usize) -> Vec<Vec<f64>> {
    let coeff = |n: usize| (-0.5 * alpha * alpha + n as f64 * alpha.ln() - 0.5 * ln_gamma(n as f64 + 1.0)).exp();
    let mut out = vec![vec![0.0; dim]; dim];
    for n in 0..dim {
        for m in 0..dim {
            if (n + m) % 2 == 1 {
                continue;
            }
            let w = coeff(n) * coeff(m); // ½ · [1 + (−1)^{n+m}] = 1
            let (kn, km) = ((n + 1) as f64, (m + 1) as f64);
            out[n][m] += w * (tau * kn).cos() * (tau * km).cos();
            if n + 1 < dim && m + 1 < dim {
                out[n + 1][m + 1] += w * (tau * kn).sin() * (tau * km).sin();
            }
        }
    }
    out
}

#[test]
fn evolved_mixture_matches_double_sum() {
    let alpha = 5.0;
    let (rho0, dim) = mixture(alpha);
    for tau in [FRAC_PI_2, 0.3, 2.2] {
        let rho = evolve_field(&rho0, &id(tau, dim)).unwrap();
        let oracle = brute_force_mixture(alpha, tau, dim);
        for n in 0..dim {
            for m in 0..dim {
                let diff = (rho.get(n, m) - real(oracle[n][m])).norm();
                assert!(diff < 1e-10, "tau {tau} entry ({n}, {m}) differs by {diff:e}");
            }
        }
    }
}

#[test]
fn purity_series_matches_engine_at_random_times() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (rho0, dim) = mixture(5.0);
    for _ in 0..50 {
        let tau = rng.random_range(0.0..2.0 * PI);
        let engine = purity_defect(&evolve_field(&rho0, &id(tau, dim)).unwrap());
        let series = purity_mixture_closed(5.0, tau, dim).unwrap();
        assert!((engine - series).abs() < 1e-9, "tau {tau}: {engine} vs {series}");
    }
}

#[test]
fn purity_series_matches_engine_on_grid() {
    for alpha in [2.0, 3.0, 5.0] {
        let (rho0, dim) = mixture(alpha);
        for k in 0..100 {
            let tau = PI * k as f64 / 99.0;
            let engine = purity_defect(&evolve_field(&rho0, &id(tau, dim)).unwrap());
            let series = purity_mixture_closed(alpha, tau, dim).unwrap();
            assert!((engine - series).abs() < 1e-9, "alpha {alpha} tau {tau}");
        }
    }
}

#[test]
fn inversion_closed_form_matches_engine() {
    for alpha in [2.0, 5.0] {
        for r in [1, 0, -1] {
            let spec = CatSpec::new(real(alpha), r).unwrap();
            let dim = default_dim(spec.alpha());
            let rho0 = pure_density(&make_cat(&spec, dim).unwrap());
            for k in 0..100 {
                let tau = 2.0 * PI * k as f64 / 99.0;
                let engine = atomic_inversion(&rho0, &id(tau, dim)).unwrap();
                let closed = inversion_cat_closed(alpha, r, tau).unwrap();
                assert!((engine - closed).abs() < 1e-9, "alpha {alpha} r {r} tau {tau}");
            }
        }
    }
}

#[test]
fn branches_match_operator_action() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let alpha = C64::from_polar(rng.random_range(0.5..5.0), rng.random_range(0.0..2.0 * PI));
        let r = [-1, 0, 1][rng.random_range(0..3)];
        let tau = rng.random_range(0.0..2.0 * PI);
        let spec = CatSpec::new(alpha, r).unwrap();
        let dim = default_dim(alpha);
        let psi = make_cat(&spec, dim).unwrap();
        let (a, b) = evolved_cat_branches(&spec, tau, dim).unwrap();
        let a_engine = op_a(&id(tau, dim)).apply(&psi).unwrap();
        let b_engine = op_b(&id(tau, dim)).apply(&psi).unwrap();
        for n in 0..dim {
            assert!((a[n] - a_engine[n]).norm() < 1e-10);
            assert!((b[n] - b_engine[n]).norm() < 1e-10);
        }
    }
}

#[test]
fn q_closed_form_matches_engine() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let alpha = 5.0;
    let (rho0, dim) = mixture(alpha);
    for _ in 0..200 {
        let tau = rng.random_range(0.0..PI);
        let beta = C64::new(rng.random_range(-8.0..8.0), rng.random_range(-8.0..8.0));
        let rho = evolve_field(&rho0, &id(tau, dim)).unwrap();
        let engine = q_at(&rho, beta).unwrap();
        let closed = q_mixture_closed(alpha, tau, beta).unwrap();
        assert!((engine - closed).abs() < 1e-9, "tau {tau} beta {beta}: {engine} vs {closed}");
    }
}
