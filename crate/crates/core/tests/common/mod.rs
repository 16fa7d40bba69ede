#![allow(dead_code)]

use magnon_core::config::PointConfig;
use magnon_core::dynamics::{build_diffusion, build_drift};
use magnon_core::model::{detunings_from, DriveParams};
use magnon_core::steadystate::{solve_lyapunov_kron, CovarianceMatrix};
use nalgebra::{Matrix2, Matrix6};

/// Reference configuration at squeezing `r`, phase 0.
pub fn reference(r: f64) -> PointConfig {
    PointConfig {
        drive: DriveParams::new(r, 0.0).unwrap(),
        ..PointConfig::default()
    }
}

/// Steady state through the vectorized solver only.
pub fn kron_steady_state(point: &PointConfig) -> CovarianceMatrix {
    let a = build_drift(&detunings_from(&point.params), &point.params);
    let d = build_diffusion(&point.params, &point.drive, &point.environment().unwrap());
    solve_lyapunov_kron(&a, &d).unwrap()
}

/// `⟨δM_x²⟩` straight from the matrix entries.
pub fn var_mx(v: &Matrix6<f64>) -> f64 {
    0.5 * (v[(2, 2)] + v[(4, 4)] + 2.0 * v[(2, 4)])
}

/// `⟨δm_y²⟩` straight from the matrix entries.
pub fn var_my(v: &Matrix6<f64>) -> f64 {
    0.5 * (v[(3, 3)] + v[(5, 5)] - 2.0 * v[(3, 5)])
}

/// Smallest partial-transpose symplectic eigenvalue from the two-mode
/// invariants: `Δ̃ = det A + det B − 2 det C`,
/// `ν₋² = (Δ̃ − √(Δ̃² − 4 det V)) / 2`.
///
/// The square root cancels near the separability boundary (ν₋ ≈ ½), where
/// the error grows to ~√ε; use it only on clearly entangled states.
pub fn nu_minus_closed_form(v: &Matrix6<f64>) -> f64 {
    let block = |r: usize, c: usize| -> Matrix2<f64> { v.fixed_view::<2, 2>(r, c).into_owned() };
    let a = block(2, 2);
    let b = block(4, 4);
    let c = block(2, 4);
    let full = v.fixed_view::<4, 4>(2, 2).into_owned();
    let delta = a.determinant() + b.determinant() - 2.0 * c.determinant();
    let det = full.determinant();
    ((delta - (delta * delta - 4.0 * det).sqrt()) / 2.0).sqrt()
}

pub fn log_negativity_closed_form(v: &Matrix6<f64>) -> f64 {
    (-(2.0 * nu_minus_closed_form(v)).ln()).max(0.0)
}

pub fn db(variance: f64) -> f64 {
    -10.0 * (variance / 0.5).log10()
}

/// Prints one acceptance line and returns whether it passed.
pub fn report(id: &str, passed: bool, detail: impl std::fmt::Display) -> bool {
    println!("[{}] {id}: {detail}", if passed { "PASS" } else { "FAIL" });
    passed
}
