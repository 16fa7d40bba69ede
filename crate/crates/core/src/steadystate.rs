//! Steady-state and transient covariance matrices.
//!
//! The steady state solves `AV + VAᵀ = −D`. Two independent solvers are
//! provided: [`solve_lyapunov`] works on the real Schur form of `A`
//! (Bartels–Stewart), [`solve_lyapunov_kron`] vectorizes the equation into a
//! dense 36×36 system. They share nothing beyond the stability check and
//! serve as each other's oracle.

use log::warn;
use nalgebra::{DMatrix, Matrix6, Schur};

use crate::dynamics::{
    build_diffusion, build_drift, stability_check, DiffusionMatrix, DriftMatrix,
};
use crate::error::{Error, Result};
use crate::model::{detunings_from, seconds_to_internal, DriveParams, Environment, SystemParams};
use crate::symplectic::symplectic_eigenvalues;

/// Required bound on `‖AV + VAᵀ + D‖_max / ‖D‖_max`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Relative asymmetry accepted when wrapping an external matrix.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Covariance matrices must have symplectic eigenvalues ≥ ½ minus this.
pub const PHYSICALITY_TOLERANCE: f64 = 1e-9;

/// Largest `dt·‖A‖∞` accepted by [`propagate_covariance`].
pub const MAX_STEP_NORM: f64 = 0.1;

/// Squeezing parameters above this trigger a conditioning warning.
pub const CONDITIONING_WARNING_R: f64 = 6.0;

/// Symmetric 6×6 covariance matrix, basis `(δX, δY, δx₁, δy₁, δx₂, δy₂)`,
/// vacuum variance ½ per quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix(Matrix6<f64>);

impl CovarianceMatrix {
    /// Wraps a matrix that is symmetric to within [`SYMMETRY_TOLERANCE`]
    /// (relative) and has a positive diagonal; the stored copy is exactly
    /// symmetric.
    pub fn new(v: Matrix6<f64>) -> Result<Self> {
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("covariance matrix has non-finite entries".into()));
        }
        let asym = (v - v.transpose()).amax();
        if asym > SYMMETRY_TOLERANCE * v.amax() {
            return Err(Error::Domain(format!(
                "covariance matrix is not symmetric (max asymmetry {asym:.3e})"
            )));
        }
        if v.diagonal().iter().any(|&x| x <= 0.0) {
            return Err(Error::Domain("covariance matrix diagonal must be positive".into()));
        }
        Ok(Self::symmetrized(v))
    }

    /// `½·I₆`, all three modes in vacuum.
    pub fn vacuum() -> Self {
        Self(Matrix6::identity() * 0.5)
    }

    fn symmetrized(v: Matrix6<f64>) -> Self {
        Self((v + v.transpose()) * 0.5)
    }

    pub fn matrix(&self) -> &Matrix6<f64> {
        &self.0
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[(row, col)]
    }

    /// The three symplectic eigenvalues in ascending order.
    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        symplectic_eigenvalues(&DMatrix::from_column_slice(6, 6, self.0.as_slice()))
    }

    /// Whether the matrix satisfies the uncertainty principle.
    pub fn is_physical(&self) -> bool {
        match self.symplectic_eigenvalues() {
            Ok(nu) => nu.iter().all(|&x| x >= 0.5 - PHYSICALITY_TOLERANCE),
            Err(_) => false,
        }
    }
}

fn require_stable(a: &DriftMatrix) -> Result<()> {
    let report = stability_check(a)?;
    if report.stable {
        Ok(())
    } else {
        Err(Error::Unstable {
            max_real_part: report.max_real_part,
        })
    }
}

fn check_residual(a: &Matrix6<f64>, d: &Matrix6<f64>, v: &Matrix6<f64>) -> Result<()> {
    let residual = (a * v + v * a.transpose() + d).amax();
    let scale = d.amax();
    if residual <= RESIDUAL_TOLERANCE * scale {
        Ok(())
    } else {
        Err(Error::Numerical(format!(
            "Lyapunov residual {residual:.3e} exceeds {RESIDUAL_TOLERANCE:e}·‖D‖ = {:.3e}",
            RESIDUAL_TOLERANCE * scale
        )))
    }
}

/// Splits a quasi-upper-triangular matrix into its 1×1 and 2×2 diagonal blocks.
fn diagonal_blocks(t: &DMatrix<f64>) -> Vec<(usize, usize)> {
    let n = t.nrows();
    let mut blocks = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != 0.0 {
            blocks.push((i, 2));
            i += 2;
        } else {
            blocks.push((i, 1));
            i += 1;
        }
    }
    blocks
}

/// Solves `P·Y + Y·Qᵀ = C` for blocks of size at most 2×2.
fn solve_small_sylvester(p: &DMatrix<f64>, q: &DMatrix<f64>, c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (rows, cols) = (p.nrows(), q.nrows());
    // Row-major vectorization: vec(P·Y) = (P ⊗ I)·vec(Y), vec(Y·Qᵀ) = (I ⊗ Q)·vec(Y).
    let system = p.kronecker(&DMatrix::identity(cols, cols)) + DMatrix::identity(rows, rows).kronecker(q);
    let rhs = DMatrix::from_row_slice(rows * cols, 1, c.transpose().as_slice());
    let lu = system.clone().full_piv_lu();
    let x = lu.solve(&rhs).ok_or_else(|| Error::Singular {
        context: "Bartels–Stewart block solve",
        detail: format!("block system is singular (eigenvalues of A sum to zero?): {system}"),
    })?;
    Ok(DMatrix::from_row_slice(rows, cols, x.as_slice()))
}

/// Bartels–Stewart for `AV + VAᵀ = −D` with `A = Q T Qᵀ` in real Schur form.
fn bartels_stewart(a: &DMatrix<f64>, d: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let schur = Schur::try_new(a.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    // T·Y + Y·Tᵀ = C with Y = Qᵀ V Q and C = −Qᵀ D Q.
    let c = -(q.transpose() * d * &q);
    let blocks = diagonal_blocks(&t);
    let n = a.nrows();
    let mut y = DMatrix::<f64>::zeros(n, n);

    for (bk, &(k0, kn)) in blocks.iter().enumerate().rev() {
        for (bl, &(l0, ln)) in blocks.iter().enumerate().rev() {
            let mut rhs = c.view((k0, l0), (kn, ln)).into_owned();
            for &(m0, mn) in &blocks[bk + 1..] {
                rhs -= t.view((k0, m0), (kn, mn)) * y.view((m0, l0), (mn, ln));
            }
            for &(m0, mn) in &blocks[bl + 1..] {
                rhs -= y.view((k0, m0), (kn, mn)) * t.view((l0, m0), (ln, mn)).transpose();
            }
            let t_kk = t.view((k0, k0), (kn, kn)).into_owned();
            let t_ll = t.view((l0, l0), (ln, ln)).into_owned();
            let block = solve_small_sylvester(&t_kk, &t_ll, &rhs)?;
            y.view_mut((k0, l0), (kn, ln)).copy_from(&block);
        }
    }
    Ok(&q * y * q.transpose())
}

fn to_dynamic(m: &Matrix6<f64>) -> DMatrix<f64> {
    DMatrix::from_column_slice(6, 6, m.as_slice())
}

fn to_static(m: &DMatrix<f64>) -> Matrix6<f64> {
    Matrix6::from_column_slice(m.as_slice())
}

/// Steady-state covariance via the real Schur form of `A`.
///
/// Fails with [`Error::Unstable`] when `A` has no asymptotically stable
/// steady state. The Lyapunov residual is checked before returning.
pub fn solve_lyapunov(a: &DriftMatrix, d: &DiffusionMatrix) -> Result<CovarianceMatrix> {
    require_stable(a)?;
    let v = to_static(&bartels_stewart(&to_dynamic(a.matrix()), &to_dynamic(d.matrix()))?);
    let v = CovarianceMatrix::symmetrized(v);
    check_residual(a.matrix(), d.matrix(), v.matrix())?;
    Ok(v)
}

/// Steady-state covariance from the vectorized 36×36 system
/// `(A ⊗ I + I ⊗ A)·vec(V) = −vec(D)`.
pub fn solve_lyapunov_kron(a: &DriftMatrix, d: &DiffusionMatrix) -> Result<CovarianceMatrix> {
    require_stable(a)?;
    let a = to_dynamic(a.matrix());
    let eye = DMatrix::<f64>::identity(6, 6);
    let system = a.kronecker(&eye) + eye.kronecker(&a);
    let rhs = -DMatrix::from_row_slice(36, 1, d.matrix().transpose().as_slice());
    let lu = system.full_piv_lu();
    let x = lu.solve(&rhs).ok_or_else(|| Error::Singular {
        context: "vectorized Lyapunov solve",
        detail: "A ⊗ I + I ⊗ A is singular: two eigenvalues of A sum to zero".into(),
    })?;
    let v = Matrix6::from_row_slice(x.as_slice());
    let v = CovarianceMatrix::symmetrized(v);
    check_residual(&to_static(&a), d.matrix(), v.matrix())?;
    Ok(v)
}

/// Steady state of the full model: validates the inputs, builds `A` and `D`
/// and solves the Lyapunov equation.
pub fn steady_state(
    params: &SystemParams,
    drive: &DriveParams,
    env: &Environment,
) -> Result<CovarianceMatrix> {
    params.validate()?;
    if drive.r() > CONDITIONING_WARNING_R {
        warn!(
            "squeezing parameter r = {} exceeds {CONDITIONING_WARNING_R}; diffusion entries grow as e^(2r) and the solve may be ill conditioned",
            drive.r()
        );
    }
    let a = build_drift(&detunings_from(params), params);
    let d = build_diffusion(params, drive, env);
    solve_lyapunov(&a, &d)
}

fn lyapunov_rhs(a: &Matrix6<f64>, d: &Matrix6<f64>, v: &Matrix6<f64>) -> Matrix6<f64> {
    a * v + v * a.transpose() + d
}

/// Integrates `dV/dt = AV + VAᵀ + D` from `v0` over `t_final` seconds with
/// classical RK4 and a fixed step no larger than `dt` seconds.
///
/// `observer` is called with `(t [s], V(t))` at `t = 0` and after every step.
pub fn propagate_covariance_observed<F>(
    a: &DriftMatrix,
    d: &DiffusionMatrix,
    v0: &CovarianceMatrix,
    t_final: f64,
    dt: f64,
    mut observer: F,
) -> Result<CovarianceMatrix>
where
    F: FnMut(f64, &CovarianceMatrix),
{
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Domain(format!("time step must be positive, got {dt} s")));
    }
    if !(t_final.is_finite() && t_final >= 0.0) {
        return Err(Error::Domain(format!("final time must be ≥ 0, got {t_final} s")));
    }
    let am = a.matrix();
    let dm = d.matrix();
    let norm = am.row_iter().map(|row| row.abs().sum()).fold(0.0, f64::max);
    let product = seconds_to_internal(dt) * norm;
    if product > MAX_STEP_NORM {
        return Err(Error::StepSize {
            product,
            limit: MAX_STEP_NORM,
            suggested_dt: dt * MAX_STEP_NORM / product,
        });
    }

    let mut v = *v0;
    observer(0.0, &v);
    if t_final == 0.0 {
        return Ok(v);
    }
    let steps = (t_final / dt).ceil().max(1.0) as usize;
    let h = seconds_to_internal(t_final) / steps as f64;
    let h_seconds = t_final / steps as f64;
    for step in 1..=steps {
        let m = v.0;
        let k1 = lyapunov_rhs(am, dm, &m);
        let k2 = lyapunov_rhs(am, dm, &(m + k1 * (0.5 * h)));
        let k3 = lyapunov_rhs(am, dm, &(m + k2 * (0.5 * h)));
        let k4 = lyapunov_rhs(am, dm, &(m + k3 * h));
        v = CovarianceMatrix::symmetrized(m + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0));
        observer(step as f64 * h_seconds, &v);
    }
    Ok(v)
}

/// [`propagate_covariance_observed`] without an observer.
pub fn propagate_covariance(
    a: &DriftMatrix,
    d: &DiffusionMatrix,
    v0: &CovarianceMatrix,
    t_final: f64,
    dt: f64,
) -> Result<CovarianceMatrix> {
    propagate_covariance_observed(a, d, v0, t_final, dt, |_, _| {})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::global_rotation;
    use crate::model::{internal_to_seconds, paper_defaults, Detunings};

    fn resonant(r: f64) -> (DriftMatrix, DiffusionMatrix) {
        let (p, env) = paper_defaults();
        let a = build_drift(&detunings_from(&p), &p);
        let d = build_diffusion(&p, &DriveParams::new(r, 0.0).unwrap(), &env);
        (a, d)
    }

    fn uncoupled() -> SystemParams {
        let (p, _) = paper_defaults();
        SystemParams { g1: 0.0, g2: 0.0, ..p }
    }

    #[test]
    fn uncoupled_vacuum_is_half_identity() {
        let p = uncoupled();
        let a = build_drift(&detunings_from(&p), &p);
        let d = build_diffusion(&p, &DriveParams::vacuum(), &Environment::zero_temperature());
        for v in [solve_lyapunov(&a, &d).unwrap(), solve_lyapunov_kron(&a, &d).unwrap()] {
            assert!((v.matrix() - Matrix6::identity() * 0.5).amax() < 1e-14);
        }
    }

    #[test]
    fn uncoupled_thermal_magnons() {
        let p = uncoupled();
        let a = build_drift(&detunings_from(&p), &p);
        let env = Environment::with_occupations(1.0, 2.5, 0.75).unwrap();
        let d = build_diffusion(&p, &DriveParams::vacuum(), &env);
        let v = solve_lyapunov(&a, &d).unwrap();
        assert!((v.get(2, 2) - 3.0).abs() < 1e-13);
        assert!((v.get(3, 3) - 3.0).abs() < 1e-13);
        assert!((v.get(4, 4) - 1.25).abs() < 1e-13);
        assert!(v.get(2, 4).abs() < 1e-14);
    }

    #[test]
    fn reference_magnon_variance() {
        let (a, d) = resonant(2.0);
        let v = solve_lyapunov(&a, &d).unwrap();
        // 0.5·10^(−0.227) ≈ 0.2965
        assert!((v.get(2, 2) - 0.2965).abs() < 0.002, "{}", v.get(2, 2));
        let w = solve_lyapunov_kron(&a, &d).unwrap();
        assert!((v.matrix() - w.matrix()).amax() < 1e-9);
        assert!(v.is_physical());
    }

    #[test]
    fn unstable_drift_has_no_steady_state() {
        let p = SystemParams {
            kappa_a: -1.0,
            ..uncoupled()
        };
        let a = build_drift(&detunings_from(&p), &p);
        let d = build_diffusion(&uncoupled(), &DriveParams::vacuum(), &Environment::zero_temperature());
        assert!(matches!(solve_lyapunov(&a, &d), Err(Error::Unstable { .. })));
        assert!(matches!(solve_lyapunov_kron(&a, &d), Err(Error::Unstable { .. })));
    }

    #[test]
    fn steady_state_validates_params() {
        let (p, env) = paper_defaults();
        let p = SystemParams { kappa_m1: 0.0, ..p };
        assert!(matches!(
            steady_state(&p, &DriveParams::vacuum(), &env),
            Err(Error::InvalidParameter { name: "kappa_m1", .. })
        ));
    }

    #[test]
    fn pure_decay_closed_form() {
        let kappa = 1.3;
        let a = DriftMatrix::from_matrix(Matrix6::identity() * -kappa);
        let d = DiffusionMatrix::from_matrix(Matrix6::zeros()).unwrap();
        let mut v0 = Matrix6::identity() * 0.7;
        v0[(0, 2)] = 0.1;
        v0[(2, 0)] = 0.1;
        let v0 = CovarianceMatrix::new(v0).unwrap();
        let t = internal_to_seconds(1.0 / kappa);
        let v = propagate_covariance(&a, &d, &v0, t, t / 2000.0).unwrap();
        let expected = v0.matrix() * (-2.0f64).exp();
        let rel = (v.matrix() - expected).amax() / expected.amax();
        assert!(rel < 1e-8, "relative error {rel}");
    }

    #[test]
    fn step_guard_rejects_large_steps() {
        let (a, d) = resonant(1.0);
        let err = propagate_covariance(&a, &d, &CovarianceMatrix::vacuum(), 1e-6, 1e-7).unwrap_err();
        match err {
            Error::StepSize { suggested_dt, .. } => assert!(suggested_dt < 1e-7),
            other => panic!("unexpected {other:?}"),
        }
        assert!(propagate_covariance(&a, &d, &CovarianceMatrix::vacuum(), 1e-6, 0.0).is_err());
        assert!(propagate_covariance(&a, &d, &CovarianceMatrix::vacuum(), -1.0, 1e-9).is_err());
    }

    #[test]
    fn steady_state_is_stationary_under_propagation() {
        let (a, d) = resonant(2.0);
        let v = solve_lyapunov(&a, &d).unwrap();
        let t = internal_to_seconds(10.0);
        let w = propagate_covariance(&a, &d, &v, t, internal_to_seconds(1e-3)).unwrap();
        assert!((w.matrix() - v.matrix()).amax() < 1e-8);
    }

    #[test]
    fn zero_duration_returns_initial_state() {
        let (a, d) = resonant(1.0);
        let v = propagate_covariance(&a, &d, &CovarianceMatrix::vacuum(), 0.0, 1e-12).unwrap();
        assert_eq!(v, CovarianceMatrix::vacuum());
    }

    #[test]
    fn dark_mode_variance_stays_vacuum_during_transient() {
        let (p, _) = paper_defaults();
        let a = build_drift(&detunings_from(&p), &p);
        let d = build_diffusion(&p, &DriveParams::new(2.0, 0.0).unwrap(), &Environment::zero_temperature());
        let mut worst: f64 = 0.0;
        let t = internal_to_seconds(20.0);
        propagate_covariance_observed(&a, &d, &CovarianceMatrix::vacuum(), t, internal_to_seconds(1e-3), |_, v| {
            let var_my = 0.5 * (v.get(3, 3) + v.get(5, 5) - 2.0 * v.get(3, 5));
            worst = worst.max((var_my - 0.5).abs());
        })
        .unwrap();
        assert!(worst < 1e-8, "dark-mode deviation {worst}");
    }

    #[test]
    fn covariance_wrapper_checks_input() {
        let mut m = Matrix6::identity();
        m[(0, 1)] = 0.2;
        assert!(CovarianceMatrix::new(m).is_err());
        assert!(CovarianceMatrix::new(-Matrix6::identity()).is_err());
        let mut m = Matrix6::identity();
        m[(0, 1)] = 0.2;
        m[(1, 0)] = 0.2 + 1e-15;
        let v = CovarianceMatrix::new(m).unwrap();
        assert_eq!(v.matrix(), &v.matrix().transpose());
    }

    #[test]
    fn unphysical_matrix_is_flagged() {
        let v = CovarianceMatrix::new(Matrix6::identity() * 0.3).unwrap();
        assert!(!v.is_physical());
        assert!(CovarianceMatrix::vacuum().is_physical());
    }

    #[test]
    fn squeezing_phase_rotates_steady_state() {
        let (p, env) = paper_defaults();
        let det = Detunings {
            delta_a: 1.7,
            delta_m1: -0.6,
            delta_m2: -0.6,
        };
        let a = build_drift(&det, &p);
        let v0 = solve_lyapunov(&a, &build_diffusion(&p, &DriveParams::new(1.5, 0.0).unwrap(), &env)).unwrap();
        for theta in [std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_2, std::f64::consts::PI] {
            let vt = solve_lyapunov(&a, &build_diffusion(&p, &DriveParams::new(1.5, theta).unwrap(), &env)).unwrap();
            let r = global_rotation(-theta / 2.0);
            let rotated = r * v0.matrix() * r.transpose();
            assert!((rotated - vt.matrix()).amax() < 1e-9, "theta = {theta}");
        }
    }
}
