//! Drift and diffusion matrices of the linearized quadrature dynamics
//! `du/dt = A u + n(t)`, basis `(δX, δY, δx₁, δy₁, δx₂, δy₂)`.

use nalgebra::{Complex, Matrix2, Matrix6, Schur, SymmetricEigen};

use crate::error::{Error, Result};
use crate::model::{Detunings, DriveParams, Environment, SystemParams};

/// Eigenvalues must have real part below `-STABILITY_MARGIN` (internal units).
pub const STABILITY_MARGIN: f64 = 1e-9;

/// Most negative eigenvalue tolerated in a diffusion matrix.
pub const PSD_TOLERANCE: f64 = 1e-12;

const SCHUR_MAX_ITERATIONS: usize = 10_000;

/// Index of the first quadrature of each mode in the state vector.
pub const CAVITY: usize = 0;
pub const MAGNON1: usize = 2;
pub const MAGNON2: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftMatrix(Matrix6<f64>);

impl DriftMatrix {
    /// Wraps an arbitrary 6×6 drift matrix, e.g. for solver cross-checks.
    pub fn from_matrix(a: Matrix6<f64>) -> Self {
        Self(a)
    }

    pub fn matrix(&self) -> &Matrix6<f64> {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionMatrix(Matrix6<f64>);

impl DiffusionMatrix {
    /// Wraps a symmetric positive-semidefinite 6×6 matrix.
    pub fn from_matrix(d: Matrix6<f64>) -> Result<Self> {
        if d != d.transpose() {
            return Err(Error::Domain("diffusion matrix must be exactly symmetric".into()));
        }
        let min_eig = SymmetricEigen::new(d).eigenvalues.min();
        if min_eig < -PSD_TOLERANCE {
            return Err(Error::Domain(format!(
                "diffusion matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})"
            )));
        }
        Ok(Self(d))
    }

    pub fn matrix(&self) -> &Matrix6<f64> {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub stable: bool,
    pub max_real_part: f64,
    pub margin: f64,
}

/// `[[0, 1], [-1, 0]]`, the generator of quadrature rotations.
fn symplectic_unit() -> Matrix2<f64> {
    Matrix2::new(0.0, 1.0, -1.0, 0.0)
}

fn set_block(m: &mut Matrix6<f64>, row: usize, col: usize, block: &Matrix2<f64>) {
    m.fixed_view_mut::<2, 2>(row, col).copy_from(block);
}

/// Drift matrix of the rotating-wave beam-splitter model.
///
/// Each mode contributes `[[-κ, Δ], [-Δ, -κ]]` on the diagonal; the cavity
/// couples to magnon `i` through `gᵢ·[[0, 1], [-1, 0]]` in both the
/// cavity row and the magnon row. The magnons do not couple directly.
pub fn build_drift(detunings: &Detunings, params: &SystemParams) -> DriftMatrix {
    let j = symplectic_unit();
    let mode = |kappa: f64, delta: f64| Matrix2::identity() * -kappa + j * delta;

    let mut a = Matrix6::zeros();
    set_block(&mut a, CAVITY, CAVITY, &mode(params.kappa_a, detunings.delta_a));
    set_block(&mut a, MAGNON1, MAGNON1, &mode(params.kappa_m1, detunings.delta_m1));
    set_block(&mut a, MAGNON2, MAGNON2, &mode(params.kappa_m2, detunings.delta_m2));
    for (idx, g) in [(MAGNON1, params.g1), (MAGNON2, params.g2)] {
        set_block(&mut a, CAVITY, idx, &(j * g));
        set_block(&mut a, idx, CAVITY, &(j * g));
    }
    DriftMatrix(a)
}

/// Symmetrized white-noise correlation matrix of the inputs `n(t)`.
///
/// The cavity sees the squeezed vacuum with `𝒩 = sinh² r` and
/// `ℳ = e^{iθ} sinh r cosh r`:
/// `2κ_a·[[𝒩+½+Re ℳ, Im ℳ], [Im ℳ, 𝒩+½−Re ℳ]]`.
/// Each magnon sees a thermal bath, `2κ_mᵢ(N_mᵢ+½)·I₂`.
pub fn build_diffusion(
    params: &SystemParams,
    drive: &DriveParams,
    env: &Environment,
) -> DiffusionMatrix {
    let n = drive.photon_number();
    let (re_m, im_m) = drive.anomalous_correlation();
    let ka2 = 2.0 * params.kappa_a;
    let cavity = Matrix2::new(
        ka2 * (n + 0.5 + re_m),
        ka2 * im_m,
        ka2 * im_m,
        ka2 * (n + 0.5 - re_m),
    );

    let mut d = Matrix6::zeros();
    set_block(&mut d, CAVITY, CAVITY, &cavity);
    set_block(
        &mut d,
        MAGNON1,
        MAGNON1,
        &(Matrix2::identity() * (2.0 * params.kappa_m1 * (env.n_m1() + 0.5))),
    );
    set_block(
        &mut d,
        MAGNON2,
        MAGNON2,
        &(Matrix2::identity() * (2.0 * params.kappa_m2 * (env.n_m2() + 0.5))),
    );
    DiffusionMatrix(d)
}

/// All eigenvalues of a real 6×6 matrix via the real Schur form.
pub(crate) fn eigenvalues6(m: &Matrix6<f64>) -> Result<Vec<Complex<f64>>> {
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("matrix has non-finite entries".into()));
    }
    let schur = Schur::try_new(*m, f64::EPSILON, SCHUR_MAX_ITERATIONS)
        .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

pub fn stability_check(a: &DriftMatrix) -> Result<StabilityReport> {
    let max_real_part = eigenvalues6(&a.0)?
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(StabilityReport {
        stable: max_real_part < -STABILITY_MARGIN,
        max_real_part,
        margin: -max_real_part,
    })
}

/// Phase-space rotation `u → R u` induced by `a → a·e^{-iφ}`:
/// `[[cos φ, sin φ], [-sin φ, cos φ]]`.
pub fn quadrature_rotation(phi: f64) -> Matrix2<f64> {
    let (s, c) = phi.sin_cos();
    Matrix2::new(c, s, -s, c)
}

/// The same quadrature rotation applied to all three modes.
pub fn global_rotation(phi: f64) -> Matrix6<f64> {
    let r = quadrature_rotation(phi);
    let mut m = Matrix6::zeros();
    for idx in [CAVITY, MAGNON1, MAGNON2] {
        set_block(&mut m, idx, idx, &r);
    }
    m
}
