//! Entanglement and squeezing diagnostics of a covariance matrix.
//!
//! Every threshold here assumes the vacuum variance is ½.

use std::f64::consts::LN_10;

use nalgebra::{DMatrix, Matrix4};

use crate::error::{Error, Result};
use crate::steadystate::{CovarianceMatrix, SYMMETRY_TOLERANCE};
use crate::symplectic::symplectic_eigenvalues;

/// Quadrature variance of the vacuum.
pub const VACUUM_VARIANCE: f64 = 0.5;
/// Separable states satisfy `⟨δM_x²⟩ + ⟨δm_y²⟩ ≥ DUAN_BOUND`.
pub const DUAN_BOUND: f64 = 1.0;
/// Separable states satisfy `⟨δM_x²⟩·⟨δm_y²⟩ ≥ MANCINI_BOUND`.
pub const MANCINI_BOUND: f64 = 0.25;

/// Reduced state of the two magnon modes, basis `(δx₁, δy₁, δx₂, δy₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeCM(Matrix4<f64>);

impl TwoModeCM {
    pub fn new(v: Matrix4<f64>) -> Result<Self> {
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("two-mode covariance has non-finite entries".into()));
        }
        let asym = (v - v.transpose()).amax();
        if asym > SYMMETRY_TOLERANCE * v.amax() {
            return Err(Error::Domain(format!(
                "two-mode covariance is not symmetric (max asymmetry {asym:.3e})"
            )));
        }
        if v.diagonal().iter().any(|&x| x <= 0.0) {
            return Err(Error::Domain("two-mode covariance diagonal must be positive".into()));
        }
        Ok(Self((v + v.transpose()) * 0.5))
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    /// The same state with the two modes relabelled.
    pub fn swapped(&self) -> Self {
        let perm = Matrix4::new(
            0.0, 0.0, 1.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0,
        );
        Self(perm * self.0 * perm.transpose())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementResult {
    pub log_negativity: f64,
    /// Smallest symplectic eigenvalue of the partially transposed state.
    pub nu_minus: f64,
}

/// Variances of the collective quadratures of `M = (m₁+m₂)/√2` and `m = (m₁−m₂)/√2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectiveVariances {
    /// `⟨δM_x²⟩` of the bright mode `M`.
    pub bright_x: f64,
    /// `⟨δM_y²⟩`
    pub bright_y: f64,
    /// `⟨δm_x²⟩` of the dark mode `m`.
    pub dark_x: f64,
    /// `⟨δm_y²⟩`
    pub dark_y: f64,
}

pub fn reduce_to_magnons(v: &CovarianceMatrix) -> TwoModeCM {
    TwoModeCM(v.matrix().fixed_view::<4, 4>(2, 2).into_owned())
}

/// Logarithmic negativity `max(0, −ln 2ν₋)` between the two modes.
///
/// `ν₋` is the smallest modulus among the eigenvalues of `iΩṼ` with
/// `Ṽ = P·V·P`, `P = diag(1, 1, 1, −1)` (partial transposition of mode 2).
pub fn log_negativity(v: &TwoModeCM) -> Result<EntanglementResult> {
    let p = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, 1.0, -1.0));
    let transposed = p * v.0 * p;
    let nu = symplectic_eigenvalues(&DMatrix::from_column_slice(4, 4, transposed.as_slice()))?;
    let nu_minus = nu[0];
    if nu_minus.is_nan() || nu_minus <= 0.0 {
        return Err(Error::Numerical(format!(
            "partial-transpose symplectic eigenvalue is not positive ({nu_minus:e})"
        )));
    }
    Ok(EntanglementResult {
        log_negativity: (-(2.0 * nu_minus).ln()).max(0.0),
        nu_minus,
    })
}

pub fn collective_variances(v: &CovarianceMatrix) -> CollectiveVariances {
    let (x1, y1, x2, y2) = (2, 3, 4, 5);
    let m = v.matrix();
    CollectiveVariances {
        bright_x: 0.5 * (m[(x1, x1)] + m[(x2, x2)] + 2.0 * m[(x1, x2)]),
        bright_y: 0.5 * (m[(y1, y1)] + m[(y2, y2)] + 2.0 * m[(y1, y2)]),
        dark_x: 0.5 * (m[(x1, x1)] + m[(x2, x2)] - 2.0 * m[(x1, x2)]),
        dark_y: 0.5 * (m[(y1, y1)] + m[(y2, y2)] - 2.0 * m[(y1, y2)]),
    }
}

/// `⟨δM_x²⟩ + ⟨δm_y²⟩`; below [`DUAN_BOUND`] certifies entanglement.
pub fn duan_sum(v: &CovarianceMatrix) -> f64 {
    let c = collective_variances(v);
    c.bright_x + c.dark_y
}

/// `⟨δM_x²⟩·⟨δm_y²⟩`; below [`MANCINI_BOUND`] certifies entanglement.
pub fn mancini_product(v: &CovarianceMatrix) -> f64 {
    let c = collective_variances(v);
    c.bright_x * c.dark_y
}

/// Squeezing `−10·log₁₀(variance / ½)` in dB; positive below vacuum.
pub fn squeezing_db(variance: f64) -> Result<f64> {
    if !(variance.is_finite() && variance > 0.0) {
        return Err(Error::Domain(format!("variance must be positive, got {variance}")));
    }
    Ok(-10.0 * (variance / VACUUM_VARIANCE).log10())
}

/// Squeezing of the input field, `10·log₁₀(e^{2r}) = 20r / ln 10` dB.
pub fn input_squeezing_db(r: f64) -> f64 {
    20.0 * r / LN_10
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix6;

    fn tmsv(s: f64) -> TwoModeCM {
        let c = (2.0 * s).cosh() / 2.0;
        let sh = (2.0 * s).sinh() / 2.0;
        TwoModeCM::new(Matrix4::new(
            c, 0.0, sh, 0.0, //
            0.0, c, 0.0, -sh, //
            sh, 0.0, c, 0.0, //
            0.0, -sh, 0.0, c,
        ))
        .unwrap()
    }

    fn six(m: Matrix6<f64>) -> CovarianceMatrix {
        CovarianceMatrix::new(m).unwrap()
    }

    #[test]
    fn vacuum_is_separable() {
        let v = CovarianceMatrix::vacuum();
        let two = reduce_to_magnons(&v);
        assert_eq!(*two.matrix(), Matrix4::identity() * 0.5);
        let e = log_negativity(&two).unwrap();
        assert!((e.nu_minus - 0.5).abs() < 1e-14);
        assert_eq!(e.log_negativity, 0.0);
        assert_eq!(duan_sum(&v), 1.0);
        assert_eq!(mancini_product(&v), 0.25);
        let c = collective_variances(&v);
        for x in [c.bright_x, c.bright_y, c.dark_x, c.dark_y] {
            assert_eq!(x, 0.5);
        }
    }

    #[test]
    fn reduction_keeps_magnon_blocks() {
        let mut m = Matrix6::identity();
        m[(2, 2)] = 1.5;
        m[(3, 3)] = 1.5;
        m[(4, 4)] = 0.8;
        m[(5, 5)] = 0.9;
        m[(0, 0)] = 7.0;
        let two = reduce_to_magnons(&six(m));
        assert_eq!(
            *two.matrix(),
            Matrix4::from_diagonal(&nalgebra::Vector4::new(1.5, 1.5, 0.8, 0.9))
        );
    }

    #[test]
    fn two_mode_squeezed_vacuum() {
        let e = log_negativity(&tmsv(1.0)).unwrap();
        assert!((e.nu_minus - (-2.0f64).exp() / 2.0).abs() < 1e-12);
        assert!((e.log_negativity - 2.0).abs() < 1e-10);
    }

    #[test]
    fn uncorrelated_equal_magnons() {
        let mut m = Matrix6::identity() * 0.5;
        m[(2, 2)] = 0.3;
        m[(4, 4)] = 0.3;
        let c = collective_variances(&six(m));
        assert!((c.bright_x - 0.3).abs() < 1e-15);
        assert!((c.dark_x - 0.3).abs() < 1e-15);
    }

    #[test]
    fn thermal_magnons_respect_criteria() {
        let n = 0.8;
        let mut m = Matrix6::identity() * 0.5;
        for i in 2..6 {
            m[(i, i)] = n + 0.5;
        }
        let v = six(m);
        assert!((duan_sum(&v) - 2.0 * (n + 0.5)).abs() < 1e-14);
        assert!((mancini_product(&v) - (n + 0.5).powi(2)).abs() < 1e-14);
        assert_eq!(log_negativity(&reduce_to_magnons(&v)).unwrap().log_negativity, 0.0);
    }

    #[test]
    fn decibel_conversions() {
        assert_eq!(squeezing_db(0.5).unwrap(), 0.0);
        assert!((squeezing_db(0.296).unwrap() - 2.27).abs() < 0.01);
        assert!((squeezing_db(0.0935).unwrap() - 7.28).abs() < 0.01);
        assert!(squeezing_db(0.0).is_err());
        assert!(squeezing_db(-1.0).is_err());
        assert_eq!(input_squeezing_db(0.0), 0.0);
        assert!((input_squeezing_db(2.0) - 17.37).abs() < 0.005);
        assert!((input_squeezing_db(1.0) - 8.69).abs() < 0.005);
        // 10·log10(e^{2r}) computed the long way
        assert!((input_squeezing_db(1.3) - 10.0 * (2.6f64).exp().log10()).abs() < 1e-12);
    }

    #[test]
    fn log_negativity_is_symmetric_under_swap() {
        let two = tmsv(0.7);
        let a = log_negativity(&two).unwrap().log_negativity;
        let b = log_negativity(&two.swapped()).unwrap().log_negativity;
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn unphysical_input_is_reported() {
        let m = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, 1.0, 1.0));
        let mut bad = m;
        bad[(0, 2)] = 2.0;
        bad[(2, 0)] = 2.0;
        assert!(log_negativity(&TwoModeCM::new(bad).unwrap()).is_err());
    }
}
