//! Symplectic spectra of real covariance matrices (vacuum variance ½).

use nalgebra::{DMatrix, Schur};

use crate::error::{Error, Result};

/// Relative size of the real parts tolerated in the spectrum of `ΩV`.
pub const IMAGINARY_RESIDUE_TOLERANCE: f64 = 1e-9;

/// `Ω = ⊕ [[0, 1], [-1, 0]]` for `modes` modes.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Symplectic eigenvalues `ν₁ ≤ … ≤ ν_n` of a `2n × 2n` real symmetric matrix.
///
/// The spectrum of `iΩV` is `{±νₖ}`; equivalently `ΩV` has eigenvalues
/// `±iνₖ`. A real part above the tolerance means `V` is not a valid
/// covariance matrix (for instance not positive definite) and is reported as
/// an error rather than silently discarded.
pub fn symplectic_eigenvalues(v: &DMatrix<f64>) -> Result<Vec<f64>> {
    let dim = v.nrows();
    if dim == 0 || !dim.is_multiple_of(2) || v.ncols() != dim {
        return Err(Error::Domain(format!(
            "covariance matrix must be square with even dimension, got {}×{}",
            v.nrows(),
            v.ncols()
        )));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("covariance matrix has non-finite entries".into()));
    }
    let product = symplectic_form(dim / 2) * v;
    let schur = Schur::try_new(product, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?;
    let eigs = schur.complex_eigenvalues();
    let scale = eigs.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let worst = eigs.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    if worst > IMAGINARY_RESIDUE_TOLERANCE * scale {
        return Err(Error::Numerical(format!(
            "symplectic spectrum has real residue {worst:.3e} (scale {scale:.3e}); input is not a physical covariance matrix"
        )));
    }
    let mut moduli: Vec<f64> = eigs.iter().map(|z| z.im.abs()).collect();
    moduli.sort_by(f64::total_cmp);
    Ok(moduli.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_has_half_spectrum() {
        let v = DMatrix::identity(6, 6) * 0.5;
        let nu = symplectic_eigenvalues(&v).unwrap();
        assert_eq!(nu.len(), 3);
        for x in nu {
            assert!((x - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn thermal_state_spectrum() {
        let v = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.5, 1.5, 0.5, 0.5]));
        let nu = symplectic_eigenvalues(&v).unwrap();
        assert!((nu[0] - 0.5).abs() < 1e-14);
        assert!((nu[1] - 1.5).abs() < 1e-14);
    }

    #[test]
    fn squeezed_single_mode_is_pure() {
        let s: f64 = 1.3;
        let v = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            0.5 * (-2.0 * s).exp(),
            0.5 * (2.0 * s).exp(),
        ]));
        let nu = symplectic_eigenvalues(&v).unwrap();
        assert!((nu[0] - 0.5).abs() < 1e-13);
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let v = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -1.0]));
        assert!(symplectic_eigenvalues(&v).is_err());
        assert!(symplectic_eigenvalues(&DMatrix::identity(3, 3)).is_err());
    }
}
