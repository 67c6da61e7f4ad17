//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative singular-value cutoff for rank decisions on column-scaled
/// regressor matrices.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Relative eigenvalue floor below which a covariance counts as singular.
pub const PD_TOLERANCE: f64 = 1e-10;

fn scale_columns(x: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let mut scaled = x.clone();
    for mut col in scaled.column_iter_mut() {
        let norm = col.norm();
        if norm == 0.0 || !norm.is_finite() {
            return None;
        }
        col /= norm;
    }
    Some(scaled)
}

/// Full column rank test, invariant to column scaling.
pub fn has_full_column_rank(x: &DMatrix<f64>) -> bool {
    if x.nrows() < x.ncols() {
        return false;
    }
    let Some(scaled) = scale_columns(x) else { return false };
    let sv = scaled.singular_values();
    let max = sv.max();
    let min = sv.min();
    max > 0.0 && min > RANK_TOLERANCE * max
}

/// Least-squares solution of `x b = y` for a full-column-rank `x`.
pub fn least_squares(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
    if !has_full_column_rank(x) {
        return Err(Error::RankDeficient { context: None });
    }
    let qr = x.clone().qr();
    let qty = qr.q().transpose() * y;
    let r = qr.r();
    r.solve_upper_triangular(&qty).ok_or_else(|| Error::Numerical("triangular solve failed".into()))
}

/// Symmetry and positive-definiteness check for a covariance matrix.
pub fn check_spd(m: &DMatrix<f64>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::InvalidInput("covariance must be square".into()));
    }
    let scale = m.amax().max(f64::MIN_POSITIVE);
    if (m - m.transpose()).amax() > 1e-12 * scale {
        return Err(Error::NotPositiveDefinite("matrix is not symmetric".into()));
    }
    let eig = m.clone().symmetric_eigenvalues();
    let max = eig.max();
    let min = eig.min();
    if !(max > 0.0) || min <= PD_TOLERANCE * max {
        return Err(Error::NotPositiveDefinite(format!("eigenvalues span [{min:e}, {max:e}]")));
    }
    Ok(())
}

pub fn spd_inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    m.clone()
        .cholesky()
        .map(|c| c.inverse())
        .ok_or_else(|| Error::NotPositiveDefinite("Cholesky factorization failed".into()))
}

pub fn log_det_spd(m: &DMatrix<f64>) -> Result<f64> {
    let chol =
        m.clone().cholesky().ok_or_else(|| Error::NotPositiveDefinite("Cholesky factorization failed".into()))?;
    Ok(2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>())
}

/// Eigenvalue moduli of a general square matrix, largest first.
pub fn eigen_moduli(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::InvalidInput("eigenvalues need a square matrix".into()));
    }
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = m
        .clone()
        .try_schur(f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("Schur decomposition did not converge".into()))?;
    let mut moduli: Vec<f64> = schur.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    moduli.sort_by(|a, b| b.total_cmp(a));
    Ok(moduli)
}

/// Relative Frobenius distance `|a - b| / |b|`.
pub fn relative_frobenius(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

pub fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}
