//! Recursive (Cholesky) identification of structural shocks.
//!
//! Reduced-form innovations are `u = B0 w` with `w` orthonormal and `B0`
//! lower triangular in the chosen variable ordering. Under the default
//! ordering (price, policy, output) policy shocks do not move prices on
//! impact and output shocks move neither prices nor policy on impact.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::role::Role;

/// Lower-triangular impact matrix together with the ordering that
/// produced it. Rows and columns of `b0` follow `ordering`; column `j` is
/// the impact of the structural shock labelled `ordering[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuralFactor {
    pub ordering: Vec<Role>,
    pub b0: DMatrix<f64>,
}

impl StructuralFactor {
    pub fn shock_index(&self, role: Role) -> Option<usize> {
        self.ordering.iter().position(|&r| r == role)
    }

    /// Impact matrix with rows in `variables` order and columns in shock
    /// (ordering) order.
    pub fn impact_matrix(&self, variables: &[Role]) -> Result<DMatrix<f64>> {
        let rows = positions(variables, &self.ordering)?;
        let n = self.ordering.len();
        Ok(DMatrix::from_fn(n, n, |i, j| self.b0[(rows[i], j)]))
    }
}

/// Position in `ordering` of every role in `variables`.
fn positions(variables: &[Role], ordering: &[Role]) -> Result<Vec<usize>> {
    if variables.len() != ordering.len() {
        return Err(Error::InvalidInput(format!("ordering {ordering:?} does not match variables {variables:?}")));
    }
    let mut seen = vec![false; ordering.len()];
    variables
        .iter()
        .map(|v| {
            let pos = ordering
                .iter()
                .position(|o| o == v)
                .ok_or_else(|| Error::InvalidInput(format!("{v} missing from ordering {ordering:?}")))?;
            if std::mem::replace(&mut seen[pos], true) {
                return Err(Error::InvalidInput(format!("{v} repeated in {variables:?}")));
            }
            Ok(pos)
        })
        .collect()
}

/// Lower Cholesky factor with a strictly positive diagonal.
pub fn cholesky_lower(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !m.is_square() {
        return Err(Error::InvalidInput("Cholesky needs a square matrix".into()));
    }
    let n = m.nrows();
    let scale = m.amax().max(f64::MIN_POSITIVE);
    if (m - m.transpose()).amax() > 1e-12 * scale {
        return Err(Error::NotPositiveDefinite("matrix is not symmetric".into()));
    }
    let mut l = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut pivot = m[(j, j)];
        for k in 0..j {
            pivot -= l[(j, k)] * l[(j, k)];
        }
        if !(pivot > 0.0) || !pivot.is_finite() {
            return Err(Error::NotPositiveDefinite(format!("pivot {j} is {pivot:e}")));
        }
        let d = pivot.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut v = m[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / d;
        }
    }
    Ok(l)
}

/// Factors `sigma_u` (rows and columns labelled by `variables`) after
/// permuting it into `ordering`.
pub fn cholesky_identify(sigma_u: &DMatrix<f64>, variables: &[Role], ordering: &[Role]) -> Result<StructuralFactor> {
    if sigma_u.nrows() != variables.len() {
        return Err(Error::InvalidInput("covariance size does not match variables".into()));
    }
    let idx = positions(ordering, variables)?;
    let n = idx.len();
    let permuted = DMatrix::from_fn(n, n, |i, j| sigma_u[(idx[i], idx[j])]);
    let b0 = cholesky_lower(&permuted)?;
    Ok(StructuralFactor { ordering: ordering.to_vec(), b0 })
}

/// A labelled impulse vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Impulse {
    pub shock: Role,
    pub sign: i8,
    pub roles: Vec<Role>,
    pub values: Vec<f64>,
}

impl Impulse {
    /// Values reordered to `variables`.
    pub fn aligned(&self, variables: &[Role]) -> Result<DVector<f64>> {
        let idx = positions(variables, &self.roles)?;
        Ok(DVector::from_iterator(idx.len(), idx.iter().map(|&i| self.values[i])))
    }
}

/// Impact of one structural shock scaled so the shocked variable moves by
/// exactly `sign` on impact.
pub fn unit_impulse(factor: &StructuralFactor, shock_role: Role, sign: i8) -> Result<Impulse> {
    if sign != 1 && sign != -1 {
        return Err(Error::InvalidInput(format!("impulse sign must be 1 or -1, got {sign}")));
    }
    let j =
        factor.shock_index(shock_role).ok_or_else(|| Error::InvalidInput(format!("{shock_role} not in ordering")))?;
    let diag = factor.b0[(j, j)];
    if !(diag > 0.0) {
        return Err(Error::ZeroDiagonal(shock_role));
    }
    let s = f64::from(sign);
    let mut values: Vec<f64> = factor.b0.column(j).iter().map(|v| s * v / diag).collect();
    values[j] = s;
    Ok(Impulse { shock: shock_role, sign, roles: factor.ordering.clone(), values })
}

/// Relative Frobenius error of `B0 B0'` against the reordered covariance.
pub fn reconstruction_error(factor: &StructuralFactor, sigma_u: &DMatrix<f64>, variables: &[Role]) -> Result<f64> {
    let impact = factor.impact_matrix(variables)?;
    Ok(linalg::relative_frobenius(&(&impact * impact.transpose()), sigma_u))
}
