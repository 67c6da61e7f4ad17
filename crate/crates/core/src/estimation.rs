//! Equation-by-equation OLS and Zellner SUR (feasible GLS) for the partial
//! VAR, plus the companion form and its stability check.

use log::warn;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::design::{DesignMatrix, Regressor, SystemSpec};
use crate::error::{Error, Result};
use crate::linalg;
use crate::role::Role;

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub coefficients: DVector<f64>,
    pub residuals: DVector<f64>,
}

pub fn ols(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<OlsFit> {
    if x.nrows() != y.len() {
        return Err(Error::InvalidInput("response and regressors differ in length".into()));
    }
    if x.nrows() <= x.ncols() {
        return Err(Error::RankDeficient { context: Some("more regressors than observations".into()) });
    }
    let coefficients = linalg::least_squares(x, y)?;
    let residuals = y - x * &coefficients;
    Ok(OlsFit { coefficients, residuals })
}

pub fn ols_estimate(design: &DesignMatrix) -> Result<OlsFit> {
    ols(&design.regressors, &design.response).map_err(|e| match e {
        Error::RankDeficient { .. } => Error::RankDeficient { context: Some(format!("{} equation", design.equation)) },
        other => other,
    })
}

/// Divisor used when turning a residual cross-product into a covariance.
#[derive(Debug, Clone, PartialEq)]
pub enum CovDivisor {
    /// Number of observations.
    T,
    /// `sqrt((T - k_i)(T - k_j))` for the pair of equations `(i, j)`.
    TMinusK(Vec<usize>),
}

/// Residual covariance of a `T x m` residual matrix.
pub fn residual_covariance(residuals: &DMatrix<f64>, divisor: &CovDivisor) -> Result<DMatrix<f64>> {
    let (t, m) = residuals.shape();
    if t < m || m == 0 {
        return Err(Error::InvalidInput(format!("{t} residual rows cannot identify a {m}x{m} covariance")));
    }
    let mut cov = residuals.transpose() * residuals;
    match divisor {
        CovDivisor::T => cov /= t as f64,
        CovDivisor::TMinusK(ks) => {
            if ks.len() != m || ks.iter().any(|&k| k >= t) {
                return Err(Error::InvalidInput("degrees-of-freedom vector does not fit residuals".into()));
            }
            for i in 0..m {
                for j in 0..m {
                    cov[(i, j)] /= (((t - ks[i]) * (t - ks[j])) as f64).sqrt();
                }
            }
        }
    }
    // exact symmetry
    cov = (&cov + cov.transpose()) * 0.5;
    linalg::check_spd(&cov)?;
    Ok(cov)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurOptions {
    /// Iterate FGLS to convergence instead of stopping after two steps.
    pub iterate: bool,
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for SurOptions {
    fn default() -> Self {
        Self { iterate: false, max_iterations: 100, tolerance: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurFit {
    pub coefficients: Vec<DVector<f64>>,
    pub std_errors: Vec<DVector<f64>>,
    /// `T_eff x m`, one column per equation.
    pub residuals: DMatrix<f64>,
    /// Residual covariance of `residuals` with divisor `T`.
    pub sigma_u: DMatrix<f64>,
    /// Number of GLS steps taken after the OLS stage.
    pub gls_steps: usize,
}

struct CrossProducts {
    xx: Vec<Vec<DMatrix<f64>>>,
    xy: Vec<Vec<DVector<f64>>>,
    offsets: Vec<usize>,
    sizes: Vec<usize>,
    total: usize,
}

impl CrossProducts {
    fn new(designs: &[DesignMatrix]) -> Self {
        let m = designs.len();
        let xx = (0..m)
            .map(|i| (0..m).map(|j| designs[i].regressors.transpose() * &designs[j].regressors).collect())
            .collect();
        let xy = (0..m)
            .map(|i| (0..m).map(|j| designs[i].regressors.transpose() * &designs[j].response).collect())
            .collect();
        let sizes: Vec<usize> = designs.iter().map(DesignMatrix::k).collect();
        let offsets = sizes
            .iter()
            .scan(0, |acc, &k| {
                let start = *acc;
                *acc += k;
                Some(start)
            })
            .collect();
        let total = sizes.iter().sum();
        Self { xx, xy, offsets, sizes, total }
    }

    /// `X' (S (x) I) X` and `X' (S (x) I) y` for a weight matrix `S`.
    fn weighted(&self, weights: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>) {
        let m = self.offsets.len();
        let mut g = DMatrix::zeros(self.total, self.total);
        let mut b = DVector::zeros(self.total);
        for i in 0..m {
            let ki = self.sizes[i];
            for j in 0..m {
                let kj = self.sizes[j];
                let w = weights[(i, j)];
                g.view_mut((self.offsets[i], self.offsets[j]), (ki, kj)).copy_from(&(&self.xx[i][j] * w));
                let mut bi = b.rows_mut(self.offsets[i], ki);
                bi += &self.xy[i][j] * w;
            }
        }
        (g, b)
    }

    fn solve(&self, weights: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
        let (g, b) = self.weighted(weights);
        // equilibrate before factorizing; levels data mixes very different scales
        let d: DVector<f64> = g.diagonal().map(|v| 1.0 / v.sqrt());
        if d.iter().any(|v| !v.is_finite()) {
            return Err(Error::RankDeficient { context: Some("stacked system".into()) });
        }
        let scaled = DMatrix::from_fn(g.nrows(), g.ncols(), |r, c| g[(r, c)] * d[r] * d[c]);
        let chol = scaled.cholesky().ok_or(Error::RankDeficient { context: Some("stacked system".into()) })?;
        let beta = chol.solve(&b.component_mul(&d)).component_mul(&d);
        let inv_scaled = chol.inverse();
        let cov = DMatrix::from_fn(g.nrows(), g.ncols(), |r, c| inv_scaled[(r, c)] * d[r] * d[c]);
        Ok((beta, cov))
    }

    fn split(&self, stacked: &DVector<f64>) -> Vec<DVector<f64>> {
        self.offsets.iter().zip(&self.sizes).map(|(&off, &k)| stacked.rows(off, k).into_owned()).collect()
    }
}

fn residual_matrix(designs: &[DesignMatrix], coefficients: &[DVector<f64>]) -> DMatrix<f64> {
    let t = designs[0].rows();
    let mut r = DMatrix::zeros(t, designs.len());
    for (j, (d, b)) in designs.iter().zip(coefficients).enumerate() {
        r.set_column(j, &(&d.response - &d.regressors * b));
    }
    r
}

/// Two-step Zellner SUR: OLS per equation, then GLS weighted by the inverse
/// OLS residual covariance.
pub fn sur_estimate(designs: &[DesignMatrix]) -> Result<SurFit> {
    sur_estimate_with(designs, &SurOptions::default())
}

pub fn sur_estimate_with(designs: &[DesignMatrix], options: &SurOptions) -> Result<SurFit> {
    let Some(first) = designs.first() else {
        return Err(Error::InvalidInput("no equations".into()));
    };
    if designs.iter().any(|d| d.years != first.years || d.rows() != first.rows()) {
        return Err(Error::InvalidInput("equations must cover identical dates".into()));
    }

    let mut coefficients =
        designs.iter().map(|d| ols_estimate(d).map(|f| f.coefficients)).collect::<Result<Vec<_>>>()?;
    let mut residuals = residual_matrix(designs, &coefficients);
    let mut sigma = residual_covariance(&residuals, &CovDivisor::T)?;

    let cross = CrossProducts::new(designs);
    let mut steps = 0;
    let max_steps = if options.iterate { options.max_iterations.max(1) } else { 1 };
    while steps < max_steps {
        let weights = linalg::spd_inverse(&sigma)?;
        let (stacked, _) = cross.solve(&weights)?;
        let next = cross.split(&stacked);
        let change = next.iter().zip(&coefficients).map(|(a, b)| (a - b).amax()).fold(0.0, f64::max);
        coefficients = next;
        residuals = residual_matrix(designs, &coefficients);
        sigma = residual_covariance(&residuals, &CovDivisor::T)?;
        steps += 1;
        if change < options.tolerance {
            break;
        }
    }

    let ks: Vec<usize> = designs.iter().map(DesignMatrix::k).collect();
    let sigma_dof = residual_covariance(&residuals, &CovDivisor::TMinusK(ks))?;
    let (_, cov) = cross.solve(&linalg::spd_inverse(&sigma_dof)?)?;
    let se_stacked = cov.diagonal().map(|v| v.max(0.0).sqrt());
    let std_errors = cross.split(&se_stacked);

    Ok(SurFit { coefficients, std_errors, residuals, sigma_u: sigma, gls_steps: steps })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquationEstimate {
    pub response: Role,
    pub labels: Vec<Regressor>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
}

impl EquationEstimate {
    pub fn coefficient(&self, label: &Regressor) -> Option<f64> {
        self.labels.iter().position(|l| l == label).map(|i| self.coefficients[i])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stability {
    pub stable: bool,
    /// Eigenvalue moduli of the companion matrix, largest first.
    pub moduli: Vec<f64>,
}

/// Fitted partial VAR with everything downstream stages need.
#[derive(Debug, Clone)]
pub struct SystemEstimate {
    pub spec: SystemSpec,
    pub years: Vec<i32>,
    pub equations: Vec<EquationEstimate>,
    /// `T_eff x 3`, columns in `spec.endogenous_order`.
    pub residuals: DMatrix<f64>,
    pub sigma_u: DMatrix<f64>,
    /// `A_1 .. A_p`, rows and columns in `spec.endogenous_order`.
    pub lag_matrices: Vec<DMatrix<f64>>,
    pub intercepts: DVector<f64>,
    /// Output-equation loadings on the European aggregate, lags `0..=p`.
    pub exogenous_loadings: Vec<f64>,
    pub stability: Stability,
    pub gls_steps: usize,
}

impl SystemEstimate {
    pub fn n_vars(&self) -> usize {
        self.spec.endogenous_order.len()
    }

    pub fn equation(&self, role: Role) -> Option<&EquationEstimate> {
        self.equations.iter().find(|e| e.response == role)
    }

    pub fn document(&self) -> EstimateDocument {
        EstimateDocument {
            endogenous_order: self.spec.endogenous_order.clone(),
            lag_order: self.spec.lag_order,
            first_year: self.years.first().copied().unwrap_or_default(),
            last_year: self.years.last().copied().unwrap_or_default(),
            observations: self.years.len(),
            equations: self
                .equations
                .iter()
                .map(|e| EquationDocument {
                    response: e.response,
                    coefficients: e
                        .labels
                        .iter()
                        .zip(e.coefficients.iter().zip(&e.std_errors))
                        .map(|(l, (&value, &std_error))| CoefficientDocument { label: l.to_string(), value, std_error })
                        .collect(),
                })
                .collect(),
            sigma_u: linalg::to_rows(&self.sigma_u),
            moduli: self.stability.moduli.clone(),
            stable: self.stability.stable,
            gls_steps: self.gls_steps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientDocument {
    pub label: String,
    pub value: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquationDocument {
    pub response: Role,
    pub coefficients: Vec<CoefficientDocument>,
}

/// JSON form of a [`SystemEstimate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateDocument {
    pub endogenous_order: Vec<Role>,
    pub lag_order: usize,
    pub first_year: i32,
    pub last_year: i32,
    pub observations: usize,
    pub equations: Vec<EquationDocument>,
    pub sigma_u: Vec<Vec<f64>>,
    pub moduli: Vec<f64>,
    pub stable: bool,
    pub gls_steps: usize,
}

/// Fits the partial VAR described by `spec` from its design matrices.
pub fn estimate_system(spec: &SystemSpec, designs: &[DesignMatrix], options: &SurOptions) -> Result<SystemEstimate> {
    let n = spec.endogenous_order.len();
    if designs.len() != n
        || designs.iter().zip(&spec.equations).any(|(d, e)| d.equation != e.response || d.labels != e.regressors)
    {
        return Err(Error::InvalidInput("design matrices do not match the system spec".into()));
    }
    let fit = sur_estimate_with(designs, options)?;

    let equations: Vec<EquationEstimate> = designs
        .iter()
        .zip(fit.coefficients.iter().zip(&fit.std_errors))
        .map(|(d, (b, se))| EquationEstimate {
            response: d.equation,
            labels: d.labels.clone(),
            coefficients: b.iter().copied().collect(),
            std_errors: se.iter().copied().collect(),
        })
        .collect();

    let mut lag_matrices = vec![DMatrix::zeros(n, n); spec.lag_order];
    let mut intercepts = DVector::zeros(n);
    let mut exogenous_loadings = vec![0.0; spec.lag_order + 1];
    for (i, eq) in equations.iter().enumerate() {
        for (label, &value) in eq.labels.iter().zip(&eq.coefficients) {
            match *label {
                Regressor::Intercept => intercepts[i] = value,
                Regressor::Lag { role: Role::Yaeur, lag } => exogenous_loadings[lag] = value,
                Regressor::Lag { role, lag } => {
                    let col = spec.position(role).expect("endogenous role in ordering");
                    lag_matrices[lag - 1][(i, col)] = value;
                }
            }
        }
    }

    let mut estimate = SystemEstimate {
        spec: spec.clone(),
        years: designs[0].years.clone(),
        equations,
        residuals: fit.residuals,
        sigma_u: fit.sigma_u,
        lag_matrices,
        intercepts,
        exogenous_loadings,
        stability: Stability { stable: true, moduli: Vec::new() },
        gls_steps: fit.gls_steps,
    };
    estimate.stability = check_stability(&companion_matrix(&estimate))?;
    if !estimate.stability.stable {
        warn!(
            "estimated system is not stable (largest modulus {:.4})",
            estimate.stability.moduli.first().copied().unwrap_or(f64::NAN)
        );
    }
    Ok(estimate)
}

/// Companion form of the lag matrices: `A_1 .. A_p` across the top block
/// row, identity shifts below.
pub fn companion_from_lags(lags: &[DMatrix<f64>]) -> DMatrix<f64> {
    let p = lags.len();
    if p == 0 {
        return DMatrix::zeros(0, 0);
    }
    let n = lags[0].nrows();
    let mut c = DMatrix::zeros(n * p, n * p);
    for (j, a) in lags.iter().enumerate() {
        c.view_mut((0, j * n), (n, n)).copy_from(a);
    }
    for j in 1..p {
        c.view_mut((j * n, (j - 1) * n), (n, n)).fill_with_identity();
    }
    c
}

pub fn companion_matrix(estimate: &SystemEstimate) -> DMatrix<f64> {
    companion_from_lags(&estimate.lag_matrices)
}

/// Stable when every companion eigenvalue lies strictly inside the unit
/// circle.
pub fn check_stability(companion: &DMatrix<f64>) -> Result<Stability> {
    let moduli = linalg::eigen_moduli(companion)?;
    let stable = moduli.first().is_none_or(|&m| m < 1.0);
    Ok(Stability { stable, moduli })
}
