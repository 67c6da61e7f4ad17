//! Per-equation regressor matrices for the partial VAR.
//!
//! The macro block (price level and policy variable) is regressed on its own
//! lags only. Sector output additionally sees its own lags and the European
//! aggregate from lag 0. The zero blocks are structural: the excluded
//! regressors are never columns of the macro equations.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::sur_estimate;
use crate::ingestion::AnnualPanel;
use crate::linalg;
use crate::role::{validate_ordering, Role};

/// One column of a design matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regressor {
    Intercept,
    Lag { role: Role, lag: usize },
}

impl Regressor {
    pub fn role(&self) -> Option<Role> {
        match self {
            Regressor::Intercept => None,
            Regressor::Lag { role, .. } => Some(*role),
        }
    }
}

impl fmt::Display for Regressor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regressor::Intercept => f.write_str("const"),
            Regressor::Lag { role, lag } => write!(f, "{role}.l{lag}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquationSpec {
    pub response: Role,
    pub regressors: Vec<Regressor>,
}

/// Skeleton of the partial VAR: which regressors enter which equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    /// Variable order used for lag matrices, covariances and identification.
    pub endogenous_order: Vec<Role>,
    pub lag_order: usize,
    /// One equation per endogenous role, in `endogenous_order`.
    pub equations: Vec<EquationSpec>,
    pub exogenous_role: Role,
}

impl SystemSpec {
    /// The block-restricted system with intercepts in every equation.
    pub fn partial(lag_order: usize, endogenous_order: &[Role]) -> Result<Self> {
        if lag_order == 0 {
            return Err(Error::InvalidInput("lag order must be at least 1".into()));
        }
        validate_ordering(endogenous_order)?;
        let equations = endogenous_order
            .iter()
            .map(|&response| {
                let mut regressors = vec![Regressor::Intercept];
                for &role in endogenous_order {
                    if response.is_macro() && !role.is_macro() {
                        continue;
                    }
                    regressors.extend((1..=lag_order).map(|lag| Regressor::Lag { role, lag }));
                }
                if response == Role::Ya {
                    regressors.extend((0..=lag_order).map(|lag| Regressor::Lag { role: Role::Yaeur, lag }));
                }
                EquationSpec { response, regressors }
            })
            .collect();
        Ok(Self { endogenous_order: endogenous_order.to_vec(), lag_order, equations, exogenous_role: Role::Yaeur })
    }

    pub fn with_default_order(lag_order: usize) -> Result<Self> {
        Self::partial(lag_order, &Role::ENDOGENOUS)
    }

    pub fn position(&self, role: Role) -> Option<usize> {
        self.endogenous_order.iter().position(|&r| r == role)
    }
}

/// Response vector and regressors for one equation over the effective sample.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    pub equation: Role,
    pub years: Vec<i32>,
    pub response: DVector<f64>,
    pub regressors: DMatrix<f64>,
    pub labels: Vec<Regressor>,
}

impl DesignMatrix {
    pub fn rows(&self) -> usize {
        self.response.len()
    }

    pub fn k(&self) -> usize {
        self.regressors.ncols()
    }
}

/// Builds the three equations of `spec` from a transformed panel and the
/// (equally transformed) European aggregate.
pub fn build_system(panel: &AnnualPanel, yaeur: &[f64], spec: &SystemSpec) -> Result<Vec<DesignMatrix>> {
    let t = panel.len();
    if yaeur.len() != t {
        return Err(Error::InvalidInput(format!("aggregate has {} values for a panel of {t}", yaeur.len())));
    }
    let p = spec.lag_order;
    let t_eff = t.saturating_sub(p);
    let years = panel.years()[p.min(t)..].to_vec();

    let column = |reg: &Regressor| -> Result<Vec<f64>> {
        Ok(match *reg {
            Regressor::Intercept => vec![1.0; t_eff],
            Regressor::Lag { role, lag } => {
                let series = if role == Role::Yaeur { yaeur } else { panel.series(role)? };
                series[p - lag..t - lag].to_vec()
            }
        })
    };

    spec.equations
        .iter()
        .map(|eq| {
            let k = eq.regressors.len();
            if t_eff <= k {
                return Err(Error::InsufficientSample { equation: eq.response, rows: t_eff, regressors: k });
            }
            let mut regressors = DMatrix::zeros(t_eff, k);
            for (j, reg) in eq.regressors.iter().enumerate() {
                regressors.set_column(j, &DVector::from_vec(column(reg)?));
            }
            if !linalg::has_full_column_rank(&regressors) {
                return Err(Error::RankDeficient { context: Some(format!("{} equation", eq.response)) });
            }
            let response = DVector::from_column_slice(&panel.series(eq.response)?[p..]);
            Ok(DesignMatrix {
                equation: eq.response,
                years: years.clone(),
                response,
                regressors,
                labels: eq.regressors.clone(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InformationCriterion {
    Aic,
    Bic,
    Hq,
}

impl InformationCriterion {
    fn penalty(self, t: f64) -> f64 {
        match self {
            InformationCriterion::Aic => 2.0,
            InformationCriterion::Bic => t.ln(),
            InformationCriterion::Hq => 2.0 * t.ln().ln(),
        }
    }
}

impl std::str::FromStr for InformationCriterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "aic" => Ok(Self::Aic),
            "bic" | "sc" => Ok(Self::Bic),
            "hq" => Ok(Self::Hq),
            other => Err(Error::InvalidInput(format!("unknown criterion `{other}`"))),
        }
    }
}

/// Criterion value for every feasible candidate, in increasing lag order.
///
/// All candidates are fitted on the same dates (the first `max_p` years are
/// dropped as presample) so their criteria are comparable.
pub fn lag_criteria(
    panel: &AnnualPanel,
    yaeur: &[f64],
    max_p: usize,
    criterion: InformationCriterion,
    ordering: &[Role],
) -> Result<Vec<(usize, f64)>> {
    if max_p == 0 {
        return Err(Error::InvalidInput("max_p must be at least 1".into()));
    }
    let t = panel.len();
    let mut last_err = None;
    let mut out = Vec::new();
    for p in 1..=max_p {
        let skip = max_p - p;
        if skip >= t {
            last_err = Some(Error::TooFewObservations { found: t, required: max_p + 1 });
            continue;
        }
        let first = panel.years()[skip];
        let last = panel.years()[t - 1];
        let result = panel.restrict(first, last).and_then(|sub| {
            let spec = SystemSpec::partial(p, ordering)?;
            let designs = build_system(&sub, &yaeur[skip..], &spec)?;
            let fit = sur_estimate(&designs)?;
            let t_eff = designs[0].rows() as f64;
            let n_coef: usize = designs.iter().map(DesignMatrix::k).sum();
            let log_det = linalg::log_det_spd(&fit.sigma_u)?;
            Ok(log_det + criterion.penalty(t_eff) * n_coef as f64 / t_eff)
        });
        match result {
            Ok(value) => out.push((p, value)),
            Err(
                e @ (Error::InsufficientSample { .. } | Error::RankDeficient { .. } | Error::NotPositiveDefinite(_)),
            ) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    if out.is_empty() {
        return Err(last_err.unwrap_or_else(|| Error::InvalidInput("no lag candidates".into())));
    }
    Ok(out)
}

/// Lag order minimizing `criterion` over `1..=max_p`; ties go to the
/// smaller order.
pub fn select_lag_order(
    panel: &AnnualPanel,
    yaeur: &[f64],
    max_p: usize,
    criterion: InformationCriterion,
    ordering: &[Role],
) -> Result<usize> {
    let values = lag_criteria(panel, yaeur, max_p, criterion, ordering)?;
    let mut best = values[0];
    for &(p, v) in &values[1..] {
        if v < best.1 {
            best = (p, v);
        }
    }
    Ok(best.0)
}
