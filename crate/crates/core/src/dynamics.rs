//! Moving-average inversion, impulse responses and multiplier metrics.
//!
//! The European aggregate is held at zero deviation, so responses are
//! partial-equilibrium with respect to it and only the endogenous lag
//! matrices enter the MA coefficients.

use std::fmt;
use std::io::Write;

use log::warn;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{companion_from_lags, SystemEstimate};
use crate::identification::{unit_impulse, StructuralFactor};
use crate::role::Role;

pub const DEFAULT_HORIZON: usize = 20;

/// `Phi_0 .. Phi_H` from the lag matrices: the top-left block of the
/// companion matrix raised to each power.
pub fn ma_from_lags(lags: &[DMatrix<f64>], horizon: usize) -> Vec<DMatrix<f64>> {
    let n = lags.first().map_or(0, DMatrix::nrows);
    let companion = companion_from_lags(lags);
    let mut power = DMatrix::<f64>::identity(companion.nrows(), companion.ncols());
    let mut phi = Vec::with_capacity(horizon + 1);
    phi.push(DMatrix::identity(n, n));
    for _ in 1..=horizon {
        power = &companion * &power;
        phi.push(power.view((0, 0), (n, n)).into_owned());
    }
    phi
}

pub fn ma_coefficients(estimate: &SystemEstimate, horizon: usize) -> Vec<DMatrix<f64>> {
    ma_from_lags(&estimate.lag_matrices, horizon)
}

/// `path[v][h] = (Phi_h impulse)[v]`.
pub fn impulse_response(phi: &[DMatrix<f64>], impulse: &DVector<f64>) -> Vec<Vec<f64>> {
    let n = impulse.len();
    let mut paths = vec![Vec::with_capacity(phi.len()); n];
    for m in phi {
        let r = m * impulse;
        for (v, path) in paths.iter_mut().enumerate() {
            path.push(r[v]);
        }
    }
    paths
}

pub fn cumulate(path: &[f64]) -> Vec<f64> {
    path.iter()
        .scan(0.0, |acc, &v| {
            *acc += v;
            Some(*acc)
        })
        .collect()
}

/// Responses of every variable to one normalized structural shock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponsePaths {
    pub shock: Role,
    pub sign: i8,
    /// Impact vector, aligned to the bundle's variables.
    pub impulse: Vec<f64>,
    /// `responses[v][h]`.
    pub responses: Vec<Vec<f64>>,
    pub cumulative: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IrfBundle {
    pub horizon: usize,
    pub variables: Vec<Role>,
    pub phi: Vec<DMatrix<f64>>,
    pub shocks: Vec<ResponsePaths>,
}

impl IrfBundle {
    /// Unit responses to every structural shock. The policy shock takes
    /// `polm_sign`; the others are positive.
    pub fn compute(
        estimate: &SystemEstimate,
        factor: &StructuralFactor,
        horizon: usize,
        polm_sign: i8,
    ) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::InvalidInput("horizon must be at least 1".into()));
        }
        let variables = estimate.spec.endogenous_order.clone();
        let phi = ma_coefficients(estimate, horizon);
        let shocks = factor
            .ordering
            .iter()
            .map(|&shock| {
                let sign = if shock == Role::Polm { polm_sign } else { 1 };
                let impulse = unit_impulse(factor, shock, sign)?.aligned(&variables)?;
                let responses = impulse_response(&phi, &impulse);
                let cumulative = responses.iter().map(|p| cumulate(p)).collect();
                Ok(ResponsePaths { shock, sign, impulse: impulse.iter().copied().collect(), responses, cumulative })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { horizon, variables, phi, shocks })
    }

    pub fn paths(&self, shock: Role) -> Option<&ResponsePaths> {
        self.shocks.iter().find(|s| s.shock == shock)
    }

    fn var_index(&self, variable: Role) -> Option<usize> {
        self.variables.iter().position(|&v| v == variable)
    }

    pub fn response(&self, shock: Role, variable: Role) -> Option<&[f64]> {
        let v = self.var_index(variable)?;
        self.paths(shock).map(|p| p.responses[v].as_slice())
    }

    pub fn cumulative(&self, shock: Role, variable: Role) -> Option<&[f64]> {
        let v = self.var_index(variable)?;
        self.paths(shock).map(|p| p.cumulative[v].as_slice())
    }

    /// Tidy rows: country, shock, variable, horizon, response, cumulative.
    pub fn write_tidy_csv<W: Write>(&self, country: &str, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["country", "shock", "variable", "horizon", "response", "cumulative"])?;
        for s in &self.shocks {
            for (v, var) in self.variables.iter().enumerate() {
                for h in 0..=self.horizon {
                    out.write_record([
                        country.to_string(),
                        s.shock.to_string(),
                        var.to_string(),
                        h.to_string(),
                        s.responses[v][h].to_string(),
                        s.cumulative[v][h].to_string(),
                    ])?;
                }
            }
        }
        out.flush()?;
        Ok(())
    }
}

/// Size and speed of a cumulative response.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiplierMetrics {
    /// Largest absolute cumulative response within the horizon.
    pub max_abs_cumulative: f64,
    /// First horizon at which the cumulative response reaches 90% of that
    /// maximum in absolute value.
    pub years_to_90: usize,
    pub sign_of_effect: i8,
    pub horizon: usize,
    pub degenerate: bool,
}

pub fn multiplier_metrics(cumulative: &[f64]) -> Result<MultiplierMetrics> {
    if cumulative.is_empty() {
        return Err(Error::InvalidInput("empty cumulative path".into()));
    }
    if cumulative.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("cumulative path is not finite".into()));
    }
    let horizon = cumulative.len() - 1;
    let mut arg = 0;
    for (h, v) in cumulative.iter().enumerate() {
        if v.abs() > cumulative[arg].abs() {
            arg = h;
        }
    }
    let max = cumulative[arg].abs();
    if max == 0.0 {
        warn!("all-zero cumulative path; multiplier metrics are degenerate");
        return Ok(MultiplierMetrics {
            max_abs_cumulative: 0.0,
            years_to_90: 0,
            sign_of_effect: 1,
            horizon,
            degenerate: true,
        });
    }
    let years_to_90 = cumulative.iter().position(|v| v.abs() >= 0.9 * max).expect("the maximum itself qualifies");
    Ok(MultiplierMetrics {
        max_abs_cumulative: max,
        years_to_90,
        sign_of_effect: if cumulative[arg] < 0.0 { -1 } else { 1 },
        horizon,
        degenerate: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SizeClass {
    Weak,
    Medium,
    Strong,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpeedClass {
    Fast,
    Medium,
    Slow,
}

impl fmt::Display for SizeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SizeClass::Weak => "weak",
            SizeClass::Medium => "medium",
            SizeClass::Strong => "strong",
        })
    }
}

impl fmt::Display for SpeedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpeedClass::Fast => "fast",
            SpeedClass::Medium => "medium",
            SpeedClass::Slow => "slow",
        })
    }
}

/// Cutoffs for [`classify_sensitivity`]. Bounds are inclusive upper limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassThresholds {
    pub size_weak_max: f64,
    pub size_medium_max: f64,
    pub speed_fast_max: usize,
    pub speed_medium_max: usize,
}

impl Default for ClassThresholds {
    fn default() -> Self {
        Self { size_weak_max: 0.05, size_medium_max: 0.20, speed_fast_max: 4, speed_medium_max: 10 }
    }
}

impl ClassThresholds {
    pub fn validate(&self) -> Result<()> {
        let sizes_ok = self.size_weak_max >= 0.0 && self.size_weak_max < self.size_medium_max;
        if !sizes_ok || self.speed_fast_max >= self.speed_medium_max {
            return Err(Error::Config(format!("class thresholds are not ordered: {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub size: SizeClass,
    pub speed: SpeedClass,
}

pub fn classify_sensitivity(metrics: &MultiplierMetrics, thresholds: &ClassThresholds) -> Classification {
    let m = metrics.max_abs_cumulative;
    let size = if m <= thresholds.size_weak_max {
        SizeClass::Weak
    } else if m <= thresholds.size_medium_max {
        SizeClass::Medium
    } else {
        SizeClass::Strong
    };
    let y = metrics.years_to_90;
    let speed = if y <= thresholds.speed_fast_max {
        SpeedClass::Fast
    } else if y <= thresholds.speed_medium_max {
        SpeedClass::Medium
    } else {
        SpeedClass::Slow
    };
    Classification { size, speed }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lower_two() -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.2, 0.3])
    }

    /// `Phi_h = sum_j A_j Phi_{h-j}`, independent of the companion route.
    fn recursive_phi(lags: &[DMatrix<f64>], horizon: usize) -> Vec<DMatrix<f64>> {
        let n = lags[0].nrows();
        let mut phi = vec![DMatrix::identity(n, n)];
        for h in 1..=horizon {
            let mut m = DMatrix::zeros(n, n);
            for (j, a) in lags.iter().enumerate().take(h) {
                m += a * &phi[h - j - 1];
            }
            phi.push(m);
        }
        phi
    }

    #[test]
    fn analytic_powers() {
        let phi = ma_from_lags(&[lower_two()], 3);
        assert_eq!(phi[0], DMatrix::identity(2, 2));
        assert_eq!(phi[1], lower_two());
        let expected = DMatrix::from_row_slice(2, 2, &[0.25, 0.0, 0.16, 0.09]);
        assert!((&phi[2] - expected).amax() < 1e-15);
    }

    #[test]
    fn zero_dynamics() {
        let phi = ma_from_lags(&[DMatrix::zeros(3, 3), DMatrix::zeros(3, 3)], 5);
        assert_eq!(phi[0], DMatrix::identity(3, 3));
        assert!(phi[1..].iter().all(|m| m.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn companion_route_matches_recursion() {
        let a1 = DMatrix::from_row_slice(3, 3, &[0.4, 0.1, 0.0, -0.2, 0.5, 0.0, 0.1, -0.3, 0.6]);
        let a2 = DMatrix::from_row_slice(3, 3, &[0.1, 0.0, 0.0, 0.05, -0.1, 0.0, 0.0, 0.1, 0.2]);
        let lags = [a1, a2];
        let a = ma_from_lags(&lags, 20);
        let b = recursive_phi(&lags, 20);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).amax() < 1e-14);
        }
    }

    #[test]
    fn response_paths_follow_columns_of_powers() {
        let phi = ma_from_lags(&[lower_two()], 4);
        let paths = impulse_response(&phi, &DVector::from_vec(vec![1.0, 0.0]));
        assert_eq!(paths[1][0], 0.0);
        assert!((paths[1][1] - 0.2).abs() < 1e-15);
        assert!((paths[1][2] - 0.16).abs() < 1e-15);
        assert_eq!(paths[0].len(), 5);

        let zero = impulse_response(&phi, &DVector::zeros(2));
        assert!(zero.iter().flatten().all(|&v| v == 0.0));

        let scaled = impulse_response(&phi, &DVector::from_vec(vec![3.0, 0.0]));
        for (a, b) in scaled.iter().flatten().zip(paths.iter().flatten()) {
            assert!((a - 3.0 * b).abs() < 1e-15);
        }
    }

    #[test]
    fn geometric_cumulative_path() {
        let path: Vec<f64> = (0..=20).map(|h| 1.0 - 0.5f64.powi(h + 1)).collect();
        let m = multiplier_metrics(&path).unwrap();
        assert_eq!(m.years_to_90, 3);
        assert!((m.max_abs_cumulative - path[20]).abs() < 1e-15);
        assert_eq!(m.sign_of_effect, 1);
        assert_eq!(m.horizon, 20);
    }

    #[test]
    fn degenerate_and_negative_paths() {
        let m = multiplier_metrics(&[0.0; 21]).unwrap();
        assert!(m.degenerate);
        assert_eq!((m.max_abs_cumulative, m.years_to_90, m.sign_of_effect), (0.0, 0, 1));

        let m = multiplier_metrics(&[-1.0, -2.0, -2.0]).unwrap();
        assert_eq!((m.max_abs_cumulative, m.years_to_90, m.sign_of_effect), (2.0, 1, -1));
        assert!(!m.degenerate);

        assert!(multiplier_metrics(&[]).is_err());
    }

    #[test]
    fn trailing_zeros_do_not_change_metrics() {
        let mut path = vec![0.1, 0.3, 0.35, 0.36];
        let a = multiplier_metrics(&path).unwrap();
        path.extend([0.36; 10]);
        let b = multiplier_metrics(&path).unwrap();
        assert_eq!(a.max_abs_cumulative, b.max_abs_cumulative);
        assert_eq!(a.years_to_90, b.years_to_90);
    }

    fn metrics(size: f64, years: usize) -> MultiplierMetrics {
        MultiplierMetrics {
            max_abs_cumulative: size,
            years_to_90: years,
            sign_of_effect: -1,
            horizon: 20,
            degenerate: false,
        }
    }

    #[test]
    fn classification_bands() {
        let t = ClassThresholds::default();
        let c = classify_sensitivity(&metrics(0.02, 3), &t);
        assert_eq!((c.size, c.speed), (SizeClass::Weak, SpeedClass::Fast));
        let c = classify_sensitivity(&metrics(0.10, 7), &t);
        assert_eq!((c.size, c.speed), (SizeClass::Medium, SpeedClass::Medium));
        let c = classify_sensitivity(&metrics(0.60, 12), &t);
        assert_eq!((c.size, c.speed), (SizeClass::Strong, SpeedClass::Slow));
        // band edges
        assert_eq!(classify_sensitivity(&metrics(0.1, 4), &t).speed, SpeedClass::Fast);
        assert_eq!(classify_sensitivity(&metrics(0.1, 5), &t).speed, SpeedClass::Medium);
        assert_eq!(classify_sensitivity(&metrics(0.1, 10), &t).speed, SpeedClass::Medium);
        assert_eq!(classify_sensitivity(&metrics(0.1, 11), &t).speed, SpeedClass::Slow);
    }

    #[test]
    fn unordered_thresholds_are_rejected() {
        let t = ClassThresholds { speed_fast_max: 10, speed_medium_max: 4, ..Default::default() };
        assert!(t.validate().is_err());
        assert!(ClassThresholds::default().validate().is_ok());
    }
}
