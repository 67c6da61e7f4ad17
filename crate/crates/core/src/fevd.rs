//! Forecast-error variance decomposition.
//!
//! With orthonormal structural shocks and `F_k = Phi_k B0`, the q-step
//! forecast-error variance of variable `i` is `sum_{k<q} sum_j F_k[i,j]^2`
//! and shock `j`'s part of it is `sum_{k<q} F_k[i,j]^2`.

use std::fmt::Write as _;
use std::io::Write;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::role::Role;

pub const REPORT_HORIZONS: [usize; 6] = [1, 2, 5, 10, 15, 20];

#[derive(Debug, Clone, PartialEq)]
pub struct FevdTable {
    pub variables: Vec<Role>,
    pub shocks: Vec<Role>,
    /// `1..=q_max`.
    pub horizons: Vec<usize>,
    /// `contributions[q-1][(i, j)]`: variance of variable `i` due to shock `j`.
    contributions: Vec<DMatrix<f64>>,
}

impl FevdTable {
    fn row_total(&self, q: usize, i: usize) -> f64 {
        self.contributions[q - 1].row(i).sum()
    }

    fn check_horizon(&self, q: usize) -> Result<()> {
        if q == 0 || q > self.contributions.len() {
            return Err(Error::HorizonMissing(q));
        }
        Ok(())
    }

    fn var(&self, role: Role) -> Result<usize> {
        self.variables
            .iter()
            .position(|&r| r == role)
            .ok_or_else(|| Error::InvalidInput(format!("{role} not a table variable")))
    }

    fn shock(&self, role: Role) -> Result<usize> {
        self.shocks
            .iter()
            .position(|&r| r == role)
            .ok_or_else(|| Error::InvalidInput(format!("{role} not a table shock")))
    }

    /// Forecast-error variance of `variable` at `q` steps.
    pub fn total_variance(&self, variable: Role, q: usize) -> Result<f64> {
        self.check_horizon(q)?;
        Ok(self.row_total(q, self.var(variable)?))
    }

    /// Part of that variance due to `shock`.
    pub fn contribution(&self, variable: Role, shock: Role, q: usize) -> Result<f64> {
        self.check_horizon(q)?;
        Ok(self.contributions[q - 1][(self.var(variable)?, self.shock(shock)?)])
    }

    pub fn share(&self, variable: Role, shock: Role, q: usize) -> Result<f64> {
        self.check_horizon(q)?;
        let i = self.var(variable)?;
        Ok(self.contributions[q - 1][(i, self.shock(shock)?)] / self.row_total(q, i))
    }

    /// Index-based share, for tables over arbitrary labels.
    pub fn share_at(&self, i: usize, j: usize, q: usize) -> Result<f64> {
        self.check_horizon(q)?;
        Ok(self.contributions[q - 1][(i, j)] / self.row_total(q, i))
    }

    pub fn q_max(&self) -> usize {
        self.contributions.len()
    }

    /// Every share in long form, full precision.
    pub fn entries(&self) -> Vec<FevdEntry> {
        let mut out = Vec::new();
        for (i, &variable) in self.variables.iter().enumerate() {
            for (j, &shock) in self.shocks.iter().enumerate() {
                for &q in &self.horizons {
                    out.push(FevdEntry {
                        variable,
                        shock,
                        horizon: q,
                        share: self.contributions[q - 1][(i, j)] / self.row_total(q, i),
                    });
                }
            }
        }
        out
    }

    pub fn write_csv<W: Write>(&self, country: &str, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["country", "variable", "shock", "horizon", "share"])?;
        for e in self.entries() {
            out.write_record([
                country.to_string(),
                e.variable.to_string(),
                e.shock.to_string(),
                e.horizon.to_string(),
                e.share.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FevdEntry {
    pub variable: Role,
    pub shock: Role,
    pub horizon: usize,
    pub share: f64,
}

/// Decomposes forecast-error variances for `q = 1..=q_max`.
///
/// `impact` maps structural shocks (columns, labelled by `shocks`) to
/// variables (rows, labelled by `variables`); `phi` must hold at least
/// `q_max` MA matrices starting from `Phi_0`.
pub fn fevd(
    phi: &[DMatrix<f64>],
    impact: &DMatrix<f64>,
    variables: &[Role],
    shocks: &[Role],
    q_max: usize,
) -> Result<FevdTable> {
    if q_max == 0 {
        return Err(Error::InvalidInput("q_max must be at least 1".into()));
    }
    if phi.len() < q_max {
        return Err(Error::InvalidInput(format!("need {q_max} MA matrices, got {}", phi.len())));
    }
    if impact.nrows() != variables.len() || impact.ncols() != shocks.len() {
        return Err(Error::InvalidInput("impact matrix does not match labels".into()));
    }
    let mut running = DMatrix::zeros(impact.nrows(), impact.ncols());
    let mut contributions = Vec::with_capacity(q_max);
    for m in &phi[..q_max] {
        let f = m * impact;
        running += f.component_mul(&f);
        contributions.push(running.clone());
    }
    Ok(FevdTable {
        variables: variables.to_vec(),
        shocks: shocks.to_vec(),
        horizons: (1..=q_max).collect(),
        contributions,
    })
}

/// Share of output's q-step forecast-error variance due to policy shocks.
pub fn partvep(table: &FevdTable, q: usize) -> Result<f64> {
    table.share(Role::Ya, Role::Polm, q)
}

/// Cross-country table of policy shares, one row per country.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FevdReport {
    pub horizons: Vec<usize>,
    /// `(country, shares)` with shares as fractions, in input order.
    pub rows: Vec<(String, Vec<f64>)>,
}

pub fn fevd_report(tables: &[(String, &FevdTable)], horizons: &[usize]) -> Result<FevdReport> {
    let rows = tables
        .iter()
        .map(|(country, table)| {
            let shares = horizons.iter().map(|&q| partvep(table, q)).collect::<Result<Vec<_>>>()?;
            Ok((country.clone(), shares))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FevdReport { horizons: horizons.to_vec(), rows })
}

fn percent(share: f64) -> String {
    format!("{:.1}", share * 100.0)
}

impl FevdReport {
    /// Percentages with one decimal.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        let mut header = vec!["country".to_string()];
        header.extend(self.horizons.iter().map(|q| format!("q{q}")));
        out.write_record(&header)?;
        for (country, shares) in &self.rows {
            let mut record = vec![country.clone()];
            record.extend(shares.iter().map(|&s| percent(s)));
            out.write_record(&record)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let width = self.rows.iter().map(|(c, _)| c.len()).max().unwrap_or(0).max(7);
        let mut s = format!("{:<width$}", "country");
        for q in &self.horizons {
            let _ = write!(s, " {:>7}", format!("q={q}"));
        }
        s.push('\n');
        for (country, shares) in &self.rows {
            let _ = write!(s, "{country:<width$}");
            for &share in shares {
                let _ = write!(s, " {:>7}", percent(share));
            }
            s.push('\n');
        }
        s
    }
}
