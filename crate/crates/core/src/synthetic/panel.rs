//! Country panels generated from the sector model.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::sector::{sector_equilibrium, SectorCalibration};
use crate::error::{Error, Result};
use crate::ingestion::AnnualPanel;
use crate::role::Role;

pub const MIN_PANEL_LENGTH: usize = 30;
const PANEL_BURN_IN: usize = 100;

/// Annual macro environment and sector adjustment speed.
///
/// The short rate (percentage points) follows an AR(1) that reacts to the
/// lagged log price level; the log price level falls after rate rises.
/// Sector output adjusts toward the equilibrium quantity, shifted by an
/// AR(1) supply shock, at rate `output_adjustment` per year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacroProcess {
    pub rate_mean: f64,
    pub rate_persistence: f64,
    pub rate_price_response: f64,
    pub rate_shock_sd: f64,
    pub log_price_mean: f64,
    pub price_persistence: f64,
    /// Effect of last year's rate gap on the log price level.
    pub price_rate_response: f64,
    pub price_shock_sd: f64,
    /// Share of the gap to equilibrium closed each year, in `(0, 1]`.
    pub output_adjustment: f64,
    /// Supply shock innovations, as a fraction of base output.
    pub output_shock_sd: f64,
    pub supply_shock_persistence: f64,
    /// Loading on the common European shock.
    pub common_loading: f64,
    pub last_year: i32,
}

impl Default for MacroProcess {
    fn default() -> Self {
        Self {
            rate_mean: 8.0,
            rate_persistence: 0.6,
            rate_price_response: 2.0,
            rate_shock_sd: 1.0,
            log_price_mean: 0.0,
            price_persistence: 0.7,
            price_rate_response: 0.01,
            price_shock_sd: 0.02,
            output_adjustment: 0.5,
            output_shock_sd: 0.05,
            supply_shock_persistence: 0.0,
            common_loading: 1.0,
            last_year: 1995,
        }
    }
}

impl MacroProcess {
    pub fn validate(&self) -> Result<()> {
        if !(self.output_adjustment > 0.0 && self.output_adjustment <= 1.0) {
            return Err(Error::InvalidInput("output adjustment must lie in (0, 1]".into()));
        }
        let persistence = [self.rate_persistence, self.price_persistence, self.supply_shock_persistence];
        if persistence.iter().any(|r| r.abs() >= 1.0) {
            return Err(Error::InvalidInput("macro persistence must be below one".into()));
        }
        let sds = [self.rate_shock_sd, self.price_shock_sd, self.output_shock_sd];
        if sds.iter().any(|s| *s < 0.0 || !s.is_finite()) {
            return Err(Error::InvalidInput("shock standard deviations must be non-negative".into()));
        }
        Ok(())
    }
}

/// Simulates one country: rate and price level, then sector output through
/// the equilibrium each year plus a supply shock. `common` holds the common
/// European shock for each retained year (zeros when absent).
pub fn generate_country_panel_with_common(
    country_id: &str,
    cal: &SectorCalibration,
    macro_process: &MacroProcess,
    t: usize,
    seed: u64,
    common: Option<&[f64]>,
) -> Result<AnnualPanel> {
    macro_process.validate()?;
    if t < MIN_PANEL_LENGTH {
        return Err(Error::InvalidInput(format!("panel length {t} below {MIN_PANEL_LENGTH}")));
    }
    if let Some(c) = common {
        if c.len() != t {
            return Err(Error::InvalidInput("common shock length differs from panel length".into()));
        }
    }
    let m = macro_process;
    let base = {
        let (y, e) = cal.macro_state(m.rate_mean);
        sector_equilibrium(cal, m.rate_mean, e, y)?
    };
    if !(base.quantity > 0.0) {
        return Err(Error::InvalidInput("calibration has no positive base output".into()));
    }
    let q_ref = base.quantity;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };

    let (mut rate, mut log_price, mut output, mut supply) = (m.rate_mean, m.log_price_mean, q_ref, 0.0);
    let mut rates = Vec::with_capacity(t);
    let mut prices = Vec::with_capacity(t);
    let mut outputs = Vec::with_capacity(t);
    for step in 0..PANEL_BURN_IN + t {
        let (price_shock, rate_shock, output_shock) = (normal(), normal(), normal());
        let price_gap = log_price - m.log_price_mean;
        let rate_gap = rate - m.rate_mean;
        log_price = m.log_price_mean + m.price_persistence * price_gap - m.price_rate_response * rate_gap
            + m.price_shock_sd * price_shock;
        rate = m.rate_mean
            + m.rate_persistence * rate_gap
            + m.rate_price_response * price_gap
            + m.rate_shock_sd * rate_shock;

        let (income, exchange_rate) = cal.macro_state(rate);
        supply = m.supply_shock_persistence * supply + m.output_shock_sd * output_shock;
        let target = sector_equilibrium(cal, rate, exchange_rate, income)?.quantity + q_ref * supply;
        let kept = step.checked_sub(PANEL_BURN_IN);
        let common_now = match (kept, common) {
            (Some(i), Some(c)) => c[i],
            _ => 0.0,
        };
        output += m.output_adjustment * (target - output) + q_ref * m.common_loading * common_now;

        if kept.is_some() {
            rates.push(rate);
            prices.push(100.0 * log_price.exp());
            outputs.push(100.0 * output / q_ref);
        }
    }
    if let Some((i, v)) = outputs.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::InvalidInput(format!("simulated output index turned non-positive ({v}) at step {i}")));
    }

    let first = m.last_year - t as i32 + 1;
    AnnualPanel::new(
        country_id,
        (first..=m.last_year).collect(),
        [(Role::Polm, rates), (Role::Price, prices), (Role::Ya, outputs)].into(),
    )
}

pub fn generate_country_panel(
    cal: &SectorCalibration,
    macro_process: &MacroProcess,
    t: usize,
    seed: u64,
) -> Result<AnnualPanel> {
    generate_country_panel_with_common("SYN", cal, macro_process, t, seed, None)
}
