//! Twelve-country synthetic study with three sensitivity tiers.
//!
//! Each country pairs a sector calibration with a macro process. The
//! output noise is solved so that policy shocks explain a target share of
//! the output forecast-error variance in the implied linear system, which
//! makes the tier pattern a property of the data rather than of luck.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::panel::{generate_country_panel_with_common, MacroProcess};
use super::sector::{sector_equilibrium, SectorCalibration};
use crate::dynamics::{ma_from_lags, SizeClass, SpeedClass};
use crate::error::{Error, Result};
use crate::fevd::fevd;
use crate::ingestion::{AnnualPanel, CountryConfig, PolmKind};
use crate::role::Role;

/// Years per synthetic country. Output dynamics are persistent, which
/// amplifies sampling error in long-horizon variance shares; at this length
/// it stays near 0.4 percentage points.
pub const STUDY_LENGTH: usize = 80_000;
pub const STUDY_FIRST_YEAR: i32 = 1;
pub const STUDY_SEED: u64 = 7;
/// Horizons over which the target share is matched on average.
pub const SHARE_HORIZONS: std::ops::RangeInclusive<usize> = 15..=20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Weak,
    Medium,
    Strong,
}

impl Tier {
    /// Size and speed classes the tier is built to produce.
    pub fn expected_classes(self) -> (SizeClass, SpeedClass) {
        match self {
            Tier::Weak => (SizeClass::Weak, SpeedClass::Fast),
            Tier::Medium => (SizeClass::Medium, SpeedClass::Medium),
            Tier::Strong => (SizeClass::Strong, SpeedClass::Slow),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyCountry {
    pub id: String,
    pub tier: Tier,
    pub calibration: SectorCalibration,
    pub macro_process: MacroProcess,
    /// Policy share of output variance the noise level is solved for.
    pub target_share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudySpec {
    pub countries: Vec<StudyCountry>,
    pub length: usize,
    pub first_year: i32,
    /// Standard deviation of the common European output shock.
    pub common_shock_sd: f64,
}

/// Output index response to a one-point rate rise, relative to base output.
pub fn output_rate_elasticity(cal: &SectorCalibration, rate: f64) -> Result<f64> {
    let at = |r: f64| -> Result<f64> {
        let (y, e) = cal.macro_state(r);
        Ok(sector_equilibrium(cal, r, e, y)?.quantity)
    };
    let base = at(rate)?;
    if !(base > 0.0) {
        return Err(Error::InvalidInput("calibration has no positive base output".into()));
    }
    Ok((at(rate + 1.0)? - base) / base)
}

/// Lag matrices and impact matrix of the logged panel to first order, in
/// the order price, policy, output, for supply innovations of size
/// `supply_sd`. The AR(1) supply shock makes the output equation second
/// order; the common European shock is left out.
pub fn implied_system(
    cal: &SectorCalibration,
    m: &MacroProcess,
    supply_sd: f64,
) -> Result<(Vec<DMatrix<f64>>, DMatrix<f64>)> {
    let b = output_rate_elasticity(cal, m.rate_mean)?;
    let lam = m.output_adjustment;
    let psi = m.supply_shock_persistence;
    let a1 = DMatrix::from_row_slice(
        3,
        3,
        &[
            m.price_persistence,
            -m.price_rate_response,
            0.0,
            m.rate_price_response,
            m.rate_persistence,
            0.0,
            lam * b * m.rate_price_response,
            lam * b * (m.rate_persistence - psi),
            1.0 - lam + psi,
        ],
    );
    let mut a2 = DMatrix::zeros(3, 3);
    a2[(2, 2)] = -psi * (1.0 - lam);
    let b0 = DMatrix::from_row_slice(
        3,
        3,
        &[m.price_shock_sd, 0.0, 0.0, 0.0, m.rate_shock_sd, 0.0, 0.0, lam * b * m.rate_shock_sd, lam * supply_sd],
    );
    Ok((vec![a1, a2], b0))
}

/// Mean policy share of output variance over [`SHARE_HORIZONS`].
pub fn implied_policy_share(cal: &SectorCalibration, m: &MacroProcess, supply_sd: f64) -> Result<f64> {
    let (lags, b0) = implied_system(cal, m, supply_sd)?;
    let q_max = *SHARE_HORIZONS.end();
    let phi = ma_from_lags(&lags, q_max);
    let table = fevd(&phi, &b0, &Role::ENDOGENOUS, &Role::ENDOGENOUS, q_max)?;
    let shares = SHARE_HORIZONS.map(|q| table.share(Role::Ya, Role::Polm, q)).collect::<Result<Vec<_>>>()?;
    Ok(shares.iter().sum::<f64>() / shares.len() as f64)
}

/// Supply innovation size giving `target` policy share, by bisection
/// (the share falls monotonically in the noise).
pub fn solve_output_noise(cal: &SectorCalibration, m: &MacroProcess, target: f64) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidInput(format!("target share {target} outside (0, 1)")));
    }
    let (mut lo, mut hi) = (1e-8, 1.0);
    while implied_policy_share(cal, m, hi)? > target {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Numerical("output noise bracket diverged".into()));
        }
    }
    if implied_policy_share(cal, m, lo)? < target {
        return Err(Error::InvalidInput(format!("target share {target} is unreachable")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if implied_policy_share(cal, m, mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Macro and sector parameters that differ across countries.
#[derive(Debug, Clone, Copy)]
struct Profile {
    capital_input_sensitivity: f64,
    rate_persistence: f64,
    output_adjustment: f64,
    /// Rate reaction to the price gap and price reaction to the rate gap;
    /// large values make policy reverse itself.
    feedback: (f64, f64),
}

fn country(id: &str, tier: Tier, p: Profile) -> StudyCountry {
    let target_share = match tier {
        Tier::Weak => 0.04,
        Tier::Medium => 0.105,
        Tier::Strong => 0.30,
    };
    StudyCountry {
        id: id.into(),
        tier,
        calibration: SectorCalibration {
            capital_input_sensitivity: p.capital_input_sensitivity,
            ..SectorCalibration::low_imported_input()
        },
        macro_process: MacroProcess {
            rate_persistence: p.rate_persistence,
            supply_shock_persistence: p.rate_persistence,
            output_adjustment: p.output_adjustment,
            rate_price_response: p.feedback.0,
            price_rate_response: p.feedback.1,
            rate_shock_sd: 0.3,
            price_shock_sd: 0.01,
            ..MacroProcess::default()
        },
        target_share,
    }
}

fn profile(capital: f64, rho: f64, lambda: f64) -> Profile {
    Profile {
        capital_input_sensitivity: capital,
        rate_persistence: rho,
        output_adjustment: lambda,
        feedback: (2.0, 0.01),
    }
}

/// Weak and fast: DE, GB, SE, with policy reversals in DE and SE. Strong
/// and slow: ES, IE. The rest medium.
pub fn twelve_country_study() -> StudySpec {
    use Tier::*;
    let reversing = |capital, rho, lambda| Profile { feedback: (3.0, 0.1), ..profile(capital, rho, lambda) };
    StudySpec {
        countries: vec![
            country("BE", Medium, profile(2.2, 0.76, 0.40)),
            country("DE", Weak, reversing(0.5, 0.45, 0.9)),
            country("ES", Strong, profile(6.0, 0.75, 0.15)),
            country("FI", Medium, profile(2.0, 0.77, 0.38)),
            country("FR", Medium, profile(2.4, 0.75, 0.42)),
            country("GB", Weak, profile(0.4, 0.40, 0.9)),
            country("GR", Medium, profile(1.9, 0.76, 0.36)),
            country("IE", Strong, profile(6.5, 0.78, 0.12)),
            country("IT", Medium, profile(2.0, 0.74, 0.45)),
            country("NL", Medium, profile(2.5, 0.77, 0.40)),
            country("PT", Medium, profile(2.1, 0.78, 0.37)),
            country("SE", Weak, reversing(0.6, 0.50, 0.85)),
        ],
        length: STUDY_LENGTH,
        first_year: STUDY_FIRST_YEAR,
        common_shock_sd: 0.002,
    }
}

/// A generated country together with the noise level it was drawn with.
#[derive(Debug, Clone)]
pub struct StudyPanel {
    pub country: StudyCountry,
    pub output_shock_sd: f64,
    pub panel: AnnualPanel,
}

/// Generates every country from one seed; country `i` draws from
/// `seed + i + 1` and the common shock from `seed`.
pub fn generate_study(spec: &StudySpec, seed: u64) -> Result<Vec<StudyPanel>> {
    let common_dist =
        Normal::new(0.0, spec.common_shock_sd).map_err(|e| Error::InvalidInput(format!("common shock: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let common: Vec<f64> = (0..spec.length).map(|_| common_dist.sample(&mut rng)).collect();

    spec.countries
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let supply_sd = solve_output_noise(&c.calibration, &c.macro_process, c.target_share)?;
            let m = MacroProcess {
                output_shock_sd: supply_sd,
                last_year: spec.first_year + spec.length as i32 - 1,
                ..c.macro_process.clone()
            };
            let panel = generate_country_panel_with_common(
                &c.id,
                &c.calibration,
                &m,
                spec.length,
                seed.wrapping_add(i as u64 + 1),
                Some(&common),
            )?;
            Ok(StudyPanel { country: c.clone(), output_shock_sd: supply_sd, panel })
        })
        .collect()
}

/// Writes `{id}.csv` per country and returns the matching configs, with
/// file names relative to `dir`.
pub fn write_study(dir: &Path, panels: &[StudyPanel]) -> Result<Vec<CountryConfig>> {
    fs::create_dir_all(dir)?;
    panels
        .iter()
        .map(|p| {
            let file = format!("{}.csv", p.country.id);
            p.panel.write_csv(fs::File::create(dir.join(&file))?)?;
            Ok(CountryConfig {
                file: Some(file),
                ..CountryConfig::for_role_columns(&p.country.id, PolmKind::InterestRate)
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solved_noise_hits_the_target() {
        for c in &twelve_country_study().countries {
            let sd = solve_output_noise(&c.calibration, &c.macro_process, c.target_share).unwrap();
            let share = implied_policy_share(&c.calibration, &c.macro_process, sd).unwrap();
            assert!((share - c.target_share).abs() < 1e-9, "{}", c.id);
        }
    }

    #[test]
    fn tiers_are_ordered_by_elasticity() {
        let study = twelve_country_study();
        let k = |id: &str| {
            let c = study.countries.iter().find(|c| c.id == id).unwrap();
            output_rate_elasticity(&c.calibration, c.macro_process.rate_mean).unwrap()
        };
        assert!(k("ES") < k("FR") && k("FR") < k("DE") && k("DE") < 0.0);
    }

    #[test]
    fn study_is_deterministic() {
        let mut spec = twelve_country_study();
        spec.length = 60;
        spec.countries.truncate(2);
        let a = generate_study(&spec, 3).unwrap();
        let b = generate_study(&spec, 3).unwrap();
        assert_eq!(a[1].panel, b[1].panel);
        assert_eq!(a[0].panel.years().first(), Some(&STUDY_FIRST_YEAR));
        assert_eq!(a[0].panel.len(), 60);
    }
}
