//! Cross-country rankings, classification rows and the policy-share table.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::{Classification, MultiplierMetrics};
use crate::error::{Error, Result};
use crate::fevd::FevdReport;

/// Everything the cross-country report needs from one country.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryResult {
    pub country_id: String,
    pub metrics: MultiplierMetrics,
    /// Output variance share of the policy shock, keyed by horizon.
    pub partvep: BTreeMap<usize, f64>,
    pub moduli: Vec<f64>,
    pub classification: Classification,
    /// Output response to the policy shock, `h = 0..=H`.
    pub output_response: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "key", content = "horizon")]
pub enum RankKey {
    Multiplier,
    Speed,
    PartvepAt(usize),
}

impl fmt::Display for RankKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankKey::Multiplier => f.write_str("multiplier"),
            RankKey::Speed => f.write_str("speed"),
            RankKey::PartvepAt(q) => write!(f, "partvep_q{q}"),
        }
    }
}

impl FromStr for RankKey {
    type Err = Error;

    /// `multiplier`, `speed`, or `partvep:Q`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "multiplier" => Ok(RankKey::Multiplier),
            "speed" => Ok(RankKey::Speed),
            other => other
                .strip_prefix("partvep:")
                .and_then(|q| q.parse().ok())
                .map(RankKey::PartvepAt)
                .ok_or_else(|| Error::InvalidInput(format!("unknown rank key `{s}`"))),
        }
    }
}

impl RankKey {
    fn value(self, result: &CountryResult) -> Result<f64> {
        let missing = || Error::MissingMetric { metric: self.to_string(), country: result.country_id.clone() };
        let v = match self {
            RankKey::Multiplier => result.metrics.max_abs_cumulative,
            RankKey::Speed => result.metrics.years_to_90 as f64,
            RankKey::PartvepAt(q) => *result.partvep.get(&q).ok_or_else(missing)?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(missing())
        }
    }

    fn descending(self) -> bool {
        !matches!(self, RankKey::Speed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub rank: usize,
    pub country_id: String,
    pub value: f64,
}

/// Orders countries by `key`: largest first for size and shares, fewest
/// years first for speed; ties go alphabetically.
pub fn rank_countries(results: &[CountryResult], key: RankKey) -> Result<Vec<RankEntry>> {
    let mut keyed = results.iter().map(|r| Ok((key.value(r)?, r.country_id.as_str()))).collect::<Result<Vec<_>>>()?;
    keyed.sort_by(|a, b| {
        let by_value = if key.descending() { b.0.total_cmp(&a.0) } else { a.0.total_cmp(&b.0) };
        by_value.then_with(|| a.1.cmp(b.1))
    });
    Ok(keyed
        .into_iter()
        .enumerate()
        .map(|(i, (value, id))| RankEntry { rank: i + 1, country_id: id.to_string(), value })
        .collect())
}

/// Entries at or below this fraction of the path's peak are treated as zero
/// when looking for sign changes.
pub const SIGN_CHANGE_FLOOR: f64 = 0.10;

/// Whether the path changes sign after impact, ignoring near-zero entries.
pub fn changes_sign(path: &[f64]) -> bool {
    let Some(tail) = path.get(1..) else { return false };
    let peak = tail.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return false;
    }
    let mut signs = tail.iter().filter(|v| v.abs() > SIGN_CHANGE_FLOOR * peak).map(|v| v.is_sign_positive());
    match signs.next() {
        Some(first) => signs.any(|s| s != first),
        None => false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryRow {
    pub country_id: String,
    pub max_abs_cumulative: f64,
    pub years_to_90: usize,
    pub sign_of_effect: i8,
    pub size_class: String,
    pub speed_class: String,
    pub largest_modulus: f64,
    pub atypical: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub key: RankKey,
    pub order: Vec<RankEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub countries: Vec<CountryRow>,
    pub fevd: FevdReport,
    pub rankings: Vec<Ranking>,
    pub atypical: Vec<String>,
}

/// Assembles the cross-country summary. Countries keep their input order;
/// the policy-share table uses the first country's horizons, which every
/// country must share.
pub fn summary_report(results: &[CountryResult]) -> Result<SummaryReport> {
    let first = results.first().ok_or_else(|| Error::InvalidInput("summary needs at least one country".into()))?;
    let horizons: Vec<usize> = first.partvep.keys().copied().collect();

    let countries: Vec<CountryRow> = results
        .iter()
        .map(|r| CountryRow {
            country_id: r.country_id.clone(),
            max_abs_cumulative: r.metrics.max_abs_cumulative,
            years_to_90: r.metrics.years_to_90,
            sign_of_effect: r.metrics.sign_of_effect,
            size_class: r.classification.size.to_string(),
            speed_class: r.classification.speed.to_string(),
            largest_modulus: r.moduli.first().copied().unwrap_or(0.0),
            atypical: changes_sign(&r.output_response),
        })
        .collect();

    let rows = results
        .iter()
        .map(|r| {
            let shares = horizons.iter().map(|&q| RankKey::PartvepAt(q).value(r)).collect::<Result<Vec<_>>>()?;
            Ok((r.country_id.clone(), shares))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut keys = vec![RankKey::Multiplier, RankKey::Speed];
    keys.extend(horizons.iter().map(|&q| RankKey::PartvepAt(q)));
    let rankings = keys
        .into_iter()
        .map(|key| Ok(Ranking { key, order: rank_countries(results, key)? }))
        .collect::<Result<Vec<_>>>()?;

    let atypical = countries.iter().filter(|c| c.atypical).map(|c| c.country_id.clone()).collect();
    Ok(SummaryReport { countries, fevd: FevdReport { horizons, rows }, rankings, atypical })
}

impl SummaryReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn write_countries_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        for row in &self.countries {
            out.serialize(row)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_rankings_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["key", "rank", "country", "value"])?;
        for ranking in &self.rankings {
            for e in &ranking.order {
                out.write_record([
                    ranking.key.to_string(),
                    e.rank.to_string(),
                    e.country_id.clone(),
                    e.value.to_string(),
                ])?;
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("Country classification\n");
        let width = self.countries.iter().map(|c| c.country_id.len()).max().unwrap_or(0).max(7);
        let _ = writeln!(
            s,
            "{:<width$} {:>12} {:>6} {:>7} {:>7} {:>8}",
            "country", "multiplier", "years", "size", "speed", "atypical"
        );
        for c in &self.countries {
            let _ = writeln!(
                s,
                "{:<width$} {:>12.4} {:>6} {:>7} {:>7} {:>8}",
                c.country_id,
                c.max_abs_cumulative,
                c.years_to_90,
                c.size_class,
                c.speed_class,
                if c.atypical { "yes" } else { "" }
            );
        }
        s.push_str("\nPolicy share of output forecast-error variance (%)\n");
        s.push_str(&self.fevd.to_text());
        s.push_str("\nRankings\n");
        for r in &self.rankings {
            let order: Vec<&str> = r.order.iter().map(|e| e.country_id.as_str()).collect();
            let _ = writeln!(s, "{:<14} {}", r.key.to_string(), order.join(" > "));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{SizeClass, SpeedClass};

    pub(crate) fn result(id: &str, multiplier: f64, years: usize) -> CountryResult {
        CountryResult {
            country_id: id.into(),
            metrics: MultiplierMetrics {
                max_abs_cumulative: multiplier,
                years_to_90: years,
                sign_of_effect: -1,
                horizon: 20,
                degenerate: false,
            },
            partvep: [(10, 0.1), (20, multiplier / 100.0)].into(),
            moduli: vec![0.8, 0.5],
            classification: Classification { size: SizeClass::Medium, speed: SpeedClass::Medium },
            output_response: vec![-0.1, -0.2, -0.1, -0.05],
        }
    }

    fn ids(entries: &[RankEntry]) -> Vec<&str> {
        entries.iter().map(|e| e.country_id.as_str()).collect()
    }

    #[test]
    fn multiplier_ratios_rank_descending() {
        let rs = [result("IT", 1.0, 3), result("ES", 6.0, 12), result("FR", 3.0, 6)];
        assert_eq!(ids(&rank_countries(&rs, RankKey::Multiplier).unwrap()), ["ES", "FR", "IT"]);
        assert_eq!(ids(&rank_countries(&rs, RankKey::Speed).unwrap()), ["IT", "FR", "ES"]);
        assert_eq!(ids(&rank_countries(&rs, RankKey::PartvepAt(20)).unwrap()), ["ES", "FR", "IT"]);
    }

    #[test]
    fn ties_are_alphabetical() {
        let rs = [result("NL", 2.0, 5), result("BE", 2.0, 5), result("FI", 2.0, 5)];
        for key in [RankKey::Multiplier, RankKey::Speed, RankKey::PartvepAt(10)] {
            assert_eq!(ids(&rank_countries(&rs, key).unwrap()), ["BE", "FI", "NL"]);
        }
    }

    #[test]
    fn missing_key_is_reported() {
        let mut odd = result("GR", 1.0, 4);
        odd.partvep.remove(&20);
        let rs = [result("BE", 2.0, 5), odd];
        assert!(matches!(
            rank_countries(&rs, RankKey::PartvepAt(20)),
            Err(Error::MissingMetric { country, .. }) if country == "GR"
        ));
        assert!(rank_countries(&rs, RankKey::PartvepAt(10)).is_ok());
    }

    #[test]
    fn sign_change_scan() {
        assert!(changes_sign(&[0.0, -0.3, -0.1, 0.2, 0.1]));
        assert!(!changes_sign(&[0.5, -0.3, -0.1, -0.2]));
        // a tiny wobble does not count
        assert!(!changes_sign(&[0.0, -0.3, -0.1, 0.001]));
        assert!(!changes_sign(&[0.0, 0.0]));
        assert!(!changes_sign(&[]));
    }

    #[test]
    fn single_country_report() {
        let mut r = result("DE", 1.0, 3);
        r.output_response = vec![0.0, -0.2, -0.1, 0.1];
        let report = summary_report(&[r]).unwrap();
        assert_eq!(report.countries.len(), 1);
        assert!(report.rankings.iter().all(|r| r.order.len() == 1));
        assert_eq!(report.rankings.len(), 4);
        assert_eq!(report.atypical, ["DE"]);
        let text = report.to_text();
        assert!(text.contains("Rankings") && text.contains("yes"));
        assert!(summary_report(&[]).is_err());
    }

    #[test]
    fn rank_key_parsing() {
        assert_eq!("partvep:15".parse::<RankKey>().unwrap(), RankKey::PartvepAt(15));
        assert_eq!("Speed".parse::<RankKey>().unwrap(), RankKey::Speed);
        assert!("partvep:x".parse::<RankKey>().is_err());
    }
}
