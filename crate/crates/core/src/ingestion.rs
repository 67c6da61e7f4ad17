//! Annual panels: CSV loading, role mapping, the European aggregate and
//! level transforms.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::role::Role;

/// Minimum number of rows a panel must keep after span restriction.
pub const MIN_OBSERVATIONS: usize = 10;

/// Annual series for one country, aligned on a contiguous run of years.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnualPanel {
    country_id: String,
    years: Vec<i32>,
    series: BTreeMap<Role, Vec<f64>>,
}

impl AnnualPanel {
    /// Builds a panel, checking that years step by one and every series has
    /// one finite value per year.
    pub fn new(country_id: impl Into<String>, years: Vec<i32>, series: BTreeMap<Role, Vec<f64>>) -> Result<Self> {
        for pair in years.windows(2) {
            if pair[1] != pair[0] + 1 {
                return Err(Error::GapInYears { previous: pair[0], next: pair[1] });
            }
        }
        for (role, values) in &series {
            if values.len() != years.len() {
                return Err(Error::InvalidInput(format!(
                    "series {role} has {} values for {} years",
                    values.len(),
                    years.len()
                )));
            }
            if let Some(i) = values.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("series {role} has a non-finite value at {}", years[i])));
            }
        }
        Ok(Self { country_id: country_id.into(), years, series })
    }

    pub fn country_id(&self) -> &str {
        &self.country_id
    }

    pub fn years(&self) -> &[i32] {
        &self.years
    }

    pub fn len(&self) -> usize {
        self.years.len()
    }

    pub fn is_empty(&self) -> bool {
        self.years.is_empty()
    }

    pub fn first_year(&self) -> Option<i32> {
        self.years.first().copied()
    }

    pub fn last_year(&self) -> Option<i32> {
        self.years.last().copied()
    }

    pub fn roles(&self) -> impl Iterator<Item = Role> + '_ {
        self.series.keys().copied()
    }

    pub fn get(&self, role: Role) -> Option<&[f64]> {
        self.series.get(&role).map(Vec::as_slice)
    }

    pub fn series(&self, role: Role) -> Result<&[f64]> {
        self.get(role).ok_or(Error::MissingRole(role))
    }

    /// Returns a copy with `role` set to `values`.
    pub fn with_series(&self, role: Role, values: Vec<f64>) -> Result<Self> {
        let mut series = self.series.clone();
        series.insert(role, values);
        Self::new(self.country_id.clone(), self.years.clone(), series)
    }

    /// Restricts the panel to `start..=end`.
    pub fn restrict(&self, start: i32, end: i32) -> Result<Self> {
        let (first, last) = match (self.first_year(), self.last_year()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Err(Error::TooFewObservations { found: 0, required: MIN_OBSERVATIONS }),
        };
        if start < first || end > last || start > end {
            return Err(Error::SpanOutsideData { start, end, first, last });
        }
        let lo = (start - first) as usize;
        let hi = (end - first) as usize + 1;
        let series = self.series.iter().map(|(role, values)| (*role, values[lo..hi].to_vec())).collect();
        Self::new(self.country_id.clone(), self.years[lo..hi].to_vec(), series)
    }

    /// Writes the panel as CSV with a `year` column followed by one column
    /// per role, named after the role.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        let mut header = vec!["year".to_string()];
        header.extend(self.series.keys().map(|r| r.as_str().to_string()));
        out.write_record(&header)?;
        for (i, year) in self.years.iter().enumerate() {
            let mut record = vec![year.to_string()];
            record.extend(self.series.values().map(|v| v[i].to_string()));
            out.write_record(&record)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// How the monetary-policy variable is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolmKind {
    /// Short-term (three-month) interest rate, in percentage points.
    InterestRate,
    /// Money aggregate (M2) index.
    MoneySupply,
}

impl PolmKind {
    /// Sign of a restrictive policy impulse in the variable's own units.
    pub fn default_shock_sign(self) -> i8 {
        match self {
            PolmKind::InterestRate => 1,
            PolmKind::MoneySupply => -1,
        }
    }
}

/// Per-country mapping from CSV columns to model roles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryConfig {
    #[serde(rename = "id")]
    pub country_id: String,
    /// CSV file name, relative to the run's data directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    pub polm_kind: PolmKind,
    pub polm_column: String,
    pub price_column: String,
    pub output_column: String,
    /// Inclusive first and last year; the whole file when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_span: Option<[i32; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shock_sign: Option<i8>,
    /// Roles to log; defaults to the index-type series.
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "log_transform")]
    pub log_transform_roles: Option<BTreeSet<Role>>,
}

impl CountryConfig {
    /// A config whose column names are the role names, as written by
    /// [`AnnualPanel::write_csv`].
    pub fn for_role_columns(country_id: impl Into<String>, polm_kind: PolmKind) -> Self {
        Self {
            country_id: country_id.into(),
            file: None,
            polm_kind,
            polm_column: Role::Polm.as_str().into(),
            price_column: Role::Price.as_str().into(),
            output_column: Role::Ya.as_str().into(),
            sample_span: None,
            shock_sign: None,
            log_transform_roles: None,
        }
    }

    pub fn shock_sign(&self) -> i8 {
        self.shock_sign.unwrap_or_else(|| self.polm_kind.default_shock_sign())
    }

    /// Price and output indices are always logged by default; a money
    /// aggregate is logged too, an interest rate never.
    pub fn log_roles(&self) -> BTreeSet<Role> {
        self.log_transform_roles.clone().unwrap_or_else(|| {
            let mut roles: BTreeSet<Role> = [Role::Price, Role::Ya].into();
            if self.polm_kind == PolmKind::MoneySupply {
                roles.insert(Role::Polm);
            }
            roles
        })
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(sign) = self.shock_sign {
            if sign != 1 && sign != -1 {
                return Err(Error::Config(format!("{}: shock_sign must be 1 or -1, got {sign}", self.country_id)));
            }
        }
        if let Some([start, end]) = self.sample_span {
            if start > end {
                return Err(Error::Config(format!("{}: sample span {start}-{end} is reversed", self.country_id)));
            }
        }
        if let Some(roles) = &self.log_transform_roles {
            if roles.contains(&Role::Yaeur) {
                return Err(Error::Config(format!(
                    "{}: yaeur follows the ya transform and cannot be listed",
                    self.country_id
                )));
            }
        }
        Ok(())
    }
}

/// Reads a CSV with a `year` column and the three configured columns,
/// restricted to the configured span.
pub fn load_panel<R: Read>(source: R, config: &CountryConfig) -> Result<AnnualPanel> {
    config.validate()?;
    let source_name = config.file.clone().unwrap_or_else(|| config.country_id.clone());
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
    let headers = reader.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn { column: name.to_string(), source_name: source_name.clone() })
    };
    let year_col = column("year")?;
    let wanted = [
        (Role::Polm, column(&config.polm_column)?, config.polm_column.as_str()),
        (Role::Price, column(&config.price_column)?, config.price_column.as_str()),
        (Role::Ya, column(&config.output_column)?, config.output_column.as_str()),
    ];

    let mut years = Vec::new();
    let mut series: BTreeMap<Role, Vec<f64>> = wanted.iter().map(|(r, _, _)| (*r, Vec::new())).collect();
    let mut file_years = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let raw_year = record.get(year_col).unwrap_or("");
        let year: i32 = raw_year.parse().map_err(|_| Error::Parse {
            column: "year".into(),
            row: row + 1,
            value: raw_year.into(),
        })?;
        file_years.push(year);
        if let Some([start, end]) = config.sample_span {
            if year < start || year > end {
                continue;
            }
        }
        years.push(year);
        for (role, idx, name) in &wanted {
            let cell = record.get(*idx).unwrap_or("");
            let value: f64 = cell.parse().map_err(|_| Error::Parse {
                column: (*name).to_string(),
                row: row + 1,
                value: cell.into(),
            })?;
            series.get_mut(role).expect("role registered above").push(value);
        }
    }

    if let Some([start, end]) = config.sample_span {
        let first = file_years.iter().copied().min().unwrap_or(start);
        let last = file_years.iter().copied().max().unwrap_or(end);
        if file_years.is_empty() || start < first || end > last {
            return Err(Error::SpanOutsideData { start, end, first, last });
        }
    }
    if years.len() < MIN_OBSERVATIONS {
        // contiguity errors are more informative than a short count
        for pair in years.windows(2) {
            if pair[1] != pair[0] + 1 {
                return Err(Error::GapInYears { previous: pair[0], next: pair[1] });
            }
        }
        return Err(Error::TooFewObservations { found: years.len(), required: MIN_OBSERVATIONS });
    }
    AnnualPanel::new(config.country_id.clone(), years, series)
}

/// Whether the aggregate's target country contributes to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AggregateMode {
    #[default]
    ExcludeSelf,
    IncludeSelf,
}

/// Unweighted mean of member output series over the target's years.
///
/// Members are the panels whose years cover the target's whole span; the
/// target itself is dropped under [`AggregateMode::ExcludeSelf`]. Values are
/// the raw indices, before any transform.
pub fn build_euro_aggregate(panels: &[AnnualPanel], target_country: &str, mode: AggregateMode) -> Result<Vec<f64>> {
    let target = panels
        .iter()
        .find(|p| p.country_id() == target_country)
        .ok_or_else(|| Error::InvalidInput(format!("no panel for `{target_country}`")))?;
    let (start, end) = match (target.first_year(), target.last_year()) {
        (Some(s), Some(e)) => (s, e),
        _ => return Err(Error::NoOverlap { target: target_country.into() }),
    };

    let candidates: Vec<&AnnualPanel> =
        panels.iter().filter(|p| mode == AggregateMode::IncludeSelf || p.country_id() != target_country).collect();
    if candidates.is_empty() {
        return Err(Error::SelfOnly { target: target_country.into() });
    }

    let mut members = Vec::new();
    for panel in candidates {
        let (Some(first), Some(last)) = (panel.first_year(), panel.last_year()) else {
            continue;
        };
        if first > start || last < end {
            continue;
        }
        let Some(ya) = panel.get(Role::Ya) else { continue };
        let lo = (start - first) as usize;
        members.push(&ya[lo..lo + target.len()]);
    }
    if members.is_empty() {
        return Err(Error::NoOverlap { target: target_country.into() });
    }

    // incremental mean: exact when all members agree
    Ok((0..target.len())
        .map(|t| members.iter().enumerate().fold(0.0, |mean, (k, m)| mean + (m[t] - mean) / (k + 1) as f64))
        .collect())
}

/// Natural log of every value, reporting the first non-positive entry.
pub fn log_series(values: &[f64], role: Role, years: &[i32]) -> Result<Vec<f64>> {
    values
        .iter()
        .zip(years)
        .map(|(&v, &year)| if v > 0.0 { Ok(v.ln()) } else { Err(Error::NonPositiveValue { role, year, value: v }) })
        .collect()
}

/// Logs the configured roles. No differencing is ever applied.
pub fn apply_transforms(panel: &AnnualPanel, config: &CountryConfig) -> Result<AnnualPanel> {
    let mut out = panel.clone();
    for role in config.log_roles() {
        if let Some(values) = panel.get(role) {
            out.series.insert(role, log_series(values, role, panel.years())?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv_for(years: impl IntoIterator<Item = i32>) -> String {
        let mut s = String::from("year,rate,cpi,agri\n");
        for (i, y) in years.into_iter().enumerate() {
            s.push_str(&format!("{y},{},{},{}\n", 5.0 + i as f64 * 0.1, 100.0 + i as f64, 100.0));
        }
        s
    }

    fn config() -> CountryConfig {
        CountryConfig {
            country_id: "FR".into(),
            file: None,
            polm_kind: PolmKind::InterestRate,
            polm_column: "rate".into(),
            price_column: "cpi".into(),
            output_column: "agri".into(),
            sample_span: None,
            shock_sign: None,
            log_transform_roles: None,
        }
    }

    fn constant_panel(id: &str, value: f64, years: std::ops::RangeInclusive<i32>) -> AnnualPanel {
        let years: Vec<i32> = years.collect();
        let n = years.len();
        AnnualPanel::new(id, years, [(Role::Ya, vec![value; n])].into()).unwrap()
    }

    #[test]
    fn loads_full_period() {
        let panel = load_panel(csv_for(1965..=1995).as_bytes(), &config()).unwrap();
        assert_eq!(panel.len(), 31);
        assert_eq!(panel.first_year(), Some(1965));
        assert_eq!(panel.series(Role::Polm).unwrap()[1], 5.1);
    }

    #[test]
    fn restricts_to_late_start_span() {
        let mut cfg = config();
        cfg.sample_span = Some([1975, 1995]);
        let panel = load_panel(csv_for(1965..=1995).as_bytes(), &cfg).unwrap();
        assert_eq!(panel.len(), 21);
        assert_eq!(panel.years()[0], 1975);
    }

    #[test]
    fn gap_in_years_is_rejected() {
        let years = [1965, 1966, 1968].into_iter().chain(1969..=1980);
        let err = load_panel(csv_for(years).as_bytes(), &config()).unwrap_err();
        assert!(matches!(err, Error::GapInYears { previous: 1966, next: 1968 }));
        let err = load_panel(csv_for([1965, 1966, 1968]).as_bytes(), &config()).unwrap_err();
        assert!(matches!(err, Error::GapInYears { .. }));
    }

    #[test]
    fn missing_column_and_short_sample() {
        let mut cfg = config();
        cfg.output_column = "volume".into();
        let err = load_panel(csv_for(1965..=1995).as_bytes(), &cfg).unwrap_err();
        assert!(matches!(err, Error::MissingColumn { ref column, .. } if column == "volume"));

        let err = load_panel(csv_for(1965..=1973).as_bytes(), &config()).unwrap_err();
        assert!(matches!(err, Error::TooFewObservations { found: 9, .. }));
    }

    #[test]
    fn span_outside_file_is_rejected() {
        let mut cfg = config();
        cfg.sample_span = Some([1960, 1990]);
        let err = load_panel(csv_for(1965..=1995).as_bytes(), &cfg).unwrap_err();
        assert!(matches!(err, Error::SpanOutsideData { .. }));
    }

    #[test]
    fn empty_cell_is_a_parse_error() {
        let mut csv = csv_for(1965..=1980);
        csv = csv.replacen("1970,5.5,105,100", "1970,5.5,,100", 1);
        let err = load_panel(csv.as_bytes(), &config()).unwrap_err();
        assert!(matches!(err, Error::Parse { ref column, .. } if column == "cpi"));
    }

    #[test]
    fn shock_sign_follows_polm_kind() {
        let mut cfg = config();
        assert_eq!(cfg.shock_sign(), 1);
        cfg.polm_kind = PolmKind::MoneySupply;
        assert_eq!(cfg.shock_sign(), -1);
        assert!(cfg.log_roles().contains(&Role::Polm));
        cfg.shock_sign = Some(1);
        assert_eq!(cfg.shock_sign(), 1);
        cfg.shock_sign = Some(2);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn aggregate_of_two_constants_is_their_mean() {
        let panels = vec![
            constant_panel("FR", 90.0, 1965..=1995),
            constant_panel("DE", 100.0, 1965..=1995),
            constant_panel("IT", 120.0, 1965..=1995),
        ];
        let agg = build_euro_aggregate(&panels, "FR", AggregateMode::ExcludeSelf).unwrap();
        assert_eq!(agg.len(), 31);
        assert!(agg.iter().all(|&v| v == 110.0));
    }

    #[test]
    fn aggregate_of_one_foreign_country_is_that_series() {
        let years: Vec<i32> = (1965..=1980).collect();
        let ya: Vec<f64> = (0..16).map(|i| 100.0 + (i as f64).sin()).collect();
        let foreign = AnnualPanel::new("DE", years, [(Role::Ya, ya.clone())].into()).unwrap();
        let panels = vec![constant_panel("FR", 1.0, 1965..=1980), foreign];
        let agg = build_euro_aggregate(&panels, "FR", AggregateMode::ExcludeSelf).unwrap();
        assert_eq!(agg, ya);
    }

    #[test]
    fn include_self_over_identical_series_is_exact() {
        let panels: Vec<_> = ["A", "B", "C"].iter().map(|id| constant_panel(id, 0.1, 1965..=1980)).collect();
        let agg = build_euro_aggregate(&panels, "B", AggregateMode::IncludeSelf).unwrap();
        assert!(agg.iter().all(|&v| v == 0.1));
    }

    #[test]
    fn aggregate_errors() {
        let alone = vec![constant_panel("FR", 1.0, 1965..=1995)];
        assert!(matches!(build_euro_aggregate(&alone, "FR", AggregateMode::ExcludeSelf), Err(Error::SelfOnly { .. })));
        let short = vec![constant_panel("FR", 1.0, 1965..=1995), constant_panel("ES", 1.0, 1975..=1995)];
        assert!(matches!(build_euro_aggregate(&short, "FR", AggregateMode::ExcludeSelf), Err(Error::NoOverlap { .. })));
        // the late starter is covered by the long panel
        let agg = build_euro_aggregate(&short, "ES", AggregateMode::ExcludeSelf).unwrap();
        assert_eq!(agg.len(), 21);
    }

    #[test]
    fn logs_index_roles_only() {
        let panel = load_panel(csv_for(1965..=1980).as_bytes(), &config()).unwrap();
        let out = apply_transforms(&panel, &config()).unwrap();
        assert!((out.series(Role::Ya).unwrap()[0] - 4.605_170_185_988_091).abs() < 1e-12);
        let before = panel.series(Role::Polm).unwrap();
        let after = out.series(Role::Polm).unwrap();
        assert!(before.iter().zip(after).all(|(a, b)| a.to_bits() == b.to_bits()));
        assert_eq!(out.len(), panel.len());
    }

    #[test]
    fn logging_zero_fails() {
        let csv = csv_for(1965..=1980).replacen("1966,5.1,101,", "1966,5.1,0,", 1);
        let panel = load_panel(csv.as_bytes(), &config()).unwrap();
        let err = apply_transforms(&panel, &config()).unwrap_err();
        assert!(matches!(err, Error::NonPositiveValue { role: Role::Price, year: 1966, .. }));
    }

    #[test]
    fn transforms_are_not_idempotent_with_logs() {
        let panel = load_panel(csv_for(1965..=1980).as_bytes(), &config()).unwrap();
        let once = apply_transforms(&panel, &config()).unwrap();
        let twice = apply_transforms(&once, &config()).unwrap();
        assert_ne!(once, twice);

        let mut none = config();
        none.log_transform_roles = Some(BTreeSet::new());
        let a = apply_transforms(&panel, &none).unwrap();
        assert_eq!(apply_transforms(&a, &none).unwrap(), a);
    }
}
