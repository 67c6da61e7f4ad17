//! Batch pipeline: per-country analysis with fault isolation, then the
//! cross-country report, written through a staging directory.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::design::{build_system, select_lag_order, InformationCriterion, SystemSpec};
use crate::dynamics::{
    classify_sensitivity, multiplier_metrics, ClassThresholds, IrfBundle, MultiplierMetrics, DEFAULT_HORIZON,
};
use crate::error::{Error, Result};
use crate::estimation::{estimate_system, SurOptions, SystemEstimate};
use crate::fevd::{fevd, FevdTable, REPORT_HORIZONS};
use crate::identification::{cholesky_identify, StructuralFactor};
use crate::ingestion::{
    apply_transforms, build_euro_aggregate, load_panel, log_series, AggregateMode, AnnualPanel, CountryConfig,
};
use crate::report::{summary_report, CountryResult, SummaryReport};
use crate::role::{parse_ordering, Role};

/// How the lag order is chosen: `fixed:P` or `CRITERION:MAX_P`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LagPolicy {
    Fixed(usize),
    Select { criterion: InformationCriterion, max_p: usize },
}

impl Default for LagPolicy {
    fn default() -> Self {
        LagPolicy::Fixed(2)
    }
}

impl fmt::Display for LagPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LagPolicy::Fixed(p) => write!(f, "fixed:{p}"),
            LagPolicy::Select { criterion, max_p } => {
                let name = match criterion {
                    InformationCriterion::Aic => "aic",
                    InformationCriterion::Bic => "bic",
                    InformationCriterion::Hq => "hq",
                };
                write!(f, "{name}:{max_p}")
            }
        }
    }
}

impl FromStr for LagPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("lag policy `{s}` is not `fixed:P` or `bic:MAX_P`"));
        let (kind, n) = s.trim().split_once(':').ok_or_else(bad)?;
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(Error::Config("lag order must be at least 1".into()));
        }
        if kind.trim().eq_ignore_ascii_case("fixed") {
            return Ok(LagPolicy::Fixed(n));
        }
        let criterion = kind.parse().map_err(|_| bad())?;
        Ok(LagPolicy::Select { criterion, max_p: n })
    }
}

impl Serialize for LagPolicy {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LagPolicy {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown format `{other}`"))),
        }
    }
}

fn default_data_dir() -> PathBuf {
    PathBuf::from(".")
}
fn default_ordering() -> String {
    "price,polm,ya".into()
}
fn default_horizon() -> usize {
    DEFAULT_HORIZON
}
fn default_fevd_horizons() -> Vec<usize> {
    REPORT_HORIZONS.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSettings {
    /// Relative paths are resolved against the config file's directory.
    #[serde(default = "default_data_dir")]
    pub data_dir: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub lag: LagPolicy,
    #[serde(default = "default_ordering")]
    pub ordering: String,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default = "default_fevd_horizons")]
    pub fevd_horizons: Vec<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub aggregate: AggregateMode,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub iterate_sur: bool,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            data_dir: default_data_dir(),
            output_dir: None,
            lag: LagPolicy::default(),
            ordering: default_ordering(),
            horizon: DEFAULT_HORIZON,
            fevd_horizons: default_fevd_horizons(),
            seed: 0,
            aggregate: AggregateMode::default(),
            format: OutputFormat::default(),
            iterate_sur: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default)]
    pub run: RunSettings,
    #[serde(default)]
    pub thresholds: ClassThresholds,
    pub country: Vec<CountryConfig>,
}

impl RunConfig {
    pub fn new(data_dir: impl Into<PathBuf>, countries: Vec<CountryConfig>) -> Self {
        Self {
            run: RunSettings { data_dir: data_dir.into(), ..RunSettings::default() },
            thresholds: ClassThresholds::default(),
            country: countries,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a config file and anchors its data directory at the file.
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut config = Self::from_toml(&text)?;
        if config.run.data_dir.is_relative() {
            let base = path.parent().unwrap_or(Path::new("."));
            config.run.data_dir = base.join(&config.run.data_dir);
        }
        Ok(config)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn ordering(&self) -> Result<Vec<Role>> {
        parse_ordering(&self.run.ordering).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn country_file(&self, country: &CountryConfig) -> PathBuf {
        let name = country.file.clone().unwrap_or_else(|| format!("{}.csv", country.country_id));
        self.run.data_dir.join(name)
    }

    /// Checks everything that is fatal for the whole run.
    pub fn validate(&self) -> Result<()> {
        if self.country.is_empty() {
            return Err(Error::Config("no countries configured".into()));
        }
        self.ordering()?;
        self.thresholds.validate()?;
        if self.run.horizon == 0 {
            return Err(Error::Config("horizon must be at least 1".into()));
        }
        if self.run.fevd_horizons.is_empty() || self.run.fevd_horizons.contains(&0) {
            return Err(Error::Config("FEVD horizons must be non-empty and positive".into()));
        }
        let max_q = self.run.fevd_horizons.iter().copied().max().unwrap_or(0);
        if self.run.horizon < max_q {
            return Err(Error::Config(format!(
                "horizon {} is below the largest FEVD horizon {max_q}",
                self.run.horizon
            )));
        }
        let mut seen = BTreeSet::new();
        for c in &self.country {
            if !seen.insert(c.country_id.as_str()) {
                return Err(Error::Config(format!("country `{}` listed twice", c.country_id)));
            }
            c.validate()?;
            let file = self.country_file(c);
            if !file.is_file() {
                return Err(Error::Config(format!("{}: data file {} not found", c.country_id, file.display())));
            }
        }
        Ok(())
    }
}

/// Full output of the pipeline for one country.
#[derive(Debug, Clone)]
pub struct CountryAnalysis {
    pub country_id: String,
    pub lag_order: usize,
    pub estimate: SystemEstimate,
    pub factor: StructuralFactor,
    pub irf: IrfBundle,
    pub fevd: FevdTable,
    pub result: CountryResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryFailure {
    pub country_id: String,
    pub stage: String,
    pub error: String,
}

/// Which analysis the run stops at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Estimate,
    Irf,
    Fevd,
    Rank,
    All,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    /// Successful countries in config order.
    pub analyses: Vec<CountryAnalysis>,
    pub failures: Vec<CountryFailure>,
    pub summary: Option<SummaryReport>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.failures.is_empty() {
            0
        } else {
            2
        }
    }
}

fn failure(country: &str, stage: &str, error: &Error) -> CountryFailure {
    CountryFailure { country_id: country.into(), stage: stage.into(), error: error.to_string() }
}

fn read_country(config: &RunConfig, country: &CountryConfig) -> Result<AnnualPanel> {
    let path = config.country_file(country);
    let file = fs::File::open(&path)?;
    load_panel(file, country).map_err(|e| match e {
        Error::MissingColumn { column, .. } => Error::MissingColumn { column, source_name: path.display().to_string() },
        other => other,
    })
}

/// Lag order under `policy` for one transformed panel.
pub fn choose_lag_order(panel: &AnnualPanel, yaeur: &[f64], policy: LagPolicy, ordering: &[Role]) -> Result<usize> {
    match policy {
        LagPolicy::Fixed(p) => Ok(p),
        LagPolicy::Select { criterion, max_p } => select_lag_order(panel, yaeur, max_p, criterion, ordering),
    }
}

/// Runs one country from its raw panel to its result row. `raw` holds
/// every loaded panel, for the European aggregate.
pub fn analyze_country(
    config: &RunConfig,
    country: &CountryConfig,
    raw: &[AnnualPanel],
) -> std::result::Result<CountryAnalysis, CountryFailure> {
    let id = country.country_id.as_str();
    let ordering = config.ordering().map_err(|e| failure(id, "config", &e))?;
    let target = raw
        .iter()
        .find(|p| p.country_id() == id)
        .ok_or_else(|| failure(id, "load", &Error::InvalidInput("panel not loaded".into())))?;

    let (panel, yaeur) = (|| {
        let yaeur = build_euro_aggregate(raw, id, config.run.aggregate)?;
        let panel = apply_transforms(target, country)?;
        let yaeur = if country.log_roles().contains(&Role::Ya) {
            log_series(&yaeur, Role::Yaeur, target.years())?
        } else {
            yaeur
        };
        Ok((panel, yaeur))
    })()
    .map_err(|e: Error| failure(id, "transform", &e))?;

    let lag_order = choose_lag_order(&panel, &yaeur, config.run.lag, &Role::ENDOGENOUS)
        .map_err(|e| failure(id, "lag selection", &e))?;
    let spec = SystemSpec::with_default_order(lag_order).map_err(|e| failure(id, "design", &e))?;
    let designs = build_system(&panel, &yaeur, &spec).map_err(|e| failure(id, "design", &e))?;
    let options = SurOptions { iterate: config.run.iterate_sur, ..SurOptions::default() };
    let estimate = estimate_system(&spec, &designs, &options).map_err(|e| failure(id, "estimation", &e))?;

    let variables = spec.endogenous_order.clone();
    let factor =
        cholesky_identify(&estimate.sigma_u, &variables, &ordering).map_err(|e| failure(id, "identification", &e))?;
    let irf = IrfBundle::compute(&estimate, &factor, config.run.horizon, country.shock_sign())
        .map_err(|e| failure(id, "dynamics", &e))?;

    let q_max = config.run.fevd_horizons.iter().copied().max().unwrap_or(1);
    let table = factor
        .impact_matrix(&variables)
        .and_then(|impact| fevd(&irf.phi, &impact, &variables, &ordering, q_max))
        .map_err(|e| failure(id, "fevd", &e))?;

    let cumulative = irf.cumulative(Role::Polm, Role::Ya).expect("policy shock and output are in the system");
    let metrics: MultiplierMetrics = multiplier_metrics(cumulative).map_err(|e| failure(id, "metrics", &e))?;
    let partvep = config
        .run
        .fevd_horizons
        .iter()
        .map(|&q| Ok((q, table.share(Role::Ya, Role::Polm, q)?)))
        .collect::<Result<BTreeMap<_, _>>>()
        .map_err(|e| failure(id, "fevd", &e))?;
    let result = CountryResult {
        country_id: id.into(),
        classification: classify_sensitivity(&metrics, &config.thresholds),
        metrics,
        partvep,
        moduli: estimate.stability.moduli.clone(),
        output_response: irf.response(Role::Polm, Role::Ya).expect("output in system").to_vec(),
    };
    Ok(CountryAnalysis { country_id: id.into(), lag_order, estimate, factor, irf, fevd: table, result })
}

/// Validates the config, then analyzes every country on up to `jobs`
/// threads. Config errors are returned; country errors are collected.
pub fn run_pipeline(config: &RunConfig, jobs: usize) -> Result<RunOutcome> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;

    pool.install(|| {
        let loaded: Vec<std::result::Result<AnnualPanel, CountryFailure>> = config
            .country
            .par_iter()
            .map(|c| read_country(config, c).map_err(|e| failure(&c.country_id, "load", &e)))
            .collect();
        let raw: Vec<AnnualPanel> = loaded.iter().filter_map(|r| r.as_ref().ok().cloned()).collect();

        let analyzed: Vec<std::result::Result<CountryAnalysis, CountryFailure>> = config
            .country
            .par_iter()
            .zip(loaded.par_iter())
            .map(|(c, l)| match l {
                Ok(_) => analyze_country(config, c, &raw),
                Err(f) => Err(f.clone()),
            })
            .collect();

        let mut analyses = Vec::new();
        let mut failures = Vec::new();
        for r in analyzed {
            match r {
                Ok(a) => {
                    info!(
                        "{}: p = {}, multiplier {:.4}",
                        a.country_id, a.lag_order, a.result.metrics.max_abs_cumulative
                    );
                    analyses.push(a)
                }
                Err(f) => {
                    warn!("{} failed at {}: {}", f.country_id, f.stage, f.error);
                    failures.push(f)
                }
            }
        }
        let results: Vec<CountryResult> = analyses.iter().map(|a| a.result.clone()).collect();
        let summary = if results.is_empty() { None } else { Some(summary_report(&results)?) };
        Ok(RunOutcome { analyses, failures, summary })
    })
}

/// Run facts recorded next to the artifacts; no paths or times, so equal
/// inputs give equal bytes.
#[derive(Debug, Serialize)]
struct RunRecord<'a> {
    stage: Stage,
    seed: u64,
    lag: String,
    ordering: &'a str,
    horizon: usize,
    fevd_horizons: &'a [usize],
    succeeded: Vec<&'a str>,
    failed: Vec<&'a str>,
}

#[derive(Debug, Serialize)]
struct CoefficientRow {
    equation: Role,
    regressor: String,
    value: f64,
    std_error: f64,
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    fs::write(dir.join(name), bytes)?;
    Ok(())
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(value)?;
    v.push(b'\n');
    Ok(v)
}

fn write_country(dir: &Path, a: &CountryAnalysis, stage: Stage, format: OutputFormat) -> Result<()> {
    let id = &a.country_id;
    let wants = |s: Stage| stage == Stage::All || stage == s;
    if wants(Stage::Estimate) {
        match format {
            OutputFormat::Json => {
                write_file(dir, &format!("{id}_estimate.json"), &json_bytes(&a.estimate.document())?)?
            }
            OutputFormat::Csv => {
                let mut out = csv::Writer::from_writer(Vec::new());
                for eq in &a.estimate.equations {
                    for ((label, &value), &std_error) in eq.labels.iter().zip(&eq.coefficients).zip(&eq.std_errors) {
                        out.serialize(CoefficientRow {
                            equation: eq.response,
                            regressor: label.to_string(),
                            value,
                            std_error,
                        })?;
                    }
                }
                let bytes = out.into_inner().map_err(|e| Error::Io(e.into_error()))?;
                write_file(dir, &format!("{id}_coefficients.csv"), &bytes)?;
            }
        }
    }
    if wants(Stage::Irf) {
        match format {
            OutputFormat::Json => write_file(dir, &format!("{id}_irf.json"), &json_bytes(&a.irf.shocks)?)?,
            OutputFormat::Csv => {
                let mut buf = Vec::new();
                a.irf.write_tidy_csv(id, &mut buf)?;
                write_file(dir, &format!("{id}_irf.csv"), &buf)?;
            }
        }
    }
    if wants(Stage::Fevd) {
        match format {
            OutputFormat::Json => write_file(dir, &format!("{id}_fevd.json"), &json_bytes(&a.fevd.entries())?)?,
            OutputFormat::Csv => {
                let mut buf = Vec::new();
                a.fevd.write_csv(id, &mut buf)?;
                write_file(dir, &format!("{id}_fevd.csv"), &buf)?;
            }
        }
    }
    if stage == Stage::All {
        write_file(dir, &format!("{id}_metrics.json"), &json_bytes(&a.result)?)?;
    }
    Ok(())
}

fn write_summary(dir: &Path, summary: &SummaryReport, format: OutputFormat) -> Result<()> {
    write_file(dir, "summary_report.txt", summary.to_text().as_bytes())?;
    match format {
        OutputFormat::Json => write_file(dir, "summary_report.json", summary.to_json()?.as_bytes())?,
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            summary.write_countries_csv(&mut buf)?;
            write_file(dir, "summary_countries.csv", &buf)?;
            let mut buf = Vec::new();
            summary.fevd.write_csv(&mut buf)?;
            write_file(dir, "summary_fevd.csv", &buf)?;
            let mut buf = Vec::new();
            summary.write_rankings_csv(&mut buf)?;
            write_file(dir, "summary_rankings.csv", &buf)?;
        }
    }
    Ok(())
}

/// Writes the artifacts for `stage` into a staging directory next to
/// `out_dir`, then moves them into place. Returns the written file names.
pub fn write_outputs(out_dir: &Path, config: &RunConfig, outcome: &RunOutcome, stage: Stage) -> Result<Vec<String>> {
    let parent = match out_dir.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&parent)?;
    let staging = tempfile::Builder::new().prefix(".partialvar-staging-").tempdir_in(&parent)?;
    let dir = staging.path();
    let format = config.run.format;

    if stage != Stage::Rank {
        for a in &outcome.analyses {
            write_country(dir, a, stage, format)?;
        }
    }
    if matches!(stage, Stage::Rank | Stage::All) {
        if let Some(summary) = &outcome.summary {
            write_summary(dir, summary, format)?;
        }
    }
    if !outcome.failures.is_empty() {
        write_file(dir, "summary_failures.json", &json_bytes(&outcome.failures)?)?;
    }
    let record = RunRecord {
        stage,
        seed: config.run.seed,
        lag: config.run.lag.to_string(),
        ordering: &config.run.ordering,
        horizon: config.run.horizon,
        fevd_horizons: &config.run.fevd_horizons,
        succeeded: outcome.analyses.iter().map(|a| a.country_id.as_str()).collect(),
        failed: outcome.failures.iter().map(|f| f.country_id.as_str()).collect(),
    };
    write_file(dir, "summary_run.json", &json_bytes(&record)?)?;

    let mut names: Vec<String> =
        fs::read_dir(dir)?.map(|e| Ok(e?.file_name().to_string_lossy().into_owned())).collect::<Result<_>>()?;
    names.sort();
    fs::create_dir_all(out_dir)?;
    for name in &names {
        fs::rename(dir.join(name), out_dir.join(name))?;
    }
    Ok(names)
}
