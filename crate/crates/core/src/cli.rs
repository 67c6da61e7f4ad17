//! Command-line front end. The binary only forwards to [`run`].

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::ingestion::{CountryConfig, PolmKind};
use crate::pipeline::{run_pipeline, write_outputs, LagPolicy, OutputFormat, RunConfig, Stage};
use crate::report::{rank_countries, RankKey};
use crate::synthetic::study::STUDY_SEED;
use crate::synthetic::{generate_study, simulate_var, twelve_country_study, write_study, DgpSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_COUNTRY_FAILURES: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "partialvar", version, about = "Partial structural VAR for monetary transmission to a sector")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = "PARTIALVAR_OUT")]
    pub out: Option<PathBuf>,
    /// Impulse-response horizon in years.
    #[arg(long, global = true)]
    pub horizon: Option<usize>,
    /// Recursive ordering, e.g. `price,polm,ya`.
    #[arg(long, global = true)]
    pub ordering: Option<String>,
    /// `fixed:P` or `bic:MAX_P` (also `aic`, `hq`).
    #[arg(long, global = true)]
    pub lag: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,
    /// Countries analyzed in parallel.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SimulateKind {
    /// Twelve-country sector study with a ready-to-run config.
    Study,
    /// One panel from the stable partial-VAR preset.
    Var,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate each country's partial VAR.
    Estimate,
    /// Impulse responses.
    Irf,
    /// Variance decompositions.
    Fevd,
    /// Cross-country rankings and summary tables.
    Rank {
        /// Print the ranking under `multiplier`, `speed` or `partvep:Q`.
        #[arg(long, default_value = "multiplier")]
        key: String,
    },
    /// Write synthetic panels.
    Simulate {
        #[arg(long, value_enum, default_value = "study")]
        kind: SimulateKind,
        /// Years per panel; the study default when absent.
        #[arg(long)]
        length: Option<usize>,
        /// First calendar year of the study panels.
        #[arg(long)]
        first_year: Option<i32>,
    },
    /// Every stage and every artifact.
    All,
}

fn apply_overrides(config: &mut RunConfig, g: &GlobalArgs) -> Result<()> {
    if let Some(h) = g.horizon {
        config.run.horizon = h;
    }
    if let Some(o) = &g.ordering {
        config.run.ordering = o.clone();
    }
    if let Some(l) = &g.lag {
        config.run.lag = l.parse::<LagPolicy>()?;
    }
    if let Some(s) = g.seed {
        config.run.seed = s;
    }
    if let Some(f) = g.format {
        config.run.format = match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        };
    }
    Ok(())
}

fn output_dir(g: &GlobalArgs, config: Option<&RunConfig>) -> PathBuf {
    g.out
        .clone()
        .or_else(|| config.and_then(|c| c.run.output_dir.clone()))
        .unwrap_or_else(|| PathBuf::from("partialvar-out"))
}

fn simulate(g: &GlobalArgs, kind: SimulateKind, length: Option<usize>, first_year: Option<i32>) -> Result<i32> {
    let out = output_dir(g, None);
    match kind {
        SimulateKind::Study => {
            let seed = g.seed.unwrap_or(STUDY_SEED);
            let mut spec = twelve_country_study();
            if let Some(t) = length {
                spec.length = t;
            }
            if let Some(y) = first_year {
                spec.first_year = y;
            }
            let panels = generate_study(&spec, seed)?;
            let countries = write_study(&out, &panels)?;
            let mut config = RunConfig::new(".", countries);
            config.run.seed = seed;
            apply_overrides(&mut config, g)?;
            fs::write(out.join("config.toml"), config.to_toml()?)?;
            println!("wrote {} panels and config.toml to {}", panels.len(), out.display());
        }
        SimulateKind::Var => {
            let seed = g.seed.unwrap_or(0);
            let sim = simulate_var(&DgpSpec::stable_preset(), length.unwrap_or(200), seed)?;
            fs::create_dir_all(&out)?;
            sim.panel.write_csv(fs::File::create(out.join("var.csv"))?)?;
            let truth = serde_json::to_string_pretty(&sim.dgp)?;
            fs::write(out.join("var_dgp.json"), truth + "\n")?;
            println!("wrote var.csv and var_dgp.json to {}", out.display());
        }
    }
    Ok(EXIT_OK)
}

fn load_config(g: &GlobalArgs) -> Result<RunConfig> {
    let path = g.config.as_deref().ok_or_else(|| Error::Config("--config is required for this command".into()))?;
    let mut config = RunConfig::load(path)?;
    apply_overrides(&mut config, g)?;
    Ok(config)
}

fn analyze(g: &GlobalArgs, stage: Stage, rank_key: Option<&str>) -> Result<i32> {
    let config = load_config(g)?;
    let key: Option<RankKey> = rank_key.map(str::parse).transpose().map_err(|e: Error| Error::Config(e.to_string()))?;
    let outcome = run_pipeline(&config, g.jobs)?;
    let out = output_dir(g, Some(&config));
    let written = write_outputs(&out, &config, &outcome, stage)?;

    if let (Some(key), Some(_)) = (key, &outcome.summary) {
        let results: Vec<_> = outcome.analyses.iter().map(|a| a.result.clone()).collect();
        for e in rank_countries(&results, key)? {
            println!("{:>3}  {:<6} {:.6}", e.rank, e.country_id, e.value);
        }
    } else if let (Stage::All, Some(summary)) = (stage, &outcome.summary) {
        print!("{}", summary.to_text());
    }
    for f in &outcome.failures {
        eprintln!("{} failed at {}: {}", f.country_id, f.stage, f.error);
    }
    println!("{} files written to {}", written.len(), out.display());
    Ok(outcome.exit_code())
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let g = &cli.global;
    let result = match &cli.command {
        Command::Estimate => analyze(g, Stage::Estimate, None),
        Command::Irf => analyze(g, Stage::Irf, None),
        Command::Fevd => analyze(g, Stage::Fevd, None),
        Command::Rank { key } => analyze(g, Stage::Rank, Some(key)),
        Command::All => analyze(g, Stage::All, None),
        Command::Simulate { kind, length, first_year } => simulate(g, *kind, *length, *first_year),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

/// A config for CSVs whose columns are the role names.
pub fn role_column_config(data_dir: &Path, ids: &[&str]) -> RunConfig {
    let countries = ids
        .iter()
        .map(|id| CountryConfig {
            file: Some(format!("{id}.csv")),
            ..CountryConfig::for_role_columns(*id, PolmKind::InterestRate)
        })
        .collect();
    RunConfig::new(data_dir, countries)
}
