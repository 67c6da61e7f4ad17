//! Whole-pipeline runs through the library and the command line.

mod common;

use std::fs;
use std::path::Path;
use std::process::Command;

use partialvar::cli::{EXIT_CONFIG, EXIT_COUNTRY_FAILURES, EXIT_OK};
use partialvar::fevd::partvep;
use partialvar::ingestion::{CountryConfig, PolmKind};
use partialvar::pipeline::{run_pipeline, RunConfig};
use partialvar::synthetic::{
    generate_country_panel_with_common, generate_study, rate_shock_statics, twelve_country_study, write_study,
    MacroProcess, SectorCalibration,
};

use common::*;

fn write_sector_country(dir: &Path, id: &str, cal: &SectorCalibration, seed: u64) -> CountryConfig {
    let m = MacroProcess { output_shock_sd: 0.02, ..MacroProcess::default() };
    let panel = generate_country_panel_with_common(id, cal, &m, 3000, seed, None).unwrap();
    let file = format!("{id}.csv");
    panel.write_csv(fs::File::create(dir.join(&file)).unwrap()).unwrap();
    CountryConfig { file: Some(file), ..CountryConfig::for_role_columns(id, PolmKind::InterestRate) }
}

#[test]
fn cost_channel_makes_tightening_contract_output() {
    let cal = SectorCalibration::cost_dominated();
    assert!(rate_shock_statics(&cal, 1.0).unwrap().total < 0.0);

    let dir = tempfile::tempdir().unwrap();
    let countries = vec![
        write_sector_country(dir.path(), "AA", &cal, 1),
        write_sector_country(dir.path(), "BB", &SectorCalibration::low_imported_input(), 2),
    ];
    let outcome = run_pipeline(&RunConfig::new(dir.path(), countries), 2).unwrap();
    assert!(outcome.failures.is_empty(), "{:?}", outcome.failures);
    let path = &outcome.analyses[0].result.output_response;
    let extremum = path.iter().copied().max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap();
    assert!(extremum < 0.0, "output response {path:?}");
}

fn study_fixture(dir: &Path, length: usize) -> RunConfig {
    let spec = partialvar::synthetic::StudySpec { length, ..twelve_country_study() };
    let panels = generate_study(&spec, 7).unwrap();
    RunConfig::new(dir, write_study(dir, &panels).unwrap())
}

#[test]
fn twelve_country_report_has_every_section() {
    let dir = tempfile::tempdir().unwrap();
    let config = study_fixture(dir.path(), 400);
    let outcome = run_pipeline(&config, 4).unwrap();
    let summary = outcome.summary.as_ref().unwrap();
    assert_eq!(summary.countries.len(), 12);
    assert_eq!(summary.fevd.rows.len(), 12);
    assert_eq!(summary.rankings.len(), 2 + config.run.fevd_horizons.len());
    assert!(summary.rankings.iter().all(|r| r.order.len() == 12));

    // the report carries the decomposition's own numbers
    for (a, row) in outcome.analyses.iter().zip(&summary.fevd.rows) {
        for (i, &q) in summary.fevd.horizons.iter().enumerate() {
            assert_eq!(row.1[i], partvep(&a.fevd, q).unwrap());
        }
    }
    let text = summary.to_text();
    for heading in ["Country classification", "Policy share", "Rankings"] {
        assert!(text.contains(heading), "{heading} missing");
    }
}

#[test]
fn a_bad_country_does_not_stop_the_others() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    fs::create_dir_all(&data).unwrap();
    let config = study_fixture(&data, 200);
    fs::write(data.join("config.toml"), config.to_toml().unwrap()).unwrap();

    // drop the output column from one file
    let fi = data.join("FI.csv");
    let trimmed: String =
        fs::read_to_string(&fi).unwrap().lines().map(|l| l.rsplit_once(',').unwrap().0.to_string() + "\n").collect();
    fs::write(&fi, trimmed).unwrap();

    let out = dir.path().join("out");
    let code = cli(&["all", "--config", data.join("config.toml").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_COUNTRY_FAILURES);
    let failures = fs::read_to_string(out.join("summary_failures.json")).unwrap();
    assert!(failures.contains("\"FI\"") && failures.contains("ya"));
    assert!(!out.join("FI_irf.csv").exists());
    for id in ["BE", "ES", "SE"] {
        assert!(out.join(format!("{id}_irf.csv")).exists());
    }
    let summary = fs::read_to_string(out.join("summary_countries.csv")).unwrap();
    assert_eq!(summary.lines().count(), 12);
}

#[test]
fn config_errors_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    fs::create_dir_all(&data).unwrap();
    let mut config = study_fixture(&data, 200);
    config.country[3].file = Some("missing.csv".into());
    let path = data.join("config.toml");
    fs::write(&path, config.to_toml().unwrap()).unwrap();
    let out = dir.path().join("out");
    assert_eq!(cli(&["all", "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap()]), EXIT_CONFIG);
    assert!(!out.exists());

    // horizon shorter than the longest decomposition horizon
    config.country[3].file = Some("FI.csv".into());
    fs::write(&path, config.to_toml().unwrap()).unwrap();
    let code = cli(&["fevd", "--config", path.to_str().unwrap(), "--horizon", "10", "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_CONFIG);
    assert_eq!(cli(&["all", "--lag", "fixed:2"]), EXIT_CONFIG);
    assert_eq!(cli(&["all", "--config", path.to_str().unwrap(), "--lag", "median:2"]), EXIT_CONFIG);
    assert!(!out.exists());
}

#[test]
fn every_subcommand_writes_its_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let d = data.to_str().unwrap();
    assert_eq!(cli(&["simulate", "--length", "120", "--out", d]), EXIT_OK);
    let config = data.join("config.toml");
    let c = config.to_str().unwrap();
    let run = |name: &str, extra: &[&str]| {
        let out = dir.path().join(name);
        let mut args = vec![name, "--config", c, "--out", out.to_str().unwrap()];
        args.extend_from_slice(extra);
        assert_eq!(cli(&args), EXIT_OK, "{name}");
        out
    };
    assert!(run("estimate", &[]).join("ES_coefficients.csv").exists());
    assert!(run("irf", &["--format", "json", "--horizon", "25"]).join("ES_irf.json").exists());
    assert!(run("fevd", &["--lag", "bic:3", "--jobs", "3"]).join("ES_fevd.csv").exists());
    let rank = run("rank", &["--key", "partvep:10", "--format", "json"]);
    assert!(rank.join("summary_report.json").exists());
    let all = run("all", &["--ordering", "polm,price,ya"]);
    for f in ["ES_metrics.json", "summary_report.txt", "summary_rankings.csv", "summary_run.json"] {
        assert!(all.join(f).exists(), "{f}");
    }

    let var = dir.path().join("var");
    assert_eq!(cli(&["simulate", "--kind", "var", "--seed", "3", "--out", var.to_str().unwrap()]), EXIT_OK);
    assert!(var.join("var.csv").exists() && var.join("var_dgp.json").exists());
}

#[test]
fn output_directory_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("from-env");
    let status = Command::new(env!("CARGO_BIN_EXE_partialvar"))
        .args(["simulate", "--length", "60"])
        .env("PARTIALVAR_OUT", &out)
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    assert!(out.join("config.toml").exists());
}

#[test]
fn same_seed_gives_identical_trees() {
    let dir = tempfile::tempdir().unwrap();
    let trees: Vec<_> = ["a", "b"]
        .iter()
        .map(|name| {
            let root = dir.path().join(name);
            let data = root.join("data");
            assert_eq!(cli(&["simulate", "--seed", "7", "--length", "150", "--out", data.to_str().unwrap()]), EXIT_OK);
            let config = data.join("config.toml");
            let out = root.join("out");
            let code = cli(&[
                "all",
                "--config",
                config.to_str().unwrap(),
                "--seed",
                "7",
                "--format",
                "json",
                "--out",
                out.to_str().unwrap(),
            ]);
            assert_eq!(code, EXIT_OK);
            tree_bytes(&root)
        })
        .collect();
    assert_eq!(trees[0], trees[1]);
}

#[test]
fn bundled_sample_runs() {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/config.toml");
    let config = RunConfig::load(&config).unwrap();
    let outcome = run_pipeline(&config, 2).unwrap();
    assert_eq!(outcome.analyses.len(), 12);
    assert_eq!(outcome.exit_code(), 0);
}
