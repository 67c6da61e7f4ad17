// A shortened twelve-country synthetic study run through the whole
// pipeline. `partialvar simulate` writes the full-length version.

use std::error::Error;

use partialvar::pipeline::{run_pipeline, write_outputs, RunConfig, Stage};
use partialvar::synthetic::{generate_study, twelve_country_study, write_study, StudySpec};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dir = tempfile::tempdir()?;
    let spec = StudySpec { length: 4000, ..twelve_country_study() };
    let panels = generate_study(&spec, 7)?;
    let config = RunConfig::new(dir.path(), write_study(dir.path(), &panels)?);

    let outcome = run_pipeline(&config, 4)?;
    let written = write_outputs(&dir.path().join("out"), &config, &outcome, Stage::All)?;
    print!("{}", outcome.summary.as_ref().expect("all countries ran").to_text());
    println!("{} artifacts", written.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
