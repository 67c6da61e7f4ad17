// Load country CSVs, cut a late-start sample, build the European
// aggregate and take logs.

use std::error::Error;
use std::fs::File;
use std::path::Path;

use partialvar::ingestion::{
    apply_transforms, build_euro_aggregate, load_panel, AggregateMode, CountryConfig, PolmKind,
};
use partialvar::Role;

const IDS: [&str; 12] = ["BE", "DE", "ES", "FI", "FR", "GB", "GR", "IE", "IT", "NL", "PT", "SE"];

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let mut panels = IDS
        .iter()
        .map(|id| {
            let config = CountryConfig::for_role_columns(*id, PolmKind::InterestRate);
            load_panel(File::open(data.join(format!("{id}.csv")))?, &config)
        })
        .collect::<Result<Vec<_>, _>>()?;

    // Spain enters the sample in 1975
    let spain = CountryConfig {
        sample_span: Some([1975, 1995]),
        ..CountryConfig::for_role_columns("ES", PolmKind::InterestRate)
    };
    let es = load_panel(File::open(data.join("ES.csv"))?, &spain)?;
    println!("ES sample {}..={} ({} years)", es.first_year().unwrap(), es.last_year().unwrap(), es.len());

    panels[2] = es;

    // the aggregate follows the target's years
    let yaeur = build_euro_aggregate(&panels, "ES", AggregateMode::ExcludeSelf)?;
    let logged = apply_transforms(&panels[2], &spain)?;
    println!("year   ya(level)  ln ya   polm   aggregate");
    let es = &panels[2];
    for (t, agg) in yaeur.iter().enumerate().take(5) {
        println!(
            "{}  {:9.3}  {:.4}  {:5.2}  {:9.3}",
            es.years()[t],
            es.series(Role::Ya)?[t],
            logged.series(Role::Ya)?[t],
            logged.series(Role::Polm)?[t],
            agg,
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
