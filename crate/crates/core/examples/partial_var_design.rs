// The block-restricted regressor layout: the macro equations never see
// sector output or the European aggregate.

use std::error::Error;

use partialvar::design::{build_system, SystemSpec};
use partialvar::synthetic::{simulate_var, DgpSpec};
use partialvar::Role;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let sim = simulate_var(&DgpSpec::stable_preset(), 60, 1)?;
    let spec = SystemSpec::with_default_order(2)?;
    let designs = build_system(&sim.panel, sim.panel.series(Role::Yaeur)?, &spec)?;
    for d in &designs {
        let labels: Vec<String> = d.labels.iter().map(ToString::to_string).collect();
        println!("{:<5} k={:<2} rows={}  {}", d.equation.to_string(), d.k(), d.rows(), labels.join(" "));
    }
    println!("effective sample {}..={}", designs[0].years[0], designs[0].years.last().unwrap());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
