// Forecast-error variance shares and the policy share of output variance.

use std::error::Error;

use partialvar::design::{build_system, SystemSpec};
use partialvar::dynamics::ma_coefficients;
use partialvar::estimation::{estimate_system, SurOptions};
use partialvar::fevd::{fevd, partvep, REPORT_HORIZONS};
use partialvar::identification::cholesky_identify;
use partialvar::synthetic::{simulate_var, DgpSpec};
use partialvar::Role;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let order = [Role::Price, Role::Polm, Role::Ya];
    let sim = simulate_var(&DgpSpec::stable_preset(), 1000, 5)?;
    let spec = SystemSpec::with_default_order(2)?;
    let designs = build_system(&sim.panel, sim.panel.series(Role::Yaeur)?, &spec)?;
    let est = estimate_system(&spec, &designs, &SurOptions::default())?;
    let factor = cholesky_identify(&est.sigma_u, &order, &order)?;
    let table = fevd(&ma_coefficients(&est, 20), &factor.impact_matrix(&order)?, &order, &factor.ordering, 20)?;

    println!("share of ya variance by shock");
    println!("  q   price   polm     ya");
    for q in REPORT_HORIZONS {
        let s: Vec<f64> = order.iter().map(|&j| table.share(Role::Ya, j, q)).collect::<Result<_, _>>()?;
        println!("{q:3}  {:5.1}%  {:5.1}%  {:5.1}%", 100.0 * s[0], 100.0 * s[1], 100.0 * s[2]);
    }
    println!("policy share at q=20: {:.4}", partvep(&table, 20)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
