// Output responses to a restrictive policy shock, their cumulative
// multiplier, and the size/speed classification.

use std::error::Error;

use partialvar::design::{build_system, SystemSpec};
use partialvar::dynamics::{classify_sensitivity, multiplier_metrics, ClassThresholds, IrfBundle};
use partialvar::estimation::{estimate_system, SurOptions};
use partialvar::identification::cholesky_identify;
use partialvar::synthetic::{simulate_var, DgpSpec};
use partialvar::Role;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let order = [Role::Price, Role::Polm, Role::Ya];
    let sim = simulate_var(&DgpSpec::stable_preset(), 1000, 3)?;
    let spec = SystemSpec::with_default_order(2)?;
    let designs = build_system(&sim.panel, sim.panel.series(Role::Yaeur)?, &spec)?;
    let est = estimate_system(&spec, &designs, &SurOptions::default())?;
    let factor = cholesky_identify(&est.sigma_u, &order, &order)?;
    let irf = IrfBundle::compute(&est, &factor, 20, 1)?;

    let response = irf.response(Role::Polm, Role::Ya).unwrap();
    let cumulative = irf.cumulative(Role::Polm, Role::Ya).unwrap();
    println!(" h  response  cumulative");
    for h in (0..=20).step_by(2) {
        println!("{h:2}  {:8.4}  {:10.4}", response[h], cumulative[h]);
    }
    let m = multiplier_metrics(cumulative)?;
    let class = classify_sensitivity(&m, &ClassThresholds::default());
    println!(
        "multiplier {:.4} (sign {}), 90% reached after {} years: {} / {}",
        m.max_abs_cumulative, m.sign_of_effect, m.years_to_90, class.size, class.speed
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
