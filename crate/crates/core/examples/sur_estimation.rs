// Two-step SUR on a simulated partial VAR, compared with the parameters
// that generated the data.

use std::error::Error;

use partialvar::design::{build_system, Regressor, SystemSpec};
use partialvar::estimation::{estimate_system, SurOptions};
use partialvar::synthetic::{simulate_var, DgpSpec};
use partialvar::Role;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dgp = DgpSpec::stable_preset();
    let sim = simulate_var(&dgp, 2000, 9)?;
    let spec = SystemSpec::with_default_order(2)?;
    let designs = build_system(&sim.panel, sim.panel.series(Role::Yaeur)?, &spec)?;
    let est = estimate_system(&spec, &designs, &SurOptions::default())?;

    for (i, eq) in est.equations.iter().enumerate() {
        println!("{} equation", eq.response);
        for ((label, b), se) in eq.labels.iter().zip(&eq.coefficients).zip(&eq.std_errors) {
            let truth = match *label {
                Regressor::Intercept => dgp.intercepts[i],
                Regressor::Lag { role: Role::Yaeur, lag } => dgp.exogenous_loadings[lag],
                Regressor::Lag { role, lag } => dgp.lag_matrices[lag - 1][i][spec.position(role).unwrap()],
            };
            println!("  {:<10} {b:8.4} ({se:.4})  true {truth:7.4}", label.to_string());
        }
    }
    let moduli: Vec<String> = est.stability.moduli.iter().map(|m| format!("{m:.3}")).collect();
    println!("stable: {}  moduli: {}", est.stability.stable, moduli.join(" "));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
