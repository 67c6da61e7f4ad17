// Information criteria over candidate lag orders, all fitted on the same dates.

use std::error::Error;

use partialvar::design::{lag_criteria, select_lag_order, InformationCriterion};
use partialvar::synthetic::{simulate_var, DgpSpec};
use partialvar::Role;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let order = [Role::Price, Role::Polm, Role::Ya];
    let sim = simulate_var(&DgpSpec::stable_preset(), 500, 42)?;
    let yaeur = sim.panel.series(Role::Yaeur)?;
    for crit in [InformationCriterion::Aic, InformationCriterion::Bic, InformationCriterion::Hq] {
        let values = lag_criteria(&sim.panel, yaeur, 4, crit, &order)?;
        let picked = select_lag_order(&sim.panel, yaeur, 4, crit, &order)?;
        let shown: Vec<String> = values.iter().map(|(p, v)| format!("p={p}:{v:.4}")).collect();
        println!("{crit:?}: {} -> {picked}", shown.join("  "));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
