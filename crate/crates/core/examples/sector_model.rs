// Comparative statics of the sector model: who gains from a rate cut.

use std::error::Error;

use partialvar::synthetic::{rate_shock_statics, sector_equilibrium, sign_checks, SectorCalibration};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    println!(
        "{:<20} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}",
        "preset", "price", "qty", "cost", "imports", "income", "total"
    );
    for (name, cal) in SectorCalibration::presets() {
        let eq = sector_equilibrium(&cal, cal.base_rate, cal.base_exchange_rate, cal.base_income)?;
        let cut = rate_shock_statics(&cal, -1.0)?;
        println!(
            "{name:<20} {:8.3} {:8.3} {:+8.3} {:+8.3} {:+8.3} {:+8.3}",
            eq.price, eq.quantity, cut.cost, cut.imported_input, cut.income, cut.total
        );
        assert!(sign_checks(&cal, 1e-6)?.iter().all(|c| c.holds));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
