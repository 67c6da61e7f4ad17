// Recursive identification under two orderings of the same covariance.

use std::error::Error;

use nalgebra::DMatrix;
use partialvar::identification::{cholesky_identify, reconstruction_error, unit_impulse};
use partialvar::Role;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let vars = [Role::Price, Role::Polm, Role::Ya];
    let sigma = DMatrix::from_row_slice(3, 3, &[1.0, 0.3, -0.2, 0.3, 0.73, -0.38, -0.2, -0.38, 0.56]);
    for ordering in [vars.to_vec(), vec![Role::Polm, Role::Price, Role::Ya]] {
        let factor = cholesky_identify(&sigma, &vars, &ordering)?;
        println!("ordering {ordering:?}");
        println!("B0 (rows and columns in ordering){}", factor.b0);
        println!("reconstruction error {:.1e}", reconstruction_error(&factor, &sigma, &vars)?);
        // a restrictive policy move of one unit
        let imp = unit_impulse(&factor, Role::Polm, 1)?;
        println!("unit policy impulse {:?}\n", imp.aligned(&vars)?.as_slice());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
