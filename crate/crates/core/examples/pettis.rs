//! Pettis integrals through support functions: the reconstruction gap
//! shrinks like 1 − cos(π/m) as the direction grid is refined.

use std::f64::consts::PI;

use setint::domain::IntervalSet;
use setint::integrators::{pettis_integrate, Tolerances};
use setint::multifunctions::{catalog, CatalogSpec};
use setint::oracle::{oracle_integral, oracle_sup_distance};

fn main() -> setint::Result<()> {
    let f = catalog(&CatalogSpec::ScaledDisk { m: 256 })?;
    let a = IntervalSet::unit();
    let truth = oracle_integral(&f, &a)?;
    println!(
        "{:>5} {:>12} {:>12} {:>14}",
        "m", "estimate", "gap", "½(1−cos π/m)"
    );
    for m in [4, 8, 16, 32, 64, 128, 256] {
        let r = pettis_integrate(&f, &a, &Tolerances::new(1e-6, m, 1, 0))?;
        let gap = oracle_sup_distance(&r.value, &truth)?;
        println!(
            "{m:>5} {:>12.4e} {:>12.4e} {:>14.4e}",
            r.error_estimate,
            gap,
            0.5 * (1.0 - (PI / m as f64).cos())
        );
    }
    Ok(())
}
