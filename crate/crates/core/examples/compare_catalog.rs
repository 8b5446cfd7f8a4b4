//! Cross-check all four integrators on every standard catalog entry.

use setint::domain::IntervalSet;
use setint::integrators::{compare_all, Tolerances};
use setint::multifunctions::{catalog, standard_specs};

fn main() -> setint::Result<()> {
    let tol = Tolerances::new(1e-3, 64, 8, 11);
    for spec in standard_specs() {
        let f = catalog(&spec)?;
        let report = compare_all(&f, &IntervalSet::unit(), &tol)?;
        let worst = report
            .pairs
            .iter()
            .map(|p| p.distance / p.combined_estimate.max(1e-300))
            .fold(0.0, f64::max);
        println!(
            "{:<20} violations {}  worst distance/estimate {:.3}",
            spec.name(),
            report.violations.len(),
            worst
        );
        if let Some(au) = &report.aumann {
            println!("{:<20} Aumann inside Pettis: {}", "", au.contained);
        }
    }
    Ok(())
}
