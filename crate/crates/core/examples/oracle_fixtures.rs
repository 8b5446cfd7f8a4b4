//! Reference integrals and the stored fixtures they are checked against.

use setint::domain::IntervalSet;
use setint::integrators::{birkhoff_integrate, Tolerances};
use setint::multifunctions::{catalog, CatalogSpec};
use setint::oracle::{fixture_dir, load_fixture, oracle_distance};

fn main() -> setint::Result<()> {
    let dir = fixture_dir();
    let fx = load_fixture(&dir, "rotating_segment")?;
    println!(
        "{}: {} directions, order {}, {} panels, error ≤ {:.1e}, hash current: {}",
        fx.entry,
        fx.oracle.support_values.grid().len(),
        fx.oracle.quadrature_order,
        fx.oracle.panels,
        fx.oracle.per_direction_error,
        fx.hash_is_current()
    );

    let f = catalog(&CatalogSpec::RotatingSegment {})?;
    let r = birkhoff_integrate(&f, &IntervalSet::unit(), &Tolerances::new(1e-3, 256, 8, 3))?;
    let d = oracle_distance(&r, &fx.oracle)?;
    println!(
        "Birkhoff: oracle distance {d:.3e} against estimate {:.3e}",
        r.error_estimate
    );
    Ok(())
}
