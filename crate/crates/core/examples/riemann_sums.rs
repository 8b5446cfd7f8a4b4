//! McShane and Birkhoff integrals of a rotating segment, with their traces.

use setint::domain::IntervalSet;
use setint::integrators::{birkhoff_integrate, mcshane_integrate, trace_csv, Tolerances};
use setint::multifunctions::{catalog, CatalogSpec};

fn main() -> setint::Result<()> {
    let f = catalog(&CatalogSpec::RotatingSegment {})?;
    let tol = Tolerances::new(1e-3, 64, 16, 2024);
    let a = IntervalSet::unit();

    let mc = mcshane_integrate(&f, &a, &tol)?;
    let bi = birkhoff_integrate(&f, &a, &tol)?;
    for r in [&mc, &bi] {
        println!(
            "{:?}: {} vertices, estimate {:.3e}, {} evaluations",
            r.method,
            r.value.vertex_count(),
            r.error_estimate,
            r.budget_used
        );
    }
    // The integral is the disk of radius 2/π.
    let r = mc
        .value
        .vertices()
        .map(|v| v[0].hypot(v[1]))
        .fold(0.0, f64::max);
    println!(
        "largest vertex norm {r:.6}, 2/π = {:.6}",
        2.0 / std::f64::consts::PI
    );

    print!("{}", trace_csv([bi.trace.as_slice()]));
    Ok(())
}
