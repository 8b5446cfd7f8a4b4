//! Aumann integral of a polytope interpolation from its support selections.

use setint::domain::IntervalSet;
use setint::geometry::{hausdorff_distance, ConvexBody};
use setint::integrators::{aumann_integrate, pettis_integrate, Tolerances};
use setint::multifunctions::{catalog, steiner_selection, CatalogSpec};

fn main() -> setint::Result<()> {
    let spec = CatalogSpec::PolytopeInterp {
        a: ConvexBody::rectangle([-0.5, -0.5], [0.5, 0.5])?,
        b: ConvexBody::from_points(&[[0.0, -0.2], [1.0, 0.3], [0.2, 0.9]])?,
    };
    let f = catalog(&spec)?;
    let a = IntervalSet::unit();

    let s = steiner_selection(&f)?;
    println!(
        "Steiner selection at t = 0, ½, 1: {:?} {:?} {:?}",
        s.eval(0.0),
        s.eval(0.5),
        s.eval(1.0)
    );

    let pe = pettis_integrate(&f, &a, &Tolerances::new(1e-4, 128, 1, 0))?;
    for m in [8, 16, 32, 64, 128] {
        let au = aumann_integrate(&f, &a, &Tolerances::new(1e-4, m, 1, 0))?;
        println!(
            "m = {m:>3}: {} vertices, estimate {:.3e}, h(Aumann, Pettis) = {:.3e}",
            au.value.vertex_count(),
            au.error_estimate,
            hausdorff_distance(&au.value, &pe.value)?
        );
    }
    Ok(())
}
