//! Convex bodies: Minkowski sums, Hausdorff distance, the support-function
//! embedding and its inverse.

use setint::geometry::{
    embed, hausdorff_distance, reconstruct, steiner_point, sup_norm_distance,
    weighted_minkowski_sum, ConvexBody, DirectionGrid,
};

fn main() -> setint::Result<()> {
    let square = ConvexBody::rectangle([-1.0, -1.0], [1.0, 1.0])?;
    let triangle = ConvexBody::from_points(&[[0.0, 0.0], [2.0, 0.0], [0.0, 1.0]])?;

    let sum = weighted_minkowski_sum(&[(0.5, &square), (1.0, &triangle)])?;
    println!("½·square ⊕ triangle has {} vertices:", sum.vertex_count());
    for v in sum.vertices() {
        println!("  ({:+.3}, {:+.3})", v[0], v[1]);
    }

    let h = hausdorff_distance(&square, &triangle)?;
    println!("h(square, triangle) = {h:.6}");

    // Support values on a grid never overstate the Hausdorff distance.
    for m in [4, 16, 64, 256] {
        let grid = DirectionGrid::new(2, m)?;
        let d = sup_norm_distance(&embed(&square, &grid)?, &embed(&triangle, &grid)?)?;
        println!("m = {m:>3}: sup-norm distance {d:.6}");
    }

    // Reconstruction from support values gives the circumscribed polygon.
    let disk = ConvexBody::regular_polygon(512, 1.0)?;
    for m in [8, 32, 128] {
        let outer = reconstruct(&embed(&disk, &DirectionGrid::new(2, m)?)?)?;
        println!(
            "m = {m:>3}: h(disk, reconstruction) = {:.3e}",
            hausdorff_distance(&disk, &outer)?
        );
    }

    println!(
        "Steiner point of the triangle: {:?}",
        steiner_point(&triangle)?
    );
    Ok(())
}
