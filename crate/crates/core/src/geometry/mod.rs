//! Convex bodies in ℝⁿ (n ≤ 3): canonical vertex representation, Minkowski
//! arithmetic, Hausdorff distance, Steiner points and the support-function
//! embedding onto a direction grid.

mod body;
mod grid;
mod hausdorff;
mod hull;
mod minnorm;
mod steiner;

pub use body::{unit_circle, weighted_minkowski_sum, ConvexBody, MAX_DIM};
pub use grid::{
    embed, reconstruct, reconstruct_with_tolerance, sup_norm_distance, support_consistency_check,
    DirectionGrid, Halfspace, SupportVector,
};
pub use hausdorff::{directed_by_projection, hausdorff_distance, max_pairwise_distance};
pub use minnorm::{distance_to_hull, min_norm_point};
pub use steiner::steiner_point;

pub(crate) use body::{dot, weighted_sum_unchecked};
pub(crate) use grid::reconstruct_report;

/// Convenience: canonical hull of `points`.
pub fn canonicalize<P: AsRef<[f64]>>(points: &[P]) -> crate::Result<ConvexBody> {
    ConvexBody::from_points(points)
}

/// Equality of bodies up to ε_body = 1e-9·(1 + circumradius).
pub fn approx_eq(a: &ConvexBody, b: &ConvexBody) -> bool {
    let tol = 1e-9 * (1.0 + a.circumradius().max(b.circumradius()));
    hausdorff_distance(a, b).map(|h| h <= tol).unwrap_or(false)
}
