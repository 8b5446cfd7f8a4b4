//! Convex hulls of finite point sets.

use super::body::lex_cmp;
use super::minnorm;

/// Monotone-chain hull of flat 2-D coordinates. Output is counterclockwise
/// from the lexicographic minimum with collinear points removed.
pub(crate) fn hull_2d(coords: &[f64]) -> Vec<f64> {
    let mut pts: Vec<[f64; 2]> = coords.chunks_exact(2).map(|p| [p[0], p[1]]).collect();
    pts.sort_by(|a, b| lex_cmp(a, b));
    pts.dedup();
    if pts.len() <= 2 {
        return pts.concat();
    }
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(pts.len() + 1);
    for p in pts.iter() {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], *p) <= 0.0 {
            hull.pop();
        }
        hull.push(*p);
    }
    let lower_len = hull.len() + 1;
    for p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len
            && cross(hull[hull.len() - 2], hull[hull.len() - 1], *p) <= 0.0
        {
            hull.pop();
        }
        hull.push(*p);
    }
    hull.pop();
    hull.concat()
}

#[inline]
pub(crate) fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Extreme points of a 3-D point cloud, lexicographically sorted. A point is
/// dropped when it lies within a relative 1e-12 of the hull of the others.
pub(crate) fn extreme_points_3d(coords: &[f64]) -> Vec<f64> {
    let mut pts: Vec<[f64; 3]> = coords.chunks_exact(3).map(|p| [p[0], p[1], p[2]]).collect();
    pts.sort_by(|a, b| lex_cmp(a, b));
    pts.dedup();
    let scale = pts
        .iter()
        .flat_map(|p| p.iter())
        .fold(0.0f64, |m, c| m.max(c.abs()));
    let tol = 1e-12 * (1.0 + scale);
    let mut keep = vec![true; pts.len()];
    for i in 0..pts.len() {
        let others: Vec<&[f64]> = pts
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i && keep[j])
            .map(|(_, p)| p.as_slice())
            .collect();
        if others.is_empty() {
            break;
        }
        if minnorm::distance_to_hull(&others, &pts[i]) <= tol {
            keep[i] = false;
        }
    }
    pts.iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .flat_map(|(p, _)| *p)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collinear_points_collapse_to_segment() {
        let h = hull_2d(&[0.0, 0.0, 1.0, 1.0, 2.0, 2.0, 0.5, 0.5]);
        assert_eq!(h, vec![0.0, 0.0, 2.0, 2.0]);
    }

    #[test]
    fn cube_with_centre() {
        let mut c = Vec::new();
        for x in [0.0, 1.0] {
            for y in [0.0, 1.0] {
                for z in [0.0, 1.0] {
                    c.extend([x, y, z]);
                }
            }
        }
        c.extend([0.5, 0.5, 0.5, 0.5, 0.5, 1.0]);
        assert_eq!(extreme_points_3d(&c).len(), 24);
    }
}
