//! Hausdorff distance between convex bodies.
//!
//! In the plane the distance is computed as sup over the unit circle of
//! |δ*(u, A) − δ*(u, B)|: merging the two normal fans splits the circle into
//! arcs on which both support points are fixed, so on each arc the
//! difference is ⟨u, a − b⟩ and its maximum is available in closed form.
//! Linear in the vertex counts after sorting.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use super::body::ConvexBody;
use super::minnorm;
use crate::error::{Error, Result};

/// h(A, B) = max of the two directed distances.
pub fn hausdorff_distance(a: &ConvexBody, b: &ConvexBody) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(match a.dim() {
        1 => {
            let (ca, cb) = (a.coords(), b.coords());
            (ca[0] - cb[0])
                .abs()
                .max((ca[ca.len() - 1] - cb[cb.len() - 1]).abs())
        }
        2 => fan_distance(a.coords(), b.coords()),
        _ => directed_by_projection(a, b).max(directed_by_projection(b, a)),
    })
}

/// max over vertices of `from` of their distance to `to`.
pub fn directed_by_projection(from: &ConvexBody, to: &ConvexBody) -> f64 {
    from.vertices()
        .map(|v| minnorm::distance_to_polytope(to, v))
        .fold(0.0, f64::max)
}

struct Fan {
    /// (normal angle in [0, 2π), index of the edge's start vertex), sorted.
    normals: Vec<(f64, usize)>,
}

impl Fan {
    fn new(c: &[f64]) -> Self {
        let n = c.len() / 2;
        let mut normals = Vec::with_capacity(n);
        if n >= 2 {
            for i in 0..n {
                let j = (i + 1) % n;
                let (ex, ey) = (c[2 * j] - c[2 * i], c[2 * j + 1] - c[2 * i + 1]);
                let mut a = (-ex).atan2(ey);
                if a < 0.0 {
                    a += TAU;
                }
                normals.push((a, i));
            }
            normals.sort_by(|x, y| x.0.total_cmp(&y.0));
        }
        Self { normals }
    }

    /// Vertex whose normal cone contains the angle `phi`.
    fn active(&self, phi: f64) -> usize {
        if self.normals.is_empty() {
            return 0;
        }
        let k = self.normals.partition_point(|&(a, _)| a <= phi);
        self.normals.get(k).unwrap_or(&self.normals[0]).1
    }
}

/// max over pairs of h(bᵢ, bⱼ). Normal fans are built once per body, and
/// the maximum is independent of evaluation order.
pub fn max_pairwise_distance(bodies: &[ConvexBody]) -> Result<f64> {
    let Some(first) = bodies.first() else {
        return Ok(0.0);
    };
    if let Some(b) = bodies.iter().find(|b| b.dim() != first.dim()) {
        return Err(Error::DimensionMismatch {
            expected: first.dim(),
            found: b.dim(),
        });
    }
    let pairs: Vec<(usize, usize)> = (0..bodies.len())
        .flat_map(|i| (i + 1..bodies.len()).map(move |j| (i, j)))
        .collect();
    if first.dim() != 2 {
        return Ok(pairs
            .par_iter()
            .map(|&(i, j)| hausdorff_distance(&bodies[i], &bodies[j]).unwrap_or(f64::INFINITY))
            .reduce(|| 0.0, f64::max));
    }
    let fans: Vec<Fan> = bodies.par_iter().map(|b| Fan::new(b.coords())).collect();
    Ok(pairs
        .par_iter()
        .map(|&(i, j)| {
            fan_distance_with(bodies[i].coords(), &fans[i], bodies[j].coords(), &fans[j])
        })
        .reduce(|| 0.0, f64::max))
}

fn fan_distance(ca: &[f64], cb: &[f64]) -> f64 {
    fan_distance_with(ca, &Fan::new(ca), cb, &Fan::new(cb))
}

fn fan_distance_with(ca: &[f64], fa: &Fan, cb: &[f64], fb: &Fan) -> f64 {
    let mut breaks: Vec<f64> = Vec::with_capacity(fa.normals.len() + fb.normals.len() + 2);
    breaks.push(0.0);
    breaks.extend(fa.normals.iter().map(|x| x.0));
    breaks.extend(fb.normals.iter().map(|x| x.0));
    breaks.push(TAU);
    breaks.sort_by(f64::total_cmp);

    let mut best = 0.0f64;
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let (i, j) = (fa.active(mid), fb.active(mid));
        let d = [ca[2 * i] - cb[2 * j], ca[2 * i + 1] - cb[2 * j + 1]];
        let g = |phi: f64| (d[0] * phi.cos() + d[1] * phi.sin()).abs();
        best = best.max(g(lo)).max(g(hi));
        let len = d[0].hypot(d[1]);
        if len > 0.0 {
            let psi = d[1].atan2(d[0]);
            for cand in [psi, psi + PI, psi - PI, psi + TAU] {
                if cand > lo && cand < hi {
                    best = best.max(len);
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_bodies() {
        let a = ConvexBody::from_points(&[[0.0, 0.0], [2.0, 0.3], [1.0, 1.5]]).unwrap();
        assert_eq!(hausdorff_distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn nested_intervals() {
        let a = ConvexBody::interval(0.0, 1.0).unwrap();
        let b = ConvexBody::interval(0.0, 2.0).unwrap();
        assert_eq!(hausdorff_distance(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn square_against_fine_disk() {
        let sq = ConvexBody::rectangle([-1.0, -1.0], [1.0, 1.0]).unwrap();
        let disk = ConvexBody::regular_polygon(512, 1.0).unwrap();
        let h = hausdorff_distance(&sq, &disk).unwrap();
        assert!((h - (2f64.sqrt() - 1.0)).abs() < 1e-4, "{h}");
    }

    #[test]
    fn point_versus_segment() {
        let p = ConvexBody::point(&[0.0, 2.0]).unwrap();
        let s = ConvexBody::from_points(&[[-1.0, 0.0], [1.0, 0.0]]).unwrap();
        let h = hausdorff_distance(&p, &s).unwrap();
        assert!((h - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn three_dimensional_cubes() {
        let cube = |s: f64| {
            let mut v = Vec::new();
            for x in [0.0, s] {
                for y in [0.0, s] {
                    for z in [0.0, s] {
                        v.push(vec![x, y, z]);
                    }
                }
            }
            ConvexBody::from_points(&v).unwrap()
        };
        let h = hausdorff_distance(&cube(1.0), &cube(2.0)).unwrap();
        assert!((h - 3f64.sqrt()).abs() < 1e-9, "{h}");
    }

    #[test]
    fn pairwise_maximum() {
        let bodies: Vec<ConvexBody> = (1..5)
            .map(|k| ConvexBody::regular_polygon(6, k as f64).unwrap())
            .collect();
        assert!((max_pairwise_distance(&bodies).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(max_pairwise_distance(&bodies[..1]).unwrap(), 0.0);
    }

    #[test]
    fn dimension_mismatch() {
        let a = ConvexBody::origin(1);
        let b = ConvexBody::origin(2);
        assert!(matches!(
            hausdorff_distance(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
