//! Steiner point s(A) = (1/π)∫_{S¹} u·δ*(u, A) du.
//!
//! For a polygon the integral reduces to the vertex average weighted by the
//! angle of each vertex's normal cone.

use std::f64::consts::TAU;

use super::body::ConvexBody;
use crate::error::{Error, Result};

pub fn steiner_point(body: &ConvexBody) -> Result<Vec<f64>> {
    let c = body.coords();
    match body.dim() {
        1 => Ok(vec![0.5 * (c[0] + c[c.len() - 1])]),
        2 => {
            let n = c.len() / 2;
            if n == 1 {
                return Ok(c.to_vec());
            }
            let edge = |i: usize| {
                let j = (i + 1) % n;
                [c[2 * j] - c[2 * (i % n)], c[2 * j + 1] - c[2 * (i % n) + 1]]
            };
            let mut s = [0.0, 0.0];
            for i in 0..n {
                let (a, b) = (edge(i + n - 1), edge(i));
                let turn = (a[0] * b[1] - a[1] * b[0]).atan2(a[0] * b[0] + a[1] * b[1]);
                // A segment's two "edges" are antiparallel: each end gets π.
                let w = if n == 2 { std::f64::consts::PI } else { turn };
                s[0] += w * c[2 * i];
                s[1] += w * c[2 * i + 1];
            }
            Ok(vec![s[0] / TAU, s[1] / TAU])
        }
        _ => Err(Error::Unsupported("Steiner point in dimension 3".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_body_centre() {
        let r = ConvexBody::rectangle([1.0, 2.0], [3.0, 6.0]).unwrap();
        let s = steiner_point(&r).unwrap();
        assert!((s[0] - 2.0).abs() < 1e-14 && (s[1] - 4.0).abs() < 1e-14);
    }

    #[test]
    fn segment_midpoint() {
        let seg = ConvexBody::from_points(&[[0.0, 1.0], [4.0, 3.0]]).unwrap();
        assert_eq!(steiner_point(&seg).unwrap(), vec![2.0, 2.0]);
        let iv = ConvexBody::interval(-1.0, 5.0).unwrap();
        assert_eq!(steiner_point(&iv).unwrap(), vec![2.0]);
    }

    #[test]
    fn triangle_against_direction_quadrature() {
        let tri = ConvexBody::from_points(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let s = steiner_point(&tri).unwrap();
        // Midpoint rule over 10⁶ directions of (1/π)∫ u δ*(u, A) dθ.
        let n = 1_000_000;
        let h = TAU / n as f64;
        let mut q = [0.0, 0.0];
        for k in 0..n {
            let th = (k as f64 + 0.5) * h;
            let u = [th.cos(), th.sin()];
            let hv = tri.support(&u).unwrap();
            q[0] += u[0] * hv * h;
            q[1] += u[1] * hv * h;
        }
        let q = [q[0] / std::f64::consts::PI, q[1] / std::f64::consts::PI];
        assert!(
            (s[0] - q[0]).abs() < 1e-6 && (s[1] - q[1]).abs() < 1e-6,
            "{s:?} vs {q:?}"
        );
    }

    #[test]
    fn three_dimensional_refused() {
        let b = ConvexBody::origin(3);
        assert!(matches!(steiner_point(&b), Err(Error::Unsupported(_))));
    }
}
