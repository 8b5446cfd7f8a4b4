//! Euclidean projection onto convex hulls of finitely many points.
//!
//! Dimension 1 and 2 use direct formulas. The general path is Wolfe's
//! minimum-norm-point algorithm applied to the translated point set.

use super::body::{dot, ConvexBody};
use super::hull::cross;

/// Distance from `p` to the body (0 inside).
pub(crate) fn distance_to_polytope(body: &ConvexBody, p: &[f64]) -> f64 {
    match body.dim() {
        1 => {
            let c = body.coords();
            let (lo, hi) = (c[0], c[c.len() - 1]);
            (lo - p[0]).max(p[0] - hi).max(0.0)
        }
        2 => distance_to_polygon(body.coords(), [p[0], p[1]]),
        _ => {
            let pts: Vec<&[f64]> = body.vertices().collect();
            distance_to_hull(&pts, p)
        }
    }
}

/// Distance from `p` to a canonical (CCW) polygon given as flat coordinates.
pub(crate) fn distance_to_polygon(c: &[f64], p: [f64; 2]) -> f64 {
    let n = c.len() / 2;
    let v = |i: usize| [c[2 * (i % n)], c[2 * (i % n) + 1]];
    match n {
        1 => ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)).sqrt(),
        2 => segment_distance(v(0), v(1), p),
        _ => {
            if (0..n).all(|i| cross(v(i), v(i + 1), p) >= 0.0) {
                return 0.0;
            }
            (0..n)
                .map(|i| segment_distance(v(i), v(i + 1), p))
                .fold(f64::INFINITY, f64::min)
        }
    }
}

pub(crate) fn segment_distance(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 {
        ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let d = [ap[0] - t * ab[0], ap[1] - t * ab[1]];
    (d[0] * d[0] + d[1] * d[1]).sqrt()
}

/// Distance from `p` to conv(points), any dimension.
pub fn distance_to_hull(points: &[&[f64]], p: &[f64]) -> f64 {
    let shifted: Vec<Vec<f64>> = points
        .iter()
        .map(|q| q.iter().zip(p).map(|(a, b)| a - b).collect())
        .collect();
    min_norm_point(&shifted)
        .iter()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
}

/// Point of minimum Euclidean norm in conv(points) (Wolfe, 1976).
pub fn min_norm_point(points: &[Vec<f64>]) -> Vec<f64> {
    let dim = points[0].len();
    let scale = points.iter().map(|p| dot(p, p)).fold(0.0, f64::max);
    let tol = 1e-14 * scale.max(f64::MIN_POSITIVE);

    let start = (0..points.len())
        .min_by(|&a, &b| dot(&points[a], &points[a]).total_cmp(&dot(&points[b], &points[b])))
        .unwrap();
    let mut corral: Vec<usize> = vec![start];
    let mut weights: Vec<f64> = vec![1.0];
    let mut x = points[start].clone();

    for _ in 0..(50 * points.len() + 100) {
        let (j, xp) = (0..points.len())
            .map(|i| (i, dot(&x, &points[i])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if dot(&x, &x) - xp <= tol || corral.contains(&j) {
            break;
        }
        corral.push(j);
        weights.push(0.0);

        loop {
            let Some(alpha) = affine_minimizer(points, &corral) else {
                // Degenerate corral; the current iterate is the best we have.
                return x;
            };
            if alpha.iter().all(|&a| a > 1e-15) {
                weights = alpha;
                x = combine(points, &corral, &weights, dim);
                break;
            }
            let mut theta = 1.0f64;
            for (w, a) in weights.iter().zip(&alpha) {
                if *a <= 1e-15 && w - a > 0.0 {
                    theta = theta.min(w / (w - a));
                }
            }
            for (w, a) in weights.iter_mut().zip(&alpha) {
                *w = (1.0 - theta) * *w + theta * a;
            }
            let mut k = 0;
            while k < corral.len() {
                if weights[k] <= 1e-15 {
                    corral.remove(k);
                    weights.remove(k);
                } else {
                    k += 1;
                }
            }
            let total: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w /= total);
            x = combine(points, &corral, &weights, dim);
            if corral.len() == 1 {
                break;
            }
        }
    }
    x
}

fn combine(points: &[Vec<f64>], corral: &[usize], weights: &[f64], dim: usize) -> Vec<f64> {
    let mut x = vec![0.0; dim];
    for (&i, w) in corral.iter().zip(weights) {
        for (xk, pk) in x.iter_mut().zip(&points[i]) {
            *xk += w * pk;
        }
    }
    x
}

/// Barycentric coordinates of the min-norm point of the affine hull of the
/// corral: solve [G 1; 1ᵀ 0][α; μ] = [0; 1] with G the Gram matrix.
fn affine_minimizer(points: &[Vec<f64>], corral: &[usize]) -> Option<Vec<f64>> {
    let k = corral.len();
    let n = k + 1;
    let mut a = vec![vec![0.0; n + 1]; n];
    for r in 0..k {
        for c in 0..k {
            a[r][c] = dot(&points[corral[r]], &points[corral[c]]);
        }
        a[r][k] = 1.0;
        a[k][r] = 1.0;
    }
    a[k][n] = 1.0;
    let sol = solve(a)?;
    Some(sol[..k].to_vec())
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
fn solve(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let n = a.len();
    let scale = a
        .iter()
        .flat_map(|r| r[..n].iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-14 * scale {
            return None;
        }
        a.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    let pivot_row = a[col].clone();
                    for (x, p) in a[r][col..=n].iter_mut().zip(&pivot_row[col..=n]) {
                        *x -= f * p;
                    }
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n] / a[i][i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_onto_triangle_edge() {
        let pts = vec![vec![1.0, -1.0], vec![1.0, 1.0], vec![3.0, 0.0]];
        let x = min_norm_point(&pts);
        assert!((x[0] - 1.0).abs() < 1e-12 && x[1].abs() < 1e-12, "{x:?}");
    }

    #[test]
    fn origin_inside_tetrahedron() {
        let pts = vec![
            vec![1.0, 1.0, 1.0],
            vec![-1.0, -1.0, 1.0],
            vec![-1.0, 1.0, -1.0],
            vec![1.0, -1.0, -1.0],
        ];
        let x = min_norm_point(&pts);
        assert!(x.iter().all(|c| c.abs() < 1e-12), "{x:?}");
    }

    #[test]
    fn projection_onto_face_in_3d() {
        let pts = vec![
            vec![2.0, 0.0, 1.0],
            vec![2.0, 1.0, -1.0],
            vec![2.0, -1.0, -1.0],
            vec![4.0, 0.0, 0.0],
        ];
        let x = min_norm_point(&pts);
        assert!(
            (x[0] - 2.0).abs() < 1e-12 && x[1].abs() < 1e-12 && x[2].abs() < 1e-12,
            "{x:?}"
        );
    }

    #[test]
    fn polygon_distance_matches_hull_distance() {
        let c = [0.0, 0.0, 2.0, 0.0, 2.0, 1.0, 0.0, 1.0];
        let pts: Vec<&[f64]> = c.chunks_exact(2).collect();
        for p in [[3.0, 3.0], [1.0, 0.5], [-1.0, 0.5], [1.0, -2.0]] {
            let a = distance_to_polygon(&c, p);
            let b = distance_to_hull(&pts, &p);
            assert!((a - b).abs() < 1e-12, "{p:?}: {a} vs {b}");
        }
    }
}
