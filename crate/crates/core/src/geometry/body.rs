use std::cmp::Ordering;
use std::f64::consts::PI;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::hull;
use crate::error::{Error, Result};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 3;

/// A nonempty convex compact subset of ℝⁿ (n ≤ 3), stored as the minimal
/// list of its vertices.
///
/// Canonical form:
/// - dim 1: `[lo]` for a point, `[lo, hi]` with `lo < hi` otherwise;
/// - dim 2: counterclockwise from the lexicographically smallest vertex,
///   with no repeated or collinear vertices;
/// - dim 3: extreme points in lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexBody {
    dim: usize,
    coords: Vec<f64>,
}

impl ConvexBody {
    /// Convex hull of `points`, in canonical form.
    pub fn from_points<P: AsRef<[f64]>>(points: &[P]) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyBody)?;
        let dim = first.as_ref().len();
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::Unsupported(format!("dimension {dim}")));
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "non-finite coordinate in {p:?}"
                )));
            }
            coords.extend_from_slice(p);
        }
        Ok(Self::canonical(dim, coords))
    }

    /// Hull of a flat coordinate buffer. Coordinates must be finite.
    pub(crate) fn canonical(dim: usize, coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty() && coords.len().is_multiple_of(dim));
        match dim {
            1 => {
                let lo = coords.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = coords.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                Self::interval_unchecked(lo, hi)
            }
            2 => Self {
                dim,
                coords: hull::hull_2d(&coords),
            },
            _ => Self {
                dim,
                coords: hull::extreme_points_3d(&coords),
            },
        }
    }

    /// Trusted constructor for data already in canonical form.
    pub(crate) fn from_canonical(dim: usize, coords: Vec<f64>) -> Self {
        Self { dim, coords }
    }

    pub fn point(p: &[f64]) -> Result<Self> {
        Self::from_points(&[p])
    }

    /// The origin `{0}` of ℝ^dim.
    pub fn origin(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension {dim} out of range");
        Self {
            dim,
            coords: vec![0.0; dim],
        }
    }

    /// The closed interval `[lo, hi]`, endpoints in either order.
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::from_points(&[[a], [b]])
    }

    fn interval_unchecked(lo: f64, hi: f64) -> Self {
        if lo == hi {
            Self {
                dim: 1,
                coords: vec![lo],
            }
        } else {
            Self {
                dim: 1,
                coords: vec![lo, hi],
            }
        }
    }

    /// Axis-aligned box with the given corners.
    pub fn rectangle(lo: [f64; 2], hi: [f64; 2]) -> Result<Self> {
        Self::from_points(&[
            [lo[0], lo[1]],
            [hi[0], lo[1]],
            [hi[0], hi[1]],
            [lo[0], hi[1]],
        ])
    }

    /// Regular `m`-gon inscribed in the circle of the given radius about the
    /// origin, with a vertex at angle 0.
    pub fn regular_polygon(m: usize, radius: f64) -> Result<Self> {
        if m < 3 {
            return Err(Error::InvalidInput(format!(
                "a polygon needs at least 3 vertices, got {m}"
            )));
        }
        let pts: Vec<[f64; 2]> = (0..m)
            .map(|k| {
                let (c, s) = unit_circle(k, m);
                [radius * c, radius * s]
            })
            .collect();
        Self::from_points(&pts)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertex_count(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn to_vertex_list(&self) -> Vec<Vec<f64>> {
        self.vertices().map(<[f64]>::to_vec).collect()
    }

    pub(crate) fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// True when the body is a single point.
    pub fn is_point(&self) -> bool {
        self.vertex_count() == 1
    }

    /// Largest Euclidean norm of a point of the body, i.e. h(A, {0}).
    pub fn norm(&self) -> f64 {
        self.vertices().map(norm).fold(0.0, f64::max)
    }

    /// Radius of the smallest origin-centred ball containing the body.
    pub fn circumradius(&self) -> f64 {
        self.norm()
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim == other {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other,
            })
        }
    }

    /// δ*(u, A) = max over vertices of ⟨u, v⟩.
    pub fn support(&self, u: &[f64]) -> Result<f64> {
        self.check_dim(u.len())?;
        Ok(self.support_unchecked(u))
    }

    #[inline]
    pub(crate) fn support_unchecked(&self, u: &[f64]) -> f64 {
        match self.dim {
            1 => self
                .coords
                .iter()
                .map(|v| v * u[0])
                .fold(f64::NEG_INFINITY, f64::max),
            2 => self
                .coords
                .chunks_exact(2)
                .map(|v| v[0] * u[0] + v[1] * u[1])
                .fold(f64::NEG_INFINITY, f64::max),
            _ => self
                .vertices()
                .map(|v| dot(v, u))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// The vertex attaining δ*(u, A). Exact ties go to the lexicographically
    /// largest vertex.
    pub fn support_point(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(u.len())?;
        Ok(self.support_point_unchecked(u).to_vec())
    }

    pub(crate) fn support_point_unchecked(&self, u: &[f64]) -> &[f64] {
        let mut best = self.vertex(0);
        let mut best_val = dot(best, u);
        for v in self.vertices().skip(1) {
            let val = dot(v, u);
            if val > best_val || (val == best_val && lex_cmp(v, best) == Ordering::Greater) {
                best = v;
                best_val = val;
            }
        }
        best
    }

    /// Like `support_point`, but vertices within rounding of the maximum
    /// count as tied and the lexicographically greatest wins. Selections
    /// use this so a face normal to `u` is left by the same endpoint for
    /// every t, instead of whichever endpoint rounding favours.
    pub(crate) fn support_point_stable(&self, u: &[f64]) -> &[f64] {
        let top = self
            .vertices()
            .map(|v| dot(v, u))
            .fold(f64::NEG_INFINITY, f64::max);
        let slack = 16.0 * f64::EPSILON * self.norm() * norm(u);
        self.vertices()
            .filter(|v| dot(v, u) >= top - slack)
            .max_by(|a, b| lex_cmp(a, b))
            .expect("bodies have a vertex")
    }

    /// λA for λ ≥ 0.
    pub fn scale(&self, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::NegativeScale(lambda));
        }
        Ok(self.scale_unchecked(lambda))
    }

    pub(crate) fn scale_unchecked(&self, lambda: f64) -> Self {
        if lambda == 0.0 {
            return Self::origin(self.dim);
        }
        // Positive scaling preserves lexicographic order and orientation.
        Self {
            dim: self.dim,
            coords: self.coords.iter().map(|c| c * lambda).collect(),
        }
    }

    pub fn translate(&self, offset: &[f64]) -> Result<Self> {
        self.check_dim(offset.len())?;
        let coords = self
            .coords
            .chunks_exact(self.dim)
            .flat_map(|v| v.iter().zip(offset).map(|(a, b)| a + b))
            .collect();
        Ok(Self::canonical(self.dim, coords))
    }

    /// Minkowski sum A ⊕ B.
    pub fn minkowski_sum(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim)?;
        Ok(weighted_sum_unchecked(
            self.dim,
            &[(1.0, self), (1.0, other)],
        ))
    }

    /// Closed Euclidean distance from `p` to the body.
    pub fn distance_to_point(&self, p: &[f64]) -> Result<f64> {
        self.check_dim(p.len())?;
        Ok(super::minnorm::distance_to_polytope(self, p))
    }

    /// Whether `p` lies in the body up to `tol`.
    pub fn contains(&self, p: &[f64], tol: f64) -> Result<bool> {
        Ok(self.distance_to_point(p)? <= tol)
    }
}

/// Σ λᵢ·Aᵢ for nonnegative weights.
pub fn weighted_minkowski_sum(terms: &[(f64, &ConvexBody)]) -> Result<ConvexBody> {
    let dim = terms.first().ok_or(Error::EmptyBody)?.1.dim;
    for (lambda, body) in terms {
        body.check_dim(dim)?;
        if !(*lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::NegativeScale(*lambda));
        }
    }
    Ok(weighted_sum_unchecked(dim, terms))
}

pub(crate) fn weighted_sum_unchecked(dim: usize, terms: &[(f64, &ConvexBody)]) -> ConvexBody {
    match dim {
        1 => {
            let (mut lo, mut hi) = (0.0, 0.0);
            for (lambda, body) in terms {
                let c = body.coords();
                lo += lambda * c[0];
                hi += lambda * c[c.len() - 1];
            }
            ConvexBody::interval_unchecked(lo, hi)
        }
        2 => ConvexBody::from_canonical(2, sum_polygons(terms)),
        _ => {
            let mut acc = ConvexBody::origin(dim);
            for (lambda, body) in terms {
                if *lambda == 0.0 {
                    continue;
                }
                let mut coords = Vec::new();
                for a in acc.vertices() {
                    for b in body.vertices() {
                        coords.extend(a.iter().zip(b).map(|(x, y)| x + lambda * y));
                    }
                }
                acc = ConvexBody::canonical(dim, coords);
            }
            acc
        }
    }
}

/// Sorted-edge merge of many convex polygons. Every polygon is stored CCW
/// from its lexicographic minimum, so the sum starts at the sum of those
/// minima and walks all scaled edges in order of angle. When the sum is
/// small, each vertex is formed directly from the current vertex of every
/// term instead of accumulating edges, which keeps K ⊕ {0} = K exact.
/// Edge count above which a polygon sum is reduced chunk by chunk.
const EDGE_CHUNK: usize = 1 << 16;

fn sum_polygons(terms: &[(f64, &ConvexBody)]) -> Vec<f64> {
    let terms: Vec<(f64, &ConvexBody)> = terms.iter().copied().filter(|t| t.0 != 0.0).collect();
    let total: usize = terms.iter().map(|t| t.1.vertex_count()).sum();
    if total > EDGE_CHUNK && terms.len() > 2 {
        // Parallel edges collapse within each chunk, which keeps the
        // working set near EDGE_CHUNK for long sums of large polygons.
        let mut parts = Vec::new();
        let (mut start, mut acc) = (0, 0);
        // Every chunk holds at least two terms, so the part count shrinks;
        // a chunk over EDGE_CHUNK has exactly two and is summed directly.
        for (i, t) in terms.iter().enumerate() {
            let n = t.1.vertex_count();
            if acc + n > EDGE_CHUNK && i >= start + 2 {
                parts.push(ConvexBody::from_canonical(
                    2,
                    sum_polygons(&terms[start..i]),
                ));
                (start, acc) = (i, 0);
            }
            acc += n;
        }
        if start < terms.len() {
            parts.push(ConvexBody::from_canonical(2, sum_polygons(&terms[start..])));
        }
        let refs: Vec<(f64, &ConvexBody)> = parts.iter().map(|p| (1.0, p)).collect();
        return sum_polygons(&refs);
    }
    let mut edges: Vec<(f64, usize, [f64; 2])> = Vec::new();
    for (k, &(lambda, body)) in terms.iter().enumerate() {
        let c = body.coords();
        let n = c.len() / 2;
        if n < 2 {
            continue;
        }
        for i in 0..n {
            let j = (i + 1) % n;
            let e = [
                lambda * (c[2 * j] - c[2 * i]),
                lambda * (c[2 * j + 1] - c[2 * i + 1]),
            ];
            edges.push((edge_key(e), k, e));
        }
    }
    let mut idx = vec![0usize; terms.len()];
    let vertex = |idx: &[usize]| {
        let mut p = [0.0, 0.0];
        for (&(lambda, body), &i) in terms.iter().zip(idx) {
            let c = body.coords();
            let i = i % (c.len() / 2);
            p[0] += lambda * c[2 * i];
            p[1] += lambda * c[2 * i + 1];
        }
        p
    };
    let start = vertex(&idx);
    if edges.is_empty() {
        return start.to_vec();
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Groups of parallel edges: (summed edge, terms advanced).
    let mut merged: Vec<([f64; 2], Vec<usize>)> = Vec::with_capacity(edges.len());
    for (_, k, e) in edges {
        if let Some((last, ks)) = merged.last_mut() {
            let cr = last[0] * e[1] - last[1] * e[0];
            let dt = last[0] * e[0] + last[1] * e[1];
            if dt > 0.0 && cr.abs() <= 1e-12 * norm(last) * norm(&e) {
                last[0] += e[0];
                last[1] += e[1];
                ks.push(k);
                continue;
            }
        }
        merged.push((e, vec![k]));
    }

    let direct = terms.len() * merged.len() <= 100_000;
    let mut pts = Vec::with_capacity(2 * merged.len());
    let mut p = start;
    pts.extend_from_slice(&p);
    // The last edge closes the loop back onto `start`.
    for (e, ks) in &merged[..merged.len() - 1] {
        if direct {
            ks.iter().for_each(|&k| idx[k] += 1);
            p = vertex(&idx);
        } else {
            p[0] += e[0];
            p[1] += e[1];
        }
        pts.extend_from_slice(&p);
    }
    hull::hull_2d(&pts)
}

/// Angle of an edge direction in (−π/2, 3π/2], the order in which edges
/// leave the lexicographic minimum of a CCW polygon.
fn edge_key(e: [f64; 2]) -> f64 {
    let a = e[1].atan2(e[0]);
    if a <= -PI / 2.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

/// (cos 2πk/m, sin 2πk/m), exact on the coordinate axes and bit-identical
/// for equal fractions k/m.
pub fn unit_circle(k: usize, m: usize) -> (f64, f64) {
    let g = gcd(k % m, m);
    let (k, m) = ((k % m) / g, m / g);
    match (4 * k).checked_rem(m) {
        Some(0) => match 4 * k / m {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        },
        _ => {
            let a = 2.0 * PI * (k as f64) / (m as f64);
            (a.cos(), a.sin())
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

#[derive(Serialize, Deserialize)]
struct BodyRepr {
    dim: usize,
    vertices: Vec<Vec<f64>>,
}

impl Serialize for ConvexBody {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        BodyRepr {
            dim: self.dim,
            vertices: self.to_vertex_list(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ConvexBody {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = BodyRepr::deserialize(deserializer)?;
        let body = ConvexBody::from_points(&repr.vertices).map_err(serde::de::Error::custom)?;
        if body.dim != repr.dim {
            return Err(serde::de::Error::custom(format!(
                "declared dim {} but vertices have dim {}",
                repr.dim, body.dim
            )));
        }
        Ok(body)
    }
}
