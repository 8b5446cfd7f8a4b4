//! The support-function embedding A ↦ δ*(·, A), sampled on a fixed set of
//! unit directions, and its partial inverse.

use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::body::{dot, unit_circle, ConvexBody};
use super::hull;
use crate::error::{Error, Result};

/// A deterministic set of unit directions. Grids with equal `(dim, m)` are
/// identical, which is what lets support vectors be added and compared.
#[derive(Clone, Debug)]
pub struct DirectionGrid {
    dim: usize,
    m: usize,
    directions: Arc<Vec<f64>>,
}

impl PartialEq for DirectionGrid {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.m == other.m
    }
}

impl DirectionGrid {
    /// dim 1: {+1, −1} (m is ignored); dim 2: the m-th roots of unity;
    /// dim 3: an m-point Fibonacci sphere.
    pub fn new(dim: usize, m: usize) -> Result<Self> {
        let directions: Vec<f64> = match dim {
            1 => vec![1.0, -1.0],
            2 => {
                if m < 3 {
                    return Err(Error::InvalidInput(format!(
                        "planar grids need m ≥ 3, got {m}"
                    )));
                }
                (0..m)
                    .flat_map(|k| {
                        let (c, s) = unit_circle(k, m);
                        [c, s]
                    })
                    .collect()
            }
            3 => {
                if m < 4 {
                    return Err(Error::InvalidInput(format!(
                        "sphere grids need m ≥ 4, got {m}"
                    )));
                }
                let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
                (0..m)
                    .flat_map(|i| {
                        let z = 1.0 - (2 * i + 1) as f64 / m as f64;
                        let r = (1.0 - z * z).sqrt();
                        let phi = golden * i as f64;
                        let v = [r * phi.cos(), r * phi.sin(), z];
                        let n = dot(&v, &v).sqrt();
                        [v[0] / n, v[1] / n, v[2] / n]
                    })
                    .collect()
            }
            _ => {
                return Err(Error::Unsupported(format!(
                    "direction grid in dimension {dim}"
                )))
            }
        };
        let m = if dim == 1 { 2 } else { m };
        Ok(Self {
            dim,
            m,
            directions: Arc::new(directions),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of directions.
    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn direction(&self, k: usize) -> &[f64] {
        &self.directions[k * self.dim..(k + 1) * self.dim]
    }

    pub fn directions(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.directions.chunks_exact(self.dim)
    }

    /// Index map from this grid into a finer grid containing every
    /// direction of this one.
    pub fn embedding_into(&self, finer: &DirectionGrid) -> Result<Vec<usize>> {
        if self.dim != finer.dim {
            return Err(Error::GridMismatch);
        }
        match self.dim {
            1 => Ok(vec![0, 1]),
            2 if finer.m.is_multiple_of(self.m) => {
                let step = finer.m / self.m;
                Ok((0..self.m).map(|k| k * step).collect())
            }
            3 if finer.m == self.m => Ok((0..self.m).collect()),
            _ => Err(Error::GridMismatch),
        }
    }
}

/// Support function samples δ*(d_k, A) over a direction grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportVector {
    grid: DirectionGrid,
    values: Vec<f64>,
}

impl SupportVector {
    pub fn new(grid: DirectionGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "support vector has {} values for a grid of {} directions",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &DirectionGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn zeros(grid: &DirectionGrid) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![0.0; grid.len()],
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            values,
        })
    }

    pub fn scale(&self, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) {
            return Err(Error::NegativeScale(lambda));
        }
        Ok(Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * lambda).collect(),
        })
    }

    fn magnitude(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Default consistency tolerance, 1e-9·max|values|.
    pub fn default_tolerance(&self) -> f64 {
        1e-9 * self.magnitude()
    }
}

/// j(A): support values of `body` on every grid direction.
pub fn embed(body: &ConvexBody, grid: &DirectionGrid) -> Result<SupportVector> {
    if body.dim() != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            found: body.dim(),
        });
    }
    let values = grid
        .directions()
        .map(|d| body.support_unchecked(d))
        .collect();
    Ok(SupportVector {
        grid: grid.clone(),
        values,
    })
}

/// max_k |s_k − t_k|.
pub fn sup_norm_distance(s: &SupportVector, t: &SupportVector) -> Result<f64> {
    if s.grid != t.grid {
        return Err(Error::GridMismatch);
    }
    Ok(s.values
        .iter()
        .zip(&t.values)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs())))
}

/// The closed half-space {x : ⟨normal, x⟩ ≤ offset}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let n = dot(&normal, &normal).sqrt();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "half-space normal has norm {n}"
            )));
        }
        Ok(Self { normal, offset })
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        dot(&self.normal, x) <= self.offset + tol
    }
}

impl SupportVector {
    pub fn halfspaces(&self) -> Vec<Halfspace> {
        self.grid
            .directions()
            .zip(&self.values)
            .map(|(d, &v)| Halfspace {
                normal: d.to_vec(),
                offset: v,
            })
            .collect()
    }
}

/// ∩_k {x : ⟨d_k, x⟩ ≤ s_k} as a polytope, checked against the default
/// consistency tolerance.
pub fn reconstruct(s: &SupportVector) -> Result<ConvexBody> {
    reconstruct_with_tolerance(s, s.default_tolerance())
}

/// As [`reconstruct`], accepting re-embedding discrepancies up to `tol`.
/// An intersection that is empty only because of rounding (or noise below
/// `tol`) is recovered by relaxing every offset by `tol`.
pub fn reconstruct_with_tolerance(s: &SupportVector, tol: f64) -> Result<ConvexBody> {
    Ok(reconstruct_report(s, tol)?.0)
}

/// Reconstruction plus the largest re-embedding discrepancy.
pub(crate) fn reconstruct_report(s: &SupportVector, tol: f64) -> Result<(ConvexBody, f64)> {
    let body = match s.grid.dim {
        1 => {
            let (hi, lo) = (s.values[0], -s.values[1]);
            if lo <= hi {
                ConvexBody::interval(lo, hi)?
            } else if lo - hi <= tol {
                ConvexBody::point(&[0.5 * (lo + hi)])?
            } else {
                return Err(Error::EmptyBody);
            }
        }
        2 => {
            let mag = s.magnitude();
            if mag == 0.0 {
                ConvexBody::origin(2)
            } else {
                match clip_polygon(s, 0.0, mag) {
                    Some(b) => b,
                    None => {
                        clip_polygon(s, 0.5 * tol.max(1e-12 * mag), mag).ok_or(Error::EmptyBody)?
                    }
                }
            }
        }
        d => {
            return Err(Error::Unsupported(format!(
                "reconstruction in dimension {d}"
            )))
        }
    };
    let back = embed(&body, &s.grid)?;
    let excess = sup_norm_distance(&back, s)?;
    if excess > tol {
        return Err(Error::InconsistentSupport { excess });
    }
    Ok((body, excess))
}

/// Whether `s` is (up to the default tolerance) the image of a body.
pub fn support_consistency_check(s: &SupportVector) -> bool {
    reconstruct(s).is_ok()
}

/// Sutherland–Hodgman clipping of a large square by every half-plane.
fn clip_polygon(s: &SupportVector, relax: f64, mag: f64) -> Option<ConvexBody> {
    let big = 4.0 * mag + relax;
    let mut poly: Vec<[f64; 2]> = vec![[-big, -big], [big, -big], [big, big], [-big, big]];
    let eps = 1e-14 * big;
    for (d, &v) in s.grid.directions().zip(&s.values) {
        let c = v + relax;
        let side: Vec<f64> = poly.iter().map(|p| d[0] * p[0] + d[1] * p[1] - c).collect();
        if side.iter().all(|&x| x <= eps) {
            continue;
        }
        let n = poly.len();
        let mut next = Vec::with_capacity(n + 1);
        for i in 0..n {
            let j = (i + 1) % n;
            let (si, sj) = (side[i], side[j]);
            if si <= eps {
                next.push(poly[i]);
            }
            if (si <= eps) != (sj <= eps) && n > 1 {
                let t = (si / (si - sj)).clamp(0.0, 1.0);
                let (p, q) = (poly[i], poly[j]);
                next.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
            }
        }
        if next.is_empty() {
            return None;
        }
        poly = next;
    }
    let coords: Vec<f64> = poly.iter().flatten().copied().collect();
    let canon = hull::hull_2d(&coords);
    // Collapse vertices that differ only by rounding.
    let snap = 1e-12 * big;
    let mut kept: Vec<[f64; 2]> = Vec::new();
    for p in canon.chunks_exact(2) {
        let p = [p[0], p[1]];
        if kept.iter().all(|q| (q[0] - p[0]).hypot(q[1] - p[1]) > snap) {
            kept.push(p);
        }
    }
    let coords: Vec<f64> = kept.iter().flatten().copied().collect();
    Some(ConvexBody::from_canonical(2, hull::hull_2d(&coords)))
}

#[derive(Serialize, Deserialize)]
struct SupportRepr {
    m: usize,
    dim: usize,
    values: Vec<f64>,
}

impl Serialize for SupportVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SupportRepr {
            m: self.grid.m,
            dim: self.grid.dim,
            values: self.values.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SupportVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let r = SupportRepr::deserialize(deserializer)?;
        let grid = DirectionGrid::new(r.dim, r.m).map_err(serde::de::Error::custom)?;
        SupportVector::new(grid, r.values).map_err(serde::de::Error::custom)
    }
}
