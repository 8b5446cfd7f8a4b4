//! The measure space [0,1] with Lebesgue measure: finite unions of
//! half-open intervals, gauges, and generators of gauge-fine and dyadic
//! tagged partitions.

use std::fmt;
use std::sync::Arc;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Deepest dyadic partition we are willing to build.
pub const MAX_DYADIC_DEPTH: u32 = 30;

/// A finite union of disjoint half-open intervals [a, b) ⊆ [0, 1), sorted
/// and with touching intervals merged.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
    measure: f64,
}

impl IntervalSet {
    pub fn new(mut raw: Vec<(f64, f64)>) -> Result<Self> {
        for &(a, b) in &raw {
            if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || a > b {
                return Err(Error::InvalidInput(format!(
                    "interval [{a}, {b}) is not inside [0, 1]"
                )));
            }
        }
        raw.retain(|&(a, b)| b > a);
        raw.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut intervals: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for (a, b) in raw {
            match intervals.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => intervals.push((a, b)),
            }
        }
        Ok(Self::from_sorted(intervals))
    }

    fn from_sorted(intervals: Vec<(f64, f64)>) -> Self {
        let measure = intervals.iter().map(|(a, b)| b - a).sum();
        Self { intervals, measure }
    }

    /// [a, b).
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![(a, b)])
    }

    /// [0, 1).
    pub fn unit() -> Self {
        Self::from_sorted(vec![(0.0, 1.0)])
    }

    pub fn empty() -> Self {
        Self::from_sorted(Vec::new())
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn measure(&self) -> f64 {
        self.measure
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Smallest interval containing the set.
    pub fn hull(&self) -> Option<(f64, f64)> {
        Some((self.intervals.first()?.0, self.intervals.last()?.1))
    }

    pub fn contains(&self, t: f64) -> bool {
        let k = self.intervals.partition_point(|&(a, _)| a <= t);
        k > 0 && t < self.intervals[k - 1].1
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.intervals.len() && j < other.intervals.len() {
            let (a1, b1) = self.intervals[i];
            let (a2, b2) = other.intervals[j];
            let (lo, hi) = (a1.max(a2), b1.min(b2));
            if hi > lo {
                out.push((lo, hi));
            }
            if b1 < b2 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::from_sorted(out)
    }

    /// μ(self ∩ other) without allocating.
    pub fn intersection_measure(&self, other: &Self) -> f64 {
        let mut m = 0.0;
        let (mut i, mut j) = (0, 0);
        while i < self.intervals.len() && j < other.intervals.len() {
            let (a1, b1) = self.intervals[i];
            let (a2, b2) = other.intervals[j];
            m += (b1.min(b2) - a1.max(a2)).max(0.0);
            if b1 < b2 {
                i += 1;
            } else {
                j += 1;
            }
        }
        m
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.intersection_measure(other) == 0.0
    }

    /// The point splitting the set into two halves of equal measure.
    pub fn median(&self) -> Option<f64> {
        self.quantile(0.5)
    }

    /// Point at fraction `q` ∈ [0, 1) of the measure.
    pub fn quantile(&self, q: f64) -> Option<f64> {
        let mut target = q * self.measure;
        for &(a, b) in &self.intervals {
            if target < b - a {
                return Some((a + target).min(b.next_down()));
            }
            target -= b - a;
        }
        self.intervals.last().map(|&(_, b)| b.next_down())
    }
}

impl Serialize for IntervalSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<[f64; 2]> = self.intervals.iter().map(|&(a, b)| [a, b]).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntervalSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<[f64; 2]>::deserialize(d)?;
        IntervalSet::new(v.into_iter().map(|[a, b]| (a, b)).collect())
            .map_err(serde::de::Error::custom)
    }
}

/// A gauge t ↦ Δ(t) = (t − r(t), t + r(t)), given by its radius.
#[derive(Clone)]
pub enum Gauge {
    Constant {
        r: f64,
    },
    /// `radii[i]` applies on [breaks[i-1], breaks[i]).
    PiecewiseConstant {
        breaks: Vec<f64>,
        radii: Vec<f64>,
    },
    /// r(t) = min(r_max, max(r_min, c·dist(t, singular))).
    DistanceModulated {
        r_min: f64,
        c: f64,
        singular: Vec<f64>,
        r_max: Option<f64>,
    },
    /// Arbitrary positive radius; `r_min` is the caller's lower-bound witness.
    Custom {
        radius: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        r_min: Option<f64>,
    },
}

impl fmt::Debug for Gauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gauge::Constant { r } => f.debug_struct("Constant").field("r", r).finish(),
            Gauge::PiecewiseConstant { breaks, radii } => f
                .debug_struct("PiecewiseConstant")
                .field("breaks", breaks)
                .field("radii", radii)
                .finish(),
            Gauge::DistanceModulated {
                r_min,
                c,
                singular,
                r_max,
            } => f
                .debug_struct("DistanceModulated")
                .field("r_min", r_min)
                .field("c", c)
                .field("singular", singular)
                .field("r_max", r_max)
                .finish(),
            Gauge::Custom { r_min, .. } => f.debug_struct("Custom").field("r_min", r_min).finish(),
        }
    }
}

impl Gauge {
    pub fn constant(r: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidInput(format!(
                "gauge radius must be positive, got {r}"
            )));
        }
        Ok(Gauge::Constant { r })
    }

    pub fn piecewise(breaks: Vec<f64>, radii: Vec<f64>) -> Result<Self> {
        if radii.len() != breaks.len() + 1 || radii.iter().any(|&r| !(r > 0.0)) {
            return Err(Error::InvalidInput(
                "piecewise gauge needs one positive radius per piece".into(),
            ));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(
                "piecewise gauge breaks must increase".into(),
            ));
        }
        Ok(Gauge::PiecewiseConstant { breaks, radii })
    }

    pub fn distance_modulated(
        r_min: f64,
        c: f64,
        singular: Vec<f64>,
        r_max: Option<f64>,
    ) -> Result<Self> {
        if !(r_min > 0.0) || !(c >= 0.0) || r_max.is_some_and(|m| !(m >= r_min)) {
            return Err(Error::InvalidInput(
                "distance-modulated gauge needs r_min > 0, c ≥ 0, r_max ≥ r_min".into(),
            ));
        }
        Ok(Gauge::DistanceModulated {
            r_min,
            c,
            singular,
            r_max,
        })
    }

    pub fn radius(&self, t: f64) -> f64 {
        match self {
            Gauge::Constant { r } => *r,
            Gauge::PiecewiseConstant { breaks, radii } => {
                radii[breaks.partition_point(|&b| b <= t)]
            }
            Gauge::DistanceModulated {
                r_min,
                c,
                singular,
                r_max,
            } => {
                let d = singular
                    .iter()
                    .map(|s| (t - s).abs())
                    .fold(f64::INFINITY, f64::min);
                let r = if d.is_finite() {
                    r_min.max(c * d)
                } else {
                    r_max.unwrap_or(*r_min)
                };
                r_max.map_or(r, |m| r.min(m))
            }
            Gauge::Custom { radius, .. } => radius(t),
        }
    }

    /// Recorded lower bound of the radius, if any.
    pub fn r_min(&self) -> Option<f64> {
        match self {
            Gauge::Constant { r } => Some(*r),
            Gauge::PiecewiseConstant { radii, .. } => radii.iter().copied().reduce(f64::min),
            Gauge::DistanceModulated { r_min, .. } => Some(*r_min),
            Gauge::Custom { r_min, .. } => *r_min,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionKind {
    McShane,
    Birkhoff,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    #[serde(rename = "intervals")]
    pub set: IntervalSet,
    pub tag: f64,
}

/// A finite tagged partition of [0,1) with a tracked uncovered remainder.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TaggedPartition {
    kind: PartitionKind,
    cells: Vec<Cell>,
    leak: f64,
}

impl TaggedPartition {
    pub fn new(kind: PartitionKind, cells: Vec<Cell>, leak: f64) -> Result<Self> {
        let mut sets: Vec<&(f64, f64)> = cells.iter().flat_map(|c| c.set.intervals()).collect();
        sets.sort_by(|x, y| x.0.total_cmp(&y.0));
        if sets.windows(2).any(|w| w[1].0 < w[0].1) {
            return Err(Error::InvalidInput("partition cells overlap".into()));
        }
        if cells.iter().any(|c| !(0.0..=1.0).contains(&c.tag)) {
            return Err(Error::InvalidInput("partition tag outside [0, 1]".into()));
        }
        let covered: f64 = cells.iter().map(|c| c.set.measure()).sum();
        if !(0.0..1.0).contains(&leak) || (covered + leak - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "covered measure {covered} plus leak {leak} is not 1"
            )));
        }
        if kind == PartitionKind::Birkhoff {
            if leak > 1e-12 {
                return Err(Error::InvalidInput(
                    "Birkhoff partitions must cover [0, 1)".into(),
                ));
            }
            if let Some(c) = cells.iter().find(|c| !c.set.contains(c.tag)) {
                return Err(Error::InvalidInput(format!(
                    "Birkhoff tag {} outside its cell",
                    c.tag
                )));
            }
        }
        Ok(Self { kind, cells, leak })
    }

    pub fn kind(&self) -> PartitionKind {
        self.kind
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn leak(&self) -> f64 {
        self.leak
    }

    pub fn covered_measure(&self) -> f64 {
        self.cells.iter().map(|c| c.set.measure()).sum()
    }

    pub fn max_cell_width(&self) -> f64 {
        self.cells
            .iter()
            .filter_map(|c| c.set.hull())
            .map(|(a, b)| b - a)
            .fold(0.0, f64::max)
    }
}

impl<'de> Deserialize<'de> for TaggedPartition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            kind: PartitionKind,
            cells: Vec<Cell>,
            leak: f64,
        }
        let r = Repr::deserialize(d)?;
        TaggedPartition::new(r.kind, r.cells, r.leak).map_err(serde::de::Error::custom)
    }
}

/// Every cell lies inside the gauge neighbourhood of its tag.
pub fn is_fine(p: &TaggedPartition, g: &Gauge) -> bool {
    p.cells.iter().all(|c| match c.set.hull() {
        None => true,
        Some((a, b)) => {
            let r = g.radius(c.tag);
            c.tag - r < a && b <= c.tag + r
        }
    })
}

/// A random Δ-fine McShane partition of [0,1) leaving at most `leak`
/// uncovered. Tags are drawn within r_min/2 of the current left end, on
/// either side of it with equal odds, so about half the tags lie outside
/// their own cells; each cell then extends as far as Δ(tag) allows.
pub fn generate_mcshane_partition(g: &Gauge, leak: f64, seed: u64) -> Result<TaggedPartition> {
    let r_min = g.r_min().ok_or(Error::UnboundedGaugeRefused)?;
    if !(r_min > 0.0) {
        return Err(Error::UnboundedGaugeRefused);
    }
    if !(0.0..1.0).contains(&leak) {
        return Err(Error::InvalidInput(format!(
            "leak must lie in [0, 1), got {leak}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = 0.5 * r_min;
    let mut cells = Vec::new();
    let mut a = 0.0f64;
    while 1.0 - a > leak && a < 1.0 {
        let tag = if a > 0.0 && rng.random_bool(0.5) {
            rng.random_range((a - half).max(0.0)..a)
        } else {
            let hi = (a + half).min(1.0);
            if hi > a {
                rng.random_range(a..=hi)
            } else {
                a
            }
        };
        let b = (tag + g.radius(tag)).min(1.0);
        debug_assert!(b > a);
        cells.push(Cell {
            set: IntervalSet::from_sorted(vec![(a, b)]),
            tag,
        });
        a = b;
    }
    TaggedPartition::new(PartitionKind::McShane, cells, 1.0 - a)
}

/// The deterministic Δ-fine partition with every tag at its cell's
/// midpoint. For a constant gauge r the cells are [jr, (j+1)r).
pub fn midpoint_partition(g: &Gauge) -> Result<TaggedPartition> {
    let r_min = g.r_min().ok_or(Error::UnboundedGaugeRefused)?;
    if !(r_min > 0.0) {
        return Err(Error::UnboundedGaugeRefused);
    }
    let mut cells = Vec::new();
    let mut a = 0.0f64;
    while a < 1.0 {
        let mut w = (1.0 - a).min(g.radius(a));
        while w > r_min && 0.5 * w >= g.radius(a + 0.5 * w) {
            w *= 0.5;
        }
        let b = if 1.0 - (a + w) <= 1e-15 { 1.0 } else { a + w };
        cells.push(Cell {
            set: IntervalSet::from_sorted(vec![(a, b)]),
            tag: 0.5 * (a + b),
        });
        a = b;
    }
    TaggedPartition::new(PartitionKind::McShane, cells, 0.0)
}

/// The dyadic partition {[j·2⁻ᵏ, (j+1)·2⁻ᵏ)}.
pub fn generate_birkhoff_partition(depth: u32) -> Result<Vec<IntervalSet>> {
    if depth > MAX_DYADIC_DEPTH {
        return Err(Error::DepthLimit(depth));
    }
    let n = 1usize << depth;
    let w = 1.0 / n as f64;
    Ok((0..n)
        .map(|j| IntervalSet::from_sorted(vec![(j as f64 * w, (j + 1) as f64 * w)]))
        .collect())
}

/// `count` tag assignments, one tag per cell, each inside its cell. Entry 0
/// is the left endpoints, entry 1 the midpoints (measure medians), the rest
/// are uniform draws.
pub fn sample_tags(cells: &[IntervalSet], count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count.max(1))
        .map(|k| {
            cells
                .iter()
                .map(|c| match k {
                    0 => c.hull().map_or(0.0, |h| h.0),
                    1 => c.median().unwrap_or(0.0),
                    _ => c.quantile(rng.random_range(0.0..1.0)).unwrap_or(0.0),
                })
                .collect()
        })
        .collect()
}
