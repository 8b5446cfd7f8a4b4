//! The four multivalued integrals and their single-valued reductions.
//!
//! Every integrator returns an [`IntegralResult`]: the body, a claimed bound
//! on its Hausdorff distance to the true integral, and the refinement trace
//! that produced it. Riemann-type methods (McShane, Birkhoff) refine a
//! partition until a sampled spread or an oscillation bound drops below
//! `epsilon`; support-type methods (Pettis, Aumann) integrate support values
//! or selections by adaptive Simpson quadrature.

mod aumann;
mod birkhoff;
mod compare;
mod mcshane;
mod pettis;
mod quadrature;
mod single;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::domain::IntervalSet;
use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, DirectionGrid};
use crate::multifunctions::Multifunction;

pub use aumann::aumann_integrate;
pub use birkhoff::birkhoff_integrate;
pub use compare::{
    compare_all, compare_methods, AumannCheck, ComparisonReport, PairEntry, Violation,
};
pub use mcshane::mcshane_integrate;
pub use pettis::pettis_integrate;
pub use quadrature::adaptive_simpson;
pub use single::{single_valued_integrate, SingleValuedResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    McShane,
    Birkhoff,
    Pettis,
    Aumann,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::McShane,
        Method::Birkhoff,
        Method::Pettis,
        Method::Aumann,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::McShane => "mcshane",
            Method::Birkhoff => "birkhoff",
            Method::Pettis => "pettis",
            Method::Aumann => "aumann",
        }
    }
}

/// How much of the reconstruction gap a Pettis estimate accounts for.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeficitMode {
    /// Bound the gap between grid directions from the reconstructed
    /// polygon's corners. Rigorous for exact support values.
    #[default]
    Corner,
    /// Report only quadrature error and re-embedding discrepancy, i.e. the
    /// error seen on grid directions. Misses curvature between directions.
    GridOnly,
}

/// Stopping and sampling parameters shared by all integrators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub epsilon: f64,
    #[serde(default = "default_max_depth")]
    pub max_depth: u32,
    #[serde(default = "default_tag_samples")]
    pub tag_samples: usize,
    /// Direction count of the support grid.
    #[serde(default = "default_m")]
    pub m: usize,
    /// Uncovered measure allowed in McShane partitions.
    #[serde(default = "default_leak")]
    pub leak: f64,
    pub seed: u64,
    #[serde(default)]
    pub pettis_deficit: DeficitMode,
}

fn default_max_depth() -> u32 {
    22
}
fn default_tag_samples() -> usize {
    32
}
fn default_m() -> usize {
    256
}
fn default_leak() -> f64 {
    1e-7
}

impl Tolerances {
    pub fn new(epsilon: f64, m: usize, tag_samples: usize, seed: u64) -> Self {
        Self {
            epsilon,
            max_depth: default_max_depth(),
            tag_samples,
            m,
            leak: default_leak(),
            seed,
            pettis_deficit: DeficitMode::Corner,
        }
    }

    pub fn with_max_depth(mut self, d: u32) -> Self {
        self.max_depth = d;
        self
    }

    pub fn with_leak(mut self, leak: f64) -> Self {
        self.leak = leak;
        self
    }

    pub fn with_deficit(mut self, mode: DeficitMode) -> Self {
        self.pettis_deficit = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| {
            Err(Error::InvalidInput(format!(
                "tolerance `{what}` must be positive"
            )))
        };
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return bad("epsilon");
        }
        if self.max_depth == 0 {
            return bad("max_depth");
        }
        if self.tag_samples == 0 {
            return bad("tag_samples");
        }
        if self.m == 0 {
            return bad("m");
        }
        if !(self.leak >= 0.0 && self.leak < 1.0) {
            return Err(Error::InvalidInput(format!(
                "tolerance `leak` must lie in [0, 1), got {}",
                self.leak
            )));
        }
        Ok(())
    }

    pub fn grid(&self, dim: usize) -> Result<DirectionGrid> {
        DirectionGrid::new(dim, self.m)
    }
}

/// One refinement level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub method: Method,
    /// Gauge radius (McShane), dyadic depth (Birkhoff) or direction count.
    pub refinement_param: f64,
    /// h(value at this level, value at the previous level).
    pub h_to_previous: Option<f64>,
    pub error_estimate: f64,
    /// Cumulative evaluations of F.
    pub evals: u64,
    /// The level's value, kept so successive distances can be re-checked.
    #[serde(skip)]
    pub value: Option<ConvexBody>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    pub method: Method,
    pub value: ConvexBody,
    /// Claimed bound on h(value, true integral).
    pub error_estimate: f64,
    pub trace: Vec<TraceEntry>,
    pub budget_used: u64,
    /// Direction count of the support grid this result is compared on.
    pub m: usize,
    /// False when some part of the estimate rests on sampling alone.
    pub rigorous: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl IntegralResult {
    pub fn grid(&self) -> Result<DirectionGrid> {
        DirectionGrid::new(self.value.dim(), self.m)
    }

    fn zero(method: Method, dim: usize, m: usize) -> Self {
        Self {
            method,
            value: ConvexBody::origin(dim),
            error_estimate: 0.0,
            trace: Vec::new(),
            budget_used: 0,
            m,
            rigorous: true,
            notes: vec!["empty domain: the integral is {0}".into()],
        }
    }
}

/// Run one method by name.
pub fn integrate(
    method: Method,
    f: &Multifunction,
    a: &IntervalSet,
    tol: &Tolerances,
) -> Result<IntegralResult> {
    match method {
        Method::McShane => mcshane_integrate(f, a, tol),
        Method::Birkhoff => birkhoff_integrate(f, a, tol),
        Method::Pettis => pettis_integrate(f, a, tol),
        Method::Aumann => aumann_integrate(f, a, tol),
    }
}

/// CSV rows for a list of traces, with a header.
pub fn trace_csv<'a>(traces: impl IntoIterator<Item = &'a [TraceEntry]>) -> String {
    let mut out = String::from("method,refinement_param,h_to_previous,error_estimate,evals\n");
    for trace in traces {
        for e in trace {
            let h = e
                .h_to_previous
                .map(|h| format!("{h:e}"))
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{:e},{}",
                e.method.name(),
                e.refinement_param,
                h,
                e.error_estimate,
                e.evals
            );
        }
    }
    out
}

/// A stream seed for (level, sample) derived from the run seed.
pub(crate) fn derive_seed(seed: u64, level: u64, sample: u64) -> u64 {
    let mut z = seed
        ^ level.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ sample.wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// ⊕ μᵢ·F(tᵢ) for (μᵢ, tᵢ) with μᵢ > 0.
pub(crate) fn riemann_sum(f: &Multifunction, terms: &[(f64, f64)]) -> ConvexBody {
    let bodies: Vec<ConvexBody> = terms.iter().map(|&(_, t)| f.eval(t)).collect();
    let weighted: Vec<(f64, &ConvexBody)> = terms.iter().map(|t| t.0).zip(&bodies).collect();
    crate::geometry::weighted_sum_unchecked(f.dim(), &weighted)
}

/// Floating-point error of an n-term weighted sum of bodies bounded by M.
fn roundoff(n: usize, a: &IntervalSet, bound: f64) -> f64 {
    4.0 * (n + 1) as f64 * f64::EPSILON * a.measure() * bound
}

fn require_bound(f: &Multifunction) -> Result<f64> {
    f.bound().ok_or(Error::UnboundedMultifunction)
}

fn check_domain(a: &IntervalSet) -> Result<()> {
    match a.hull() {
        Some((lo, hi)) if lo < 0.0 || hi > 1.0 => Err(Error::InvalidInput(format!(
            "domain [{lo}, {hi}) is not inside [0, 1]"
        ))),
        _ => Ok(()),
    }
}

/// Points where t ↦ F(t)·𝟙_A(t) may jump.
fn singular_points(f: &Multifunction, a: &IntervalSet) -> Vec<f64> {
    let mut s: Vec<f64> = f.jumps().to_vec();
    for &(lo, hi) in a.intervals() {
        s.extend([lo, hi].into_iter().filter(|&x| x > 0.0 && x < 1.0));
    }
    s.sort_by(f64::total_cmp);
    s.dedup();
    s
}
