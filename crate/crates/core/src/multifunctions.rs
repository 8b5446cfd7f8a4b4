//! Test multifunctions F: [0,1] → ck(ℝⁿ) with checked regularity metadata,
//! and the selections used to build Aumann integrals.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::geometry::{hausdorff_distance, steiner_point, weighted_minkowski_sum, ConvexBody};

pub type BodyFn = Arc<dyn Fn(f64) -> ConvexBody + Send + Sync>;
pub type PointFn = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;
pub type SupportFn = Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>;
pub type KinkFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Points of the verification grid, i/1023 for i = 0..1024.
pub const VERIFY_POINTS: usize = 1024;

/// A closed-form description of t ↦ δ*(d, F(t)) used by the oracle.
#[derive(Clone)]
pub enum SupportForm {
    /// Exact support function plus, per direction, the points where it
    /// fails to be smooth.
    Analytic { value: SupportFn, kinks: KinkFn },
    /// On each piece the support is affine in t in every direction.
    PiecewiseAffine(Vec<AffinePiece>),
}

/// F(t) = ((end − t)·at_start ⊕ (t − start)·at_end)/(end − start) on [start, end).
#[derive(Clone, Debug)]
pub struct AffinePiece {
    pub start: f64,
    pub end: f64,
    pub at_start: ConvexBody,
    pub at_end: ConvexBody,
}

impl AffinePiece {
    fn body_at(&self, t: f64) -> ConvexBody {
        let lam = ((t - self.start) / (self.end - self.start)).clamp(0.0, 1.0);
        weighted_minkowski_sum(&[(1.0 - lam, &self.at_start), (lam, &self.at_end)])
            .expect("piece bodies share a dimension")
    }

    pub fn support_at_ends(&self, d: &[f64]) -> (f64, f64) {
        (
            self.at_start.support_unchecked(d),
            self.at_end.support_unchecked(d),
        )
    }
}

impl SupportForm {
    pub fn value(&self, d: &[f64], t: f64) -> f64 {
        match self {
            SupportForm::Analytic { value, .. } => value(d, t),
            SupportForm::PiecewiseAffine(pieces) => {
                let k = pieces.partition_point(|p| p.end <= t).min(pieces.len() - 1);
                let p = &pieces[k];
                let (h0, h1) = p.support_at_ends(d);
                let lam = (t - p.start) / (p.end - p.start);
                (1.0 - lam) * h0 + lam * h1
            }
        }
    }

    pub fn kinks(&self, d: &[f64]) -> Vec<f64> {
        match self {
            SupportForm::Analytic { kinks, .. } => kinks(d),
            SupportForm::PiecewiseAffine(pieces) => {
                pieces.iter().map(|p| p.start).skip(1).collect()
            }
        }
    }

    fn scaled(&self, lambda: f64) -> SupportForm {
        match self {
            SupportForm::Analytic { value, kinks } => {
                let value = value.clone();
                SupportForm::Analytic {
                    value: Arc::new(move |d, t| lambda * value(d, t)),
                    kinks: kinks.clone(),
                }
            }
            SupportForm::PiecewiseAffine(pieces) => SupportForm::PiecewiseAffine(
                pieces
                    .iter()
                    .map(|p| AffinePiece {
                        start: p.start,
                        end: p.end,
                        at_start: p.at_start.scale_unchecked(lambda),
                        at_end: p.at_end.scale_unchecked(lambda),
                    })
                    .collect(),
            ),
        }
    }

    fn sum(forms: &[SupportForm]) -> SupportForm {
        if let Some(pieces) = forms
            .iter()
            .map(|f| match f {
                SupportForm::PiecewiseAffine(p) => Some(p.clone()),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
        {
            return SupportForm::PiecewiseAffine(merge_affine(&pieces));
        }
        let parts: Vec<SupportForm> = forms.to_vec();
        let kparts = parts.clone();
        SupportForm::Analytic {
            value: Arc::new(move |d, t| parts.iter().map(|f| f.value(d, t)).sum()),
            kinks: Arc::new(move |d| {
                let mut k: Vec<f64> = kparts.iter().flat_map(|f| f.kinks(d)).collect();
                k.sort_by(f64::total_cmp);
                k.dedup();
                k
            }),
        }
    }
}

fn merge_affine(terms: &[Vec<AffinePiece>]) -> Vec<AffinePiece> {
    let mut breaks: Vec<f64> = terms
        .iter()
        .flat_map(|ps| ps.iter().flat_map(|p| [p.start, p.end]))
        .collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    breaks
        .windows(2)
        .map(|w| {
            let (s0, s1) = (w[0], w[1]);
            let mid = 0.5 * (s0 + s1);
            let (mut lo, mut hi) = (Vec::new(), Vec::new());
            for ps in terms {
                let k = ps.partition_point(|p| p.end <= mid).min(ps.len() - 1);
                lo.push(ps[k].body_at(s0));
                hi.push(ps[k].body_at(s1));
            }
            let sum = |bs: &[ConvexBody]| {
                let t: Vec<(f64, &ConvexBody)> = bs.iter().map(|b| (1.0, b)).collect();
                weighted_minkowski_sum(&t).expect("terms share a dimension")
            };
            AffinePiece {
                start: s0,
                end: s1,
                at_start: sum(&lo),
                at_end: sum(&hi),
            }
        })
        .collect()
}

/// A map t ↦ F(t) with its declared regularity.
#[derive(Clone)]
pub struct Multifunction {
    name: String,
    dim: usize,
    eval: BodyFn,
    bound: Option<f64>,
    modulus: Option<f64>,
    jumps: Vec<f64>,
    support_form: Option<SupportForm>,
    spec: Value,
}

impl fmt::Debug for Multifunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Multifunction")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("bound", &self.bound)
            .field("modulus", &self.modulus)
            .field("jumps", &self.jumps)
            .finish_non_exhaustive()
    }
}

impl Multifunction {
    /// Assemble a multifunction from parts. Nothing is checked here; call
    /// [`Multifunction::verify`] before trusting the metadata.
    pub fn from_parts(name: impl Into<String>, dim: usize, eval: BodyFn) -> Self {
        Self {
            name: name.into(),
            dim,
            eval,
            bound: None,
            modulus: None,
            jumps: Vec::new(),
            support_form: None,
            spec: Value::Null,
        }
    }

    pub fn with_bound(mut self, m: f64) -> Self {
        self.bound = Some(m);
        self
    }

    /// Lipschitz constant in the Hausdorff metric between declared jumps.
    pub fn with_modulus(mut self, l: f64) -> Self {
        self.modulus = Some(l);
        self
    }

    pub fn with_jumps(mut self, mut jumps: Vec<f64>) -> Self {
        jumps.sort_by(f64::total_cmp);
        jumps.dedup();
        self.jumps = jumps;
        self
    }

    pub fn with_support_form(mut self, form: SupportForm) -> Self {
        self.support_form = Some(form);
        self
    }

    pub fn with_spec(mut self, spec: Value) -> Self {
        self.spec = spec;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, t: f64) -> ConvexBody {
        (self.eval)(t)
    }

    /// M with h(F(t), {0}) ≤ M.
    pub fn bound(&self) -> Option<f64> {
        self.bound
    }

    pub fn modulus(&self) -> Option<f64> {
        self.modulus
    }

    pub fn jumps(&self) -> &[f64] {
        &self.jumps
    }

    pub fn support_form(&self) -> Option<&SupportForm> {
        self.support_form.as_ref()
    }

    /// The JSON description this multifunction was built from.
    pub fn spec(&self) -> &Value {
        &self.spec
    }

    /// Whether no declared jump lies in the half-open span between s and t.
    pub fn continuous_between(&self, s: f64, t: f64) -> bool {
        let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
        !self.jumps.iter().any(|&j| lo < j && j <= hi)
    }

    /// Check the declared metadata on the verification grid.
    pub fn verify(&self) -> Result<()> {
        let fail = |detail: String| Error::MetadataViolation {
            name: self.name.clone(),
            detail,
        };
        let ts: Vec<f64> = (0..VERIFY_POINTS)
            .map(|i| i as f64 / (VERIFY_POINTS - 1) as f64)
            .collect();
        let bodies: Vec<ConvexBody> = ts.iter().map(|&t| self.eval(t)).collect();
        for (t, b) in ts.iter().zip(&bodies) {
            if b.dim() != self.dim {
                return Err(fail(format!("F({t}) has dimension {}", b.dim())));
            }
            if let Some(m) = self.bound {
                let n = b.norm();
                if n > m * (1.0 + 1e-12) + 1e-12 {
                    return Err(fail(format!(
                        "h(F({t}), {{0}}) = {n} exceeds the bound {m}"
                    )));
                }
            }
        }
        if let Some(l) = self.modulus {
            for stride in [1usize, 7, 61, 509] {
                for i in 0..VERIFY_POINTS - stride {
                    let (s, t) = (ts[i], ts[i + stride]);
                    if !self.continuous_between(s, t) {
                        continue;
                    }
                    let h = hausdorff_distance(&bodies[i], &bodies[i + stride])?;
                    if h > l * (t - s) + 1e-9 {
                        return Err(fail(format!("h(F({s}), F({t})) = {h} exceeds {l}·|s − t|")));
                    }
                }
            }
        }
        if let Some(form) = &self.support_form {
            let dirs = crate::geometry::DirectionGrid::new(self.dim, 24)?;
            for (t, b) in ts.iter().zip(&bodies).step_by(17) {
                for d in dirs.directions() {
                    let (exact, got) = (form.value(d, *t), b.support_unchecked(d));
                    // Analytic forms may describe the curved body the polygon
                    // approximates from inside.
                    if got > exact + 1e-9 * (1.0 + exact.abs()) {
                        return Err(fail(format!(
                            "support {got} above the closed form {exact} at t = {t}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// F ⊕ G ⊕ …
    pub fn sum(terms: &[Multifunction]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidInput("empty Minkowski sum".into()))?;
        let dim = first.dim;
        if let Some(t) = terms.iter().find(|t| t.dim != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: t.dim,
            });
        }
        let parts: Vec<Multifunction> = terms.to_vec();
        let eval: BodyFn = Arc::new(move |t| {
            let bodies: Vec<ConvexBody> = parts.iter().map(|p| p.eval(t)).collect();
            let w: Vec<(f64, &ConvexBody)> = bodies.iter().map(|b| (1.0, b)).collect();
            crate::geometry::weighted_sum_unchecked(dim, &w)
        });
        let name = terms
            .iter()
            .map(|t| t.name.as_str())
            .collect::<Vec<_>>()
            .join("+");
        let mut f = Multifunction::from_parts(format!("sum({name})"), dim, eval)
            .with_jumps(terms.iter().flat_map(|t| t.jumps.iter().copied()).collect());
        f.bound = terms.iter().map(|t| t.bound).sum();
        f.modulus = terms.iter().map(|t| t.modulus).sum();
        f.support_form = terms
            .iter()
            .map(|t| t.support_form.clone())
            .collect::<Option<Vec<_>>>()
            .map(|forms| SupportForm::sum(&forms));
        f.spec = serde_json::json!({
            "name": "minkowski_sum",
            "terms": terms.iter().map(|t| t.spec.clone()).collect::<Vec<_>>(),
        });
        Ok(f)
    }

    /// λF for λ ≥ 0.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::NegativeScale(lambda));
        }
        let inner = self.clone();
        let eval: BodyFn = Arc::new(move |t| inner.eval(t).scale_unchecked(lambda));
        let mut f = Multifunction::from_parts(format!("{lambda}*{}", self.name), self.dim, eval)
            .with_jumps(self.jumps.clone());
        f.bound = self.bound.map(|m| lambda * m);
        f.modulus = self.modulus.map(|l| lambda * l);
        f.support_form = self.support_form.as_ref().map(|s| s.scaled(lambda));
        f.spec =
            serde_json::json!({"name": "scaled", "factor": lambda, "inner": self.spec.clone()});
        Ok(f)
    }
}

/// One term of a smooth scalar function on [0, 1].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Term {
    /// Σ c_k t^k.
    Poly { coeffs: Vec<f64> },
    /// amp·sin(freq·t + phase).
    Sin { amp: f64, freq: f64, phase: f64 },
    /// amp·e^{rate·t}.
    Exp { amp: f64, rate: f64 },
}

impl Term {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            Term::Poly { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c),
            Term::Sin { amp, freq, phase } => amp * (freq * t + phase).sin(),
            Term::Exp { amp, rate } => amp * (rate * t).exp(),
        }
    }

    /// Exact ∫_a^b.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        match self {
            Term::Poly { coeffs } => coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * (b.powi(k as i32 + 1) - a.powi(k as i32 + 1)) / (k as f64 + 1.0))
                .sum(),
            Term::Sin { amp, freq, phase } if *freq == 0.0 => amp * phase.sin() * (b - a),
            Term::Sin { amp, freq, phase } => {
                -amp / freq * ((freq * b + phase).cos() - (freq * a + phase).cos())
            }
            Term::Exp { amp, rate } if *rate == 0.0 => amp * (b - a),
            Term::Exp { amp, rate } => amp / rate * ((rate * b).exp() - (rate * a).exp()),
        }
    }

    fn sup_abs(&self) -> f64 {
        match self {
            Term::Poly { coeffs } => coeffs.iter().map(|c| c.abs()).sum(),
            Term::Sin { amp, .. } => amp.abs(),
            Term::Exp { amp, rate } => amp.abs() * rate.exp().max(1.0),
        }
    }

    fn sup_abs_derivative(&self) -> f64 {
        match self {
            Term::Poly { coeffs } => coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| k as f64 * c.abs())
                .sum(),
            Term::Sin { amp, freq, .. } => (amp * freq).abs(),
            Term::Exp { amp, rate } => (amp * rate).abs() * rate.exp().max(1.0),
        }
    }
}

/// A smooth curve f: [0,1] → ℝⁿ, one list of terms per coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothCurve {
    pub components: Vec<Vec<Term>>,
}

impl SmoothCurve {
    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn value(&self, t: f64) -> Vec<f64> {
        self.components
            .iter()
            .map(|c| c.iter().map(|term| term.value(t)).sum())
            .collect()
    }

    pub fn integral(&self, a: f64, b: f64) -> Vec<f64> {
        self.components
            .iter()
            .map(|c| c.iter().map(|term| term.integral(a, b)).sum())
            .collect()
    }

    pub fn sup_norm_bound(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.iter().map(Term::sup_abs).sum::<f64>().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn lipschitz_bound(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.iter().map(Term::sup_abs_derivative).sum::<f64>().powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Names accepted by [`catalog`].
pub const CATALOG_NAMES: &[&str] = &[
    "constant_K",
    "segment_growth",
    "scaled_disk",
    "rotating_segment",
    "polytope_interp",
    "piecewise_jump",
    "single_valued_wrap",
    "minkowski_sum",
    "scaled",
];

/// JSON description of a catalog entry or a composition of entries.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "name", deny_unknown_fields)]
pub enum CatalogSpec {
    #[serde(rename = "constant_K")]
    ConstantK {
        #[serde(rename = "K")]
        k: ConvexBody,
    },
    #[serde(rename = "segment_growth")]
    SegmentGrowth {},
    #[serde(rename = "scaled_disk")]
    ScaledDisk {
        #[serde(default = "default_disk_vertices")]
        m: usize,
    },
    #[serde(rename = "rotating_segment")]
    RotatingSegment {},
    #[serde(rename = "polytope_interp")]
    PolytopeInterp {
        #[serde(rename = "A")]
        a: ConvexBody,
        #[serde(rename = "B")]
        b: ConvexBody,
    },
    #[serde(rename = "piecewise_jump")]
    PiecewiseJump {
        #[serde(rename = "A")]
        a: ConvexBody,
        #[serde(rename = "B")]
        b: ConvexBody,
        #[serde(default = "default_jump")]
        at: f64,
    },
    #[serde(rename = "single_valued_wrap")]
    SingleValuedWrap { f: SmoothCurve },
    #[serde(rename = "minkowski_sum")]
    MinkowskiSum { terms: Vec<CatalogSpec> },
    #[serde(rename = "scaled")]
    Scaled {
        factor: f64,
        inner: Box<CatalogSpec>,
    },
}

impl CatalogSpec {
    pub fn name(&self) -> &'static str {
        match self {
            CatalogSpec::ConstantK { .. } => "constant_K",
            CatalogSpec::SegmentGrowth {} => "segment_growth",
            CatalogSpec::ScaledDisk { .. } => "scaled_disk",
            CatalogSpec::RotatingSegment {} => "rotating_segment",
            CatalogSpec::PolytopeInterp { .. } => "polytope_interp",
            CatalogSpec::PiecewiseJump { .. } => "piecewise_jump",
            CatalogSpec::SingleValuedWrap { .. } => "single_valued_wrap",
            CatalogSpec::MinkowskiSum { .. } => "minkowski_sum",
            CatalogSpec::Scaled { .. } => "scaled",
        }
    }
}

/// One instance of every base catalog entry, with fixed parameters. These
/// are the entries that ship oracle fixtures.
pub fn standard_specs() -> Vec<CatalogSpec> {
    let body = |pts: &[[f64; 2]]| ConvexBody::from_points(pts).expect("finite points");
    vec![
        CatalogSpec::ConstantK {
            k: body(&[[-1.0, -0.5], [1.2, -0.3], [0.1, 1.0]]),
        },
        CatalogSpec::SegmentGrowth {},
        CatalogSpec::ScaledDisk { m: 256 },
        CatalogSpec::RotatingSegment {},
        CatalogSpec::PolytopeInterp {
            a: body(&[[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]]),
            b: body(&[[0.0, -0.2], [1.0, 0.3], [0.2, 0.9]]),
        },
        CatalogSpec::PiecewiseJump {
            a: body(&[[-1.0, 0.0], [1.0, 0.0]]),
            b: body(&[[0.0, 0.0], [0.6, 0.0], [0.6, 0.6], [0.0, 0.6]]),
            at: 0.5,
        },
        CatalogSpec::SingleValuedWrap {
            f: SmoothCurve {
                components: vec![
                    vec![
                        Term::Sin {
                            amp: 0.5,
                            freq: 2.0 * PI,
                            phase: 0.0,
                        },
                        Term::Poly {
                            coeffs: vec![0.1, 0.3],
                        },
                    ],
                    vec![
                        Term::Exp {
                            amp: 0.25,
                            rate: 1.0,
                        },
                        Term::Poly {
                            coeffs: vec![0.0, 0.0, -0.5],
                        },
                    ],
                ],
            },
        },
    ]
}

fn default_disk_vertices() -> usize {
    256
}

fn default_jump() -> f64 {
    0.5
}

/// Build a verified multifunction from its JSON description.
pub fn catalog_from_json(v: &Value) -> Result<Multifunction> {
    let name = v
        .get("name")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::InvalidInput("multifunction.name is missing".into()))?;
    if !CATALOG_NAMES.contains(&name) {
        return Err(Error::UnknownCatalogEntry(name.to_string()));
    }
    let spec: CatalogSpec = serde_json::from_value(v.clone())?;
    catalog(&spec)
}

/// Build and verify a catalog multifunction.
pub fn catalog(spec: &CatalogSpec) -> Result<Multifunction> {
    let f = build(spec)?;
    f.verify()?;
    Ok(f)
}

fn build(spec: &CatalogSpec) -> Result<Multifunction> {
    let json = serde_json::to_value(spec)?;
    let f = match spec {
        CatalogSpec::ConstantK { k } => {
            let body = k.clone();
            let piece = AffinePiece {
                start: 0.0,
                end: 1.0,
                at_start: k.clone(),
                at_end: k.clone(),
            };
            Multifunction::from_parts("constant_K", k.dim(), Arc::new(move |_| body.clone()))
                .with_bound(k.norm())
                .with_modulus(0.0)
                .with_support_form(SupportForm::PiecewiseAffine(vec![piece]))
        }
        CatalogSpec::SegmentGrowth {} => {
            let piece = AffinePiece {
                start: 0.0,
                end: 1.0,
                at_start: ConvexBody::origin(1),
                at_end: ConvexBody::interval(0.0, 1.0)?,
            };
            Multifunction::from_parts(
                "segment_growth",
                1,
                Arc::new(|t| ConvexBody::interval(0.0, t).expect("finite endpoints")),
            )
            .with_bound(1.0)
            .with_modulus(1.0)
            .with_support_form(SupportForm::PiecewiseAffine(vec![piece]))
        }
        CatalogSpec::ScaledDisk { m } => {
            let disk = ConvexBody::regular_polygon(*m, 1.0)?;
            let r = disk.norm();
            Multifunction::from_parts("scaled_disk", 2, Arc::new(move |t| disk.scale_unchecked(t)))
                .with_bound(r)
                .with_modulus(r)
                .with_support_form(SupportForm::Analytic {
                    value: Arc::new(|d, t| t * (d[0] * d[0] + d[1] * d[1]).sqrt()),
                    kinks: Arc::new(|_| Vec::new()),
                })
        }
        CatalogSpec::RotatingSegment {} => Multifunction::from_parts(
            "rotating_segment",
            2,
            Arc::new(|t| {
                let (c, s) = ((PI * t).cos(), (PI * t).sin());
                ConvexBody::from_points(&[[c, s], [-c, -s]]).expect("finite endpoints")
            }),
        )
        .with_bound(1.0)
        .with_modulus(PI)
        .with_support_form(SupportForm::Analytic {
            value: Arc::new(|d, t| (d[0] * (PI * t).cos() + d[1] * (PI * t).sin()).abs()),
            kinks: Arc::new(|d| {
                // ⟨d, e(t)⟩ = |d|cos(πt − θ) vanishes at πt = θ ± π/2.
                let theta = d[1].atan2(d[0]);
                let mut k: Vec<f64> = (-3..=3)
                    .map(|j| (theta + PI / 2.0 + j as f64 * PI) / PI)
                    .filter(|&t| t > 0.0 && t < 1.0)
                    .collect();
                k.sort_by(f64::total_cmp);
                k
            }),
        }),
        CatalogSpec::PolytopeInterp { a, b } => {
            if a.dim() != b.dim() {
                return Err(Error::DimensionMismatch {
                    expected: a.dim(),
                    found: b.dim(),
                });
            }
            let (pa, pb) = (a.clone(), b.clone());
            let dim = a.dim();
            let piece = AffinePiece {
                start: 0.0,
                end: 1.0,
                at_start: a.clone(),
                at_end: b.clone(),
            };
            Multifunction::from_parts(
                "polytope_interp",
                dim,
                Arc::new(move |t| {
                    crate::geometry::weighted_sum_unchecked(dim, &[(1.0 - t, &pa), (t, &pb)])
                }),
            )
            .with_bound(a.norm().max(b.norm()))
            .with_modulus(hausdorff_distance(a, b)?)
            .with_support_form(SupportForm::PiecewiseAffine(vec![piece]))
        }
        CatalogSpec::PiecewiseJump { a, b, at } => {
            if a.dim() != b.dim() {
                return Err(Error::DimensionMismatch {
                    expected: a.dim(),
                    found: b.dim(),
                });
            }
            if !(*at > 0.0 && *at < 1.0) {
                return Err(Error::InvalidInput(format!(
                    "jump location {at} must lie in (0, 1)"
                )));
            }
            let (pa, pb, at) = (a.clone(), b.clone(), *at);
            let pieces = vec![
                AffinePiece {
                    start: 0.0,
                    end: at,
                    at_start: a.clone(),
                    at_end: a.clone(),
                },
                AffinePiece {
                    start: at,
                    end: 1.0,
                    at_start: b.clone(),
                    at_end: b.clone(),
                },
            ];
            Multifunction::from_parts(
                "piecewise_jump",
                a.dim(),
                Arc::new(move |t| if t < at { pa.clone() } else { pb.clone() }),
            )
            .with_bound(a.norm().max(b.norm()))
            .with_modulus(0.0)
            .with_jumps(vec![at])
            .with_support_form(SupportForm::PiecewiseAffine(pieces))
        }
        CatalogSpec::SingleValuedWrap { f } => {
            if f.dim() == 0 || f.dim() > crate::geometry::MAX_DIM {
                return Err(Error::InvalidInput(format!(
                    "curve dimension {} out of range",
                    f.dim()
                )));
            }
            let (fe, fs) = (f.clone(), f.clone());
            Multifunction::from_parts(
                "single_valued_wrap",
                f.dim(),
                Arc::new(move |t| ConvexBody::point(&fe.value(t)).expect("finite curve")),
            )
            .with_bound(f.sup_norm_bound())
            .with_modulus(f.lipschitz_bound())
            .with_support_form(SupportForm::Analytic {
                value: Arc::new(move |d, t| crate::geometry::dot(d, &fs.value(t))),
                kinks: Arc::new(|_| Vec::new()),
            })
        }
        CatalogSpec::MinkowskiSum { terms } => {
            let parts = terms.iter().map(build).collect::<Result<Vec<_>>>()?;
            Multifunction::sum(&parts)?
        }
        CatalogSpec::Scaled { factor, inner } => build(inner)?.scaled(*factor)?,
    };
    Ok(f.with_spec(json))
}

/// Which member of F(t) a selection picks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SelectionKind {
    Steiner,
    SupportDirection {
        u: Vec<f64>,
    },
    ConvexMix {
        weights: Vec<f64>,
        parts: Vec<SelectionKind>,
    },
}

/// A single-valued f with f(t) ∈ F(t).
#[derive(Clone)]
pub struct Selection {
    parent: Multifunction,
    kind: SelectionKind,
    eval: PointFn,
    modulus: Option<f64>,
}

impl fmt::Debug for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Selection")
            .field("parent", &self.parent.name)
            .field("kind", &self.kind)
            .finish()
    }
}

impl Selection {
    pub fn eval(&self, t: f64) -> Vec<f64> {
        (self.eval)(t)
    }

    pub fn kind(&self) -> &SelectionKind {
        &self.kind
    }

    pub fn parent(&self) -> &Multifunction {
        &self.parent
    }

    pub fn dim(&self) -> usize {
        self.parent.dim
    }

    /// Lipschitz constant of t ↦ f(t) between the parent's jumps, when one
    /// follows from the construction.
    pub fn modulus(&self) -> Option<f64> {
        self.modulus
    }

    /// Distance of f(t) to F(t) stays ≤ 1e-9 on the verification grid.
    pub fn verify(&self) -> Result<()> {
        for i in 0..VERIFY_POINTS {
            let t = i as f64 / (VERIFY_POINTS - 1) as f64;
            let d = self.parent.eval(t).distance_to_point(&self.eval(t))?;
            if d > 1e-9 {
                return Err(Error::MetadataViolation {
                    name: format!("{:?} selection of {}", self.kind, self.parent.name),
                    detail: format!("f({t}) is {d} away from F({t})"),
                });
            }
        }
        Ok(())
    }

    /// t ↦ {f(t)} as a multifunction with the parent's bound and jumps.
    pub fn as_multifunction(&self) -> Multifunction {
        let e = self.eval.clone();
        let es = self.eval.clone();
        let mut f = Multifunction::from_parts(
            format!("{{{:?} of {}}}", self.kind, self.parent.name),
            self.dim(),
            Arc::new(move |t| ConvexBody::point(&e(t)).expect("selection values are finite")),
        )
        .with_jumps(self.parent.jumps.clone())
        .with_support_form(SupportForm::Analytic {
            value: Arc::new(move |d, t| crate::geometry::dot(d, &es(t))),
            kinks: Arc::new(|_| Vec::new()),
        });
        f.bound = self.parent.bound;
        f.modulus = self.modulus;
        f
    }
}

/// t ↦ steiner_point(F(t)).
pub fn steiner_selection(f: &Multifunction) -> Result<Selection> {
    if f.dim > 2 {
        return Err(Error::Unsupported(
            "Steiner selection in dimension 3".into(),
        ));
    }
    let parent = f.clone();
    let p = f.clone();
    // The planar Steiner map is (4/π)-Lipschitz in the Hausdorff metric.
    let lip = if f.dim == 1 { 1.0 } else { 4.0 / PI };
    Ok(Selection {
        parent,
        kind: SelectionKind::Steiner,
        eval: Arc::new(move |t| steiner_point(&p.eval(t)).expect("dimension checked")),
        modulus: f.modulus.map(|l| lip * l),
    })
}

/// t ↦ support_point(F(t), u).
pub fn support_selection(f: &Multifunction, u: &[f64]) -> Result<Selection> {
    if u.len() != f.dim {
        return Err(Error::DimensionMismatch {
            expected: f.dim,
            found: u.len(),
        });
    }
    let p = f.clone();
    let dir = u.to_vec();
    Ok(Selection {
        parent: f.clone(),
        kind: SelectionKind::SupportDirection { u: u.to_vec() },
        eval: Arc::new(move |t| p.eval(t).support_point_stable(&dir).to_vec()),
        modulus: None,
    })
}

/// Σ wᵢ fᵢ for convex weights, a selection by convexity of F(t).
pub fn convex_mix(parts: &[Selection], weights: &[f64]) -> Result<Selection> {
    let first = parts
        .first()
        .ok_or_else(|| Error::InvalidInput("empty convex mix".into()))?;
    let total: f64 = weights.iter().sum();
    if parts.len() != weights.len()
        || weights.iter().any(|&w| !(w >= 0.0))
        || (total - 1.0).abs() > 1e-12
    {
        return Err(Error::InvalidInput(
            "convex mix needs one nonnegative weight per part, summing to 1".into(),
        ));
    }
    let ps: Vec<Selection> = parts.to_vec();
    let ws = weights.to_vec();
    let dim = first.dim();
    let modulus = parts
        .iter()
        .zip(weights)
        .map(|(p, w)| p.modulus.map(|l| w * l))
        .sum();
    Ok(Selection {
        parent: first.parent.clone(),
        kind: SelectionKind::ConvexMix {
            weights: weights.to_vec(),
            parts: parts.iter().map(|p| p.kind.clone()).collect(),
        },
        eval: Arc::new(move |t| {
            let mut x = vec![0.0; dim];
            for (p, w) in ps.iter().zip(&ws) {
                for (xi, pi) in x.iter_mut().zip(p.eval(t)) {
                    *xi += w * pi;
                }
            }
            x
        }),
        modulus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn entry(v: Value) -> Multifunction {
        catalog_from_json(&v).unwrap()
    }

    #[test]
    fn catalog_examples() {
        let seg = entry(json!({"name": "segment_growth"}));
        assert_eq!(seg.eval(0.5), ConvexBody::interval(0.0, 0.5).unwrap());
        let rot = entry(json!({"name": "rotating_segment"}));
        assert_eq!(
            rot.eval(0.0),
            ConvexBody::from_points(&[[1.0, 0.0], [-1.0, 0.0]]).unwrap()
        );
        let disk = entry(json!({"name": "scaled_disk"}));
        assert_eq!(disk.modulus(), Some(1.0));
    }

    #[test]
    fn standard_entries_verify() {
        let specs = standard_specs();
        assert_eq!(specs.len(), 7);
        for s in &specs {
            let f = catalog(s).unwrap();
            assert_eq!(f.spec()["name"], s.name());
            assert!(f.support_form().is_some());
        }
    }

    #[test]
    fn unknown_entry() {
        assert!(matches!(
            catalog_from_json(&json!({"name": "wobbly"})),
            Err(Error::UnknownCatalogEntry(n)) if n == "wobbly"
        ));
    }

    #[test]
    fn false_modulus_rejected() {
        let f = build(&CatalogSpec::SegmentGrowth {})
            .unwrap()
            .with_modulus(0.5);
        assert!(matches!(f.verify(), Err(Error::MetadataViolation { .. })));
    }

    #[test]
    fn steiner_selection_examples() {
        let seg = entry(json!({"name": "segment_growth"}));
        let s = steiner_selection(&seg).unwrap();
        assert_eq!(s.eval(0.5), vec![0.25]);
        let rot = entry(json!({"name": "rotating_segment"}));
        let s = steiner_selection(&rot).unwrap();
        assert!(s.eval(0.3).iter().all(|c| c.abs() < 1e-15));
        let k = entry(
            json!({"name": "constant_K", "K": {"dim": 2, "vertices": [[-1, 1], [1, 1], [1, 3], [-1, 3]]}}),
        );
        assert_eq!(steiner_selection(&k).unwrap().eval(0.7), vec![0.0, 2.0]);
        s.verify().unwrap();
    }

    #[test]
    fn support_selection_examples() {
        let seg = entry(json!({"name": "segment_growth"}));
        assert_eq!(
            support_selection(&seg, &[1.0]).unwrap().eval(0.4),
            vec![0.4]
        );
        assert_eq!(
            support_selection(&seg, &[-1.0]).unwrap().eval(0.4),
            vec![0.0]
        );
        assert!(matches!(
            support_selection(&seg, &[1.0, 0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn compositions_carry_metadata() {
        let f = entry(json!({"name": "minkowski_sum", "terms": [
            {"name": "scaled_disk", "m": 64},
            {"name": "scaled", "factor": 2.0, "inner": {"name": "rotating_segment"}}
        ]}));
        assert_eq!(f.dim(), 2);
        assert!((f.modulus().unwrap() - (1.0 + 2.0 * PI)).abs() < 1e-12);
        assert!((f.bound().unwrap() - 3.0).abs() < 1e-12);
        assert!(matches!(
            f.support_form(),
            Some(SupportForm::Analytic { .. })
        ));
    }

    #[test]
    fn affine_forms_merge() {
        let f = entry(json!({"name": "minkowski_sum", "terms": [
            {"name": "segment_growth"},
            {"name": "piecewise_jump", "A": {"dim": 1, "vertices": [[0], [1]]}, "B": {"dim": 1, "vertices": [[2]]}, "at": 0.25}
        ]}));
        let Some(SupportForm::PiecewiseAffine(p)) = f.support_form() else {
            panic!()
        };
        assert_eq!(p.len(), 2);
        assert_eq!(f.jumps(), &[0.25]);
        let form = f.support_form().unwrap();
        assert!((form.value(&[1.0], 0.5) - 2.5).abs() < 1e-15);
        assert!((form.value(&[-1.0], 0.1)).abs() < 1e-15);
    }

    #[test]
    fn curve_integrals_are_exact() {
        let c = SmoothCurve {
            components: vec![vec![
                Term::Poly {
                    coeffs: vec![1.0, 0.0, 3.0],
                },
                Term::Sin {
                    amp: 2.0,
                    freq: 3.0,
                    phase: 0.5,
                },
                Term::Exp {
                    amp: 0.5,
                    rate: -1.0,
                },
            ]],
        };
        // Composite Simpson with many panels as an independent check.
        let n = 20_000;
        let h = 1.0 / n as f64;
        let mut s = 0.0;
        for i in 0..n {
            let a = i as f64 * h;
            s += h / 6.0 * (c.value(a)[0] + 4.0 * c.value(a + h / 2.0)[0] + c.value(a + h)[0]);
        }
        assert!((c.integral(0.0, 1.0)[0] - s).abs() < 1e-12);
    }
}
