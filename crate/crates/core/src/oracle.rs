//! Reference integrals from the support-function characterization, computed
//! independently of the integrators: per direction, Gauss–Legendre on the
//! smooth pieces of an analytic support function, or the exact integral of
//! a piecewise-affine one.

use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};

use gauss_quad::GaussLegendre;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::domain::IntervalSet;
use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, DirectionGrid, SupportVector};
use crate::integrators::IntegralResult;
use crate::multifunctions::{catalog, standard_specs, CatalogSpec, Multifunction, SupportForm};

pub const ORACLE_M: usize = 4096;
pub const ORACLE_ORDER: usize = 10;
pub const ORACLE_PANELS: usize = 64;
pub const ORACLE_VERSION: &str = "gauss-legendre-panels/1";

/// Environment variable naming the fixture directory.
pub const FIXTURE_ENV: &str = "SETINT_FIXTURES";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub support_values: SupportVector,
    pub quadrature_order: usize,
    pub panels: usize,
    /// Largest per-direction error bound.
    pub per_direction_error: f64,
}

/// Oracle at the default resolution.
pub fn oracle_integral(f: &Multifunction, a: &IntervalSet) -> Result<OracleResult> {
    oracle_integral_with(f, a, ORACLE_M, ORACLE_PANELS)
}

/// Oracle with `m` directions and `panels` Gauss–Legendre panels per
/// smooth piece.
pub fn oracle_integral_with(
    f: &Multifunction,
    a: &IntervalSet,
    m: usize,
    panels: usize,
) -> Result<OracleResult> {
    let form = f
        .support_form()
        .ok_or_else(|| Error::OracleUnavailable(f.name().to_string()))?;
    if panels < 2 {
        return Err(Error::InvalidInput(
            "the oracle needs at least two panels".into(),
        ));
    }
    let grid = DirectionGrid::new(f.dim(), m)?;
    let gl = GaussLegendre::new(NonZeroUsize::new(ORACLE_ORDER).expect("nonzero order"));
    let dirs: Vec<&[f64]> = grid.directions().collect();
    let per: Vec<(f64, f64)> = dirs
        .par_iter()
        .map(|d| match form {
            SupportForm::PiecewiseAffine(_) => affine_integral(form, d, f.jumps(), a),
            SupportForm::Analytic { .. } => analytic_integral(&gl, form, d, f.jumps(), a, panels),
        })
        .collect();
    let values: Vec<f64> = per.iter().map(|p| p.0).collect();
    let per_direction_error = per.iter().map(|p| p.1).fold(0.0, f64::max);
    Ok(OracleResult {
        support_values: SupportVector::new(grid, values)?,
        quadrature_order: ORACLE_ORDER,
        panels,
        per_direction_error,
    })
}

/// Break points of t ↦ δ*(d, F(t))·𝟙_A(t) inside [lo, hi].
fn breaks(form: &SupportForm, d: &[f64], jumps: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let mut b = vec![lo, hi];
    b.extend(
        form.kinks(d)
            .into_iter()
            .chain(jumps.iter().copied())
            .filter(|&t| t > lo && t < hi),
    );
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

/// Exact on each piece: the midpoint value times the length.
fn affine_integral(form: &SupportForm, d: &[f64], jumps: &[f64], a: &IntervalSet) -> (f64, f64) {
    let SupportForm::PiecewiseAffine(pieces) = form else {
        unreachable!()
    };
    let (mut total, mut scale) = (0.0, 0.0);
    for &(lo, hi) in a.intervals() {
        for w in breaks(form, d, jumps, lo, hi).windows(2) {
            let (s, e) = (w[0], w[1]);
            let mid = 0.5 * (s + e);
            let p = &pieces[pieces
                .partition_point(|p| p.end <= mid)
                .min(pieces.len() - 1)];
            let (h0, h1) = p.support_at_ends(d);
            let lam = (mid - p.start) / (p.end - p.start);
            let v = (e - s) * ((1.0 - lam) * h0 + lam * h1);
            total += v;
            scale += v.abs();
        }
    }
    (total, 16.0 * f64::EPSILON * scale)
}

/// Gauss–Legendre on every smooth piece, with the difference from the run
/// at half the panels as the error bound.
fn analytic_integral(
    gl: &GaussLegendre,
    form: &SupportForm,
    d: &[f64],
    jumps: &[f64],
    a: &IntervalSet,
    panels: usize,
) -> (f64, f64) {
    let SupportForm::Analytic { value, .. } = form else {
        unreachable!()
    };
    let composite = |s: f64, e: f64, n: usize| {
        let w = (e - s) / n as f64;
        (0..n)
            .map(|i| {
                let (p, q) = (
                    s + i as f64 * w,
                    if i + 1 == n {
                        e
                    } else {
                        s + (i + 1) as f64 * w
                    },
                );
                gl.integrate(p, q, |t| value(d, t))
            })
            .sum::<f64>()
    };
    let (mut fine, mut coarse) = (0.0, 0.0);
    for &(lo, hi) in a.intervals() {
        for w in breaks(form, d, jumps, lo, hi).windows(2) {
            fine += composite(w[0], w[1], panels);
            coarse += composite(w[0], w[1], panels / 2);
        }
    }
    (
        fine,
        (fine - coarse).abs() + 16.0 * f64::EPSILON * fine.abs(),
    )
}

/// sup over the result's grid directions of |δ*(d, value) − oracle(d)|.
pub fn oracle_distance(r: &IntegralResult, o: &OracleResult) -> Result<f64> {
    let grid = r.grid()?;
    let index = grid.embedding_into(o.support_values.grid())?;
    let values = o.support_values.values();
    Ok(grid
        .directions()
        .zip(index)
        .map(|(d, k)| (r.value.support(d).expect("dimensions match") - values[k]).abs())
        .fold(0.0, f64::max))
}

/// sup over every oracle direction of |δ*(d, body) − oracle(d)|. A lower
/// bound on the Hausdorff distance from `body` to the body the oracle
/// describes, insensitive to which grid produced `body`.
pub fn oracle_sup_distance(body: &ConvexBody, o: &OracleResult) -> Result<f64> {
    let mut worst = 0.0f64;
    for (d, v) in o
        .support_values
        .grid()
        .directions()
        .zip(o.support_values.values())
    {
        worst = worst.max((body.support(d)? - v).abs());
    }
    Ok(worst)
}

/// A stored oracle run for one catalog entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fixture {
    pub entry: String,
    pub params: Value,
    pub domain: IntervalSet,
    pub oracle: OracleResult,
    pub version_hash: String,
}

impl Fixture {
    /// Whether the stored hash matches this oracle version and the stored
    /// inputs.
    pub fn hash_is_current(&self) -> bool {
        self.version_hash == version_hash(&self.params, &self.domain, &self.oracle)
    }
}

fn version_hash(params: &Value, domain: &IntervalSet, o: &OracleResult) -> String {
    let mut h = Sha256::new();
    h.update(ORACLE_VERSION.as_bytes());
    h.update(format!(
        "|order={}|panels={}|m={}|",
        o.quadrature_order,
        o.panels,
        o.support_values.grid().len()
    ));
    h.update(params.to_string().as_bytes());
    h.update(
        serde_json::to_string(domain)
            .expect("interval sets serialize")
            .as_bytes(),
    );
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Run the oracle for a catalog entry over [0, 1].
pub fn generate_fixture(spec: &CatalogSpec) -> Result<Fixture> {
    let f = catalog(spec)?;
    let domain = IntervalSet::unit();
    let oracle = oracle_integral(&f, &domain)?;
    let params = f.spec().clone();
    Ok(Fixture {
        entry: spec.name().to_string(),
        version_hash: version_hash(&params, &domain, &oracle),
        params,
        domain,
        oracle,
    })
}

/// `$SETINT_FIXTURES`, or the crate's `fixtures` directory.
pub fn fixture_dir() -> PathBuf {
    std::env::var_os(FIXTURE_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures"))
}

/// Regenerate the fixture of every standard catalog entry into `dir`.
pub fn write_fixtures(dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    standard_specs()
        .iter()
        .map(|spec| {
            let fx = generate_fixture(spec)?;
            let path = dir.join(format!("{}.json", fx.entry));
            let mut text = serde_json::to_string_pretty(&fx)?;
            text.push('\n');
            std::fs::write(&path, text)?;
            Ok(path)
        })
        .collect()
}

pub fn load_fixture(dir: &Path, entry: &str) -> Result<Fixture> {
    let text = std::fs::read_to_string(dir.join(format!("{entry}.json")))?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::multifunctions::{SmoothCurve, Term};

    fn oracle(spec: CatalogSpec, m: usize) -> OracleResult {
        oracle_integral_with(
            &catalog(&spec).unwrap(),
            &IntervalSet::unit(),
            m,
            ORACLE_PANELS,
        )
        .unwrap()
    }

    #[test]
    fn segment_growth_closed_form() {
        let o = oracle(CatalogSpec::SegmentGrowth {}, 2);
        assert_eq!(o.support_values.values(), &[0.5, 0.0]);
    }

    #[test]
    fn rotating_segment_is_two_over_pi_everywhere() {
        let o = oracle(CatalogSpec::RotatingSegment {}, 512);
        for v in o.support_values.values() {
            assert!((v - 2.0 / PI).abs() < 1e-12, "{v}");
        }
        assert!(o.per_direction_error < 1e-10);
    }

    #[test]
    fn constant_scales_by_measure() {
        let k = ConvexBody::from_points(&[[0.0, 0.0], [1.0, 0.2], [0.3, 0.8]]).unwrap();
        let f = catalog(&CatalogSpec::ConstantK { k: k.clone() }).unwrap();
        let a = IntervalSet::new(vec![(0.1, 0.3), (0.6, 0.9)]).unwrap();
        let o = oracle_integral_with(&f, &a, 64, ORACLE_PANELS).unwrap();
        for (d, v) in o
            .support_values
            .grid()
            .directions()
            .zip(o.support_values.values())
        {
            assert!((v - 0.5 * k.support(d).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn curve_matches_its_closed_form() {
        let c = SmoothCurve {
            components: vec![
                vec![Term::Sin {
                    amp: 1.0,
                    freq: 7.0,
                    phase: 0.2,
                }],
                vec![
                    Term::Exp {
                        amp: -0.3,
                        rate: 2.0,
                    },
                    Term::Poly {
                        coeffs: vec![0.0, 1.0, 1.0, 1.0],
                    },
                ],
            ],
        };
        let exact = c.integral(0.0, 1.0);
        let o = oracle(CatalogSpec::SingleValuedWrap { f: c }, 64);
        for (d, v) in o
            .support_values
            .grid()
            .directions()
            .zip(o.support_values.values())
        {
            assert!((v - (d[0] * exact[0] + d[1] * exact[1])).abs() < 1e-12);
        }
    }

    #[test]
    fn doubling_resolution_is_stable() {
        let coarse = oracle(CatalogSpec::RotatingSegment {}, 1024);
        let f = catalog(&CatalogSpec::RotatingSegment {}).unwrap();
        let fine = oracle_integral_with(&f, &IntervalSet::unit(), 2048, 2 * ORACLE_PANELS).unwrap();
        for (k, v) in coarse.support_values.values().iter().enumerate() {
            assert!((v - fine.support_values.values()[2 * k]).abs() <= 1e-11);
        }
    }

    #[test]
    fn composite_without_form_is_unavailable() {
        let f =
            Multifunction::from_parts("bare", 1, std::sync::Arc::new(|_| ConvexBody::origin(1)));
        assert!(matches!(
            oracle_integral(&f, &IntervalSet::unit()),
            Err(Error::OracleUnavailable(_))
        ));
    }
}
