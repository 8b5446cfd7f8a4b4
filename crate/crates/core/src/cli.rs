//! Scenario-driven front end behind the `setint` binary.
//!
//! A scenario is a JSON file naming a catalog multifunction, a domain, the
//! integrators to run and their tolerances. Reports are written as JSON
//! and/or CSV into an output directory, each stamped with the SHA-256 of
//! the canonical scenario and the library version.
//!
//! Exit codes: 0 success, 1 invalid input, 2 an integrator did not converge
//! (reports are still written), 3 a cross-check raised a violation.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::domain::IntervalSet;
use crate::error::{Error, Result};
use crate::geometry::hausdorff_distance;
use crate::integrators::{
    compare_methods, integrate, trace_csv, ComparisonReport, IntegralResult, Method, Tolerances,
    TraceEntry,
};
use crate::multifunctions::{catalog_from_json, standard_specs, Multifunction};
use crate::oracle::{self, oracle_distance, oracle_sup_distance, OracleResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NO_CONVERGENCE: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Seed and tolerances of the built-in selftest.
pub const SELFTEST_SEED: u64 = 20_240_601;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Both,
}

impl Format {
    fn json(self) -> bool {
        self != Format::Csv
    }
    fn csv(self) -> bool {
        self != Format::Json
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "setint",
    version,
    about = "Set-valued integration of convex-compact multifunctions on [0, 1]"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Scenario file (JSON).
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,
    /// Output directory; overrides the scenario's `out`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for the integrators.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Report format; overrides the scenario's `format`.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Run each requested integrator and write its result.
    Integrate,
    /// Run the integrators and cross-check their values.
    Compare,
    /// Write one row per refinement level of each integrator.
    Convergence,
    /// Compare every standard catalog entry against its oracle fixture.
    Selftest,
    /// Recompute the oracle fixtures.
    RegenFixtures,
}

/// Parameters of a convergence sweep.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    /// Direction counts for Pettis and Aumann; by default 4, 8, … up to
    /// `tolerances.m`.
    #[serde(default)]
    pub m_values: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Catalog name plus parameters.
    pub multifunction: Value,
    #[serde(default = "IntervalSet::unit")]
    pub domain: IntervalSet,
    #[serde(default = "all_methods")]
    pub integrators: Vec<Method>,
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
}

fn all_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}

impl Scenario {
    /// Parse scenario text; syntax and type errors carry `origin:line:column`.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("{origin}:{}:{}: {e}", e.line(), e.column())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// SHA-256 of the scenario's canonical JSON (sorted keys, no whitespace).
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_value(self)
            .expect("scenarios serialize")
            .to_string();
        hex(&Sha256::digest(canonical.as_bytes()))
    }

    /// Validate the parts serde cannot and build the multifunction.
    pub fn prepare(&self) -> Result<Multifunction> {
        if self.integrators.is_empty() {
            return Err(Error::InvalidInput(
                "field `integrators`: the list is empty".into(),
            ));
        }
        self.tolerances
            .validate()
            .map_err(|e| Error::InvalidInput(format!("field `tolerances`: {e}")))?;
        catalog_from_json(&self.multifunction).map_err(|e| match e {
            Error::UnknownCatalogEntry(name) => Error::InvalidInput(format!(
                "field `multifunction.name`: unknown catalog entry `{name}`"
            )),
            e => Error::InvalidInput(format!("field `multifunction`: {e}")),
        })
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Every report file wraps its payload in this header.
#[derive(Debug, Serialize)]
pub struct Envelope<'a, T> {
    pub command: &'a str,
    pub version: &'a str,
    pub scenario: &'a str,
    pub scenario_hash: &'a str,
    pub report: T,
}

/// One integrator's outcome in an `integrate` run.
#[derive(Debug, Serialize)]
pub struct IntegrateReport {
    pub method: Method,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<IntegralResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<TraceEntry>,
}

/// One refinement level of a convergence sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub method: Method,
    pub refinement_param: f64,
    pub h_to_previous: Option<f64>,
    pub error_estimate: f64,
    pub evals: u64,
    /// sup over the oracle's directions of the support gap; empty when the
    /// entry has no oracle.
    pub h_to_oracle: Option<f64>,
}

/// Resolved output settings for one invocation.
#[derive(Clone, Debug)]
pub struct Output {
    pub dir: PathBuf,
    pub format: Format,
}

impl Output {
    fn resolve(cli_out: Option<&Path>, cli_format: Option<Format>, s: Option<&Scenario>) -> Self {
        let dir = cli_out
            .map(Path::to_path_buf)
            .or_else(|| s.and_then(|s| s.out.clone()))
            .unwrap_or_else(|| PathBuf::from("reports"));
        let format = cli_format
            .or_else(|| s.and_then(|s| s.format))
            .unwrap_or_default();
        Self { dir, format }
    }

    fn write(&self, file: &str, text: &str) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.dir)?;
        let path = self.dir.join(file);
        std::fs::write(&path, text)?;
        Ok(path)
    }

    fn write_json<T: Serialize>(&self, file: &str, value: &T) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(file, &text)
    }
}

/// Run a parsed command line and return the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let job = || -> Result<i32> {
        match cli.command {
            Command::Selftest => {
                let out = Output::resolve(cli.out.as_deref(), cli.format, None);
                selftest(&out)
            }
            Command::RegenFixtures => {
                let dir = cli.out.clone().unwrap_or_else(oracle::fixture_dir);
                for p in oracle::write_fixtures(&dir)? {
                    println!("wrote {}", p.display());
                }
                Ok(EXIT_OK)
            }
            cmd => {
                let path = cli
                    .scenario
                    .as_deref()
                    .ok_or_else(|| Error::InvalidInput("--scenario is required".into()))?;
                let scenario = Scenario::load(path)?;
                let stem = scenario
                    .name
                    .clone()
                    .or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()))
                    .unwrap_or_else(|| "scenario".into());
                let out = Output::resolve(cli.out.as_deref(), cli.format, Some(&scenario));
                match cmd {
                    Command::Integrate => run_integrate(&scenario, &stem, &out),
                    Command::Compare => run_compare(&scenario, &stem, &out).map(|(code, _)| code),
                    _ => run_convergence(&scenario, &stem, &out),
                }
            }
        }
    };
    let outcome = match cli.threads {
        Some(0) => Err(Error::InvalidInput("--threads must be positive".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(job),
            Err(e) => Err(Error::InvalidInput(format!(
                "cannot start {n} threads: {e}"
            ))),
        },
        None => job(),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}

/// Parse arguments and run. Argument errors exit with 1, not clap's 2,
/// which is reserved for non-convergence.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            }
        }
    }
}

/// Write one report per requested integrator.
pub fn run_integrate(s: &Scenario, stem: &str, out: &Output) -> Result<i32> {
    let f = s.prepare()?;
    let hash = s.hash();
    let mut code = EXIT_OK;
    for &method in &s.integrators {
        let report = match integrate(method, &f, &s.domain, &s.tolerances) {
            Ok(r) => IntegrateReport {
                method,
                status: "ok",
                result: Some(r),
                error: None,
                trace: Vec::new(),
            },
            Err(Error::NoConvergence { method, trace }) => {
                code = code.max(EXIT_NO_CONVERGENCE);
                IntegrateReport {
                    method,
                    status: "no_convergence",
                    result: None,
                    error: Some(format!("{method:?} integral did not converge")),
                    trace,
                }
            }
            Err(Error::Unsupported(what)) => IntegrateReport {
                method,
                status: "unsupported",
                result: None,
                error: Some(what),
                trace: Vec::new(),
            },
            Err(e) => return Err(e),
        };
        let file = format!("{stem}.{}", method.name());
        if out.format.json() {
            let env = Envelope {
                command: "integrate",
                version: VERSION,
                scenario: stem,
                scenario_hash: &hash,
                report: &report,
            };
            out.write_json(&format!("{file}.json"), &env)?;
        }
        if out.format.csv() {
            let trace = report
                .result
                .as_ref()
                .map_or(report.trace.as_slice(), |r| r.trace.as_slice());
            out.write(&format!("{file}.trace.csv"), &trace_csv([trace]))?;
        }
        match &report.result {
            Some(r) => println!(
                "{}: estimate {:e}, {} vertices",
                method.name(),
                r.error_estimate,
                r.value.vertex_count()
            ),
            None => println!("{}: {}", method.name(), report.status),
        }
    }
    Ok(code)
}

/// Cross-check the requested integrators and write the comparison report.
pub fn run_compare(s: &Scenario, stem: &str, out: &Output) -> Result<(i32, ComparisonReport)> {
    let f = s.prepare()?;
    let report = compare_methods(&f, &s.domain, &s.tolerances, &s.integrators)?;
    write_comparison(&report, stem, &s.hash(), out)?;
    for v in &report.violations {
        println!("VIOLATION {}: {}", v.kind, v.detail);
    }
    let code = if report.has_violation() {
        EXIT_VIOLATION
    } else if report.non_converged() {
        EXIT_NO_CONVERGENCE
    } else {
        EXIT_OK
    };
    Ok((code, report))
}

fn write_comparison(report: &ComparisonReport, stem: &str, hash: &str, out: &Output) -> Result<()> {
    if out.format.json() {
        let env = Envelope {
            command: "compare",
            version: VERSION,
            scenario: stem,
            scenario_hash: hash,
            report,
        };
        out.write_json(&format!("{stem}.compare.json"), &env)?;
    }
    if out.format.csv() {
        let mut csv = String::from("a,b,distance,combined_estimate,violation\n");
        for p in &report.pairs {
            let _ = writeln!(
                csv,
                "{},{},{:e},{:e},{}",
                p.a.name(),
                p.b.name(),
                p.distance,
                p.combined_estimate,
                p.violation
            );
        }
        out.write(&format!("{stem}.compare.csv"), &csv)?;
        let traces = report
            .outcomes
            .iter()
            .filter_map(|o| o.result.as_ref())
            .map(|r| r.trace.as_slice());
        out.write(&format!("{stem}.compare.trace.csv"), &trace_csv(traces))?;
    }
    Ok(())
}

/// Sweep each integrator's refinement parameter and write one row per
/// level, with the distance to the oracle where one exists.
pub fn run_convergence(s: &Scenario, stem: &str, out: &Output) -> Result<i32> {
    let f = s.prepare()?;
    let oracle = match oracle::oracle_integral(&f, &s.domain) {
        Ok(o) => Some(o),
        Err(Error::OracleUnavailable(_)) => None,
        Err(e) => return Err(e),
    };
    let (rows, code) = convergence_rows(&f, s, oracle.as_ref())?;
    let hash = s.hash();
    if out.format.json() {
        let env = Envelope {
            command: "convergence",
            version: VERSION,
            scenario: stem,
            scenario_hash: &hash,
            report: &rows,
        };
        out.write_json(&format!("{stem}.convergence.json"), &env)?;
    }
    if out.format.csv() {
        out.write(&format!("{stem}.convergence.csv"), &convergence_csv(&rows))?;
    }
    println!("{} rows", rows.len());
    Ok(code)
}

/// The rows of a convergence sweep, and 2 if some run did not converge.
pub fn convergence_rows(
    f: &Multifunction,
    s: &Scenario,
    oracle: Option<&OracleResult>,
) -> Result<(Vec<ConvergenceRow>, i32)> {
    let gap = |body: Option<&crate::geometry::ConvexBody>| -> Result<Option<f64>> {
        match (body, oracle) {
            (Some(b), Some(o)) => oracle_sup_distance(b, o).map(Some),
            _ => Ok(None),
        }
    };
    let mut rows = Vec::new();
    let mut code = EXIT_OK;
    for &method in &s.integrators {
        match method {
            Method::McShane | Method::Birkhoff => {
                let trace = match integrate(method, f, &s.domain, &s.tolerances) {
                    Ok(r) => r.trace,
                    Err(Error::NoConvergence { trace, .. }) => {
                        code = EXIT_NO_CONVERGENCE;
                        trace
                    }
                    Err(e) => return Err(e),
                };
                for e in &trace {
                    rows.push(ConvergenceRow {
                        method,
                        refinement_param: e.refinement_param,
                        h_to_previous: e.h_to_previous,
                        error_estimate: e.error_estimate,
                        evals: e.evals,
                        h_to_oracle: gap(e.value.as_ref())?,
                    });
                }
            }
            Method::Pettis | Method::Aumann => {
                let ms = direction_counts(f.dim(), s);
                let mut previous: Option<crate::geometry::ConvexBody> = None;
                for m in ms {
                    let tol = Tolerances {
                        m,
                        ..s.tolerances.clone()
                    };
                    match integrate(method, f, &s.domain, &tol) {
                        Ok(r) => {
                            let h_prev = previous
                                .as_ref()
                                .map(|p| hausdorff_distance(p, &r.value))
                                .transpose()?;
                            rows.push(ConvergenceRow {
                                method,
                                refinement_param: m as f64,
                                h_to_previous: h_prev,
                                error_estimate: r.error_estimate,
                                evals: r.budget_used,
                                h_to_oracle: gap(Some(&r.value))?,
                            });
                            previous = Some(r.value);
                        }
                        Err(Error::NoConvergence { .. }) => code = EXIT_NO_CONVERGENCE,
                        Err(Error::Unsupported(_)) => break,
                        Err(e) => return Err(e),
                    }
                }
            }
        }
    }
    Ok((rows, code))
}

fn direction_counts(dim: usize, s: &Scenario) -> Vec<usize> {
    if dim == 1 {
        return vec![2];
    }
    match s.sweep.as_ref().filter(|w| !w.m_values.is_empty()) {
        Some(w) => w.m_values.clone(),
        None => {
            let mut ms = Vec::new();
            let mut m = 4;
            while m < s.tolerances.m {
                ms.push(m);
                m *= 2;
            }
            ms.push(s.tolerances.m);
            ms
        }
    }
}

pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let opt = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
    let mut out =
        String::from("method,refinement_param,h_to_previous,error_estimate,evals,h_to_oracle\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{:e},{},{}",
            r.method.name(),
            r.refinement_param,
            opt(r.h_to_previous),
            r.error_estimate,
            r.evals,
            opt(r.h_to_oracle)
        );
    }
    out
}

/// Per-entry verdict of the selftest.
#[derive(Clone, Debug, Serialize)]
pub struct SelftestEntry {
    pub entry: String,
    pub violations: usize,
    pub non_converged: bool,
    /// (method, oracle distance, error estimate plus oracle error).
    pub oracle_checks: Vec<(Method, f64, f64)>,
    pub fixture: &'static str,
    pub pass: bool,
}

/// The scenarios the selftest runs: every standard catalog entry over
/// [0, 1] with fixed tolerances and seed.
pub fn selftest_scenarios() -> Vec<Scenario> {
    standard_specs()
        .into_iter()
        .map(|spec| Scenario {
            name: Some(spec.name().to_string()),
            multifunction: serde_json::to_value(&spec).expect("catalog specs serialize"),
            domain: IntervalSet::unit(),
            integrators: all_methods(),
            tolerances: Tolerances::new(1e-3, 64, 8, SELFTEST_SEED),
            out: None,
            format: None,
            sweep: None,
        })
        .collect()
}

/// Compare all four integrators on every standard entry and check each
/// result against the oracle fixture.
pub fn selftest(out: &Output) -> Result<i32> {
    let dir = Output {
        dir: out.dir.join("selftest"),
        format: out.format,
    };
    let fixtures = oracle::fixture_dir();
    let mut entries = Vec::new();
    for s in selftest_scenarios() {
        let stem = s.name.clone().expect("selftest scenarios are named");
        let f = s.prepare()?;
        let report = compare_methods(&f, &s.domain, &s.tolerances, &s.integrators)?;
        write_comparison(&report, &stem, &s.hash(), &dir)?;
        let (o, fixture) = match oracle::load_fixture(&fixtures, &stem) {
            Ok(fx) if fx.hash_is_current() && fx.params == *f.spec() => (fx.oracle, "loaded"),
            Ok(_) => (oracle::oracle_integral(&f, &s.domain)?, "stale, recomputed"),
            Err(_) => (
                oracle::oracle_integral(&f, &s.domain)?,
                "missing, recomputed",
            ),
        };
        let mut checks = Vec::new();
        for r in report.outcomes.iter().filter_map(|o| o.result.as_ref()) {
            checks.push((r.method, oracle_distance(r, &o)?, r.error_estimate));
        }
        // The oracle's own error bar is added to each allowance.
        for c in &mut checks {
            c.2 += o.per_direction_error;
        }
        let pass =
            !report.has_violation() && !report.non_converged() && checks.iter().all(|c| c.1 <= c.2);
        entries.push(SelftestEntry {
            entry: stem,
            violations: report.violations.len(),
            non_converged: report.non_converged(),
            oracle_checks: checks,
            fixture,
            pass,
        });
    }
    for e in &entries {
        let worst = e.oracle_checks.iter().map(|c| c.1).fold(0.0, f64::max);
        println!(
            "{} {}: oracle distance {worst:e}",
            if e.pass { "PASS" } else { "FAIL" },
            e.entry
        );
    }
    let hash = hex(&Sha256::digest(
        serde_json::to_string(&selftest_scenarios())?.as_bytes(),
    ));
    let env = Envelope {
        command: "selftest",
        version: VERSION,
        scenario: "selftest",
        scenario_hash: &hash,
        report: &entries,
    };
    dir.write_json("summary.json", &env)?;
    Ok(if entries.iter().all(|e| e.pass) {
        EXIT_OK
    } else if entries
        .iter()
        .any(|e| e.violations > 0 || e.oracle_checks.iter().any(|c| c.1 > c.2))
    {
        EXIT_VIOLATION
    } else {
        EXIT_NO_CONVERGENCE
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(text: &str) -> Result<Scenario> {
        Scenario::parse(text, "test.json")
    }

    #[test]
    fn malformed_json_reports_position() {
        let e = scenario("{\n  \"multifunction\": {\"name\": \"segment_growth\"},\n  oops\n}")
            .unwrap_err();
        assert!(e.to_string().contains("test.json:3:"), "{e}");
    }

    #[test]
    fn seed_is_mandatory() {
        let e = scenario(
            r#"{"multifunction": {"name": "segment_growth"}, "tolerances": {"epsilon": 0.001}}"#,
        )
        .unwrap_err();
        assert!(e.to_string().contains("seed"), "{e}");
    }

    #[test]
    fn unknown_entry_names_the_field() {
        let s = scenario(
            r#"{"multifunction": {"name": "spiral"}, "tolerances": {"epsilon": 0.001, "seed": 1}}"#,
        )
        .unwrap();
        let e = s.prepare().unwrap_err().to_string();
        assert!(
            e.contains("multifunction.name") && e.contains("spiral"),
            "{e}"
        );
    }

    #[test]
    fn empty_integrator_list_rejected() {
        let s = scenario(
            r#"{"multifunction": {"name": "segment_growth"}, "integrators": [], "tolerances": {"epsilon": 0.001, "seed": 1}}"#,
        )
        .unwrap();
        assert!(s.prepare().unwrap_err().to_string().contains("integrators"));
    }

    #[test]
    fn hash_ignores_whitespace_and_key_order() {
        let a = scenario(r#"{"multifunction": {"name": "segment_growth"}, "tolerances": {"epsilon": 0.001, "seed": 1}}"#).unwrap();
        let b = scenario("{\"tolerances\": {\"seed\": 1, \"epsilon\": 0.001},\n \"multifunction\": {\"name\": \"segment_growth\"}}").unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn default_sweep_doubles_to_m() {
        let s = scenario(r#"{"multifunction": {"name": "scaled_disk"}, "tolerances": {"epsilon": 0.001, "seed": 1, "m": 40}}"#).unwrap();
        assert_eq!(direction_counts(2, &s), vec![4, 8, 16, 32, 40]);
        assert_eq!(direction_counts(1, &s), vec![2]);
    }
}
