//! Bound suites over instance streams, outcome classification and report files.
//!
//! Instances are evaluated in parallel chunks; results are folded in instance
//! order, so report files do not depend on the thread count.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::bounds::{round_sig, BoundId, BoundReport, Evaluator, Tier, DEFAULT_TOL};
use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::generators::InstanceSource;
use crate::instance::Instance;
use crate::operator::{laplacian, LaplacianKind};
use crate::par;
use crate::spectra::{
    complement_eigen_check, graph_spectrum, multiset_distance, spectrum, SpectrumSummary,
};

pub const TOL_ENV: &str = "LB_TOL";

/// Instances handed to the thread pool at a time.
const CHUNK: usize = 4096;

/// `LB_TOL` if set, otherwise [`DEFAULT_TOL`].
pub fn tolerance_from_env() -> Result<f64> {
    match std::env::var(TOL_ENV) {
        Ok(v) => match v.trim().parse::<f64>() {
            Ok(t) if t >= 0.0 && t.is_finite() => Ok(t),
            _ => Err(Error::MalformedInput(format!(
                "{TOL_ENV} must be a nonnegative number, got `{v}`"
            ))),
        },
        Err(_) => Ok(DEFAULT_TOL),
    }
}

/// Which `k` to evaluate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KSpec {
    /// Each id's own valid range.
    PaperValid,
    /// Inclusive range; `hi == None` means `n` (the vertex count).
    Range {
        lo: usize,
        hi: Option<usize>,
    },
    List(Vec<usize>),
}

impl FromStr for KSpec {
    type Err = Error;

    /// `paper-valid`, `a..b` (inclusive, `b` may be `n`), or `1,2,5`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::MalformedInput(format!("bad k spec `{s}`"));
        if s == "paper-valid" {
            return Ok(KSpec::PaperValid);
        }
        if let Some((a, b)) = s.split_once("..") {
            let lo = a.trim().parse().map_err(|_| bad())?;
            let b = b.trim().trim_start_matches('=');
            let hi = if b == "n" {
                None
            } else {
                Some(b.parse().map_err(|_| bad())?)
            };
            return Ok(KSpec::Range { lo, hi });
        }
        let list: Vec<usize> = s
            .split(',')
            .map(|t| t.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        if list.is_empty() {
            return Err(bad());
        }
        Ok(KSpec::List(list))
    }
}

impl KSpec {
    fn values(&self, n: usize, valid: &std::ops::RangeInclusive<usize>) -> Vec<usize> {
        match self {
            KSpec::PaperValid => valid.clone().collect(),
            KSpec::Range { lo, hi } => (*lo..=hi.unwrap_or(n)).collect(),
            KSpec::List(v) => v.clone(),
        }
    }
}

/// Which `r` to evaluate: every `1..=max(1, dim)` or an explicit list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RSpec {
    All,
    List(Vec<usize>),
}

impl FromStr for RSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "all" {
            return Ok(RSpec::All);
        }
        let list: Vec<usize> = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse()
                    .map_err(|_| Error::MalformedInput(format!("bad r spec `{s}`")))
            })
            .collect::<Result<_>>()?;
        Ok(RSpec::List(list))
    }
}

impl RSpec {
    fn values(&self, x: &SimplicialComplex) -> Vec<usize> {
        match self {
            RSpec::All => (1..=x.dim().max(1) as usize).collect(),
            RSpec::List(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub bounds: Vec<BoundId>,
    pub k: KSpec,
    pub r: RSpec,
    pub tol: f64,
    /// Worker threads; `None` uses the rayon default.
    pub threads: Option<usize>,
    /// Treat inapplicable `(id, r, k)` combinations as errors.
    pub strict: bool,
    pub connected_only: bool,
    /// Only reports with `slack <= min_slack` go to `reports.jsonl`.
    pub min_slack: Option<f64>,
    /// Size of the per-id smallest-slack leaderboard.
    pub leaderboard: usize,
    /// Directory receiving `reports.jsonl`, `summary.csv` and `violations.jsonl`.
    pub out_dir: Option<PathBuf>,
    /// Write `reports.jsonl` (can be large for exhaustive runs).
    pub write_reports: bool,
}

impl SuiteConfig {
    pub fn new(bounds: Vec<BoundId>) -> Self {
        SuiteConfig {
            bounds,
            k: KSpec::PaperValid,
            r: RSpec::All,
            tol: DEFAULT_TOL,
            threads: None,
            strict: false,
            connected_only: false,
            min_slack: None,
            leaderboard: 10,
            out_dir: None,
            write_reports: true,
        }
    }
}

/// One CSV summary row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundSummary {
    pub bound_id: BoundId,
    pub instances: usize,
    pub min_slack: Option<f64>,
    pub argmin_instance: Option<String>,
    pub violations: usize,
}

#[derive(Clone, Debug, Default)]
pub struct RunSummary {
    pub instances: usize,
    /// Instances skipped by `connected_only`.
    pub skipped: usize,
    pub reports: usize,
    pub theorem_violations: Vec<BoundReport>,
    pub conjecture_violations: Vec<BoundReport>,
    /// Per id, the smallest-slack reports (ascending, earliest first on ties).
    pub leaderboard: Vec<(BoundId, Vec<BoundReport>)>,
    pub per_bound: Vec<BoundSummary>,
    /// Failures other than inapplicability (internal checks, degenerate input).
    pub errors: Vec<String>,
    /// Inapplicable combinations, collected only in strict mode.
    pub strict_errors: Vec<String>,
    pub wall_time: Duration,
}

impl RunSummary {
    /// 0 clean, 1 theorem-tier violation or internal error, 2 strict-mode
    /// usage error, 3 conjecture-tier violation.
    pub fn exit_code(&self) -> i32 {
        classify(
            !self.theorem_violations.is_empty() || !self.errors.is_empty(),
            !self.strict_errors.is_empty(),
            !self.conjecture_violations.is_empty(),
        )
    }

    pub fn leaders(&self, id: BoundId) -> &[BoundReport] {
        self.leaderboard
            .iter()
            .find(|(b, _)| *b == id)
            .map_or(&[], |(_, v)| v.as_slice())
    }

    pub fn bound(&self, id: BoundId) -> Option<&BoundSummary> {
        self.per_bound.iter().find(|b| b.bound_id == id)
    }
}

fn classify(failure: bool, strict: bool, conjecture: bool) -> i32 {
    if failure {
        1
    } else if strict {
        2
    } else if conjecture {
        3
    } else {
        0
    }
}

/// Everything one instance produced under a config.
#[derive(Clone, Debug, Default)]
pub struct InstanceOutcome {
    /// Dropped by `connected_only`.
    pub skipped: bool,
    pub reports: Vec<BoundReport>,
    pub errors: Vec<String>,
    pub strict_errors: Vec<String>,
}

impl InstanceOutcome {
    /// Same contract as [`RunSummary::exit_code`].
    pub fn exit_code(&self) -> i32 {
        let failed = |t: Tier| self.reports.iter().any(|r| !r.holds && (r.tier == t));
        classify(
            failed(Tier::Theorem) || failed(Tier::LemmaGadget) || !self.errors.is_empty(),
            !self.strict_errors.is_empty(),
            failed(Tier::Conjecture),
        )
    }
}

/// Evaluates every configured `(id, r, k)` on one instance.
pub fn evaluate_instance(cfg: &SuiteConfig, inst: &Instance) -> InstanceOutcome {
    let mut out = InstanceOutcome {
        skipped: false,
        reports: Vec::new(),
        errors: Vec::new(),
        strict_errors: Vec::new(),
    };
    if cfg.connected_only && !inst.complex.is_connected() {
        out.skipped = true;
        return out;
    }
    let ev = Evaluator::new(inst, cfg.tol);
    let n = inst.complex.n_vertices();
    for id in &cfg.bounds {
        for r in cfg.r.values(&inst.complex) {
            let ks = match ev.k_range(*id, r) {
                Ok(range) => cfg.k.values(n, &range),
                Err(e) => {
                    if cfg.strict {
                        out.strict_errors.push(format!("{}: {e}", inst.id));
                    }
                    continue;
                }
            };
            for k in ks {
                match ev.evaluate(*id, r, k) {
                    Ok(rep) => out.reports.push(rep),
                    Err(e @ (Error::Inapplicable { .. } | Error::FamilyAssumption { .. })) => {
                        if cfg.strict {
                            out.strict_errors.push(format!("{}: {e}", inst.id));
                        }
                    }
                    Err(e) => out
                        .errors
                        .push(format!("{} {id} r={r} k={k}: {e}", inst.id)),
                }
            }
        }
    }
    out
}

struct Writers {
    reports: Option<BufWriter<File>>,
    violations: Option<BufWriter<File>>,
}

fn jsonl<T: Serialize>(w: &mut BufWriter<File>, v: &T) -> Result<()> {
    serde_json::to_writer(&mut *w, v)?;
    w.write_all(b"\n")?;
    Ok(())
}

/// Runs every configured `(id, r, k)` on every instance of `source`.
pub fn run_suite(cfg: &SuiteConfig, source: &dyn InstanceSource) -> Result<RunSummary> {
    let start = Instant::now();
    let mut writers = Writers {
        reports: None,
        violations: None,
    };
    if let Some(dir) = &cfg.out_dir {
        std::fs::create_dir_all(dir)?;
        if cfg.write_reports {
            writers.reports = Some(BufWriter::new(File::create(dir.join("reports.jsonl"))?));
        }
        writers.violations = Some(BufWriter::new(File::create(dir.join("violations.jsonl"))?));
    }
    let mut summary = RunSummary {
        leaderboard: cfg.bounds.iter().map(|b| (*b, Vec::new())).collect(),
        per_bound: cfg
            .bounds
            .iter()
            .map(|b| BoundSummary {
                bound_id: *b,
                instances: 0,
                min_slack: None,
                argmin_instance: None,
                violations: 0,
            })
            .collect(),
        ..RunSummary::default()
    };
    let total = source.len();
    par::install(cfg.threads, || -> Result<()> {
        let mut begin = 0;
        while begin < total {
            let len = CHUNK.min(total - begin);
            let outcomes =
                par::map_indexed(len, |j| evaluate_instance(cfg, &source.instance(begin + j)));
            for o in outcomes {
                fold(cfg, &mut summary, &mut writers, o)?;
            }
            begin += len;
        }
        Ok(())
    })?;
    if let Some(w) = writers.reports.as_mut() {
        w.flush()?;
    }
    if let Some(w) = writers.violations.as_mut() {
        w.flush()?;
    }
    if let Some(dir) = &cfg.out_dir {
        write_summary_csv(&dir.join("summary.csv"), &summary.per_bound)?;
    }
    summary.wall_time = start.elapsed();
    Ok(summary)
}

fn fold(cfg: &SuiteConfig, s: &mut RunSummary, w: &mut Writers, o: InstanceOutcome) -> Result<()> {
    if o.skipped {
        s.skipped += 1;
        return Ok(());
    }
    s.instances += 1;
    s.errors.extend(o.errors);
    s.strict_errors.extend(o.strict_errors);
    let mut seen: Vec<BoundId> = Vec::new();
    for rep in o.reports {
        s.reports += 1;
        let slot = cfg
            .bounds
            .iter()
            .position(|b| *b == rep.bound_id)
            .expect("configured id");
        if !seen.contains(&rep.bound_id) {
            seen.push(rep.bound_id);
            s.per_bound[slot].instances += 1;
        }
        let agg = &mut s.per_bound[slot];
        if agg.min_slack.is_none_or(|m| rep.slack < m) {
            agg.min_slack = Some(rep.slack);
            agg.argmin_instance = Some(rep.instance_id.clone());
        }
        let board = &mut s.leaderboard[slot].1;
        if cfg.leaderboard > 0
            && (board.len() < cfg.leaderboard || rep.slack < board.last().unwrap().slack)
        {
            let at = board.partition_point(|b| b.slack <= rep.slack);
            board.insert(at, rep.clone());
            board.truncate(cfg.leaderboard);
        }
        if let Some(f) = w.reports.as_mut() {
            if cfg.min_slack.is_none_or(|m| rep.slack <= m) {
                jsonl(f, &rep)?;
            }
        }
        if !rep.holds {
            agg.violations += 1;
            if let Some(f) = w.violations.as_mut() {
                jsonl(f, &rep)?;
            }
            match rep.tier {
                Tier::Conjecture => s.conjecture_violations.push(rep),
                Tier::Theorem | Tier::LemmaGadget => s.theorem_violations.push(rep),
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct CsvRow<'a> {
    bound_id: String,
    instances: usize,
    min_slack: Option<f64>,
    argmin_instance: Option<&'a str>,
    violations: usize,
}

pub fn write_summary_csv(path: &Path, rows: &[BoundSummary]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.into()))?;
    for r in rows {
        w.serialize(CsvRow {
            bound_id: r.bound_id.name(),
            instances: r.instances,
            min_slack: r.min_slack.map(|v| round_sig(v, 12)),
            argmin_instance: r.argmin_instance.as_deref(),
            violations: r.violations,
        })
        .map_err(|e| Error::Io(e.into()))?;
    }
    w.flush()?;
    Ok(())
}

/// The smallest-slack instances for one id.
pub fn min_slack_search(
    cfg: &SuiteConfig,
    source: &dyn InstanceSource,
    id: BoundId,
    connected_only: bool,
) -> Result<Vec<BoundReport>> {
    let mut c = cfg.clone();
    c.bounds = vec![id];
    c.connected_only = connected_only;
    let s = run_suite(&c, source)?;
    if let Some(e) = s.errors.first() {
        return Err(Error::Internal(e.clone()));
    }
    Ok(s.leaders(id).to_vec())
}

/// Residual of one spectral identity on one instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityResidual {
    pub identity: String,
    pub instance_id: String,
    pub residual: f64,
    pub tier: Tier,
    pub holds: bool,
}

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn upper_spectrum(x: &SimplicialComplex, kind: LaplacianKind, r: usize) -> Result<SpectrumSummary> {
    spectrum(&laplacian(x, kind, r)?)
}

/// Fresh labels for cone vertices.
fn fresh_labels(x: &SimplicialComplex, m: usize) -> Vec<u32> {
    let base = x.labels().iter().max().map_or(0, |v| v + 1);
    (base..base + m as u32).collect()
}

/// Spectrum of a disjoint union versus the union of component spectra.
fn components_residual(g: &SimplicialComplex) -> Result<f64> {
    let whole = graph_spectrum(g)?;
    let mut parts = Vec::new();
    for comp in g.components() {
        parts.extend_from_slice(graph_spectrum(&g.induced_subcomplex(&comp)?)?.eigenvalues());
    }
    Ok(multiset_distance(whole.eigenvalues(), &sorted_desc(parts)))
}

/// `L^+` and `L^-` (and the signless pair) share nonzero spectra for `1 <= r <= dim`.
fn lminus_residual(x: &SimplicialComplex) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for r in 1..=x.dim().max(0) as usize {
        for (up, down) in [
            (LaplacianKind::Upper, LaplacianKind::Lower),
            (LaplacianKind::SignlessUpper, LaplacianKind::SignlessLower),
        ] {
            let a = upper_spectrum(x, up, r)?.nonzero();
            let b = spectrum(&laplacian(x, down, r)?)?.nonzero();
            worst = worst.max(multiset_distance(&a, &b));
        }
    }
    Ok(worst)
}

/// Nonzero spectrum of `L^+_{r-1+|σ|}(X * σ)` versus `spec L^-_r(X) + |σ|` with `r = dim X`.
fn coning_residual(x: &SimplicialComplex, m: usize) -> Result<f64> {
    let r = x.dim() as usize;
    let y = x.join_cone(&fresh_labels(x, m))?;
    let lhs = upper_spectrum(&y, LaplacianKind::Upper, r + m)?.nonzero();
    let shifted: Vec<f64> = spectrum(&laplacian(x, LaplacianKind::Lower, r)?)?
        .eigenvalues()
        .iter()
        .map(|l| l + m as f64)
        .collect();
    Ok(multiset_distance(&lhs, &sorted_desc(shifted)))
}

/// `Σ_{i<=k} λ_i(L^+_{r-1}(G * σ)) = f_r(Y) + ε_k(G) + (r-1)k` with `|σ| = r - 1`.
fn extremal_cone_residual(g: &SimplicialComplex, r: usize) -> Result<f64> {
    let y = g.join_cone(&fresh_labels(g, r - 1))?;
    let sy = upper_spectrum(&y, LaplacianKind::Upper, r)?;
    let sg = graph_spectrum(g)?;
    let e = g.edge_count();
    let fr = y.f(r as isize) as f64;
    let mut worst: f64 = 0.0;
    for k in 1..=g.n_vertices().min(e) {
        let eps = sg.top_k_sum(k)? - e as f64;
        let rhs = fr + eps + ((r - 1) * k) as f64;
        worst = worst.max((sy.top_k_sum(k)? - rhs).abs());
    }
    Ok(worst)
}

/// Every identity that applies to `inst`, with its residual.
///
/// Graphs get the component, complement and cone identities; complexes of
/// dimension at least 1 get the `L^+`/`L^-` and coning checks.
pub fn check_identities(inst: &Instance, tol: f64) -> Result<Vec<IdentityResidual>> {
    let x = &inst.complex;
    let mut out = Vec::new();
    let mut push = |name: &str, residual: f64| {
        out.push(IdentityResidual {
            identity: name.to_string(),
            instance_id: inst.id.clone(),
            residual,
            tier: Tier::Theorem,
            holds: residual <= tol,
        });
    };
    if x.is_graph() {
        push("components", components_residual(x)?);
        if x.n_vertices() >= 2 {
            let c = complement_eigen_check(x)?;
            push("complement", c.eigen_residual);
            push("complement_eps", c.eps_residual);
        }
    }
    if x.dim() >= 1 {
        push("lminus_l", lminus_residual(x)?);
        for m in 1..=3 {
            push(&format!("coning:{m}"), coning_residual(x, m)?);
        }
        if x.is_graph() {
            for r in 2..=4 {
                push(
                    &format!("extremal_cone:r={r}"),
                    extremal_cone_residual(x, r)?,
                );
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_star_forest, InstanceStream};

    #[test]
    fn kspec_parsing() {
        assert_eq!("paper-valid".parse::<KSpec>().unwrap(), KSpec::PaperValid);
        assert_eq!(
            "1..4".parse::<KSpec>().unwrap(),
            KSpec::Range { lo: 1, hi: Some(4) }
        );
        assert_eq!(
            "1..n".parse::<KSpec>().unwrap(),
            KSpec::Range { lo: 1, hi: None }
        );
        assert_eq!("2,3".parse::<KSpec>().unwrap(), KSpec::List(vec![2, 3]));
        assert!("x".parse::<KSpec>().is_err());
        assert_eq!("all".parse::<RSpec>().unwrap(), RSpec::All);
    }

    #[test]
    fn small_exhaustive_run() {
        let s = InstanceStream::from_descriptor("enumerate:n=5").unwrap();
        let mut cfg = SuiteConfig::new(BoundId::parse_list("k_squared,bai,main_plus_bai").unwrap());
        cfg.k = "1..4".parse().unwrap();
        let sum = run_suite(&cfg, &s).unwrap();
        assert_eq!(sum.instances, 1024);
        assert_eq!(sum.exit_code(), 0, "{:?}", sum.errors);
        assert!(sum.reports > 0);
    }

    #[test]
    fn identities_on_k2() {
        let inst = Instance::new("k2", SimplicialComplex::graph(&[0, 1], &[(0, 1)]).unwrap());
        let ids = check_identities(&inst, 1e-8).unwrap();
        assert!(ids.iter().all(|r| r.holds), "{ids:?}");
        assert!(ids.iter().any(|r| r.identity == "coning:1"));
    }

    #[test]
    fn identities_on_star_forest() {
        let inst = Instance::new("sf", gen_star_forest(&[3, 3]).unwrap());
        let ids = check_identities(&inst, 1e-8).unwrap();
        assert!(ids.iter().all(|r| r.holds), "{ids:?}");
    }
}
