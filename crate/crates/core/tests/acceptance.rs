//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! `LB_ACCEPT_QUICK=1` runs the exhaustive theorem sweep on 6 vertices
//! instead of 7.

mod common;

use std::time::Instant;

use lapbounds::bounds::gadgets::{
    admissible_subset, gadget_la, gadget_la_exact, gadget_lprime, lower_laplacian_exact,
};
use lapbounds::generators::{
    gen_brouwer_equality, gen_complete_partite_complex, gen_matching_complex, gen_path,
    gen_random_complex, gen_random_graph, gen_star_forest, InstanceList, InstanceSource,
    InstanceStream,
};
use lapbounds::harness::{check_identities, run_suite, KSpec, RSpec, RunSummary, SuiteConfig};
use lapbounds::{
    boundary_matrix, evaluate_bound, laplacian, BoundId, Error, Face, Instance, LaplacianKind,
    PartiteStructure, SimplicialComplex,
};
use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

fn lib<T>(r: lapbounds::Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn ids(names: &[&str]) -> Vec<BoundId> {
    names.iter().map(|n| n.parse().unwrap()).collect()
}

fn quick() -> bool {
    std::env::var("LB_ACCEPT_QUICK").is_ok_and(|v| v == "1")
}

fn sweep(
    cfg: &SuiteConfig,
    source: &dyn InstanceSource,
) -> std::result::Result<RunSummary, String> {
    let s = lib(run_suite(cfg, source))?;
    ensure!(
        s.errors.is_empty(),
        "{} errors, first: {}",
        s.errors.len(),
        s.errors[0]
    );
    Ok(s)
}

fn random_complex(rng: &mut ChaCha8Rng, i: u64, max_n: usize) -> SimplicialComplex {
    let n = rng.random_range(2..=max_n);
    let r = rng.random_range(1..=3.min(n - 1));
    let p = [0.3, 0.6, 1.0][i as usize % 3];
    gen_random_complex(n, r, p, 11, i).unwrap()
}

fn relabel(x: &SimplicialComplex, rng: &mut ChaCha8Rng) -> SimplicialComplex {
    let mut order = x.labels().to_vec();
    order.shuffle(rng);
    x.with_vertex_order(&order).unwrap()
}

fn structural() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_pair: f64 = 0.0;
    let mut worst_relabel: f64 = 0.0;
    for i in 0..200 {
        let x = random_complex(&mut rng, i, 8);
        for r in 1..=x.dim() as usize {
            let b = lib(boundary_matrix(&x, r, true))?;
            if r >= 2 {
                let b0 = lib(boundary_matrix(&x, r - 1, true))?;
                let prod = &b0.entries * &b.entries;
                ensure!(
                    prod.iter().all(|v| *v == 0.0),
                    "complex {i}: B_{}B_{r} != 0",
                    r - 1
                );
            }
            let up = lib(laplacian(&x, LaplacianKind::Upper, r))?;
            ensure!(
                up.entries == &b.entries * b.entries.transpose(),
                "complex {i}: L+ != BB^T at r={r}"
            );
            ensure!(
                up.entries.nrows() == common::upper(&x, r, true).nrows(),
                "complex {i}: face count mismatch"
            );

            for (u, l, signed) in [
                (LaplacianKind::Upper, LaplacianKind::Lower, true),
                (
                    LaplacianKind::SignlessUpper,
                    LaplacianKind::SignlessLower,
                    false,
                ),
            ] {
                let su = common::eig_desc(&lib(laplacian(&x, u, r))?.entries);
                let sl = common::eig_desc(&lib(laplacian(&x, l, r))?.entries);
                worst_pair = worst_pair.max(common::max_diff(
                    &common::nonzero(&su),
                    &common::nonzero(&sl),
                ));
                // Reference operator from the naive face lists.
                let oracle = common::eig_desc(&common::upper(&x, r, signed));
                worst_pair = worst_pair.max(common::max_diff(&su, &oracle));
            }
            let base = common::eig_desc(&lib(laplacian(&x, LaplacianKind::Upper, r))?.entries);
            for _ in 0..5 {
                let y = relabel(&x, &mut rng);
                let s = common::eig_desc(&lib(laplacian(&y, LaplacianKind::Upper, r))?.entries);
                worst_relabel = worst_relabel.max(common::max_diff(&base, &s));
            }
        }
    }
    ensure!(
        worst_pair <= 1e-8,
        "L+/L- nonzero spectra differ by {worst_pair:e}"
    );
    ensure!(
        worst_relabel <= 1e-9,
        "relabeling moved the spectrum by {worst_relabel:e}"
    );
    Ok(format!(
        "200 complexes, max spectral gap {worst_pair:.1e}, relabel drift {worst_relabel:.1e}"
    ))
}

const THEOREM_SUITE: &[&str] = &[
    "anderson_morley",
    "am_edgewise",
    "grone_merris_lower",
    "bai",
    "degree_sum_main",
    "k_squared",
    "main_plus_bai",
    "brouwer_min_binom",
    "induced_2k",
    "signless_degree_sum",
];

fn exhaustive_theorems() -> Check {
    let n = if quick() { 6 } else { 7 };
    let stream = lib(InstanceStream::from_descriptor(&format!("enumerate:n={n}")))?;
    let mut cfg = SuiteConfig::new(ids(THEOREM_SUITE));
    cfg.r = RSpec::List(vec![1]);
    let s = sweep(&cfg, &stream)?;
    ensure!(
        s.instances == 1 << (n * (n - 1) / 2),
        "saw {} graphs",
        s.instances
    );
    ensure!(
        s.theorem_violations.is_empty(),
        "{} theorem violations, first {:?}",
        s.theorem_violations.len(),
        s.theorem_violations[0]
    );
    Ok(format!(
        "n={n}, {} graphs, {} reports, 0 violations",
        s.instances, s.reports
    ))
}

fn slack(
    id: &str,
    inst: &Instance,
    r: usize,
    k: usize,
) -> std::result::Result<lapbounds::BoundReport, String> {
    lib(evaluate_bound(id.parse().unwrap(), inst, r, k, 1e-7))
}

fn equality() -> Check {
    let mut cases = 0;
    // Matching complexes: every (r-1)-face lies in exactly one r-face.
    for r in 1..=3 {
        for m in 1..=5 {
            for s in 0..r {
                let x = lib(gen_matching_complex(r, m, s))?;
                let spec = common::eig_desc(&common::upper(&x, r, true));
                let inst = Instance::new(format!("matching{r}/{m}/{s}"), x.clone());
                for k in 1..=x.f(r as isize - 1) / (r + 1) {
                    let want = ((r + 1) * k) as f64;
                    let rep = slack("degree_sum_main", &inst, r, k)?;
                    ensure!(
                        (common::top_sum(&spec, k) - want).abs() < 1e-8,
                        "matching r={r} m={m} k={k}: spectrum"
                    );
                    ensure!(
                        (rep.lhs - want).abs() < 1e-8 && (rep.rhs - want).abs() < 1e-8,
                        "matching r={r} m={m} k={k}: {rep:?}"
                    );
                    cases += 1;
                }
            }
        }
    }
    // Star forests with one eigenvalue per star.
    let mut forests = Vec::new();
    for a in 2..=4 {
        forests.push(vec![a]);
        for b in a..=4 {
            forests.push(vec![a, b]);
            for c in b..=4 {
                forests.push(vec![a, b, c]);
            }
        }
    }
    for sizes in &forests {
        let g = lib(gen_star_forest(sizes))?;
        let k = sizes.len();
        let spec = common::eig_desc(&common::graph_laplacian(
            g.n_vertices(),
            &common::graph_edges(&g),
        ));
        let want: usize = sizes.iter().sum();
        let rep = slack("degree_sum_main", &Instance::new("sf", g), 1, k)?;
        ensure!(
            (common::top_sum(&spec, k) - want as f64).abs() < 1e-8,
            "star forest {sizes:?}: spectrum"
        );
        ensure!(
            rep.slack.abs() < 1e-8,
            "star forest {sizes:?}: slack {}",
            rep.slack
        );
        cases += 1;
    }
    // K_k joined to an independent b-set.
    let mut b0 = Vec::new();
    for k in 1..=5 {
        for b in 0..=6 {
            let g = lib(gen_brouwer_equality(k, b))?;
            if k > g.n_vertices() {
                continue;
            }
            let spec = common::eig_desc(&common::graph_laplacian(
                g.n_vertices(),
                &common::graph_edges(&g),
            ));
            let eps = common::top_sum(&spec, k) - g.edge_count() as f64;
            if b == 0 {
                b0.push(format!("K{k}:{eps:.0}"));
                continue;
            }
            let want = common::binom(k + 1, 2) as f64;
            ensure!(
                (eps - want).abs() < 1e-8,
                "brouwer equality k={k} b={b}: eps {eps}"
            );
            let rep = slack("brouwer", &Instance::new("be", g), 1, k)?;
            ensure!(
                rep.slack.abs() < 1e-8,
                "brouwer equality k={k} b={b}: slack {}",
                rep.slack
            );
            cases += 1;
        }
    }
    let (x, p) = lib(gen_complete_partite_complex(1, &[2, 2]))?;
    let rep = slack(
        "partite_degree_sum",
        &Instance::new("K22", x).with_partition(p),
        1,
        1,
    )?;
    ensure!(rep.slack.abs() < 1e-8, "K22 partite slack {}", rep.slack);
    Ok(format!(
        "{} equality cases; b=0 gives eps = C(k,2): {}",
        cases + 1,
        b0.join(" ")
    ))
}

fn path_gap() -> Check {
    let mut gaps = Vec::new();
    for n in [50usize, 100, 200] {
        let rep = slack(
            "degree_sum_main",
            &Instance::new(format!("P{n}"), lib(gen_path(n))?),
            1,
            2,
        )?;
        let oracle: f64 = (1..=2)
            .map(|i| 2.0 * (1.0 - (std::f64::consts::PI * i as f64 / n as f64).cos()))
            .sum();
        ensure!(
            (rep.slack - oracle).abs() < 1e-8,
            "P{n}: gap {} vs closed form {oracle}",
            rep.slack
        );
        gaps.push(rep.slack);
    }
    ensure!(
        gaps.windows(2).all(|w| w[1] < w[0]),
        "gaps not decreasing: {gaps:?}"
    );
    ensure!(gaps[2] > 0.0 && gaps[2] < 0.01, "P200 gap {}", gaps[2]);
    Ok(format!("gaps {:.5} {:.5} {:.5}", gaps[0], gaps[1], gaps[2]))
}

fn worst(res: &[lapbounds::harness::IdentityResidual], prefix: &str) -> f64 {
    res.iter()
        .filter(|r| r.identity.starts_with(prefix))
        .map(|r| r.residual)
        .fold(0.0, f64::max)
}

fn identities() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut comp: f64 = 0.0;
    for i in 0..100 {
        let n = rng.random_range(2..=10);
        let g = lib(gen_random_graph(n, rng.random_range(0.1..0.9), 5, i))?;
        let res = lib(check_identities(&Instance::new(format!("g{i}"), g), 1e-8))?;
        comp = comp.max(worst(&res, "complement"));
    }
    let mut cone: f64 = 0.0;
    let mut ext: f64 = 0.0;
    let mut done = 0;
    let mut i = 1000;
    while done < 50 {
        i += 1;
        let n = rng.random_range(2..=8);
        let g = lib(gen_random_graph(n, rng.random_range(0.2..0.9), 5, i))?;
        if g.edge_count() == 0 {
            continue;
        }
        let res = lib(check_identities(&Instance::new(format!("g{i}"), g), 1e-8))?;
        ensure!(
            res.iter().any(|r| r.identity.starts_with("extremal_cone")),
            "no cone identities on g{i}"
        );
        cone = cone.max(worst(&res, "coning"));
        ext = ext.max(worst(&res, "extremal_cone"));
        done += 1;
    }
    ensure!(comp < 1e-8, "complement residual {comp:e}");
    ensure!(cone < 1e-8, "coning residual {cone:e}");
    ensure!(ext < 1e-8, "extremal cone residual {ext:e}");
    Ok(format!(
        "complement {comp:.1e}, coning {cone:.1e}, extremal cone {ext:.1e}"
    ))
}

/// Number of `r`-faces containing each `(r-1)`-face, by brute force.
fn oracle_degrees(x: &SimplicialComplex, r: usize) -> Vec<usize> {
    let lower = common::faces_of(x, r - 1);
    let upper = common::faces_of(x, r);
    lower
        .iter()
        .map(|s| {
            upper
                .iter()
                .filter(|t| s.iter().all(|v| t.contains(v)))
                .count()
        })
        .collect()
}

fn random_partite(
    rng: &mut ChaCha8Rng,
) -> std::result::Result<(SimplicialComplex, PartiteStructure), String> {
    let r = rng.random_range(1..=3);
    let sizes: Vec<usize> = (0..=r).map(|_| rng.random_range(1..=3)).collect();
    let (full, p) = lib(gen_complete_partite_complex(r, &sizes))?;
    if rng.random_bool(0.3) {
        return Ok((full, p));
    }
    let mut facets: Vec<Vec<u32>> = full
        .facets_labeled()
        .into_iter()
        .filter(|_| rng.random_bool(0.6))
        .collect();
    if facets.is_empty() {
        facets = full.facets_labeled()[..1].to_vec();
    }
    let x = lib(SimplicialComplex::with_vertices(full.labels(), &facets))?;
    let q = lib(PartiteStructure::from_labels(&x, p.classes()))?;
    Ok((x, q))
}

fn gadgets() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    // L_A: nonzero spectrum equals the positive degrees of A.
    let mut pairs = 0;
    let mut i = 0;
    while pairs < 100 {
        i += 1;
        let x = random_complex(&mut rng, i, 7);
        if x.dim() < 1 {
            continue;
        }
        let r = rng.random_range(1..=x.dim() as usize);
        let mut order: Vec<usize> = (0..x.f(r as isize - 1)).collect();
        order.shuffle(&mut rng);
        order.truncate(rng.random_range(1..=order.len()));
        let a = admissible_subset(&x, r, &order);
        let faces: Vec<Face> = a
            .iter()
            .map(|s| x.faces(r as isize - 1)[*s].clone())
            .collect();
        let la = lib(gadget_la(&x, r, &faces))?;
        let got = common::nonzero(&common::eig_desc(&la.entries));
        let deg = oracle_degrees(&x, r);
        let mut want: Vec<f64> = a
            .iter()
            .map(|s| deg[*s] as f64)
            .filter(|d| *d > 0.0)
            .collect();
        want.sort_by(|a, b| b.total_cmp(a));
        ensure!(
            common::max_diff(&got, &want) < 1e-8,
            "L_A on complex {i}: {got:?} vs {want:?}"
        );
        pairs += 1;
    }
    // Partite decomposition of L^-.
    for t in 0..30 {
        let (x, p) = random_partite(&mut rng)?;
        let r = x.dim() as usize;
        let mut sum = nalgebra::DMatrix::<i64>::zeros(x.f(r as isize), x.f(r as isize));
        for j in 0..p.n_classes() {
            sum += lib(gadget_la_exact(&x, r, &p.faces_avoiding(&x, r, j)))?;
        }
        let exact = lower_laplacian_exact(&x, r);
        ensure!(
            sum.map(Rational64::from_integer) == exact,
            "partite complex {t}: decomposition differs"
        );
        let oracle = common::lower(&x, r, true);
        ensure!(
            sum.map(|v| v as f64) == oracle,
            "partite complex {t}: differs from reference L-"
        );
    }
    // L' reconstruction and its top eigenvalue.
    let mut built = 0;
    let mut degenerate = 0;
    let mut i = 5000;
    while built < 100 {
        i += 1;
        let x = random_complex(&mut rng, i, 7);
        let r = rng.random_range(1..=x.dim().max(1) as usize);
        if r as isize > x.dim() {
            continue;
        }
        let kmax = x.f(r as isize - 1) / (r + 1);
        if kmax == 0 {
            continue;
        }
        let k = rng.random_range(1..=kmax);
        let lp = match gadget_lprime(&x, r, k, 1e-7) {
            Ok(lp) => lp,
            Err(Error::Degenerate(_)) => {
                degenerate += 1;
                continue;
            }
            Err(e) => return Err(format!("L' on complex {i}: {e}")),
        };
        let mut rebuilt = lp.exact.clone();
        for (s, c) in lp.top.iter().zip(&lp.coefficients) {
            let li = lib(gadget_la_exact(&x, r, &[*s]))?;
            rebuilt += li.map(|v| *c * Rational64::from_integer(v));
        }
        ensure!(
            rebuilt == lower_laplacian_exact(&x, r),
            "L' reconstruction failed on complex {i}"
        );
        let l1 = common::eig_desc(&lp.matrix.entries)
            .first()
            .copied()
            .unwrap_or(0.0);
        let cap = ((r + 1) * lp.d) as f64;
        ensure!(l1 <= cap + 1e-7, "complex {i}: lambda1(L') = {l1} > {cap}");
        built += 1;
    }
    Ok(format!(
        "100 L_A pairs, 30 partite decompositions, 100 L' ({degenerate} degenerate draws skipped)"
    ))
}

const CONJECTURES: &[&str] = &[
    "brouwer",
    "brouwer_plus",
    "duval_reiner",
    "higher_brouwer",
    "signless_aot",
];

fn conjectures() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut cfg = SuiteConfig::new(ids(CONJECTURES));
    cfg.out_dir = Some(dir.path().to_path_buf());
    cfg.write_reports = false;
    let mut instances = 0;
    let mut violations = 0;
    for n in 1..=6 {
        let stream = lib(InstanceStream::from_descriptor(&format!("enumerate:n={n}")))?;
        let s = sweep(&cfg, &stream)?;
        instances += s.instances;
        violations += s.conjecture_violations.len() + s.theorem_violations.len();
        ensure!(
            s.exit_code() == if violations == 0 { 0 } else { 3 },
            "exit code {}",
            s.exit_code()
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let list = InstanceList {
        descriptor: "random".into(),
        instances: (0..500)
            .map(|i| Instance::new(format!("rc{i}"), random_complex(&mut rng, i, 8)))
            .collect(),
    };
    cfg.r = RSpec::All;
    let s = sweep(&cfg, &list)?;
    instances += s.instances;
    violations += s.conjecture_violations.len() + s.theorem_violations.len();
    let logged =
        std::fs::read_to_string(dir.path().join("violations.jsonl")).map_err(|e| e.to_string())?;
    ensure!(
        logged.lines().count() == s.conjecture_violations.len() + s.theorem_violations.len(),
        "violations.jsonl out of sync"
    );
    ensure!(
        violations == 0,
        "{violations} conjecture violations; see violations.jsonl"
    );
    Ok(format!("{instances} instances, 0 violations"))
}

fn families() -> Check {
    let mut cfg = SuiteConfig::new(ids(&["hereditary_f:forest"]));
    cfg.strict = true;
    let mut trees = 0;
    for n in 2..=8 {
        let s = sweep(
            &cfg,
            &lib(InstanceStream::from_descriptor(&format!("trees:n={n}")))?,
        )?;
        ensure!(
            s.theorem_violations.is_empty(),
            "tree violation {:?}",
            s.theorem_violations[0]
        );
        ensure!(s.strict_errors.is_empty(), "{}", s.strict_errors[0]);
        trees += s.instances;
    }
    let mut counts = Vec::new();
    for (filter, bounds) in [
        ("square_free", vec!["hereditary_f:square_free"]),
        ("girth5", vec!["hereditary_f:girth5", "brouwer"]),
    ] {
        let mut cfg = SuiteConfig::new(ids(&bounds));
        cfg.strict = true;
        let mut seen = 0;
        for n in 1..=7 {
            let stream = lib(InstanceStream::from_descriptor(&format!(
                "enumerate:n={n},filter={filter}"
            )))?;
            // brouwer at every k, not only its usual range.
            if filter == "girth5" {
                cfg.k = KSpec::Range { lo: 1, hi: None };
            }
            let s = sweep(&cfg, &stream)?;
            ensure!(
                s.theorem_violations.is_empty(),
                "{filter}: {:?}",
                s.theorem_violations[0]
            );
            ensure!(
                s.conjecture_violations.is_empty(),
                "{filter}: {:?}",
                s.conjecture_violations[0]
            );
            ensure!(
                s.strict_errors.is_empty(),
                "{filter}: {}",
                s.strict_errors[0]
            );
            seen += s.instances;
        }
        counts.push(format!("{seen} {filter}"));
    }
    Ok(format!("{trees} trees, {}", counts.join(", ")))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("structural suite", structural),
        ("exhaustive theorem suite", exhaustive_theorems),
        ("equality reproduction", equality),
        ("path gap", path_gap),
        ("identity suite", identities),
        ("proof gadgets", gadgets),
        ("conjecture sweep", conjectures),
        ("family bounds", families),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = f();
        let secs = t.elapsed().as_secs_f64();
        match out {
            Ok(detail) => println!("PASS {} {name}: {detail} ({secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why} ({secs:.1}s)", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
