//! Named families, random models and exhaustive enumeration.
//!
//! Descriptors use `name:param=value,...`; parameters may also be given
//! positionally in the order listed by [`family_params`]. Lists such as star
//! sizes are separated by `/`, e.g. `star_forest:sizes=3/2`.
//!
//! Random instances use ChaCha8 seeded with `seed` and with the stream number
//! set to the instance index, so instance `i` is reproducible on its own.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{PartiteStructure, SimplicialComplex, VertexId};
use crate::error::{Error, Result};
use crate::families::Family;
use crate::instance::Instance;
use crate::par;
use crate::spectra::graph_spectrum;

fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}

fn seq(n: usize) -> Vec<VertexId> {
    (0..n as VertexId).collect()
}

/// Star `S_n`: centre 0, leaves `1..n`.
pub fn gen_star(n: usize) -> Result<SimplicialComplex> {
    if n < 2 {
        return Err(contract(format!("star needs n >= 2, got {n}")));
    }
    let edges: Vec<(u32, u32)> = (1..n as u32).map(|v| (0, v)).collect();
    Ok(SimplicialComplex::graph_on_positions(n as u32, &edges))
}

/// Path `P_n` on `0, 1, ..., n-1`.
pub fn gen_path(n: usize) -> Result<SimplicialComplex> {
    if n < 2 {
        return Err(contract(format!("path needs n >= 2, got {n}")));
    }
    let edges: Vec<(u32, u32)> = (1..n as u32).map(|v| (v - 1, v)).collect();
    Ok(SimplicialComplex::graph_on_positions(n as u32, &edges))
}

pub fn gen_cycle(n: usize) -> Result<SimplicialComplex> {
    if n < 3 {
        return Err(contract(format!("cycle needs n >= 3, got {n}")));
    }
    let mut edges: Vec<(u32, u32)> = (1..n as u32).map(|v| (v - 1, v)).collect();
    edges.insert(1, (0, n as u32 - 1));
    edges.sort_unstable();
    Ok(SimplicialComplex::graph_on_positions(n as u32, &edges))
}

pub fn gen_complete(n: usize) -> Result<SimplicialComplex> {
    if n < 1 {
        return Err(contract("complete graph needs n >= 1"));
    }
    let n = n as u32;
    let edges: Vec<(u32, u32)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    Ok(SimplicialComplex::graph_on_positions(n, &edges))
}

/// Disjoint stars `S_{n_1}, ..., S_{n_k}`, numbered consecutively, centre first.
pub fn gen_star_forest(sizes: &[usize]) -> Result<SimplicialComplex> {
    if sizes.is_empty() || sizes.iter().any(|s| *s < 2) {
        return Err(contract(format!(
            "star forest sizes must be >= 2, got {sizes:?}"
        )));
    }
    let mut edges = Vec::new();
    let mut base = 0u32;
    for s in sizes {
        edges.extend((1..*s as u32).map(|v| (base, base + v)));
        base += *s as u32;
    }
    Ok(SimplicialComplex::graph_on_positions(base, &edges))
}

/// `m` `r`-simplices sharing a common `s`-set `σ` and otherwise disjoint, so
/// that every `(r-1)`-face lies in exactly one `r`-face.
pub fn gen_matching_complex(r: usize, m: usize, s: usize) -> Result<SimplicialComplex> {
    if r == 0 || m == 0 || s >= r {
        return Err(contract(format!(
            "matching complex needs r >= 1, m >= 1, s <= r - 1; got r={r} m={m} s={s}"
        )));
    }
    let block = r + 1 - s;
    let facets: Vec<Vec<VertexId>> = (0..m)
        .map(|i| {
            let mut f: Vec<VertexId> = (0..s as VertexId).collect();
            f.extend((0..block).map(|j| (s + i * block + j) as VertexId));
            f
        })
        .collect();
    let x = SimplicialComplex::with_vertices(&seq(s + m * block), &facets)?;
    if x.f(r as isize) * (r + 1) != x.f(r as isize - 1) {
        return Err(Error::Internal(
            "matching complex has an (r-1)-face in two r-faces".into(),
        ));
    }
    Ok(x)
}

/// Clique on `A = {0..k}` joined to the independent set `B = {k..k+b}`.
pub fn gen_brouwer_equality(k: usize, b: usize) -> Result<SimplicialComplex> {
    if k == 0 {
        return Err(contract("brouwer equality graph needs k >= 1"));
    }
    let n = (k + b) as u32;
    let k = k as u32;
    let edges: Vec<(u32, u32)> = (0..k)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    Ok(SimplicialComplex::graph_on_positions(n, &edges))
}

/// All rainbow faces over `r + 1` classes of the given sizes, numbered class
/// by class.
pub fn gen_complete_partite_complex(
    r: usize,
    sizes: &[usize],
) -> Result<(SimplicialComplex, PartiteStructure)> {
    if sizes.len() != r + 1 || sizes.contains(&0) {
        return Err(contract(format!(
            "complete partite complex needs {} positive sizes, got {sizes:?}",
            r + 1
        )));
    }
    let mut classes: Vec<Vec<VertexId>> = Vec::new();
    let mut next = 0;
    for s in sizes {
        classes.push((next..next + *s as VertexId).collect());
        next += *s as VertexId;
    }
    let mut facets: Vec<Vec<VertexId>> = vec![Vec::new()];
    for class in &classes {
        facets = facets
            .into_iter()
            .flat_map(|f| {
                class.iter().map(move |v| {
                    let mut g = f.clone();
                    g.push(*v);
                    g
                })
            })
            .collect();
    }
    let x = SimplicialComplex::with_vertices(&seq(next as usize), &facets)?;
    let p = PartiteStructure::from_labels(&x, &classes)?;
    Ok((x, p))
}

fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(contract(format!("probability must lie in [0, 1], got {p}")));
    }
    Ok(())
}

/// Erdős–Rényi `G(n, p)`; pairs are visited in lexicographic order.
pub fn gen_random_graph(n: usize, p: f64, seed: u64, index: u64) -> Result<SimplicialComplex> {
    check_p(p)?;
    let mut rng = rng_for(seed, index);
    let n = n as u32;
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(p) {
                edges.push((a, b));
            }
        }
    }
    Ok(SimplicialComplex::graph_on_positions(n, &edges))
}

/// `k`-subsets of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<VertexId>> {
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur: Vec<VertexId> = (0..k as VertexId).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|i| (cur[*i] as usize) < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Full `(r-1)`-skeleton of the simplex on `n` vertices plus each `r`-face
/// independently with probability `p`.
pub fn gen_random_complex(
    n: usize,
    r: usize,
    p: f64,
    seed: u64,
    index: u64,
) -> Result<SimplicialComplex> {
    check_p(p)?;
    if r == 0 || n == 0 {
        return Err(contract(format!(
            "random complex needs n >= 1 and r >= 1, got n={n} r={r}"
        )));
    }
    let mut rng = rng_for(seed, index);
    let mut facets = subsets(n, r);
    for f in subsets(n, r + 1) {
        if rng.random_bool(p) {
            facets.push(f);
        }
    }
    SimplicialComplex::with_vertices(&seq(n), &facets)
}

/// Vertex pairs of `K_n` in lexicographic order; bit `j` of an edge mask is pair `j`.
pub fn edge_pairs(n: usize) -> Vec<(u32, u32)> {
    let n = n as u32;
    (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect()
}

pub fn graph_from_mask(n: usize, mask: u64) -> SimplicialComplex {
    let edges: Vec<(u32, u32)> = edge_pairs(n)
        .into_iter()
        .enumerate()
        .filter(|(j, _)| mask >> j & 1 == 1)
        .map(|(_, e)| e)
        .collect();
    SimplicialComplex::graph_on_positions(n as u32, &edges)
}

/// The labeled tree with Prüfer sequence given by the base-`n` digits of `index`.
pub fn tree_from_prufer(n: usize, index: u64) -> SimplicialComplex {
    if n < 2 {
        return SimplicialComplex::graph_on_positions(n as u32, &[]);
    }
    let mut code = vec![0usize; n - 2];
    let mut rest = index;
    for c in code.iter_mut().rev() {
        *c = (rest % n as u64) as usize;
        rest /= n as u64;
    }
    let mut degree = vec![1usize; n];
    for c in &code {
        degree[*c] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for c in &code {
        let leaf = (0..n).find(|v| degree[*v] == 1).expect("a leaf exists");
        edges.push((leaf.min(*c) as u32, leaf.max(*c) as u32));
        degree[leaf] -= 1;
        degree[*c] -= 1;
    }
    let last: Vec<usize> = (0..n).filter(|v| degree[*v] == 1).collect();
    edges.push((last[0] as u32, last[1] as u32));
    edges.sort_unstable();
    SimplicialComplex::graph_on_positions(n as u32, &edges)
}

pub const ENUMERATE_DEFAULT_MAX: usize = 7;
pub const ENUMERATE_HARD_MAX: usize = 8;
pub const TREES_MAX: usize = 10;

/// A parsed `name:param=value,...` descriptor.
#[derive(Clone, Debug, PartialEq)]
pub struct Descriptor {
    pub name: String,
    pub params: Vec<(String, String)>,
}

/// Parameter names per family, in positional order.
pub fn family_params(name: &str) -> Option<&'static [&'static str]> {
    Some(match name {
        "star" | "path" | "cycle" | "complete" => &["n"],
        "star_forest" => &["sizes"],
        "matching" => &["r", "m", "s"],
        "brouwer_eq" => &["k", "b"],
        "complete_partite" => &["r", "sizes"],
        "random_graph" => &["n", "p", "seed", "count"],
        "random_complex" => &["n", "r", "p", "seed", "count"],
        "enumerate" => &["n", "dedup", "connected", "filter", "force"],
        "trees" => &["n", "dedup"],
        _ => return None,
    })
}

impl Descriptor {
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |why: &str| Error::Descriptor(text.to_string(), why.to_string());
        let (name, rest) = text.split_once(':').unwrap_or((text, ""));
        let name = name.trim();
        let names = family_params(name).ok_or_else(|| bad("unknown family"))?;
        let mut params: Vec<(String, String)> = Vec::new();
        for (i, tok) in rest
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .enumerate()
        {
            let (key, value) = match tok.split_once('=') {
                Some((k, v)) => (k.trim().to_string(), v.trim().to_string()),
                None => (
                    names
                        .get(i)
                        .ok_or_else(|| bad("too many positional parameters"))?
                        .to_string(),
                    tok.to_string(),
                ),
            };
            if !names.contains(&key.as_str()) {
                return Err(bad(&format!("unknown parameter `{key}`")));
            }
            if params.iter().any(|(k, _)| *k == key) {
                return Err(bad(&format!("parameter `{key}` given twice")));
            }
            params.push((key, value));
        }
        params.sort_by_key(|(k, _)| names.iter().position(|n| n == k));
        Ok(Descriptor {
            name: name.to_string(),
            params,
        })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.params
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    fn err(&self, why: impl Into<String>) -> Error {
        Error::Descriptor(self.to_string(), why.into())
    }

    fn get<T: std::str::FromStr>(&self, key: &str, default: Option<T>) -> Result<T> {
        match self.raw(key) {
            Some(v) => v
                .parse()
                .map_err(|_| self.err(format!("bad value `{v}` for `{key}`"))),
            None => default.ok_or_else(|| self.err(format!("missing parameter `{key}`"))),
        }
    }

    fn list(&self, key: &str) -> Result<Vec<usize>> {
        let v = self
            .raw(key)
            .ok_or_else(|| self.err(format!("missing parameter `{key}`")))?;
        v.split('/')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| self.err(format!("bad list `{v}`")))
            })
            .collect()
    }
}

impl std::fmt::Display for Descriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.name)?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            write!(f, "{}{k}={v}", if i == 0 { ":" } else { "," })?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
enum Source {
    Fixed(Box<Instance>),
    RandomGraph {
        n: usize,
        p: f64,
        seed: u64,
    },
    RandomComplex {
        n: usize,
        r: usize,
        p: f64,
        seed: u64,
    },
    Masks {
        n: usize,
    },
    Trees {
        n: usize,
    },
}

/// A deterministic, randomly addressable sequence of instances.
#[derive(Clone, Debug)]
pub struct InstanceStream {
    descriptor: String,
    source: Source,
    /// Underlying indices surviving the filters; `None` keeps all `raw_len`.
    keep: Option<Vec<u64>>,
    raw_len: u64,
    assumptions: Vec<Family>,
}

fn parse_bool(d: &Descriptor, key: &str) -> Result<bool> {
    d.get(key, Some(false))
}

impl InstanceStream {
    pub fn from_descriptor(text: &str) -> Result<Self> {
        let d = Descriptor::parse(text)?;
        let desc = d.to_string();
        let fixed = |x: SimplicialComplex, fams: &[Family]| {
            Instance::new(desc.clone(), x).with_assumptions(fams.iter().copied())
        };
        let single = |inst: Instance| InstanceStream {
            descriptor: desc.clone(),
            source: Source::Fixed(Box::new(inst)),
            keep: None,
            raw_len: 1,
            assumptions: Vec::new(),
        };
        let mut stream = match d.name.as_str() {
            "star" => single(fixed(gen_star(d.get("n", None)?)?, &[Family::Forest])),
            "path" => single(fixed(gen_path(d.get("n", None)?)?, &[Family::Forest])),
            "cycle" => single(fixed(gen_cycle(d.get("n", None)?)?, &[])),
            "complete" => single(fixed(gen_complete(d.get("n", None)?)?, &[])),
            "star_forest" => single(fixed(
                gen_star_forest(&d.list("sizes")?)?,
                &[Family::Forest],
            )),
            "matching" => single(fixed(
                gen_matching_complex(d.get("r", None)?, d.get("m", None)?, d.get("s", Some(0))?)?,
                &[],
            )),
            "brouwer_eq" => single(fixed(
                gen_brouwer_equality(d.get("k", None)?, d.get("b", None)?)?,
                &[],
            )),
            "complete_partite" => {
                let (x, p) = gen_complete_partite_complex(d.get("r", None)?, &d.list("sizes")?)?;
                single(fixed(x, &[]).with_partition(p))
            }
            "random_graph" => {
                let n: usize = d.get("n", None)?;
                let p: f64 = d.get("p", None)?;
                check_p(p)?;
                InstanceStream {
                    descriptor: desc.clone(),
                    source: Source::RandomGraph {
                        n,
                        p,
                        seed: d.get("seed", Some(0))?,
                    },
                    keep: None,
                    raw_len: d.get("count", Some(1))?,
                    assumptions: Vec::new(),
                }
            }
            "random_complex" => {
                let (n, r): (usize, usize) = (d.get("n", None)?, d.get("r", None)?);
                let p: f64 = d.get("p", None)?;
                check_p(p)?;
                if r == 0 || n == 0 {
                    return Err(d.err("random complex needs n >= 1 and r >= 1"));
                }
                InstanceStream {
                    descriptor: desc.clone(),
                    source: Source::RandomComplex {
                        n,
                        r,
                        p,
                        seed: d.get("seed", Some(0))?,
                    },
                    keep: None,
                    raw_len: d.get("count", Some(1))?,
                    assumptions: Vec::new(),
                }
            }
            "enumerate" => {
                let n: usize = d.get("n", None)?;
                let force = parse_bool(&d, "force")?;
                if n > ENUMERATE_HARD_MAX || (n > ENUMERATE_DEFAULT_MAX && !force) {
                    return Err(d.err(format!(
                        "exhaustive enumeration is capped at n = {ENUMERATE_DEFAULT_MAX} (n = {ENUMERATE_HARD_MAX} with force=true)"
                    )));
                }
                InstanceStream {
                    descriptor: desc.clone(),
                    source: Source::Masks { n },
                    keep: None,
                    raw_len: 1u64 << (n * n.saturating_sub(1) / 2),
                    assumptions: Vec::new(),
                }
            }
            "trees" => {
                let n: usize = d.get("n", None)?;
                if !(1..=TREES_MAX).contains(&n) {
                    return Err(d.err(format!("tree enumeration needs 1 <= n <= {TREES_MAX}")));
                }
                InstanceStream {
                    descriptor: desc.clone(),
                    source: Source::Trees { n },
                    keep: None,
                    raw_len: if n < 2 {
                        1
                    } else {
                        (n as u64).pow(n as u32 - 2)
                    },
                    assumptions: vec![Family::Forest],
                }
            }
            _ => unreachable!("checked by Descriptor::parse"),
        };
        let connected = d.name == "enumerate" && parse_bool(&d, "connected")?;
        let filter: Option<Family> = match d.raw("filter") {
            Some(f) => Some(
                f.parse()
                    .map_err(|_| d.err(format!("bad family filter `{f}`")))?,
            ),
            None => None,
        };
        if let Some(f) = filter {
            stream.assumptions.push(f);
        }
        let dedup = matches!(d.name.as_str(), "enumerate" | "trees") && parse_bool(&d, "dedup")?;
        if connected || filter.is_some() || dedup {
            stream.apply_filters(connected, filter, dedup);
        }
        Ok(stream)
    }

    /// Keeps the indices passing `connected`/`filter`, then (optionally) the
    /// first index of each invariant class.
    fn apply_filters(&mut self, connected: bool, filter: Option<Family>, dedup: bool) {
        let raw = self.raw_len as usize;
        let pass: Vec<Option<(Vec<usize>, Vec<i64>)>> = par::map_indexed(raw, |i| {
            let x = self.raw_complex(i as u64);
            if connected && !x.is_connected() {
                return None;
            }
            if let Some(f) = filter {
                if f.check(&x) != Some(true) {
                    return None;
                }
            }
            Some(if dedup {
                invariant_key(&x)
            } else {
                (Vec::new(), Vec::new())
            })
        });
        let mut seen = HashSet::new();
        let keep = pass
            .into_iter()
            .enumerate()
            .filter_map(|(i, key)| {
                let key = key?;
                (!dedup || seen.insert(key)).then_some(i as u64)
            })
            .collect();
        self.keep = Some(keep);
    }

    fn raw_complex(&self, i: u64) -> SimplicialComplex {
        match &self.source {
            Source::Fixed(inst) => inst.complex.clone(),
            Source::RandomGraph { n, p, seed } => {
                gen_random_graph(*n, *p, *seed, i).expect("p validated")
            }
            Source::RandomComplex { n, r, p, seed } => {
                gen_random_complex(*n, *r, *p, *seed, i).expect("validated")
            }
            Source::Masks { n } => graph_from_mask(*n, i),
            Source::Trees { n } => tree_from_prufer(*n, i),
        }
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn len(&self) -> usize {
        self.keep.as_ref().map_or(self.raw_len as usize, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The `i`-th instance; ids are `descriptor#tag` where the tag is the
    /// instance index (random), edge mask (`m…`) or Prüfer index (`p…`).
    pub fn instance(&self, i: usize) -> Instance {
        let raw = self.keep.as_ref().map_or(i as u64, |k| k[i]);
        if let Source::Fixed(inst) = &self.source {
            return (**inst).clone();
        }
        let mut id = self.descriptor.clone();
        let _ = match self.source {
            Source::Masks { .. } => write!(id, "#m{raw}"),
            Source::Trees { .. } => write!(id, "#p{raw}"),
            _ => write!(id, "#{raw}"),
        };
        Instance::new(id, self.raw_complex(raw)).with_assumptions(self.assumptions.iter().copied())
    }

    pub fn iter(&self) -> impl Iterator<Item = Instance> + '_ {
        (0..self.len()).map(|i| self.instance(i))
    }
}

/// Anything the harness can draw instances from by index.
pub trait InstanceSource: Sync {
    fn descriptor(&self) -> &str;
    fn len(&self) -> usize;
    fn instance(&self, i: usize) -> Instance;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl InstanceSource for InstanceStream {
    fn descriptor(&self) -> &str {
        InstanceStream::descriptor(self)
    }

    fn len(&self) -> usize {
        InstanceStream::len(self)
    }

    fn instance(&self, i: usize) -> Instance {
        InstanceStream::instance(self, i)
    }
}

/// An explicit list of instances, e.g. read from files.
#[derive(Clone, Debug)]
pub struct InstanceList {
    pub descriptor: String,
    pub instances: Vec<Instance>,
}

impl InstanceSource for InstanceList {
    fn descriptor(&self) -> &str {
        &self.descriptor
    }

    fn len(&self) -> usize {
        self.instances.len()
    }

    fn instance(&self, i: usize) -> Instance {
        self.instances[i].clone()
    }
}

/// Sorted degree sequence plus the Laplacian spectrum rounded to `1e-6`.
fn invariant_key(x: &SimplicialComplex) -> (Vec<usize>, Vec<i64>) {
    let mut deg = x.r_degrees(1);
    deg.sort_unstable();
    let spec = graph_spectrum(x).map(|s| {
        s.eigenvalues()
            .iter()
            .map(|v| (v * 1e6).round() as i64)
            .collect()
    });
    (deg, spec.unwrap_or_default())
}
