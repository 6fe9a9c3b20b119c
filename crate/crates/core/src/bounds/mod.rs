//! The bound registry and its evaluator.
//!
//! Every bound compares `Σ_{i<=k} λ_i` of `L^+_{r-1}` (or `Q^+_{r-1}` for the
//! signless ids) against a combinatorial right-hand side. An [`Evaluator`]
//! caches spectra, degree profiles and family checks for one instance so a
//! sweep over many `(id, r, k)` triples decomposes each operator once.

pub mod gadgets;
mod registry;

use std::cell::{OnceCell, RefCell};
use std::ops::RangeInclusive;
use std::rc::Rc;

use serde::{Deserialize, Serialize, Serializer};

pub use registry::{BoundId, Operator, Tier};

use crate::complex::{PartiteStructure, VertexId};
use crate::error::{Error, Result};
use crate::families::{Family, FamilyKind};
use crate::instance::Instance;
use crate::operator::{laplacian, LaplacianKind};
use crate::spectra::{degree_profile, spectrum, DegreeProfile, SpectrumSummary};

/// Additive slack allowed before an inequality counts as violated.
pub const DEFAULT_TOL: f64 = 1e-7;

/// Exhaustive induced-subgraph search is used up to this many vertices.
pub const INDUCED_EXACT_MAX: usize = 16;

/// `witness_max_form` brute-forces all `A` up to this many `(r-1)`-faces.
pub const WITNESS_BRUTE_MAX: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A set of faces attaining the right-hand side.
    Faces {
        faces: Vec<Vec<VertexId>>,
        brute_force: bool,
    },
    /// A vertex set; `exact == false` means the maximum was not certified.
    Vertices {
        vertices: Vec<VertexId>,
        exact: bool,
    },
    /// Partite classes and the degree prefixes summed for each.
    Partite {
        classes: Vec<Vec<VertexId>>,
        profiles: Vec<Vec<usize>>,
    },
    Note {
        note: String,
    },
}

/// Rounds to `digits` significant digits (through decimal formatting).
pub fn round_sig(v: f64, digits: usize) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { 0.0 } else { v };
    }
    format!("{:.*e}", digits.saturating_sub(1), v)
        .parse()
        .unwrap_or(v)
}

fn sig12<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig(*v, 12))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound_id: BoundId,
    pub instance_id: String,
    pub r: usize,
    pub k: usize,
    #[serde(serialize_with = "sig12")]
    pub lhs: f64,
    #[serde(serialize_with = "sig12")]
    pub rhs: f64,
    #[serde(serialize_with = "sig12")]
    pub slack: f64,
    pub tier: Tier,
    pub holds: bool,
    pub witness: Option<Witness>,
}

fn binom2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// `f(2k)` for each hereditary instantiation.
pub fn hereditary_f(family: Family, k: usize) -> usize {
    let k128 = k as u128;
    match family {
        Family::Forest => 2 * k - 1,
        Family::MaxDegree(d) => k * d.unwrap_or(k).min(k),
        Family::Planar => (6 * k).saturating_sub(6),
        // floor(k(1 + sqrt(8k - 3)) / 2) with sqrt(k^2 (8k - 3)) irrational.
        Family::SquareFree => ((k128 + isqrt(k128 * k128 * (8 * k128 - 3))) / 2) as usize,
        Family::Girth5 => isqrt(k128 * k128 * (2 * k128 - 1)) as usize,
        Family::NoPath(t) => k * t.saturating_sub(1),
        Family::NoLongCycle(t) => t * (2 * k - 1) / 2,
        Family::TriangleFree => k * k,
    }
}

type SpectrumSlot = ((usize, Operator), Rc<SpectrumSummary>);

/// Lazily computed, per-instance evaluation state.
pub struct Evaluator<'a> {
    inst: &'a Instance,
    tol: f64,
    spectra: RefCell<Vec<SpectrumSlot>>,
    profiles: RefCell<Vec<(usize, Rc<DegreeProfile>)>>,
    partition: OnceCell<Option<PartiteStructure>>,
    families: RefCell<Vec<(Family, Option<bool>)>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(inst: &'a Instance, tol: f64) -> Self {
        Evaluator {
            inst,
            tol,
            spectra: RefCell::new(Vec::new()),
            profiles: RefCell::new(Vec::new()),
            partition: OnceCell::new(),
            families: RefCell::new(Vec::new()),
        }
    }

    pub fn instance(&self) -> &Instance {
        self.inst
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// Spectrum of `L^+_{r-1}` or `Q^+_{r-1}`.
    pub fn spectrum(&self, r: usize, op: Operator) -> Result<Rc<SpectrumSummary>> {
        if let Some((_, s)) = self
            .spectra
            .borrow()
            .iter()
            .find(|(key, _)| *key == (r, op))
        {
            return Ok(s.clone());
        }
        let kind = match op {
            Operator::Signed => LaplacianKind::Upper,
            Operator::Signless => LaplacianKind::SignlessUpper,
        };
        let s = Rc::new(spectrum(&laplacian(&self.inst.complex, kind, r)?)?);
        self.spectra.borrow_mut().push(((r, op), s.clone()));
        Ok(s)
    }

    pub fn profile(&self, r: usize) -> Result<Rc<DegreeProfile>> {
        if let Some((_, p)) = self.profiles.borrow().iter().find(|(key, _)| *key == r) {
            return Ok(p.clone());
        }
        let p = Rc::new(degree_profile(&self.inst.complex, r, None)?);
        self.profiles.borrow_mut().push((r, p.clone()));
        Ok(p)
    }

    /// The supplied partition, or one found by search (`n <= 24`).
    pub fn partition(&self) -> Option<&PartiteStructure> {
        self.partition
            .get_or_init(|| match &self.inst.partition {
                Some(p) => Some(p.clone()),
                None if self.inst.complex.dim() >= 1 => {
                    self.inst.complex.partite_classes().ok().flatten()
                }
                None => None,
            })
            .as_ref()
    }

    /// `X` is `r`-dimensional and `(r+1)`-partite.
    fn partite_at(&self, r: usize) -> Option<&PartiteStructure> {
        if self.inst.complex.dim() != r as isize {
            return None;
        }
        self.partition().filter(|p| p.n_classes() == r + 1)
    }

    pub fn tier(&self, id: BoundId, r: usize) -> Tier {
        if id == BoundId::DuvalReiner && (r == 1 || self.partite_at(r).is_some()) {
            return Tier::Theorem;
        }
        id.base_tier()
    }

    /// The asserted family for `id`, after the brute-force membership check.
    fn family_for(&self, id: BoundId) -> Result<Option<Family>> {
        let Some(kind) = id.family() else {
            return Ok(None);
        };
        let fam = self
            .inst
            .assumptions
            .iter()
            .copied()
            .find(|f| f.kind() == kind)
            .ok_or_else(|| {
                Error::inapplicable(
                    id.name(),
                    format!("requires the `{}` family assertion", kind.name()),
                )
            })?;
        match fam {
            Family::NoPath(0) => {
                return Err(Error::inapplicable(id.name(), "no_path needs t >= 1"))
            }
            Family::NoLongCycle(t) if t < 2 => {
                return Err(Error::inapplicable(id.name(), "no_long_cycle needs t >= 2"))
            }
            _ => {}
        }
        let cached = self
            .families
            .borrow()
            .iter()
            .find(|(f, _)| *f == fam)
            .map(|(_, v)| *v);
        let verdict = match cached {
            Some(v) => v,
            None => {
                let v = fam.check(&self.inst.complex);
                self.families.borrow_mut().push((fam, v));
                v
            }
        };
        if verdict == Some(false) {
            return Err(Error::FamilyAssumption {
                family: fam.to_string(),
            });
        }
        Ok(Some(fam))
    }

    /// Valid `k` for `id` at dimension parameter `r`.
    pub fn k_range(&self, id: BoundId, r: usize) -> Result<RangeInclusive<usize>> {
        use BoundId::*;
        let x = &self.inst.complex;
        let na = |why: String| Err(Error::inapplicable(id.name(), why));
        if id.graph_only() {
            if !x.is_graph() {
                return na(format!("graph bound on a complex of dimension {}", x.dim()));
            }
            if r != 1 {
                return na(format!("graph bounds need r = 1, got {r}"));
            }
        } else if r == 0 || r as isize > x.dim() {
            return na(format!("needs 1 <= r <= dim(X) = {}, got {r}", x.dim()));
        }
        if id.needs_partite() && self.partite_at(r).is_none() {
            return na(format!(
                "needs an {}-partite {r}-dimensional complex",
                r + 1
            ));
        }
        let n = x.n_vertices();
        let lower = x.f(r as isize - 1);
        let hi = match id {
            AndersonMorley | AmEdgewise | Lambda1Fww | Lambda1FrPlusR => 1,
            GroneMerrisLower
            | Bai
            | Brouwer
            | WeakBrouwerOld
            | KSquared
            | BrouwerPlus
            | SignlessAot
            | SignlessTrianglefreeK2
            | HereditaryF(_)
            | SignlessHereditaryF(_) => n,
            DegreeSumMain | WitnessMaxForm | SignlessDegreeSum => lower / (r + 1),
            BinomComplex
            | SignlessBinomComplex
            | DuvalReiner
            | SignlessDuvalReiner
            | HigherBrouwer
            | PartiteDegreeSum
            | SignlessPartiteDegreeSum => lower,
            MainPlusBai => n.saturating_sub(1) / 2,
            BrouwerMinBinom => n.saturating_sub(1),
            Induced2k | SignlessInduced2k => n / 2,
        };
        // 6k - 6 undercounts planar graphs on two vertices, so k = 1 is excluded.
        let lo = if id.family() == Some(FamilyKind::Planar) {
            2
        } else {
            1
        };
        if hi < lo {
            return na(format!("empty k range {lo}..={hi}"));
        }
        Ok(lo..=hi)
    }

    pub fn applicable(&self, id: BoundId, r: usize) -> bool {
        self.k_range(id, r).is_ok() && self.family_for(id).is_ok()
    }

    /// Evaluates one inequality.
    pub fn evaluate(&self, id: BoundId, r: usize, k: usize) -> Result<BoundReport> {
        let range = self.k_range(id, r)?;
        if !range.contains(&k) {
            return Err(Error::inapplicable(
                id.name(),
                format!("k = {k} outside {}..={}", range.start(), range.end()),
            ));
        }
        let family = self.family_for(id)?;
        let eig = self.spectrum(r, id.operator())?.top_k_sum(k)?;
        let (value, witness) = self.bound_value(id, r, k, family)?;
        let (lhs, rhs) = if id.is_lower_bound() {
            (value, eig)
        } else {
            (eig, value)
        };
        let slack = rhs - lhs;
        Ok(BoundReport {
            bound_id: id,
            instance_id: self.inst.id.clone(),
            r,
            k,
            lhs,
            rhs,
            slack,
            tier: self.tier(id, r),
            holds: slack >= -self.tol,
            witness,
        })
    }

    /// The combinatorial side of `id` (the right-hand side, except for the
    /// lower bound `grone_merris_lower` where it is the left).
    pub fn bound_value(
        &self,
        id: BoundId,
        r: usize,
        k: usize,
        family: Option<Family>,
    ) -> Result<(f64, Option<Witness>)> {
        use BoundId::*;
        let x = &self.inst.complex;
        let e = x.edge_count();
        let n = x.n_vertices();
        let fr = x.f(r as isize);
        let p = self.profile(r)?;
        let labels = |faces: &mut dyn Iterator<Item = usize>| -> Vec<Vec<VertexId>> {
            let lower = x.faces(r as isize - 1);
            faces.map(|i| x.label_face(&lower[i])).collect()
        };
        Ok(match id {
            AndersonMorley => ((p.d(1) + p.d(2)) as f64, None),
            AmEdgewise | Lambda1Fww => {
                let lower = x.faces(r as isize - 1);
                let mut best: Option<(usize, usize)> = None;
                for (t, tau) in x.faces(r as isize).iter().enumerate() {
                    let s: usize = tau
                        .boundary()
                        .map(|(_, sigma)| p.degree_of[lower.binary_search(&sigma).unwrap()])
                        .sum();
                    if best.is_none_or(|(b, _)| s > b) {
                        best = Some((s, t));
                    }
                }
                match best {
                    Some((s, t)) => {
                        let face = x.label_face(&x.faces(r as isize)[t]);
                        (
                            s as f64,
                            Some(Witness::Faces {
                                faces: vec![face],
                                brute_force: false,
                            }),
                        )
                    }
                    None => (0.0, None),
                }
            }
            GroneMerrisLower => (p.top_sum(k) as f64, None),
            Bai => {
                let conj = p.conjugate.as_ref().expect("r = 1 profile has a conjugate");
                (conj.iter().take(k).sum::<usize>() as f64, None)
            }
            Brouwer | SignlessAot => ((e + binom2(k + 1)) as f64, None),
            WeakBrouwerOld => {
                let kf = k as f64;
                let a = 2.0 * kf * kf - k.div_ceil(2) as f64;
                let b = kf * kf + 15.0 * kf * kf.ln() + 65.0 * kf;
                (e as f64 + a.min(b), None)
            }
            DegreeSumMain | SignlessDegreeSum => {
                let m = (r + 1) * k;
                let faces = labels(&mut p.ranked.iter().take(m).copied());
                (
                    p.top_sum(m) as f64,
                    Some(Witness::Faces {
                        faces,
                        brute_force: false,
                    }),
                )
            }
            WitnessMaxForm => {
                let m = (r + 1) * k;
                let f = p.degree_of.len();
                if f <= WITNESS_BRUTE_MAX {
                    let (best, mask) = max_subset_sum(&p.degree_of, m);
                    let faces = labels(&mut (0..f).filter(|i| mask >> i & 1 == 1));
                    (
                        best as f64,
                        Some(Witness::Faces {
                            faces,
                            brute_force: true,
                        }),
                    )
                } else {
                    let faces = labels(&mut p.ranked.iter().take(m).copied());
                    (
                        p.top_sum(m) as f64,
                        Some(Witness::Faces {
                            faces,
                            brute_force: false,
                        }),
                    )
                }
            }
            BinomComplex | SignlessBinomComplex => ((fr + binom2((r + 1) * k)) as f64, None),
            KSquared | SignlessTrianglefreeK2 => ((e + k * k) as f64, None),
            MainPlusBai => {
                let head: usize = (1..=2 * k).map(|i| p.d(i).min(k)).sum();
                let tail: usize = (2 * k + 1..=n).map(|i| p.d(i).saturating_sub(k)).sum();
                (e as f64 + 0.5 * (head as f64 - tail as f64), None)
            }
            BrouwerMinBinom => (
                (e + binom2(k + 1) + binom2(n - k - 1).min(binom2(k))) as f64,
                None,
            ),
            PartiteDegreeSum | SignlessPartiteDegreeSum => {
                let part = self.partite_at(r).expect("checked by k_range");
                let prof = degree_profile(x, r, Some(part))?;
                let profiles: Vec<Vec<usize>> = prof
                    .partite_profiles
                    .expect("partition given")
                    .into_iter()
                    .map(|d| d.into_iter().take(k).collect())
                    .collect();
                let total: usize = profiles.iter().flatten().sum();
                (
                    total as f64,
                    Some(Witness::Partite {
                        classes: part.classes().to_vec(),
                        profiles,
                    }),
                )
            }
            DuvalReiner | SignlessDuvalReiner => {
                let s: usize = x.vertex_r_degrees(r).iter().map(|d| (*d).min(k)).sum();
                (s as f64, None)
            }
            HigherBrouwer => ((fr + binom2(k) + r * k) as f64, None),
            BrouwerPlus => {
                let s: usize = (1..=k).map(|i| p.d(i).min(k)).sum();
                let note = (k == n).then(|| Witness::Note {
                    note: "k = |V|".into(),
                });
                (e as f64 + 0.5 * k as f64 + 0.5 * s as f64, note)
            }
            Induced2k | SignlessInduced2k => {
                let (best, set, exact) = max_induced_edges(x, 2 * k);
                let vertices = set.iter().map(|v| x.labels()[*v]).collect();
                (
                    (e + best) as f64,
                    Some(Witness::Vertices { vertices, exact }),
                )
            }
            HereditaryF(_) | SignlessHereditaryF(_) => {
                let fam = family.expect("family ids carry a family");
                let fam = match fam {
                    Family::MaxDegree(None) => Family::MaxDegree(Some(p.max_degree())),
                    f => f,
                };
                ((e + hereditary_f(fam, k)) as f64, None)
            }
            Lambda1FrPlusR => ((fr + r) as f64, None),
        })
    }
}

/// One-shot evaluation without a shared cache.
pub fn evaluate_bound(
    id: BoundId,
    inst: &Instance,
    r: usize,
    k: usize,
    tol: f64,
) -> Result<BoundReport> {
    Evaluator::new(inst, tol).evaluate(id, r, k)
}

/// Maximum of `Σ_{i∈A} w_i` over `|A| = m`, by enumeration; returns the sum and
/// the first maximizing subset as a bitmask.
fn max_subset_sum(w: &[usize], m: usize) -> (usize, u64) {
    let f = w.len();
    if m == 0 || m > f {
        return (0, 0);
    }
    let mut best = (0usize, 0u64);
    let mut found = false;
    let mut mask: u64 = (1u64 << m) - 1;
    let limit = 1u64 << f;
    while mask < limit {
        let s: usize = (0..f).filter(|i| mask >> i & 1 == 1).map(|i| w[i]).sum();
        if !found || s > best.0 {
            best = (s, mask);
            found = true;
        }
        // Next subset of the same size (Gosper).
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
    }
    best
}

/// `max |E(G[S])|` over `|S| = s`, with the maximizing set (positions).
/// Exhaustive for `n <= INDUCED_EXACT_MAX`, otherwise greedy plus swaps.
pub fn max_induced_edges(
    g: &crate::complex::SimplicialComplex,
    s: usize,
) -> (usize, Vec<usize>, bool) {
    let n = g.n_vertices();
    let s = s.min(n);
    let mut adj = vec![vec![false; n]; n];
    for e in g.faces(1) {
        let (u, v) = (e.vertices()[0] as usize, e.vertices()[1] as usize);
        adj[u][v] = true;
        adj[v][u] = true;
    }
    let count = |set: &[usize]| -> usize {
        let mut c = 0;
        for (i, u) in set.iter().enumerate() {
            for v in &set[i + 1..] {
                c += adj[*u][*v] as usize;
            }
        }
        c
    };
    if s == 0 {
        return (0, Vec::new(), true);
    }
    if n <= INDUCED_EXACT_MAX {
        let masks = g.adjacency_masks().expect("n <= 16");
        let mut best = (0usize, (1u64 << s) - 1);
        let mut mask: u64 = (1u64 << s) - 1;
        let mut first = true;
        while mask < 1u64 << n {
            let mut c = 0u32;
            let mut it = mask;
            while it != 0 {
                let v = it.trailing_zeros() as usize;
                it &= it - 1;
                c += (masks[v] & mask).count_ones();
            }
            let c = c as usize / 2;
            if first || c > best.0 {
                best = (c, mask);
                first = false;
            }
            let low = mask & mask.wrapping_neg();
            let r = mask + low;
            mask = (((r ^ mask) >> 2) / low) | r;
        }
        let set = (0..n).filter(|v| best.1 >> v & 1 == 1).collect();
        return (best.0, set, true);
    }
    // Greedy: top degrees, then first-improvement single swaps.
    let mut order: Vec<usize> = (0..n).collect();
    let deg: Vec<usize> = adj
        .iter()
        .map(|row| row.iter().filter(|b| **b).count())
        .collect();
    order.sort_by(|a, b| deg[*b].cmp(&deg[*a]).then(a.cmp(b)));
    let mut set: Vec<usize> = order[..s].to_vec();
    let mut inside = vec![false; n];
    for v in &set {
        inside[*v] = true;
    }
    let mut current = count(&set);
    loop {
        let mut improved = false;
        'scan: for i in 0..set.len() {
            let u = set[i];
            let loss = set.iter().filter(|w| adj[u][**w]).count();
            for v in 0..n {
                if inside[v] {
                    continue;
                }
                let gain = set.iter().filter(|w| **w != u && adj[v][**w]).count();
                if gain > loss {
                    inside[u] = false;
                    inside[v] = true;
                    set[i] = v;
                    current = current - loss + gain;
                    improved = true;
                    break 'scan;
                }
            }
        }
        if !improved {
            break;
        }
    }
    set.sort_unstable();
    debug_assert_eq!(current, count(&set));
    (current, set, false)
}
