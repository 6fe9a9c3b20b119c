//! Simplicial complexes, faces, incidence signs and the graph constructions
//! (complement, induced subgraph, join/cone, partite classes) built on them.
//!
//! Vertices carry an external label ([`VertexId`]) but faces store *positions*
//! in the complex's linear vertex order. A face is therefore a strictly
//! increasing tuple of positions, and the lexicographic order on these tuples
//! fixes every matrix row and column order in the crate.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// External vertex label as it appears in input files and reports.
pub type VertexId = u32;

/// A face: strictly increasing tuple of vertex positions.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Face(SmallVec<[u32; 4]>);

impl Face {
    /// The empty face, of dimension −1.
    pub fn empty() -> Self {
        Face(SmallVec::new())
    }

    /// Builds a face from positions, sorting them. Fails on repeats.
    pub fn new(mut positions: Vec<u32>) -> Result<Self> {
        positions.sort_unstable();
        if positions.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::malformed(format!(
                "repeated vertex in face {positions:?}"
            )));
        }
        Ok(Face(SmallVec::from_vec(positions)))
    }

    pub(crate) fn from_sorted(positions: &[u32]) -> Self {
        debug_assert!(positions.windows(2).all(|w| w[0] < w[1]));
        Face(SmallVec::from_slice(positions))
    }

    pub fn vertices(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dim(&self) -> isize {
        self.0.len() as isize - 1
    }

    pub fn contains_vertex(&self, v: u32) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_subset_of(&self, other: &Face) -> bool {
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.0, &other.0);
        while i < a.len() {
            if j == b.len() {
                return false;
            }
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Less => return false,
            }
        }
        true
    }

    pub fn intersection(&self, other: &Face) -> Face {
        Face(
            self.0
                .iter()
                .copied()
                .filter(|v| other.contains_vertex(*v))
                .collect(),
        )
    }

    pub fn union(&self, other: &Face) -> Face {
        let mut out: SmallVec<[u32; 4]> = self.0.iter().chain(other.0.iter()).copied().collect();
        out.sort_unstable();
        out.dedup();
        Face(out)
    }

    /// The face with the vertex at tuple position `i` removed.
    pub fn without(&self, i: usize) -> Face {
        let mut out = self.0.clone();
        out.remove(i);
        Face(out)
    }

    /// Codimension-one faces in the order produced by deleting position 0, 1, ...
    pub fn boundary(&self) -> impl Iterator<Item = (usize, Face)> + '_ {
        (0..self.0.len()).map(move |i| (i, self.without(i)))
    }

    /// All subsets, including the empty face and the face itself.
    pub fn subsets(&self) -> impl Iterator<Item = Face> + '_ {
        let n = self.0.len();
        (0u64..(1u64 << n)).map(move |mask| {
            Face(
                (0..n)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| self.0[i])
                    .collect(),
            )
        })
    }
}

impl fmt::Debug for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

/// The incidence sign `(tau : sigma)` for `sigma ⊂ tau`, `|tau| = |sigma| + 1`.
///
/// Positions encode the vertex order, so the sign is `(-1)^i` where `i` is the
/// tuple index of the vertex `tau \ sigma`.
pub fn incidence_sign(tau: &Face, sigma: &Face) -> Result<i8> {
    if tau.len() != sigma.len() + 1 || !sigma.is_subset_of(tau) {
        return Err(Error::contract(format!(
            "{sigma:?} is not a codimension-one face of {tau:?}"
        )));
    }
    let missing = tau
        .vertices()
        .iter()
        .position(|v| !sigma.contains_vertex(*v))
        .expect("one vertex of tau lies outside sigma");
    Ok(if missing % 2 == 0 { 1 } else { -1 })
}

/// Sign lookup without validation, for hot loops where containment is known.
#[inline]
pub(crate) fn sign_unchecked(tau: &Face, sigma: &Face) -> f64 {
    let t = tau.vertices();
    let s = sigma.vertices();
    let mut i = 0;
    while i < s.len() && t[i] == s[i] {
        i += 1;
    }
    if i % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// A downward-closed family of faces over an ordered vertex set.
#[derive(Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    labels: Vec<VertexId>,
    /// `(label, position)` sorted by label, for reverse lookup.
    by_label: Vec<(VertexId, u32)>,
    /// `faces[d + 1]` holds the `d`-faces in lexicographic order.
    faces: Vec<Arc<[Face]>>,
}

impl fmt::Debug for SimplicialComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SimplicialComplex")
            .field("vertices", &self.labels)
            .field("f", &self.f_vector())
            .field("facets", &self.facets_labeled())
            .finish()
    }
}

/// Order of first appearance across the facet list.
fn first_appearance_order(facets: &[Vec<VertexId>]) -> Vec<VertexId> {
    let mut seen = BTreeSet::new();
    let mut order = Vec::new();
    for v in facets.iter().flatten() {
        if seen.insert(*v) {
            order.push(*v);
        }
    }
    order
}

impl SimplicialComplex {
    /// Downward closure of `facets`; vertex order is first appearance.
    pub fn from_facets(facets: &[Vec<VertexId>]) -> Result<Self> {
        let order = first_appearance_order(facets);
        Self::with_vertices(&order, facets)
    }

    /// Downward closure of `facets` over the explicit vertex order `vertices`.
    ///
    /// Vertices listed but not covered by any facet become isolated vertices.
    pub fn with_vertices(vertices: &[VertexId], facets: &[Vec<VertexId>]) -> Result<Self> {
        let mut by_label: Vec<(VertexId, u32)> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (*v, i as u32))
            .collect();
        by_label.sort_unstable();
        if by_label.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::malformed("repeated vertex id in vertex list"));
        }
        let lookup = |v: VertexId| -> Result<u32> {
            by_label
                .binary_search_by_key(&v, |p| p.0)
                .map(|i| by_label[i].1)
                .map_err(|_| {
                    Error::malformed(format!("facet vertex {v} is not in the vertex list"))
                })
        };

        let mut tops = Vec::with_capacity(facets.len() + vertices.len());
        for facet in facets {
            let positions = facet
                .iter()
                .map(|v| lookup(*v))
                .collect::<Result<Vec<_>>>()?;
            tops.push(
                Face::new(positions)
                    .map_err(|_| Error::malformed(format!("facet {facet:?} repeats a vertex")))?,
            );
        }
        for i in 0..vertices.len() as u32 {
            tops.push(Face::from_sorted(&[i]));
        }
        Ok(Self::closure(vertices.to_vec(), by_label, &tops))
    }

    fn closure(labels: Vec<VertexId>, by_label: Vec<(VertexId, u32)>, tops: &[Face]) -> Self {
        let top_dim = tops.iter().map(Face::len).max().unwrap_or(0);
        let mut levels: Vec<BTreeSet<Face>> = vec![BTreeSet::new(); top_dim + 1];
        levels[0].insert(Face::empty());
        for t in tops {
            if levels[t.len()].contains(t) {
                continue;
            }
            for s in t.subsets() {
                let len = s.len();
                levels[len].insert(s);
            }
        }
        let faces = levels
            .into_iter()
            .map(|l| l.into_iter().collect::<Vec<_>>().into())
            .collect();
        SimplicialComplex {
            labels,
            by_label,
            faces,
        }
    }

    /// Graph on `vertices` (in that order) with the given edges.
    pub fn graph(vertices: &[VertexId], edges: &[(VertexId, VertexId)]) -> Result<Self> {
        let facets: Vec<Vec<VertexId>> = edges.iter().map(|&(u, v)| vec![u, v]).collect();
        Self::with_vertices(vertices, &facets)
    }

    /// Fast graph constructor on positions `0..n` labelled `0..n`.
    ///
    /// `edges` must be pairs `(u, v)` with `u < v < n`, sorted and distinct.
    pub fn graph_on_positions(n: u32, edges: &[(u32, u32)]) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        let labels: Vec<VertexId> = (0..n).collect();
        let by_label = (0..n).map(|i| (i, i)).collect();
        let mut faces: Vec<Arc<[Face]>> = vec![
            Arc::from(vec![Face::empty()]),
            (0..n)
                .map(|i| Face::from_sorted(&[i]))
                .collect::<Vec<_>>()
                .into(),
        ];
        if !edges.is_empty() {
            faces.push(
                edges
                    .iter()
                    .map(|&(u, v)| Face::from_sorted(&[u, v]))
                    .collect::<Vec<_>>()
                    .into(),
            );
        }
        if n == 0 {
            faces.truncate(1);
        }
        SimplicialComplex {
            labels,
            by_label,
            faces,
        }
    }

    fn from_levels(labels: Vec<VertexId>, mut levels: Vec<Vec<Face>>) -> Self {
        let mut by_label: Vec<(VertexId, u32)> = labels
            .iter()
            .enumerate()
            .map(|(i, v)| (*v, i as u32))
            .collect();
        by_label.sort_unstable();
        while levels.len() > 1 && levels.last().is_some_and(Vec::is_empty) {
            levels.pop();
        }
        let faces = levels
            .into_iter()
            .map(|mut l| {
                l.sort_unstable();
                l.dedup();
                l.into()
            })
            .collect();
        SimplicialComplex {
            labels,
            by_label,
            faces,
        }
    }

    /// Vertex labels in the complex's linear order.
    pub fn labels(&self) -> &[VertexId] {
        &self.labels
    }

    pub fn n_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn position_of(&self, label: VertexId) -> Option<u32> {
        self.by_label
            .binary_search_by_key(&label, |p| p.0)
            .ok()
            .map(|i| self.by_label[i].1)
    }

    pub fn label_face(&self, face: &Face) -> Vec<VertexId> {
        face.vertices()
            .iter()
            .map(|p| self.labels[*p as usize])
            .collect()
    }

    /// Face from external labels, if present in the complex.
    pub fn face_from_labels(&self, labels: &[VertexId]) -> Result<Face> {
        let positions = labels
            .iter()
            .map(|l| {
                self.position_of(*l)
                    .ok_or_else(|| Error::contract(format!("vertex {l} not in complex")))
            })
            .collect::<Result<Vec<_>>>()?;
        let face = Face::new(positions)?;
        if self.index_of(&face).is_none() {
            return Err(Error::contract(format!("{labels:?} is not a face")));
        }
        Ok(face)
    }

    pub fn dim(&self) -> isize {
        self.faces.len() as isize - 2
    }

    /// The `i`-faces in lexicographic order; empty outside `-1..=dim`.
    pub fn faces(&self, i: isize) -> &[Face] {
        if i < -1 {
            return &[];
        }
        self.faces
            .get((i + 1) as usize)
            .map(|a| &a[..])
            .unwrap_or(&[])
    }

    pub(crate) fn faces_shared(&self, i: isize) -> Arc<[Face]> {
        if i < -1 {
            return Arc::from(Vec::new());
        }
        self.faces
            .get((i + 1) as usize)
            .cloned()
            .unwrap_or_else(|| Arc::from(Vec::new()))
    }

    pub fn f(&self, i: isize) -> usize {
        self.faces(i).len()
    }

    /// `(f_{-1}, f_0, ..., f_dim)`.
    pub fn f_vector(&self) -> Vec<usize> {
        self.faces.iter().map(|l| l.len()).collect()
    }

    pub fn index_of(&self, face: &Face) -> Option<usize> {
        self.faces(face.dim()).binary_search(face).ok()
    }

    pub fn contains(&self, face: &Face) -> bool {
        self.index_of(face).is_some()
    }

    pub fn is_graph(&self) -> bool {
        self.dim() <= 1
    }

    pub fn edge_count(&self) -> usize {
        self.f(1)
    }

    /// Maximal faces, in order of dimension then lexicographic.
    pub fn facets(&self) -> Vec<Face> {
        let mut out = Vec::new();
        for d in 0..=self.dim() {
            let above = self.faces(d + 1);
            for f in self.faces(d) {
                if !above.iter().any(|t| f.is_subset_of(t)) {
                    out.push(f.clone());
                }
            }
        }
        out
    }

    pub fn facets_labeled(&self) -> Vec<Vec<VertexId>> {
        self.facets().iter().map(|f| self.label_face(f)).collect()
    }

    /// `deg^{(r)}` of every `(r-1)`-face, aligned with `faces(r - 1)`.
    pub fn r_degrees(&self, r: usize) -> Vec<usize> {
        let r = r as isize;
        let lower = self.faces(r - 1);
        let mut deg = vec![0usize; lower.len()];
        for tau in self.faces(r) {
            for (_, sigma) in tau.boundary() {
                let i = lower
                    .binary_search(&sigma)
                    .expect("complex is downward closed");
                deg[i] += 1;
            }
        }
        deg
    }

    /// Number of `r`-faces containing each vertex, indexed by position.
    pub fn vertex_r_degrees(&self, r: usize) -> Vec<usize> {
        let mut deg = vec![0usize; self.n_vertices()];
        for tau in self.faces(r as isize) {
            for v in tau.vertices() {
                deg[*v as usize] += 1;
            }
        }
        deg
    }

    /// Neighbour bitmasks of the 1-skeleton (positions `< 64` only).
    pub fn adjacency_masks(&self) -> Option<Vec<u64>> {
        if self.n_vertices() > 64 {
            return None;
        }
        let mut adj = vec![0u64; self.n_vertices()];
        for e in self.faces(1) {
            let (u, v) = (e.vertices()[0], e.vertices()[1]);
            adj[u as usize] |= 1 << v;
            adj[v as usize] |= 1 << u;
        }
        Some(adj)
    }

    /// Same faces, different linear order on the vertices.
    ///
    /// `order` must be a permutation of `labels()`.
    pub fn with_vertex_order(&self, order: &[VertexId]) -> Result<Self> {
        let mut sorted = order.to_vec();
        sorted.sort_unstable();
        let mut mine = self.labels.clone();
        mine.sort_unstable();
        if sorted != mine {
            return Err(Error::contract(
                "vertex order is not a permutation of the vertex set",
            ));
        }
        Self::with_vertices(order, &self.facets_labeled())
    }

    /// Complement of a graph on the same vertex order.
    pub fn complement_graph(&self) -> Result<Self> {
        if self.dim() > 1 {
            return Err(Error::contract(
                "complement is defined for graphs (dim <= 1) only",
            ));
        }
        let n = self.n_vertices() as u32;
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                let e = Face::from_sorted(&[u, v]);
                if !self.contains(&e) {
                    edges.push(e);
                }
            }
        }
        let mut levels = vec![self.faces(-1).to_vec(), self.faces(0).to_vec()];
        levels.push(edges);
        Ok(Self::from_levels(self.labels.clone(), levels))
    }

    /// The join `X * sigma` with the fresh vertices ordered after all existing ones.
    pub fn join_cone(&self, sigma: &[VertexId]) -> Result<Self> {
        if sigma.is_empty() {
            return Err(Error::contract("cone vertex set must be nonempty"));
        }
        let mut fresh = sigma.to_vec();
        fresh.sort_unstable();
        if fresh.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::contract("cone vertex set repeats a vertex"));
        }
        if let Some(v) = sigma.iter().find(|v| self.position_of(**v).is_some()) {
            return Err(Error::contract(format!(
                "cone vertex {v} already belongs to the complex"
            )));
        }
        let n = self.n_vertices() as u32;
        let mut labels = self.labels.clone();
        labels.extend_from_slice(sigma);
        let apex = Face::from_sorted(&(n..n + sigma.len() as u32).collect::<Vec<_>>());
        let top = (self.dim() + 1) as usize + sigma.len();
        let mut levels: Vec<Vec<Face>> = vec![Vec::new(); top + 1];
        for level in &self.faces {
            for tau in level.iter() {
                for eta in apex.subsets() {
                    let mut v: SmallVec<[u32; 4]> = tau.0.clone();
                    v.extend_from_slice(&eta.0);
                    levels[v.len()].push(Face(v));
                }
            }
        }
        Ok(Self::from_levels(labels, levels))
    }

    /// All faces contained in the vertex set `subset` (given as labels).
    pub fn induced_subcomplex(&self, subset: &[VertexId]) -> Result<Self> {
        let mut keep = vec![false; self.n_vertices()];
        for l in subset {
            let p = self
                .position_of(*l)
                .ok_or_else(|| Error::contract(format!("vertex {l} not in complex")))?;
            keep[p as usize] = true;
        }
        // New positions preserve the relative order.
        let mut remap = vec![u32::MAX; self.n_vertices()];
        let mut labels = Vec::new();
        for (p, k) in keep.iter().enumerate() {
            if *k {
                remap[p] = labels.len() as u32;
                labels.push(self.labels[p]);
            }
        }
        let levels = self
            .faces
            .iter()
            .map(|level| {
                level
                    .iter()
                    .filter(|f| f.vertices().iter().all(|v| keep[*v as usize]))
                    .map(|f| Face(f.vertices().iter().map(|v| remap[*v as usize]).collect()))
                    .collect()
            })
            .collect();
        Ok(Self::from_levels(labels, levels))
    }

    /// Vertex sets (as labels) of the connected components of the 1-skeleton.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let n = self.n_vertices();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut c = x;
            while p[c] != r {
                let next = p[c];
                p[c] = r;
                c = next;
            }
            r
        }
        for e in self.faces(1) {
            let a = find(&mut parent, e.vertices()[0] as usize);
            let b = find(&mut parent, e.vertices()[1] as usize);
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut groups: Vec<Vec<VertexId>> = Vec::new();
        let mut root_slot = vec![usize::MAX; n];
        for v in 0..n {
            let r = find(&mut parent, v);
            if root_slot[r] == usize::MAX {
                root_slot[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[root_slot[r]].push(self.labels[v]);
        }
        groups
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// A rainbow colouring with `dim + 1` classes, if one exists.
    ///
    /// Exact backtracking; refuses complexes with more than 24 vertices.
    pub fn partite_classes(&self) -> Result<Option<PartiteStructure>> {
        const MAX_VERTICES: usize = 24;
        let n = self.n_vertices();
        if n > MAX_VERTICES {
            return Err(Error::contract(format!(
                "partite recognition is limited to {MAX_VERTICES} vertices; supply a partition"
            )));
        }
        if self.dim() < 0 {
            return Ok(None);
        }
        let colours = (self.dim() + 1) as usize;
        let adj = self.adjacency_masks().expect("n <= 24");
        // Visit vertices so that each new one is adjacent to earlier ones when possible.
        let mut order = Vec::with_capacity(n);
        let mut placed = 0u64;
        while order.len() < n {
            let next = (0..n)
                .filter(|v| placed >> v & 1 == 0)
                .max_by_key(|v| ((adj[*v] & placed).count_ones(), std::cmp::Reverse(*v)))
                .unwrap();
            placed |= 1 << next;
            order.push(next);
        }
        let mut colour = vec![usize::MAX; n];
        fn assign(
            idx: usize,
            order: &[usize],
            adj: &[u64],
            colour: &mut [usize],
            colours: usize,
            used: usize,
        ) -> bool {
            if idx == order.len() {
                return true;
            }
            let v = order[idx];
            // Symmetry breaking: a vertex may open at most one new colour.
            for c in 0..colours.min(used + 1) {
                let clash = (0..colour.len()).any(|u| adj[v] >> u & 1 == 1 && colour[u] == c);
                if clash {
                    continue;
                }
                colour[v] = c;
                if assign(idx + 1, order, adj, colour, colours, used.max(c + 1)) {
                    return true;
                }
                colour[v] = usize::MAX;
            }
            false
        }
        if !assign(0, &order, &adj, &mut colour, colours, 0) {
            return Ok(None);
        }
        Ok(Some(PartiteStructure::from_positions(
            self, colours, &colour,
        )))
    }
}

/// A partition of the vertex set into `r + 1` classes with every face rainbow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartiteStructure {
    /// Class members as labels, in vertex order.
    classes: Vec<Vec<VertexId>>,
    /// Class index by vertex position.
    class_of: Vec<usize>,
}

impl PartiteStructure {
    fn from_positions(x: &SimplicialComplex, n_classes: usize, class_of: &[usize]) -> Self {
        let mut classes = vec![Vec::new(); n_classes];
        for (p, c) in class_of.iter().enumerate() {
            classes[*c].push(x.labels()[p]);
        }
        PartiteStructure {
            classes,
            class_of: class_of.to_vec(),
        }
    }

    /// Validates a caller-supplied partition against `x`.
    pub fn from_labels(x: &SimplicialComplex, classes: &[Vec<VertexId>]) -> Result<Self> {
        let mut class_of = vec![usize::MAX; x.n_vertices()];
        for (c, members) in classes.iter().enumerate() {
            for l in members {
                let p = x.position_of(*l).ok_or_else(|| {
                    Error::malformed(format!("partition vertex {l} not in complex"))
                })? as usize;
                if class_of[p] != usize::MAX {
                    return Err(Error::malformed(format!(
                        "vertex {l} appears in two classes"
                    )));
                }
                class_of[p] = c;
            }
        }
        if class_of.contains(&usize::MAX) {
            return Err(Error::malformed("partition does not cover the vertex set"));
        }
        let s = PartiteStructure::from_positions(x, classes.len(), &class_of);
        s.validate(x)?;
        Ok(s)
    }

    /// Every face meets each class at most once.
    pub fn validate(&self, x: &SimplicialComplex) -> Result<()> {
        for e in x.faces(1) {
            let (u, v) = (e.vertices()[0] as usize, e.vertices()[1] as usize);
            if self.class_of[u] == self.class_of[v] {
                return Err(Error::malformed(format!(
                    "edge {:?} lies inside one partite class",
                    x.label_face(e)
                )));
            }
        }
        Ok(())
    }

    pub fn classes(&self) -> &[Vec<VertexId>] {
        &self.classes
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of_position(&self, p: u32) -> usize {
        self.class_of[p as usize]
    }

    /// Indices into `x.faces(r - 1)` of the faces avoiding class `j`.
    pub fn faces_avoiding(&self, x: &SimplicialComplex, r: usize, j: usize) -> Vec<usize> {
        x.faces(r as isize - 1)
            .iter()
            .enumerate()
            .filter(|(_, f)| f.vertices().iter().all(|v| self.class_of[*v as usize] != j))
            .map(|(i, _)| i)
            .collect()
    }
}

/// Downward closure of a facet list (vertex order = first appearance).
pub fn build_complex(facets: &[Vec<VertexId>]) -> Result<SimplicialComplex> {
    SimplicialComplex::from_facets(facets)
}
