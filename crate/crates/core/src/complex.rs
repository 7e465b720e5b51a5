//! Simplicial complexes stored by their facets.
//!
//! A [`Complex`] keeps only its inclusion-maximal faces, sorted and
//! deduplicated, so two complexes with the same faces compare equal. Lower
//! faces are enumerated on demand.
//!
//! Two degenerate complexes are kept apart: the *empty* complex has no faces
//! at all, while the *void* complex `{∅}` has exactly one, the empty face.
//! Links of facets are void; restrictions to vertex sets that miss the
//! complex are void as well, since the empty face survives any restriction.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub type Vertex = u32;

/// A face is a strictly increasing list of vertex labels.
pub type Face = Vec<Vertex>;

pub(crate) fn normalize(face: impl IntoIterator<Item = Vertex>) -> Face {
    let mut f: Face = face.into_iter().collect();
    f.sort_unstable();
    f.dedup();
    f
}

/// `a ⊆ b` for sorted faces.
pub(crate) fn is_subface(a: &[Vertex], b: &[Vertex]) -> bool {
    if a.len() > b.len() {
        return false;
    }
    let mut it = b.iter();
    'outer: for x in a {
        for y in it.by_ref() {
            if y == x {
                continue 'outer;
            }
            if y > x {
                return false;
            }
        }
        return false;
    }
    true
}

pub(crate) fn binomial(n: i64, k: i64) -> i64 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i64 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// All subsets of a sorted face (including the empty set and the face itself).
pub(crate) fn subfaces(face: &[Vertex]) -> impl Iterator<Item = Face> + '_ {
    let n = face.len();
    (0u64..(1u64 << n)).map(move |mask| {
        face.iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &v)| v)
            .collect()
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Complex {
    facets: Vec<Face>,
    vertices: Vec<Vertex>,
}

/// `(f_{-1}, f_0, …, f_{dim})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FVector(pub Vec<u64>);

/// `(h_0, …, h_d)` for a pure complex of dimension `d - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HVector(pub Vec<i64>);

impl FVector {
    /// Number of `i`-dimensional faces, `i >= -1`.
    pub fn f(&self, i: isize) -> u64 {
        usize::try_from(i + 1).ok().and_then(|k| self.0.get(k)).copied().unwrap_or(0)
    }

    /// The binomial transform to the h-vector, taking `d = len - 1`.
    pub fn to_h(&self) -> HVector {
        let d = self.0.len() as i64 - 1;
        let h = (0..=d)
            .map(|j| {
                (0..=j)
                    .map(|i| {
                        let sign = if (j - i) % 2 == 0 { 1 } else { -1 };
                        sign * binomial(d - i, d - j) * self.0[i as usize] as i64
                    })
                    .sum()
            })
            .collect();
        HVector(h)
    }
}

impl HVector {
    pub fn h(&self, j: usize) -> i64 {
        self.0.get(j).copied().unwrap_or(0)
    }

    /// Inverse transform: `f_{j-1} = Σ_i C(d-i, j-i) h_i`.
    pub fn to_f(&self) -> FVector {
        let d = self.0.len() as i64 - 1;
        let f = (0..=d)
            .map(|j| {
                let s: i64 = (0..=j).map(|i| binomial(d - i, j - i) * self.0[i as usize]).sum();
                s as u64
            })
            .collect();
        FVector(f)
    }
}

impl Complex {
    /// Builds the complex spanned by `facets`, keeping only maximal sets.
    pub fn from_facets<I, F>(facets: I) -> Result<Self>
    where
        I: IntoIterator<Item = F>,
        F: IntoIterator<Item = Vertex>,
    {
        let faces: Vec<Face> = facets.into_iter().map(normalize).collect();
        if faces.is_empty() {
            return Err(Error::Construction("no facets given".into()));
        }
        if faces.iter().any(|f| f.is_empty()) {
            return Err(Error::Construction("empty facet".into()));
        }
        Ok(Self::spanned_by(faces))
    }

    /// The complex with no faces.
    pub fn empty() -> Self {
        Self { facets: Vec::new(), vertices: Vec::new() }
    }

    /// The complex `{∅}`.
    pub fn void() -> Self {
        Self { facets: vec![Vec::new()], vertices: Vec::new() }
    }

    /// `⟨S⟩` for arbitrary (possibly empty) faces; never fails.
    pub(crate) fn spanned_by(faces: impl IntoIterator<Item = Face>) -> Self {
        let mut faces: Vec<Face> = faces.into_iter().collect();
        faces.sort_unstable_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        faces.dedup();
        let mut kept: Vec<Face> = Vec::with_capacity(faces.len());
        for f in faces {
            if !kept.iter().any(|g| g.len() > f.len() && is_subface(&f, g)) {
                kept.push(f);
            }
        }
        kept.sort_unstable();
        let vertices = normalize(kept.iter().flatten().copied());
        Self { facets: kept, vertices }
    }

    pub fn facets(&self) -> &[Face] {
        &self.facets
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex_set(&self) -> BTreeSet<Vertex> {
        self.vertices.iter().copied().collect()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    /// Largest facet size minus one; `-1` for both the empty and void complex.
    pub fn dim(&self) -> isize {
        self.facets.iter().map(|f| f.len() as isize - 1).max().unwrap_or(-1)
    }

    pub fn is_empty(&self) -> bool {
        self.facets.is_empty()
    }

    pub fn is_void(&self) -> bool {
        self.facets.len() == 1 && self.facets[0].is_empty()
    }

    pub fn max_vertex(&self) -> Option<Vertex> {
        self.vertices.last().copied()
    }

    pub fn fresh_vertex(&self) -> Vertex {
        self.max_vertex().map_or(0, |v| v + 1)
    }

    pub fn contains_face(&self, face: &[Vertex]) -> bool {
        let f = normalize(face.iter().copied());
        self.facets.iter().any(|g| is_subface(&f, g))
    }

    pub fn is_facet(&self, face: &[Vertex]) -> bool {
        let f = normalize(face.iter().copied());
        self.facets.binary_search(&f).is_ok()
    }

    /// All faces with exactly `size` vertices.
    pub fn faces_of_size(&self, size: usize) -> BTreeSet<Face> {
        let mut out = BTreeSet::new();
        for f in &self.facets {
            if f.len() < size {
                continue;
            }
            for s in subfaces(f) {
                if s.len() == size {
                    out.insert(s);
                }
            }
        }
        out
    }

    pub fn all_faces(&self) -> BTreeSet<Face> {
        self.facets.iter().flat_map(|f| subfaces(f)).collect()
    }

    pub fn edges(&self) -> BTreeSet<(Vertex, Vertex)> {
        self.faces_of_size(2).into_iter().map(|e| (e[0], e[1])).collect()
    }

    /// The 1-skeleton `G(Δ)`.
    pub fn graph(&self) -> Graph {
        Graph::new(self.vertices.iter().copied(), self.edges()).expect("skeleton is a valid graph")
    }

    pub fn f_vector(&self) -> FVector {
        if self.facets.is_empty() {
            return FVector(vec![0]);
        }
        let top = (self.dim() + 1) as usize;
        let mut seen: HashSet<Face> = HashSet::new();
        let mut counts = vec![0u64; top + 1];
        for f in &self.facets {
            for s in subfaces(f) {
                let k = s.len();
                if seen.insert(s) {
                    counts[k] += 1;
                }
            }
        }
        FVector(counts)
    }

    pub fn h_vector(&self) -> Result<HVector> {
        if !self.is_pure() {
            return Err(Error::Purity);
        }
        Ok(self.f_vector().to_h())
    }

    pub fn euler_characteristic(&self) -> i64 {
        let f = self.f_vector();
        f.0.iter()
            .enumerate()
            .skip(1)
            .map(|(k, &n)| if k % 2 == 1 { n as i64 } else { -(n as i64) })
            .sum()
    }

    fn require_face(&self, face: &[Vertex]) -> Result<Face> {
        let f = normalize(face.iter().copied());
        if self.is_empty() || !self.contains_face(&f) {
            return Err(Error::Face(f));
        }
        Ok(f)
    }

    /// `lk(F) = {G : F ∩ G = ∅, F ∪ G ∈ Δ}`.
    pub fn link(&self, face: &[Vertex]) -> Result<Self> {
        let f = self.require_face(face)?;
        Ok(Self::spanned_by(
            self.facets
                .iter()
                .filter(|g| is_subface(&f, g))
                .map(|g| g.iter().copied().filter(|x| f.binary_search(x).is_err()).collect()),
        ))
    }

    /// Closed star `st(F) = {G : F ∪ G ∈ Δ}`.
    pub fn star(&self, face: &[Vertex]) -> Result<Self> {
        let f = self.require_face(face)?;
        Ok(Self::spanned_by(self.facets.iter().filter(|g| is_subface(&f, g)).cloned()))
    }

    /// `Δ[W] = {F ∈ Δ : F ⊆ W}`.
    pub fn restrict(&self, keep: &BTreeSet<Vertex>) -> Self {
        if self.is_empty() {
            return Self::empty();
        }
        Self::spanned_by(
            self.facets
                .iter()
                .map(|g| g.iter().copied().filter(|x| keep.contains(x)).collect::<Face>()),
        )
    }

    /// `Δ/uv`: identify `v` with `u`, merging faces that collapse together.
    pub fn contract_edge(&self, u: Vertex, v: Vertex) -> Result<Self> {
        if u == v {
            return Err(Error::Face(vec![u]));
        }
        self.require_face(&[u, v])?;
        Ok(Self::spanned_by(self.facets.iter().map(|g| {
            if g.binary_search(&v).is_ok() {
                normalize(g.iter().map(|&x| if x == v { u } else { x }))
            } else {
                g.clone()
            }
        })))
    }

    /// Relabels vertices through `map`; unmapped vertices keep their label.
    pub fn relabel(&self, map: &BTreeMap<Vertex, Vertex>) -> Self {
        Self::spanned_by(
            self.facets
                .iter()
                .map(|g| normalize(g.iter().map(|x| *map.get(x).unwrap_or(x)))),
        )
    }

    pub fn is_pure(&self) -> bool {
        match self.facets.first() {
            None => true,
            Some(f) => self.facets.iter().all(|g| g.len() == f.len()),
        }
    }

    /// Ridges (faces one smaller than the facets) with the facets containing
    /// them, by facet index. Meaningful for pure complexes.
    pub(crate) fn ridge_incidence(&self) -> BTreeMap<Face, Vec<usize>> {
        let mut map: BTreeMap<Face, Vec<usize>> = BTreeMap::new();
        for (idx, f) in self.facets.iter().enumerate() {
            for skip in 0..f.len() {
                let ridge: Face =
                    f.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &x)| x).collect();
                map.entry(ridge).or_default().push(idx);
            }
        }
        map
    }

    /// Facet order in which every facet after the first shares a ridge with
    /// an earlier one (breadth-first from `start`). Returns the facets reached.
    pub(crate) fn ridge_bfs_order(&self, start: usize) -> Vec<usize> {
        let incidence = self.ridge_incidence();
        let mut neighbours: Vec<Vec<usize>> = vec![Vec::new(); self.facets.len()];
        for facets in incidence.values() {
            for &a in facets {
                for &b in facets {
                    if a != b {
                        neighbours[a].push(b);
                    }
                }
            }
        }
        let mut seen = vec![false; self.facets.len()];
        let mut order = Vec::with_capacity(self.facets.len());
        if self.facets.is_empty() {
            return order;
        }
        seen[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(a) = queue.pop_front() {
            order.push(a);
            for &b in &neighbours[a] {
                if !seen[b] {
                    seen[b] = true;
                    queue.push_back(b);
                }
            }
        }
        order
    }

    pub fn is_strongly_connected(&self) -> bool {
        if self.facets.is_empty() || !self.is_pure() {
            return false;
        }
        self.ridge_bfs_order(0).len() == self.facets.len()
    }

    pub fn is_pseudomanifold(&self) -> bool {
        if self.dim() < 0 || !self.is_strongly_connected() {
            return false;
        }
        self.ridge_incidence().values().all(|f| f.len() == 2)
    }

    /// 1-skeleton connectivity. A complex with at most one vertex counts as
    /// connected.
    pub fn is_connected(&self) -> bool {
        self.graph().is_connected()
    }

    /// Pseudomanifold whose faces of dimension at most `d - 3` all have
    /// connected links (including the empty face, whose link is `Δ`).
    pub fn is_normal(&self) -> bool {
        if !self.is_pseudomanifold() {
            return false;
        }
        let d = (self.dim() + 1) as usize;
        if d < 2 {
            return true;
        }
        (0..=d - 2).all(|size| {
            self.faces_of_size(size)
                .iter()
                .all(|f| self.link(f).map(|l| l.is_connected()).unwrap_or(false))
        })
    }

    /// A pure 1-dimensional complex that is a single cycle.
    pub fn is_cycle_graph(&self) -> bool {
        if self.dim() != 1 || !self.is_pure() || self.num_vertices() < 3 {
            return false;
        }
        let g = self.graph();
        g.vertices().all(|v| g.neighbors(v).len() == 2) && g.is_connected()
    }

    /// Membership in the recursive class `C_d`, `d = dim + 1 >= 3`: 2-spheres
    /// at the base (closed connected surface with χ = 2), and pseudomanifolds
    /// whose vertex links all lie in `C_{d-1}` above it.
    pub fn in_class_cd(&self) -> bool {
        let d = self.dim() + 1;
        if d < 3 || !self.is_pseudomanifold() {
            return false;
        }
        let links_ok = |check: &dyn Fn(&Complex) -> bool| {
            self.vertices
                .iter()
                .all(|&v| self.link(&[v]).map(|l| check(&l)).unwrap_or(false))
        };
        if d == 3 {
            links_ok(&|l| l.is_cycle_graph()) && self.euler_characteristic() == 2
        } else {
            links_ok(&|l| l.in_class_cd())
        }
    }
}
