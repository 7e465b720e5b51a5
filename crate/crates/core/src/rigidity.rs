//! Bar-joint frameworks and exact infinitesimal rigidity.
//!
//! All verdicts come from exact rational ranks. A rank taken modulo a
//! 62-bit prime is used only as a lower bound that can settle full-rank
//! cases without the fraction-free elimination.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use num::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coloring::SupportMap;
use crate::complex::{binomial, Vertex};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{random_prime_62, rat, RatMatrix, Rational};

pub type Point = Vec<Rational>;

/// Exclusive upper end of the sampled coordinates.
pub const SAMPLE_BOUND: i64 = 1 << 31;
/// Largest number of halvings tried when searching for a splitting parameter.
pub const SPLIT_HALVINGS: u32 = 64;

/// A graph with a point in `ℚ^d` for every vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Framework {
    graph: Graph,
    d: usize,
    points: BTreeMap<Vertex, Point>,
}

impl Framework {
    pub fn new(graph: Graph, d: usize, points: BTreeMap<Vertex, Point>) -> Result<Self> {
        for v in graph.vertices() {
            match points.get(&v) {
                None => return Err(Error::Geometry(format!("vertex {v} has no point"))),
                Some(p) if p.len() != d => {
                    return Err(Error::Geometry(format!("point of {v} has dimension {}, expected {d}", p.len())))
                }
                Some(_) => {}
            }
        }
        let points = points.into_iter().filter(|(v, _)| graph.contains_vertex(*v)).collect();
        Ok(Self { graph, d, points })
    }

    pub fn from_i64(graph: Graph, d: usize, points: &[(Vertex, Vec<i64>)]) -> Result<Self> {
        let points = points.iter().map(|(v, p)| (*v, p.iter().map(|&x| rat(x)).collect())).collect();
        Self::new(graph, d, points)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn point(&self, v: Vertex) -> Option<&Point> {
        self.points.get(&v)
    }

    pub fn points(&self) -> &BTreeMap<Vertex, Point> {
        &self.points
    }

    /// Restriction to the subgraph induced on `keep`.
    pub fn induced(&self, keep: &BTreeSet<Vertex>) -> Self {
        let graph = self.graph.induced(keep);
        let points = self.points.iter().filter(|(v, _)| keep.contains(v)).map(|(v, p)| (*v, p.clone())).collect();
        Self { graph, d: self.d, points }
    }

    /// Same points on a different graph; `graph` may only use vertices with points.
    pub fn with_graph(&self, graph: Graph) -> Result<Self> {
        Self::new(graph, self.d, self.points.clone())
    }

    pub fn scaled(&self, k: &Rational) -> Self {
        let points = self.points.iter().map(|(v, p)| (*v, p.iter().map(|x| x * k).collect())).collect();
        Self { graph: self.graph.clone(), d: self.d, points }
    }

    fn column_index(&self) -> BTreeMap<Vertex, usize> {
        self.points.keys().enumerate().map(|(i, v)| (*v, i * self.d)).collect()
    }
}

/// `|E| × d|V|`; the row of `ij` carries `p(j) − p(i)` in the columns of
/// `i` and `p(i) − p(j)` in those of `j`. Columns follow the vertex order,
/// then the coordinate order.
pub fn rigidity_matrix(fw: &Framework) -> RatMatrix {
    let d = fw.d;
    let col = fw.column_index();
    let mut m = RatMatrix::zeros(0, d * fw.points.len());
    for (i, j) in fw.graph.edges() {
        let (pi, pj) = (&fw.points[&i], &fw.points[&j]);
        let mut row = vec![Rational::zero(); d * fw.points.len()];
        for k in 0..d {
            let diff = &pj[k] - &pi[k];
            row[col[&j] + k] = -diff.clone();
            row[col[&i] + k] = diff;
        }
        m.push_row(row);
    }
    m
}

fn screening_prime() -> u64 {
    static PRIME: OnceLock<u64> = OnceLock::new();
    *PRIME.get_or_init(|| random_prime_62(&mut ChaCha8Rng::seed_from_u64(0x5c4e_e41e)))
}

/// Exact rank by fraction-free elimination.
pub fn rank_exact(m: &RatMatrix) -> usize {
    m.rank()
}

/// Exact rank of `m` given that it cannot exceed `upper`. The modular rank
/// never exceeds the rational one, so reaching `upper` settles it; anything
/// less falls through to exact elimination.
pub fn rank_with_bound(m: &RatMatrix, upper: usize) -> usize {
    if m.rank_mod(screening_prime()) >= upper {
        return upper;
    }
    m.rank()
}

fn homogenized_rank(points: &[&Point]) -> usize {
    let Some(first) = points.first() else { return 0 };
    let rows = points
        .iter()
        .map(|p| p.iter().cloned().chain(std::iter::once(Rational::one())).collect())
        .collect();
    RatMatrix::from_rows(first.len() + 1, rows).rank()
}

/// Dimension of the affine span of `p(U)`; −1 for the empty set.
pub fn affine_dimension(fw: &Framework, u: &BTreeSet<Vertex>) -> isize {
    let pts: Vec<&Point> = u.iter().filter_map(|v| fw.points.get(v)).collect();
    homogenized_rank(&pts) as isize - 1
}

/// `p(U)` affinely independent, i.e. the homogenized points have rank `|U|`.
pub fn affinely_independent(fw: &Framework, u: &BTreeSet<Vertex>) -> bool {
    affine_dimension(fw, u) + 1 == u.len() as isize
}

/// Rank of the translations and elementary rotations evaluated at `p`.
pub fn trivial_motion_dim(fw: &Framework) -> usize {
    let d = fw.d;
    let n = fw.points.len();
    if n == 0 {
        return 0;
    }
    let mut m = RatMatrix::zeros(0, d * n);
    for k in 0..d {
        let mut row = vec![Rational::zero(); d * n];
        for i in 0..n {
            row[i * d + k] = Rational::one();
        }
        m.push_row(row);
    }
    for a in 0..d {
        for b in a + 1..d {
            let mut row = vec![Rational::zero(); d * n];
            for (i, p) in fw.points.values().enumerate() {
                row[i * d + a] = p[b].clone();
                row[i * d + b] = -p[a].clone();
            }
            m.push_row(row);
        }
    }
    m.rank()
}

/// Dimensions of a framework's motion and stress spaces with the verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RigidityReport {
    pub edges: usize,
    pub vertices: usize,
    pub d: usize,
    pub rank: usize,
    pub motion_dim: usize,
    pub trivial_motion_dim: usize,
    pub stress_dim: usize,
    pub rigid: bool,
    pub affine_dim: isize,
    /// The closed-form test `rank = d|V| − C(d+1, 2)` is only valid when the
    /// points span at least a hyperplane.
    pub rank_criterion_applicable: bool,
    pub rank_criterion: bool,
    pub seed: Option<u64>,
    pub sampling: String,
}

pub fn is_infinitesimally_rigid(fw: &Framework) -> RigidityReport {
    let d = fw.d;
    let n = fw.points.len();
    let e = fw.graph.num_edges();
    let trivial = trivial_motion_dim(fw);
    let rank = rank_with_bound(&rigidity_matrix(fw), e.min(d * n - trivial));
    let motion_dim = d * n - rank;
    let affine_dim = affine_dimension(fw, &fw.points.keys().copied().collect());
    let full = d as i64 * n as i64 - binomial(d as i64 + 1, 2);
    RigidityReport {
        edges: e,
        vertices: n,
        d,
        rank,
        motion_dim,
        trivial_motion_dim: trivial,
        stress_dim: e - rank,
        rigid: motion_dim == trivial,
        affine_dim,
        rank_criterion_applicable: affine_dim >= d as isize - 1,
        rank_criterion: rank as i64 == full,
        seed: None,
        sampling: "given".into(),
    }
}

/// `|E| − rank R(G, p)`.
pub fn stress_space_dim(fw: &Framework) -> usize {
    fw.graph.num_edges() - rank_exact(&rigidity_matrix(fw))
}

/// `L`-sparse sample: every allowed coordinate uniform in `[1, 2^31)`,
/// forbidden ones 0. Vertices are visited in increasing order and only
/// allowed coordinates consume randomness.
pub fn sample_sparse(g: &Graph, l: &SupportMap, seed: u64) -> Result<Framework> {
    let d = l.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = BTreeMap::new();
    for v in g.vertices() {
        let allowed = l.get(v).ok_or_else(|| Error::Support(format!("L({v}) undefined")))?;
        if allowed.is_empty() {
            return Err(Error::Support(format!("L({v}) is empty")));
        }
        let p: Point = (1..=d)
            .map(|j| if allowed.contains(&j) { rat(rng.gen_range(1..SAMPLE_BOUND)) } else { Rational::zero() })
            .collect();
        points.insert(v, p);
    }
    Framework::new(g.clone(), d, points)
}

/// Unconstrained sample in `ℚ^d`.
pub fn sample_generic(g: &Graph, d: usize, seed: u64) -> Framework {
    sample_sparse(g, &SupportMap::full(d, g.vertices()), seed).expect("full support map")
}

/// Whether `|⋃_{v∈W} L(v)| + 1 ≥ |W|` for every `W ⊆ U`: by Hall's theorem,
/// whether `U` can be matched into `[d+1]` when `v` may use `L(v) ∪ {d+1}`.
pub fn hall_condition(l: &SupportMap, u: &BTreeSet<Vertex>) -> Result<bool> {
    let d = l.dim();
    if u.len() > d + 1 {
        return Err(Error::Param(format!("|U| = {} exceeds d + 1 = {}", u.len(), d + 1)));
    }
    let adj: Vec<Vec<usize>> = u
        .iter()
        .map(|&v| {
            let set = l.get(v).ok_or_else(|| Error::Support(format!("L({v}) undefined")))?;
            Ok(set.iter().copied().chain(std::iter::once(d + 1)).collect())
        })
        .collect::<Result<_>>()?;
    let mut owner: Vec<Option<usize>> = vec![None; d + 2];
    fn augment(x: usize, adj: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
        for &j in &adj[x] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            if owner[j].is_none_or(|y| augment(y, adj, owner, seen)) {
                owner[j] = Some(x);
                return true;
            }
        }
        false
    }
    for x in 0..adj.len() {
        let mut seen = vec![false; d + 2];
        if !augment(x, &adj, &mut owner, &mut seen) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The hyperplane `{x : normal · x = offset}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hyperplane {
    pub normal: Vec<Rational>,
    pub offset: Rational,
}

impl Hyperplane {
    pub fn new(normal: Vec<Rational>, offset: Rational) -> Result<Self> {
        if normal.iter().all(Zero::is_zero) {
            return Err(Error::Geometry("zero normal vector".into()));
        }
        Ok(Self { normal, offset })
    }

    fn eval(&self, x: &[Rational]) -> Rational {
        self.normal.iter().zip(x).map(|(a, b)| a * b).sum()
    }
}

/// Central projection from the apex onto `H`, expressed in `d − 1`
/// coordinates by dropping the first coordinate where the normal is nonzero
/// (an affine chart of `H`, which preserves infinitesimal rigidity).
pub fn cone_project(fw: &Framework, apex: Vertex, h: &Hyperplane) -> Result<Framework> {
    let d = fw.d;
    if h.normal.len() != d {
        return Err(Error::Geometry(format!("hyperplane lives in dimension {}, framework in {d}", h.normal.len())));
    }
    if d < 2 {
        return Err(Error::Geometry("cone projection needs d >= 2".into()));
    }
    let pa = fw.points.get(&apex).ok_or_else(|| Error::Geometry(format!("apex {apex} is not a vertex")))?;
    let others: BTreeSet<Vertex> = fw.graph.vertices().filter(|&x| x != apex).collect();
    if fw.graph.neighbors(apex) != others {
        return Err(Error::Geometry(format!("{apex} is not a cone apex")));
    }
    let apex_level = h.eval(pa);
    if apex_level == h.offset {
        return Err(Error::Geometry("apex lies on the hyperplane".into()));
    }
    let drop = h.normal.iter().position(|x| !x.is_zero()).expect("nonzero normal");
    let mut points = BTreeMap::new();
    for &u in &others {
        let w: Point = fw.points[&u].iter().zip(pa).map(|(x, y)| x - y).collect();
        if w.iter().all(Zero::is_zero) {
            return Err(Error::Geometry(format!("p({u}) coincides with the apex")));
        }
        let slope = h.eval(&w);
        if slope.is_zero() {
            return Err(Error::Geometry(format!("line through {u} is parallel to the hyperplane")));
        }
        let t = (&h.offset - &apex_level) / slope;
        let x: Point = pa.iter().zip(&w).map(|(a, b)| a + &t * b).collect();
        points.insert(u, x.into_iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, c)| c).collect());
    }
    Framework::new(fw.graph.induced(&others), d - 1, points)
}

/// Extends a rigid framework on `G/uv` (with `v` contracted onto `u`) to `G`
/// by placing `v` at `p(u) + t z`, trying `t = 1, 1/2, 1/4, …`.
pub fn vertex_split(
    contracted: &Framework,
    g: &Graph,
    u: Vertex,
    v: Vertex,
    c: &BTreeSet<Vertex>,
    z: &Point,
) -> Result<Framework> {
    let d = contracted.d;
    let quotient = g.contract(u, v).map_err(|_| Error::Split(format!("{u}{v} is not an edge")))?;
    if contracted.graph != quotient {
        return Err(Error::Split("framework graph is not G/uv".into()));
    }
    if c.len() + 1 != d {
        return Err(Error::Split(format!("|C| = {}, expected d - 1 = {}", c.len(), d - 1)));
    }
    if !c.is_subset(&g.common_neighbors(u, v)) {
        return Err(Error::Split("C is not inside N(u) ∩ N(v)".into()));
    }
    if z.len() != d {
        return Err(Error::Split("z has the wrong dimension".into()));
    }
    let pu = contracted.points[&u].clone();
    let diffs: Vec<Vec<Rational>> =
        c.iter().map(|w| contracted.points[w].iter().zip(&pu).map(|(a, b)| a - b).collect()).collect();
    if RatMatrix::from_rows(d, diffs.clone()).rank() < d - 1 {
        return Err(Error::Split("p(w) − p(u), w ∈ C, are linearly dependent".into()));
    }
    let mut with_z = diffs;
    with_z.push(z.clone());
    if RatMatrix::from_rows(d, with_z).rank() < d {
        return Err(Error::Split("z lies in the span of p(C) − p(u)".into()));
    }
    if !is_infinitesimally_rigid(contracted).rigid {
        return Err(Error::Split("(G/uv, p) is not infinitesimally rigid".into()));
    }
    let mut t = Rational::one();
    let half = Rational::new(1.into(), 2.into());
    for _ in 0..=SPLIT_HALVINGS {
        let mut points = contracted.points.clone();
        points.insert(v, pu.iter().zip(z).map(|(a, b)| a + &t * b).collect());
        let fw = Framework::new(g.clone(), d, points)?;
        if is_infinitesimally_rigid(&fw).rigid {
            return Ok(fw);
        }
        t *= &half;
    }
    Err(Error::Budget {
        reason: format!("no rigid split among t = 2^-k, k <= {SPLIT_HALVINGS}"),
        partial: None,
    })
}

/// `p(V1 ∩ V2)` spans an affine subspace of dimension at least `d − 1`.
pub fn glue_precondition(fw: &Framework, v1: &BTreeSet<Vertex>, v2: &BTreeSet<Vertex>) -> bool {
    let shared: BTreeSet<Vertex> = v1.intersection(v2).copied().collect();
    affine_dimension(fw, &shared) >= fw.d as isize - 1
}

/// Outcome of a search for an `L`-sparse rigid realisation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SparseRigidityVerdict {
    pub rigid: bool,
    pub trials: usize,
    pub witness_seed: Option<u64>,
    pub max_rank: usize,
    /// `d|V|` minus the trivial motions of the best sample.
    pub target_rank: usize,
    pub note: String,
    pub samples: Vec<RigidityReport>,
}

/// Seed of the `i`-th sample of a search started at `seed`.
pub fn trial_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_add(i as u64)
}

/// Samples up to `trials` `L`-sparse configurations and stops at the first
/// rigid one. A rigid sample is a certificate. No rigid sample is only
/// evidence: random integers can, with small probability, land on a special
/// configuration.
pub fn is_sparse_rigid(g: &Graph, l: &SupportMap, trials: usize, seed: u64) -> Result<SparseRigidityVerdict> {
    if trials == 0 {
        return Err(Error::Param("need at least one trial".into()));
    }
    let mut samples = Vec::new();
    let mut best: Option<(usize, usize)> = None;
    for i in 0..trials {
        let s = trial_seed(seed, i);
        let fw = sample_sparse(g, l, s)?;
        let mut report = is_infinitesimally_rigid(&fw);
        report.seed = Some(s);
        report.sampling = "sparse".into();
        let target = report.d * report.vertices - report.trivial_motion_dim;
        if best.is_none_or(|(r, _)| report.rank > r) {
            best = Some((report.rank, target));
        }
        let rigid = report.rigid;
        samples.push(report);
        if rigid {
            let (max_rank, target_rank) = best.expect("one sample");
            return Ok(SparseRigidityVerdict {
                rigid: true,
                trials: i + 1,
                witness_seed: Some(s),
                max_rank,
                target_rank,
                note: "rigid witness found; exact certificate".into(),
                samples,
            });
        }
    }
    let (max_rank, target_rank) = best.expect("one sample");
    Ok(SparseRigidityVerdict {
        rigid: false,
        trials,
        witness_seed: None,
        max_rank,
        target_rank,
        note: format!(
            "no witness in {trials} random sparse samples; strong evidence but not a proof, \
             since each relevant minor vanishes at a random sample only with small probability"
        ),
        samples,
    })
}

/// `‖·‖_∞` of a point, used by tests and reports.
pub fn max_abs_coordinate(p: &Point) -> Rational {
    p.iter().map(Signed::abs).max().unwrap_or_else(Rational::zero)
}
