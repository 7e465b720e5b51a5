//! Chains over Z₂ and ℚ, the boundary operator, and minimal-cycle checks.
//!
//! Vertex labels are ordered numerically; a face `F = {x_1 < … < x_k}` has
//! boundary `∂F = Σ_j (−1)^j F∖{x_j}` with `j` counted from 1.

use std::collections::{BTreeMap, BTreeSet};

use num::{BigInt, Integer, One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complex::{Complex, Face, Vertex};
use crate::error::{Error, Result};
use crate::linalg::{rank_gf2, RatMatrix, Rational};

/// Largest support handled by the subset enumeration.
pub const MINIMAL_CYCLE_BUDGET: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Ring {
    Z2,
    Q,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    ring: Ring,
    face_size: usize,
    terms: BTreeMap<Face, Rational>,
}

fn sign(j: usize) -> i64 {
    if j.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `(ridge, sign)` pairs of `∂F`, with `j` 1-based.
fn boundary_terms(face: &[Vertex]) -> impl Iterator<Item = (Face, i64)> + '_ {
    (0..face.len()).map(move |i| {
        let mut ridge = face.to_vec();
        ridge.remove(i);
        (ridge, sign(i + 1))
    })
}

impl Chain {
    pub fn zero(ring: Ring, face_size: usize) -> Self {
        Self { ring, face_size, terms: BTreeMap::new() }
    }

    /// Over Z₂ coefficients must be integers and are reduced mod 2. Repeated
    /// faces add up; zero coefficients are dropped.
    pub fn new(
        ring: Ring,
        face_size: usize,
        terms: impl IntoIterator<Item = (Face, Rational)>,
    ) -> Result<Self> {
        let mut chain = Self::zero(ring, face_size);
        for (face, coef) in terms {
            let mut face = face;
            face.sort_unstable();
            if face.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Param(format!("repeated vertex in {face:?}")));
            }
            if face.len() != face_size {
                return Err(Error::Param(format!("face {face:?} does not have {face_size} vertices")));
            }
            if ring == Ring::Z2 && !coef.is_integer() {
                return Err(Error::Param("Z2 coefficients must be integers".into()));
            }
            chain.add_term(face, coef);
        }
        Ok(chain)
    }

    /// Every facet with coefficient 1. `c` must be pure.
    pub fn facet_sum(c: &Complex, ring: Ring) -> Result<Self> {
        if !c.is_pure() {
            return Err(Error::Purity);
        }
        let size = (c.dim() + 1) as usize;
        Self::new(ring, size, c.facets().iter().map(|f| (f.clone(), Rational::one())))
    }

    fn add_term(&mut self, face: Face, coef: Rational) {
        let entry = self.terms.entry(face.clone()).or_insert_with(Rational::zero);
        *entry += coef;
        if self.ring == Ring::Z2 {
            *entry = Rational::from_integer(entry.to_integer().mod_floor(&BigInt::from(2)));
        }
        if entry.is_zero() {
            self.terms.remove(&face);
        }
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn face_size(&self) -> usize {
        self.face_size
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = &Face> {
        self.terms.keys()
    }

    pub fn coefficient(&self, face: &[Vertex]) -> Rational {
        self.terms.get(face).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Face, &Rational)> {
        self.terms.iter()
    }

    /// Keeps the coefficients on `faces` and drops the rest.
    pub fn restrict(&self, faces: &BTreeSet<Face>) -> Self {
        Self {
            ring: self.ring,
            face_size: self.face_size,
            terms: self.terms.iter().filter(|(f, _)| faces.contains(*f)).map(|(f, c)| (f.clone(), c.clone())).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.ring != other.ring || self.face_size != other.face_size {
            return Err(Error::Param("chains of different rings or degrees".into()));
        }
        let mut out = self.clone();
        for (f, c) in &other.terms {
            out.add_term(f.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        let mut out = Self::zero(self.ring, self.face_size);
        for (f, c) in &self.terms {
            out.add_term(f.clone(), c * k);
        }
        out
    }

    pub fn boundary(&self) -> Self {
        let mut out = Self::zero(self.ring, self.face_size.saturating_sub(1));
        if self.face_size == 0 {
            return out;
        }
        for (face, coef) in &self.terms {
            for (ridge, s) in boundary_terms(face) {
                out.add_term(ridge, coef * Rational::from_integer(BigInt::from(s)));
            }
        }
        out
    }

    pub fn is_cycle(&self) -> bool {
        self.boundary().is_zero()
    }

    /// A nonzero cycle whose only cycle subchains are itself and 0.
    ///
    /// Over Z₂ the cycle subchains supported in `supp c` form a vector space,
    /// so this is a kernel dimension. Over ℚ they do not, and the subsets of
    /// the support are enumerated; more than [`MINIMAL_CYCLE_BUDGET`] faces is
    /// a budget error.
    pub fn is_minimal_cycle(&self) -> Result<bool> {
        if self.is_zero() || !self.is_cycle() {
            return Ok(false);
        }
        match self.ring {
            Ring::Z2 => {
                let faces: Vec<Face> = self.terms.keys().cloned().collect();
                Ok(z2_kernel_dim(&faces) == 1)
            }
            Ring::Q => subset_enumeration(self),
        }
    }

    /// Minimality by enumerating every proper nonempty subset of the support
    /// (Gray-code order, integer arithmetic). Works for both rings.
    pub fn is_minimal_cycle_by_enumeration(&self) -> Result<bool> {
        if self.is_zero() || !self.is_cycle() {
            return Ok(false);
        }
        subset_enumeration(self)
    }
}

/// `dim { x ∈ ker ∂ over Z₂ : supp x ⊆ faces }`.
fn z2_kernel_dim(faces: &[Face]) -> usize {
    let mut ridge_index: BTreeMap<Face, usize> = BTreeMap::new();
    for f in faces {
        for (r, _) in boundary_terms(f) {
            let n = ridge_index.len();
            ridge_index.entry(r).or_insert(n);
        }
    }
    let words = ridge_index.len().div_ceil(64).max(1);
    let rows: Vec<Vec<u64>> = faces
        .iter()
        .map(|f| {
            let mut row = vec![0u64; words];
            for (r, _) in boundary_terms(f) {
                let i = ridge_index[&r];
                row[i / 64] ^= 1 << (i % 64);
            }
            row
        })
        .collect();
    faces.len() - rank_gf2(rows)
}

fn subset_enumeration(chain: &Chain) -> Result<bool> {
    let n = chain.len();
    if n > MINIMAL_CYCLE_BUDGET {
        return Err(Error::Budget {
            reason: format!("support has {n} faces, enumeration budget is {MINIMAL_CYCLE_BUDGET}"),
            partial: Some("nonzero cycle; minimality undecided".into()),
        });
    }
    let modulus = (chain.ring == Ring::Z2).then_some(2i128);
    // the cycle condition is homogeneous, so clear denominators first
    let lcm = chain.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let overflow = || Error::Budget {
        reason: "coefficients too large for enumeration".into(),
        partial: Some("nonzero cycle; minimality undecided".into()),
    };
    let mut ridge_index: BTreeMap<Face, usize> = BTreeMap::new();
    let mut contributions: Vec<Vec<(usize, i128)>> = Vec::with_capacity(n);
    for (face, coef) in &chain.terms {
        let scaled = (coef.numer() * (&lcm / coef.denom())).to_i128().ok_or_else(overflow)?;
        if scaled.abs() > 1 << 100 {
            return Err(overflow());
        }
        contributions.push(
            boundary_terms(face)
                .map(|(r, s)| {
                    let k = ridge_index.len();
                    (*ridge_index.entry(r).or_insert(k), scaled * s as i128)
                })
                .collect(),
        );
    }
    let mut sums = vec![0i128; ridge_index.len()];
    let mut nonzero = 0usize;
    let full: u64 = (1u64 << n) - 1;
    let mut mask = 0u64;
    for k in 1..=full {
        let bit = k.trailing_zeros() as usize;
        let adding = mask & (1 << bit) == 0;
        mask ^= 1 << bit;
        for &(r, x) in &contributions[bit] {
            let before = sums[r] != 0;
            let mut v = if adding { sums[r] + x } else { sums[r] - x };
            if let Some(m) = modulus {
                v = v.rem_euclid(m);
            }
            sums[r] = v;
            match (before, v != 0) {
                (false, true) => nonzero += 1,
                (true, false) => nonzero -= 1,
                _ => {}
            }
        }
        if nonzero == 0 && mask != full {
            return Ok(false);
        }
    }
    Ok(true)
}

fn ridge_facet_matrix(c: &Complex) -> RatMatrix {
    let mut ridge_index: BTreeMap<Face, usize> = BTreeMap::new();
    for f in c.facets() {
        for (r, _) in boundary_terms(f) {
            let k = ridge_index.len();
            ridge_index.entry(r).or_insert(k);
        }
    }
    let mut m = RatMatrix::zeros(ridge_index.len(), c.num_facets());
    for (j, f) in c.facets().iter().enumerate() {
        for (r, s) in boundary_terms(f) {
            m.set(ridge_index[&r], j, Rational::from_integer(BigInt::from(s)));
        }
    }
    m
}

/// Whether `c` is spanned by the support of a minimal cycle over `ring`, or
/// consists of a single facet.
///
/// Over ℚ, when the cycles supported on the facets form a line this is exact.
/// Otherwise a random combination of the kernel basis is tested by subset
/// enumeration; a negative answer is confirmed with a second combination.
pub fn is_minimal_cycle_complex(c: &Complex, ring: Ring) -> Result<bool> {
    if !c.is_pure() {
        return Err(Error::Purity);
    }
    if c.dim() < 0 {
        return Ok(false);
    }
    if c.num_facets() == 1 {
        return Ok(true);
    }
    match ring {
        Ring::Z2 => {
            let sum = Chain::facet_sum(c, Ring::Z2)?;
            Ok(sum.is_cycle() && z2_kernel_dim(c.facets()) == 1)
        }
        Ring::Q => {
            let basis = ridge_facet_matrix(c).nullspace();
            let n = c.num_facets();
            let full_support_possible = (0..n).all(|j| basis.iter().any(|b| !b[j].is_zero()));
            if !full_support_possible {
                return Ok(false);
            }
            if basis.len() == 1 {
                return Ok(true);
            }
            if n > MINIMAL_CYCLE_BUDGET {
                return Err(Error::Budget {
                    reason: format!("{n} facets with a {}-dimensional cycle space", basis.len()),
                    partial: Some("a cycle with full support exists; minimality undecided".into()),
                });
            }
            let size = (c.dim() + 1) as usize;
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c1c1e);
            let mut attempts = 0;
            let mut tested = 0;
            while tested < 2 && attempts < 64 {
                attempts += 1;
                let lambda: Vec<Rational> =
                    basis.iter().map(|_| Rational::from_integer(BigInt::from(rng.gen_range(1i64..1 << 20)))).collect();
                let coefs: Vec<Rational> = (0..n)
                    .map(|j| basis.iter().zip(&lambda).map(|(b, l)| &b[j] * l).sum())
                    .collect();
                if coefs.iter().any(Zero::is_zero) {
                    continue;
                }
                tested += 1;
                let chain = Chain::new(Ring::Q, size, c.facets().iter().cloned().zip(coefs))?;
                if chain.is_minimal_cycle()? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }
}

/// A coherent ±1 orientation of a pseudomanifold as a ℚ-cycle, if one exists.
pub fn orientation_cycle(c: &Complex) -> Option<Chain> {
    if !c.is_pseudomanifold() {
        return None;
    }
    let incidence = c.ridge_incidence();
    let ridge_sign = |facet: &Face, ridge: &Face| -> i64 {
        let missing = facet.iter().position(|x| ridge.binary_search(x).is_err()).expect("ridge of facet");
        sign(missing + 1)
    };
    let facets = c.facets();
    let mut signs: Vec<Option<i64>> = vec![None; facets.len()];
    signs[0] = Some(1);
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let si = signs[i].expect("visited");
        for (r, _) in boundary_terms(&facets[i]) {
            for &j in &incidence[&r] {
                if j == i {
                    continue;
                }
                let want = -si * ridge_sign(&facets[i], &r) * ridge_sign(&facets[j], &r);
                match signs[j] {
                    None => {
                        signs[j] = Some(want);
                        queue.push_back(j);
                    }
                    Some(s) if s != want => return None,
                    Some(_) => {}
                }
            }
        }
    }
    let size = (c.dim() + 1) as usize;
    let chain = Chain::new(
        Ring::Q,
        size,
        facets.iter().cloned().zip(signs.iter().map(|s| Rational::from_integer(BigInt::from(s.expect("connected"))))),
    )
    .ok()?;
    debug_assert!(chain.is_cycle());
    Some(chain)
}

/// Conclusions of the basic structure lemma for minimal cycle complexes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasicLemmaReport {
    pub strongly_connected: bool,
    pub ridges_in_two_facets: bool,
    pub enough_vertices: bool,
    pub violations: Vec<String>,
}

impl BasicLemmaReport {
    pub fn all_pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Requires `c` to be a nontrivial minimal cycle complex over `ring`.
pub fn verify_basic_lemma(c: &Complex, ring: Ring) -> Result<BasicLemmaReport> {
    if c.num_facets() < 2 || !is_minimal_cycle_complex(c, ring)? {
        return Err(Error::Param("not a nontrivial minimal cycle complex".into()));
    }
    let d = (c.dim() + 1) as usize;
    let mut violations = Vec::new();
    let strongly_connected = c.is_strongly_connected();
    if !strongly_connected {
        violations.push("not strongly connected".to_string());
    }
    let incidence = c.ridge_incidence();
    let lonely: Vec<&Face> = incidence.iter().filter(|(_, fs)| fs.len() < 2).map(|(r, _)| r).collect();
    let ridges_in_two_facets = lonely.is_empty();
    if let Some(r) = lonely.first() {
        violations.push(format!("ridge {r:?} lies in a single facet"));
    }
    let enough_vertices = c.num_vertices() > d;
    if !enough_vertices {
        violations.push(format!("{} vertices, expected at least {}", c.num_vertices(), d + 1));
    }
    Ok(BasicLemmaReport { strongly_connected, ridges_in_two_facets, enough_vertices, violations })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyCheck {
    pub pass: bool,
    pub detail: Option<String>,
}

impl PropertyCheck {
    fn ok() -> Self {
        Self { pass: true, detail: None }
    }

    fn fail(detail: String) -> Self {
        Self { pass: false, detail: Some(detail) }
    }
}

/// Per-property verdicts for a proposed decomposition of a minimal cycle
/// complex along the edge `uv`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionReport {
    /// `c` is a nontrivial minimal cycle complex and `uv` is one of its edges.
    pub precondition: PropertyCheck,
    /// Each part is a nontrivial minimal cycle complex.
    pub parts_minimal: PropertyCheck,
    pub a_edge_in_each_part: PropertyCheck,
    pub b_new_facets_attached: PropertyCheck,
    pub c_contraction_minimal: PropertyCheck,
    pub d_graphs_cover: PropertyCheck,
    pub e_prefix_shares_facet: PropertyCheck,
}

impl DecompositionReport {
    pub fn all_pass(&self) -> bool {
        [
            &self.precondition,
            &self.parts_minimal,
            &self.a_edge_in_each_part,
            &self.b_new_facets_attached,
            &self.c_contraction_minimal,
            &self.d_graphs_cover,
            &self.e_prefix_shares_facet,
        ]
        .iter()
        .all(|p| p.pass)
    }
}

fn minus(face: &[Vertex], x: Vertex) -> Face {
    face.iter().copied().filter(|&y| y != x).collect()
}

/// Checks the edge-contraction decomposition properties for `parts`. Budget
/// errors inside the minimality checks are reported as failures with detail.
pub fn verify_fogelsanger(c: &Complex, uv: (Vertex, Vertex), parts: &[Complex], ring: Ring) -> DecompositionReport {
    let (u, v) = uv;
    let check_minimal = |x: &Complex| -> std::result::Result<(), String> {
        match is_minimal_cycle_complex(x, ring) {
            Ok(true) => Ok(()),
            Ok(false) => Err("not a minimal cycle complex".into()),
            Err(e) => Err(e.to_string()),
        }
    };

    let precondition = if c.num_facets() < 2 {
        PropertyCheck::fail("trivial complex".into())
    } else if !c.contains_face(&[u.min(v), u.max(v)]) || u == v {
        PropertyCheck::fail(format!("{u}{v} is not an edge"))
    } else {
        match check_minimal(c) {
            Ok(()) => PropertyCheck::ok(),
            Err(e) => PropertyCheck::fail(e),
        }
    };

    let mut parts_minimal = PropertyCheck::ok();
    for (i, p) in parts.iter().enumerate() {
        let res = if p.num_facets() < 2 { Err("trivial".to_string()) } else { check_minimal(p) };
        if let Err(e) = res {
            parts_minimal = PropertyCheck::fail(format!("part {i}: {e}"));
            break;
        }
    }

    let edge = [u.min(v), u.max(v)];
    let a_edge_in_each_part = match parts.iter().position(|p| !p.contains_face(&edge)) {
        None => PropertyCheck::ok(),
        Some(i) => PropertyCheck::fail(format!("part {i} lacks the edge")),
    };

    let mut b_new_facets_attached = PropertyCheck::ok();
    'parts: for (i, p) in parts.iter().enumerate() {
        for f in p.facets() {
            if c.contains_face(f) {
                continue;
            }
            let has_both = f.binary_search(&u).is_ok() && f.binary_search(&v).is_ok();
            if !has_both || !c.contains_face(&minus(f, u)) || !c.contains_face(&minus(f, v)) {
                b_new_facets_attached = PropertyCheck::fail(format!("part {i}, facet {f:?}"));
                break 'parts;
            }
        }
    }

    let mut c_contraction_minimal = PropertyCheck::ok();
    for (i, p) in parts.iter().enumerate() {
        let res = p.contract_edge(u, v).map_err(|e| e.to_string()).and_then(|q| check_minimal(&q));
        if let Err(e) = res {
            c_contraction_minimal = PropertyCheck::fail(format!("part {i}: {e}"));
            break;
        }
    }

    let mut vertices: BTreeSet<Vertex> = BTreeSet::new();
    let mut edges: BTreeSet<(Vertex, Vertex)> = BTreeSet::new();
    for p in parts {
        vertices.extend(p.vertices());
        edges.extend(p.edges());
    }
    let d_graphs_cover = if vertices == c.vertex_set() && edges == c.edges() {
        PropertyCheck::ok()
    } else {
        PropertyCheck::fail(format!(
            "union has {} vertices and {} edges, complex has {} and {}",
            vertices.len(),
            edges.len(),
            c.num_vertices(),
            c.edges().len()
        ))
    };

    let mut e_prefix_shares_facet = PropertyCheck::ok();
    let mut seen: BTreeSet<Face> = BTreeSet::new();
    for (i, p) in parts.iter().enumerate() {
        if i > 0 && !p.facets().iter().any(|f| seen.contains(f)) {
            e_prefix_shares_facet = PropertyCheck::fail(format!("part {i} shares no facet with earlier parts"));
            break;
        }
        seen.extend(p.facets().iter().cloned());
    }

    DecompositionReport {
        precondition,
        parts_minimal,
        a_edge_in_each_part,
        b_new_facets_attached,
        c_contraction_minimal,
        d_graphs_cover,
        e_prefix_shares_facet,
    }
}
