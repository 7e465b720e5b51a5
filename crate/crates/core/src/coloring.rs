//! Vertex colorings and the coordinate-support maps derived from them.
//!
//! Colors and coordinates are both 1-based: a coloring maps vertices into
//! `1..=m`, and a [`SupportMap`] assigns each vertex a subset of `1..=d`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{Complex, Vertex};
use crate::error::{Error, Result};

pub type Color = usize;

/// Backtracking budget for [`find_proper_coloring`].
pub const COLORING_NODE_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorMap {
    colors: BTreeMap<Vertex, Color>,
    palette: usize,
}

impl ColorMap {
    pub fn new(colors: BTreeMap<Vertex, Color>, palette: usize) -> Result<Self> {
        if let Some((v, c)) = colors.iter().find(|(_, &c)| c == 0 || c > palette) {
            return Err(Error::Coloring(format!("vertex {v} has color {c} outside 1..={palette}")));
        }
        Ok(Self { colors, palette })
    }

    pub fn color(&self, v: Vertex) -> Option<Color> {
        self.colors.get(&v).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vertex, Color)> + '_ {
        self.colors.iter().map(|(&v, &c)| (v, c))
    }

    pub fn palette(&self) -> usize {
        self.palette
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn covers(&self, c: &Complex) -> bool {
        c.vertices().iter().all(|v| self.colors.contains_key(v))
    }

    /// `κ⁻¹(T)`.
    pub fn preimage(&self, colors: &BTreeSet<Color>) -> BTreeSet<Vertex> {
        self.iter().filter(|(_, c)| colors.contains(c)).map(|(v, _)| v).collect()
    }

    /// Color counts `(|U ∩ κ⁻¹(i)|)_i`; uncolored vertices are ignored.
    pub fn type_of<'a>(&self, vertices: impl IntoIterator<Item = &'a Vertex>) -> Vec<usize> {
        let mut t = vec![0; self.palette];
        for v in vertices {
            if let Some(c) = self.color(*v) {
                t[c - 1] += 1;
            }
        }
        t
    }

    /// Merges consecutive colors into blocks of the given sizes: colors
    /// `1..=blocks[0]` become 1, the next `blocks[1]` become 2, and so on.
    pub fn merge_blocks(&self, blocks: &[usize]) -> Result<Self> {
        if blocks.iter().sum::<usize>() != self.palette || blocks.contains(&0) {
            return Err(Error::Param(format!(
                "blocks {blocks:?} do not partition a palette of {}",
                self.palette
            )));
        }
        let mut target = Vec::with_capacity(self.palette);
        for (i, &b) in blocks.iter().enumerate() {
            target.extend(std::iter::repeat_n(i + 1, b));
        }
        Self::new(self.iter().map(|(v, c)| (v, target[c - 1])).collect(), blocks.len())
    }

    /// Relabels colors by order of first appearance along increasing vertex
    /// labels; two colorings differ by a color permutation iff their
    /// canonical forms agree.
    pub fn canonical(&self) -> Self {
        let mut relabel: BTreeMap<Color, Color> = BTreeMap::new();
        let colors = self
            .iter()
            .map(|(v, c)| {
                let next = relabel.len() + 1;
                (v, *relabel.entry(c).or_insert(next))
            })
            .collect();
        Self { colors, palette: self.palette }
    }

    /// No face of `c` contains two vertices of the same color.
    pub fn is_proper_on(&self, c: &Complex) -> bool {
        c.facets().iter().all(|f| {
            let mut seen = BTreeSet::new();
            f.iter().all(|&v| self.color(v).is_some_and(|col| seen.insert(col)))
        })
    }

    pub fn restricted_to(&self, vertices: &BTreeSet<Vertex>) -> Self {
        Self {
            colors: self.iter().filter(|(v, _)| vertices.contains(v)).collect(),
            palette: self.palette,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColoringOutcome {
    Found(ColorMap),
    NotColorable,
    /// The backtracking search ran out of budget without deciding.
    Timeout { nodes: u64 },
}

impl ColoringOutcome {
    pub fn found(self) -> Option<ColorMap> {
        match self {
            ColoringOutcome::Found(c) => Some(c),
            _ => None,
        }
    }
}

/// A proper `d`-coloring of `G(Δ)` for `Δ` of dimension `d - 1`.
pub fn find_proper_coloring(c: &Complex) -> ColoringOutcome {
    proper_coloring_search(c, None, COLORING_NODE_BUDGET)
}

/// As [`find_proper_coloring`], but the start facet and initial color
/// permutation are drawn from `seed`.
pub fn find_proper_coloring_seeded(c: &Complex, seed: u64) -> ColoringOutcome {
    proper_coloring_search(c, Some(seed), COLORING_NODE_BUDGET)
}

fn proper_coloring_search(c: &Complex, seed: Option<u64>, budget: u64) -> ColoringOutcome {
    let d = (c.dim() + 1) as usize;
    if c.is_empty() || d == 0 {
        return ColoringOutcome::NotColorable;
    }
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    if c.is_strongly_connected() {
        let start = rng.as_mut().map_or(0, |r| r.gen_range(0..c.num_facets()));
        let mut palette: Vec<Color> = (1..=d).collect();
        if let Some(r) = rng.as_mut() {
            palette.shuffle(r);
        }
        return propagate_coloring(c, start, &palette);
    }
    backtrack_coloring(c, d, budget)
}

/// In a strongly connected pure complex every facet is rainbow, so the
/// coloring of one facet forces the rest through shared ridges.
fn propagate_coloring(c: &Complex, start: usize, palette: &[Color]) -> ColoringOutcome {
    let d = palette.len();
    let facets = c.facets();
    let mut colors: BTreeMap<Vertex, Color> = BTreeMap::new();
    for (&v, &col) in facets[start].iter().zip(palette) {
        colors.insert(v, col);
    }
    for idx in c.ridge_bfs_order(start) {
        let f = &facets[idx];
        let used: BTreeSet<Color> = f.iter().filter_map(|v| colors.get(v).copied()).collect();
        let missing: Vec<Vertex> = f.iter().copied().filter(|v| !colors.contains_key(v)).collect();
        if used.len() + missing.len() != f.len() || missing.len() > 1 {
            return ColoringOutcome::NotColorable;
        }
        if let Some(&v) = missing.first() {
            let free = (1..=d).find(|col| !used.contains(col)).expect("one color free");
            colors.insert(v, free);
        }
    }
    let map = ColorMap { colors, palette: d };
    if map.is_proper_on(c) {
        ColoringOutcome::Found(map)
    } else {
        ColoringOutcome::NotColorable
    }
}

fn backtrack_coloring(c: &Complex, d: usize, budget: u64) -> ColoringOutcome {
    let g = c.graph();
    let adj = g.adjacency();
    // BFS order over every component keeps constrained vertices early
    let mut order: Vec<Vertex> = Vec::with_capacity(g.num_vertices());
    let mut seen = BTreeSet::new();
    for v in g.vertices() {
        if !seen.insert(v) {
            continue;
        }
        let mut queue = VecDeque::from([v]);
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for &y in &adj[&x] {
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
    }
    let pos: BTreeMap<Vertex, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let earlier: Vec<Vec<usize>> = order
        .iter()
        .map(|v| adj[v].iter().map(|w| pos[w]).filter(|&j| j < pos[v]).collect())
        .collect();

    let mut assign: Vec<Color> = vec![0; order.len()];
    let mut nodes = 0u64;
    // iterative DFS; colors above max-used + 1 are symmetric and skipped
    let mut i = 0usize;
    let mut max_used: Vec<Color> = vec![0; order.len() + 1];
    loop {
        if i == order.len() {
            let colors = order.iter().zip(&assign).map(|(&v, &col)| (v, col)).collect();
            return ColoringOutcome::Found(ColorMap { colors, palette: d });
        }
        nodes += 1;
        if nodes > budget {
            return ColoringOutcome::Timeout { nodes };
        }
        let limit = d.min(max_used[i] + 1);
        let mut next = assign[i] + 1;
        while next <= limit && earlier[i].iter().any(|&j| assign[j] == next) {
            next += 1;
        }
        if next <= limit {
            assign[i] = next;
            max_used[i + 1] = max_used[i].max(next);
            i += 1;
        } else {
            assign[i] = 0;
            if i == 0 {
                return ColoringOutcome::NotColorable;
            }
            i -= 1;
        }
    }
}

fn check_sum(a: &[usize], d: usize) -> Result<()> {
    if a.is_empty() || a.contains(&0) || a.iter().sum::<usize>() != d {
        return Err(Error::Param(format!("a = {a:?} must be positive and sum to {d}")));
    }
    Ok(())
}

/// `κ` is an **a**-coloring of the pure complex `c`: every facet meets color
/// `i` in exactly `a_i` vertices.
pub fn verify_a_coloring(c: &Complex, coloring: &ColorMap, a: &[usize]) -> Result<bool> {
    if !c.is_pure() {
        return Err(Error::Purity);
    }
    check_sum(a, (c.dim() + 1) as usize)?;
    if !coloring.covers(c) || coloring.iter().any(|(_, col)| col > a.len()) {
        return Ok(false);
    }
    Ok(c.facets().iter().all(|f| {
        let mut t = vec![0usize; a.len()];
        for &v in f {
            t[coloring.color(v).expect("covered") - 1] += 1;
        }
        t == a
    }))
}

/// `Δ_T = Δ[κ⁻¹(T)]`.
pub fn rank_selected(c: &Complex, coloring: &ColorMap, colors: &BTreeSet<Color>) -> Complex {
    c.restrict(&coloring.preimage(colors))
}

/// `|U ∩ F| >= k` for every facet `F`.
pub fn is_transversal(c: &Complex, u: &BTreeSet<Vertex>, k: usize) -> bool {
    c.facets().iter().all(|f| f.iter().filter(|v| u.contains(v)).count() >= k)
}

/// Allowed coordinates `L(v) ⊆ {1, …, d}` per vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportMap {
    d: usize,
    sets: BTreeMap<Vertex, BTreeSet<usize>>,
}

impl SupportMap {
    pub fn new(d: usize, sets: BTreeMap<Vertex, BTreeSet<usize>>) -> Result<Self> {
        for (v, s) in &sets {
            if s.iter().any(|&j| j == 0 || j > d) {
                return Err(Error::Support(format!("L({v}) = {s:?} leaves 1..={d}")));
            }
        }
        Ok(Self { d, sets })
    }

    /// Every listed vertex may use every coordinate.
    pub fn full(d: usize, vertices: impl IntoIterator<Item = Vertex>) -> Self {
        let all: BTreeSet<usize> = (1..=d).collect();
        Self { d, sets: vertices.into_iter().map(|v| (v, all.clone())).collect() }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, v: Vertex) -> Option<&BTreeSet<usize>> {
        self.sets.get(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vertex, &BTreeSet<usize>)> + '_ {
        self.sets.iter().map(|(&v, s)| (v, s))
    }

    pub fn insert(&mut self, v: Vertex, set: BTreeSet<usize>) -> Result<()> {
        if set.iter().any(|&j| j == 0 || j > self.d) {
            return Err(Error::Support(format!("L({v}) = {set:?} leaves 1..={}", self.d)));
        }
        self.sets.insert(v, set);
        Ok(())
    }

    /// `L_{κ,a}`: `[d]` is cut into consecutive blocks `I_1, …, I_m` with
    /// `|I_i| = a_i`, and `L(v) = I_{κ(v)}`.
    pub fn from_coloring(coloring: &ColorMap, a: &[usize]) -> Result<Self> {
        let d = a.iter().sum();
        check_sum(a, d)?;
        let blocks = consecutive_blocks(a, 0);
        let mut sets = BTreeMap::new();
        for (v, c) in coloring.iter() {
            let block = blocks
                .get(c - 1)
                .ok_or_else(|| Error::Support(format!("color {c} of vertex {v} has no block")))?;
            sets.insert(v, block.clone());
        }
        Ok(Self { d, sets })
    }
}

fn consecutive_blocks(sizes: &[usize], offset: usize) -> Vec<BTreeSet<usize>> {
    let mut start = offset + 1;
    sizes
        .iter()
        .map(|&s| {
            let block = (start..start + s).collect();
            start += s;
            block
        })
        .collect()
}

/// Mixed support map: vertices of the `(>= a)`-transversal set `X` are
/// unconstrained, every other vertex `v` is confined to `I_{κ(v)}`, where the
/// blocks `I_i` (`|I_i| = b_i`) are laid out consecutively after the first
/// `a` coordinates.
pub fn transversal_support_map(
    c: &Complex,
    free: &BTreeSet<Vertex>,
    coloring: &ColorMap,
    b: &[usize],
    a: usize,
) -> Result<SupportMap> {
    if !c.is_pure() {
        return Err(Error::Purity);
    }
    let d = (c.dim() + 1) as usize;
    if a > d || b.iter().sum::<usize>() + a != d || b.contains(&0) {
        return Err(Error::Param(format!("need a + sum(b) = {d} with positive b, got a = {a}, b = {b:?}")));
    }
    if !is_transversal(c, free, a) {
        return Err(Error::Coloring(format!("free set is not (>= {a})-transversal")));
    }
    for f in c.facets() {
        let t = coloring.type_of(f.iter().filter(|v| !free.contains(v)));
        if t.len() > b.len() && t[b.len()..].iter().any(|&n| n > 0) {
            return Err(Error::Coloring(format!("facet {f:?} uses a color without a block")));
        }
        if t.iter().zip(b).any(|(&n, &cap)| n > cap) {
            return Err(Error::Coloring(format!("facet {f:?} exceeds the color bounds {b:?}")));
        }
    }
    let blocks = consecutive_blocks(b, a);
    let all: BTreeSet<usize> = (1..=d).collect();
    let mut sets = BTreeMap::new();
    for &v in c.vertices() {
        let set = if free.contains(&v) {
            all.clone()
        } else {
            let col = coloring
                .color(v)
                .ok_or_else(|| Error::Coloring(format!("vertex {v} is neither free nor colored")))?;
            blocks[col - 1].clone()
        };
        sets.insert(v, set);
    }
    Ok(SupportMap { d, sets })
}
