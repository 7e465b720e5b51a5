use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::complex::Vertex;
use crate::error::{Error, Result};

/// Simple undirected graph on integer vertex labels. Edges are stored as
/// ordered pairs `(a, b)` with `a < b`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    vertices: BTreeSet<Vertex>,
    edges: BTreeSet<(Vertex, Vertex)>,
}

fn ordered(a: Vertex, b: Vertex) -> (Vertex, Vertex) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Graph {
    pub fn new(
        vertices: impl IntoIterator<Item = Vertex>,
        edges: impl IntoIterator<Item = (Vertex, Vertex)>,
    ) -> Result<Self> {
        let vertices: BTreeSet<Vertex> = vertices.into_iter().collect();
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::Construction(format!("loop at vertex {a}")));
            }
            if !vertices.contains(&a) || !vertices.contains(&b) {
                return Err(Error::Construction(format!(
                    "edge {a}-{b} has an endpoint outside the vertex set"
                )));
            }
            set.insert(ordered(a, b));
        }
        Ok(Self { vertices, edges: set })
    }

    pub fn complete(vertices: impl IntoIterator<Item = Vertex>) -> Self {
        let vertices: BTreeSet<Vertex> = vertices.into_iter().collect();
        let list: Vec<Vertex> = vertices.iter().copied().collect();
        let mut edges = BTreeSet::new();
        for (i, &a) in list.iter().enumerate() {
            for &b in &list[i + 1..] {
                edges.insert((a, b));
            }
        }
        Self { vertices, edges }
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = Vertex> + '_ {
        self.vertices.iter().copied()
    }

    pub fn vertex_set(&self) -> &BTreeSet<Vertex> {
        &self.vertices
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = (Vertex, Vertex)> + '_ {
        self.edges.iter().copied()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        self.vertices.contains(&v)
    }

    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        a != b && self.edges.contains(&ordered(a, b))
    }

    pub fn neighbors(&self, v: Vertex) -> BTreeSet<Vertex> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn adjacency(&self) -> BTreeMap<Vertex, BTreeSet<Vertex>> {
        let mut adj: BTreeMap<Vertex, BTreeSet<Vertex>> =
            self.vertices.iter().map(|&v| (v, BTreeSet::new())).collect();
        for &(a, b) in &self.edges {
            adj.entry(a).or_default().insert(b);
            adj.entry(b).or_default().insert(a);
        }
        adj
    }

    pub fn common_neighbors(&self, u: Vertex, v: Vertex) -> BTreeSet<Vertex> {
        let nu = self.neighbors(u);
        self.neighbors(v).intersection(&nu).copied().collect()
    }

    /// `G/uv`: contract `v` onto `u`, keeping the graph simple.
    pub fn contract(&self, u: Vertex, v: Vertex) -> Result<Self> {
        if !self.has_edge(u, v) {
            return Err(Error::Face(vec![u.min(v), u.max(v)]));
        }
        let vertices: BTreeSet<Vertex> = self.vertices.iter().copied().filter(|&w| w != v).collect();
        let mut edges = BTreeSet::new();
        for &(a, b) in &self.edges {
            let a = if a == v { u } else { a };
            let b = if b == v { u } else { b };
            if a != b {
                edges.insert(ordered(a, b));
            }
        }
        Ok(Self { vertices, edges })
    }

    /// Cone graph `G * {apex}`.
    pub fn cone(&self, apex: Vertex) -> Result<Self> {
        if self.vertices.contains(&apex) {
            return Err(Error::Construction(format!("apex {apex} already a vertex")));
        }
        let mut out = self.clone();
        for &w in &self.vertices {
            out.edges.insert(ordered(w, apex));
        }
        out.vertices.insert(apex);
        Ok(out)
    }

    pub fn induced(&self, keep: &BTreeSet<Vertex>) -> Self {
        Self {
            vertices: self.vertices.intersection(keep).copied().collect(),
            edges: self
                .edges
                .iter()
                .copied()
                .filter(|(a, b)| keep.contains(a) && keep.contains(b))
                .collect(),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        Self {
            vertices: self.vertices.union(&other.vertices).copied().collect(),
            edges: self.edges.union(&other.edges).copied().collect(),
        }
    }

    pub fn fresh_vertex(&self) -> Vertex {
        self.vertices.iter().next_back().map_or(0, |&v| v + 1)
    }

    pub fn is_connected(&self) -> bool {
        let Some(&start) = self.vertices.iter().next() else {
            return true;
        };
        let adj = self.adjacency();
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for &y in &adj[&x] {
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        seen.len() == self.vertices.len()
    }
}
