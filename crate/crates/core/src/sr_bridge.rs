//! Degree-one and degree-two pieces of the Stanley–Reisner ring modulo a
//! linear system of parameters, computed through rigidity.
//!
//! A sequence `θ_i = Σ_v p(v)_i x_v` of `d` linear forms is identified with
//! the point configuration `p : V → ℚ^d`; `ω` is always `Σ_v x_v`.

use std::collections::BTreeMap;

use num::Zero;
use serde::Serialize;

use crate::coloring::{verify_a_coloring, ColorMap, SupportMap};
use crate::complex::{Complex, Face, Vertex};
use crate::error::{Error, Result};
use crate::linalg::{RatMatrix, Rational};
use crate::rigidity::{is_infinitesimally_rigid, sample_sparse, stress_space_dim, trial_seed, Framework, Point, RigidityReport};

/// Attempts made by [`colored_sop`] before giving up.
pub const COLORED_SOP_ATTEMPTS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LsopCandidate {
    d: usize,
    points: BTreeMap<Vertex, Point>,
    /// Seed of the sample this candidate came from, if any.
    pub seed: Option<u64>,
}

impl LsopCandidate {
    pub fn new(d: usize, points: BTreeMap<Vertex, Point>) -> Result<Self> {
        if let Some((v, p)) = points.iter().find(|(_, p)| p.len() != d) {
            return Err(Error::Geometry(format!("point of {v} has dimension {}, expected {d}", p.len())));
        }
        Ok(Self { d, points, seed: None })
    }

    pub fn from_framework(fw: &Framework) -> Self {
        Self { d: fw.dim(), points: fw.points().clone(), seed: None }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn points(&self) -> &BTreeMap<Vertex, Point> {
        &self.points
    }

    fn check_against(&self, c: &Complex) -> Result<()> {
        if c.dim() + 1 != self.d as isize {
            return Err(Error::Param(format!("{} forms for a complex of dimension {}", self.d, c.dim())));
        }
        if let Some(v) = c.vertices().iter().find(|v| !self.points.contains_key(v)) {
            return Err(Error::Geometry(format!("vertex {v} has no point")));
        }
        Ok(())
    }

    fn framework(&self, c: &Complex) -> Result<Framework> {
        Framework::new(c.graph(), self.d, self.points.clone())
    }
}

fn rank_of(points: impl Iterator<Item = Point>, d: usize) -> usize {
    RatMatrix::from_rows(d, points.collect()).rank()
}

/// First face whose points are linearly dependent. Checking facets is
/// enough, since subsets of independent sets are independent.
pub fn lsop_violation(c: &Complex, cand: &LsopCandidate) -> Result<Option<Face>> {
    cand.check_against(c)?;
    Ok(c
        .facets()
        .iter()
        .find(|f| rank_of(f.iter().map(|v| cand.points[v].clone()), cand.d) < f.len())
        .cloned())
}

/// `θ` is an l.s.o.p. iff the points of every face are linearly independent.
pub fn is_lsop(c: &Complex, cand: &LsopCandidate) -> Result<bool> {
    Ok(lsop_violation(c, cand)?.is_none())
}

/// Samples `(κ, a)`-sparse points until they form an l.s.o.p.
pub fn colored_sop(c: &Complex, coloring: &ColorMap, a: &[usize], seed: u64) -> Result<LsopCandidate> {
    if !verify_a_coloring(c, coloring, a)? {
        return Err(Error::Coloring(format!("not an {a:?}-coloring")));
    }
    let l = SupportMap::from_coloring(coloring, a)?;
    let g = c.graph();
    for i in 0..COLORED_SOP_ATTEMPTS {
        let s = trial_seed(seed, i);
        let mut cand = LsopCandidate::from_framework(&sample_sparse(&g, &l, s)?);
        cand.seed = Some(s);
        if is_lsop(c, &cand)? {
            return Ok(cand);
        }
    }
    Err(Error::Sampling(format!("no l.s.o.p. in {COLORED_SOP_ATTEMPTS} sparse samples")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GradedDims {
    /// `dim (ℚ[Δ]/Θ)_1 = f_0 − rank p`.
    pub dim1: usize,
    /// `dim (ℚ[Δ]/Θ)_2`: stresses of the cone over `G(Δ)` with apex at 0.
    pub dim2: usize,
    /// `dim (ℚ[Δ]/(Θ, ω))_2`: stresses of `(G(Δ), p)`.
    pub dim2_with_omega: usize,
}

pub fn graded_dims(c: &Complex, cand: &LsopCandidate) -> Result<GradedDims> {
    cand.check_against(c)?;
    let d = cand.d;
    let dim1 = c.num_vertices() - rank_of(c.vertices().iter().map(|v| cand.points[v].clone()), d);
    let fw = cand.framework(c)?;
    let dim2_with_omega = stress_space_dim(&fw);
    let apex = c.fresh_vertex();
    let mut points = cand.points.clone();
    points.insert(apex, vec![Rational::zero(); d]);
    let cone = Framework::new(c.graph().cone(apex)?, d, points)?;
    let dim2 = stress_space_dim(&cone);
    Ok(GradedDims { dim1, dim2, dim2_with_omega })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OmegaReport {
    pub injective: bool,
    pub dims: GradedDims,
    pub rigidity: RigidityReport,
    /// `dim2 ≥ dim2_with_omega`, `dim2 − dim2_with_omega ≤ dim1`, with
    /// equality in the second exactly when `×ω` is injective.
    pub bookkeeping_consistent: bool,
}

/// Whether `×ω : (ℚ[Δ]/Θ)_1 → (ℚ[Δ]/Θ)_2` is injective, decided by the
/// infinitesimal rigidity of `(G(Δ), p)`. Requires an l.s.o.p. and a
/// strongly connected complex.
pub fn omega_injective(c: &Complex, cand: &LsopCandidate) -> Result<OmegaReport> {
    if !c.is_strongly_connected() {
        return Err(Error::Param("complex is not strongly connected".into()));
    }
    if let Some(f) = lsop_violation(c, cand)? {
        return Err(Error::Param(format!("not an l.s.o.p.: face {f:?} is dependent")));
    }
    let rigidity = is_infinitesimally_rigid(&cand.framework(c)?);
    let dims = graded_dims(c, cand)?;
    let injective = rigidity.rigid;
    let image = dims.dim2 as isize - dims.dim2_with_omega as isize;
    let bookkeeping_consistent =
        image >= 0 && image <= dims.dim1 as isize && (image == dims.dim1 as isize) == injective;
    Ok(OmegaReport { injective, dims, rigidity, bookkeeping_consistent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cross_polytope_boundary, simplex_boundary, stacked_cross_polytopal_sphere, stacked_sphere};
    use crate::linalg::rat;
    use crate::rigidity::sample_generic;

    fn generic(c: &Complex, seed: u64) -> LsopCandidate {
        LsopCandidate::from_framework(&sample_generic(&c.graph(), (c.dim() + 1) as usize, seed))
    }

    #[test]
    fn octahedron_colored_sop() {
        let o = cross_polytope_boundary(3).unwrap();
        let cand = colored_sop(&o.complex, &o.coloring, &[1, 1, 1], 3).unwrap();
        assert!(is_lsop(&o.complex, &cand).unwrap());
        let dims = graded_dims(&o.complex, &cand).unwrap();
        assert_eq!(dims.dim1, 3);
        assert_eq!(dims.dim2, 3);
        let h = o.complex.h_vector().unwrap();
        assert_eq!(dims.dim1 as i64, h.h(1));
        assert_eq!(dims.dim2 as i64, h.h(2));
        let r = omega_injective(&o.complex, &cand).unwrap();
        assert!(r.injective && r.bookkeeping_consistent);
    }

    #[test]
    fn cross_polytope_four_colored_sop() {
        let o = cross_polytope_boundary(4).unwrap();
        let merged = o.coloring.merge_blocks(&[2, 2]).unwrap();
        let cand = colored_sop(&o.complex, &merged, &[2, 2], 0).unwrap();
        assert!(is_lsop(&o.complex, &cand).unwrap());
        assert!(colored_sop(&o.complex, &o.coloring, &[2, 2], 0).is_err());
    }

    #[test]
    fn lsop_failures() {
        let o = cross_polytope_boundary(3).unwrap().complex;
        let mut cand = generic(&o, 1);
        assert!(is_lsop(&o, &cand).unwrap());
        cand.points.insert(0, vec![rat(0); 3]);
        assert!(!is_lsop(&o, &cand).unwrap());

        let mut cand = generic(&o, 1);
        let (u, v) = *o.edges().iter().next().unwrap();
        let pu = cand.points[&u].clone();
        cand.points.insert(v, pu);
        let bad = lsop_violation(&o, &cand).unwrap().unwrap();
        assert!(bad.contains(&u) && bad.contains(&v));

        let flat = LsopCandidate::from_framework(&sample_generic(&o.graph(), 2, 0));
        assert!(is_lsop(&o, &flat).is_err());
    }

    #[test]
    fn single_facet_dims() {
        let f = Complex::from_facets([vec![0, 1, 2]]).unwrap();
        let dims = graded_dims(&f, &generic(&f, 2)).unwrap();
        assert_eq!((dims.dim1, dims.dim2), (0, 0));
    }

    #[test]
    fn tetrahedron_boundary_injective() {
        let t = simplex_boundary(3).unwrap();
        let r = omega_injective(&t, &generic(&t, 4)).unwrap();
        assert!(r.injective && r.bookkeeping_consistent);
        assert_eq!(r.dims.dim1 as i64, t.h_vector().unwrap().h(1));
    }

    #[test]
    fn lee_dimensions_match_h_vectors() {
        let cases = [
            stacked_sphere(3, 7, 1).unwrap(),
            stacked_sphere(4, 8, 2).unwrap(),
            stacked_cross_polytopal_sphere(3, 9, 0).unwrap().complex,
        ];
        for c in cases {
            let cand = generic(&c, 6);
            assert!(is_lsop(&c, &cand).unwrap());
            let dims = graded_dims(&c, &cand).unwrap();
            let h = c.h_vector().unwrap();
            assert_eq!(dims.dim1 as i64, h.h(1));
            assert_eq!(dims.dim2 as i64, h.h(2));
        }
    }

    #[test]
    fn omega_requires_lsop() {
        let o = cross_polytope_boundary(3).unwrap().complex;
        let mut cand = generic(&o, 1);
        cand.points.insert(0, vec![rat(0); 3]);
        assert!(omega_injective(&o, &cand).is_err());
    }
}
