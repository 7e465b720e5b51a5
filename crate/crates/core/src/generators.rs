//! Constructors for the complex families used throughout the workbench:
//! simplex and cross-polytope boundaries, connected sums, stacked and stacked
//! cross-polytopal spheres, facet subdivisions and cones.
//!
//! Randomized choices (which facet to stack on) are driven by a seeded
//! ChaCha stream, so every output is a pure function of its parameters.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coloring::ColorMap;
use crate::complex::{Complex, Face, Vertex};
use crate::error::{Error, Result};

/// A complex together with a coloring of its vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredComplex {
    pub complex: Complex,
    pub coloring: ColorMap,
}

/// Result of [`connected_sum`]: the glued complex and where each vertex of
/// the second summand ended up.
#[derive(Clone, Debug)]
pub struct ConnectedSum {
    pub complex: Complex,
    pub second_labels: BTreeMap<Vertex, Vertex>,
}

#[derive(Clone, Debug)]
pub struct Subdivision {
    pub complex: Complex,
    pub original: BTreeSet<Vertex>,
    pub apices: BTreeSet<Vertex>,
}

/// How [`stacked_cross_polytopal_sphere_with`] identifies glued facets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gluing {
    ColorPreserving,
    /// Uniformly random bijection; may destroy balancedness.
    Arbitrary,
}

/// `∂Δ^d`: all `d`-subsets of `{0, …, d}`.
pub fn simplex_boundary(d: usize) -> Result<Complex> {
    if d < 1 {
        return Err(Error::Param("simplex boundary needs d >= 1".into()));
    }
    let all: Vec<Vertex> = (0..=d as Vertex).collect();
    Complex::from_facets(all.iter().map(|&skip| all.iter().copied().filter(move |&x| x != skip)))
}

/// Boundary of the `d`-dimensional cross-polytope. Vertex `2i` is `+e_{i+1}`
/// and `2i + 1` is `-e_{i+1}`; both get color `i + 1`.
pub fn cross_polytope_boundary(d: usize) -> Result<ColoredComplex> {
    if !(1..=20).contains(&d) {
        return Err(Error::Param(format!("cross-polytope dimension {d} out of range 1..=20")));
    }
    let facets = (0u32..(1 << d)).map(|mask| {
        (0..d as Vertex).map(move |i| 2 * i + ((mask >> i) & 1)).collect::<Face>()
    });
    let complex = Complex::from_facets(facets)?;
    let coloring = ColorMap::new((0..2 * d as Vertex).map(|v| (v, v as usize / 2 + 1)).collect(), d)?;
    Ok(ColoredComplex { complex, coloring })
}

/// Antipode of a vertex of [`cross_polytope_boundary`].
pub fn cross_polytope_antipode(v: Vertex) -> Vertex {
    v ^ 1
}

/// `Δ₁ #_γ Δ₂`. The second complex is relabeled apart first: vertices of
/// `f2` take the label of their `γ`-preimage in `f1`, all others get fresh
/// labels above `Δ₁`'s maximum in increasing order. Both glued facets are
/// removed.
pub fn connected_sum(
    c1: &Complex,
    c2: &Complex,
    f1: &[Vertex],
    f2: &[Vertex],
    gamma: &BTreeMap<Vertex, Vertex>,
) -> Result<ConnectedSum> {
    if !c1.is_pure() || !c2.is_pure() {
        return Err(Error::Purity);
    }
    if c1.dim() != c2.dim() {
        return Err(Error::Construction(format!(
            "dimension mismatch: {} vs {}",
            c1.dim(),
            c2.dim()
        )));
    }
    if !c1.is_facet(f1) || !c2.is_facet(f2) {
        return Err(Error::Construction("glued sets must be facets".into()));
    }
    let f1: BTreeSet<Vertex> = f1.iter().copied().collect();
    let f2: BTreeSet<Vertex> = f2.iter().copied().collect();
    let keys: BTreeSet<Vertex> = gamma.keys().copied().collect();
    let values: BTreeSet<Vertex> = gamma.values().copied().collect();
    if keys != f1 || values != f2 || values.len() != gamma.len() {
        return Err(Error::Construction("gamma must be a bijection f1 -> f2".into()));
    }
    let mut labels: BTreeMap<Vertex, Vertex> = gamma.iter().map(|(&a, &b)| (b, a)).collect();
    let mut next = c1.fresh_vertex();
    for &w in c2.vertices() {
        if let std::collections::btree_map::Entry::Vacant(e) = labels.entry(w) {
            e.insert(next);
            next += 1;
        }
    }
    let glued: Face = f1.iter().copied().collect();
    let mut facets: Vec<Face> = c1.facets().iter().filter(|f| **f != glued).cloned().collect();
    for f in c2.facets() {
        let g: BTreeSet<Vertex> = f.iter().copied().collect();
        if g != f2 {
            facets.push(crate::complex::normalize(f.iter().map(|x| labels[x])));
        }
    }
    if facets.is_empty() {
        return Err(Error::Construction("connected sum removed every facet".into()));
    }
    Ok(ConnectedSum { complex: Complex::from_facets(facets)?, second_labels: labels })
}

fn order_preserving(f1: &[Vertex], f2: &[Vertex]) -> BTreeMap<Vertex, Vertex> {
    f1.iter().copied().zip(f2.iter().copied()).collect()
}

/// Stacked `(d-1)`-sphere on `n` vertices: `∂Δ^d` followed by `n - d - 1`
/// connected sums with further copies of `∂Δ^d`, each glued onto a facet
/// chosen by `seed`.
pub fn stacked_sphere(d: usize, n: usize, seed: u64) -> Result<Complex> {
    if d < 2 {
        return Err(Error::Param("stacked spheres need d >= 2".into()));
    }
    if n < d + 1 {
        return Err(Error::Param(format!("need n >= d + 1, got n = {n}, d = {d}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let piece = simplex_boundary(d)?;
    let base_facet = piece.facets()[0].clone();
    let mut current = piece.clone();
    while current.num_vertices() < n {
        let f1 = current.facets()[rng.gen_range(0..current.num_facets())].clone();
        let gamma = order_preserving(&f1, &base_facet);
        current = connected_sum(&current, &piece, &f1, &base_facet, &gamma)?.complex;
    }
    Ok(current)
}

/// Connected sum of `n/d - 1` cross-polytope boundaries with color-preserving
/// gluings; the proper `d`-coloring is carried along.
pub fn stacked_cross_polytopal_sphere(d: usize, n: usize, seed: u64) -> Result<ColoredComplex> {
    stacked_cross_polytopal_sphere_with(d, n, seed, Gluing::ColorPreserving)
}

/// As [`stacked_cross_polytopal_sphere`], with a choice of gluing. Under
/// [`Gluing::Arbitrary`] the returned coloring is the one inherited from the
/// summands and need not be proper.
pub fn stacked_cross_polytopal_sphere_with(
    d: usize,
    n: usize,
    seed: u64,
    gluing: Gluing,
) -> Result<ColoredComplex> {
    if d < 2 {
        return Err(Error::Param("stacked cross-polytopal spheres need d >= 2".into()));
    }
    if !n.is_multiple_of(d) || n < 2 * d {
        return Err(Error::Param(format!("need d | n and n >= 2d, got n = {n}, d = {d}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let piece = cross_polytope_boundary(d)?;
    let mut current = piece.clone();
    for _ in 1..n / d - 1 {
        let f1 = current.complex.facets()[rng.gen_range(0..current.complex.num_facets())].clone();
        let f2 = piece.complex.facets()[rng.gen_range(0..piece.complex.num_facets())].clone();
        let gamma: BTreeMap<Vertex, Vertex> = match gluing {
            Gluing::ColorPreserving => f1
                .iter()
                .map(|&x| {
                    let c = current.coloring.color(x).expect("colored");
                    let y = *f2
                        .iter()
                        .find(|&&y| piece.coloring.color(y) == Some(c))
                        .expect("facets are rainbow");
                    (x, y)
                })
                .collect(),
            Gluing::Arbitrary => {
                let mut targets = f2.clone();
                targets.shuffle(&mut rng);
                order_preserving(&f1, &targets)
            }
        };
        let sum = connected_sum(&current.complex, &piece.complex, &f1, &f2, &gamma)?;
        let mut colors: BTreeMap<Vertex, usize> = current.coloring.iter().collect();
        for (old, new) in &sum.second_labels {
            colors.entry(*new).or_insert(piece.coloring.color(*old).expect("colored"));
        }
        current = ColoredComplex { complex: sum.complex, coloring: ColorMap::new(colors, d)? };
    }
    Ok(current)
}

/// Replaces every facet by the cone over its boundary with a fresh apex.
pub fn subdivide_all_facets(c: &Complex) -> Result<Subdivision> {
    if c.is_empty() || c.is_void() {
        return Err(Error::Param("nothing to subdivide".into()));
    }
    if !c.is_pure() {
        return Err(Error::Purity);
    }
    let mut next = c.fresh_vertex();
    let mut facets = Vec::new();
    let mut apices = BTreeSet::new();
    for f in c.facets() {
        let apex = next;
        next += 1;
        apices.insert(apex);
        for &skip in f {
            facets.push(f.iter().copied().filter(|&x| x != skip).chain([apex]).collect::<Face>());
        }
    }
    Ok(Subdivision { complex: Complex::from_facets(facets)?, original: c.vertex_set(), apices })
}

/// Cone with apex `c.fresh_vertex()`; the cone over the empty (or void)
/// complex is a single vertex.
pub fn cone_complex(c: &Complex) -> Complex {
    let apex = c.fresh_vertex();
    if c.is_empty() {
        return Complex::spanned_by([vec![apex]]);
    }
    Complex::spanned_by(
        c.facets().iter().map(|f| f.iter().copied().chain([apex]).collect::<Vec<_>>()).map(
            |mut f| {
                f.sort_unstable();
                f
            },
        ),
    )
}

/// Named families accepted by [`generate`] and the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Simplex,
    Cross,
    Stacked,
    StackedCross,
    /// Stacked sphere on `n` vertices with every facet subdivided; carries
    /// the two-class coloring (original vertices 1, apices 2).
    SubdividedStacked,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Simplex,
        Family::Cross,
        Family::Stacked,
        Family::StackedCross,
        Family::SubdividedStacked,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Simplex => "simplex",
            Family::Cross => "cross",
            Family::Stacked => "stacked",
            Family::StackedCross => "stacked-cross",
            Family::SubdividedStacked => "subdivided-stacked",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown family {s:?}")))
    }
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub complex: Complex,
    pub coloring: Option<ColorMap>,
}

/// Builds a member of `family`. `n` is ignored for the fixed families.
pub fn generate(family: Family, d: usize, n: usize, seed: u64) -> Result<Generated> {
    Ok(match family {
        Family::Simplex => Generated { complex: simplex_boundary(d)?, coloring: None },
        Family::Cross => {
            let c = cross_polytope_boundary(d)?;
            Generated { complex: c.complex, coloring: Some(c.coloring) }
        }
        Family::Stacked => Generated { complex: stacked_sphere(d, n, seed)?, coloring: None },
        Family::StackedCross => {
            let c = stacked_cross_polytopal_sphere(d, n, seed)?;
            Generated { complex: c.complex, coloring: Some(c.coloring) }
        }
        Family::SubdividedStacked => {
            let s = subdivide_all_facets(&stacked_sphere(d, n, seed)?)?;
            let colors = s
                .complex
                .vertices()
                .iter()
                .map(|&v| (v, if s.original.contains(&v) { 1 } else { 2 }))
                .collect();
            Generated { complex: s.complex, coloring: Some(ColorMap::new(colors, 2)?) }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{binomial, FVector};

    #[test]
    fn simplex_boundaries() {
        assert_eq!(simplex_boundary(2).unwrap().f_vector(), FVector(vec![1, 3, 3]));
        assert_eq!(simplex_boundary(3).unwrap().f_vector(), FVector(vec![1, 4, 6, 4]));
        assert_eq!(simplex_boundary(4).unwrap().f_vector(), FVector(vec![1, 5, 10, 10, 5]));
        assert!(matches!(simplex_boundary(0), Err(Error::Param(_))));
    }

    #[test]
    fn cross_polytopes() {
        let o = cross_polytope_boundary(3).unwrap();
        assert_eq!(o.complex.f_vector(), FVector(vec![1, 6, 12, 8]));
        let c4 = cross_polytope_boundary(4).unwrap().complex;
        assert_eq!(c4.f_vector().f(0), 8);
        assert_eq!(c4.f_vector().f(3), 16);
        let c1 = cross_polytope_boundary(1).unwrap().complex;
        assert_eq!(c1.facets(), &[vec![0], vec![1]]);
        // antipodes never share a facet
        for v in o.complex.vertices() {
            let w = cross_polytope_antipode(*v);
            assert!(!o.complex.contains_face(&[*v, w]));
            assert_eq!(o.coloring.color(*v), o.coloring.color(w));
        }
    }

    #[test]
    fn connected_sum_of_tetrahedra() {
        let t = simplex_boundary(3).unwrap();
        let f = t.facets()[0].clone();
        let gamma = order_preserving(&f, &f);
        let s = connected_sum(&t, &t, &f, &f, &gamma).unwrap();
        assert_eq!(s.complex.f_vector(), FVector(vec![1, 5, 9, 6]));
        assert_eq!(s.complex.euler_characteristic(), 2);
        assert!(s.complex.in_class_cd());
    }

    #[test]
    fn connected_sum_of_octahedra() {
        let c = stacked_cross_polytopal_sphere(3, 9, 0).unwrap().complex;
        let h = c.h_vector().unwrap();
        assert_eq!(c.f_vector().f(0), 9);
        assert_eq!((h.h(1), h.h(2)), (6, 6));
    }

    #[test]
    fn connected_sum_rejections() {
        let t = simplex_boundary(3).unwrap();
        let tri = simplex_boundary(2).unwrap();
        let f = t.facets()[0].clone();
        let g = tri.facets()[0].clone();
        assert!(connected_sum(&t, &tri, &f, &g, &order_preserving(&f, &g)).is_err());
        // not a facet
        let e = vec![0, 1];
        assert!(connected_sum(&t, &t, &e, &f, &order_preserving(&e, &f)).is_err());
        // not a bijection
        let mut bad = order_preserving(&f, &f);
        let first = *bad.keys().next().unwrap();
        let last = *bad.values().last().unwrap();
        bad.insert(first, last);
        assert!(connected_sum(&t, &t, &f, &f, &bad).is_err());
        // a single simplex glued to itself leaves nothing
        let single = Complex::from_facets([vec![0, 1, 2]]).unwrap();
        let s = vec![0, 1, 2];
        assert!(connected_sum(&single, &single, &s, &s, &order_preserving(&s, &s)).is_err());
    }

    #[test]
    fn connected_sum_f_vector_identity() {
        // f_i(Δ₁#Δ₂) = f_i(Δ₁) + f_i(Δ₂) - C(d, i+1) for i <= d-2, and the
        // top count loses the two glued facets
        let a = cross_polytope_boundary(4).unwrap().complex;
        let b = stacked_sphere(4, 9, 3).unwrap();
        let (f1, f2) = (a.facets()[5].clone(), b.facets()[2].clone());
        let s = connected_sum(&a, &b, &f1, &f2, &order_preserving(&f1, &f2)).unwrap().complex;
        let d = 4i64;
        let (fa, fb, fs) = (a.f_vector(), b.f_vector(), s.f_vector());
        for i in 0..=(d - 2) {
            let i = i as isize;
            assert_eq!(fs.f(i) as i64, (fa.f(i) + fb.f(i)) as i64 - binomial(d, i as i64 + 1));
        }
        assert_eq!(fs.f(3), fa.f(3) + fb.f(3) - 2);
    }

    #[test]
    fn stacked_spheres_meet_lower_bound_with_equality() {
        assert_eq!(stacked_sphere(3, 4, 1).unwrap(), simplex_boundary(3).unwrap());
        assert_eq!(stacked_sphere(3, 6, 1).unwrap().f_vector().f(1), 12);
        assert_eq!(stacked_sphere(4, 6, 1).unwrap().f_vector().f(1), 14);
        for d in 3..=5usize {
            for n in d + 1..d + 8 {
                let s = stacked_sphere(d, n, n as u64).unwrap();
                let f = s.f_vector();
                assert_eq!(f.f(0) as usize, n);
                let bound = d as i64 * n as i64 - binomial(d as i64 + 1, 2);
                assert_eq!(f.f(1) as i64, bound, "d={d} n={n}");
            }
        }
        assert!(matches!(stacked_sphere(3, 3, 0), Err(Error::Param(_))));
    }

    #[test]
    fn stacked_cross_polytopal_equality() {
        assert_eq!(
            stacked_cross_polytopal_sphere(3, 6, 4).unwrap().complex,
            cross_polytope_boundary(3).unwrap().complex
        );
        for (d, n) in [(3, 9), (3, 12), (4, 8), (4, 12), (4, 16), (5, 15)] {
            let c = stacked_cross_polytopal_sphere(d, n, 11).unwrap();
            let h = c.complex.h_vector().unwrap();
            assert_eq!(2 * h.h(2), (d as i64 - 1) * h.h(1), "d={d} n={n}");
            assert_eq!(c.complex.num_vertices(), n);
        }
        assert!(matches!(stacked_cross_polytopal_sphere(3, 10, 0), Err(Error::Param(_))));
        assert!(stacked_cross_polytopal_sphere(3, 3, 0).is_err());
    }

    #[test]
    fn generated_spheres_are_well_formed() {
        let mut spheres = vec![
            simplex_boundary(3).unwrap(),
            simplex_boundary(4).unwrap(),
            cross_polytope_boundary(3).unwrap().complex,
            cross_polytope_boundary(4).unwrap().complex,
        ];
        for seed in 0..3 {
            spheres.push(stacked_sphere(3, 8, seed).unwrap());
            spheres.push(stacked_sphere(4, 8, seed).unwrap());
            spheres.push(stacked_cross_polytopal_sphere(3, 12, seed).unwrap().complex);
            spheres.push(stacked_cross_polytopal_sphere(4, 12, seed).unwrap().complex);
            spheres.push(subdivide_all_facets(&stacked_sphere(3, 6, seed).unwrap()).unwrap().complex);
        }
        for s in &spheres {
            assert!(s.is_pseudomanifold() && s.is_normal() && s.in_class_cd(), "{s:?}");
        }
    }

    #[test]
    fn subdivision_counts() {
        let t = simplex_boundary(3).unwrap();
        let s = subdivide_all_facets(&t).unwrap();
        assert_eq!(s.complex.num_vertices(), 8);
        assert_eq!(s.complex.num_facets(), 12);
        assert_eq!(s.apices.len(), 4);

        let tri = Complex::from_facets([vec![1, 2, 3]]).unwrap();
        let s = subdivide_all_facets(&tri).unwrap();
        assert_eq!(s.complex.facets(), &[vec![1, 2, 4], vec![1, 3, 4], vec![2, 3, 4]]);

        let impure = Complex::from_facets([vec![1, 2, 3], vec![3, 4]]).unwrap();
        assert_eq!(subdivide_all_facets(&impure).unwrap_err(), Error::Purity);
    }

    #[test]
    fn subdivided_stacked_sphere_is_stacked() {
        // vertex count is f0(Γ) + f_{d-1}(Γ), and the edge count meets the
        // stacked-sphere identity f1 = d f0 - C(d+1, 2)
        for d in 3..=4usize {
            for n in [d + 1, d + 3, d + 5] {
                let g = stacked_sphere(d, n, 7).unwrap();
                let s = subdivide_all_facets(&g).unwrap().complex;
                let fg = g.f_vector();
                let f = s.f_vector();
                assert_eq!(f.f(0), fg.f(0) + fg.f(d as isize - 1));
                assert_eq!(f.f(1) as i64, d as i64 * f.f(0) as i64 - binomial(d as i64 + 1, 2));
            }
        }
    }

    #[test]
    fn cones() {
        let tri = simplex_boundary(2).unwrap();
        let c = cone_complex(&tri);
        assert_eq!(c.num_facets(), 3);
        assert_eq!(c.dim(), 2);
        let o = cone_complex(&cross_polytope_boundary(3).unwrap().complex);
        assert_eq!(o.f_vector().f(0), 7);
        assert_eq!(o.dim(), 3);
        assert_eq!(cone_complex(&Complex::empty()).facets(), &[vec![0]]);
    }

    #[test]
    fn generation_is_deterministic() {
        for family in Family::ALL {
            let a = generate(family, 3, 9, 42).unwrap();
            let b = generate(family, 3, 9, 42).unwrap();
            assert_eq!(a.complex, b.complex);
            assert_eq!(family.name().parse::<Family>().unwrap(), family);
        }
        assert!("torus".parse::<Family>().is_err());
    }

    #[test]
    fn arbitrary_gluing_can_break_the_inherited_coloring() {
        let broken = (0..20).any(|seed| {
            let c = stacked_cross_polytopal_sphere_with(3, 9, seed, Gluing::Arbitrary).unwrap();
            !c.coloring.is_proper_on(&c.complex)
        });
        assert!(broken);
    }
}
