//! Claim registry and experiment runner.
//!
//! Every claim replays one statement on a grid of generated instances and
//! records a per-instance outcome. `Fail` is reserved for exact
//! contradictions; a search that merely found no witness is `Inconclusive`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::chains::{is_minimal_cycle_complex, verify_basic_lemma, Chain, Ring};
use crate::coloring::{
    find_proper_coloring, rank_selected, transversal_support_map, verify_a_coloring, Color, ColorMap, SupportMap,
};
use crate::complex::{binomial, Complex, Vertex};
use crate::error::{Error, Result};
use crate::generators::{generate, Family};
use crate::graph::Graph;
use crate::linalg::rat;
use crate::rigidity::{
    affinely_independent, cone_project, glue_precondition, hall_condition, is_infinitesimally_rigid, is_sparse_rigid,
    sample_generic, sample_sparse, stress_space_dim, trial_seed, vertex_split, Framework, Hyperplane,
};
use crate::sr_bridge::{colored_sop, graded_dims, is_lsop, omega_injective, LsopCandidate, COLORED_SOP_ATTEMPTS};

pub const SCHEMA_VERSION: u32 = 1;
/// Environment variable capping the worker threads used by [`run`].
pub const THREADS_ENV: &str = "RIGIDLAB_THREADS";

/// How a negative outcome should be read.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimKind {
    /// Every check is exact; a negative is a contradiction.
    Exact,
    /// Positives are exact certificates, negatives are sampling evidence.
    Witness,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Claim {
    pub id: &'static str,
    pub kind: ClaimKind,
    /// Library operations the claim exercises.
    pub module: &'static str,
    pub statement: &'static str,
}

pub const CLAIMS: &[Claim] = &[
    Claim {
        id: "cor-4.3-equality",
        kind: ClaimKind::Exact,
        module: "complex::h_vector",
        statement: "stacked cross-polytopal spheres satisfy 2 h2 = (d-1) h1",
    },
    Claim {
        id: "cor-4.3",
        kind: ClaimKind::Exact,
        module: "complex::h_vector",
        statement: "balanced minimal cycle complexes with d >= 3 satisfy 2 h2 >= (d-1) h1",
    },
    Claim {
        id: "thm-4.1",
        kind: ClaimKind::Witness,
        module: "coloring::rank_selected, rigidity::is_infinitesimally_rigid",
        statement: "for a balanced minimal cycle complex and |T| >= 3, G(Δ_T) is rigid in R^|T|",
    },
    Claim {
        id: "thm-6.1",
        kind: ClaimKind::Witness,
        module: "rigidity::is_sparse_rigid",
        statement: "an a-balanced minimal cycle complex with all a_i >= 2 is (κ,a)-sparse rigid",
    },
    Claim {
        id: "thm-7.3",
        kind: ClaimKind::Witness,
        module: "rigidity::is_sparse_rigid, complex::in_class_cd",
        statement: "an a-balanced pseudomanifold in C_d with a != (d-1,1), (1,d-1) is (κ,a)-sparse rigid",
    },
    Claim {
        id: "example-7.4",
        kind: ClaimKind::Exact,
        module: "generators::subdivide_all_facets, rigidity::stress_space_dim",
        statement: "a subdivided stacked sphere under its (d-1,1)-coloring has stress dimension >= f0(Γ) - d \
                    at every sparse configuration and is never sparse rigid",
    },
    Claim {
        id: "cor-5.3",
        kind: ClaimKind::Exact,
        module: "sr_bridge::graded_dims, sr_bridge::omega_injective",
        statement: "for a strongly connected complex with an l.s.o.p., dim1 = h1 and dim2 = h2, and ×ω is \
                    injective exactly when (G, p) is infinitesimally rigid",
    },
    Claim {
        id: "lemma-6.2-oracle",
        kind: ClaimKind::Exact,
        module: "rigidity::hall_condition, rigidity::affinely_independent",
        statement: "for generic L-sparse points, p(U) is affinely independent iff |L(W)| + 1 >= |W| for all W ⊆ U",
    },
    Claim {
        id: "lemma-2.3-equivalence",
        kind: ClaimKind::Exact,
        module: "rigidity::cone_project",
        statement: "a cone framework is infinitesimally rigid iff its central projection is",
    },
    Claim {
        id: "lemma-3.1",
        kind: ClaimKind::Exact,
        module: "chains::is_minimal_cycle, chains::verify_basic_lemma",
        statement: "Z2 kernel minimality agrees with subset enumeration; minimal cycle complexes are strongly \
                    connected with every ridge in at least two facets",
    },
    Claim {
        id: "lemma-2.2-splitting",
        kind: ClaimKind::Witness,
        module: "rigidity::vertex_split",
        statement: "replaying a stacked sphere as vertex splits keeps the framework infinitesimally rigid",
    },
    Claim {
        id: "lemma-2.1-gluing",
        kind: ClaimKind::Exact,
        module: "rigidity::glue_precondition",
        statement: "two rigid frameworks sharing points of affine dimension >= d-1 glue to a rigid framework",
    },
    Claim {
        id: "prop-8.1",
        kind: ClaimKind::Witness,
        module: "rigidity::is_sparse_rigid",
        statement: "with a_1 >= 4, a_i >= 2 and facet types a + e_j - e_1, a minimal cycle complex is \
                    (κ,a)-sparse rigid",
    },
    Claim {
        id: "prop-8.2",
        kind: ClaimKind::Witness,
        module: "coloring::transversal_support_map, rigidity::is_sparse_rigid",
        statement: "a minimal cycle complex with a (>= a)-transversal free set and a b-bounded coloring of the \
                    rest is L*-sparse rigid",
    },
];

/// Which claims cover each numbered acceptance criterion. Criterion 10
/// (byte-stable reruns) applies to every claim.
pub const ACCEPTANCE_COVERAGE: &[(u32, &[&str])] = &[
    (1, &["cor-4.3-equality"]),
    (2, &["cor-4.3"]),
    (3, &["thm-4.1"]),
    (4, &["thm-6.1", "thm-7.3"]),
    (5, &["example-7.4"]),
    (6, &["cor-5.3"]),
    (7, &["lemma-6.2-oracle"]),
    (8, &["lemma-2.3-equivalence"]),
    (9, &["lemma-3.1"]),
    (10, &[]),
];

pub fn list_claims() -> &'static [Claim] {
    CLAIMS
}

pub fn find_claim(id: &str) -> Result<&'static Claim> {
    CLAIMS
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| Error::Usage(format!("unknown claim {id:?}; see list-claims")))
}

/// One grid entry. Oracle claims leave `family` empty and read `n` as the
/// number of random instances.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridPoint {
    pub family: Option<Family>,
    pub d: usize,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<usize>>,
}

impl GridPoint {
    fn of(family: Family, d: usize, n: usize) -> Self {
        Self { family: Some(family), d, n, a: None }
    }

    fn with_a(family: Family, d: usize, n: usize, a: &[usize]) -> Self {
        Self { family: Some(family), d, n, a: Some(a.to_vec()) }
    }

    fn oracle(d: usize, n: usize) -> Self {
        Self { family: None, d, n, a: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub claim: String,
    pub grid: Vec<GridPoint>,
    pub seeds: Vec<u64>,
    pub trials: usize,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentSpec {
    /// The standard grid for `claim`.
    pub fn default_for(claim: &str) -> Result<Self> {
        use Family::*;
        let claim = find_claim(claim)?.id;
        let (grid, seeds, trials): (Vec<GridPoint>, Vec<u64>, usize) = match claim {
            "cor-4.3-equality" => (
                [(3, 6), (3, 9), (3, 12), (4, 8), (4, 12)].map(|(d, n)| GridPoint::of(StackedCross, d, n)).to_vec(),
                vec![0],
                1,
            ),
            "cor-4.3" => (
                [(3, 6), (3, 9), (3, 12), (3, 15), (3, 18), (4, 8), (4, 12), (4, 16), (4, 20), (4, 24)]
                    .map(|(d, n)| GridPoint::of(StackedCross, d, n))
                    .to_vec(),
                vec![0, 1, 2],
                1,
            ),
            "thm-4.1" => (
                vec![GridPoint::of(Cross, 4, 8), GridPoint::of(StackedCross, 4, 12), GridPoint::of(StackedCross, 5, 15)],
                vec![0],
                3,
            ),
            "thm-6.1" => (
                vec![
                    GridPoint::with_a(Cross, 4, 8, &[2, 2]),
                    GridPoint::with_a(StackedCross, 4, 12, &[2, 2]),
                    GridPoint::with_a(StackedCross, 5, 15, &[2, 3]),
                    GridPoint::with_a(Cross, 6, 12, &[2, 2, 2]),
                ],
                vec![0],
                3,
            ),
            "thm-7.3" => (
                vec![
                    GridPoint::with_a(Cross, 3, 6, &[1, 1, 1]),
                    GridPoint::with_a(Cross, 4, 8, &[1, 1, 1, 1]),
                    GridPoint::with_a(Cross, 4, 8, &[2, 1, 1]),
                    GridPoint::with_a(StackedCross, 3, 9, &[1, 1, 1]),
                    GridPoint::with_a(StackedCross, 4, 12, &[1, 1, 1, 1]),
                ],
                vec![0],
                3,
            ),
            "example-7.4" => (
                [4, 6, 8].map(|n| GridPoint::with_a(SubdividedStacked, 3, n, &[2, 1])).to_vec(),
                vec![0],
                5,
            ),
            "cor-5.3" => (
                vec![
                    GridPoint::of(Cross, 3, 6),
                    GridPoint::of(Cross, 4, 8),
                    GridPoint::of(Stacked, 3, 7),
                    GridPoint::of(StackedCross, 3, 9),
                ],
                vec![0],
                3,
            ),
            "lemma-6.2-oracle" => ([3, 4, 5].map(|d| GridPoint::oracle(d, 1000)).to_vec(), vec![0], 3),
            "lemma-2.3-equivalence" => ([3, 4].map(|d| GridPoint::oracle(d, 100)).to_vec(), vec![0], 1),
            "lemma-3.1" => (
                vec![
                    GridPoint::of(Simplex, 3, 4),
                    GridPoint::of(Simplex, 4, 5),
                    GridPoint::of(Cross, 3, 6),
                    GridPoint::of(Cross, 4, 8),
                    GridPoint::of(Stacked, 3, 5),
                    GridPoint::of(Stacked, 3, 7),
                    GridPoint::of(Stacked, 3, 10),
                    GridPoint::of(Stacked, 4, 7),
                    GridPoint::of(StackedCross, 3, 9),
                    GridPoint::of(StackedCross, 4, 12),
                    GridPoint::of(SubdividedStacked, 3, 4),
                    GridPoint::of(SubdividedStacked, 3, 6),
                ],
                vec![0],
                1,
            ),
            "lemma-2.2-splitting" => (
                vec![GridPoint::of(Stacked, 3, 8), GridPoint::of(Stacked, 4, 9), GridPoint::of(Stacked, 5, 10)],
                vec![0],
                1,
            ),
            "lemma-2.1-gluing" => (
                vec![
                    GridPoint::of(Cross, 3, 6),
                    GridPoint::of(Cross, 4, 8),
                    GridPoint::of(Stacked, 3, 8),
                    GridPoint::of(StackedCross, 3, 9),
                ],
                vec![0],
                3,
            ),
            "prop-8.1" => (
                vec![GridPoint::with_a(Cross, 6, 12, &[4, 2]), GridPoint::with_a(StackedCross, 6, 18, &[4, 2])],
                vec![0],
                3,
            ),
            "prop-8.2" => (
                vec![
                    GridPoint::with_a(Cross, 3, 6, &[2, 1]),
                    GridPoint::with_a(Cross, 4, 8, &[2, 2]),
                    GridPoint::with_a(Cross, 4, 8, &[2, 1, 1]),
                    GridPoint::with_a(Cross, 4, 8, &[3, 1]),
                    GridPoint::with_a(StackedCross, 4, 12, &[2, 1, 1]),
                ],
                vec![0],
                3,
            ),
            other => unreachable!("claim {other} has no default grid"),
        };
        Ok(Self { name: claim.to_string(), claim: claim.to_string(), grid, seeds, trials, output: None })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceReport {
    pub key: String,
    #[serde(flatten)]
    pub point: GridPoint,
    pub seed: u64,
    pub outcome: Outcome,
    pub detail: Value,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub name: String,
    pub claim: String,
    pub kind: ClaimKind,
    pub statement: String,
    pub seeds: Vec<u64>,
    pub trials: usize,
    pub instances: Vec<InstanceReport>,
    pub summary: Summary,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Nonzero iff some exact check failed.
    pub fn exit_code(&self) -> i32 {
        i32::from(self.summary.fail > 0)
    }
}

fn instance_key(p: &GridPoint, seed: u64) -> String {
    let family = p.family.map_or("random", Family::name);
    let a = p.a.as_ref().map(|a| format!("-a{}", a.iter().map(ToString::to_string).collect::<Vec<_>>().join("."))).unwrap_or_default();
    format!("{family}-d{:02}-n{:04}{a}-s{seed:06}", p.d, p.n)
}

fn thread_count() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Runs every grid point at every seed, concurrently, and writes the report
/// to `spec.output` when set. Reports carry no timestamps, so reruns with
/// the same spec are byte-identical.
pub fn run(spec: &ExperimentSpec) -> Result<Report> {
    let claim = find_claim(&spec.claim)?;
    if spec.trials == 0 {
        return Err(Error::Usage("trials must be positive".into()));
    }
    let jobs: Vec<(GridPoint, u64)> =
        spec.grid.iter().flat_map(|p| spec.seeds.iter().map(move |&s| (p.clone(), s))).collect();
    let evaluate = || -> Vec<InstanceReport> {
        jobs.par_iter()
            .map(|(point, seed)| {
                let (outcome, detail) = match evaluate(claim.id, point, *seed, spec.trials) {
                    Ok(v) => v,
                    Err(e) => (Outcome::Fail, json!({ "error": e.to_string() })),
                };
                InstanceReport { key: instance_key(point, *seed), point: point.clone(), seed: *seed, outcome, detail }
            })
            .collect()
    };
    let mut instances = match thread_count() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Usage(format!("thread pool: {e}")))?
            .install(evaluate),
        None => evaluate(),
    };
    instances.sort_by(|a, b| a.key.cmp(&b.key));
    let mut summary = Summary { total: instances.len(), ..Summary::default() };
    for i in &instances {
        match i.outcome {
            Outcome::Pass => summary.pass += 1,
            Outcome::Fail => summary.fail += 1,
            Outcome::Inconclusive => summary.inconclusive += 1,
        }
    }
    let report = Report {
        schema: SCHEMA_VERSION,
        name: spec.name.clone(),
        claim: claim.id.to_string(),
        kind: claim.kind,
        statement: claim.statement.to_string(),
        seeds: spec.seeds.clone(),
        trials: spec.trials,
        instances,
        summary,
    };
    if let Some(path) = &spec.output {
        std::fs::write(path, report.to_json())
            .map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(report)
}

type Verdict = (Outcome, Value);

fn evaluate(claim: &str, p: &GridPoint, seed: u64, trials: usize) -> Result<Verdict> {
    match claim {
        "cor-4.3-equality" => lower_bound(p, seed, true),
        "cor-4.3" => lower_bound(p, seed, false),
        "thm-4.1" => rank_selected_rigidity(p, seed, trials),
        "thm-6.1" | "thm-7.3" | "prop-8.1" => colored_sparse_rigidity(claim, p, seed, trials),
        "prop-8.2" => transversal_sparse_rigidity(p, seed, trials),
        "example-7.4" => flexible_example(p, seed, trials),
        "cor-5.3" => lee_dimensions(p, seed, trials),
        "lemma-6.2-oracle" => hall_oracle(p, seed, trials),
        "lemma-2.3-equivalence" => cone_equivalence(p, seed),
        "lemma-3.1" => minimal_cycles(p, seed),
        "lemma-2.2-splitting" => splitting_replay(p, seed),
        "lemma-2.1-gluing" => gluing_replay(p, seed, trials),
        other => Err(Error::Usage(format!("unknown claim {other:?}"))),
    }
}

fn family_of(p: &GridPoint) -> Result<Family> {
    p.family.ok_or_else(|| Error::Usage("this claim needs a family in every grid point".into()))
}

fn a_of(p: &GridPoint) -> Result<&[usize]> {
    p.a.as_deref().ok_or_else(|| Error::Usage("this claim needs `a` in every grid point".into()))
}

fn hypotheses_unmet(detail: Value, why: &str) -> Verdict {
    (Outcome::Inconclusive, json!({ "hypotheses_unmet": why, "detail": detail }))
}

/// The complex with a proper coloring using `d` colors, if it has one.
fn balanced(p: &GridPoint, seed: u64) -> Result<(Complex, Option<ColorMap>)> {
    let g = generate(family_of(p)?, p.d, p.n, seed)?;
    let d = (g.complex.dim() + 1) as usize;
    let coloring = match g.coloring {
        Some(k) if k.palette() == d && k.is_proper_on(&g.complex) => Some(k),
        _ => find_proper_coloring(&g.complex).found().filter(|k| k.palette() == d),
    };
    Ok((g.complex, coloring))
}

fn lower_bound(p: &GridPoint, seed: u64, equality: bool) -> Result<Verdict> {
    let (c, coloring) = balanced(p, seed)?;
    let d = (c.dim() + 1) as i64;
    let h = c.h_vector()?;
    let (lhs, rhs) = (2 * h.h(2), (d - 1) * h.h(1));
    let minimal = is_minimal_cycle_complex(&c, Ring::Z2)?;
    let detail = json!({
        "f": c.f_vector().0,
        "h": h.0,
        "two_h2": lhs,
        "d_minus_1_h1": rhs,
        "balanced": coloring.is_some(),
        "minimal_cycle_complex": minimal,
    });
    if coloring.is_none() || !minimal || d < 3 {
        return Ok(hypotheses_unmet(detail, "needs a balanced minimal cycle complex with d >= 3"));
    }
    let holds = if equality { lhs == rhs } else { lhs >= rhs };
    Ok((if holds { Outcome::Pass } else { Outcome::Fail }, detail))
}

fn subsets_of_size_at_least(d: usize, k: usize) -> Vec<BTreeSet<Color>> {
    (0u32..1 << d)
        .filter(|m| m.count_ones() as usize >= k)
        .map(|m| (1..=d).filter(|i| m & (1 << (i - 1)) != 0).collect())
        .collect()
}

fn rank_selected_rigidity(p: &GridPoint, seed: u64, trials: usize) -> Result<Verdict> {
    let (c, coloring) = balanced(p, seed)?;
    let Some(coloring) = coloring else {
        return Ok(hypotheses_unmet(json!({}), "not balanced"));
    };
    if !is_minimal_cycle_complex(&c, Ring::Z2)? {
        return Ok(hypotheses_unmet(json!({}), "not a minimal cycle complex"));
    }
    let d = (c.dim() + 1) as usize;
    let mut rows = Vec::new();
    let mut all_rigid = true;
    for t in subsets_of_size_at_least(d, 3) {
        let sub = rank_selected(&c, &coloring, &t);
        let g = sub.graph();
        let k = t.len();
        let target = k as i64 * g.num_vertices() as i64 - binomial(k as i64 + 1, 2);
        let mut found = None;
        let mut best = 0;
        for i in 0..trials {
            let s = trial_seed(seed, i);
            let r = is_infinitesimally_rigid(&sample_generic(&g, k, s));
            best = best.max(r.rank);
            if r.rigid {
                found = Some(s);
                break;
            }
        }
        all_rigid &= found.is_some();
        rows.push(json!({
            "colors": t,
            "f0": g.num_vertices(),
            "edges": g.num_edges(),
            "rank": best,
            "target_rank": target,
            "rigid": found.is_some(),
            "witness_seed": found,
        }));
    }
    let detail = json!({ "subsets": rows });
    Ok((if all_rigid { Outcome::Pass } else { Outcome::Inconclusive }, detail))
}

/// Facet types `(|F ∩ κ⁻¹(i)|)_i`.
fn facet_types(c: &Complex, coloring: &ColorMap) -> BTreeSet<Vec<usize>> {
    c.facets().iter().map(|f| coloring.type_of(f.iter())).collect()
}

fn sparse_verdict(g: &Graph, l: &SupportMap, trials: usize, seed: u64, mut detail: Value) -> Result<Verdict> {
    let v = is_sparse_rigid(g, l, trials, seed)?;
    let rigid = v.rigid;
    detail["search"] = json!({
        "rigid": v.rigid,
        "trials": v.trials,
        "witness_seed": v.witness_seed,
        "max_rank": v.max_rank,
        "target_rank": v.target_rank,
        "note": v.note,
    });
    Ok((if rigid { Outcome::Pass } else { Outcome::Inconclusive }, detail))
}

fn colored_sparse_rigidity(claim: &str, p: &GridPoint, seed: u64, trials: usize) -> Result<Verdict> {
    let a = a_of(p)?.to_vec();
    let (c, coloring) = balanced(p, seed)?;
    let Some(proper) = coloring else {
        return Ok(hypotheses_unmet(json!({}), "no proper coloring"));
    };
    let d = (c.dim() + 1) as usize;
    let m = a.len();
    let detail_base = json!({ "a": a, "f0": c.num_vertices(), "facets": c.num_facets() });
    let (kappa, hypotheses): (ColorMap, std::result::Result<(), String>) = match claim {
        "prop-8.1" => {
            // merge colors into blocks of sizes a, then move the vertex of
            // color a_1 (the last of block 1) with the smallest label to block 2
            if m < 2 || a[0] < 4 || a.iter().any(|&x| x < 2) {
                return Ok(hypotheses_unmet(detail_base, "needs a_1 >= 4 and a_i >= 2"));
            }
            let merged = proper.merge_blocks(&a)?;
            let moved = proper.iter().find(|&(_, col)| col == a[0]).map(|(v, _)| v).expect("color used");
            let colors = merged.iter().map(|(v, col)| (v, if v == moved { 2 } else { col })).collect();
            let kappa = ColorMap::new(colors, m)?;
            let allowed: BTreeSet<Vec<usize>> = (0..m)
                .map(|j| {
                    let mut t = a.clone();
                    t[j] += 1;
                    t[0] -= 1;
                    t
                })
                .filter(|t| t.iter().all(|&x| x > 0))
                .collect();
            let types = facet_types(&c, &kappa);
            let ok = types.is_subset(&allowed) && is_minimal_cycle_complex(&c, Ring::Z2)?;
            (kappa, if ok { Ok(()) } else { Err(format!("facet types {types:?} not of the form a + e_j - e_1")) })
        }
        _ => {
            if a.iter().sum::<usize>() != d {
                return Ok(hypotheses_unmet(detail_base, "a must sum to d"));
            }
            let kappa = proper.merge_blocks(&a)?;
            let mut ok = verify_a_coloring(&c, &kappa, &a)?;
            let why = if claim == "thm-6.1" {
                ok &= a.iter().all(|&x| x >= 2) && d >= 3 && is_minimal_cycle_complex(&c, Ring::Z2)?;
                "needs an a-balanced minimal cycle complex with a_i >= 2"
            } else {
                let excluded = a == [d - 1, 1] || a == [1, d - 1];
                ok &= !excluded && d >= 3 && c.is_pseudomanifold() && c.in_class_cd();
                "needs an a-balanced pseudomanifold in C_d with a != (d-1,1), (1,d-1)"
            };
            (kappa, if ok { Ok(()) } else { Err(why.to_string()) })
        }
    };
    if let Err(why) = hypotheses {
        return Ok(hypotheses_unmet(detail_base, &why));
    }
    let mut detail = detail_base;
    detail["facet_types"] = json!(facet_types(&c, &kappa));
    let l = SupportMap::from_coloring(&kappa, &a)?;
    sparse_verdict(&c.graph(), &l, trials, seed, detail)
}

fn transversal_sparse_rigidity(p: &GridPoint, seed: u64, trials: usize) -> Result<Verdict> {
    let spec = a_of(p)?;
    let (a, b) = (spec[0], spec[1..].to_vec());
    let (c, coloring) = balanced(p, seed)?;
    let Some(proper) = coloring else {
        return Ok(hypotheses_unmet(json!({}), "no proper coloring"));
    };
    let d = (c.dim() + 1) as usize;
    let detail = json!({ "a": a, "b": b, "f0": c.num_vertices() });
    if !(d > a && a >= 2) || b.is_empty() || b.contains(&0) || a + b.iter().sum::<usize>() != d {
        return Ok(hypotheses_unmet(detail, "needs d > a >= 2 and positive b with a + sum(b) = d"));
    }
    if !is_minimal_cycle_complex(&c, Ring::Z2)? {
        return Ok(hypotheses_unmet(detail, "not a minimal cycle complex"));
    }
    // the first a color classes are free; the rest merge into blocks of sizes b
    let free: BTreeSet<Vertex> = proper.preimage(&(1..=a).collect());
    let mut block_of = Vec::new();
    for (i, &bi) in b.iter().enumerate() {
        block_of.extend(std::iter::repeat_n(i + 1, bi));
    }
    let rest: BTreeMap<Vertex, Color> =
        proper.iter().filter(|(v, _)| !free.contains(v)).map(|(v, col)| (v, block_of[col - a - 1])).collect();
    let kappa = ColorMap::new(rest, b.len())?;
    let l = transversal_support_map(&c, &free, &kappa, &b, a)?;
    let mut detail = detail;
    detail["free_vertices"] = json!(free);
    sparse_verdict(&c.graph(), &l, trials, seed, detail)
}

fn flexible_example(p: &GridPoint, seed: u64, trials: usize) -> Result<Verdict> {
    let family = family_of(p)?;
    if family != Family::SubdividedStacked {
        return Err(Error::Usage("example-7.4 runs on the subdivided-stacked family".into()));
    }
    let g = generate(family, p.d, p.n, seed)?;
    let c = g.complex;
    let coloring = g.coloring.expect("subdivided family is colored");
    let d = p.d;
    let a = [d - 1, 1];
    if !verify_a_coloring(&c, &coloring, &a)? {
        return Ok(hypotheses_unmet(json!({}), "coloring is not a (d-1,1)-coloring"));
    }
    let l = SupportMap::from_coloring(&coloring, &a)?;
    let graph = c.graph();
    let original = coloring.preimage(&BTreeSet::from([1]));
    let bound = p.n as i64 - d as i64;
    let mut samples = Vec::new();
    let mut violated = false;
    for i in 0..trials {
        let s = trial_seed(seed, i);
        let fw = sample_sparse(&graph, &l, s)?;
        let r = is_infinitesimally_rigid(&fw);
        let sub_stress = stress_space_dim(&fw.induced(&original));
        let ok = !r.rigid && r.stress_dim as i64 >= bound && sub_stress as i64 >= bound;
        violated |= !ok;
        samples.push(json!({
            "seed": s,
            "rank": r.rank,
            "stress_dim": r.stress_dim,
            "original_vertices_stress_dim": sub_stress,
            "rigid": r.rigid,
        }));
    }
    let detail = json!({
        "f0_gamma": p.n,
        "f0": c.num_vertices(),
        "stress_lower_bound": bound,
        "samples": samples,
    });
    Ok((if violated { Outcome::Fail } else { Outcome::Pass }, detail))
}

/// Generic points until they form an l.s.o.p.
fn generic_lsop(c: &Complex, seed: u64, attempts: usize) -> Result<Option<LsopCandidate>> {
    let d = (c.dim() + 1) as usize;
    let g = c.graph();
    for i in 0..attempts {
        let s = trial_seed(seed, i);
        let mut cand = LsopCandidate::from_framework(&sample_generic(&g, d, s));
        cand.seed = Some(s);
        if is_lsop(c, &cand)? {
            return Ok(Some(cand));
        }
    }
    Ok(None)
}

fn lee_dimensions(p: &GridPoint, seed: u64, trials: usize) -> Result<Verdict> {
    let (c, coloring) = balanced(p, seed)?;
    if !c.is_strongly_connected() {
        return Ok(hypotheses_unmet(json!({}), "not strongly connected"));
    }
    let d = (c.dim() + 1) as usize;
    let h = c.h_vector()?;
    let mut candidates: Vec<(&str, LsopCandidate)> = Vec::new();
    if let Some(cand) = generic_lsop(&c, seed, trials.max(COLORED_SOP_ATTEMPTS))? {
        candidates.push(("generic", cand));
    }
    if let Some(k) = &coloring {
        if let Ok(cand) = colored_sop(&c, k, &vec![1; d], seed) {
            candidates.push(("colored", cand));
        }
    }
    if candidates.is_empty() {
        return Ok((Outcome::Inconclusive, json!({ "note": "no l.s.o.p. found" })));
    }
    let mut rows = Vec::new();
    let mut ok = true;
    for (kind, cand) in &candidates {
        let dims = graded_dims(&c, cand)?;
        let omega = omega_injective(&c, cand)?;
        let fw = Framework::new(c.graph(), d, cand.points().clone())?;
        let rigid = is_infinitesimally_rigid(&fw).rigid;
        let good = dims.dim1 as i64 == h.h(1)
            && dims.dim2 as i64 == h.h(2)
            && omega.bookkeeping_consistent
            && omega.injective == rigid;
        ok &= good;
        rows.push(json!({
            "lsop": kind,
            "seed": cand.seed,
            "dim1": dims.dim1,
            "dim2": dims.dim2,
            "dim2_with_omega": dims.dim2_with_omega,
            "omega_injective": omega.injective,
            "rigid": rigid,
            "consistent": good,
        }));
    }
    let detail = json!({ "h": h.0, "candidates": rows });
    Ok((if ok { Outcome::Pass } else { Outcome::Fail }, detail))
}

/// Supports drawn from a random sub-palette of `[d]`, so that Hall
/// violations are common.
fn random_support_map(rng: &mut ChaCha8Rng, d: usize, vertices: &[Vertex]) -> Result<SupportMap> {
    let width = rng.gen_range(1..=d);
    let palette = random_subset(rng, (1..=d).collect(), width);
    let mut sets = BTreeMap::new();
    for &v in vertices {
        let size = rng.gen_range(1..=palette.len());
        sets.insert(v, random_subset(rng, palette.iter().copied().collect(), size));
    }
    SupportMap::new(d, sets)
}

fn random_subset(rng: &mut ChaCha8Rng, mut pool: Vec<usize>, size: usize) -> BTreeSet<usize> {
    (0..size).map(|_| pool.swap_remove(rng.gen_range(0..pool.len()))).collect()
}

fn hall_oracle(p: &GridPoint, seed: u64, samples: usize) -> Result<Verdict> {
    let d = p.d;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut hall_true, mut agreements, mut partial_misses, mut total_misses, mut contradictions) = (0, 0, 0, 0, 0);
    for _ in 0..p.n {
        let k = rng.gen_range(1..=d + 1);
        let u: Vec<Vertex> = (0..k as Vertex).collect();
        let l = random_support_map(&mut rng, d, &u)?;
        let uset: BTreeSet<Vertex> = u.iter().copied().collect();
        let hall = hall_condition(&l, &uset)?;
        hall_true += usize::from(hall);
        let graph = Graph::new(u.iter().copied(), [])?;
        let mut independent_at = 0;
        for _ in 0..samples {
            let fw = sample_sparse(&graph, &l, rng.gen())?;
            independent_at += usize::from(affinely_independent(&fw, &uset));
        }
        match (hall, independent_at) {
            (true, n) if n == samples => agreements += 1,
            (true, 0) => total_misses += 1,
            (true, _) => partial_misses += 1,
            (false, 0) => agreements += 1,
            // a Hall violation forces dependence at every sparse configuration
            (false, _) => contradictions += 1,
        }
    }
    let detail = json!({
        "pairs": p.n,
        "samples_per_pair": samples,
        "hall_true": hall_true,
        "hall_false": p.n - hall_true,
        "agreements": agreements,
        "partial_misses": partial_misses,
        "total_misses": total_misses,
        "contradictions": contradictions,
    });
    let outcome = if contradictions + total_misses > 0 {
        Outcome::Fail
    } else if partial_misses > 0 {
        Outcome::Inconclusive
    } else {
        Outcome::Pass
    };
    Ok((outcome, detail))
}

fn small_int(rng: &mut ChaCha8Rng) -> num::BigRational {
    rat(rng.gen_range(-4..=4))
}

fn cone_equivalence(p: &GridPoint, seed: u64) -> Result<Verdict> {
    let d = p.d;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut tested, mut resampled, mut rigid_cases, mut disagreements) = (0, 0, 0, 0);
    let mut first_disagreement = Value::Null;
    while tested < p.n {
        let m = rng.gen_range(2..=d + 3) as Vertex;
        let density = rng.gen_range(0.4..1.0);
        let edges: Vec<(Vertex, Vertex)> =
            (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).filter(|_| rng.gen_bool(density)).collect();
        let cone = Graph::new(0..m, edges)?.cone(m)?;
        let points = (0..=m).map(|v| (v, (0..d).map(|_| small_int(&mut rng)).collect())).collect();
        let fw = Framework::new(cone, d, points)?;
        let normal: Vec<_> = (0..d).map(|_| small_int(&mut rng)).collect();
        let Ok(h) = Hyperplane::new(normal, small_int(&mut rng)) else {
            resampled += 1;
            continue;
        };
        let proj = match cone_project(&fw, m, &h) {
            Ok(proj) => proj,
            Err(Error::Geometry(_)) => {
                resampled += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        tested += 1;
        let (a, b) = (is_infinitesimally_rigid(&fw).rigid, is_infinitesimally_rigid(&proj).rigid);
        rigid_cases += usize::from(a);
        if a != b {
            disagreements += 1;
            if first_disagreement.is_null() {
                first_disagreement = json!({ "vertices": m + 1, "cone_rigid": a, "projection_rigid": b });
            }
        }
    }
    let detail = json!({
        "cones": tested,
        "rigid": rigid_cases,
        "flexible": tested - rigid_cases,
        "resampled": resampled,
        "disagreements": disagreements,
        "first_disagreement": first_disagreement,
    });
    Ok((if disagreements == 0 { Outcome::Pass } else { Outcome::Fail }, detail))
}

/// `c` plus a copy relabelled above it, optionally sharing one vertex.
fn doubled(c: &Complex, share_vertex: bool) -> Result<Complex> {
    let shift = c.fresh_vertex();
    let first = c.vertices()[0];
    let map: BTreeMap<Vertex, Vertex> =
        c.vertices().iter().map(|&v| (v, if share_vertex && v == first { v } else { v + shift })).collect();
    Complex::from_facets(c.facets().iter().cloned().chain(c.relabel(&map).facets().iter().cloned()))
}

const ENUMERATION_FACETS: usize = 20;

fn minimal_cycles(p: &GridPoint, seed: u64) -> Result<Verdict> {
    let c = generate(family_of(p)?, p.d, p.n, seed)?.complex;
    let mut comparisons = Vec::new();
    let mut ok = true;
    let mut variants = vec![("complex", c.clone())];
    if c.num_facets() > 1 {
        variants.push(("punctured", Complex::from_facets(c.facets()[1..].to_vec())?));
    }
    variants.push(("disjoint_double", doubled(&c, false)?));
    variants.push(("wedge_double", doubled(&c, true)?));
    for (name, x) in &variants {
        if x.num_facets() > ENUMERATION_FACETS {
            continue;
        }
        let chain = Chain::facet_sum(x, Ring::Z2)?;
        let kernel = chain.is_minimal_cycle()?;
        let enumeration = chain.is_minimal_cycle_by_enumeration()?;
        ok &= kernel == enumeration;
        comparisons.push(json!({ "variant": name, "facets": x.num_facets(), "kernel": kernel, "enumeration": enumeration }));
    }
    let mut lemma = Value::Null;
    if c.is_pseudomanifold() {
        let minimal = is_minimal_cycle_complex(&c, Ring::Z2)?;
        ok &= minimal;
        if minimal && c.num_facets() > 1 {
            let r = verify_basic_lemma(&c, Ring::Z2)?;
            ok &= r.all_pass();
            lemma = serde_json::to_value(&r).expect("serializes");
        }
    }
    let detail = json!({ "facets": c.num_facets(), "comparisons": comparisons, "basic_lemma": lemma });
    Ok((if ok { Outcome::Pass } else { Outcome::Fail }, detail))
}

fn splitting_replay(p: &GridPoint, seed: u64) -> Result<Verdict> {
    let family = family_of(p)?;
    if family != Family::Stacked {
        return Err(Error::Usage("lemma-2.2-splitting runs on the stacked family".into()));
    }
    let c = generate(family, p.d, p.n, seed)?.complex;
    let d = p.d;
    let full = c.graph();
    let order: Vec<Vertex> = c.vertices().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current: BTreeSet<Vertex> = order[..=d].iter().copied().collect();
    let mut fw = sample_generic(&full.induced(&current), d, seed);
    if !is_infinitesimally_rigid(&fw).rigid {
        return Ok((Outcome::Inconclusive, json!({ "note": "base simplex sample not rigid" })));
    }
    let mut steps = Vec::new();
    for &w in &order[d + 1..] {
        let attach: BTreeSet<Vertex> = full.neighbors(w).intersection(&current).copied().collect();
        let clique = attach.iter().all(|&x| attach.iter().all(|&y| x == y || full.has_edge(x, y)));
        if attach.len() != d || !clique {
            return Ok((Outcome::Inconclusive, json!({ "note": format!("vertex {w} is not stacked on a facet") })));
        }
        let x = *attach.iter().next().expect("nonempty");
        let cset: BTreeSet<Vertex> = attach.iter().copied().filter(|&y| y != x).collect();
        current.insert(w);
        let g = full.induced(&current);
        let z: Vec<_> = (0..d).map(|_| rat(rng.gen_range(1..1 << 20))).collect();
        match vertex_split(&fw, &g, x, w, &cset, &z) {
            Ok(next) => {
                steps.push(json!({ "vertex": w, "onto": x, "rigid": true }));
                fw = next;
            }
            Err(e) => {
                steps.push(json!({ "vertex": w, "onto": x, "error": e.to_string() }));
                return Ok((Outcome::Inconclusive, json!({ "steps": steps })));
            }
        }
    }
    Ok((Outcome::Pass, json!({ "steps": steps })))
}

fn gluing_replay(p: &GridPoint, seed: u64, trials: usize) -> Result<Verdict> {
    let c = generate(family_of(p)?, p.d, p.n, seed)?.complex;
    let d = (c.dim() + 1) as usize;
    let Some(cand) = generic_lsop(&c, seed, trials.max(1))? else {
        return Ok((Outcome::Inconclusive, json!({ "note": "no l.s.o.p. found" })));
    };
    // cone with apex at the origin: every facet plus the apex is a rigid simplex
    let apex = c.fresh_vertex();
    let mut points = cand.points().clone();
    points.insert(apex, vec![rat(0); d]);
    let cone_graph = c.graph().cone(apex)?;
    let fw = Framework::new(cone_graph, d, points)?;
    let order = c.ridge_bfs_order(0);
    let simplex = |f: &[Vertex]| -> BTreeSet<Vertex> { f.iter().copied().chain([apex]).collect() };
    let first = simplex(&c.facets()[order[0]]);
    let mut union = Graph::complete(first.iter().copied());
    let mut union_rigid = is_infinitesimally_rigid(&fw.with_graph(union.clone())?).rigid;
    let (mut applicable, mut contradictions) = (0, 0);
    for &i in &order[1..] {
        let piece_vertices = simplex(&c.facets()[i]);
        let piece = Graph::complete(piece_vertices.iter().copied());
        let pre = glue_precondition(&fw, union.vertex_set(), &piece_vertices);
        let piece_rigid = is_infinitesimally_rigid(&fw.with_graph(piece.clone())?).rigid;
        let next = union.union(&piece);
        let next_rigid = is_infinitesimally_rigid(&fw.with_graph(next.clone())?).rigid;
        if pre && union_rigid && piece_rigid {
            applicable += 1;
            contradictions += usize::from(!next_rigid);
        }
        union = next;
        union_rigid = next_rigid;
    }
    let detail = json!({
        "steps": order.len() - 1,
        "applicable_steps": applicable,
        "contradictions": contradictions,
        "final_rigid": union_rigid,
        "lsop_seed": cand.seed,
    });
    Ok((if contradictions == 0 { Outcome::Pass } else { Outcome::Fail }, detail))
}
