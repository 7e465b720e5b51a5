use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use rigidlab::coloring::{find_proper_coloring, verify_a_coloring, ColoringOutcome};
use rigidlab::generators::{generate, Family};
use rigidlab::harness::{self, ExperimentSpec, Outcome};
use rigidlab::io::{parse_coloring, parse_scx, write_coloring, write_scx};
use rigidlab::rigidity::{is_infinitesimally_rigid, is_sparse_rigid, sample_generic, trial_seed};
use rigidlab::sr_bridge::{colored_sop, graded_dims, is_lsop, omega_injective, LsopCandidate};
use rigidlab::{ColorMap, Complex, SupportMap};

#[derive(Parser)]
#[command(name = "rigidlab", version, about = "Rigidity and face-number experiments on simplicial complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a complex and write it in .scx format
    Gen {
        /// simplex, cross, stacked, stacked-cross or subdivided-stacked
        family: Family,
        /// Vertices per facet
        #[arg(long)]
        d: usize,
        /// Vertex count (ignored by simplex and cross)
        #[arg(long, default_value_t = 0)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the family's coloring, when it has one
        #[arg(long)]
        coloring_out: Option<PathBuf>,
    },
    /// Find a proper coloring, optionally merged into an a-coloring
    Color {
        file: PathBuf,
        #[arg(long, value_delimiter = ',')]
        a: Option<Vec<usize>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Infinitesimal rigidity of the graph at generic or sparse points
    Rigid {
        file: PathBuf,
        /// Coloring file; together with --a selects (κ,a)-sparse points
        #[arg(long)]
        sparse: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        a: Option<Vec<usize>>,
        /// Ambient dimension for generic points (default: vertices per facet)
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Degree one and two dimensions of the face ring modulo an l.s.o.p.
    Srdims {
        file: PathBuf,
        /// Coloring file; together with --a builds a colored s.o.p.
        #[arg(long)]
        coloring: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        a: Option<Vec<usize>>,
        #[arg(long, default_value_t = 16)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Replay a registered claim and write a JSON report
    Verify {
        claim: String,
        /// Experiment spec (JSON); defaults to the claim's standard grid
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Replace the spec's seeds
        #[arg(long, value_delimiter = ',')]
        seed: Option<Vec<u64>>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, alias = "out")]
        json: Option<PathBuf>,
    },
    /// List registered claims
    ListClaims {
        #[arg(long)]
        json: bool,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_complex(path: &Path) -> Result<Complex> {
    parse_scx(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn read_coloring(path: &Path) -> Result<ColorMap> {
    parse_coloring(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(value: &Value, out: Option<&Path>) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    emit(&s, out)
}

fn vertices_per_facet(c: &Complex) -> usize {
    (c.dim() + 1).max(0) as usize
}

fn cmd_gen(family: Family, d: usize, n: usize, seed: u64, out: Option<PathBuf>, col: Option<PathBuf>) -> Result<()> {
    let g = generate(family, d, n, seed)?;
    emit(&write_scx(&g.complex), out.as_deref())?;
    if let Some(path) = col {
        let Some(k) = g.coloring else { bail!("family {family} carries no coloring") };
        emit(&write_coloring(&k), Some(&path))?;
    }
    Ok(())
}

fn cmd_color(file: &Path, a: Option<Vec<usize>>, out: Option<PathBuf>) -> Result<()> {
    let c = read_complex(file)?;
    let k = match find_proper_coloring(&c) {
        ColoringOutcome::Found(k) => k,
        ColoringOutcome::NotColorable => bail!("no proper coloring with {} colors", vertices_per_facet(&c)),
        ColoringOutcome::Timeout { nodes } => bail!("coloring search gave up after {nodes} nodes"),
    };
    let k = match a {
        Some(a) => {
            let merged = k.merge_blocks(&a)?;
            if !verify_a_coloring(&c, &merged, &a)? {
                bail!("merged coloring is not an {a:?}-coloring");
            }
            merged
        }
        None => k,
    };
    emit(&write_coloring(&k), out.as_deref())
}

fn support_map(c: &Complex, coloring: &Path, a: &[usize]) -> Result<(ColorMap, SupportMap)> {
    let k = read_coloring(coloring)?;
    if !verify_a_coloring(c, &k, a)? {
        bail!("{} is not an {a:?}-coloring of the complex", coloring.display());
    }
    let l = SupportMap::from_coloring(&k, a)?;
    Ok((k, l))
}

#[allow(clippy::too_many_arguments)]
fn cmd_rigid(
    file: &Path,
    sparse: Option<PathBuf>,
    a: Option<Vec<usize>>,
    d: Option<usize>,
    trials: usize,
    seed: u64,
    json: Option<PathBuf>,
) -> Result<bool> {
    let c = read_complex(file)?;
    let g = c.graph();
    let (value, rigid) = match (sparse, a) {
        (Some(col), Some(a)) => {
            let (_, l) = support_map(&c, &col, &a)?;
            let v = is_sparse_rigid(&g, &l, trials, seed)?;
            (serde_json::to_value(&v)?, v.rigid)
        }
        (None, None) => {
            let d = d.unwrap_or_else(|| vertices_per_facet(&c));
            let mut last = None;
            for i in 0..trials.max(1) {
                let r = is_infinitesimally_rigid(&sample_generic(&g, d, trial_seed(seed, i)));
                let done = r.rigid;
                last = Some(r);
                if done {
                    break;
                }
            }
            let r = last.expect("at least one trial");
            (serde_json::to_value(&r)?, r.rigid)
        }
        _ => bail!("--sparse and --a go together"),
    };
    match &json {
        Some(p) => emit_json(&value, Some(p))?,
        None => println!("{}", if rigid { "rigid" } else { "not rigid" }),
    }
    Ok(rigid)
}

fn cmd_srdims(
    file: &Path,
    coloring: Option<PathBuf>,
    a: Option<Vec<usize>>,
    trials: usize,
    seed: u64,
    json: Option<PathBuf>,
) -> Result<()> {
    let c = read_complex(file)?;
    let d = vertices_per_facet(&c);
    let cand = match (coloring, a) {
        (Some(col), Some(a)) => colored_sop(&c, &read_coloring(&col)?, &a, seed)?,
        (None, None) => {
            let g = c.graph();
            let found = (0..trials.max(1)).map(|i| trial_seed(seed, i)).find_map(|s| {
                let mut cand = LsopCandidate::from_framework(&sample_generic(&g, d, s));
                cand.seed = Some(s);
                matches!(is_lsop(&c, &cand), Ok(true)).then_some(cand)
            });
            found.context("no l.s.o.p. among the sampled configurations")?
        }
        _ => bail!("--coloring and --a go together"),
    };
    let dims = graded_dims(&c, &cand)?;
    let h = c.h_vector()?;
    let mut value = json!({
        "lsop_seed": cand.seed,
        "dim1": dims.dim1,
        "dim2": dims.dim2,
        "dim2_with_omega": dims.dim2_with_omega,
        "h1": h.h(1),
        "h2": h.h(2),
    });
    if c.is_strongly_connected() {
        let omega = omega_injective(&c, &cand)?;
        value["omega_injective"] = json!(omega.injective);
        value["bookkeeping_consistent"] = json!(omega.bookkeeping_consistent);
    }
    match &json {
        Some(p) => emit_json(&value, Some(p)),
        None => emit_json(&value, None),
    }
}

fn cmd_verify(
    claim: &str,
    spec: Option<PathBuf>,
    seeds: Option<Vec<u64>>,
    trials: Option<usize>,
    json: Option<PathBuf>,
) -> Result<ExitCode> {
    let mut spec: ExperimentSpec = match spec {
        Some(p) => serde_json::from_str(&read(&p)?).with_context(|| format!("parsing {}", p.display()))?,
        None => ExperimentSpec::default_for(claim)?,
    };
    if spec.claim != claim {
        bail!("spec is for claim {:?}, not {claim:?}", spec.claim);
    }
    if let Some(s) = seeds {
        spec.seeds = s;
    }
    if let Some(t) = trials {
        spec.trials = t;
    }
    if json.is_some() {
        spec.output = json;
    }
    let report = harness::run(&spec)?;
    if spec.output.is_none() {
        print!("{}", report.to_json());
    }
    let s = report.summary;
    eprintln!("{}: {} pass, {} fail, {} inconclusive of {}", report.claim, s.pass, s.fail, s.inconclusive, s.total);
    for i in report.instances.iter().filter(|i| i.outcome == Outcome::Inconclusive) {
        eprintln!("warning: {} is inconclusive (sampling evidence only)", i.key);
    }
    Ok(ExitCode::from(report.exit_code() as u8))
}

fn cmd_list_claims(as_json: bool) -> Result<()> {
    let claims = harness::list_claims();
    if as_json {
        return emit_json(&serde_json::to_value(claims)?, None);
    }
    for c in claims {
        println!("{:<24} {:<8} {}", c.id, serde_json::to_value(c.kind)?.as_str().unwrap_or(""), c.statement);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen { family, d, n, seed, out, coloring_out } => {
            cmd_gen(family, d, n, seed, out, coloring_out).map(|_| ExitCode::SUCCESS)
        }
        Command::Color { file, a, out } => cmd_color(&file, a, out).map(|_| ExitCode::SUCCESS),
        Command::Rigid { file, sparse, a, d, trials, seed, json } => {
            cmd_rigid(&file, sparse, a, d, trials, seed, json).map(|_| ExitCode::SUCCESS)
        }
        Command::Srdims { file, coloring, a, trials, seed, json } => {
            cmd_srdims(&file, coloring, a, trials, seed, json).map(|_| ExitCode::SUCCESS)
        }
        Command::Verify { claim, spec, seed, trials, json } => cmd_verify(&claim, spec, seed, trials, json),
        Command::ListClaims { json } => cmd_list_claims(json).map(|_| ExitCode::SUCCESS),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(2)
    })
}
