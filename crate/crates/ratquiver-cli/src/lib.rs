//! Command-line front end: argument parsing, interchange files and report rendering.

pub mod diagram;
pub mod interchange;
pub mod report;

use std::io::Read;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use ratquiver::exact_algebra::QuadMatrix;
use ratquiver::gsets::{FiniteGroup, Subgroup};
use ratquiver::harish_chandra::{
    build_example, build_example_window, casimir_matrix, functor_e, inverse_e, roundtrip_hc, validate_hc, ExampleKind, HCModule,
};
use ratquiver::quiver::{fixtures, quiver_homs, RationalQuiver, RelationMode};
use ratquiver::representations::{
    check_fh, check_hf, functor_f, functor_h, hom_space, is_isomorphism, rep_base_change, rep_isomorphic, validate_rep,
    validate_species_rep, QuiverRep, SpeciesRep, SummandKind,
};
use ratquiver::species::{
    quiver_of_species, roundtrip_quiver, roundtrip_species, species_base_change, species_of_quiver, species_restrict,
    verify_species_iso, EtaleSpecies,
};
use ratquiver::sweeps::{self, SweepSummary};
use ratquiver::unipotent::{stabilize, unipotent_sqrt_traced};
use serde_json::{json, Value};

pub use diagram::render_diagram;
pub use interchange::ParseError;
pub use report::CliReport;

use interchange::*;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("error: {0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Parse(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

fn failed(e: impl std::fmt::Display) -> CliError {
    CliError::Failed(e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "ratquiver", version, about = "Exact rational quivers, species, unipotent algorithms and sl2 Harish-Chandra modules")]
struct Cli {
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = sweeps::DEFAULT_SEED)]
    seed: u64,
    /// Case count for randomized suites.
    #[arg(long, global = true)]
    cases: Option<usize>,
    /// Fan independent cases out over threads.
    #[arg(long, global = true)]
    parallel: bool,
    /// Write the primary output document to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Rational quivers.
    Quiver {
        #[command(subcommand)]
        op: QuiverOp,
    },
    /// Etale species.
    Species {
        #[command(subcommand)]
        op: SpeciesOp,
    },
    /// Quiver and species representations.
    Rep {
        #[command(subcommand)]
        op: RepOp,
    },
    /// Unipotent stabilization and square roots.
    Unipotent {
        #[command(subcommand)]
        op: UnipotentOp,
    },
    /// Harish-Chandra modules and the comparison functor.
    Hc {
        #[command(subcommand)]
        op: HcOp,
    },
    /// Worked examples and randomized suites.
    Examples {
        #[command(subcommand)]
        op: ExamplesOp,
    },
}

#[derive(clap::Args, Debug)]
struct Input {
    /// Input document, `-` for stdin.
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(clap::Args, Debug)]
struct SubgroupArg {
    /// Subgroup elements, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    subgroup: Vec<usize>,
}

#[derive(clap::Args, Debug)]
struct ParentArg {
    /// Parent group: c2, c3, s3 or a group document.
    #[arg(long)]
    parent: String,
}

#[derive(Subcommand, Debug)]
enum QuiverOp {
    /// Emit a fixture quiver: gelfand, cyclic or two-loop.
    Fixture { name: String },
    Validate(Input),
    BaseChange {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        sub: SubgroupArg,
    },
    Restrict {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        parent: ParentArg,
        #[command(flatten)]
        sub: SubgroupArg,
    },
    Homs {
        #[command(flatten)]
        input: Input,
        /// Target quiver document.
        #[arg(long)]
        to: PathBuf,
        /// raw or with-relations.
        #[arg(long, default_value = "with-relations")]
        mode: String,
    },
}

#[derive(Subcommand, Debug)]
enum SpeciesOp {
    FromQuiver(Input),
    ToQuiver(Input),
    /// Round trip of a quiver or species document.
    Roundtrip(Input),
    BaseChange {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        sub: SubgroupArg,
    },
    Restrict {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        parent: ParentArg,
        #[command(flatten)]
        sub: SubgroupArg,
    },
}

#[derive(Subcommand, Debug)]
enum RepOp {
    Validate(Input),
    Hom {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        to: PathBuf,
    },
    ToSpecies(Input),
    FromSpecies(Input),
    Isomorphic {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        to: PathBuf,
    },
    BaseChange {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        sub: SubgroupArg,
    },
}

#[derive(Subcommand, Debug)]
enum UnipotentOp {
    Stabilize {
        #[command(flatten)]
        input: Input,
        /// Include every iterate and its defect exponent.
        #[arg(long)]
        trace: bool,
    },
    Sqrt {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        trace: bool,
    },
}

#[derive(Subcommand, Debug)]
enum HcOp {
    /// Build a worked example module.
    Build {
        /// finite, discrete, principal or principal_dual.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        epsilon: Option<usize>,
        #[arg(long)]
        window: Option<usize>,
    },
    Validate(Input),
    ToQuiver(Input),
    FromQuiver {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        ell: usize,
    },
    Roundtrip {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        ell: usize,
    },
    Casimir {
        #[command(flatten)]
        input: Input,
        #[arg(long, allow_hyphen_values = true)]
        weight: Option<i64>,
    },
}

#[derive(Subcommand, Debug)]
enum ExamplesOp {
    /// Run worked examples end to end.
    Run {
        #[arg(long)]
        all: bool,
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        ell: Option<usize>,
    },
    /// Seeded randomized suites.
    Sweep {
        /// Run only the named suite.
        #[arg(long)]
        only: Option<String>,
    },
}

struct Ctx {
    seed: u64,
    cases: Option<usize>,
    parallel: bool,
}

fn read_doc(path: &Path) -> Result<Value, CliError> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Io(e.to_string()))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?
    };
    Ok(parse_text(&text)?)
}

fn read_kind(path: &Path, kind: &str) -> Result<Value, CliError> {
    let doc = read_doc(path)?;
    expect_kind(&doc, kind)?;
    Ok(doc)
}

fn read_quiver(path: &Path) -> Result<RationalQuiver, CliError> {
    Ok(quiver_from_json(&read_kind(path, "quiver")?)?)
}

fn read_species(path: &Path) -> Result<EtaleSpecies, CliError> {
    Ok(species_from_json(&read_kind(path, "species")?)?)
}

fn read_rep(path: &Path) -> Result<QuiverRep, CliError> {
    Ok(rep_from_json(&read_kind(path, "rep")?)?)
}

fn read_hc(path: &Path) -> Result<HCModule, CliError> {
    Ok(hc_from_json(&read_kind(path, "hc_module")?)?)
}

fn subgroup(group: &Arc<FiniteGroup>, els: &[usize]) -> Result<Subgroup, CliError> {
    group.subgroup(els).map_err(|e| CliError::Usage(format!("--subgroup: {e}")))
}

fn parent_group(name: &str) -> Result<Arc<FiniteGroup>, CliError> {
    match name {
        "c2" => Ok(Arc::new(FiniteGroup::cyclic(2))),
        "c3" => Ok(Arc::new(FiniteGroup::cyclic(3))),
        "s3" => Ok(Arc::new(FiniteGroup::symmetric(3))),
        path => Ok(group_from_json(&read_kind(Path::new(path), "group")?)?),
    }
}

fn kind_arg(s: &str) -> Result<ExampleKind, CliError> {
    ExampleKind::parse(s).ok_or_else(|| CliError::Usage(format!("unknown kind {s:?}; expected finite, discrete, principal or principal_dual")))
}

fn summand_label(k: SummandKind) -> String {
    match k {
        SummandKind::Rational => "rational".into(),
        SummandKind::Linear(g) => format!("inclusion ({g:?})"),
        SummandKind::Trace(g) => format!("trace ({g:?})"),
    }
}

fn summand_table(w: &SpeciesRep) -> String {
    let l = w.layout();
    let q = &w.quiver;
    let mut s = String::new();
    for (k, m) in w.maps.iter().enumerate() {
        let e = l.summands[k].rep;
        let state = if m.is_zero() { "zero" } else { "nonzero" };
        s += &format!(
            "{}: {} -> {} {}, {state}\n",
            q.edge_names[e],
            q.vertex_names[q.src[e]],
            q.vertex_names[q.tgt[e]],
            summand_label(w.kind(k))
        );
    }
    s
}

fn quiver_cmd(op: QuiverOp, r: &mut CliReport) -> Result<(), CliError> {
    match op {
        QuiverOp::Fixture { name } => {
            let q = match name.as_str() {
                "gelfand" => fixtures::gelfand(),
                "cyclic" => fixtures::cyclic(),
                "two-loop" => fixtures::two_loop(),
                other => return Err(CliError::Usage(format!("unknown fixture {other:?}; expected gelfand, cyclic or two-loop"))),
            };
            r.extend("quiver", q.validate());
            r.document("quiver", wrap("quiver", quiver_to_json(&q)));
        }
        QuiverOp::Validate(i) => {
            let q = read_quiver(&i.input)?;
            r.extend("quiver", q.validate());
        }
        QuiverOp::BaseChange { input, sub } => {
            let q = read_quiver(&input.input)?;
            let h = subgroup(&q.group, &sub.subgroup)?;
            let b = q.base_change(&h).map_err(failed)?;
            r.extend("base change", b.validate());
            r.document("quiver", wrap("quiver", quiver_to_json(&b)));
        }
        QuiverOp::Restrict { input, parent, sub } => {
            let q = read_quiver(&input.input)?;
            let g = parent_group(&parent.parent)?;
            let h = subgroup(&g, &sub.subgroup)?;
            if *q.group != h.as_group() {
                return Err(CliError::Usage("the quiver's group is not the given subgroup".into()));
            }
            let res = q.restrict(&h).map_err(failed)?;
            r.extend("restriction", res.quiver.validate());
            r.document("quiver", wrap("quiver", quiver_to_json(&res.quiver)));
        }
        QuiverOp::Homs { input, to, mode } => {
            let a = read_quiver(&input.input)?;
            let b = read_quiver(&to)?;
            let mode = match mode.as_str() {
                "raw" => RelationMode::Raw,
                "with-relations" => RelationMode::WithRelations,
                other => return Err(CliError::Usage(format!("unknown mode {other:?}; expected raw or with-relations"))),
            };
            let homs = quiver_homs(&a, &b, mode).map_err(failed)?;
            let bad = homs.iter().filter(|f| !a.is_morphism(&b, f, mode)).count();
            r.check("every listed map is a morphism", bad == 0, format!("{} morphisms ({})", homs.len(), mode.label()));
            let list: Vec<Value> = homs.iter().map(|f| json!({ "vertices": f.vertex_map, "edges": f.edge_map })).collect();
            r.json("morphisms", json!({ "count": homs.len(), "morphisms": list }));
        }
    }
    Ok(())
}

fn species_cmd(op: SpeciesOp, r: &mut CliReport) -> Result<(), CliError> {
    match op {
        SpeciesOp::FromQuiver(i) => {
            let s = species_of_quiver(&read_quiver(&i.input)?);
            r.extend("species", s.validate());
            r.document("species", wrap("species", species_to_json(&s)));
        }
        SpeciesOp::ToQuiver(i) => {
            let q = quiver_of_species(&read_species(&i.input)?);
            r.extend("quiver", q.validate());
            r.document("quiver", wrap("quiver", quiver_to_json(&q)));
        }
        SpeciesOp::Roundtrip(i) => {
            let doc = read_doc(&i.input)?;
            match kind_of(&doc)? {
                "quiver" => {
                    let q = quiver_from_json(&doc)?;
                    let (q2, f) = roundtrip_quiver(&q).map_err(failed)?;
                    let ok = q.is_morphism(&q2, &f, RelationMode::Raw) && q2.is_morphism(&q, &inverse_morphism(&f), RelationMode::Raw);
                    r.check("quiver round trip witness is an isomorphism", ok, "");
                    r.json("witness", json!({ "vertices": f.vertex_map, "edges": f.edge_map }));
                }
                "species" => {
                    let s = species_from_json(&doc)?;
                    let (s2, iso) = roundtrip_species(&s).map_err(failed)?;
                    r.check("species round trip witness verifies", verify_species_iso(&s, &s2, &iso), "");
                    r.json(
                        "witness",
                        json!({ "indices": iso.index_map, "field_elements": iso.field_elements, "summands": iso.summand_map }),
                    );
                }
                other => return Err(CliError::Usage(format!("roundtrip takes a quiver or species document, got {other:?}"))),
            }
        }
        SpeciesOp::BaseChange { input, sub } => {
            let s = read_species(&input.input)?;
            let h = subgroup(&s.group, &sub.subgroup)?;
            let b = species_base_change(&s, &h).map_err(failed)?;
            r.extend("base change", b.validate());
            r.document("species", wrap("species", species_to_json(&b)));
        }
        SpeciesOp::Restrict { input, parent, sub } => {
            let s = read_species(&input.input)?;
            let g = parent_group(&parent.parent)?;
            let h = subgroup(&g, &sub.subgroup)?;
            let b = species_restrict(&s, &h).map_err(|e| CliError::Usage(e.to_string()))?;
            r.extend("restriction", b.validate());
            r.document("species", wrap("species", species_to_json(&b)));
        }
    }
    Ok(())
}

fn inverse_morphism(f: &ratquiver::quiver::QuiverMorphism) -> ratquiver::quiver::QuiverMorphism {
    let invert = |m: &[usize]| {
        let mut out = vec![0; m.len()];
        for (i, &j) in m.iter().enumerate() {
            out[j] = i;
        }
        out
    };
    ratquiver::quiver::QuiverMorphism { vertex_map: invert(&f.vertex_map), edge_map: invert(&f.edge_map) }
}

fn matrix_list(ms: &[QuadMatrix]) -> Value {
    Value::Array(ms.iter().map(ratquiver::exact_algebra::json::matrix_to_json).collect())
}

fn rep_cmd(op: RepOp, r: &mut CliReport) -> Result<(), CliError> {
    match op {
        RepOp::Validate(i) => {
            let v = read_rep(&i.input)?;
            r.extend("rep", validate_rep(&v));
            r.check("nilpotent", v.is_nilpotent(), format!("{:?}", v.vanishing_length()));
        }
        RepOp::Hom { input, to } => {
            let a = read_rep(&input.input)?;
            let b = read_rep(&to)?;
            let h = hom_space(&a, &b).map_err(failed)?;
            let bad = h.basis.iter().filter(|f| !ratquiver::representations::is_morphism(&a, &b, f)).count();
            r.check("basis elements are morphisms", bad == 0, format!("dim over K {}, dim over L {}", h.dim_k(), h.dim_l));
            r.check("dimension descends", h.dim_k() == h.dim_l, "");
            let basis: Vec<Value> = h.basis.iter().map(|f| matrix_list(f)).collect();
            r.json("hom", json!({ "dim_k": h.dim_k(), "dim_l": h.dim_l, "basis": basis }));
        }
        RepOp::ToSpecies(i) => {
            let v = read_rep(&i.input)?;
            let w = functor_f(&v).map_err(failed)?;
            r.extend("species rep", validate_species_rep(&w));
            r.check("H F witness", check_hf(&v).map_err(failed)?, "");
            r.text("summands", summand_table(&w));
            r.document("species_rep", wrap("species_rep", species_rep_to_json(&w)));
        }
        RepOp::FromSpecies(i) => {
            let w = species_rep_from_json(&read_kind(&i.input, "species_rep")?)?;
            let v = functor_h(&w).map_err(failed)?;
            r.extend("rep", validate_rep(&v));
            r.check("F H witness", check_fh(&w).map_err(failed)?, "");
            r.document("rep", wrap("rep", rep_to_json(&v)));
        }
        RepOp::Isomorphic { input, to } => {
            let a = read_rep(&input.input)?;
            let b = read_rep(&to)?;
            match rep_isomorphic(&a, &b).map_err(failed)? {
                Some(w) => {
                    r.check("isomorphic", is_isomorphism(&a, &b, &w), "witness verified");
                    r.json("witness", matrix_list(&w));
                }
                None => r.check("isomorphic", false, "no isomorphism"),
            }
        }
        RepOp::BaseChange { input, sub } => {
            let v = read_rep(&input.input)?;
            let h = subgroup(&v.quiver.group, &sub.subgroup)?;
            let b = rep_base_change(&v, &h).map_err(failed)?;
            r.extend("rep", validate_rep(&b));
            r.document("rep", wrap("rep", rep_to_json(&b)));
        }
    }
    Ok(())
}

fn unipotent_cmd(op: UnipotentOp, r: &mut CliReport) -> Result<(), CliError> {
    use ratquiver::exact_algebra::json::matrix_to_json;
    match op {
        UnipotentOp::Sqrt { input, trace } => {
            let phi = matrix_from_doc(&read_doc(&input.input)?)?;
            let t = unipotent_sqrt_traced(&phi).map_err(failed)?;
            r.check("root squares back", &t.root * &t.root == phi, format!("{} iterations", t.iterations));
            if trace {
                r.json("defect exponents", json!(t.defect_exponents));
            }
            r.document("root", matrix_doc(&t.root));
        }
        UnipotentOp::Stabilize { input, trace } => {
            let p = stabilization_from_json(&read_kind(&input.input, "stabilization")?)?;
            let s = stabilize(&p).map_err(failed)?;
            let tm = s.minus.galois(p.tau);
            let tp = s.plus.galois(p.tau);
            r.check(
                "limits are conjugate inverses",
                (&tm * &s.plus).is_identity() && (&tp * &s.minus).is_identity(),
                format!("{} iterations", s.iterations),
            );
            let halving = s.defect_exponents.windows(2).all(|w| w[1] <= w[0].div_ceil(2));
            r.check("defect exponents halve", halving, format!("{:?}", s.defect_exponents));
            if trace {
                let its: Vec<Value> = s
                    .iterates
                    .iter()
                    .zip(&s.defect_exponents)
                    .map(|(it, e)| json!({ "plus": matrix_to_json(&it.plus), "minus": matrix_to_json(&it.minus), "defect_exponent": e }))
                    .collect();
                r.json("iterates", Value::Array(its));
            }
            let fixed = ratquiver::unipotent::StabilizationProblem { plus: s.plus, minus: s.minus, tau: p.tau };
            r.document("limit", wrap("stabilization", stabilization_to_json(&fixed)));
        }
    }
    Ok(())
}

/// Comparison diagram, species summands and round trip of one module.
fn comparison_report(m: &HCModule, prefix: &str, r: &mut CliReport) -> Result<QuiverRep, CliError> {
    let cmp = functor_e(m).map_err(failed)?;
    r.extend(&format!("{prefix}comparison"), cmp.report);
    r.text(format!("{prefix}diagram"), render_diagram(&cmp.rep));
    let w = functor_f(&cmp.rep).map_err(failed)?;
    r.text(format!("{prefix}species summands"), summand_table(&w));
    Ok(cmp.rep)
}

fn hc_cmd(op: HcOp, r: &mut CliReport) -> Result<(), CliError> {
    match op {
        HcOp::Build { kind, ell, epsilon, window } => {
            let kind = kind_arg(&kind)?;
            let eps = epsilon.unwrap_or((ell + 1) % 2);
            let m = match window {
                Some(n) => build_example_window(kind, ell, eps, n),
                None => build_example(kind, ell, eps),
            }
            .map_err(|e| CliError::Usage(e.to_string()))?;
            r.extend("module", validate_hc(&m));
            r.document("module", wrap("hc_module", hc_to_json(&m)));
        }
        HcOp::Validate(i) => {
            let m = read_hc(&i.input)?;
            r.extend("module", validate_hc(&m));
        }
        HcOp::ToQuiver(i) => {
            let m = read_hc(&i.input)?;
            let v = comparison_report(&m, "", r)?;
            r.document("rep", wrap("rep", rep_to_json(&v)));
        }
        HcOp::FromQuiver { input, ell } => {
            let v = read_rep(&input.input)?;
            let m = inverse_e(&v, ell).map_err(failed)?;
            r.extend("module", validate_hc(&m));
            r.document("module", wrap("hc_module", hc_to_json(&m)));
        }
        HcOp::Roundtrip { input, ell } => {
            let v = read_rep(&input.input)?;
            let rt = roundtrip_hc(&v, ell).map_err(failed)?;
            r.extend("module", validate_hc(&rt.module));
            r.check("witness is an isomorphism", is_isomorphism(&v, &rt.image, &rt.witness), format!("{:?} path", rt.path));
            r.json("witness", matrix_list(&rt.witness));
            r.document("image", wrap("rep", rep_to_json(&rt.image)));
        }
        HcOp::Casimir { input, weight } => {
            let m = read_hc(&input.input)?;
            let weights = match weight {
                Some(w) if m.index(w).is_none() => return Err(CliError::Usage(format!("weight {w} is not in the window"))),
                Some(w) => vec![w],
                None => m.weights(),
            };
            let f = &m.field;
            let shift = f.int((m.ell * m.ell) as i64);
            let mut out = serde_json::Map::new();
            let mut bad = Vec::new();
            for w in weights {
                let c = casimir_matrix(&m, w).map_err(failed)?;
                let n = &c - &QuadMatrix::scalar(f, c.rows(), &shift);
                if n.nilpotency_exponent().is_none() {
                    bad.push(w);
                }
                out.insert(w.to_string(), ratquiver::exact_algebra::json::matrix_to_json(&c));
            }
            r.check("Casimir minus l^2 is nilpotent", bad.is_empty(), if bad.is_empty() { String::new() } else { format!("fails at weights {bad:?}") });
            r.json("casimir", Value::Object(out));
        }
    }
    Ok(())
}

fn run_example(kind: ExampleKind, ell: usize, r: &mut CliReport) -> Result<(), CliError> {
    let prefix = format!("{} l={ell}: ", kind.label());
    let m = build_example(kind, ell, (ell + 1) % 2).map_err(|e| CliError::Usage(e.to_string()))?;
    r.extend(&format!("{prefix}module"), validate_hc(&m));
    let v = comparison_report(&m, &prefix, r)?;
    r.check(format!("{prefix}H F witness"), check_hf(&v).map_err(failed)?, "");
    let rt = roundtrip_hc(&v, ell).map_err(failed)?;
    r.check(format!("{prefix}round trip"), is_isomorphism(&v, &rt.image, &rt.witness), format!("{:?} path", rt.path));
    Ok(())
}

fn example_pairs() -> Vec<(ExampleKind, usize)> {
    let mut out = Vec::new();
    for ell in 0..=3 {
        for kind in ExampleKind::ALL {
            if build_example(kind, ell, (ell + 1) % 2).is_ok() {
                out.push((kind, ell));
            }
        }
    }
    out
}

const SWEEPS: [(&str, usize); 9] = [
    ("quiver-c2", 100),
    ("quiver-c3", 10),
    ("quiver-s3", 10),
    ("functors", 100),
    ("hom-descent", 100),
    ("stabilize", 200),
    ("sqrt", 200),
    ("surjectivity-gelfand", 50),
    ("surjectivity-cyclic", 50),
];

fn run_sweep(name: &str, seed: u64, cases: usize, parallel: bool) -> SweepSummary {
    match name {
        "quiver-c2" => sweeps::quiver_roundtrip_sweep(fixtures::c2(), seed, cases, parallel),
        "quiver-c3" => sweeps::quiver_roundtrip_sweep(Arc::new(FiniteGroup::cyclic(3)), seed, cases, parallel),
        "quiver-s3" => sweeps::quiver_roundtrip_sweep(Arc::new(FiniteGroup::symmetric(3)), seed, cases, parallel),
        "functors" => sweeps::functor_witness_sweep(seed, cases, parallel),
        "hom-descent" => sweeps::hom_descent_sweep(seed, cases, parallel),
        "stabilize" => sweeps::stabilize_sweep(seed, cases, parallel),
        "sqrt" => sweeps::sqrt_sweep(seed, cases, parallel),
        "surjectivity-gelfand" => sweeps::essential_surjectivity_sweep(seed, cases, false, parallel),
        "surjectivity-cyclic" => sweeps::essential_surjectivity_sweep(seed, cases, true, parallel),
        _ => unreachable!("checked by the caller"),
    }
}

fn examples_cmd(op: ExamplesOp, ctx: &Ctx, r: &mut CliReport) -> Result<(), CliError> {
    match op {
        ExamplesOp::Run { all, kind, ell } => {
            let pairs = match (all, kind) {
                (true, None) if ell.is_none() => {
                    for q in sweeps::fixture_quivers() {
                        let (q2, f) = roundtrip_quiver(&q).map_err(failed)?;
                        let s = species_of_quiver(&q);
                        let (s2, iso) = roundtrip_species(&s).map_err(failed)?;
                        let ok = q.is_morphism(&q2, &f, RelationMode::Raw) && verify_species_iso(&s, &s2, &iso);
                        r.check(format!("{} quiver: anti-equivalence round trips", q.vertex_names.join("")), ok, "");
                    }
                    example_pairs()
                }
                (false, Some(k)) => vec![(kind_arg(&k)?, ell.unwrap_or(1))],
                _ => return Err(CliError::Usage("examples run takes either --all or --kind [--ell]".into())),
            };
            for (kind, ell) in pairs {
                run_example(kind, ell, r)?;
            }
        }
        ExamplesOp::Sweep { only } => {
            let names: Vec<(&str, usize)> = match &only {
                None => SWEEPS.to_vec(),
                Some(n) => vec![SWEEPS.iter().copied().find(|(s, _)| s == n).ok_or_else(|| {
                    CliError::Usage(format!("unknown suite {n:?}; expected one of {}", SWEEPS.map(|s| s.0).join(", ")))
                })?],
            };
            let mut summaries = Vec::new();
            for (name, default_cases) in names {
                let s = run_sweep(name, ctx.seed, ctx.cases.unwrap_or(default_cases), ctx.parallel);
                let detail = match s.failures.first() {
                    None => format!("{}/{} cases", s.cases, s.cases),
                    Some(f) => format!("{}/{} cases; case {}: {}", s.cases - s.failures.len(), s.cases, f.index, f.detail),
                };
                r.check(name, s.ok(), detail);
                summaries.push(serde_json::to_value(&s).expect("serializable"));
            }
            r.json("suites", Value::Array(summaries));
        }
    }
    Ok(())
}

/// Parses `argv` (without the program name) and runs the subcommand.
pub fn execute(argv: &[String]) -> Result<(CliReport, bool), CliError> {
    let cli = Cli::try_parse_from(std::iter::once("ratquiver".to_string()).chain(argv.iter().cloned())).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => CliError::Usage(e.to_string()),
        _ => CliError::Usage(e.to_string().trim_end().to_string()),
    })?;
    if cli.parallel && !sweeps::parallel_available() {
        return Err(CliError::Usage("--parallel needs a build with the `parallel` feature".into()));
    }
    let ctx = Ctx { seed: cli.seed, cases: cli.cases, parallel: cli.parallel };
    let mut r = CliReport::new(std::iter::once("ratquiver").chain(argv.iter().map(String::as_str)).collect::<Vec<_>>().join(" "));
    match cli.cmd {
        Cmd::Quiver { op } => quiver_cmd(op, &mut r)?,
        Cmd::Species { op } => species_cmd(op, &mut r)?,
        Cmd::Rep { op } => rep_cmd(op, &mut r)?,
        Cmd::Unipotent { op } => unipotent_cmd(op, &mut r)?,
        Cmd::Hc { op } => hc_cmd(op, &mut r)?,
        Cmd::Examples { op } => examples_cmd(op, &ctx, &mut r)?,
    }
    if let Some(path) = &cli.out {
        let doc = r.document.as_ref().ok_or_else(|| CliError::Usage("--out given but this subcommand emits no document".into()))?;
        let text = doc.to_string() + "\n";
        std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok((r, cli.json))
}

/// Runs the CLI, writing the report to `out` and diagnostics to `err`. Returns the exit
/// status: 0 iff every check passed.
pub fn run(argv: &[String], out: &mut impl std::io::Write, err: &mut impl std::io::Write) -> i32 {
    match execute(argv) {
        Ok((r, json)) => {
            let text = if json { r.to_json().to_string() + "\n" } else { r.to_text() };
            if out.write_all(text.as_bytes()).is_err() {
                return 4;
            }
            if r.ok() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.exit_code()
        }
    }
}
