//! Versioned interchange documents. Every top-level document carries `"version"` and
//! `"kind"`; bodies nest without either. Unknown versions are rejected.

use std::collections::BTreeMap;
use std::sync::Arc;

use ratquiver::exact_algebra::json::{field_from_json, field_to_json, matrix_from_json, matrix_to_json};
use ratquiver::exact_algebra::{Galois, QuadField, QuadMatrix, SemilinearMap};
use ratquiver::gsets::{FiniteGroup, GSet, GSetJson, GroupJson, Subgroup};
use ratquiver::harish_chandra::{HCModule, TailSide, Tails};
use ratquiver::quiver::RationalQuiver;
use ratquiver::representations::{galois_of, QuiverRep, SpeciesRep};
use ratquiver::species::{Bimodule, EtaleSpecies, Realization, Summand};
use ratquiver::unipotent::StabilizationProblem;
use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("unsupported schema version {0} (this build reads version {SCHEMA_VERSION})")]
    Version(String),
    #[error("expected a {expected:?} document, got {got:?}")]
    Kind { expected: String, got: String },
    #[error("{0}")]
    Invalid(String),
}

fn invalid(e: impl std::fmt::Display) -> ParseError {
    ParseError::Invalid(e.to_string())
}

pub fn parse_text(text: &str) -> Result<Value, ParseError> {
    serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))
}

/// Adds the version and kind header to a body object.
pub fn wrap(kind: &str, body: Value) -> Value {
    let mut out = Map::new();
    out.insert("version".into(), json!(SCHEMA_VERSION));
    out.insert("kind".into(), json!(kind));
    if let Value::Object(m) = body {
        out.extend(m);
    }
    Value::Object(out)
}

/// Checks the header and returns the document kind.
pub fn kind_of(doc: &Value) -> Result<&str, ParseError> {
    match doc.get("version") {
        Some(v) if v.as_u64() == Some(SCHEMA_VERSION) => {}
        Some(v) => return Err(ParseError::Version(v.to_string())),
        None => return Err(ParseError::Version("missing".into())),
    }
    doc.get("kind").and_then(Value::as_str).ok_or_else(|| invalid("document has no \"kind\""))
}

pub fn expect_kind<'a>(doc: &'a Value, kind: &str) -> Result<&'a Value, ParseError> {
    let got = kind_of(doc)?;
    if got != kind {
        return Err(ParseError::Kind { expected: kind.into(), got: got.into() });
    }
    Ok(doc)
}

fn get<'a>(v: &'a Value, key: &str) -> Result<&'a Value, ParseError> {
    v.get(key).ok_or_else(|| invalid(format!("missing key {key:?}")))
}

fn usize_of(v: &Value, key: &str) -> Result<usize, ParseError> {
    get(v, key)?.as_u64().map(|x| x as usize).ok_or_else(|| invalid(format!("{key:?} must be a non-negative integer")))
}

fn from_value<T: serde::de::DeserializeOwned>(v: &Value, what: &str) -> Result<T, ParseError> {
    serde_json::from_value(v.clone()).map_err(|e| invalid(format!("{what}: {e}")))
}

fn matrices(k: &QuadField, v: &Value, what: &str) -> Result<Vec<QuadMatrix>, ParseError> {
    v.as_array()
        .ok_or_else(|| invalid(format!("{what} must be an array")))?
        .iter()
        .map(|m| matrix_from_json(k, m).map_err(invalid))
        .collect()
}

fn matrix_list(ms: &[QuadMatrix]) -> Value {
    Value::Array(ms.iter().map(matrix_to_json).collect())
}

pub fn group_to_json(g: &FiniteGroup) -> Value {
    serde_json::to_value(GroupJson::from_group(g)).expect("serializable")
}

pub fn group_from_json(v: &Value) -> Result<Arc<FiniteGroup>, ParseError> {
    let g: GroupJson = from_value(v, "group")?;
    Ok(Arc::new(g.to_group().map_err(invalid)?))
}

pub fn quiver_to_json(q: &RationalQuiver) -> Value {
    json!({
        "group": group_to_json(&q.group),
        "vertices": q.vertex_count(),
        "edges": q.edge_count(),
        "src": q.src,
        "tgt": q.tgt,
        "action": {
            "vertices": q.vertices.generator_perms(),
            "edges": q.edges.generator_perms(),
        },
        "relations": q.relations,
        "vertex_names": q.vertex_names,
        "edge_names": q.edge_names,
    })
}

pub fn quiver_from_json(v: &Value) -> Result<RationalQuiver, ParseError> {
    let group = group_from_json(get(v, "group")?)?;
    let action = get(v, "action")?;
    let gset = |key: &str| -> Result<GSet, ParseError> {
        let perms: Vec<Vec<usize>> = from_value(get(action, key)?, "action")?;
        GSetJson { size: usize_of(v, key)?, action: perms }.to_gset(&group).map_err(invalid)
    };
    let vertices = gset("vertices")?;
    let edges = gset("edges")?;
    let src = from_value(get(v, "src")?, "src")?;
    let tgt = from_value(get(v, "tgt")?, "tgt")?;
    let relations = from_value(get(v, "relations")?, "relations")?;
    let mut q = RationalQuiver::new(vertices, edges, src, tgt, relations).map_err(invalid)?;
    if let Some(names) = v.get("vertex_names") {
        q.vertex_names = from_value(names, "vertex_names")?;
    }
    if let Some(names) = v.get("edge_names") {
        q.edge_names = from_value(names, "edge_names")?;
    }
    if q.vertex_names.len() != q.vertex_count() || q.edge_names.len() != q.edge_count() {
        return Err(invalid("name lists do not match the vertex and edge counts"));
    }
    for (p, r) in &q.relations {
        if p.iter().chain(r).any(|&e| e >= q.edge_count()) || !q.is_composable(p) || !q.is_composable(r) {
            return Err(invalid("relation paths must be composable edge lists"));
        }
    }
    Ok(q)
}

fn subgroup_from(group: &Arc<FiniteGroup>, v: &Value) -> Result<Subgroup, ParseError> {
    let els: Vec<usize> = from_value(v, "subgroup")?;
    Subgroup::new(group.clone(), els).map_err(invalid)
}

pub fn species_to_json(s: &EtaleSpecies) -> Value {
    let fields: Vec<Value> = (0..s.index_count())
        .map(|i| {
            let realization = match s.field_realization(i) {
                Some(Realization::Base) => json!("K"),
                Some(Realization::Quadratic) => json!("L"),
                None => Value::Null,
            };
            json!({ "subgroup": s.fields[i].elements(), "realization": realization })
        })
        .collect();
    let bimodules: Vec<Value> = s
        .bimodules
        .iter()
        .map(|b| {
            let summands: Vec<Value> = b
                .summands
                .iter()
                .map(|x| json!({ "subgroup": x.subgroup.elements(), "twist_src": x.twist_src, "twist_tgt": x.twist_tgt }))
                .collect();
            json!({ "from": b.from, "to": b.to, "summands": summands })
        })
        .collect();
    json!({ "group": group_to_json(&s.group), "indices": s.index_count(), "fields": fields, "bimodules": bimodules })
}

pub fn species_from_json(v: &Value) -> Result<EtaleSpecies, ParseError> {
    let group = group_from_json(get(v, "group")?)?;
    let n = usize_of(v, "indices")?;
    let fields = get(v, "fields")?
        .as_array()
        .ok_or_else(|| invalid("fields must be an array"))?
        .iter()
        .map(|f| subgroup_from(&group, get(f, "subgroup")?))
        .collect::<Result<Vec<_>, _>>()?;
    if fields.len() != n {
        return Err(invalid("field list length differs from \"indices\""));
    }
    let mut bimodules = Vec::new();
    for b in get(v, "bimodules")?.as_array().ok_or_else(|| invalid("bimodules must be an array"))? {
        let mut summands = Vec::new();
        for x in get(b, "summands")?.as_array().ok_or_else(|| invalid("summands must be an array"))? {
            summands.push(Summand {
                subgroup: subgroup_from(&group, get(x, "subgroup")?)?,
                twist_src: usize_of(x, "twist_src")?,
                twist_tgt: usize_of(x, "twist_tgt")?,
            });
        }
        bimodules.push(Bimodule { from: usize_of(b, "from")?, to: usize_of(b, "to")?, summands });
    }
    EtaleSpecies::new(group, fields, bimodules).map_err(invalid)
}

/// `semilinear[g][v]` is stored without its twist, which the group element determines.
pub fn rep_to_json(r: &QuiverRep) -> Value {
    let semilinear: Vec<Value> = r.semilinear.iter().map(|row| Value::Array(row.iter().map(|s| matrix_to_json(&s.matrix)).collect())).collect();
    json!({
        "quiver": quiver_to_json(&r.quiver),
        "field": field_to_json(&r.field),
        "dims": r.dims,
        "edges": matrix_list(&r.edges),
        "semilinear": semilinear,
    })
}

pub fn rep_from_json(v: &Value) -> Result<QuiverRep, ParseError> {
    let quiver = quiver_from_json(get(v, "quiver")?)?;
    let field = field_from_json(get(v, "field")?).map_err(invalid)?;
    let dims = from_value(get(v, "dims")?, "dims")?;
    let edges = matrices(&field, get(v, "edges")?, "edges")?;
    let rows = get(v, "semilinear")?.as_array().ok_or_else(|| invalid("semilinear must be an array"))?;
    let mut semilinear = Vec::new();
    for (g, row) in rows.iter().enumerate() {
        if g >= quiver.group.order() {
            return Err(invalid("more semilinear rows than group elements"));
        }
        let sigma = galois_of(&quiver.group, g);
        semilinear.push(matrices(&field, row, "semilinear row")?.into_iter().map(|m| SemilinearMap::new(sigma, m)).collect());
    }
    QuiverRep::new(quiver, field, dims, semilinear, edges).map_err(invalid)
}

pub fn species_rep_to_json(w: &SpeciesRep) -> Value {
    json!({
        "quiver": quiver_to_json(&w.quiver),
        "field": field_to_json(&w.field),
        "dims": w.dims,
        "maps": matrix_list(&w.maps),
    })
}

pub fn species_rep_from_json(v: &Value) -> Result<SpeciesRep, ParseError> {
    let quiver = quiver_from_json(get(v, "quiver")?)?;
    let field = field_from_json(get(v, "field")?).map_err(invalid)?;
    let dims = from_value(get(v, "dims")?, "dims")?;
    let maps = matrices(&field, get(v, "maps")?, "maps")?;
    SpeciesRep::new(quiver, field, dims, maps).map_err(invalid)
}

pub fn matrix_doc(m: &QuadMatrix) -> Value {
    wrap("matrix", json!({ "field": field_to_json(m.field()), "matrix": matrix_to_json(m) }))
}

pub fn matrix_from_doc(doc: &Value) -> Result<QuadMatrix, ParseError> {
    let v = expect_kind(doc, "matrix")?;
    let field = field_from_json(get(v, "field")?).map_err(invalid)?;
    matrix_from_json(&field, get(v, "matrix")?).map_err(invalid)
}

fn galois_label(t: Galois) -> &'static str {
    match t {
        Galois::Id => "id",
        Galois::Conj => "conj",
    }
}

pub fn stabilization_to_json(p: &StabilizationProblem) -> Value {
    json!({
        "field": field_to_json(p.plus.field()),
        "plus": matrix_to_json(&p.plus),
        "minus": matrix_to_json(&p.minus),
        "tau": galois_label(p.tau),
    })
}

pub fn stabilization_from_json(v: &Value) -> Result<StabilizationProblem, ParseError> {
    let field = field_from_json(get(v, "field")?).map_err(invalid)?;
    let plus = matrix_from_json(&field, get(v, "plus")?).map_err(invalid)?;
    let minus = matrix_from_json(&field, get(v, "minus")?).map_err(invalid)?;
    let tau = match get(v, "tau")?.as_str() {
        Some("id") => Galois::Id,
        Some("conj") => Galois::Conj,
        _ => return Err(invalid("tau must be \"id\" or \"conj\"")),
    };
    StabilizationProblem::new(plus, minus, tau).map_err(invalid)
}

fn weight_map(entries: impl Iterator<Item = (i64, Value)>) -> Value {
    Value::Object(entries.map(|(w, v)| (w.to_string(), v)).collect())
}

fn tail_to_json(t: &TailSide) -> Value {
    json!({ "phi": matrix_to_json(&t.phi), "root": t.root.as_ref().map(matrix_to_json) })
}

/// `X` is keyed by its source weight `w` (landing in `w + 2`), `Y` by its source weight
/// `w + 2` (landing in `w`), `rational` by the source weight of `M_w -> M_{-w}`.
pub fn hc_to_json(m: &HCModule) -> Value {
    let ws = m.weights();
    let n = m.window;
    json!({
        "ell": m.ell,
        "epsilon": m.epsilon(),
        "window": n,
        "field": field_to_json(&m.field),
        "spaces": weight_map(ws.iter().zip(&m.dims).map(|(&w, &d)| (w, json!(d)))),
        "X": weight_map((0..n).map(|k| (ws[k], matrix_to_json(&m.x[k])))),
        "Y": weight_map((0..n).map(|k| (ws[k + 1], matrix_to_json(&m.y[k])))),
        "rational": weight_map(ws.iter().zip(&m.rational).map(|(&w, p)| (w, matrix_to_json(p)))),
        "tails": m.tails.as_ref().map(|t| json!({ "minus": tail_to_json(&t.minus), "plus": tail_to_json(&t.plus) })),
    })
}

fn by_weight<'a>(v: &'a Value, key: &str, weights: &[i64]) -> Result<Vec<&'a Value>, ParseError> {
    let obj = get(v, key)?.as_object().ok_or_else(|| invalid(format!("{key:?} must map weights to values")))?;
    let wanted: BTreeMap<String, ()> = weights.iter().map(|w| (w.to_string(), ())).collect();
    if let Some(extra) = obj.keys().find(|k| !wanted.contains_key(*k)) {
        return Err(invalid(format!("{key:?} has unexpected weight {extra}")));
    }
    weights.iter().map(|w| obj.get(&w.to_string()).ok_or_else(|| invalid(format!("{key:?} lacks weight {w}")))).collect()
}

fn tail_from_json(k: &QuadField, v: &Value) -> Result<TailSide, ParseError> {
    let phi = matrix_from_json(k, get(v, "phi")?).map_err(invalid)?;
    let root = match v.get("root") {
        None | Some(Value::Null) => None,
        Some(r) => Some(matrix_from_json(k, r).map_err(invalid)?),
    };
    if !phi.is_square() || root.as_ref().is_some_and(|r| r.rows() != phi.rows() || r.cols() != phi.cols()) {
        return Err(invalid("tail matrices must be square and of equal size"));
    }
    Ok(TailSide { phi, root })
}

pub fn hc_from_json(v: &Value) -> Result<HCModule, ParseError> {
    let ell = usize_of(v, "ell")?;
    let window = usize_of(v, "window")?;
    let epsilon = usize_of(v, "epsilon")?;
    if epsilon != (ell + 1) % 2 || window % 2 != epsilon {
        return Err(invalid(format!("epsilon {epsilon} and window {window} must both have the parity of ell + 1 = {}", ell + 1)));
    }
    let field = field_from_json(get(v, "field")?).map_err(invalid)?;
    let ni = window as i64;
    let ws: Vec<i64> = (0..=window).map(|k| -ni + 2 * k as i64).collect();
    let dims = by_weight(v, "spaces", &ws)?
        .into_iter()
        .map(|d| d.as_u64().map(|x| x as usize).ok_or_else(|| invalid("space dimensions must be integers")))
        .collect::<Result<Vec<_>, _>>()?;
    let parse = |key: &str, keys: &[i64]| -> Result<Vec<QuadMatrix>, ParseError> {
        by_weight(v, key, keys)?.into_iter().map(|m| matrix_from_json(&field, m).map_err(invalid)).collect()
    };
    let x = parse("X", &ws[..window])?;
    let y = parse("Y", &ws[1..])?;
    let rational = parse("rational", &ws)?;
    for k in 0..window {
        if (x[k].rows(), x[k].cols()) != (dims[k + 1], dims[k]) || (y[k].rows(), y[k].cols()) != (dims[k], dims[k + 1]) {
            return Err(invalid(format!("X or Y at weight {} has the wrong shape", ws[k])));
        }
    }
    for k in 0..=window {
        if (rational[k].rows(), rational[k].cols()) != (dims[window - k], dims[k]) {
            return Err(invalid(format!("rational structure at weight {} has the wrong shape", ws[k])));
        }
    }
    let tails = match v.get("tails") {
        None | Some(Value::Null) => None,
        Some(t) => Some(Tails { minus: tail_from_json(&field, get(t, "minus")?)?, plus: tail_from_json(&field, get(t, "plus")?)? }),
    };
    Ok(HCModule { field, ell, window, dims, x, y, rational, tails })
}
