use std::path::PathBuf;
use std::process::{Command, Output};

use ratquiver::exact_algebra::{QuadField, QuadMatrix};
use ratquiver::harish_chandra::{build_example, functor_e, ExampleKind};
use ratquiver_cli::interchange::*;
use ratquiver_cli::render_diagram;
use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ratquiver")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf8")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ratquiver-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn read(p: &PathBuf) -> Value {
    parse_text(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn discrete_at_zero_reports_cyclic_diagram() {
    let o = bin(&["examples", "run", "--kind", "discrete", "--ell", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("vertices:  -   |  +  "), "{s}");
    assert!(s.contains("spaces:   Q(i) | Q(i)"), "{s}");
    assert!(s.contains("rational[1]: - -> + = [1]"), "{s}");
    assert!(s.contains("Constructive path"), "{s}");
}

#[test]
fn sqrt_of_identity_is_identity() {
    let k = QuadField::gaussian();
    let p = tmp("id.json");
    std::fs::write(&p, matrix_doc(&QuadMatrix::identity(&k, 3)).to_string()).unwrap();
    let out = tmp("root.json");
    let o = bin(&["unipotent", "sqrt", "--in", p.to_str().unwrap(), "--out", out.to_str().unwrap(), "--trace"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(matrix_from_doc(&read(&out)).unwrap().is_identity());
}

#[test]
fn dual_principal_chain_reaches_trace_species() {
    let m = tmp("p11.json");
    let r = tmp("p11-rep.json");
    let w = tmp("p11-species.json");
    assert_eq!(bin(&["hc", "build", "--kind", "principal_dual", "--ell", "1", "--out", m.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(bin(&["hc", "to-quiver", "--in", m.to_str().unwrap(), "--out", r.to_str().unwrap()]).status.code(), Some(0));
    let o = bin(&["rep", "to-species", "--in", r.to_str().unwrap(), "--out", w.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("a-: - -> * trace (Id), nonzero"), "{}", stdout(&o));
    let back = tmp("p11-back.json");
    let o = bin(&["rep", "from-species", "--in", w.to_str().unwrap(), "--out", back.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let iso = bin(&["rep", "isomorphic", "--in", r.to_str().unwrap(), "--to", back.to_str().unwrap()]);
    assert_eq!(iso.status.code(), Some(0));
    let o = bin(&["hc", "roundtrip", "--in", r.to_str().unwrap(), "--ell", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn diagrams_of_fixtures() {
    let finite = functor_e(&build_example(ExampleKind::Finite, 3, 0).unwrap()).unwrap().rep;
    let d = render_diagram(&finite);
    assert!(d.contains("spaces:   0 | Q(i) | 0"), "{d}");
    assert!(d.contains("rational[1]: * -> * = ["), "{d}");
    let dual = functor_e(&build_example(ExampleKind::PrincipalDual, 1, 0).unwrap()).unwrap().rep;
    let d = render_diagram(&dual);
    assert!(d.contains("a-: - -> * = [1]") && d.contains("b-: * -> - = [0]"), "{d}");
    assert_eq!(d, render_diagram(&dual));
}

#[test]
fn reports_are_byte_identical() {
    let args = ["--json", "examples", "sweep", "--only", "stabilize", "--cases", "6"];
    let a = bin(&args);
    let b = bin(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let seq: Value = parse_text(&stdout(&a)).unwrap();
    let par: Value = parse_text(&stdout(&bin(&["--json", "--parallel", "examples", "sweep", "--only", "stabilize", "--cases", "6"]))).unwrap();
    assert_eq!(seq["checks"], par["checks"]);
    assert_eq!(seq["outputs"], par["outputs"]);
}

#[test]
fn emitted_documents_reparse() {
    let q = tmp("gelfand.json");
    let s = tmp("gelfand-species.json");
    let m = tmp("fin.json");
    let r = tmp("fin-rep.json");
    assert_eq!(bin(&["quiver", "fixture", "gelfand", "--out", q.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(bin(&["species", "from-quiver", "--in", q.to_str().unwrap(), "--out", s.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(bin(&["hc", "build", "--kind", "finite", "--ell", "2", "--out", m.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(bin(&["hc", "to-quiver", "--in", m.to_str().unwrap(), "--out", r.to_str().unwrap()]).status.code(), Some(0));
    let v = read(&q);
    assert_eq!(wrap("quiver", quiver_to_json(&quiver_from_json(&v).unwrap())), v);
    let v = read(&s);
    assert_eq!(wrap("species", species_to_json(&species_from_json(&v).unwrap())), v);
    let v = read(&m);
    assert_eq!(wrap("hc_module", hc_to_json(&hc_from_json(&v).unwrap())), v);
    let v = read(&r);
    assert_eq!(wrap("rep", rep_to_json(&rep_from_json(&v).unwrap())), v);
    for args in [vec!["species", "roundtrip", "--in", s.to_str().unwrap()], vec!["species", "roundtrip", "--in", q.to_str().unwrap()], vec!["hc", "validate", "--in", m.to_str().unwrap()], vec!["hc", "casimir", "--in", m.to_str().unwrap()]] {
        let mut full = vec!["--json"];
        full.extend(args);
        let o = bin(&full);
        assert_eq!(o.status.code(), Some(0), "{full:?}: {}", stdout(&o));
        let report = parse_text(&stdout(&o)).unwrap();
        assert_eq!(kind_of(&report).unwrap(), "report");
        assert_eq!(report["ok"], Value::Bool(true));
    }
}

#[test]
fn errors_have_distinct_exit_codes() {
    let bad = tmp("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let o = bin(&["hc", "validate", "--in", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("parse error"));
    let m = tmp("v2.json");
    let mut doc = matrix_doc(&QuadMatrix::identity(&QuadField::gaussian(), 1));
    doc["version"] = Value::from(2);
    std::fs::write(&m, doc.to_string()).unwrap();
    let o = bin(&["unipotent", "sqrt", "--in", m.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unsupported schema version 2"));
    assert_eq!(bin(&["hc", "build", "--kind", "finite"]).status.code(), Some(2));
    assert_eq!(bin(&["hc", "build", "--kind", "finite", "--ell", "0"]).status.code(), Some(2));
    assert_eq!(bin(&["examples", "run"]).status.code(), Some(2));
    assert_eq!(bin(&["hc", "validate", "--in", "/nonexistent/x.json"]).status.code(), Some(4));
}

#[test]
fn failed_checks_give_nonzero_exit() {
    let m = tmp("broken.json");
    let mut doc = wrap("hc_module", hc_to_json(&build_example(ExampleKind::Discrete, 1, 0).unwrap()));
    let x = doc["X"].as_object_mut().unwrap();
    for (_, v) in x.iter_mut() {
        for e in v["entries"].as_array_mut().unwrap() {
            *e = serde_json::json!([0, 1, 0, 1]);
        }
    }
    std::fs::write(&m, doc.to_string()).unwrap();
    let o = bin(&["hc", "validate", "--in", m.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("result: FAILED"));
}

#[test]
fn all_examples_pass() {
    let o = bin(&["examples", "run", "--all"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let s = stdout(&o);
    for kind in ["finite", "discrete", "principal", "principal_dual"] {
        assert!(s.contains(&format!("{kind} l=3: round trip")), "{kind}");
    }
}
