use std::path::PathBuf;
use std::process::Command;

use qlogic::cli::{run, Output};
use qlogic::core::cloning::{is_cloning_transformation, CloneContext, CloneProblem};
use qlogic::core::compat::Budget;
use qlogic::core::morphisms::Automorphism;
use qlogic::core::rational;
use qlogic::core::state::{State, StateConfig};
use qlogic::fixtures::Catalog;
use qlogic::format::{self, parse_rationals, LogicRef, StateFile};
use serde_json::Value;

fn fixture(name: &str) -> String {
    Catalog::bundled()
        .unwrap()
        .path(name)
        .unwrap()
        .to_str()
        .unwrap()
        .to_string()
}

fn ambient(name: &str) -> String {
    Catalog::bundled()
        .unwrap()
        .dir()
        .join(name)
        .to_str()
        .unwrap()
        .to_string()
}

fn json(args: &[&str]) -> (i32, Value) {
    let out: Output = run(["qlogic", "--format", "json"]
        .iter()
        .copied()
        .chain(args.iter().copied()));
    let doc = serde_json::from_str(&out.stdout)
        .unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", out.stdout));
    (out.code, doc)
}

fn labels(v: &Value) -> Vec<&str> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap())
        .collect()
}

#[test]
fn validate_rejects_o6_with_a_witness() {
    let (code, doc) = json(&["validate", &fixture("O6")]);
    assert_eq!(code, 1);
    assert_eq!(doc["axiom"], "E");
    assert_eq!(doc["witness"].as_array().unwrap().len(), 2);
    let (code, doc) = json(&["validate", &fixture("MO2")]);
    assert_eq!(code, 0);
    assert_eq!(labels(&doc["atoms"]), ["a", "a'", "b", "b'"]);
}

#[test]
fn condition_g_fails_on_mo2() {
    let (code, doc) = json(&["check", "G", &fixture("MO2")]);
    assert_eq!(code, 1);
    assert_eq!(doc["given"], "a");
    assert_ne!(doc["first"], doc["second"]);
    // Both witnesses are states of MO2 with value 1 on a.
    let l = Catalog::bundled().unwrap().load_logic("MO2").unwrap();
    let a = l.element("a").unwrap();
    for key in ["first", "second"] {
        let values: Vec<String> = labels(&doc[key]).iter().map(|s| s.to_string()).collect();
        let s = State::new(&l, parse_rationals(&values).unwrap()).unwrap();
        assert!(*s.value(a) == rational::one());
    }
    for name in ["boolean1", "boolean2", "boolean3", "boolean4"] {
        assert_eq!(json(&["check", "G", &fixture(name)]).0, 0, "{name}");
    }
}

#[test]
fn states_round_trip_through_the_library() {
    let l = Catalog::bundled().unwrap().load_logic("MO2").unwrap();
    let (code, doc) = json(&["states", &fixture("MO2")]);
    assert_eq!(code, 0);
    assert_eq!(labels(&doc["labels"]), l.labels());
    let vertices = doc["vertices"].as_array().unwrap();
    // The state space of MO2 is a square: one choice per block.
    assert_eq!(vertices.len(), 4);
    for v in vertices {
        let values: Vec<String> = labels(v).iter().map(|s| s.to_string()).collect();
        State::new(&l, parse_rationals(&values).unwrap()).unwrap();
    }
    let (code, basis) = json(&["states", "--method", "basis", &fixture("MO2")]);
    assert_eq!(code, 0);
    assert_eq!(basis["vertices"], doc["vertices"]);
}

#[test]
fn clone_search_output_reverifies() {
    let (code, doc) = json(&[
        "clone-search",
        "--composite",
        &fixture("prod22"),
        "--C",
        "e1,e2",
        "--f",
        "e1",
    ]);
    assert_eq!(code, 0);
    for row in doc["pairwise"].as_array().unwrap() {
        for x in labels(row) {
            assert!(x == "0/1" || x == "1/1");
        }
    }
    let map: Vec<usize> = doc["cloner"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_u64().unwrap() as usize)
        .collect();
    let c = Catalog::bundled()
        .unwrap()
        .load_composite("prod22")
        .unwrap();
    let mut budget = Budget::new(1_000_000);
    let ctx = CloneContext::new(c, &StateConfig::default(), &mut budget).unwrap();
    let t = Automorphism::new(ctx.composite().ambient(), &map).unwrap();
    let fl = ctx.composite().factor();
    let atoms = [fl.element("e1").unwrap(), fl.element("e2").unwrap()];
    let problem = CloneProblem::new(&ctx, &atoms, atoms[0]).unwrap();
    let verdict = is_cloning_transformation(&ctx, &problem, &t).unwrap();
    assert!(verdict.definition && verdict.grid);
}

#[test]
fn input_errors_and_budget() {
    let (code, doc) = json(&["compat", &fixture("MO2"), "a,q"]);
    assert_eq!((code, doc["status"].as_str()), (2, Some("input-error")));
    assert_eq!(json(&["atoms", "/nonexistent/logic.json"]).0, 2);
    assert_eq!(run(["qlogic", "check", "K", &fixture("MO2")]).code, 2);
    let (code, doc) = json(&["--budget", "10", "autos", &ambient("prod33_ambient.json")]);
    assert_eq!((code, doc["status"].as_str()), (3, Some("budget-exceeded")));
}

#[test]
fn compat_verdicts() {
    assert_eq!(json(&["compat", &fixture("MO2"), "a,b"]).0, 1);
    assert_eq!(json(&["compat", &fixture("MO2"), "a,a'"]).0, 0);
    assert_eq!(json(&["compat", &fixture("boolean3"), "x,y,z"]).0, 0);
}

#[test]
fn hilbert_examples() {
    let (code, doc) = json(&[
        "hilbert", "trace", "--a", "mixed:2", "--e", "diag:1,1", "--f", "span:1,1",
    ]);
    assert_eq!(code, 0);
    assert!((doc["value"].as_f64().unwrap() - 0.5).abs() < 1e-12);

    let (code, doc) = json(&[
        "hilbert",
        "transition",
        "--e",
        "diag:1,1,0",
        "--f",
        "span:1,1,0",
    ]);
    assert_eq!((code, &doc["value"]), (1, &Value::Null));

    let (code, doc) = json(&["hilbert", "atom", "--xi", "1,0", "--f", "span:1,1"]);
    assert_eq!(code, 0);
    assert!((doc["value"].as_f64().unwrap() - 0.5).abs() < 1e-12);

    let (code, doc) = json(&[
        "hilbert",
        "cloner",
        "--unitary",
        "perm:0,1,3,2",
        "--C",
        "1,0;0,1",
        "--f",
        "1,0",
    ]);
    assert_eq!((code, &doc["cloner"]), (0, &Value::Bool(true)));

    let (code, doc) = json(&["hilbert", "no-cloning", "--xi1", "1,0", "--xi2", "1,1"]);
    assert_eq!((code, &doc["cloneable"]), (1, &Value::Bool(false)));
    let s = doc["s"].as_f64().unwrap();
    assert!((s - 0.5).abs() < 1e-9 && (doc["s_squared"].as_f64().unwrap() - 0.25).abs() < 1e-9);

    let (code, doc) = json(&[
        "hilbert", "trace", "--a", "diag:1,0", "--e", "diag:0,1", "--f", "id:2",
    ]);
    assert_eq!(code, 2, "{doc}");
}

#[test]
fn condprob_on_a_state_file() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("rho.json");
    // Uniform state on 2^2 with labels 0, x, y, 1.
    let file = StateFile {
        logic: LogicRef::Path(PathBuf::from(fixture("boolean2"))),
        values: ["0", "1/2", "1/2", "1"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    };
    format::write_json(&path, &file).unwrap();
    let (code, doc) = json(&["condprob", path.to_str().unwrap(), "--given", "x"]);
    assert_eq!(code, 0, "{doc}");
    let l = Catalog::bundled().unwrap().load_logic("boolean2").unwrap();
    // Classical conditioning on x puts all mass on x.
    let values: Vec<String> = labels(&doc["conditional"])
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rho = State::new(&l, parse_rationals(&values).unwrap()).unwrap();
    assert!(*rho.value(l.element("x").unwrap()) == rational::one());
    assert!(*rho.value(l.element("y").unwrap()) == rational::zero());

    let (code, _) = json(&["condprob", path.to_str().unwrap(), "--given", "0"]);
    assert_eq!(code, 2);
}

#[test]
fn product_file_feeds_the_composite_checks() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("p.json");
    let (code, _) = json(&[
        "product",
        &fixture("boolean2"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let out = out.to_str().unwrap();
    assert_eq!(json(&["check-I", out]).0, 0);
    assert_eq!(json(&["check-J", out]).0, 0);
    let c = format::read_composite(tmp.path().join("p.json").as_path()).unwrap();
    assert_eq!(c.ambient().len(), 16);
}

#[test]
fn binary_output_is_byte_identical() {
    let bin = env!("CARGO_BIN_EXE_qlogic");
    let cases: [Vec<String>; 3] = [
        vec!["states".into(), fixture("MO3")],
        vec![
            "clone-search".into(),
            "--composite".into(),
            fixture("prod22"),
            "--C".into(),
            "e1".into(),
            "--f".into(),
            "e2".into(),
        ],
        vec![
            "--seed".into(),
            "3".into(),
            "hilbert".into(),
            "sweep".into(),
            "--instances".into(),
            "50".into(),
        ],
    ];
    for args in cases {
        let go = || {
            Command::new(bin)
                .args(["--format", "json"])
                .args(&args)
                .output()
                .unwrap()
        };
        let (a, b) = (go(), go());
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        serde_json::from_slice::<Value>(&a.stdout).unwrap();
    }
    let human = Command::new(bin)
        .args(["validate", &fixture("boolean3")])
        .output()
        .unwrap();
    assert_eq!(human.status.code(), Some(0));
    assert!(String::from_utf8(human.stdout)
        .unwrap()
        .contains("atoms: x y z"));
}
