use std::fs;

use qlogic::core::builders;
use qlogic::core::compat::Budget;
use qlogic::core::morphisms::automorphisms;
use qlogic::fixtures::{self, Catalog, Entry, Fixture, MANIFEST};
use qlogic::FormatError;

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

fn logic_entry<'a>(cat: &'a Catalog, name: &str) -> &'a fixtures::LogicAnnotations {
    match cat.entry(name).unwrap() {
        Entry::Logic { annotations, .. } => annotations,
        other => panic!("{} is not a logic", other.name()),
    }
}

#[test]
fn every_bundled_fixture_reverifies() {
    let cat = Catalog::bundled().unwrap();
    let names: Vec<String> = cat.names().map(String::from).collect();
    let expected = [
        "boolean1",
        "boolean2",
        "boolean3",
        "boolean4",
        "MO1",
        "MO2",
        "MO3",
        "O6",
        "zero_atom",
        "embed_b2_b3",
        "embed_b2_mo2",
        "embed_mo1_mo2",
        "prod22",
        "prod33",
        "hilbert_demo",
    ];
    let mut sorted = names.clone();
    sorted.sort();
    let mut want: Vec<String> = expected.iter().map(|s| s.to_string()).collect();
    want.sort();
    assert_eq!(sorted, want);
    for name in &names {
        cat.verify(name).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn generation_reproduces_the_bundled_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = fixtures::generate(tmp.path()).unwrap();
    let bundled = Catalog::bundled().unwrap();
    assert_eq!(&manifest, bundled.manifest());
    let mut files: Vec<&str> = manifest.fixtures.iter().map(Entry::file).collect();
    files.extend([
        "prod22_factor.json",
        "prod22_ambient.json",
        "prod33_factor.json",
        "prod33_ambient.json",
        MANIFEST,
    ]);
    for f in files {
        let fresh = fs::read(tmp.path().join(f)).unwrap();
        let old = fs::read(bundled.dir().join(f)).unwrap();
        assert!(fresh == old, "{f} differs");
    }
}

#[test]
fn automorphism_counts_match_closed_forms() {
    let cat = Catalog::bundled().unwrap();
    for k in 1..=4u64 {
        assert_eq!(
            logic_entry(&cat, &format!("boolean{k}")).automorphisms,
            Some(factorial(k))
        );
    }
    // MO_n: permute the n blocks and swap within each.
    for n in 1..=3u64 {
        assert_eq!(
            logic_entry(&cat, &format!("MO{n}")).automorphisms,
            Some(2u64.pow(n as u32) * factorial(n))
        );
    }
}

#[test]
fn annotated_examples() {
    let cat = Catalog::bundled().unwrap();
    let b3 = logic_entry(&cat, "boolean3");
    assert_eq!((b3.elements, b3.atoms), (8, Some(3)));
    assert_eq!(
        (b3.condition_f, b3.condition_g, b3.condition_h),
        (Some(true), Some(true), Some(true))
    );

    let mo2 = logic_entry(&cat, "MO2");
    assert_eq!((mo2.elements, mo2.atoms), (6, Some(4)));
    assert_eq!(mo2.condition_g, Some(false));

    let o6 = logic_entry(&cat, "O6");
    assert!(!o6.valid);
    assert_eq!(o6.axiom_failure.as_deref(), Some("E"));
    match cat.load("O6").unwrap() {
        Fixture::Logic { logic, description } => {
            assert!(logic.is_none());
            assert_eq!(description.labels.len(), 6);
        }
        _ => panic!("O6 is a logic fixture"),
    }
}

#[test]
fn loaded_logics_match_builders() {
    let cat = Catalog::bundled().unwrap();
    let b2 = cat.load_logic("boolean2").unwrap();
    let built = qlogic::format::LoadedLogic::from_description(&builders::boolean_n(2))
        .unwrap()
        .logic;
    assert!(b2 == built);
    let mo1 = cat.load_logic("MO1").unwrap();
    assert_eq!(
        automorphisms(&mo1, &mut Budget::new(1_000)).unwrap().len(),
        2
    );
}

#[test]
fn unknown_fixture_is_an_error() {
    assert!(
        matches!(fixtures::load_fixture("boolean9"), Err(FormatError::UnknownFixture(n)) if n == "boolean9")
    );
    let cat = Catalog::bundled().unwrap();
    assert!(cat.load_logic("prod22").is_err());
    assert!(cat.load_composite("MO2").is_err());
}

#[test]
fn tampered_manifest_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let bundled = Catalog::bundled().unwrap();
    for entry in fs::read_dir(bundled.dir()).unwrap() {
        let p = entry.unwrap().path();
        fs::copy(&p, tmp.path().join(p.file_name().unwrap())).unwrap();
    }
    let path = tmp.path().join(MANIFEST);
    let text = fs::read_to_string(&path).unwrap();
    let tampered = text.replacen("\"elements\": 8,", "\"elements\": 9,", 1);
    assert_ne!(text, tampered);
    fs::write(&path, tampered).unwrap();

    let cat = Catalog::open(tmp.path()).unwrap();
    assert!(matches!(
        cat.load("boolean3"),
        Err(FormatError::AnnotationMismatch {
            field: "elements",
            ..
        })
    ));
    assert!(cat.verify("boolean3").is_err());
    assert!(cat.load("boolean2").is_ok());
}
