//! The bundled fixture catalog: logic, morphism and composite files plus a
//! manifest of expected properties.
//!
//! [`Catalog::load`] re-checks the cheap structural annotations (validity,
//! element and atom counts) on every load; [`Catalog::verify`] recomputes
//! all of them, including state-space conditions and automorphism counts.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use qlogic_core::builders;
use qlogic_core::compat::Budget;
use qlogic_core::composite::{boolean_product, CompositeLogic};
use qlogic_core::hilbert::{
    self, DensityOperator, ProjectionOperator, PureVector, DEFAULT_TOLERANCE,
};
use qlogic_core::morphisms::{automorphisms, for_each_automorphism, DEFAULT_AUTOMORPHISM_BUDGET};
use qlogic_core::state::{StateConfig, StatePolytope};
use qlogic_core::{Error, FiniteLogic, LogicDescription};
use serde::{Deserialize, Serialize};

use crate::error::{FormatError, Result};
use crate::format::{
    self, matrix_from_rows, matrix_to_rows, read_json, vector_from_pairs, vector_to_pairs,
    write_json, ComplexPairs, CompositeFile, LoadedLogic, LoadedMorphism, LogicFile, LogicRef,
    MorphismFile,
};

pub const MANIFEST: &str = "manifest.json";

/// The fixture directory shipped with the workspace.
pub fn bundled_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogicAnnotations {
    pub valid: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axiom_failure: Option<String>,
    pub elements: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition_f: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition_g: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition_h: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub automorphisms: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismAnnotations {
    pub source_elements: usize,
    pub target_elements: usize,
    pub injective: bool,
    pub automorphism: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompositeAnnotations {
    pub factor_atoms: usize,
    pub ambient_elements: usize,
    pub ambient_atoms: usize,
    pub condition_i: bool,
    pub condition_j: bool,
    pub automorphisms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HilbertAnnotations {
    /// `|⟨xi1|xi2⟩|²`.
    pub overlap: f64,
    pub cloneable: bool,
    /// `tr(a e f e) / tr(a e)`.
    pub trace_cond_prob: f64,
    /// `⟨zeta|g zeta⟩`.
    pub atom_transition: f64,
}

/// Vectors and matrices for the Hilbert-space examples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HilbertDemo {
    pub vectors: BTreeMap<String, ComplexPairs>,
    pub matrices: BTreeMap<String, Vec<ComplexPairs>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Entry {
    Logic {
        name: String,
        file: String,
        annotations: LogicAnnotations,
    },
    Morphism {
        name: String,
        file: String,
        annotations: MorphismAnnotations,
    },
    Composite {
        name: String,
        file: String,
        annotations: CompositeAnnotations,
    },
    Hilbert {
        name: String,
        file: String,
        annotations: HilbertAnnotations,
    },
}

impl Entry {
    pub fn name(&self) -> &str {
        match self {
            Entry::Logic { name, .. }
            | Entry::Morphism { name, .. }
            | Entry::Composite { name, .. }
            | Entry::Hilbert { name, .. } => name,
        }
    }

    pub fn file(&self) -> &str {
        match self {
            Entry::Logic { file, .. }
            | Entry::Morphism { file, .. }
            | Entry::Composite { file, .. }
            | Entry::Hilbert { file, .. } => file,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub fixtures: Vec<Entry>,
}

/// A loaded fixture.
#[derive(Clone, Debug)]
pub enum Fixture {
    /// `logic` is `None` for deliberately invalid descriptions.
    Logic {
        description: LogicDescription,
        logic: Option<Box<FiniteLogic>>,
    },
    Morphism(Box<LoadedMorphism>),
    Composite(Box<CompositeLogic>),
    Hilbert(HilbertDemo),
}

pub struct Catalog {
    dir: PathBuf,
    manifest: Manifest,
}

impl Catalog {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        let manifest = read_json(&dir.join(MANIFEST))?;
        Ok(Catalog { dir, manifest })
    }

    pub fn bundled() -> Result<Self> {
        Self::open(bundled_dir())
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.manifest.fixtures.iter().map(Entry::name)
    }

    pub fn entry(&self, name: &str) -> Result<&Entry> {
        self.manifest
            .fixtures
            .iter()
            .find(|e| e.name() == name)
            .ok_or_else(|| FormatError::UnknownFixture(name.into()))
    }

    pub fn path(&self, name: &str) -> Result<PathBuf> {
        Ok(self.dir.join(self.entry(name)?.file()))
    }

    /// Loads a fixture and checks its structural annotations.
    pub fn load(&self, name: &str) -> Result<Fixture> {
        let entry = self.entry(name)?;
        let path = self.dir.join(entry.file());
        match entry {
            Entry::Logic { annotations, .. } => {
                let description = format::read_logic_description(&path)?;
                let found = structural_logic_annotations(&description);
                let logic = match LoadedLogic::from_description(&description) {
                    Ok(l) => Some(Box::new(l.logic)),
                    Err(_) => None,
                };
                compare(name, "valid", &annotations.valid, &found.valid)?;
                compare(
                    name,
                    "axiom_failure",
                    &annotations.axiom_failure,
                    &found.axiom_failure,
                )?;
                compare(name, "elements", &annotations.elements, &found.elements)?;
                compare(name, "atoms", &annotations.atoms, &found.atoms)?;
                Ok(Fixture::Logic { description, logic })
            }
            Entry::Morphism { annotations, .. } => {
                let m = format::read_morphism(&path)?;
                compare(
                    name,
                    "source_elements",
                    &annotations.source_elements,
                    &m.source.logic.len(),
                )?;
                compare(
                    name,
                    "target_elements",
                    &annotations.target_elements,
                    &m.target.logic.len(),
                )?;
                Ok(Fixture::Morphism(Box::new(m)))
            }
            Entry::Composite { annotations, .. } => {
                let c = format::read_composite(&path)?;
                compare(
                    name,
                    "factor_atoms",
                    &annotations.factor_atoms,
                    &c.factor().atoms().len(),
                )?;
                compare(
                    name,
                    "ambient_elements",
                    &annotations.ambient_elements,
                    &c.ambient().len(),
                )?;
                compare(
                    name,
                    "ambient_atoms",
                    &annotations.ambient_atoms,
                    &c.ambient().atoms().len(),
                )?;
                Ok(Fixture::Composite(Box::new(c)))
            }
            Entry::Hilbert { .. } => Ok(Fixture::Hilbert(read_json(&path)?)),
        }
    }

    pub fn load_logic(&self, name: &str) -> Result<FiniteLogic> {
        match self.load(name)? {
            Fixture::Logic { logic: Some(l), .. } => Ok(*l),
            _ => Err(FormatError::Invalid(format!(
                "fixture {name} is not a valid logic"
            ))),
        }
    }

    pub fn load_composite(&self, name: &str) -> Result<CompositeLogic> {
        match self.load(name)? {
            Fixture::Composite(c) => Ok(*c),
            _ => Err(FormatError::Invalid(format!(
                "fixture {name} is not a composite"
            ))),
        }
    }

    pub fn load_morphism(&self, name: &str) -> Result<LoadedMorphism> {
        match self.load(name)? {
            Fixture::Morphism(m) => Ok(*m),
            _ => Err(FormatError::Invalid(format!(
                "fixture {name} is not a morphism"
            ))),
        }
    }

    /// Recomputes every annotation of `name` and compares it with the
    /// manifest.
    pub fn verify(&self, name: &str) -> Result<()> {
        let entry = self.entry(name)?;
        let found = derive_entry(&self.dir, entry.name(), entry.file(), kind_of(entry))?;
        if found != *entry {
            return Err(FormatError::AnnotationMismatch {
                fixture: name.into(),
                field: "annotations",
                expected: format::to_json_string(entry),
                found: format::to_json_string(&found),
            });
        }
        Ok(())
    }
}

/// Loads a fixture from the bundled catalog.
pub fn load_fixture(name: &str) -> Result<Fixture> {
    Catalog::bundled()?.load(name)
}

fn compare<T: PartialEq + std::fmt::Debug>(
    fixture: &str,
    field: &'static str,
    expected: &T,
    found: &T,
) -> Result<()> {
    if expected != found {
        return Err(FormatError::AnnotationMismatch {
            fixture: fixture.into(),
            field,
            expected: format!("{expected:?}"),
            found: format!("{found:?}"),
        });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Logic,
    Morphism,
    Composite,
    Hilbert,
}

fn kind_of(e: &Entry) -> Kind {
    match e {
        Entry::Logic { .. } => Kind::Logic,
        Entry::Morphism { .. } => Kind::Morphism,
        Entry::Composite { .. } => Kind::Composite,
        Entry::Hilbert { .. } => Kind::Hilbert,
    }
}

fn structural_logic_annotations(raw: &LogicDescription) -> LogicAnnotations {
    let loaded = LoadedLogic::from_description(raw);
    let (valid, axiom_failure, atoms) = match &loaded {
        Ok(l) => (true, None, Some(l.logic.atoms().len())),
        Err(FormatError::Logic(Error::AxiomViolation { axiom, .. })) => {
            (false, Some(axiom.to_string()), None)
        }
        Err(_) => (false, None, None),
    };
    LogicAnnotations {
        valid,
        axiom_failure,
        elements: raw.labels.len(),
        atoms,
        condition_f: None,
        condition_g: None,
        condition_h: None,
        automorphisms: None,
    }
}

pub fn derive_logic_annotations(raw: &LogicDescription) -> Result<LogicAnnotations> {
    let mut a = structural_logic_annotations(raw);
    if let Ok(l) = LoadedLogic::from_description(raw) {
        let poly = StatePolytope::new(&l.logic, &StateConfig::default())?;
        a.condition_f = Some(poly.check_condition_f().holds());
        a.condition_g = Some(poly.check_condition_g().holds());
        a.condition_h = Some(poly.check_condition_h().holds());
        a.automorphisms = Some(count_automorphisms(&l.logic)?);
    }
    Ok(a)
}

fn count_automorphisms(l: &FiniteLogic) -> Result<u64> {
    Ok(for_each_automorphism(
        l,
        &mut Budget::new(DEFAULT_AUTOMORPHISM_BUDGET),
        |_| std::ops::ControlFlow::Continue(()),
    )?)
}

pub fn derive_morphism_annotations(m: &LoadedMorphism) -> MorphismAnnotations {
    let injective = m.morphism.is_injective();
    MorphismAnnotations {
        source_elements: m.source.logic.len(),
        target_elements: m.target.logic.len(),
        injective,
        automorphism: injective && m.source.logic == m.target.logic,
    }
}

pub fn derive_composite_annotations(c: &mut CompositeLogic) -> Result<CompositeAnnotations> {
    Ok(CompositeAnnotations {
        factor_atoms: c.factor().atoms().len(),
        ambient_elements: c.ambient().len(),
        ambient_atoms: c.ambient().atoms().len(),
        condition_i: c.check_condition_i(&mut Budget::default())?,
        condition_j: c.check_condition_j().is_none(),
        automorphisms: count_automorphisms(c.ambient())?,
    })
}

fn demo_vector(demo: &HilbertDemo, key: &str) -> Result<PureVector> {
    let v = demo
        .vectors
        .get(key)
        .ok_or_else(|| FormatError::Invalid(format!("missing vector {key}")))?;
    Ok(PureVector::new(vector_from_pairs(v), DEFAULT_TOLERANCE)?)
}

fn demo_matrix(demo: &HilbertDemo, key: &str) -> Result<qlogic_core::hilbert::CMatrix> {
    matrix_from_rows(
        demo.matrices
            .get(key)
            .ok_or_else(|| FormatError::Invalid(format!("missing matrix {key}")))?,
    )
}

pub fn derive_hilbert_annotations(demo: &HilbertDemo) -> Result<HilbertAnnotations> {
    let tol = DEFAULT_TOLERANCE;
    let xi1 = demo_vector(demo, "xi1")?;
    let xi2 = demo_vector(demo, "xi2")?;
    let a = DensityOperator::new(demo_matrix(demo, "a")?, tol)?;
    let e = ProjectionOperator::new(demo_matrix(demo, "e")?, tol)?;
    let f = ProjectionOperator::new(demo_matrix(demo, "f")?, tol)?;
    let g = ProjectionOperator::new(demo_matrix(demo, "g")?, tol)?;
    let w = hilbert::no_cloning_witness(&xi1, &xi2, tol)?;
    Ok(HilbertAnnotations {
        overlap: w.s,
        cloneable: w.cloneable,
        trace_cond_prob: hilbert::trace_cond_prob(&a, &e, &f, tol)?,
        atom_transition: hilbert::atom_transition(&demo_vector(demo, "zeta")?, &g)?,
    })
}

fn derive_entry(dir: &Path, name: &str, file: &str, kind: Kind) -> Result<Entry> {
    let path = dir.join(file);
    let (name, file) = (name.to_string(), file.to_string());
    Ok(match kind {
        Kind::Logic => Entry::Logic {
            name,
            file,
            annotations: derive_logic_annotations(&format::read_logic_description(&path)?)?,
        },
        Kind::Morphism => Entry::Morphism {
            name,
            file,
            annotations: derive_morphism_annotations(&format::read_morphism(&path)?),
        },
        Kind::Composite => Entry::Composite {
            name,
            file,
            annotations: derive_composite_annotations(&mut format::read_composite(&path)?)?,
        },
        Kind::Hilbert => Entry::Hilbert {
            name,
            file,
            annotations: derive_hilbert_annotations(&read_json(&path)?)?,
        },
    })
}

/// Blocks of the pasting whose state space forces `ρ(j) = 0`.
pub const ZERO_ATOM_BLOCKS: [&[&str]; 6] = [
    &["a", "b", "c"],
    &["d", "e", "f"],
    &["g", "h", "i", "j"],
    &["a", "d", "g"],
    &["b", "e", "h"],
    &["c", "f", "i"],
];

/// Source descriptions of the logic fixtures, in manifest order.
pub fn logic_sources() -> Vec<(String, LogicDescription)> {
    let mut out = Vec::new();
    for k in 1..=4 {
        out.push((format!("boolean{k}"), builders::boolean_n(k)));
    }
    for n in 1..=3 {
        out.push((format!("MO{n}"), builders::mo(n)));
    }
    out.push(("O6".into(), builders::o6()));
    out.push(("zero_atom".into(), builders::pasting(&ZERO_ATOM_BLOCKS)));
    out
}

/// Label pairs `(source, target)` listed for a morphism fixture.
type LabelPairs = &'static [(&'static str, &'static str)];

/// Map from `source` to `target` sending each label to the label paired
/// with it in `pairs` (identity on labels not listed).
fn map_by_labels(
    source: &LogicDescription,
    target: &LogicDescription,
    pairs: &[(&str, &str)],
) -> Vec<usize> {
    source
        .labels
        .iter()
        .map(|s| {
            let t = pairs
                .iter()
                .find(|(a, _)| a == s)
                .map_or(s.as_str(), |(_, b)| b);
            target
                .labels
                .iter()
                .position(|x| x == t)
                .expect("target label exists")
        })
        .collect()
}

fn write_product(dir: &Path, name: &str, atoms: &[&str]) -> Result<()> {
    let factor = builders::boolean(atoms);
    let loaded = LoadedLogic::from_description(&factor)?;
    let c = boolean_product(&loaded.logic)?;
    let factor_file = format!("{name}_factor.json");
    let ambient_file = format!("{name}_ambient.json");
    write_json(&dir.join(&factor_file), &LogicFile::from(c.factor()))?;
    write_json(&dir.join(&ambient_file), &LogicFile::from(c.ambient()))?;
    let inline = format::composite_file(&c);
    let file = CompositeFile {
        factor: LogicRef::Path(factor_file.into()),
        ambient: LogicRef::Path(ambient_file.into()),
        ..inline
    };
    write_json(&dir.join(format!("{name}.json")), &file)
}

fn hilbert_demo() -> HilbertDemo {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let real = |xs: &[f64]| -> ComplexPairs { xs.iter().map(|&x| [x, 0.0]).collect() };
    let zeta = PureVector::from_real(&[1.0, 0.0, 0.0]).expect("unit");
    let eta = PureVector::from_real(&[1.0, 1.0, 0.0]).expect("unit");
    let g = ProjectionOperator::rank_one(&eta);
    let mut vectors = BTreeMap::new();
    vectors.insert("xi1".into(), real(&[1.0, 0.0]));
    vectors.insert("xi2".into(), real(&[r, r]));
    vectors.insert("zeta".into(), vector_to_pairs(zeta.vector()));
    let mut matrices = BTreeMap::new();
    matrices.insert(
        "a".into(),
        matrix_to_rows(DensityOperator::maximally_mixed(3).matrix()),
    );
    matrices.insert(
        "e".into(),
        matrix_to_rows(ProjectionOperator::diagonal(&[true, true, false]).matrix()),
    );
    matrices.insert(
        "f".into(),
        matrix_to_rows(ProjectionOperator::diagonal(&[false, true, true]).matrix()),
    );
    matrices.insert("g".into(), matrix_to_rows(g.matrix()));
    HilbertDemo { vectors, matrices }
}

/// Writes every fixture file into `dir` and returns the manifest with
/// freshly derived annotations (also written).
pub fn generate(dir: &Path) -> Result<Manifest> {
    fs::create_dir_all(dir).map_err(|source| FormatError::Io {
        path: dir.to_owned(),
        source,
    })?;
    let mut planned: Vec<(String, String, Kind)> = Vec::new();
    let sources = logic_sources();
    for (name, raw) in &sources {
        let file = format!("{name}.json");
        write_json(&dir.join(&file), &LogicFile::from(raw.clone()))?;
        planned.push((name.clone(), file, Kind::Logic));
    }
    let src = |n: &str| {
        &sources
            .iter()
            .find(|(m, _)| m == n)
            .expect("listed above")
            .1
    };
    let morphisms: [(&str, &str, &str, LabelPairs); 3] = [
        ("embed_b2_b3", "boolean2", "boolean3", &[("y", "{y,z}")]),
        (
            "embed_b2_mo2",
            "boolean2",
            "MO2",
            &[("x", "a"), ("y", "a'")],
        ),
        ("embed_mo1_mo2", "MO1", "MO2", &[]),
    ];
    for (name, s, t, pairs) in morphisms {
        let file = format!("{name}.json");
        let m = MorphismFile {
            source: LogicRef::Path(format!("{s}.json").into()),
            target: LogicRef::Path(format!("{t}.json").into()),
            map: map_by_labels(src(s), src(t), pairs),
        };
        write_json(&dir.join(&file), &m)?;
        planned.push((name.into(), file, Kind::Morphism));
    }
    for (name, atoms) in [
        ("prod22", &["e1", "e2"][..]),
        ("prod33", &["e1", "e2", "e3"][..]),
    ] {
        write_product(dir, name, atoms)?;
        planned.push((name.into(), format!("{name}.json"), Kind::Composite));
    }
    write_json(&dir.join("hilbert_demo.json"), &hilbert_demo())?;
    planned.push((
        "hilbert_demo".into(),
        "hilbert_demo.json".into(),
        Kind::Hilbert,
    ));

    let fixtures = planned
        .iter()
        .map(|(name, file, kind)| derive_entry(dir, name, file, *kind))
        .collect::<Result<_>>()?;
    let manifest = Manifest { fixtures };
    write_json(&dir.join(MANIFEST), &manifest)?;
    Ok(manifest)
}

/// All automorphisms of a fixture logic, for suites that sweep them.
pub fn fixture_automorphisms(l: &FiniteLogic) -> Result<Vec<qlogic_core::morphisms::Automorphism>> {
    Ok(automorphisms(
        l,
        &mut Budget::new(DEFAULT_AUTOMORPHISM_BUDGET),
    )?)
}
