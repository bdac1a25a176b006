//! JSON interchange files: logics, states, morphisms, composites and
//! complex matrices.
//!
//! Logic references inside state, morphism and composite files are either
//! a path (relative to the referring file) or an inline logic object.

use std::fs;
use std::path::{Path, PathBuf};

use qlogic_core::composite::{CompositeLogic, PRODUCT_MAX_ELEMENTS};
use qlogic_core::hilbert::{CMatrix, CVector, C64};
use qlogic_core::morphisms::{validate_morphism, Morphism};
use qlogic_core::state::State;
use qlogic_core::{
    rational, validate_logic, Element, FiniteLogic, LogicDescription, Rational, ValidateConfig,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{FormatError, Result};

/// Size limit applied when loading logic files. Large enough for the
/// `2^3 × 2^3` product.
pub const LOAD_MAX_ELEMENTS: usize = PRODUCT_MAX_ELEMENTS;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogicFile {
    pub labels: Vec<String>,
    pub le: Vec<[usize; 2]>,
    pub ortho: Vec<usize>,
    pub zero: usize,
    pub one: usize,
}

impl From<LogicDescription> for LogicFile {
    fn from(d: LogicDescription) -> Self {
        LogicFile {
            labels: d.labels,
            le: d.le_pairs.into_iter().map(|(a, b)| [a, b]).collect(),
            ortho: d.ortho,
            zero: d.zero,
            one: d.one,
        }
    }
}

impl From<LogicFile> for LogicDescription {
    fn from(f: LogicFile) -> Self {
        LogicDescription {
            labels: f.labels,
            le_pairs: f.le.into_iter().map(|[a, b]| (a, b)).collect(),
            ortho: f.ortho,
            zero: f.zero,
            one: f.one,
        }
    }
}

impl From<&FiniteLogic> for LogicFile {
    fn from(l: &FiniteLogic) -> Self {
        l.to_description().into()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LogicRef {
    Path(PathBuf),
    Inline(LogicFile),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub logic: LogicRef,
    pub values: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismFile {
    pub source: LogicRef,
    pub target: LogicRef,
    pub map: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompositeFile {
    pub factor: LogicRef,
    pub ambient: LogicRef,
    pub pi1: Vec<usize>,
    pub pi2: Vec<usize>,
}

/// A validated logic together with the translation from file positions to
/// canonical elements.
#[derive(Clone, Debug)]
pub struct LoadedLogic {
    pub logic: FiniteLogic,
    pub index: Vec<Element>,
}

impl LoadedLogic {
    pub fn from_description(raw: &LogicDescription) -> Result<Self> {
        let logic = validate_logic(
            raw,
            &ValidateConfig {
                max_elements: LOAD_MAX_ELEMENTS,
            },
        )?;
        let index = raw
            .labels
            .iter()
            .map(|s| logic.element(s).expect("labels survive validation"))
            .collect();
        Ok(LoadedLogic { logic, index })
    }

    /// Translates a map given in file positions of `self` into canonical
    /// indices of `target`.
    fn translate_map(&self, target: &LoadedLogic, map: &[usize]) -> Result<Vec<usize>> {
        if map.len() != self.index.len() {
            return Err(qlogic_core::Error::MapLength {
                expected: self.index.len(),
                found: map.len(),
            }
            .into());
        }
        let mut out = vec![0; map.len()];
        for (i, &m) in map.iter().enumerate() {
            let t = target
                .index
                .get(m)
                .ok_or_else(|| FormatError::Invalid(format!("map entry {m} is out of range")))?;
            out[self.index[i].index()] = t.index();
        }
        Ok(out)
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.to_owned(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| FormatError::Json {
        path: path.to_owned(),
        source,
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json_string(value)).map_err(|source| FormatError::Io {
        path: path.to_owned(),
        source,
    })
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

pub fn read_logic_description(path: &Path) -> Result<LogicDescription> {
    Ok(read_json::<LogicFile>(path)?.into())
}

pub fn read_logic(path: &Path) -> Result<LoadedLogic> {
    LoadedLogic::from_description(&read_logic_description(path)?)
}

pub fn resolve_logic(r: &LogicRef, base: &Path) -> Result<LoadedLogic> {
    match r {
        LogicRef::Path(p) => read_logic(&base.join(p)),
        LogicRef::Inline(f) => LoadedLogic::from_description(&f.clone().into()),
    }
}

pub fn parse_rationals(values: &[String]) -> Result<Vec<Rational>> {
    values
        .iter()
        .map(|s| {
            rational::parse(s).ok_or_else(|| FormatError::Invalid(format!("not a rational: {s:?}")))
        })
        .collect()
}

pub fn rationals_to_strings(values: &[Rational]) -> Vec<String> {
    values.iter().map(rational::to_pq).collect()
}

/// Reads a state file, returning the logic and the validated state.
pub fn read_state(path: &Path) -> Result<(LoadedLogic, State)> {
    let f: StateFile = read_json(path)?;
    let loaded = resolve_logic(&f.logic, &base_dir(path))?;
    let raw = parse_rationals(&f.values)?;
    if raw.len() != loaded.index.len() {
        return Err(qlogic_core::Error::DimensionMismatch {
            expected: loaded.index.len(),
            found: raw.len(),
        }
        .into());
    }
    let mut values = vec![rational::zero(); raw.len()];
    for (i, v) in raw.into_iter().enumerate() {
        values[loaded.index[i].index()] = v;
    }
    let state = State::new(&loaded.logic, values)?;
    Ok((loaded, state))
}

#[derive(Clone, Debug)]
pub struct LoadedMorphism {
    pub source: LoadedLogic,
    pub target: LoadedLogic,
    pub morphism: Morphism,
}

pub fn read_morphism(path: &Path) -> Result<LoadedMorphism> {
    let f: MorphismFile = read_json(path)?;
    let base = base_dir(path);
    let source = resolve_logic(&f.source, &base)?;
    let target = resolve_logic(&f.target, &base)?;
    let map = source.translate_map(&target, &f.map)?;
    let morphism = validate_morphism(&source.logic, &target.logic, &map)?;
    Ok(LoadedMorphism {
        source,
        target,
        morphism,
    })
}

pub fn read_composite(path: &Path) -> Result<CompositeLogic> {
    let f: CompositeFile = read_json(path)?;
    let base = base_dir(path);
    let factor = resolve_logic(&f.factor, &base)?;
    let ambient = resolve_logic(&f.ambient, &base)?;
    let pi1 = factor.translate_map(&ambient, &f.pi1)?;
    let pi2 = factor.translate_map(&ambient, &f.pi2)?;
    Ok(CompositeLogic::new(
        factor.logic,
        ambient.logic,
        &pi1,
        &pi2,
    )?)
}

/// Composite file with both logics inline, in canonical indexing.
pub fn composite_file(c: &CompositeLogic) -> CompositeFile {
    CompositeFile {
        factor: LogicRef::Inline(c.factor().into()),
        ambient: LogicRef::Inline(c.ambient().into()),
        pi1: c.pi1().map().iter().map(|e| e.index()).collect(),
        pi2: c.pi2().map().iter().map(|e| e.index()).collect(),
    }
}

/// `[re, im]` pairs.
pub type ComplexPairs = Vec<[f64; 2]>;

pub fn vector_from_pairs(pairs: &[[f64; 2]]) -> CVector {
    CVector::from_iterator(pairs.len(), pairs.iter().map(|&[re, im]| C64::new(re, im)))
}

pub fn vector_to_pairs(v: &CVector) -> ComplexPairs {
    v.iter().map(|z| [z.re, z.im]).collect()
}

/// Row-major nested `[re, im]` pairs.
pub fn matrix_from_rows(rows: &[ComplexPairs]) -> Result<CMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(FormatError::Invalid(
            "matrix rows have different lengths".into(),
        ));
    }
    Ok(CMatrix::from_fn(n, m, |i, j| {
        C64::new(rows[i][j][0], rows[i][j][1])
    }))
}

pub fn matrix_to_rows(m: &CMatrix) -> Vec<ComplexPairs> {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

pub fn read_matrix(path: &Path) -> Result<CMatrix> {
    matrix_from_rows(&read_json::<Vec<ComplexPairs>>(path)?)
}
