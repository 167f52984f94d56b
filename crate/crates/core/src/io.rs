//! JSON forms of colligations, bidisc model specs and point lists.
//!
//! Complex numbers are `{"re": .., "im": ..}` and matrices are row-major
//! nested arrays.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::colligation::{Colligation, SubspaceSplit};
use crate::domains::{Point2, SkewParam};
use crate::error::{Error, Result};
use crate::linalg::{c64, ComplexMatrix, ComplexVector, C64};
use crate::synthesis::{BidiscModelSpec, PolyScalar, PolyVectorMap, VectorTerm};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonComplex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for JsonComplex {
    fn from(z: C64) -> Self {
        JsonComplex { re: z.re, im: z.im }
    }
}

impl From<JsonComplex> for C64 {
    fn from(z: JsonComplex) -> Self {
        c64(z.re, z.im)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColligationFile {
    pub r: f64,
    pub d1: usize,
    pub a: JsonComplex,
    pub beta: Vec<JsonComplex>,
    pub gamma: Vec<JsonComplex>,
    #[serde(rename = "D")]
    pub d: Vec<Vec<JsonComplex>>,
    #[serde(rename = "U")]
    pub u: Vec<Vec<JsonComplex>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorTermFile {
    pub j: u32,
    pub k: u32,
    pub coeff: Vec<JsonComplex>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarTermFile {
    pub j: u32,
    pub k: u32,
    pub coeff: JsonComplex,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub r: f64,
    pub d1: usize,
    pub d2: usize,
    pub u1: Vec<VectorTermFile>,
    pub u2: Vec<VectorTermFile>,
    #[serde(rename = "F")]
    pub f: Vec<ScalarTermFile>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PointFile {
    pub z1: JsonComplex,
    pub z2: JsonComplex,
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
}

fn vector(xs: &[JsonComplex]) -> ComplexVector {
    ComplexVector::from_iterator(xs.len(), xs.iter().map(|&z| C64::from(z)))
}

fn matrix(rows: &[Vec<JsonComplex>], n: usize, field: &str) -> Result<ComplexMatrix> {
    if rows.len() != n || rows.iter().any(|row| row.len() != n) {
        return Err(Error::Parse(format!(
            "field `{field}` must be a {n}x{n} matrix"
        )));
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| rows[i][j].into()))
}

fn rows(m: &ComplexMatrix) -> Vec<Vec<JsonComplex>> {
    m.row_iter()
        .map(|row| row.iter().map(|&z| z.into()).collect())
        .collect()
}

fn skew(r: f64) -> Result<SkewParam> {
    SkewParam::new(r).map_err(|_| Error::Parse(format!("field `r` = {r} must lie in (0, 1)")))
}

pub fn colligation_to_file(c: &Colligation) -> ColligationFile {
    ColligationFile {
        r: c.r.value(),
        d1: c.split.d1,
        a: c.a.into(),
        beta: c.beta.iter().map(|&z| z.into()).collect(),
        gamma: c.gamma.iter().map(|&z| z.into()).collect(),
        d: rows(&c.d),
        u: rows(&c.u),
    }
}

pub fn colligation_from_file(f: &ColligationFile) -> Result<Colligation> {
    let r = skew(f.r)?;
    let n = f.beta.len();
    if f.gamma.len() != n {
        return Err(Error::Parse(format!(
            "field `gamma` has length {}, `beta` has length {n}",
            f.gamma.len()
        )));
    }
    if f.d1 == 0 || f.d1 >= n {
        return Err(Error::Parse(format!(
            "field `d1` = {} must lie in 1..{n}",
            f.d1
        )));
    }
    let split = SubspaceSplit::new(f.d1, n - f.d1)?;
    Colligation::new(
        r,
        split,
        f.a.into(),
        vector(&f.beta),
        vector(&f.gamma),
        matrix(&f.d, n, "D")?,
        matrix(&f.u, n, "U")?,
    )
}

pub fn colligation_to_json(c: &Colligation) -> String {
    serde_json::to_string_pretty(&colligation_to_file(c)).expect("colligation serializes")
}

pub fn colligation_from_json(text: &str) -> Result<Colligation> {
    let f: ColligationFile = serde_json::from_str(text).map_err(parse_err)?;
    colligation_from_file(&f)
}

fn vector_map(terms: &[VectorTermFile], dim: usize, field: &str) -> Result<PolyVectorMap> {
    let terms = terms
        .iter()
        .map(|t| VectorTerm {
            j: t.j,
            k: t.k,
            coeff: vector(&t.coeff),
        })
        .collect();
    PolyVectorMap::new(dim, terms).map_err(|e| Error::Parse(format!("field `{field}`: {e}")))
}

pub fn spec_from_file(f: &SpecFile) -> Result<BidiscModelSpec> {
    let r = skew(f.r)?;
    if f.d1 == 0 || f.d2 == 0 {
        return Err(Error::Parse("fields `d1` and `d2` must be positive".into()));
    }
    let u1 = vector_map(&f.u1, f.d1, "u1")?;
    let u2 = vector_map(&f.u2, f.d2, "u2")?;
    let terms = f.f.iter().map(|t| (t.j, t.k, C64::from(t.coeff))).collect();
    BidiscModelSpec::new(r, u1, u2, PolyScalar::new(terms))
}

pub fn spec_to_file(s: &BidiscModelSpec) -> SpecFile {
    let map = |m: &PolyVectorMap| {
        m.terms
            .iter()
            .map(|t| VectorTermFile {
                j: t.j,
                k: t.k,
                coeff: t.coeff.iter().map(|&z| z.into()).collect(),
            })
            .collect()
    };
    SpecFile {
        r: s.r.value(),
        d1: s.d1,
        d2: s.d2,
        u1: map(&s.u1),
        u2: map(&s.u2),
        f: s.f
            .terms
            .iter()
            .map(|&(j, k, c)| ScalarTermFile {
                j,
                k,
                coeff: c.into(),
            })
            .collect(),
    }
}

pub fn spec_to_json(s: &BidiscModelSpec) -> String {
    serde_json::to_string_pretty(&spec_to_file(s)).expect("spec serializes")
}

pub fn spec_from_json(text: &str) -> Result<BidiscModelSpec> {
    let f: SpecFile = serde_json::from_str(text).map_err(parse_err)?;
    spec_from_file(&f)
}

pub fn points_to_json(pts: &[Point2]) -> String {
    let out: Vec<PointFile> = pts
        .iter()
        .map(|p| PointFile {
            z1: p.z1.into(),
            z2: p.z2.into(),
        })
        .collect();
    serde_json::to_string_pretty(&out).expect("points serialize")
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
