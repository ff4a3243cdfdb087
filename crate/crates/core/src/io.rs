//! Text formats: algebra elements as JSON and numerical-range boundaries as CSV.
//!
//! An element of `M_{n_1} ⊕ ... ⊕ M_{n_l}` is stored as
//! `{"shape": [n_1, ..., n_l], "blocks": [[[re, im], ...], ...]}` with each
//! block a row-major list of `n_k²` pairs.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cstar::{AlgebraElement, AlgebraShape};
use crate::error::{BjError, Result};
use crate::linalg::matrix::{ComplexMatrix, C64};
use crate::linalg::numrange::SupportPoint;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub shape: Vec<usize>,
    pub blocks: Vec<Vec<[f64; 2]>>,
}

impl AlgebraFile {
    pub fn from_element(x: &AlgebraElement) -> Self {
        AlgebraFile {
            shape: x.shape().block_sizes().to_vec(),
            blocks: x.blocks().iter().map(|b| b.as_slice().iter().map(|z| [z.re, z.im]).collect()).collect(),
        }
    }

    pub fn to_element(&self) -> Result<AlgebraElement> {
        let shape = AlgebraShape::new(self.shape.clone())?;
        if self.blocks.len() != self.shape.len() {
            return Err(BjError::ShapeMismatch(format!("{} blocks for shape {shape}", self.blocks.len())));
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&self.shape)
            .enumerate()
            .map(|(k, (data, &n))| {
                if data.len() != n * n {
                    return Err(BjError::ShapeMismatch(format!("block {k} has {} entries, expected {}", data.len(), n * n)));
                }
                ComplexMatrix::from_vec(n, n, data.iter().map(|&[re, im]| C64::new(re, im)).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        AlgebraElement::new(shape, blocks)
    }
}

pub fn parse_algebra(text: &str) -> Result<AlgebraElement> {
    let file: AlgebraFile = serde_json::from_str(text).map_err(|e| BjError::Parse(e.to_string()))?;
    file.to_element()
}

pub fn serialize_algebra(x: &AlgebraElement) -> String {
    serde_json::to_string(&AlgebraFile::from_element(x)).expect("finite entries serialize")
}

pub fn read_algebra(path: &Path) -> Result<AlgebraElement> {
    parse_algebra(&fs::read_to_string(path)?)
}

pub fn write_algebra(path: &Path, x: &AlgebraElement) -> Result<()> {
    let mut s = serialize_algebra(x);
    s.push('\n');
    Ok(fs::write(path, s)?)
}

/// One `theta,re,im` line per boundary point, 17 significant digits each.
pub fn numrange_csv(points: &[SupportPoint]) -> String {
    let mut out = String::with_capacity(points.len() * 72);
    for p in points {
        writeln!(out, "{:.16e},{:.16e},{:.16e}", p.theta, p.z.re, p.z.im).expect("write to string");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let x = AlgebraElement::from_blocks(vec![
            ComplexMatrix::from_rows(&[[C64::new(0.1, -1e-300), C64::new(1.0 / 3.0, 2.0)], [C64::new(-0.0, 5e-324), C64::new(1e300, 0.7)]]),
            ComplexMatrix::from_vec(1, 1, vec![C64::new(std::f64::consts::PI, -std::f64::consts::E)]).unwrap(),
        ])
        .unwrap();
        let back = parse_algebra(&serialize_algebra(&x)).unwrap();
        for (a, b) in x.blocks().iter().zip(back.blocks()) {
            for (p, q) in a.as_slice().iter().zip(b.as_slice()) {
                assert_eq!(p.re.to_bits(), q.re.to_bits());
                assert_eq!(p.im.to_bits(), q.im.to_bits());
            }
        }
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_algebra("{"), Err(BjError::Parse(_))));
        assert!(matches!(parse_algebra(r#"{"shape":[2],"blocks":[[[1,0]]]}"#), Err(BjError::ShapeMismatch(_))));
        assert!(matches!(parse_algebra(r#"{"shape":[1,1],"blocks":[[[1,0]]]}"#), Err(BjError::ShapeMismatch(_))));
        assert!(matches!(parse_algebra(r#"{"shape":[0],"blocks":[[]]}"#), Err(BjError::InvalidShape(_))));
        let x = parse_algebra(r#"{"shape":[2],"blocks":[[[1,0],[0,0],[0,0],[0,1]]]}"#).unwrap();
        assert_eq!(x.block(0)[(1, 1)], C64::new(0.0, 1.0));
    }

    #[test]
    fn csv_layout() {
        let p = SupportPoint { theta: 0.5, h: 1.0, z: C64::new(-0.25, 1.0 / 3.0), x: vec![] };
        assert_eq!(numrange_csv(&[p]), "5.0000000000000000e-1,-2.5000000000000000e-1,3.3333333333333331e-1\n");
    }
}
