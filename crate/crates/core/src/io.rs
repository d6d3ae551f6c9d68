//! The complex file format: `{"top_simplices": [[..]], "weights": ["p/q", ..]}`.
//!
//! `weights` is optional. When absent the homogeneous weight is used; when
//! present it lists one top-cell weight per entry of `top_simplices`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::complex::{WeightKind, WeightedComplex};
use crate::error::{HdxError, Result};
use crate::rational::{fmt_rational, parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexFile {
    pub top_simplices: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<String>>,
}

impl ComplexFile {
    /// Tops in canonical order. Weights are written only when they differ
    /// from the plain homogeneous weight.
    pub fn from_complex(x: &WeightedComplex) -> Self {
        let top_simplices = x.tops().iter().map(|s| s.vertices().to_vec()).collect();
        let tw = x.top_weights();
        let unit = Rational::from_integer(1.into());
        let weights = if tw.iter().all(|w| *w == unit) {
            None
        } else {
            Some(tw.iter().map(fmt_rational).collect())
        };
        ComplexFile { top_simplices, weights }
    }

    pub fn weight_kind(&self) -> Result<WeightKind> {
        match &self.weights {
            None => Ok(WeightKind::Homogeneous),
            Some(ws) => Ok(WeightKind::Custom(
                ws.iter().map(|w| parse_rational(w)).collect::<Result<_>>()?,
            )),
        }
    }

    pub fn build(&self) -> Result<WeightedComplex> {
        WeightedComplex::build(&self.top_simplices, &self.weight_kind()?)
    }
}

pub fn parse_complex_json(text: &str) -> Result<WeightedComplex> {
    let file: ComplexFile =
        serde_json::from_str(text).map_err(|e| HdxError::Parse(e.to_string()))?;
    file.build()
}

pub fn complex_to_json(x: &WeightedComplex) -> String {
    let mut s = serde_json::to_string(&ComplexFile::from_complex(x))
        .expect("complex file serializes");
    s.push('\n');
    s
}

pub fn read_complex(path: impl AsRef<Path>) -> Result<WeightedComplex> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| HdxError::Io(format!("{}: {e}", path.display())))?;
    parse_complex_json(&text).map_err(|e| match e {
        HdxError::Parse(m) => HdxError::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn write_complex(x: &WeightedComplex, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, complex_to_json(x))
        .map_err(|e| HdxError::Io(format!("{}: {e}", path.display())))
}
