//! JSON file schema for sequences, arrays, quaternion sequences and
//! projections.
//!
//! ```json
//! {"kind": "phase", "order": 2, "exponents": [0, 0, 0, 1], "rows": 2, "cols": 2,
//!  "provenance": {"command": "construct", "parameters": {"family": "frank", "n": 2}, "tool_version": "0.1.0"}}
//! ```
//!
//! Arrays are row-major. Quaternion files carry `symbols`; projection files
//! carry one coefficient vector per entry.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cyclotomic::CyclotomicInt;
use crate::error::{Error, Result};
use crate::quaternion::{QuatUnit, QuaternionSequence};
use crate::seq::{PhaseArray, PhaseSequence, ProjectionAxis, ProjectionSequence};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub command: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub tool_version: String,
}

impl Provenance {
    pub fn new(command: &str, parameters: BTreeMap<String, serde_json::Value>) -> Self {
        Self {
            command: command.to_string(),
            parameters,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SequenceFile {
    Phase {
        order: u32,
        exponents: Vec<i64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rows: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cols: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        provenance: Option<Provenance>,
    },
    Quaternion {
        symbols: Vec<QuatUnit>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        provenance: Option<Provenance>,
    },
    Projection {
        order: u32,
        axis: ProjectionAxis,
        /// Group-ring coefficients of each entry, length `order` each.
        values: Vec<Vec<i64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        provenance: Option<Provenance>,
    },
}

/// A validated file body.
#[derive(Clone, Debug, PartialEq)]
pub enum Loaded {
    Sequence(PhaseSequence),
    Array(PhaseArray),
    Quaternion(QuaternionSequence),
    Projection(ProjectionAxis, ProjectionSequence<i64>),
}

impl SequenceFile {
    pub fn from_sequence(s: &PhaseSequence, provenance: Option<Provenance>) -> Self {
        SequenceFile::Phase {
            order: s.order(),
            exponents: s.exponents().iter().map(|&e| e as i64).collect(),
            rows: None,
            cols: None,
            provenance,
        }
    }

    pub fn from_array(a: &PhaseArray, provenance: Option<Provenance>) -> Self {
        SequenceFile::Phase {
            order: a.order(),
            exponents: a.exponents().iter().map(|&e| e as i64).collect(),
            rows: Some(a.rows()),
            cols: Some(a.cols()),
            provenance,
        }
    }

    pub fn from_quaternion(q: &QuaternionSequence, provenance: Option<Provenance>) -> Self {
        SequenceFile::Quaternion {
            symbols: q.units().to_vec(),
            provenance,
        }
    }

    pub fn from_projection(
        axis: ProjectionAxis,
        r: &ProjectionSequence<i64>,
        provenance: Option<Provenance>,
    ) -> Self {
        SequenceFile::Projection {
            order: r.order(),
            axis,
            values: r.values().iter().map(|v| v.coeffs().to_vec()).collect(),
            provenance,
        }
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        match self {
            SequenceFile::Phase { provenance, .. }
            | SequenceFile::Quaternion { provenance, .. }
            | SequenceFile::Projection { provenance, .. } => provenance.as_ref(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// Checks the body and builds the domain value.
    pub fn load(&self) -> Result<Loaded> {
        let bad = |e: Error| Error::Format(e.to_string());
        match self {
            SequenceFile::Phase {
                order,
                exponents,
                rows,
                cols,
                ..
            } => match (rows, cols) {
                (None, None) => PhaseSequence::new(*order, exponents.iter().copied())
                    .map(Loaded::Sequence)
                    .map_err(bad),
                (Some(r), Some(c)) => PhaseArray::new(*order, *r, *c, exponents.iter().copied())
                    .map(Loaded::Array)
                    .map_err(bad),
                _ => Err(Error::Format("rows and cols must be given together".into())),
            },
            SequenceFile::Quaternion { symbols, .. } => QuaternionSequence::new(symbols.clone())
                .map(Loaded::Quaternion)
                .map_err(bad),
            SequenceFile::Projection {
                order,
                axis,
                values,
                ..
            } => {
                let vals = values
                    .iter()
                    .map(|v| CyclotomicInt::from_coeffs(*order, v.clone()))
                    .collect::<Result<Vec<_>>>()
                    .map_err(bad)?;
                ProjectionSequence::new(*order, vals)
                    .map(|r| Loaded::Projection(*axis, r))
                    .map_err(bad)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prov() -> Provenance {
        let mut p = BTreeMap::new();
        p.insert("n".to_string(), serde_json::json!(2));
        Provenance::new("construct", p)
    }

    #[test]
    fn array_round_trip() {
        let a = PhaseArray::from_rows(3, &[vec![0, 1, 2], vec![2, 2, 0]]).unwrap();
        let f = SequenceFile::from_array(&a, Some(prov()));
        let back = SequenceFile::parse(&f.to_json().unwrap()).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.load().unwrap(), Loaded::Array(a));
    }

    #[test]
    fn quaternion_round_trip() {
        let q = QuaternionSequence::parse_symbols(&["i", "j", "i", "-j"]).unwrap();
        let f = SequenceFile::from_quaternion(&q, None);
        let text = f.to_json().unwrap();
        assert!(text.contains("\"-j\""));
        assert_eq!(
            SequenceFile::parse(&text).unwrap().load().unwrap(),
            Loaded::Quaternion(q)
        );
    }

    #[test]
    fn projection_round_trip() {
        let a = PhaseArray::from_rows(2, &[vec![0, 0], vec![0, 1]]).unwrap();
        let r = a.column_sum::<i64>().unwrap();
        let f = SequenceFile::from_projection(ProjectionAxis::ColumnSum, &r, None);
        let back = SequenceFile::parse(&f.to_json().unwrap()).unwrap();
        assert_eq!(
            back.load().unwrap(),
            Loaded::Projection(ProjectionAxis::ColumnSum, r)
        );
    }

    #[test]
    fn rejects_malformed() {
        for text in [
            "",
            "{",
            r#"{"kind": "phase", "order": 2}"#,
            r#"{"kind": "phase", "order": 0, "exponents": [0]}"#,
            r#"{"kind": "phase", "order": 2, "exponents": []}"#,
            r#"{"kind": "phase", "order": 2, "exponents": [0, 1, 1], "rows": 2, "cols": 2}"#,
            r#"{"kind": "phase", "order": 2, "exponents": [0, 1], "rows": 2}"#,
            r#"{"kind": "quaternion", "symbols": ["i", "q"]}"#,
            r#"{"kind": "quaternion", "symbols": []}"#,
            r#"{"kind": "polygon", "order": 2}"#,
            r#"{"kind": "phase", "order": 2, "exponents": [0], "extra": 1}"#,
        ] {
            let r = SequenceFile::parse(text).and_then(|f| f.load());
            assert!(matches!(r, Err(Error::Format(_))), "{text}: {r:?}");
        }
    }

    #[test]
    fn exponents_are_reduced_on_load() {
        let f =
            SequenceFile::parse(r#"{"kind": "phase", "order": 4, "exponents": [-1, 5]}"#).unwrap();
        match f.load().unwrap() {
            Loaded::Sequence(s) => assert_eq!(s.exponents(), &[3, 1]),
            other => panic!("{other:?}"),
        }
    }
}
