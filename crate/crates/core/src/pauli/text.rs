//! Text and JSON serialization of operators.
//!
//! Text form: one term per line, `coeff_re coeff_im label`, with `#` comments.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::label::{Basis, PauliLabel};
use super::operator::SpinOperator;
use crate::error::{Error, Result};

pub(crate) fn write_text(op: &SpinOperator, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    for (l, v) in op.sorted_terms() {
        writeln!(f, "{:.17e} {:.17e} {}", v.re, v.im, l.render(op.n(), op.basis()))?;
    }
    Ok(())
}

pub fn to_text(op: &SpinOperator) -> String {
    op.to_string()
}

/// Parses the text form. An empty term list needs a `# n=<N>` header line.
pub fn from_text(text: &str) -> Result<SpinOperator> {
    let mut n_header = None;
    let mut terms: Vec<(PauliLabel, Complex64)> = Vec::new();
    let mut shape: Option<(usize, Basis)> = None;
    let mut transverse_basis: Option<Basis> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(v) = comment.trim().strip_prefix("n=") {
                n_header =
                    Some(v.trim().parse::<usize>().map_err(|e| Error::Parse { line: line_no, msg: e.to_string() })?);
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse { line: line_no, msg: format!("expected 're im label', got '{line}'") });
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse { line: line_no, msg: format!("'{s}': {e}") });
        let value = Complex64::new(num(fields[0])?, num(fields[1])?);
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::Parse { line: line_no, msg: "non-finite coefficient".into() });
        }
        let (label, n, basis) =
            PauliLabel::parse(fields[2]).map_err(|e| Error::Parse { line: line_no, msg: e.to_string() })?;
        if let Some((n0, _)) = shape {
            if n0 != n {
                return Err(Error::Parse { line: line_no, msg: format!("label length {n} differs from {n0}") });
            }
        }
        if label.transverse() != 0 {
            if transverse_basis.is_some_and(|b| b != basis) {
                return Err(Error::Parse { line: line_no, msg: "mixed Cartesian and spherical labels".into() });
            }
            transverse_basis = Some(basis);
        }
        shape = Some((n, basis));
        terms.push((label, value));
    }
    let n = match (shape, n_header) {
        (Some((n, _)), Some(h)) if n != h => return Err(Error::DimensionMismatch(h, n)),
        (Some((n, _)), _) => n,
        (None, Some(h)) => h,
        (None, None) => return Err(Error::Parse { line: 0, msg: "no terms and no '# n=' header".into() }),
    };
    if n == 0 || n > super::label::MAX_SPINS {
        return Err(Error::SpinCount(n));
    }
    Ok(SpinOperator::from_label_map(n, transverse_basis.unwrap_or(Basis::Cartesian), terms))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TermRecord {
    pub label: String,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OperatorRecord {
    pub n: usize,
    pub basis: Basis,
    pub terms: Vec<TermRecord>,
}

impl From<&SpinOperator> for OperatorRecord {
    fn from(op: &SpinOperator) -> Self {
        OperatorRecord {
            n: op.n(),
            basis: op.basis(),
            terms: op
                .sorted_terms()
                .into_iter()
                .map(|(l, v)| TermRecord { label: l.render(op.n(), op.basis()), re: v.re, im: v.im })
                .collect(),
        }
    }
}

impl TryFrom<&OperatorRecord> for SpinOperator {
    type Error = Error;
    fn try_from(rec: &OperatorRecord) -> Result<Self> {
        if rec.n == 0 || rec.n > super::label::MAX_SPINS {
            return Err(Error::SpinCount(rec.n));
        }
        let mut terms = Vec::with_capacity(rec.terms.len());
        for t in &rec.terms {
            let (l, n, b) = PauliLabel::parse(&t.label)?;
            if n != rec.n {
                return Err(Error::DimensionMismatch(rec.n, n));
            }
            if l.transverse() != 0 && b != rec.basis {
                return Err(Error::BasisMismatch);
            }
            terms.push((l, Complex64::new(t.re, t.im)));
        }
        Ok(SpinOperator::from_label_map(rec.n, rec.basis, terms))
    }
}

pub fn to_json(op: &SpinOperator) -> String {
    serde_json::to_string_pretty(&OperatorRecord::from(op)).expect("operator record serializes")
}

pub fn from_json(text: &str) -> Result<SpinOperator> {
    let rec: OperatorRecord =
        serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
    SpinOperator::try_from(&rec)
}
