//! Verification records and measure reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::linalg::ComplexMatrix;

/// Outcome of one property check on one trial.
///
/// `margin` is signed slack: `rhs - lhs` for inequalities `lhs ≤ rhs`, and
/// `-|lhs - rhs|` for equalities. A record passes iff `margin ≥ -tol`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub check: String,
    pub trial: usize,
    pub seed: u64,
    pub input_hash: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub tol: f64,
    pub pass: bool,
}

impl VerificationRecord {
    /// Record for the claim `lhs ≤ rhs + tol`.
    pub fn inequality(check: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        let margin = rhs - lhs;
        Self::build(check.into(), lhs, rhs, margin, tol)
    }

    /// Record for the claim `|lhs - rhs| ≤ tol`.
    pub fn equality(check: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        let margin = if lhs == rhs { 0.0 } else { -(lhs - rhs).abs() };
        Self::build(check.into(), lhs, rhs, margin, tol)
    }

    /// Record for a boolean claim; `lhs`/`rhs` carry the witness values.
    pub fn predicate(check: impl Into<String>, holds: bool, lhs: f64, rhs: f64) -> Self {
        let mut r = Self::build(check.into(), lhs, rhs, if holds { 0.0 } else { -1.0 }, 0.0);
        r.pass = holds;
        r
    }

    fn build(check: String, lhs: f64, rhs: f64, margin: f64, tol: f64) -> Self {
        let pass = margin >= -tol;
        Self {
            check,
            trial: 0,
            seed: 0,
            input_hash: String::new(),
            lhs,
            rhs,
            margin,
            tol,
            pass,
        }
    }

    pub fn with_trial(mut self, trial: usize, seed: u64) -> Self {
        self.trial = trial;
        self.seed = seed;
        self
    }

    pub fn with_input(mut self, matrices: &[&ComplexMatrix]) -> Self {
        self.input_hash = input_hash(matrices);
        self
    }

    /// Combines two records on the same trial; the result passes iff both do,
    /// and keeps the values of the one with the smaller tolerance-normalized slack.
    pub fn and(self, other: VerificationRecord) -> Self {
        let pass = self.pass && other.pass;
        let worst = if (self.margin + self.tol) <= (other.margin + other.tol) {
            self
        } else {
            other
        };
        Self { pass, ..worst }
    }
}

/// Short SHA-256 fingerprint of matrix entries (little-endian re, im).
pub fn input_hash(matrices: &[&ComplexMatrix]) -> String {
    let mut h = Sha256::new();
    for m in matrices {
        h.update((m.rows() as u64).to_le_bytes());
        h.update((m.cols() as u64).to_le_bytes());
        for z in m.as_slice() {
            h.update(z.re.to_le_bytes());
            h.update(z.im.to_le_bytes());
        }
    }
    let digest = h.finalize();
    digest[..8].iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Summary of a batch of records.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteSummary {
    pub trials: usize,
    pub failures: usize,
    pub worst_margin: f64,
}

pub fn summarize(records: &[VerificationRecord]) -> SuiteSummary {
    SuiteSummary {
        trials: records.len(),
        failures: records.iter().filter(|r| !r.pass).count(),
        worst_margin: records
            .iter()
            .map(|r| r.margin)
            .fold(f64::INFINITY, f64::min),
    }
}

/// Named measure values with metadata.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub values: BTreeMap<String, f64>,
    pub metadata: BTreeMap<String, serde_json::Value>,
}

impl MeasureReport {
    pub fn insert(&mut self, name: &str, value: f64) {
        self.values.insert(name.to_owned(), value);
    }

    pub fn meta(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.metadata.insert(key.to_owned(), value.into());
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("measure,value\n");
        for (k, v) in &self.values {
            let _ = writeln!(out, "{k},{v}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inequality_and_equality_margins() {
        let r = VerificationRecord::inequality("x", 0.5, 0.5 - 1e-9, 1e-8);
        assert!(r.pass);
        let r = VerificationRecord::inequality("x", 0.5, 0.4, 1e-8);
        assert!(!r.pass && (r.margin + 0.1).abs() < 1e-15);
        let r = VerificationRecord::equality("x", 1.0, 1.0 + 1e-10, 1e-9);
        assert!(r.pass && r.margin < 0.0);
        let r = VerificationRecord::equality("x", 1.0, 1.1, 1e-9);
        assert!(!r.pass);
    }

    #[test]
    fn combined_record_fails_if_either_fails() {
        let ok = VerificationRecord::inequality("a", 0.0, 1.0, 0.0);
        let bad = VerificationRecord::inequality("b", 1.0, 0.0, 0.0);
        let both = ok.clone().and(bad);
        assert!(!both.pass);
        assert_eq!(both.check, "b");
        assert!(ok.clone().and(ok).pass);
    }

    #[test]
    fn hash_depends_on_entries() {
        let a = ComplexMatrix::identity(2);
        let b = ComplexMatrix::from_real_diag(&[1.0, 0.5]);
        assert_eq!(input_hash(&[&a]).len(), 16);
        assert_ne!(input_hash(&[&a]), input_hash(&[&b]));
        assert_eq!(input_hash(&[&a]), input_hash(&[&a.clone()]));
    }
}
