//! Outcome types shared by all empirical checks.
//!
//! Every check returns a [`CheckReport`]: either a constant together with the
//! bound it was verified to, or a failure with a concrete witness. Reports
//! also carry a growth trace — the best constant measured at each of a ladder
//! of increasing bounds — so that divergence is distinguishable from "not yet
//! stabilized" by inspection.

use serde::{Deserialize, Serialize};

/// Best constant per length bound, measured at (at least) four increasing
/// bounds before a check may be labelled divergent.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GrowthTrace {
    /// `(bound, best constant at that bound)`, bounds strictly increasing.
    pub points: Vec<(u32, f64)>,
}

impl GrowthTrace {
    pub fn new(points: Vec<(u32, f64)>) -> Self {
        GrowthTrace { points }
    }

    /// The ladder of bounds used for traces: four increasing bounds ending at
    /// `max` with step `max(1, max/4)` (deduplicated for tiny `max`).
    pub fn ladder(max: u32) -> Vec<u32> {
        let step = (max / 4).max(1);
        let mut out: Vec<u32> = (0..4)
            .rev()
            .map(|i| max.saturating_sub(i * step))
            .filter(|&b| b > 0)
            .collect();
        out.dedup();
        out
    }

    pub fn value_at(&self, bound: u32) -> Option<f64> {
        self.points.iter().find(|&&(b, _)| b == bound).map(|&(_, v)| v)
    }

    /// Divergence heuristic: the trace must still be growing at its top end
    /// (`c[last] > c[last-1]`) and have grown over the window
    /// (`c[last-1] > c[first]`). Requires at least four points.
    pub fn looks_divergent(&self) -> bool {
        let n = self.points.len();
        if n < 4 {
            return false;
        }
        let c = |i: usize| self.points[i].1;
        c(n - 1) > c(n - 2) && c(n - 2) > c(0)
    }
}

/// A concrete object demonstrating a failed check; carries enough rendered
/// data to re-check the violation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Two words whose paths are far apart at some prefix index.
    WordPair {
        left: String,
        right: String,
        /// Left path basepoint offset (identity when empty).
        #[serde(default, skip_serializing_if = "String::is_empty")]
        offset: String,
        prefix: u32,
        distance: f64,
    },
    /// A word along which two prefix points are close despite a large gap.
    DeparturePoint { word: String, start: u32, gap: u32, distance: f64 },
    /// A group element that the check could not account for.
    Element { element: String, note: String },
    /// A word with a prefix point far from a subgroup.
    SubgroupPoint { word: String, prefix: u32, point: String, distance: f64 },
    /// A triple input/output pair for fellow-traveller transfer checks.
    TriplePair { source: [String; 3], image: [String; 3], prefix: u32, distance: f64 },
    /// Free-form description (used by decision procedures).
    Note { note: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// The check succeeded: `value` is the measured constant, exhaustively
    /// verified for all inputs within `verified_to`.
    Constant { value: f64, verified_to: u32 },
    /// The check failed; `witness` re-checks to the claimed violation.
    Failure { witness: Witness },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    /// What was checked, e.g. `"ft-constant[synchronous]"`.
    pub check: String,
    #[serde(flatten)]
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "trace_is_empty")]
    pub growth_trace: GrowthTrace,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

fn trace_is_empty(t: &GrowthTrace) -> bool {
    t.points.is_empty()
}

impl CheckReport {
    pub fn constant(check: impl Into<String>, value: f64, verified_to: u32) -> Self {
        CheckReport {
            check: check.into(),
            verdict: Verdict::Constant { value, verified_to },
            growth_trace: GrowthTrace::default(),
            notes: Vec::new(),
        }
    }

    pub fn failure(check: impl Into<String>, witness: Witness) -> Self {
        CheckReport {
            check: check.into(),
            verdict: Verdict::Failure { witness },
            growth_trace: GrowthTrace::default(),
            notes: Vec::new(),
        }
    }

    pub fn with_trace(mut self, trace: GrowthTrace) -> Self {
        self.growth_trace = trace;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.verdict, Verdict::Constant { .. })
    }

    pub fn constant_value(&self) -> Option<f64> {
        match self.verdict {
            Verdict::Constant { value, .. } => Some(value),
            Verdict::Failure { .. } => None,
        }
    }

    pub fn witness(&self) -> Option<&Witness> {
        match &self.verdict {
            Verdict::Constant { .. } => None,
            Verdict::Failure { witness } => Some(witness),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_shapes() {
        assert_eq!(GrowthTrace::ladder(10), vec![4, 6, 8, 10]);
        assert_eq!(GrowthTrace::ladder(12), vec![3, 6, 9, 12]);
        assert_eq!(GrowthTrace::ladder(8), vec![2, 4, 6, 8]);
        assert_eq!(GrowthTrace::ladder(3), vec![1, 2, 3]);
        assert_eq!(GrowthTrace::ladder(1), vec![1]);
    }

    #[test]
    fn divergence_rule() {
        let t = |vals: &[f64]| GrowthTrace {
            points: vals.iter().enumerate().map(|(i, &v)| (i as u32 + 1, v)).collect(),
        };
        assert!(t(&[2.0, 3.0, 4.0, 5.0]).looks_divergent());
        assert!(t(&[2.0, 2.0, 3.0, 4.0]).looks_divergent());
        assert!(!t(&[2.0, 2.0, 2.0, 2.0]).looks_divergent());
        assert!(!t(&[1.0, 2.0, 3.0, 3.0]).looks_divergent());
        assert!(!t(&[1.0, 1.0, 1.0, 2.0]).looks_divergent());
        assert!(!t(&[1.0, 2.0]).looks_divergent());
    }

    #[test]
    fn report_serializes_with_flat_verdict() {
        let r = CheckReport::constant("ft-constant[synchronous]", 2.0, 8);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["verdict"], "constant");
        assert_eq!(json["value"], 2.0);
        assert_eq!(json["verified_to"], 8);
    }
}
