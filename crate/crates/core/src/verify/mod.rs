//! Residual reports for the entropy, Kato and contraction inequalities
//! evaluated on grid fields.
//!
//! Inequalities that hold exactly for entropy solutions are accepted up to a
//! negative slack tol = C·(Δx + Δt)·|support|. Unless overridden,
//! C = 10·Lip(φ)·M with M the largest |u| stored in the fields.

pub mod contraction;
pub mod doubling;
pub mod synth;
pub mod weak;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use contraction::{
    cone_contraction_profile, finite_speed_gap, global_contraction_check, uniqueness_experiment,
    ConeProfile, ContractionOptions, FiniteSpeedGap, GlobalContraction, PairDistance, ProfileRow,
    UniquenessTable,
};
pub use doubling::{doubling_diagnostics, DoublingOptions, DoublingRow, DoublingTable};
pub use weak::{
    entropy_residual, entropy_sweep, entropy_sweep_with, kato_lhs, sweep_summary, QuadratureRule,
    WeakFormOptions,
};

/// Multiplier of Lip(φ)·M in the default weak-form tolerance.
pub const DEFAULT_TOL_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    EntropyInequality,
    Kato,
    ConeContraction,
    GlobalContraction,
    Uniqueness,
    /// Doubled-variable integrals against their limits.
    Doubling,
}

impl ReportKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ReportKind::EntropyInequality => "entropy_inequality",
            ReportKind::Kato => "kato",
            ReportKind::ConeContraction => "cone_contraction",
            ReportKind::GlobalContraction => "global_contraction",
            ReportKind::Uniqueness => "uniqueness",
            ReportKind::Doubling => "doubling",
        }
    }
}

/// How `value` is compared with `tolerance` to decide `passed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// value ≥ −tolerance (inequality integrals).
    AtLeastNegTol,
    /// value ≤ tolerance (worst monotonicity violation).
    AtMostTol,
    /// value ≥ tolerance (refinement ratios).
    AtLeastTol,
}

impl Criterion {
    pub fn holds(&self, value: f64, tolerance: f64) -> bool {
        match self {
            Criterion::AtLeastNegTol => value >= -tolerance,
            Criterion::AtMostTol => value <= tolerance,
            Criterion::AtLeastTol => value >= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub kind: ReportKind,
    pub value: f64,
    pub tolerance: f64,
    pub criterion: Criterion,
    pub passed: bool,
    pub metadata: BTreeMap<String, Value>,
}

impl ResidualReport {
    pub fn new(kind: ReportKind, value: f64, tolerance: f64, criterion: Criterion) -> Self {
        Self {
            kind,
            value,
            tolerance,
            criterion,
            passed: criterion.holds(value, tolerance),
            metadata: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    /// Forces `passed` to false while keeping the recorded comparison.
    pub fn require(mut self, condition: bool, reason: &str) -> Self {
        if !condition {
            self.passed = false;
            self.metadata
                .insert("failed_condition".into(), Value::from(reason.to_string()));
        }
        self
    }

    /// True iff `passed` is what the stored comparison and conditions give.
    pub fn is_consistent(&self) -> bool {
        let cmp = self.criterion.holds(self.value, self.tolerance);
        let forced = self.metadata.contains_key("failed_condition");
        self.passed == (cmp && !forced)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Float list as a JSON array.
pub(crate) fn json_list(v: &[f64]) -> Value {
    Value::from(v.to_vec())
}
