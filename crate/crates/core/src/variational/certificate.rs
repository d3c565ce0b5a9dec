//! Serializable evidence bundles emitted by the principle solvers.
//!
//! Certificates refer to points by label so they can be checked against the
//! space and objective files alone; see [`crate::verify`].

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::picard::{PicardTrace, Termination};
use crate::objective::Objective;
use crate::rational::{ExtReal, Rational};
use crate::space::{FiniteQPSpace, PointId, PointSet};

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(tag = "principle", rename_all = "kebab-case")]
pub enum Certificate {
    WeakEkeland { z: String, evidence: WeakEvidence },
    FullEkeland { z: String, evidence: FullEvidence },
    Takahashi { z: Option<String>, evidence: TakahashiEvidence },
    Caristi { z: String, evidence: CaristiEvidence },
    Equivalence { z: Option<String>, evidence: EquivalenceEvidence },
}

impl Certificate {
    pub fn principle(&self) -> &'static str {
        match self {
            Certificate::WeakEkeland { .. } => "weak-ekeland",
            Certificate::FullEkeland { .. } => "full-ekeland",
            Certificate::Takahashi { .. } => "takahashi",
            Certificate::Caristi { .. } => "caristi",
            Certificate::Equivalence { .. } => "equivalence",
        }
    }

    pub fn z(&self) -> Option<&str> {
        match self {
            Certificate::WeakEkeland { z, .. }
            | Certificate::FullEkeland { z, .. }
            | Certificate::Caristi { z, .. } => Some(z),
            Certificate::Takahashi { z, .. } | Certificate::Equivalence { z, .. } => z.as_deref(),
        }
    }
}

/// A point with its objective value.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct Valued {
    pub point: String,
    pub phi: ExtReal,
}

/// A recorded strict inequality `lhs < rhs` between values attached to `x`
/// and the anchor `y`.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct StrictCheck {
    pub x: String,
    pub y: String,
    pub lhs: ExtReal,
    pub rhs: ExtReal,
    pub holds: bool,
}

/// A recorded non-strict inequality `lhs <= rhs`.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct Comparison {
    pub lhs: ExtReal,
    pub rhs: ExtReal,
    pub holds: bool,
}

impl Comparison {
    pub fn le(lhs: ExtReal, rhs: ExtReal) -> Self {
        let holds = lhs <= rhs;
        Comparison { lhs, rhs, holds }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct TraceRecord {
    pub rule: String,
    pub iterates: Vec<Valued>,
    pub j_values: Vec<ExtReal>,
    pub termination: Termination,
}

/// `S(y) ⊆ cl{y}` for one `y`.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct InclusionCheck {
    pub y: String,
    pub s_y: Vec<String>,
    pub closure_y: Vec<String>,
    pub holds: bool,
}

/// The weak-Ekeland conclusions rewritten around `cl{z}`.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct SplitForm {
    /// `φ(z) = φ(x)` for `x ∈ S(z)`.
    pub equal_on_s_z: Vec<String>,
    /// `φ(z) < φ(x)` for `x ∈ cl{z} \ S(z)`.
    pub strict_on_closure_rest: Vec<StrictCheck>,
    /// `φ(z) < φ(x) + d(x, z)` for `x ∉ cl{z}`.
    pub strict_off_closure: Vec<StrictCheck>,
    pub holds: bool,
}

/// The T1 form: `S(z) = {z}` and `φ(z) < φ(x) + d(x, z)` for every `x != z`.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct T1Form {
    pub s_z_is_singleton: bool,
    pub strict: Vec<StrictCheck>,
    pub holds: bool,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct WeakEvidence {
    pub trace: TraceRecord,
    pub s_z: Vec<Valued>,
    pub j_z: ExtReal,
    /// `φ(y) = φ(z)` for all `y ∈ S(z)`.
    pub constancy: bool,
    pub closure_inclusion: Vec<InclusionCheck>,
    /// `φ(y) < φ(x) + d(x, y)` for `y ∈ S(z)` and `x ∉ S(y)`.
    pub strict_outside: Vec<StrictCheck>,
    pub split_form: SplitForm,
    pub t1_form: Option<T1Form>,
}

impl WeakEvidence {
    pub fn holds(&self) -> bool {
        self.constancy
            && self.closure_inclusion.iter().all(|c| c.holds)
            && self.strict_outside.iter().all(|c| c.holds)
            && self.split_form.holds
            && self.t1_form.as_ref().is_none_or(|t| t.holds)
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct FullEvidence {
    pub epsilon: Rational,
    pub lambda: Rational,
    pub gamma: Rational,
    pub x0: String,
    pub inf_phi: ExtReal,
    /// `ε + inf φ − φ(x0) >= 0`.
    pub precondition_margin: Rational,
    /// `X0 = {x : φ(x) <= φ(x0) + γ·d(x0, x)}`.
    pub x_zero: Vec<String>,
    pub claim_closed: bool,
    pub claim_restricted_s_sets: bool,
    pub trace: TraceRecord,
    /// `φ(z) + γ·d(z, x0) <= φ(x0)`.
    pub conclusion_i: Comparison,
    /// `d(z, x0) <= λ`.
    pub conclusion_ii: Comparison,
    /// The scaled set `S_γ(z)`.
    pub scaled_s_z: Vec<Valued>,
    pub conclusion_iii: bool,
    /// `φ(z) < φ(x) + γ·d(x, z)` for `x ∉ S_γ(z)`.
    pub conclusion_iv: Vec<StrictCheck>,
}

impl FullEvidence {
    pub fn holds(&self) -> bool {
        !self.precondition_margin.is_negative()
            && self.claim_closed
            && self.claim_restricted_s_sets
            && self.conclusion_i.holds
            && self.conclusion_ii.holds
            && self.conclusion_iii
            && self.conclusion_iv.iter().all(|c| c.holds)
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct HypothesisRecord {
    pub x: String,
    pub phi: ExtReal,
    pub above_inf: bool,
    /// Lowest-index `y ∈ S(x)` with `φ(y) < φ(x)`.
    pub descent: Option<String>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct CorollaryRecord {
    pub x: String,
    /// Lowest-index `y ∈ S(x) \ cl{x}`.
    pub witness: Option<String>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct TakahashiEvidence {
    pub inf_phi: ExtReal,
    pub hypothesis: Vec<HypothesisRecord>,
    pub hypothesis_holds: bool,
    /// First point where the hypothesis fails.
    pub witness: Option<String>,
    pub corollary: Vec<CorollaryRecord>,
    pub corollary_holds: bool,
    /// Each corollary witness `y` of `x` has `φ(y) < φ(x)`.
    pub corollary_implies_hypothesis: bool,
    pub trace: Option<TraceRecord>,
    pub argmin: Vec<String>,
    pub z_in_argmin: Option<bool>,
}

/// Map file: `{ label: label }` or `{ label: [labels] }`.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(untagged)]
pub enum MapEntry {
    One(String),
    Many(Vec<String>),
}

pub type MapFile = IndexMap<String, MapEntry>;

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct PremiseRecord {
    pub x: String,
    /// A point of `S(x) ∩ T(x)`.
    pub chosen: String,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct ValueEqualPoint {
    pub point: String,
    pub fixed: bool,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct CaristiEvidence {
    pub map: MapFile,
    pub set_valued: bool,
    pub premise: Vec<PremiseRecord>,
    pub s_z: Vec<Valued>,
    pub phi_z: ExtReal,
    pub phi_tz: Vec<ExtReal>,
    /// `φ(Tz) = φ(z)`, or `φ(z) ∈ φ(Tz)` for a set-valued map.
    pub value_equality: bool,
    pub t1: bool,
    /// `Tz = z`, or `z ∈ Tz`.
    pub fixed_point: bool,
    pub value_equal_points: Vec<ValueEqualPoint>,
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    WeakEkeland,
    CaristiRefutation,
}

/// The three statements of the equivalence theorem evaluated on one
/// instance, each by its own route.
#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
pub struct InstanceEquivalence {
    /// `∃z ∀y∈S(z): φ(y) = φ(z)`.
    pub wek_holds: bool,
    /// `∀x: φ(x) > J(x)`, the configuration under which Takahashi fails.
    pub not_tak_config: bool,
    /// Greedy `Tx = y_x` with `Tx ∈ S(x)` and `φ(Tx) < φ(x)` succeeds for all x.
    pub refuting_selection_exists: bool,
}

impl InstanceEquivalence {
    pub fn consistent(&self) -> bool {
        self.wek_holds != self.not_tak_config && self.wek_holds != self.refuting_selection_exists
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceEvidence {
    pub branch: Branch,
    pub weak: Option<WeakEvidence>,
    pub refuting_map: Option<IndexMap<String, String>>,
    pub instance: InstanceEquivalence,
}

// Conversions from engine values to label-based records.

pub(crate) fn valued(space: &FiniteQPSpace, phi: &Objective, p: PointId) -> Valued {
    Valued { point: space.label(p).to_string(), phi: phi.value(p).clone() }
}

pub(crate) fn valued_set(space: &FiniteQPSpace, phi: &Objective, set: &PointSet) -> Vec<Valued> {
    set.iter().map(|p| valued(space, phi, p)).collect()
}

pub(crate) fn trace_record(
    space: &FiniteQPSpace,
    phi: &Objective,
    trace: &PicardTrace,
    rule: &str,
) -> TraceRecord {
    TraceRecord {
        rule: rule.to_string(),
        iterates: trace.iterates.iter().map(|&p| valued(space, phi, p)).collect(),
        j_values: trace.j_values.clone(),
        termination: trace.termination,
    }
}
