//! Takahashi's minimization principle and its closure-based corollary.

use super::certificate::{trace_record, Certificate, CorollaryRecord, HypothesisRecord, TakahashiEvidence};
use super::ekeland::Solution;
use super::picard::{picard_run, ArgminRule, SelectionRule, Termination};
use super::sset::{s_set, s_set_outside_closure};
use crate::error::{Error, Precondition, Result};
use crate::objective::Objective;
use crate::space::{FiniteQPSpace, PointId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TakahashiOutcome {
    Minimizer(Solution),
    /// Some `x` with `φ(x) > inf φ` has no `y ∈ S(x)` with `φ(y) < φ(x)`.
    HypothesisViolated { witness: PointId, certificate: Certificate },
}

/// Checks the hypothesis pointwise and, when it holds, reaches a minimizer by
/// a Picard run rather than by scanning for the argmin.
pub fn takahashi(space: &FiniteQPSpace, phi: &Objective) -> Result<TakahashiOutcome> {
    if !phi.is_proper() {
        return Err(Precondition::ImproperObjective.into());
    }
    let inf = phi.inf();
    let mut hypothesis = Vec::new();
    let mut witness = None;
    for x in space.points() {
        let fx = phi.value(x);
        let above_inf = *fx > inf;
        let sx = s_set(space, phi, x);
        let descent = sx.members.iter().find(|&y| phi.value(y) < fx);
        if above_inf && descent.is_none() && witness.is_none() {
            witness = Some(x);
        }
        hypothesis.push(HypothesisRecord {
            x: space.label(x).to_string(),
            phi: fx.clone(),
            above_inf,
            descent: descent.map(|y| space.label(y).to_string()),
        });
    }

    let mut corollary = Vec::new();
    let mut corollary_holds = true;
    let mut corollary_implies_hypothesis = true;
    for x in space.points() {
        let w = s_set_outside_closure(space, phi, x).first();
        if *phi.value(x) > inf && w.is_none() {
            corollary_holds = false;
        }
        // With phi(x) infinite, S(x) is everything and any dom point descends.
        if let (Some(y), true) = (w, phi.value(x).is_finite()) {
            corollary_implies_hypothesis &= phi.value(y) < phi.value(x);
        }
        corollary.push(CorollaryRecord {
            x: space.label(x).to_string(),
            witness: w.map(|y| space.label(y).to_string()),
        });
    }

    let argmin = phi.argmin_set();
    let mut evidence = TakahashiEvidence {
        inf_phi: inf.clone(),
        hypothesis,
        hypothesis_holds: witness.is_none(),
        witness: witness.map(|w| space.label(w).to_string()),
        corollary,
        corollary_holds,
        corollary_implies_hypothesis,
        trace: None,
        argmin: space.set_labels(&argmin),
        z_in_argmin: None,
    };
    if !corollary_implies_hypothesis {
        return Err(Error::fault("a point of S(x) outside cl{x} does not lower phi"));
    }
    if let Some(w) = witness {
        return Ok(TakahashiOutcome::HypothesisViolated {
            witness: w,
            certificate: Certificate::Takahashi { z: None, evidence },
        });
    }

    let x0 = phi.domain().first().expect("proper objective");
    let trace = picard_run(space, phi, x0, &ArgminRule)?;
    let z = trace.last();
    let in_argmin = argmin.contains(z);
    evidence.trace = Some(trace_record(space, phi, &trace, ArgminRule.name()));
    evidence.z_in_argmin = Some(in_argmin);
    if trace.termination != Termination::ReachedJ || !in_argmin {
        return Err(Error::fault(format!(
            "Picard limit `{}` is not a minimizer although the hypothesis holds",
            space.label(z)
        )));
    }
    Ok(TakahashiOutcome::Minimizer(Solution {
        z,
        certificate: Certificate::Takahashi { z: Some(space.label(z).to_string()), evidence },
    }))
}
