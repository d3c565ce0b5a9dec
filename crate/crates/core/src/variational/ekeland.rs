//! Weak and full Ekeland principles on finite spaces.

use super::certificate::{
    trace_record, valued_set, Certificate, Comparison, FullEvidence, InclusionCheck, SplitForm,
    StrictCheck, T1Form, WeakEvidence,
};
use super::picard::{picard_run, ArgminRule, PicardTrace, SelectionRule, Termination};
use super::sset::s_set;
use crate::error::{Error, Precondition, Result};
use crate::objective::{is_d_monotone, Objective};
use crate::rational::{ExtReal, Rational};
use crate::space::{closure, is_closed, FiniteQPSpace, PointId, PointSet};

/// A solver result: the point together with its certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub z: PointId,
    pub certificate: Certificate,
}

/// Finds `z` with `φ` constant on `S(z)`, using the default argmin rule.
pub fn weak_ekeland(space: &FiniteQPSpace, phi: &Objective) -> Result<Solution> {
    weak_ekeland_with(space, phi, &ArgminRule)
}

/// Runs Picard from every point of `dom φ` in index order and returns the
/// first limit whose evidence checks out.
pub fn weak_ekeland_with(
    space: &FiniteQPSpace,
    phi: &Objective,
    rule: &dyn SelectionRule,
) -> Result<Solution> {
    if !phi.is_proper() {
        return Err(Precondition::ImproperObjective.into());
    }
    for x0 in phi.domain().iter() {
        let trace = picard_run(space, phi, x0, rule)?;
        if trace.termination != Termination::ReachedJ {
            continue;
        }
        let z = trace.last();
        let evidence = weak_evidence(space, phi, z, &trace, rule.name());
        if evidence.holds() {
            return Ok(solution(space, z, evidence));
        }
    }
    Err(Error::fault("no Picard limit satisfied the weak Ekeland conclusions"))
}

/// Weak Ekeland from a fixed start.
pub fn weak_ekeland_from(space: &FiniteQPSpace, phi: &Objective, x0: PointId) -> Result<Solution> {
    let trace = picard_run(space, phi, x0, &ArgminRule)?;
    let z = trace.last();
    let evidence = weak_evidence(space, phi, z, &trace, ArgminRule.name());
    if trace.termination != Termination::ReachedJ || !evidence.holds() {
        return Err(Error::fault(format!(
            "Picard limit `{}` from `{}` fails the weak Ekeland conclusions",
            space.label(z),
            space.label(x0)
        )));
    }
    Ok(solution(space, z, evidence))
}

fn solution(space: &FiniteQPSpace, z: PointId, evidence: WeakEvidence) -> Solution {
    Solution {
        z,
        certificate: Certificate::WeakEkeland { z: space.label(z).to_string(), evidence },
    }
}

fn strict(space: &FiniteQPSpace, x: PointId, y: PointId, lhs: ExtReal, rhs: ExtReal) -> StrictCheck {
    let holds = lhs < rhs;
    StrictCheck {
        x: space.label(x).to_string(),
        y: space.label(y).to_string(),
        lhs,
        rhs,
        holds,
    }
}

pub(crate) fn weak_evidence(
    space: &FiniteQPSpace,
    phi: &Objective,
    z: PointId,
    trace: &PicardTrace,
    rule: &str,
) -> WeakEvidence {
    let sz = s_set(space, phi, z);
    let fz = phi.value(z);
    let constancy = sz.members.iter().all(|y| phi.value(y) == fz);

    let mut closure_inclusion = Vec::new();
    let mut strict_outside = Vec::new();
    for y in sz.members.iter() {
        let sy = s_set(space, phi, y).members;
        let cly = closure(space, &space.set_of([y]));
        closure_inclusion.push(InclusionCheck {
            y: space.label(y).to_string(),
            s_y: space.set_labels(&sy),
            closure_y: space.set_labels(&cly),
            holds: sy.is_subset(&cly),
        });
        for x in sy.complement().iter() {
            let rhs = phi.value(x).add_rational(space.d(x, y));
            strict_outside.push(strict(space, x, y, phi.value(y).clone(), rhs));
        }
    }

    let clz = closure(space, &space.set_of([z]));
    let equal_on_s_z: Vec<String> = sz
        .members
        .iter()
        .filter(|&x| phi.value(x) == fz)
        .map(|x| space.label(x).to_string())
        .collect();
    let strict_on_closure_rest: Vec<StrictCheck> = clz
        .difference(&sz.members)
        .iter()
        .map(|x| strict(space, x, z, fz.clone(), phi.value(x).clone()))
        .collect();
    let strict_off_closure: Vec<StrictCheck> = clz
        .complement()
        .iter()
        .map(|x| strict(space, x, z, fz.clone(), phi.value(x).add_rational(space.d(x, z))))
        .collect();
    let split_holds = equal_on_s_z.len() == sz.members.len()
        && strict_on_closure_rest.iter().all(|c| c.holds)
        && strict_off_closure.iter().all(|c| c.holds);

    let t1_form = space.is_t1().then(|| {
        let strict: Vec<StrictCheck> = space
            .points()
            .filter(|&x| x != z)
            .map(|x| strict(space, x, z, fz.clone(), phi.value(x).add_rational(space.d(x, z))))
            .collect();
        let s_z_is_singleton = sz.members == space.set_of([z]);
        let holds = s_z_is_singleton && strict.iter().all(|c| c.holds);
        T1Form { s_z_is_singleton, strict, holds }
    });

    WeakEvidence {
        trace: trace_record(space, phi, trace, rule),
        s_z: valued_set(space, phi, &sz.members),
        j_z: sz.j_value,
        constancy,
        closure_inclusion,
        strict_outside,
        split_form: SplitForm {
            equal_on_s_z,
            strict_on_closure_rest,
            strict_off_closure,
            holds: split_holds,
        },
        t1_form,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FullEkelandParams {
    pub epsilon: Rational,
    pub lambda: Rational,
    pub x0: PointId,
}

impl FullEkelandParams {
    pub fn new(epsilon: Rational, lambda: Rational, x0: PointId) -> Result<Self> {
        if !lambda.is_positive() {
            return Err(Precondition::NonPositive { name: "lambda" }.into());
        }
        if !epsilon.is_positive() {
            return Err(Precondition::NonPositive { name: "epsilon" }.into());
        }
        Ok(FullEkelandParams { epsilon, lambda, x0 })
    }

    /// `γ = ε/λ`.
    pub fn gamma(&self) -> Rational {
        &self.epsilon / &self.lambda
    }
}

/// `X0 = {x : φ(x) <= φ(x0) + γ·d(x0, x)}` in the scaled space.
pub fn x_zero(scaled: &FiniteQPSpace, phi: &Objective, x0: PointId) -> PointSet {
    let f0 = phi.value(x0);
    scaled.set_of(
        scaled
            .points()
            .filter(|&x| phi.value(x) <= &f0.add_rational(scaled.d(x0, x))),
    )
}

/// Full Ekeland principle with parameters `ε, λ` from `x0`.
///
/// Follows the proof: scale by `γ = ε/λ`, check that `X0` is closed and that
/// scaled S-sets of its points stay inside it, then run Picard from `x0`
/// within `X0`. Every conclusion is checked exactly before returning.
pub fn full_ekeland(space: &FiniteQPSpace, phi: &Objective, params: &FullEkelandParams) -> Result<Solution> {
    if !phi.is_proper() {
        return Err(Precondition::ImproperObjective.into());
    }
    let x0 = params.x0;
    let Some(f0) = phi.value(x0).finite().cloned() else {
        return Err(Precondition::OutsideDomain(space.label(x0).to_string()).into());
    };
    let inf = phi.inf().finite().cloned().expect("proper objective has a finite minimum");
    let margin = &params.epsilon + &inf - &f0;
    if margin.is_negative() {
        return Err(Precondition::EkelandGap { gap: -margin }.into());
    }
    if let Some((x, y)) = is_d_monotone(space, phi).witness {
        return Err(Precondition::NotLsc {
            x: space.label(x).to_string(),
            y: space.label(y).to_string(),
        }
        .into());
    }

    let gamma = params.gamma();
    let scaled = space.scaled(&gamma)?;
    let x0_set = x_zero(&scaled, phi, x0);
    let claim_closed = is_closed(&scaled, &x0_set) && x0_set.contains(x0);
    if !claim_closed {
        return Err(Error::fault("X0 is not closed or misses x0"));
    }
    let claim_restricted_s_sets = x0_set.iter().all(|y| {
        let fy = phi.value(y);
        let outside_strict = x0_set
            .complement()
            .iter()
            .all(|x| fy < &phi.value(x).add_rational(scaled.d(x, y)));
        outside_strict && s_set(&scaled, phi, y).members.is_subset(&x0_set)
    });
    if !claim_restricted_s_sets {
        return Err(Error::fault("scaled S-sets of X0 leave X0"));
    }

    let (sub, keep) = scaled.restrict(&x0_set)?;
    let sub_phi = phi.restrict(&keep);
    let sub_x0 = PointId(keep.iter().position(|&p| p == x0).expect("x0 ∈ X0"));
    let trace = picard_run(&sub, &sub_phi, sub_x0, &ArgminRule)?;
    let z = keep[trace.last().0];
    let fz = phi.value(z).clone();

    let conclusion_i = Comparison::le(fz.add_rational(scaled.d(z, x0)), ExtReal::Finite(f0));
    let conclusion_ii = Comparison::le(
        ExtReal::Finite(space.d(z, x0).clone()),
        ExtReal::Finite(params.lambda.clone()),
    );
    let sz = s_set(&scaled, phi, z).members;
    let conclusion_iii = sz.iter().all(|y| *phi.value(y) == fz);
    let conclusion_iv = sz
        .complement()
        .iter()
        .map(|x| strict(&scaled, x, z, fz.clone(), phi.value(x).add_rational(scaled.d(x, z))))
        .collect();

    let evidence = FullEvidence {
        epsilon: params.epsilon.clone(),
        lambda: params.lambda.clone(),
        gamma,
        x0: space.label(x0).to_string(),
        inf_phi: ExtReal::Finite(inf),
        precondition_margin: margin,
        x_zero: space.set_labels(&x0_set),
        claim_closed,
        claim_restricted_s_sets,
        trace: trace_record(&sub, &sub_phi, &trace, ArgminRule.name()),
        conclusion_i,
        conclusion_ii,
        scaled_s_z: valued_set(space, phi, &sz),
        conclusion_iii,
        conclusion_iv,
    };
    if trace.termination != Termination::ReachedJ || !evidence.holds() {
        return Err(Error::fault(format!(
            "full Ekeland conclusions fail at `{}`",
            space.label(z)
        )));
    }
    Ok(Solution {
        z,
        certificate: Certificate::FullEkeland { z: space.label(z).to_string(), evidence },
    })
}
