//! Instance-level check of the weak Ekeland / Takahashi / Caristi equivalence.

use indexmap::IndexMap;

use super::caristi::label_map;
use super::certificate::{Branch, Certificate, EquivalenceEvidence, InstanceEquivalence};
use super::ekeland::weak_evidence;
use super::picard::{picard_run, ArgminRule, SelectionRule, Termination};
use super::sset::{s_set, SSetRecord};
use crate::error::{Error, Precondition, Result};
use crate::objective::Objective;
use crate::space::{FiniteQPSpace, PointId, PointSet};

/// A selection `Tx ∈ S(x)` with `φ(Tx) < φ(x)` on every point of a view.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefutingMap {
    pub pairs: Vec<(PointId, PointId)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivalenceOutcome {
    WeakEkeland { z: PointId, certificate: Certificate },
    CaristiRefutation { map: RefutingMap, certificate: Certificate },
}

/// The three statements evaluated independently with `x` ranging over `view`.
pub fn instance_equivalence(space: &FiniteQPSpace, phi: &Objective, view: &PointSet) -> InstanceEquivalence {
    let records: Vec<(PointId, SSetRecord)> = view.iter().map(|x| (x, s_set(space, phi, x))).collect();
    let wek_holds = records.iter().any(|(z, s)| {
        phi.value(*z).is_finite() && s.members.iter().all(|y| phi.value(y) == phi.value(*z))
    });
    let not_tak_config = records.iter().all(|(x, s)| *phi.value(*x) > s.j_value);
    let refuting_selection_exists = greedy_selection(phi, &records).is_some();
    InstanceEquivalence { wek_holds, not_tak_config, refuting_selection_exists }
}

/// `Tx = y_x`: the lowest-index `y ∈ S(x)` with `φ(y) < φ(x)`.
fn greedy_selection(phi: &Objective, records: &[(PointId, SSetRecord)]) -> Option<RefutingMap> {
    records
        .iter()
        .map(|(x, s)| {
            let fx = phi.value(*x);
            s.members.iter().find(|&y| phi.value(y) < fx).map(|y| (*x, y))
        })
        .collect::<Option<Vec<_>>>()
        .map(|pairs| RefutingMap { pairs })
}

/// On a finite space the weak Ekeland branch always applies; anything else
/// is a fault.
pub fn equivalence_witness(space: &FiniteQPSpace, phi: &Objective) -> Result<EquivalenceOutcome> {
    let out = equivalence_witness_on(space, phi, &space.full_set())?;
    match out {
        EquivalenceOutcome::WeakEkeland { .. } => Ok(out),
        EquivalenceOutcome::CaristiRefutation { .. } => {
            Err(Error::fault("finite space produced a Caristi-refuting selection"))
        }
    }
}

/// Equivalence witness with points restricted to `view`. Picard runs start in
/// the view and their limits must land there; otherwise the greedy refuting
/// selection is returned.
pub fn equivalence_witness_on(
    space: &FiniteQPSpace,
    phi: &Objective,
    view: &PointSet,
) -> Result<EquivalenceOutcome> {
    if !phi.is_proper() {
        return Err(Precondition::ImproperObjective.into());
    }
    let instance = instance_equivalence(space, phi, view);
    if !instance.consistent() {
        return Err(Error::fault(format!("equivalence fails on this instance: {instance:?}")));
    }
    for x0 in view.intersection(&phi.domain()).iter() {
        let trace = picard_run(space, phi, x0, &ArgminRule)?;
        let z = trace.last();
        if trace.termination != Termination::ReachedJ || !view.contains(z) {
            continue;
        }
        let weak = weak_evidence(space, phi, z, &trace, ArgminRule.name());
        if weak.holds() {
            let certificate = Certificate::Equivalence {
                z: Some(space.label(z).to_string()),
                evidence: EquivalenceEvidence {
                    branch: Branch::WeakEkeland,
                    weak: Some(weak),
                    refuting_map: None,
                    instance,
                },
            };
            return Ok(EquivalenceOutcome::WeakEkeland { z, certificate });
        }
    }
    let records: Vec<(PointId, SSetRecord)> = view.iter().map(|x| (x, s_set(space, phi, x))).collect();
    let Some(map) = greedy_selection(phi, &records) else {
        return Err(Error::fault("neither a weak Ekeland point nor a refuting selection exists"));
    };
    let refuting: IndexMap<String, String> = label_map(space, &map.pairs);
    let certificate = Certificate::Equivalence {
        z: None,
        evidence: EquivalenceEvidence {
            branch: Branch::CaristiRefutation,
            weak: None,
            refuting_map: Some(refuting),
            instance,
        },
    };
    Ok(EquivalenceOutcome::CaristiRefutation { map, certificate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::fixtures::phi;
    use crate::space::fixtures::*;

    #[test]
    fn finite_spaces_take_weak_branch() {
        for (s, f) in [
            (e1(), phi(&["1", "0"])),
            (e2(), phi(&["0", "1"])),
            (e3(), phi(&["0", "2", "4"])),
            (one_point(), phi(&["3"])),
        ] {
            let out = equivalence_witness(&s, &f).unwrap();
            assert!(matches!(out, EquivalenceOutcome::WeakEkeland { .. }));
            let inst = instance_equivalence(&s, &f, &s.full_set());
            assert!(inst.wek_holds && !inst.not_tak_config && !inst.refuting_selection_exists);
        }
    }

    #[test]
    fn view_without_limit_is_refuted() {
        // d(later, earlier) = 0, so S(x) contains every later point.
        let s = space(
            &["a", "b", "c"],
            &[&["0", "1", "2"], &["0", "0", "1"], &["0", "0", "0"]],
        );
        let f = phi(&["1", "1/2", "1/4"]);
        let view = s.set_of([PointId(0), PointId(1)]);
        let out = equivalence_witness_on(&s, &f, &view).unwrap();
        let EquivalenceOutcome::CaristiRefutation { map, .. } = out else { panic!() };
        assert_eq!(map.pairs, vec![(PointId(0), PointId(1)), (PointId(1), PointId(2))]);
    }
}
