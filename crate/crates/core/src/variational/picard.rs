//! Picard sequences `x_{k+1} ∈ S(x_k)` with the half-gap descent
//! `φ(x_{k+1}) < (φ(x_k) + J(x_k)) / 2`.

use serde::{Deserialize, Serialize};

use super::sset::{s_set, SSetRecord};
use crate::error::{Error, Precondition, Result};
use crate::objective::Objective;
use crate::rational::{ExtReal, Rational};
use crate::space::{FiniteQPSpace, PointId};

/// Chooses the next iterate from `S(x_k)`. Returning `None` stops the run
/// with [`Termination::SelectionExhausted`].
pub trait SelectionRule {
    fn name(&self) -> &'static str;
    fn select(&self, space: &FiniteQPSpace, phi: &Objective, current: &SSetRecord) -> Option<PointId>;
}

/// Argmin of `φ` over `S(x)`, ties to the lowest index. Attains `J(x)`, so the
/// half-gap holds whenever `φ(x) > J(x)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ArgminRule;

impl SelectionRule for ArgminRule {
    fn name(&self) -> &'static str {
        "argmin"
    }

    fn select(&self, _space: &FiniteQPSpace, phi: &Objective, current: &SSetRecord) -> Option<PointId> {
        current.members.iter().find(|&y| *phi.value(y) == current.j_value)
    }
}

/// Lowest-index member satisfying the half-gap. Produces longer traces than
/// [`ArgminRule`].
#[derive(Clone, Copy, Debug, Default)]
pub struct FirstHalfGapRule;

impl SelectionRule for FirstHalfGapRule {
    fn name(&self) -> &'static str {
        "first-half-gap"
    }

    fn select(&self, _space: &FiniteQPSpace, phi: &Objective, current: &SSetRecord) -> Option<PointId> {
        let fx = phi.value(current.base).finite()?;
        let j = current.j_value.finite()?;
        current.members.iter().find(|&y| {
            phi.value(y)
                .finite()
                .is_some_and(|fy| satisfies_half_gap(fy, fx, j))
        })
    }
}

/// Lowest-index member with `φ(y) < φ(x)`. Ignores the half-gap, so the
/// engine rejects it whenever it undershoots the required descent.
#[derive(Clone, Copy, Debug, Default)]
pub struct FirstDescentRule;

impl SelectionRule for FirstDescentRule {
    fn name(&self) -> &'static str {
        "first-descent"
    }

    fn select(&self, _space: &FiniteQPSpace, phi: &Objective, current: &SSetRecord) -> Option<PointId> {
        let fx = phi.value(current.base);
        current.members.iter().find(|&y| phi.value(y) < fx)
    }
}

/// `2·φ(y) < φ(x) + J(x)`.
pub fn satisfies_half_gap(phi_y: &Rational, phi_x: &Rational, j_x: &Rational) -> bool {
    phi_y + phi_y < phi_x + j_x
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    /// `φ(x_m) = J(x_m)`.
    ReachedJ,
    SelectionExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PicardTrace {
    pub iterates: Vec<PointId>,
    pub phi_values: Vec<ExtReal>,
    pub j_values: Vec<ExtReal>,
    /// `φ` at the last iterate; the limit value on a finite run.
    pub alpha: ExtReal,
    pub termination: Termination,
}

impl PicardTrace {
    pub fn start(&self) -> PointId {
        self.iterates[0]
    }

    pub fn last(&self) -> PointId {
        *self.iterates.last().expect("trace is nonempty")
    }

    pub fn steps(&self) -> usize {
        self.iterates.len() - 1
    }
}

/// Runs the Picard iteration from `x0` until `φ(x_m) = J(x_m)`.
///
/// The selected point must lie in `S(x_k)` and satisfy the strict half-gap;
/// a rule that breaks either is reported as [`Error::Fault`]. On a finite
/// space `φ` strictly decreases over finitely many values, so at most `|X|`
/// iterates occur.
pub fn picard_run(
    space: &FiniteQPSpace,
    phi: &Objective,
    x0: PointId,
    rule: &dyn SelectionRule,
) -> Result<PicardTrace> {
    run(space, phi, x0, rule, true)
}

/// [`picard_run`] without the half-gap contract. Only the mutation harness
/// uses this.
pub(crate) fn picard_run_unchecked(
    space: &FiniteQPSpace,
    phi: &Objective,
    x0: PointId,
    rule: &dyn SelectionRule,
) -> Result<PicardTrace> {
    run(space, phi, x0, rule, false)
}

fn run(
    space: &FiniteQPSpace,
    phi: &Objective,
    x0: PointId,
    rule: &dyn SelectionRule,
    enforce_half_gap: bool,
) -> Result<PicardTrace> {
    if !phi.is_proper() {
        return Err(Precondition::ImproperObjective.into());
    }
    if !phi.value(x0).is_finite() {
        return Err(Precondition::OutsideDomain(space.label(x0).to_string()).into());
    }
    let mut iterates = vec![x0];
    let mut phi_values = Vec::new();
    let mut j_values = Vec::new();
    let mut current = x0;
    loop {
        let record = s_set(space, phi, current);
        let fx = phi.value(current).clone();
        phi_values.push(fx.clone());
        j_values.push(record.j_value.clone());
        if !record.has_descent(phi) {
            return Ok(PicardTrace {
                iterates,
                phi_values,
                j_values,
                alpha: fx,
                termination: Termination::ReachedJ,
            });
        }
        if iterates.len() > space.len() {
            return Err(Error::fault(format!(
                "Picard run from `{}` exceeded {} iterates",
                space.label(x0),
                space.len()
            )));
        }
        let Some(next) = rule.select(space, phi, &record) else {
            return Ok(PicardTrace {
                iterates,
                phi_values,
                j_values,
                alpha: fx,
                termination: Termination::SelectionExhausted,
            });
        };
        if !record.contains(next) {
            return Err(Error::fault(format!(
                "rule `{}` selected `{}` outside S(`{}`)",
                rule.name(),
                space.label(next),
                space.label(current)
            )));
        }
        if enforce_half_gap {
            let gap_ok = match (phi.value(next).finite(), fx.finite(), record.j_value.finite()) {
                (Some(fy), Some(fx), Some(j)) => satisfies_half_gap(fy, fx, j),
                _ => false,
            };
            if !gap_ok {
                return Err(Error::fault(format!(
                    "rule `{}` selected `{}` from `{}` without the half-gap descent",
                    rule.name(),
                    space.label(next),
                    space.label(current)
                )));
            }
        }
        iterates.push(next);
        current = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::fixtures::phi;
    use crate::space::fixtures::*;

    const A: PointId = PointId(0);
    const B: PointId = PointId(1);
    const C: PointId = PointId(2);

    #[test]
    fn e1_from_b() {
        let t = picard_run(&e1(), &phi(&["0", "1"]), B, &ArgminRule).unwrap();
        assert_eq!(t.iterates, vec![B, A]);
        assert_eq!(t.termination, Termination::ReachedJ);
        assert_eq!(t.alpha, "0".parse().unwrap());
    }

    #[test]
    fn already_at_j() {
        let t = picard_run(&e1(), &phi(&["0", "1"]), A, &ArgminRule).unwrap();
        assert_eq!(t.iterates, vec![A]);
        assert_eq!(t.steps(), 0);
    }

    #[test]
    fn e3_argmin_from_c() {
        let s = e3();
        let f = phi(&["0", "2", "4"]);
        let t = picard_run(&s, &f, C, &ArgminRule).unwrap();
        assert_eq!(t.iterates, vec![C, A]);
        assert_eq!(s_set(&s, &f, A).members, s.set_of([A]));
        // b has φ = 2, not below (4 + 0)/2.
        let t = picard_run(&s, &f, C, &FirstHalfGapRule).unwrap();
        assert_eq!(t.iterates, vec![C, A]);
    }

    #[test]
    fn half_gap_is_enforced() {
        let s = space(
            &["p", "q", "r"],
            &[&["0", "0", "0"], &["0", "0", "0"], &["0", "0", "0"]],
        );
        let f = phi(&["3", "0", "4"]);
        // From r, J = 0 and φ(p) = 3 is not below (4 + 0)/2.
        let err = picard_run(&s, &f, C, &FirstDescentRule).unwrap_err();
        assert!(matches!(err, Error::Fault(_)));
        let t = picard_run_unchecked(&s, &f, C, &FirstDescentRule).unwrap();
        assert_eq!(t.iterates, vec![C, A, B]);
        let t = picard_run(&s, &f, C, &FirstHalfGapRule).unwrap();
        assert_eq!(t.iterates, vec![C, B]);
    }

    struct Rogue;
    impl SelectionRule for Rogue {
        fn name(&self) -> &'static str {
            "rogue"
        }
        fn select(&self, _: &FiniteQPSpace, _: &Objective, _: &SSetRecord) -> Option<PointId> {
            Some(PointId(1))
        }
    }

    struct Lazy;
    impl SelectionRule for Lazy {
        fn name(&self) -> &'static str {
            "lazy"
        }
        fn select(&self, _: &FiniteQPSpace, _: &Objective, _: &SSetRecord) -> Option<PointId> {
            None
        }
    }

    #[test]
    fn contract_breach_and_exhaustion() {
        // S(a) = {a} in e2 with φ = (0, 1); from b the rogue rule picks b
        // itself, which is in S(b) but not a descent.
        let s = e2();
        let f = phi(&["0", "1"]);
        assert!(matches!(picard_run(&s, &f, B, &Rogue), Err(Error::Fault(_))));
        // From c in e3 with φ = (0, 4, 4): S(c) = {a, c}, so b is outside.
        let s = e3();
        let f = phi(&["0", "4", "4"]);
        assert!(matches!(picard_run(&s, &f, C, &Rogue), Err(Error::Fault(_))));
        let t = picard_run(&e1(), &phi(&["0", "1"]), B, &Lazy).unwrap();
        assert_eq!(t.termination, Termination::SelectionExhausted);
    }

    #[test]
    fn preconditions() {
        let s = e1();
        assert!(matches!(
            picard_run(&s, &phi(&["inf", "inf"]), A, &ArgminRule),
            Err(Error::Precondition(Precondition::ImproperObjective))
        ));
        assert!(matches!(
            picard_run(&s, &phi(&["inf", "0"]), A, &ArgminRule),
            Err(Error::Precondition(Precondition::OutsideDomain(_)))
        ));
    }
}
