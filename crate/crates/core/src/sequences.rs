//! Eventually periodic sequences over a finite space.
//!
//! A sequence `pre ++ cycle ++ cycle ++ ...` takes finitely many values, and
//! each cycle value recurs infinitely often. Limits and K-Cauchy properties
//! therefore depend only on the cycle and are decided exactly.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::order::SpecOrder;
use crate::rational::ExtReal;
use crate::space::{FiniteQPSpace, PointId, PointSet};

/// Cap on the number of explicitly listed cycles in a completeness check.
pub const CYCLE_LISTING_LIMIT: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpSequence {
    preperiod: Vec<PointId>,
    cycle: Vec<PointId>,
}

impl EpSequence {
    pub fn new(preperiod: Vec<PointId>, cycle: Vec<PointId>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::Malformed("sequence cycle must be nonempty".into()));
        }
        Ok(EpSequence { preperiod, cycle })
    }

    pub fn constant(x: PointId) -> Self {
        EpSequence { preperiod: Vec::new(), cycle: vec![x] }
    }

    pub fn periodic(cycle: Vec<PointId>) -> Result<Self> {
        Self::new(Vec::new(), cycle)
    }

    /// Parses `pre=[a,b];cycle=[c,d]`; the `pre=` part may be omitted.
    pub fn parse(space: &FiniteQPSpace, text: &str) -> Result<Self> {
        let mut pre = None;
        let mut cycle = None;
        for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, list) = part
                .split_once('=')
                .ok_or_else(|| Error::Malformed(format!("expected key=[...], got `{part}`")))?;
            let inner = list
                .trim()
                .strip_prefix('[')
                .and_then(|l| l.strip_suffix(']'))
                .ok_or_else(|| Error::Malformed(format!("expected bracketed list in `{part}`")))?;
            let points = inner
                .split(',')
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(|l| space.point(l))
                .collect::<Result<Vec<_>>>()?;
            let slot = match key.trim() {
                "pre" => &mut pre,
                "cycle" => &mut cycle,
                other => return Err(Error::Malformed(format!("unknown sequence key `{other}`"))),
            };
            if slot.replace(points).is_some() {
                return Err(Error::Malformed(format!("duplicate key `{}`", key.trim())));
            }
        }
        let cycle = cycle.ok_or_else(|| Error::Malformed("sequence needs cycle=[...]".into()))?;
        Self::new(pre.unwrap_or_default(), cycle)
    }

    pub fn preperiod(&self) -> &[PointId] {
        &self.preperiod
    }

    pub fn cycle(&self) -> &[PointId] {
        &self.cycle
    }

    /// The `k`-th term (0-based).
    pub fn term(&self, k: usize) -> PointId {
        if k < self.preperiod.len() {
            self.preperiod[k]
        } else {
            self.cycle[(k - self.preperiod.len()) % self.cycle.len()]
        }
    }

    /// Values taken infinitely often.
    pub fn cycle_set(&self, space: &FiniteQPSpace) -> PointSet {
        space.set_of(self.cycle.iter().copied())
    }
}

/// `x_n →d x ⇔ d(x, x_n) → 0`, i.e. `d(x, v) = 0` for every cycle value.
pub fn converges_to(space: &FiniteQPSpace, seq: &EpSequence, x: PointId) -> bool {
    seq.cycle.iter().all(|&v| space.is_zero(x, v))
}

pub fn limit_set(space: &FiniteQPSpace, seq: &EpSequence) -> PointSet {
    space.set_of(space.points().filter(|&x| converges_to(space, seq, x)))
}

fn cycle_pairwise_zero(space: &FiniteQPSpace, cycle: &[PointId]) -> bool {
    cycle
        .iter()
        .all(|&u| cycle.iter().all(|&v| space.is_zero(u, v)))
}

/// Right K-Cauchy: `d(x_m, x_n) < ε` eventually for `n < m`. Every ordered
/// pair of cycle values occurs as `(x_m, x_n)` infinitely often, so this
/// holds iff all those distances vanish.
pub fn is_right_k_cauchy(space: &FiniteQPSpace, seq: &EpSequence) -> bool {
    cycle_pairwise_zero(space, &seq.cycle)
}

/// Left K-Cauchy: `d(x_n, x_m) < ε` eventually for `n < m`. Coincides with
/// the right notion on eventually periodic sequences.
pub fn is_left_k_cauchy(space: &FiniteQPSpace, seq: &EpSequence) -> bool {
    cycle_pairwise_zero(space, &seq.cycle)
}

/// `liminf φ(x_n)`: the tail infimum stabilises to the minimum over the cycle.
pub fn liminf_phi(_space: &FiniteQPSpace, seq: &EpSequence, phi: &Objective) -> ExtReal {
    seq.cycle
        .iter()
        .map(|&v| phi.value(v).clone())
        .min()
        .expect("cycle is nonempty")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleWitness {
    pub cycle: Vec<PointId>,
    pub limit: PointId,
}

/// A class of mutually indistinguishable points (`d(u,v) = d(v,u) = 0`).
/// Right K-Cauchy cycles are exactly the nonempty subsets of such classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CauchyClass {
    pub members: Vec<PointId>,
    /// Each member is a limit of every cycle drawn from the class.
    pub members_are_limits: bool,
    /// Every nonempty subset with a limit, when the listing is small enough.
    pub cycles: Option<Vec<CycleWitness>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompletenessCertificate {
    pub passed: bool,
    pub classes: Vec<CauchyClass>,
    pub fully_enumerated: bool,
}

/// Sequential right K-completeness over eventually periodic sequences.
/// Every finite space passes; a failure means an implementation bug.
pub fn right_k_complete_check(space: &FiniteQPSpace) -> CompletenessCertificate {
    let classes = SpecOrder::new(space).classes();
    let total: usize = classes
        .iter()
        .map(|c| if c.len() >= 63 { usize::MAX } else { (1usize << c.len()) - 1 })
        .fold(0usize, usize::saturating_add);
    let enumerate = total <= CYCLE_LISTING_LIMIT;
    let mut passed = true;
    let classes = classes
        .into_iter()
        .map(|members| {
            let class_seq = EpSequence::periodic(members.clone()).expect("class nonempty");
            let members_are_limits = is_right_k_cauchy(space, &class_seq)
                && members.iter().all(|&u| converges_to(space, &class_seq, u));
            passed &= members_are_limits;
            let cycles = enumerate.then(|| {
                (1u64..1u64 << members.len())
                    .map(|mask| {
                        let cycle: Vec<PointId> = members
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| mask & (1 << i) != 0)
                            .map(|(_, &p)| p)
                            .collect();
                        let seq = EpSequence::periodic(cycle.clone()).expect("mask nonzero");
                        let limit = limit_set(space, &seq).first();
                        passed &= is_right_k_cauchy(space, &seq) && limit.is_some();
                        CycleWitness { limit: limit.unwrap_or(cycle[0]), cycle }
                    })
                    .collect()
            });
            CauchyClass { members, members_are_limits, cycles }
        })
        .collect();
    CompletenessCertificate { passed, classes, fully_enumerated: enumerate }
}
