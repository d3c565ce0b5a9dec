//! The specialization preorder `x <=_d y ⇔ d(x, y) = 0` and the sets built
//! from it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{is_open, FiniteQPSpace, PointId, PointSet};

/// Largest space for which the open-set family is enumerated.
pub const ENUMERATION_LIMIT: usize = 12;

pub fn spec_leq(space: &FiniteQPSpace, x: PointId, y: PointId) -> bool {
    space.is_zero(x, y)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderClass {
    Preorder,
    PartialOrder,
    Equality,
}

/// The relation `leq[i][j] ⇔ d(x_i, x_j) = 0` as a boolean matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecOrder {
    n: usize,
    leq: Vec<bool>,
}

impl SpecOrder {
    pub fn new(space: &FiniteQPSpace) -> Self {
        let n = space.len();
        let mut leq = Vec::with_capacity(n * n);
        for x in space.points() {
            for y in space.points() {
                leq.push(spec_leq(space, x, y));
            }
        }
        SpecOrder { n, leq }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn leq(&self, x: PointId, y: PointId) -> bool {
        self.leq[x.0 * self.n + y.0]
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.n).all(|i| self.leq(PointId(i), PointId(i)))
    }

    pub fn is_transitive(&self) -> bool {
        let ids = || (0..self.n).map(PointId);
        ids().all(|x| {
            ids().all(|y| !self.leq(x, y) || ids().all(|z| !self.leq(y, z) || self.leq(x, z)))
        })
    }

    pub fn is_antisymmetric(&self) -> bool {
        let ids = || (0..self.n).map(PointId);
        ids().all(|x| ids().all(|y| x == y || !(self.leq(x, y) && self.leq(y, x))))
    }

    pub fn is_equality(&self) -> bool {
        let ids = || (0..self.n).map(PointId);
        ids().all(|x| ids().all(|y| self.leq(x, y) == (x == y)))
    }

    /// Classes of mutually related points, in order of their first member.
    pub fn classes(&self) -> Vec<Vec<PointId>> {
        let mut class_of: Vec<Option<usize>> = vec![None; self.n];
        let mut classes: Vec<Vec<PointId>> = Vec::new();
        for i in 0..self.n {
            if class_of[i].is_some() {
                continue;
            }
            let id = classes.len();
            let members: Vec<PointId> = (i..self.n)
                .map(PointId)
                .filter(|&j| self.leq(PointId(i), j) && self.leq(j, PointId(i)))
                .collect();
            for m in &members {
                class_of[m.0] = Some(id);
            }
            classes.push(members);
        }
        classes
    }

    /// Covering pairs `(lower, upper)` between classes of the quotient
    /// partial order.
    pub fn hasse(&self) -> Hasse {
        let classes = self.classes();
        let rep: Vec<PointId> = classes.iter().map(|c| c[0]).collect();
        let k = classes.len();
        let lt = |a: usize, b: usize| a != b && self.leq(rep[a], rep[b]);
        let mut covers = Vec::new();
        for a in 0..k {
            for b in 0..k {
                if lt(a, b) && !(0..k).any(|c| lt(a, c) && lt(c, b)) {
                    covers.push((a, b));
                }
            }
        }
        Hasse { classes, covers }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hasse {
    pub classes: Vec<Vec<PointId>>,
    /// Indices into `classes`.
    pub covers: Vec<(usize, usize)>,
}

/// Classifies `<=_d` directly from the relation.
pub fn order_class(space: &FiniteQPSpace) -> OrderClass {
    let order = SpecOrder::new(space);
    if order.is_equality() {
        OrderClass::Equality
    } else if order.is_antisymmetric() {
        OrderClass::PartialOrder
    } else {
        OrderClass::Preorder
    }
}

/// `↑A = {y : ∃x∈A, x <= y}`.
pub fn up_set(space: &FiniteQPSpace, a: &PointSet) -> PointSet {
    space.set_of(space.points().filter(|&y| a.iter().any(|x| spec_leq(space, x, y))))
}

/// `↓A = {y : ∃x∈A, y <= x}`.
pub fn down_set(space: &FiniteQPSpace, a: &PointSet) -> PointSet {
    space.set_of(space.points().filter(|&y| a.iter().any(|x| spec_leq(space, y, x))))
}

/// Intersection of all open supersets of `A`, computed as `↑A`.
pub fn saturation(space: &FiniteQPSpace, a: &PointSet) -> PointSet {
    up_set(space, a)
}

/// Every open subset of the space, by enumeration. Only for
/// `n <= ENUMERATION_LIMIT`.
pub fn open_sets(space: &FiniteQPSpace) -> Result<Vec<PointSet>> {
    let n = space.len();
    if n > ENUMERATION_LIMIT {
        return Err(Error::Malformed(format!(
            "open-set enumeration limited to {ENUMERATION_LIMIT} points, space has {n}"
        )));
    }
    Ok((0..1u64 << n)
        .map(|mask| PointSet::from_mask(n, mask))
        .filter(|s| is_open(space, s))
        .collect())
}

/// Saturation as the literal intersection over a precomputed open family.
pub fn saturation_in_family(family: &[PointSet], a: &PointSet) -> PointSet {
    family
        .iter()
        .filter(|u| a.is_subset(u))
        .fold(PointSet::full(a.universe()), |acc, u| acc.intersection(u))
}

/// Saturation by direct enumeration of the open sets.
pub fn saturation_by_enumeration(space: &FiniteQPSpace, a: &PointSet) -> Result<PointSet> {
    Ok(saturation_in_family(&open_sets(space)?, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::fixtures::*;
    use crate::space::{closure, is_closed};

    const A: PointId = PointId(0);
    const B: PointId = PointId(1);

    #[test]
    fn leq_on_e1() {
        let s = e1();
        assert!(spec_leq(&s, A, B));
        assert!(!spec_leq(&s, B, A));
        assert!(spec_leq(&s, B, B));
    }

    #[test]
    fn classes_of_examples() {
        assert_eq!(order_class(&e1()), OrderClass::PartialOrder);
        assert_eq!(order_class(&e2()), OrderClass::Equality);
        assert_eq!(order_class(&pseudo()), OrderClass::Preorder);
        assert_eq!(order_class(&one_point()), OrderClass::Equality);
    }

    #[test]
    fn up_and_down_sets() {
        let s = e1();
        assert_eq!(down_set(&s, &s.set_of([B])), s.set_of([A, B]));
        assert_eq!(down_set(&s, &s.set_of([B])), closure(&s, &s.set_of([B])));
        assert_eq!(up_set(&s, &s.set_of([A])), s.set_of([A, B]));
        assert_eq!(up_set(&s, &s.full_set()), s.full_set());
    }

    #[test]
    fn saturation_paths_agree() {
        for s in [e1(), e2(), e3(), pseudo(), one_point()] {
            let family = open_sets(&s).unwrap();
            for mask in 0..(1u64 << s.len()) {
                let a = PointSet::from_mask(s.len(), mask);
                assert_eq!(saturation(&s, &a), saturation_in_family(&family, &a));
                if is_open(&s, &a) {
                    assert_eq!(up_set(&s, &a), a);
                }
                if is_closed(&s, &a) {
                    assert_eq!(down_set(&s, &a), a);
                }
            }
        }
        let s = e1();
        assert_eq!(saturation(&s, &s.set_of([A])), s.set_of([A, B]));
        let t1 = e2();
        assert_eq!(saturation(&t1, &t1.set_of([A])), t1.set_of([A]));
    }

    #[test]
    fn hasse_of_e3_and_pseudo() {
        // e3 has no zero off-diagonal entry: every point is its own class, no covers.
        let h = SpecOrder::new(&e3()).hasse();
        assert_eq!(h.classes.len(), 3);
        assert!(h.covers.is_empty());
        let h = SpecOrder::new(&e1()).hasse();
        assert_eq!(h.covers, vec![(0, 1)]);
        let h = SpecOrder::new(&pseudo()).hasse();
        assert_eq!(h.classes, vec![vec![A, B]]);
    }

    #[test]
    fn enumeration_limit() {
        let n = ENUMERATION_LIMIT + 1;
        let m = vec![vec![crate::rational::Rational::zero(); n]; n];
        let s = FiniteQPSpace::unlabeled(m).unwrap();
        assert!(open_sets(&s).is_err());
    }
}
