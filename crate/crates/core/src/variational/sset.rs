use crate::objective::Objective;
use crate::rational::ExtReal;
use crate::space::{closure, FiniteQPSpace, PointId, PointSet};

/// `S(x) = {y : φ(y) + d(y, x) <= φ(x)}` together with `J(x) = inf φ(S(x))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SSetRecord {
    pub base: PointId,
    pub members: PointSet,
    pub j_value: ExtReal,
    /// `φ(x) = ∞`, in which case `S(x) = X`.
    pub unbounded_base: bool,
}

impl SSetRecord {
    pub fn contains(&self, y: PointId) -> bool {
        self.members.contains(y)
    }

    /// `φ(x) > J(x)`.
    pub fn has_descent(&self, phi: &Objective) -> bool {
        *phi.value(self.base) > self.j_value
    }
}

/// Whether `y ∈ S(x)`.
pub fn in_s_set(space: &FiniteQPSpace, phi: &Objective, x: PointId, y: PointId) -> bool {
    match phi.value(x) {
        ExtReal::PlusInfinity => true,
        fx => &phi.value(y).add_rational(space.d(y, x)) <= fx,
    }
}

pub fn s_set(space: &FiniteQPSpace, phi: &Objective, x: PointId) -> SSetRecord {
    let members = space.set_of(space.points().filter(|&y| in_s_set(space, phi, x, y)));
    let j_value = members
        .iter()
        .map(|y| phi.value(y).clone())
        .min()
        .expect("x ∈ S(x)");
    SSetRecord {
        base: x,
        members,
        j_value,
        unbounded_base: !phi.value(x).is_finite(),
    }
}

/// `J(x)`.
pub fn j_value(space: &FiniteQPSpace, phi: &Objective, x: PointId) -> ExtReal {
    s_set(space, phi, x).j_value
}

/// `S(x) \ cl{x}`; nonempty only when `x` admits a strict descent.
pub fn s_set_outside_closure(space: &FiniteQPSpace, phi: &Objective, x: PointId) -> PointSet {
    let cl = closure(space, &space.set_of([x]));
    s_set(space, phi, x).members.difference(&cl)
}

/// The preorder `x ⪯ y ⇔ φ(y) + d(y, x) <= φ(x)`, so `S(x) = {y : x ⪯ y}`.
pub fn precedes(space: &FiniteQPSpace, phi: &Objective, x: PointId, y: PointId) -> bool {
    &phi.value(y).add_rational(space.d(y, x)) <= phi.value(x)
}
