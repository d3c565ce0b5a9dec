//! Extended-real objectives `φ: X → Q ∪ {+∞}` and their semicontinuity.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::order::spec_leq;
use crate::rational::ExtReal;
use crate::space::{FiniteQPSpace, PointId, PointSet};

/// A total map from the points of a space to `Q ∪ {+∞}`, indexed by
/// [`PointId`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Objective {
    values: Vec<ExtReal>,
}

impl Objective {
    pub fn new(values: Vec<ExtReal>) -> Self {
        Objective { values }
    }

    pub fn constant(n: usize, value: ExtReal) -> Self {
        Objective { values: vec![value; n] }
    }

    /// Builds from a label map, which must cover exactly the space's points.
    pub fn from_labels(space: &FiniteQPSpace, map: &IndexMap<String, ExtReal>) -> Result<Self> {
        for label in map.keys() {
            space.point(label)?;
        }
        let values = space
            .labels()
            .iter()
            .map(|l| {
                map.get(l)
                    .cloned()
                    .ok_or_else(|| Error::Malformed(format!("phi has no value for `{l}`")))
            })
            .collect::<Result<_>>()?;
        Ok(Objective { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, x: PointId) -> &ExtReal {
        &self.values[x.0]
    }

    pub fn values(&self) -> &[ExtReal] {
        &self.values
    }

    pub fn is_proper(&self) -> bool {
        self.values.iter().any(ExtReal::is_finite)
    }

    /// `dom φ = {x : φ(x) < ∞}`.
    pub fn domain(&self) -> PointSet {
        PointSet::from_points(
            self.len(),
            (0..self.len()).map(PointId).filter(|&p| self.value(p).is_finite()),
        )
    }

    /// Minimum over all points; `+∞` iff improper.
    pub fn inf(&self) -> ExtReal {
        self.values.iter().min().cloned().unwrap_or(ExtReal::PlusInfinity)
    }

    /// Points attaining [`Objective::inf`]. For an improper objective that is
    /// every point.
    pub fn argmin_set(&self) -> PointSet {
        let m = self.inf();
        PointSet::from_points(
            self.len(),
            (0..self.len()).map(PointId).filter(|&p| *self.value(p) == m),
        )
    }

    /// Restriction along an index map produced by [`FiniteQPSpace::restrict`].
    pub fn restrict(&self, keep: &[PointId]) -> Objective {
        Objective { values: keep.iter().map(|&p| self.value(p).clone()).collect() }
    }
}

pub fn is_proper(phi: &Objective) -> bool {
    phi.is_proper()
}

pub fn inf_phi(phi: &Objective) -> ExtReal {
    phi.inf()
}

pub fn argmin_set(phi: &Objective) -> PointSet {
    phi.argmin_set()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotonicityCheck {
    pub monotone: bool,
    /// First pair with `x <=_d y` and `φ(x) > φ(y)`.
    pub witness: Option<(PointId, PointId)>,
}

/// Exhaustive check of `x <=_d y ⇒ φ(x) <= φ(y)`.
pub fn is_d_monotone(space: &FiniteQPSpace, phi: &Objective) -> MonotonicityCheck {
    let witness = space.points().find_map(|x| {
        space
            .points()
            .find(|&y| spec_leq(space, x, y) && phi.value(x) > phi.value(y))
            .map(|y| (x, y))
    });
    MonotonicityCheck { monotone: witness.is_none(), witness }
}

/// Lower semicontinuity. On a finite space near-lsc is vacuous, so lsc
/// reduces to d-monotonicity.
pub fn is_lsc(space: &FiniteQPSpace, phi: &Objective) -> bool {
    is_nearly_lsc(space, phi).holds && is_d_monotone(space, phi).monotone
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NearLscCertificate {
    pub holds: bool,
    pub reason: &'static str,
}

/// Near lower semicontinuity on a finite space: always true, because no
/// sequence with pairwise distinct terms exists.
pub fn is_nearly_lsc(_space: &FiniteQPSpace, _phi: &Objective) -> NearLscCertificate {
    NearLscCertificate {
        holds: true,
        reason: "no distinct-term sequences in a finite space",
    }
}

/// Largest lsc minorant: `φ̃(x) = min{φ(y) : x <=_d y}`.
pub fn lsc_envelope(space: &FiniteQPSpace, phi: &Objective) -> Objective {
    Objective::new(
        space
            .points()
            .map(|x| {
                space
                    .points()
                    .filter(|&y| spec_leq(space, x, y))
                    .map(|y| phi.value(y).clone())
                    .min()
                    .expect("x <=_d x")
            })
            .collect(),
    )
}

/// JSON shape of an objective file: `{ "phi": { label: value } }`.
#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveFile {
    pub phi: IndexMap<String, ExtReal>,
}

impl ObjectiveFile {
    pub fn into_objective(self, space: &FiniteQPSpace) -> Result<Objective> {
        Objective::from_labels(space, &self.phi)
    }

    pub fn from_objective(space: &FiniteQPSpace, phi: &Objective) -> Self {
        ObjectiveFile {
            phi: space
                .points()
                .map(|p| (space.label(p).to_string(), phi.value(p).clone()))
                .collect(),
        }
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn phi(values: &[&str]) -> Objective {
        Objective::new(values.iter().map(|s| s.parse().unwrap()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::phi;
    use super::*;
    use crate::space::fixtures::*;

    const A: PointId = PointId(0);
    const B: PointId = PointId(1);

    #[test]
    fn inf_and_argmin() {
        let f = phi(&["0", "1"]);
        assert!(f.is_proper());
        assert_eq!(f.inf(), "0".parse().unwrap());
        assert_eq!(f.argmin_set(), PointSet::from_points(2, [A]));

        let improper = phi(&["inf", "inf"]);
        assert!(!improper.is_proper());
        assert_eq!(improper.inf(), ExtReal::PlusInfinity);
        assert_eq!(improper.argmin_set(), PointSet::full(2));

        let c = phi(&["5", "5", "5"]);
        assert_eq!(c.argmin_set(), PointSet::full(3));
    }

    #[test]
    fn monotonicity() {
        let s = e1();
        assert!(is_d_monotone(&s, &phi(&["0", "1"])).monotone);
        let bad = is_d_monotone(&s, &phi(&["1", "0"]));
        assert!(!bad.monotone);
        assert_eq!(bad.witness, Some((A, B)));
        assert!(is_d_monotone(&e2(), &phi(&["7", "0"])).monotone);
    }

    #[test]
    fn lsc_versus_nearly_lsc() {
        let s = e1();
        assert!(is_lsc(&s, &phi(&["0", "1"])));
        let f = phi(&["1", "0"]);
        assert!(!is_lsc(&s, &f));
        assert!(is_nearly_lsc(&s, &f).holds);
        assert!(is_lsc(&s, &phi(&["3", "3"])));
        assert!(is_lsc(&e2(), &phi(&["1", "0"])));
        assert!(is_lsc(&pseudo(), &phi(&["inf", "inf"])));
        assert!(!is_lsc(&pseudo(), &phi(&["1", "inf"])));
    }

    #[test]
    fn envelope_is_lsc_minorant() {
        let s = e1();
        let f = phi(&["1", "0"]);
        let g = lsc_envelope(&s, &f);
        assert_eq!(g, phi(&["0", "0"]));
        assert!(is_lsc(&s, &g));
        let lsc = phi(&["0", "1"]);
        assert_eq!(lsc_envelope(&s, &lsc), lsc);
    }

    #[test]
    fn file_roundtrip_and_totality() {
        let s = e1();
        let file: ObjectiveFile = serde_json::from_str(r#"{"phi":{"a":"1/2","b":"inf"}}"#).unwrap();
        let f = file.into_objective(&s).unwrap();
        assert_eq!(f, phi(&["1/2", "inf"]));
        let partial: ObjectiveFile = serde_json::from_str(r#"{"phi":{"a":"1"}}"#).unwrap();
        assert!(partial.into_objective(&s).is_err());
        let stray: ObjectiveFile = serde_json::from_str(r#"{"phi":{"a":"1","b":"0","c":"2"}}"#).unwrap();
        assert!(matches!(stray.into_objective(&s), Err(Error::UnknownPoint(_))));
    }
}
