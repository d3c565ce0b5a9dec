//! Caristi fixed-point principle, single- and set-valued.

use indexmap::IndexMap;

use super::certificate::{
    valued_set, CaristiEvidence, Certificate, MapEntry, MapFile, PremiseRecord, ValueEqualPoint,
};
use super::ekeland::{weak_ekeland, Solution};
use super::sset::{in_s_set, s_set};
use crate::error::{Error, Precondition, Result};
use crate::objective::Objective;
use crate::space::{FiniteQPSpace, PointId, PointSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CaristiMap {
    Single(Vec<PointId>),
    Multi(Vec<PointSet>),
}

impl CaristiMap {
    pub fn identity(space: &FiniteQPSpace) -> Self {
        CaristiMap::Single(space.points().collect())
    }

    /// Reads a map file. All entries single-valued gives [`CaristiMap::Single`];
    /// any list entry makes the whole map set-valued.
    pub fn from_file(space: &FiniteQPSpace, file: &MapFile) -> Result<Self> {
        let mut sets: Vec<Option<PointSet>> = vec![None; space.len()];
        let mut multi = false;
        for (key, entry) in file {
            let x = space.point(key)?;
            let set = match entry {
                MapEntry::One(l) => space.set_of([space.point(l)?]),
                MapEntry::Many(ls) => {
                    multi = true;
                    space.set_from_labels(ls)?
                }
            };
            if set.is_empty() {
                return Err(Precondition::IncompleteMap(key.clone()).into());
            }
            sets[x.0] = Some(set);
        }
        let sets = sets
            .into_iter()
            .enumerate()
            .map(|(i, s)| s.ok_or_else(|| Precondition::IncompleteMap(space.label(PointId(i)).to_string())))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(if multi {
            CaristiMap::Multi(sets)
        } else {
            CaristiMap::Single(sets.iter().map(|s| s.first().expect("nonempty")).collect())
        })
    }

    pub fn to_file(&self, space: &FiniteQPSpace) -> MapFile {
        space
            .points()
            .map(|x| {
                let entry = match self {
                    CaristiMap::Single(t) => MapEntry::One(space.label(t[x.0]).to_string()),
                    CaristiMap::Multi(t) => MapEntry::Many(space.set_labels(&t[x.0])),
                };
                (space.label(x).to_string(), entry)
            })
            .collect()
    }

    pub fn image(&self, space: &FiniteQPSpace, x: PointId) -> PointSet {
        match self {
            CaristiMap::Single(t) => space.set_of([t[x.0]]),
            CaristiMap::Multi(t) => t[x.0].clone(),
        }
    }

    pub fn is_set_valued(&self) -> bool {
        matches!(self, CaristiMap::Multi(_))
    }

    fn len(&self) -> usize {
        match self {
            CaristiMap::Single(t) => t.len(),
            CaristiMap::Multi(t) => t.len(),
        }
    }
}

/// Validates `S(x) ∩ T(x) ≠ ∅` at every point, returning the lowest-index
/// point of the intersection for each `x`.
pub fn check_premise(space: &FiniteQPSpace, phi: &Objective, map: &CaristiMap) -> Result<Vec<PointId>> {
    if map.len() != space.len() {
        return Err(Error::Malformed(format!(
            "map has {} entries for {} points",
            map.len(),
            space.len()
        )));
    }
    space
        .points()
        .map(|x| {
            map.image(space, x)
                .iter()
                .find(|&y| in_s_set(space, phi, x, y))
                .ok_or_else(|| Precondition::CaristiPremise(space.label(x).to_string()).into())
        })
        .collect()
}

/// Finds `z` with `φ(Tz) = φ(z)` (or `φ(z) ∈ φ(Tz)`), a fixed point when the
/// space is T1.
pub fn caristi(space: &FiniteQPSpace, phi: &Objective, map: &CaristiMap) -> Result<Solution> {
    if !phi.is_proper() {
        return Err(Precondition::ImproperObjective.into());
    }
    let chosen = check_premise(space, phi, map)?;
    let z = weak_ekeland(space, phi)?.z;
    let fz = phi.value(z).clone();
    let tz = map.image(space, z);
    let phi_tz: Vec<_> = tz.iter().map(|y| phi.value(y).clone()).collect();
    let value_equality = match map {
        CaristiMap::Single(_) => phi_tz[0] == fz,
        CaristiMap::Multi(_) => phi_tz.contains(&fz),
    };
    let t1 = space.is_t1();
    let fixed_point = tz.contains(z);
    if !value_equality || (t1 && !fixed_point) {
        return Err(Error::fault(format!(
            "weak Ekeland point `{}` fails the Caristi conclusion",
            space.label(z)
        )));
    }
    let value_equal_points = space
        .points()
        .filter(|&x| {
            let fx = phi.value(x);
            let img = map.image(space, x);
            match map {
                CaristiMap::Single(_) => img.iter().all(|y| phi.value(y) == fx),
                CaristiMap::Multi(_) => img.iter().any(|y| phi.value(y) == fx),
            }
        })
        .map(|x| ValueEqualPoint {
            point: space.label(x).to_string(),
            fixed: map.image(space, x).contains(x),
        })
        .collect();
    let evidence = CaristiEvidence {
        map: map.to_file(space),
        set_valued: map.is_set_valued(),
        premise: space
            .points()
            .map(|x| PremiseRecord {
                x: space.label(x).to_string(),
                chosen: space.label(chosen[x.0]).to_string(),
            })
            .collect(),
        s_z: valued_set(space, phi, &s_set(space, phi, z).members),
        phi_z: fz,
        phi_tz,
        value_equality,
        t1,
        fixed_point,
        value_equal_points,
    };
    Ok(Solution {
        z,
        certificate: Certificate::Caristi { z: space.label(z).to_string(), evidence },
    })
}

/// Label-keyed single-valued map, used for refuting selections.
pub(crate) fn label_map(space: &FiniteQPSpace, pairs: &[(PointId, PointId)]) -> IndexMap<String, String> {
    pairs
        .iter()
        .map(|&(x, y)| (space.label(x).to_string(), space.label(y).to_string()))
        .collect()
}
