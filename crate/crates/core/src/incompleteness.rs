//! A countable space that is not sequentially right K-complete, and the
//! objective on it that defeats weak Ekeland.
//!
//! The model is `X = {1/k : k >= 1}` with `d(x, y) = max(x − y, 0)`. Its
//! designated sequence `x_k = 1/k` has `d(x_m, x_n) = 0` for `m > n`, so it
//! is right K-Cauchy, yet `d(x_k, x_n) → 1/k` and it converges nowhere.

use indexmap::IndexMap;
use serde::Serialize;

use crate::error::{Precondition, Result};
use crate::objective::Objective;
use crate::rational::{ExtReal, Rational};
use crate::space::{closure, FiniteQPSpace, PointId};
use crate::variational::{equivalence_witness_on, weak_ekeland, EquivalenceOutcome};

/// A space with points indexed from 1 and an exact distance oracle.
pub trait CountableQPSpace {
    fn label(&self, k: usize) -> String;

    fn distance(&self, m: usize, n: usize) -> Rational;

    /// The subspace on the first `n` points, validated on construction.
    fn truncate(&self, n: usize) -> Result<FiniteQPSpace> {
        let labels = (1..=n).map(|k| self.label(k)).collect();
        let matrix = (1..=n)
            .map(|m| (1..=n).map(|k| self.distance(m, k)).collect())
            .collect();
        FiniteQPSpace::new(labels, matrix)
    }
}

/// `x_k = 1/k` with `d(x, y) = max(x − y, 0)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct HarmonicSpace;

impl HarmonicSpace {
    pub fn value(k: usize) -> Rational {
        Rational::new(1, k as i64)
    }
}

impl CountableQPSpace for HarmonicSpace {
    fn label(&self, k: usize) -> String {
        format!("x{k}")
    }

    /// `1/m − 1/n = (n − m)/(mn)` when `m < n`, else 0.
    fn distance(&self, m: usize, n: usize) -> Rational {
        if m >= n {
            Rational::zero()
        } else {
            Rational::new((n - m) as i64, (m * n) as i64)
        }
    }
}

/// Truncation of [`HarmonicSpace`] at level `n >= 2`.
pub fn demo_space(n: usize) -> Result<FiniteQPSpace> {
    if n < 2 {
        return Err(Precondition::TruncationTooSmall(n).into());
    }
    HarmonicSpace.truncate(n)
}

/// Closed-form proof that `x_k` is not a limit: for `n >= 2k`,
/// `d(x_k, x_n) = 1/k − 1/n >= 1/(2k)`, since the distance increases in `n`
/// and equals `1/(2k)` at `n = 2k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NonConvergenceWitness {
    pub candidate: String,
    pub epsilon: Rational,
    pub tail_start: usize,
    /// `d(x_k, x_{2k})`, from the oracle.
    pub distance_at_tail_start: Rational,
    /// `lim d(x_k, x_n) = 1/k`.
    pub limit_distance: Rational,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeftCauchyCheck {
    pub epsilon: Rational,
    /// `⌈1/ε⌉`; for `cutoff <= n < m`, `d(x_n, x_m) = 1/n − 1/m < 1/n <= ε`.
    pub cutoff: usize,
    pub pairs_checked: usize,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CauchyReport {
    pub n: usize,
    /// `d(x_m, x_n) = 0` for all `n < m <= N`.
    pub right_k_cauchy: bool,
    pub pairs_checked: usize,
    pub witnesses: Vec<NonConvergenceWitness>,
    pub left_k_cauchy: Vec<LeftCauchyCheck>,
}

/// Checks the designated sequence on a truncation: right K-Cauchy pairs
/// exactly, non-convergence through closed-form tail witnesses, and left
/// K-Cauchy cutoffs for a few tolerances.
pub fn verify_cauchy_not_convergent(n: usize) -> Result<CauchyReport> {
    let space = HarmonicSpace;
    if n < 2 {
        return Err(Precondition::TruncationTooSmall(n).into());
    }
    let mut pairs_checked = 0;
    let mut right_k_cauchy = true;
    for m in 1..=n {
        for k in 1..m {
            pairs_checked += 1;
            right_k_cauchy &= space.distance(m, k).is_zero();
        }
    }
    let witnesses = (1..=n)
        .map(|k| {
            let epsilon = Rational::new(1, 2 * k as i64);
            let at_start = space.distance(k, 2 * k);
            let step_positive = (2 * k..2 * k + 4)
                .all(|j| space.distance(k, j + 1) > space.distance(k, j));
            NonConvergenceWitness {
                candidate: space.label(k),
                holds: at_start == epsilon && step_positive,
                epsilon,
                tail_start: 2 * k,
                distance_at_tail_start: at_start,
                limit_distance: HarmonicSpace::value(k),
            }
        })
        .collect();
    let left_k_cauchy = [Rational::new(1, 2), Rational::new(1, 5), Rational::new(1, 10)]
        .into_iter()
        .map(|epsilon| {
            let cutoff = usize::try_from(epsilon.recip().ceil()).expect("small cutoff");
            let mut pairs = 0;
            let mut holds = true;
            for a in cutoff..=n {
                for b in a + 1..=n {
                    pairs += 1;
                    holds &= space.distance(a, b) < epsilon;
                }
            }
            LeftCauchyCheck { epsilon, cutoff, pairs_checked: pairs, holds }
        })
        .collect();
    Ok(CauchyReport { n, right_k_cauchy, pairs_checked, witnesses, left_k_cauchy })
}

/// `φ(x_k) = 2^{1−k}` on `B = {x_k}`; `+∞` off `B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterexampleBundle {
    pub n: usize,
    pub space: FiniteQPSpace,
    pub phi: Objective,
    /// The truncation has no points off `B`, so the `+∞` branch never occurs.
    pub infinite_branch_exercised: bool,
    /// `cl(B) = B` within the truncation.
    pub b_closed: bool,
}

pub fn build_counterexample_phi(n: usize) -> Result<CounterexampleBundle> {
    let space = demo_space(n)?;
    let phi = Objective::new(
        (1..=n)
            .map(|k| ExtReal::Finite(Rational::inv_pow2(k as u32 - 1)))
            .collect(),
    );
    let b = space.full_set();
    let b_closed = closure(&space, &b) == b;
    Ok(CounterexampleBundle { n, space, phi, infinite_branch_exercised: false, b_closed })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainRecord {
    pub k: usize,
    pub phi_next: Rational,
    pub d_next: Rational,
    /// `φ(x_{k+1}) + d(x_{k+1}, x_k)`.
    pub lhs: Rational,
    /// `3/2^{k+1}`.
    pub bound: Rational,
    pub phi_k: Rational,
    pub lhs_within_bound: bool,
    pub bound_below_phi_k: bool,
}

impl ChainRecord {
    pub fn holds(&self) -> bool {
        self.lhs_within_bound && self.bound_below_phi_k
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Reconciliation {
    /// Weak Ekeland point of the truncation, itself a finite complete space.
    pub weak_ekeland_z: String,
    pub z_is_boundary: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RefutationReport {
    pub chain: Vec<ChainRecord>,
    pub chain_holds: bool,
    /// Points shown not to be weak Ekeland points.
    pub refuted: Vec<String>,
    /// The last point, which the truncated chain cannot reach past.
    pub boundary: String,
    pub refuting_map: IndexMap<String, String>,
    /// The refuting map matches `T(x_k) = x_{k+1}`.
    pub map_is_successor: bool,
    pub reconciliation: Reconciliation,
}

/// Runs the chain inequality for every `k < N`, derives the Caristi-refuting
/// selection on `x_1 … x_{N−1}`, and confirms that weak Ekeland on the whole
/// truncation lands on `x_N`.
pub fn refute_weak_ekeland(bundle: &CounterexampleBundle) -> Result<RefutationReport> {
    let n = bundle.n;
    let space = &bundle.space;
    let phi = &bundle.phi;
    let value = |k: usize| phi.value(PointId(k - 1)).finite().cloned().expect("finite on B");
    let chain: Vec<ChainRecord> = (1..n)
        .map(|k| {
            let phi_next = value(k + 1);
            let d_next = space.d(PointId(k), PointId(k - 1)).clone();
            let lhs = &phi_next + &d_next;
            let bound = Rational::from_integer(3) * Rational::inv_pow2(k as u32 + 1);
            let phi_k = value(k);
            ChainRecord {
                k,
                lhs_within_bound: lhs <= bound,
                bound_below_phi_k: bound < phi_k,
                phi_next,
                d_next,
                lhs,
                bound,
                phi_k,
            }
        })
        .collect();
    let chain_holds = chain.iter().all(ChainRecord::holds);

    let view = space.set_of((0..n - 1).map(PointId));
    let EquivalenceOutcome::CaristiRefutation { map, .. } = equivalence_witness_on(space, phi, &view)? else {
        return Err(crate::error::Error::fault("truncated view admits a weak Ekeland point"));
    };
    let map_is_successor = map.pairs.iter().all(|&(x, y)| y.0 == x.0 + 1);
    let refuting_map = map
        .pairs
        .iter()
        .map(|&(x, y)| (space.label(x).to_string(), space.label(y).to_string()))
        .collect();

    let z = weak_ekeland(space, phi)?.z;
    Ok(RefutationReport {
        chain,
        chain_holds,
        refuted: (0..n - 1).map(|i| space.label(PointId(i)).to_string()).collect(),
        boundary: space.label(PointId(n - 1)).to_string(),
        refuting_map,
        map_is_successor,
        reconciliation: Reconciliation {
            weak_ekeland_z: space.label(z).to_string(),
            z_is_boundary: z.0 == n - 1,
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InfiniteBranch {
    pub exercised: bool,
    pub note: &'static str,
}

/// Everything `incomplete-demo` prints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DemoReport {
    pub n: usize,
    pub points: Vec<String>,
    pub space_valid: bool,
    pub cauchy: CauchyReport,
    pub phi: IndexMap<String, ExtReal>,
    pub infinite_branch: InfiniteBranch,
    pub b_closed: bool,
    pub refutation: RefutationReport,
    pub passed: bool,
}

pub fn demo_report(n: usize) -> Result<DemoReport> {
    let cauchy = verify_cauchy_not_convergent(n)?;
    let bundle = build_counterexample_phi(n)?;
    let refutation = refute_weak_ekeland(&bundle)?;
    let space = &bundle.space;
    let space_valid = space.validation().is_valid();
    let passed = space_valid
        && cauchy.right_k_cauchy
        && cauchy.witnesses.iter().all(|w| w.holds)
        && cauchy.left_k_cauchy.iter().all(|c| c.holds)
        && bundle.b_closed
        && refutation.chain_holds
        && refutation.map_is_successor
        && refutation.reconciliation.z_is_boundary;
    Ok(DemoReport {
        n,
        points: space.labels().to_vec(),
        space_valid,
        cauchy,
        phi: space
            .points()
            .map(|p| (space.label(p).to_string(), bundle.phi.value(p).clone()))
            .collect(),
        infinite_branch: InfiniteBranch {
            exercised: false,
            note: "phi is +inf off B, but every point of a truncation lies on B",
        },
        b_closed: bundle.b_closed,
        refutation,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn truncation_distances() {
        let s = demo_space(3).unwrap();
        assert_eq!(*s.d(PointId(0), PointId(1)), q("1/2"));
        assert_eq!(*s.d(PointId(1), PointId(0)), q("0"));
        assert_eq!(*s.d(PointId(0), PointId(2)), q("2/3"));
        assert!(s.validation().is_valid());
        assert!(demo_space(1).is_err());
    }

    #[test]
    fn triangle_brute_force() {
        // Independent of the space validator.
        let h = HarmonicSpace;
        for n in [2, 5, 12] {
            for a in 1..=n {
                for b in 1..=n {
                    for c in 1..=n {
                        assert!(h.distance(a, c) <= h.distance(a, b) + h.distance(b, c));
                    }
                }
            }
        }
    }

    #[test]
    fn phi_values() {
        let b = build_counterexample_phi(3).unwrap();
        let vals: Vec<String> = b.phi.values().iter().map(|v| v.to_string()).collect();
        assert_eq!(vals, ["1", "1/2", "1/4"]);
        assert!(!b.infinite_branch_exercised);
        assert!(b.b_closed);
    }

    #[test]
    fn chain_records() {
        let b = build_counterexample_phi(10).unwrap();
        let r = refute_weak_ekeland(&b).unwrap();
        let k1 = &r.chain[0];
        assert_eq!((k1.lhs.clone(), k1.bound.clone(), k1.phi_k.clone()), (q("1/2"), q("3/4"), q("1")));
        let k5 = &r.chain[4];
        assert_eq!((k5.lhs.clone(), k5.bound.clone(), k5.phi_k.clone()), (q("1/32"), q("3/64"), q("1/16")));
        assert!(r.chain_holds && r.map_is_successor);
        assert_eq!(r.refuting_map["x1"], "x2");
        assert_eq!(r.boundary, "x10");
        assert_eq!(r.reconciliation.weak_ekeland_z, "x10");
    }

    #[test]
    fn witnesses_are_exact() {
        let r = verify_cauchy_not_convergent(4).unwrap();
        assert!(r.right_k_cauchy);
        let w2 = &r.witnesses[1];
        assert_eq!(w2.epsilon, q("1/4"));
        assert_eq!(w2.tail_start, 4);
        assert_eq!(w2.distance_at_tail_start, q("1/4"));
        assert!(r.left_k_cauchy.iter().all(|c| c.holds));
    }

    #[test]
    fn report_passes() {
        let r = demo_report(3).unwrap();
        assert!(r.passed);
        let phi = serde_json::to_string(&r.phi).unwrap();
        assert_eq!(phi, r#"{"x1":"1","x2":"1/2","x3":"1/4"}"#);
    }
}
