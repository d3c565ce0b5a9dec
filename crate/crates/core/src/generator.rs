//! Seeded random instances: a quasi-pseudometric space and an objective.
//!
//! Matrices are drawn entrywise and then repaired into QM2 by min-plus
//! transitive closure, which keeps the diagonal at zero and preserves
//! asymmetry and zero entries.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::objective::Objective;
use crate::rational::{ExtReal, Rational};
use crate::space::FiniteQPSpace;

const DENOMINATORS: [i64; 8] = [1, 2, 3, 4, 5, 6, 7, 10];
const ZERO_DENSITIES: [f64; 3] = [0.0, 0.15, 0.4];
const INF_DENSITIES: [f64; 3] = [0.0, 0.0, 0.25];

/// Knobs for [`random_instance_with`]. `None` fields are drawn per instance.
#[derive(Clone, Debug, Default)]
pub struct GeneratorParams {
    pub zero_density: Option<f64>,
    pub inf_density: Option<f64>,
    pub symmetric: Option<bool>,
}

pub(crate) fn random_rational(rng: &mut impl Rng, max_num: i64) -> Rational {
    let den = *DENOMINATORS.choose(rng).expect("nonempty");
    Rational::new(rng.gen_range(0..=max_num), den)
}

pub(crate) fn random_positive(rng: &mut impl Rng, max_num: i64) -> Rational {
    let den = *DENOMINATORS.choose(rng).expect("nonempty");
    Rational::new(rng.gen_range(1..=max_num), den)
}

/// Floyd–Warshall over `(min, +)`. The result satisfies the triangle
/// inequality and is entrywise no larger than the input.
pub fn min_plus_closure(mut m: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    let n = m.len();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = &m[i][k] + &m[k][j];
                if via < m[i][j] {
                    m[i][j] = via;
                }
            }
        }
    }
    m
}

/// Deterministic instance for `seed` with `1 <= n <= max_n` points.
pub fn random_instance(seed: u64, max_n: usize) -> (FiniteQPSpace, Objective) {
    random_instance_with(seed, max_n, &GeneratorParams::default())
}

pub fn random_instance_with(seed: u64, max_n: usize, params: &GeneratorParams) -> (FiniteQPSpace, Objective) {
    assert!(max_n >= 1, "max_n must be at least 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_n);
    let zero_density = params
        .zero_density
        .unwrap_or_else(|| *ZERO_DENSITIES.choose(&mut rng).expect("nonempty"));
    let inf_density = params
        .inf_density
        .unwrap_or_else(|| *INF_DENSITIES.choose(&mut rng).expect("nonempty"));
    let symmetric = params.symmetric.unwrap_or_else(|| rng.gen_bool(0.2));

    let mut m = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j || (symmetric && j < i) {
                continue;
            }
            m[i][j] = if rng.gen_bool(zero_density) {
                Rational::zero()
            } else {
                random_positive(&mut rng, 12)
            };
            if symmetric {
                m[j][i] = m[i][j].clone();
            }
        }
    }
    let space = FiniteQPSpace::unlabeled(min_plus_closure(m)).expect("closure repairs QM2");

    let mut values: Vec<ExtReal> = (0..n)
        .map(|_| {
            if rng.gen_bool(inf_density) {
                ExtReal::PlusInfinity
            } else {
                ExtReal::Finite(random_rational(&mut rng, 12))
            }
        })
        .collect();
    if values.iter().all(|v| !v.is_finite()) {
        let k = rng.gen_range(0..n);
        values[k] = ExtReal::Finite(random_rational(&mut rng, 12));
    }
    (space, Objective::new(values))
}

/// Seed of the `index`-th instance of a run, by a SplitMix64 step.
pub fn instance_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{validate_space, SpaceFile};
    use proptest::prelude::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn repair_fixes_triangle() {
        let bad = vec![
            vec![q("0"), q("1"), q("5")],
            vec![q("1"), q("0"), q("1")],
            vec![q("1"), q("1"), q("0")],
        ];
        assert!(!validate_space(&bad).unwrap().qm2_ok);
        let fixed = min_plus_closure(bad);
        assert!(validate_space(&fixed).unwrap().qm2_ok);
        assert_eq!(fixed[0][2], q("2"));
    }

    #[test]
    fn single_point_instances() {
        for seed in 0..20 {
            let (s, f) = random_instance(seed, 1);
            assert_eq!(s.len(), 1);
            assert!(f.is_proper());
        }
    }

    #[test]
    fn forced_symmetry() {
        let params = GeneratorParams { symmetric: Some(true), ..Default::default() };
        for seed in 0..30 {
            assert!(random_instance_with(seed, 6, &params).0.is_symmetric());
        }
    }

    proptest! {
        #[test]
        fn deterministic_and_valid(seed in any::<u64>(), max_n in 1usize..9) {
            let (s1, f1) = random_instance(seed, max_n);
            let (s2, f2) = random_instance(seed, max_n);
            prop_assert_eq!(
                serde_json::to_string(&SpaceFile::from(&s1)).unwrap(),
                serde_json::to_string(&SpaceFile::from(&s2)).unwrap()
            );
            prop_assert_eq!(&f1, &f2);
            prop_assert!(s1.len() <= max_n);
            prop_assert!(s1.validation().is_valid());
            prop_assert!(f1.is_proper());
        }

        #[test]
        fn closure_is_idempotent(seed in any::<u64>()) {
            let (s, _) = random_instance(seed, 6);
            prop_assert_eq!(min_plus_closure(s.matrix()), s.matrix());
        }
    }
}
