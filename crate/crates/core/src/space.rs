//! Finite quasi-pseudometric spaces.
//!
//! A space is a list of distinct labels plus a dense matrix `d[i][j]` of
//! nonnegative rationals with a zero diagonal that satisfies the triangle
//! inequality. Symmetry is not required.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Precondition, Result};
use crate::rational::Rational;

/// Index of a point inside its space.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointId(pub usize);

impl PointId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A subset of the points of a space with a fixed universe size.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PointSet {
    words: Vec<u64>,
    universe: usize,
}

impl PointSet {
    pub fn empty(universe: usize) -> Self {
        PointSet {
            words: vec![0; universe.div_ceil(64)],
            universe,
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = PointSet::empty(universe);
        for i in 0..universe {
            s.insert(PointId(i));
        }
        s
    }

    pub fn singleton(universe: usize, x: PointId) -> Self {
        let mut s = PointSet::empty(universe);
        s.insert(x);
        s
    }

    pub fn from_points(universe: usize, points: impl IntoIterator<Item = PointId>) -> Self {
        let mut s = PointSet::empty(universe);
        for p in points {
            s.insert(p);
        }
        s
    }

    /// Subset whose members are the set bits of `mask` (universe ≤ 64).
    pub fn from_mask(universe: usize, mask: u64) -> Self {
        assert!(universe <= 64);
        let mut s = PointSet::empty(universe);
        if universe > 0 {
            let keep = if universe == 64 { u64::MAX } else { (1u64 << universe) - 1 };
            s.words[0] = mask & keep;
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn insert(&mut self, x: PointId) {
        assert!(x.0 < self.universe, "point {x} outside universe {}", self.universe);
        self.words[x.0 / 64] |= 1 << (x.0 % 64);
    }

    pub fn remove(&mut self, x: PointId) {
        if x.0 < self.universe {
            self.words[x.0 / 64] &= !(1 << (x.0 % 64));
        }
    }

    pub fn contains(&self, x: PointId) -> bool {
        x.0 < self.universe && self.words[x.0 / 64] & (1 << (x.0 % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = PointId> + '_ {
        (0..self.universe).map(PointId).filter(move |&p| self.contains(p))
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &PointSet) -> PointSet {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> PointSet {
        PointSet::full(self.universe).difference(self)
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn first(&self) -> Option<PointId> {
        self.iter().next()
    }

    fn zip_with(&self, other: &PointSet, f: impl Fn(u64, u64) -> u64) -> PointSet {
        assert_eq!(self.universe, other.universe, "point sets of different spaces");
        PointSet {
            words: self.words.iter().zip(&other.words).map(|(&a, &b)| f(a, b)).collect(),
            universe: self.universe,
        }
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|p| p.0)).finish()
    }
}

/// A validated finite quasi-pseudometric space.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteQPSpace {
    labels: Vec<String>,
    dist: Vec<Rational>,
    zero: Vec<bool>,
}

/// Outcome of checking a candidate matrix against the axioms.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ValidationReport {
    pub qm1_ok: bool,
    /// First diagonal index with `d[i][i] != 0`.
    pub qm1_violation: Option<usize>,
    pub qm2_ok: bool,
    /// First `(i, j, k)` with `d[i][k] > d[i][j] + d[j][k]`.
    pub qm2_violation: Option<(usize, usize, usize)>,
    pub qm3_ok: bool,
    /// First `i != j` with `d[i][j] = d[j][i] = 0`.
    pub qm3_violation: Option<(usize, usize)>,
    pub t1_ok: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.qm1_ok && self.qm2_ok
    }
}

fn check_shape(matrix: &[Vec<Rational>]) -> Result<usize> {
    let n = matrix.len();
    if n == 0 {
        return Err(Error::EmptySpace);
    }
    for (row, entries) in matrix.iter().enumerate() {
        if entries.len() != n {
            return Err(Error::NotSquare { row, len: entries.len(), expected: n });
        }
        if let Some(col) = entries.iter().position(Rational::is_negative) {
            return Err(Error::NegativeEntry { row, col });
        }
    }
    Ok(n)
}

/// First `(i, j, k)` with `d[i][k] > d[i][j] + d[j][k]`. The entries are
/// rescaled to integers over a common denominator, in `i128` when they fit.
fn triangle_violation(n: usize, matrix: &[Vec<Rational>]) -> Option<(usize, usize, usize)> {
    if let Some(m) = scaled_i128(matrix) {
        return first_violation(n, &m, |a, b| a + b);
    }
    let lcm = matrix.iter().flatten().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let scaled: Vec<BigInt> = matrix.iter().flatten().map(|q| q.numer() * (&lcm / q.denom())).collect();
    first_violation(n, &scaled, |a, b| a + b)
}

/// Sums of two entries must not overflow, hence the bound.
fn scaled_i128(matrix: &[Vec<Rational>]) -> Option<Vec<i128>> {
    const LIMIT: i128 = 1 << 125;
    let mut lcm: i128 = 1;
    for q in matrix.iter().flatten() {
        let d = q.denom().to_i128()?;
        lcm = (lcm / lcm.gcd(&d)).checked_mul(d)?;
        if lcm >= LIMIT {
            return None;
        }
    }
    matrix
        .iter()
        .flatten()
        .map(|q| {
            let v = q.numer().to_i128()?.checked_mul(lcm / q.denom().to_i128()?)?;
            (v < LIMIT).then_some(v)
        })
        .collect()
}

fn first_violation<T: PartialOrd>(n: usize, m: &[T], add: impl Fn(&T, &T) -> T) -> Option<(usize, usize, usize)> {
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if m[i * n + k] > add(&m[i * n + j], &m[j * n + k]) {
                    return Some((i, j, k));
                }
            }
        }
    }
    None
}

/// Checks QM1, QM2, QM3 and the T1 condition on a candidate matrix.
pub fn validate_space(matrix: &[Vec<Rational>]) -> Result<ValidationReport> {
    let n = check_shape(matrix)?;
    let qm1_violation = (0..n).find(|&i| !matrix[i][i].is_zero());
    let qm2_violation = triangle_violation(n, matrix);
    let mut qm3_violation = None;
    let mut t1_ok = true;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if matrix[i][j].is_zero() {
                t1_ok = false;
                if matrix[j][i].is_zero() && qm3_violation.is_none() {
                    qm3_violation = Some((i, j));
                }
            }
        }
    }
    Ok(ValidationReport {
        qm1_ok: qm1_violation.is_none(),
        qm1_violation,
        qm2_ok: qm2_violation.is_none(),
        qm2_violation,
        qm3_ok: qm3_violation.is_none(),
        qm3_violation,
        t1_ok,
    })
}

impl FiniteQPSpace {
    /// Builds a space, rejecting duplicate labels and matrices that fail QM1
    /// or QM2.
    pub fn new(labels: Vec<String>, matrix: Vec<Vec<Rational>>) -> Result<Self> {
        let report = validate_space(&matrix)?;
        if labels.len() != matrix.len() {
            return Err(Error::Malformed(format!(
                "{} labels for a {}x{} matrix",
                labels.len(),
                matrix.len(),
                matrix.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        if let Some(i) = report.qm1_violation {
            return Err(Error::InvalidSpace(format!(
                "QM1 fails: d({0},{0}) = {1}",
                labels[i], matrix[i][i]
            )));
        }
        if let Some((i, j, k)) = report.qm2_violation {
            return Err(Error::InvalidSpace(format!(
                "QM2 fails at ({}, {}, {}): {} > {} + {}",
                labels[i], labels[j], labels[k], matrix[i][k], matrix[i][j], matrix[j][k]
            )));
        }
        Ok(Self::from_valid(labels, matrix))
    }

    /// Builds a space with generated labels `p0, p1, ...`.
    pub fn unlabeled(matrix: Vec<Vec<Rational>>) -> Result<Self> {
        let labels = (0..matrix.len()).map(|i| format!("p{i}")).collect();
        Self::new(labels, matrix)
    }

    fn from_valid(labels: Vec<String>, matrix: Vec<Vec<Rational>>) -> Self {
        let dist: Vec<Rational> = matrix.into_iter().flatten().collect();
        let zero = dist.iter().map(Rational::is_zero).collect();
        FiniteQPSpace { labels, dist, zero }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: PointId) -> &str {
        &self.labels[x.0]
    }

    pub fn index_of(&self, label: &str) -> Option<PointId> {
        self.labels.iter().position(|l| l == label).map(PointId)
    }

    pub fn point(&self, label: &str) -> Result<PointId> {
        self.index_of(label).ok_or_else(|| Error::UnknownPoint(label.to_string()))
    }

    pub fn points(&self) -> impl Iterator<Item = PointId> {
        (0..self.len()).map(PointId)
    }

    /// `d(x, y)`.
    pub fn d(&self, x: PointId, y: PointId) -> &Rational {
        &self.dist[x.0 * self.len() + y.0]
    }

    /// `d(x, y) == 0`, i.e. `x <=_d y`.
    pub fn is_zero(&self, x: PointId, y: PointId) -> bool {
        self.zero[x.0 * self.len() + y.0]
    }

    pub fn matrix(&self) -> Vec<Vec<Rational>> {
        self.dist.chunks(self.len()).map(<[Rational]>::to_vec).collect()
    }

    pub fn validation(&self) -> ValidationReport {
        validate_space(&self.matrix()).expect("stored matrix is square and nonnegative")
    }

    /// `d(x, y) > 0` whenever `x != y`.
    pub fn is_t1(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| (0..n).all(|j| i == j || !self.zero[i * n + j]))
    }

    pub fn is_symmetric(&self) -> bool {
        self.points()
            .all(|x| self.points().all(|y| self.d(x, y) == self.d(y, x)))
    }

    pub fn empty_set(&self) -> PointSet {
        PointSet::empty(self.len())
    }

    pub fn full_set(&self) -> PointSet {
        PointSet::full(self.len())
    }

    pub fn set_of(&self, points: impl IntoIterator<Item = PointId>) -> PointSet {
        PointSet::from_points(self.len(), points)
    }

    pub fn set_from_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<PointSet> {
        let mut s = self.empty_set();
        for l in labels {
            s.insert(self.point(l.as_ref())?);
        }
        Ok(s)
    }

    pub fn set_labels(&self, set: &PointSet) -> Vec<String> {
        set.iter().map(|p| self.label(p).to_string()).collect()
    }

    /// The same points with `γ·d`. `γ` must be positive.
    pub fn scaled(&self, gamma: &Rational) -> Result<Self> {
        if !gamma.is_positive() {
            return Err(Precondition::NonPositive { name: "gamma" }.into());
        }
        let matrix = self
            .matrix()
            .into_iter()
            .map(|row| row.into_iter().map(|v| v * gamma).collect())
            .collect();
        Ok(Self::from_valid(self.labels.clone(), matrix))
    }

    /// Subspace on `subset` (which must be nonempty), together with the map
    /// from new indices to the original ones.
    pub fn restrict(&self, subset: &PointSet) -> Result<(Self, Vec<PointId>)> {
        let keep: Vec<PointId> = subset.iter().collect();
        if keep.is_empty() {
            return Err(Error::EmptySpace);
        }
        let labels = keep.iter().map(|&p| self.label(p).to_string()).collect();
        let matrix = keep
            .iter()
            .map(|&x| keep.iter().map(|&y| self.d(x, y).clone()).collect())
            .collect();
        Ok((Self::from_valid(labels, matrix), keep))
    }
}

/// The conjugate space `d̄(x, y) = d(y, x)`.
pub fn conjugate(space: &FiniteQPSpace) -> FiniteQPSpace {
    let matrix = space
        .points()
        .map(|x| space.points().map(|y| space.d(y, x).clone()).collect())
        .collect();
    FiniteQPSpace::from_valid(space.labels.clone(), matrix)
}

/// The symmetrization `dˢ = max(d, d̄)`.
pub fn symmetrize(space: &FiniteQPSpace) -> FiniteQPSpace {
    let matrix = space
        .points()
        .map(|x| {
            space
                .points()
                .map(|y| space.d(x, y).clone().max(space.d(y, x).clone()))
                .collect()
        })
        .collect();
    FiniteQPSpace::from_valid(space.labels.clone(), matrix)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BallKind {
    Open,
    Closed,
}

/// `B(x, r) = {y : d(x,y) < r}` or `B[x, r] = {y : d(x,y) <= r}`.
pub fn ball(space: &FiniteQPSpace, x: PointId, r: &Rational, kind: BallKind) -> Result<PointSet> {
    if !r.is_positive() {
        return Err(Precondition::NonPositiveRadius.into());
    }
    Ok(space.set_of(space.points().filter(|&y| match kind {
        BallKind::Open => space.d(x, y) < r,
        BallKind::Closed => space.d(x, y) <= r,
    })))
}

/// Topological closure. On a finite space `d(x, a_n) → 0` forces
/// `d(x, a) = 0` for some `a`, so the closure is `{x : ∃a∈A, d(x,a) = 0}`.
pub fn closure(space: &FiniteQPSpace, a: &PointSet) -> PointSet {
    space.set_of(space.points().filter(|&x| a.iter().any(|y| space.is_zero(x, y))))
}

/// Every `x ∈ A` has a ball inside `A`, i.e. `d(x, y) > 0` for all `y ∉ A`.
pub fn is_open(space: &FiniteQPSpace, a: &PointSet) -> bool {
    a.iter()
        .all(|x| space.points().all(|y| a.contains(y) || !space.is_zero(x, y)))
}

pub fn is_closed(space: &FiniteQPSpace, a: &PointSet) -> bool {
    closure(space, a) == *a
}

/// JSON shape of a space file: `{ "points": [...], "d": [[...]] }`.
#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    pub points: Vec<String>,
    pub d: Vec<Vec<Rational>>,
}

impl SpaceFile {
    pub fn into_space(self) -> Result<FiniteQPSpace> {
        FiniteQPSpace::new(self.points, self.d)
    }
}

impl From<&FiniteQPSpace> for SpaceFile {
    fn from(space: &FiniteQPSpace) -> Self {
        SpaceFile { points: space.labels.clone(), d: space.matrix() }
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    pub fn matrix(rows: &[&[&str]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|s| q(s)).collect()).collect()
    }

    pub fn space(labels: &[&str], rows: &[&[&str]]) -> FiniteQPSpace {
        FiniteQPSpace::new(labels.iter().map(|s| s.to_string()).collect(), matrix(rows)).unwrap()
    }

    /// `{a, b}`, `d(a,b) = 0`, `d(b,a) = 1`.
    pub fn e1() -> FiniteQPSpace {
        space(&["a", "b"], &[&["0", "0"], &["1", "0"]])
    }

    /// `{a, b}`, `d(a,b) = 1`, `d(b,a) = 2`.
    pub fn e2() -> FiniteQPSpace {
        space(&["a", "b"], &[&["0", "1"], &["2", "0"]])
    }

    /// `{a, b, c}`, `d(a,b) = d(b,c) = 1`, `d(a,c) = 2`, reverse distances 5.
    pub fn e3() -> FiniteQPSpace {
        space(
            &["a", "b", "c"],
            &[&["0", "1", "2"], &["5", "0", "1"], &["5", "5", "0"]],
        )
    }

    /// `{a, b}` with `d ≡ 0`.
    pub fn pseudo() -> FiniteQPSpace {
        space(&["a", "b"], &[&["0", "0"], &["0", "0"]])
    }

    pub fn one_point() -> FiniteQPSpace {
        space(&["x"], &[&["0"]])
    }
}
