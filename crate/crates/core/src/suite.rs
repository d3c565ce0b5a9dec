//! Randomized property suite over seeded instances.
//!
//! Each check compares library output either with a law that must hold or
//! with a brute-force oracle written from the definitions. A [`Mutant`]
//! swaps in a deliberately broken kernel so the suite can show it notices.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Precondition, Result};
use crate::generator::{instance_seed, random_instance, random_positive, random_rational};
use crate::objective::{is_d_monotone, is_lsc, is_nearly_lsc, lsc_envelope, Objective, ObjectiveFile};
use crate::order::{down_set, open_sets, order_class, saturation, saturation_in_family, up_set, OrderClass, SpecOrder};
use crate::rational::{ExtReal, Rational};
use crate::sequences::{
    converges_to, is_left_k_cauchy, is_right_k_cauchy, limit_set, liminf_phi, right_k_complete_check, EpSequence,
};
use crate::space::{
    ball, closure, conjugate, is_closed, is_open, symmetrize, BallKind, FiniteQPSpace, PointId, PointSet, SpaceFile,
};
use crate::variational::picard::picard_run_unchecked;
use crate::variational::sset::precedes;
use crate::variational::{
    caristi, equivalence_witness, full_ekeland, instance_equivalence, picard_run, s_set, takahashi, weak_ekeland,
    ArgminRule, CaristiMap, EquivalenceOutcome, FirstDescentRule, FirstHalfGapRule, FullEkelandParams, PicardTrace,
    SelectionRule, TakahashiOutcome, Termination,
};
use crate::verify::verify;

const FAILURE_LIMIT: usize = 20;
const PICARD_STARTS: usize = 3;
const FULL_EKELAND_TRIPLES: usize = 3;
const CARISTI_MAPS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Group {
    Axioms,
    Order,
    Semicontinuity,
    Picard,
    Principles,
    Equivalence,
}

impl Group {
    pub const ALL: [Group; 6] = [
        Group::Axioms,
        Group::Order,
        Group::Semicontinuity,
        Group::Picard,
        Group::Principles,
        Group::Equivalence,
    ];

    /// Acceptance criterion number covered by this group.
    pub fn criterion(self) -> u8 {
        self as u8 + 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutant {
    /// `S(x)` membership with `<` instead of `<=`.
    StrictS,
    /// Picard accepts any descent, skipping the half-gap contract.
    DroppedHalfGap,
    /// Distances and objective values compared as `f64`.
    FloatDistance,
}

impl Mutant {
    pub const ALL: [Mutant; 3] = [Mutant::StrictS, Mutant::DroppedHalfGap, Mutant::FloatDistance];

    pub fn name(self) -> &'static str {
        match self {
            Mutant::StrictS => "strict-s",
            Mutant::DroppedHalfGap => "dropped-half-gap",
            Mutant::FloatDistance => "float-distance",
        }
    }
}

impl fmt::Display for Mutant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mutant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mutant::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Malformed(format!("unknown mutant `{s}`")))
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub count: usize,
    pub max_n: usize,
    pub groups: Vec<Group>,
    pub mutant: Option<Mutant>,
    pub fail_fast: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            count: 1000,
            max_n: 8,
            groups: Group::ALL.to_vec(),
            mutant: None,
            fail_fast: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CheckTally {
    pub passed: u64,
    pub failed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupSummary {
    pub group: Group,
    pub criterion: u8,
    pub instances: usize,
    pub checks: IndexMap<&'static str, CheckTally>,
    pub passed: bool,
    /// Wall time spent in this group, excluding instance generation.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl GroupSummary {
    pub fn failed_checks(&self) -> u64 {
        self.checks.values().map(|t| t.failed).sum()
    }

    pub fn total_checks(&self) -> u64 {
        self.checks.values().map(|t| t.passed + t.failed).sum()
    }
}

/// A failing check together with the instance, for replay.
#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub instance: usize,
    pub seed: u64,
    pub group: Group,
    pub check: &'static str,
    pub detail: String,
    pub space: SpaceFile,
    pub phi: ObjectiveFile,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub count: usize,
    pub max_n: usize,
    pub mutant: Option<Mutant>,
    pub passed: bool,
    pub warnings: Vec<String>,
    pub groups: Vec<GroupSummary>,
    pub failures_total: u64,
    /// The first few failures.
    pub failures: Vec<Failure>,
}

impl SuiteReport {
    pub fn group(&self, g: Group) -> Option<&GroupSummary> {
        self.groups.iter().find(|s| s.group == g)
    }
}

struct Instance {
    index: usize,
    seed: u64,
    space: FiniteQPSpace,
    phi: Objective,
}

struct Recorder<'a> {
    group: Group,
    summary: &'a mut GroupSummary,
    failures: &'a mut Vec<Failure>,
    total: &'a mut u64,
    inst: &'a Instance,
}

impl Recorder<'_> {
    fn check(&mut self, name: &'static str, ok: bool, detail: impl FnOnce() -> String) {
        let tally = self.summary.checks.entry(name).or_default();
        if ok {
            tally.passed += 1;
            return;
        }
        tally.failed += 1;
        *self.total += 1;
        if self.failures.len() < FAILURE_LIMIT {
            self.failures.push(Failure {
                instance: self.inst.index,
                seed: self.inst.seed,
                group: self.group,
                check: name,
                detail: detail(),
                space: SpaceFile::from(&self.inst.space),
                phi: ObjectiveFile::from_objective(&self.inst.space, &self.inst.phi),
            });
        }
    }

    fn ok(&mut self, name: &'static str, ok: bool) {
        self.check(name, ok, String::new);
    }
}

/// The implementation under test; mutants replace parts of it.
struct Kernel {
    mutant: Option<Mutant>,
}

impl Kernel {
    fn s_set(&self, space: &FiniteQPSpace, phi: &Objective, x: PointId) -> PointSet {
        match self.mutant {
            Some(Mutant::StrictS) => space.set_of(space.points().filter(|&y| match phi.value(x) {
                ExtReal::PlusInfinity => true,
                fx => phi.value(y).add_rational(space.d(y, x)) < *fx,
            })),
            Some(Mutant::FloatDistance) => space.set_of(space.points().filter(|&y| {
                match (phi.value(x).finite(), phi.value(y).finite()) {
                    (None, _) => true,
                    (Some(_), None) => false,
                    (Some(fx), Some(fy)) => fy.to_f64() + space.d(y, x).to_f64() <= fx.to_f64(),
                }
            })),
            _ => s_set(space, phi, x).members,
        }
    }

    fn axioms_hold(&self, space: &FiniteQPSpace) -> bool {
        match self.mutant {
            Some(Mutant::FloatDistance) => {
                let d = |x: PointId, y: PointId| space.d(x, y).to_f64();
                space.points().all(|i| {
                    d(i, i) == 0.0
                        && space
                            .points()
                            .all(|j| space.points().all(|k| d(i, k) <= d(i, j) + d(j, k)))
                })
            }
            _ => space.validation().is_valid(),
        }
    }

    fn picard(&self, space: &FiniteQPSpace, phi: &Objective, x0: PointId, rule: &dyn SelectionRule) -> Result<PicardTrace> {
        match self.mutant {
            Some(Mutant::DroppedHalfGap) => picard_run_unchecked(space, phi, x0, &FirstDescentRule),
            _ => picard_run(space, phi, x0, rule),
        }
    }
}

// Oracles, written directly from the definitions.

fn oracle_member(space: &FiniteQPSpace, phi: &Objective, x: PointId, y: PointId) -> bool {
    match (phi.value(x), phi.value(y)) {
        (ExtReal::PlusInfinity, _) => true,
        (_, ExtReal::PlusInfinity) => false,
        (ExtReal::Finite(fx), ExtReal::Finite(fy)) => fy + space.d(y, x) <= *fx,
    }
}

fn oracle_s(space: &FiniteQPSpace, phi: &Objective, x: PointId) -> PointSet {
    space.set_of(space.points().filter(|&y| oracle_member(space, phi, x, y)))
}

fn min_over(phi: &Objective, set: &PointSet) -> ExtReal {
    set.iter().map(|p| phi.value(p).clone()).min().unwrap_or(ExtReal::PlusInfinity)
}

/// `x ∈ cl(A)` iff every open ball around `x` meets `A`. Row values bound
/// the radii worth testing: below the least positive one the ball is
/// `{y : d(x, y) = 0}`.
fn oracle_closure(space: &FiniteQPSpace, a: &PointSet) -> PointSet {
    space.set_of(space.points().filter(|&x| {
        let mut radii: Vec<Rational> = space.points().map(|y| space.d(x, y).clone()).filter(Rational::is_positive).collect();
        radii.push(Rational::one());
        radii.iter().all(|r| {
            let b = ball(space, x, r, BallKind::Open).expect("positive radius");
            !b.intersection(a).is_empty()
        })
    }))
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize) -> PointSet {
    PointSet::from_points(n, (0..n).filter(|_| rng.gen_bool(0.5)).map(PointId))
}

fn t1(space: &FiniteQPSpace) -> bool {
    space.points().all(|x| space.points().all(|y| x == y || space.d(x, y).is_positive()))
}

fn qm3(space: &FiniteQPSpace) -> bool {
    space
        .points()
        .all(|x| space.points().all(|y| x == y || space.d(x, y).is_positive() || space.d(y, x).is_positive()))
}

fn labels(space: &FiniteQPSpace, set: &PointSet) -> String {
    format!("{:?}", space.set_labels(set))
}

fn axioms(k: &Kernel, inst: &Instance, rng: &mut ChaCha8Rng, r: &mut Recorder) {
    let s = &inst.space;
    let n = s.len();
    r.ok("qm1-qm2-after-repair", k.axioms_hold(s));
    let conj = conjugate(s);
    r.ok("conjugate-valid", conj.validation().is_valid());
    r.ok("conjugate-involution", conjugate(&conj) == *s);
    let sym = symmetrize(s);
    r.ok("symmetrization-symmetric", sym.is_symmetric());
    r.ok("symmetrization-t1-iff-qm3", sym.validation().t1_ok == s.validation().qm3_ok);

    for x in s.points() {
        let mut radii: Vec<Rational> = s.points().map(|y| s.d(x, y).clone()).filter(Rational::is_positive).collect();
        let top = radii.iter().max().cloned().unwrap_or_else(Rational::one);
        radii.push(top + Rational::one());
        radii.push(Rational::new(1, 3));
        for radius in &radii {
            let open = ball(s, x, radius, BallKind::Open).expect("positive");
            let closed = ball(s, x, radius, BallKind::Closed).expect("positive");
            r.ok("open-ball-inside-closed", open.is_subset(&closed));
            r.check("open-ball-is-open", is_open(s, &open), || format!("B({}, {radius})", s.label(x)));
            r.check("closed-ball-conjugate-closed", is_closed(&conj, &closed), || {
                format!("B[{}, {radius}]", s.label(x))
            });
        }
        let single = s.set_of([x]);
        r.ok("down-set-of-point-is-closure", down_set(s, &single) == closure(s, &single));
    }

    let family = open_sets(s).ok();
    let mut subsets: Vec<PointSet> = s.points().map(|x| s.set_of([x])).collect();
    subsets.push(s.empty_set());
    subsets.push(s.full_set());
    subsets.extend((0..6).map(|_| random_subset(rng, n)));
    for (i, a) in subsets.iter().enumerate() {
        let cl = closure(s, a);
        r.check("closure-matches-ball-definition", cl == oracle_closure(s, a), || labels(s, a));
        r.ok("closure-extensive", a.is_subset(&cl));
        r.ok("closure-idempotent", closure(s, &cl) == cl);
        let b = &subsets[(i + 1) % subsets.len()];
        let ab = a.union(b);
        let cl_ab = closure(s, &ab);
        r.ok("closure-monotone", cl.is_subset(&cl_ab));
        r.ok("closure-distributes-over-union", cl_ab == cl.union(&closure(s, b)));
        if is_open(s, a) {
            r.check("open-is-upward-closed", up_set(s, a) == *a, || labels(s, a));
        }
        if is_closed(s, a) {
            r.check("closed-is-downward-closed", down_set(s, a) == *a, || labels(s, a));
        }
        let up = up_set(s, a);
        r.ok("up-set-extensive-idempotent", a.is_subset(&up) && up_set(s, &up) == up);
        r.ok("saturation-is-up-set", saturation(s, a) == up);
        if let Some(family) = &family {
            r.check("saturation-by-enumeration", saturation_in_family(family, a) == up, || labels(s, a));
        }
    }
    r.ok("closure-of-empty", closure(s, &s.empty_set()).is_empty());
}

fn order(inst: &Instance, r: &mut Recorder) {
    let s = &inst.space;
    let v = s.validation();
    r.ok("qm3-flag-matches-oracle", v.qm3_ok == qm3(s));
    r.ok("t1-flag-matches-oracle", v.t1_ok == t1(s));
    let ord = SpecOrder::new(s);
    r.ok("specialization-order-reflexive", ord.is_reflexive());
    let transitive = s.points().all(|x| {
        s.points().all(|y| {
            s.points()
                .all(|z| !(s.d(x, y).is_zero() && s.d(y, z).is_zero()) || s.d(x, z).is_zero())
        })
    });
    r.ok("specialization-order-transitive", transitive && ord.is_transitive());
    r.ok("antisymmetric-iff-qm3", ord.is_antisymmetric() == v.qm3_ok);
    let class = order_class(s);
    r.check(
        "order-iff-t0",
        matches!(class, OrderClass::PartialOrder | OrderClass::Equality) == v.qm3_ok,
        || format!("{class:?} vs qm3 = {}", v.qm3_ok),
    );
    r.check("equality-iff-t1", (class == OrderClass::Equality) == v.t1_ok, || {
        format!("{class:?} vs t1 = {}", v.t1_ok)
    });
    let leq_is_closure = s
        .points()
        .all(|x| s.points().all(|y| ord.leq(x, y) == closure(s, &s.set_of([y])).contains(x)));
    r.ok("leq-iff-in-closure-of-point", leq_is_closure);
}

/// Every cycle of length one or two, as sequences.
fn short_cycles(space: &FiniteQPSpace) -> Vec<EpSequence> {
    let mut out: Vec<EpSequence> = space.points().map(EpSequence::constant).collect();
    for u in space.points() {
        for v in space.points().filter(|&v| v != u) {
            out.push(EpSequence::periodic(vec![u, v]).expect("nonempty"));
        }
    }
    out
}

fn semicontinuity(inst: &Instance, rng: &mut ChaCha8Rng, r: &mut Recorder) {
    let s = &inst.space;
    let cycles = short_cycles(s);
    let envelope = lsc_envelope(s, &inst.phi);
    for phi in [&inst.phi, &envelope] {
        let lsc = is_lsc(s, phi);
        let mono = is_d_monotone(s, phi).monotone;
        let near = is_nearly_lsc(s, phi).holds;
        r.ok("near-lsc-vacuous", near);
        r.ok("lsc-iff-nearly-lsc-and-monotone", lsc == (near && mono));
        r.ok("lsc-iff-monotone", lsc == mono);
        let by_sequences = cycles.iter().all(|seq| {
            let lim = liminf_phi(s, seq, phi);
            limit_set(s, seq).iter().all(|x| *phi.value(x) <= lim)
        });
        r.check("sequence-lsc-agrees", by_sequences == lsc, || {
            format!("sequences say {by_sequences}, monotonicity says {lsc}")
        });
        if t1(s) {
            r.ok("t1-implies-lsc", lsc);
        }
    }
    let below = s.points().all(|x| envelope.value(x) <= inst.phi.value(x));
    r.ok("envelope-is-lsc-minorant", is_lsc(s, &envelope) && below);

    r.ok("finite-space-right-k-complete", right_k_complete_check(s).passed);
    let conj = conjugate(s);
    let mut seqs = cycles;
    for _ in 0..4 {
        let pre = (0..rng.gen_range(0..3)).map(|_| PointId(rng.gen_range(0..s.len()))).collect();
        let cyc = (0..rng.gen_range(1..4)).map(|_| PointId(rng.gen_range(0..s.len()))).collect();
        seqs.push(EpSequence::new(pre, cyc).expect("nonempty cycle"));
    }
    for seq in &seqs {
        if is_right_k_cauchy(s, seq) {
            r.ok("cauchy-cycle-members-are-limits", seq.cycle().iter().all(|&x| converges_to(s, seq, x)));
        }
        r.ok("right-cauchy-iff-conjugate-left", is_right_k_cauchy(s, seq) == is_left_k_cauchy(&conj, seq));
        let lim = limit_set(s, seq);
        let by_definition =
            s.set_of(s.points().filter(|&x| seq.cycle().iter().all(|&v| s.d(x, v).is_zero())));
        r.ok("limit-set-definition", lim == by_definition);
    }
}

fn picard_checks(k: &Kernel, inst: &Instance, rng: &mut ChaCha8Rng, r: &mut Recorder) {
    let s = &inst.space;
    let phi = &inst.phi;
    let dom = phi.domain();
    let lsc = is_lsc(s, phi);
    for x in s.points() {
        let ks = k.s_set(s, phi, x);
        let os = oracle_s(s, phi, x);
        r.check("s-set-matches-oracle", ks == os, || {
            format!("S({}) = {} but oracle gives {}", s.label(x), labels(s, &ks), labels(s, &os))
        });
        let fx = phi.value(x);
        if fx.is_finite() {
            r.check("x-in-s-x", ks.contains(x), || format!("{} ∉ S({})", s.label(x), s.label(x)));
            r.ok("s-set-inside-domain", ks.is_subset(&dom));
        }
        let cl = closure(s, &s.set_of([x]));
        for y in ks.iter() {
            r.ok("s-set-values-below", phi.value(y) <= fx);
            let ky = k.s_set(s, phi, y);
            r.check("s-sets-nested", ky.is_subset(&ks), || format!("y = {}, x = {}", s.label(y), s.label(x)));
            if fx.is_finite() && !cl.contains(y) {
                r.ok("outside-closure-is-strict-descent", phi.value(y) < fx);
            }
        }
        if !ks.difference(&cl).is_empty() {
            r.ok("outside-closure-implies-descent", *fx > min_over(phi, &ks));
        }
        if lsc {
            r.ok("lsc-implies-s-set-closed", is_closed(s, &ks));
        }
        let view = s.set_of(s.points().filter(|&y| precedes(s, phi, x, y)));
        r.ok("preorder-view", view == ks);
    }
    let preorder_transitive = dom.iter().all(|x| {
        dom.iter().all(|y| {
            dom.iter()
                .all(|w| !(precedes(s, phi, x, y) && precedes(s, phi, y, w)) || precedes(s, phi, x, w))
        })
    });
    r.ok("preorder-transitive-on-domain", preorder_transitive);

    let starts: Vec<PointId> = dom.iter().collect();
    for t in 0..PICARD_STARTS {
        let x0 = *starts.choose(rng).expect("proper objective");
        let rule: &dyn SelectionRule = if t % 2 == 0 { &ArgminRule } else { &FirstHalfGapRule };
        let trace = match k.picard(s, phi, x0, rule) {
            Ok(t) => t,
            Err(e) => {
                r.check("picard-runs", false, || e.to_string());
                continue;
            }
        };
        picard_trace_laws(s, phi, &trace, r);
    }
}

fn picard_trace_laws(s: &FiniteQPSpace, phi: &Objective, trace: &PicardTrace, r: &mut Recorder) {
    let it = &trace.iterates;
    let f = |p: PointId| phi.value(p).finite().cloned().expect("iterates stay in dom");
    for w in it.windows(2) {
        let (x, y) = (w[0], w[1]);
        let sx = oracle_s(s, phi, x);
        r.ok("picard-step-in-s-set", sx.contains(y));
        let j = min_over(phi, &sx).finite().cloned().expect("finite");
        let (fx, fy) = (f(x), f(y));
        r.check("picard-half-gap", &fy + &fy < &fx + &j, || {
            format!("phi({}) = {fy}, phi({}) = {fx}, J = {j}", s.label(y), s.label(x))
        });
        r.ok("picard-strict-decrease", fy < fx);
        r.ok("picard-s-sets-nested", oracle_s(s, phi, y).is_subset(&sx));
    }
    for n in 0..it.len() {
        for m in n + 1..it.len() {
            r.ok("picard-cauchy-bound", *s.d(it[m], it[n]) <= f(it[n]) - f(it[m]));
        }
    }
    let z = trace.last();
    let sz = oracle_s(s, phi, z);
    r.ok("picard-reaches-j", trace.termination == Termination::ReachedJ && *phi.value(z) == min_over(phi, &sz));
    r.ok("picard-steps-bounded", trace.steps() <= s.len());
    r.ok("picard-limit-in-every-s-set", it.iter().all(|&x| oracle_s(s, phi, x).contains(z)));
    for y in sz.iter() {
        r.ok("picard-limit-constancy", phi.value(y) == phi.value(z));
        r.ok("picard-s-inside-closure", oracle_s(s, phi, y).is_subset(&closure(s, &s.set_of([y]))));
    }
}

/// Expected weak Ekeland point under the argmin rule from the first point
/// of `dom φ`.
fn brute_force_weak(s: &FiniteQPSpace, phi: &Objective) -> PointId {
    let x0 = phi.domain().first().expect("proper");
    let s0 = oracle_s(s, phi, x0);
    let m = min_over(phi, &s0);
    if *phi.value(x0) == m {
        x0
    } else {
        s0.iter().find(|&y| *phi.value(y) == m).expect("minimum attained")
    }
}

fn random_caristi_map(rng: &mut ChaCha8Rng, s: &FiniteQPSpace, phi: &Objective, multi: bool) -> CaristiMap {
    let choose = |rng: &mut ChaCha8Rng, x: PointId| {
        let members: Vec<PointId> = oracle_s(s, phi, x).iter().collect();
        *members.choose(rng).expect("x ∈ S(x)")
    };
    if multi {
        CaristiMap::Multi(
            s.points()
                .map(|x| {
                    let mut set = s.set_of([choose(rng, x)]);
                    for y in s.points() {
                        if rng.gen_bool(0.3) {
                            set.insert(y);
                        }
                    }
                    set
                })
                .collect(),
        )
    } else {
        CaristiMap::Single(s.points().map(|x| choose(rng, x)).collect())
    }
}

fn principles(inst: &Instance, rng: &mut ChaCha8Rng, r: &mut Recorder) {
    let s = &inst.space;
    let phi = &inst.phi;

    match weak_ekeland(s, phi) {
        Ok(sol) => {
            let report = verify(&sol.certificate, s, phi);
            r.check("weak-certificate-verifies", report.valid, || report.failures.join("; "));
            let expected = brute_force_weak(s, phi);
            r.check("weak-matches-brute-force", sol.z == expected, || {
                format!("solver {} vs oracle {}", s.label(sol.z), s.label(expected))
            });
            let fz = phi.value(sol.z);
            r.ok("weak-constancy-brute-force", oracle_s(s, phi, sol.z).iter().all(|y| phi.value(y) == fz));
        }
        Err(e) => r.check("weak-ekeland-succeeds", false, || e.to_string()),
    }

    let lsc = is_lsc(s, phi);
    if !lsc {
        let x0 = phi.argmin_set().first().expect("nonempty");
        let p = FullEkelandParams::new(Rational::one(), Rational::one(), x0).expect("positive");
        r.ok(
            "full-rejects-non-lsc",
            matches!(full_ekeland(s, phi, &p), Err(Error::Precondition(Precondition::NotLsc { .. }))),
        );
    }
    let psi = if lsc { phi.clone() } else { lsc_envelope(s, phi) };
    let inf = psi.inf().finite().cloned().expect("proper");
    let starts: Vec<PointId> = psi.domain().iter().collect();
    for _ in 0..FULL_EKELAND_TRIPLES {
        let x0 = *starts.choose(rng).expect("proper");
        let gap = psi.value(x0).finite().cloned().expect("in dom") - &inf;
        let lambda = random_positive(rng, 8);
        let extra = if gap.is_positive() && rng.gen_bool(0.3) { Rational::zero() } else { random_rational(rng, 6) };
        let mut eps = &gap + &extra;
        if !eps.is_positive() {
            eps = random_positive(rng, 6);
        }
        let p = FullEkelandParams::new(eps, lambda, x0).expect("positive");
        match full_ekeland(s, &psi, &p) {
            Ok(sol) => {
                let report = verify(&sol.certificate, s, &psi);
                r.check("full-certificate-verifies", report.valid, || report.failures.join("; "));
                full_conclusions(s, &psi, &p, sol.z, r);
            }
            Err(e) => r.check("full-ekeland-succeeds", false, || e.to_string()),
        }
        if gap.is_positive() {
            let half = &gap / &Rational::from_integer(2);
            let p = FullEkelandParams::new(half.clone(), Rational::one(), x0).expect("positive");
            let rejected = matches!(
                full_ekeland(s, &psi, &p),
                Err(Error::Precondition(Precondition::EkelandGap { gap: g })) if g == half
            );
            r.ok("full-rejects-gap-with-margin", rejected);
        }
    }

    let pinf = phi.inf();
    let hypothesis = s.points().all(|x| {
        *phi.value(x) <= pinf || oracle_s(s, phi, x).iter().any(|y| phi.value(y) < phi.value(x))
    });
    match takahashi(s, phi) {
        Ok(TakahashiOutcome::Minimizer(sol)) => {
            r.ok("takahashi-hypothesis-agrees", hypothesis);
            r.ok("takahashi-true-minimizer", *phi.value(sol.z) == pinf && phi.argmin_set().contains(sol.z));
            let report = verify(&sol.certificate, s, phi);
            r.check("takahashi-certificate-verifies", report.valid, || report.failures.join("; "));
        }
        Ok(TakahashiOutcome::HypothesisViolated { witness, certificate }) => {
            r.ok("takahashi-hypothesis-agrees", !hypothesis);
            let w = witness;
            r.ok(
                "takahashi-witness-violates",
                *phi.value(w) > pinf && !oracle_s(s, phi, w).iter().any(|y| phi.value(y) < phi.value(w)),
            );
            let report = verify(&certificate, s, phi);
            r.check("takahashi-certificate-verifies", report.valid, || report.failures.join("; "));
        }
        Err(e) => r.check("takahashi-runs", false, || e.to_string()),
    }

    let t1 = t1(s);
    for t in 0..CARISTI_MAPS {
        let map = random_caristi_map(rng, s, phi, t == CARISTI_MAPS - 1);
        match caristi(s, phi, &map) {
            Ok(sol) => {
                let z = sol.z;
                let tz = map.image(s, z);
                let fz = phi.value(z);
                let equal = match &map {
                    CaristiMap::Single(_) => tz.iter().all(|y| phi.value(y) == fz),
                    CaristiMap::Multi(_) => tz.iter().any(|y| phi.value(y) == fz),
                };
                r.ok("caristi-value-equality", equal);
                if t1 {
                    r.ok("caristi-fixed-point-on-t1", tz.contains(z));
                }
                let report = verify(&sol.certificate, s, phi);
                r.check("caristi-certificate-verifies", report.valid, || report.failures.join("; "));
            }
            Err(e) => r.check("caristi-succeeds", false, || e.to_string()),
        }
    }
    if let Some(x) = s.points().find(|&x| oracle_s(s, phi, x) != s.full_set()) {
        let outside = oracle_s(s, phi, x).complement().first().expect("nonempty complement");
        let mut images: Vec<PointId> = s.points().collect();
        images[x.0] = outside;
        let named = matches!(
            caristi(s, phi, &CaristiMap::Single(images)),
            Err(Error::Precondition(Precondition::CaristiPremise(l))) if l == s.label(x)
        );
        r.ok("caristi-rejects-premise-violation", named);
    }
}

fn full_conclusions(s: &FiniteQPSpace, psi: &Objective, p: &FullEkelandParams, z: PointId, r: &mut Recorder) {
    let gamma = p.gamma();
    let x0 = p.x0;
    let dg = |x: PointId, y: PointId| &gamma * s.d(x, y);
    let f0 = psi.value(x0).clone();
    let fz = psi.value(z).clone();
    r.ok("full-conclusion-i", fz.add_rational(&dg(z, x0)) <= f0);
    r.ok("full-conclusion-ii", *s.d(z, x0) <= p.lambda);
    let member = |y: PointId| match psi.value(y) {
        ExtReal::PlusInfinity => false,
        ExtReal::Finite(fy) => ExtReal::Finite(fy + &dg(y, z)) <= fz,
    };
    for x in s.points() {
        if member(x) {
            r.ok("full-conclusion-iii", *psi.value(x) == fz);
        } else {
            r.ok("full-conclusion-iv", fz < psi.value(x).add_rational(&dg(x, z)));
        }
    }
}

fn equivalence(inst: &Instance, r: &mut Recorder) {
    let s = &inst.space;
    let phi = &inst.phi;
    let dom = phi.domain();
    let wek = dom
        .iter()
        .any(|z| oracle_s(s, phi, z).iter().all(|y| phi.value(y) == phi.value(z)));
    let not_tak = s
        .points()
        .all(|x| oracle_s(s, phi, x).iter().any(|y| phi.value(y) < phi.value(x)));
    let mut greedy = Vec::new();
    for x in s.points() {
        match oracle_s(s, phi, x).iter().find(|&y| phi.value(y) < phi.value(x)) {
            Some(y) => greedy.push((x, y)),
            None => break,
        }
    }
    let refuting = greedy.len() == s.len();
    r.check("three-way-equivalence", wek != not_tak && wek != refuting, || {
        format!("wek = {wek}, not_tak = {not_tak}, refuting = {refuting}")
    });
    r.ok("finite-space-weak-ekeland-holds", wek);
    let lib = instance_equivalence(s, phi, &s.full_set());
    r.ok(
        "instance-flags-match-oracle",
        lib.wek_holds == wek && lib.not_tak_config == not_tak && lib.refuting_selection_exists == refuting,
    );
    match equivalence_witness(s, phi) {
        Ok(EquivalenceOutcome::WeakEkeland { z, certificate }) => {
            let report = verify(&certificate, s, phi);
            r.check("equivalence-certificate-verifies", report.valid, || report.failures.join("; "));
            if s.is_symmetric() && qm3(s) {
                r.ok("metric-s-z-singleton", oracle_s(s, phi, z) == s.set_of([z]));
                let fz = phi.value(z);
                r.ok(
                    "metric-strict-inequality",
                    s.points()
                        .filter(|&x| x != z)
                        .all(|x| *fz < phi.value(x).add_rational(s.d(x, z))),
                );
            }
        }
        Ok(EquivalenceOutcome::CaristiRefutation { .. }) => r.ok("equivalence-weak-branch", false),
        Err(e) => r.check("equivalence-runs", false, || e.to_string()),
    }
}

pub fn run_suite(config: &SuiteConfig) -> SuiteReport {
    let groups: Vec<Group> = if config.groups.is_empty() { Group::ALL.to_vec() } else { config.groups.clone() };
    let mut summaries: Vec<GroupSummary> = groups
        .iter()
        .map(|&g| GroupSummary {
            group: g,
            criterion: g.criterion(),
            instances: 0,
            checks: IndexMap::new(),
            passed: true,
            elapsed: Duration::ZERO,
        })
        .collect();
    let mut warnings = Vec::new();
    if config.count == 0 {
        warnings.push("count is 0: no instances were generated, so the pass is vacuous".to_string());
    }
    let kernel = Kernel { mutant: config.mutant };
    let mut failures = Vec::new();
    let mut total = 0u64;
    'instances: for index in 0..config.count {
        let seed = instance_seed(config.seed, index as u64);
        let (space, phi) = random_instance(seed, config.max_n.max(1));
        let inst = Instance { index, seed, space, phi };
        for summary in summaries.iter_mut() {
            let group = summary.group;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(1 + group as u64);
            let start = Instant::now();
            let mut r = Recorder { group, summary, failures: &mut failures, total: &mut total, inst: &inst };
            match group {
                Group::Axioms => axioms(&kernel, &inst, &mut rng, &mut r),
                Group::Order => order(&inst, &mut r),
                Group::Semicontinuity => semicontinuity(&inst, &mut rng, &mut r),
                Group::Picard => picard_checks(&kernel, &inst, &mut rng, &mut r),
                Group::Principles => principles(&inst, &mut rng, &mut r),
                Group::Equivalence => equivalence(&inst, &mut r),
            }
            summary.elapsed += start.elapsed();
            summary.instances += 1;
            if config.fail_fast && total > 0 {
                break 'instances;
            }
        }
    }
    for s in summaries.iter_mut() {
        s.passed = s.failed_checks() == 0;
    }
    SuiteReport {
        seed: config.seed,
        count: config.count,
        max_n: config.max_n,
        mutant: config.mutant,
        passed: total == 0,
        warnings,
        groups: summaries,
        failures_total: total,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(mutant: Option<Mutant>) -> SuiteConfig {
        SuiteConfig { seed: 7, count: 60, max_n: 6, mutant, ..Default::default() }
    }

    #[test]
    fn clean_run_passes() {
        let report = run_suite(&small(None));
        assert!(report.passed, "{:#?}", report.failures.first());
        assert!(report.groups.iter().all(|g| g.instances == 60));
    }

    #[test]
    fn zero_count_is_vacuous() {
        let report = run_suite(&SuiteConfig { count: 0, ..Default::default() });
        assert!(report.passed);
        assert_eq!(report.warnings.len(), 1);
    }

    #[test]
    fn strict_s_fails_reflexivity() {
        let report = run_suite(&small(Some(Mutant::StrictS)));
        assert!(!report.passed);
        let picard = report.group(Group::Picard).unwrap();
        assert!(picard.checks["x-in-s-x"].failed > 0);
    }

    #[test]
    fn report_is_deterministic() {
        let a = serde_json::to_string(&run_suite(&small(None))).unwrap();
        let b = serde_json::to_string(&run_suite(&small(None))).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mutant_names_roundtrip() {
        for m in Mutant::ALL {
            assert_eq!(m.name().parse::<Mutant>().unwrap(), m);
        }
        assert!("nope".parse::<Mutant>().is_err());
    }
}
