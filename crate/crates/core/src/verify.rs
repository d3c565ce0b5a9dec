//! Independent re-check of certificates against the space and objective.
//!
//! Nothing here calls into the solvers: S-sets, closures and the Picard
//! contract are recomputed from the definitions so that a solver bug cannot
//! vouch for itself.

use serde::Serialize;

use crate::objective::Objective;
use crate::rational::{ExtReal, Rational};
use crate::space::{FiniteQPSpace, PointId};
use crate::variational::certificate::{
    CaristiEvidence, Certificate, EquivalenceEvidence, FullEvidence, MapEntry, TakahashiEvidence,
    TraceRecord, Valued, WeakEvidence,
};
use crate::variational::Termination;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub principle: String,
    pub valid: bool,
    pub failures: Vec<String>,
}

/// Points of the space seen through `γ·d`, restricted to `points`.
struct View<'a> {
    space: &'a FiniteQPSpace,
    phi: &'a Objective,
    gamma: Rational,
    points: Vec<PointId>,
}

impl<'a> View<'a> {
    fn whole(space: &'a FiniteQPSpace, phi: &'a Objective) -> Self {
        View { space, phi, gamma: Rational::one(), points: space.points().collect() }
    }

    fn d(&self, x: PointId, y: PointId) -> Rational {
        &self.gamma * self.space.d(x, y)
    }

    fn f(&self, x: PointId) -> &ExtReal {
        self.phi.value(x)
    }

    fn member(&self, x: PointId, y: PointId) -> bool {
        match self.f(x) {
            ExtReal::PlusInfinity => true,
            ExtReal::Finite(fx) => match self.f(y) {
                ExtReal::PlusInfinity => false,
                ExtReal::Finite(fy) => fy + &self.d(y, x) <= *fx,
            },
        }
    }

    fn s(&self, x: PointId) -> Vec<PointId> {
        self.points.iter().copied().filter(|&y| self.member(x, y)).collect()
    }

    fn j(&self, x: PointId) -> ExtReal {
        self.s(x).into_iter().map(|y| self.f(y).clone()).min().unwrap_or(ExtReal::PlusInfinity)
    }

    fn closure_of(&self, y: PointId) -> Vec<PointId> {
        self.points.iter().copied().filter(|&x| self.space.d(x, y).is_zero()).collect()
    }
}

struct Checker<'a> {
    space: &'a FiniteQPSpace,
    failures: Vec<String>,
}

impl Checker<'_> {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn point(&mut self, label: &str) -> Option<PointId> {
        let p = self.space.index_of(label);
        self.check(p.is_some(), || format!("unknown point `{label}`"));
        p
    }

    fn label(&self, p: PointId) -> &str {
        self.space.label(p)
    }

    fn listing(&mut self, view: &View, what: &str, listed: &[Valued], expected: &[PointId]) {
        let want: Vec<Valued> = expected
            .iter()
            .map(|&p| Valued { point: self.label(p).to_string(), phi: view.f(p).clone() })
            .collect();
        self.check(listed == want.as_slice(), || format!("{what} listing does not match recomputation"));
    }

    fn trace(&mut self, view: &View, trace: &TraceRecord, start: Option<PointId>, end: PointId) {
        let iterates: Vec<PointId> =
            trace.iterates.iter().filter_map(|v| self.space.index_of(&v.point)).collect();
        if iterates.len() != trace.iterates.len() || iterates.is_empty() {
            self.failures.push("trace names unknown points or is empty".into());
            return;
        }
        self.check(trace.j_values.len() == iterates.len(), || "trace J list has wrong length".into());
        if let Some(s) = start {
            self.check(iterates[0] == s, || format!("trace does not start at `{}`", view.space.label(s)));
        }
        self.check(view.f(iterates[0]).is_finite(), || "trace starts outside dom phi".into());
        for (k, &x) in iterates.iter().enumerate() {
            self.check(view.points.contains(&x), || format!("iterate `{}` outside the working set", view.space.label(x)));
            self.check(trace.iterates[k].phi == *view.f(x), || format!("wrong phi at iterate {k}"));
            let j = view.j(x);
            if let Some(listed) = trace.j_values.get(k) {
                self.check(*listed == j, || format!("wrong J at iterate {k}"));
            }
            if let Some(&y) = iterates.get(k + 1) {
                self.check(view.member(x, y), || {
                    format!("`{}` is not in S(`{}`)", view.space.label(y), view.space.label(x))
                });
                let gap = match (view.f(y), view.f(x), &j) {
                    (ExtReal::Finite(fy), ExtReal::Finite(fx), ExtReal::Finite(j)) => fy + fy < fx + j,
                    _ => false,
                };
                self.check(gap, || format!("step {k} misses the half-gap descent"));
            }
        }
        let last = *iterates.last().expect("nonempty");
        self.check(last == end, || format!("trace ends at `{}`, not at z", view.space.label(last)));
        if trace.termination == Termination::ReachedJ {
            self.check(*view.f(last) == view.j(last), || "trace stops before phi = J".into());
        }
    }

}

fn is_t1(space: &FiniteQPSpace) -> bool {
    space.points().all(|x| space.points().all(|y| x == y || !space.d(x, y).is_zero()))
}

fn verify_weak(c: &mut Checker, view: &View, z: PointId, ev: &WeakEvidence, trace_start: Option<PointId>) {
    let fz = view.f(z).clone();
    c.check(fz.is_finite(), || "z is outside dom phi".into());
    let sz = view.s(z);
    c.listing(view, "S(z)", &ev.s_z, &sz);
    c.check(ev.j_z == view.j(z), || "J(z) is wrong".into());
    let constancy = sz.iter().all(|&y| *view.f(y) == fz);
    c.check(constancy, || "phi is not constant on S(z)".into());
    c.check(ev.constancy == constancy, || "constancy flag disagrees".into());
    for &y in &sz {
        let sy = view.s(y);
        let cl = view.closure_of(y);
        c.check(sy.iter().all(|p| cl.contains(p)), || format!("S(`{}`) is not inside cl{{`{}`}}", view.space.label(y), view.space.label(y)));
        for &x in view.points.iter().filter(|p| !sy.contains(p)) {
            let rhs = view.f(x).add_rational(&view.d(x, y));
            c.check(*view.f(y) < rhs, || format!("strict inequality fails for y=`{}`, x=`{}`", view.space.label(y), view.space.label(x)));
        }
    }
    let clz = view.closure_of(z);
    for &x in &view.points {
        let ok = if sz.contains(&x) {
            *view.f(x) == fz
        } else if clz.contains(&x) {
            fz < *view.f(x)
        } else {
            fz < view.f(x).add_rational(&view.d(x, z))
        };
        c.check(ok, || format!("split form fails at `{}`", view.space.label(x)));
    }
    c.check(ev.split_form.holds, || "split form flagged as failing".into());
    let t1 = is_t1(view.space);
    c.check(ev.t1_form.is_some() == t1, || "T1 form present iff the space is T1".into());
    if t1 {
        c.check(sz == vec![z], || "S(z) is not {z} on a T1 space".into());
    }
    c.trace(view, &ev.trace, trace_start, z);
}

fn verify_full(c: &mut Checker, space: &FiniteQPSpace, phi: &Objective, z: PointId, ev: &FullEvidence) {
    c.check(ev.epsilon.is_positive() && ev.lambda.is_positive(), || "epsilon and lambda must be positive".into());
    if !ev.lambda.is_positive() {
        return;
    }
    let gamma = &ev.epsilon / &ev.lambda;
    c.check(ev.gamma == gamma, || "gamma differs from epsilon/lambda".into());
    let Some(x0) = c.point(&ev.x0) else { return };
    let Some(f0) = phi.value(x0).finite().cloned() else {
        c.failures.push("x0 is outside dom phi".into());
        return;
    };
    let inf = phi.values().iter().min().cloned().unwrap_or(ExtReal::PlusInfinity);
    c.check(ev.inf_phi == inf, || "inf phi is wrong".into());
    if let ExtReal::Finite(inf) = &inf {
        let margin = &ev.epsilon + inf - &f0;
        c.check(!margin.is_negative(), || "phi(x0) exceeds epsilon + inf phi".into());
        c.check(ev.precondition_margin == margin, || "precondition margin is wrong".into());
    }
    let lsc = space.points().all(|x| {
        space.points().all(|y| !space.d(x, y).is_zero() || phi.value(x) <= phi.value(y))
    });
    c.check(lsc, || "phi is not lsc".into());

    let full = View { space, phi, gamma: gamma.clone(), points: space.points().collect() };
    let x_zero: Vec<PointId> = space
        .points()
        .filter(|&x| *phi.value(x) <= ExtReal::Finite(&f0 + &full.d(x0, x)))
        .collect();
    c.check(ev.x_zero == x_zero.iter().map(|&p| space.label(p).to_string()).collect::<Vec<_>>(), || {
        "X0 listing is wrong".into()
    });
    let closed = space
        .points()
        .all(|x| x_zero.contains(&x) || !x_zero.iter().any(|&a| space.d(x, a).is_zero()));
    c.check(closed && x_zero.contains(&x0), || "X0 is not closed or misses x0".into());
    for &y in &x_zero {
        for x in space.points().filter(|x| !x_zero.contains(x)) {
            c.check(*phi.value(y) < phi.value(x).add_rational(&full.d(x, y)), || {
                format!("claim on X0 fails for y=`{}`, x=`{}`", space.label(y), space.label(x))
            });
        }
    }
    let restricted = View { space, phi, gamma: gamma.clone(), points: x_zero.clone() };
    c.trace(&restricted, &ev.trace, Some(x0), z);

    let fz = phi.value(z).clone();
    c.check(fz.add_rational(&full.d(z, x0)) <= ExtReal::Finite(f0.clone()), || "conclusion (i) fails".into());
    c.check(*space.d(z, x0) <= ev.lambda, || "conclusion (ii) fails".into());
    let sz = full.s(z);
    c.listing(&full, "scaled S(z)", &ev.scaled_s_z, &sz);
    c.check(sz.iter().all(|&y| *phi.value(y) == fz), || "conclusion (iii) fails".into());
    for x in space.points().filter(|x| !sz.contains(x)) {
        c.check(fz < phi.value(x).add_rational(&full.d(x, z)), || {
            format!("conclusion (iv) fails at `{}`", space.label(x))
        });
    }
}

fn verify_takahashi(c: &mut Checker, view: &View, z: Option<PointId>, ev: &TakahashiEvidence) {
    let inf = view.points.iter().map(|&p| view.f(p).clone()).min().unwrap_or(ExtReal::PlusInfinity);
    c.check(ev.inf_phi == inf, || "inf phi is wrong".into());
    let violators: Vec<PointId> = view
        .points
        .iter()
        .copied()
        .filter(|&x| *view.f(x) > inf && !view.s(x).iter().any(|&y| view.f(y) < view.f(x)))
        .collect();
    c.check(ev.hypothesis_holds == violators.is_empty(), || "hypothesis flag disagrees".into());
    match z {
        Some(z) => {
            c.check(violators.is_empty(), || "hypothesis fails but a minimizer was claimed".into());
            c.check(*view.f(z) == inf, || "z is not a minimizer".into());
            match &ev.trace {
                Some(t) => c.trace(view, t, None, z),
                None => c.failures.push("minimizer claimed without a trace".into()),
            }
        }
        None => {
            let w = ev.witness.as_deref().and_then(|l| c.point(l));
            c.check(w.is_some_and(|w| violators.contains(&w)), || "witness does not violate the hypothesis".into());
        }
    }
    for rec in &ev.corollary {
        let (Some(x), Some(y)) = (c.point(&rec.x), rec.witness.as_deref().map(|l| c.point(l)).unwrap_or(None)) else {
            continue;
        };
        let outside = !view.space.d(y, x).is_zero();
        let descends = !view.f(x).is_finite() || view.f(y) < view.f(x);
        c.check(view.member(x, y) && outside && descends, || {
            format!("corollary witness for `{}` is invalid", rec.x)
        });
    }
}

fn verify_caristi(c: &mut Checker, view: &View, z: PointId, ev: &CaristiEvidence) {
    let space = view.space;
    let mut images = Vec::new();
    for x in space.points() {
        let img: Vec<PointId> = match ev.map.get(space.label(x)) {
            Some(MapEntry::One(l)) => c.point(l).into_iter().collect(),
            Some(MapEntry::Many(ls)) => ls.iter().filter_map(|l| c.point(l)).collect(),
            None => Vec::new(),
        };
        c.check(!img.is_empty(), || format!("map has no value at `{}`", space.label(x)));
        c.check(img.iter().any(|&y| view.member(x, y)), || {
            format!("premise fails at `{}`", space.label(x))
        });
        images.push(img);
    }
    let tz = &images[z.0];
    let fz = view.f(z);
    let value_equal = if ev.set_valued {
        tz.iter().any(|&y| view.f(y) == fz)
    } else {
        tz.iter().all(|&y| view.f(y) == fz)
    };
    c.check(value_equal, || "phi(Tz) does not match phi(z)".into());
    c.check(*fz == ev.phi_z, || "phi(z) is wrong".into());
    if is_t1(space) {
        c.check(tz.contains(&z), || "z is not a fixed point on a T1 space".into());
    }
    c.check(ev.fixed_point == tz.contains(&z), || "fixed-point flag disagrees".into());
}

fn verify_equivalence(c: &mut Checker, view: &View, z: Option<PointId>, ev: &EquivalenceEvidence) {
    let working: Vec<PointId> = match &ev.refuting_map {
        Some(m) => m.keys().filter_map(|l| c.point(l)).collect(),
        None => view.points.clone(),
    };
    let wek = working
        .iter()
        .any(|&p| view.f(p).is_finite() && view.s(p).iter().all(|&y| view.f(y) == view.f(p)));
    let not_tak = working.iter().all(|&x| *view.f(x) > view.j(x));
    c.check(ev.instance.wek_holds == wek, || "instance flag wek_holds disagrees".into());
    c.check(ev.instance.not_tak_config == not_tak, || "instance flag not_tak_config disagrees".into());
    c.check(wek != not_tak, || "weak Ekeland and the failing Takahashi configuration coexist".into());
    match (z, &ev.weak, &ev.refuting_map) {
        (Some(z), Some(weak), None) => verify_weak(c, view, z, weak, None),
        (None, None, Some(map)) => {
            c.check(!wek, || "refutation claimed although a weak Ekeland point exists".into());
            for (x, y) in map {
                let (Some(x), Some(y)) = (c.point(x), c.point(y)) else { continue };
                c.check(view.member(x, y) && view.f(y) < view.f(x), || {
                    format!("T(`{}`) = `{}` is not a descent in S(x)", view.space.label(x), view.space.label(y))
                });
            }
        }
        _ => c.failures.push("equivalence certificate has an inconsistent branch".into()),
    }
}

/// Recomputes every claim of `cert`.
pub fn verify(cert: &Certificate, space: &FiniteQPSpace, phi: &Objective) -> VerifyReport {
    let mut c = Checker { space, failures: Vec::new() };
    if phi.len() != space.len() {
        c.failures.push("objective does not match the space".into());
    } else {
        let view = View::whole(space, phi);
        let z = cert.z().map(|l| c.point(l));
        match (cert, z) {
            (_, Some(None)) => {}
            (Certificate::WeakEkeland { evidence, .. }, Some(Some(z))) => verify_weak(&mut c, &view, z, evidence, None),
            (Certificate::FullEkeland { evidence, .. }, Some(Some(z))) => verify_full(&mut c, space, phi, z, evidence),
            (Certificate::Takahashi { evidence, .. }, z) => verify_takahashi(&mut c, &view, z.flatten(), evidence),
            (Certificate::Caristi { evidence, .. }, Some(Some(z))) => verify_caristi(&mut c, &view, z, evidence),
            (Certificate::Equivalence { evidence, .. }, z) => verify_equivalence(&mut c, &view, z.flatten(), evidence),
            _ => c.failures.push("certificate lacks z".into()),
        }
    }
    VerifyReport {
        principle: cert.principle().to_string(),
        valid: c.failures.is_empty(),
        failures: c.failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::fixtures::phi;
    use crate::space::fixtures::*;
    use crate::variational::{
        caristi, equivalence_witness, full_ekeland, takahashi, weak_ekeland, CaristiMap, EquivalenceOutcome,
        FullEkelandParams, TakahashiOutcome,
    };

    const C: PointId = PointId(2);

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn genuine_certificates_verify() {
        let s = e3();
        let f = phi(&["0", "2", "4"]);
        let mut certs = vec![weak_ekeland(&s, &f).unwrap().certificate];
        let p = FullEkelandParams::new(q("4"), q("2"), C).unwrap();
        certs.push(full_ekeland(&s, &f, &p).unwrap().certificate);
        let TakahashiOutcome::Minimizer(sol) = takahashi(&s, &f).unwrap() else { panic!() };
        certs.push(sol.certificate);
        certs.push(caristi(&s, &f, &CaristiMap::identity(&s)).unwrap().certificate);
        let EquivalenceOutcome::WeakEkeland { certificate, .. } = equivalence_witness(&s, &f).unwrap() else {
            panic!()
        };
        certs.push(certificate);
        for cert in &certs {
            let report = verify(cert, &s, &f);
            assert!(report.valid, "{}: {:?}", report.principle, report.failures);
        }
        let e1 = e1();
        let g = phi(&["1", "0"]);
        assert!(verify(&weak_ekeland(&e1, &g).unwrap().certificate, &e1, &g).valid);
    }

    #[test]
    fn tampered_certificates_fail() {
        let s = e3();
        let f = phi(&["0", "2", "4"]);
        let cert = weak_ekeland(&s, &f).unwrap().certificate;
        let Certificate::WeakEkeland { evidence, .. } = cert.clone() else { panic!() };
        let moved = Certificate::WeakEkeland { z: "c".into(), evidence };
        assert!(!verify(&moved, &s, &f).valid);
        // Same certificate against a different objective.
        assert!(!verify(&cert, &s, &phi(&["3", "2", "4"])).valid);

        let TakahashiOutcome::Minimizer(sol) = takahashi(&s, &f).unwrap() else { panic!() };
        let Certificate::Takahashi { evidence, .. } = sol.certificate else { panic!() };
        let wrong = Certificate::Takahashi { z: Some("b".into()), evidence };
        assert!(!verify(&wrong, &s, &f).valid);
    }

    #[test]
    fn violation_certificate_verifies() {
        let s = e2();
        let f = phi(&["0", "1/2"]);
        let TakahashiOutcome::HypothesisViolated { certificate, .. } = takahashi(&s, &f).unwrap() else {
            panic!()
        };
        assert!(verify(&certificate, &s, &f).valid);
        assert!(!verify(&certificate, &s, &phi(&["0", "3"])).valid);
    }
}
