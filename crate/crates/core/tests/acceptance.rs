//! Acceptance run: one line per criterion, nonzero exit if any fails.
//!
//! `QPVAR_SEED` overrides the base seed of the random instances.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use qpvar::incompleteness::{demo_report, demo_space, HarmonicSpace};
use qpvar::rational::Rational;
use qpvar::space::PointId;
use qpvar::suite::{run_suite, Group, Mutant, SuiteConfig, SuiteReport};

const COUNT: usize = 1000;
const MAX_N: usize = 8;
const AXIOM_BUDGET: Duration = Duration::from_secs(10);
const DEMO_BUDGET: Duration = Duration::from_secs(1);
const DEMO_MAX_N: usize = 64;

struct Line {
    criterion: u8,
    name: &'static str,
    passed: bool,
    detail: String,
}

fn base_seed() -> u64 {
    std::env::var("QPVAR_SEED").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(0)
}

fn config(groups: Vec<Group>, mutant: Option<Mutant>) -> SuiteConfig {
    SuiteConfig {
        seed: base_seed(),
        count: COUNT,
        max_n: MAX_N,
        groups,
        mutant,
        fail_fast: mutant.is_some(),
    }
}

fn group_line(report: &SuiteReport, group: Group, name: &'static str) -> Line {
    let g = report.group(group).expect("group was run");
    let first = report.failures.iter().find(|f| f.group == group);
    let mut detail = format!(
        "{} instances, {} checks, {} failed, {:.2?}",
        g.instances,
        g.total_checks(),
        g.failed_checks(),
        g.elapsed
    );
    if let Some(f) = first {
        detail.push_str(&format!("; first: {} on instance {} (seed {}) {}", f.check, f.instance, f.seed, f.detail));
    }
    Line {
        criterion: group.criterion(),
        name,
        passed: g.passed && g.instances == COUNT,
        detail,
    }
}

fn axioms() -> Line {
    let start = Instant::now();
    let report = run_suite(&config(vec![Group::Axioms], None));
    let wall = start.elapsed();
    let mut line = group_line(&report, Group::Axioms, "axioms and topology");
    line.passed &= wall < AXIOM_BUDGET;
    line.detail.push_str(&format!("; wall {wall:.2?} (budget {AXIOM_BUDGET:?})"));
    line
}

/// Runs the countable example for every truncation level and rechecks the
/// headline claims against direct rational arithmetic.
fn incompleteness() -> Line {
    let start = Instant::now();
    let mut problems = Vec::new();
    for n in 2..=DEMO_MAX_N {
        let report = match demo_report(n) {
            Ok(r) => r,
            Err(e) => {
                problems.push(format!("N={n}: {e}"));
                continue;
            }
        };
        if !report.passed {
            problems.push(format!("N={n}: report did not pass"));
        }
        let space = demo_space(n).expect("n >= 2");
        for m in 0..n {
            for k in 0..m {
                if !space.d(PointId(m), PointId(k)).is_zero() {
                    problems.push(format!("N={n}: d(x{}, x{}) != 0", m + 1, k + 1));
                }
            }
        }
        for k in 1..n {
            let phi_next = Rational::inv_pow2(k as u32);
            let d_next = (HarmonicSpace::value(k + 1) - HarmonicSpace::value(k)).max(Rational::zero());
            let lhs = &phi_next + &d_next;
            let bound = Rational::new(3, 1) * Rational::inv_pow2(k as u32 + 1);
            if !(lhs <= bound && bound < Rational::inv_pow2(k as u32 - 1)) {
                problems.push(format!("N={n}: chain fails at k={k}"));
            }
            let rec = &report.refutation.chain[k - 1];
            if rec.lhs != lhs || rec.bound != bound {
                problems.push(format!("N={n}: chain record at k={k} disagrees with direct computation"));
            }
        }
        if !report.cauchy.witnesses.iter().all(|w| w.holds) {
            problems.push(format!("N={n}: a non-convergence witness fails"));
        }
        if report.refutation.reconciliation.weak_ekeland_z != format!("x{n}") {
            problems.push(format!(
                "N={n}: weak Ekeland gave {} instead of x{n}",
                report.refutation.reconciliation.weak_ekeland_z
            ));
        }
    }
    let wall = start.elapsed();
    let passed = problems.is_empty() && wall < DEMO_BUDGET;
    let mut detail = format!("N = 2..={DEMO_MAX_N}, wall {wall:.2?} (budget {DEMO_BUDGET:?})");
    if let Some(p) = problems.first() {
        detail.push_str(&format!("; {} problems, first: {p}", problems.len()));
    }
    Line { criterion: 7, name: "incompleteness reproduction", passed, detail }
}

fn mutants() -> Line {
    let mut caught = Vec::new();
    let mut missed = Vec::new();
    for m in Mutant::ALL {
        let report = run_suite(&config(Group::ALL.to_vec(), Some(m)));
        match report.failures.first() {
            Some(f) => caught.push(format!("{m}: {} at instance {}", f.check, f.instance)),
            None => missed.push(m.to_string()),
        }
    }
    let mut detail = caught.join("; ");
    if !missed.is_empty() {
        detail.push_str(&format!("; not caught: {}", missed.join(", ")));
    }
    Line { criterion: 8, name: "mutation sanity", passed: missed.is_empty(), detail }
}

fn main() -> ExitCode {
    // Accept and ignore libtest flags such as --nocapture or a filter.
    let mut lines = vec![axioms()];
    let rest = run_suite(&config(Group::ALL[1..].to_vec(), None));
    lines.push(group_line(&rest, Group::Order, "order and separation"));
    lines.push(group_line(&rest, Group::Semicontinuity, "semicontinuity"));
    lines.push(group_line(&rest, Group::Picard, "S-sets and Picard"));
    lines.push(group_line(&rest, Group::Principles, "principles"));
    lines.push(group_line(&rest, Group::Equivalence, "equivalence"));
    lines.push(incompleteness());
    lines.push(mutants());

    println!("acceptance (seed {}, {COUNT} instances, n <= {MAX_N})", base_seed());
    for l in &lines {
        let tag = if l.passed { "PASS" } else { "FAIL" };
        println!("criterion {} [{tag}] {}: {}", l.criterion, l.name, l.detail);
    }
    let failed = lines.iter().filter(|l| !l.passed).count();
    println!("{} of {} criteria passed", lines.len() - failed, lines.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
