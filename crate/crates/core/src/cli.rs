//! Command-line front end. [`run`] parses arguments, dispatches and returns
//! the process exit code: 0 on success, 2 when input is rejected, 1 on an
//! internal fault or a failing property run.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use indexmap::IndexMap;
use serde::Serialize;

use crate::error::{Error, ErrorKind, Result};
use crate::incompleteness::demo_report;
use crate::objective::{is_d_monotone, is_lsc, is_nearly_lsc, lsc_envelope, NearLscCertificate, Objective, ObjectiveFile};
use crate::order::{order_class, OrderClass, SpecOrder};
use crate::rational::{ExtReal, Rational};
use crate::sequences::{is_left_k_cauchy, is_right_k_cauchy, limit_set, liminf_phi, EpSequence};
use crate::space::{validate_space, FiniteQPSpace, SpaceFile};
use crate::suite::{run_suite, Group, Mutant, SuiteConfig};
use crate::variational::certificate::{Certificate, MapFile};
use crate::variational::{
    caristi, equivalence_witness, full_ekeland, takahashi, weak_ekeland, CaristiMap, EquivalenceOutcome,
    FullEkelandParams, TakahashiOutcome,
};
use crate::verify::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAULT: i32 = 1;
pub const EXIT_REJECTED: i32 = 2;

const SEED_ENV: &str = "QPVAR_SEED";

#[derive(Parser, Debug)]
#[command(name = "qpvar", version, about = "Quasi-pseudometric spaces and variational principles")]
struct Cli {
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check QM1, QM2, QM3 and T1 on a space file.
    Validate { space: PathBuf },
    /// Order class, Hasse reduction and separation flags.
    Report {
        space: PathBuf,
        /// Also classify an objective.
        #[arg(long)]
        phi: Option<PathBuf>,
        /// Sequences such as `pre=[a];cycle=[b,c]`. Repeatable.
        #[arg(long)]
        seq: Vec<String>,
    },
    /// Weak Ekeland point with certificate.
    EkelandWeak { space: PathBuf, phi: PathBuf },
    /// Full Ekeland point for given eps, lambda and start.
    EkelandFull {
        space: PathBuf,
        phi: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        eps: Rational,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Rational,
        #[arg(long)]
        x0: String,
    },
    /// Minimizer under the Takahashi descent hypothesis.
    Takahashi { space: PathBuf, phi: PathBuf },
    /// Caristi point for a single- or set-valued map file.
    Caristi {
        space: PathBuf,
        phi: PathBuf,
        #[arg(long)]
        map: PathBuf,
    },
    /// Instance-level equivalence witness.
    Equivalence { space: PathBuf, phi: PathBuf },
    /// The countable counterexample truncated at N points.
    IncompleteDemo {
        #[arg(long)]
        n: usize,
    },
    /// Randomized property suite.
    PropTest {
        /// Falls back to QPVAR_SEED, then 0.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..=64))]
        max_n: u64,
        #[arg(long)]
        mutant: Option<Mutant>,
        /// Restrict to these groups (criterion numbers 1 to 6). Repeatable.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=6))]
        group: Vec<u8>,
        #[arg(long)]
        fail_fast: bool,
    },
    /// Recompute every claim of a certificate.
    Verify {
        certificate: PathBuf,
        space: PathBuf,
        phi: PathBuf,
    },
}

#[derive(Serialize)]
struct ErrorOutput<'a> {
    error: &'a str,
    message: String,
}

#[derive(Serialize)]
struct Violations {
    #[serde(skip_serializing_if = "Option::is_none")]
    qm1: Option<[String; 1]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    qm2: Option<[String; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    qm3: Option<[String; 2]>,
}

#[derive(Serialize)]
struct ValidateOutput {
    qm1: bool,
    qm2: bool,
    qm3: bool,
    t1: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    violations: Option<Violations>,
}

#[derive(Serialize)]
struct HasseOutput {
    classes: Vec<Vec<String>>,
    /// `[lower, upper]` indices into `classes`.
    covers: Vec<[usize; 2]>,
}

#[derive(Serialize)]
struct PhiOutput {
    proper: bool,
    lsc: bool,
    d_monotone: bool,
    monotonicity_witness: Option<[String; 2]>,
    nearly_lsc: NearLscCertificate,
    inf: ExtReal,
    argmin: Vec<String>,
    lsc_envelope: IndexMap<String, ExtReal>,
}

#[derive(Serialize)]
struct SequenceOutput {
    sequence: String,
    right_k_cauchy: bool,
    left_k_cauchy: bool,
    limits: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    liminf_phi: Option<ExtReal>,
}

#[derive(Serialize)]
struct ReportOutput {
    points: Vec<String>,
    qm1: bool,
    qm2: bool,
    qm3: bool,
    t0: bool,
    t1: bool,
    order_class: OrderClass,
    hasse: HasseOutput,
    #[serde(skip_serializing_if = "Option::is_none")]
    phi: Option<PhiOutput>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    sequences: Vec<SequenceOutput>,
}

struct Io<'a> {
    out: Option<PathBuf>,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Io<'_> {
    fn emit<T: Serialize>(&mut self, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        match &self.out {
            Some(path) => fs::write(path, text)?,
            None => self.stdout.write_all(text.as_bytes())?,
        }
        Ok(())
    }

    fn note(&mut self, msg: &str) {
        let _ = writeln!(self.stderr, "{msg}");
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Malformed(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

fn load_space(path: &Path) -> Result<FiniteQPSpace> {
    read_json::<SpaceFile>(path)?.into_space()
}

fn load(space: &Path, phi: &Path) -> Result<(FiniteQPSpace, Objective)> {
    let s = load_space(space)?;
    let f = read_json::<ObjectiveFile>(phi)?.into_objective(&s)?;
    Ok((s, f))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_REJECTED } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let mut io = Io { out: cli.out, stdout, stderr };
    match dispatch(cli.command, &mut io) {
        Ok(code) => code,
        Err(e) => {
            let (kind, code) = match e.kind() {
                ErrorKind::Rejected => ("rejected", EXIT_REJECTED),
                ErrorKind::Fault => ("fault", EXIT_FAULT),
            };
            io.note(&format!("error: {e}"));
            let _ = io.emit(&ErrorOutput { error: kind, message: e.to_string() });
            code
        }
    }
}

fn dispatch(command: Command, io: &mut Io) -> Result<i32> {
    match command {
        Command::Validate { space } => validate(&space, io),
        Command::Report { space, phi, seq } => report(&space, phi.as_deref(), &seq, io),
        Command::EkelandWeak { space, phi } => {
            let (s, f) = load(&space, &phi)?;
            certificate(io, &weak_ekeland(&s, &f)?.certificate)
        }
        Command::EkelandFull { space, phi, eps, lambda, x0 } => {
            let (s, f) = load(&space, &phi)?;
            let params = FullEkelandParams::new(eps, lambda, s.point(&x0)?)?;
            certificate(io, &full_ekeland(&s, &f, &params)?.certificate)
        }
        Command::Takahashi { space, phi } => {
            let (s, f) = load(&space, &phi)?;
            match takahashi(&s, &f)? {
                TakahashiOutcome::Minimizer(sol) => certificate(io, &sol.certificate),
                TakahashiOutcome::HypothesisViolated { witness, certificate } => {
                    io.note(&format!(
                        "rejected: descent hypothesis fails at `{}`; the certificate records the witness",
                        s.label(witness)
                    ));
                    io.emit(&certificate)?;
                    Ok(EXIT_REJECTED)
                }
            }
        }
        Command::Caristi { space, phi, map } => {
            let (s, f) = load(&space, &phi)?;
            let map = CaristiMap::from_file(&s, &read_json::<MapFile>(&map)?)?;
            certificate(io, &caristi(&s, &f, &map)?.certificate)
        }
        Command::Equivalence { space, phi } => {
            let (s, f) = load(&space, &phi)?;
            match equivalence_witness(&s, &f)? {
                EquivalenceOutcome::WeakEkeland { certificate: c, .. }
                | EquivalenceOutcome::CaristiRefutation { certificate: c, .. } => certificate(io, &c),
            }
        }
        Command::IncompleteDemo { n } => {
            let report = demo_report(n)?;
            io.emit(&report)?;
            if report.passed {
                Ok(EXIT_OK)
            } else {
                io.note("incompleteness demo: a check failed");
                Ok(EXIT_FAULT)
            }
        }
        Command::PropTest { seed, count, max_n, mutant, group, fail_fast } => {
            let seed = match seed {
                Some(s) => s,
                None => match std::env::var(SEED_ENV) {
                    Ok(v) => v
                        .trim()
                        .parse()
                        .map_err(|_| Error::Malformed(format!("{SEED_ENV} must be an unsigned integer, got `{v}`")))?,
                    Err(_) => 0,
                },
            };
            let groups = group.into_iter().map(|g| Group::ALL[g as usize - 1]).collect();
            let config = SuiteConfig { seed, count, max_n: max_n as usize, groups, mutant, fail_fast };
            let report = run_suite(&config);
            for w in &report.warnings {
                io.note(&format!("warning: {w}"));
            }
            for g in &report.groups {
                io.note(&format!(
                    "criterion {} {:?}: {} checks, {} failed, {:.2?}",
                    g.criterion,
                    g.group,
                    g.total_checks(),
                    g.failed_checks(),
                    g.elapsed
                ));
            }
            io.emit(&report)?;
            Ok(if report.passed { EXIT_OK } else { EXIT_FAULT })
        }
        Command::Verify { certificate, space, phi } => {
            let (s, f) = load(&space, &phi)?;
            let cert: Certificate = read_json(&certificate)?;
            let report = verify(&cert, &s, &f);
            io.emit(&report)?;
            if report.valid {
                Ok(EXIT_OK)
            } else {
                for msg in &report.failures {
                    io.note(&format!("verify: {msg}"));
                }
                Ok(EXIT_REJECTED)
            }
        }
    }
}

fn certificate(io: &mut Io, cert: &Certificate) -> Result<i32> {
    io.emit(cert)?;
    Ok(EXIT_OK)
}

fn validate(path: &Path, io: &mut Io) -> Result<i32> {
    let file: SpaceFile = read_json(path)?;
    let v = validate_space(&file.d)?;
    let label = |i: usize| file.points.get(i).cloned().unwrap_or_else(|| i.to_string());
    let violations = Violations {
        qm1: v.qm1_violation.map(|i| [label(i)]),
        qm2: v.qm2_violation.map(|(i, j, k)| [label(i), label(j), label(k)]),
        qm3: v.qm3_violation.map(|(i, j)| [label(i), label(j)]),
    };
    let any = violations.qm1.is_some() || violations.qm2.is_some() || violations.qm3.is_some();
    io.emit(&ValidateOutput {
        qm1: v.qm1_ok,
        qm2: v.qm2_ok,
        qm3: v.qm3_ok,
        t1: v.t1_ok,
        violations: any.then_some(violations),
    })?;
    if v.is_valid() {
        Ok(EXIT_OK)
    } else {
        io.note("not a quasi-pseudometric");
        Ok(EXIT_REJECTED)
    }
}

fn report(space: &Path, phi: Option<&Path>, seqs: &[String], io: &mut Io) -> Result<i32> {
    let s = load_space(space)?;
    let f = phi.map(|p| read_json::<ObjectiveFile>(p)?.into_objective(&s)).transpose()?;
    let v = s.validation();
    let hasse = SpecOrder::new(&s).hasse();
    let names = |set: &crate::space::PointSet| s.set_labels(set);
    let phi = f.as_ref().map(|f| {
        let mono = is_d_monotone(&s, f);
        PhiOutput {
            proper: f.is_proper(),
            lsc: is_lsc(&s, f),
            d_monotone: mono.monotone,
            monotonicity_witness: mono.witness.map(|(x, y)| [s.label(x).to_string(), s.label(y).to_string()]),
            nearly_lsc: is_nearly_lsc(&s, f),
            inf: f.inf(),
            argmin: names(&f.argmin_set()),
            lsc_envelope: ObjectiveFile::from_objective(&s, &lsc_envelope(&s, f)).phi,
        }
    });
    let sequences = seqs
        .iter()
        .map(|text| {
            let seq = EpSequence::parse(&s, text)?;
            Ok(SequenceOutput {
                sequence: text.clone(),
                right_k_cauchy: is_right_k_cauchy(&s, &seq),
                left_k_cauchy: is_left_k_cauchy(&s, &seq),
                limits: names(&limit_set(&s, &seq)),
                liminf_phi: f.as_ref().map(|f| liminf_phi(&s, &seq, f)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    io.emit(&ReportOutput {
        points: s.labels().to_vec(),
        qm1: v.qm1_ok,
        qm2: v.qm2_ok,
        qm3: v.qm3_ok,
        t0: v.qm3_ok,
        t1: v.t1_ok,
        order_class: order_class(&s),
        hasse: HasseOutput {
            classes: hasse
                .classes
                .iter()
                .map(|c| c.iter().map(|&p| s.label(p).to_string()).collect())
                .collect(),
            covers: hasse.covers.iter().map(|&(a, b)| [a, b]).collect(),
        },
        phi,
        sequences,
    })?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("qpvar").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn unknown_command_is_usage_error() {
        let (code, _, err) = run_args(&["frobnicate"]);
        assert_eq!(code, EXIT_REJECTED);
        assert!(err.contains("Usage"));
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("ekeland-full"));
    }

    #[test]
    fn missing_file_is_rejected() {
        let (code, out, _) = run_args(&["validate", "/nonexistent/space.json"]);
        assert_eq!(code, EXIT_REJECTED);
        assert!(out.contains("\"rejected\""));
    }

    #[test]
    fn demo_phi_table() {
        let (code, out, _) = run_args(&["incomplete-demo", "--n", "3"]);
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["phi"], serde_json::json!({"x1": "1", "x2": "1/2", "x3": "1/4"}));
    }

    #[test]
    fn demo_rejects_small_n() {
        assert_eq!(run_args(&["incomplete-demo", "--n", "1"]).0, EXIT_REJECTED);
    }

    #[test]
    fn prop_test_zero_count() {
        let (code, _, err) = run_args(&["prop-test", "--count", "0"]);
        assert_eq!(code, EXIT_OK);
        assert!(err.contains("vacuous"));
    }
}
