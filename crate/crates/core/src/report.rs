//! What the command-line tool runs: job descriptions, their JSON
//! documents, and `verify`.
//!
//! Every document carries `"schemaVersion": 1`; keys appear in a fixed order
//! and ring elements are decimal strings, so equal jobs give byte-identical
//! output.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::coeff_ring::{IntPoly, PrimeConfig};
use crate::error::{Error, Result};
use crate::hecke_ring::{a1_mul, b_prime, b_prime_pow, d_coeff, w_closed, w_coeffs, A1Elem};
use crate::koszul::{
    basis_image_identity, h0_vanishes, h1_vanishes_window, h2_cokernel, relation_matrix, top_generator_identity,
    CheckReport, KoszulJob,
};
use crate::linalg_local::{invariant_runs, modules_match, Relation};
use crate::theorem::{
    claimed_presentation, height1_reference, leading_term_check, omitted_relations_check, relation_indices,
    relation_r, relation_r_formula, torsion_and_sharpness, Height1Entry,
};

pub const SCHEMA_VERSION: u32 = 1;

/// `(p, m)` pairs of the height-1 reference table.
pub const HEIGHT1_TABLE: [(u64, u32); 12] = [
    (2, 0),
    (2, 1),
    (2, 3),
    (2, 4),
    (2, 5),
    (2, 7),
    (3, 1),
    (3, 2),
    (5, 2),
    (5, 3),
    (7, 1),
    (7, 4),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    WCoeffs,
    DCoeffs,
    Presentation,
    Cohomology,
    Verify,
    Height1,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::WCoeffs => "w-coeffs",
            Command::DCoeffs => "d-coeffs",
            Command::Presentation => "presentation",
            Command::Cohomology => "cohomology",
            Command::Verify => "verify",
            Command::Height1 => "height1",
        }
    }
}

/// One CLI invocation. Missing precisions fall back to the level defaults.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobSpec {
    pub command: Command,
    pub p: Option<u64>,
    pub m: Option<u32>,
    pub p_prec: Option<u32>,
    pub a_prec: Option<usize>,
    pub out: Option<PathBuf>,
    pub pretty: bool,
    pub window: Option<usize>,
}

impl JobSpec {
    pub fn new(command: Command) -> Self {
        JobSpec {
            command,
            p: None,
            m: None,
            p_prec: None,
            a_prec: None,
            out: None,
            pretty: false,
            window: None,
        }
    }

    pub fn prime(mut self, p: u64) -> Self {
        self.p = Some(p);
        self
    }

    pub fn level(mut self, m: u32) -> Self {
        self.m = Some(m);
        self
    }

    pub fn pretty(mut self, on: bool) -> Self {
        self.pretty = on;
        self
    }

    fn require_p(&self) -> Result<u64> {
        self.p.ok_or_else(|| Error::InvalidPrecision(format!("{} needs --prime", self.command.name())))
    }

    fn require_m(&self) -> Result<u32> {
        self.m.ok_or_else(|| Error::InvalidPrecision(format!("{} needs --m", self.command.name())))
    }

    /// The Koszul job with defaults applied.
    pub fn job(&self) -> Result<KoszulJob> {
        let (p, m) = (self.require_p()?, self.require_m()?);
        let defaults = PrimeConfig::for_level(p, m)?;
        let cfg = PrimeConfig::new(
            p,
            self.p_prec.unwrap_or(defaults.p_prec),
            self.a_prec.unwrap_or(defaults.a_prec),
        )?;
        if cfg.p_prec < m + 1 {
            return Err(Error::PrecisionGuard {
                m,
                p_prec: cfg.p_prec,
                required: m + 1,
            });
        }
        Ok(KoszulJob::new(cfg, m))
    }
}

/// Exit status and rendered document of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub document: String,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

pub fn render(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

pub fn run(spec: &JobSpec) -> RunOutcome {
    match document(spec) {
        Ok((doc, pass)) => RunOutcome {
            exit_code: if pass { EXIT_OK } else { EXIT_VERIFY_FAILED },
            document: render(&doc),
        },
        Err(e) => RunOutcome {
            exit_code: EXIT_INVALID,
            document: render(&json!({
                "schemaVersion": SCHEMA_VERSION,
                "command": spec.command.name(),
                "error": e.to_string(),
            })),
        },
    }
}

/// Builds the JSON document for a job; the flag is false only for a failed
/// verification.
pub fn document(spec: &JobSpec) -> Result<(Value, bool)> {
    let header = |extra: Value| {
        let mut doc = json!({ "schemaVersion": SCHEMA_VERSION, "command": spec.command.name() });
        if let (Value::Object(d), Value::Object(e)) = (&mut doc, extra) {
            d.extend(e);
        }
        doc
    };
    match spec.command {
        Command::WCoeffs => {
            let p = spec.require_p()?;
            let w = w_coeffs(p)?;
            let rendered: Vec<String> = w.w.iter().map(ToString::to_string).collect();
            let closed = (2..=p).all(|i| w_closed(p, i).ok().as_ref() == Some(&w.w[i as usize]));
            Ok((header(json!({ "p": p, "w": w.w, "rendered": rendered, "closedFormAgrees": closed })), true))
        }
        Command::DCoeffs => {
            let p = spec.require_p()?;
            let w = w_coeffs(p)?;
            let max_tau = spec.m.unwrap_or(p as u32 + 1).max(1);
            let mut rows = Vec::new();
            for tau in 1..=max_tau {
                let d: Vec<IntPoly> = (0..=p as usize).map(|i| d_coeff(&w, i, tau)).collect::<Result<_>>()?;
                let agrees = b_prime_pow(&w, tau).coords == d;
                rows.push(json!({ "tau": tau, "d": d, "oracleAgrees": agrees }));
            }
            Ok((header(json!({ "p": p, "coefficients": rows })), true))
        }
        Command::Presentation => {
            let (p, m) = (spec.require_p()?, spec.require_m()?);
            let claimed = claimed_presentation(p, m)?;
            let mut doc = header(serde_json::to_value(&claimed).expect("serializable"));
            if spec.pretty {
                let eqs: Vec<String> = claimed.presentation.relations.iter().map(pretty_relation).collect();
                doc["pretty"] = json!(eqs);
            }
            Ok((doc, true))
        }
        Command::Cohomology => {
            let job = spec.job()?;
            let h0 = h0_vanishes(&job);
            let h1 = h1_vanishes_window(&job, spec.window)?;
            let coker = h2_cokernel(&job)?;
            let rm = relation_matrix(&job);
            let doc = header(json!({
                "p": job.p(),
                "m": job.m,
                "pPrec": job.cfg.p_prec,
                "aPrec": job.cfg.a_prec,
                "h0": h0,
                "h1": h1,
                "h2": {
                    "zero": coker.is_zero(),
                    "invariants": invariant_runs(&coker.invariants),
                    "relationMatrix": rm.entries,
                    "span": coker.span.to_matrix(),
                },
            }));
            Ok((doc, true))
        }
        Command::Verify => {
            let job = spec.job()?;
            let report = verify(&job, spec.window)?;
            let pass = report.pass;
            Ok((header(serde_json::to_value(&report).expect("serializable")), pass))
        }
        Command::Height1 => {
            let entries: Vec<Height1Entry> = match (spec.p, spec.m) {
                (Some(p), Some(m)) => vec![height1_reference(p, m)?],
                (p, _) => HEIGHT1_TABLE
                    .iter()
                    .filter(|(q, _)| p.is_none_or(|p| p == *q))
                    .map(|&(q, m)| height1_reference(q, m))
                    .collect::<Result<_>>()?,
            };
            Ok((header(json!({ "entries": entries })), true))
        }
    }
}

fn term(c: &IntPoly, label: &str) -> (bool, String) {
    let negative = c.leading_coeff() < num_bigint::BigInt::from(0);
    let c = if negative { -c } else { c.clone() };
    let body = if c == IntPoly::one() {
        label.to_string()
    } else if c.coeffs().iter().filter(|x| **x != num_bigint::BigInt::from(0)).count() > 1 {
        format!("({c}) {label}")
    } else {
        format!("{c} {label}")
    };
    (negative, body)
}

/// Renders `sum c_i x_i = 0` by moving the last nonzero term to the left,
/// e.g. `2x1 - a x2` becomes `a x2 = 2 x1`.
pub fn pretty_relation(rel: &Relation) -> String {
    let labels: Vec<String> = (1..=rel.coeffs.len()).map(|i| format!("x{i}")).collect();
    let Some(last) = rel.coeffs.iter().rposition(|c| !c.is_zero()) else {
        return "0 = 0".into();
    };
    let (lhs_neg, lhs) = term(&-&rel.coeffs[last], &labels[last]);
    // flip both sides so the left has positive leading coefficient
    let flip = lhs_neg;
    let mut rhs = String::new();
    for (i, c) in rel.coeffs[..last].iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let (neg, body) = term(c, &labels[i]);
        let neg = neg != flip;
        match (rhs.is_empty(), neg) {
            (true, true) => rhs.push_str(&format!("-{body}")),
            (true, false) => rhs.push_str(&body),
            (false, true) => rhs.push_str(&format!(" - {body}")),
            (false, false) => rhs.push_str(&format!(" + {body}")),
        }
    }
    if rhs.is_empty() {
        rhs.push('0');
    }
    format!("{lhs} = {rhs}")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifyReport {
    pub p: u64,
    pub m: u32,
    pub p_prec: u32,
    pub a_prec: usize,
    pub pass: bool,
    pub failed: Vec<String>,
    pub checks: Vec<CheckReport>,
}

type Task<'a> = Box<dyn Fn() -> Result<CheckReport> + Send + Sync + 'a>;

/// Runs the full suite for one job. Checks run in parallel; the report keeps
/// a fixed order.
pub fn verify(job: &KoszulJob, window: Option<usize>) -> Result<VerifyReport> {
    let (p, m) = (job.p(), job.m);
    if job.cfg.p_prec < m + 1 {
        return Err(Error::PrecisionGuard {
            m,
            p_prec: job.cfg.p_prec,
            required: m + 1,
        });
    }
    let w = w_coeffs(p)?;
    let mut tasks: Vec<Task<'_>> = vec![
        Box::new(|| {
            let ok = (2..=p).all(|i| w_closed(p, i).ok().as_ref() == Some(&w.w[i as usize]));
            Ok(CheckReport::new("w-closed-form", ok))
        }),
        Box::new(|| {
            let prod = a1_mul(&A1Elem::basis(p, 1), &b_prime(&w), &w);
            Ok(CheckReport::new("b-times-b-prime", prod == A1Elem::scalar(p, w.w[0].clone())))
        }),
        Box::new(|| {
            let max_tau = m.max(p as u32 + 1);
            let mut bad = Vec::new();
            for tau in 1..=max_tau {
                let oracle = b_prime_pow(&w, tau);
                for i in 0..=p as usize {
                    if d_coeff(&w, i, tau)? != oracle.coords[i] {
                        bad.push(json!({ "i": i, "tau": tau }));
                    }
                }
            }
            let mut rep = CheckReport::new("d-formula-vs-oracle", bad.is_empty())
                .with_detail(format!("tau = 1..={max_tau}"));
            rep.witness = bad.first().cloned();
            Ok(rep)
        }),
        Box::new(|| {
            let rm = relation_matrix(job);
            let max = rm.entries.iter().flatten().filter_map(IntPoly::degree).max().unwrap_or(0);
            Ok(CheckReport::new("relation-degree-bound", max <= m as usize)
                .with_detail(format!("max a-degree {max}, bound {m}")))
        }),
        Box::new(|| Ok(basis_image_identity(job))),
        Box::new(|| Ok(top_generator_identity(job))),
        Box::new(|| Ok(h0_vanishes(job))),
        Box::new(move || h1_vanishes_window(job, window)),
        Box::new(|| modules_match_ladder(job)),
    ];
    if m >= 1 {
        tasks.push(Box::new(|| torsion_and_sharpness(p, m, &job.cfg)));
    }
    if m >= 2 {
        tasks.push(Box::new(|| {
            let subs = relation_indices(p, m)
                .into_iter()
                .map(|j| Ok(CheckReport::new(format!("r{j}"), leading_term_check(p, m, j)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(CheckReport::all("leading-term", subs))
        }));
        tasks.push(Box::new(|| {
            let subs = relation_indices(p, m)
                .into_iter()
                .map(|j| Ok(CheckReport::new(format!("r{j}"), relation_r(p, m, j)? == relation_r_formula(p, m, j)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(CheckReport::all("relations-formula-vs-oracle", subs))
        }));
    }
    if m > p as u32 + 2 {
        tasks.push(Box::new(|| omitted_relations_check(p, m, &job.cfg)));
    }

    let checks: Vec<CheckReport> = tasks.par_iter().map(|t| t()).collect::<Result<_>>()?;
    let failed: Vec<String> = checks.iter().filter(|c| !c.pass).map(|c| c.check.clone()).collect();
    Ok(VerifyReport {
        p,
        m,
        p_prec: job.cfg.p_prec,
        a_prec: job.cfg.a_prec,
        pass: failed.is_empty(),
        failed,
        checks,
    })
}

/// Claimed vs computed presentation at `K` and `2K`.
pub fn modules_match_ladder(job: &KoszulJob) -> Result<CheckReport> {
    let claimed = claimed_presentation(job.p(), job.m)?;
    let ladder = [job.cfg.a_prec, 2 * job.cfg.a_prec];
    let subs = ladder
        .par_iter()
        .map(|&k| {
            let cfg = job.cfg.with_a_prec(k)?;
            let coker = h2_cokernel(&KoszulJob::new(cfg, job.m))?;
            let report = modules_match(&claimed.presentation, &coker.span, &cfg)?;
            let mut rep = CheckReport::new(format!("aPrec {k}"), report.matched)
                .with_detail(format!("invariants {}", runs_text(&report.computed_invariants)));
            if !report.matched {
                rep.witness = Some(serde_json::to_value(&report).expect("serializable"));
            }
            Ok(rep)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CheckReport::all("modules-match", subs))
}

fn runs_text(orders: &[u64]) -> String {
    let parts: Vec<String> = invariant_runs(orders)
        .into_iter()
        .map(|r| format!("{}^{}", r.order, r.multiplicity))
        .collect();
    if parts.is_empty() {
        "none".into()
    } else {
        parts.join(" ")
    }
}

/// Runs several jobs in parallel, returning reports in input order.
pub fn verify_many(jobs: &[KoszulJob]) -> Result<Vec<VerifyReport>> {
    jobs.par_iter().map(|j| verify(j, None)).collect()
}

/// Stored documents that must be reproduced byte for byte.
pub struct GoldenCase {
    pub name: &'static str,
    pub expected: &'static str,
    pub spec: fn() -> JobSpec,
}

macro_rules! golden {
    ($name:literal, $spec:expr) => {
        GoldenCase {
            name: $name,
            expected: include_str!(concat!("../golden/", $name, ".json")),
            spec: || $spec,
        }
    };
}

pub fn golden_cases() -> Vec<GoldenCase> {
    vec![
        golden!("presentation_p2_m2", JobSpec::new(Command::Presentation).prime(2).level(2).pretty(true)),
        golden!("presentation_p2_m3", JobSpec::new(Command::Presentation).prime(2).level(3).pretty(true)),
        golden!("presentation_p2_m4", JobSpec::new(Command::Presentation).prime(2).level(4).pretty(true)),
        golden!("presentation_p2_m5", JobSpec::new(Command::Presentation).prime(2).level(5).pretty(true)),
        golden!("w_coeffs_p2", JobSpec::new(Command::WCoeffs).prime(2)),
        golden!("w_coeffs_p3", JobSpec::new(Command::WCoeffs).prime(3)),
        golden!("height1_table", JobSpec::new(Command::Height1)),
        golden!("height1_p5_m2", JobSpec::new(Command::Height1).prime(5).level(2)),
    ]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoldenResult {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diff: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoldenSuite {
    pub pass: bool,
    pub cases: Vec<GoldenResult>,
}

/// Reruns every stored case; mismatches carry a unified diff.
pub fn golden_corpus() -> GoldenSuite {
    let cases: Vec<GoldenResult> = golden_cases()
        .into_iter()
        .map(|case| {
            let got = run(&(case.spec)()).document;
            let pass = got == case.expected;
            let diff = (!pass).then(|| {
                similar::TextDiff::from_lines(case.expected, &got)
                    .unified_diff()
                    .header("expected", "actual")
                    .to_string()
            });
            GoldenResult {
                name: case.name.into(),
                pass,
                diff,
            }
        })
        .collect();
    GoldenSuite {
        pass: cases.iter().all(|c| c.pass),
        cases,
    }
}
