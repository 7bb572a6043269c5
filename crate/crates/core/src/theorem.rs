//! The claimed presentations of `B_m` and the claims that accompany them, as
//! objects that can be checked against the computed cokernel.
//!
//! For `m >= 2`, `B_m` is the quotient of
//! `(A0/p^m)^(p-1) x_1..x_(p-1)  +  (A0/p^(m-1)) x_p` by the relations
//! `r_j = w_0^(m-1-j) sum_i d_{i,j+1} x_i` for `j` in `J(m, p)`, where
//! `J = 1..=m-1` if `m <= p + 2` and `J = m-p-1..=m-1` otherwise.
//! `x_i` stands for `b^i`, so `r_j` is the image of `b^(m-1-j)`.

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;
use serde_json::json;

use crate::coeff_ring::{is_prime, IntPoly, PrimeConfig};
use crate::error::{Error, Result};
use crate::hecke_ring::{b_prime_pow, d_coeff, w_coeffs};
use crate::koszul::{h2_cokernel, project, CheckReport, KoszulJob};
use crate::linalg_local::{member, residue_strings, ModulePresentation};

/// A claimed presentation together with the relation indices it uses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClaimedPresentation {
    pub source: &'static str,
    pub p: u64,
    pub m: u32,
    pub relation_indices: Vec<u32>,
    #[serde(flatten)]
    pub presentation: ModulePresentation,
}

/// `J(m, p)`.
pub fn relation_indices(p: u64, m: u32) -> Vec<u32> {
    let p = p as u32;
    match m {
        0 | 1 => Vec::new(),
        m if m <= p + 2 => (1..m).collect(),
        m => (m - p - 1..m).collect(),
    }
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

fn check_index(p: u64, m: u32, j: u32) -> Result<()> {
    let range = relation_indices(p, m);
    if range.contains(&j) {
        return Ok(());
    }
    let range = match (range.first(), range.last()) {
        (Some(lo), Some(hi)) => format!("{lo}..={hi}"),
        _ => "an empty range".into(),
    };
    Err(Error::IndexOutOfRange {
        what: "j",
        value: j as i64,
        range,
    })
}

/// `r_j` from the multiplication oracle: the projection of
/// `w_0^(m-1-j) b'^(j+1)`.
pub fn relation_r(p: u64, m: u32, j: u32) -> Result<Vec<IntPoly>> {
    check_prime(p)?;
    check_index(p, m, j)?;
    Ok(relation_vector(p, m, j))
}

fn relation_vector(p: u64, m: u32, j: u32) -> Vec<IntPoly> {
    let w = w_coeffs(p).expect("prime checked");
    let scale = w.w[0].pow(m - 1 - j);
    project(&b_prime_pow(&w, j + 1).scale(&scale))
}

/// `r_j` from the closed composition-sum formula for `d_{i,j+1}`.
pub fn relation_r_formula(p: u64, m: u32, j: u32) -> Result<Vec<IntPoly>> {
    check_prime(p)?;
    check_index(p, m, j)?;
    let w = w_coeffs(p)?;
    let scale = w.w[0].pow(m - 1 - j);
    (1..=p as usize)
        .map(|i| Ok(&scale * &d_coeff(&w, i, j + 1)?))
        .collect()
}

pub fn claimed_presentation(p: u64, m: u32) -> Result<ClaimedPresentation> {
    check_prime(p)?;
    let n = p as usize;
    let exponents: Vec<Option<u32>> = match m {
        0 => vec![Some(0); n],
        m => (1..=n).map(|i| Some(if i < n { m } else { m - 1 })).collect(),
    };
    let mut presentation = ModulePresentation::with_generators(p, &exponents);
    let indices = relation_indices(p, m);
    for &j in &indices {
        presentation.push_relation(format!("r{j}"), relation_vector(p, m, j));
    }
    Ok(ClaimedPresentation {
        source: "claimed",
        p,
        m,
        relation_indices: indices,
        presentation,
    })
}

/// Whether the `x_p` coefficient of `r_j` has `a^j`-coefficient equal to
/// that of `(-1)^(j+1) w_0^(m-1-j) w_1^j`, i.e. `-w_0^(m-1-j)`.
pub fn leading_term_check(p: u64, m: u32, j: u32) -> Result<bool> {
    let r = relation_r(p, m, j)?;
    let w = w_coeffs(p)?;
    let sign = if (j + 1).is_multiple_of(2) { BigInt::one() } else { -BigInt::one() };
    let expected = (&w.w[0].pow(m - 1 - j) * &w.w[1].pow(j)).scale(&sign);
    Ok(r[p as usize - 1].coeff(j as usize) == expected.coeff(j as usize))
}

/// `p^m x_i = 0` (`i < p`) and `p^(m-1) x_p = 0` in the computed cokernel,
/// and neither exponent can be lowered.
pub fn torsion_and_sharpness(p: u64, m: u32, cfg: &PrimeConfig) -> Result<CheckReport> {
    if cfg.p != p {
        return Err(Error::ConfigMismatch);
    }
    if m == 0 {
        return Err(Error::IndexOutOfRange {
            what: "m",
            value: 0,
            range: "1..".into(),
        });
    }
    let coker = h2_cokernel(&KoszulJob::new(*cfg, m))?;
    let n = p as usize;
    let mut subs = Vec::new();
    let mut probe = |g: usize, e: u32, expect_member: bool| -> Result<()> {
        let v = coker.generator_multiple(g, cfg.p_pow(e));
        let outcome = member(&v, &coker.span)?;
        let ok = outcome.is_member() == expect_member;
        let name = format!(
            "{}x{} {}",
            if e == 0 { String::new() } else { p.pow(e).to_string() },
            g + 1,
            if expect_member { "= 0" } else { "!= 0" }
        );
        let mut rep = CheckReport::new(name, ok);
        if let (false, crate::linalg_local::Membership::Outside { remainder }) = (ok, &outcome) {
            rep.witness = Some(json!(residue_strings(remainder)));
        }
        subs.push(rep);
        Ok(())
    };
    for g in 0..n - 1 {
        probe(g, m, true)?;
    }
    probe(n - 1, m - 1, true)?;
    for g in 0..n - 1 {
        probe(g, m - 1, false)?;
    }
    if m >= 2 {
        probe(n - 1, m - 2, false)?;
    }
    Ok(CheckReport::all("torsion-and-sharpness", subs))
}

/// For `m > p + 2`, whether the relations `r_j` with `j < m - p - 1` that the
/// claimed presentation leaves out already follow from it.
pub fn omitted_relations_check(p: u64, m: u32, cfg: &PrimeConfig) -> Result<CheckReport> {
    let claimed = claimed_presentation(p, m)?;
    let lo = claimed.relation_indices.first().copied().unwrap_or(1);
    let span = claimed.presentation.span(cfg);
    let k = cfg.a_prec;
    let mut subs = Vec::new();
    for j in 1..lo.max(1) {
        let r = relation_vector(p, m, j);
        let mut probe = ModulePresentation::with_generators(p, &vec![None; p as usize]);
        probe.push_relation(format!("r{j}"), r);
        let rows = probe.flat_relations(cfg);
        let mut ok = true;
        for shift in 0..k {
            if !member(rows.row(shift), &span)?.is_member() {
                ok = false;
                break;
            }
        }
        subs.push(CheckReport::new(format!("r{j} implied"), ok));
    }
    Ok(CheckReport::all("omitted-relations-implied", subs)
        .with_detail(format!("{} omitted relation(s) tested", lo.saturating_sub(1))))
}

/// Height-1 comparison value `E_0/p^m` and whether its hypotheses hold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Height1Entry {
    pub p: u64,
    pub m: u32,
    pub order: String,
    pub applicable: bool,
}

pub fn height1_reference(p: u64, m: u32) -> Result<Height1Entry> {
    check_prime(p)?;
    let applicable = p != 3 && (p != 2 || m.is_multiple_of(4) || m % 4 == 3);
    Ok(Height1Entry {
        p,
        m,
        order: BigInt::from(p).pow(m).to_string(),
        applicable,
    })
}
