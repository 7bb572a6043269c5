//! The three-term complex `A0 --(-b^m)--> A1 --(b'^m)--> A1/A0` and its
//! cohomology.
//!
//! `H^0` and `H^1` vanish; `H^2 = A1 / (A0 + b'^m A1)` is presented on the
//! generators `x_i = b^i` (`1 <= i <= p`) by dropping the coordinate of `1`
//! from the images `b'^m b^i`.
//!
//! Truncation caveats, surfaced in every report:
//! * a-adic: inputs are restricted to a-degree `< K - D` where `D` bounds the
//!   a-degree of the multipliers, so no image is cut off at `a^K`.
//! * p-adic: over `Z/p^N` the middle cohomology is not zero but
//!   `H^2[p^N] = H^2`, because the complex is only exact over `Z_p`. A cycle
//!   modulo `p^N` is therefore only a boundary modulo `p^(N-m)`, `p^m` being
//!   the exponent of `H^2`; the `H^1` check tests membership at that level.

use serde::Serialize;
use serde_json::json;

use crate::coeff_ring::{reduce_poly, IntPoly, PrimeConfig, TruncElem};
use crate::error::{Error, Result};
use crate::hecke_ring::{a1_mul, b_pow, b_prime, b_prime_pow, w_coeffs, A1Elem, WeierstrassCoeffs};
use crate::linalg_local::{
    coker_invariants, howell, kernel, member, relation_rows, residue_strings, FlatMatrix, HowellBasis, Membership,
    ModulePresentation,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KoszulJob {
    pub cfg: PrimeConfig,
    pub m: u32,
}

impl KoszulJob {
    pub fn new(cfg: PrimeConfig, m: u32) -> Self {
        KoszulJob { cfg, m }
    }

    /// Job at the default precision policy for level `m`.
    pub fn at_defaults(p: u64, m: u32) -> Result<Self> {
        Ok(KoszulJob {
            cfg: PrimeConfig::for_level(p, m)?,
            m,
        })
    }

    pub fn p(&self) -> u64 {
        self.cfg.p
    }

    fn weierstrass(&self) -> WeierstrassCoeffs {
        w_coeffs(self.cfg.p).expect("config holds a prime")
    }

    fn guard_precision(&self) -> Result<()> {
        let required = self.m + 1;
        if self.cfg.p_prec < required {
            return Err(Error::PrecisionGuard {
                m: self.m,
                p_prec: self.cfg.p_prec,
                required,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Window {
    pub a_deg_max: usize,
}

/// Outcome of one verification step.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckReport {
    pub check: String,
    pub pass: bool,
    pub witness: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<Window>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub subchecks: Vec<CheckReport>,
}

impl CheckReport {
    pub fn new(check: impl Into<String>, pass: bool) -> Self {
        CheckReport {
            check: check.into(),
            pass,
            witness: None,
            window: None,
            detail: String::new(),
            subchecks: Vec::new(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn with_witness(mut self, witness: serde_json::Value) -> Self {
        self.witness = Some(witness);
        self
    }

    /// Combines sub-checks; passes iff all of them do.
    pub fn all(check: impl Into<String>, subchecks: Vec<CheckReport>) -> Self {
        let pass = subchecks.iter().all(|c| c.pass);
        CheckReport {
            subchecks,
            ..CheckReport::new(check, pass)
        }
    }
}

/// `p x (p+1)` matrix whose column `i` is `b'^m b^i` with the coordinate of
/// `1` removed; rows are indexed by the generators `x_1..x_p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationMatrix {
    pub p: u64,
    pub m: u32,
    pub entries: Vec<Vec<IntPoly>>,
}

impl RelationMatrix {
    pub fn column(&self, i: usize) -> Vec<IntPoly> {
        self.entries.iter().map(|row| row[i].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<IntPoly>> {
        (0..=self.p as usize).map(|i| self.column(i)).collect()
    }
}

/// Drops the coordinate of `1`, i.e. passes to `A1 / A0`.
pub fn project(x: &A1Elem) -> Vec<IntPoly> {
    x.coords[1..].to_vec()
}

/// The images `b'^m b^i`, `0 <= i <= p`, as full `A1` elements.
fn basis_images(w: &WeierstrassCoeffs, m: u32) -> Vec<A1Elem> {
    let bm = b_prime_pow(w, m);
    (0..w.rank()).map(|i| a1_mul(&bm, &A1Elem::basis(w.p, i), w)).collect()
}

/// Relation matrix for `H^2` at level `m`. At `m = 0` the columns are
/// `0, e_1, ..., e_p`, presenting the zero module.
///
/// # Panics
/// If an entry has a-degree above `m`; the default a-truncation relies on
/// that bound.
pub fn relation_matrix(job: &KoszulJob) -> RelationMatrix {
    let w = job.weierstrass();
    let p = w.p as usize;
    let images = basis_images(&w, job.m);
    let mut entries = vec![vec![IntPoly::zero(); p + 1]; p];
    for (i, img) in images.iter().enumerate() {
        for (g, c) in project(img).into_iter().enumerate() {
            let deg = c.degree().unwrap_or(0);
            assert!(
                deg <= job.m as usize,
                "relation entry of a-degree {deg} exceeds m = {}",
                job.m
            );
            entries[g][i] = c;
        }
    }
    RelationMatrix {
        p: w.p,
        m: job.m,
        entries,
    }
}

/// `H^2` at truncation: relation vectors, their canonical span and the
/// invariant factors of the cokernel.
#[derive(Debug, Clone)]
pub struct ComputedCokernel {
    pub job: KoszulJob,
    pub presentation: ModulePresentation,
    pub span: HowellBasis,
    pub invariants: Vec<u64>,
}

impl ComputedCokernel {
    pub fn is_zero(&self) -> bool {
        self.invariants.is_empty()
    }

    /// Flattened coordinates of `c * x_g` (generator index `g` from 0).
    pub fn generator_multiple(&self, g: usize, c: u64) -> Vec<u64> {
        let k = self.job.cfg.a_prec;
        let mut v = vec![0u64; self.presentation.rank() * k];
        v[g * k] = c % self.job.cfg.modulus();
        v
    }
}

pub fn h2_cokernel(job: &KoszulJob) -> Result<ComputedCokernel> {
    job.guard_precision()?;
    let rm = relation_matrix(job);
    let mut presentation = ModulePresentation::with_generators(rm.p, &vec![None; rm.p as usize]);
    for (i, col) in rm.columns().into_iter().enumerate() {
        presentation.push_relation(format!("b'^{} b^{i}", job.m), col);
    }
    let span = presentation.span(&job.cfg);
    let invariants = coker_invariants(&span.to_matrix());
    Ok(ComputedCokernel {
        job: *job,
        presentation,
        span,
        invariants,
    })
}

fn truncate_vec(v: &[IntPoly], cfg: &PrimeConfig) -> Vec<TruncElem> {
    v.iter().map(|c| reduce_poly(c, cfg)).collect()
}

/// Rows `a^j * v` for `j < window`, from the full shift family.
fn windowed_rows(vectors: &[Vec<IntPoly>], width: usize, window: usize, cfg: &PrimeConfig) -> FlatMatrix {
    let k = cfg.a_prec;
    let truncated: Vec<Vec<TruncElem>> = vectors.iter().map(|v| truncate_vec(v, cfg)).collect();
    let all = relation_rows(&truncated, width, cfg);
    let rows: Vec<Vec<u64>> = (0..vectors.len())
        .flat_map(|i| (0..window).map(move |j| i * k + j))
        .map(|r| all.row(r).to_vec())
        .collect();
    FlatMatrix::from_rows(cfg, width * k, &rows)
}

/// Reduces `b^m` in `F_p[a, b]/(b^(p+1) - ab)` to a monomial `a^q b^r`.
pub fn reduce_b_power_mod_p(p: u64, m: u32) -> (u32, u32) {
    let (mut q, mut r) = (0, m);
    while r > p as u32 {
        // b^(p+k) = a b^k
        r -= p as u32;
        q += 1;
    }
    (q, r)
}

/// Injectivity of `f -> -b^m f`.
pub fn h0_vanishes(job: &KoszulJob) -> CheckReport {
    let w = job.weierstrass();
    let p = w.p;
    let cfg = &job.cfg;

    // w = b(b^p - a) mod p
    let pb = num_bigint::BigInt::from(p);
    let congruent = w.w[0].divisible_by(&pb)
        && (&w.w[1] + &IntPoly::a()).divisible_by(&pb)
        && (2..=p as usize).all(|i| w.w[i].divisible_by(&pb))
        && w.w[p as usize + 1] == IntPoly::one();
    let (q, r) = reduce_b_power_mod_p(p, job.m);
    let exact = CheckReport::new("h0-exact-mod-p", congruent && r <= p as u32)
        .with_witness(json!({ "aPower": q, "bPower": r }))
        .with_detail(format!(
            "w = b(b^{p} - a) mod {p}: {congruent}; b^{} = a^{q} b^{r} in F_{p}[a,b]/(b^{} - ab), a nonzero basis monomial",
            job.m,
            p + 1
        ));

    let bm = b_pow(&w, job.m).neg();
    let d = bm.max_a_degree();
    let windowed = if d >= cfg.a_prec {
        CheckReport::new("h0-window", false).with_detail(format!("aPrec {} leaves an empty window", cfg.a_prec))
    } else {
        let window = cfg.a_prec - d;
        let rows = windowed_rows(std::slice::from_ref(&bm.coords), w.rank(), window, cfg);
        let ker = kernel(&rows);
        let mut rep = CheckReport::new("h0-window", ker.is_empty()).with_detail(format!(
            "multiplication by -b^{} is injective on a-degrees < {window} over Z/{}",
            job.m,
            cfg.modulus()
        ));
        rep.window = Some(Window { a_deg_max: window - 1 });
        if let Some(x) = ker.first() {
            rep.witness = Some(json!(residue_strings(x)));
        }
        rep
    };
    CheckReport::all("h0-vanishes", vec![exact, windowed])
}

/// Exactness at `A1`: every windowed cycle of `x -> b'^m x mod A0` is, after
/// reducing modulo `p^(N - precision_loss)`, of the form `-b^m f`.
pub fn h1_vanishes_window(job: &KoszulJob, a_deg_max: Option<usize>) -> Result<CheckReport> {
    h1_window_check(job, a_deg_max, job.m)
}

pub(crate) fn h1_window_check(job: &KoszulJob, a_deg_max: Option<usize>, precision_loss: u32) -> Result<CheckReport> {
    job.guard_precision()?;
    let w = job.weierstrass();
    let cfg = &job.cfg;
    let k = cfg.a_prec;
    let rank = w.rank();

    let images = basis_images(&w, job.m);
    let d = images.iter().map(A1Elem::max_a_degree).max().unwrap_or(0);
    let limit = k.saturating_sub(d);
    let window = match a_deg_max {
        Some(x) if x + 1 > limit => {
            return Err(Error::IndexOutOfRange {
                what: "window",
                value: x as i64,
                range: format!("0..{limit}"),
            })
        }
        Some(x) => x + 1,
        None => limit,
    };
    if window == 0 {
        return Err(Error::InvalidPrecision(format!("aPrec {k} leaves an empty window")));
    }

    let projected: Vec<Vec<IntPoly>> = images.iter().map(project).collect();
    let cycles_map = windowed_rows(&projected, rank - 1, window, cfg);
    let cycles = kernel(&cycles_map);

    let low = cfg.with_p_prec(cfg.p_prec - precision_loss)?;
    let bm = b_pow(&w, job.m).neg();
    let boundaries = howell(&windowed_rows(std::slice::from_ref(&bm.coords), rank, k, cfg).reduce_to(&low));

    let mut failure = None;
    for z in &cycles {
        // kernel coordinates are (i, j) -> i*window + j; embed at i*K + j
        let mut full = vec![0u64; rank * k];
        for i in 0..rank {
            for j in 0..window {
                full[i * k + j] = z[i * window + j] % low.modulus();
            }
        }
        if let Membership::Outside { .. } = member(&full, &boundaries)? {
            failure = Some(full);
            break;
        }
    }
    let mut rep = CheckReport::new("h1-vanishes-window", failure.is_none()).with_detail(format!(
        "{} cycle generators on a-degrees < {window} over Z/{}; boundaries tested over Z/{}",
        cycles.len(),
        cfg.modulus(),
        low.modulus()
    ));
    rep.window = Some(Window { a_deg_max: window - 1 });
    rep.witness = failure.map(|f| json!(residue_strings(&f)));
    Ok(rep)
}

/// For `i <= m` the image of `b^i` is `w_0^i b'^(m-i)`, exactly.
pub fn basis_image_identity(job: &KoszulJob) -> CheckReport {
    let w = job.weierstrass();
    let rm = relation_matrix(job);
    let mut bad = None;
    for i in 0..=(job.m as usize).min(w.p as usize) {
        let expected = b_prime_pow(&w, job.m - i as u32).scale(&w.w[0].pow(i as u32));
        if rm.column(i) != project(&expected) {
            bad = Some(i);
            break;
        }
    }
    let mut rep = CheckReport::new("basis-image-identity", bad.is_none());
    if let Some(i) = bad {
        rep.witness = Some(json!({ "column": i }));
    }
    rep
}

/// The identity showing `p^(m-1) x_p = 0`: `b^p = -b' - w_1 - ... - w_p b^(p-1)`,
/// `w_0^(m-1) b' = b'^m b^(m-1)`, and `p | w_i` for `2 <= i <= p`.
pub fn top_generator_identity(job: &KoszulJob) -> CheckReport {
    let w = job.weierstrass();
    let p = w.p as usize;
    let bp = b_prime(&w);
    let mut rhs = bp.neg();
    for i in 1..=p {
        rhs = rhs.add(&A1Elem::basis(w.p, i - 1).scale(&-&w.w[i]));
    }
    let expansion = project(&rhs) == project(&A1Elem::basis(w.p, p));
    let absorbed = job.m == 0
        || a1_mul(&b_prime_pow(&w, job.m), &b_pow(&w, job.m - 1), &w) == bp.scale(&w.w[0].pow(job.m - 1));
    let pb = num_bigint::BigInt::from(w.p);
    let divisible = (2..=p).all(|i| w.w[i].divisible_by(&pb));
    CheckReport::new("top-generator-identity", expansion && absorbed && divisible).with_detail(format!(
        "b^p expansion: {expansion}; w0^(m-1) b' in b'^m A1: {absorbed}; p | w_i (2 <= i <= p): {divisible}"
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    fn job(p: u64, n: u32, k: usize, m: u32) -> KoszulJob {
        KoszulJob::new(PrimeConfig::new(p, n, k).unwrap(), m)
    }

    #[test]
    fn relation_matrix_p2_m1() {
        let rm = relation_matrix(&job(2, 3, 8, 1));
        assert_eq!(rm.column(0), vec![poly(&[]), poly(&[-1])]);
        assert_eq!(rm.column(1), vec![poly(&[]), poly(&[])]);
        assert_eq!(rm.column(2), vec![poly(&[-2]), poly(&[])]);
    }

    #[test]
    fn relation_matrix_p2_m2_first_column() {
        let rm = relation_matrix(&job(2, 4, 8, 2));
        assert_eq!(rm.column(0), vec![poly(&[2]), poly(&[0, -1])]);
    }

    #[test]
    fn relation_matrix_m0_is_identity() {
        let rm = relation_matrix(&job(3, 2, 4, 0));
        assert_eq!(rm.column(0), vec![poly(&[]); 3]);
        for i in 1..=3 {
            let mut e = vec![poly(&[]); 3];
            e[i - 1] = poly(&[1]);
            assert_eq!(rm.column(i), e);
        }
    }

    #[test]
    fn identities_hold() {
        for p in [2u64, 3, 5] {
            for m in 0..=6 {
                let j = job(p, m + 2, 16, m);
                assert!(basis_image_identity(&j).pass, "p={p} m={m}");
                assert!(top_generator_identity(&j).pass, "p={p} m={m}");
            }
        }
    }

    #[test]
    fn h2_degenerate_levels() {
        let c = h2_cokernel(&job(2, 2, 16, 0)).unwrap();
        assert!(c.is_zero());
        let c = h2_cokernel(&job(2, 3, 16, 1)).unwrap();
        assert_eq!(c.invariants, vec![2; 16]);
    }

    #[test]
    fn h2_precision_guard() {
        assert_eq!(
            h2_cokernel(&job(2, 2, 16, 2)).unwrap_err(),
            Error::PrecisionGuard { m: 2, p_prec: 2, required: 3 }
        );
        assert!(h2_cokernel(&job(2, 3, 16, 2)).is_ok());
    }

    #[test]
    fn h0_examples() {
        assert_eq!(reduce_b_power_mod_p(2, 3), (1, 1));
        assert_eq!(reduce_b_power_mod_p(2, 5), (2, 1));
        assert_eq!(reduce_b_power_mod_p(3, 1), (0, 1));
        let rep = h0_vanishes(&job(2, 5, 16, 3));
        assert!(rep.pass, "{rep:?}");
        assert!(h0_vanishes(&job(3, 3, 16, 1)).pass);
        assert!(h0_vanishes(&job(2, 7, 24, 5)).pass);
        assert!(h0_vanishes(&job(2, 2, 16, 0)).pass);
    }

    #[test]
    fn h1_examples() {
        assert!(h1_vanishes_window(&job(2, 2, 8, 0), None).unwrap().pass);
        let rep = h1_vanishes_window(&job(2, 3, 12, 1), None).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(h1_vanishes_window(&job(2, 5, 16, 3), None).unwrap().pass);
        assert!(h1_vanishes_window(&job(2, 3, 12, 1), Some(3)).unwrap().pass);
        assert!(h1_vanishes_window(&job(2, 3, 12, 1), Some(12)).is_err());
    }

    /// Modulo p^N the middle cohomology is H^2[p^N] = B_m, so testing cycles
    /// against boundaries without the p^m allowance must fail for m >= 1.
    #[test]
    fn h1_without_precision_allowance_sees_torsion() {
        for (p, m) in [(2u64, 1u32), (2, 3), (3, 2)] {
            let j = job(p, m + 2, 16, m);
            let rep = h1_window_check(&j, None, 0).unwrap();
            assert!(!rep.pass, "p={p} m={m}");
            assert!(rep.witness.is_some());
        }
        // explicit cycle for p = 2, m = 1: b' * 2^(N-1) b^2 = -2^N b = 0 mod 2^N
        let w = w_coeffs(2).unwrap();
        let x = A1Elem::basis(2, 2).scale(&poly(&[4]));
        assert_eq!(project(&a1_mul(&b_prime(&w), &x, &w)), vec![poly(&[-8]), poly(&[])]);
    }
}
