use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::{IntPoly, PrimeConfig};
use crate::error::{Error, Result};

/// An element of `(Z/p^N)[a]/(a^K)`: `K` residues in `[0, p^N)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruncElem {
    cfg: PrimeConfig,
    coeffs: Vec<u64>,
}

impl TruncElem {
    pub fn zero(cfg: &PrimeConfig) -> Self {
        TruncElem {
            cfg: *cfg,
            coeffs: vec![0; cfg.a_prec],
        }
    }

    pub fn one(cfg: &PrimeConfig) -> Self {
        Self::constant(cfg, 1)
    }

    pub fn constant(cfg: &PrimeConfig, c: i64) -> Self {
        let mut x = Self::zero(cfg);
        x.coeffs[0] = cfg.reduce_i64(c);
        x
    }

    /// `a^deg`, which is zero once `deg >= K`.
    pub fn a_pow(cfg: &PrimeConfig, deg: usize) -> Self {
        let mut x = Self::zero(cfg);
        if deg < cfg.a_prec {
            x.coeffs[deg] = 1 % cfg.modulus();
        }
        x
    }

    /// Builds an element from raw residues, reducing each and padding or
    /// truncating to length `K`.
    pub fn from_residues(cfg: &PrimeConfig, raw: &[u64]) -> Self {
        let mut x = Self::zero(cfg);
        for (slot, &r) in x.coeffs.iter_mut().zip(raw) {
            *slot = r % cfg.modulus();
        }
        x
    }

    pub fn cfg(&self) -> &PrimeConfig {
        &self.cfg
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(self.cfg, other.cfg, "{}", Error::ConfigMismatch);
    }
}

/// Coefficientwise reduction mod `p^N`, discarding degrees `>= K`.
pub fn reduce_poly(f: &IntPoly, cfg: &PrimeConfig) -> TruncElem {
    let q = BigInt::from(cfg.modulus());
    let mut x = TruncElem::zero(cfg);
    for (slot, c) in x.coeffs.iter_mut().zip(f.coeffs()) {
        let r = ((c % &q) + &q) % &q;
        *slot = r.to_u64().expect("residue fits in u64");
    }
    x
}

pub fn trunc_add(x: &TruncElem, y: &TruncElem) -> TruncElem {
    x.check_same(y);
    let cfg = x.cfg;
    TruncElem {
        cfg,
        coeffs: x.coeffs.iter().zip(&y.coeffs).map(|(&u, &v)| cfg.add(u, v)).collect(),
    }
}

pub fn trunc_sub(x: &TruncElem, y: &TruncElem) -> TruncElem {
    x.check_same(y);
    let cfg = x.cfg;
    TruncElem {
        cfg,
        coeffs: x.coeffs.iter().zip(&y.coeffs).map(|(&u, &v)| cfg.sub(u, v)).collect(),
    }
}

pub fn trunc_neg(x: &TruncElem) -> TruncElem {
    let cfg = x.cfg;
    TruncElem {
        cfg,
        coeffs: x.coeffs.iter().map(|&u| cfg.neg(u)).collect(),
    }
}

pub fn trunc_mul(x: &TruncElem, y: &TruncElem) -> TruncElem {
    x.check_same(y);
    let cfg = x.cfg;
    let k = cfg.a_prec;
    let mut out = vec![0u64; k];
    for (i, &u) in x.coeffs.iter().enumerate() {
        if u == 0 {
            continue;
        }
        for (j, &v) in y.coeffs[..k - i].iter().enumerate() {
            out[i + j] = cfg.add(out[i + j], cfg.mul(u, v));
        }
    }
    TruncElem { cfg, coeffs: out }
}

/// `R` is local with maximal ideal `(p, a)`, so units are exactly the
/// elements whose constant term is prime to `p`.
pub fn is_unit(x: &TruncElem) -> bool {
    !x.coeffs[0].is_multiple_of(x.cfg.p)
}

/// Inverse of a unit: invert the constant term mod `p^N`, then Newton-lift
/// `y <- y(2 - xy)` in the a-adic direction, doubling precision each step.
pub fn inv_unit(x: &TruncElem) -> Result<TruncElem> {
    let cfg = x.cfg;
    let c0 = cfg.inv(x.coeffs[0]).ok_or(Error::NotAUnit(x.coeffs[0]))?;
    let mut y = TruncElem::constant(&cfg, 0);
    y.coeffs[0] = c0;
    let two = TruncElem::constant(&cfg, 2);
    let mut prec = 1;
    while prec < cfg.a_prec {
        let xy = trunc_mul(x, &y);
        y = trunc_mul(&y, &trunc_sub(&two, &xy));
        prec *= 2;
    }
    debug_assert_eq!(trunc_mul(x, &y), TruncElem::one(&cfg));
    Ok(y)
}

impl Serialize for TruncElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("TruncElem", 3)?;
        st.serialize_field("pPrec", &self.cfg.p_prec)?;
        st.serialize_field("aPrec", &self.cfg.a_prec)?;
        let coeffs: Vec<String> = self.coeffs.iter().map(ToString::to_string).collect();
        st.serialize_field("coeffs", &coeffs)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(p: u64, n: u32, k: usize) -> PrimeConfig {
        PrimeConfig::new(p, n, k).unwrap()
    }

    #[test]
    fn reduce_examples() {
        let c = cfg(2, 2, 2);
        assert!(reduce_poly(&IntPoly::zero(), &c).is_zero());
        let f = IntPoly::from_i64s(&[5, 0, 0, 1]);
        assert_eq!(reduce_poly(&f, &c).coeffs(), &[1, 0]);
        let c = cfg(3, 2, 3);
        assert_eq!(reduce_poly(&IntPoly::from_i64s(&[0, -1]), &c).coeffs(), &[0, 8, 0]);
    }

    #[test]
    fn truncation_kills_a_to_the_k() {
        let c = cfg(5, 3, 4);
        let a = TruncElem::a_pow(&c, 1);
        assert!(trunc_mul(&a, &TruncElem::a_pow(&c, 3)).is_zero());
        assert!(TruncElem::a_pow(&c, 4).is_zero());
    }

    #[test]
    fn unit_examples() {
        let c = cfg(2, 2, 3);
        let one = TruncElem::one(&c);
        assert!(is_unit(&one));
        assert_eq!(inv_unit(&one).unwrap(), one);
        assert!(!is_unit(&TruncElem::a_pow(&c, 1)));
        assert_eq!(inv_unit(&TruncElem::a_pow(&c, 1)), Err(Error::NotAUnit(0)));
        let x = TruncElem::from_residues(&c, &[1, 1]);
        let inv = inv_unit(&x).unwrap();
        assert_eq!(inv.coeffs(), &[1, 3, 1]);
        assert_eq!(trunc_mul(&x, &inv), one);
    }

    #[test]
    #[should_panic]
    fn mismatched_configs_panic() {
        let x = TruncElem::one(&cfg(2, 2, 3));
        let y = TruncElem::one(&cfg(2, 3, 3));
        let _ = trunc_add(&x, &y);
    }

    #[test]
    fn json_shape() {
        let c = cfg(3, 2, 3);
        let x = reduce_poly(&IntPoly::from_i64s(&[0, -1]), &c);
        assert_eq!(
            serde_json::to_string(&x).unwrap(),
            r#"{"pPrec":2,"aPrec":3,"coeffs":["0","8","0"]}"#
        );
    }

    /// Every element of R_{2,2} = (Z/4)[a]/(a^2), by brute force.
    fn all_small() -> Vec<TruncElem> {
        let c = cfg(2, 2, 2);
        (0..16u64)
            .map(|n| TruncElem::from_residues(&c, &[n % 4, n / 4]))
            .collect()
    }

    #[test]
    fn is_unit_matches_exhaustive_search() {
        let elems = all_small();
        let one = TruncElem::one(elems[0].cfg());
        for x in &elems {
            let generates_unit_ideal = elems.iter().any(|y| trunc_mul(x, y) == one);
            assert_eq!(is_unit(x), generates_unit_ideal, "{x:?}");
        }
    }

    fn small_poly() -> impl Strategy<Value = IntPoly> {
        prop::collection::vec(-1000i64..1000, 0..8).prop_map(|v| IntPoly::from_i64s(&v))
    }

    proptest! {
        #[test]
        fn reduction_is_a_ring_homomorphism(
            f in small_poly(),
            g in small_poly(),
            p in prop::sample::select(vec![2u64, 3, 5, 7]),
            n in 1u32..6,
            k in 1usize..9,
        ) {
            let c = cfg(p, n, k);
            let (rf, rg) = (reduce_poly(&f, &c), reduce_poly(&g, &c));
            prop_assert_eq!(reduce_poly(&(&f * &g), &c), trunc_mul(&rf, &rg));
            prop_assert_eq!(reduce_poly(&(&f + &g), &c), trunc_add(&rf, &rg));
            prop_assert!(trunc_add(&rf, &trunc_neg(&rf)).is_zero());
            prop_assert_eq!(trunc_mul(&TruncElem::one(&c), &rf), rf.clone());
        }

        #[test]
        fn unit_inverses_are_exact(
            raw in prop::collection::vec(0u64..1_000_000, 1..12),
            p in prop::sample::select(vec![2u64, 3, 5, 7, 11]),
            n in 1u32..8,
        ) {
            let c = cfg(p, n, raw.len());
            let x = TruncElem::from_residues(&c, &raw);
            prop_assume!(is_unit(&x));
            prop_assert_eq!(trunc_mul(&x, &inv_unit(&x).unwrap()), TruncElem::one(&c));
        }
    }
}
