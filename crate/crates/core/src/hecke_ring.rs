//! Arithmetic in `A1 = A0[b]/(w(a, b))`, a free `A0`-module with ordered
//! basis `1, b, ..., b^p`.
//!
//! `w(a, b) = (b - p)(b + (-1)^p)^p - (a - p^2 + (-1)^p) b` is monic of
//! degree `p + 1` in `b`, so products are reduced by the substitution
//! `b^(p+1) -> -(w_p b^p + ... + w_1 b + w_0)`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::coeff_ring::{is_prime, IntPoly};
use crate::error::{Error, Result};

/// The `b`-coefficients `w_0, ..., w_{p+1}` of `w(a, b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeierstrassCoeffs {
    pub p: u64,
    pub w: Vec<IntPoly>,
}

impl WeierstrassCoeffs {
    pub fn get(&self, i: usize) -> &IntPoly {
        &self.w[i]
    }

    /// Rank of `A1` over `A0`, i.e. `p + 1`.
    pub fn rank(&self) -> usize {
        self.p as usize + 1
    }
}

/// Coordinates of an element of `A1` in the basis `1, b, ..., b^p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct A1Elem {
    pub p: u64,
    pub coords: Vec<IntPoly>,
}

impl A1Elem {
    pub fn zero(p: u64) -> Self {
        A1Elem {
            p,
            coords: vec![IntPoly::zero(); p as usize + 1],
        }
    }

    pub fn one(p: u64) -> Self {
        Self::basis(p, 0)
    }

    /// The basis element `b^i`, `0 <= i <= p`.
    pub fn basis(p: u64, i: usize) -> Self {
        let mut x = Self::zero(p);
        x.coords[i] = IntPoly::one();
        x
    }

    /// An `A0`-scalar `f * 1`.
    pub fn scalar(p: u64, f: IntPoly) -> Self {
        let mut x = Self::zero(p);
        x.coords[0] = f;
        x
    }

    pub fn scale(&self, f: &IntPoly) -> Self {
        A1Elem {
            p: self.p,
            coords: self.coords.iter().map(|c| c * f).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        A1Elem {
            p: self.p,
            coords: self.coords.iter().zip(&other.coords).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        A1Elem {
            p: self.p,
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(IntPoly::is_zero)
    }

    /// Largest a-degree among the coordinates.
    pub fn max_a_degree(&self) -> usize {
        self.coords.iter().filter_map(IntPoly::degree).max().unwrap_or(0)
    }
}

fn poly_mul_b(x: &[IntPoly], y: &[IntPoly]) -> Vec<IntPoly> {
    let mut out = vec![IntPoly::zero(); x.len() + y.len() - 1];
    for (i, u) in x.iter().enumerate() {
        if u.is_zero() {
            continue;
        }
        for (j, v) in y.iter().enumerate() {
            out[i + j] = &out[i + j] + &(u * v);
        }
    }
    out
}

/// Expands the defining product and collects powers of `b`.
pub fn w_coeffs(p: u64) -> Result<WeierstrassCoeffs> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let pi = BigInt::from(p);
    let sign = if p.is_multiple_of(2) { BigInt::one() } else { -BigInt::one() };
    let linear = |c: BigInt| vec![IntPoly::constant(c), IntPoly::one()];

    let mut prod = linear(-pi.clone());
    for _ in 0..p {
        prod = poly_mul_b(&prod, &linear(sign.clone()));
    }
    // - (a - p^2 + (-1)^p) b
    let shift = &IntPoly::a() + &IntPoly::constant(&sign - &pi * &pi);
    prod[1] = &prod[1] - &shift;

    debug_assert_eq!(prod.len(), p as usize + 2);
    Ok(WeierstrassCoeffs { p, w: prod })
}

fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::one(), |acc, j| acc * (n - j) / (j + 1))
}

/// Binomial closed form for `w_i`, `2 <= i <= p`.
pub fn w_closed(p: u64, i: u64) -> Result<IntPoly> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if !(2..=p).contains(&i) {
        return Err(Error::IndexOutOfRange {
            what: "i",
            value: i as i64,
            range: format!("2..={p}"),
        });
    }
    let sign = |e: u64| if e.is_multiple_of(2) { BigInt::one() } else { -BigInt::one() };
    let inner = binomial(p, i - 1) + sign(p + 1) * BigInt::from(p) * binomial(p, i);
    Ok(IntPoly::constant(sign(p * (p - i + 1)) * inner))
}

/// Product in `A1`, reduced back to `b`-degree at most `p`.
pub fn a1_mul(x: &A1Elem, y: &A1Elem, w: &WeierstrassCoeffs) -> A1Elem {
    let r = w.rank();
    assert_eq!(x.coords.len(), r);
    assert_eq!(y.coords.len(), r);
    let mut prod = poly_mul_b(&x.coords, &y.coords);
    for d in (r..prod.len()).rev() {
        let c = std::mem::take(&mut prod[d]);
        if c.is_zero() {
            continue;
        }
        // c b^d = c b^(d-r) b^(p+1) = -c b^(d-r) sum_{k<=p} w_k b^k
        for k in 0..r {
            let t = &c * &w.w[k];
            prod[d - r + k] = &prod[d - r + k] - &t;
        }
    }
    prod.truncate(r);
    A1Elem { p: w.p, coords: prod }
}

fn a1_pow(base: &A1Elem, e: u32, w: &WeierstrassCoeffs) -> A1Elem {
    (0..e).fold(A1Elem::one(w.p), |acc, _| a1_mul(&acc, base, w))
}

/// `b^n` for any `n >= 0`.
pub fn b_pow(w: &WeierstrassCoeffs, n: u32) -> A1Elem {
    if (n as usize) < w.rank() {
        return A1Elem::basis(w.p, n as usize);
    }
    a1_pow(&A1Elem::basis(w.p, 1), n, w)
}

/// `b' = -(w_1 + w_2 b + ... + w_{p+1} b^p)`, the element with `b b' = w_0`.
pub fn b_prime(w: &WeierstrassCoeffs) -> A1Elem {
    A1Elem {
        p: w.p,
        coords: w.w[1..].iter().map(|c| -c).collect(),
    }
}

/// `b'^tau` by repeated multiplication.
pub fn b_prime_pow(w: &WeierstrassCoeffs, tau: u32) -> A1Elem {
    a1_pow(&b_prime(w), tau, w)
}

/// Closed composition-sum formula for the coordinate of `b^i` in `b'^tau`:
///
/// `d_{i,tau} = sum_{n=0}^{tau-1} (-1)^(tau-n) w_0^n sum w_{m_1} ... w_{m_{tau-n}}`
///
/// over compositions `m_1 + ... + m_{tau-n} = tau + i` with parts in
/// `1..=p+1` and last part at least `i + 1`.
pub fn d_coeff(w: &WeierstrassCoeffs, i: usize, tau: u32) -> Result<IntPoly> {
    let p = w.p as usize;
    if i > p {
        return Err(Error::IndexOutOfRange {
            what: "i",
            value: i as i64,
            range: format!("0..={p}"),
        });
    }
    if tau == 0 {
        return Err(Error::IndexOutOfRange {
            what: "tau",
            value: 0,
            range: "1..".into(),
        });
    }
    let tau = tau as usize;
    let target = tau + i;
    let mut total = IntPoly::zero();
    for n in 0..tau {
        let parts = tau - n;
        let mut inner = IntPoly::zero();
        compositions(w, parts, target, i + 1, &IntPoly::one(), &mut inner);
        let sign = if parts.is_multiple_of(2) { 1 } else { -1 };
        let term = &w.w[0].pow(n as u32) * &inner;
        total = &total + &term.scale(&BigInt::from(sign));
    }
    Ok(total)
}

/// Accumulates `acc * w_{m_1} ... w_{m_parts}` over admissible compositions of
/// `remaining`; the last-part bound is checked at the leaf.
fn compositions(
    w: &WeierstrassCoeffs,
    parts: usize,
    remaining: usize,
    last_min: usize,
    acc: &IntPoly,
    out: &mut IntPoly,
) {
    let max_part = w.p as usize + 1;
    if parts == 0 {
        return;
    }
    if remaining < parts || remaining > parts * max_part {
        return;
    }
    if parts == 1 {
        if remaining >= last_min {
            *out = &*out + &(acc * &w.w[remaining]);
        }
        return;
    }
    for part in 1..=max_part.min(remaining) {
        let factor = &w.w[part];
        if factor.is_zero() {
            continue;
        }
        compositions(w, parts - 1, remaining - part, last_min, &(acc * factor), out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    #[test]
    fn w_coeffs_p2_and_p3() {
        let w = w_coeffs(2).unwrap();
        assert_eq!(w.w, vec![p(&[-2]), p(&[0, -1]), p(&[]), p(&[1])]);
        let w = w_coeffs(3).unwrap();
        assert_eq!(w.w, vec![p(&[3]), p(&[0, -1]), p(&[12]), p(&[-6]), p(&[1])]);
        assert_eq!(w_coeffs(9), Err(Error::NotPrime(9)));
    }

    #[test]
    fn w_closed_examples() {
        assert_eq!(w_closed(3, 2).unwrap(), p(&[12]));
        assert_eq!(w_closed(3, 3).unwrap(), p(&[-6]));
        let w5 = w_coeffs(5).unwrap();
        for i in 2..=5 {
            assert_eq!(w_closed(5, i).unwrap(), w5.w[i as usize]);
        }
        assert!(w_closed(3, 1).is_err());
        assert!(w_closed(3, 4).is_err());
    }

    #[test]
    fn a1_mul_examples() {
        let w = w_coeffs(2).unwrap();
        let b2 = A1Elem::basis(2, 2);
        // b^4 = 2b + a b^2 modulo b^3 - ab - 2
        assert_eq!(a1_mul(&b2, &b2, &w).coords, vec![p(&[]), p(&[2]), p(&[0, 1])]);
        assert_eq!(b_pow(&w, 4).coords, vec![p(&[]), p(&[2]), p(&[0, 1])]);
        let x = A1Elem {
            p: 2,
            coords: vec![p(&[1, 2]), p(&[-3]), p(&[0, 0, 5])],
        };
        assert_eq!(a1_mul(&A1Elem::one(2), &x, &w), x);
    }

    #[test]
    fn b_prime_examples() {
        let w = w_coeffs(2).unwrap();
        assert_eq!(b_prime(&w).coords, vec![p(&[0, 1]), p(&[]), p(&[-1])]);
        let w3 = w_coeffs(3).unwrap();
        assert_eq!(b_prime(&w3).coords, vec![p(&[0, 1]), p(&[-12]), p(&[6]), p(&[-1])]);
        for prime in [2u64, 3, 5, 7] {
            let w = w_coeffs(prime).unwrap();
            let prod = a1_mul(&A1Elem::basis(prime, 1), &b_prime(&w), &w);
            let sign = if prime % 2 == 0 { -1 } else { 1 };
            assert_eq!(prod, A1Elem::scalar(prime, p(&[sign * prime as i64])));
        }
    }

    #[test]
    fn b_prime_pow_examples() {
        let w = w_coeffs(2).unwrap();
        assert_eq!(b_prime_pow(&w, 0), A1Elem::one(2));
        assert_eq!(b_prime_pow(&w, 2).coords, vec![p(&[0, 0, 1]), p(&[2]), p(&[0, -1])]);
        assert_eq!(
            b_prime_pow(&w, 5).coords,
            vec![p(&[0, 0, -12, 0, 0, 1]), p(&[-8, 0, 0, 2]), p(&[0, 8, 0, 0, -1])]
        );
    }

    #[test]
    fn d_coeff_examples() {
        let w = w_coeffs(2).unwrap();
        assert_eq!(d_coeff(&w, 2, 2).unwrap(), p(&[0, -1]));
        assert_eq!(d_coeff(&w, 1, 2).unwrap(), p(&[2]));
        for prime in [2u64, 3, 5, 7] {
            let w = w_coeffs(prime).unwrap();
            for i in 0..=prime as usize {
                assert_eq!(d_coeff(&w, i, 1).unwrap(), -&w.w[i + 1]);
            }
        }
        assert!(d_coeff(&w, 3, 1).is_err());
        assert!(d_coeff(&w, 0, 0).is_err());
    }

    #[test]
    fn d_coeff_leading_term() {
        for prime in [2u64, 3, 5] {
            let w = w_coeffs(prime).unwrap();
            for k in 2..=prime as u32 {
                let d = d_coeff(&w, prime as usize, k).unwrap();
                assert_eq!(d.degree(), Some(k as usize - 1));
                // (-1)^k (-1)^(k-1) = -1
                assert_eq!(d.leading_coeff(), BigInt::from(-1));
            }
        }
    }

    fn a1_strategy(prime: u64) -> impl Strategy<Value = A1Elem> {
        prop::collection::vec(prop::collection::vec(-20i64..20, 0..4), prime as usize + 1)
            .prop_map(move |cs| A1Elem {
                p: prime,
                coords: cs.iter().map(|c| IntPoly::from_i64s(c)).collect(),
            })
    }

    proptest! {
        #[test]
        fn a1_mul_commutative_associative_p2(
            x in a1_strategy(2), y in a1_strategy(2), z in a1_strategy(2)
        ) {
            let w = w_coeffs(2).unwrap();
            prop_assert_eq!(a1_mul(&x, &y, &w), a1_mul(&y, &x, &w));
            prop_assert_eq!(
                a1_mul(&a1_mul(&x, &y, &w), &z, &w),
                a1_mul(&x, &a1_mul(&y, &z, &w), &w)
            );
        }

        #[test]
        fn a1_mul_commutative_associative_p3(
            x in a1_strategy(3), y in a1_strategy(3), z in a1_strategy(3)
        ) {
            let w = w_coeffs(3).unwrap();
            prop_assert_eq!(a1_mul(&x, &y, &w), a1_mul(&y, &x, &w));
            prop_assert_eq!(
                a1_mul(&a1_mul(&x, &y, &w), &z, &w),
                a1_mul(&x, &a1_mul(&y, &z, &w), &w)
            );
        }
    }
}
