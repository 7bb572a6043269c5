use serde::Serialize;

use super::FlatMatrix;
use crate::coeff_ring::PrimeConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct HowellRow {
    pivot: usize,
    /// The pivot entry is exactly `p^val`.
    val: u32,
    entries: Vec<u64>,
}

/// Canonical generating set of a row span over `Z/p^N`.
///
/// Rows are in echelon form with strictly increasing pivot columns, each
/// pivot is a power `p^v`, entries above a pivot lie in `[0, p^v)`, and the
/// Howell property holds: for every column `c`, the rows with pivot `>= c`
/// span all elements of the span that vanish before `c`. Two matrices have
/// the same row span iff their Howell bases are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HowellBasis {
    cfg: PrimeConfig,
    cols: usize,
    rows: Vec<HowellRow>,
}

/// Outcome of a membership test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum Membership {
    Member,
    /// The canonical remainder of the vector modulo the span; nonzero.
    Outside { remainder: Vec<u64> },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member)
    }
}

/// `dst -= q * src` on `dst[from..]`.
fn sub_multiple(cfg: &PrimeConfig, dst: &mut [u64], src: &[u64], q: u64, from: usize) {
    let m = cfg.modulus();
    let neg_q = cfg.neg(q % m);
    if neg_q == 0 {
        return;
    }
    if m <= 1 << 32 {
        for (d, &s) in dst[from..].iter_mut().zip(&src[from..]) {
            if s != 0 {
                *d = (*d + neg_q * s) % m;
            }
        }
    } else {
        for (d, &s) in dst[from..].iter_mut().zip(&src[from..]) {
            if s != 0 {
                *d = cfg.add(*d, cfg.mul(neg_q, s));
            }
        }
    }
}

fn scale(cfg: &PrimeConfig, v: &mut [u64], q: u64) {
    for x in v.iter_mut() {
        *x = cfg.mul(*x, q);
    }
}

impl HowellBasis {
    pub fn cfg(&self) -> &PrimeConfig {
        &self.cfg
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.rows[i].entries
    }

    pub fn pivots(&self) -> Vec<(usize, u32)> {
        self.rows.iter().map(|r| (r.pivot, r.val)).collect()
    }

    pub fn to_matrix(&self) -> FlatMatrix {
        let rows: Vec<Vec<u64>> = self.rows.iter().map(|r| r.entries.clone()).collect();
        FlatMatrix::from_rows(&self.cfg, self.cols, &rows)
    }

    /// `log_p` of the number of elements in the span. In Howell form every
    /// span element is uniquely `sum c_i r_i` with `0 <= c_i < p^(N - v_i)`.
    pub fn span_log_order(&self) -> u64 {
        self.rows
            .iter()
            .map(|r| (self.cfg.p_prec - r.val) as u64)
            .sum()
    }

    /// Canonical representative of `v` modulo the span.
    pub fn reduce(&self, v: &[u64]) -> Result<Vec<u64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        let cfg = &self.cfg;
        let mut rem: Vec<u64> = v.iter().map(|x| x % cfg.modulus()).collect();
        for row in &self.rows {
            let x = rem[row.pivot];
            if x == 0 {
                continue;
            }
            let q = x / cfg.p.pow(row.val);
            sub_multiple(cfg, &mut rem, &row.entries, q, row.pivot);
        }
        Ok(rem)
    }
}

/// Howell form of the row span of `m`.
pub fn howell(m: &FlatMatrix) -> HowellBasis {
    howell_rows(m.cfg(), m.cols(), m.row_vecs())
}

fn howell_rows(cfg: &PrimeConfig, cols: usize, rows: Vec<Vec<u64>>) -> HowellBasis {
    let n = cfg.p_prec;
    let mut work: Vec<Vec<u64>> = rows.into_iter().filter(|r| r.iter().any(|&x| x != 0)).collect();
    let mut basis: Vec<HowellRow> = Vec::new();

    // Invariant: every row in `work` vanishes in columns < c.
    for c in 0..cols {
        if work.is_empty() {
            break;
        }
        let Some(best) = work
            .iter()
            .enumerate()
            .filter(|(_, r)| r[c] != 0)
            .min_by_key(|(_, r)| cfg.valuation(r[c]))
            .map(|(i, _)| i)
        else {
            continue;
        };
        let mut piv = work.swap_remove(best);
        let (val, unit_inv) = cfg.split_unit(piv[c]);
        scale(cfg, &mut piv, unit_inv);
        debug_assert_eq!(piv[c], cfg.p.pow(val));

        let pv = cfg.p.pow(val);
        for r in work.iter_mut() {
            if r[c] != 0 {
                let q = r[c] / pv;
                sub_multiple(cfg, r, &piv, q, c);
                debug_assert_eq!(r[c], 0);
            }
        }
        if val > 0 {
            let mut ann = piv.clone();
            scale(cfg, &mut ann, cfg.p.pow(n - val));
            if ann.iter().any(|&x| x != 0) {
                work.push(ann);
            }
        }
        work.retain(|r| r.iter().any(|&x| x != 0));
        basis.push(HowellRow {
            pivot: c,
            val,
            entries: piv,
        });
    }

    // Reduce entries above each pivot into [0, p^v).
    for i in 0..basis.len() {
        let (pivot, pv) = (basis[i].pivot, cfg.p.pow(basis[i].val));
        let src = basis[i].entries.clone();
        for row in basis[..i].iter_mut() {
            let q = row.entries[pivot] / pv;
            if q != 0 {
                sub_multiple(cfg, &mut row.entries, &src, q, pivot);
            }
        }
    }

    HowellBasis {
        cfg: *cfg,
        cols,
        rows: basis,
    }
}

/// Tests whether `v` lies in the span; the remainder is the witness otherwise.
pub fn member(v: &[u64], h: &HowellBasis) -> Result<Membership> {
    let rem = h.reduce(v)?;
    Ok(if rem.iter().all(|&x| x == 0) {
        Membership::Member
    } else {
        Membership::Outside { remainder: rem }
    })
}

/// Generators of the left kernel `{x : x M = 0}`, read off the Howell form
/// of `[M | I]`: by the Howell property the rows vanishing on the `M` block
/// span every element of the span that does.
pub fn kernel(m: &FlatMatrix) -> Vec<Vec<u64>> {
    let aug = m.hstack(&FlatMatrix::identity(m.cfg(), m.rows()));
    let h = howell(&aug);
    h.rows
        .iter()
        .filter(|r| r.pivot >= m.cols())
        .map(|r| r.entries[m.cols()..].to_vec())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn cfg(p: u64, n: u32) -> PrimeConfig {
        PrimeConfig::new(p, n, 1).unwrap()
    }

    fn mat(c: &PrimeConfig, rows: &[&[u64]]) -> FlatMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<Vec<u64>> = rows.iter().map(|r| r.to_vec()).collect();
        FlatMatrix::from_rows(c, cols, &rows)
    }

    /// All integer combinations of the rows, by breadth-first closure.
    fn enumerate_span(m: &FlatMatrix) -> HashSet<Vec<u64>> {
        let c = m.cfg();
        let mut span: HashSet<Vec<u64>> = HashSet::new();
        let zero = vec![0u64; m.cols()];
        span.insert(zero.clone());
        let mut frontier = vec![zero];
        while let Some(v) = frontier.pop() {
            for r in 0..m.rows() {
                let w: Vec<u64> = v.iter().zip(m.row(r)).map(|(&x, &y)| c.add(x, y)).collect();
                if span.insert(w.clone()) {
                    frontier.push(w);
                }
            }
        }
        span
    }

    #[test]
    fn basic_forms() {
        let c = cfg(2, 2);
        assert!(howell(&FlatMatrix::zeros(&c, 3, 2)).is_empty());
        let h = howell(&FlatMatrix::identity(&c, 3));
        assert_eq!(h.to_matrix(), FlatMatrix::identity(&c, 3));

        let m = mat(&c, &[&[2, 0], &[0, 2]]);
        let h = howell(&m);
        assert_eq!(h.to_matrix(), m);
        assert_eq!(h.span_log_order(), 2);
        assert_eq!(enumerate_span(&m).len(), 4);
    }

    #[test]
    fn membership_examples() {
        let c = cfg(2, 2);
        let h = howell(&mat(&c, &[&[2, 0], &[0, 2]]));
        assert!(member(&[0, 0], &h).unwrap().is_member());
        assert!(member(&[2, 2], &h).unwrap().is_member());
        assert_eq!(
            member(&[1, 0], &h).unwrap(),
            Membership::Outside { remainder: vec![1, 0] }
        );
        assert!(member(&[1], &h).is_err());
    }

    #[test]
    fn howell_property_needs_annihilator_rows() {
        // Over Z/4 the span of (2, 1) contains 2*(2, 1) = (0, 2), which plain
        // echelon form would miss.
        let c = cfg(2, 2);
        let h = howell(&mat(&c, &[&[2, 1]]));
        assert_eq!(h.to_matrix().row_vecs(), vec![vec![2, 1], vec![0, 2]]);
        assert!(member(&[0, 2], &h).unwrap().is_member());
    }

    #[test]
    fn kernel_over_z4() {
        let c = cfg(2, 2);
        // x -> 2x on Z/4 has kernel {0, 2}.
        let k = kernel(&mat(&c, &[&[2]]));
        assert_eq!(k, vec![vec![2]]);
        assert!(kernel(&FlatMatrix::identity(&c, 2)).is_empty());
    }

    /// Small matrices over Z/4 (2 columns) and Z/9 (1 column).
    fn small_matrix() -> impl Strategy<Value = FlatMatrix> {
        prop_oneof![
            prop::collection::vec(prop::collection::vec(0u64..4, 2), 0..=2)
                .prop_map(|rows| FlatMatrix::from_rows(&cfg(2, 2), 2, &rows)),
            prop::collection::vec(prop::collection::vec(0u64..9, 1), 0..=2)
                .prop_map(|rows| FlatMatrix::from_rows(&cfg(3, 2), 1, &rows)),
        ]
    }

    #[test]
    fn membership_agrees_with_enumeration_exhaustively() {
        let c = cfg(2, 2);
        let vals: Vec<[u64; 2]> = (0..16).map(|n| [n % 4, n / 4]).collect();
        for r1 in &vals {
            for r2 in &vals {
                let m = mat(&c, &[r1, r2]);
                let span = enumerate_span(&m);
                let h = howell(&m);
                assert_eq!(h.span_log_order(), (span.len() as f64).log2() as u64);
                for v in &vals {
                    assert_eq!(member(v, &h).unwrap().is_member(), span.contains(&v.to_vec()));
                }
            }
        }
        let c9 = cfg(3, 2);
        for x in 0..9u64 {
            for y in 0..9u64 {
                let m = mat(&c9, &[&[x], &[y]]);
                let span = enumerate_span(&m);
                let h = howell(&m);
                for v in 0..9u64 {
                    assert_eq!(member(&[v], &h).unwrap().is_member(), span.contains(&vec![v]));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn membership_agrees_with_enumeration(m in small_matrix()) {
            let span = enumerate_span(&m);
            let h = howell(&m);
            for v in &span {
                prop_assert!(member(v, &h).unwrap().is_member());
            }
            for r in 0..h.len() {
                prop_assert!(span.contains(h.row(r)));
                // re-reducing a basis row leaves nothing
                prop_assert!(h.reduce(h.row(r)).unwrap().iter().all(|&x| x == 0));
            }
        }

        #[test]
        fn canonical_under_permutation_and_unit_scaling(
            rows in prop::collection::vec(prop::collection::vec(0u64..27, 4), 1..6),
            units in prop::collection::vec(prop::sample::select(vec![1u64, 2, 4, 5, 7, 8, 10, 26]), 6),
            seed in any::<u64>(),
        ) {
            let c = cfg(3, 3);
            let m = FlatMatrix::from_rows(&c, 4, &rows);
            let mut perm: Vec<usize> = (0..rows.len()).collect();
            let mut s = seed;
            for i in (1..perm.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (s >> 33) as usize % (i + 1));
            }
            let mut scaled = m.permute_rows(&perm);
            for r in 0..scaled.rows() {
                for col in 0..4 {
                    let x = c.mul(scaled.get(r, col), units[r]);
                    scaled.set(r, col, x);
                }
            }
            prop_assert_eq!(howell(&m), howell(&scaled));
            // the Howell basis spans the same module as its input
            prop_assert_eq!(howell(&howell(&m).to_matrix()), howell(&m));
        }

        #[test]
        fn kernel_vectors_are_annihilated(
            rows in prop::collection::vec(prop::collection::vec(0u64..8, 3), 1..5),
        ) {
            let c = cfg(2, 3);
            let m = FlatMatrix::from_rows(&c, 3, &rows);
            let ker = kernel(&m);
            for x in &ker {
                for col in 0..3 {
                    let s = (0..m.rows()).fold(0, |acc, r| c.add(acc, c.mul(x[r], m.get(r, col))));
                    prop_assert_eq!(s, 0);
                }
            }
            // brute force: every kernel element is in the span of the generators
            let kh = howell(&FlatMatrix::from_rows(&c, m.rows(), &ker));
            let n = m.rows() as u32;
            for code in 0..8u64.pow(n) {
                let x: Vec<u64> = (0..n).map(|i| (code / 8u64.pow(i)) % 8).collect();
                let annihilated = (0..3).all(|col| {
                    (0..m.rows()).fold(0, |acc, r| c.add(acc, c.mul(x[r], m.get(r, col)))) == 0
                });
                prop_assert_eq!(annihilated, member(&x, &kh).unwrap().is_member());
            }
        }
    }
}
