use super::FlatMatrix;

/// Invariant factors of `(Z/p^N)^cols / rowspan(M)` as prime-power orders,
/// ascending, with trivial factors omitted.
///
/// Equivalent to the Smith form of the integer lift of `M` stacked on
/// `p^N * I`. Because `Z/p^N` is local, the elimination can run modulo `p^N`
/// directly: a minimal-valuation pivot divides every remaining entry.
pub fn coker_invariants(m: &FlatMatrix) -> Vec<u64> {
    let cfg = *m.cfg();
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<u64>> = m.row_vecs();
    let mut active_rows: Vec<usize> = (0..rows).collect();
    let mut active_cols: Vec<usize> = (0..cols).collect();
    let mut diag: Vec<u32> = Vec::new();

    loop {
        let mut best: Option<(u32, usize, usize)> = None;
        for (ri, &r) in active_rows.iter().enumerate() {
            for (ci, &c) in active_cols.iter().enumerate() {
                let x = a[r][c];
                if x != 0 {
                    let v = cfg.valuation(x);
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, ri, ci));
                        if v == 0 {
                            break;
                        }
                    }
                }
            }
            if best.is_some_and(|(v, _, _)| v == 0) {
                break;
            }
        }
        let Some((v, ri, ci)) = best else { break };
        let (pr, pc) = (active_rows.swap_remove(ri), active_cols.swap_remove(ci));
        let (_, unit_inv) = cfg.split_unit(a[pr][pc]);
        let pivot_row: Vec<u64> = a[pr].iter().map(|&x| cfg.mul(x, unit_inv)).collect();
        let pv = cfg.p.pow(v);
        for &r in &active_rows {
            let x = a[r][pc];
            if x == 0 {
                continue;
            }
            let q = x / pv;
            for &c in &active_cols {
                a[r][c] = cfg.sub(a[r][c], cfg.mul(q, pivot_row[c]));
            }
            a[r][pc] = 0;
        }
        // Column operations clear the rest of the pivot row without touching
        // any other row, since the pivot column is now zero elsewhere.
        diag.push(v);
    }

    let mut orders: Vec<u64> = diag
        .into_iter()
        .filter(|&v| v > 0)
        .map(|v| cfg.p.pow(v))
        .collect();
    orders.extend(std::iter::repeat_n(cfg.modulus(), active_cols.len()));
    orders.sort_unstable();
    orders
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff_ring::{PrimeConfig, TruncElem};
    use crate::linalg_local::{flatten, howell};
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::{Signed, Zero};
    use proptest::prelude::*;

    /// Textbook Smith form over the integers: invariant factors of
    /// `Z^cols / rowspan`, ones omitted, zeros kept as 0.
    fn integer_smith(mut a: Vec<Vec<BigInt>>, cols: usize) -> Vec<BigInt> {
        let mut out = Vec::new();
        let mut t = 0;
        let rows = a.len();
        while t < rows.min(cols) {
            // smallest nonzero |entry| in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for r in t..rows {
                for c in t..cols {
                    if !a[r][c].is_zero()
                        && best.is_none_or(|(br, bc)| a[r][c].abs() < a[br][bc].abs())
                    {
                        best = Some((r, c));
                    }
                }
            }
            let Some((br, bc)) = best else { break };
            a.swap(t, br);
            for row in a.iter_mut() {
                row.swap(t, bc);
            }
            let mut clean = true;
            for r in t + 1..rows {
                let q = a[r][t].div_floor(&a[t][t]);
                for c in t..cols {
                    let d = &q * &a[t][c];
                    a[r][c] -= d;
                }
                if !a[r][t].is_zero() {
                    clean = false;
                }
            }
            for c in t + 1..cols {
                let q = a[t][c].div_floor(&a[t][t]);
                for r in t..rows {
                    let d = &q * &a[r][t];
                    a[r][c] -= d;
                }
                if !a[t][c].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility condition
            let mut fixed = true;
            'outer: for r in t + 1..rows {
                for c in t + 1..cols {
                    if !(&a[r][c] % &a[t][t]).is_zero() {
                        for cc in t..cols {
                            let x = a[r][cc].clone();
                            a[t][cc] += x;
                        }
                        fixed = false;
                        break 'outer;
                    }
                }
            }
            if fixed {
                out.push(a[t][t].abs());
                t += 1;
            }
        }
        out.extend(std::iter::repeat_n(BigInt::zero(), cols - t));
        out.retain(|d| *d != BigInt::from(1));
        out.sort();
        out
    }

    fn lifted_invariants(m: &FlatMatrix) -> Vec<u64> {
        let q = m.cfg().modulus();
        let mut rows: Vec<Vec<BigInt>> = m
            .row_vecs()
            .into_iter()
            .map(|r| r.into_iter().map(BigInt::from).collect())
            .collect();
        for i in 0..m.cols() {
            let mut e = vec![BigInt::zero(); m.cols()];
            e[i] = BigInt::from(q);
            rows.push(e);
        }
        integer_smith(rows, m.cols())
            .into_iter()
            .map(|d| u64::try_from(d).unwrap())
            .collect()
    }

    #[test]
    fn examples() {
        let c = PrimeConfig::new(2, 2, 2).unwrap();
        assert!(coker_invariants(&FlatMatrix::identity(&c, 3)).is_empty());
        assert_eq!(coker_invariants(&FlatMatrix::zeros(&c, 2, 2)), vec![4, 4]);
        let two = flatten(&[vec![TruncElem::constant(&c, 2)]], &c);
        assert_eq!(coker_invariants(&two), vec![2, 2]);
    }

    proptest! {
        #[test]
        fn agrees_with_integer_lift(
            rows in prop::collection::vec(prop::collection::vec(0u64..27, 4), 0..6),
        ) {
            let c = PrimeConfig::new(3, 3, 1).unwrap();
            let m = FlatMatrix::from_rows(&c, 4, &rows);
            prop_assert_eq!(coker_invariants(&m), lifted_invariants(&m));
            // the Howell route sees the same module
            prop_assert_eq!(coker_invariants(&howell(&m).to_matrix()), coker_invariants(&m));
        }

        #[test]
        fn invariant_under_permutations_and_unimodular_columns(
            rows in prop::collection::vec(prop::collection::vec(0u64..16, 3), 1..5),
            k in 0u64..16,
        ) {
            let c = PrimeConfig::new(2, 4, 1).unwrap();
            let m = FlatMatrix::from_rows(&c, 3, &rows);
            let base = coker_invariants(&m);
            let rev: Vec<usize> = (0..m.rows()).rev().collect();
            prop_assert_eq!(coker_invariants(&m.permute_rows(&rev)), base.clone());
            prop_assert_eq!(coker_invariants(&m.transpose().permute_rows(&[2, 0, 1]).transpose()), base.clone());
            // column 0 += k * column 2
            let mut n = m.clone();
            for r in 0..n.rows() {
                let x = c.add(n.get(r, 0), c.mul(k, n.get(r, 2)));
                n.set(r, 0, x);
            }
            prop_assert_eq!(coker_invariants(&n), base);
        }
    }
}
