use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::coeff_ring::{PrimeConfig, TruncElem};

/// A dense row-major matrix over `Z/p^N`.
///
/// Matrices produced by [`flatten`] have both dimensions divisible by `K`;
/// derived matrices (kernel augmentations, windows) need not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatMatrix {
    cfg: PrimeConfig,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl FlatMatrix {
    pub fn zeros(cfg: &PrimeConfig, rows: usize, cols: usize) -> Self {
        FlatMatrix {
            cfg: *cfg,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(cfg: &PrimeConfig, n: usize) -> Self {
        let mut m = Self::zeros(cfg, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds from rows of residues; entries are reduced mod `p^N`.
    pub fn from_rows(cfg: &PrimeConfig, cols: usize, rows: &[Vec<u64>]) -> Self {
        let mut m = Self::zeros(cfg, rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged row {r}");
            for (c, &x) in row.iter().enumerate() {
                m.set(r, c, x % cfg.modulus());
            }
        }
        m
    }

    pub fn cfg(&self) -> &PrimeConfig {
        &self.cfg
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, x: u64) {
        self.data[r * self.cols + c] = x;
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.cfg, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// Stacks the rows of `other` below `self`.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        FlatMatrix {
            cfg: self.cfg,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        let cols = self.cols + other.cols;
        let mut m = Self::zeros(&self.cfg, self.rows, cols);
        for r in 0..self.rows {
            m.data[r * cols..r * cols + self.cols].copy_from_slice(self.row(r));
            m.data[r * cols + self.cols..(r + 1) * cols].copy_from_slice(other.row(r));
        }
        m
    }

    /// Reinterprets the residues modulo `p^e` for `e <= N`.
    pub fn reduce_to(&self, cfg: &PrimeConfig) -> Self {
        assert_eq!(cfg.p, self.cfg.p);
        assert!(cfg.p_prec <= self.cfg.p_prec);
        FlatMatrix {
            cfg: *cfg,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x % cfg.modulus()).collect(),
        }
    }

    /// Permutes rows so that row `i` of the result is row `perm[i]` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> Self {
        let rows: Vec<Vec<u64>> = perm.iter().map(|&r| self.row(r).to_vec()).collect();
        Self::from_rows(&self.cfg, self.cols, &rows)
    }
}

impl Serialize for FlatMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.rows))?;
        for r in 0..self.rows {
            seq.serialize_element(&super::residue_strings(self.row(r)))?;
        }
        seq.end()
    }
}

/// Expands a matrix over `R` into a matrix over `Z/p^N`: each entry `x`
/// becomes the `K x K` matrix of multiplication by `x` in the basis
/// `a^0, ..., a^(K-1)`, with column `j` holding the coordinates of `x a^j`.
pub fn flatten(m: &[Vec<TruncElem>], cfg: &PrimeConfig) -> FlatMatrix {
    let k = cfg.a_prec;
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut out = FlatMatrix::zeros(cfg, rows * k, cols * k);
    for (r, row) in m.iter().enumerate() {
        assert_eq!(row.len(), cols, "ragged matrix");
        for (c, x) in row.iter().enumerate() {
            assert_eq!(x.cfg(), cfg);
            for j in 0..k {
                for (d, &coef) in x.coeffs()[..k - j].iter().enumerate() {
                    out.set(r * k + j + d, c * k + j, coef);
                }
            }
        }
    }
    out
}

/// Rows spanning the `R`-submodule generated by `vectors` in `R^n`: one row
/// for each `a^j * v`, laid out with coordinate `(g, d)` at `g*K + d`.
pub fn relation_rows(vectors: &[Vec<TruncElem>], n: usize, cfg: &PrimeConfig) -> FlatMatrix {
    if vectors.is_empty() {
        return FlatMatrix::zeros(cfg, 0, n * cfg.a_prec);
    }
    // Columns of flatten(V^T) are exactly the shifted relation vectors.
    let transposed: Vec<Vec<TruncElem>> = (0..n)
        .map(|g| vectors.iter().map(|v| v[g].clone()).collect())
        .collect();
    flatten(&transposed, cfg).transpose()
}
