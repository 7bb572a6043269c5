use num_bigint::BigInt;
use serde::{Serialize, Serializer};

use super::{coker_invariants, howell, member, relation_rows, residue_strings, FlatMatrix, HowellBasis, Membership};
use crate::coeff_ring::{reduce_poly, IntPoly, PrimeConfig, TruncElem};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Generator {
    pub label: String,
    /// The `A1` basis element the generator stands for, e.g. `b^2`.
    pub basis: String,
    /// `e` such that `p^e` annihilates the generator; `None` if undeclared.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub annihilator_exponent: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Relation {
    pub label: String,
    pub coeffs: Vec<IntPoly>,
}

/// Generators `x_1..x_n` (standing for `b^1..b^n`), declared p-power
/// annihilators, and relation vectors over `Z[a]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModulePresentation {
    pub p: u64,
    pub generators: Vec<Generator>,
    pub relations: Vec<Relation>,
}

impl ModulePresentation {
    /// `n` generators `x_i = b^i` with the given annihilator exponents.
    pub fn with_generators(p: u64, exponents: &[Option<u32>]) -> Self {
        let generators = exponents
            .iter()
            .enumerate()
            .map(|(i, &e)| Generator {
                label: format!("x{}", i + 1),
                basis: format!("b^{}", i + 1),
                annihilator_exponent: e,
            })
            .collect();
        ModulePresentation {
            p,
            generators,
            relations: Vec::new(),
        }
    }

    pub fn push_relation(&mut self, label: impl Into<String>, coeffs: Vec<IntPoly>) {
        assert_eq!(coeffs.len(), self.generators.len(), "relation length must match generator count");
        self.relations.push(Relation {
            label: label.into(),
            coeffs,
        });
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// `p^e x_i` for every declared annihilator, labelled like `4x1`.
    pub fn annihilator_relations(&self) -> Vec<Relation> {
        let n = self.rank();
        self.generators
            .iter()
            .enumerate()
            .filter_map(|(i, g)| {
                let e = g.annihilator_exponent?;
                let order = BigInt::from(self.p).pow(e);
                let mut coeffs = vec![IntPoly::zero(); n];
                coeffs[i] = IntPoly::constant(order.clone());
                Some(Relation {
                    label: format!("{order}{}", g.label),
                    coeffs,
                })
            })
            .collect()
    }

    /// Annihilator relations followed by the explicit ones.
    pub fn all_relations(&self) -> Vec<Relation> {
        let mut all = self.annihilator_relations();
        all.extend(self.relations.iter().cloned());
        all
    }

    fn truncated(rel: &[Relation], cfg: &PrimeConfig) -> Vec<Vec<TruncElem>> {
        rel.iter()
            .map(|r| r.coeffs.iter().map(|c| reduce_poly(c, cfg)).collect())
            .collect()
    }

    /// Rows spanning the relation submodule of `R^n`.
    pub fn flat_relations(&self, cfg: &PrimeConfig) -> FlatMatrix {
        relation_rows(&Self::truncated(&self.all_relations(), cfg), self.rank(), cfg)
    }

    pub fn span(&self, cfg: &PrimeConfig) -> HowellBasis {
        howell(&self.flat_relations(cfg))
    }
}

/// A relation (or Howell row) that failed to lie in the other span.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MembershipFailure {
    pub source: String,
    /// Power of `a` the relation was multiplied by.
    pub a_shift: usize,
    #[serde(serialize_with = "ser_residues")]
    pub remainder: Vec<u64>,
}

fn ser_residues<S: Serializer>(v: &[u64], s: S) -> std::result::Result<S::Ok, S::Error> {
    residue_strings(v).serialize(s)
}

/// Invariant factors in run-length form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantRun {
    pub order: String,
    pub multiplicity: usize,
}

pub fn invariant_runs(orders: &[u64]) -> Vec<InvariantRun> {
    let mut runs: Vec<InvariantRun> = Vec::new();
    for o in orders {
        match runs.last_mut() {
            Some(r) if r.order == o.to_string() => r.multiplicity += 1,
            _ => runs.push(InvariantRun {
                order: o.to_string(),
                multiplicity: 1,
            }),
        }
    }
    runs
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MatchReport {
    pub matched: bool,
    pub p_prec: u32,
    pub a_prec: usize,
    /// Claimed relations not implied by the computed ones.
    pub claimed_not_in_computed: Vec<MembershipFailure>,
    /// Computed span rows not implied by the claimed relations.
    pub computed_not_in_claimed: Vec<MembershipFailure>,
    #[serde(serialize_with = "ser_runs")]
    pub claimed_invariants: Vec<u64>,
    #[serde(serialize_with = "ser_runs")]
    pub computed_invariants: Vec<u64>,
}

fn ser_runs<S: Serializer>(v: &[u64], s: S) -> std::result::Result<S::Ok, S::Error> {
    invariant_runs(v).serialize(s)
}

/// Compares a claimed presentation with a computed relation span at the
/// truncation `cfg`: mutual membership of generators plus equal cokernel
/// invariants.
pub fn modules_match(
    claimed: &ModulePresentation,
    computed: &HowellBasis,
    cfg: &PrimeConfig,
) -> Result<MatchReport> {
    let k = cfg.a_prec;
    let width = claimed.rank() * k;
    if computed.cols() != width {
        return Err(Error::DimensionMismatch {
            expected: width,
            found: computed.cols(),
        });
    }
    if computed.cfg() != cfg {
        return Err(Error::ConfigMismatch);
    }
    let claimed_rows = claimed.flat_relations(cfg);
    let claimed_span = howell(&claimed_rows);

    let mut claimed_not_in_computed = Vec::new();
    for (ri, rel) in claimed.all_relations().iter().enumerate() {
        for shift in 0..k {
            let row = claimed_rows.row(ri * k + shift);
            if let Membership::Outside { remainder } = member(row, computed)? {
                claimed_not_in_computed.push(MembershipFailure {
                    source: rel.label.clone(),
                    a_shift: shift,
                    remainder,
                });
            }
        }
    }

    let mut computed_not_in_claimed = Vec::new();
    for i in 0..computed.len() {
        if let Membership::Outside { remainder } = member(computed.row(i), &claimed_span)? {
            computed_not_in_claimed.push(MembershipFailure {
                source: format!("span row {i}"),
                a_shift: 0,
                remainder,
            });
        }
    }

    let claimed_invariants = coker_invariants(&claimed_span.to_matrix());
    let computed_invariants = coker_invariants(&computed.to_matrix());
    let matched = claimed_not_in_computed.is_empty()
        && computed_not_in_claimed.is_empty()
        && claimed_invariants == computed_invariants;
    Ok(MatchReport {
        matched,
        p_prec: cfg.p_prec,
        a_prec: cfg.a_prec,
        claimed_not_in_computed,
        computed_not_in_claimed,
        claimed_invariants,
        computed_invariants,
    })
}
