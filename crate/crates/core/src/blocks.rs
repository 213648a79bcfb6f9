//! p-blocks: distribution of ordinary and Brauer characters, defects and
//! defect groups, Cartan submatrices, the invariant `tau(b)`, and the
//! conjecture checks built on them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::chartab::{ChartabError, CharacterTable};
use crate::classes::ClassData;
use crate::field::Elem;
use crate::group::{Group, GroupError};
use crate::modrep::{BrauerTable, CartanMatrix, DecompositionMatrix};
use crate::psub::{p_valuation, sectional_rank, sylow_subgroup, PSubgroup, PSubgroupSummary};
use crate::reduction::Correspondence;

/// Exact non-negative fraction, serialized as `"num/den"`.
pub type Fraction = Ratio<u64>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BlockError {
    #[error("reduced central character of character {chi} is not multiplicative")]
    ReductionInconsistent { chi: usize },
    #[error("central character of character {chi} does not reduce mod p")]
    NotIntegral { chi: usize },
    #[error("block {block}: defect group has order {found}, expected {expected}")]
    DefectMismatch { block: usize, expected: u128, found: u128 },
    #[error("Brauer character {phi} lies in more than one block")]
    CrossBlockEntry { phi: usize },
    #[error("Brauer character {phi} lies in no block")]
    UnassignedBrauer { phi: usize },
    #[error("block {block}: ordinary dimension {ordinary} but Cartan dimension {modular}")]
    DimMismatch { block: usize, ordinary: u64, modular: u64 },
    #[error("{op}: shape mismatch")]
    ShapeMismatch { op: &'static str },
    #[error("induced central function matches blocks {matches:?}")]
    AmbiguousInduction { matches: Vec<usize> },
    #[error("fusion map is inconsistent")]
    FusionInconsistent,
    #[error("block {block}: {what}")]
    InvariantViolated { block: usize, what: String },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Chartab(#[from] ChartabError),
}

/// Partition of `Irr(G)` into p-blocks.
#[derive(Clone, Debug)]
pub struct Distribution {
    /// Irr members per block; principal block first, then by least member.
    pub cells: Vec<Vec<usize>>,
    /// `lambda_b(K)` per block and class.
    pub lambda: Vec<Vec<Elem>>,
    /// Block of each ordinary character.
    pub block_of: Vec<usize>,
}

/// Groups characters by their central characters reduced through `corr`.
/// Each reduced central character is checked against the class algebra
/// structure constants `a[i][j][k]`.
pub fn block_distribution(
    table: &CharacterTable,
    corr: &Correspondence,
    class_mats: &[Vec<Vec<u64>>],
) -> Result<Distribution, BlockError> {
    let f = corr.field();
    let k = table.len();
    let mut cells: Vec<Vec<usize>> = Vec::new();
    let mut lambda: Vec<Vec<Elem>> = Vec::new();
    for chi in 0..k {
        let w = corr
            .reduce_all(&table.central_character(chi))
            .ok_or(BlockError::NotIntegral { chi })?;
        if !class_mats.is_empty() {
            for (i, ai) in class_mats.iter().enumerate() {
                for (j, aij) in ai.iter().enumerate() {
                    let rhs = aij.iter().zip(&w).fold(f.zero(), |acc, (&a, &x)| {
                        f.add(acc, f.mul(f.from_int((a % corr.prime()) as i64), x))
                    });
                    if f.mul(w[i], w[j]) != rhs {
                        return Err(BlockError::ReductionInconsistent { chi });
                    }
                }
            }
        }
        match lambda.iter().position(|l| *l == w) {
            Some(b) => cells[b].push(chi),
            None => {
                cells.push(vec![chi]);
                lambda.push(w);
            }
        }
    }
    // principal first, then by least member (cells are already in that order
    // apart from the principal one)
    let principal = cells
        .iter()
        .position(|c| c.contains(&table.trivial()))
        .expect("trivial character has a block");
    let pc = cells.remove(principal);
    let pl = lambda.remove(principal);
    cells.insert(0, pc);
    lambda.insert(0, pl);
    let mut block_of = vec![0; k];
    for (b, cell) in cells.iter().enumerate() {
        for &chi in cell {
            block_of[chi] = b;
        }
    }
    Ok(Distribution {
        cells,
        lambda,
        block_of,
    })
}

/// `d(b) = nu_p |G| - min nu_p chi(1)`.
pub fn block_defect(cell: &[usize], table: &CharacterTable, p: u64) -> u32 {
    let a = p_valuation(table.classes().group_order() as u128, p);
    let m = cell
        .iter()
        .map(|&chi| p_valuation(table.degree(chi) as u128, p))
        .min()
        .expect("nonempty block");
    a - m
}

/// Sylow p-subgroup of `C_G(x)` for a p-regular class with
/// `lambda_b(K) != 0` minimising `nu_p |C_G(x)|` (least index on ties).
pub fn defect_group(
    block: usize,
    lambda: &[Elem],
    defect: u32,
    group: &Group,
    classes: &ClassData,
    p: u64,
) -> Result<PSubgroup, BlockError> {
    let k = classes
        .p_regular(p)
        .into_iter()
        .filter(|&k| !lambda[k].is_zero())
        .min_by_key(|&k| (p_valuation(classes.centralizer_order(k) as u128, p), k))
        .ok_or_else(|| BlockError::InvariantViolated {
            block,
            what: "central character vanishes on every p-regular class".into(),
        })?;
    let en = group.enumeration()?;
    let x = en.element(classes.rep(k));
    let c = group.centralizer(x)?;
    let d = sylow_subgroup(&c, p)?;
    let expected = (p as u128).pow(defect);
    if d.order() != expected {
        return Err(BlockError::DefectMismatch {
            block,
            expected,
            found: d.order(),
        });
    }
    Ok(d)
}

/// Assigns each Brauer character to the unique block whose ordinary
/// characters involve it.
pub fn ibr_partition(d: &DecompositionMatrix, dist: &Distribution) -> Result<Vec<Vec<usize>>, BlockError> {
    let mut out = vec![Vec::new(); dist.cells.len()];
    for phi in 0..d.cols() {
        let mut owner: Option<usize> = None;
        for chi in 0..d.rows() {
            if d.get(chi, phi) == 0 {
                continue;
            }
            let b = dist.block_of[chi];
            match owner {
                Some(o) if o != b => return Err(BlockError::CrossBlockEntry { phi }),
                _ => owner = Some(b),
            }
        }
        let b = owner.ok_or(BlockError::UnassignedBrauer { phi })?;
        out[b].push(phi);
    }
    Ok(out)
}

/// `deg^T C deg / deg^T deg`.
pub fn tau_from_cartan(c: &[Vec<u64>], degrees: &[u64]) -> Result<Fraction, BlockError> {
    let n = degrees.len();
    if n == 0 || c.len() != n || c.iter().any(|r| r.len() != n) {
        return Err(BlockError::ShapeMismatch { op: "tau_from_cartan" });
    }
    let mut num = 0u64;
    for (i, row) in c.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            num += degrees[i] * x * degrees[j];
        }
    }
    let den: u64 = degrees.iter().map(|d| d * d).sum();
    Ok(Fraction::new(num, den))
}

pub fn ser_fraction<S: Serializer>(r: &Fraction, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_fraction(r))
}

pub fn serialize_opt_fraction<S: Serializer>(r: &Option<Fraction>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&format_fraction(r)),
        None => s.serialize_none(),
    }
}

pub fn format_fraction(r: &Fraction) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Everything recorded about one block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockRecord {
    pub id: usize,
    pub irr: Vec<usize>,
    pub ibr: Vec<usize>,
    /// `lambda_b` per class, as base-p encodings of field elements.
    pub lambda: Vec<u32>,
    pub defect: u32,
    pub defect_group: PSubgroupSummary,
    pub defect_group_order: u64,
    pub sectional_rank: u32,
    pub cartan: Vec<Vec<u64>>,
    pub dim: u64,
    #[serde(serialize_with = "ser_fraction")]
    pub tau: Fraction,
    pub trace: u64,
    pub irr_degrees: Vec<u64>,
    pub ibr_degrees: Vec<u64>,
    pub is_principal: bool,
    pub is_defect_zero: bool,
}

impl BlockRecord {
    pub fn l(&self) -> usize {
        self.ibr.len()
    }
}

/// Inputs for [`block_records`], all over the same `(G, p)`.
pub struct BlockInputs<'a> {
    pub group: &'a Group,
    pub classes: &'a ClassData,
    pub table: &'a CharacterTable,
    pub brauer: &'a BrauerTable,
    pub decomposition: &'a DecompositionMatrix,
    pub cartan: &'a CartanMatrix,
    pub distribution: &'a Distribution,
}

/// Builds and checks every block record.
pub fn block_records(inp: &BlockInputs<'_>) -> Result<Vec<BlockRecord>, BlockError> {
    let corr = inp.brauer.correspondence();
    let p = corr.prime();
    let f = corr.field();
    let ibr = ibr_partition(inp.decomposition, inp.distribution)?;
    let mut out = Vec::new();
    for (b, cell) in inp.distribution.cells.iter().enumerate() {
        let defect = block_defect(cell, inp.table, p);
        let dg = defect_group(b, &inp.distribution.lambda[b], defect, inp.group, inp.classes, p)?;
        let s = sectional_rank(&dg)?;
        let phis = &ibr[b];
        if phis.is_empty() {
            return Err(BlockError::InvariantViolated {
                block: b,
                what: "no Brauer characters".into(),
            });
        }
        let cb = inp.cartan.submatrix(phis);
        let ibr_degrees: Vec<u64> = phis.iter().map(|&x| inp.brauer.degrees()[x]).collect();
        let irr_degrees: Vec<u64> = cell.iter().map(|&x| inp.table.degree(x)).collect();
        let ordinary: u64 = irr_degrees.iter().map(|d| d * d).sum();
        let tau = tau_from_cartan(&cb, &ibr_degrees)?;
        let modular: u64 = (0..phis.len())
            .flat_map(|i| (0..phis.len()).map(move |j| (i, j)))
            .map(|(i, j)| cb[i][j] * ibr_degrees[i] * ibr_degrees[j])
            .sum();
        if ordinary != modular {
            return Err(BlockError::DimMismatch {
                block: b,
                ordinary,
                modular,
            });
        }
        let trace: u64 = (0..cb.len()).map(|i| cb[i][i]).sum();
        let rec = BlockRecord {
            id: b,
            irr: cell.clone(),
            ibr: phis.clone(),
            lambda: inp.distribution.lambda[b].iter().map(|&x| f.encoding(x)).collect(),
            defect,
            defect_group: PSubgroupSummary::from(&dg),
            defect_group_order: dg.order() as u64,
            sectional_rank: s,
            cartan: cb,
            dim: ordinary,
            tau,
            trace,
            irr_degrees,
            ibr_degrees,
            is_principal: b == 0,
            is_defect_zero: defect == 0,
        };
        check_record(&rec, p)?;
        out.push(rec);
    }
    Ok(out)
}

/// The structural invariants every record must satisfy.
pub fn check_record(r: &BlockRecord, p: u64) -> Result<(), BlockError> {
    let fail = |what: &str| {
        Err(BlockError::InvariantViolated {
            block: r.id,
            what: what.into(),
        })
    };
    if r.irr.is_empty() || r.ibr.is_empty() {
        return fail("empty block");
    }
    if r.defect_group_order != p.pow(r.defect) {
        return fail("defect group order");
    }
    let det = determinant(&r.cartan);
    if !is_p_power_big(&det, p) {
        return fail("Cartan determinant is not a power of p");
    }
    if !positive_definite(&r.cartan) {
        return fail("Cartan matrix is not positive definite");
    }
    let one = Fraction::one();
    if r.tau < one || (r.tau == one) != (r.defect == 0) {
        return fail("tau >= 1 with equality iff defect zero");
    }
    if r.tau > Fraction::from_integer(r.trace) {
        return fail("tau exceeds the Cartan trace");
    }
    Ok(())
}

/// Bareiss fraction-free determinant.
pub fn determinant(m: &[Vec<u64>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(sw) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, sw);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Sylvester criterion on leading minors.
pub fn positive_definite(m: &[Vec<u64>]) -> bool {
    (1..=m.len()).all(|k| {
        let lead: Vec<Vec<u64>> = m[..k].iter().map(|r| r[..k].to_vec()).collect();
        determinant(&lead).is_positive()
    })
}

pub fn is_p_power_big(n: &BigInt, p: u64) -> bool {
    if !n.is_positive() {
        return false;
    }
    let p = BigInt::from(p);
    let mut n = n.clone();
    while n > BigInt::one() {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return false;
        }
        n = q;
    }
    true
}

/// Conjecture checks for one block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjectureVerdict {
    /// `tau(b) <= l(b) |P|`
    pub hw_holds: bool,
    pub hw_equality: bool,
    /// Equality occurs exactly when `l(b) = 1`.
    pub hw_equality_iff_l1_consistent: bool,
    /// `l(b) <= p^s(b)`
    pub mr_holds: bool,
    pub ineq3_applicable: bool,
    /// `tau(b) < p^s(b) |P|`; `None` when the defect group is trivial.
    pub ineq3_holds: Option<bool>,
    /// `tau(b) <= Tr(C_b)`
    pub trace_bound_holds: bool,
}

impl ConjectureVerdict {
    /// Every applicable check holds (the equality observation included).
    pub fn all_hold(&self) -> bool {
        self.hw_holds
            && self.hw_equality_iff_l1_consistent
            && self.mr_holds
            && self.ineq3_holds.unwrap_or(true)
            && self.trace_bound_holds
    }
}

pub fn check_conjectures(r: &BlockRecord, p: u64) -> ConjectureVerdict {
    let l = r.l() as u64;
    let order = r.defect_group_order;
    let hw_bound = Fraction::from_integer(l * order);
    let ps = p.pow(r.sectional_rank);
    let ineq3_applicable = r.defect > 0;
    ConjectureVerdict {
        hw_holds: r.tau <= hw_bound,
        hw_equality: r.tau == hw_bound,
        hw_equality_iff_l1_consistent: (r.tau == hw_bound) == (l == 1),
        mr_holds: l <= ps,
        ineq3_applicable,
        ineq3_holds: ineq3_applicable.then(|| r.tau < Fraction::from_integer(ps * order)),
        trace_bound_holds: r.tau <= Fraction::from_integer(r.trace),
    }
}

/// Blocks of `N` covered by each block of `G`, from the restriction
/// multiplicities `m[chi][psi]`.
pub fn block_covering(
    g_dist: &Distribution,
    n_dist: &Distribution,
    restriction: &[Vec<u64>],
) -> Result<Vec<Vec<usize>>, BlockError> {
    g_dist
        .cells
        .iter()
        .map(|cell| {
            let mut covered: Vec<usize> = cell
                .iter()
                .flat_map(|&chi| {
                    restriction[chi]
                        .iter()
                        .enumerate()
                        .filter(|(_, &m)| m > 0)
                        .map(|(psi, _)| n_dist.block_of[psi])
                })
                .collect();
            covered.sort_unstable();
            covered.dedup();
            if covered.is_empty() {
                return Err(BlockError::FusionInconsistent);
            }
            Ok(covered)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Induced {
    Block(usize),
    Undefined,
}

/// `lambda_hat^G(K) = sum over subgroup classes L inside K of lambda_hat(L)`;
/// the block of `G` with that central character, if there is exactly one.
/// `sub_lambda` must be reduced through the correspondence of `G`.
pub fn block_induction(
    sub_lambda: &[Elem],
    fusion: &[usize],
    g_dist: &Distribution,
    corr: &Correspondence,
) -> Result<Induced, BlockError> {
    if sub_lambda.len() != fusion.len() {
        return Err(BlockError::FusionInconsistent);
    }
    let f = corr.field();
    let k = g_dist.lambda.first().map_or(0, Vec::len);
    let mut ind = vec![f.zero(); k];
    for (&l, &c) in sub_lambda.iter().zip(fusion) {
        if c >= k {
            return Err(BlockError::FusionInconsistent);
        }
        ind[c] = f.add(ind[c], l);
    }
    let matches: Vec<usize> = g_dist
        .lambda
        .iter()
        .enumerate()
        .filter(|(_, l)| **l == ind)
        .map(|(b, _)| b)
        .collect();
    match matches.len() {
        0 => Ok(Induced::Undefined),
        1 => Ok(Induced::Block(matches[0])),
        _ => Err(BlockError::AmbiguousInduction { matches }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frac(n: u64, d: u64) -> Fraction {
        Fraction::new(n, d)
    }

    #[test]
    fn tau_examples() {
        let id = vec![vec![1, 0], vec![0, 1]];
        assert_eq!(tau_from_cartan(&id, &[3, 5]).unwrap(), frac(1, 1));
        let a4 = vec![vec![2, 1, 1], vec![1, 2, 1], vec![1, 1, 2]];
        assert_eq!(tau_from_cartan(&a4, &[1, 1, 1]).unwrap(), frac(4, 1));
        let a5 = vec![vec![4, 2, 2], vec![2, 2, 1], vec![2, 1, 2]];
        assert_eq!(tau_from_cartan(&a5, &[1, 2, 2]).unwrap(), frac(44, 9));
        assert!(tau_from_cartan(&a4, &[1, 1]).is_err());
    }

    #[test]
    fn determinants() {
        assert_eq!(determinant(&[vec![2, 1, 1], vec![1, 2, 1], vec![1, 1, 2]]), BigInt::from(4));
        assert_eq!(determinant(&[vec![0, 1], vec![1, 0]]), BigInt::from(-1));
        assert_eq!(determinant(&[vec![4, 2, 2], vec![2, 2, 1], vec![2, 1, 2]]), BigInt::from(4));
        assert!(positive_definite(&[vec![2, 1], vec![1, 2]]));
        assert!(!positive_definite(&[vec![1, 2], vec![2, 1]]));
        assert!(is_p_power_big(&BigInt::from(8), 2));
        assert!(!is_p_power_big(&BigInt::from(12), 2));
    }

    fn record(tau: Fraction, l: usize, order: u64, defect: u32, s: u32, trace: u64) -> BlockRecord {
        BlockRecord {
            id: 0,
            irr: vec![0],
            ibr: (0..l).collect(),
            lambda: vec![],
            defect,
            defect_group: PSubgroupSummary {
                order,
                generators: vec![],
                abelian: true,
                abelian_invariants: None,
            },
            defect_group_order: order,
            sectional_rank: s,
            cartan: vec![],
            dim: 0,
            tau,
            trace,
            irr_degrees: vec![],
            ibr_degrees: vec![],
            is_principal: true,
            is_defect_zero: defect == 0,
        }
    }

    #[test]
    fn verdict_examples() {
        let v = check_conjectures(&record(frac(4, 1), 3, 4, 2, 2, 6), 2);
        assert!(v.hw_holds && !v.hw_equality && v.hw_equality_iff_l1_consistent);
        assert!(v.mr_holds);
        assert_eq!(v.ineq3_holds, Some(true));
        assert!(v.trace_bound_holds);

        let c2 = check_conjectures(&record(frac(2, 1), 1, 2, 1, 1, 2), 2);
        assert!(c2.hw_equality && c2.hw_equality_iff_l1_consistent);
        assert_eq!(c2.ineq3_holds, Some(true));

        let d0 = check_conjectures(&record(frac(1, 1), 1, 1, 0, 0, 1), 2);
        assert!(!d0.ineq3_applicable);
        assert_eq!(d0.ineq3_holds, None);
        assert!(d0.all_hold());
    }

    #[test]
    fn fraction_format() {
        assert_eq!(format_fraction(&frac(88, 18)), "44/9");
        let r = record(frac(82, 5), 5, 8, 3, 3, 24);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["tau"], "82/5");
    }
}
