use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::brauer::BrauerTable;
use super::ModrepError;
use crate::chartab::CharacterTable;
use crate::cyc::Cyc;

/// Rows: ordinary characters; columns: Brauer characters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionMatrix {
    pub entries: Vec<Vec<u64>>,
}

/// `C = D^T D`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CartanMatrix {
    pub entries: Vec<Vec<u64>>,
}

impl DecompositionMatrix {
    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries.first().map_or(0, Vec::len)
    }

    pub fn get(&self, chi: usize, phi: usize) -> u64 {
        self.entries[chi][phi]
    }
}

impl CartanMatrix {
    pub fn from_decomposition(d: &DecompositionMatrix) -> CartanMatrix {
        let l = d.cols();
        let entries = (0..l)
            .map(|a| {
                (0..l)
                    .map(|b| d.entries.iter().map(|row| row[a] * row[b]).sum())
                    .collect()
            })
            .collect();
        CartanMatrix { entries }
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, a: usize, b: usize) -> u64 {
        self.entries[a][b]
    }

    /// Principal submatrix on the given indices.
    pub fn submatrix(&self, idx: &[usize]) -> Vec<Vec<u64>> {
        idx.iter()
            .map(|&a| idx.iter().map(|&b| self.entries[a][b]).collect())
            .collect()
    }
}

/// Solves `chi|_{p-regular} = sum_phi d_{chi phi} phi` over Q by expanding
/// every value into rational power-basis coordinates. The table conductor
/// must divide the exponent of the Brauer table's correspondence.
pub fn decomposition_and_cartan(
    t: &CharacterTable,
    b: &BrauerTable,
) -> Result<(DecompositionMatrix, CartanMatrix), ModrepError> {
    let big = b.correspondence().exponent() as u32;
    let l = b.len();
    let k = t.len();
    let regular = b.regular_classes();
    if !big.is_multiple_of(t.conductor()) {
        return Err(ModrepError::Inconsistent("tables use incompatible conductors".into()));
    }
    let targets: Vec<Vec<Cyc>> = (0..k)
        .map(|chi| regular.iter().map(|&c| t.value(chi, c).clone()).collect())
        .collect();
    let sol = decompose(b.values(), &targets, big)
        .ok_or_else(|| ModrepError::Inconsistent("Brauer characters do not span".into()))?;
    let mut entries = vec![vec![0u64; l]; k];
    for chi in 0..k {
        for phi in 0..l {
            let x = &sol[chi][phi];
            if !x.is_integer() || x.is_negative() {
                return Err(ModrepError::NonIntegralSolution { chi });
            }
            entries[chi][phi] = u64::try_from(x.to_integer())
                .map_err(|_| ModrepError::NonIntegralSolution { chi })?;
        }
        let deg: u64 = entries[chi].iter().zip(b.degrees()).map(|(d, f)| d * f).sum();
        if deg != t.degree(chi) {
            return Err(ModrepError::NonIntegralSolution { chi });
        }
    }
    let d = DecompositionMatrix { entries };
    let c = CartanMatrix::from_decomposition(&d);
    Ok((d, c))
}

/// Writes each target class function as a rational combination of the
/// `basis` functions (all values embedded in conductor `big`).
/// Returns `x[target][basis]`, or `None` when the basis is dependent or a
/// target lies outside its span.
pub fn decompose(basis: &[Vec<Cyc>], targets: &[Vec<Cyc>], big: u32) -> Option<Vec<Vec<BigRational>>> {
    let l = basis.len();
    let k = targets.len();
    let cols = basis.first().map_or(0, Vec::len);
    let coords = |x: &Cyc| -> Option<Vec<BigRational>> {
        big.is_multiple_of(x.conductor()).then(|| x.embed(big).rational_coords())
    };
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for c in 0..cols {
        let phis: Vec<Vec<BigRational>> = basis.iter().map(|v| coords(&v[c])).collect::<Option<_>>()?;
        let chis: Vec<Vec<BigRational>> = targets.iter().map(|v| coords(&v[c])).collect::<Option<_>>()?;
        let width = phis.first().or(chis.first()).map_or(0, Vec::len);
        for coord in 0..width {
            let mut row: Vec<BigRational> = phis.iter().map(|v| v[coord].clone()).collect();
            row.extend(chis.iter().map(|v| v[coord].clone()));
            rows.push(row);
        }
    }
    let sol = solve_unique(rows, l, k)?;
    Some((0..k).map(|j| (0..l).map(|i| sol[i][j].clone()).collect()).collect())
}

/// Gauss-Jordan on `[A | B]` with `n` unknowns; `None` unless `A` has full
/// column rank and every right-hand side is consistent. Returns `x[i][j]`.
fn solve_unique(mut rows: Vec<Vec<BigRational>>, n: usize, rhs: usize) -> Option<Vec<Vec<BigRational>>> {
    let mut r = 0;
    for c in 0..n {
        let piv = (r..rows.len()).find(|&i| !rows[i][c].is_zero())?;
        rows.swap(r, piv);
        let inv = BigRational::one() / rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x = &*x - &factor * y;
                }
            }
        }
        r += 1;
    }
    if rows.len() < n {
        return None;
    }
    if rows[n..].iter().any(|row| row[n..].iter().any(|x| !x.is_zero())) {
        return None;
    }
    Some(
        (0..n)
            .map(|i| (0..rhs).map(|j| rows[i][n + j].clone()).collect())
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::chartab::character_table;
    use crate::classes::ClassData;
    use crate::group::Group;
    use crate::modrep::all_simples;
    use crate::perm::Perm;
    use crate::reduction::Correspondence;
    use num_bigint::BigInt;

    fn big(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn group(n: usize, gens: &[&[&[usize]]]) -> Group {
        Group::new(
            n,
            gens.iter().map(|c| Perm::from_cycles(n, c).unwrap()).collect(),
        )
    }

    fn dc(g: &Group, p: u64) -> (CharacterTable, BrauerTable, DecompositionMatrix, CartanMatrix) {
        let c = Arc::new(ClassData::new(g).unwrap());
        let t = character_table(g, &c).unwrap();
        let corr = Arc::new(Correspondence::new(c.exponent(), p).unwrap());
        let b = all_simples(g, &c, &corr, 3).unwrap();
        let (d, cm) = decomposition_and_cartan(&t, &b).unwrap();
        (t, b, d, cm)
    }

    #[test]
    fn a4_mod_2() {
        let a4 = group(4, &[&[&[1, 2, 3]], &[&[1, 2], &[3, 4]]]);
        let (t, _, d, c) = dc(&a4, 2);
        assert_eq!(t.degrees(), &[1, 1, 1, 3]);
        // the 3-dimensional character contains each Brauer character once
        assert_eq!(d.entries[3], vec![1, 1, 1]);
        for chi in 0..3 {
            assert_eq!(d.entries[chi].iter().sum::<u64>(), 1);
        }
        assert_eq!(c.entries, vec![vec![2, 1, 1], vec![1, 2, 1], vec![1, 1, 2]]);
    }

    #[test]
    fn coprime_characteristic_is_trivial() {
        let s3 = group(3, &[&[&[1, 2]], &[&[1, 2, 3]]]);
        let (t, b, d, c) = dc(&s3, 5);
        assert_eq!(b.len(), t.len());
        for a in 0..t.len() {
            assert_eq!(d.entries[a].iter().sum::<u64>(), 1);
            for bb in 0..t.len() {
                assert_eq!(c.get(a, bb), (a == bb) as u64);
            }
        }
    }

    #[test]
    fn a5_mod_2_principal_cartan() {
        let a5 = group(5, &[&[&[1, 2, 3]], &[&[1, 2, 3, 4, 5]]]);
        let (_, b, _, c) = dc(&a5, 2);
        assert_eq!(b.degrees(), &[1, 2, 2, 4]);
        assert_eq!(c.submatrix(&[0, 1, 2]), vec![vec![4, 2, 2], vec![2, 2, 1], vec![2, 1, 2]]);
        assert_eq!(c.get(3, 3), 1);
        // sum_{phi, psi} c phi(1) psi(1) = |G|
        let total: u64 = (0..4)
            .flat_map(|x| (0..4).map(move |y| (x, y)))
            .map(|(x, y)| c.get(x, y) * b.degrees()[x] * b.degrees()[y])
            .sum();
        assert_eq!(total, 60);
    }

    #[test]
    fn solver_rejects_rank_deficiency() {
        let rows = vec![vec![big(1), big(2), big(3)], vec![big(2), big(4), big(6)]];
        assert!(solve_unique(rows, 2, 1).is_none());
        let rows = vec![vec![big(2), big(0), big(4)], vec![big(0), big(3), big(3)]];
        let x = solve_unique(rows, 2, 1).unwrap();
        assert_eq!(x, vec![vec![big(2)], vec![big(1)]]);
    }
}
