use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ModrepError;
use crate::field::{Elem, Field};
use crate::group::Group;
use crate::mat::{Echelon, Mat};

/// A kG-module given by one matrix per group generator. Vectors are rows
/// and act by `v -> vA`, so the matrix of `gh` is `M_g M_h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GModule {
    field: Arc<Field>,
    dim: usize,
    gens: Vec<Mat>,
}

impl GModule {
    pub fn new(field: &Arc<Field>, gens: Vec<Mat>) -> Result<GModule, ModrepError> {
        let dim = gens
            .first()
            .map(Mat::rows)
            .ok_or_else(|| ModrepError::BadModule("no generators".into()))?;
        if dim == 0 {
            return Err(ModrepError::BadModule("zero dimension".into()));
        }
        if gens
            .iter()
            .any(|m| m.rows() != dim || m.cols() != dim || **m.field() != **field)
        {
            return Err(ModrepError::BadModule("generator shapes disagree".into()));
        }
        Ok(GModule {
            field: field.clone(),
            dim,
            gens,
        })
    }

    /// The natural permutation module on the points moved by `group`.
    pub fn permutation(field: &Arc<Field>, group: &Group) -> GModule {
        let n = group.degree();
        let gens = group
            .generators()
            .iter()
            .map(|g| {
                let mut m = Mat::zeros(field, n, n);
                for i in 0..n {
                    m.set(i, g.apply(i), field.one());
                }
                m
            })
            .collect();
        GModule {
            field: field.clone(),
            dim: n,
            gens,
        }
    }

    pub fn trivial(field: &Arc<Field>, generators: usize) -> GModule {
        GModule {
            field: field.clone(),
            dim: 1,
            gens: vec![Mat::identity(field, 1); generators.max(1)],
        }
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Mat] {
        &self.gens
    }

    pub fn is_trivial(&self) -> bool {
        self.dim == 1 && self.gens.iter().all(|m| m.get(0, 0) == self.field.one())
    }

    /// Product of generator matrices along a word.
    pub fn word_matrix(&self, word: &[usize]) -> Mat {
        let mut acc = Mat::identity(&self.field, self.dim);
        for &g in word {
            acc = acc.mul(&self.gens[g]).expect("square");
        }
        acc
    }

    /// Matrix of the element with the given enumeration index.
    pub fn element_matrix(&self, group: &Group, index: usize) -> Result<Mat, ModrepError> {
        let en = group.enumeration()?;
        Ok(self.word_matrix(&en.word(index)))
    }

    /// Contragredient module: `g -> (M_g^{-1})^T`.
    pub fn dual(&self) -> GModule {
        GModule {
            field: self.field.clone(),
            dim: self.dim,
            gens: self
                .gens
                .iter()
                .map(|m| m.inverse().expect("group element").transpose())
                .collect(),
        }
    }

    pub fn tensor(&self, other: &GModule) -> GModule {
        GModule {
            field: self.field.clone(),
            dim: self.dim * other.dim,
            gens: self
                .gens
                .iter()
                .zip(&other.gens)
                .map(|(a, b)| a.kron(b))
                .collect(),
        }
    }

    /// Smallest submodule containing `v`.
    pub fn spin(&self, v: &[Elem]) -> Echelon {
        spin_with(&self.field, &self.gens, v)
    }

    /// Action of the module on a submodule, in the echelon basis of `sub`.
    pub fn submodule(&self, sub: &Echelon) -> GModule {
        let s = sub.len();
        let gens = self
            .gens
            .iter()
            .map(|a| {
                let rows: Vec<Vec<Elem>> = sub
                    .rows()
                    .iter()
                    .map(|b| sub.coordinates(&a.vec_mul(b)))
                    .collect();
                Mat::from_vec(&self.field, s, s, rows.concat())
            })
            .collect();
        GModule {
            field: self.field.clone(),
            dim: s,
            gens,
        }
    }

    /// Action on `M / sub`, with basis the unit vectors off the pivots.
    pub fn quotient(&self, sub: &Echelon) -> GModule {
        let mut is_pivot = vec![false; self.dim];
        for &p in sub.pivots() {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.dim).filter(|&c| !is_pivot[c]).collect();
        let q = free.len();
        let gens = self
            .gens
            .iter()
            .map(|a| {
                let mut data = Vec::with_capacity(q * q);
                for &j in &free {
                    let mut w = a.row(j).to_vec();
                    sub.reduce(&mut w);
                    data.extend(free.iter().map(|&c| w[c]));
                }
                Mat::from_vec(&self.field, q, q, data)
            })
            .collect();
        GModule {
            field: self.field.clone(),
            dim: q,
            gens,
        }
    }

    /// Checks random words against the group: two words naming the same
    /// permutation must give the same matrix.
    pub fn spot_check(&self, group: &Group, rounds: usize, seed: u64) -> Result<bool, ModrepError> {
        let en = group.enumeration()?;
        let gens = group.generators();
        if gens.len() != self.gens.len() {
            return Ok(false);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..rounds {
            let len = rng.gen_range(1..=8);
            let word: Vec<usize> = (0..len).map(|_| rng.gen_range(0..gens.len())).collect();
            let perm = word
                .iter()
                .fold(crate::perm::Perm::identity(group.degree()), |acc, &g| acc.mul(&gens[g]));
            let idx = en.index_of(&perm).expect("closed");
            if self.word_matrix(&word) != self.word_matrix(&en.word(idx)) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub(crate) fn spin_with(field: &Arc<Field>, mats: &[Mat], v: &[Elem]) -> Echelon {
    let dim = v.len();
    let mut space = Echelon::new(field, dim);
    let mut queue: Vec<Vec<Elem>> = Vec::new();
    if space.insert(v).is_some() {
        queue.push(v.to_vec());
    }
    let mut head = 0;
    while head < queue.len() && space.len() < dim {
        for a in mats {
            let w = a.vec_mul(&queue[head]);
            if space.insert(&w).is_some() {
                queue.push(w);
            }
        }
        head += 1;
    }
    space
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Perm;

    fn s3() -> Group {
        Group::new(
            3,
            vec![
                Perm::from_cycles(3, &[&[1, 2]]).unwrap(),
                Perm::from_cycles(3, &[&[1, 2, 3]]).unwrap(),
            ],
        )
    }

    #[test]
    fn permutation_module_respects_relations() {
        let f = Arc::new(Field::new(2, 1).unwrap());
        let g = s3();
        let m = GModule::permutation(&f, &g);
        assert!(m.spot_check(&g, 50, 1).unwrap());
        assert!(m.dual().spot_check(&g, 50, 2).unwrap());
        assert!(m.tensor(&m).spot_check(&g, 50, 3).unwrap());
    }

    #[test]
    fn all_ones_spans_a_submodule() {
        let f = Arc::new(Field::new(2, 1).unwrap());
        let m = GModule::permutation(&f, &s3());
        let ones = vec![f.one(); 3];
        let sub = m.spin(&ones);
        assert_eq!(sub.len(), 1);
        let s = m.submodule(&sub);
        let q = m.quotient(&sub);
        assert!(s.is_trivial());
        assert_eq!(q.dim(), 2);
        assert!(q.spot_check(&s3(), 30, 4).unwrap());
        let e1 = vec![f.one(), f.zero(), f.zero()];
        assert_eq!(m.spin(&e1).len(), 3);
    }

    #[test]
    fn rejects_malformed_generators() {
        let f = Arc::new(Field::new(3, 1).unwrap());
        let a = Mat::identity(&f, 2);
        let b = Mat::identity(&f, 3);
        assert!(GModule::new(&f, vec![a, b]).is_err());
        assert!(GModule::new(&f, vec![]).is_err());
    }
}
