//! Permutation groups: order and membership through a base and strong
//! generating set, full element enumeration at desk scale.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::perm::Perm;

/// Default bound on `|G|` for element enumeration.
pub const DEFAULT_ENUMERATION_CAP: u128 = 20_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("generator {index} is not a permutation of 1..{degree}")]
    NotAPermutation { index: usize, degree: usize },
    #[error("group order {order} exceeds the enumeration cap {cap}")]
    EnumerationCapExceeded { order: u128, cap: u128 },
    #[error("operation needs an element enumeration (group order {order})")]
    EnumerationRequired { order: u128 },
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("element is not in the group")]
    NotAMember,
    #[error("subgroup is not a {p}-group")]
    NotAPGroup { p: u64 },
    #[error("p-group of order {order} exceeds the brute-force cap {cap}")]
    CapExceeded { order: u128, cap: u128 },
}

/// Base and strong generating set (deterministic Schreier-Sims).
#[derive(Clone, Debug)]
pub struct Bsgs {
    degree: usize,
    base: Vec<usize>,
    strong: Vec<Perm>,
    /// Per level: transversal `u[x]` with `base[i]^u[x] = x`.
    transversals: Vec<Vec<Option<Perm>>>,
}

impl Bsgs {
    pub fn new(degree: usize, gens: &[Perm]) -> Bsgs {
        let mut b = Bsgs {
            degree,
            base: Vec::new(),
            strong: gens.iter().filter(|g| !g.is_identity()).cloned().collect(),
            transversals: Vec::new(),
        };
        for g in b.strong.clone() {
            if b.base.iter().all(|&x| g.apply(x) == x) {
                b.base.push(g.first_moved().expect("non-identity"));
            }
        }
        b.rebuild();
        b.complete();
        b
    }

    fn level_gens(&self, i: usize) -> Vec<&Perm> {
        self.strong
            .iter()
            .filter(|g| self.base[..i].iter().all(|&x| g.apply(x) == x))
            .collect()
    }

    fn orbit_transversal(&self, i: usize) -> Vec<Option<Perm>> {
        let gens = self.level_gens(i);
        let mut t: Vec<Option<Perm>> = vec![None; self.degree];
        let b = self.base[i];
        t[b] = Some(Perm::identity(self.degree));
        let mut queue = VecDeque::from([b]);
        while let Some(x) = queue.pop_front() {
            let ux = t[x].clone().expect("visited");
            for g in &gens {
                let y = g.apply(x);
                if t[y].is_none() {
                    t[y] = Some(ux.mul(g));
                    queue.push_back(y);
                }
            }
        }
        t
    }

    fn rebuild(&mut self) {
        self.transversals = (0..self.base.len()).map(|i| self.orbit_transversal(i)).collect();
    }

    /// Strips `g` through levels `from..`; returns the residue and the level
    /// at which stripping stopped (`base.len()` when it ran through).
    fn strip(&self, g: &Perm, from: usize) -> (Perm, usize) {
        let mut h = g.clone();
        for i in from..self.base.len() {
            let beta = h.apply(self.base[i]);
            match &self.transversals[i][beta] {
                Some(u) => h = h.mul(&u.inverse()),
                None => return (h, i),
            }
        }
        (h, self.base.len())
    }

    fn complete(&mut self) {
        let mut i = self.base.len();
        'outer: while i > 0 {
            let level = i - 1;
            let gens: Vec<Perm> = self.level_gens(level).into_iter().cloned().collect();
            let t = self.transversals[level].clone();
            for beta in 0..self.degree {
                let Some(ub) = &t[beta] else { continue };
                for x in &gens {
                    let y = x.apply(beta);
                    let uy = t[y].as_ref().expect("orbit closed");
                    let h = ub.mul(x).mul(&uy.inverse());
                    if h.is_identity() {
                        continue;
                    }
                    let (res, j) = self.strip(&h, level + 1);
                    if j < self.base.len() || !res.is_identity() {
                        if j == self.base.len() {
                            self.base.push(res.first_moved().expect("non-identity"));
                        }
                        self.strong.push(res);
                        self.rebuild();
                        i = j + 1;
                        continue 'outer;
                    }
                }
            }
            i -= 1;
        }
    }

    pub fn order(&self) -> u128 {
        self.transversals
            .iter()
            .map(|t| t.iter().filter(|u| u.is_some()).count() as u128)
            .product()
    }

    pub fn contains(&self, g: &Perm) -> bool {
        let (res, j) = self.strip(g, 0);
        j == self.base.len() && res.is_identity()
    }

    pub fn base(&self) -> &[usize] {
        &self.base
    }

    pub fn strong_generators(&self) -> &[Perm] {
        &self.strong
    }
}

/// All elements in breadth-first order from the identity, with a Schreier
/// tree for writing elements as words in the generators.
#[derive(Clone, Debug)]
pub struct Enumeration {
    elements: Vec<Perm>,
    index: HashMap<Perm, usize>,
    /// `elements[i] = elements[parent.0] * generators[parent.1]`
    parent: Vec<(usize, usize)>,
}

impl Enumeration {
    fn build(degree: usize, gens: &[Perm]) -> Enumeration {
        let id = Perm::identity(degree);
        let mut elements = vec![id.clone()];
        let mut index = HashMap::from([(id, 0usize)]);
        let mut parent = vec![(0, usize::MAX)];
        let mut head = 0;
        while head < elements.len() {
            for (gi, g) in gens.iter().enumerate() {
                let h = elements[head].mul(g);
                if !index.contains_key(&h) {
                    index.insert(h.clone(), elements.len());
                    elements.push(h);
                    parent.push((head, gi));
                }
            }
            head += 1;
        }
        Enumeration {
            elements,
            index,
            parent,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Perm {
        &self.elements[i]
    }

    pub fn index_of(&self, g: &Perm) -> Option<usize> {
        self.index.get(g).copied()
    }

    /// Generator indices whose product (left to right) is element `i`.
    pub fn word(&self, mut i: usize) -> Vec<usize> {
        let mut w = Vec::new();
        while i != 0 {
            let (p, g) = self.parent[i];
            w.push(g);
            i = p;
        }
        w.reverse();
        w
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.index[&self.elements[a].mul(&self.elements[b])]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.index[&self.elements[a].inverse()]
    }
}

#[derive(Clone, Debug)]
pub struct Group {
    degree: usize,
    generators: Vec<Perm>,
    order: u128,
    bsgs: Bsgs,
    enumeration: Option<Enumeration>,
}

impl Group {
    /// Builds a group from 1-based image arrays. Enumeration is populated iff
    /// the order is within [`DEFAULT_ENUMERATION_CAP`].
    pub fn from_images(degree: usize, generators: &[Vec<usize>]) -> Result<Group, GroupError> {
        let gens = generators
            .iter()
            .enumerate()
            .map(|(index, g)| {
                if g.len() != degree {
                    return Err(GroupError::NotAPermutation { index, degree });
                }
                Perm::from_images_1based(g).ok_or(GroupError::NotAPermutation { index, degree })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Group::new(degree, gens))
    }

    pub fn new(degree: usize, generators: Vec<Perm>) -> Group {
        Group::with_cap(degree, generators, DEFAULT_ENUMERATION_CAP)
    }

    pub fn with_cap(degree: usize, generators: Vec<Perm>, cap: u128) -> Group {
        let degree = degree.max(1);
        let generators: Vec<Perm> = if generators.is_empty() {
            vec![Perm::identity(degree)]
        } else {
            generators
        };
        let bsgs = Bsgs::new(degree, &generators);
        let order = bsgs.order();
        let enumeration = (order <= cap).then(|| Enumeration::build(degree, &generators));
        Group {
            degree,
            generators,
            order,
            bsgs,
            enumeration,
        }
    }

    /// Like [`Group::new`] but fails when enumeration is impossible.
    pub fn enumerated(degree: usize, generators: Vec<Perm>, cap: u128) -> Result<Group, GroupError> {
        let g = Group::with_cap(degree, generators, cap);
        if g.enumeration.is_none() {
            return Err(GroupError::EnumerationCapExceeded {
                order: g.order,
                cap,
            });
        }
        Ok(g)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn order(&self) -> u128 {
        self.order
    }

    pub fn bsgs(&self) -> &Bsgs {
        &self.bsgs
    }

    pub fn contains(&self, g: &Perm) -> bool {
        g.degree() == self.degree && self.bsgs.contains(g)
    }

    pub fn enumeration(&self) -> Result<&Enumeration, GroupError> {
        self.enumeration
            .as_ref()
            .ok_or(GroupError::EnumerationRequired { order: self.order })
    }

    pub fn is_enumerated(&self) -> bool {
        self.enumeration.is_some()
    }

    /// Order of an enumerated group as `usize`.
    pub fn size(&self) -> usize {
        self.order as usize
    }

    pub fn is_abelian(&self) -> bool {
        self.generators
            .iter()
            .all(|a| self.generators.iter().all(|b| a.mul(b) == b.mul(a)))
    }

    /// Exponent: lcm of element orders.
    pub fn exponent(&self) -> Result<u64, GroupError> {
        let en = self.enumeration()?;
        Ok(en
            .elements()
            .iter()
            .fold(1u64, |acc, g| num_integer::lcm(acc, g.order())))
    }

    /// Subgroup generated by a set of elements of `self`, with generators
    /// picked greedily in the given order.
    pub fn subgroup(&self, elements: &[Perm]) -> Group {
        let mut gens: Vec<Perm> = Vec::new();
        let mut closure: Option<Group> = None;
        for g in elements {
            if g.is_identity() {
                continue;
            }
            if closure.as_ref().is_some_and(|c| c.contains(g)) {
                continue;
            }
            gens.push(g.clone());
            closure = Some(Group::new(self.degree, gens.clone()));
        }
        closure.unwrap_or_else(|| Group::new(self.degree, Vec::new()))
    }

    /// `{g : gx = xg}`.
    pub fn centralizer(&self, x: &Perm) -> Result<Group, GroupError> {
        if !self.contains(x) {
            return Err(GroupError::NotAMember);
        }
        let en = self.enumeration()?;
        let elems: Vec<Perm> = en
            .elements()
            .iter()
            .filter(|g| g.mul(x) == x.mul(g))
            .cloned()
            .collect();
        Ok(self.subgroup(&elems))
    }

    /// Whether `n` (a subgroup of `self`) is normalised by every generator.
    pub fn normalizes(&self, n: &Group) -> bool {
        self.generators.iter().all(|g| {
            n.generators
                .iter()
                .all(|h| n.contains(&h.conjugate_by(g)))
        })
    }

    pub fn is_subgroup_of(&self, other: &Group) -> bool {
        self.degree == other.degree && self.generators.iter().all(|g| other.contains(g))
    }

    /// Quotient by a normal subgroup, realised on the right cosets of `n`.
    pub fn coset_action(&self, n: &Group) -> Result<Quotient, GroupError> {
        if !n.is_subgroup_of(self) || !self.normalizes(n) {
            return Err(GroupError::NotNormal);
        }
        let en = self.enumeration()?;
        let mut coset_of = vec![usize::MAX; en.len()];
        let mut reps = Vec::new();
        let n_elems = n.enumeration()?;
        for i in 0..en.len() {
            if coset_of[i] != usize::MAX {
                continue;
            }
            let c = reps.len();
            reps.push(i);
            for h in n_elems.elements() {
                let j = en.index_of(&h.mul(en.element(i))).expect("closed");
                coset_of[j] = c;
            }
        }
        let act = |x: &Perm| -> Perm {
            let imgs: Vec<usize> = reps
                .iter()
                .map(|&r| coset_of[en.index_of(&en.element(r).mul(x)).expect("closed")])
                .collect();
            Perm::from_images(&imgs).expect("coset action is a permutation")
        };
        let gens: Vec<Perm> = self.generators.iter().map(act).collect();
        let quotient = Group::new(reps.len(), gens);
        let qen = quotient.enumeration()?;
        let images = en
            .elements()
            .iter()
            .map(|g| qen.index_of(&act(g)).expect("image lies in quotient"))
            .collect();
        Ok(Quotient {
            group: quotient,
            images,
            coset_of,
        })
    }
}

/// `G/N` with the epimorphism on element indices.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub group: Group,
    /// Element index in `G` to element index in the quotient.
    pub images: Vec<usize>,
    /// Element index in `G` to coset number.
    pub coset_of: Vec<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(n: usize, cycles: &[&[usize]]) -> Perm {
        Perm::from_cycles(n, cycles).unwrap()
    }

    /// Closure by brute-force multiplication, independent of Schreier-Sims.
    fn closure_order(gens: &[Perm]) -> usize {
        let mut set = std::collections::HashSet::new();
        let n = gens[0].degree();
        let mut frontier = vec![Perm::identity(n)];
        set.insert(Perm::identity(n));
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = x.mul(g);
                if set.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        set.len()
    }

    #[test]
    fn orders() {
        let s3 = Group::new(3, vec![cyc(3, &[&[1, 2]]), cyc(3, &[&[1, 2, 3]])]);
        assert_eq!(s3.order(), 6);
        let a5_gens = vec![cyc(5, &[&[1, 2, 3, 4, 5]]), cyc(5, &[&[3, 4, 5]])];
        let a5 = Group::new(5, a5_gens.clone());
        assert_eq!(a5.order(), 60);
        assert_eq!(closure_order(&a5_gens), 60);
        assert_eq!(Group::new(4, vec![]).order(), 1);
    }

    #[test]
    fn bsgs_matches_closure_on_assorted_groups() {
        let cases: Vec<Vec<Perm>> = vec![
            vec![cyc(7, &[&[1, 2, 3, 4, 5, 6, 7]]), cyc(7, &[&[2, 3, 5], &[4, 7, 6]])],
            vec![cyc(6, &[&[1, 2, 3, 4, 5, 6]]), cyc(6, &[&[1, 2]])],
            vec![cyc(8, &[&[1, 2, 3, 4], &[5, 6, 7, 8]]), cyc(8, &[&[1, 5, 3, 7], &[2, 8, 4, 6]])],
            vec![cyc(8, &[&[1, 2], &[3, 4]]), cyc(8, &[&[5, 6, 7]]), cyc(8, &[&[1, 3]])],
        ];
        for gens in cases {
            let g = Group::new(gens[0].degree(), gens.clone());
            assert_eq!(g.order() as usize, closure_order(&gens));
            assert_eq!(g.enumeration().unwrap().len(), closure_order(&gens));
        }
    }

    #[test]
    fn m11_order_without_enumeration() {
        let g = Group::with_cap(
            11,
            vec![
                cyc(11, &[&[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11]]),
                cyc(11, &[&[3, 7, 11, 8], &[4, 10, 5, 6]]),
            ],
            1000,
        );
        assert_eq!(g.order(), 7920);
        assert!(matches!(
            g.enumeration(),
            Err(GroupError::EnumerationRequired { order: 7920 })
        ));
    }

    #[test]
    fn rejects_bad_generators() {
        assert_eq!(
            Group::from_images(3, &[vec![1, 1, 2]]).unwrap_err(),
            GroupError::NotAPermutation {
                index: 0,
                degree: 3
            }
        );
    }

    #[test]
    fn membership_and_words() {
        let s4 = Group::new(4, vec![cyc(4, &[&[1, 2, 3, 4]]), cyc(4, &[&[1, 2]])]);
        assert!(s4.contains(&cyc(4, &[&[1, 3]])));
        let a4 = Group::new(4, vec![cyc(4, &[&[1, 2, 3]]), cyc(4, &[&[2, 3, 4]])]);
        assert!(!a4.contains(&cyc(4, &[&[1, 3]])));
        let en = s4.enumeration().unwrap();
        for i in 0..en.len() {
            let w = en.word(i);
            let prod = w
                .iter()
                .fold(Perm::identity(4), |acc, &g| acc.mul(&s4.generators()[g]));
            assert_eq!(&prod, en.element(i));
        }
    }

    #[test]
    fn centralizers() {
        let s3 = Group::new(3, vec![cyc(3, &[&[1, 2]]), cyc(3, &[&[1, 2, 3]])]);
        assert_eq!(s3.centralizer(&Perm::identity(3)).unwrap().order(), 6);
        assert_eq!(s3.centralizer(&cyc(3, &[&[1, 2, 3]])).unwrap().order(), 3);
        let s4 = Group::new(4, vec![cyc(4, &[&[1, 2, 3, 4]]), cyc(4, &[&[1, 2]])]);
        assert_eq!(s4.centralizer(&cyc(4, &[&[1, 2], &[3, 4]])).unwrap().order(), 8);
    }

    #[test]
    fn quotients() {
        let s4 = Group::new(4, vec![cyc(4, &[&[1, 2, 3, 4]]), cyc(4, &[&[1, 2]])]);
        let v4 = Group::new(4, vec![cyc(4, &[&[1, 2], &[3, 4]]), cyc(4, &[&[1, 3], &[2, 4]])]);
        let q = s4.coset_action(&v4).unwrap();
        assert_eq!(q.group.order(), 6);
        // kernel of the epimorphism is exactly V4
        let en = s4.enumeration().unwrap();
        let kernel: Vec<&Perm> = (0..en.len())
            .filter(|&i| q.images[i] == 0)
            .map(|i| en.element(i))
            .collect();
        assert_eq!(kernel.len(), 4);
        assert!(kernel.iter().all(|k| v4.contains(k)));
        // homomorphism on all pairs of generators
        let qen = q.group.enumeration().unwrap();
        for a in 0..en.len() {
            for b in [1, 2] {
                let ab = en.mul(a, b);
                assert_eq!(q.images[ab], qen.mul(q.images[a], q.images[b]));
            }
        }
        let trivial = Group::new(4, vec![]);
        assert_eq!(s4.coset_action(&trivial).unwrap().group.order(), 24);
        let h = Group::new(4, vec![cyc(4, &[&[1, 2]])]);
        assert_eq!(s4.coset_action(&h).unwrap_err(), GroupError::NotNormal);
    }
}
