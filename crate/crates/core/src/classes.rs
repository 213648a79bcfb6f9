//! Conjugacy classes, class sizes and power maps.

use std::collections::VecDeque;

use crate::group::{Group, GroupError};

#[derive(Clone, Debug)]
pub struct ClassData {
    /// Element index (in the group's enumeration) of each representative.
    reps: Vec<usize>,
    sizes: Vec<u64>,
    class_of: Vec<usize>,
    members: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    rep_orders: Vec<u64>,
    exponent: u64,
    /// `power[j][k]` is the class of `g_k^j`, for `0 <= j < exponent`.
    power: Vec<Vec<usize>>,
    group_order: u64,
}

impl ClassData {
    /// Classes ordered by their least element in enumeration order; the
    /// identity class is therefore class 0.
    pub fn new(group: &Group) -> Result<ClassData, GroupError> {
        let en = group.enumeration()?;
        let n = en.len();
        let gens = group.generators();
        let mut class_of = vec![usize::MAX; n];
        let mut members: Vec<Vec<usize>> = Vec::new();
        for start in 0..n {
            if class_of[start] != usize::MAX {
                continue;
            }
            let c = members.len();
            let mut cls = vec![start];
            class_of[start] = c;
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                for g in gens {
                    let y = en
                        .index_of(&en.element(x).conjugate_by(g))
                        .expect("closed under conjugation");
                    if class_of[y] == usize::MAX {
                        class_of[y] = c;
                        cls.push(y);
                        queue.push_back(y);
                    }
                }
            }
            cls.sort_unstable();
            members.push(cls);
        }
        let reps: Vec<usize> = members.iter().map(|m| m[0]).collect();
        let sizes: Vec<u64> = members.iter().map(|m| m.len() as u64).collect();
        let inverse = reps.iter().map(|&r| class_of[en.inv(r)]).collect();
        let rep_orders: Vec<u64> = reps.iter().map(|&r| en.element(r).order()).collect();
        let exponent = rep_orders.iter().fold(1u64, |a, &o| num_integer::lcm(a, o));
        let power = (0..exponent)
            .map(|j| {
                reps.iter()
                    .map(|&r| {
                        let g = en.element(r).pow(j as i64);
                        class_of[en.index_of(&g).expect("closed")]
                    })
                    .collect()
            })
            .collect();
        Ok(ClassData {
            reps,
            sizes,
            class_of,
            members,
            inverse,
            rep_orders,
            exponent,
            power,
            group_order: n as u64,
        })
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn group_order(&self) -> u64 {
        self.group_order
    }

    pub fn reps(&self) -> &[usize] {
        &self.reps
    }

    pub fn rep(&self, k: usize) -> usize {
        self.reps[k]
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    pub fn size(&self, k: usize) -> u64 {
        self.sizes[k]
    }

    pub fn class_of(&self, element: usize) -> usize {
        self.class_of[element]
    }

    pub fn members(&self, k: usize) -> &[usize] {
        &self.members[k]
    }

    /// `k -> k*`, the class of inverses.
    pub fn inverse_class(&self, k: usize) -> usize {
        self.inverse[k]
    }

    pub fn rep_order(&self, k: usize) -> u64 {
        self.rep_orders[k]
    }

    pub fn rep_orders(&self) -> &[u64] {
        &self.rep_orders
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn centralizer_order(&self, k: usize) -> u64 {
        self.group_order / self.sizes[k]
    }

    /// Class permutation `k -> class of g_k^j` (exponent taken mod `exp(G)`).
    pub fn power_map(&self, j: i64) -> &[usize] {
        let e = self.exponent as i64;
        &self.power[j.rem_euclid(e) as usize]
    }

    /// Classes whose elements have order prime to `p`.
    pub fn p_regular(&self, p: u64) -> Vec<usize> {
        (0..self.len()).filter(|&k| !self.rep_orders[k].is_multiple_of(p)).collect()
    }

    /// p'-part of the exponent.
    pub fn exponent_p_prime(&self, p: u64) -> u64 {
        let mut e = self.exponent;
        while e.is_multiple_of(p) {
            e /= p;
        }
        e
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Perm;

    fn group(n: usize, gens: &[&[&[usize]]]) -> Group {
        Group::new(
            n,
            gens.iter().map(|c| Perm::from_cycles(n, c).unwrap()).collect(),
        )
    }

    /// Classes by conjugating with every element, independent of the
    /// generator-BFS used above.
    fn brute_class_sizes(g: &Group) -> Vec<u64> {
        let en = g.enumeration().unwrap();
        let mut seen = vec![false; en.len()];
        let mut sizes = Vec::new();
        for x in 0..en.len() {
            if seen[x] {
                continue;
            }
            let mut cls = std::collections::BTreeSet::new();
            for y in en.elements() {
                cls.insert(en.index_of(&en.element(x).conjugate_by(y)).unwrap());
            }
            for &c in &cls {
                seen[c] = true;
            }
            sizes.push(cls.len() as u64);
        }
        sizes
    }

    #[test]
    fn s3_a4_c12() {
        let s3 = group(3, &[&[&[1, 2]], &[&[1, 2, 3]]]);
        let c = ClassData::new(&s3).unwrap();
        assert_eq!(c.sizes(), brute_class_sizes(&s3).as_slice());
        let mut sizes = c.sizes().to_vec();
        sizes.sort();
        assert_eq!(sizes, vec![1, 2, 3]);

        let a4 = group(4, &[&[&[1, 2, 3]], &[&[1, 2], &[3, 4]]]);
        let c = ClassData::new(&a4).unwrap();
        let mut sizes = c.sizes().to_vec();
        sizes.sort();
        assert_eq!(sizes, vec![1, 3, 4, 4]);
        assert_eq!(c.sizes(), brute_class_sizes(&a4).as_slice());

        let c12 = group(7, &[&[&[1, 2, 3, 4], &[5, 6, 7]]]);
        let c = ClassData::new(&c12).unwrap();
        assert_eq!(c.len(), 12);
        assert!(c.sizes().iter().all(|&s| s == 1));
    }

    #[test]
    fn class_invariants() {
        let s5 = group(5, &[&[&[1, 2, 3, 4, 5]], &[&[1, 2]]]);
        let c = ClassData::new(&s5).unwrap();
        assert_eq!(c.sizes().iter().sum::<u64>(), 120);
        let en = s5.enumeration().unwrap();
        for k in 0..c.len() {
            assert_eq!(120 % c.size(k), 0);
            let x = en.element(c.rep(k));
            assert_eq!(c.size(k) * s5.centralizer(x).unwrap().order() as u64, 120);
        }
        assert_eq!(c.rep(0), 0);
        assert_eq!(c.exponent(), 60);
    }

    #[test]
    fn power_maps() {
        let s3 = group(3, &[&[&[1, 2]], &[&[1, 2, 3]]]);
        let c = ClassData::new(&s3).unwrap();
        let ident: Vec<usize> = (0..c.len()).collect();
        assert_eq!(c.power_map(1), ident.as_slice());
        assert!(c.power_map(c.exponent() as i64).iter().all(|&k| k == 0));
        let sq = c.power_map(2);
        for k in 0..c.len() {
            match c.rep_order(k) {
                2 => assert_eq!(sq[k], 0),
                3 => assert_eq!(sq[k], k),
                _ => {}
            }
        }
        // well defined: every member of a class has its power in the same class
        let en = s3.enumeration().unwrap();
        for k in 0..c.len() {
            for &m in c.members(k) {
                let g = en.element(m).pow(2);
                assert_eq!(c.class_of(en.index_of(&g).unwrap()), sq[k]);
            }
        }
    }
}
