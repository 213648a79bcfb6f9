//! p-subgroups: Sylow subgroups, abelian invariants, sectional rank.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use crate::group::{Group, GroupError};
use crate::perm::Perm;

/// Brute-force bound for [`sectional_rank`].
pub const SECTIONAL_RANK_CAP: u128 = 512;

#[derive(Clone, Debug)]
pub struct PSubgroup {
    p: u64,
    group: Group,
    abelian_invariants: Option<Vec<u64>>,
}

/// `nu_p(n)`.
pub fn p_valuation(mut n: u128, p: u64) -> u32 {
    let p = p as u128;
    let mut k = 0;
    while n > 0 && n.is_multiple_of(p) {
        n /= p;
        k += 1;
    }
    k
}

fn is_p_power(mut n: u128, p: u64) -> bool {
    while n > 1 && n.is_multiple_of(p as u128) {
        n /= p as u128;
    }
    n == 1
}

impl PSubgroup {
    pub fn new(group: Group, p: u64) -> Result<PSubgroup, GroupError> {
        if !is_p_power(group.order(), p)
            || !group.generators().iter().all(|g| is_p_power(g.order() as u128, p))
        {
            return Err(GroupError::NotAPGroup { p });
        }
        let abelian_invariants = if group.is_abelian() {
            Some(abelian_invariants(&group, p)?)
        } else {
            None
        };
        Ok(PSubgroup {
            p,
            group,
            abelian_invariants,
        })
    }

    pub fn trivial(degree: usize, p: u64) -> PSubgroup {
        PSubgroup::new(Group::new(degree, Vec::new()), p).expect("trivial group is a p-group")
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn generators(&self) -> &[Perm] {
        self.group.generators()
    }

    pub fn order(&self) -> u128 {
        self.group.order()
    }

    /// `a` with `|P| = p^a`.
    pub fn log_order(&self) -> u32 {
        p_valuation(self.order(), self.p)
    }

    pub fn is_abelian(&self) -> bool {
        self.abelian_invariants.is_some()
    }

    /// Elementary divisors in ascending order, when abelian.
    pub fn abelian_invariants(&self) -> Option<&[u64]> {
        self.abelian_invariants.as_deref()
    }

    pub fn is_elementary_abelian(&self) -> bool {
        self.abelian_invariants
            .as_ref()
            .is_some_and(|inv| inv.iter().all(|&d| d == self.p))
    }
}

fn abelian_invariants(group: &Group, p: u64) -> Result<Vec<u64>, GroupError> {
    let en = group.enumeration()?;
    let a = p_valuation(group.order(), p);
    // c[i] = log_p |{x : x^(p^i) = 1}|
    let c: Vec<u32> = (0..=a + 1)
        .map(|i| {
            let e = (p as u128).pow(i);
            let count = en
                .elements()
                .iter()
                .filter(|x| e % x.order() as u128 == 0)
                .count();
            p_valuation(count as u128, p)
        })
        .collect();
    let mut out = Vec::new();
    for i in 1..=a as usize {
        let at_least_i = c[i] - c[i - 1];
        let at_least_next = c[i + 1] - c[i];
        for _ in 0..at_least_i - at_least_next {
            out.push(p.pow(i as u32));
        }
    }
    Ok(out)
}

/// A Sylow p-subgroup grown from the trivial group by adjoining, at each
/// step, the first p-element (in enumeration order) that normalises the
/// current subgroup without lying in it.
pub fn sylow_subgroup(g: &Group, p: u64) -> Result<PSubgroup, GroupError> {
    let en = g.enumeration()?;
    let target = (p as u128).pow(p_valuation(g.order(), p));
    let n = en.len();
    let mut member = vec![false; n];
    member[0] = true;
    let mut elems = vec![0usize];
    let mut gens: Vec<usize> = Vec::new();
    let p_elem: Vec<bool> = en
        .elements()
        .iter()
        .map(|x| is_p_power(x.order() as u128, p))
        .collect();
    while (elems.len() as u128) < target {
        let x = (0..n)
            .find(|&x| {
                !member[x]
                    && p_elem[x]
                    && gens.iter().all(|&y| {
                        let c = en.element(y).conjugate_by(en.element(x));
                        member[en.index_of(&c).expect("closed")]
                    })
            })
            .expect("a non-Sylow p-subgroup has a p-element in its normaliser outside it");
        gens.push(x);
        // H<x> = union of cosets H x^i
        let mut power = 0usize;
        let mut new_elems = elems.clone();
        loop {
            power = en.mul(power, x);
            if member[power] {
                break;
            }
            for &h in &elems {
                let y = en.mul(h, power);
                if !member[y] {
                    member[y] = true;
                    new_elems.push(y);
                }
            }
        }
        elems = new_elems;
    }
    let gen_perms: Vec<Perm> = gens.iter().map(|&i| en.element(i).clone()).collect();
    PSubgroup::new(Group::new(g.degree(), gen_perms), p)
}

/// Multiplication table of a small group, indices in enumeration order.
struct Table {
    n: usize,
    mul: Vec<u16>,
    inv: Vec<u16>,
}

impl Table {
    fn new(group: &Group) -> Result<Table, GroupError> {
        let en = group.enumeration()?;
        let n = en.len();
        let mut mul = vec![0u16; n * n];
        for a in 0..n {
            for b in 0..n {
                mul[a * n + b] = en.mul(a, b) as u16;
            }
        }
        let inv = (0..n).map(|a| en.inv(a) as u16).collect();
        Ok(Table { n, mul, inv })
    }

    #[inline]
    fn m(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.n + b] as usize
    }

    fn pow(&self, a: usize, e: u64) -> usize {
        (0..e).fold(0, |acc, _| self.m(acc, a))
    }

    fn closure(&self, seeds: impl IntoIterator<Item = usize>) -> Bits {
        let mut set = Bits::new(self.n);
        set.insert(0);
        let gens: Vec<usize> = seeds.into_iter().filter(|&s| s != 0).collect();
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &g in &gens {
                let y = self.m(x, g);
                if !set.contains(y) {
                    set.insert(y);
                    queue.push_back(y);
                }
            }
        }
        set
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Bits {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn iter(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        (0..n).filter(move |&i| self.contains(i))
    }
}

/// Rank of `H / Phi(H)` with `Phi(H) = H^p [H, H]`.
fn frattini_rank(t: &Table, h: &Bits, p: u64) -> u32 {
    let elems: Vec<usize> = h.iter(t.n).collect();
    let mut seeds = HashSet::new();
    for &a in &elems {
        seeds.insert(t.pow(a, p));
        for &b in &elems {
            let comm = t.m(t.m(t.inv[a] as usize, t.inv[b] as usize), t.m(a, b));
            seeds.insert(comm);
        }
    }
    let phi = t.closure(seeds);
    p_valuation((elems.len() / phi.count()) as u128, p)
}

/// Sectional p-rank: the largest rank of an elementary abelian section,
/// computed as `max rank(H / Phi(H))` over all subgroups `H`.
pub fn sectional_rank(p_sub: &PSubgroup) -> Result<u32, GroupError> {
    if p_sub.order() > SECTIONAL_RANK_CAP {
        return Err(GroupError::CapExceeded {
            order: p_sub.order(),
            cap: SECTIONAL_RANK_CAP,
        });
    }
    let p = p_sub.prime();
    let t = Table::new(p_sub.group())?;
    let n = t.n;
    let pw: Vec<usize> = (0..n).map(|a| t.pow(a, p)).collect();
    let mut trivial = Bits::new(n);
    trivial.insert(0);
    let mut seen: HashSet<Bits> = HashSet::from([trivial.clone()]);
    let mut queue = VecDeque::from([trivial]);
    let mut best = 0;
    while let Some(h) = queue.pop_front() {
        best = best.max(frattini_rank(&t, &h, p));
        let members: Vec<usize> = h.iter(n).collect();
        for g in 0..n {
            if h.contains(g) || !h.contains(pw[g]) {
                continue;
            }
            let gi = t.inv[g] as usize;
            if !members.iter().all(|&x| h.contains(t.m(t.m(gi, x), g))) {
                continue;
            }
            // every subgroup of a p-group has a normal subgroup of index p
            let mut k = h.clone();
            let mut gp = g;
            for _ in 1..p {
                for &x in &members {
                    k.insert(t.m(gp, x));
                }
                gp = t.m(gp, g);
            }
            if seen.insert(k.clone()) {
                queue.push_back(k);
            }
        }
    }
    Ok(best)
}

/// Serializable description of a p-subgroup.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PSubgroupSummary {
    pub order: u64,
    pub generators: Vec<Vec<usize>>,
    pub abelian: bool,
    pub abelian_invariants: Option<Vec<u64>>,
}

impl From<&PSubgroup> for PSubgroupSummary {
    fn from(p: &PSubgroup) -> Self {
        PSubgroupSummary {
            order: p.order() as u64,
            generators: p
                .generators()
                .iter()
                .filter(|g| !g.is_identity())
                .map(Perm::images_1based)
                .collect(),
            abelian: p.is_abelian(),
            abelian_invariants: p.abelian_invariants().map(<[u64]>::to_vec),
        }
    }
}
