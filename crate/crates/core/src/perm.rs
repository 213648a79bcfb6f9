//! Permutations on `{0, .., n-1}`; external formats are 1-based.

use std::fmt;

/// A permutation stored as its image array. Products compose left to right:
/// `a.mul(b)` applies `a` first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Box<[u16]>);

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm((0..n as u16).collect())
    }

    /// From 0-based images; `None` unless the images form a bijection.
    pub fn from_images(images: &[usize]) -> Option<Perm> {
        let n = images.len();
        if n > u16::MAX as usize {
            return None;
        }
        let mut seen = vec![false; n];
        for &x in images {
            if x >= n || seen[x] {
                return None;
            }
            seen[x] = true;
        }
        Some(Perm(images.iter().map(|&x| x as u16).collect()))
    }

    /// From 1-based images, as in group files.
    pub fn from_images_1based(images: &[usize]) -> Option<Perm> {
        let zero: Option<Vec<usize>> = images.iter().map(|&x| x.checked_sub(1)).collect();
        Perm::from_images(&zero?)
    }

    /// From disjoint cycles written 1-based.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Option<Perm> {
        let mut img: Vec<usize> = (0..n).collect();
        for c in cycles {
            for (i, &x) in c.iter().enumerate() {
                let y = c[(i + 1) % c.len()];
                if x == 0 || y == 0 || x > n || y > n {
                    return None;
                }
                img[x - 1] = y - 1;
            }
        }
        Perm::from_images(&img)
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.0[x] as usize
    }

    pub fn images(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&x| x as usize)
    }

    pub fn images_1based(&self) -> Vec<usize> {
        self.0.iter().map(|&x| x as usize + 1).collect()
    }

    /// `self` then `other`.
    pub fn mul(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm(self.0.iter().map(|&x| other.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u16; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u16;
        }
        Perm(inv.into())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    pub fn pow(&self, e: i64) -> Perm {
        let mut base = if e < 0 { self.inverse() } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Perm::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// `g^-1 self g`
    pub fn conjugate_by(&self, g: &Perm) -> Perm {
        g.inverse().mul(self).mul(g)
    }

    pub fn order(&self) -> u64 {
        let mut seen = vec![false; self.degree()];
        let mut ord = 1u64;
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.apply(x);
                len += 1;
            }
            ord = num_integer::lcm(ord, len);
        }
        ord
    }

    pub fn first_moved(&self) -> Option<usize> {
        self.0.iter().enumerate().find(|(i, &x)| *i != x as usize).map(|(i, _)| i)
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] || self.apply(start) == start {
                continue;
            }
            let mut c = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                c.push(x);
                x = self.apply(x);
            }
            out.push(c);
        }
        out
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let s: Vec<String> = c.iter().map(|x| (x + 1).to_string()).collect();
            write!(f, "({})", s.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_is_left_to_right() {
        let a = Perm::from_cycles(3, &[&[1, 2]]).unwrap();
        let b = Perm::from_cycles(3, &[&[1, 2, 3]]).unwrap();
        // 1 -a-> 2 -b-> 3
        assert_eq!(a.mul(&b).apply(0), 2);
        assert_eq!(a.mul(&b).to_string(), "(1 3)");
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Perm::from_images_1based(&[1, 1, 2]).is_none());
        assert!(Perm::from_images_1based(&[0, 1]).is_none());
        assert!(Perm::from_images_1based(&[2, 3, 1]).is_some());
    }

    #[test]
    fn order_and_power() {
        let p = Perm::from_cycles(7, &[&[1, 2, 3, 4], &[5, 6, 7]]).unwrap();
        assert_eq!(p.order(), 12);
        assert!(p.pow(12).is_identity());
        assert_eq!(p.pow(-1), p.inverse());
    }
}
