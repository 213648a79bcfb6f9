//! Finite fields GF(p^m).
//!
//! Prime fields store residues directly. Extension fields with at most
//! [`ZECH_LIMIT`] elements store discrete logarithms and add through a Zech
//! table; anything larger falls back to polynomial arithmetic on the base-p
//! encoding of the element.
//!
//! In every representation `Elem(0)` is zero and `Elem(1)` is one.

use std::fmt;

use thiserror::Error;

/// Largest field order that gets a Zech-logarithm table.
pub const ZECH_LIMIT: u64 = 1 << 16;

/// Default cap on the field order.
pub const DEFAULT_FIELD_CAP: u64 = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    CompositeCharacteristic(u32),
    #[error("extension degree must be positive")]
    ZeroDegree,
    #[error("GF({p}^{m}) exceeds the configured cap of {cap} elements")]
    BudgetExceeded { p: u32, m: u32, cap: u64 },
}

/// An element of some [`Field`]. Only meaningful together with its field.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem(pub(crate) u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Raw internal index, stable for a given field.
    #[inline]
    pub fn raw(self) -> u32 {
        self.0
    }
}

enum Arith {
    Prime,
    /// `Elem(k + 1)` is `g^k`; `zech[d]` is `log(1 + g^d)` or `NONE`.
    Zech {
        exp: Vec<u32>,
        log: Vec<u32>,
        zech: Vec<u32>,
    },
    Poly,
}

const NONE: u32 = u32::MAX;

pub struct Field {
    p: u32,
    m: u32,
    q: u32,
    /// Monic modulus, coefficients low to high (length m + 1).
    modulus: Vec<u32>,
    arith: Arith,
    primitive: Elem,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p, self.m)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.modulus == other.modulus
    }
}

impl Eq for Field {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    pub fn new(p: u32, m: u32) -> Result<Field, FieldError> {
        Field::with_cap(p, m, DEFAULT_FIELD_CAP)
    }

    pub fn with_cap(p: u32, m: u32, cap: u64) -> Result<Field, FieldError> {
        if !is_prime(p as u64) {
            return Err(FieldError::CompositeCharacteristic(p));
        }
        if m == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = (p as u64).checked_pow(m).unwrap_or(u64::MAX);
        if q > cap || q > u32::MAX as u64 {
            return Err(FieldError::BudgetExceeded { p, m, cap });
        }
        let q = q as u32;
        if m == 1 {
            let mut field = Field {
                p,
                m,
                q,
                modulus: vec![0, 1],
                arith: Arith::Prime,
                primitive: Elem::ONE,
            };
            field.primitive = Elem(primitive_root_mod(p));
            return Ok(field);
        }
        let modulus = first_irreducible(p, m);
        let mut field = Field {
            p,
            m,
            q,
            modulus,
            arith: Arith::Poly,
            primitive: Elem::ONE,
        };
        // search encodings in increasing order for a generator of the unit group
        let order = q - 1;
        let gen = (2..q)
            .find(|&c| field.poly_order(c) == order)
            .expect("finite field unit group is cyclic");
        if q as u64 <= ZECH_LIMIT {
            let n = order as usize;
            let mut exp = vec![0u32; n];
            let mut log = vec![NONE; q as usize];
            let mut cur = 1u32;
            for (k, slot) in exp.iter_mut().enumerate() {
                *slot = cur;
                log[cur as usize] = k as u32;
                cur = field.poly_mul(cur, gen);
            }
            let one_digits = 1u32;
            let zech = (0..n)
                .map(|d| {
                    let s = field.poly_add(one_digits, exp[d]);
                    if s == 0 {
                        NONE
                    } else {
                        log[s as usize]
                    }
                })
                .collect();
            field.arith = Arith::Zech { exp, log, zech };
            field.primitive = Elem(2);
        } else {
            field.primitive = Elem(gen);
        }
        Ok(field)
    }

    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn order(&self) -> u32 {
        self.q
    }

    /// Monic modulus coefficients over GF(p), low degree first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn uses_zech(&self) -> bool {
        matches!(self.arith, Arith::Zech { .. })
    }

    pub fn is_gf2(&self) -> bool {
        self.q == 2
    }

    #[inline]
    pub fn zero(&self) -> Elem {
        Elem::ZERO
    }

    #[inline]
    pub fn one(&self) -> Elem {
        Elem::ONE
    }

    /// A fixed generator of the multiplicative group.
    pub fn primitive(&self) -> Elem {
        self.primitive
    }

    /// All field elements, zero first.
    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.q).map(Elem)
    }

    /// The image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Elem {
        let r = n.rem_euclid(self.p as i64) as u32;
        self.from_encoding(r)
    }

    /// Element whose base-p digits are the polynomial coefficients, low first.
    pub fn from_encoding(&self, code: u32) -> Elem {
        assert!(code < self.q, "encoding out of range");
        match &self.arith {
            Arith::Prime | Arith::Poly => Elem(code),
            Arith::Zech { log, .. } => {
                if code == 0 {
                    Elem::ZERO
                } else {
                    Elem(log[code as usize] + 1)
                }
            }
        }
    }

    pub fn encoding(&self, a: Elem) -> u32 {
        match &self.arith {
            Arith::Prime | Arith::Poly => a.0,
            Arith::Zech { exp, .. } => {
                if a.0 == 0 {
                    0
                } else {
                    exp[(a.0 - 1) as usize]
                }
            }
        }
    }

    /// Integer value of an element of the prime subfield.
    pub fn to_prime_int(&self, a: Elem) -> Option<u32> {
        let code = self.encoding(a);
        (code < self.p).then_some(code)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        match &self.arith {
            Arith::Prime => {
                let s = a.0 + b.0;
                Elem(if s >= self.p { s - self.p } else { s })
            }
            Arith::Zech { zech, .. } => {
                if a.0 == 0 {
                    return b;
                }
                if b.0 == 0 {
                    return a;
                }
                let n = self.q - 1;
                let i = a.0 - 1;
                let j = b.0 - 1;
                let d = if j >= i { j - i } else { j + n - i };
                let z = zech[d as usize];
                if z == NONE {
                    Elem::ZERO
                } else {
                    let k = i + z;
                    Elem(if k >= n { k - n } else { k } + 1)
                }
            }
            Arith::Poly => Elem(self.poly_add(a.0, b.0)),
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        if a.0 == 0 {
            return a;
        }
        match &self.arith {
            Arith::Prime => Elem(self.p - a.0),
            Arith::Zech { .. } => {
                if self.p == 2 {
                    return a;
                }
                let n = self.q - 1;
                let k = a.0 - 1 + n / 2;
                Elem(if k >= n { k - n } else { k } + 1)
            }
            Arith::Poly => {
                let digits = self.digits(a.0);
                let neg: Vec<u32> = digits.iter().map(|&d| (self.p - d) % self.p).collect();
                Elem(self.undigits(&neg))
            }
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        match &self.arith {
            Arith::Prime => Elem(((a.0 as u64 * b.0 as u64) % self.p as u64) as u32),
            Arith::Zech { .. } => {
                let n = self.q - 1;
                let k = (a.0 - 1) + (b.0 - 1);
                Elem(if k >= n { k - n } else { k } + 1)
            }
            Arith::Poly => Elem(self.poly_mul(a.0, b.0)),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if a.0 == 0 {
            return None;
        }
        match &self.arith {
            Arith::Zech { .. } => {
                let n = self.q - 1;
                let k = a.0 - 1;
                Some(Elem(if k == 0 { 0 } else { n - k } + 1))
            }
            _ => Some(self.pow(a, (self.q - 2) as u64)),
        }
    }

    pub fn div(&self, a: Elem, b: Elem) -> Option<Elem> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        if a.0 == 0 {
            return if e == 0 { Elem::ONE } else { Elem::ZERO };
        }
        if let Arith::Zech { .. } = &self.arith {
            let n = (self.q - 1) as u64;
            let k = ((a.0 - 1) as u64 * (e % n)) % n;
            return Elem(k as u32 + 1);
        }
        let mut base = a;
        let mut acc = Elem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Discrete logarithm to the base [`Field::primitive`].
    pub fn log(&self, a: Elem) -> Option<u32> {
        if a.0 == 0 {
            return None;
        }
        match &self.arith {
            Arith::Zech { .. } => Some(a.0 - 1),
            _ => {
                let mut cur = Elem::ONE;
                for k in 0..self.q - 1 {
                    if cur == a {
                        return Some(k);
                    }
                    cur = self.mul(cur, self.primitive);
                }
                None
            }
        }
    }

    /// Multiplicative order of a nonzero element.
    pub fn mult_order(&self, a: Elem) -> Option<u32> {
        if a.is_zero() {
            return None;
        }
        let n = self.q - 1;
        let mut ord = n;
        for (prime, _) in factorize(n as u64) {
            let prime = prime as u32;
            while ord.is_multiple_of(prime) && self.pow(a, (ord / prime) as u64) == Elem::ONE {
                ord /= prime;
            }
        }
        Some(ord)
    }

    /// A fixed element of exact order `n`, when `n` divides `q - 1`.
    pub fn root_of_unity(&self, n: u32) -> Option<Elem> {
        if n == 0 || !(self.q - 1).is_multiple_of(n) {
            return None;
        }
        Some(self.pow(self.primitive, ((self.q - 1) / n) as u64))
    }

    fn digits(&self, mut code: u32) -> Vec<u32> {
        let mut out = vec![0u32; self.m as usize];
        for d in out.iter_mut() {
            *d = code % self.p;
            code /= self.p;
        }
        out
    }

    fn undigits(&self, digits: &[u32]) -> u32 {
        digits.iter().rev().fold(0u32, |acc, &d| acc * self.p + d)
    }

    fn poly_add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        let da = self.digits(a);
        let db = self.digits(b);
        let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        self.undigits(&s)
    }

    fn poly_mul(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        let m = self.m as usize;
        let da = self.digits(a);
        let db = self.digits(b);
        let mut prod = vec![0u64; 2 * m];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        for k in (m..2 * m).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for (t, &mc) in self.modulus[..m].iter().enumerate() {
                let sub = c * mc as u64 % p;
                prod[k - m + t] = (prod[k - m + t] + p - sub) % p;
            }
        }
        let digits: Vec<u32> = prod[..m].iter().map(|&x| x as u32).collect();
        self.undigits(&digits)
    }

    fn poly_order(&self, code: u32) -> u32 {
        let n = self.q - 1;
        let pow = |mut e: u32| {
            let mut base = code;
            let mut acc = 1u32;
            while e > 0 {
                if e & 1 == 1 {
                    acc = self.poly_mul(acc, base);
                }
                base = self.poly_mul(base, base);
                e >>= 1;
            }
            acc
        };
        let mut ord = n;
        for (prime, _) in factorize(n as u64) {
            let prime = prime as u32;
            while ord.is_multiple_of(prime) && pow(ord / prime) == 1 {
                ord /= prime;
            }
        }
        ord
    }
}

/// Prime factorisation by trial division.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut k = 0;
            while n.is_multiple_of(d) {
                n /= d;
                k += 1;
            }
            out.push((d, k));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn primitive_root_mod(p: u32) -> u32 {
    if p == 2 {
        return 1;
    }
    let n = (p - 1) as u64;
    let factors = factorize(n);
    (2..p)
        .find(|&g| {
            factors
                .iter()
                .all(|&(f, _)| pow_mod(g as u64, n / f, p as u64) != 1)
        })
        .expect("prime field has a primitive root")
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    acc
}

// --- polynomials over GF(p) with u64 coefficients, only for modulus search ---

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn prem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let mut r = trim(a.to_vec());
    let df = f.len() - 1;
    let lead_inv = pow_mod(f[df], p - 2, p);
    while r.len() > df {
        let k = r.len() - 1;
        let c = r[k] * lead_inv % p;
        for (t, &fc) in f.iter().enumerate() {
            let idx = k - df + t;
            r[idx] = (r[idx] + p - c * fc % p) % p;
        }
        r = trim(r);
    }
    r
}

fn pmulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    prem(&prod, f, p)
}

fn pgcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = prem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Ben-Or irreducibility test over GF(p).
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let m = f.len() - 1;
    let x = vec![0, 1];
    let mut h = x.clone();
    for _ in 0..m / 2 {
        // h <- h^p mod f
        let mut acc = vec![1u64];
        let mut base = h.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = pmulmod(&acc, &base, f, p);
            }
            base = pmulmod(&base, &base, f, p);
            e >>= 1;
        }
        h = acc;
        let mut diff = h.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        let g = pgcd(f, &trim(diff), p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// First monic irreducible of degree `m`, ordering candidates by the base-p
/// value of their lower coefficients.
fn first_irreducible(p: u32, m: u32) -> Vec<u32> {
    let p64 = p as u64;
    let count = (p as u64).pow(m);
    for code in 0..count {
        let mut c = code;
        let mut f = Vec::with_capacity(m as usize + 1);
        for _ in 0..m {
            f.push(c % p64);
            c /= p64;
        }
        f.push(1);
        if f[0] == 0 {
            continue;
        }
        if is_irreducible(&f, p64) {
            return f.into_iter().map(|x| x as u32).collect();
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_axioms(f: &Field) {
        let els: Vec<Elem> = f.elements().collect();
        for &a in &els {
            assert_eq!(f.add(a, f.neg(a)), Elem::ZERO);
            assert_eq!(f.mul(a, Elem::ONE), a);
            if !a.is_zero() {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), Elem::ONE);
            }
            for &b in &els {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for &c in els.iter().step_by(3) {
                    assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }

    #[test]
    fn gf2_one_plus_one() {
        let f = Field::new(2, 1).unwrap();
        assert_eq!(f.add(f.one(), f.one()), f.zero());
    }

    #[test]
    fn gf64_generator_has_order_63() {
        let f = Field::new(2, 6).unwrap();
        assert!(f.uses_zech());
        assert_eq!(f.mult_order(f.primitive()), Some(63));
    }

    #[test]
    fn gf9_units_satisfy_x8() {
        let f = Field::new(3, 2).unwrap();
        for a in f.elements().filter(|a| !a.is_zero()) {
            assert_eq!(f.pow(a, 8), f.one());
        }
    }

    #[test]
    fn axioms_hold_exhaustively_on_small_fields() {
        for (p, m) in [(2, 1), (3, 1), (7, 1), (2, 2), (2, 3), (3, 2), (2, 4), (5, 2), (3, 3)] {
            check_axioms(&Field::new(p, m).unwrap());
        }
    }

    #[test]
    fn modulus_is_first_irreducible() {
        // x^2 + x + 1 is the only irreducible quadratic over GF(2)
        assert_eq!(Field::new(2, 2).unwrap().modulus(), &[1, 1, 1]);
        // x^2 + 1 over GF(3) precedes x^2 + x + 2
        assert_eq!(Field::new(3, 2).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(Field::new(2, 3).unwrap().modulus(), &[1, 1, 0, 1]);
    }

    #[test]
    fn errors() {
        assert_eq!(
            Field::new(4, 1).unwrap_err(),
            FieldError::CompositeCharacteristic(4)
        );
        assert!(matches!(
            Field::with_cap(2, 20, 1 << 16),
            Err(FieldError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn polynomial_fallback_matches_field_laws() {
        let f = Field::new(2, 17).unwrap();
        assert!(!f.uses_zech());
        let g = f.primitive();
        let a = f.pow(g, 1234);
        let b = f.pow(g, 98765);
        assert_eq!(f.mul(a, b), f.pow(g, 1234 + 98765));
        assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
        assert_eq!(f.mult_order(g), Some((1 << 17) - 1));
    }

    #[test]
    fn encoding_roundtrip_and_roots_of_unity() {
        let f = Field::new(3, 3).unwrap();
        for code in 0..27 {
            assert_eq!(f.encoding(f.from_encoding(code)), code);
        }
        let w = f.root_of_unity(13).unwrap();
        assert_eq!(f.mult_order(w), Some(13));
        assert!(f.root_of_unity(5).is_none());
    }
}
