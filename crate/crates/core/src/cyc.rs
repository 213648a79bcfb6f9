//! Exact arithmetic in cyclotomic fields Q(zeta_e), power basis reduced
//! modulo the e-th cyclotomic polynomial.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex, OnceLock};

use num_integer::Integer;
use num_rational::BigRational;
use num_bigint::BigInt;

/// Reduction data for one conductor.
#[derive(Debug)]
pub struct Conductor {
    e: u32,
    phi: usize,
    /// `powers[s]` expresses `zeta^s` (`0 <= s < e`) in the power basis.
    powers: Vec<Vec<i64>>,
}

impl Conductor {
    pub fn get(e: u32) -> Arc<Conductor> {
        static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Conductor>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("conductor cache poisoned");
        guard
            .entry(e)
            .or_insert_with(|| Arc::new(Conductor::build(e)))
            .clone()
    }

    fn build(e: u32) -> Conductor {
        assert!(e >= 1, "conductor must be positive");
        let phi_poly = cyclotomic_poly(e);
        let phi = phi_poly.len() - 1;
        let mut powers = Vec::with_capacity(e as usize);
        let mut cur = vec![0i64; phi.max(1)];
        cur[0] = 1;
        for _ in 0..e {
            powers.push(cur[..phi].to_vec());
            // multiply by x and reduce by the monic cyclotomic polynomial
            let mut next = vec![0i64; phi + 1];
            next[1..=phi].copy_from_slice(&cur[..phi]);
            let top = next[phi];
            if top != 0 {
                for (t, &c) in phi_poly[..phi].iter().enumerate() {
                    next[t] -= top * c;
                }
            }
            next.truncate(phi);
            cur = next;
            if cur.is_empty() {
                cur.push(0);
            }
        }
        if phi == 0 {
            unreachable!("cyclotomic polynomials have positive degree");
        }
        Conductor { e, phi, powers }
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn phi(&self) -> usize {
        self.phi
    }
}

/// Integer coefficients of the n-th cyclotomic polynomial, low degree first.
pub fn cyclotomic_poly(n: u32) -> Vec<i64> {
    // x^n - 1 divided by Phi_d for all proper divisors d
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            num = exact_div(&num, &cyclotomic_poly(d));
        }
    }
    num
}

fn exact_div(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let mut q = vec![0i64; a.len() - db];
    for k in (db..a.len()).rev() {
        let c = r[k] / b[db];
        q[k - db] = c;
        for (t, &bc) in b.iter().enumerate() {
            r[k - db + t] -= c * bc;
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0));
    q
}

/// An element of Q(zeta_e): numerators over a common positive denominator,
/// always in lowest terms.
#[derive(Clone)]
pub struct Cyc {
    ctx: Arc<Conductor>,
    num: Vec<i128>,
    den: i128,
}

fn ck_mul(a: i128, b: i128) -> i128 {
    a.checked_mul(b).expect("cyclotomic coefficient overflow")
}

fn ck_add(a: i128, b: i128) -> i128 {
    a.checked_add(b).expect("cyclotomic coefficient overflow")
}

impl Cyc {
    pub fn zero(e: u32) -> Cyc {
        let ctx = Conductor::get(e);
        Cyc {
            num: vec![0; ctx.phi],
            ctx,
            den: 1,
        }
    }

    pub fn from_int(e: u32, n: i64) -> Cyc {
        let mut c = Cyc::zero(e);
        c.num[0] = n as i128;
        c
    }

    pub fn one(e: u32) -> Cyc {
        Cyc::from_int(e, 1)
    }

    pub fn rational(e: u32, n: i64, d: i64) -> Cyc {
        assert!(d != 0, "zero denominator");
        let mut c = Cyc::zero(e);
        c.num[0] = n as i128;
        c.den = d as i128;
        c.normalize();
        c
    }

    /// `zeta_e^s`.
    pub fn zeta_pow(e: u32, s: i64) -> Cyc {
        let ctx = Conductor::get(e);
        let idx = s.rem_euclid(e as i64) as usize;
        let num = ctx.powers[idx].iter().map(|&x| x as i128).collect();
        Cyc { ctx, num, den: 1 }
    }

    /// `sum_s m[s] zeta_e^s` for an exponent-indexed coefficient list.
    pub fn from_exponents(e: u32, m: &[i64]) -> Cyc {
        let ctx = Conductor::get(e);
        let mut num = vec![0i128; ctx.phi];
        for (s, &c) in m.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (x, &p) in num.iter_mut().zip(&ctx.powers[s % e as usize]) {
                *x = ck_add(*x, c as i128 * p as i128);
            }
        }
        Cyc { ctx, num, den: 1 }
    }

    pub fn conductor(&self) -> u32 {
        self.ctx.e
    }

    /// Power-basis coefficients as `(numerator, denominator)` pairs.
    pub fn coeffs(&self) -> Vec<(i128, i128)> {
        self.num
            .iter()
            .map(|&n| {
                let g = n.gcd(&self.den);
                (n / g, self.den / g)
            })
            .collect()
    }

    pub fn numerators(&self) -> &[i128] {
        &self.num
    }

    pub fn denominator(&self) -> i128 {
        self.den
    }

    /// Coordinates as exact rationals (for linear solves over Q).
    pub fn rational_coords(&self) -> Vec<BigRational> {
        self.num
            .iter()
            .map(|&n| BigRational::new(BigInt::from(n), BigInt::from(self.den)))
            .collect()
    }

    fn normalize(&mut self) {
        if self.den < 0 {
            self.den = -self.den;
            self.num.iter_mut().for_each(|x| *x = -*x);
        }
        let g = self.num.iter().fold(self.den, |g, &x| g.gcd(&x));
        if g > 1 {
            self.den /= g;
            self.num.iter_mut().for_each(|x| *x /= g);
        }
    }

    fn same_ctx(&self, other: &Cyc) {
        assert_eq!(
            self.ctx.e, other.ctx.e,
            "mixing cyclotomic conductors; embed first"
        );
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|&x| x == 0)
    }

    pub fn is_integral(&self) -> bool {
        self.den == 1
    }

    /// The rational value, when the element lies in Q.
    pub fn as_rational(&self) -> Option<(i128, i128)> {
        self.num[1..].iter().all(|&x| x == 0).then(|| {
            let g = self.num[0].gcd(&self.den).max(1);
            (self.num[0] / g, self.den / g)
        })
    }

    pub fn as_integer(&self) -> Option<i128> {
        match self.as_rational() {
            Some((n, 1)) => Some(n),
            _ => None,
        }
    }

    pub fn add(&self, other: &Cyc) -> Cyc {
        self.same_ctx(other);
        let num = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(&a, &b)| ck_add(ck_mul(a, other.den), ck_mul(b, self.den)))
            .collect();
        let mut c = Cyc {
            ctx: self.ctx.clone(),
            num,
            den: ck_mul(self.den, other.den),
        };
        c.normalize();
        c
    }

    pub fn neg(&self) -> Cyc {
        Cyc {
            ctx: self.ctx.clone(),
            num: self.num.iter().map(|&x| -x).collect(),
            den: self.den,
        }
    }

    pub fn sub(&self, other: &Cyc) -> Cyc {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Cyc) -> Cyc {
        self.same_ctx(other);
        let ctx = &self.ctx;
        let e = ctx.e as usize;
        // accumulate by exponent, then rewrite each zeta^s in the basis
        let mut acc = vec![0i128; e];
        for (i, &a) in self.num.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.num.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                let s = (i + j) % e;
                acc[s] = ck_add(acc[s], ck_mul(a, b));
            }
        }
        let mut num = vec![0i128; ctx.phi];
        for (s, &c) in acc.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if s < ctx.phi {
                num[s] = ck_add(num[s], c);
                continue;
            }
            for (x, &p) in num.iter_mut().zip(&ctx.powers[s]) {
                if p != 0 {
                    *x = ck_add(*x, ck_mul(c, p as i128));
                }
            }
        }
        let mut c = Cyc {
            ctx: ctx.clone(),
            num,
            den: ck_mul(self.den, other.den),
        };
        c.normalize();
        c
    }

    pub fn scale(&self, n: i64, d: i64) -> Cyc {
        assert!(d != 0, "zero denominator");
        let mut c = Cyc {
            ctx: self.ctx.clone(),
            num: self.num.iter().map(|&x| ck_mul(x, n as i128)).collect(),
            den: ck_mul(self.den, d as i128),
        };
        c.normalize();
        c
    }

    /// Image under `zeta -> zeta^k` (`k` coprime to the conductor).
    pub fn galois(&self, k: i64) -> Cyc {
        let e = self.ctx.e as i64;
        debug_assert_eq!(k.gcd(&e), 1);
        let mut num = vec![0i128; self.ctx.phi];
        for (i, &a) in self.num.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let s = (i as i64 * k).rem_euclid(e) as usize;
            for (x, &p) in num.iter_mut().zip(&self.ctx.powers[s]) {
                *x = ck_add(*x, ck_mul(a, p as i128));
            }
        }
        let mut c = Cyc {
            ctx: self.ctx.clone(),
            num,
            den: self.den,
        };
        c.normalize();
        c
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Cyc {
        self.galois(-1)
    }

    /// Re-expresses the element in Q(zeta_big) via `zeta_e -> zeta_big^(big/e)`.
    pub fn embed(&self, big: u32) -> Cyc {
        let e = self.ctx.e;
        assert!(big.is_multiple_of(e), "conductor {e} does not divide {big}");
        if big == e {
            return self.clone();
        }
        let step = (big / e) as usize;
        let target = Conductor::get(big);
        let mut num = vec![0i128; target.phi];
        for (i, &a) in self.num.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (x, &p) in num.iter_mut().zip(&target.powers[i * step]) {
                *x = ck_add(*x, ck_mul(a, p as i128));
            }
        }
        let mut c = Cyc {
            ctx: target,
            num,
            den: self.den,
        };
        c.normalize();
        c
    }

    /// Maps the element through a ring homomorphism `Z[zeta] -> K` given
    /// the image of `zeta`; `None` when a denominator is not invertible.
    pub fn map_with<K: Copy>(
        &self,
        zero: K,
        from_int: impl Fn(i128) -> K,
        add: impl Fn(K, K) -> K,
        mul: impl Fn(K, K) -> K,
        inv: impl Fn(K) -> Option<K>,
        zeta: K,
    ) -> Option<K> {
        let mut acc = zero;
        let mut zp = from_int(1);
        for &c in &self.num {
            if c != 0 {
                acc = add(acc, mul(from_int(c), zp));
            }
            zp = mul(zp, zeta);
        }
        let d = inv(from_int(self.den))?;
        Some(mul(acc, d))
    }
}

impl PartialEq for Cyc {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.e == other.ctx.e && self.den == other.den && self.num == other.num
    }
}

impl Eq for Cyc {}

impl Hash for Cyc {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ctx.e.hash(state);
        self.num.hash(state);
        self.den.hash(state);
    }
}

impl PartialOrd for Cyc {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic on the rational power-basis coefficients.
impl Ord for Cyc {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ctx.e.cmp(&other.ctx.e).then_with(|| {
            for (&a, &b) in self.num.iter().zip(&other.num) {
                let o = ck_mul(a, other.den).cmp(&ck_mul(b, self.den));
                if o != Ordering::Equal {
                    return o;
                }
            }
            Ordering::Equal
        })
    }
}

impl fmt::Debug for Cyc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Cyc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.num.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let a = c.abs();
            let coeff = match (i, a) {
                (0, _) => a.to_string(),
                (_, 1) => String::new(),
                _ => a.to_string(),
            };
            let mon = match i {
                0 => String::new(),
                1 => format!("z{}", self.ctx.e),
                _ => format!("z{}^{}", self.ctx.e, i),
            };
            write!(f, "{sign}{coeff}{mon}")?;
            first = false;
        }
        if self.den != 1 {
            write!(f, " /{}", self.den)?;
        }
        Ok(())
    }
}
