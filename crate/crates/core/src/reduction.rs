//! The root-of-unity correspondence for a pair `(G, p)`: one fixed element
//! `beta` of order `e'` in the splitting field, used both to lift Brauer
//! eigenvalues and to reduce cyclotomic integers mod p.

use std::sync::Arc;

use crate::cyc::Cyc;
use crate::field::{Elem, Field, FieldError};

/// `(m, e')`: `e'` is the p'-part of `exponent`, `m` the order of p mod `e'`.
pub fn splitting_parameters(exponent: u64, p: u64) -> (u32, u64) {
    let mut e_prime = exponent;
    while e_prime.is_multiple_of(p) {
        e_prime /= p;
    }
    let mut m = 1u32;
    let mut pm = p % e_prime.max(1);
    while e_prime > 1 && pm != 1 {
        pm = pm * p % e_prime;
        m += 1;
    }
    (m, e_prime)
}

#[derive(Clone, Debug)]
pub struct Correspondence {
    p: u64,
    field: Arc<Field>,
    /// Conductor of ordinary values, `p^a e'`.
    exponent: u64,
    e_prime: u64,
    p_part: u64,
    beta: Elem,
    /// Image of `zeta_e`.
    gamma: Elem,
}

impl Correspondence {
    pub fn new(exponent: u64, p: u64) -> Result<Correspondence, FieldError> {
        let (m, e_prime) = splitting_parameters(exponent, p);
        let field = Arc::new(Field::new(p as u32, m)?);
        let beta = field
            .root_of_unity(e_prime as u32)
            .expect("p^m = 1 mod e' by construction");
        let p_part = exponent / e_prime;
        let u = if e_prime == 1 {
            0
        } else {
            mod_inverse(p_part % e_prime, e_prime)
        };
        let gamma = field.pow(beta, u);
        Ok(Correspondence {
            p,
            field,
            exponent,
            e_prime,
            p_part,
            beta,
            gamma,
        })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn e_prime(&self) -> u64 {
        self.e_prime
    }

    /// `p^a`, the p-part of the exponent.
    pub fn p_part(&self) -> u64 {
        self.p_part
    }

    /// The fixed element of order `e'`.
    pub fn beta(&self) -> Elem {
        self.beta
    }

    /// `beta^j`, lifted to `zeta_{e'}^j`.
    pub fn eigenvalue(&self, j: u64) -> Elem {
        self.field.pow(self.beta, j % self.e_prime)
    }

    /// Reduces an algebraic integer of conductor dividing the exponent:
    /// `zeta_e -> beta^u` with `u p^a = 1 (mod e')`, so `zeta_{p^a} -> 1`
    /// and `zeta_{e'} = zeta_e^{p^a} -> beta`. `None` when a denominator
    /// is divisible by p or the conductor does not divide the exponent.
    pub fn reduce(&self, x: &Cyc) -> Option<Elem> {
        let c = x.conductor() as u64;
        if !self.exponent.is_multiple_of(c) {
            return None;
        }
        let zeta = self.field.pow(self.gamma, self.exponent / c);
        let f = &self.field;
        x.map_with(
            f.zero(),
            |n| f.from_int(n.rem_euclid(self.p as i128) as i64),
            |a, b| f.add(a, b),
            |a, b| f.mul(a, b),
            |a| f.inv(a),
            zeta,
        )
    }

    pub fn reduce_all(&self, xs: &[Cyc]) -> Option<Vec<Elem>> {
        xs.iter().map(|x| self.reduce(x)).collect()
    }
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, a as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert_eq!(r, 1, "not invertible");
    t.rem_euclid(m as i128) as u64
}
