//! Univariate polynomials over a [`Field`], characteristic polynomials and
//! factorisation into irreducibles.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::{Elem, Field};
use crate::mat::{LinalgError, Mat};

/// Coefficients low degree first, no trailing zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: Arc<Field>,
    coeffs: Vec<Elem>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<u32> = self.coeffs.iter().map(|&e| self.field.encoding(e)).collect();
        write!(f, "Poly{c:?}")
    }
}

impl Poly {
    pub fn new(field: &Arc<Field>, mut coeffs: Vec<Elem>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn from_ints(field: &Arc<Field>, coeffs: &[i64]) -> Poly {
        Poly::new(field, coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn zero(field: &Arc<Field>) -> Poly {
        Poly::new(field, Vec::new())
    }

    pub fn one(field: &Arc<Field>) -> Poly {
        Poly::new(field, vec![Elem::ONE])
    }

    pub fn x(field: &Arc<Field>) -> Poly {
        Poly::new(field, vec![Elem::ZERO, Elem::ONE])
    }

    /// `x - a`
    pub fn linear(field: &Arc<Field>, a: Elem) -> Poly {
        Poly::new(field, vec![field.neg(a), Elem::ONE])
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lead(&self) -> Elem {
        self.coeffs.last().copied().unwrap_or(Elem::ZERO)
    }

    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(i).copied().unwrap_or(Elem::ZERO)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.field.inv(self.lead()).expect("nonzero lead");
        self.scale(inv)
    }

    pub fn scale(&self, c: Elem) -> Poly {
        let f = &self.field;
        Poly::new(f, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(
            f,
            (0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect(),
        )
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(
            f,
            (0..n).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect(),
        )
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let f = &self.field;
        if self.is_zero() || other.is_zero() {
            return Poly::zero(f);
        }
        let mut out = vec![Elem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::new(f, out)
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        let f = &self.field;
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.deg();
        let inv = f.inv(d.lead()).expect("nonzero lead");
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Poly::zero(f), self.clone());
        }
        let mut q = vec![Elem::ZERO; r.len() - dd];
        for k in (dd..r.len()).rev() {
            let c = f.mul(r[k], inv);
            if c.is_zero() {
                continue;
            }
            q[k - dd] = c;
            let nc = f.neg(c);
            for (t, &dc) in d.coeffs.iter().enumerate() {
                r[k - dd + t] = f.add(r[k - dd + t], f.mul(nc, dc));
            }
        }
        r.truncate(dd);
        (Poly::new(f, q), Poly::new(f, r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.divrem(d).1
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn mulmod(&self, other: &Poly, m: &Poly) -> Poly {
        self.mul(other).rem(m)
    }

    pub fn powmod(&self, mut e: u64, m: &Poly) -> Poly {
        let mut base = self.rem(m);
        let mut acc = Poly::one(&self.field).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mulmod(&base, m);
            }
            base = base.mulmod(&base, m);
            e >>= 1;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        let f = &self.field;
        Poly::new(
            f,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| f.mul(f.from_int(i as i64), c))
                .collect(),
        )
    }

    pub fn eval(&self, x: Elem) -> Elem {
        let f = &self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(Elem::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// Evaluates the polynomial at a square matrix (Horner).
    pub fn eval_mat(&self, a: &Mat) -> Result<Mat, LinalgError> {
        if !a.is_square() {
            return Err(LinalgError::NotSquare("eval_mat"));
        }
        let f = &self.field;
        let n = a.rows();
        let mut acc = Mat::zeros(f, n, n);
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(a)?.sub_scalar(f.neg(c));
        }
        Ok(acc)
    }

    /// p-th root of a polynomial whose derivative vanishes.
    fn pth_root(&self) -> Poly {
        let f = &self.field;
        let p = f.characteristic() as usize;
        // c^(1/p) = c^(p^(m-1))
        let e = (f.characteristic() as u64).pow(f.degree() - 1);
        Poly::new(
            f,
            self.coeffs
                .iter()
                .step_by(p)
                .map(|&c| f.pow(c, e))
                .collect(),
        )
    }

    fn sort_key(&self) -> (usize, Vec<u32>) {
        (
            self.coeffs.len(),
            self.coeffs.iter().rev().map(|&c| self.field.encoding(c)).collect(),
        )
    }
}

/// Characteristic polynomial `det(xI - A)` via Hessenberg reduction.
pub fn char_poly(a: &Mat) -> Result<Poly, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare("char_poly"));
    }
    let f = a.field().clone();
    let n = a.rows();
    let mut h = a.clone();
    // similarity transforms to upper Hessenberg form
    for k in 0..n.saturating_sub(2) {
        let Some(piv) = (k + 1..n).find(|&i| !h.get(i, k).is_zero()) else {
            continue;
        };
        if piv != k + 1 {
            h.swap_rows(piv, k + 1);
            for i in 0..n {
                let (x, y) = (h.get(i, piv), h.get(i, k + 1));
                h.set(i, piv, y);
                h.set(i, k + 1, x);
            }
        }
        let inv = f.inv(h.get(k + 1, k)).expect("pivot nonzero");
        for i in k + 2..n {
            let t = f.mul(h.get(i, k), inv);
            if t.is_zero() {
                continue;
            }
            // row_i -= t row_{k+1}; col_{k+1} += t col_i
            h.row_axpy(i, k + 1, f.neg(t));
            for r in 0..n {
                let v = f.add(h.get(r, k + 1), f.mul(t, h.get(r, i)));
                h.set(r, k + 1, v);
            }
        }
    }
    // p_0 = 1, p_m = (x - h_mm) p_{m-1} - sum_{i<m} h_{i,m} prod_{j=i+1}^{m} h_{j,j-1} p_{i-1}
    let mut ps: Vec<Poly> = vec![Poly::one(&f)];
    for m in 0..n {
        let mut pm = Poly::linear(&f, h.get(m, m)).mul(&ps[m]);
        let mut prod = Elem::ONE;
        for i in (0..m).rev() {
            prod = f.mul(prod, h.get(i + 1, i));
            if prod.is_zero() {
                break;
            }
            let c = f.mul(h.get(i, m), prod);
            if !c.is_zero() {
                pm = pm.sub(&ps[i].scale(c));
            }
        }
        ps.push(pm);
    }
    Ok(ps.pop().expect("nonempty"))
}

/// Factors a monic polynomial into `(irreducible, multiplicity)` pairs,
/// sorted by degree and then coefficients.
pub fn factor(poly: &Poly) -> Vec<(Poly, u32)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f00d);
    let mut out: Vec<(Poly, u32)> = Vec::new();
    if poly.degree().unwrap_or(0) == 0 {
        return out;
    }
    for (sqf, mult) in square_free(&poly.monic()) {
        for (g, d) in distinct_degree(&sqf) {
            for irr in equal_degree(&g, d, &mut rng) {
                if let Some(slot) = out.iter_mut().find(|(p, _)| *p == irr) {
                    slot.1 += mult;
                } else {
                    out.push((irr, mult));
                }
            }
        }
    }
    out.sort_by_key(|(p, _)| p.sort_key());
    out
}

/// Characteristic polynomial factored into irreducibles with multiplicities.
pub fn char_poly_factors(a: &Mat) -> Result<Vec<(Poly, u32)>, LinalgError> {
    Ok(factor(&char_poly(a)?))
}

fn square_free(f: &Poly) -> Vec<(Poly, u32)> {
    let p = f.field().characteristic();
    let mut out = Vec::new();
    let fd = f.derivative();
    if fd.is_zero() {
        for (g, m) in square_free(&f.pth_root()) {
            out.push((g, m * p));
        }
        return out;
    }
    let mut c = f.gcd(&fd);
    let mut w = f.divrem(&c).0;
    let mut i = 1;
    while w.degree().unwrap_or(0) > 0 {
        let y = w.gcd(&c);
        let fac = w.divrem(&y).0;
        if fac.degree().unwrap_or(0) > 0 {
            out.push((fac.monic(), i));
        }
        w = y;
        c = c.divrem(&w).0;
        i += 1;
    }
    if c.degree().unwrap_or(0) > 0 {
        for (g, m) in square_free(&c.pth_root()) {
            out.push((g, m * p));
        }
    }
    out
}

fn distinct_degree(f: &Poly) -> Vec<(Poly, usize)> {
    let field = f.field().clone();
    let q = field.order() as u64;
    let x = Poly::x(&field);
    let mut out = Vec::new();
    let mut rest = f.clone();
    let mut h = x.rem(&rest);
    let mut d = 1;
    while rest.deg() >= 2 * d {
        h = h.powmod(q, &rest);
        let g = h.sub(&x).gcd(&rest);
        if g.deg() > 0 {
            out.push((g.clone(), d));
            rest = rest.divrem(&g).0;
            h = h.rem(&rest);
        }
        d += 1;
    }
    if rest.deg() > 0 {
        let dd = rest.deg();
        out.push((rest.monic(), dd));
    }
    out
}

fn random_poly(field: &Arc<Field>, deg: usize, rng: &mut ChaCha8Rng) -> Poly {
    let q = field.order();
    Poly::new(
        field,
        (0..deg).map(|_| field.from_encoding(rng.gen_range(0..q))).collect(),
    )
}

fn equal_degree(f: &Poly, d: usize, rng: &mut ChaCha8Rng) -> Vec<Poly> {
    let n = f.deg();
    if n == d {
        return vec![f.monic()];
    }
    let field = f.field().clone();
    let q = field.order() as u64;
    loop {
        let a = random_poly(&field, n, rng);
        if a.deg() == 0 {
            continue;
        }
        let g = if field.characteristic() == 2 {
            // trace map a + a^2 + ... + a^(2^(m d - 1))
            let k = field.degree() as usize * d;
            let mut t = a.rem(f);
            let mut acc = t.clone();
            for _ in 1..k {
                t = t.mulmod(&t, f);
                acc = acc.add(&t);
            }
            acc.gcd(f)
        } else {
            // a^((q^d - 1)/2) = (prod_{i<d} a^(q^i))^((q-1)/2)
            let mut frob = a.rem(f);
            let mut norm = frob.clone();
            for _ in 1..d {
                frob = frob.powmod(q, f);
                norm = norm.mulmod(&frob, f);
            }
            let b = norm.powmod((q - 1) / 2, f);
            b.sub(&Poly::one(&field)).gcd(f)
        };
        let dg = g.deg();
        if dg > 0 && dg < n {
            let h = f.divrem(&g).0;
            let mut out = equal_degree(&g, d, rng);
            out.extend(equal_degree(&h, d, rng));
            return out;
        }
    }
}

/// Whether a polynomial is irreducible (degree at least one).
pub fn is_irreducible(f: &Poly) -> bool {
    let fs = factor(f);
    fs.len() == 1 && fs[0].1 == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Elem;

    fn reconstruct(field: &Arc<Field>, fs: &[(Poly, u32)]) -> Poly {
        fs.iter()
            .fold(Poly::one(field), |acc, (p, m)| acc.mul(&p.pow(*m)))
    }

    #[test]
    fn identity_over_gf2() {
        let f = Arc::new(Field::new(2, 1).unwrap());
        let fs = char_poly_factors(&Mat::identity(&f, 2)).unwrap();
        assert_eq!(fs, vec![(Poly::from_ints(&f, &[1, 1]), 2)]);
    }

    #[test]
    fn companion_of_x2_x_1() {
        let f = Arc::new(Field::new(2, 1).unwrap());
        // companion matrix of x^2 + x + 1
        let c = Mat::from_ints(&f, &[&[0, 1], &[1, 1]]);
        let fs = char_poly_factors(&c).unwrap();
        assert_eq!(fs, vec![(Poly::from_ints(&f, &[1, 1, 1]), 1)]);
    }

    #[test]
    fn random_gf3_reconstruction() {
        let f = Arc::new(Field::new(3, 1).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let a = Mat::from_fn(&f, 6, 6, |_, _| Elem(rng.gen_range(0..3)));
            let cp = char_poly(&a).unwrap();
            let fs = char_poly_factors(&a).unwrap();
            assert_eq!(reconstruct(&f, &fs), cp);
            let deg: usize = fs.iter().map(|(p, m)| p.deg() * *m as usize).sum();
            assert_eq!(deg, 6);
            for (p, _) in &fs {
                // irreducible: no proper factor found by a fresh factorisation
                assert_eq!(factor(p), vec![(p.clone(), 1)]);
            }
        }
    }

    #[test]
    fn char_poly_matches_determinant_by_evaluation() {
        // det(lambda I - A) for every lambda in GF(7) via elimination
        let f = Arc::new(Field::new(7, 1).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = Mat::from_fn(&f, 5, 5, |_, _| Elem(rng.gen_range(0..7)));
        let cp = char_poly(&a).unwrap();
        for lam in f.elements() {
            let m = Mat::identity(&f, 5).scale(lam).sub(&a).unwrap();
            assert_eq!(cp.eval(lam), det(&m));
        }
    }

    fn det(m: &Mat) -> Elem {
        let f = m.field().clone();
        let mut m = m.clone();
        let n = m.rows();
        let mut d = Elem::ONE;
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return Elem::ZERO;
            };
            if p != c {
                m.swap_rows(p, c);
                d = f.neg(d);
            }
            let piv = m.get(c, c);
            d = f.mul(d, piv);
            let inv = f.inv(piv).unwrap();
            for i in c + 1..n {
                let t = f.mul(m.get(i, c), inv);
                m.row_axpy(i, c, f.neg(t));
            }
        }
        d
    }

    #[test]
    fn factors_over_extension_fields() {
        for (p, m) in [(2, 2), (3, 2), (2, 6), (5, 2)] {
            let f = Arc::new(Field::new(p, m).unwrap());
            let mut rng = ChaCha8Rng::seed_from_u64(p as u64 * 31 + m as u64);
            let q = f.order();
            for _ in 0..5 {
                let a = Mat::from_fn(&f, 7, 7, |_, _| Elem(rng.gen_range(0..q)));
                let fs = char_poly_factors(&a).unwrap();
                assert_eq!(reconstruct(&f, &fs), char_poly(&a).unwrap());
            }
        }
    }

    #[test]
    fn repeated_factors_in_char_p() {
        let f = Arc::new(Field::new(3, 1).unwrap());
        // (x+1)^3 (x^2+1)^2 over GF(3)
        let a = Poly::from_ints(&f, &[1, 1]).pow(3);
        let b = Poly::from_ints(&f, &[1, 0, 1]).pow(2);
        let fs = factor(&a.mul(&b));
        assert_eq!(
            fs,
            vec![
                (Poly::from_ints(&f, &[1, 1]), 3),
                (Poly::from_ints(&f, &[1, 0, 1]), 2)
            ]
        );
    }

    #[test]
    fn eval_mat_kills_matrix() {
        let f = Arc::new(Field::new(5, 1).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = Mat::from_fn(&f, 4, 4, |_, _| Elem(rng.gen_range(0..5)));
        // Cayley-Hamilton
        assert!(char_poly(&a).unwrap().eval_mat(&a).unwrap().is_zero());
    }
}
