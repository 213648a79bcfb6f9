use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::module::{spin_with, GModule};
use super::ModrepError;
use crate::field::{Elem, Field};
use crate::mat::{Echelon, Mat};
use crate::poly::{char_poly, factor, Poly};

/// Random algebra elements drawn before the deterministic fallback.
pub const MEATAXE_DRAWS: usize = 200;

/// Largest dimension covered by the deterministic fallback.
const FALLBACK_DIM: usize = 64;

/// Factors of larger degree are not evaluated (too costly, rarely needed).
const MAX_FACTOR_DEGREE: usize = 8;

/// `sum_t c_t * word_t`, replayable on any module for the same generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraElement {
    terms: Vec<(Elem, Vec<usize>)>,
}

impl AlgebraElement {
    pub fn new(terms: Vec<(Elem, Vec<usize>)>) -> AlgebraElement {
        AlgebraElement { terms }
    }

    pub fn terms(&self) -> &[(Elem, Vec<usize>)] {
        &self.terms
    }

    fn random(rng: &mut ChaCha8Rng, field: &Field, ngens: usize) -> AlgebraElement {
        let nterms = rng.gen_range(2..=3);
        let terms = (0..nterms)
            .map(|_| {
                let c = loop {
                    let c = field.from_encoding(rng.gen_range(0..field.order()));
                    if !c.is_zero() {
                        break c;
                    }
                };
                let len = rng.gen_range(1..=5);
                let word = (0..len).map(|_| rng.gen_range(0..ngens)).collect();
                (c, word)
            })
            .collect();
        AlgebraElement { terms }
    }

    pub fn evaluate(&self, m: &GModule) -> Mat {
        let f = m.field();
        let mut acc = Mat::zeros(f, m.dim(), m.dim());
        for (c, w) in &self.terms {
            acc = acc.add(&m.word_matrix(w).scale(*c)).expect("square");
        }
        acc
    }
}

/// Deterministic candidates for the fallback: words up to length 4 in
/// shortlex order, then sums of two of them.
fn fallback_elements(ngens: usize) -> Vec<AlgebraElement> {
    let mut words: Vec<Vec<usize>> = Vec::new();
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..4 {
        let next: Vec<Vec<usize>> = layer
            .iter()
            .flat_map(|w| {
                (0..ngens).map(move |g| {
                    let mut v = w.clone();
                    v.push(g);
                    v
                })
            })
            .collect();
        words.extend(next.iter().cloned());
        layer = next;
    }
    words.truncate(60);
    let mut out: Vec<AlgebraElement> = words
        .iter()
        .map(|w| AlgebraElement::new(vec![(Elem::ONE, w.clone())]))
        .collect();
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            out.push(AlgebraElement::new(vec![
                (Elem::ONE, words[i].clone()),
                (Elem::ONE, words[j].clone()),
            ]));
        }
    }
    out
}

enum Outcome {
    Submodule(Echelon),
    Irreducible,
}

/// Norton's test for one algebra element `a`: a proper submodule, a
/// certificate of irreducibility, or nothing conclusive.
fn norton(m: &GModule, a: &Mat, transposes: &[Mat]) -> Option<Outcome> {
    let f = m.field();
    let n = m.dim();
    let cp = char_poly(a).expect("square");
    for (fac, _) in factor(&cp) {
        let deg = fac.degree().expect("nonconstant");
        if deg > MAX_FACTOR_DEGREE && deg < n {
            continue;
        }
        let nm = fac.eval_mat(a).expect("square");
        let ker = nm.left_kernel();
        let Some(v) = ker.first() else { continue };
        let sub = m.spin(v);
        if sub.len() < n {
            return Some(Outcome::Submodule(sub));
        }
        if ker.len() == deg {
            let col = nm.kernel();
            let w = spin_with(f, transposes, &col[0]);
            if w.len() < n {
                return Some(Outcome::Submodule(annihilator(f, &w, n)));
            }
            return Some(Outcome::Irreducible);
        }
    }
    None
}

/// `{v : v . w = 0 for all w in W}`; a submodule when `W` is stable under
/// the transposed generators.
fn annihilator(f: &Arc<Field>, w: &Echelon, n: usize) -> Echelon {
    let wm = w.to_mat();
    let mut out = Echelon::new(f, n);
    for v in wm.kernel() {
        out.insert(&v);
    }
    out
}

fn find_submodule(m: &GModule, rng: &mut ChaCha8Rng) -> Result<Outcome, ModrepError> {
    if m.dim() == 1 {
        return Ok(Outcome::Irreducible);
    }
    let transposes: Vec<Mat> = m.generators().iter().map(Mat::transpose).collect();
    let ngens = m.generators().len();
    for _ in 0..MEATAXE_DRAWS {
        let theta = AlgebraElement::random(rng, m.field(), ngens);
        if let Some(out) = norton(m, &theta.evaluate(m), &transposes) {
            return Ok(out);
        }
    }
    if m.dim() <= FALLBACK_DIM {
        for theta in fallback_elements(ngens) {
            if let Some(out) = norton(m, &theta.evaluate(m), &transposes) {
                return Ok(out);
            }
        }
    }
    Err(ModrepError::RandomBudgetExceeded { dim: m.dim() })
}

pub fn is_irreducible(m: &GModule, seed: u64) -> Result<bool, ModrepError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(matches!(find_submodule(m, &mut rng)?, Outcome::Irreducible))
}

/// Composition factors with multiplicities, in order of discovery
/// (bottom of the module first).
pub fn chop(m: &GModule, seed: u64) -> Result<Vec<(GModule, usize)>, ModrepError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stack = vec![m.clone()];
    let mut factors: Vec<(GModule, usize)> = Vec::new();
    while let Some(x) = stack.pop() {
        match find_submodule(&x, &mut rng)? {
            Outcome::Submodule(sub) => {
                stack.push(x.quotient(&sub));
                stack.push(x.submodule(&sub));
            }
            Outcome::Irreducible => {
                let mut known = false;
                for (s, mult) in factors.iter_mut() {
                    if module_iso(s, &x, seed)? {
                        *mult += 1;
                        known = true;
                        break;
                    }
                }
                if !known {
                    factors.push((x, 1));
                }
            }
        }
    }
    Ok(factors)
}

fn char_polys(m: &GModule) -> Vec<Poly> {
    m.generators().iter().map(|a| char_poly(a).expect("square")).collect()
}

/// Isomorphism of two irreducible modules by comparing standard bases
/// spun from the one-dimensional kernel of a matching algebra element.
pub fn module_iso(a: &GModule, b: &GModule, seed: u64) -> Result<bool, ModrepError> {
    if a.dim() != b.dim() || a.field() != b.field() || a.generators().len() != b.generators().len() {
        return Ok(false);
    }
    if a == b {
        return Ok(true);
    }
    if a.dim() == 1 {
        return Ok(false);
    }
    if char_polys(a) != char_polys(b) {
        return Ok(false);
    }
    let f = a.field();
    let ngens = a.generators().len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1505);
    for _ in 0..MEATAXE_DRAWS {
        let theta = AlgebraElement::random(&mut rng, f, ngens);
        let ta = theta.evaluate(a);
        let linear = factor(&char_poly(&ta).expect("square"))
            .into_iter()
            .filter(|(p, _)| p.degree() == Some(1))
            .map(|(p, _)| p)
            .find_map(|p| {
                let na = p.eval_mat(&ta).expect("square");
                let ker = na.left_kernel();
                (ker.len() == 1).then(|| (p, ker[0].clone()))
            });
        let Some((p, va)) = linear else { continue };
        let nb = p.eval_mat(&theta.evaluate(b)).expect("square");
        let kb = nb.left_kernel();
        if kb.len() != 1 {
            return Ok(false);
        }
        return Ok(same_standard_basis(a, &va, b, &kb[0]));
    }
    Err(ModrepError::RandomBudgetExceeded { dim: a.dim() })
}

fn same_standard_basis(a: &GModule, va: &[Elem], b: &GModule, vb: &[Elem]) -> bool {
    let f = a.field();
    let n = a.dim();
    // spin va, recording which (basis vector, generator) pairs were kept
    let mut ech = Echelon::new(f, n);
    ech.insert(va);
    let mut basis_a = vec![va.to_vec()];
    let mut basis_b = vec![vb.to_vec()];
    let mut head = 0;
    while head < basis_a.len() && basis_a.len() < n {
        for (ga, gb) in a.generators().iter().zip(b.generators()) {
            let w = ga.vec_mul(&basis_a[head]);
            if ech.insert(&w).is_some() {
                basis_a.push(w);
                basis_b.push(gb.vec_mul(&basis_b[head]));
            }
        }
        head += 1;
    }
    if basis_a.len() < n {
        return false;
    }
    let ba = Mat::from_rows(f, &basis_a);
    let bb = Mat::from_rows(f, &basis_b);
    let (Some(ia), Some(ib)) = (ba.inverse(), bb.inverse()) else {
        return false;
    };
    a.generators().iter().zip(b.generators()).all(|(ga, gb)| {
        let xa = ba.mul(ga).and_then(|x| x.mul(&ia)).expect("square");
        let xb = bb.mul(gb).and_then(|x| x.mul(&ib)).expect("square");
        xa == xb
    })
}
