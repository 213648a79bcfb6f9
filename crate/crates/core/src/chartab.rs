//! Ordinary character tables by Dixon-Schneider: class multiplication
//! matrices, simultaneous eigenvectors modulo a prime `r = 1 (mod exp G)`,
//! and lifting of the values to Q(zeta_e).

use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::classes::ClassData;
use crate::cyc::Cyc;
use crate::field::{is_prime, Elem, Field};
use crate::group::{Group, GroupError};
use crate::mat::{Echelon, Mat};
use crate::poly::char_poly_factors;

/// Upper end of the search for a lifting prime.
pub const LIFTING_PRIME_BOUND: u64 = 1_000_000;

/// Random combinations tried before falling back to single class matrices.
const SPLIT_ATTEMPTS: usize = 16;

const DEFAULT_SEED: u64 = 0xd1c5_0e5c;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChartabError {
    #[error("no prime r = 1 mod {e} in ({lower}, {bound}]")]
    LiftingPrimeNotFound { e: u64, lower: u64, bound: u64 },
    #[error("class matrices did not split into one-dimensional eigenspaces")]
    EigensplitBudgetExceeded,
    #[error("subgroup class {class} fuses inconsistently")]
    FusionInconsistent { class: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("inconsistent character data: {0}")]
    Inconsistent(String),
}

/// `a[i][j][k] = #{(x, y) in K_i x K_j : xy = z_k}` for a fixed `z_k` in `K_k`.
pub fn class_matrices(group: &Group, classes: &ClassData) -> Result<Vec<Vec<Vec<u64>>>, GroupError> {
    let en = group.enumeration()?;
    let k = classes.len();
    let mut a = vec![vec![vec![0u64; k]; k]; k];
    for (kk, &z) in classes.reps().iter().enumerate() {
        for (i, ai) in a.iter_mut().enumerate() {
            for &x in classes.members(i) {
                let y = en.mul(en.inv(x), z);
                ai[classes.class_of(y)][kk] += 1;
            }
        }
    }
    Ok(a)
}

/// `M_i` alone.
pub fn class_matrix(group: &Group, classes: &ClassData, i: usize) -> Result<Vec<Vec<u64>>, GroupError> {
    let en = group.enumeration()?;
    let k = classes.len();
    let mut m = vec![vec![0u64; k]; k];
    for (kk, &z) in classes.reps().iter().enumerate() {
        for &x in classes.members(i) {
            let y = en.mul(en.inv(x), z);
            m[classes.class_of(y)][kk] += 1;
        }
    }
    Ok(m)
}

/// Smallest prime `r = 1 (mod e)` with `r > 2 ceil(sqrt |G|) + 1`.
pub fn lifting_prime(group_order: u64, e: u64) -> Result<u64, ChartabError> {
    let lower = 2 * ceil_sqrt(group_order) + 1;
    let mut r = lower + 1;
    // first candidate = 1 mod e
    let rem = r % e;
    if rem != 1 % e {
        r += (e + 1 - rem) % e;
    }
    while r <= LIFTING_PRIME_BOUND {
        if is_prime(r) {
            return Ok(r);
        }
        r += e;
    }
    Err(ChartabError::LiftingPrimeNotFound {
        e,
        lower,
        bound: LIFTING_PRIME_BOUND,
    })
}

fn ceil_sqrt(n: u64) -> u64 {
    let mut s = (n as f64).sqrt() as u64;
    while s * s < n {
        s += 1;
    }
    while s > 0 && (s - 1) * (s - 1) >= n {
        s -= 1;
    }
    s
}

fn isqrt(n: u64) -> u64 {
    let mut s = (n as f64).sqrt() as u64;
    while s * s > n {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= n {
        s += 1;
    }
    s
}

#[derive(Clone, Debug)]
pub struct CharacterTable {
    classes: Arc<ClassData>,
    conductor: u32,
    prime: u64,
    degrees: Vec<u64>,
    values: Vec<Vec<Cyc>>,
    trivial: usize,
}

pub fn character_table(group: &Group, classes: &Arc<ClassData>) -> Result<CharacterTable, ChartabError> {
    let e = classes.exponent();
    let r = lifting_prime(classes.group_order(), e)?;
    character_table_with_prime(group, classes, r, DEFAULT_SEED)
}

/// Same computation with an explicit lifting prime and splitting seed.
pub fn character_table_with_prime(
    group: &Group,
    classes: &Arc<ClassData>,
    r: u64,
    seed: u64,
) -> Result<CharacterTable, ChartabError> {
    let order = classes.group_order();
    let e = classes.exponent();
    let k = classes.len();
    if r % e != 1 % e || !is_prime(r) || r <= 2 * ceil_sqrt(order) + 1 {
        return Err(ChartabError::Inconsistent(format!("{r} is not a valid lifting prime")));
    }
    let field = Arc::new(
        Field::new(r as u32, 1).map_err(|err| ChartabError::Inconsistent(err.to_string()))?,
    );
    let a = class_matrices(group, classes)?;
    let mats: Vec<Mat> = a
        .iter()
        .map(|ai| Mat::from_fn(&field, k, k, |j, l| field.from_int(ai[j][l] as i64)))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done: Vec<Vec<Elem>> = Vec::new();
    let mut stack = vec![full_space(&field, k)];
    let mut random_left = SPLIT_ATTEMPTS;
    while let Some(w) = stack.pop() {
        if w.len() == 1 {
            done.push(w.rows()[0].clone());
            continue;
        }
        let pieces = split(&field, &mats, &w, &mut rng, &mut random_left)?;
        stack.extend(pieces);
    }
    if done.len() != k {
        return Err(ChartabError::Inconsistent("eigenspace count".into()));
    }

    let sizes: Vec<Elem> = classes.sizes().iter().map(|&s| field.from_int(s as i64)).collect();
    let g_r = field.from_int(order as i64);
    let z_e = field
        .root_of_unity(e as u32)
        .ok_or_else(|| ChartabError::Inconsistent("no e-th root of unity mod r".into()))?;
    let mut rows: Vec<(u64, Vec<Cyc>)> = Vec::with_capacity(k);
    for v in done {
        let lead = field
            .inv(v[0])
            .ok_or_else(|| ChartabError::Inconsistent("eigenvector vanishes at identity".into()))?;
        let omega: Vec<Elem> = v.iter().map(|&x| field.mul(x, lead)).collect();
        let mut s = field.zero();
        for kk in 0..k {
            let t = field.mul(omega[kk], omega[classes.inverse_class(kk)]);
            s = field.add(s, field.div(t, sizes[kk]).expect("r does not divide |G|"));
        }
        let d2 = field
            .div(g_r, s)
            .ok_or_else(|| ChartabError::Inconsistent("degree sum vanishes mod r".into()))?;
        let d = (1..=isqrt(order))
            .find(|&d| order.is_multiple_of(d) && field.from_int((d * d) as i64) == d2)
            .ok_or_else(|| ChartabError::Inconsistent("no degree fits".into()))?;
        let d_r = field.from_int(d as i64);
        let theta: Vec<Elem> = (0..k)
            .map(|kk| field.div(field.mul(omega[kk], d_r), sizes[kk]).expect("unit"))
            .collect();
        let values = (0..k)
            .map(|kk| lift_value(&field, classes, &theta, kk, d, z_e))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push((d, values));
    }
    rows.sort();
    let degrees: Vec<u64> = rows.iter().map(|r| r.0).collect();
    let values: Vec<Vec<Cyc>> = rows.into_iter().map(|r| r.1).collect();
    let trivial = values
        .iter()
        .position(|row| row.iter().all(|v| v.as_integer() == Some(1)))
        .ok_or_else(|| ChartabError::Inconsistent("no trivial character".into()))?;
    let table = CharacterTable {
        classes: classes.clone(),
        conductor: e as u32,
        prime: r,
        degrees,
        values,
        trivial,
    };
    table.verify()?;
    Ok(table)
}

fn full_space(field: &Arc<Field>, k: usize) -> Echelon {
    let mut w = Echelon::new(field, k);
    for i in 0..k {
        let mut v = vec![field.zero(); k];
        v[i] = field.one();
        w.insert(&v);
    }
    w
}

/// Splits an invariant subspace into eigenspaces of some combination of the
/// class matrices; returns at least two pieces.
fn split(
    field: &Arc<Field>,
    mats: &[Mat],
    w: &Echelon,
    rng: &mut ChaCha8Rng,
    random_left: &mut usize,
) -> Result<Vec<Echelon>, ChartabError> {
    let k = mats.len();
    let mut candidates: Vec<Mat> = Vec::new();
    while *random_left > 0 {
        *random_left -= 1;
        let mut x = Mat::zeros(field, k, k);
        for m in mats {
            let c = field.from_int(rng.gen_range(0..field.order() as i64));
            x = x.add(&m.scale(c)).expect("square");
        }
        if let Some(p) = eigenspaces(field, &x, w)? {
            return Ok(p);
        }
    }
    candidates.extend(mats.iter().cloned());
    for x in candidates {
        if let Some(p) = eigenspaces(field, &x, w)? {
            return Ok(p);
        }
    }
    Err(ChartabError::EigensplitBudgetExceeded)
}

fn eigenspaces(field: &Arc<Field>, x: &Mat, w: &Echelon) -> Result<Option<Vec<Echelon>>, ChartabError> {
    let d = w.len();
    let basis = w.rows();
    let pivots = w.pivots();
    // x w_l = sum_m a[m][l] w_m
    let images: Vec<Vec<Elem>> = basis.iter().map(|b| x.mul_vec(b)).collect();
    let a = Mat::from_fn(field, d, d, |m, l| images[l][pivots[m]]);
    let factors = char_poly_factors(&a).expect("square");
    if factors.len() < 2 {
        return Ok(None);
    }
    let mut out = Vec::new();
    let mut total = 0;
    for (f, _) in factors {
        if f.degree() != Some(1) {
            return Err(ChartabError::Inconsistent("class algebra not split mod r".into()));
        }
        let lambda = field.neg(f.coeff(0));
        let ker = a.sub_scalar(lambda).kernel();
        total += ker.len();
        let mut piece = Echelon::new(field, w.ambient_dim());
        for c in ker {
            let mut v = vec![field.zero(); w.ambient_dim()];
            for (m, &cm) in c.iter().enumerate() {
                if cm.is_zero() {
                    continue;
                }
                for (vi, &bi) in v.iter_mut().zip(&basis[m]) {
                    *vi = field.add(*vi, field.mul(cm, bi));
                }
            }
            piece.insert(&v);
        }
        out.push(piece);
    }
    if total != d {
        return Err(ChartabError::Inconsistent("class matrix not diagonalisable mod r".into()));
    }
    Ok(Some(out))
}

/// `chi(g_k) = sum_s m_s zeta_n^s` with `n = o(g_k)` and
/// `m_s = n^-1 sum_j theta(g_k^j) zeta_n^(-js)` computed mod r.
fn lift_value(
    field: &Field,
    classes: &ClassData,
    theta: &[Elem],
    kk: usize,
    degree: u64,
    z_e: Elem,
) -> Result<Cyc, ChartabError> {
    let e = classes.exponent();
    let n = classes.rep_order(kk);
    let step = e / n;
    let z_n = field.pow(z_e, step);
    let z_inv = field.inv(z_n).expect("root of unity");
    let n_inv = field.inv(field.from_int(n as i64)).expect("n divides |G|, r does not");
    let vals: Vec<Elem> = (0..n).map(|j| theta[classes.power_map(j as i64)[kk]]).collect();
    let mut exps = vec![0i64; e as usize];
    for s in 0..n {
        let w = field.pow(z_inv, s);
        let mut acc = field.zero();
        let mut wj = field.one();
        for &v in &vals {
            acc = field.add(acc, field.mul(v, wj));
            wj = field.mul(wj, w);
        }
        let m = field.to_prime_int(field.mul(acc, n_inv)).expect("prime field") as u64;
        if m > degree {
            return Err(ChartabError::Inconsistent(format!(
                "eigenvalue multiplicity {m} exceeds degree {degree}"
            )));
        }
        exps[(s * step) as usize] = m as i64;
    }
    Ok(Cyc::from_exponents(e as u32, &exps))
}

impl CharacterTable {
    pub fn classes(&self) -> &Arc<ClassData> {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    /// The prime used for the modular eigenvector computation.
    pub fn lifting_prime(&self) -> u64 {
        self.prime
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    pub fn degree(&self, chi: usize) -> u64 {
        self.degrees[chi]
    }

    pub fn values(&self) -> &[Vec<Cyc>] {
        &self.values
    }

    pub fn row(&self, chi: usize) -> &[Cyc] {
        &self.values[chi]
    }

    pub fn value(&self, chi: usize, class: usize) -> &Cyc {
        &self.values[chi][class]
    }

    pub fn trivial(&self) -> usize {
        self.trivial
    }

    /// `omega_chi(K) = |K| chi(g_K) / chi(1)` per class.
    pub fn central_character(&self, chi: usize) -> Vec<Cyc> {
        let d = self.degrees[chi] as i64;
        self.values[chi]
            .iter()
            .zip(self.classes.sizes())
            .map(|(v, &s)| v.scale(s as i64, d))
            .collect()
    }

    /// `sum_k |K_k| a(g_k) conj(b(g_k)) / |G|`.
    pub fn inner_product(&self, a: &[Cyc], b: &[Cyc]) -> Cyc {
        let e = self.conductor;
        let mut acc = Cyc::zero(e);
        for (k, (x, y)) in a.iter().zip(b).enumerate() {
            let t = x.embed(e).mul(&y.embed(e).conj());
            acc = acc.add(&t.scale(self.classes.size(k) as i64, 1));
        }
        acc.scale(1, self.classes.group_order() as i64)
    }

    /// Both orthogonality relations and the degree-square sum, exactly.
    pub fn verify(&self) -> Result<(), ChartabError> {
        let k = self.len();
        let order = self.classes.group_order();
        if k != self.classes.len() {
            return Err(ChartabError::Inconsistent("table is not square".into()));
        }
        if self.degrees.iter().map(|d| d * d).sum::<u64>() != order {
            return Err(ChartabError::Inconsistent("degree squares do not sum to |G|".into()));
        }
        for a in 0..k {
            for b in a..k {
                let ip = self.inner_product(&self.values[a], &self.values[b]);
                let want = if a == b { 1 } else { 0 };
                if ip.as_integer() != Some(want) {
                    return Err(ChartabError::Inconsistent(format!(
                        "rows {a} and {b} are not orthonormal"
                    )));
                }
            }
        }
        let conj: Vec<Vec<Cyc>> = self
            .values
            .iter()
            .map(|row| row.iter().map(Cyc::conj).collect())
            .collect();
        for c1 in 0..k {
            for c2 in c1..k {
                let mut acc = Cyc::zero(self.conductor);
                for chi in 0..k {
                    acc = acc.add(&self.values[chi][c1].mul(&conj[chi][c2]));
                }
                let want = if c1 == c2 {
                    self.classes.centralizer_order(c1) as i128
                } else {
                    0
                };
                if acc.as_integer() != Some(want) {
                    return Err(ChartabError::Inconsistent(format!(
                        "columns {c1} and {c2} violate column orthogonality"
                    )));
                }
            }
        }
        Ok(())
    }

    /// One line per character: degree, then each value's power-basis
    /// coefficients.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (d, row) in self.degrees.iter().zip(&self.values) {
            let _ = write!(out, "{d}");
            for v in row {
                let cs: Vec<String> = v
                    .coeffs()
                    .into_iter()
                    .map(|(n, d)| if d == 1 { n.to_string() } else { format!("{n}/{d}") })
                    .collect();
                let _ = write!(out, " [{}]", cs.join(","));
            }
            out.push('\n');
        }
        out
    }
}

/// Class of `G` containing each class representative of the subgroup `N`.
pub fn fusion_map(
    g: &Group,
    g_classes: &ClassData,
    n: &Group,
    n_classes: &ClassData,
) -> Result<Vec<usize>, ChartabError> {
    let ge = g.enumeration()?;
    let ne = n.enumeration()?;
    n_classes
        .reps()
        .iter()
        .enumerate()
        .map(|(l, &rep)| {
            let x = ne.element(rep);
            let idx = ge.index_of(x).ok_or(ChartabError::FusionInconsistent { class: l })?;
            let c = g_classes.class_of(idx);
            if g_classes.rep_order(c) != n_classes.rep_order(l) {
                return Err(ChartabError::FusionInconsistent { class: l });
            }
            Ok(c)
        })
        .collect()
}

/// `m[chi][psi] = <chi|_N, psi>_N`.
pub fn restrict_fuse(
    tg: &CharacterTable,
    tn: &CharacterTable,
    fusion: &[usize],
) -> Result<Vec<Vec<u64>>, ChartabError> {
    let nc = tn.classes();
    if fusion.len() != nc.len() {
        return Err(ChartabError::FusionInconsistent { class: fusion.len().min(nc.len()) });
    }
    for (l, &c) in fusion.iter().enumerate() {
        if c >= tg.classes().len() || tg.classes().rep_order(c) != nc.rep_order(l) {
            return Err(ChartabError::FusionInconsistent { class: l });
        }
    }
    let e = tg.conductor();
    if !e.is_multiple_of(tn.conductor()) {
        return Err(ChartabError::Inconsistent("subgroup conductor does not divide".into()));
    }
    let mut out = Vec::with_capacity(tg.len());
    for chi in 0..tg.len() {
        let res: Vec<Cyc> = fusion.iter().map(|&c| tg.value(chi, c).clone()).collect();
        let mut row = Vec::with_capacity(tn.len());
        for psi in 0..tn.len() {
            let psi_row: Vec<Cyc> = tn.row(psi).iter().map(|v| v.embed(e)).collect();
            let mut acc = Cyc::zero(e);
            for (l, (x, y)) in res.iter().zip(&psi_row).enumerate() {
                acc = acc.add(&x.mul(&y.conj()).scale(nc.size(l) as i64, 1));
            }
            let m = acc.scale(1, nc.group_order() as i64);
            match m.as_integer() {
                Some(v) if v >= 0 => row.push(v as u64),
                _ => {
                    return Err(ChartabError::Inconsistent(format!(
                        "restriction multiplicity {m} is not a natural number"
                    )))
                }
            }
        }
        let deg: u64 = row.iter().zip(tn.degrees()).map(|(m, d)| m * d).sum();
        if deg != tg.degree(chi) {
            return Err(ChartabError::Inconsistent("restriction loses degree".into()));
        }
        out.push(row);
    }
    Ok(out)
}
