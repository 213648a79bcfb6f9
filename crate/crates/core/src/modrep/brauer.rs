use std::collections::HashSet;
use std::sync::Arc;

use super::meataxe::{chop, module_iso};
use super::module::GModule;
use super::ModrepError;
use crate::classes::ClassData;
use crate::cyc::Cyc;
use crate::group::Group;
use crate::mat::Mat;
use crate::reduction::Correspondence;

/// Tensor products beyond this dimension are not chopped.
pub const MAX_TENSOR_DIM: usize = 1024;

/// Brauer character of `s` on the given p-regular classes:
/// `sum_lambda dim ker(rho(g) - lambda) * lift(lambda)` over the `o(g)`-th
/// roots of unity `lambda` in the field.
pub fn brauer_character(
    s: &GModule,
    group: &Group,
    classes: &ClassData,
    regular: &[usize],
    corr: &Correspondence,
) -> Result<Vec<Cyc>, ModrepError> {
    let e1 = corr.e_prime();
    regular
        .iter()
        .map(|&k| {
            let n = classes.rep_order(k);
            if !e1.is_multiple_of(n) {
                return Err(ModrepError::NotSemisimpleElement { class: k });
            }
            let step = e1 / n;
            let rho = s.element_matrix(group, classes.rep(k))?;
            let mut exps = vec![0i64; e1 as usize];
            let mut total = 0;
            for j in 0..n {
                let lambda = corr.eigenvalue(j * step);
                let mult = rho.sub_scalar(lambda).nullity();
                exps[(j * step) as usize] = mult as i64;
                total += mult;
            }
            if total != s.dim() {
                return Err(ModrepError::NotSemisimpleElement { class: k });
            }
            Ok(Cyc::from_exponents(e1 as u32, &exps))
        })
        .collect()
}

/// Simple modules and their Brauer characters on the p-regular classes.
#[derive(Clone, Debug)]
pub struct BrauerTable {
    corr: Arc<Correspondence>,
    regular: Vec<usize>,
    modules: Vec<GModule>,
    values: Vec<Vec<Cyc>>,
    degrees: Vec<u64>,
}

impl BrauerTable {
    pub fn correspondence(&self) -> &Arc<Correspondence> {
        &self.corr
    }

    /// p-regular class indices, in increasing order; columns of the table.
    pub fn regular_classes(&self) -> &[usize] {
        &self.regular
    }

    pub fn modules(&self) -> &[GModule] {
        &self.modules
    }

    pub fn len(&self) -> usize {
        self.modules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modules.is_empty()
    }

    pub fn values(&self) -> &[Vec<Cyc>] {
        &self.values
    }

    pub fn row(&self, phi: usize) -> &[Cyc] {
        &self.values[phi]
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    /// The reduced value matrix has full rank over the splitting field.
    /// Also checks that each reduced value is the trace of the element.
    fn verify(&self, group: &Group, classes: &ClassData) -> Result<(), ModrepError> {
        let l = self.len();
        if l != self.regular.len() {
            return Err(ModrepError::Inconsistent("Brauer table is not square".into()));
        }
        let f = self.corr.field();
        let mut rows = Vec::with_capacity(l);
        for (m, vals) in self.modules.iter().zip(&self.values) {
            let red = self
                .corr
                .reduce_all(vals)
                .ok_or_else(|| ModrepError::Inconsistent("Brauer value not integral".into()))?;
            for (&k, &x) in self.regular.iter().zip(&red) {
                if m.element_matrix(group, classes.rep(k))?.trace() != x {
                    return Err(ModrepError::Inconsistent(format!(
                        "Brauer value at class {k} does not reduce to the trace"
                    )));
                }
            }
            rows.push(red);
        }
        if Mat::from_rows(f, &rows).rank() != l {
            return Err(ModrepError::Inconsistent("Brauer characters are dependent".into()));
        }
        Ok(())
    }
}

/// Chops the natural permutation module, adds duals, then chops tensor
/// products of known simples (smallest first) until there are as many
/// simples as p-regular classes. Sorted by dimension, then Brauer values.
pub fn all_simples(
    group: &Group,
    classes: &ClassData,
    corr: &Arc<Correspondence>,
    seed: u64,
) -> Result<BrauerTable, ModrepError> {
    let p = corr.prime();
    let regular = classes.p_regular(p);
    let target = regular.len();
    let f = corr.field();
    let mut simples: Vec<GModule> = Vec::new();
    let add = |simples: &mut Vec<GModule>, m: GModule| -> Result<bool, ModrepError> {
        for s in simples.iter() {
            if module_iso(s, &m, seed)? {
                return Ok(false);
            }
        }
        simples.push(m);
        Ok(true)
    };
    let absorb = |simples: &mut Vec<GModule>, m: &GModule| -> Result<(), ModrepError> {
        for (s, _) in chop(m, seed)? {
            let d = s.dual();
            add(simples, s)?;
            add(simples, d)?;
        }
        Ok(())
    };
    absorb(&mut simples, &GModule::permutation(f, group))?;
    if simples.iter().all(|s| !s.is_trivial()) {
        add(&mut simples, GModule::trivial(f, group.generators().len()))?;
    }
    let mut tried: HashSet<(usize, usize)> = HashSet::new();
    while simples.len() < target {
        let next = (0..simples.len())
            .flat_map(|i| (i..simples.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| !simples[i].is_trivial() && !simples[j].is_trivial())
            .filter(|pair| !tried.contains(pair))
            .filter(|&(i, j)| simples[i].dim() * simples[j].dim() <= MAX_TENSOR_DIM)
            .min_by_key(|&(i, j)| (simples[i].dim() * simples[j].dim(), i, j));
        let Some((i, j)) = next else {
            let mut dims: Vec<usize> = simples.iter().map(GModule::dim).collect();
            dims.sort();
            return Err(ModrepError::ClosureStalled {
                found: simples.len(),
                target,
                dims,
            });
        };
        tried.insert((i, j));
        let t = simples[i].tensor(&simples[j]);
        absorb(&mut simples, &t)?;
    }
    if simples.len() > target {
        return Err(ModrepError::Inconsistent(format!(
            "{} simple modules but only {target} p-regular classes",
            simples.len()
        )));
    }
    let mut rows: Vec<(u64, Vec<Cyc>, GModule)> = simples
        .into_iter()
        .map(|s| {
            let v = brauer_character(&s, group, classes, &regular, corr)?;
            Ok((s.dim() as u64, v, s))
        })
        .collect::<Result<_, ModrepError>>()?;
    rows.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    let table = BrauerTable {
        corr: corr.clone(),
        regular,
        degrees: rows.iter().map(|r| r.0).collect(),
        values: rows.iter().map(|r| r.1.clone()).collect(),
        modules: rows.into_iter().map(|r| r.2).collect(),
    };
    table.verify(group, classes)?;
    Ok(table)
}
