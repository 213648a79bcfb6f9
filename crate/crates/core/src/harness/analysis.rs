use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;

use super::{HarnessError, StageError};
use crate::blocks::{
    block_distribution, block_records, check_conjectures, check_record, BlockInputs, BlockRecord, ConjectureVerdict,
    Distribution,
};
use crate::chartab::{character_table_with_prime, class_matrices, lifting_prime, CharacterTable};
use crate::classes::ClassData;
use crate::group::Group;
use crate::modrep::{all_simples, decomposition_and_cartan, BrauerTable, CartanMatrix, DecompositionMatrix};
use crate::reduction::Correspondence;

/// Everything computed for one group at one prime.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub name: String,
    pub prime: u64,
    pub group: Group,
    pub classes: Arc<ClassData>,
    pub table: CharacterTable,
    pub corr: Arc<Correspondence>,
    pub class_mats: Vec<Vec<Vec<u64>>>,
    pub distribution: Distribution,
    pub brauer: BrauerTable,
    pub decomposition: DecompositionMatrix,
    pub cartan: CartanMatrix,
    pub records: Vec<BlockRecord>,
    pub verdicts: Vec<ConjectureVerdict>,
}

impl Analysis {
    pub fn order(&self) -> u64 {
        self.classes.group_order()
    }

    pub fn record(&self, block: usize) -> &BlockRecord {
        &self.records[block]
    }
}

fn stage<T, E: Into<StageError>>(name: &str, prime: u64, what: &'static str, r: Result<T, E>) -> Result<T, HarnessError> {
    r.map_err(|e| HarnessError::Stage {
        group: name.to_string(),
        prime,
        stage: what,
        source: Box::new(e.into()),
    })
}

/// Runs the full pipeline with a correspondence built for `group` itself.
pub fn run_group_analysis(name: &str, group: &Group, p: u64, seed: u64) -> Result<Analysis, HarnessError> {
    let classes = stage(name, p, "classes", ClassData::new(group))?;
    let corr = stage(name, p, "field", Correspondence::new(classes.exponent(), p))?;
    analyze_with(name, group, Arc::new(classes), &Arc::new(corr), seed)
}

/// Runs the pipeline reducing through a caller-supplied correspondence
/// whose exponent is a multiple of the exponent of `group`. Subgroups and
/// quotients analysed this way lift Brauer characters compatibly with the
/// parent group.
pub fn run_group_analysis_in(
    name: &str,
    group: &Group,
    corr: &Arc<Correspondence>,
    seed: u64,
) -> Result<Analysis, HarnessError> {
    let p = corr.prime();
    let classes = stage(name, p, "classes", ClassData::new(group))?;
    if !corr.exponent().is_multiple_of(classes.exponent()) {
        return Err(HarnessError::Stage {
            group: name.to_string(),
            prime: p,
            stage: "field",
            source: Box::new(StageError::Invariant(format!(
                "exponent {} does not divide {}",
                classes.exponent(),
                corr.exponent()
            ))),
        });
    }
    analyze_with(name, group, Arc::new(classes), corr, seed)
}

fn analyze_with(
    name: &str,
    group: &Group,
    classes: Arc<ClassData>,
    corr: &Arc<Correspondence>,
    seed: u64,
) -> Result<Analysis, HarnessError> {
    let p = corr.prime();
    let r = stage(name, p, "chartab", lifting_prime(classes.group_order(), classes.exponent()))?;
    let table = stage(name, p, "chartab", character_table_with_prime(group, &classes, r, seed))?;
    stage(name, p, "chartab", table.verify())?;
    let class_mats = stage(name, p, "class matrices", class_matrices(group, &classes))?;
    let distribution = stage(name, p, "blocks", block_distribution(&table, corr, &class_mats))?;
    let brauer = stage(name, p, "simples", all_simples(group, &classes, corr, seed))?;
    let (decomposition, cartan) = stage(name, p, "decomposition", decomposition_and_cartan(&table, &brauer))?;
    if rational_rank(&decomposition.entries) != decomposition.cols() {
        return Err(HarnessError::Stage {
            group: name.to_string(),
            prime: p,
            stage: "decomposition",
            source: Box::new(StageError::Invariant("decomposition matrix lacks full column rank".into())),
        });
    }
    let records = stage(
        name,
        p,
        "records",
        block_records(&BlockInputs {
            group,
            classes: &classes,
            table: &table,
            brauer: &brauer,
            decomposition: &decomposition,
            cartan: &cartan,
            distribution: &distribution,
        }),
    )?;
    let verdicts = records.iter().map(|r| check_conjectures(r, p)).collect();
    let a = Analysis {
        name: name.to_string(),
        prime: p,
        group: group.clone(),
        classes,
        table,
        corr: corr.clone(),
        class_mats,
        distribution,
        brauer,
        decomposition,
        cartan,
        records,
        verdicts,
    };
    stage(name, p, "invariants", reassert(&a))?;
    Ok(a)
}

/// Re-checks the per-block invariants and the partition totals.
pub fn reassert(a: &Analysis) -> Result<(), StageError> {
    for r in &a.records {
        check_record(r, a.prime)?;
    }
    let fail = |what: String| Err(StageError::Invariant(what));
    let irr: usize = a.records.iter().map(|r| r.irr.len()).sum();
    if irr != a.table.len() {
        return fail(format!("blocks hold {irr} of {} ordinary characters", a.table.len()));
    }
    let ibr: usize = a.records.iter().map(|r| r.l()).sum();
    let regular = a.classes.p_regular(a.prime).len();
    if ibr != regular {
        return fail(format!("blocks hold {ibr} Brauer characters, {regular} p-regular classes"));
    }
    let dim: u64 = a.records.iter().map(|r| r.dim).sum();
    if dim != a.order() {
        return fail(format!("block dimensions sum to {dim}, not {}", a.order()));
    }
    if !a.records.first().is_some_and(|r| r.irr.contains(&a.table.trivial())) {
        return fail("first block does not contain the trivial character".into());
    }
    Ok(())
}

/// Rank over Q.
pub fn rational_rank(m: &[Vec<u64>]) -> usize {
    let mut rows: Vec<Vec<BigRational>> = m
        .iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
        .collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, piv);
        let pivot = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            if row[c].is_zero() {
                continue;
            }
            let f = &row[c] / &pivot[c];
            for (x, y) in row.iter_mut().zip(&pivot) {
                *x = &*x - &f * y;
            }
        }
        rank += 1;
    }
    rank
}
