use num_traits::Signed;
use serde::Serialize;

use super::analysis::{run_group_analysis, run_group_analysis_in, Analysis};
use super::corpus::{Corpus, LemmaBinding, LemmaKind, Selector};
use super::{HarnessError, StageError};
use crate::blocks::{block_covering, block_induction, format_fraction, Fraction, Induced};
use crate::chartab::{fusion_map, restrict_fuse};
use crate::cyc::Cyc;
use crate::group::Group;
use crate::modrep::decompose;
use crate::perm::Perm;
use crate::psub::p_valuation;

/// One identity or inequality measured on computed data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaCheck {
    pub what: String,
    pub lhs: String,
    pub relation: &'static str,
    pub rhs: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaOutcome {
    pub lemma: LemmaKind,
    pub group: String,
    pub subgroup: String,
    pub prime: u64,
    pub passed: bool,
    pub checks: Vec<LemmaCheck>,
    /// Hard error, or unsatisfiable hypotheses.
    pub error: Option<String>,
    pub configuration_error: bool,
}

impl LemmaOutcome {
    pub fn from_error(b: &LemmaBinding, e: &HarnessError) -> LemmaOutcome {
        LemmaOutcome {
            lemma: b.lemma,
            group: b.group.clone(),
            subgroup: b.subgroup.clone(),
            prime: b.prime,
            passed: false,
            checks: Vec::new(),
            error: Some(e.to_string()),
            configuration_error: matches!(e, HarnessError::BindingUnsatisfiable { .. }),
        }
    }
}

struct Ctx<'a> {
    binding: &'a LemmaBinding,
    seed: u64,
    g: Analysis,
    n: Analysis,
    checks: Vec<LemmaCheck>,
}

impl Ctx<'_> {
    fn unsat(&self, reason: impl Into<String>) -> HarnessError {
        HarnessError::BindingUnsatisfiable {
            lemma: self.binding.lemma.to_string(),
            group: self.binding.group.clone(),
            subgroup: self.binding.subgroup.clone(),
            reason: reason.into(),
        }
    }

    fn fail(&self, e: impl Into<StageError>) -> HarnessError {
        HarnessError::Lemma {
            lemma: self.binding.lemma.to_string(),
            group: self.binding.group.clone(),
            subgroup: self.binding.subgroup.clone(),
            source: Box::new(e.into()),
        }
    }

    fn check(&mut self, what: String, lhs: String, relation: &'static str, rhs: String, holds: bool) {
        self.checks.push(LemmaCheck {
            what,
            lhs,
            relation,
            rhs,
            holds,
        });
    }

    fn index(&self) -> u64 {
        self.g.order() / self.n.order()
    }

    fn p(&self) -> u64 {
        self.binding.prime
    }

    /// Analysis of another subgroup or quotient in the same embedding.
    fn sub(&self, name: String, h: &Group) -> Result<Analysis, HarnessError> {
        run_group_analysis_in(&name, h, &self.g.corr, self.seed)
    }
}

/// Classes of `sub` covered by each block of `big`.
fn covering(big: &Analysis, sub: &Analysis) -> Result<(Vec<usize>, Vec<Vec<usize>>), StageError> {
    let fusion = fusion_map(&big.group, &big.classes, &sub.group, &sub.classes)?;
    let m = restrict_fuse(&big.table, &sub.table, &fusion)?;
    let cov = block_covering(&big.distribution, &sub.distribution, &m)?;
    Ok((fusion, cov))
}

/// Image of each class of the normal subgroup `n` under conjugation by `g`.
fn class_action(n: &Analysis, g: &Perm) -> Result<Vec<usize>, StageError> {
    let en = n.group.enumeration()?;
    n.classes
        .reps()
        .iter()
        .map(|&r| {
            en.index_of(&en.element(r).conjugate_by(g))
                .map(|i| n.classes.class_of(i))
                .ok_or_else(|| StageError::Invariant("subgroup is not normal".into()))
        })
        .collect()
}

fn position(xs: &[usize], x: usize) -> Result<usize, StageError> {
    xs.iter()
        .position(|&y| y == x)
        .ok_or_else(|| StageError::Invariant(format!("class {x} is not p-regular")))
}

fn ratio(tau: Fraction, p: u64, s: u32, order: u64) -> Fraction {
    tau / Fraction::from_integer(p.pow(s) * order)
}

fn matrix(m: &[Vec<u64>]) -> String {
    let rows: Vec<String> = m
        .iter()
        .map(|r| format!("[{}]", r.iter().map(u64::to_string).collect::<Vec<_>>().join(",")))
        .collect();
    format!("[{}]", rows.join(","))
}

/// Runs the checks for one binding.
pub fn lemma_suite(corpus: &Corpus, binding: &LemmaBinding, seed: u64) -> Result<LemmaOutcome, HarnessError> {
    let entry = corpus
        .entry(&binding.group)
        .ok_or_else(|| HarnessError::Corpus(format!("unknown group {}", binding.group)))?;
    let ns = corpus
        .normal_subgroup(&binding.subgroup)
        .ok_or_else(|| HarnessError::Corpus(format!("unknown subgroup {}", binding.subgroup)))?;
    let g = entry.group()?;
    let n = ns.group(g.degree())?;
    let ga = run_group_analysis(&entry.name, &g, binding.prime, seed)?;
    let na = run_group_analysis_in(&ns.name, &n, &ga.corr, seed)?;
    let mut ctx = Ctx {
        binding,
        seed,
        g: ga,
        n: na,
        checks: Vec::new(),
    };
    match binding.lemma {
        LemmaKind::Stabilizer => stabilizer(&mut ctx)?,
        LemmaKind::CentralQuotient => central_quotient(&mut ctx)?,
        LemmaKind::DegreeSum => degree_sum(&mut ctx)?,
        LemmaKind::PPrimeIndex => pprime_index(&mut ctx)?,
        LemmaKind::PExtension => p_extension(&mut ctx)?,
    }
    let passed = !ctx.checks.is_empty() && ctx.checks.iter().all(|c| c.holds);
    Ok(LemmaOutcome {
        lemma: binding.lemma,
        group: binding.group.clone(),
        subgroup: binding.subgroup.clone(),
        prime: binding.prime,
        passed,
        checks: ctx.checks,
        error: None,
        configuration_error: false,
    })
}

/// For each block `c` of `N` (or the selected one) and each block `b` of
/// `G` covering it: exactly one block of the stabiliser of `c` covers `c`
/// and induces to `b`, and it has the same `tau`.
fn stabilizer(ctx: &mut Ctx<'_>) -> Result<(), HarnessError> {
    let cells: Vec<usize> = match &ctx.binding.character {
        None => (0..ctx.n.records.len()).collect(),
        Some(Selector::Index(i)) if *i < ctx.n.table.len() => vec![ctx.n.distribution.block_of[*i]],
        Some(Selector::Index(i)) => return Err(ctx.unsat(format!("no character {i}"))),
        Some(Selector::Named(_)) => vec![ctx.n.distribution.block_of[ctx.n.table.trivial()]],
    };
    let (_, cov_g) = covering(&ctx.g, &ctx.n).map_err(|e| ctx.fail(e))?;
    let elements = ctx.g.group.enumeration().map_err(|e| ctx.fail(e))?.elements().to_vec();
    for c in cells {
        let lam = &ctx.n.distribution.lambda[c];
        let mut stab = Vec::new();
        for x in &elements {
            let act = class_action(&ctx.n, x).map_err(|e| ctx.fail(e))?;
            if act.iter().enumerate().all(|(l, &m)| lam[m] == lam[l]) {
                stab.push(x.clone());
            }
        }
        let h = ctx.g.group.subgroup(&stab);
        let ha = ctx.sub(format!("stab of block {c}"), &h)?;
        let (_, cov_h) = covering(&ha, &ctx.n).map_err(|e| ctx.fail(e))?;
        let fusion_hg = fusion_map(&ctx.g.group, &ctx.g.classes, &ha.group, &ha.classes).map_err(|e| ctx.fail(e))?;
        let mut induced = Vec::new();
        for (bh, cell) in ha.distribution.cells.iter().enumerate() {
            if !cov_h[bh].contains(&c) {
                continue;
            }
            let omega = ha.table.central_character(cell[0]);
            let lam_hat = ctx
                .g
                .corr
                .reduce_all(&omega)
                .ok_or_else(|| ctx.fail(StageError::Invariant("central character does not reduce".into())))?;
            let ind = block_induction(&lam_hat, &fusion_hg, &ctx.g.distribution, &ctx.g.corr).map_err(|e| ctx.fail(e))?;
            induced.push((bh, ind));
        }
        for (b, covered) in cov_g.iter().enumerate() {
            if !covered.contains(&c) {
                continue;
            }
            let hats: Vec<usize> = induced
                .iter()
                .filter(|(_, ind)| *ind == Induced::Block(b))
                .map(|&(bh, _)| bh)
                .collect();
            ctx.check(
                format!("blocks of the stabiliser (order {}) of c{c} covering it and inducing to b{b}", h.order()),
                hats.len().to_string(),
                "=",
                "1".into(),
                hats.len() == 1,
            );
            if let [bh] = hats[..] {
                let (t, th) = (ctx.g.records[b].tau, ha.records[bh].tau);
                ctx.check(
                    format!("tau(b{b}) = tau(b_hat{bh}) over c{c}"),
                    format_fraction(&t),
                    "=",
                    format_fraction(&th),
                    t == th,
                );
            }
        }
    }
    Ok(())
}

/// `N` central p-subgroup: Cartan doubling and the ratio inequality for
/// each block of `G/N` and the block of `G` dominating it.
fn central_quotient(ctx: &mut Ctx<'_>) -> Result<(), HarnessError> {
    let p = ctx.p();
    let n_order = ctx.n.order();
    if p.pow(p_valuation(n_order as u128, p)) != n_order {
        return Err(ctx.unsat(format!("|N| = {n_order} is not a power of {p}")));
    }
    let central = ctx.n.group.generators().iter().all(|z| {
        ctx.g
            .group
            .generators()
            .iter()
            .all(|g| z.mul(g) == g.mul(z))
    });
    if !central {
        return Err(ctx.unsat("N is not central"));
    }
    let q = ctx.g.group.coset_action(&ctx.n.group).map_err(|e| ctx.fail(e))?;
    let qa = ctx.sub(format!("{}/{}", ctx.binding.group, ctx.binding.subgroup), &q.group)?;
    let e = ctx.g.table.conductor();
    let img: Vec<usize> = (0..ctx.g.classes.len())
        .map(|k| qa.classes.class_of(q.images[ctx.g.classes.rep(k)]))
        .collect();

    let mut irr = Vec::new();
    for chi in 0..qa.table.len() {
        let row: Vec<Cyc> = img.iter().map(|&c| qa.table.value(chi, c).embed(e)).collect();
        let hit = (0..ctx.g.table.len())
            .find(|&x| ctx.g.table.row(x).iter().map(|v| v.embed(e)).eq(row.iter().cloned()))
            .ok_or_else(|| ctx.fail(StageError::Invariant(format!("character {chi} does not inflate"))))?;
        irr.push(hit);
    }
    let reg_g = ctx.g.brauer.regular_classes().to_vec();
    let reg_q = qa.brauer.regular_classes().to_vec();
    let cols: Vec<usize> = reg_g
        .iter()
        .map(|&k| position(&reg_q, img[k]))
        .collect::<Result<_, _>>()
        .map_err(|e| ctx.fail(e))?;
    let mut ibr = Vec::new();
    for phi in 0..qa.brauer.len() {
        let row: Vec<Cyc> = cols.iter().map(|&c| qa.brauer.row(phi)[c].clone()).collect();
        let hit = (0..ctx.g.brauer.len())
            .find(|&x| ctx.g.brauer.row(x) == row.as_slice())
            .ok_or_else(|| ctx.fail(StageError::Invariant(format!("Brauer character {phi} does not inflate"))))?;
        ibr.push(hit);
    }

    for (bb, rec_bar) in qa.records.iter().enumerate() {
        let b = ctx.g.distribution.block_of[irr[rec_bar.irr[0]]];
        if rec_bar.irr.iter().any(|&x| ctx.g.distribution.block_of[irr[x]] != b) {
            return Err(ctx.fail(StageError::Invariant(format!("block {bb} of G/N splits in G"))));
        }
        let rec = ctx.g.records[b].clone();
        let mut mapped: Vec<usize> = rec_bar.ibr.iter().map(|&x| ibr[x]).collect();
        let scaled: Vec<Vec<u64>> = rec_bar.cartan.iter().map(|r| r.iter().map(|x| x * n_order).collect()).collect();
        let lifted: Vec<Vec<u64>> = ctx.g.cartan.submatrix(&mapped);
        mapped.sort_unstable();
        ctx.check(
            format!("IBr(b{b}) = IBr(b_bar{bb})"),
            format!("{:?}", rec.ibr),
            "=",
            format!("{mapped:?}"),
            rec.ibr == mapped,
        );
        ctx.check(
            format!("C_b{b} = |N| C_b_bar{bb}"),
            matrix(&lifted),
            "=",
            matrix(&scaled),
            lifted == scaled,
        );
        ctx.check(
            format!("|P(b{b})| = |N| |P(b_bar{bb})|"),
            rec.defect_group_order.to_string(),
            "=",
            (n_order * rec_bar.defect_group_order).to_string(),
            rec.defect_group_order == n_order * rec_bar.defect_group_order,
        );
        let lhs = ratio(rec.tau, p, rec.sectional_rank, rec.defect_group_order);
        let rhs = ratio(rec_bar.tau, p, rec_bar.sectional_rank, rec_bar.defect_group_order);
        ctx.check(
            format!("tau(b{b})/(p^s|P|) <= tau(b_bar{bb})/(p^s|P/N|)"),
            format_fraction(&lhs),
            "<=",
            format_fraction(&rhs),
            lhs <= rhs,
        );
    }
    Ok(())
}

fn require_pprime_index(ctx: &Ctx<'_>) -> Result<(), HarnessError> {
    if ctx.index().is_multiple_of(ctx.p()) {
        return Err(ctx.unsat(format!("|G:N| = {} is divisible by {}", ctx.index(), ctx.p())));
    }
    Ok(())
}

/// `G/N` a p'-group: `sum_{chi in IBr(G|phi)} chi(1)^2 = |G:G_phi| |G:N| phi(1)^2`.
fn degree_sum(ctx: &mut Ctx<'_>) -> Result<(), HarnessError> {
    require_pprime_index(ctx)?;
    let fusion = fusion_map(&ctx.g.group, &ctx.g.classes, &ctx.n.group, &ctx.n.classes).map_err(|e| ctx.fail(e))?;
    let reg_g = ctx.g.brauer.regular_classes().to_vec();
    let reg_n = ctx.n.brauer.regular_classes().to_vec();
    let cols: Vec<usize> = reg_n
        .iter()
        .map(|&l| position(&reg_g, fusion[l]))
        .collect::<Result<_, _>>()
        .map_err(|e| ctx.fail(e))?;
    let restricted: Vec<Vec<Cyc>> = (0..ctx.g.brauer.len())
        .map(|x| cols.iter().map(|&c| ctx.g.brauer.row(x)[c].clone()).collect())
        .collect();
    let big = ctx.g.corr.exponent() as u32;
    let sol = decompose(ctx.n.brauer.values(), &restricted, big)
        .ok_or_else(|| ctx.fail(StageError::Invariant("restriction leaves the span of IBr(N)".into())))?;
    let mut mult = vec![vec![0u64; ctx.n.brauer.len()]; ctx.g.brauer.len()];
    for (x, row) in sol.iter().enumerate() {
        for (y, v) in row.iter().enumerate() {
            let ok = v.is_integer() && !v.is_negative();
            let m = ok.then(|| u64::try_from(v.to_integer()).ok()).flatten();
            mult[x][y] = m.ok_or_else(|| {
                ctx.fail(StageError::Invariant(format!("restriction of Brauer character {x} is not natural")))
            })?;
        }
    }

    let phis: Vec<usize> = match &ctx.binding.character {
        None => (0..ctx.n.brauer.len()).collect(),
        Some(Selector::Index(i)) if *i < ctx.n.brauer.len() => vec![*i],
        Some(Selector::Index(i)) => return Err(ctx.unsat(format!("no Brauer character {i}"))),
        Some(Selector::Named(_)) => vec![ctx
            .n
            .brauer
            .modules()
            .iter()
            .position(|m| m.is_trivial())
            .ok_or_else(|| ctx.fail(StageError::Invariant("no trivial Brauer character".into())))?],
    };
    let actions: Vec<Vec<usize>> = ctx
        .g
        .group
        .generators()
        .iter()
        .map(|g| class_action(&ctx.n, g))
        .collect::<Result<_, _>>()
        .map_err(|e| ctx.fail(e))?;
    for phi in phis {
        let mut orbit = vec![phi];
        let mut head = 0;
        while head < orbit.len() {
            let row = ctx.n.brauer.row(orbit[head]);
            for act in &actions {
                let moved: Vec<Cyc> = reg_n
                    .iter()
                    .map(|&l| position(&reg_n, act[l]).map(|c| row[c].clone()))
                    .collect::<Result<_, _>>()
                    .map_err(|e| ctx.fail(e))?;
                let y = (0..ctx.n.brauer.len())
                    .find(|&y| ctx.n.brauer.row(y) == moved.as_slice())
                    .ok_or_else(|| ctx.fail(StageError::Invariant("conjugate is not a Brauer character".into())))?;
                if !orbit.contains(&y) {
                    orbit.push(y);
                }
            }
            head += 1;
        }
        let deg = ctx.n.brauer.degrees()[phi];
        let lhs: u64 = (0..ctx.g.brauer.len())
            .filter(|&x| mult[x][phi] > 0)
            .map(|x| ctx.g.brauer.degrees()[x].pow(2))
            .sum();
        let rhs = orbit.len() as u64 * ctx.index() * deg * deg;
        ctx.check(
            format!("sum over IBr(G|phi{phi}) of chi(1)^2 = |G:G_phi| |G:N| phi(1)^2"),
            lhs.to_string(),
            "=",
            format!("{} * {} * {}", orbit.len(), ctx.index(), deg * deg),
            lhs == rhs,
        );
    }
    Ok(())
}

/// `G/N` a p'-group: `tau(b) = tau(c)` whenever `b` covers `c`.
fn pprime_index(ctx: &mut Ctx<'_>) -> Result<(), HarnessError> {
    require_pprime_index(ctx)?;
    let (_, cov) = covering(&ctx.g, &ctx.n).map_err(|e| ctx.fail(e))?;
    for (b, cs) in cov.iter().enumerate() {
        for &c in cs {
            let (t, tc) = (ctx.g.records[b].tau, ctx.n.records[c].tau);
            ctx.check(
                format!("tau(b{b}) = tau(c{c})"),
                format_fraction(&t),
                "=",
                format_fraction(&tc),
                t == tc,
            );
        }
    }
    Ok(())
}

/// Blocks with `G = PN`: the ratio inequality against each covered block.
fn p_extension(ctx: &mut Ctx<'_>) -> Result<(), HarnessError> {
    let p = ctx.p();
    let (_, cov) = covering(&ctx.g, &ctx.n).map_err(|e| ctx.fail(e))?;
    let degree = ctx.g.group.degree();
    let mut applicable = 0;
    for (b, rec) in ctx.g.records.clone().iter().enumerate() {
        let gens: Vec<Perm> = rec
            .defect_group
            .generators
            .iter()
            .map(|im| Perm::from_images_1based(im))
            .collect::<Option<_>>()
            .ok_or_else(|| ctx.fail(StageError::Invariant("bad defect group generator".into())))?;
        let pg = Group::new(degree, gens);
        let pe = pg.enumeration().map_err(|e| ctx.fail(e))?;
        let meet = pe.elements().iter().filter(|x| ctx.n.group.contains(x)).count() as u64;
        let order = rec.defect_group_order;
        if order * ctx.n.order() != ctx.g.order() * meet {
            continue;
        }
        applicable += 1;
        for &c in &cov[b] {
            let rc = ctx.n.records[c].clone();
            ctx.check(
                format!("|P(b{b}) meet N| = |P(c{c})|"),
                meet.to_string(),
                "=",
                rc.defect_group_order.to_string(),
                meet == rc.defect_group_order,
            );
            let lhs = ratio(rec.tau, p, rec.sectional_rank, order);
            let rhs = ratio(rc.tau, p, rc.sectional_rank, meet);
            ctx.check(
                format!("tau(b{b})/(p^s|P|) <= tau(c{c})/(p^s|P meet N|)"),
                format_fraction(&lhs),
                "<=",
                format_fraction(&rhs),
                lhs <= rhs,
            );
        }
    }
    if applicable == 0 {
        return Err(ctx.unsat("no block has G = PN"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(lemma: LemmaKind, group: &str, sub: &str, prime: u64, character: Option<Selector>) -> LemmaOutcome {
        let c = Corpus::default_corpus();
        let b = LemmaBinding {
            lemma,
            group: group.into(),
            subgroup: sub.into(),
            prime,
            character,
        };
        lemma_suite(&c, &b, 5).unwrap()
    }

    fn find<'a>(o: &'a LemmaOutcome, prefix: &str) -> Vec<&'a LemmaCheck> {
        o.checks.iter().filter(|c| c.what.starts_with(prefix)).collect()
    }

    #[test]
    fn stabilizer_on_s3() {
        let o = run(LemmaKind::Stabilizer, "S3", "C3", 2, None);
        assert!(o.passed, "{o:#?}");
        // the degree-2 block lies over the non-trivial blocks of C3
        let taus: Vec<(String, String)> = find(&o, "tau")
            .iter()
            .map(|c| (c.lhs.clone(), c.rhs.clone()))
            .collect();
        assert!(taus.contains(&("1/1".into(), "1/1".into())));
    }

    #[test]
    fn central_quotient_on_sl23() {
        let o = run(LemmaKind::CentralQuotient, "SL(2,3)", "Z(SL(2,3))", 2, None);
        assert!(o.passed, "{o:#?}");
        let c = find(&o, "C_b");
        assert_eq!(c[0].lhs, "[[4,2,2],[2,4,2],[2,2,4]]");
        let r = find(&o, "tau");
        assert_eq!((r[0].lhs.as_str(), r[0].rhs.as_str()), ("1/4", "1/4"));
    }

    #[test]
    fn degree_sum_on_s3() {
        let o = run(LemmaKind::DegreeSum, "S3", "C3", 3, Some(Selector::Named("trivial".into())));
        assert!(o.passed, "{o:#?}");
        assert_eq!(o.checks[0].lhs, "2");
        assert_eq!(o.checks[0].rhs, "1 * 2 * 1");
    }

    #[test]
    fn pprime_index_on_s4() {
        let o = run(LemmaKind::PPrimeIndex, "S4", "A4<S4", 3, None);
        assert!(o.passed, "{o:#?}");
        assert_eq!((o.checks[0].lhs.as_str(), o.checks[0].rhs.as_str()), ("3/1", "3/1"));
    }

    #[test]
    fn p_extension_on_s4() {
        let o = run(LemmaKind::PExtension, "S4", "A4<S4", 2, None);
        assert!(o.passed, "{o:#?}");
        let r = find(&o, "tau");
        assert_eq!((r[0].lhs.as_str(), r[0].rhs.as_str()), ("3/20", "1/4"));
    }

    #[test]
    fn unsatisfiable_hypotheses_are_configuration_errors() {
        let c = Corpus::default_corpus();
        let b = LemmaBinding {
            lemma: LemmaKind::PPrimeIndex,
            group: "S4".into(),
            subgroup: "A4<S4".into(),
            prime: 2,
            character: None,
        };
        let e = lemma_suite(&c, &b, 5).unwrap_err();
        assert!(matches!(e, HarnessError::BindingUnsatisfiable { .. }));
        assert!(LemmaOutcome::from_error(&b, &e).configuration_error);
        let b = LemmaBinding {
            lemma: LemmaKind::CentralQuotient,
            group: "S3".into(),
            subgroup: "C3".into(),
            prime: 3,
            character: None,
        };
        assert!(matches!(lemma_suite(&c, &b, 5), Err(HarnessError::BindingUnsatisfiable { .. })));
    }
}
