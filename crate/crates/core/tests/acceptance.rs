//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use pblocks_core::blocks::{determinant, format_fraction, is_p_power_big, BlockRecord, Fraction};
use pblocks_core::chartab::CharacterTable;
use pblocks_core::harness::{
    corpus_report, fixture_checks, lemma_suite, published_fixtures, rational_rank, run_group_analysis, Analysis, Corpus,
    LemmaKind, LemmaOutcome, RunOptions, Status,
};

const SEED: u64 = 20;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let e = t.elapsed();
    ensure(e < limit, || format!("{what} took {e:.2?}, limit {limit:?}"))
}

fn analyze(name: &str, p: u64) -> Result<Analysis, String> {
    let c = Corpus::default_corpus();
    let e = c.entry(name).ok_or(format!("{name} missing from corpus"))?;
    let g = e.group().map_err(|e| e.to_string())?;
    run_group_analysis(name, &g, p, SEED).map_err(|e| e.to_string())
}

fn frac(n: u64, d: u64) -> Fraction {
    Fraction::new(n, d)
}

/// `sum_{phi, psi} c_{phi psi} phi(1) psi(1)`.
fn modular_dim(r: &BlockRecord) -> u64 {
    let d = &r.ibr_degrees;
    (0..d.len())
        .flat_map(|i| (0..d.len()).map(move |j| (i, j)))
        .map(|(i, j)| r.cartan[i][j] * d[i] * d[j])
        .sum()
}

fn ordinary_dim(r: &BlockRecord) -> u64 {
    r.irr_degrees.iter().map(|d| d * d).sum()
}

const KLEIN_A: [[u64; 3]; 3] = [[2, 1, 1], [1, 2, 1], [1, 1, 2]];
const KLEIN_B: [[u64; 3]; 3] = [[4, 2, 2], [2, 2, 1], [2, 1, 2]];

fn as_vec(m: &[[u64; 3]; 3]) -> Vec<Vec<u64>> {
    m.iter().map(|r| r.to_vec()).collect()
}

fn a4_two() -> Outcome {
    let t = Instant::now();
    let a = analyze("A4", 2)?;
    within(t, Duration::from_secs(5), "A4 at 2")?;
    ensure(a.records.len() == 1, || format!("{} blocks", a.records.len()))?;
    let r = &a.records[0];
    let v = &a.verdicts[0];
    ensure(r.irr.len() == 4 && r.l() == 3, || format!("k={} l={}", r.irr.len(), r.l()))?;
    ensure(r.defect_group_order == 4 && r.sectional_rank == 2, || {
        format!("|P|={} s={}", r.defect_group_order, r.sectional_rank)
    })?;
    ensure(r.cartan == as_vec(&KLEIN_A), || format!("C = {:?}", r.cartan))?;
    ensure(ordinary_dim(r) == 12 && modular_dim(r) == 12, || "dim".into())?;
    ensure(r.tau == frac(4, 1), || format!("tau = {}", format_fraction(&r.tau)))?;
    ensure(v.hw_holds && !v.hw_equality, || "hw not strict".into())?;
    ensure(v.mr_holds && r.l() < 4, || "mr".into())?;
    ensure(v.ineq3_holds == Some(true) && r.tau < frac(16, 1), || "ineq3".into())?;
    Ok(format!("k=4 l=3 |P|=4 s=2 C=KleinA dim=12 tau=4/1 ({:.2?})", t.elapsed()))
}

fn a5_two() -> Outcome {
    let t = Instant::now();
    let a = analyze("A5", 2)?;
    within(t, Duration::from_secs(10), "A5 at 2")?;
    let r = &a.records[0];
    ensure(r.is_principal, || "block 0 is not principal".into())?;
    ensure(r.cartan == as_vec(&KLEIN_B), || format!("C = {:?}", r.cartan))?;
    ensure(r.tau == frac(44, 9), || format!("tau = {}", format_fraction(&r.tau)))?;
    ensure(ordinary_dim(r) == 44 && modular_dim(r) == 44, || "dim".into())?;
    let zero: Vec<&BlockRecord> = a.records.iter().filter(|r| r.is_defect_zero).collect();
    ensure(!zero.is_empty() && zero.iter().all(|r| r.tau == frac(1, 1)), || {
        "defect-zero tau".into()
    })?;
    Ok(format!("principal C=KleinB tau=44/9 dim=44, defect-zero tau=1 ({:.2?})", t.elapsed()))
}

fn sl28_two() -> Outcome {
    let t = Instant::now();
    let a = analyze("SL(2,8)", 2)?;
    within(t, Duration::from_secs(300), "SL(2,8) at 2")?;
    let r = &a.records[0];
    let inv = r.defect_group.abelian_invariants.clone().unwrap_or_default();
    ensure(r.is_principal && r.defect_group.abelian && inv == vec![2, 2, 2], || {
        format!("defect group invariants {inv:?}")
    })?;
    ensure(r.defect_group_order == 8 && r.sectional_rank == 3, || "order/rank".into())?;
    let max_diag = (0..r.l()).map(|i| r.cartan[i][i]).max().unwrap_or(0);
    ensure(max_diag <= 8, || format!("max diagonal {max_diag}"))?;
    ensure(r.tau < frac(64, 1), || format!("tau = {}", format_fraction(&r.tau)))?;
    let zero: Vec<&BlockRecord> = a.records.iter().filter(|r| r.is_defect_zero).collect();
    ensure(zero.len() == 1 && zero[0].irr_degrees == vec![8], || {
        format!("{} defect-zero blocks", zero.len())
    })?;
    Ok(format!(
        "P=(C2)^3 s=3 max diag {max_diag} <= 8, tau={} < 64, one defect-zero block ({:.2?})",
        format_fraction(&r.tau),
        t.elapsed()
    ))
}

fn fixtures() -> Outcome {
    let t = Instant::now();
    let out = fixture_checks(&published_fixtures(), SEED);
    within(t, Duration::from_secs(1), "fixtures")?;
    let by = |n: &str| out.iter().find(|o| o.name == n).cloned().ok_or(format!("{n} missing"));
    let (j1, co3) = (by("J1")?, by("Co3")?);
    ensure(j1.max_diagonal == 8 && j1.trace == 24, || format!("J1 {j1:?}"))?;
    ensure(co3.max_diagonal == 8 && co3.trace == 22, || format!("Co3 {co3:?}"))?;
    for o in [&j1, &co3] {
        ensure(o.samples == 1000 && o.rayleigh_holds && o.ineq3_holds && o.ineq3_bound == 64, || {
            format!("{} sampling", o.name)
        })?;
    }
    ensure(out.iter().all(|o| o.passed), || "a fixture fails".into())?;
    // negative control: every +1 mutation of every entry flips a check
    let mut flipped = 0;
    let mut total = 0;
    for f in published_fixtures() {
        for i in 0..f.cartan.len() {
            for j in 0..f.cartan.len() {
                let mut m = f.clone();
                m.cartan[i][j] += 1;
                total += 1;
                flipped += usize::from(!fixture_checks(&[m], SEED)[0].passed);
            }
        }
    }
    ensure(flipped == total, || format!("only {flipped} of {total} mutations detected"))?;
    Ok(format!("J1 diag 8 trace 24, Co3 diag 8 trace 22, {total}/{total} mutations caught"))
}

fn lemma(kind: LemmaKind, g: &str, n: &str, p: u64, sel: Option<&str>) -> Result<LemmaOutcome, String> {
    let c = Corpus::default_corpus();
    let b = c
        .lemma_bindings
        .iter()
        .find(|b| b.lemma == kind && b.group == g && b.subgroup == n && b.prime == p)
        .cloned()
        .ok_or(format!("binding {kind} missing"))?;
    ensure(b.character.is_some() == sel.is_some(), || "selector".into())?;
    let o = lemma_suite(&c, &b, SEED).map_err(|e| e.to_string())?;
    ensure(o.passed, || format!("{kind} failed: {:?}", o.checks))?;
    Ok(o)
}

fn has(o: &LemmaOutcome, prefix: &str, lhs: &str, rhs: &str) -> bool {
    o.checks
        .iter()
        .any(|c| c.what.starts_with(prefix) && c.lhs == lhs && c.rhs == rhs && c.holds)
}

fn lemmas() -> Outcome {
    let t = Instant::now();
    let o = lemma(LemmaKind::CentralQuotient, "SL(2,3)", "Z(SL(2,3))", 2, None)?;
    ensure(has(&o, "C_b", "[[4,2,2],[2,4,2],[2,2,4]]", "[[4,2,2],[2,4,2],[2,2,4]]"), || {
        "Cartan doubling".into()
    })?;
    ensure(has(&o, "tau", "1/4", "1/4"), || "central ratio".into())?;
    let o = lemma(LemmaKind::PPrimeIndex, "S4", "A4<S4", 3, None)?;
    ensure(has(&o, "tau(b0)", "3/1", "3/1"), || "tau 3 = 3".into())?;
    let o = lemma(LemmaKind::PExtension, "S4", "A4<S4", 2, None)?;
    ensure(has(&o, "tau", "3/20", "1/4"), || "3/20 <= 1/4".into())?;
    let o = lemma(LemmaKind::DegreeSum, "S3", "C3", 3, Some("trivial"))?;
    ensure(o.checks.len() == 1 && o.checks[0].lhs == "2" && o.checks[0].rhs == "1 * 2 * 1", || {
        "2 = 2".into()
    })?;
    let o = lemma(LemmaKind::Stabilizer, "S3", "C3", 2, None)?;
    // the degree-2 block sits over the two conjugate blocks of C3, each
    // with a proper stabiliser
    let proper = o
        .checks
        .iter()
        .filter(|c| c.what.contains("(order 3)") && c.lhs == "1")
        .count();
    ensure(proper == 2 && has(&o, "tau", "1/1", "1/1"), || format!("{:?}", o.checks))?;
    within(t, Duration::from_secs(120), "lemma suites")?;
    Ok(format!(
        "doubling + 1/4<=1/4, 3=3, 3/20<=1/4, 2=2, tau(b)=tau(b_hat)=1 ({:.2?})",
        t.elapsed()
    ))
}

fn orthogonality(t: &CharacterTable) -> Result<(), String> {
    t.verify().map_err(|e| e.to_string())
}

fn corpus_analyses() -> Result<Vec<Analysis>, String> {
    let c = Corpus::default_corpus();
    let mut out = Vec::new();
    for e in c.groups.iter().filter(|e| !e.large) {
        let g = e.group().map_err(|e| e.to_string())?;
        for p in e.primes_for(g.order()) {
            out.push(run_group_analysis(&e.name, &g, p, SEED).map_err(|e| e.to_string())?);
        }
    }
    Ok(out)
}

fn sweep(all: &[Analysis]) -> Outcome {
    let mut blocks = 0;
    for a in all {
        let at = format!("{} p={}", a.name, a.prime);
        orthogonality(&a.table).map_err(|e| format!("{at}: {e}"))?;
        let dim: u64 = a.records.iter().map(|r| r.dim).sum();
        ensure(dim == a.order(), || format!("{at}: dims sum to {dim}"))?;
        let l: usize = a.records.iter().map(BlockRecord::l).sum();
        ensure(l == a.classes.p_regular(a.prime).len(), || format!("{at}: l sums to {l}"))?;
        let d = &a.decomposition;
        ensure(rational_rank(&d.entries) == d.cols(), || format!("{at}: D rank"))?;
        for chi in 0..d.rows() {
            let deg: u64 = (0..d.cols()).map(|phi| d.get(chi, phi) * a.brauer.degrees()[phi]).sum();
            ensure(deg == a.table.degree(chi), || format!("{at}: row {chi} of D"))?;
        }
        for r in &a.records {
            blocks += 1;
            ensure(is_p_power_big(&determinant(&r.cartan), a.prime), || {
                format!("{at} b{}: det C", r.id)
            })?;
            ensure(ordinary_dim(r) == modular_dim(r), || format!("{at} b{}: two-route dim", r.id))?;
            let one = frac(1, 1);
            ensure(r.tau >= one && (r.tau == one) == (r.defect == 0), || {
                format!("{at} b{}: tau = {}", r.id, format_fraction(&r.tau))
            })?;
        }
    }
    Ok(format!("{} (group, prime) pairs, {blocks} blocks", all.len()))
}

fn conjectures(all: &[Analysis]) -> Outcome {
    let mut abelian_2 = 0;
    let mut bad = Vec::new();
    for a in all {
        for (r, v) in a.records.iter().zip(&a.verdicts) {
            if a.prime == 2 && r.defect > 0 && r.defect_group.abelian {
                abelian_2 += 1;
                if v.ineq3_holds != Some(true) {
                    bad.push(format!("ineq3 {} b{}: {r:?}", a.name, r.id));
                }
            }
            if !(v.hw_holds && v.hw_equality_iff_l1_consistent && v.mr_holds) {
                bad.push(format!("{} p={} b{}: {v:?} {r:?}", a.name, a.prime, r.id));
            }
        }
    }
    ensure(bad.is_empty(), || bad.join("\n"))?;
    ensure(abelian_2 > 0, || "no abelian 2-blocks of positive defect".into())?;
    Ok(format!("{abelian_2} abelian 2-blocks with d>0 satisfy the strict bound; hw and mr hold everywhere"))
}

fn determinism() -> Outcome {
    let c = Corpus::default_corpus();
    let run = |seed| {
        let opts = RunOptions {
            seed,
            ..RunOptions::default()
        };
        corpus_report(&c, &opts).map_err(|e| e.to_string())
    };
    let a = run(1)?;
    let b = run(1)?;
    let other = run(987_654_321)?;
    ensure(a.status() == Status::Pass, || format!("status {:?}", a.status()))?;
    let ja = a.without_timings().to_json().map_err(|e| e.to_string())?;
    let jb = b.without_timings().to_json().map_err(|e| e.to_string())?;
    ensure(ja == jb, || "same seed, different reports".into())?;
    ensure(a.blocks == other.blocks, || "block invariants depend on the seed".into())?;
    Ok(format!("{} bytes identical across runs; seeds 1 and 987654321 agree", ja.len()))
}

fn main() -> ExitCode {
    let started = Instant::now();
    let mut results: Vec<(u32, &str, Outcome)> = vec![
        (1, "A4 at p=2", a4_two()),
        (2, "A5 at p=2", a5_two()),
        (3, "SL(2,8) at p=2", sl28_two()),
        (4, "fixture suite", fixtures()),
        (5, "lemma suites", lemmas()),
    ];
    let t = Instant::now();
    match corpus_analyses() {
        Ok(all) => {
            let s = sweep(&all).and_then(|m| within(t, Duration::from_secs(900), "sweep").map(|_| m));
            results.push((6, "invariant sweep", s));
            results.push((7, "conjecture sweep", conjectures(&all)));
        }
        Err(e) => {
            results.push((6, "invariant sweep", Err(e.clone())));
            results.push((7, "conjecture sweep", Err(e)));
        }
    }
    results.push((8, "determinism", determinism()));

    let mut failed = 0;
    for (n, name, r) in &results {
        match r {
            Ok(m) => println!("criterion {n} [{name}]: PASS - {m}"),
            Err(m) => {
                failed += 1;
                println!("criterion {n} [{name}]: FAIL - {m}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed ({:.2?})",
        results.len() - failed,
        started.elapsed()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
