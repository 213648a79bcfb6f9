use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::analysis::{reassert, run_group_analysis, Analysis};
use super::corpus::{Corpus, CorpusEntry};
use super::fixtures::{fixture_checks, published_fixtures, FixtureOutcome, PublishedFixture, FIXTURE_SAMPLES};
use super::lemmas::{lemma_suite, LemmaOutcome};
use super::HarnessError;
use crate::blocks::{format_fraction, BlockRecord, ConjectureVerdict, Fraction};
use crate::group::DEFAULT_ENUMERATION_CAP;
use crate::modrep::{MAX_TENSOR_DIM, MEATAXE_DRAWS};

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub seed: u64,
    pub include_large: bool,
    /// Worker threads; `None` lets rayon decide.
    pub threads: Option<usize>,
    /// Fixtures to check; the published ones by default.
    pub fixtures: Vec<PublishedFixture>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            seed: 0,
            include_large: false,
            threads: None,
            fixtures: published_fixtures(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timings {
    pub total_ms: f64,
    pub fixtures_ms: f64,
    /// `(group, prime, ms)` per analysis.
    pub analyses: Vec<(String, u64, f64)>,
    /// `(lemma, ms)` per binding.
    pub lemmas: Vec<(String, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Meta {
    pub seed: u64,
    pub include_large: bool,
    pub enumeration_cap: u64,
    pub meataxe_draws: usize,
    pub max_tensor_dim: usize,
    pub fixture_samples: usize,
    pub groups: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockEntry {
    #[serde(flatten)]
    pub record: BlockRecord,
    pub verdict: ConjectureVerdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupReport {
    pub group: String,
    pub prime: u64,
    pub order: u64,
    pub classes: usize,
    pub p_regular_classes: usize,
    pub blocks: Vec<BlockEntry>,
    pub error: Option<String>,
}

impl GroupReport {
    fn failed(group: &str, prime: u64, order: u64, e: &HarnessError) -> GroupReport {
        GroupReport {
            group: group.into(),
            prime,
            order,
            classes: 0,
            p_regular_classes: 0,
            blocks: Vec::new(),
            error: Some(e.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub meta: Meta,
    pub blocks: Vec<GroupReport>,
    pub lemmas: Vec<LemmaOutcome>,
    pub fixtures: Vec<FixtureOutcome>,
}

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass = 0,
    VerdictFailure = 1,
    HardError = 2,
}

/// Block records plus verdicts, with the invariants checked once more.
pub fn analysis_report(a: &Analysis) -> GroupReport {
    let error = reassert(a).err().map(|e| format!("invariants: {e}"));
    GroupReport {
        group: a.name.clone(),
        prime: a.prime,
        order: a.order(),
        classes: a.classes.len(),
        p_regular_classes: a.classes.p_regular(a.prime).len(),
        blocks: a
            .records
            .iter()
            .zip(&a.verdicts)
            .map(|(r, v)| BlockEntry {
                record: r.clone(),
                verdict: v.clone(),
            })
            .collect(),
        error,
    }
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1000.0
}

fn analyze_entry(e: &CorpusEntry, p: u64, seed: u64) -> (GroupReport, f64) {
    let t = Instant::now();
    let r = match e.group() {
        Ok(g) => match run_group_analysis(&e.name, &g, p, seed) {
            Ok(a) => analysis_report(&a),
            Err(err) => GroupReport::failed(&e.name, p, g.order() as u64, &err),
        },
        Err(err) => GroupReport::failed(&e.name, p, 0, &err),
    };
    (r, ms(t))
}

/// Analyses every corpus group at each of its primes, runs the lemma
/// bindings and the fixture checks.
pub fn corpus_report(corpus: &Corpus, opts: &RunOptions) -> Result<Report, HarnessError> {
    let start = Instant::now();
    let mut tasks: Vec<(&CorpusEntry, u64)> = Vec::new();
    for e in corpus.groups.iter().filter(|e| opts.include_large || !e.large) {
        let order = e.group()?.order();
        tasks.extend(e.primes_for(order).into_iter().map(|p| (e, p)));
    }
    let run = || {
        let analyses: Vec<(GroupReport, f64)> = tasks
            .par_iter()
            .map(|&(e, p)| analyze_entry(e, p, opts.seed))
            .collect();
        let lemmas: Vec<(LemmaOutcome, f64)> = corpus
            .lemma_bindings
            .par_iter()
            .map(|b| {
                let t = Instant::now();
                let o = lemma_suite(corpus, b, opts.seed).unwrap_or_else(|e| LemmaOutcome::from_error(b, &e));
                (o, ms(t))
            })
            .collect();
        (analyses, lemmas)
    };
    let (analyses, lemmas) = match opts.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| HarnessError::Corpus(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };
    let tf = Instant::now();
    let fixtures = fixture_checks(&opts.fixtures, opts.seed);
    let fixtures_ms = ms(tf);
    let timings = Timings {
        total_ms: ms(start),
        fixtures_ms,
        analyses: analyses
            .iter()
            .map(|(r, t)| (r.group.clone(), r.prime, *t))
            .collect(),
        lemmas: lemmas.iter().map(|(o, t)| (o.lemma.to_string(), *t)).collect(),
    };
    Ok(Report {
        meta: Meta {
            seed: opts.seed,
            include_large: opts.include_large,
            enumeration_cap: DEFAULT_ENUMERATION_CAP as u64,
            meataxe_draws: MEATAXE_DRAWS,
            max_tensor_dim: MAX_TENSOR_DIM,
            fixture_samples: FIXTURE_SAMPLES,
            groups: tasks.len(),
            timings: Some(timings),
        },
        blocks: analyses.into_iter().map(|(r, _)| r).collect(),
        lemmas: lemmas.into_iter().map(|(o, _)| o).collect(),
        fixtures,
    })
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "NO"
    }
}

fn decimal(f: &Fraction) -> String {
    format!("{:.3}", *f.numer() as f64 / *f.denom() as f64)
}

#[derive(Serialize)]
struct CsvRow<'a> {
    group: &'a str,
    prime: u64,
    block: usize,
    k: usize,
    l: usize,
    defect: u32,
    defect_group_order: u64,
    abelian: bool,
    sectional_rank: u32,
    tau: String,
    trace: u64,
    hw_holds: bool,
    hw_equality: bool,
    hw_equality_iff_l1_consistent: bool,
    mr_holds: bool,
    ineq3_holds: Option<bool>,
    trace_bound_holds: bool,
}

impl Report {
    /// No analyses, lemmas or fixtures.
    pub fn empty(seed: u64) -> Report {
        Report {
            meta: Meta {
                seed,
                include_large: false,
                enumeration_cap: DEFAULT_ENUMERATION_CAP as u64,
                meataxe_draws: MEATAXE_DRAWS,
                max_tensor_dim: MAX_TENSOR_DIM,
                fixture_samples: FIXTURE_SAMPLES,
                groups: 0,
                timings: None,
            },
            blocks: Vec::new(),
            lemmas: Vec::new(),
            fixtures: Vec::new(),
        }
    }

    /// A report holding a single analysis.
    pub fn single(a: &Analysis, seed: u64) -> Report {
        let mut r = Report::empty(seed);
        r.meta.groups = 1;
        r.blocks.push(analysis_report(a));
        r
    }

    pub fn without_timings(&self) -> Report {
        let mut r = self.clone();
        r.meta.timings = None;
        r
    }

    pub fn to_json(&self) -> Result<String, HarnessError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Every block whose verdict fails, with its group and prime.
    pub fn violations(&self) -> Vec<(&GroupReport, &BlockEntry)> {
        self.blocks
            .iter()
            .flat_map(|g| g.blocks.iter().map(move |b| (g, b)))
            .filter(|(_, b)| !b.verdict.all_hold())
            .collect()
    }

    pub fn status(&self) -> Status {
        let hard = self.blocks.iter().any(|g| g.error.is_some()) || self.lemmas.iter().any(|l| l.error.is_some());
        if hard {
            return Status::HardError;
        }
        let failed = !self.violations().is_empty()
            || self.lemmas.iter().any(|l| !l.passed)
            || self.fixtures.iter().any(|f| !f.passed);
        if failed {
            Status::VerdictFailure
        } else {
            Status::Pass
        }
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# Block report (seed {})\n", self.meta.seed);
        s.push_str("| group | p | block | k(b) | l(b) | d(b) | \\|P\\| | abelian | s(b) | tau | Tr C | hw | mr | ineq3 |\n");
        s.push_str("|---|---|---|---|---|---|---|---|---|---|---|---|---|---|\n");
        for g in &self.blocks {
            for b in &g.blocks {
                let r = &b.record;
                let v = &b.verdict;
                let ineq3 = v.ineq3_holds.map_or("n/a", yes);
                let _ = writeln!(
                    s,
                    "| {} | {} | {} | {} | {} | {} | {} | {} | {} | {} ({}) | {} | {}{} | {} | {} |",
                    g.group,
                    g.prime,
                    r.id,
                    r.irr.len(),
                    r.l(),
                    r.defect,
                    r.defect_group_order,
                    yes(r.defect_group.abelian),
                    r.sectional_rank,
                    format_fraction(&r.tau),
                    decimal(&r.tau),
                    r.trace,
                    yes(v.hw_holds && v.hw_equality_iff_l1_consistent),
                    if v.hw_equality { " (=)" } else { "" },
                    yes(v.mr_holds),
                    ineq3,
                );
            }
        }
        let errors: Vec<&GroupReport> = self.blocks.iter().filter(|g| g.error.is_some()).collect();
        if !errors.is_empty() {
            s.push_str("\n## Errors\n\n");
            for g in errors {
                let _ = writeln!(s, "- {} at p = {}: {}", g.group, g.prime, g.error.as_deref().unwrap_or(""));
            }
        }
        if !self.lemmas.is_empty() {
            s.push_str("\n## Lemma suites\n\n| lemma | group | subgroup | p | result | detail |\n|---|---|---|---|---|---|\n");
            for l in &self.lemmas {
                let detail = match &l.error {
                    Some(e) => e.clone(),
                    None => l
                        .checks
                        .iter()
                        .map(|c| format!("{} {} {}", c.lhs, c.relation, c.rhs))
                        .collect::<Vec<_>>()
                        .join("; "),
                };
                let _ = writeln!(
                    s,
                    "| {} | {} | {} | {} | {} | {} |",
                    l.lemma,
                    l.group,
                    l.subgroup,
                    l.prime,
                    if l.passed { "pass" } else { "FAIL" },
                    detail
                );
            }
        }
        if !self.fixtures.is_empty() {
            s.push_str("\n## Fixtures\n\n| name | max diag | \\|P\\| | trace | det | sampled max tau | bound | result |\n|---|---|---|---|---|---|---|---|\n");
            for f in &self.fixtures {
                let _ = writeln!(
                    s,
                    "| {} | {} | {} | {} | {} | {} | {} | {} |",
                    f.name,
                    f.max_diagonal,
                    f.diagonal_bound,
                    f.trace,
                    f.determinant,
                    f.max_sampled_tau.as_ref().map_or("-".into(), decimal),
                    f.ineq3_bound,
                    if f.passed { "pass" } else { "FAIL" }
                );
            }
        }
        s
    }

    /// One CSV row per block.
    pub fn to_csv(&self) -> Result<String, HarnessError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for g in &self.blocks {
            for b in &g.blocks {
                let r = &b.record;
                let v = &b.verdict;
                w.serialize(CsvRow {
                    group: &g.group,
                    prime: g.prime,
                    block: r.id,
                    k: r.irr.len(),
                    l: r.l(),
                    defect: r.defect,
                    defect_group_order: r.defect_group_order,
                    abelian: r.defect_group.abelian,
                    sectional_rank: r.sectional_rank,
                    tau: format_fraction(&r.tau),
                    trace: r.trace,
                    hw_holds: v.hw_holds,
                    hw_equality: v.hw_equality,
                    hw_equality_iff_l1_consistent: v.hw_equality_iff_l1_consistent,
                    mr_holds: v.mr_holds,
                    ineq3_holds: v.ineq3_holds,
                    trace_bound_holds: v.trace_bound_holds,
                })?;
            }
        }
        let bytes = w.into_inner().map_err(|e| HarnessError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}
