use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use pblocks_core::blocks::{format_fraction, tau_from_cartan, Fraction};
use pblocks_core::harness::{
    corpus_report, fixture_checks, published_fixtures, run_group_analysis, Corpus, HarnessError, Report, RunOptions,
    Status,
};

#[derive(Parser)]
#[command(name = "pblocks", version, about = "Exact p-block invariants of small permutation groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Md,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Analyse every group in a group file at one prime.
    Analyze {
        /// Group file (same layout as a corpus file).
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        prime: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Run the corpus, the lemma suites and the fixture checks.
    VerifyCorpus {
        /// Defaults to the embedded corpus.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        include_large: bool,
        #[arg(long)]
        threads: Option<usize>,
        /// Leave timing metadata out of the report.
        #[arg(long)]
        no_timings: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// tau for a Cartan matrix and a Brauer degree vector.
    Tau {
        /// JSON array of rows, or whitespace separated rows.
        #[arg(long)]
        cartan: PathBuf,
        /// Comma separated degrees.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        degrees: Vec<u64>,
    },
    /// Checks on the published Cartan matrices.
    Fixtures {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "md")]
        format: Format,
    },
}

fn render(r: &Report, f: Format) -> Result<String, HarnessError> {
    match f {
        Format::Json => r.to_json(),
        Format::Md => Ok(r.to_markdown()),
        Format::Csv => r.to_csv(),
    }
}

fn parse_matrix(text: &str) -> Result<Vec<Vec<u64>>, String> {
    if let Ok(m) = serde_json::from_str::<Vec<Vec<u64>>>(text) {
        return Ok(m);
    }
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<u64>().map_err(|e| format!("{t:?}: {e}")))
                .collect()
        })
        .collect()
}

fn run(cli: Cli) -> Result<Status, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Analyze {
            group,
            prime,
            seed,
            format,
        } => {
            let corpus = Corpus::load(&group)?;
            if corpus.groups.is_empty() {
                return Err("group file defines no groups".into());
            }
            let mut report: Option<Report> = None;
            for e in &corpus.groups {
                let a = run_group_analysis(&e.name, &e.group()?, prime, seed)?;
                let single = Report::single(&a, seed);
                match &mut report {
                    Some(r) => r.blocks.extend(single.blocks),
                    None => report = Some(single),
                }
            }
            let mut report = report.expect("at least one group");
            report.meta.groups = report.blocks.len();
            println!("{}", render(&report, format)?.trim_end());
            Ok(report.status())
        }
        Command::VerifyCorpus {
            corpus,
            seed,
            include_large,
            threads,
            no_timings,
            format,
        } => {
            let corpus = match corpus {
                Some(p) => Corpus::load(&p)?,
                None => Corpus::default_corpus(),
            };
            let opts = RunOptions {
                seed,
                include_large,
                threads,
                ..RunOptions::default()
            };
            let mut report = corpus_report(&corpus, &opts)?;
            if no_timings {
                report = report.without_timings();
            }
            println!("{}", render(&report, format)?.trim_end());
            for (g, b) in report.violations() {
                eprintln!(
                    "violation: {} p={} block {}: {}",
                    g.group,
                    g.prime,
                    b.record.id,
                    serde_json::to_string(b)?
                );
            }
            Ok(report.status())
        }
        Command::Tau { cartan, degrees } => {
            let m = parse_matrix(&std::fs::read_to_string(&cartan)?)?;
            let tau = tau_from_cartan(&m, &degrees)?;
            let trace: u64 = (0..m.len()).map(|i| m[i][i]).sum();
            println!("{}", format_fraction(&tau));
            Ok(if tau <= Fraction::from_integer(trace) {
                Status::Pass
            } else {
                Status::VerdictFailure
            })
        }
        Command::Fixtures { seed, format } => {
            let report = Report {
                fixtures: fixture_checks(&published_fixtures(), seed),
                ..Report::empty(seed)
            };
            println!("{}", render(&report, format)?.trim_end());
            Ok(report.status())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(s) => ExitCode::from(s as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(Status::HardError as u8)
        }
    }
}
