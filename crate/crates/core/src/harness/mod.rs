//! Corpus runner: whole-pipeline analysis per (group, prime), the lemma
//! suites, the fixture checks on published Cartan matrices, and reports.

mod analysis;
mod corpus;
mod fixtures;
mod lemmas;
mod report;

pub use analysis::{rational_rank, reassert, run_group_analysis, run_group_analysis_in, Analysis};
pub use corpus::{Corpus, CorpusEntry, LemmaBinding, LemmaKind, NormalSubgroup, Selector, DEFAULT_CORPUS};
pub use fixtures::{fixture_checks, published_fixtures, FixtureOutcome, PublishedFixture, FIXTURE_SAMPLES};
pub use lemmas::{lemma_suite, LemmaCheck, LemmaOutcome};
pub use report::{
    analysis_report, corpus_report, BlockEntry, GroupReport, Meta, Report, RunOptions, Status,
};

use thiserror::Error;

use crate::blocks::BlockError;
use crate::chartab::ChartabError;
use crate::field::FieldError;
use crate::group::GroupError;
use crate::modrep::ModrepError;

/// Failure inside one pipeline stage.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StageError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Chartab(#[from] ChartabError),
    #[error(transparent)]
    Modrep(#[from] ModrepError),
    #[error(transparent)]
    Block(#[from] BlockError),
    #[error("{0}")]
    Invariant(String),
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{group} at p = {prime}, stage {stage}: {source}")]
    Stage {
        group: String,
        prime: u64,
        stage: &'static str,
        #[source]
        source: Box<StageError>,
    },
    #[error("corpus: {0}")]
    Corpus(String),
    #[error("{lemma} on {group}/{subgroup}: hypotheses fail: {reason}")]
    BindingUnsatisfiable {
        lemma: String,
        group: String,
        subgroup: String,
        reason: String,
    },
    #[error("{lemma} on {group}/{subgroup}: {source}")]
    Lemma {
        lemma: String,
        group: String,
        subgroup: String,
        #[source]
        source: Box<StageError>,
    },
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
