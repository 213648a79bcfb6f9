//! Modular representations over a splitting field: the MeatAxe, simple
//! modules by tensor closure, Brauer characters, decomposition and Cartan
//! matrices.

mod brauer;
mod decomp;
mod meataxe;
mod module;

pub use brauer::{all_simples, brauer_character, BrauerTable, MAX_TENSOR_DIM};
pub use decomp::{decompose, decomposition_and_cartan, CartanMatrix, DecompositionMatrix};
pub use meataxe::{chop, is_irreducible, module_iso, AlgebraElement, MEATAXE_DRAWS};
pub use module::GModule;

use thiserror::Error;

use crate::chartab::ChartabError;
use crate::field::FieldError;
use crate::group::GroupError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModrepError {
    #[error("no splitting algebra element within the draw budget (dimension {dim})")]
    RandomBudgetExceeded { dim: usize },
    #[error("tensor closure stalled with {found} of {target} simple modules (dimensions {dims:?})")]
    ClosureStalled {
        found: usize,
        target: usize,
        dims: Vec<usize>,
    },
    #[error("representative of class {class} is not semisimple over the field")]
    NotSemisimpleElement { class: usize },
    #[error("decomposition of character {chi} is not a natural-number combination")]
    NonIntegralSolution { chi: usize },
    #[error("module data is malformed: {0}")]
    BadModule(String),
    #[error("inconsistent modular data: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Chartab(#[from] ChartabError),
}
