//! Weak and invariant-measure order theory for stochastic Runge-Kutta methods.

mod bea;
mod eli;
mod ibp;
mod order;
mod quadrature;
mod simulate;
mod srk;

use thiserror::Error;

pub use bea::{bea_modified_field, bea_recursion, modified_equation, modified_recursion, star_tilde_linear, ModifiedField};
pub use eli::{eli_normalize, eli_normalize_with, is_equivalent_to_zero, Multigraph, MAX_ELI_ORDER};
pub use ibp::{a_map, default_root, ibp_normalize, ibp_normalize_with, ibp_step, needs_ibp, IbpNormalForm};
pub use order::{
    check_invariant_order, check_weak_order, exact_flow_character, generator_character, invariant_order,
    postprocessor_check, weak_order, OrderFailure, OrderReport,
};
pub use quadrature::{integrate_invariant, quadrature, quadrature_terms};
pub use simulate::{modified_vector_field, simulate, SimConfig, SimResult};
pub use srk::{srk_character, srk_value, SrkTableau};

use crate::elemdiff::ElemDiffError;
use crate::forest::ForestError;
use crate::hopf::HopfError;
use crate::series::SeriesError;

#[derive(Debug, Error)]
pub enum StochasticError {
    #[error("vertex {0} is not a root of {1}")]
    NotARoot(usize, String),
    #[error("{0} has a single black root; nothing to eliminate")]
    NothingToEliminate(String),
    #[error("decoration '{0}' is not supported here")]
    Unsupported(char),
    #[error("invalid tableau: {0}")]
    Tableau(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Hopf(#[from] HopfError),
    #[error(transparent)]
    ElemDiff(#[from] ElemDiffError),
}
