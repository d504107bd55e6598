use thiserror::Error;

use crate::syntax::{Formula, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("not-first-order: propositional quantifiers are not allowed here")]
    NotFirstOrder,
    #[error("substituting for {var} would be captured by the binder for {binder}")]
    Capture { var: Var, binder: Var },
    #[error("agent ids start at 1, got {0}")]
    InvalidAgent(u32),
    #[error("store members must be outermost-boxed, got {0}")]
    UnboxedStore(Formula),
    #[error("variables to forget must be pairwise distinct, {0} repeats")]
    DuplicateForget(Var),
    #[error("bound must be at least 1")]
    ZeroBound,
}
