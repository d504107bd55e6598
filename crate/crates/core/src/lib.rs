//! Proof search and uniform interpolation for the multi-agent modal logics
//! `K_n`, `KD_n` and `KT_n`.
//!
//! ```
//! use modal_uip::{parse_sequent, prove, Logic};
//!
//! let s = parse_sequent("=> [1]p -> p").unwrap();
//! assert!(prove(Logic::KT, &s).unwrap().is_derivable());
//! assert!(!prove(Logic::K, &s).unwrap().is_derivable());
//! ```

pub mod calculus;
pub mod error;
pub mod interpolation;
pub mod parse;
pub mod render;
pub mod second_order;
pub mod semantics;
pub mod syntax;

pub use calculus::{
    check_derivation, naive_kt_prove, prove, prove_tplus, CheckReport, Derivation, Judgement, Logic, NaiveVerdict,
    Position, ProofResult, Prover, RuleLabel, SearchStats,
};
pub use error::Error;
pub use interpolation::{
    exists_forget, forget, forget_kkd, forget_t, post_interpolant, pre_interpolant, verify_uniform,
    InterpolantReport, InterpolationProblem,
};
pub use parse::{parse_formula, parse_sequent, ParseError, SourceSpan};
pub use render::{render, Format, Render};
pub use second_order::{eliminate_quantifiers, TranslationTrace};
pub use semantics::{countermodel, eval, KripkeModel};
pub use syntax::{box_count, AgentId, Formula, FormulaMultiset, Level, Measure, Sequent, TSequent, Var};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/syntax.md")]
    pub struct Syntax;
    #[doc = include_str!("../../../book/src/proof-search.md")]
    pub struct ProofSearch;
    #[doc = include_str!("../../../book/src/kt-store.md")]
    pub struct KtStore;
    #[doc = include_str!("../../../book/src/interpolation.md")]
    pub struct Interpolation;
    #[doc = include_str!("../../../book/src/quantifiers.md")]
    pub struct Quantifiers;
    #[doc = include_str!("../../../book/src/countermodels.md")]
    pub struct Countermodels;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
