//! Backward proof search for `G(K_n)` and `G(KD_n)`, and for `KT_n` through
//! the store-based calculus `G(KT_n⁺)`.
//!
//! Propositional rules are invertible, so the search applies them eagerly
//! and never backtracks over them. Once a sequent is critical the modal rules
//! are tried one instance at a time, and the first instance whose premise is
//! derivable wins.

mod check;
mod naive;
pub(crate) mod search;

use std::fmt;

pub use check::{check_derivation, CheckReport, Violation};
pub use naive::{naive_kt_prove, NaiveVerdict};
pub use search::{prove, prove_tplus, Prover};

use crate::syntax::{Measure, Sequent, TSequent};

/// The logic a search or check runs in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Logic {
    K,
    KD,
    KT,
}

impl Logic {
    pub const ALL: [Logic; 3] = [Logic::K, Logic::KD, Logic::KT];

    pub fn name(self) -> &'static str {
        match self {
            Logic::K => "K",
            Logic::KD => "KD",
            Logic::KT => "KT",
        }
    }
}

impl fmt::Display for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleLabel {
    Init,
    InitBot,
    RAnd,
    LAnd,
    ROr,
    LOr,
    RImp,
    LImp,
    RNeg,
    LNeg,
    BoxK,
    BoxD,
    BoxT,
    BoxKPlus,
    BoxTPlus,
}

impl RuleLabel {
    pub const ALL: [RuleLabel; 15] = [
        RuleLabel::Init,
        RuleLabel::InitBot,
        RuleLabel::RAnd,
        RuleLabel::LAnd,
        RuleLabel::ROr,
        RuleLabel::LOr,
        RuleLabel::RImp,
        RuleLabel::LImp,
        RuleLabel::RNeg,
        RuleLabel::LNeg,
        RuleLabel::BoxK,
        RuleLabel::BoxD,
        RuleLabel::BoxT,
        RuleLabel::BoxKPlus,
        RuleLabel::BoxTPlus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleLabel::Init => "Init",
            RuleLabel::InitBot => "InitBot",
            RuleLabel::RAnd => "RAnd",
            RuleLabel::LAnd => "LAnd",
            RuleLabel::ROr => "ROr",
            RuleLabel::LOr => "LOr",
            RuleLabel::RImp => "RImp",
            RuleLabel::LImp => "LImp",
            RuleLabel::RNeg => "RNeg",
            RuleLabel::LNeg => "LNeg",
            RuleLabel::BoxK => "BoxK",
            RuleLabel::BoxD => "BoxD",
            RuleLabel::BoxT => "BoxT",
            RuleLabel::BoxKPlus => "BoxKPlus",
            RuleLabel::BoxTPlus => "BoxTPlus",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        RuleLabel::ALL.into_iter().find(|r| r.name() == name)
    }

    pub fn is_initial(self) -> bool {
        matches!(self, RuleLabel::Init | RuleLabel::InitBot)
    }
}

impl fmt::Display for RuleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which part of a (T-)sequent a formula occurrence sits in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Store,
    Antecedent,
    Succedent,
}

/// A formula occurrence, by side and index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position {
    pub side: Side,
    pub index: usize,
}

impl Position {
    pub fn ant(index: usize) -> Self {
        Position { side: Side::Antecedent, index }
    }
    pub fn suc(index: usize) -> Self {
        Position { side: Side::Succedent, index }
    }
    pub fn store(index: usize) -> Self {
        Position { side: Side::Store, index }
    }
}

/// The sequent at a derivation node.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Judgement {
    Plain(Sequent),
    T(TSequent),
}

impl Judgement {
    pub fn measure(&self) -> Measure {
        match self {
            Judgement::Plain(s) => s.measure(),
            Judgement::T(t) => t.measure(),
        }
    }
}

impl fmt::Display for Judgement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Judgement::Plain(s) => s.fmt(f),
            Judgement::T(t) => t.fmt(f),
        }
    }
}

/// A rule-labelled proof tree, one sequent per node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub conclusion: Judgement,
    pub rule: RuleLabel,
    /// Principal occurrences in `conclusion`. For the box rules this lists
    /// every boxed antecedent (or store) member whose body moves into the
    /// premise, plus the boxed succedent member for `BoxK`/`BoxKPlus`.
    pub principal: Vec<Position>,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(Derivation::height).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }

    /// Pre-order walk over all nodes.
    pub fn nodes(&self) -> Vec<&Derivation> {
        let mut out = vec![self];
        let mut i = 0;
        while i < out.len() {
            let n = out[i];
            out.extend(n.premises.iter());
            i += 1;
        }
        out
    }

    /// Parent/child edges whose measure does not strictly decrease, under the
    /// weight order for plain sequents and the lexicographic box/weight order
    /// for T-sequents.
    pub fn measure_violations(&self) -> usize {
        self.nodes()
            .into_iter()
            .map(|n| {
                n.premises
                    .iter()
                    .filter(|c| !strictly_below(&c.conclusion, &n.conclusion))
                    .count()
            })
            .sum()
    }
}

pub(crate) fn strictly_below(child: &Judgement, parent: &Judgement) -> bool {
    match (child, parent) {
        (Judgement::Plain(c), Judgement::Plain(p)) => c.weight() < p.weight(),
        (Judgement::T(c), Judgement::T(p)) => c.measure() < p.measure(),
        _ => false,
    }
}

/// Counters collected by one search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes_expanded: usize,
    pub max_depth: usize,
    /// Parent/child edges explored, each checked against the measure.
    pub edges_checked: usize,
    /// Explored edges on which the measure failed to decrease.
    pub measure_violations: usize,
    pub memo_hits: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofResult {
    Derivable(Derivation),
    NotDerivable(SearchStats),
}

impl ProofResult {
    pub fn is_derivable(&self) -> bool {
        matches!(self, ProofResult::Derivable(_))
    }

    pub fn derivation(&self) -> Option<&Derivation> {
        match self {
            ProofResult::Derivable(d) => Some(d),
            ProofResult::NotDerivable(_) => None,
        }
    }
}
