use std::collections::HashSet;

use super::search::{initial_step, propositional_step};
use crate::error::Error;
use crate::syntax::{Formula, FormulaMultiset, Sequent};

/// Outcome of a depth-bounded search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NaiveVerdict {
    /// A derivation of height at most the bound exists.
    DerivableWithin,
    /// None was found within the bound.
    Unknown,
}

/// Depth-bounded search in `G(KT_n)` with the looping reflexivity rule
/// `□ᵢA, Γ ⇒ Δ / □ᵢA, A, Γ ⇒ Δ`.
///
/// Height counts nodes on the longest branch, so an initial sequent has
/// height 1.
pub fn naive_kt_prove(s: &Sequent, depth_bound: usize) -> Result<NaiveVerdict, Error> {
    if depth_bound == 0 {
        return Err(Error::ZeroBound);
    }
    s.ensure_first_order()?;
    let mut search = Naive { failed: HashSet::new() };
    Ok(if search.derivable(&s.antecedent, &s.succedent, depth_bound) {
        NaiveVerdict::DerivableWithin
    } else {
        NaiveVerdict::Unknown
    })
}

struct Naive {
    failed: HashSet<(Vec<Formula>, Vec<Formula>, usize)>,
}

impl Naive {
    fn derivable(&mut self, ant: &FormulaMultiset, suc: &FormulaMultiset, height: usize) -> bool {
        if initial_step(ant, suc).is_some() {
            return true;
        }
        if height <= 1 {
            return false;
        }
        let key = (ant.sorted(), suc.sorted(), height);
        if self.failed.contains(&key) {
            return false;
        }
        let found = self.expand(ant, suc, height - 1);
        if !found {
            self.failed.insert(key);
        }
        found
    }

    fn expand(&mut self, ant: &FormulaMultiset, suc: &FormulaMultiset, below: usize) -> bool {
        if let Some(step) = propositional_step(ant, suc) {
            return step
                .premises
                .iter()
                .all(|(a, b)| self.derivable(a, b, below));
        }
        let mut seen = HashSet::new();
        for f in ant.iter() {
            if let Formula::Box(_, body) = f {
                if seen.insert(f) && self.derivable(&ant.clone().with((**body).clone()), suc, below) {
                    return true;
                }
            }
        }
        suc.iter().any(|f| match f {
            Formula::Box(agent, body) => {
                self.derivable(&ant.flats(*agent), &FormulaMultiset::from(vec![(**body).clone()]), below)
            }
            _ => false,
        })
    }
}
