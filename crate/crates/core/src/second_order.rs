//! Eliminating propositional quantifiers: `(∀p B)* = 𝒜ₚ(∅; B*)`, and `*`
//! commutes with every other connective.

use crate::calculus::Logic;
use crate::interpolation::forget;
use crate::syntax::{Formula, Var};

/// One elimination: `before` was replaced by `after`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranslationStep {
    pub var: Var,
    pub before: Formula,
    pub after: Formula,
}

/// The eliminations performed, innermost first.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TranslationTrace {
    pub steps: Vec<TranslationStep>,
}

impl TranslationTrace {
    /// Rewrites `input` step by step. Each step replaces every occurrence of
    /// its `before` formula, so replaying the trace of `f` on `f` gives the
    /// translation of `f`.
    pub fn replay(&self, input: &Formula) -> Formula {
        self.steps
            .iter()
            .fold(input.clone(), |acc, step| replace(&acc, &step.before, &step.after))
    }
}

fn replace(f: &Formula, from: &Formula, to: &Formula) -> Formula {
    if f == from {
        return to.clone();
    }
    match f {
        Formula::Var(_) | Formula::Bot => f.clone(),
        Formula::Neg(a) => Formula::neg(replace(a, from, to)),
        Formula::And(a, b) => Formula::and(replace(a, from, to), replace(b, from, to)),
        Formula::Or(a, b) => Formula::or(replace(a, from, to), replace(b, from, to)),
        Formula::Imp(a, b) => Formula::imp(replace(a, from, to), replace(b, from, to)),
        Formula::Box(i, a) => Formula::boxed(*i, replace(a, from, to)),
        Formula::Forall(v, a) => Formula::forall(v.clone(), replace(a, from, to)),
    }
}

/// `f*`, with the eliminations that produced it.
pub fn eliminate_quantifiers(logic: Logic, f: &Formula) -> (Formula, TranslationTrace) {
    let mut trace = TranslationTrace::default();
    let out = star(logic, f, &mut trace);
    (out, trace)
}

fn star(logic: Logic, f: &Formula, trace: &mut TranslationTrace) -> Formula {
    match f {
        Formula::Var(_) | Formula::Bot => f.clone(),
        Formula::Neg(a) => Formula::neg(star(logic, a, trace)),
        Formula::And(a, b) => Formula::and(star(logic, a, trace), star(logic, b, trace)),
        Formula::Or(a, b) => Formula::or(star(logic, a, trace), star(logic, b, trace)),
        Formula::Imp(a, b) => Formula::imp(star(logic, a, trace), star(logic, b, trace)),
        Formula::Box(i, a) => Formula::boxed(*i, star(logic, a, trace)),
        Formula::Forall(p, a) => {
            let body = star(logic, a, trace);
            let after = forget(logic, p, &body).expect("quantifier-free after inner elimination");
            trace.steps.push(TranslationStep {
                var: p.clone(),
                before: Formula::forall(p.clone(), body),
                after: after.clone(),
            });
            after
        }
    }
}
