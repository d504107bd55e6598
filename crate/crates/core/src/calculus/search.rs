use std::collections::HashSet;

use super::{strictly_below, Derivation, Judgement, Logic, Position, ProofResult, RuleLabel, SearchStats, Side};
use crate::error::Error;
use crate::syntax::{Formula, FormulaMultiset, Sequent, TSequent};

/// One backward application of a propositional rule.
pub(crate) struct Step {
    pub rule: RuleLabel,
    pub principal: Position,
    pub premises: Vec<(FormulaMultiset, FormulaMultiset)>,
}

/// Decomposes the leftmost compound non-boxed formula, antecedent first.
pub(crate) fn propositional_step(ant: &FormulaMultiset, suc: &FormulaMultiset) -> Option<Step> {
    (0..ant.len())
        .map(Position::ant)
        .chain((0..suc.len()).map(Position::suc))
        .find_map(|pos| decompose_at(ant, suc, pos))
}

/// Applies the propositional rule whose principal formula sits at `pos`.
///
/// Same-side components replace the principal formula in place; components
/// that cross to the other side are appended.
pub(crate) fn decompose_at(ant: &FormulaMultiset, suc: &FormulaMultiset, pos: Position) -> Option<Step> {
    let k = pos.index;
    let (rule, premises) = match pos.side {
        Side::Antecedent => match ant.get(k)? {
            Formula::And(a, b) => (
                RuleLabel::LAnd,
                vec![(ant.splice_at(k, [(**a).clone(), (**b).clone()]), suc.clone())],
            ),
            Formula::Or(a, b) => (
                RuleLabel::LOr,
                vec![
                    (ant.splice_at(k, [(**a).clone()]), suc.clone()),
                    (ant.splice_at(k, [(**b).clone()]), suc.clone()),
                ],
            ),
            Formula::Imp(a, b) => (
                RuleLabel::LImp,
                vec![
                    (ant.splice_at(k, []), suc.clone().with((**a).clone())),
                    (ant.splice_at(k, [(**b).clone()]), suc.clone()),
                ],
            ),
            Formula::Neg(a) => (
                RuleLabel::LNeg,
                vec![(ant.splice_at(k, []), suc.clone().with((**a).clone()))],
            ),
            _ => return None,
        },
        Side::Succedent => match suc.get(k)? {
            Formula::And(a, b) => (
                RuleLabel::RAnd,
                vec![
                    (ant.clone(), suc.splice_at(k, [(**a).clone()])),
                    (ant.clone(), suc.splice_at(k, [(**b).clone()])),
                ],
            ),
            Formula::Or(a, b) => (
                RuleLabel::ROr,
                vec![(ant.clone(), suc.splice_at(k, [(**a).clone(), (**b).clone()]))],
            ),
            Formula::Imp(a, b) => (
                RuleLabel::RImp,
                vec![(ant.clone().with((**a).clone()), suc.splice_at(k, [(**b).clone()]))],
            ),
            Formula::Neg(a) => (
                RuleLabel::RNeg,
                vec![(ant.clone().with((**a).clone()), suc.splice_at(k, []))],
            ),
            _ => return None,
        },
        Side::Store => return None,
    };
    Some(Step { rule, principal: pos, premises })
}

/// `Γ, p ⇒ p, Δ` or `⊥, Γ ⇒ Δ`.
pub(crate) fn initial_step(ant: &FormulaMultiset, suc: &FormulaMultiset) -> Option<(RuleLabel, Vec<Position>)> {
    for (i, f) in ant.iter().enumerate() {
        if let Formula::Var(_) = f {
            if let Some(j) = suc.iter().position(|g| g == f) {
                return Some((RuleLabel::Init, vec![Position::ant(i), Position::suc(j)]));
            }
        }
    }
    ant.iter()
        .position(|f| *f == Formula::Bot)
        .map(|i| (RuleLabel::InitBot, vec![Position::ant(i)]))
}

type PlainKey = (Vec<Formula>, Vec<Formula>);
type TKey = (Vec<Formula>, Vec<Formula>, Vec<Formula>);

/// A proof searcher for one logic.
///
/// Failed sequents are cached across calls on the same `Prover`; since the
/// search is exhaustive the cache only ever short-circuits a search that
/// would fail anyway.
pub struct Prover {
    logic: Logic,
    stats: SearchStats,
    failed: HashSet<PlainKey>,
    failed_t: HashSet<TKey>,
}

impl Prover {
    pub fn new(logic: Logic) -> Self {
        Prover {
            logic,
            stats: SearchStats::default(),
            failed: HashSet::new(),
            failed_t: HashSet::new(),
        }
    }

    pub fn logic(&self) -> Logic {
        self.logic
    }

    /// Statistics of the most recent call.
    pub fn stats(&self) -> SearchStats {
        self.stats
    }

    pub fn prove(&mut self, s: &Sequent) -> Result<ProofResult, Error> {
        s.ensure_first_order()?;
        if self.logic == Logic::KT {
            return self.prove_tplus(&TSequent::from_sequent(s));
        }
        self.stats = SearchStats::default();
        Ok(match self.search(s.clone(), 0) {
            Some(d) => ProofResult::Derivable(d),
            None => ProofResult::NotDerivable(self.stats),
        })
    }

    /// Searches in `G(KT_n⁺)`, whatever logic the prover was built for.
    pub fn prove_tplus(&mut self, t: &TSequent) -> Result<ProofResult, Error> {
        t.ensure_first_order()?;
        self.stats = SearchStats::default();
        Ok(match self.search_t(t.clone(), 0) {
            Some(d) => ProofResult::Derivable(d),
            None => ProofResult::NotDerivable(self.stats),
        })
    }

    /// Shorthand for `prove(..).is_derivable()`; panics on quantified input.
    pub fn derivable(&mut self, s: &Sequent) -> bool {
        self.prove(s).expect("first-order sequent").is_derivable()
    }

    fn audit_edge(&mut self, child: &Judgement, parent: &Judgement) {
        self.stats.edges_checked += 1;
        if !strictly_below(child, parent) {
            self.stats.measure_violations += 1;
            debug_assert!(false, "measure did not decrease: {parent} -> {child}");
        }
    }

    fn enter(&mut self, depth: usize) {
        self.stats.nodes_expanded += 1;
        self.stats.max_depth = self.stats.max_depth.max(depth);
    }

    fn search(&mut self, s: Sequent, depth: usize) -> Option<Derivation> {
        self.enter(depth);
        if let Some((rule, principal)) = initial_step(&s.antecedent, &s.succedent) {
            return Some(Derivation {
                conclusion: Judgement::Plain(s),
                rule,
                principal,
                premises: Vec::new(),
            });
        }
        let key = (s.antecedent.sorted(), s.succedent.sorted());
        if self.failed.contains(&key) {
            self.stats.memo_hits += 1;
            return None;
        }
        let parent = Judgement::Plain(s.clone());

        if let Some(step) = propositional_step(&s.antecedent, &s.succedent) {
            let mut premises = Vec::with_capacity(step.premises.len());
            for (a, b) in step.premises {
                let child = Sequent::new(a, b);
                self.audit_edge(&Judgement::Plain(child.clone()), &parent);
                match self.search(child, depth + 1) {
                    Some(d) => premises.push(d),
                    None => {
                        self.failed.insert(key);
                        return None;
                    }
                }
            }
            return Some(Derivation {
                conclusion: parent,
                rule: step.rule,
                principal: vec![step.principal],
                premises,
            });
        }

        for (j, f) in s.succedent.iter().enumerate() {
            let Formula::Box(agent, body) = f else { continue };
            let child = Sequent::new(s.antecedent.flats(*agent), vec![(**body).clone()]);
            self.audit_edge(&Judgement::Plain(child.clone()), &parent);
            if let Some(d) = self.search(child, depth + 1) {
                let mut principal = boxed_positions(&s.antecedent, *agent, Position::ant);
                principal.push(Position::suc(j));
                return Some(Derivation {
                    conclusion: parent,
                    rule: RuleLabel::BoxK,
                    principal,
                    premises: vec![d],
                });
            }
        }

        if self.logic == Logic::KD {
            let agents: std::collections::BTreeSet<_> =
                s.antecedent.iter().filter_map(Formula::box_agent).collect();
            for agent in agents {
                let child = Sequent::new(s.antecedent.flats(agent), FormulaMultiset::new());
                self.audit_edge(&Judgement::Plain(child.clone()), &parent);
                if let Some(d) = self.search(child, depth + 1) {
                    return Some(Derivation {
                        conclusion: parent,
                        rule: RuleLabel::BoxD,
                        principal: boxed_positions(&s.antecedent, agent, Position::ant),
                        premises: vec![d],
                    });
                }
            }
        }

        self.failed.insert(key);
        None
    }

    fn search_t(&mut self, t: TSequent, depth: usize) -> Option<Derivation> {
        self.enter(depth);
        if let Some((rule, principal)) = initial_step(&t.antecedent, &t.succedent) {
            return Some(Derivation {
                conclusion: Judgement::T(t),
                rule,
                principal,
                premises: Vec::new(),
            });
        }
        let key = (t.store().sorted(), t.antecedent.sorted(), t.succedent.sorted());
        if self.failed_t.contains(&key) {
            self.stats.memo_hits += 1;
            return None;
        }
        let parent = Judgement::T(t.clone());

        if let Some(step) = propositional_step(&t.antecedent, &t.succedent) {
            let mut premises = Vec::with_capacity(step.premises.len());
            for (a, b) in step.premises {
                let child = TSequent::new(t.store().clone(), a, b).expect("store unchanged");
                self.audit_edge(&Judgement::T(child.clone()), &parent);
                match self.search_t(child, depth + 1) {
                    Some(d) => premises.push(d),
                    None => {
                        self.failed_t.insert(key);
                        return None;
                    }
                }
            }
            return Some(Derivation {
                conclusion: parent,
                rule: step.rule,
                principal: vec![step.principal],
                premises,
            });
        }

        // Reflexivity: Σ | Γ, □A ⇒ Δ from □A, Σ | Γ, A ⇒ Δ. Invertible.
        if let Some(k) = t.antecedent.iter().position(|f| f.box_agent().is_some()) {
            let boxed = t.antecedent.get(k).expect("index in range").clone();
            let Formula::Box(_, body) = &boxed else { unreachable!() };
            let mut child = t.clone();
            child.antecedent = t.antecedent.splice_at(k, [(**body).clone()]);
            child.store_push(boxed.clone());
            self.audit_edge(&Judgement::T(child.clone()), &parent);
            return match self.search_t(child, depth + 1) {
                Some(d) => Some(Derivation {
                    conclusion: parent,
                    rule: RuleLabel::BoxTPlus,
                    principal: vec![Position::ant(k)],
                    premises: vec![d],
                }),
                None => {
                    self.failed_t.insert(key);
                    None
                }
            };
        }

        for (j, f) in t.succedent.iter().enumerate() {
            let Formula::Box(agent, body) = f else { continue };
            let child = TSequent::new(FormulaMultiset::new(), t.store().flats(*agent), vec![(**body).clone()])
                .expect("empty store");
            self.audit_edge(&Judgement::T(child.clone()), &parent);
            if let Some(d) = self.search_t(child, depth + 1) {
                let mut principal = boxed_positions(t.store(), *agent, Position::store);
                principal.push(Position::suc(j));
                return Some(Derivation {
                    conclusion: parent,
                    rule: RuleLabel::BoxKPlus,
                    principal,
                    premises: vec![d],
                });
            }
        }

        self.failed_t.insert(key);
        None
    }
}

fn boxed_positions(
    ms: &FormulaMultiset,
    agent: crate::syntax::AgentId,
    at: fn(usize) -> Position,
) -> Vec<Position> {
    ms.iter()
        .enumerate()
        .filter(|(_, f)| f.box_agent() == Some(agent))
        .map(|(k, _)| at(k))
        .collect()
}

/// Decides `s` in `G(logic)`. `KT` runs in the store calculus on `∅ | s`.
pub fn prove(logic: Logic, s: &Sequent) -> Result<ProofResult, Error> {
    Prover::new(logic).prove(s)
}

/// Decides a T-sequent in `G(KT_n⁺)`.
pub fn prove_tplus(t: &TSequent) -> Result<ProofResult, Error> {
    Prover::new(Logic::KT).prove_tplus(t)
}
