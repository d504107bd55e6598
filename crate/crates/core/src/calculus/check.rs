use std::collections::BTreeSet;

use super::search::decompose_at;
use super::{Derivation, Judgement, Logic, Position, RuleLabel, Side};
use crate::syntax::{AgentId, Formula, FormulaMultiset, Sequent, TSequent};

/// A rule-schema violation at one node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Child indices from the root to the offending node.
    pub path: Vec<usize>,
    pub rule: RuleLabel,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

/// Validates every node of `d` against its rule in `G(logic)`.
///
/// Plain-sequent nodes are checked against the K/KD/KT rules, T-sequent
/// nodes against the store calculus. Premises are compared as multisets.
pub fn check_derivation(logic: Logic, d: &Derivation) -> CheckReport {
    let mut violations = Vec::new();
    check_node(logic, d, &mut Vec::new(), &mut violations);
    CheckReport {
        ok: violations.is_empty(),
        violations,
    }
}

fn check_node(logic: Logic, d: &Derivation, path: &mut Vec<usize>, out: &mut Vec<Violation>) {
    let mut report = |message: String| {
        out.push(Violation {
            path: path.clone(),
            rule: d.rule,
            message,
        })
    };
    match expected_premises(logic, d) {
        Ok(expected) => {
            let actual: Vec<&Judgement> = d.premises.iter().map(|p| &p.conclusion).collect();
            if expected.len() != actual.len() {
                report(format!(
                    "{} expects {} premise(s), found {}",
                    d.rule,
                    expected.len(),
                    actual.len()
                ));
            } else {
                for (k, (want, got)) in expected.iter().zip(actual).enumerate() {
                    if want != got {
                        report(format!("premise {k} should be `{want}`, found `{got}`"));
                    }
                }
            }
        }
        Err(messages) => {
            for m in messages {
                report(m);
            }
        }
    }
    for (k, child) in d.premises.iter().enumerate() {
        path.push(k);
        check_node(logic, child, path, out);
        path.pop();
    }
}

/// The premises the rule instance at `d` must have, or why it is no
/// instance at all.
fn expected_premises(logic: Logic, d: &Derivation) -> Result<Vec<Judgement>, Vec<String>> {
    let allowed = match (&d.conclusion, d.rule) {
        (_, RuleLabel::BoxD) => logic == Logic::KD && matches!(d.conclusion, Judgement::Plain(_)),
        (Judgement::Plain(_), RuleLabel::BoxT) => logic == Logic::KT,
        (Judgement::Plain(_), RuleLabel::BoxKPlus | RuleLabel::BoxTPlus) => false,
        (Judgement::T(_), RuleLabel::BoxK | RuleLabel::BoxT) => false,
        (Judgement::T(_), _) => logic == Logic::KT,
        (Judgement::Plain(_), _) => true,
    };
    if !allowed {
        let kind = match d.conclusion {
            Judgement::Plain(_) => "plain sequent",
            Judgement::T(_) => "T-sequent",
        };
        return Err(vec![format!("{} is not a rule of {} on a {kind}", d.rule, logic)]);
    }

    let (store, ant, suc) = match &d.conclusion {
        Judgement::Plain(s) => (None, &s.antecedent, &s.succedent),
        Judgement::T(t) => (Some(t.store()), &t.antecedent, &t.succedent),
    };
    let at = |p: Position| -> Option<&Formula> {
        match p.side {
            Side::Store => store.and_then(|s| s.get(p.index)),
            Side::Antecedent => ant.get(p.index),
            Side::Succedent => suc.get(p.index),
        }
    };
    if let Some(bad) = d.principal.iter().find(|p| at(**p).is_none()) {
        return Err(vec![format!("principal position {bad:?} is out of range")]);
    }
    let distinct: BTreeSet<_> = d.principal.iter().collect();
    if distinct.len() != d.principal.len() {
        return Err(vec!["principal positions repeat".to_string()]);
    }
    let rebuild = |a: FormulaMultiset, b: FormulaMultiset, new_store: Option<FormulaMultiset>| match &d.conclusion {
        Judgement::Plain(_) => Judgement::Plain(Sequent::new(a, b)),
        Judgement::T(t) => Judgement::T(
            TSequent::new(new_store.unwrap_or_else(|| t.store().clone()), a, b).expect("boxed store"),
        ),
    };

    match d.rule {
        RuleLabel::Init => match d.principal.as_slice() {
            [l, r] if l.side == Side::Antecedent && r.side == Side::Succedent => {
                match (at(*l), at(*r)) {
                    (Some(Formula::Var(x)), Some(Formula::Var(y))) if x == y => Ok(vec![]),
                    _ => Err(vec!["Init needs the same variable on both sides".to_string()]),
                }
            }
            _ => Err(vec!["Init needs one antecedent and one succedent position".to_string()]),
        },
        RuleLabel::InitBot => match d.principal.as_slice() {
            [l] if l.side == Side::Antecedent && at(*l) == Some(&Formula::Bot) => Ok(vec![]),
            _ => Err(vec!["InitBot needs ⊥ in the antecedent".to_string()]),
        },
        RuleLabel::RAnd
        | RuleLabel::LAnd
        | RuleLabel::ROr
        | RuleLabel::LOr
        | RuleLabel::RImp
        | RuleLabel::LImp
        | RuleLabel::RNeg
        | RuleLabel::LNeg => {
            let [pos] = d.principal.as_slice() else {
                return Err(vec![format!("{} needs exactly one principal formula", d.rule)]);
            };
            match decompose_at(ant, suc, *pos) {
                Some(step) if step.rule == d.rule => Ok(step
                    .premises
                    .into_iter()
                    .map(|(a, b)| rebuild(a, b, None))
                    .collect()),
                _ => Err(vec![format!("principal formula does not match {}", d.rule)]),
            }
        }
        RuleLabel::BoxT => {
            let [pos] = d.principal.as_slice() else {
                return Err(vec!["BoxT needs exactly one principal formula".to_string()]);
            };
            match (pos.side, at(*pos)) {
                (Side::Antecedent, Some(Formula::Box(_, body))) => {
                    Ok(vec![rebuild(ant.clone().with((**body).clone()), suc.clone(), None)])
                }
                _ => Err(vec!["BoxT needs a boxed antecedent formula".to_string()]),
            }
        }
        RuleLabel::BoxTPlus => {
            let [pos] = d.principal.as_slice() else {
                return Err(vec!["BoxTPlus needs exactly one principal formula".to_string()]);
            };
            match (pos.side, at(*pos)) {
                (Side::Antecedent, Some(boxed @ Formula::Box(_, body))) => {
                    let new_store = store.expect("T-sequent").clone().with(boxed.clone());
                    Ok(vec![rebuild(
                        ant.splice_at(pos.index, [(**body).clone()]),
                        suc.clone(),
                        Some(new_store),
                    )])
                }
                _ => Err(vec!["BoxTPlus needs a boxed antecedent formula".to_string()]),
            }
        }
        RuleLabel::BoxK | RuleLabel::BoxKPlus => {
            let plus = d.rule == RuleLabel::BoxKPlus;
            let left_side = if plus { Side::Store } else { Side::Antecedent };
            let right: Vec<_> = d.principal.iter().filter(|p| p.side == Side::Succedent).collect();
            let [rpos] = right.as_slice() else {
                return Err(vec![format!("{} needs exactly one principal succedent formula", d.rule)]);
            };
            let Some(Formula::Box(agent, goal)) = at(**rpos) else {
                return Err(vec![format!("{} principal succedent formula must be boxed", d.rule)]);
            };
            let mut errors = Vec::new();
            if d.principal.iter().any(|p| p.side != left_side && p.side != Side::Succedent) {
                errors.push(format!("{} principal formulas must come from the {left_side:?}", d.rule));
            }
            let left = store.filter(|_| plus).unwrap_or(ant);
            let bodies = boxed_context(left, *agent, left_side, &d.principal, &mut errors);
            if plus {
                if let Some(f) = ant.iter().find(|f| !f.is_atom()) {
                    errors.push(format!("Π contains only propositional variables and ⊥, found `{f}`"));
                }
            }
            for (k, f) in suc.iter().enumerate() {
                if k != rpos.index && !f.is_critical_member() {
                    errors.push(format!("Ω must be critical, found `{f}`"));
                }
            }
            if !errors.is_empty() {
                return Err(errors);
            }
            let goal = FormulaMultiset::from(vec![(**goal).clone()]);
            Ok(vec![if plus {
                Judgement::T(TSequent::new(FormulaMultiset::new(), bodies, goal).expect("empty store"))
            } else {
                Judgement::Plain(Sequent::new(bodies, goal))
            }])
        }
        RuleLabel::BoxD => {
            let mut errors = Vec::new();
            if d.principal.iter().any(|p| p.side != Side::Antecedent) {
                errors.push("BoxD principal formulas must come from the antecedent".to_string());
            }
            let agents: BTreeSet<AgentId> = d.principal.iter().filter_map(|p| at(*p)?.box_agent()).collect();
            let agent = match agents.iter().collect::<Vec<_>>().as_slice() {
                [] => {
                    return Err(vec!["BoxD premise antecedent must be non-empty (Γ ≠ ∅)".to_string()]);
                }
                [a] if agents.len() == 1 && d.principal.iter().all(|p| at(*p).is_some_and(|f| f.box_agent().is_some())) => **a,
                _ => return Err(vec!["BoxD principal formulas must share one agent".to_string()]),
            };
            let bodies = boxed_context(ant, agent, Side::Antecedent, &d.principal, &mut errors);
            if let Some(f) = suc.iter().find(|f| !f.is_critical_member()) {
                errors.push(format!("Ω must be critical, found `{f}`"));
            }
            if !errors.is_empty() {
                return Err(errors);
            }
            Ok(vec![Judgement::Plain(Sequent::new(bodies, FormulaMultiset::new()))])
        }
    }
}

/// Bodies of the principal `agent`-boxed members of `side`, checking that the
/// rest of that side is a legal context.
fn boxed_context(
    members: &FormulaMultiset,
    agent: AgentId,
    side: Side,
    principal: &[Position],
    errors: &mut Vec<String>,
) -> FormulaMultiset {
    let mut bodies = FormulaMultiset::new();
    for (k, f) in members.iter().enumerate() {
        let is_principal = principal.contains(&Position { side, index: k });
        match f {
            Formula::Box(i, body) if *i == agent => {
                if is_principal {
                    bodies.push((**body).clone());
                } else {
                    errors.push(format!("Σ contains □{agent}: `{f}` must be principal"));
                }
            }
            _ if is_principal => errors.push(format!("principal `{f}` is not □{agent}-boxed")),
            _ if !f.is_critical_member() => errors.push(format!("Σ must be critical, found `{f}`")),
            _ => {}
        }
    }
    bodies
}
