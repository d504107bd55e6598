//! Uniform interpolants by forgetting one variable at a time.
//!
//! `forget_kkd(p, Γ, Δ)` computes `𝒜ₚ(Γ;Δ)`, the weakest `p`-free formula `A`
//! such that `Γ, A ⇒ Δ` is derivable in `G(K_n)` or `G(KD_n)`;
//! `forget_t(p, Σ, Γ, Δ)` does the same for `G(KT_n⁺)`. Both follow the
//! backward proof search: propositional steps first, and a disjunction `X`
//! at critical sequents.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::calculus::search::propositional_step;
use crate::calculus::{Logic, Prover};
use crate::error::Error;
use crate::syntax::{AgentId, Formula, FormulaMultiset, Measure, Sequent, TSequent, Var};

/// Counters from one run of the table.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TableAudit {
    /// Recursive calls made.
    pub calls: usize,
    /// Recursive calls whose argument was not strictly below the caller's.
    pub measure_violations: usize,
    /// Returns whose result mentioned `p` or a variable outside the input.
    pub vocabulary_violations: usize,
}

/// `𝒜ₚ(Γ;Δ)` for `K_n` and `KD_n`.
pub fn forget_kkd(p: &Var, gamma: &FormulaMultiset, delta: &FormulaMultiset) -> Result<Formula, Error> {
    forget_kkd_audited(p, gamma, delta).map(|(f, _)| f)
}

pub fn forget_kkd_audited(
    p: &Var,
    gamma: &FormulaMultiset,
    delta: &FormulaMultiset,
) -> Result<(Formula, TableAudit), Error> {
    gamma.ensure_first_order()?;
    delta.ensure_first_order()?;
    let mut table = Table::new(p);
    let f = table.plain(gamma, delta);
    Ok((f, table.audit))
}

/// `𝒜ₚ(Σ|Γ;Δ)` for `KT_n`. Every member of `store` must be outermost-boxed.
pub fn forget_t(
    p: &Var,
    store: &FormulaMultiset,
    gamma: &FormulaMultiset,
    delta: &FormulaMultiset,
) -> Result<Formula, Error> {
    forget_t_audited(p, store, gamma, delta).map(|(f, _)| f)
}

pub fn forget_t_audited(
    p: &Var,
    store: &FormulaMultiset,
    gamma: &FormulaMultiset,
    delta: &FormulaMultiset,
) -> Result<(Formula, TableAudit), Error> {
    let t = TSequent::new(store.clone(), gamma.clone(), delta.clone())?;
    t.ensure_first_order()?;
    let mut table = Table::new(p);
    let f = table.store(&t);
    Ok((f, table.audit))
}

/// `𝒜ₚ(∅;B)` in the table for `logic`.
pub fn forget(logic: Logic, p: &Var, b: &Formula) -> Result<Formula, Error> {
    let delta = FormulaMultiset::from(vec![b.clone()]);
    match logic {
        Logic::K | Logic::KD => forget_kkd(p, &FormulaMultiset::new(), &delta),
        Logic::KT => forget_t(p, &FormulaMultiset::new(), &FormulaMultiset::new(), &delta),
    }
}

/// `ℰₚ(B) = ¬𝒜ₚ(∅;¬B)`.
pub fn exists_forget(logic: Logic, p: &Var, b: &Formula) -> Result<Formula, Error> {
    Ok(Formula::neg(forget(logic, p, &Formula::neg(b.clone()))?))
}

fn ensure_distinct(forget: &[Var]) -> Result<(), Error> {
    let mut seen = HashSet::new();
    match forget.iter().find(|v| !seen.insert(*v)) {
        Some(v) => Err(Error::DuplicateForget(v.clone())),
        None => Ok(()),
    }
}

/// The strongest consequence of `a` free of `forget`:
/// `ℰ_{p₁}(ℰ_{p₂}(⋯ℰ_{pₘ}(a)))`.
pub fn post_interpolant(logic: Logic, a: &Formula, forget: &[Var]) -> Result<Formula, Error> {
    ensure_distinct(forget)?;
    a.ensure_first_order()?;
    forget
        .iter()
        .rev()
        .try_fold(a.clone(), |acc, p| exists_forget(logic, p, &acc))
}

/// The weakest antecedent of `b` free of `forget`:
/// `𝒜_{r₁}(𝒜_{r₂}(⋯𝒜_{rₘ}(b)))`.
pub fn pre_interpolant(logic: Logic, b: &Formula, forget: &[Var]) -> Result<Formula, Error> {
    ensure_distinct(forget)?;
    b.ensure_first_order()?;
    forget.iter().rev().try_fold(b.clone(), |acc, r| self::forget(logic, r, &acc))
}

struct Table<'a> {
    p: &'a Var,
    audit: TableAudit,
    memo: HashMap<(Vec<Formula>, Vec<Formula>), Formula>,
    memo_t: HashMap<(Vec<Formula>, Vec<Formula>, Vec<Formula>), Formula>,
}

fn diamond(agent: AgentId, f: Formula) -> Formula {
    Formula::diamond(agent, f)
}

/// Bodies of the `agent`-boxed members, the one at `principal` first.
fn diamond_flats(ms: &FormulaMultiset, principal: usize, agent: AgentId) -> FormulaMultiset {
    let Some(Formula::Box(_, body)) = ms.get(principal) else {
        unreachable!("principal is boxed")
    };
    let mut out = FormulaMultiset::from(vec![(**body).clone()]);
    for (k, f) in ms.iter().enumerate() {
        match f {
            Formula::Box(i, b) if *i == agent && k != principal => out.push((**b).clone()),
            _ => {}
        }
    }
    out
}

fn without(ms: &FormulaMultiset, p: &Formula) -> FormulaMultiset {
    ms.iter().filter(|f| *f != p).cloned().collect()
}

impl<'a> Table<'a> {
    fn new(p: &'a Var) -> Self {
        Table {
            p,
            audit: TableAudit::default(),
            memo: HashMap::new(),
            memo_t: HashMap::new(),
        }
    }

    fn check_vocabulary(&mut self, result: &Formula, inputs: BTreeSet<Var>) {
        let fv = result.free_vars();
        if fv.contains(self.p) || !fv.is_subset(&inputs) {
            self.audit.vocabulary_violations += 1;
            debug_assert!(false, "vocabulary violated by {result}");
        }
    }

    fn plain_call(&mut self, parent: usize, ant: &FormulaMultiset, suc: &FormulaMultiset) -> Formula {
        self.audit.calls += 1;
        if ant.weight() + suc.weight() >= parent {
            self.audit.measure_violations += 1;
            debug_assert!(false, "table argument did not shrink");
        }
        self.plain(ant, suc)
    }

    fn plain(&mut self, ant: &FormulaMultiset, suc: &FormulaMultiset) -> Formula {
        let key = (ant.as_slice().to_vec(), suc.as_slice().to_vec());
        if let Some(f) = self.memo.get(&key) {
            return f.clone();
        }
        let f = self.plain_uncached(ant, suc);
        let inputs = ant.free_vars().union(&suc.free_vars()).cloned().collect();
        self.check_vocabulary(&f, inputs);
        self.memo.insert(key, f.clone());
        f
    }

    fn plain_uncached(&mut self, ant: &FormulaMultiset, suc: &FormulaMultiset) -> Formula {
        let p = Formula::Var(self.p.clone());
        if ant.contains(&p) && suc.contains(&p) {
            return Formula::top();
        }
        if ant.contains(&Formula::Bot) {
            return Formula::top();
        }
        let weight = ant.weight() + suc.weight();
        if let Some(step) = propositional_step(ant, suc) {
            let parts: Vec<Formula> = step
                .premises
                .iter()
                .map(|(a, b)| self.plain_call(weight, a, b))
                .collect();
            return Formula::conjunction(parts);
        }

        let ant = without(ant, &p);
        let suc = without(suc, &p);
        let mut disjuncts = Vec::new();
        disjuncts.extend(ant.iter().filter(|f| f.is_atom()).map(|r| Formula::neg(r.clone())));
        disjuncts.extend(suc.iter().filter(|f| f.is_atom()).cloned());
        for (k, f) in ant.iter().enumerate() {
            if let Formula::Box(g, _) = f {
                let a = self.plain_call(weight, &diamond_flats(&ant, k, *g), &FormulaMultiset::new());
                disjuncts.push(diamond(*g, a));
            }
        }
        for f in suc.iter() {
            if let Formula::Box(d, delta) = f {
                let a = self.plain_call(weight, &ant.flats(*d), &FormulaMultiset::from(vec![(**delta).clone()]));
                disjuncts.push(Formula::boxed(*d, a));
            }
        }
        Formula::disjunction(disjuncts)
    }

    fn store_call(&mut self, parent: Measure, t: &TSequent) -> Formula {
        self.audit.calls += 1;
        if t.measure() >= parent {
            self.audit.measure_violations += 1;
            debug_assert!(false, "table argument did not shrink");
        }
        self.store(t)
    }

    fn store(&mut self, t: &TSequent) -> Formula {
        let key = (
            t.store().as_slice().to_vec(),
            t.antecedent.as_slice().to_vec(),
            t.succedent.as_slice().to_vec(),
        );
        if let Some(f) = self.memo_t.get(&key) {
            return f.clone();
        }
        let f = self.store_uncached(t);
        let inputs = t.formulas().flat_map(Formula::free_vars).collect();
        self.check_vocabulary(&f, inputs);
        self.memo_t.insert(key, f.clone());
        f
    }

    fn store_uncached(&mut self, t: &TSequent) -> Formula {
        let p = Formula::Var(self.p.clone());
        let (ant, suc) = (&t.antecedent, &t.succedent);
        if ant.contains(&p) && suc.contains(&p) {
            return Formula::top();
        }
        if ant.contains(&Formula::Bot) {
            return Formula::top();
        }
        let measure = t.measure();
        if let Some(step) = propositional_step(ant, suc) {
            let parts: Vec<Formula> = step
                .premises
                .into_iter()
                .map(|(a, b)| {
                    let child = TSequent::new(t.store().clone(), a, b).expect("store unchanged");
                    self.store_call(measure, &child)
                })
                .collect();
            return Formula::conjunction(parts);
        }
        if let Some(k) = ant.iter().position(|f| f.box_agent().is_some()) {
            let boxed = ant.get(k).expect("index in range").clone();
            let Formula::Box(_, body) = &boxed else { unreachable!() };
            let child = TSequent::new(
                t.store().clone().with(boxed.clone()),
                ant.splice_at(k, [(**body).clone()]),
                suc.clone(),
            )
            .expect("boxed store");
            return self.store_call(measure, &child);
        }

        let store = t.store();
        let ant = without(ant, &p);
        let suc = without(suc, &p);
        let mut disjuncts = Vec::new();
        disjuncts.extend(ant.iter().map(|r| Formula::neg(r.clone())));
        disjuncts.extend(suc.iter().filter(|f| f.is_atom()).cloned());
        for (k, f) in store.iter().enumerate() {
            if let Formula::Box(s, _) = f {
                let child = TSequent::new(FormulaMultiset::new(), diamond_flats(store, k, *s), FormulaMultiset::new())
                    .expect("empty store");
                let a = self.store_call(measure, &child);
                disjuncts.push(diamond(*s, a));
            }
        }
        for f in suc.iter() {
            if let Formula::Box(d, delta) = f {
                let child = TSequent::new(
                    FormulaMultiset::new(),
                    store.flats(*d),
                    FormulaMultiset::from(vec![(**delta).clone()]),
                )
                .expect("empty store");
                let a = self.store_call(measure, &child);
                disjuncts.push(Formula::boxed(*d, a));
            }
        }
        Formula::disjunction(disjuncts)
    }
}

/// Which interpolant a problem asks for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// Weakest antecedent of the subject.
    Pre,
    /// Strongest consequence of the subject.
    Post,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterpolationProblem {
    pub logic: Logic,
    pub forget: Vec<Var>,
    pub subject: Formula,
    pub side: Side,
}

impl InterpolationProblem {
    pub fn interpolant(&self) -> Result<Formula, Error> {
        match self.side {
            Side::Pre => pre_interpolant(self.logic, &self.subject, &self.forget),
            Side::Post => post_interpolant(self.logic, &self.subject, &self.forget),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterpolantReport {
    pub interpolant: Formula,
    pub vocab_ok: bool,
    pub implication_ok: bool,
    /// Every partner formula up to this weight was checked.
    pub extremality_checked_up_to: usize,
    pub extremality_ok: bool,
    /// Partner formulas tried.
    pub candidates_checked: usize,
}

impl InterpolantReport {
    pub fn all_ok(&self) -> bool {
        self.vocab_ok && self.implication_ok && self.extremality_ok
    }
}

/// Candidates enumerated by `verify_uniform` before it stops early.
pub const CANDIDATE_BUDGET: usize = 250_000;

/// Computes the interpolant and checks it against every partner formula up
/// to `weight_bound`.
///
/// Partners are built from the subject's variables other than the forgotten
/// ones, one fresh variable, `⊥`, the connectives and a box for each agent of
/// the subject (agent 1 if it has none). For a post-interpolant `I` of `A`:
/// whenever `A ⇒ C` is derivable, so must be `I ⇒ C`. For a pre-interpolant
/// `I` of `B`: whenever `C ⇒ B` is, so must be `C ⇒ I`.
pub fn verify_uniform(problem: &InterpolationProblem, weight_bound: usize) -> Result<InterpolantReport, Error> {
    if weight_bound == 0 {
        return Err(Error::ZeroBound);
    }
    let interpolant = problem.interpolant()?;
    let forget: BTreeSet<&Var> = problem.forget.iter().collect();
    let vocab_ok = interpolant.free_vars().iter().all(|v| !forget.contains(v));

    let mut prover = Prover::new(problem.logic);
    let entails = |prover: &mut Prover, a: &Formula, b: &Formula| {
        prover.derivable(&Sequent::new(vec![a.clone()], vec![b.clone()]))
    };
    let subject = &problem.subject;
    let implication_ok = match problem.side {
        Side::Post => entails(&mut prover, subject, &interpolant),
        Side::Pre => entails(&mut prover, &interpolant, subject),
    };

    let mut atoms: Vec<Formula> = subject
        .free_vars()
        .into_iter()
        .filter(|v| !forget.contains(v))
        .map(Formula::Var)
        .collect();
    let used: BTreeSet<Var> = subject.free_vars().into_iter().chain(problem.forget.iter().cloned()).collect();
    let fresh = (0..)
        .map(|k| Var::new(&format!("z{k}")))
        .find(|v| !used.contains(v))
        .expect("some fresh name");
    atoms.push(Formula::Var(fresh));
    atoms.push(Formula::Bot);
    let mut agents: Vec<AgentId> = subject.agents().into_iter().collect();
    if agents.is_empty() {
        agents.push(AgentId::new(1).expect("agent 1"));
    }

    let mut by_weight: Vec<Vec<Formula>> = vec![Vec::new(), atoms];
    let mut extremality_ok = true;
    let mut checked_up_to = 0;
    let mut candidates_checked = 0;
    'weights: for w in 1..=weight_bound {
        if w >= 2 {
            let layer = grow_layer(&by_weight, w, &agents);
            by_weight.push(layer);
        }
        if candidates_checked + by_weight[w].len() > CANDIDATE_BUDGET {
            break 'weights;
        }
        for c in &by_weight[w] {
            candidates_checked += 1;
            let holds = match problem.side {
                Side::Post => !entails(&mut prover, subject, c) || entails(&mut prover, &interpolant, c),
                Side::Pre => !entails(&mut prover, c, subject) || entails(&mut prover, c, &interpolant),
            };
            if !holds {
                extremality_ok = false;
            }
        }
        checked_up_to = w;
    }

    Ok(InterpolantReport {
        interpolant,
        vocab_ok,
        implication_ok,
        extremality_checked_up_to: checked_up_to,
        extremality_ok,
        candidates_checked,
    })
}

/// All formulas of weight exactly `w` from the lighter layers.
fn grow_layer(by_weight: &[Vec<Formula>], w: usize, agents: &[AgentId]) -> Vec<Formula> {
    let mut out = Vec::new();
    for a in &by_weight[w - 1] {
        out.push(Formula::neg(a.clone()));
        for &i in agents {
            out.push(Formula::boxed(i, a.clone()));
        }
    }
    for lw in 1..w - 1 {
        let rw = w - 1 - lw;
        for l in &by_weight[lw] {
            for r in &by_weight[rw] {
                out.push(Formula::and(l.clone(), r.clone()));
                out.push(Formula::or(l.clone(), r.clone()));
                out.push(Formula::imp(l.clone(), r.clone()));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::prove;
    use crate::parse::{parse_formula, parse_sequent};
    use crate::syntax::Level;

    fn f(text: &str) -> Formula {
        parse_formula(text, Level::L1).unwrap()
    }

    fn v(name: &str) -> Var {
        Var::new(name)
    }

    fn derivable(logic: Logic, text: &str) -> bool {
        prove(logic, &parse_sequent(text).unwrap()).unwrap().is_derivable()
    }

    fn interderivable(logic: Logic, a: &Formula, b: &Formula) -> bool {
        let mut prover = Prover::new(logic);
        prover.derivable(&Sequent::new(vec![a.clone()], vec![b.clone()]))
            && prover.derivable(&Sequent::new(vec![b.clone()], vec![a.clone()]))
    }

    #[test]
    fn golden_table_value() {
        let s = parse_sequent("[1](q & p), [2](s | r), [2]r => [3]r, [2]s").unwrap();
        let got = forget_kkd(&v("p"), &s.antecedent, &s.succedent).unwrap();
        let expected = f("<1>~q | <2>((~s | ~r) & (~r | ~r)) | <2>((~r | ~s) & (~r | ~r)) | [3]r \
             | [2]((~s | ~r | s) & (~r | ~r | s))");
        assert_eq!(got, expected);
    }

    #[test]
    fn shared_p_gives_top() {
        let ps = FormulaMultiset::from(vec![f("p")]);
        assert_eq!(forget_kkd(&v("p"), &ps, &ps).unwrap(), Formula::top());
        assert_eq!(forget_t(&v("p"), &FormulaMultiset::new(), &ps, &ps).unwrap(), Formula::top());
    }

    #[test]
    fn empty_sequent_gives_bot() {
        let e = FormulaMultiset::new();
        assert_eq!(forget_kkd(&v("p"), &e, &e).unwrap(), Formula::Bot);
        assert_eq!(forget_t(&v("p"), &e, &e, &e).unwrap(), Formula::Bot);
    }

    #[test]
    fn barcan_shape() {
        for b in ["p & q", "[2](p -> r)", "~p | [1]q"] {
            let b = f(b);
            let boxed = Formula::boxed(AgentId::new(1).unwrap(), b.clone());
            for logic in Logic::ALL {
                assert_eq!(
                    forget(logic, &v("p"), &boxed).unwrap(),
                    Formula::boxed(AgentId::new(1).unwrap(), forget(logic, &v("p"), &b).unwrap())
                );
            }
        }
    }

    #[test]
    fn t_table_condition_two() {
        let res = forget_t(&v("q"), &FormulaMultiset::new(), &vec![f("p")].into(), &vec![f("[1]p")].into()).unwrap();
        assert!(res.free_vars().iter().all(|x| x.name() == "p"));
        let s = Sequent::new(vec![f("p"), res], vec![f("[1]p")]);
        assert!(prove(Logic::KT, &s).unwrap().is_derivable());
    }

    #[test]
    fn exists_forget_of_p_is_top() {
        assert_eq!(exists_forget(Logic::K, &v("p"), &f("p")).unwrap(), Formula::top());
    }

    #[test]
    fn exists_forget_is_a_consequence() {
        let e = exists_forget(Logic::K, &v("p"), &f("q")).unwrap();
        assert!(!e.has_free(&v("p")));
        assert!(interderivable(Logic::K, &e, &f("q")) || derivable(Logic::K, &format!("q => {e}")));
        let e = exists_forget(Logic::KT, &v("p"), &f("[1]false")).unwrap();
        assert!(derivable(Logic::KT, &format!("[1]false => {e}")));
    }

    #[test]
    fn empty_forget_list_is_identity() {
        let a = f("[1]p -> q");
        assert_eq!(post_interpolant(Logic::K, &a, &[]).unwrap(), a);
        assert_eq!(pre_interpolant(Logic::K, &a, &[]).unwrap(), a);
    }

    #[test]
    fn post_and_pre_on_small_formulas() {
        let post = post_interpolant(Logic::K, &f("p & q"), &[v("p")]).unwrap();
        assert!(derivable(Logic::K, &format!("p & q => {post}")));
        assert!(derivable(Logic::K, &format!("{post} => q")));
        let pre = pre_interpolant(Logic::K, &f("p | q"), &[v("p")]).unwrap();
        assert!(derivable(Logic::K, &format!("{pre} => p | q")));
        assert!(derivable(Logic::K, &format!("q => {pre}")));
        let pre = pre_interpolant(Logic::KD, &f("[1]q"), &[v("r")]).unwrap();
        assert!(interderivable(Logic::KD, &pre, &f("[1]q")));
    }

    #[test]
    fn duplicate_forget_is_rejected() {
        assert_eq!(
            post_interpolant(Logic::K, &f("p"), &[v("p"), v("p")]),
            Err(Error::DuplicateForget(v("p")))
        );
    }

    #[test]
    fn audit_is_clean() {
        let s = parse_sequent("[1](q & p), [2](s | r), [2]r => [3]r, [2]s, p -> q").unwrap();
        let (_, audit) = forget_kkd_audited(&v("p"), &s.antecedent, &s.succedent).unwrap();
        assert!(audit.calls > 0);
        assert_eq!(audit.measure_violations, 0);
        assert_eq!(audit.vocabulary_violations, 0);
        let (_, audit) = forget_t_audited(&v("p"), &FormulaMultiset::new(), &s.antecedent, &s.succedent).unwrap();
        assert_eq!(audit.measure_violations, 0);
        assert_eq!(audit.vocabulary_violations, 0);
    }

    #[test]
    fn verify_small_problems() {
        for (logic, side, text) in [
            (Logic::K, Side::Post, "p & q"),
            (Logic::KD, Side::Pre, "[1](p | q)"),
            (Logic::KT, Side::Post, "<1>(p & q)"),
        ] {
            let problem = InterpolationProblem { logic, forget: vec![v("p")], subject: f(text), side };
            let report = verify_uniform(&problem, 3).unwrap();
            assert!(report.all_ok(), "{logic} {text}: {report:?}");
            assert_eq!(report.extremality_checked_up_to, 3);
        }
    }
}
