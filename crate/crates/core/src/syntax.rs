//! Formulas, counted multisets of formulas, sequents and the measures that
//! order them.
//!
//! `◇ᵢA`, `⊤` and `∃p.A` are not stored: the smart constructors expand them
//! to `¬□ᵢ¬A`, `¬⊥` and `¬∀p.¬A`.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::Error;

/// An agent index. Agents are numbered from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgentId(u32);

impl AgentId {
    pub fn new(id: u32) -> Result<Self, Error> {
        if id == 0 {
            Err(Error::InvalidAgent(id))
        } else {
            Ok(AgentId(id))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A propositional variable.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Self {
        Var(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var::new(s)
    }
}

/// Which fragment of the language a formula lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    /// Quantifier-free modal formulas.
    L1,
    /// Modal formulas with universal propositional quantifiers.
    L2,
}

/// A modal formula.
///
/// The derived `Ord` is the structural order used everywhere a canonical
/// ordering of formulas is needed: constructor tag first, then agent, then
/// the children left to right, with variables compared by name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Var(Var),
    Bot,
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Imp(Arc<Formula>, Arc<Formula>),
    Neg(Arc<Formula>),
    Box(AgentId, Arc<Formula>),
    Forall(Var, Arc<Formula>),
}

impl Formula {
    pub fn var(name: &str) -> Self {
        Formula::Var(Var::new(name))
    }

    pub fn bot() -> Self {
        Formula::Bot
    }

    pub fn top() -> Self {
        Formula::neg(Formula::Bot)
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Arc::new(l), Arc::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Arc::new(l), Arc::new(r))
    }

    pub fn imp(l: Formula, r: Formula) -> Self {
        Formula::Imp(Arc::new(l), Arc::new(r))
    }

    /// `(l → r) ∧ (r → l)`.
    pub fn iff(l: Formula, r: Formula) -> Self {
        Formula::and(Formula::imp(l.clone(), r.clone()), Formula::imp(r, l))
    }

    pub fn neg(f: Formula) -> Self {
        Formula::Neg(Arc::new(f))
    }

    pub fn boxed(agent: AgentId, f: Formula) -> Self {
        Formula::Box(agent, Arc::new(f))
    }

    /// `◇ᵢA`, stored as `¬□ᵢ¬A`.
    pub fn diamond(agent: AgentId, f: Formula) -> Self {
        Formula::neg(Formula::boxed(agent, Formula::neg(f)))
    }

    pub fn forall(v: Var, f: Formula) -> Self {
        Formula::Forall(v, Arc::new(f))
    }

    /// `∃p.A`, stored as `¬∀p.¬A`.
    pub fn exists(v: Var, f: Formula) -> Self {
        Formula::neg(Formula::forall(v, Formula::neg(f)))
    }

    /// Left-folded disjunction; the empty disjunction is `⊥`.
    pub fn disjunction<I: IntoIterator<Item = Formula>>(items: I) -> Self {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::Bot)
    }

    /// Left-folded conjunction; the empty conjunction is `⊤`.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(items: I) -> Self {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or_else(Formula::top)
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Var(_) | Formula::Bot)
    }

    /// The agent of an outermost box, if any.
    pub fn box_agent(&self) -> Option<AgentId> {
        match self {
            Formula::Box(i, _) => Some(*i),
            _ => None,
        }
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Formula::Var(v) => Some(v),
            _ => None,
        }
    }

    /// Variables, `⊥` and outermost-boxed formulas.
    pub fn is_critical_member(&self) -> bool {
        matches!(self, Formula::Var(_) | Formula::Bot | Formula::Box(..))
    }

    pub fn is_first_order(&self) -> bool {
        match self {
            Formula::Var(_) | Formula::Bot => true,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.is_first_order() && b.is_first_order()
            }
            Formula::Neg(a) | Formula::Box(_, a) => a.is_first_order(),
            Formula::Forall(..) => false,
        }
    }

    pub fn ensure_first_order(&self) -> Result<(), Error> {
        if self.is_first_order() {
            Ok(())
        } else {
            Err(Error::NotFirstOrder)
        }
    }

    /// The weight: 1 for atoms, +1 per unary constructor, +1 per binary
    /// constructor on top of both sides.
    pub fn weight(&self) -> Result<usize, Error> {
        self.ensure_first_order()?;
        Ok(self.weight_unchecked())
    }

    pub(crate) fn weight_unchecked(&self) -> usize {
        match self {
            Formula::Var(_) | Formula::Bot => 1,
            Formula::Neg(a) | Formula::Box(_, a) | Formula::Forall(_, a) => a.weight_unchecked() + 1,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.weight_unchecked() + b.weight_unchecked() + 1
            }
        }
    }

    /// Maximum nesting of boxes.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Var(_) | Formula::Bot => 0,
            Formula::Neg(a) | Formula::Forall(_, a) => a.modal_depth(),
            Formula::Box(_, a) => a.modal_depth() + 1,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.modal_depth().max(b.modal_depth())
            }
        }
    }

    /// Free propositional variables.
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free_vars(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free_vars(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Var(v) => {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
            Formula::Bot => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.collect_free_vars(bound, out);
                b.collect_free_vars(bound, out);
            }
            Formula::Neg(a) | Formula::Box(_, a) => a.collect_free_vars(bound, out),
            Formula::Forall(v, a) => {
                bound.push(v.clone());
                a.collect_free_vars(bound, out);
                bound.pop();
            }
        }
    }

    pub fn has_free(&self, v: &Var) -> bool {
        match self {
            Formula::Var(w) => w == v,
            Formula::Bot => false,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => a.has_free(v) || b.has_free(v),
            Formula::Neg(a) | Formula::Box(_, a) => a.has_free(v),
            Formula::Forall(w, a) => w != v && a.has_free(v),
        }
    }

    /// Agents mentioned by any box in the formula.
    pub fn agents(&self) -> BTreeSet<AgentId> {
        let mut out = BTreeSet::new();
        self.for_each_subformula(&mut |f| {
            if let Formula::Box(i, _) = f {
                out.insert(*i);
            }
        });
        out
    }

    /// Pre-order traversal over all subformula occurrences, including `self`.
    pub fn for_each_subformula<'a>(&'a self, visit: &mut impl FnMut(&'a Formula)) {
        visit(self);
        match self {
            Formula::Var(_) | Formula::Bot => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.for_each_subformula(visit);
                b.for_each_subformula(visit);
            }
            Formula::Neg(a) | Formula::Box(_, a) | Formula::Forall(_, a) => a.for_each_subformula(visit),
        }
    }

    /// `self[p/b]`.
    ///
    /// Substitution stops under a binder for `p`. It fails with
    /// [`Error::Capture`] when a binder would capture a free variable of `b`.
    pub fn substitute(&self, p: &Var, b: &Formula) -> Result<Formula, Error> {
        let b_free = b.free_vars();
        self.subst_inner(p, b, &b_free)
    }

    fn subst_inner(&self, p: &Var, b: &Formula, b_free: &BTreeSet<Var>) -> Result<Formula, Error> {
        Ok(match self {
            Formula::Var(v) if v == p => b.clone(),
            Formula::Var(_) | Formula::Bot => self.clone(),
            Formula::And(l, r) => Formula::and(l.subst_inner(p, b, b_free)?, r.subst_inner(p, b, b_free)?),
            Formula::Or(l, r) => Formula::or(l.subst_inner(p, b, b_free)?, r.subst_inner(p, b, b_free)?),
            Formula::Imp(l, r) => Formula::imp(l.subst_inner(p, b, b_free)?, r.subst_inner(p, b, b_free)?),
            Formula::Neg(a) => Formula::neg(a.subst_inner(p, b, b_free)?),
            Formula::Box(i, a) => Formula::boxed(*i, a.subst_inner(p, b, b_free)?),
            Formula::Forall(v, a) => {
                if v == p || !a.has_free(p) {
                    self.clone()
                } else if b_free.contains(v) {
                    return Err(Error::Capture {
                        var: p.clone(),
                        binder: v.clone(),
                    });
                } else {
                    Formula::forall(v.clone(), a.subst_inner(p, b, b_free)?)
                }
            }
        })
    }

    /// Every boxed subformula, each listed once.
    pub fn boxed_subformulas(&self) -> BTreeSet<&Formula> {
        let mut out = BTreeSet::new();
        self.for_each_subformula(&mut |f| {
            if matches!(f, Formula::Box(..)) {
                out.insert(f);
            }
        });
        out
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::render::formula_text(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::render::formula_text(self))
    }
}

/// Number of distinct boxed subformulas across all the given formulas.
///
/// Boxed subformulas shared between members are counted once, so copying a
/// boxed formula's body next to it leaves the count unchanged.
pub fn box_count<'a, I>(formulas: I) -> usize
where
    I: IntoIterator<Item = &'a Formula>,
{
    let mut all = BTreeSet::new();
    for f in formulas {
        all.extend(f.boxed_subformulas());
    }
    all.len()
}

/// A finite multiset of formulas.
///
/// Members keep the order in which they were inserted; that order drives
/// which formula a search or an interpolant computation picks first.
/// Equality and hashing ignore order and compare counts only.
#[derive(Clone, Default)]
pub struct FormulaMultiset {
    items: Vec<Formula>,
}

impl FormulaMultiset {
    pub fn new() -> Self {
        FormulaMultiset { items: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Formula> {
        self.items.iter()
    }

    pub fn as_slice(&self) -> &[Formula] {
        &self.items
    }

    pub fn get(&self, index: usize) -> Option<&Formula> {
        self.items.get(index)
    }

    pub fn push(&mut self, f: Formula) {
        self.items.push(f);
    }

    pub fn with(mut self, f: Formula) -> Self {
        self.items.push(f);
        self
    }

    pub fn count(&self, f: &Formula) -> usize {
        self.items.iter().filter(|g| *g == f).count()
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.items.contains(f)
    }

    /// Removes one occurrence of `f`; returns whether one was present.
    pub fn remove_one(&mut self, f: &Formula) -> bool {
        match self.items.iter().position(|g| g == f) {
            Some(i) => {
                self.items.remove(i);
                true
            }
            None => false,
        }
    }

    pub fn remove_at(&mut self, index: usize) -> Formula {
        self.items.remove(index)
    }

    /// Replaces the member at `index` by `replacement`, in place.
    pub fn splice_at<I: IntoIterator<Item = Formula>>(&self, index: usize, replacement: I) -> Self {
        let mut items = Vec::with_capacity(self.items.len() + 1);
        items.extend_from_slice(&self.items[..index]);
        items.extend(replacement);
        items.extend_from_slice(&self.items[index + 1..]);
        FormulaMultiset { items }
    }

    /// Counted union: multiplicities add.
    pub fn union(&self, other: &FormulaMultiset) -> Self {
        let mut items = self.items.clone();
        items.extend(other.items.iter().cloned());
        FormulaMultiset { items }
    }

    /// Counted difference: each member of `other` cancels at most one
    /// occurrence.
    pub fn difference(&self, other: &FormulaMultiset) -> Self {
        let mut out = self.clone();
        for f in other.iter() {
            out.remove_one(f);
        }
        out
    }

    /// Members in the canonical structural order.
    pub fn sorted(&self) -> Vec<Formula> {
        let mut v = self.items.clone();
        v.sort();
        v
    }

    /// Distinct members.
    pub fn distinct(&self) -> BTreeSet<&Formula> {
        self.items.iter().collect()
    }

    /// Bodies of the `agent`-boxed members, multiplicities and order kept.
    pub fn flats(&self, agent: AgentId) -> FormulaMultiset {
        self.items
            .iter()
            .filter_map(|f| match f {
                Formula::Box(i, a) if *i == agent => Some((**a).clone()),
                _ => None,
            })
            .collect()
    }

    pub fn weight(&self) -> usize {
        self.items.iter().map(Formula::weight_unchecked).sum()
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        self.items.iter().flat_map(Formula::free_vars).collect()
    }

    pub fn substitute(&self, p: &Var, b: &Formula) -> Result<Self, Error> {
        self.items.iter().map(|f| f.substitute(p, b)).collect()
    }

    pub fn ensure_first_order(&self) -> Result<(), Error> {
        self.items.iter().try_for_each(Formula::ensure_first_order)
    }

    pub fn into_vec(self) -> Vec<Formula> {
        self.items
    }
}

impl PartialEq for FormulaMultiset {
    fn eq(&self, other: &Self) -> bool {
        self.items.len() == other.items.len() && self.sorted() == other.sorted()
    }
}

impl Eq for FormulaMultiset {}

impl Hash for FormulaMultiset {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.sorted().hash(state);
    }
}

impl fmt::Debug for FormulaMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.items.iter()).finish()
    }
}

impl FromIterator<Formula> for FormulaMultiset {
    fn from_iter<T: IntoIterator<Item = Formula>>(iter: T) -> Self {
        FormulaMultiset {
            items: iter.into_iter().collect(),
        }
    }
}

impl From<Vec<Formula>> for FormulaMultiset {
    fn from(items: Vec<Formula>) -> Self {
        FormulaMultiset { items }
    }
}

impl<'a> IntoIterator for &'a FormulaMultiset {
    type Item = &'a Formula;
    type IntoIter = std::slice::Iter<'a, Formula>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}

impl IntoIterator for FormulaMultiset {
    type Item = Formula;
    type IntoIter = std::vec::IntoIter<Formula>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.into_iter()
    }
}

/// `Γ ⇒ Δ`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Sequent {
    pub antecedent: FormulaMultiset,
    pub succedent: FormulaMultiset,
}

impl Sequent {
    pub fn new(antecedent: impl Into<FormulaMultiset>, succedent: impl Into<FormulaMultiset>) -> Self {
        Sequent {
            antecedent: antecedent.into(),
            succedent: succedent.into(),
        }
    }

    /// `⇒ f`.
    pub fn conclusion_of(f: Formula) -> Self {
        Sequent::new(FormulaMultiset::new(), vec![f])
    }

    pub fn weight(&self) -> usize {
        self.antecedent.weight() + self.succedent.weight()
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.antecedent.iter().chain(self.succedent.iter())
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        self.formulas().flat_map(Formula::free_vars).collect()
    }

    pub fn modal_depth(&self) -> usize {
        self.formulas().map(Formula::modal_depth).max().unwrap_or(0)
    }

    pub fn agents(&self) -> BTreeSet<AgentId> {
        self.formulas().flat_map(Formula::agents).collect()
    }

    pub fn ensure_first_order(&self) -> Result<(), Error> {
        self.antecedent.ensure_first_order()?;
        self.succedent.ensure_first_order()
    }

    pub fn substitute(&self, p: &Var, b: &Formula) -> Result<Self, Error> {
        Ok(Sequent::new(
            self.antecedent.substitute(p, b)?,
            self.succedent.substitute(p, b)?,
        ))
    }

    /// Only variables, `⊥` and outermost-boxed formulas on both sides.
    pub fn is_critical(&self) -> bool {
        self.formulas().all(Formula::is_critical_member)
    }

    pub fn measure(&self) -> Measure {
        Measure {
            box_component: box_count(self.formulas()),
            weight_component: self.weight(),
        }
    }
}

impl fmt::Debug for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::render::sequent_text(self))
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::render::sequent_text(self))
    }
}

/// `Σ | Γ ⇒ Δ`, where the store `Σ` holds boxed formulas that have already
/// been unpacked by the reflexivity rule.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct TSequent {
    store: FormulaMultiset,
    pub antecedent: FormulaMultiset,
    pub succedent: FormulaMultiset,
}

impl TSequent {
    pub fn new(
        store: impl Into<FormulaMultiset>,
        antecedent: impl Into<FormulaMultiset>,
        succedent: impl Into<FormulaMultiset>,
    ) -> Result<Self, Error> {
        let store = store.into();
        if let Some(bad) = store.iter().find(|f| f.box_agent().is_none()) {
            return Err(Error::UnboxedStore(bad.clone()));
        }
        Ok(TSequent {
            store,
            antecedent: antecedent.into(),
            succedent: succedent.into(),
        })
    }

    /// `∅ | Γ ⇒ Δ`.
    pub fn from_sequent(s: &Sequent) -> Self {
        TSequent {
            store: FormulaMultiset::new(),
            antecedent: s.antecedent.clone(),
            succedent: s.succedent.clone(),
        }
    }

    pub fn store(&self) -> &FormulaMultiset {
        &self.store
    }

    pub(crate) fn store_push(&mut self, f: Formula) {
        debug_assert!(f.box_agent().is_some());
        self.store.push(f);
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.store
            .iter()
            .chain(self.antecedent.iter())
            .chain(self.succedent.iter())
    }

    /// `⟨b(Σ,Γ,Δ), wt(Γ,Δ)⟩`.
    pub fn measure(&self) -> Measure {
        Measure {
            box_component: box_count(self.formulas()),
            weight_component: self.antecedent.weight() + self.succedent.weight(),
        }
    }

    pub fn ensure_first_order(&self) -> Result<(), Error> {
        self.store.ensure_first_order()?;
        self.antecedent.ensure_first_order()?;
        self.succedent.ensure_first_order()
    }

    /// Forgets the store: `Σ, Γ ⇒ Δ`.
    pub fn flatten(&self) -> Sequent {
        Sequent::new(self.store.union(&self.antecedent), self.succedent.clone())
    }
}

impl fmt::Debug for TSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::render::tsequent_text(self))
    }
}

impl fmt::Display for TSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::render::tsequent_text(self))
    }
}

/// Lexicographic termination measure: box component first, then weight.
///
/// For plain sequents the search only relies on the weight component; the
/// box component matters for T-sequents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Measure {
    pub box_component: usize,
    pub weight_component: usize,
}
