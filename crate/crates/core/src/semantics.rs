//! Kripke semantics, used as an independent check on the calculi.
//!
//! `countermodel` works bottom-up over tree models. A world at height `h` is
//! summarised by its type: the truth values it gives to every subformula of
//! the sequent. The types realisable at height `h` are computed from those at
//! height `h - 1`, and a countermodel exists within the bound iff some type
//! makes the antecedent true and the succedent false.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::calculus::Logic;
use crate::error::Error;
use crate::syntax::{AgentId, Formula, Sequent, Var};

pub type World = usize;

/// A finite pointed Kripke model. Worlds are `0..worlds`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KripkeModel {
    pub worlds: usize,
    pub root: World,
    pub relations: BTreeMap<AgentId, BTreeSet<(World, World)>>,
    pub valuation: Vec<BTreeSet<Var>>,
}

impl KripkeModel {
    pub fn new(worlds: usize) -> Self {
        KripkeModel {
            worlds,
            root: 0,
            relations: BTreeMap::new(),
            valuation: vec![BTreeSet::new(); worlds],
        }
    }

    pub fn add_world(&mut self) -> World {
        self.worlds += 1;
        self.valuation.push(BTreeSet::new());
        self.worlds - 1
    }

    pub fn add_edge(&mut self, agent: AgentId, from: World, to: World) {
        self.relations.entry(agent).or_default().insert((from, to));
    }

    pub fn set_true(&mut self, w: World, v: Var) {
        self.valuation[w].insert(v);
    }

    pub fn successors(&self, agent: AgentId, w: World) -> impl Iterator<Item = World> + '_ {
        self.relations
            .get(&agent)
            .into_iter()
            .flat_map(move |edges| edges.range((w, 0)..=(w, usize::MAX)).map(|&(_, v)| v))
    }

    pub fn is_serial(&self, agent: AgentId) -> bool {
        (0..self.worlds).all(|w| self.successors(agent, w).next().is_some())
    }

    pub fn is_reflexive(&self, agent: AgentId) -> bool {
        (0..self.worlds).all(|w| self.relations.get(&agent).is_some_and(|e| e.contains(&(w, w))))
    }

    /// Whether every listed relation meets the frame condition of `logic`.
    pub fn in_frame_class(&self, logic: Logic) -> bool {
        self.relations.keys().all(|&a| match logic {
            Logic::K => true,
            Logic::KD => self.is_serial(a),
            Logic::KT => self.is_reflexive(a),
        })
    }

    /// Adds `w R w` for every world and every listed agent.
    pub fn close_reflexively(&mut self) {
        for edges in self.relations.values_mut() {
            edges.extend((0..self.worlds).map(|w| (w, w)));
        }
    }

    /// Whether the root falsifies `s`: antecedent all true, succedent all false.
    pub fn refutes(&self, s: &Sequent) -> bool {
        s.antecedent.iter().all(|f| eval(self, self.root, f))
            && s.succedent.iter().all(|f| !eval(self, self.root, f))
    }
}

/// Truth of `f` at `w`. Quantifiers range over all sets of worlds.
pub fn eval(m: &KripkeModel, w: World, f: &Formula) -> bool {
    eval_in(m, w, f, &mut Vec::new())
}

fn eval_in(m: &KripkeModel, w: World, f: &Formula, env: &mut Vec<(Var, Vec<bool>)>) -> bool {
    match f {
        Formula::Var(v) => match env.iter().rev().find(|(x, _)| x == v) {
            Some((_, ext)) => ext[w],
            None => m.valuation[w].contains(v),
        },
        Formula::Bot => false,
        Formula::Neg(a) => !eval_in(m, w, a, env),
        Formula::And(a, b) => eval_in(m, w, a, env) && eval_in(m, w, b, env),
        Formula::Or(a, b) => eval_in(m, w, a, env) || eval_in(m, w, b, env),
        Formula::Imp(a, b) => !eval_in(m, w, a, env) || eval_in(m, w, b, env),
        Formula::Box(i, a) => {
            let succ: Vec<World> = m.successors(*i, w).collect();
            succ.into_iter().all(|v| eval_in(m, v, a, env))
        }
        Formula::Forall(v, a) => {
            assert!(m.worlds < 20, "quantifier evaluation over {} worlds", m.worlds);
            (0u32..1 << m.worlds).all(|bits| {
                env.push((v.clone(), (0..m.worlds).map(|k| bits >> k & 1 == 1).collect()));
                let holds = eval_in(m, w, a, env);
                env.pop();
                holds
            })
        }
    }
}

/// A tree model of `logic`'s frame class refuting `s` at its root, of height
/// at most `depth`, or `None` if there is none.
///
/// With `depth` at least the modal depth of `s` the search is complete: a
/// `None` then means `s` is valid in the frame class.
pub fn countermodel(logic: Logic, s: &Sequent, depth: usize) -> Result<Option<KripkeModel>, Error> {
    s.ensure_first_order()?;
    let oracle = Oracle::new(logic, s);
    let mut levels: Vec<Vec<TypeRec>> = vec![oracle.leaves()];
    for h in 0..=depth {
        if h > 0 {
            let next = oracle.grow(&levels[h - 1]);
            levels.push(next);
        }
        if let Some(k) = levels[h].iter().position(|t| oracle.refutes(&t.truth)) {
            let model = oracle.build(&levels, h, k);
            assert!(model.refutes(s), "oracle built a model that does not refute {s}");
            assert!(model.in_frame_class(logic));
            return Ok(Some(model));
        }
    }
    Ok(None)
}

type Mask = u128;

/// A realisable world type with one witness for how to realise it.
struct TypeRec {
    truth: Vec<bool>,
    val: u32,
    /// Per agent, children indices into the previous level. At height zero
    /// in KD the children are a sink world instead.
    children: Vec<Vec<usize>>,
}

struct Oracle {
    logic: Logic,
    /// Subformulas, lighter first.
    closure: Vec<Formula>,
    vars: Vec<Var>,
    agents: Vec<AgentId>,
    /// Per agent, closure indices of the bodies `A` of `□ᵢA` in the closure.
    bodies: Vec<Vec<usize>>,
    ant: Vec<usize>,
    suc: Vec<usize>,
}

impl Oracle {
    fn new(logic: Logic, s: &Sequent) -> Self {
        let mut set = BTreeSet::new();
        for f in s.formulas() {
            f.for_each_subformula(&mut |g| {
                set.insert(g.clone());
            });
        }
        let mut closure: Vec<Formula> = set.into_iter().collect();
        closure.sort_by_key(Formula::weight_unchecked);
        let index: HashMap<&Formula, usize> = closure.iter().enumerate().map(|(k, f)| (f, k)).collect();
        let vars: Vec<Var> = s.free_vars().into_iter().collect();
        assert!(vars.len() < 32, "too many variables for the oracle");
        let agents: Vec<AgentId> = s.agents().into_iter().collect();
        let bodies: Vec<Vec<usize>> = agents
            .iter()
            .map(|&i| {
                closure
                    .iter()
                    .filter_map(|f| match f {
                        Formula::Box(j, a) if *j == i => Some(index[&**a]),
                        _ => None,
                    })
                    .collect()
            })
            .collect();
        assert!(bodies.iter().all(|b| b.len() <= 128), "too many boxes for the oracle");
        let ant = s.antecedent.iter().map(|f| index[f]).collect();
        let suc = s.succedent.iter().map(|f| index[f]).collect();
        Oracle { logic, closure, vars, agents, bodies, ant, suc }
    }

    fn refutes(&self, truth: &[bool]) -> bool {
        self.ant.iter().all(|&k| truth[k]) && self.suc.iter().all(|&k| !truth[k])
    }

    fn agent_index(&self, i: AgentId) -> usize {
        self.agents.binary_search(&i).expect("agent of the sequent")
    }

    /// Truth values at a world with valuation `val` whose successors falsify
    /// exactly the bodies in `falsified`. `reflexive` makes the world its own
    /// successor as well.
    fn evaluate(&self, val: u32, falsified: &[Mask], reflexive: bool) -> Vec<bool> {
        let mut truth = vec![false; self.closure.len()];
        let index = |f: &Formula| self.closure.binary_search_by(|g| cmp_in_closure(g, f)).expect("subformula");
        for k in 0..self.closure.len() {
            truth[k] = match &self.closure[k] {
                Formula::Var(v) => {
                    let pos = self.vars.binary_search(v).expect("variable of the sequent");
                    val >> pos & 1 == 1
                }
                Formula::Bot => false,
                Formula::Neg(a) => !truth[index(a)],
                Formula::And(a, b) => truth[index(a)] && truth[index(b)],
                Formula::Or(a, b) => truth[index(a)] || truth[index(b)],
                Formula::Imp(a, b) => !truth[index(a)] || truth[index(b)],
                Formula::Box(i, a) => {
                    let ai = self.agent_index(*i);
                    let body = index(a);
                    let pos = self.bodies[ai].iter().position(|&b| b == body).expect("box body");
                    falsified[ai] >> pos & 1 == 0 && (!reflexive || truth[body])
                }
                Formula::Forall(..) => unreachable!("first-order input"),
            };
        }
        truth
    }

    fn falsified(&self, truth: &[bool]) -> Vec<Mask> {
        self.bodies
            .iter()
            .map(|bs| {
                bs.iter()
                    .enumerate()
                    .filter(|(_, &b)| !truth[b])
                    .fold(0, |m, (pos, _)| m | 1 << pos)
            })
            .collect()
    }

    fn valuations(&self) -> impl Iterator<Item = u32> {
        0..1u32 << self.vars.len()
    }

    fn leaves(&self) -> Vec<TypeRec> {
        let no_children = vec![Vec::new(); self.agents.len()];
        let sink = self.falsified(&self.evaluate(0, &vec![0; self.agents.len()], true));
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for val in self.valuations() {
            let truth = match self.logic {
                Logic::K => self.evaluate(val, &vec![0; self.agents.len()], false),
                Logic::KD => self.evaluate(val, &sink, false),
                Logic::KT => self.evaluate(val, &vec![0; self.agents.len()], true),
            };
            if seen.insert(truth.clone()) {
                out.push(TypeRec { truth, val, children: no_children.clone() });
            }
        }
        out
    }

    fn grow(&self, below: &[TypeRec]) -> Vec<TypeRec> {
        let child_sets: Vec<Vec<Mask>> = below.iter().map(|t| self.falsified(&t.truth)).collect();
        // Per agent: every achievable union of children's falsified sets.
        let options: Vec<Vec<(Mask, Vec<usize>)>> = (0..self.agents.len())
            .map(|ai| {
                let mut reach: BTreeMap<Mask, Vec<usize>> = BTreeMap::new();
                if self.logic != Logic::KD {
                    reach.insert(0, Vec::new());
                }
                for (t, sets) in child_sets.iter().enumerate() {
                    reach.entry(sets[ai]).or_insert_with(|| vec![t]);
                }
                loop {
                    let mut added = Vec::new();
                    for (mask, witness) in &reach {
                        for (t, sets) in child_sets.iter().enumerate() {
                            let u = mask | sets[ai];
                            if !reach.contains_key(&u) && !added.iter().any(|(m, _)| *m == u) {
                                let mut w = witness.clone();
                                w.push(t);
                                added.push((u, w));
                            }
                        }
                    }
                    if added.is_empty() {
                        break;
                    }
                    reach.extend(added);
                }
                reach.into_iter().collect()
            })
            .collect();

        let reflexive = self.logic == Logic::KT;
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for val in self.valuations() {
            let mut choice = vec![0usize; self.agents.len()];
            loop {
                let falsified: Vec<Mask> = choice.iter().enumerate().map(|(ai, &c)| options[ai][c].0).collect();
                let truth = self.evaluate(val, &falsified, reflexive);
                if seen.insert(truth.clone()) {
                    let children = choice.iter().enumerate().map(|(ai, &c)| options[ai][c].1.clone()).collect();
                    out.push(TypeRec { truth, val, children });
                }
                // Odometer over the per-agent options.
                let mut ai = 0;
                loop {
                    if ai == choice.len() {
                        break;
                    }
                    choice[ai] += 1;
                    if choice[ai] < options[ai].len() {
                        break;
                    }
                    choice[ai] = 0;
                    ai += 1;
                }
                if ai == choice.len() {
                    break;
                }
            }
        }
        out
    }

    fn build(&self, levels: &[Vec<TypeRec>], height: usize, k: usize) -> KripkeModel {
        let mut m = KripkeModel::new(0);
        for &a in &self.agents {
            m.relations.insert(a, BTreeSet::new());
        }
        let mut sink = None;
        m.root = self.instantiate(levels, height, k, &mut m, &mut sink);
        if self.logic == Logic::KT {
            m.close_reflexively();
        }
        m
    }

    fn instantiate(
        &self,
        levels: &[Vec<TypeRec>],
        height: usize,
        k: usize,
        m: &mut KripkeModel,
        sink: &mut Option<World>,
    ) -> World {
        let t = &levels[height][k];
        let w = m.add_world();
        for (pos, v) in self.vars.iter().enumerate() {
            if t.val >> pos & 1 == 1 {
                m.set_true(w, v.clone());
            }
        }
        if height == 0 {
            if self.logic == Logic::KD && !self.agents.is_empty() {
                let s = *sink.get_or_insert_with(|| {
                    let s = m.add_world();
                    for &a in &self.agents {
                        m.add_edge(a, s, s);
                    }
                    s
                });
                for &a in &self.agents {
                    m.add_edge(a, w, s);
                }
            }
            return w;
        }
        for (ai, kids) in t.children.iter().enumerate() {
            for &c in kids {
                let v = self.instantiate(levels, height - 1, c, m, sink);
                m.add_edge(self.agents[ai], w, v);
            }
        }
        w
    }
}

/// The closure order: weight first, then structure.
fn cmp_in_closure(a: &Formula, b: &Formula) -> std::cmp::Ordering {
    a.weight_unchecked().cmp(&b.weight_unchecked()).then_with(|| a.cmp(b))
}
