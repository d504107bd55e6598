#![allow(dead_code)]

use modal_uip::{AgentId, Formula, FormulaMultiset, Sequent, Var};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const VARS: [&str; 3] = ["p", "q", "r"];

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn agent(i: u32) -> AgentId {
    AgentId::new(i).unwrap()
}

/// Shape of the random formulas.
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub vars: usize,
    pub agents: u32,
}

impl Default for Shape {
    fn default() -> Self {
        Shape { vars: 3, agents: 2 }
    }
}

/// A random formula of weight exactly `weight`.
pub fn formula(rng: &mut StdRng, weight: usize, shape: Shape) -> Formula {
    assert!(weight >= 1);
    if weight == 1 {
        return if rng.gen_ratio(1, 8) {
            Formula::Bot
        } else {
            Formula::var(VARS[rng.gen_range(0..shape.vars)])
        };
    }
    let unary = weight == 2 || rng.gen_ratio(2, 5);
    if unary {
        let sub = formula(rng, weight - 1, shape);
        return if rng.gen_bool(0.5) {
            Formula::neg(sub)
        } else {
            Formula::boxed(agent(rng.gen_range(1..=shape.agents)), sub)
        };
    }
    let left = rng.gen_range(1..weight - 1);
    let l = formula(rng, left, shape);
    let r = formula(rng, weight - 1 - left, shape);
    match rng.gen_range(0..3) {
        0 => Formula::and(l, r),
        1 => Formula::or(l, r),
        _ => Formula::imp(l, r),
    }
}

/// A random formula of weight in `1..=max_weight`.
pub fn formula_upto(rng: &mut StdRng, max_weight: usize, shape: Shape) -> Formula {
    let w = rng.gen_range(1..=max_weight);
    formula(rng, w, shape)
}

/// A random sequent of total weight at most `max_weight`, one to three
/// formulas spread over the two sides.
pub fn sequent(rng: &mut StdRng, max_weight: usize, shape: Shape) -> Sequent {
    let total = rng.gen_range(1..=max_weight);
    let parts = rng.gen_range(1..=3usize.min(total));
    let mut weights = vec![1; parts];
    for _ in parts..total {
        let k = rng.gen_range(0..parts);
        weights[k] += 1;
    }
    let mut ant = FormulaMultiset::new();
    let mut suc = FormulaMultiset::new();
    for w in weights {
        let f = formula(rng, w, shape);
        if rng.gen_bool(0.5) {
            ant.push(f);
        } else {
            suc.push(f);
        }
    }
    Sequent::new(ant, suc)
}

/// A random multiset of up to `n` formulas avoiding `avoid`.
pub fn multiset_avoiding(rng: &mut StdRng, n: usize, max_weight: usize, avoid: &Var, shape: Shape) -> FormulaMultiset {
    let count = rng.gen_range(0..=n);
    let mut out = FormulaMultiset::new();
    while out.len() < count {
        let f = formula_upto(rng, max_weight, shape);
        if !f.has_free(avoid) {
            out.push(f);
        }
    }
    out
}

pub fn var(name: &str) -> Var {
    Var::new(name)
}

pub fn pick_var(rng: &mut StdRng, shape: Shape) -> Var {
    Var::new(VARS[rng.gen_range(0..shape.vars)])
}

/// Proves through one `Prover` per logic and keeps the audit figures:
/// search edges, measure failures, and rule-check failures of every
/// derivation returned.
pub struct Audited {
    provers: Vec<modal_uip::Prover>,
    pub calls: usize,
    pub edges: usize,
    pub measure_violations: usize,
    pub derivation_edges: usize,
    pub check_failures: usize,
}

impl Default for Audited {
    fn default() -> Self {
        Audited {
            provers: modal_uip::Logic::ALL.iter().map(|&l| modal_uip::Prover::new(l)).collect(),
            calls: 0,
            edges: 0,
            measure_violations: 0,
            derivation_edges: 0,
            check_failures: 0,
        }
    }
}

impl Audited {
    pub fn derivable(&mut self, logic: modal_uip::Logic, s: &Sequent) -> bool {
        let k = modal_uip::Logic::ALL.iter().position(|&l| l == logic).unwrap();
        let prover = &mut self.provers[k];
        let result = prover.prove(s).expect("first-order sequent");
        let stats = prover.stats();
        self.calls += 1;
        self.edges += stats.edges_checked;
        self.measure_violations += stats.measure_violations;
        match result.derivation() {
            Some(d) => {
                self.derivation_edges += d.size() - 1;
                self.measure_violations += d.measure_violations();
                if !modal_uip::check_derivation(logic, d).ok {
                    self.check_failures += 1;
                }
                true
            }
            None => false,
        }
    }

    pub fn entails(&mut self, logic: modal_uip::Logic, a: &Formula, b: &Formula) -> bool {
        self.derivable(logic, &Sequent::new(vec![a.clone()], vec![b.clone()]))
    }

    pub fn merge(&mut self, other: &Audited) {
        self.calls += other.calls;
        self.edges += other.edges;
        self.measure_violations += other.measure_violations;
        self.derivation_edges += other.derivation_edges;
        self.check_failures += other.check_failures;
    }
}

pub fn with(ms: &FormulaMultiset, f: &Formula) -> FormulaMultiset {
    ms.clone().with(f.clone())
}
