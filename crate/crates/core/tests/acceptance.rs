//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.

mod common;

use std::time::{Duration, Instant};

use common::{formula_upto, multiset_avoiding, pick_var, rng, sequent, var, Audited, Shape};
use modal_uip::interpolation::{forget_kkd_audited, forget_t_audited, Side, TableAudit};
use modal_uip::{
    countermodel, forget, naive_kt_prove, parse_formula, parse_sequent, verify_uniform, AgentId,
    Formula, FormulaMultiset, InterpolationProblem, Level, Logic, NaiveVerdict, Sequent, Var,
};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
    audit: Audited,
    table: TableAudit,
}

impl Outcome {
    fn new(pass: bool, detail: String, audit: Audited) -> Self {
        Outcome { pass, detail, audit, table: TableAudit::default() }
    }
}

fn f(text: &str) -> Formula {
    parse_formula(text, Level::L1).unwrap()
}

fn a(i: u32) -> AgentId {
    AgentId::new(i).unwrap()
}

fn iff(a: &Formula, b: &Formula) -> Formula {
    Formula::iff(a.clone(), b.clone())
}

fn add_table(total: &mut TableAudit, t: TableAudit) {
    total.calls += t.calls;
    total.measure_violations += t.measure_violations;
    total.vocabulary_violations += t.vocabulary_violations;
}

/// `𝒜ₚ(Γ;Δ)` in the table for `logic`.
fn table(logic: Logic, p: &Var, s: &Sequent, audit: &mut TableAudit) -> Formula {
    let (out, t) = match logic {
        Logic::K | Logic::KD => forget_kkd_audited(p, &s.antecedent, &s.succedent),
        Logic::KT => forget_t_audited(p, &FormulaMultiset::new(), &s.antecedent, &s.succedent),
    }
    .unwrap();
    add_table(audit, t);
    out
}

fn golden_interpolant() -> Outcome {
    let mut audit = Audited::default();
    let s = parse_sequent("[1](q & p), [2](s | r), [2]r => [3]r, [2]s").unwrap();
    let (got, table) = forget_kkd_audited(&var("p"), &s.antecedent, &s.succedent).unwrap();
    let expected = f("<1>~q | <2>((~s | ~r) & (~r | ~r)) | <2>((~r | ~s) & (~r | ~r)) | [3]r \
         | [2]((~s | ~r | s) & (~r | ~r | s))");
    let exact = got == expected;
    let equivalent = [Logic::K, Logic::KD]
        .iter()
        .all(|&l| audit.entails(l, &got, &expected) && audit.entails(l, &expected, &got));
    let mut out = Outcome::new(
        exact && equivalent,
        format!("exact match: {exact}, interderivable in K and KD: {equivalent}"),
        audit,
    );
    out.table = table;
    out
}

fn axiom_matrix() -> Outcome {
    let mut audit = Audited::default();
    let axioms = [
        ("K", "=> [1](p -> q) -> ([1]p -> [1]q)", [true, true, true]),
        ("D", "=> ~[1]false", [false, true, true]),
        ("T", "=> [1]p -> p", [false, false, true]),
    ];
    let mut failures = Vec::new();
    for (name, text, expected) in axioms {
        let s = parse_sequent(text).unwrap();
        for (k, logic) in Logic::ALL.into_iter().enumerate() {
            if audit.derivable(logic, &s) != expected[k] {
                failures.push(format!("{name} in {logic}"));
            }
        }
    }

    let mut rng = rng(2);
    let shape = Shape::default();
    let mut necessitation = 0;
    for logic in Logic::ALL {
        let mut found = 0;
        let mut tries = 0;
        while found < 100 && tries < 200_000 {
            tries += 1;
            let s = sequent(&mut rng, 10, shape);
            if !audit.derivable(logic, &s) {
                continue;
            }
            let theorem = Formula::imp(
                Formula::conjunction(s.antecedent.iter().cloned()),
                Formula::disjunction(s.succedent.iter().cloned()),
            );
            if !audit.derivable(logic, &Sequent::conclusion_of(theorem.clone())) {
                failures.push(format!("{logic}: folding {s} into a formula"));
                continue;
            }
            found += 1;
            let boxed = Formula::boxed(a(rng.gen_range(1..=2)), theorem);
            if !audit.derivable(logic, &Sequent::conclusion_of(boxed.clone())) {
                failures.push(format!("{logic}: necessitation of {boxed}"));
            }
        }
        necessitation += found;
    }
    let pass = failures.is_empty() && necessitation == 300;
    Outcome::new(
        pass,
        format!("9 axiom cells, necessitation on {necessitation} theorems, failures: {failures:?}"),
        audit,
    )
}

fn loop_example() -> Outcome {
    let mut audit = Audited::default();
    let s = parse_sequent("p => <1>(p & q)").unwrap();
    let not_derivable = !audit.derivable(Logic::KT, &s);
    let naive = naive_kt_prove(&s, 12).unwrap();
    Outcome::new(
        not_derivable && naive == NaiveVerdict::Unknown,
        format!("KT search not derivable: {not_derivable}, naive search at height 12: {naive:?}"),
        audit,
    )
}

fn uniform_interpolation_conditions() -> Outcome {
    let mut audit = Audited::default();
    let mut tables = TableAudit::default();
    let shape = Shape::default();
    let mut report = Vec::new();
    let mut pass = true;
    for (k, logic) in Logic::ALL.into_iter().enumerate() {
        let mut rng = rng(40 + k as u64);
        let (mut vocab, mut soundness, mut extremal, mut extremal_live, mut semantic) = (0, 0, 0, 0, 0);
        let n = 500;
        for _ in 0..n {
            let s = sequent(&mut rng, 12, shape);
            let p = pick_var(&mut rng, shape);
            let interp = table(logic, &p, &s, &mut tables);

            let inputs = s.free_vars();
            let fv = interp.free_vars();
            if fv.contains(&p) || !fv.is_subset(&inputs) {
                vocab += 1;
            }

            let with_interp = Sequent::new(s.antecedent.clone().with(interp.clone()), s.succedent.clone());
            if !audit.derivable(logic, &with_interp) {
                soundness += 1;
            }
            if countermodel(logic, &with_interp, with_interp.modal_depth()).unwrap().is_some() {
                semantic += 1;
            }

            for _ in 0..3 {
                let pi = multiset_avoiding(&mut rng, 2, 5, &p, shape);
                let lambda = multiset_avoiding(&mut rng, 2, 5, &p, shape);
                let big = Sequent::new(pi.union(&s.antecedent), s.succedent.union(&lambda));
                if audit.derivable(logic, &big) {
                    extremal_live += 1;
                    let small = Sequent::new(pi.clone(), lambda.clone().with(interp.clone()));
                    if !audit.derivable(logic, &small) {
                        extremal += 1;
                    }
                }
            }
        }
        pass &= vocab + soundness + extremal + semantic == 0;
        report.push(format!(
            "{logic}: {n} sequents, (i) failures {vocab}, (ii) failures {soundness} (countermodels {semantic}), \
             (iii) failures {extremal} of {extremal_live} live instances"
        ));
    }
    pass &= tables.measure_violations + tables.vocabulary_violations == 0;
    let mut out = Outcome::new(pass, report.join("; "), audit);
    out.table = tables;
    out
}

/// A formula equivalent to `a` by a few classical rewrites.
fn equivalent_variant(rng: &mut rand::rngs::StdRng, a: &Formula, shape: Shape) -> Formula {
    let c = formula_upto(rng, 3, shape);
    match rng.gen_range(0..5) {
        0 => Formula::neg(Formula::neg(a.clone())),
        1 => Formula::and(a.clone(), a.clone()),
        2 => Formula::or(a.clone(), Formula::Bot),
        3 => Formula::and(a.clone(), Formula::or(a.clone(), c)),
        _ => Formula::imp(Formula::imp(a.clone(), Formula::Bot), Formula::Bot),
    }
}

fn modal_scope_contains(c: &Formula, q: &Var) -> bool {
    match c {
        Formula::Box(_, body) => body.has_free(q),
        Formula::Var(_) | Formula::Bot => false,
        Formula::Neg(x) => modal_scope_contains(x, q),
        Formula::And(x, y) | Formula::Or(x, y) | Formula::Imp(x, y) => {
            modal_scope_contains(x, q) || modal_scope_contains(y, q)
        }
        Formula::Forall(_, x) => modal_scope_contains(x, q),
    }
}

fn admissibility() -> Outcome {
    let mut audit = Audited::default();
    let shape = Shape::default();
    let target = 300;
    let mut lines = Vec::new();
    let mut pass = true;
    for (k, logic) in Logic::ALL.into_iter().enumerate() {
        let mut rng = rng(50 + k as u64);
        let mut counts = [0usize; 6];
        let mut failures = [0usize; 6];
        let mut literal_modal_failures = 0;

        // Weakening, both sides.
        while counts[0] < target {
            let s = sequent(&mut rng, 12, shape);
            if !audit.derivable(logic, &s) {
                continue;
            }
            counts[0] += 1;
            let c = formula_upto(&mut rng, 4, shape);
            let left = Sequent::new(s.antecedent.clone().with(c.clone()), s.succedent.clone());
            let right = Sequent::new(s.antecedent.clone(), s.succedent.clone().with(c));
            if !audit.derivable(logic, &left) || !audit.derivable(logic, &right) {
                failures[0] += 1;
            }
        }

        // Contraction, alternating sides.
        while counts[1] < target {
            let s = sequent(&mut rng, 8, shape);
            let c = formula_upto(&mut rng, 4, shape);
            let on_left = counts[1] % 2 == 0;
            let (doubled, single) = if on_left {
                (
                    Sequent::new(s.antecedent.clone().with(c.clone()).with(c.clone()), s.succedent.clone()),
                    Sequent::new(s.antecedent.clone().with(c.clone()), s.succedent.clone()),
                )
            } else {
                (
                    Sequent::new(s.antecedent.clone(), s.succedent.clone().with(c.clone()).with(c.clone())),
                    Sequent::new(s.antecedent.clone(), s.succedent.clone().with(c.clone())),
                )
            };
            if !audit.derivable(logic, &doubled) {
                continue;
            }
            counts[1] += 1;
            if !audit.derivable(logic, &single) {
                failures[1] += 1;
            }
        }

        // Cut.
        while counts[2] < target {
            let cut = formula_upto(&mut rng, 4, shape);
            let first = sequent(&mut rng, 8, shape);
            let left = Sequent::new(first.antecedent.clone(), first.succedent.clone().with(cut.clone()));
            if !audit.derivable(logic, &left) {
                continue;
            }
            let mut found = None;
            for _ in 0..50 {
                let second = sequent(&mut rng, 8, shape);
                let right = Sequent::new(second.antecedent.clone().with(cut.clone()), second.succedent.clone());
                if audit.derivable(logic, &right) {
                    found = Some(second);
                    break;
                }
            }
            let Some(second) = found else { continue };
            counts[2] += 1;
            let joined = Sequent::new(
                first.antecedent.union(&second.antecedent),
                first.succedent.union(&second.succedent),
            );
            if !audit.derivable(logic, &joined) {
                failures[2] += 1;
            }
        }

        // Substitution.
        while counts[3] < target {
            let s = sequent(&mut rng, 12, shape);
            if !audit.derivable(logic, &s) {
                continue;
            }
            counts[3] += 1;
            let p = pick_var(&mut rng, shape);
            let b = formula_upto(&mut rng, 4, shape);
            if !audit.derivable(logic, &s.substitute(&p, &b).unwrap()) {
                failures[3] += 1;
            }
        }

        // Congruence under a derivable equivalence, any context.
        while counts[4] < target {
            let x = formula_upto(&mut rng, 4, shape);
            let y = equivalent_variant(&mut rng, &x, shape);
            if !audit.derivable(logic, &Sequent::conclusion_of(iff(&x, &y))) {
                continue;
            }
            counts[4] += 1;
            let q = pick_var(&mut rng, shape);
            let c = formula_upto(&mut rng, 6, shape);
            let s = Sequent::new(vec![c.substitute(&q, &y).unwrap()], vec![c.substitute(&q, &x).unwrap()]);
            if !audit.derivable(logic, &s) {
                failures[4] += 1;
            }
        }

        // Congruence with a local equivalence as hypothesis.
        while counts[5] < target {
            let x = formula_upto(&mut rng, 4, shape);
            let y = formula_upto(&mut rng, 4, shape);
            let q = pick_var(&mut rng, shape);
            let c = formula_upto(&mut rng, 6, shape);
            let s = Sequent::new(vec![iff(&x, &y), c.substitute(&q, &y).unwrap()], vec![c.substitute(&q, &x).unwrap()]);
            let holds = audit.derivable(logic, &s);
            if modal_scope_contains(&c, &q) {
                if !holds {
                    // Must be a genuine semantic failure, not an engine gap.
                    if countermodel(logic, &s, s.modal_depth()).unwrap().is_none() {
                        failures[5] += 1;
                    }
                    literal_modal_failures += 1;
                }
                continue;
            }
            counts[5] += 1;
            if !holds {
                failures[5] += 1;
            }
        }

        pass &= failures.iter().all(|&n| n == 0);
        lines.push(format!(
            "{logic}: weakening {}/{}, contraction {}/{}, cut {}/{}, substitution {}/{}, \
             congruence (derivable equivalence) {}/{}, congruence (local, propositional context) {}/{}, \
             local equivalence under a box refuted by countermodel {literal_modal_failures} times",
            counts[0] - failures[0],
            counts[0],
            counts[1] - failures[1],
            counts[1],
            counts[2] - failures[2],
            counts[2],
            counts[3] - failures[3],
            counts[3],
            counts[4] - failures[4],
            counts[4],
            counts[5] - failures[5],
            counts[5],
        ));
    }
    Outcome::new(pass, lines.join("; "), audit)
}

fn oracle_agreement() -> Outcome {
    let mut audit = Audited::default();
    let shape = Shape::default();
    let mut lines = Vec::new();
    let mut pass = true;
    for (k, logic) in Logic::ALL.into_iter().enumerate() {
        let mut rng = rng(60 + k as u64);
        let (mut derivable, mut refuted, mut disagree) = (0, 0, 0);
        for _ in 0..500 {
            let s = sequent(&mut rng, 12, shape);
            let proved = audit.derivable(logic, &s);
            let model = countermodel(logic, &s, s.modal_depth()).unwrap();
            match (proved, model) {
                (true, None) => derivable += 1,
                (false, Some(m)) if m.refutes(&s) && m.in_frame_class(logic) => refuted += 1,
                _ => disagree += 1,
            }
        }
        pass &= disagree == 0;
        lines.push(format!("{logic}: {derivable} derivable, {refuted} refuted, {disagree} disagreements"));
    }
    Outcome::new(pass, lines.join("; "), audit)
}

fn barcan_identity() -> Outcome {
    let audit = Audited::default();
    let shape = Shape::default();
    let mut rng = rng(80);
    let mut mismatches = 0;
    let n = 200;
    for logic in Logic::ALL {
        for _ in 0..n {
            let b = formula_upto(&mut rng, 10, shape);
            let p = pick_var(&mut rng, shape);
            let i = a(rng.gen_range(1..=2));
            let outer = forget(logic, &p, &Formula::boxed(i, b.clone())).unwrap();
            let inner = forget(logic, &p, &b).unwrap();
            if outer != Formula::boxed(i, inner) {
                mismatches += 1;
            }
        }
    }
    Outcome::new(mismatches == 0, format!("{n} formulas per logic, {mismatches} mismatches"), audit)
}

fn brute_force_extremality() -> Outcome {
    let audit = Audited::default();
    let shape = Shape { vars: 2, agents: 2 };
    let mut lines = Vec::new();
    let mut pass = true;
    let mut handles = Vec::new();
    for (k, logic) in Logic::ALL.into_iter().enumerate() {
        for (j, side) in [Side::Post, Side::Pre].into_iter().enumerate() {
            handles.push(std::thread::spawn(move || {
                let mut rng = rng(90 + 2 * k as u64 + j as u64);
                let (mut ok, mut bad, mut candidates) = (0, Vec::new(), 0);
                for _ in 0..50 {
                    let subject = formula_upto(&mut rng, 6, shape);
                    let problem = InterpolationProblem { logic, forget: vec![var("p")], subject, side };
                    let report = verify_uniform(&problem, 5).unwrap();
                    candidates += report.candidates_checked;
                    if report.all_ok() && report.extremality_checked_up_to == 5 {
                        ok += 1;
                    } else {
                        bad.push(problem.subject.to_string());
                    }
                }
                (logic, side, ok, bad, candidates)
            }));
        }
    }
    for h in handles {
        let (logic, side, ok, bad, candidates) = h.join().unwrap();
        pass &= bad.is_empty();
        lines.push(format!("{logic} {side:?}: {ok}/50 ({candidates} partners) {bad:?}"));
    }
    Outcome::new(pass, lines.join("; "), audit)
}

fn main() {
    type Criterion = (u32, &'static str, Duration, fn() -> Outcome);
    let criteria: Vec<Criterion> = vec![
        (1, "golden interpolant", Duration::from_secs(1), golden_interpolant),
        (2, "axiom matrix and necessitation", Duration::from_secs(10), axiom_matrix),
        (3, "loop example", Duration::from_secs(1), loop_example),
        (4, "uniform interpolation conditions (i)-(iii)", Duration::from_secs(300), uniform_interpolation_conditions),
        (5, "structural admissibility", Duration::from_secs(300), admissibility),
        (6, "oracle agreement", Duration::from_secs(300), oracle_agreement),
        (8, "Barcan identity", Duration::from_secs(10), barcan_identity),
        (9, "brute-force extremality", Duration::from_secs(600), brute_force_extremality),
    ];

    let handles: Vec<_> = criteria
        .into_iter()
        .map(|(id, name, limit, run)| {
            std::thread::spawn(move || {
                let start = Instant::now();
                let outcome = run();
                (id, name, limit, start.elapsed(), outcome)
            })
        })
        .collect();
    let mut results: Vec<_> = handles.into_iter().map(|h| h.join().expect("criterion panicked")).collect();

    let mut total = Audited::default();
    let mut tables = TableAudit::default();
    for (id, .., outcome) in &results {
        if (2..=6).contains(id) {
            total.merge(&outcome.audit);
        }
        add_table(&mut tables, outcome.table);
    }
    let measure_ok = total.measure_violations == 0
        && total.check_failures == 0
        && tables.measure_violations == 0
        && total.edges > 0;
    let audit_line = format!(
        "{} searches, {} search edges and {} derivation edges audited, {} measure violations, \
         {} rule-check failures; {} table calls, {} table measure violations",
        total.calls,
        total.edges,
        total.derivation_edges,
        total.measure_violations,
        total.check_failures,
        tables.calls,
        tables.measure_violations
    );
    results.push((
        7,
        "termination measure audit",
        Duration::MAX,
        Duration::ZERO,
        Outcome::new(measure_ok, audit_line, Audited::default()),
    ));
    results.sort_by_key(|r| r.0);

    let mut all = true;
    for (id, name, limit, elapsed, outcome) in &results {
        let pass = outcome.pass && elapsed <= limit;
        all &= pass;
        println!(
            "{} criterion {id}: {name} [{:.2}s] {}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            outcome.detail
        );
    }
    if !all {
        std::process::exit(1);
    }
}
