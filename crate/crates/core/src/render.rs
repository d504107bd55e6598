//! Text, JSON and LaTeX output.
//!
//! Text output uses the input grammar, so `parse_formula(render(f))`
//! gives back `f`. JSON derivations carry `"schema": "derivation/1"` at the
//! top level and models carry `"schema": "model/1"`.

use serde_json::{json, Map, Value};

use crate::calculus::{Derivation, Judgement};
use crate::semantics::KripkeModel;
use crate::syntax::{Formula, FormulaMultiset, Sequent, TSequent};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Format {
    Text,
    Json,
    Latex,
}

pub trait Render {
    fn render(&self, format: Format) -> String;
}

pub fn render<T: Render + ?Sized>(value: &T, format: Format) -> String {
    value.render(format)
}

const PREC_IMP: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_UNARY: u8 = 4;

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Imp(..) => PREC_IMP,
        Formula::Or(..) => PREC_OR,
        Formula::And(..) => PREC_AND,
        _ => PREC_UNARY,
    }
}

/// `¬□ᵢ¬A` as `(i, A)`.
fn as_diamond(f: &Formula) -> Option<(crate::syntax::AgentId, &Formula)> {
    match f {
        Formula::Neg(inner) => match &**inner {
            Formula::Box(i, body) => match &**body {
                Formula::Neg(a) => Some((*i, a)),
                _ => None,
            },
            _ => None,
        },
        _ => None,
    }
}

pub fn formula_text(f: &Formula) -> String {
    let mut out = String::new();
    write_text(f, &mut out);
    out
}

fn write_text(f: &Formula, out: &mut String) {
    let child = |g: &Formula, min: u8, out: &mut String| {
        if precedence(g) < min {
            out.push('(');
            write_text(g, out);
            out.push(')');
        } else {
            write_text(g, out);
        }
    };
    if let Some((i, a)) = as_diamond(f) {
        out.push_str(&format!("<{i}>"));
        return child(a, PREC_UNARY, out);
    }
    match f {
        Formula::Var(v) => out.push_str(v.name()),
        Formula::Bot => out.push_str("false"),
        Formula::Neg(a) if **a == Formula::Bot => out.push_str("true"),
        Formula::Neg(a) => {
            out.push('~');
            child(a, PREC_UNARY, out);
        }
        Formula::Box(i, a) => {
            out.push_str(&format!("[{i}]"));
            child(a, PREC_UNARY, out);
        }
        Formula::Forall(v, a) => {
            out.push_str(&format!("forall {v}. "));
            child(a, PREC_UNARY, out);
        }
        Formula::And(a, b) => {
            child(a, PREC_AND, out);
            out.push_str(" & ");
            child(b, PREC_AND + 1, out);
        }
        Formula::Or(a, b) => {
            child(a, PREC_OR, out);
            out.push_str(" | ");
            child(b, PREC_OR + 1, out);
        }
        Formula::Imp(a, b) => {
            child(a, PREC_IMP + 1, out);
            out.push_str(" -> ");
            child(b, PREC_IMP, out);
        }
    }
}

fn side_text(ms: &FormulaMultiset) -> String {
    ms.iter().map(formula_text).collect::<Vec<_>>().join(", ")
}

fn arrow(ant: &FormulaMultiset, suc: &FormulaMultiset) -> String {
    match (ant.is_empty(), suc.is_empty()) {
        (true, true) => "=>".to_string(),
        (true, false) => format!("=> {}", side_text(suc)),
        (false, true) => format!("{} =>", side_text(ant)),
        (false, false) => format!("{} => {}", side_text(ant), side_text(suc)),
    }
}

pub fn sequent_text(s: &Sequent) -> String {
    arrow(&s.antecedent, &s.succedent)
}

pub fn tsequent_text(t: &TSequent) -> String {
    let store = if t.store().is_empty() {
        "∅".to_string()
    } else {
        side_text(t.store())
    };
    format!("{store} | {}", arrow(&t.antecedent, &t.succedent))
}

pub fn formula_json(f: &Formula) -> Value {
    match f {
        Formula::Var(v) => Value::String(v.name().to_string()),
        Formula::Bot => json!({"op": "bot"}),
        Formula::Neg(a) => json!({"op": "not", "arg": formula_json(a)}),
        Formula::And(a, b) => json!({"op": "and", "left": formula_json(a), "right": formula_json(b)}),
        Formula::Or(a, b) => json!({"op": "or", "left": formula_json(a), "right": formula_json(b)}),
        Formula::Imp(a, b) => json!({"op": "imp", "left": formula_json(a), "right": formula_json(b)}),
        Formula::Box(i, a) => json!({"op": "box", "agent": i.get(), "arg": formula_json(a)}),
        Formula::Forall(v, a) => json!({"op": "forall", "var": v.name(), "arg": formula_json(a)}),
    }
}

fn side_json(ms: &FormulaMultiset) -> Value {
    Value::Array(ms.iter().map(formula_json).collect())
}

fn derivation_json(d: &Derivation) -> Value {
    let mut sequent = Map::new();
    match &d.conclusion {
        Judgement::Plain(s) => {
            sequent.insert("ant".into(), side_json(&s.antecedent));
            sequent.insert("suc".into(), side_json(&s.succedent));
        }
        Judgement::T(t) => {
            sequent.insert("store".into(), side_json(t.store()));
            sequent.insert("ant".into(), side_json(&t.antecedent));
            sequent.insert("suc".into(), side_json(&t.succedent));
        }
    }
    json!({
        "sequent": Value::Object(sequent),
        "rule": d.rule.name(),
        "premises": d.premises.iter().map(derivation_json).collect::<Vec<_>>(),
    })
}

pub fn formula_latex(f: &Formula) -> String {
    let mut out = String::new();
    write_latex(f, &mut out);
    out
}

fn write_latex(f: &Formula, out: &mut String) {
    let child = |g: &Formula, min: u8, out: &mut String| {
        if precedence(g) < min {
            out.push('(');
            write_latex(g, out);
            out.push(')');
        } else {
            write_latex(g, out);
        }
    };
    if let Some((i, a)) = as_diamond(f) {
        out.push_str(&format!("\\Diamond_{{{i}}} "));
        return child(a, PREC_UNARY, out);
    }
    match f {
        Formula::Var(v) => out.push_str(v.name()),
        Formula::Bot => out.push_str("\\bot"),
        Formula::Neg(a) if **a == Formula::Bot => out.push_str("\\top"),
        Formula::Neg(a) => {
            out.push_str("\\neg ");
            child(a, PREC_UNARY, out);
        }
        Formula::Box(i, a) => {
            out.push_str(&format!("\\Box_{{{i}}} "));
            child(a, PREC_UNARY, out);
        }
        Formula::Forall(v, a) => {
            out.push_str(&format!("\\forall {v}.\\, "));
            child(a, PREC_UNARY, out);
        }
        Formula::And(a, b) => {
            child(a, PREC_AND, out);
            out.push_str(" \\land ");
            child(b, PREC_AND + 1, out);
        }
        Formula::Or(a, b) => {
            child(a, PREC_OR, out);
            out.push_str(" \\lor ");
            child(b, PREC_OR + 1, out);
        }
        Formula::Imp(a, b) => {
            child(a, PREC_IMP + 1, out);
            out.push_str(" \\to ");
            child(b, PREC_IMP, out);
        }
    }
}

fn side_latex(ms: &FormulaMultiset) -> String {
    ms.iter().map(formula_latex).collect::<Vec<_>>().join(", ")
}

fn judgement_latex(j: &Judgement) -> String {
    match j {
        Judgement::Plain(s) => format!("{} \\Rightarrow {}", side_latex(&s.antecedent), side_latex(&s.succedent)),
        Judgement::T(t) => {
            let store = if t.store().is_empty() {
                "\\emptyset".to_string()
            } else {
                side_latex(t.store())
            };
            format!(
                "{store} \\mid {} \\Rightarrow {}",
                side_latex(&t.antecedent),
                side_latex(&t.succedent)
            )
        }
    }
}

fn write_proof_latex(d: &Derivation, out: &mut String) {
    for p in &d.premises {
        write_proof_latex(p, out);
    }
    if d.premises.is_empty() {
        out.push_str("\\AxiomC{}\n");
    }
    let infer = match d.premises.len() {
        0 | 1 => "UnaryInfC",
        2 => "BinaryInfC",
        _ => "TrinaryInfC",
    };
    out.push_str(&format!("\\RightLabel{{\\scriptsize {}}}\n", d.rule.name()));
    out.push_str(&format!("\\{infer}{{${}$}}\n", judgement_latex(&d.conclusion)));
}

fn write_proof_text(d: &Derivation, depth: usize, out: &mut String) {
    out.push_str(&"  ".repeat(depth));
    out.push_str(&format!("{}  [{}]\n", d.conclusion, d.rule.name()));
    for p in &d.premises {
        write_proof_text(p, depth + 1, out);
    }
}

impl Render for Formula {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Text => formula_text(self),
            Format::Json => formula_json(self).to_string(),
            Format::Latex => format!("${}$", formula_latex(self)),
        }
    }
}

impl Render for Sequent {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Text => sequent_text(self),
            Format::Json => json!({"ant": side_json(&self.antecedent), "suc": side_json(&self.succedent)}).to_string(),
            Format::Latex => format!("${}$", judgement_latex(&Judgement::Plain(self.clone()))),
        }
    }
}

impl Render for Derivation {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Text => {
                let mut out = String::new();
                write_proof_text(self, 0, &mut out);
                out
            }
            Format::Json => {
                let mut node = Map::new();
                node.insert("schema".into(), "derivation/1".into());
                if let Value::Object(body) = derivation_json(self) {
                    node.extend(body);
                }
                Value::Object(node).to_string()
            }
            Format::Latex => {
                let mut out = String::from("\\begin{prooftree}\n");
                write_proof_latex(self, &mut out);
                out.push_str("\\end{prooftree}\n");
                out
            }
        }
    }
}

impl Render for KripkeModel {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Text => {
                let mut out = format!("worlds: {}\nroot: {}\n", self.worlds, self.root);
                for (agent, edges) in &self.relations {
                    let list: Vec<String> = edges.iter().map(|(u, v)| format!("{u}->{v}")).collect();
                    out.push_str(&format!("R{agent}: {}\n", list.join(" ")));
                }
                for (w, vars) in self.valuation.iter().enumerate() {
                    let list: Vec<&str> = vars.iter().map(|v| v.name()).collect();
                    out.push_str(&format!("V({w}): {{{}}}\n", list.join(", ")));
                }
                out
            }
            Format::Json => {
                let relations: Map<String, Value> = self
                    .relations
                    .iter()
                    .map(|(a, edges)| {
                        let pairs = edges.iter().map(|(u, v)| json!([u, v])).collect::<Vec<_>>();
                        (a.to_string(), Value::Array(pairs))
                    })
                    .collect();
                let valuation: Map<String, Value> = self
                    .valuation
                    .iter()
                    .enumerate()
                    .map(|(w, vars)| (w.to_string(), json!(vars.iter().map(|v| v.name()).collect::<Vec<_>>())))
                    .collect();
                json!({
                    "schema": "model/1",
                    "worlds": (0..self.worlds).collect::<Vec<_>>(),
                    "root": self.root,
                    "relations": relations,
                    "valuation": valuation,
                })
                .to_string()
            }
            Format::Latex => {
                let mut out = String::from("\\begin{tabular}{ll}\n");
                out.push_str(&format!("$W$ & $\\{{0,\\dots,{}\\}}$, root ${}$ \\\\\n", self.worlds.saturating_sub(1), self.root));
                for (agent, edges) in &self.relations {
                    let list: Vec<String> = edges.iter().map(|(u, v)| format!("({u},{v})")).collect();
                    out.push_str(&format!("$R_{{{agent}}}$ & ${}$ \\\\\n", list.join(", ")));
                }
                for (w, vars) in self.valuation.iter().enumerate() {
                    let list: Vec<&str> = vars.iter().map(|v| v.name()).collect();
                    out.push_str(&format!("$V({w})$ & $\\{{{}\\}}$ \\\\\n", list.join(", ")));
                }
                out.push_str("\\end{tabular}\n");
                out
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{prove, Logic};
    use crate::parse::{parse_formula, parse_sequent};
    use crate::syntax::{AgentId, Level};

    #[test]
    fn box_renders_compactly() {
        let f = Formula::boxed(AgentId::new(1).unwrap(), Formula::var("p"));
        assert_eq!(render(&f, Format::Text), "[1]p");
    }

    #[test]
    fn sugar_is_printed_back() {
        for text in ["<1>(p & q)", "true", "<2>p -> [1]false", "forall p. p | q", "p -> q -> r", "(p -> q) -> r"] {
            let f = parse_formula(text, Level::L2).unwrap();
            assert_eq!(formula_text(&f), text);
        }
    }

    #[test]
    fn associativity_is_explicit() {
        for text in ["p | (q | r)", "p & q & r", "(p & q) | r", "p & (q | r)", "~(p & q)"] {
            let f = parse_formula(text, Level::L1).unwrap();
            let back = formula_text(&f);
            assert_eq!(parse_formula(&back, Level::L1).unwrap(), f, "{text} -> {back}");
        }
    }

    #[test]
    fn init_derivation_json() {
        let d = prove(Logic::K, &parse_sequent("p => p").unwrap()).unwrap();
        let d = d.derivation().unwrap();
        assert_eq!(
            render(d, Format::Json),
            r#"{"schema":"derivation/1","sequent":{"ant":["p"],"suc":["p"]},"rule":"Init","premises":[]}"#
        );
    }

    #[test]
    fn formula_json_shape() {
        let f = parse_formula("[2](p -> false)", Level::L1).unwrap();
        assert_eq!(
            formula_json(&f).to_string(),
            r#"{"op":"box","agent":2,"arg":{"op":"imp","left":"p","right":{"op":"bot"}}}"#
        );
    }

    #[test]
    fn latex_proof_tree() {
        let d = prove(Logic::K, &parse_sequent("p & q => q").unwrap()).unwrap();
        let tex = render(d.derivation().unwrap(), Format::Latex);
        assert!(tex.starts_with("\\begin{prooftree}"));
        assert!(tex.contains("\\AxiomC{}"));
        assert!(tex.contains("LAnd"));
    }

    #[test]
    fn tsequent_text_shows_store() {
        let b = parse_formula("[1]p", Level::L1).unwrap();
        let t = TSequent::new(vec![b.clone()], vec![Formula::var("p")], vec![b]).unwrap();
        assert_eq!(tsequent_text(&t), "[1]p | p => [1]p");
        assert_eq!(tsequent_text(&TSequent::default()), "∅ | =>");
    }
}
