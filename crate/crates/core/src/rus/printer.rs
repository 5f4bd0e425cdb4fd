//! Canonical Russell text.

use std::fmt::Write;

use super::{Definition, RusAssertion, RusItem, Statement, Theorem, Theory, TypedVar};
use crate::grammar::SyntaxTree;
use crate::symbol::{join, Symbol};

const DIVIDER: &str = "-----------------------";

pub fn print_theory(theory: &Theory) -> String {
    let mut out = String::new();
    for item in theory.items() {
        out.push_str(&print_item(item));
    }
    out
}

fn vars(vs: &[TypedVar]) -> String {
    let parts: Vec<String> = vs.iter().map(|v| format!("{} : {}", v.name, v.typecode)).collect();
    format!("({})", parts.join(", "))
}

fn disjoint(groups: &[Vec<Symbol>]) -> String {
    if groups.is_empty() {
        return String::new();
    }
    let parts: Vec<String> = groups.iter().map(|g| join(g)).collect();
    format!(" disjoint({})", parts.join(", "))
}

fn statement(indent: &str, s: &Statement) -> String {
    format!("{indent}{} : {} = {} {} ;;\n", s.role, s.typecode, s.marker_symbol(), join(&s.tree.linearize()))
}

pub fn print_item(item: &RusItem) -> String {
    let mut out = String::new();
    match item {
        RusItem::Constant(cs) => {
            for c in cs {
                writeln!(out, "constant {{\n    symbol {c} ;;\n}}").unwrap();
            }
        }
        RusItem::Type(t) => writeln!(out, "type {t} ;;").unwrap(),
        RusItem::Rule(r) => {
            writeln!(out, "rule {} {} {{", r.name, vars(&r.vars)).unwrap();
            out.push_str(&statement("    ", &r.term));
            out.push_str("}\n");
        }
        RusItem::Axiom(a) => out.push_str(&assertion("axiom", a, "    ")),
        RusItem::Definition(d) => out.push_str(&definition(d)),
        RusItem::Theorem(t) => out.push_str(&theorem(t)),
    }
    out
}

fn assertion(keyword: &str, a: &RusAssertion, indent: &str) -> String {
    let mut out = format!("{keyword} {} {}{}  {{\n", a.name, vars(&a.vars), disjoint(&a.disjoint_groups));
    for h in &a.hyps {
        out.push_str(&statement(indent, h));
    }
    if !a.hyps.is_empty() {
        writeln!(out, "{indent}{DIVIDER}").unwrap();
    }
    for p in &a.props {
        out.push_str(&statement(indent, p));
    }
    out.push_str("}\n");
    out
}

fn theorem(t: &Theorem) -> String {
    let mut out = assertion("theorem", &t.assertion, "  ");
    let Some(proof) = &t.proof else { return out };
    writeln!(out, "proof of {} {{", t.assertion.name).unwrap();
    for v in &proof.dummies {
        writeln!(out, "  var {} : {} ;;", v.name, v.typecode).unwrap();
    }
    if !proof.disjoint_groups.is_empty() {
        writeln!(out, " {} ;;", disjoint(&proof.disjoint_groups)).unwrap();
    }
    for s in &proof.steps {
        let refs: Vec<String> = s.premises.iter().map(|r| r.to_string()).collect();
        writeln!(
            out,
            "  step {}: {} = {} {} ({}) {} {} ;;",
            s.index,
            s.stmt.typecode,
            s.kind.keyword(),
            s.name,
            refs.join(", "),
            s.stmt.marker_symbol(),
            join(&s.stmt.tree.linearize())
        )
        .unwrap();
    }
    for (k, r) in &proof.qed {
        writeln!(out, "  qed prop {k} = {r} ;").unwrap();
    }
    out.push_str("}\n");
    out
}

/// The proposition with `defiendum`/`definiens` placeholders when it is the
/// plain two-slot template over them.
fn prop_text(d: &Definition) -> Vec<Symbol> {
    if let SyntaxTree::Node { rule, children } = &d.prop.tree {
        if children.len() == 2 && children[0] == d.defiendum.tree && children[1] == d.definiens.tree {
            let names = [Symbol::new("defiendum"), Symbol::new("definiens")];
            return rule.pattern_with(|slot| names[slot].clone());
        }
    }
    d.prop.tree.linearize()
}

fn definition(d: &Definition) -> String {
    let mut out = format!("definition {} {}{}  {{\n", d.name, vars(&d.vars), disjoint(&d.disjoint_groups));
    out.push_str(&statement("    ", &d.defiendum));
    out.push_str(&statement("    ", &d.definiens));
    writeln!(out, "    {DIVIDER}").unwrap();
    writeln!(out, "    prop : {} = {} {} ;;", d.prop.typecode, d.prop.marker_symbol(), join(&prop_text(d))).unwrap();
    out.push_str("}\n");
    out
}
