//! The Russell-style declarative language.
//!
//! A [`Theory`] is an ordered list of items: constant and type declarations,
//! grammar rules, axioms, definitions and theorems with declarative proofs.
//! Expressions are stored as syntax trees over the grammar formed by the rules
//! seen so far.

mod definition;
mod parser;
mod printer;
mod verify;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::grammar::{Grammar, GrammarRule, Marker, SyntaxTree, VarTypes};
use crate::symbol::{join, DisjointPairs, Expression, Symbol};

pub use definition::{check_definition, DefinitionOptions, DefinitionViolation};
pub use parser::{parse_rus_source, RusError, RusErrorKind};
pub use printer::{print_item, print_theory};
pub use verify::{verify_step, verify_theorem, verify_theory, ProofContext, RusVerifyError, StepError, TheoryOptions};

/// Marker token of syntactic (term) statements.
pub const TERM_MARKER: &str = "#";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TypedVar {
    pub name: Symbol,
    pub typecode: Symbol,
}

impl TypedVar {
    pub fn new(name: impl Into<Symbol>, typecode: impl Into<Symbol>) -> TypedVar {
        TypedVar { name: name.into(), typecode: typecode.into() }
    }
}

/// Where a statement sits inside its item.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Term,
    Hyp(usize),
    Prop(usize),
    Defiendum,
    Definiens,
    /// The proposition of a definition, which carries no index.
    DefinitionProp,
    Step(usize),
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Term => f.write_str("term"),
            Role::Hyp(k) => write!(f, "hyp {k}"),
            Role::Prop(k) => write!(f, "prop {k}"),
            Role::Defiendum => f.write_str("defiendum"),
            Role::Definiens => f.write_str("definiens"),
            Role::DefinitionProp => f.write_str("prop"),
            Role::Step(k) => write!(f, "step {k}"),
        }
    }
}

/// `role : typecode = marker body`, with the body parsed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Statement {
    pub role: Role,
    pub typecode: Symbol,
    pub marker: Marker,
    pub tree: SyntaxTree,
}

impl Statement {
    pub fn marker_symbol(&self) -> Symbol {
        match &self.marker {
            Marker::Syntactic => Symbol::new(TERM_MARKER),
            Marker::Judgement(m) => m.clone(),
        }
    }

    /// The Metamath form: judgement marker or typecode, then the body.
    pub fn to_expression(&self) -> Expression {
        match &self.marker {
            Marker::Syntactic => self.tree.to_expression(&self.typecode),
            Marker::Judgement(m) => self.tree.to_expression(m),
        }
    }

    /// Same judgement and same body, ignoring the role.
    pub fn same_claim(&self, other: &Statement) -> bool {
        self.marker == other.marker && self.typecode == other.typecode && self.tree == other.tree
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {} = {} {}", self.role, self.typecode, self.marker_symbol(), join(&self.tree.linearize()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleItem {
    pub name: String,
    pub vars: Vec<TypedVar>,
    pub term: Statement,
    pub rule: Arc<GrammarRule>,
}

/// An axiom or theorem header.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RusAssertion {
    pub name: String,
    pub vars: Vec<TypedVar>,
    /// Disjointness clauses as written, one group per clause.
    pub disjoint_groups: Vec<Vec<Symbol>>,
    pub hyps: Vec<Statement>,
    pub props: Vec<Statement>,
}

impl RusAssertion {
    pub fn disjoint(&self) -> DisjointPairs {
        groups_to_pairs(&self.disjoint_groups)
    }

    pub fn var_types(&self) -> VarTypes {
        self.vars.iter().map(|v| (v.name.clone(), v.typecode.clone())).collect()
    }

    /// The single proposition.
    pub fn prop(&self) -> &Statement {
        &self.props[0]
    }
}

pub(crate) fn groups_to_pairs(groups: &[Vec<Symbol>]) -> DisjointPairs {
    let mut d = DisjointPairs::new();
    for g in groups {
        d.insert_group(g);
    }
    d
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Definition {
    pub name: String,
    pub vars: Vec<TypedVar>,
    pub disjoint_groups: Vec<Vec<Symbol>>,
    pub defiendum: Statement,
    pub definiens: Statement,
    pub prop: Statement,
    /// Name of the rule introduced by the definition itself when the
    /// defiendum did not parse with the rules declared before it.
    pub implicit_rule: Option<Arc<GrammarRule>>,
}

impl Definition {
    pub fn disjoint(&self) -> DisjointPairs {
        groups_to_pairs(&self.disjoint_groups)
    }

    pub fn var_types(&self) -> VarTypes {
        self.vars.iter().map(|v| (v.name.clone(), v.typecode.clone())).collect()
    }

    /// Root rule of the defiendum, when it is a rule application.
    pub fn defined_rule(&self) -> Option<&Arc<GrammarRule>> {
        self.defiendum.tree.rule()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RefKind {
    Axm,
    Thm,
    Def,
}

impl RefKind {
    pub fn keyword(self) -> &'static str {
        match self {
            RefKind::Axm => "axm",
            RefKind::Thm => "thm",
            RefKind::Def => "def",
        }
    }
}

/// A premise reference inside a proof.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ref {
    Hyp(usize),
    Step(usize),
}

impl fmt::Display for Ref {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ref::Hyp(k) => write!(f, "hyp {k}"),
            Ref::Step(k) => write!(f, "step {k}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofStep {
    pub index: usize,
    pub kind: RefKind,
    pub name: String,
    pub premises: Vec<Ref>,
    pub stmt: Statement,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DeclarativeProof {
    /// Variables used only inside the proof.
    pub dummies: Vec<TypedVar>,
    pub disjoint_groups: Vec<Vec<Symbol>>,
    pub steps: Vec<ProofStep>,
    /// `qed prop k = ...` bindings, in source order.
    pub qed: Vec<(usize, Ref)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem {
    pub assertion: RusAssertion,
    pub proof: Option<DeclarativeProof>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RusItem {
    Constant(Vec<Symbol>),
    Type(Symbol),
    Rule(RuleItem),
    Axiom(RusAssertion),
    Definition(Definition),
    Theorem(Theorem),
}

impl RusItem {
    pub fn name(&self) -> Option<&str> {
        match self {
            RusItem::Constant(_) | RusItem::Type(_) => None,
            RusItem::Rule(r) => Some(&r.name),
            RusItem::Axiom(a) => Some(&a.name),
            RusItem::Definition(d) => Some(&d.name),
            RusItem::Theorem(t) => Some(&t.assertion.name),
        }
    }

    /// Every statement of the item, proof steps included.
    pub fn statements(&self) -> Vec<&Statement> {
        match self {
            RusItem::Constant(_) | RusItem::Type(_) => Vec::new(),
            RusItem::Rule(r) => vec![&r.term],
            RusItem::Axiom(a) => a.hyps.iter().chain(&a.props).collect(),
            RusItem::Definition(d) => vec![&d.defiendum, &d.definiens, &d.prop],
            RusItem::Theorem(t) => {
                let mut out: Vec<&Statement> = t.assertion.hyps.iter().chain(&t.assertion.props).collect();
                if let Some(p) = &t.proof {
                    out.extend(p.steps.iter().map(|s| &s.stmt));
                }
                out
            }
        }
    }
}

/// What a proof step may cite: an axiom, a theorem or a definition.
#[derive(Clone, Copy, Debug)]
pub struct Citable<'a> {
    pub index: usize,
    pub kind: RefKind,
    pub name: &'a str,
    pub hyps: &'a [Statement],
    pub prop: &'a Statement,
    pub disjoint: &'a [Vec<Symbol>],
}

#[derive(Clone, Debug, Default)]
pub struct Theory {
    items: Vec<RusItem>,
    names: HashMap<String, usize>,
    grammar: Grammar,
}

impl Theory {
    pub fn new(grammar: Grammar) -> Theory {
        Theory { items: Vec::new(), names: HashMap::new(), grammar }
    }

    pub fn items(&self) -> &[RusItem] {
        &self.items
    }

    pub fn item(&self, i: usize) -> &RusItem {
        &self.items[i]
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// The grammar formed by all rules and definitions of the theory.
    pub fn grammar(&self) -> &Grammar {
        &self.grammar
    }

    pub(crate) fn grammar_mut(&mut self) -> &mut Grammar {
        &mut self.grammar
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.get(name).copied()
    }

    pub fn contains_name(&self, name: &str) -> bool {
        self.names.contains_key(name)
    }

    /// Appends an item; fails with the name when it is already taken.
    pub fn push(&mut self, item: RusItem) -> Result<usize, String> {
        let i = self.items.len();
        if let Some(name) = item.name() {
            if self.names.contains_key(name) {
                return Err(name.to_string());
            }
            self.names.insert(name.to_string(), i);
        }
        if let RusItem::Definition(d) = &item {
            if let Some(r) = &d.implicit_rule {
                self.names.insert(r.label.clone(), i);
            }
        }
        self.items.push(item);
        Ok(i)
    }

    pub(crate) fn item_mut(&mut self, i: usize) -> &mut RusItem {
        &mut self.items[i]
    }

    /// The assertion called `name`, if it can be cited in proofs.
    pub fn citable(&self, name: &str) -> Option<Citable<'_>> {
        let index = self.index_of(name)?;
        match &self.items[index] {
            RusItem::Axiom(a) => Some(Citable {
                index,
                kind: RefKind::Axm,
                name: &a.name,
                hyps: &a.hyps,
                prop: a.prop(),
                disjoint: &a.disjoint_groups,
            }),
            RusItem::Theorem(t) => Some(Citable {
                index,
                kind: RefKind::Thm,
                name: &t.assertion.name,
                hyps: &t.assertion.hyps,
                prop: t.assertion.prop(),
                disjoint: &t.assertion.disjoint_groups,
            }),
            RusItem::Definition(d) if d.name == name => Some(Citable {
                index,
                kind: RefKind::Def,
                name: &d.name,
                hyps: &[],
                prop: &d.prop,
                disjoint: &d.disjoint_groups,
            }),
            _ => None,
        }
    }

    /// Declared constants, types included, in declaration order.
    pub fn constants(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        for it in &self.items {
            match it {
                RusItem::Constant(cs) => out.extend(cs.iter().cloned()),
                RusItem::Type(t) => out.push(t.clone()),
                _ => {}
            }
        }
        out
    }

    pub fn types(&self) -> Vec<Symbol> {
        self.items
            .iter()
            .filter_map(|it| match it {
                RusItem::Type(t) => Some(t.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn theorems(&self) -> impl Iterator<Item = (usize, &Theorem)> {
        self.items.iter().enumerate().filter_map(|(i, it)| match it {
            RusItem::Theorem(t) => Some((i, t)),
            _ => None,
        })
    }

    pub fn definitions(&self) -> impl Iterator<Item = (usize, &Definition)> {
        self.items.iter().enumerate().filter_map(|(i, it)| match it {
            RusItem::Definition(d) => Some((i, d)),
            _ => None,
        })
    }
}
