//! Context-free expression grammars.
//!
//! Syntactic axioms (Metamath `$a` statements with a syntactic typecode, or
//! Russell `rule` items) become productions; expressions are parsed into
//! [`SyntaxTree`]s by a general chart parser, and trees support one-sided
//! matching and substitution.

mod earley;
mod tree;

use std::collections::HashMap;
use std::fmt::{self, Write};
use std::sync::Arc;

use crate::mm::{AssertionKind, Database};
use crate::symbol::{Expression, Symbol};

pub use tree::{match_into, match_pattern, substitute_tree, MatchFailure, SyntaxTree, TreeSubstitution};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PatternItem {
    Constant(Symbol),
    /// Index into [`GrammarRule::vars`].
    Var(usize),
}

/// A production `typecode → pattern`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GrammarRule {
    pub label: String,
    pub typecode: Symbol,
    /// Variables with their typecodes, in frame (hypothesis) order.
    pub vars: Vec<(Symbol, Symbol)>,
    pub pattern: Vec<PatternItem>,
}

impl GrammarRule {
    /// Builds a rule from an expression body, turning each variable of `vars`
    /// into a typed slot.
    pub fn from_body(
        label: &str,
        typecode: Symbol,
        vars: Vec<(Symbol, Symbol)>,
        body: &[Symbol],
    ) -> Result<GrammarRule, GrammarError> {
        if body.is_empty() {
            return Err(GrammarError::EmptyPattern(label.to_string()));
        }
        let mut used = vec![false; vars.len()];
        let mut pattern = Vec::with_capacity(body.len());
        for s in body {
            match vars.iter().position(|(v, _)| v == s) {
                Some(i) => {
                    if used[i] {
                        return Err(GrammarError::RepeatedVariable { label: label.to_string(), var: s.clone() });
                    }
                    used[i] = true;
                    pattern.push(PatternItem::Var(i));
                }
                None => pattern.push(PatternItem::Constant(s.clone())),
            }
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(GrammarError::UnusedVariable { label: label.to_string(), var: vars[i].0.clone() });
        }
        Ok(GrammarRule { label: label.to_string(), typecode, vars, pattern })
    }

    /// Var indices in pattern (child) order.
    pub fn slot_vars(&self) -> Vec<usize> {
        self.pattern
            .iter()
            .filter_map(|p| match p {
                PatternItem::Var(i) => Some(*i),
                PatternItem::Constant(_) => None,
            })
            .collect()
    }

    /// Child typecodes in pattern order.
    pub fn slot_typecodes(&self) -> Vec<&Symbol> {
        self.slot_vars().into_iter().map(|i| &self.vars[i].1).collect()
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    /// The pattern with variable names, e.g. `( ph -> ps )`.
    pub fn body(&self) -> Vec<Symbol> {
        self.pattern
            .iter()
            .map(|p| match p {
                PatternItem::Constant(c) => c.clone(),
                PatternItem::Var(i) => self.vars[*i].0.clone(),
            })
            .collect()
    }

    /// The pattern with slot `i` (in child order) replaced by `fill(i)`.
    pub fn pattern_with(&self, mut fill: impl FnMut(usize) -> Symbol) -> Vec<Symbol> {
        let mut slot = 0;
        self.pattern
            .iter()
            .map(|p| match p {
                PatternItem::Constant(c) => c.clone(),
                PatternItem::Var(_) => {
                    slot += 1;
                    fill(slot - 1)
                }
            })
            .collect()
    }

    /// The tree of the rule applied to its own variables.
    pub fn generic_tree(self: &Arc<Self>) -> SyntaxTree {
        let children = self
            .slot_vars()
            .into_iter()
            .map(|i| SyntaxTree::leaf(self.vars[i].0.clone(), self.vars[i].1.clone()))
            .collect();
        SyntaxTree::Node { rule: self.clone(), children }
    }
}

impl fmt::Display for GrammarRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} →", self.label, self.typecode)?;
        for p in &self.pattern {
            match p {
                PatternItem::Constant(c) => write!(f, " `{c}`")?,
                PatternItem::Var(i) => write!(f, " <{}>", self.vars[*i].1)?,
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GrammarError {
    #[error("syntactic axiom `{0}` has essential hypotheses; expression grammars must be context free")]
    ContextFreeness(String),
    #[error("syntactic axiom `{0}` has an empty pattern")]
    EmptyPattern(String),
    #[error("rule `{label}` uses variable {var} more than once")]
    RepeatedVariable { label: String, var: Symbol },
    #[error("rule `{label}` declares variable {var} but does not use it")]
    UnusedVariable { label: String, var: Symbol },
    #[error("rule `{label}` has non-syntactic typecode {typecode}")]
    NotSyntactic { label: String, typecode: Symbol },
    #[error("duplicate rule label `{0}`")]
    DuplicateRule(String),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("no parse of `{text}` as {typecode}: stuck after {consumed} of {len} tokens")]
    NoParse { typecode: Symbol, text: String, consumed: usize, len: usize },
    #[error("ambiguous parse of `{text}` as {typecode}: {first} vs {second}")]
    Ambiguous { typecode: Symbol, text: String, first: String, second: String },
    #[error("{0} is not a syntactic typecode")]
    NotSyntactic(Symbol),
    #[error("cannot parse `{text}` under judgement {marker}: {reason}")]
    Judgement { marker: Symbol, text: String, reason: String },
}

/// Typecodes of the variables that may occur in an expression.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarTypes(HashMap<Symbol, Symbol>);

impl VarTypes {
    pub fn new() -> VarTypes {
        VarTypes::default()
    }

    pub fn insert(&mut self, var: Symbol, typecode: Symbol) -> Option<Symbol> {
        self.0.insert(var, typecode)
    }

    pub fn get(&self, var: &Symbol) -> Option<&Symbol> {
        self.0.get(var)
    }

    pub fn contains(&self, var: &Symbol) -> bool {
        self.0.contains_key(var)
    }
}

impl FromIterator<(Symbol, Symbol)> for VarTypes {
    fn from_iter<I: IntoIterator<Item = (Symbol, Symbol)>>(iter: I) -> Self {
        VarTypes(iter.into_iter().collect())
    }
}

/// Whether a statement is a term (syntactic) or a judgement such as `|-`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Marker {
    Syntactic,
    Judgement(Symbol),
}

/// An expression split into marker, syntactic typecode and tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedExpression {
    pub marker: Marker,
    pub typecode: Symbol,
    pub tree: SyntaxTree,
}

impl ParsedExpression {
    /// Back to the flat form: the marker (or the typecode for terms) followed
    /// by the linearized tree.
    pub fn to_expression(&self) -> Expression {
        match &self.marker {
            Marker::Syntactic => self.tree.to_expression(&self.typecode),
            Marker::Judgement(m) => self.tree.to_expression(m),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct GrammarOptions {
    /// Use these syntactic typecodes instead of inferring them from `$f`.
    pub syntactic_override: Option<Vec<Symbol>>,
    /// Fixed syntactic typecode for judgement bodies, e.g. `|-` → `wff`.
    /// Unlisted markers try every syntactic typecode and need a unique parse.
    pub judgement_types: Vec<(Symbol, Symbol)>,
}

/// An immutable-once-built set of productions over syntactic typecodes.
#[derive(Clone, Debug, Default)]
pub struct Grammar {
    rules: Vec<Arc<GrammarRule>>,
    by_label: HashMap<String, usize>,
    syntactic: Vec<Symbol>,
    judgements: Vec<Symbol>,
    judgement_types: HashMap<Symbol, Symbol>,
    by_type: HashMap<Symbol, Vec<usize>>,
}

impl Grammar {
    pub fn new(syntactic: Vec<Symbol>) -> Grammar {
        Grammar { syntactic, ..Grammar::default() }
    }

    pub fn rules(&self) -> &[Arc<GrammarRule>] {
        &self.rules
    }

    pub fn rule(&self, label: &str) -> Option<&Arc<GrammarRule>> {
        self.by_label.get(label).map(|&i| &self.rules[i])
    }

    pub fn syntactic_typecodes(&self) -> &[Symbol] {
        &self.syntactic
    }

    pub fn judgement_markers(&self) -> &[Symbol] {
        &self.judgements
    }

    pub fn is_syntactic(&self, tc: &Symbol) -> bool {
        self.syntactic.contains(tc)
    }

    pub fn add_syntactic(&mut self, tc: Symbol) {
        if !self.syntactic.contains(&tc) {
            self.syntactic.push(tc);
        }
    }

    pub fn add_judgement(&mut self, tc: Symbol) {
        if !self.judgements.contains(&tc) && !self.syntactic.contains(&tc) {
            self.judgements.push(tc);
        }
    }

    pub fn set_judgement_type(&mut self, marker: Symbol, typecode: Symbol) {
        self.judgement_types.insert(marker, typecode);
    }

    pub fn add_rule(&mut self, rule: GrammarRule) -> Result<Arc<GrammarRule>, GrammarError> {
        if !self.is_syntactic(&rule.typecode) {
            return Err(GrammarError::NotSyntactic { label: rule.label.clone(), typecode: rule.typecode.clone() });
        }
        for (_, t) in &rule.vars {
            if !self.is_syntactic(t) {
                return Err(GrammarError::NotSyntactic { label: rule.label.clone(), typecode: t.clone() });
            }
        }
        if self.by_label.contains_key(&rule.label) {
            return Err(GrammarError::DuplicateRule(rule.label.clone()));
        }
        let i = self.rules.len();
        let rule = Arc::new(rule);
        self.by_label.insert(rule.label.clone(), i);
        self.by_type.entry(rule.typecode.clone()).or_default().push(i);
        self.rules.push(rule.clone());
        Ok(rule)
    }

    pub(crate) fn rules_of(&self, tc: &Symbol) -> &[usize] {
        self.by_type.get(tc).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Parses `body` as an expression of syntactic typecode `typecode`.
    pub fn parse(&self, typecode: &Symbol, body: &[Symbol], vars: &VarTypes) -> Result<SyntaxTree, ParseError> {
        if !self.is_syntactic(typecode) {
            return Err(ParseError::NotSyntactic(typecode.clone()));
        }
        earley::parse(self, typecode, body, vars)
    }

    /// Parses a full statement: a syntactic typecode is parsed directly; any
    /// other leading constant is a judgement marker whose body must parse
    /// under exactly one syntactic typecode.
    pub fn parse_statement(&self, e: &Expression, vars: &VarTypes) -> Result<ParsedExpression, ParseError> {
        if self.is_syntactic(&e.typecode) {
            let tree = self.parse(&e.typecode, &e.body, vars)?;
            return Ok(ParsedExpression { marker: Marker::Syntactic, typecode: e.typecode.clone(), tree });
        }
        let marker = e.typecode.clone();
        if let Some(tc) = self.judgement_types.get(&marker) {
            let tree = self.parse(tc, &e.body, vars)?;
            return Ok(ParsedExpression { marker: Marker::Judgement(marker), typecode: tc.clone(), tree });
        }
        let mut found: Option<(Symbol, SyntaxTree)> = None;
        let mut first_err = None;
        for tc in &self.syntactic {
            match earley::parse(self, tc, &e.body, vars) {
                Ok(tree) => {
                    if let Some((prev_tc, prev)) = &found {
                        return Err(ParseError::Judgement {
                            marker,
                            text: crate::symbol::join(&e.body),
                            reason: format!("parses both as {prev_tc} ({prev:?}) and as {tc} ({tree:?})"),
                        });
                    }
                    found = Some((tc.clone(), tree));
                }
                Err(err @ ParseError::Ambiguous { .. }) => return Err(err),
                Err(err) => {
                    let better = match (&first_err, &err) {
                        (None, _) => true,
                        (Some(ParseError::NoParse { consumed: a, .. }), ParseError::NoParse { consumed: b, .. }) => {
                            b > a
                        }
                        _ => false,
                    };
                    if better {
                        first_err = Some(err);
                    }
                }
            }
        }
        match found {
            Some((typecode, tree)) => Ok(ParsedExpression { marker: Marker::Judgement(marker), typecode, tree }),
            None => Err(first_err.unwrap_or(ParseError::Judgement {
                marker,
                text: crate::symbol::join(&e.body),
                reason: "no syntactic typecodes".into(),
            })),
        }
    }

    /// Plain-text production list, one rule per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        writeln!(out, "syntactic: {}", crate::symbol::join(&self.syntactic)).unwrap();
        writeln!(out, "judgements: {}", crate::symbol::join(&self.judgements)).unwrap();
        for r in &self.rules {
            writeln!(out, "{r}").unwrap();
        }
        out
    }
}

/// Extracts the expression grammar of a Metamath database.
///
/// A typecode is syntactic iff some `$f` declares a variable of it (unless
/// overridden); every syntactic `$a` becomes a production.
pub fn extract_grammar(db: &Database, opts: &GrammarOptions) -> Result<Grammar, GrammarError> {
    let syntactic = match &opts.syntactic_override {
        Some(list) => list.clone(),
        None => db.floating_typecodes().to_vec(),
    };
    let mut g = Grammar::new(syntactic);
    for (m, t) in &opts.judgement_types {
        g.set_judgement_type(m.clone(), t.clone());
    }
    for a in db.assertions() {
        let tc = &a.frame.conclusion.typecode;
        if !g.is_syntactic(tc) {
            g.add_judgement(tc.clone());
            continue;
        }
        if a.kind != AssertionKind::Axiom {
            continue;
        }
        if a.frame.essentials().next().is_some() {
            return Err(GrammarError::ContextFreeness(a.label.clone()));
        }
        let vars = a.frame.floatings().map(|h| (h.expr.body[0].clone(), h.expr.typecode.clone())).collect();
        let rule = GrammarRule::from_body(&a.label, tc.clone(), vars, &a.frame.conclusion.body)?;
        g.add_rule(rule)?;
    }
    Ok(g)
}
