//! Syntax trees and the tree-level operations on them.

use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use super::{GrammarRule, PatternItem};
use crate::symbol::{Expression, Substitution, Symbol};

/// A parse of an expression: leaves are variables, nodes apply grammar rules.
/// Node children follow the order of the variable slots in the rule pattern.
#[derive(Clone)]
pub enum SyntaxTree {
    Leaf { var: Symbol, typecode: Symbol },
    Node { rule: Arc<GrammarRule>, children: Vec<SyntaxTree> },
}

impl PartialEq for SyntaxTree {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (SyntaxTree::Leaf { var: a, typecode: ta }, SyntaxTree::Leaf { var: b, typecode: tb }) => {
                a == b && ta == tb
            }
            (SyntaxTree::Node { rule: ra, children: ca }, SyntaxTree::Node { rule: rb, children: cb }) => {
                (Arc::ptr_eq(ra, rb) || ra.label == rb.label) && ca == cb
            }
            _ => false,
        }
    }
}

impl Eq for SyntaxTree {}

impl Hash for SyntaxTree {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            SyntaxTree::Leaf { var, .. } => {
                0u8.hash(state);
                var.hash(state);
            }
            SyntaxTree::Node { rule, children } => {
                1u8.hash(state);
                rule.label.hash(state);
                children.hash(state);
            }
        }
    }
}

impl SyntaxTree {
    pub fn leaf(var: Symbol, typecode: Symbol) -> SyntaxTree {
        SyntaxTree::Leaf { var, typecode }
    }

    /// Builds a node, checking the child count and child typecodes.
    pub fn node(rule: Arc<GrammarRule>, children: Vec<SyntaxTree>) -> SyntaxTree {
        let slots = rule.slot_typecodes();
        assert_eq!(slots.len(), children.len(), "rule `{}` arity", rule.label);
        for (t, c) in slots.iter().zip(&children) {
            assert_eq!(*t, c.typecode(), "rule `{}` child typecode", rule.label);
        }
        SyntaxTree::Node { rule, children }
    }

    pub fn typecode(&self) -> &Symbol {
        match self {
            SyntaxTree::Leaf { typecode, .. } => typecode,
            SyntaxTree::Node { rule, .. } => &rule.typecode,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, SyntaxTree::Leaf { .. })
    }

    pub fn rule(&self) -> Option<&Arc<GrammarRule>> {
        match self {
            SyntaxTree::Node { rule, .. } => Some(rule),
            SyntaxTree::Leaf { .. } => None,
        }
    }

    pub fn children(&self) -> &[SyntaxTree] {
        match self {
            SyntaxTree::Node { children, .. } => children,
            SyntaxTree::Leaf { .. } => &[],
        }
    }

    /// In-order concatenation of pattern constants and linearized children.
    pub fn linearize(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        self.linearize_into(&mut out);
        out
    }

    fn linearize_into(&self, out: &mut Vec<Symbol>) {
        match self {
            SyntaxTree::Leaf { var, .. } => out.push(var.clone()),
            SyntaxTree::Node { rule, children } => {
                let mut slot = 0;
                for item in &rule.pattern {
                    match item {
                        PatternItem::Constant(c) => out.push(c.clone()),
                        PatternItem::Var(_) => {
                            children[slot].linearize_into(out);
                            slot += 1;
                        }
                    }
                }
            }
        }
    }

    /// The expression `typecode linearization` for this tree.
    pub fn to_expression(&self, typecode: &Symbol) -> Expression {
        Expression::new(typecode.clone(), self.linearize())
    }

    /// Leaf variables in left-to-right order, without repeats.
    pub fn variables(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        self.visit_leaves(&mut |v, _| {
            if !out.contains(v) {
                out.push(v.clone());
            }
        });
        out
    }

    /// Leaf variables paired with their typecodes, without repeats.
    pub fn typed_variables(&self) -> Vec<(Symbol, Symbol)> {
        let mut out: Vec<(Symbol, Symbol)> = Vec::new();
        self.visit_leaves(&mut |v, t| {
            if !out.iter().any(|(w, _)| w == v) {
                out.push((v.clone(), t.clone()));
            }
        });
        out
    }

    fn visit_leaves(&self, f: &mut impl FnMut(&Symbol, &Symbol)) {
        match self {
            SyntaxTree::Leaf { var, typecode } => f(var, typecode),
            SyntaxTree::Node { children, .. } => children.iter().for_each(|c| c.visit_leaves(f)),
        }
    }

    pub fn contains_rule(&self, label: &str) -> bool {
        match self {
            SyntaxTree::Leaf { .. } => false,
            SyntaxTree::Node { rule, children } => {
                rule.label == label || children.iter().any(|c| c.contains_rule(label))
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            SyntaxTree::Leaf { .. } => 0,
            SyntaxTree::Node { children, .. } => 1 + children.iter().map(|c| c.depth()).max().unwrap_or(0),
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Every subtree, this one included, in pre-order.
    pub fn subtrees(&self) -> Vec<&SyntaxTree> {
        let mut out = vec![self];
        for c in self.children() {
            out.extend(c.subtrees());
        }
        out
    }
}

impl fmt::Display for SyntaxTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::symbol::join(&self.linearize()))
    }
}

impl fmt::Debug for SyntaxTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SyntaxTree::Leaf { var, .. } => write!(f, "{var}"),
            SyntaxTree::Node { rule, children } => {
                write!(f, "{}(", rule.label)?;
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{c:?}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A substitution whose bindings are syntax trees.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct TreeSubstitution(BTreeMap<Symbol, SyntaxTree>);

impl TreeSubstitution {
    pub fn new() -> TreeSubstitution {
        TreeSubstitution::default()
    }

    pub fn bind(&mut self, var: Symbol, tree: SyntaxTree) -> Option<SyntaxTree> {
        self.0.insert(var, tree)
    }

    pub fn get(&self, var: &Symbol) -> Option<&SyntaxTree> {
        self.0.get(var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &SyntaxTree)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True when every binding maps a variable to the leaf of itself.
    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|(v, t)| matches!(t, SyntaxTree::Leaf { var, .. } if var == v))
    }

    /// The flat substitution obtained by linearizing every binding.
    pub fn to_flat(&self) -> Substitution {
        let mut s = Substitution::new();
        for (v, t) in &self.0 {
            s.bind(v.clone(), t.to_expression(t.typecode()));
        }
        s
    }
}

impl fmt::Debug for TreeSubstitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} ↦ {t}")?;
        }
        f.write_str("}")
    }
}

impl FromIterator<(Symbol, SyntaxTree)> for TreeSubstitution {
    fn from_iter<I: IntoIterator<Item = (Symbol, SyntaxTree)>>(iter: I) -> Self {
        TreeSubstitution(iter.into_iter().collect())
    }
}

/// Replaces bound leaves by their bindings; unbound leaves stay.
pub fn substitute_tree(t: &SyntaxTree, s: &TreeSubstitution) -> SyntaxTree {
    match t {
        SyntaxTree::Leaf { var, .. } => s.get(var).cloned().unwrap_or_else(|| t.clone()),
        SyntaxTree::Node { rule, children } => {
            SyntaxTree::Node { rule: rule.clone(), children: children.iter().map(|c| substitute_tree(c, s)).collect() }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("no match at child path {path:?}: {reason}")]
pub struct MatchFailure {
    /// Child indices from the root to the first conflicting position.
    pub path: Vec<usize>,
    pub reason: String,
}

/// One-sided matching: finds the substitution `s` over the leaves of
/// `pattern` with `substitute_tree(pattern, s) == target`.
pub fn match_pattern(pattern: &SyntaxTree, target: &SyntaxTree) -> Result<TreeSubstitution, MatchFailure> {
    let mut s = TreeSubstitution::new();
    match_into(pattern, target, &mut s)?;
    Ok(s)
}

/// Extends `s` so that `pattern` matches `target`, keeping existing bindings.
pub fn match_into(pattern: &SyntaxTree, target: &SyntaxTree, s: &mut TreeSubstitution) -> Result<(), MatchFailure> {
    let mut path = Vec::new();
    go(pattern, target, s, &mut path)
}

fn go(
    pattern: &SyntaxTree,
    target: &SyntaxTree,
    s: &mut TreeSubstitution,
    path: &mut Vec<usize>,
) -> Result<(), MatchFailure> {
    match pattern {
        SyntaxTree::Leaf { var, typecode } => {
            if target.typecode() != typecode {
                return Err(MatchFailure {
                    path: path.clone(),
                    reason: format!("variable {var} has typecode {typecode}, target has {}", target.typecode()),
                });
            }
            match s.get(var) {
                Some(bound) if bound != target => Err(MatchFailure {
                    path: path.clone(),
                    reason: format!("{var} already bound to `{bound}`, here `{target}`"),
                }),
                Some(_) => Ok(()),
                None => {
                    s.bind(var.clone(), target.clone());
                    Ok(())
                }
            }
        }
        SyntaxTree::Node { rule, children } => match target {
            SyntaxTree::Node { rule: trule, children: tchildren } if trule.label == rule.label => {
                for (i, (p, t)) in children.iter().zip(tchildren).enumerate() {
                    path.push(i);
                    go(p, t, s, path)?;
                    path.pop();
                }
                Ok(())
            }
            _ => Err(MatchFailure {
                path: path.clone(),
                reason: format!(
                    "rule `{}` against {}",
                    rule.label,
                    match target {
                        SyntaxTree::Node { rule, .. } => format!("rule `{}`", rule.label),
                        SyntaxTree::Leaf { var, .. } => format!("variable {var}"),
                    }
                ),
            }),
        },
    }
}
