//! Conservativity conditions for definitions.
//!
//! A definition `defiendum := definiens` is accepted when
//! - C1: the defiendum applies a rule to distinct variables, and that rule is
//!   new: introduced by the definition itself or by a `rule` item that no
//!   earlier non-rule item uses;
//! - C2: the definiens does not use the defined rule;
//! - C3: the definiens has no variables outside the defiendum (dummies may be
//!   allowed, but must then be disjoint from every defiendum variable);
//! - C4: the proposition is the equivalence connective of the defiendum's
//!   typecode applied to defiendum and definiens.
//!
//! Under these conditions the definition can be eliminated from any proof by
//! unfolding, which is what makes the extension conservative.

use std::fmt;

use super::{Definition, RusItem, Theory};
use crate::grammar::{GrammarRule, Marker, PatternItem, SyntaxTree};
use crate::symbol::{join, Symbol};

#[derive(Clone, Debug)]
pub struct DefinitionOptions {
    /// Permit definiens variables that do not occur in the defiendum.
    pub allow_dummies: bool,
    /// Equivalence connective per defiendum typecode.
    pub connectives: Vec<(Symbol, Symbol)>,
}

impl Default for DefinitionOptions {
    fn default() -> Self {
        DefinitionOptions {
            allow_dummies: false,
            connectives: vec![(Symbol::new("wff"), Symbol::new("<->")), (Symbol::new("class"), Symbol::new("="))],
        }
    }
}

impl DefinitionOptions {
    pub fn connective(&self, typecode: &Symbol) -> Option<&Symbol> {
        self.connectives.iter().find(|(t, _)| t == typecode).map(|(_, c)| c)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DefinitionViolation {
    /// C1: the defiendum is not a rule applied to distinct variables.
    NotANotation { reason: String },
    /// C1: the defined rule already occurs in an earlier item.
    NotationInUse { rule: String, item: String },
    /// C2: the definiens mentions the defined rule.
    SelfReference { rule: String },
    /// C3: definiens variables missing from the defiendum.
    FreeVariables { vars: Vec<Symbol> },
    /// C3 with dummies enabled: a dummy not declared disjoint from a
    /// defiendum variable.
    DummyNotDisjoint { dummy: Symbol, var: Symbol },
    /// C4: no equivalence connective is configured or declared.
    NoConnective { typecode: Symbol },
    /// C4: the proposition is not the equivalence of the two sides.
    PropositionShape { expected: String, found: String },
}

impl DefinitionViolation {
    /// Condition code: `C1` to `C4`.
    pub fn code(&self) -> &'static str {
        match self {
            DefinitionViolation::NotANotation { .. } | DefinitionViolation::NotationInUse { .. } => "C1",
            DefinitionViolation::SelfReference { .. } => "C2",
            DefinitionViolation::FreeVariables { .. } | DefinitionViolation::DummyNotDisjoint { .. } => "C3",
            DefinitionViolation::NoConnective { .. } | DefinitionViolation::PropositionShape { .. } => "C4",
        }
    }
}

impl fmt::Display for DefinitionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.code())?;
        match self {
            DefinitionViolation::NotANotation { reason } => write!(f, "defiendum is not a new notation: {reason}"),
            DefinitionViolation::NotationInUse { rule, item } => write!(f, "rule `{rule}` is already used by `{item}`"),
            DefinitionViolation::SelfReference { rule } => write!(f, "definiens uses the defined rule `{rule}`"),
            DefinitionViolation::FreeVariables { vars } => {
                write!(f, "definiens variables {} do not occur in the defiendum", join(vars))
            }
            DefinitionViolation::DummyNotDisjoint { dummy, var } => {
                write!(f, "dummy variable {dummy} is not declared disjoint from {var}")
            }
            DefinitionViolation::NoConnective { typecode } => {
                write!(f, "no equivalence connective for typecode {typecode}")
            }
            DefinitionViolation::PropositionShape { expected, found } => {
                write!(f, "proposition should be `{expected}`, found `{found}`")
            }
        }
    }
}

/// Finds the rule `( A <conn> B )` with two slots of `typecode`.
fn equivalence_rule<'t>(theory: &'t Theory, typecode: &Symbol, connective: &Symbol) -> Option<&'t GrammarRule> {
    theory.grammar().rules().iter().map(|r| r.as_ref()).find(|r| {
        let slots = r.slot_typecodes();
        slots.len() == 2
            && slots.iter().all(|t| *t == typecode)
            && r.pattern.iter().any(|p| matches!(p, PatternItem::Constant(c) if c == connective))
    })
}

/// Checks conditions C1 to C4; every violated condition is reported.
pub fn check_definition(
    theory: &Theory,
    d: &Definition,
    opts: &DefinitionOptions,
) -> Result<(), Vec<DefinitionViolation>> {
    let mut out = Vec::new();
    let position = theory.index_of(&d.name).unwrap_or(theory.len());

    // C1
    let rule = match &d.defiendum.tree {
        SyntaxTree::Leaf { var, .. } => {
            out.push(DefinitionViolation::NotANotation { reason: format!("it is the bare variable {var}") });
            None
        }
        SyntaxTree::Node { rule, children } => {
            let mut seen = Vec::new();
            for c in children {
                match c {
                    SyntaxTree::Leaf { var, .. } if !seen.contains(var) => seen.push(var.clone()),
                    SyntaxTree::Leaf { var, .. } => {
                        out.push(DefinitionViolation::NotANotation { reason: format!("variable {var} occurs twice") })
                    }
                    other => out.push(DefinitionViolation::NotANotation {
                        reason: format!("argument `{other}` is not a variable"),
                    }),
                }
            }
            let implicit = d.implicit_rule.as_ref().is_some_and(|r| r.label == rule.label);
            if !implicit {
                match theory.index_of(&rule.label).map(|i| theory.item(i)) {
                    Some(RusItem::Rule(_)) => {}
                    _ => out.push(DefinitionViolation::NotANotation {
                        reason: format!("rule `{}` is not declared by a rule item", rule.label),
                    }),
                }
            }
            for item in &theory.items()[..position] {
                if matches!(item, RusItem::Rule(_)) {
                    continue;
                }
                if item.statements().iter().any(|s| s.tree.contains_rule(&rule.label)) {
                    out.push(DefinitionViolation::NotationInUse {
                        rule: rule.label.clone(),
                        item: item.name().unwrap_or("?").to_string(),
                    });
                    break;
                }
            }
            Some(rule.clone())
        }
    };

    // C2
    if let Some(r) = &rule {
        if d.definiens.tree.contains_rule(&r.label) {
            out.push(DefinitionViolation::SelfReference { rule: r.label.clone() });
        }
    }

    // C3
    let lhs = d.defiendum.tree.variables();
    let free: Vec<Symbol> = d.definiens.tree.variables().into_iter().filter(|v| !lhs.contains(v)).collect();
    if !free.is_empty() {
        if opts.allow_dummies {
            let disjoint = d.disjoint();
            for dummy in &free {
                for v in &lhs {
                    if !disjoint.contains(dummy, v) {
                        out.push(DefinitionViolation::DummyNotDisjoint { dummy: dummy.clone(), var: v.clone() });
                    }
                }
            }
        } else {
            out.push(DefinitionViolation::FreeVariables { vars: free });
        }
    }

    // C4
    let tc = &d.defiendum.typecode;
    match opts.connective(tc).and_then(|c| equivalence_rule(theory, tc, c)) {
        None => out.push(DefinitionViolation::NoConnective { typecode: tc.clone() }),
        Some(eq) => {
            let names = [Symbol::new("defiendum"), Symbol::new("definiens")];
            let expected = eq.pattern_with(|slot| names[slot].clone());
            let ok = matches!(d.prop.marker, Marker::Judgement(_))
                && matches!(&d.prop.tree, SyntaxTree::Node { rule, children }
                    if rule.label == eq.label && children.len() == 2
                        && children[0] == d.defiendum.tree && children[1] == d.definiens.tree);
            if !ok {
                out.push(DefinitionViolation::PropositionShape {
                    expected: join(&expected),
                    found: join(&d.prop.tree.linearize()),
                });
            }
        }
    }

    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}
