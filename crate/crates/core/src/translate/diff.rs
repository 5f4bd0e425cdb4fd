//! Structural comparison of two databases, assertion by assertion.

use std::collections::HashMap;
use std::fmt;

use crate::mm::{AssertionKind, Database, Frame};
use crate::symbol::{Expression, Symbol};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiffKind {
    Missing,
    Extra,
    Kind { before: AssertionKind, after: AssertionKind },
    Floatings { before: Vec<(Symbol, Symbol)>, after: Vec<(Symbol, Symbol)> },
    Essentials { before: Vec<Expression>, after: Vec<Expression> },
    Conclusion { before: Expression, after: Expression },
    Disjoint { before: Vec<(Symbol, Symbol)>, after: Vec<(Symbol, Symbol)> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffEntry {
    pub label: String,
    pub kind: DiffKind,
}

impl fmt::Display for DiffEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs = |ps: &[(Symbol, Symbol)]| ps.iter().map(|(a, b)| format!("{a} {b}")).collect::<Vec<_>>().join(", ");
        let exprs = |es: &[Expression]| es.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; ");
        write!(f, "{}: ", self.label)?;
        match &self.kind {
            DiffKind::Missing => write!(f, "missing from the output"),
            DiffKind::Extra => write!(f, "only in the output"),
            DiffKind::Kind { before, after } => write!(f, "kind {before:?} became {after:?}"),
            DiffKind::Floatings { before, after } => {
                write!(f, "floatings [{}] became [{}]", pairs(before), pairs(after))
            }
            DiffKind::Essentials { before, after } => {
                write!(f, "essentials [{}] became [{}]", exprs(before), exprs(after))
            }
            DiffKind::Conclusion { before, after } => write!(f, "conclusion {before} became {after}"),
            DiffKind::Disjoint { before, after } => write!(f, "$d [{}] became [{}]", pairs(before), pairs(after)),
        }
    }
}

fn floatings(f: &Frame) -> Vec<(Symbol, Symbol)> {
    f.floatings().map(|h| (h.expr.typecode.clone(), h.expr.body[0].clone())).collect()
}

fn essentials(f: &Frame) -> Vec<Expression> {
    f.essentials().map(|h| h.expr.clone()).collect()
}

/// Compares assertions by label: kind, floating hypotheses (typecode and
/// variable, in order), essential hypotheses, conclusion and mandatory `$d`
/// pairs. Hypothesis labels, proofs and comments are not compared.
pub fn structural_diff(before: &Database, after: &Database) -> Vec<DiffEntry> {
    let mut out = Vec::new();
    let later: HashMap<&str, usize> =
        after.assertions().iter().enumerate().map(|(i, a)| (a.label.as_str(), i)).collect();
    for a in before.assertions() {
        let entry = |kind| DiffEntry { label: a.label.clone(), kind };
        let Some(&j) = later.get(a.label.as_str()) else {
            out.push(entry(DiffKind::Missing));
            continue;
        };
        let b = after.assertion(j);
        if a.kind != b.kind {
            out.push(entry(DiffKind::Kind { before: a.kind, after: b.kind }));
        }
        let (fa, fb) = (floatings(&a.frame), floatings(&b.frame));
        if fa != fb {
            out.push(entry(DiffKind::Floatings { before: fa, after: fb }));
        }
        let (ea, eb) = (essentials(&a.frame), essentials(&b.frame));
        if ea != eb {
            out.push(entry(DiffKind::Essentials { before: ea, after: eb }));
        }
        if a.frame.conclusion != b.frame.conclusion {
            out.push(entry(DiffKind::Conclusion {
                before: a.frame.conclusion.clone(),
                after: b.frame.conclusion.clone(),
            }));
        }
        if a.frame.disjoint != b.frame.disjoint {
            out.push(entry(DiffKind::Disjoint {
                before: a.frame.disjoint.iter().cloned().collect(),
                after: b.frame.disjoint.iter().cloned().collect(),
            }));
        }
    }
    for b in after.assertions() {
        if before.assertion_by_label(&b.label).is_none() {
            out.push(DiffEntry { label: b.label.clone(), kind: DiffKind::Extra });
        }
    }
    out
}
