//! From an RPN trace to a declarative proof.
//!
//! Syntactic steps build syntax trees bottom-up: a floating hypothesis is a
//! leaf and an application substitutes the trees of its floating premises
//! into the parsed conclusion of the cited assertion. Judgement steps become
//! proof steps whose premises are the surviving essential entries.

use std::collections::HashMap;

use super::TranslateError;
use crate::grammar::{substitute_tree, Marker, ParsedExpression, SyntaxTree, TreeSubstitution};
use crate::mm::{Frame, HypKind, ProofTrace, TraceKind};
use crate::rus::{DeclarativeProof, ProofStep, Ref, RefKind, Role, Statement};

/// What stripping needs to know about a cited assertion.
#[derive(Clone, Debug)]
pub struct CitedAssertion {
    pub frame: Frame,
    pub conclusion: ParsedExpression,
    pub kind: RefKind,
}

pub type CitedTable = HashMap<String, CitedAssertion>;

enum Node {
    Syntax(SyntaxTree),
    Hyp(usize),
    Step(usize),
}

/// Strips the syntactic steps of `trace`. `hyps` lists the essential
/// hypotheses of the theorem being proved (label and parsed statement) in
/// order; `hyp k` refers to the k-th. Identical steps (same citation, same
/// premises, same statement) are merged. Steps come out numbered densely
/// from 1 and the last one reached by the trace is bound to prop 1.
pub fn strip_syntax_steps(
    label: &str,
    trace: &ProofTrace,
    hyps: &[(String, ParsedExpression)],
    cited: &CitedTable,
) -> Result<DeclarativeProof, TranslateError> {
    let malformed = |reason: String| TranslateError::MalformedTrace { label: label.to_string(), reason };
    let mut nodes: Vec<Node> = Vec::with_capacity(trace.steps.len());
    let mut proof = DeclarativeProof::default();
    let mut seen: HashMap<(String, Vec<Ref>, SyntaxTree), usize> = HashMap::new();

    for (i, t) in trace.steps.iter().enumerate() {
        let node = match &t.kind {
            TraceKind::Hypothesis { essential: false } => match t.expr.body.as_slice() {
                [var] => Node::Syntax(SyntaxTree::leaf(var.clone(), t.expr.typecode.clone())),
                _ => return Err(malformed(format!("floating hypothesis `{}` is not `typecode variable`", t.label))),
            },
            TraceKind::Hypothesis { essential: true } => match hyps.iter().position(|(l, _)| *l == t.label) {
                Some(k) => Node::Hyp(k + 1),
                None => return Err(malformed(format!("`{}` is not an essential hypothesis of the theorem", t.label))),
            },
            TraceKind::Assertion { .. } => {
                let CitedAssertion { frame, conclusion, kind } =
                    cited.get(&t.label).ok_or_else(|| malformed(format!("unknown assertion `{}`", t.label)))?;
                if frame.hyps.len() != t.premises.len() {
                    return Err(malformed(format!("step {i}: `{}` popped {} entries", t.label, t.premises.len())));
                }
                let mut s = TreeSubstitution::new();
                let mut premises = Vec::new();
                for (h, &p) in frame.hyps.iter().zip(&t.premises) {
                    match (h.kind, &nodes[p]) {
                        (HypKind::Floating, Node::Syntax(tree)) => {
                            s.bind(h.expr.body[0].clone(), tree.clone());
                        }
                        (HypKind::Floating, _) => {
                            return Err(malformed(format!("step {i}: floating `{}` bound to a judgement", h.label)))
                        }
                        (HypKind::Essential, Node::Hyp(k)) => premises.push(Ref::Hyp(*k)),
                        (HypKind::Essential, Node::Step(k)) => premises.push(Ref::Step(*k)),
                        (HypKind::Essential, Node::Syntax(_)) => {
                            return Err(malformed(format!(
                                "step {i}: essential `{}` satisfied by a syntactic step",
                                h.label
                            )))
                        }
                    }
                }
                let tree = substitute_tree(&conclusion.tree, &s);
                if tree.linearize() != t.expr.body {
                    return Err(malformed(format!("step {i}: rebuilt tree `{tree}` differs from `{}`", t.expr)));
                }
                match &conclusion.marker {
                    Marker::Syntactic if premises.is_empty() => Node::Syntax(tree),
                    Marker::Syntactic => {
                        return Err(malformed(format!("step {i}: syntactic `{}` has essential premises", t.label)))
                    }
                    Marker::Judgement(_) => {
                        let key = (t.label.clone(), premises, tree);
                        match seen.get(&key) {
                            Some(&k) => Node::Step(k),
                            None => {
                                let k = proof.steps.len() + 1;
                                let (name, premises, tree) = key.clone();
                                proof.steps.push(ProofStep {
                                    index: k,
                                    kind: *kind,
                                    name,
                                    premises,
                                    stmt: Statement {
                                        role: Role::Step(k),
                                        typecode: conclusion.typecode.clone(),
                                        marker: conclusion.marker.clone(),
                                        tree,
                                    },
                                });
                                seen.insert(key, k);
                                Node::Step(k)
                            }
                        }
                    }
                }
            }
        };
        nodes.push(node);
    }
    let target = match nodes.get(trace.result) {
        Some(Node::Hyp(k)) => Ref::Hyp(*k),
        Some(Node::Step(k)) => Ref::Step(*k),
        _ => return Err(malformed("the proof concludes with a syntactic step".into())),
    };
    proof.qed.push((1, target));
    Ok(proof)
}
