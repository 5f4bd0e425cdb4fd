//! From a declarative proof back to an RPN label sequence.
//!
//! Each step is re-verified to recover its substitution. The step's proof is
//! then the post-order traversal of every bound syntax tree (in the cited
//! frame's floating order), the proofs of its premises, and the cited label.

use std::collections::HashMap;

use super::TranslateError;
use crate::grammar::SyntaxTree;
use crate::rus::{verify_step, ProofContext, Ref, RusItem, Theory};
use crate::symbol::Symbol;

/// The Metamath names of a theory: assertion labels, floating-hypothesis
/// labels and the floating order of every frame.
#[derive(Clone, Debug, Default)]
pub struct LabelScheme {
    /// Russell name → Metamath label, for names that differ.
    pub labels: HashMap<String, String>,
    /// Floating label of each variable.
    pub floats: HashMap<Symbol, String>,
    /// Variables of each rule or assertion in frame order.
    pub frames: HashMap<String, Vec<Symbol>>,
}

impl LabelScheme {
    pub fn label<'a>(&'a self, name: &'a str) -> &'a str {
        self.labels.get(name).map(|s| s.as_str()).unwrap_or(name)
    }

    fn float(&self, var: &Symbol, owner: &str) -> Result<&str, TranslateError> {
        self.floats.get(var).map(|s| s.as_str()).ok_or_else(|| TranslateError::Elaborate {
            label: owner.to_string(),
            reason: format!("variable {var} has no floating hypothesis"),
        })
    }

    fn frame(&self, name: &str, owner: &str) -> Result<&[Symbol], TranslateError> {
        self.frames.get(name).map(|v| v.as_slice()).ok_or_else(|| TranslateError::Elaborate {
            label: owner.to_string(),
            reason: format!("no frame for `{name}`"),
        })
    }

    /// Post-order RPN of a syntax tree, children in the rule's frame order.
    pub fn tree_rpn(&self, t: &SyntaxTree, owner: &str, out: &mut Vec<String>) -> Result<(), TranslateError> {
        match t {
            SyntaxTree::Leaf { var, .. } => out.push(self.float(var, owner)?.to_string()),
            SyntaxTree::Node { rule, children } => {
                let slots = rule.slot_vars();
                for v in self.frame(&rule.label, owner)? {
                    let i = rule.vars.iter().position(|(w, _)| w == v);
                    let child = i.and_then(|i| slots.iter().position(|&s| s == i)).ok_or_else(|| {
                        TranslateError::Elaborate {
                            label: owner.to_string(),
                            reason: format!("rule `{}` has no slot {v}", rule.label),
                        }
                    })?;
                    self.tree_rpn(&children[child], owner, out)?;
                }
                out.push(self.label(&rule.label).to_string());
            }
        }
        Ok(())
    }
}

/// Elaborates the proof of the theorem at item `position`. `hyp_labels[k-1]`
/// is the Metamath label of `hyp k`.
pub fn elaborate_proof(
    theory: &Theory,
    position: usize,
    scheme: &LabelScheme,
    hyp_labels: &[String],
) -> Result<Vec<String>, TranslateError> {
    let RusItem::Theorem(t) = theory.item(position) else {
        return Err(TranslateError::Elaborate {
            label: String::new(),
            reason: format!("item {position} is not a theorem"),
        });
    };
    let owner = t.assertion.name.as_str();
    let err = |reason: String| TranslateError::Elaborate { label: owner.to_string(), reason };
    let proof = t.proof.as_ref().ok_or_else(|| err("no proof".into()))?;
    let mut ctx = ProofContext::new(position, t);
    let mut rpn: HashMap<usize, Vec<String>> = HashMap::new();
    let hyp = |k: usize| hyp_labels.get(k.wrapping_sub(1)).cloned().ok_or_else(|| err(format!("no label for hyp {k}")));

    for step in &proof.steps {
        let s = verify_step(theory, &ctx, step).map_err(|error| TranslateError::Russell {
            label: owner.to_string(),
            reason: format!("step {}: {error}", step.index),
        })?;
        let mut out = Vec::new();
        for v in scheme.frame(&step.name, owner)? {
            let tree = s.get(v).ok_or_else(|| err(format!("step {}: {v} is not bound", step.index)))?;
            scheme.tree_rpn(tree, owner, &mut out)?;
        }
        for r in &step.premises {
            match r {
                Ref::Hyp(k) => out.push(hyp(*k)?),
                Ref::Step(k) => {
                    out.extend(rpn.get(k).ok_or_else(|| err(format!("step {k} is not available")))?.iter().cloned())
                }
            }
        }
        out.push(scheme.label(&step.name).to_string());
        rpn.insert(step.index, out);
        ctx.steps.insert(step.index, &step.stmt);
    }
    match proof.qed.as_slice() {
        [(1, Ref::Hyp(k))] => Ok(vec![hyp(*k)?]),
        [(1, Ref::Step(k))] => rpn.remove(k).ok_or_else(|| err(format!("qed refers to missing step {k}"))),
        _ => Err(err("expected exactly one `qed prop 1`".into())),
    }
}
