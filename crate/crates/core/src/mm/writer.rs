//! Metamath output: one statement per line, two spaces of indentation per
//! open scope. Compressed proofs are expanded to normal format.

use std::fmt::Write;

use super::database::{AssertionKind, Database, HypKind, Item, Proof, ProofLabel};
use super::verify::{decompress_proof, VerifyError};
use crate::symbol::join;

fn proof_label(db: &Database, l: &ProofLabel) -> String {
    match l {
        ProofLabel::Hyp(h) => db.hyp(*h).label.clone(),
        ProofLabel::Assertion(a) => db.assertion(*a).label.clone(),
        ProofLabel::Incomplete => "?".into(),
        ProofLabel::Unresolved { label, .. } => label.clone(),
    }
}

/// Renders `db` as Metamath source.
pub fn write_mm(db: &Database) -> Result<String, VerifyError> {
    let mut out = String::new();
    let mut depth = 0usize;
    for item in db.items() {
        if matches!(item, Item::CloseScope) {
            depth = depth.saturating_sub(1);
        }
        let indent = "  ".repeat(depth);
        match item {
            Item::Comment { text, .. } => writeln!(out, "{indent}$({text}$)").unwrap(),
            Item::Constants(cs) => writeln!(out, "{indent}$c {} $.", join(cs)).unwrap(),
            Item::Variables(vs) => writeln!(out, "{indent}$v {} $.", join(vs)).unwrap(),
            Item::Disjoint(vs) => writeln!(out, "{indent}$d {} $.", join(vs)).unwrap(),
            Item::Hypothesis(h) => {
                let h = db.hyp(*h);
                let kw = match h.kind {
                    HypKind::Floating => "$f",
                    HypKind::Essential => "$e",
                };
                writeln!(out, "{indent}{} {kw} {} $.", h.label, h.expr).unwrap();
            }
            Item::Assertion(id) => {
                let a = db.assertion(*id);
                match a.kind {
                    AssertionKind::Axiom => writeln!(out, "{indent}{} $a {} $.", a.label, a.frame.conclusion).unwrap(),
                    AssertionKind::Provable => {
                        let labels = match a.proof.as_ref() {
                            Some(Proof::Normal(ls)) => ls.clone(),
                            Some(Proof::Compressed { .. }) => decompress_proof(db, a)?,
                            None => return Err(VerifyError::MissingProof(a.label.clone())),
                        };
                        let labels: Vec<String> = labels.iter().map(|l| proof_label(db, l)).collect();
                        writeln!(out, "{indent}{} $p {} $= {} $.", a.label, a.frame.conclusion, labels.join(" "))
                            .unwrap();
                    }
                }
            }
            Item::OpenScope => {
                writeln!(out, "{indent}${{").unwrap();
                depth += 1;
            }
            Item::CloseScope => writeln!(out, "{indent}$}}").unwrap(),
        }
    }
    Ok(out)
}
