//! RPN proof replay.
//!
//! A proof is a program for a stack machine. Hypothesis labels push their
//! expression; assertion labels pop one entry per mandatory hypothesis, read a
//! substitution off the floating entries, check the essential entries and the
//! disjointness conditions, and push the substituted conclusion. The proof is
//! accepted when exactly one entry remains and it equals the conclusion.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::database::{Assertion, AssertionKind, Database, Frame, HypKind, Hypothesis, Proof, ProofLabel};
use crate::symbol::{
    apply_substitution, check_disjoint, DisjointPairs, DisjointViolation, Expression, Substitution, Symbol,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceKind {
    Hypothesis { essential: bool },
    Assertion { axiom: bool, substitution: Substitution },
}

/// One evaluated proof step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub label: String,
    pub kind: TraceKind,
    pub expr: Expression,
    /// Indices of the steps popped as premises, in frame order.
    pub premises: Vec<usize>,
}

/// The execution record of an RPN proof. Reused (saved) steps of a
/// compressed proof are not repeated; later steps refer back to them.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProofTrace {
    pub steps: Vec<TraceStep>,
    /// Peak stack depth reached during replay.
    pub max_depth: usize,
    /// Index of the step left on the stack at the end.
    pub result: usize,
}

impl ProofTrace {
    pub fn conclusion(&self) -> &Expression {
        &self.steps[self.result].expr
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DecompressError {
    #[error("malformed compressed proof: unexpected character `{ch}` at offset {offset}")]
    BadCharacter { ch: char, offset: usize },
    #[error("malformed compressed proof: number not terminated at end of stream")]
    UnterminatedNumber,
    #[error("malformed compressed proof: `Z` at offset {offset} with nothing to save")]
    NothingToSave { offset: usize },
    #[error("compressed proof references step {number}, but only {available} are available")]
    BackreferenceOutOfRange { number: usize, available: usize },
    #[error("compressed proof stack underflow at label `{label}`")]
    StackUnderflow { label: String },
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("`{0}` has no proof")]
    MissingProof(String),
    #[error("step {step}: label `{label}` cannot be used ({reason})")]
    BadLabel { step: usize, label: String, reason: String },
    #[error("step {step}: proof is incomplete (`?`)")]
    Incomplete { step: usize },
    #[error("step {step}: `{label}` needs {needed} stack entries, found {found}")]
    StackUnderflow { step: usize, label: String, needed: usize, found: usize },
    #[error("step {step}: `{label}` hypothesis `{hyp}` expects typecode `{expected}`, found `{found}`")]
    FloatingMismatch { step: usize, label: String, hyp: String, expected: Symbol, found: Symbol },
    #[error("step {step}: `{label}` hypothesis `{hyp}` expects {expected}, found {found}")]
    EssentialMismatch { step: usize, label: String, hyp: String, expected: Box<Expression>, found: Box<Expression> },
    #[error("step {step}: `{label}` violates a disjoint variable condition: {violation}")]
    Disjoint { step: usize, label: String, violation: DisjointViolation },
    #[error("final stack size {0} ≠ 1")]
    FinalStackSize(usize),
    #[error("proof proves {found}, but the assertion states {expected}")]
    ConclusionMismatch { expected: Box<Expression>, found: Box<Expression> },
    #[error(transparent)]
    Decompress(#[from] DecompressError),
}

impl VerifyError {
    /// Short class name used in diagnostics and tests.
    pub fn class(&self) -> &'static str {
        match self {
            VerifyError::MissingProof(_) => "missing-proof",
            VerifyError::BadLabel { .. } => "bad-label",
            VerifyError::Incomplete { .. } => "incomplete",
            VerifyError::StackUnderflow { .. } => "stack-underflow",
            VerifyError::FloatingMismatch { .. } => "floating-mismatch",
            VerifyError::EssentialMismatch { .. } => "essential-mismatch",
            VerifyError::Disjoint { .. } => "disjoint",
            VerifyError::FinalStackSize(_) => "final-stack-size",
            VerifyError::ConclusionMismatch { .. } => "conclusion-mismatch",
            VerifyError::Decompress(_) => "decompress",
        }
    }
}

/// The stack machine shared by every proof source (scoped database, SMM).
pub struct Machine<'a> {
    stack: Vec<usize>,
    trace: ProofTrace,
    ambient: &'a DisjointPairs,
    is_var: &'a (dyn Fn(&Symbol) -> bool + Sync),
    step: usize,
}

impl<'a> Machine<'a> {
    pub fn new(ambient: &'a DisjointPairs, is_var: &'a (dyn Fn(&Symbol) -> bool + Sync)) -> Machine<'a> {
        Machine { stack: Vec::new(), trace: ProofTrace::default(), ambient, is_var, step: 0 }
    }

    fn push(&mut self, idx: usize) {
        self.stack.push(idx);
        self.trace.max_depth = self.trace.max_depth.max(self.stack.len());
    }

    pub fn depth(&self) -> usize {
        self.stack.len()
    }

    /// Index of the most recent trace step on top of the stack.
    pub fn top(&self) -> Option<usize> {
        self.stack.last().copied()
    }

    pub fn push_hyp(&mut self, hyp: &Hypothesis) {
        let idx = self.trace.steps.len();
        self.trace.steps.push(TraceStep {
            label: hyp.label.clone(),
            kind: TraceKind::Hypothesis { essential: hyp.kind == HypKind::Essential },
            expr: hyp.expr.clone(),
            premises: Vec::new(),
        });
        self.push(idx);
        self.step += 1;
    }

    /// Pushes an already evaluated step again (compressed-proof reuse).
    pub fn push_saved(&mut self, idx: usize) {
        self.push(idx);
        self.step += 1;
    }

    pub fn apply(&mut self, label: &str, axiom: bool, frame: &Frame) -> Result<(), VerifyError> {
        let step = self.step;
        let n = frame.hyps.len();
        if self.stack.len() < n {
            return Err(VerifyError::StackUnderflow {
                step,
                label: label.to_string(),
                needed: n,
                found: self.stack.len(),
            });
        }
        let base = self.stack.len() - n;
        let popped: Vec<usize> = self.stack[base..].to_vec();
        let mut subst = Substitution::new();
        for (hyp, &entry) in frame.hyps.iter().zip(&popped) {
            if hyp.kind != HypKind::Floating {
                continue;
            }
            let found = &self.trace.steps[entry].expr;
            if found.typecode != hyp.expr.typecode {
                return Err(VerifyError::FloatingMismatch {
                    step,
                    label: label.to_string(),
                    hyp: hyp.label.clone(),
                    expected: hyp.expr.typecode.clone(),
                    found: found.typecode.clone(),
                });
            }
            subst.bind(hyp.expr.body[0].clone(), found.clone());
        }
        for (hyp, &entry) in frame.hyps.iter().zip(&popped) {
            if hyp.kind != HypKind::Essential {
                continue;
            }
            let expected = apply_substitution(&hyp.expr, &subst);
            let found = &self.trace.steps[entry].expr;
            if &expected != found {
                return Err(VerifyError::EssentialMismatch {
                    step,
                    label: label.to_string(),
                    hyp: hyp.label.clone(),
                    expected: Box::new(expected),
                    found: Box::new(found.clone()),
                });
            }
        }
        check_disjoint(&subst, &frame.disjoint, self.ambient, self.is_var)
            .map_err(|violation| VerifyError::Disjoint { step, label: label.to_string(), violation })?;
        let expr = apply_substitution(&frame.conclusion, &subst);
        self.stack.truncate(base);
        let idx = self.trace.steps.len();
        self.trace.steps.push(TraceStep {
            label: label.to_string(),
            kind: TraceKind::Assertion { axiom, substitution: subst },
            expr,
            premises: popped,
        });
        self.push(idx);
        self.step += 1;
        Ok(())
    }

    pub fn finish(mut self, conclusion: &Expression) -> Result<ProofTrace, VerifyError> {
        if self.stack.len() != 1 {
            return Err(VerifyError::FinalStackSize(self.stack.len()));
        }
        let result = self.stack[0];
        let found = &self.trace.steps[result].expr;
        if found != conclusion {
            return Err(VerifyError::ConclusionMismatch {
                expected: Box::new(conclusion.clone()),
                found: Box::new(found.clone()),
            });
        }
        self.trace.result = result;
        Ok(self.trace)
    }
}

fn label_name(db: &Database, l: &ProofLabel) -> String {
    match l {
        ProofLabel::Hyp(h) => db.hyp(*h).label.clone(),
        ProofLabel::Assertion(a) => db.assertion(*a).label.clone(),
        ProofLabel::Incomplete => "?".to_string(),
        ProofLabel::Unresolved { label, .. } => label.clone(),
    }
}

/// Applies one resolved label. `current` is the index of the assertion being
/// proved; only earlier assertions may be referenced.
fn step_label(
    db: &Database,
    current: usize,
    m: &mut Machine<'_>,
    step: usize,
    l: &ProofLabel,
) -> Result<(), VerifyError> {
    match l {
        ProofLabel::Hyp(h) => {
            m.push_hyp(db.hyp(*h));
            Ok(())
        }
        ProofLabel::Assertion(a) => {
            if *a >= current {
                return Err(VerifyError::BadLabel {
                    step,
                    label: db.assertion(*a).label.clone(),
                    reason: "not declared before this assertion".into(),
                });
            }
            let target = db.assertion(*a);
            m.apply(&target.label, target.kind == AssertionKind::Axiom, &target.frame)
        }
        ProofLabel::Incomplete => Err(VerifyError::Incomplete { step }),
        ProofLabel::Unresolved { label, reason } => {
            Err(VerifyError::BadLabel { step, label: label.clone(), reason: reason.to_string() })
        }
    }
}

/// Decodes the letter stream of a compressed proof into step numbers.
/// `None` marks a `Z` (save the top of the stack) and `Some(0)` marks `?`.
pub fn decode_letters(letters: &str) -> Result<Vec<Option<usize>>, DecompressError> {
    let mut out = Vec::new();
    let mut acc = 0usize;
    let mut pending = false;
    for (offset, ch) in letters.char_indices() {
        match ch {
            'U'..='Y' => {
                acc = acc * 5 + (ch as usize - 'U' as usize + 1);
                pending = true;
            }
            'A'..='T' => {
                acc = acc * 20 + (ch as usize - 'A' as usize + 1);
                out.push(Some(acc));
                acc = 0;
                pending = false;
            }
            'Z' => {
                if pending || out.is_empty() || matches!(out.last(), Some(None)) {
                    return Err(DecompressError::NothingToSave { offset });
                }
                out.push(None);
            }
            '?' if !pending => out.push(Some(0)),
            _ => return Err(DecompressError::BadCharacter { ch, offset }),
        }
    }
    if pending {
        return Err(DecompressError::UnterminatedNumber);
    }
    Ok(out)
}

fn arity(db: &Database, l: &ProofLabel) -> usize {
    match l {
        ProofLabel::Assertion(a) => db.assertion(*a).frame.hyps.len(),
        _ => 0,
    }
}

/// Expands a compressed proof into the equivalent normal label sequence.
/// Reused subproofs are copied in full. Normal proofs are returned as is.
pub fn decompress_proof(db: &Database, a: &Assertion) -> Result<Vec<ProofLabel>, VerifyError> {
    let proof = a.proof.as_ref().ok_or_else(|| VerifyError::MissingProof(a.label.clone()))?;
    let (labels, letters) = match proof {
        Proof::Normal(ls) => return Ok(ls.clone()),
        Proof::Compressed { labels, letters } => (labels, letters),
    };
    let mandatory: Vec<ProofLabel> = a
        .frame
        .hyps
        .iter()
        .map(|h| match db.lookup(&h.label) {
            Some(super::database::LabelRef::Hyp(id)) => ProofLabel::Hyp(id),
            _ => ProofLabel::Unresolved { label: h.label.clone(), reason: "frame hypothesis" },
        })
        .collect();
    let m = mandatory.len();
    let k = labels.len();
    let mut out: Vec<ProofLabel> = Vec::new();
    // start offset in `out` of each stack entry's subproof
    let mut starts: Vec<usize> = Vec::new();
    let mut saved: Vec<Vec<ProofLabel>> = Vec::new();
    for code in decode_letters(letters)? {
        match code {
            None => {
                let start = *starts.last().expect("decode_letters rejects a leading Z");
                saved.push(out[start..].to_vec());
            }
            Some(0) => {
                starts.push(out.len());
                out.push(ProofLabel::Incomplete);
            }
            Some(n) if n <= m + k => {
                let l = if n <= m { mandatory[n - 1].clone() } else { labels[n - m - 1].clone() };
                let need = arity(db, &l);
                if starts.len() < need {
                    return Err(DecompressError::StackUnderflow { label: label_name(db, &l) }.into());
                }
                let start = if need == 0 { out.len() } else { starts[starts.len() - need] };
                starts.truncate(starts.len() - need);
                starts.push(start);
                out.push(l);
            }
            Some(n) => {
                let i = n - m - k - 1;
                let sub = saved
                    .get(i)
                    .ok_or(DecompressError::BackreferenceOutOfRange { number: n, available: m + k + saved.len() })?;
                starts.push(out.len());
                out.extend(sub.iter().cloned());
            }
        }
    }
    Ok(out)
}

/// Replays the proof of assertion `id` and returns its trace.
pub fn verify_rpn_proof(db: &Database, id: usize) -> Result<ProofTrace, VerifyError> {
    let a = db.assertion(id);
    let proof = a.proof.as_ref().ok_or_else(|| VerifyError::MissingProof(a.label.clone()))?;
    let is_var = |s: &Symbol| db.is_variable(s);
    let mut m = Machine::new(&a.ambient_disjoint, &is_var);
    match proof {
        Proof::Normal(labels) => {
            for (step, l) in labels.iter().enumerate() {
                step_label(db, id, &mut m, step, l)?;
            }
        }
        Proof::Compressed { labels, letters } => {
            let m_count = a.frame.hyps.len();
            let k = labels.len();
            let mut saved: Vec<usize> = Vec::new();
            for (step, code) in decode_letters(letters)?.into_iter().enumerate() {
                match code {
                    None => saved.push(m.top().expect("decode_letters rejects a leading Z")),
                    Some(0) => return Err(VerifyError::Incomplete { step }),
                    Some(n) if n <= m_count => m.push_hyp(&a.frame.hyps[n - 1]),
                    Some(n) if n <= m_count + k => step_label(db, id, &mut m, step, &labels[n - m_count - 1])?,
                    Some(n) => {
                        let idx = *saved.get(n - m_count - k - 1).ok_or(DecompressError::BackreferenceOutOfRange {
                            number: n,
                            available: m_count + k + saved.len(),
                        })?;
                        m.push_saved(idx);
                    }
                }
            }
        }
    }
    m.finish(&a.frame.conclusion)
}

/// Replays an explicit label sequence (for instance a decompressed proof)
/// against the frame of assertion `id`.
pub fn replay_labels(db: &Database, id: usize, labels: &[ProofLabel]) -> Result<ProofTrace, VerifyError> {
    let a = db.assertion(id);
    let is_var = |s: &Symbol| db.is_variable(s);
    let mut m = Machine::new(&a.ambient_disjoint, &is_var);
    for (step, l) in labels.iter().enumerate() {
        step_label(db, id, &mut m, step, l)?;
    }
    m.finish(&a.frame.conclusion)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EntryStatus {
    /// An axiom; nothing to check.
    Accepted,
    /// A proof that replayed successfully, with its step count.
    Verified {
        steps: usize,
    },
    Failed(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportEntry {
    pub label: String,
    pub status: EntryStatus,
    /// Error class for failures (see [`VerifyError::class`]).
    pub class: Option<&'static str>,
}

impl ReportEntry {
    pub fn passed(&self) -> bool {
        !matches!(self.status, EntryStatus::Failed(_))
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerificationReport {
    pub entries: Vec<ReportEntry>,
    pub elapsed: Duration,
    /// True when verification stopped at the first failure.
    pub stopped_early: bool,
}

impl VerificationReport {
    pub fn passed(&self) -> usize {
        self.entries.iter().filter(|e| e.passed()).count()
    }

    pub fn failed(&self) -> usize {
        self.entries.len() - self.passed()
    }

    pub fn total(&self) -> usize {
        self.entries.len()
    }

    pub fn is_ok(&self) -> bool {
        self.failed() == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportEntry> {
        self.entries.iter().filter(|e| !e.passed())
    }

    pub fn summary_line(&self) -> String {
        format!("verified: {} passed, {} failed, {} ms", self.passed(), self.failed(), self.elapsed.as_millis())
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CheckOptions {
    pub fail_fast: bool,
    /// Verify assertions on the rayon pool; ignored with `fail_fast`.
    pub parallel: bool,
}

/// Verifies every provable assertion of `db`. Syntax axioms (whose typecode
/// is syntactic) are not listed; other axioms are listed as accepted.
pub fn check_database(db: &Database, opts: CheckOptions) -> VerificationReport {
    let start = Instant::now();
    let listed: Vec<usize> = (0..db.assertions().len())
        .filter(|&i| {
            let a = db.assertion(i);
            a.kind == AssertionKind::Provable || !db.is_syntactic_typecode(&a.frame.conclusion.typecode)
        })
        .collect();
    let check = |i: usize| -> ReportEntry {
        let a = db.assertion(i);
        match a.kind {
            AssertionKind::Axiom => ReportEntry { label: a.label.clone(), status: EntryStatus::Accepted, class: None },
            AssertionKind::Provable => match verify_rpn_proof(db, i) {
                Ok(t) => ReportEntry {
                    label: a.label.clone(),
                    status: EntryStatus::Verified { steps: t.steps.len() },
                    class: None,
                },
                Err(e) => ReportEntry {
                    label: a.label.clone(),
                    status: EntryStatus::Failed(e.to_string()),
                    class: Some(e.class()),
                },
            },
        }
    };
    let mut report = VerificationReport::default();
    if opts.fail_fast {
        for i in listed {
            let e = check(i);
            let failed = !e.passed();
            report.entries.push(e);
            if failed {
                report.stopped_early = true;
                break;
            }
        }
    } else if opts.parallel {
        report.entries = listed.into_par_iter().map(check).collect();
    } else {
        report.entries = listed.into_iter().map(check).collect();
    }
    report.elapsed = start.elapsed();
    report
}
