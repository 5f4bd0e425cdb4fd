//! Simplified Metamath: a flat list of assertions with explicit frames and
//! normal-format proofs. Nothing depends on scope; each assertion carries the
//! floating hypotheses of its dummy variables and the `$d` pairs involving
//! them alongside its frame.

use std::collections::{HashMap, HashSet};
use std::fmt::Write;

use super::TranslateError;
use crate::mm::{
    decompress_proof, parse_mm_source, AssertionKind, Database, EntryStatus, Frame, HypKind, Hypothesis, Machine,
    ProofLabel, ProofTrace, ReportEntry, VerificationReport, VerifyError,
};
use crate::symbol::{join, DisjointPairs, Symbol};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmmAssertion {
    pub label: String,
    pub kind: AssertionKind,
    pub frame: Frame,
    /// Floating hypotheses used by the proof for variables outside the frame.
    pub dummies: Vec<Hypothesis>,
    /// `$d` pairs needed by the proof beyond the mandatory ones.
    pub extra_disjoint: DisjointPairs,
    pub proof: Option<Vec<String>>,
}

impl SmmAssertion {
    /// Every pair available inside the proof.
    pub fn ambient_disjoint(&self) -> DisjointPairs {
        let mut d = self.frame.disjoint.clone();
        d.extend(&self.extra_disjoint);
        d
    }

    fn local_hyp(&self, label: &str) -> Option<&Hypothesis> {
        self.frame.hyps.iter().chain(&self.dummies).find(|h| h.label == label)
    }
}

#[derive(Clone, Debug, Default)]
pub struct SmmDatabase {
    pub constants: Vec<Symbol>,
    pub variables: Vec<Symbol>,
    pub assertions: Vec<SmmAssertion>,
    /// `(original name, label)` for every name that had to be changed.
    pub renamed: Vec<(String, String)>,
    index: HashMap<String, usize>,
}

impl SmmDatabase {
    pub fn new(constants: Vec<Symbol>, variables: Vec<Symbol>) -> SmmDatabase {
        SmmDatabase { constants, variables, ..SmmDatabase::default() }
    }

    pub fn push(&mut self, a: SmmAssertion) -> Result<usize, TranslateError> {
        let i = self.assertions.len();
        if self.index.insert(a.label.clone(), i).is_some() {
            return Err(TranslateError::NameCollision { name: a.label });
        }
        self.assertions.push(a);
        Ok(i)
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn get(&self, label: &str) -> Option<&SmmAssertion> {
        self.position(label).map(|i| &self.assertions[i])
    }

    pub fn len(&self) -> usize {
        self.assertions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assertions.is_empty()
    }

    pub fn is_syntactic_typecode(&self, tc: &Symbol) -> bool {
        self.assertions.iter().flat_map(|a| a.frame.floatings().chain(&a.dummies)).any(|h| &h.expr.typecode == tc)
    }

    /// Syntactic typecodes in order of first use by a floating hypothesis.
    pub fn syntactic_typecodes(&self) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = Vec::new();
        for a in &self.assertions {
            for h in a.frame.floatings().chain(&a.dummies) {
                if !out.contains(&h.expr.typecode) {
                    out.push(h.expr.typecode.clone());
                }
            }
        }
        out
    }
}

/// Flattens a database: frames are taken as computed at declaration, proofs
/// are decompressed and the floatings and `$d` pairs of dummy variables are
/// attached to each provable assertion.
pub fn mm_to_smm(db: &Database) -> Result<SmmDatabase, TranslateError> {
    let mut smm = SmmDatabase::new(db.constants().cloned().collect(), db.variables());
    for a in db.assertions() {
        let mut dummies: Vec<Hypothesis> = Vec::new();
        let mut extra = DisjointPairs::new();
        let proof = match a.kind {
            AssertionKind::Axiom => None,
            AssertionKind::Provable => {
                let labels = decompress_proof(db, a)
                    .map_err(|error| TranslateError::Verify { label: a.label.clone(), error })?;
                let mut out = Vec::with_capacity(labels.len());
                for (step, l) in labels.iter().enumerate() {
                    match l {
                        ProofLabel::Hyp(h) => {
                            let hyp = db.hyp(*h);
                            if !a.frame.hyps.iter().any(|f| f.label == hyp.label) && !dummies.contains(hyp) {
                                dummies.push(hyp.clone());
                            }
                            out.push(hyp.label.clone());
                        }
                        ProofLabel::Assertion(id) => out.push(db.assertion(*id).label.clone()),
                        ProofLabel::Incomplete => {
                            return Err(TranslateError::Verify {
                                label: a.label.clone(),
                                error: VerifyError::Incomplete { step },
                            })
                        }
                        ProofLabel::Unresolved { label, reason } => {
                            return Err(TranslateError::Verify {
                                label: a.label.clone(),
                                error: VerifyError::BadLabel { step, label: label.clone(), reason: reason.to_string() },
                            })
                        }
                    }
                }
                let vars: HashSet<&Symbol> = a.frame.floatings().chain(&dummies).filter_map(|h| h.variable()).collect();
                extra = a
                    .ambient_disjoint
                    .restrict(|v| vars.contains(v))
                    .iter()
                    .filter(|(x, y)| !a.frame.disjoint.contains(x, y))
                    .cloned()
                    .collect();
                Some(out)
            }
        };
        smm.push(SmmAssertion {
            label: a.label.clone(),
            kind: a.kind,
            frame: a.frame.clone(),
            dummies,
            extra_disjoint: extra,
            proof,
        })?;
    }
    Ok(smm)
}

/// Replays the proof of assertion `i` against the frames of earlier
/// assertions.
pub fn replay_smm(smm: &SmmDatabase, i: usize) -> Result<ProofTrace, VerifyError> {
    let a = &smm.assertions[i];
    let labels = a.proof.as_ref().ok_or_else(|| VerifyError::MissingProof(a.label.clone()))?;
    let vars: HashSet<&Symbol> = smm.variables.iter().collect();
    let is_var = |s: &Symbol| vars.contains(s);
    let ambient = a.ambient_disjoint();
    let mut m = Machine::new(&ambient, &is_var);
    for (step, label) in labels.iter().enumerate() {
        if let Some(h) = a.local_hyp(label) {
            m.push_hyp(h);
            continue;
        }
        match smm.position(label) {
            Some(j) if j < i => {
                let target = &smm.assertions[j];
                m.apply(label, target.kind == AssertionKind::Axiom, &target.frame)?;
            }
            Some(_) => {
                return Err(VerifyError::BadLabel {
                    step,
                    label: label.clone(),
                    reason: "not declared before this assertion".into(),
                })
            }
            None => {
                return Err(VerifyError::BadLabel { step, label: label.clone(), reason: "undeclared label".into() })
            }
        }
    }
    m.finish(&a.frame.conclusion)
}

/// Replays every proof. Syntactic axioms are not listed.
pub fn check_smm(smm: &SmmDatabase) -> VerificationReport {
    let start = std::time::Instant::now();
    let syntactic = smm.syntactic_typecodes();
    let mut report = VerificationReport::default();
    for (i, a) in smm.assertions.iter().enumerate() {
        let label = a.label.clone();
        let entry = match a.kind {
            AssertionKind::Axiom if syntactic.contains(&a.frame.conclusion.typecode) => continue,
            AssertionKind::Axiom => ReportEntry { label, status: EntryStatus::Accepted, class: None },
            AssertionKind::Provable => match replay_smm(smm, i) {
                Ok(t) => ReportEntry { label, status: EntryStatus::Verified { steps: t.steps.len() }, class: None },
                Err(e) => ReportEntry { label, status: EntryStatus::Failed(e.to_string()), class: Some(e.class()) },
            },
        };
        report.entries.push(entry);
    }
    report.elapsed = start.elapsed();
    report
}

/// Merges per-assertion variable orders into one global order. Ties (and
/// cycles, which no consistent source produces) fall back to first
/// appearance.
pub(crate) fn merge_orders<'a>(lists: impl IntoIterator<Item = Vec<&'a Symbol>>) -> Vec<Symbol> {
    let mut first: Vec<&Symbol> = Vec::new();
    let mut pos: HashMap<&Symbol, usize> = HashMap::new();
    let mut edges: Vec<HashSet<usize>> = Vec::new();
    for list in lists {
        let ids: Vec<usize> = list
            .into_iter()
            .map(|v| {
                *pos.entry(v).or_insert_with(|| {
                    first.push(v);
                    edges.push(HashSet::new());
                    first.len() - 1
                })
            })
            .collect();
        for w in ids.windows(2) {
            if w[0] != w[1] {
                edges[w[0]].insert(w[1]);
            }
        }
    }
    let n = first.len();
    let mut indegree = vec![0usize; n];
    for e in &edges {
        for &j in e {
            indegree[j] += 1;
        }
    }
    let mut done = vec![false; n];
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let next =
            (0..n).find(|&i| !done[i] && indegree[i] == 0).unwrap_or_else(|| (0..n).find(|&i| !done[i]).unwrap());
        done[next] = true;
        for &j in &edges[next] {
            indegree[j] = indegree[j].saturating_sub(1);
        }
        out.push(first[next].clone());
    }
    out
}

/// Renders SMM as Metamath source: global `$c`, `$v` and `$f` statements,
/// then one scope block per assertion that needs essentials or `$d`.
pub fn smm_to_mm_text(smm: &SmmDatabase) -> Result<String, TranslateError> {
    // one global floating per variable
    let order = merge_orders(
        smm.assertions.iter().map(|a| a.frame.floatings().chain(&a.dummies).filter_map(|h| h.variable()).collect()),
    );
    let mut floats: HashMap<&Symbol, &Hypothesis> = HashMap::new();
    for a in &smm.assertions {
        for h in a.frame.floatings().chain(&a.dummies) {
            let v = h.variable().expect("floating hypothesis");
            match floats.get(v) {
                Some(prev) if prev.expr.typecode != h.expr.typecode => {
                    return Err(TranslateError::VariableTypecode {
                        var: v.clone(),
                        first: prev.expr.typecode.clone(),
                        second: h.expr.typecode.clone(),
                    })
                }
                Some(_) => {}
                None => {
                    floats.insert(v, h);
                }
            }
        }
    }

    let mut out = String::new();
    if !smm.constants.is_empty() {
        writeln!(out, "$c {} $.", join(&smm.constants)).unwrap();
    }
    if !smm.variables.is_empty() {
        writeln!(out, "$v {} $.", join(&smm.variables)).unwrap();
    }
    for v in &order {
        let h = floats[v];
        writeln!(out, "{} $f {} $.", h.label, h.expr).unwrap();
    }
    for a in &smm.assertions {
        let essentials: Vec<&Hypothesis> = a.frame.essentials().collect();
        let disjoint = a.ambient_disjoint();
        let block = !essentials.is_empty() || !disjoint.is_empty();
        let indent = if block { "  " } else { "" };
        if block {
            out.push_str("${\n");
        }
        for (x, y) in disjoint.iter() {
            writeln!(out, "{indent}$d {x} {y} $.").unwrap();
        }
        for h in essentials {
            writeln!(out, "{indent}{} $e {} $.", h.label, h.expr).unwrap();
        }
        match (&a.kind, &a.proof) {
            (AssertionKind::Axiom, _) => writeln!(out, "{indent}{} $a {} $.", a.label, a.frame.conclusion).unwrap(),
            (AssertionKind::Provable, proof) => {
                let labels: Vec<&str> = match proof {
                    Some(ls) => ls
                        .iter()
                        .map(|l| match a.local_hyp(l) {
                            Some(h) if h.kind == HypKind::Floating => floats[h.variable().unwrap()].label.as_str(),
                            _ => l.as_str(),
                        })
                        .collect(),
                    None => vec!["?"],
                };
                writeln!(out, "{indent}{} $p {} $=", a.label, a.frame.conclusion).unwrap();
                let mut line = format!("{indent}  ");
                for l in labels {
                    if line.len() + l.len() > 78 && !line.trim().is_empty() {
                        out.push_str(line.trim_end());
                        out.push('\n');
                        line = format!("{indent}  ");
                    }
                    line.push_str(l);
                    line.push(' ');
                }
                writeln!(out, "{line}$.").unwrap();
            }
        }
        if block {
            out.push_str("$}\n");
        }
    }
    Ok(out)
}

pub fn smm_to_mm(smm: &SmmDatabase) -> Result<Database, TranslateError> {
    let text = smm_to_mm_text(smm)?;
    parse_mm_source(&text).map_err(|e| TranslateError::Output(e.to_string()))
}
