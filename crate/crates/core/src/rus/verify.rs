//! Declarative proof checking.
//!
//! A step cites an assertion, lists its premises and claims a statement. The
//! cited proposition is matched against the claim, which fixes a
//! substitution; the cited hypotheses are then matched against the premises
//! in order, extending the substitution with variables that occur only in
//! hypotheses (as in modus ponens). Finally the cited disjointness clauses
//! must hold under the substitution.

use std::collections::{HashMap, HashSet};
use std::time::Instant;

use rayon::prelude::*;

use super::{
    check_definition, groups_to_pairs, DeclarativeProof, DefinitionOptions, DefinitionViolation, ProofStep, Ref,
    RefKind, RusItem, Statement, Theorem, Theory,
};
use crate::grammar::{match_into, Marker, MatchFailure, TreeSubstitution};
use crate::mm::{EntryStatus, ReportEntry, VerificationReport};
use crate::symbol::{check_disjoint, DisjointPairs, DisjointViolation, Symbol};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum StepError {
    #[error("`{0}` is not an assertion that can be cited")]
    NotCitable(String),
    #[error("`{0}` is not declared before the theorem being proved")]
    NotBefore(String),
    #[error("`{name}` is cited with `{used}` but is a `{actual}`")]
    WrongKind { name: String, used: &'static str, actual: &'static str },
    #[error("proof steps must carry a judgement marker, not `#`")]
    SyntacticStep,
    #[error("claim has marker `{found}`, `{name}` proves `{expected}`")]
    MarkerMismatch { name: String, expected: Symbol, found: Symbol },
    #[error("claim has type {found}, `{name}` proves {expected}")]
    TypeMismatch { name: String, expected: Symbol, found: Symbol },
    #[error("claim does not match the proposition of `{name}`: {failure}")]
    Proposition { name: String, failure: MatchFailure },
    #[error("`{name}` has {expected} hypotheses, {found} premises given")]
    PremiseCount { name: String, expected: usize, found: usize },
    #[error("premise {0} does not refer to a hypothesis or an earlier step")]
    BadPremise(Ref),
    #[error("premise {index} ({premise}) does not match hypothesis {index} of `{name}`: {reason}")]
    PremiseMismatch { name: String, index: usize, premise: Ref, reason: String },
    #[error("disjointness condition of `{name}` violated: {violation}")]
    Disjoint { name: String, violation: DisjointViolation },
}

impl StepError {
    pub fn class(&self) -> &'static str {
        match self {
            StepError::NotCitable(_) | StepError::NotBefore(_) | StepError::WrongKind { .. } => "bad-reference",
            StepError::SyntacticStep => "syntactic-step",
            StepError::MarkerMismatch { .. } | StepError::TypeMismatch { .. } | StepError::Proposition { .. } => {
                "proposition-mismatch"
            }
            StepError::PremiseCount { .. } => "premise-count",
            StepError::BadPremise(_) => "bad-premise",
            StepError::PremiseMismatch { .. } => "premise-mismatch",
            StepError::Disjoint { .. } => "disjoint",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RusVerifyError {
    #[error("theorem has no proof")]
    MissingProof,
    #[error("step {step}: {error}")]
    Step { step: usize, error: StepError },
    #[error("prop {0} is not bound by any qed")]
    Unbound(usize),
    #[error("prop {0} is bound more than once")]
    BoundTwice(usize),
    #[error("qed names prop {0}, which does not exist")]
    NoSuchProp(usize),
    #[error("qed for prop {prop} refers to missing {target}")]
    BadTarget { prop: usize, target: Ref },
    #[error("qed binds prop {prop} to {target}, which states `{found}` instead of `{expected}`")]
    QedMismatch { prop: usize, target: Ref, expected: String, found: String },
    #[error("definition check failed: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Definition(Vec<DefinitionViolation>),
}

impl RusVerifyError {
    pub fn class(&self) -> &'static str {
        match self {
            RusVerifyError::MissingProof => "missing-proof",
            RusVerifyError::Step { error, .. } => error.class(),
            RusVerifyError::Unbound(_)
            | RusVerifyError::BoundTwice(_)
            | RusVerifyError::NoSuchProp(_)
            | RusVerifyError::BadTarget { .. }
            | RusVerifyError::QedMismatch { .. } => "qed",
            RusVerifyError::Definition(_) => "definition",
        }
    }
}

/// What a step may see: the theorem's place in the theory, its hypotheses,
/// the steps verified so far, and the variables and disjointness clauses in
/// scope.
#[derive(Clone, Debug)]
pub struct ProofContext<'a> {
    pub position: usize,
    pub hyps: &'a [Statement],
    pub steps: HashMap<usize, &'a Statement>,
    pub vars: HashSet<Symbol>,
    pub disjoint: DisjointPairs,
}

impl<'a> ProofContext<'a> {
    pub fn new(position: usize, theorem: &'a Theorem) -> ProofContext<'a> {
        let a = &theorem.assertion;
        let mut vars: HashSet<Symbol> = a.vars.iter().map(|v| v.name.clone()).collect();
        let mut disjoint = a.disjoint();
        if let Some(p) = &theorem.proof {
            vars.extend(p.dummies.iter().map(|v| v.name.clone()));
            disjoint.extend(&groups_to_pairs(&p.disjoint_groups));
        }
        ProofContext { position, hyps: &a.hyps, steps: HashMap::new(), vars, disjoint }
    }

    pub fn resolve(&self, r: Ref) -> Option<&'a Statement> {
        match r {
            Ref::Hyp(k) => k.checked_sub(1).and_then(|i| self.hyps.get(i)),
            Ref::Step(k) => self.steps.get(&k).copied(),
        }
    }
}

fn kind_name(k: RefKind) -> &'static str {
    match k {
        RefKind::Axm => "axiom",
        RefKind::Thm => "theorem",
        RefKind::Def => "definition",
    }
}

/// Checks one step and returns the substitution that instantiates the cited
/// assertion.
pub fn verify_step(theory: &Theory, ctx: &ProofContext<'_>, step: &ProofStep) -> Result<TreeSubstitution, StepError> {
    let name = step.name.as_str();
    let cited = theory.citable(name).ok_or_else(|| StepError::NotCitable(name.to_string()))?;
    if cited.index >= ctx.position {
        return Err(StepError::NotBefore(name.to_string()));
    }
    if cited.kind != step.kind {
        return Err(StepError::WrongKind {
            name: name.to_string(),
            used: step.kind.keyword(),
            actual: kind_name(cited.kind),
        });
    }
    let claim = &step.stmt;
    let Marker::Judgement(found) = &claim.marker else { return Err(StepError::SyntacticStep) };
    if let Marker::Judgement(expected) = &cited.prop.marker {
        if expected != found {
            return Err(StepError::MarkerMismatch {
                name: name.to_string(),
                expected: expected.clone(),
                found: found.clone(),
            });
        }
    }
    if claim.typecode != cited.prop.typecode {
        return Err(StepError::TypeMismatch {
            name: name.to_string(),
            expected: cited.prop.typecode.clone(),
            found: claim.typecode.clone(),
        });
    }
    let mut s = TreeSubstitution::new();
    match_into(&cited.prop.tree, &claim.tree, &mut s)
        .map_err(|failure| StepError::Proposition { name: name.to_string(), failure })?;
    if cited.hyps.len() != step.premises.len() {
        return Err(StepError::PremiseCount {
            name: name.to_string(),
            expected: cited.hyps.len(),
            found: step.premises.len(),
        });
    }
    for (i, (hyp, &r)) in cited.hyps.iter().zip(&step.premises).enumerate() {
        let premise = ctx.resolve(r).ok_or(StepError::BadPremise(r))?;
        let mismatch =
            |reason: String| StepError::PremiseMismatch { name: name.to_string(), index: i + 1, premise: r, reason };
        if premise.marker != hyp.marker || premise.typecode != hyp.typecode {
            return Err(mismatch(format!(
                "judgement `{} {}` against `{} {}`",
                premise.marker_symbol(),
                premise.typecode,
                hyp.marker_symbol(),
                hyp.typecode
            )));
        }
        match_into(&hyp.tree, &premise.tree, &mut s).map_err(|f| mismatch(f.to_string()))?;
    }
    let required = groups_to_pairs(cited.disjoint);
    if !required.is_empty() {
        check_disjoint(&s.to_flat(), &required, &ctx.disjoint, |v: &Symbol| ctx.vars.contains(v))
            .map_err(|violation| StepError::Disjoint { name: name.to_string(), violation })?;
    }
    Ok(s)
}

fn check_proof(
    theory: &Theory,
    position: usize,
    t: &Theorem,
    proof: &DeclarativeProof,
) -> Result<usize, RusVerifyError> {
    let mut ctx = ProofContext::new(position, t);
    for step in &proof.steps {
        verify_step(theory, &ctx, step).map_err(|error| RusVerifyError::Step { step: step.index, error })?;
        ctx.steps.insert(step.index, &step.stmt);
    }
    let props = &t.assertion.props;
    let mut bound = vec![false; props.len()];
    for &(k, target) in &proof.qed {
        let Some(prop) = k.checked_sub(1).and_then(|i| props.get(i)) else { return Err(RusVerifyError::NoSuchProp(k)) };
        if std::mem::replace(&mut bound[k - 1], true) {
            return Err(RusVerifyError::BoundTwice(k));
        }
        let st = ctx.resolve(target).ok_or(RusVerifyError::BadTarget { prop: k, target })?;
        let verbatim = st.tree.linearize() == prop.tree.linearize();
        if !st.same_claim(prop) || !verbatim {
            return Err(RusVerifyError::QedMismatch {
                prop: k,
                target,
                expected: prop.to_expression().to_string(),
                found: st.to_expression().to_string(),
            });
        }
    }
    if let Some(i) = bound.iter().position(|b| !b) {
        return Err(RusVerifyError::Unbound(i + 1));
    }
    Ok(proof.steps.len())
}

/// Verifies the theorem at item `position`.
pub fn verify_theorem(theory: &Theory, position: usize) -> Result<usize, RusVerifyError> {
    match theory.item(position) {
        RusItem::Theorem(t) => match &t.proof {
            Some(p) => check_proof(theory, position, t, p),
            None => Err(RusVerifyError::MissingProof),
        },
        _ => Ok(0),
    }
}

#[derive(Clone, Debug, Default)]
pub struct TheoryOptions {
    pub definitions: DefinitionOptions,
    pub fail_fast: bool,
    pub parallel: bool,
}

/// Verifies every theorem and checks every definition. Rules are not listed;
/// axioms are listed as accepted.
pub fn verify_theory(theory: &Theory, opts: &TheoryOptions) -> VerificationReport {
    let start = Instant::now();
    let listed: Vec<usize> = (0..theory.len())
        .filter(|&i| matches!(theory.item(i), RusItem::Axiom(_) | RusItem::Definition(_) | RusItem::Theorem(_)))
        .collect();
    let check = |i: usize| -> ReportEntry {
        let item = theory.item(i);
        let label = item.name().unwrap_or_default().to_string();
        let result = match item {
            RusItem::Axiom(_) => return ReportEntry { label, status: EntryStatus::Accepted, class: None },
            RusItem::Definition(d) => {
                check_definition(theory, d, &opts.definitions).map(|_| 0).map_err(RusVerifyError::Definition)
            }
            _ => verify_theorem(theory, i),
        };
        match result {
            Ok(_) if matches!(item, RusItem::Definition(_)) => {
                ReportEntry { label, status: EntryStatus::Accepted, class: None }
            }
            Ok(steps) => ReportEntry { label, status: EntryStatus::Verified { steps }, class: None },
            Err(e) => ReportEntry { label, status: EntryStatus::Failed(e.to_string()), class: Some(e.class()) },
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
