//! Size metrics of a database or theory.

use std::fmt;
use std::time::{Duration, Instant};

use crate::grammar::{extract_grammar, GrammarOptions, VarTypes};
use crate::mm::{decompress_proof, parse_mm_source, AssertionKind, Database};
use crate::rus::{parse_rus_source, RusItem, Theory};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Counts {
    pub constants: usize,
    pub variables: usize,
    pub rules: usize,
    pub axioms: usize,
    pub definitions: usize,
    pub theorems: usize,
    /// Labels in Metamath proofs (decompressed), steps in Russell proofs.
    pub proof_steps: usize,
    pub syntactic_typecodes: usize,
}

#[derive(Clone, Debug, Default)]
pub struct Stats {
    pub counts: Counts,
    /// Wall time per phase: source parsing, grammar extraction and, for
    /// Metamath, parsing every statement into a syntax tree.
    pub timings: Vec<(&'static str, Duration)>,
}

impl fmt::Display for Stats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.counts;
        for (name, n) in [
            ("constants", c.constants),
            ("variables", c.variables),
            ("rules", c.rules),
            ("axioms", c.axioms),
            ("definitions", c.definitions),
            ("theorems", c.theorems),
            ("proof steps", c.proof_steps),
            ("syntactic typecodes", c.syntactic_typecodes),
        ] {
            writeln!(f, "{name}: {n}")?;
        }
        for (name, d) in &self.timings {
            writeln!(f, "time {name}: {:.3} ms", d.as_secs_f64() * 1e3)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct StatsError(pub String);

/// Metamath statistics. Syntactic axioms count as rules and non-syntactic
/// axioms labelled `df-...` as definitions.
pub fn mm_stats(src: &str) -> Result<Stats, StatsError> {
    let clock = Instant::now();
    let db = parse_mm_source(src).map_err(|e| StatsError(e.to_string()))?;
    let mut timings = vec![("parse", clock.elapsed())];
    let mut counts = database_counts(&db);

    let clock = Instant::now();
    let grammar = extract_grammar(&db, &GrammarOptions::default()).map_err(|e| StatsError(e.to_string()))?;
    timings.push(("grammar", clock.elapsed()));
    counts.syntactic_typecodes = grammar.syntactic_typecodes().len();

    let clock = Instant::now();
    for a in db.assertions() {
        let vars: VarTypes = a.frame.floatings().map(|h| (h.expr.body[0].clone(), h.expr.typecode.clone())).collect();
        for e in a.frame.essentials().map(|h| &h.expr).chain([&a.frame.conclusion]) {
            grammar.parse_statement(e, &vars).map_err(|err| StatsError(format!("{}: {err}", a.label)))?;
        }
    }
    timings.push(("expressions", clock.elapsed()));
    Ok(Stats { counts, timings })
}

pub fn database_counts(db: &Database) -> Counts {
    let mut c = Counts { constants: db.constants().count(), variables: db.variables().len(), ..Counts::default() };
    for a in db.assertions() {
        let syntactic = db.is_syntactic_typecode(&a.frame.conclusion.typecode);
        match a.kind {
            AssertionKind::Axiom if syntactic => c.rules += 1,
            AssertionKind::Axiom if a.label.starts_with("df-") => c.definitions += 1,
            AssertionKind::Axiom => c.axioms += 1,
            AssertionKind::Provable if syntactic => {}
            AssertionKind::Provable => c.theorems += 1,
        }
        if a.proof.is_some() {
            c.proof_steps += decompress_proof(db, a).map_or(0, |p| p.len());
        }
    }
    c.syntactic_typecodes = db.floating_typecodes().len();
    c
}

/// Russell statistics. Expressions are parsed along with the source.
pub fn rus_stats(src: &str) -> Result<Stats, StatsError> {
    let clock = Instant::now();
    let theory = parse_rus_source(src).map_err(|e| StatsError(e.to_string()))?;
    Ok(Stats { counts: theory_counts(&theory), timings: vec![("parse", clock.elapsed())] })
}

pub fn theory_counts(t: &Theory) -> Counts {
    let mut c = Counts {
        constants: t.constants().len(),
        syntactic_typecodes: t.grammar().syntactic_typecodes().len(),
        ..Counts::default()
    };
    let mut vars = std::collections::HashSet::new();
    for it in t.items() {
        match it {
            RusItem::Constant(_) | RusItem::Type(_) => {}
            RusItem::Rule(r) => {
                c.rules += 1;
                vars.extend(r.vars.iter().map(|v| v.name.clone()));
            }
            RusItem::Axiom(a) => {
                c.axioms += 1;
                vars.extend(a.vars.iter().map(|v| v.name.clone()));
            }
            RusItem::Definition(d) => {
                c.definitions += 1;
                vars.extend(d.vars.iter().map(|v| v.name.clone()));
            }
            RusItem::Theorem(th) => {
                c.theorems += 1;
                vars.extend(th.assertion.vars.iter().map(|v| v.name.clone()));
                if let Some(p) = &th.proof {
                    c.proof_steps += p.steps.len();
                    vars.extend(p.dummies.iter().map(|v| v.name.clone()));
                }
            }
        }
    }
    c.variables = vars.len();
    c
}
