//! Translation between Metamath and Russell.
//!
//! The chain is MM → SMM → Russell → SMM → MM. SMM ("simplified Metamath")
//! is scope-free: every assertion carries its own frame and a normal-format
//! proof. Going to Russell, proofs are replayed and their syntactic steps
//! stripped; coming back, the stripped steps are rebuilt from syntax trees
//! and step substitutions.

mod diff;
mod elaborate;
mod from_rus;
mod smm;
mod strip;
mod to_rus;

use std::time::{Duration, Instant};

use crate::grammar::{GrammarError, ParseError};
use crate::mm::{check_database, CheckOptions, Database, VerificationReport, VerifyError};
use crate::rus::{parse_rus_source, print_theory, verify_theory, Theory, TheoryOptions};
use crate::symbol::Symbol;

pub use diff::{structural_diff, DiffEntry, DiffKind};
pub use elaborate::{elaborate_proof, LabelScheme};
pub use from_rus::{mm_label, rus_to_smm};
pub use smm::{check_smm, mm_to_smm, replay_smm, smm_to_mm, smm_to_mm_text, SmmAssertion, SmmDatabase};
pub use strip::{strip_syntax_steps, CitedAssertion, CitedTable};
pub use to_rus::{smm_to_rus, RusTranslation, TranslateOptions};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TranslateError {
    #[error("{label}: {error}")]
    Verify { label: String, error: VerifyError },
    #[error("{label}: {error}")]
    Parse { label: String, error: ParseError },
    #[error("{label}: {error}")]
    Grammar { label: String, error: GrammarError },
    #[error("{0}: a syntactic axiom with essential hypotheses is not a grammar rule")]
    NotContextFree(String),
    #[error("{label}: malformed proof trace: {reason}")]
    MalformedTrace { label: String, reason: String },
    #[error("{label}: cannot elaborate: {reason}")]
    Elaborate { label: String, reason: String },
    #[error("{label}: {reason}")]
    Russell { label: String, reason: String },
    #[error("name `{name}` is used twice")]
    NameCollision { name: String },
    #[error("variable {var} is declared with typecode {first} and with {second}")]
    VariableTypecode { var: Symbol, first: Symbol, second: Symbol },
    #[error("symbol `{0}` cannot be written in Russell syntax")]
    BadSymbol(Symbol),
    #[error("generated output does not parse: {0}")]
    Output(String),
    #[error("{stage} does not verify: {}", .failures.join("; "))]
    Stage { stage: &'static str, failures: Vec<String> },
}

fn require(stage: &'static str, report: &VerificationReport) -> Result<(), TranslateError> {
    if report.is_ok() {
        return Ok(());
    }
    let failures = report
        .failures()
        .map(|e| match &e.status {
            crate::mm::EntryStatus::Failed(msg) => format!("{}: {msg}", e.label),
            _ => e.label.clone(),
        })
        .collect();
    Err(TranslateError::Stage { stage, failures })
}

/// Metamath → Russell, going through SMM. The SMM stage is verified first.
pub fn mm_to_rus(db: &Database, opts: &TranslateOptions) -> Result<RusTranslation, TranslateError> {
    let smm = mm_to_smm(db)?;
    require("SMM", &check_smm(&smm))?;
    smm_to_rus(&smm, opts)
}

/// Russell → Metamath, going through SMM. The SMM stage is verified first.
pub fn rus_to_mm(theory: &Theory, opts: &TranslateOptions) -> Result<Database, TranslateError> {
    let smm = rus_to_smm(theory, opts.parallel)?;
    require("SMM", &check_smm(&smm))?;
    smm_to_mm(&smm)
}

/// Everything produced by a full round trip.
#[derive(Clone, Debug)]
pub struct ChainReport {
    pub smm: SmmDatabase,
    pub russell: String,
    pub theory: Theory,
    pub smm_back: SmmDatabase,
    pub mm: String,
    pub output: Database,
    pub diff: Vec<DiffEntry>,
    pub warnings: Vec<String>,
    /// Wall time per stage, in chain order.
    pub timings: Vec<(&'static str, Duration)>,
}

/// Runs MM → SMM → Russell → SMM → MM, verifying every stage. The Russell
/// stage is printed and parsed back before it is verified, so the text form
/// is checked as well.
pub fn round_trip(db: &Database, opts: &TranslateOptions) -> Result<ChainReport, TranslateError> {
    let mut timings = Vec::new();
    let mut clock = Instant::now();
    let mut lap = |name: &'static str, timings: &mut Vec<(&'static str, Duration)>| {
        timings.push((name, clock.elapsed()));
        clock = Instant::now();
    };
    let check_opts = CheckOptions { fail_fast: false, parallel: opts.parallel };
    require("input", &check_database(db, check_opts))?;
    lap("verify input", &mut timings);

    let smm = mm_to_smm(db)?;
    require("SMM", &check_smm(&smm))?;
    lap("MM -> SMM", &mut timings);

    let RusTranslation { theory, warnings } = smm_to_rus(&smm, opts)?;
    let russell = print_theory(&theory);
    let theory = parse_rus_source(&russell).map_err(|e| TranslateError::Output(e.to_string()))?;
    let theory_opts =
        TheoryOptions { definitions: opts.definitions.clone(), fail_fast: false, parallel: opts.parallel };
    require("Russell", &verify_theory(&theory, &theory_opts))?;
    lap("SMM -> Russell", &mut timings);

    let smm_back = rus_to_smm(&theory, opts.parallel)?;
    require("SMM (back)", &check_smm(&smm_back))?;
    lap("Russell -> SMM", &mut timings);

    let mm = smm_to_mm_text(&smm_back)?;
    let output = crate::mm::parse_mm_source(&mm).map_err(|e| TranslateError::Output(e.to_string()))?;
    require("output", &check_database(&output, check_opts))?;
    lap("SMM -> MM", &mut timings);

    let diff = structural_diff(db, &output);
    Ok(ChainReport { smm, russell, theory, smm_back, mm, output, diff, warnings, timings })
}

#[cfg(test)]
mod tests;
