//! Metamath databases: parsing, frames, RPN verification and output.

mod database;
mod parser;
mod verify;
mod writer;

pub use database::{
    Assertion, AssertionId, AssertionKind, BuildError, Database, DatabaseBuilder, Frame, HypId, HypKind, Hypothesis,
    Item, LabelRef, Position, Proof, ProofLabel,
};
pub use parser::{first_unresolved, parse_mm_source, MmError, MmErrorKind};
pub use verify::{
    check_database, decode_letters, decompress_proof, replay_labels, verify_rpn_proof, CheckOptions, DecompressError,
    EntryStatus, Machine, ProofTrace, ReportEntry, TraceKind, TraceStep, VerificationReport, VerifyError,
};
pub use writer::write_mm;
