//! Metamath source reader.

use super::database::{BuildError, Database, DatabaseBuilder, Position, Proof, ProofLabel};
use crate::symbol::{Expression, Symbol};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum MmErrorKind {
    #[error("stray `$` in token `{0}`")]
    StrayDollar(String),
    #[error("unterminated comment")]
    UnterminatedComment,
    #[error("unterminated statement: expected `$.`")]
    UnterminatedStatement,
    #[error("file inclusion `$[ ... $]` is not supported; concatenate the sources first")]
    IncludeUnsupported,
    #[error("unexpected token `{0}`")]
    UnexpectedToken(String),
    #[error("label `{0}` is not followed by `$f`, `$e`, `$a` or `$p`")]
    MissingKeyword(String),
    #[error("`{0}` statement needs a label")]
    MissingLabel(String),
    #[error("invalid label `{0}`")]
    InvalidLabel(String),
    #[error("floating hypothesis must be `typecode variable`")]
    FloatingShape,
    #[error("`$p` statement lacks a proof")]
    MissingProof,
    #[error("unterminated compressed proof label list")]
    UnterminatedLabelList,
    #[error(transparent)]
    Build(#[from] BuildError),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{position}: {kind}")]
pub struct MmError {
    pub position: Position,
    pub kind: MmErrorKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tok<'a> {
    Word(&'a str),
    Comment(&'a str),
}

struct Lexer<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
    column: usize,
}

fn is_ws(c: u8) -> bool {
    matches!(c, b' ' | b'\t' | b'\n' | b'\r' | b'\x0c')
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Lexer<'a> {
        Lexer { text, pos: 0, line: 1, column: 1 }
    }

    fn advance(&mut self, n: usize) {
        for ch in self.text[self.pos..self.pos + n].chars() {
            if ch == '\n' {
                self.line += 1;
                self.column = 1;
            } else {
                self.column += 1;
            }
        }
        self.pos += n;
    }

    fn skip_ws(&mut self) {
        let bytes = self.text.as_bytes();
        let mut n = 0;
        while self.pos + n < bytes.len() && is_ws(bytes[self.pos + n]) {
            n += 1;
        }
        self.advance(n);
    }

    fn raw_word(&mut self) -> Option<(&'a str, Position)> {
        self.skip_ws();
        if self.pos >= self.text.len() {
            return None;
        }
        let start = self.pos;
        let position = Position { line: self.line, column: self.column };
        let bytes = self.text.as_bytes();
        let mut end = start;
        while end < bytes.len() && !is_ws(bytes[end]) {
            end += 1;
        }
        self.advance(end - start);
        Some((&self.text[start..end], position))
    }

    fn next(&mut self) -> Result<Option<(Tok<'a>, Position)>, MmError> {
        let Some((word, position)) = self.raw_word() else { return Ok(None) };
        if word == "$(" {
            let body_start = self.pos;
            loop {
                match self.raw_word() {
                    None => return Err(MmError { position, kind: MmErrorKind::UnterminatedComment }),
                    Some(("$)", _)) => {
                        let body_end = self.pos - 2;
                        return Ok(Some((Tok::Comment(&self.text[body_start..body_end]), position)));
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(Some((Tok::Word(word), position)))
    }
}

fn is_keyword(w: &str) -> bool {
    matches!(w, "$c" | "$v" | "$f" | "$e" | "$d" | "$a" | "$p" | "${" | "$}" | "$=" | "$." | "$[" | "$]" | "$(" | "$)")
}

fn valid_label(w: &str) -> bool {
    !w.is_empty() && w.bytes().all(|b| b.is_ascii_alphanumeric() || matches!(b, b'-' | b'_' | b'.'))
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    builder: DatabaseBuilder,
}

impl<'a> Parser<'a> {
    /// Next non-comment word inside a statement. Comments inside statements
    /// are skipped.
    fn word(&mut self, stmt: Position) -> Result<(&'a str, Position), MmError> {
        loop {
            match self.lexer.next()? {
                None => return Err(MmError { position: stmt, kind: MmErrorKind::UnterminatedStatement }),
                Some((Tok::Comment(_), _)) => continue,
                Some((Tok::Word(w), p)) => {
                    if w.contains('$') && !is_keyword(w) {
                        return Err(MmError { position: p, kind: MmErrorKind::StrayDollar(w.to_string()) });
                    }
                    return Ok((w, p));
                }
            }
        }
    }

    /// Reads math symbols up to the terminator `$.` (or `$=` if allowed).
    fn symbols_until(&mut self, stmt: Position, allow_proof: bool) -> Result<(Vec<Symbol>, bool), MmError> {
        let mut out = Vec::new();
        loop {
            let (w, p) = self.word(stmt)?;
            match w {
                "$." => return Ok((out, false)),
                "$=" if allow_proof => return Ok((out, true)),
                _ if is_keyword(w) => {
                    return Err(MmError { position: p, kind: MmErrorKind::UnexpectedToken(w.to_string()) })
                }
                _ => out.push(Symbol::new(w)),
            }
        }
    }

    fn expression(&self, mut syms: Vec<Symbol>, position: Position) -> Result<Expression, MmError> {
        if syms.is_empty() {
            return Err(MmError { position, kind: BuildError::MissingTypecode.into() });
        }
        let typecode = syms.remove(0);
        Ok(Expression::new(typecode, syms))
    }

    fn proof(&mut self, stmt: Position) -> Result<Proof, MmError> {
        let (first, p) = self.word(stmt)?;
        if first == "$." {
            return Err(MmError { position: p, kind: MmErrorKind::MissingProof });
        }
        if first == "(" {
            let mut labels = Vec::new();
            loop {
                let (w, p) = self.word(stmt)?;
                match w {
                    ")" => break,
                    "$." => return Err(MmError { position: p, kind: MmErrorKind::UnterminatedLabelList }),
                    _ if is_keyword(w) => {
                        return Err(MmError { position: p, kind: MmErrorKind::UnexpectedToken(w.to_string()) })
                    }
                    _ => labels.push(self.builder.resolve_proof_label(w)),
                }
            }
            let mut letters = String::new();
            loop {
                let (w, p) = self.word(stmt)?;
                match w {
                    "$." => break,
                    _ if is_keyword(w) => {
                        return Err(MmError { position: p, kind: MmErrorKind::UnexpectedToken(w.to_string()) })
                    }
                    _ => letters.push_str(w),
                }
            }
            return Ok(Proof::Compressed { labels, letters });
        }
        let mut labels = vec![self.builder.resolve_proof_label(first)];
        loop {
            let (w, p) = self.word(stmt)?;
            match w {
                "$." => break,
                _ if is_keyword(w) => {
                    return Err(MmError { position: p, kind: MmErrorKind::UnexpectedToken(w.to_string()) })
                }
                _ => labels.push(self.builder.resolve_proof_label(w)),
            }
        }
        Ok(Proof::Normal(labels))
    }

    fn run(mut self) -> Result<Database, MmError> {
        let build = |position: Position| move |e: BuildError| MmError { position, kind: e.into() };
        while let Some((tok, position)) = self.lexer.next()? {
            let word = match tok {
                Tok::Comment(text) => {
                    self.builder.comment(text, position);
                    continue;
                }
                Tok::Word(w) => w,
            };
            match word {
                "$c" => {
                    let (syms, _) = self.symbols_until(position, false)?;
                    self.builder.constants(&syms).map_err(build(position))?;
                }
                "$v" => {
                    let (syms, _) = self.symbols_until(position, false)?;
                    self.builder.variables(&syms).map_err(build(position))?;
                }
                "$d" => {
                    let (syms, _) = self.symbols_until(position, false)?;
                    self.builder.disjoint(&syms).map_err(build(position))?;
                }
                "${" => self.builder.open_scope(),
                "$}" => self.builder.close_scope().map_err(build(position))?,
                "$[" => return Err(MmError { position, kind: MmErrorKind::IncludeUnsupported }),
                "$f" | "$e" | "$a" | "$p" => {
                    return Err(MmError { position, kind: MmErrorKind::MissingLabel(word.to_string()) })
                }
                _ if is_keyword(word) => {
                    return Err(MmError { position, kind: MmErrorKind::UnexpectedToken(word.to_string()) })
                }
                _ if word.contains('$') => {
                    return Err(MmError { position, kind: MmErrorKind::StrayDollar(word.to_string()) })
                }
                label => {
                    if !valid_label(label) {
                        return Err(MmError { position, kind: MmErrorKind::InvalidLabel(label.to_string()) });
                    }
                    let (kw, kp) = self.word(position)?;
                    match kw {
                        "$f" => {
                            let (syms, _) = self.symbols_until(position, false)?;
                            if syms.len() != 2 {
                                return Err(MmError { position, kind: MmErrorKind::FloatingShape });
                            }
                            self.builder.floating(label, syms[0].clone(), syms[1].clone()).map_err(build(position))?;
                        }
                        "$e" => {
                            let (syms, _) = self.symbols_until(position, false)?;
                            let e = self.expression(syms, position)?;
                            self.builder.essential(label, e).map_err(build(position))?;
                        }
                        "$a" => {
                            let (syms, _) = self.symbols_until(position, false)?;
                            let e = self.expression(syms, position)?;
                            self.builder.axiom(label, e, position).map_err(build(position))?;
                        }
                        "$p" => {
                            let (syms, has_proof) = self.symbols_until(position, true)?;
                            if !has_proof {
                                return Err(MmError { position, kind: MmErrorKind::MissingProof });
                            }
                            let e = self.expression(syms, position)?;
                            let proof = self.proof(position)?;
                            self.builder.provable(label, e, proof, position).map_err(build(position))?;
                        }
                        _ => {
                            return Err(MmError { position: kp, kind: MmErrorKind::MissingKeyword(label.to_string()) })
                        }
                    }
                }
            }
        }
        let end = Position { line: self.lexer.line, column: self.lexer.column };
        self.builder.finish().map_err(build(end))
    }
}

/// Parses a complete Metamath source into a [`Database`].
pub fn parse_mm_source(text: &str) -> Result<Database, MmError> {
    Parser { lexer: Lexer::new(text), builder: DatabaseBuilder::new() }.run()
}

/// Whether a proof label list contains unresolved entries, with the first one.
pub fn first_unresolved(labels: &[ProofLabel]) -> Option<&ProofLabel> {
    labels.iter().find(|l| matches!(l, ProofLabel::Unresolved { .. }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mm::database::{AssertionKind, HypKind, Item};

    const GRAMMAR_BLOCK: &str = "
$c wff ( ) -> $.
$v ph ps $.
${
    wph $f wff ph $.
    wps $f wff ps $.
    wi $a wff ( ph -> ps ) $.
$}
";

    #[test]
    fn floating_and_axiom() {
        let src = "$c wff ( ) -> $. $v ph ps $. wph $f wff ph $. wps $f wff ps $. wi $a wff ( ph -> ps ) $.";
        let db = parse_mm_source(src).unwrap();
        assert_eq!(db.hypotheses().iter().filter(|h| h.kind == HypKind::Floating).count(), 2);
        assert_eq!(db.assertions().len(), 1);
        assert_eq!(db.assertions()[0].kind, AssertionKind::Axiom);

        let db = parse_mm_source(GRAMMAR_BLOCK).unwrap();
        assert_eq!(db.assertions().len(), 1);
    }

    #[test]
    fn scoped_block_with_single_floating() {
        // A syntax axiom whose second variable has no floating is rejected.
        let src = "$c wff ( ) -> $. $v ph ps $. ${ wph $f wff ph $. wi $a wff ( ph -> ps ) $. $}";
        let err = parse_mm_source(src).unwrap_err();
        assert_eq!(err.kind, MmErrorKind::Build(BuildError::VariableWithoutFloating("ps".into())));
        let src = "$c wff ( ) -> $. $v ph $. ${ wph $f wff ph $. wi $a wff ( ph -> ph ) $. $}";
        let db = parse_mm_source(src).unwrap();
        assert_eq!(db.hypotheses().len(), 1);
        assert_eq!(db.assertions().len(), 1);
    }

    #[test]
    fn empty_input() {
        let db = parse_mm_source("").unwrap();
        assert!(db.assertions().is_empty());
        assert!(db.items().is_empty());
        let db = parse_mm_source("  \n\t ").unwrap();
        assert!(db.assertions().is_empty());
    }

    #[test]
    fn nested_scopes_hide_inner_essential() {
        // Hand-traced scope stack: the $e lives at depth 3; after the three
        // closes only the outer floating remains active.
        let src = "
$c wff |- $.
$v ph $.
wph $f wff ph $.
${
  ${
    ${
      inner $e |- ph $.
      in3 $a |- ph $.
    $}
    in2 $a |- ph $.
  $}
$}
top $a |- ph $.
";
        let db = parse_mm_source(src).unwrap();
        let in3 = db.assertion_by_label("in3").unwrap();
        assert_eq!(in3.frame.essentials().count(), 1);
        let in2 = db.assertion_by_label("in2").unwrap();
        assert_eq!(in2.frame.essentials().count(), 0);
        let top = db.assertion_by_label("top").unwrap();
        assert_eq!(top.frame.essentials().count(), 0);
        assert_eq!(top.frame.floatings().count(), 1);
    }

    #[test]
    fn comments_are_items_with_positions() {
        let src = "$( first $)\n$c a $.\n  $( second\n line $)";
        let db = parse_mm_source(src).unwrap();
        let comments: Vec<_> = db
            .items()
            .iter()
            .filter_map(|i| match i {
                Item::Comment { text, position } => Some((text.clone(), *position)),
                _ => None,
            })
            .collect();
        assert_eq!(comments.len(), 2);
        assert_eq!(comments[0].0, " first ");
        assert_eq!(comments[1].1, Position { line: 3, column: 3 });
        assert_eq!(comments[1].0, " second\n line ");
    }

    #[test]
    fn compressed_proof_kept_undecoded() {
        let src = "$c |- $. th $p |- $= ( ) AB CD $.";
        let db = parse_mm_source(src).unwrap();
        match &db.assertions()[0].proof {
            Some(Proof::Compressed { labels, letters }) => {
                assert!(labels.is_empty());
                assert_eq!(letters, "ABCD");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lexical_errors() {
        let err = parse_mm_source("$c a $.\n$x").unwrap_err();
        assert_eq!(err.kind, MmErrorKind::StrayDollar("$x".into()));
        assert_eq!(err.position, Position { line: 2, column: 1 });
        let err = parse_mm_source("$c a $.\n $( never closed").unwrap_err();
        assert_eq!(err.kind, MmErrorKind::UnterminatedComment);
        assert_eq!(err.position, Position { line: 2, column: 2 });
        let err = parse_mm_source("$c a$b $.").unwrap_err();
        assert_eq!(err.kind, MmErrorKind::StrayDollar("a$b".into()));
    }

    #[test]
    fn scope_errors() {
        let err = parse_mm_source("${ $} $}").unwrap_err();
        assert_eq!(err.kind, MmErrorKind::Build(BuildError::ScopeUnderflow));
        assert_eq!(err.position.column, 7);
        let err = parse_mm_source("${ ${ $}").unwrap_err();
        assert_eq!(err.kind, MmErrorKind::Build(BuildError::UnclosedScope(1)));
    }

    #[test]
    fn duplicate_label_and_undeclared_symbol() {
        let err = parse_mm_source("$c wff $. $v ph $. wph $f wff ph $. wph $a wff ph $.").unwrap_err();
        assert_eq!(err.kind, MmErrorKind::Build(BuildError::DuplicateLabel("wph".into())));
        let err = parse_mm_source("$c |- $.\nax $a |- foo $.").unwrap_err();
        assert_eq!(err.kind, MmErrorKind::Build(BuildError::UndeclaredSymbol("foo".into())));
        assert_eq!(err.position, Position { line: 2, column: 1 });
    }

    #[test]
    fn include_rejected() {
        let err = parse_mm_source("$[ set.mm $]").unwrap_err();
        assert_eq!(err.kind, MmErrorKind::IncludeUnsupported);
    }

    #[test]
    fn constant_kind_is_fixed() {
        let err = parse_mm_source("$c x $. $v x $.").unwrap_err();
        assert_eq!(err.kind, MmErrorKind::Build(BuildError::Redeclared("x".into())));
        // a variable may be redeclared once its scope has closed
        parse_mm_source("${ $v x $. $} $v x $.").unwrap();
        let err = parse_mm_source("${ $c y $. $}").unwrap_err();
        assert_eq!(err.kind, MmErrorKind::Build(BuildError::ConstantInInnerScope));
    }

    #[test]
    fn proof_label_resolution() {
        let src = "
$c |- $.
${ h $e |- $. $}
th $p |- $= h th nope ? $.
";
        let db = parse_mm_source(src).unwrap();
        let Some(Proof::Normal(labels)) = &db.assertions()[0].proof else { panic!() };
        assert!(matches!(&labels[0], ProofLabel::Unresolved { label, .. } if label == "h"));
        assert!(matches!(&labels[1], ProofLabel::Unresolved { label, .. } if label == "th"));
        assert!(matches!(&labels[2], ProofLabel::Unresolved { reason: "undeclared label", .. }));
        assert_eq!(labels[3], ProofLabel::Incomplete);
    }

    #[test]
    fn unicode_tokens_are_opaque() {
        let src = "$c wff ( ) → -> $. $v φ $. wphi $f wff φ $. a $a wff ( φ → φ ) $. b $a wff ( φ -> φ ) $.";
        let db = parse_mm_source(src).unwrap();
        assert_ne!(db.assertions()[0].frame.conclusion, db.assertions()[1].frame.conclusion);
    }
}
