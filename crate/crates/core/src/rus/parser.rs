//! Russell source reader.
//!
//! Structure (keywords, names, punctuation) is tokenized on whitespace and the
//! characters `( ) , : ; { }`. Expressions are different: after `=` the
//! marker and body are read as whitespace-separated symbols up to `;;`, so
//! math symbols may contain any of those characters.

use std::collections::HashSet;
use std::sync::Arc;

use super::{
    DeclarativeProof, Definition, ProofStep, Ref, RefKind, Role, RuleItem, RusAssertion, RusItem, Statement, Theorem,
    Theory, TypedVar, TERM_MARKER,
};
use crate::grammar::{Grammar, GrammarError, GrammarRule, Marker, ParseError, PatternItem, VarTypes};
use crate::mm::Position;
use crate::symbol::Symbol;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RusErrorKind {
    #[error("unexpected end of input, expected {0}")]
    UnexpectedEnd(String),
    #[error("expected {expected}, found `{found}`")]
    Unexpected { expected: String, found: String },
    #[error("unknown keyword `{0}`")]
    UnknownKeyword(String),
    #[error("unterminated comment")]
    UnterminatedComment,
    #[error("{what} `{name}` is not declared")]
    Undeclared { what: &'static str, name: String },
    #[error("`{0}` is already declared")]
    Duplicate(String),
    #[error("variable `{0}` is declared twice")]
    DuplicateVariable(String),
    #[error("duplicate step index {0}")]
    DuplicateStep(usize),
    #[error("{role} is out of order, expected index {expected}")]
    BadIndex { role: String, expected: usize },
    #[error("expected a positive number, found `{0}`")]
    BadNumber(String),
    #[error("expected marker {expected}, found `{found}`")]
    Marker { expected: &'static str, found: String },
    #[error("symbol `{0}` is neither a declared constant nor a variable in scope")]
    UnknownSymbol(String),
    #[error("`{name}` has {count} propositions; exactly one is supported")]
    PropCount { name: String, count: usize },
    #[error("`{0}` already has a proof")]
    DuplicateProof(String),
    #[error("`{0}` is not a theorem")]
    NotATheorem(String),
    #[error("`{0}` is both a constant and a variable")]
    ConstantAsVariable(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{position}: {kind}")]
pub struct RusError {
    pub position: Position,
    pub kind: RusErrorKind,
}

type Result<T> = std::result::Result<T, RusError>;

fn is_structural(c: char) -> bool {
    matches!(c, '(' | ')' | ',' | ':' | ';' | '{' | '}')
}

#[derive(Clone)]
struct Lexer<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn position(&self) -> Position {
        Position { line: self.line, column: self.column }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
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
        let n = self.rest().len() - self.rest().trim_start().len();
        self.advance(n);
    }

    fn skip_trivia(&mut self) -> Result<()> {
        loop {
            self.skip_ws();
            let rest = self.rest();
            if let Some(body) = rest.strip_prefix("/*") {
                let start = self.position();
                match body.find("*/") {
                    Some(i) => self.advance(i + 4),
                    None => return Err(RusError { position: start, kind: RusErrorKind::UnterminatedComment }),
                }
            } else if rest.starts_with("//") {
                let n = rest.find('\n').unwrap_or(rest.len());
                self.advance(n);
            } else {
                return Ok(());
            }
        }
    }

    fn next(&mut self) -> Result<Option<(&'a str, Position)>> {
        self.skip_trivia()?;
        let rest = self.rest();
        let position = self.position();
        let Some(c) = rest.chars().next() else { return Ok(None) };
        let len = if rest.starts_with(";;") {
            2
        } else if is_structural(c) {
            1
        } else {
            rest.find(|ch: char| ch.is_whitespace() || is_structural(ch)).unwrap_or(rest.len())
        };
        self.advance(len);
        Ok(Some((&rest[..len], position)))
    }

    fn peek(&self) -> Result<Option<&'a str>> {
        Ok(self.clone().next()?.map(|(t, _)| t))
    }

    /// Whitespace-separated symbols up to (and consuming) a `;;` symbol.
    fn raw_until_end(&mut self) -> Result<Vec<(&'a str, Position)>> {
        let mut out = Vec::new();
        loop {
            self.skip_ws();
            let rest = self.rest();
            if rest.is_empty() {
                return Err(RusError { position: self.position(), kind: RusErrorKind::UnexpectedEnd("`;;`".into()) });
            }
            let position = self.position();
            let len = rest.find(char::is_whitespace).unwrap_or(rest.len());
            self.advance(len);
            if &rest[..len] == ";;" {
                return Ok(out);
            }
            out.push((&rest[..len], position));
        }
    }
}

fn is_divider(tok: &str) -> bool {
    tok.len() >= 3 && tok.bytes().all(|b| b == b'-')
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum MarkerRule {
    Term,
    Judgement,
    /// Proof steps: anything parses, the verifier rejects `#`.
    Any,
}

struct Parser<'a> {
    lx: Lexer<'a>,
    theory: Theory,
    constants: HashSet<Symbol>,
    types: HashSet<Symbol>,
    /// Constants occurring in some rule pattern.
    notation: HashSet<Symbol>,
}

/// Parses a Russell source into a [`Theory`] in one forward pass.
pub fn parse_rus_source(text: &str) -> std::result::Result<Theory, RusError> {
    let mut p = Parser {
        lx: Lexer { text, pos: 0, line: 1, column: 1 },
        theory: Theory::new(Grammar::new(Vec::new())),
        constants: HashSet::new(),
        types: HashSet::new(),
        notation: HashSet::new(),
    };
    while let Some((tok, position)) = p.lx.next()? {
        p.item(tok, position)?;
    }
    Ok(p.theory)
}

impl<'a> Parser<'a> {
    fn err<T>(&self, position: Position, kind: RusErrorKind) -> Result<T> {
        Err(RusError { position, kind })
    }

    fn token(&mut self, expected: &str) -> Result<(&'a str, Position)> {
        match self.lx.next()? {
            Some(t) => Ok(t),
            None => self.err(self.lx.position(), RusErrorKind::UnexpectedEnd(expected.to_string())),
        }
    }

    fn expect(&mut self, want: &str) -> Result<Position> {
        let (tok, position) = self.token(&format!("`{want}`"))?;
        if tok != want {
            return self
                .err(position, RusErrorKind::Unexpected { expected: format!("`{want}`"), found: tok.to_string() });
        }
        Ok(position)
    }

    fn word(&mut self, what: &str) -> Result<(&'a str, Position)> {
        let (tok, position) = self.token(what)?;
        if tok.starts_with(is_structural) {
            return self.err(position, RusErrorKind::Unexpected { expected: what.to_string(), found: tok.to_string() });
        }
        Ok((tok, position))
    }

    fn number(&mut self) -> Result<usize> {
        let (tok, position) = self.token("a number")?;
        match tok.parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => self.err(position, RusErrorKind::BadNumber(tok.to_string())),
        }
    }

    fn item(&mut self, keyword: &'a str, position: Position) -> Result<()> {
        match keyword {
            "constant" => self.constant_block(),
            "type" => {
                let (name, pos) = self.word("a type name")?;
                self.expect(";;")?;
                let t = Symbol::new(name);
                if !self.types.insert(t.clone()) || self.constants.contains(&t) {
                    return self.err(pos, RusErrorKind::Duplicate(name.to_string()));
                }
                self.theory.grammar_mut().add_syntactic(t.clone());
                self.push(RusItem::Type(t), pos)
            }
            "rule" => self.rule(),
            "axiom" => {
                let a = self.assertion_item()?;
                self.push(RusItem::Axiom(a.0), a.1)
            }
            "theorem" => {
                let (assertion, pos) = self.assertion_item()?;
                self.push(RusItem::Theorem(Theorem { assertion, proof: None }), pos)
            }
            "definition" => self.definition(),
            "proof" => {
                self.expect("of")?;
                self.proof()
            }
            other => self.err(position, RusErrorKind::UnknownKeyword(other.to_string())),
        }
    }

    fn push(&mut self, item: RusItem, position: Position) -> Result<()> {
        match self.theory.push(item) {
            Ok(_) => Ok(()),
            Err(name) => self.err(position, RusErrorKind::Duplicate(name)),
        }
    }

    fn constant_block(&mut self) -> Result<()> {
        let position = self.expect("{")?;
        let mut syms = Vec::new();
        loop {
            let (tok, pos) = self.token("`symbol` or `}`")?;
            match tok {
                "}" => break,
                "symbol" => {
                    let raw = self.lx.raw_until_end()?;
                    if raw.len() != 1 {
                        return self.err(
                            pos,
                            RusErrorKind::Unexpected {
                                expected: "exactly one symbol".into(),
                                found: raw.iter().map(|(t, _)| *t).collect::<Vec<_>>().join(" "),
                            },
                        );
                    }
                    let s = Symbol::new(raw[0].0);
                    if self.constants.contains(&s) || self.types.contains(&s) {
                        return self.err(raw[0].1, RusErrorKind::Duplicate(s.to_string()));
                    }
                    self.constants.insert(s.clone());
                    syms.push(s);
                }
                other => {
                    return self
                        .err(pos, RusErrorKind::Unexpected { expected: "`symbol`".into(), found: other.to_string() })
                }
            }
        }
        self.push(RusItem::Constant(syms), position)
    }

    fn var_list(&mut self) -> Result<Vec<TypedVar>> {
        self.expect("(")?;
        let mut vars: Vec<TypedVar> = Vec::new();
        if self.lx.peek()? == Some(")") {
            self.lx.next()?;
            return Ok(vars);
        }
        loop {
            let (name, pos) = self.word("a variable name")?;
            self.expect(":")?;
            let typecode = self.type_name()?;
            let v = Symbol::new(name);
            if vars.iter().any(|w| w.name == v) {
                return self.err(pos, RusErrorKind::DuplicateVariable(name.to_string()));
            }
            if self.constants.contains(&v) || self.types.contains(&v) {
                return self.err(pos, RusErrorKind::ConstantAsVariable(name.to_string()));
            }
            vars.push(TypedVar { name: v, typecode });
            let (tok, pos) = self.token("`,` or `)`")?;
            match tok {
                "," => continue,
                ")" => return Ok(vars),
                other => {
                    return self
                        .err(pos, RusErrorKind::Unexpected { expected: "`,` or `)`".into(), found: other.to_string() })
                }
            }
        }
    }

    fn type_name(&mut self) -> Result<Symbol> {
        let (t, pos) = self.word("a type")?;
        let t = Symbol::new(t);
        if !self.types.contains(&t) {
            return self.err(pos, RusErrorKind::Undeclared { what: "type", name: t.to_string() });
        }
        Ok(t)
    }

    /// `( x y , u v )` after `disjoint`; every variable must be in `scope`.
    fn disjoint_groups(&mut self, scope: &[TypedVar]) -> Result<Vec<Vec<Symbol>>> {
        self.expect("(")?;
        let mut groups = Vec::new();
        let mut current = Vec::new();
        loop {
            let (tok, pos) = self.token("a variable, `,` or `)`")?;
            match tok {
                "," | ")" => {
                    if !current.is_empty() {
                        groups.push(std::mem::take(&mut current));
                    }
                    if tok == ")" {
                        return Ok(groups);
                    }
                }
                v => {
                    let v = Symbol::new(v);
                    if !scope.iter().any(|w| w.name == v) {
                        return self.err(pos, RusErrorKind::Undeclared { what: "variable", name: v.to_string() });
                    }
                    current.push(v);
                }
            }
        }
    }

    fn optional_disjoint(&mut self, scope: &[TypedVar]) -> Result<Vec<Vec<Symbol>>> {
        if self.lx.peek()? == Some("disjoint") {
            self.lx.next()?;
            self.disjoint_groups(scope)
        } else {
            Ok(Vec::new())
        }
    }

    /// Reads `: type = marker body ;;` and parses the body.
    fn statement(&mut self, role: Role, vars: &VarTypes, rule: MarkerRule) -> Result<Statement> {
        self.expect(":")?;
        let typecode = self.type_name()?;
        self.expect("=")?;
        let raw = self.lx.raw_until_end()?;
        self.build_statement(role, typecode, raw, vars, rule)
    }

    fn build_statement(
        &mut self,
        role: Role,
        typecode: Symbol,
        raw: Vec<(&str, Position)>,
        vars: &VarTypes,
        rule: MarkerRule,
    ) -> Result<Statement> {
        let Some(&(marker, mpos)) = raw.first() else {
            return self
                .err(self.lx.position(), RusErrorKind::Unexpected { expected: "a marker".into(), found: ";;".into() });
        };
        let marker = if marker == TERM_MARKER {
            if rule == MarkerRule::Judgement {
                return self.err(mpos, RusErrorKind::Marker { expected: "a judgement marker", found: marker.into() });
            }
            Marker::Syntactic
        } else {
            if rule == MarkerRule::Term {
                return self.err(mpos, RusErrorKind::Marker { expected: "`#`", found: marker.into() });
            }
            let m = Symbol::new(marker);
            if !self.constants.contains(&m) {
                return self.err(mpos, RusErrorKind::Undeclared { what: "constant", name: marker.into() });
            }
            self.theory.grammar_mut().add_judgement(m.clone());
            Marker::Judgement(m)
        };
        let body: Vec<Symbol> = raw[1..].iter().map(|(t, _)| Symbol::new(t)).collect();
        for (s, (_, pos)) in body.iter().zip(&raw[1..]) {
            if !vars.contains(s) && !self.constants.contains(s) {
                return self.err(*pos, RusErrorKind::UnknownSymbol(s.to_string()));
            }
        }
        let tree = self
            .theory
            .grammar()
            .parse(&typecode, &body, vars)
            .map_err(|e| RusError { position: mpos, kind: e.into() })?;
        Ok(Statement { role, typecode, marker, tree })
    }

    fn rule(&mut self) -> Result<()> {
        let (name, position) = self.word("a rule name")?;
        let vars = self.var_list()?;
        self.expect("{")?;
        self.expect("term")?;
        self.expect(":")?;
        let typecode = self.type_name()?;
        self.expect("=")?;
        let raw = self.lx.raw_until_end()?;
        self.expect("}")?;
        match raw.first() {
            Some((m, _)) if *m == TERM_MARKER => {}
            Some((m, pos)) => return self.err(*pos, RusErrorKind::Marker { expected: "`#`", found: m.to_string() }),
            None => return self.err(position, RusErrorKind::Grammar(GrammarError::EmptyPattern(name.into()))),
        }
        let body: Vec<Symbol> = raw[1..].iter().map(|(t, _)| Symbol::new(t)).collect();
        for (s, (_, pos)) in body.iter().zip(&raw[1..]) {
            if !vars.iter().any(|v| &v.name == s) && !self.constants.contains(s) {
                return self.err(*pos, RusErrorKind::UnknownSymbol(s.to_string()));
            }
        }
        let rule = self.add_rule(name, &typecode, &vars, &body, position)?;
        let term = Statement { role: Role::Term, typecode, marker: Marker::Syntactic, tree: rule.generic_tree() };
        self.push(RusItem::Rule(RuleItem { name: name.to_string(), vars, term, rule }), position)
    }

    fn add_rule(
        &mut self,
        name: &str,
        typecode: &Symbol,
        vars: &[TypedVar],
        body: &[Symbol],
        position: Position,
    ) -> Result<Arc<GrammarRule>> {
        if self.theory.contains_name(name) {
            return self.err(position, RusErrorKind::Duplicate(name.to_string()));
        }
        let pairs = vars.iter().map(|v| (v.name.clone(), v.typecode.clone())).collect();
        let rule = GrammarRule::from_body(name, typecode.clone(), pairs, body)
            .map_err(|e| RusError { position, kind: e.into() })?;
        for p in &rule.pattern {
            if let PatternItem::Constant(c) = p {
                self.notation.insert(c.clone());
            }
        }
        self.theory.grammar_mut().add_rule(rule).map_err(|e| RusError { position, kind: e.into() })
    }

    /// `NAME (vars) [disjoint(...)] { hyp.. [---] prop.. }`
    fn assertion_item(&mut self) -> Result<(RusAssertion, Position)> {
        let (name, position) = self.word("a name")?;
        let vars = self.var_list()?;
        let disjoint_groups = self.optional_disjoint(&vars)?;
        let vt: VarTypes = vars.iter().map(|v| (v.name.clone(), v.typecode.clone())).collect();
        self.expect("{")?;
        let mut hyps = Vec::new();
        let mut props = Vec::new();
        loop {
            let (tok, pos) = self.token("`hyp`, `prop` or `}`")?;
            match tok {
                "}" => break,
                "hyp" | "prop" => {
                    let k = self.number()?;
                    let (role, expected) = if tok == "hyp" {
                        if !props.is_empty() {
                            return self
                                .err(pos, RusErrorKind::Unexpected { expected: "`prop`".into(), found: "hyp".into() });
                        }
                        (Role::Hyp(k), hyps.len() + 1)
                    } else {
                        (Role::Prop(k), props.len() + 1)
                    };
                    if k != expected {
                        return self.err(pos, RusErrorKind::BadIndex { role: role.to_string(), expected });
                    }
                    let st = self.statement(role, &vt, MarkerRule::Judgement)?;
                    if tok == "hyp" {
                        hyps.push(st);
                    } else {
                        props.push(st);
                    }
                }
                t if is_divider(t) => {}
                other => {
                    return self.err(
                        pos,
                        RusErrorKind::Unexpected { expected: "`hyp`, `prop` or `}`".into(), found: other.into() },
                    )
                }
            }
        }
        if props.len() != 1 {
            return self.err(position, RusErrorKind::PropCount { name: name.to_string(), count: props.len() });
        }
        Ok((RusAssertion { name: name.to_string(), vars, disjoint_groups, hyps, props }, position))
    }

    fn definition(&mut self) -> Result<()> {
        let (name, position) = self.word("a definition name")?;
        let vars = self.var_list()?;
        let disjoint_groups = self.optional_disjoint(&vars)?;
        let vt: VarTypes = vars.iter().map(|v| (v.name.clone(), v.typecode.clone())).collect();
        self.expect("{")?;

        self.expect("defiendum")?;
        self.expect(":")?;
        let dtype = self.type_name()?;
        self.expect("=")?;
        let raw = self.lx.raw_until_end()?;
        let mut implicit_rule = None;
        let defiendum = match self.build_statement(Role::Defiendum, dtype.clone(), raw.clone(), &vt, MarkerRule::Term) {
            Ok(s) => s,
            Err(RusError { kind: RusErrorKind::Parse(ParseError::NoParse { .. }), position: pos })
                if raw.iter().skip(1).any(|(t, _)| {
                    let s = Symbol::new(t);
                    self.constants.contains(&s) && !self.notation.contains(&s)
                }) =>
            {
                // new notation: the definition introduces its own rule
                let body: Vec<Symbol> = raw[1..].iter().map(|(t, _)| Symbol::new(t)).collect();
                let used: Vec<TypedVar> = vars.iter().filter(|v| body.contains(&v.name)).cloned().collect();
                let rule = self.add_rule(&format!("syn-{name}"), &dtype, &used, &body, pos)?;
                implicit_rule = Some(rule.clone());
                Statement {
                    role: Role::Defiendum,
                    typecode: dtype,
                    marker: Marker::Syntactic,
                    tree: rule.generic_tree(),
                }
            }
            Err(e) => return Err(e),
        };

        self.expect("definiens")?;
        let definiens = self.statement(Role::Definiens, &vt, MarkerRule::Term)?;
        let (tok, pos) = self.token("a divider")?;
        if !is_divider(tok) {
            return self.err(pos, RusErrorKind::Unexpected { expected: "a divider `---`".into(), found: tok.into() });
        }
        self.expect("prop")?;
        self.expect(":")?;
        let ptype = self.type_name()?;
        self.expect("=")?;
        let raw = self.lx.raw_until_end()?;
        let lin_d = defiendum.tree.linearize();
        let lin_e = definiens.tree.linearize();
        let mut expanded: Vec<(String, Position)> = Vec::new();
        for (i, (t, p)) in raw.iter().enumerate() {
            let placeholder = i > 0 && !vt.contains(&Symbol::new(t));
            match *t {
                "defiendum" if placeholder => expanded.extend(lin_d.iter().map(|s| (s.to_string(), *p))),
                "definiens" if placeholder => expanded.extend(lin_e.iter().map(|s| (s.to_string(), *p))),
                _ => expanded.push((t.to_string(), *p)),
            }
        }
        let expanded_ref: Vec<(&str, Position)> = expanded.iter().map(|(s, p)| (s.as_str(), *p)).collect();
        let prop = self.build_statement(Role::DefinitionProp, ptype, expanded_ref, &vt, MarkerRule::Judgement)?;
        self.expect("}")?;
        let d = Definition { name: name.to_string(), vars, disjoint_groups, defiendum, definiens, prop, implicit_rule };
        self.push(RusItem::Definition(d), position)
    }

    fn proof(&mut self) -> Result<()> {
        let (name, position) = self.word("a theorem name")?;
        let Some(idx) = self.theory.index_of(name) else {
            return self.err(position, RusErrorKind::Undeclared { what: "theorem", name: name.into() });
        };
        let assertion = match self.theory.item(idx) {
            RusItem::Theorem(t) if t.proof.is_some() => {
                return self.err(position, RusErrorKind::DuplicateProof(name.into()));
            }
            RusItem::Theorem(t) => t.assertion.clone(),
            _ => return self.err(position, RusErrorKind::NotATheorem(name.into())),
        };
        self.expect("{")?;
        let mut proof = DeclarativeProof::default();
        let mut scope = assertion.vars.clone();
        let mut vt = assertion.var_types();
        let mut seen = HashSet::new();
        loop {
            let (tok, pos) = self.token("`step`, `qed` or `}`")?;
            match tok {
                "}" => break,
                "var" => {
                    let (v, vpos) = self.word("a variable name")?;
                    self.expect(":")?;
                    let typecode = self.type_name()?;
                    self.expect(";;")?;
                    let v = Symbol::new(v);
                    if scope.iter().any(|w| w.name == v) {
                        return self.err(vpos, RusErrorKind::DuplicateVariable(v.to_string()));
                    }
                    if self.constants.contains(&v) || self.types.contains(&v) {
                        return self.err(vpos, RusErrorKind::ConstantAsVariable(v.to_string()));
                    }
                    vt.insert(v.clone(), typecode.clone());
                    let tv = TypedVar { name: v, typecode };
                    scope.push(tv.clone());
                    proof.dummies.push(tv);
                }
                "disjoint" => {
                    let groups = self.disjoint_groups(&scope)?;
                    self.expect(";;")?;
                    proof.disjoint_groups.extend(groups);
                }
                "step" => {
                    let k = self.number()?;
                    if !seen.insert(k) {
                        return self.err(pos, RusErrorKind::DuplicateStep(k));
                    }
                    self.expect(":")?;
                    let typecode = self.type_name()?;
                    self.expect("=")?;
                    let (kw, kpos) = self.token("`axm`, `thm` or `def`")?;
                    let kind = match kw {
                        "axm" => RefKind::Axm,
                        "thm" => RefKind::Thm,
                        "def" => RefKind::Def,
                        other => {
                            return self.err(
                                kpos,
                                RusErrorKind::Unexpected {
                                    expected: "`axm`, `thm` or `def`".into(),
                                    found: other.into(),
                                },
                            )
                        }
                    };
                    let (cited, cpos) = self.word("an assertion name")?;
                    if !self.theory.contains_name(cited) {
                        return self.err(cpos, RusErrorKind::Undeclared { what: "assertion", name: cited.into() });
                    }
                    let premises = self.refs()?;
                    let raw = self.lx.raw_until_end()?;
                    let stmt = self.build_statement(Role::Step(k), typecode, raw, &vt, MarkerRule::Any)?;
                    proof.steps.push(ProofStep { index: k, kind, name: cited.to_string(), premises, stmt });
                }
                "qed" => {
                    self.expect("prop")?;
                    let k = self.number()?;
                    self.expect("=")?;
                    let r = self.one_ref()?;
                    self.expect(";")?;
                    proof.qed.push((k, r));
                }
                other => {
                    return self.err(
                        pos,
                        RusErrorKind::Unexpected {
                            expected: "`step`, `qed`, `var`, `disjoint` or `}`".into(),
                            found: other.into(),
                        },
                    )
                }
            }
        }
        if let RusItem::Theorem(t) = self.theory.item_mut(idx) {
            t.proof = Some(proof);
        }
        Ok(())
    }

    fn one_ref(&mut self) -> Result<Ref> {
        let (tok, pos) = self.token("`hyp` or `step`")?;
        let k = self.number()?;
        match tok {
            "hyp" => Ok(Ref::Hyp(k)),
            "step" => Ok(Ref::Step(k)),
            other => {
                self.err(pos, RusErrorKind::Unexpected { expected: "`hyp` or `step`".into(), found: other.into() })
            }
        }
    }

    fn refs(&mut self) -> Result<Vec<Ref>> {
        self.expect("(")?;
        let mut out = Vec::new();
        if self.lx.peek()? == Some(")") {
            self.lx.next()?;
            return Ok(out);
        }
        loop {
            out.push(self.one_ref()?);
            let (tok, pos) = self.token("`,` or `)`")?;
            match tok {
                "," => {}
                ")" => return Ok(out),
                other => {
                    return self
                        .err(pos, RusErrorKind::Unexpected { expected: "`,` or `)`".into(), found: other.into() })
                }
            }
        }
    }
}
