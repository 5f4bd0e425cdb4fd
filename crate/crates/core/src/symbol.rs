//! Symbols, expressions, substitutions and disjoint-variable conditions.
//!
//! These are shared by every layer of the kernel: the Metamath verifier works
//! on flat [`Expression`]s, the grammar engine lifts them into syntax trees,
//! and the translators move between the two.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

/// An opaque math token. Tokens are compared byte-for-byte; no normalization
/// is ever applied (`->` and `→` are different symbols).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(text: &str) -> Symbol {
        Symbol(Arc::from(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Deref for Symbol {
    type Target = str;
    fn deref(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Symbol {
        Symbol::new(s)
    }
}

impl From<String> for Symbol {
    fn from(s: String) -> Symbol {
        Symbol(Arc::from(s))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}`", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    Constant,
    Variable,
}

/// Joins symbols with single spaces.
pub fn join(symbols: &[Symbol]) -> String {
    let mut out = String::new();
    for (i, s) in symbols.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(s);
    }
    out
}

/// Splits whitespace-separated text into symbols. Mostly a test convenience.
pub fn symbols(text: &str) -> Vec<Symbol> {
    text.split_ascii_whitespace().map(Symbol::new).collect()
}

/// A typecode followed by a sequence of symbols, e.g. `|- ( ph -> ps )`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Expression {
    pub typecode: Symbol,
    pub body: Vec<Symbol>,
}

impl Expression {
    pub fn new(typecode: Symbol, body: Vec<Symbol>) -> Expression {
        Expression { typecode, body }
    }

    /// Parses `"tc s1 s2 ..."`; the first token is the typecode.
    pub fn parse(text: &str) -> Expression {
        let mut toks = symbols(text);
        assert!(!toks.is_empty(), "expression needs a typecode");
        let typecode = toks.remove(0);
        Expression { typecode, body: toks }
    }

    /// Variables of the body in first-occurrence order, without repeats.
    pub fn variables(&self, is_var: impl Fn(&Symbol) -> bool) -> Vec<Symbol> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for s in &self.body {
            if is_var(s) && seen.insert(s.clone()) {
                out.push(s.clone());
            }
        }
        out
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.typecode)?;
        for s in &self.body {
            write!(f, " {s}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self}`")
    }
}

/// Association from variables to the expressions replacing them.
///
/// Each binding keeps the typecode of the expression it was read from so that
/// the typecode invariant can be checked where bindings are made; application
/// only uses the bodies.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    bindings: BTreeMap<Symbol, Expression>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    /// Binds `var`. Returns the previous binding if there was one.
    pub fn bind(&mut self, var: Symbol, value: Expression) -> Option<Expression> {
        self.bindings.insert(var, value)
    }

    pub fn get(&self, var: &Symbol) -> Option<&Expression> {
        self.bindings.get(var)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &Expression)> {
        self.bindings.iter()
    }

    /// `(self ∘ then)(v) = apply(self(v), then)`, with `then`'s own bindings
    /// kept for variables outside the domain of `self`.
    pub fn compose(&self, then: &Substitution) -> Substitution {
        let mut out = then.clone();
        for (v, e) in &self.bindings {
            out.bindings.insert(v.clone(), apply_substitution(e, then));
        }
        out
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, e)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} ↦ {}", join(&e.body))?;
        }
        f.write_str("}")
    }
}

/// Replaces every bound variable of `e` by its binding's body. Unbound symbols
/// (constants included) are copied unchanged and the typecode is preserved.
pub fn apply_substitution(e: &Expression, s: &Substitution) -> Expression {
    let mut body = Vec::with_capacity(e.body.len());
    for sym in &e.body {
        match s.bindings.get(sym) {
            Some(b) => body.extend(b.body.iter().cloned()),
            None => body.push(sym.clone()),
        }
    }
    Expression { typecode: e.typecode.clone(), body }
}

/// A set of unordered pairs of distinct variables.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DisjointPairs(BTreeSet<(Symbol, Symbol)>);

impl DisjointPairs {
    pub fn new() -> DisjointPairs {
        DisjointPairs::default()
    }

    fn key(a: &Symbol, b: &Symbol) -> (Symbol, Symbol) {
        if a <= b {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        }
    }

    /// Inserts the pair; pairs of a variable with itself are ignored.
    pub fn insert(&mut self, a: &Symbol, b: &Symbol) -> bool {
        if a == b {
            return false;
        }
        self.0.insert(Self::key(a, b))
    }

    /// Inserts every pair from a `$d`-style group.
    pub fn insert_group(&mut self, vars: &[Symbol]) {
        for (i, a) in vars.iter().enumerate() {
            for b in &vars[i + 1..] {
                self.insert(a, b);
            }
        }
    }

    pub fn contains(&self, a: &Symbol, b: &Symbol) -> bool {
        a != b && self.0.contains(&Self::key(a, b))
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Symbol, Symbol)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Pairs whose both members satisfy `keep`.
    pub fn restrict(&self, keep: impl Fn(&Symbol) -> bool) -> DisjointPairs {
        DisjointPairs(self.0.iter().filter(|(a, b)| keep(a) && keep(b)).cloned().collect())
    }

    pub fn extend(&mut self, other: &DisjointPairs) {
        self.0.extend(other.0.iter().cloned());
    }
}

impl fmt::Debug for DisjointPairs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter().map(|(a, b)| format!("{a} {b}"))).finish()
    }
}

impl FromIterator<(Symbol, Symbol)> for DisjointPairs {
    fn from_iter<I: IntoIterator<Item = (Symbol, Symbol)>>(iter: I) -> Self {
        let mut out = DisjointPairs::new();
        for (a, b) in iter {
            out.insert(&a, &b);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DisjointViolation {
    #[error("disjoint variables {first} and {second} share variable {shared}")]
    SharedVariable { first: Symbol, second: Symbol, shared: Symbol },
    #[error("disjoint variables {first} and {second} require missing `$d {left} {right}`")]
    MissingPair { first: Symbol, second: Symbol, left: Symbol, right: Symbol },
}

/// Checks the `required` conditions of an applied frame under `s` against the
/// conditions `available` in the ambient frame.
pub fn check_disjoint(
    s: &Substitution,
    required: &DisjointPairs,
    available: &DisjointPairs,
    is_var: impl Fn(&Symbol) -> bool,
) -> Result<(), DisjointViolation> {
    let vars_of = |v: &Symbol| -> Vec<Symbol> {
        match s.get(v) {
            Some(e) => e.variables(&is_var),
            None => vec![v.clone()],
        }
    };
    for (x, y) in required.iter() {
        let xs = vars_of(x);
        let ys = vars_of(y);
        for a in &xs {
            for b in &ys {
                if a == b {
                    return Err(DisjointViolation::SharedVariable {
                        first: x.clone(),
                        second: y.clone(),
                        shared: a.clone(),
                    });
                }
                if !available.contains(a, b) {
                    let (left, right) = DisjointPairs::key(a, b);
                    return Err(DisjointViolation::MissingPair { first: x.clone(), second: y.clone(), left, right });
                }
            }
        }
    }
    Ok(())
}
