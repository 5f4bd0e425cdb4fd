//! The scoped Metamath database and the builder that maintains scope state
//! while statements are added in source order.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::symbol::{DisjointPairs, Expression, Symbol, SymbolKind};

pub type HypId = usize;
pub type AssertionId = usize;

/// 1-based line and column (in characters).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HypKind {
    Floating,
    Essential,
}

/// A `$f` or `$e` statement. For a floating hypothesis `expr` is the typecode
/// followed by exactly one variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypothesis {
    pub label: String,
    pub kind: HypKind,
    pub expr: Expression,
}

impl Hypothesis {
    pub fn floating(label: &str, typecode: Symbol, var: Symbol) -> Hypothesis {
        Hypothesis { label: label.to_string(), kind: HypKind::Floating, expr: Expression::new(typecode, vec![var]) }
    }

    pub fn essential(label: &str, expr: Expression) -> Hypothesis {
        Hypothesis { label: label.to_string(), kind: HypKind::Essential, expr }
    }

    pub fn is_floating(&self) -> bool {
        self.kind == HypKind::Floating
    }

    /// The declared variable of a floating hypothesis.
    pub fn variable(&self) -> Option<&Symbol> {
        match self.kind {
            HypKind::Floating => self.expr.body.first(),
            HypKind::Essential => None,
        }
    }
}

/// The mandatory hypotheses, disjointness conditions and conclusion of an
/// assertion. `hyps` is in declaration order; for every database built from
/// ordinary sources that means all floatings precede all essentials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub hyps: Vec<Hypothesis>,
    pub disjoint: DisjointPairs,
    pub conclusion: Expression,
}

impl Frame {
    pub fn floatings(&self) -> impl Iterator<Item = &Hypothesis> {
        self.hyps.iter().filter(|h| h.is_floating())
    }

    pub fn essentials(&self) -> impl Iterator<Item = &Hypothesis> {
        self.hyps.iter().filter(|h| !h.is_floating())
    }

    /// Variables with a mandatory floating hypothesis, in frame order.
    pub fn variables(&self) -> Vec<Symbol> {
        self.floatings().filter_map(|h| h.variable().cloned()).collect()
    }

    pub fn typecode_of(&self, var: &Symbol) -> Option<&Symbol> {
        self.floatings().find(|h| h.variable() == Some(var)).map(|h| &h.expr.typecode)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AssertionKind {
    Axiom,
    Provable,
}

/// A label reference inside a proof, resolved against the scope of the
/// assertion being proved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofLabel {
    Hyp(HypId),
    Assertion(AssertionId),
    /// `?` placeholder for a missing step.
    Incomplete,
    /// A label that is undeclared, out of scope, or not yet declared.
    Unresolved {
        label: String,
        reason: &'static str,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Proof {
    Normal(Vec<ProofLabel>),
    /// `( labels ) LETTERS`; the letters are kept undecoded until replay.
    Compressed {
        labels: Vec<ProofLabel>,
        letters: String,
    },
}

impl Proof {
    pub fn is_compressed(&self) -> bool {
        matches!(self, Proof::Compressed { .. })
    }
}

#[derive(Clone, Debug)]
pub struct Assertion {
    pub label: String,
    pub kind: AssertionKind,
    pub frame: Frame,
    pub proof: Option<Proof>,
    /// Every `$d` pair active where the assertion was declared, dummies included.
    pub ambient_disjoint: Arc<DisjointPairs>,
    pub position: Position,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Comment { text: String, position: Position },
    Constants(Vec<Symbol>),
    Variables(Vec<Symbol>),
    Hypothesis(HypId),
    Disjoint(Vec<Symbol>),
    Assertion(AssertionId),
    OpenScope,
    CloseScope,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelRef {
    Hyp(HypId),
    Assertion(AssertionId),
}

/// A parsed Metamath database. Immutable after construction and safe to share
/// between threads.
#[derive(Clone, Debug, Default)]
pub struct Database {
    items: Vec<Item>,
    hyps: Vec<Hypothesis>,
    assertions: Vec<Assertion>,
    labels: HashMap<String, LabelRef>,
    symbols: HashMap<Symbol, SymbolKind>,
    floating_typecodes: Vec<Symbol>,
}

impl Database {
    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn hyp(&self, id: HypId) -> &Hypothesis {
        &self.hyps[id]
    }

    pub fn hypotheses(&self) -> &[Hypothesis] {
        &self.hyps
    }

    pub fn assertion(&self, id: AssertionId) -> &Assertion {
        &self.assertions[id]
    }

    pub fn assertions(&self) -> &[Assertion] {
        &self.assertions
    }

    pub fn lookup(&self, label: &str) -> Option<LabelRef> {
        self.labels.get(label).copied()
    }

    pub fn assertion_id(&self, label: &str) -> Option<AssertionId> {
        match self.lookup(label)? {
            LabelRef::Assertion(id) => Some(id),
            LabelRef::Hyp(_) => None,
        }
    }

    pub fn assertion_by_label(&self, label: &str) -> Option<&Assertion> {
        self.assertion_id(label).map(|id| &self.assertions[id])
    }

    /// The frame of an assertion; computed when the assertion was declared.
    pub fn frame(&self, id: AssertionId) -> &Frame {
        &self.assertions[id].frame
    }

    pub fn symbol_kind(&self, s: &Symbol) -> Option<SymbolKind> {
        self.symbols.get(s).copied()
    }

    pub fn is_variable(&self, s: &Symbol) -> bool {
        self.symbols.get(s) == Some(&SymbolKind::Variable)
    }

    pub fn constants(&self) -> impl Iterator<Item = &Symbol> {
        self.items.iter().flat_map(|it| match it {
            Item::Constants(cs) => cs.as_slice(),
            _ => &[],
        })
    }

    /// Distinct variable tokens, in order of first declaration.
    pub fn variables(&self) -> Vec<Symbol> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for it in &self.items {
            if let Item::Variables(vs) = it {
                for v in vs {
                    if seen.insert(v.clone()) {
                        out.push(v.clone());
                    }
                }
            }
        }
        out
    }

    /// Typecodes used by at least one `$f`, in order of first use. These are
    /// the syntactic typecodes of the database.
    pub fn floating_typecodes(&self) -> &[Symbol] {
        &self.floating_typecodes
    }

    pub fn is_syntactic_typecode(&self, tc: &Symbol) -> bool {
        self.floating_typecodes.contains(tc)
    }
}

/// Errors raised while adding statements; the parser attaches positions.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("undeclared math symbol `{0}`")]
    UndeclaredSymbol(Symbol),
    #[error("variable `{0}` is not active in this scope")]
    InactiveVariable(Symbol),
    #[error("variable `{0}` has no active floating hypothesis")]
    VariableWithoutFloating(Symbol),
    #[error("`{0}` is not a declared constant")]
    NotAConstant(Symbol),
    #[error("`{0}` is not an active variable")]
    NotAVariable(Symbol),
    #[error("symbol `{0}` is already declared")]
    Redeclared(Symbol),
    #[error("constants must be declared in the outermost scope")]
    ConstantInInnerScope,
    #[error("variable `{0}` already has an active floating hypothesis")]
    DuplicateFloating(Symbol),
    #[error("`$}}` without matching `${{`")]
    ScopeUnderflow,
    #[error("{0} scope(s) left open at end of input")]
    UnclosedScope(usize),
    #[error("disjoint variable `{0}` listed twice in one `$d`")]
    RepeatedDisjointVariable(Symbol),
    #[error("statement needs a typecode")]
    MissingTypecode,
}

#[derive(Default)]
struct Scope {
    vars: Vec<Symbol>,
    hyps: usize,
    floats: Vec<Symbol>,
    disjoint_added: Vec<(Symbol, Symbol)>,
}

/// Maintains the active scope while statements arrive in source order.
///
/// The text parser drives this, and so does any code that assembles a
/// database programmatically (the translators do).
pub struct DatabaseBuilder {
    db: Database,
    scopes: Vec<Scope>,
    active_vars: HashSet<Symbol>,
    active_hyps: Vec<HypId>,
    active_floats: HashMap<Symbol, HypId>,
    active_disjoint: DisjointPairs,
    ambient_cache: Option<Arc<DisjointPairs>>,
}

impl Default for DatabaseBuilder {
    fn default() -> Self {
        DatabaseBuilder::new()
    }
}

impl DatabaseBuilder {
    pub fn new() -> DatabaseBuilder {
        DatabaseBuilder {
            db: Database::default(),
            scopes: vec![Scope::default()],
            active_vars: HashSet::new(),
            active_hyps: Vec::new(),
            active_floats: HashMap::new(),
            active_disjoint: DisjointPairs::new(),
            ambient_cache: None,
        }
    }

    pub fn depth(&self) -> usize {
        self.scopes.len() - 1
    }

    pub fn comment(&mut self, text: &str, position: Position) {
        self.db.items.push(Item::Comment { text: text.to_string(), position });
    }

    pub fn constants(&mut self, syms: &[Symbol]) -> Result<(), BuildError> {
        if self.depth() > 0 {
            return Err(BuildError::ConstantInInnerScope);
        }
        for s in syms {
            if self.db.symbols.contains_key(s) {
                return Err(BuildError::Redeclared(s.clone()));
            }
            self.db.symbols.insert(s.clone(), SymbolKind::Constant);
        }
        self.db.items.push(Item::Constants(syms.to_vec()));
        Ok(())
    }

    pub fn variables(&mut self, syms: &[Symbol]) -> Result<(), BuildError> {
        for s in syms {
            match self.db.symbols.get(s) {
                Some(SymbolKind::Constant) => return Err(BuildError::Redeclared(s.clone())),
                Some(SymbolKind::Variable) if self.active_vars.contains(s) => {
                    return Err(BuildError::Redeclared(s.clone()))
                }
                _ => {}
            }
            self.db.symbols.insert(s.clone(), SymbolKind::Variable);
            self.active_vars.insert(s.clone());
            self.scopes.last_mut().unwrap().vars.push(s.clone());
        }
        self.db.items.push(Item::Variables(syms.to_vec()));
        Ok(())
    }

    fn claim_label(&mut self, label: &str, r: LabelRef) -> Result<(), BuildError> {
        if self.db.labels.contains_key(label) {
            return Err(BuildError::DuplicateLabel(label.to_string()));
        }
        self.db.labels.insert(label.to_string(), r);
        Ok(())
    }

    fn check_constant(&self, s: &Symbol) -> Result<(), BuildError> {
        match self.db.symbols.get(s) {
            Some(SymbolKind::Constant) => Ok(()),
            Some(SymbolKind::Variable) => Err(BuildError::NotAConstant(s.clone())),
            None => Err(BuildError::UndeclaredSymbol(s.clone())),
        }
    }

    fn check_expression(&self, e: &Expression) -> Result<(), BuildError> {
        self.check_constant(&e.typecode)?;
        for s in &e.body {
            match self.db.symbols.get(s) {
                Some(SymbolKind::Constant) => {}
                Some(SymbolKind::Variable) => {
                    if !self.active_vars.contains(s) {
                        return Err(BuildError::InactiveVariable(s.clone()));
                    }
                    if !self.active_floats.contains_key(s) {
                        return Err(BuildError::VariableWithoutFloating(s.clone()));
                    }
                }
                None => return Err(BuildError::UndeclaredSymbol(s.clone())),
            }
        }
        Ok(())
    }

    pub fn floating(&mut self, label: &str, typecode: Symbol, var: Symbol) -> Result<HypId, BuildError> {
        self.check_constant(&typecode)?;
        match self.db.symbols.get(&var) {
            Some(SymbolKind::Variable) if self.active_vars.contains(&var) => {}
            Some(SymbolKind::Variable) => return Err(BuildError::InactiveVariable(var)),
            Some(SymbolKind::Constant) => return Err(BuildError::NotAVariable(var)),
            None => return Err(BuildError::UndeclaredSymbol(var)),
        }
        if self.active_floats.contains_key(&var) {
            return Err(BuildError::DuplicateFloating(var));
        }
        let id = self.db.hyps.len();
        self.claim_label(label, LabelRef::Hyp(id))?;
        if !self.db.floating_typecodes.contains(&typecode) {
            self.db.floating_typecodes.push(typecode.clone());
        }
        self.db.hyps.push(Hypothesis::floating(label, typecode, var.clone()));
        self.active_floats.insert(var.clone(), id);
        self.active_hyps.push(id);
        let scope = self.scopes.last_mut().unwrap();
        scope.hyps += 1;
        scope.floats.push(var);
        self.db.items.push(Item::Hypothesis(id));
        Ok(id)
    }

    pub fn essential(&mut self, label: &str, expr: Expression) -> Result<HypId, BuildError> {
        self.check_expression(&expr)?;
        let id = self.db.hyps.len();
        self.claim_label(label, LabelRef::Hyp(id))?;
        self.db.hyps.push(Hypothesis::essential(label, expr));
        self.active_hyps.push(id);
        self.scopes.last_mut().unwrap().hyps += 1;
        self.db.items.push(Item::Hypothesis(id));
        Ok(id)
    }

    pub fn disjoint(&mut self, vars: &[Symbol]) -> Result<(), BuildError> {
        for (i, v) in vars.iter().enumerate() {
            match self.db.symbols.get(v) {
                Some(SymbolKind::Variable) if self.active_vars.contains(v) => {}
                Some(SymbolKind::Variable) => return Err(BuildError::InactiveVariable(v.clone())),
                Some(SymbolKind::Constant) => return Err(BuildError::NotAVariable(v.clone())),
                None => return Err(BuildError::UndeclaredSymbol(v.clone())),
            }
            if vars[..i].contains(v) {
                return Err(BuildError::RepeatedDisjointVariable(v.clone()));
            }
        }
        for (i, a) in vars.iter().enumerate() {
            for b in &vars[i + 1..] {
                if self.active_disjoint.insert(a, b) {
                    self.scopes.last_mut().unwrap().disjoint_added.push((a.clone(), b.clone()));
                    self.ambient_cache = None;
                }
            }
        }
        self.db.items.push(Item::Disjoint(vars.to_vec()));
        Ok(())
    }

    pub fn open_scope(&mut self) {
        self.scopes.push(Scope::default());
        self.db.items.push(Item::OpenScope);
    }

    pub fn close_scope(&mut self) -> Result<(), BuildError> {
        if self.scopes.len() == 1 {
            return Err(BuildError::ScopeUnderflow);
        }
        let scope = self.scopes.pop().unwrap();
        for v in &scope.vars {
            self.active_vars.remove(v);
        }
        for v in &scope.floats {
            self.active_floats.remove(v);
        }
        self.active_hyps.truncate(self.active_hyps.len() - scope.hyps);
        if !scope.disjoint_added.is_empty() {
            let removed: HashSet<_> = scope.disjoint_added.into_iter().collect();
            let kept = self
                .active_disjoint
                .iter()
                .filter(|p| !removed.contains(p) && !removed.contains(&(p.1.clone(), p.0.clone())))
                .cloned()
                .collect();
            self.active_disjoint = kept;
            self.ambient_cache = None;
        }
        self.db.items.push(Item::CloseScope);
        Ok(())
    }

    /// Computes the frame an assertion with this conclusion gets in the
    /// current scope: all active essentials, the floatings of the mandatory
    /// variables, and the `$d` pairs among mandatory variables.
    pub fn build_frame(&self, conclusion: &Expression) -> Result<Frame, BuildError> {
        self.check_expression(conclusion)?;
        let mut mandatory: HashSet<Symbol> = HashSet::new();
        let mut collect = |e: &Expression| {
            for s in &e.body {
                if self.active_floats.contains_key(s) {
                    mandatory.insert(s.clone());
                }
            }
        };
        for &h in &self.active_hyps {
            let hyp = &self.db.hyps[h];
            if hyp.kind == HypKind::Essential {
                collect(&hyp.expr);
            }
        }
        collect(conclusion);
        let mut hyps = Vec::new();
        for &h in &self.active_hyps {
            let hyp = &self.db.hyps[h];
            let keep = match hyp.kind {
                HypKind::Essential => true,
                HypKind::Floating => mandatory.contains(&hyp.expr.body[0]),
            };
            if keep {
                hyps.push(hyp.clone());
            }
        }
        let disjoint = self.active_disjoint.restrict(|v| mandatory.contains(v));
        Ok(Frame { hyps, disjoint, conclusion: conclusion.clone() })
    }

    fn ambient(&mut self) -> Arc<DisjointPairs> {
        self.ambient_cache.get_or_insert_with(|| Arc::new(self.active_disjoint.clone())).clone()
    }

    pub fn axiom(
        &mut self,
        label: &str,
        conclusion: Expression,
        position: Position,
    ) -> Result<AssertionId, BuildError> {
        self.assertion(label, AssertionKind::Axiom, conclusion, None, position)
    }

    pub fn provable(
        &mut self,
        label: &str,
        conclusion: Expression,
        proof: Proof,
        position: Position,
    ) -> Result<AssertionId, BuildError> {
        self.assertion(label, AssertionKind::Provable, conclusion, Some(proof), position)
    }

    fn assertion(
        &mut self,
        label: &str,
        kind: AssertionKind,
        conclusion: Expression,
        proof: Option<Proof>,
        position: Position,
    ) -> Result<AssertionId, BuildError> {
        let frame = self.build_frame(&conclusion)?;
        let id = self.db.assertions.len();
        self.claim_label(label, LabelRef::Assertion(id))?;
        let ambient_disjoint = self.ambient();
        self.db.assertions.push(Assertion { label: label.to_string(), kind, frame, proof, ambient_disjoint, position });
        self.db.items.push(Item::Assertion(id));
        Ok(id)
    }

    /// Resolves a proof label in the current scope. Must be called before the
    /// assertion being proved is added.
    pub fn resolve_proof_label(&self, label: &str) -> ProofLabel {
        if label == "?" {
            return ProofLabel::Incomplete;
        }
        match self.db.labels.get(label) {
            Some(LabelRef::Assertion(id)) => ProofLabel::Assertion(*id),
            Some(LabelRef::Hyp(id)) => {
                if self.active_hyps.contains(id) {
                    ProofLabel::Hyp(*id)
                } else {
                    ProofLabel::Unresolved { label: label.to_string(), reason: "hypothesis not active in this scope" }
                }
            }
            None => ProofLabel::Unresolved { label: label.to_string(), reason: "undeclared label" },
        }
    }

    pub fn finish(self) -> Result<Database, BuildError> {
        if self.scopes.len() > 1 {
            return Err(BuildError::UnclosedScope(self.scopes.len() - 1));
        }
        Ok(self.db)
    }
}
