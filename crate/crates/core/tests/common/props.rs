//! Randomized properties, shared by the property tests and the acceptance
//! run. Every suite runs `CASES` cases from the fixed seed `SEED`.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Debug;

use proptest::collection::vec;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestCaseError, TestRunner};

use mmrus_core::grammar::{
    extract_grammar, match_pattern, substitute_tree, Grammar, GrammarOptions, SyntaxTree, TreeSubstitution, VarTypes,
};
use mmrus_core::mm::parse_mm_source;
use mmrus_core::rus::{parse_rus_source, verify_theory, RusItem, Theory, TheoryOptions};
use mmrus_core::translate::{check_smm, rus_to_smm, smm_to_rus, TranslateOptions};
use mmrus_core::{apply_substitution, Expression, Substitution, Symbol};

pub const SEED: u64 = 20_240_917;
pub const CASES: u32 = 1000;

fn check<S>(strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S: Strategy,
    S::Value: Debug,
{
    let config =
        Config { cases: CASES, rng_seed: RngSeed::Fixed(SEED), failure_persistence: None, ..Config::default() };
    TestRunner::new(config).run(&strategy, test).map_err(|e| e.to_string())
}

/// Five rules over one typecode.
const PROP_MM: &str = "$c wff ( ) -> -. <-> \\/ /\\ $. $v ph ps ch th $.
    wph $f wff ph $. wps $f wff ps $. wch $f wff ch $. wth $f wff th $.
    wn $a wff -. ph $. wi $a wff ( ph -> ps ) $. wb $a wff ( ph <-> ps ) $.
    wo $a wff ( ph \\/ ps ) $. wa $a wff ( ph /\\ ps ) $.";

/// Three typecodes, a unit rule `cv` and binders.
const SET_MM: &str = "$c wff setvar class ( ) -> -. e. A. { | } $. $v ph ps x y A B $.
    wph $f wff ph $. wps $f wff ps $. vx $f setvar x $. vy $f setvar y $. cA $f class A $. cB $f class B $.
    wn $a wff -. ph $. wi $a wff ( ph -> ps ) $. wal $a wff A. x ph $.
    cv $a class x $. wcel $a wff A e. B $. cab $a class { x | ph } $.";

struct TestGrammar {
    grammar: Grammar,
    vars: Vec<(Symbol, Symbol)>,
}

impl TestGrammar {
    fn new(src: &str) -> TestGrammar {
        let db = parse_mm_source(src).unwrap();
        let grammar = extract_grammar(&db, &GrammarOptions::default()).unwrap();
        let vars = db
            .hypotheses()
            .iter()
            .filter(|h| h.is_floating())
            .map(|h| (h.expr.body[0].clone(), h.expr.typecode.clone()))
            .collect();
        TestGrammar { grammar, vars }
    }

    fn var_types(&self) -> VarTypes {
        self.vars.iter().cloned().collect()
    }

    /// A tree of typecode `tc` and depth at most `depth`, steered by
    /// `choices`; leaves use the first `nvars` variables of each typecode.
    fn build(&self, tc: &Symbol, depth: usize, nvars: usize, choices: &mut impl Iterator<Item = u32>) -> SyntaxTree {
        let leaves: Vec<&(Symbol, Symbol)> = self.vars.iter().filter(|(_, t)| t == tc).take(nvars).collect();
        let rules: Vec<_> = self.grammar.rules().iter().filter(|r| &r.typecode == tc).collect();
        let options = if depth == 0 { leaves.len() } else { leaves.len() + rules.len() };
        let c = choices.next().unwrap_or(0) as usize % options;
        if c < leaves.len() {
            return SyntaxTree::leaf(leaves[c].0.clone(), tc.clone());
        }
        let rule = rules[c - leaves.len()];
        let children = rule.slot_typecodes().into_iter().map(|t| self.build(t, depth - 1, nvars, choices)).collect();
        SyntaxTree::node(rule.clone(), children)
    }
}

fn stream(choices: &[u32]) -> impl Iterator<Item = u32> + '_ {
    choices.iter().copied().chain(std::iter::repeat(0))
}

/// `parse(linearize(t)) == t` for random trees of two unambiguous grammars.
pub fn parse_linearize_inversion() -> Result<(), String> {
    let grammars = [TestGrammar::new(PROP_MM), TestGrammar::new(SET_MM)];
    check((0..2usize, 0..=4usize, vec(any::<u32>(), 0..64)), |(gi, depth, choices)| {
        let g = &grammars[gi];
        let typecodes = g.grammar.syntactic_typecodes();
        let tc = &typecodes[choices.first().copied().unwrap_or(0) as usize % typecodes.len()];
        let tree = g.build(tc, depth, 4, &mut stream(&choices).skip(1));
        let body = tree.linearize();
        let back = g.grammar.parse(tc, &body, &g.var_types()).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(back.linearize(), body);
        prop_assert!(back == tree, "parsed {} into a different tree", tree);
        Ok(())
    })
}

fn flat_symbol() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["(", ")", "->", "a", "x", "y", "z"])
}

fn flat_substitution() -> impl Strategy<Value = Vec<Option<Vec<&'static str>>>> {
    vec(prop::option::of(vec(flat_symbol(), 0..5)), 3)
}

fn to_substitution(bindings: &[Option<Vec<&str>>]) -> Substitution {
    let mut s = Substitution::new();
    for (v, b) in ["x", "y", "z"].iter().zip(bindings) {
        if let Some(body) = b {
            s.bind(Symbol::new(v), Expression::new(Symbol::new("t"), body.iter().map(|t| Symbol::new(t)).collect()));
        }
    }
    s
}

/// Applying `s` then `t` equals applying their composition, on flat
/// expressions and on trees; tree substitution agrees with the flat one.
pub fn substitution_composition() -> Result<(), String> {
    let g = TestGrammar::new(PROP_MM);
    let wff = Symbol::new("wff");
    let flat = (vec(flat_symbol(), 0..10), flat_substitution(), flat_substitution());
    let trees = (vec(any::<u32>(), 0..48), vec(prop::option::of(vec(any::<u32>(), 0..16)), 8));
    check((flat, trees), |((body, s, t), (shape, bindings))| {
        let e = Expression::new(Symbol::new("t"), body.iter().map(|x| Symbol::new(x)).collect());
        let (s, t) = (to_substitution(&s), to_substitution(&t));
        prop_assert_eq!(apply_substitution(&apply_substitution(&e, &s), &t), apply_substitution(&e, &s.compose(&t)));

        let tree = g.build(&wff, 3, 4, &mut stream(&shape));
        let mut subs = [TreeSubstitution::new(), TreeSubstitution::new()];
        for (k, b) in bindings.iter().enumerate() {
            if let Some(choices) = b {
                subs[k / 4].bind(g.vars[k % 4].0.clone(), g.build(&wff, 2, 4, &mut stream(choices)));
            }
        }
        let [s1, s2] = &subs;
        // s1 then s2, composed by hand
        let mut composed = TreeSubstitution::new();
        for (v, _) in &g.vars {
            let image = match s1.get(v) {
                Some(b) => Some(substitute_tree(b, s2)),
                None => s2.get(v).cloned(),
            };
            if let Some(t) = image {
                composed.bind(v.clone(), t);
            }
        }
        let stepwise = substitute_tree(&substitute_tree(&tree, s1), s2);
        prop_assert!(stepwise == substitute_tree(&tree, &composed));
        let flat_image = apply_substitution(&tree.to_expression(&wff), &s1.to_flat());
        prop_assert_eq!(substitute_tree(&tree, s1).linearize(), flat_image.body);
        Ok(())
    })
}

/// Every assignment of the pattern's variables to subtrees of the target.
fn brute_force_match(pattern: &SyntaxTree, target: &SyntaxTree) -> bool {
    let vars = pattern.typed_variables();
    let subtrees: Vec<&SyntaxTree> = {
        let mut seen = HashSet::new();
        target.subtrees().into_iter().filter(|t| seen.insert(*t)).collect()
    };
    let candidates: Vec<Vec<&SyntaxTree>> =
        vars.iter().map(|(_, tc)| subtrees.iter().copied().filter(|t| t.typecode() == tc).collect()).collect();
    if candidates.iter().any(|c| c.is_empty()) {
        return false;
    }
    let mut pick = vec![0; vars.len()];
    loop {
        let mut s = TreeSubstitution::new();
        for (k, (v, _)) in vars.iter().enumerate() {
            s.bind(v.clone(), candidates[k][pick[k]].clone());
        }
        if substitute_tree(pattern, &s) == *target {
            return true;
        }
        // next assignment, odometer style
        let mut k = 0;
        loop {
            if k == pick.len() {
                return false;
            }
            pick[k] += 1;
            if pick[k] < candidates[k].len() {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
    }
}

/// `match_pattern` succeeds exactly when some substitution makes the pattern
/// equal to the target, and its answer is such a substitution. Grammar of 5
/// rules, trees of depth at most 4.
pub fn match_soundness() -> Result<(), String> {
    let g = TestGrammar::new(PROP_MM);
    let wff = Symbol::new("wff");
    let shapes = (vec(any::<u32>(), 0..16), vec(any::<u32>(), 0..48), any::<bool>());
    check(shapes, |(pattern_shape, target_shape, instance)| {
        let pattern = g.build(&wff, 2, 3, &mut stream(&pattern_shape));
        let target = if instance {
            let mut choices = stream(&target_shape);
            let mut s = TreeSubstitution::new();
            for v in pattern.variables() {
                s.bind(v, g.build(&wff, 2, 4, &mut choices));
            }
            substitute_tree(&pattern, &s)
        } else {
            g.build(&wff, 4, 4, &mut stream(&target_shape))
        };
        let expected = brute_force_match(&pattern, &target);
        match match_pattern(&pattern, &target) {
            Ok(s) => {
                prop_assert!(expected, "matched {} against {} but no substitution exists", pattern, target);
                prop_assert!(substitute_tree(&pattern, &s) == target);
                let domain: BTreeSet<Symbol> = s.iter().map(|(v, _)| v.clone()).collect();
                prop_assert_eq!(domain, pattern.variables().into_iter().collect::<BTreeSet<_>>());
            }
            Err(_) => prop_assert!(!expected, "no match of {} against {}", pattern, target),
        }
        if instance {
            prop_assert!(expected);
        }
        Ok(())
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum F {
    V(usize),
    Not(Box<F>),
    Imp(Box<F>, Box<F>),
}

const NAMES: [&str; 4] = ["ph", "ps", "ch", "th"];

fn imp(a: &F, b: &F) -> F {
    F::Imp(Box::new(a.clone()), Box::new(b.clone()))
}

fn not(a: &F) -> F {
    F::Not(Box::new(a.clone()))
}

impl F {
    fn text(&self) -> String {
        match self {
            F::V(i) => NAMES[*i].to_string(),
            F::Not(a) => format!("-. {}", a.text()),
            F::Imp(a, b) => format!("( {} -> {} )", a.text(), b.text()),
        }
    }

    fn vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            F::V(i) => {
                out.insert(*i);
            }
            F::Not(a) => a.vars(out),
            F::Imp(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }

    fn size(&self) -> usize {
        match self {
            F::V(_) => 1,
            F::Not(a) => 1 + a.size(),
            F::Imp(a, b) => 3 + a.size() + b.size(),
        }
    }
}

fn formula() -> impl Strategy<Value = F> {
    (0..4usize).prop_map(F::V).prop_recursive(2, 8, 2, |inner| {
        prop_oneof![inner.clone().prop_map(|a| not(&a)), (inner.clone(), inner).prop_map(|(a, b)| imp(&a, &b))]
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Premise {
    Hyp(usize),
    Step(usize),
}

#[derive(Clone, Debug)]
struct GenStep {
    label: &'static str,
    premises: Vec<Premise>,
    f: F,
}

type Move = (u8, usize, usize, F, F, F);

/// Runs the moves forward from the hypotheses: axiom instances whose slots
/// are often filled with known facts, and modus ponens on a matching pair.
/// When no pair matches, modus ponens is set up through an `ax-1` instance
/// over a known fact. Statements are distinct; at most 8 steps are made.
fn derive(hyps: &[F], moves: &[Move]) -> Vec<GenStep> {
    let mut facts: Vec<(Premise, F)> = hyps.iter().enumerate().map(|(k, f)| (Premise::Hyp(k + 1), f.clone())).collect();
    let mut steps: Vec<GenStep> = Vec::new();
    let add = |steps: &mut Vec<GenStep>, facts: &mut Vec<(Premise, F)>, label, premises, f: F| {
        if steps.len() == 8 || f.size() > 40 || steps.iter().any(|s| s.f == f) {
            return None;
        }
        steps.push(GenStep { label, premises, f: f.clone() });
        facts.push((Premise::Step(steps.len()), f));
        Some(Premise::Step(steps.len()))
    };
    for (c, a, b, f1, f2, f3) in moves {
        let pick = |facts: &[(Premise, F)], i: usize, fallback: &F| {
            if facts.is_empty() || i.is_multiple_of(3) {
                fallback.clone()
            } else {
                facts[i % facts.len()].1.clone()
            }
        };
        match c % 6 {
            0 => {
                let (x, y) = (pick(&facts, *a, f1), pick(&facts, *b, f2));
                add(&mut steps, &mut facts, "ax-1", vec![], imp(&x, &imp(&y, &x)));
            }
            1 => {
                let nested: Vec<(F, F, F)> = facts
                    .iter()
                    .filter_map(|(_, f)| match f {
                        F::Imp(x, yz) => match &**yz {
                            F::Imp(y, z) => Some(((**x).clone(), (**y).clone(), (**z).clone())),
                            _ => None,
                        },
                        _ => None,
                    })
                    .collect();
                let (x, y, z) = match nested.get(*a % nested.len().max(1)) {
                    Some(t) if b % 2 == 0 => t.clone(),
                    _ => (pick(&facts, *a, f1), pick(&facts, *b, f2), f3.clone()),
                };
                let f = imp(&imp(&x, &imp(&y, &z)), &imp(&imp(&x, &y), &imp(&x, &z)));
                add(&mut steps, &mut facts, "ax-2", vec![], f);
            }
            2 => {
                let (x, y) = (pick(&facts, *a, f1), pick(&facts, *b, f2));
                add(&mut steps, &mut facts, "ax-3", vec![], imp(&imp(&not(&x), &not(&y)), &imp(&y, &x)));
            }
            _ => {
                let mut pairs = Vec::new();
                for (pi, fi) in &facts {
                    for (pj, fj) in &facts {
                        if let F::Imp(x, y) = fj {
                            if **x == *fi {
                                pairs.push((*pi, *pj, (**y).clone()));
                            }
                        }
                    }
                }
                // prefer pairs whose result is new
                pairs.retain(|(_, _, y)| !steps.iter().any(|s| s.f == *y));
                if let Some((min, maj, y)) = pairs.get(a % pairs.len().max(1)).cloned() {
                    add(&mut steps, &mut facts, "ax-mp", vec![min, maj], y);
                } else if !facts.is_empty() {
                    let (min, x) = facts[a % facts.len()].clone();
                    let y = pick(&facts, *b, f2);
                    if let Some(maj) = add(&mut steps, &mut facts, "ax-1", vec![], imp(&x, &imp(&y, &x))) {
                        add(&mut steps, &mut facts, "ax-mp", vec![min, maj], imp(&y, &x));
                    }
                }
            }
        }
    }
    if steps.is_empty() {
        let (_, _, _, f1, f2, _) = &moves[0];
        steps.push(GenStep { label: "ax-1", premises: vec![], f: imp(f1, &imp(f2, f1)) });
    }
    steps
}

/// Takes the step with the most dependencies (the latest among equals) as
/// the conclusion, keeps what it depends on and numbers those steps in
/// post-order with premises visited left to right.
fn normalize(steps: &[GenStep]) -> Vec<GenStep> {
    fn visit(i: usize, steps: &[GenStep], number: &mut Vec<Option<usize>>, out: &mut Vec<GenStep>) {
        if number[i].is_some() {
            return;
        }
        for p in &steps[i].premises {
            if let Premise::Step(j) = p {
                visit(j - 1, steps, number, out);
            }
        }
        let renumber = |p: &Premise| match p {
            Premise::Step(j) => Premise::Step(number[j - 1].unwrap()),
            h => *h,
        };
        let premises = steps[i].premises.iter().map(renumber).collect();
        out.push(GenStep { premises, ..steps[i].clone() });
        number[i] = Some(out.len());
    }
    let cone = |i: usize| {
        let mut out = Vec::new();
        visit(i, steps, &mut vec![None; steps.len()], &mut out);
        out
    };
    let root = (0..steps.len()).max_by_key(|&i| (cone(i).len(), i)).unwrap();
    cone(root)
}

const AX3: &str = "axiom ax-3 (ph : wff, ps : wff)  {
    prop 1 : wff = |- ( ( -. ph -> -. ps ) -> ( ps -> ph ) ) ;;
}
";

fn theorem_text(hyps: &[F], steps: &[GenStep]) -> String {
    let prop = &steps.last().unwrap().f;
    let mut header = BTreeSet::new();
    for f in hyps.iter().chain([prop]) {
        f.vars(&mut header);
    }
    let mut used = BTreeSet::new();
    for s in steps {
        s.f.vars(&mut used);
    }
    let decl = |vs: &BTreeSet<usize>| vs.iter().map(|i| format!("{} : wff", NAMES[*i])).collect::<Vec<_>>().join(", ");
    let mut out = format!("theorem t ({})  {{\n", decl(&header));
    for h in hyps {
        out += &format!("  hyp {} : wff = |- {} ;;\n", out.matches("  hyp ").count() + 1, h.text());
    }
    if !hyps.is_empty() {
        out += "  -----------------------\n";
    }
    out += &format!("  prop 1 : wff = |- {} ;;\n}}\nproof of t {{\n", prop.text());
    for v in used.difference(&header) {
        out += &format!("  var {} : wff ;;\n", NAMES[*v]);
    }
    for (n, s) in steps.iter().enumerate() {
        let refs: Vec<String> = s
            .premises
            .iter()
            .map(|p| match p {
                Premise::Hyp(k) => format!("hyp {k}"),
                Premise::Step(k) => format!("step {k}"),
            })
            .collect();
        out += &format!("  step {}: wff = axm {} ({}) |- {} ;;\n", n + 1, s.label, refs.join(", "), s.f.text());
    }
    out += &format!("  qed prop 1 = step {} ;\n}}\n", steps.len());
    out
}

fn proof_of(t: &Theory, name: &str) -> mmrus_core::rus::DeclarativeProof {
    match t.item(t.index_of(name).unwrap()) {
        RusItem::Theorem(th) => th.proof.clone().unwrap(),
        _ => panic!("{name} is not a theorem"),
    }
}

/// Elaborating a generated declarative proof (at most 8 steps) to Metamath
/// and stripping it again gives back the same steps, up to post-order
/// renumbering.
pub fn strip_elaborate_inversion() -> Result<(), String> {
    let preamble = format!("{}{AX3}", &super::A1D_RUS[..super::A1D_RUS.find("theorem syl").unwrap()]);
    let hyps = (vec(formula(), 0..=2), any::<bool>());
    let moves = vec((any::<u8>(), any::<usize>(), any::<usize>(), formula(), formula(), formula()), 4..=16);
    check((hyps, moves), |((mut hyps, chain), moves)| {
        if chain && hyps.len() == 2 {
            hyps[1] = imp(&hyps[0], &hyps[1]);
        }
        let steps = normalize(&derive(&hyps, &moves));
        let text = format!("{preamble}{}", theorem_text(&hyps, &steps));
        let theory = parse_rus_source(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        let report = verify_theory(&theory, &TheoryOptions::default());
        prop_assert!(report.is_ok(), "generated proof does not verify:\n{}", text);

        let smm = rus_to_smm(&theory, false).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(check_smm(&smm).is_ok(), "elaborated proof does not replay:\n{}", text);
        let back = smm_to_rus(&smm, &TranslateOptions::default()).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let (before, after) = (proof_of(&theory, "t"), proof_of(&back.theory, "t"));
        prop_assert_eq!(&after.steps, &before.steps, "\n{}", text);
        prop_assert_eq!(&after.qed, &before.qed);
        let names =
            |p: &mmrus_core::rus::DeclarativeProof| p.dummies.iter().map(|v| v.name.clone()).collect::<BTreeSet<_>>();
        prop_assert_eq!(names(&after), names(&before));
        Ok(())
    })
}
