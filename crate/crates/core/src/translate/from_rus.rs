//! Russell → SMM.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, HashSet};

use rayon::prelude::*;

use super::elaborate::{elaborate_proof, LabelScheme};
use super::smm::{merge_orders, SmmAssertion, SmmDatabase};
use super::TranslateError;
use crate::mm::{AssertionKind, Frame, Hypothesis};
use crate::rus::{groups_to_pairs, RusItem, Statement, Theory, TypedVar};
use crate::symbol::{DisjointPairs, Expression, Symbol};

/// Replaces every character that Metamath labels do not allow by `_`.
pub fn mm_label(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') { c } else { '_' }).collect()
}

fn float_prefix(typecode: &str) -> String {
    match typecode {
        "wff" => "w".into(),
        "setvar" => "v".into(),
        "class" => "c".into(),
        other => other.chars().next().map(String::from).unwrap_or_default(),
    }
}

/// Takes `base`, or `base.1`, `base.2`, ... when it is already used.
fn fresh(base: String, taken: &mut HashSet<String>) -> String {
    let mut candidate = base.clone();
    let mut n = 0;
    while taken.contains(&candidate) {
        n += 1;
        candidate = format!("{base}.{n}");
    }
    taken.insert(candidate.clone());
    candidate
}

/// The variable lists an item contributes to the global order.
fn item_vars(item: &RusItem) -> Vec<&TypedVar> {
    match item {
        RusItem::Constant(_) | RusItem::Type(_) => Vec::new(),
        RusItem::Rule(r) => r.vars.iter().collect(),
        RusItem::Axiom(a) => a.vars.iter().collect(),
        RusItem::Definition(d) => d.vars.iter().collect(),
        RusItem::Theorem(t) => {
            let mut v: Vec<&TypedVar> = t.assertion.vars.iter().collect();
            if let Some(p) = &t.proof {
                v.extend(&p.dummies);
            }
            v
        }
    }
}

struct Header {
    label: String,
    frame: Frame,
    dummies: Vec<Hypothesis>,
    extra: DisjointPairs,
}

/// Translates a theory to SMM. Frames list floatings in a global variable
/// order merged from all items; essential hypotheses are labelled
/// `<label>.<k>`.
pub fn rus_to_smm(theory: &Theory, parallel: bool) -> Result<SmmDatabase, TranslateError> {
    let items = theory.items();
    let order = merge_orders(items.iter().map(|it| item_vars(it).into_iter().map(|v| &v.name).collect()));
    let rank: HashMap<&Symbol, usize> = order.iter().enumerate().map(|(i, v)| (v, i)).collect();

    let mut scheme = LabelScheme::default();
    let mut renamed = Vec::new();
    let mut taken: HashSet<String> = HashSet::new();
    let mut names: Vec<&str> = Vec::new();
    for it in items {
        if let RusItem::Definition(d) = it {
            if let Some(r) = &d.implicit_rule {
                names.push(&r.label);
            }
        }
        names.extend(it.name());
    }
    for name in &names {
        let label = mm_label(name);
        if !taken.insert(label.clone()) {
            return Err(TranslateError::NameCollision { name: name.to_string() });
        }
        if label != *name {
            scheme.labels.insert(name.to_string(), label.clone());
            renamed.push((name.to_string(), label));
        }
    }
    let mut float_label: HashMap<(Symbol, Symbol), String> = HashMap::new();
    for it in items {
        for v in item_vars(it) {
            let key = (v.name.clone(), v.typecode.clone());
            if let Entry::Vacant(slot) = float_label.entry(key) {
                let label = fresh(mm_label(&format!("{}{}", float_prefix(&v.typecode), v.name)), &mut taken);
                scheme.floats.entry(v.name.clone()).or_insert_with(|| label.clone());
                slot.insert(label);
            }
        }
    }
    let floating = |v: &TypedVar| {
        Hypothesis::floating(&float_label[&(v.name.clone(), v.typecode.clone())], v.typecode.clone(), v.name.clone())
    };
    let sorted = |mut vs: Vec<TypedVar>| {
        vs.sort_by_key(|v| rank[&v.name]);
        vs
    };

    let mut smm = SmmDatabase::new(theory.constants(), order.clone());
    smm.renamed = renamed;
    // (smm index, item position, hyp labels)
    let mut proofs: Vec<(usize, usize, Vec<String>)> = Vec::new();
    let push = |smm: &mut SmmDatabase,
                scheme: &mut LabelScheme,
                name: &str,
                h: Header,
                kind: AssertionKind,
                vars: &[TypedVar]| {
        scheme.frames.insert(name.to_string(), vars.iter().map(|v| v.name.clone()).collect());
        smm.push(SmmAssertion {
            label: h.label,
            kind,
            frame: h.frame,
            dummies: h.dummies,
            extra_disjoint: h.extra,
            proof: None,
        })
    };

    for (position, it) in items.iter().enumerate() {
        match it {
            RusItem::Constant(_) | RusItem::Type(_) => {}
            RusItem::Rule(r) => {
                let vars = sorted(r.vars.clone());
                let frame = Frame {
                    hyps: vars.iter().map(floating).collect(),
                    disjoint: DisjointPairs::new(),
                    conclusion: Expression::new(r.rule.typecode.clone(), r.rule.body()),
                };
                let label = scheme.label(&r.name).to_string();
                push(
                    &mut smm,
                    &mut scheme,
                    &r.name,
                    Header { label, frame, dummies: vec![], extra: DisjointPairs::new() },
                    AssertionKind::Axiom,
                    &vars,
                )?;
            }
            RusItem::Definition(d) => {
                if let Some(rule) = &d.implicit_rule {
                    let vars: Vec<TypedVar> =
                        sorted(rule.vars.iter().map(|(v, t)| TypedVar::new(v.clone(), t.clone())).collect());
                    let frame = Frame {
                        hyps: vars.iter().map(floating).collect(),
                        disjoint: DisjointPairs::new(),
                        conclusion: Expression::new(rule.typecode.clone(), rule.body()),
                    };
                    let label = scheme.label(&rule.label).to_string();
                    push(
                        &mut smm,
                        &mut scheme,
                        &rule.label,
                        Header { label, frame, dummies: vec![], extra: DisjointPairs::new() },
                        AssertionKind::Axiom,
                        &vars,
                    )?;
                }
                let (h, vars) = header(
                    scheme.label(&d.name),
                    &[],
                    &d.prop,
                    &d.vars,
                    &d.disjoint_groups,
                    &[],
                    &[],
                    &sorted,
                    &floating,
                    &mut taken,
                );
                push(&mut smm, &mut scheme, &d.name, h, AssertionKind::Axiom, &vars)?;
            }
            RusItem::Axiom(a) => {
                let (h, vars) = header(
                    scheme.label(&a.name),
                    &a.hyps,
                    a.prop(),
                    &a.vars,
                    &a.disjoint_groups,
                    &[],
                    &[],
                    &sorted,
                    &floating,
                    &mut taken,
                );
                push(&mut smm, &mut scheme, &a.name, h, AssertionKind::Axiom, &vars)?;
            }
            RusItem::Theorem(t) => {
                let a = &t.assertion;
                let (dummies, groups) = match &t.proof {
                    Some(p) => (p.dummies.as_slice(), p.disjoint_groups.as_slice()),
                    None => (&[][..], &[][..]),
                };
                let (h, vars) = header(
                    scheme.label(&a.name),
                    &a.hyps,
                    a.prop(),
                    &a.vars,
                    &a.disjoint_groups,
                    dummies,
                    groups,
                    &sorted,
                    &floating,
                    &mut taken,
                );
                let hyp_labels = h.frame.essentials().map(|e| e.label.clone()).collect();
                let i = push(&mut smm, &mut scheme, &a.name, h, AssertionKind::Provable, &vars)?;
                if t.proof.is_some() {
                    proofs.push((i, position, hyp_labels));
                }
            }
        }
    }

    let elaborate = |(i, position, hyps): &(usize, usize, Vec<String>)| {
        elaborate_proof(theory, *position, &scheme, hyps).map(|p| (*i, p))
    };
    let done: Vec<(usize, Vec<String>)> = if parallel {
        proofs.par_iter().map(elaborate).collect::<Result<_, _>>()?
    } else {
        proofs.iter().map(elaborate).collect::<Result<_, _>>()?
    };
    for (i, p) in done {
        smm.assertions[i].proof = Some(p);
    }
    Ok(smm)
}

/// Frame of an axiom, definition or theorem: floatings of the variables that
/// occur in its hypotheses or proposition, the `$d` pairs among them, and
/// every other declared variable as a dummy.
#[allow(clippy::too_many_arguments)]
fn header(
    label: &str,
    hyps: &[Statement],
    prop: &Statement,
    declared: &[TypedVar],
    groups: &[Vec<Symbol>],
    dummies: &[TypedVar],
    proof_groups: &[Vec<Symbol>],
    sorted: &dyn Fn(Vec<TypedVar>) -> Vec<TypedVar>,
    floating: &dyn Fn(&TypedVar) -> Hypothesis,
    taken: &mut HashSet<String>,
) -> (Header, Vec<TypedVar>) {
    let mut used: HashSet<Symbol> = HashSet::new();
    for s in hyps.iter().chain(std::iter::once(prop)) {
        used.extend(s.tree.variables());
    }
    let (mandatory, rest): (Vec<TypedVar>, Vec<TypedVar>) =
        declared.iter().cloned().partition(|v| used.contains(&v.name));
    let mandatory = sorted(mandatory);
    let mut all = groups_to_pairs(groups);
    all.extend(&groups_to_pairs(proof_groups));
    let disjoint = all.restrict(|v| used.contains(v));
    let extra: DisjointPairs = all.iter().filter(|(x, y)| !disjoint.contains(x, y)).cloned().collect();
    let mut frame_hyps: Vec<Hypothesis> = mandatory.iter().map(floating).collect();
    for (k, h) in hyps.iter().enumerate() {
        let l = fresh(format!("{label}.{}", k + 1), taken);
        frame_hyps.push(Hypothesis::essential(&l, h.to_expression()));
    }
    let dummies: Vec<Hypothesis> =
        sorted(rest.into_iter().chain(dummies.iter().cloned()).collect()).iter().map(floating).collect();
    let frame = Frame { hyps: frame_hyps, disjoint, conclusion: prop.to_expression() };
    (Header { label: label.to_string(), frame, dummies, extra }, mandatory)
}
