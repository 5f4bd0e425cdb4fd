//! SMM → Russell.

use rayon::prelude::*;

use super::smm::{replay_smm, SmmDatabase};
use super::strip::{strip_syntax_steps, CitedAssertion, CitedTable};
use super::TranslateError;
use crate::grammar::{Grammar, GrammarRule, Marker, ParsedExpression, SyntaxTree, VarTypes};
use crate::mm::{AssertionKind, Frame};
use crate::rus::{
    check_definition, DeclarativeProof, Definition, DefinitionOptions, RefKind, Role, RuleItem, RusAssertion, RusItem,
    Statement, Theorem, Theory, TypedVar,
};
use crate::symbol::{DisjointPairs, Symbol};

#[derive(Clone, Debug, Default)]
pub struct TranslateOptions {
    pub definitions: DefinitionOptions,
    /// Strip and elaborate proofs on the rayon pool.
    pub parallel: bool,
}

#[derive(Clone, Debug)]
pub struct RusTranslation {
    pub theory: Theory,
    pub warnings: Vec<String>,
}

/// Essential hypotheses by label, parsed.
type Essentials = Vec<(String, ParsedExpression)>;

fn is_structural(c: char) -> bool {
    matches!(c, '(' | ')' | ',' | ':' | ';' | '{' | '}')
}

fn frame_vars(frame: &Frame) -> Vec<TypedVar> {
    frame.floatings().map(|h| TypedVar { name: h.expr.body[0].clone(), typecode: h.expr.typecode.clone() }).collect()
}

fn pair_groups(d: &DisjointPairs) -> Vec<Vec<Symbol>> {
    d.iter().map(|(x, y)| vec![x.clone(), y.clone()]).collect()
}

fn statement(role: Role, p: &ParsedExpression) -> Statement {
    Statement { role, typecode: p.typecode.clone(), marker: p.marker.clone(), tree: p.tree.clone() }
}

/// Translates SMM to a Russell theory. Constants come first (syntactic
/// typecodes as `type`), then one item per assertion in order.
pub fn smm_to_rus(smm: &SmmDatabase, opts: &TranslateOptions) -> Result<RusTranslation, TranslateError> {
    let syntactic = smm.syntactic_typecodes();
    for v in &smm.variables {
        if v.contains(is_structural) || v.as_str() == crate::rus::TERM_MARKER {
            return Err(TranslateError::BadSymbol(v.clone()));
        }
    }
    for c in &smm.constants {
        if c.contains(";;") || c.as_str() == crate::rus::TERM_MARKER {
            return Err(TranslateError::BadSymbol(c.clone()));
        }
    }
    let mut theory = Theory::new(Grammar::new(syntactic.clone()));
    let mut warnings = Vec::new();
    let push = |theory: &mut Theory, item: RusItem| {
        theory.push(item).map(|_| ()).map_err(|name| TranslateError::NameCollision { name })
    };

    let mut plain: Vec<Symbol> = Vec::new();
    for c in &smm.constants {
        if syntactic.contains(c) {
            if !plain.is_empty() {
                push(&mut theory, RusItem::Constant(std::mem::take(&mut plain)))?;
            }
            push(&mut theory, RusItem::Type(c.clone()))?;
        } else {
            plain.push(c.clone());
        }
    }
    if !plain.is_empty() {
        push(&mut theory, RusItem::Constant(plain))?;
    }

    let mut cited = CitedTable::new();
    // (item position, smm index, parsed essentials)
    let mut pending: Vec<(usize, usize, Essentials)> = Vec::new();
    for (i, a) in smm.assertions.iter().enumerate() {
        let tc = &a.frame.conclusion.typecode;
        let vars = frame_vars(&a.frame);
        let vt: VarTypes = vars.iter().map(|v| (v.name.clone(), v.typecode.clone())).collect();
        let parse = |g: &Grammar, e| {
            g.parse_statement(e, &vt).map_err(|error| TranslateError::Parse { label: a.label.clone(), error })
        };

        if syntactic.contains(tc) {
            let conclusion = match a.kind {
                AssertionKind::Axiom => {
                    if a.frame.essentials().next().is_some() {
                        return Err(TranslateError::NotContextFree(a.label.clone()));
                    }
                    let pairs = vars.iter().map(|v| (v.name.clone(), v.typecode.clone())).collect();
                    let rule = GrammarRule::from_body(&a.label, tc.clone(), pairs, &a.frame.conclusion.body)
                        .and_then(|r| theory.grammar_mut().add_rule(r))
                        .map_err(|e| TranslateError::Grammar { label: a.label.clone(), error: e })?;
                    let tree = rule.generic_tree();
                    let term = Statement {
                        role: Role::Term,
                        typecode: tc.clone(),
                        marker: Marker::Syntactic,
                        tree: tree.clone(),
                    };
                    push(&mut theory, RusItem::Rule(RuleItem { name: a.label.clone(), vars, term, rule }))?;
                    ParsedExpression { marker: Marker::Syntactic, typecode: tc.clone(), tree }
                }
                AssertionKind::Provable => {
                    warnings.push(format!("{}: syntactic theorem has no Russell counterpart and is skipped", a.label));
                    parse(theory.grammar(), &a.frame.conclusion)?
                }
            };
            cited.insert(a.label.clone(), CitedAssertion { frame: a.frame.clone(), conclusion, kind: RefKind::Axm });
            continue;
        }

        theory.grammar_mut().add_judgement(tc.clone());
        let hyps: Vec<(String, ParsedExpression)> = a
            .frame
            .essentials()
            .map(|h| Ok((h.label.clone(), parse(theory.grammar(), &h.expr)?)))
            .collect::<Result<_, TranslateError>>()?;
        let conclusion = parse(theory.grammar(), &a.frame.conclusion)?;
        let disjoint_groups = pair_groups(&a.frame.disjoint);
        let header = RusAssertion {
            name: a.label.clone(),
            vars: vars.clone(),
            disjoint_groups: disjoint_groups.clone(),
            hyps: hyps.iter().enumerate().map(|(k, (_, p))| statement(Role::Hyp(k + 1), p)).collect(),
            props: vec![statement(Role::Prop(1), &conclusion)],
        };

        let kind = match a.kind {
            AssertionKind::Axiom => {
                let definition = match (&conclusion.tree, a.label.starts_with("df-") && hyps.is_empty()) {
                    (SyntaxTree::Node { children, .. }, true)
                        if children.len() == 2 && children[0].typecode() == children[1].typecode() =>
                    {
                        let side = |role, t: &SyntaxTree| Statement {
                            role,
                            typecode: t.typecode().clone(),
                            marker: Marker::Syntactic,
                            tree: t.clone(),
                        };
                        Some(Definition {
                            name: a.label.clone(),
                            vars: vars.clone(),
                            disjoint_groups,
                            defiendum: side(Role::Defiendum, &children[0]),
                            definiens: side(Role::Definiens, &children[1]),
                            prop: statement(Role::DefinitionProp, &conclusion),
                            implicit_rule: None,
                        })
                    }
                    _ => None,
                };
                match definition.map(|d| (check_definition(&theory, &d, &opts.definitions), d)) {
                    Some((Ok(()), d)) => {
                        push(&mut theory, RusItem::Definition(d))?;
                        RefKind::Def
                    }
                    Some((Err(violations), _)) => {
                        let why: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
                        warnings.push(format!("{}: kept as an axiom: {}", a.label, why.join("; ")));
                        push(&mut theory, RusItem::Axiom(header))?;
                        RefKind::Axm
                    }
                    None => {
                        if a.label.starts_with("df-") {
                            warnings.push(format!(
                                "{}: kept as an axiom: not of the form `defiendum <-> definiens`",
                                a.label
                            ));
                        }
                        push(&mut theory, RusItem::Axiom(header))?;
                        RefKind::Axm
                    }
                }
            }
            AssertionKind::Provable => {
                let position = theory.len();
                push(&mut theory, RusItem::Theorem(Theorem { assertion: header, proof: None }))?;
                pending.push((position, i, hyps));
                RefKind::Thm
            }
        };
        cited.insert(a.label.clone(), CitedAssertion { frame: a.frame.clone(), conclusion, kind });
    }

    let prove = |(position, i, hyps): &(usize, usize, Vec<(String, ParsedExpression)>)| {
        let a = &smm.assertions[*i];
        let trace = replay_smm(smm, *i).map_err(|error| TranslateError::Verify { label: a.label.clone(), error })?;
        let mut proof = strip_syntax_steps(&a.label, &trace, hyps, &cited)?;
        proof.dummies = a
            .dummies
            .iter()
            .map(|h| TypedVar { name: h.expr.body[0].clone(), typecode: h.expr.typecode.clone() })
            .collect();
        proof.disjoint_groups = pair_groups(&a.extra_disjoint);
        Ok::<(usize, DeclarativeProof), TranslateError>((*position, proof))
    };
    let proofs: Vec<(usize, DeclarativeProof)> = if opts.parallel {
        pending.par_iter().map(prove).collect::<Result<_, _>>()?
    } else {
        pending.iter().map(prove).collect::<Result<_, _>>()?
    };
    for (position, proof) in proofs {
        if let RusItem::Theorem(t) = theory.item_mut(position) {
            t.proof = Some(proof);
        }
    }
    Ok(RusTranslation { theory, warnings })
}
