//! Earley recognition followed by derivation extraction over the chart.
//!
//! The recognizer records every completed `(rule, start, end)`; extraction
//! then walks those spans top-down, memoizing up to two derivations per
//! `(typecode, start, end)`. Two derivations mean the parse is ambiguous and
//! both are reported. Patterns are non-empty and every slot covers at least
//! one token, so there are no nullable nonterminals.

use std::collections::{HashMap, HashSet};

use super::{Grammar, ParseError, PatternItem, SyntaxTree, VarTypes};
use crate::symbol::{join, Symbol};

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct Item {
    rule: u32,
    dot: u32,
    origin: u32,
}

struct Chart<'g> {
    grammar: &'g Grammar,
    tokens: &'g [Symbol],
    /// Typecode of each token when it is a variable.
    var_type: Vec<Option<&'g Symbol>>,
    /// Completed rules keyed by (typecode, start, end).
    completed: HashMap<(Symbol, usize, usize), Vec<u32>>,
    /// End positions of every recognized (typecode, start) span, leaves included.
    ends: HashMap<(Symbol, usize), Vec<usize>>,
}

fn next_item<'g>(g: &'g Grammar, it: &Item) -> Option<&'g PatternItem> {
    g.rules[it.rule as usize].pattern.get(it.dot as usize)
}

impl<'g> Chart<'g> {
    fn recognize(&mut self, start: &Symbol) -> usize {
        let g = self.grammar;
        let n = self.tokens.len();
        let mut sets: Vec<Vec<Item>> = vec![Vec::new(); n + 1];
        let mut seen: Vec<HashSet<Item>> = vec![HashSet::new(); n + 1];
        // items waiting for a typecode at an origin
        let mut waiting: Vec<HashMap<Symbol, Vec<Item>>> = vec![HashMap::new(); n + 1];
        let mut predicted: Vec<HashSet<Symbol>> = vec![HashSet::new(); n + 1];
        let mut furthest = 0;

        let add = |sets: &mut Vec<Vec<Item>>, seen: &mut Vec<HashSet<Item>>, i: usize, it: Item| {
            if seen[i].insert(it) {
                sets[i].push(it);
            }
        };
        let predict = |sets: &mut Vec<Vec<Item>>, seen: &mut Vec<HashSet<Item>>, i: usize, tc: &Symbol| {
            if i >= n {
                return;
            }
            for &r in g.rules_of(tc) {
                let ok = match &g.rules[r].pattern[0] {
                    PatternItem::Constant(c) => *c == self.tokens[i],
                    PatternItem::Var(_) => true,
                };
                if ok {
                    add(sets, seen, i, Item { rule: r as u32, dot: 0, origin: i as u32 });
                }
            }
        };

        predicted[0].insert(start.clone());
        predict(&mut sets, &mut seen, 0, start);
        if n > 0 && self.var_type[0] == Some(start) {
            self.ends.entry((start.clone(), 0)).or_default().push(1);
        }

        for i in 0..=n {
            if !sets[i].is_empty() {
                furthest = i;
            }
            let mut k = 0;
            while k < sets[i].len() {
                let it = sets[i][k];
                k += 1;
                let rule = &g.rules[it.rule as usize];
                match next_item(g, &it) {
                    None => {
                        let origin = it.origin as usize;
                        let key = (rule.typecode.clone(), origin, i);
                        let entry = self.completed.entry(key).or_default();
                        if !entry.contains(&it.rule) {
                            entry.push(it.rule);
                            let ends = self.ends.entry((rule.typecode.clone(), origin)).or_default();
                            if !ends.contains(&i) {
                                ends.push(i);
                            }
                        }
                        if let Some(ws) = waiting[origin].get(&rule.typecode) {
                            for w in ws.clone() {
                                add(&mut sets, &mut seen, i, Item { dot: w.dot + 1, ..w });
                            }
                        }
                    }
                    Some(PatternItem::Constant(c)) => {
                        if i < n && self.tokens[i] == *c {
                            add(&mut sets, &mut seen, i + 1, Item { dot: it.dot + 1, ..it });
                        }
                    }
                    Some(PatternItem::Var(v)) => {
                        let tc = &rule.vars[*v].1;
                        waiting[i].entry(tc.clone()).or_default().push(it);
                        if predicted[i].insert(tc.clone()) {
                            predict(&mut sets, &mut seen, i, tc);
                            if i < n && self.var_type[i] == Some(tc) {
                                let ends = self.ends.entry((tc.clone(), i)).or_default();
                                if !ends.contains(&(i + 1)) {
                                    ends.push(i + 1);
                                }
                            }
                        }
                        if i < n && self.var_type[i] == Some(tc) {
                            add(&mut sets, &mut seen, i + 1, Item { dot: it.dot + 1, ..it });
                        }
                    }
                }
            }
        }
        furthest
    }
}

#[derive(Clone)]
enum Memo {
    InProgress,
    Done(Vec<SyntaxTree>),
}

struct Extract<'c, 'g> {
    chart: &'c Chart<'g>,
    memo: HashMap<(Symbol, usize, usize), Memo>,
    reentered: HashSet<(Symbol, usize, usize)>,
    cyclic: Option<SyntaxTree>,
}

const LIMIT: usize = 2;

impl Extract<'_, '_> {
    /// Up to two derivations of `tc` over `[i, j)`.
    fn trees(&mut self, tc: &Symbol, i: usize, j: usize) -> Vec<SyntaxTree> {
        let key = (tc.clone(), i, j);
        match self.memo.get(&key) {
            Some(Memo::Done(v)) => return v.clone(),
            Some(Memo::InProgress) => {
                self.reentered.insert(key);
                return Vec::new();
            }
            None => {}
        }
        self.memo.insert(key.clone(), Memo::InProgress);
        let mut out = Vec::new();
        let chart = self.chart;
        if j == i + 1 && chart.var_type[i] == Some(tc) {
            out.push(SyntaxTree::leaf(chart.tokens[i].clone(), tc.clone()));
        }
        if let Some(rules) = chart.completed.get(&key) {
            for &r in rules {
                if out.len() >= LIMIT {
                    break;
                }
                let rule = &chart.grammar.rules[r as usize];
                for children in self.seq(r as usize, 0, i, j) {
                    out.push(SyntaxTree::Node { rule: rule.clone(), children });
                    if out.len() >= LIMIT {
                        break;
                    }
                }
            }
        }
        if self.reentered.contains(&key) && !out.is_empty() && self.cyclic.is_none() {
            self.cyclic = Some(out[0].clone());
        }
        self.memo.insert(key, Memo::Done(out.clone()));
        out
    }

    /// Up to two child lists matching items `k..` of rule `r` over `[p, j)`.
    fn seq(&mut self, r: usize, k: usize, p: usize, j: usize) -> Vec<Vec<SyntaxTree>> {
        let chart = self.chart;
        let rule = &chart.grammar.rules[r];
        if k == rule.pattern.len() {
            return if p == j { vec![Vec::new()] } else { Vec::new() };
        }
        let remaining = rule.pattern.len() - k - 1;
        // every remaining item covers at least one token
        if p + remaining + 1 > j {
            return Vec::new();
        }
        match &rule.pattern[k] {
            PatternItem::Constant(c) => {
                if p < j && chart.tokens[p] == *c {
                    self.seq(r, k + 1, p + 1, j)
                } else {
                    Vec::new()
                }
            }
            PatternItem::Var(v) => {
                let tc = &rule.vars[*v].1;
                let mut out = Vec::new();
                let Some(ends) = chart.ends.get(&(tc.clone(), p)) else { return out };
                for &q in ends {
                    if q > j || q + remaining > j {
                        continue;
                    }
                    let rests = self.seq(r, k + 1, q, j);
                    if rests.is_empty() {
                        continue;
                    }
                    let heads = self.trees(tc, p, q);
                    for h in &heads {
                        for rest in &rests {
                            let mut children = Vec::with_capacity(rest.len() + 1);
                            children.push(h.clone());
                            children.extend(rest.iter().cloned());
                            out.push(children);
                            if out.len() >= LIMIT {
                                return out;
                            }
                        }
                    }
                }
                out
            }
        }
    }
}

pub(super) fn parse(
    g: &Grammar,
    typecode: &Symbol,
    body: &[Symbol],
    vars: &VarTypes,
) -> Result<SyntaxTree, ParseError> {
    let var_type = body.iter().map(|s| vars.get(s)).collect();
    let mut chart = Chart { grammar: g, tokens: body, var_type, completed: HashMap::new(), ends: HashMap::new() };
    let furthest = chart.recognize(typecode);
    let n = body.len();
    let accepted = chart.ends.get(&(typecode.clone(), 0)).is_some_and(|e| e.contains(&n));
    if !accepted || n == 0 {
        return Err(ParseError::NoParse {
            typecode: typecode.clone(),
            text: join(body),
            consumed: furthest.min(n),
            len: n,
        });
    }
    let mut ex = Extract { chart: &chart, memo: HashMap::new(), reentered: HashSet::new(), cyclic: None };
    let mut trees = ex.trees(typecode, 0, n);
    if let Some(t) = ex.cyclic.take() {
        return Err(ParseError::Ambiguous {
            typecode: typecode.clone(),
            text: join(body),
            first: format!("{t:?}"),
            second: "infinitely many derivations through a cycle of unit rules".into(),
        });
    }
    match trees.len() {
        0 => Err(ParseError::NoParse { typecode: typecode.clone(), text: join(body), consumed: n, len: n }),
        1 => Ok(trees.pop().unwrap()),
        _ => Err(ParseError::Ambiguous {
            typecode: typecode.clone(),
            text: join(body),
            first: format!("{:?}", trees[0]),
            second: format!("{:?}", trees[1]),
        }),
    }
}
