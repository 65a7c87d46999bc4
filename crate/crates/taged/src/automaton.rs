//! Bottom-up tree automata over ranked alphabets.
//!
//! An automaton is a set of states, a set of final states and rules of the
//! shape `f(q_1,...,q_n) -> q`. A run labels every position of a term with a
//! state so that each node locally matches a rule; a term is accepted when
//! some run labels the root with a final state.
//!
//! The text format is line oriented and whitespace tolerant, with `#`
//! comments:
//!
//! ```text
//! alphabet: A/0 f/2
//! states: q1 q2
//! final: q2
//! rule: A() -> q1
//! rule: f(q1,q1) -> q2
//! ```
//!
//! Output is canonical: symbols, states and rules are sorted, and each rule
//! is printed as `rule: f(q1,q1) -> q2` (constants as `A()`). Parsing the
//! printed form reproduces the automaton exactly.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::term::{Position, RankedAlphabet, Symbol, Term};
use crate::textfmt::{content_lines, is_identifier, is_state_name, keyword_and_body};

/// An automaton state. Cheap to clone; ordered by name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State(std::sync::Arc<str>);

impl State {
    /// State names may use `[A-Za-z0-9_.,()]` with balanced parentheses, so
    /// that product states stay single tokens in the text format.
    pub fn new(name: &str) -> State {
        assert!(is_state_name(name), "invalid state name {name:?}");
        State(std::sync::Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A transition `f(q_1,...,q_n) -> q`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    symbol: Symbol,
    args: Vec<State>,
    target: State,
}

impl Rule {
    pub fn new(symbol: Symbol, args: Vec<State>, target: State) -> Rule {
        assert_eq!(
            symbol.arity(),
            args.len(),
            "rule for {symbol} needs {} argument states",
            symbol.arity()
        );
        Rule {
            symbol,
            args,
            target,
        }
    }

    pub fn symbol(&self) -> &Symbol {
        &self.symbol
    }

    pub fn args(&self) -> &[State] {
        &self.args
    }

    pub fn target(&self) -> &State {
        &self.target
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.symbol.name())?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ") -> {}", self.target)
    }
}

#[derive(Debug, Clone)]
struct CompiledRule {
    args: Vec<usize>,
    target: usize,
}

/// A bottom-up tree automaton. Immutable after construction.
#[derive(Debug, Clone)]
pub struct TreeAutomaton {
    alphabet: RankedAlphabet,
    states: Vec<State>,
    rules: Vec<Rule>,
    finals: BTreeSet<State>,
    state_index: HashMap<State, usize>,
    rules_by_symbol: BTreeMap<String, Vec<CompiledRule>>,
    max_arity: usize,
}

impl PartialEq for TreeAutomaton {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet
            && self.states == other.states
            && self.rules == other.rules
            && self.finals == other.finals
    }
}

impl Eq for TreeAutomaton {}

impl TreeAutomaton {
    /// Build an automaton, validating that final states are declared, that
    /// every rule only mentions declared states, and that rule symbols
    /// belong to the alphabet. Duplicate states and rules collapse silently.
    pub fn new(
        alphabet: RankedAlphabet,
        states: impl IntoIterator<Item = State>,
        rules: impl IntoIterator<Item = Rule>,
        finals: impl IntoIterator<Item = State>,
    ) -> Result<TreeAutomaton> {
        let mut state_list: Vec<State> = states.into_iter().collect();
        state_list.sort();
        state_list.dedup();
        let state_index: HashMap<State, usize> = state_list
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();

        let finals: BTreeSet<State> = finals.into_iter().collect();
        for s in &finals {
            if !state_index.contains_key(s) {
                return Err(Error::malformed(
                    "automaton",
                    format!("final state {s} is not declared"),
                ));
            }
        }

        let mut rule_list: Vec<Rule> = rules.into_iter().collect();
        rule_list.sort();
        rule_list.dedup();
        for r in &rule_list {
            match alphabet.get(r.symbol().name()) {
                Some(declared) if declared == r.symbol() => {}
                _ => {
                    return Err(Error::malformed(
                        "automaton",
                        format!("rule {r} uses undeclared symbol {}", r.symbol()),
                    ))
                }
            }
            for s in r.args().iter().chain([r.target()]) {
                if !state_index.contains_key(s) {
                    return Err(Error::malformed(
                        "automaton",
                        format!("rule {r} uses undeclared state {s}"),
                    ));
                }
            }
        }

        let mut rules_by_symbol: BTreeMap<String, Vec<CompiledRule>> = BTreeMap::new();
        for r in &rule_list {
            rules_by_symbol
                .entry(r.symbol().name().to_string())
                .or_default()
                .push(CompiledRule {
                    args: r.args().iter().map(|s| state_index[s]).collect(),
                    target: state_index[r.target()],
                });
        }
        let max_arity = alphabet.symbols().map(Symbol::arity).max().unwrap_or(0);

        Ok(TreeAutomaton {
            alphabet,
            states: state_list,
            rules: rule_list,
            finals,
            state_index,
            rules_by_symbol,
            max_arity,
        })
    }

    pub fn alphabet(&self) -> &RankedAlphabet {
        &self.alphabet
    }

    /// Declared states in name order.
    pub fn states(&self) -> &[State] {
        &self.states
    }

    /// Rules in canonical order (symbol, arguments, target).
    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn finals(&self) -> &BTreeSet<State> {
        &self.finals
    }

    /// Look up a declared state by name.
    pub fn state(&self, name: &str) -> Option<&State> {
        if !is_state_name(name) {
            return None;
        }
        let probe = State::new(name);
        self.state_index.get_key_value(&probe).map(|(s, _)| s)
    }

    fn check_term(&self, term: &Term) -> Result<()> {
        match self.alphabet.get(term.symbol().name()) {
            Some(declared) if declared == term.symbol() => {}
            _ => {
                return Err(Error::AlienSymbol {
                    symbol: term.symbol().to_string(),
                })
            }
        }
        for c in term.children() {
            self.check_term(c)?;
        }
        Ok(())
    }

    fn reach_idx(&self, term: &Term) -> BTreeSet<usize> {
        let child_sets: Vec<BTreeSet<usize>> =
            term.children().iter().map(|c| self.reach_idx(c)).collect();
        let mut out = BTreeSet::new();
        if let Some(rules) = self.rules_by_symbol.get(term.symbol().name()) {
            for r in rules {
                if r.args
                    .iter()
                    .zip(&child_sets)
                    .all(|(a, set)| set.contains(a))
                {
                    out.insert(r.target);
                }
            }
        }
        out
    }

    /// The states the automaton can reach at the root of `term`.
    pub fn reachable_states(&self, term: &Term) -> Result<BTreeSet<State>> {
        self.check_term(term)?;
        Ok(self
            .reach_idx(term)
            .into_iter()
            .map(|i| self.states[i].clone())
            .collect())
    }

    /// Does some run label the root with a final state?
    pub fn accepts(&self, term: &Term) -> Result<bool> {
        self.check_term(term)?;
        Ok(self
            .reach_idx(term)
            .into_iter()
            .any(|i| self.finals.contains(&self.states[i])))
    }

    /// All runs of the automaton on `term`, accepting or not, ordered by
    /// their state sequence over positions.
    pub fn runs(&self, term: &Term) -> Result<Vec<Run>> {
        self.check_term(term)?;
        let trees = self.run_trees(term);
        let mut runs: Vec<Run> = trees
            .into_iter()
            .map(|tree| {
                let mut labels = BTreeMap::new();
                collect_labels(&tree, &Position::root(), &self.states, &mut labels);
                Run {
                    term: term.clone(),
                    labels,
                }
            })
            .collect();
        runs.sort_by(|a, b| a.labels.values().cmp(b.labels.values()));
        Ok(runs)
    }

    fn run_trees(&self, term: &Term) -> Vec<RunTree> {
        let child_runs: Vec<Vec<RunTree>> =
            term.children().iter().map(|c| self.run_trees(c)).collect();
        let mut out = Vec::new();
        if let Some(rules) = self.rules_by_symbol.get(term.symbol().name()) {
            for r in rules {
                let mut picked: Vec<&RunTree> = Vec::with_capacity(r.args.len());
                assemble(&r.args, &child_runs, &mut picked, r.target, &mut out);
            }
        }
        out
    }

    /// Is the accepted language empty? Decided by the productive-state
    /// fixpoint, with no term construction.
    pub fn is_empty(&self) -> bool {
        let mut productive = vec![false; self.states.len()];
        let mut changed = true;
        while changed {
            changed = false;
            for rules in self.rules_by_symbol.values() {
                for r in rules {
                    if !productive[r.target] && r.args.iter().all(|&a| productive[a]) {
                        productive[r.target] = true;
                        changed = true;
                    }
                }
            }
        }
        !self.finals.iter().any(|s| productive[self.state_index[s]])
    }

    /// For every state, the terms of each node count up to `max_nodes` that
    /// reach it, grouped by node count. Dynamic programming over
    /// (state, size) buckets; the total number of constructed terms is
    /// bounded by `limits.max_bucket_terms`.
    pub(crate) fn language_buckets(
        &self,
        max_nodes: usize,
        limits: &Limits,
    ) -> Result<BTreeMap<State, BTreeMap<usize, BTreeSet<Term>>>> {
        let n = self.states.len();
        let mut buckets: Vec<BTreeMap<usize, BTreeSet<Term>>> = vec![BTreeMap::new(); n];
        let mut occupied_sizes: Vec<Vec<usize>> = vec![Vec::new(); n];
        let symbols: Vec<Symbol> = self.alphabet.symbols().cloned().collect();
        let mut constructed: usize = 0;
        let mut max_occupied: usize = 0;

        for size in 1..=max_nodes {
            if size > 1 && size > self.max_arity.saturating_mul(max_occupied) + 1 {
                break;
            }
            let mut staged: Vec<(usize, Term)> = Vec::new();
            for sym in &symbols {
                let Some(rules) = self.rules_by_symbol.get(sym.name()) else {
                    continue;
                };
                if sym.arity() == 0 {
                    if size == 1 {
                        for r in rules {
                            constructed += 1;
                            if constructed > limits.max_bucket_terms {
                                return Err(Error::limit(
                                    "enumerated terms",
                                    constructed,
                                    limits.max_bucket_terms,
                                ));
                            }
                            staged.push((r.target, Term::constant(sym.clone())));
                        }
                    }
                    continue;
                }
                if size < sym.arity() + 1 {
                    continue;
                }
                for r in rules {
                    let mut split: Vec<usize> = Vec::with_capacity(r.args.len());
                    let mut children: Vec<Term> = Vec::with_capacity(r.args.len());
                    enumerate_splits(&r.args, size - 1, &occupied_sizes, &mut split, &mut |sp| {
                        build_products(
                            sym,
                            r.target,
                            &r.args,
                            sp,
                            &buckets,
                            &mut children,
                            &mut constructed,
                            limits,
                            &mut staged,
                        )
                    })?;
                }
            }
            // Staging keeps a rule from consuming terms first produced at
            // the current size: children are always strictly smaller.
            let mut added_any = false;
            for (target, term) in staged {
                if insert_bucket(&mut buckets[target], size, term, &mut occupied_sizes[target]) {
                    added_any = true;
                }
            }
            if added_any {
                max_occupied = size;
            }
        }

        Ok(self
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), std::mem::take(&mut buckets[i])))
            .collect())
    }

    /// All accepted terms with at most `max_nodes` nodes, in canonical term
    /// order.
    pub fn enumerate_language(&self, max_nodes: usize, limits: &Limits) -> Result<BTreeSet<Term>> {
        let buckets = self.language_buckets(max_nodes, limits)?;
        let mut out = BTreeSet::new();
        for s in &self.finals {
            if let Some(by_size) = buckets.get(s) {
                for terms in by_size.values() {
                    out.extend(terms.iter().cloned());
                }
            }
        }
        Ok(out)
    }

    /// Classical product automaton: accepts exactly the intersection of the
    /// two languages. Both automata must be over the same alphabet. Product
    /// states are named `(left,right)`.
    pub fn product(&self, other: &TreeAutomaton) -> Result<TreeAutomaton> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch {
                detail: "product needs identical alphabets".to_string(),
            });
        }
        let pair = |l: &State, r: &State| State::new(&format!("({},{})", l.name(), r.name()));
        let mut states = Vec::with_capacity(self.states.len() * other.states.len());
        for l in &self.states {
            for r in &other.states {
                states.push(pair(l, r));
            }
        }
        let mut other_by_symbol: BTreeMap<&str, Vec<&Rule>> = BTreeMap::new();
        for r in &other.rules {
            other_by_symbol.entry(r.symbol().name()).or_default().push(r);
        }
        let mut rules = Vec::new();
        for rl in &self.rules {
            if let Some(partners) = other_by_symbol.get(rl.symbol().name()) {
                for rr in partners {
                    let args = rl
                        .args()
                        .iter()
                        .zip(rr.args())
                        .map(|(a, b)| pair(a, b))
                        .collect();
                    rules.push(Rule::new(
                        rl.symbol().clone(),
                        args,
                        pair(rl.target(), rr.target()),
                    ));
                }
            }
        }
        let mut finals = Vec::new();
        for l in &self.finals {
            for r in &other.finals {
                finals.push(pair(l, r));
            }
        }
        TreeAutomaton::new(self.alphabet.clone(), states, rules, finals)
    }

    /// An equivalent automaton with exactly one final state that never
    /// occurs in an argument position. Every rule targeting an old final
    /// state is copied with a fresh state as target.
    pub fn to_unique_final(&self) -> TreeAutomaton {
        let mut fresh = "qf".to_string();
        let mut tick = 1usize;
        while self.state(&fresh).is_some() {
            tick += 1;
            fresh = format!("qf_{tick}");
        }
        let fresh = State::new(&fresh);
        let mut states = self.states.clone();
        states.push(fresh.clone());
        let mut rules = self.rules.clone();
        for r in &self.rules {
            if self.finals.contains(r.target()) {
                rules.push(Rule::new(
                    r.symbol().clone(),
                    r.args().to_vec(),
                    fresh.clone(),
                ));
            }
        }
        TreeAutomaton::new(self.alphabet.clone(), states, rules, [fresh])
            .expect("retargeting final rules preserves validity")
    }

    /// Rename every state through `f`. The renaming must stay injective.
    pub fn rename_states(&self, f: impl Fn(&str) -> String) -> Result<TreeAutomaton> {
        let mut mapping: HashMap<&State, State> = HashMap::new();
        let mut seen: BTreeSet<String> = BTreeSet::new();
        for s in &self.states {
            let new_name = f(s.name());
            if !seen.insert(new_name.clone()) {
                return Err(Error::malformed(
                    "automaton",
                    format!("state renaming collapses two states onto {new_name}"),
                ));
            }
            mapping.insert(s, State::new(&new_name));
        }
        let states: Vec<State> = self.states.iter().map(|s| mapping[s].clone()).collect();
        let rules: Vec<Rule> = self
            .rules
            .iter()
            .map(|r| {
                Rule::new(
                    r.symbol().clone(),
                    r.args().iter().map(|a| mapping[a].clone()).collect(),
                    mapping[r.target()].clone(),
                )
            })
            .collect();
        let finals: Vec<State> = self.finals.iter().map(|s| mapping[s].clone()).collect();
        TreeAutomaton::new(self.alphabet.clone(), states, rules, finals)
    }

    /// Canonical text form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        push_section(
            &mut out,
            "alphabet",
            self.alphabet.symbols().map(Symbol::to_string),
        );
        push_section(&mut out, "states", self.states.iter().map(State::to_string));
        push_section(&mut out, "final", self.finals.iter().map(State::to_string));
        for r in &self.rules {
            out.push_str("rule: ");
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }

    /// Parse the text form. Sections may appear in any order and may be
    /// split over multiple lines.
    pub fn parse_text(text: &str) -> Result<TreeAutomaton> {
        let (automaton, constraints) = parse_automaton_sections(text)?;
        if let Some((line, _)) = constraints.first() {
            return Err(Error::parse(
                *line,
                "constraint line in a plain automaton file".to_string(),
            ));
        }
        Ok(automaton)
    }
}

fn insert_bucket(
    bucket: &mut BTreeMap<usize, BTreeSet<Term>>,
    size: usize,
    term: Term,
    occupied: &mut Vec<usize>,
) -> bool {
    let inserted = bucket.entry(size).or_default().insert(term);
    if inserted && occupied.last() != Some(&size) {
        occupied.push(size);
    }
    inserted
}

/// Enumerate all ways to give each argument state a size from its occupied
/// size list so that the sizes sum to `total`.
fn enumerate_splits(
    args: &[usize],
    total: usize,
    occupied_sizes: &[Vec<usize>],
    split: &mut Vec<usize>,
    emit: &mut impl FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    if args.is_empty() {
        if total == 0 {
            emit(split)?;
        }
        return Ok(());
    }
    let rest = &args[1..];
    let min_rest = rest.len();
    for &s in &occupied_sizes[args[0]] {
        if s + min_rest > total {
            break;
        }
        split.push(s);
        enumerate_splits(rest, total - s, occupied_sizes, split, emit)?;
        split.pop();
    }
    Ok(())
}

/// Cross product of the child buckets selected by `split`; each constructed
/// term is staged for insertion after the current size pass.
#[allow(clippy::too_many_arguments)]
fn build_products(
    sym: &Symbol,
    target: usize,
    args: &[usize],
    split: &[usize],
    buckets: &[BTreeMap<usize, BTreeSet<Term>>],
    children: &mut Vec<Term>,
    constructed: &mut usize,
    limits: &Limits,
    staged: &mut Vec<(usize, Term)>,
) -> Result<()> {
    if children.len() == args.len() {
        *constructed += 1;
        if *constructed > limits.max_bucket_terms {
            return Err(Error::limit(
                "enumerated terms",
                *constructed,
                limits.max_bucket_terms,
            ));
        }
        staged.push((target, Term::new(sym.clone(), children.clone())));
        return Ok(());
    }
    let i = children.len();
    if let Some(set) = buckets[args[i]].get(&split[i]) {
        for t in set {
            children.push(t.clone());
            build_products(
                sym, target, args, split, buckets, children, constructed, limits, staged,
            )?;
            children.pop();
        }
    }
    Ok(())
}

#[derive(Debug)]
struct RunTree {
    state: usize,
    children: Vec<RunTree>,
}

fn assemble<'a>(
    args: &[usize],
    child_runs: &'a [Vec<RunTree>],
    picked: &mut Vec<&'a RunTree>,
    target: usize,
    out: &mut Vec<RunTree>,
) {
    let i = picked.len();
    if i == args.len() {
        out.push(RunTree {
            state: target,
            children: picked.iter().map(|t| clone_run_tree(t)).collect(),
        });
        return;
    }
    for candidate in &child_runs[i] {
        if candidate.state == args[i] {
            picked.push(candidate);
            assemble(args, child_runs, picked, target, out);
            picked.pop();
        }
    }
}

fn clone_run_tree(t: &RunTree) -> RunTree {
    RunTree {
        state: t.state,
        children: t.children.iter().map(clone_run_tree).collect(),
    }
}

fn collect_labels(
    tree: &RunTree,
    here: &Position,
    states: &[State],
    labels: &mut BTreeMap<Position, State>,
) {
    labels.insert(here.clone(), states[tree.state].clone());
    for (i, c) in tree.children.iter().enumerate() {
        collect_labels(c, &here.child(i as u32 + 1), states, labels);
    }
}

/// A run: a state label for every position of a term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    term: Term,
    labels: BTreeMap<Position, State>,
}

impl Run {
    pub fn new(term: Term, labels: BTreeMap<Position, State>) -> Run {
        Run { term, labels }
    }

    pub fn term(&self) -> &Term {
        &self.term
    }

    /// Labels keyed by position, iterated in position order.
    pub fn labels(&self) -> &BTreeMap<Position, State> {
        &self.labels
    }

    pub fn state_at(&self, pos: &Position) -> Option<&State> {
        self.labels.get(pos)
    }

    pub fn root_state(&self) -> &State {
        &self.labels[&Position::root()]
    }

    /// Does this run label every position of its term and satisfy some rule
    /// at each node?
    pub fn is_valid_for(&self, automaton: &TreeAutomaton) -> bool {
        let positions = self.term.positions();
        if positions.len() != self.labels.len() {
            return false;
        }
        positions.iter().all(|p| {
            let Some(label) = self.labels.get(p) else {
                return false;
            };
            let node = self.term.subterm_at(p).expect("own position");
            let args: Option<Vec<&State>> = (1..=node.children().len() as u32)
                .map(|i| self.labels.get(&p.child(i)))
                .collect();
            let Some(args) = args else {
                return false;
            };
            automaton.rules().iter().any(|r| {
                r.symbol() == node.symbol()
                    && r.target() == label
                    && r.args().iter().zip(&args).all(|(a, b)| &a == b)
            })
        })
    }
}

fn push_section(out: &mut String, key: &str, items: impl Iterator<Item = String>) {
    let body: Vec<String> = items.collect();
    if body.is_empty() {
        out.push_str(key);
        out.push_str(":\n");
    } else {
        out.push_str(key);
        out.push_str(": ");
        out.push_str(&body.join(" "));
        out.push('\n');
    }
}

/// Shared parser for automaton and constrained-automaton files. Returns the
/// automaton plus any `eq:`/`neq:` lines for the caller to interpret.
pub(crate) fn parse_automaton_sections(
    text: &str,
) -> Result<(TreeAutomaton, Vec<(usize, String)>)> {
    let mut arities: BTreeMap<String, usize> = BTreeMap::new();
    let mut states: Vec<State> = Vec::new();
    let mut finals: Vec<(usize, String)> = Vec::new();
    let mut rules: Vec<(usize, Rule)> = Vec::new();
    let mut constraints: Vec<(usize, String)> = Vec::new();

    for (line_no, line) in content_lines(text) {
        let Some((key, body)) = keyword_and_body(line) else {
            return Err(Error::parse(
                line_no,
                format!("expected `key: ...`, got {line:?}"),
            ));
        };
        match key {
            "alphabet" => {
                for tok in body.split_whitespace() {
                    let Some((name, arity)) = tok.rsplit_once('/') else {
                        return Err(Error::parse(
                            line_no,
                            format!("alphabet entry {tok:?} is not name/arity"),
                        ));
                    };
                    if !is_identifier(name) {
                        return Err(Error::parse(line_no, format!("bad symbol name {name:?}")));
                    }
                    let arity: usize = arity
                        .parse()
                        .map_err(|_| Error::parse(line_no, format!("bad arity in {tok:?}")))?;
                    if let Some(&prev) = arities.get(name) {
                        if prev != arity {
                            return Err(Error::parse(
                                line_no,
                                format!("symbol {name} declared with arities {prev} and {arity}"),
                            ));
                        }
                    }
                    arities.insert(name.to_string(), arity);
                }
            }
            "states" => {
                for tok in body.split_whitespace() {
                    if !is_state_name(tok) {
                        return Err(Error::parse(line_no, format!("bad state name {tok:?}")));
                    }
                    states.push(State::new(tok));
                }
            }
            "final" => {
                for tok in body.split_whitespace() {
                    if !is_state_name(tok) {
                        return Err(Error::parse(line_no, format!("bad state name {tok:?}")));
                    }
                    finals.push((line_no, tok.to_string()));
                }
            }
            "rule" => {
                rules.push((line_no, parse_rule(line_no, body)?));
            }
            "eq" | "neq" => {
                constraints.push((line_no, line.to_string()));
            }
            other => {
                return Err(Error::parse(line_no, format!("unknown section {other:?}")));
            }
        }
    }

    let alphabet = RankedAlphabet::new(
        arities
            .iter()
            .map(|(name, &arity)| Symbol::new(name, arity)),
    )
    .expect("arity conflicts are caught during parsing");
    let declared: BTreeSet<&str> = states.iter().map(State::name).collect();
    for (line_no, name) in &finals {
        if !declared.contains(name.as_str()) {
            return Err(Error::parse(
                *line_no,
                format!("final state {name} is not declared"),
            ));
        }
    }
    for (line_no, rule) in &rules {
        for s in rule.args().iter().chain([rule.target()]) {
            if !declared.contains(s.name()) {
                return Err(Error::parse(
                    *line_no,
                    format!("rule uses undeclared state {s}"),
                ));
            }
        }
        match alphabet.get(rule.symbol().name()) {
            Some(declared_sym) if declared_sym == rule.symbol() => {}
            _ => {
                return Err(Error::parse(
                    *line_no,
                    format!("rule uses undeclared symbol {}", rule.symbol()),
                ));
            }
        }
    }
    let automaton = TreeAutomaton::new(
        alphabet,
        states,
        rules.into_iter().map(|(_, r)| r),
        finals.iter().map(|(_, n)| State::new(n)),
    )?;
    Ok((automaton, constraints))
}

fn parse_rule(line_no: usize, body: &str) -> Result<Rule> {
    let (lhs, rhs) = body
        .split_once("->")
        .ok_or_else(|| Error::parse(line_no, "rule needs `->`".to_string()))?;
    let lhs = lhs.trim();
    let target = rhs.trim();
    if !is_state_name(target) {
        return Err(Error::parse(
            line_no,
            format!("bad target state {target:?}"),
        ));
    }

    let (name, args) = match lhs.find('(') {
        None => (lhs, Vec::new()),
        Some(open) => {
            let name = lhs[..open].trim();
            let rest = lhs[open + 1..].trim_end();
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::parse(line_no, "unbalanced rule arguments".to_string()))?;
            let mut args = Vec::new();
            let mut depth = 0i64;
            let mut start = 0usize;
            for (i, c) in inner.char_indices() {
                match c {
                    '(' => depth += 1,
                    ')' => depth -= 1,
                    ',' if depth == 0 => {
                        args.push(inner[start..i].trim().to_string());
                        start = i + 1;
                    }
                    _ => {}
                }
            }
            if depth != 0 {
                return Err(Error::parse(
                    line_no,
                    "unbalanced rule arguments".to_string(),
                ));
            }
            let tail = inner[start..].trim();
            if !tail.is_empty() {
                args.push(tail.to_string());
            } else if !args.is_empty() {
                return Err(Error::parse(line_no, "empty rule argument".to_string()));
            }
            (name, args)
        }
    };
    if !is_identifier(name) {
        return Err(Error::parse(line_no, format!("bad symbol name {name:?}")));
    }
    for a in &args {
        if !is_state_name(a) {
            return Err(Error::parse(line_no, format!("bad argument state {a:?}")));
        }
    }
    Ok(Rule::new(
        Symbol::new(name, args.len()),
        args.iter().map(|a| State::new(a)).collect(),
        State::new(target),
    ))
}
