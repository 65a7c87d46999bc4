//! Tree automata with global equality and disequality constraints.
//!
//! On top of a plain automaton, a [`Taged`] carries two sets of state
//! pairs. A run satisfies the constraints when for every two distinct
//! positions α and β,
//!
//! * if the pair of their states is an `eq` pair, the subterms at α and β
//!   are equal, and
//! * if it is a `neq` pair, the subterms differ.
//!
//! Pairs are unordered and apply to distinct positions only, so a
//! reflexive `neq` pair `(q,q)` is satisfiable by a run in which `q`
//! occurs exactly once.
//!
//! The text format extends the automaton format with one pair per line:
//!
//! ```text
//! eq: q1 q2
//! neq: q3 q3
//! ```

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::automaton::{parse_automaton_sections, Rule, Run, State, TreeAutomaton};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::term::{Position, RankedAlphabet, Symbol, Term};

/// A constrained automaton: base automaton plus unordered `eq`/`neq` state
/// pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Taged {
    base: TreeAutomaton,
    eq: BTreeSet<(State, State)>,
    neq: BTreeSet<(State, State)>,
}

fn norm_pair(a: &State, b: &State) -> (State, State) {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

impl Taged {
    /// Wrap a base automaton with constraint pairs. Every state in a pair
    /// must be declared by the base automaton; pairs are stored unordered.
    pub fn new(
        base: TreeAutomaton,
        eq: impl IntoIterator<Item = (State, State)>,
        neq: impl IntoIterator<Item = (State, State)>,
    ) -> Result<Taged> {
        let check = |pairs: Vec<(State, State)>, kind: &str| -> Result<BTreeSet<(State, State)>> {
            let mut out = BTreeSet::new();
            for (a, b) in pairs {
                for s in [&a, &b] {
                    if base.state(s.name()).is_none() {
                        return Err(Error::malformed(
                            "constraints",
                            format!("{kind} pair mentions undeclared state {s}"),
                        ));
                    }
                }
                out.insert(norm_pair(&a, &b));
            }
            Ok(out)
        };
        let eq = check(eq.into_iter().collect(), "eq")?;
        let neq = check(neq.into_iter().collect(), "neq")?;
        Ok(Taged { base, eq, neq })
    }

    /// A constrained automaton with no constraints at all.
    pub fn unconstrained(base: TreeAutomaton) -> Taged {
        Taged {
            base,
            eq: BTreeSet::new(),
            neq: BTreeSet::new(),
        }
    }

    pub fn base(&self) -> &TreeAutomaton {
        &self.base
    }

    /// Unordered equality pairs, each stored with its smaller state first.
    pub fn eq_pairs(&self) -> &BTreeSet<(State, State)> {
        &self.eq
    }

    /// Unordered disequality pairs, each stored with its smaller state
    /// first.
    pub fn neq_pairs(&self) -> &BTreeSet<(State, State)> {
        &self.neq
    }

    /// The pair of constraint set sizes `(|eq|, |neq|)`.
    pub fn constraint_class(&self) -> (usize, usize) {
        (self.eq.len(), self.neq.len())
    }

    /// States mentioned by any constraint pair.
    pub fn constrained_states(&self) -> BTreeSet<State> {
        self.eq
            .iter()
            .chain(&self.neq)
            .flat_map(|(a, b)| [a.clone(), b.clone()])
            .collect()
    }

    /// Does `run` satisfy every constraint pair? The run is taken as given;
    /// validity for the base automaton is a separate question.
    pub fn satisfies_constraints(&self, run: &Run) -> bool {
        if self.eq.is_empty() && self.neq.is_empty() {
            return true;
        }
        let constrained = self.constrained_states();
        let labeled: Vec<(&Position, &State)> = run
            .labels()
            .iter()
            .filter(|(_, s)| constrained.contains(s))
            .collect();
        for (i, (pa, sa)) in labeled.iter().enumerate() {
            let ta = run.term().subterm_at(pa).expect("label position");
            for (pb, sb) in &labeled[i + 1..] {
                let tb = run.term().subterm_at(pb).expect("label position");
                let pair = norm_pair(sa, sb);
                if self.eq.contains(&pair) && ta != tb {
                    return false;
                }
                if self.neq.contains(&pair) && ta == tb {
                    return false;
                }
            }
        }
        true
    }

    /// The first accepting run that satisfies the constraints, if any.
    /// Deterministic: rule choices are explored in canonical order.
    pub fn accepting_run(&self, term: &Term) -> Result<Option<Run>> {
        let mut steps = 0u64;
        self.accepting_run_capped(term, &mut steps, Limits::default().max_search_steps)
    }

    /// Does some run of the base automaton accept `term` while satisfying
    /// the constraints?
    pub fn accepts(&self, term: &Term) -> Result<bool> {
        Ok(self.accepting_run(term)?.is_some())
    }

    fn accepting_run_capped(
        &self,
        term: &Term,
        steps: &mut u64,
        step_cap: u64,
    ) -> Result<Option<Run>> {
        let reach = self.base.reachable_states(term)?;
        if !reach.iter().any(|s| self.base.finals().contains(s)) {
            return Ok(None);
        }

        let mut nodes: Vec<NodeInfo> = Vec::new();
        collect_postorder(term, Position::root(), &mut nodes);
        let rules_of: BTreeMap<&str, Vec<&Rule>> = {
            let mut m: BTreeMap<&str, Vec<&Rule>> = BTreeMap::new();
            for r in self.base.rules() {
                m.entry(r.symbol().name()).or_default().push(r);
            }
            m
        };
        let constrained = self.constrained_states();
        let mut chosen: Vec<Option<State>> = vec![None; nodes.len()];
        let mut constrained_so_far: Vec<usize> = Vec::new();
        let found = self.assign_states(
            &nodes,
            &rules_of,
            &constrained,
            0,
            &mut chosen,
            &mut constrained_so_far,
            steps,
            step_cap,
        )?;
        if !found {
            return Ok(None);
        }
        let labels: BTreeMap<Position, State> = nodes
            .iter()
            .zip(&chosen)
            .map(|(n, s)| (n.pos.clone(), s.clone().expect("complete assignment")))
            .collect();
        Ok(Some(Run::new(term.clone(), labels)))
    }

    #[allow(clippy::too_many_arguments)]
    fn assign_states(
        &self,
        nodes: &[NodeInfo],
        rules_of: &BTreeMap<&str, Vec<&Rule>>,
        constrained: &BTreeSet<State>,
        i: usize,
        chosen: &mut Vec<Option<State>>,
        constrained_so_far: &mut Vec<usize>,
        steps: &mut u64,
        step_cap: u64,
    ) -> Result<bool> {
        if i == nodes.len() {
            return Ok(true);
        }
        let node = &nodes[i];
        let is_root = i == nodes.len() - 1;
        let Some(candidates) = rules_of.get(node.term.symbol().name()) else {
            return Ok(false);
        };
        'rules: for rule in candidates {
            *steps += 1;
            if *steps > step_cap {
                return Err(Error::limit("search steps", *steps, step_cap));
            }
            let args_match = rule
                .args()
                .iter()
                .zip(&node.child_idxs)
                .all(|(want, &ci)| chosen[ci].as_ref() == Some(want));
            if !args_match {
                continue;
            }
            let target = rule.target();
            if is_root && !self.base.finals().contains(target) {
                continue;
            }
            let target_constrained = constrained.contains(target);
            if target_constrained {
                for &j in constrained_so_far.iter() {
                    let other = chosen[j].as_ref().expect("assigned earlier");
                    let pair = norm_pair(target, other);
                    let equal_terms = node.term == nodes[j].term;
                    if self.eq.contains(&pair) && !equal_terms {
                        continue 'rules;
                    }
                    if self.neq.contains(&pair) && equal_terms {
                        continue 'rules;
                    }
                }
            }
            chosen[i] = Some(target.clone());
            if target_constrained {
                constrained_so_far.push(i);
            }
            if self.assign_states(
                nodes,
                rules_of,
                constrained,
                i + 1,
                chosen,
                constrained_so_far,
                steps,
                step_cap,
            )? {
                return Ok(true);
            }
            if target_constrained {
                constrained_so_far.pop();
            }
            chosen[i] = None;
        }
        Ok(false)
    }

    /// Search for an accepted term with at most `max_nodes` nodes.
    ///
    /// When the equality set is empty and no disequality-constrained state
    /// can reach another one below itself, the search splits each candidate
    /// term into an upper part and independent subterms plugged in at the
    /// constrained positions, which keeps families with many forced-distinct
    /// subterms tractable. Otherwise it falls back to enumerating the base
    /// language and checking each term.
    ///
    /// `Ok(None)` means no accepted term with at most `max_nodes` nodes
    /// exists; it says nothing about larger terms.
    pub fn find_witness(&self, max_nodes: usize, limits: &Limits) -> Result<Option<Term>> {
        if max_nodes > limits.max_nodes {
            return Err(Error::limit("witness node budget", max_nodes, limits.max_nodes));
        }
        if self.eq.is_empty() && !self.neq.is_empty() {
            if let Some(below) = self.incomparable_below_sets() {
                return self.find_witness_by_slots(max_nodes, limits, &below);
            }
        }
        self.find_witness_by_scan(max_nodes, limits)
    }

    /// For each disequality-constrained state, the states that can occur
    /// strictly below it in a run. Returns `None` when some constrained
    /// state can sit above a constrained state, in which case constrained
    /// positions are not guaranteed to be pairwise incomparable.
    fn incomparable_below_sets(&self) -> Option<BTreeMap<State, BTreeSet<State>>> {
        let cs = self.constrained_states();
        let mut rules_by_target: HashMap<&State, Vec<&Rule>> = HashMap::new();
        for r in self.base.rules() {
            rules_by_target.entry(r.target()).or_default().push(r);
        }
        let mut out = BTreeMap::new();
        for c in &cs {
            let mut below: BTreeSet<State> = BTreeSet::new();
            let mut frontier: Vec<&State> = vec![c];
            while let Some(s) = frontier.pop() {
                if let Some(rules) = rules_by_target.get(s) {
                    for r in rules {
                        for a in r.args() {
                            if below.insert(a.clone()) {
                                frontier.push(a);
                            }
                        }
                    }
                }
            }
            if below.intersection(&cs).next().is_some() {
                return None;
            }
            out.insert(c.clone(), below);
        }
        Some(out)
    }

    fn find_witness_by_scan(&self, max_nodes: usize, limits: &Limits) -> Result<Option<Term>> {
        let by_size = final_buckets(&self.base, max_nodes, limits)?;
        let mut steps = 0u64;
        for terms in by_size.values() {
            for t in terms {
                if self
                    .accepting_run_capped(t, &mut steps, limits.max_search_steps)?
                    .is_some()
                {
                    return Ok(Some(t.clone()));
                }
            }
        }
        Ok(None)
    }

    fn find_witness_by_slots(
        &self,
        max_nodes: usize,
        limits: &Limits,
        below: &BTreeMap<State, BTreeSet<State>>,
    ) -> Result<Option<Term>> {
        let base = &self.base;
        let cs: Vec<State> = below.keys().cloned().collect();

        // Candidate subterms per constrained state, from the rules that can
        // appear below it, ordered by size then canonically.
        let mut candidates: BTreeMap<State, Vec<Term>> = BTreeMap::new();
        for c in &cs {
            let mut keep: BTreeSet<State> = below[c].clone();
            keep.insert(c.clone());
            let rules = base
                .rules()
                .iter()
                .filter(|r| {
                    keep.contains(r.target()) && r.args().iter().all(|a| keep.contains(a))
                })
                .cloned();
            let lower = TreeAutomaton::new(
                base.alphabet().clone(),
                keep.iter().cloned(),
                rules,
                [c.clone()],
            )?;
            let buckets = lower.language_buckets(max_nodes, limits)?;
            let mut list: Vec<Term> = Vec::new();
            if let Some(by_size) = buckets.get(c) {
                for terms in by_size.values() {
                    list.extend(terms.iter().cloned());
                }
            }
            candidates.insert(c.clone(), list);
        }

        // Fresh nullary slot symbols, one per constrained state with a
        // nonempty candidate list.
        let mut slot_symbol: BTreeMap<State, Symbol> = BTreeMap::new();
        let mut slot_rules: Vec<Rule> = Vec::new();
        for (i, c) in cs.iter().enumerate() {
            if candidates[c].is_empty() {
                continue;
            }
            let mut name = format!("__slot{i}");
            while base.alphabet().get(&name).is_some() {
                name.push('_');
            }
            let sym = Symbol::new(&name, 0);
            slot_rules.push(Rule::new(sym.clone(), Vec::new(), c.clone()));
            slot_symbol.insert(c.clone(), sym);
        }

        let cs_set: BTreeSet<&State> = cs.iter().collect();
        let upper_alphabet = base
            .alphabet()
            .union(&RankedAlphabet::new(slot_symbol.values().cloned())?)?;
        let upper_rules: Vec<Rule> = base
            .rules()
            .iter()
            .filter(|r| !cs_set.contains(r.target()))
            .cloned()
            .chain(slot_rules)
            .collect();
        let upper = TreeAutomaton::new(
            upper_alphabet,
            base.states().to_vec(),
            upper_rules,
            base.finals().iter().cloned(),
        )?;
        let upper = trim_to_useful(&upper)?;
        let state_of_slot: HashMap<&str, &State> = slot_symbol
            .iter()
            .map(|(c, sym)| (sym.name(), c))
            .collect();

        let contexts = final_buckets(&upper, max_nodes, limits)?;
        let mut steps = 0u64;
        for terms in contexts.values() {
            for ctx in terms {
                steps += 1;
                if steps > limits.max_search_steps {
                    return Err(Error::limit("search steps", steps, limits.max_search_steps));
                }
                if let Some(witness) =
                    self.fill_slots(ctx, &state_of_slot, &candidates, max_nodes, limits, &mut steps)?
                {
                    return Ok(Some(witness));
                }
            }
        }
        Ok(None)
    }

    /// Try to replace every slot leaf of `ctx` with a candidate subterm so
    /// that all disequality pairs hold and the result stays within
    /// `max_nodes` nodes.
    fn fill_slots(
        &self,
        ctx: &Term,
        state_of_slot: &HashMap<&str, &State>,
        candidates: &BTreeMap<State, Vec<Term>>,
        max_nodes: usize,
        limits: &Limits,
        steps: &mut u64,
    ) -> Result<Option<Term>> {
        let mut slots: Vec<(State, Position)> = Vec::new();
        for pos in ctx.positions() {
            let node = ctx.subterm_at(&pos).expect("own position");
            if let Some(state) = state_of_slot.get(node.symbol().name()) {
                slots.push(((*state).clone(), pos));
            }
        }
        if slots.is_empty() {
            return Ok(Some(ctx.clone()));
        }
        // Group slots of the same state together so that candidate choices
        // can be forced (weakly) monotone within a group, cutting symmetric
        // assignments.
        slots.sort();
        let budget = max_nodes - (ctx.node_count() - slots.len());

        let min_size: Vec<usize> = slots
            .iter()
            .map(|(c, _)| candidates[c].first().map(Term::node_count).unwrap_or(0))
            .collect();
        let mut suffix_min: Vec<usize> = vec![0; slots.len() + 1];
        for j in (0..slots.len()).rev() {
            suffix_min[j] = suffix_min[j + 1] + min_size[j];
        }

        let mut assignment: Vec<usize> = Vec::with_capacity(slots.len());
        let found = self.pick_candidates(
            &slots,
            candidates,
            &suffix_min,
            budget,
            0,
            &mut assignment,
            steps,
            limits.max_search_steps,
        )?;
        if !found {
            return Ok(None);
        }
        let mut witness = ctx.clone();
        for ((c, pos), &idx) in slots.iter().zip(&assignment) {
            witness = witness.replace_at(pos, candidates[c][idx].clone())?;
        }
        Ok(Some(witness))
    }

    #[allow(clippy::too_many_arguments)]
    fn pick_candidates(
        &self,
        slots: &[(State, Position)],
        candidates: &BTreeMap<State, Vec<Term>>,
        suffix_min: &[usize],
        budget: usize,
        i: usize,
        assignment: &mut Vec<usize>,
        steps: &mut u64,
        step_cap: u64,
    ) -> Result<bool> {
        if i == slots.len() {
            return Ok(true);
        }
        let (state, _) = &slots[i];
        let list = &candidates[state];
        let same_group = i > 0 && slots[i - 1].0 == *state;
        let reflexive = self.neq.contains(&norm_pair(state, state));
        let mut start = 0usize;
        if same_group {
            start = assignment[i - 1] + usize::from(reflexive);
        }
        if reflexive {
            // The rest of this group needs strictly increasing indices, so
            // there must be enough candidates left to go around.
            let group_rest = slots[i..].iter().take_while(|(c, _)| c == state).count();
            if list.len().saturating_sub(start) < group_rest {
                return Ok(false);
            }
        }
        let used: usize = assignment
            .iter()
            .zip(slots)
            .map(|(&idx, (c, _))| candidates[c][idx].node_count())
            .sum();
        for idx in start..list.len() {
            *steps += 1;
            if *steps > step_cap {
                return Err(Error::limit("search steps", *steps, step_cap));
            }
            let cand = &list[idx];
            if used + cand.node_count() + suffix_min[i + 1] > budget {
                break;
            }
            let clash = assignment.iter().zip(slots).any(|(&j, (d, _))| {
                let other = &candidates[d][j];
                self.neq.contains(&norm_pair(state, d)) && other == cand
            });
            if clash {
                continue;
            }
            assignment.push(idx);
            if self.pick_candidates(
                slots,
                candidates,
                suffix_min,
                budget,
                i + 1,
                assignment,
                steps,
                step_cap,
            )? {
                return Ok(true);
            }
            assignment.pop();
        }
        Ok(false)
    }

    /// Canonical text form: the base automaton followed by one line per
    /// constraint pair.
    pub fn to_text(&self) -> String {
        let mut out = self.base.to_text();
        for (a, b) in &self.eq {
            out.push_str(&format!("eq: {a} {b}\n"));
        }
        for (a, b) in &self.neq {
            out.push_str(&format!("neq: {a} {b}\n"));
        }
        out
    }

    /// Parse the text form. A file without `eq:`/`neq:` lines parses as an
    /// unconstrained automaton.
    pub fn parse_text(text: &str) -> Result<Taged> {
        let (base, raw) = parse_automaton_sections(text)?;
        let mut eq: Vec<(State, State)> = Vec::new();
        let mut neq: Vec<(State, State)> = Vec::new();
        for (line_no, line) in raw {
            let (key, body) = crate::textfmt::keyword_and_body(&line)
                .expect("constraint lines were split once already");
            let toks: Vec<&str> = body.split_whitespace().collect();
            if toks.len() != 2 {
                return Err(Error::parse(
                    line_no,
                    format!("{key} line needs exactly two states, got {}", toks.len()),
                ));
            }
            for t in &toks {
                if base.state(t).is_none() {
                    return Err(Error::parse(
                        line_no,
                        format!("{key} pair mentions undeclared state {t}"),
                    ));
                }
            }
            let pair = (State::new(toks[0]), State::new(toks[1]));
            match key {
                "eq" => eq.push(pair),
                _ => neq.push(pair),
            }
        }
        Taged::new(base, eq, neq)
    }
}

struct NodeInfo {
    pos: Position,
    term: Term,
    child_idxs: Vec<usize>,
}

fn collect_postorder(term: &Term, pos: Position, out: &mut Vec<NodeInfo>) {
    let mut child_idxs = Vec::with_capacity(term.children().len());
    for (i, c) in term.children().iter().enumerate() {
        collect_postorder(c, pos.child(i as u32 + 1), out);
        child_idxs.push(out.len() - 1);
    }
    out.push(NodeInfo {
        pos,
        term: term.clone(),
        child_idxs,
    });
}

/// Accepted terms up to `max_nodes`, grouped by node count.
fn final_buckets(
    automaton: &TreeAutomaton,
    max_nodes: usize,
    limits: &Limits,
) -> Result<BTreeMap<usize, BTreeSet<Term>>> {
    let buckets = automaton.language_buckets(max_nodes, limits)?;
    let mut out: BTreeMap<usize, BTreeSet<Term>> = BTreeMap::new();
    for s in automaton.finals() {
        if let Some(by_size) = buckets.get(s) {
            for (&size, terms) in by_size {
                out.entry(size).or_default().extend(terms.iter().cloned());
            }
        }
    }
    Ok(out)
}

/// Drop states that cannot contribute to any accepted term: keep only
/// states reachable backwards from the final states through rule arguments.
fn trim_to_useful(automaton: &TreeAutomaton) -> Result<TreeAutomaton> {
    let mut useful: BTreeSet<State> = automaton.finals().iter().cloned().collect();
    let mut changed = true;
    while changed {
        changed = false;
        for r in automaton.rules() {
            if useful.contains(r.target()) {
                for a in r.args() {
                    if useful.insert(a.clone()) {
                        changed = true;
                    }
                }
            }
        }
    }
    let rules = automaton
        .rules()
        .iter()
        .filter(|r| useful.contains(r.target()))
        .cloned();
    TreeAutomaton::new(
        automaton.alphabet().clone(),
        useful.iter().cloned(),
        rules,
        automaton.finals().iter().cloned(),
    )
}
