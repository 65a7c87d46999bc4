//! Desk-scale cross-checks for the whole pipeline.
//!
//! Each check sweeps a small input space exhaustively (or, for the
//! constraint semantics, a seeded random sample) and compares a
//! construction against an independent way of computing the same thing:
//! walks come from direct graph search, repeat detection is compared with
//! a direct scan of the comb, acceptance under constraints is compared
//! with filtering all runs. A failed check carries a counterexample.
//!
//! [`verify_graph`] runs the full battery for one graph and renders a
//! plain-text report:
//!
//! ```text
//! LEMMA counter_singleton PASS
//! ...
//! m_G=2
//! bG_count=2
//! hamiltonian=false
//! ALL-PASS
//! ```
//!
//! The individual checks are public, and the ones that take the automaton
//! under test as an argument can be pointed at a deliberately broken
//! variant to confirm the sweep has teeth.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automaton::{Rule, State, TreeAutomaton};
use crate::constrained::Taged;
use crate::error::Result;
use crate::graph::{count_hamiltonian_paths, full_walks, Digraph};
use crate::limits::Limits;
use crate::reduction::{
    a_m_singleton_term, a_m_term_node_count, build_a_m, build_b_g, build_c_g, build_p_g,
    reduce_and_decide, witness_node_budget, DecisionMethod, ReductionBundle,
};
use crate::term::{comb_encode, RankedAlphabet, Symbol, Term};

/// Result of one check: an identifier, a verdict, and on failure a
/// counterexample in text form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaOutcome {
    pub id: &'static str,
    pub passed: bool,
    pub counterexample: Option<String>,
}

impl LemmaOutcome {
    fn pass(id: &'static str) -> LemmaOutcome {
        LemmaOutcome {
            id,
            passed: true,
            counterexample: None,
        }
    }

    fn fail(id: &'static str, counterexample: String) -> LemmaOutcome {
        LemmaOutcome {
            id,
            passed: false,
            counterexample: Some(counterexample),
        }
    }
}

/// Outcomes of the full battery for one graph, plus the headline numbers
/// of the decision itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub outcomes: Vec<LemmaOutcome>,
    pub m_g: BigUint,
    pub b_g_count: BigUint,
    pub hamiltonian: bool,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn failure_count(&self) -> usize {
        self.outcomes.iter().filter(|o| !o.passed).count()
    }

    /// One line per check, the decision numbers, then a final verdict
    /// line: `ALL-PASS`, or `FAILURES=<n>`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for o in &self.outcomes {
            out.push_str("LEMMA ");
            out.push_str(o.id);
            out.push_str(if o.passed { " PASS" } else { " FAIL" });
            if let Some(cx) = &o.counterexample {
                out.push_str(" counterexample: ");
                out.push_str(cx);
            }
            out.push('\n');
        }
        out.push_str(&format!("m_G={}\n", self.m_g));
        out.push_str(&format!("bG_count={}\n", self.b_g_count));
        out.push_str(&format!("hamiltonian={}\n", self.hamiltonian));
        if self.all_passed() {
            out.push_str("ALL-PASS\n");
        } else {
            out.push_str(&format!("FAILURES={}\n", self.failure_count()));
        }
        out
    }
}

/// For each leaf count up to 12, the counting automaton accepts exactly
/// one term and that term has the right number of leaves.
pub fn check_counter_singleton(limits: &Limits) -> Result<LemmaOutcome> {
    const ID: &str = "counter_singleton";
    let leaf = Symbol::new("A", 0);
    for m in 1..=12u64 {
        let m_big = BigUint::from(m);
        let automaton = build_a_m(&m_big)?;
        let term = a_m_singleton_term(&m_big)?;
        if term.count_leaves(&leaf) as u64 != m
            || BigUint::from(term.node_count()) != a_m_term_node_count(&m_big)?
        {
            return Ok(LemmaOutcome::fail(ID, format!("m={m} term {term}")));
        }
        let language = automaton.enumerate_language(term.node_count() + 3, limits)?;
        if language != BTreeSet::from([term.clone()]) {
            return Ok(LemmaOutcome::fail(
                ID,
                format!("m={m} language has {} terms", language.len()),
            ));
        }
    }
    Ok(LemmaOutcome::pass(ID))
}

/// The full-walk automaton accepts exactly the combs that spell the
/// graph's full walks in reverse, as found by direct graph search.
pub fn check_full_walk_combs(graph: &Digraph, limits: &Limits) -> Result<LemmaOutcome> {
    const ID: &str = "full_walk_combs";
    let n = graph.vertex_count();
    let p_g = build_p_g(graph)?;
    let alphabet = p_g.alphabet().clone();
    let expected: BTreeSet<Term> = full_walks(graph, limits)?
        .into_iter()
        .map(|walk| {
            let rev: Vec<&str> = walk.iter().rev().map(String::as_str).collect();
            comb_encode(&rev, &alphabet)
        })
        .collect::<Result<_>>()?;
    let got = p_g.enumerate_language(2 * n - 1, limits)?;
    if got != expected {
        let diff = got
            .symmetric_difference(&expected)
            .next()
            .expect("sets differ");
        return Ok(LemmaOutcome::fail(ID, diff.to_string()));
    }
    Ok(LemmaOutcome::pass(ID))
}

fn comb_sequences(vertices: &[&str], len: usize) -> Vec<Vec<String>> {
    let mut seqs: Vec<Vec<String>> = vec![vec![]];
    for _ in 0..len {
        let mut next = Vec::with_capacity(seqs.len() * vertices.len());
        for seq in &seqs {
            for v in vertices {
                let mut longer = seq.clone();
                longer.push(v.to_string());
                next.push(longer);
            }
        }
        seqs = next;
    }
    seqs
}

/// Sweep every comb of up to five entries over the graph's vertices and
/// compare `detector` against the direct criterion: at least two entries
/// and some entry repeated. Pass the output of [`build_c_g`] here, or a
/// mutated copy to confirm the sweep notices.
pub fn check_repeat_detection(graph: &Digraph, detector: &TreeAutomaton) -> Result<LemmaOutcome> {
    const ID: &str = "repeat_detection";
    let vertices: Vec<&str> = graph.vertices().iter().map(String::as_str).collect();
    for len in 1..=5 {
        for seq in comb_sequences(&vertices, len) {
            let entries: Vec<&str> = seq.iter().map(String::as_str).collect();
            let comb = comb_encode(&entries, detector.alphabet())?;
            let mut dedup = seq.clone();
            dedup.sort();
            dedup.dedup();
            let expected = len >= 2 && dedup.len() < seq.len();
            if detector.accepts(&comb)? != expected {
                return Ok(LemmaOutcome::fail(ID, comb.to_string()));
            }
        }
    }
    Ok(LemmaOutcome::pass(ID))
}

/// The intersection automaton accepts exactly the full-walk combs the
/// repeat detector also accepts, every accepted comb has `2n - 1` nodes,
/// and the count equals full walks minus Hamiltonian paths.
pub fn check_intersection_size(graph: &Digraph, limits: &Limits) -> Result<LemmaOutcome> {
    const ID: &str = "intersection_size";
    let n = graph.vertex_count();
    let c_g = build_c_g(graph)?;
    let p_lang = build_p_g(graph)?.enumerate_language(2 * n - 1, limits)?;
    let b_lang = build_b_g(graph)?.enumerate_language(2 * n - 1, limits)?;
    let mut expected = BTreeSet::new();
    for term in &p_lang {
        if c_g.accepts(term)? {
            expected.insert(term.clone());
        }
    }
    if b_lang != expected {
        let diff = b_lang
            .symmetric_difference(&expected)
            .next()
            .expect("sets differ");
        return Ok(LemmaOutcome::fail(ID, diff.to_string()));
    }
    for term in &b_lang {
        if term.node_count() != 2 * n - 1 {
            return Ok(LemmaOutcome::fail(ID, term.to_string()));
        }
    }
    let walks = crate::graph::count_full_walks(graph);
    let paths = count_hamiltonian_paths(graph, limits)?;
    if BigUint::from(b_lang.len()) != walks - BigUint::from(paths) {
        return Ok(LemmaOutcome::fail(
            ID,
            format!("{} combs for {} walks minus {} paths", b_lang.len(), crate::graph::count_full_walks(graph), paths),
        ));
    }
    Ok(LemmaOutcome::pass(ID))
}

/// Both decision methods agree with a direct permutation search for a
/// Hamiltonian path, and a found witness really is accepted by the
/// instance within the node budget.
pub fn check_instance_emptiness(graph: &Digraph, limits: &Limits) -> Result<LemmaOutcome> {
    const ID: &str = "instance_emptiness";
    let expected = count_hamiltonian_paths(graph, limits)? > 0;
    for method in [DecisionMethod::Counting, DecisionMethod::Search] {
        let decision = reduce_and_decide(graph, method, limits)?;
        if decision.hamiltonian != expected {
            return Ok(LemmaOutcome::fail(
                ID,
                format!("{method:?} decided {} expected {}", decision.hamiltonian, expected),
            ));
        }
        if method == DecisionMethod::Search
            && !decision.hamiltonian
            && !decision.m_g.is_zero()
            && graph.vertex_count() > 1
        {
            let witness = match &decision.witness {
                Some(w) => w,
                None => {
                    return Ok(LemmaOutcome::fail(ID, "no witness for nonempty instance".into()))
                }
            };
            let budget = witness_node_budget(&decision.m_g, graph.vertex_count())?;
            let bundle = ReductionBundle::build(graph)?;
            if BigUint::from(witness.node_count()) > budget || !bundle.d_g.accepts(witness)? {
                return Ok(LemmaOutcome::fail(ID, witness.to_string()));
            }
        }
    }
    Ok(LemmaOutcome::pass(ID))
}

fn semantics_alphabet() -> RankedAlphabet {
    RankedAlphabet::new([
        Symbol::new("A", 0),
        Symbol::new("B", 0),
        Symbol::new("u", 1),
        Symbol::new("f", 2),
    ])
    .expect("fixed alphabet")
}

fn terms_up_to(alphabet: &RankedAlphabet, max_nodes: usize) -> Vec<Term> {
    let mut by_size: Vec<Vec<Term>> = vec![Vec::new(); max_nodes + 1];
    for sym in alphabet.symbols().filter(|s| s.arity() == 0) {
        by_size[1].push(Term::new(sym.clone(), vec![]));
    }
    for size in 2..=max_nodes {
        for sym in alphabet.symbols() {
            match sym.arity() {
                1 => {
                    for child in by_size[size - 1].clone() {
                        by_size[size].push(Term::new(sym.clone(), vec![child]));
                    }
                }
                2 => {
                    for left_size in 1..size - 1 {
                        for left in by_size[left_size].clone() {
                            for right in by_size[size - 1 - left_size].clone() {
                                by_size[size]
                                    .push(Term::new(sym.clone(), vec![left.clone(), right]));
                            }
                        }
                    }
                }
                _ => {}
            }
        }
    }
    by_size.into_iter().flatten().collect()
}

fn random_instance(rng: &mut ChaCha8Rng) -> Taged {
    let alphabet = semantics_alphabet();
    let state_count = rng.gen_range(1..=4usize);
    let states: Vec<State> = (0..state_count)
        .map(|i| State::new(&format!("q{i}")))
        .collect();
    let mut rules = Vec::new();
    for sym in alphabet.symbols() {
        let args_choices: Vec<Vec<State>> = match sym.arity() {
            0 => vec![vec![]],
            1 => states.iter().map(|s| vec![s.clone()]).collect(),
            _ => states
                .iter()
                .flat_map(|a| states.iter().map(move |b| vec![a.clone(), b.clone()]))
                .collect(),
        };
        for args in args_choices {
            for target in &states {
                if rng.gen_bool(0.3) {
                    rules.push(Rule::new(sym.clone(), args.clone(), target.clone()));
                }
            }
        }
    }
    let mut finals: Vec<State> = states.iter().filter(|_| rng.gen_bool(0.4)).cloned().collect();
    if finals.is_empty() {
        finals.push(states[0].clone());
    }
    let pick_pair = |rng: &mut ChaCha8Rng| {
        (
            states[rng.gen_range(0..state_count)].clone(),
            states[rng.gen_range(0..state_count)].clone(),
        )
    };
    let eq: Vec<(State, State)> = if rng.gen_bool(0.3) {
        vec![pick_pair(rng)]
    } else {
        vec![]
    };
    let neq_count = rng.gen_range(0..=2usize);
    let neq: Vec<(State, State)> = (0..neq_count).map(|_| pick_pair(rng)).collect();
    let base = TreeAutomaton::new(alphabet, states, rules, finals).expect("generated automaton");
    Taged::new(base, eq, neq).expect("generated constraints")
}

/// Seeded sweep over random small constrained automata: for every term of
/// up to six nodes, the search-based acceptance must match filtering all
/// runs of the base automaton through the constraint predicate, and a
/// returned run must be a valid, constraint-satisfying run of the term.
pub fn check_constraint_semantics(seed: u64, _limits: &Limits) -> Result<LemmaOutcome> {
    const ID: &str = "constraint_semantics";
    let pool = terms_up_to(&semantics_alphabet(), 6);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..50 {
        let instance = random_instance(&mut rng);
        for term in &pool {
            let runs = instance.base().runs(term)?;
            let expected = runs.iter().any(|r| {
                instance.base().finals().contains(r.root_state())
                    && instance.satisfies_constraints(r)
            });
            let got = instance.accepting_run(term)?;
            if got.is_some() != expected {
                return Ok(LemmaOutcome::fail(
                    ID,
                    format!("seed {seed} case {case} term {term}"),
                ));
            }
            if let Some(run) = got {
                if run.term() != term
                    || !run.is_valid_for(instance.base())
                    || !instance.satisfies_constraints(&run)
                {
                    return Ok(LemmaOutcome::fail(
                        ID,
                        format!("seed {seed} case {case} bad run for {term}"),
                    ));
                }
            }
        }
    }
    Ok(LemmaOutcome::pass(ID))
}

/// Run the whole battery for one graph and collect the decision numbers
/// from the counting method.
pub fn verify_graph(graph: &Digraph, seed: u64, limits: &Limits) -> Result<VerificationReport> {
    let outcomes = vec![
        check_counter_singleton(limits)?,
        check_full_walk_combs(graph, limits)?,
        check_repeat_detection(graph, &build_c_g(graph)?)?,
        check_intersection_size(graph, limits)?,
        check_instance_emptiness(graph, limits)?,
        check_constraint_semantics(seed, limits)?,
    ];
    let decision = reduce_and_decide(graph, DecisionMethod::Counting, limits)?;
    Ok(VerificationReport {
        outcomes,
        m_g: decision.m_g,
        b_g_count: decision.b_g_count,
        hamiltonian: decision.hamiltonian,
    })
}
