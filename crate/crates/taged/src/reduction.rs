//! From a directed graph to a constrained-automaton emptiness question.
//!
//! The pipeline turns "does this graph have a Hamiltonian path" into "is
//! the language of this constrained automaton empty". The pieces:
//!
//! * [`build_a_m`]: an automaton whose language is a single term with
//!   exactly `m` leaves, built from the binary digits of `m`.
//! * [`build_p_g`]: accepts the combs that spell out full walks of the
//!   graph, last vertex outermost.
//! * [`build_c_g`]: accepts the combs of length at least two that repeat
//!   a vertex, regardless of edges.
//! * [`build_b_g`]: the intersection of the two, full walks that are not
//!   Hamiltonian paths.
//! * [`build_d_g`]: plugs [`build_b_g`] into the leaf slot of
//!   [`build_a_m`] for `m` = the number of full walks, and adds one
//!   disequality on the slot state. A term in the language picks `m`
//!   pairwise distinct non-Hamiltonian full walks, which is possible
//!   exactly when no full walk is Hamiltonian.
//!
//! So the instance built by [`build_d_g`] is empty if and only if the
//! graph has a Hamiltonian path, and [`reduce_and_decide`] settles that
//! either by counting or by searching for a witness term.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::automaton::{Rule, State, TreeAutomaton};
use crate::constrained::Taged;
use crate::error::{Error, Result};
use crate::graph::{count_full_walks, Digraph};
use crate::limits::Limits;
use crate::term::{comb_alphabet, vertex_symbol_name, RankedAlphabet, Symbol, Term};

fn counter_alphabet() -> RankedAlphabet {
    RankedAlphabet::new([
        Symbol::new("A", 0),
        Symbol::new("f", 2),
        Symbol::new("g", 3),
    ])
    .expect("fixed alphabet")
}

fn require_positive(m: &BigUint) -> Result<()> {
    if m.is_zero() {
        return Err(Error::Domain(
            "leaf-counting automaton needs a count of at least 1".into(),
        ));
    }
    Ok(())
}

/// Automaton over `A/0, f/2, g/3` whose language is exactly one term, and
/// that term has exactly `m` occurrences of the leaf `A`.
///
/// With the binary digits of `m` written msb first as α_1 ... α_k, state
/// `q{i}` derives exactly one term, with as many leaves as the number
/// α_1 ... α_i denotes: a following 0 digit doubles the count through
/// `f`, a following 1 digit doubles and adds one through `g`, whose third
/// child is the single leaf derived by `q1`. The number of rules is the
/// bit length of `m`, so the automaton stays small even for astronomical
/// counts.
///
/// Fails for `m = 0`: no term over this alphabet has zero leaves.
pub fn build_a_m(m: &BigUint) -> Result<TreeAutomaton> {
    require_positive(m)?;
    let k = m.bits();
    let state = |i: u64| State::new(&format!("q{i}"));
    let mut rules = vec![Rule::new(Symbol::new("A", 0), vec![], state(1))];
    for i in 2..=k {
        let prev = state(i - 1);
        rules.push(if m.bit(k - i) {
            Rule::new(Symbol::new("g", 3), vec![prev.clone(), prev, state(1)], state(i))
        } else {
            Rule::new(Symbol::new("f", 2), vec![prev.clone(), prev], state(i))
        });
    }
    TreeAutomaton::new(
        counter_alphabet(),
        (1..=k).map(state),
        rules,
        [state(k)],
    )
}

/// The unique member of the language of [`build_a_m`], built directly.
///
/// Beware that the term has between `m` and `4m` nodes, so this
/// materializes something linear in `m` even though the automaton itself
/// is logarithmic.
pub fn a_m_singleton_term(m: &BigUint) -> Result<Term> {
    require_positive(m)?;
    let k = m.bits();
    let leaf = Term::new(Symbol::new("A", 0), vec![]);
    let mut t = leaf.clone();
    for i in 2..=k {
        t = if m.bit(k - i) {
            Term::new(Symbol::new("g", 3), vec![t.clone(), t, leaf.clone()])
        } else {
            Term::new(Symbol::new("f", 2), vec![t.clone(), t])
        };
    }
    Ok(t)
}

/// Node count of [`a_m_singleton_term`] without building the term.
pub fn a_m_term_node_count(m: &BigUint) -> Result<BigUint> {
    require_positive(m)?;
    let k = m.bits();
    let mut nodes = BigUint::one();
    for i in 2..=k {
        nodes = &nodes * 2u32 + if m.bit(k - i) { 2u32 } else { 1u32 };
    }
    Ok(nodes)
}

fn walk_state(w: &str, i: usize) -> State {
    State::new(&format!("pg.q_{w}_{i}"))
}

/// Automaton over the comb alphabet of the graph's vertices accepting
/// exactly the combs that spell a full walk in reverse: the comb
/// `[w_n, ..., w_1]` (first entry outermost) is accepted when
/// `w_1 ... w_n` is a walk through all `n = |vertices|` steps.
///
/// State `pg.q_{w}_{i}` derives the combs of `i + 1` entries that spell a
/// walk ending at `w`.
pub fn build_p_g(graph: &Digraph) -> Result<TreeAutomaton> {
    let n = graph.vertex_count();
    let alphabet = comb_alphabet(graph.vertices().iter().map(String::as_str))?;
    let h = Symbol::new("h", 2);
    let mut rules = Vec::new();
    for w in graph.vertices() {
        rules.push(Rule::new(
            Symbol::new(&vertex_symbol_name(w), 0),
            vec![],
            walk_state(w, 0),
        ));
    }
    for i in 0..n.saturating_sub(1) {
        for (w, v) in graph.edges() {
            rules.push(Rule::new(
                h.clone(),
                vec![walk_state(v, 0), walk_state(w, i)],
                walk_state(v, i + 1),
            ));
        }
    }
    let states = graph
        .vertices()
        .iter()
        .flat_map(|w| (0..n).map(move |i| walk_state(w, i)));
    let finals: Vec<State> = graph
        .vertices()
        .iter()
        .map(|w| walk_state(w, n - 1))
        .collect();
    TreeAutomaton::new(alphabet, states, rules, finals)
}

/// Automaton over the comb alphabet of the graph's vertices accepting
/// exactly the combs of length at least two in which some vertex occurs
/// twice. Edges play no role here.
///
/// The states: `cg.p0` derives any single leaf, `cg.p1` any comb of two
/// or more entries, `cg.p_{w}` the single leaf for `w`, `cg.pp_{w}` any
/// comb containing `w`, and the final `cg.pf` any comb with a repeat. A
/// repeat is caught at its earliest occurrence, where the leaf for `w`
/// meets a tail already containing `w`.
pub fn build_c_g(graph: &Digraph) -> Result<TreeAutomaton> {
    let alphabet = comb_alphabet(graph.vertices().iter().map(String::as_str))?;
    let h = Symbol::new("h", 2);
    let p0 = State::new("cg.p0");
    let p1 = State::new("cg.p1");
    let pf = State::new("cg.pf");
    let seen = |w: &str| State::new(&format!("cg.pp_{w}"));
    let at = |w: &str| State::new(&format!("cg.p_{w}"));
    let mut states = vec![p0.clone(), p1.clone(), pf.clone()];
    let mut rules = vec![
        Rule::new(h.clone(), vec![p0.clone(), p0.clone()], p1.clone()),
        Rule::new(h.clone(), vec![p0.clone(), p1.clone()], p1.clone()),
        Rule::new(h.clone(), vec![p0.clone(), pf.clone()], pf.clone()),
    ];
    for w in graph.vertices() {
        let leaf = Symbol::new(&vertex_symbol_name(w), 0);
        states.push(at(w));
        states.push(seen(w));
        rules.push(Rule::new(leaf.clone(), vec![], p0.clone()));
        rules.push(Rule::new(leaf.clone(), vec![], at(w)));
        rules.push(Rule::new(leaf, vec![], seen(w)));
        rules.push(Rule::new(h.clone(), vec![at(w), p0.clone()], seen(w)));
        rules.push(Rule::new(h.clone(), vec![at(w), p1.clone()], seen(w)));
        rules.push(Rule::new(h.clone(), vec![p0.clone(), seen(w)], seen(w)));
        rules.push(Rule::new(h.clone(), vec![at(w), seen(w)], pf.clone()));
    }
    TreeAutomaton::new(alphabet, states, rules, [pf])
}

/// Intersection of [`build_c_g`] and [`build_p_g`] with a single final
/// state: accepts exactly the combs of full walks that repeat a vertex,
/// in other words the full walks that are not Hamiltonian paths. Every
/// accepted comb has exactly `2n - 1` nodes. States carry a `bg.` prefix
/// and the lone final state is `bg.qf`.
pub fn build_b_g(graph: &Digraph) -> Result<TreeAutomaton> {
    combine_walks_and_repeats(&build_c_g(graph)?, &build_p_g(graph)?)
}

fn combine_walks_and_repeats(
    c_g: &TreeAutomaton,
    p_g: &TreeAutomaton,
) -> Result<TreeAutomaton> {
    c_g.product(p_g)?
        .to_unique_final()
        .rename_states(|name| format!("bg.{name}"))
}

/// Constrained instance that is empty if and only if the graph has a
/// Hamiltonian path. Fails when the graph has no full walk at all, since
/// then there is no leaf count to build the skeleton from.
///
/// The base automaton is [`build_a_m`] for `m` = the full-walk count,
/// with its leaf rule removed and the final state of [`build_b_g`] merged
/// into the leaf state `q1`, so each of the `m` leaf slots of the
/// skeleton must hold a non-Hamiltonian full walk. The one disequality
/// pair `(q1, q1)` forces the slots to hold pairwise distinct combs,
/// which is possible exactly when there are at least `m` of them, i.e.
/// when no full walk is a Hamiltonian path.
///
/// The instance stays polynomial in the graph: with `n` vertices, `e`
/// edges, and `k` the bit length of the full-walk count, the base
/// automaton has exactly `(2n + 3)·n² + k` states and at most
/// `(k - 1) + (7n + 3)·(n + (n - 1)·e)` rules.
pub fn build_d_g(graph: &Digraph) -> Result<Taged> {
    let m_g = count_full_walks(graph);
    require_positive(&m_g)?;
    assemble_instance(&build_a_m(&m_g)?, &build_b_g(graph)?)
}

fn assemble_instance(a_m: &TreeAutomaton, b_g: &TreeAutomaton) -> Result<Taged> {
    let q1 = State::new("q1");
    assert_eq!(b_g.finals().len(), 1);
    let slot_source = b_g.finals().iter().next().expect("unique final").clone();
    let mut rules = Vec::new();
    for r in a_m.rules() {
        if r.symbol().name() == "A" {
            assert_eq!(*r.target(), q1);
        } else {
            rules.push(r.clone());
        }
    }
    for r in b_g.rules() {
        assert!(!r.args().contains(&slot_source));
        if *r.target() == slot_source {
            rules.push(Rule::new(r.symbol().clone(), r.args().to_vec(), q1.clone()));
        } else {
            rules.push(r.clone());
        }
    }
    let states: Vec<State> = a_m
        .states()
        .iter()
        .chain(b_g.states().iter().filter(|s| **s != slot_source))
        .cloned()
        .collect();
    let expected = a_m.states().len() + b_g.states().len() - 1;
    let base = TreeAutomaton::new(
        a_m.alphabet().union(b_g.alphabet())?,
        states,
        rules,
        a_m.finals().iter().cloned(),
    )?;
    assert_eq!(base.states().len(), expected);
    for r in base.rules() {
        if *r.target() == q1 {
            assert!(r.args().iter().all(|s| s.name().starts_with("bg.")));
        }
    }
    Taged::new(base, [], [(q1.clone(), q1)])
}

/// Upper bound on the node count of a member of the instance language,
/// should one exist: the skeleton with each of its `m` leaves replaced by
/// a comb of `2n - 1` nodes.
pub fn witness_node_budget(m_g: &BigUint, vertex_count: usize) -> Result<BigUint> {
    let skeleton = a_m_term_node_count(m_g)?;
    let comb = BigUint::from(2 * vertex_count - 1);
    Ok(skeleton - m_g + m_g * comb)
}

/// Everything [`build_d_g`] produces along the way, kept for inspection.
#[derive(Debug, Clone)]
pub struct ReductionBundle {
    pub graph: Digraph,
    pub m_g: BigUint,
    pub a_m: TreeAutomaton,
    pub p_g: TreeAutomaton,
    pub c_g: TreeAutomaton,
    pub b_g: TreeAutomaton,
    pub d_g: Taged,
}

impl ReductionBundle {
    /// Run the whole construction on one graph. Fails when the graph has
    /// no full walk.
    pub fn build(graph: &Digraph) -> Result<ReductionBundle> {
        let n = graph.vertex_count();
        let m_g = count_full_walks(graph);
        require_positive(&m_g)?;
        let a_m = build_a_m(&m_g)?;
        let p_g = build_p_g(graph)?;
        let c_g = build_c_g(graph)?;
        let b_g = combine_walks_and_repeats(&c_g, &p_g)?;
        let d_g = assemble_instance(&a_m, &b_g)?;
        let bits = usize::try_from(m_g.bits()).expect("bit length fits");
        assert_eq!(d_g.base().states().len(), (2 * n + 3) * n * n + bits);
        Ok(ReductionBundle {
            graph: graph.clone(),
            m_g,
            a_m,
            p_g,
            c_g,
            b_g,
            d_g,
        })
    }
}

/// How [`reduce_and_decide`] settles emptiness of the instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecisionMethod {
    /// Compare the full-walk count against the size of the language of
    /// [`build_b_g`]: the instance is nonempty exactly when the two are
    /// equal.
    Counting,
    /// Search for a member of the instance language within the node
    /// budget of [`witness_node_budget`].
    Search,
}

/// Outcome of [`reduce_and_decide`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    /// Whether the graph has a Hamiltonian path.
    pub hamiltonian: bool,
    /// Number of full walks.
    pub m_g: BigUint,
    /// Number of distinct combs accepted by [`build_b_g`].
    pub b_g_count: BigUint,
    /// A member of the instance language, when the search method ran and
    /// found one. Its existence refutes a Hamiltonian path.
    pub witness: Option<Term>,
    pub method: DecisionMethod,
}

/// Decide Hamiltonian-path existence for the graph through the automaton
/// pipeline.
///
/// Two degenerate cases skip the construction: a single-vertex graph
/// always has the one-vertex path, and a graph with no full walk at all
/// has no Hamiltonian path either. Everything else builds the bundle and
/// settles emptiness by the chosen method. Graphs larger than
/// `limits.max_vertices` are refused up front, and the search method
/// refuses budgets beyond `limits.max_nodes` rather than thrash.
pub fn reduce_and_decide(
    graph: &Digraph,
    method: DecisionMethod,
    limits: &Limits,
) -> Result<Decision> {
    let n = graph.vertex_count();
    if n > limits.max_vertices {
        return Err(Error::limit("graph vertices", n, limits.max_vertices));
    }
    let m_g = count_full_walks(graph);
    if n == 1 {
        return Ok(Decision {
            hamiltonian: true,
            m_g,
            b_g_count: BigUint::zero(),
            witness: None,
            method,
        });
    }
    if m_g.is_zero() {
        return Ok(Decision {
            hamiltonian: false,
            m_g,
            b_g_count: BigUint::zero(),
            witness: None,
            method,
        });
    }
    let bundle = ReductionBundle::build(graph)?;
    let b_g_count = BigUint::from(
        bundle
            .b_g
            .enumerate_language(2 * n - 1, limits)?
            .len(),
    );
    let (hamiltonian, witness) = match method {
        DecisionMethod::Counting => (b_g_count < m_g, None),
        DecisionMethod::Search => {
            let budget = witness_node_budget(&m_g, n)?;
            if budget > BigUint::from(limits.max_nodes) {
                return Err(Error::limit("witness node budget", &budget, limits.max_nodes));
            }
            let budget = usize::try_from(&budget).expect("budget fits");
            let witness = bundle.d_g.find_witness(budget, limits)?;
            (witness.is_none(), witness)
        }
    };
    Ok(Decision {
        hamiltonian,
        m_g,
        b_g_count,
        witness,
        method,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::count_hamiltonian_paths;
    use crate::term::comb_encode;
    use std::collections::BTreeSet;

    fn limits() -> Limits {
        Limits::default()
    }

    fn big(m: u64) -> BigUint {
        BigUint::from(m)
    }

    fn three_cycle() -> Digraph {
        Digraph::new(["1", "2", "3"], [("1", "2"), ("2", "3"), ("3", "1")]).unwrap()
    }

    fn two_cycle_plus_isolated() -> Digraph {
        Digraph::new(["1", "2", "3"], [("1", "2"), ("2", "1")]).unwrap()
    }

    fn k4() -> Digraph {
        let vs = ["1", "2", "3", "4"];
        let mut edges = Vec::new();
        for u in vs {
            for v in vs {
                if u != v {
                    edges.push((u, v));
                }
            }
        }
        Digraph::new(vs, edges).unwrap()
    }

    #[test]
    fn counter_rejects_zero() {
        assert!(matches!(build_a_m(&BigUint::zero()), Err(Error::Domain(_))));
        assert!(a_m_singleton_term(&BigUint::zero()).is_err());
        assert!(a_m_term_node_count(&BigUint::zero()).is_err());
        assert!(witness_node_budget(&BigUint::zero(), 3).is_err());
    }

    #[test]
    fn counter_for_one_leaf() {
        let a = build_a_m(&big(1)).unwrap();
        assert_eq!(a.states().len(), 1);
        assert_eq!(a.rules().len(), 1);
        let term = a_m_singleton_term(&big(1)).unwrap();
        assert_eq!(term.to_string(), "A");
        assert_eq!(
            a.enumerate_language(4, &limits()).unwrap(),
            BTreeSet::from([term])
        );
    }

    #[test]
    fn counter_for_five_leaves() {
        let a = build_a_m(&big(5)).unwrap();
        let shown: Vec<String> = a.rules().iter().map(|r| r.to_string()).collect();
        assert_eq!(
            shown,
            [
                "A() -> q1",
                "f(q1,q1) -> q2",
                "g(q2,q2,q1) -> q3",
            ]
        );
        assert_eq!(a.finals().iter().next().unwrap().name(), "q3");
        let term = a_m_singleton_term(&big(5)).unwrap();
        assert_eq!(term.to_string(), "g(f(A,A),f(A,A),A)");
        assert_eq!(term.count_leaves(&Symbol::new("A", 0)), 5);
        assert_eq!(term.node_count(), 8);
        assert_eq!(a_m_term_node_count(&big(5)).unwrap(), big(8));
        assert!(a.accepts(&term).unwrap());
    }

    #[test]
    fn counter_digit_cases() {
        let cases = [
            (2, "f(A,A)"),
            (3, "g(A,A,A)"),
            (4, "f(f(A,A),f(A,A))"),
            (6, "f(g(A,A,A),g(A,A,A))"),
        ];
        for (m, expected) in cases {
            assert_eq!(a_m_singleton_term(&big(m)).unwrap().to_string(), expected);
        }
    }

    #[test]
    fn counter_language_is_a_singleton() {
        let leaf = Symbol::new("A", 0);
        for m in 1..=20u64 {
            let a = build_a_m(&big(m)).unwrap();
            let term = a_m_singleton_term(&big(m)).unwrap();
            assert_eq!(term.count_leaves(&leaf) as u64, m);
            assert_eq!(big(term.node_count() as u64), a_m_term_node_count(&big(m)).unwrap());
            assert!(term.node_count() as u64 <= 4 * m);
            assert_eq!(
                a.enumerate_language(term.node_count() + 3, &limits()).unwrap(),
                BTreeSet::from([term])
            );
        }
    }

    #[test]
    fn full_walk_combs_of_three_cycle() {
        let p = build_p_g(&three_cycle()).unwrap();
        assert_eq!(p.states().len(), 9);
        assert_eq!(p.finals().len(), 3);
        let expected: BTreeSet<Term> = [
            "h(A_3,h(A_2,A_1))",
            "h(A_1,h(A_3,A_2))",
            "h(A_2,h(A_1,A_3))",
        ]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
        assert_eq!(p.enumerate_language(5, &limits()).unwrap(), expected);
    }

    #[test]
    fn full_walk_combs_match_walk_list() {
        for graph in [three_cycle(), two_cycle_plus_isolated(), k4()] {
            let n = graph.vertex_count();
            let p = build_p_g(&graph).unwrap();
            let alphabet = p.alphabet().clone();
            let expected: BTreeSet<Term> = crate::graph::full_walks(&graph, &limits())
                .unwrap()
                .into_iter()
                .map(|walk| {
                    let rev: Vec<&str> = walk.iter().rev().map(String::as_str).collect();
                    comb_encode(&rev, &alphabet).unwrap()
                })
                .collect();
            assert_eq!(p.enumerate_language(2 * n - 1, &limits()).unwrap(), expected);
        }
    }

    fn all_combs(vertices: &[&str], len: usize) -> Vec<Vec<String>> {
        if len == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for shorter in all_combs(vertices, len - 1) {
            for v in vertices {
                let mut seq = shorter.clone();
                seq.push(v.to_string());
                out.push(seq);
            }
        }
        out
    }

    #[test]
    fn repeat_detector_shape() {
        let c = build_c_g(&two_cycle_plus_isolated()).unwrap();
        assert_eq!(c.states().len(), 2 * 3 + 3);
        assert_eq!(c.rules().len(), 7 * 3 + 3);
        assert_eq!(c.finals().iter().next().unwrap().name(), "cg.pf");
    }

    #[test]
    fn repeat_detector_characterization() {
        let graph = Digraph::new(["1", "2"], [] as [(&str, &str); 0]).unwrap();
        let c = build_c_g(&graph).unwrap();
        let alphabet = c.alphabet().clone();
        for len in 1..=4 {
            for seq in all_combs(&["1", "2"], len) {
                let entries: Vec<&str> = seq.iter().map(String::as_str).collect();
                let comb = comb_encode(&entries, &alphabet).unwrap();
                let mut sorted = seq.clone();
                sorted.sort();
                sorted.dedup();
                let has_repeat = sorted.len() < seq.len();
                assert_eq!(
                    c.accepts(&comb).unwrap(),
                    len >= 2 && has_repeat,
                    "comb {comb}"
                );
                let reached = c.reachable_states(&comb).unwrap();
                assert_eq!(reached.contains(&State::new("cg.p1")), len >= 2);
                assert_eq!(
                    reached.contains(&State::new("cg.pp_1")),
                    seq.contains(&"1".to_string())
                );
            }
        }
    }

    #[test]
    fn non_hamiltonian_walks_of_cycle_are_none() {
        assert!(build_b_g(&three_cycle()).unwrap().is_empty());
    }

    #[test]
    fn non_hamiltonian_walks_of_two_cycle() {
        let b = build_b_g(&two_cycle_plus_isolated()).unwrap();
        let expected: BTreeSet<Term> = ["h(A_1,h(A_2,A_1))", "h(A_2,h(A_1,A_2))"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        let language = b.enumerate_language(5, &limits()).unwrap();
        assert_eq!(language, expected);
        for term in &language {
            assert_eq!(term.node_count(), 5);
        }
    }

    #[test]
    fn non_hamiltonian_count_is_walks_minus_paths() {
        for graph in [three_cycle(), two_cycle_plus_isolated(), k4()] {
            let n = graph.vertex_count();
            let b = build_b_g(&graph).unwrap();
            let count = b.enumerate_language(2 * n - 1, &limits()).unwrap().len() as u64;
            let walks = count_full_walks(&graph);
            let paths = count_hamiltonian_paths(&graph, &limits()).unwrap();
            assert_eq!(big(count), walks - big(paths));
        }
    }

    #[test]
    fn instance_shape() {
        let bundle = ReductionBundle::build(&two_cycle_plus_isolated()).unwrap();
        assert_eq!(bundle.m_g, big(2));
        let d = &bundle.d_g;
        assert_eq!(d.constraint_class(), (0, 1));
        assert_eq!(
            d.neq_pairs().iter().next().unwrap(),
            &(State::new("q1"), State::new("q1"))
        );
        let finals: Vec<&str> = d.base().finals().iter().map(|s| s.name()).collect();
        assert_eq!(finals, ["q2"]);
        assert_eq!(d.base().states().len(), (2 * 3 + 3) * 9 + 2);
        for name in ["A", "f", "g", "h", "A_1", "A_2", "A_3"] {
            assert!(d.base().alphabet().get(name).is_some(), "missing {name}");
        }
    }

    #[test]
    fn instance_witness_for_two_cycle() {
        let bundle = ReductionBundle::build(&two_cycle_plus_isolated()).unwrap();
        let budget = witness_node_budget(&bundle.m_g, 3).unwrap();
        assert_eq!(budget, big(11));
        assert!(budget <= big(13));
        let witness = bundle.d_g.find_witness(11, &limits()).unwrap().unwrap();
        assert_eq!(witness.node_count(), 11);
        assert!(bundle.d_g.accepts(&witness).unwrap());
        assert!(bundle.d_g.find_witness(10, &limits()).unwrap().is_none());
    }

    #[test]
    fn instance_empty_for_three_cycle() {
        let bundle = ReductionBundle::build(&three_cycle()).unwrap();
        let budget = witness_node_budget(&bundle.m_g, 3).unwrap();
        assert_eq!(budget, big(16));
        assert!(bundle
            .d_g
            .find_witness(usize::try_from(&budget).unwrap(), &limits())
            .unwrap()
            .is_none());
    }

    #[test]
    fn instance_rejected_without_walks() {
        let graph = Digraph::new(["1", "2"], [] as [(&str, &str); 0]).unwrap();
        assert!(matches!(build_d_g(&graph), Err(Error::Domain(_))));
        assert!(ReductionBundle::build(&graph).is_err());
    }

    #[test]
    fn decide_agrees_with_permutation_search_on_tiny_graphs() {
        let mut graphs = vec![
            Digraph::new(["1"], [] as [(&str, &str); 0]).unwrap(),
            Digraph::new(["1"], [("1", "1")]).unwrap(),
        ];
        let pairs = [("1", "1"), ("1", "2"), ("2", "1"), ("2", "2")];
        for mask in 0..16u32 {
            let edges: Vec<(&str, &str)> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, e)| *e)
                .collect();
            graphs.push(Digraph::new(["1", "2"], edges).unwrap());
        }
        for graph in graphs {
            let expected = count_hamiltonian_paths(&graph, &limits()).unwrap() > 0;
            for method in [DecisionMethod::Counting, DecisionMethod::Search] {
                let decision = reduce_and_decide(&graph, method, &limits()).unwrap();
                assert_eq!(decision.hamiltonian, expected, "graph {graph:?} {method:?}");
                if method == DecisionMethod::Search
                    && !decision.hamiltonian
                    && !decision.m_g.is_zero()
                    && graph.vertex_count() > 1
                {
                    let witness = decision.witness.expect("witness for nonempty instance");
                    assert!(ReductionBundle::build(&graph)
                        .unwrap()
                        .d_g
                        .accepts(&witness)
                        .unwrap());
                }
            }
        }
    }

    #[test]
    fn decide_reports_counts() {
        let d = reduce_and_decide(
            &two_cycle_plus_isolated(),
            DecisionMethod::Counting,
            &limits(),
        )
        .unwrap();
        assert!(!d.hamiltonian);
        assert_eq!(d.m_g, big(2));
        assert_eq!(d.b_g_count, big(2));
        assert!(d.witness.is_none());

        let d = reduce_and_decide(
            &two_cycle_plus_isolated(),
            DecisionMethod::Search,
            &limits(),
        )
        .unwrap();
        assert!(!d.hamiltonian);
        assert_eq!(d.witness.as_ref().unwrap().node_count(), 11);

        let d = reduce_and_decide(&three_cycle(), DecisionMethod::Search, &limits()).unwrap();
        assert!(d.hamiltonian);
        assert_eq!(d.m_g, big(3));
        assert_eq!(d.b_g_count, big(0));
        assert!(d.witness.is_none());
    }

    #[test]
    fn decide_on_two_cycle_with_two_isolated() {
        let graph = Digraph::new(["1", "2", "3", "4"], [("1", "2"), ("2", "1")]).unwrap();
        for method in [DecisionMethod::Counting, DecisionMethod::Search] {
            let d = reduce_and_decide(&graph, method, &limits()).unwrap();
            assert!(!d.hamiltonian);
            assert_eq!(d.m_g, big(2));
            assert_eq!(d.b_g_count, big(2));
        }
        let d = reduce_and_decide(&graph, DecisionMethod::Search, &limits()).unwrap();
        assert_eq!(d.witness.unwrap().node_count(), 15);
    }

    #[test]
    fn decide_single_vertex() {
        for edges in [vec![], vec![("1", "1")]] {
            let graph = Digraph::new(["1"], edges).unwrap();
            for method in [DecisionMethod::Counting, DecisionMethod::Search] {
                let d = reduce_and_decide(&graph, method, &limits()).unwrap();
                assert!(d.hamiltonian);
                assert_eq!(d.m_g, big(1));
                assert_eq!(d.b_g_count, big(0));
            }
        }
    }

    #[test]
    fn decide_respects_vertex_cap() {
        let err = reduce_and_decide(
            &k4(),
            DecisionMethod::Counting,
            &limits().with_max_vertices(3),
        )
        .unwrap_err();
        assert!(matches!(err, Error::ResourceLimit { .. }));
    }

    #[test]
    fn decide_k4_both_methods() {
        for method in [DecisionMethod::Counting, DecisionMethod::Search] {
            let d = reduce_and_decide(&k4(), method, &limits()).unwrap();
            assert!(d.hamiltonian, "{method:?}");
            assert_eq!(d.m_g, big(108));
            assert_eq!(d.b_g_count, big(84));
            assert!(d.witness.is_none());
        }
    }
}
