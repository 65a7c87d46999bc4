//! Acceptance suite: one test per criterion, each sweeping its input
//! population against an independent oracle and printing a timed
//! `ACCEPTANCE C<n> <name> PASS` line on success (visible with
//! `--nocapture`).

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

use taged::{
    build_a_m, build_b_g, build_c_g, build_p_g, comb_encode, count_full_walks,
    count_hamiltonian_paths, full_walks, reduce_and_decide, Digraph, DecisionMethod, Limits,
    Position, RankedAlphabet, ReductionBundle, Rule, Run, State, Symbol, Taged, Term,
    TreeAutomaton,
};

fn limits() -> Limits {
    Limits::default()
}

fn pass(line: &str, start: Instant) {
    println!("ACCEPTANCE {line} PASS ({:.2?})", start.elapsed());
}

/// All 512 digraphs on vertices {1,2,3}, self-loops included.
fn all_graphs_on_three() -> Vec<Digraph> {
    let vs = ["1", "2", "3"];
    let pairs: Vec<(&str, &str)> = vs
        .iter()
        .flat_map(|u| vs.iter().map(move |v| (*u, *v)))
        .collect();
    (0..1u32 << pairs.len())
        .map(|mask| {
            let edges: Vec<(&str, &str)> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, e)| *e)
                .collect();
            Digraph::new(vs, edges).unwrap()
        })
        .collect()
}

/// Every digraph with at most three vertices: both one-vertex graphs, all
/// 16 two-vertex graphs, all 512 three-vertex graphs.
fn all_graphs_up_to_three() -> Vec<Digraph> {
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
    graphs.extend(all_graphs_on_three());
    graphs
}

/// Seeded random digraphs with 4 or 5 vertices, each possible edge
/// (self-loops included) present with probability one half.
fn seeded_graphs(seed: u64, count: usize) -> Vec<Digraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(4..=5usize);
            let vertices: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
            let mut edges = Vec::new();
            for u in &vertices {
                for v in &vertices {
                    if rng.gen_bool(0.5) {
                        edges.push((u.clone(), v.clone()));
                    }
                }
            }
            Digraph::new(vertices, edges).unwrap()
        })
        .collect()
}

fn reversed_walk_combs(graph: &Digraph, alphabet: &RankedAlphabet) -> BTreeSet<Term> {
    full_walks(graph, &limits())
        .unwrap()
        .into_iter()
        .map(|walk| {
            let rev: Vec<&str> = walk.iter().rev().map(String::as_str).collect();
            comb_encode(&rev, alphabet).unwrap()
        })
        .collect()
}

#[test]
fn acceptance_c1_counter_singletons() {
    let start = Instant::now();
    let leaf = Symbol::new("A", 0);
    for m in 1..=64u64 {
        let automaton = build_a_m(&BigUint::from(m)).unwrap();
        let language = automaton
            .enumerate_language(4 * m as usize, &limits())
            .unwrap();
        assert_eq!(language.len(), 1, "m={m}: language not a singleton");
        let term = language.into_iter().next().unwrap();
        let leaf_positions = term
            .positions()
            .iter()
            .filter(|p| term.subterm_at(p).unwrap().children().is_empty())
            .count() as u64;
        assert_eq!(term.count_leaves(&leaf) as u64, m, "m={m}");
        assert_eq!(leaf_positions, m, "m={m}: some leaf is not A");
    }
    pass("C1 counter-singletons", start);
}

#[test]
fn acceptance_c2_walk_counts() {
    let start = Instant::now();
    let mut population = all_graphs_on_three();
    population.extend(seeded_graphs(202, 200));
    for graph in &population {
        let listed = full_walks(graph, &limits()).unwrap();
        assert_eq!(
            count_full_walks(graph),
            BigUint::from(listed.len()),
            "{graph:?}"
        );
    }
    pass("C2 walk-counts", start);
}

#[test]
fn acceptance_c3_full_walk_combs() {
    let start = Instant::now();
    let mut population = all_graphs_on_three();
    population.extend(seeded_graphs(202, 200));
    for graph in &population {
        let n = graph.vertex_count();
        let p_g = build_p_g(graph).unwrap();
        let language = p_g.enumerate_language(2 * n - 1, &limits()).unwrap();
        assert_eq!(
            language,
            reversed_walk_combs(graph, p_g.alphabet()),
            "{graph:?}"
        );
    }
    pass("C3 full-walk-combs", start);
}

#[test]
fn acceptance_c4_repeat_detection() {
    let start = Instant::now();
    for n in 1..=3usize {
        let vertices: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let graph = Digraph::new(vertices.clone(), [] as [(String, String); 0]).unwrap();
        let c_g = build_c_g(&graph).unwrap();
        let mut sequences: Vec<Vec<String>> = vec![vec![]];
        for len in 1..=5usize {
            let mut next = Vec::new();
            for seq in &sequences {
                for v in &vertices {
                    let mut longer = seq.clone();
                    longer.push(v.clone());
                    next.push(longer);
                }
            }
            sequences = next;
            for seq in &sequences {
                let entries: Vec<&str> = seq.iter().map(String::as_str).collect();
                let comb = comb_encode(&entries, c_g.alphabet()).unwrap();
                let reached = c_g.reachable_states(&comb).unwrap();
                assert_eq!(
                    reached.contains(&State::new("cg.p1")),
                    len >= 2,
                    "length state for {comb}"
                );
                for w in &vertices {
                    assert_eq!(
                        reached.contains(&State::new(&format!("cg.pp_{w}"))),
                        seq.contains(w),
                        "containment state for {w} in {comb}"
                    );
                }
                let mut dedup = seq.clone();
                dedup.sort();
                dedup.dedup();
                assert_eq!(
                    c_g.accepts(&comb).unwrap(),
                    len >= 2 && dedup.len() < seq.len(),
                    "acceptance for {comb}"
                );
            }
        }
    }
    pass("C4 repeat-detection", start);
}

#[test]
fn acceptance_c5_intersection_counts() {
    let start = Instant::now();
    let mut population = all_graphs_on_three();
    population.extend(seeded_graphs(202, 200));
    for graph in &population {
        let n = graph.vertex_count();
        let b_g = build_b_g(graph).unwrap();
        let count = b_g.enumerate_language(2 * n - 1, &limits()).unwrap().len();
        let walks = count_full_walks(graph);
        let paths = count_hamiltonian_paths(graph, &limits()).unwrap();
        assert_eq!(
            BigUint::from(count),
            walks - BigUint::from(paths),
            "{graph:?}"
        );
    }
    pass("C5 intersection-counts", start);
}

#[test]
fn acceptance_c6_decision_agreement() {
    let start = Instant::now();
    let mut population = all_graphs_up_to_three();
    population.extend(seeded_graphs(606, 100));
    for graph in &population {
        let expected = count_hamiltonian_paths(graph, &limits()).unwrap() > 0;
        for method in [DecisionMethod::Counting, DecisionMethod::Search] {
            let decision = reduce_and_decide(graph, method, &limits()).unwrap();
            assert_eq!(decision.hamiltonian, expected, "{method:?} on {graph:?}");
        }
    }
    pass("C6 decision-agreement", start);
}

fn semantics_alphabet() -> RankedAlphabet {
    RankedAlphabet::new([
        Symbol::new("A", 0),
        Symbol::new("B", 0),
        Symbol::new("u", 1),
        Symbol::new("f", 2),
    ])
    .unwrap()
}

fn random_term(rng: &mut ChaCha8Rng, budget: usize) -> Term {
    let leaf = |rng: &mut ChaCha8Rng| {
        Term::new(
            Symbol::new(if rng.gen_bool(0.5) { "A" } else { "B" }, 0),
            vec![],
        )
    };
    if budget <= 1 {
        return leaf(rng);
    }
    match rng.gen_range(0..3) {
        0 => leaf(rng),
        1 => Term::new(Symbol::new("u", 1), vec![random_term(rng, budget - 1)]),
        _ => {
            if budget < 3 {
                Term::new(Symbol::new("u", 1), vec![random_term(rng, budget - 1)])
            } else {
                let left_budget = rng.gen_range(1..=budget - 2);
                let left = random_term(rng, left_budget);
                let right = random_term(rng, budget - 1 - left.node_count());
                Term::new(Symbol::new("f", 2), vec![left, right])
            }
        }
    }
}

fn random_constrained(rng: &mut ChaCha8Rng, force_reflexive: bool) -> Taged {
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
    let mut finals: Vec<State> = states
        .iter()
        .filter(|_| rng.gen_bool(0.4))
        .cloned()
        .collect();
    if finals.is_empty() {
        finals.push(states[0].clone());
    }
    let mut eq = Vec::new();
    let mut neq = Vec::new();
    if force_reflexive {
        let q = states[rng.gen_range(0..state_count)].clone();
        neq.push((q.clone(), q));
    }
    while eq.len() + neq.len() < 2 && rng.gen_bool(0.6) {
        let pair = (
            states[rng.gen_range(0..state_count)].clone(),
            states[rng.gen_range(0..state_count)].clone(),
        );
        if rng.gen_bool(0.5) {
            eq.push(pair);
        } else {
            neq.push(pair);
        }
    }
    assert!(eq.len() + neq.len() <= 2);
    let base = TreeAutomaton::new(alphabet, states, rules, finals).unwrap();
    Taged::new(base, eq, neq).unwrap()
}

/// Pair check written out directly: every ordered pair of distinct
/// positions is tested against the raw constraint definition.
fn run_meets_constraints(instance: &Taged, run: &Run) -> bool {
    let labels: Vec<(&Position, &State)> = run.labels().iter().collect();
    for (i, (pa, sa)) in labels.iter().enumerate() {
        for (j, (pb, sb)) in labels.iter().enumerate() {
            if i == j {
                continue;
            }
            let forward = ((*sa).clone(), (*sb).clone());
            let backward = ((*sb).clone(), (*sa).clone());
            let ta = run.term().subterm_at(pa).unwrap();
            let tb = run.term().subterm_at(pb).unwrap();
            if (instance.eq_pairs().contains(&forward) || instance.eq_pairs().contains(&backward))
                && ta != tb
            {
                return false;
            }
            if (instance.neq_pairs().contains(&forward)
                || instance.neq_pairs().contains(&backward))
                && ta == tb
            {
                return false;
            }
        }
    }
    true
}

#[test]
fn acceptance_c7_constraint_semantics() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut reflexive_cases = 0usize;
    for case in 0..1000usize {
        let force_reflexive = case % 5 == 0;
        let instance = random_constrained(&mut rng, force_reflexive);
        if instance.neq_pairs().iter().any(|(a, b)| a == b) {
            reflexive_cases += 1;
        }
        let term = random_term(&mut rng, 6);
        assert!(term.node_count() <= 6);
        let expected = instance
            .base()
            .runs(&term)
            .unwrap()
            .iter()
            .any(|r| {
                instance.base().finals().contains(r.root_state())
                    && run_meets_constraints(&instance, r)
            });
        let got = instance.accepts(&term).unwrap();
        assert_eq!(got, expected, "case {case} term {term}");
    }
    assert!(reflexive_cases >= 100, "only {reflexive_cases} reflexive cases");
    pass("C7 constraint-semantics", start);
}

#[test]
fn acceptance_c8_instance_size_bounds() {
    let start = Instant::now();
    let mut population = all_graphs_up_to_three();
    population.extend(seeded_graphs(606, 100));
    let mut checked = 0usize;
    let mut violations: Vec<String> = Vec::new();
    for graph in &population {
        let m_g = count_full_walks(graph);
        if m_g == BigUint::from(0u32) {
            continue;
        }
        let bundle = ReductionBundle::build(graph).unwrap();
        let n = graph.vertex_count();
        let e = graph.edge_count();
        let bits = usize::try_from(m_g.bits()).unwrap();
        let states = bundle.d_g.base().states().len();
        let rules = bundle.d_g.base().rules().len();
        let rule_bound = (bits - 1) + (7 * n + 3) * (n + n.saturating_sub(1) * e);
        assert!(
            rules <= rule_bound,
            "{graph:?}: {rules} rules exceed the documented bound {rule_bound}"
        );
        let state_bound = n * n + 3 * n + 4 + bits;
        if states > state_bound {
            violations.push(format!(
                "|V|={n} |E|={e} m_G={m_g}: {states} states > bound {state_bound}"
            ));
        }
        checked += 1;
    }
    assert!(
        violations.is_empty(),
        "state bound |V|^2+3|V|+4+bitlen(m_G) exceeded on {} of {} instances; the \
         intersection automaton alone has (2|V|+3)*|V|^2 states before the counter is \
         attached, which outgrows the stated bound from |V|=2 onward. First case: {}",
        violations.len(),
        checked,
        violations[0]
    );
    pass("C8 instance-size-bounds", start);
}

fn taged_cmd(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_taged"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn taged")
}

fn write_file(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, content).expect("write input");
    path
}

#[test]
fn acceptance_c9_cli_contract() {
    let start = Instant::now();
    let dir = TempDir::new().unwrap();
    let chain = "vertices: 1 2 3\nedge: 1 2\nedge: 2 3\n";
    let blocked = "vertices: 1 2 3\nedge: 1 2\nedge: 2 1\n";
    write_file(dir.path(), "chain.txt", chain);
    write_file(dir.path(), "blocked.txt", blocked);
    write_file(dir.path(), "broken.txt", "vertices 1 2 3\n");
    let mut k4 = String::from("vertices: 1 2 3 4\n");
    for u in ["1", "2", "3", "4"] {
        for v in ["1", "2", "3", "4"] {
            if u != v {
                k4.push_str(&format!("edge: {u} {v}\n"));
            }
        }
    }
    write_file(dir.path(), "k4.txt", &k4);

    let table: [(&[&str], i32); 4] = [
        (&["decide", "chain.txt"], 0),
        (&["decide", "blocked.txt"], 1),
        (&["decide", "broken.txt"], 2),
        (&["decide", "k4.txt", "--max-vertices", "3"], 3),
    ];
    for (args, expected) in table {
        let out = taged_cmd(dir.path(), args);
        assert_eq!(out.status.code(), Some(expected), "{args:?}");
    }

    let out = taged_cmd(dir.path(), &["reduce", "blocked.txt", "-o", "inst.txt"]);
    assert_eq!(out.status.code(), Some(0));
    let emitted = fs::read_to_string(dir.path().join("inst.txt")).unwrap();
    let parsed = Taged::parse_text(&emitted).expect("emitted instance re-parses");
    assert_eq!(parsed.to_text(), emitted, "instance round-trip changed bytes");

    let b_g = build_b_g(&Digraph::parse_text(blocked).unwrap()).unwrap();
    write_file(dir.path(), "bg.txt", &b_g.to_text());
    let reparsed = TreeAutomaton::parse_text(&b_g.to_text()).unwrap();
    assert_eq!(reparsed.to_text(), b_g.to_text());
    let out = taged_cmd(dir.path(), &["enumerate", "bg.txt", "--max-nodes", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let listed: Vec<Term> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    let expected: Vec<Term> = reparsed
        .enumerate_language(8, &limits())
        .unwrap()
        .into_iter()
        .collect();
    assert_eq!(listed, expected, "enumerate output differs from library");

    let out = taged_cmd(dir.path(), &["count-paths", "blocked.txt"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "2\n");

    pass("C9 cli-contract", start);
}
