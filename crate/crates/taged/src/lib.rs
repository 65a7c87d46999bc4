//! Tree automata with global disequality constraints, and a reduction from
//! Hamiltonian path search to their emptiness problem.
//!
//! The crate has three layers:
//!
//! * terms and plain bottom-up tree automata ([`term`], [`automaton`]),
//! * automata extended with global equality and disequality constraints
//!   between run states ([`constrained`]),
//! * directed graphs, walk counting and the constructions that turn a
//!   graph into a constrained-emptiness question ([`graph`], [`reduction`]),
//!   plus executable cross-checks over all of it ([`verify`]).
//!
//! Everything is deterministic: collections are ordered, text output is
//! canonical, and searches explore candidates in a fixed order, so equal
//! inputs give byte-equal outputs.

mod error;
mod limits;
mod textfmt;

pub mod automaton;
pub mod constrained;
pub mod graph;
pub mod reduction;
pub mod term;
pub mod verify;

pub use automaton::{Rule, Run, State, TreeAutomaton};
pub use constrained::Taged;
pub use graph::{
    count_full_walks, count_hamiltonian_paths, full_walks, hamiltonian_path, Digraph,
    WalkCountTable,
};
pub use error::{Error, Result};
pub use limits::Limits;
pub use reduction::{
    a_m_singleton_term, a_m_term_node_count, build_a_m, build_b_g, build_c_g, build_d_g,
    build_p_g, reduce_and_decide, witness_node_budget, Decision, DecisionMethod, ReductionBundle,
};
pub use term::{
    comb_alphabet, comb_decode, comb_encode, vertex_symbol_name, Position, RankedAlphabet, Symbol,
    Term,
};
pub use verify::{verify_graph, LemmaOutcome, VerificationReport};
