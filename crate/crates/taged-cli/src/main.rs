//! Command-line front end for the `taged` library.
//!
//! Exit codes form a stable contract for scripting: 0 for success or a
//! positive verdict, 1 for a negative verdict, 2 for unusable input, 3
//! for an exceeded resource cap.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use taged::{
    build_d_g, count_full_walks, reduce_and_decide, verify_graph, DecisionMethod, Digraph, Error,
    Limits, Taged, Term, TreeAutomaton,
};

#[derive(Parser)]
#[command(name = "taged", about = "Tree automata with disequality constraints, and Hamiltonian path decisions through them")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Refuse graphs with more vertices than this.
    #[arg(long, global = true, default_value_t = 10)]
    max_vertices: usize,

    /// Node bound for enumeration and witness search.
    #[arg(long, global = true, default_value_t = 100_000)]
    max_nodes: usize,

    /// Refuse enumerations that construct more terms than this.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    max_buckets: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Print the number of full walks of a graph in decimal.
    CountPaths { graph: PathBuf },

    /// Decide whether a graph has a Hamiltonian path; prints HAMILTONIAN
    /// (exit 0) or NO-HAMILTONIAN (exit 1) plus a diagnostics line.
    Decide {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Counting)]
        method: Method,
    },

    /// Build the constrained instance for a graph and write it in text
    /// form, to a file with -o or to standard output without.
    Reduce {
        graph: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },

    /// Check one term against an automaton file, with or without
    /// constraint lines; prints ACCEPT (exit 0) or REJECT (exit 1).
    Accepts {
        automaton: PathBuf,
        term: String,
        /// On ACCEPT, also print the run, one `position:state` line per
        /// node.
        #[arg(long)]
        witness: bool,
    },

    /// Print every term the automaton accepts within the node bound, one
    /// per line in canonical order.
    Enumerate { automaton: PathBuf },

    /// Run the cross-check battery for a graph and print the report;
    /// exit 0 only if every check passes.
    Verify {
        graph: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(ValueEnum, Clone, Copy)]
enum Method {
    Counting,
    Search,
}

impl From<Method> for DecisionMethod {
    fn from(m: Method) -> DecisionMethod {
        match m {
            Method::Counting => DecisionMethod::Counting,
            Method::Search => DecisionMethod::Search,
        }
    }
}

fn read_input(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Malformed {
        what: "input file".into(),
        detail: format!("{}: {e}", path.display()),
    })
}

fn parse_graph(path: &Path, limits: &Limits) -> Result<Digraph, Error> {
    let graph = Digraph::parse_text(&read_input(path)?)?;
    if graph.vertex_count() > limits.max_vertices {
        return Err(Error::ResourceLimit {
            what: "graph vertices".into(),
            needed: graph.vertex_count().to_string(),
            cap: limits.max_vertices.to_string(),
        });
    }
    Ok(graph)
}

fn run(command: Command, limits: &Limits) -> Result<u8, Error> {
    match command {
        Command::CountPaths { graph } => {
            let graph = parse_graph(&graph, limits)?;
            println!("{}", count_full_walks(&graph));
            Ok(0)
        }
        Command::Decide { graph, method } => {
            let graph = parse_graph(&graph, limits)?;
            let decision = reduce_and_decide(&graph, method.into(), limits)?;
            println!(
                "{}",
                if decision.hamiltonian {
                    "HAMILTONIAN"
                } else {
                    "NO-HAMILTONIAN"
                }
            );
            println!("# m_G={} bG_count={}", decision.m_g, decision.b_g_count);
            Ok(u8::from(!decision.hamiltonian))
        }
        Command::Reduce { graph, output } => {
            let graph = parse_graph(&graph, limits)?;
            if graph.vertex_count() < 2 {
                return Err(Error::Precondition(
                    "single-vertex graph: trivially HAMILTONIAN, nothing to build".into(),
                ));
            }
            if count_full_walks(&graph).is_zero() {
                return Err(Error::Precondition(
                    "graph has no full walk: trivially NO-HAMILTONIAN, nothing to build".into(),
                ));
            }
            let instance = build_d_g(&graph)?;
            let text = instance.to_text();
            match output {
                Some(path) => fs::write(&path, &text).map_err(|e| Error::Malformed {
                    what: "output file".into(),
                    detail: format!("{}: {e}", path.display()),
                })?,
                None => print!("{text}"),
            }
            Ok(0)
        }
        Command::Accepts {
            automaton,
            term,
            witness,
        } => {
            let instance = Taged::parse_text(&read_input(&automaton)?)?;
            let term: Term = term.parse()?;
            match instance.accepting_run(&term)? {
                Some(run) => {
                    println!("ACCEPT");
                    if witness {
                        for (pos, state) in run.labels() {
                            println!("{pos}:{state}");
                        }
                    }
                    Ok(0)
                }
                None => {
                    println!("REJECT");
                    Ok(1)
                }
            }
        }
        Command::Enumerate { automaton } => {
            let automaton = TreeAutomaton::parse_text(&read_input(&automaton)?)?;
            for term in automaton.enumerate_language(limits.max_nodes, limits)? {
                println!("{term}");
            }
            Ok(0)
        }
        Command::Verify { graph, seed } => {
            let graph = parse_graph(&graph, limits)?;
            let report = verify_graph(&graph, seed, limits)?;
            print!("{}", report.render());
            Ok(u8::from(!report.all_passed()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let limits = Limits::default()
        .with_max_vertices(cli.max_vertices)
        .with_max_nodes(cli.max_nodes)
        .with_max_bucket_terms(cli.max_buckets);
    match run(cli.command, &limits) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::ResourceLimit { .. } => 3,
                _ => 2,
            })
        }
    }
}
