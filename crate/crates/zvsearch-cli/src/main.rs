//! `zvsearch`: batch front end. Every verb writes one document to stdout;
//! diagnostics go to stderr.
//!
//! Exit status: 0 for a definite answer, 1 for bad input, 2 when a budget is
//! exceeded, 3 when a computation ends unresolved.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use zvsearch::game::{verify, Search};
use zvsearch::gsp::{classify_topological_3, complexity, Verdict};
use zvsearch::io::{format_edge_list, parse_edge_list, parse_search};
use zvsearch::solver::{
    boundary_gap_certificate, boundary_profile, inspection_number, monotonic_inspection_number, pathwidth, Budget,
    Config,
};
use zvsearch::synth::{edge_key, synthesize, synthesize_graph, AlignedSearchBundle, SubdivisionFloor};
use zvsearch::{generate, Error, Graph};

#[derive(Parser)]
#[command(name = "zvsearch", version, about = "Zero-visibility graph searching")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args)]
struct Limits {
    /// Budget overrides such as `states=100000,pw=20`; defaults come from
    /// ZVSEARCH_BUDGET.
    #[arg(long)]
    budget: Option<String>,
    /// Solver worker threads.
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Subcommand)]
enum Verb {
    /// Print a generated graph as an edge list.
    Gen {
        /// Generator spec, e.g. `grid:3,4` or `f2:3,1,2`.
        spec: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact inspection number with a witness search.
    Solve {
        /// Edge-list file or generator spec.
        graph: String,
        #[arg(long, default_value_t = 8)]
        k_max: usize,
        #[command(flatten)]
        limits: Limits,
    },
    /// Exact pathwidth with a path decomposition.
    Pathwidth {
        graph: String,
        #[command(flatten)]
        limits: Limits,
    },
    /// Monotonic inspection number with a monotone witness.
    Mono {
        graph: String,
        #[command(flatten)]
        limits: Limits,
    },
    /// Replay a search file, or a bundle with `--bundle`.
    Verify {
        /// Graph; omit with `--bundle`.
        graph: Option<String>,
        /// Search file, one step per line.
        search: Option<PathBuf>,
        #[arg(long, conflicts_with_all = ["graph", "search"])]
        bundle: Option<PathBuf>,
        /// Comma-separated initially cleared vertices.
        #[arg(long)]
        initial: Option<String>,
        /// Alignment pair `a,b`.
        #[arg(long)]
        align: Option<String>,
    },
    /// Decide whether the graph has a simple GSP decomposition.
    Classify { graph: String },
    /// Build a subdivision with an aligned 3-search.
    Synth {
        graph: String,
        /// Minimum subdivision count `u,v=c`; repeatable.
        #[arg(long = "floor")]
        floors: Vec<String>,
        /// Write the bundle here and print only its statistics.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Boundary-size certificate that the inspection number exceeds `k`.
    Lowerbound {
        graph: String,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        limits: Limits,
    },
}

enum Failure {
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Run<T> = Result<T, Failure>;

fn read(path: &Path) -> Run<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

/// Reads an edge-list file, or falls back to an inline generator spec.
fn load_graph(arg: &str) -> Run<(Graph, Option<(String, String)>)> {
    let path = Path::new(arg);
    if path.exists() {
        let list = parse_edge_list(&read(path)?).map_err(|e| match e {
            Error::Input(m) => Error::Input(format!("{arg}: {m}")),
            other => other,
        })?;
        return Ok((list.graph, list.terminals));
    }
    match generate::from_spec(arg) {
        Ok(g) => Ok((g, None)),
        Err(e) => Err(Failure::Io(format!("{arg}: no such file, and as a generator spec: {e}"))),
    }
}

fn config(limits: &Limits) -> Run<Config> {
    let mut budget = Budget::from_env()?;
    if let Some(spec) = &limits.budget {
        budget = budget.with_overrides(spec)?;
    }
    if limits.workers == 0 {
        return Err(Error::Input("workers must be positive".into()).into());
    }
    Ok(Config { budget, workers: limits.workers, ..Config::default() })
}

fn search_labels(g: &Graph, s: &Search) -> Vec<Vec<String>> {
    s.steps.iter().map(|x| g.set_labels(x)).collect()
}

fn label_list(g: &Graph, arg: &str) -> Run<Vec<usize>> {
    arg.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|l| g.require(l).map_err(Failure::from))
        .collect()
}

fn pair(g: &Graph, arg: &str) -> Run<(usize, usize)> {
    match label_list(g, arg)?.as_slice() {
        &[a, b] => Ok((a, b)),
        _ => Err(Error::Input(format!("expected a pair `a,b`, got {arg:?}")).into()),
    }
}

fn parse_floors(items: &[String]) -> Run<SubdivisionFloor> {
    let mut floors = SubdivisionFloor::new();
    for item in items {
        let bad = || Failure::Lib(Error::Input(format!("floor {item:?} is not `u,v=count`")));
        let (edge, count) = item.split_once('=').ok_or_else(bad)?;
        let (u, v) = edge.split_once(',').ok_or_else(bad)?;
        let count: usize = count.trim().parse().map_err(|_| bad())?;
        floors.insert(edge_key(u.trim(), v.trim()), count);
    }
    Ok(floors)
}

fn run(cli: Cli) -> Run<Value> {
    match cli.verb {
        Verb::Gen { spec, out } => {
            let g = generate::from_spec(&spec)?;
            let text = format_edge_list(&g, None);
            match out {
                Some(p) => {
                    std::fs::write(&p, &text).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
                    Ok(json!({ "spec": spec, "vertices": g.n(), "edges": g.m(), "path": p }))
                }
                None => Ok(Value::String(text)),
            }
        }
        Verb::Solve { graph, k_max, limits } => {
            let (g, _) = load_graph(&graph)?;
            let r = inspection_number(&g, k_max, &config(&limits)?)?;
            let witness = r.witness.as_ref().map(|s| search_labels(&g, s));
            Ok(json!({
                "value": r.value,
                "k_max": k_max,
                "witness": witness,
                "explored_states": r.explored_states,
                "method": r.method,
            }))
        }
        Verb::Pathwidth { graph, limits } => {
            let (g, _) = load_graph(&graph)?;
            let (pw, dec) = pathwidth(&g, &config(&limits)?.budget)?;
            let bags: Vec<Vec<&str>> = dec.bags.iter().map(|b| b.iter().map(|&v| g.label(v)).collect()).collect();
            Ok(json!({ "pathwidth": pw, "bags": bags }))
        }
        Verb::Mono { graph, limits } => {
            let (g, _) = load_graph(&graph)?;
            let r = monotonic_inspection_number(&g, &config(&limits)?.budget)?;
            let witness = r.witness.as_ref().map(|s| search_labels(&g, s));
            Ok(json!({ "value": r.value, "witness": witness, "method": r.method }))
        }
        Verb::Verify { bundle: Some(path), .. } => {
            let b: AlignedSearchBundle = serde_json::from_str(&read(&path)?)
                .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
            let h = &b.host.derived;
            let ab = (h.require(&b.alignment.0)?, h.require(&b.alignment.1)?);
            let v = verify(h, &b.search.steps, &h.empty_set(), Some(ab));
            Ok(json!({
                "successful": v.successful,
                "monotonic": v.monotonic,
                "aligned": v.aligned,
                "steps": v.steps,
                "max_step": v.max_step,
                "host_vertices": h.n(),
                "valid_bundle": b.check().is_ok(),
            }))
        }
        Verb::Verify { graph, search, initial, align, .. } => {
            let (Some(graph), Some(search)) = (graph, search) else {
                return Err(Error::Input("verify needs GRAPH and SEARCH, or --bundle".into()).into());
            };
            let (g, _) = load_graph(&graph)?;
            let steps = parse_search(&g, &read(&search)?)?;
            let a = g.set_of(match &initial {
                Some(s) => label_list(&g, s)?,
                None => vec![],
            });
            let ab = align.as_deref().map(|s| pair(&g, s)).transpose()?;
            let sparse: Vec<Vec<usize>> = steps.iter().map(|s| s.ones().collect()).collect();
            let v = verify(&g, &sparse, &a, ab);
            Ok(json!({
                "successful": v.successful,
                "monotonic": v.monotonic,
                "aligned": v.aligned,
                "steps": v.steps,
                "max_step": v.max_step,
                "final_cleared": v.final_cleared,
            }))
        }
        Verb::Classify { graph } => {
            let (g, _) = load_graph(&graph)?;
            Ok(match classify_topological_3(&g)? {
                Verdict::Yes { decomposition } => json!({
                    "verdict": "YES",
                    "terminals": decomposition.terminals(),
                    "complexity": complexity(&decomposition).root().complexity,
                    "decomposition": decomposition,
                }),
                Verdict::No { witness } => json!({
                    "verdict": "NO",
                    "family": witness.family,
                    "witness": witness,
                }),
            })
        }
        Verb::Synth { graph, floors, out } => {
            let (g, terminals) = load_graph(&graph)?;
            let floors = parse_floors(&floors)?;
            let bundle = match terminals {
                // A file naming terminals asks for that alignment.
                Some((a, b)) => {
                    let tg = zvsearch::gsp::TerminalGraph::new(g.clone(), &a, &b)?;
                    let t = zvsearch::gsp::gsp_decompose(&g, &a, &b)?;
                    synthesize(&tg, &t, &floors)?
                }
                None => match synthesize_graph(&g, &floors)? {
                    Some(b) => b,
                    None => {
                        let Verdict::No { witness } = classify_topological_3(&g)? else { unreachable!() };
                        return Ok(json!({ "verdict": "NO", "family": witness.family, "bundle": null }));
                    }
                },
            };
            let doc = serde_json::to_value(&bundle).map_err(|e| Failure::Io(e.to_string()))?;
            match out {
                Some(p) => {
                    let text = serde_json::to_string(&doc).map_err(|e| Failure::Io(e.to_string()))?;
                    std::fs::write(&p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
                    Ok(json!({ "verdict": "YES", "path": p, "alignment": bundle.alignment, "stats": bundle.stats }))
                }
                // Bundles can be large; keep them on one line.
                None => Ok(Value::String(doc.to_string() + "\n")),
            }
        }
        Verb::Lowerbound { graph, k, limits } => {
            let (g, _) = load_graph(&graph)?;
            let budget = config(&limits)?.budget;
            let cert = boundary_gap_certificate(&g, k, &budget)?;
            let profile: Vec<usize> = boundary_profile(&g, k, &budget)?.into_iter().collect();
            Ok(json!({ "k": k, "exceeds_k": cert.is_some(), "certificate": cert, "profile": profile }))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(doc) => {
            let text = match doc {
                Value::String(text) => text,
                doc => serde_json::to_string_pretty(&doc).expect("serializable") + "\n",
            };
            // A closed pipe downstream is not our error.
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Err(f) => {
            let (code, msg) = match f {
                Failure::Lib(Error::Input(m)) => (1, format!("input error: {m}")),
                Failure::Lib(e @ Error::Resource { .. }) => (2, e.to_string()),
                Failure::Lib(e @ Error::Unresolved(_)) => (3, e.to_string()),
                Failure::Io(m) => (1, m),
            };
            eprintln!("zvsearch: {msg}");
            ExitCode::from(code)
        }
    }
}
