use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use hypersketch::contract::{enumerate_near_min_cuts, sunflower};
use hypersketch::error::{Error, Result};
use hypersketch::experiment::run_experiment;
use hypersketch::hypercore::{parse_edge_line, parse_hypergraph, serialize_hypergraph, Hypergraph};
use hypersketch::maxcutlab::{build_gadget, cycle_lengths, exact_max_cut, gadget_expected_value, gen_bhh, random_split, two_party_estimate, Owner};
use hypersketch::mincut::{min_cut, min_cut_randomized, strong_connectivities};
use hypersketch::rng::stream_rng;
use hypersketch::satsketch::{estimate_value, parse_dimacs, parse_sketch, serialize_sketch, sketch_formula};
use hypersketch::sparsify::{sparsify, verify_sparsifier, SparsifyParams, StreamConfig, StreamingSparsifier};

#[derive(Parser)]
#[command(name = "hypersketch", version, about = "Hypergraph cut sparsification and sketching")]
struct Cli {
    /// Master seed for every randomized command.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimum cut weight and side vector.
    Mincut {
        #[arg(long)]
        hypergraph: PathBuf,
        /// Use repeated random contraction instead of the deterministic algorithm.
        #[arg(long)]
        randomized: bool,
    },
    /// Per-edge strong connectivities as JSON.
    Strength {
        #[arg(long)]
        hypergraph: PathBuf,
    },
    /// Repeated random contraction; reports the distinct cuts found.
    Contract {
        #[arg(long)]
        hypergraph: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long)]
        json: bool,
    },
    /// Emit the sunflower hypergraph.
    Sunflower {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        alpha: f64,
    },
    /// Sample a cut sparsifier.
    Sparsify {
        #[arg(long)]
        hypergraph: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 1.0)]
        d: f64,
        /// Coefficient c in the (d + c) ln n term.
        #[arg(long, default_value_t = 2.0)]
        log_offset: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Check every cut against the input (at most 20 vertices).
        #[arg(long)]
        verify: bool,
    },
    /// Sparsify `w k v1 .. vk` edge lines read from stdin.
    StreamSparsify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 1.0)]
        d: f64,
        /// Upper bound on the number of stream edges.
        #[arg(long, default_value_t = 1 << 32)]
        max_edges: u64,
        #[arg(long, default_value_t = 8.0)]
        size_constant: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sketch a DIMACS CNF formula.
    SatSketch {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 1.0)]
        d: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the value of an assignment from a sketch.
    SatEval {
        #[arg(long)]
        sketch: PathBuf,
        /// One `0`/`1` character per variable.
        #[arg(long)]
        assignment: String,
    },
    /// Build a Max-Cut gadget from a random hidden hypermatching instance.
    Gadget {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t: usize,
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
        b: u8,
        #[arg(long)]
        json: bool,
    },
    /// Two-party max-cut estimate on a random edge split of a graph.
    TwoParty {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        split_seed: Option<u64>,
    },
    /// Run a named experiment and print its report.
    Experiment {
        name: String,
        /// Parameter overrides as a JSON object.
        #[arg(long)]
        params: Option<String>,
    },
}

fn read(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

fn load_hypergraph(path: &Path) -> Result<Hypergraph> {
    parse_hypergraph(&read(path)?)
}

fn emit(value: &Value) {
    println!("{value}");
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

/// Returns whether the command passed.
fn execute(cli: Cli) -> Result<bool> {
    let seed = cli.seed;
    match cli.command {
        Command::Mincut { hypergraph, randomized } => {
            let h = load_hypergraph(&hypergraph)?;
            let mc = if randomized { min_cut_randomized(&h, seed)? } else { min_cut(&h)? };
            emit(&json!({"weight": mc.weight, "side": mc.cut.to_bitstring()}));
        }
        Command::Strength { hypergraph } => {
            let h = load_hypergraph(&hypergraph)?;
            let k = strong_connectivities(&h)?;
            let values: Vec<Value> = k.values().iter().map(|&x| finite_or_null(x)).collect();
            emit(&json!({"k": values, "distinct": k.distinct_count()}));
        }
        Command::Contract { hypergraph, alpha, trials, json } => {
            let h = load_hypergraph(&hypergraph)?;
            let res = enumerate_near_min_cuts(&h, alpha, trials, seed)?;
            if json {
                emit(&json!({
                    "distinct_cuts": res.cuts.iter().map(|(c, w)| json!({"cut": c.to_bitstring(), "weight": w})).collect::<Vec<_>>(),
                    "min_weight": res.min_weight,
                    "frequency_table": res.frequency_table,
                }));
            } else {
                println!("min cut weight {}", res.min_weight);
                println!("{} distinct cuts of weight <= {}", res.cuts.len(), alpha * res.min_weight);
                for (c, w) in &res.cuts {
                    println!("{} {w}", c.to_bitstring());
                }
            }
        }
        Command::Sunflower { r, m, alpha } => {
            print!("{}", serialize_hypergraph(&sunflower(r, m, alpha)?));
        }
        Command::Sparsify {
            hypergraph,
            epsilon,
            d,
            log_offset,
            out,
            verify,
        } => {
            let h = load_hypergraph(&hypergraph)?;
            let mut params = SparsifyParams::new(epsilon, d, seed)?;
            params.log_offset = log_offset;
            let (sparse, mut report) = sparsify(&h, &params)?;
            let mut pass = true;
            if verify {
                let v = verify_sparsifier(&h, &sparse, epsilon)?;
                report.max_relative_cut_error = v.max_relative_cut_error;
                report.within_epsilon = v.within_epsilon;
                pass = v.within_epsilon == Some(true);
            }
            let text = serialize_hypergraph(&sparse);
            match out {
                Some(p) => {
                    std::fs::write(p, text)?;
                    emit(&serde_json::to_value(&report)?);
                }
                None => {
                    print!("{text}");
                    if verify {
                        emit(&serde_json::to_value(&report)?);
                    }
                }
            }
            return Ok(pass);
        }
        Command::StreamSparsify {
            n,
            epsilon,
            d,
            max_edges,
            size_constant,
            out,
        } => {
            let mut config = StreamConfig::new(epsilon, d, seed);
            config.max_edges = max_edges;
            config.size_constant = size_constant;
            let mut s = StreamingSparsifier::new(n, config)?;
            let stdin = std::io::stdin();
            let mut index = 0;
            for line in stdin.lock().lines() {
                let line = line?;
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let edge = parse_edge_line(line, usize::MAX).map_err(|message| Error::Stream { index, message })?;
                s.push(edge)?;
                index += 1;
            }
            write_or_print(out.as_deref(), &serialize_hypergraph(&s.finish()))?;
        }
        Command::SatSketch { cnf, epsilon, d, out } => {
            let phi = parse_dimacs(&read(&cnf)?)?;
            let sketch = sketch_formula(&phi, epsilon, d, seed)?;
            let text = serialize_sketch(&sketch);
            match out {
                Some(p) => {
                    std::fs::write(p, text)?;
                    emit(&serde_json::to_value(&sketch.report)?);
                }
                None => print!("{text}"),
            }
        }
        Command::SatEval { sketch, assignment } => {
            let sketch = parse_sketch(&read(&sketch)?)?;
            let bits = assignment
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(Error::InvalidArgument(format!("assignment character `{other}` is not 0 or 1"))),
                })
                .collect::<Result<Vec<bool>>>()?;
            emit(&json!({"estimate": estimate_value(&sketch, &bits)?}));
        }
        Command::Gadget { k, t, b, json } => {
            let inst = gen_bhh(k, t, b == 1, &mut stream_rng(seed, 0))?;
            let g = build_gadget(&inst)?;
            let maxcut = exact_max_cut(&g.graph)?;
            let expected = gadget_expected_value(inst.n(), t, b == 1)?;
            let cycles = cycle_lengths(&g.graph).unwrap_or_default();
            let pass = maxcut == expected as f64;
            if json {
                let edges: Vec<Value> = g
                    .graph
                    .edges()
                    .iter()
                    .zip(&g.owner)
                    .map(|(e, o)| {
                        let [a, c] = [e.endpoints()[0], e.endpoints()[1]];
                        json!({
                            "u": g.roles[a].to_string(),
                            "v": g.roles[c].to_string(),
                            "owner": if *o == Owner::Alice { "alice" } else { "bob" },
                        })
                    })
                    .collect();
                emit(&json!({
                    "n": inst.n(),
                    "vertices": g.graph.n(),
                    "edges": edges,
                    "maxcut": maxcut,
                    "expected": expected,
                    "cycle_lengths": cycles,
                }));
            } else {
                println!("n={} vertices={} edges={}", inst.n(), g.graph.n(), g.graph.edge_count());
                println!("maxcut={maxcut} expected={expected}");
                println!("cycle lengths {cycles:?}");
            }
            return Ok(pass);
        }
        Command::TwoParty { graph, split_seed } => {
            let g = load_hypergraph(&graph)?;
            let (a, b) = random_split(&g, &mut stream_rng(split_seed.unwrap_or(seed), 0));
            let out = two_party_estimate(&a, &b)?;
            emit(&json!({
                "wA": out.w_a,
                "wB": out.w_b,
                "estimate": out.estimate,
                "true_maxcut": out.true_maxcut,
            }));
            return Ok(out.estimate <= out.true_maxcut && out.true_maxcut <= out.w_a + out.w_b);
        }
        Command::Experiment { name, params } => {
            let params: Value = match params {
                Some(text) => serde_json::from_str(&text).map_err(|e| Error::InvalidArgument(format!("--params: {e}")))?,
                None => Value::Null,
            };
            let report = run_experiment(&name, &params, seed)?;
            if !report.pass {
                eprintln!("experiment {name} failed: {:?}", report.metrics);
            }
            emit(&serde_json::to_value(&report)?);
            return Ok(report.pass);
        }
    }
    Ok(true)
}

fn configure_threads() {
    if let Some(n) = std::env::var("HYPERSKETCH_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::InvalidArgument(_) => 2,
                Error::ResourceLimit(_) => 3,
                _ => 1,
            })
        }
    }
}
