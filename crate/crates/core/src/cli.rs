//! Command-line front end. Exit codes: 0 holds/succeeded, 1 negative result,
//! 2 bad input.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::control::{self, GainMatrix, Verdict};
use crate::error::{Error, Result};
use crate::framework::{Framework, TripleSet};
use crate::io::{self, fmt_num, SimulationFile, TargetFile};
use crate::simulate::{self, InvariantReport, Termination};
use crate::triple_select;

#[derive(Parser, Debug)]
#[command(
    name = "weakrig",
    version,
    about = "Weak rigidity and formation control toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Rank or graphical rigidity verdict for a framework file.
    Check {
        framework: PathBuf,
        /// Triple set JSON (`{"triples": [[i,j,k], ...]}`); defaults to all triples of the graph.
        #[arg(long)]
        triples: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Mode::Weak)]
        mode: Mode,
    },
    /// Minimal triple set of a planar framework (2n-3 triples).
    Tstar { framework: PathBuf, out: PathBuf },
    /// Eigenvalues and stability verdict of the non-gradient Jacobian at the target.
    Jacobian {
        /// Framework file with an optional `triples` list.
        target: PathBuf,
        /// Gain JSON (`{"blocks": [...]}`).
        gain: Option<PathBuf>,
        /// Use `K = I`.
        #[arg(long, conflicts_with = "gain")]
        identity: bool,
        /// Random diagonal gain search with this many trials.
        #[arg(long, conflicts_with_all = ["gain", "identity"])]
        search: Option<usize>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Where a found gain is written.
        #[arg(long, default_value = "gain.json")]
        gain_out: PathBuf,
        /// Eigenvalue CSV path; printed to stdout when absent.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Integrate a simulation config; writes `<prefix>.csv` and `<prefix>.json`.
    Simulate {
        config: PathBuf,
        out_prefix: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Rigid,
    Weak,
    Graphical,
    Tree,
}

/// Parses `std::env::args` and runs; returns the exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Input(_)
        | Error::Json(_)
        | Error::Io(_)
        | Error::UnsupportedRegime { .. }
        | Error::UnsupportedDimension { .. } => 2,
        _ => 1,
    }
}

fn read<T: for<'de> serde::Deserialize<'de>>(path: &Path) -> Result<T> {
    io::read_json(path).map_err(|e| match e {
        Error::Json(j) => Error::Input(format!("{}: {j}", path.display())),
        Error::Io(i) => Error::Input(format!("{}: {i}", path.display())),
        other => other,
    })
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn run(cmd: &Command) -> Result<i32> {
    match cmd {
        Command::Check {
            framework,
            triples,
            mode,
        } => {
            let f: Framework = read(framework)?;
            let t = match triples {
                Some(path) => {
                    let t: TripleSet = read(path)?;
                    t.validate(f.graph())?;
                    t
                }
                None => triple_select::full_triple_set(f.graph()),
            };
            check(&f, &t, *mode)
        }
        Command::Tstar { framework, out } => {
            let f: Framework = read(framework)?;
            tstar(&f, out)
        }
        Command::Jacobian {
            target,
            gain,
            identity,
            search,
            seed,
            gain_out,
            csv,
        } => {
            let tgt = read::<TargetFile>(target)?.into_target()?;
            let k = if let Some(trials) = search {
                match control::gain_search(&tgt, *trials, *seed)? {
                    Some(k) => {
                        io::write_json(gain_out, &k)?;
                        println!("found stable gain, written to {}", gain_out.display());
                        k
                    }
                    None => {
                        println!("none found in {trials} trials (seed {seed})");
                        return Ok(1);
                    }
                }
            } else if let Some(path) = gain {
                read(path)?
            } else if *identity {
                GainMatrix::identity(tgt.n(), tgt.d())
            } else {
                return Err(Error::Input(
                    "give a gain file, --identity or --search".into(),
                ));
            };
            let report =
                control::classify_stability(&control::jacobian_at_target(&tgt, &k)?, tgt.d())?;
            println!("verdict: {:?}", report.verdict);
            let table = report.eigenvalue_csv();
            match csv {
                Some(path) => std::fs::write(path, table)?,
                None => print!("{table}"),
            }
            Ok(if report.verdict == Verdict::Stable {
                0
            } else {
                1
            })
        }
        Command::Simulate { config, out_prefix } => {
            let file: SimulationFile = read(config)?;
            simulate_cmd(&file, out_prefix)
        }
    }
}

fn check(f: &Framework, t: &TripleSet, mode: Mode) -> Result<i32> {
    let holds = match mode {
        Mode::Rigid => {
            let r = f.infinitesimal_rigidity()?;
            println!(
                "infinitesimally rigid: {} (rank {}/{})",
                yes(r.holds()),
                r.rank,
                r.required
            );
            r.holds()
        }
        Mode::Weak => {
            let r = f.infinitesimal_weak_rigidity(t)?;
            println!("IWR: {} (rank {}/{})", yes(r.holds()), r.rank, r.required);
            r.holds()
        }
        Mode::Graphical => {
            let rep = triple_select::planar_graphical_report(f)?;
            if !rep.connected {
                println!("fails: graph is disconnected");
            }
            for v in &rep.collinear_vertices {
                println!("fails at vertex {v}: all incident edges collinear");
            }
            if rep.holds() {
                println!("graphical condition: holds");
            }
            rep.holds()
        }
        Mode::Tree => {
            let tree = f.graph().spanning_tree()?;
            let r = f.tree_weak_rigidity(&tree, t)?;
            println!("spanning tree: {}", edge_list(&tree));
            println!(
                "tree test: {} (rank {}/{})",
                yes(r.holds()),
                r.rank,
                r.required
            );
            r.holds()
        }
    };
    Ok(if holds { 0 } else { 1 })
}

fn edge_list(g: &crate::graph::Graph) -> String {
    g.edges()
        .iter()
        .map(|(a, b)| format!("{{{a},{b}}}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn tstar(f: &Framework, out: &Path) -> Result<i32> {
    let rep = triple_select::planar_graphical_report(f)?;
    if !rep.holds() {
        if !rep.connected {
            println!("fails: graph is disconnected");
        }
        for v in &rep.collinear_vertices {
            println!("fails at vertex {v}: all incident edges collinear");
        }
        return Ok(1);
    }
    let (tree, t) = triple_select::minimal_triple_set(f)?;
    println!("spanning tree: {}", edge_list(&tree));
    io::write_json(out, &t)?;
    println!("wrote {} triples to {}", t.len(), out.display());
    Ok(0)
}

#[derive(Serialize)]
struct Summary<'a> {
    config: &'a SimulationFile,
    termination: Termination,
    diverged_at: Option<f64>,
    samples: usize,
    final_time: Option<f64>,
    final_cost: Option<f64>,
    final_edge_lengths: Option<&'a Vec<f64>>,
    decay_slope: Option<f64>,
    invariants: InvariantReport,
}

fn simulate_cmd(file: &SimulationFile, prefix: &Path) -> Result<i32> {
    let cfg = file.to_config()?;
    let (trace, diverged_at) = match simulate::integrate(&cfg) {
        Ok(t) => (t, None),
        Err(Error::Divergence { time, trace }) => (*trace, Some(time)),
        Err(e) => return Err(e),
    };
    let with_ext = |ext: &str| {
        let mut s = prefix.as_os_str().to_owned();
        s.push(ext);
        PathBuf::from(s)
    };
    std::fs::write(with_ext(".csv"), trace.to_csv())?;
    let window = trace.len().min(50);
    let summary = Summary {
        config: file,
        termination: trace.termination,
        diverged_at,
        samples: trace.len(),
        final_time: trace.times.last().copied(),
        final_cost: trace.final_cost(),
        final_edge_lengths: trace.edge_lengths.last(),
        decay_slope: simulate::convergence_rate(&trace, window).ok(),
        invariants: simulate::monitor_invariants(&trace, cfg.controller.law()),
    };
    io::write_json(&with_ext(".json"), &summary)?;
    println!("termination: {:?}", trace.termination);
    if let Some(v) = trace.final_cost() {
        println!("final V: {}", fmt_num(v));
    }
    if let Some(lengths) = trace.edge_lengths.last() {
        let shown: Vec<String> = lengths.iter().map(|&x| fmt_num(x)).collect();
        println!("final edge lengths: {}", shown.join(" "));
    }
    Ok(if trace.termination == Termination::Converged {
        0
    } else {
        1
    })
}
