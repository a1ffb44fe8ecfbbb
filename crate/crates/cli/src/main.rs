use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use twrgraph_core::catalog::Catalog;
use twrgraph_core::graph::CosetGraph;
use twrgraph_core::report::{self, Options, Status, VerificationReport};
use twrgraph_core::rsub;
use twrgraph_core::{Error, CONSTRUCTION_SEED};

#[derive(Parser)]
#[command(name = "twrgraph", version, about = "Twisted wreath coset graphs for q^2:SL(2,q) and PSL(2,q)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Field order (prime power, at least 4).
    #[arg(long, global = true)]
    q: Option<u64>,
    /// Write the main artifact to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print the JSON report on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for sampling-based checks; constructions do not depend on it.
    #[arg(long, global = true, default_value_t = CONSTRUCTION_SEED)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Include elapsed times in reports.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    Left,
    Right,
}

#[derive(Subcommand)]
enum Command {
    /// Check the hypothesis on P = q^2:SL(2,q) and phi.
    Hypothesis,
    /// Describe the catalog entry for q.
    Catalog,
    /// Build R and check its invariants.
    ConstructR {
        /// Replace one basis vector of R so that Q no longer normalises it.
        #[arg(long)]
        inject_fault: bool,
    },
    /// Run the full check battery on the coset graph.
    VerifyGraph {
        /// Replace one basis vector of R so that Q no longer normalises it.
        #[arg(long)]
        inject_fault: bool,
        /// Allow q outside 4, 5, 7, 8, 9.
        #[arg(long)]
        force: bool,
    },
    /// Export a ball around u (left) or v (right).
    Ball {
        #[arg(long, value_enum, default_value_t = Side::Left)]
        side: Side,
        #[arg(long, default_value_t = 1)]
        radius: usize,
        /// DOT instead of JSON lines (radius at most 1).
        #[arg(long)]
        dot: bool,
    },
    /// Hom space from the natural SL(5,2)-module into the induced module.
    RemarkAsl52,
}

enum Failure {
    Usage(String),
    Check,
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnsupportedQ { .. } | Error::InvalidField(_) | Error::TooLarge(_) | Error::Guard(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn require_q(cli: &Cli) -> Result<u64, Failure> {
    cli.q.ok_or_else(|| Failure::Usage("--q is required for this command".into()))
}

/// Prints the report; `--out` receives it unless the command writes a
/// different artifact there.
fn emit_report(cli: &Cli, rep: &VerificationReport, to_out: bool) -> Result<(), Failure> {
    let text = rep.to_json();
    if let (true, Some(path)) = (to_out, &cli.out) {
        std::fs::write(path, &text)?;
    }
    if cli.json {
        print!("{text}");
    } else {
        for c in &rep.checks {
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
            };
            let optional = if c.optional { " (optional)" } else { "" };
            println!("{status:4}  {}{optional}", c.name);
        }
        match &rep.first_failure {
            None => println!("{} q={}: pass", rep.command, rep.q),
            Some(name) => println!("{} q={}: failed at \"{name}\"", rep.command, rep.q),
        }
    }
    if rep.passed() {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn emit_value(cli: &Cli, v: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(v).unwrap() + "\n";
    if let Some(path) = &cli.out {
        std::fs::write(path, &text)?;
    }
    print!("{text}");
    Ok(())
}

fn catalog_json(cat: &Catalog) -> Value {
    json!({
        "family": "q^2:SL(2,q)",
        "q": cat.q,
        "p": cat.p(),
        "m": cat.m(),
        "modulus": cat.field.modulus_string(),
        "degree": cat.k,
        "p_order": cat.p_group.order().to_string(),
        "q_order": cat.q_group().order().to_string(),
        "t_degree": cat.t_degree(),
        "t_order": cat.t_group.order().to_string(),
        "kernel_phi_order": cat.phi.kernel_order().to_string(),
        "q_generators": cat.q_gens.iter().map(|m| m.0).collect::<Vec<_>>(),
        "t_generators": cat.t_group.generators(),
    })
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let opts = Options { seed: cli.seed, timings: cli.timings, ..Options::default() };
    match &cli.command {
        Command::Hypothesis => emit_report(cli, &report::run_hypothesis(require_q(cli)?, &opts)?, true),
        Command::Catalog => emit_value(cli, &catalog_json(&report::catalog_for(require_q(cli)?)?)),
        Command::ConstructR { inject_fault } => {
            let q = require_q(cli)?;
            let opts = Options { inject_fault: *inject_fault, ..opts };
            let (rep, r) = report::run_construct_r(q, &opts)?;
            if let (Some(path), Some(r)) = (&cli.out, &r) {
                let doc = json!({ "r": r, "metadata": rep.metadata, "status": rep.status });
                std::fs::write(path, serde_json::to_string_pretty(&doc).unwrap() + "\n")?;
            }
            emit_report(cli, &rep, false)
        }
        Command::VerifyGraph { inject_fault, force } => {
            let opts = Options { inject_fault: *inject_fault, force: *force, ..opts };
            emit_report(cli, &report::run_verify(require_q(cli)?, &opts)?, true)
        }
        Command::Ball { side, radius, dot } => {
            let cat = report::catalog_for(require_q(cli)?)?;
            let r = rsub::build_r(&cat)?;
            let g = CosetGraph::new(&cat, &r);
            let center = match side {
                Side::Left => g.u(),
                Side::Right => g.v(),
            };
            if *dot && *radius > 1 {
                return Err(Failure::Usage("--dot needs --radius 0 or 1".into()));
            }
            let ball = g.bfs_ball(&center, *radius)?;
            let text = if *dot { g.ball_dot(&ball)? } else { g.ball_jsonl(&ball) };
            match &cli.out {
                Some(path) => {
                    std::fs::write(path, &text)?;
                    eprintln!("{} vertices, layers {:?}", ball.len(), ball.layer_sizes());
                }
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::RemarkAsl52 => remark(cli, &opts),
    }
}

#[cfg(feature = "remark-asl52")]
fn remark(cli: &Cli, opts: &Options) -> Result<(), Failure> {
    let v = report::run_remark(opts)?;
    let passed = v["status"] == "pass";
    if cli.json || cli.out.is_some() {
        emit_value(cli, &v)?;
    } else {
        let r = &v["report"];
        println!("|SL(5,2)| = {}", r["group_order"]);
        println!("|stabilizer| = {}, centre order {}", r["stabilizer_order"], r["stabilizer_centre_order"]);
        println!("induced module dimension {}", r["induced_dim"]);
        println!("hom dimension {} (untwisted quotient: {})", r["hom_dim"], r["hom_dim_untwisted"]);
        println!("remark-asl52: {}", v["status"].as_str().unwrap());
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

#[cfg(not(feature = "remark-asl52"))]
fn remark(_: &Cli, _: &Options) -> Result<(), Failure> {
    Err(Failure::Usage("built without the remark-asl52 feature".into()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
