use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "sjp",
    version,
    about = "Verify and synthesize stable joint plans for two-agent systems"
)]
pub struct Cli {
    /// Print a JSON document after the verdict line.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct SystemArg {
    /// System file; `-` or omitted reads standard input.
    #[arg(long, value_name = "FILE")]
    pub system: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[command(flatten)]
    pub system: SystemArg,

    /// Open joint plan file.
    #[arg(long, value_name = "FILE")]
    pub plan: PathBuf,
}

#[derive(Debug, Args)]
pub struct CondPlanArgs {
    #[command(flatten)]
    pub system: SystemArg,

    /// Open joint plan, used for both agents when no conditional plans are given.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["cplan1", "cplan2"])]
    pub plan: Option<PathBuf>,

    /// Conditional plan for agent 1.
    #[arg(long, value_name = "FILE", requires = "cplan2")]
    pub cplan1: Option<PathBuf>,

    /// Conditional plan for agent 2.
    #[arg(long, value_name = "FILE", requires = "cplan1")]
    pub cplan2: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a system file and report model defects.
    Validate(SystemArg),

    /// Check stability of an open joint plan.
    Verify {
        #[command(flatten)]
        input: PlanArgs,
        /// Only check deviations by this agent (1 or 2).
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        agent: Option<u8>,
        /// Cross-check against exhaustive deviation search.
        #[arg(long)]
        oracle: bool,
        /// Node budget for the exhaustive search.
        #[arg(long, default_value_t = stable_plans::stability::DEFAULT_NODE_BUDGET)]
        oracle_budget: u64,
    },

    /// Check that every deviation is detected within k+1 steps.
    VerifyK {
        #[command(flatten)]
        input: PlanArgs,
        #[arg(long)]
        k: usize,
    },

    /// Synthesize a k-stable plan over the window graph.
    SynthK {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long)]
        k: usize,
        /// Longest plan considered (default and maximum: number of configurations).
        #[arg(long)]
        max_len: Option<usize>,
        /// Maximum candidate windows per configuration.
        #[arg(long, default_value_t = 1_000_000)]
        window_budget: u128,
    },

    /// Find a shortest stable plan by exhaustive search.
    SynthExact {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long)]
        max_len: Option<usize>,
        #[arg(long, default_value_t = 10_000_000)]
        node_budget: u64,
        /// Wall-clock limit in milliseconds.
        #[arg(long)]
        time_budget_ms: Option<u64>,
    },

    /// Check efficiency and stability of conditional plans over all `init` lines.
    VerifyIi {
        #[command(flatten)]
        input: CondPlanArgs,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        agent: Option<u8>,
    },

    /// Check stability against crash failures over all `init` lines.
    VerifyCrash {
        #[command(flatten)]
        input: CondPlanArgs,
    },

    /// Emit the system reducing a 3-CNF formula to stable-plan existence.
    #[command(name = "gen-3sat")]
    Gen3sat {
        /// DIMACS CNF file; `-` reads standard input.
        #[arg(long, value_name = "FILE")]
        cnf: PathBuf,
        /// Also write the plan of this assignment, e.g. `1,-2,3`.
        #[arg(long, value_name = "LITERALS", allow_hyphen_values = true)]
        assignment: Option<String>,
        #[arg(long, value_name = "FILE", requires = "assignment")]
        plan_out: Option<PathBuf>,
    },

    /// Emit a two-agent grid world.
    GenGrid {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        /// Cells as `row,col`.
        #[arg(long, value_parser = parse_cell)]
        start1: (usize, usize),
        #[arg(long, value_parser = parse_cell)]
        start2: (usize, usize),
        #[arg(long, value_parser = parse_cell)]
        goal1: (usize, usize),
        #[arg(long, value_parser = parse_cell)]
        goal2: (usize, usize),
    },

    /// Emit a seeded random system.
    GenRandom {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        states1: usize,
        #[arg(long, default_value_t = 3)]
        states2: usize,
        #[arg(long, default_value_t = 2)]
        env: usize,
        #[arg(long, default_value_t = 2)]
        actions1: usize,
        #[arg(long, default_value_t = 2)]
        actions2: usize,
        #[arg(long, default_value_t = 1)]
        goals: usize,
        /// Declare `null` for both agents everywhere.
        #[arg(long)]
        with_null: bool,
        /// Also write a random efficient plan of this length (the goal is
        /// chosen along it).
        #[arg(long, requires = "plan_out")]
        plan_len: Option<usize>,
        #[arg(long, value_name = "FILE")]
        plan_out: Option<PathBuf>,
    },

    /// Run an open plan, optionally with deviations, and report detection.
    Simulate {
        #[command(flatten)]
        input: PlanArgs,
        /// Deviations `<agent>@<step>:<action>`, comma separated.
        #[arg(long, value_name = "SPEC")]
        deviate: Option<String>,
    },

    /// Feed a detector's observations to an online detection monitor.
    Monitor {
        #[command(flatten)]
        input: CondPlanArgs,
        /// The observing agent (1 or 2).
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        detector: u8,
        /// Observed states, comma or whitespace separated; `-` or omitted
        /// reads standard input.
        #[arg(long)]
        observations: Option<String>,
    },
}

fn parse_cell(s: &str) -> Result<(usize, usize), String> {
    let (r, c) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `row,col`, got `{s}`"))?;
    let num = |x: &str| {
        x.trim()
            .parse::<usize>()
            .map_err(|_| format!("bad coordinate `{x}`"))
    };
    Ok((num(r)?, num(c)?))
}
