//! Command-line front end. [`run`] takes the arguments and standard input
//! and returns the exit code and everything to print, so the binary is a
//! thin wrapper and the whole surface is testable in-process.

mod args;
mod commands;
mod report;

use std::io::Read;
use std::time::Instant;

use clap::Parser;
use stable_plans::generators::RandomSizes;

pub use args::{Cli, Command};
pub use report::{Outcome, EXIT_BUDGET, EXIT_DISAGREEMENT, EXIT_ERROR, EXIT_NEGATIVE, EXIT_OK};

use commands::Inputs;
use report::Report;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let started = Instant::now();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let (token, code) = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ("HELP", EXIT_OK),
                _ => ("USAGE_ERROR", EXIT_ERROR),
            };
            return Outcome {
                code,
                output: format!("verdict: {token}\n{}", e.render()),
            };
        }
    };
    let name = command_name(&cli.command);
    let mut inputs = Inputs::new(stdin);
    let report = dispatch(&cli.command, &mut inputs).unwrap_or_else(|e| Report::error(name, &e));
    report.render(cli.json, started.elapsed())
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Validate(_) => "validate",
        Command::Verify { .. } => "verify",
        Command::VerifyK { .. } => "verify-k",
        Command::SynthK { .. } => "synth-k",
        Command::SynthExact { .. } => "synth-exact",
        Command::VerifyIi { .. } => "verify-ii",
        Command::VerifyCrash { .. } => "verify-crash",
        Command::Gen3sat { .. } => "gen-3sat",
        Command::GenGrid { .. } => "gen-grid",
        Command::GenRandom { .. } => "gen-random",
        Command::Simulate { .. } => "simulate",
        Command::Monitor { .. } => "monitor",
    }
}

fn dispatch(cmd: &Command, inputs: &mut Inputs) -> stable_plans::Result<Report> {
    match cmd {
        Command::Validate(arg) => commands::validate(inputs, arg),
        Command::Verify {
            input,
            agent,
            oracle,
            oracle_budget,
        } => commands::verify(inputs, input, *agent, *oracle, *oracle_budget),
        Command::VerifyK { input, k } => commands::verify_k(inputs, input, *k),
        Command::SynthK {
            system,
            k,
            max_len,
            window_budget,
        } => commands::synth_k(inputs, system, *k, *max_len, *window_budget),
        Command::SynthExact {
            system,
            max_len,
            node_budget,
            time_budget_ms,
        } => commands::synth_exact(inputs, system, *max_len, *node_budget, *time_budget_ms),
        Command::VerifyIi { input, agent } => commands::verify_ii(inputs, input, *agent),
        Command::VerifyCrash { input } => commands::verify_crash(inputs, input),
        Command::Gen3sat {
            cnf,
            assignment,
            plan_out,
        } => commands::gen_3sat(inputs, cnf, assignment.as_deref(), plan_out.as_deref()),
        Command::GenGrid {
            rows,
            cols,
            start1,
            start2,
            goal1,
            goal2,
        } => commands::gen_grid_cmd(*rows, *cols, [*start1, *start2, *goal1, *goal2]),
        Command::GenRandom {
            seed,
            states1,
            states2,
            env,
            actions1,
            actions2,
            goals,
            with_null,
            plan_len,
            plan_out,
        } => {
            let sizes = RandomSizes {
                states1: *states1,
                states2: *states2,
                env: *env,
                actions1: *actions1,
                actions2: *actions2,
                goal_patterns: *goals,
                with_null: *with_null,
                ..RandomSizes::default()
            };
            commands::gen_random_cmd(*seed, &sizes, *plan_len, plan_out.as_deref())
        }
        Command::Simulate { input, deviate } => {
            commands::simulate(inputs, input, deviate.as_deref())
        }
        Command::Monitor {
            input,
            detector,
            observations,
        } => commands::monitor(inputs, input, *detector, observations.as_deref()),
    }
}
