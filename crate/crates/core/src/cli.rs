//! Command-line interface: `solve`, `oracle`, `check`, and `tree`.
//!
//! Exit codes: 0 success, 1 problem-file or input error, 2 solver error,
//! 3 solver/oracle mismatch from `check`, 4 size cap exceeded.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::oracle::{brute_solve, DEFAULT_MAX_JOINT};
use crate::problem::Problem;
use crate::propagation::{solve, SolveOptions, Trace, DEFAULT_MAX_OPTIMA};
use crate::tree::{build_tree, osla_order, render_set};
use crate::valuation::{SolutionTable, Valuation};
use crate::variables::Configuration;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;
pub const EXIT_CAP: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "vbsolve",
    version,
    about = "Solve factored discrete optimization problems by local computation on a rooted Markov tree"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve a problem: print the optimum and one optimizing configuration
    Solve {
        /// Problem file
        file: PathBuf,
        /// Comma-separated elimination order, e.g. C,D,E,B,A
        #[arg(long)]
        order: Option<String>,
        /// Enumerate the complete set of optimal configurations
        #[arg(long)]
        all_optima: bool,
        /// Print every message of both propagation passes
        #[arg(long)]
        trace: bool,
        /// Maximum number of optima to enumerate
        #[arg(long, default_value_t = DEFAULT_MAX_OPTIMA)]
        max_optima: usize,
    },
    /// Solve by exhaustive scan (the reference implementation)
    Oracle {
        /// Problem file
        file: PathBuf,
        /// Maximum joint frame size the oracle will materialize
        #[arg(long, default_value_t = DEFAULT_MAX_JOINT)]
        max_joint: usize,
    },
    /// Run both solver and oracle and compare their answers
    Check {
        /// Problem file
        file: PathBuf,
        /// Comma-separated elimination order for the solver side
        #[arg(long)]
        order: Option<String>,
        /// Also compare the complete optima sets
        #[arg(long)]
        all_optima: bool,
        /// Maximum joint frame size the oracle will materialize
        #[arg(long, default_value_t = DEFAULT_MAX_JOINT)]
        max_joint: usize,
        /// Maximum number of optima to enumerate
        #[arg(long, default_value_t = DEFAULT_MAX_OPTIMA)]
        max_optima: usize,
    },
    /// Print the rooted Markov tree for a problem
    Tree {
        /// Problem file
        file: PathBuf,
        /// Comma-separated elimination order
        #[arg(long)]
        order: Option<String>,
        /// Output format
        #[arg(long, value_enum, default_value_t = TreeFormat::Text)]
        format: TreeFormat,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum TreeFormat {
    Text,
    Dot,
}

enum CliError {
    Core(Error),
    Io(PathBuf, std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(path, e) => write!(f, "cannot read {}: {e}", path.display()),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

fn exit_code(e: &CliError) -> i32 {
    match e {
        CliError::Io(..) => EXIT_INPUT,
        CliError::Core(Error::Parse(_)) => EXIT_INPUT,
        CliError::Core(
            Error::TooManyOptima { .. } | Error::JointTooLarge { .. } | Error::FrameOverflow { .. },
        ) => EXIT_CAP,
        CliError::Core(_) => EXIT_SOLVER,
    }
}

/// Run a parsed invocation, writing results to `out` and diagnostics to
/// `err`; returns the process exit code.
pub fn run(cli: Cli, out: &mut impl Write, err: &mut impl Write) -> i32 {
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn load(path: &Path) -> Result<Problem, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    Ok(Problem::parse(&text)?)
}

fn dispatch(cli: Cli, out: &mut impl Write) -> Result<i32, CliError> {
    match cli.command {
        Command::Solve {
            file,
            order,
            all_optima,
            trace,
            max_optima,
        } => {
            let problem = load(&file)?;
            let order = order.map(|s| problem.parse_order(&s)).transpose()?;
            let result = solve(
                &problem,
                &SolveOptions {
                    order,
                    all_optima,
                    max_optima,
                    trace,
                },
            )?;
            if let Some(trace) = &result.trace {
                let _ = out.write_all(render_trace(&problem, trace).as_bytes());
            }
            let _ = writeln!(out, "optimum: {}", result.optimum);
            let _ = writeln!(
                out,
                "solution: {}",
                problem.render_configuration(&result.solution)
            );
            if let Some(optima) = &result.all_optima {
                let _ = writeln!(out, "optima ({}):", optima.len());
                for c in optima {
                    let _ = writeln!(out, "  {}", problem.render_configuration(c));
                }
            }
            Ok(EXIT_OK)
        }
        Command::Oracle { file, max_joint } => {
            let problem = load(&file)?;
            let result = brute_solve(&problem, max_joint)?;
            let _ = writeln!(out, "optimum: {}", result.optimum);
            let _ = writeln!(out, "optima ({}):", result.argopt.len());
            for c in &result.argopt {
                let _ = writeln!(out, "  {}", problem.render_configuration(c));
            }
            let _ = writeln!(out, "configurations scanned: {}", result.joint_size);
            Ok(EXIT_OK)
        }
        Command::Check {
            file,
            order,
            all_optima,
            max_joint,
            max_optima,
        } => {
            let problem = load(&file)?;
            let order = order.map(|s| problem.parse_order(&s)).transpose()?;
            let solver = solve(
                &problem,
                &SolveOptions {
                    order,
                    all_optima,
                    max_optima,
                    trace: false,
                },
            )?;
            let oracle = brute_solve(&problem, max_joint)?;

            let mut ok = true;
            if solver.optimum != oracle.optimum {
                let _ = writeln!(
                    out,
                    "mismatch: solver optimum {} vs oracle optimum {}",
                    solver.optimum, oracle.optimum
                );
                ok = false;
            }
            let solution_value = problem.evaluate(&solver.solution)?;
            if solution_value != oracle.optimum {
                let _ = writeln!(
                    out,
                    "mismatch: solver solution evaluates to {} instead of {}",
                    solution_value, oracle.optimum
                );
                ok = false;
            }
            if let Some(enumerated) = &solver.all_optima {
                if enumerated != &oracle.argopt {
                    let _ = writeln!(
                        out,
                        "mismatch: solver enumerates {} optima, oracle has {}",
                        enumerated.len(),
                        oracle.argopt.len()
                    );
                    for c in enumerated {
                        let _ = writeln!(out, "  solver: {}", problem.render_configuration(c));
                    }
                    for c in &oracle.argopt {
                        let _ = writeln!(out, "  oracle: {}", problem.render_configuration(c));
                    }
                    ok = false;
                }
            }
            if ok {
                let _ = writeln!(out, "check passed: optimum {}", oracle.optimum);
                Ok(EXIT_OK)
            } else {
                Ok(EXIT_MISMATCH)
            }
        }
        Command::Tree {
            file,
            order,
            format,
        } => {
            let problem = load(&file)?;
            let hypergraph = problem.hypergraph();
            let order = match order {
                Some(s) => problem.parse_order(&s)?,
                None => osla_order(&hypergraph),
            };
            let tree = build_tree(&hypergraph, &order)?;
            let name = |v| problem.var_name(v).to_string();
            let rendered = match format {
                TreeFormat::Text => tree.render_text(name),
                TreeFormat::Dot => tree.to_dot(name),
            };
            let _ = out.write_all(rendered.as_bytes());
            Ok(EXIT_OK)
        }
    }
}

/// Text layout of a solve trace: one block per valuation message with the
/// combined table and the marginalized payload (solution column included
/// where a variable was eliminated), then one line per configuration
/// message.
pub fn render_trace(problem: &Problem, trace: &Trace) -> String {
    let name = |v| problem.var_name(v).to_string();
    let mut out = String::from("-- valuation messages --\n");
    for step in &trace.inward {
        out.push_str(&format!(
            "\n== {} -> {} ==\n",
            render_set(&step.vertex, &name),
            render_set(&step.parent, &name)
        ));
        out.push_str(&format!("combined {}:\n", render_set(&step.vertex, &name)));
        render_table(problem, &step.combined, None, &mut out);
        match &step.solution {
            Some(table) => {
                out.push_str(&format!(
                    "message {} (solution for {}):\n",
                    render_set(step.message.domain(), &name),
                    problem.var_name(table.variable())
                ));
                render_table(problem, &step.message, Some(table), &mut out);
            }
            None => {
                out.push_str(&format!(
                    "message {}:\n",
                    render_set(step.message.domain(), &name)
                ));
                render_table(problem, &step.message, None, &mut out);
            }
        }
    }
    out.push_str("\n-- configuration messages --\n");
    for step in &trace.outward {
        out.push_str(&format!(
            "{} -> {}: {}\n",
            render_set(&step.from, &name),
            render_set(&step.to, &name),
            problem.render_configuration(&step.config)
        ));
    }
    out
}

fn render_table(
    problem: &Problem,
    valuation: &Valuation,
    solution: Option<&SolutionTable>,
    out: &mut String,
) {
    for idx in 0..valuation.len() {
        let c = Configuration::from_index(valuation.domain(), idx);
        out.push_str(&format!(
            "  {} | {}",
            problem.render_configuration(&c),
            valuation.values()[idx]
        ));
        if let Some(table) = solution {
            let labels: Vec<&str> = table
                .ties_at(idx)
                .iter()
                .map(|s| problem.state_label(table.variable(), *s))
                .collect();
            out.push_str(&format!(" | {}", labels.join(" or ")));
        }
        out.push('\n');
    }
}
