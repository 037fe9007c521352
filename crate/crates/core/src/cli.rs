//! Command-line surface. [`run_command`] never exits the process; it returns
//! the exit code together with what should go to stdout and stderr.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

use crate::choice::{ChoiceContext, ChoiceError, ChoiceRule, RuleKind};
use crate::generate::GenConfig;
use crate::io::{export_dot, parse_context_file, parse_tree_file, report, IoError, Problem};
use crate::laws::{falsify_property, falsify_property_sampled, LawError, LawVerdict, PropertyId, SamplingConfig};
use crate::solve::{compare_backward, extract_extensive, solve, Method, SolveError};
use crate::tree::{
    gamb_with_limit, nfd_with_limit, prune_inconsistent, strategically_equivalent, validate, NormalFormSolution,
    TreeError, DEFAULT_ENUMERATION_LIMIT,
};
use crate::laws::{check_subtree_perfectness, check_weak_subtree_perfectness};
use crate::Rational;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {message}")]
    Read { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: IoError },
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Choice(#[from] ChoiceError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Law(#[from] LawError),
}

#[derive(Parser, Debug)]
#[command(name = "choicetree", version, about = "Decision trees under set-valued choice functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct RuleArgs {
    /// eu_max, pointwise_dominance, maximality, e_admissibility, gamma_maximin or interval_dominance.
    #[arg(long)]
    rule: RuleKind,
    /// File with `prob` lines and/or `credal` blocks.
    #[arg(long)]
    context: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct TreeArgs {
    #[arg(long)]
    tree: PathBuf,
    /// Largest number of normal form decisions to enumerate.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
    limit: usize,
    /// Drop chance arcs whose event cannot occur instead of rejecting the tree.
    #[arg(long)]
    prune_inconsistent: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a tree with the normal form or backward induction operator.
    Solve {
        #[command(flatten)]
        tree: TreeArgs,
        #[command(flatten)]
        rule: RuleArgs,
        #[arg(long, default_value = "normal")]
        method: Method,
        /// Also list every normal form decision of the tree.
        #[arg(long)]
        full: bool,
    },
    /// Compare the restricted root solution with the solution of each subtree.
    CheckPerfect {
        #[command(flatten)]
        tree: TreeArgs,
        #[command(flatten)]
        rule: RuleArgs,
        /// Test inclusion instead of equality.
        #[arg(long)]
        weak: bool,
    },
    /// Compare backward induction with the normal form solution.
    CompareBackward {
        #[command(flatten)]
        tree: TreeArgs,
        #[command(flatten)]
        rule: RuleArgs,
    },
    /// Search for violations of choice function properties.
    CheckProperties {
        #[arg(long)]
        rule: RuleKind,
        /// Comma separated list such as `P1,P2,L`, or `all`.
        #[arg(long)]
        props: String,
        #[arg(long, default_value_t = 1000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of mass functions in sampled credal sets.
        #[arg(long)]
        credal_size: Option<usize>,
        /// Largest number of states in sampled worlds.
        #[arg(long)]
        max_states: Option<usize>,
        /// Keep the space and utilities of this tree instead of sampling them.
        #[arg(long)]
        tree: Option<PathBuf>,
        /// Context used with `--tree`.
        #[arg(long, requires = "tree")]
        context: Option<PathBuf>,
        /// Report witnesses as found, without shrinking.
        #[arg(long)]
        no_shrink: bool,
    },
    /// Decide whether two trees have the same normal form gambles.
    Equiv {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        tree2: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
        limit: usize,
    },
    /// Print the tree in Graphviz format.
    ExportDot {
        #[command(flatten)]
        tree: TreeArgs,
        /// Mark the arcs of the solution; needs `--rule`.
        #[arg(long, requires = "rule")]
        solution: bool,
        #[arg(long)]
        rule: Option<RuleKind>,
        #[arg(long)]
        context: Option<PathBuf>,
        #[arg(long, default_value = "normal")]
        method: Method,
    },
}

/// Exit code, stdout text and stderr text of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandOutput {
    fn ok(code: i32, stdout: String) -> Self {
        CommandOutput {
            code,
            stdout,
            stderr: String::new(),
        }
    }
}

/// Runs one command. `argv[0]` is the program name.
pub fn run_command<I, T>(argv: I) -> CommandOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CommandOutput {
                    code: EXIT_INPUT,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                CommandOutput::ok(EXIT_OK, text)
            };
        }
    };
    match dispatch(cli.command) {
        Ok(out) => out,
        Err(e) => CommandOutput {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Read {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn load_problem(path: &Path) -> Result<Problem, CliError> {
    let text = read(path)?;
    parse_tree_file(&text)
        .and_then(|d| d.resolve())
        .map_err(|source| CliError::Parse {
            path: path.to_path_buf(),
            source,
        })
}

/// Loads and validates a tree, pruning impossible branches when asked.
fn load_tree(args: &TreeArgs) -> Result<Problem, CliError> {
    let mut p = load_problem(&args.tree)?;
    if args.prune_inconsistent {
        p.tree = prune_inconsistent(&p.tree)?;
    }
    validate(&p.tree)?;
    Ok(p)
}

fn load_context(problem: &Problem, path: Option<&Path>) -> Result<ChoiceContext<Rational>, CliError> {
    let ctx = ChoiceContext::new(problem.utilities.clone());
    match path {
        None => Ok(ctx),
        Some(path) => {
            let doc = parse_context_file(&read(path)?, &problem.space).map_err(|source| CliError::Parse {
                path: path.to_path_buf(),
                source,
            })?;
            Ok(doc.apply(ctx))
        }
    }
}

fn build_rule(problem: &Problem, args: &RuleArgs) -> Result<ChoiceRule<Rational>, CliError> {
    Ok(ChoiceRule::new(args.rule, load_context(problem, args.context.as_deref())?)?)
}

fn emit(code: i32, value: Value) -> CommandOutput {
    CommandOutput::ok(code, report::render(&value))
}

fn dispatch(command: Command) -> Result<CommandOutput, CliError> {
    match command {
        Command::Solve {
            tree,
            rule,
            method,
            full,
        } => {
            let p = load_tree(&tree)?;
            let r = build_rule(&p, &rule)?;
            let solved = solve(&p.tree, &r, method, tree.limit)?;
            let mut v = report::solve_report(&p.tree, &p.utilities, &solved);
            v["command"] = json!("solve");
            v["rule"] = json!(rule.rule.name());
            if full {
                let all: NormalFormSolution = nfd_with_limit(&p.tree, tree.limit)?.into_iter().collect();
                v["nfd"] = report::solution(&p.tree, &p.utilities, &all);
            }
            Ok(emit(EXIT_OK, v))
        }
        Command::CheckPerfect { tree, rule, weak } => {
            let p = load_tree(&tree)?;
            let r = build_rule(&p, &rule)?;
            let checked = if weak {
                check_weak_subtree_perfectness(&p.tree, &r, tree.limit)?
            } else {
                check_subtree_perfectness(&p.tree, &r, tree.limit)?
            };
            let mut v = report::perfectness(&p.tree, &p.utilities, &checked);
            v["command"] = json!("check-perfect");
            v["rule"] = json!(rule.rule.name());
            Ok(emit(if checked.perfect() { EXIT_OK } else { EXIT_VIOLATION }, v))
        }
        Command::CompareBackward { tree, rule } => {
            let p = load_tree(&tree)?;
            let r = build_rule(&p, &rule)?;
            let c = compare_backward(&p.tree, &r, tree.limit)?;
            let mut v = report::comparison(&p.tree, &p.utilities, &c);
            v["command"] = json!("compare-backward");
            v["rule"] = json!(rule.rule.name());
            Ok(emit(if c.agree() { EXIT_OK } else { EXIT_VIOLATION }, v))
        }
        Command::CheckProperties {
            rule,
            props,
            budget,
            seed,
            credal_size,
            max_states,
            tree,
            context,
            no_shrink,
        } => {
            let props = PropertyId::parse_list(&props)?;
            let mut generator = GenConfig::default();
            if let Some(k) = credal_size {
                generator.credal_size = k;
            }
            if let Some(n) = max_states {
                generator.omega_max = n;
                generator.omega_min = generator.omega_min.min(n);
            }
            generator
                .validate()
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let sampling = SamplingConfig {
                budget,
                generator,
                shrink: !no_shrink,
            };
            let bound = match &tree {
                Some(path) => {
                    let p = load_problem(path)?;
                    Some(ChoiceRule::new(rule, load_context(&p, context.as_deref())?)?)
                }
                None => None,
            };
            let reports: Vec<_> = props
                .iter()
                .map(|&prop| match &bound {
                    Some(r) => falsify_property(prop, r, &sampling, seed),
                    None => falsify_property_sampled(prop, rule, &sampling, seed),
                })
                .collect();
            let violated = reports.iter().any(|r| r.verdict == LawVerdict::Violated);
            let v = json!({
                "command": "check-properties",
                "rule": rule.name(),
                "budget": budget,
                "seed": seed,
                "properties": reports.iter().map(report::law).collect::<Vec<_>>(),
            });
            Ok(emit(if violated { EXIT_VIOLATION } else { EXIT_OK }, v))
        }
        Command::Equiv { tree, tree2, limit } => {
            let a = load_problem(&tree)?;
            let b = load_problem(&tree2)?;
            if a.space.labels() != b.space.labels() {
                return Err(CliError::Usage("the trees declare different possibility spaces".into()));
            }
            if a.utilities != b.utilities {
                return Err(CliError::Usage("the trees declare different reward tables".into()));
            }
            validate(&a.tree)?;
            validate(&b.tree)?;
            let eq = strategically_equivalent(&a.tree, &b.tree, limit)?;
            let ga = gamb_with_limit(&a.tree, limit)?;
            let gb = gamb_with_limit(&b.tree, limit)?;
            let v = json!({
                "command": "equiv",
                "equivalent": eq.equivalent,
                "same_event": eq.same_event,
                "only_first": report::gamble_set(&ga.difference(&gb), &a.utilities),
                "only_second": report::gamble_set(&gb.difference(&ga), &a.utilities),
            });
            Ok(emit(if eq.equivalent { EXIT_OK } else { EXIT_VIOLATION }, v))
        }
        Command::ExportDot {
            tree,
            solution,
            rule,
            context,
            method,
        } => {
            let p = load_tree(&tree)?;
            let marks = match (solution, rule) {
                (true, Some(kind)) => {
                    let r = build_rule(&p, &RuleArgs { rule: kind, context })?;
                    let solved = solve(&p.tree, &r, method, tree.limit)?;
                    Some(extract_extensive(&p.tree, &solved.solution)?)
                }
                (true, None) => return Err(CliError::Usage("--solution needs --rule".into())),
                (false, _) => None,
            };
            Ok(CommandOutput::ok(EXIT_OK, export_dot(&p, marks.as_ref())))
        }
    }
}
