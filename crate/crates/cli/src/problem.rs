//! Turning command-line problem arguments into oracles.

use qagsim::encoder::{injective_extension, permutation_operator, Problem};
use qagsim::linalg::checked_dim;
use qagsim::{Algorithm, GateAssembly, MarkedSet};

use crate::args::ProblemArgs;
use crate::error::{CliError, CliResult};

/// The problem named on the command line, if any.
pub fn resolve(args: &ProblemArgs) -> CliResult<Option<Problem>> {
    match (&args.table, args.marked.is_empty()) {
        (Some(_), false) => Err(CliError::config(
            "--marked and --table both given; pass exactly one",
        )),
        (Some(path), true) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let problem = Problem::from_json(&text)?;
            if let Some(n) = args.n {
                if n != problem.n() {
                    return Err(CliError::config(format!(
                        "--n {n} conflicts with n = {} in {}",
                        problem.n(),
                        path.display()
                    )));
                }
            }
            Ok(Some(problem))
        }
        (None, false) => {
            let n = args.n.unwrap_or(args.marked[0].len());
            let set = MarkedSet::parse(n, args.marked.iter().map(String::as_str))?;
            Ok(Some(Problem::Marked(set)))
        }
        (None, true) => Ok(None),
    }
}

pub fn require(args: &ProblemArgs) -> CliResult<Problem> {
    resolve(args)?
        .ok_or_else(|| CliError::config("a problem is required: pass --marked or --table"))
}

pub fn algorithm(args: &ProblemArgs) -> Algorithm {
    args.algorithm.into()
}

/// Dense stages for `problem`. The capacity check runs first so oversized
/// requests fail before any table is enumerated.
pub fn dense_assembly(algorithm: Algorithm, problem: &Problem) -> CliResult<GateAssembly> {
    let n = problem.n();
    checked_dim(n + 1)?;
    let table = problem.truth_table()?;
    if table.m() != 1 {
        return Err(CliError::config(format!(
            "oracles need a single output bit, the table has m = {}",
            table.m()
        )));
    }
    let oracle = permutation_operator(&injective_extension(&table))?;
    Ok(qagsim::assemble(algorithm, n, oracle)?)
}

/// The marked set behind a collapsed run.
pub fn collapsed_marked(algorithm: Algorithm, problem: &Problem) -> CliResult<MarkedSet> {
    match (algorithm, problem) {
        (Algorithm::Grover, Problem::Marked(set)) => Ok(set.clone()),
        (Algorithm::Grover, Problem::Table(_)) => Err(CliError::config(
            "the collapsed backend needs a marked set, not a truth table",
        )),
        (other, _) => Err(CliError::config(format!(
            "the collapsed backend only runs grover, not {other}"
        ))),
    }
}
