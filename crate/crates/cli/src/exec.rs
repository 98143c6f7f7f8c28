//! Backend selection and execution shared by `run` and `sample`.

use qagsim::engine::{run_until_entropy_stop, TraceOptions, RNG_ALGORITHM};
use qagsim::fastgrover::{
    collapsed_run_until_entropy_stop, collapsed_trace_sampled, jump_to_optimal, max_deviation,
};
use qagsim::{
    collapsed_init, collapsed_run, Algorithm, CollapsedState, MarkedSet, QuantumState, Sampling,
    SimulationTrace,
};

use crate::args::{BackendArg, ExecArgs, Iterations, SamplingArg};
use crate::error::{CliError, CliResult};
use crate::problem;

/// Iteration counts above this are traced at log2-spaced points under `auto`.
pub const AUTO_EVERY_LIMIT: u64 = 1 << 20;

pub enum FinalState {
    Dense(QuantumState),
    Collapsed(CollapsedState, MarkedSet),
}

pub struct Execution {
    pub algorithm: Algorithm,
    pub n: usize,
    /// One trace per backend; dense first in `both` mode.
    pub traces: Vec<SimulationTrace>,
    pub state: FinalState,
    pub iterations: u64,
    pub stop_iteration: Option<u64>,
    pub deviation: Option<Deviation>,
}

#[derive(Clone, Copy, Debug)]
pub struct Deviation {
    pub p_marked: f64,
    pub entropy_bits: f64,
    pub tolerance: f64,
}

impl Deviation {
    pub fn exceeded(&self) -> bool {
        !(self.p_marked <= self.tolerance && self.entropy_bits <= self.tolerance)
    }
}

pub fn execute(
    args: &ExecArgs,
    options: TraceOptions,
    sampling: SamplingArg,
) -> CliResult<Execution> {
    let algorithm = problem::algorithm(&args.problem);
    let problem = problem::require(&args.problem)?;
    if args.max_iterations == 0 {
        return Err(CliError::config("--max-iterations must be at least 1"));
    }
    let mut exec = match args.backend {
        BackendArg::Dense => dense(algorithm, &problem, args, options)?,
        BackendArg::Collapsed => {
            let marked = problem::collapsed_marked(algorithm, &problem)?;
            collapsed(marked, args, sampling)?
        }
        BackendArg::Both => {
            if sampling == SamplingArg::Log2 {
                return Err(CliError::config(
                    "--backend both compares every iteration; --sampling log2 is not allowed",
                ));
            }
            if args.tolerance.is_nan() || args.tolerance < 0.0 {
                return Err(CliError::config("--tolerance must be non-negative"));
            }
            let marked = problem::collapsed_marked(algorithm, &problem)?;
            both(algorithm, &problem, marked, args, options)?
        }
    };
    for trace in &mut exec.traces {
        trace.metadata.rng = Some(RNG_ALGORITHM.to_string());
    }
    Ok(exec)
}

fn dense(
    algorithm: Algorithm,
    problem: &qagsim::Problem,
    args: &ExecArgs,
    options: TraceOptions,
) -> CliResult<Execution> {
    let assembly = problem::dense_assembly(algorithm, problem)?;
    let (state, trace, iterations, stop) = match args.iterations {
        Iterations::EntropyStop => {
            let (state, trace, k) =
                run_until_entropy_stop(&assembly, args.window, args.max_iterations, options)?;
            (state, trace, k, Some(k))
        }
        Iterations::Optimal => {
            let k = assembly.iterations;
            let (state, trace) = qagsim::run(&assembly, k, options)?;
            (state, trace, k, None)
        }
        Iterations::Explicit(k) => {
            let (state, trace) = qagsim::run(&assembly, k, options)?;
            (state, trace, k, None)
        }
    };
    Ok(Execution {
        algorithm,
        n: assembly.n,
        traces: vec![trace],
        state: FinalState::Dense(state),
        iterations,
        stop_iteration: stop,
        deviation: None,
    })
}

fn collapsed(marked: MarkedSet, args: &ExecArgs, sampling: SamplingArg) -> CliResult<Execution> {
    let n = marked.n();
    let count = marked.len() as u64;
    let (state, trace, iterations, stop) = match args.iterations {
        Iterations::EntropyStop => {
            let (state, trace, k) =
                collapsed_run_until_entropy_stop(n, count, args.window, args.max_iterations)?;
            (state, trace, k, Some(k))
        }
        Iterations::Optimal | Iterations::Explicit(_) => {
            let k = match args.iterations {
                Iterations::Explicit(k) => k,
                _ => jump_to_optimal::<f64>(n, count)?.iterations,
            };
            let every = match sampling {
                SamplingArg::Every => true,
                SamplingArg::Log2 => false,
                SamplingArg::Auto => k <= AUTO_EVERY_LIMIT,
            };
            if every {
                let (state, trace) = collapsed_run(n, count, k)?;
                (state, trace, k, None)
            } else {
                let trace = collapsed_trace_sampled(n, count, k, Sampling::Log2)?;
                let state = collapsed_init(n, count)?.jump_to(k);
                (state, trace, k, None)
            }
        }
    };
    Ok(Execution {
        algorithm: Algorithm::Grover,
        n,
        traces: vec![trace],
        state: FinalState::Collapsed(state, marked),
        iterations,
        stop_iteration: stop,
        deviation: None,
    })
}

fn both(
    algorithm: Algorithm,
    problem: &qagsim::Problem,
    marked: MarkedSet,
    args: &ExecArgs,
    options: TraceOptions,
) -> CliResult<Execution> {
    let (dense, collapsed) = std::thread::scope(|s| {
        let d = s.spawn(|| dense(algorithm, problem, args, options));
        let c = s.spawn(|| collapsed(marked, args, SamplingArg::Every));
        (
            d.join().expect("dense backend panicked"),
            c.join().expect("collapsed backend panicked"),
        )
    });
    let (mut dense, mut collapsed) = (dense?, collapsed?);
    if dense.iterations != collapsed.iterations {
        return Err(CliError::Disagreement(format!(
            "dense stopped after {} iterations, collapsed after {}",
            dense.iterations, collapsed.iterations
        )));
    }
    let (dp, de) = max_deviation(&dense.traces[0], &collapsed.traces[0])?;
    dense.deviation = Some(Deviation {
        p_marked: dp,
        entropy_bits: de,
        tolerance: args.tolerance,
    });
    dense.traces.append(&mut collapsed.traces);
    Ok(dense)
}
