use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use qagsim::engine::{rng_from_seed, TraceOptions, RNG_ALGORITHM};
use qagsim::fastgrover::sample_collapsed;
use qagsim::linalg::set_dense_cap;
use qagsim::{
    diffusion, hadamard_word, measure, measure_many, DenseOperator, FrequencyTable, SimulationTrace,
};
use serde::Serialize;

use crate::args::{
    BackendArg, Cli, Command, DumpArgs, DumpOperator, Format, RunArgs, SampleArgs, SamplingArg,
};
use crate::error::{CliError, CliResult};
use crate::exec::{execute, Deviation, Execution, FinalState};
use crate::output;
use crate::problem;

/// Qubit limit for per-basis and amplitude columns.
pub const MAX_WIDE_QUBITS: usize = 12;

pub fn dispatch(cli: Cli) -> CliResult<()> {
    set_dense_cap(cli.dense_cap)?;
    match cli.command {
        Command::Run(args) => run(&args),
        Command::Dump(args) => dump(&args),
        Command::Sample(args) => sample(&args),
    }
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

/// Runs `body` against `path`, or against stdout when `path` is `None`.
fn with_output(
    path: Option<&Path>,
    body: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> CliResult<()> {
    match path {
        Some(p) => {
            let mut w = create(p)?;
            body(&mut w)
                .and_then(|_| w.flush())
                .map_err(|e| CliError::io(p, e))
        }
        None => {
            let mut w = BufWriter::new(io::stdout().lock());
            body(&mut w)
                .and_then(|_| w.flush())
                .map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

fn trace_options(args: &RunArgs) -> CliResult<TraceOptions> {
    if args.per_basis || args.amplitudes {
        if args.exec.backend != BackendArg::Dense {
            return Err(CliError::config(
                "--per-basis and --amplitudes need --backend dense",
            ));
        }
        if let Some(problem) = problem::resolve(&args.exec.problem)? {
            if problem.n() + 1 > MAX_WIDE_QUBITS {
                return Err(CliError::config(format!(
                    "--per-basis and --amplitudes are limited to {MAX_WIDE_QUBITS} qubits, got {}",
                    problem.n() + 1
                )));
            }
        }
    }
    Ok(TraceOptions {
        per_basis: args.per_basis,
        amplitudes: args.amplitudes,
        max_wide_qubits: MAX_WIDE_QUBITS,
    })
}

#[derive(Serialize)]
struct Measurement {
    seed: u64,
    rng: &'static str,
    raw_bits: String,
    answer: String,
    ancilla: u8,
}

#[derive(Serialize)]
struct DeviationReport {
    p_marked: f64,
    entropy_bits: f64,
    tolerance: f64,
}

impl From<Deviation> for DeviationReport {
    fn from(d: Deviation) -> Self {
        Self {
            p_marked: d.p_marked,
            entropy_bits: d.entropy_bits,
            tolerance: d.tolerance,
        }
    }
}

#[derive(Serialize)]
struct Summary {
    algorithm: qagsim::Algorithm,
    backend: &'static str,
    n: usize,
    marked_count: String,
    iterations: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    stop_iteration: Option<u64>,
    p_marked: f64,
    entropy_bits: f64,
    /// Probability of the all-zero register, reported by the dense backend.
    #[serde(skip_serializing_if = "Option::is_none")]
    p_register_zero: Option<f64>,
    answer: String,
    measurement: Measurement,
    #[serde(skip_serializing_if = "Option::is_none")]
    deviation: Option<DeviationReport>,
}

fn backend_name(b: BackendArg) -> &'static str {
    match b {
        BackendArg::Dense => "dense",
        BackendArg::Collapsed => "collapsed",
        BackendArg::Both => "both",
    }
}

fn summarize(exec: &Execution, backend: BackendArg, seed: u64) -> Summary {
    let last = exec.traces[0].last();
    let (outcome, p_zero) = match &exec.state {
        FinalState::Dense(state) => {
            let register = state.register_probabilities(exec.n);
            (measure(state, seed), Some(register[0]))
        }
        FinalState::Collapsed(state, marked) => {
            (state.sample(marked, &mut rng_from_seed(seed)), None)
        }
    };
    Summary {
        algorithm: exec.algorithm,
        backend: backend_name(backend),
        n: exec.n,
        marked_count: exec.traces[0].metadata.marked_count.clone(),
        iterations: exec.iterations,
        stop_iteration: exec.stop_iteration,
        p_marked: last.p_marked,
        entropy_bits: last.entropy_bits,
        p_register_zero: p_zero,
        answer: outcome.answer_bits.to_string(),
        measurement: Measurement {
            seed,
            rng: RNG_ALGORITHM,
            raw_bits: outcome.raw_bits.to_string(),
            answer: outcome.answer_bits.to_string(),
            ancilla: outcome.ancilla_bit as u8,
        },
        deviation: exec.deviation.map(Into::into),
    }
}

fn write_trace(mut w: &mut dyn Write, trace: &SimulationTrace, format: Format) -> io::Result<()> {
    match format {
        Format::Csv => output::write_trace_csv(&mut w, trace),
        Format::Json => output::write_trace_json(&mut w, trace),
    }
}

fn disagreement(d: &Deviation) -> CliError {
    CliError::Disagreement(format!(
        "max |dp_marked| = {:e}, max |dentropy| = {:e}, tolerance {:e}",
        d.p_marked, d.entropy_bits, d.tolerance
    ))
}

fn run(args: &RunArgs) -> CliResult<()> {
    let options = trace_options(args)?;
    let exec = execute(&args.exec, options, args.sampling)?;
    let summary = summarize(&exec, args.exec.backend, args.exec.seed);
    let ext = match args.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    match &args.out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            for trace in &exec.traces {
                let name = if exec.traces.len() == 1 {
                    format!("trace.{ext}")
                } else {
                    format!("trace_{}.{ext}", trace.metadata.backend)
                };
                let path = dir.join(name);
                with_output(Some(&path), |w| write_trace(w, trace, args.format))?;
            }
            let path = dir.join("summary.json");
            with_output(Some(&path), |mut w| output::write_json(&mut w, &summary))?;
        }
        None => {
            // stdout carries one document; `both` writes the collapsed trace with --out-dir only
            with_output(None, |w| write_trace(w, &exec.traces[0], args.format))?;
            let mut err = io::stderr().lock();
            output::write_json(&mut err, &summary).map_err(|e| CliError::io("<stderr>", e))?;
        }
    }
    match exec.deviation {
        Some(d) if d.exceeded() => Err(disagreement(&d)),
        _ => Ok(()),
    }
}

fn sample(args: &SampleArgs) -> CliResult<()> {
    if args.shots == 0 {
        return Err(CliError::config("--shots must be at least 1"));
    }
    let exec = execute(&args.exec, TraceOptions::scalars_only(), SamplingArg::Auto)?;
    if let Some(d) = exec.deviation.filter(Deviation::exceeded) {
        return Err(disagreement(&d));
    }
    let outcomes = match &exec.state {
        FinalState::Dense(state) => measure_many(state, args.shots, args.exec.seed),
        FinalState::Collapsed(state, marked) => {
            sample_collapsed(state, marked, args.shots, args.exec.seed)
        }
    };
    let table = FrequencyTable::from_outcomes(&outcomes);
    with_output(args.out.as_deref(), |mut w| match args.format {
        Format::Csv => output::write_frequencies_csv(&mut w, &table),
        Format::Json => {
            output::write_json(&mut w, &output::SampleDocument::new(&table, args.exec.seed))
        }
    })
}

#[derive(Serialize)]
struct NamedMatrix {
    name: &'static str,
    dim: usize,
    matrix: Vec<Vec<[f64; 2]>>,
}

impl NamedMatrix {
    fn new(name: &'static str, op: &DenseOperator) -> Self {
        Self {
            name,
            dim: op.dim(),
            matrix: op.to_nested(),
        }
    }
}

#[derive(Serialize)]
struct DumpDocument {
    schema: &'static str,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    algorithm: Option<qagsim::Algorithm>,
    #[serde(skip_serializing_if = "Option::is_none")]
    iterations: Option<u64>,
    operators: Vec<NamedMatrix>,
}

fn dump(args: &DumpArgs) -> CliResult<()> {
    let problem = problem::resolve(&args.problem)?;
    let standalone = matches!(
        args.operator,
        DumpOperator::Diffusion | DumpOperator::Hadamard
    );
    let doc = if standalone {
        let n = problem
            .as_ref()
            .map(|p| p.n())
            .or(args.problem.n)
            .ok_or_else(|| CliError::config("--n is required"))?;
        if n == 0 {
            return Err(CliError::config("--n must be positive"));
        }
        let (name, op) = match args.operator {
            DumpOperator::Diffusion => ("diffusion", diffusion(n)?),
            _ => ("hadamard", hadamard_word(n)?),
        };
        DumpDocument {
            schema: output::DUMP_SCHEMA,
            n,
            algorithm: None,
            iterations: None,
            operators: vec![NamedMatrix::new(name, &op)],
        }
    } else {
        let problem = problem::require(&args.problem)?;
        let assembly = problem::dense_assembly(problem::algorithm(&args.problem), &problem)?;
        let want = |op: DumpOperator| args.operator == DumpOperator::All || args.operator == op;
        let mut operators = Vec::new();
        if want(DumpOperator::Oracle) {
            operators.push(NamedMatrix::new(
                "oracle",
                &assembly.entanglement.to_dense()?,
            ));
        }
        if want(DumpOperator::Superposition) {
            operators.push(NamedMatrix::new("superposition", &assembly.superposition));
        }
        if want(DumpOperator::Interference) {
            operators.push(NamedMatrix::new("interference", &assembly.interference));
        }
        if want(DumpOperator::Gate) {
            operators.push(NamedMatrix::new(
                "gate",
                &assembly.compose(assembly.iterations)?,
            ));
        }
        DumpDocument {
            schema: output::DUMP_SCHEMA,
            n: assembly.n,
            algorithm: Some(assembly.algorithm),
            iterations: Some(assembly.iterations),
            operators,
        }
    };
    with_output(args.out.as_deref(), |mut w| {
        output::write_json(&mut w, &doc)
    })
}
