//! Stable text formats. Floats in CSV use 17 significant digits
//! (`{:.16e}`); JSON uses serde_json's shortest round-trip form.

use std::io::{self, Write};

use qagsim::{BitString, FrequencyTable, SimulationTrace};
use serde::Serialize;

pub const TRACE_SCHEMA: &str = "qagsim-trace/1";
pub const SAMPLE_SCHEMA: &str = "qagsim-sample/1";
pub const DUMP_SCHEMA: &str = "qagsim-dump/1";

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_trace_csv(w: &mut impl Write, trace: &SimulationTrace) -> io::Result<()> {
    let wide = trace.records.iter().any(|r| r.probabilities.is_some());
    let qubits = trace.metadata.n + trace.metadata.m;
    write!(w, "iteration,p_marked,entropy_bits")?;
    if wide {
        for i in 0..1usize << qubits {
            write!(w, ",p_{}", BitString::from_index(i, qubits))?;
        }
    }
    writeln!(w)?;
    for r in &trace.records {
        write!(
            w,
            "{},{},{}",
            r.iteration,
            float(r.p_marked),
            float(r.entropy_bits)
        )?;
        if let Some(ps) = &r.probabilities {
            for &p in ps {
                write!(w, ",{}", float(p))?;
            }
        }
        writeln!(w)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct TraceDocument<'a> {
    schema: &'static str,
    #[serde(flatten)]
    trace: &'a SimulationTrace,
}

pub fn write_trace_json(w: &mut impl Write, trace: &SimulationTrace) -> io::Result<()> {
    write_json(
        w,
        &TraceDocument {
            schema: TRACE_SCHEMA,
            trace,
        },
    )
}

pub fn write_json(w: &mut impl Write, value: &impl Serialize) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)
}

pub fn write_frequencies_csv(w: &mut impl Write, table: &FrequencyTable) -> io::Result<()> {
    writeln!(w, "kind,value,count,frequency")?;
    for (answer, &count) in &table.answers {
        writeln!(
            w,
            "answer,{answer},{count},{}",
            float(table.frequency(answer))
        )?;
    }
    for bit in [false, true] {
        writeln!(
            w,
            "ancilla,{},{},{}",
            bit as u8,
            table.ancilla[bit as usize],
            float(table.ancilla_frequency(bit))
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
pub struct CountRow {
    pub value: String,
    pub count: usize,
    pub frequency: f64,
}

#[derive(Serialize)]
pub struct SampleDocument {
    pub schema: &'static str,
    pub shots: usize,
    pub seed: u64,
    pub rng: &'static str,
    pub answers: Vec<CountRow>,
    pub ancilla: Vec<CountRow>,
}

impl SampleDocument {
    pub fn new(table: &FrequencyTable, seed: u64) -> Self {
        Self {
            schema: SAMPLE_SCHEMA,
            shots: table.shots,
            seed,
            rng: qagsim::engine::RNG_ALGORITHM,
            answers: table
                .answers
                .iter()
                .map(|(a, &count)| CountRow {
                    value: a.to_string(),
                    count,
                    frequency: table.frequency(a),
                })
                .collect(),
            ancilla: [false, true]
                .into_iter()
                .map(|b| CountRow {
                    value: (b as u8).to_string(),
                    count: table.ancilla[b as usize],
                    frequency: table.ancilla_frequency(b),
                })
                .collect(),
        }
    }
}
