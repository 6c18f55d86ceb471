use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::harness::{Engine, ReplicateRecord};
use crate::params::ModelParams;

/// One simulated replicate as written by `rumour simulate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub engine: String,
    pub n: u64,
    pub k: u64,
    pub replicate_index: u64,
    pub seed: u64,
    #[serde(rename = "T")]
    pub terminal_time: u64,
    #[serde(rename = "S_T")]
    pub terminal_susceptibles: u64,
    pub fraction: f64,
}

impl RunRecord {
    pub fn new(engine: Engine, params: &ModelParams, rec: &ReplicateRecord) -> Self {
        Self {
            engine: engine.name().to_string(),
            n: params.n(),
            k: params.k(),
            replicate_index: rec.index,
            seed: rec.seed,
            terminal_time: rec.outcome.terminal_time,
            terminal_susceptibles: rec.outcome.terminal_susceptibles,
            fraction: rec.outcome.fraction(params.n()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Jsonl,
    Csv,
}

pub fn write_records<W: Write + ?Sized>(records: &[RunRecord], format: OutputFormat, out: &mut W) -> Result<()> {
    match format {
        OutputFormat::Jsonl => {
            for r in records {
                serde_json::to_writer(&mut *out, r)?;
                out.write_all(b"\n")?;
            }
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            for r in records {
                w.serialize(r)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}
