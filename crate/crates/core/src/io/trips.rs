use std::io::Read;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::generate::{draw_budget, draw_catalog, draw_skills, padded_id};
use super::{GenConfig, IoError};
use crate::model::{Instance, Point, Task, Worker};

/// Required header columns, matched by name after trimming.
pub const TRIP_COLUMNS: [&str; 6] = ["pickup_x", "pickup_y", "pickup_time", "dropoff_x", "dropoff_y", "dropoff_time"];

/// Coordinates must already be projected to meters.
#[derive(Debug, Clone, PartialEq)]
pub struct IngestConfig {
    /// Skills, fees, radius, budgets, prices and seed come from here;
    /// counts and bounding box are ignored.
    pub synth: GenConfig,
    pub delimiter: u8,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            synth: GenConfig::default(),
            delimiter: b',',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub instance: Instance,
    /// Rows that failed to parse and were dropped.
    pub skipped: usize,
}

/// One task (pickup) and one worker (dropoff) per well-formed record.
pub fn ingest_trips<R: Read>(input: R, cfg: &IngestConfig) -> Result<Ingested, IoError> {
    cfg.synth.validate()?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(cfg.delimiter)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);
    let headers = reader
        .headers()
        .map_err(|e| IoError::Trips(format!("cannot read header: {e}")))?
        .clone();
    let mut cols = [0usize; 6];
    for (slot, name) in cols.iter_mut().zip(TRIP_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| IoError::Trips(format!("header lacks column `{name}`")))?;
    }

    let mut rows: Vec<[f64; 6]> = Vec::new();
    let mut skipped = 0;
    for (line, record) in reader.records().enumerate() {
        let parsed = record.ok().and_then(|r| {
            let mut v = [0.0; 6];
            for (out, &c) in v.iter_mut().zip(&cols) {
                *out = r.get(c)?.parse::<f64>().ok().filter(|x| x.is_finite())?;
            }
            Some(v)
        });
        match parsed {
            Some(v) => rows.push(v),
            None => {
                log::warn!("skipping malformed trip record {}", line + 1);
                skipped += 1;
            }
        }
    }
    if rows.is_empty() {
        return Err(IoError::Trips(if skipped == 0 {
            "no records".into()
        } else {
            format!("all {skipped} records are malformed")
        }));
    }

    let synth = &cfg.synth;
    let mut rng = ChaCha8Rng::seed_from_u64(synth.seed);
    let catalog = draw_catalog(&mut rng, synth)?;
    let n = rows.len();
    let mut tasks = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let extra_budget = draw_budget(&mut rng, synth);
        let required_skills = draw_skills(&mut rng, synth.num_skills, synth.skills_per_task);
        tasks.push(Task {
            id: padded_id('t', i, n),
            location: Point::new(row[0], row[1]),
            arrival_time: row[2],
            fixed_radius: synth.fixed_radius,
            extra_budget,
            required_skills,
        });
    }
    let mut workers = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let skills = draw_skills(&mut rng, synth.num_skills, synth.skills_per_worker);
        workers.push(Worker {
            id: padded_id('w', i, n),
            location: Point::new(row[3], row[4]),
            arrival_time: row[5],
            skills,
        });
    }
    let instance = Instance::new(catalog, tasks, workers, synth.params()?, None)?;
    Ok(Ingested { instance, skipped })
}
