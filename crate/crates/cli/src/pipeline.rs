//! Load, complete, expand, and sieve a case file; collect per-instance reports
//! plus the run manifest data.

use anyhow::Result;
use prymsieve_core::cases::{
    complete_candidate, control_instance, expand_to_grid, load_cases, ResolvedCandidate,
    BUILTIN_DATASET, BUILTIN_TOKEN,
};
use prymsieve_core::sieve::{sieve, SieveOptions, SieveReport, WeilCache};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

pub struct Options {
    pub depth: usize,
    pub castelnuovo_severi: bool,
    pub jobs: usize,
}

pub struct RowSummary {
    pub label: String,
    pub control: bool,
    pub etale: bool,
    pub resolutions: usize,
    pub instances: usize,
}

pub struct VerifyOutcome {
    pub dataset_hash: String,
    pub depth: usize,
    pub castelnuovo_severi: bool,
    pub rows: Vec<RowSummary>,
    pub reports: Vec<SieveReport>,
    pub duration_ms: u128,
}

impl VerifyOutcome {
    pub fn instance_count(&self) -> usize {
        self.reports.len()
    }

    pub fn eliminated_count(&self) -> usize {
        self.reports.iter().filter(|r| r.eliminated()).count()
    }

    pub fn survivor_count(&self) -> usize {
        self.reports.iter().filter(|r| !r.eliminated()).count()
    }
}

pub fn run_verify(cases_path: &str, opts: &Options) -> Result<VerifyOutcome> {
    let started = std::time::Instant::now();
    let text = if cases_path == BUILTIN_TOKEN {
        BUILTIN_DATASET.to_string()
    } else {
        std::fs::read_to_string(cases_path)?
    };
    let dataset_hash = format!("{:x}", Sha256::digest(text.as_bytes()));
    let rows = load_cases(cases_path).map_err(|e| anyhow::anyhow!("{e}"))?;

    if opts.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build_global()
            .ok();
    }

    // Completion parallelizes per row; instance construction stays in row order.
    let completed: Vec<(usize, Result<Vec<ResolvedCandidate>>)> = rows
        .par_iter()
        .enumerate()
        .map(|(i, row)| {
            if row.control {
                return (i, Ok(Vec::new()));
            }
            (
                i,
                complete_candidate(row).map_err(|e| anyhow::anyhow!("{e}")),
            )
        })
        .collect();
    let mut resolved_by_row: Vec<Vec<ResolvedCandidate>> = vec![Vec::new(); rows.len()];
    for (i, r) in completed {
        resolved_by_row[i] = r?;
    }

    let mut row_summaries = Vec::with_capacity(rows.len());
    let mut instances = Vec::new();
    for (row, resolved) in rows.iter().zip(&resolved_by_row) {
        let count;
        if row.control {
            let inst = control_instance(row).map_err(|e| anyhow::anyhow!("{e}"))?;
            count = 1;
            instances.push(inst);
        } else {
            let expanded = expand_to_grid(resolved);
            count = expanded.len();
            instances.extend(expanded);
        }
        row_summaries.push(RowSummary {
            label: row.label.clone(),
            control: row.control,
            etale: row.etale(),
            resolutions: resolved.len(),
            instances: count,
        });
    }

    let sieve_opts = SieveOptions {
        depth: opts.depth,
        castelnuovo_severi: opts.castelnuovo_severi,
        ..Default::default()
    };
    let cache = WeilCache::new();
    let mut reports: Vec<SieveReport> = instances
        .par_iter()
        .map(|inst| sieve(inst, &sieve_opts, &cache).map_err(|e| anyhow::anyhow!("{e}")))
        .collect::<Result<_>>()?;
    reports.sort_by(|a, b| a.instance_id.cmp(&b.instance_id));

    Ok(VerifyOutcome {
        dataset_hash,
        depth: opts.depth,
        castelnuovo_severi: opts.castelnuovo_severi,
        rows: row_summaries,
        reports,
        duration_ms: started.elapsed().as_millis(),
    })
}

