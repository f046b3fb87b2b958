//! Batch command-line driver: verify a case file against the splitting-sequence
//! search, explain a single instance, enumerate real Weil polynomials, or dump
//! the completions of a dataset row.

mod pipeline;
mod report;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use prymsieve_core::weil::{enumerate_real_weil, point_counts, ValueFilters};
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "prymsieve", version = prymsieve_core::VERSION)]
#[command(about = "exact-arithmetic search for splitting sequences of low-degree covers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CaseArgs {
    /// Case file path, or `builtin:table2` for the bundled dataset.
    #[arg(long, default_value = prymsieve_core::cases::BUILTIN_TOKEN)]
    cases: String,
    /// Search depth (number of place degrees).
    #[arg(long, default_value_t = 7)]
    depth: usize,
    /// Enable the pulled-back divisor-class restrictions on degree-1 and
    /// degree-3 splittings (off by default).
    #[arg(long, default_value_t = false)]
    castelnuovo_severi: bool,
    /// Worker threads for the case grid (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the full pipeline (load, complete, expand, sieve) on a case file.
    ///
    /// Exit code 0: every instance eliminated; 1: at least one survivor;
    /// 2: input error.
    Verify {
        #[command(flatten)]
        common: CaseArgs,
        /// Write the structured report to this file instead of stdout.
        #[arg(long)]
        report: Option<String>,
    },
    /// Print the per-depth surviving prefixes and derived trace vectors for
    /// one instance.
    Explain {
        #[command(flatten)]
        common: CaseArgs,
        /// Instance selector `<row>#<candidate>:<case>` (e.g. `d6-05#1:s6`),
        /// or `<row>:control` for a control row.
        #[arg(long)]
        case: String,
    },
    /// Enumerate real Weil polynomials under prescribed traces and filters.
    Weil {
        #[arg(long)]
        genus: usize,
        #[arg(long, default_value_t = 2)]
        q: u64,
        /// Comma-separated prescribed Frobenius traces p_1, p_2, ...
        #[arg(long, default_value = "")]
        sums: String,
        /// Require #A(F_q) to equal this value.
        #[arg(long)]
        order: Option<i64>,
        /// Require #A(F_q) to be divisible by this modulus.
        #[arg(long)]
        order_mod: Option<i64>,
        /// Number of point counts to print per polynomial.
        #[arg(long, default_value_t = 7)]
        counts: usize,
    },
    /// Dump the completions of the rows of a case file.
    Complete {
        #[command(flatten)]
        common: CaseArgs,
        /// Restrict to one row label.
        #[arg(long)]
        row: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Verify { common, report } => {
            let outcome = pipeline::run_verify(&common.cases, &pipeline::Options {
                depth: common.depth,
                castelnuovo_severi: common.castelnuovo_severi,
                jobs: common.jobs,
            })?;
            let text = report::render_report(&outcome);
            match report {
                Some(path) => {
                    std::fs::write(&path, &text).with_context(|| format!("writing {path}"))?;
                    eprintln!(
                        "{} instances, {} eliminated, {} survivors ({} ms)",
                        outcome.instance_count(),
                        outcome.eliminated_count(),
                        outcome.survivor_count(),
                        outcome.duration_ms
                    );
                }
                None => print!("{text}"),
            }
            Ok(if outcome.survivor_count() == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Explain { common, case } => {
            let outcome = pipeline::run_verify(&common.cases, &pipeline::Options {
                depth: common.depth,
                castelnuovo_severi: common.castelnuovo_severi,
                jobs: common.jobs,
            })?;
            let rep = outcome
                .reports
                .iter()
                .find(|r| r.instance_id == case)
                .with_context(|| {
                    let mut ids: Vec<&str> =
                        outcome.reports.iter().map(|r| r.instance_id.as_str()).collect();
                    ids.sort();
                    format!("unknown instance `{case}`; known: {}", ids.join(", "))
                })?;
            print!("{}", report::render_explain(rep));
            Ok(ExitCode::SUCCESS)
        }
        Command::Weil {
            genus,
            q,
            sums,
            order,
            order_mod,
            counts,
        } => {
            let prescribed: Vec<i64> = if sums.trim().is_empty() {
                Vec::new()
            } else {
                sums.split(',')
                    .map(|t| t.trim().parse::<i64>())
                    .collect::<Result<_, _>>()
                    .context("bad --sums")?
            };
            let mut filters = ValueFilters::default();
            if let Some(v) = order {
                filters.order_exact.push((1, v));
            }
            if let Some(m) = order_mod {
                filters.order_divisible.push((1, m));
            }
            let out = enumerate_real_weil(genus, q, &prescribed, &filters)?;
            if let Some(reason) = &out.short_circuit {
                bail!("inconsistent prescription: {reason:?}");
            }
            for p in &out.polys {
                let profile = point_counts(p, counts)
                    .map(|pr| {
                        pr.counts
                            .iter()
                            .map(|c| c.unwrap().to_string())
                            .collect::<Vec<_>>()
                            .join(",")
                    })
                    .unwrap_or_else(|_| "negative count".to_string());
                println!("{p}  N=({profile})");
            }
            eprintln!("{} polynomial(s)", out.polys.len());
            Ok(ExitCode::SUCCESS)
        }
        Command::Complete { common, row } => {
            let rows = prymsieve_core::cases::load_cases(&common.cases)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            let mut found = false;
            for r in &rows {
                if let Some(want) = &row {
                    if &r.label != want {
                        continue;
                    }
                }
                found = true;
                if r.control {
                    println!("{}: control row (no completion)", r.label);
                    continue;
                }
                let resolved = prymsieve_core::cases::complete_candidate(r)
                    .map_err(|e| anyhow::anyhow!("{e}"))?;
                for cand in &resolved {
                    println!(
                        "{}#{}: h_C={} h_A={} C=({}) C'=({})",
                        r.label,
                        cand.index,
                        cand.h_c,
                        cand.h_a,
                        join_counts(&cand.profile_c.counts),
                        join_counts(&cand.profile_cprime.counts),
                    );
                }
            }
            if !found {
                bail!("no matching row");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn join_counts(counts: &[Option<i64>]) -> String {
    counts
        .iter()
        .map(|c| c.map_or("*".to_string(), |v| v.to_string()))
        .collect::<Vec<_>>()
        .join(",")
}
