//! Structured-text rendering of run manifests and per-instance reports.
//!
//! The report schema is line oriented and byte-stable for fixed inputs and
//! tool version, with one exception: the `duration-ms` line reflects wall
//! clock and varies between runs.

use crate::pipeline::VerifyOutcome;
use prymsieve_core::sieve::{FrontierEntry, SieveReport};
use std::fmt::Write;

pub fn render_report(outcome: &VerifyOutcome) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "prymsieve-report v1");
    let _ = writeln!(s, "tool: prymsieve {}", prymsieve_core::VERSION);
    let _ = writeln!(s, "dataset: sha256:{}", outcome.dataset_hash);
    let _ = writeln!(
        s,
        "options: depth={} castelnuovo-severi={}",
        outcome.depth,
        if outcome.castelnuovo_severi { "on" } else { "off" }
    );
    let _ = writeln!(s, "duration-ms: {}", outcome.duration_ms);
    let _ = writeln!(s, "rows: {}", outcome.rows.len());
    let _ = writeln!(s, "instances: {}", outcome.instance_count());
    let _ = writeln!(s, "eliminated: {}", outcome.eliminated_count());
    let _ = writeln!(s, "survivors: {}", outcome.survivor_count());
    let _ = writeln!(s);
    for row in &outcome.rows {
        let kind = if row.control {
            "control"
        } else if row.etale {
            "etale"
        } else {
            "ramified"
        };
        let _ = writeln!(
            s,
            "row {} kind={} resolutions={} instances={}",
            row.label, kind, row.resolutions, row.instances
        );
    }
    let _ = writeln!(s);
    for rep in &outcome.reports {
        render_instance(&mut s, rep);
    }
    s
}

fn render_instance(s: &mut String, rep: &SieveReport) {
    let _ = writeln!(s, "instance {}", rep.instance_id);
    let _ = writeln!(
        s,
        "  outcome: {}",
        match rep.outcome {
            prymsieve_core::sieve::Outcome::Eliminated => "eliminated",
            prymsieve_core::sieve::Outcome::Survived => "survived",
        }
    );
    match &rep.static_failure {
        Some(f) => {
            let _ = writeln!(s, "  static: fail ({f})");
        }
        None => {
            let _ = writeln!(s, "  static: pass");
            let _ = writeln!(s, "  max-depth: {}", rep.max_depth_reached);
            for (i, frontier) in rep.frontiers.iter().enumerate() {
                if frontier.total == 0 {
                    continue;
                }
                let _ = writeln!(s, "  frontier depth={} total={}", i + 1, frontier.total);
                for entry in &frontier.entries {
                    let _ = writeln!(s, "    prefix {}", entry.prefix);
                    let _ = writeln!(s, "      {}", trace_line(entry));
                }
            }
            for cut in &rep.cuts {
                let _ = writeln!(
                    s,
                    "  cut depth={} reason={} count={}",
                    cut.depth, cut.label, cut.count
                );
                for entry in &cut.exemplars {
                    let _ = writeln!(s, "    at {}", entry.prefix);
                    if !entry.traces.is_empty() {
                        let _ = writeln!(s, "      {}", trace_line(entry));
                    }
                }
            }
            if rep.survivor_total > 0 {
                let _ = writeln!(s, "  survivors: {}", rep.survivor_total);
                for entry in &rep.survivors {
                    let _ = writeln!(s, "    {}", entry.prefix);
                }
            }
        }
    }
    let _ = writeln!(s);
}

fn trace_line(entry: &FrontierEntry) -> String {
    if entry.traces.is_empty() {
        return "traces: none".to_string();
    }
    let parts: Vec<String> = entry
        .traces
        .iter()
        .map(|f| {
            format!(
                "{}=({})",
                f.name,
                f.traces
                    .iter()
                    .map(|t| t.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            )
        })
        .collect();
    format!("traces: {}", parts.join(" "))
}

pub fn render_explain(rep: &SieveReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "instance {}", rep.instance_id);
    match &rep.static_failure {
        Some(f) => {
            let _ = writeln!(s, "eliminated before search: {f}");
            return s;
        }
        None => {}
    }
    for (i, frontier) in rep.frontiers.iter().enumerate() {
        let depth = i + 1;
        if frontier.total == 0 {
            let _ = writeln!(s, "depth {depth}: no surviving prefix");
            break;
        }
        let _ = writeln!(s, "depth {depth}: {} surviving prefix(es)", frontier.total);
        for entry in &frontier.entries {
            let _ = writeln!(s, "  {}", entry.prefix);
            let _ = writeln!(s, "    {}", trace_line(entry));
        }
    }
    for cut in &rep.cuts {
        let _ = writeln!(
            s,
            "cut at depth {}: {} ({} branches)",
            cut.depth, cut.label, cut.count
        );
        for entry in &cut.exemplars {
            let _ = writeln!(s, "  {}", entry.prefix);
            if !entry.traces.is_empty() {
                let _ = writeln!(s, "    {}", trace_line(entry));
            }
        }
    }
    let _ = writeln!(
        s,
        "outcome: {}",
        if rep.eliminated() {
            "eliminated"
        } else {
            "survived"
        }
    );
    s
}
