//! Tab-separated result records with a `# key: value` header.

use std::fmt::Write;

use super::{BenchmarkResult, RunConfig, SweepResult};
use crate::tasks::Distribution;

pub const FORMAT_VERSION: &str = "fmelm-record/1";

const SELECTION_NOTE: &str = "best median test score over the grid; no nested validation, so optimistic";

fn summary_fields(out: &mut String, d: &Distribution) {
    let _ = writeln!(
        out,
        "# summary: min={} q1={} median={} q3={} max={}",
        d.min, d.q1, d.median, d.q3, d.max
    );
}

/// One row per repeat and `λ`, plus header fields with the config hash,
/// seed, selected `λ` and the score distribution at that `λ`.
pub fn benchmark_record(cfg: &RunConfig, result: &BenchmarkResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# format: {FORMAT_VERSION}");
    let _ = writeln!(out, "# kind: benchmark");
    let _ = writeln!(out, "# task: {}", cfg.task);
    let _ = writeln!(out, "# config_hash: {}", cfg.hash());
    let _ = writeln!(out, "# seed: {}", cfg.seed);
    let _ = writeln!(out, "# score: {}", result.kind.name());
    let _ = writeln!(out, "# lambda_selection: {SELECTION_NOTE}");
    let _ = writeln!(out, "# selected_lambda: {:e}", result.selected_lambda);
    summary_fields(&mut out, &result.metrics.summary);
    out.push_str("repeat\tlambda\tscore\n");
    for lm in &result.per_lambda {
        for (r, s) in lm.metrics.scores.iter().enumerate() {
            let _ = writeln!(out, "{r}\t{:e}\t{s}", lm.lambda);
        }
    }
    out
}

/// One row per grid cell, in long format (`d`, `m1`, `m2` columns), ready
/// to pivot into a heat map.
pub fn sweep_record(cfg: &RunConfig, result: &SweepResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# format: {FORMAT_VERSION}");
    let _ = writeln!(out, "# kind: sweep");
    let _ = writeln!(out, "# task: {}", cfg.task);
    let _ = writeln!(out, "# config_hash: {}", result.config_hash);
    let _ = writeln!(out, "# seed: {}", result.seed);
    let _ = writeln!(out, "# score: {}", result.kind.name());
    let _ = writeln!(out, "# repeats_per_cell: {}", cfg.repeats);
    let _ = writeln!(out, "# lambda_selection: {SELECTION_NOTE}");
    out.push_str("d\tm1\tm2\tlambda\tmin\tq1\tmedian\tq3\tmax\terror\n");
    for c in &result.cells {
        match &c.outcome {
            Ok(m) => {
                let s = &m.summary;
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{:e}\t{}\t{}\t{}\t{}\t{}\t",
                    c.d, c.m1, c.m2, m.selected_lambda, s.min, s.q1, s.median, s.q3, s.max
                );
            }
            Err(e) => {
                let e = e.replace(['\t', '\n'], " ");
                let _ = writeln!(out, "{}\t{}\t{}\tNaN\tNaN\tNaN\tNaN\tNaN\tNaN\t{e}", c.d, c.m1, c.m2);
            }
        }
    }
    out
}
