//! Repeats a scenario over a range of one numeric parameter.

use std::path::{Path, PathBuf};

use nlvn_core::feedback::LOGGED_MOMENTS;
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::run::{run_scenario, RunSummary};
use crate::scenario::{time_grid, Scenario};
use crate::table::Table;

/// Most values a single sweep may visit.
pub const MAX_SWEEP_VALUES: usize = 10_000;

/// Parses `A:B:STEP` into the visited values, `A` and `B` included when the
/// step divides the span.
pub fn parse_range(text: &str) -> CliResult<Vec<f64>> {
    let bad = |why: &str| CliError::validation(format!("range {text:?}: {why}"));
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, step] = parts.as_slice() else {
        return Err(bad("expected A:B:STEP"));
    };
    let num = |s: &str| s.trim().parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| bad("not a number"));
    let (a, b, step) = (num(a)?, num(b)?, num(step)?);
    if !(step > 0.0) {
        return Err(bad("STEP must be positive"));
    }
    if b < a {
        return Err(bad("need A <= B"));
    }
    if a == b {
        return Ok(vec![a]);
    }
    if (b - a) / step >= MAX_SWEEP_VALUES as f64 {
        return Err(bad("too many values"));
    }
    Ok(time_grid(a, b, step))
}

#[derive(Clone, Debug)]
pub struct SweepSummary {
    pub runs: Vec<(f64, RunSummary)>,
    pub summary_file: PathBuf,
}

/// Runs `base` once per value, naming each run `<name>_<param>=<value>`, and
/// writes `<name>_sweep.csv` with the drift of every run.
pub fn sweep(base: &Scenario, param: &str, values: &[f64], out_dir: &Path) -> CliResult<SweepSummary> {
    let scenarios = values
        .iter()
        .map(|&v| {
            let mut s = base.with_param(param, v)?;
            s.name = format!("{}_{param}={v:?}", base.name);
            Ok((v, s))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let runs = scenarios.par_iter().map(|(v, s)| Ok((*v, run_scenario(s, out_dir)?))).collect::<CliResult<Vec<_>>>()?;

    let mut columns = vec![param.to_string(), "samples".into(), "energy_drift".into()];
    columns.extend((1..=LOGGED_MOMENTS).map(|n| format!("c{n}_drift")));
    columns.push("spectrum_drift".into());
    let rows = runs
        .iter()
        .map(|(v, r)| {
            let mut row = vec![*v, r.samples as f64, r.drift.energy];
            row.extend_from_slice(&r.drift.moments);
            row.push(r.drift.spectrum);
            row
        })
        .collect();
    let table = Table::new(format!("{}\nsweep param={param}", base.stamp()), columns).with_rows(rows);
    let summary_file = out_dir.join(format!("{}_sweep.csv", base.name));
    table.save(&summary_file)?;
    Ok(SweepSummary { runs, summary_file })
}
