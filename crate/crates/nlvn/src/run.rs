//! Evaluates a scenario on its time grid and writes the requested tables.

use std::path::{Path, PathBuf};

use nlvn_core::feedback::{integrate, residual, ConservedSample, DriftSummary, DEFAULT_FD_STEP, LOGGED_MOMENTS};
use nlvn_core::linalg::hermitian_eigensystem;
use nlvn_core::observables::{
    complementarity_propositions, position_density, ppt_is_positive, uncertainty_report, von_neumann_entropy,
    OscillatorBasis,
};
use nlvn_core::solutions::switching_functions;
use nlvn_core::{DensityState, IntegratorConfig};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::scenario::{Mode, Model, OutputKind, Scenario};
use crate::table::Table;

/// Environment variable overriding every output directory.
pub const OUT_DIR_ENV: &str = "NLVN_OUT_DIR";

/// Picks the output directory: an explicit flag, then [`OUT_DIR_ENV`], then
/// the scenario's own `output_path`, then the working directory.
pub fn resolve_out_dir(explicit: Option<&Path>, fallback: Option<&Path>) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => fallback.map_or_else(|| PathBuf::from("."), Path::to_path_buf),
    }
}

/// Sampled states of a scenario together with their conservation drift.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub times: Vec<f64>,
    pub states: Vec<DensityState>,
    pub drift: DriftSummary,
}

pub fn evaluate(s: &Scenario) -> CliResult<Evaluation> {
    let (h, f) = (s.model.hamiltonian(), s.model.feedback());
    match s.mode {
        Mode::ClosedForm => {
            let times = s.times();
            let states = times.par_iter().map(|&t| s.model.state(t)).collect::<Result<Vec<_>, _>>()?;
            let reference = states[0].spectrum();
            let samples = states
                .par_iter()
                .map(|st| ConservedSample::measure(st, &h, &f, &reference))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Evaluation { times, states, drift: DriftSummary::from_samples(&samples) })
        }
        Mode::Integrate => {
            let grid = s.times();
            let t_last = *grid.last().expect("grids have at least one point");
            if grid.len() < 2 {
                return Err(CliError::validation("integration needs at least two sample times"));
            }
            let stride = (s.t_step / s.dt).round() as usize;
            let rho0 = s.model.state(s.t_start)?;
            let traj = integrate(&rho0, &h, &f, s.t_start, t_last, &IntegratorConfig::new(s.dt).with_stride(stride))?;
            let drift = traj.drift();
            Ok(Evaluation { times: traj.times, states: traj.states, drift })
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub drift: DriftSummary,
    pub samples: usize,
}

/// Runs `s`, writing `<name>_<output>.csv` per output plus
/// `<name>_conservation.csv` into `out_dir`.
pub fn run_scenario(s: &Scenario, out_dir: &Path) -> CliResult<RunSummary> {
    let eval = evaluate(s)?;
    let tables =
        s.outputs.iter().map(|&o| Ok((o.name(), output_table(s, &eval, o)?))).collect::<CliResult<Vec<_>>>()?;
    let mut files = Vec::new();
    for (name, table) in tables {
        let path = out_dir.join(format!("{}_{name}.csv", s.name));
        table.save(&path)?;
        files.push(path);
    }
    let path = out_dir.join(format!("{}_conservation.csv", s.name));
    conservation_table(s, &eval.drift).save(&path)?;
    files.push(path);
    Ok(RunSummary { files, drift: eval.drift, samples: eval.times.len() })
}

pub fn conservation_table(s: &Scenario, d: &DriftSummary) -> Table {
    let mut columns = vec!["energy".to_string()];
    columns.extend((1..=LOGGED_MOMENTS).map(|n| format!("c{n}")));
    columns.push("spectrum".into());
    let mut row = vec![d.energy];
    row.extend_from_slice(&d.moments);
    row.push(d.spectrum);
    Table::new(format!("{}\nmaximum relative drift over the run", s.stamp()), columns).with_rows(vec![row])
}

fn upper_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect()
}

/// Per-sample rows for one output, evaluated in parallel and kept in order.
fn rows<F>(eval: &Evaluation, row: F) -> CliResult<Vec<Vec<f64>>>
where
    F: Fn(f64, &DensityState) -> CliResult<Vec<Vec<f64>>> + Sync,
{
    let nested =
        eval.times.par_iter().zip(eval.states.par_iter()).map(|(&t, st)| row(t, st)).collect::<CliResult<Vec<_>>>()?;
    Ok(nested.into_iter().flatten().collect())
}

pub fn output_table(s: &Scenario, eval: &Evaluation, out: OutputKind) -> CliResult<Table> {
    let dim = eval.states[0].dim();
    let model = &s.model;
    let (h, f) = (model.hamiltonian(), model.feedback());
    let mut columns = vec!["t".to_string()];
    let data = match out {
        OutputKind::State => {
            let pairs = upper_pairs(dim);
            for &(i, j) in &pairs {
                columns.push(format!("re_{i}_{j}"));
                columns.push(format!("im_{i}_{j}"));
            }
            rows(eval, |t, st| {
                let m = st.matrix();
                let mut r = vec![t];
                for &(i, j) in &pairs {
                    r.push(m[(i, j)].re);
                    r.push(m[(i, j)].im);
                }
                Ok(vec![r])
            })?
        }
        OutputKind::Moduli => {
            let pairs = upper_pairs(dim);
            columns.extend(pairs.iter().map(|(i, j)| format!("abs_{i}_{j}")));
            rows(eval, |t, st| {
                let m = st.matrix();
                Ok(vec![std::iter::once(t).chain(pairs.iter().map(|&(i, j)| m[(i, j)].norm())).collect()])
            })?
        }
        OutputKind::Spectrum => {
            columns.extend((0..dim).map(|k| format!("lambda_{k}")));
            rows(eval, |t, st| Ok(vec![std::iter::once(t).chain(st.eigen()?.values).collect()]))?
        }
        OutputKind::Conserved => {
            columns.push("energy".into());
            columns.extend((1..=LOGGED_MOMENTS).map(|n| format!("c{n}")));
            rows(eval, |t, st| {
                let c = ConservedSample::measure(st, &h, &f, &[])?;
                let mut r = vec![t, c.energy];
                r.extend_from_slice(&c.moments);
                Ok(vec![r])
            })?
        }
        OutputKind::Residual => {
            columns.push("residual".into());
            rows(eval, |t, _| Ok(vec![vec![t, residual(|x| model.state(x), &h, &f, t, DEFAULT_FD_STEP)?]]))?
        }
        OutputKind::Error => {
            columns.extend(["abs_error".into(), "rel_error".into()]);
            rows(eval, |t, st| {
                let exact = model.state(t)?;
                let e = (st.matrix() - exact.matrix()).frobenius_norm();
                Ok(vec![vec![t, e, e / exact.matrix().frobenius_norm()]])
            })?
        }
        OutputKind::Entropy => {
            if matches!(model, Model::Mutation3(_)) {
                columns.push("S".into());
            } else {
                columns.extend(["S1".into(), "S2".into()]);
            }
            rows(eval, |t, st| {
                Ok(vec![match model.reductions(st)? {
                    Some([a, b]) => vec![t, von_neumann_entropy(&a)?, von_neumann_entropy(&b)?],
                    None => vec![t, von_neumann_entropy(st)?],
                }])
            })?
        }
        OutputKind::Reduced => {
            let [a, b] = model.reductions(&eval.states[0])?.expect("checked during validation");
            columns.extend((0..a.dim()).map(|k| format!("p1_{k}")));
            columns.extend((0..b.dim()).map(|k| format!("p2_{k}")));
            rows(eval, |t, st| {
                let [a, b] = model.reductions(st)?.expect("checked during validation");
                let mut r = vec![t];
                r.extend(hermitian_eigensystem(a.matrix())?.values);
                r.extend(hermitian_eigensystem(b.matrix())?.values);
                Ok(vec![r])
            })?
        }
        OutputKind::Ppt => {
            columns.extend(["min_eigenvalue".into(), "positive".into()]);
            rows(eval, |t, st| {
                let (state, layout) = model.bipartite(st)?.expect("checked during validation");
                let r = ppt_is_positive(&state, &layout)?;
                Ok(vec![vec![t, r.min_eigenvalue, if r.positive { 1.0 } else { 0.0 }]])
            })?
        }
        OutputKind::Density => {
            let Model::Mutation3(p) = model else { unreachable!("checked during validation") };
            let basis = OscillatorBasis::default_grid(p.level_offset);
            columns.extend(["x".into(), "p".into()]);
            rows(eval, |t, st| {
                let dens = position_density(st, &basis)?;
                Ok(basis.x_grid().iter().zip(dens).map(|(&x, v)| vec![t, x, v]).collect())
            })?
        }
        OutputKind::Uncertainty => {
            let (p, p1) = complementarity_propositions();
            columns.extend(["P".into(), "P1".into(), "deviation_product".into(), "bound".into()]);
            rows(eval, |t, st| {
                let [species, _] = model.reductions(st)?.expect("checked during validation");
                let r = uncertainty_report(&p, &p1, &species)?;
                Ok(vec![vec![t, r.probability, r.probability1, r.deviation_product, r.bound]])
            })?
        }
        OutputKind::Switching => {
            let Model::Multispecies { profile: Some(profile), .. } = model else {
                unreachable!("checked during validation")
            };
            columns.extend(["F".into(), "F0".into(), "F1".into()]);
            rows(eval, |t, _| {
                let sf = switching_functions(t, *profile);
                Ok(vec![vec![t, sf.f, sf.f0, sf.f1]])
            })?
        }
        OutputKind::Xi => {
            columns.extend(["abs_xi_sq", "re_xi", "im_xi", "re_zeta", "im_zeta"].map(String::from));
            rows(eval, |t, st| {
                let m = st.matrix();
                let (xi, zeta) = (m[(0, 1)], m[(0, 2)]);
                Ok(vec![vec![t, xi.norm_sqr(), xi.re, xi.im, zeta.re, zeta.im]])
            })?
        }
    };
    Ok(Table::new(format!("{}\noutput={}", s.stamp(), out.name()), columns).with_rows(data))
}
