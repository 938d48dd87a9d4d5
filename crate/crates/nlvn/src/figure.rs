//! Long-format grids `(axis1, axis2, value)` behind the six figures.

use std::path::{Path, PathBuf};

use nlvn_core::observables::{
    complementarity_propositions, position_density, uncertainty_bound, von_neumann_entropy, OscillatorBasis,
};
use nlvn_core::solutions::{
    mutation3, switching_functions, two_species_closed_form, two_species_example, MutationParams, SwitchingProfile,
};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::scenario::{linspace, Model};
use crate::table::Table;

pub const DEFAULT_GRID: (usize, usize) = (201, 201);

/// Largest grid accepted, in cells.
pub const MAX_CELLS: usize = 10_000_000;

/// Upper end of the feedback-strength axis in figure 2.
pub const FIGURE2_H_MAX: f64 = 2.45;

/// Fixed `t₀` for figures 4 and 5.
pub const FIGURE45_T0: f64 = 150.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FigureJob {
    pub id: u8,
    /// Samples along the first and second axis. Figure 3's second axis is
    /// the particle label and always has two entries.
    pub grid: (usize, usize),
}

impl FigureJob {
    pub fn new(id: u8, grid: Option<(usize, usize)>) -> CliResult<Self> {
        if !(1..=6).contains(&id) {
            return Err(CliError::validation(format!("figure id {id} is not in 1..=6")));
        }
        let (n, m) = grid.unwrap_or(DEFAULT_GRID);
        let m = if id == 3 { 2 } else { m };
        if n < 2 || m < 2 {
            return Err(CliError::validation("each grid axis needs at least 2 samples"));
        }
        if n.checked_mul(m).is_none_or(|c| c > MAX_CELLS) {
            return Err(CliError::validation(format!("grid {n}x{m} exceeds {MAX_CELLS} cells")));
        }
        Ok(Self { id, grid: (n, m) })
    }

    pub fn file_name(&self) -> String {
        format!("figure{}.csv", self.id)
    }

    /// Names of `(axis1, axis2, value)`.
    pub fn columns(&self) -> [&'static str; 3] {
        match self.id {
            1 => ["t", "x", "p"],
            2 => ["t", "h", "p0"],
            3 => ["t", "particle", "S"],
            4 => ["t", "t1", "F"],
            5 => ["t", "t1", "F1"],
            _ => ["t", "t0", "bound"],
        }
    }

    pub fn axes(&self) -> (Vec<f64>, Vec<f64>) {
        let (n, m) = self.grid;
        let h0 = MutationParams::critical_strength();
        match self.id {
            1 => (linspace(-40.0, 40.0, n), linspace(-8.0, 8.0, m)),
            2 => (linspace(-40.0, 40.0, n), linspace(h0, FIGURE2_H_MAX, m)),
            3 => (linspace(-5.0, 5.0, n), vec![1.0, 2.0]),
            4 | 5 => (linspace(0.0, 300.0, n), linspace(0.0, 300.0, m)),
            _ => (linspace(-40.0, 40.0, n), linspace(-40.0, 40.0, m)),
        }
    }

    fn stamp(&self) -> String {
        let fixed = match self.id {
            1 => format!("h={:?} alpha=1 k=0 x-basis=oscillator", MutationParams::critical_strength()),
            2 => "alpha=1 k=0 x=0".to_string(),
            3 => "model=organism entropy=natural-log".to_string(),
            4 | 5 => format!("t0={FIGURE45_T0:?}"),
            _ => "t1=0.0".to_string(),
        };
        format!("nlvn {} figure={} grid={}x{} {fixed}", env!("CARGO_PKG_VERSION"), self.id, self.grid.0, self.grid.1)
    }

    pub fn table(&self) -> CliResult<Table> {
        let (a1, a2) = self.axes();
        let rows = match self.id {
            // the density varies along x, so each t row is computed at once
            1 => {
                let p = MutationParams::critical();
                let basis = OscillatorBasis::new(0, a2.clone())?;
                by_row(&a1, |t| {
                    let dens = position_density(&mutation3(&p, t)?, &basis)?;
                    Ok(a2.iter().zip(dens).map(|(&x, v)| vec![t, x, v]).collect())
                })?
            }
            2 => {
                let basis = OscillatorBasis::new(0, vec![0.0])?;
                by_cell(&a1, &a2, |t, h| {
                    Ok(position_density(&mutation3(&MutationParams::new(h, 1.0, 0), t)?, &basis)?[0])
                })?
            }
            3 => {
                let model = Model::Organism;
                by_row(&a1, |t| {
                    let [one, two] = model.reductions(&model.state(t)?)?.expect("the organism is bipartite");
                    Ok(vec![vec![t, 1.0, von_neumann_entropy(&one)?], vec![t, 2.0, von_neumann_entropy(&two)?]])
                })?
            }
            4 => by_cell(&a1, &a2, |t, t1| Ok(switching_functions(t, SwitchingProfile::new(FIGURE45_T0, t1)).f))?,
            5 => by_cell(&a1, &a2, |t, t1| Ok(switching_functions(t, SwitchingProfile::new(FIGURE45_T0, t1)).f1))?,
            _ => {
                let (p, p1) = complementarity_propositions();
                by_cell(&a1, &a2, |t, t0| {
                    let profile = SwitchingProfile::new(t0, 0.0);
                    let species = two_species_example(profile).reduced(&two_species_closed_form(t, profile)?, 0)?;
                    Ok(uncertainty_bound(&p, &p1, &species)?)
                })?
            }
        };
        Ok(Table::new(self.stamp(), self.columns().map(String::from).to_vec()).with_rows(rows))
    }

    /// Writes the grid to `<dir>/figure<id>.csv`.
    pub fn write(&self, dir: &Path) -> CliResult<PathBuf> {
        let path = dir.join(self.file_name());
        self.table()?.save(&path)?;
        Ok(path)
    }
}

fn by_row<F>(a1: &[f64], row: F) -> CliResult<Vec<Vec<f64>>>
where
    F: Fn(f64) -> CliResult<Vec<Vec<f64>>> + Sync,
{
    let blocks = a1.par_iter().map(|&t| row(t)).collect::<CliResult<Vec<_>>>()?;
    Ok(blocks.into_iter().flatten().collect())
}

fn by_cell<F>(a1: &[f64], a2: &[f64], cell: F) -> CliResult<Vec<Vec<f64>>>
where
    F: Fn(f64, f64) -> CliResult<f64> + Sync,
{
    let m = a2.len();
    (0..a1.len() * m)
        .into_par_iter()
        .map(|k| {
            let (u, v) = (a1[k / m], a2[k % m]);
            Ok(vec![u, v, cell(u, v)?])
        })
        .collect()
}

/// Parses `NxM`.
pub fn parse_grid(text: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::validation(format!("grid {text:?} is not of the form NxM"));
    let (n, m) = text.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((n.trim().parse().map_err(|_| bad())?, m.trim().parse().map_err(|_| bad())?))
}
