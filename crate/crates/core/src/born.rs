//! The discrete Born approximation: `h^2 F_h V_B,h (j) = u_inf(xi_j)` on `Omega`,
//! zero elsewhere, inverted with one inverse DFT.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forward::FarFieldDataset;
use crate::geometry::ScatteringScenario;
use crate::grid::{GridSpec, NodalField, SpectralField, ZERO};

#[derive(Debug, Clone, PartialEq)]
pub struct BornResult {
    pub potential: NodalField,
    pub scenario: ScatteringScenario,
    /// Mesh frequencies with no data. For an average over angles, the
    /// frequencies missed by every angle.
    pub zero_filled_count: usize,
    /// Zero-filled frequencies of each input dataset.
    pub per_angle_zero_filled: Vec<usize>,
}

/// Spectral coefficients `c_j = values_j / (2R)^2` on `Omega`, zero elsewhere.
pub(crate) fn coefficients_from_data(
    grid: &GridSpec,
    scenario: &ScatteringScenario,
    values: &[Complex64],
) -> SpectralField {
    let scale = 1.0 / (grid.period() * grid.period());
    let coeffs = grid
        .indices()
        .zip(values)
        .map(|(j, v)| if scenario.in_omega(grid.freq_unchecked(j)) { v * scale } else { ZERO })
        .collect();
    SpectralField::new(*grid, coeffs).expect("length matches grid")
}

/// Recovers `V_B,h` from one pointwise dataset.
pub fn born_invert(d: &FarFieldDataset) -> BornResult {
    let potential = coefficients_from_data(d.grid(), d.scenario(), d.values()).to_nodal();
    let missing = d.out_of_omega_count();
    BornResult {
        potential,
        scenario: d.scenario().clone(),
        zero_filled_count: missing,
        per_angle_zero_filled: vec![missing],
    }
}

/// The scenario describing an average of `datasets`: full data over their
/// incident angles when all are fixed-angle, else their common scenario.
pub(crate) fn averaged_scenario(datasets: &[FarFieldDataset]) -> Result<ScatteringScenario> {
    let first = datasets.first().ok_or_else(|| Error::domain("need at least one dataset"))?;
    for d in &datasets[1..] {
        first.grid().check_same(d.grid())?;
    }
    let angles: Option<Vec<_>> = datasets
        .iter()
        .map(|d| match d.scenario() {
            ScatteringScenario::FixedAngle { theta0 } => Some(*theta0),
            _ => None,
        })
        .collect();
    if let Some(angles) = angles {
        return Ok(ScatteringScenario::FullData { angles });
    }
    if datasets.iter().all(|d| d.scenario() == first.scenario()) {
        return Ok(first.scenario().clone());
    }
    Err(Error::domain("datasets to average mix different scattering scenarios"))
}

/// Mean of nodal fields in the given order.
pub(crate) fn mean(fields: &[NodalField]) -> NodalField {
    let grid = *fields[0].grid();
    let mut acc = vec![ZERO; grid.len()];
    for f in fields {
        for (a, v) in acc.iter_mut().zip(f.values()) {
            *a += v;
        }
    }
    let scale = 1.0 / fields.len() as f64;
    NodalField::new(grid, acc.into_iter().map(|a| a * scale).collect()).expect("length matches grid")
}

/// Average of the per-angle Born reconstructions; each angle keeps its own
/// zero fill on the excluded line.
pub fn born_full_data(datasets: &[FarFieldDataset]) -> Result<BornResult> {
    let scenario = averaged_scenario(datasets)?;
    let parts: Vec<BornResult> = datasets.par_iter().map(born_invert).collect();
    let potentials: Vec<NodalField> = parts.iter().map(|p| p.potential.clone()).collect();
    let grid = *datasets[0].grid();
    let missed_by_all = grid
        .frequencies()
        .filter(|xi| datasets.iter().all(|d| !d.scenario().in_omega(*xi)))
        .count();
    Ok(BornResult {
        potential: mean(&potentials),
        scenario,
        zero_filled_count: missed_by_all,
        per_angle_zero_filled: parts.iter().map(|p| p.zero_filled_count).collect(),
    })
}
