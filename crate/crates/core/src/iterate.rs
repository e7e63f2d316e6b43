//! Fixed-point refinement of the Born approximation:
//!
//! ```text
//! F V^{n+1}(xi) = u_inf(xi) - int exp(-i k theta'(xi) . y) V^n(y) u_s^n(y) dy
//! ```
//!
//! where `u_s^n` solves the Lippmann–Schwinger equation with potential `V^n`
//! for the experiment `(theta(xi), k(xi))`. `V^0 = 0`, so `V^1` is the Born
//! approximation.

use std::fmt::Write as _;

use crate::born::{averaged_scenario, coefficients_from_data, mean};
use crate::error::{Error, Result};
use crate::forward::{
    far_field_sum, plan_experiments, run_grouped, Experiment, FarFieldDataset, GmresOptions, KernelCache,
};
use crate::geometry::ScatteringScenario;
use crate::grid::NodalField;
use crate::metrics::l2_error;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterateOptions {
    pub gmres: GmresOptions,
    /// The correction integral runs over nodes with `|y| <= correction_radius`;
    /// the default `INFINITY` integrates over the whole cell.
    pub correction_radius: f64,
    /// Abort once `||V^n||_0` exceeds this multiple of `||V^1||_0`.
    pub divergence_factor: f64,
}

impl Default for IterateOptions {
    fn default() -> Self {
        IterateOptions { gmres: GmresOptions::default(), correction_radius: f64::INFINITY, divergence_factor: 1e3 }
    }
}

impl IterateOptions {
    pub fn with_tol(tol: f64) -> Self {
        let mut o = IterateOptions::default();
        o.gmres.tol = tol;
        o
    }
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct RunStats {
    pub solves: usize,
    pub gmres_iterations: usize,
    /// Frequencies whose solve failed (only nonzero for an aborted run).
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionRun {
    /// `V^0 = 0, V^1, ..., V^K`.
    pub iterates: Vec<NodalField>,
    /// `errors[n]` is the L2 error of `iterates[n]`; empty without a reference.
    pub errors: Vec<f64>,
    pub scenario: ScatteringScenario,
    pub stats: RunStats,
}

impl ReconstructionRun {
    pub fn last(&self) -> &NodalField {
        self.iterates.last().expect("a run holds V^0")
    }

    /// `n,error` rows, one per iterate.
    pub fn errors_csv(&self) -> String {
        let mut out = String::from("n,error\n");
        for (n, e) in self.errors.iter().enumerate() {
            let _ = writeln!(out, "{n},{e:?}");
        }
        out
    }
}

/// An aborted run with the iterates completed before the failure.
#[derive(Debug, thiserror::Error)]
#[error("reconstruction stopped with {} iterates kept: {error}", partial.iterates.len())]
pub struct RunError {
    pub partial: Box<ReconstructionRun>,
    #[source]
    pub error: Error,
}

impl From<RunError> for Error {
    fn from(e: RunError) -> Self {
        e.error
    }
}

struct Stepper<'a> {
    data: &'a FarFieldDataset,
    experiments: Vec<Experiment>,
    cache: &'a KernelCache,
}

impl<'a> Stepper<'a> {
    fn new(data: &'a FarFieldDataset, cache: &'a KernelCache) -> Self {
        let experiments = plan_experiments(data.grid(), data.scenario());
        Stepper { data, experiments, cache }
    }

    fn step(&self, vn: &NodalField, opts: &IterateOptions, stats: &mut RunStats) -> Result<NodalField> {
        let d = self.data;
        d.grid().check_same(vn.grid())?;
        if vn.is_zero() {
            return Ok(coefficients_from_data(d.grid(), d.scenario(), d.values()).to_nodal());
        }
        let radius = opts.correction_radius;
        let outcome = run_grouped(vn, &self.experiments, self.cache, &opts.gmres, |e, u_s| {
            far_field_sum(vn, u_s, e.params.theta_out, e.params.k, radius)
        });
        let (corrections, counts) = match outcome {
            Ok(ok) => ok,
            Err((failing, first)) => {
                stats.failures += failing.len();
                return Err(Error::StepFailed { failing, first: Box::new(first) });
            }
        };
        stats.solves += counts.solves;
        stats.gmres_iterations += counts.gmres_iterations;
        let mut values = d.values().to_vec();
        for (e, c) in self.experiments.iter().zip(corrections) {
            values[e.pos] -= c;
        }
        Ok(coefficients_from_data(d.grid(), d.scenario(), &values).to_nodal())
    }
}

/// One update `V^n -> V^{n+1}` for a pointwise dataset.
pub fn iterate_step(vn: &NodalField, d: &FarFieldDataset, opts: &IterateOptions) -> Result<NodalField> {
    let cache = KernelCache::new(*d.grid());
    Stepper::new(d, &cache).step(vn, opts, &mut RunStats::default())
}

/// `K` iterations from `V^0 = 0` on one pointwise dataset.
pub fn run(
    d: &FarFieldDataset,
    k_iters: usize,
    reference: Option<&NodalField>,
    opts: &IterateOptions,
) -> std::result::Result<ReconstructionRun, RunError> {
    run_full_data(std::slice::from_ref(d), k_iters, reference, opts)
}

/// `K` iterations on several datasets of one grid: every step runs on each
/// dataset and the results are averaged before the next step.
pub fn run_full_data(
    datasets: &[FarFieldDataset],
    k_iters: usize,
    reference: Option<&NodalField>,
    opts: &IterateOptions,
) -> std::result::Result<ReconstructionRun, RunError> {
    let scenario = match averaged_scenario(datasets) {
        Ok(s) => s,
        Err(error) => {
            let partial = ReconstructionRun {
                iterates: datasets.iter().take(1).map(|d| NodalField::zeros(*d.grid())).collect(),
                errors: vec![],
                scenario: datasets.first().map_or(ScatteringScenario::Backscattering, |d| d.scenario().clone()),
                stats: RunStats::default(),
            };
            return Err(RunError { partial: Box::new(partial), error });
        }
    };
    let grid = *datasets[0].grid();
    let mut result = ReconstructionRun {
        iterates: vec![NodalField::zeros(grid)],
        errors: vec![],
        scenario,
        stats: RunStats::default(),
    };
    let fail = |result: ReconstructionRun, error: Error| RunError { partial: Box::new(result), error };

    if k_iters == 0 {
        return Err(fail(result, Error::domain("need at least one iteration")));
    }
    if let Some(reference) = reference {
        match l2_error(&result.iterates[0], reference) {
            Ok(e) => result.errors.push(e),
            Err(e) => return Err(fail(result, e)),
        }
    }

    let cache = KernelCache::new(grid);
    let steppers: Vec<Stepper> = datasets.iter().map(|d| Stepper::new(d, &cache)).collect();
    for n in 0..k_iters {
        let current = result.iterates.last().expect("V^0 is present");
        let mut parts = Vec::with_capacity(steppers.len());
        for s in &steppers {
            match s.step(current, opts, &mut result.stats) {
                Ok(v) => parts.push(v),
                Err(e) => return Err(fail(result, e)),
            }
        }
        let next = if parts.len() == 1 { parts.pop().expect("one part") } else { mean(&parts) };
        if n > 0 {
            let limit = opts.divergence_factor * result.iterates[1].norm0();
            let norm = next.norm0();
            if !(norm <= limit) {
                return Err(fail(result, Error::Divergence { step: n + 1, norm, limit }));
            }
        }
        if let Some(reference) = reference {
            result.errors.push(l2_error(&next, reference).expect("grids checked on V^0"));
        }
        log::debug!("iterate {} done, {} solves so far", n + 1, result.stats.solves);
        result.iterates.push(next);
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::born::born_invert;
    use crate::forward::{synthesize_dataset, ForwardOptions};
    use crate::grid::GridSpec;
    use crate::phantom::Phantom;

    fn grid(n: usize) -> GridSpec {
        GridSpec::new(2.1, n).unwrap()
    }

    #[test]
    fn first_step_is_born() {
        let g = grid(8);
        let v = Phantom::AnnulusSquare.sample(g);
        let d = synthesize_dataset(&v, &ScatteringScenario::Backscattering, &ForwardOptions::default()).unwrap();
        let step = iterate_step(&NodalField::zeros(g), &d, &IterateOptions::default()).unwrap();
        assert_eq!(step, born_invert(&d).potential);
        let run1 = run(&d, 1, None, &IterateOptions::default()).unwrap();
        assert_eq!(run1.iterates.len(), 2);
        assert!(run1.iterates[0].is_zero());
        assert_eq!(run1.iterates[1], born_invert(&d).potential);
        assert_eq!(run1.stats.solves, 0);
    }

    #[test]
    fn step_is_affine_in_data() {
        let g = grid(8);
        let s = ScatteringScenario::fixed_energy(6.0).unwrap();
        let vn = Phantom::AnnulusSquare.sample(g).scale(Complex64::new(0.5, 0.1));
        let d = FarFieldDataset::new(g, s.clone(), (0..64).map(|i| Complex64::new((i as f64).sin(), 0.2)).collect())
            .unwrap();
        let m = g.offset((1, 1)).unwrap();
        let mut bumped = d.values().to_vec();
        bumped[m] += Complex64::new(0.0, 3.0);
        let d2 = d.with_values(bumped).unwrap();
        let delta = FarFieldDataset::new(g, s, (0..64).map(|i| if i == m { Complex64::new(0.0, 3.0) } else { Complex64::new(0.0, 0.0) }).collect())
            .unwrap();
        let opts = IterateOptions::default();
        let a = iterate_step(&vn, &d, &opts).unwrap();
        let b = iterate_step(&vn, &d2, &opts).unwrap();
        let expected = born_invert(&delta).potential;
        for ((x, y), e) in b.values().iter().zip(a.values()).zip(expected.values()) {
            assert!((x - y - e).norm() < 1e-12);
        }
    }

    #[test]
    fn errors_follow_reference() {
        let g = grid(8);
        let v = Phantom::AnnulusSquare.sample(g);
        let d = synthesize_dataset(&v, &ScatteringScenario::Backscattering, &ForwardOptions::default()).unwrap();
        let r = run(&d, 2, Some(&v), &IterateOptions::default()).unwrap();
        assert_eq!(r.errors.len(), 3);
        assert_eq!(r.errors[0], l2_error(&NodalField::zeros(g), &v).unwrap());
        assert!(r.stats.solves > 0);
        assert!(r.errors_csv().starts_with("n,error\n0,"));
    }

    #[test]
    fn zero_iterations_and_bad_reference_fail() {
        let g = grid(8);
        let d = FarFieldDataset::zeros(g, ScatteringScenario::Backscattering).unwrap();
        let e = run(&d, 0, None, &IterateOptions::default()).unwrap_err();
        assert_eq!(e.partial.iterates.len(), 1);
        let wrong = NodalField::zeros(grid(16));
        assert!(run(&d, 1, Some(&wrong), &IterateOptions::default()).is_err());
        assert!(run_full_data(&[], 1, None, &IterateOptions::default()).is_err());
    }

    #[test]
    fn divergence_guard_trips() {
        let g = grid(8);
        let v = Phantom::AnnulusSquare.sample(g);
        let d = synthesize_dataset(&v, &ScatteringScenario::Backscattering, &ForwardOptions::default()).unwrap();
        let opts = IterateOptions { divergence_factor: 1e-3, ..IterateOptions::default() };
        let e = run(&d, 3, None, &opts).unwrap_err();
        assert!(matches!(e.error, Error::Divergence { step: 2, .. }));
        assert_eq!(e.partial.iterates.len(), 2);
    }
}
