//! Many forward solves over the frequency mesh: planning, deduplication of
//! identical `(theta, k)` experiments, kernel caching and parallel execution.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use rayon::prelude::*;

use super::{solve_scattered_field_with, GmresOptions, PeriodizedKernel};
use crate::error::{Error, Result};
use crate::geometry::{ExperimentParams, ScatteringScenario};
use crate::grid::{GridSpec, Index, NodalField};
use crate::special::WaveNumber;

fn kernel_key(k: WaveNumber) -> i64 {
    (k.abs() * 1e12).round() as i64
}

/// Kernels for one grid, keyed by `round(|k| * 1e12)`; negative wavenumbers
/// are served by conjugating the stored `|k|` kernel.
#[derive(Debug)]
pub struct KernelCache {
    grid: GridSpec,
    kernels: RwLock<HashMap<i64, Arc<PeriodizedKernel>>>,
    builds: AtomicUsize,
}

impl KernelCache {
    pub fn new(grid: GridSpec) -> Self {
        KernelCache { grid, kernels: RwLock::new(HashMap::new()), builds: AtomicUsize::new(0) }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Number of kernels built so far.
    pub fn builds(&self) -> usize {
        self.builds.load(Ordering::Relaxed)
    }

    pub fn len(&self) -> usize {
        self.kernels.read().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Builds the kernels for `ks` that are missing, in parallel. The first
    /// wavenumber in iteration order represents its key, so the cache content
    /// does not depend on scheduling.
    pub fn prepare(&self, ks: impl IntoIterator<Item = WaveNumber>) {
        let mut wanted: Vec<(i64, f64)> = Vec::new();
        {
            let map = self.kernels.read().unwrap_or_else(|e| e.into_inner());
            for k in ks {
                let key = kernel_key(k);
                if !map.contains_key(&key) && !wanted.iter().any(|(w, _)| *w == key) {
                    wanted.push((key, k.abs()));
                }
            }
        }
        let grid = self.grid;
        let built: Vec<(i64, PeriodizedKernel)> = wanted
            .into_par_iter()
            .map(|(key, k)| (key, PeriodizedKernel::build(grid, WaveNumber::new(k).expect("nonzero"))))
            .collect();
        let mut map = self.kernels.write().unwrap_or_else(|e| e.into_inner());
        for (key, kernel) in built {
            if let std::collections::hash_map::Entry::Vacant(slot) = map.entry(key) {
                slot.insert(Arc::new(kernel));
                self.builds.fetch_add(1, Ordering::Relaxed);
            }
        }
    }

    /// The kernel for `k`, building it on a miss.
    pub fn get(&self, k: WaveNumber) -> Arc<PeriodizedKernel> {
        let key = kernel_key(k);
        let found = self.kernels.read().unwrap_or_else(|e| e.into_inner()).get(&key).cloned();
        let base = match found {
            Some(kernel) => kernel,
            None => {
                self.prepare([k]);
                self.kernels.read().unwrap_or_else(|e| e.into_inner())[&key].clone()
            }
        };
        if base.k() == k {
            return base;
        }
        let mut kernel = if k.is_negative() { base.conjugate() } else { (*base).clone() };
        kernel.k = k;
        Arc::new(kernel)
    }
}

/// One in-`Omega` mesh frequency and its experiment.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Experiment {
    pub pos: usize,
    pub index: Index,
    pub params: ExperimentParams,
}

/// All in-`Omega` frequencies of `grid` for a pointwise scenario, in storage order.
pub(crate) fn plan_experiments(grid: &GridSpec, scenario: &ScatteringScenario) -> Vec<Experiment> {
    grid.indices()
        .enumerate()
        .filter_map(|(pos, j)| {
            scenario
                .experiment_params(grid.freq_unchecked(j))
                .map(|params| Experiment { pos, index: j, params })
        })
        .collect()
}

fn bits(x: f64) -> u64 {
    // -0.0 and 0.0 describe the same experiment
    if x == 0.0 {
        0
    } else {
        x.to_bits()
    }
}

/// Groups experiments sharing `(theta, k)` bit for bit; groups are ordered by
/// first appearance.
pub(crate) fn group_solves(experiments: &[Experiment]) -> Vec<Vec<usize>> {
    let mut slots: HashMap<(u64, u64, u64), usize> = HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, e) in experiments.iter().enumerate() {
        let p = &e.params;
        let key = (bits(p.theta_in[0]), bits(p.theta_in[1]), bits(p.k.get()));
        match slots.get(&key) {
            Some(&g) => groups[g].push(i),
            None => {
                slots.insert(key, groups.len());
                groups.push(vec![i]);
            }
        }
    }
    groups
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct SolveCounts {
    pub solves: usize,
    pub gmres_iterations: usize,
}

/// Solves once per group and evaluates `per_experiment` on the scattered field
/// for every member. Results come back in experiment order; a failure reports
/// every failing frequency index and the first error in group order.
pub(crate) fn run_grouped<T: Send>(
    potential: &NodalField,
    experiments: &[Experiment],
    cache: &KernelCache,
    gmres: &GmresOptions,
    per_experiment: impl Fn(&Experiment, &[Complex64]) -> T + Sync,
) -> std::result::Result<(Vec<T>, SolveCounts), (Vec<Index>, Error)> {
    let groups = group_solves(experiments);
    cache.prepare(groups.iter().map(|g| experiments[g[0]].params.k));
    let outcomes: Vec<std::result::Result<(Vec<(usize, T)>, usize), (Vec<Index>, Error)>> = groups
        .par_iter()
        .map(|group| {
            let lead = &experiments[group[0]];
            let kernel = cache.get(lead.params.k);
            let solved =
                solve_scattered_field_with(&kernel, potential, lead.params.theta_in, lead.params.k, gmres);
            match solved {
                Ok((u_s, report)) => Ok((
                    group.iter().map(|&i| (i, per_experiment(&experiments[i], u_s.values()))).collect(),
                    report.iterations,
                )),
                Err(e) => Err((group.iter().map(|&i| experiments[i].index).collect(), e)),
            }
        })
        .collect();

    let mut slots: Vec<Option<T>> = (0..experiments.len()).map(|_| None).collect();
    let mut counts = SolveCounts::default();
    let mut failing: Vec<Index> = Vec::new();
    let mut first_error = None;
    for outcome in outcomes {
        match outcome {
            Ok((items, iterations)) => {
                counts.solves += 1;
                counts.gmres_iterations += iterations;
                for (i, v) in items {
                    slots[i] = Some(v);
                }
            }
            Err((indices, e)) => {
                failing.extend(indices);
                first_error.get_or_insert(e);
            }
        }
    }
    if let Some(e) = first_error {
        failing.sort();
        return Err((failing, e));
    }
    Ok((slots.into_iter().map(|v| v.expect("every experiment solved")).collect(), counts))
}

pub(crate) fn require_pointwise(scenario: &ScatteringScenario) -> Result<()> {
    scenario.validate()?;
    if matches!(scenario, ScatteringScenario::FullData { .. }) {
        return Err(Error::domain(
            "full data is a family of fixed-angle datasets; use the per-angle entry points",
        ));
    }
    Ok(())
}
