use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use super::batch::{plan_experiments, require_pointwise, run_grouped, KernelCache};
use super::{far_field_sum, incident_field, FieldNoise, GmresOptions};
use crate::error::{Error, Result};
use crate::geometry::ScatteringScenario;
use crate::grid::csv::{header_value, parse_header, parse_num, read_rows, write_rows};
use crate::grid::{GridSpec, Index, NodalField, ZERO};

const MAGIC: &str = "# scatter2d-farfield v1";

/// Far-field samples `u_inf(theta'(xi_j), theta(xi_j), k(xi_j))` over `Z_h^2`,
/// zero outside `Omega`.
#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldDataset {
    grid: GridSpec,
    scenario: ScatteringScenario,
    values: Vec<Complex64>,
    noise_level: f64,
    seed: Option<u64>,
    field_noise: bool,
}

impl FarFieldDataset {
    /// Wraps raw values; entries at frequencies outside `Omega` are zeroed.
    pub fn new(grid: GridSpec, scenario: ScatteringScenario, values: Vec<Complex64>) -> Result<Self> {
        require_pointwise(&scenario)?;
        if values.len() != grid.len() {
            return Err(Error::domain(format!(
                "dataset needs {} values for N = {}, got {}",
                grid.len(),
                grid.n(),
                values.len()
            )));
        }
        let mut d = FarFieldDataset { grid, scenario, values, noise_level: 0.0, seed: None, field_noise: false };
        d.zero_fill();
        Ok(d)
    }

    pub fn zeros(grid: GridSpec, scenario: ScatteringScenario) -> Result<Self> {
        Self::new(grid, scenario, vec![ZERO; grid.len()])
    }

    fn zero_fill(&mut self) {
        for (j, v) in self.grid.indices().zip(self.values.iter_mut()) {
            if !self.scenario.in_omega(self.grid.freq_unchecked(j)) {
                *v = ZERO;
            }
        }
    }

    /// Same grid, scenario and provenance with new values.
    pub fn with_values(&self, values: Vec<Complex64>) -> Result<Self> {
        let mut d = Self::new(self.grid, self.scenario.clone(), values)?;
        d.set_noise(self.noise_level, self.seed, self.field_noise);
        Ok(d)
    }

    pub(crate) fn set_noise(&mut self, level: f64, seed: Option<u64>, field_noise: bool) {
        self.noise_level = level;
        self.seed = seed;
        self.field_noise = field_noise;
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn scenario(&self) -> &ScatteringScenario {
        &self.scenario
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, j: Index) -> Result<Complex64> {
        Ok(self.values[self.grid.offset(j)?])
    }

    pub fn noise_level(&self) -> f64 {
        self.noise_level
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Whether the noise was applied to the nodal scattered fields rather
    /// than to the far-field values.
    pub fn noise_on_field(&self) -> bool {
        self.field_noise
    }

    /// Number of mesh frequencies outside `Omega`.
    pub fn out_of_omega_count(&self) -> usize {
        self.grid.frequencies().filter(|xi| !self.scenario.in_omega(*xi)).count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC}");
        let seed = self.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        let _ = write!(
            out,
            "# R={:?} N={} scenario={} params={} noise={:?} seed={}",
            self.grid.r(),
            self.grid.n(),
            self.scenario.name(),
            self.scenario.params_string(),
            self.noise_level,
            seed
        );
        if self.field_noise {
            out.push_str(" noise_at=field");
        }
        out.push('\n');
        write_rows(&mut out, &self.grid, &self.values);
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        const WHAT: &str = "far-field dataset";
        let mut lines = text.lines();
        if lines.next().map(str::trim_end) != Some(MAGIC) {
            return Err(Error::parse(WHAT, format!("first line must be {MAGIC:?}")));
        }
        let header = parse_header(lines.next().unwrap_or(""), WHAT)?;
        let grid = GridSpec::new(
            parse_num(header_value(&header, "R", WHAT)?, WHAT)?,
            parse_num(header_value(&header, "N", WHAT)?, WHAT)?,
        )?;
        let scenario = ScatteringScenario::from_parts(
            header_value(&header, "scenario", WHAT)?,
            header_value(&header, "params", WHAT)?,
        )?;
        let noise: f64 = parse_num(header_value(&header, "noise", WHAT)?, WHAT)?;
        let seed = match header_value(&header, "seed", WHAT)? {
            "none" => None,
            s => Some(parse_num(s, WHAT)?),
        };
        let field_noise = match header.get("noise_at").map(String::as_str) {
            None | Some("dataset") => false,
            Some("field") => true,
            Some(other) => return Err(Error::parse(WHAT, format!("bad noise_at={other}"))),
        };
        let values = read_rows(lines, &grid, WHAT)?;
        let mut d = Self::new(grid, scenario, values)?;
        d.set_noise(noise, seed, field_noise);
        Ok(d)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        Ok(std::fs::write(path, self.to_csv())?)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }
}

/// Settings for data synthesis.
#[derive(Debug, Clone, Copy)]
pub struct ForwardOptions {
    pub gmres: GmresOptions,
    /// Far-field quadrature runs over nodes with `|x| <= support_radius`.
    pub support_radius: f64,
    /// Optional noise on the nodal scattered fields before quadrature.
    pub field_noise: Option<FieldNoise>,
}

impl Default for ForwardOptions {
    fn default() -> Self {
        ForwardOptions { gmres: GmresOptions::default(), support_radius: 1.0, field_noise: None }
    }
}

impl ForwardOptions {
    pub fn with_tol(tol: f64) -> Self {
        let mut o = ForwardOptions::default();
        o.gmres.tol = tol;
        o
    }
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct SynthesisStats {
    /// Mesh frequencies inside `Omega`.
    pub in_omega: usize,
    /// Lippmann–Schwinger solves after merging identical `(theta, k)`.
    pub solves: usize,
    pub kernel_builds: usize,
    pub gmres_iterations: usize,
}

/// Simulates far-field data of `potential` for a pointwise scenario.
pub fn synthesize_dataset(
    potential: &NodalField,
    scenario: &ScatteringScenario,
    opts: &ForwardOptions,
) -> Result<FarFieldDataset> {
    let cache = KernelCache::new(*potential.grid());
    synthesize_with_cache(potential, scenario, opts, &cache).map(|(d, _)| d)
}

/// As [`synthesize_dataset`], reusing kernels from `cache` and reporting counts.
pub fn synthesize_with_cache(
    potential: &NodalField,
    scenario: &ScatteringScenario,
    opts: &ForwardOptions,
    cache: &KernelCache,
) -> Result<(FarFieldDataset, SynthesisStats)> {
    require_pointwise(scenario)?;
    let grid = *potential.grid();
    grid.check_same(cache.grid())?;
    if grid.r() <= 2.0 {
        log::warn!("R = {} <= 2: periodization needs R > 2 for potentials in the unit disk", grid.r());
    }
    let experiments = plan_experiments(&grid, scenario);
    let mut stats = SynthesisStats { in_omega: experiments.len(), ..Default::default() };
    let builds_before = cache.builds();
    let mut values = vec![ZERO; grid.len()];

    if !potential.is_zero() {
        let (far, counts) = run_grouped(potential, &experiments, cache, &opts.gmres, |e, u_s| {
            let p = &e.params;
            let incident = incident_field(grid, p.theta_in, p.k);
            let mut scattered = u_s.to_vec();
            if let Some(noise) = &opts.field_noise {
                noise.apply(e.pos, &mut scattered);
            }
            let total: Vec<Complex64> =
                incident.values().iter().zip(&scattered).map(|(a, b)| a + b).collect();
            far_field_sum(potential, &total, p.theta_out, p.k, opts.support_radius)
        })
        .map_err(|(failing, e)| Error::AtIndex { index: failing[0], source: Box::new(e) })?;
        for (e, v) in experiments.iter().zip(far) {
            values[e.pos] = v;
        }
        stats.solves = counts.solves;
        stats.gmres_iterations = counts.gmres_iterations;
    }
    stats.kernel_builds = cache.builds() - builds_before;

    let mut dataset = FarFieldDataset::new(grid, scenario.clone(), values)?;
    if let Some(noise) = &opts.field_noise {
        dataset.set_noise(noise.level, Some(noise.seed), true);
    }
    Ok((dataset, stats))
}

/// One fixed-angle dataset per incident direction of a `FullData` scenario
/// (or of any scenario's [`components`](ScatteringScenario::components)).
/// Kernels are shared across angles; field noise streams are split per angle.
pub fn synthesize_full_data(
    potential: &NodalField,
    scenario: &ScatteringScenario,
    opts: &ForwardOptions,
) -> Result<Vec<FarFieldDataset>> {
    scenario.validate()?;
    let cache = KernelCache::new(*potential.grid());
    scenario
        .components()
        .iter()
        .enumerate()
        .map(|(i, part)| {
            let mut o = *opts;
            if let Some(noise) = &opts.field_noise {
                o.field_noise = Some(FieldNoise { level: noise.level, seed: super::derive_seed(noise.seed, i as u64) });
            }
            let (mut d, _) = synthesize_with_cache(potential, part, &o, &cache)?;
            if let Some(noise) = &opts.field_noise {
                d.set_noise(noise.level, Some(noise.seed), true);
            }
            Ok(d)
        })
        .collect()
}
