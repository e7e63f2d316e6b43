//! Flat `key = value` experiment configuration. Values are resolved as
//! defaults, then the config file, then command-line flags; the resolved set
//! is echoed beside the outputs so a run can be repeated with `--config`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;

use scatter2d_core::geometry::{max_full_mesh_n, unit_from_angle};
use scatter2d_core::{GridSpec, Phantom, Point, ScatteringScenario};

use crate::Usage;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseAt {
    Dataset,
    Field,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub r: f64,
    pub n: usize,
    pub scenario: String,
    pub k0: f64,
    pub theta0: Point,
    pub angles: Vec<Point>,
    pub phantom: Phantom,
    pub noise: f64,
    pub seed: u64,
    pub noise_at: NoiseAt,
    pub tol: f64,
    pub iters: usize,
    pub out: PathBuf,
    pub fine_factor: usize,
    /// Wavenumbers of a sweep.
    pub ks: Vec<f64>,
    /// Grid sizes of a sweep; empty means just `n`.
    pub sizes: Vec<usize>,
    pub study: String,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            r: 2.1,
            n: 32,
            scenario: "backscattering".into(),
            k0: 10.0,
            theta0: unit_from_angle(PI / 4.0),
            angles: equispaced(10),
            phantom: Phantom::AnnulusSquare,
            noise: 0.0,
            seed: 0,
            noise_at: NoiseAt::Dataset,
            tol: 1e-7,
            iters: 6,
            out: PathBuf::from("out"),
            fine_factor: 2,
            ks: vec![1.0, 10.0, 100.0],
            sizes: vec![],
            study: "iterate".into(),
        }
    }
}

fn equispaced(count: usize) -> Vec<Point> {
    (0..count).map(|i| unit_from_angle(2.0 * PI * i as f64 / count as f64)).collect()
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> anyhow::Result<T> {
    value.trim().parse().map_err(|_| usage(format!("{key}: cannot parse {value:?}")))
}

/// An angle in radians, or a direction `x,y`.
fn direction(key: &str, value: &str) -> anyhow::Result<Point> {
    match value.split_once(',') {
        Some((x, y)) => Ok([num(key, x)?, num(key, y)?]),
        None => Ok(unit_from_angle(num(key, value)?)),
    }
}

fn list<T: std::str::FromStr>(key: &str, value: &str) -> anyhow::Result<Vec<T>> {
    value.split(',').filter(|s| !s.trim().is_empty()).map(|s| num(key, s)).collect()
}

impl ExperimentConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> anyhow::Result<()> {
        let value = value.trim();
        match key {
            "R" => self.r = num(key, value)?,
            "N" => self.n = num(key, value)?,
            "scenario" => {
                if !["fixed-energy", "fixed-angle", "backscattering", "full-data"].contains(&value) {
                    return Err(usage(format!("unknown scenario {value:?}")));
                }
                self.scenario = value.to_string();
            }
            "k0" => self.k0 = num(key, value)?,
            "theta0" => self.theta0 = direction(key, value)?,
            "angles" => {
                self.angles = match value.parse::<usize>() {
                    Ok(count) => equispaced(count),
                    Err(_) => value.split(';').map(|a| direction(key, a)).collect::<anyhow::Result<_>>()?,
                }
            }
            "phantom" => self.phantom = value.parse().map_err(|e| usage(format!("phantom: {e}")))?,
            "noise" => self.noise = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "noise_at" => {
                self.noise_at = match value {
                    "dataset" => NoiseAt::Dataset,
                    "field" => NoiseAt::Field,
                    _ => return Err(usage(format!("noise_at must be dataset or field, got {value:?}"))),
                }
            }
            "tol" => self.tol = num(key, value)?,
            "iters" => self.iters = num(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "fine_factor" => self.fine_factor = num(key, value)?,
            "k" => self.ks = list(key, value)?,
            "sizes" => self.sizes = list(key, value)?,
            "study" => {
                if !["iterate", "aliasing", "sampling"].contains(&value) {
                    return Err(usage(format!("unknown study {value:?}")));
                }
                self.study = value.to_string();
            }
            _ => return Err(usage(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// Applies every `key = value` line of a config file; `#` starts a comment.
    pub fn apply_file(&mut self, text: &str) -> anyhow::Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("config line {}: expected key = value", i + 1)))?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn grid(&self) -> anyhow::Result<GridSpec> {
        self.grid_of(self.n)
    }

    pub fn grid_of(&self, n: usize) -> anyhow::Result<GridSpec> {
        GridSpec::new(self.r, n).map_err(|e| usage(e.to_string()))
    }

    pub fn scenario(&self) -> anyhow::Result<ScatteringScenario> {
        self.scenario_with_k0(self.k0)
    }

    pub fn scenario_with_k0(&self, k0: f64) -> anyhow::Result<ScatteringScenario> {
        let s = match self.scenario.as_str() {
            "fixed-energy" => ScatteringScenario::fixed_energy(k0),
            "fixed-angle" => ScatteringScenario::fixed_angle(self.theta0),
            "backscattering" => Ok(ScatteringScenario::Backscattering),
            _ => ScatteringScenario::full_data(self.angles.clone()),
        };
        s.map_err(|e| usage(e.to_string()))
    }

    pub fn sizes(&self) -> Vec<usize> {
        if self.sizes.is_empty() {
            vec![self.n]
        } else {
            self.sizes.clone()
        }
    }

    /// Checks value ranges and warns when fixed-energy data cannot cover the mesh.
    pub fn validate(&self) -> anyhow::Result<()> {
        self.grid()?;
        self.scenario()?;
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(usage(format!("noise must be nonnegative, got {}", self.noise)));
        }
        if !(self.tol > 0.0) {
            return Err(usage(format!("tol must be positive, got {}", self.tol)));
        }
        if self.fine_factor < 2 {
            return Err(usage("fine_factor must be at least 2"));
        }
        if self.scenario == "fixed-energy" {
            let full = max_full_mesh_n(self.k0, self.r);
            if self.n > full {
                log::warn!(
                    "fixed energy k0 = {} covers the whole mesh only for N <= {full}; \
                     frequencies with |xi| >= k0/pi are zero-filled",
                    self.k0
                );
            }
        }
        Ok(())
    }

    /// The resolved configuration in the file format.
    pub fn echo(&self) -> String {
        let join = |v: Vec<String>, sep: &str| v.join(sep);
        let angles = join(self.angles.iter().map(|a| format!("{:?},{:?}", a[0], a[1])).collect(), ";");
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("R", format!("{:?}", self.r));
        put("N", self.n.to_string());
        put("scenario", self.scenario.clone());
        put("k0", format!("{:?}", self.k0));
        put("theta0", format!("{:?},{:?}", self.theta0[0], self.theta0[1]));
        put("angles", angles);
        put("phantom", self.phantom.to_string());
        put("noise", format!("{:?}", self.noise));
        put("seed", self.seed.to_string());
        put("noise_at", if self.noise_at == NoiseAt::Field { "field" } else { "dataset" }.to_string());
        put("tol", format!("{:?}", self.tol));
        put("iters", self.iters.to_string());
        put("out", self.out.display().to_string());
        put("fine_factor", self.fine_factor.to_string());
        put("k", join(self.ks.iter().map(|k| format!("{k:?}")).collect(), ","));
        put("sizes", join(self.sizes.iter().map(|n| n.to_string()).collect(), ","));
        put("study", self.study.clone());
        out
    }
}
