//! Scattering geometries: for a frequency `xi` pick `(theta', theta, k)` with
//! `k (theta' - theta) = 2 pi xi`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::Point;
use crate::special::WaveNumber;

/// Unit vectors are accepted up to this deviation in norm.
pub const UNIT_TOLERANCE: f64 = 1e-14;

/// Which two-dimensional slice of `(theta', theta, k)` the data lives on.
#[derive(Debug, Clone, PartialEq)]
pub enum ScatteringScenario {
    FixedEnergy { k0: f64 },
    FixedAngle { theta0: Point },
    Backscattering,
    /// Averages fixed-angle reconstructions over several incident directions.
    FullData { angles: Vec<Point> },
}

/// One experiment `(theta', theta, k)` in `G_xi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentParams {
    pub theta_out: Point,
    pub theta_in: Point,
    pub k: WaveNumber,
}

pub fn unit_from_angle(angle: f64) -> Point {
    let (s, c) = angle.sin_cos();
    [c, s]
}

fn norm(v: Point) -> f64 {
    v[0].hypot(v[1])
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn check_unit(v: Point) -> Result<()> {
    if !((norm(v) - 1.0).abs() <= UNIT_TOLERANCE) {
        return Err(Error::domain(format!("direction ({}, {}) is not a unit vector", v[0], v[1])));
    }
    Ok(())
}

/// Counterclockwise rotation by `alpha`.
fn rotate(alpha: f64, v: Point) -> Point {
    let (s, c) = alpha.sin_cos();
    [c * v[0] - s * v[1], s * v[0] + c * v[1]]
}

impl ScatteringScenario {
    pub fn fixed_energy(k0: f64) -> Result<Self> {
        let s = ScatteringScenario::FixedEnergy { k0 };
        s.validate()?;
        Ok(s)
    }

    pub fn fixed_angle(theta0: Point) -> Result<Self> {
        let s = ScatteringScenario::FixedAngle { theta0 };
        s.validate()?;
        Ok(s)
    }

    pub fn full_data(angles: Vec<Point>) -> Result<Self> {
        let s = ScatteringScenario::FullData { angles };
        s.validate()?;
        Ok(s)
    }

    /// `count` incident directions equally spaced in `[0, 2 pi)`.
    pub fn full_data_equispaced(count: usize) -> Result<Self> {
        Self::full_data((0..count).map(|i| unit_from_angle(2.0 * PI * i as f64 / count as f64)).collect())
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ScatteringScenario::FixedEnergy { k0 } => {
                if !(k0.is_finite() && *k0 > 0.0) {
                    return Err(Error::domain(format!("fixed energy needs k0 > 0, got {k0}")));
                }
            }
            ScatteringScenario::FixedAngle { theta0 } => check_unit(*theta0)?,
            ScatteringScenario::Backscattering => {}
            ScatteringScenario::FullData { angles } => {
                if angles.is_empty() {
                    return Err(Error::domain("full data needs at least one incident angle"));
                }
                angles.iter().try_for_each(|a| check_unit(*a))?;
            }
        }
        Ok(())
    }

    /// Whether `xi` lies in the covered frequency set `Omega`.
    pub fn in_omega(&self, xi: Point) -> bool {
        let r = norm(xi);
        match self {
            ScatteringScenario::FixedEnergy { k0 } => r < k0 / PI,
            ScatteringScenario::FixedAngle { theta0 } => dot(xi, *theta0).abs() > 1e-14 * r,
            ScatteringScenario::Backscattering | ScatteringScenario::FullData { .. } => r > 0.0,
        }
    }

    /// The experiment assigned to `xi`, or `None` outside `Omega`.
    ///
    /// `FullData` is an average over incident directions rather than a pointwise
    /// map and always yields `None` here; see [`Self::components`].
    pub fn experiment_params(&self, xi: Point) -> Option<ExperimentParams> {
        if !self.in_omega(xi) {
            return None;
        }
        let r = norm(xi);
        let (theta_in, theta_out, k) = match self {
            ScatteringScenario::FixedEnergy { k0 } => {
                let alpha = (-PI * r / k0).acos();
                // at xi = 0 any direction works (forward scattering)
                let dir = if r > 0.0 { [xi[0] / r, xi[1] / r] } else { [1.0, 0.0] };
                let theta = rotate(alpha, dir);
                let out = [theta[0] + 2.0 * PI * xi[0] / k0, theta[1] + 2.0 * PI * xi[1] / k0];
                (theta, out, *k0)
            }
            ScatteringScenario::FixedAngle { theta0 } => {
                let k = -PI * r * r / dot(xi, *theta0);
                let out = [theta0[0] + 2.0 * PI * xi[0] / k, theta0[1] + 2.0 * PI * xi[1] / k];
                (*theta0, out, k)
            }
            ScatteringScenario::Backscattering => {
                let theta = [-xi[0] / r, -xi[1] / r];
                (theta, [-theta[0], -theta[1]], PI * r)
            }
            ScatteringScenario::FullData { .. } => return None,
        };
        Some(ExperimentParams {
            theta_out,
            theta_in,
            k: WaveNumber::new(k).ok()?,
        })
    }

    /// The pointwise scenarios making up this one: the fixed-angle pieces of
    /// `FullData`, or the scenario itself.
    pub fn components(&self) -> Vec<ScatteringScenario> {
        match self {
            ScatteringScenario::FullData { angles } => angles
                .iter()
                .map(|a| ScatteringScenario::FixedAngle { theta0: *a })
                .collect(),
            other => vec![other.clone()],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ScatteringScenario::FixedEnergy { .. } => "fixed-energy",
            ScatteringScenario::FixedAngle { .. } => "fixed-angle",
            ScatteringScenario::Backscattering => "backscattering",
            ScatteringScenario::FullData { .. } => "full-data",
        }
    }

    /// Parameter string for file headers, e.g. `k0:10` or `theta0:1:0`.
    pub fn params_string(&self) -> String {
        match self {
            ScatteringScenario::FixedEnergy { k0 } => format!("k0:{k0}"),
            ScatteringScenario::FixedAngle { theta0 } => format!("theta0:{}:{}", theta0[0], theta0[1]),
            ScatteringScenario::Backscattering => "none".to_string(),
            ScatteringScenario::FullData { angles } => {
                let parts: Vec<String> = angles.iter().map(|a| format!("{}:{}", a[0], a[1])).collect();
                format!("angles:{}", parts.join(";"))
            }
        }
    }

    /// Inverse of [`name`](Self::name) plus [`params_string`](Self::params_string).
    pub fn from_parts(name: &str, params: &str) -> Result<Self> {
        let bad = || Error::parse("scenario", format!("{name} with params {params:?}"));
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
        let s = match name {
            "fixed-energy" => {
                let k0 = params.strip_prefix("k0:").ok_or_else(bad)?;
                ScatteringScenario::FixedEnergy { k0: num(k0)? }
            }
            "fixed-angle" => {
                let rest = params.strip_prefix("theta0:").ok_or_else(bad)?;
                let (a, b) = rest.split_once(':').ok_or_else(bad)?;
                ScatteringScenario::FixedAngle { theta0: [num(a)?, num(b)?] }
            }
            "backscattering" => ScatteringScenario::Backscattering,
            "full-data" => {
                let rest = params.strip_prefix("angles:").ok_or_else(bad)?;
                let angles = rest
                    .split(';')
                    .map(|p| {
                        let (a, b) = p.split_once(':').ok_or_else(bad)?;
                        Ok([num(a)?, num(b)?])
                    })
                    .collect::<Result<Vec<_>>>()?;
                ScatteringScenario::FullData { angles }
            }
            _ => return Err(bad()),
        };
        s.validate()?;
        Ok(s)
    }
}

impl fmt::Display for ScatteringScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name(), self.params_string())
    }
}

impl FromStr for ScatteringScenario {
    type Err = Error;

    /// Parses `name` or `name(params)` as produced by `Display`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once('(') {
            Some((name, rest)) => {
                let params = rest.strip_suffix(')').ok_or_else(|| Error::parse("scenario", s.to_string()))?;
                Self::from_parts(name, params)
            }
            None => Self::from_parts(s, "none"),
        }
    }
}

/// Largest even `N` with `N < 4 R k0 / pi`: the finest mesh whose
/// frequencies along the axes all carry fixed-energy data.
pub fn max_full_mesh_n(k0: f64, r: f64) -> usize {
    let bound = 4.0 * r * k0 / PI;
    if !(bound > 0.0) {
        return 0;
    }
    let mut n = (bound.ceil() as usize).saturating_sub(1);
    if n % 2 == 1 {
        n -= 1;
    }
    n
}
