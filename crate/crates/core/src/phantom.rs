//! Synthetic test potentials supported in the unit disk.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, NodalField, Point};

const GAUSSIAN_WIDTH: f64 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub enum Phantom {
    /// `chi_annulus + 1.2 chi_square`: annulus `0.7 < |x| < 1`, square `|x1| + |x2| < 0.3`.
    AnnulusSquare,
    Zero,
    /// `exp(-|x|^2 / (2 * 0.2^2))` cut to zero outside the unit disk.
    Gaussian,
    Scaled(f64, Box<Phantom>),
}

impl Phantom {
    pub fn eval(&self, x: Point) -> f64 {
        let r2 = x[0] * x[0] + x[1] * x[1];
        match self {
            Phantom::AnnulusSquare => {
                let annulus = r2 > 0.49 && r2 < 1.0;
                let square = x[0].abs() + x[1].abs() < 0.3;
                if annulus {
                    1.0
                } else if square {
                    1.2
                } else {
                    0.0
                }
            }
            Phantom::Zero => 0.0,
            Phantom::Gaussian => {
                if r2 < 1.0 {
                    (-r2 / (2.0 * GAUSSIAN_WIDTH * GAUSSIAN_WIDTH)).exp()
                } else {
                    0.0
                }
            }
            Phantom::Scaled(f, inner) => f * inner.eval(x),
        }
    }

    /// Nodal samples on `grid`.
    pub fn sample(&self, grid: GridSpec) -> NodalField {
        NodalField::from_real_fn(grid, |x| self.eval(x))
    }
}

impl FromStr for Phantom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "annulus-square" => Ok(Phantom::AnnulusSquare),
            "zero" => Ok(Phantom::Zero),
            "gaussian" => Ok(Phantom::Gaussian),
            _ => {
                let rest = s
                    .strip_prefix("scaled:")
                    .ok_or_else(|| Error::parse("phantom", format!("unknown phantom {s:?}")))?;
                let (factor, inner) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::parse("phantom", format!("expected scaled:<f>:<name>, got {s:?}")))?;
                let factor: f64 = factor
                    .parse()
                    .map_err(|_| Error::parse("phantom", format!("bad scale factor {factor:?}")))?;
                Ok(Phantom::Scaled(factor, Box::new(inner.parse()?)))
            }
        }
    }
}

impl fmt::Display for Phantom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phantom::AnnulusSquare => write!(f, "annulus-square"),
            Phantom::Zero => write!(f, "zero"),
            Phantom::Gaussian => write!(f, "gaussian"),
            Phantom::Scaled(s, inner) => write!(f, "scaled:{s}:{inner}"),
        }
    }
}
