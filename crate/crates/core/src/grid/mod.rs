//! Trigonometric space on the periodic square `G_R = (-R, R)^2`.
//!
//! A [`GridSpec`] fixes the half side `R` and the number of nodes `N` per axis.
//! Fields live either as nodal values ([`NodalField`]) or as normalized Fourier
//! coefficients ([`SpectralField`]) with `v = sum_j c_j exp(2 pi i xi_j . x)`,
//! `xi_j = j / (2R)`, so that `||v||_0^2 = sum_j |c_j|^2`.

pub(crate) mod csv;
pub(crate) mod fft;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use self::csv::FieldKind;

/// Signed index pair `(j1, j2)` with `-N/2 <= jk < N/2`.
pub type Index = (i32, i32);

/// A point in the plane (space or frequency).
pub type Point = [f64; 2];

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    r: f64,
    n: usize,
}

impl GridSpec {
    pub fn new(r: f64, n: usize) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::domain(format!("half side R must be positive, got {r}")));
        }
        if n < 4 || n % 2 != 0 {
            return Err(Error::domain(format!("N must be even and at least 4, got {n}")));
        }
        if n > i32::MAX as usize / 2 {
            return Err(Error::domain(format!("N = {n} is too large")));
        }
        Ok(GridSpec { r, n })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Mesh step `2R / N`.
    pub fn h(&self) -> f64 {
        2.0 * self.r / self.n as f64
    }

    pub fn period(&self) -> f64 {
        2.0 * self.r
    }

    /// Number of nodes, `N^2`.
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn half(&self) -> i32 {
        (self.n / 2) as i32
    }

    pub fn contains(&self, j: Index) -> bool {
        let half = self.half();
        (-half..half).contains(&j.0) && (-half..half).contains(&j.1)
    }

    /// Position of `j` in the row-major storage order.
    pub fn offset(&self, j: Index) -> Result<usize> {
        if !self.contains(j) {
            return Err(Error::domain(format!(
                "index ({}, {}) outside Z_h^2 for N = {}",
                j.0, j.1, self.n
            )));
        }
        Ok(self.offset_unchecked(j))
    }

    pub(crate) fn offset_unchecked(&self, j: Index) -> usize {
        let half = self.half();
        (j.0 + half) as usize * self.n + (j.1 + half) as usize
    }

    /// Inverse of [`offset`](Self::offset).
    pub fn index_at(&self, pos: usize) -> Index {
        let half = self.half();
        ((pos / self.n) as i32 - half, (pos % self.n) as i32 - half)
    }

    /// All of `Z_h^2` in storage order.
    pub fn indices(&self) -> impl Iterator<Item = Index> + '_ {
        (0..self.len()).map(move |p| self.index_at(p))
    }

    pub fn node_coords(&self, j: Index) -> Result<Point> {
        self.offset(j)?;
        Ok(self.node_unchecked(j))
    }

    pub(crate) fn node_unchecked(&self, j: Index) -> Point {
        let h = self.h();
        [j.0 as f64 * h, j.1 as f64 * h]
    }

    /// Frequency `xi_j = j / (2R)` in cycles per unit length.
    pub fn freq_coords(&self, j: Index) -> Result<Point> {
        self.offset(j)?;
        Ok(self.freq_unchecked(j))
    }

    pub(crate) fn freq_unchecked(&self, j: Index) -> Point {
        let p = self.period();
        [j.0 as f64 / p, j.1 as f64 / p]
    }

    pub fn nodes(&self) -> impl Iterator<Item = Point> + '_ {
        self.indices().map(move |j| self.node_unchecked(j))
    }

    pub fn frequencies(&self) -> impl Iterator<Item = Point> + '_ {
        self.indices().map(move |j| self.freq_unchecked(j))
    }

    pub(crate) fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self != other {
            return Err(Error::domain(format!(
                "grid mismatch: (R={}, N={}) vs (R={}, N={})",
                self.r, self.n, other.r, other.n
            )));
        }
        Ok(())
    }
}

/// Nodal values `v(jh)` for `j` in `Z_h^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalField {
    grid: GridSpec,
    values: Vec<Complex64>,
}

/// Normalized Fourier coefficients `c_j` for `j` in `Z_h^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

fn check_len(grid: &GridSpec, len: usize) -> Result<()> {
    if len != grid.len() {
        return Err(Error::domain(format!(
            "expected {} entries for N = {}, got {len}",
            grid.len(),
            grid.n()
        )));
    }
    Ok(())
}

impl NodalField {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        check_len(&grid, values.len())?;
        Ok(NodalField { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        NodalField { grid, values: vec![ZERO; grid.len()] }
    }

    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(Point) -> Complex64) -> Self {
        let values = grid.nodes().map(&mut f).collect();
        NodalField { grid, values }
    }

    pub fn from_real_fn(grid: GridSpec, mut f: impl FnMut(Point) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn get(&self, j: Index) -> Result<Complex64> {
        Ok(self.values[self.grid.offset(j)?])
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == ZERO)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        NodalField { grid: self.grid, values: self.values.iter().map(|v| f(*v)).collect() }
    }

    pub fn zip_with(
        &self,
        other: &NodalField,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect();
        Ok(NodalField { grid: self.grid, values })
    }

    pub fn sub(&self, other: &NodalField) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &NodalField) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|v| v * s)
    }

    /// Keeps the real part of every node.
    pub fn real_part(&self) -> Self {
        self.map(|v| Complex64::new(v.re, 0.0))
    }

    /// Discrete `||.||_0`: root mean square of the nodal values.
    pub fn norm0(&self) -> f64 {
        let sum: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        (sum / self.grid.len() as f64).sqrt()
    }

    /// `c_j = N^-2 sum_n v(nh) exp(-2 pi i xi_j . nh)`.
    pub fn to_spectral(&self) -> SpectralField {
        let n = self.grid.n();
        let scale = 1.0 / self.grid.len() as f64;
        let coeffs = fft::forward_signed(n, &self.values).into_iter().map(|c| c * scale).collect();
        SpectralField { grid: self.grid, coeffs }
    }
}

impl SpectralField {
    pub fn new(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        check_len(&grid, coeffs.len())?;
        Ok(SpectralField { grid, coeffs })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        SpectralField { grid, coeffs: vec![ZERO; grid.len()] }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn get(&self, j: Index) -> Result<Complex64> {
        Ok(self.coeffs[self.grid.offset(j)?])
    }

    /// Nodal values `v(nh) = sum_j c_j exp(2 pi i xi_j . nh)`.
    pub fn to_nodal(&self) -> NodalField {
        let values = fft::inverse_signed(self.grid.n(), &self.coeffs);
        NodalField { grid: self.grid, values }
    }

    /// `(sum_j |xi_j|^(2 lambda) |c_j|^2)^(1/2)`, with the zero frequency weighted by one.
    pub fn norm_lambda(&self, lambda: f64) -> Result<f64> {
        if !(lambda >= 0.0) {
            return Err(Error::domain(format!("lambda must be nonnegative, got {lambda}")));
        }
        let sum: f64 = self
            .grid
            .indices()
            .zip(&self.coeffs)
            .map(|(j, c)| {
                let weight = if j == (0, 0) {
                    1.0
                } else {
                    let xi = self.grid.freq_unchecked(j);
                    xi[0].hypot(xi[1]).powf(2.0 * lambda)
                };
                weight * c.norm_sqr()
            })
            .sum();
        Ok(sum.sqrt())
    }

    /// Orthogonal projection `P_h` onto the coarser trigonometric space.
    pub fn project(&self, coarse: &GridSpec) -> Result<SpectralField> {
        if coarse.r() != self.grid.r() {
            return Err(Error::domain(format!(
                "projection needs equal R, got {} and {}",
                self.grid.r(),
                coarse.r()
            )));
        }
        if self.grid.n() % coarse.n() != 0 {
            return Err(Error::domain(format!(
                "coarse N = {} does not divide fine N = {}",
                coarse.n(),
                self.grid.n()
            )));
        }
        let coeffs = coarse
            .indices()
            .map(|j| self.coeffs[self.grid.offset_unchecked(j)])
            .collect();
        Ok(SpectralField { grid: *coarse, coeffs })
    }

    /// Embeds into a finer grid with zeros at the new frequencies.
    pub fn zero_pad(&self, fine: &GridSpec) -> Result<SpectralField> {
        if fine.r() != self.grid.r() || fine.n() < self.grid.n() {
            return Err(Error::domain(format!(
                "cannot pad (R={}, N={}) into (R={}, N={})",
                self.grid.r(),
                self.grid.n(),
                fine.r(),
                fine.n()
            )));
        }
        let mut coeffs = vec![ZERO; fine.len()];
        for (j, c) in self.grid.indices().zip(&self.coeffs) {
            coeffs[fine.offset_unchecked(j)] = *c;
        }
        Ok(SpectralField { grid: *fine, coeffs })
    }

    /// Zeroes every coefficient with `max(|j1|, |j2|) > keep_fraction * N / 2`.
    pub fn lowpass(&self, keep_fraction: f64) -> Result<SpectralField> {
        if !(keep_fraction > 0.0 && keep_fraction <= 1.0) {
            return Err(Error::domain(format!(
                "keep fraction must lie in (0, 1], got {keep_fraction}"
            )));
        }
        let cut = keep_fraction * (self.grid.n() / 2) as f64;
        let coeffs = self
            .grid
            .indices()
            .zip(&self.coeffs)
            .map(|(j, c)| {
                let m = j.0.unsigned_abs().max(j.1.unsigned_abs()) as f64;
                if m > cut {
                    ZERO
                } else {
                    *c
                }
            })
            .collect();
        Ok(SpectralField { grid: self.grid, coeffs })
    }
}

/// `Q_h f`: the trigonometric interpolant, stored by its nodal values.
pub fn interpolate_qh(grid: GridSpec, f: impl FnMut(Point) -> Complex64) -> NodalField {
    NodalField::from_fn(grid, f)
}

/// Fallible variant of [`interpolate_qh`]; the first failing node aborts.
pub fn try_interpolate_qh<E>(
    grid: GridSpec,
    mut f: impl FnMut(Point) -> Result<Complex64, E>,
) -> Result<NodalField, E> {
    let values = grid.nodes().map(&mut f).collect::<Result<Vec<_>, E>>()?;
    Ok(NodalField { grid, values })
}

/// Nodal values of the lattice sum `sum_{|m|_inf <= copies} f(x + 2R m)`.
pub fn periodize(grid: GridSpec, copies: usize, f: impl Fn(Point) -> Complex64) -> NodalField {
    let p = grid.period();
    let c = copies as i64;
    NodalField::from_fn(grid, |x| {
        let mut acc = ZERO;
        for m1 in -c..=c {
            for m2 in -c..=c {
                acc += f([x[0] + p * m1 as f64, x[1] + p * m2 as f64]);
            }
        }
        acc
    })
}

/// The basis function `exp(2 pi i xi_j . x)`.
pub fn basis(grid: &GridSpec, j: Index) -> impl Fn(Point) -> Complex64 {
    let xi = grid.freq_unchecked(j);
    move |x| Complex64::from_polar(1.0, 2.0 * PI * (xi[0] * x[0] + xi[1] * x[1]))
}
