//! Direct problem on the torus `G_R`: the periodized Lippmann–Schwinger
//! equation
//!
//! ```text
//! u_s - K * (V u_s) = K * (V u_i),   u_i(x) = exp(i k theta . x)
//! ```
//!
//! where `K` is the outgoing Green's function smoothly cut off beyond radius 2
//! and `*` is the trapezoidal convolution on the nodes (trigonometric
//! collocation). Far fields follow by quadrature of `exp(-i k theta' . x) V u`.

mod batch;
mod dataset;
pub mod gmres;
mod noise;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, NodalField, Point, SpectralField, ZERO};
use crate::special::{phi, WaveNumber};

pub(crate) use self::batch::{plan_experiments, run_grouped, Experiment};
pub use self::batch::{KernelCache, SolveCounts};
pub use self::dataset::{
    synthesize_dataset, synthesize_full_data, synthesize_with_cache, FarFieldDataset,
    ForwardOptions, SynthesisStats,
};
pub use self::gmres::{GmresOptions, GmresReport};
pub use self::noise::{add_noise, derive_seed, FieldNoise};

/// The Green's function is untouched on `[0, CUTOFF_INNER]`.
pub const CUTOFF_INNER: f64 = 2.0;
/// ... and identically zero from `CUTOFF_OUTER` on.
pub const CUTOFF_OUTER: f64 = 2.05;

/// `C^2` cutoff: 1 up to 2, 0 beyond 2.05, quintic smoothstep between.
pub fn cutoff(r: f64) -> f64 {
    if r <= CUTOFF_INNER {
        1.0
    } else if r >= CUTOFF_OUTER {
        0.0
    } else {
        let t = (r - CUTOFF_INNER) / (CUTOFF_OUTER - CUTOFF_INNER);
        1.0 - t * t * t * (10.0 - t * (15.0 - 6.0 * t))
    }
}

/// The cut Green's function `W(|x|) Phi(k |x|)`, set to zero at the origin.
pub fn cut_green(k: WaveNumber, x: Point) -> Complex64 {
    let r = x[0].hypot(x[1]);
    if r == 0.0 || r >= CUTOFF_OUTER {
        return ZERO;
    }
    // r > 0 is checked above, so phi cannot fail
    phi(k, r).map(|v| v * cutoff(r)).unwrap_or(ZERO)
}

/// Spectral multiplier of the periodized, cut Green's function for one `k`.
#[derive(Debug, Clone)]
pub struct PeriodizedKernel {
    k: WaveNumber,
    ghat: SpectralField,
}

impl PeriodizedKernel {
    /// Samples `K` on the nodes and stores `(2R)^2 c_j(K)`, so that multiplying
    /// spectra performs the `h^2`-weighted periodic convolution.
    pub fn build(grid: GridSpec, k: WaveNumber) -> Self {
        if grid.r() <= CUTOFF_OUTER {
            log::warn!(
                "R = {} does not contain the kernel cutoff radius {CUTOFF_OUTER}; \
                 the periodized kernel overlaps its images",
                grid.r()
            );
        }
        let nodal = NodalField::from_fn(grid, |x| cut_green(k, x));
        let scale = grid.period() * grid.period();
        let coeffs = nodal.to_spectral().into_coeffs().into_iter().map(|c| c * scale).collect();
        let ghat = SpectralField::new(grid, coeffs).expect("length matches grid");
        PeriodizedKernel { k, ghat }
    }

    /// The kernel for `-k`: conjugate nodal samples, i.e. `conj(ghat_{-j})`.
    pub fn conjugate(&self) -> Self {
        let grid = *self.ghat.grid();
        let n = grid.n() as i32;
        let coeffs = grid
            .indices()
            .map(|(a, b)| {
                let reflect = |j: i32| if j == -n / 2 { j } else { -j };
                let src = grid.offset_unchecked((reflect(a), reflect(b)));
                self.ghat.coeffs()[src].conj()
            })
            .collect();
        PeriodizedKernel {
            k: WaveNumber::new(-self.k.get()).expect("nonzero"),
            ghat: SpectralField::new(grid, coeffs).expect("length matches grid"),
        }
    }

    pub fn k(&self) -> WaveNumber {
        self.k
    }

    pub fn grid(&self) -> &GridSpec {
        self.ghat.grid()
    }

    pub fn ghat(&self) -> &SpectralField {
        &self.ghat
    }

    /// `K * (V u)` on raw node vectors.
    fn convolve(&self, potential: &[Complex64], u: &[Complex64]) -> Vec<Complex64> {
        let grid = self.grid();
        let n = grid.n();
        let product: Vec<Complex64> = potential.iter().zip(u).map(|(v, w)| v * w).collect();
        let mut spectrum = crate::grid::fft::forward_signed(n, &product);
        let scale = 1.0 / grid.len() as f64;
        for (s, g) in spectrum.iter_mut().zip(self.ghat.coeffs()) {
            *s *= g * scale;
        }
        crate::grid::fft::inverse_signed(n, &spectrum)
    }
}

/// The convolution term `K * (V u)` of the Lippmann–Schwinger equation.
pub fn apply_ls_operator(
    kernel: &PeriodizedKernel,
    potential: &NodalField,
    u: &NodalField,
) -> Result<NodalField> {
    kernel.grid().check_same(potential.grid())?;
    kernel.grid().check_same(u.grid())?;
    NodalField::new(*kernel.grid(), kernel.convolve(potential.values(), u.values()))
}

/// Plane wave `exp(i k theta . x)` on the nodes.
pub fn incident_field(grid: GridSpec, theta: Point, k: WaveNumber) -> NodalField {
    let k = k.get();
    NodalField::from_fn(grid, |x| Complex64::from_polar(1.0, k * (theta[0] * x[0] + theta[1] * x[1])))
}

fn check_direction(theta: Point) -> Result<()> {
    if !((theta[0].hypot(theta[1]) - 1.0).abs() <= 1e-12) {
        return Err(Error::domain(format!("({}, {}) is not a unit direction", theta[0], theta[1])));
    }
    Ok(())
}

/// Solves for the scattered field with restarted GMRES.
pub fn solve_scattered_field(
    kernel: &PeriodizedKernel,
    potential: &NodalField,
    theta: Point,
    k: WaveNumber,
    tol: f64,
) -> Result<NodalField> {
    let opts = GmresOptions { tol, ..GmresOptions::default() };
    solve_scattered_field_with(kernel, potential, theta, k, &opts).map(|(u, _)| u)
}

/// As [`solve_scattered_field`] with explicit solver settings and a report.
pub fn solve_scattered_field_with(
    kernel: &PeriodizedKernel,
    potential: &NodalField,
    theta: Point,
    k: WaveNumber,
    opts: &GmresOptions,
) -> Result<(NodalField, GmresReport)> {
    if kernel.k() != k {
        return Err(Error::domain(format!(
            "kernel built for k = {} used with k = {}",
            kernel.k().get(),
            k.get()
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::domain(format!("solver tolerance must be positive, got {}", opts.tol)));
    }
    check_direction(theta)?;
    let grid = *kernel.grid();
    grid.check_same(potential.grid())?;
    let incident = incident_field(grid, theta, k);
    let v = potential.values();
    let rhs = kernel.convolve(v, incident.values());
    let (u, report) = gmres::gmres(
        |x| {
            let ku = kernel.convolve(v, x);
            x.iter().zip(ku).map(|(a, b)| a - b).collect()
        },
        &rhs,
        opts,
    )?;
    Ok((NodalField::new(grid, u)?, report))
}

/// Quadrature `h^2 sum_{|x| <= support_radius} exp(-i k theta' . x) V(x) u(x)`.
///
/// Pass `f64::INFINITY` to integrate over every node.
pub fn far_field(
    potential: &NodalField,
    u_total: &NodalField,
    theta_out: Point,
    k: WaveNumber,
    support_radius: f64,
) -> Result<Complex64> {
    potential.grid().check_same(u_total.grid())?;
    Ok(far_field_sum(potential, u_total.values(), theta_out, k, support_radius))
}

pub(crate) fn far_field_sum(
    potential: &NodalField,
    u: &[Complex64],
    theta_out: Point,
    k: WaveNumber,
    support_radius: f64,
) -> Complex64 {
    let grid = potential.grid();
    let h = grid.h();
    let k = k.get();
    let r2 = support_radius * support_radius;
    let mut acc = ZERO;
    for ((x, v), w) in grid.nodes().zip(potential.values()).zip(u) {
        if *v == ZERO || x[0] * x[0] + x[1] * x[1] > r2 {
            continue;
        }
        let phase = Complex64::from_polar(1.0, -k * (theta_out[0] * x[0] + theta_out[1] * x[1]));
        acc += phase * v * w;
    }
    acc * (h * h)
}

/// Far field of the linearized problem (`u = u_i`), equal to `(2R)^2 c_xi(V)`
/// when `xi = k (theta' - theta) / 2 pi` is a mesh frequency.
pub fn linearized_far_field(potential: &NodalField, xi: Point, support_radius: f64) -> Complex64 {
    let grid = potential.grid();
    let h = grid.h();
    let r2 = support_radius * support_radius;
    let mut acc = ZERO;
    for (x, v) in grid.nodes().zip(potential.values()) {
        if x[0] * x[0] + x[1] * x[1] <= r2 {
            acc += Complex64::from_polar(1.0, -2.0 * PI * (xi[0] * x[0] + xi[1] * x[1])) * v;
        }
    }
    acc * (h * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phantom::Phantom;
    use approx::assert_abs_diff_eq;

    fn grid(n: usize) -> GridSpec {
        GridSpec::new(2.1, n).unwrap()
    }

    fn k(v: f64) -> WaveNumber {
        WaveNumber::new(v).unwrap()
    }

    #[test]
    fn cutoff_shape() {
        assert_eq!(cutoff(0.0), 1.0);
        assert_eq!(cutoff(2.0), 1.0);
        assert_eq!(cutoff(2.05), 0.0);
        assert_abs_diff_eq!(cutoff(2.025), 0.5, epsilon = 1e-15);
        let mut prev = 1.0;
        for i in 0..=50 {
            let w = cutoff(2.0 + 0.001 * i as f64);
            assert!(w <= prev);
            prev = w;
        }
    }

    #[test]
    fn kernel_samples() {
        let kk = k(1.0);
        let v = cut_green(kk, [1.0, 0.0]);
        assert_abs_diff_eq!(v.re, -0.02206424, epsilon = 1e-8);
        assert_abs_diff_eq!(v.im, 0.19129942, epsilon = 1e-8);
        assert_eq!(cut_green(kk, [0.0, 0.0]), ZERO);
        assert_eq!(cut_green(kk, [2.05, 0.0]), ZERO);
        let x = [2.08 / 2f64.sqrt(), 2.08 / 2f64.sqrt()];
        assert_eq!(cut_green(kk, x), ZERO);
        let near = cut_green(kk, [2.03, 0.0]);
        assert!(near.norm() <= phi(kk, 2.03).unwrap().norm());
    }

    #[test]
    fn conjugate_kernel_matches_direct_build() {
        let g = grid(16);
        let plus = PeriodizedKernel::build(g, k(2.5));
        let minus = PeriodizedKernel::build(g, k(-2.5));
        let conj = plus.conjugate();
        assert_eq!(conj.k(), minus.k());
        for (a, b) in conj.ghat().coeffs().iter().zip(minus.ghat().coeffs()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn operator_is_zero_for_zero_potential_and_linear() {
        let g = grid(16);
        let kern = PeriodizedKernel::build(g, k(2.0));
        let u = NodalField::from_fn(g, |x| Complex64::new(x[0].cos(), x[1]));
        let zero = apply_ls_operator(&kern, &NodalField::zeros(g), &u).unwrap();
        assert!(zero.is_zero() || zero.norm0() < 1e-300);

        let v = Phantom::AnnulusSquare.sample(g);
        let u2 = NodalField::from_fn(g, |x| Complex64::new(1.0, x[0] * x[1]));
        let (a, b) = (Complex64::new(0.3, -2.0), Complex64::new(-1.5, 0.25));
        let lhs = apply_ls_operator(&kern, &v, &u.scale(a).add(&u2.scale(b)).unwrap()).unwrap();
        let rhs = apply_ls_operator(&kern, &v, &u)
            .unwrap()
            .scale(a)
            .add(&apply_ls_operator(&kern, &v, &u2).unwrap().scale(b))
            .unwrap();
        assert!(lhs.sub(&rhs).unwrap().norm0() <= 1e-12 * lhs.norm0());
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let kern = PeriodizedKernel::build(grid(16), k(1.0));
        let other = NodalField::zeros(grid(8));
        assert!(apply_ls_operator(&kern, &other, &other).is_err());
        assert!(solve_scattered_field(&kern, &other, [1.0, 0.0], k(1.0), 1e-8).is_err());
    }

    #[test]
    fn solve_preconditions() {
        let g = grid(8);
        let kern = PeriodizedKernel::build(g, k(1.0));
        let v = Phantom::AnnulusSquare.sample(g);
        assert!(solve_scattered_field(&kern, &v, [1.0, 0.0], k(2.0), 1e-8).is_err());
        assert!(solve_scattered_field(&kern, &v, [1.0, 0.0], k(1.0), 0.0).is_err());
        assert!(solve_scattered_field(&kern, &v, [1.0, 1.0], k(1.0), 1e-8).is_err());
        let zero = solve_scattered_field(&kern, &NodalField::zeros(g), [1.0, 0.0], k(1.0), 1e-8).unwrap();
        assert!(zero.is_zero());
    }

    #[test]
    fn far_field_of_incident_wave_is_the_discrete_transform() {
        let g = grid(32);
        let v = Phantom::AnnulusSquare.sample(g);
        let spectrum = v.to_spectral();
        let scale = g.period() * g.period();
        for j in [(1, 0), (-3, 5), (7, -2)] {
            let xi = g.freq_coords(j).unwrap();
            let p = crate::geometry::ScatteringScenario::Backscattering.experiment_params(xi).unwrap();
            let ui = incident_field(g, p.theta_in, p.k);
            let ff = far_field(&v, &ui, p.theta_out, p.k, 1.0).unwrap();
            let expect = spectrum.get(j).unwrap() * scale;
            assert!((ff - expect).norm() < 1e-10, "{j:?}: {ff} vs {expect}");
            assert!((linearized_far_field(&v, xi, 1.0) - expect).norm() < 1e-10);
        }
        let zero = far_field(&NodalField::zeros(g), &v, [1.0, 0.0], k(1.0), 1.0).unwrap();
        assert_eq!(zero, ZERO);
    }
}
