//! Error norms, power-law rate fits and the two discretization studies
//! (aliasing against a finer synthesis grid, and the sampling theorem).

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::born::born_invert;
use crate::error::{Error, Result};
use crate::forward::FarFieldDataset;
use crate::grid::{periodize, GridSpec, NodalField, Point, SpectralField};

/// `(4R^2/N^2 sum_j |a(x_j) - b(x_j)|^2)^(1/2)`, the trapezoidal L2 norm on
/// the cell; equal to `2R ||a - b||_0`.
pub fn l2_error(approx: &NodalField, reference: &NodalField) -> Result<f64> {
    Ok(approx.grid().period() * approx.sub(reference)?.norm0())
}

/// Least-squares fit of `error ~ C k^(-exponent)` in log-log coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub exponent: f64,
    /// `ln C`.
    pub intercept: f64,
    /// Root mean square of the log residuals.
    pub residual: f64,
    pub points: Vec<(f64, f64)>,
}

pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 2 {
        return Err(Error::domain(format!("a rate fit needs at least 2 points, got {}", points.len())));
    }
    if let Some(p) = points.iter().find(|(k, e)| !(k.is_finite() && *k > 0.0 && e.is_finite() && *e > 0.0)) {
        return Err(Error::domain(format!("rate fit needs positive finite points, got ({}, {})", p.0, p.1)));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("rate fit needs at least two distinct abscissae"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok(RateFit { exponent: -slope, intercept, residual: (ss / m).sqrt(), points: points.to_vec() })
}

/// Errors of a coarse Born reconstruction from fine-grid data.
#[derive(Debug, Clone, PartialEq)]
pub struct AliasingErrors {
    /// Against the potential sampled on the coarse nodes.
    pub coarse: f64,
    /// Spectrally upsampled reconstruction against the fine potential.
    pub fine: f64,
    /// Spectrally upsampled reconstruction against the low-passed fine potential.
    pub lowpass: f64,
    pub reconstruction: NodalField,
}

/// Reconstructs on an `N = coarse_n` grid from `d_fine` restricted to the
/// coarse frequencies and compares with `v_fine` three ways.
pub fn aliasing_study(v_fine: &NodalField, d_fine: &FarFieldDataset, coarse_n: usize) -> Result<AliasingErrors> {
    let fine = *d_fine.grid();
    fine.check_same(v_fine.grid())?;
    let coarse = GridSpec::new(fine.r(), coarse_n)?;
    if coarse_n >= fine.n() || fine.n() % coarse_n != 0 {
        return Err(Error::domain(format!(
            "coarse N = {coarse_n} must be a proper divisor of fine N = {}",
            fine.n()
        )));
    }
    let values = coarse.indices().map(|j| d_fine.values()[fine.offset_unchecked(j)]).collect();
    let d_coarse = FarFieldDataset::new(coarse, d_fine.scenario().clone(), values)?;
    let reconstruction = born_invert(&d_coarse).potential;

    let stride = (fine.n() / coarse_n) as i32;
    let sampled = NodalField::new(
        coarse,
        coarse
            .indices()
            .map(|j| v_fine.values()[fine.offset_unchecked((j.0 * stride, j.1 * stride))])
            .collect(),
    )?;
    let upsampled = reconstruction.to_spectral().zero_pad(&fine)?.to_nodal();
    let lowpassed = v_fine.to_spectral().lowpass(coarse_n as f64 / fine.n() as f64)?.to_nodal();
    Ok(AliasingErrors {
        coarse: l2_error(&reconstruction, &sampled)?,
        fine: l2_error(&upsampled, v_fine)?,
        lowpass: l2_error(&upsampled, &lowpassed)?,
        reconstruction,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingStudy {
    /// `(N, h, ||q_h - q^#||_0)`.
    pub errors: Vec<(usize, f64, f64)>,
    /// Order in `h`; `None` when some error is exactly zero.
    pub order: Option<RateFit>,
}

/// For each `N`, builds `q_h` from `h^2 F_h q_h(j) = g(xi_j)` and measures
/// `||q_h - q^#||_0`, with `q^#` the periodization of `q` over `copies`
/// neighbouring cells in each direction. `g` is the Fourier transform of `q`.
pub fn sampling_study(
    r: f64,
    ns: &[usize],
    copies: usize,
    q: impl Fn(Point) -> Complex64 + Sync,
    g: impl Fn(Point) -> Complex64 + Sync,
) -> Result<SamplingStudy> {
    if ns.len() < 2 {
        return Err(Error::domain("a sampling study needs at least two grid sizes"));
    }
    let grids = ns.iter().map(|&n| GridSpec::new(r, n)).collect::<Result<Vec<_>>>()?;
    let errors: Vec<(usize, f64, f64)> = grids
        .par_iter()
        .map(|grid| {
            let scale = 1.0 / (grid.period() * grid.period());
            let coeffs = grid.frequencies().map(|xi| g(xi) * scale).collect();
            let q_h = SpectralField::new(*grid, coeffs).expect("length matches grid").to_nodal();
            let q_sharp = periodize(*grid, copies, &q);
            let err = q_h.sub(&q_sharp).expect("same grid").norm0();
            (grid.n(), grid.h(), err)
        })
        .collect();
    let pts: Vec<(f64, f64)> = errors.iter().map(|&(_, h, e)| (1.0 / h, e)).collect();
    let order = if pts.iter().all(|p| p.1 > 0.0) { Some(fit_rate(&pts)?) } else { None };
    Ok(SamplingStudy { errors, order })
}

/// Long-form `study,param,value` rows.
pub fn long_form_csv<'a>(rows: impl IntoIterator<Item = (&'a str, String, f64)>) -> String {
    let mut out = String::from("study,param,value\n");
    for (study, param, value) in rows {
        let _ = writeln!(out, "{study},{param},{value:?}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ScatteringScenario;
    use crate::grid::ZERO;

    #[test]
    fn l2_error_examples() {
        let g = GridSpec::new(2.1, 64).unwrap();
        let zero = NodalField::zeros(g);
        let one = zero.map(|_| Complex64::new(1.0, 0.0));
        assert_eq!(l2_error(&one, &one).unwrap(), 0.0);
        assert!((l2_error(&one, &zero).unwrap() - 4.2).abs() < 1e-14);
        let mut v = vec![ZERO; g.len()];
        v[100] = Complex64::new(1.0, 0.0);
        let spike = NodalField::new(g, v).unwrap();
        assert!((l2_error(&spike, &zero).unwrap() - 0.065625).abs() < 1e-15);
        assert!(l2_error(&zero, &NodalField::zeros(GridSpec::new(2.1, 32).unwrap())).is_err());
    }

    #[test]
    fn fit_rate_examples() {
        let exact: Vec<(f64, f64)> = [10.0f64, 100.0, 1000.0].iter().map(|&k| (k, k.powf(-0.5))).collect();
        let fit = fit_rate(&exact).unwrap();
        assert!((fit.exponent - 0.5).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
        let flat = fit_rate(&[(1.0, 3.0), (5.0, 3.0)]).unwrap();
        assert!(flat.exponent.abs() < 1e-15);
        assert!(fit_rate(&[(1.0, 1.0)]).is_err());
        assert!(fit_rate(&[(1.0, 1.0), (2.0, 0.0)]).is_err());
        assert!(fit_rate(&[(-1.0, 1.0), (2.0, 1.0)]).is_err());
        assert!(fit_rate(&[(2.0, 1.0), (2.0, 3.0)]).is_err());
    }

    #[test]
    fn aliasing_of_zero_potential() {
        let fine = GridSpec::new(2.1, 16).unwrap();
        let d = FarFieldDataset::zeros(fine, ScatteringScenario::Backscattering).unwrap();
        let a = aliasing_study(&NodalField::zeros(fine), &d, 8).unwrap();
        assert_eq!((a.coarse, a.fine, a.lowpass), (0.0, 0.0, 0.0));
        assert!(aliasing_study(&NodalField::zeros(fine), &d, 16).is_err());
        assert!(aliasing_study(&NodalField::zeros(fine), &d, 6).is_err());
    }

    #[test]
    fn long_form_rows() {
        let text = long_form_csv([("born", "k=10".to_string(), 0.5)]);
        assert_eq!(text, "study,param,value\nborn,k=10,0.5\n");
    }
}
