//! Order-zero Bessel functions of real argument and the outgoing
//! fundamental solution `Phi(k r) = (i/4) H0^(1)(k r)` of the Helmholtz equation.
//!
//! Small arguments use the power series summed in double-double arithmetic,
//! which absorbs the cancellation between terms of size up to `e^x / x`.
//! Large arguments use the Hankel asymptotic expansion in amplitude/phase
//! form. The crossover sits where the optimally truncated asymptotic series
//! (smallest term about `e^{-2x}`) is far below 1e-10.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

const ASYMPTOTIC_FROM: f64 = 25.0;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// A nonzero real wavenumber. Negative values are meaningful (fixed incident
/// angle data) and are handled through complex conjugation.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct WaveNumber(f64);

impl WaveNumber {
    pub fn new(k: f64) -> Result<Self> {
        if !k.is_finite() || k == 0.0 {
            return Err(Error::domain(format!("wavenumber must be finite and nonzero, got {k}")));
        }
        Ok(WaveNumber(k))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn abs(self) -> f64 {
        self.0.abs()
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0.0
    }
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    const ZERO: Self = DoubleDouble { hi: 0.0, lo: 0.0 };

    fn from_f64(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    fn quick_two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        DoubleDouble { hi: s, lo: b - (s - a) }
    }

    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    fn two_prod(a: f64, b: f64) -> Self {
        let p = a * b;
        DoubleDouble { hi: p, lo: a.mul_add(b, -p) }
    }

    fn add(self, other: Self) -> Self {
        let (s, e) = Self::two_sum(self.hi, other.hi);
        Self::quick_two_sum(s, e + self.lo + other.lo)
    }

    fn neg(self) -> Self {
        DoubleDouble { hi: -self.hi, lo: -self.lo }
    }

    fn mul(self, other: Self) -> Self {
        let p = Self::two_prod(self.hi, other.hi);
        Self::quick_two_sum(p.hi, p.lo + self.hi * other.lo + self.lo * other.hi)
    }

    fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let p = Self::two_prod(q1, b);
        let (s, f) = Self::two_sum(self.hi, -p.hi);
        let q2 = (s + (f - p.lo + self.lo)) / b;
        Self::quick_two_sum(q1, q2)
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// Returns `(J0(x), S(x))` where `Y0 = (2/pi) [(ln(x/2) + gamma) J0 + S]`.
fn power_series(x: f64) -> (f64, f64) {
    // q = x^2 / 4, exact in double-double
    let q = DoubleDouble::two_prod(x, x).div_f64(4.0);
    let mut term = DoubleDouble::from_f64(1.0);
    let mut j0 = term;
    let mut harmonic = DoubleDouble::ZERO;
    let mut s = DoubleDouble::ZERO;
    let mut m = 0.0_f64;
    loop {
        m += 1.0;
        term = term.mul(q).div_f64(m * m).neg();
        harmonic = harmonic.add(DoubleDouble::from_f64(1.0).div_f64(m));
        j0 = j0.add(term);
        s = s.add(term.mul(harmonic).neg());
        if m * m > q.hi && term.hi.abs() * (harmonic.hi + 1.0) < 1e-32 {
            break;
        }
    }
    (j0.to_f64(), s.to_f64())
}

/// Hankel asymptotic amplitudes `(P0(x), Q0(x))`.
fn asymptotic_pq(x: f64) -> (f64, f64) {
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0; // a_k / x^k
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        a *= -odd * odd / (8.0 * k as f64 * x);
        if a.abs() >= prev || a.abs() < 1e-18 {
            break;
        }
        prev = a.abs();
        // P = sum (-1)^m a_{2m} x^{-2m},  Q = sum (-1)^m a_{2m+1} x^{-2m-1}
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * a;
        } else {
            q += sign * a;
        }
    }
    (p, q)
}

/// `(cos(x - pi/4), sin(x - pi/4))` without forming `x - pi/4`.
fn shifted_phase(x: f64) -> (f64, f64) {
    let (s, c) = x.sin_cos();
    ((c + s) * FRAC_1_SQRT_2, (s - c) * FRAC_1_SQRT_2)
}

fn j0_unchecked(x: f64) -> f64 {
    if x < ASYMPTOTIC_FROM {
        power_series(x).0
    } else {
        let (p, q) = asymptotic_pq(x);
        let (c, s) = shifted_phase(x);
        (2.0 / (PI * x)).sqrt() * (p * c - q * s)
    }
}

fn y0_unchecked(x: f64) -> f64 {
    if x < ASYMPTOTIC_FROM {
        let (j0, s) = power_series(x);
        2.0 / PI * (((x / 2.0).ln() + EULER_GAMMA) * j0 + s)
    } else {
        let (p, q) = asymptotic_pq(x);
        let (c, s) = shifted_phase(x);
        (2.0 / PI / x).sqrt() * (p * s + q * c)
    }
}

/// Bessel function of the first kind, order zero.
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::domain(format!("J0 needs a finite nonnegative argument, got {x}")));
    }
    Ok(j0_unchecked(x))
}

/// Bessel function of the second kind, order zero.
pub fn bessel_y0(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::domain(format!("Y0 needs a finite positive argument, got {x}")));
    }
    Ok(y0_unchecked(x))
}

/// `H0^(1)(x) = J0(x) + i Y0(x)` for `x > 0`.
pub fn hankel_h0(x: f64) -> Result<Complex64> {
    let y = bessel_y0(x)?;
    Ok(Complex64::new(j0_unchecked(x), y))
}

/// Outgoing fundamental solution `(i/4) H0^(1)(k r)`; for `k < 0` the
/// conjugate of the value at `|k|`.
pub fn phi(k: WaveNumber, r: f64) -> Result<Complex64> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::domain(format!("phi needs a finite positive distance, got {r}")));
    }
    let h = hankel_h0(k.abs() * r)?;
    let v = Complex64::new(-h.im / 4.0, h.re / 4.0);
    Ok(if k.is_negative() { v.conj() } else { v })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn reference_values() {
        assert_eq!(bessel_j0(0.0).unwrap(), 1.0);
        assert_abs_diff_eq!(bessel_j0(1.0).unwrap(), 0.7651976865579666, epsilon = 1e-10);
        assert_abs_diff_eq!(bessel_j0(2.404825557695773).unwrap(), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(bessel_y0(1.0).unwrap(), 0.08825696421567696, epsilon = 1e-10);
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_j0(-1.0).is_err());
        assert!(bessel_j0(f64::INFINITY).is_err());
        assert!(bessel_y0(0.0).is_err());
        assert!(bessel_y0(-2.0).is_err());
        assert!(WaveNumber::new(0.0).is_err());
        assert!(WaveNumber::new(f64::NAN).is_err());
        let k = WaveNumber::new(1.0).unwrap();
        assert!(phi(k, 0.0).is_err());
        assert!(phi(k, -1.0).is_err());
    }

    #[test]
    fn y0_logarithmic_part_is_split_off_near_zero() {
        let x = 1e-5;
        let rest = bessel_y0(x).unwrap()
            - 2.0 / PI * ((x / 2.0).ln() + EULER_GAMMA) * bessel_j0(x).unwrap();
        // the remainder is O(x^2)
        assert!(rest.abs() < 1e-9, "{rest}");
    }

    #[test]
    fn series_and_asymptotic_branches_agree_at_crossover() {
        let x = ASYMPTOTIC_FROM;
        let (j_series, s) = power_series(x);
        let y_series = 2.0 / PI * (((x / 2.0).ln() + EULER_GAMMA) * j_series + s);
        let (p, q) = asymptotic_pq(x);
        let (c, sn) = shifted_phase(x);
        let amp = (2.0 / (PI * x)).sqrt();
        assert_abs_diff_eq!(j_series, amp * (p * c - q * sn), epsilon = 1e-14);
        assert_abs_diff_eq!(y_series, amp * (p * sn + q * c), epsilon = 1e-14);
    }

    #[test]
    fn phi_values() {
        let k = WaveNumber::new(1.0).unwrap();
        let v = phi(k, 1.0).unwrap();
        assert_abs_diff_eq!(v.re, -0.02206424, epsilon = 1e-8);
        assert_abs_diff_eq!(v.im, 0.19129942, epsilon = 1e-8);
        let w = phi(WaveNumber::new(-1.0).unwrap(), 1.0).unwrap();
        assert_eq!(w, v.conj());

        let big = phi(WaveNumber::new(2.0).unwrap(), 50.0).unwrap().norm();
        let expect = 0.25 * (2.0 / (PI * 100.0)).sqrt();
        assert!((big / expect - 1.0).abs() < 0.02);
    }
}
