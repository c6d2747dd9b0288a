//! The mollifier `φ(x) = c·exp(-1/(x(1-x)))` on `[0, 1]` and its Fourier transform.
//!
//! `φ` is symmetric about `1/2`, so `φ̂(u) = e^{-iπu} g(u)` with the real, even
//! function `g(u) = ∫ φ(x) cos(2πu(x - 1/2)) dx`. The profile tabulates `g`
//! and `g'` on a uniform grid (one zero-padded FFT each, i.e. the trapezoid
//! rule, which converges spectrally for this integrand) and interpolates with
//! cubic Hermite polynomials. Beyond the table `g` is integrated directly with
//! Gauss–Legendre panels narrow enough to resolve the oscillation.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

pub const DEFAULT_U_MAX: f64 = 4096.0;
pub const DEFAULT_STEP: f64 = 1.0 / 64.0;
const PANEL_ORDER: usize = 10;
const MIN_PANELS: usize = 64;

fn unnormalized(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        (-1.0 / (x * (1.0 - x))).exp()
    }
}

/// `∫₀¹ exp(-1/(x(1-x))) dx`, computed once.
pub fn raw_integral() -> f64 {
    static INTEGRAL: OnceLock<f64> = OnceLock::new();
    *INTEGRAL.get_or_init(|| {
        let gl = GaussLegendre::new(20);
        let (xs, ws) = gl.composite(0.0, 1.0, 256);
        xs.iter().zip(&ws).map(|(x, w)| w * unnormalized(*x)).sum()
    })
}

/// The normalized bump: zero outside `(0, 1)`, unit integral.
pub fn phi(x: f64) -> f64 {
    unnormalized(x) / raw_integral()
}

/// Tabulated `φ̂` with interpolation; immutable once built.
#[derive(Debug, Clone)]
pub struct BumpProfile {
    normalization: f64,
    u_max: f64,
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
    panel: GaussLegendre,
}

/// Measured rapid-decay constants `C_N = sup |φ̂(u)|·|u|^N` over a tested range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayConstants {
    pub orders: Vec<u32>,
    pub constants: Vec<f64>,
    pub range: (f64, f64),
    pub grid_points: usize,
}

impl Default for BumpProfile {
    fn default() -> Self {
        Self::standard().clone()
    }
}

impl BumpProfile {
    /// Shared profile with the default table (`U_max = 4096`, `h = 1/64`).
    pub fn standard() -> &'static BumpProfile {
        Self::shared_ref()
    }

    /// [`BumpProfile::standard`] as a shareable handle.
    pub fn shared() -> Arc<BumpProfile> {
        Arc::clone(Self::shared_ref())
    }

    fn shared_ref() -> &'static Arc<BumpProfile> {
        static STANDARD: OnceLock<Arc<BumpProfile>> = OnceLock::new();
        STANDARD.get_or_init(|| {
            Arc::new(BumpProfile::new(DEFAULT_U_MAX, DEFAULT_STEP).expect("default bump parameters are valid"))
        })
    }

    /// Builds the table on `[0, u_max]` with grid step `step`; `1/step` must be an integer.
    pub fn new(u_max: f64, step: f64) -> Result<Self> {
        if !(u_max >= 1.0 && u_max.is_finite()) {
            return Err(Error::BadParameters(format!("u_max must be >= 1, got {u_max}")));
        }
        let per_unit = (1.0 / step).round();
        if !(step > 0.0) || per_unit < 1.0 || ((per_unit * step) - 1.0).abs() > 1e-12 {
            return Err(Error::BadParameters(format!(
                "grid step must be 1/q for an integer q, got {step}"
            )));
        }
        let per_unit = per_unit as usize;
        let intervals = (u_max * per_unit as f64).ceil() as usize;

        // Samples per unit length; the nearest alias of a tabulated frequency
        // sits beyond u_max + 64 where φ̂ is far below double precision.
        let samples = (2.0 * u_max + 128.0).ceil() as usize;
        let samples = samples.next_power_of_two();
        let len = samples * per_unit;
        debug_assert!(intervals + 2 <= len / 2);

        let normalization = 1.0 / raw_integral();
        let mut plain = vec![Complex64::new(0.0, 0.0); len];
        let mut moment = vec![Complex64::new(0.0, 0.0); len];
        for m in 1..samples {
            let x = m as f64 / samples as f64;
            let w = normalization * unnormalized(x) / samples as f64;
            plain[m] = Complex64::new(w, 0.0);
            moment[m] = Complex64::new(w * (x - 0.5), 0.0);
        }
        let fft = FftPlanner::new().plan_fft_forward(len);
        fft.process(&mut plain);
        fft.process(&mut moment);

        let mut values = Vec::with_capacity(intervals + 2);
        let mut slopes = Vec::with_capacity(intervals + 2);
        for j in 0..intervals + 2 {
            let shift = Complex64::from_polar(1.0, PI * shift_phase(j, per_unit));
            values.push((shift * plain[j]).re);
            slopes.push(2.0 * PI * (shift * moment[j]).im);
        }
        Ok(Self {
            normalization,
            u_max: intervals as f64 * step,
            step,
            values,
            slopes,
            panel: GaussLegendre::new(PANEL_ORDER),
        })
    }

    pub fn u_max(&self) -> f64 {
        self.u_max
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// `c` in `φ(x) = c·exp(-1/(x(1-x)))`.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn phi(&self, x: f64) -> f64 {
        self.normalization * unnormalized(x)
    }

    /// `φ̂(u) = ∫₀¹ φ(x) e^{-2πiux} dx`.
    pub fn phi_hat(&self, u: f64) -> Complex64 {
        let g = self.symmetric_part(u);
        let (s, c) = phase_half_turns(u.abs()).sin_cos();
        // e^{-iπu} with the sign of the imaginary part taken from u, so that
        // φ̂(-u) is the exact conjugate of φ̂(u).
        let im = if u >= 0.0 { -s } else { s };
        Complex64::new(c * g, im * g)
    }

    /// `|φ̂(u)|`.
    pub fn phi_hat_abs(&self, u: f64) -> f64 {
        self.symmetric_part(u).abs()
    }

    /// `φ̂` by direct panel quadrature, bypassing the table.
    pub fn phi_hat_direct(&self, u: f64) -> Complex64 {
        let g = self.symmetric_part_direct(u.abs());
        let (s, c) = phase_half_turns(u.abs()).sin_cos();
        let im = if u >= 0.0 { -s } else { s };
        Complex64::new(c * g, im * g)
    }

    /// The real even factor `g(u)` with `φ̂(u) = e^{-iπu} g(u)`.
    pub fn symmetric_part(&self, u: f64) -> f64 {
        let a = u.abs();
        if a > self.u_max {
            return self.symmetric_part_direct(a);
        }
        let pos = a / self.step;
        let j = (pos.floor() as usize).min(self.values.len() - 2);
        let t = pos - j as f64;
        let (y0, y1) = (self.values[j], self.values[j + 1]);
        let (m0, m1) = (self.slopes[j] * self.step, self.slopes[j + 1] * self.step);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1
    }

    fn symmetric_part_direct(&self, a: f64) -> f64 {
        // Panels of width <= 1/(4(1+|u|)) on [0, 1/2], doubled by symmetry.
        let panels = ((2.0 * (1.0 + a)).ceil() as usize).max(MIN_PANELS / 2);
        let (xs, ws) = self.panel.composite(0.0, 0.5, panels);
        2.0 * xs
            .iter()
            .zip(&ws)
            .map(|(x, w)| w * self.phi(*x) * (2.0 * PI * a * (x - 0.5)).cos())
            .sum::<f64>()
    }

    /// Largest `|φ̂(u)|·|u|^N` over `grid_points` equally spaced `u` in `range`.
    pub fn decay_constants(&self, orders: &[u32], range: (f64, f64), grid_points: usize) -> DecayConstants {
        let n = grid_points.max(2);
        let mut constants = vec![0.0f64; orders.len()];
        for i in 0..n {
            let u = range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64;
            let v = self.phi_hat_abs(u);
            for (c, &order) in constants.iter_mut().zip(orders) {
                *c = c.max(v * u.abs().powi(order as i32));
            }
        }
        DecayConstants {
            orders: orders.to_vec(),
            constants,
            range,
            grid_points: n,
        }
    }
}

/// `u` reduced modulo 2 so that `π·result` is an accurate phase angle.
/// `e^{-iπh}`, with `unit_phase(-h)` the exact conjugate of `unit_phase(h)`.
pub(crate) fn unit_phase(h: f64) -> Complex64 {
    let (s, c) = phase_half_turns(h.abs()).sin_cos();
    Complex64::new(c, if h >= 0.0 { -s } else { s })
}

fn phase_half_turns(a: f64) -> f64 {
    PI * a.rem_euclid(2.0)
}

/// `j/q` reduced modulo 2 exactly in integers.
fn shift_phase(j: usize, q: usize) -> f64 {
    (j % (2 * q)) as f64 / q as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Adaptive Simpson quadrature; an oracle independent of the panel rules.
    fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        #[allow(clippy::too_many_arguments)]
        fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let lm = 0.5 * (a + m);
            let rm = 0.5 * (m + b);
            let flm = f(lm);
            let frm = f(rm);
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                return left + right + (left + right - whole) / 15.0;
            }
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
        let fa = f(a);
        let fb = f(b);
        let fm = f(0.5 * (a + b));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        rec(f, a, b, fa, fm, fb, whole, tol, 40)
    }

    fn small_profile() -> BumpProfile {
        BumpProfile::new(256.0, DEFAULT_STEP).unwrap()
    }

    #[test]
    fn support_and_symmetry() {
        assert_eq!(phi(-0.5), 0.0);
        assert_eq!(phi(1.5), 0.0);
        assert_eq!(phi(0.0), 0.0);
        assert_eq!(phi(1.0), 0.0);
        for i in 1..100 {
            let x = i as f64 / 100.0;
            assert!((phi(x) - phi(1.0 - x)).abs() <= 1e-12 * phi(x).max(1e-300));
        }
    }

    #[test]
    fn unit_integral_against_simpson() {
        let raw = adaptive_simpson(&unnormalized, 0.0, 1.0, 1e-15);
        assert!((raw - 0.007_029_858_406_609_656).abs() < 1e-13, "raw {raw}");
        assert!((raw_integral() - raw).abs() < 1e-14);
        let total = adaptive_simpson(&phi, 0.0, 1.0, 1e-13);
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn value_at_zero_and_bound() {
        let b = small_profile();
        assert!((b.phi_hat(0.0) - Complex64::new(1.0, 0.0)).norm() < 1e-9);
        for i in 0..20_000 {
            let u = -256.0 + 512.0 * i as f64 / 20_000.0;
            assert!(b.phi_hat(u).norm() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn conjugate_symmetry_is_exact() {
        let b = small_profile();
        for &u in &[0.3, 1.7, 10.25, 99.9, 255.0, 300.0] {
            assert_eq!(b.phi_hat(-u), b.phi_hat(u).conj());
        }
    }

    #[test]
    fn table_matches_direct_quadrature() {
        let b = small_profile();
        for i in 0..2000 {
            let u = 256.0 * (i as f64 * 0.618_033_988_749).fract();
            let diff = (b.phi_hat(u) - b.phi_hat_direct(u)).norm();
            assert!(diff <= 1e-8, "u={u} diff={diff}");
        }
    }

    #[test]
    fn direct_quadrature_matches_simpson() {
        let b = small_profile();
        for &u in &[0.0, 0.5, 2.0, 7.3] {
            let re = adaptive_simpson(&|x| phi(x) * (2.0 * PI * u * x).cos(), 0.0, 1.0, 1e-14);
            let im = -adaptive_simpson(&|x| phi(x) * (2.0 * PI * u * x).sin(), 0.0, 1.0, 1e-14);
            let diff = (b.phi_hat_direct(u) - Complex64::new(re, im)).norm();
            assert!(diff < 1e-10, "u={u} diff={diff}");
        }
    }

    #[test]
    fn refinement_is_stable() {
        let coarse = small_profile();
        let fine = BumpProfile::new(256.0, DEFAULT_STEP / 2.0).unwrap();
        for i in 0..5000 {
            let u = 256.0 * (i as f64 * 0.754_877_666).fract();
            assert!((coarse.phi_hat(u) - fine.phi_hat(u)).norm() <= 1e-8);
        }
    }

    #[test]
    fn beyond_table_uses_direct_rule() {
        let b = BumpProfile::new(8.0, 0.125).unwrap();
        assert_eq!(b.phi_hat(20.0), b.phi_hat_direct(20.0));
        assert!(b.phi_hat(20.0).norm() < 1e-6);
    }

    #[test]
    fn rapid_decay() {
        let b = BumpProfile::standard();
        assert!(b.phi_hat(1000.0).norm() <= 1e-6);
        let c = b.decay_constants(&[1, 2, 3, 4], (1.0, 1000.0), 50_000);
        for v in &c.constants {
            assert!(v.is_finite() && *v > 0.0);
        }
        let c4 = b.decay_constants(&[4], (10.0, 1000.0), 20_000).constants[0];
        assert!(c4.is_finite());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(BumpProfile::new(0.5, DEFAULT_STEP).is_err());
        assert!(BumpProfile::new(64.0, 0.3).is_err());
        assert!(BumpProfile::new(64.0, -0.25).is_err());
    }
}
