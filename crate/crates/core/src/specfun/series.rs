//! Ascending (Maclaurin) series for `J_ν` and `Ai`.
//!
//! These are the small-argument evaluation routes. They lose roughly
//! `|Im z| + log10(max term / sum)` digits to cancellation, so the error
//! estimate tracks the largest term as well as the truncation point.

use num_complex::Complex64;

use super::gamma::{gamma, ln_gamma};
use super::EvalResult;

const MAX_TERMS: usize = 500;

/// `J_ν(z) = (z/2)^ν Σ (-z²/4)^k / (k! Γ(ν+k+1))` for ν >= 0.
pub fn bessel_j_series(nu: f64, z: Complex64) -> EvalResult {
    if z.norm() == 0.0 {
        let v = if nu == 0.0 { 1.0 } else { 0.0 };
        return EvalResult::new(Complex64::new(v, 0.0), 0.0);
    }
    let half = z * 0.5;
    // (z/2)^ν / Γ(ν+1), assembled in log form to survive large ν
    let lead = (half.ln() * nu - ln_gamma(nu + 1.0)).exp();
    let q = -half * half;
    let mut term = lead;
    let mut sum = term;
    let mut biggest = term.norm();
    let mut k = 0usize;
    loop {
        k += 1;
        term = term * q / (k as f64 * (nu + k as f64));
        sum += term;
        biggest = biggest.max(term.norm());
        let tail_small = term.norm() <= f64::EPSILON * 0.25 * sum.norm();
        if (k as f64) > q.norm().sqrt() && tail_small || k >= MAX_TERMS {
            break;
        }
    }
    let err = term.norm() + 4.0 * f64::EPSILON * biggest * (k as f64).sqrt();
    EvalResult::new(sum, err)
}

/// `Ai(0) = 3^{-2/3} / Γ(2/3)`.
pub fn airy_ai_at_zero() -> f64 {
    3f64.powf(-2.0 / 3.0) / gamma(2.0 / 3.0)
}

/// `-Ai'(0) = 3^{-1/3} / Γ(1/3)`.
pub fn airy_ai_deriv_at_zero_neg() -> f64 {
    3f64.powf(-1.0 / 3.0) / gamma(1.0 / 3.0)
}

/// Maclaurin series `Ai(z) = c1 f(z) - c2 g(z)`; returns `(Ai, Ai')`.
pub fn airy_series(z: Complex64) -> (EvalResult, EvalResult) {
    let c1 = airy_ai_at_zero();
    let c2 = airy_ai_deriv_at_zero_neg();
    let z3 = z * z * z;

    // f = Σ z^{3k} / ((2·3)(5·6)...((3k-1)(3k)))
    // g = Σ z^{3k+1} / ((3·4)(6·7)...((3k)(3k+1)))
    let mut f_term = Complex64::new(1.0, 0.0);
    let mut g_term = z;
    let mut fp_term = z * z * 0.5;
    let mut gp_term = Complex64::new(1.0, 0.0);
    let (mut f, mut g, mut fp, mut gp) = (f_term, g_term, fp_term, gp_term);
    let mut biggest = 1.0f64.max(z.norm());
    let mut last = 0.0f64;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        f_term = f_term * z3 / ((3.0 * kf - 1.0) * (3.0 * kf));
        g_term = g_term * z3 / ((3.0 * kf) * (3.0 * kf + 1.0));
        gp_term = gp_term * z3 / ((3.0 * kf) * (3.0 * kf - 2.0));
        if k >= 2 {
            fp_term = fp_term * z3 / ((3.0 * kf - 1.0) * (3.0 * kf - 3.0));
            fp += fp_term;
        }
        f += f_term;
        g += g_term;
        gp += gp_term;
        last = f_term.norm() + g_term.norm() + fp_term.norm() + gp_term.norm();
        biggest = biggest.max(last);
        let scale = f.norm() + g.norm() + fp.norm() + gp.norm();
        if last <= 0.25 * f64::EPSILON * scale && kf > z.norm() {
            break;
        }
    }
    let err = last + 4.0 * f64::EPSILON * biggest;
    (
        EvalResult::new(f * c1 - g * c2, err),
        EvalResult::new(fp * c1 - gp * c2, err),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn j_half_matches_sine_form() {
        let z = Complex64::new(2.0, 1.0);
        let s = bessel_j_series(0.5, z);
        let expect = (2.0 / (PI * z)).sqrt() * z.sin();
        assert!((s.value - expect).norm() < 1e-14);
        assert!(s.est_abs_error < 1e-13);
    }

    #[test]
    fn j0_known_value() {
        // J_0(1) = 0.7651976865579666
        let s = bessel_j_series(0.0, Complex64::new(1.0, 0.0));
        assert!((s.value.re - 0.765_197_686_557_966_6).abs() < 1e-15);
    }

    #[test]
    fn airy_series_small_argument() {
        let (a, d) = airy_series(Complex64::new(0.0, 0.0));
        assert!((a.value.re - airy_ai_at_zero()).abs() < 1e-16);
        assert!((d.value.re + airy_ai_deriv_at_zero_neg()).abs() < 1e-16);
        // Ai(1) = 0.1352924163128814, Ai'(1) = -0.1591474412967932
        let (a, d) = airy_series(Complex64::new(1.0, 0.0));
        assert!((a.value.re - 0.135_292_416_312_881_4).abs() < 1e-15);
        assert!((d.value.re + 0.159_147_441_296_793_2).abs() < 1e-15);
    }
}
