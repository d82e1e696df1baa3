//! Asymptotic and closed-form evaluation routes for Hankel functions.
//!
//! None of these are used on the production path; they exist so that the
//! Amos values can be checked against formulas derived independently.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{airy_ai, airy_ai_deriv, expi_pi, EvalResult};
use crate::error::Result;
use crate::eyemap;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Hankel's expansion for large `|z|`:
/// `H²_ν(z) ~ sqrt(2/(πz)) e^{-iω} Σ (-i)^k a_k(ν) / z^k`, `ω = z - νπ/2 - π/4`.
///
/// Summation stops at the smallest term; the first omitted term is the
/// error estimate. Valid for `-2π < arg z < π`.
pub fn hankel2_large_argument(nu: f64, z: Complex64) -> EvalResult {
    let mu = 4.0 * nu * nu;
    let omega = z - Complex64::new(nu * PI / 2.0 + PI / 4.0, 0.0);
    let pref = (2.0 / (PI * z)).sqrt() * (-I * omega).exp();
    let mut sum = Complex64::new(1.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    let mut prev_mag = f64::INFINITY;
    let mut omitted = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        let next = term * (mu - odd * odd) / (kf * 8.0) * (-I) / z;
        let mag = next.norm();
        if mag >= prev_mag || mag == 0.0 {
            omitted = mag;
            break;
        }
        if mag <= f64::EPSILON * 0.1 * sum.norm() {
            omitted = mag;
            sum += next;
            break;
        }
        sum += next;
        term = next;
        prev_mag = mag;
        omitted = mag;
    }
    let value = pref * sum;
    // rounding in the phase e^{-iω} grows with |ω|
    let rounding = (4.0 + 8.0 * omega.norm()) * f64::EPSILON * sum.norm();
    EvalResult::new(value, pref.norm() * (omitted + rounding))
}

/// Leading Debye form for large order at fixed argument,
/// `J_ν(z) ≈ (e z / 2ν)^ν / sqrt(2πν)`.
///
/// The error estimate is the first-order correction
/// `|z|²/(4(ν+1)) + 1/(12ν)` scaled by 1.25, relative to the value.
pub fn bessel_j_large_order_leading(nu: f64, z: Complex64) -> EvalResult {
    let value = (z * (std::f64::consts::E / (2.0 * nu))).powf(nu) / (2.0 * PI * nu).sqrt();
    let rel = 1.25 * (z.norm_sqr() / (4.0 * (nu + 1.0)) + 1.0 / (12.0 * nu));
    EvalResult::new(value, rel * value.norm())
}

// B_0 at the turning point, 2^{1/3}/70.
fn b0_at_turning_point() -> f64 {
    2f64.cbrt() / 70.0
}

fn b0(zeta: Complex64, s: Complex64) -> Complex64 {
    if zeta.norm() < 0.02 {
        return Complex64::new(b0_at_turning_point(), 0.0);
    }
    let rz = zeta.sqrt();
    -5.0 / (48.0 * zeta * zeta) + (5.0 / (24.0 * s * s * s) - 1.0 / (8.0 * s)) / rz
}

/// Uniform large-order form of `H²_ν(νz)` through the Airy function,
/// keeping the leading `A_0 = 1` term and the leading `Ai'` term:
///
/// `H²_ν(νz) ≈ 2 e^{iπ/3} (4ζ/(1-z²))^{1/4}
///     [ Ai(e^{-2πi/3} ν^{2/3} ζ) / ν^{1/3}
///       + e^{-2πi/3} Ai'(e^{-2πi/3} ν^{2/3} ζ) B_0(ζ) / ν^{5/3} ]`.
///
/// Note that the argument is the *scaled* variable `z`; the function is
/// evaluated at `νz`. The omitted terms are `O(ν^{-2})` relative.
pub fn hankel2_airy_leading(nu: f64, z: Complex64) -> Result<EvalResult> {
    let zeta = eyemap::zeta(z)?;
    let s = eyemap::sqrt_one_minus_sq(z);
    // (4ζ/(1-z²))^{1/4} = sqrt(2) ζ^{1/4} / s^{1/2}, branches continuous
    // from the positive real segment (0, 1)
    let quarter = Complex64::from_polar(zeta.norm().powf(0.25), zeta.arg() * 0.25);
    let q = 2f64.sqrt() * quarter / s.sqrt();
    let rot = expi_pi(-2.0 / 3.0);
    let arg = rot * zeta * nu.powf(2.0 / 3.0);
    let ai = airy_ai(arg)?.value;
    let aip = airy_ai_deriv(arg)?.value;
    let t0 = ai / nu.powf(1.0 / 3.0);
    let t1 = rot * aip * b0(zeta, s) / nu.powf(5.0 / 3.0);
    let pref = 2.0 * expi_pi(1.0 / 3.0) * q;
    let value = pref * (t0 + t1);
    let scale = pref.norm() * (t0.norm() + aip.norm() / nu.powf(5.0 / 3.0));
    Ok(EvalResult::new(value, 0.25 * scale / (nu * nu)))
}

fn half_integer_sum(l: usize, w: Complex64) -> Complex64 {
    // Σ_k (l+k)! / (k! (l-k)!) w^k
    let mut coeff = 1.0f64;
    let mut sum = Complex64::new(1.0, 0.0);
    let mut pow = Complex64::new(1.0, 0.0);
    for k in 1..=l {
        coeff *= ((l + k) as f64) * ((l - k + 1) as f64) / k as f64;
        pow *= w;
        sum += pow * coeff;
    }
    sum
}

/// Closed form `H²_{l+1/2}(z) = sqrt(2/(πz)) i^{l+1} e^{-iz}
/// Σ_k (l+k)!/(k!(l-k)!) (-i/(2z))^k`.
///
/// Exact up to rounding; cancellation makes it unreliable beyond `l ≈ 20`.
pub fn hankel2_half_integer(l: usize, z: Complex64) -> Complex64 {
    let s = half_integer_sum(l, -I / (2.0 * z));
    (2.0 / (PI * z)).sqrt() * I.powu(l as u32 + 1) * (-I * z).exp() * s
}

/// Closed form `H¹_{l+1/2}(z) = sqrt(2/(πz)) (-i)^{l+1} e^{iz}
/// Σ_k (l+k)!/(k!(l-k)!) (i/(2z))^k`.
pub fn hankel1_half_integer(l: usize, z: Complex64) -> Complex64 {
    let s = half_integer_sum(l, I / (2.0 * z));
    (2.0 / (PI * z)).sqrt() * (-I).powu(l as u32 + 1) * (I * z).exp() * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{hankel1, hankel2, Order};

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn large_argument_against_amos() {
        for &(nu, z) in &[
            (0.0, Complex64::new(30.0, 2.0)),
            (1.3, Complex64::new(25.0, -10.0)),
            (2.0, Complex64::new(-20.0, 15.0)),
        ] {
            let a = hankel2_large_argument(nu, z);
            let b = hankel2(Order::new(nu).unwrap(), z).unwrap().value;
            assert!(rel(a.value, b) < 1e-12, "nu = {nu}, z = {z}");
            let dev = (a.value - b).norm();
            assert!(dev <= 10.0 * a.est_abs_error + 1e-14 * b.norm(), "{dev:e} vs {:e}", a.est_abs_error);
        }
    }

    #[test]
    fn half_integer_forms_against_amos() {
        for l in [0usize, 1, 3, 7, 15] {
            let z = Complex64::new(2.0 + l as f64 * 0.3, 1.0);
            let nu = Order::new(l as f64 + 0.5).unwrap();
            assert!(rel(hankel2_half_integer(l, z), hankel2(nu, z).unwrap().value) < 1e-11);
            assert!(rel(hankel1_half_integer(l, z), hankel1(nu, z).unwrap().value) < 1e-11);
        }
    }

    #[test]
    fn debye_leading_form_error_envelope() {
        let nu = 30.0;
        let z = Complex64::new(5.0, 0.0);
        let lead = bessel_j_large_order_leading(nu, z);
        let exact = crate::specfun::bessel_j(Order::new(nu).unwrap(), z).unwrap().value;
        let dev = (lead.value - exact).norm();
        assert!(dev <= lead.est_abs_error, "{dev} > {}", lead.est_abs_error);
        // the correction is genuinely first order, not negligible
        assert!(dev > 0.1 * lead.value.norm());
    }

    #[test]
    fn b0_continuous_through_turning_point() {
        let near = Complex64::new(1.0 + 0.02, 0.0);
        let zeta = eyemap::zeta(near).unwrap();
        let s = eyemap::sqrt_one_minus_sq(near);
        let v = b0(zeta, s);
        assert!((v.re - b0_at_turning_point()).abs() < 5e-4);
    }
}
