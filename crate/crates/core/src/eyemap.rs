//! The conformal coordinates `ρ`, `ζ` of the uniform Airy asymptotics,
//! the eye-shaped domain `K = {Re ρ > 0}` and the counting constant `A_n`.
//!
//! `ρ(z) = log((1 + s)/z) - s` with `s = sqrt(1 - z²)`, and
//! `ρ = (2/3) ζ^{3/2}`. Branches are principal on `0 < z < 1` and
//! continued elsewhere; for `z` in the closed upper half-plane `s` lies in
//! the closed fourth quadrant and `ζ` in the closed lower half-plane.
//!
//! Two parametrisations of the first-quadrant arc of `∂K₊` are used:
//!
//! * the explicit curve `z(t) = (t coth t - t²)^{1/2} + i (t² - t tanh t)^{1/2}`,
//!   `0 <= t <= t₀`, with `t₀` the positive root of `t = coth t`;
//! * `τ ↦ ρ^{-1}(-iτ)`, `0 <= τ <= π/2`, in which the Airy seeds are
//!   equally spaced for large index.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_gk15, GaussLegendre};
use crate::specfun::gamma::gamma;

/// `|s|` below which `ρ = atanh(s) - s` is summed as a power series.
const SERIES_SWITCH: f64 = 0.1;
const NEWTON_CAP: usize = 100;

/// `sqrt(1 - z²)` on the branch continuous from the principal value on
/// `(0, 1)`. On `z > 1` the value from the upper half-plane, `-i sqrt(z²-1)`,
/// is returned.
pub fn sqrt_one_minus_sq(z: Complex64) -> Complex64 {
    let w = Complex64::new(1.0, 0.0) - z * z;
    if w.im == 0.0 && w.re < 0.0 {
        if z.im < 0.0 || (z.im == 0.0 && z.re < 0.0 && z.im.is_sign_negative()) {
            return Complex64::new(0.0, (-w.re).sqrt());
        }
        return Complex64::new(0.0, -(-w.re).sqrt());
    }
    w.sqrt()
}

fn check_domain(z: Complex64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::domain(format!("rho: non-finite argument {z}")));
    }
    if z.im == 0.0 && z.re <= 0.0 {
        return Err(Error::domain(format!(
            "rho: argument {z} on the branch cut (|arg z| < π required, z ≠ 0)"
        )));
    }
    Ok(())
}

/// `ρ(z) = log((1 + sqrt(1-z²))/z) - sqrt(1-z²)` for `|arg z| < π`.
pub fn rho(z: Complex64) -> Result<Complex64> {
    check_domain(z)?;
    let s = sqrt_one_minus_sq(z);
    Ok(rho_from_s(z, s))
}

fn rho_from_s(z: Complex64, s: Complex64) -> Complex64 {
    if s.norm() < SERIES_SWITCH {
        // log((1+s)/sqrt(1-s²)) = atanh(s), so ρ = s³/3 + s⁵/5 + ...
        let s2 = s * s;
        let mut pow = s * s2;
        let mut sum = Complex64::new(0.0, 0.0);
        for m in 1..40 {
            let term = pow / (2 * m + 1) as f64;
            sum += term;
            if term.norm() <= 1e-18 * sum.norm() {
                break;
            }
            pow *= s2;
        }
        // the identity uses z = +sqrt(1-s²), valid near z = 1
        if z.re > 0.0 {
            return sum;
        }
    }
    (Complex64::new(1.0, 0.0) + s).ln() - z.ln() - s
}

/// `ρ'(z) = -sqrt(1 - z²)/z`.
pub fn rho_deriv(z: Complex64) -> Complex64 {
    -sqrt_one_minus_sq(z) / z
}

/// `ζ = (3ρ/2)^{2/3}`, real on `(0, ∞)`, positive on `(0, 1)`, `ζ(1) = 0`,
/// and in the closed lower half-plane for `Im z >= 0`.
pub fn zeta(z: Complex64) -> Result<Complex64> {
    check_domain(z)?;
    if z.im < 0.0 {
        return zeta(z.conj()).map(|v| v.conj());
    }
    let r = rho(z)?;
    if r.norm() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut a = r.arg();
    // continuous argument of ρ on the upper half-plane lies in [-3π/2, 0]
    if a > PI / 4.0 {
        a -= 2.0 * PI;
    }
    Ok(Complex64::from_polar(
        (1.5 * r.norm()).powf(2.0 / 3.0),
        2.0 * a / 3.0,
    ))
}

/// The positive root of `t = coth t`.
pub fn t0() -> f64 {
    static T0: OnceLock<f64> = OnceLock::new();
    *T0.get_or_init(|| {
        // bracket [1, 1.3]: coth 1 > 1, coth 1.3 < 1.3
        let (mut lo, mut hi) = (1.0f64, 1.3f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid - 1.0 / mid.tanh() < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON * mid {
                break;
            }
        }
        0.5 * (lo + hi)
    })
}

/// A point of the first-quadrant arc of `∂K₊`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    /// curve parameter in `[0, t₀]`
    pub t: f64,
    /// `arg z` in `[0, π/2]`
    pub theta: f64,
    pub z: Complex64,
}

// t coth t - t² and t² - t tanh t with their t-derivatives; the second is
// O(t⁴) near 0, so a Taylor series is used there.
fn curve_parts(t: f64) -> (f64, f64, f64, f64) {
    if t == 0.0 {
        return (1.0, 0.0, 0.0, 0.0);
    }
    let coth = 1.0 / t.tanh();
    let csch2 = coth * coth - 1.0;
    let tanh = t.tanh();
    let sech2 = 1.0 - tanh * tanh;
    // t coth t - t² = t (sinh(t₀-t)/(sinh t sinh t₀) + t₀ - t), free of the
    // cancellation near t₀ (uses coth t₀ = t₀)
    let t0 = t0();
    let p = (t * ((t0 - t).sinh() / (t.sinh() * t0.sinh()) + (t0 - t))).max(0.0);
    let dp = coth - t * csch2 - 2.0 * t;
    let (q, dq) = if t < 0.05 {
        let t2 = t * t;
        let q = t2
            * t2
            * (1.0 / 3.0
                + t2 * (-2.0 / 15.0
                    + t2 * (17.0 / 315.0 + t2 * (-62.0 / 2835.0 + t2 * 1382.0 / 155_925.0))));
        let dq = t2
            * t
            * (4.0 / 3.0
                + t2 * (-12.0 / 15.0
                    + t2 * (136.0 / 315.0 + t2 * (-620.0 / 2835.0 + t2 * 16584.0 / 155_925.0))));
        (q, dq)
    } else {
        (t * (t - tanh), 2.0 * t - tanh - t * sech2)
    };
    (p, dp, q.max(0.0), dq)
}

fn curve_point(t: f64) -> Complex64 {
    let (p, _, q, _) = curve_parts(t);
    Complex64::new(p.sqrt(), q.sqrt())
}

/// `dz/dt` along the explicit curve; singular (like `(t₀ - t)^{-1/2}`) at `t₀`.
fn curve_velocity(t: f64) -> Complex64 {
    if t == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let (p, dp, q, dq) = curve_parts(t);
    let x = p.sqrt();
    let y = q.sqrt();
    let dx = if x > 0.0 { dp / (2.0 * x) } else { f64::NEG_INFINITY };
    let dy = if y > 0.0 { dq / (2.0 * y) } else { 0.0 };
    Complex64::new(dx, dy)
}

/// First-quadrant boundary point from the explicit curve parameter.
pub fn boundary_by_t(t: f64) -> Result<BoundaryPoint> {
    let t0 = t0();
    if !(0.0..=t0).contains(&t) {
        return Err(Error::domain(format!("boundary parameter {t} outside [0, {t0}]")));
    }
    let z = if t == t0 {
        Complex64::new(0.0, (t0 * t0 - 1.0).sqrt())
    } else {
        curve_point(t)
    };
    let theta = if z.re == 0.0 { PI / 2.0 } else { z.arg() };
    Ok(BoundaryPoint { t, theta, z })
}

/// First-quadrant boundary point with prescribed `arg z = θ ∈ [0, π/2]`
/// (bisection on the curve parameter; `arg z(t)` is increasing).
pub fn boundary_by_theta(theta: f64) -> Result<BoundaryPoint> {
    if !(0.0..=PI / 2.0).contains(&theta) {
        return Err(Error::domain(format!("boundary angle {theta} outside [0, π/2]")));
    }
    let t = bisect_monotone(|t| boundary_by_t(t).map(|p| p.theta).unwrap_or(PI / 2.0), theta);
    let p = boundary_by_t(t)?;
    if theta == 0.0 {
        return Ok(p);
    }
    // near t₀ the curve formula loses digits to cancellation; polish the
    // modulus by Newton on Re ρ(r e^{iθ}) = 0 along the fixed ray
    let dir = Complex64::from_polar(1.0, theta);
    let mut r = p.z.norm();
    for _ in 0..8 {
        let z = dir * r;
        let g = rho(z)?.re;
        let dg = (rho_deriv(z) * dir).re;
        if dg == 0.0 {
            break;
        }
        let step = g / dg;
        r -= step;
        if step.abs() <= 1e-16 * r {
            break;
        }
    }
    Ok(BoundaryPoint { t, theta, z: dir * r })
}

/// `τ = -Im ρ(z(t))`, increasing from 0 at `t = 0` to `π/2` at `t₀`.
fn tau_of_t(t: f64) -> f64 {
    let p = boundary_by_t(t).expect("t within range");
    rho(p.z).map(|r| -r.im).unwrap_or(0.0)
}

// Solve g(t) = target for increasing g on [0, t₀].
fn bisect_monotone<G: Fn(f64) -> f64>(g: G, target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, t0());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 2.0 * f64::EPSILON {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Boundary point where `ρ = -iτ`, `τ ∈ [0, π/2]`.
pub fn boundary_by_tau(tau: f64) -> Result<BoundaryPoint> {
    if !(0.0..=PI / 2.0).contains(&tau) {
        return Err(Error::domain(format!("tau = {tau} outside [0, π/2]")));
    }
    let t = bisect_monotone(tau_of_t, tau);
    let p = boundary_by_t(t)?;
    let z = if tau == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        newton_rho(Complex64::new(0.0, -tau), p.z)?
    };
    let theta = z.arg().clamp(0.0, PI / 2.0);
    Ok(BoundaryPoint { t, theta, z })
}

fn newton_rho(w: Complex64, seed: Complex64) -> Result<Complex64> {
    let mut z = seed;
    let mut last_step = f64::INFINITY;
    for _ in 0..NEWTON_CAP {
        let s = sqrt_one_minus_sq(z);
        let f = rho_from_s(z, s) - w;
        let d = -s / z;
        if d.norm() == 0.0 {
            // at the turning point z = 1 exactly; nudge off it
            z += Complex64::new(-1e-6, 1e-6);
            continue;
        }
        let mut step = f / d;
        let cap = 0.25 * z.norm();
        if step.norm() > cap {
            step *= cap / step.norm();
        }
        z -= step;
        if z.im < 0.0 {
            z.im = 0.0;
        }
        last_step = step.norm();
        if last_step <= 1e-15 * z.norm() {
            return Ok(z);
        }
    }
    let resid = rho(z).map(|r| (r - w).norm()).unwrap_or(f64::NAN);
    if resid <= 1e-13 * w.norm().max(1.0) {
        return Ok(z);
    }
    Err(Error::Convergence {
        what: format!(
            "rho_inverse(w = {w}) from seed {seed}: last iterate {z}, last step {last_step:e}, residual {resid:e}"
        ),
        iterations: NEWTON_CAP,
    })
}

/// Inverse of `ρ` on the closed first quadrant.
///
/// Intended for `w = -iτ` with `0 < τ <= π/2` (the arc of `∂K₊`), where
/// the Newton iteration is seeded from the boundary point with matching
/// `τ`; values of `τ` slightly above `π/2` continue past the imaginary
/// axis. Other targets are seeded from a coarse grid search.
pub fn rho_inverse(w: Complex64) -> Result<Complex64> {
    if w.norm() == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let tau = -w.im;
    let near_axis = w.re.abs() <= 0.05 * w.norm() + 1e-3;
    let seed = if near_axis && tau > 0.0 && tau <= PI / 2.0 {
        boundary_by_t(bisect_monotone(tau_of_t, tau))?.z
    } else if near_axis && tau > PI / 2.0 && tau < PI / 2.0 + 0.5 {
        Complex64::new(0.0, (t0() * t0() - 1.0).sqrt())
    } else {
        grid_seed(w)
    };
    newton_rho(w, seed)
}

fn grid_seed(w: Complex64) -> Complex64 {
    let mut best = Complex64::new(1.0, 0.0);
    let mut best_d = f64::INFINITY;
    let n = 80;
    for i in 0..=n {
        for j in 0..=n {
            let z = Complex64::new(0.01 + 3.0 * i as f64 / n as f64, 3.0 * j as f64 / n as f64);
            if let Ok(r) = rho(z) {
                let d = (r - w).norm();
                if d < best_d {
                    best_d = d;
                    best = z;
                }
            }
        }
    }
    best
}

/// `dτ/dθ` at a boundary point, where `τ = -Im ρ` and `θ = arg z`.
///
/// Along `∂K₊`, `dz = i z dτ / s` with `s = sqrt(1 - z²)`, so
/// `dθ = Re(1/s) dτ` and `dτ/dθ = |s|² / Re s`. This reduces to `s` where
/// `s` is real (the imaginary-axis end); it vanishes at `z = 1`.
pub fn dt_dtheta(point: &BoundaryPoint) -> f64 {
    let s = sqrt_one_minus_sq(point.z);
    if s.norm() == 0.0 {
        return 0.0;
    }
    s.norm_sqr() / s.re
}

/// Volume of the unit ball in `R^d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    PI.powf(d as f64 / 2.0) / gamma(d as f64 / 2.0 + 1.0)
}

/// Surface area of the unit sphere `S^{d-1} ⊂ R^d`.
pub fn unit_sphere_area(d: usize) -> f64 {
    2.0 * PI.powf(d as f64 / 2.0) / gamma(d as f64 / 2.0)
}

/// Extremes of `|z|` on the first-quadrant arc: `(t, |z|)` at the minimum
/// and at the maximum. Grid scan refined by golden-section search.
pub fn abs_z_extremes_on_boundary() -> ((f64, f64), (f64, f64)) {
    let t0 = t0();
    let f = |t: f64| boundary_by_t(t).map(|p| p.z.norm()).unwrap_or(f64::NAN);
    let n = 400;
    let grid: Vec<(f64, f64)> = (0..=n)
        .map(|i| {
            let t = t0 * i as f64 / n as f64;
            (t, f(t))
        })
        .collect();
    let refine = |sign: f64| {
        let (i, _) = grid
            .iter()
            .enumerate()
            .min_by(|a, b| (sign * a.1 .1).total_cmp(&(sign * b.1 .1)))
            .expect("grid");
        let lo = grid[i.saturating_sub(1)].0;
        let hi = grid[(i + 1).min(n)].0;
        let t = golden_section(|t| sign * f(t), lo, hi);
        let cands = [(t, f(t)), grid[i]];
        cands
            .into_iter()
            .min_by(|a, b| (sign * a.1).total_cmp(&(sign * b.1)))
            .expect("candidates")
    };
    (refine(1.0), refine(-1.0))
}

/// Minimum of `|z|` over `∂K₊`.
pub fn min_abs_z_on_boundary() -> f64 {
    static MIN: OnceLock<f64> = OnceLock::new();
    *MIN.get_or_init(|| abs_z_extremes_on_boundary().0 .1)
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..200 {
        if (b - a).abs() < 1e-14 {
            break;
        }
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    0.5 * (a + b)
}

/// The constant `A_n` with its two independent quadrature values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EyeConstant {
    pub n: usize,
    pub value: f64,
    pub quadrature_error: f64,
    /// adaptive Gauss–Kronrod on the explicit curve parameter
    pub adaptive: f64,
    /// fixed composite Gauss–Legendre on `τ = u³`
    pub fixed: f64,
}

/// Relative agreement demanded between the two quadratures.
pub const AN_AGREEMENT: f64 = 1e-8;

/// `∫ |1-z²|^{1/2} / |z|^{n+1} |dz|` over the first-quadrant arc, by
/// adaptive quadrature in the explicit curve parameter.
///
/// `|dz/dt|` has an inverse square-root singularity at `t₀`, removed by
/// the substitution `t = t₀ - v²`. Returns the value and error estimate.
pub fn arc_integral_adaptive(n: usize) -> (f64, f64) {
    let t0 = t0();
    let integrand = |v: f64| {
        let t = t0 - v * v;
        if t <= 0.0 || v == 0.0 {
            return 0.0;
        }
        let z = curve_point(t);
        let speed = curve_velocity(t).norm() * 2.0 * v;
        sqrt_one_minus_sq(z).norm() / z.norm().powi(n as i32 + 1) * speed
    };
    let r = adaptive_gk15(integrand, 0.0, t0.sqrt(), 1e-15, 1e-14, 4000);
    (r.value, r.error)
}

/// The same arc integral written as `∫_0^{π/2} dτ / |z(τ)|^n` with the
/// substitution `τ = u³`, which makes the integrand analytic at the
/// turning point; composite Gauss–Legendre.
pub fn arc_integral_fixed(n: usize) -> Result<f64> {
    let gl = GaussLegendre::new(20);
    let umax = (PI / 2.0).cbrt();
    let panels = 24;
    let h = umax / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = p as f64 * h;
        let mut s = 0.0;
        for (x, w) in gl.nodes.iter().zip(&gl.weights) {
            let u = lo + 0.5 * h * (x + 1.0);
            let tau = u * u * u;
            let z = boundary_by_tau(tau)?.z;
            s += w * 3.0 * u * u / z.norm().powi(n as i32);
        }
        total += 0.5 * h * s;
    }
    Ok(total)
}

/// `A_n = 2(n-1) vol(B_{n-1}) / (n (2π)^n) · ∫_{∂K₊} |1-z²|^{1/2}/|z|^{n+1} |dz|`,
/// the integral running over the whole upper arc (twice the first-quadrant
/// arc by the `z ↦ -z̄` symmetry).
pub fn an_constant(n: usize) -> Result<EyeConstant> {
    if n < 2 {
        return Err(Error::domain(format!("A_n needs n >= 2, got {n}")));
    }
    let prefactor = 2.0 * (n as f64 - 1.0) * unit_ball_volume(n - 1)
        / (n as f64 * (2.0 * PI).powi(n as i32));
    let (ia, ea) = arc_integral_adaptive(n);
    let ib = arc_integral_fixed(n)?;
    let adaptive = prefactor * 2.0 * ia;
    let fixed = prefactor * 2.0 * ib;
    let relative = (adaptive - fixed).abs() / fixed.abs();
    if relative > AN_AGREEMENT {
        return Err(Error::Quadrature {
            first: adaptive,
            second: fixed,
            relative,
        });
    }
    Ok(EyeConstant {
        n,
        value: fixed,
        quadrature_error: (adaptive - fixed).abs() + prefactor * 2.0 * ea,
        adaptive,
        fixed,
    })
}
