//! Zeros of `H²_ν` in the closed first quadrant.
//!
//! There are `round(ν/2 - 1/4)` of them (one on the imaginary axis when
//! `ν - 1/2` is an odd integer), lying close to the scaled arc `ν·∂K₊`.
//! They are seeded from the Airy zeros through the inverse of `ρ`,
//! polished by Newton's method and cross-checked by the argument
//! principle on a contour enclosing the scaled arc.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eyemap::rho_inverse;
use crate::specfun::{airy_neg_zero, hankel2_scaled_with_deriv, hankel2_with_deriv, Order};

/// Below this order the Airy seeds are not trusted and a grid search is
/// used instead.
pub const NU_MIN: f64 = 3.0;

/// Relative residual accepted by [`refine`].
pub const RESIDUAL_TOL: f64 = 1e-9;

const NEWTON_CAP: usize = 50;
const BASIN_SLACK: f64 = 0.1;
const AXIS_SNAP: f64 = 1e-8;

/// One refined zero with the seed it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HankelZero {
    pub k: usize,
    pub seed: Complex64,
    pub refined: Complex64,
    pub residual: f64,
}

/// All first-quadrant zeros for one order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HankelZeroSet {
    pub nu: Order,
    pub predicted_count: usize,
    pub zeros: Vec<HankelZero>,
    pub validated: bool,
}

/// `round(ν/2 - 1/4)`.
///
/// A tie needs `ν/2 - 1/4 = m + 1/2`, i.e. `ν - 1/2 = 2m + 1`, which is the
/// case of a zero on the imaginary axis; ties therefore round up, and the
/// result always equals `⌊ν/2 + 1/4⌋`.
pub fn predicted_count(nu: Order) -> usize {
    let x = nu.value() / 2.0 - 0.25;
    if x < 0.0 {
        return 0;
    }
    let base = x.floor();
    let frac = x - base;
    if frac >= 0.5 {
        base as usize + 1
    } else {
        base as usize
    }
}

/// Number of seeds, `⌊ν/2 + 1/4⌋`.
pub fn seed_count(nu: Order) -> usize {
    (nu.value() / 2.0 + 0.25).floor() as usize
}

fn seeds_from(nu: Order, phase: impl Fn(usize) -> f64) -> Result<Vec<Complex64>> {
    let v = nu.value();
    (1..=seed_count(nu))
        .map(|k| {
            let tau = phase(k) / v;
            rho_inverse(Complex64::new(0.0, -tau)).map(|z| z * v)
        })
        .collect()
}

/// Airy-zero seeds `λ_{ν,k} = ν ρ⁻¹(-i (2/3) a_k^{3/2} / ν)`, `k = 1..⌊ν/2 + 1/4⌋`.
pub fn seeds(nu: Order) -> Result<Vec<Complex64>> {
    seeds_from(nu, |k| 2.0 / 3.0 * airy_neg_zero(k).powf(1.5))
}

/// Seeds from the leading Airy-zero asymptotics,
/// `λ̃_{ν,k} = ν ρ⁻¹(-i (k - 1/4) π / ν)`.
pub fn seeds_tilde(nu: Order) -> Result<Vec<Complex64>> {
    seeds_from(nu, |k| (k as f64 - 0.25) * PI)
}

fn refinement_error(seed: Complex64, reason: String) -> Error {
    Error::Refinement {
        seed_re: seed.re,
        seed_im: seed.im,
        reason,
    }
}

fn in_basin(z: Complex64) -> bool {
    let a = z.arg();
    (-BASIN_SLACK..=PI / 2.0 + BASIN_SLACK).contains(&a) && z.norm() > 0.0
}

fn residual_ok(h: Complex64, d: Complex64, z: Complex64) -> bool {
    h.norm() <= RESIDUAL_TOL * (d.norm() * z.norm()).max(1.0)
}

/// Newton refinement of a zero of `H²_ν` from `seed`.
///
/// Steps are clamped to `|Δz| <= 0.5 |z| / ν`. For `ν - 1/2` an odd
/// integer, an iterate within `1e-8 |z|` of the imaginary axis is moved
/// onto it (`H²_ν` has constant phase there, so the iteration then stays
/// on the axis). Returns the zero and `|H²_ν(zero)|`.
pub fn refine(nu: Order, seed: Complex64) -> Result<(Complex64, f64)> {
    let v = nu.value();
    let axis_zero_possible = axis_zero_expected(nu);
    let mut z = seed;
    if !in_basin(z) {
        return Err(refinement_error(seed, "seed outside the first-quadrant basin".to_string()));
    }
    let mut converged = false;
    for _ in 0..NEWTON_CAP {
        let (h, d) = hankel2_with_deriv(nu, z)?;
        if d.norm() == 0.0 {
            return Err(refinement_error(seed, format!("vanishing derivative at {z}")));
        }
        let mut step = h / d;
        let cap = 0.5 * z.norm() / v.max(1.0);
        if step.norm() > cap {
            step *= cap / step.norm();
        }
        z -= step;
        if axis_zero_possible && z.re.abs() <= AXIS_SNAP * z.norm() {
            z.re = 0.0;
        }
        if !z.is_finite() || !in_basin(z) {
            return Err(refinement_error(
                seed,
                format!("iterate {z} left the sector [-0.1, π/2 + 0.1]"),
            ));
        }
        if step.norm() <= 4.0 * f64::EPSILON * z.norm() {
            converged = true;
            break;
        }
    }
    let (h, d) = hankel2_with_deriv(nu, z)?;
    if residual_ok(h, d, z) {
        Ok((z, h.norm()))
    } else {
        let why = if converged {
            "stalled"
        } else {
            "iteration cap reached"
        };
        Err(refinement_error(
            seed,
            format!("{why}: |H²| = {:e} at {z} after {NEWTON_CAP} iterations", h.norm()),
        ))
    }
}

fn axis_zero_expected(nu: Order) -> bool {
    let m = nu.value() - 0.5;
    m >= 0.0 && m.fract() == 0.0 && (m as u64) % 2 == 1
}

/// A closed polygonal contour, traversed counter-clockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub vertices: Vec<Complex64>,
}

impl Contour {
    /// Axis-parallel rectangle with corners `lo` and `hi`.
    pub fn rectangle(lo: Complex64, hi: Complex64) -> Self {
        Contour {
            vertices: vec![
                lo,
                Complex64::new(hi.re, lo.im),
                hi,
                Complex64::new(lo.re, hi.im),
            ],
        }
    }

    /// Rectangle `[-δ, R] × [0, R]` with the disc `|z| < 0.55ν` removed
    /// (inscribed polygon), enclosing `ν·∂K₊` with margin. `δ > 0` only
    /// when a zero on the imaginary axis is expected.
    ///
    /// The zeros have `|z| >= 0.66ν` approximately; keeping away from the
    /// origin avoids the region where `H²_ν` is exponentially large.
    pub fn bounding(nu: Order) -> Self {
        let v = nu.value();
        let r = v + 4.0 * v.cbrt() + 2.0;
        let delta = if axis_zero_expected(nu) { 0.01 } else { 0.0 };
        let cut = 0.55 * v;
        if cut < 0.05 {
            return Contour::rectangle(Complex64::new(-delta, 0.05), Complex64::new(r, r));
        }
        let mut vertices = vec![Complex64::new(r, 0.0), Complex64::new(r, r), Complex64::new(-delta, r)];
        let arc = 12;
        for i in (0..=arc).rev() {
            let p = Complex64::from_polar(cut, PI / 2.0 * i as f64 / arc as f64);
            vertices.push(if i == arc { Complex64::new(-delta, cut) } else { p });
        }
        Contour { vertices }
    }

    /// The same polygon pushed outward by `eps` (used to step off a zero).
    pub fn nudged(&self, eps: f64) -> Self {
        let n = self.vertices.len() as f64;
        let centre: Complex64 = self.vertices.iter().sum::<Complex64>() / n;
        Contour {
            vertices: self
                .vertices
                .iter()
                .map(|&p| {
                    let d = p - centre;
                    p + d * (eps / d.norm())
                })
                .collect(),
        }
    }
}

/// Result of one argument-principle evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Winding {
    /// sum of per-panel argument increments over 2π
    pub winding: f64,
    /// trapezoidal `(1/2πi) ∮ H'/H`, real part
    pub trapezoid: f64,
    pub panels: usize,
}

const MAX_DEPTH: u32 = 40;

struct Sample {
    z: Complex64,
    f: Complex64,
    logd: Complex64,
}

fn sample(nu: Order, z: Complex64) -> Result<Sample> {
    let (f, d) = hankel2_scaled_with_deriv(nu, z)?;
    if f.norm() == 0.0 {
        return Err(Error::Validation(format!("contour passes through a zero at {z}")));
    }
    Ok(Sample { z, f, logd: d / f })
}

// Returns (argument increment, trapezoid increment of ∫ f'/f, panels).
fn edge(nu: Order, a: &Sample, b: &Sample, depth: u32) -> Result<(f64, Complex64, usize)> {
    let darg = (b.f / a.f).arg();
    let trap = (b.z - a.z) * (a.logd + b.logd) * 0.5;
    if darg.abs() < PI / 3.0 && (trap.im - darg).abs() < 0.1 {
        return Ok((darg, trap, 1));
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Validation(format!(
            "argument principle: panel [{}, {}] not resolved (zero near the contour?)",
            a.z, b.z
        )));
    }
    let m = sample(nu, (a.z + b.z) * 0.5)?;
    let (d1, t1, p1) = edge(nu, a, &m, depth + 1)?;
    let (d2, t2, p2) = edge(nu, &m, b, depth + 1)?;
    Ok((d1 + d2, t1 + t2, p1 + p2))
}

/// Winding number of `H²_ν` along `contour`, from per-panel argument
/// increments of `e^{iz}H²_ν(z)` with panels refined until each increment
/// agrees with the trapezoidal integral of the logarithmic derivative.
pub fn winding(nu: Order, contour: &Contour) -> Result<Winding> {
    let vs = &contour.vertices;
    let mut total_arg = 0.0;
    let mut total_trap = Complex64::new(0.0, 0.0);
    let mut panels = 0;
    for i in 0..vs.len() {
        let a = vs[i];
        let b = vs[(i + 1) % vs.len()];
        // start from a few panels per edge so that short oscillations are seen
        let pieces = 8;
        let mut prev = sample(nu, a)?;
        for j in 1..=pieces {
            let z = a + (b - a) * (j as f64 / pieces as f64);
            let next = sample(nu, z)?;
            let (d, t, p) = edge(nu, &prev, &next, 0)?;
            total_arg += d;
            total_trap += t;
            panels += p;
            prev = next;
        }
    }
    // the log-derivative of e^{iz}H differs from H'/H by i, which
    // integrates to zero around a closed contour
    Ok(Winding {
        winding: total_arg / (2.0 * PI),
        trapezoid: total_trap.im / (2.0 * PI),
        panels,
    })
}

/// Number of zeros of `H²_ν` enclosed by `contour`.
///
/// If a panel cannot be resolved the contour is pushed outward slightly
/// and the evaluation repeated (at most three times).
pub fn count_by_argument_principle(nu: Order, contour: &Contour) -> Result<usize> {
    let mut last = None;
    for attempt in 0..4 {
        let c = if attempt == 0 {
            contour.clone()
        } else {
            contour.nudged(1e-3 * attempt as f64)
        };
        match winding(nu, &c) {
            Ok(w) => {
                let n = w.winding.round();
                if (w.winding - n).abs() > 0.25 || (w.trapezoid - n).abs() > 0.25 || n < 0.0 {
                    return Err(Error::Validation(format!(
                        "non-integer winding {} (trapezoid {}) for nu = {}",
                        w.winding,
                        w.trapezoid,
                        nu.value()
                    )));
                }
                return Ok(n as usize);
            }
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

fn grid_zeros(nu: Order) -> Result<Vec<HankelZero>> {
    let v = nu.value();
    let r = 1.2 * v.max(1.0) + 1.0;
    let n = 60;
    let h = 1.1 * r / n as f64;
    // the left edge sits inside the second quadrant so that a zero on the
    // imaginary axis is an interior minimum
    let at = |i: usize, j: usize| Complex64::new(-0.1 * r + i as f64 * h, j as f64 * h + 1e-3);
    let mut mag = vec![vec![f64::INFINITY; n + 1]; n + 1];
    for (i, row) in mag.iter_mut().enumerate() {
        for (j, m) in row.iter_mut().enumerate() {
            let z = at(i, j);
            if z.norm() > 0.05 {
                if let Ok((s, _)) = hankel2_scaled_with_deriv(nu, z) {
                    // |H| = |e^{iz}H| e^{Im z}
                    *m = s.norm() * z.im.exp();
                }
            }
        }
    }
    let mut found: Vec<HankelZero> = Vec::new();
    for i in 1..n {
        for j in 1..n {
            let m = mag[i][j];
            let is_min = (i - 1..=i + 1)
                .flat_map(|a| (j - 1..=j + 1).map(move |b| (a, b)))
                .filter(|&(a, b)| (a, b) != (i, j))
                .all(|(a, b)| mag[a][b] > m);
            if !is_min {
                continue;
            }
            let seed = at(i, j);
            if let Ok((z, res)) = refine(nu, seed) {
                if z.re >= -1e-12 && z.im >= 0.0 && !found.iter().any(|f| (f.refined - z).norm() <= 1e-6) {
                    found.push(HankelZero {
                        k: 0,
                        seed,
                        refined: z,
                        residual: res,
                    });
                }
            }
        }
    }
    found.sort_by(|a, b| a.refined.arg().total_cmp(&b.refined.arg()));
    for (i, z) in found.iter_mut().enumerate() {
        z.k = i + 1;
    }
    Ok(found)
}

fn enumeration_error(nu: Order, reason: String) -> Error {
    Error::Enumeration {
        nu: nu.value(),
        reason,
    }
}

/// All first-quadrant zeros of `H²_ν`, validated against the predicted
/// count and the argument principle.
pub fn all_zeros(nu: Order) -> Result<HankelZeroSet> {
    let predicted = predicted_count(nu);
    let zeros = if predicted == 0 {
        Vec::new()
    } else if nu.value() >= NU_MIN {
        let seeds = seeds(nu)?;
        seeds
            .into_par_iter()
            .enumerate()
            .map(|(i, seed)| {
                refine(nu, seed).map(|(z, residual)| HankelZero {
                    k: i + 1,
                    seed,
                    refined: z,
                    residual,
                })
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        grid_zeros(nu)?
    };
    validate(nu, predicted, &zeros)?;
    Ok(HankelZeroSet {
        nu,
        predicted_count: predicted,
        zeros,
        validated: true,
    })
}

fn validate(nu: Order, predicted: usize, zeros: &[HankelZero]) -> Result<()> {
    if zeros.len() != predicted {
        return Err(enumeration_error(
            nu,
            format!("found {} zeros, predicted {predicted}", zeros.len()),
        ));
    }
    for z in zeros {
        let a = z.refined.arg();
        if !(-1e-12..=PI / 2.0 + 1e-6).contains(&a) {
            return Err(enumeration_error(
                nu,
                format!("zero {} (k = {}) outside the closed first quadrant", z.refined, z.k),
            ));
        }
    }
    let sep = 10.0 * RESIDUAL_TOL;
    for (i, a) in zeros.iter().enumerate() {
        for b in &zeros[i + 1..] {
            if (a.refined - b.refined).norm() <= sep {
                return Err(enumeration_error(
                    nu,
                    format!("seeds k = {} and k = {} refined to the same zero {}", a.k, b.k, a.refined),
                ));
            }
        }
    }
    let ap = count_by_argument_principle(nu, &Contour::bounding(nu))
        .map_err(|e| enumeration_error(nu, format!("argument principle failed: {e}")))?;
    if ap != predicted {
        return Err(enumeration_error(
            nu,
            format!("argument principle counts {ap}, predicted {predicted}"),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(v: f64) -> Order {
        Order::new(v).unwrap()
    }

    #[test]
    fn watson_count_examples() {
        assert_eq!(predicted_count(o(10.0)), 5);
        assert_eq!(predicted_count(o(1.0)), 0);
        assert_eq!(predicted_count(o(1.5)), 1);
        assert_eq!(predicted_count(o(0.5)), 0);
        assert_eq!(predicted_count(o(3.5)), 2);
        assert_eq!(predicted_count(o(0.0)), 0);
    }

    #[test]
    fn count_agrees_with_seed_count() {
        for i in 0..400 {
            let nu = o(i as f64 * 0.125);
            assert_eq!(predicted_count(nu), seed_count(nu), "nu = {}", nu.value());
        }
    }

    #[test]
    fn axis_zero_orders() {
        assert!(axis_zero_expected(o(1.5)));
        assert!(axis_zero_expected(o(5.5)));
        assert!(!axis_zero_expected(o(2.5)));
        assert!(!axis_zero_expected(o(3.0)));
    }

    #[test]
    fn half_integer_axis_zero() {
        // H²_{3/2}(z) ∝ e^{-iz}(1 - i/z)/sqrt(z): the zero is z = i
        let set = all_zeros(o(1.5)).unwrap();
        assert_eq!(set.zeros.len(), 1);
        let z = set.zeros[0].refined;
        assert!(z.re.abs() < 1e-12 && (z.im - 1.0).abs() < 1e-12, "{z}");
    }

    #[test]
    fn nu_ten_has_five_zeros() {
        let set = all_zeros(o(10.0)).unwrap();
        assert_eq!(set.zeros.len(), 5);
        assert!(set.validated);
        for z in &set.zeros {
            let a = z.refined.arg();
            assert!(a > 0.0 && a <= PI / 2.0);
        }
    }

    #[test]
    fn tiny_contour_around_a_zero() {
        let set = all_zeros(o(10.0)).unwrap();
        let z = set.zeros[2].refined;
        let d = Complex64::new(0.05, 0.05);
        assert_eq!(count_by_argument_principle(o(10.0), &Contour::rectangle(z - d, z + d)).unwrap(), 1);
    }

    #[test]
    fn refine_rejects_seeds_outside_basin() {
        assert!(matches!(
            refine(o(10.0), Complex64::new(-5.0, -5.0)),
            Err(Error::Refinement { .. })
        ));
    }
}
