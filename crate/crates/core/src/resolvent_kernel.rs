//! The separated resolvent kernel on the truncated cone.
//!
//! For the mode with link eigenvalue `μ²` and order `ν`, the resolvent acts
//! by `u(r) = ∫_a^∞ K(r, r̃) f(r̃) r̃^{n-1} dr̃`, where
//!
//! ```text
//! K(r, r̃) = (π/2i) (r r̃)^{-(n-2)/2}
//!           [J_ν(λr<) H¹_ν(λr>) - J_ν(λa)/H¹_ν(λa) · H¹_ν(λr<) H¹_ν(λr>)]
//! ```
//!
//! with `r< = min(r, r̃)`, `r> = max(r, r̃)`; the second term is dropped for
//! `a = 0`. `u` solves `u'' + (n-1)/r u' - μ²/r² u + λ² u = f` with
//! `u(a) = 0` and is outgoing at infinity.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::link_spectrum::order_shift_sq;
use crate::quadrature::GaussLegendre;
use crate::specfun::{
    bessel_j, bessel_j_cover, bessel_j_deriv, hankel1, hankel1_cover, hankel1_deriv, ComplexPoint, Order,
};

/// `|H¹_ν(λa)| / |H¹_{ν+1}(λa)|` below which `λ` is treated as a pole.
pub const POLE_THRESHOLD: f64 = 1e-8;

/// Gauss–Legendre nodes per panel in [`apply_resolvent`].
const GL_ORDER: usize = 16;
const NODES_PER_WAVELENGTH: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelContext {
    pub a: f64,
    pub n: usize,
    pub nu: Order,
    pub lambda: ComplexPoint,
}

impl KernelContext {
    pub fn new(a: f64, n: usize, nu: Order, lambda: ComplexPoint) -> Result<Self> {
        if !(a >= 0.0 && a.is_finite()) {
            return Err(Error::domain(format!("boundary radius must be >= 0, got {a}")));
        }
        if n < 2 {
            return Err(Error::domain(format!("cone dimension must be >= 2, got {n}")));
        }
        if !(lambda.modulus > 0.0 && lambda.modulus.is_finite() && lambda.argument.is_finite()) {
            return Err(Error::domain(format!("bad spectral parameter {lambda:?}")));
        }
        Ok(KernelContext { a, n, nu, lambda })
    }

    /// `μ² = ν² - ((n-2)/2)²`.
    pub fn mu_sq(&self) -> f64 {
        let v = self.nu.value();
        v * v - order_shift_sq(self.n)
    }

    fn at(&self, r: f64) -> ComplexPoint {
        self.lambda.scale(r)
    }

    /// `J_ν(λa)/H¹_ν(λa)`, zero for `a = 0`.
    pub fn reflection(&self) -> Result<Complex64> {
        if self.a == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let p = self.at(self.a);
        let h = hankel1_cover(self.nu, p)?.value;
        let next = hankel1_cover(Order::new(self.nu.value() + 1.0)?, p)?.value;
        if h.norm() < POLE_THRESHOLD * next.norm() {
            return Err(Error::Pole { magnitude: h.norm() });
        }
        Ok(bessel_j_cover(self.nu, p)?.value / h)
    }
}

/// Radial basis values `(J_ν(λr), H¹_ν(λr))`, continued along the cover.
fn basis(ctx: &KernelContext, r: f64) -> Result<(Complex64, Complex64)> {
    let p = ctx.at(r);
    Ok((bessel_j_cover(ctx.nu, p)?.value, hankel1_cover(ctx.nu, p)?.value))
}

fn kernel_with(ctx: &KernelContext, c: Complex64, r: f64, rt: f64) -> Result<Complex64> {
    let (lo, hi) = if r <= rt { (r, rt) } else { (rt, r) };
    let (j_lo, h_lo) = basis(ctx, lo)?;
    let (_, h_hi) = basis(ctx, hi)?;
    let pref = Complex64::new(0.0, -PI / 2.0) * (r * rt).powf(-(ctx.n as f64 - 2.0) / 2.0);
    Ok(pref * (j_lo - c * h_lo) * h_hi)
}

/// `K_{a}(r, r̃)` for `r, r̃ >= a`.
pub fn kernel(ctx: &KernelContext, r: f64, rt: f64) -> Result<Complex64> {
    if r < ctx.a || rt < ctx.a || r <= 0.0 || rt <= 0.0 {
        return Err(Error::domain(format!(
            "kernel needs r, r̃ >= a = {} and positive, got ({r}, {rt})",
            ctx.a
        )));
    }
    let c = ctx.reflection()?;
    kernel_with(ctx, c, r, rt)
}

/// Compactly supported right-hand side `f` on `[lo, hi]`.
pub struct Source<'a> {
    pub lo: f64,
    pub hi: f64,
    pub f: &'a (dyn Fn(f64) -> Complex64 + Sync),
}

/// `u(r) = ∫ K(r, r̃) f(r̃) r̃^{n-1} dr̃` at each `r` in `points`, by composite
/// Gauss–Legendre with `panels` panels on the support, split at `r` when it
/// falls inside.
pub fn apply_resolvent(
    ctx: &KernelContext,
    source: &Source<'_>,
    points: &[f64],
    panels: usize,
) -> Result<Vec<Complex64>> {
    if !(source.lo >= ctx.a && source.hi > source.lo) {
        return Err(Error::domain(format!(
            "support [{}, {}] must lie in [a, ∞) with a = {}",
            source.lo, source.hi, ctx.a
        )));
    }
    let width = (source.hi - source.lo) / panels.max(1) as f64;
    let wavelength = 2.0 * PI / ctx.lambda.modulus;
    let per_wave = GL_ORDER as f64 * wavelength / width;
    if panels == 0 || per_wave < NODES_PER_WAVELENGTH {
        return Err(Error::Resolution(format!(
            "{per_wave:.2} nodes per wavelength 2π/|λ| = {wavelength:.4}, need {NODES_PER_WAVELENGTH}"
        )));
    }
    let c = ctx.reflection()?;
    let gl = GaussLegendre::new(GL_ORDER);
    let weight = |t: f64| t.powi(ctx.n as i32 - 1);
    points
        .par_iter()
        .map(|&r| {
            if r < ctx.a {
                return Err(Error::domain(format!("evaluation point {r} below a = {}", ctx.a)));
            }
            // panel edges, with r inserted when inside the support
            let mut edges: Vec<f64> = (0..=panels).map(|i| source.lo + i as f64 * width).collect();
            if r > source.lo && r < source.hi {
                let pos = edges.partition_point(|&e| e < r);
                if (edges[pos] - r).abs() > 1e-14 * r {
                    edges.insert(pos, r);
                }
            }
            let mut total = Complex64::new(0.0, 0.0);
            for w in edges.windows(2) {
                let (lo, hi) = (w[0], w[1]);
                let half = 0.5 * (hi - lo);
                let mut s = Complex64::new(0.0, 0.0);
                for (x, wt) in gl.nodes.iter().zip(&gl.weights) {
                    let t = lo + half * (x + 1.0);
                    s += kernel_with(ctx, c, r, t)? * (source.f)(t) * (weight(t) * wt);
                }
                total += s * half;
            }
            Ok(total)
        })
        .collect()
}

/// Max-norm of the centred-difference residual of
/// `u'' + (n-1)/r u' - μ²/r² u + λ² u - f` over the interior nodes of a
/// uniform grid `r_i = r0 + i h`, skipping `skip` nodes at each end.
pub fn ode_residual(
    ctx: &KernelContext,
    r0: f64,
    h: f64,
    u: &[Complex64],
    f: &[Complex64],
    skip: usize,
) -> f64 {
    let lam = ctx.lambda.to_complex();
    let lam2 = lam * lam;
    let mu2 = ctx.mu_sq();
    let nm1 = ctx.n as f64 - 1.0;
    let m = u.len().min(f.len());
    let start = skip.max(1);
    let end = m.saturating_sub(skip.max(1));
    let mut worst = 0.0f64;
    for i in start..end {
        let r = r0 + i as f64 * h;
        let upp = (u[i + 1] - u[i] * 2.0 + u[i - 1]) / (h * h);
        let up = (u[i + 1] - u[i - 1]) / (2.0 * h);
        let res = upp + up * (nm1 / r) - u[i] * (mu2 / (r * r)) + u[i] * lam2 - f[i];
        worst = worst.max(res.norm());
    }
    worst
}

/// `W(w₁, w₂)(r)` for `w₁ = r^{-(n-2)/2} J_ν(λr)`, `w₂ = r^{-(n-2)/2} H¹_ν(λr)`
/// on the physical sheet, from the Bessel derivatives.
pub fn wronskian(ctx: &KernelContext, r: f64) -> Result<Complex64> {
    let lam = ctx.lambda.to_complex();
    let z = lam * r;
    let j = bessel_j(ctx.nu, z)?.value;
    let jp = bessel_j_deriv(ctx.nu, z)?.value;
    let h = hankel1(ctx.nu, z)?.value;
    let hp = hankel1_deriv(ctx.nu, z)?.value;
    // the r^{-(n-2)/2} factors contribute only through their product
    Ok(lam * r.powf(-(ctx.n as f64 - 2.0)) * (j * hp - jp * h))
}

/// `r^{-(n-1)} · 2i/π`.
pub fn wronskian_closed_form(n: usize, r: f64) -> Complex64 {
    Complex64::new(0.0, 2.0 / PI) * r.powf(-(n as f64 - 1.0))
}

/// Summary of the kernel checks at two grid resolutions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelCheck {
    pub h_coarse: f64,
    pub h_fine: f64,
    pub residual_coarse: f64,
    pub residual_fine: f64,
    /// `residual_coarse / residual_fine`, about 4 for second order
    pub ratio: f64,
    /// `residual_fine · h_fine²`, the size of a perturbation of `u` that
    /// the fine-grid residual can resolve
    pub discretization_tolerance: f64,
    /// `|u(a)|`
    pub boundary_value: f64,
    /// largest relative jump `|K(r, r⁻) - K(r, r⁺)| / |K(r, r)|`
    pub diagonal_jump: f64,
    /// largest relative deviation of the Wronskian from `r^{-(n-1)} 2i/π`
    pub wronskian_deviation: f64,
}

/// Smooth bump `exp(-1/(1-s²))`, `s = (2r - lo - hi)/(hi - lo)`.
pub fn bump(lo: f64, hi: f64) -> impl Fn(f64) -> Complex64 + Sync {
    move |r: f64| {
        let s = (2.0 * r - lo - hi) / (hi - lo);
        if s.abs() >= 1.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new((-1.0 / (1.0 - s * s)).exp(), 0.0)
        }
    }
}

/// Residual suite: apply the resolvent to a bump supported on
/// `[a + 0.5, a + 2.5]`, check the ODE on grids of spacing `h` and `h/2`
/// over `[a + 0.25, a + 3]`, the Dirichlet value, diagonal continuity and
/// the Wronskian.
pub fn kernel_check(ctx: &KernelContext, h: f64) -> Result<KernelCheck> {
    let a = ctx.a;
    let (lo, hi) = (a + 0.5, a + 2.5);
    let f = bump(lo, hi);
    let source = Source { lo, hi, f: &f };
    let panels = ((hi - lo) * ctx.lambda.modulus * 2.0).ceil().max(16.0) as usize;
    let residual_at = |step: f64| -> Result<f64> {
        let r0 = a + 0.25;
        let m = ((2.75 / step).round() as usize) + 1;
        let pts: Vec<f64> = (0..m).map(|i| r0 + i as f64 * step).collect();
        let u = apply_resolvent(ctx, &source, &pts, panels)?;
        let fv: Vec<Complex64> = pts.iter().map(|&r| f(r)).collect();
        Ok(ode_residual(ctx, r0, step, &u, &fv, 1))
    };
    let residual_coarse = residual_at(h)?;
    let residual_fine = residual_at(h / 2.0)?;
    let boundary_value = if a > 0.0 {
        apply_resolvent(ctx, &source, &[a], panels)?[0].norm()
    } else {
        0.0
    };
    let mut diagonal_jump = 0.0f64;
    for i in 0..8 {
        let r = a + 0.3 + 0.35 * i as f64;
        let e = 1e-12 * r;
        let below = kernel(ctx, r, r - e)?;
        let above = kernel(ctx, r, r + e)?;
        let at = kernel(ctx, r, r)?;
        let jump = (above - below).norm() / at.norm();
        diagonal_jump = diagonal_jump.max(jump);
    }
    let mut wronskian_deviation = 0.0f64;
    for i in 0..8 {
        let r = a.max(0.1) + 0.4 * i as f64;
        let w = wronskian(ctx, r)?;
        let exact = wronskian_closed_form(ctx.n, r);
        wronskian_deviation = wronskian_deviation.max((w - exact).norm() / exact.norm());
    }
    Ok(KernelCheck {
        h_coarse: h,
        h_fine: h / 2.0,
        residual_coarse,
        residual_fine,
        ratio: residual_coarse / residual_fine,
        discretization_tolerance: residual_fine * (h / 2.0) * (h / 2.0),
        boundary_value,
        diagonal_jump,
        wronskian_deviation,
    })
}
