//! Resonances of the truncated cone `C_a(Y)` and their counting function.
//!
//! A zero `z` of `H²_ν` in the closed first quadrant gives the resonances
//! `conj(z)/a` (argument in `[-π/2, 0)`) and `e^{iπ} z/a` (argument in
//! `(π, 3π/2]`), each with the multiplicity of the link eigenvalue that
//! produced `ν`. A zero on the imaginary axis gives one resonance on each
//! of the two sheets.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eyemap::{an_constant, min_abs_z_on_boundary};
use crate::hankel_zeros::{all_zeros, predicted_count};
use crate::link_spectrum::{linear_fit, LinkSpectrum};
use crate::specfun::Order;

/// Relative margin added to the order cutoff `rmax·a / min|z|`.
pub const NU_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    pub modulus: f64,
    /// in `[-π/2, 0)` or `(π, 3π/2]`
    pub argument: f64,
    pub source_nu: f64,
    pub k: usize,
    pub mult: u64,
}

/// Zero bookkeeping for one order, kept for the completeness audit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderSummary {
    pub nu: f64,
    pub mult: u64,
    pub predicted: usize,
    pub found: usize,
    /// smallest zero modulus (unscaled), infinite when there are no zeros
    pub min_zero_modulus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceSet {
    pub a: f64,
    pub spectrum: LinkSpectrum,
    /// sorted by `(source_nu, k, argument)`
    pub items: Vec<Resonance>,
    pub rmax: f64,
    pub complete_below: f64,
    /// largest order included
    pub nu_max: f64,
    pub orders: Vec<OrderSummary>,
}

/// Order needed so that every resonance of modulus `<= rmax` is found.
pub fn required_nu(a: f64, rmax: f64) -> f64 {
    rmax * a / min_abs_z_on_boundary() * (1.0 + NU_MARGIN)
}

/// Link cutoff `μ` needed for [`resonances`] at `(a, rmax)`.
pub fn required_cutoff_mu(n: usize, a: f64, rmax: f64) -> f64 {
    let nu = required_nu(a, rmax);
    // rounded up so that the round trip through `nu_cutoff` stays >= nu
    (nu * nu - crate::link_spectrum::order_shift_sq(n)).max(0.0).sqrt() * (1.0 + 1e-12)
}

/// All resonances of `C_a(Y)` with modulus `<= rmax`.
pub fn resonances(spec: &LinkSpectrum, a: f64, rmax: f64) -> Result<ResonanceSet> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::domain(format!("boundary radius must be positive, got {a}")));
    }
    if !(rmax > 0.0 && rmax.is_finite()) {
        return Err(Error::domain(format!("rmax must be positive, got {rmax}")));
    }
    let nu_max = required_nu(a, rmax);
    if spec.nu_cutoff() < nu_max {
        return Err(Error::Completeness(format!(
            "resonances up to |λ| = {rmax} with a = {a} need orders up to {nu_max:.6}; \
             the spectrum is complete only to ν = {:.6} (cutoff mu = {}, need cutoff mu >= {:.6})",
            spec.nu_cutoff(),
            spec.cutoff_mu,
            required_cutoff_mu(spec.n, a, rmax)
        )));
    }
    let entries: Vec<_> = spec.entries_up_to_nu(nu_max).copied().collect();
    let per_order: Vec<(OrderSummary, Vec<Resonance>)> = entries
        .par_iter()
        .map(|e| {
            let nu = Order::new(e.nu)?;
            let set = all_zeros(nu)?;
            let mut items = Vec::new();
            let mut min_mod = f64::INFINITY;
            for z in &set.zeros {
                let m = z.refined.norm();
                min_mod = min_mod.min(m);
                if m / a > rmax {
                    continue;
                }
                let theta = z.refined.arg().clamp(0.0, PI / 2.0);
                for argument in [-theta, PI + theta] {
                    items.push(Resonance {
                        modulus: m / a,
                        argument,
                        source_nu: e.nu,
                        k: z.k,
                        mult: e.mult,
                    });
                }
            }
            let summary = OrderSummary {
                nu: e.nu,
                mult: e.mult,
                predicted: set.predicted_count,
                found: set.zeros.len(),
                min_zero_modulus: min_mod,
            };
            Ok((summary, items))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut items = Vec::new();
    let mut orders = Vec::new();
    for (s, its) in per_order {
        orders.push(s);
        items.extend(its);
    }
    items.sort_by(|x, y| {
        x.source_nu
            .total_cmp(&y.source_nu)
            .then(x.k.cmp(&y.k))
            .then(x.argument.total_cmp(&y.argument))
    });
    Ok(ResonanceSet {
        a,
        spectrum: spec.clone(),
        items,
        rmax,
        complete_below: rmax,
        nu_max,
        orders,
    })
}

fn check_complete(set: &ResonanceSet, r: f64) -> Result<()> {
    if r > set.complete_below {
        return Err(Error::Completeness(format!(
            "r = {r} exceeds the complete radius {}",
            set.complete_below
        )));
    }
    Ok(())
}

/// `N(r)`: resonances with `|λ| <= r`, with multiplicity.
pub fn count(set: &ResonanceSet, r: f64) -> Result<u64> {
    check_complete(set, r)?;
    Ok(set.items.iter().filter(|x| x.modulus <= r).map(|x| x.mult).sum())
}

/// `N(r, θ₁, θ₂)`: as [`count`], restricted to `θ₁ <= arg λ <= θ₂`
/// (closed sector).
pub fn sector_count(set: &ResonanceSet, r: f64, theta1: f64, theta2: f64) -> Result<u64> {
    check_complete(set, r)?;
    Ok(set
        .items
        .iter()
        .filter(|x| x.modulus <= r && x.argument >= theta1 && x.argument <= theta2)
        .map(|x| x.mult)
        .sum())
}

/// Resonances on the `[-π/2, 0)` sheet whose first-quadrant preimage has
/// argument in `[0, ε]`.
pub fn near_real_axis_count(set: &ResonanceSet, r: f64, eps: f64) -> Result<u64> {
    sector_count(set, r, -eps, 0.0)
}

/// Least-squares Weyl fit of `N(r)` samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub n: usize,
    pub samples: Vec<(f64, u64)>,
    /// `(r, θ₁, θ₂, count)`
    pub sector_samples: Vec<(f64, f64, f64, u64)>,
    pub fitted_exponent: f64,
    /// mean of `N(r)/r^n` over the upper half of the radii
    pub fitted_coefficient: f64,
    /// `A_n · vol(Y)`
    pub reference: f64,
    /// `N(r) / (A_n vol(Y) r^n)` per sample
    pub ratios: Vec<f64>,
}

/// Fit `log N` against `log r` and compare with `A_n vol(Y)`.
pub fn weyl_fit(n: usize, samples: &[(f64, u64)], reference: f64) -> Result<CountReport> {
    if samples.len() < 5 {
        return Err(Error::Fit(format!("need at least 5 radii, got {}", samples.len())));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (rmin, rmax) = (sorted[0].0, sorted[sorted.len() - 1].0);
    if rmin.is_nan() || rmin <= 0.0 || rmax < 3.0 * rmin {
        return Err(Error::Fit(format!(
            "radii must be positive and span a factor 3, got [{rmin}, {rmax}]"
        )));
    }
    if sorted.iter().any(|s| s.1 == 0) {
        return Err(Error::Fit("a sample radius has N(r) = 0".into()));
    }
    let x: Vec<f64> = sorted.iter().map(|s| s.0.ln()).collect();
    let y: Vec<f64> = sorted.iter().map(|s| (s.1 as f64).ln()).collect();
    let (exponent, _) = linear_fit(&x, &y)?;
    let top = &sorted[sorted.len() / 2..];
    let coefficient =
        top.iter().map(|s| s.1 as f64 / s.0.powi(n as i32)).sum::<f64>() / top.len() as f64;
    let ratios = sorted
        .iter()
        .map(|s| s.1 as f64 / (reference * s.0.powi(n as i32)))
        .collect();
    if !(exponent.is_finite() && coefficient.is_finite()) {
        return Err(Error::Fit("non-finite fit".into()));
    }
    Ok(CountReport {
        n,
        samples: sorted,
        sector_samples: Vec::new(),
        fitted_exponent: exponent,
        fitted_coefficient: coefficient,
        reference,
        ratios,
    })
}

/// `N(r)` at the given radii, fitted; sectors are `(r, θ₁, θ₂)`.
pub fn count_report(
    set: &ResonanceSet,
    radii: &[f64],
    sectors: &[(f64, f64, f64)],
) -> Result<CountReport> {
    let samples = radii
        .iter()
        .map(|&r| count(set, r).map(|c| (r, c)))
        .collect::<Result<Vec<_>>>()?;
    let reference = an_constant(set.spectrum.n)?.value * set.spectrum.vol_link;
    let mut report = weyl_fit(set.spectrum.n, &samples, reference)?;
    report.sector_samples = sectors
        .iter()
        .map(|&(r, t1, t2)| sector_count(set, r, t1, t2).map(|c| (r, t1, t2, c)))
        .collect::<Result<Vec<_>>>()?;
    Ok(report)
}

/// Completeness audit: every included order has exactly its predicted
/// number of zeros, and the items are closed under `λ ↦ -conj(λ)`.
pub fn audit(set: &ResonanceSet) -> Result<()> {
    for o in &set.orders {
        let predicted = predicted_count(Order::new(o.nu)?);
        if o.found != predicted || o.predicted != predicted {
            return Err(Error::Validation(format!(
                "order {}: {} zeros found, {} predicted",
                o.nu, o.found, predicted
            )));
        }
    }
    if !sheet_symmetric(&set.items) {
        return Err(Error::Validation("resonances are not closed under λ ↦ -conj(λ)".into()));
    }
    Ok(())
}

/// Multiset equality of the items and their images under `λ ↦ -conj(λ)`,
/// which maps argument `θ` to `π - θ` (mod 2π) and so swaps the sheets.
/// Arguments are compared to `1e-12`.
pub fn sheet_symmetric(items: &[Resonance]) -> bool {
    let key = |r: &Resonance| (r.source_nu.to_bits(), r.k, r.modulus.to_bits(), r.mult);
    let mut lower: Vec<_> = items
        .iter()
        .filter(|r| r.argument < PI / 2.0)
        .map(|r| (key(r), -r.argument))
        .collect();
    let mut upper: Vec<_> = items
        .iter()
        .filter(|r| r.argument > PI / 2.0)
        .map(|r| (key(r), r.argument - PI))
        .collect();
    lower.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    upper.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    lower.len() == upper.len()
        && lower
            .iter()
            .zip(&upper)
            .all(|(x, y)| x.0 == y.0 && (x.1 - y.1).abs() <= 1e-12)
}

/// One row of the `a → 0` table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FullConeRow {
    pub a: f64,
    pub smallest_modulus: f64,
    pub count_at_r: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullConeEvidence {
    pub r_fixed: f64,
    pub rows: Vec<FullConeRow>,
    /// log-log slope of the smallest modulus against `a`
    pub slope: f64,
}

/// Smallest modulus of a first-quadrant zero over all orders of the
/// spectrum. Orders are scanned upward until `ν·min|z|` exceeds the best
/// modulus found.
pub fn smallest_zero_modulus(spec: &LinkSpectrum) -> Result<f64> {
    let m0 = min_abs_z_on_boundary();
    let mut best = f64::INFINITY;
    for e in &spec.entries {
        if e.nu * m0 * (1.0 - NU_MARGIN) > best {
            return Ok(best);
        }
        let set = all_zeros(Order::new(e.nu)?)?;
        for z in &set.zeros {
            best = best.min(z.refined.norm());
        }
    }
    if best.is_finite() && spec.nu_cutoff() * m0 * (1.0 - NU_MARGIN) > best {
        Ok(best)
    } else {
        Err(Error::Completeness(
            "spectrum too short to locate the smallest resonance".into(),
        ))
    }
}

/// Smallest resonance modulus and `N(r_fixed)` along a decreasing sequence
/// of boundary radii.
pub fn full_cone_evidence(spec: &LinkSpectrum, r_fixed: f64, a_sequence: &[f64]) -> Result<FullConeEvidence> {
    if a_sequence.len() < 2 || a_sequence.iter().any(|a| a.is_nan() || *a <= 0.0) {
        return Err(Error::domain("need at least two positive boundary radii"));
    }
    if a_sequence.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::domain("boundary radii must decrease"));
    }
    let h_min = smallest_zero_modulus(spec)?;
    let mut rows = Vec::with_capacity(a_sequence.len());
    for &a in a_sequence {
        let set = resonances(spec, a, r_fixed)?;
        rows.push(FullConeRow {
            a,
            smallest_modulus: h_min / a,
            count_at_r: count(&set, r_fixed)?,
        });
    }
    let x: Vec<f64> = rows.iter().map(|r| r.a.ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.smallest_modulus.ln()).collect();
    let (slope, _) = linear_fit(&x, &y)?;
    Ok(FullConeEvidence { r_fixed, rows, slope })
}

/// CSV with header `modulus,argument,nu,k,mult` (17 significant digits).
pub fn to_csv(set: &ResonanceSet) -> String {
    let mut out = String::from("modulus,argument,nu,k,mult\n");
    for r in &set.items {
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{},{}",
            r.modulus, r.argument, r.source_nu, r.k, r.mult
        );
    }
    out
}
