//! Link spectra `(μ_j², m_j)` and their counting functions.
//!
//! The orders entering the Hankel problem are `ν_j = sqrt(μ_j² + ((n-2)/2)²)`.
//! Spectra come either from the explicit formulae for a round sphere or
//! from a file:
//!
//! ```text
//! n=3 vol=12.566370614359172 cutoff=40
//! 0,1
//! 2,3
//! 6,5
//! ```
//!
//! one header line, then `mu_sq,multiplicity` rows; `#` starts a comment.

use std::fmt::Write as _;
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eyemap::{unit_ball_volume, unit_sphere_area};

/// One eigenvalue of the link Laplacian with its multiplicity and order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub mu_sq: f64,
    pub mult: u64,
    pub nu: f64,
}

/// Where a spectrum came from. The dynamical hypothesis on the link
/// (periodic geodesics of measure zero) cannot be checked from
/// eigenvalues; for file spectra it is recorded as asserted or not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Provenance {
    Sphere { radius_scale: f64 },
    File { measure_zero_asserted: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkSpectrum {
    /// dimension of the cone
    pub n: usize,
    pub vol_link: f64,
    /// sorted by `mu_sq`
    pub entries: Vec<SpectrumEntry>,
    /// every eigenvalue with `μ <= cutoff_mu` is present
    pub cutoff_mu: f64,
    /// rows were out of order in the source and have been sorted
    pub resorted: bool,
    pub provenance: Provenance,
}

/// `((n-2)/2)²`.
pub fn order_shift_sq(n: usize) -> f64 {
    let h = (n as f64 - 2.0) / 2.0;
    h * h
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Dimension of the degree-`j` spherical harmonics on `S^{n-1} ⊂ R^n`:
/// `C(j+n-1, n-1) - C(j+n-3, n-1)`.
pub fn sphere_multiplicity(n: usize, j: u64) -> u64 {
    let n = n as u64;
    let all = binomial(j + n - 1, n - 1);
    let lower = if j >= 2 { binomial(j + n - 3, n - 1) } else { 0 };
    (all - lower) as u64
}

impl LinkSpectrum {
    /// Build from unsorted `(mu_sq, mult)` pairs.
    pub fn new(
        n: usize,
        vol_link: f64,
        cutoff_mu: f64,
        pairs: Vec<(f64, u64)>,
        provenance: Provenance,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("cone dimension must be >= 2, got {n}")));
        }
        if !(vol_link > 0.0 && vol_link.is_finite()) {
            return Err(Error::domain(format!("link volume must be positive, got {vol_link}")));
        }
        if !(cutoff_mu >= 0.0 && cutoff_mu.is_finite()) {
            return Err(Error::domain(format!("cutoff must be non-negative, got {cutoff_mu}")));
        }
        let shift = order_shift_sq(n);
        let resorted = pairs.windows(2).any(|w| w[1].0 < w[0].0);
        let mut entries: Vec<SpectrumEntry> = pairs
            .into_iter()
            .map(|(mu_sq, mult)| SpectrumEntry {
                mu_sq,
                mult,
                nu: (mu_sq + shift).sqrt(),
            })
            .collect();
        entries.sort_by(|a, b| a.mu_sq.total_cmp(&b.mu_sq));
        Ok(LinkSpectrum {
            n,
            vol_link,
            entries,
            cutoff_mu,
            resorted,
            provenance,
        })
    }

    /// Largest order guaranteed complete: `sqrt(cutoff² + ((n-2)/2)²)`.
    pub fn nu_cutoff(&self) -> f64 {
        (self.cutoff_mu * self.cutoff_mu + order_shift_sq(self.n)).sqrt()
    }

    /// Entries with `ν <= nu_max`.
    pub fn entries_up_to_nu(&self, nu_max: f64) -> impl Iterator<Item = &SpectrumEntry> {
        self.entries.iter().filter(move |e| e.nu <= nu_max)
    }

    /// Weyl coefficient of the link, `vol(B_{n-1}) vol(Y) / (2π)^{n-1}`.
    pub fn weyl_coefficient(&self) -> f64 {
        let d = self.n - 1;
        unit_ball_volume(d) * self.vol_link / (2.0 * std::f64::consts::PI).powi(d as i32)
    }
}

/// The round sphere `S^{n-1}` of radius `c`: `μ_j² = j(j+n-2)/c²` for all
/// `j` with `μ_j <= cutoff_mu`.
pub fn sphere_spectrum(n: usize, c: f64, cutoff_mu: f64) -> Result<LinkSpectrum> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::domain(format!("radius scale must be positive, got {c}")));
    }
    if n < 2 {
        return Err(Error::domain(format!("cone dimension must be >= 2, got {n}")));
    }
    let mut pairs = Vec::new();
    let mut j: u64 = 0;
    loop {
        let mu_sq = (j * (j + n as u64 - 2)) as f64 / (c * c);
        if mu_sq.sqrt() > cutoff_mu {
            break;
        }
        pairs.push((mu_sq, sphere_multiplicity(n, j)));
        j += 1;
    }
    let vol = c.powi(n as i32 - 1) * unit_sphere_area(n);
    LinkSpectrum::new(n, vol, cutoff_mu, pairs, Provenance::Sphere { radius_scale: c })
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Parse the spectrum file format.
pub fn parse_spectrum(text: &str, measure_zero_asserted: bool) -> Result<LinkSpectrum> {
    let mut header: Option<(usize, f64, f64)> = None;
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((_, _, cutoff)) = header else {
            header = Some(parse_header(line, lineno)?);
            continue;
        };
        let mut fields = line.split(',').map(str::trim);
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(parse_err(lineno, format!("expected `mu_sq,multiplicity`, got `{line}`")));
        };
        let mu_sq: f64 = a
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad eigenvalue `{a}`")))?;
        let mult: u64 = b
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad multiplicity `{b}`")))?;
        if !mu_sq.is_finite() || mu_sq < 0.0 {
            return Err(parse_err(lineno, format!("eigenvalue must be finite and >= 0, got {mu_sq}")));
        }
        if mult == 0 {
            return Err(parse_err(lineno, "multiplicity must be positive"));
        }
        if mu_sq.sqrt() > cutoff {
            return Err(parse_err(
                lineno,
                format!("eigenvalue {mu_sq} lies above the declared cutoff mu = {cutoff}"),
            ));
        }
        pairs.push((mu_sq, mult));
    }
    let (n, vol, cutoff) = header.ok_or_else(|| parse_err(1, "missing header `n=<int> vol=<real> cutoff=<real>`"))?;
    LinkSpectrum::new(n, vol, cutoff, pairs, Provenance::File { measure_zero_asserted })
        .map_err(|e| parse_err(1, e.to_string()))
}

fn parse_header(line: &str, lineno: usize) -> Result<(usize, f64, f64)> {
    let (mut n, mut vol, mut cutoff) = (None, None, None);
    for tok in line.split_whitespace() {
        let (key, value) = tok
            .split_once('=')
            .ok_or_else(|| parse_err(lineno, format!("header token `{tok}` is not key=value")))?;
        let bad = |what: &str| parse_err(lineno, format!("bad {what} `{value}`"));
        match key {
            "n" => n = Some(value.parse::<usize>().map_err(|_| bad("dimension"))?),
            "vol" => vol = Some(value.parse::<f64>().map_err(|_| bad("volume"))?),
            "cutoff" => cutoff = Some(value.parse::<f64>().map_err(|_| bad("cutoff"))?),
            _ => return Err(parse_err(lineno, format!("unknown header field `{key}`"))),
        }
    }
    match (n, vol, cutoff) {
        (Some(n), Some(v), Some(c)) => Ok((n, v, c)),
        _ => Err(parse_err(lineno, "header needs n=, vol= and cutoff=")),
    }
}

/// Read a spectrum file.
pub fn load_spectrum(path: &Path, measure_zero_asserted: bool) -> Result<LinkSpectrum> {
    let file = std::fs::File::open(path)
        .map_err(|e| parse_err(0, format!("cannot open {}: {e}", path.display())))?;
    let mut text = String::new();
    for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| parse_err(i + 1, format!("read error: {e}")))?;
        text.push_str(&line);
        text.push('\n');
    }
    parse_spectrum(&text, measure_zero_asserted)
}

/// Serialise in the spectrum file format (17 significant digits).
pub fn format_spectrum(spec: &LinkSpectrum) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "n={} vol={:.16e} cutoff={:.16e}",
        spec.n, spec.vol_link, spec.cutoff_mu
    );
    for e in &spec.entries {
        let _ = writeln!(out, "{:.16e},{}", e.mu_sq, e.mult);
    }
    out
}

fn check_cover(spec: &LinkSpectrum, mu: f64) -> Result<()> {
    if mu > spec.cutoff_mu {
        return Err(Error::Completeness(format!(
            "mu = {mu} exceeds the spectrum cutoff {}",
            spec.cutoff_mu
        )));
    }
    Ok(())
}

/// `N_h(μ) = #{μ_j <= μ}` with multiplicity.
pub fn weyl_count(spec: &LinkSpectrum, mu: f64) -> Result<u64> {
    check_cover(spec, mu)?;
    Ok(spec
        .entries
        .iter()
        .take_while(|e| e.mu_sq.sqrt() <= mu)
        .map(|e| e.mult)
        .sum())
}

/// `#{ν_j ∈ [ρ, ρ+1]}` with multiplicity.
pub fn interval_count(spec: &LinkSpectrum, rho: f64) -> Result<u64> {
    if rho + 1.0 > spec.nu_cutoff() {
        return Err(Error::Completeness(format!(
            "interval [{rho}, {}] reaches past the covered order {}",
            rho + 1.0,
            spec.nu_cutoff()
        )));
    }
    Ok(spec
        .entries
        .iter()
        .filter(|e| e.nu >= rho && e.nu <= rho + 1.0)
        .map(|e| e.mult)
        .sum())
}

/// Growth of the link counting function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylReport {
    /// mean of `N_h(μ)/μ^{n-1}` over the upper half of the samples
    pub coefficient: f64,
    /// least-squares slope of `log N_h` against `log μ`
    pub exponent: f64,
    /// `vol(B_{n-1}) vol(Y)/(2π)^{n-1}`
    pub reference: f64,
    pub samples: Vec<(f64, u64)>,
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let n = x.len() as f64;
    if x.len() < 2 || x.len() != y.len() {
        return Err(Error::Fit(format!("need matching samples, got {} and {}", x.len(), y.len())));
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 || !sxx.is_finite() {
        return Err(Error::Fit("abscissae are degenerate".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Sample `N_h` at the given `μ` values and fit its growth.
pub fn weyl_report(spec: &LinkSpectrum, mus: &[f64]) -> Result<WeylReport> {
    let mut samples = Vec::with_capacity(mus.len());
    for &mu in mus {
        samples.push((mu, weyl_count(spec, mu)?));
    }
    let usable: Vec<&(f64, u64)> = samples.iter().filter(|s| s.0 > 0.0 && s.1 > 0).collect();
    let x: Vec<f64> = usable.iter().map(|s| s.0.ln()).collect();
    let y: Vec<f64> = usable.iter().map(|s| (s.1 as f64).ln()).collect();
    let (exponent, _) = linear_fit(&x, &y)?;
    let d = (spec.n - 1) as i32;
    let mut sorted: Vec<&(f64, u64)> = usable.clone();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let top = &sorted[sorted.len() / 2..];
    let coefficient = top.iter().map(|s| s.1 as f64 / s.0.powi(d)).sum::<f64>() / top.len() as f64;
    Ok(WeylReport {
        coefficient,
        exponent,
        reference: spec.weyl_coefficient(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplicities() {
        assert_eq!(sphere_multiplicity(3, 0), 1);
        assert_eq!(sphere_multiplicity(3, 4), 9);
        assert_eq!(sphere_multiplicity(2, 0), 1);
        assert_eq!(sphere_multiplicity(2, 7), 2);
        // S^3: (j+1)²
        assert_eq!(sphere_multiplicity(4, 3), 16);
    }

    #[test]
    fn two_sphere_orders_are_half_integers() {
        let s = sphere_spectrum(3, 1.0, 10.0).unwrap();
        for (j, e) in s.entries.iter().enumerate() {
            assert!((e.nu - (j as f64 + 0.5)).abs() < 1e-14);
        }
        assert!((s.vol_link - 4.0 * std::f64::consts::PI).abs() < 1e-13);
    }

    #[test]
    fn circle_link() {
        let s = sphere_spectrum(2, 1.0, 5.0).unwrap();
        let mults: Vec<u64> = s.entries.iter().map(|e| e.mult).collect();
        assert_eq!(mults, vec![1, 2, 2, 2, 2, 2]);
        assert!(s.entries.iter().all(|e| (e.nu * e.nu - e.mu_sq).abs() < 1e-12));
    }

    #[test]
    fn count_at_zero_and_beyond_cutoff() {
        let s = sphere_spectrum(3, 1.0, 10.0).unwrap();
        assert_eq!(weyl_count(&s, 0.0).unwrap(), 1);
        assert!(matches!(weyl_count(&s, 10.5), Err(Error::Completeness(_))));
    }

    #[test]
    fn header_errors() {
        assert!(matches!(parse_spectrum("0,1\n", false), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            parse_spectrum("n=3 vol=1 cutoff=5\n0,1\n-2,3\n", false),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_spectrum("n=3 vol=1 cutoff=1\n0,1\n2,3\n", false),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_spectrum("n=3 vol=1\n0,1\n", false),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn unsorted_rows_are_sorted() {
        let s = parse_spectrum("# link\nn=3 vol=1 cutoff=5\n6,5\n0,1\n2,3\n", true).unwrap();
        assert!(s.resorted);
        let mu: Vec<f64> = s.entries.iter().map(|e| e.mu_sq).collect();
        assert_eq!(mu, vec![0.0, 2.0, 6.0]);
        assert_eq!(s.provenance, Provenance::File { measure_zero_asserted: true });
    }
}
