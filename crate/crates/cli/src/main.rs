//! `coneres`: zero tables, resonance counts, Weyl fits, the constant `A_n`,
//! resolvent kernel checks and spectrum files.
//!
//! Exit codes: 0 success, 2 usage, 3 numerical failure, 4 incomplete
//! spectrum.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cone_resonances::eyemap::{abs_z_extremes_on_boundary, an_constant, t0};
use cone_resonances::hankel_zeros::all_zeros;
use cone_resonances::link_spectrum::{
    format_spectrum, load_spectrum, sphere_spectrum, weyl_report, LinkSpectrum, Provenance,
};
use cone_resonances::resolvent_kernel::{kernel_check, KernelCheck, KernelContext};
use cone_resonances::resonance_counter::{
    count_report, required_cutoff_mu, resonances, to_csv, weyl_fit, CountReport,
};
use cone_resonances::specfun::{ComplexPoint, Order};
use cone_resonances::Error;
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "coneres", version, about = "Resonances of truncated cones")]
struct Cli {
    /// worker threads (default: one per core)
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    workers: Option<u32>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// First-quadrant zeros of H²_ν as CSV
    Zeros {
        #[arg(long, allow_hyphen_values = true)]
        nu: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Resonance count with a Weyl fit (JSON) and the resonance list (CSV)
    Count(CountArgs),
    /// Weyl fit of `r,count` samples read from a CSV file
    Fit {
        #[arg(long)]
        samples: PathBuf,
        #[arg(long)]
        dim: usize,
        /// volume of the link
        #[arg(long)]
        vol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The constant A_n
    An {
        #[arg(long, allow_hyphen_values = true)]
        dim: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Residual checks of the separated resolvent kernel
    KernelCheck(KernelArgs),
    /// Write or validate spectrum files
    Spectrum {
        #[command(subcommand)]
        action: SpectrumAction,
    },
}

#[derive(Args, Debug)]
struct CountArgs {
    /// `sphere` or `file:<path>`
    #[arg(long, default_value = "sphere")]
    link: String,
    /// cone dimension (taken from the file header for `file:` links)
    #[arg(long)]
    dim: Option<usize>,
    /// boundary radius
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, allow_hyphen_values = true)]
    rmax: f64,
    /// radius of the round sphere link
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    c: f64,
    /// comma-separated radii for the fit (default: five radii in [rmax/3, rmax])
    #[arg(long, value_delimiter = ',')]
    radii: Vec<f64>,
    /// sector `r:theta1:theta2`, repeatable
    #[arg(long)]
    sector: Vec<String>,
    /// record that the link's periodic geodesics have Liouville measure zero
    #[arg(long)]
    measure_zero_asserted: bool,
    /// report path (default stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// resonance CSV path
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct KernelArgs {
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long, allow_hyphen_values = true)]
    nu: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    a: f64,
    /// |λ|
    #[arg(long, allow_hyphen_values = true)]
    lambda_abs: f64,
    /// arg λ on the logarithmic cover
    #[arg(long, allow_hyphen_values = true)]
    lambda_arg: f64,
    /// coarse grid spacing; the fine grid uses h/2
    #[arg(long, default_value_t = 0.02)]
    h: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum SpectrumAction {
    /// Round sphere S^{n-1} of radius c up to a cutoff in μ
    Sphere {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, allow_hyphen_values = true)]
        cutoff: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse a spectrum file and print a summary with its Weyl fit
    Validate {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Core(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Core(Error::Domain(_) | Error::Parse { .. }) => 2,
            Failure::Core(Error::Completeness(_)) => 4,
            Failure::Core(_) | Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => format!("usage error: {m}"),
            Failure::Core(e) => e.to_string(),
            Failure::Io(m) => m.clone(),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn emit(out: &Option<PathBuf>, text: &str) -> Outcome {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialises");
    s.push('\n');
    s
}

fn cmd_zeros(nu: f64, out: &Option<PathBuf>) -> Outcome {
    if !(nu >= 0.0 && nu.is_finite()) {
        return Err(usage(format!("--nu must be a finite number >= 0, got {nu}")));
    }
    let set = all_zeros(Order::new(nu)?)?;
    let mut csv = String::from("k,seed_re,seed_im,zero_re,zero_im,residual\n");
    for z in &set.zeros {
        let _ = writeln!(
            csv,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            z.k, z.seed.re, z.seed.im, z.refined.re, z.refined.im, z.residual
        );
    }
    emit(out, &csv)
}

#[derive(Serialize)]
struct CountOutput<'a> {
    n: usize,
    a: f64,
    rmax: f64,
    complete_below: f64,
    nu_max: f64,
    vol_link: f64,
    provenance: &'a Provenance,
    measure_zero_asserted: bool,
    resonances: usize,
    report: CountReport,
}

fn link_spectrum(args: &CountArgs) -> std::result::Result<LinkSpectrum, Failure> {
    if args.link == "sphere" {
        let n = args.dim.unwrap_or(3);
        if n < 2 {
            return Err(usage(format!("--dim must be >= 2, got {n}")));
        }
        if !(args.c > 0.0 && args.c.is_finite()) {
            return Err(usage(format!("--c must be positive, got {}", args.c)));
        }
        Ok(sphere_spectrum(n, args.c, required_cutoff_mu(n, args.a, args.rmax))?)
    } else if let Some(path) = args.link.strip_prefix("file:") {
        let spec = load_spectrum(path.as_ref(), args.measure_zero_asserted)?;
        if let Some(n) = args.dim {
            if n != spec.n {
                return Err(usage(format!("--dim {n} disagrees with the file header n={}", spec.n)));
            }
        }
        Ok(spec)
    } else {
        Err(usage(format!("--link must be `sphere` or `file:<path>`, got `{}`", args.link)))
    }
}

fn parse_sector(s: &str) -> std::result::Result<(f64, f64, f64), Failure> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || usage(format!("--sector wants r:theta1:theta2, got `{s}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let v: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad())?;
    if !(v[0] > 0.0 && v[1] <= v[2]) {
        return Err(bad());
    }
    Ok((v[0], v[1], v[2]))
}

fn cmd_count(args: &CountArgs) -> Outcome {
    if !(args.rmax > 0.0 && args.rmax.is_finite()) {
        return Err(usage(format!("--rmax must be positive, got {}", args.rmax)));
    }
    if !(args.a > 0.0 && args.a.is_finite()) {
        return Err(usage(format!("--a must be positive, got {}", args.a)));
    }
    let radii: Vec<f64> = if args.radii.is_empty() {
        [1.0 / 3.0, 0.5, 2.0 / 3.0, 5.0 / 6.0, 1.0].iter().map(|f| f * args.rmax).collect()
    } else {
        args.radii.clone()
    };
    if let Some(r) = radii.iter().find(|r| !(**r > 0.0 && **r <= args.rmax)) {
        return Err(usage(format!("radius {r} outside (0, rmax = {}]", args.rmax)));
    }
    let sectors = args
        .sector
        .iter()
        .map(|s| parse_sector(s))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let spec = link_spectrum(args)?;
    let set = resonances(&spec, args.a, args.rmax)?;
    let report = count_report(&set, &radii, &sectors)?;
    let asserted = match &spec.provenance {
        Provenance::File { measure_zero_asserted } => *measure_zero_asserted,
        // every geodesic of the round sphere is closed
        Provenance::Sphere { .. } => false,
    };
    let output = CountOutput {
        n: spec.n,
        a: set.a,
        rmax: set.rmax,
        complete_below: set.complete_below,
        nu_max: set.nu_max,
        vol_link: spec.vol_link,
        provenance: &spec.provenance,
        measure_zero_asserted: asserted,
        resonances: set.items.len(),
        report,
    };
    if let Some(path) = &args.csv {
        emit(&Some(path.clone()), &to_csv(&set))?;
    }
    emit(&args.out, &json(&output))
}

fn cmd_fit(samples: &PathBuf, dim: usize, vol: f64, out: &Option<PathBuf>) -> Outcome {
    if dim < 2 {
        return Err(usage(format!("--dim must be >= 2, got {dim}")));
    }
    if !(vol > 0.0 && vol.is_finite()) {
        return Err(usage(format!("--vol must be positive, got {vol}")));
    }
    let text = std::fs::read_to_string(samples)
        .map_err(|e| usage(format!("cannot read {}: {e}", samples.display())))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.starts_with('r')) {
            continue;
        }
        let (r, c) = line
            .split_once(',')
            .ok_or_else(|| usage(format!("line {}: expected `r,count`", i + 1)))?;
        let r: f64 = r
            .trim()
            .parse()
            .map_err(|_| usage(format!("line {}: bad radius `{r}`", i + 1)))?;
        let c: u64 = c
            .trim()
            .parse()
            .map_err(|_| usage(format!("line {}: bad count `{c}`", i + 1)))?;
        rows.push((r, c));
    }
    let reference = an_constant(dim)?.value * vol;
    let report = weyl_fit(dim, &rows, reference)?;
    emit(out, &json(&report))
}

#[derive(Serialize)]
struct AnOutput {
    n: usize,
    #[serde(rename = "A_n")]
    a_n: f64,
    quadrature_error: f64,
    t0: f64,
    max_abs_z_on_boundary: f64,
}

fn cmd_an(dim: i64, out: &Option<PathBuf>) -> Outcome {
    if dim < 2 {
        return Err(usage(format!("--dim must be >= 2, got {dim}")));
    }
    let c = an_constant(dim as usize)?;
    let (_, (_, max_abs)) = abs_z_extremes_on_boundary();
    let output = AnOutput {
        n: c.n,
        a_n: c.value,
        quadrature_error: c.quadrature_error,
        t0: t0(),
        max_abs_z_on_boundary: max_abs,
    };
    emit(out, &json(&output))
}

#[derive(Serialize)]
struct KernelOutput {
    n: usize,
    nu: f64,
    a: f64,
    lambda_abs: f64,
    lambda_arg: f64,
    #[serde(flatten)]
    check: KernelCheck,
    second_order: bool,
    boundary_ok: bool,
    diagonal_ok: bool,
}

fn cmd_kernel_check(args: &KernelArgs) -> Outcome {
    if args.dim < 2 {
        return Err(usage(format!("--dim must be >= 2, got {}", args.dim)));
    }
    if !(args.nu >= 0.0 && args.nu.is_finite()) {
        return Err(usage(format!("--nu must be >= 0, got {}", args.nu)));
    }
    if !(args.h > 0.0 && args.h <= 0.25) {
        return Err(usage(format!("--h must lie in (0, 0.25], got {}", args.h)));
    }
    let lambda = ComplexPoint::new(args.lambda_abs, args.lambda_arg);
    let ctx = KernelContext::new(args.a, args.dim, Order::new(args.nu)?, lambda)?;
    let check = kernel_check(&ctx, args.h)?;
    let output = KernelOutput {
        n: args.dim,
        nu: args.nu,
        a: args.a,
        lambda_abs: args.lambda_abs,
        lambda_arg: args.lambda_arg,
        second_order: (3.0..=5.0).contains(&check.ratio),
        boundary_ok: check.boundary_value <= 10.0 * check.discretization_tolerance,
        diagonal_ok: check.diagonal_jump <= 1e-9,
        check,
    };
    let ok = output.second_order && output.boundary_ok && output.diagonal_ok;
    emit(&args.out, &json(&output))?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Core(Error::Validation("kernel checks failed, see report".into())))
    }
}

#[derive(Serialize)]
struct SpectrumSummary<'a> {
    n: usize,
    vol_link: f64,
    cutoff_mu: f64,
    nu_cutoff: f64,
    entries: usize,
    total_multiplicity: u64,
    resorted: bool,
    provenance: &'a Provenance,
    weyl_coefficient: f64,
    fitted_coefficient: Option<f64>,
}

fn cmd_spectrum(action: &SpectrumAction) -> Outcome {
    match action {
        SpectrumAction::Sphere { dim, c, cutoff, out } => {
            if *dim < 2 {
                return Err(usage(format!("--dim must be >= 2, got {dim}")));
            }
            if !(*cutoff >= 0.0 && cutoff.is_finite()) {
                return Err(usage(format!("--cutoff must be >= 0, got {cutoff}")));
            }
            let spec = sphere_spectrum(*dim, *c, *cutoff)?;
            emit(out, &format_spectrum(&spec))
        }
        SpectrumAction::Validate { file, out } => {
            let spec = load_spectrum(file, false)?;
            // fit on the upper part of the covered range when it is long enough
            let mus: Vec<f64> = (1..=5).map(|i| spec.cutoff_mu * (0.5 + 0.1 * i as f64)).collect();
            let fitted = if spec.cutoff_mu >= 10.0 {
                weyl_report(&spec, &mus).ok().map(|r| r.coefficient)
            } else {
                None
            };
            let summary = SpectrumSummary {
                n: spec.n,
                vol_link: spec.vol_link,
                cutoff_mu: spec.cutoff_mu,
                nu_cutoff: spec.nu_cutoff(),
                entries: spec.entries.len(),
                total_multiplicity: spec.entries.iter().map(|e| e.mult).sum(),
                resorted: spec.resorted,
                provenance: &spec.provenance,
                weyl_coefficient: spec.weyl_coefficient(),
                fitted_coefficient: fitted,
            };
            emit(out, &json(&summary))
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Zeros { nu, out } => cmd_zeros(*nu, out),
        Command::Count(args) => cmd_count(args),
        Command::Fit { samples, dim, vol, out } => cmd_fit(samples, *dim, *vol, out),
        Command::An { dim, out } => cmd_an(*dim, out),
        Command::KernelCheck(args) => cmd_kernel_check(args),
        Command::Spectrum { action } => cmd_spectrum(action),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(w) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w as usize).build_global() {
            eprintln!("cannot start {w} workers: {e}");
            return ExitCode::from(3);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("coneres: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
