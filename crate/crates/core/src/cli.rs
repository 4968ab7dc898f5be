//! Command-line front end writing CSV tables.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};

use crate::check::run_checks;
use crate::error::Result;
use crate::finite_n::{self, ExactModel};
use crate::laxpair::solve_psi;
use crate::montecarlo::{self, DosScaling, TridiagonalSpectrumSampler};
use crate::numerics::special::{psi_amplitude, tw2_tail_constant, ZETA_PRIME_MINUS_ONE};
use crate::numerics::Grid;
use crate::painleve::{self, PainleveTable, DEFAULT_NODES, DEFAULT_TOL, DEFAULT_X_MAX, DEFAULT_X_MIN};
use crate::scaling::{self, CurveKind, DEFAULT_EXACT_LIMIT};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "gue-crowding", version, about = "Near-maximum eigenvalue statistics of GUE matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "GUE_CROWDING_THREADS")]
    pub threads: Option<usize>,
    /// Output file (default: standard output).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Newton tolerance of the Painlevé table.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FiniteNQuantity {
    Dos,
    Gap,
    All,
    Cdf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SampleQuantity {
    Gap,
    DosEdge,
    DosBulk,
    LambdaMax,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hastings–McLeod solution, R and F₂ on a regular x grid.
    TabulatePainleve {
        #[arg(long, default_value_t = 0.05)]
        step: f64,
    },
    /// Lax-pair functions at one spectral parameter.
    TabulatePsi {
        /// Spectral parameter r̃ (negative for the gap branch).
        #[arg(long, allow_negative_numbers = true)]
        r: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
    },
    /// Edge scaling function of the density below the maximum.
    DosEdge {
        #[arg(long, default_value_t = 8.0)]
        rmax: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long, default_value_t = DEFAULT_EXACT_LIMIT)]
        exact_limit: f64,
    },
    /// Edge scaling function of the first gap.
    GapPdf {
        #[arg(long, default_value_t = 8.0)]
        rmax: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long, default_value_t = DEFAULT_EXACT_LIMIT)]
        exact_limit: f64,
    },
    /// Semicircle seen from the largest eigenvalue.
    DosBulk {
        #[arg(long, default_value_t = 2.0 * std::f64::consts::SQRT_2)]
        rmax: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
    /// Exact finite-N density, gap density or largest-eigenvalue CDF.
    FiniteN {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, value_enum, default_value_t = FiniteNQuantity::All)]
        quantity: FiniteNQuantity,
        #[arg(long, default_value_t = 5.0)]
        rmax: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
    },
    /// Monte Carlo histograms from the tridiagonal model.
    Sample {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 200_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = SampleQuantity::Gap)]
        quantity: SampleQuantity,
        #[arg(long, default_value_t = montecarlo::DEFAULT_BINS)]
        bins: usize,
        /// Upper end of the histogram (default depends on the quantity).
        #[arg(long)]
        rmax: Option<f64>,
    },
    /// Constants of the asymptotic expansions.
    Asymptotics,
    /// Run the self-check suite; exits nonzero on any failure.
    Check,
}

/// Rejected argument combination, reported with usage text.
struct Invalid(String);

fn positive(name: &str, v: f64) -> std::result::Result<(), Invalid> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Invalid(format!("--{name} must be positive and finite, got {v}")))
    }
}

fn grid_spec(rmax: f64, step: f64) -> std::result::Result<(), Invalid> {
    positive("rmax", rmax)?;
    positive("step", step)?;
    if step > rmax {
        return Err(Invalid("--step must not exceed --rmax".into()));
    }
    Ok(())
}

impl Cli {
    /// Check every parameter before any computation starts.
    fn validate(&self) -> std::result::Result<(), Invalid> {
        if self.threads == Some(0) {
            return Err(Invalid("--threads must be at least 1".into()));
        }
        if !(self.tol >= DEFAULT_TOL && self.tol < 1e-2) {
            return Err(Invalid(format!("--tol must lie in [{DEFAULT_TOL:e}, 1e-2)")));
        }
        match &self.command {
            Command::TabulatePainleve { step } => positive("step", *step),
            Command::TabulatePsi { r, step } => {
                positive("step", *step)?;
                if r.abs() > crate::laxpair::MAX_ABS_R {
                    return Err(Invalid(format!("|--r| must not exceed {}", crate::laxpair::MAX_ABS_R)));
                }
                Ok(())
            }
            Command::DosEdge { rmax, step, exact_limit } | Command::GapPdf { rmax, step, exact_limit } => {
                grid_spec(*rmax, *step)?;
                if !(0.0..=crate::laxpair::MAX_ABS_R).contains(exact_limit) {
                    return Err(Invalid(format!("--exact-limit must lie in [0, {}]", crate::laxpair::MAX_ABS_R)));
                }
                Ok(())
            }
            Command::DosBulk { rmax, step } => grid_spec(*rmax, *step),
            Command::FiniteN { n, quantity, rmax, step } => {
                grid_spec(*rmax, *step)?;
                let min = if *quantity == FiniteNQuantity::Cdf { 1 } else { 2 };
                if *n < min || *n > finite_n::MAX_N {
                    return Err(Invalid(format!("--n must lie in [{min}, {}]", finite_n::MAX_N)));
                }
                Ok(())
            }
            Command::Sample { n, samples, bins, rmax, quantity, .. } => {
                let min = if *quantity == SampleQuantity::LambdaMax { 1 } else { 2 };
                if *n < min {
                    return Err(Invalid(format!("--n must be at least {min}")));
                }
                if *samples < 1 || *bins < 1 {
                    return Err(Invalid("--samples and --bins must be at least 1".into()));
                }
                if let Some(r) = rmax {
                    positive("rmax", *r)?;
                }
                Ok(())
            }
            Command::Asymptotics | Command::Check => Ok(()),
        }
    }

    fn needs_table(&self) -> bool {
        matches!(
            self.command,
            Command::TabulatePainleve { .. }
                | Command::TabulatePsi { .. }
                | Command::DosEdge { .. }
                | Command::GapPdf { .. }
                | Command::Asymptotics
                | Command::Check
        )
    }
}

fn header(out: &mut String, command: &str, params: &str) {
    let _ = writeln!(out, "# gue-crowding {VERSION}");
    let _ = writeln!(out, "# command: {command}");
    let _ = writeln!(out, "# parameters: {params}");
}

fn grid_points(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| lo + step * i as f64).collect()
}

fn tabulate_painleve(t: &PainleveTable, step: f64, tol: f64) -> String {
    let mut out = String::new();
    header(&mut out, "tabulate-painleve", &format!("step={step} tol={tol:e} x_min={} x_max={}", t.x_min(), t.x_max()));
    out.push_str("x,q,q_prime,R,F2\n");
    for x in grid_points(t.x_min(), t.x_max(), step) {
        let _ = writeln!(
            out,
            "{x},{},{},{},{}",
            t.q.interp(x),
            t.q_prime.interp(x),
            t.q_sq_tail.interp(x),
            t.tw_cdf.interp(x)
        );
    }
    out
}

fn tabulate_psi(t: &PainleveTable, r: f64, step: f64, tol: f64) -> Result<String> {
    let psi = solve_psi(r, t)?;
    let mut out = String::new();
    header(&mut out, "tabulate-psi", &format!("r={r} step={step} tol={tol:e}"));
    out.push_str("x,f,f_prime,g,overlap\n");
    for x in grid_points(t.x_min(), t.x_max(), step) {
        let _ = writeln!(
            out,
            "{x},{},{},{},{}",
            psi.f.interp(x),
            psi.f_prime.interp(x),
            psi.g.interp(x),
            psi.overlap.interp(x)
        );
    }
    Ok(out)
}

fn curve(
    t: &PainleveTable,
    kind: CurveKind,
    name: &str,
    rmax: f64,
    step: f64,
    exact_limit: f64,
    tol: f64,
) -> Result<String> {
    let c = scaling::tabulate_curve(kind, rmax, step, exact_limit, t)?;
    let mut out = String::new();
    header(&mut out, name, &format!("rmax={rmax} step={step} exact_limit={exact_limit} tol={tol:e}"));
    out.push_str("r_tilde,value,asymptotic_small,asymptotic_large\n");
    for i in 0..c.r_values.len() {
        let _ = writeln!(out, "{},{},{},{}", c.r_values[i], c.values[i], c.asymptotic_small[i], c.asymptotic_large[i]);
    }
    Ok(out)
}

fn finite_n_table(n: usize, quantity: FiniteNQuantity, rmax: f64, step: f64) -> Result<String> {
    let mut out = String::new();
    let name = format!("{quantity:?}").to_lowercase();
    header(&mut out, "finite-n", &format!("n={n} quantity={name} rmax={rmax} step={step}"));
    if quantity == FiniteNQuantity::Cdf {
        out.push_str("y,F_N\n");
        let edge = (2.0 * n as f64).sqrt();
        for y in grid_points(-rmax, edge + rmax, step) {
            let _ = writeln!(out, "{y},{}", finite_n::cdf_lambda_max(y, n)?);
        }
        return Ok(out);
    }
    let model = ExactModel::new(n)?;
    match quantity {
        FiniteNQuantity::Dos => out.push_str("r,dos\n"),
        FiniteNQuantity::Gap => out.push_str("r,gap_pdf\n"),
        _ => out.push_str("r,dos,gap_pdf\n"),
    }
    for r in grid_points(0.0, rmax, step) {
        let _ = match quantity {
            FiniteNQuantity::Dos => writeln!(out, "{r},{}", model.dos(r)),
            FiniteNQuantity::Gap => writeln!(out, "{r},{}", model.gap_pdf(r)),
            _ => writeln!(out, "{r},{},{}", model.dos(r), model.gap_pdf(r)),
        };
    }
    Ok(out)
}

fn sample_table(
    n: usize,
    samples: usize,
    seed: u64,
    quantity: SampleQuantity,
    bins: usize,
    rmax: Option<f64>,
) -> Result<String> {
    let sampler = TridiagonalSpectrumSampler::new(n, seed)?;
    let f = montecarlo::edge_factor(n);
    let (hist, rejected) = match quantity {
        SampleQuantity::Gap => {
            let hi = rmax.unwrap_or(6.0);
            let b = sampler.sample_with(samples, |m| montecarlo::top_k_eigenvalues(m, 2))?;
            (montecarlo::empirical_gap(&b.draws, n, (0.0, hi), bins)?, b.rejected.len())
        }
        SampleQuantity::DosEdge => {
            let hi = rmax.unwrap_or(6.0);
            let b = sampler.sample_top(samples, 1.05 * hi / f, 2)?;
            (montecarlo::empirical_dos(&b.draws, DosScaling::Edge, n, (0.0, hi), bins)?, b.rejected.len())
        }
        SampleQuantity::DosBulk => {
            let hi = rmax.unwrap_or(2.0 * std::f64::consts::SQRT_2);
            let b = sampler.sample_spectrum(samples)?;
            (montecarlo::empirical_dos(&b.draws, DosScaling::Bulk, n, (0.0, hi), bins)?, b.rejected.len())
        }
        SampleQuantity::LambdaMax => {
            let hi = rmax.unwrap_or(4.0);
            let b = sampler.sample_with(samples, |m| montecarlo::top_k_eigenvalues(m, 1))?;
            let xs = montecarlo::scaled_lambda_max(&b.draws, n)?;
            let mut h = montecarlo::Histogram::new(-8.0, hi, bins, 1.0)?;
            for x in xs {
                h.add_sample([x]);
            }
            (h, b.rejected.len())
        }
    };
    let mut out = String::new();
    let name = format!("{quantity:?}").to_lowercase();
    header(&mut out, "sample", &format!("n={n} samples={samples} quantity={name} bins={bins}"));
    let _ = writeln!(out, "# seed: {seed}");
    let _ = writeln!(out, "# run: n={n} seed={seed} count={samples} rejected={rejected}");
    out.push_str("bin_center,density,stderr\n");
    let (c, d, s) = (hist.bin_centers(), hist.densities(), hist.stderr());
    for i in 0..c.len() {
        let _ = writeln!(out, "{},{},{}", c[i], d[i], s[i]);
    }
    Ok(out)
}

fn asymptotics(t: &PainleveTable, tol: f64) -> String {
    let mut out = String::new();
    header(&mut out, "asymptotics", &format!("tol={tol:e}"));
    out.push_str("name,value\n");
    let rows = [
        ("a2", painleve::a2_integral(t)),
        ("a4", scaling::a4_integral(t).value),
        ("gap_tail_constant", scaling::gap_tail_constant()),
        ("tw2_left_tail_constant", tw2_tail_constant()),
        ("tw2_mean", painleve::tracy_widom_mean(t)),
        ("psi_amplitude", psi_amplitude()),
        ("zeta_prime_minus_one", ZETA_PRIME_MINUS_ONE),
    ];
    for (name, v) in rows {
        let _ = writeln!(out, "{name},{v}");
    }
    out
}

/// Outcome of a subcommand: CSV text, or check lines with their verdict.
enum Output {
    Csv(String),
    Check { text: String, passed: bool },
}

fn execute(cli: &Cli, table: Option<&PainleveTable>) -> Result<Output> {
    let t = || table.expect("table built for this command");
    let tol = cli.tol;
    let csv = match &cli.command {
        Command::TabulatePainleve { step } => tabulate_painleve(t(), *step, tol),
        Command::TabulatePsi { r, step } => tabulate_psi(t(), *r, *step, tol)?,
        Command::DosEdge { rmax, step, exact_limit } => {
            curve(t(), CurveKind::DosEdge, "dos-edge", *rmax, *step, *exact_limit, tol)?
        }
        Command::GapPdf { rmax, step, exact_limit } => {
            curve(t(), CurveKind::GapTyp, "gap-pdf", *rmax, *step, *exact_limit, tol)?
        }
        Command::DosBulk { rmax, step } => {
            let c = scaling::tabulate_curve(CurveKind::DosBulk, *rmax, *step, 0.0, PainleveTable::shared())?;
            let mut out = String::new();
            header(&mut out, "dos-bulk", &format!("rmax={rmax} step={step}"));
            out.push_str("r_tilde,value,asymptotic_small,asymptotic_large\n");
            for i in 0..c.r_values.len() {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    c.r_values[i], c.values[i], c.asymptotic_small[i], c.asymptotic_large[i]
                );
            }
            out
        }
        Command::FiniteN { n, quantity, rmax, step } => finite_n_table(*n, *quantity, *rmax, *step)?,
        Command::Sample { n, samples, seed, quantity, bins, rmax } => {
            sample_table(*n, *samples, *seed, *quantity, *bins, *rmax)?
        }
        Command::Asymptotics => asymptotics(t(), tol),
        Command::Check => {
            let outcomes = run_checks(t());
            let mut text = String::new();
            for c in &outcomes {
                let _ = writeln!(text, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            return Ok(Output::Check { text, passed: outcomes.iter().all(|c| c.passed) });
        }
    };
    Ok(Output::Csv(csv))
}

fn build_table(tol: f64) -> Result<PainleveTable> {
    if tol == DEFAULT_TOL {
        return Ok(PainleveTable::shared().clone());
    }
    painleve::solve_hastings_mcleod(Grid::new(DEFAULT_X_MIN, DEFAULT_X_MAX, DEFAULT_NODES)?, tol)
}

fn usage_error(message: &str) -> i32 {
    let err = Cli::command().error(ErrorKind::ValueValidation, message);
    eprintln!("{}", err.render());
    2
}

/// Parse `args`, run the subcommand and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Err(Invalid(msg)) = cli.validate() {
        return usage_error(&msg);
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        pool = pool.num_threads(t);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: could not start worker threads: {e}");
            return 1;
        }
    };
    let result = pool.install(|| {
        let table = if cli.needs_table() { Some(build_table(cli.tol)?) } else { None };
        execute(&cli, table.as_ref())
    });
    let (text, code) = match result {
        Ok(Output::Csv(s)) => (s, 0),
        Ok(Output::Check { text, passed }) => (text, if passed { 0 } else { 1 }),
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return 1;
            }
        }
        None => print!("{text}"),
    }
    code
}
