mod failure;
mod report;
mod wdf;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gabor_tight::canonical::{canonical_dual, canonical_tight, Backend};
use gabor_tight::iterate::{self, InvSqrtMethod, IterationTrace, NewtonOptions, ScalingRule, Stopping};
use gabor_tight::{diagnostics, operator, verify, zak};
use gabor_tight::{FrameBounds, GaborSystem, Lattice, Signal};

use crate::failure::{Failure, EXIT_DISAGREE, EXIT_NOT_FRAME, EXIT_VERIFY};

#[derive(Parser)]
#[command(name = "gabor", version, about = "Canonical dual and tight windows of finite Gabor frames")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a Gaussian or seeded random window.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long = "L")]
        len: usize,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Keep the Gaussian samples of 2^(1/4) exp(-pi x^2) without renormalizing.
        #[arg(long)]
        unnormalized: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the frame bounds.
    Bounds {
        #[arg(long = "in")]
        input: PathBuf,
        /// Both backends are compared when omitted.
        #[arg(long, value_enum)]
        backend: Option<BoundsBackend>,
    },
    /// Compute the canonical dual window.
    Dual {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        backend: Option<DualBackend>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute the canonical tight window.
    Tight {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "direct")]
        method: Method,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Trace iterative methods against the directly computed tight window.
    Convergence {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        methods: Vec<String>,
        #[arg(long, default_value_t = 1e-14)]
        tol: f64,
        #[arg(long)]
        max_iter: Option<usize>,
        /// Written to standard output when omitted.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run the seeded invariant suite.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        instances: usize,
        /// Written to standard output when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, hide = true)]
        tamper: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Gaussian,
    Random,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BoundsBackend {
    Dense,
    Zz,
}

#[derive(Clone, Copy, ValueEnum)]
enum DualBackend {
    Dense,
    Zz,
    Cg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Direct,
    Zak,
    NewtonNorm,
    NewtonFrob,
    NewtonOpt,
    NewtonRaw,
    Sherif,
    Lakic,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::Zak => "zak",
            Method::NewtonNorm => "newton-norm",
            Method::NewtonFrob => "newton-frob",
            Method::NewtonOpt => "newton-opt",
            Method::NewtonRaw => "newton-raw",
            Method::Sherif => "sherif",
            Method::Lakic => "lakic",
        }
    }

    fn rule(self) -> Option<ScalingRule> {
        match self {
            Method::NewtonNorm => Some(ScalingRule::Norm),
            Method::NewtonFrob => Some(ScalingRule::Frobenius),
            Method::NewtonOpt => Some(ScalingRule::Optimal),
            Method::NewtonRaw => Some(ScalingRule::Unscaled),
            _ => None,
        }
    }

    fn matrix_method(self) -> Option<InvSqrtMethod> {
        match self {
            Method::Sherif => Some(InvSqrtMethod::Sherif),
            Method::Lakic => Some(InvSqrtMethod::Lakic),
            _ => None,
        }
    }

    fn default_max_iter(self) -> usize {
        if self.matrix_method().is_some() {
            100
        } else {
            50
        }
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn lattice_summary(lat: &Lattice) -> String {
    format!(
        "L={} a={} b={} N={} M={} p/q={}/{} R={}",
        lat.len(),
        lat.a(),
        lat.b(),
        lat.time_shifts(),
        lat.modulations(),
        lat.p(),
        lat.q(),
        lat.redundancy()
    )
}

fn cmd_gen(kind: Kind, lat: Lattice, seed: u64, unnormalized: bool, out: &Path) -> Result<(), Failure> {
    let window = match kind {
        Kind::Gaussian if unnormalized => Signal::sampled_gaussian(&lat),
        Kind::Gaussian => Signal::gaussian(&lat),
        Kind::Random if unnormalized => {
            return Err(Failure::usage("--unnormalized applies to the gaussian kind only"))
        }
        Kind::Random => Signal::random(&lat, seed),
    };
    let sys = GaborSystem::new(window, lat)?;
    wdf::write(out, &sys)?;
    println!("wrote {} ({})", out.display(), lattice_summary(sys.lattice()));
    Ok(())
}

fn require_frame(fb: FrameBounds) -> Result<FrameBounds, Failure> {
    if fb.is_frame() {
        Ok(fb)
    } else {
        Err(Failure::new(
            EXIT_NOT_FRAME,
            format!("not a frame: A = {:e} (B = {:e})", fb.lower, fb.upper),
        ))
    }
}

fn cmd_bounds(input: &Path, backend: Option<BoundsBackend>) -> Result<(), Failure> {
    let sys = wdf::read(input)?;
    let dense = || {
        let (lower, upper) = operator::dense(&sys).spectral_bounds();
        FrameBounds { lower, upper }
    };
    let zz = || zak::zz_frame_bounds(&sys);
    println!("{}", lattice_summary(sys.lattice()));
    match backend {
        Some(BoundsBackend::Dense) => {
            let fb = require_frame(dense())?;
            println!("dense A={:e} B={:e}", fb.lower, fb.upper);
        }
        Some(BoundsBackend::Zz) => {
            let fb = require_frame(zz())?;
            println!("zz A={:e} B={:e}", fb.lower, fb.upper);
        }
        None => {
            let (d, z) = (dense(), zz());
            let scale = d.upper.abs().max(1.0);
            let gap = (d.lower - z.lower).abs().max((d.upper - z.upper).abs());
            if gap > 1e-9 * scale {
                return Err(Failure::new(
                    EXIT_DISAGREE,
                    format!(
                        "backends disagree: dense A={:e} B={:e}, zz A={:e} B={:e}",
                        d.lower, d.upper, z.lower, z.upper
                    ),
                ));
            }
            require_frame(d)?;
            println!("dense A={:e} B={:e}", d.lower, d.upper);
            println!("zz A={:e} B={:e}", z.lower, z.upper);
        }
    }
    Ok(())
}

fn cmd_dual(input: &Path, backend: Option<DualBackend>, out: &Path) -> Result<(), Failure> {
    let sys = wdf::read(input)?;
    let backend = match backend {
        Some(DualBackend::Dense) => Backend::Dense,
        Some(DualBackend::Zz) => Backend::Zz,
        Some(DualBackend::Cg) => Backend::ConjugateGradientFree,
        None => Backend::auto(sys.lattice()),
    };
    let dual = canonical_dual(&sys, backend)?;
    let pairing = sys.window().inner(&dual).re;
    let out_sys = sys.with_window(dual)?;
    wdf::write(out, &out_sys)?;
    println!(
        "backend={backend:?} norm={:e} <g,dual>={:e} 1/R={:e}",
        out_sys.window().norm(),
        pairing,
        sys.lattice().inverse_redundancy()
    );
    Ok(())
}

struct TightResult {
    window: Signal,
    iterations: usize,
    trace: Option<IterationTrace>,
}

fn run_method(
    sys: &GaborSystem,
    method: Method,
    tol: f64,
    max_iter: usize,
    stopping: Stopping,
) -> Result<TightResult, Failure> {
    if let Some(rule) = method.rule() {
        let opts = NewtonOptions {
            rule,
            tol,
            max_iter,
            backend: Backend::auto(sys.lattice()),
            stopping,
            record_bounds: true,
        };
        let run = iterate::newton_tight(sys, &opts)?.into_converged()?;
        return Ok(TightResult {
            window: run.tight,
            iterations: run.trace.iterations(),
            trace: Some(run.trace),
        });
    }
    if let Some(m) = method.matrix_method() {
        let out = iterate::tight_via_inv_sqrt(sys, m, tol, max_iter, &stopping)?;
        return Ok(TightResult {
            window: out.tight,
            iterations: out.trace.iterations(),
            trace: Some(out.trace),
        });
    }
    let window = match method {
        Method::Zak => zak::zak_tight_integer(sys)?,
        _ => canonical_tight(sys, Backend::auto(sys.lattice()))?,
    };
    Ok(TightResult {
        window,
        iterations: 0,
        trace: None,
    })
}

fn cmd_tight(input: &Path, method: Method, tol: f64, max_iter: Option<usize>, out: &Path) -> Result<(), Failure> {
    if !(tol > 0.0) {
        return Err(Failure::usage("--tol must be positive"));
    }
    let sys = wdf::read(input)?;
    let max_iter = max_iter.unwrap_or(method.default_max_iter());
    let result = run_method(&sys, method, tol, max_iter, Stopping::Successive)?;
    let residual = diagnostics::tightness_residual(&result.window, sys.lattice())?;
    wdf::write(out, &sys.with_window(result.window)?)?;
    println!(
        "method={} iterations={} residual={residual:e}",
        method.name(),
        result.iterations
    );
    Ok(())
}

fn parse_method(name: &str) -> Result<Method, Failure> {
    let method = Method::from_str(name.trim(), false)
        .map_err(|_| Failure::usage(format!("unknown method '{name}'")))?;
    if method.rule().is_none() && method.matrix_method().is_none() {
        return Err(Failure::usage(format!("'{name}' is not an iterative method")));
    }
    Ok(method)
}

fn cmd_convergence(
    input: &Path,
    names: &[String],
    tol: f64,
    max_iter: Option<usize>,
    csv: Option<&Path>,
) -> Result<(), Failure> {
    if !(tol > 0.0) {
        return Err(Failure::usage("--tol must be positive"));
    }
    let methods = names.iter().map(|n| parse_method(n)).collect::<Result<Vec<_>, _>>()?;
    let sys = wdf::read(input)?;
    let reference = canonical_tight(&sys, Backend::auto(sys.lattice()))?;
    let mut text = String::new();
    let mut summary = Vec::new();
    for method in methods {
        let max_iter = max_iter.unwrap_or(method.default_max_iter());
        let result = run_method(&sys, method, tol, max_iter, Stopping::Reference(reference.clone()))?;
        let trace = result.trace.expect("iterative methods record a trace");
        let order = trace.convergence_order().unwrap_or(f64::NAN);
        text.push_str(&format!(
            "# method={} iterations={} order={order:e}\n",
            method.name(),
            result.iterations
        ));
        text.push_str(&trace.to_csv());
        text.push('\n');
        summary.push(format!(
            "{}: iterations={} order={order:.4} final_error={:e}",
            method.name(),
            result.iterations,
            trace.final_error()
        ));
    }
    match csv {
        Some(path) => {
            write_text(path, &text)?;
            for line in summary {
                println!("{line}");
            }
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_verify(seed: u64, instances: usize, report: Option<&Path>, tamper: bool) -> Result<(), Failure> {
    let opts = verify::SuiteOptions {
        seed,
        instances,
        tamper,
    };
    let outcomes = verify::run_suite(&opts)?;
    let all_pass = verify::all_pass(&outcomes);
    let json = report::render(seed, instances, &outcomes);
    match report {
        Some(path) => {
            write_text(path, &json)?;
            println!(
                "{} checks on {instances} instances, {} failed",
                outcomes.len(),
                outcomes.iter().filter(|c| !c.pass).count()
            );
        }
        None => print!("{json}"),
    }
    if all_pass {
        Ok(())
    } else {
        let failed: Vec<String> = outcomes
            .iter()
            .filter(|c| !c.pass)
            .map(|c| format!("{} (seed {})", c.name, c.seed))
            .collect();
        Err(Failure::new(EXIT_VERIFY, format!("failed checks: {}", failed.join(", "))))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Gen {
            kind,
            len,
            a,
            b,
            seed,
            unnormalized,
            out,
        } => cmd_gen(kind, Lattice::new(len, a, b)?, seed, unnormalized, &out),
        Command::Bounds { input, backend } => cmd_bounds(&input, backend),
        Command::Dual { input, backend, out } => cmd_dual(&input, backend, &out),
        Command::Tight {
            input,
            method,
            tol,
            max_iter,
            out,
        } => cmd_tight(&input, method, tol, max_iter, &out),
        Command::Convergence {
            input,
            methods,
            tol,
            max_iter,
            csv,
        } => cmd_convergence(&input, &methods, tol, max_iter, csv.as_deref()),
        Command::Verify {
            seed,
            instances,
            report,
            tamper,
        } => cmd_verify(seed, instances, report.as_deref(), tamper),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("gabor: {f}");
            ExitCode::from(f.code)
        }
    }
}
