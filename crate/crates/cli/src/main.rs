use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fracspeed::invasion::{
    run_experiment, thresholds, ExperimentConfig, ExperimentReport, OutputFormat, ProfileKind, Route, SpeedProfile,
    DEFAULT_SAMPLES, DEFAULT_T_END, DEFAULT_T_START,
};
use fracspeed::kernels::{classical_kernel, FracParams, KernelValue};
use fracspeed::specfun::{mittag_leffler, wright_neg};
use fracspeed::subordination::{subordinate, subordinate_envelope, QuadratureSpec};
use fracspeed::verify::{default_tolerances, run_suite, SuiteName, SuiteReport, TolOverrides};
use fracspeed::{EvalPolicy, EvalResult, LogValue};

const EXIT_USAGE: u8 = 1;
const EXIT_COMPUTE: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(name = "fracspeed", version, about = "Fundamental solutions and invasion speeds of fractional reaction-diffusion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a special function
    #[command(subcommand)]
    Eval(EvalCmd),
    /// Classical (alpha = 1) kernel at radius r
    Kernel {
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        dim: u32,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        r: f64,
    },
    /// Fundamental solution u(t, r)
    Solution {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        dim: u32,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        r: f64,
        #[arg(long, value_enum, default_value = "subordination")]
        method: RouteArg,
    },
    /// Sample u along a speed profile and classify it
    Invade(InvadeArgs),
    /// Invasion-speed thresholds
    Thresholds {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        dim: u32,
    },
    /// Run a verification suite
    Verify {
        /// ml-identities, wright-identities, estimate-lemmas, leibniz-properties,
        /// subordination, representations, asymptotics or all
        #[arg(long)]
        suite: String,
        #[arg(long)]
        json: bool,
        /// Tolerance override NAME=VALUE (exploratory runs only)
        #[arg(long = "tol", value_name = "NAME=VALUE")]
        tol: Vec<String>,
    },
}

#[derive(Subcommand)]
enum EvalCmd {
    /// Mittag-Leffler E_{alpha,beta}(z)
    Ml {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, allow_negative_numbers = true)]
        z: f64,
    },
    /// Wright W_{-nu,mu}(z) for z <= 0
    Wright {
        #[arg(long)]
        nu: f64,
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, allow_negative_numbers = true)]
        z: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteArg {
    Subordination,
    Fourier1d,
    Envelope,
}

impl From<RouteArg> for Route {
    fn from(r: RouteArg) -> Self {
        match r {
            RouteArg::Subordination => Route::Subordination,
            RouteArg::Fourier1d => Route::Fourier1d,
            RouteArg::Envelope => Route::Envelope,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Power,
    Exponential,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct InvadeArgs {
    /// JSON experiment config; excludes the inline flags
    #[arg(long, conflicts_with_all = ["alpha", "rho", "dim", "profile", "m", "beta", "t_start", "t_end", "n_samples", "method", "output", "format"])]
    config: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    dim: Option<u32>,
    #[arg(long, value_enum)]
    profile: Option<KindArg>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    t_start: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    n_samples: Option<usize>,
    #[arg(long, value_enum)]
    method: Option<RouteArg>,
    /// Output file; `-` or empty writes to stdout
    #[arg(long)]
    output: Option<String>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

/// Bad input from the command line; exits with status 1.
#[derive(Debug)]
struct Usage {
    flag: String,
    msg: String,
}

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} ({})", self.msg, self.flag)
    }
}

impl std::error::Error for Usage {}

fn usage(flag: &str, msg: impl Into<String>) -> anyhow::Error {
    Usage { flag: flag.to_string(), msg: msg.into() }.into()
}

fn require(flag: &str, ok: bool, what: &str, value: impl std::fmt::Display) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(usage(flag, format!("{flag} must be {what}, got {value}")))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    require("--alpha", alpha > 0.0 && alpha <= 1.0, "in (0, 1]", alpha)
}

fn check_params(alpha: f64, rho: f64, dim: u32) -> Result<()> {
    check_alpha(alpha)?;
    require("--rho", rho > 0.0 && rho.is_finite(), "positive", rho)?;
    require("--dim", dim >= 1, "at least 1", dim)
}

fn check_t_r(t: f64, r: f64) -> Result<()> {
    require("--t", t > 0.0 && t.is_finite(), "positive", t)?;
    require("--r", r >= 0.0 && r.is_finite(), "non-negative", r)
}

/// `x` with ten significant digits.
fn sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..10).contains(&mag) {
        format!("{:.*}", (9 - mag).max(0) as usize, x)
    } else {
        format!("{x:.9e}")
    }
}

fn sign_str(v: &LogValue) -> &'static str {
    match v.sign() {
        fracspeed::Sign::Pos => "pos",
        fracspeed::Sign::Neg => "neg",
        fracspeed::Sign::Zero => "zero",
    }
}

fn log_pair(v: &LogValue) -> String {
    format!("sign {} log_abs {}", sign_str(v), sig(v.log_abs()))
}

fn eval_lines(r: &EvalResult) -> String {
    format!(
        "value {}\nabs_error_bound {}\nterms_used {}\nregime {:?}\n",
        sig(r.value),
        sig(r.abs_error_bound),
        r.terms_used,
        r.regime
    )
}

fn run(cli: Cli) -> Result<u8> {
    let mut out = String::new();
    let code = match cli.command {
        Command::Eval(EvalCmd::Ml { alpha, beta, z }) => {
            check_alpha(alpha)?;
            require("--beta", beta > 0.0 && beta.is_finite(), "positive", beta)?;
            require("--z", z.is_finite(), "finite", z)?;
            out += &eval_lines(&mittag_leffler(alpha, beta, z, &EvalPolicy::default())?);
            0
        }
        Command::Eval(EvalCmd::Wright { nu, mu, z }) => {
            require("--nu", nu > 0.0 && nu < 1.0, "in (0, 1)", nu)?;
            require("--mu", mu.is_finite(), "finite", mu)?;
            require("--z", z <= 0.0 && z.is_finite(), "finite and <= 0", z)?;
            out += &eval_lines(&wright_neg(nu, mu, z, &EvalPolicy::default())?);
            0
        }
        Command::Kernel { rho, dim, t, r } => {
            check_params(1.0, rho, dim)?;
            check_t_r(t, r)?;
            match classical_kernel(rho, dim, t, r)? {
                KernelValue::Exact(v) => writeln!(out, "exact {}", log_pair(&v))?,
                KernelValue::Envelope(e) => {
                    writeln!(out, "lower {}", log_pair(&e.lower))?;
                    writeln!(out, "upper {}", log_pair(&e.upper))?;
                }
            }
            0
        }
        Command::Solution { alpha, rho, dim, t, r, method } => {
            check_params(alpha, rho, dim)?;
            check_t_r(t, r)?;
            let spec = QuadratureSpec::default();
            match method {
                RouteArg::Subordination => {
                    let v = subordinate(&FracParams::new(alpha, rho, dim)?, t, r, &spec)?;
                    writeln!(out, "u {}", log_pair(&v))?;
                }
                RouteArg::Fourier1d => {
                    require("--dim", dim == 1, "1 for fourier1d", dim)?;
                    require("--rho", rho >= 1.0, ">= 1 for fourier1d", rho)?;
                    let (v, e, terms, _) = fracspeed::fourier1d::log_solution(alpha, rho, t, r, 1e-10)?;
                    writeln!(out, "u {}", log_pair(&v))?;
                    writeln!(out, "abs_error_bound {}", log_pair(&e))?;
                    writeln!(out, "terms_used {terms}")?;
                }
                RouteArg::Envelope => {
                    let e = subordinate_envelope(alpha, rho, dim, t, r, &spec)?;
                    writeln!(out, "lower {}", log_pair(&e.lower))?;
                    writeln!(out, "upper {}", log_pair(&e.upper))?;
                }
            }
            0
        }
        Command::Thresholds { alpha, rho, dim } => {
            require("--alpha", alpha > 0.0 && alpha < 1.0, "in (0, 1)", alpha)?;
            check_params(alpha, rho, dim)?;
            let th = thresholds(alpha, rho, dim)?;
            writeln!(out, "gamma_alpha {}", sig(th.gamma_alpha))?;
            writeln!(out, "m_alpha {}", th.m_alpha)?;
            writeln!(out, "power_lower {}", sig(th.power_lower))?;
            writeln!(out, "power_upper {}", sig(th.power_upper))?;
            writeln!(out, "exp_lower {}", sig(th.exp_lower))?;
            writeln!(out, "exp_upper {}", sig(th.exp_upper))?;
            0
        }
        Command::Invade(args) => invade(args, &mut out)?,
        Command::Verify { suite, json, tol } => {
            let name: SuiteName = suite.parse().map_err(|_| usage("--suite", format!("unknown suite '{suite}'")))?;
            let overrides = parse_tol(&tol)?;
            let report = run_suite(name, Some(&overrides));
            if json {
                out += &serde_json::to_string_pretty(&report)?;
                out.push('\n');
            } else {
                print_suite(&report, &mut out)?;
            }
            if report.passed() {
                0
            } else {
                EXIT_VERIFY
            }
        }
    };
    std::io::stdout().write_all(out.as_bytes())?;
    Ok(code)
}

fn parse_tol(items: &[String]) -> Result<TolOverrides> {
    let known = default_tolerances();
    let mut map = TolOverrides::new();
    for item in items {
        let (k, v) = item.split_once('=').ok_or_else(|| usage("--tol", format!("expected NAME=VALUE, got '{item}'")))?;
        if !known.contains_key(k) {
            let names: Vec<&str> = known.keys().copied().collect();
            return Err(usage("--tol", format!("unknown tolerance '{k}' (known: {})", names.join(", "))));
        }
        let v: f64 = v.parse().map_err(|_| usage("--tol", format!("'{v}' is not a number")))?;
        require("--tol", v >= 0.0 && v.is_finite(), "a finite non-negative number", v)?;
        map.insert(k.to_string(), v);
    }
    Ok(map)
}

fn print_suite(r: &SuiteReport, out: &mut String) -> Result<()> {
    let status = if r.passed() { "PASS" } else { "FAIL" };
    writeln!(
        out,
        "{status} {} {}/{} worst_rel_error {} at {}",
        r.suite_name,
        r.cases_passed,
        r.cases_run,
        sig(r.worst_rel_error),
        if r.worst_case_inputs.is_empty() { "-" } else { &r.worst_case_inputs }
    )?;
    for s in &r.suites {
        print_suite(s, out)?;
    }
    if r.suites.is_empty() {
        for f in &r.failures {
            writeln!(out, "  failed: {f}")?;
        }
    }
    Ok(())
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| usage(flag, format!("{flag} is required without --config")))
}

fn invade_config(args: InvadeArgs) -> Result<ExperimentConfig> {
    if let Some(path) = args.config {
        let text = fs::read_to_string(&path).map_err(|e| usage("--config", format!("cannot read {path}: {e}")))?;
        let cfg: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| usage("--config", format!("invalid config {path}: {e}")))?;
        return Ok(cfg);
    }
    let kind = match need(args.profile, "--profile")? {
        KindArg::Power => ProfileKind::Power,
        KindArg::Exponential => ProfileKind::Exponential,
    };
    Ok(ExperimentConfig {
        params: FracParams { alpha: need(args.alpha, "--alpha")?, rho: need(args.rho, "--rho")?, dim: need(args.dim, "--dim")? },
        profile: SpeedProfile { kind, m: need(args.m, "--m")?, beta: need(args.beta, "--beta")? },
        t_start: args.t_start.unwrap_or(DEFAULT_T_START),
        t_end: args.t_end.unwrap_or(DEFAULT_T_END),
        n_samples: args.n_samples.unwrap_or(DEFAULT_SAMPLES),
        method: args.method.unwrap_or(RouteArg::Subordination).into(),
        output_path: args.output.unwrap_or_default(),
        format: match args.format.unwrap_or(FormatArg::Csv) {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        },
    })
}

fn check_config(cfg: &ExperimentConfig) -> Result<()> {
    let p = &cfg.params;
    check_params(p.alpha, p.rho, p.dim)?;
    require("--m", cfg.profile.m > 0.0 && cfg.profile.m.is_finite(), "positive", cfg.profile.m)?;
    require("--beta", cfg.profile.beta > 0.0 && cfg.profile.beta.is_finite(), "positive", cfg.profile.beta)?;
    require("--t-start", cfg.t_start > 0.0, "positive", cfg.t_start)?;
    require("--t-end", cfg.t_end > cfg.t_start && cfg.t_end.is_finite(), "finite and above --t-start", cfg.t_end)?;
    require("--n-samples", cfg.n_samples >= 4, "at least 4", cfg.n_samples)
}

fn invade(args: InvadeArgs, out: &mut String) -> Result<u8> {
    let cfg = invade_config(args)?;
    check_config(&cfg)?;
    let report = run_experiment(&cfg);
    let cell = &report.cells[0];
    let body = match cfg.format {
        OutputFormat::Csv => trajectory_csv(&report),
        OutputFormat::Json => serde_json::to_string_pretty(&report)? + "\n",
    };
    if cfg.output_path.is_empty() || cfg.output_path == "-" {
        out.push_str(&body);
    } else {
        write_atomic(Path::new(&cfg.output_path), body.as_bytes())?;
        let verdict = cell.classification.map(|c| format!("{:?} slope {}", c.verdict, sig(c.slope)));
        writeln!(out, "verdict {}", verdict.as_deref().unwrap_or("none"))?;
        writeln!(out, "side {:?}", cell.side)?;
        let predicted = cell.predicted.map(|v| format!("{v:?}"));
        writeln!(out, "predicted {}", predicted.as_deref().unwrap_or("gap (no prediction)"))?;
        writeln!(out, "wrote {}", cfg.output_path)?;
    }
    if let Some(e) = &cell.error {
        eprintln!("error: {e}");
        return Ok(EXIT_COMPUTE);
    }
    Ok(0)
}

fn trajectory_csv(report: &ExperimentReport) -> String {
    let mut s = String::from("t,theta,sign,log_u,method\n");
    for x in &report.cells[0].samples {
        let _ = writeln!(s, "{},{},{},{},{}", sig(x.t), sig(x.theta), sign_str(&x.log_u), sig(x.log_u.log_abs()), x.method.as_str());
    }
    s
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("cannot create a file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let code = if e.is::<Usage>() {
                EXIT_USAGE
            } else {
                match e.downcast_ref::<fracspeed::Error>() {
                    Some(fracspeed::Error::Domain(_)) | Some(fracspeed::Error::Unsupported(_)) => EXIT_USAGE,
                    _ => EXIT_COMPUTE,
                }
            };
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}
