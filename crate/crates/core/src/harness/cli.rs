//! `holder-lift` command line. Exit codes: 0 on success, 1 when a check or
//! bound fails, 2 on usage or input errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use super::config::ExperimentConfig;
use super::experiment::{run_experiment, ExperimentReport};
use super::suite::{run_criterion, run_suite};
use super::{format_number, HarnessError};
use crate::problems::{
    verify_growth, verify_smoothness, GrowthDescriptor, ProblemSpec, SmoothnessDescriptor,
};
use crate::rates::{
    lift_general, lift_growth, lower_bound_nonsmooth, lower_bound_smooth, restart_sum_general,
    restart_sum_growth, Rate, RateBound, RateFn, RateQuery, Regime, TableMethod,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "holder-lift", version, about = "First-order methods, Hölder rate lifting, and envelope certification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a solver from an experiment config and compare it with its predictions.
    Solve {
        config: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a named rate `K(Δ0, ε, α)`.
    Rate(RateArgs),
    /// Evaluate a rate with `α ← ε/D^p` (theorem 1) or `α ← α^{p/q}ε^{1−p/q}` (theorem 2).
    Lift {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        theorem: u8,
        #[command(flatten)]
        rate: RateArgs,
    },
    /// Total iterations of the restart scheme without growth (1) or under `(α, q)` growth (2).
    RestartBound {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        corollary: u8,
        #[command(flatten)]
        rate: RateArgs,
    },
    /// Run a config with envelope certification switched on (1-D problems).
    EnvelopeCheck {
        config: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Check a problem's smoothness and growth descriptors by sampling.
    Verify(VerifyArgs),
    /// Run the acceptance battery.
    Suite {
        /// Run a single criterion (1–10).
        #[arg(long)]
        criterion: Option<usize>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
struct RateArgs {
    /// `k_prox_sharp`, `k_subgrad_quadratic`, `k_subgrad_sharp`,
    /// `table:<method>:<regime>`, `lower_bound_nonsmooth`, or `lower_bound_smooth`.
    #[arg(long, conflicts_with_all = ["method", "regime"])]
    name: Option<String>,
    #[arg(long, requires = "regime")]
    method: Option<TableMethod>,
    #[arg(long, requires = "method")]
    regime: Option<Regime>,
    /// Parameters as a JSON object; flags override its fields.
    #[arg(long)]
    query: Option<String>,
    #[arg(long)]
    delta0: Option<f64>,
    #[arg(long, visible_alias = "epsilon")]
    eps: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long = "L")]
    lipschitz: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long = "D")]
    radius: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Problem definition file (JSON).
    #[arg(long, conflicts_with = "problem_json", required_unless_present = "problem_json")]
    problem: Option<PathBuf>,
    /// Problem definition given inline.
    #[arg(long)]
    problem_json: Option<String>,
    /// Ball radius; defaults to the problem's `D`.
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Smoothness constant to check instead of the problem's.
    #[arg(long = "L", requires = "eta")]
    lipschitz: Option<f64>,
    #[arg(long, requires = "lipschitz")]
    eta: Option<f64>,
    /// Growth modulus to check instead of the problem's.
    #[arg(long, requires = "p")]
    alpha: Option<f64>,
    #[arg(long, requires = "alpha")]
    p: Option<f64>,
    #[arg(long)]
    json: bool,
}

enum Target {
    Rate(Rate),
    LowerNonsmooth,
    LowerSmooth,
}

impl RateArgs {
    fn target(&self) -> Result<Target, String> {
        match (&self.name, self.method, self.regime) {
            (Some(name), _, _) => match name.as_str() {
                "lower_bound_nonsmooth" => Ok(Target::LowerNonsmooth),
                "lower_bound_smooth" => Ok(Target::LowerSmooth),
                other => other.parse().map(Target::Rate).map_err(|e| e.to_string()),
            },
            (None, Some(m), Some(r)) => Ok(Target::Rate(Rate::Table(m, r))),
            _ => Err("give either --name or both --method and --regime".to_string()),
        }
    }

    fn query(&self) -> Result<RateQuery, String> {
        let base: RateQuery = match &self.query {
            Some(text) => serde_json::from_str(text).map_err(|e| format!("--query: {e}"))?,
            None => RateQuery::default(),
        };
        Ok(RateQuery {
            delta0: self.delta0.or(base.delta0),
            epsilon: self.eps.or(base.epsilon),
            alpha: self.alpha.or(base.alpha),
            p: self.p.or(base.p),
            q: self.q.or(base.q),
            lipschitz: self.lipschitz.or(base.lipschitz),
            eta: self.eta.or(base.eta),
            radius: self.radius.or(base.radius),
            rho: self.rho.or(base.rho),
        })
    }
}

enum Mode {
    Plain,
    Lift(u8),
    Restart(u8),
}

fn evaluate(args: &RateArgs, mode: Mode) -> Result<(String, RateQuery, RateBound), String> {
    let mut q = args.query()?;
    q.validate().map_err(|e| e.to_string())?;
    let rate = match (args.target()?, &mode) {
        (Target::Rate(r), _) => r,
        (lower, Mode::Plain) => {
            let need = |v: Option<f64>, name: &str| v.ok_or(format!("missing parameter `{name}`"));
            let (l, d, e) = (need(q.lipschitz, "L")?, need(q.radius, "D")?, need(q.epsilon, "eps")?);
            return Ok(match lower {
                Target::LowerNonsmooth => ("lower_bound_nonsmooth".into(), q, lower_bound_nonsmooth(l, d, e)),
                _ => ("lower_bound_smooth".into(), q, lower_bound_smooth(l, d, e)),
            });
        }
        _ => return Err("lower bounds cannot be lifted or restarted".into()),
    };
    if !matches!(mode, Mode::Plain) && q.p.is_none() {
        q.p = rate.growth_exponent();
    }
    let k: &dyn RateFn = &rate;
    let bound = match mode {
        Mode::Plain => k.eval(&q),
        Mode::Lift(1) => lift_general(k, &q),
        Mode::Lift(_) => lift_growth(k, &q),
        Mode::Restart(1) => restart_sum_general(k, &q),
        Mode::Restart(_) => restart_sum_growth(k, &q),
    }
    .map_err(|e| e.to_string())?;
    Ok((rate.to_string(), q, bound))
}

fn print_bound(out: &mut dyn Write, err: &mut dyn Write, json: bool, name: &str, q: &RateQuery, b: RateBound) {
    if json {
        let v = json!({
            "rate": name,
            "query": q,
            "iterations": b.iterations,
            "asymptotic_only": b.asymptotic_only,
        });
        let _ = writeln!(out, "{v}");
    } else {
        let _ = writeln!(out, "{}", format_number(b.iterations));
        if b.asymptotic_only {
            let _ = writeln!(err, "note: {name} is an O(.) entry evaluated with unit constant");
        }
    }
}

fn rate_command(out: &mut dyn Write, err: &mut dyn Write, args: &RateArgs, mode: Mode) -> i32 {
    match evaluate(args, mode) {
        Ok((name, q, b)) => {
            print_bound(out, err, args.json, &name, &q, b);
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn experiment_summary(out: &mut dyn Write, report: &ExperimentReport) {
    let run = &report.run;
    let _ = writeln!(
        out,
        "{}: {:?} after {} iterations, gap {}",
        report.method,
        run.terminated,
        run.iterations_used,
        format_number(run.final_gap)
    );
    for c in &report.comparisons {
        let cmp = &c.comparison;
        let verdict = match cmp.bound_respected {
            Some(true) => "respected",
            Some(false) => "VIOLATED",
            None => "asymptotic, not asserted",
        };
        let _ = writeln!(
            out,
            "{} ({:?}): observed {} vs predicted {} [{}]{}",
            c.rate,
            c.transform,
            cmp.observed_iterations,
            format_number(cmp.predicted_ceiled),
            verdict,
            if cmp.inconclusive { " inconclusive: max_iter reached" } else { "" }
        );
    }
    if let Some(env) = &report.envelope {
        let _ = writeln!(out, "envelope at eps {}: {}", format_number(env.epsilon), env.summary());
    }
}

fn load_config(path: &std::path::Path, err: &mut dyn Write) -> Option<ExperimentConfig> {
    match ExperimentConfig::from_file(path) {
        Ok(c) => Some(c),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            None
        }
    }
}

fn experiment_command(out: &mut dyn Write, err: &mut dyn Write, cfg: ExperimentConfig, json: bool) -> i32 {
    let envelope_wanted = cfg.envelope;
    match run_experiment(&cfg) {
        Ok(report) => {
            if json {
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
            } else {
                experiment_summary(out, &report);
            }
            if envelope_wanted && report.envelope.is_none() {
                let _ = writeln!(err, "error: nothing to certify (x0 = x* or no recorded trace)");
                return EXIT_USAGE;
            }
            if report.passed() {
                EXIT_OK
            } else {
                EXIT_FAILED
            }
        }
        Err(e @ (HarnessError::InvalidConfig(_) | HarnessError::Json(_) | HarnessError::Io(_))) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILED
        }
    }
}

fn verify_command(out: &mut dyn Write, err: &mut dyn Write, a: &VerifyArgs) -> i32 {
    let text = match (&a.problem, &a.problem_json) {
        (Some(path), _) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                let _ = writeln!(err, "error: {}: {e}", path.display());
                return EXIT_USAGE;
            }
        },
        (None, Some(t)) => t.clone(),
        (None, None) => unreachable!("clap requires one of them"),
    };
    let inst = match serde_json::from_str::<ProblemSpec>(&text)
        .map_err(|e| e.to_string())
        .and_then(|s| s.build().map_err(|e| e.to_string()))
    {
        Ok(inst) => inst,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let smoothness = match (a.lipschitz, a.eta) {
        (Some(l), Some(eta)) => SmoothnessDescriptor::new(l, eta),
        _ => Ok(inst.smoothness()),
    };
    let growth = match (a.alpha, a.p) {
        (Some(alpha), Some(p)) => GrowthDescriptor::new(alpha, p).map(Some),
        _ => Ok(inst.growth()),
    };
    let (smoothness, growth) = match (smoothness, growth) {
        (Ok(s), Ok(g)) => (s, g),
        (Err(e), _) | (_, Err(e)) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let radius = a.radius.unwrap_or_else(|| inst.growth_radius());
    let s_rep = verify_smoothness(&inst, smoothness, a.samples, radius, a.tol, a.seed);
    let g_rep = growth.map(|g| verify_growth(&inst, g, radius, a.samples, a.tol));
    if a.json {
        let v = json!({ "radius": radius, "smoothness": s_rep, "growth": g_rep });
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("reports serialize"));
    } else {
        let line = |r: &crate::problems::CertReport| {
            format!(
                "{} (max violation {}, {} samples)",
                if r.passed { "pass" } else { "FAIL" },
                format_number(r.max_violation),
                r.samples_checked
            )
        };
        let _ = writeln!(out, "smoothness: {}", line(&s_rep));
        match &g_rep {
            Some(r) => {
                let _ = writeln!(out, "growth: {}", line(r));
            }
            None => {
                let _ = writeln!(out, "growth: no descriptor");
            }
        }
    }
    if s_rep.passed && g_rep.as_ref().is_none_or(|r| r.passed) {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

fn suite_command(out: &mut dyn Write, err: &mut dyn Write, criterion: Option<usize>, json: bool) -> i32 {
    let outcomes = match criterion {
        Some(id) => match run_criterion(id) {
            Some(o) => vec![o],
            None => {
                let _ = writeln!(err, "error: criteria are numbered 1 to 10");
                return EXIT_USAGE;
            }
        },
        None => run_suite(),
    };
    if json {
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&outcomes).expect("outcomes serialize"));
    } else {
        for o in &outcomes {
            let _ = writeln!(out, "{o}");
        }
    }
    if outcomes.iter().all(|o| o.passed) {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

/// Parses `argv` (program name first) and runs the command, writing to the
/// given streams.
pub fn cli_main_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match cli.command {
        Command::Solve { config, json } => match load_config(&config, err) {
            Some(cfg) => experiment_command(out, err, cfg, json),
            None => EXIT_USAGE,
        },
        Command::Rate(args) => rate_command(out, err, &args, Mode::Plain),
        Command::Lift { theorem, rate } => rate_command(out, err, &rate, Mode::Lift(theorem)),
        Command::RestartBound { corollary, rate } => rate_command(out, err, &rate, Mode::Restart(corollary)),
        Command::EnvelopeCheck { config, json } => match load_config(&config, err) {
            Some(mut cfg) => {
                cfg.envelope = true;
                cfg.record_trace = true;
                experiment_command(out, err, cfg, json)
            }
            None => EXIT_USAGE,
        },
        Command::Verify(args) => verify_command(out, err, &args),
        Command::Suite { criterion, json } => suite_command(out, err, criterion, json),
    }
}

/// [`cli_main_with`] on standard output and standard error.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let (stdout, stderr) = (std::io::stdout(), std::io::stderr());
    cli_main_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
