use std::ffi::OsString;
use std::io;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};
use shadowkink_core::analysis::bound_constant;
use shadowkink_core::{
    check_uniform_bound, compare_profile, continue_in, minimize, pii_alpha, rescale_w, second_variation_floor,
    solve_pii, theta_diagnostic, thresholds, AnalysisError, Branch, MinimizeError, MinimizerResult, ModelError,
    ModelParams, PainleveError, ProfileTarget, Schedule, Side, SolverOptions, SweepParam, TargetKind,
};

use crate::config::{ConfigError, RunConfig, KEYS};
use crate::io::Artifacts;
use crate::manifest::{Command, RunManifest, MANIFEST_FILE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NO_CONVERGENCE: i32 = 2;

const PRECEDENCE: &str = "\
Parameter precedence, later wins:
  1. built-in defaults (epsilon = 0.05, a = 1, chi = 0.5, gaussian mu, f = -mu'/2)
  2. the --config file (`key = value` lines, `#` comments)
  3. --set KEY=VALUE flags, in order
  4. dedicated flags such as --epsilon, --a, --chi, --grid-n, --grid-xmax

Exit codes: 0 success, 1 configuration error (the message names the key),
2 solver did not converge (partial artifacts, manifest has converged = false).";

#[derive(Debug, Parser)]
#[command(name = "shadowkink", version, about = "Minimizers of a 1D light-matter energy and their Painleve II corner layers", after_help = PRECEDENCE)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Global minimizer for one parameter set: profile.csv, report.json.
    #[command(after_help = PRECEDENCE)]
    Minimize {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Minimizers along a schedule of epsilon or a: sweep.csv, report.json.
    #[command(after_help = PRECEDENCE)]
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum)]
        param: ParamArg,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
        /// Geometric instead of linear spacing.
        #[arg(long)]
        geometric: bool,
        /// Warm-start each row from the branches of the previous one. Runs
        /// sequentially; without it rows are independent multi-start solves.
        #[arg(long)]
        continuation: bool,
        /// Worker threads for independent rows [default: number of processors]
        #[arg(long, env = "SHADOWKINK_JOBS")]
        jobs: Option<usize>,
    },
    /// Painleve II boundary-value solve: pii.csv (s,y,theta), report.json.
    Painleve {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        /// hm, positive or sign-changing [default: hm if alpha = 0, else positive]
        #[arg(long)]
        branch: Option<String>,
        /// Left end of the window is -LEFT.
        #[arg(long, default_value_t = 12.0)]
        left: f64,
        #[arg(long, default_value_t = 12.0)]
        right: f64,
        /// Mesh width.
        #[arg(long, default_value_t = 0.005)]
        h: f64,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Forcing amplitudes bounding the defect switch: thresholds.json.
    #[command(after_help = PRECEDENCE)]
    Thresholds {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Minimize, then compare with a reference profile: comparison.json.
    #[command(after_help = PRECEDENCE)]
    Compare {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum)]
        target: TargetArg,
        /// LO,HI in the target variable [default: -3,3 for tanh, -2,4 for
        /// pii, the outer region for sqrt-mu]
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        /// Corner for the pii target.
        #[arg(long, value_enum, default_value_t = SideArg::Plus)]
        side: SideArg,
        /// Painleve branch for the pii target [default: hm if alpha = 0, else positive]
        #[arg(long)]
        branch: Option<String>,
    },
}

#[derive(Debug, Args)]
struct ModelArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override any config key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long, allow_negative_numbers = true)]
    epsilon: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    chi: Option<f64>,
    #[arg(long)]
    grid_n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    grid_xmax: Option<f64>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ParamArg {
    Epsilon,
    A,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TargetArg {
    Tanh,
    Pii,
    SqrtMu,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SideArg {
    Plus,
    Minus,
}

enum Failure {
    Config(ConfigError),
    Io(io::Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl ModelArgs {
    fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| ConfigError::new(kv.as_str(), "--set expects KEY=VALUE"))?;
            cfg.set(k.trim(), v)?;
        }
        let flags = [
            ("epsilon", self.epsilon.map(|v| v.to_string())),
            ("a", self.a.map(|v| v.to_string())),
            ("chi", self.chi.map(|v| v.to_string())),
            ("grid.n", self.grid_n.map(|v| v.to_string())),
            ("grid.xmax", self.grid_xmax.map(|v| v.to_string())),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                cfg.set(k, &v)?;
            }
        }
        Ok(cfg)
    }
}

/// Everything a subcommand hands back for the manifest.
struct Run {
    manifest: RunManifest,
    artifacts: Artifacts,
}

impl Run {
    fn new(command: Command, config_path: Option<PathBuf>, run: &RunArgs, parameters: Value) -> io::Result<Self> {
        Ok(Self {
            manifest: RunManifest {
                command,
                config_path,
                out_dir: run.out.clone(),
                seed: run.seed,
                converged: true,
                parameters,
                warnings: Vec::new(),
            },
            artifacts: Artifacts::new(&run.out)?,
        })
    }

    fn warn(&mut self, msg: String) {
        log::warn!("{msg}");
        self.manifest.warnings.push(msg);
    }

    fn finish(mut self) -> io::Result<i32> {
        let value = self.manifest.to_json(self.artifacts.written());
        self.artifacts.json(MANIFEST_FILE, &value)?;
        Ok(if self.manifest.converged { EXIT_OK } else { EXIT_NO_CONVERGENCE })
    }
}

fn prepare(model: &ModelArgs, run: &RunArgs, command: Command) -> Result<(Run, RunConfig, ModelParams, SolverOptions), Failure> {
    let cfg = model.resolve()?;
    let p = cfg.model()?;
    let opts = cfg.solver(run.seed)?;
    let mut r = Run::new(command, model.config.clone(), run, cfg.to_json())?;
    for w in cfg.warnings(&p) {
        r.warn(w);
    }
    Ok((r, cfg, p, opts))
}

/// Map a minimizer failure to a config error or to a partial result.
fn split_minimize(e: MinimizeError) -> Result<Option<MinimizerResult>, ConfigError> {
    match e {
        MinimizeError::NoConvergence { best } => Ok(best.map(|b| *b)),
        MinimizeError::DegenerateHessian { x } => {
            log::error!("singular Newton Jacobian near x = {x}");
            Ok(None)
        }
        MinimizeError::IllFormedGuess(msg) => Err(ConfigError::new("epsilon", msg)),
        MinimizeError::Model(ModelError::InvalidGrid(msg)) => Err(ConfigError::new("grid.n", msg)),
        MinimizeError::Model(e) => Err(ConfigError::new("epsilon", e.to_string())),
    }
}

fn result_json(r: &MinimizerResult, converged: bool) -> Value {
    let z = r.params.zero_crossing().ok();
    json!({
        "converged": converged,
        "epsilon": r.params.epsilon,
        "a": r.params.a,
        "chi": r.params.chi,
        "xi": z.map(|z| z.xi),
        "mu1": z.map(|z| z.mu1),
        "grid_n": r.field.grid().n(),
        "grid_xmax": r.field.grid().x_max(),
        "e_total": r.report.e_total,
        "e_renormalized": r.report.e_renormalized,
        "gradient_term": r.report.gradient_term,
        "potential_term": r.report.potential_term,
        "quartic_term": r.report.quartic_term,
        "forcing_term": r.report.forcing_term,
        "layer_unresolved": r.report.layer_unresolved,
        "residual_inf": r.residual_inf,
        "zero_x": r.zero_x,
        "sign_changes": r.sign_changes,
        "zero_bound_constant": r.zero_bound_constant,
        "k_bound": bound_constant(&r.params, &r.field),
        "morse_index": r.morse_index,
        "winning_guess": r.winning_guess.name(),
        "n_flow_steps": r.n_flow_steps,
        "n_newton_steps": r.n_newton_steps,
        "candidates": r.candidates.iter().map(|c| json!({
            "origin": c.origin.name(),
            "warm_start": c.warm_start,
            "converged": c.converged,
            "e_total": c.e_total,
            "e_renormalized": c.e_renormalized,
            "residual_inf": c.residual_inf,
            "zero_x": c.zero_x,
            "morse_index": c.morse_index,
        })).collect::<Vec<_>>(),
    })
}

fn write_profile(run: &mut Run, r: &MinimizerResult) -> io::Result<()> {
    let rows = r.field.grid().points().zip(r.field.values()).map(|(x, v)| vec![x, *v]);
    run.artifacts.csv("profile.csv", &["x", "v"], rows)
}

fn summary_line(r: &MinimizerResult) -> String {
    let zero = match r.zero_x {
        Some(x) => format!("zero at x = {x:.6}"),
        None => "no sign change".to_string(),
    };
    format!(
        "epsilon = {} a = {}: E = {:.10e}, renormalized {:.10e}, {zero}, residual {:.2e}, guess {}",
        r.params.epsilon,
        r.params.a,
        r.report.e_total,
        r.report.e_renormalized,
        r.residual_inf,
        r.winning_guess.name()
    )
}

fn cmd_minimize(model: &ModelArgs, args: &RunArgs) -> Result<i32, Failure> {
    let (mut run, _, p, opts) = prepare(model, args, Command::Minimize)?;
    let (r, converged) = match minimize(&p, &opts) {
        Ok(r) => (Some(r), true),
        Err(e) => (split_minimize(e)?, false),
    };
    if let Some(r) = &r {
        write_profile(&mut run, r)?;
        run.artifacts.json("report.json", &result_json(r, converged))?;
        println!("{}", summary_line(r));
    } else {
        run.artifacts.json("report.json", &json!({ "converged": false }))?;
    }
    if !converged {
        run.manifest.converged = false;
        eprintln!("minimize: no candidate converged; artifacts are partial");
    }
    Ok(run.finish()?)
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    model: &ModelArgs,
    args: &RunArgs,
    param: ParamArg,
    from: f64,
    to: f64,
    steps: usize,
    geometric: bool,
    continuation: bool,
    jobs: Option<usize>,
) -> Result<i32, Failure> {
    let (mut run, cfg, p, opts) = prepare(model, args, Command::Sweep)?;
    let param = match param {
        ParamArg::Epsilon => SweepParam::Epsilon,
        ParamArg::A => SweepParam::A,
    };
    if steps == 0 {
        return Err(ConfigError::new("--steps", "must be at least 1").into());
    }
    if geometric && !(from > 0.0 && to > 0.0) {
        return Err(ConfigError::new("--from", "geometric schedules need positive end points").into());
    }
    let schedule = if geometric {
        Schedule::geometric(param, from, to, steps)
    } else {
        Schedule::linear(param, from, to, steps)
    };
    for &v in &schedule.values {
        let q = param.apply(&p, v);
        q.validate().map_err(|e| ConfigError::new(param.name(), e.to_string()))?;
        for w in cfg.warnings(&q) {
            if !run.manifest.warnings.contains(&w) {
                run.warn(w);
            }
        }
    }
    let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())).max(1);
    if let Value::Object(m) = &mut run.manifest.parameters {
        m.insert(
            "sweep".into(),
            json!({
                "param": param.name(),
                "values": schedule.values,
                "continuation": continuation,
                "jobs": jobs,
            }),
        );
    }

    let results: Vec<Result<MinimizerResult, MinimizeError>> = if continuation {
        continue_in(&p, &schedule, &opts)
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| io::Error::other(e.to_string()))?;
        pool.install(|| {
            schedule
                .values
                .par_iter()
                .map(|&v| minimize(&param.apply(&p, v), &opts))
                .collect()
        })
    };

    let mut rows = Vec::new();
    let mut records = Vec::new();
    let mut converged_results = Vec::new();
    for (&v, res) in schedule.values.iter().zip(results) {
        let (r, ok) = match res {
            Ok(r) => (Some(r), true),
            Err(e) => (split_minimize(e)?, false),
        };
        match &r {
            Some(r) => {
                rows.push(vec![
                    v,
                    r.zero_x.unwrap_or(f64::NAN),
                    r.report.e_total,
                    r.report.e_renormalized,
                    bound_constant(&r.params, &r.field),
                ]);
                let mut rec = result_json(r, ok);
                if let Value::Object(m) = &mut rec {
                    m.remove("candidates");
                    m.insert("value".into(), json!(v));
                }
                records.push(rec);
                println!("{}", summary_line(r));
            }
            None => {
                rows.push(vec![v, f64::NAN, f64::NAN, f64::NAN, f64::NAN]);
                records.push(json!({ "value": v, "converged": false }));
                println!("{} = {v}: no convergence", param.name());
            }
        }
        if ok {
            converged_results.extend(r);
        } else {
            run.manifest.converged = false;
        }
    }
    run.artifacts
        .csv("sweep.csv", &[param.name(), "xbar", "E", "Erenorm", "K_bound"], rows)?;
    let k = check_uniform_bound(&converged_results).ok();
    run.artifacts.json(
        "report.json",
        &json!({ "param": param.name(), "uniform_k_bound": k, "rows": records }),
    )?;
    if let Some(k) = k {
        println!("uniform bound constant over converged rows: {k:.6}");
    }
    if !run.manifest.converged {
        eprintln!("sweep: some rows did not converge; see report.json");
    }
    Ok(run.finish()?)
}

fn parse_branch(name: Option<&str>, alpha: f64) -> Result<Branch, ConfigError> {
    match name {
        None if alpha == 0.0 => Ok(Branch::HastingsMcLeod),
        None => Ok(Branch::PositiveMinimal),
        Some(s) => Branch::from_name(s)
            .ok_or_else(|| ConfigError::new("--branch", format!("unknown branch `{s}` (hm, positive, sign-changing)"))),
    }
}

/// Config-type Painleve errors become `Err`; solver failures are `Ok(reason)`.
fn split_painleve(e: PainleveError) -> Result<String, ConfigError> {
    match e {
        PainleveError::InvalidAlpha(_) => Err(ConfigError::new("--alpha", e.to_string())),
        PainleveError::BranchMismatch { .. } => Err(ConfigError::new("--branch", e.to_string())),
        PainleveError::InvalidWindow { .. } => Err(ConfigError::new("--h", e.to_string())),
        PainleveError::Model(_) => Err(ConfigError::new("--h", e.to_string())),
        other => Ok(other.to_string()),
    }
}

fn cmd_painleve(alpha: f64, branch: Option<&str>, left: f64, right: f64, h: f64, args: &RunArgs) -> Result<i32, Failure> {
    let branch = parse_branch(branch, alpha)?;
    if !(h > 0.0) {
        return Err(ConfigError::new("--h", "must be positive").into());
    }
    let n = ((left + right) / h).round() as usize + 1;
    let params = json!({
        "alpha": alpha,
        "branch": branch.name(),
        "left": left,
        "right": right,
        "h": h,
        "n": n,
    });
    let solved = solve_pii(alpha, branch, left, right, n);
    let sol = match solved {
        Ok(s) => s,
        Err(e) => {
            let reason = split_painleve(e)?;
            let mut run = Run::new(Command::Painleve, None, args, params)?;
            run.manifest.converged = false;
            run.artifacts
                .json("report.json", &json!({ "converged": false, "error": reason }))?;
            eprintln!("painleve: {reason}");
            return Ok(run.finish()?);
        }
    };
    let mut run = Run::new(Command::Painleve, None, args, params)?;
    let theta = theta_diagnostic(&sol);
    let rows = sol
        .values
        .iter()
        .zip(&theta)
        .enumerate()
        .map(|(i, (y, t))| vec![sol.s(i), *y, *t]);
    run.artifacts.csv("pii.csv", &["s", "y", "theta"], rows)?;
    let floor = second_variation_floor(&sol);
    let y0 = sol.eval(0.0);
    run.artifacts.json(
        "report.json",
        &json!({
            "converged": true,
            "alpha": alpha,
            "branch": branch.name(),
            "residual_inf": sol.residual_inf,
            "newton_steps": sol.newton_steps,
            "second_variation_floor": floor,
            "y_at_0": y0,
            "sign_changes": sol.sign_changes(),
        }),
    )?;
    println!(
        "alpha = {alpha} branch {}: y(0) = {:.12}, residual {:.2e}, second-variation floor {floor:.6}",
        branch.name(),
        y0.unwrap_or(f64::NAN),
        sol.residual_inf
    );
    Ok(run.finish()?)
}

fn analysis_config(e: AnalysisError, key: &str) -> ConfigError {
    ConfigError::new(key, e.to_string())
}

fn cmd_thresholds(model: &ModelArgs, args: &RunArgs) -> Result<i32, Failure> {
    let (mut run, _, p, _) = prepare(model, args, Command::Thresholds)?;
    let t = thresholds(&p).map_err(|e| analysis_config(e, "mu"))?;
    let z = p.zero_crossing().map_err(|e| ConfigError::new("mu", e.to_string()))?;
    run.artifacts.json(
        "thresholds.json",
        &json!({
            "a_lower": t.a_lower,
            "a_upper": t.a_upper,
            "argmin_x": t.argmin_x,
            "argmax_x": t.argmax_x,
            "xi": z.xi,
            "mu1": z.mu1,
        }),
    )?;
    println!("a_lower = {:.10} (x = {:.6}), a_upper = {:.10} (x = {:.6})", t.a_lower, t.argmin_x, t.a_upper, t.argmax_x);
    Ok(run.finish()?)
}

fn parse_window(s: &str) -> Result<(f64, f64), ConfigError> {
    let bad = || ConfigError::new("--window", format!("expected LO,HI with LO < HI, got `{s}`"));
    let (lo, hi) = s.split_once(',').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(lo < hi) {
        return Err(bad());
    }
    Ok((lo, hi))
}

#[allow(clippy::too_many_arguments)]
fn cmd_compare(
    model: &ModelArgs,
    args: &RunArgs,
    target: TargetArg,
    window: Option<&str>,
    side: SideArg,
    branch: Option<&str>,
) -> Result<i32, Failure> {
    let (mut run, _, p, opts) = prepare(model, args, Command::Compare)?;
    let window = window.map(parse_window).transpose()?;
    let alpha = pii_alpha(&p).map_err(|e| analysis_config(e, "mu"))? + 0.0;
    let branch = match target {
        TargetArg::Pii => Some(parse_branch(branch, alpha)?),
        _ => None,
    };
    let r = match minimize(&p, &opts) {
        Ok(r) => r,
        Err(e) => {
            if let Some(r) = split_minimize(e)? {
                write_profile(&mut run, &r)?;
                run.artifacts.json("report.json", &result_json(&r, false))?;
            }
            run.manifest.converged = false;
            eprintln!("compare: the minimizer did not converge; no comparison made");
            return Ok(run.finish()?);
        }
    };
    write_profile(&mut run, &r)?;
    run.artifacts.json("report.json", &result_json(&r, true))?;
    let xi = p.zero_crossing().map_err(|e| ConfigError::new("mu", e.to_string()))?.xi;
    let cmp = match target {
        TargetArg::Tanh => {
            let center = r
                .zero_x
                .ok_or_else(|| ConfigError::new("--target", "the minimizer has no sign change, tanh needs one"))?;
            let w = window.unwrap_or((-3.0, 3.0));
            compare_profile(&r.field, &ProfileTarget::Tanh { center }, &p, w)
        }
        TargetArg::SqrtMu => {
            let margin = 10.0 * p.epsilon.powf(2.0 / 3.0);
            let w = window.unwrap_or((-xi + margin, xi - margin));
            compare_profile(&r.field, &ProfileTarget::SqrtMu, &p, w)
        }
        TargetArg::Pii => {
            let (lo, hi) = window.unwrap_or((-2.0, 4.0));
            let branch = branch.expect("set for the pii target");
            let sol = match solve_pii(alpha, branch, 12.0, 12.0, 4801) {
                Ok(s) => s,
                Err(e) => {
                    let reason = split_painleve(e)?;
                    run.manifest.converged = false;
                    eprintln!("compare: {reason}");
                    return Ok(run.finish()?);
                }
            };
            let side = match side {
                SideArg::Plus => Side::Plus,
                SideArg::Minus => Side::Minus,
            };
            let w = rescale_w(&r.field, &p, side, lo, hi, 1201).map_err(|e| analysis_config(e, "--window"))?;
            let rows = w
                .grid()
                .points()
                .zip(w.values())
                .map(|(s, v)| vec![s, *v, sol.eval(s).unwrap_or(f64::NAN)]);
            run.artifacts.csv("corner.csv", &["s", "w", "y"], rows)?;
            compare_profile(&w, &ProfileTarget::Pii(sol), &p, (lo, hi))
        }
    }
    .map_err(|e| analysis_config(e, "--window"))?;
    let target_name = match cmp.target {
        TargetKind::Tanh => "tanh",
        TargetKind::Pii => "pii",
        TargetKind::SqrtMu => "sqrt-mu",
    };
    run.artifacts.json(
        "comparison.json",
        &json!({
            "sup_error": cmp.sup_error,
            "window": [cmp.window.0, cmp.window.1],
            "target": target_name,
            "alpha": branch.map(|_| alpha),
            "branch": branch.map(|b| b.name()),
        }),
    )?;
    println!("{}", summary_line(&r));
    println!(
        "sup error against {target_name} on [{}, {}]: {:.6e}",
        cmp.window.0, cmp.window.1, cmp.sup_error
    );
    Ok(run.finish()?)
}

/// Parse `argv` (program name first), execute, and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let outcome = match &cli.command {
        Cmd::Minimize { model, run } => cmd_minimize(model, run),
        Cmd::Sweep {
            model,
            run,
            param,
            from,
            to,
            steps,
            geometric,
            continuation,
            jobs,
        } => cmd_sweep(model, run, *param, *from, *to, *steps, *geometric, *continuation, *jobs),
        Cmd::Painleve {
            alpha,
            branch,
            left,
            right,
            h,
            run,
        } => cmd_painleve(*alpha, branch.as_deref(), *left, *right, *h, run),
        Cmd::Thresholds { model, run } => cmd_thresholds(model, run),
        Cmd::Compare {
            model,
            run,
            target,
            window,
            side,
            branch,
        } => cmd_compare(model, run, *target, window.as_deref(), *side, branch.as_deref()),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            if e.message == "unknown key" {
                eprintln!("known keys: {}", KEYS.join(", "));
            }
            EXIT_CONFIG
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}
