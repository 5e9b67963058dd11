//! Discrete global minimisation of the energy.
//!
//! Each solve starts from a set of competitor profiles (the smoothed
//! `√μ⁺` profile, the interior kink and its variants, zero and a small random
//! field), relaxes every one of them with a stabilised semi-implicit gradient
//! flow, polishes with Newton's method on the Euler-Lagrange residual and
//! keeps the critical point of lowest energy.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::analysis::{locate_zero, sign_changes, AnalysisError};
use crate::energy::{DiscreteProblem, EnergyReport};
use crate::model::{Field, Grid, ModelError, ModelParams};
use crate::numeric::{solve_tridiagonal, sturm_count};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GuessKind {
    /// `√μ` inside `|x| ≤ ξ − ε` with exponential tails of width `ε`.
    PhiPositive,
    /// Sign-changing competitor with a `tanh` core at the origin.
    PsiKink,
    /// The kink with reversed orientation, `x ↦ −ψ(x)`.
    PsiKinkReflected,
    Zero,
    /// iid uniform values in `(−0.1, 0.1)`.
    RandomSmall,
}

impl GuessKind {
    pub const ALL: [GuessKind; 5] = [
        GuessKind::PhiPositive,
        GuessKind::PsiKink,
        GuessKind::PsiKinkReflected,
        GuessKind::Zero,
        GuessKind::RandomSmall,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GuessKind::PhiPositive => "phi",
            GuessKind::PsiKink => "psi",
            GuessKind::PsiKinkReflected => "psi_reflected",
            GuessKind::Zero => "zero",
            GuessKind::RandomSmall => "random",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InitialGuess {
    pub kind: GuessKind,
    pub seed: u64,
}

impl InitialGuess {
    pub fn new(kind: GuessKind) -> Self {
        Self { kind, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub newton_tol: f64,
    pub flow_tol: f64,
    pub max_newton: usize,
    pub max_flow: usize,
    pub guesses: Vec<GuessKind>,
    pub seed: u64,
    /// Half-width of the truncated domain.
    pub x_max: f64,
    /// Node count; `None` picks an odd count with `h ≤ ε/5`.
    pub n: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            newton_tol: 1e-10,
            flow_tol: 1e-4,
            max_newton: 60,
            max_flow: 3000,
            guesses: GuessKind::ALL.to_vec(),
            seed: 0,
            x_max: 4.0,
            n: None,
        }
    }
}

impl SolverOptions {
    pub fn grid_for(&self, p: &ModelParams) -> Result<Grid, ModelError> {
        match self.n {
            Some(n) => Grid::symmetric(self.x_max, n),
            None => Grid::for_epsilon(p.epsilon, self.x_max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MinimizeError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("ill-formed initial guess: {0}")]
    IllFormedGuess(&'static str),
    #[error("no candidate converged within the iteration limits")]
    NoConvergence { best: Option<Box<MinimizerResult>> },
    #[error("Newton Jacobian is singular near x = {x}; a fold is likely, try continuation")]
    DegenerateHessian { x: f64 },
}

/// Per-candidate outcome recorded alongside the winner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateSummary {
    pub origin: GuessKind,
    pub warm_start: bool,
    pub converged: bool,
    pub e_total: f64,
    pub e_renormalized: f64,
    pub residual_inf: f64,
    pub zero_x: Option<f64>,
    /// Number of negative eigenvalues of the discrete Hessian.
    pub morse_index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizerResult {
    pub params: ModelParams,
    pub field: Field,
    pub report: EnergyReport,
    pub residual_inf: f64,
    /// Location of the sign change, in canonical orientation.
    pub zero_x: Option<f64>,
    /// Number of sign alternations of the field.
    pub sign_changes: usize,
    /// `(|x̄| − ξ)⁺ / √(ε/a)` when a zero exists and `a > 0`.
    pub zero_bound_constant: Option<f64>,
    pub n_flow_steps: usize,
    pub n_newton_steps: usize,
    pub winning_guess: GuessKind,
    pub morse_index: usize,
    pub candidates: Vec<CandidateSummary>,
}

fn tail(k_sqrt_eps: f64, dist: f64, eps: f64) -> f64 {
    k_sqrt_eps * libm::exp(-dist / eps)
}

/// Sample a competitor profile on `grid`; the two end values are set to zero.
pub fn build_guess(p: &ModelParams, g: InitialGuess, grid: Grid) -> Result<Field, MinimizeError> {
    let eps = p.epsilon;
    let xi = p.zero_crossing()?.xi;
    if !(xi > eps) {
        return Err(MinimizeError::IllFormedGuess("epsilon must be smaller than xi"));
    }
    let sqrt_mu = |x: f64| libm::sqrt(p.mu(x).max(0.0));
    // k_ε √ε · e = √μ(ξ − ε)
    let k_sqrt_eps = sqrt_mu(xi - eps) / core::f64::consts::E;
    let phi = |x: f64| {
        let r = x.abs();
        if r <= xi - eps {
            sqrt_mu(x)
        } else {
            tail(k_sqrt_eps, r - xi, eps)
        }
    };
    let mut values: Vec<f64> = match g.kind {
        GuessKind::PhiPositive => grid.points().map(phi).collect(),
        GuessKind::PsiKink | GuessKind::PsiKinkReflected => {
            let zeta = -libm::log(eps);
            let core_half = zeta * eps;
            if !(zeta > 0.0 && core_half < xi - eps) {
                return Err(MinimizeError::IllFormedGuess(
                    "kink core overlaps the corner region (need -eps ln eps < xi - eps)",
                ));
            }
            let mu0 = p.mu(0.0);
            let rate = libm::sqrt(mu0 / 2.0);
            // l_ε tanh(ζ_ε √(μ(0)/2)) = √μ(ζ_ε ε)
            let l = sqrt_mu(core_half) / libm::tanh(zeta * rate);
            let psi = |x: f64| {
                let r = x.abs();
                let mag = if r <= core_half {
                    return l * libm::tanh(x / eps * rate);
                } else if r <= xi - eps {
                    sqrt_mu(x)
                } else {
                    tail(k_sqrt_eps, r - xi, eps)
                };
                mag.copysign(x)
            };
            let sign = if g.kind == GuessKind::PsiKink { 1.0 } else { -1.0 };
            grid.points().map(|x| sign * psi(x)).collect()
        }
        GuessKind::Zero => vec![0.0; grid.n()],
        GuessKind::RandomSmall => {
            let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
            (0..grid.n()).map(|_| rng.gen_range(-0.1..0.1)).collect()
        }
    };
    let n = values.len();
    values[0] = 0.0;
    values[n - 1] = 0.0;
    Ok(Field::new(grid, values)?)
}

/// Trajectory summary of a gradient-flow relaxation.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowOutcome {
    pub values: Vec<f64>,
    /// Energy after every accepted step, starting with the initial energy.
    pub energies: Vec<f64>,
    pub steps: usize,
    pub converged: bool,
}

/// Stabilised semi-implicit gradient flow
/// `(1/dt + S − ε²D₂) uⁿ⁺¹ = uⁿ/dt + (S + μ) uⁿ − (uⁿ)³ + εaf`, `S = sup μ⁺`,
/// with adaptive `dt` (initially `ε²`); a step is accepted only if it does
/// not raise the energy. Stops once the interior energy gradient is below
/// `flow_tol` in sup-norm.
pub fn gradient_flow(problem: &DiscreteProblem, u0: &[f64], flow_tol: f64, max_steps: usize) -> FlowOutcome {
    let p = problem.params();
    let eps = p.epsilon;
    let ea = eps * p.a;
    let grid = problem.grid();
    let h = grid.h();
    let n = grid.n();
    let c = eps * eps / (h * h);
    let mu = problem.mu_samples();
    let f = problem.f_samples();
    let s = mu.iter().fold(0.0f64, |m, v| m.max(*v));

    let mut u = u0.to_vec();
    u[0] = 0.0;
    u[n - 1] = 0.0;
    let mut e = problem.energy_unchecked(&u).e_total;
    let mut energies = vec![e];
    let mut dt = eps * eps;
    let dt_max = 1e6;
    let gscale = h / eps;

    let m = n - 2;
    let lower = vec![-c; m];
    let upper = vec![-c; m];
    let mut diag = vec![0.0; m];
    let mut rhs = vec![0.0; m];
    let mut trial = u.clone();
    let mut steps = 0;
    let mut converged = false;
    let mut rejections = 0usize;

    while steps < max_steps {
        if gscale * problem.residual_inf(&u) < flow_tol {
            converged = true;
            break;
        }
        let inv = 1.0 / dt;
        for j in 0..m {
            let i = j + 1;
            let v = u[i];
            diag[j] = inv + s + 2.0 * c;
            rhs[j] = v * inv + (s + mu[i]) * v - v * v * v + ea * f[i];
        }
        let Some(next) = solve_tridiagonal(&lower, &diag, &upper, &rhs, 0.0) else {
            break;
        };
        trial[1..n - 1].copy_from_slice(&next);
        let e_new = problem.energy_unchecked(&trial).e_total;
        if e_new <= e + 1e-13 * e.abs().max(1.0) && e_new.is_finite() {
            core::mem::swap(&mut u, &mut trial);
            e = e_new;
            energies.push(e);
            steps += 1;
            dt = (dt * 2.0).min(dt_max);
            rejections = 0;
        } else {
            dt *= 0.25;
            rejections += 1;
            if dt < 1e-30 || rejections > 200 {
                break;
            }
        }
    }
    FlowOutcome {
        values: u,
        energies,
        steps,
        converged,
    }
}

/// Outcome of a Newton solve of the Euler-Lagrange equation.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonOutcome {
    pub values: Vec<f64>,
    pub residual_inf: f64,
    pub steps: usize,
    pub converged: bool,
}

fn jacobian(problem: &DiscreteProblem, u: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let eps = problem.params().epsilon;
    let h = problem.grid().h();
    let c = eps * eps / (h * h);
    let mu = problem.mu_samples();
    let n = u.len();
    let m = n - 2;
    let mut diag = vec![0.0; m];
    for j in 0..m {
        let i = j + 1;
        diag[j] = -2.0 * c + mu[i] - 3.0 * u[i] * u[i];
    }
    (vec![c; m], diag, vec![c; m])
}

/// Number of negative eigenvalues of the discrete Hessian `−(ε²D₂ + μ − 3u²)`
/// restricted to interior nodes.
pub fn morse_index(problem: &DiscreteProblem, u: &[f64]) -> usize {
    let (_, diag, off) = jacobian(problem, u);
    let neg_diag: Vec<f64> = diag.iter().map(|d| -d).collect();
    let neg_off: Vec<f64> = off[..off.len() - 1].iter().map(|o| -o).collect();
    sturm_count(&neg_diag, &neg_off, 0.0)
}

/// Damped Newton iteration on the interior residual with a tridiagonal
/// Jacobian `ε²D₂ + μ − 3u²`.
pub fn newton(
    problem: &DiscreteProblem,
    u0: &[f64],
    tol: f64,
    max_steps: usize,
) -> Result<NewtonOutcome, MinimizeError> {
    let grid = *problem.grid();
    let n = grid.n();
    let mut u = u0.to_vec();
    u[0] = 0.0;
    u[n - 1] = 0.0;
    let mut res = problem.residual_inf(&u);
    let mut steps = 0;
    while res > tol && steps < max_steps {
        let (lower, diag, upper) = jacobian(problem, &u);
        let r = problem.residual_unchecked(&u);
        let rhs: Vec<f64> = r[1..n - 1].iter().map(|v| -v).collect();
        let scale = diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        let delta = solve_tridiagonal(&lower, &diag, &upper, &rhs, 1e-13 * scale).ok_or_else(|| {
            let i = diag
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .map(|(j, _)| j + 1)
                .unwrap_or(0);
            MinimizeError::DegenerateHessian { x: grid.x(i) }
        })?;
        let mut lambda = 1.0;
        let mut accepted = false;
        let mut trial = u.clone();
        while lambda > 1e-4 {
            for j in 0..n - 2 {
                trial[j + 1] = u[j + 1] + lambda * delta[j];
            }
            let r_new = problem.residual_inf(&trial);
            if r_new.is_finite() && (r_new < res || r_new <= tol) {
                u.copy_from_slice(&trial);
                res = r_new;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        steps += 1;
        if !accepted {
            break;
        }
    }
    Ok(NewtonOutcome {
        converged: res <= tol,
        values: u,
        residual_inf: res,
        steps,
    })
}

/// A converged (or best-effort) critical point from one starting profile.
#[derive(Debug, Clone)]
pub(crate) struct Candidate {
    pub summary: CandidateSummary,
    pub values: Vec<f64>,
    pub report: EnergyReport,
    pub flow_steps: usize,
    pub newton_steps: usize,
}

fn zero_of(grid: Grid, values: &[f64]) -> Option<f64> {
    Field::new(grid, values.to_vec())
        .ok()
        .and_then(|f| locate_zero(&f).ok().flatten())
}

fn finish_candidate(
    problem: &DiscreteProblem,
    origin: GuessKind,
    warm_start: bool,
    outcome: NewtonOutcome,
    flow_steps: usize,
) -> Candidate {
    let report = problem.energy_unchecked(&outcome.values);
    Candidate {
        summary: CandidateSummary {
            origin,
            warm_start,
            converged: outcome.converged,
            e_total: report.e_total,
            e_renormalized: report.e_renormalized,
            residual_inf: outcome.residual_inf,
            zero_x: zero_of(*problem.grid(), &outcome.values),
            morse_index: morse_index(problem, &outcome.values),
        },
        report,
        flow_steps,
        newton_steps: outcome.steps,
        values: outcome.values,
    }
}

fn relax_and_polish(
    problem: &DiscreteProblem,
    origin: GuessKind,
    start: &[f64],
    opts: &SolverOptions,
) -> Result<Candidate, MinimizeError> {
    let flow = gradient_flow(problem, start, opts.flow_tol, opts.max_flow);
    let outcome = newton(problem, &flow.values, opts.newton_tol, opts.max_newton)?;
    Ok(finish_candidate(problem, origin, false, outcome, flow.steps))
}

/// Newton from a warm start; on failure a short flow is run first.
fn warm_solve(
    problem: &DiscreteProblem,
    origin: GuessKind,
    start: &[f64],
    opts: &SolverOptions,
) -> Result<Candidate, MinimizeError> {
    if let Ok(out) = newton(problem, start, opts.newton_tol, opts.max_newton) {
        if out.converged {
            return Ok(finish_candidate(problem, origin, true, out, 0));
        }
    }
    let mut c = relax_and_polish(problem, origin, start, opts)?;
    c.summary.warm_start = true;
    Ok(c)
}

fn canonical_values(p: &ModelParams, grid: Grid, values: Vec<f64>, fold: bool) -> Vec<f64> {
    if p.a == 0.0 {
        // E(|u|) <= E(u) without forcing; folding also clears roundoff-sized
        // negative values deep in the shadow zone
        if fold {
            return values.into_iter().map(f64::abs).collect();
        }
        let sum: f64 = values.iter().sum();
        if sum < 0.0 {
            return values.into_iter().map(|v| -v).collect();
        }
        return values;
    }
    if grid.is_symmetric() {
        if let Some(x) = zero_of(grid, &values) {
            if x > 1e-12 {
                return values.iter().rev().map(|v| -v).collect();
            }
        }
    }
    values
}

fn assemble(problem: &DiscreteProblem, mut cands: Vec<Candidate>) -> Result<MinimizerResult, MinimizeError> {
    let p = problem.params().clone();
    let grid = *problem.grid();
    let summaries: Vec<CandidateSummary> = cands.iter().map(|c| c.summary).collect();
    let best_index = |only_converged: bool| {
        cands
            .iter()
            .enumerate()
            .filter(|(_, c)| !only_converged || c.summary.converged)
            .min_by(|a, b| a.1.report.e_total.total_cmp(&b.1.report.e_total))
            .map(|(i, _)| i)
    };
    let (idx, ok) = match best_index(true) {
        Some(i) => (i, true),
        None => match best_index(false) {
            Some(i) => (i, false),
            None => return Err(MinimizeError::NoConvergence { best: None }),
        },
    };
    let win = cands.swap_remove(idx);
    let values = canonical_values(&p, grid, win.values, true);
    let field = Field::new(grid, values)?;
    let report = problem.energy_unchecked(field.values());
    let zero_x = match locate_zero(&field) {
        Ok(z) => z,
        Err(AnalysisError::MultipleZeros { .. }) => None,
        Err(_) => None,
    };
    let xi = p.zero_crossing()?.xi;
    let zero_bound_constant = match zero_x {
        Some(x) if p.a > 0.0 => Some((x.abs() - xi).max(0.0) / libm::sqrt(p.epsilon / p.a)),
        _ => None,
    };
    let result = MinimizerResult {
        sign_changes: sign_changes(field.values()),
        residual_inf: problem.residual_inf(field.values()),
        morse_index: morse_index(problem, field.values()),
        zero_x,
        zero_bound_constant,
        n_flow_steps: win.flow_steps,
        n_newton_steps: win.newton_steps,
        winning_guess: win.summary.origin,
        candidates: summaries,
        report,
        field,
        params: p,
    };
    if ok {
        Ok(result)
    } else {
        Err(MinimizeError::NoConvergence {
            best: Some(Box::new(result)),
        })
    }
}

fn multistart(problem: &DiscreteProblem, opts: &SolverOptions) -> Result<Vec<Candidate>, MinimizeError> {
    let mut cands = Vec::new();
    let mut first_err = None;
    for &kind in &opts.guesses {
        let guess = build_guess(problem.params(), InitialGuess { kind, seed: opts.seed }, *problem.grid());
        let res = guess.and_then(|g| relax_and_polish(problem, kind, g.values(), opts));
        match res {
            Ok(c) => cands.push(c),
            Err(e) => {
                if first_err.is_none() {
                    first_err = Some(e);
                }
            }
        }
    }
    if cands.is_empty() {
        return Err(first_err.unwrap_or(MinimizeError::NoConvergence { best: None }));
    }
    Ok(cands)
}

/// Multi-start minimisation of the discrete energy.
pub fn minimize(p: &ModelParams, opts: &SolverOptions) -> Result<MinimizerResult, MinimizeError> {
    let grid = opts.grid_for(p)?;
    let problem = DiscreteProblem::new(p, grid)?;
    assemble(&problem, multistart(&problem, opts)?)
}

/// Minimise starting from a given set of fields only (no multi-start).
pub fn minimize_from(
    p: &ModelParams,
    starts: &[(GuessKind, Field)],
    opts: &SolverOptions,
) -> Result<MinimizerResult, MinimizeError> {
    let grid = opts.grid_for(p)?;
    let problem = DiscreteProblem::new(p, grid)?;
    let mut cands = Vec::new();
    for (kind, f) in starts {
        let v = if f.grid() == &grid { f.clone() } else { f.resample(grid) };
        cands.push(warm_solve(&problem, *kind, v.values(), opts)?);
    }
    assemble(&problem, cands)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Epsilon,
    A,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Epsilon => "epsilon",
            SweepParam::A => "a",
        }
    }

    pub fn apply(self, p: &ModelParams, value: f64) -> ModelParams {
        match self {
            SweepParam::Epsilon => p.with_epsilon(value),
            SweepParam::A => p.with_a(value),
        }
    }
}

/// A monotone list of values for one parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

impl Schedule {
    pub fn linear(param: SweepParam, from: f64, to: f64, steps: usize) -> Self {
        let values = match steps {
            0 => Vec::new(),
            1 => vec![from],
            _ => (0..steps)
                .map(|i| from + (to - from) * i as f64 / (steps - 1) as f64)
                .collect(),
        };
        Self { param, values }
    }

    pub fn geometric(param: SweepParam, from: f64, to: f64, steps: usize) -> Self {
        let values = match steps {
            0 => Vec::new(),
            1 => vec![from],
            _ => {
                let r = libm::log(to / from) / (steps - 1) as f64;
                (0..steps).map(|i| from * libm::exp(r * i as f64)).collect()
            }
        };
        Self { param, values }
    }

    pub fn is_monotone(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0]) || self.values.windows(2).all(|w| w[1] <= w[0])
    }
}

fn distinct(mut cands: Vec<Candidate>) -> Vec<Candidate> {
    cands.retain(|c| c.summary.converged);
    cands.sort_by(|a, b| a.report.e_total.total_cmp(&b.report.e_total));
    let mut kept: Vec<Candidate> = Vec::new();
    for c in cands {
        let dup = kept.iter().any(|k| {
            let de = (k.report.e_total - c.report.e_total).abs();
            de <= 1e-9 * k.report.e_total.abs().max(1e-3)
        });
        if !dup {
            kept.push(c);
        }
    }
    kept
}

/// Numerical continuation along `schedule`.
///
/// The first point is solved by multi-start. Every later point warm-starts
/// Newton from each distinct branch found at the previous point, so all
/// branch energies are recorded in `candidates` and the reported minimiser is
/// chosen by energy, not by the path. If every branch fails, the point falls
/// back to multi-start.
pub fn continue_in(
    p0: &ModelParams,
    schedule: &Schedule,
    opts: &SolverOptions,
) -> Vec<Result<MinimizerResult, MinimizeError>> {
    let mut out = Vec::with_capacity(schedule.values.len());
    let mut branches: Vec<(GuessKind, Field)> = Vec::new();
    for &value in &schedule.values {
        let p = schedule.param.apply(p0, value);
        let step = (|| -> Result<(MinimizerResult, Vec<(GuessKind, Field)>), MinimizeError> {
            let grid = opts.grid_for(&p)?;
            let problem = DiscreteProblem::new(&p, grid)?;
            let mut cands = Vec::new();
            for (kind, f) in &branches {
                let start = if f.grid() == &grid { f.clone() } else { f.resample(grid) };
                if let Ok(c) = warm_solve(&problem, *kind, start.values(), opts) {
                    cands.push(c);
                }
            }
            if !cands.iter().any(|c| c.summary.converged) {
                cands = multistart(&problem, opts)?;
            }
            let kept = distinct(cands.clone());
            let next: Vec<(GuessKind, Field)> = kept
                .iter()
                .filter_map(|c| {
                    let v = canonical_values(&p, grid, c.values.clone(), false);
                    Field::new(grid, v).ok().map(|f| (c.summary.origin, f))
                })
                .collect();
            Ok((assemble(&problem, cands)?, next))
        })();
        match step {
            Ok((res, next)) => {
                if !next.is_empty() {
                    branches = next;
                }
                out.push(Ok(res));
            }
            Err(e) => out.push(Err(e)),
        }
    }
    out
}
