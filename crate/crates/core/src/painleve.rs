//! Second Painlevé equation `y'' = s y + 2y³ + α`, `α ≤ 0`, on a truncated
//! window `[−L, R]` with Dirichlet data taken from the known tails.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::model::{Grid, ModelError};
use crate::numeric::{rk4_second_order, smallest_eigenvalue, solve_tridiagonal, CubicSpline};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PainleveError {
    #[error("alpha must be nonpositive and finite, got {0}")]
    InvalidAlpha(f64),
    #[error("branch {branch:?} is not defined for alpha = {alpha}")]
    BranchMismatch { branch: Branch, alpha: f64 },
    #[error("Airy evaluation is limited to s >= -2, got {0}")]
    AiryOutOfRange(f64),
    #[error("window [-{l}, {r}] with {n} nodes is unsupported (need L, R >= 8 and h <= 0.01)")]
    InvalidWindow { l: f64, r: f64, n: usize },
    #[error("Newton stalled at residual {residual:e} (alpha = {alpha})")]
    NoConvergence { alpha: f64, residual: f64 },
    #[error("converged solution is not on the {branch:?} branch: {reason}")]
    WrongBranch { branch: Branch, reason: &'static str },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Real roots of `2y³ + s y + α = 0` for `α ≤ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicRoots {
    pub s: f64,
    pub alpha: f64,
    /// Largest root.
    pub sigma_plus: f64,
    pub sigma_zero: Option<f64>,
    pub sigma_minus: Option<f64>,
    /// `−6|α/4|^{2/3}`; three real roots exist iff `s ≤ s_star`.
    pub s_star: f64,
}

impl CubicRoots {
    /// `dσ₊/ds = −σ₊/(6σ₊² + s)`.
    pub fn sigma_plus_derivative(&self) -> f64 {
        let r = self.sigma_plus;
        -r / (6.0 * r * r + self.s)
    }

    pub fn roots(&self) -> Vec<f64> {
        let mut v = vec![self.sigma_plus];
        v.extend(self.sigma_zero);
        v.extend(self.sigma_minus);
        v
    }
}

pub fn s_star(alpha: f64) -> f64 {
    -6.0 * libm::pow((alpha / 4.0).abs(), 2.0 / 3.0)
}

fn polish(alpha: f64, s: f64, mut y: f64) -> f64 {
    for _ in 0..4 {
        let g = 2.0 * y * y * y + s * y + alpha;
        let dg = 6.0 * y * y + s;
        if dg == 0.0 {
            break;
        }
        let next = y - g / dg;
        if !next.is_finite() || (2.0 * next * next * next + s * next + alpha).abs() >= g.abs() {
            break;
        }
        y = next;
    }
    y
}

/// Closed-form (trigonometric or hyperbolic) roots followed by a Newton
/// polish. Positive `alpha` is rejected.
pub fn cubic_roots(alpha: f64, s: f64) -> Result<CubicRoots, PainleveError> {
    if !(alpha <= 0.0 && alpha.is_finite()) || !s.is_finite() {
        return Err(PainleveError::InvalidAlpha(alpha));
    }
    // y³ + p y + q = 0
    let p = s / 2.0;
    let q = alpha / 2.0;
    let star = s_star(alpha);
    let pi = core::f64::consts::PI;
    let (plus, zero, minus) = if s <= star && p < 0.0 {
        let m = 2.0 * libm::sqrt(-p / 3.0);
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let phi = libm::acos(arg) / 3.0;
        let r0 = m * libm::cos(phi);
        let r1 = m * libm::cos(phi - 2.0 * pi / 3.0);
        let r2 = m * libm::cos(phi - 4.0 * pi / 3.0);
        let mut r = [r0, r1, r2];
        r.sort_by(|a, b| b.total_cmp(a));
        (r[0], Some(r[1]), Some(r[2]))
    } else if p < 0.0 {
        let m = 2.0 * libm::sqrt(-p / 3.0);
        let arg = (-3.0 * q.abs() / (p * m)).max(1.0);
        let r = -q.signum() * m * libm::cosh(libm::acosh(arg) / 3.0);
        (r, None, None)
    } else if p > 0.0 {
        let m = 2.0 * libm::sqrt(p / 3.0);
        let r = -m * libm::sinh(libm::asinh(3.0 * q / (p * m)) / 3.0);
        (r, None, None)
    } else {
        (libm::cbrt(-q), None, None)
    };
    Ok(CubicRoots {
        s,
        alpha,
        sigma_plus: polish(alpha, s, plus),
        sigma_zero: zero.map(|r| polish(alpha, s, r)),
        sigma_minus: minus.map(|r| polish(alpha, s, r)),
        s_star: star,
    })
}

const AIRY_S0: f64 = 12.0;
const AIRY_STEP: f64 = 1e-3;

/// Asymptotic expansion of `(Ai, Ai')` for large positive `s`.
pub fn airy_asymptotic(s: f64) -> (f64, f64) {
    let z = s;
    let zeta = 2.0 / 3.0 * z * libm::sqrt(z);
    let quarter = libm::sqrt(libm::sqrt(z));
    let pre = libm::exp(-zeta) / (2.0 * libm::sqrt(core::f64::consts::PI));
    let mut u = 1.0;
    let mut sum_u = 1.0;
    let mut sum_v = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        let zk = libm::pow(zeta, -kf);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let tu = sign * u * zk;
        if tu.abs() < 1e-17 || tu.abs() > last {
            break;
        }
        last = tu.abs();
        sum_u += tu;
        sum_v += sign * v * zk;
    }
    (pre / quarter * sum_u, -pre * quarter * sum_v)
}

fn airy_pair(s: f64) -> Result<(f64, f64), PainleveError> {
    if !(s >= -2.0) {
        return Err(PainleveError::AiryOutOfRange(s));
    }
    if s >= AIRY_S0 {
        return Ok(airy_asymptotic(s));
    }
    let (mut y, mut dy) = airy_asymptotic(AIRY_S0);
    let steps = libm::ceil((AIRY_S0 - s) / AIRY_STEP) as usize;
    let h = -(AIRY_S0 - s) / steps as f64;
    let accel = |t: f64, w: f64| t * w;
    for k in 0..steps {
        let t = AIRY_S0 + h * k as f64;
        (y, dy) = rk4_second_order(&accel, t, y, dy, h);
    }
    Ok((y, dy))
}

/// Airy function `Ai(s)` for `s ≥ −2`: RK4 integration of `w'' = s w`
/// leftward from `s = 12`, seeded by the asymptotic expansion.
pub fn airy_ai(s: f64) -> Result<f64, PainleveError> {
    airy_pair(s).map(|p| p.0)
}

pub fn airy_ai_prime(s: f64) -> Result<f64, PainleveError> {
    airy_pair(s).map(|p| p.1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `α = 0`, positive, `y ~ Ai(s)` at `+∞`.
    HastingsMcLeod,
    /// `α < 0`, positive and decreasing, `y ~ |α|/s` at `+∞`.
    PositiveMinimal,
    /// `α < 0`, one zero, `y ~ −√(|s|/2)` at `−∞`.
    SignChanging,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::HastingsMcLeod => "hm",
            Branch::PositiveMinimal => "positive",
            Branch::SignChanging => "sign-changing",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [Branch::HastingsMcLeod, Branch::PositiveMinimal, Branch::SignChanging]
            .into_iter()
            .find(|b| b.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiiSolution {
    pub alpha: f64,
    pub branch: Branch,
    pub grid: Grid,
    pub values: Vec<f64>,
    pub residual_inf: f64,
    pub newton_steps: usize,
}

impl PiiSolution {
    pub fn s(&self, i: usize) -> f64 {
        self.grid.x(i)
    }

    pub fn spline(&self) -> CubicSpline {
        CubicSpline::new(self.grid.points().collect(), self.values.clone()).expect("increasing grid")
    }

    /// Interpolated value; `None` outside the window.
    pub fn eval(&self, s: f64) -> Option<f64> {
        if s < self.grid.x_min() || s > self.grid.x_max() {
            return None;
        }
        Some(self.spline().eval(s))
    }

    /// Central-difference derivative, second-order one-sided at the ends.
    pub fn derivative(&self) -> Vec<f64> {
        let y = &self.values;
        let n = y.len();
        let h = self.grid.h();
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            d[i] = (y[i + 1] - y[i - 1]) / (2.0 * h);
        }
        d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h);
        d[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * h);
        d
    }

    /// Sign alternations, ignoring values below `1e−12` in magnitude.
    pub fn sign_changes(&self) -> usize {
        sign_changes_of(&self.values)
    }
}

fn residual(grid: &Grid, alpha: f64, y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let ih2 = 1.0 / (grid.h() * grid.h());
    let mut r = vec![0.0; n];
    for i in 1..n - 1 {
        let s = grid.x(i);
        let v = y[i];
        r[i] = (y[i + 1] - 2.0 * v + y[i - 1]) * ih2 - s * v - 2.0 * v * v * v - alpha;
    }
    r
}

fn residual_inf(grid: &Grid, alpha: f64, y: &[f64]) -> f64 {
    residual(grid, alpha, y).iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn sign_changes_of(y: &[f64]) -> usize {
    let mut last = 0.0f64;
    let mut count = 0;
    for &v in y {
        if v.abs() <= 1e-12 {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = v;
    }
    count
}

/// Interior residual of the collocation equations.
pub fn pii_residual(sol: &PiiSolution) -> Vec<f64> {
    residual(&sol.grid, sol.alpha, &sol.values)
}

const NEWTON_TOL: f64 = 1e-10;
const SIGN_CHANGING_STEP: f64 = 0.02;

/// Residual target: `1e−10`, or the rounding floor of the second difference
/// `4·eps·max|y|/h²` on grids fine enough for that to dominate.
fn newton_tol(grid: &Grid, y: &[f64]) -> f64 {
    let ymax = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    NEWTON_TOL.max(4.0 * f64::EPSILON * ymax / (grid.h() * grid.h()))
}

fn newton(grid: &Grid, alpha: f64, y: &mut [f64], max_steps: usize) -> (f64, usize, bool) {
    let n = y.len();
    let m = n - 2;
    let ih2 = 1.0 / (grid.h() * grid.h());
    let tol = newton_tol(grid, y);
    let mut res = residual_inf(grid, alpha, y);
    let mut steps = 0;
    let lower = vec![ih2; m];
    let upper = vec![ih2; m];
    let mut diag = vec![0.0; m];
    let mut trial = y.to_vec();
    while res > tol && steps < max_steps {
        let r = residual(grid, alpha, y);
        for j in 0..m {
            let i = j + 1;
            diag[j] = -2.0 * ih2 - grid.x(i) - 6.0 * y[i] * y[i];
        }
        let rhs: Vec<f64> = r[1..n - 1].iter().map(|v| -v).collect();
        let Some(delta) = solve_tridiagonal(&lower, &diag, &upper, &rhs, 1e-300) else {
            break;
        };
        steps += 1;
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda >= 1.0 / 1024.0 {
            for j in 0..m {
                trial[j + 1] = y[j + 1] + lambda * delta[j];
            }
            let rn = residual_inf(grid, alpha, &trial);
            if rn.is_finite() && (rn < res || rn <= tol) {
                y.copy_from_slice(&trial);
                res = rn;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (res, steps, res <= tol)
}

fn right_value(alpha: f64, r: f64) -> Result<f64, PainleveError> {
    if alpha == 0.0 {
        airy_ai(r)
    } else {
        Ok(cubic_roots(alpha, r)?.sigma_plus)
    }
}

fn check_branch(sol: &PiiSolution) -> Result<(), PainleveError> {
    let y = &sol.values;
    match sol.branch {
        Branch::HastingsMcLeod | Branch::PositiveMinimal => {
            if y.iter().any(|v| !(*v > 0.0)) {
                return Err(PainleveError::WrongBranch {
                    branch: sol.branch,
                    reason: "solution is not positive",
                });
            }
            if y.windows(2).any(|w| !(w[1] < w[0])) {
                return Err(PainleveError::WrongBranch {
                    branch: sol.branch,
                    reason: "solution is not strictly decreasing",
                });
            }
        }
        Branch::SignChanging => {
            if sol.sign_changes() != 1 {
                return Err(PainleveError::WrongBranch {
                    branch: sol.branch,
                    reason: "solution does not change sign exactly once",
                });
            }
        }
    }
    Ok(())
}

/// Newton collocation for a branch of solutions on `[−L, R]` with `n` nodes.
///
/// Positive branches for `α < 0` are reached by continuation from `α = 0`
/// in steps of at most 0.1. The sign-changing branch starts from `σ₋` on
/// the left joined to `σ₊` on the right through zero at `s = 0`; if Newton
/// does not converge from there, it is continued from the negated `α = 0`
/// solution in steps of 0.02.
pub fn solve_pii(alpha: f64, branch: Branch, l: f64, r: f64, n: usize) -> Result<PiiSolution, PainleveError> {
    solve_pii_scaled(alpha, branch, l, r, n, 1.0)
}

/// As [`solve_pii`], with the right Dirichlet value multiplied by
/// `right_factor` (for truncation-sensitivity studies).
pub fn solve_pii_scaled(
    alpha: f64,
    branch: Branch,
    l: f64,
    r: f64,
    n: usize,
    right_factor: f64,
) -> Result<PiiSolution, PainleveError> {
    if !(alpha <= 0.0 && alpha.is_finite()) {
        return Err(PainleveError::InvalidAlpha(alpha));
    }
    match (branch, alpha == 0.0) {
        (Branch::HastingsMcLeod, false) | (Branch::SignChanging, true) => {
            return Err(PainleveError::BranchMismatch { branch, alpha })
        }
        _ => {}
    }
    if !(l >= 8.0 && r >= 8.0 && l.is_finite() && r.is_finite()) || n < 3 || (l + r) / (n - 1) as f64 > 0.01 + 1e-15 {
        return Err(PainleveError::InvalidWindow { l, r, n });
    }
    let grid = Grid::new(-l, r, n)?;
    let max_steps = 100;

    let (values, res, steps) = match branch {
        Branch::HastingsMcLeod | Branch::PositiveMinimal => {
            let mut y: Vec<f64> = grid
                .points()
                .map(|s| {
                    let base = cubic_roots(0.0, s).map(|c| c.sigma_plus).unwrap_or(0.0);
                    if s > 0.0 {
                        base.max(airy_ai(s.min(AIRY_S0 + 40.0)).unwrap_or(0.0))
                    } else {
                        base
                    }
                })
                .collect();
            let mut total_steps = 0;
            let stages = libm::ceil(alpha.abs() / 0.1) as usize;
            let mut res = f64::INFINITY;
            for k in 0..=stages {
                let a_k = if stages == 0 { 0.0 } else { alpha * k as f64 / stages as f64 };
                y[0] = cubic_roots(a_k, -l)?.sigma_plus;
                y[n - 1] = right_factor * right_value(a_k, r)?;
                let (rk, st, ok) = newton(&grid, a_k, &mut y, max_steps);
                res = rk;
                total_steps += st;
                if !ok {
                    return Err(PainleveError::NoConvergence { alpha: a_k, residual: rk });
                }
            }
            (y, res, total_steps)
        }
        Branch::SignChanging => {
            let star = s_star(alpha);
            let left_at_star = cubic_roots(alpha, star)?.sigma_minus.unwrap_or(0.0);
            let mut y: Vec<f64> = grid
                .points()
                .map(|s| {
                    if s <= star {
                        cubic_roots(alpha, s).ok().and_then(|c| c.sigma_minus).unwrap_or(0.0)
                    } else if s < 0.0 {
                        left_at_star * s / star
                    } else {
                        let plus = cubic_roots(alpha, s).map(|c| c.sigma_plus).unwrap_or(0.0);
                        plus * (s / star.abs()).min(1.0)
                    }
                })
                .collect();
            y[0] = cubic_roots(alpha, -l)?.sigma_minus.unwrap_or(y[0]);
            y[n - 1] = right_factor * right_value(alpha, r)?;
            let (res, steps, ok) = newton(&grid, alpha, &mut y, max_steps);
            let splice_ok = ok && sign_changes_of(&y) == 1;
            if splice_ok {
                (y, res, steps)
            } else {
                // Fallback: follow the branch from the negated α = 0 solution,
                // whose zero enters the window from the right as α decreases.
                let hm = solve_pii_scaled(0.0, Branch::HastingsMcLeod, l, r, n, 1.0)?;
                let mut y: Vec<f64> = hm.values.iter().map(|v| -v).collect();
                let stages = libm::ceil(alpha.abs() / SIGN_CHANGING_STEP) as usize;
                let mut total = steps;
                let mut res = f64::INFINITY;
                for k in 1..=stages {
                    let a_k = alpha * k as f64 / stages as f64;
                    y[0] = cubic_roots(a_k, -l)?.sigma_minus.unwrap_or(y[0]);
                    y[n - 1] = right_factor * right_value(a_k, r)?;
                    let (rk, st, ok) = newton(&grid, a_k, &mut y, max_steps);
                    res = rk;
                    total += st;
                    if !ok {
                        return Err(PainleveError::NoConvergence { alpha: a_k, residual: rk });
                    }
                }
                (y, res, total)
            }
        }
    };
    let sol = PiiSolution {
        alpha,
        branch,
        grid,
        values,
        residual_inf: res,
        newton_steps: steps,
    };
    check_branch(&sol)?;
    Ok(sol)
}

/// Richardson extrapolation `(4 y_{h/2} − y_h)/3` on the nodes of the coarse
/// solution, where `fine` was computed on the halved grid.
pub fn richardson(coarse: &PiiSolution, fine: &PiiSolution) -> Option<Vec<f64>> {
    if fine.grid != coarse.grid.refined() {
        return None;
    }
    Some(
        coarse
            .values
            .iter()
            .enumerate()
            .map(|(i, y)| (4.0 * fine.values[2 * i] - y) / 3.0)
            .collect(),
    )
}

/// `θ = y'² − s y² − y⁴ − 2αy` on the grid.
pub fn theta_diagnostic(sol: &PiiSolution) -> Vec<f64> {
    let dy = sol.derivative();
    sol.values
        .iter()
        .zip(&dy)
        .enumerate()
        .map(|(i, (y, d))| {
            let s = sol.s(i);
            d * d - s * y * y - y * y * y * y - 2.0 * sol.alpha * y
        })
        .collect()
}

/// Smallest eigenvalue of `−D₂ + diag(s + 6y²)` with Dirichlet ends.
pub fn second_variation_floor(sol: &PiiSolution) -> f64 {
    let n = sol.values.len();
    let ih2 = 1.0 / (sol.grid.h() * sol.grid.h());
    let diag: Vec<f64> = (1..n - 1)
        .map(|i| {
            let y = sol.values[i];
            2.0 * ih2 + sol.s(i) + 6.0 * y * y
        })
        .collect();
    let off = vec![-ih2; diag.len().saturating_sub(1)];
    smallest_eigenvalue(&diag, &off)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn cubic_examples() {
        let c = cubic_roots(-1.0, 0.0).unwrap();
        assert_relative_eq!(c.sigma_plus, libm::cbrt(0.5), epsilon = 1e-14);
        assert!(c.sigma_zero.is_none() && c.sigma_minus.is_none());
        assert_relative_eq!(s_star(-1.0), -2.381101577952299, epsilon = 1e-12);
        let c = cubic_roots(0.0, -2.0).unwrap();
        assert_relative_eq!(c.sigma_plus, 1.0, epsilon = 1e-14);
        assert!(c.sigma_zero.unwrap().abs() < 1e-14);
        assert_relative_eq!(c.sigma_minus.unwrap(), -1.0, epsilon = 1e-14);
    }

    #[test]
    fn cubic_at_threshold_has_double_root() {
        let a = -0.5;
        let c = cubic_roots(a, s_star(a)).unwrap();
        let (z, m) = (c.sigma_zero.unwrap(), c.sigma_minus.unwrap());
        assert!((z - m).abs() < 1e-6);
        assert!(cubic_roots(a, s_star(a) + 1e-3).unwrap().sigma_zero.is_none());
    }

    #[test]
    fn positive_alpha_rejected() {
        assert!(cubic_roots(0.1, 1.0).is_err());
        assert!(solve_pii(0.1, Branch::PositiveMinimal, 12.0, 12.0, 4801).is_err());
    }

    proptest! {
        #[test]
        fn cubic_roots_satisfy_equation(alpha in -3.0f64..0.0, s in -30.0f64..30.0) {
            let c = cubic_roots(alpha, s).unwrap();
            let tol = 1e-12 * (1.0 + s.abs() + alpha.abs());
            for r in c.roots() {
                prop_assert!((2.0 * r * r * r + s * r + alpha).abs() <= tol);
            }
            prop_assert!(c.sigma_plus > 0.0);
            prop_assert_eq!(c.sigma_minus.is_some(), s <= c.s_star);
            if let (Some(z), Some(m)) = (c.sigma_zero, c.sigma_minus) {
                prop_assert!(m <= z && z < 0.0);
            }
        }

        #[test]
        fn sigma_plus_is_decreasing(alpha in -3.0f64..-0.01, s in -20.0f64..20.0) {
            let h = 1e-5;
            let a = cubic_roots(alpha, s - h).unwrap().sigma_plus;
            let b = cubic_roots(alpha, s + h).unwrap().sigma_plus;
            prop_assert!(b < a);
            let c = cubic_roots(alpha, s).unwrap();
            let fd = (b - a) / (2.0 * h);
            prop_assert!((fd - c.sigma_plus_derivative()).abs() <= 1e-5 * (1.0 + fd.abs()));
        }
    }

    #[test]
    fn airy_values() {
        // Ai(0) = 3^{-2/3} / Γ(2/3)
        let ai0 = 1.0 / (libm::pow(3.0, 2.0 / 3.0) * libm::tgamma(2.0 / 3.0));
        assert_relative_eq!(airy_ai(0.0).unwrap(), ai0, max_relative = 1e-9);
        // Ai'(0) = −3^{-1/3} / Γ(1/3)
        let dai0 = -1.0 / (libm::cbrt(3.0) * libm::tgamma(1.0 / 3.0));
        assert_relative_eq!(airy_ai_prime(0.0).unwrap(), dai0, max_relative = 1e-9);
        assert_relative_eq!(airy_ai(12.0).unwrap() / airy_asymptotic(12.0).0, 1.0, epsilon = 1e-10);
        assert!(airy_ai(5.0).unwrap() > 0.0);
        assert!(airy_ai(-2.5).is_err());
    }

    #[test]
    fn airy_is_decreasing_on_positive_axis() {
        let vals: Vec<f64> = (0..=48).map(|k| airy_ai(0.25 * k as f64).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn airy_wronskian_with_series_near_origin() {
        // Maclaurin series is accurate for small |s|.
        let ai0 = 1.0 / (libm::pow(3.0, 2.0 / 3.0) * libm::tgamma(2.0 / 3.0));
        let dai0 = -1.0 / (libm::cbrt(3.0) * libm::tgamma(1.0 / 3.0));
        let series = |s: f64| {
            let (mut f, mut g) = (1.0, s);
            let (mut tf, mut tg) = (1.0, s);
            for k in 1..40 {
                let k = k as f64;
                tf *= s * s * s / ((3.0 * k - 1.0) * (3.0 * k));
                tg *= s * s * s / ((3.0 * k) * (3.0 * k + 1.0));
                f += tf;
                g += tg;
            }
            ai0 * f + dai0 * g
        };
        for s in [-2.0, -1.0, -0.3, 0.7, 1.5, 2.0] {
            assert_relative_eq!(airy_ai(s).unwrap(), series(s), max_relative = 1e-9);
        }
    }

    #[test]
    fn hastings_mcleod_basic_shape() {
        let sol = solve_pii(0.0, Branch::HastingsMcLeod, 12.0, 12.0, 4801).unwrap();
        assert!(sol.residual_inf <= 1e-10);
        let y0 = sol.eval(0.0).unwrap();
        assert!((y0 - 0.367).abs() < 1e-3, "y(0) = {y0}");
        assert!((sol.values[0] - 6f64.sqrt()).abs() < 0.05);
        assert!(second_variation_floor(&sol) >= -1e-6);
    }

    #[test]
    fn positive_branch_tail() {
        let sol = solve_pii(-0.5, Branch::PositiveMinimal, 12.0, 12.0, 4801).unwrap();
        let y10 = sol.eval(10.0).unwrap();
        let ratio = y10 * 10.0 / 0.5;
        assert!((0.9..=1.1).contains(&ratio), "{ratio}");
        let theta = theta_diagnostic(&sol);
        let rise = theta.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
        assert!(rise <= 1e-8);
        // θ(s) = ∫_s^∞ y², so θ(R) ≈ α²/R on this branch, not zero.
        let t_end = *theta.last().unwrap();
        assert!((t_end - 0.25 / 12.0).abs() < 0.003, "{t_end}");
    }

    #[test]
    fn theta_of_zero_profile_vanishes() {
        let grid = Grid::new(-8.0, 8.0, 1601).unwrap();
        let sol = PiiSolution {
            alpha: 0.0,
            branch: Branch::HastingsMcLeod,
            grid,
            values: vec![0.0; 1601],
            residual_inf: 0.0,
            newton_steps: 0,
        };
        assert!(theta_diagnostic(&sol).iter().all(|t| *t == 0.0));
    }

    #[test]
    fn floor_is_finite_on_non_solutions() {
        let grid = Grid::new(-8.0, 8.0, 1601).unwrap();
        let values: Vec<f64> = grid.points().map(|s| cubic_roots(-0.5, s).unwrap().sigma_plus).collect();
        let sol = PiiSolution {
            alpha: -0.5,
            branch: Branch::PositiveMinimal,
            grid,
            values,
            residual_inf: f64::NAN,
            newton_steps: 0,
        };
        assert!(second_variation_floor(&sol).is_finite());
    }

    #[test]
    fn window_checks() {
        assert!(matches!(
            solve_pii(0.0, Branch::HastingsMcLeod, 6.0, 12.0, 4001),
            Err(PainleveError::InvalidWindow { .. })
        ));
        assert!(matches!(
            solve_pii(0.0, Branch::HastingsMcLeod, 12.0, 12.0, 101),
            Err(PainleveError::InvalidWindow { .. })
        ));
        assert!(matches!(
            solve_pii(-0.5, Branch::HastingsMcLeod, 12.0, 12.0, 4801),
            Err(PainleveError::BranchMismatch { .. })
        ));
    }
}
