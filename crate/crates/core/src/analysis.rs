//! Post-processing of minimisers: zero location, threshold values of the
//! forcing amplitude, the uniform amplitude bound, rescaled corner profiles
//! and comparisons against reference profiles.

use alloc::vec::Vec;

use thiserror::Error;

use crate::minimize::MinimizerResult;
use crate::model::{Field, Grid, ModelError, ModelParams};
use crate::numeric::{adaptive_simpson, golden_section_min};
use crate::painleve::PiiSolution;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("field changes sign {count} times; a single zero was expected")]
    MultipleZeros { count: usize },
    #[error("window [{lo}, {hi}] exceeds the sampled domain")]
    WindowExceedsDomain { lo: f64, hi: f64 },
    #[error("no results supplied")]
    Empty,
    #[error(transparent)]
    Model(#[from] ModelError),
}

const ZERO_FLOOR: f64 = 1e-10;

fn significant(values: &[f64]) -> impl Iterator<Item = (usize, f64)> + '_ {
    let floor = ZERO_FLOOR * values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    values
        .iter()
        .copied()
        .enumerate()
        .filter(move |(_, v)| v.abs() > floor)
}

/// Sign alternations among samples above `1e−10·max|v|`.
pub fn sign_changes(values: &[f64]) -> usize {
    let mut last: Option<f64> = None;
    let mut count = 0;
    for (_, v) in significant(values) {
        if let Some(l) = last {
            if (l > 0.0) != (v > 0.0) {
                count += 1;
            }
        }
        last = Some(v);
    }
    count
}

/// Linear interpolation at the unique sign change of `v`, if any.
pub fn locate_zero(v: &Field) -> Result<Option<f64>, AnalysisError> {
    let values = v.values();
    let grid = v.grid();
    let mut last: Option<(usize, f64)> = None;
    let mut found = None;
    let mut count = 0;
    for (i, val) in significant(values) {
        if let Some((j, l)) = last {
            if (l > 0.0) != (val > 0.0) {
                count += 1;
                let (xj, xi) = (grid.x(j), grid.x(i));
                found = Some(xj + (xi - xj) * l / (l - val));
            }
        }
        last = Some((i, val));
    }
    match count {
        0 => Ok(None),
        1 => Ok(found),
        _ => Err(AnalysisError::MultipleZeros { count }),
    }
}

/// The two threshold values of the forcing amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdReport {
    /// Below this amplitude the zero migrates to the corner.
    pub a_lower: f64,
    /// Above this amplitude the zero migrates to the origin.
    pub a_upper: f64,
    pub argmin_x: f64,
    pub argmax_x: f64,
}

const SCAN_STEP: f64 = 1e-3;

/// Integrals of `|f|√μ⁺` over `[−ξ, x]`, with the square-root endpoint
/// removed by the substitution `x = −ξ + t²` near `−ξ`.
struct WeightIntegral<'a> {
    p: &'a ModelParams,
    xi: f64,
    split: f64,
}

impl<'a> WeightIntegral<'a> {
    fn weight(&self, x: f64) -> f64 {
        self.p.f(x).abs() * libm::sqrt(self.p.mu(x).max(0.0))
    }

    fn tol(&self, a: f64, b: f64) -> f64 {
        let scale = (b - a).abs() * (self.weight(0.5 * (a + b)) + self.weight(a).max(self.weight(b)));
        (1e-10f64).min(1e-12 * scale).max(1e-300)
    }

    /// `∫_a^b |f|√μ`, `−ξ ≤ a ≤ b ≤ 0`.
    fn between(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let mut total = 0.0;
        if a < self.split {
            let hi = b.min(self.split);
            let (ta, tb) = (libm::sqrt((a + self.xi).max(0.0)), libm::sqrt(hi + self.xi));
            let g = |t: f64| self.weight(-self.xi + t * t) * 2.0 * t;
            let scale = (tb - ta) * (g(0.5 * (ta + tb)).abs() + g(tb).abs());
            total += adaptive_simpson(g, ta, tb, (1e-10f64).min(1e-12 * scale).max(1e-300));
        }
        if b > self.split {
            let lo = a.max(self.split);
            total += adaptive_simpson(|x| self.weight(x), lo, b, self.tol(lo, b));
        }
        total
    }
}

/// Extrapolate a function sampled at `x0 + k d`, `k = 1, 2, 3`, to `x0`.
fn quadratic_limit(r1: f64, r2: f64, r3: f64) -> f64 {
    3.0 * r1 - 3.0 * r2 + r3
}

/// Threshold amplitudes of the forcing, from their variational formulas.
///
/// The ratios are scanned on a `1e−3` grid over `[−ξ, 0]`, the best scan
/// point is polished by golden-section search to `1e−8`, and the `0/0`
/// endpoint values are taken as one-sided quadratic limits.
pub fn thresholds(p: &ModelParams) -> Result<ThresholdReport, AnalysisError> {
    p.validate()?;
    let xi = p.zero_crossing()?.xi;
    let w = WeightIntegral { p, xi, split: -0.5 * xi };
    let mu0_32 = libm::pow(p.mu(0.0).max(0.0), 1.5);
    let mu32 = |x: f64| libm::pow(p.mu(x).max(0.0), 1.5);
    let s2 = core::f64::consts::SQRT_2;

    let cells = libm::ceil(xi / SCAN_STEP) as usize;
    let xs: Vec<f64> = (0..=cells).map(|k| -xi + xi * k as f64 / cells as f64).collect();
    // cumulative integrals from the left and from the right, no cancellation
    let pieces: Vec<f64> = xs.windows(2).map(|ab| w.between(ab[0], ab[1])).collect();
    let mut left = alloc::vec![0.0; xs.len()];
    for k in 1..xs.len() {
        left[k] = left[k - 1] + pieces[k - 1];
    }
    let mut right = alloc::vec![0.0; xs.len()];
    for k in (0..xs.len() - 1).rev() {
        right[k] = right[k + 1] + pieces[k];
    }
    let last = xs.len() - 1;

    // a_upper: sup over [−ξ, 0) of √2(μ(0)^{3/2} − μ^{3/2}) / (3∫_x^0)
    let upper_ratio = |x: f64, integral: f64| s2 * (mu0_32 - mu32(x)) / (3.0 * integral);
    let upper_at = |x: f64| {
        let k = libm::floor((x + xi) / xi * cells as f64).clamp(0.0, (cells - 1) as f64) as usize;
        let integral = w.between(x, xs[k + 1]) + right[k + 1];
        upper_ratio(x, integral)
    };
    let mut best_up = (f64::NEG_INFINITY, -xi);
    for k in 0..last {
        let r = upper_ratio(xs[k], right[k]);
        if !r.is_finite() {
            best_up = (f64::INFINITY, xs[k]);
            break;
        }
        if r > best_up.0 {
            best_up = (r, xs[k]);
        }
    }
    if best_up.0.is_finite() && last >= 3 {
        let lim = quadratic_limit(
            upper_ratio(xs[last - 1], right[last - 1]),
            upper_ratio(xs[last - 2], right[last - 2]),
            upper_ratio(xs[last - 3], right[last - 3]),
        );
        if !lim.is_finite() || lim > 1e12 {
            best_up = (f64::INFINITY, 0.0);
        } else if lim > best_up.0 {
            best_up = (lim, 0.0);
        }
    }
    if best_up.0.is_finite() && best_up.1 < -SCAN_STEP {
        let a = (best_up.1 - SCAN_STEP).max(-xi);
        let b = (best_up.1 + SCAN_STEP).min(-SCAN_STEP);
        let x = golden_section_min(|x| -upper_at(x), a, b, 1e-8);
        let r = upper_at(x);
        if r > best_up.0 {
            best_up = (r, x);
        }
    }

    // a_lower: inf over (−ξ, 0] of √2 μ^{3/2} / (3∫_{−ξ}^x)
    let lower_ratio = |x: f64, integral: f64| s2 * mu32(x) / (3.0 * integral);
    let lower_at = |x: f64| {
        let k = libm::floor((x + xi) / xi * cells as f64).clamp(0.0, (cells - 1) as f64) as usize;
        let integral = left[k] + w.between(xs[k], x);
        lower_ratio(x, integral)
    };
    let mut best_low = (f64::INFINITY, 0.0);
    for k in 1..=last {
        let r = lower_ratio(xs[k], left[k]);
        if r.is_finite() && r < best_low.0 {
            best_low = (r, xs[k]);
        }
    }
    if last >= 3 {
        let lim = quadratic_limit(
            lower_ratio(xs[1], left[1]),
            lower_ratio(xs[2], left[2]),
            lower_ratio(xs[3], left[3]),
        );
        if lim.is_finite() && lim < best_low.0 {
            best_low = (lim, -xi);
        }
    }
    if best_low.1 > -xi + SCAN_STEP {
        let a = (best_low.1 - SCAN_STEP).max(-xi + SCAN_STEP);
        let b = (best_low.1 + SCAN_STEP).min(0.0);
        let x = golden_section_min(lower_at, a, b, 1e-8);
        let r = lower_at(x);
        if r < best_low.0 {
            best_low = (r, x);
        }
    }

    Ok(ThresholdReport {
        a_lower: best_low.0,
        a_upper: best_up.0,
        argmin_x: best_low.1,
        argmax_x: best_up.1,
    })
}

/// Smallest `K` with `|v(x)| ≤ K(√μ⁺(x) + ε^{1/3})` at every node of every
/// result.
pub fn check_uniform_bound(results: &[MinimizerResult]) -> Result<f64, AnalysisError> {
    if results.is_empty() {
        return Err(AnalysisError::Empty);
    }
    Ok(results
        .iter()
        .map(|r| bound_constant(&r.params, &r.field))
        .fold(0.0, f64::max))
}

/// The bound constant of a single field.
pub fn bound_constant(p: &ModelParams, v: &Field) -> f64 {
    let floor = libm::cbrt(p.epsilon);
    v.grid()
        .points()
        .zip(v.values())
        .map(|(x, u)| u.abs() / (libm::sqrt(p.mu(x).max(0.0)) + floor))
        .fold(0.0, f64::max)
}

/// `α = a f(ξ) / (√2 μ₁)`, the Painlevé parameter of the corner layer.
pub fn pii_alpha(p: &ModelParams) -> Result<f64, AnalysisError> {
    let z = p.zero_crossing()?;
    Ok(p.a * p.f(z.xi) / (core::f64::consts::SQRT_2 * z.mu1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

/// Map from the corner variable `s` to `x` and the amplitude scale.
fn corner_map(p: &ModelParams, side: Side) -> Result<(f64, f64, f64), AnalysisError> {
    let z = p.zero_crossing()?;
    let m = -z.mu1;
    let amp = libm::pow(m * p.epsilon, -1.0 / 3.0) / core::f64::consts::SQRT_2;
    let stretch = libm::pow(p.epsilon, 2.0 / 3.0) / libm::cbrt(m);
    let sign = match side {
        Side::Plus => 1.0,
        Side::Minus => -1.0,
    };
    Ok((sign * z.xi, sign * stretch, sign * amp))
}

/// `w±(s) = ±2^{−1/2}(−μ₁ε)^{−1/3} v(±ξ ± ε^{2/3}s/(−μ₁)^{1/3})` sampled at
/// `n` points of `[s_min, s_max]` by cubic interpolation of `v`.
pub fn rescale_w(
    v: &Field,
    p: &ModelParams,
    side: Side,
    s_min: f64,
    s_max: f64,
    n: usize,
) -> Result<Field, AnalysisError> {
    let (x0, stretch, amp) = corner_map(p, side)?;
    let g = v.grid();
    let xa = x0 + stretch * s_min;
    let xb = x0 + stretch * s_max;
    if xa.min(xb) < g.x_min() || xa.max(xb) > g.x_max() {
        return Err(AnalysisError::WindowExceedsDomain { lo: s_min, hi: s_max });
    }
    let spline = v.spline();
    let sg = Grid::new(s_min, s_max, n)?;
    Ok(Field::from_fn(sg, |s| amp * spline.eval(x0 + stretch * s))?)
}

/// Inverse of [`rescale_w`]: the value of `v` at `x` implied by `w`.
pub fn unscale_w(w: &Field, p: &ModelParams, side: Side, x: f64) -> Result<f64, AnalysisError> {
    let (x0, stretch, amp) = corner_map(p, side)?;
    let s = (x - x0) / stretch;
    let g = w.grid();
    if s < g.x_min() || s > g.x_max() {
        return Err(AnalysisError::WindowExceedsDomain { lo: s, hi: s });
    }
    Ok(w.spline().eval(s) / amp)
}

/// Reference profile for [`compare_profile`].
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileTarget {
    /// `√μ(0) tanh(s√(μ(0)/2))` with `x = center + ε s`.
    Tanh { center: f64 },
    /// A Painlevé solution in the corner variable; the field is `w±`.
    Pii(PiiSolution),
    /// `√μ⁺(x)`.
    SqrtMu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetKind {
    Tanh,
    Pii,
    SqrtMu,
}

impl ProfileTarget {
    pub fn kind(&self) -> TargetKind {
        match self {
            ProfileTarget::Tanh { .. } => TargetKind::Tanh,
            ProfileTarget::Pii(_) => TargetKind::Pii,
            ProfileTarget::SqrtMu => TargetKind::SqrtMu,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileComparison {
    pub sup_error: f64,
    /// Window in the target's own variable (`s` for tanh and Painlevé, `x`
    /// for `√μ`).
    pub window: (f64, f64),
    pub target: TargetKind,
}

const COMPARE_SAMPLES: usize = 2001;

/// Sup-norm distance between a field and a reference profile over `window`.
///
/// Samples are the field's own nodes inside the window plus a uniform set of
/// interpolated points.
pub fn compare_profile(
    field: &Field,
    target: &ProfileTarget,
    p: &ModelParams,
    window: (f64, f64),
) -> Result<ProfileComparison, AnalysisError> {
    let (lo, hi) = window;
    let g = field.grid();
    let to_x: &dyn Fn(f64) -> f64 = match target {
        ProfileTarget::Tanh { center } => &move |s: f64| center + p.epsilon * s,
        _ => &|s: f64| s,
    };
    let (xa, xb) = (to_x(lo), to_x(hi));
    if !(lo < hi) || xa < g.x_min() || xb > g.x_max() {
        return Err(AnalysisError::WindowExceedsDomain { lo, hi });
    }
    let mu0 = p.mu(0.0);
    let pii_spline = match target {
        ProfileTarget::Pii(sol) => {
            if lo < sol.grid.x_min() || hi > sol.grid.x_max() {
                return Err(AnalysisError::WindowExceedsDomain { lo, hi });
            }
            Some(sol.spline())
        }
        _ => None,
    };
    let reference = |x: f64| -> f64 {
        match target {
            ProfileTarget::Tanh { center } => {
                let s = (x - center) / p.epsilon;
                libm::sqrt(mu0) * libm::tanh(s * libm::sqrt(mu0 / 2.0))
            }
            ProfileTarget::Pii(_) => pii_spline.as_ref().map(|sp| sp.eval(x)).unwrap_or(f64::NAN),
            ProfileTarget::SqrtMu => libm::sqrt(p.mu(x).max(0.0)),
        }
    };
    let spline = field.spline();
    let mut sup = 0.0f64;
    for (x, v) in g.points().zip(field.values()) {
        if x >= xa && x <= xb {
            sup = sup.max((v - reference(x)).abs());
        }
    }
    for k in 0..COMPARE_SAMPLES {
        let x = xa + (xb - xa) * k as f64 / (COMPARE_SAMPLES - 1) as f64;
        sup = sup.max((spline.eval(x) - reference(x)).abs());
    }
    Ok(ProfileComparison {
        sup_error: sup,
        window,
        target: target.kind(),
    })
}
