//! Reference computations that share no code with the library.

#![allow(dead_code)]

use std::f64::consts::PI;

/// Ai and Ai' from the large-argument expansion, coefficients built as
/// explicit products rather than by recursion.
pub fn airy_tail(s: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * s.powf(1.5);
    let mut sum_u = 0.0;
    let mut sum_v = 0.0;
    for k in 0..25u32 {
        let mut num = 1.0f64;
        let mut j = 2 * k + 1;
        while j + 1 <= 6 * k {
            num *= j as f64;
            j += 2;
        }
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        let u = num / (216f64.powi(k as i32) * fact);
        let v = if k == 0 { 1.0 } else { -(6.0 * k as f64 + 1.0) / (6.0 * k as f64 - 1.0) * u };
        let term = (-1f64).powi(k as i32) / zeta.powi(k as i32);
        if (u * term).abs() < 1e-18 {
            break;
        }
        sum_u += u * term;
        sum_v += v * term;
    }
    let e = (-zeta).exp() / (2.0 * PI.sqrt());
    (e / s.powf(0.25) * sum_u, -e * s.powf(0.25) * sum_v)
}

/// Classical fourth-order Runge-Kutta for `y'' = s y + 2y³ + α`, stepping
/// from `s0` with step `h` (negative to go left) until `stop` returns true
/// or `n` steps elapse. The callback sees `(s, y, y')` after every step.
fn integrate<F: FnMut(f64, f64, f64) -> bool>(alpha: f64, s0: f64, y0: f64, dy0: f64, h: f64, n: usize, mut stop: F) {
    let acc = |s: f64, y: f64| s * y + 2.0 * y * y * y + alpha;
    let (mut s, mut y, mut v) = (s0, y0, dy0);
    for _ in 0..n {
        let k1 = (v, acc(s, y));
        let k2 = (v + 0.5 * h * k1.1, acc(s + 0.5 * h, y + 0.5 * h * k1.0));
        let k3 = (v + 0.5 * h * k2.1, acc(s + 0.5 * h, y + 0.5 * h * k2.0));
        let k4 = (v + h * k3.1, acc(s + h, y + h * k3.0));
        y += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        v += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        s += h;
        if stop(s, y, v) {
            return;
        }
    }
}

/// Outcome of one leftward shot for the `α = 0` problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shot {
    /// Trajectory runs off above the `√(|s|/2)` envelope.
    Above,
    /// Trajectory turns over and falls below zero.
    Below,
}

/// Shooting oracle for the `α = 0` positive solution with `y ~ Ai` at the
/// right end: fix `y(R) = Ai(R)` and bisect on the slope `y'(R)` until the
/// leftward trajectory neither escapes above nor collapses below the
/// `√(|s|/2)` branch on `[−L, R]`. Returns `y(0)` of the limiting shot.
pub fn shoot_hastings_mcleod(l: f64, r: f64, h: f64) -> f64 {
    let (ai, dai) = airy_tail(r);
    let steps = ((l + r) / h).round() as usize;
    let step = -(l + r) / steps as f64;
    let classify = |slope: f64| -> Shot {
        let mut out = Shot::Above;
        let mut decided = false;
        integrate(0.0, r, ai, slope, step, steps, |s, y, _| {
            let envelope = (s.min(0.0).abs() / 2.0).sqrt();
            if y > envelope + 1.0 {
                out = Shot::Above;
                decided = true;
            } else if y < 0.0 {
                out = Shot::Below;
                decided = true;
            }
            decided
        });
        if !decided {
            out = Shot::Above;
        }
        out
    };
    // a steeper negative slope makes the solution larger to the left
    let mut lo = dai * 1.5;
    let mut hi = dai * 0.5;
    assert_eq!(classify(lo), Shot::Above);
    assert_eq!(classify(hi), Shot::Below);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        match classify(mid) {
            Shot::Above => lo = mid,
            Shot::Below => hi = mid,
        }
    }
    let slope = 0.5 * (lo + hi);
    let mut y0 = f64::NAN;
    let to_zero = (r / h).round() as usize;
    let step0 = -r / to_zero as f64;
    integrate(0.0, r, ai, slope, step0, to_zero, |_, y, _| {
        y0 = y;
        false
    });
    y0
}

/// Composite Gauss-Legendre (5-point) quadrature on `n` equal panels.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let nodes = [
        (0.0, 128.0 / 225.0),
        (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
        (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
        (0.906_179_845_938_664, 0.236_926_885_056_189_1),
        (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    ];
    let w = (b - a) / n as f64;
    let mut total = 0.0;
    for k in 0..n {
        let c = a + (k as f64 + 0.5) * w;
        for (t, wt) in nodes {
            total += wt * f(c + 0.5 * w * t);
        }
    }
    0.5 * w * total
}
