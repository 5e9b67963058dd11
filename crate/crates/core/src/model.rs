//! Problem data: the light profile `μ`, the induced field `f`, the model
//! parameters and the uniform grids fields live on.

use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::numeric::{bisect, CubicSpline};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("parameter `{name}` = {value} is out of range ({expected})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("field has {got} values but the grid has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },
    #[error("field value at node {0} is not finite")]
    NonFinite(usize),
    #[error("tabulated function: {0}")]
    BadTable(String),
    #[error("no sign change of mu found on (0, {0}]")]
    RootNotBracketed(f64),
    #[error("hypothesis violated near x = {x}: {what}")]
    HypothesisViolated { what: &'static str, x: f64 },
    #[error("grids are not symmetric about the origin")]
    NotSymmetric,
}

/// A function given by samples, evaluated through a natural cubic spline.
/// Outside the sampled range the end values are held constant.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    spline: CubicSpline,
}

impl Tabulated {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, ModelError> {
        if xs.len() != ys.len() {
            return Err(ModelError::BadTable(alloc::format!(
                "{} abscissae but {} values",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 4 {
            return Err(ModelError::BadTable("need at least 4 samples".into()));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(ModelError::BadTable("non-finite sample".into()));
        }
        if let Some(i) = xs.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(ModelError::BadTable(alloc::format!(
                "x is not strictly increasing at row {}",
                i + 2
            )));
        }
        let spline = CubicSpline::new(xs, ys)
            .ok_or_else(|| ModelError::BadTable("spline construction failed".into()))?;
        Ok(Self { spline })
    }

    /// Tabulate `g` on `n` equispaced points of `[lo, hi]`.
    pub fn sample<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64, n: usize) -> Result<Self, ModelError> {
        let h = (hi - lo) / (n.max(2) - 1) as f64;
        let xs: Vec<f64> = (0..n).map(|i| lo + h * i as f64).collect();
        let ys = xs.iter().map(|&x| g(x)).collect();
        Self::new(xs, ys)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.spline.eval(x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.spline.derivative(x)
    }

    pub fn range(&self) -> (f64, f64) {
        (self.spline.x_min(), self.spline.x_max())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MuKind {
    /// `μ(x) = exp(−x²) − χ`
    Gaussian,
    Custom(Tabulated),
}

#[derive(Debug, Clone, PartialEq)]
pub enum FKind {
    /// `f = −μ'/2`, which is `x exp(−x²)` for the Gaussian profile.
    HalfNegMuPrime,
    Custom(Tabulated),
}

/// One problem instance `(ε, a, χ, μ, f)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub epsilon: f64,
    pub a: f64,
    pub chi: f64,
    pub mu: MuKind,
    pub f: FKind,
}

/// The positive zero `ξ` of `μ` and the slope `μ₁ = μ'(ξ) < 0` there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroCrossing {
    pub xi: f64,
    pub mu1: f64,
}

impl ModelParams {
    /// Gaussian light profile with `f = −μ'/2`.
    pub fn gaussian(epsilon: f64, a: f64, chi: f64) -> Result<Self, ModelError> {
        let p = Self {
            epsilon,
            a,
            chi,
            mu: MuKind::Gaussian,
            f: FKind::HalfNegMuPrime,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(ModelError::InvalidParameter {
                name: "epsilon",
                value: self.epsilon,
                expected: "epsilon > 0",
            });
        }
        if !(self.a >= 0.0 && self.a.is_finite()) {
            return Err(ModelError::InvalidParameter {
                name: "a",
                value: self.a,
                expected: "a >= 0",
            });
        }
        if !(self.chi > 0.0 && self.chi < 1.0) {
            return Err(ModelError::InvalidParameter {
                name: "chi",
                value: self.chi,
                expected: "0 < chi < 1",
            });
        }
        Ok(())
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        Self {
            epsilon,
            ..self.clone()
        }
    }

    pub fn with_a(&self, a: f64) -> Self {
        Self { a, ..self.clone() }
    }

    pub fn mu(&self, x: f64) -> f64 {
        match &self.mu {
            MuKind::Gaussian => libm::exp(-x * x) - self.chi,
            MuKind::Custom(t) => t.eval(x),
        }
    }

    pub fn mu_prime(&self, x: f64) -> f64 {
        match &self.mu {
            MuKind::Gaussian => -2.0 * x * libm::exp(-x * x),
            MuKind::Custom(t) => t.derivative(x),
        }
    }

    pub fn f(&self, x: f64) -> f64 {
        match &self.f {
            FKind::HalfNegMuPrime => -0.5 * self.mu_prime(x),
            FKind::Custom(t) => t.eval(x),
        }
    }

    /// `sup μ`, attained at the origin for an admissible profile.
    pub fn mu_max(&self) -> f64 {
        self.mu(0.0)
    }

    pub fn zero_crossing(&self) -> Result<ZeroCrossing, ModelError> {
        match &self.mu {
            MuKind::Gaussian => {
                let xi = libm::sqrt(-libm::log(self.chi));
                Ok(ZeroCrossing {
                    xi,
                    mu1: -2.0 * xi * self.chi,
                })
            }
            MuKind::Custom(t) => {
                let hi = t.range().1.abs().max(t.range().0.abs());
                let xi = bisect(|x| t.eval(x), 0.0, hi, 1e-14)
                    .filter(|_| t.eval(0.0) > 0.0)
                    .ok_or(ModelError::RootNotBracketed(hi))?;
                Ok(ZeroCrossing {
                    xi,
                    mu1: t.derivative(xi),
                })
            }
        }
    }

    /// Dense-sample check of the standing hypotheses on `[−x_max, x_max]`:
    /// `μ` even, decreasing on `(0, ∞)` with a single positive zero; `f` odd
    /// and nonnegative on `(0, ∞)`.
    pub fn check_hypotheses(&self, x_max: f64) -> Result<(), ModelError> {
        self.validate()?;
        let n = 4001;
        let h = x_max / (n - 1) as f64;
        let mu_scale = self.mu(0.0).abs().max(1e-300);
        let f_scale = (0..n)
            .map(|i| self.f(h * i as f64).abs())
            .fold(0.0, f64::max)
            .max(1e-300);
        let tol = 1e-9;
        if self.mu(0.0) <= 0.0 {
            return Err(ModelError::HypothesisViolated {
                what: "mu(0) must be positive",
                x: 0.0,
            });
        }
        let mut prev = self.mu(0.0);
        let mut crossings = 0;
        for i in 1..n {
            let x = h * i as f64;
            let m = self.mu(x);
            if (m - self.mu(-x)).abs() > tol * mu_scale {
                return Err(ModelError::HypothesisViolated {
                    what: "mu is not even",
                    x,
                });
            }
            if m > prev + tol * mu_scale {
                return Err(ModelError::HypothesisViolated {
                    what: "mu is not decreasing on (0, inf)",
                    x,
                });
            }
            if (prev > 0.0) != (m > 0.0) {
                crossings += 1;
            }
            prev = m;
            let fx = self.f(x);
            if (fx + self.f(-x)).abs() > tol * f_scale {
                return Err(ModelError::HypothesisViolated {
                    what: "f is not odd",
                    x,
                });
            }
            if fx < -tol * f_scale {
                return Err(ModelError::HypothesisViolated {
                    what: "f is negative on (0, inf)",
                    x,
                });
            }
        }
        if crossings != 1 {
            return Err(ModelError::HypothesisViolated {
                what: "mu must change sign exactly once on (0, inf)",
                x: x_max,
            });
        }
        Ok(())
    }

    /// `|f|` at the truncation boundary when it exceeds `1e-12`.
    pub fn boundary_forcing_excess(&self, x_max: f64) -> Option<f64> {
        let v = self.f(x_max).abs().max(self.f(-x_max).abs());
        (v >= 1e-12).then_some(v)
    }
}

/// Uniform grid `x_i = x_min + i h`, `i = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n: usize,
    h: f64,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self, ModelError> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(ModelError::InvalidGrid("need finite x_min < x_max"));
        }
        if n < 3 {
            return Err(ModelError::InvalidGrid("need at least 3 nodes"));
        }
        Ok(Self {
            x_min,
            x_max,
            n,
            h: (x_max - x_min) / (n - 1) as f64,
        })
    }

    pub fn symmetric(x_max: f64, n: usize) -> Result<Self, ModelError> {
        Self::new(-x_max, x_max, n)
    }

    /// Symmetric grid on `[−x_max, x_max]` with an odd node count and
    /// `h ≤ ε/5`.
    pub fn for_epsilon(epsilon: f64, x_max: f64) -> Result<Self, ModelError> {
        let cells = libm::ceil(2.0 * x_max * 5.0 / epsilon) as usize;
        let cells = cells + cells % 2;
        Self::symmetric(x_max, cells + 1)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Node `i`; computed from the nearer end so that symmetric grids are
    /// exactly mirror-symmetric.
    pub fn x(&self, i: usize) -> f64 {
        let last = self.n - 1;
        if 2 * i == last {
            0.5 * (self.x_min + self.x_max)
        } else if 2 * i < last {
            self.x_min + self.h * i as f64
        } else {
            self.x_max - self.h * (last - i) as f64
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.x(i))
    }

    pub fn is_symmetric(&self) -> bool {
        (self.x_min + self.x_max).abs() <= 1e-14 * self.x_max.abs().max(1.0)
    }

    /// Grid over the same interval with the spacing halved.
    pub fn refined(&self) -> Self {
        Self::new(self.x_min, self.x_max, 2 * self.n - 1).expect("refining a valid grid")
    }
}

/// Real samples on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self, ModelError> {
        if values.len() != grid.n() {
            return Err(ModelError::LengthMismatch {
                expected: grid.n(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite(i));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: alloc::vec![0.0; grid.n()],
        }
    }

    pub fn from_fn<G: Fn(f64) -> f64>(grid: Grid, g: G) -> Result<Self, ModelError> {
        Self::new(grid, grid.points().map(g).collect())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// The odd reflection `x ↦ −v(−x)`; requires a symmetric grid.
    pub fn odd_reflection(&self) -> Result<Self, ModelError> {
        if !self.grid.is_symmetric() {
            return Err(ModelError::NotSymmetric);
        }
        Ok(Self {
            grid: self.grid,
            values: self.values.iter().rev().map(|v| -v).collect(),
        })
    }

    /// The mirror image `x ↦ v(−x)`; requires a symmetric grid.
    pub fn mirror(&self) -> Result<Self, ModelError> {
        if !self.grid.is_symmetric() {
            return Err(ModelError::NotSymmetric);
        }
        Ok(Self {
            grid: self.grid,
            values: self.values.iter().rev().copied().collect(),
        })
    }

    pub fn negated(&self) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| -v).collect(),
        }
    }

    /// Natural cubic spline through the samples.
    pub fn spline(&self) -> CubicSpline {
        CubicSpline::new(self.grid.points().collect(), self.values.clone())
            .expect("grid abscissae are strictly increasing")
    }

    /// Resample onto another grid by cubic interpolation (held constant
    /// outside the original range).
    pub fn resample(&self, grid: Grid) -> Self {
        let s = self.spline();
        Self {
            grid,
            values: grid.points().map(|x| s.eval(x)).collect(),
        }
    }
}

/// Free-function forms of the evaluation routines.
pub fn mu_eval(p: &ModelParams, x: f64) -> f64 {
    p.mu(x)
}

pub fn f_eval(p: &ModelParams, x: f64) -> f64 {
    p.f(x)
}

pub fn xi_of(p: &ModelParams) -> Result<ZeroCrossing, ModelError> {
    p.zero_crossing()
}
