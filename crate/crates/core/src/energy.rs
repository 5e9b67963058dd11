//! Discrete energy, renormalised energy, Euler-Lagrange residual and energy
//! gradient on a uniform grid.
//!
//! The gradient term is integrated edge by edge,
//! `Σ h ε/2 ((u_{i+1} − u_i)/h)²`, and the pointwise terms by the trapezoid
//! rule. With this choice the exact gradient of the discrete energy is
//! `−(h/ε)` times the three-point Euler-Lagrange residual at interior nodes,
//! so the gradient flow and Newton's method minimise the same functional.

use alloc::vec::Vec;

use crate::model::{Field, Grid, ModelError, ModelParams};
use crate::numeric::adaptive_simpson;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    /// `E(u)`
    pub e_total: f64,
    /// `E(u) + ∫_{|x|<ξ} μ²/(4ε)`
    pub e_renormalized: f64,
    pub gradient_term: f64,
    pub potential_term: f64,
    pub quartic_term: f64,
    pub forcing_term: f64,
    /// Set when `h > ε/2`: the interior layer is not resolved.
    pub layer_unresolved: bool,
}

/// `∫_{|x|<ξ} μ²/(4ε)`, the `u`-independent shift of the renormalised energy.
pub fn renormalization_constant(p: &ModelParams) -> Result<f64, ModelError> {
    let xi = p.zero_crossing()?.xi;
    let half = adaptive_simpson(
        |x| {
            let m = p.mu(x);
            m * m
        },
        0.0,
        xi,
        1e-13,
    );
    Ok(2.0 * half / (4.0 * p.epsilon))
}

/// A [`ModelParams`] sampled on a grid, with the renormalisation constant
/// computed once.
#[derive(Debug, Clone)]
pub struct DiscreteProblem {
    params: ModelParams,
    grid: Grid,
    mu: Vec<f64>,
    f: Vec<f64>,
    renorm: f64,
}

impl DiscreteProblem {
    pub fn new(params: &ModelParams, grid: Grid) -> Result<Self, ModelError> {
        params.validate()?;
        let renorm = renormalization_constant(params)?;
        Ok(Self {
            mu: grid.points().map(|x| params.mu(x)).collect(),
            f: grid.points().map(|x| params.f(x)).collect(),
            params: params.clone(),
            grid,
            renorm,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn mu_samples(&self) -> &[f64] {
        &self.mu
    }

    pub fn f_samples(&self) -> &[f64] {
        &self.f
    }

    pub fn renormalization(&self) -> f64 {
        self.renorm
    }

    pub fn layer_unresolved(&self) -> bool {
        self.grid.h() > self.params.epsilon / 2.0
    }

    fn check(&self, u: &[f64]) -> Result<(), ModelError> {
        if u.len() != self.grid.n() {
            return Err(ModelError::LengthMismatch {
                expected: self.grid.n(),
                got: u.len(),
            });
        }
        Ok(())
    }

    pub fn energy(&self, u: &[f64]) -> Result<EnergyReport, ModelError> {
        self.check(u)?;
        Ok(self.energy_unchecked(u))
    }

    pub(crate) fn energy_unchecked(&self, u: &[f64]) -> EnergyReport {
        let eps = self.params.epsilon;
        let a = self.params.a;
        let h = self.grid.h();
        let n = u.len();
        let gradient_term = u
            .windows(2)
            .map(|w| {
                let d = w[1] - w[0];
                d * d
            })
            .sum::<f64>()
            * eps
            / (2.0 * h);
        let (mut pot, mut quart, mut forc) = (0.0, 0.0, 0.0);
        for i in 0..n {
            let w = if i == 0 || i + 1 == n { 0.5 * h } else { h };
            let v = u[i];
            let v2 = v * v;
            pot += w * self.mu[i] * v2;
            quart += w * v2 * v2;
            forc += w * self.f[i] * v;
        }
        let potential_term = -pot / (2.0 * eps);
        let quartic_term = quart / (4.0 * eps);
        let forcing_term = -a * forc;
        let e_total = gradient_term + potential_term + quartic_term + forcing_term;
        EnergyReport {
            e_total,
            e_renormalized: e_total + self.renorm,
            gradient_term,
            potential_term,
            quartic_term,
            forcing_term,
            layer_unresolved: self.layer_unresolved(),
        }
    }

    /// `ε² D₂u + μu − u³ + εaf` at interior nodes, `u` at the two ends.
    pub fn residual(&self, u: &[f64]) -> Result<Vec<f64>, ModelError> {
        self.check(u)?;
        Ok(self.residual_unchecked(u))
    }

    pub(crate) fn residual_unchecked(&self, u: &[f64]) -> Vec<f64> {
        let eps = self.params.epsilon;
        let ea = eps * self.params.a;
        let h = self.grid.h();
        let c = eps * eps / (h * h);
        let n = u.len();
        let mut r = alloc::vec![0.0; n];
        r[0] = u[0];
        r[n - 1] = u[n - 1];
        for i in 1..n - 1 {
            let v = u[i];
            r[i] = c * (u[i + 1] - 2.0 * v + u[i - 1]) + self.mu[i] * v - v * v * v + ea * self.f[i];
        }
        r
    }

    /// Exact gradient of the discrete energy with respect to the nodal values.
    pub fn gradient(&self, u: &[f64]) -> Result<Vec<f64>, ModelError> {
        self.check(u)?;
        let eps = self.params.epsilon;
        let a = self.params.a;
        let h = self.grid.h();
        let n = u.len();
        let mut g: Vec<f64> = self
            .residual_unchecked(u)
            .into_iter()
            .map(|r| -h / eps * r)
            .collect();
        let local = |i: usize| {
            let v = u[i];
            0.5 * h * ((-self.mu[i] * v + v * v * v) / eps - a * self.f[i])
        };
        g[0] = eps / h * (u[0] - u[1]) + local(0);
        g[n - 1] = eps / h * (u[n - 1] - u[n - 2]) + local(n - 1);
        Ok(g)
    }

    /// Largest residual over interior nodes; boundary values are imposed
    /// exactly by the solvers.
    pub fn residual_inf(&self, u: &[f64]) -> f64 {
        let r = self.residual_unchecked(u);
        r[1..r.len() - 1].iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn problem_for(p: &ModelParams, u: &Field) -> Result<DiscreteProblem, ModelError> {
    DiscreteProblem::new(p, *u.grid())
}

pub fn energy(p: &ModelParams, u: &Field) -> Result<EnergyReport, ModelError> {
    Ok(problem_for(p, u)?.energy_unchecked(u.values()))
}

pub fn el_residual(p: &ModelParams, u: &Field) -> Result<Field, ModelError> {
    let r = problem_for(p, u)?.residual_unchecked(u.values());
    Field::new(*u.grid(), r)
}

pub fn energy_gradient(p: &ModelParams, u: &Field) -> Result<Field, ModelError> {
    let g = problem_for(p, u)?.gradient(u.values())?;
    Field::new(*u.grid(), g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::vec::Vec;

    fn setup(eps: f64, a: f64) -> (ModelParams, Grid) {
        let p = ModelParams::gaussian(eps, a, 0.5).unwrap();
        (p, Grid::symmetric(4.0, 801).unwrap())
    }

    fn random_field(g: Grid, rng: &mut ChaCha8Rng) -> Field {
        Field::new(g, (0..g.n()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
    }

    #[test]
    fn zero_field_energy() {
        let (p, g) = setup(0.05, 1.0);
        let r = energy(&p, &Field::zeros(g)).unwrap();
        assert_eq!(r.e_total, 0.0);
        assert!(r.e_renormalized > 0.0);
        // ∫_{|x|<ξ} μ² by an independent composite rule
        let xi = p.zero_crossing().unwrap().xi;
        let m = 200_000;
        let hh = 2.0 * xi / m as f64;
        let mut s = 0.0;
        for k in 0..m {
            let x = -xi + (k as f64 + 0.5) * hh;
            let mu = libm::exp(-x * x) - 0.5;
            s += mu * mu * hh;
        }
        assert_relative_eq!(r.e_renormalized, s / (4.0 * 0.05), max_relative = 1e-9);
    }

    #[test]
    fn report_terms_sum_to_total() {
        let (p, g) = setup(0.05, 1.3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_field(g, &mut rng);
        let r = energy(&p, &u).unwrap();
        let sum = r.gradient_term + r.potential_term + r.quartic_term + r.forcing_term;
        assert!((sum - r.e_total).abs() <= 1e-12 * r.e_total.abs());
        assert!(!r.layer_unresolved);
        let coarse = Grid::symmetric(4.0, 41).unwrap();
        assert!(energy(&p, &Field::zeros(coarse)).unwrap().layer_unresolved);
    }

    #[test]
    fn residual_of_zero_field() {
        let (p, g) = setup(0.05, 0.0);
        let r = el_residual(&p, &Field::zeros(g)).unwrap();
        assert!(r.values().iter().all(|v| *v == 0.0));
        let (p, g) = setup(0.05, 2.0);
        let r = el_residual(&p, &Field::zeros(g)).unwrap();
        for (i, x) in g.points().enumerate().skip(1).take(g.n() - 2) {
            assert_relative_eq!(r.values()[i], 0.05 * 2.0 * p.f(x), epsilon = 1e-15);
        }
        let gz = energy_gradient(&setup(0.05, 0.0).0, &Field::zeros(g)).unwrap();
        assert!(gz.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn gradient_matches_central_difference() {
        let (p, g) = setup(0.05, 1.0);
        let problem = DiscreteProblem::new(&p, g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let u: Vec<f64> = (0..g.n()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let d: Vec<f64> = (0..g.n()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let grad = problem.gradient(&u).unwrap();
            let dot: f64 = grad.iter().zip(&d).map(|(a, b)| a * b).sum();
            let t = 1e-6;
            let shift = |s: f64| -> Vec<f64> { u.iter().zip(&d).map(|(a, b)| a + s * b).collect() };
            let e = |v: &[f64]| problem.energy(v).unwrap().e_total;
            let fd = (e(&shift(t)) - e(&shift(-t))) / (2.0 * t);
            let scale = e(&u).abs();
            assert!((dot - fd).abs() <= 1e-6 * scale, "dot {dot} fd {fd} E {scale}");
        }
    }

    #[test]
    fn odd_reflection_preserves_energy() {
        let (p, g) = setup(0.05, 1.7);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let u = random_field(g, &mut rng);
            let e1 = energy(&p, &u).unwrap().e_total;
            let e2 = energy(&p, &u.odd_reflection().unwrap()).unwrap().e_total;
            assert!((e1 - e2).abs() <= 1e-12 * e1.abs().max(1.0));
        }
    }

    #[test]
    fn absolute_value_does_not_raise_energy_without_forcing() {
        let (p, g) = setup(0.05, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let u = random_field(g, &mut rng);
            let abs = Field::new(g, u.values().iter().map(|v| v.abs()).collect()).unwrap();
            assert!(energy(&p, &abs).unwrap().e_total <= energy(&p, &u).unwrap().e_total + 1e-12);
        }
    }

    #[test]
    fn renormalized_energy_of_sqrt_mu_plus_is_small_and_nonnegative() {
        // u = √μ⁺: the bulk integrand (u² − μ)² vanishes; what is left is the
        // gradient energy, dominated by the corner where |u'| blows up.
        let p = ModelParams::gaussian(0.01, 0.0, 0.5).unwrap();
        let e_at = |n: usize| {
            let g = Grid::symmetric(4.0, n).unwrap();
            let u = Field::from_fn(g, |x| libm::sqrt(p.mu(x).max(0.0))).unwrap();
            energy(&p, &u).unwrap().e_renormalized
        };
        let (e1, e2) = (e_at(4001), e_at(8001));
        assert!(e1 >= 0.0 && e2 >= 0.0);
        assert!(e2 < 0.05 && e1 < 0.05);
    }
}
