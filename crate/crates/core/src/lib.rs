//! Numerical core for the one-dimensional light-matter interaction energy
//!
//! ```text
//! E(u) = ∫ ε/2 |u'|² − μ(x)u²/(2ε) + u⁴/(4ε) − a f(x) u dx
//! ```
//!
//! and for the second Painlevé equation `y'' = s y + 2y³ + α` that governs
//! the corner layers of its minimizers.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line front end and parallel sweeps live in the `shadowkink` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod energy;
pub mod minimize;
pub mod model;
pub mod numeric;
pub mod painleve;

pub use analysis::{
    check_uniform_bound, compare_profile, locate_zero, pii_alpha, rescale_w, thresholds,
    AnalysisError, ProfileComparison, ProfileTarget, Side, TargetKind, ThresholdReport,
};
pub use energy::{el_residual, energy, energy_gradient, DiscreteProblem, EnergyReport};
pub use minimize::{
    build_guess, continue_in, minimize, GuessKind, InitialGuess, MinimizeError, MinimizerResult,
    Schedule, SweepParam, SolverOptions,
};
pub use model::{Field, FKind, Grid, ModelError, ModelParams, MuKind, Tabulated};
pub use painleve::{
    airy_ai, airy_ai_prime, cubic_roots, second_variation_floor, solve_pii, theta_diagnostic,
    Branch, CubicRoots, PainleveError, PiiSolution,
};
