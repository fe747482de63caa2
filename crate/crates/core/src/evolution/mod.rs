//! Deterministic and stochastic dynamics.
//!
//! Two stochastic models share the same lifted matrices `Q̂_i` but differ in
//! what they assume about the joint distribution:
//!
//! * the **independence** model keeps node marginals `p_i(t)` and assumes the
//!   joint is always their product, `p_i(t+1) = Q̂_i (⋉_j p_j(t))`. As a map on
//!   joint distributions it is not linear (a non-homogeneous chain);
//! * the **conditional-independence** model assumes nodes update
//!   independently given the full current state, so the joint evolves by the
//!   homogeneous chain `p(t+1) = Q p(t)` with `Q = Q̂_1 * … * Q̂_n`.
//!
//! From any point mass both models agree for one step; in general they do
//! not.

mod deterministic;
mod monte_carlo;
mod stochastic;

pub use deterministic::{simulate_deterministic, step_deterministic, DeterministicTrajectory};
pub use monte_carlo::monte_carlo_oracle;
pub use stochastic::{
    compare_models, detect_stationary, simulate_conditional, simulate_independent,
    simulate_stochastic, step_conditional, step_independent, DivergenceReport, FactorState,
    Initial, Mode, SimulationOptions, StochasticTrajectory,
};
