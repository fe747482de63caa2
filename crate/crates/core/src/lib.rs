//! Algebraic state-space models of logical dynamic systems.
//!
//! Networks of finite-valued nodes are turned into linear-looking global
//! systems with the semi-tensor product (STP):
//!
//! * [`algebra`]: STP, Kronecker and Khatri-Rao products, swap,
//!   power-reducing and projection matrices, with index-arithmetic fast paths
//!   for logical matrices;
//! * [`model`]: networks, rule lifting and global assembly;
//! * [`evolution`]: deterministic trajectories and the two stochastic models;
//! * [`consistency`]: deciding when the two stochastic models coincide.
//!
//! ```
//! use lds_core::algebra::StochasticMatrix;
//! use lds_core::model::{assemble_global, GlobalSystem, Lifted};
//!
//! let q1 = StochasticMatrix::from_rows(&[[0.3, 0.5, 1.0, 0.2], [0.7, 0.5, 0.0, 0.8]])?;
//! let q2 = StochasticMatrix::from_rows(&[[0.4, 0.2, 0.5, 0.7], [0.6, 0.8, 0.5, 0.3]])?;
//! let GlobalSystem::Stochastic { transition, .. } =
//!     assemble_global(Lifted::Stochastic(vec![q1, q2]))?
//! else {
//!     unreachable!()
//! };
//! assert!((transition.get(0, 0) - 0.12).abs() < 1e-12);
//! # Ok::<(), lds_core::Error>(())
//! ```

pub mod algebra;
pub mod consistency;
mod error;
pub mod evolution;
pub mod limits;
pub mod model;

pub use error::{Error, Result};
