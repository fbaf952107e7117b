//! Gauge-invariant discrete Yang–Mills calculus on a double complex.
//!
//! The crate models SU(2) gauge fields as matrix-valued cochains on a
//! combinatorial 4-D block or on two blocks glued into a closed
//! combinatorial 4-sphere, and provides:
//!
//! - [`algebra`]: 2×2 complex matrices with the su(2)/SU(2) structure,
//! - [`complex4`]: cells, chains, boundary operator and gluing,
//! - [`cochain`]: dense forms, connections, gauge fields, file format,
//! - [`calculus`]: coboundary, cup product, Hodge star, codifferential,
//!   inner product and the Green boundary term,
//! - [`gauge`]: curvature, covariant differential, gauge transforms,
//!   Bianchi and Yang–Mills residuals, self-duality,
//! - [`solver`]: action, its gradient, and Armijo gradient descent.

pub mod algebra;
pub mod calculus;
pub mod cochain;
pub mod complex4;
pub mod error;
pub mod gauge;
pub mod solver;

pub use algebra::{embed_su2, exp_su2, project_su2, Matrix2, Su2Vector};
pub use cochain::{
    random_connection, random_form, random_gauge, sum_gauge, Cochain, Connection, GaugeField, SumProfile,
};
pub use complex4::{Cell, Chain, Chart, CopyFlag, DirectionSet, Domain, MultiIndex, Topology};
pub use error::{Error, Result};
pub use gauge::{curvature, Duality, GaugeTransformed};
pub use solver::{minimize, solve_self_dual, Objective, SolverConfig, SolverReport};
