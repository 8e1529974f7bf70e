//! Bound-state spectrum of a charged fractional-spin particle in a planar
//! Coulomb field.
//!
//! Four routes to the same levels:
//! - [`closed_form`]: the analytic semiclassical formula and its limits,
//! - [`wkb`]: the full action-integral quantization and the split form,
//! - [`oracle`]: two-sided shooting on the radial wave equation,
//! - the planar nonrelativistic formula as a sanity limit.
//!
//! [`spectrum`] sweeps levels and renders comparison tables.

pub mod cli;
pub mod closed_form;
pub mod cubic;
pub mod error;
pub mod model;
pub mod ode;
pub mod oracle;
pub mod quadrature;
pub mod roots;
pub mod spectrum;
pub mod wkb;

pub use closed_form::{energy_closed_form, energy_nonrel, principal_expansion, sigma_l};
pub use error::{Result, SpectrumError};
pub use model::{
    kinetic_ev, l_prime, lambda_sq, AnyonParams, Diagnostics, EnergyResult, Method,
    PhysicalConstants, QuantumNumbers,
};
pub use oracle::{eigen_solve, RadialProblem, RadialSolution};
pub use wkb::{energy_wkb_full, energy_wkb_split, phase_integral, turning_points, TurningPoints};
