//! Wave laboratory for the one-dimensional compressible Navier-Stokes/Allen-Cahn
//! system in Lagrangian coordinates with pressure `p(v) = v^-γ`.

pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod output;
pub mod profiles;
pub mod psystem;
pub mod report;
pub mod riemann;
pub mod run;
pub mod scalar;
pub mod scenario;
pub mod shift;
pub mod solver;

pub use error::{Error, Result};
pub use psystem::{Family, FluidState, GasLaw, Potential};
pub use riemann::{EndStates, Phase, WaveFan};
pub use scalar::Real;

/// Double precision gas law used by the simulator.
pub type GasLaw64 = GasLaw<f64>;
/// Single precision gas law.
pub type GasLaw32 = GasLaw<f32>;
pub type WaveFan64 = WaveFan<f64>;
pub type EndStates64 = EndStates<f64>;
