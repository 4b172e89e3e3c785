//! Pseudo-spectral simulation of the simplified Ericksen-Leslie system for
//! nematic liquid crystal flow on a periodic torus in two and three
//! dimensions.
//!
//! The velocity `u` solves an incompressible Navier-Stokes equation forced
//! by `-Δd·∇d`, and the unit director `d` follows the transported harmonic
//! map heat flow `d_t + u·∇d = Δd + |∇d|²d`. Alongside the solver the crate
//! tracks the blow-up monitors `∫(‖ω‖∞ + ‖∇d‖²∞)dt` (3D) and `∫‖∇d‖²∞dt`
//! (2D), the energy law, and the sphere constraint.
//!
//! Module map:
//! - [`spectral`]: grid, fields, FFT transforms and exact spectral operators
//! - [`state`]: the coupled flow state, director normalization, pressure
//! - [`dynamics`]: right-hand sides and integrating-factor Runge-Kutta steps
//! - [`diagnostics`]: norms, monitors, energy residual, Gronwall envelope
//! - [`scenarios`]: initial data generators
//! - [`config`], [`output`], [`runner`]: config files, CSV/snapshot I/O, run loop
//! - [`verify`]: built-in verification suites used by the CLI

pub mod config;
pub mod diagnostics;
pub mod dynamics;
mod error;
pub mod output;
pub mod runner;
pub mod scenarios;
pub mod spectral;
pub mod state;
pub mod verify;

pub use error::{ConfigError, Error, Result};
pub use spectral::{Field, Grid};
pub use state::{FluidState, PhysicsParams};
