//! Cumulant-expansion simulation of a coherently driven ensemble of two-level
//! emitters coupled to a single cavity mode.
//!
//! The crate integrates a closed set of twelve first and second moments
//! (third-order cumulants neglected), evaluates cavity and ensemble
//! quadrature variances and collective-spin squeezing, and checks the
//! truncation against an exact density-matrix solution for up to three
//! emitters. Sweeps over parameter grids are persisted as CSV.
//!
//! All rates are in units of the cavity amplitude decay rate κ.

pub mod cli;
pub mod config;
pub mod error;
pub mod integrator;
pub mod model;
pub mod moments;
pub mod observables;
pub mod ode;
pub mod oracle;
pub mod params;
pub mod spectral;
pub mod sweep;

pub use error::*;
pub use integrator::{
    find_steady_state, integrate_trace, verify_steady, IntegrationConfig, SteadyMethod,
    SteadyState, Trace,
};
pub use model::{rhs, EquationForm, MomentModel};
pub use moments::{cumulant_close, initial_thermal_state, Moment, MomentState};
pub use params::SystemParams;
