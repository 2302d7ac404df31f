//! Fractional p-Laplace problems on an interval with zero exterior data.
//!
//! The crate discretizes `(-Δ_p)^s` on `Ω = (a, b)` with continuous
//! piecewise-linear elements and zero extension outside `Ω`, and provides
//! the tools to watch the nonlocal problems converge to their local
//! (`s = 1`) counterparts:
//!
//! - [`kernel`]: normalizing constants of the Gagliardo seminorm.
//! - [`mesh`]: uniform meshes, discrete functions and `L^p` norms.
//! - [`nonlocal`]: Gagliardo energy, duality pairing and gradient.
//! - [`local`]: the `s = 1` energy, pairing and gradient (exact).
//! - [`eigen`]: first eigenpair by Rayleigh-quotient descent.
//! - [`ground_state`]: Nehari ground states of the Schrödinger problem.
//! - [`harness`]: s-sweeps, convergence checks and report output.

pub mod descent;
pub mod eigen;
mod error;
pub mod form;
pub mod gauss;
pub mod ground_state;
pub mod harness;
pub mod kernel;
pub mod local;
pub mod mesh;
pub mod nonlocal;

pub use crate::eigen::{rayleigh_quotient, solve_first_eigenpair, EigenConfig, EigenResult, InitialGuess};
pub use crate::error::{Error, Result};
pub use crate::form::EnergyForm;
pub use crate::ground_state::{solve_ground_state, GroundStateResult, Potential, Problem};
pub use crate::kernel::KernelParams;
pub use crate::mesh::{DiscreteFunction, Mesh1D};
pub use crate::nonlocal::GagliardoQuadrature;
