//! Filter-regularized quasi-reversibility for terminal-value semilinear
//! parabolic problems.
//!
//! Given noisy terminal data `u_f^ε` of `u_t - a Δu = F(x, t; u)`, the crate
//! reconstructs earlier states by integrating the regularized problem
//!
//! ```text
//! u_t = a Δu + Q u + F_ℓ(x, t; u),    u(·, T) = u_f^ε,
//! ```
//!
//! backward in time, where `Q` is the diagonal perturbing operator
//! `Q φ_p = (1/T) log(1 + γ⁻¹ e^{M̄ T μ_p}) φ_p` built on the Laplacian
//! eigenbasis. Everything works on real coefficient vectors in that basis.
//!
//! The crate is `no_std` and only needs `alloc`; file formats, configuration
//! and the command line live in the companion `qrev` crate.
//!
//! Layout:
//! - [`basis`]: eigenbases, nodal/spectral transforms, Gevrey norms and
//!   approximation numbers.
//! - [`filter`]: noise-to-filter coupling and the modal operators `Q`, `P`.
//! - [`nonlinearity`]: source terms, cut-off, Lipschitz constants and the
//!   cut-off schedule.
//! - [`forward`]: forward data manufacture and noise injection.
//! - [`solver`]: the backward integrators and the positivity audit.
//! - [`analysis`]: error norms, theoretical bounds, `t^ε`, interpolation
//!   checks, rate fitting and the Carleman functional check.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod analysis;
pub mod basis;
mod error;
pub mod filter;
pub mod forward;
mod math;
pub mod nonlinearity;
pub mod solver;

pub use error::{Error, Result};

pub use basis::{Basis, BasisSpec, DomainKind, GridField, SpectralField};
pub use filter::{FilterParams, ModalFilter};
pub use forward::{ForwardRun, NoisySample, ProblemSpec};
pub use nonlinearity::{CutoffSpec, Kappa, SourceKind, SourceSpec};
pub use solver::{BackwardRun, RegularizedProblem, RhoMode};
