//! Eigenspace perturbation toolkit for Reynolds stress uncertainty estimates.
//!
//! Layers, bottom up:
//! - [`tensor`]: symmetric 3×3 tensors, realizability, closed-form eigensystems
//! - [`barycentric`]: barycentric, Lumley (AIM) and Choi-Lumley maps
//! - [`perturbation`]: consistent and legacy eigenspace perturbations
//! - [`trajectory`]: blend trajectories through the maps
//! - [`verify`]: randomized invariant suites
//! - [`channel`]: 1D channel flow with the SST model and UQ campaigns
//! - [`cli`]: configuration, CSV/manifest output and the `epfkit` subcommands

pub mod barycentric;
pub mod channel;
pub mod cli;
pub mod error;
pub mod exec;
pub mod fixtures;
pub mod perturbation;
pub mod sampling;
pub mod tensor;
pub mod trajectory;
pub mod verify;

pub use barycentric::{BaryPoint, Corner, CornerSet, STANDARD_CORNERS};
pub use error::{EpfError, Result};
pub use exec::Execution;
pub use perturbation::{perturb_consistent, perturb_legacy, EvMode, PerturbationSpec, PerturbedState};
pub use tensor::{eig_sym3, SymTensor3};
