//! Exact preparation of coupled total-spin eigenstates on qubit registers,
//! plus the simulation, variational and error-mitigation machinery used to
//! benchmark them.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod basis;
pub mod cg;
pub mod circuit;
pub mod eigenstate;
pub mod erc;
pub mod error;
pub mod halfint;
pub mod linalg;
pub mod mitigation;
pub mod pauli;
pub mod sim;
pub mod tomography;
pub mod tree;
pub mod vqe;

/// Crate version, recorded in output provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use nalgebra;
pub use num_complex;

pub use cg::{CouplingTable, cg_coefficient, mixing_angle};
pub use eigenstate::{LabeledState, eigenstate_amplitudes};
pub use error::{Error, Result};
pub use halfint::{HalfInt, SpinLabel};
pub use mitigation::{ConfusionMatrix, ExtrapolationResult, MitigatedEstimate, MitigationMethod, MitigationOptions};
pub use pauli::{MeasurementSetting, ObservableSum, Pauli, PauliString, grouping, subset_s2, total_s2, total_sz};
pub use sim::{DensityMatrix, NoiseModel, Shots, StateVector};
pub use tomography::{TomoData, TomoReport, TomoSettings};
pub use tree::{CouplingTree, TreeShape, enumerate_labelings, enumerate_states};
