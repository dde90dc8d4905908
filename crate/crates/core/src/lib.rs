//! Reconstruction of the rank-4 bitangent matrix of a smooth plane quartic
//! from the gradients of the 28 odd genus-3 theta functions.
//!
//! The pipeline runs bottom-up:
//!
//! * [`characteristic`] and [`aronhold`]: exact 𝔽₂⁶ combinatorics of theta
//!   characteristics, Aronhold sets and the 8×8 characteristic table.
//! * [`theta`] and [`nullwerte`]: truncated theta series, Jacobian nullwerte
//!   and the identities they satisfy.
//! * [`builder`]: the scaled 8×8 matrix of bitangent forms.
//! * [`quartic`] and [`verify`]: the quartic as a 4×4 minor and the
//!   numerical checks of the whole construction.
//! * [`pipeline`]: seeded period matrices, the end-to-end run and its JSON report.

pub mod aronhold;
pub mod builder;
pub mod characteristic;
pub mod forms;
pub mod nullwerte;
pub mod period;
pub mod pipeline;
pub mod quartic;
pub mod verify;
pub mod theta;

pub use aronhold::{enumerate_aronhold_sets, is_fundamental_system, AronholdSet, CharMatrix};
pub use characteristic::{is_azygetic, symplectic_pairing, triple_sign, Characteristic, Parity};
pub use builder::{assemble_full, base_matrix, Assembly, BitangentMatrix, LinearForm};
pub use period::PeriodMatrix;
pub use pipeline::{random_tau, run, RunConfig};
pub use quartic::HomogeneousQuartic;
pub use theta::{ThetaTable, TruncationConfig};
pub use verify::{verify_all, VerificationReport, VerifyConfig};
