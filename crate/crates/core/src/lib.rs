//! Multipartite quantum-state algebra.
//!
//! The crate computes the state of an object subsystem conditioned on an
//! event of a subject subsystem in two ways: by Lüders collapse of the
//! composite state ([`collapse`]) and as a relative state without collapse
//! ([`relative`]). [`oracles`] checks numerically that the two agree, along
//! with the supporting identities, and [`scenarios`] runs the one-slit and
//! Mach-Zehnder experiments in both descriptions.

pub mod collapse;
pub mod error;
pub mod io;
pub mod oracles;
pub mod random;
pub mod relative;
pub mod scenarios;
pub mod tensor;
pub mod tolerance;

pub use collapse::{
    collapse_mixed, collapse_pure, collapsed_object_state, event_probability, CollapseOutcome,
    StateRef,
};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use oracles::{CheckConfig, CheckReport, DistinguishabilityReport};
pub use relative::{
    everett_relative_ket, relative_state, relative_state_direct, relative_state_via_pair,
    relevant_decomposition, Branch, RelevantDecomposition, SubjectEntity,
};
pub use scenarios::{
    run_mach_zehnder, run_one_slit, Device, MachZehnderModel, OneSlitModel, ScenarioReport,
};
pub use tensor::{
    apply_subsystem_unitary, embed, partial_scalar_product, partial_trace, tensor_product, CMatrix,
    CVector, DensityOperator, HilbertStructure, RawVector, StateVector, SubsystemEvent,
};
