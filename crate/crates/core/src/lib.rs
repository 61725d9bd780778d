//! Two-qubit coherence dynamics under correlated (memory) noise channels.
//!
//! The crate builds amplitude-damping, phase-damping and depolarizing channels
//! for two consecutive uses with memory coefficient `μ`, applies them to
//! Bell-diagonal states, and measures l1-norm and relative-entropy coherence.
//! It also computes cohering and decohering power numerically, and checks a set
//! of closed-form expressions against that machinery ([`formulas`]).

pub mod channels;
pub mod error;
pub mod format;
pub mod formulas;
pub mod matrix;
pub mod measures;
pub mod power;
pub mod states;
pub mod sweep;

pub use channels::{ChannelKind, CptpReport, MemoryChannel, PhaseFlipConvention};
pub use error::{Error, Result};
pub use formulas::{
    cross_validate, verify, DiscrepancyReport, FormulaId, FormulaValue, ValidationGrid, Verdict,
    VerificationRun,
};
pub use matrix::{sigma, ComplexMatrix, C64};
pub use measures::{l1_coherence, relative_entropy_coherence, von_neumann_entropy, MeasureKind};
pub use power::{
    cohering_power, cohering_power_in, decohering_power, decohering_power_with, Argmax,
    PhaseSearch, PowerResult, ReferenceBasis,
};
pub use states::{
    basis_state, bell_diagonal, extract_correlation_coeffs, max_coherent_product, p_of_t,
    BellDiagonalParams, CorrelationCoefficients, DensityMatrix, PhaseQuadruple,
};
pub use sweep::{run_sweep, state_summary, PAxis, StateSummary, SweepRow, SweepSpec};
