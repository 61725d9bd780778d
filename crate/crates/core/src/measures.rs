//! l1-norm and relative-entropy coherence in the computational basis.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::states::DensityMatrix;

/// Values below this are treated as exact zeros before taking logarithms.
pub const LOG_ZERO_CUTOFF: f64 = 1e-15;
/// Eigenvalues (or C_R values) in `[-NEGATIVE_TOL, 0)` are rounding noise.
pub const NEGATIVE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MeasureKind {
    L1Norm,
    RelativeEntropy,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 2] = [MeasureKind::L1Norm, MeasureKind::RelativeEntropy];

    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::L1Norm => "l1",
            MeasureKind::RelativeEntropy => "re",
        }
    }

    pub fn evaluate(self, rho: &DensityMatrix) -> Result<f64> {
        match self {
            MeasureKind::L1Norm => Ok(l1_coherence(rho)),
            MeasureKind::RelativeEntropy => relative_entropy_coherence(rho),
        }
    }

    /// Coherence of a maximally coherent two-qubit state: d-1 or log2 d.
    pub fn maximum(self) -> f64 {
        match self {
            MeasureKind::L1Norm => 3.0,
            MeasureKind::RelativeEntropy => 2.0,
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeasureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(MeasureKind::L1Norm),
            "re" => Ok(MeasureKind::RelativeEntropy),
            _ => Err(Error::UnknownName {
                kind: "measure",
                value: s.to_string(),
            }),
        }
    }
}

/// Sum of moduli of the off-diagonal entries.
pub fn l1_coherence(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let n = m.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[(i, j)].norm();
            }
        }
    }
    acc
}

/// Shannon entropy in bits of a probability vector, with `0 log 0 = 0`.
///
/// Entries in `[-1e-10, 0)` are clamped to zero; anything more negative is an
/// invalid state.
pub fn entropy_bits(probabilities: &[f64]) -> Result<f64> {
    let mut acc = 0.0;
    for &p in probabilities {
        if p < -NEGATIVE_TOL {
            return Err(Error::InvalidState {
                check: "nonnegative spectrum",
                value: p,
            });
        }
        if p > LOG_ZERO_CUTOFF {
            acc -= p * p.log2();
        }
    }
    Ok(acc)
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    entropy_bits(rho.eigenvalues())
}

/// `S(ρ_diag) - S(ρ)`, clamped at zero for rounding-level negatives.
pub fn relative_entropy_coherence(rho: &DensityMatrix) -> Result<f64> {
    let value = entropy_bits(&rho.populations())? - von_neumann_entropy(rho)?;
    if value < -NEGATIVE_TOL {
        return Err(Error::InvalidState {
            check: "relative entropy of coherence is nonnegative",
            value,
        });
    }
    Ok(value.max(0.0))
}
