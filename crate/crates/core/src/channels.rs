//! Correlated two-use noise channels.
//!
//! A [`MemoryChannel`] stores weighted 4x4 Kraus operators, so applying it is
//! always `Σ_k E_k ρ E_k^dag` whatever the family. With probability `1 - μ` the two
//! uses draw independent single-qubit operations, with probability `μ` they
//! draw the same one.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::{sigma, ComplexMatrix, C64, ZERO};
use crate::states::DensityMatrix;

/// Completeness tolerance for `Σ E^dag E = I`.
pub const CPTP_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChannelKind {
    AmplitudeDamping,
    PhaseDamping,
    Depolarizing,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 3] = [
        ChannelKind::AmplitudeDamping,
        ChannelKind::PhaseDamping,
        ChannelKind::Depolarizing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::AmplitudeDamping => "ad",
            ChannelKind::PhaseDamping => "pd",
            ChannelKind::Depolarizing => "dep",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ad" => Ok(ChannelKind::AmplitudeDamping),
            "pd" => Ok(ChannelKind::PhaseDamping),
            "dep" => Ok(ChannelKind::Depolarizing),
            _ => Err(Error::UnknownName {
                kind: "channel",
                value: s.to_string(),
            }),
        }
    }
}

/// How the phase-damping strength `p` maps to the per-use σ3 probability.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PhaseFlipConvention {
    /// `P3 = p / 2`, which yields the off-diagonal factor `(1 - p)^2` when memoryless.
    #[default]
    HalfFlip,
    /// `P3 = p`, read literally from the single-qubit operator probabilities.
    LiteralText,
}

impl PhaseFlipConvention {
    pub fn flip_probability(self, p: f64) -> f64 {
        match self {
            PhaseFlipConvention::HalfFlip => p / 2.0,
            PhaseFlipConvention::LiteralText => p,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MemoryChannel {
    kind: ChannelKind,
    p: f64,
    mu: f64,
    kraus: Vec<ComplexMatrix>,
}

fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            range: "[0, 1]",
        })
    }
}

/// Single-qubit amplitude-damping operators; `A1` moves |0> to |1>.
fn amplitude_damping_ops(p: f64) -> [ComplexMatrix; 2] {
    let a0 = ComplexMatrix::from_real(2, &[(1.0 - p).sqrt(), 0.0, 0.0, 1.0]);
    let a1 = ComplexMatrix::from_real(2, &[0.0, 0.0, p.sqrt(), 0.0]);
    [a0, a1]
}

/// Uncorrelated products plus the two correlated operators that only touch |00>.
fn amplitude_damping_kraus(p: f64, mu: f64) -> Vec<ComplexMatrix> {
    let ops = amplitude_damping_ops(p);
    let free = (1.0 - mu).sqrt();
    let mut kraus = Vec::with_capacity(6);
    for a in &ops {
        for b in &ops {
            kraus.push(a.kron(b).scale_real(free));
        }
    }
    let tied = mu.sqrt();
    let mut e00 = ComplexMatrix::identity(4);
    e00[(0, 0)] = C64::new((1.0 - p).sqrt(), 0.0);
    let mut e11 = ComplexMatrix::zeros(4);
    e11[(3, 0)] = C64::new(p.sqrt(), 0.0);
    kraus.push(e00.scale_real(tied));
    kraus.push(e11.scale_real(tied));
    kraus
}

/// Pauli mixture: `√((1-μ) Pi Pj) σi⊗σj` for all pairs, `√(μ Pk) σk⊗σk` on the diagonal.
fn pauli_memory_kraus(probs: &[(usize, f64)], mu: f64) -> Vec<ComplexMatrix> {
    let mut kraus = Vec::with_capacity(probs.len() * (probs.len() + 1));
    for &(i, pi) in probs {
        for &(j, pj) in probs {
            let w = (1.0 - mu) * pi * pj;
            kraus.push(sigma(i).kron(&sigma(j)).scale_real(w.sqrt()));
        }
    }
    for &(k, pk) in probs {
        kraus.push(sigma(k).kron(&sigma(k)).scale_real((mu * pk).sqrt()));
    }
    kraus
}

impl MemoryChannel {
    pub fn build(kind: ChannelKind, p: f64, mu: f64) -> Result<Self> {
        Self::build_with(kind, p, mu, PhaseFlipConvention::default())
    }

    /// Like [`build`](Self::build), choosing the phase-damping convention
    /// (ignored by the other two families).
    pub fn build_with(
        kind: ChannelKind,
        p: f64,
        mu: f64,
        convention: PhaseFlipConvention,
    ) -> Result<Self> {
        check_unit("p", p)?;
        check_unit("mu", mu)?;
        let kraus = match kind {
            ChannelKind::AmplitudeDamping => amplitude_damping_kraus(p, mu),
            ChannelKind::PhaseDamping => {
                let q = convention.flip_probability(p);
                pauli_memory_kraus(&[(0, 1.0 - q), (3, q)], mu)
            }
            ChannelKind::Depolarizing => {
                let third = p / 3.0;
                pauli_memory_kraus(&[(0, 1.0 - p), (1, third), (2, third), (3, third)], mu)
            }
        };
        Ok(Self { kind, p, mu, kraus })
    }

    /// Wraps an arbitrary Kraus list without checking completeness; use
    /// [`verify_cptp`](Self::verify_cptp) to inspect it.
    pub fn from_kraus(
        kind: ChannelKind,
        p: f64,
        mu: f64,
        kraus: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::InvalidState {
                check: "non-empty Kraus list",
                value: 0.0,
            });
        }
        if let Some(bad) = kraus.iter().find(|k| k.dim() != 4) {
            return Err(Error::DimensionMismatch {
                left: bad.dim(),
                right: 4,
            });
        }
        Ok(Self { kind, p, mu, kraus })
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// `Σ E ρ E^dag` on a raw matrix, without validating the result.
    pub fn apply_matrix(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(4);
        for e in &self.kraus {
            let left = e.mul_unchecked(rho);
            // (E ρ) E^dag: out_ij += Σ_k left_ik conj(E_jk)
            for i in 0..4 {
                for j in 0..4 {
                    let mut acc = ZERO;
                    for k in 0..4 {
                        acc += left[(i, k)] * e[(j, k)].conj();
                    }
                    out[(i, j)] += acc;
                }
            }
        }
        out
    }

    /// Output for a pure input `|v><v|`: `Σ (E v)(E v)^dag`.
    pub fn apply_pure(&self, v: &[C64; 4]) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(4);
        for e in &self.kraus {
            let mut w = [ZERO; 4];
            for (i, wi) in w.iter_mut().enumerate() {
                for (k, vk) in v.iter().enumerate() {
                    *wi += e[(i, k)] * vk;
                }
            }
            for i in 0..4 {
                for j in 0..4 {
                    out[(i, j)] += w[i] * w[j].conj();
                }
            }
        }
        out
    }

    /// Applies the channel and validates the output as a density matrix.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(self.apply_matrix(rho.matrix()))
    }

    pub fn verify_cptp(&self) -> CptpReport {
        let mut sum = ComplexMatrix::zeros(4);
        for e in &self.kraus {
            sum = sum
                .add(&e.adjoint().mul_unchecked(e))
                .expect("Kraus operators are 4x4");
        }
        let max_deviation = sum.max_abs_diff(&ComplexMatrix::identity(4));
        CptpReport {
            max_deviation,
            passes: max_deviation <= CPTP_TOL,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CptpReport {
    /// Largest entrywise deviation of `Σ E^dag E` from the identity.
    pub max_deviation: f64,
    pub passes: bool,
}
