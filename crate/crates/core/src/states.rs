//! Two-qubit states: Bell-diagonal inputs, computational basis projectors and
//! maximally coherent product states.
//!
//! Basis order is |00>, |01>, |10>, |11> (rows 0..=3).

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::matrix::{sigma, ComplexMatrix, C64};

/// Tolerances a [`DensityMatrix`] must satisfy.
pub const STATE_HERMITIAN_TOL: f64 = 1e-10;
pub const STATE_TRACE_TOL: f64 = 1e-10;
pub const STATE_PSD_TOL: f64 = 1e-10;
/// Bell-diagonal eigenvalues may dip this far below zero and still count as valid.
pub const BELL_VALIDITY_TOL: f64 = 1e-12;

/// A validated 4x4 density matrix with its eigenvalues cached (ascending).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    eigenvalues: Vec<f64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (all within 1e-10).
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if mat.dim() != 4 {
            return Err(Error::DimensionMismatch {
                left: mat.dim(),
                right: 4,
            });
        }
        mat.check_finite()?;
        let herm = mat.hermiticity_deviation();
        if herm > STATE_HERMITIAN_TOL {
            return Err(Error::InvalidState {
                check: "Hermiticity",
                value: herm,
            });
        }
        let trace_err = (mat.trace() - C64::new(1.0, 0.0)).norm();
        if trace_err > STATE_TRACE_TOL {
            return Err(Error::InvalidState {
                check: "unit trace",
                value: trace_err,
            });
        }
        let eigenvalues = mat.hermitian_eigenvalues()?;
        if eigenvalues[0] < -STATE_PSD_TOL {
            return Err(Error::InvalidState {
                check: "positive semidefinite",
                value: eigenvalues[0],
            });
        }
        Ok(Self { mat, eigenvalues })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Real parts of the diagonal (populations).
    pub fn populations(&self) -> Vec<f64> {
        self.mat.diag().iter().map(|z| z.re).collect()
    }

    pub fn maximally_mixed() -> Self {
        Self::new(ComplexMatrix::identity(4).scale_real(0.25)).expect("I/4 is a valid state")
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BellDiagonalParams {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl BellDiagonalParams {
    /// The state the figures use.
    pub const EXAMPLE: Self = Self {
        c1: 0.1,
        c2: 0.4,
        c3: 0.5,
    };

    pub fn new(c1: f64, c2: f64, c3: f64) -> Result<Self> {
        let params = Self { c1, c2, c3 };
        params.validate()?;
        Ok(params)
    }

    /// Checks each coefficient lies in [-1, 1] and every eigenvalue is nonnegative.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c1", self.c1), ("c2", self.c2), ("c3", self.c3)] {
            if !v.is_finite() || v.abs() > 1.0 + BELL_VALIDITY_TOL {
                return Err(Error::OutOfRange {
                    name,
                    value: v,
                    range: "[-1, 1]",
                });
            }
        }
        for (expression, value) in self.eigenvalue_terms() {
            if value < -BELL_VALIDITY_TOL {
                return Err(Error::InvalidBellParams { expression, value });
            }
        }
        Ok(())
    }

    /// The four eigenvalues as `(expression, value)` pairs.
    pub fn eigenvalue_terms(&self) -> [(&'static str, f64); 4] {
        let Self { c1, c2, c3 } = *self;
        [
            ("1/4(1-c1-c2-c3)", 0.25 * (1.0 - c1 - c2 - c3)),
            ("1/4(1-c1+c2+c3)", 0.25 * (1.0 - c1 + c2 + c3)),
            ("1/4(1+c1-c2+c3)", 0.25 * (1.0 + c1 - c2 + c3)),
            ("1/4(1+c1+c2-c3)", 0.25 * (1.0 + c1 + c2 - c3)),
        ]
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.c1, self.c2, self.c3]
    }
}

/// Pauli-basis coefficients of `1/4 (I⊗I + a3 σ3⊗I + b3 I⊗σ3 + Σ ci σi⊗σi)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub a3: f64,
    pub b3: f64,
}

impl CorrelationCoefficients {
    pub fn as_array(&self) -> [f64; 5] {
        [self.c1, self.c2, self.c3, self.a3, self.b3]
    }

    pub fn correlations(&self) -> [f64; 3] {
        [self.c1, self.c2, self.c3]
    }
}

/// Phases of the product state `(e^{iα}|0> + e^{iβ}|1>)/√2 ⊗ (e^{iθ}|0> + e^{iφ}|1>)/√2`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PhaseQuadruple {
    pub alpha: f64,
    pub beta: f64,
    pub theta: f64,
    pub phi: f64,
}

impl PhaseQuadruple {
    /// Wraps every phase into [0, 2π).
    pub fn new(alpha: f64, beta: f64, theta: f64, phi: f64) -> Self {
        let wrap = |x: f64| {
            let w = x.rem_euclid(TAU);
            if w >= TAU {
                0.0
            } else {
                w
            }
        };
        Self {
            alpha: wrap(alpha),
            beta: wrap(beta),
            theta: wrap(theta),
            phi: wrap(phi),
        }
    }
}

/// `1/4 (I⊗I + Σ ci σi⊗σi)`.
pub fn bell_diagonal(params: BellDiagonalParams) -> Result<DensityMatrix> {
    params.validate()?;
    let mut mat = ComplexMatrix::identity(4);
    for (i, ci) in params.as_array().into_iter().enumerate() {
        let term = sigma(i + 1).kron(&sigma(i + 1)).scale_real(ci);
        mat = mat.add(&term)?;
    }
    DensityMatrix::new(mat.scale_real(0.25))
}

/// Projector onto the computational basis state `k` (|00>, |01>, |10>, |11>).
pub fn basis_state(k: usize) -> Result<DensityMatrix> {
    if k > 3 {
        return Err(Error::BasisIndex(k));
    }
    let mut mat = ComplexMatrix::zeros(4);
    mat[(k, k)] = C64::new(1.0, 0.0);
    DensityMatrix::new(mat)
}

/// State vector of the maximally coherent product state.
pub fn max_coherent_product_vector(phases: PhaseQuadruple) -> [C64; 4] {
    let a = [
        C64::from_polar(1.0, phases.alpha),
        C64::from_polar(1.0, phases.beta),
    ];
    let b = [
        C64::from_polar(1.0, phases.theta),
        C64::from_polar(1.0, phases.phi),
    ];
    [
        a[0] * b[0] * 0.5,
        a[0] * b[1] * 0.5,
        a[1] * b[0] * 0.5,
        a[1] * b[1] * 0.5,
    ]
}

pub fn max_coherent_product(phases: PhaseQuadruple) -> DensityMatrix {
    let v = max_coherent_product_vector(phases);
    let mat = ComplexMatrix::from_fn(4, |i, j| v[i] * v[j].conj());
    DensityMatrix::new(mat).expect("a normalized pure state is a valid density matrix")
}

/// Inverts the Pauli expansion: `ci = Tr(ρ σi⊗σi)`, `a3 = Tr(ρ σ3⊗I)`, `b3 = Tr(ρ I⊗σ3)`.
pub fn extract_correlation_coeffs(rho: &DensityMatrix) -> CorrelationCoefficients {
    let m = rho.matrix();
    let expect = |op: ComplexMatrix| m.mul_unchecked(&op).trace().re;
    CorrelationCoefficients {
        c1: expect(sigma(1).kron(&sigma(1))),
        c2: expect(sigma(2).kron(&sigma(2))),
        c3: expect(sigma(3).kron(&sigma(3))),
        a3: expect(sigma(3).kron(&sigma(0))),
        b3: expect(sigma(0).kron(&sigma(3))),
    }
}

/// Damping probability `p = 1 - exp(-γ t)`.
pub fn p_of_t(gamma: f64, t: f64) -> Result<f64> {
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::OutOfRange {
            name: "gamma",
            value: gamma,
            range: "[0, inf)",
        });
    }
    if !t.is_finite() || t < 0.0 {
        return Err(Error::OutOfRange {
            name: "t",
            value: t,
            range: "[0, inf)",
        });
    }
    Ok(-(-gamma * t).exp_m1())
}
