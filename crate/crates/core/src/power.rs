//! Cohering and decohering power of a [`MemoryChannel`].
//!
//! Cohering power maximizes output coherence over the four reference basis
//! projectors. Decohering power maximizes the coherence lost by the
//! maximally coherent product states
//! `(e^{iα}|0> + e^{iβ}|1>)/√2 ⊗ (e^{iθ}|0> + e^{iφ}|1>)/√2`.
//!
//! The density matrix of such a product depends only on `β - α` and `φ - θ`,
//! so the search runs over those two relative phases: a coarse periodic grid
//! followed by cyclic coordinate descent with step halving.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use crate::channels::MemoryChannel;
use crate::error::Result;
use crate::matrix::{ComplexMatrix, C64};
use crate::measures::MeasureKind;
use crate::states::{max_coherent_product_vector, DensityMatrix, PhaseQuadruple};

/// Minimum objective gain for a coordinate-descent move to be accepted.
const IMPROVEMENT_EPS: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Argmax {
    /// Index into the reference basis.
    Basis(usize),
    Phases(PhaseQuadruple),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerResult {
    pub value: f64,
    pub argmax: Argmax,
    /// Number of objective evaluations performed.
    pub evaluations: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ReferenceBasis {
    /// |00>, |01>, |10>, |11>
    #[default]
    Computational,
    /// |Φ+>, |Φ->, |Ψ+>, |Ψ->
    Bell,
}

impl ReferenceBasis {
    /// Unitary whose columns are the basis vectors.
    pub fn unitary(self) -> ComplexMatrix {
        match self {
            ReferenceBasis::Computational => ComplexMatrix::identity(4),
            ReferenceBasis::Bell => {
                let h = FRAC_1_SQRT_2;
                #[rustfmt::skip]
                let cols = [
                    h, h, 0.0, 0.0,
                    0.0, 0.0, h, h,
                    0.0, 0.0, h, -h,
                    h, -h, 0.0, 0.0,
                ];
                ComplexMatrix::from_real(4, &cols)
            }
        }
    }
}

pub fn cohering_power(channel: &MemoryChannel, measure: MeasureKind) -> Result<PowerResult> {
    cohering_power_in(channel, measure, ReferenceBasis::Computational)
}

/// Max over basis projectors `|k><k|` of the output coherence, measured in the
/// same basis. Ties go to the lowest index.
pub fn cohering_power_in(
    channel: &MemoryChannel,
    measure: MeasureKind,
    basis: ReferenceBasis,
) -> Result<PowerResult> {
    let u = basis.unitary();
    let u_dag = u.adjoint();
    let mut best = (f64::NEG_INFINITY, 0);
    for k in 0..4 {
        let out = channel.apply_pure(&column(&u, k));
        let rotated = u_dag.mul_unchecked(&out).mul_unchecked(&u);
        let value = measure.evaluate(&DensityMatrix::new(rotated)?)?;
        if value > best.0 {
            best = (value, k);
        }
    }
    Ok(PowerResult {
        value: best.0.max(0.0),
        argmax: Argmax::Basis(best.1),
        evaluations: 4,
    })
}

/// Coherence lost by the maximally coherent product state with the given phases.
pub fn decohering_objective(
    channel: &MemoryChannel,
    measure: MeasureKind,
    phases: PhaseQuadruple,
) -> Result<f64> {
    let v = max_coherent_product_vector(phases);
    let out = DensityMatrix::new(channel.apply_pure(&v))?;
    Ok(measure.maximum() - measure.evaluate(&out)?)
}

/// Settings for the decohering-power search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseSearch {
    /// Grid points per relative phase.
    pub grid_points: usize,
    /// Shift applied to both grid axes, in radians.
    pub offset: [f64; 2],
    /// Coordinate descent stops once its step falls below this (radians).
    pub min_step: f64,
}

impl Default for PhaseSearch {
    fn default() -> Self {
        Self {
            grid_points: 12,
            offset: [0.0, 0.0],
            min_step: 1e-6,
        }
    }
}

pub fn decohering_power(channel: &MemoryChannel, measure: MeasureKind) -> Result<PowerResult> {
    decohering_power_with(channel, measure, &PhaseSearch::default())
}

pub fn decohering_power_with(
    channel: &MemoryChannel,
    measure: MeasureKind,
    search: &PhaseSearch,
) -> Result<PowerResult> {
    assert!(
        search.grid_points > 0,
        "phase grid needs at least one point"
    );
    let mut evaluations = 0;
    let mut objective = |x: [f64; 2]| {
        evaluations += 1;
        decohering_objective(channel, measure, relative_phases(x))
    };

    let spacing = TAU / search.grid_points as f64;
    let mut x = search.offset;
    let mut fx = f64::NEG_INFINITY;
    for i in 0..search.grid_points {
        for j in 0..search.grid_points {
            let cand = [
                search.offset[0] + i as f64 * spacing,
                search.offset[1] + j as f64 * spacing,
            ];
            let fc = objective(cand)?;
            if fc > fx {
                x = cand;
                fx = fc;
            }
        }
    }

    let mut step = spacing;
    while step >= search.min_step {
        let mut moved = false;
        for axis in 0..2 {
            for dir in [1.0, -1.0] {
                let mut cand = x;
                cand[axis] += dir * step;
                let fc = objective(cand)?;
                if fc > fx + IMPROVEMENT_EPS {
                    x = cand;
                    fx = fc;
                    moved = true;
                    break;
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }

    Ok(PowerResult {
        value: fx.max(0.0),
        argmax: Argmax::Phases(relative_phases(x)),
        evaluations,
    })
}

fn relative_phases(x: [f64; 2]) -> PhaseQuadruple {
    PhaseQuadruple::new(0.0, x[0], 0.0, x[1])
}

/// `U^dag ρ U` for a basis change; exposed for the Bell-basis diagnostics.
pub fn in_basis(rho: &ComplexMatrix, basis: ReferenceBasis) -> ComplexMatrix {
    let u = basis.unitary();
    u.adjoint().mul_unchecked(rho).mul_unchecked(&u)
}

fn column(u: &ComplexMatrix, k: usize) -> [C64; 4] {
    [u[(0, k)], u[(1, k)], u[(2, k)], u[(3, k)]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::ChannelKind;

    fn build(kind: ChannelKind, p: f64, mu: f64) -> MemoryChannel {
        MemoryChannel::build(kind, p, mu).unwrap()
    }

    #[test]
    fn noise_channels_have_no_cohering_power() {
        for kind in ChannelKind::ALL {
            for (p, mu) in [(0.0, 0.0), (0.3, 0.6), (1.0, 0.2), (0.8, 1.0)] {
                for m in MeasureKind::ALL {
                    let r = cohering_power(&build(kind, p, mu), m).unwrap();
                    assert!(r.value.abs() <= 1e-12, "{kind} {m} p={p} mu={mu}: {r:?}");
                    assert_eq!(r.argmax, Argmax::Basis(0));
                }
            }
        }
    }

    #[test]
    fn bell_basis_unitary_is_unitary() {
        let u = ReferenceBasis::Bell.unitary();
        let prod = u.adjoint().mat_mul(&u).unwrap();
        assert!(prod.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn identity_channel_has_no_decohering_power() {
        for kind in ChannelKind::ALL {
            for m in MeasureKind::ALL {
                let r = decohering_power(&build(kind, 0.0, 0.4), m).unwrap();
                assert!(r.value <= 1e-10);
            }
        }
    }

    #[test]
    fn full_amplitude_damping_destroys_all_l1() {
        let r = decohering_power(
            &build(ChannelKind::AmplitudeDamping, 1.0, 0.0),
            MeasureKind::L1Norm,
        )
        .unwrap();
        assert!((r.value - 3.0).abs() < 1e-12);
        // phase independent: any single point gives the same loss
        let single = decohering_objective(
            &build(ChannelKind::AmplitudeDamping, 1.0, 0.0),
            MeasureKind::L1Norm,
            PhaseQuadruple::new(1.0, 2.0, 3.0, 4.0),
        )
        .unwrap();
        assert!((single - 3.0).abs() < 1e-12);
    }

    #[test]
    fn memoryless_amplitude_damping_matches_product_oracle() {
        for p in [0.25f64, 0.5, 0.75] {
            let r = decohering_power(
                &build(ChannelKind::AmplitudeDamping, p, 0.0),
                MeasureKind::L1Norm,
            )
            .unwrap();
            // each qubit keeps coherence √(1-p): l1 of the product is (1 + √(1-p))² - 1
            let oracle = 3.0 - ((1.0 + (1.0 - p).sqrt()).powi(2) - 1.0);
            assert!((r.value - oracle).abs() < 1e-9, "p={p}");
            assert!((oracle - (2.0 + p - 2.0 * (1.0 - p).sqrt())).abs() < 1e-12);
        }
    }

    #[test]
    fn dephasing_decohering_power_oracle() {
        for (p, mu) in [(0.5, 0.0), (0.2, 0.7), (1.0, 1.0), (0.9, 0.3)] {
            let r = decohering_power(
                &build(ChannelKind::PhaseDamping, p, mu),
                MeasureKind::L1Norm,
            )
            .unwrap();
            let oracle = (1.0 - mu) * p * (4.0 - p) + 2.0 * p * mu;
            assert!((r.value - oracle).abs() < 1e-9);
        }
        let r = decohering_power(
            &build(ChannelKind::PhaseDamping, 0.5, 0.0),
            MeasureKind::L1Norm,
        )
        .unwrap();
        assert!((r.value - 1.75).abs() < 1e-12);
    }

    #[test]
    fn argmax_phases_reproduce_value() {
        let ch = build(ChannelKind::Depolarizing, 0.5, 0.3);
        for m in MeasureKind::ALL {
            let r = decohering_power(&ch, m).unwrap();
            let Argmax::Phases(ph) = r.argmax else {
                panic!("decohering argmax must be phases")
            };
            assert!((decohering_objective(&ch, m, ph).unwrap() - r.value).abs() < 1e-15);
            assert!(r.evaluations > 144);
        }
    }
}
