//! Parameter sweeps over `(μ, p)` and their CSV rendering.
//!
//! Rows are computed in parallel on a dedicated thread pool and emitted in a
//! fixed order (μ ascending, then p ascending, then measure name), so output is
//! byte-identical for any worker count.

use std::io::Write;

use rayon::prelude::*;

use crate::channels::{ChannelKind, MemoryChannel, PhaseFlipConvention};
use crate::error::{Error, Result};
use crate::format::sig12;
use crate::measures::{l1_coherence, relative_entropy_coherence, MeasureKind};
use crate::states::{bell_diagonal, p_of_t, BellDiagonalParams};

pub const MAX_GRID_POINTS: usize = 10001;
pub const CSV_HEADER: &str = "channel,measure,c1,c2,c3,mu,p,value";

/// Where the damping probabilities come from.
#[derive(Clone, Debug, PartialEq)]
pub enum PAxis {
    /// `count` evenly spaced values from `start` to `stop` inclusive.
    Linear { start: f64, stop: f64, count: usize },
    /// `p = 1 - exp(-γ t)` over evenly spaced `t`.
    Time {
        gamma: f64,
        t_start: f64,
        t_stop: f64,
        count: usize,
    },
}

impl PAxis {
    fn count(&self) -> usize {
        match *self {
            PAxis::Linear { count, .. } | PAxis::Time { count, .. } => count,
        }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        let count = self.count();
        if !(2..=MAX_GRID_POINTS).contains(&count) {
            return Err(Error::InvalidSweep(format!(
                "grid count {count} outside 2..={MAX_GRID_POINTS}"
            )));
        }
        let lin = |a: f64, b: f64| -> Vec<f64> {
            (0..count)
                .map(|i| {
                    if i == count - 1 {
                        b
                    } else {
                        a + (b - a) * i as f64 / (count - 1) as f64
                    }
                })
                .collect()
        };
        match *self {
            PAxis::Linear { start, stop, .. } => {
                for (name, v) in [("p-start", start), ("p-stop", stop)] {
                    if !(0.0..=1.0).contains(&v) {
                        return Err(Error::InvalidSweep(format!("{name} = {v} outside [0, 1]")));
                    }
                }
                Ok(lin(start, stop))
            }
            PAxis::Time {
                gamma,
                t_start,
                t_stop,
                ..
            } => lin(t_start, t_stop)
                .into_iter()
                .map(|t| p_of_t(gamma, t))
                .collect(),
        }
    }
}

impl Default for PAxis {
    fn default() -> Self {
        PAxis::Linear {
            start: 0.0,
            stop: 1.0,
            count: 101,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub channel: ChannelKind,
    /// One or both measures; rows are emitted in measure-name order.
    pub measures: Vec<MeasureKind>,
    pub c: BellDiagonalParams,
    pub mu_list: Vec<f64>,
    pub p_axis: PAxis,
    pub convention: PhaseFlipConvention,
}

impl SweepSpec {
    pub const DEFAULT_MU_LIST: [f64; 4] = [0.0, 0.3, 0.6, 1.0];

    pub fn new(channel: ChannelKind) -> Self {
        Self {
            channel,
            measures: MeasureKind::ALL.to_vec(),
            c: BellDiagonalParams::EXAMPLE,
            mu_list: Self::DEFAULT_MU_LIST.to_vec(),
            p_axis: PAxis::default(),
            convention: PhaseFlipConvention::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.c.validate()?;
        if self.measures.is_empty() {
            return Err(Error::InvalidSweep("no measure selected".into()));
        }
        if self.mu_list.is_empty() {
            return Err(Error::InvalidSweep("mu list is empty".into()));
        }
        if let Some(mu) = self.mu_list.iter().find(|mu| !(0.0..=1.0).contains(*mu)) {
            return Err(Error::InvalidSweep(format!("mu = {mu} outside [0, 1]")));
        }
        self.p_axis.values()?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub channel: ChannelKind,
    pub measure: MeasureKind,
    pub c: BellDiagonalParams,
    pub mu: f64,
    pub p: f64,
    pub value: f64,
}

impl SweepRow {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.channel,
            self.measure,
            sig12(self.c.c1),
            sig12(self.c.c2),
            sig12(self.c.c3),
            sig12(self.mu),
            sig12(self.p),
            sig12(self.value)
        )
    }
}

/// Runs the sweep on `workers` threads (0 means rayon's default).
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let ps = spec.p_axis.values()?;
    let mut mus = spec.mu_list.clone();
    mus.sort_by(f64::total_cmp);
    mus.dedup();
    let mut measures = spec.measures.clone();
    measures.sort_by_key(|m| m.name());
    measures.dedup();

    let rho = bell_diagonal(spec.c)?;
    let points: Vec<(f64, f64)> = mus
        .iter()
        .flat_map(|&mu| ps.iter().map(move |&p| (mu, p)))
        .collect();

    let eval = |&(mu, p): &(f64, f64)| -> Result<Vec<SweepRow>> {
        let channel = MemoryChannel::build_with(spec.channel, p, mu, spec.convention)?;
        let out = channel.apply(&rho)?;
        measures
            .iter()
            .map(|&measure| {
                let value = match measure {
                    MeasureKind::L1Norm => l1_coherence(&out),
                    MeasureKind::RelativeEntropy => relative_entropy_coherence(&out)?,
                };
                Ok(SweepRow {
                    channel: spec.channel,
                    measure,
                    c: spec.c,
                    mu,
                    p,
                    value,
                })
            })
            .collect()
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidSweep(format!("thread pool: {e}")))?;
    let chunks = pool.install(|| points.par_iter().map(eval).collect::<Result<Vec<_>>>())?;
    Ok(chunks.into_iter().flatten().collect())
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", row.to_csv_line())?;
    }
    out.flush()
}

/// Spectrum and coherence of a Bell-diagonal input state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateSummary {
    pub c: BellDiagonalParams,
    pub eigenvalues: Vec<f64>,
    pub l1: f64,
    pub re: f64,
}

impl StateSummary {
    pub const CSV_HEADER: &'static str = "c1,c2,c3,lambda1,lambda2,lambda3,lambda4,l1,re";

    pub fn to_csv_line(&self) -> String {
        let mut fields: Vec<String> = self.c.as_array().iter().map(|&x| sig12(x)).collect();
        fields.extend(self.eigenvalues.iter().map(|&x| sig12(x)));
        fields.push(sig12(self.l1));
        fields.push(sig12(self.re));
        fields.join(",")
    }
}

pub fn state_summary(c: BellDiagonalParams) -> Result<StateSummary> {
    let rho = bell_diagonal(c)?;
    Ok(StateSummary {
        c,
        // clean rounding-level noise so exact zeros print as 0
        eigenvalues: rho
            .eigenvalues()
            .iter()
            .map(|&l| if l.abs() < 1e-14 { 0.0 } else { l })
            .collect(),
        l1: l1_coherence(&rho),
        re: relative_entropy_coherence(&rho)?,
    })
}
