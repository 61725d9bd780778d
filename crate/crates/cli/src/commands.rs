use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qcoh_core::format::sig12;
use qcoh_core::formulas::DOCUMENTED_ERRATA;
use qcoh_core::{
    cohering_power_in, decohering_power, run_sweep, state_summary, sweep, Argmax,
    BellDiagonalParams, ChannelKind, MeasureKind, MemoryChannel, PAxis, PhaseFlipConvention,
    ReferenceBasis, StateSummary, SweepSpec, ValidationGrid,
};

use crate::config::{FloatList, Layers, TimeGrid};
use crate::{CliError, PowerArgs, StateArgs, StateFlags, SweepArgs, VerifyArgs};

/// `l1`, `re` or `both`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct MeasureSel(Option<MeasureKind>);

impl MeasureSel {
    fn kinds(self) -> Vec<MeasureKind> {
        match self.0 {
            Some(m) => vec![m],
            None => MeasureKind::ALL.to_vec(),
        }
    }
}

impl FromStr for MeasureSel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("both") {
            return Ok(MeasureSel(None));
        }
        s.parse::<MeasureKind>()
            .map(|m| MeasureSel(Some(m)))
            .map_err(|_| format!("expected l1, re or both, got '{s}'"))
    }
}

/// `ad`, `pd`, `dep` or (for verify) `all`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct ChannelSel(Option<ChannelKind>);

impl FromStr for ChannelSel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(ChannelSel(None));
        }
        s.parse::<ChannelKind>()
            .map(|k| ChannelSel(Some(k)))
            .map_err(|_| format!("expected ad, pd, dep or all, got '{s}'"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PowerKind {
    Cohering,
    Decohering,
}

impl FromStr for PowerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "cohering" => Ok(PowerKind::Cohering),
            "decohering" => Ok(PowerKind::Decohering),
            _ => Err(format!("expected cohering or decohering, got '{s}'")),
        }
    }
}

fn parse_flag<T: FromStr<Err = String>>(flag: Option<String>) -> Result<Option<T>, CliError> {
    flag.map(|s| s.parse::<T>().map_err(CliError::Usage))
        .transpose()
}

fn channel_kind(layers: &Layers, flag: Option<String>) -> Result<ChannelKind, CliError> {
    let flag = flag
        .map(|s| {
            s.parse::<ChannelKind>()
                .map_err(|e| CliError::Usage(e.to_string()))
        })
        .transpose()?;
    layers
        .get("channel", flag)?
        .ok_or_else(|| CliError::Usage("--channel is required (ad, pd or dep)".into()))
}

fn bell_params(layers: &Layers, flags: &StateFlags) -> Result<BellDiagonalParams, CliError> {
    let ex = BellDiagonalParams::EXAMPLE;
    let c1 = layers.get_or("c1", flags.c1, ex.c1)?;
    let c2 = layers.get_or("c2", flags.c2, ex.c2)?;
    let c3 = layers.get_or("c3", flags.c3, ex.c3)?;
    Ok(BellDiagonalParams::new(c1, c2, c3)?)
}

fn convention(layers: &Layers, flag: bool) -> Result<PhaseFlipConvention, CliError> {
    Ok(if layers.switch("literal-text-probs", flag)? {
        PhaseFlipConvention::LiteralText
    } else {
        PhaseFlipConvention::HalfFlip
    })
}

fn out_path(layers: &Layers, flag: Option<PathBuf>) -> Result<Option<PathBuf>, CliError> {
    layers.get("out", flag)
}

/// Writes `body` to the file, or to stdout when no path is given.
fn emit(path: Option<&Path>, body: &[u8]) -> Result<(), CliError> {
    match path {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body)
                .and_then(|()| stdout.flush())
                .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))
        }
    }
}

pub fn sweep(args: SweepArgs, layers: &Layers) -> Result<u8, CliError> {
    let channel = channel_kind(layers, args.channel)?;
    let measure = layers.get_or(
        "measure",
        parse_flag::<MeasureSel>(args.measure)?,
        MeasureSel(None),
    )?;
    let mu_list = layers.get_or(
        "mu-list",
        args.mu_list,
        FloatList(SweepSpec::DEFAULT_MU_LIST.to_vec()),
    )?;

    let gamma = layers.get::<f64>("gamma", args.gamma)?;
    let t_grid = layers.get::<TimeGrid>("t-grid", args.t_grid)?;
    let p_start = layers.get::<f64>("p-start", args.p_start)?;
    let p_stop = layers.get::<f64>("p-stop", args.p_stop)?;
    let p_count = layers.get::<usize>("p-count", args.p_count)?;
    let p_axis = match (gamma, t_grid) {
        (None, None) => {
            let PAxis::Linear { start, stop, count } = PAxis::default() else {
                unreachable!("default axis is linear")
            };
            PAxis::Linear {
                start: p_start.unwrap_or(start),
                stop: p_stop.unwrap_or(stop),
                count: p_count.unwrap_or(count),
            }
        }
        (Some(gamma), Some(t)) => {
            if p_start.is_some() || p_stop.is_some() || p_count.is_some() {
                return Err(CliError::Usage(
                    "time mode (--gamma/--t-grid) cannot be combined with --p-start/--p-stop/--p-count".into(),
                ));
            }
            PAxis::Time {
                gamma,
                t_start: t.start,
                t_stop: t.stop,
                count: t.count,
            }
        }
        _ => {
            return Err(CliError::Usage(
                "time mode needs both --gamma and --t-grid".into(),
            ))
        }
    };

    let spec = SweepSpec {
        channel,
        measures: measure.kinds(),
        c: bell_params(layers, &args.state)?,
        mu_list: mu_list.0,
        p_axis,
        convention: convention(layers, args.literal_text_probs)?,
    };
    let workers = layers.get_or("workers", args.workers, 0)?;
    let out = out_path(layers, args.out)?;

    let rows = run_sweep(&spec, workers)?;
    let mut buf = Vec::new();
    sweep::write_csv(&rows, &mut buf).map_err(|e| CliError::Io(e.to_string()))?;
    emit(out.as_deref(), &buf)?;
    Ok(0)
}

pub fn verify(args: VerifyArgs, layers: &Layers) -> Result<u8, CliError> {
    let channel = layers.get_or(
        "channel",
        parse_flag::<ChannelSel>(args.channel)?,
        ChannelSel(None),
    )?;
    let grid = ValidationGrid {
        points: layers.get_or("grid", args.grid, ValidationGrid::default().points)?,
        c: bell_params(layers, &args.state)?,
        convention: convention(layers, args.literal_text_probs)?,
    };
    let strict = layers.switch("strict", args.strict)?;
    let out = out_path(layers, args.out)?;

    let run = qcoh_core::verify(channel.0, &grid)?;
    let mut csv = Vec::new();
    run.write_csv(&mut csv)
        .map_err(|e| CliError::Io(e.to_string()))?;
    let text = run.render_text();

    // With --out the CSV goes to the file and the report to stdout; otherwise
    // stdout carries the CSV and the report moves to stderr.
    match out {
        Some(path) => {
            emit(Some(&path), &csv)?;
            emit(None, text.as_bytes())?;
        }
        None => {
            eprint!("{text}");
            emit(None, &csv)?;
        }
    }

    let changes = run.errata_changes();
    if strict && !changes.is_empty() {
        let expected: Vec<String> = DOCUMENTED_ERRATA.iter().map(|f| f.to_string()).collect();
        let changed: Vec<String> = changes.iter().map(|f| f.to_string()).collect();
        eprintln!(
            "qcoh: strict mode: verdicts changed for {} (documented errata: {})",
            changed.join(" "),
            expected.join(" ")
        );
        return Ok(1);
    }
    Ok(0)
}

pub const POWER_CSV_HEADER: &str =
    "channel,power,measure,p,mu,value,basis,alpha,beta,theta,phi,evaluations";

const COMPUTATIONAL_LABELS: [&str; 4] = ["00", "01", "10", "11"];
const BELL_LABELS: [&str; 4] = ["phi+", "phi-", "psi+", "psi-"];

pub fn power(args: PowerArgs, layers: &Layers) -> Result<u8, CliError> {
    let kind_name = channel_kind(layers, args.channel)?;
    let power_kind = layers
        .get("kind", parse_flag::<PowerKind>(args.kind)?)?
        .ok_or_else(|| CliError::Usage("--kind is required (cohering or decohering)".into()))?;
    let measure = layers.get_or(
        "measure",
        parse_flag::<MeasureSel>(args.measure)?,
        MeasureSel(None),
    )?;
    let ps = power_axis(
        layers.get::<f64>("p", args.p)?,
        [
            layers.get::<f64>("p-start", args.p_start)?,
            layers.get::<f64>("p-stop", args.p_stop)?,
        ],
        layers.get::<usize>("p-count", args.p_count)?,
    )?;
    let mus = match (
        layers.get::<f64>("mu", args.mu)?,
        layers.get::<FloatList>("mu-list", args.mu_list)?,
    ) {
        (Some(mu), None) => vec![mu],
        (None, Some(FloatList(mut list))) if !list.is_empty() => {
            list.sort_by(f64::total_cmp);
            list.dedup();
            list
        }
        (Some(_), Some(_)) => return Err(CliError::Usage("give either --mu or --mu-list".into())),
        _ => return Err(CliError::Usage("--mu or --mu-list is required".into())),
    };
    let bell = layers.switch("bell-basis", args.bell_basis)?;
    if bell && power_kind == PowerKind::Decohering {
        return Err(CliError::Usage(
            "--bell-basis applies to cohering power only".into(),
        ));
    }
    let conv = convention(layers, args.literal_text_probs)?;
    let out = out_path(layers, args.out)?;

    let mut body = format!("{POWER_CSV_HEADER}\n");
    for (mu, p, m) in mus
        .iter()
        .flat_map(|&mu| ps.iter().map(move |&p| (mu, p)))
        .flat_map(|(mu, p)| measure.kinds().into_iter().map(move |m| (mu, p, m)))
    {
        let channel = MemoryChannel::build_with(kind_name, p, mu, conv)?;
        let result = match power_kind {
            PowerKind::Cohering => {
                let basis = if bell {
                    ReferenceBasis::Bell
                } else {
                    ReferenceBasis::Computational
                };
                cohering_power_in(&channel, m, basis)?
            }
            PowerKind::Decohering => decohering_power(&channel, m)?,
        };
        let (basis, phases) = match result.argmax {
            Argmax::Basis(k) => {
                let labels = if bell {
                    BELL_LABELS
                } else {
                    COMPUTATIONAL_LABELS
                };
                (labels[k].to_string(), ",,,".to_string())
            }
            Argmax::Phases(ph) => (
                String::new(),
                [ph.alpha, ph.beta, ph.theta, ph.phi].map(sig12).join(","),
            ),
        };
        body.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            kind_name,
            match power_kind {
                PowerKind::Cohering => "cohering",
                PowerKind::Decohering => "decohering",
            },
            m,
            sig12(p),
            sig12(mu),
            sig12(result.value),
            basis,
            phases,
            result.evaluations
        ));
    }
    emit(out.as_deref(), body.as_bytes())?;
    Ok(0)
}

/// A single `--p`, or a linear grid from `--p-start/--p-stop/--p-count`.
fn power_axis(
    p: Option<f64>,
    bounds: [Option<f64>; 2],
    count: Option<usize>,
) -> Result<Vec<f64>, CliError> {
    let grid_given = bounds.iter().any(Option::is_some) || count.is_some();
    match (p, grid_given) {
        (Some(p), false) => Ok(vec![p]),
        (None, true) => {
            let PAxis::Linear {
                start,
                stop,
                count: n,
            } = PAxis::default()
            else {
                unreachable!("default axis is linear")
            };
            Ok(PAxis::Linear {
                start: bounds[0].unwrap_or(start),
                stop: bounds[1].unwrap_or(stop),
                count: count.unwrap_or(n),
            }
            .values()?)
        }
        (Some(_), true) => Err(CliError::Usage(
            "give either --p or a --p-start/--p-stop/--p-count grid".into(),
        )),
        (None, false) => Err(CliError::Usage(
            "--p or a --p-count grid is required".into(),
        )),
    }
}

pub fn state(args: StateArgs, layers: &Layers) -> Result<u8, CliError> {
    let c = bell_params(layers, &args.state)?;
    let out = out_path(layers, args.out)?;
    let summary = state_summary(c)?;
    let body = format!("{}\n{}\n", StateSummary::CSV_HEADER, summary.to_csv_line());
    emit(out.as_deref(), body.as_bytes())?;
    Ok(0)
}
