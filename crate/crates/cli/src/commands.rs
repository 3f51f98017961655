use std::path::{Path, PathBuf};

use clap::ValueEnum;
use floquet_pt::analysis::{
    find_all_eps, hf_boundary, hf_convergence, predict_resonances, summarize, sweep_with_threads,
    EpBoundary, ParamRay, PhotonParity, SweepAxis, SweepGrid,
};
use floquet_pt::dynamics::{growth_rate, propagate_periods, StateVector};
use floquet_pt::{analyze, classify, DriveProtocol, PhaseLabel};
use serde::{Deserialize, Serialize};

use crate::config::{AxisSpec, InitialState, RunConfig};
use crate::output::{csv, dat, fmt_num, sweep_row, write_atomic, write_json, SWEEP_HEADER};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Classify,
    Quasi,
    Sweep,
    Ep,
    Dynamics,
    Hfcompare,
    Resonances,
}

/// What a command printed and which files it wrote.
#[derive(Debug, Default)]
pub struct Report {
    pub stdout: Vec<String>,
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSummary {
    pub delta0: f64,
    pub delta1: f64,
    pub gamma0: f64,
    pub gamma1: f64,
    pub t0: f64,
    pub t1: f64,
    pub period: f64,
    pub omega: f64,
    pub t0_fraction: f64,
    pub delta_eff: f64,
    pub gamma_eff: f64,
}

impl ProtocolSummary {
    pub fn of(p: &DriveProtocol) -> Self {
        let [s0, s1] = p.segments();
        let d = p.derived();
        Self {
            delta0: s0.delta,
            delta1: s1.delta,
            gamma0: s0.gamma,
            gamma1: s1.gamma,
            t0: s0.duration,
            t1: s1.duration,
            period: d.period,
            omega: d.omega,
            t0_fraction: p.t0_fraction(),
            delta_eff: d.delta_eff,
            gamma_eff: d.gamma_eff,
        }
    }

    pub fn protocol(&self) -> Result<DriveProtocol, floquet_pt::DriveError> {
        use floquet_pt::SegmentParams;
        DriveProtocol::new(
            SegmentParams::new(self.delta0, self.gamma0, self.t0),
            SegmentParams::new(self.delta1, self.gamma1, self.t1),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifySummary {
    pub protocol: ProtocolSummary,
    pub ep_tol: f64,
    pub pi: f64,
    pub label: String,
    pub n: u8,
    pub margin: f64,
    pub e_plus: [f64; 2],
    pub e_minus: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveSummary {
    pub j: f64,
    pub gamma_y: f64,
    pub gamma_z: f64,
    pub n: u8,
    pub well_conditioned: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiSummary {
    pub protocol: ProtocolSummary,
    pub pi: f64,
    pub label: String,
    pub n: u8,
    pub h: [f64; 2],
    pub e_plus: [f64; 2],
    pub e_minus: [f64; 2],
    pub effective: EffectiveSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisSummary {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisSummary {
    fn of(a: &AxisSpec) -> Self {
        Self {
            name: a.name.clone(),
            min: a.min,
            max: a.max,
            count: a.count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummaryJson {
    pub protocol: ProtocolSummary,
    pub x_axis: AxisSummary,
    pub y_axis: AxisSummary,
    pub ep_tol: f64,
    pub points: usize,
    pub symmetric_points: usize,
    pub broken_n0_points: usize,
    pub broken_n1_points: usize,
    pub exceptional_points: usize,
    pub invalid_points: usize,
    pub broken_n0_lobes: usize,
    pub broken_n1_lobes: usize,
    pub row_crossings: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpLocationJson {
    pub boundary: String,
    pub ray_parameter: f64,
    pub pi_at_root: f64,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpSummary {
    pub protocol: ProtocolSummary,
    pub axis: AxisSummary,
    pub root_tol: f64,
    pub locations: Vec<EpLocationJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsSummary {
    pub protocol: ProtocolSummary,
    pub periods: usize,
    pub substeps: usize,
    pub discard: usize,
    pub initial: String,
    pub truncated: bool,
    pub samples: usize,
    pub label: String,
    pub growth_rate: Option<f64>,
    pub expected_rate: f64,
    pub relative_deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HfRow {
    pub period: f64,
    pub exact_pi: f64,
    pub hf_pi: f64,
    pub abs_diff: f64,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HfSummary {
    pub protocol: ProtocolSummary,
    pub gamma_eff_boundary: f64,
    pub predicted: String,
    pub rows: Vec<HfRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceRow {
    pub k: u32,
    pub kind: String,
    pub omega_resonant: f64,
    pub breaking_expected: bool,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceSummary {
    pub t0_fraction: f64,
    pub delta_eff: f64,
    pub no_effective_coupling: bool,
    pub predictions: Vec<ResonanceRow>,
}

fn numeric(e: impl std::fmt::Display) -> CliError {
    CliError::Numeric(e.to_string())
}

struct Writer<'a> {
    dir: &'a Path,
    report: Report,
}

impl Writer<'_> {
    fn file(&mut self, name: &str, contents: &[u8]) -> Result<(), CliError> {
        let path = write_atomic(self.dir, name, contents)
            .map_err(|e| CliError::io(self.dir.join(name), e))?;
        self.report.files.push(path);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let path =
            write_json(self.dir, name, value).map_err(|e| CliError::io(self.dir.join(name), e))?;
        self.report.files.push(path);
        Ok(())
    }

    fn say(&mut self, line: String) {
        self.report.stdout.push(line);
    }
}

fn pair(z: floquet_pt::ComplexScalar) -> [f64; 2] {
    [z.re, z.im]
}

fn complex(z: floquet_pt::ComplexScalar) -> String {
    format!("{:.12}{:+.12}i", z.re, z.im)
}

/// Runs `cmd`, writing its files under `out_dir`. `threads` caps sweep
/// parallelism, 0 meaning the rayon default.
pub fn run(
    cmd: Command,
    cfg: &RunConfig,
    out_dir: &Path,
    threads: usize,
) -> Result<Report, CliError> {
    let mut w = Writer {
        dir: out_dir,
        report: Report::default(),
    };
    match cmd {
        Command::Classify => classify_cmd(cfg, &mut w)?,
        Command::Quasi => quasi_cmd(cfg, &mut w)?,
        Command::Sweep => sweep_cmd(cfg, &mut w, threads)?,
        Command::Ep => ep_cmd(cfg, &mut w)?,
        Command::Dynamics => dynamics_cmd(cfg, &mut w)?,
        Command::Hfcompare => hf_cmd(cfg, &mut w)?,
        Command::Resonances => resonances_cmd(cfg, &mut w)?,
    }
    Ok(w.report)
}

fn classify_cmd(cfg: &RunConfig, w: &mut Writer) -> Result<(), CliError> {
    let r = analyze(&cfg.protocol, cfg.ep_tol).map_err(numeric)?;
    let summary = ClassifySummary {
        protocol: ProtocolSummary::of(&cfg.protocol),
        ep_tol: cfg.ep_tol,
        pi: r.monodromy.pi_value,
        label: r.label.variant.as_str().to_string(),
        n: r.label.n,
        margin: r.label.margin,
        e_plus: pair(r.quasi.e_plus),
        e_minus: pair(r.quasi.e_minus),
    };
    w.say(format!(
        "pi={} label={} n={} e_plus={} e_minus={}",
        fmt_num(summary.pi),
        summary.label,
        summary.n,
        complex(r.quasi.e_plus),
        complex(r.quasi.e_minus)
    ));
    w.json("classify.json", &summary)
}

fn quasi_cmd(cfg: &RunConfig, w: &mut Writer) -> Result<(), CliError> {
    let r = analyze(&cfg.protocol, cfg.ep_tol).map_err(numeric)?;
    let e = r.effective;
    let summary = QuasiSummary {
        protocol: ProtocolSummary::of(&cfg.protocol),
        pi: r.monodromy.pi_value,
        label: r.label.variant.as_str().to_string(),
        n: r.label.n,
        h: pair(r.quasi.h_value),
        e_plus: pair(r.quasi.e_plus),
        e_minus: pair(r.quasi.e_minus),
        effective: EffectiveSummary {
            j: e.j,
            gamma_y: e.gamma_y,
            gamma_z: e.gamma_z,
            n: e.n,
            well_conditioned: e.well_conditioned,
        },
    };
    w.say(format!(
        "e_plus={} e_minus={}",
        complex(r.quasi.e_plus),
        complex(r.quasi.e_minus)
    ));
    w.say(format!(
        "J={:.12} gamma_y={:.12} gamma_z={:.12} n={} well_conditioned={}",
        e.j, e.gamma_y, e.gamma_z, e.n, e.well_conditioned
    ));
    w.json("quasi.json", &summary)
}

fn sweep_axis(a: &AxisSpec) -> SweepAxis {
    SweepAxis::new(a.name.clone(), a.map.clone(), a.min, a.max, a.count)
}

fn sweep_cmd(cfg: &RunConfig, w: &mut Writer, threads: usize) -> Result<(), CliError> {
    let (x, y) = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| crate::config::ConfigError::MissingKey("sweep".into()))?;
    let grid =
        SweepGrid::new(sweep_axis(x), sweep_axis(y), cfg.protocol, cfg.ep_tol).map_err(|e| {
            crate::config::ConfigError::InvalidValue {
                key: "sweep".into(),
                reason: e.to_string(),
            }
        })?;
    let records = sweep_with_threads(&grid, threads);
    let s = summarize(&records, x.count, y.count);

    let rows: Vec<[String; 7]> = records.iter().map(sweep_row).collect();
    w.file("sweep.csv", csv(&SWEEP_HEADER, &rows).as_bytes())?;
    w.file("sweep.dat", dat(&SWEEP_HEADER, &rows).as_bytes())?;
    let summary = SweepSummaryJson {
        protocol: ProtocolSummary::of(&cfg.protocol),
        x_axis: AxisSummary::of(x),
        y_axis: AxisSummary::of(y),
        ep_tol: cfg.ep_tol,
        points: records.len(),
        symmetric_points: s.symmetric_points,
        broken_n0_points: s.broken_n0_points,
        broken_n1_points: s.broken_n1_points,
        exceptional_points: s.exceptional_points,
        invalid_points: s.invalid_points,
        broken_n0_lobes: s.broken_n0_lobes,
        broken_n1_lobes: s.broken_n1_lobes,
        row_crossings: s.row_crossings,
    };
    w.say(format!(
        "{} points: {} symmetric, {} broken n=0 in {} lobe(s), {} broken n=1 in {} lobe(s), {} exceptional, {} invalid",
        summary.points,
        summary.symmetric_points,
        summary.broken_n0_points,
        summary.broken_n0_lobes,
        summary.broken_n1_points,
        summary.broken_n1_lobes,
        summary.exceptional_points,
        summary.invalid_points
    ));
    w.json("sweep_summary.json", &summary)
}

fn ep_cmd(cfg: &RunConfig, w: &mut Writer) -> Result<(), CliError> {
    let spec = cfg
        .ep
        .as_ref()
        .ok_or_else(|| crate::config::ConfigError::MissingKey("ep".into()))?;
    let ray = ParamRay::new(cfg.protocol, spec.axis.map.clone());
    let mut locations = Vec::new();
    for &boundary in spec.boundary.boundaries() {
        let found = find_all_eps(
            &ray,
            boundary,
            (spec.axis.min, spec.axis.max),
            spec.axis.count,
            cfg.root_tol,
        )
        .map_err(numeric)?;
        locations.extend(found);
    }
    locations.sort_by(|a, b| a.ray_parameter.total_cmp(&b.ray_parameter));
    let locations: Vec<EpLocationJson> = locations
        .into_iter()
        .map(|e| EpLocationJson {
            boundary: match e.boundary {
                EpBoundary::PlusOne => "plus_one".into(),
                EpBoundary::MinusOne => "minus_one".into(),
            },
            ray_parameter: e.ray_parameter,
            pi_at_root: e.pi_at_root,
            residual: e.residual,
            iterations: e.iterations,
        })
        .collect();
    for l in &locations {
        w.say(format!(
            "{}={} boundary={} pi={} residual={:.3e}",
            spec.axis.name,
            fmt_num(l.ray_parameter),
            l.boundary,
            fmt_num(l.pi_at_root),
            l.residual
        ));
    }
    if locations.is_empty() {
        w.say(format!(
            "no exceptional point bracketed on {} in [{}, {}]",
            spec.axis.name, spec.axis.min, spec.axis.max
        ));
    }
    let summary = EpSummary {
        protocol: ProtocolSummary::of(&cfg.protocol),
        axis: AxisSummary::of(&spec.axis),
        root_tol: cfg.root_tol,
        locations,
    };
    w.json("ep.json", &summary)
}

fn dynamics_cmd(cfg: &RunConfig, w: &mut Writer) -> Result<(), CliError> {
    let d = cfg.dynamics;
    let psi0 = match d.initial {
        InitialState::Up => StateVector::up(),
        InitialState::Down => StateVector::down(),
    };
    let traj = propagate_periods(&cfg.protocol, psi0, d.periods, d.substeps).map_err(numeric)?;
    let r = analyze(&cfg.protocol, cfg.ep_tol).map_err(numeric)?;
    let expected = 2.0 * r.quasi.e_plus.im.abs();
    let rate = growth_rate(&traj, d.discard).ok();
    let relative = rate
        .filter(|_| expected > 0.0)
        .map(|g| (g - expected).abs() / expected);

    let rows: Vec<[String; 6]> = traj
        .times
        .iter()
        .zip(&traj.norm_sq)
        .zip(&traj.states)
        .map(|((t, n), s)| {
            [
                fmt_num(*t),
                fmt_num(*n),
                fmt_num(s.a.re),
                fmt_num(s.a.im),
                fmt_num(s.b.re),
                fmt_num(s.b.im),
            ]
        })
        .collect();
    w.file(
        "trajectory.csv",
        csv(&["t", "norm_sq", "re_a", "im_a", "re_b", "im_b"], &rows).as_bytes(),
    )?;

    let summary = DynamicsSummary {
        protocol: ProtocolSummary::of(&cfg.protocol),
        periods: d.periods,
        substeps: d.substeps,
        discard: d.discard,
        initial: match d.initial {
            InitialState::Up => "up".into(),
            InitialState::Down => "down".into(),
        },
        truncated: traj.truncated,
        samples: traj.len(),
        label: r.label.variant.as_str().to_string(),
        growth_rate: rate,
        expected_rate: expected,
        relative_deviation: relative,
    };
    match rate {
        Some(g) => w.say(format!(
            "growth_rate={g:.10} expected={expected:.10} label={}",
            summary.label
        )),
        None => w.say(format!(
            "growth rate unavailable ({} samples, discard {}), expected={expected:.10}",
            traj.len(),
            d.discard
        )),
    }
    w.json("dynamics.json", &summary)
}

fn hf_cmd(cfg: &RunConfig, w: &mut Writer) -> Result<(), CliError> {
    let rows = hf_convergence(&cfg.protocol, cfg.hf_levels)
        .map_err(crate::config::ConfigError::Protocol)?;
    let mut out = Vec::with_capacity(rows.len());
    let mut previous: Option<f64> = None;
    for r in &rows {
        let ratio = previous.map(|p| p / r.abs_diff);
        out.push(HfRow {
            period: r.period,
            exact_pi: r.exact,
            hf_pi: r.approx,
            abs_diff: r.abs_diff,
            ratio,
        });
        previous = Some(r.abs_diff);
    }
    w.say(format!(
        "{:>24} {:>24} {:>24} {:>24} {:>10}",
        "T", "exact_pi", "hf_pi", "abs_diff", "ratio"
    ));
    for r in &out {
        let ratio = r.ratio.map(|x| format!("{x:.4}")).unwrap_or_default();
        w.say(format!(
            "{:>24} {:>24} {:>24} {:>24} {:>10}",
            fmt_num(r.period),
            fmt_num(r.exact_pi),
            fmt_num(r.hf_pi),
            fmt_num(r.abs_diff),
            ratio
        ));
    }
    let table: Vec<[String; 5]> = out
        .iter()
        .map(|r| {
            [
                fmt_num(r.period),
                fmt_num(r.exact_pi),
                fmt_num(r.hf_pi),
                fmt_num(r.abs_diff),
                r.ratio.map(fmt_num).unwrap_or_default(),
            ]
        })
        .collect();
    w.file(
        "hfcompare.csv",
        csv(
            &["period", "exact_pi", "hf_pi", "abs_diff", "ratio"],
            &table,
        )
        .as_bytes(),
    )?;
    let b = hf_boundary(&cfg.protocol);
    let summary = HfSummary {
        protocol: ProtocolSummary::of(&cfg.protocol),
        gamma_eff_boundary: b.gamma_eff_boundary,
        predicted: b.predicted.as_str().to_string(),
        rows: out,
    };
    w.json("hfcompare.json", &summary)
}

fn resonances_cmd(cfg: &RunConfig, w: &mut Writer) -> Result<(), CliError> {
    let t = predict_resonances(&cfg.protocol, cfg.k_max);
    let predictions: Vec<ResonanceRow> = t
        .predictions
        .iter()
        .map(|p| ResonanceRow {
            k: p.k,
            kind: match p.kind {
                PhotonParity::OddPhoton => "odd".into(),
                PhotonParity::EvenPhoton => "even".into(),
            },
            omega_resonant: p.omega_resonant,
            breaking_expected: p.breaking_expected,
            reason: p.reason.code().to_string(),
        })
        .collect();
    if t.no_effective_coupling {
        w.say("delta_eff = 0: no multiphoton resonances".into());
    }
    for p in &predictions {
        w.say(format!(
            "k={} {} omega={} breaking_expected={} reason={}",
            p.k,
            p.kind,
            fmt_num(p.omega_resonant),
            p.breaking_expected,
            p.reason
        ));
    }
    let table: Vec<[String; 5]> = predictions
        .iter()
        .map(|p| {
            [
                p.k.to_string(),
                p.kind.clone(),
                fmt_num(p.omega_resonant),
                p.breaking_expected.to_string(),
                p.reason.clone(),
            ]
        })
        .collect();
    w.file(
        "resonances.csv",
        csv(
            &["k", "kind", "omega_resonant", "breaking_expected", "reason"],
            &table,
        )
        .as_bytes(),
    )?;
    let summary = ResonanceSummary {
        t0_fraction: cfg.protocol.t0_fraction(),
        delta_eff: t.delta_eff,
        no_effective_coupling: t.no_effective_coupling,
        predictions,
    };
    w.json("resonances.json", &summary)
}

/// Label a stored classification summary would get if recomputed.
pub fn reclassify(summary: &ClassifySummary) -> PhaseLabel {
    classify(summary.pi, summary.ep_tol)
}
