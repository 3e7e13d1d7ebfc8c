//! Config-driven runs that write one data file per curve plus a JSON
//! manifest.
//!
//! Distribution curves are CSV files with header `k,probability`;
//! absorption curves use `step,cumulative_absorbed`. With
//! [`OutputFormat::Json`] each curve is instead a JSON object with
//! `columns` and `rows`. Every run directory gets a `manifest.json` holding
//! the full config, crate version, wall time and a per-file summary.
//! Output data files depend only on the config, never on the execution
//! mode or thread count.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::absorbing::{run_bounded_from, AbsorptionRecord, BarrierConfig, BarrierTiming, BoundedOptions};
use crate::channels::{evolve_noisy, NoiseSpec, TunnelingOrder};
use crate::classical::{binomial_walk, classical_absorption};
use crate::dynamics::{evolve, CoinChoice, Protocol, Variant};
use crate::error::{Result, WalkError};
use crate::exec::{map_indexed, Execution};
use crate::hilbert::{make_initial, to_density, CoinState, PositionSpace};
use crate::measurement::{position_distribution, sample_positions, summary, Distribution, DistributionMeta, SummaryStats};
use crate::trajectory::{sample_trajectories, trajectory_average, trajectory_rng, TrajectorySpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Walk,
    Bounded,
    Classical,
    Sample,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TopologySpec {
    Line,
    Circle { sites: usize },
}

impl FromStr for TopologySpec {
    type Err = String;

    /// `line` or `circle:N`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "line" {
            return Ok(TopologySpec::Line);
        }
        match s.strip_prefix("circle:").map(str::parse::<usize>) {
            Some(Ok(sites)) => Ok(TopologySpec::Circle { sites }),
            _ => Err(format!("expected `line` or `circle:N`, got {s:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub mode: Mode,
    pub protocol: Protocol,
    pub topology: TopologySpec,
    /// Checkpoints at which distributions are written; for bounded runs the
    /// single entry is the number of steps.
    pub steps: Vec<usize>,
    /// One curve family per entry.
    pub noise: Vec<NoiseSpec>,
    #[serde(default)]
    pub barriers: Option<Vec<i64>>,
    /// Defaults to the coin's paired initial state.
    #[serde(default)]
    pub initial_coin: Option<CoinState>,
    #[serde(default)]
    pub start: i64,
    #[serde(default)]
    pub seed: Option<u64>,
    /// 0 = exact density-operator evolution.
    #[serde(default)]
    pub trajectories: usize,
    #[serde(default)]
    pub shots: usize,
    #[serde(default)]
    pub classical_reference: bool,
    #[serde(default)]
    pub tunneling_order: TunnelingOrder,
    #[serde(default)]
    pub barrier_timing: BarrierTiming,
    #[serde(default)]
    pub format: OutputFormat,
}

impl ExperimentConfig {
    /// Single noiseless standard Hadamard walk; the CLI starts from this.
    pub fn new(name: impl Into<String>, mode: Mode, steps: Vec<usize>) -> Self {
        Self {
            name: name.into(),
            mode,
            protocol: Protocol::standard(CoinChoice::Hadamard),
            topology: TopologySpec::Line,
            steps,
            noise: vec![NoiseSpec::noiseless()],
            barriers: None,
            initial_coin: None,
            start: 0,
            seed: None,
            trajectories: 0,
            shots: 0,
            classical_reference: false,
            tunneling_order: TunnelingOrder::default(),
            barrier_timing: BarrierTiming::default(),
            format: OutputFormat::default(),
        }
    }

    pub fn initial(&self) -> CoinState {
        self.initial_coin.unwrap_or_else(|| self.protocol.initial_coin())
    }

    /// Every violated constraint, not just the first.
    pub fn validate(&self) -> std::result::Result<(), ConfigError> {
        let mut v = Vec::new();
        let mut bad = |field: &str, message: String| v.push(Violation { field: field.into(), message });

        if self.steps.is_empty() {
            bad("steps", "at least one step count is required".into());
        }
        if self.mode != Mode::Classical && self.noise.is_empty() {
            bad("noise", "at least one noise setting is required".into());
        }
        for (i, n) in self.noise.iter().enumerate() {
            for (name, value) in [("p", n.p), ("p_prime", n.p_prime), ("q", n.q)] {
                if !(0.0..=1.0).contains(&value) {
                    bad(&format!("noise[{i}].{name}"), format!("{value} outside [0, 1]"));
                }
            }
            if n.enabled.depolarizing && n.enabled.dephasing && !n.allow_composed {
                bad(&format!("noise[{i}].enabled"), "depolarizing with dephasing needs allow_composed".into());
            }
        }
        if let TopologySpec::Circle { sites } = self.topology {
            if sites < 2 {
                bad("topology", "circle needs at least 2 sites".into());
            } else if self.start < 0 || self.start >= sites as i64 {
                bad("start", format!("{} not a site of a {sites}-site circle", self.start));
            }
            if matches!(self.mode, Mode::Bounded | Mode::Classical) {
                bad("topology", "bounded and classical runs are line-only".into());
            }
        }
        if let Some(c) = self.initial_coin {
            if (c.norm_sqr() - 1.0).abs() > 1e-12 {
                bad("initial_coin", format!("norm² = {} ≠ 1", c.norm_sqr()));
            }
        }
        if (self.trajectories > 0 || self.mode == Mode::Sample) && self.seed.is_none() {
            bad("seed", "a seed is required for trajectory and sampling runs".into());
        }
        if self.mode == Mode::Sample && self.shots == 0 {
            bad("shots", "sampling needs shots >= 1".into());
        }
        match (&self.barriers, self.mode) {
            (None, Mode::Bounded) => bad("barriers", "bounded runs need one or two barriers".into()),
            (Some(b), _) => {
                if b.is_empty() || b.len() > 2 {
                    bad("barriers", "one or two barriers".into());
                } else if b.contains(&self.start) {
                    bad("barriers", format!("barrier on the start site {}", self.start));
                } else if b.len() == 2 && b[0] == b[1] {
                    bad("barriers", "barriers coincide".into());
                }
                if matches!(self.mode, Mode::Walk | Mode::Sample) {
                    bad("barriers", "barriers only apply to bounded and classical runs".into());
                }
            }
            _ => {}
        }
        if self.mode == Mode::Bounded {
            if self.steps.len() != 1 {
                bad("steps", "bounded runs take a single step count".into());
            }
            if self.trajectories > 0 {
                bad("trajectories", "bounded runs are exact only".into());
            }
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(ConfigError { violations: v })
        }
    }

    /// Settings outside the reference parameter sets.
    pub fn nonstandard_reasons(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.initial() != self.protocol.initial_coin() {
            out.push("initial coin state differs from the coin's paired state".to_string());
        }
        if self.protocol.variant == Variant::Symmetrized && self.protocol.coin != CoinChoice::Hadamard {
            out.push("symmetrized protocol with a non-Hadamard coin".to_string());
        }
        for n in &self.noise {
            out.extend(n.nonstandard_reasons().into_iter().map(String::from));
        }
        if self.tunneling_order != TunnelingOrder::default() {
            out.push("tunneling before the shift".to_string());
        }
        if self.barrier_timing != BarrierTiming::default() {
            out.push("barrier measured before the coin".to_string());
        }
        out.sort();
        out.dedup();
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigError {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid config:")?;
        for v in &self.violations {
            write!(f, " {}: {};", v.field, v.message)?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PresetName {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
}

impl FromStr for PresetName {
    type Err = WalkError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(PresetName::Fig1),
            "fig2" => Ok(PresetName::Fig2),
            "fig3" => Ok(PresetName::Fig3),
            "fig4" => Ok(PresetName::Fig4),
            other => Err(WalkError::UnknownPreset(other.to_string())),
        }
    }
}

/// Steps used for the bounded-walk preset.
pub const FIG4_STEPS: usize = 1000;

pub fn preset(name: PresetName) -> ExperimentConfig {
    match name {
        // n = 200 under depolarizing noise, classical walk underneath
        PresetName::Fig1 => ExperimentConfig {
            noise: [1.0, 0.99, 0.97, 0.95, 0.0].into_iter().map(NoiseSpec::depolarizing).collect(),
            classical_reference: true,
            ..ExperimentConfig::new("fig1", Mode::Walk, vec![200])
        },
        // ideal vs phase errors p' = 0.98 at several times
        PresetName::Fig2 => ExperimentConfig {
            noise: vec![NoiseSpec::noiseless(), NoiseSpec::dephasing(0.98)],
            ..ExperimentConfig::new("fig2", Mode::Walk, vec![50, 100, 150, 200])
        },
        // coin errors combined with tunneling, (p; q)
        PresetName::Fig3 => ExperimentConfig {
            noise: [(1.0, 1.0), (1.0, 0.95), (0.99, 1.0), (0.99, 0.95)]
                .into_iter()
                .map(|(p, q)| NoiseSpec::depolarizing(p).with_tunneling(q))
                .collect(),
            ..ExperimentConfig::new("fig3", Mode::Walk, vec![200])
        },
        // absorbing barrier at -10: classical, ideal and p = 0.99
        PresetName::Fig4 => ExperimentConfig {
            noise: vec![NoiseSpec::noiseless(), NoiseSpec::depolarizing(0.99)],
            barriers: Some(vec![-10]),
            classical_reference: true,
            ..ExperimentConfig::new("fig4", Mode::Bounded, vec![FIG4_STEPS])
        },
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CurveData {
    Distribution(Distribution),
    Absorption(Vec<AbsorptionRecord>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub label: String,
    pub data: CurveData,
    pub summary: Option<SummaryStats>,
}

impl Curve {
    pub fn distribution(&self) -> Option<&Distribution> {
        match &self.data {
            CurveData::Distribution(d) => Some(d),
            CurveData::Absorption(_) => None,
        }
    }

    pub fn absorption(&self) -> Option<&[AbsorptionRecord]> {
        match &self.data {
            CurveData::Absorption(a) => Some(a),
            CurveData::Distribution(_) => None,
        }
    }

    fn columns(&self) -> [&'static str; 2] {
        match self.data {
            CurveData::Distribution(_) => ["k", "probability"],
            CurveData::Absorption(_) => ["step", "cumulative_absorbed"],
        }
    }

    fn rows(&self) -> Vec<(String, String)> {
        match &self.data {
            CurveData::Distribution(d) => d.positions().map(|(k, p)| (k.to_string(), p.to_string())).collect(),
            CurveData::Absorption(a) => a.iter().map(|r| (r.step.to_string(), r.cumulative.to_string())).collect(),
        }
    }

    fn json_rows(&self) -> serde_json::Value {
        match &self.data {
            CurveData::Distribution(d) => d.positions().map(|(k, p)| serde_json::json!([k, p])).collect(),
            CurveData::Absorption(a) => a.iter().map(|r| serde_json::json!([r.step, r.cumulative])).collect(),
        }
    }

    /// Total probability (distributions) or final surviving probability.
    pub fn total_mass(&self) -> f64 {
        match &self.data {
            CurveData::Distribution(d) => d.total(),
            CurveData::Absorption(a) => a.last().map_or(1.0, |r| r.cumulative + r.surviving),
        }
    }

    pub fn normalized(&self) -> bool {
        match &self.data {
            CurveData::Distribution(d) => d.normalized,
            CurveData::Absorption(_) => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub file: String,
    pub label: String,
    pub total_mass: f64,
    pub normalized: bool,
    #[serde(default)]
    pub summary: Option<SummaryStats>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: ExperimentConfig,
    pub version: String,
    pub wall_time_seconds: f64,
    pub nonstandard: Vec<String>,
    pub files: Vec<FileEntry>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentOutput {
    pub config: ExperimentConfig,
    pub curves: Vec<Curve>,
    pub wall_time_seconds: f64,
}

fn space_for(cfg: &ExperimentConfig, noise: &NoiseSpec, n: usize) -> Result<PositionSpace> {
    match cfg.topology {
        TopologySpec::Circle { sites } => PositionSpace::circle(sites),
        TopologySpec::Line => {
            let reach = (n * noise.sites_per_step()).max(1) as i64;
            PositionSpace::line_range(cfg.start - reach, cfg.start + reach)
        }
    }
}

fn sorted_steps(cfg: &ExperimentConfig) -> Vec<usize> {
    let mut s = cfg.steps.clone();
    s.sort_unstable();
    s.dedup();
    s
}

fn meta(cfg: &ExperimentConfig, noise: &NoiseSpec, n: usize) -> DistributionMeta {
    DistributionMeta { steps: Some(n), protocol: Some(cfg.protocol), noise: Some(*noise) }
}

/// Exact distributions at every checkpoint for one noise setting.
fn exact_walk(cfg: &ExperimentConfig, noise: &NoiseSpec, exec: Execution) -> Result<Vec<(usize, Distribution)>> {
    let steps = sorted_steps(cfg);
    let space = space_for(cfg, noise, *steps.last().unwrap_or(&0))?;
    let psi = make_initial(space, cfg.initial(), cfg.start)?;
    let mut out = Vec::with_capacity(steps.len());
    let mut done = 0;
    if noise.is_noiseless() {
        let mut psi = psi;
        for n in steps {
            evolve(&mut psi, &cfg.protocol, done, n - done, exec)?;
            done = n;
            out.push((n, position_distribution(&psi).with_meta(meta(cfg, noise, n))));
        }
    } else {
        let mut rho = to_density(&psi);
        for n in steps {
            evolve_noisy(&mut rho, &cfg.protocol, noise, cfg.tunneling_order, done, n - done, exec)?;
            done = n;
            out.push((n, position_distribution(&rho).with_meta(meta(cfg, noise, n))));
        }
    }
    Ok(out)
}

fn trajectory_spec(cfg: &ExperimentConfig, noise: &NoiseSpec, n: usize) -> Result<TrajectorySpec> {
    Ok(TrajectorySpec {
        space: space_for(cfg, noise, n)?,
        protocol: cfg.protocol,
        initial: cfg.initial(),
        start: cfg.start,
        noise: *noise,
        steps: n,
        order: cfg.tunneling_order,
    })
}

fn classical_reference(n: usize) -> Distribution {
    Distribution::from(&binomial_walk(n)).with_meta(DistributionMeta { steps: Some(n), ..Default::default() })
}

fn walk_curves(cfg: &ExperimentConfig, exec: Execution) -> Result<Vec<Curve>> {
    let steps = sorted_steps(cfg);
    let line = cfg.topology == TopologySpec::Line;
    // Noise settings are independent: run them concurrently, keep order.
    let per_noise = map_indexed(exec, cfg.noise.len(), |i| -> Result<Vec<(usize, Distribution)>> {
        let noise = &cfg.noise[i];
        if cfg.trajectories == 0 {
            exact_walk(cfg, noise, exec)
        } else {
            let seed = cfg.seed.expect("validated");
            steps
                .iter()
                .map(|&n| Ok((n, trajectory_average(&trajectory_spec(cfg, noise, n)?, cfg.trajectories, seed, exec)?)))
                .collect()
        }
    });
    let mut curves = Vec::new();
    for (noise, dists) in cfg.noise.iter().zip(per_noise) {
        for (n, d) in dists? {
            let reference = (line && cfg.start == 0).then(|| classical_reference(n));
            curves.push(Curve {
                label: format!("walk_{}_n{}", noise.label(), n),
                summary: Some(summary(&d, reference.as_ref())),
                data: CurveData::Distribution(d),
            });
        }
    }
    if cfg.classical_reference && line {
        curves.extend(steps.iter().map(|&n| classical_curve(n)));
    }
    Ok(curves)
}

fn classical_curve(n: usize) -> Curve {
    let d = classical_reference(n);
    Curve { label: format!("classical_n{n}"), summary: Some(summary(&d, None)), data: CurveData::Distribution(d) }
}

fn classical_absorption_curve(cfg: &ExperimentConfig, barriers: &[i64], n: usize) -> Curve {
    let records = classical_absorption(cfg.start, barriers, n)
        .into_iter()
        .enumerate()
        .map(|(i, (increment, cumulative))| AbsorptionRecord {
            step: i + 1,
            increment,
            cumulative,
            surviving: 1.0 - cumulative,
        })
        .collect();
    Curve { label: "bounded_classical".into(), summary: None, data: CurveData::Absorption(records) }
}

fn bounded_curves(cfg: &ExperimentConfig, exec: Execution) -> Result<Vec<Curve>> {
    let barriers = cfg.barriers.clone().unwrap_or_default();
    let n = cfg.steps[0];
    let bcfg = BarrierConfig { barriers: barriers.clone(), max_steps: n, start: cfg.start };
    let opts = BoundedOptions { tunneling: cfg.tunneling_order, barrier: cfg.barrier_timing };
    let runs = map_indexed(exec, cfg.noise.len(), |i| {
        run_bounded_from(&bcfg, &cfg.protocol, cfg.initial(), &cfg.noise[i], opts, exec)
    });
    let mut curves = Vec::new();
    for (noise, run) in cfg.noise.iter().zip(runs) {
        curves.push(Curve {
            label: format!("bounded_{}", noise.label()),
            summary: None,
            data: CurveData::Absorption(run?.records),
        });
    }
    if cfg.classical_reference {
        curves.push(classical_absorption_curve(cfg, &barriers, n));
    }
    Ok(curves)
}

fn classical_curves(cfg: &ExperimentConfig) -> Vec<Curve> {
    match &cfg.barriers {
        Some(b) => vec![classical_absorption_curve(cfg, b, sorted_steps(cfg).last().copied().unwrap_or(0))],
        None => sorted_steps(cfg).into_iter().map(classical_curve).collect(),
    }
}

fn sample_curves(cfg: &ExperimentConfig, exec: Execution) -> Result<Vec<Curve>> {
    let seed = cfg.seed.expect("validated");
    let mut curves = Vec::new();
    let mut index = 0u64;
    for noise in &cfg.noise {
        let sampled: Vec<(usize, Distribution)> = if cfg.trajectories > 0 {
            sorted_steps(cfg)
                .into_iter()
                .map(|n| Ok((n, sample_trajectories(&trajectory_spec(cfg, noise, n)?, cfg.shots, seed, exec)?)))
                .collect::<Result<_>>()?
        } else {
            exact_walk(cfg, noise, exec)?
                .into_iter()
                .map(|(n, d)| {
                    index += 1;
                    let mut rng = trajectory_rng(seed, index);
                    (n, sample_positions(&d, cfg.shots, &mut rng))
                })
                .collect()
        };
        for (n, d) in sampled {
            curves.push(Curve {
                label: format!("sample_{}_n{}", noise.label(), n),
                summary: Some(summary(&d, None)),
                data: CurveData::Distribution(d),
            });
        }
    }
    Ok(curves)
}

/// Validates and runs `cfg`, keeping every curve in memory.
pub fn run_experiment(cfg: &ExperimentConfig, exec: Execution) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let t0 = Instant::now();
    let curves = match cfg.mode {
        Mode::Walk => walk_curves(cfg, exec)?,
        Mode::Bounded => bounded_curves(cfg, exec)?,
        Mode::Classical => classical_curves(cfg),
        Mode::Sample => sample_curves(cfg, exec)?,
    };
    Ok(ExperimentOutput { config: cfg.clone(), curves, wall_time_seconds: t0.elapsed().as_secs_f64() })
}

impl ExperimentOutput {
    pub fn file_name(&self, curve: &Curve) -> String {
        let ext = match self.config.format {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        };
        format!("{}.{ext}", curve.label)
    }

    pub fn manifest(&self) -> Manifest {
        Manifest {
            config: self.config.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_seconds: self.wall_time_seconds,
            nonstandard: self.config.nonstandard_reasons(),
            files: self
                .curves
                .iter()
                .map(|c| FileEntry {
                    file: self.file_name(c),
                    label: c.label.clone(),
                    total_mass: c.total_mass(),
                    normalized: c.normalized(),
                    summary: c.summary,
                })
                .collect(),
        }
    }

    /// Writes every curve and `manifest.json` into `dir` (created if needed).
    pub fn write(&self, dir: &Path) -> Result<Manifest> {
        fs::create_dir_all(dir)?;
        for curve in &self.curves {
            let path = dir.join(self.file_name(curve));
            match self.config.format {
                OutputFormat::Csv => {
                    let mut w = csv::Writer::from_path(&path)?;
                    w.write_record(curve.columns())?;
                    for (a, b) in curve.rows() {
                        w.write_record([a, b])?;
                    }
                    w.flush()?;
                }
                OutputFormat::Json => {
                    let doc = serde_json::json!({ "columns": curve.columns(), "rows": curve.json_rows() });
                    fs::write(&path, serde_json::to_string_pretty(&doc)? + "\n")?;
                }
            }
        }
        let manifest = self.manifest();
        fs::write(manifest_path(dir), serde_json::to_string_pretty(&manifest)? + "\n")?;
        Ok(manifest)
    }
}

pub fn manifest_path(dir: &Path) -> PathBuf {
    dir.join("manifest.json")
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Accepts either a bare config or a manifest (whose config is used).
pub fn read_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    if value.get("config").is_some() && value.get("files").is_some() {
        Ok(serde_json::from_value::<Manifest>(value)?.config)
    } else {
        Ok(serde_json::from_value(value)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_parameters() {
        let f1 = preset(PresetName::Fig1);
        let ps: Vec<f64> = f1.noise.iter().map(|n| n.p).collect();
        assert_eq!(ps, vec![1.0, 0.99, 0.97, 0.95, 0.0]);
        assert!(f1.noise.iter().all(|n| n.enabled.depolarizing && !n.enabled.tunneling));
        assert_eq!(f1.steps, vec![200]);

        let f2 = preset(PresetName::Fig2);
        assert_eq!(f2.steps, vec![50, 100, 150, 200]);
        assert_eq!(f2.noise[1].p_prime, 0.98);
        assert!(f2.noise[1].enabled.dephasing);

        let f3 = preset(PresetName::Fig3);
        let pairs: Vec<(f64, f64)> = f3.noise.iter().map(|n| (n.p, n.q)).collect();
        assert_eq!(pairs, vec![(1.0, 1.0), (1.0, 0.95), (0.99, 1.0), (0.99, 0.95)]);

        let f4 = preset(PresetName::Fig4);
        assert_eq!(f4.barriers, Some(vec![-10]));
        assert_eq!(f4.noise[1].p, 0.99);
        assert_eq!(f4.mode, Mode::Bounded);

        for p in [PresetName::Fig1, PresetName::Fig2, PresetName::Fig3, PresetName::Fig4] {
            assert!(preset(p).validate().is_ok());
            assert!(preset(p).nonstandard_reasons().is_empty());
        }
        assert!(matches!("fig9".parse::<PresetName>(), Err(WalkError::UnknownPreset(_))));
    }

    #[test]
    fn validation_lists_every_violation() {
        let mut cfg = ExperimentConfig::new("bad", Mode::Sample, vec![]);
        cfg.noise = vec![NoiseSpec::depolarizing(1.5)];
        cfg.topology = TopologySpec::Circle { sites: 1 };
        cfg.trajectories = 10;
        let err = cfg.validate().unwrap_err();
        let fields: Vec<&str> = err.violations.iter().map(|v| v.field.as_str()).collect();
        for f in ["steps", "noise[0].p", "topology", "seed", "shots"] {
            assert!(fields.contains(&f), "{f} missing from {fields:?}");
        }
    }

    #[test]
    fn topology_parsing() {
        assert_eq!("line".parse::<TopologySpec>().unwrap(), TopologySpec::Line);
        assert_eq!("circle:8".parse::<TopologySpec>().unwrap(), TopologySpec::Circle { sites: 8 });
        assert!("circle".parse::<TopologySpec>().is_err());
        assert!("ring:3".parse::<TopologySpec>().is_err());
    }

    #[test]
    fn nonstandard_flags() {
        let mut cfg = ExperimentConfig::new("x", Mode::Walk, vec![10]);
        cfg.protocol = Protocol::standard(CoinChoice::HalfPiPulse);
        cfg.initial_coin = Some(CoinState::symmetric());
        cfg.noise = vec![NoiseSpec::dephasing(0.9).with_tunneling(0.9)];
        let reasons = cfg.nonstandard_reasons();
        assert_eq!(reasons.len(), 2, "{reasons:?}");
    }

    #[test]
    fn small_walk_run() {
        let mut cfg = ExperimentConfig::new("small", Mode::Walk, vec![3, 1]);
        cfg.noise = vec![NoiseSpec::noiseless(), NoiseSpec::depolarizing(0.5)];
        cfg.classical_reference = true;
        let out = run_experiment(&cfg, Execution::Sequential).unwrap();
        let labels: Vec<&str> = out.curves.iter().map(|c| c.label.as_str()).collect();
        assert_eq!(
            labels,
            ["walk_ideal_n1", "walk_ideal_n3", "walk_p0.5_n1", "walk_p0.5_n3", "classical_n1", "classical_n3"]
        );
        let d = out.curves[1].distribution().unwrap();
        assert!((d.get(1) - 0.375).abs() < 1e-15);
        for c in &out.curves {
            assert!((c.total_mass() - 1.0).abs() < 1e-8);
        }
    }
}
