//! Figure-level studies, experiment configuration and result emission.
//!
//! Every experiment is a pure function of its resolved [`ExperimentConfig`]:
//! work items fan out over the worker pool and are merged in index order, so
//! two runs with the same config produce byte-identical CSV files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classical::{self, chaos_map};
use crate::dynamics::{
    checked_steps, propagate, simulate, u_lmg, u_trot, DensityState, ErrorKind, ErrorModel,
    LmgParams, StepKind,
};
use crate::error::{Error, Result};
use crate::fotoc::{
    aggregate, equidistant_times, fotoc_trajectory, haar_average_fotoc, AggregateFotoc, FOTOC_SLACK,
};
use crate::par;
use crate::rmt::{ensemble_avg_fotoc, icosahedral_states, EnsembleKind, EnsembleSpec};
use crate::spin_algebra::{
    build_ops, icosahedral_directions, rotation_about_axis, spin_coherent, AngularMomentumOps,
    RotationSpec, SpinQuantumNumber,
};

/// Polar angle of the single initial state used for FOTOC trajectories.
pub const FIG2_THETA: f64 = 0.833 * std::f64::consts::PI;
pub const FIG2_PHI: f64 = 0.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Experiment {
    Fig1,
    Fig2,
    Fig3,
    PhaseDiagram,
    RmtBaseline,
    RatioScan,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Fig1 => "fig1",
            Experiment::Fig2 => "fig2",
            Experiment::Fig3 => "fig3",
            Experiment::PhaseDiagram => "phase_diagram",
            Experiment::RmtBaseline => "rmt_baseline",
            Experiment::RatioScan => "ratio_scan",
        }
    }
}

/// Fully resolved experiment configuration. Serializes to the same flat JSON
/// document that [`read_config`] accepts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub s: f64,
    pub s_list: Vec<f64>,
    pub tau_list: Vec<f64>,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub n_time_samples: usize,
    pub error_kind: ErrorKind,
    pub step_fidelity: f64,
    pub two_j: u32,
    pub seed: u64,
    pub output_dir: String,
    pub include_t0: bool,
    pub n_samples: usize,
    pub dims: Vec<usize>,
    pub n_powers: usize,
    pub grid_resolution: usize,
    pub lyapunov_iter: usize,
    pub chaos_threshold: f64,
}

/// Config file as written by a user: every field except `experiment` may be
/// omitted and falls back to the experiment's default.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: Experiment,
    s: Option<f64>,
    s_list: Option<Vec<f64>>,
    tau_list: Option<Vec<f64>>,
    #[serde(rename = "T")]
    t_final: Option<f64>,
    n_time_samples: Option<usize>,
    error_kind: Option<ErrorKind>,
    step_fidelity: Option<f64>,
    two_j: Option<u32>,
    seed: Option<u64>,
    output_dir: Option<String>,
    include_t0: Option<bool>,
    n_samples: Option<usize>,
    dims: Option<Vec<usize>>,
    n_powers: Option<usize>,
    grid_resolution: Option<usize>,
    lyapunov_iter: Option<usize>,
    chaos_threshold: Option<f64>,
}

/// `n` points from `a` to `b`, evenly spaced in `log(tau)`.
pub fn log_spaced(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|k| a * (b / a).powf(k as f64 / (n - 1) as f64))
        .collect()
}

fn fig3_taus() -> Vec<f64> {
    (0..19).map(|k| 1.0 + 0.5 * k as f64).collect()
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let mut cfg = ExperimentConfig {
            experiment,
            s: 0.7,
            s_list: vec![0.0, 0.2, 0.7],
            tau_list: fig3_taus(),
            t_final: 100.0,
            n_time_samples: 10,
            error_kind: ErrorKind::Depolarizing,
            step_fidelity: ErrorModel::DEFAULT_STEP_FIDELITY,
            two_j: 15,
            seed: 1,
            output_dir: ".".into(),
            include_t0: false,
            n_samples: 10_000,
            dims: vec![16],
            n_powers: 10,
            grid_resolution: classical::DEFAULT_GRID,
            lyapunov_iter: classical::DEFAULT_N_ITER,
            chaos_threshold: classical::DEFAULT_THRESHOLD,
        };
        match experiment {
            Experiment::Fig1 => {
                cfg.tau_list = log_spaced(0.125, 8.0, 16);
                cfg.t_final = 20.0;
            }
            Experiment::Fig2 => {
                cfg.tau_list = vec![0.5, 1.0, 2.0, 4.0, 6.0, 8.0];
                cfg.n_time_samples = 100;
                cfg.include_t0 = true;
            }
            Experiment::RatioScan => {
                cfg.dims = vec![8, 16, 32, 64];
                cfg.n_samples = 1000;
            }
            Experiment::Fig3 | Experiment::PhaseDiagram | Experiment::RmtBaseline => {}
        }
        cfg
    }

    fn from_raw(raw: RawConfig) -> Result<Self> {
        let mut cfg = Self::defaults(raw.experiment);
        macro_rules! take {
            ($($f:ident),*) => { $(if let Some(v) = raw.$f { cfg.$f = v; })* };
        }
        take!(
            s,
            s_list,
            tau_list,
            t_final,
            n_time_samples,
            error_kind,
            step_fidelity,
            two_j,
            seed,
            output_dir,
            include_t0,
            n_samples,
            dims,
            n_powers,
            grid_resolution,
            lyapunov_iter,
            chaos_threshold
        );
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn error_model(&self) -> Result<ErrorModel> {
        ErrorModel::new(self.error_kind, self.step_fidelity).map_err(config_err)
    }

    pub fn spin(&self) -> Result<SpinQuantumNumber> {
        SpinQuantumNumber::new(self.two_j).map_err(config_err)
    }

    pub fn sample_times(&self) -> Vec<f64> {
        equidistant_times(self.t_final, self.n_time_samples, self.include_t0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if self.tau_list.is_empty() {
            return bad("tau_list is empty".into());
        }
        if let Some(t) = self.tau_list.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return bad(format!("tau_list entry {t} must be positive"));
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return bad(format!("T = {} must be positive", self.t_final));
        }
        if !unit(self.s) {
            return bad(format!("s = {} outside [0, 1]", self.s));
        }
        if let Some(s) = self.s_list.iter().find(|s| !unit(**s)) {
            return bad(format!("s_list entry {s} outside [0, 1]"));
        }
        if self.n_time_samples == 0 {
            return bad("n_time_samples must be at least 1".into());
        }
        self.error_model()?;
        self.spin()?;
        if self.n_samples == 0 || self.n_powers == 0 {
            return bad("n_samples and n_powers must be at least 1".into());
        }
        if let Some(d) = self.dims.iter().find(|d| **d < 2 || **d % 2 == 1) {
            return bad(format!("dimension {d} must be even and at least 2"));
        }
        if self.grid_resolution < 16 {
            return bad(format!("grid_resolution {} < 16", self.grid_resolution));
        }
        if self.lyapunov_iter < 100 {
            return bad(format!("lyapunov_iter {} < 100", self.lyapunov_iter));
        }
        if !(self.chaos_threshold.is_finite() && self.chaos_threshold >= 0.0) {
            return bad(format!("chaos_threshold {} invalid", self.chaos_threshold));
        }
        let needs_steps = matches!(
            self.experiment,
            Experiment::Fig1 | Experiment::Fig2 | Experiment::Fig3
        );
        if needs_steps {
            if let Some(t) = self.tau_list.iter().find(|t| **t > self.t_final) {
                return bad(format!("step size {t} exceeds T = {}", self.t_final));
            }
        }
        Ok(())
    }
}

fn config_err(e: Error) -> Error {
    Error::Config(e.to_string())
}

/// Parses and resolves a flat JSON config. Unknown keys are rejected.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    ExperimentConfig::from_raw(raw)
}

pub fn read_config(path: &Path) -> Result<ExperimentConfig> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn write_config(cfg: &ExperimentConfig, path: &Path) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(cfg)? + "\n")?;
    Ok(())
}

/// Everything needed to reproduce a table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub experiment: Experiment,
    pub version: String,
    pub seed: u64,
    pub schema: Vec<String>,
    pub config: ExperimentConfig,
    pub notes: BTreeMap<String, String>,
}

pub fn read_metadata(path: &Path) -> Result<Metadata> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub schema: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: Metadata,
}

impl ResultTable {
    fn new(cfg: &ExperimentConfig, schema: &[&str]) -> Self {
        let schema: Vec<String> = schema.iter().map(|s| s.to_string()).collect();
        ResultTable {
            schema: schema.clone(),
            rows: Vec::new(),
            metadata: Metadata {
                experiment: cfg.experiment,
                version: env!("CARGO_PKG_VERSION").to_string(),
                seed: cfg.seed,
                schema,
                config: cfg.clone(),
                notes: BTreeMap::new(),
            },
        }
    }

    fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.schema.len() {
            return Err(Error::Invariant(format!(
                "row width {} differs from schema width {}",
                row.len(),
                self.schema.len()
            )));
        }
        if let Some(v) = row.iter().find(|v| !v.is_finite()) {
            return Err(Error::Invariant(format!(
                "non-finite value {v} in result row"
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.schema.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn csv_file_name(&self) -> String {
        format!("{}.csv", self.metadata.experiment.name())
    }

    pub fn meta_file_name(&self) -> String {
        format!("{}.meta.json", self.metadata.experiment.name())
    }

    /// CSV text with shortest round-trip float formatting (exponent form for
    /// very small or large values).
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.schema)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:?}")))?;
        }
        w.into_inner()
            .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
    }
}

/// Writes `<experiment>.csv` and `<experiment>.meta.json` into `dir`.
pub fn write_results(table: &ResultTable, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join(table.csv_file_name());
    let meta_path = dir.join(table.meta_file_name());
    fs::write(&csv_path, table.to_csv()?)?;
    fs::write(
        &meta_path,
        serde_json::to_string_pretty(&table.metadata)? + "\n",
    )?;
    Ok((csv_path, meta_path))
}

pub fn run(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    match cfg.experiment {
        Experiment::Fig1 => run_fig1(cfg),
        Experiment::Fig2 => run_fig2(cfg),
        Experiment::Fig3 => run_fig3(cfg),
        Experiment::PhaseDiagram => run_phase_diagram(cfg),
        Experiment::RmtBaseline => run_rmt_baseline(cfg),
        Experiment::RatioScan => run_ratio_scan(cfg),
    }
}

fn expect(cfg: &ExperimentConfig, e: Experiment) -> Result<()> {
    if cfg.experiment != e {
        return Err(Error::Config(format!(
            "config is for {}, not {}",
            cfg.experiment.name(),
            e.name()
        )));
    }
    cfg.validate()
}

/// Spin-coherent states of the icosahedral cover with their rotation specs.
fn cover(
    spin: SpinQuantumNumber,
) -> Result<Vec<(crate::spin_algebra::QuantumState, RotationSpec)>> {
    icosahedral_directions()
        .iter()
        .map(|d| {
            Ok((
                spin_coherent(spin, d.theta, d.phi)?,
                RotationSpec::optimal(d.theta, d.phi, spin.dim())?,
            ))
        })
        .collect()
}

fn check_infidelity(x: f64) -> Result<f64> {
    if !(-FOTOC_SLACK..=1.0 + FOTOC_SLACK).contains(&x) {
        return Err(Error::Invariant(format!("infidelity {x} outside [0, 1]")));
    }
    Ok(x.max(0.0))
}

/// Infidelities of one state at one step size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Infidelities {
    pub trotter_only: f64,
    pub total: f64,
    pub native_only: f64,
}

pub fn infidelities(
    p: &LmgParams,
    ops: &AngularMomentumOps,
    error: &ErrorModel,
    t_final: f64,
    psi0: &crate::spin_algebra::QuantumState,
) -> Result<Infidelities> {
    let n = checked_steps(p, t_final)?;
    let ut = u_trot(p, ops);
    let exact = propagate(&u_lmg(p, ops), psi0, n)?;
    let trot = propagate(&ut, psi0, n)?;
    let noisy: DensityState = simulate(&ut, error, psi0, n)?;
    Ok(Infidelities {
        trotter_only: check_infidelity(1.0 - trot.overlap(&exact).norm_sqr())?,
        total: check_infidelity(1.0 - noisy.fidelity_with(&exact))?,
        native_only: check_infidelity(1.0 - noisy.fidelity_with(&trot))?,
    })
}

pub fn run_fig1(cfg: &ExperimentConfig) -> Result<ResultTable> {
    expect(cfg, Experiment::Fig1)?;
    let spin = cfg.spin()?;
    let ops = build_ops(spin);
    let error = cfg.error_model()?;
    let states = cover(spin)?;
    let base = LmgParams::new(cfg.s, cfg.tau_list[0], spin).map_err(config_err)?;
    let k = states.len();
    let items = par::map_range(cfg.tau_list.len() * k, |i| {
        let p = base.with_tau(cfg.tau_list[i / k])?;
        infidelities(&p, &ops, &error, cfg.t_final, &states[i % k].0)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let mut table = ResultTable::new(
        cfg,
        &[
            "tau",
            "trotter_only_mean",
            "trotter_only_sem",
            "total_mean",
            "total_sem",
            "native_only_mean",
            "native_only_sem",
        ],
    );
    for (ti, &tau) in cfg.tau_list.iter().enumerate() {
        let chunk = &items[ti * k..(ti + 1) * k];
        let stat = |f: fn(&Infidelities) -> f64| {
            crate::stats::mean_sem(&chunk.iter().map(f).collect::<Vec<_>>())
        };
        let (a, sa) = stat(|x| x.trotter_only);
        let (b, sb) = stat(|x| x.total);
        let (c, sc) = stat(|x| x.native_only);
        table.push(vec![tau, a, sa, b, sb, c, sc])?;
    }
    Ok(table)
}

pub fn run_fig2(cfg: &ExperimentConfig) -> Result<ResultTable> {
    expect(cfg, Experiment::Fig2)?;
    let spin = cfg.spin()?;
    let ops = build_ops(spin);
    let error = cfg.error_model()?;
    let psi0 = spin_coherent(spin, FIG2_THETA, FIG2_PHI)?;
    let w = RotationSpec::optimal(FIG2_THETA, FIG2_PHI, spin.dim())?;
    let times = cfg.sample_times();
    let base = LmgParams::new(cfg.s, cfg.tau_list[0], spin).map_err(config_err)?;

    let runs = [
        (StepKind::Lmg, ErrorModel::none()),
        (StepKind::Trotter, ErrorModel::none()),
        (StepKind::Trotter, error),
    ];
    let series = par::map_range(cfg.tau_list.len() * runs.len(), |i| {
        let p = base.with_tau(cfg.tau_list[i / runs.len()])?;
        let (kind, e) = runs[i % runs.len()];
        fotoc_trajectory(&psi0, &ops, &w, &p, &e, kind, &times)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let mut table = ResultTable::new(
        cfg,
        &[
            "tau",
            "t",
            "steps",
            "t_realized",
            "fotoc_lmg",
            "fotoc_trotter",
            "fotoc_trotter_noisy",
        ],
    );
    table.metadata.notes.insert(
        "initial_state".into(),
        format!("theta={FIG2_THETA}, phi={FIG2_PHI}"),
    );
    for (ti, &tau) in cfg.tau_list.iter().enumerate() {
        let group = &series[ti * runs.len()..(ti + 1) * runs.len()];
        for (j, &t) in times.iter().enumerate() {
            let steps = group[0].steps[j] as f64;
            table.push(vec![
                tau,
                t,
                steps,
                steps * tau,
                group[0].values[j],
                group[1].values[j],
                group[2].values[j],
            ])?;
        }
    }
    Ok(table)
}

/// FOTOC averaged over the icosahedral cover and the sample times.
pub fn cover_averaged_fotoc(
    p: &LmgParams,
    error: &ErrorModel,
    kind: StepKind,
    sample_times: &[f64],
) -> Result<AggregateFotoc> {
    let ops = build_ops(p.spin());
    let states = cover(p.spin())?;
    let series = par::map_slice(&states, |(psi, w)| {
        fotoc_trajectory(psi, &ops, w, p, error, kind, sample_times)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    aggregate(&series)
}

pub fn run_fig3(cfg: &ExperimentConfig) -> Result<ResultTable> {
    expect(cfg, Experiment::Fig3)?;
    let spin = cfg.spin()?;
    let d = spin.dim();
    let ops = build_ops(spin);
    let error = cfg.error_model()?;
    let times = cfg.sample_times();
    let base = LmgParams::new(cfg.s, cfg.tau_list[0], spin).map_err(config_err)?;

    let w_ref = RotationSpec::optimal(0.0, 0.0, d)?;
    let haar = haar_average_fotoc(&rotation_about_axis(&ops, &w_ref));
    let spec = EnsembleSpec::new(EnsembleKind::CoeParity, d, cfg.n_samples, cfg.seed)
        .map_err(config_err)?;
    let coe = ensemble_avg_fotoc(&spec, &icosahedral_states(d)?, 1)?;

    let mut table = ResultTable::new(
        cfg,
        &[
            "tau",
            "lmg_mean",
            "lmg_sem",
            "trotter_mean",
            "trotter_sem",
            "noisy_mean",
            "noisy_sem",
            "chaos_fraction",
            "haar_baseline",
            "coe_parity_baseline",
            "coe_parity_baseline_sem",
        ],
    );
    for &tau in &cfg.tau_list {
        let p = base.with_tau(tau)?;
        let lmg = cover_averaged_fotoc(&p, &ErrorModel::none(), StepKind::Lmg, &times)?;
        let trot = cover_averaged_fotoc(&p, &ErrorModel::none(), StepKind::Trotter, &times)?;
        let noisy = cover_averaged_fotoc(&p, &error, StepKind::Trotter, &times)?;
        let chaos = chaos_map(
            cfg.s,
            tau,
            cfg.grid_resolution,
            cfg.chaos_threshold,
            cfg.lyapunov_iter,
        )?
        .chaos_fraction();
        table.push(vec![
            tau, lmg.mean, lmg.sem, trot.mean, trot.sem, noisy.mean, noisy.sem, chaos, haar,
            coe.mean, coe.sem,
        ])?;
    }
    Ok(table)
}

pub fn run_phase_diagram(cfg: &ExperimentConfig) -> Result<ResultTable> {
    expect(cfg, Experiment::PhaseDiagram)?;
    let mut table = ResultTable::new(cfg, &["s", "tau", "grid_points", "chaos_fraction"]);
    for &s in &cfg.s_list {
        for &tau in &cfg.tau_list {
            let map = chaos_map(
                s,
                tau,
                cfg.grid_resolution,
                cfg.chaos_threshold,
                cfg.lyapunov_iter,
            )?;
            table.push(vec![s, tau, map.grid.len() as f64, map.chaos_fraction()])?;
        }
    }
    Ok(table)
}

const ENSEMBLES: [EnsembleKind; 3] = [
    EnsembleKind::Cue,
    EnsembleKind::Coe,
    EnsembleKind::CoeParity,
];

pub fn run_rmt_baseline(cfg: &ExperimentConfig) -> Result<ResultTable> {
    expect(cfg, Experiment::RmtBaseline)?;
    let mut table = ResultTable::new(
        cfg,
        &[
            "ensemble",
            "dim",
            "mean",
            "sem",
            "multi_mean",
            "multi_sem",
            "haar_closed_form",
        ],
    );
    for (code, kind) in ENSEMBLES.iter().enumerate() {
        table
            .metadata
            .notes
            .insert(format!("ensemble_{code}"), kind.name().to_string());
    }
    for &d in &cfg.dims {
        let states = icosahedral_states(d)?;
        let ops = build_ops(SpinQuantumNumber::from_dim(d)?);
        let haar = haar_average_fotoc(&rotation_about_axis(&ops, &states[0].1));
        for (code, &kind) in ENSEMBLES.iter().enumerate() {
            let spec = EnsembleSpec::new(kind, d, cfg.n_samples, cfg.seed).map_err(config_err)?;
            let r = ensemble_avg_fotoc(&spec, &states, cfg.n_powers)?;
            table.push(vec![
                code as f64,
                d as f64,
                r.mean,
                r.sem,
                r.multi_mean,
                r.multi_sem,
                haar,
            ])?;
        }
    }
    Ok(table)
}

pub fn run_ratio_scan(cfg: &ExperimentConfig) -> Result<ResultTable> {
    expect(cfg, Experiment::RatioScan)?;
    let rn = format!("r_{}", cfg.n_powers);
    let mut table = ResultTable::new(cfg, &["dim", "r_1", &rn, "single_mean", "multi_mean"]);
    for &d in &cfg.dims {
        let spec = EnsembleSpec::new(EnsembleKind::CoeParity, d, cfg.n_samples, cfg.seed)
            .map_err(config_err)?;
        let r = ensemble_avg_fotoc(&spec, &icosahedral_states(d)?, cfg.n_powers)?;
        let denom = r.per_power_means.iter().sum::<f64>() / cfg.n_powers as f64;
        table.push(vec![
            d as f64,
            r.ratio(1)?,
            r.ratio(cfg.n_powers)?,
            r.mean,
            denom,
        ])?;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        for e in [
            Experiment::Fig1,
            Experiment::Fig2,
            Experiment::Fig3,
            Experiment::PhaseDiagram,
            Experiment::RmtBaseline,
            Experiment::RatioScan,
        ] {
            ExperimentConfig::defaults(e).validate().unwrap();
        }
    }

    #[test]
    fn default_grids() {
        let f1 = ExperimentConfig::defaults(Experiment::Fig1).tau_list;
        assert_eq!(f1.len(), 16);
        assert_eq!((f1[0], f1[15]), (0.125, 8.0));
        let f3 = ExperimentConfig::defaults(Experiment::Fig3).tau_list;
        assert_eq!(f3.len(), 19);
        assert_eq!((f3[0], f3[18]), (1.0, 10.0));
    }

    #[test]
    fn partial_config_fills_defaults() {
        let cfg = parse_config(r#"{"experiment": "fig3", "s": 0.2, "T": 50}"#).unwrap();
        assert_eq!(cfg.s, 0.2);
        assert_eq!(cfg.t_final, 50.0);
        assert_eq!(cfg.n_time_samples, 10);
        assert!(!cfg.include_t0);
    }

    #[test]
    fn bad_configs_are_config_errors() {
        for text in [
            r#"{"experiment": "fig3", "bogus": 1}"#,
            r#"{"experiment": "fig4"}"#,
            r#"{"experiment": "fig3", "tau_list": []}"#,
            r#"{"experiment": "fig3", "tau_list": [1, -2]}"#,
            r#"{"experiment": "fig3", "T": 0}"#,
            r#"{"experiment": "fig1", "tau_list": [30]}"#,
            r#"{"experiment": "ratio_scan", "dims": [7]}"#,
            r#"{"experiment": "fig3", "step_fidelity": 1.5}"#,
            r#"{"s": 0.5}"#,
            "not json",
        ] {
            let e = parse_config(text).unwrap_err();
            assert_eq!(e.exit_code(), 1, "{text}: {e}");
        }
    }

    #[test]
    fn mismatched_runner_is_rejected() {
        let cfg = ExperimentConfig::defaults(Experiment::Fig2);
        assert!(matches!(run_fig1(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn s_zero_has_no_trotter_error() {
        let mut cfg = ExperimentConfig::defaults(Experiment::Fig1);
        cfg.s = 0.0;
        cfg.tau_list = vec![0.5, 2.0];
        let t = run_fig1(&cfg).unwrap();
        assert!(t
            .column("trotter_only_mean")
            .unwrap()
            .iter()
            .all(|x| x.abs() < 1e-10));
    }

    #[test]
    fn noiseless_total_equals_trotter_only() {
        let mut cfg = ExperimentConfig::defaults(Experiment::Fig1);
        cfg.error_kind = ErrorKind::None;
        cfg.tau_list = vec![0.25, 1.0, 4.0];
        let t = run_fig1(&cfg).unwrap();
        let a = t.column("trotter_only_mean").unwrap();
        let b = t.column("total_mean").unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(t
            .column("native_only_mean")
            .unwrap()
            .iter()
            .all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn table_rejects_bad_rows() {
        let cfg = ExperimentConfig::defaults(Experiment::Fig1);
        let mut t = ResultTable::new(&cfg, &["a", "b"]);
        assert!(t.push(vec![1.0]).is_err());
        assert_eq!(t.push(vec![1.0, f64::NAN]).unwrap_err().exit_code(), 2);
        t.push(vec![1.0, 0.1]).unwrap();
        assert_eq!(
            String::from_utf8(t.to_csv().unwrap()).unwrap(),
            "a,b\n1.0,0.1\n"
        );
    }
}
