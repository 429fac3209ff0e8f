//! Batch experiment runner: config files, checkpoints, CSV emission, fits.
//!
//! A run is described by one JSON config with a versioned schema and strict
//! key checking (an unknown key is an error, so `p_z`/`p_zz` typos cannot
//! pass silently). The sweep axis is either a list of transverse fields at
//! fixed channel strengths or a list of `p_zz` values from which the paired
//! X-channel strength follows as `p_x = 1/2 - (1/2)(1 - 2 p_zz)^(h_x/J_zz)`.
//!
//! Ground states are checkpointed per (sweep value, r) and reruns skip any
//! checkpoint already on disk unless forced. Results stream to a fixed-order
//! CSV; floats are printed with 17 significant digits so parsing returns the
//! exact bit pattern, and the error column is comma-scrubbed so rows always
//! split cleanly. Fits group rows by sweep point and append their parameters
//! to a copy of the CSV plus a plain-text report.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

use crate::choi::{vectorize_pure, ChannelKind, ChannelSpec, ChoiError};
use crate::dmrg::{ground_state, ground_state_seeded, DmrgConfig, DmrgError, Model, ModelSpec};
use crate::fitter::{fit_exponential, xi2_stability, CmiCurve, CmiPoint, CurveMeta, FitError};
use crate::mps::{MatrixProductState, MpsError};
use crate::oracle::{
    ed_apply_channel, ed_ground_state, ed_second_renyi, DenseDensityMatrix, OracleError,
};
use crate::renyi::{cmi_parts, RenyiError, Tripartition};
use crate::stabilizer::{
    cluster_group, restricted_subgroup_dimension, stabilizer_cmi, stabilizer_renyi_entropy,
    swssb_group, PauliString, StabilizerError, StabilizerGroup,
};
use crate::tensor::TruncationPolicy;

pub const SCHEMA_VERSION: u32 = 1;

/// Fixed CSV column order; the last column holds a comma-scrubbed error
/// message or is empty.
pub const CSV_HEADER: &str = "model,engine,L,N_A,r,h_x,J_zz,p_z,p_zz,p_x,S2_AB,S2_BC,S2_B,\
                              S2_ABC,I2,max_discarded_weight,trace_drift,wall_seconds,error";

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error("config: {0}")]
    Config(String),
    #[error("io: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv parse at line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error(transparent)]
    Dmrg(#[from] DmrgError),
    #[error(transparent)]
    Mps(#[from] MpsError),
    #[error(transparent)]
    Choi(#[from] ChoiError),
    #[error(transparent)]
    Renyi(#[from] RenyiError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Stabilizer(#[from] StabilizerError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error("consistency check failed: {0}")]
    CheckFailed(String),
}

pub type Result<T> = std::result::Result<T, RunnerError>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunnerError + '_ {
    move |source| RunnerError::Io { path: path.to_path_buf(), source }
}

/// Which pipeline produces the rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    #[default]
    Mps,
    Ed,
}

impl Engine {
    fn label(self) -> &'static str {
        match self {
            Engine::Mps => "mps",
            Engine::Ed => "ed",
        }
    }
}

/// Sweep axis: transverse-field values at fixed channels, or `p_zz` values
/// that define both channel strengths of the paired-dephasing protocol.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "axis", content = "values", deny_unknown_fields)]
pub enum SweepAxis {
    #[serde(rename = "h_x")]
    Hx(Vec<f64>),
    #[serde(rename = "p_zz")]
    PZz(Vec<f64>),
}

fn default_n_a() -> usize {
    4
}

/// One experiment: model template, tripartition sizes, channels, solver and
/// truncation settings, sweep axis, engine, and output discipline.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    /// Model template; `len` is derived per point as `n_a + 3 r` and the
    /// value given here is ignored.
    pub model: ModelSpec,
    #[serde(default = "default_n_a")]
    pub n_a: usize,
    pub r_values: Vec<usize>,
    #[serde(default)]
    pub sweep: Option<SweepAxis>,
    #[serde(default)]
    pub channels: Vec<ChannelSpec>,
    #[serde(default)]
    pub policy: TruncationPolicy,
    #[serde(default)]
    pub dmrg: DmrgConfig,
    #[serde(default)]
    pub engine: Engine,
    #[serde(default)]
    pub jobs: Option<usize>,
    /// Seed for optional noise studies; zero keeps the solver's fixed seed.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let config: Self = serde_json::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(RunnerError::Config(format!(
                "schema_version {} unsupported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.n_a < 1 {
            return Err(RunnerError::Config("n_a must be at least 1".into()));
        }
        if self.r_values.is_empty()
            || self.r_values[0] == 0
            || self.r_values.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(RunnerError::Config(
                "r_values must be nonempty, positive, strictly increasing".into(),
            ));
        }
        for spec in &self.channels {
            spec.validate()?;
        }
        match &self.sweep {
            Some(SweepAxis::Hx(vs)) | Some(SweepAxis::PZz(vs)) => {
                if vs.is_empty() || vs.iter().any(|v| !v.is_finite()) {
                    return Err(RunnerError::Config("sweep values must be finite and nonempty".into()));
                }
            }
            None => {}
        }
        if let Some(SweepAxis::PZz(vs)) = &self.sweep {
            if !self.channels.is_empty() {
                return Err(RunnerError::Config(
                    "a p_zz sweep defines its own channel pair; leave channels empty".into(),
                ));
            }
            if vs.iter().any(|&v| !(0.0..=0.5).contains(&v)) {
                return Err(RunnerError::Config("p_zz values must lie in [0, 1/2]".into()));
            }
            if self.model.j_zz == 0.0 {
                return Err(RunnerError::Config("a p_zz sweep needs J_zz != 0".into()));
            }
        }
        if self.engine == Engine::Ed {
            let max_len = self.n_a + 3 * self.r_values[self.r_values.len() - 1];
            if max_len > crate::oracle::MAX_ORACLE_LEN {
                return Err(RunnerError::Config(format!(
                    "engine=ed cannot reach L = {max_len} (dense cap {})",
                    crate::oracle::MAX_ORACLE_LEN
                )));
            }
        }
        Ok(())
    }
}

/// `p_x = 1/2 - (1/2)(1 - 2 p_zz)^(h_x / J_zz)`: the X strength that pairs
/// with a given `p_zz` in the saturation protocol.
pub fn p_x_of_p_zz(p_zz: f64, h_x: f64, j_zz: f64) -> f64 {
    0.5 - 0.5 * (1.0 - 2.0 * p_zz).powf(h_x / j_zz)
}

/// One expanded sweep point: the model coupling and channel layers to run.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub h_x: f64,
    pub channels: Vec<ChannelSpec>,
}

impl SweepPoint {
    /// Channel strengths by kind, zero when absent, for the CSV columns.
    pub fn strength_columns(&self) -> (f64, f64, f64) {
        let mut p_z = 0.0;
        let mut p_zz = 0.0;
        let mut p_x = 0.0;
        for spec in &self.channels {
            match spec.kind {
                ChannelKind::OddZ => p_z = spec.p,
                ChannelKind::PairZz => p_zz = spec.p,
                ChannelKind::SingleX => p_x = spec.p,
            }
        }
        (p_z, p_zz, p_x)
    }
}

/// Expand the sweep axis into concrete points, in config order.
pub fn sweep_points(config: &RunConfig) -> Vec<SweepPoint> {
    match &config.sweep {
        None => vec![SweepPoint { h_x: config.model.h_x, channels: config.channels.clone() }],
        Some(SweepAxis::Hx(vs)) => vs
            .iter()
            .map(|&h_x| SweepPoint { h_x, channels: config.channels.clone() })
            .collect(),
        Some(SweepAxis::PZz(vs)) => vs
            .iter()
            .map(|&p_zz| SweepPoint {
                h_x: config.model.h_x,
                channels: vec![
                    ChannelSpec { kind: ChannelKind::PairZz, p: p_zz },
                    ChannelSpec {
                        kind: ChannelKind::SingleX,
                        p: p_x_of_p_zz(p_zz, config.model.h_x, config.model.j_zz),
                    },
                ],
            })
            .collect(),
    }
}

/// 17 significant digits: round-trip exact for doubles.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn model_label(model: Model) -> &'static str {
    match model {
        Model::Cluster => "cluster",
        Model::Tfim => "tfim",
    }
}

fn parse_model(s: &str) -> Option<Model> {
    match s {
        "cluster" => Some(Model::Cluster),
        "tfim" => Some(Model::Tfim),
        _ => None,
    }
}

fn parse_engine(s: &str) -> Option<Engine> {
    match s {
        "mps" => Some(Engine::Mps),
        "ed" => Some(Engine::Ed),
        _ => None,
    }
}

/// One CSV row; column order fixed by [`CSV_HEADER`].
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub model: Model,
    pub engine: Engine,
    pub l: usize,
    pub n_a: usize,
    pub r: usize,
    pub h_x: f64,
    pub j_zz: f64,
    pub p_z: f64,
    pub p_zz: f64,
    pub p_x: f64,
    pub s2_ab: f64,
    pub s2_bc: f64,
    pub s2_b: f64,
    pub s2_abc: f64,
    pub i2: f64,
    pub max_discarded_weight: f64,
    pub trace_drift: f64,
    pub wall_seconds: f64,
    pub error: String,
}

impl CsvRow {
    pub fn to_line(&self) -> String {
        let mut line = String::new();
        let _ = write!(
            line,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            model_label(self.model),
            self.engine.label(),
            self.l,
            self.n_a,
            self.r,
            fmt_f64(self.h_x),
            fmt_f64(self.j_zz),
            fmt_f64(self.p_z),
            fmt_f64(self.p_zz),
            fmt_f64(self.p_x),
            fmt_f64(self.s2_ab),
            fmt_f64(self.s2_bc),
            fmt_f64(self.s2_b),
            fmt_f64(self.s2_abc),
            fmt_f64(self.i2),
            fmt_f64(self.max_discarded_weight),
            fmt_f64(self.trace_drift),
            fmt_f64(self.wall_seconds),
            scrub(&self.error),
        );
        line
    }

    pub fn parse(line: &str, line_no: usize) -> Result<Self> {
        let bad = |message: &str| RunnerError::Csv { line: line_no, message: message.into() };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 19 {
            return Err(bad(&format!("expected 19 fields, got {}", fields.len())));
        }
        let f = |i: usize| -> Result<f64> {
            fields[i].parse::<f64>().map_err(|e| bad(&format!("field {i}: {e}")))
        };
        let u = |i: usize| -> Result<usize> {
            fields[i].parse::<usize>().map_err(|e| bad(&format!("field {i}: {e}")))
        };
        Ok(Self {
            model: parse_model(fields[0]).ok_or_else(|| bad("unknown model"))?,
            engine: parse_engine(fields[1]).ok_or_else(|| bad("unknown engine"))?,
            l: u(2)?,
            n_a: u(3)?,
            r: u(4)?,
            h_x: f(5)?,
            j_zz: f(6)?,
            p_z: f(7)?,
            p_zz: f(8)?,
            p_x: f(9)?,
            s2_ab: f(10)?,
            s2_bc: f(11)?,
            s2_b: f(12)?,
            s2_abc: f(13)?,
            i2: f(14)?,
            max_discarded_weight: f(15)?,
            trace_drift: f(16)?,
            wall_seconds: f(17)?,
            error: fields[18].to_string(),
        })
    }
}

/// Keep the error column from breaking the comma-split contract.
fn scrub(message: &str) -> String {
    message.replace([',', '\n', '\r'], ";")
}

/// Checkpoint base name for one ground state.
fn checkpoint_stem(model: Model, len: usize, h_x: f64, j_zz: f64) -> String {
    format!("ground_{}_L{}_hx{:.6}_jzz{:.6}", model_label(model), len, h_x, j_zz)
}

/// Sidecar metadata stored with each checkpoint.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckpointMeta {
    pub model: ModelSpec,
    pub energy: f64,
    pub sweeps: usize,
    pub converged: bool,
    pub last_energy_delta: f64,
    pub max_discarded_weight: f64,
    pub dmrg: DmrgConfig,
    pub seed: u64,
}

/// Outcome counts of a checkpoint pass.
#[derive(Debug, Clone, Default)]
pub struct GroundSummary {
    pub built: usize,
    pub skipped: usize,
    /// Checkpoints that solved without meeting the energy tolerance; they
    /// are still written (metadata records the state) and not fatal.
    pub unconverged: Vec<String>,
}

fn solve_ground(spec: &ModelSpec, dmrg: &DmrgConfig, seed: u64) -> crate::dmrg::Result<crate::dmrg::GroundStateResult> {
    if seed == 0 {
        ground_state(spec, dmrg)
    } else {
        ground_state_seeded(spec, dmrg, seed)
    }
}

/// Solve and checkpoint every (sweep value, r) ground state. Existing
/// checkpoints are skipped unless `force` is set, so reruns are free.
pub fn run_ground(config: &RunConfig, out_dir: &Path, force: bool) -> Result<GroundSummary> {
    let dir = out_dir.join("checkpoints");
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    let mut summary = GroundSummary::default();
    for point in sweep_points(config) {
        for &r in &config.r_values {
            let part = Tripartition::new(config.n_a, r)?;
            let spec = ModelSpec { len: part.len(), h_x: point.h_x, ..config.model };
            let stem = checkpoint_stem(spec.model, spec.len, spec.h_x, spec.j_zz);
            let mps_path = dir.join(format!("{stem}.mps"));
            let meta_path = dir.join(format!("{stem}.json"));
            if !force && mps_path.exists() && meta_path.exists() {
                summary.skipped += 1;
                continue;
            }
            let ground = solve_ground(&spec, &config.dmrg, config.seed)?;
            ground.state.save(&mps_path)?;
            let meta = CheckpointMeta {
                model: spec,
                energy: ground.energy,
                sweeps: ground.sweeps,
                converged: ground.converged,
                last_energy_delta: ground.last_energy_delta,
                max_discarded_weight: ground.max_discarded_weight,
                dmrg: config.dmrg,
                seed: config.seed,
            };
            let text = serde_json::to_string_pretty(&meta)?;
            fs::write(&meta_path, text).map_err(io_err(&meta_path))?;
            if !ground.converged {
                summary.unconverged.push(stem);
            }
            summary.built += 1;
        }
    }
    Ok(summary)
}

/// Load a checkpoint if present, otherwise solve (and store) on demand.
fn load_or_solve(
    config: &RunConfig,
    out_dir: &Path,
    spec: &ModelSpec,
) -> Result<(MatrixProductState, bool)> {
    let dir = out_dir.join("checkpoints");
    let stem = checkpoint_stem(spec.model, spec.len, spec.h_x, spec.j_zz);
    let mps_path = dir.join(format!("{stem}.mps"));
    let meta_path = dir.join(format!("{stem}.json"));
    if mps_path.exists() && meta_path.exists() {
        let state = MatrixProductState::load(&mps_path)?;
        let text = fs::read_to_string(&meta_path).map_err(io_err(&meta_path))?;
        let meta: CheckpointMeta = serde_json::from_str(&text)?;
        return Ok((state, meta.converged));
    }
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    let ground = solve_ground(spec, &config.dmrg, config.seed)?;
    ground.state.save(&mps_path)?;
    let meta = CheckpointMeta {
        model: *spec,
        energy: ground.energy,
        sweeps: ground.sweeps,
        converged: ground.converged,
        last_energy_delta: ground.last_energy_delta,
        max_discarded_weight: ground.max_discarded_weight,
        dmrg: config.dmrg,
        seed: config.seed,
    };
    let text = serde_json::to_string_pretty(&meta)?;
    fs::write(&meta_path, text).map_err(io_err(&meta_path))?;
    Ok((ground.state, ground.converged))
}

/// Compute one CSV row on the matrix-product pipeline.
fn mps_row(config: &RunConfig, out_dir: &Path, point: &SweepPoint, r: usize) -> CsvRow {
    let start = Instant::now();
    let (p_z, p_zz, p_x) = point.strength_columns();
    let part = Tripartition::new(config.n_a, r).expect("validated r");
    let spec = ModelSpec { len: part.len(), h_x: point.h_x, ..config.model };
    let mut row = CsvRow {
        model: spec.model,
        engine: Engine::Mps,
        l: spec.len,
        n_a: config.n_a,
        r,
        h_x: spec.h_x,
        j_zz: spec.j_zz,
        p_z,
        p_zz,
        p_x,
        s2_ab: 0.0,
        s2_bc: 0.0,
        s2_b: 0.0,
        s2_abc: 0.0,
        i2: 0.0,
        max_discarded_weight: 0.0,
        trace_drift: 0.0,
        wall_seconds: 0.0,
        error: String::new(),
    };
    let result = (|| -> Result<()> {
        let (state, converged) = load_or_solve(config, out_dir, &spec)?;
        if !converged {
            row.error = "dmrg did not converge".into();
        }
        let mut rho = vectorize_pure(&state, &config.policy)?;
        for channel in &point.channels {
            let (next, report) = rho.apply_channel(channel, &config.policy)?;
            rho = next;
            row.max_discarded_weight = row.max_discarded_weight.max(report.max_discarded_weight);
            row.trace_drift = row.trace_drift.max(report.trace_drift);
        }
        let parts = cmi_parts(&rho, &part)?;
        row.s2_ab = parts.s2_ab;
        row.s2_bc = parts.s2_bc;
        row.s2_b = parts.s2_b;
        row.s2_abc = parts.s2_abc;
        row.i2 = parts.i2;
        Ok(())
    })();
    if let Err(e) = result {
        row.error = e.to_string();
    }
    row.wall_seconds = start.elapsed().as_secs_f64();
    row
}

/// Compute one CSV row on the dense oracle pipeline.
fn ed_row(config: &RunConfig, point: &SweepPoint, r: usize) -> CsvRow {
    let start = Instant::now();
    let (p_z, p_zz, p_x) = point.strength_columns();
    let part = Tripartition::new(config.n_a, r).expect("validated r");
    let spec = ModelSpec { len: part.len(), h_x: point.h_x, ..config.model };
    let mut row = CsvRow {
        model: spec.model,
        engine: Engine::Ed,
        l: spec.len,
        n_a: config.n_a,
        r,
        h_x: spec.h_x,
        j_zz: spec.j_zz,
        p_z,
        p_zz,
        p_x,
        s2_ab: 0.0,
        s2_bc: 0.0,
        s2_b: 0.0,
        s2_abc: 0.0,
        i2: 0.0,
        max_discarded_weight: 0.0,
        trace_drift: 0.0,
        wall_seconds: 0.0,
        error: String::new(),
    };
    let result = (|| -> Result<()> {
        let (state, _) = ed_ground_state(&spec)?;
        let mut rho = DenseDensityMatrix::from_pure(&state);
        for channel in &point.channels {
            rho = ed_apply_channel(&rho, channel)?;
        }
        row.s2_ab = ed_second_renyi(&rho, &part.ab())?;
        row.s2_bc = ed_second_renyi(&rho, &part.bc())?;
        row.s2_b = ed_second_renyi(&rho, &part.b())?;
        row.s2_abc = ed_second_renyi(&rho, &part.abc())?;
        row.i2 = row.s2_ab + row.s2_bc - row.s2_b - row.s2_abc;
        Ok(())
    })();
    if let Err(e) = result {
        row.error = e.to_string();
    }
    row.wall_seconds = start.elapsed().as_secs_f64();
    row
}

fn compute_rows(config: &RunConfig, out_dir: &Path, engine: Engine) -> Vec<CsvRow> {
    let points = sweep_points(config);
    let tasks: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|pi| config.r_values.iter().map(move |&r| (pi, r)))
        .collect();
    tasks
        .par_iter()
        .map(|&(pi, r)| match engine {
            Engine::Mps => mps_row(config, out_dir, &points[pi], r),
            Engine::Ed => ed_row(config, &points[pi], r),
        })
        .collect()
}

pub fn write_csv(path: &Path, rows: &[CsvRow]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    let mut text = String::from(CSV_HEADER);
    text.push('\n');
    for row in rows {
        text.push_str(&row.to_line());
        text.push('\n');
    }
    fs::write(path, text).map_err(io_err(path))
}

pub fn read_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CSV_HEADER => {}
        _ => return Err(RunnerError::Csv { line: 1, message: "missing or wrong header".into() }),
    }
    lines.map(|(i, line)| CsvRow::parse(line, i + 1)).collect()
}

/// Run the CMI pipeline over the whole sweep and write `cmi.csv` (per the
/// configured engine). Per-point failures land in the error column; the run
/// only fails on I/O.
pub fn run_cmi(config: &RunConfig, out_dir: &Path) -> Result<PathBuf> {
    let rows = compute_rows(config, out_dir, config.engine);
    let path = out_dir.join("cmi.csv");
    write_csv(&path, &rows)?;
    Ok(path)
}

/// Key identifying one sweep point within a CSV (everything but `r`, the
/// entropies, and the diagnostics). Formatted floats keep exact bits.
fn group_key(row: &CsvRow) -> String {
    format!(
        "{}|{}|{}|{}|{}|{}|{}|{}",
        model_label(row.model),
        row.engine.label(),
        row.n_a,
        fmt_f64(row.h_x),
        fmt_f64(row.j_zz),
        fmt_f64(row.p_z),
        fmt_f64(row.p_zz),
        fmt_f64(row.p_x),
    )
}

/// Fit columns appended to each row of the augmented CSV.
#[derive(Debug, Clone)]
pub struct GroupFit {
    pub key: String,
    pub rows: Vec<CsvRow>,
    pub fit: Option<crate::fitter::FitResult>,
    pub stability: Option<f64>,
    pub flags: String,
}

fn curve_meta(config_model: Model, rows: &[CsvRow]) -> CurveMeta {
    let last = rows.last().expect("nonempty group");
    CurveMeta {
        model: ModelSpec {
            model: config_model,
            len: last.l,
            h_x: last.h_x,
            j_zz: last.j_zz,
            periodic: true,
        },
        n_a: last.n_a,
        channels: Vec::new(),
        policy: TruncationPolicy::default(),
        dmrg: DmrgConfig::default(),
    }
}

/// Group CSV rows by sweep point and fit each group's clean points.
pub fn fit_groups(rows: &[CsvRow]) -> Result<Vec<GroupFit>> {
    let mut order: Vec<String> = Vec::new();
    let mut groups: Vec<Vec<CsvRow>> = Vec::new();
    for row in rows {
        let key = group_key(row);
        match order.iter().position(|k| *k == key) {
            Some(i) => groups[i].push(row.clone()),
            None => {
                order.push(key);
                groups.push(vec![row.clone()]);
            }
        }
    }
    let mut out = Vec::with_capacity(groups.len());
    for (key, mut rows) in order.into_iter().zip(groups) {
        rows.sort_by_key(|r| r.r);
        let clean: Vec<&CsvRow> = rows.iter().filter(|r| r.error.is_empty()).collect();
        let points: Vec<CmiPoint> = clean
            .iter()
            .map(|r| CmiPoint {
                r: r.r,
                i2: r.i2,
                s2_ab: r.s2_ab,
                s2_bc: r.s2_bc,
                s2_b: r.s2_b,
                s2_abc: r.s2_abc,
                max_discarded_weight: r.max_discarded_weight,
                trace_drift: r.trace_drift,
                converged: true,
                wall_seconds: r.wall_seconds,
                error: None,
            })
            .collect();
        let (fit, stability, flags) = if points.len() < 3 {
            (None, None, format!("unfit:{}-points", points.len()))
        } else {
            let meta = curve_meta(rows[0].model, &rows);
            let curve = CmiCurve::new(meta, points)?;
            let fit = fit_exponential(&curve)?;
            let stability = xi2_stability(&curve).ok();
            let mut flags = Vec::new();
            if fit.no_decay {
                flags.push("no_decay");
            }
            (Some(fit), stability, flags.join(";"))
        };
        out.push(GroupFit { key, rows, fit, stability, flags });
    }
    Ok(out)
}

/// Fit every sweep point of a CSV; writes `<stem>_fit.csv` (original columns
/// plus c0, c1, xi2, rms_residual, flags) and `<stem>_fit.txt`, and returns
/// the group fits.
pub fn run_fit(csv_path: &Path) -> Result<Vec<GroupFit>> {
    let rows = read_csv(csv_path)?;
    if rows.is_empty() {
        return Err(RunnerError::Csv { line: 1, message: "no data rows".into() });
    }
    let groups = fit_groups(&rows)?;

    let stem = csv_path.file_stem().and_then(|s| s.to_str()).unwrap_or("data");
    let dir = csv_path.parent().unwrap_or_else(|| Path::new("."));
    let aug_path = dir.join(format!("{stem}_fit.csv"));
    let report_path = dir.join(format!("{stem}_fit.txt"));

    let mut aug = format!("{CSV_HEADER},c0,c1,xi2,rms_residual,flags\n");
    let mut report = String::new();
    for group in &groups {
        let (c0, c1, xi2, rms) = match &group.fit {
            Some(f) => (fmt_f64(f.c0), fmt_f64(f.c1), fmt_f64(f.xi2), fmt_f64(f.rms_residual)),
            None => (String::new(), String::new(), String::new(), String::new()),
        };
        for row in &group.rows {
            let _ = writeln!(aug, "{},{c0},{c1},{xi2},{rms},{}", row.to_line(), group.flags);
        }
        let _ = writeln!(report, "sweep point {}", group.key);
        match &group.fit {
            Some(f) => {
                let _ = writeln!(
                    report,
                    "  c0 = {:.6}  c1 = {:.6}  xi2 = {:.4}  rms = {:.3e}{}",
                    f.c0,
                    f.c1,
                    f.xi2,
                    f.rms_residual,
                    if f.no_decay { "  [no decay]" } else { "" },
                );
                if let Some(s) = group.stability {
                    let _ = writeln!(report, "  xi2 change without largest r: {:.2}%", 100.0 * s);
                }
            }
            None => {
                let _ = writeln!(report, "  {}", group.flags);
            }
        }
    }
    fs::write(&aug_path, aug).map_err(io_err(&aug_path))?;
    fs::write(&report_path, report).map_err(io_err(&report_path))?;
    Ok(groups)
}

/// Compare the matrix-product pipeline against the dense oracle on every
/// sweep point that fits the dense cap; writes `oracle.csv` with both
/// engines' rows and fails if any clean pair differs beyond `tol`.
pub fn run_oracle(config: &RunConfig, out_dir: &Path, tol: f64) -> Result<(PathBuf, f64)> {
    let max_len = config.n_a + 3 * config.r_values[config.r_values.len() - 1];
    if max_len > crate::oracle::MAX_ORACLE_LEN {
        return Err(RunnerError::Config(format!(
            "oracle run would need L = {max_len} > {}",
            crate::oracle::MAX_ORACLE_LEN
        )));
    }
    let mps_rows = compute_rows(config, out_dir, Engine::Mps);
    let ed_rows = compute_rows(config, out_dir, Engine::Ed);
    let mut worst = 0.0f64;
    for (m, e) in mps_rows.iter().zip(&ed_rows) {
        if !m.error.is_empty() || !e.error.is_empty() {
            continue;
        }
        for (a, b) in [
            (m.s2_ab, e.s2_ab),
            (m.s2_bc, e.s2_bc),
            (m.s2_b, e.s2_b),
            (m.s2_abc, e.s2_abc),
            (m.i2, e.i2),
        ] {
            worst = worst.max((a - b).abs());
        }
    }
    let mut rows = mps_rows;
    rows.extend(ed_rows);
    let path = out_dir.join("oracle.csv");
    write_csv(&path, &rows)?;
    if worst > tol {
        return Err(RunnerError::CheckFailed(format!(
            "pipelines disagree: max |delta| = {worst:.3e} > {tol:.1e}"
        )));
    }
    Ok((path, worst))
}

/// Closed-form stabilizer suite; returns human-readable pass lines, or the
/// first failure as an error.
pub fn run_stabilizer_check() -> Result<Vec<String>> {
    use std::f64::consts::LN_2;
    let mut lines = Vec::new();

    // Deep symmetry-broken limit: CMI is exactly ln 2 at every size.
    for r in 1..=12usize {
        let part = Tripartition::new(4, r)?;
        let group = swssb_group(part.len())?;
        let value = stabilizer_cmi(&group, &part)?;
        if value != LN_2 {
            return Err(RunnerError::CheckFailed(format!(
                "global-string CMI at r = {r}: {value} != ln 2"
            )));
        }
    }
    lines.push("global-string CMI = ln 2 exactly for r = 1..=12".into());

    // GHZ half-chain entropy: one generator survives restriction.
    let n = 4;
    let mut generators = Vec::new();
    for j in 0..n - 1 {
        let mut g = PauliString::identity(n);
        g.flip_z(j);
        g.flip_z(j + 1);
        generators.push(g);
    }
    let mut xs = PauliString::identity(n);
    for j in 0..n {
        xs.flip_x(j);
    }
    generators.push(xs);
    let ghz = StabilizerGroup::new(n, generators)?;
    if restricted_subgroup_dimension(&ghz, &[0, 1])? != 1
        || stabilizer_renyi_entropy(&ghz, &[0, 1])? != LN_2
    {
        return Err(RunnerError::CheckFailed("GHZ half-chain entropy != ln 2".into()));
    }
    lines.push("GHZ half-chain entropy = ln 2".into());

    // Pure-state complementarity for the cluster group.
    let cluster = cluster_group(8)?;
    for bits in 0..(1usize << 8) {
        let x: Vec<usize> = (0..8).filter(|&s| bits >> s & 1 == 1).collect();
        let xbar: Vec<usize> = (0..8).filter(|&s| bits >> s & 1 == 0).collect();
        if stabilizer_renyi_entropy(&cluster, &x)? != stabilizer_renyi_entropy(&cluster, &xbar)? {
            return Err(RunnerError::CheckFailed(format!(
                "cluster complementarity broken at X = {x:?}"
            )));
        }
    }
    lines.push("cluster-state entropies complementary on all 2^8 subsets".into());

    // Product group: zero entropy everywhere.
    let product = StabilizerGroup::new(6, (0..6).map(|q| PauliString::z(6, q)).collect())?;
    for bits in 0..(1usize << 6) {
        let x: Vec<usize> = (0..6).filter(|&s| bits >> s & 1 == 1).collect();
        if stabilizer_renyi_entropy(&product, &x)? != 0.0 {
            return Err(RunnerError::CheckFailed("product group has nonzero entropy".into()));
        }
    }
    lines.push("product-state entropies vanish on all subsets".into());

    Ok(lines)
}

/// Composite: checkpoints, CMI CSV, fit report.
pub fn run_sweep(config: &RunConfig, out_dir: &Path, force: bool) -> Result<Vec<GroupFit>> {
    run_ground(config, out_dir, force)?;
    let csv = run_cmi(config, out_dir)?;
    run_fit(&csv)
}
