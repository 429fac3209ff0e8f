//! Tripartition geometry and the second Renyi conditional mutual information.
//!
//! The ring of `L = N_A + 3r` sites splits into `A|B1|C|B2` with `|A| = N_A`,
//! `|B1| = |C| = |B2| = r` and `B = B1 u B2`, so `A` and `C` are separated by
//! a buffer of width `r` on both arcs. The second Renyi entropy of a region
//! `X` comes from the depolarizer-norm identity: projecting every complement
//! site of the doubled-space vector onto the local identity direction leaves
//! `|I/d (x) rho_X>>`, whose squared norm is `Tr[rho_X^2] / d` with
//! `d = 2^|complement|`. All entropies use the natural logarithm, the unit in
//! which the stabilizer limits come out as multiples of ln 2.
//!
//! `cmi` combines four such entropies, each from an independent
//! depolarization of the same input; `cmi_r_sweep` drives the whole pipeline
//! (ground state, vectorization, channels, CMI) across buffer widths and
//! collects per-point diagnostics for the fitter.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;
use std::time::Instant;
use thiserror::Error;

use crate::choi::{vectorize_pure, identity_choi, ChannelSpec, ChoiError, ChoiState};
use crate::dmrg::{ground_state, DmrgConfig, DmrgError, ModelSpec};
use crate::fitter::{CmiCurve, CmiPoint, CurveMeta, FitError};
use crate::tensor::TruncationPolicy;

#[derive(Debug, Error)]
pub enum RenyiError {
    #[error(transparent)]
    Choi(#[from] ChoiError),
    #[error(transparent)]
    Dmrg(#[from] DmrgError),
    #[error(transparent)]
    Curve(#[from] FitError),
    #[error("site {site} out of range for chain of length {len}")]
    SiteOutOfRange { site: usize, len: usize },
    #[error("site {0} listed twice")]
    DuplicateSite(usize),
    #[error("site sets overlap at site {0}")]
    OverlappingSets(usize),
    #[error("state length {got} does not match partition length {want}")]
    LengthMismatch { got: usize, want: usize },
    #[error("invalid partition: {0}")]
    BadPartition(String),
    #[error("depolarized norm underflowed; the state is numerically broken")]
    NormUnderflow,
    #[error("state trace is numerically zero or negative: {0}")]
    BadTrace(f64),
    #[error("sweep needs a nonempty, strictly increasing r list")]
    BadSweep,
}

pub type Result<T> = std::result::Result<T, RenyiError>;

/// The `A|B1|C|B2` ring partition with `|A| = n_a` and all three other arcs
/// of width `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tripartition {
    n_a: usize,
    r: usize,
}

impl Tripartition {
    pub fn new(n_a: usize, r: usize) -> Result<Self> {
        if n_a < 1 || r < 1 {
            return Err(RenyiError::BadPartition(format!(
                "need n_a >= 1 and r >= 1, got n_a = {n_a}, r = {r}"
            )));
        }
        Ok(Self { n_a, r })
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> usize {
        self.n_a + 3 * self.r
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn a(&self) -> Vec<usize> {
        (0..self.n_a).collect()
    }

    pub fn b1(&self) -> Vec<usize> {
        (self.n_a..self.n_a + self.r).collect()
    }

    pub fn c(&self) -> Vec<usize> {
        (self.n_a + self.r..self.n_a + 2 * self.r).collect()
    }

    pub fn b2(&self) -> Vec<usize> {
        (self.n_a + 2 * self.r..self.len()).collect()
    }

    /// Both buffer arcs, in site order.
    pub fn b(&self) -> Vec<usize> {
        let mut sites = self.b1();
        sites.extend(self.b2());
        sites
    }

    pub fn ab(&self) -> Vec<usize> {
        let mut sites = self.a();
        sites.extend(self.b());
        sites.sort_unstable();
        sites
    }

    pub fn bc(&self) -> Vec<usize> {
        (self.n_a..self.len()).collect()
    }

    pub fn abc(&self) -> Vec<usize> {
        (0..self.len()).collect()
    }
}

/// Occupancy mask of `x` over `len` sites; rejects out-of-range and repeated
/// sites.
fn site_mask(len: usize, x: &[usize]) -> Result<Vec<bool>> {
    let mut mask = vec![false; len];
    for &site in x {
        if site >= len {
            return Err(RenyiError::SiteOutOfRange { site, len });
        }
        if mask[site] {
            return Err(RenyiError::DuplicateSite(site));
        }
        mask[site] = true;
    }
    Ok(mask)
}

/// Natural log of the (positive real) trace, in log scale.
fn log_trace(rho: &ChoiState) -> Result<f64> {
    let eye = identity_choi(rho.len())?;
    let ip = eye.state().inner_product(rho.state()).map_err(ChoiError::from)?;
    if ip.log_magnitude == f64::NEG_INFINITY || ip.phase.re <= 0.0 {
        return Err(RenyiError::BadTrace(ip.value().re));
    }
    Ok(ip.log_magnitude + ip.phase.re.ln())
}

/// Second Renyi entropy of the sites in `x`:
/// `-ln( 2^k ||D_complement rho>>||^2 / (Tr rho)^2 )` with `k` the
/// complement size. Empty `x` returns 0.
pub fn second_renyi_entropy(rho: &ChoiState, x: &[usize]) -> Result<f64> {
    let len = rho.len();
    let mask = site_mask(len, x)?;
    if x.is_empty() {
        return Ok(0.0);
    }
    let complement: Vec<usize> = (0..len).filter(|&s| !mask[s]).collect();
    let log_tr = log_trace(rho)?;
    let log_norm = if complement.is_empty() {
        rho.state().log_norm().map_err(ChoiError::from)?
    } else {
        let dep = rho.apply_depolarizer(&complement)?;
        dep.state().log_norm().map_err(ChoiError::from)?
    };
    if !log_norm.is_finite() {
        return Err(RenyiError::NormUnderflow);
    }
    let s2 = -(complement.len() as f64 * LN_2 + 2.0 * log_norm - 2.0 * log_tr);
    if !s2.is_finite() {
        return Err(RenyiError::NormUnderflow);
    }
    Ok(s2)
}

/// Second Renyi mutual information `S2_X + S2_Y - S2_XY` of disjoint sets.
pub fn renyi_mutual_information(rho: &ChoiState, x: &[usize], y: &[usize]) -> Result<f64> {
    let mask = site_mask(rho.len(), x)?;
    for &site in y {
        if site < mask.len() && mask[site] {
            return Err(RenyiError::OverlappingSets(site));
        }
    }
    let mut union = x.to_vec();
    union.extend_from_slice(y);
    union.sort_unstable();
    Ok(second_renyi_entropy(rho, x)? + second_renyi_entropy(rho, y)?
        - second_renyi_entropy(rho, &union)?)
}

/// Second Renyi CMI `I2(A:C|B) = S2_AB + S2_BC - S2_B - S2_ABC`, each
/// entropy from its own depolarization of the same input state.
pub fn cmi(rho: &ChoiState, part: &Tripartition) -> Result<f64> {
    let parts = cmi_parts(rho, part)?;
    Ok(parts.i2)
}

/// The four entropies behind one CMI value, kept for diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct CmiParts {
    pub s2_ab: f64,
    pub s2_bc: f64,
    pub s2_b: f64,
    pub s2_abc: f64,
    pub i2: f64,
}

pub fn cmi_parts(rho: &ChoiState, part: &Tripartition) -> Result<CmiParts> {
    if rho.len() != part.len() {
        return Err(RenyiError::LengthMismatch { got: rho.len(), want: part.len() });
    }
    let s2_ab = second_renyi_entropy(rho, &part.ab())?;
    let s2_bc = second_renyi_entropy(rho, &part.bc())?;
    let s2_b = second_renyi_entropy(rho, &part.b())?;
    let s2_abc = second_renyi_entropy(rho, &part.abc())?;
    Ok(CmiParts { s2_ab, s2_bc, s2_b, s2_abc, i2: s2_ab + s2_bc - s2_b - s2_abc })
}

fn default_n_a() -> usize {
    4
}

/// Everything needed to produce one decohered state at a given buffer width:
/// the model template (its `len` is replaced by `n_a + 3r` per point), the
/// channel layers in application order, and the solver/truncation settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CmiPipeline {
    pub model: ModelSpec,
    #[serde(default = "default_n_a")]
    pub n_a: usize,
    #[serde(default)]
    pub channels: Vec<ChannelSpec>,
    #[serde(default)]
    pub dmrg: DmrgConfig,
    #[serde(default)]
    pub policy: TruncationPolicy,
}

fn run_point(pipeline: &CmiPipeline, r: usize) -> CmiPoint {
    let start = Instant::now();
    let mut failed = CmiPoint {
        r,
        i2: 0.0,
        s2_ab: 0.0,
        s2_bc: 0.0,
        s2_b: 0.0,
        s2_abc: 0.0,
        max_discarded_weight: 0.0,
        trace_drift: 0.0,
        converged: false,
        wall_seconds: 0.0,
        error: None,
    };
    let result = (|| -> Result<CmiPoint> {
        let part = Tripartition::new(pipeline.n_a, r)?;
        let spec = ModelSpec { len: part.len(), ..pipeline.model };
        let ground = ground_state(&spec, &pipeline.dmrg)?;
        let mut rho = vectorize_pure(&ground.state, &pipeline.policy)?;
        let mut max_dw = 0.0f64;
        let mut drift = 0.0f64;
        for channel in &pipeline.channels {
            let (next, report) = rho.apply_channel(channel, &pipeline.policy)?;
            rho = next;
            max_dw = max_dw.max(report.max_discarded_weight);
            drift = drift.max(report.trace_drift);
        }
        let parts = cmi_parts(&rho, &part)?;
        Ok(CmiPoint {
            r,
            i2: parts.i2,
            s2_ab: parts.s2_ab,
            s2_bc: parts.s2_bc,
            s2_b: parts.s2_b,
            s2_abc: parts.s2_abc,
            max_discarded_weight: max_dw,
            trace_drift: drift,
            converged: ground.converged,
            wall_seconds: 0.0,
            error: None,
        })
    })();
    let mut point = match result {
        Ok(p) => p,
        Err(e) => {
            failed.error = Some(e.to_string());
            failed
        }
    };
    point.wall_seconds = start.elapsed().as_secs_f64();
    point
}

/// Run the full pipeline at every buffer width in `r_values` (nonempty,
/// strictly increasing). A point that fails is recorded with its error
/// string and zeroed values; the sweep continues. Points are independent and
/// evaluated in parallel.
pub fn cmi_r_sweep(pipeline: &CmiPipeline, r_values: &[usize]) -> Result<CmiCurve> {
    if r_values.is_empty() || r_values.windows(2).any(|w| w[1] <= w[0]) || r_values[0] == 0 {
        return Err(RenyiError::BadSweep);
    }
    let points: Vec<CmiPoint> =
        r_values.par_iter().map(|&r| run_point(pipeline, r)).collect();
    let meta = CurveMeta {
        model: ModelSpec {
            len: pipeline.n_a + 3 * r_values[r_values.len() - 1],
            ..pipeline.model
        },
        n_a: pipeline.n_a,
        channels: pipeline.channels.clone(),
        policy: pipeline.policy,
        dmrg: pipeline.dmrg,
    };
    Ok(CmiCurve::new(meta, points)?)
}
