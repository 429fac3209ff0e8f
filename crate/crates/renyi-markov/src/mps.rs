//! Matrix product states and operators on open chains.
//!
//! A [`MatrixProductState`] stores one rank-3 tensor per site with axes
//! (left bond, physical, right bond) and boundary bonds of extent 1. The
//! represented vector is `e^{log_scale}` times the contraction of the site
//! tensors: channel application is non-unitary and purities decay
//! exponentially with length, so every norm and overlap is carried in log
//! scale rather than risked against double-precision underflow.
//!
//! Canonical-center bookkeeping is explicit. When `canonical_center = Some(c)`
//! every tensor left of `c` is left-orthonormal and every tensor right of `c`
//! is right-orthonormal, which makes local truncations globally optimal and
//! keeps the invariant testable. All public operations treat states as
//! immutable values; `_mut` variants exist for hot loops.
//!
//! Checkpoints use a fixed little-endian binary layout (magic `MPS1`) so a
//! save/load round trip is bit-exact.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read as IoRead, Write as IoWrite};
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rand::Rng;
use thiserror::Error;

use crate::tensor::{
    contract, scale_columns, scale_rows, svd_split, DenseTensor, TensorError, TruncationPolicy,
};

/// Largest dense vector/matrix entry count `to_dense` will materialize.
const MAX_DENSE_ENTRIES: usize = 1 << 24;

#[derive(Debug, Error)]
pub enum MpsError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("site {site} out of range for chain of length {len}")]
    SiteOutOfRange { site: usize, len: usize },
    #[error("operator dimension {got} does not match physical dimension {want}")]
    OperatorDimension { got: usize, want: usize },
    #[error("incompatible chains: {0}")]
    Incompatible(String),
    #[error("malformed tensor network: {0}")]
    Malformed(String),
    #[error("state has numerically zero norm")]
    ZeroNorm,
    #[error("dense representation would need {0} entries")]
    TooLarge(usize),
    #[error("checkpoint io: {0}")]
    Io(#[from] std::io::Error),
    #[error("checkpoint format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, MpsError>;

/// Inner product reported as `phase * e^{log_magnitude}` with `|phase| = 1`.
///
/// A numerically zero overlap is flagged by `log_magnitude = -inf` (the phase
/// is then the conventional 1).
#[derive(Debug, Clone, Copy)]
pub struct LogInner {
    pub phase: C64,
    pub log_magnitude: f64,
}

impl LogInner {
    const ZERO: Self = Self { phase: C64::new(1.0, 0.0), log_magnitude: f64::NEG_INFINITY };

    /// Linear-scale value; underflows to zero when the log magnitude does.
    pub fn value(&self) -> C64 {
        if self.log_magnitude == f64::NEG_INFINITY {
            C64::new(0.0, 0.0)
        } else {
            self.phase * self.log_magnitude.exp()
        }
    }
}

/// Open-chain matrix product state with a global log-scale factor.
#[derive(Debug, Clone)]
pub struct MatrixProductState {
    tensors: Vec<DenseTensor>,
    phys_dim: usize,
    log_scale: f64,
    canonical_center: Option<usize>,
}

impl MatrixProductState {
    /// Build from site tensors; validates bond adjacency and uniform physical
    /// dimension.
    pub fn new(tensors: Vec<DenseTensor>, log_scale: f64) -> Result<Self> {
        if tensors.is_empty() {
            return Err(MpsError::Malformed("empty chain".into()));
        }
        let phys_dim = tensors[0].shape().get(1).copied().unwrap_or(0);
        validate_chain(&tensors, phys_dim)?;
        if log_scale.is_nan() {
            return Err(MpsError::Malformed("log_scale is NaN".into()));
        }
        Ok(Self { tensors, phys_dim, log_scale, canonical_center: None })
    }

    /// Product state from one local vector per site.
    pub fn product_state(phys_dim: usize, locals: &[Vec<C64>]) -> Result<Self> {
        if locals.is_empty() {
            return Err(MpsError::Malformed("empty chain".into()));
        }
        let tensors = locals
            .iter()
            .map(|v| {
                if v.len() != phys_dim {
                    return Err(MpsError::OperatorDimension { got: v.len(), want: phys_dim });
                }
                Ok(DenseTensor::from_elements(&[1, phys_dim, 1], v.clone())?)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(tensors, 0.0)
    }

    /// Random state with bond dimension capped at `chi`; not normalized.
    pub fn random<R: Rng>(len: usize, phys_dim: usize, chi: usize, rng: &mut R) -> Result<Self> {
        if len == 0 || phys_dim == 0 || chi == 0 {
            return Err(MpsError::Malformed("empty chain".into()));
        }
        let bond = |site: usize| -> usize {
            let from_left = saturating_pow(phys_dim, site);
            let from_right = saturating_pow(phys_dim, len - site);
            chi.min(from_left).min(from_right)
        };
        let tensors = (0..len)
            .map(|i| {
                let (l, r) = (bond(i), bond(i + 1));
                let entries: Vec<C64> = (0..l * phys_dim * r)
                    .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                Ok(DenseTensor::from_elements(&[l, phys_dim, r], entries)?)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(tensors, 0.0)
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn phys_dim(&self) -> usize {
        self.phys_dim
    }

    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    /// Shift the global log-scale factor; used for trace renormalization.
    pub fn shift_log_scale(&mut self, delta: f64) {
        self.log_scale += delta;
    }

    pub fn canonical_center(&self) -> Option<usize> {
        self.canonical_center
    }

    pub fn tensors(&self) -> &[DenseTensor] {
        &self.tensors
    }

    pub fn tensor(&self, site: usize) -> &DenseTensor {
        &self.tensors[site]
    }

    /// Internal bond extents, length `L - 1`.
    pub fn bond_dims(&self) -> Vec<usize> {
        self.tensors.iter().skip(1).map(|t| t.shape()[0]).collect()
    }

    pub fn max_bond_dim(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    /// Bring the state into mixed-canonical form about `center`, folding the
    /// overall norm into `log_scale` (the center tensor leaves with Frobenius
    /// norm 1).
    pub fn canonicalize(&self, center: usize) -> Result<Self> {
        let mut out = self.clone();
        out.canonicalize_mut(center)?;
        Ok(out)
    }

    pub fn canonicalize_mut(&mut self, center: usize) -> Result<()> {
        let len = self.len();
        if center >= len {
            return Err(MpsError::SiteOutOfRange { site: center, len });
        }
        for i in 0..center {
            self.left_orthonormalize_step(i)?;
        }
        for i in ((center + 1)..len).rev() {
            self.right_orthonormalize_step(i)?;
        }
        self.fold_center_norm(center);
        self.canonical_center = Some(center);
        Ok(())
    }

    fn left_orthonormalize_step(&mut self, site: usize) -> Result<()> {
        let split = svd_split(&self.tensors[site], &[0, 1], &TruncationPolicy::exact())?;
        let carry = scale_rows(&split.vt, &split.singular_values)?;
        self.tensors[site] = split.u;
        self.tensors[site + 1] = contract(&carry, &self.tensors[site + 1], &[(1, 0)])?;
        Ok(())
    }

    fn right_orthonormalize_step(&mut self, site: usize) -> Result<()> {
        let split = svd_split(&self.tensors[site], &[0], &TruncationPolicy::exact())?;
        let carry = scale_columns(&split.u, &split.singular_values)?;
        self.tensors[site] = split.vt;
        self.tensors[site - 1] = contract(&self.tensors[site - 1], &carry, &[(2, 0)])?;
        Ok(())
    }

    fn fold_center_norm(&mut self, center: usize) {
        let nrm = self.tensors[center].frobenius_norm();
        if nrm > 0.0 && nrm.is_finite() {
            self.tensors[center] = self.tensors[center].scaled(C64::new(1.0 / nrm, 0.0));
            self.log_scale += nrm.ln();
        } else if nrm == 0.0 {
            self.log_scale = f64::NEG_INFINITY;
        }
    }

    /// Truncate every bond under `policy`. Returns the compressed state and
    /// the sum over bonds of the relative discarded squared singular values.
    pub fn compress(&self, policy: &TruncationPolicy) -> Result<(Self, f64)> {
        let mut out = self.clone();
        let dw = out.compress_mut(policy)?;
        Ok((out, dw))
    }

    pub fn compress_mut(&mut self, policy: &TruncationPolicy) -> Result<f64> {
        Ok(self.compress_mut_stats(policy)?.0)
    }

    /// Like [`compress_mut`](Self::compress_mut) but also reports the largest
    /// single-bond relative discarded weight.
    pub fn compress_mut_stats(&mut self, policy: &TruncationPolicy) -> Result<(f64, f64)> {
        let len = self.len();
        self.canonicalize_mut(len - 1)?;
        let mut total_discarded = 0.0;
        let mut max_discarded = 0.0f64;
        for i in (1..len).rev() {
            let split = svd_split(&self.tensors[i], &[0], policy)?;
            total_discarded += split.discarded_weight;
            max_discarded = max_discarded.max(split.discarded_weight);
            let carry = scale_columns(&split.u, &split.singular_values)?;
            self.tensors[i] = split.vt;
            self.tensors[i - 1] = contract(&self.tensors[i - 1], &carry, &[(2, 0)])?;
        }
        self.fold_center_norm(0);
        self.canonical_center = Some(0);
        Ok((total_discarded, max_discarded))
    }

    /// Apply a `phys_dim x phys_dim` operator at one site; bonds unchanged.
    pub fn apply_site_operator(&self, site: usize, op: &Array2<C64>) -> Result<Self> {
        let mut out = self.clone();
        out.apply_site_operator_mut(site, op)?;
        Ok(out)
    }

    pub fn apply_site_operator_mut(&mut self, site: usize, op: &Array2<C64>) -> Result<()> {
        let len = self.len();
        if site >= len {
            return Err(MpsError::SiteOutOfRange { site, len });
        }
        if op.nrows() != self.phys_dim || op.ncols() != self.phys_dim {
            return Err(MpsError::OperatorDimension { got: op.nrows(), want: self.phys_dim });
        }
        let op_t = DenseTensor::from_matrix(op.clone());
        let applied = contract(&op_t, &self.tensors[site], &[(1, 1)])?;
        self.tensors[site] = applied.permuted(&[1, 0, 2])?;
        if self.canonical_center != Some(site) {
            self.canonical_center = None;
        }
        Ok(())
    }

    /// Apply a `(d^2) x (d^2)` gate on sites `(site, site + 1)` with immediate
    /// SVD truncation; returns the relative discarded weight of that bond.
    /// Gate rows and columns fuse the pair indices row-major (left site slow).
    pub fn apply_two_site_gate(
        &self,
        site: usize,
        gate: &Array2<C64>,
        policy: &TruncationPolicy,
    ) -> Result<(Self, f64)> {
        let mut out = self.clone();
        let dw = out.apply_two_site_gate_mut(site, gate, policy)?;
        Ok((out, dw))
    }

    pub fn apply_two_site_gate_mut(
        &mut self,
        site: usize,
        gate: &Array2<C64>,
        policy: &TruncationPolicy,
    ) -> Result<f64> {
        let len = self.len();
        if site + 1 >= len {
            return Err(MpsError::SiteOutOfRange { site: site + 1, len });
        }
        let d = self.phys_dim;
        if gate.nrows() != d * d || gate.ncols() != d * d {
            return Err(MpsError::OperatorDimension { got: gate.nrows(), want: d * d });
        }
        // Local truncation is optimal only in mixed-canonical form about the
        // pair; move the center if it is elsewhere.
        match self.canonical_center {
            Some(c) if c == site || c == site + 1 => {}
            _ => self.canonicalize_mut(site)?,
        }
        let gate4 = DenseTensor::from_matrix(gate.clone()).reshaped(&[d, d, d, d])?;
        let theta = contract(&self.tensors[site], &self.tensors[site + 1], &[(2, 0)])?;
        let applied = contract(&gate4, &theta, &[(2, 1), (3, 2)])?.permuted(&[2, 0, 1, 3])?;
        let split = svd_split(&applied, &[0, 1], policy)?;
        self.tensors[site] = split.u;
        self.tensors[site + 1] = scale_rows(&split.vt, &split.singular_values)?;
        self.canonical_center = Some(site + 1);
        self.fold_center_norm(site + 1);
        Ok(split.discarded_weight)
    }

    /// Apply an MPO (zip contraction), then compress under `policy`.
    pub fn apply_mpo(
        &self,
        mpo: &MatrixProductOperator,
        policy: &TruncationPolicy,
    ) -> Result<(Self, f64)> {
        let mut out = self.clone();
        let dw = out.apply_mpo_mut(mpo, policy)?;
        Ok((out, dw))
    }

    pub fn apply_mpo_mut(
        &mut self,
        mpo: &MatrixProductOperator,
        policy: &TruncationPolicy,
    ) -> Result<f64> {
        if mpo.len() != self.len() {
            return Err(MpsError::Incompatible(format!(
                "mpo length {} vs chain length {}",
                mpo.len(),
                self.len()
            )));
        }
        if mpo.phys_dim() != self.phys_dim {
            return Err(MpsError::OperatorDimension { got: mpo.phys_dim(), want: self.phys_dim });
        }
        for (t, w) in self.tensors.iter_mut().zip(mpo.tensors()) {
            // W[w,o,i,w'] T[a,i,b] -> [(w a), o, (w' b)], operator bond slow.
            let zipped = contract(w, t, &[(2, 1)])?.permuted(&[0, 3, 1, 2, 4])?;
            let shape = zipped.shape().to_vec();
            *t = zipped.reshaped(&[shape[0] * shape[1], shape[2], shape[3] * shape[4]])?;
        }
        self.canonical_center = None;
        self.compress_mut(policy)
    }

    /// `<self|other>` with `self` conjugated, in log scale.
    pub fn inner_product(&self, other: &Self) -> Result<LogInner> {
        if self.len() != other.len() || self.phys_dim != other.phys_dim {
            return Err(MpsError::Incompatible(format!(
                "lengths {} vs {}, phys dims {} vs {}",
                self.len(),
                other.len(),
                self.phys_dim,
                other.phys_dim
            )));
        }
        let mut env = DenseTensor::from_elements(&[1, 1], vec![C64::new(1.0, 0.0)])?;
        let mut log_acc = 0.0;
        for (ta, tb) in self.tensors.iter().zip(other.tensors()) {
            let half = contract(&env, &ta.conjugate(), &[(0, 0)])?;
            env = contract(&half, tb, &[(0, 0), (1, 1)])?;
            let m = env.max_abs();
            if m == 0.0 {
                return Ok(LogInner::ZERO);
            }
            env = env.scaled(C64::new(1.0 / m, 0.0));
            log_acc += m.ln();
        }
        let phase = env.entries()[0];
        Ok(LogInner {
            phase,
            log_magnitude: log_acc + self.log_scale + other.log_scale,
        })
    }

    /// Log of the vector norm, including the global scale factor.
    pub fn log_norm(&self) -> Result<f64> {
        Ok(self.inner_product(self)?.log_magnitude / 2.0)
    }

    /// Rescaled copy with unit norm and `log_scale = 0`.
    pub fn normalized(&self) -> Result<Self> {
        let mut out = self.clone();
        out.canonicalize_mut(0)?;
        if !out.log_scale.is_finite() {
            return Err(MpsError::ZeroNorm);
        }
        out.log_scale = 0.0;
        Ok(out)
    }

    /// Normalized expectation value `<s|O|s> / <s|s>`, evaluated in log scale.
    pub fn expectation_mpo(&self, mpo: &MatrixProductOperator) -> Result<C64> {
        if mpo.len() != self.len() {
            return Err(MpsError::Incompatible(format!(
                "mpo length {} vs chain length {}",
                mpo.len(),
                self.len()
            )));
        }
        if mpo.phys_dim() != self.phys_dim {
            return Err(MpsError::OperatorDimension { got: mpo.phys_dim(), want: self.phys_dim });
        }
        let norm = self.inner_product(self)?;
        if norm.log_magnitude == f64::NEG_INFINITY {
            return Err(MpsError::ZeroNorm);
        }
        let mut env = DenseTensor::from_elements(&[1, 1, 1], vec![C64::new(1.0, 0.0)])?;
        let mut log_acc = 0.0;
        for (t, w) in self.tensors.iter().zip(mpo.tensors()) {
            let a = contract(&env, &t.conjugate(), &[(0, 0)])?;
            let b = contract(&a, w, &[(0, 0), (2, 1)])?;
            env = contract(&b, t, &[(0, 0), (2, 1)])?;
            let m = env.max_abs();
            if m == 0.0 {
                return Ok(C64::new(0.0, 0.0));
            }
            env = env.scaled(C64::new(1.0 / m, 0.0));
            log_acc += m.ln();
        }
        // The state's log_scale enters bra and ket alike and cancels against
        // the norm, so only the transfer accumulators remain.
        let phase = env.entries()[0];
        Ok(phase / norm.phase * (log_acc + 2.0 * self.log_scale - norm.log_magnitude).exp())
    }

    /// Dense coefficient vector (length `phys_dim^L`), including the scale
    /// factor. Fails above [`MAX_DENSE_ENTRIES`].
    pub fn to_dense(&self) -> Result<Vec<C64>> {
        let total = saturating_pow(self.phys_dim, self.len());
        if total > MAX_DENSE_ENTRIES {
            return Err(MpsError::TooLarge(total));
        }
        let first_shape = self.tensors[0].shape().to_vec();
        let mut acc = self.tensors[0].reshaped(&[first_shape[0] * first_shape[1], first_shape[2]])?;
        for t in &self.tensors[1..] {
            let joined = contract(&acc, t, &[(1, 0)])?;
            let shape = joined.shape().to_vec();
            acc = joined.reshaped(&[shape[0] * shape[1], shape[2]])?;
        }
        let factor = if self.log_scale == f64::NEG_INFINITY {
            0.0
        } else {
            self.log_scale.exp()
        };
        Ok(acc.entries().iter().map(|z| z * factor).collect())
    }

    /// Right-canonical decomposition of the normalized state: tensor 0 carries
    /// the norm (Frobenius norm 1), tensors 1..L are right-orthonormal, and
    /// the returned per-bond Schmidt coefficients are those of the unit-norm
    /// vector (each list nonincreasing with squares summing to 1).
    pub fn right_schmidt_form(&self) -> Result<(Vec<DenseTensor>, Vec<Vec<f64>>)> {
        let mut st = self.clone();
        let len = st.len();
        st.canonicalize_mut(len - 1)?;
        if !st.log_scale.is_finite() {
            return Err(MpsError::ZeroNorm);
        }
        let mut schmidt: Vec<Vec<f64>> = Vec::with_capacity(len.saturating_sub(1));
        for i in (1..len).rev() {
            let split = svd_split(&st.tensors[i], &[0], &TruncationPolicy::exact())?;
            let carry = scale_columns(&split.u, &split.singular_values)?;
            st.tensors[i] = split.vt;
            st.tensors[i - 1] = contract(&st.tensors[i - 1], &carry, &[(2, 0)])?;
            schmidt.push(split.singular_values);
        }
        schmidt.reverse();
        let nrm = st.tensors[0].frobenius_norm();
        if nrm <= 0.0 || !nrm.is_finite() {
            return Err(MpsError::ZeroNorm);
        }
        st.tensors[0] = st.tensors[0].scaled(C64::new(1.0 / nrm, 0.0));
        Ok((st.tensors, schmidt))
    }

    /// Worst orthonormality defect (max-abs deviation from the identity) over
    /// all sites strictly left (as left-isometries) and right (as
    /// right-isometries) of `center`.
    pub fn orthonormality_defect(&self, center: usize) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (i, t) in self.tensors.iter().enumerate() {
            let gram = if i < center {
                contract(&t.conjugate(), t, &[(0, 0), (1, 1)])?
            } else if i > center {
                contract(&t.conjugate(), t, &[(1, 1), (2, 2)])?
            } else {
                continue;
            };
            let n = gram.shape()[0];
            let eye = DenseTensor::identity(n);
            let defect = gram
                .entries()
                .iter()
                .zip(eye.entries())
                .map(|(g, e)| (g - e).norm())
                .fold(0.0, f64::max);
            worst = worst.max(defect);
        }
        Ok(worst)
    }

    /// Write the `MPS1` checkpoint (little-endian, bit-exact round trip).
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(b"MPS1")?;
        w.write_all(&(self.len() as u64).to_le_bytes())?;
        w.write_all(&(self.phys_dim as u64).to_le_bytes())?;
        for t in &self.tensors {
            let shape = t.shape();
            w.write_all(&(shape[0] as u64).to_le_bytes())?;
            w.write_all(&(shape[2] as u64).to_le_bytes())?;
            for z in t.entries() {
                w.write_all(&z.re.to_le_bytes())?;
                w.write_all(&z.im.to_le_bytes())?;
            }
        }
        w.write_all(&self.log_scale.to_le_bytes())?;
        w.flush()?;
        Ok(())
    }

    /// Read an `MPS1` checkpoint. The canonical center is not part of the
    /// format, so loaded states report `canonical_center = None`.
    pub fn load(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != b"MPS1" {
            return Err(MpsError::Format("bad magic".into()));
        }
        let len = read_u64(&mut r)? as usize;
        let phys_dim = read_u64(&mut r)? as usize;
        if len == 0 || phys_dim == 0 {
            return Err(MpsError::Format("empty chain".into()));
        }
        let mut tensors = Vec::with_capacity(len);
        for _ in 0..len {
            let left = read_u64(&mut r)? as usize;
            let right = read_u64(&mut r)? as usize;
            let count = left
                .checked_mul(phys_dim)
                .and_then(|x| x.checked_mul(right))
                .ok_or_else(|| MpsError::Format("tensor size overflow".into()))?;
            let mut entries = Vec::with_capacity(count);
            for _ in 0..count {
                let re = read_f64(&mut r)?;
                let im = read_f64(&mut r)?;
                entries.push(C64::new(re, im));
            }
            tensors.push(DenseTensor::from_elements(&[left, phys_dim, right], entries)?);
        }
        let log_scale = read_f64(&mut r)?;
        if log_scale.is_nan() {
            return Err(MpsError::Format("log_scale is NaN".into()));
        }
        validate_chain(&tensors, phys_dim)?;
        Ok(Self { tensors, phys_dim, log_scale, canonical_center: None })
    }
}

/// Open-chain matrix product operator: rank-4 site tensors with axes
/// (left bond, physical out, physical in, right bond).
#[derive(Debug, Clone)]
pub struct MatrixProductOperator {
    tensors: Vec<DenseTensor>,
    phys_dim: usize,
}

impl MatrixProductOperator {
    pub fn new(tensors: Vec<DenseTensor>) -> Result<Self> {
        if tensors.is_empty() {
            return Err(MpsError::Malformed("empty chain".into()));
        }
        let phys_dim = tensors[0].shape().get(1).copied().unwrap_or(0);
        for (i, t) in tensors.iter().enumerate() {
            if t.ndim() != 4 {
                return Err(MpsError::Malformed(format!("site {i}: rank {} != 4", t.ndim())));
            }
            if t.shape()[1] != phys_dim || t.shape()[2] != phys_dim {
                return Err(MpsError::Malformed(format!("site {i}: non-uniform physical dims")));
            }
            if i == 0 && t.shape()[0] != 1 {
                return Err(MpsError::Malformed("left boundary bond != 1".into()));
            }
            if i + 1 == tensors.len() && t.shape()[3] != 1 {
                return Err(MpsError::Malformed("right boundary bond != 1".into()));
            }
            if i > 0 && tensors[i - 1].shape()[3] != t.shape()[0] {
                return Err(MpsError::Malformed(format!("bond mismatch at sites {}/{}", i - 1, i)));
            }
        }
        Ok(Self { tensors, phys_dim })
    }

    pub fn identity(len: usize, phys_dim: usize) -> Result<Self> {
        let site = DenseTensor::identity(phys_dim).reshaped(&[1, phys_dim, phys_dim, 1])?;
        Self::new(vec![site; len])
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn phys_dim(&self) -> usize {
        self.phys_dim
    }

    pub fn tensors(&self) -> &[DenseTensor] {
        &self.tensors
    }

    pub fn max_bond_dim(&self) -> usize {
        self.tensors.iter().skip(1).map(|t| t.shape()[0]).max().unwrap_or(1)
    }

    /// Dense `d^L x d^L` matrix; fails above [`MAX_DENSE_ENTRIES`].
    pub fn to_dense(&self) -> Result<Array2<C64>> {
        let dim = saturating_pow(self.phys_dim, self.len());
        if dim.saturating_mul(dim) > MAX_DENSE_ENTRIES {
            return Err(MpsError::TooLarge(dim.saturating_mul(dim)));
        }
        let first_shape = self.tensors[0].shape().to_vec();
        let mut acc =
            self.tensors[0].reshaped(&[first_shape[1], first_shape[2], first_shape[3]])?;
        for t in &self.tensors[1..] {
            // acc[O,I,w] W[w,o,i,w'] -> [(O o), (I i), w']
            let joined = contract(&acc, t, &[(2, 0)])?.permuted(&[0, 2, 1, 3, 4])?;
            let s = joined.shape().to_vec();
            acc = joined.reshaped(&[s[0] * s[1], s[2] * s[3], s[4]])?;
        }
        let s = acc.shape().to_vec();
        let flat = acc.reshaped(&[s[0], s[1]])?;
        flat.as_matrix(1).map_err(MpsError::from)
    }
}

fn validate_chain(tensors: &[DenseTensor], phys_dim: usize) -> Result<()> {
    if phys_dim == 0 {
        return Err(MpsError::Malformed("zero physical dimension".into()));
    }
    for (i, t) in tensors.iter().enumerate() {
        if t.ndim() != 3 {
            return Err(MpsError::Malformed(format!("site {i}: rank {} != 3", t.ndim())));
        }
        if t.shape()[1] != phys_dim {
            return Err(MpsError::Malformed(format!(
                "site {i}: physical dim {} != {phys_dim}",
                t.shape()[1]
            )));
        }
        if i == 0 && t.shape()[0] != 1 {
            return Err(MpsError::Malformed("left boundary bond != 1".into()));
        }
        if i + 1 == tensors.len() && t.shape()[2] != 1 {
            return Err(MpsError::Malformed("right boundary bond != 1".into()));
        }
        if i > 0 && tensors[i - 1].shape()[2] != t.shape()[0] {
            return Err(MpsError::Malformed(format!("bond mismatch at sites {}/{}", i - 1, i)));
        }
    }
    Ok(())
}

fn saturating_pow(base: usize, exp: usize) -> usize {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}

fn read_u64<R: IoRead>(r: &mut R) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn read_f64<R: IoRead>(r: &mut R) -> Result<f64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}
