//! Dense complex tensor core: shaped arrays, pairwise contraction, and
//! truncated singular-value factorization.
//!
//! Entries are stored in row-major order (last axis fastest), double-precision
//! complex throughout. Contractions are routed through BLAS by matricizing
//! both operands; factorizations go through LAPACK. All operations are pure:
//! a [`DenseTensor`] is immutable after construction and safe to share across
//! threads.

use ndarray::{Array1, Array2, ArrayD, IxDyn};
use ndarray_linalg::{JobSvd, SVDDC};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Singular values below `SIGMA_FLOOR * s_max` are always discarded,
/// independent of the policy cutoff, so canonicalization never divides by a
/// numerically-zero Schmidt coefficient.
pub const SIGMA_FLOOR: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum TensorError {
    #[error("axis {axis} out of range for rank-{rank} tensor")]
    AxisOutOfRange { axis: usize, rank: usize },
    #[error("contracted axes have mismatched extents: {left} vs {right}")]
    ExtentMismatch { left: usize, right: usize },
    #[error("duplicate axis {0} in axis specification")]
    DuplicateAxis(usize),
    #[error("shape {shape:?} incompatible with {len} entries")]
    ShapeMismatch { shape: Vec<usize>, len: usize },
    #[error("left axis set must be a nonempty proper subset of the tensor axes")]
    InvalidSplit,
    #[error("tensor contains non-finite entries")]
    NonFinite,
    #[error("factorization failed: {0}")]
    Factorization(String),
    #[error("truncation policy requires chi_max >= 1 and 0 <= cutoff < 1")]
    InvalidPolicy,
}

pub type Result<T> = std::result::Result<T, TensorError>;

/// Cap and relative discard threshold for truncated SVDs.
///
/// `cutoff` bounds the total *squared* singular-value weight that may be
/// discarded, relative to the squared Frobenius norm: the largest tail of the
/// spectrum whose cumulative squared weight stays at or below
/// `cutoff * sum(s_i^2)` is dropped, then `chi_max` caps whatever remains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationPolicy {
    pub chi_max: usize,
    pub cutoff: f64,
}

impl TruncationPolicy {
    pub fn new(chi_max: usize, cutoff: f64) -> Result<Self> {
        if chi_max < 1 || !(0.0..1.0).contains(&cutoff) {
            return Err(TensorError::InvalidPolicy);
        }
        Ok(Self { chi_max, cutoff })
    }

    /// No cap, no cutoff; only the [`SIGMA_FLOOR`] guard applies.
    pub fn exact() -> Self {
        Self { chi_max: usize::MAX, cutoff: 0.0 }
    }
}

impl Default for TruncationPolicy {
    /// Pipeline default used for channel application and Choi compression.
    fn default() -> Self {
        Self { chi_max: 128, cutoff: 1e-10 }
    }
}

/// Dense tensor of complex doubles with positive extents, row-major entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    data: ArrayD<C64>,
}

impl DenseTensor {
    pub fn zeros(shape: &[usize]) -> Self {
        Self { data: ArrayD::zeros(IxDyn(shape)) }
    }

    /// Build from row-major entries; checks length and finiteness.
    pub fn from_elements(shape: &[usize], entries: Vec<C64>) -> Result<Self> {
        let len: usize = shape.iter().product();
        if entries.len() != len {
            return Err(TensorError::ShapeMismatch { shape: shape.to_vec(), len: entries.len() });
        }
        let data = ArrayD::from_shape_vec(IxDyn(shape), entries)
            .map_err(|_| TensorError::ShapeMismatch { shape: shape.to_vec(), len })?;
        let t = Self { data };
        t.check_finite()?;
        Ok(t)
    }

    pub fn from_array(data: ArrayD<C64>) -> Result<Self> {
        let t = Self { data: to_standard(data) };
        t.check_finite()?;
        Ok(t)
    }

    pub fn from_matrix(m: Array2<C64>) -> Self {
        Self { data: to_standard(m.into_dyn()) }
    }

    /// n-by-n identity matrix as a rank-2 tensor.
    pub fn identity(n: usize) -> Self {
        Self::from_matrix(Array2::eye(n))
    }

    pub fn shape(&self) -> &[usize] {
        self.data.shape()
    }

    pub fn ndim(&self) -> usize {
        self.data.ndim()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn array(&self) -> &ArrayD<C64> {
        &self.data
    }

    pub fn into_array(self) -> ArrayD<C64> {
        self.data
    }

    /// Row-major entries as a flat slice.
    pub fn entries(&self) -> &[C64] {
        self.data.as_slice().expect("standard layout")
    }

    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let rank = self.ndim();
        if perm.len() != rank {
            return Err(TensorError::ShapeMismatch { shape: perm.to_vec(), len: rank });
        }
        let mut seen = vec![false; rank];
        for &p in perm {
            if p >= rank {
                return Err(TensorError::AxisOutOfRange { axis: p, rank });
            }
            if seen[p] {
                return Err(TensorError::DuplicateAxis(p));
            }
            seen[p] = true;
        }
        let view = self.data.view().permuted_axes(IxDyn(perm));
        Ok(Self { data: to_standard(view.to_owned()) })
    }

    pub fn reshaped(&self, shape: &[usize]) -> Result<Self> {
        let len: usize = shape.iter().product();
        if len != self.len() {
            return Err(TensorError::ShapeMismatch { shape: shape.to_vec(), len: self.len() });
        }
        let data = self
            .data
            .clone()
            .into_shape_with_order(IxDyn(shape))
            .map_err(|_| TensorError::ShapeMismatch { shape: shape.to_vec(), len })?;
        Ok(Self { data })
    }

    pub fn conjugate(&self) -> Self {
        Self { data: self.data.mapv(|z| z.conj()) }
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self { data: self.data.mapv(|z| z * factor) }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// View as a matrix by fusing the first `split` axes into rows.
    pub fn as_matrix(&self, split: usize) -> Result<Array2<C64>> {
        let rank = self.ndim();
        if split > rank {
            return Err(TensorError::AxisOutOfRange { axis: split, rank });
        }
        let m: usize = self.shape()[..split].iter().product();
        let n: usize = self.shape()[split..].iter().product();
        let v = self.entries().to_vec();
        Array2::from_shape_vec((m, n), v)
            .map_err(|_| TensorError::ShapeMismatch { shape: vec![m, n], len: self.len() })
    }

    fn check_finite(&self) -> Result<()> {
        if self.entries().iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(())
        } else {
            Err(TensorError::NonFinite)
        }
    }
}

fn to_standard(a: ArrayD<C64>) -> ArrayD<C64> {
    if a.is_standard_layout() {
        a
    } else {
        a.as_standard_layout().into_owned()
    }
}

fn standard_vec(a: ArrayD<C64>) -> Vec<C64> {
    let (v, offset) = to_standard(a).into_raw_vec_and_offset();
    debug_assert!(offset.unwrap_or(0) == 0);
    v
}

/// Contract `a` with `b` over the given `(axis of a, axis of b)` pairs.
///
/// Result axes are the unpaired axes of `a` in their original order, followed
/// by the unpaired axes of `b`. Implemented as permute + reshape + GEMM.
pub fn contract(a: &DenseTensor, b: &DenseTensor, pairs: &[(usize, usize)]) -> Result<DenseTensor> {
    let (ra, rb) = (a.ndim(), b.ndim());
    let mut a_paired = vec![false; ra];
    let mut b_paired = vec![false; rb];
    for &(ia, ib) in pairs {
        if ia >= ra {
            return Err(TensorError::AxisOutOfRange { axis: ia, rank: ra });
        }
        if ib >= rb {
            return Err(TensorError::AxisOutOfRange { axis: ib, rank: rb });
        }
        if a_paired[ia] {
            return Err(TensorError::DuplicateAxis(ia));
        }
        if b_paired[ib] {
            return Err(TensorError::DuplicateAxis(ib));
        }
        if a.shape()[ia] != b.shape()[ib] {
            return Err(TensorError::ExtentMismatch { left: a.shape()[ia], right: b.shape()[ib] });
        }
        a_paired[ia] = true;
        b_paired[ib] = true;
    }

    let a_free: Vec<usize> = (0..ra).filter(|&i| !a_paired[i]).collect();
    let b_free: Vec<usize> = (0..rb).filter(|&i| !b_paired[i]).collect();

    let mut perm_a = a_free.clone();
    perm_a.extend(pairs.iter().map(|&(ia, _)| ia));
    let mut perm_b: Vec<usize> = pairs.iter().map(|&(_, ib)| ib).collect();
    perm_b.extend(b_free.iter().copied());

    let m: usize = a_free.iter().map(|&i| a.shape()[i]).product();
    let k: usize = pairs.iter().map(|&(ia, _)| a.shape()[ia]).product();
    let n: usize = b_free.iter().map(|&i| b.shape()[i]).product();

    let a_mat = {
        let v = standard_vec(a.data.view().permuted_axes(IxDyn(&perm_a)).to_owned());
        Array2::from_shape_vec((m, k), v).expect("permuted reshape")
    };
    let b_mat = {
        let v = standard_vec(b.data.view().permuted_axes(IxDyn(&perm_b)).to_owned());
        Array2::from_shape_vec((k, n), v).expect("permuted reshape")
    };

    let c = a_mat.dot(&b_mat);

    let mut out_shape: Vec<usize> = a_free.iter().map(|&i| a.shape()[i]).collect();
    out_shape.extend(b_free.iter().map(|&i| b.shape()[i]));
    let data = ArrayD::from_shape_vec(IxDyn(&out_shape), standard_vec(c.into_dyn()))
        .expect("contract output shape");
    let t = DenseTensor { data };
    t.check_finite()?;
    Ok(t)
}

/// Result of a truncated splitting SVD: `t ≈ u · diag(s) · vt` after
/// matricizing over the chosen axis bipartition.
#[derive(Debug, Clone)]
pub struct SvdSplit {
    /// Left factor with orthonormal columns; shape = left extents + `[k]`.
    pub u: DenseTensor,
    /// Kept singular values, nonincreasing.
    pub singular_values: Vec<f64>,
    /// Right factor with orthonormal rows; shape = `[k]` + right extents.
    pub vt: DenseTensor,
    /// Relative discarded squared singular-value weight, in `[0, 1]`.
    pub discarded_weight: f64,
}

/// Truncated SVD of `t` matricized with `left_axes` as rows (in the given
/// order) and the remaining axes, in original order, as columns.
pub fn svd_split(t: &DenseTensor, left_axes: &[usize], policy: &TruncationPolicy) -> Result<SvdSplit> {
    if policy.chi_max < 1 || !(0.0..1.0).contains(&policy.cutoff) {
        return Err(TensorError::InvalidPolicy);
    }
    let rank = t.ndim();
    if left_axes.is_empty() || left_axes.len() >= rank {
        return Err(TensorError::InvalidSplit);
    }
    let mut is_left = vec![false; rank];
    for &ax in left_axes {
        if ax >= rank {
            return Err(TensorError::AxisOutOfRange { axis: ax, rank });
        }
        if is_left[ax] {
            return Err(TensorError::DuplicateAxis(ax));
        }
        is_left[ax] = true;
    }
    t.check_finite()?;

    let right_axes: Vec<usize> = (0..rank).filter(|&i| !is_left[i]).collect();
    let mut perm = left_axes.to_vec();
    perm.extend(right_axes.iter().copied());

    let left_shape: Vec<usize> = left_axes.iter().map(|&i| t.shape()[i]).collect();
    let right_shape: Vec<usize> = right_axes.iter().map(|&i| t.shape()[i]).collect();
    let m: usize = left_shape.iter().product();
    let n: usize = right_shape.iter().product();

    let mat = {
        let v = standard_vec(t.data.view().permuted_axes(IxDyn(&perm)).to_owned());
        Array2::from_shape_vec((m, n), v).expect("matricize")
    };

    let (u, s, vt) = mat
        .svddc(JobSvd::Some)
        .map_err(|e| TensorError::Factorization(e.to_string()))?;
    let u = u.ok_or_else(|| TensorError::Factorization("missing U".into()))?;
    let vt = vt.ok_or_else(|| TensorError::Factorization("missing VT".into()))?;

    let (keep, discarded_weight) = truncation_rank(s.as_slice().unwrap(), policy);

    let u_kept = u.slice(ndarray::s![.., ..keep]).to_owned();
    let vt_kept = vt.slice(ndarray::s![..keep, ..]).to_owned();
    let s_kept: Vec<f64> = s.iter().take(keep).copied().collect();

    let mut u_shape = left_shape;
    u_shape.push(keep);
    let mut vt_shape = vec![keep];
    vt_shape.extend(right_shape);

    let u_t = DenseTensor::from_array(u_kept.into_dyn())?.reshaped(&u_shape)?;
    let vt_t = DenseTensor::from_array(vt_kept.into_dyn())?.reshaped(&vt_shape)?;

    Ok(SvdSplit { u: u_t, singular_values: s_kept, vt: vt_t, discarded_weight })
}

/// How many leading singular values survive the floor, the relative squared
/// cutoff, and the `chi_max` cap; plus the relative discarded squared weight.
pub fn truncation_rank(s: &[f64], policy: &TruncationPolicy) -> (usize, f64) {
    if s.is_empty() {
        return (0, 0.0);
    }
    let total: f64 = s.iter().map(|x| x * x).sum();
    if total <= 0.0 {
        return (1.min(s.len()), 0.0);
    }
    let floor = SIGMA_FLOOR * s[0];
    let above_floor = s.iter().take_while(|&&x| x > floor).count().max(1);

    // Largest tail whose cumulative squared weight stays within the cutoff,
    // accumulated smallest-first.
    let mut tail = 0.0;
    let mut keep_cutoff = s.len();
    for (i, &x) in s.iter().enumerate().rev() {
        if tail + x * x <= policy.cutoff * total && i > 0 {
            tail += x * x;
            keep_cutoff = i;
        } else {
            break;
        }
    }

    let keep = above_floor.min(keep_cutoff).min(policy.chi_max).max(1);
    let kept: f64 = s.iter().take(keep).map(|x| x * x).sum();
    let discarded = ((total - kept) / total).max(0.0);
    (keep, discarded)
}

/// Fold singular values into the left factor: returns `u · diag(s)`.
pub fn scale_columns(u: &DenseTensor, s: &[f64]) -> Result<DenseTensor> {
    let rank = u.ndim();
    let k = *u.shape().last().expect("nonempty shape");
    if s.len() != k {
        return Err(TensorError::ShapeMismatch { shape: vec![s.len()], len: k });
    }
    let mut data = u.array().clone();
    for (j, &sv) in s.iter().enumerate() {
        data.index_axis_mut(ndarray::Axis(rank - 1), j).mapv_inplace(|z| z * sv);
    }
    Ok(DenseTensor { data })
}

/// Fold singular values into the right factor: returns `diag(s) · vt`.
pub fn scale_rows(vt: &DenseTensor, s: &[f64]) -> Result<DenseTensor> {
    let k = u_first_extent(vt);
    if s.len() != k {
        return Err(TensorError::ShapeMismatch { shape: vec![s.len()], len: k });
    }
    let mut data = vt.array().clone();
    for (i, &sv) in s.iter().enumerate() {
        data.index_axis_mut(ndarray::Axis(0), i).mapv_inplace(|z| z * sv);
    }
    Ok(DenseTensor { data })
}

fn u_first_extent(t: &DenseTensor) -> usize {
    t.shape().first().copied().unwrap_or(0)
}

/// Vector of kept singular values as an `Array1`, for diagnostics.
pub fn singular_array(s: &[f64]) -> Array1<f64> {
    Array1::from_vec(s.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{Dimension, IxDyn};
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_tensor(shape: &[usize], rng: &mut ChaCha8Rng) -> DenseTensor {
        let len: usize = shape.iter().product();
        let entries: Vec<C64> = (0..len)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        DenseTensor::from_elements(shape, entries).unwrap()
    }

    /// Naive index-loop contraction used as the independent reference.
    fn contract_reference(
        a: &DenseTensor,
        b: &DenseTensor,
        pairs: &[(usize, usize)],
    ) -> DenseTensor {
        let ra = a.ndim();
        let rb = b.ndim();
        let a_paired: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        let b_paired: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        let a_free: Vec<usize> = (0..ra).filter(|i| !a_paired.contains(i)).collect();
        let b_free: Vec<usize> = (0..rb).filter(|i| !b_paired.contains(i)).collect();
        let out_shape: Vec<usize> = a_free
            .iter()
            .map(|&i| a.shape()[i])
            .chain(b_free.iter().map(|&i| b.shape()[i]))
            .collect();
        let mut out = ArrayD::<C64>::zeros(IxDyn(&out_shape));
        let contracted: Vec<usize> = a_paired.iter().map(|&i| a.shape()[i]).collect();
        let n_sum: usize = contracted.iter().product();
        for (out_idx, slot) in out.indexed_iter_mut() {
            let out_idx = out_idx.slice();
            let mut acc = C64::new(0.0, 0.0);
            for flat in 0..n_sum {
                let mut rem = flat;
                let mut sum_idx = vec![0usize; contracted.len()];
                for (pos, &ext) in contracted.iter().enumerate().rev() {
                    sum_idx[pos] = rem % ext;
                    rem /= ext;
                }
                let mut ia = vec![0usize; ra];
                for (pos, &ax) in a_free.iter().enumerate() {
                    ia[ax] = out_idx[pos];
                }
                for (pos, &ax) in a_paired.iter().enumerate() {
                    ia[ax] = sum_idx[pos];
                }
                let mut ib = vec![0usize; rb];
                for (pos, &ax) in b_free.iter().enumerate() {
                    ib[ax] = out_idx[a_free.len() + pos];
                }
                for (pos, &ax) in b_paired.iter().enumerate() {
                    ib[ax] = sum_idx[pos];
                }
                acc += a.array()[IxDyn(&ia)] * b.array()[IxDyn(&ib)];
            }
            *slot = acc;
        }
        DenseTensor::from_array(out).unwrap()
    }

    fn max_entry_diff(a: &DenseTensor, b: &DenseTensor) -> f64 {
        assert_eq!(a.shape(), b.shape());
        a.entries()
            .iter()
            .zip(b.entries())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn identity_contract_returns_vector() {
        let eye = DenseTensor::identity(2);
        let v = DenseTensor::from_elements(&[2], vec![C64::new(0.3, 0.1), C64::new(-0.7, 0.4)])
            .unwrap();
        let out = contract(&eye, &v, &[(1, 0)]).unwrap();
        assert_eq!(out.shape(), &[2]);
        assert!(max_entry_diff(&out, &v) < 1e-15);
    }

    #[test]
    fn contract_reduces_to_matrix_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_tensor(&[2, 3], &mut rng);
        let b = random_tensor(&[3, 4], &mut rng);
        let c = contract(&a, &b, &[(1, 0)]).unwrap();
        assert_eq!(c.shape(), &[2, 4]);
        let am = a.as_matrix(1).unwrap();
        let bm = b.as_matrix(1).unwrap();
        let cm = am.dot(&bm);
        let expect = DenseTensor::from_matrix(cm);
        assert!(max_entry_diff(&c, &expect) < 1e-12);
    }

    #[test]
    fn contract_matches_loop_reference_on_two_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_tensor(&[4, 4, 4], &mut rng);
        let b = random_tensor(&[4, 4, 4], &mut rng);
        let got = contract(&a, &b, &[(0, 2), (2, 0)]).unwrap();
        let expect = contract_reference(&a, &b, &[(0, 2), (2, 0)]);
        assert!(max_entry_diff(&got, &expect) < 1e-12);
    }

    #[test]
    fn contract_is_bilinear() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_tensor(&[3, 2, 4], &mut rng);
        let b = random_tensor(&[4, 3], &mut rng);
        let alpha = C64::new(0.37, -1.2);
        let lhs = contract(&a.scaled(alpha), &b, &[(2, 0)]).unwrap();
        let rhs = contract(&a, &b, &[(2, 0)]).unwrap().scaled(alpha);
        assert!(max_entry_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn contract_rejects_extent_mismatch() {
        let a = DenseTensor::zeros(&[2, 3]);
        let b = DenseTensor::zeros(&[4, 2]);
        assert!(matches!(
            contract(&a, &b, &[(1, 0)]),
            Err(TensorError::ExtentMismatch { .. })
        ));
        assert!(matches!(
            contract(&a, &b, &[(5, 0)]),
            Err(TensorError::AxisOutOfRange { .. })
        ));
    }

    #[test]
    fn svd_of_rank_one_keeps_single_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = random_tensor(&[4], &mut rng);
        let v = random_tensor(&[4], &mut rng);
        let mut entries = Vec::with_capacity(16);
        for i in 0..4 {
            for j in 0..4 {
                entries.push(u.entries()[i] * v.entries()[j]);
            }
        }
        let t = DenseTensor::from_elements(&[4, 4], entries).unwrap();
        let policy = TruncationPolicy::new(8, 0.0).unwrap();
        let split = svd_split(&t, &[0], &policy).unwrap();
        assert_eq!(split.singular_values.len(), 1);
        assert!(split.discarded_weight < 1e-28);
    }

    #[test]
    fn svd_truncation_reports_discarded_weight() {
        let t = DenseTensor::from_elements(
            &[2, 2],
            vec![C64::new(3.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        )
        .unwrap();
        let policy = TruncationPolicy::new(1, 0.0).unwrap();
        let split = svd_split(&t, &[0], &policy).unwrap();
        assert_eq!(split.singular_values.len(), 1);
        assert!((split.singular_values[0] - 3.0).abs() < 1e-12);
        assert!((split.discarded_weight - 0.1).abs() < 1e-12);
    }

    #[test]
    fn svd_reconstructs_random_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = random_tensor(&[8, 8], &mut rng);
        let policy = TruncationPolicy::new(8, 0.0).unwrap();
        let split = svd_split(&t, &[0], &policy).unwrap();
        let us = scale_columns(&split.u, &split.singular_values).unwrap();
        let rebuilt = contract(&us, &split.vt, &[(1, 0)]).unwrap();
        assert!(max_entry_diff(&rebuilt, &t) < 1e-10);
    }

    #[test]
    fn svd_weight_accounting_matches_frobenius_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let t = random_tensor(&[4, 3, 5], &mut rng);
        let policy = TruncationPolicy::new(3, 0.0).unwrap();
        let split = svd_split(&t, &[0, 1], &policy).unwrap();
        let total = t.frobenius_norm().powi(2);
        let kept: f64 = split.singular_values.iter().map(|s| s * s).sum();
        let rel = (kept + split.discarded_weight * total - total).abs() / total;
        assert!(rel < 1e-10, "relative mismatch {rel}");
    }

    #[test]
    fn svd_rejects_bad_split() {
        let t = DenseTensor::zeros(&[2, 2]);
        let policy = TruncationPolicy::exact();
        assert!(matches!(svd_split(&t, &[], &policy), Err(TensorError::InvalidSplit)));
        assert!(matches!(svd_split(&t, &[0, 1], &policy), Err(TensorError::InvalidSplit)));
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let bad = DenseTensor::from_elements(&[2], vec![C64::new(f64::NAN, 0.0), C64::new(1.0, 0.0)]);
        assert!(matches!(bad, Err(TensorError::NonFinite)));
    }
}
