//! Doubled-Hilbert-space (Choi) representation of mixed states.
//!
//! A density matrix on L qubits becomes a vector `|rho>>` on L four-level
//! sites: local basis index `2u + l` pairs the ket copy `u` with the bra copy
//! `l`, and component `(u, l)` of site tensors holds `<l|rho|u>` so that
//! `<<A|B>> = Tr[A^dag B]` exactly. The operator convention is unnormalized
//! (no `1/sqrt(dim)` prefactor): a normalized pure state vectorizes to a
//! doubled vector with unit trace and unit norm.
//!
//! Channels `rho -> sum_a K_a rho K_a^dag` act as `sum_a conj(K_a)_u (x)
//! (K_a)_l`, single-site or two-site operators here since every channel is a
//! probabilistic Pauli channel with real Kraus operators. The maximal
//! depolarizer is the rank-1 projector onto the local identity direction;
//! applying it to a site replaces that site's factor by the maximally mixed
//! state, which is how subsystem purities (and from them Renyi entropies) are
//! extracted downstream.
//!
//! Vectorizing a bond-chi pure state naively squares the bond dimension. We
//! instead exploit that the doubled state's Schmidt coefficients at a bond are
//! the pairwise products of the pure state's, so the doubled MPS is assembled
//! directly in truncated form: per bond, the largest Schmidt-coefficient
//! products are kept under the usual truncation policy and the site tensor is
//! built only on the selected index pairs.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dmrg::{compile_terms_mpo, DmrgError, OperatorTerm};
use crate::mps::{MatrixProductState, MpsError};
use crate::tensor::{truncation_rank, DenseTensor, TensorError, TruncationPolicy};

#[derive(Debug, Error)]
pub enum ChoiError {
    #[error(transparent)]
    Mps(#[from] MpsError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Mpo(#[from] DmrgError),
    #[error("channel strength {0} outside [0, 1/2]")]
    InvalidStrength(f64),
    #[error("expected physical dimension {want}, got {got}")]
    PhysDim { got: usize, want: usize },
    #[error("site {site} out of range for chain of length {len}")]
    SiteOutOfRange { site: usize, len: usize },
    #[error("chain too short for channel: {0}")]
    ChainTooShort(String),
    #[error("state trace is numerically zero or negative: {0}")]
    BadTrace(f64),
}

pub type Result<T> = std::result::Result<T, ChoiError>;

/// Decoherence channel family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    /// Z dephasing on every odd site index.
    OddZ,
    /// ZZ dephasing on every bond, including the periodic wrap bond.
    PairZz,
    /// X dephasing on every site.
    SingleX,
}

/// A channel pick with its strength `p in [0, 1/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub p: f64,
}

impl ChannelSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=0.5).contains(&self.p) {
            return Err(ChoiError::InvalidStrength(self.p));
        }
        Ok(())
    }
}

/// Truncation bookkeeping for one channel layer.
#[derive(Debug, Clone, Copy, Default)]
pub struct ChannelReport {
    /// Largest single-bond relative discarded weight in the layer.
    pub max_discarded_weight: f64,
    /// `|trace - previous trace|` before renormalization.
    pub trace_drift: f64,
}

/// A doubled-space MPS with physical dimension 4 and the `2u + l` index
/// convention. The trace is kept at 1 by shifting `log_scale` after each
/// channel layer.
#[derive(Debug, Clone)]
pub struct ChoiState {
    state: MatrixProductState,
}

impl ChoiState {
    pub fn from_state(state: MatrixProductState) -> Result<Self> {
        if state.phys_dim() != 4 {
            return Err(ChoiError::PhysDim { got: state.phys_dim(), want: 4 });
        }
        Ok(Self { state })
    }

    pub fn state(&self) -> &MatrixProductState {
        &self.state
    }

    pub fn into_state(self) -> MatrixProductState {
        self.state
    }

    pub fn len(&self) -> usize {
        self.state.len()
    }

    pub fn is_empty(&self) -> bool {
        self.state.is_empty()
    }

    pub fn max_bond_dim(&self) -> usize {
        self.state.max_bond_dim()
    }

    /// `Tr rho`, the overlap with the identity operator, in linear scale.
    pub fn trace_of(&self) -> Result<f64> {
        let eye = identity_choi(self.len())?;
        let ip = eye.state.inner_product(&self.state)?;
        Ok(ip.value().re)
    }

    /// `Tr[(rho / Tr rho)^2]`, evaluated in log scale.
    pub fn purity(&self) -> Result<f64> {
        let norm2 = self.state.inner_product(&self.state)?;
        let eye = identity_choi(self.len())?;
        let tr = eye.state.inner_product(&self.state)?;
        if tr.log_magnitude == f64::NEG_INFINITY || tr.phase.re <= 0.0 {
            return Err(ChoiError::BadTrace(tr.value().re));
        }
        Ok((norm2.log_magnitude - 2.0 * tr.log_magnitude).exp())
    }

    /// Apply one full layer of the channel, truncate, and renormalize the
    /// trace back to 1 (the shift is folded into `log_scale`).
    pub fn apply_channel(
        &self,
        spec: &ChannelSpec,
        policy: &TruncationPolicy,
    ) -> Result<(Self, ChannelReport)> {
        spec.validate()?;
        let len = self.len();
        let trace_before = self.trace_of()?;
        let mut st = self.state.clone();
        let mut max_dw = 0.0f64;
        match spec.kind {
            ChannelKind::OddZ => {
                let op = dephasing_z_matrix(spec.p);
                let mut site = 1;
                while site < len {
                    st.apply_site_operator_mut(site, &op)?;
                    site += 2;
                }
            }
            ChannelKind::SingleX => {
                let op = dephasing_x_matrix(spec.p);
                for site in 0..len {
                    st.apply_site_operator_mut(site, &op)?;
                }
            }
            ChannelKind::PairZz => {
                if len < 3 {
                    return Err(ChoiError::ChainTooShort(
                        "pair channel with wrap bond needs length >= 3".into(),
                    ));
                }
                // Wrap bond first, while the bond dimension is smallest.
                let zz = zz_doubled_matrix();
                let eye4: Array2<C64> = Array2::eye(4);
                let wrap_terms = vec![
                    OperatorTerm::new(1.0 - spec.p, vec![(0, eye4)]),
                    OperatorTerm::new(spec.p, vec![(0, zz.clone()), (len - 1, zz.clone())]),
                ];
                let wrap = compile_terms_mpo(len, 4, &wrap_terms)?;
                let dw = st.apply_mpo_mut(&wrap, policy)?;
                max_dw = max_dw.max(dw);
                let gate = pair_zz_gate_matrix(spec.p);
                for j in 0..len - 1 {
                    let dw = st.apply_two_site_gate_mut(j, &gate, policy)?;
                    max_dw = max_dw.max(dw);
                }
            }
        }
        let (_, compress_max) = st.compress_mut_stats(policy)?;
        max_dw = max_dw.max(compress_max);

        let mut out = Self { state: st };
        let trace_after = out.renormalize_trace()?;
        Ok((
            out,
            ChannelReport {
                max_discarded_weight: max_dw,
                trace_drift: (trace_after - trace_before).abs(),
            },
        ))
    }

    /// Project the listed sites onto the local identity direction (maximal
    /// depolarizer); bond dimensions never increase.
    pub fn apply_depolarizer(&self, sites: &[usize]) -> Result<Self> {
        let len = self.len();
        let op = depolarizer_matrix();
        let mut st = self.state.clone();
        for &site in sites {
            if site >= len {
                return Err(ChoiError::SiteOutOfRange { site, len });
            }
            st.apply_site_operator_mut(site, &op)?;
        }
        Ok(Self { state: st })
    }

    /// Shift `log_scale` so the trace becomes exactly 1; returns the trace
    /// found beforehand.
    pub fn renormalize_trace(&mut self) -> Result<f64> {
        let eye = identity_choi(self.len())?;
        let ip = eye.state.inner_product(&self.state)?;
        let trace = ip.value().re;
        if ip.log_magnitude == f64::NEG_INFINITY || ip.phase.re <= 0.0 {
            return Err(ChoiError::BadTrace(trace));
        }
        self.state.shift_log_scale(-ip.log_magnitude - ip.phase.re.ln());
        Ok(trace)
    }

    /// Dense density matrix (`2^L x 2^L`), for small-system cross-checks.
    pub fn to_density_matrix(&self) -> Result<Array2<C64>> {
        let len = self.len();
        let dim = 1usize << len;
        let vec = self.state.to_dense()?;
        let mut rho = Array2::<C64>::zeros((dim, dim));
        for m in 0..dim {
            for k in 0..dim {
                // Component (u, l) per site holds <l|rho|u>: u bits from k,
                // l bits from m, fused as 2u + l, site 0 slowest.
                let mut flat = 0usize;
                for site in 0..len {
                    let shift = len - 1 - site;
                    let u = (k >> shift) & 1;
                    let l = (m >> shift) & 1;
                    flat = flat * 4 + 2 * u + l;
                }
                rho[(m, k)] = vec[flat];
            }
        }
        Ok(rho)
    }
}

/// Vectorize a normalized pure state into the doubled space under the
/// unnormalized operator convention, truncating doubled bonds per `policy`.
pub fn vectorize_pure(psi: &MatrixProductState, policy: &TruncationPolicy) -> Result<ChoiState> {
    if psi.phys_dim() != 2 {
        return Err(ChoiError::PhysDim { got: psi.phys_dim(), want: 2 });
    }
    let (tensors, schmidt) = psi.right_schmidt_form()?;
    let len = tensors.len();

    // Kept Schmidt-index pairs per bond, ranked by coefficient product. The
    // doubled state's Schmidt spectrum at a bond is exactly these products.
    let mut kept_pairs: Vec<Vec<(usize, usize)>> = Vec::with_capacity(schmidt.len());
    for lams in &schmidt {
        let mut prods: Vec<(f64, usize, usize)> = Vec::with_capacity(lams.len() * lams.len());
        for (i, &li) in lams.iter().enumerate() {
            for (j, &lj) in lams.iter().enumerate() {
                prods.push((li * lj, i, j));
            }
        }
        prods.sort_by(|a, b| {
            b.0.partial_cmp(&a.0)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.1.cmp(&b.1))
                .then(a.2.cmp(&b.2))
        });
        let sigma: Vec<f64> = prods.iter().map(|p| p.0).collect();
        let (mut keep, _) = truncation_rank(&sigma, policy);
        // Extend through exact ties: products come in bit-identical
        // (i, j)/(j, i) twins, and splitting a twin pair would leave the
        // represented operator non-Hermitian.
        while keep < sigma.len() && sigma[keep] == sigma[keep - 1] {
            keep += 1;
        }
        let mut kept: Vec<(usize, usize)> = prods[..keep].iter().map(|p| (p.1, p.2)).collect();
        // Always keep the diagonal pairs: (a, a) carries trace weight
        // lambda_a^2, much larger than its norm weight lambda_a^4, and with
        // every diagonal present the trace of the vectorized operator is
        // exact at any cap.
        for a in 0..lams.len() {
            if !kept.contains(&(a, a)) {
                kept.push((a, a));
            }
        }
        kept_pairs.push(kept);
    }

    let boundary = [(0usize, 0usize)];
    let mut doubled = Vec::with_capacity(len);
    for (site, b) in tensors.iter().enumerate() {
        let left: &[(usize, usize)] = if site == 0 { &boundary } else { &kept_pairs[site - 1] };
        let right: &[(usize, usize)] =
            if site + 1 == len { &boundary } else { &kept_pairs[site] };
        let arr = b.array();
        let mut entries = Vec::with_capacity(left.len() * 4 * right.len());
        for &(au, al) in left {
            for u in 0..2usize {
                for l in 0..2usize {
                    for &(bu, bl) in right {
                        entries.push(arr[[au, u, bu]].conj() * arr[[al, l, bl]]);
                    }
                }
            }
        }
        doubled.push(DenseTensor::from_elements(&[left.len(), 4, right.len()], entries)?);
    }
    let state = MatrixProductState::new(doubled, 0.0)?;
    Ok(ChoiState { state })
}

/// The identity operator as a doubled product state: local vector
/// `(1, 0, 0, 1)` under the `2u + l` convention.
pub fn identity_choi(len: usize) -> Result<ChoiState> {
    let local = vec![
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(1.0, 0.0),
    ];
    let state = MatrixProductState::product_state(4, &vec![local; len])?;
    Ok(ChoiState { state })
}

/// Maximal depolarizer `(1/4)(II + XX - YY + ZZ)` on the doubled local space:
/// the orthogonal projector onto the identity direction `(1,0,0,1)/sqrt(2)`.
pub fn depolarizer_matrix() -> Array2<C64> {
    let mut d = Array2::<C64>::zeros((4, 4));
    let half = C64::new(0.5, 0.0);
    d[(0, 0)] = half;
    d[(0, 3)] = half;
    d[(3, 0)] = half;
    d[(3, 3)] = half;
    d
}

/// Doubled single-site Z dephasing `(1-p) I (x) I + p Z (x) Z`.
pub fn dephasing_z_matrix(p: f64) -> Array2<C64> {
    let mut d = Array2::<C64>::zeros((4, 4));
    d[(0, 0)] = C64::new(1.0, 0.0);
    d[(1, 1)] = C64::new(1.0 - 2.0 * p, 0.0);
    d[(2, 2)] = C64::new(1.0 - 2.0 * p, 0.0);
    d[(3, 3)] = C64::new(1.0, 0.0);
    d
}

/// Doubled single-site X dephasing `(1-p) I (x) I + p X (x) X`.
pub fn dephasing_x_matrix(p: f64) -> Array2<C64> {
    let mut d = Array2::<C64>::zeros((4, 4));
    for i in 0..4 {
        d[(i, i)] = C64::new(1.0 - p, 0.0);
        d[(i, 3 - i)] += C64::new(p, 0.0);
    }
    d
}

/// `Z (x) Z` on one doubled site (ket and bra copies together).
pub fn zz_doubled_matrix() -> Array2<C64> {
    let mut d = Array2::<C64>::zeros((4, 4));
    d[(0, 0)] = C64::new(1.0, 0.0);
    d[(1, 1)] = C64::new(-1.0, 0.0);
    d[(2, 2)] = C64::new(-1.0, 0.0);
    d[(3, 3)] = C64::new(1.0, 0.0);
    d
}

/// Two-site doubled gate `(1-p) I + p (ZZ)_u (x) (ZZ)_l`, diagonal in the
/// doubled basis; rows fuse the two site indices row-major.
pub fn pair_zz_gate_matrix(p: f64) -> Array2<C64> {
    let zz = [1.0, -1.0, -1.0, 1.0];
    let mut g = Array2::<C64>::zeros((16, 16));
    for a in 0..4 {
        for b in 0..4 {
            let idx = a * 4 + b;
            g[(idx, idx)] = C64::new((1.0 - p) + p * zz[a] * zz[b], 0.0);
        }
    }
    g
}
