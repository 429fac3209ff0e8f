//! Stabilizer-formalism oracle for second Renyi entropies and CMI.
//!
//! A stabilizer group is stored as bit-packed Pauli strings (sign dropped:
//! entropies only see supports) with commutation and GF(2) independence
//! checked on construction. The subsystem entropy of region `X` is
//! `(|X| - s_X) ln 2`, where `s_X` counts the independent group elements
//! supported entirely inside `X`; `s_X` is the kernel dimension of the
//! generator matrix restricted to the complement columns, computed by
//! bit-packed Gaussian elimination rather than enumeration.
//!
//! The CMI combines four such entropies with the integer arithmetic done
//! first and a single multiplication by ln 2 at the end, so stabilizer CMI
//! values are exact multiples of `LN_2`. The prototypical strong-to-weak
//! symmetry-broken state, stabilized by the single global string `prod_j
//! X_j`, yields exactly `ln 2` for every valid tripartition this way.

use std::f64::consts::LN_2;
use thiserror::Error;

use crate::renyi::Tripartition;

#[derive(Debug, Error)]
pub enum StabilizerError {
    #[error("pauli string length {got} does not match group size {want}")]
    LengthMismatch { got: usize, want: usize },
    #[error("generators {0} and {1} anticommute")]
    NonCommuting(usize, usize),
    #[error("generators are dependent over GF(2)")]
    DependentGenerators,
    #[error("too many generators: {k} on {n} qubits")]
    TooManyGenerators { k: usize, n: usize },
    #[error("need at least {want} qubits, got {got}")]
    TooShort { got: usize, want: usize },
    #[error("site {site} out of range for {len} qubits")]
    SiteOutOfRange { site: usize, len: usize },
    #[error("site {0} listed twice")]
    DuplicateSite(usize),
}

pub type Result<T> = std::result::Result<T, StabilizerError>;

const WORD: usize = 64;

fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

/// A Pauli string on `n` qubits as X/Z bit vectors; the overall sign is not
/// tracked (it cancels from every entropy).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliString {
    n: usize,
    x_bits: Vec<u64>,
    z_bits: Vec<u64>,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self { n, x_bits: vec![0; words_for(n)], z_bits: vec![0; words_for(n)] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_bit(&self, site: usize) -> bool {
        self.x_bits[site / WORD] >> (site % WORD) & 1 == 1
    }

    pub fn z_bit(&self, site: usize) -> bool {
        self.z_bits[site / WORD] >> (site % WORD) & 1 == 1
    }

    pub fn flip_x(&mut self, site: usize) {
        self.x_bits[site / WORD] ^= 1 << (site % WORD);
    }

    pub fn flip_z(&mut self, site: usize) {
        self.z_bits[site / WORD] ^= 1 << (site % WORD);
    }

    /// Single-site constructors.
    pub fn x(n: usize, site: usize) -> Self {
        let mut p = Self::identity(n);
        p.flip_x(site);
        p
    }

    pub fn z(n: usize, site: usize) -> Self {
        let mut p = Self::identity(n);
        p.flip_z(site);
        p
    }

    pub fn y(n: usize, site: usize) -> Self {
        let mut p = Self::identity(n);
        p.flip_x(site);
        p.flip_z(site);
        p
    }

    /// Product up to sign: bitwise XOR of both components.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, b) in out.x_bits.iter_mut().zip(&other.x_bits) {
            *a ^= b;
        }
        for (a, b) in out.z_bits.iter_mut().zip(&other.z_bits) {
            *a ^= b;
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.x_bits.iter().all(|&w| w == 0) && self.z_bits.iter().all(|&w| w == 0)
    }

    /// Symplectic inner product parity: 0 means commuting.
    pub fn commutes(&self, other: &Self) -> bool {
        let mut parity = 0u32;
        for i in 0..self.x_bits.len() {
            parity ^= (self.x_bits[i] & other.z_bits[i]).count_ones() & 1;
            parity ^= (self.z_bits[i] & other.x_bits[i]).count_ones() & 1;
        }
        parity == 0
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&s| self.x_bit(s) || self.z_bit(s)).collect()
    }

    /// True when every supported site is marked in `mask`.
    pub fn supported_on(&self, mask: &[bool]) -> bool {
        (0..self.n).all(|s| mask[s] || (!self.x_bit(s) && !self.z_bit(s)))
    }
}

/// `k` independent, mutually commuting Pauli strings on `n` qubits.
#[derive(Debug, Clone)]
pub struct StabilizerGroup {
    n: usize,
    generators: Vec<PauliString>,
}

impl StabilizerGroup {
    pub fn new(n: usize, generators: Vec<PauliString>) -> Result<Self> {
        for g in &generators {
            if g.n() != n {
                return Err(StabilizerError::LengthMismatch { got: g.n(), want: n });
            }
        }
        if generators.len() > n {
            return Err(StabilizerError::TooManyGenerators { k: generators.len(), n });
        }
        for i in 0..generators.len() {
            for j in i + 1..generators.len() {
                if !generators[i].commutes(&generators[j]) {
                    return Err(StabilizerError::NonCommuting(i, j));
                }
            }
        }
        let rows: Vec<Vec<u64>> =
            generators.iter().map(|g| symplectic_row(g, &vec![true; n])).collect();
        if gf2_rank(rows, 2 * n) != generators.len() {
            return Err(StabilizerError::DependentGenerators);
        }
        Ok(Self { n, generators })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }
}

/// Bit row of the generator restricted to the sites marked in `mask`:
/// X bits first, then Z bits, in ascending site order.
fn symplectic_row(g: &PauliString, mask: &[bool]) -> Vec<u64> {
    let m = mask.iter().filter(|&&b| b).count();
    let mut row = vec![0u64; words_for(2 * m)];
    let mut col = 0usize;
    for site in 0..g.n() {
        if !mask[site] {
            continue;
        }
        if g.x_bit(site) {
            row[col / WORD] |= 1 << (col % WORD);
        }
        if g.z_bit(site) {
            row[(col + m) / WORD] |= 1 << ((col + m) % WORD);
        }
        col += 1;
    }
    row
}

/// GF(2) rank by Gaussian elimination with lowest-column pivoting.
fn gf2_rank(mut rows: Vec<Vec<u64>>, width: usize) -> usize {
    let mut rank = 0usize;
    for col in 0..width {
        let word = col / WORD;
        let bit = col % WORD;
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][word] >> bit & 1 == 1) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[word] >> bit & 1 == 1 {
                for (a, b) in row.iter_mut().zip(&pivot_row) {
                    *a ^= b;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

fn site_mask(len: usize, x: &[usize]) -> Result<Vec<bool>> {
    let mut mask = vec![false; len];
    for &site in x {
        if site >= len {
            return Err(StabilizerError::SiteOutOfRange { site, len });
        }
        if mask[site] {
            return Err(StabilizerError::DuplicateSite(site));
        }
        mask[site] = true;
    }
    Ok(mask)
}

/// `s_X`: the number of independent group elements supported entirely inside
/// `X`, as the kernel dimension of the generator matrix restricted to the
/// complement columns.
pub fn restricted_subgroup_dimension(group: &StabilizerGroup, x: &[usize]) -> Result<usize> {
    let mask = site_mask(group.n(), x)?;
    let complement: Vec<bool> = mask.iter().map(|&b| !b).collect();
    let m = complement.iter().filter(|&&b| b).count();
    let rows: Vec<Vec<u64>> =
        group.generators().iter().map(|g| symplectic_row(g, &complement)).collect();
    Ok(group.k() - gf2_rank(rows, 2 * m))
}

/// `S2_X = (|X| - s_X) ln 2`; always nonnegative.
pub fn stabilizer_renyi_entropy(group: &StabilizerGroup, x: &[usize]) -> Result<f64> {
    Ok(entropy_count(group, x)? as f64 * LN_2)
}

/// Integer entropy coefficient `|X| - s_X`.
fn entropy_count(group: &StabilizerGroup, x: &[usize]) -> Result<i64> {
    let s_x = restricted_subgroup_dimension(group, x)?;
    Ok(x.len() as i64 - s_x as i64)
}

/// Second Renyi CMI of a stabilizer state over a tripartition. The four
/// integer coefficients are combined first and multiplied by ln 2 once, so
/// results are exact multiples of `LN_2`.
pub fn stabilizer_cmi(group: &StabilizerGroup, part: &Tripartition) -> Result<f64> {
    if group.n() != part.len() {
        return Err(StabilizerError::LengthMismatch { got: group.n(), want: part.len() });
    }
    let count = entropy_count(group, &part.ab())? + entropy_count(group, &part.bc())?
        - entropy_count(group, &part.b())?
        - entropy_count(group, &part.abc())?;
    Ok(count as f64 * LN_2)
}

/// Periodic cluster-state group `{Z_(j-1) X_j Z_(j+1)}`.
pub fn cluster_group(len: usize) -> Result<StabilizerGroup> {
    if len < 3 {
        return Err(StabilizerError::TooShort { got: len, want: 3 });
    }
    let mut generators = Vec::with_capacity(len);
    for j in 0..len {
        let mut g = PauliString::identity(len);
        g.flip_z((j + len - 1) % len);
        g.flip_x(j);
        g.flip_z((j + 1) % len);
        generators.push(g);
    }
    StabilizerGroup::new(len, generators)
}

/// The single global string `prod_j X_j`, the deep strong-to-weak
/// symmetry-broken limit.
pub fn swssb_group(len: usize) -> Result<StabilizerGroup> {
    if len < 3 {
        return Err(StabilizerError::TooShort { got: len, want: 3 });
    }
    let mut g = PauliString::identity(len);
    for j in 0..len {
        g.flip_x(j);
    }
    StabilizerGroup::new(len, vec![g])
}

/// Seeded random stabilizer group: single-qubit Z generators pushed through
/// a random Clifford circuit (H, S, CNOT), which preserves commutation and
/// independence. Intended for tests and examples.
pub fn random_group(n: usize, k: usize, seed: u64) -> Result<StabilizerGroup> {
    use rand::{Rng, SeedableRng};
    if k > n {
        return Err(StabilizerError::TooManyGenerators { k, n });
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut generators: Vec<PauliString> = (0..k).map(|q| PauliString::z(n, q)).collect();
    for _ in 0..20 * n {
        match rng.gen_range(0..3u8) {
            0 => {
                // H: swap the X and Z bits of one qubit.
                let q = rng.gen_range(0..n);
                for g in &mut generators {
                    let (xb, zb) = (g.x_bit(q), g.z_bit(q));
                    if xb != zb {
                        g.flip_x(q);
                        g.flip_z(q);
                    }
                }
            }
            1 => {
                // S: X -> Y on one qubit.
                let q = rng.gen_range(0..n);
                for g in &mut generators {
                    if g.x_bit(q) {
                        g.flip_z(q);
                    }
                }
            }
            _ => {
                // CNOT: X spreads control -> target, Z spreads target -> control.
                let c = rng.gen_range(0..n);
                let mut t = rng.gen_range(0..n);
                if c == t {
                    t = (t + 1) % n;
                }
                for g in &mut generators {
                    if g.x_bit(c) {
                        g.flip_x(t);
                    }
                    if g.z_bit(t) {
                        g.flip_z(c);
                    }
                }
            }
        }
    }
    StabilizerGroup::new(n, generators)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force `s_X`: enumerate all 2^k elements and count those
    /// supported inside `X`; the count is 2^(s_X).
    fn enumerated_s_x(group: &StabilizerGroup, x: &[usize]) -> usize {
        assert!(group.k() <= 16);
        let mask = site_mask(group.n(), x).unwrap();
        let mut count = 0usize;
        for bits in 0..(1usize << group.k()) {
            let mut p = PauliString::identity(group.n());
            for (i, g) in group.generators().iter().enumerate() {
                if bits >> i & 1 == 1 {
                    p = p.mul(g);
                }
            }
            if p.supported_on(&mask) {
                count += 1;
            }
        }
        assert!(count.is_power_of_two());
        count.trailing_zeros() as usize
    }

    #[test]
    fn global_string_restricts_trivially() {
        let group = swssb_group(8).unwrap();
        assert_eq!(group.k(), 1);
        assert_eq!(restricted_subgroup_dimension(&group, &[0, 1, 2]).unwrap(), 0);
        let all: Vec<usize> = (0..8).collect();
        assert_eq!(restricted_subgroup_dimension(&group, &all).unwrap(), 1);
    }

    #[test]
    fn ghz_group_entropy_is_ln2_on_half() {
        let n = 4;
        let mut generators = vec![];
        for j in 0..3 {
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
        let group = StabilizerGroup::new(n, generators).unwrap();
        assert_eq!(restricted_subgroup_dimension(&group, &[0, 1]).unwrap(), 1);
        assert_eq!(enumerated_s_x(&group, &[0, 1]), 1);
        let s2 = stabilizer_renyi_entropy(&group, &[0, 1]).unwrap();
        assert_eq!(s2, LN_2);
    }

    #[test]
    fn product_group_has_zero_entropy_everywhere() {
        let n = 6;
        let generators = (0..n).map(|q| PauliString::z(n, q)).collect();
        let group = StabilizerGroup::new(n, generators).unwrap();
        for bits in 0..(1usize << n) {
            let x: Vec<usize> = (0..n).filter(|&s| bits >> s & 1 == 1).collect();
            assert_eq!(stabilizer_renyi_entropy(&group, &x).unwrap(), 0.0);
        }
    }

    #[test]
    fn swssb_entropies_and_cmi() {
        let group = swssb_group(7).unwrap();
        // Proper subsets never support the global string.
        assert_eq!(stabilizer_renyi_entropy(&group, &[0, 2, 5]).unwrap(), 3.0 * LN_2);
        for r in [1usize, 4, 12] {
            let part = Tripartition::new(4, r).unwrap();
            let group = swssb_group(part.len()).unwrap();
            assert_eq!(stabilizer_cmi(&group, &part).unwrap(), LN_2);
        }
    }

    #[test]
    fn cluster_group_is_a_full_commuting_set() {
        let group = cluster_group(8).unwrap();
        assert_eq!(group.k(), 8);
        for (i, a) in group.generators().iter().enumerate() {
            for b in group.generators().iter().skip(i + 1) {
                assert!(a.commutes(b));
            }
        }
    }

    #[test]
    fn rank_method_matches_enumeration_on_random_groups() {
        for seed in 0..6u64 {
            let group = random_group(5, 3, seed).unwrap();
            for bits in 0..(1usize << 5) {
                let x: Vec<usize> = (0..5).filter(|&s| bits >> s & 1 == 1).collect();
                let fast = restricted_subgroup_dimension(&group, &x).unwrap();
                assert_eq!(fast, enumerated_s_x(&group, &x), "seed {seed}, X = {x:?}");
            }
        }
    }

    #[test]
    fn pure_state_entropies_are_complementary() {
        for group in [cluster_group(7).unwrap(), random_group(6, 6, 11).unwrap()] {
            let n = group.n();
            for bits in 0..(1usize << n) {
                let x: Vec<usize> = (0..n).filter(|&s| bits >> s & 1 == 1).collect();
                let xbar: Vec<usize> = (0..n).filter(|&s| bits >> s & 1 == 0).collect();
                let sa = stabilizer_renyi_entropy(&group, &x).unwrap();
                let sb = stabilizer_renyi_entropy(&group, &xbar).unwrap();
                assert_eq!(sa, sb);
            }
        }
    }

    #[test]
    fn invalid_groups_are_rejected() {
        let n = 3;
        // X0 and Z0 anticommute.
        let bad = StabilizerGroup::new(n, vec![PauliString::x(n, 0), PauliString::z(n, 0)]);
        assert!(matches!(bad, Err(StabilizerError::NonCommuting(0, 1))));
        // Z0 listed twice is dependent.
        let dep = StabilizerGroup::new(n, vec![PauliString::z(n, 0), PauliString::z(n, 0)]);
        assert!(matches!(dep, Err(StabilizerError::DependentGenerators)));
        assert!(swssb_group(2).is_err());
        assert!(matches!(
            restricted_subgroup_dimension(&swssb_group(4).unwrap(), &[9]),
            Err(StabilizerError::SiteOutOfRange { .. })
        ));
    }
}
