//! Randomized invariants across the public API: structural identities that
//! must hold for every input, checked on generated states, groups, tensors,
//! and curves rather than hand-picked cases.

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use renyi_markov::{
    contract, fit_exponential, random_group, restricted_subgroup_dimension, second_renyi_entropy,
    svd_split, vectorize_pure, ChannelKind, ChannelSpec, CmiCurve, CmiPoint, CurveMeta,
    DenseTensor, DmrgConfig, MatrixProductState, Model, ModelSpec, PauliString, StabilizerGroup,
    TruncationPolicy,
};

fn exact() -> TruncationPolicy {
    TruncationPolicy::exact()
}

fn random_state(len: usize, chi: usize, seed: u64) -> MatrixProductState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    MatrixProductState::random(len, 2, chi, &mut rng).unwrap().normalized().unwrap()
}

fn meta() -> CurveMeta {
    CurveMeta {
        model: ModelSpec { model: Model::Cluster, len: 0, h_x: 1.0, j_zz: 0.0, periodic: true },
        n_a: 4,
        channels: Vec::new(),
        policy: TruncationPolicy::default(),
        dmrg: DmrgConfig::default(),
    }
}

fn synthetic_curve(xi: f64, c1: f64, r_max: usize) -> CmiCurve {
    let points = (1..=r_max)
        .map(|r| CmiPoint {
            r,
            i2: (-(r as f64) / xi).exp() + c1,
            s2_ab: 0.0,
            s2_bc: 0.0,
            s2_b: 0.0,
            s2_abc: 0.0,
            max_discarded_weight: 0.0,
            trace_drift: 0.0,
            converged: true,
            wall_seconds: 0.0,
            error: None,
        })
        .collect();
    CmiCurve::new(meta(), points).unwrap()
}

/// 2^k brute force: count the subgroup elements supported inside the mask.
fn enumerated_dimension(group: &StabilizerGroup, x: &[usize]) -> usize {
    let mut mask = vec![false; group.n()];
    for &site in x {
        mask[site] = true;
    }
    let k = group.k();
    let mut supported = 0usize;
    for bits in 0..(1usize << k) {
        let mut element = PauliString::identity(group.n());
        for (j, generator) in group.generators().iter().enumerate() {
            if bits >> j & 1 == 1 {
                element = element.mul(generator);
            }
        }
        if element.supported_on(&mask) {
            supported += 1;
        }
    }
    supported.trailing_zeros() as usize
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Vectorizing a normalized pure state gives trace 1 and purity 1.
    #[test]
    fn vectorized_pure_states_have_unit_trace_and_purity(
        len in 3usize..7,
        chi in 1usize..5,
        seed in 0u64..1u64 << 48,
    ) {
        let psi = random_state(len, chi, seed);
        let rho = vectorize_pure(&psi, &exact()).unwrap();
        prop_assert!((rho.trace_of().unwrap() - 1.0).abs() < 1e-10);
        prop_assert!((rho.purity().unwrap() - 1.0).abs() < 1e-10);
    }

    /// Pure-state subsystem entropies come in complementary pairs, and the
    /// whole-chain entropy vanishes.
    #[test]
    fn pure_state_entropies_are_complementary(
        len in 3usize..7,
        chi in 1usize..5,
        seed in 0u64..1u64 << 48,
        subset_bits in 1usize..64,
    ) {
        let psi = random_state(len, chi, seed);
        let rho = vectorize_pure(&psi, &exact()).unwrap();
        let bits = subset_bits & ((1 << len) - 1);
        prop_assume!(bits != 0 && bits != (1 << len) - 1);
        let x: Vec<usize> = (0..len).filter(|&s| bits >> s & 1 == 1).collect();
        let xbar: Vec<usize> = (0..len).filter(|&s| bits >> s & 1 == 0).collect();
        let s_x = second_renyi_entropy(&rho, &x).unwrap();
        let s_xbar = second_renyi_entropy(&rho, &xbar).unwrap();
        prop_assert!((s_x - s_xbar).abs() < 1e-8, "S2(X) = {s_x}, S2(complement) = {s_xbar}");
        prop_assert!(s_x > -1e-9);
        let all: Vec<usize> = (0..len).collect();
        prop_assert!(second_renyi_entropy(&rho, &all).unwrap().abs() < 1e-9);
    }

    /// Channels preserve the trace and never increase purity.
    #[test]
    fn channels_preserve_trace_and_lower_purity(
        len in 3usize..7,
        chi in 1usize..4,
        seed in 0u64..1u64 << 48,
        kind_pick in 0usize..3,
        p in 0.0f64..=0.5,
    ) {
        let kind = [ChannelKind::OddZ, ChannelKind::PairZz, ChannelKind::SingleX][kind_pick];
        let psi = random_state(len, chi, seed);
        let rho = vectorize_pure(&psi, &exact()).unwrap();
        let before = rho.purity().unwrap();
        let (after, report) = rho.apply_channel(&ChannelSpec { kind, p }, &exact()).unwrap();
        prop_assert!(report.trace_drift < 1e-10);
        prop_assert!((after.trace_of().unwrap() - 1.0).abs() < 1e-10);
        prop_assert!(after.purity().unwrap() <= before + 1e-9);
    }

    /// The subsystem projector is idempotent: applying it twice changes
    /// nothing (overlap 1 against the once-projected state).
    #[test]
    fn depolarizer_is_idempotent(
        len in 3usize..7,
        seed in 0u64..1u64 << 48,
        subset_bits in 1usize..64,
    ) {
        let bits = subset_bits & ((1 << len) - 1);
        prop_assume!(bits != 0);
        let sites: Vec<usize> = (0..len).filter(|&s| bits >> s & 1 == 1).collect();
        let psi = random_state(len, 3, seed);
        let rho = vectorize_pure(&psi, &exact()).unwrap();
        let once = rho.apply_depolarizer(&sites).unwrap();
        let twice = once.apply_depolarizer(&sites).unwrap();
        let cross = once.state().inner_product(twice.state()).unwrap().value();
        let self_ip = once.state().inner_product(once.state()).unwrap().value();
        prop_assert!((cross - self_ip).norm() <= 1e-12 * self_ip.norm().max(1e-300));
    }

    /// Binary-rank subsystem dimension equals the brute-force 2^k count.
    #[test]
    fn restricted_dimension_matches_enumeration(
        n in 2usize..7,
        k in 1usize..6,
        seed in 0u64..1u64 << 48,
        subset_bits in 0usize..64,
    ) {
        let k = k.min(n);
        let group = random_group(n, k, seed).unwrap();
        let bits = subset_bits & ((1 << n) - 1);
        let x: Vec<usize> = (0..n).filter(|&s| bits >> s & 1 == 1).collect();
        let fast = restricted_subgroup_dimension(&group, &x).unwrap();
        prop_assert_eq!(fast, enumerated_dimension(&group, &x));
    }

    /// Exact synthetic decay curves are recovered to high relative accuracy.
    #[test]
    fn fit_recovers_exact_decay(
        xi in 0.5f64..12.0,
        c1 in 0.0f64..1.0,
    ) {
        let fit = fit_exponential(&synthetic_curve(xi, c1, 10)).unwrap();
        prop_assert!(!fit.no_decay);
        prop_assert!(
            (fit.xi2 - xi).abs() <= 1e-6 * xi,
            "xi fitted {} vs {}", fit.xi2, xi
        );
    }

    /// A lossless SVD split reconstructs the tensor it factored.
    #[test]
    fn svd_split_reconstructs_without_truncation(
        d0 in 1usize..4,
        d1 in 1usize..4,
        d2 in 1usize..4,
        seed in 0u64..1u64 << 48,
    ) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let entries: Vec<C64> = (0..d0 * d1 * d2)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let t = DenseTensor::from_elements(&[d0, d1, d2], entries).unwrap();
        let split = svd_split(&t, &[0, 1], &exact()).unwrap();
        prop_assert!(split.discarded_weight == 0.0);

        // Scale the singular values into vt, then contract back.
        let mut sv = split.vt.array().clone();
        for (i, s) in split.singular_values.iter().enumerate() {
            sv.index_axis_mut(ndarray::Axis(0), i).mapv_inplace(|v| v * s);
        }
        let sv = DenseTensor::from_array(sv).unwrap();
        let rebuilt = contract(&split.u, &sv, &[(2, 0)]).unwrap();
        let err: f64 = rebuilt
            .entries()
            .iter()
            .zip(t.entries())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        prop_assert!(err < 1e-10, "reconstruction error {err}");
    }

    /// Inner products factorize over product states.
    #[test]
    fn product_state_inner_products_factorize(
        len in 1usize..6,
        seed in 0u64..1u64 << 48,
    ) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || {
            (0..len)
                .map(|_| {
                    vec![
                        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    ]
                })
                .collect::<Vec<_>>()
        };
        let (a, b) = (draw(), draw());
        let sa = MatrixProductState::product_state(2, &a).unwrap();
        let sb = MatrixProductState::product_state(2, &b).unwrap();
        let got = sa.inner_product(&sb).unwrap().value();
        let want: C64 = a
            .iter()
            .zip(&b)
            .map(|(u, v)| u[0].conj() * v[0] + u[1].conj() * v[1])
            .product();
        prop_assert!((got - want).norm() < 1e-10 * want.norm().max(1.0));
    }
}
