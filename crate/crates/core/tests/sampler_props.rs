mod common;

use common::*;
use histories_kit::bell::{chsh_value, neon_setup, ops_from_angles};
use histories_kit::hilbert::{pauli_z, spectral_decompose};
use histories_kit::sampler::{empirical_chsh, sample_pdi, RunConfig};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn seed_determinism(
        (psi, p) in (1usize..=4).prop_flat_map(|d| (ket(d), pdi(d, "o"))),
        shots in 1u64..200_000,
        seed in any::<u64>(),
    ) {
        let values: Vec<f64> = (0..p.len()).map(|j| j as f64).collect();
        let cfg = RunConfig::new(shots, seed).unwrap();
        let a = sample_pdi(&psi, &p, &values, cfg).unwrap();
        let b = sample_pdi(&psi, &p, &values, cfg).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.counts.iter().sum::<u64>(), shots);
        let (lo, hi) = (0.0, (p.len() - 1) as f64);
        prop_assert!(a.empirical_mean >= lo && a.empirical_mean <= hi);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn empirical_chsh_converges(psi in ket(4), angles in prop::array::uniform4(0.0f64..6.3), seed in any::<u64>()) {
        let ops = ops_from_angles([angles[0], angles[1]], [angles[2], angles[3]]);
        let exact = chsh_value(&psi, &ops).unwrap().direct;
        let r = empirical_chsh(&psi, &ops, RunConfig::new(100_000, seed).unwrap()).unwrap();
        prop_assert!((r.s_hat - exact).abs() <= 5.0 * r.std_error, "{} vs {}", r.s_hat, exact);
    }
}

#[test]
fn half_probability_outcome_statistics() {
    let plus = histories_kit::hilbert::Ket::from_real(&[1.0, 1.0]).unwrap();
    let z = spectral_decompose(&pauli_z()).unwrap();
    let mut inside = 0;
    for rep in 0..100u64 {
        // indicator of the first outcome: mean estimates p = 1/2
        let r = sample_pdi(
            &plus,
            z.pdi(),
            &[1.0, 0.0],
            RunConfig::new(10_000, 1000 + rep).unwrap(),
        )
        .unwrap();
        if (r.empirical_mean - 0.5).abs() <= 4.0 * r.std_error {
            inside += 1;
        }
    }
    assert!(inside >= 99, "{inside} of 100 within 4σ");
}

#[test]
fn neon_counts_reproduce() {
    let n = neon_setup();
    let cfg = RunConfig::new(200_000, 42).unwrap();
    let a = empirical_chsh(&n.top_eigenstate, &n.ops, cfg).unwrap();
    let b = empirical_chsh(&n.top_eigenstate, &n.ops, cfg).unwrap();
    assert_eq!(a, b);
    let c = empirical_chsh(&n.top_eigenstate, &n.ops, cfg.with_seed(43)).unwrap();
    assert_ne!(a.runs[0].counts, c.runs[0].counts);
}
