mod common;

use common::*;
use histories_kit::hilbert::{
    common_refinement, pdi_validate, possesses, spectral_decompose, tensor_product, Operator,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn spectral_round_trip((dim, h) in (1usize..=5).prop_flat_map(|d| (Just(d), hermitian(d)))) {
        let obs = spectral_decompose(&h).unwrap();
        prop_assert!(close(&obs.reconstruct(), &h) < 1e-9);
        let ops: Vec<Operator> = obs.pdi().projectors().iter().map(|p| p.op().clone()).collect();
        prop_assert!(pdi_validate(&ops).unwrap().passes());
        prop_assert_eq!(obs.ranks().iter().sum::<usize>(), dim);
        prop_assert!(obs.eigenvalues().windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn refinement_refines_both(
        (u, ga, gb) in (2usize..=5).prop_flat_map(|d| (
            unitary(d),
            prop::collection::vec(0..d, d),
            prop::collection::vec(0..d, d),
        ))
    ) {
        // same eigenbasis, different groupings: always compatible
        let p = grouped(&u, &ga, "a");
        let q = grouped(&u, &gb, "b");
        let r = common_refinement(&p, &q).unwrap();
        prop_assert!(r.report().passes());
        for (pdi, prefix) in [(&p, "a"), (&q, "b")] {
            for (label, proj) in pdi.iter() {
                let mut sum = Operator::zeros(u.dim());
                for (rl, rp) in r.iter() {
                    let (la, lb) = rl.split_at(rl.find('b').unwrap());
                    let part = if prefix == "a" { la } else { lb };
                    if part == label {
                        sum = &sum + rp.op();
                    }
                }
                prop_assert!(close(&sum, proj.op()) < 1e-10);
            }
        }
    }

    #[test]
    fn possession_excludes_complement(
        (k, p) in (1usize..=4).prop_flat_map(|d| (ket(d), pdi(d, "p")))
    ) {
        for proj in p.projectors() {
            let both = possesses(&k, proj).unwrap() && possesses(&k, &proj.complement()).unwrap();
            prop_assert!(!both);
        }
    }

    // integer entries keep every product exact, so equality tests the index
    // convention rather than rounding
    #[test]
    fn kron_associative(a in integer_op(2), b in integer_op(3), c in integer_op(2)) {
        let left = tensor_product(&tensor_product(&a, &b), &c);
        let right = tensor_product(&a, &tensor_product(&b, &c));
        prop_assert_eq!(left, right);
    }
}

fn integer_op(dim: usize) -> impl Strategy<Value = Operator> {
    prop::collection::vec(-4i32..=4, 2 * dim * dim).prop_map(move |v| {
        let m = nalgebra::DMatrix::from_iterator(
            dim,
            dim,
            v.chunks(2)
                .map(|c| histories_kit::hilbert::C64::new(c[0] as f64, c[1] as f64)),
        );
        Operator::from_matrix(m).unwrap()
    })
}
