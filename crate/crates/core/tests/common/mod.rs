#![allow(dead_code)]

use histories_kit::hilbert::{Ket, Operator, Pdi, Projector, C64};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

pub fn ket(dim: usize) -> impl Strategy<Value = Ket> {
    prop::collection::vec(-1.0f64..1.0, 2 * dim)
        .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
        .prop_map(move |v| {
            let amps: Vec<C64> = v.chunks(2).map(|c| C64::new(c[0], c[1])).collect();
            Ket::new(amps).unwrap()
        })
}

/// Columns of the Q factor of a random complex matrix.
pub fn unitary(dim: usize) -> impl Strategy<Value = Operator> {
    prop::collection::vec(-1.0f64..1.0, 2 * dim * dim).prop_filter_map("full rank", move |v| {
        let m = DMatrix::from_iterator(dim, dim, v.chunks(2).map(|c| C64::new(c[0], c[1])));
        if m.clone().determinant().norm() < 1e-3 {
            return None;
        }
        Operator::from_matrix(m.qr().q()).ok()
    })
}

/// Rank-one projectors onto the columns of `u`.
pub fn columns(u: &Operator) -> Vec<Projector> {
    (0..u.dim())
        .map(|j| {
            let col: DVector<C64> = u.matrix().column(j).into_owned();
            Projector::onto(&Ket::from_vector(col).unwrap())
        })
        .collect()
}

/// Sum of column projectors grouped by `groups[j]` (group indices < dim).
pub fn grouped(u: &Operator, groups: &[usize], prefix: &str) -> Pdi {
    let cols = columns(u);
    let n = groups.iter().max().unwrap() + 1;
    let mut sums = vec![Operator::zeros(u.dim()); n];
    for (j, &g) in groups.iter().enumerate() {
        sums[g] = &sums[g] + cols[j].op();
    }
    let mut projectors = Vec::new();
    let mut labels = Vec::new();
    for (g, s) in sums.into_iter().enumerate() {
        if s.trace().re > 0.5 {
            projectors.push(Projector::new(s).unwrap());
            labels.push(format!("{prefix}{g}"));
        }
    }
    Pdi::new(projectors, labels).unwrap()
}

pub fn pdi(dim: usize, prefix: &'static str) -> impl Strategy<Value = Pdi> {
    (unitary(dim), prop::collection::vec(0..dim, dim))
        .prop_map(move |(u, g)| grouped(&u, &g, prefix))
}

/// `U diag(eigs) U†` with eigenvalues drawn from a small set so that
/// degeneracies occur.
pub fn hermitian(dim: usize) -> impl Strategy<Value = Operator> {
    (unitary(dim), prop::collection::vec(-3i32..=3, dim)).prop_map(|(u, e)| {
        let d = Operator::diagonal(
            &e.iter()
                .map(|&x| C64::new(x as f64 * 0.5, 0.0))
                .collect::<Vec<_>>(),
        );
        &(&u * &d) * &u.adjoint()
    })
}

pub fn close(a: &Operator, b: &Operator) -> f64 {
    (a - b).max_entry()
}
