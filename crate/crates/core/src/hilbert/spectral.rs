//! Spectral form `F = Σ_j f_j P^j` of Hermitian operators.

use nalgebra::DMatrix;

use super::operator::{Operator, C64};
use super::pdi::{Pdi, Projector};
use super::HilbertError;
use crate::tolerance;

/// Hermitian operator in spectral form: distinct eigenvalues in descending
/// order, one eigenspace projector each.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    eigenvalues: Vec<f64>,
    pdi: Pdi,
}

impl Observable {
    /// Assembles an observable from eigenvalues and a matching PDI.
    /// Eigenvalues are expected distinct; they are not re-sorted.
    pub fn from_parts(eigenvalues: Vec<f64>, pdi: Pdi) -> Result<Self, HilbertError> {
        if eigenvalues.len() != pdi.len() {
            return Err(HilbertError::LabelCount {
                labels: eigenvalues.len(),
                projectors: pdi.len(),
            });
        }
        Ok(Observable { eigenvalues, pdi })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn pdi(&self) -> &Pdi {
        &self.pdi
    }

    pub fn dim(&self) -> usize {
        self.pdi.dim()
    }

    /// Ranks of the eigenspace projectors.
    pub fn ranks(&self) -> Vec<usize> {
        self.pdi.projectors().iter().map(Projector::rank).collect()
    }

    /// `Σ_j f_j P^j`.
    pub fn reconstruct(&self) -> Operator {
        let n = self.dim();
        let mut acc = DMatrix::<C64>::zeros(n, n);
        for (f, p) in self.eigenvalues.iter().zip(self.pdi.projectors()) {
            acc += p.op().matrix() * C64::new(*f, 0.0);
        }
        Operator::from_matrix(acc).expect("square by construction")
    }
}

/// Groups eigenvalues (sorted descending) whose consecutive gaps are within
/// the grouping tolerance. Returns index groups into the input slice.
fn group_descending(values: &[f64]) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for idx in order {
        match groups.last_mut() {
            Some(g) if values[*g.last().unwrap()] - values[idx] <= tolerance::EIGEN_GROUPING => {
                g.push(idx)
            }
            _ => groups.push(vec![idx]),
        }
    }
    groups
}

/// Eigenspace decomposition of a Hermitian operator.
///
/// Degenerate eigenvalues (within 1e-8) share one projector whose rank is the
/// multiplicity. Projectors are labelled `"0"`, `"1"`, ... from the largest
/// eigenvalue down.
pub fn spectral_decompose(h: &Operator) -> Result<Observable, HilbertError> {
    let defect = h.hermiticity_defect();
    if defect >= tolerance::algebraic() {
        return Err(HilbertError::NotHermitian { defect });
    }
    let sym = (h.matrix() + h.matrix().adjoint()) * C64::new(0.5, 0.0);
    let n = sym.nrows();
    let eig = sym.symmetric_eigen();
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let mut eigenvalues = Vec::new();
    let mut projectors = Vec::new();
    for group in group_descending(&values) {
        let mean = group.iter().map(|&i| values[i]).sum::<f64>() / group.len() as f64;
        let mut p = DMatrix::<C64>::zeros(n, n);
        for &i in &group {
            let v = eig.eigenvectors.column(i);
            p += v * v.adjoint();
        }
        let p = (&p + p.adjoint()) * C64::new(0.5, 0.0);
        eigenvalues.push(mean);
        projectors.push(Projector::new(Operator::from_matrix(p)?)?);
    }
    let pdi = Pdi::with_index_labels(projectors)?;
    Ok(Observable { eigenvalues, pdi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::builtins::{pauli_x, pauli_y, pauli_z};

    #[test]
    fn z_splits_into_basis_projectors() {
        let obs = spectral_decompose(&pauli_z()).unwrap();
        assert_eq!(obs.eigenvalues().len(), 2);
        assert!((obs.eigenvalues()[0] - 1.0).abs() < 1e-14);
        assert!((obs.eigenvalues()[1] + 1.0).abs() < 1e-14);
        let p0 = obs.pdi().projectors()[0].op();
        assert!((p0.entry(0, 0).re - 1.0).abs() < 1e-14);
        assert!(p0.entry(1, 1).norm() < 1e-14);
    }

    #[test]
    fn zx_has_doubly_degenerate_eigenvalues() {
        let obs = spectral_decompose(&pauli_z().kron(&pauli_x())).unwrap();
        assert_eq!(obs.ranks(), vec![2, 2]);
    }

    #[test]
    fn reconstruction_of_complex_operator() {
        let h = &pauli_y().kron(&pauli_x()) + &pauli_z().kron(&Operator::identity(2));
        let obs = spectral_decompose(&h).unwrap();
        let back = obs.reconstruct();
        assert!(back.checked_sub(&h).unwrap().max_entry() < 1e-9);
        assert_eq!(obs.ranks().iter().sum::<usize>(), 4);
    }

    #[test]
    fn non_hermitian_rejected() {
        let a = Operator::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(
            spectral_decompose(&a),
            Err(HilbertError::NotHermitian { .. })
        ));
    }

    #[test]
    fn jitter_below_grouping_tolerance_merges() {
        let h = Operator::diagonal(&[
            C64::new(1.0, 0.0),
            C64::new(1.0 + 1e-10, 0.0),
            C64::new(-1.0, 0.0),
        ]);
        let obs = spectral_decompose(&h).unwrap();
        assert_eq!(obs.ranks(), vec![2, 1]);
        let h = Operator::diagonal(&[C64::new(1.0, 0.0), C64::new(1.0 + 1e-6, 0.0)]);
        assert_eq!(spectral_decompose(&h).unwrap().ranks(), vec![1, 1]);
    }
}
