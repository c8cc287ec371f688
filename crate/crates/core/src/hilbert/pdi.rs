//! Projectors and projective decompositions of the identity.

use std::collections::HashSet;
use std::fmt;

use nalgebra::DMatrix;

use super::operator::{max_entry, Ket, Operator, C64};
use super::HilbertError;
use crate::tolerance;

/// Hermitian idempotent operator.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector(Operator);

impl Projector {
    pub fn new(op: Operator) -> Result<Self, HilbertError> {
        let defect = idempotency_defect(&op);
        if defect < tolerance::algebraic() {
            Ok(Projector(op))
        } else {
            Err(HilbertError::NotProjector { defect })
        }
    }

    /// `[psi] = |psi><psi|`.
    pub fn onto(k: &Ket) -> Self {
        Projector(k.outer())
    }

    pub fn identity(dim: usize) -> Self {
        Projector(Operator::identity(dim))
    }

    pub fn zero(dim: usize) -> Self {
        Projector(Operator::zeros(dim))
    }

    pub fn op(&self) -> &Operator {
        &self.0
    }

    pub fn into_operator(self) -> Operator {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Rank, read off the trace.
    pub fn rank(&self) -> usize {
        self.0.trace().re.round().max(0.0) as usize
    }

    /// `I - P`.
    pub fn complement(&self) -> Projector {
        Projector(&Operator::identity(self.dim()) - &self.0)
    }

    /// `P ⊗ I_n`.
    pub fn lift_left(&self, n: usize) -> Projector {
        Projector(self.0.kron(&Operator::identity(n)))
    }

    /// `I_n ⊗ P`.
    pub fn lift_right(&self, n: usize) -> Projector {
        Projector(Operator::identity(n).kron(&self.0))
    }

    /// `<k|P|k>`, the Born probability of this property in state `k`.
    pub fn probability(&self, k: &Ket) -> Result<f64, HilbertError> {
        Ok(self.0.expectation(k)?.re)
    }
}

/// Larger of the Hermiticity and idempotency defects.
fn idempotency_defect(op: &Operator) -> f64 {
    let m = op.matrix();
    let square = max_entry(&(m * m - m));
    square.max(op.hermiticity_defect())
}

/// Defect measurements for a candidate decomposition of the identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PdiReport {
    pub orthogonality_defect: f64,
    pub idempotency_defect: f64,
    pub completeness_defect: f64,
    pub tolerance: f64,
}

impl PdiReport {
    pub fn passes(&self) -> bool {
        self.orthogonality_defect < self.tolerance
            && self.idempotency_defect < self.tolerance
            && self.completeness_defect < self.tolerance
    }
}

impl fmt::Display for PdiReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "orthogonality {:e}, idempotency {:e}, completeness {:e} (tol {:e})",
            self.orthogonality_defect,
            self.idempotency_defect,
            self.completeness_defect,
            self.tolerance
        )
    }
}

/// Measures how far `ops` is from being a projective decomposition of the
/// identity. All operators must share one dimension.
pub fn pdi_validate(ops: &[Operator]) -> Result<PdiReport, HilbertError> {
    let dim = ops.first().ok_or(HilbertError::Empty)?.dim();
    if let Some(bad) = ops.iter().find(|o| o.dim() != dim) {
        return Err(HilbertError::DimensionMismatch {
            expected: dim,
            found: bad.dim(),
        });
    }
    let mut orthogonality = 0.0_f64;
    for (j, p) in ops.iter().enumerate() {
        for q in &ops[j + 1..] {
            orthogonality = orthogonality.max(max_entry(&(p.matrix() * q.matrix())));
        }
    }
    let idempotency = ops.iter().map(idempotency_defect).fold(0.0, f64::max);
    let mut sum = DMatrix::<C64>::zeros(dim, dim);
    for p in ops {
        sum += p.matrix();
    }
    let completeness = max_entry(&(sum - DMatrix::<C64>::identity(dim, dim)));
    Ok(PdiReport {
        orthogonality_defect: orthogonality,
        idempotency_defect: idempotency,
        completeness_defect: completeness,
        tolerance: tolerance::algebraic(),
    })
}

/// Ordered, labelled collection of orthogonal projectors summing to `I`:
/// a quantum sample space.
#[derive(Clone, Debug, PartialEq)]
pub struct Pdi {
    projectors: Vec<Projector>,
    labels: Vec<String>,
}

impl Pdi {
    pub fn new(projectors: Vec<Projector>, labels: Vec<String>) -> Result<Self, HilbertError> {
        if labels.len() != projectors.len() {
            return Err(HilbertError::LabelCount {
                labels: labels.len(),
                projectors: projectors.len(),
            });
        }
        let mut seen = HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(HilbertError::DuplicateLabel(dup.clone()));
        }
        let ops: Vec<Operator> = projectors.iter().map(|p| p.op().clone()).collect();
        let report = pdi_validate(&ops)?;
        if !report.passes() {
            return Err(HilbertError::InvalidPdi(report));
        }
        Ok(Pdi { projectors, labels })
    }

    /// Labels `"0"`, `"1"`, ... in order.
    pub fn with_index_labels(projectors: Vec<Projector>) -> Result<Self, HilbertError> {
        let labels = (0..projectors.len()).map(|j| j.to_string()).collect();
        Self::new(projectors, labels)
    }

    /// `{[0], [1], ..., [dim-1]}`.
    pub fn computational(dim: usize) -> Self {
        let projectors = (0..dim)
            .map(|j| Projector::onto(&Ket::basis(dim, j)))
            .collect();
        Pdi {
            projectors,
            labels: (0..dim).map(|j| j.to_string()).collect(),
        }
    }

    /// `{[k], I - [k]}`, labelled `name` and `not`.
    pub fn ket_and_complement(k: &Ket, name: &str) -> Self {
        let p = Projector::onto(k);
        let rest = p.complement();
        Pdi {
            projectors: vec![p, rest],
            labels: vec![name.to_string(), "not".to_string()],
        }
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    pub fn projectors(&self) -> &[Projector] {
        &self.projectors
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn get(&self, label: &str) -> Option<&Projector> {
        self.position(label).map(|j| &self.projectors[j])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Projector)> {
        self.labels.iter().map(String::as_str).zip(&self.projectors)
    }

    pub fn report(&self) -> PdiReport {
        let ops: Vec<Operator> = self.projectors.iter().map(|p| p.op().clone()).collect();
        pdi_validate(&ops).expect("a constructed PDI is non-empty with equal dims")
    }

    /// Every element lifted to `P ⊗ I_n`.
    pub fn lift_left(&self, n: usize) -> Pdi {
        Pdi {
            projectors: self.projectors.iter().map(|p| p.lift_left(n)).collect(),
            labels: self.labels.clone(),
        }
    }

    /// Every element lifted to `I_n ⊗ P`.
    pub fn lift_right(&self, n: usize) -> Pdi {
        Pdi {
            projectors: self.projectors.iter().map(|p| p.lift_right(n)).collect(),
            labels: self.labels.clone(),
        }
    }

    /// Born probabilities `<k|P^j|k>` in PDI order.
    pub fn probabilities(&self, k: &Ket) -> Result<Vec<f64>, HilbertError> {
        self.projectors.iter().map(|p| p.probability(k)).collect()
    }
}

fn first_noncommuting(p: &Pdi, q: &Pdi) -> Result<Option<HilbertError>, HilbertError> {
    if p.dim() != q.dim() {
        return Err(HilbertError::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    let tol = tolerance::algebraic();
    for (lp, pp) in p.iter() {
        for (lq, qq) in q.iter() {
            let defect = pp.op().commutation_defect(qq.op())?;
            if defect >= tol {
                return Ok(Some(HilbertError::NonCommuting {
                    left: lp.to_string(),
                    right: lq.to_string(),
                    defect,
                }));
            }
        }
    }
    Ok(None)
}

/// True iff every projector of `p` commutes with every projector of `q`.
pub fn pdi_compatible(p: &Pdi, q: &Pdi) -> Result<bool, HilbertError> {
    Ok(first_noncommuting(p, q)?.is_none())
}

/// The nonzero products `P^j Q^k`, labelled by concatenating the two labels.
///
/// Fails with `NonCommuting` (naming the first offending pair) when the two
/// sample spaces are incompatible.
pub fn common_refinement(p: &Pdi, q: &Pdi) -> Result<Pdi, HilbertError> {
    if let Some(err) = first_noncommuting(p, q)? {
        return Err(err);
    }
    let mut projectors = Vec::new();
    let mut labels = Vec::new();
    for (lp, pp) in p.iter() {
        for (lq, qq) in q.iter() {
            let prod = pp.op() * qq.op();
            // rank-0 products have trace 0; everything else has trace >= 1
            if prod.trace().re < 0.5 {
                continue;
            }
            // symmetrize away the round-off of the product
            let sym = (&prod + &prod.adjoint()).scale(C64::new(0.5, 0.0));
            projectors.push(Projector::new(sym)?);
            labels.push(format!("{lp}{lq}"));
        }
    }
    Pdi::new(projectors, labels)
}

/// A state possesses property `P` iff `P|psi> = |psi>`.
pub fn possesses(k: &Ket, p: &Projector) -> Result<bool, HilbertError> {
    let v = p.op().apply_ket(k)?;
    Ok((v - k.amplitudes()).norm() < tolerance::algebraic())
}

fn check_split(dim: usize, left: usize, right: usize) -> Result<(), HilbertError> {
    if left == 0 || right == 0 || left * right != dim {
        Err(HilbertError::BadSplit { dim, left, right })
    } else {
        Ok(())
    }
}

/// Traces out the right factor of an operator on `C^left ⊗ C^right`.
pub fn partial_trace_right(
    op: &Operator,
    left: usize,
    right: usize,
) -> Result<Operator, HilbertError> {
    check_split(op.dim(), left, right)?;
    let m = op.matrix();
    let out = DMatrix::from_fn(left, left, |i, j| {
        (0..right)
            .map(|k| m[(i * right + k, j * right + k)])
            .sum::<C64>()
    });
    Operator::from_matrix(out)
}

/// Traces out the left factor of an operator on `C^left ⊗ C^right`.
pub fn partial_trace_left(
    op: &Operator,
    left: usize,
    right: usize,
) -> Result<Operator, HilbertError> {
    check_split(op.dim(), left, right)?;
    let m = op.matrix();
    let out = DMatrix::from_fn(right, right, |i, j| {
        (0..left)
            .map(|k| m[(k * right + i, k * right + j)])
            .sum::<C64>()
    });
    Operator::from_matrix(out)
}

/// If `op = A ⊗ I_right`, returns `A`.
pub fn left_factor(
    op: &Operator,
    left: usize,
    right: usize,
) -> Result<Option<Operator>, HilbertError> {
    let a = partial_trace_right(op, left, right)?.scale(C64::new(1.0 / right as f64, 0.0));
    let rebuilt = a.kron(&Operator::identity(right));
    Ok((rebuilt.checked_sub(op)?.max_entry() < tolerance::algebraic()).then_some(a))
}

/// If `op = I_left ⊗ B`, returns `B`.
pub fn right_factor(
    op: &Operator,
    left: usize,
    right: usize,
) -> Result<Option<Operator>, HilbertError> {
    let b = partial_trace_left(op, left, right)?.scale(C64::new(1.0 / left as f64, 0.0));
    let rebuilt = Operator::identity(left).kron(&b);
    Ok((rebuilt.checked_sub(op)?.max_entry() < tolerance::algebraic()).then_some(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::builtins::{pauli_x, pauli_z};
    use crate::hilbert::spectral_decompose;

    fn plus() -> Ket {
        Ket::from_real(&[1.0, 1.0]).unwrap()
    }

    #[test]
    fn computational_basis_passes() {
        let ops: Vec<Operator> = Pdi::computational(2)
            .projectors()
            .iter()
            .map(|p| p.op().clone())
            .collect();
        assert!(pdi_validate(&ops).unwrap().passes());
    }

    #[test]
    fn zero_and_plus_is_not_a_pdi() {
        // |<0|+>|^2 = 1/2, so [0][+] has entries 1/2 in its first row
        let ops = vec![Ket::basis(2, 0).outer(), plus().outer()];
        let report = pdi_validate(&ops).unwrap();
        assert!(!report.passes());
        assert!((report.orthogonality_defect - 0.5).abs() < 1e-15);
        assert!(report.idempotency_defect < 1e-15);
        assert!((report.completeness_defect - 0.5).abs() < 1e-15);
        let projectors = ops
            .into_iter()
            .map(|o| Projector::new(o).unwrap())
            .collect();
        assert!(matches!(
            Pdi::with_index_labels(projectors),
            Err(HilbertError::InvalidPdi(_))
        ));
    }

    #[test]
    fn zz_spectral_pdi_passes() {
        let zz = pauli_z().kron(&pauli_z());
        let obs = spectral_decompose(&zz).unwrap();
        assert!(obs.pdi().report().passes());
    }

    #[test]
    fn refinement_of_z_with_itself_is_z() {
        let z = spectral_decompose(&pauli_z()).unwrap();
        let r = common_refinement(z.pdi(), z.pdi()).unwrap();
        assert_eq!(r.len(), 2);
        for (a, b) in r.projectors().iter().zip(z.pdi().projectors()) {
            assert!(a.op().checked_sub(b.op()).unwrap().max_entry() < 1e-12);
        }
        assert_eq!(r.labels(), ["00", "11"]);
    }

    #[test]
    fn refinement_of_z_and_x_fails() {
        let z = spectral_decompose(&pauli_z()).unwrap();
        let x = spectral_decompose(&pauli_x()).unwrap();
        match common_refinement(z.pdi(), x.pdi()) {
            Err(HilbertError::NonCommuting { defect, .. }) => assert!(defect > 0.1),
            other => panic!("expected NonCommuting, got {other:?}"),
        }
        assert!(!pdi_compatible(z.pdi(), x.pdi()).unwrap());
    }

    #[test]
    fn refinement_of_local_observables_has_four_rank_one_elements() {
        let a0 = pauli_z().kron(&Operator::identity(2));
        let b0 = Operator::identity(2).kron(&pauli_x());
        let pa = spectral_decompose(&a0).unwrap();
        let pb = spectral_decompose(&b0).unwrap();
        let r = common_refinement(pa.pdi(), pb.pdi()).unwrap();
        assert_eq!(r.len(), 4);
        assert!(r.projectors().iter().all(|p| p.rank() == 1));
        assert!(r.report().passes());
    }

    #[test]
    fn possession_of_oscillator_properties() {
        let chi = plus();
        let p0 = Projector::onto(&Ket::basis(2, 0));
        let p1 = Projector::onto(&Ket::basis(2, 1));
        let both = Projector::new(p0.op() + p1.op()).unwrap();
        assert!(possesses(&Ket::basis(2, 0), &p0).unwrap());
        assert!(possesses(&chi, &both).unwrap());
        assert!(!possesses(&chi, &p0).unwrap());
        assert!(!possesses(&chi, &p1).unwrap());
        assert!(matches!(
            possesses(&Ket::basis(3, 0), &p0),
            Err(HilbertError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn product_form_detection() {
        let a = pauli_z();
        let lifted = a.kron(&Operator::identity(3));
        let back = left_factor(&lifted, 2, 3).unwrap().unwrap();
        assert!(back.checked_sub(&a).unwrap().max_entry() < 1e-15);
        assert!(right_factor(&lifted, 2, 3).unwrap().is_none());
        let entangled = Ket::from_real(&[1.0, 0.0, 0.0, 1.0]).unwrap().outer();
        assert!(left_factor(&entangled, 2, 2).unwrap().is_none());
        assert!(matches!(
            left_factor(&entangled, 3, 2),
            Err(HilbertError::BadSplit { .. })
        ));
    }

    #[test]
    fn rejects_non_projector_and_bad_labels() {
        assert!(matches!(
            Projector::new(pauli_x()),
            Err(HilbertError::NotProjector { .. })
        ));
        let pdi = Pdi::computational(2);
        let ps = pdi.projectors().to_vec();
        assert!(matches!(
            Pdi::new(ps.clone(), vec!["a".into()]),
            Err(HilbertError::LabelCount { .. })
        ));
        assert!(matches!(
            Pdi::new(ps, vec!["a".into(), "a".into()]),
            Err(HilbertError::DuplicateLabel(_))
        ));
    }
}
