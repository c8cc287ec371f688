//! Unitary model of a projective measurement and its three standard
//! frameworks.

use nalgebra::DMatrix;

use super::family::{History, HistoryFamily, TimeGrid};
use super::HistoryError;
use crate::hilbert::{Ket, Observable, Operator, Pdi, Projector, C64};
use crate::tolerance;

/// Label of the pointer projector covering the ready state and any unused
/// pointer positions.
pub const REST_LABEL: &str = "rest";

/// System ⊗ pointer, with a controlled pointer shift `T` taking
/// `(eigenspace j) ⊗ |Φ0>` to `(eigenspace j) ⊗ |Φ_{j+1}>`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementModel {
    observable: Observable,
    system_dim: usize,
    pointer_dim: usize,
    unitary: Operator,
    pointer_pdi: Pdi,
}

/// Cyclic shift `|m> -> |m + 1 mod d>`.
fn pointer_shift(d: usize, power: usize) -> Operator {
    let mat = DMatrix::from_fn(d, d, |row, col| {
        if row == (col + power) % d {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Operator::from_matrix(mat).expect("square")
}

/// Builds the measurement model for `f` with a pointer of `pointer_dim`
/// positions: the ready state `Φ0` plus one position per outcome, any extra
/// positions idle.
pub fn build_measurement_model(
    f: &Observable,
    pointer_dim: usize,
) -> Result<MeasurementModel, HistoryError> {
    let outcomes = f.eigenvalues().len();
    if pointer_dim <= outcomes {
        return Err(HistoryError::PointerTooSmall {
            pointer_dim,
            outcomes,
        });
    }
    let system_dim = f.dim();
    let full = system_dim * pointer_dim;
    let mut t = DMatrix::<C64>::zeros(full, full);
    for (j, p) in f.pdi().projectors().iter().enumerate() {
        t += p.op().kron(&pointer_shift(pointer_dim, j + 1)).matrix();
    }
    let unitary = Operator::from_matrix(t)?;

    let ident = Operator::identity(system_dim);
    let mut projectors = Vec::with_capacity(outcomes + 1);
    let mut labels = Vec::with_capacity(outcomes + 1);
    for (k, label) in f.pdi().labels().iter().enumerate() {
        let phi = Ket::basis(pointer_dim, k + 1);
        projectors.push(Projector::onto(&phi).lift_right(system_dim));
        labels.push(label.clone());
    }
    let mut rest = Projector::onto(&Ket::basis(pointer_dim, 0)).into_operator();
    for m in outcomes + 1..pointer_dim {
        rest = &rest + &Ket::basis(pointer_dim, m).outer();
    }
    projectors.push(Projector::new(ident.kron(&rest))?);
    labels.push(REST_LABEL.to_string());
    let pointer_pdi = Pdi::new(projectors, labels)?;

    let model = MeasurementModel {
        observable: f.clone(),
        system_dim,
        pointer_dim,
        unitary,
        pointer_pdi,
    };
    let defect = model.verification_defect();
    if defect >= tolerance::algebraic() {
        return Err(HistoryError::VerificationFailed { defect });
    }
    Ok(model)
}

impl MeasurementModel {
    pub fn observable(&self) -> &Observable {
        &self.observable
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn pointer_dim(&self) -> usize {
        self.pointer_dim
    }

    pub fn full_dim(&self) -> usize {
        self.system_dim * self.pointer_dim
    }

    pub fn unitary(&self) -> &Operator {
        &self.unitary
    }

    pub fn pointer_pdi(&self) -> &Pdi {
        &self.pointer_pdi
    }

    /// Pointer ket `|Φ_m>`; `m = 0` is the ready state.
    pub fn pointer_state(&self, m: usize) -> Ket {
        Ket::basis(self.pointer_dim, m)
    }

    pub fn ready_state(&self) -> Ket {
        self.pointer_state(0)
    }

    /// Largest violation of `M^k T (P^j ⊗ [Φ0]) = δ_jk T (P^j ⊗ [Φ0])`,
    /// and of unitarity of `T`.
    pub fn verification_defect(&self) -> f64 {
        let ready = Projector::onto(&self.ready_state());
        let mut worst = self.unitary.unitarity_defect();
        for (j, p) in self.observable.pdi().projectors().iter().enumerate() {
            let image = &self.unitary * &p.op().kron(ready.op());
            for (k, m) in self.pointer_pdi.projectors().iter().enumerate() {
                let lhs = m.op() * &image;
                let rhs = if j == k {
                    image.clone()
                } else {
                    Operator::zeros(image.dim())
                };
                worst = worst.max((&lhs - &rhs).max_entry());
            }
        }
        worst
    }

    /// `|ψ0> ⊗ |Φ0>`.
    pub fn initial_state(&self, psi0: &Ket) -> Result<Ket, HistoryError> {
        if psi0.dim() != self.system_dim {
            return Err(HistoryError::DimensionMismatch {
                expected: self.system_dim,
                found: psi0.dim(),
            });
        }
        Ok(psi0.kron(&self.ready_state()))
    }

    /// `|Ψ2> = T |Ψ0>`.
    pub fn final_state(&self, psi0: &Ket) -> Result<Ket, HistoryError> {
        let psi = self.initial_state(psi0)?;
        Ok(Ket::from_vector(self.unitary.apply_ket(&psi)?)?)
    }

    /// Pointer outcome probabilities `<Ψ2|M^k|Ψ2>` in pointer-PDI order
    /// (outcomes first, then the rest projector).
    pub fn outcome_probabilities(&self, psi0: &Ket) -> Result<Vec<f64>, HistoryError> {
        Ok(self.pointer_pdi.probabilities(&self.final_state(psi0)?)?)
    }

    fn grid(&self) -> TimeGrid {
        TimeGrid::sequential(vec![
            Operator::identity(self.full_dim()),
            self.unitary.clone(),
        ])
        .expect("identity and a verified unitary")
    }
}

/// The unitary framework and the two measurement frameworks for one
/// preparation.
#[derive(Clone, Debug, PartialEq)]
pub struct StandardFamilies {
    /// Single history `[Ψ0] ⊙ [Ψ0] ⊙ [Ψ2]`.
    pub unitary: HistoryFamily,
    /// `[Ψ0] ⊙ [ψ0] ⊙ M^k`.
    pub f1: HistoryFamily,
    /// `[Ψ0] ⊙ [φ^j] ⊙ M^k`.
    pub f2: HistoryFamily,
}

pub const PSI0_LABEL: &str = "psi0";
pub const INITIAL_LABEL: &str = "Psi0";
pub const FINAL_LABEL: &str = "Psi2";

/// Builds the three frameworks. Histories through complement events are
/// carried in each family's remainder, where their (zero) weight is
/// reported.
pub fn standard_families(
    model: &MeasurementModel,
    psi0: &Ket,
) -> Result<StandardFamilies, HistoryError> {
    let initial = model.initial_state(psi0)?;
    let final_state = model.final_state(psi0)?;
    let grid = model.grid();

    let unitary = HistoryFamily::with_histories(
        grid.clone(),
        initial.clone(),
        vec![
            Pdi::ket_and_complement(&initial, INITIAL_LABEL),
            Pdi::ket_and_complement(&final_state, FINAL_LABEL),
        ],
        &[vec![INITIAL_LABEL.to_string(), FINAL_LABEL.to_string()]],
    )?;

    let pointer = model.pointer_pdi().clone();
    let f1_histories: Vec<History> = pointer
        .labels()
        .iter()
        .map(|k| vec![PSI0_LABEL.to_string(), k.clone()])
        .collect();
    let f1 = HistoryFamily::with_histories(
        grid.clone(),
        initial.clone(),
        vec![
            Pdi::ket_and_complement(psi0, PSI0_LABEL).lift_left(model.pointer_dim()),
            pointer.clone(),
        ],
        &f1_histories,
    )?;

    let f2 = HistoryFamily::new(
        grid,
        initial,
        vec![
            model.observable().pdi().lift_left(model.pointer_dim()),
            pointer,
        ],
    )?;
    Ok(StandardFamilies { unitary, f1, f2 })
}
