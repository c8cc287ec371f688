use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};

use super::HistoryError;
use crate::hilbert::{Ket, Operator, Pdi, C64};
use crate::tolerance;

/// A history: one event label per event time `t1..tn`.
pub type History = Vec<String>;

/// Time labels `t0..tn` with the unitary propagators between them.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGrid {
    labels: Vec<String>,
    propagators: Vec<Operator>,
}

impl TimeGrid {
    /// `labels` has one more entry than `propagators`; propagator `i` maps
    /// `t_i` to `t_{i+1}`.
    pub fn new(labels: Vec<String>, propagators: Vec<Operator>) -> Result<Self, HistoryError> {
        if propagators.is_empty() {
            return Err(HistoryError::EmptyGrid);
        }
        if labels.len() != propagators.len() + 1 {
            return Err(HistoryError::TimeLabelCount {
                labels: labels.len(),
                steps: propagators.len(),
            });
        }
        let mut seen = HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(HistoryError::DuplicateTime(dup.clone()));
        }
        let dim = propagators[0].dim();
        for (index, u) in propagators.iter().enumerate() {
            if u.dim() != dim {
                return Err(HistoryError::DimensionMismatch {
                    expected: dim,
                    found: u.dim(),
                });
            }
            let defect = u.unitarity_defect();
            if defect >= tolerance::algebraic() {
                return Err(HistoryError::NotUnitary { index, defect });
            }
        }
        Ok(TimeGrid {
            labels,
            propagators,
        })
    }

    /// Grid labelled `t0, t1, ...`.
    pub fn sequential(propagators: Vec<Operator>) -> Result<Self, HistoryError> {
        let labels = (0..=propagators.len()).map(|i| format!("t{i}")).collect();
        Self::new(labels, propagators)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn propagators(&self) -> &[Operator] {
        &self.propagators
    }

    /// Number of event times after `t0`.
    pub fn steps(&self) -> usize {
        self.propagators.len()
    }

    pub fn dim(&self) -> usize {
        self.propagators[0].dim()
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Selection {
    All,
    /// Index tuples of the listed histories; the rest are lumped together.
    Explicit(Vec<Vec<usize>>),
}

/// Histories `[Ψ0] ⊙ E_1^{α1} ⊙ ... ⊙ E_n^{αn}` built from one PDI per event
/// time.
#[derive(Clone, Debug, PartialEq)]
pub struct HistoryFamily {
    grid: TimeGrid,
    initial: Ket,
    events: Vec<Pdi>,
    selection: Selection,
}

impl HistoryFamily {
    /// Family containing every combination of event labels.
    pub fn new(grid: TimeGrid, initial: Ket, events: Vec<Pdi>) -> Result<Self, HistoryError> {
        if events.len() != grid.steps() {
            return Err(HistoryError::EventCount {
                events: events.len(),
                steps: grid.steps(),
            });
        }
        let dim = grid.dim();
        if initial.dim() != dim {
            return Err(HistoryError::DimensionMismatch {
                expected: dim,
                found: initial.dim(),
            });
        }
        if let Some(bad) = events.iter().find(|p| p.dim() != dim) {
            return Err(HistoryError::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(HistoryFamily {
            grid,
            initial,
            events,
            selection: Selection::All,
        })
    }

    /// Family listing only `histories`; every other combination is kept as a
    /// single remainder element whose weight is always reported.
    pub fn with_histories(
        grid: TimeGrid,
        initial: Ket,
        events: Vec<Pdi>,
        histories: &[History],
    ) -> Result<Self, HistoryError> {
        let mut fam = Self::new(grid, initial, events)?;
        let mut seen = HashSet::new();
        let mut listed = Vec::with_capacity(histories.len());
        for h in histories {
            let idx = fam.indices_of(h)?;
            if !seen.insert(idx.clone()) {
                return Err(HistoryError::DuplicateHistory(h.clone()));
            }
            listed.push(idx);
        }
        fam.selection = Selection::Explicit(listed);
        Ok(fam)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn initial(&self) -> &Ket {
        &self.initial
    }

    pub fn events(&self) -> &[Pdi] {
        &self.events
    }

    pub fn has_remainder(&self) -> bool {
        matches!(self.selection, Selection::Explicit(_))
    }

    fn indices_of(&self, history: &[String]) -> Result<Vec<usize>, HistoryError> {
        if history.len() != self.events.len() {
            return Err(HistoryError::HistoryLength {
                expected: self.events.len(),
                found: history.len(),
            });
        }
        history
            .iter()
            .zip(&self.events)
            .enumerate()
            .map(|(t, (label, pdi))| {
                pdi.position(label)
                    .ok_or_else(|| HistoryError::UnknownLabel {
                        time: self.grid.labels[t + 1].clone(),
                        label: label.clone(),
                    })
            })
            .collect()
    }

    fn labels_of(&self, idx: &[usize]) -> History {
        idx.iter()
            .zip(&self.events)
            .map(|(&j, pdi)| pdi.labels()[j].clone())
            .collect()
    }

    /// Every index tuple of the cartesian product, last time fastest.
    fn all_index_tuples(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for pdi in &self.events {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..pdi.len()).map(move |j| {
                        let mut next = prefix.clone();
                        next.push(j);
                        next
                    })
                })
                .collect();
        }
        out
    }

    fn listed_index_tuples(&self) -> Vec<Vec<usize>> {
        match &self.selection {
            Selection::All => self.all_index_tuples(),
            Selection::Explicit(listed) => listed.clone(),
        }
    }

    /// Histories of the family in a fixed order (remainder excluded).
    pub fn histories(&self) -> Vec<History> {
        self.listed_index_tuples()
            .iter()
            .map(|idx| self.labels_of(idx))
            .collect()
    }

    fn chain_from_indices(&self, idx: &[usize]) -> DVector<C64> {
        let mut v = self.initial.amplitudes().clone();
        for ((u, pdi), &j) in self.grid.propagators.iter().zip(&self.events).zip(idx) {
            v = pdi.projectors()[j].op().matrix() * (u.matrix() * v);
        }
        v
    }

    /// `E_n^{αn} T_n ⋯ E_1^{α1} T_1 |Ψ0>`; its squared norm is the weight
    /// of the history.
    pub fn chain_vector(&self, history: &[&str]) -> Result<DVector<C64>, HistoryError> {
        let owned: History = history.iter().map(|s| s.to_string()).collect();
        let idx = self.indices_of(&owned)?;
        Ok(self.chain_from_indices(&idx))
    }

    /// Chain vectors of every combination, in `all_index_tuples` order,
    /// sharing the propagated prefix between histories.
    fn all_chain_vectors(&self) -> Vec<DVector<C64>> {
        let mut layer = vec![self.initial.amplitudes().clone()];
        for (u, pdi) in self.grid.propagators.iter().zip(&self.events) {
            layer = layer
                .iter()
                .flat_map(|v| {
                    let moved = u.matrix() * v;
                    pdi.projectors()
                        .iter()
                        .map(|p| p.op().matrix() * &moved)
                        .collect::<Vec<_>>()
                })
                .collect();
        }
        layer
    }

    /// Chain vectors of the listed histories, plus the remainder vector
    /// (sum of the chain vectors of all unlisted histories) when present.
    pub(crate) fn element_vectors(
        &self,
    ) -> (Vec<History>, Vec<DVector<C64>>, Option<DVector<C64>>) {
        let tuples = self.all_index_tuples();
        let vectors = self.all_chain_vectors();
        match &self.selection {
            Selection::All => {
                let labels = tuples.iter().map(|t| self.labels_of(t)).collect();
                (labels, vectors, None)
            }
            Selection::Explicit(listed) => {
                let dim = self.grid.dim();
                let mut rest = DVector::<C64>::zeros(dim);
                let position: std::collections::HashMap<&Vec<usize>, usize> =
                    listed.iter().enumerate().map(|(i, t)| (t, i)).collect();
                let mut chosen = vec![DVector::<C64>::zeros(dim); listed.len()];
                for (t, v) in tuples.iter().zip(vectors) {
                    match position.get(t) {
                        Some(&i) => chosen[i] = v,
                        None => rest += v,
                    }
                }
                let labels = listed.iter().map(|t| self.labels_of(t)).collect();
                (labels, chosen, Some(rest))
            }
        }
    }
}

/// Gram matrix of chain vectors and the verdict of the (medium) decoherence
/// condition.
#[derive(Clone, Debug, PartialEq)]
pub struct ConsistencyReport {
    /// Row labels of `gram`; the remainder row, if any, comes last and is
    /// not listed here.
    pub histories: Vec<History>,
    pub has_remainder: bool,
    /// `gram[(a, b)] = <K(Y^a)Ψ0, K(Y^b)Ψ0>`.
    pub gram: DMatrix<C64>,
    pub max_offdiag: f64,
    pub consistent: bool,
    pub tolerance: f64,
}

impl ConsistencyReport {
    /// Diagonal of the gram matrix: the history weights.
    pub fn weights(&self) -> Vec<f64> {
        (0..self.gram.nrows())
            .map(|i| self.gram[(i, i)].re)
            .collect()
    }

    pub fn remainder_weight(&self) -> Option<f64> {
        self.has_remainder.then(|| {
            let n = self.gram.nrows() - 1;
            self.gram[(n, n)].re
        })
    }
}

/// Computes the gram matrix over all family elements; the family is
/// consistent iff every off-diagonal entry has modulus below the algebraic
/// tolerance.
pub fn consistency_check(fam: &HistoryFamily) -> ConsistencyReport {
    let (histories, mut vectors, rest) = fam.element_vectors();
    let has_remainder = rest.is_some();
    vectors.extend(rest);
    let n = vectors.len();
    let gram = DMatrix::from_fn(n, n, |a, b| vectors[a].dotc(&vectors[b]));
    let mut max_offdiag = 0.0_f64;
    for a in 0..n {
        for b in 0..n {
            if a != b {
                max_offdiag = max_offdiag.max(gram[(a, b)].norm());
            }
        }
    }
    let tol = tolerance::algebraic();
    ConsistencyReport {
        histories,
        has_remainder,
        gram,
        max_offdiag,
        consistent: max_offdiag < tol,
        tolerance: tol,
    }
}

/// Extended-Born-rule probabilities of a consistent family.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityTable {
    pub entries: Vec<(History, f64)>,
    /// Total weight of the histories not listed explicitly.
    pub remainder: Option<f64>,
}

impl ProbabilityTable {
    pub fn get(&self, history: &[&str]) -> Option<f64> {
        self.entries
            .iter()
            .find(|(h, _)| h.iter().map(String::as_str).eq(history.iter().copied()))
            .map(|(_, p)| *p)
    }

    /// Sum over listed histories and the remainder.
    pub fn total(&self) -> f64 {
        self.entries.iter().map(|(_, p)| p).sum::<f64>() + self.remainder.unwrap_or(0.0)
    }
}

/// Probabilities `Pr(Y) = ‖K(Y)Ψ0‖²`, refused for inconsistent families.
pub fn family_probabilities(fam: &HistoryFamily) -> Result<ProbabilityTable, HistoryError> {
    let report = consistency_check(fam);
    if !report.consistent {
        return Err(HistoryError::InconsistentFamily(Box::new(report)));
    }
    let weights = report.weights();
    let entries = report
        .histories
        .iter()
        .cloned()
        .zip(weights.iter().copied())
        .collect();
    Ok(ProbabilityTable {
        entries,
        remainder: report.remainder_weight(),
    })
}

/// An event: the property labelled `label` at time `time`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    pub time: String,
    pub label: String,
}

impl Event {
    pub fn new(time: impl Into<String>, label: impl Into<String>) -> Self {
        Event {
            time: time.into(),
            label: label.into(),
        }
    }
}

fn event_position(fam: &HistoryFamily, e: &Event) -> Result<(usize, String), HistoryError> {
    let t = fam.grid.labels[1..]
        .iter()
        .position(|l| *l == e.time)
        .ok_or_else(|| HistoryError::UnknownTime(e.time.clone()))?;
    if fam.events[t].position(&e.label).is_none() {
        return Err(HistoryError::UnknownLabel {
            time: e.time.clone(),
            label: e.label.clone(),
        });
    }
    Ok((t, e.label.clone()))
}

/// `Pr(target | given)` from summed history probabilities. Works in either
/// time direction. Only listed histories contribute.
pub fn conditional_probability(
    fam: &HistoryFamily,
    given: &Event,
    target: &Event,
) -> Result<f64, HistoryError> {
    let (tg, lg) = event_position(fam, given)?;
    let (tt, lt) = event_position(fam, target)?;
    let table = family_probabilities(fam)?;
    let mut p_given = 0.0;
    let mut p_both = 0.0;
    for (h, p) in &table.entries {
        if h[tg] == lg {
            p_given += p;
            if h[tt] == lt {
                p_both += p;
            }
        }
    }
    if p_given <= tolerance::PROBABILITY {
        return Err(HistoryError::ZeroProbabilityCondition {
            probability: p_given,
        });
    }
    Ok(p_both / p_given)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{pauli_x, Projector};

    fn h(labels: &[&str]) -> History {
        labels.iter().map(|s| s.to_string()).collect()
    }

    /// Two qubits, system prepared in |0>, pointer in |0>; {[+],[-]} on the
    /// system at t1, CNOT, then the pointer read out in Z at t2.
    fn interference_family() -> HistoryFamily {
        let i2 = Operator::identity(2);
        let p0 = Projector::onto(&Ket::basis(2, 0));
        let p1 = Projector::onto(&Ket::basis(2, 1));
        let cnot = &p0.op().kron(&i2) + &p1.op().kron(&pauli_x());
        let plus = Ket::from_real(&[1.0, 1.0]).unwrap();
        let minus = Ket::from_real(&[1.0, -1.0]).unwrap();
        let pm = Pdi::new(
            vec![Projector::onto(&plus), Projector::onto(&minus)],
            vec!["+".into(), "-".into()],
        )
        .unwrap()
        .lift_left(2);
        let pointer = Pdi::computational(2).lift_right(2);
        let grid = TimeGrid::sequential(vec![i2.kron(&i2), cnot]).unwrap();
        HistoryFamily::new(grid, Ket::basis(4, 0), vec![pm, pointer]).unwrap()
    }

    #[test]
    fn interference_family_is_inconsistent() {
        // hand computation: chain vectors are |00>/2, |00>/2, |11>/2, -|11>/2
        let fam = interference_family();
        let report = consistency_check(&fam);
        assert!(!report.consistent);
        assert!((report.max_offdiag - 0.25).abs() < 1e-15);
        let g = &report.gram;
        let idx = |a: &[&str]| report.histories.iter().position(|x| *x == h(a)).unwrap();
        assert!((g[(idx(&["+", "0"]), idx(&["-", "0"]))].re - 0.25).abs() < 1e-15);
        assert!((g[(idx(&["+", "1"]), idx(&["-", "1"]))].re + 0.25).abs() < 1e-15);
        match family_probabilities(&fam) {
            Err(HistoryError::InconsistentFamily(r)) => assert_eq!(*r, report),
            other => panic!("expected InconsistentFamily, got {other:?}"),
        }
    }

    #[test]
    fn chain_vector_matches_naive_matrix_products() {
        let fam = interference_family();
        let (labels, vectors, rest) = fam.element_vectors();
        assert!(rest.is_none());
        for (l, v) in labels.iter().zip(&vectors) {
            let refs: Vec<&str> = l.iter().map(String::as_str).collect();
            let naive = fam.chain_vector(&refs).unwrap();
            assert!((v - naive).norm() < 1e-12);
        }
    }

    #[test]
    fn unknown_labels_and_bad_lengths() {
        let fam = interference_family();
        assert!(matches!(
            fam.chain_vector(&["+", "7"]),
            Err(HistoryError::UnknownLabel { .. })
        ));
        assert!(matches!(
            fam.chain_vector(&["+"]),
            Err(HistoryError::HistoryLength { .. })
        ));
    }

    #[test]
    fn explicit_subset_reports_remainder() {
        let fam = interference_family();
        let grid = fam.grid().clone();
        let sub = HistoryFamily::with_histories(
            grid,
            fam.initial().clone(),
            fam.events().to_vec(),
            &[h(&["+", "0"])],
        )
        .unwrap();
        let report = consistency_check(&sub);
        assert!(report.has_remainder);
        // rest = |00>/2 + |11>/2 - |11>/2 = |00>/2
        assert!((report.remainder_weight().unwrap() - 0.25).abs() < 1e-15);
        assert!(matches!(
            HistoryFamily::with_histories(
                sub.grid().clone(),
                sub.initial().clone(),
                sub.events().to_vec(),
                &[h(&["+", "0"]), h(&["+", "0"])]
            ),
            Err(HistoryError::DuplicateHistory(_))
        ));
    }

    #[test]
    fn grid_rejects_non_unitary() {
        let bad = Operator::from_real_rows(&[&[1.0, 0.0], &[0.0, 2.0]]).unwrap();
        assert!(matches!(
            TimeGrid::sequential(vec![bad]),
            Err(HistoryError::NotUnitary { index: 0, .. })
        ));
        assert!(matches!(
            TimeGrid::sequential(vec![]),
            Err(HistoryError::EmptyGrid)
        ));
    }

    #[test]
    fn single_time_eigenstate_history() {
        let grid = TimeGrid::sequential(vec![Operator::identity(2)]).unwrap();
        let fam = HistoryFamily::new(grid, Ket::basis(2, 1), vec![Pdi::computational(2)]).unwrap();
        let v = fam.chain_vector(&["1"]).unwrap();
        assert_eq!(&v, Ket::basis(2, 1).amplitudes());
        let table = family_probabilities(&fam).unwrap();
        assert_eq!(table.get(&["1"]), Some(1.0));
        assert_eq!(table.get(&["0"]), Some(0.0));
    }
}
