//! Two-party correlations: the singlet, joint probabilities, the collapse
//! rule and no-signaling.

use super::chsh::{sign_pdi, sign_value};
use super::BellError;
use crate::hilbert::{left_factor, right_factor, Ket, Operator, Pdi, Projector, C64};
use crate::tolerance;

/// `(|0>⊗|1> - |1>⊗|0>)/√2`.
pub fn singlet_state() -> Ket {
    Ket::from_real(&[0.0, 1.0, -1.0, 0.0]).expect("nonzero")
}

/// `Pr(a^j, b^k)` for local PDIs of Alice (rows) and Bob (columns).
#[derive(Clone, Debug, PartialEq)]
pub struct JointTable {
    pub alice_labels: Vec<String>,
    pub bob_labels: Vec<String>,
    pub p: Vec<Vec<f64>>,
}

impl JointTable {
    pub fn total(&self) -> f64 {
        self.p.iter().flatten().sum()
    }

    pub fn alice_marginal(&self) -> Vec<f64> {
        self.p.iter().map(|row| row.iter().sum()).collect()
    }

    pub fn bob_marginal(&self) -> Vec<f64> {
        (0..self.bob_labels.len())
            .map(|k| self.p.iter().map(|row| row[k]).sum())
            .collect()
    }
}

/// `Pr(a^j, b^k) = <ψ|[a^j] ⊗ [b^k]|ψ>` where `alice` acts on the left
/// factor and `bob` on the right one.
pub fn joint_probabilities(state: &Ket, alice: &Pdi, bob: &Pdi) -> Result<JointTable, BellError> {
    let (da, db) = (alice.dim(), bob.dim());
    if da * db != state.dim() {
        return Err(BellError::DimensionMismatch {
            expected: state.dim(),
            found: da * db,
        });
    }
    let mut p = Vec::with_capacity(alice.len());
    for a in alice.projectors() {
        let mut row = Vec::with_capacity(bob.len());
        for b in bob.projectors() {
            row.push(a.op().kron(b.op()).expectation(state)?.re);
        }
        p.push(row);
    }
    Ok(JointTable {
        alice_labels: alice.labels().to_vec(),
        bob_labels: bob.labels().to_vec(),
        p,
    })
}

/// Expectation of `a ⊗ b` for ±1-valued local observables, summed from the
/// joint outcome table.
pub fn correlator_from_joint(state: &Ket, a: &Operator, b: &Operator) -> Result<f64, BellError> {
    let pa = sign_pdi(a)?;
    let pb = sign_pdi(b)?;
    let table = joint_probabilities(state, &pa, &pb)?;
    let mut e = 0.0;
    for (j, la) in table.alice_labels.iter().enumerate() {
        for (k, lb) in table.bob_labels.iter().enumerate() {
            e += sign_value(la) * sign_value(lb) * table.p[j][k];
        }
    }
    Ok(e)
}

/// Result of conditioning on Alice's outcome via the collapsed state.
#[derive(Clone, Debug, PartialEq)]
pub struct Collapse {
    /// `[a]|ψ> / sqrt(<ψ|[a]|ψ>)`.
    pub collapsed: Ket,
    pub alice_probability: f64,
    /// `<ψ_c|[b]|ψ_c>`.
    pub conditional: f64,
}

impl Collapse {
    /// `Pr(a) · Pr(b | a)`.
    pub fn joint(&self) -> f64 {
        self.alice_probability * self.conditional
    }
}

/// Both projectors act on the full space (`[a] ⊗ I` and `I ⊗ [b]`).
pub fn collapse_conditional(
    state: &Ket,
    alice_outcome: &Projector,
    bob_event: &Projector,
) -> Result<Collapse, BellError> {
    let pa = alice_outcome.probability(state)?;
    if pa <= tolerance::PROBABILITY {
        return Err(BellError::ZeroProbabilityOutcome { probability: pa });
    }
    let v = alice_outcome.op().apply_ket(state)? / C64::new(pa.sqrt(), 0.0);
    let collapsed = Ket::from_vector(v)?;
    let conditional = bob_event.probability(&collapsed)?;
    Ok(Collapse {
        collapsed,
        alice_probability: pa,
        conditional,
    })
}

/// Bob's marginals for each of Alice's measurement choices.
#[derive(Clone, Debug, PartialEq)]
pub struct MarginalCheck {
    /// `marginals[i][k] = Σ_j Pr(a_i^j, b^k)` for Alice's PDI `i`.
    pub marginals: Vec<Vec<f64>>,
    /// Bob's Born probabilities with no reference to Alice.
    pub local: Vec<f64>,
    /// Largest pairwise disagreement among `marginals` and `local`.
    pub max_deviation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoSignalingReport {
    pub before: MarginalCheck,
    /// Same check after `T_a ⊗ T_b`, when dynamics were supplied.
    pub after: Option<MarginalCheck>,
    /// Change in Bob's marginal when `T_a` is replaced by the identity.
    pub alice_dynamics_deviation: Option<f64>,
    pub tolerance: f64,
    pub passes: bool,
}

fn check_local(pdi: &Pdi, party: &'static str, left: usize, right: usize) -> Result<(), BellError> {
    for (label, p) in pdi.iter() {
        let ok = if party == "alice" {
            left_factor(p.op(), left, right)?.is_some()
        } else {
            right_factor(p.op(), left, right)?.is_some()
        };
        if !ok {
            return Err(BellError::MalformedLocalPdi {
                party,
                label: label.to_string(),
            });
        }
    }
    Ok(())
}

fn marginal_check(state: &Ket, alice_pdis: &[Pdi], bob: &Pdi) -> Result<MarginalCheck, BellError> {
    let mut marginals = Vec::with_capacity(alice_pdis.len());
    for alice in alice_pdis {
        let mut m = vec![0.0; bob.len()];
        for a in alice.projectors() {
            for (k, b) in bob.projectors().iter().enumerate() {
                m[k] += (a.op() * b.op()).expectation(state)?.re;
            }
        }
        marginals.push(m);
    }
    let local = bob.probabilities(state)?;
    let mut max_deviation = 0.0_f64;
    let all: Vec<&Vec<f64>> = marginals.iter().chain(std::iter::once(&local)).collect();
    for (i, x) in all.iter().enumerate() {
        for y in &all[i + 1..] {
            for (u, v) in x.iter().zip(y.iter()) {
                max_deviation = max_deviation.max((u - v).abs());
            }
        }
    }
    Ok(MarginalCheck {
        marginals,
        local,
        max_deviation,
    })
}

/// Checks that Bob's outcome statistics do not depend on which PDI Alice
/// measures, optionally after independent local dynamics `T_a ⊗ T_b`.
///
/// All PDIs act on the full space `C^split.0 ⊗ C^split.1`; Alice's must have
/// the form `[a^j] ⊗ I` and Bob's `I ⊗ [b^k]`.
pub fn no_signaling_check(
    state: &Ket,
    split: (usize, usize),
    alice_pdis: &[Pdi],
    bob_pdi: &Pdi,
    dynamics: Option<(&Operator, &Operator)>,
) -> Result<NoSignalingReport, BellError> {
    let (left, right) = split;
    if left * right != state.dim() {
        return Err(BellError::DimensionMismatch {
            expected: state.dim(),
            found: left * right,
        });
    }
    for pdi in alice_pdis {
        check_local(pdi, "alice", left, right)?;
    }
    check_local(bob_pdi, "bob", left, right)?;
    let tol = tolerance::PROBABILITY;
    let before = marginal_check(state, alice_pdis, bob_pdi)?;
    let mut passes = before.max_deviation <= tol;
    let mut after = None;
    let mut alice_dynamics_deviation = None;
    if let Some((ta, tb)) = dynamics {
        for (t, d) in [(ta, left), (tb, right)] {
            if t.dim() != d {
                return Err(BellError::DimensionMismatch {
                    expected: d,
                    found: t.dim(),
                });
            }
            let defect = t.unitarity_defect();
            if defect >= tolerance::algebraic() {
                return Err(BellError::NotUnitary { defect });
            }
        }
        let evolve =
            |u: &Operator| -> Result<Ket, BellError> { Ok(Ket::from_vector(u.apply_ket(state)?)?) };
        let evolved = evolve(&ta.kron(tb))?;
        let bob_only = evolve(&Operator::identity(left).kron(tb))?;
        let check = marginal_check(&evolved, alice_pdis, bob_pdi)?;
        let reference = bob_pdi.probabilities(&bob_only)?;
        let dev = check
            .local
            .iter()
            .zip(&reference)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        passes &= check.max_deviation <= tol && dev <= tol;
        after = Some(check);
        alice_dynamics_deviation = Some(dev);
    }
    Ok(NoSignalingReport {
        before,
        after,
        alice_dynamics_deviation,
        tolerance: tol,
        passes,
    })
}
