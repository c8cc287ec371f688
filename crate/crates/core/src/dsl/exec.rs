use thiserror::Error;

use super::{Experiment, Query};
use crate::bell::{
    chsh_value, lambda_model_fixed_settings, lhv_feasibility, no_signaling_check, quantum_joint,
    BellError, ChshOperators, CorrelationData, FeasibilityReport, NoSignalingReport, SettingPair,
};
use crate::hilbert::{spectral_decompose, Pdi};
use crate::histories::{
    conditional_probability, consistency_check, family_probabilities, ConsistencyReport, Event,
    HistoryError, ProbabilityTable,
};
use crate::sampler::{sample_pdi, RunConfig, SampleResult, SamplerError};

/// Numeric contract violations met while answering a query.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QueryError {
    #[error(transparent)]
    History(#[from] HistoryError),
    #[error(transparent)]
    Bell(#[from] BellError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChshOutcome {
    pub correlations: CorrelationData,
    /// `<ψ|S|ψ>` with the standard signs.
    pub direct: f64,
    pub best_signs: [i8; 4],
    pub best_value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LhvOutcome {
    pub correlations: CorrelationData,
    pub feasibility: FeasibilityReport,
    /// Largest gap, over all four setting pairs, between the quantum joint
    /// probabilities and the fixed-setting λ-model built for that pair.
    pub lambda_max_deviation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum QueryOutcome {
    Chsh(ChshOutcome),
    Probs(ProbabilityTable),
    Consistency(ConsistencyReport),
    Conditional(f64),
    Sample(SampleResult),
    Lhv(LhvOutcome),
    NoSignal(NoSignalingReport),
}

fn chsh_ops(exp: &Experiment, ops: &[String; 4]) -> Result<ChshOperators, BellError> {
    let o = |i: usize| exp.ops[&ops[i]].clone();
    ChshOperators::new(o(0), o(1), o(2), o(3))
}

fn full_space(pdi: &Pdi, local: usize, full: usize, left: bool) -> Pdi {
    if pdi.dim() == full {
        pdi.clone()
    } else if left {
        pdi.lift_left(full / local)
    } else {
        pdi.lift_right(full / local)
    }
}

/// Answers one query against a loaded experiment.
pub fn run_query(exp: &Experiment, q: &Query) -> Result<QueryOutcome, QueryError> {
    Ok(match q {
        Query::Chsh { ops, state } => {
            let v = chsh_value(&exp.kets[state], &chsh_ops(exp, ops)?)?;
            let (best_signs, best_value) = v.correlations.best_variant();
            QueryOutcome::Chsh(ChshOutcome {
                correlations: v.correlations,
                direct: v.direct,
                best_signs,
                best_value,
            })
        }
        Query::Probs { family } => {
            QueryOutcome::Probs(family_probabilities(&exp.families[family])?)
        }
        Query::Consistency { family } => {
            QueryOutcome::Consistency(consistency_check(&exp.families[family]))
        }
        Query::Conditional {
            family,
            target,
            given,
        } => QueryOutcome::Conditional(conditional_probability(
            &exp.families[family],
            &Event::new(given.time.clone(), given.label.clone()),
            &Event::new(target.time.clone(), target.label.clone()),
        )?),
        Query::Sample {
            state,
            pdi,
            shots,
            seed,
        } => {
            let cfg = RunConfig::new(*shots, *seed)?;
            let ket = &exp.kets[state];
            let r = match exp.pdis.get(pdi) {
                Some(p) => sample_pdi(ket, &p.pdi, &p.values, cfg)?,
                None => {
                    let obs = spectral_decompose(&exp.ops[pdi]).map_err(BellError::from)?;
                    sample_pdi(ket, obs.pdi(), obs.eigenvalues(), cfg)?
                }
            };
            QueryOutcome::Sample(r)
        }
        Query::Lhv { ops, state } => {
            let ops = chsh_ops(exp, ops)?;
            let psi = &exp.kets[state];
            let v = chsh_value(psi, &ops)?;
            let mut dev = 0.0_f64;
            for s in SettingPair::all() {
                let model = lambda_model_fixed_settings(psi, &ops, s)?;
                let (m, qj) = (model.joint(s), quantum_joint(psi, &ops, s)?);
                for i in 0..2 {
                    for j in 0..2 {
                        dev = dev.max((m[i][j] - qj[i][j]).abs());
                    }
                }
            }
            QueryOutcome::Lhv(LhvOutcome {
                feasibility: lhv_feasibility(&v.correlations),
                correlations: v.correlations,
                lambda_max_deviation: dev,
            })
        }
        Query::NoSignal {
            state,
            split: (da, db),
            alice,
            bob,
            dynamics,
        } => {
            let full = da * db;
            let alice: Vec<Pdi> = alice
                .iter()
                .map(|a| full_space(&exp.pdis[a].pdi, *da, full, true))
                .collect();
            let bob = full_space(&exp.pdis[bob].pdi, *db, full, false);
            let dyn_ops = dynamics.as_ref().map(|(a, b)| (&exp.ops[a], &exp.ops[b]));
            QueryOutcome::NoSignal(no_signaling_check(
                &exp.kets[state],
                (*da, *db),
                &alice,
                &bob,
                dyn_ops,
            )?)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{load, parse_spec};

    fn run(src: &str) -> Vec<Result<QueryOutcome, QueryError>> {
        let exp = load(&parse_spec(src).unwrap()).unwrap();
        exp.queries.iter().map(|q| run_query(&exp, q)).collect()
    }

    #[test]
    fn interference_family_refuses_probabilities() {
        let src = "ket k = [1, 0, 0, 0]\n\
                   ket p = [1, 1]\nket m = [1, -1]\nop Pp = kron(proj(p), I(2))\nop Pm = kron(proj(m), I(2))\n\
                   ket z0 = [1, 0]\nket z1 = [0, 1]\n\
                   op CNOT = kron(proj(z0), I(2)) + kron(proj(z1), X)\n\
                   pdi S = {Pp, Pm}\npdi R = spectral(kron(I(2), Z))\n\
                   family F { initial k; prop 2 = CNOT; events 1 = S; events 2 = R }\n\
                   query consistency F\nquery probs F\n";
        let r = run(src);
        let Ok(QueryOutcome::Consistency(c)) = &r[0] else {
            panic!("{:?}", r[0])
        };
        assert!((c.max_offdiag - 0.25).abs() < 1e-12);
        assert!(matches!(
            r[1],
            Err(QueryError::History(HistoryError::InconsistentFamily(_)))
        ));
    }

    #[test]
    fn noncommuting_chsh_is_numeric_error() {
        let r = run("ket k = [1, 0]\nop A = X\nop B = Z\nquery chsh A B A B in k\n");
        assert!(matches!(
            r[0],
            Err(QueryError::Bell(BellError::NonCommutingAB { .. }))
        ));
    }

    #[test]
    fn nosignal_lifts_local_pdis() {
        let src = "ket s = [0, 1, -1, 0]\npdi Z2 = spectral(Z)\npdi X2 = spectral(X)\n\
                   query nosignal s split 2 2 alice Z2, X2 bob Z2\n";
        let Ok(QueryOutcome::NoSignal(r)) = &run(src)[0] else {
            panic!()
        };
        assert!(r.passes);
        assert_eq!(r.before.marginals.len(), 2);
    }
}
