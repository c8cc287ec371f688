//! Classical hidden-variable models for the two-setting, two-outcome CHSH
//! scenario.

use super::chsh::{
    check_state, sign_pdi, sign_projector, ChshOperators, CorrelationData, SettingPair,
    CHSH_VARIANTS, MINUS, PLUS,
};
use super::BellError;
use crate::hilbert::Ket;
use crate::tolerance;

/// Hidden variable model with finitely many values of λ.
///
/// `resp_a[λ][a] = Pr(A = +1 | a, λ)` and `resp_b[λ][b] = Pr(B = +1 | b, λ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LhvModel {
    lambdas: Vec<String>,
    prior: Vec<f64>,
    resp_a: Vec<[f64; 2]>,
    resp_b: Vec<[f64; 2]>,
}

impl LhvModel {
    pub fn new(
        lambdas: Vec<String>,
        prior: Vec<f64>,
        resp_a: Vec<[f64; 2]>,
        resp_b: Vec<[f64; 2]>,
    ) -> Result<Self, BellError> {
        let n = lambdas.len();
        if n == 0 || prior.len() != n || resp_a.len() != n || resp_b.len() != n {
            return Err(BellError::InvalidModel(format!(
                "{} lambdas, {} prior entries, {}/{} response rows",
                n,
                prior.len(),
                resp_a.len(),
                resp_b.len()
            )));
        }
        if prior.iter().any(|&p| p.is_nan() || p < 0.0) {
            return Err(BellError::InvalidModel("negative prior entry".into()));
        }
        let total: f64 = prior.iter().sum();
        if (total - 1.0).abs() > tolerance::PROBABILITY {
            return Err(BellError::InvalidModel(format!("prior sums to {total}")));
        }
        if resp_a
            .iter()
            .chain(&resp_b)
            .flatten()
            .any(|&r| !(0.0..=1.0).contains(&r))
        {
            return Err(BellError::InvalidModel("response outside [0, 1]".into()));
        }
        Ok(LhvModel {
            lambdas,
            prior,
            resp_a,
            resp_b,
        })
    }

    pub fn lambdas(&self) -> &[String] {
        &self.lambdas
    }

    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    /// `Pr(A, B | a, b) = Σ_λ Pr(A|a,λ) Pr(B|b,λ) Pr(λ)`, indexed
    /// `[A][B]` with index 0 for +1 and 1 for -1.
    pub fn joint(&self, s: SettingPair) -> [[f64; 2]; 2] {
        let mut out = [[0.0; 2]; 2];
        for l in 0..self.lambdas.len() {
            let pa = self.resp_a[l][s.a];
            let pb = self.resp_b[l][s.b];
            let a = [pa, 1.0 - pa];
            let b = [pb, 1.0 - pb];
            for (i, ai) in a.iter().enumerate() {
                for (j, bj) in b.iter().enumerate() {
                    out[i][j] += ai * bj * self.prior[l];
                }
            }
        }
        out
    }

    pub fn correlator(&self, s: SettingPair) -> f64 {
        let j = self.joint(s);
        j[0][0] - j[0][1] - j[1][0] + j[1][1]
    }

    pub fn correlations(&self) -> CorrelationData {
        let mut e = [[0.0; 2]; 2];
        for s in SettingPair::all() {
            e[s.a][s.b] = self.correlator(s).clamp(-1.0, 1.0);
        }
        CorrelationData::new(e).expect("clamped")
    }
}

/// A point-mass response: fixed ±1 values for `A0, A1, B0, B1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    pub a: [i8; 2],
    pub b: [i8; 2],
}

impl DeterministicStrategy {
    /// The 16 strategies, `A0` varying slowest and +1 before -1.
    pub fn all() -> Vec<DeterministicStrategy> {
        let signs = [1i8, -1];
        let mut out = Vec::with_capacity(16);
        for a0 in signs {
            for a1 in signs {
                for b0 in signs {
                    for b1 in signs {
                        out.push(DeterministicStrategy {
                            a: [a0, a1],
                            b: [b0, b1],
                        });
                    }
                }
            }
        }
        out
    }

    /// `A0B0 + A0B1 + A1B0 - A1B1`, exactly.
    pub fn chsh(&self) -> i32 {
        let [a0, a1] = self.a.map(i32::from);
        let [b0, b1] = self.b.map(i32::from);
        a0 * b0 + a0 * b1 + a1 * b0 - a1 * b1
    }

    pub fn correlations(&self) -> CorrelationData {
        let mut e = [[0.0; 2]; 2];
        for s in SettingPair::all() {
            e[s.a][s.b] = f64::from(self.a[s.a] * self.b[s.b]);
        }
        CorrelationData::new(e).expect("entries are ±1")
    }

    /// Single-λ model reproducing this strategy.
    pub fn as_model(&self) -> LhvModel {
        let r = |v: i8| if v > 0 { 1.0 } else { 0.0 };
        LhvModel::new(
            vec!["λ".into()],
            vec![1.0],
            vec![self.a.map(r)],
            vec![self.b.map(r)],
        )
        .expect("valid")
    }
}

/// Outcome of enumerating all deterministic strategies.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub strategies: Vec<(DeterministicStrategy, i32)>,
    pub max_s: i32,
    pub min_s: i32,
    pub argmax: Vec<DeterministicStrategy>,
    pub note: &'static str,
}

impl BoundReport {
    pub fn max_abs(&self) -> i32 {
        self.max_s.abs().max(self.min_s.abs())
    }
}

pub fn lhv_deterministic_bound() -> BoundReport {
    let strategies: Vec<(DeterministicStrategy, i32)> = DeterministicStrategy::all()
        .into_iter()
        .map(|s| (s, s.chsh()))
        .collect();
    let max_s = strategies.iter().map(|(_, v)| *v).max().unwrap();
    let min_s = strategies.iter().map(|(_, v)| *v).min().unwrap();
    let argmax = strategies
        .iter()
        .filter(|(_, v)| *v == max_s)
        .map(|(s, _)| *s)
        .collect();
    BoundReport {
        strategies,
        max_s,
        min_s,
        argmax,
        note: "any hidden-variable model is a convex mixture of these strategies, \
               so its average S lies in [min_s, max_s]",
    }
}

/// Labels of the four λ values, in `(p, q)` order.
pub const LAMBDA_LABELS: [&str; 4] = ["++", "+-", "-+", "--"];

/// Hidden-variable model valid for one setting pair only: λ = pq ranges over
/// the common refinement of the sign PDIs of `A_a` and `B_b`,
/// `Pr(λ = pq) = <ψ|P_p Q_q|ψ>`, and the responses are deterministic,
/// `Pr(P_p | p'q) = δ_pp'`.
///
/// The response tables are filled for both settings with the same
/// deterministic rule, so the model reproduces quantum joints at `s` only.
pub fn lambda_model_fixed_settings(
    state: &Ket,
    ops: &ChshOperators,
    s: SettingPair,
) -> Result<LhvModel, BellError> {
    check_state(state, ops.dim())?;
    let pa = sign_pdi(ops.alice(s.a))?;
    let pb = sign_pdi(ops.bob(s.b))?;
    let mut prior = Vec::with_capacity(4);
    let mut resp_a = Vec::with_capacity(4);
    let mut resp_b = Vec::with_capacity(4);
    for p in [PLUS, MINUS] {
        for q in [PLUS, MINUS] {
            let pp = sign_projector(&pa, p);
            let qq = sign_projector(&pb, q);
            // commuting projectors: <ψ|PQ|ψ> = ‖PQψ‖²
            let v = (pp.op() * qq.op()).apply_ket(state)?;
            prior.push(v.norm_squared());
            let ra = if p == PLUS { 1.0 } else { 0.0 };
            let rb = if q == PLUS { 1.0 } else { 0.0 };
            resp_a.push([ra, ra]);
            resp_b.push([rb, rb]);
        }
    }
    let total: f64 = prior.iter().sum();
    for p in &mut prior {
        *p /= total;
    }
    LhvModel::new(
        LAMBDA_LABELS.iter().map(|s| s.to_string()).collect(),
        prior,
        resp_a,
        resp_b,
    )
}

/// Quantum joint probabilities `<ψ|P_p Q_q|ψ>` for one setting pair,
/// indexed `[p][q]` with 0 for +1.
pub fn quantum_joint(
    state: &Ket,
    ops: &ChshOperators,
    s: SettingPair,
) -> Result<[[f64; 2]; 2], BellError> {
    check_state(state, ops.dim())?;
    let pa = sign_pdi(ops.alice(s.a))?;
    let pb = sign_pdi(ops.bob(s.b))?;
    let mut out = [[0.0; 2]; 2];
    for (i, p) in [PLUS, MINUS].into_iter().enumerate() {
        for (j, q) in [PLUS, MINUS].into_iter().enumerate() {
            let prod = sign_projector(&pa, p).op() * sign_projector(&pb, q).op();
            out[i][j] = prod.expectation(state)?.re;
        }
    }
    Ok(out)
}

/// Evidence accompanying a feasibility verdict.
#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    /// A correlator outside [-1, 1].
    OutOfRange { setting: SettingPair, value: f64 },
    /// A CHSH sign variant exceeding 2 in magnitude.
    Violated { signs: [i8; 4], value: f64 },
    /// Weights over deterministic strategies reproducing the correlators.
    Mixture(Vec<(DeterministicStrategy, f64)>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeasibilityReport {
    pub feasible: bool,
    /// Signed value of the sign variant of largest magnitude.
    pub max_variant: f64,
    pub variants: Vec<([i8; 4], f64)>,
    pub witness: Option<Witness>,
}

const FEASIBILITY_SLACK: f64 = 1e-9;

/// Decides whether a single distribution over deterministic strategies can
/// reproduce all four correlators.
///
/// The eight CHSH sign variants bounded by 2, with `|E| ≤ 1`, characterize
/// the correlator polytope. When feasible, an explicit mixture over
/// deterministic strategies is attached.
pub fn lhv_feasibility(corr: &CorrelationData) -> FeasibilityReport {
    let variants: Vec<([i8; 4], f64)> = CHSH_VARIANTS
        .iter()
        .map(|&s| (s, corr.variant(s)))
        .collect();
    let (best_signs, max_variant) = corr.best_variant();
    for s in SettingPair::all() {
        let value = corr.get(s);
        if value.abs() > 1.0 + FEASIBILITY_SLACK {
            return FeasibilityReport {
                feasible: false,
                max_variant,
                variants,
                witness: Some(Witness::OutOfRange { setting: s, value }),
            };
        }
    }
    if max_variant.abs() > 2.0 + FEASIBILITY_SLACK {
        return FeasibilityReport {
            feasible: false,
            max_variant,
            variants,
            witness: Some(Witness::Violated {
                signs: best_signs,
                value: max_variant,
            }),
        };
    }
    FeasibilityReport {
        feasible: true,
        max_variant,
        variants,
        witness: find_mixture(corr).map(Witness::Mixture),
    }
}

/// Orthogonal ±1 directions; the correlator polytope's eight vertices are
/// exactly `±AXES[i]`.
const AXES: [[f64; 4]; 4] = [
    [1.0, 1.0, 1.0, 1.0],
    [1.0, 1.0, -1.0, -1.0],
    [1.0, -1.0, 1.0, -1.0],
    [1.0, -1.0, -1.0, 1.0],
];

fn strategy_with(correlations: [f64; 4]) -> DeterministicStrategy {
    DeterministicStrategy::all()
        .into_iter()
        .find(|s| s.correlations().flat() == correlations)
        .expect("every signed axis is a vertex")
}

/// Convex weights over vertices. The polytope is a cross-polytope, so the
/// target's coordinates along `AXES` give the weights directly; any slack
/// is split evenly between `+AXES[0]` and `-AXES[0]`.
fn find_mixture(corr: &CorrelationData) -> Option<Vec<(DeterministicStrategy, f64)>> {
    let target = corr.flat();
    let coords: Vec<f64> = AXES
        .iter()
        .map(|u| u.iter().zip(&target).map(|(a, b)| a * b).sum::<f64>() / 4.0)
        .collect();
    let l1: f64 = coords.iter().map(|c| c.abs()).sum();
    if l1 > 1.0 + FEASIBILITY_SLACK {
        return None;
    }
    let scale = l1.max(1.0);
    let slack = (1.0 - l1 / scale) / 2.0;
    let mut parts: Vec<(DeterministicStrategy, f64)> = Vec::new();
    let mut add = |v: [f64; 4], w: f64| {
        if w <= 0.0 {
            return;
        }
        let st = strategy_with(v);
        match parts.iter_mut().find(|(s, _)| *s == st) {
            Some((_, x)) => *x += w,
            None => parts.push((st, w)),
        }
    };
    for (u, c) in AXES.iter().zip(&coords) {
        let sign = if *c < 0.0 { -1.0 } else { 1.0 };
        add(u.map(|x| sign * x), c.abs() / scale);
    }
    add(AXES[0], slack);
    add(AXES[0].map(|x| -x), slack);
    Some(parts)
}
