use std::collections::HashMap;

use super::{
    Definition, ErrorKind, ExperimentSpec, FamilyDef, OpExpr, ParseError, PdiDef, Query, SpecErrors,
};
use crate::hilbert::{
    builtin_operator, spectral_decompose, spin_zx, Ket, Operator, Pdi, Projector, C64,
};
use crate::histories::{HistoryFamily, TimeGrid};

/// Largest Hilbert-space dimension a spec may build.
pub const MAX_DIM: usize = 64;
/// Largest number of histories in one family.
pub const MAX_HISTORIES: usize = 4096;
pub const MAX_SHOTS: u64 = 100_000_000;

/// A PDI with the numbers attached to its outcomes: eigenvalues for
/// spectral PDIs, outcome indices for explicit ones.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadedPdi {
    pub pdi: Pdi,
    pub values: Vec<f64>,
}

/// A spec with every declaration evaluated.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub kets: HashMap<String, Ket>,
    pub ops: HashMap<String, Operator>,
    pub pdis: HashMap<String, LoadedPdi>,
    pub families: HashMap<String, HistoryFamily>,
    pub queries: Vec<Query>,
}

enum Value {
    Scalar(C64),
    Op(Operator),
}

type LResult<T> = Result<T, String>;

impl Experiment {
    fn eval(&self, e: &OpExpr) -> LResult<Value> {
        use Value::*;
        Ok(match e {
            OpExpr::Name(n) => Op(self.ops[n].clone()),
            OpExpr::Scalar(c) => Scalar(*c),
            OpExpr::Identity(n) => {
                if *n > MAX_DIM {
                    return Err(format!("I({n}) exceeds the dimension limit {MAX_DIM}"));
                }
                Op(Operator::identity(*n))
            }
            OpExpr::Pauli(p) => Op(builtin_operator(&p.to_string()).map_err(|e| e.to_string())?),
            OpExpr::Sigma(deg) => Op(spin_zx(deg.to_radians())),
            OpExpr::Proj(k) => Op(self.kets[k].outer()),
            OpExpr::Kron(a, b) => {
                let (a, b) = (self.eval_op(a)?, self.eval_op(b)?);
                if a.dim() * b.dim() > MAX_DIM {
                    return Err(format!(
                        "kron of dimensions {} and {} exceeds the limit {MAX_DIM}",
                        a.dim(),
                        b.dim()
                    ));
                }
                Op(a.kron(&b))
            }
            OpExpr::Add(a, b) | OpExpr::Sub(a, b) => {
                let add = matches!(e, OpExpr::Add(..));
                match (self.eval(a)?, self.eval(b)?) {
                    (Scalar(x), Scalar(y)) => Scalar(if add { x + y } else { x - y }),
                    (Op(x), Op(y)) => {
                        let r = if add {
                            x.checked_add(&y)
                        } else {
                            x.checked_sub(&y)
                        };
                        Op(r.map_err(|e| e.to_string())?)
                    }
                    _ => return Err("cannot add a scalar and an operator".into()),
                }
            }
            OpExpr::Mul(a, b) => match (self.eval(a)?, self.eval(b)?) {
                (Scalar(x), Scalar(y)) => Scalar(x * y),
                (Scalar(x), Op(y)) | (Op(y), Scalar(x)) => Op(y.scale(x)),
                (Op(x), Op(y)) => Op(x.checked_mul(&y).map_err(|e| e.to_string())?),
            },
            OpExpr::Neg(a) => match self.eval(a)? {
                Scalar(x) => Scalar(-x),
                Op(x) => Op(x.scale(C64::new(-1.0, 0.0))),
            },
        })
    }

    fn eval_op(&self, e: &OpExpr) -> LResult<Operator> {
        match self.eval(e)? {
            Value::Op(op) => {
                if op.max_entry().is_finite() {
                    Ok(op)
                } else {
                    Err("operator has non-finite entries".into())
                }
            }
            Value::Scalar(_) => Err("expression is a scalar, not an operator".into()),
        }
    }

    fn pdi(&self, def: &PdiDef) -> LResult<LoadedPdi> {
        match def {
            PdiDef::Spectral(e) => {
                let obs = spectral_decompose(&self.eval_op(e)?).map_err(|e| e.to_string())?;
                Ok(LoadedPdi {
                    pdi: obs.pdi().clone(),
                    values: obs.eigenvalues().to_vec(),
                })
            }
            PdiDef::Set(names) => {
                let projectors = names
                    .iter()
                    .map(|n| Projector::new(self.ops[n].clone()).map_err(|e| format!("{n}: {e}")))
                    .collect::<LResult<Vec<_>>>()?;
                let pdi = Pdi::new(projectors, names.clone()).map_err(|e| e.to_string())?;
                Ok(LoadedPdi {
                    values: (0..pdi.len()).map(|j| j as f64).collect(),
                    pdi,
                })
            }
        }
    }

    fn family(&self, f: &FamilyDef) -> LResult<HistoryFamily> {
        let initial = self.kets[&f.initial].clone();
        let dim = initial.dim();
        let n = f.events.len();
        let mut props = vec![Operator::identity(dim); n];
        for (step, name) in &f.props {
            props[step - 1] = self.ops[name].clone();
        }
        let events: Vec<Pdi> = f
            .events
            .iter()
            .map(|(_, n)| self.pdis[n].pdi.clone())
            .collect();
        let count = events.iter().try_fold(1usize, |acc, p| {
            acc.checked_mul(p.len()).filter(|&c| c <= MAX_HISTORIES)
        });
        if count.is_none() {
            return Err(format!("family has more than {MAX_HISTORIES} histories"));
        }
        let grid = TimeGrid::sequential(props).map_err(|e| e.to_string())?;
        HistoryFamily::new(grid, initial, events).map_err(|e| e.to_string())
    }

    fn pdi_dim(&self, name: &str) -> usize {
        self.pdis
            .get(name)
            .map(|p| p.pdi.dim())
            .unwrap_or_else(|| self.ops[name].dim())
    }

    fn check_query(&self, q: &Query) -> LResult<()> {
        let same = |what: &str, a: usize, b: usize| {
            if a == b {
                Ok(())
            } else {
                Err(format!("{what}: dimension {b}, expected {a}"))
            }
        };
        match q {
            Query::Chsh { ops, state } | Query::Lhv { ops, state } => {
                let d = self.kets[state].dim();
                for o in ops {
                    same(o, d, self.ops[o].dim())?;
                }
            }
            Query::Probs { .. } | Query::Consistency { .. } => {}
            Query::Conditional {
                family,
                target,
                given,
            } => {
                let fam = &self.families[family];
                for ev in [target, given] {
                    let t = fam.grid().labels()[1..]
                        .iter()
                        .position(|l| *l == ev.time)
                        .ok_or_else(|| {
                            format!("family {family} has no event time {:?}", ev.time)
                        })?;
                    if fam.events()[t].position(&ev.label).is_none() {
                        return Err(format!("no event {:?} at time {}", ev.label, ev.time));
                    }
                }
            }
            Query::Sample {
                state, pdi, shots, ..
            } => {
                same(pdi, self.kets[state].dim(), self.pdi_dim(pdi))?;
                if *shots == 0 || *shots > MAX_SHOTS {
                    return Err(format!("shots must be between 1 and {MAX_SHOTS}"));
                }
            }
            Query::NoSignal {
                state,
                split: (da, db),
                alice,
                bob,
                dynamics,
            } => {
                let full = da.checked_mul(*db).filter(|&d| d > 0 && d <= MAX_DIM);
                let full =
                    full.ok_or_else(|| format!("split {da} x {db} is not a valid dimension pair"))?;
                same(state, full, self.kets[state].dim())?;
                for a in alice {
                    let d = self.pdis[a].pdi.dim();
                    if d != *da && d != full {
                        return Err(format!("{a}: dimension {d}, expected {da} or {full}"));
                    }
                }
                let d = self.pdis[bob].pdi.dim();
                if d != *db && d != full {
                    return Err(format!("{bob}: dimension {d}, expected {db} or {full}"));
                }
                if let Some((ta, tb)) = dynamics {
                    same(ta, *da, self.ops[ta].dim())?;
                    same(tb, *db, self.ops[tb].dim())?;
                }
            }
        }
        Ok(())
    }
}

/// Evaluates every declaration and checks the dimensions of every query.
/// Stops at the first failing declaration.
pub fn load(spec: &ExperimentSpec) -> Result<Experiment, SpecErrors> {
    let mut exp = Experiment {
        kets: HashMap::new(),
        ops: HashMap::new(),
        pdis: HashMap::new(),
        families: HashMap::new(),
        queries: spec.queries.clone(),
    };
    let fail = |line: Option<usize>, name: &str, msg: String| {
        SpecErrors(vec![ParseError::new(
            ErrorKind::Resolution,
            line.unwrap_or(0),
            1,
            msg,
            name,
        )])
    };
    for (i, d) in spec.declarations.iter().enumerate() {
        let line = spec.declaration_line(i);
        let err = |m: String| fail(line, &d.name, format!("{}: {m}", d.name));
        match &d.def {
            Definition::Ket(v) => {
                if v.len() > MAX_DIM {
                    return Err(err(format!("ket exceeds the dimension limit {MAX_DIM}")));
                }
                let k = Ket::new(v.clone()).map_err(|e| err(e.to_string()))?;
                exp.kets.insert(d.name.clone(), k);
            }
            Definition::Op(e) => {
                let op = exp.eval_op(e).map_err(err)?;
                exp.ops.insert(d.name.clone(), op);
            }
            Definition::Pdi(p) => {
                let p = exp.pdi(p).map_err(err)?;
                exp.pdis.insert(d.name.clone(), p);
            }
            Definition::Family(f) => {
                let fam = exp.family(f).map_err(err)?;
                exp.families.insert(d.name.clone(), fam);
            }
        }
    }
    for (i, q) in spec.queries.iter().enumerate() {
        exp.check_query(q).map_err(|m| {
            fail(
                spec.query_line(i),
                q.keyword(),
                format!("query {}: {m}", q.keyword()),
            )
        })?;
    }
    Ok(exp)
}
