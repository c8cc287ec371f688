//! `run`: executes every query of a spec file.

use std::fmt::Write;

use histories_kit::dsl::{render_spec, run_query, Experiment, ExperimentSpec, Query, QueryOutcome};
use histories_kit::histories::History;
use serde_json::Value;

use crate::commands::{correlations_human, correlations_json, feasibility_json, verdict, Output};
use crate::format::{h, num, nums, obj, signs_text, snap};

fn history_text(times: &[String], h: &History) -> String {
    times
        .iter()
        .zip(h)
        .map(|(t, l)| format!("{t}:{l}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn history_json(h: &History) -> Value {
    Value::Array(h.iter().map(|l| l.as_str().into()).collect())
}

fn event_times(exp: &Experiment, q: &Query) -> Vec<String> {
    match q {
        Query::Probs { family } | Query::Consistency { family } => {
            exp.families[family].grid().labels()[1..].to_vec()
        }
        _ => Vec::new(),
    }
}

fn outcome(exp: &Experiment, q: &Query, o: &QueryOutcome) -> (Value, String) {
    let times = event_times(exp, q);
    let mut s = String::new();
    let json = match o {
        QueryOutcome::Chsh(c) => {
            let (sum, direct) = (snap(c.correlations.chsh()), snap(c.direct));
            writeln!(s, "  {}", correlations_human(&c.correlations)).unwrap();
            writeln!(s, "  S = {}  direct <S> = {}", h(sum), h(direct)).unwrap();
            writeln!(
                s,
                "  best sign variant {} = {}",
                signs_text(c.best_signs),
                h(c.best_value)
            )
            .unwrap();
            obj([
                ("correlations", correlations_json(&c.correlations)),
                ("s", num(sum)),
                ("direct", num(direct)),
                (
                    "best_variant",
                    obj([
                        (
                            "signs",
                            Value::Array(c.best_signs.iter().map(|&x| x.into()).collect()),
                        ),
                        ("value", num(c.best_value)),
                    ]),
                ),
            ])
        }
        QueryOutcome::Probs(t) => {
            for (hist, p) in &t.entries {
                writeln!(s, "  {}  {}", history_text(&times, hist), h(*p)).unwrap();
            }
            if let Some(r) = t.remainder {
                writeln!(s, "  (remainder)  {}", h(r)).unwrap();
            }
            writeln!(s, "  total  {}", h(t.total())).unwrap();
            obj([
                (
                    "times",
                    Value::Array(times.iter().map(|t| t.as_str().into()).collect()),
                ),
                (
                    "histories",
                    Value::Array(
                        t.entries
                            .iter()
                            .map(|(hist, p)| {
                                obj([("history", history_json(hist)), ("probability", num(*p))])
                            })
                            .collect(),
                    ),
                ),
                ("remainder", t.remainder.map(num).unwrap_or(Value::Null)),
                ("total", num(t.total())),
            ])
        }
        QueryOutcome::Consistency(r) => {
            let verdict = if r.consistent {
                "consistent"
            } else {
                "inconsistent"
            };
            writeln!(
                s,
                "  {verdict}: max |off-diagonal| = {} (tolerance {})",
                h(r.max_offdiag),
                h(r.tolerance)
            )
            .unwrap();
            let w = r.weights();
            for (hist, x) in r.histories.iter().zip(&w) {
                writeln!(s, "  {}  weight {}", history_text(&times, hist), h(*x)).unwrap();
            }
            if let Some(x) = r.remainder_weight() {
                writeln!(s, "  (remainder)  weight {}", h(x)).unwrap();
            }
            obj([
                ("consistent", r.consistent.into()),
                ("max_offdiag", num(r.max_offdiag)),
                ("tolerance", num(r.tolerance)),
                (
                    "times",
                    Value::Array(times.iter().map(|t| t.as_str().into()).collect()),
                ),
                (
                    "weights",
                    Value::Array(
                        r.histories
                            .iter()
                            .zip(&w)
                            .map(|(hist, x)| {
                                obj([("history", history_json(hist)), ("weight", num(*x))])
                            })
                            .collect(),
                    ),
                ),
                (
                    "remainder_weight",
                    r.remainder_weight().map(num).unwrap_or(Value::Null),
                ),
            ])
        }
        QueryOutcome::Conditional(p) => {
            writeln!(s, "  {}", h(*p)).unwrap();
            obj([("probability", num(*p))])
        }
        QueryOutcome::Sample(r) => {
            for ((l, v), c) in r.labels.iter().zip(&r.values).zip(&r.counts) {
                writeln!(s, "  {l} (value {}): {c}", h(snap(*v))).unwrap();
            }
            writeln!(
                s,
                "  mean {} ± {} over {} shots",
                h(r.empirical_mean),
                h(r.std_error),
                r.shots
            )
            .unwrap();
            let Query::Sample { seed, .. } = q else {
                unreachable!()
            };
            obj([
                ("seed", (*seed).into()),
                ("shots", r.shots.into()),
                (
                    "outcomes",
                    Value::Array(
                        r.labels
                            .iter()
                            .zip(&r.values)
                            .zip(&r.counts)
                            .map(|((l, v), c)| {
                                obj([
                                    ("label", l.as_str().into()),
                                    ("value", num(snap(*v))),
                                    ("count", (*c).into()),
                                ])
                            })
                            .collect(),
                    ),
                ),
                ("empirical_mean", num(r.empirical_mean)),
                ("std_error", num(r.std_error)),
            ])
        }
        QueryOutcome::Lhv(l) => {
            writeln!(s, "  {}", correlations_human(&l.correlations)).unwrap();
            writeln!(s, "  hidden variables: {}", verdict(&l.feasibility)).unwrap();
            writeln!(
                s,
                "  fixed-setting λ-models vs quantum joints: max deviation {}",
                h(l.lambda_max_deviation)
            )
            .unwrap();
            obj([
                ("correlations", correlations_json(&l.correlations)),
                ("feasibility", feasibility_json(&l.feasibility)),
                ("lambda_model_max_deviation", num(l.lambda_max_deviation)),
            ])
        }
        QueryOutcome::NoSignal(r) => {
            let check_json = |c: &histories_kit::bell::MarginalCheck| {
                obj([
                    (
                        "marginals",
                        Value::Array(c.marginals.iter().map(|m| nums(m)).collect()),
                    ),
                    ("local", nums(&c.local)),
                    ("max_deviation", num(c.max_deviation)),
                ])
            };
            let passes = if r.passes { "holds" } else { "VIOLATED" };
            writeln!(s, "  no-signaling {passes} (tolerance {})", h(r.tolerance)).unwrap();
            for (i, m) in r.before.marginals.iter().enumerate() {
                let m: Vec<String> = m.iter().map(|&x| h(x)).collect();
                writeln!(s, "  Bob marginal, Alice PDI {}: [{}]", i + 1, m.join(", ")).unwrap();
            }
            writeln!(s, "  max deviation {}", h(r.before.max_deviation)).unwrap();
            if let Some(a) = &r.after {
                writeln!(
                    s,
                    "  after local dynamics: max deviation {}",
                    h(a.max_deviation)
                )
                .unwrap();
            }
            if let Some(d) = r.alice_dynamics_deviation {
                writeln!(s, "  effect of Alice's dynamics on Bob: {}", h(d)).unwrap();
            }
            obj([
                ("passes", r.passes.into()),
                ("tolerance", num(r.tolerance)),
                ("before", check_json(&r.before)),
                (
                    "after",
                    r.after.as_ref().map(check_json).unwrap_or(Value::Null),
                ),
                (
                    "alice_dynamics_deviation",
                    r.alice_dynamics_deviation.map(num).unwrap_or(Value::Null),
                ),
            ])
        }
    };
    (json, s)
}

/// Runs all queries; the flag is false if any query hit a numeric error.
pub fn run_spec(spec: &ExperimentSpec, exp: &Experiment) -> (Output, bool) {
    let mut only_queries = spec.clone();
    only_queries.declarations.clear();
    let rendered = render_spec(&only_queries);
    let texts: Vec<&str> = rendered
        .lines()
        .map(|l| l.trim_start_matches("query "))
        .collect();
    let mut results = Vec::new();
    let mut human = String::new();
    let mut all_ok = true;
    for (i, q) in exp.queries.iter().enumerate() {
        writeln!(human, "[{}] {}", i + 1, texts[i]).unwrap();
        let entry = match run_query(exp, q) {
            Ok(o) => {
                let (json, text) = outcome(exp, q, &o);
                human.push_str(&text);
                obj([
                    ("index", (i + 1).into()),
                    ("query", texts[i].into()),
                    ("kind", q.keyword().into()),
                    ("ok", true.into()),
                    ("result", json),
                ])
            }
            Err(e) => {
                all_ok = false;
                writeln!(human, "  error: {e}").unwrap();
                obj([
                    ("index", (i + 1).into()),
                    ("query", texts[i].into()),
                    ("kind", q.keyword().into()),
                    ("ok", false.into()),
                    ("error", e.to_string().into()),
                ])
            }
        };
        results.push(entry);
    }
    (
        Output {
            json: obj([("queries", Value::Array(results))]),
            human,
        },
        all_ok,
    )
}
