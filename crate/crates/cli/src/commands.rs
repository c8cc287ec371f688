//! Built-in demonstrations: `neon`, `epr`, `lhv-bound`, `lhv-check`.

use std::fmt::Write;

use histories_kit::bell::{
    chsh_value, collapse_conditional, correlator_from_joint, joint_probabilities,
    lhv_deterministic_bound, lhv_feasibility, neon_setup, no_signaling_check, ops_from_angles,
    sign_pdi, singlet_state, CorrelationData, FeasibilityReport, SettingPair, Witness,
    CHSH_VARIANTS,
};
use histories_kit::hilbert::{spin_zx, Operator, Pdi};
use histories_kit::sampler::{empirical_chsh, RunConfig};
use serde_json::Value;

use crate::format::{h, num, nums, obj, sig, signs_text, snap};
use crate::Failure;

pub struct Output {
    pub json: Value,
    pub human: String,
}

fn setting_key(s: SettingPair) -> String {
    format!("{}{}", s.a, s.b)
}

pub fn correlations_json(c: &CorrelationData) -> Value {
    Value::Object(
        SettingPair::all()
            .iter()
            .map(|&s| (setting_key(s), num(c.get(s))))
            .collect(),
    )
}

pub fn correlations_human(c: &CorrelationData) -> String {
    SettingPair::all()
        .iter()
        .map(|&s| format!("E{} = {}", setting_key(s), h(c.get(s))))
        .collect::<Vec<_>>()
        .join("  ")
}

pub fn feasibility_json(r: &FeasibilityReport) -> Value {
    let witness = match &r.witness {
        None => Value::Null,
        Some(Witness::OutOfRange { setting, value }) => obj([
            ("kind", "out_of_range".into()),
            ("setting", setting_key(*setting).into()),
            ("value", num(*value)),
        ]),
        Some(Witness::Violated { signs, value }) => obj([
            ("kind", "violated".into()),
            (
                "signs",
                Value::Array(signs.iter().map(|&s| s.into()).collect()),
            ),
            ("value", num(*value)),
        ]),
        Some(Witness::Mixture(parts)) => obj([
            ("kind", "mixture".into()),
            (
                "strategies",
                Value::Array(
                    parts
                        .iter()
                        .map(|(s, w)| {
                            obj([
                                ("a", Value::Array(s.a.iter().map(|&x| x.into()).collect())),
                                ("b", Value::Array(s.b.iter().map(|&x| x.into()).collect())),
                                ("weight", num(*w)),
                            ])
                        })
                        .collect(),
                ),
            ),
        ]),
    };
    obj([
        ("feasible", r.feasible.into()),
        ("max_variant", num(r.max_variant)),
        ("witness", witness),
    ])
}

/// One-line verdict, e.g. `infeasible (S=4 > 2)`.
pub fn verdict(r: &FeasibilityReport) -> String {
    match &r.witness {
        Some(Witness::OutOfRange { setting, value }) => {
            format!(
                "infeasible (|E{}|={} > 1)",
                setting_key(*setting),
                h(value.abs())
            )
        }
        Some(Witness::Violated { signs, value }) => {
            let bound = if *value > 0.0 { "> 2" } else { "< -2" };
            let variant = if *signs == CHSH_VARIANTS[0] {
                String::new()
            } else {
                format!(" for signs {}", signs_text(*signs))
            };
            format!("infeasible (S={} {bound}){variant}", h(*value))
        }
        _ if r.feasible => format!(
            "feasible (max |S| over sign variants = {} <= 2)",
            h(r.max_variant.abs())
        ),
        _ => format!(
            "infeasible (max |S| over sign variants = {})",
            h(r.max_variant.abs())
        ),
    }
}

pub fn neon(shots: u64, seed: u64) -> Result<Output, Failure> {
    let n = neon_setup();
    let cfg = RunConfig::new(shots, seed).map_err(Failure::numeric)?;
    let value = chsh_value(&n.top_eigenstate, &n.ops).map_err(Failure::numeric)?;
    let top =
        n.s.expectation(&n.top_eigenstate)
            .map_err(Failure::numeric)?
            .re;
    let sampled = empirical_chsh(&n.top_eigenstate, &n.ops, cfg).map_err(Failure::numeric)?;

    let mut eigenvalues = Vec::new();
    for (f, r) in n.spectrum.eigenvalues().iter().zip(n.spectrum.ranks()) {
        eigenvalues.extend(std::iter::repeat_n(snap(*f), r));
    }
    let amps = n.top_eigenstate.amplitudes();
    let top_re: Vec<f64> = amps.iter().map(|c| snap(c.re)).collect();
    let top_im: Vec<f64> = amps.iter().map(|c| snap(c.im)).collect();
    let bound = lhv_deterministic_bound();
    let estimates = CorrelationData::new(sampled.estimates).map_err(Failure::numeric)?;

    let json = obj([
        (
            "operators",
            obj([
                ("A0", "Z⊗I".into()),
                ("A1", "X⊗I".into()),
                ("B0", "I⊗X".into()),
                ("B1", "I⊗Z".into()),
            ]),
        ),
        ("eigenvalues", nums(&eigenvalues)),
        (
            "top_eigenstate",
            obj([("re", nums(&top_re)), ("im", nums(&top_im))]),
        ),
        ("top_expectation", num(top)),
        ("correlations", correlations_json(&value.correlations)),
        ("four_experiment_sum", num(value.correlations.chsh())),
        ("direct", num(value.direct)),
        (
            "sampled",
            obj([
                ("shots_per_setting", shots.into()),
                ("seed", seed.into()),
                ("estimates", correlations_json(&estimates)),
                ("s_hat", num(sampled.s_hat)),
                ("std_error", num(sampled.std_error)),
                (
                    "deviation_in_std_errors",
                    num((sampled.s_hat - top) / sampled.std_error),
                ),
            ]),
        ),
        ("classical_max_abs_s", bound.max_abs().into()),
    ]);

    let mut s = String::new();
    writeln!(s, "CHSH on one four-level system").unwrap();
    writeln!(s, "A0 = Z⊗I  A1 = X⊗I  B0 = I⊗X  B1 = I⊗Z").unwrap();
    let ev: Vec<String> = eigenvalues.iter().map(|&e| sig(e, 10)).collect();
    writeln!(s, "eigenvalues of S: {}", ev.join(", ")).unwrap();
    let amp: Vec<String> = top_re.iter().map(|&x| h(x)).collect();
    writeln!(s, "top eigenstate: ({})", amp.join(", ")).unwrap();
    writeln!(s, "<top|S|top> = {}", h(top)).unwrap();
    writeln!(s, "{}", correlations_human(&value.correlations)).unwrap();
    writeln!(
        s,
        "four-experiment sum = {}  direct <S> = {}",
        h(value.correlations.chsh()),
        h(value.direct)
    )
    .unwrap();
    writeln!(
        s,
        "sampled ({shots} shots per setting, seed {seed}): S_hat = {} ± {}",
        h(sampled.s_hat),
        h(sampled.std_error)
    )
    .unwrap();
    writeln!(s, "classical bound: |S| <= {}", bound.max_abs()).unwrap();
    Ok(Output { json, human: s })
}

fn local_sign_pdi(op: &Operator) -> Result<Pdi, Failure> {
    sign_pdi(op).map_err(Failure::numeric)
}

pub fn epr(alice_deg: [f64; 2], bob_deg: [f64; 2]) -> Result<Output, Failure> {
    let psi = singlet_state();
    let rad = |d: [f64; 2]| d.map(f64::to_radians);
    let (alice, bob) = (rad(alice_deg), rad(bob_deg));
    let ops = ops_from_angles(alice, bob);
    let value = chsh_value(&psi, &ops).map_err(Failure::numeric)?;
    let (s_sum, s_direct) = (snap(value.correlations.chsh()), snap(value.direct));
    let (best_signs, best) = value.correlations.best_variant();
    let feasibility = lhv_feasibility(&value.correlations);

    let alice_pdis: Vec<Pdi> = alice
        .iter()
        .map(|&t| local_sign_pdi(&spin_zx(t)))
        .collect::<Result<_, _>>()?;
    let bob_pdis: Vec<Pdi> = bob
        .iter()
        .map(|&t| local_sign_pdi(&spin_zx(t)))
        .collect::<Result<_, _>>()?;

    let mut settings = Vec::new();
    let mut human_rows = Vec::new();
    let mut collapse_dev = 0.0_f64;
    for s in SettingPair::all() {
        let (a, b) = (spin_zx(alice[s.a]), spin_zx(bob[s.b]));
        let joint_e = correlator_from_joint(&psi, &a, &b).map_err(Failure::numeric)?;
        let direct = a.kron(&b).expectation(&psi).map_err(Failure::numeric)?.re;
        let law = -(alice[s.a] - bob[s.b]).cos();
        let table = joint_probabilities(&psi, &alice_pdis[s.a], &bob_pdis[s.b])
            .map_err(Failure::numeric)?;
        for (j, pa) in alice_pdis[s.a].projectors().iter().enumerate() {
            for (k, pb) in bob_pdis[s.b].projectors().iter().enumerate() {
                let c = collapse_conditional(&psi, &pa.lift_left(2), &pb.lift_right(2))
                    .map_err(Failure::numeric)?;
                collapse_dev = collapse_dev.max((c.joint() - table.p[j][k]).abs());
            }
        }
        let rows: Vec<Value> = table.p.iter().map(|r| nums(r)).collect();
        settings.push((
            setting_key(s),
            obj([
                ("alice_deg", num(alice_deg[s.a])),
                ("bob_deg", num(bob_deg[s.b])),
                ("joint_sum", num(joint_e)),
                ("direct", num(direct)),
                ("minus_cos", num(law)),
                (
                    "outcome_labels",
                    Value::Array(
                        table
                            .alice_labels
                            .iter()
                            .map(|l| l.as_str().into())
                            .collect(),
                    ),
                ),
                ("joint", Value::Array(rows)),
            ]),
        ));
        human_rows.push(format!(
            "  E{} (A {}°, B {}°): joint {}  direct {}  -cos {}",
            setting_key(s),
            h(alice_deg[s.a]),
            h(bob_deg[s.b]),
            h(joint_e),
            h(direct),
            h(law)
        ));
    }

    let alice_full: Vec<Pdi> = alice_pdis.iter().map(|p| p.lift_left(2)).collect();
    let mut nosignal = Vec::new();
    let mut ns_max = 0.0_f64;
    for (k, bp) in bob_pdis.iter().enumerate() {
        let r = no_signaling_check(&psi, (2, 2), &alice_full, &bp.lift_right(2), None)
            .map_err(Failure::numeric)?;
        ns_max = ns_max.max(r.before.max_deviation);
        nosignal.push(obj([
            ("bob_setting", k.into()),
            (
                "marginals",
                Value::Array(r.before.marginals.iter().map(|m| nums(m)).collect()),
            ),
            ("local", nums(&r.before.local)),
            ("max_deviation", num(r.before.max_deviation)),
            ("passes", r.passes.into()),
        ]));
    }

    let json = obj([
        ("state", "singlet (|01> - |10>)/sqrt2".into()),
        ("settings", Value::Object(settings.into_iter().collect())),
        ("s", num(s_sum)),
        ("direct", num(s_direct)),
        (
            "best_variant",
            obj([
                (
                    "signs",
                    Value::Array(best_signs.iter().map(|&x| x.into()).collect()),
                ),
                ("value", num(best)),
            ]),
        ),
        ("lhv", feasibility_json(&feasibility)),
        ("collapse_max_deviation", num(collapse_dev)),
        ("no_signaling", Value::Array(nosignal)),
    ]);

    let mut s = String::new();
    writeln!(
        s,
        "singlet (|01> - |10>)/sqrt2, spin components in the z-x plane"
    )
    .unwrap();
    writeln!(s, "correlators:").unwrap();
    for r in human_rows {
        writeln!(s, "{r}").unwrap();
    }
    writeln!(s, "S = {}  direct <S> = {}", h(s_sum), h(s_direct)).unwrap();
    writeln!(
        s,
        "best sign variant {} = {}",
        signs_text(best_signs),
        h(best)
    )
    .unwrap();
    writeln!(s, "hidden variables: {}", verdict(&feasibility)).unwrap();
    writeln!(
        s,
        "collapse rule vs joint probabilities: max deviation {}",
        h(collapse_dev)
    )
    .unwrap();
    writeln!(
        s,
        "Bob marginals across Alice's settings: max deviation {}",
        h(ns_max)
    )
    .unwrap();
    Ok(Output { json, human: s })
}

pub fn lhv_bound() -> Output {
    let r = lhv_deterministic_bound();
    let strategies: Vec<Value> = r
        .strategies
        .iter()
        .map(|(st, v)| {
            obj([
                ("a", Value::Array(st.a.iter().map(|&x| x.into()).collect())),
                ("b", Value::Array(st.b.iter().map(|&x| x.into()).collect())),
                ("s", (*v).into()),
            ])
        })
        .collect();
    let json = obj([
        ("count", r.strategies.len().into()),
        ("max_s", r.max_s.into()),
        ("min_s", r.min_s.into()),
        ("max_abs_s", r.max_abs().into()),
        ("strategies", Value::Array(strategies)),
    ]);
    let mut s = String::new();
    writeln!(s, " A0 A1 B0 B1 |  S").unwrap();
    for (st, v) in &r.strategies {
        writeln!(
            s,
            " {:>2} {:>2} {:>2} {:>2} | {:>2}",
            st.a[0], st.a[1], st.b[0], st.b[1], v
        )
        .unwrap();
    }
    writeln!(
        s,
        "max |S| = {} over {} deterministic strategies",
        r.max_abs(),
        r.strategies.len()
    )
    .unwrap();
    Output { json, human: s }
}

pub fn lhv_check(e: [f64; 4]) -> Result<Output, Failure> {
    // out-of-range entries are a verdict, not an input error
    let clamped = e.map(|x| x.clamp(-1.0, 1.0));
    let corr = CorrelationData::from_flat(clamped).map_err(Failure::numeric)?;
    let mut report = lhv_feasibility(&corr);
    if let Some(i) = (0..4).find(|&i| e[i].abs() > 1.0 + 1e-9) {
        report.feasible = false;
        report.witness = Some(Witness::OutOfRange {
            setting: SettingPair::new(i / 2, i % 2),
            value: e[i],
        });
    }
    let json = obj([
        (
            "correlations",
            obj([
                ("00", num(e[0])),
                ("01", num(e[1])),
                ("10", num(e[2])),
                ("11", num(e[3])),
            ]),
        ),
        ("s", num(e[0] + e[1] + e[2] - e[3])),
        ("verdict", feasibility_json(&report)),
    ]);
    Ok(Output {
        human: format!("{}\n", verdict(&report)),
        json,
    })
}
