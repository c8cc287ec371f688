use std::fmt::Write;

use num_complex::Complex64;

use super::{Definition, EventRef, ExperimentSpec, OpExpr, PdiDef, Query};

/// `a`, `bi`, `a+bi` or `a-bi`, with plain decimal parts.
pub fn format_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        format!("{}i", c.im)
    } else if c.im < 0.0 {
        format!("{}-{}i", c.re, -c.im)
    } else {
        format!("{}+{}i", c.re, c.im)
    }
}

fn precedence(e: &OpExpr) -> u8 {
    match e {
        OpExpr::Add(..) | OpExpr::Sub(..) => 1,
        OpExpr::Mul(..) => 2,
        OpExpr::Neg(_) => 3,
        OpExpr::Scalar(c) if c.re != 0.0 && c.im != 0.0 => 1,
        OpExpr::Scalar(c) if c.re < 0.0 || c.im < 0.0 || c.re.is_sign_negative() => 3,
        _ => 4,
    }
}

fn expr_at(e: &OpExpr, min: u8, out: &mut String) {
    if precedence(e) < min {
        out.push('(');
        expr_at(e, 0, out);
        out.push(')');
        return;
    }
    match e {
        OpExpr::Name(n) => out.push_str(n),
        OpExpr::Scalar(c) => out.push_str(&format_complex(*c)),
        OpExpr::Identity(n) => write!(out, "I({n})").unwrap(),
        OpExpr::Pauli(p) => out.push(*p),
        OpExpr::Sigma(d) => write!(out, "sigma({d})").unwrap(),
        OpExpr::Kron(a, b) => {
            out.push_str("kron(");
            expr_at(a, 0, out);
            out.push_str(", ");
            expr_at(b, 0, out);
            out.push(')');
        }
        OpExpr::Proj(k) => write!(out, "proj({k})").unwrap(),
        OpExpr::Add(a, b) | OpExpr::Sub(a, b) => {
            expr_at(a, 1, out);
            out.push_str(if matches!(e, OpExpr::Add(..)) {
                " + "
            } else {
                " - "
            });
            expr_at(b, 2, out);
        }
        OpExpr::Mul(a, b) => {
            expr_at(a, 2, out);
            out.push('*');
            expr_at(b, 3, out);
        }
        OpExpr::Neg(a) => {
            out.push('-');
            expr_at(a, 3, out);
        }
    }
}

pub(crate) fn render_expr(e: &OpExpr) -> String {
    let mut s = String::new();
    expr_at(e, 0, &mut s);
    s
}

fn event(e: &EventRef) -> String {
    format!("{}:{}", e.time, e.label)
}

fn query(q: &Query) -> String {
    match q {
        Query::Chsh { ops, state } | Query::Lhv { ops, state } => {
            format!("query {} {} in {}", q.keyword(), ops.join(" "), state)
        }
        Query::Probs { family } | Query::Consistency { family } => {
            format!("query {} {}", q.keyword(), family)
        }
        Query::Conditional {
            family,
            target,
            given,
        } => {
            format!(
                "query conditional {} {} | {}",
                family,
                event(target),
                event(given)
            )
        }
        Query::Sample {
            state,
            pdi,
            shots,
            seed,
        } => {
            format!("query sample {state} {pdi} shots {shots} seed {seed}")
        }
        Query::NoSignal {
            state,
            split,
            alice,
            bob,
            dynamics,
        } => {
            let mut s = format!(
                "query nosignal {} split {} {} alice {} bob {}",
                state,
                split.0,
                split.1,
                alice.join(", "),
                bob
            );
            if let Some((a, b)) = dynamics {
                write!(s, " dynamics {a} {b}").unwrap();
            }
            s
        }
    }
}

/// Canonical text of `spec`: declarations first, then queries, one per
/// line, families expanded over several lines.
pub fn render_spec(spec: &ExperimentSpec) -> String {
    let mut out = String::new();
    for d in &spec.declarations {
        match &d.def {
            Definition::Ket(v) => {
                let parts: Vec<String> = v.iter().map(|c| format_complex(*c)).collect();
                writeln!(out, "ket {} = [{}]", d.name, parts.join(", ")).unwrap();
            }
            Definition::Op(e) => writeln!(out, "op {} = {}", d.name, render_expr(e)).unwrap(),
            Definition::Pdi(PdiDef::Spectral(e)) => {
                writeln!(out, "pdi {} = spectral({})", d.name, render_expr(e)).unwrap()
            }
            Definition::Pdi(PdiDef::Set(names)) => {
                writeln!(out, "pdi {} = {{{}}}", d.name, names.join(", ")).unwrap()
            }
            Definition::Family(f) => {
                writeln!(out, "family {} {{", d.name).unwrap();
                writeln!(out, "  initial {}", f.initial).unwrap();
                for (s, n) in &f.props {
                    writeln!(out, "  prop {s} = {n}").unwrap();
                }
                for (s, n) in &f.events {
                    writeln!(out, "  events {s} = {n}").unwrap();
                }
                out.push_str("}\n");
            }
        }
    }
    for q in &spec.queries {
        out.push_str(&query(q));
        out.push('\n');
    }
    out
}
