//! The `.spec` experiment language.
//!
//! ```text
//! # comments run to the end of the line
//! ket psi = [0.7071, 0, 0, 0.7071-0.1i]
//! op A0 = kron(Z, I(2))
//! op S = A0*B0 + A0*B1 + A1*B0 - A1*B1
//! pdi P = spectral(A0)
//! pdi PZ = spectral(kron(Z, I(2)))
//! pdi Q = {P0, P1}
//! family F {
//!   initial psi
//!   prop 1 = U
//!   events 1 = P; events 2 = Q
//! }
//! query chsh A0 A1 B0 B1 in psi
//! query probs F
//! query consistency F
//! query conditional F t2:1 | t1:0
//! query sample psi P shots 1000 seed 7
//! query lhv A0 A1 B0 B1 in psi
//! query nosignal psi split 2 2 alice PA, PB bob PZ dynamics TA TB
//! ```
//!
//! Every statement sits on one line except family blocks, whose items are
//! separated by `;` or line breaks. Names must be declared before use.
//! Numbers are plain decimals; scientific notation is not accepted.
//! `sigma(deg)` is the spin component at `deg` degrees from z in the z–x
//! plane. Spectral PDIs are labelled `0, 1, …` by descending eigenvalue and
//! explicit ones by their projector names; family times are `t0 … tn`.

mod exec;
mod lexer;
mod load;
mod parser;
mod render;

use std::fmt;

use num_complex::Complex64;

pub use exec::{run_query, ChshOutcome, LhvOutcome, QueryError, QueryOutcome};
pub use load::{load, Experiment, LoadedPdi, MAX_DIM, MAX_HISTORIES, MAX_SHOTS};
pub use parser::parse_spec;
pub use render::{format_complex, render_spec};

/// Parsing stops collecting after this many errors.
pub const MAX_ERRORS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax,
    /// Unknown name, kind mismatch, duplicate name, or a definition that
    /// fails to evaluate (dimensions, validity).
    Resolution,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub token: String,
}

impl ParseError {
    pub(crate) fn new(
        kind: ErrorKind,
        line: usize,
        column: usize,
        message: impl Into<String>,
        token: impl Into<String>,
    ) -> Self {
        ParseError {
            kind,
            line,
            column,
            message: message.into(),
            token: token.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ErrorKind::Syntax => "syntax error",
            ErrorKind::Resolution => "resolution error",
        };
        write!(
            f,
            "{}:{}: {}: {}",
            self.line, self.column, kind, self.message
        )?;
        if !self.token.is_empty() {
            write!(f, " (at {:?})", self.token)?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

/// Errors of one parse or load, ordered by position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecErrors(pub Vec<ParseError>);

impl fmt::Display for SpecErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for SpecErrors {}

#[derive(Clone, Debug, PartialEq)]
pub enum OpExpr {
    Name(String),
    Scalar(Complex64),
    Identity(usize),
    Pauli(char),
    /// Degrees from z towards x.
    Sigma(f64),
    Kron(Box<OpExpr>, Box<OpExpr>),
    Proj(String),
    Add(Box<OpExpr>, Box<OpExpr>),
    Sub(Box<OpExpr>, Box<OpExpr>),
    Mul(Box<OpExpr>, Box<OpExpr>),
    Neg(Box<OpExpr>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum PdiDef {
    Spectral(OpExpr),
    Set(Vec<String>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyDef {
    pub initial: String,
    /// `(step, operator)`; unlisted steps propagate with the identity.
    pub props: Vec<(usize, String)>,
    /// `(step, pdi)` for steps `1..=n`.
    pub events: Vec<(usize, String)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Definition {
    Ket(Vec<Complex64>),
    Op(OpExpr),
    Pdi(PdiDef),
    Family(FamilyDef),
}

impl Definition {
    pub fn kind(&self) -> Kind {
        match self {
            Definition::Ket(_) => Kind::Ket,
            Definition::Op(_) => Kind::Op,
            Definition::Pdi(_) => Kind::Pdi,
            Definition::Family(_) => Kind::Family,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Ket,
    Op,
    Pdi,
    Family,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Ket => "ket",
            Kind::Op => "op",
            Kind::Pdi => "pdi",
            Kind::Family => "family",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Declaration {
    pub name: String,
    pub def: Definition,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventRef {
    pub time: String,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Query {
    Chsh {
        ops: [String; 4],
        state: String,
    },
    Probs {
        family: String,
    },
    Consistency {
        family: String,
    },
    Conditional {
        family: String,
        target: EventRef,
        given: EventRef,
    },
    /// `pdi` may also name an operator, sampled in its eigenbasis.
    Sample {
        state: String,
        pdi: String,
        shots: u64,
        seed: u64,
    },
    Lhv {
        ops: [String; 4],
        state: String,
    },
    NoSignal {
        state: String,
        split: (usize, usize),
        alice: Vec<String>,
        bob: String,
        dynamics: Option<(String, String)>,
    },
}

impl Query {
    pub fn keyword(&self) -> &'static str {
        match self {
            Query::Chsh { .. } => "chsh",
            Query::Probs { .. } => "probs",
            Query::Consistency { .. } => "consistency",
            Query::Conditional { .. } => "conditional",
            Query::Sample { .. } => "sample",
            Query::Lhv { .. } => "lhv",
            Query::NoSignal { .. } => "nosignal",
        }
    }
}

/// Parsed spec. Equality compares declarations and queries only, not
/// source positions.
#[derive(Clone, Debug, Default)]
pub struct ExperimentSpec {
    pub declarations: Vec<Declaration>,
    pub queries: Vec<Query>,
    pub(crate) decl_lines: Vec<usize>,
    pub(crate) query_lines: Vec<usize>,
}

impl PartialEq for ExperimentSpec {
    fn eq(&self, other: &Self) -> bool {
        self.declarations == other.declarations && self.queries == other.queries
    }
}

impl ExperimentSpec {
    /// Source line of declaration `i`, if the spec came from text.
    pub fn declaration_line(&self, i: usize) -> Option<usize> {
        self.decl_lines.get(i).copied()
    }

    pub fn query_line(&self, i: usize) -> Option<usize> {
        self.query_lines.get(i).copied()
    }
}
