use std::collections::HashMap;

use num_complex::Complex64;

use super::lexer::{tokenize, Tok, Token};
use super::{
    Declaration, Definition, ErrorKind, EventRef, ExperimentSpec, FamilyDef, Kind, OpExpr,
    ParseError, PdiDef, Query, SpecErrors, MAX_ERRORS,
};

const MAX_DEPTH: usize = 64;
const RESERVED: [&str; 7] = ["I", "X", "Y", "Z", "kron", "proj", "sigma"];
const TOP_LEVEL: [&str; 5] = ["ket", "op", "pdi", "family", "query"];

type PResult<T> = Result<T, ParseError>;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    names: HashMap<String, Kind>,
    depth: usize,
    in_family: bool,
}

/// Parses and resolves `source`. Forward references are errors.
///
/// Each line reports at most its first error; after an error the parser
/// resumes at the next line (or after the enclosing family block), and gives
/// up after [`MAX_ERRORS`] errors.
pub fn parse_spec(source: &str) -> Result<ExperimentSpec, SpecErrors> {
    let (toks, lex_errors) = tokenize(source);
    let mut p = Parser {
        toks,
        pos: 0,
        names: HashMap::new(),
        depth: 0,
        in_family: false,
    };
    let mut spec = ExperimentSpec::default();
    let mut errors = lex_errors;
    loop {
        p.skip_newlines();
        if p.peek() == &Tok::Eof || errors.len() > 2 * MAX_ERRORS {
            break;
        }
        let line = p.toks[p.pos].line;
        let mut pending = None;
        match p.statement(&mut pending) {
            Ok(Stmt::Decl(d)) => {
                spec.declarations.push(d);
                spec.decl_lines.push(line);
            }
            Ok(Stmt::Query(q)) => {
                spec.queries.push(q);
                spec.query_lines.push(line);
            }
            Err(e) => {
                errors.push(e);
                p.recover();
            }
        }
        // a failed declaration still defines its name, to avoid cascades
        if let Some((name, kind)) = pending {
            p.names.entry(name).or_insert(kind);
        }
    }
    if errors.is_empty() {
        return Ok(spec);
    }
    errors.sort_by_key(|e| (e.line, e.column));
    errors.dedup_by_key(|e| e.line);
    errors.truncate(MAX_ERRORS);
    Err(SpecErrors(errors))
}

enum Stmt {
    Decl(Declaration),
    Query(Query),
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn skip_newlines(&mut self) {
        while self.peek() == &Tok::Newline {
            self.pos += 1;
        }
    }

    fn error_here(&self, kind: ErrorKind, message: impl Into<String>) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError::new(kind, t.line, t.column, message, t.tok.text())
    }

    fn syntax(&self, message: impl Into<String>) -> ParseError {
        self.error_here(ErrorKind::Syntax, message)
    }

    fn recover(&mut self) {
        let family = self.in_family;
        self.in_family = false;
        while !matches!(self.peek(), Tok::Newline | Tok::Eof) {
            if family && self.peek() == &Tok::Sym('}') {
                self.bump();
                break;
            }
            self.bump();
        }
        if !family {
            return;
        }
        // skip the rest of an unterminated family block
        let start = self.pos;
        loop {
            self.skip_newlines();
            match self.peek() {
                Tok::Eof => break,
                Tok::Ident(s) if TOP_LEVEL.contains(&s.as_str()) => break,
                _ => {}
            }
            let mut closed = false;
            while !matches!(self.peek(), Tok::Newline | Tok::Eof) {
                closed |= self.bump().tok == Tok::Sym('}');
            }
            if closed {
                break;
            }
        }
        debug_assert!(self.pos >= start);
    }

    fn expect_sym(&mut self, c: char) -> PResult<()> {
        if self.peek() == &Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.syntax(format!("expected '{c}'")))
        }
    }

    fn expect_word(&mut self, w: &str) -> PResult<()> {
        match self.peek() {
            Tok::Ident(s) if s == w => {
                self.bump();
                Ok(())
            }
            _ => Err(self.syntax(format!("expected '{w}'"))),
        }
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.syntax(format!("expected {what}"))),
        }
    }

    /// A reference to an earlier declaration of one of `kinds`.
    fn reference(&mut self, kinds: &[Kind]) -> PResult<String> {
        let what = kinds
            .iter()
            .map(|k| k.to_string())
            .collect::<Vec<_>>()
            .join(" or ");
        let at = self.pos;
        let name = self.ident(&format!("{what} name"))?;
        let err = |p: &Self, msg: String| {
            let t = &p.toks[at];
            ParseError::new(ErrorKind::Resolution, t.line, t.column, msg, name.clone())
        };
        match self.names.get(&name) {
            None => Err(err(self, format!("unknown name {name:?}"))),
            Some(k) if !kinds.contains(k) => {
                Err(err(self, format!("{name:?} is a {k}, expected {what}")))
            }
            Some(_) => Ok(name),
        }
    }

    fn integer(&mut self, what: &str) -> PResult<u64> {
        match self.peek().clone() {
            Tok::Number(s) if !s.contains('.') => match s.parse::<u64>() {
                Ok(v) => {
                    self.bump();
                    Ok(v)
                }
                Err(_) => Err(self.syntax(format!("{what} out of range"))),
            },
            _ => Err(self.syntax(format!("expected {what}"))),
        }
    }

    fn small_integer(&mut self, what: &str) -> PResult<usize> {
        let at = self.pos;
        let v = self.integer(what)?;
        usize::try_from(v).map_err(|_| {
            self.pos = at;
            self.syntax(format!("{what} out of range"))
        })
    }

    fn real(&mut self, text: &str) -> PResult<f64> {
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(self.syntax("number out of range")),
        }
    }

    fn end_of_line(&mut self) -> PResult<()> {
        match self.peek() {
            Tok::Newline | Tok::Eof => Ok(()),
            _ => Err(self.syntax("expected end of line")),
        }
    }

    fn statement(&mut self, pending: &mut Option<(String, Kind)>) -> PResult<Stmt> {
        let kw = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return Err(self.syntax("expected a declaration or query")),
        };
        let kind = match kw.as_str() {
            "ket" => Kind::Ket,
            "op" => Kind::Op,
            "pdi" => Kind::Pdi,
            "family" => Kind::Family,
            "query" => {
                self.bump();
                let q = self.query()?;
                self.end_of_line()?;
                return Ok(Stmt::Query(q));
            }
            _ => return Err(self.syntax(format!("unknown statement {kw:?}"))),
        };
        self.bump();
        let at = self.pos;
        let name = self.ident("a name")?;
        if RESERVED.contains(&name.as_str()) || TOP_LEVEL.contains(&name.as_str()) {
            self.pos = at;
            return Err(self.syntax(format!("{name:?} is reserved")));
        }
        if self.names.contains_key(&name) {
            self.pos = at;
            return Err(self.error_here(
                ErrorKind::Resolution,
                format!("{name:?} is already declared"),
            ));
        }
        *pending = Some((name.clone(), kind));
        let def = match kind {
            Kind::Ket => {
                self.expect_sym('=')?;
                Definition::Ket(self.vector()?)
            }
            Kind::Op => {
                self.expect_sym('=')?;
                Definition::Op(self.expr()?)
            }
            Kind::Pdi => {
                self.expect_sym('=')?;
                Definition::Pdi(self.pdi_def()?)
            }
            Kind::Family => Definition::Family(self.family_body()?),
        };
        self.end_of_line()?;
        Ok(Stmt::Decl(Declaration { name, def }))
    }

    fn complex(&mut self) -> PResult<Complex64> {
        let sign = if self.peek() == &Tok::Sym('-') {
            self.bump();
            -1.0
        } else {
            1.0
        };
        match self.peek().clone() {
            Tok::Imag(b) => {
                self.bump();
                Ok(Complex64::new(0.0, sign * self.real(&b)?))
            }
            Tok::Number(a) => {
                self.bump();
                let re = sign * self.real(&a)?;
                let im_sign = match (self.peek(), self.peek_at(1)) {
                    (Tok::Sym('+'), Tok::Imag(_)) => 1.0,
                    (Tok::Sym('-'), Tok::Imag(_)) => -1.0,
                    _ => return Ok(Complex64::new(re, 0.0)),
                };
                self.bump();
                let Tok::Imag(b) = self.bump().tok else {
                    unreachable!()
                };
                Ok(Complex64::new(re, im_sign * self.real(&b)?))
            }
            _ => Err(self.syntax("expected a complex number")),
        }
    }

    fn vector(&mut self) -> PResult<Vec<Complex64>> {
        self.expect_sym('[')?;
        let mut out = vec![self.complex()?];
        while self.peek() == &Tok::Sym(',') {
            self.bump();
            out.push(self.complex()?);
        }
        self.expect_sym(']')?;
        Ok(out)
    }

    fn pdi_def(&mut self) -> PResult<PdiDef> {
        match self.peek() {
            Tok::Ident(s) if s == "spectral" => {
                self.bump();
                Ok(PdiDef::Spectral(self.call(|p| p.expr())?))
            }
            Tok::Sym('{') => {
                self.bump();
                let mut names = vec![self.reference(&[Kind::Op])?];
                while self.peek() == &Tok::Sym(',') {
                    self.bump();
                    names.push(self.reference(&[Kind::Op])?);
                }
                self.expect_sym('}')?;
                Ok(PdiDef::Set(names))
            }
            _ => Err(self.syntax("expected 'spectral(' or '{'")),
        }
    }

    fn family_body(&mut self) -> PResult<FamilyDef> {
        self.expect_sym('{')?;
        self.in_family = true;
        let mut initial = None;
        let mut props: Vec<(usize, String)> = Vec::new();
        let mut events: Vec<(usize, String)> = Vec::new();
        loop {
            while matches!(self.peek(), Tok::Newline | Tok::Sym(';')) {
                self.bump();
            }
            let at = self.pos;
            match self.peek().clone() {
                Tok::Sym('}') => break,
                Tok::Ident(w) if w == "initial" => {
                    self.bump();
                    if initial.is_some() {
                        self.pos = at;
                        return Err(self.syntax("initial state given twice"));
                    }
                    initial = Some(self.reference(&[Kind::Ket])?);
                }
                Tok::Ident(w) if w == "prop" || w == "events" => {
                    self.bump();
                    let step_at = self.pos;
                    let step = self.small_integer("a step number")?;
                    if step == 0 {
                        self.pos = step_at;
                        return Err(self.syntax("steps are numbered from 1"));
                    }
                    self.expect_sym('=')?;
                    let list = if w == "prop" { &mut props } else { &mut events };
                    if list.iter().any(|(s, _)| *s == step) {
                        self.pos = step_at;
                        return Err(self.syntax(format!("{w} {step} given twice")));
                    }
                    let kind = if w == "prop" { Kind::Op } else { Kind::Pdi };
                    let name = self.reference(&[kind])?;
                    let list = if w == "prop" { &mut props } else { &mut events };
                    list.push((step, name));
                }
                _ => return Err(self.syntax("expected 'initial', 'prop', 'events' or '}'")),
            }
            if !matches!(self.peek(), Tok::Newline | Tok::Sym(';') | Tok::Sym('}')) {
                return Err(self.syntax("expected ';', end of line or '}'"));
            }
        }
        let Some(initial) = initial else {
            return Err(self.syntax("family needs an initial state"));
        };
        props.sort();
        events.sort();
        let n = events.len();
        if n == 0 || events.iter().enumerate().any(|(i, (s, _))| *s != i + 1) {
            return Err(self.syntax("events must cover steps 1..n"));
        }
        if props.iter().any(|(s, _)| *s > n) {
            return Err(self.syntax(format!("prop step beyond the last event step {n}")));
        }
        self.bump();
        self.in_family = false;
        Ok(FamilyDef {
            initial,
            props,
            events,
        })
    }

    fn nested<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        if self.depth >= MAX_DEPTH {
            return Err(self.syntax("expression nested too deeply"));
        }
        self.depth += 1;
        let r = f(self);
        self.depth -= 1;
        r
    }

    fn expr(&mut self) -> PResult<OpExpr> {
        self.nested(|p| {
            let mut lhs = p.term()?;
            loop {
                match p.peek() {
                    Tok::Sym('+') => {
                        p.bump();
                        lhs = OpExpr::Add(Box::new(lhs), Box::new(p.term()?));
                    }
                    Tok::Sym('-') => {
                        p.bump();
                        lhs = OpExpr::Sub(Box::new(lhs), Box::new(p.term()?));
                    }
                    _ => return Ok(lhs),
                }
            }
        })
    }

    fn term(&mut self) -> PResult<OpExpr> {
        let mut lhs = self.unary()?;
        while self.peek() == &Tok::Sym('*') {
            self.bump();
            lhs = OpExpr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<OpExpr> {
        if self.peek() == &Tok::Sym('-') {
            self.bump();
            return self.nested(|p| Ok(OpExpr::Neg(Box::new(p.unary()?))));
        }
        self.atom()
    }

    fn call<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        self.expect_sym('(')?;
        let v = f(self)?;
        self.expect_sym(')')?;
        Ok(v)
    }

    fn atom(&mut self) -> PResult<OpExpr> {
        match self.peek().clone() {
            Tok::Number(a) => {
                self.bump();
                Ok(OpExpr::Scalar(Complex64::new(self.real(&a)?, 0.0)))
            }
            Tok::Imag(b) => {
                self.bump();
                Ok(OpExpr::Scalar(Complex64::new(0.0, self.real(&b)?)))
            }
            Tok::Sym('(') => self.call(|p| p.expr()),
            Tok::Ident(w) => {
                self.bump();
                match w.as_str() {
                    "X" | "Y" | "Z" => Ok(OpExpr::Pauli(w.chars().next().unwrap())),
                    "I" => {
                        let at = self.pos + 1;
                        let n = self.call(|p| p.small_integer("a dimension"))?;
                        if n == 0 {
                            self.pos = at;
                            return Err(self.syntax("dimension must be positive"));
                        }
                        Ok(OpExpr::Identity(n))
                    }
                    "kron" => self.call(|p| {
                        let a = p.expr()?;
                        p.expect_sym(',')?;
                        let b = p.expr()?;
                        Ok(OpExpr::Kron(Box::new(a), Box::new(b)))
                    }),
                    "proj" => self.call(|p| Ok(OpExpr::Proj(p.reference(&[Kind::Ket])?))),
                    "sigma" => self.call(|p| {
                        let sign = if p.peek() == &Tok::Sym('-') {
                            p.bump();
                            -1.0
                        } else {
                            1.0
                        };
                        match p.peek().clone() {
                            Tok::Number(a) => {
                                p.bump();
                                Ok(OpExpr::Sigma(sign * p.real(&a)?))
                            }
                            _ => Err(p.syntax("expected an angle in degrees")),
                        }
                    }),
                    _ => {
                        self.pos -= 1;
                        Ok(OpExpr::Name(self.reference(&[Kind::Op])?))
                    }
                }
            }
            _ => Err(self.syntax("expected an operator expression")),
        }
    }

    fn event_ref(&mut self) -> PResult<EventRef> {
        let time = self.ident("a time label")?;
        self.expect_sym(':')?;
        let label = match self.peek().clone() {
            Tok::Ident(s) | Tok::Number(s) => {
                self.bump();
                s
            }
            _ => return Err(self.syntax("expected an event label")),
        };
        Ok(EventRef { time, label })
    }

    fn four_ops_in(&mut self) -> PResult<([String; 4], String)> {
        let ops = [
            self.reference(&[Kind::Op])?,
            self.reference(&[Kind::Op])?,
            self.reference(&[Kind::Op])?,
            self.reference(&[Kind::Op])?,
        ];
        self.expect_word("in")?;
        Ok((ops, self.reference(&[Kind::Ket])?))
    }

    fn query(&mut self) -> PResult<Query> {
        let kw = self.ident("a query kind")?;
        match kw.as_str() {
            "chsh" => {
                let (ops, state) = self.four_ops_in()?;
                Ok(Query::Chsh { ops, state })
            }
            "lhv" => {
                let (ops, state) = self.four_ops_in()?;
                Ok(Query::Lhv { ops, state })
            }
            "probs" => Ok(Query::Probs {
                family: self.reference(&[Kind::Family])?,
            }),
            "consistency" => Ok(Query::Consistency {
                family: self.reference(&[Kind::Family])?,
            }),
            "conditional" => {
                let family = self.reference(&[Kind::Family])?;
                let target = self.event_ref()?;
                self.expect_sym('|')?;
                let given = self.event_ref()?;
                Ok(Query::Conditional {
                    family,
                    target,
                    given,
                })
            }
            "sample" => {
                let state = self.reference(&[Kind::Ket])?;
                let pdi = self.reference(&[Kind::Pdi, Kind::Op])?;
                self.expect_word("shots")?;
                let shots = self.integer("a shot count")?;
                self.expect_word("seed")?;
                let seed = self.integer("a seed")?;
                Ok(Query::Sample {
                    state,
                    pdi,
                    shots,
                    seed,
                })
            }
            "nosignal" => {
                let state = self.reference(&[Kind::Ket])?;
                self.expect_word("split")?;
                let da = self.small_integer("a dimension")?;
                let db = self.small_integer("a dimension")?;
                self.expect_word("alice")?;
                let mut alice = vec![self.reference(&[Kind::Pdi])?];
                while self.peek() == &Tok::Sym(',') {
                    self.bump();
                    alice.push(self.reference(&[Kind::Pdi])?);
                }
                self.expect_word("bob")?;
                let bob = self.reference(&[Kind::Pdi])?;
                let dynamics = match self.peek() {
                    Tok::Ident(s) if s == "dynamics" => {
                        self.bump();
                        Some((self.reference(&[Kind::Op])?, self.reference(&[Kind::Op])?))
                    }
                    _ => None,
                };
                Ok(Query::NoSignal {
                    state,
                    split: (da, db),
                    alice,
                    bob,
                    dynamics,
                })
            }
            _ => {
                self.pos -= 1;
                Err(self.syntax(format!("unknown query {kw:?}")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ok(src: &str) -> ExperimentSpec {
        parse_spec(src).unwrap_or_else(|e| panic!("{e}"))
    }

    fn errs(src: &str) -> Vec<ParseError> {
        parse_spec(src).unwrap_err().0
    }

    #[test]
    fn kron_declaration() {
        let s = ok("op A0 = kron(Z, I(2))");
        assert_eq!(
            s.declarations[0].def,
            Definition::Op(OpExpr::Kron(
                Box::new(OpExpr::Pauli('Z')),
                Box::new(OpExpr::Identity(2))
            ))
        );
    }

    #[test]
    fn ket_literals() {
        let s = ok("ket psi = [0.25+0i, 0, -0.5i, 1-2.5i, .5]");
        let Definition::Ket(v) = &s.declarations[0].def else {
            panic!()
        };
        assert_eq!(v[0], Complex64::new(0.25, 0.0));
        assert_eq!(v[2], Complex64::new(0.0, -0.5));
        assert_eq!(v[3], Complex64::new(1.0, -2.5));
        assert_eq!(v[4], Complex64::new(0.5, 0.0));
    }

    #[test]
    fn unknown_name_is_resolution_error() {
        let e = errs("op A = X\npdi P = spectral(A9)\n");
        assert_eq!(e.len(), 1);
        assert_eq!(
            (e[0].kind, e[0].line, e[0].column),
            (ErrorKind::Resolution, 2, 18)
        );
        assert_eq!(e[0].token, "A9");
    }

    #[test]
    fn kind_mismatch_and_forward_reference() {
        let e = errs("ket k = [1, 0]\nop A = k\nop B = C\nop C = X\n");
        assert_eq!(e.iter().map(|e| e.line).collect::<Vec<_>>(), vec![2, 3]);
        assert!(e.iter().all(|e| e.kind == ErrorKind::Resolution));
    }

    #[test]
    fn precedence() {
        let s = ok("op A = -X*Z + Y - 2*Z");
        let Definition::Op(e) = &s.declarations[0].def else {
            panic!()
        };
        let neg_x = OpExpr::Neg(Box::new(OpExpr::Pauli('X')));
        let prod = OpExpr::Mul(Box::new(neg_x), Box::new(OpExpr::Pauli('Z')));
        let sum = OpExpr::Add(Box::new(prod), Box::new(OpExpr::Pauli('Y')));
        let two_z = OpExpr::Mul(
            Box::new(OpExpr::Scalar(Complex64::new(2.0, 0.0))),
            Box::new(OpExpr::Pauli('Z')),
        );
        assert_eq!(*e, OpExpr::Sub(Box::new(sum), Box::new(two_z)));
    }

    #[test]
    fn family_block() {
        let s = ok("ket k = [1, 0]\nop U = X\npdi P = spectral(Z)\nfamily F {\n initial k\n events 2 = P; events 1 = P\n prop 2 = U\n}\nquery probs F\n");
        let Definition::Family(f) = &s.declarations[3].def else {
            panic!()
        };
        assert_eq!(f.events, vec![(1, "P".into()), (2, "P".into())]);
        assert_eq!(f.props, vec![(2, "U".into())]);
        assert_eq!(s.query_line(0), Some(9));
    }

    #[test]
    fn spectral_of_expression() {
        let s = ok("pdi P = spectral(kron(Z, I(2)))");
        assert!(matches!(
            &s.declarations[0].def,
            Definition::Pdi(PdiDef::Spectral(OpExpr::Kron(..)))
        ));
    }

    #[test]
    fn recovers_per_line() {
        let e = errs("op A = kron(X\nop B = Y Y\nop C = X\nbogus\nop D = C +\n");
        assert_eq!(
            e.iter().map(|e| e.line).collect::<Vec<_>>(),
            vec![1, 2, 4, 5]
        );
    }

    #[test]
    fn broken_family_skips_block() {
        let e = errs("ket k = [1]\nfamily F {\n initial q\n events 1 = P\n}\nop A = X\nop B = A\n");
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].line, 3);
    }

    #[test]
    fn error_cap() {
        let src = "nonsense\n".repeat(50);
        assert_eq!(errs(&src).len(), MAX_ERRORS);
    }

    #[test]
    fn queries() {
        let src = "ket psi = [1, 0, 0, 0]\nop A = X\npdi P = spectral(A)\n\
                   query chsh A A A A in psi\nquery sample psi A shots 10 seed 3\n\
                   query nosignal psi split 2 2 alice P, P bob P dynamics A A\n";
        let s = ok(src);
        assert_eq!(s.queries.len(), 3);
        assert_eq!(
            s.queries[2],
            Query::NoSignal {
                state: "psi".into(),
                split: (2, 2),
                alice: vec!["P".into(), "P".into()],
                bob: "P".into(),
                dynamics: Some(("A".into(), "A".into())),
            }
        );
    }

    #[test]
    fn deep_nesting_is_an_error() {
        let src = format!("op A = {}X{}", "(".repeat(500), ")".repeat(500));
        assert!(parse_spec(&src).is_err());
        let src = format!("op A = {}X", "-".repeat(500));
        assert!(parse_spec(&src).is_err());
    }

    #[test]
    fn empty_source() {
        assert_eq!(ok(""), ExperimentSpec::default());
        assert_eq!(ok("# only a comment\n\n"), ExperimentSpec::default());
    }
}
