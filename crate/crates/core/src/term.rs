//! Terms over variables, the base point and named operations.

use std::fmt;
use std::str::FromStr;

use crate::algebra::{AlgebraError, Elem, FiniteAlgebra};

/// A term. Variables are positional: `Var(i)` is the `i`-th argument, printed
/// as `x{i}`; `Zero` is the base point, printed as `0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(usize),
    Zero,
    App(String, Vec<Term>),
}

impl Term {
    pub fn app(op: impl Into<String>, args: Vec<Term>) -> Term {
        Term::App(op.into(), args)
    }

    /// Evaluates the term in `alg` with `x{i}` bound to `env[i]`.
    pub fn eval(&self, alg: &FiniteAlgebra, env: &[Elem]) -> Result<Elem, AlgebraError> {
        match self {
            Term::Var(i) => env.get(*i).copied().ok_or(AlgebraError::VarOutOfRange {
                index: *i,
                len: env.len(),
            }),
            Term::Zero => Ok(alg.zero()),
            Term::App(name, args) => {
                let (idx, op) = alg
                    .operation(name)
                    .ok_or_else(|| AlgebraError::UnknownOperation(name.clone()))?;
                if op.arity() != args.len() {
                    return Err(AlgebraError::ArityMismatch {
                        op: name.clone(),
                        expected: op.arity(),
                        found: args.len(),
                    });
                }
                let values = args.iter().map(|t| t.eval(alg, env)).collect::<Result<Vec<_>, _>>()?;
                Ok(alg.apply(idx, &values))
            }
        }
    }

    /// Height of the syntax tree; variables and `0` have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
            _ => 0,
        }
    }

    /// One more than the largest variable index, or 0 for a closed term.
    pub fn var_bound(&self) -> usize {
        match self {
            Term::Var(i) => i + 1,
            Term::Zero => 0,
            Term::App(_, args) => args.iter().map(Term::var_bound).max().unwrap_or(0),
        }
    }

    /// Replaces every occurrence of `x{var}` by `by`.
    pub fn substitute(&self, var: usize, by: &Term) -> Term {
        match self {
            Term::Var(i) if *i == var => by.clone(),
            Term::App(name, args) => Term::App(name.clone(), args.iter().map(|t| t.substitute(var, by)).collect()),
            other => other.clone(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "x{i}"),
            Term::Zero => write!(f, "0"),
            Term::App(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse term at byte {pos}: {msg}")]
pub struct TermParseError {
    pub pos: usize,
    pub msg: &'static str,
}

/// Parses the [`Display`](fmt::Display) form: `0`, `x{i}`, or `name(t,...)`.
/// A bare identifier is a nullary application.
impl FromStr for Term {
    type Err = TermParseError;

    fn from_str(s: &str) -> Result<Term, TermParseError> {
        let mut p = Parser {
            src: s.as_bytes(),
            pos: 0,
        };
        let t = p.term()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("trailing input"));
        }
        Ok(t)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &'static str) -> TermParseError {
        TermParseError { pos: self.pos, msg }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<Term, TermParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || b"_'".contains(&self.src[self.pos]))
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a term"));
        }
        let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        self.skip_ws();
        if self.src.get(self.pos) == Some(&b'(') {
            self.pos += 1;
            let mut args = Vec::new();
            self.skip_ws();
            if self.src.get(self.pos) == Some(&b')') {
                self.pos += 1;
                return Ok(Term::App(word.to_owned(), args));
            }
            loop {
                args.push(self.term()?);
                self.skip_ws();
                match self.src.get(self.pos) {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        return Ok(Term::App(word.to_owned(), args));
                    }
                    _ => return Err(self.err("expected `,` or `)`")),
                }
            }
        }
        if word == "0" {
            return Ok(Term::Zero);
        }
        if let Some(digits) = word.strip_prefix('x') {
            if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                return digits
                    .parse()
                    .map(Term::Var)
                    .map_err(|_| self.err("variable index too large"));
            }
        }
        Ok(Term::App(word.to_owned(), Vec::new()))
    }
}
