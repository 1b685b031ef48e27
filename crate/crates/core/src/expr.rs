//! A small expression language for numbers, ring elements and forms.
//!
//! ```text
//! expr     := ["+"|"-"] term (("+"|"-") term)*
//! term     := factor (("*"|"/") factor)*
//! factor   := "-" factor | atom ["^" exponent]
//! exponent := ["-"] int | "(" ["-"] int ["/" int] ")"
//! atom     := int | name | name "(" expr ("," expr)* ")" | "(" expr ")"
//! ```
//!
//! Between forms `*` is the wedge product; `/` only divides by units.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::dictionary::Alphabet;
use crate::error::{Error, Result};
use crate::forms::Form;
use crate::number::{Number, Rational};
use crate::poly::{Exps, Poly};
use crate::ring::{norm_squared_poly, Ring, Scalar};
use crate::setup::HomogeneousSetup;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Int(BigInt),
    Name(String, Pos),
    Call(String, Vec<Expr>, Pos),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>, Pos),
    Sub(Box<Expr>, Box<Expr>, Pos),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, Pos),
    Pow(Box<Expr>, i64, i64, Pos),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl Pos {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

fn lex(text: &str) -> Result<Lexer> {
    let mut toks = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            toks.push((Tok::Int(s.parse().expect("digits")), pos));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            toks.push((Tok::Ident(chars[start..i].iter().collect()), pos));
            continue;
        }
        let sym = match c {
            '\u{2212}' => '-',
            '+' | '-' | '*' | '/' | '^' | '(' | ')' | ',' => c,
            _ => return Err(pos.error(format!("unexpected character `{c}`"))),
        };
        toks.push((Tok::Sym(sym), pos));
        i += 1;
        col += 1;
    }
    toks.push((Tok::End, Pos { line, column: col }));
    Ok(Lexer { toks, at: 0 })
}

impl Lexer {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == &Tok::Sym(c) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.pos().error(format!("expected `{c}`")))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = if self.eat('-') {
            Expr::Neg(Box::new(self.term()?))
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            let pos = self.pos();
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?), pos);
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?), pos);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            let pos = self.pos();
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?), pos);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        let pos = self.pos();
        if self.eat('^') {
            let (n, d) = self.exponent()?;
            return Ok(Expr::Pow(Box::new(base), n, d, pos));
        }
        Ok(base)
    }

    fn small_int(&mut self) -> Result<i64> {
        let pos = self.pos();
        match self.next().0 {
            Tok::Int(n) => n.to_i64().filter(|v| *v <= 64).ok_or_else(|| pos.error("exponent too large")),
            _ => Err(pos.error("expected an integer exponent")),
        }
    }

    fn exponent(&mut self) -> Result<(i64, i64)> {
        if self.eat('(') {
            let sign = if self.eat('-') { -1 } else { 1 };
            let n = self.small_int()?;
            let d = if self.eat('/') {
                let pos = self.pos();
                let d = self.small_int()?;
                if d == 0 {
                    return Err(pos.error("zero denominator in exponent"));
                }
                d
            } else {
                1
            };
            self.expect(')')?;
            Ok((sign * n, d))
        } else {
            let sign = if self.eat('-') { -1 } else { 1 };
            Ok((sign * self.small_int()?, 1))
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let (tok, pos) = self.next();
        match tok {
            Tok::Int(n) => Ok(Expr::Int(n)),
            Tok::Ident(name) => {
                if self.eat('(') {
                    let mut args = vec![self.expr()?];
                    while self.eat(',') {
                        args.push(self.expr()?);
                    }
                    self.expect(')')?;
                    Ok(Expr::Call(name, args, pos))
                } else {
                    Ok(Expr::Name(name, pos))
                }
            }
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::End => Err(pos.error("unexpected end of input")),
            Tok::Sym(c) => Err(pos.error(format!("unexpected `{c}`"))),
        }
    }
}

pub fn parse(text: &str) -> Result<Expr> {
    let mut lx = lex(text)?;
    let e = lx.expr()?;
    if lx.peek() != &Tok::End {
        return Err(lx.pos().error("unexpected trailing input"));
    }
    Ok(e)
}

/// `sqrt(n)` for a nonnegative integer, with square factors pulled out.
fn sqrt_int(n: &BigInt, pos: Pos) -> Result<Number> {
    let v = n.to_u64().ok_or_else(|| pos.error("sqrt argument out of range"))?;
    if v == 0 {
        return Ok(Number::zero());
    }
    let mut outside = 1u64;
    let mut inside = v;
    let mut p = 2u64;
    while p * p <= inside {
        while inside % (p * p) == 0 {
            inside /= p * p;
            outside *= p;
        }
        p += 1;
    }
    Ok(Number::sqrt_of(inside).scale(&Rational::from_integer(BigInt::from(outside))))
}

fn sqrt_arg(args: &[Expr], pos: Pos) -> Result<Number> {
    match args {
        [Expr::Int(n)] => sqrt_int(n, pos),
        _ => Err(pos.error("sqrt takes one nonnegative integer")),
    }
}

/// Evaluate a constant expression: integers, `sqrt(n)`, `+ - * /`, integer
/// powers.
pub fn eval_number(e: &Expr) -> Result<Number> {
    Ok(match e {
        Expr::Int(n) => Number::from_rational(Rational::from_integer(n.clone())),
        Expr::Name(n, _) => return Err(Error::UnknownName(n.clone())),
        Expr::Call(f, args, pos) if f == "sqrt" => sqrt_arg(args, *pos)?,
        Expr::Call(f, _, _) => return Err(Error::UnknownName(f.clone())),
        Expr::Neg(a) => eval_number(a)?.neg(),
        Expr::Add(a, b, _) => eval_number(a)?.add(&eval_number(b)?),
        Expr::Sub(a, b, _) => eval_number(a)?.sub(&eval_number(b)?),
        Expr::Mul(a, b) => eval_number(a)?.mul(&eval_number(b)?),
        Expr::Div(a, b, pos) => {
            let d = eval_number(b)?;
            eval_number(a)?.div(&d).ok_or_else(|| pos.error("division by zero"))?
        }
        Expr::Pow(a, n, d, pos) => {
            if *d != 1 {
                return Err(pos.error("fractional exponent in a constant"));
            }
            let base = eval_number(a)?;
            let p = base.pow(n.unsigned_abs() as u32);
            if *n < 0 {
                p.inv().ok_or_else(|| pos.error("division by zero"))?
            } else {
                p
            }
        }
    })
}

pub fn parse_number(text: &str) -> Result<Number> {
    eval_number(&parse(text)?)
}

/// Evaluate a polynomial in the given variables (plus `aa`, the sum of
/// squares of the first `nfib` variables).
pub fn eval_poly(e: &Expr, vars: &[String], nfib: usize) -> Result<Poly> {
    let nv = vars.len();
    Ok(match e {
        Expr::Int(_) => Poly::constant(eval_number(e)?, nv),
        Expr::Name(n, _) => {
            if let Some(i) = vars.iter().position(|v| v == n) {
                let mut ex: Exps = smallvec::SmallVec::from_elem(0, nv);
                ex[i] = 1;
                Poly::monomial(Number::one(), ex)
            } else if n == "aa" {
                norm_squared_poly(nfib, nv - nfib)
            } else {
                return Err(Error::UnknownName(n.clone()));
            }
        }
        Expr::Call(f, args, pos) if f == "sqrt" => Poly::constant(sqrt_arg(args, *pos)?, nv),
        Expr::Call(f, _, _) => return Err(Error::UnknownName(f.clone())),
        Expr::Neg(a) => eval_poly(a, vars, nfib)?.neg(),
        Expr::Add(a, b, _) => eval_poly(a, vars, nfib)?.add(&eval_poly(b, vars, nfib)?),
        Expr::Sub(a, b, _) => eval_poly(a, vars, nfib)?.sub(&eval_poly(b, vars, nfib)?),
        Expr::Mul(a, b) => eval_poly(a, vars, nfib)?.mul(&eval_poly(b, vars, nfib)?),
        Expr::Div(a, b, pos) => {
            let d = eval_number(b).map_err(|_| pos.error("polynomials can only be divided by constants"))?;
            let inv = d.inv().ok_or_else(|| pos.error("division by zero"))?;
            eval_poly(a, vars, nfib)?.scale(&inv)
        }
        Expr::Pow(a, n, d, pos) => {
            if *d != 1 || *n < 0 {
                return Err(pos.error("polynomial exponents must be nonnegative integers"));
            }
            eval_poly(a, vars, nfib)?.pow(*n as u32, nv)
        }
    })
}

/// Names and operations available when evaluating forms.
pub struct FormContext<'a> {
    pub setup: &'a HomogeneousSetup,
    pub alphabet: &'a Alphabet,
    pub definitions: BTreeMap<String, Form<Scalar>>,
}

fn scalar_of(f: &Form<Scalar>) -> Option<Scalar> {
    match f.terms().next() {
        Some((0, c)) if f.len() == 1 => Some(c.clone()),
        _ => None,
    }
}

impl<'a> FormContext<'a> {
    pub fn new(setup: &'a HomogeneousSetup, alphabet: &'a Alphabet) -> Self {
        FormContext {
            setup,
            alphabet,
            definitions: BTreeMap::new(),
        }
    }

    pub fn define(&mut self, name: &str, text: &str) -> Result<()> {
        let f = self.eval_str(text)?;
        self.definitions.insert(name.to_string(), f);
        Ok(())
    }

    pub fn eval_str(&self, text: &str) -> Result<Form<Scalar>> {
        self.eval(&parse(text)?)
    }

    fn ring(&self) -> &Arc<Ring> {
        self.setup.ring()
    }

    fn scalar(&self, s: Scalar) -> Form<Scalar> {
        self.setup.scalar_form(s)
    }

    fn as_scalar(&self, f: &Form<Scalar>) -> Option<Scalar> {
        if f.is_zero() {
            Some(Scalar::zero(self.ring()))
        } else {
            scalar_of(f)
        }
    }

    fn name(&self, n: &str, pos: Pos) -> Result<Form<Scalar>> {
        if let Some(f) = self.definitions.get(n) {
            return Ok(f.clone());
        }
        if let Some(f) = self.setup.generator(n) {
            return Ok(f);
        }
        if let Some(s) = Scalar::named(self.ring(), n) {
            return Ok(self.scalar(s));
        }
        if n == "aa" {
            let ring = self.ring();
            return Ok(self.scalar(Scalar::from_base_poly(ring, &norm_squared_poly(ring.nfib(), ring.npar()))));
        }
        if self.alphabet.letter(n).is_some() {
            return Err(pos.error(format!("letter `{n}` is vector-valued; contract it first")));
        }
        Err(Error::UnknownName(n.to_string()))
    }

    fn degrees(f: &Form<Scalar>) -> Vec<usize> {
        f.degrees()
    }

    fn add(&self, a: Form<Scalar>, b: Form<Scalar>, pos: Pos, sub: bool) -> Result<Form<Scalar>> {
        if !a.is_zero() && !b.is_zero() && Self::degrees(&a) != Self::degrees(&b) {
            return Err(Error::DegreeMismatch(format!(
                "{}:{}: cannot add forms of degrees {:?} and {:?}",
                pos.line,
                pos.column,
                Self::degrees(&a),
                Self::degrees(&b)
            )));
        }
        Ok(if sub { a.sub(&b) } else { a.add(&b) })
    }

    /// `base^(n/d)`: integer powers of any scalar or form, half-integer
    /// powers of a radical's defining polynomial.
    fn power(&self, base: Form<Scalar>, n: i64, d: i64, pos: Pos) -> Result<Form<Scalar>> {
        let ring = self.ring().clone();
        if d == 1 && n >= 0 {
            let mut acc = self.scalar(Scalar::one(&ring));
            for _ in 0..n {
                acc = acc.wedge(&base)?;
            }
            return Ok(acc);
        }
        let s = self
            .as_scalar(&base)
            .ok_or_else(|| pos.error("only scalars can be raised to negative or fractional powers"))?;
        if d == 1 {
            let inv = s.inv().map_err(|e| pos.error(e.to_string()))?;
            return Ok(self.scalar(inv.pow((-n) as u32)));
        }
        let (n, d) = {
            let g = num_integer::gcd(n, d);
            (n / g, d / g)
        };
        if d == 1 {
            return self.power(base, n, 1, pos);
        }
        if d != 2 {
            return Err(pos.error("only half-integer fractional exponents are supported"));
        }
        let j = (0..ring.nrad())
            .find(|&j| Scalar::from_base_poly(&ring, &ring.relation(j).clone()) == s)
            .ok_or_else(|| pos.error(format!("fractional exponent of `{s}` without a declared radical")))?;
        let r = Scalar::radical(&ring, j);
        let p = if n >= 0 {
            r.pow(n as u32)
        } else {
            r.pow((-n) as u32).inv().map_err(|e| pos.error(e.to_string()))?
        };
        Ok(self.scalar(p))
    }

    fn call(&self, f: &str, args: &[Expr], pos: Pos) -> Result<Form<Scalar>> {
        match f {
            "sqrt" => {
                let v = sqrt_arg(args, pos)?;
                if let Some(bad) = v.radicands().find(|d| !self.ring().sqrt_is_declared(*d)) {
                    return Err(pos.error(format!("sqrt({bad}) is not a declared constant of the ring")));
                }
                Ok(self.scalar(Scalar::constant(self.ring(), v)))
            }
            "d" => {
                if args.len() != 1 {
                    return Err(pos.error("d takes one argument"));
                }
                let x = self.eval(&args[0])?;
                self.setup.exterior_derivative(&x)
            }
            _ => {
                let c = self.alphabet.contraction(f).ok_or_else(|| Error::UnknownName(f.to_string()))?;
                let mut letters = Vec::new();
                for a in args {
                    match a {
                        Expr::Name(n, _) => letters.push(
                            self.alphabet.letter(n).ok_or_else(|| Error::UnknownName(n.clone()))?,
                        ),
                        _ => return Err(pos.error(format!("arguments of `{f}` must be letter names"))),
                    }
                }
                c.contract(self.setup, &letters)
            }
        }
    }

    pub fn eval(&self, e: &Expr) -> Result<Form<Scalar>> {
        match e {
            Expr::Int(_) => Ok(self.scalar(Scalar::constant(self.ring(), eval_number(e)?))),
            Expr::Name(n, pos) => self.name(n, *pos),
            Expr::Call(f, args, pos) => self.call(f, args, *pos),
            Expr::Neg(a) => Ok(self.eval(a)?.neg()),
            Expr::Add(a, b, pos) => self.add(self.eval(a)?, self.eval(b)?, *pos, false),
            Expr::Sub(a, b, pos) => self.add(self.eval(a)?, self.eval(b)?, *pos, true),
            Expr::Mul(a, b) => self.eval(a)?.wedge(&self.eval(b)?),
            Expr::Div(a, b, pos) => {
                let d = self.eval(b)?;
                let s = self.as_scalar(&d).ok_or_else(|| pos.error("division by a form"))?;
                let inv = s.inv().map_err(|e| pos.error(e.to_string()))?;
                Ok(self.eval(a)?.scale(&inv))
            }
            Expr::Pow(a, n, d, pos) => self.power(self.eval(a)?, *n, *d, *pos),
        }
    }
}

/// Parse a rational number like `-3/2`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let n = parse_number(text)?;
    n.as_rational().ok_or_else(|| Error::Config(format!("`{text}` is not rational")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::letters::{Contraction, Letter};
    use crate::setup::tests::su2_setup;

    #[test]
    fn numbers() {
        assert_eq!(parse_number("-3/2").unwrap(), Number::from_frac(-3, 2));
        assert_eq!(parse_number("sqrt(12)").unwrap(), Number::sqrt_of(3).scale(&Rational::from_integer(2.into())));
        assert_eq!(parse_number("(1+sqrt(3))^2").unwrap(), parse_number("4 + 2*sqrt(3)").unwrap());
        assert_eq!(parse_number("-sqrt(3)").unwrap(), Number::sqrt_of(3).neg());
        assert_eq!(parse_number("2^-1").unwrap(), Number::from_frac(1, 2));
    }

    #[test]
    fn parse_errors_have_positions() {
        match parse("1 + * 2") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (1, 5)),
            other => panic!("{other:?}"),
        }
        assert!(parse("f(1,").is_err());
        assert!(parse("2 3").is_err());
    }

    #[test]
    fn polynomials() {
        let vars: Vec<String> = ["a1", "a2", "k"].iter().map(|s| s.to_string()).collect();
        let p = eval_poly(&parse("k + aa").unwrap(), &vars, 2).unwrap();
        assert_eq!(p.len(), 3);
    }

    #[test]
    fn forms_and_contractions() {
        let s = su2_setup();
        let beta = Letter::from_horizontal(&s, "beta", vec![s.e(1), s.e(2)]).unwrap();
        let alpha = Alphabet {
            letters: vec![Letter::a(&s), Letter::b(&s), beta],
            contractions: vec![Contraction::dot(2), Contraction::det(2)],
            extras: vec![],
        };
        let cx = FormContext::new(&s, &alpha);
        let lhs = cx.eval_str("d(dot(a,a))").unwrap();
        assert_eq!(lhs, cx.eval_str("2*dot(a,b)").unwrap());
        assert_eq!(cx.eval_str("e1*e2").unwrap(), cx.eval_str("-e2*e1").unwrap());
        assert!(matches!(cx.eval_str("dot(a,b) + det(b,b)"), Err(Error::DegreeMismatch(_))));
        assert!(matches!(cx.eval_str("foo"), Err(Error::UnknownName(_))));
        assert!(cx.eval_str("aa^(1/2)").is_err());
        assert!(cx.eval_str("b1 / e1").is_err());
    }
}
