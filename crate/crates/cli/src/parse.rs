//! Text grammars for field specs, polynomials, elements and matrices.
//!
//! Field spec: `q=<p>[^<e>],m=<m>[,lmod=<poly in y>][,seed=<u64>]`.
//! Polynomial: `x^4+6*x^2+6` over `K`, `(4*w^2+5)*x+1` over `L`; `w` is the
//! power-basis generator of `L` over `K`, `y` the one of `K` over `F_p`.
//! Matrix: rows separated by `;`, entries by `,`.

use std::fmt;

use mcodes_core::gf::{Field, FieldTower, KElt, KField, LElt, LField};
use mcodes_core::polyfact::Poly;
use mcodes_core::Matrix;

/// Position-annotated parse failure; the position is a byte offset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub pos: usize,
    pub expected: String,
}

impl ParseError {
    fn new(pos: usize, expected: impl Into<String>) -> Self {
        Self {
            pos,
            expected: expected.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: expected {}", self.pos, self.expected)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(u64),
    Var(char),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Lexer {
    fn new(s: &str) -> Result<Self, ParseError> {
        let mut toks = Vec::new();
        let bytes = s.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            match c {
                ' ' | '\t' | '\n' | '\r' => i += 1,
                '+' => {
                    toks.push((Tok::Plus, i));
                    i += 1;
                }
                '-' => {
                    toks.push((Tok::Minus, i));
                    i += 1;
                }
                '*' => {
                    toks.push((Tok::Star, i));
                    i += 1;
                }
                '^' => {
                    toks.push((Tok::Caret, i));
                    i += 1;
                }
                '(' => {
                    toks.push((Tok::LParen, i));
                    i += 1;
                }
                ')' => {
                    toks.push((Tok::RParen, i));
                    i += 1;
                }
                'x' | 'w' | 'y' => {
                    toks.push((Tok::Var(c), i));
                    i += 1;
                }
                '0'..='9' => {
                    let start = i;
                    let mut v: u64 = 0;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        v = v
                            .checked_mul(10)
                            .and_then(|v| v.checked_add((bytes[i] - b'0') as u64))
                            .ok_or_else(|| ParseError::new(start, "a smaller integer"))?;
                        i += 1;
                    }
                    toks.push((Tok::Int(v), start));
                }
                _ => {
                    return Err(ParseError::new(
                        i,
                        "a digit, variable (x, w, y), operator or parenthesis",
                    ))
                }
            }
        }
        Ok(Self {
            toks,
            pos: 0,
            end: s.len(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }
}

/// Expression evaluator into `L[x]`. The main variable is configurable so
/// the same grammar serves code polynomials (in `x`) and moduli (in `y`).
struct PolyParser<'a> {
    t: &'a FieldTower,
    lex: Lexer,
    main_var: char,
}

impl<'a> PolyParser<'a> {
    fn parse(t: &'a FieldTower, input: &str, main_var: char) -> Result<Poly<LField>, ParseError> {
        let mut p = Self {
            t,
            lex: Lexer::new(input)?,
            main_var,
        };
        let e = p.expr()?;
        if p.lex.peek().is_some() {
            return Err(ParseError::new(p.lex.here(), "end of input"));
        }
        Ok(e)
    }

    fn expr(&mut self) -> Result<Poly<LField>, ParseError> {
        let l = self.t.l();
        let mut acc = self.term()?;
        loop {
            match self.lex.peek() {
                Some(Tok::Plus) => {
                    self.lex.bump();
                    let rhs = self.term()?;
                    acc = acc.add(&rhs, l);
                }
                Some(Tok::Minus) => {
                    self.lex.bump();
                    let rhs = self.term()?;
                    acc = acc.sub(&rhs, l);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly<LField>, ParseError> {
        let l = self.t.l();
        let mut acc = self.factor()?;
        while matches!(self.lex.peek(), Some(Tok::Star)) {
            self.lex.bump();
            let rhs = self.factor()?;
            acc = acc.mul(&rhs, l);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly<LField>, ParseError> {
        let base = self.atom()?;
        if matches!(self.lex.peek(), Some(Tok::Caret)) {
            self.lex.bump();
            let pos = self.lex.here();
            match self.lex.bump() {
                Some(Tok::Int(e)) => {
                    if e > 4096 {
                        return Err(ParseError::new(pos, "an exponent below 4096"));
                    }
                    Ok(base.pow(e as usize, self.t.l()))
                }
                _ => Err(ParseError::new(pos, "an integer exponent")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Poly<LField>, ParseError> {
        let l = self.t.l();
        let pos = self.lex.here();
        match self.lex.bump() {
            Some(Tok::Int(v)) => Ok(Poly::constant(l, l.from_u64(v))),
            Some(Tok::Var(c)) if c == self.main_var => Ok(Poly::x(l)),
            Some(Tok::Var('w')) => Ok(Poly::constant(l, l.generator())),
            Some(Tok::Var('y')) => {
                // Generator of K, embedded as a constant of L.
                let kgen = self.t.k().generator();
                Ok(Poly::constant(l, self.t.embed(&kgen)))
            }
            Some(Tok::Var(c)) => Err(ParseError::new(
                pos,
                format!("a valid variable here (found {c})"),
            )),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                let pos = self.lex.here();
                match self.lex.bump() {
                    Some(Tok::RParen) => Ok(e),
                    _ => Err(ParseError::new(pos, "a closing parenthesis")),
                }
            }
            Some(Tok::Minus) => {
                let e = self.atom()?;
                Ok(e.neg(l))
            }
            _ => Err(ParseError::new(pos, "an atom (integer, variable or parenthesis)")),
        }
    }
}

/// Polynomial over `L` in the variable `x`.
pub fn parse_lpoly(t: &FieldTower, input: &str) -> Result<Poly<LField>, ParseError> {
    PolyParser::parse(t, input, 'x')
}

/// Polynomial over `K` in the variable `x`: parsed over `L`, then every
/// coefficient must retract into `K`.
pub fn parse_kpoly(t: &FieldTower, input: &str) -> Result<Poly<KField>, ParseError> {
    let lp = parse_lpoly(t, input)?;
    retract_poly(t, &lp).ok_or_else(|| ParseError::new(0, "coefficients in the base field K"))
}

fn retract_poly(t: &FieldTower, lp: &Poly<LField>) -> Option<Poly<KField>> {
    let mut coeffs = Vec::with_capacity(lp.coeffs().len());
    for c in lp.coeffs() {
        coeffs.push(t.l().retract(c)?);
    }
    Some(Poly::from_coeffs(t.k(), coeffs))
}

/// Single element of `L` (a constant expression, `w`-terms allowed).
pub fn parse_element(t: &FieldTower, input: &str) -> Result<LElt, ParseError> {
    let p = parse_lpoly(t, input)?;
    match p.deg() {
        None => Ok(t.l().zero()),
        Some(0) => Ok(p.coeffs()[0].clone()),
        Some(_) => Err(ParseError::new(0, "a constant (no x term)")),
    }
}

/// Matrix over `L`: rows split on `;`, entries on `,`.
pub fn parse_lmatrix(t: &FieldTower, input: &str) -> Result<Matrix<LField>, ParseError> {
    let mut rows: Vec<Vec<LElt>> = Vec::new();
    let mut offset = 0usize;
    for row in input.split(';') {
        let mut entries = Vec::new();
        let mut eoff = offset;
        for entry in row.split(',') {
            let e = parse_element(t, entry).map_err(|e| ParseError {
                pos: eoff + e.pos,
                expected: e.expected,
            })?;
            entries.push(e);
            eoff += entry.len() + 1;
        }
        rows.push(entries);
        offset += row.len() + 1;
    }
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(ParseError::new(0, "rows of equal length"));
    }
    Ok(Matrix::from_rows(t.l(), rows))
}

/// Matrix over `K` (entries must retract).
pub fn parse_kmatrix(t: &FieldTower, input: &str) -> Result<Matrix<KField>, ParseError> {
    let lm = parse_lmatrix(t, input)?;
    let mut rows: Vec<Vec<KElt>> = Vec::new();
    for i in 0..lm.rows() {
        let mut row = Vec::with_capacity(lm.cols());
        for j in 0..lm.cols() {
            row.push(
                t.l()
                    .retract(lm.at(i, j))
                    .ok_or_else(|| ParseError::new(0, "entries in the base field K"))?,
            );
        }
        rows.push(row);
    }
    Ok(Matrix::from_rows(t.k(), rows))
}

/// Parsed field spec, before tower construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    pub p: u64,
    pub e: usize,
    pub m: usize,
    pub lmod: Option<String>,
    pub seed: u64,
}

/// `q=<p>[^<e>],m=<m>[,lmod=<poly in y>][,seed=<u64>]`.
pub fn parse_field_spec(input: &str) -> Result<FieldSpec, ParseError> {
    let mut p: Option<(u64, usize)> = None;
    let mut m: Option<usize> = None;
    let mut lmod: Option<String> = None;
    let mut seed: u64 = 0;
    let mut offset = 0usize;
    for part in input.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| ParseError::new(offset, "key=value"))?;
        let voff = offset + key.len() + 1;
        match key.trim() {
            "q" => {
                let (pp, ee) = match value.split_once('^') {
                    Some((a, b)) => (
                        a.trim()
                            .parse::<u64>()
                            .map_err(|_| ParseError::new(voff, "a prime"))?,
                        b.trim()
                            .parse::<usize>()
                            .map_err(|_| ParseError::new(voff, "an exponent"))?,
                    ),
                    None => (
                        value
                            .trim()
                            .parse::<u64>()
                            .map_err(|_| ParseError::new(voff, "a prime"))?,
                        1,
                    ),
                };
                p = Some((pp, ee));
            }
            "m" => {
                m = Some(
                    value
                        .trim()
                        .parse::<usize>()
                        .map_err(|_| ParseError::new(voff, "a positive integer"))?,
                );
            }
            "lmod" => lmod = Some(value.to_string()),
            "seed" => {
                seed = value
                    .trim()
                    .parse::<u64>()
                    .map_err(|_| ParseError::new(voff, "an unsigned 64-bit seed"))?;
            }
            other => {
                return Err(ParseError::new(
                    offset,
                    format!("one of q, m, lmod, seed (found {other})"),
                ))
            }
        }
        offset += part.len() + 1;
    }
    let (p, e) = p.ok_or_else(|| ParseError::new(0, "a q=<p>[^<e>] entry"))?;
    let m = m.ok_or_else(|| ParseError::new(0, "an m=<int> entry"))?;
    Ok(FieldSpec {
        p,
        e,
        m,
        lmod,
        seed,
    })
}

/// The modulus grammar: a polynomial in `y` over the prime subfield.
pub fn parse_lmod(t: &FieldTower, input: &str) -> Result<Poly<KField>, ParseError> {
    let lp = PolyParser::parse(t, input, 'y')?;
    retract_poly(t, &lp)
        .ok_or_else(|| ParseError::new(0, "modulus coefficients in the prime field"))
}

#[derive(Debug)]
pub enum SpecError {
    /// Malformed text: a usage problem.
    Parse(ParseError),
    /// Structurally fine but mathematically invalid: a domain problem.
    Tower(mcodes_core::gf::TowerError),
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecError::Parse(e) => e.fmt(f),
            SpecError::Tower(e) => e.fmt(f),
        }
    }
}

/// Build the verified tower from a parsed spec. A throwaway degree-1 tower
/// provides the `K` context needed to parse the optional modulus.
pub fn build_tower(spec: &FieldSpec) -> Result<FieldTower, SpecError> {
    let probe =
        FieldTower::new(spec.p, spec.e, 1, None, spec.seed).map_err(SpecError::Tower)?;
    let lmod = match &spec.lmod {
        Some(s) => Some(parse_lmod(&probe, s).map_err(SpecError::Parse)?),
        None => None,
    };
    FieldTower::new(spec.p, spec.e, spec.m, lmod, spec.seed).map_err(SpecError::Tower)
}
