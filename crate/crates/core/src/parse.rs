//! Recursive-descent parser for factored polynomial expressions.
//!
//! ```text
//! expr   := [int '*'] factor { '*' factor } [ '/' posint ]  |  int [ '/' posint ]
//! factor := '(' poly ')' [ '^' posint ]
//! poly   := term { ('+' | '-') term }      (optional leading sign)
//! term   := [int '*'] 'x' [ '^' nat ]  |  int
//! ```
//!
//! Whitespace is ignored everywhere; the variable is always `x`.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::Result;
use crate::standard_form::StandardForm;
use crate::{Int, IntPoly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at {}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

/// Parsed input before normalization. Exponents are kept per factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputExpression {
    pub source: String,
    pub constant: Option<Int>,
    pub factors: Vec<(IntPoly, u32)>,
    pub denominator: Option<Int>,
}

impl InputExpression {
    /// Factors with exponents expanded into repetitions.
    pub fn expanded_factors(&self) -> Vec<IntPoly> {
        self.factors
            .iter()
            .flat_map(|(g, k)| std::iter::repeat_n(g.clone(), *k as usize))
            .collect()
    }

    pub fn to_standard_form(&self) -> Result<StandardForm> {
        StandardForm::normalize(
            &self.constant.clone().unwrap_or_else(Int::one),
            self.expanded_factors(),
            &self.denominator.clone().unwrap_or_else(Int::one),
        )
    }
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    source: &'a str,
}

type PResult<T> = std::result::Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn new(source: &'a str) -> Self {
        Self {
            chars: source.chars().collect(),
            pos: 0,
            source,
        }
    }

    fn location(&self, pos: usize) -> (usize, usize) {
        let mut line = 1;
        let mut column = 1;
        for &c in &self.chars[..pos.min(self.chars.len())] {
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
        (line, column)
    }

    fn error_at(&self, pos: usize, message: impl Into<String>) -> ParseError {
        let (line, column) = self.location(pos);
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> PResult<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("expected '{c}'")))
        }
    }

    fn unexpected(&mut self, what: &str) -> ParseError {
        let pos = {
            self.skip_ws();
            self.pos
        };
        match self.chars.get(pos) {
            Some(c) if c.is_alphabetic() && *c != 'x' => {
                self.error_at(pos, format!("unknown variable '{c}'; only 'x' is supported"))
            }
            Some(c) => self.error_at(pos, format!("{what}, found '{c}'")),
            None => self.error_at(pos, format!("{what}, found end of input")),
        }
    }

    fn digits(&mut self) -> Option<Int> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        (self.pos > start).then(|| {
            let s: String = self.chars[start..self.pos].iter().collect();
            s.parse::<Int>().expect("ascii digits")
        })
    }

    fn small_exponent(&mut self, allow_zero: bool) -> PResult<u32> {
        self.skip_ws();
        let start = self.pos;
        let v = self.digits().ok_or_else(|| self.unexpected("expected exponent"))?;
        let v: u32 = v
            .try_into()
            .map_err(|_| self.error_at(start, "exponent too large"))?;
        if v == 0 && !allow_zero {
            return Err(self.error_at(start, "exponent must be positive"));
        }
        Ok(v)
    }

    /// Optionally signed integer.
    fn signed_int(&mut self) -> Option<Int> {
        let save = self.pos;
        let negative = self.eat('-');
        if !negative {
            self.eat('+');
        }
        match self.digits() {
            Some(v) => Some(if negative { -v } else { v }),
            None => {
                self.pos = save;
                None
            }
        }
    }

    fn expr(&mut self) -> PResult<InputExpression> {
        let mut constant = None;
        let mut factors = Vec::new();
        if self.peek() != Some('(') {
            let c = self.signed_int().ok_or_else(|| self.unexpected("expected '(' or an integer"))?;
            constant = Some(c);
            if self.eat('*') {
                factors.push(self.factor()?);
            }
        } else {
            factors.push(self.factor()?);
        }
        if !factors.is_empty() {
            while self.eat('*') {
                factors.push(self.factor()?);
            }
        }
        let mut denominator = None;
        if self.eat('/') {
            self.skip_ws();
            let start = self.pos;
            let d = self.digits().ok_or_else(|| self.unexpected("expected positive integer denominator"))?;
            if d.is_zero() {
                return Err(self.error_at(start, "zero denominator"));
            }
            denominator = Some(d);
        }
        if self.peek().is_some() {
            return Err(self.unexpected("expected end of input"));
        }
        Ok(InputExpression {
            source: self.source.to_string(),
            constant,
            factors,
            denominator,
        })
    }

    fn factor(&mut self) -> PResult<(IntPoly, u32)> {
        self.expect('(')?;
        let poly = self.poly()?;
        self.expect(')')?;
        let exp = if self.eat('^') { self.small_exponent(false)? } else { 1 };
        Ok((poly, exp))
    }

    fn poly(&mut self) -> PResult<IntPoly> {
        let mut coeffs: Vec<Int> = Vec::new();
        let mut first = true;
        loop {
            let negative = if self.eat('-') {
                true
            } else if self.eat('+') || first {
                false
            } else {
                break;
            };
            first = false;
            let (c, k) = self.term()?;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, Int::zero());
            }
            if negative {
                coeffs[k] -= c;
            } else {
                coeffs[k] += c;
            }
        }
        Ok(IntPoly::new(coeffs))
    }

    fn term(&mut self) -> PResult<(Int, usize)> {
        let coeff = self.digits();
        let has_var = match coeff {
            Some(_) if self.eat('*') => {
                if self.peek() != Some('x') {
                    return Err(self.unexpected("expected 'x'"));
                }
                true
            }
            Some(_) => false,
            None => {
                if self.peek() != Some('x') {
                    return Err(self.unexpected("expected a term"));
                }
                true
            }
        };
        let coeff = coeff.unwrap_or_else(Int::one);
        if !has_var {
            return Ok((coeff, 0));
        }
        self.expect('x')?;
        let k = if self.eat('^') { self.small_exponent(true)? } else { 1 };
        Ok((coeff, k as usize))
    }
}

pub fn parse(source: &str) -> std::result::Result<InputExpression, ParseError> {
    Parser::new(source).expr()
}

/// A single polynomial, optionally wrapped in parentheses.
pub fn parse_poly(source: &str) -> std::result::Result<IntPoly, ParseError> {
    let mut p = Parser::new(source);
    let poly = p.poly()?;
    if p.peek().is_some() {
        return Err(p.unexpected("expected end of input"));
    }
    Ok(poly)
}
