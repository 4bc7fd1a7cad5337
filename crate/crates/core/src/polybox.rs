//! Polynomial wave functions on the unit box `[0, 1]`.
//!
//! Units: well width 1 and energy unit `ħ²/(2m)`, so the Hamiltonian is
//! `-d²/dx²` and the eigenvalues are `n²π²`. States are kept unnormalized;
//! every physical quantity divides by [`BoxPolynomial::norm_squared`].

use std::fmt;

use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exactalg::{int, parse_rational, ratio, Rational};
use crate::poly::{sturm_count, Poly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("polynomial does not vanish at x = {at} (value {value})")]
    BoundaryViolation { at: u8, value: String },
    #[error("the zero polynomial is not a state")]
    ZeroPolynomial,
    #[error("coefficient list is empty")]
    Empty,
    #[error("invalid degree: {0}")]
    InvalidDegree(String),
    #[error("sample count must be at least 2, got {0}")]
    InvalidSampleCount(usize),
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
}

/// A nonzero polynomial with `P(0) = P(1) = 0`; degree is therefore at least 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoxPolynomial {
    poly: Poly,
}

/// Parity of `P(x + 1/2)` about the centre of the well.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftedParity {
    Even,
    Odd,
    None,
}

impl fmt::Display for ShiftedParity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShiftedParity::Even => "even",
            ShiftedParity::Odd => "odd",
            ShiftedParity::None => "none",
        })
    }
}

pub fn make_wavefunction(coefficients: Vec<Rational>) -> Result<BoxPolynomial, PolyError> {
    if coefficients.is_empty() {
        return Err(PolyError::Empty);
    }
    BoxPolynomial::from_poly(Poly::new(coefficients))
}

/// `x^(j+1) (1 - x)`, the `j`-th member of the degree-`degree` basis.
/// Members `j = 0..=degree-2` span every state of degree at most `degree`.
pub fn standard_family(degree: usize, index: usize) -> Result<BoxPolynomial, PolyError> {
    if degree < 2 || index > degree - 2 {
        return Err(PolyError::InvalidDegree(format!("standard family needs d ≥ 2 and 0 ≤ j ≤ d-2, got ({degree}, {index})")));
    }
    let p = &Poly::monomial(index + 1) * &Poly::from_ints(&[1, -1]);
    BoxPolynomial::from_poly(p)
}

/// `x(1 - x) R((x - 1/2)²)` with `R(u) = u^(m-1) + 1` (`R = 1` for `m = 1`):
/// a degree-`2m` state that is even about the centre.
pub fn centered_even_family(half_degree: usize) -> Result<BoxPolynomial, PolyError> {
    if half_degree == 0 {
        return Err(PolyError::InvalidDegree("centered family needs m ≥ 1".into()));
    }
    let base = Poly::from_ints(&[0, 1, -1]);
    if half_degree == 1 {
        return BoxPolynomial::from_poly(base);
    }
    let centred_sq = Poly::new(vec![ratio(1, 4), int(-1), int(1)]);
    let r = &centred_sq.pow(half_degree as u32 - 1) + &Poly::constant(int(1));
    BoxPolynomial::from_poly(&base * &r)
}

impl BoxPolynomial {
    pub fn from_poly(poly: Poly) -> Result<Self, PolyError> {
        if poly.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        for at in [0u8, 1] {
            let value = poly.eval(&int(at as i64));
            if !value.is_zero() {
                return Err(PolyError::BoundaryViolation { at, value: value.to_string() });
            }
        }
        Ok(Self { poly })
    }

    /// Parses either a comma-separated ascending coefficient list
    /// (`"0,1,-1"`) or a product expression in `x` (`"x*(1-x)*(1-2*x)"`).
    pub fn parse(text: &str) -> Result<Self, PolyError> {
        Self::from_poly(parse_polynomial(text)?)
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.poly.degree().expect("nonzero")
    }

    pub fn coefficients(&self) -> &[Rational] {
        self.poly.coeffs()
    }

    pub fn scaled(&self, factor: &Rational) -> Result<Self, PolyError> {
        Self::from_poly(self.poly.scale(factor))
    }

    /// `∫₀¹ P²`
    pub fn norm_squared(&self) -> Rational {
        (&self.poly * &self.poly).integrate_unit()
    }

    /// `∫₀¹ P'²`, which equals `-∫₀¹ P P''` because `P` vanishes at both walls.
    pub fn quadratic_form_h(&self) -> Rational {
        let d = self.poly.derivative();
        (&d * &d).integrate_unit()
    }

    /// `∫₀¹ P''²`, i.e. `(Hψ, Hψ)` for the unnormalized state.
    pub fn quadratic_form_h2(&self) -> Rational {
        let d2 = self.poly.nth_derivative(2);
        (&d2 * &d2).integrate_unit()
    }

    /// `(H^a ψ, H^b ψ) = (-1)^(a+b) ∫₀¹ P^(2a) P^(2b)` with `H = -d²/dx²`.
    pub fn operator_form(&self, a: usize, b: usize) -> Rational {
        let v = (&self.poly.nth_derivative(2 * a) * &self.poly.nth_derivative(2 * b)).integrate_unit();
        if (a + b) % 2 == 1 {
            -v
        } else {
            v
        }
    }

    /// Mean energy in units of `ħ²/(2m)`.
    pub fn mean_energy(&self) -> Rational {
        self.quadratic_form_h() / self.norm_squared()
    }

    /// Mean energy in units of `ħ²/m`.
    pub fn mean_energy_hbar2_over_m(&self) -> Rational {
        self.mean_energy() / int(2)
    }

    /// `⟨H²⟩` in units of `(ħ²/(2m))²`.
    pub fn mean_h2(&self) -> Rational {
        self.quadratic_form_h2() / self.norm_squared()
    }

    pub fn shift_parity(&self) -> ShiftedParity {
        let centred = self.poly.shifted(&ratio(1, 2));
        if centred.is_even() {
            ShiftedParity::Even
        } else if centred.is_odd() {
            ShiftedParity::Odd
        } else {
            ShiftedParity::None
        }
    }

    /// Distinct real roots strictly inside `(0, 1)`, counted with a Sturm chain.
    pub fn node_count(&self) -> usize {
        let squarefree = self.poly.div_rem(&self.poly.gcd(&self.poly.derivative())).0;
        // 0 and 1 are simple roots of the squarefree part
        let walls = Poly::from_ints(&[0, -1, 1]);
        let (inner, rem) = squarefree.div_rem(&walls);
        debug_assert!(rem.is_zero());
        sturm_count(&inner, &int(0), &int(1))
    }

    /// Normalized values `P(x)/√N` at `count` equally spaced points, endpoints included.
    pub fn sample(&self, count: usize) -> Result<Vec<(Rational, f64)>, PolyError> {
        if count < 2 {
            return Err(PolyError::InvalidSampleCount(count));
        }
        let norm = self.norm_squared().to_f64().expect("finite").sqrt();
        Ok((0..count)
            .map(|i| {
                let x = ratio(i as i64, count as i64 - 1);
                let v = self.poly.eval(&x);
                let value = if v.is_zero() { 0.0 } else { v.to_f64().expect("finite") / norm };
                (x, value)
            })
            .collect())
    }

    /// Unnormalized value at a rational point.
    pub fn eval(&self, x: &Rational) -> Rational {
        self.poly.eval(x)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.poly.coeffs().iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64().expect("finite"))
    }
}

impl fmt::Display for BoxPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.poly.fmt(f)
    }
}

/// Parses the CLI polynomial syntax without validating boundary conditions.
pub fn parse_polynomial(text: &str) -> Result<Poly, PolyError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(PolyError::Empty);
    }
    if !trimmed.contains(['x', 'X']) {
        let coeffs = trimmed
            .split(',')
            .map(|c| parse_rational(c).map_err(|e| PolyError::Parse(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(Poly::new(coeffs));
    }
    let tokens = tokenize(trimmed)?;
    let mut parser = ExprParser { tokens, pos: 0 };
    let p = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(PolyError::Parse(format!("unexpected {:?}", parser.tokens[parser.pos])));
    }
    Ok(p)
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(Rational),
    X,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Open,
    Close,
}

fn tokenize(s: &str) -> Result<Vec<Token>, PolyError> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => {}
            'x' | 'X' => out.push(Token::X),
            '+' => out.push(Token::Plus),
            '-' | '−' => out.push(Token::Minus),
            '*' | '·' => out.push(Token::Star),
            '/' => out.push(Token::Slash),
            '^' => out.push(Token::Caret),
            '(' => out.push(Token::Open),
            ')' => out.push(Token::Close),
            d if d.is_ascii_digit() || d == '.' => {
                let start = i;
                while i + 1 < chars.len() && (chars[i + 1].is_ascii_digit() || chars[i + 1] == '.') {
                    i += 1;
                }
                let lit: String = chars[start..=i].iter().collect();
                out.push(Token::Num(parse_rational(&lit).map_err(|e| PolyError::Parse(e.to_string()))?));
            }
            other => return Err(PolyError::Parse(format!("unexpected character {other:?}"))),
        }
        i += 1;
    }
    Ok(out)
}

struct ExprParser {
    tokens: Vec<Token>,
    pos: usize,
}

impl ExprParser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Poly, PolyError> {
        let mut acc = self.term()?;
        while let Some(op) = self.peek() {
            match op {
                Token::Plus => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Token::Minus => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly, PolyError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    let divisor = self.unary()?;
                    match divisor.degree() {
                        Some(0) => acc = acc.scale(&divisor.coeff(0).recip()),
                        Some(_) => return Err(PolyError::Parse("division by a non-constant".into())),
                        None => return Err(PolyError::Parse("division by zero".into())),
                    }
                }
                // implicit product, as in `2x` or `x(1-x)`
                Some(Token::X | Token::Open | Token::Num(_)) => acc = &acc * &self.unary()?,
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Poly, PolyError> {
        match self.peek() {
            Some(Token::Minus) => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(Token::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly, PolyError> {
        let base = self.primary()?;
        if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            let exp = match self.bump() {
                Some(Token::Num(n)) if n.is_integer() && !n.is_negative() => n.to_integer().to_u32(),
                _ => None,
            }
            .filter(|&e| e <= 64)
            .ok_or_else(|| PolyError::Parse("exponent must be a small non-negative integer".into()))?;
            return Ok(base.pow(exp));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Poly, PolyError> {
        match self.bump() {
            Some(Token::Num(n)) => Ok(Poly::constant(n)),
            Some(Token::X) => Ok(Poly::x()),
            Some(Token::Open) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Token::Close) => Ok(inner),
                    _ => Err(PolyError::Parse("missing ')'".into())),
                }
            }
            Some(t) => Err(PolyError::Parse(format!("unexpected {t:?}"))),
            None => Err(PolyError::Parse("unexpected end of input".into())),
        }
    }
}

/// The five states used in the worked examples, in their unnormalized form.
pub fn worked_examples() -> Vec<(&'static str, BoxPolynomial)> {
    [
        ("x(1-x)", "x*(1-x)"),
        ("x(1-x)(1-2x)", "x*(1-x)*(1-2*x)"),
        ("x^2(1-x)", "x^2*(1-x)"),
        ("x^3(1-x)", "x^3*(1-x)"),
        ("x^2(1-x)(1-2x)", "x^2*(1-x)*(1-2*x)"),
    ]
    .into_iter()
    .map(|(name, text)| (name, BoxPolynomial::parse(text).expect("valid state")))
    .collect()
}
