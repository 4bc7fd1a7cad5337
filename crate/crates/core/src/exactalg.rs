//! Exact rational arithmetic, π-graded scalars, linear forms over the
//! normalized sum unknowns, and an exact Gauss-Jordan solver.
//!
//! Every unknown is the dimensionless ratio `X = s(p) / π^p` for a sum
//! `s ∈ {ζ, η, λ}`, so all assembled systems stay purely rational.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Arbitrary-precision exact fraction; always canonical (reduced, positive denominator).
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("inconsistent system: equation {row} reduces to 0 = {rhs}")]
    Inconsistent { row: usize, rhs: String },
    #[error("invalid rational literal {0:?}")]
    InvalidRational(String),
    #[error("invalid sum symbol: {0}")]
    InvalidSymbol(String),
    #[error("π power must be even, got {0}")]
    OddPiPower(u32),
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// `1/2 + 1/3` style helpers are covered by the operator impls on
/// [`Rational`]; this entry point exists for callers that pick the
/// operation at runtime and need division by zero as an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn rational_arithmetic(a: &Rational, b: &Rational, op: ArithOp) -> Result<Rational, AlgebraError> {
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => {
            if b.is_zero() {
                return Err(AlgebraError::DivisionByZero);
            }
            a / b
        }
    })
}

/// Parses `"num/den"`, `"num"`, or a plain decimal such as `"-0.25"`.
pub fn parse_rational(text: &str) -> Result<Rational, AlgebraError> {
    let s = text.trim();
    let bad = || AlgebraError::InvalidRational(text.to_string());
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.trim_start().starts_with('-');
        let whole = match whole.trim_start_matches(['+', '-']) {
            "" => BigInt::zero(),
            w => BigInt::from_str(w).map_err(|_| bad())?,
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac = BigInt::from_str(frac).map_err(|_| bad())?;
        let magnitude = Rational::new(whole * &scale + frac, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    BigInt::from_str(s).map(Rational::from_integer).map_err(|_| bad())
}

/// `coefficient · π^pi_power`, with an even power and `0` stored as `0·π^0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PiScaled {
    coefficient: Rational,
    pi_power: u32,
}

impl PiScaled {
    pub fn new(coefficient: Rational, pi_power: u32) -> Result<Self, AlgebraError> {
        if !pi_power.is_multiple_of(2) {
            return Err(AlgebraError::OddPiPower(pi_power));
        }
        let pi_power = if coefficient.is_zero() { 0 } else { pi_power };
        Ok(Self { coefficient, pi_power })
    }

    pub fn coefficient(&self) -> &Rational {
        &self.coefficient
    }

    pub fn pi_power(&self) -> u32 {
        self.pi_power
    }
}

impl fmt::Display for PiScaled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pi_power {
            0 => write!(f, "{}", self.coefficient),
            k => write!(f, "{}·π^{}", self.coefficient, k),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PiScaledRepr {
    coefficient: String,
    pi_power: u32,
}

impl Serialize for PiScaled {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        PiScaledRepr { coefficient: self.coefficient.to_string(), pi_power: self.pi_power }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PiScaled {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = PiScaledRepr::deserialize(deserializer)?;
        let c = parse_rational(&repr.coefficient).map_err(serde::de::Error::custom)?;
        PiScaled::new(c, repr.pi_power).map_err(serde::de::Error::custom)
    }
}

/// Ordering of the variants is the solver's pivot order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SumKind {
    Zeta,
    Eta,
    Lambda,
}

impl SumKind {
    pub const ALL: [SumKind; 3] = [SumKind::Zeta, SumKind::Eta, SumKind::Lambda];

    pub fn name(self) -> &'static str {
        match self {
            SumKind::Zeta => "zeta",
            SumKind::Eta => "eta",
            SumKind::Lambda => "lambda",
        }
    }
}

impl FromStr for SumKind {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zeta" | "ζ" => Ok(SumKind::Zeta),
            "eta" | "η" => Ok(SumKind::Eta),
            "lambda" | "λ" => Ok(SumKind::Lambda),
            other => Err(AlgebraError::InvalidSymbol(format!("unknown sum kind {other:?}"))),
        }
    }
}

/// One of ζ(p), η(p), λ(p) at an even argument `p ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SumSymbol {
    kind: SumKind,
    argument: u32,
}

impl SumSymbol {
    pub fn new(kind: SumKind, argument: u32) -> Result<Self, AlgebraError> {
        if argument < 2 || !argument.is_multiple_of(2) {
            return Err(AlgebraError::InvalidSymbol(format!(
                "{}({argument}): argument must be even and at least 2",
                kind.name()
            )));
        }
        Ok(Self { kind, argument })
    }

    pub fn zeta(p: u32) -> Self {
        Self::new(SumKind::Zeta, p).expect("even argument ≥ 2")
    }

    pub fn eta(p: u32) -> Self {
        Self::new(SumKind::Eta, p).expect("even argument ≥ 2")
    }

    pub fn lambda(p: u32) -> Self {
        Self::new(SumKind::Lambda, p).expect("even argument ≥ 2")
    }

    pub fn kind(&self) -> SumKind {
        self.kind
    }

    pub fn argument(&self) -> u32 {
        self.argument
    }
}

impl fmt::Display for SumSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.kind.name(), self.argument)
    }
}

/// `constant + Σ coefficient · X_symbol`, with no zero coefficients stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinearForm {
    constant: Rational,
    terms: BTreeMap<SumSymbol, Rational>,
}

impl LinearForm {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn constant_form(constant: Rational) -> Self {
        Self { constant, terms: BTreeMap::new() }
    }

    pub fn term(symbol: SumSymbol, coefficient: Rational) -> Self {
        let mut form = Self::new();
        form.add_term(symbol, coefficient);
        form
    }

    pub fn constant(&self) -> &Rational {
        &self.constant
    }

    pub fn terms(&self) -> &BTreeMap<SumSymbol, Rational> {
        &self.terms
    }

    pub fn coefficient(&self, symbol: &SumSymbol) -> Rational {
        self.terms.get(symbol).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn symbols(&self) -> impl Iterator<Item = &SumSymbol> {
        self.terms.keys()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_constant(&mut self, value: &Rational) {
        self.constant += value;
    }

    pub fn add_term(&mut self, symbol: SumSymbol, coefficient: Rational) {
        if coefficient.is_zero() {
            return;
        }
        let entry = self.terms.entry(symbol).or_insert_with(Rational::zero);
        *entry += coefficient;
        if entry.is_zero() {
            self.terms.remove(&symbol);
        }
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::new();
        }
        Self {
            constant: &self.constant * factor,
            terms: self.terms.iter().map(|(s, c)| (*s, c * factor)).collect(),
        }
    }

    pub fn plus(&self, other: &LinearForm) -> Self {
        let mut out = self.clone();
        out.constant += &other.constant;
        for (s, c) in &other.terms {
            out.add_term(*s, c.clone());
        }
        out
    }

    /// Value of the form when every symbol is known; `None` if any is missing.
    pub fn evaluate(&self, values: &BTreeMap<SumSymbol, Rational>) -> Option<Rational> {
        let mut total = self.constant.clone();
        for (s, c) in &self.terms {
            total += c * values.get(s)?;
        }
        Some(total)
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (s, c) in &self.terms {
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            match (first, sign) {
                (true, "-") => write!(f, "-")?,
                (true, _) => {}
                (false, sg) => write!(f, " {sg} ")?,
            }
            write!(f, "{mag}·X[{s}]")?;
            first = false;
        }
        if !self.constant.is_zero() || first {
            let (sign, mag) =
                if self.constant.is_negative() { ("-", -&self.constant) } else { ("+", self.constant.clone()) };
            if first {
                write!(f, "{}", self.constant)?;
            } else {
                write!(f, " {sign} {mag}")?;
            }
        }
        Ok(())
    }
}

/// Outcome of [`solve_exact`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Unique(BTreeMap<SumSymbol, Rational>),
    Underdetermined { resolved: BTreeMap<SumSymbol, Rational>, unresolved: Vec<SumSymbol> },
}

impl Solution {
    pub fn resolved(&self) -> &BTreeMap<SumSymbol, Rational> {
        match self {
            Solution::Unique(values) => values,
            Solution::Underdetermined { resolved, .. } => resolved,
        }
    }

    pub fn unresolved(&self) -> &[SumSymbol] {
        match self {
            Solution::Unique(_) => &[],
            Solution::Underdetermined { unresolved, .. } => unresolved,
        }
    }

    pub fn is_unique(&self) -> bool {
        matches!(self, Solution::Unique(_))
    }
}

/// Solves `form_i = rhs_i` exactly by Gauss-Jordan elimination.
///
/// Columns follow the symbol order (ζ, then η, then λ; ascending argument
/// within a kind) and the pivot is the first nonzero entry at or below the
/// current row. The reduced row echelon form is unique, so the result does
/// not depend on the order of the input equations. A symbol counts as
/// resolved when its pivot row has no entries in free columns.
pub fn solve_exact(system: &[(LinearForm, Rational)]) -> Result<Solution, AlgebraError> {
    let columns: Vec<SumSymbol> =
        system.iter().flat_map(|(f, _)| f.symbols().copied()).collect::<BTreeSet<_>>().into_iter().collect();
    let width = columns.len();
    let mut rows: Vec<Vec<Rational>> = system
        .iter()
        .map(|(form, rhs)| {
            let mut row: Vec<Rational> = columns.iter().map(|s| form.coefficient(s)).collect();
            row.push(rhs - form.constant());
            row
        })
        .collect();

    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut next_row = 0;
    for col in 0..width {
        let Some(found) = (next_row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(next_row, found);
        let inv = rows[next_row][col].recip();
        for v in rows[next_row].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = rows[next_row].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == next_row || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row).skip(col) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        pivots.push((next_row, col));
        next_row += 1;
    }

    if let Some(r) = (next_row..rows.len()).find(|&r| !rows[r][width].is_zero()) {
        return Err(AlgebraError::Inconsistent { row: r, rhs: rows[r][width].to_string() });
    }

    let pivot_cols: BTreeSet<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let free: Vec<usize> = (0..width).filter(|c| !pivot_cols.contains(c)).collect();
    let mut resolved = BTreeMap::new();
    let mut unresolved = Vec::new();
    for &(r, c) in &pivots {
        if free.iter().all(|&f| rows[r][f].is_zero()) {
            resolved.insert(columns[c], rows[r][width].clone());
        } else {
            unresolved.push(columns[c]);
        }
    }
    unresolved.extend(free.iter().map(|&c| columns[c]));
    unresolved.sort();

    Ok(if unresolved.is_empty() { Solution::Unique(resolved) } else { Solution::Underdetermined { resolved, unresolved } })
}

/// `1 - 2^(1-p)`, the factor with `η(p) = (1 - 2^(1-p)) ζ(p)`.
pub fn eta_zeta_factor(p: u32) -> Rational {
    let two_pow = Rational::from_integer(BigInt::one() << (p.saturating_sub(1) as usize));
    Rational::one() - two_pow.recip()
}
