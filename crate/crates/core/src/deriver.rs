//! Moment equations from polynomial families, solved exactly for ζ, η and
//! λ at even arguments.
//!
//! Each state `P` gives one equation per moment order `k`: the spectral sum
//! `Σ W(E_n) E_n^k` (a linear form in the unknowns `X = s(p)/π^p`) equals
//! the directly integrated value. The moment sums are quadratic in `P`, so a
//! basis alone does not exhaust the information carried by a degree; the
//! generator also feeds pairwise sums of basis members, which makes the
//! equation set span every bilinear combination.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decimal::{pi_scaled_decimal, pi_scaled_f64};
use crate::exactalg::{eta_zeta_factor, int, parse_rational, ratio, solve_exact, AlgebraError, LinearForm, PiScaled, Rational, SumKind, SumSymbol};
use crate::polybox::{centered_even_family, standard_family, BoxPolynomial, ShiftedParity};
use crate::spectral::{detect_lambda_only, moment_series_with, substitute, weight_form, SpectralError, WeightForm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeriveError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("underdetermined up to degree {degree}: unresolved {}", list(.unresolved))]
    Underdetermined { degree: usize, unresolved: Vec<SumSymbol> },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("cross-check failed for {symbol}: solved {solved} but (ζ+η)/2 gives {combined}")]
    CrossCheck { symbol: SumSymbol, solved: String, combined: String },
    #[error("malformed table: {0}")]
    Table(String),
}

fn list(symbols: &[SumSymbol]) -> String {
    symbols.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// `lhs = rhs` for one state and one moment order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentEquation {
    pub lhs: LinearForm,
    pub rhs: Rational,
    pub state: String,
    pub order: u32,
}

impl fmt::Display for MomentEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} k={}] {} = {}", self.state, self.order, self.lhs, self.rhs)
    }
}

/// Right side of the order-`k` equation: `(H^⌈k/2⌉ψ, H^⌊k/2⌋ψ) / N`.
pub fn direct_moment(p: &BoxPolynomial, k: u32) -> Rational {
    let k = k as usize;
    p.operator_form(k.div_ceil(2), k / 2) / p.norm_squared()
}

pub fn build_equation(p: &BoxPolynomial, k: u32) -> Result<MomentEquation, DeriveError> {
    build_equation_with(p, k, false)
}

pub fn build_equation_with(p: &BoxPolynomial, k: u32, allow_high_orders: bool) -> Result<MomentEquation, DeriveError> {
    let lhs = moment_series_with(&weight_form(p), k, allow_high_orders)?;
    Ok(MomentEquation { lhs, rhs: direct_moment(p, k), state: p.to_string(), order: k })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeriveOptions {
    /// Add `η(p) = (1 - 2^(1-p)) ζ(p)` and `ζ(p) + η(p) = 2λ(p)` as equations.
    pub use_relations: bool,
    pub moment_orders: BTreeSet<u32>,
    /// Accept moment orders above 2 (operator-domain caveat acknowledged).
    pub allow_high_orders: bool,
}

impl Default for DeriveOptions {
    fn default() -> Self {
        Self { use_relations: false, moment_orders: [1, 2].into_iter().collect(), allow_high_orders: false }
    }
}

/// How an entry of a [`ClosedFormTable`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntrySource {
    /// Directly from the moment equations.
    Solved,
    /// `λ(p) = (ζ(p) + η(p))/2`.
    Combined,
    /// Fixed only once the ζ/η/λ relations were added.
    Relation,
    /// Read from an external table.
    Imported,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableEntry {
    pub value: PiScaled,
    pub source: EntrySource,
}

/// Exact values `s(p) = c · π^p`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClosedFormTable {
    entries: BTreeMap<SumSymbol, TableEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableRecord {
    pub kind: SumKind,
    pub p: u32,
    pub coefficient: String,
    pub pi_power: u32,
    #[serde(default)]
    pub decimal: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<EntrySource>,
}

impl ClosedFormTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, symbol: SumSymbol, coefficient: Rational, source: EntrySource) {
        let value = PiScaled::new(coefficient, symbol.argument()).expect("even argument");
        self.entries.insert(symbol, TableEntry { value, source });
    }

    pub fn get(&self, symbol: &SumSymbol) -> Option<&PiScaled> {
        self.entries.get(symbol).map(|e| &e.value)
    }

    pub fn entry(&self, symbol: &SumSymbol) -> Option<&TableEntry> {
        self.entries.get(symbol)
    }

    pub fn entries(&self) -> &BTreeMap<SumSymbol, TableEntry> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Normalized unknowns `X = s(p)/π^p`, i.e. the coefficients.
    pub fn normalized(&self) -> BTreeMap<SumSymbol, Rational> {
        self.entries.iter().map(|(s, e)| (*s, e.value.coefficient().clone())).collect()
    }

    pub fn arguments(&self) -> BTreeSet<u32> {
        self.entries.keys().map(SumSymbol::argument).collect()
    }

    /// Violations of `η = (1 - 2^(1-p)) ζ` and `ζ + η = 2λ` among present entries.
    pub fn relation_violations(&self) -> Vec<String> {
        let x = self.normalized();
        let mut out = Vec::new();
        for p in self.arguments() {
            let (z, e, l) = (x.get(&SumSymbol::zeta(p)), x.get(&SumSymbol::eta(p)), x.get(&SumSymbol::lambda(p)));
            if let (Some(z), Some(e)) = (z, e) {
                if *e != eta_zeta_factor(p) * z {
                    out.push(format!("eta({p}) != (1 - 2^{}) zeta({p})", 1 - p as i64));
                }
                if let Some(l) = l {
                    if z + e != int(2) * l {
                        out.push(format!("zeta({p}) + eta({p}) != 2 lambda({p})"));
                    }
                }
            }
        }
        out
    }

    pub fn records(&self) -> Vec<TableRecord> {
        self.entries
            .iter()
            .map(|(s, e)| TableRecord {
                kind: s.kind(),
                p: s.argument(),
                coefficient: e.value.coefficient().to_string(),
                pi_power: e.value.pi_power(),
                decimal: pi_scaled_decimal(&e.value),
                source: Some(e.source),
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.records()).expect("serializable")
    }

    pub fn from_records(records: &[TableRecord]) -> Result<Self, DeriveError> {
        let mut table = Self::new();
        for r in records {
            let symbol = SumSymbol::new(r.kind, r.p)?;
            let coefficient = parse_rational(&r.coefficient)?;
            if !coefficient.is_zero() && r.pi_power != r.p {
                return Err(DeriveError::Table(format!("{symbol}: pi_power {} differs from argument", r.pi_power)));
            }
            table.insert(symbol, coefficient, EntrySource::Imported);
        }
        Ok(table)
    }

    pub fn from_json(text: &str) -> Result<Self, DeriveError> {
        let records: Vec<TableRecord> = serde_json::from_str(text).map_err(|e| DeriveError::Table(e.to_string()))?;
        Self::from_records(&records)
    }

    pub fn value_f64(&self, symbol: &SumSymbol) -> Option<f64> {
        self.get(symbol).map(pi_scaled_f64)
    }
}

/// States fed to the solver, grouped by the degree at which they first appear.
///
/// For each degree `d`: the basis `x^(j+1)(1-x)` for `j` ascending, the
/// centred-even state of degree `d` when `d` is even, then pairwise sums of
/// basis members not already generated. Duplicates are skipped.
pub fn generation_plan(max_degree: usize) -> Vec<(usize, Vec<BoxPolynomial>)> {
    let mut seen: HashSet<BoxPolynomial> = HashSet::new();
    let mut plan = Vec::new();
    for d in 2..=max_degree {
        let basis: Vec<BoxPolynomial> = (0..=d - 2).map(|j| standard_family(d, j).expect("valid index")).collect();
        let mut fresh = Vec::new();
        let mut push = |p: BoxPolynomial, fresh: &mut Vec<BoxPolynomial>| {
            if seen.insert(p.clone()) {
                fresh.push(p);
            }
        };
        for b in &basis {
            push(b.clone(), &mut fresh);
        }
        if d % 2 == 0 {
            push(centered_even_family(d / 2).expect("m ≥ 1"), &mut fresh);
        }
        for i in 0..basis.len() {
            for j in i + 1..basis.len() {
                let sum = BoxPolynomial::from_poly(basis[i].poly() + basis[j].poly()).expect("sum of states");
                push(sum, &mut fresh);
            }
        }
        plan.push((d, fresh));
    }
    plan
}

fn validate_orders(options: &DeriveOptions) -> Result<(), DeriveError> {
    if options.moment_orders.is_empty() {
        return Err(DeriveError::InvalidArgument("no moment orders selected".into()));
    }
    if let Some(&k) = options.moment_orders.iter().find(|&&k| k > 2) {
        if !options.allow_high_orders {
            return Err(SpectralError::MomentOrderNotEnabled(k).into());
        }
    }
    Ok(())
}

fn equations_for(states: &[BoxPolynomial], options: &DeriveOptions) -> Result<Vec<MomentEquation>, DeriveError> {
    let mut out = Vec::new();
    for p in states {
        for &k in &options.moment_orders {
            match build_equation_with(p, k, options.allow_high_orders) {
                Ok(eq) => out.push(eq),
                Err(DeriveError::Spectral(SpectralError::Divergent { .. })) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

/// `η(p) - (1 - 2^(1-p)) ζ(p) = 0` and `ζ(p) + η(p) - 2λ(p) = 0` for each argument.
fn relation_equations(arguments: &BTreeSet<u32>) -> Vec<(LinearForm, Rational)> {
    let mut out = Vec::new();
    for &p in arguments {
        let mut eta = LinearForm::term(SumSymbol::eta(p), int(1));
        eta.add_term(SumSymbol::zeta(p), -eta_zeta_factor(p));
        out.push((eta, int(0)));
        let mut lambda = LinearForm::term(SumSymbol::zeta(p), int(1));
        lambda.add_term(SumSymbol::eta(p), int(1));
        lambda.add_term(SumSymbol::lambda(p), int(-2));
        out.push((lambda, int(0)));
    }
    out
}

fn as_system(equations: &[MomentEquation]) -> Vec<(LinearForm, Rational)> {
    equations.iter().map(|e| (e.lhs.clone(), e.rhs.clone())).collect()
}

/// Full result of a derivation run.
#[derive(Debug, Clone)]
pub struct Derivation {
    pub table: ClosedFormTable,
    pub equations: Vec<MomentEquation>,
    pub max_degree_used: usize,
}

/// Arguments `p` whose ζ and η values `derive(max_p, ..)` targets.
pub fn target_arguments(max_p: u32, options: &DeriveOptions) -> BTreeSet<u32> {
    let mut args: BTreeSet<u32> = (4..=max_p).step_by(2).collect();
    if options.moment_orders.contains(&2) {
        args.insert(2);
    }
    args
}

pub fn derive(max_p: u32, options: &DeriveOptions) -> Result<ClosedFormTable, DeriveError> {
    derive_detailed(max_p, options).map(|d| d.table)
}

pub fn derive_detailed(max_p: u32, options: &DeriveOptions) -> Result<Derivation, DeriveError> {
    if max_p < 2 || !max_p.is_multiple_of(2) {
        return Err(DeriveError::InvalidArgument(format!("max_p must be even and at least 2, got {max_p}")));
    }
    validate_orders(options)?;
    if max_p == 2 && !options.moment_orders.contains(&2) {
        return Err(DeriveError::InvalidArgument("p = 2 is only reachable through moment order 2".into()));
    }
    let targets = target_arguments(max_p, options);
    let wanted: Vec<SumSymbol> = targets.iter().flat_map(|&p| [SumSymbol::zeta(p), SumSymbol::eta(p)]).collect();
    let relations = if options.use_relations { relation_equations(&targets) } else { Vec::new() };

    let max_degree = (max_p as usize).max(4);
    let mut equations = Vec::new();
    let mut last_unresolved = wanted.clone();
    for (degree, states) in generation_plan(max_degree) {
        equations.extend(equations_for(&states, options)?);
        let mut system = as_system(&equations);
        system.extend(relations.iter().cloned());
        let solution = solve_exact(&system)?;
        let values = solution.resolved();
        last_unresolved = wanted.iter().filter(|s| !values.contains_key(s)).copied().collect();
        if !last_unresolved.is_empty() {
            continue;
        }
        let independent = if options.use_relations {
            solve_exact(&as_system(&equations))?.resolved().clone()
        } else {
            values.clone()
        };
        let mut table = ClosedFormTable::new();
        for &p in &targets {
            for s in [SumSymbol::zeta(p), SumSymbol::eta(p)] {
                let source = if independent.contains_key(&s) { EntrySource::Solved } else { EntrySource::Relation };
                table.insert(s, values[&s].clone(), source);
            }
            add_lambda(&mut table, values, p)?;
        }
        return Ok(Derivation { table, equations, max_degree_used: degree });
    }
    Err(DeriveError::Underdetermined { degree: max_degree, unresolved: last_unresolved })
}

/// Inserts λ(p) as `(ζ+η)/2`, checking it against a directly solved λ.
fn add_lambda(table: &mut ClosedFormTable, values: &BTreeMap<SumSymbol, Rational>, p: u32) -> Result<(), DeriveError> {
    let lambda = SumSymbol::lambda(p);
    let pair = (values.get(&SumSymbol::zeta(p)), values.get(&SumSymbol::eta(p)));
    match (pair, values.get(&lambda)) {
        ((Some(z), Some(e)), direct) => {
            let combined = (z + e) / int(2);
            if let Some(d) = direct {
                if *d != combined {
                    return Err(DeriveError::CrossCheck { symbol: lambda, solved: d.to_string(), combined: combined.to_string() });
                }
            }
            table.insert(lambda, combined, EntrySource::Combined);
        }
        (_, Some(d)) => table.insert(lambda, d.clone(), EntrySource::Solved),
        _ => {}
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeClassification {
    pub degree: usize,
    pub attainable_p: Vec<u32>,
}

/// Even degree `n` reaches `p = 4..=2n`, odd degree `n` reaches `p = 4..=2n-2`.
pub fn classify(degree: usize) -> Result<DegreeClassification, DeriveError> {
    if degree < 2 {
        return Err(DeriveError::InvalidArgument(format!("degree must be at least 2, got {degree}")));
    }
    let top = if degree.is_multiple_of(2) { 2 * degree } else { 2 * degree - 2 } as u32;
    Ok(DegreeClassification { degree, attainable_p: (4..=top).step_by(2).collect() })
}

#[derive(Debug, Clone)]
pub struct TableRow {
    pub degree: usize,
    pub attainable_p: Vec<u32>,
    pub table: ClosedFormTable,
    /// Symbols at attainable arguments that the equations of this degree do not fix.
    pub missing: Vec<SumSymbol>,
}

/// One row per degree `2..=max_degree`, each solved only with states of that
/// degree or lower and restricted to the attainable arguments.
pub fn reproduce_table(max_degree: usize, options: &DeriveOptions) -> Result<Vec<TableRow>, DeriveError> {
    if max_degree < 2 {
        return Err(DeriveError::InvalidArgument(format!("max_degree must be at least 2, got {max_degree}")));
    }
    validate_orders(options)?;
    let mut rows = Vec::new();
    let mut equations = Vec::new();
    for (degree, states) in generation_plan(max_degree) {
        equations.extend(equations_for(&states, options)?);
        let attainable = classify(degree)?.attainable_p;
        let args: BTreeSet<u32> = attainable.iter().copied().collect();
        let mut system = as_system(&equations);
        if options.use_relations {
            system.extend(relation_equations(&args));
        }
        let values = solve_exact(&system)?.resolved().clone();
        let mut table = ClosedFormTable::new();
        let mut missing = Vec::new();
        for &p in &attainable {
            for s in [SumSymbol::zeta(p), SumSymbol::eta(p)] {
                match values.get(&s) {
                    Some(v) => table.insert(s, v.clone(), EntrySource::Solved),
                    None => missing.push(s),
                }
            }
            add_lambda(&mut table, &values, p)?;
            if table.get(&SumSymbol::lambda(p)).is_none() {
                missing.push(SumSymbol::lambda(p));
            }
        }
        missing.sort();
        rows.push(TableRow { degree, attainable_p: attainable, table, missing });
    }
    Ok(rows)
}

/// Published closed forms for ζ, η, λ at p = 2..16, transcribed as printed.
/// The η(6) entry is printed with denominator 31240.
pub const PUBLISHED: &[(SumKind, u32, &str)] = &[
    (SumKind::Zeta, 2, "1/6"),
    (SumKind::Zeta, 4, "1/90"),
    (SumKind::Zeta, 6, "1/945"),
    (SumKind::Zeta, 8, "1/9450"),
    (SumKind::Zeta, 10, "1/93555"),
    (SumKind::Zeta, 12, "691/638512875"),
    (SumKind::Zeta, 14, "2/18243225"),
    (SumKind::Zeta, 16, "3617/325641566250"),
    (SumKind::Eta, 2, "1/12"),
    (SumKind::Eta, 4, "7/720"),
    (SumKind::Eta, 6, "31/31240"),
    (SumKind::Eta, 8, "127/1209600"),
    (SumKind::Eta, 10, "73/6842880"),
    (SumKind::Eta, 12, "1414477/1307674368000"),
    (SumKind::Eta, 14, "8191/74724249600"),
    (SumKind::Eta, 16, "16931177/1524374691840000"),
    (SumKind::Lambda, 2, "1/8"),
    (SumKind::Lambda, 4, "1/96"),
    (SumKind::Lambda, 6, "1/960"),
    (SumKind::Lambda, 8, "17/161280"),
    (SumKind::Lambda, 10, "31/2903040"),
    (SumKind::Lambda, 12, "691/638668800"),
    (SumKind::Lambda, 14, "5461/49816166400"),
    (SumKind::Lambda, 16, "929569/83691159552000"),
];

pub fn published_table() -> ClosedFormTable {
    let mut t = ClosedFormTable::new();
    for &(kind, p, c) in PUBLISHED {
        t.insert(SumSymbol::new(kind, p).expect("valid"), parse_rational(c).expect("valid"), EntrySource::Imported);
    }
    t
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub symbol: String,
    pub derived: String,
    pub published: String,
}

impl fmt::Display for Discrepancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: derived {} but published value reads {}", self.symbol, self.derived, self.published)
    }
}

/// Entries of `table` that differ from [`PUBLISHED`].
pub fn published_discrepancies(table: &ClosedFormTable) -> Vec<Discrepancy> {
    let published = published_table();
    table
        .entries()
        .iter()
        .filter_map(|(s, e)| {
            let p = published.get(s)?;
            (p != &e.value).then(|| Discrepancy { symbol: s.to_string(), derived: e.value.to_string(), published: p.to_string() })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentReport {
    pub k: u32,
    /// `None` when the series diverges.
    pub form: Option<String>,
    pub rhs: String,
    /// Exact `lhs - rhs` under the supplied table, when it covers the form.
    pub residual: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Analysis {
    pub polynomial: String,
    pub degree: usize,
    pub norm_squared: String,
    /// In units of ħ²/(2m), well width 1.
    pub mean_energy: String,
    /// In units of ħ²/m.
    pub mean_energy_hbar2_over_m: String,
    /// In units of (ħ²/(2m))².
    pub mean_h2: String,
    /// In units of ħ⁴/m².
    pub mean_h2_hbar4_over_m2: String,
    pub weight_form: WeightForm,
    pub moments: Vec<MomentReport>,
    pub shift_parity: ShiftedParity,
    pub lambda_only: bool,
    pub node_count: usize,
}

pub fn analyze(p: &BoxPolynomial, table: Option<&ClosedFormTable>) -> Analysis {
    let w = weight_form(p);
    let known = table.map(ClosedFormTable::normalized);
    let moments = (0..=2)
        .map(|k| {
            let rhs = direct_moment(p, k);
            match moment_series_with(&w, k, false) {
                Ok(form) => {
                    let residual = known.as_ref().and_then(|x| substitute(&form, x)).map(|v| (v - &rhs).to_string());
                    MomentReport { k, form: Some(form.to_string()), rhs: rhs.to_string(), residual }
                }
                Err(_) => MomentReport { k, form: None, rhs: rhs.to_string(), residual: None },
            }
        })
        .collect();
    Analysis {
        polynomial: p.to_string(),
        degree: p.degree(),
        norm_squared: p.norm_squared().to_string(),
        mean_energy: p.mean_energy().to_string(),
        mean_energy_hbar2_over_m: p.mean_energy_hbar2_over_m().to_string(),
        mean_h2: p.mean_h2().to_string(),
        mean_h2_hbar4_over_m2: (p.mean_h2() / int(4)).to_string(),
        lambda_only: detect_lambda_only(&w),
        weight_form: w,
        moments,
        shift_parity: p.shift_parity(),
        node_count: p.node_count(),
    }
}

/// Largest argument a state's moment equations can involve (order 1).
pub fn max_argument_for(p: &BoxPolynomial) -> u32 {
    weight_form(p).q_max() - 2
}

/// Values of `s(p)` in double precision, for sanity displays.
pub fn approx(table: &ClosedFormTable, symbol: &SumSymbol) -> Option<f64> {
    table.get(symbol).map(|v| (v.coefficient().to_f64().unwrap_or(f64::NAN)) * std::f64::consts::PI.powi(v.pi_power() as i32))
}

/// Exact `η(6)` check value: `(1 - 2⁻⁵) ζ(6)` with `ζ(6) = π⁶/945`.
pub fn eta6_from_relation() -> Rational {
    eta_zeta_factor(6) * ratio(1, 945)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(text: &str) -> BoxPolynomial {
        BoxPolynomial::parse(text).unwrap()
    }

    #[test]
    fn equations_of_worked_states() {
        let eq = build_equation(&state("x*(1-x)"), 1).unwrap();
        assert_eq!(eq.lhs, LinearForm::term(SumSymbol::lambda(4), int(960)));
        assert_eq!(eq.rhs, int(10));
        let eq = build_equation(&state("x*(1-x)*(1-2*x)"), 1).unwrap();
        assert_eq!(eq.lhs.coefficient(&SumSymbol::zeta(4)), int(30240));
        assert_eq!(eq.lhs.coefficient(&SumSymbol::eta(4)), int(-30240));
        assert_eq!(eq.rhs, int(42));
        let eq = build_equation(&state("x*(1-x)"), 2).unwrap();
        assert_eq!(eq.lhs, LinearForm::term(SumSymbol::lambda(2), int(960)));
        assert_eq!(eq.rhs, int(120));
        assert_eq!(build_equation(&state("x*(1-x)"), 0).unwrap().rhs, int(1));
    }

    #[test]
    fn derive_four() {
        let t = derive(4, &DeriveOptions::default()).unwrap();
        assert_eq!(t.get(&SumSymbol::zeta(4)).unwrap().coefficient(), &ratio(1, 90));
        assert_eq!(t.get(&SumSymbol::eta(4)).unwrap().coefficient(), &ratio(7, 720));
        assert_eq!(t.get(&SumSymbol::lambda(4)).unwrap().coefficient(), &ratio(1, 96));
        assert_eq!(t.get(&SumSymbol::zeta(2)).unwrap().coefficient(), &ratio(1, 6));
        assert!(t.relation_violations().is_empty());
    }

    #[test]
    fn derive_two_only() {
        let opts = DeriveOptions { moment_orders: [2].into_iter().collect(), ..Default::default() };
        let t = derive(2, &opts).unwrap();
        assert_eq!(t.get(&SumSymbol::zeta(2)).unwrap().coefficient(), &ratio(1, 6));
        assert_eq!(t.get(&SumSymbol::eta(2)).unwrap().coefficient(), &ratio(1, 12));
        assert_eq!(t.get(&SumSymbol::lambda(2)).unwrap().coefficient(), &ratio(1, 8));
        let k1 = DeriveOptions { moment_orders: [1].into_iter().collect(), ..Default::default() };
        assert!(matches!(derive(2, &k1), Err(DeriveError::InvalidArgument(_))));
    }

    #[test]
    fn derive_rejects_bad_arguments() {
        assert!(derive(5, &DeriveOptions::default()).is_err());
        assert!(derive(0, &DeriveOptions::default()).is_err());
        let high = DeriveOptions { moment_orders: [1, 3].into_iter().collect(), ..Default::default() };
        assert!(matches!(derive(4, &high), Err(DeriveError::Spectral(SpectralError::MomentOrderNotEnabled(3)))));
        let none = DeriveOptions { moment_orders: BTreeSet::new(), ..Default::default() };
        assert!(derive(4, &none).is_err());
    }

    #[test]
    fn relations_flag_marks_sources() {
        let opts = DeriveOptions { use_relations: true, ..Default::default() };
        let t = derive(8, &opts).unwrap();
        let plain = derive(8, &DeriveOptions::default()).unwrap();
        assert_eq!(t.normalized(), plain.normalized());
    }

    #[test]
    fn classification() {
        assert_eq!(classify(2).unwrap().attainable_p, vec![4]);
        assert_eq!(classify(3).unwrap().attainable_p, vec![4]);
        assert_eq!(classify(4).unwrap().attainable_p, vec![4, 6, 8]);
        assert_eq!(classify(5).unwrap().attainable_p, vec![4, 6, 8]);
        assert_eq!(classify(8).unwrap().attainable_p, vec![4, 6, 8, 10, 12, 14, 16]);
        assert!(classify(1).is_err());
    }

    #[test]
    fn table_json_round_trip() {
        let t = derive(6, &DeriveOptions::default()).unwrap();
        let back = ClosedFormTable::from_json(&t.to_json()).unwrap();
        assert_eq!(back.normalized(), t.normalized());
        assert!(ClosedFormTable::from_json(r#"[{"kind":"zeta","p":4,"coefficient":"1/90","pi_power":6}]"#).is_err());
        assert!(ClosedFormTable::from_json(r#"[{"kind":"zeta","p":3,"coefficient":"1/90","pi_power":3}]"#).is_err());
    }

    #[test]
    fn eta_six_discrepancy_is_reported() {
        let t = derive(6, &DeriveOptions::default()).unwrap();
        assert_eq!(t.get(&SumSymbol::eta(6)).unwrap().coefficient(), &ratio(31, 30240));
        assert_eq!(eta6_from_relation(), ratio(31, 30240));
        let d = published_discrepancies(&t);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].symbol, "eta(6)");
        assert_eq!(d[0].published, "31/31240·π^6");
    }

    #[test]
    fn analysis_bundle() {
        let t = derive(4, &DeriveOptions::default()).unwrap();
        let a = analyze(&state("x*(1-x)"), Some(&t));
        assert_eq!(a.mean_energy_hbar2_over_m, "5");
        assert_eq!(a.mean_h2_hbar4_over_m2, "30");
        assert!(a.lambda_only);
        assert_eq!(a.node_count, 0);
        assert_eq!(a.moments[1].residual.as_deref(), Some("0"));
        assert_eq!(a.moments[2].residual.as_deref(), Some("0"));
        // Parseval needs λ(6), not in a p ≤ 4 table
        assert_eq!(a.moments[0].residual, None);
        assert_eq!(analyze(&state("x^3*(1-x)"), None).mean_energy_hbar2_over_m, "54/5");
        assert_eq!(analyze(&state("x^2*(1-x)*(1-2*x)"), None).mean_energy_hbar2_over_m, "24");
    }
}
