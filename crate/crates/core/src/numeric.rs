//! Floating-point checks of exact results: partial sums with integral-test
//! tail bounds, and spectral moment sums of individual states.
//!
//! All sums run serially in ascending `n` with Neumaier compensation, so a
//! report is bit-identical across runs.

use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::decimal::{pi_scaled_decimal, pi_scaled_f64, to_decimal, SIGNIFICANT_DIGITS};
use crate::deriver::{direct_moment, ClosedFormTable};
use crate::exactalg::{SumKind, SumSymbol};
use crate::polybox::BoxPolynomial;
use crate::spectral::{moment_series, substitute, weight_form, SpectralError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Compensated running sum (Neumaier's variant of Kahan summation).
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialSum {
    pub sum: f64,
    pub tail_bound: f64,
}

/// First `terms` terms of the defining series of `symbol` and a bound on the rest.
///
/// ζ and λ use the integral test; η, being alternating with decreasing
/// terms, is bounded by its first omitted term. λ sums `n = 0..terms`.
pub fn partial_sum(symbol: SumSymbol, terms: u64) -> Result<PartialSum, NumericError> {
    if terms < 2 {
        return Err(NumericError::InvalidArgument(format!("need at least 2 terms, got {terms}")));
    }
    let p = symbol.argument() as i32;
    let mut acc = CompensatedSum::default();
    let n_last = terms as f64;
    let tail_bound = match symbol.kind() {
        SumKind::Zeta => {
            for n in 1..=terms {
                acc.add((n as f64).powi(-p));
            }
            n_last.powi(1 - p) / (p - 1) as f64
        }
        SumKind::Eta => {
            for n in 1..=terms {
                let t = (n as f64).powi(-p);
                acc.add(if n % 2 == 1 { t } else { -t });
            }
            (n_last + 1.0).powi(-p)
        }
        SumKind::Lambda => {
            for n in 0..terms {
                acc.add((2.0 * n as f64 + 1.0).powi(-p));
            }
            (2.0 * n_last - 1.0).powi(1 - p) / (2.0 * (p - 1) as f64)
        }
    };
    Ok(PartialSum { sum: acc.value(), tail_bound })
}

/// `10⁻¹² · max(1, |value|)`
pub fn float_slack(value: f64) -> f64 {
    1e-12 * value.abs().max(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub target: String,
    /// Exact value rendered to 50 significant digits.
    pub closed_value: String,
    pub partial_sum: f64,
    pub tail_bound: f64,
    /// `|closed - partial|`
    pub residual: f64,
    /// For state checks: exact `lhs - rhs` of the moment equation under the table.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_residual: Option<String>,
    pub pass: bool,
}

impl VerificationReport {
    fn new(target: String, closed_value: String, closed: f64, partial: PartialSum) -> Self {
        let residual = (closed - partial.sum).abs();
        let pass = residual <= partial.tail_bound + float_slack(closed);
        Self { target, closed_value, partial_sum: partial.sum, tail_bound: partial.tail_bound, residual, exact_residual: None, pass }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

/// One report per table entry.
pub fn verify_table(table: &ClosedFormTable, terms: u64) -> Result<Vec<VerificationReport>, NumericError> {
    if table.is_empty() {
        return Err(NumericError::InvalidArgument("empty table".into()));
    }
    table
        .entries()
        .iter()
        .map(|(symbol, entry)| {
            let partial = partial_sum(*symbol, terms)?;
            Ok(VerificationReport::new(
                symbol.to_string(),
                pi_scaled_decimal(&entry.value),
                pi_scaled_f64(&entry.value),
                partial,
            ))
        })
        .collect()
}

/// Sums `W(E_n) E_n^k` for `k = 0, 1, 2` to `terms` levels and compares with
/// 1, `⟨H⟩` and `⟨H²⟩` computed directly. When `table` fixes every symbol
/// of a moment form, the exact substitution residual must also vanish.
pub fn verify_state(p: &BoxPolynomial, table: &ClosedFormTable, terms: u64) -> Result<Vec<VerificationReport>, NumericError> {
    if terms < 2 {
        return Err(NumericError::InvalidArgument(format!("need at least 2 terms, got {terms}")));
    }
    let w = weight_form(p);
    let known = table.normalized();
    let mut reports = Vec::new();
    for k in 0..=2u32 {
        let form = moment_series(&w, k)?;
        let exact = direct_moment(p, k);
        let mut acc = CompensatedSum::default();
        for n in 1..=terms {
            acc.add(w.moment_term_f64(n, k));
        }
        let partial = PartialSum { sum: acc.value(), tail_bound: w.moment_tail_bound(k, terms) };
        let label = match k {
            0 => "sum W(E_n)",
            1 => "sum W(E_n) E_n",
            _ => "sum W(E_n) E_n^2",
        };
        let mut report = VerificationReport::new(
            format!("{p} :: {label}"),
            to_decimal(&exact, SIGNIFICANT_DIGITS),
            exact.to_f64().expect("finite"),
            partial,
        );
        if let Some(v) = substitute(&form, &known) {
            let r = v - &exact;
            report.pass &= r == num_traits::Zero::zero();
            report.exact_residual = Some(r.to_string());
        }
        reports.push(report);
    }
    Ok(reports)
}

/// `W(E_n)` for `n = 1..=levels`.
pub fn weights(p: &BoxPolynomial, levels: u64) -> Vec<f64> {
    let w = weight_form(p);
    (1..=levels).map(|n| w.value(n)).collect()
}
