//! Sine-series coefficients, probability weights and energy moments of a
//! box state, all in closed form as functions of the level `n`.
//!
//! Repeated integration by parts of `∫₀¹ P(x) sin(nπx) dx` leaves only the
//! cosine boundary terms, paired with the even derivatives of `P`:
//!
//! ```text
//! c_n = Σ_m (-1)^m [P^(2m)(0) - (-1)^n P^(2m)(1)] / (nπ)^(2m+1)
//! ```
//!
//! The `m = 0` term vanishes by the boundary conditions.

use std::collections::BTreeMap;

use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exactalg::{int, LinearForm, Rational, SumKind, SumSymbol};
use crate::polybox::BoxPolynomial;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpectralError {
    #[error("moment of order {k} diverges: smallest weight power {q_min} leaves Σ n^{exponent}", exponent = 2 * *k as i64 - *q_min as i64)]
    Divergent { k: u32, q_min: u32 },
    #[error("moment order {0} needs the operator-domain acknowledgement")]
    MomentOrderNotEnabled(u32),
}

/// `c_n = Σ_j (α_j + β_j (-1)^n) / (nπ)^j` over odd `j ≥ 3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SineCoefficientForm {
    terms: BTreeMap<u32, (Rational, Rational)>,
}

/// `W(E_n) = Σ_q (U_q + V_q (-1)^n) / (nπ)^q` over even `q ≥ 6`, already
/// divided by the squared norm and multiplied by 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightForm {
    terms: BTreeMap<u32, (Rational, Rational)>,
}

pub fn sine_coefficients(p: &BoxPolynomial) -> SineCoefficientForm {
    let mut terms = BTreeMap::new();
    let mut derivative = p.poly().clone();
    let mut m = 0u32;
    while !derivative.is_zero() {
        let sign = if m.is_multiple_of(2) { int(1) } else { int(-1) };
        let alpha = &sign * derivative.eval(&int(0));
        let beta = -(&sign * derivative.eval(&int(1)));
        if !(alpha.is_zero() && beta.is_zero()) {
            terms.insert(2 * m + 1, (alpha, beta));
        }
        derivative = derivative.nth_derivative(2);
        m += 1;
    }
    debug_assert!(!terms.contains_key(&1));
    SineCoefficientForm { terms }
}

impl SineCoefficientForm {
    pub fn terms(&self) -> &BTreeMap<u32, (Rational, Rational)> {
        &self.terms
    }

    /// Exact coefficients of `π^(-j)` in `c_n`.
    pub fn at(&self, n: u64) -> BTreeMap<u32, Rational> {
        let odd = n % 2 == 1;
        let n = Rational::from_integer(n.into());
        self.terms
            .iter()
            .map(|(&j, (a, b))| {
                let num = if odd { a - b } else { a + b };
                (j, num / pow(&n, j))
            })
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }

    /// `c_n` in double precision.
    pub fn value(&self, n: u64) -> f64 {
        let x = n as f64 * std::f64::consts::PI;
        let odd = n % 2 == 1;
        self.terms
            .iter()
            .map(|(&j, (a, b))| {
                let num = if odd { a - b } else { a + b };
                num.to_f64().expect("finite") / x.powi(j as i32)
            })
            .sum()
    }
}

pub fn weight_form(p: &BoxPolynomial) -> WeightForm {
    let c = sine_coefficients(p);
    let scale = int(2) / p.norm_squared();
    let mut terms: BTreeMap<u32, (Rational, Rational)> = BTreeMap::new();
    for (&j, (aj, bj)) in &c.terms {
        for (&k, (ak, bk)) in &c.terms {
            let entry = terms.entry(j + k).or_insert_with(|| (Rational::zero(), Rational::zero()));
            entry.0 += aj * ak + bj * bk;
            entry.1 += aj * bk + ak * bj;
        }
    }
    terms.retain(|_, (u, v)| !(u.is_zero() && v.is_zero()));
    for (u, v) in terms.values_mut() {
        *u *= &scale;
        *v *= &scale;
    }
    WeightForm { terms }
}

impl WeightForm {
    pub fn terms(&self) -> &BTreeMap<u32, (Rational, Rational)> {
        &self.terms
    }

    pub fn q_min(&self) -> u32 {
        *self.terms.keys().next().expect("a state has a nonzero weight")
    }

    pub fn q_max(&self) -> u32 {
        *self.terms.keys().next_back().expect("a state has a nonzero weight")
    }

    /// Exact coefficients of `π^(2k-q)` in `W(E_n) E_n^k`, keyed by `q`.
    pub fn moment_term(&self, n: u64, k: u32) -> BTreeMap<u32, Rational> {
        let odd = n % 2 == 1;
        let n = Rational::from_integer(n.into());
        self.terms
            .iter()
            .map(|(&q, (u, v))| {
                let num = if odd { u - v } else { u + v };
                let power = q as i64 - 2 * k as i64;
                let value = if power >= 0 { num / pow(&n, power as u32) } else { num * pow(&n, (-power) as u32) };
                (q, value)
            })
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }

    /// `W(E_n) E_n^k` in double precision.
    pub fn moment_term_f64(&self, n: u64, k: u32) -> f64 {
        let x = n as f64 * std::f64::consts::PI;
        let odd = n % 2 == 1;
        self.terms
            .iter()
            .map(|(&q, (u, v))| {
                let num = if odd { u - v } else { u + v };
                num.to_f64().expect("finite") * x.powi(2 * k as i32 - q as i32)
            })
            .sum()
    }

    pub fn value(&self, n: u64) -> f64 {
        self.moment_term_f64(n, 0)
    }

    /// Rigorous bound on `Σ_{n>N} |W(E_n) E_n^k|` from the integral test.
    pub fn moment_tail_bound(&self, k: u32, terms: u64) -> f64 {
        let pi = std::f64::consts::PI;
        let n = terms as f64;
        self.terms
            .iter()
            .map(|(&q, (u, v))| {
                let p = q as i32 - 2 * k as i32;
                let mag = u.to_f64().expect("finite").abs() + v.to_f64().expect("finite").abs();
                mag * pi.powi(-p) * n.powi(1 - p) / (p - 1) as f64
            })
            .sum()
    }
}

impl Serialize for WeightForm {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            q: u32,
            #[serde(rename = "U")]
            u: String,
            #[serde(rename = "V")]
            v: String,
        }
        serializer.collect_seq(self.terms.iter().map(|(&q, (u, v))| Entry { q, u: u.to_string(), v: v.to_string() }))
    }
}

/// `V_q = -U_q` for every `q`: only odd levels contribute.
pub fn detect_lambda_only(w: &WeightForm) -> bool {
    w.terms.values().all(|(u, v)| *v == -u)
}

/// `U_q = V_q` for every `q`: only even levels contribute.
pub fn detect_even_levels_only(w: &WeightForm) -> bool {
    w.terms.values().all(|(u, v)| u == v)
}

/// `Σ_n W(E_n) E_n^k` for `k ≤ 2` as a linear form in `X_s(p) = s(p)/π^p`.
pub fn moment_series(w: &WeightForm, k: u32) -> Result<LinearForm, SpectralError> {
    moment_series_with(w, k, false)
}

/// As [`moment_series`]; orders above 2 are accepted only when
/// `allow_high_orders` is set, and still must converge.
pub fn moment_series_with(w: &WeightForm, k: u32, allow_high_orders: bool) -> Result<LinearForm, SpectralError> {
    if k > 2 && !allow_high_orders {
        return Err(SpectralError::MomentOrderNotEnabled(k));
    }
    let q_min = w.q_min();
    if (q_min as i64) - 2 * (k as i64) < 2 {
        return Err(SpectralError::Divergent { k, q_min });
    }
    let mut form = LinearForm::new();
    if detect_lambda_only(w) {
        for (&q, (u, _)) in &w.terms {
            form.add_term(SumSymbol::lambda(q - 2 * k), int(2) * u);
        }
    } else {
        // Σ (-1)^n / n^p = -η(p)
        for (&q, (u, v)) in &w.terms {
            let p = q - 2 * k;
            form.add_term(SumSymbol::zeta(p), u.clone());
            form.add_term(SumSymbol::eta(p), -v.clone());
        }
    }
    Ok(form)
}

/// Exact value of a moment form given known `X_s(p)` values, or `None` if
/// some symbol is missing. A λ symbol falls back to `(ζ + η)/2`.
pub fn substitute(form: &LinearForm, values: &BTreeMap<SumSymbol, Rational>) -> Option<Rational> {
    let mut total = form.constant().clone();
    for (s, c) in form.terms() {
        let value = match values.get(s) {
            Some(v) => v.clone(),
            None if s.kind() == SumKind::Lambda => {
                let p = s.argument();
                (values.get(&SumSymbol::zeta(p))? + values.get(&SumSymbol::eta(p))?) / int(2)
            }
            None => return None,
        };
        total += c * value;
    }
    Some(total)
}

fn pow(base: &Rational, exp: u32) -> Rational {
    num_traits::pow(base.clone(), exp as usize)
}
