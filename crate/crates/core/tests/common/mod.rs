//! Independent oracles shared by the integration tests. Nothing here calls
//! into the solver; values come from Bernoulli numbers, quadrature and
//! plain polynomial arithmetic.

#![allow(dead_code)]

use boxsums::poly::Poly;
use boxsums::{BoxPolynomial, Rational, SumKind};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn pow2(e: u32) -> Rational {
    Rational::from_integer(BigInt::one() << e)
}

/// B_0..=B_n by the Akiyama–Tanigawa algorithm (B_1 = +1/2 convention).
pub fn bernoulli(n: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(n + 1);
    let mut a: Vec<Rational> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        a.push(q(1, m as i64 + 1));
        for j in (1..=m).rev() {
            a[j - 1] = Rational::from_integer(BigInt::from(j)) * (&a[j - 1] - &a[j]);
        }
        out.push(a[0].clone());
    }
    out
}

fn factorial(n: u32) -> Rational {
    (1..=n).fold(Rational::one(), |acc, k| acc * Rational::from_integer(BigInt::from(k)))
}

/// `s(p) / π^p` for even `p ≥ 2`, from ζ(2m) = (-1)^(m+1) B_2m (2π)^2m / (2 (2m)!).
pub fn closed_form(kind: SumKind, p: u32) -> Rational {
    let b = &bernoulli(p as usize)[p as usize];
    let zeta = (b * pow2(p) / (Rational::from_integer(2.into()) * factorial(p))).abs();
    match kind {
        SumKind::Zeta => zeta,
        SumKind::Eta => (Rational::one() - Rational::one() / pow2(p - 1)) * zeta,
        SumKind::Lambda => (Rational::one() - Rational::one() / pow2(p)) * zeta,
    }
}

/// Gauss–Legendre nodes and weights on [0, 1].
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push(((x + 1.0) / 2.0, w / 2.0));
    }
    out
}

/// `∫₀¹ P(x) sin(nπx) dx` by composite Gauss–Legendre quadrature.
pub fn sine_integral(p: &Poly, n: u64) -> f64 {
    let nodes = gauss_legendre(24);
    let panels = 8;
    let h = 1.0 / panels as f64;
    let coeffs: Vec<f64> = p.coeffs().iter().map(|c| c.to_f64().unwrap()).collect();
    let eval = |x: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c);
    let mut total = 0.0;
    for k in 0..panels {
        for &(t, w) in &nodes {
            let x = (k as f64 + t) * h;
            total += w * h * eval(x) * (n as f64 * std::f64::consts::PI * x).sin();
        }
    }
    total
}

fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    q(rng.gen_range(-9..=9), rng.gen_range(1..=6))
}

/// `x(1-x) Q(x)` with random rational `Q` of degree ≤ `max_degree - 2`.
/// Every third draw is symmetric about x = 1/2 so shifted-even states occur.
pub fn random_state<R: Rng>(rng: &mut R, max_degree: usize) -> BoxPolynomial {
    let base = Poly::from_ints(&[0, 1, -1]);
    loop {
        let q_poly = if rng.gen_range(0..3) == 0 {
            let s = Poly::from_ints(&[0, -1, 1]);
            let terms = rng.gen_range(0..=(max_degree - 2) / 2);
            (0..=terms).fold(Poly::zero(), |acc, j| &acc + &s.pow(j as u32).scale(&random_rational(rng)))
        } else {
            let deg = rng.gen_range(0..=max_degree - 2);
            Poly::new((0..=deg).map(|_| random_rational(rng)).collect())
        };
        if q_poly.is_zero() {
            continue;
        }
        return BoxPolynomial::from_poly(&base * &q_poly).expect("vanishes at the walls");
    }
}

/// `P(1/2 + t)` is even in `t`, checked on the coefficients of the shifted polynomial.
pub fn shifted_even(p: &Poly) -> bool {
    let shifted = p.compose(&Poly::new(vec![q(1, 2), q(1, 1)]));
    shifted.coeffs().iter().enumerate().all(|(i, c)| i % 2 == 0 || c.is_zero())
}

pub fn shifted_odd(p: &Poly) -> bool {
    let shifted = p.compose(&Poly::new(vec![q(1, 2), q(1, 1)]));
    shifted.coeffs().iter().enumerate().all(|(i, c)| i % 2 == 1 || c.is_zero())
}

/// `∫₀¹ P` straight from the coefficients.
pub fn integral01(p: &Poly) -> Rational {
    p.coeffs().iter().enumerate().map(|(i, c)| c / Rational::from_integer(BigInt::from(i + 1))).sum()
}

pub fn seeded(seed: u64) -> rand_chacha::ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}
