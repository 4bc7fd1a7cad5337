//! Runs every acceptance criterion and prints one PASS/FAIL line each.
//! Exits non-zero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::time::Instant;

use boxsums::cli::run_args;
use boxsums::deriver::{build_equation, classify, derive, direct_moment, reproduce_table, ClosedFormTable, DeriveOptions};
use boxsums::numeric::verify_state;
use boxsums::polybox::worked_examples;
use boxsums::spectral::{detect_lambda_only, substitute};
use boxsums::{sine_coefficients, weight_form, LinearForm, Rational, SumKind, SumSymbol};
use common::*;
use num_traits::One;

/// Absolute tolerance between closed-form c_n and quadrature.
const COEFFICIENT_TOLERANCE: f64 = 1e-12;
/// Relative float slack added to every tail bound.
const FLOAT_SLACK: f64 = 1e-12;
const RANDOM_CASES: usize = 240;
const RANDOM_SEED: u64 = 20_240_601;
const TERMS: u64 = 100_000;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn cli(args: &[&str], stdin: &str) -> boxsums::cli::RunOutput {
    let mut argv = vec!["boxsums"];
    argv.extend_from_slice(args);
    run_args(argv, &mut stdin.as_bytes())
}

fn ensure(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn derived_table() -> Result<(ClosedFormTable, String), String> {
    let out = cli(&["derive", "--max-p", "16", "--format", "json"], "");
    ensure(out.code == 0, || format!("derive exited {}: {}", out.code, out.stderr))?;
    let table = ClosedFormTable::from_json(&out.stdout).map_err(|e| e.to_string())?;
    Ok((table, out.stderr))
}

fn criterion_1() -> Check {
    let (table, notes) = derived_table()?;
    let printed: &[(SumKind, u32, i64, i64)] = &[
        (SumKind::Zeta, 4, 1, 90),
        (SumKind::Zeta, 6, 1, 945),
        (SumKind::Zeta, 8, 1, 9450),
        (SumKind::Zeta, 10, 1, 93555),
        (SumKind::Zeta, 12, 691, 638512875),
        (SumKind::Zeta, 14, 2, 18243225),
        (SumKind::Zeta, 16, 3617, 325641566250),
        (SumKind::Eta, 4, 7, 720),
        (SumKind::Eta, 8, 127, 1209600),
        (SumKind::Eta, 10, 73, 6842880),
        (SumKind::Eta, 12, 1414477, 1307674368000),
        (SumKind::Eta, 14, 8191, 74724249600),
        (SumKind::Eta, 16, 16931177, 1524374691840000),
        (SumKind::Lambda, 2, 1, 8),
        (SumKind::Lambda, 4, 1, 96),
        (SumKind::Lambda, 6, 1, 960),
        (SumKind::Lambda, 8, 17, 161280),
        (SumKind::Lambda, 10, 31, 2903040),
        (SumKind::Lambda, 12, 691, 638668800),
    ];
    let mut checked = 0;
    for &(kind, p, n, d) in printed {
        let symbol = SumSymbol::new(kind, p).unwrap();
        let got = table.get(&symbol).ok_or_else(|| format!("{symbol} missing"))?;
        ensure(got.coefficient() == &q(n, d) && got.pi_power() == p, || format!("{symbol}: got {got}, printed {n}/{d}"))?;
        checked += 1;
    }
    for p in (2..=16).step_by(2) {
        for kind in [SumKind::Zeta, SumKind::Eta, SumKind::Lambda] {
            let symbol = SumSymbol::new(kind, p).unwrap();
            let got = table.get(&symbol).ok_or_else(|| format!("{symbol} missing"))?;
            let oracle = closed_form(kind, p);
            ensure(got.coefficient() == &oracle, || format!("{symbol}: got {got}, Bernoulli oracle {oracle}"))?;
        }
    }
    let eta6 = table.get(&SumSymbol::eta(6)).unwrap().coefficient().clone();
    ensure(eta6 == q(31, 30240), || format!("eta(6) = {eta6}"))?;
    ensure(eta6 == (Rational::one() - q(1, 32)) * closed_form(SumKind::Zeta, 6), || "eta(6) breaks the zeta relation".into())?;
    let mut acc = boxsums::numeric::CompensatedSum::default();
    for n in 1..=TERMS {
        let t = (n as f64).powi(-6);
        acc.add(if n % 2 == 1 { t } else { -t });
    }
    ensure((acc.value() - 0.9855510912).abs() < 1e-10, || format!("eta(6) partial sum {}", acc.value()))?;
    let closed = 31.0 / 30240.0 * std::f64::consts::PI.powi(6);
    ensure((closed - acc.value()).abs() < 1e-12, || "eta(6) closed form off its partial sum".into())?;
    ensure(notes.contains("eta(6)") && notes.contains("31/31240"), || format!("discrepancy not flagged: {notes:?}"))?;
    Ok(format!("{checked} printed values and 24 oracle values equal; eta(6) = 31/30240·π^6, printed 31240 flagged"))
}

fn criterion_2() -> Check {
    let expected = [q(5, 1), q(21, 1), q(7, 1), q(54, 5), q(24, 1)];
    let states = worked_examples();
    for ((name, s), e) in states.iter().zip(&expected) {
        let got = s.mean_energy_hbar2_over_m();
        ensure(&got == e, || format!("<H>[{name}] = {got}, expected {e}"))?;
    }
    let w1 = weight_form(&states[0].1);
    ensure(w1.terms().get(&6) == Some(&(q(480, 1), q(-480, 1))) && w1.terms().len() == 1, || format!("x(1-x) weights {:?}", w1.terms()))?;
    let w2 = weight_form(&states[1].1);
    ensure(w2.terms().get(&6) == Some(&(q(30240, 1), q(30240, 1))), || format!("x(1-x)(1-2x) weights {:?}", w2.terms()))?;
    // (Hψ, Hψ) in units of ħ⁴/m²a⁴ is a quarter of the ħ²/2m value
    let h2 = states[0].1.mean_h2() / q(4, 1);
    ensure(h2 == q(30, 1), || format!("(Hψ,Hψ) = {h2}"))?;
    Ok("mean energies 5, 21, 7, 54/5, 24; W at q=6 (480,-480) and (30240,30240); (Hψ,Hψ) = 30".into())
}

fn printed_row(zeta4: i64, eta4: i64, pair6: i64, pair8: i64) -> LinearForm {
    // c·[1-(-1)^n]/n^p sums to c·(ζ(p) + η(p))
    let mut f = LinearForm::new();
    f.add_term(SumSymbol::zeta(4), q(zeta4, 1));
    f.add_term(SumSymbol::eta(4), q(eta4, 1));
    for (p, c) in [(6, pair6), (8, pair8)] {
        f.add_term(SumSymbol::zeta(p), q(c, 1));
        f.add_term(SumSymbol::eta(p), q(c, 1));
    }
    f
}

fn criterion_3() -> Check {
    let rows = [
        ("x^3*(1-x)", printed_row(36, 0, -288, 1152), q(3, 70)),
        ("x^2*(1-x)*(1-2*x)", printed_row(68, 32, -960, 4608), q(4, 105)),
    ];
    let mut factors = Vec::new();
    for (text, lhs, rhs) in rows {
        let s = boxsums::BoxPolynomial::parse(text).unwrap();
        let eq = build_equation(&s, 1).map_err(|e| e.to_string())?;
        let factor = &eq.rhs / &rhs;
        ensure(eq.lhs == lhs.scaled(&factor), || format!("{text}: {} is not {factor} × ({lhs})", eq.lhs))?;
        factors.push(format!("{factor}"));
    }
    Ok(format!("both rows match up to factors {}", factors.join(" and ")))
}

fn criterion_4() -> Check {
    let table = derive(18, &DeriveOptions::default()).map_err(|e| e.to_string())?;
    let known = table.normalized();
    let mut rng = seeded(RANDOM_SEED);
    let (mut moments, mut lambda_only) = (0, 0);
    for case in 0..RANDOM_CASES {
        let s = random_state(&mut rng, 8);
        let p = s.poly();
        let d1 = p.derivative();
        let d2 = d1.derivative();
        ensure(integral01(&(&d1 * &d1)) == -integral01(&(p * &d2)), || format!("case {case}: integration by parts fails for {p}"))?;
        let c = sine_coefficients(&s);
        for n in 1..=20 {
            let diff = (c.value(n) - sine_integral(p, n)).abs();
            ensure(diff <= COEFFICIENT_TOLERANCE, || format!("case {case}: c_{n} off quadrature by {diff:e} for {p}"))?;
        }
        for k in 0..=2 {
            if let Ok(eq) = build_equation(&s, k) {
                let value = substitute(&eq.lhs, &known).ok_or_else(|| format!("case {case}: table misses a symbol of {}", eq.lhs))?;
                ensure(value == direct_moment(&s, k), || format!("case {case}: nonzero residual at k={k} for {p}"))?;
                moments += 1;
            }
        }
        let lo = detect_lambda_only(&weight_form(&s));
        ensure(lo == shifted_even(p), || format!("case {case}: lambda-only {lo} but shifted parity disagrees for {p}"))?;
        lambda_only += lo as usize;
    }
    Ok(format!("{RANDOM_CASES} states (seed {RANDOM_SEED}), {moments} moment equations with zero residual, {lambda_only} lambda-only"))
}

fn criterion_5() -> Check {
    let options = DeriveOptions::default();
    ensure(!options.use_relations, || "default options use relations".into())?;
    let table = derive(16, &options).map_err(|e| e.to_string())?;
    let x = table.normalized();
    let mut checked = 0;
    for p in (2..=16).step_by(2) {
        let (z, e, l) = (&x[&SumSymbol::zeta(p)], &x[&SumSymbol::eta(p)], &x[&SumSymbol::lambda(p)]);
        let factor = Rational::one() - Rational::one() / pow2(p - 1);
        ensure(*e == &factor * z, || format!("eta({p}) != (1 - 2^(1-p)) zeta({p})"))?;
        ensure(z + e == q(2, 1) * l, || format!("zeta({p}) + eta({p}) != 2 lambda({p})"))?;
        checked += 1;
    }
    ensure(table.relation_violations().is_empty(), || format!("{:?}", table.relation_violations()))?;
    Ok(format!("both relations hold exactly at {checked} arguments without relation equations"))
}

fn slack(v: f64) -> f64 {
    FLOAT_SLACK * v.abs().max(1.0)
}

fn criterion_6() -> Check {
    let terms = TERMS.to_string();
    let out = cli(&["verify", "--max-p", "16", "--terms", &terms, "--format", "json"], "");
    ensure(out.code == 0, || format!("verify exited {}", out.code))?;
    let mut entries = 0;
    for line in out.stdout.lines() {
        let r: serde_json::Value = serde_json::from_str(line).map_err(|e| e.to_string())?;
        let (residual, tail, partial) = (r["residual"].as_f64().unwrap(), r["tail_bound"].as_f64().unwrap(), r["partial_sum"].as_f64().unwrap());
        ensure(residual <= tail + slack(partial), || format!("{}: residual {residual:e} > tail {tail:e}", r["target"]))?;
        entries += 1;
    }
    ensure(entries == 24, || format!("{entries} entries verified"))?;
    let table = derive(16, &DeriveOptions::default()).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for (name, s) in worked_examples() {
        let parseval = &verify_state(&s, &table, TERMS).map_err(|e| e.to_string())?[0];
        ensure(parseval.residual <= parseval.tail_bound + slack(1.0), || format!("Parseval for {name}: residual {:e}", parseval.residual))?;
        worst = worst.max(parseval.residual);
    }
    Ok(format!("{entries} entries within tail + slack at N = {TERMS}; Parseval worst residual {worst:.1e}"))
}

fn criterion_7() -> Check {
    let table_i: BTreeMap<usize, Vec<u32>> = [
        (2, vec![4]),
        (3, vec![4]),
        (4, vec![4, 6, 8]),
        (5, vec![4, 6, 8]),
        (6, vec![4, 6, 8, 10, 12]),
        (7, vec![4, 6, 8, 10, 12]),
        (8, vec![4, 6, 8, 10, 12, 14, 16]),
    ]
    .into();
    for (&d, expected) in &table_i {
        let got = classify(d).map_err(|e| e.to_string())?.attainable_p;
        ensure(&got == expected, || format!("degree {d}: {got:?} vs {expected:?}"))?;
    }
    let options = DeriveOptions { use_relations: true, ..DeriveOptions::default() };
    let rows = reproduce_table(8, &options).map_err(|e| e.to_string())?;
    let entries = |d: usize| rows.iter().find(|r| r.degree == d).map(|r| r.table.normalized()).unwrap_or_default();
    ensure(entries(5) == entries(4) && !entries(4).is_empty(), || "degree 5 adds or loses sums".into())?;
    ensure(entries(7) == entries(6), || "degree 7 adds or loses sums".into())?;
    for r in &rows {
        ensure(r.missing.is_empty(), || format!("degree {} leaves {:?} open", r.degree, r.missing))?;
    }
    Ok("degrees 2..8 match the p columns; degree 5 and 7 add nothing new".into())
}

fn main() {
    let start = Instant::now();
    let criteria: [Criterion; 7] = [
        ("exact closed-form table", criterion_1),
        ("worked-example equalities", criterion_2),
        ("two-row system from the quartic states", criterion_3),
        ("randomized property suite", criterion_4),
        ("relation invariants", criterion_5),
        ("numerical verification", criterion_6),
        ("degree classification", criterion_7),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    println!("{}/{} criteria passed in {:.2?}", criteria.len() - failed, criteria.len(), start.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
