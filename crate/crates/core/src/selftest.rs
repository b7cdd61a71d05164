//! Reduced-scale invariant suites, one per module, for the CLI `--self-test`
//! flag. Each suite re-derives its expected values independently and returns
//! an invariant-violation error on the first failure.

use crate::error::{Error, Result};
use crate::forms::{self, EigenformSpec};
use crate::multfun::{self, StandardRule};
use crate::primes;
use crate::{correlation, lseries, predict, sieve};
use num_complex::Complex64;
use std::sync::Arc;

fn check(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::invariant(format!("self-test failed: {what}")))
    }
}

pub fn primes_suite() -> Result<()> {
    let t = primes::build_spf(100_000)?;
    let pi: usize = (2..=100_000u64).filter(|&n| t.is_prime(n)).count();
    check(pi == 9592, "pi(10^5) = 9592 via SPF")?;
    for n in 2..=20_000u64 {
        let back: u64 = t.factorize(n).iter().map(|&(p, e)| p.pow(e)).product();
        check(back == n, "factorization reconstructs n")?;
    }
    let a = primes::primes_in(1, 500)?.primes;
    let b = primes::primes_in(500, 1000)?.primes;
    let ab = primes::primes_in(1, 1000)?.primes;
    check([a, b].concat() == ab, "interval union")?;
    let none = primes::PrimeInterval::empty();
    let full = primes::prime_reciprocal_sum(50_000, &none)?;
    let excl = primes::primes_in(100, 1000)?;
    let sifted = primes::prime_reciprocal_sum(50_000, &excl)?;
    let removed: f64 = excl.primes.iter().map(|&p| 1.0 / p as f64).sum();
    check(
        (sifted - (full - removed)).abs() < 1e-12,
        "reciprocal-sum exclusion identity",
    )
}

pub fn forms_suite() -> Result<()> {
    let spec = EigenformSpec::delta();
    let exp = forms::integer_q_expansion(&spec, 2000)?;
    let fast = forms::exact_q_expansion(&spec, 2000)?;
    check(exp.coeffs == fast.coeffs, "Δ construction routes agree")?;
    let t = forms::normalize(&exp)?;
    check((t.value(2) + 0.530_330_085_889_910_6).abs() < 1e-12, "λ(2)")?;
    // Hecke relation in exact arithmetic over mn ≤ 400 for each weight.
    for &w in &forms::WEIGHTS {
        let e = forms::integer_q_expansion(&EigenformSpec::new(w)?, 400)?;
        for m in 1..=400u64 {
            for n in 1..=400 / m {
                let mut rhs = num_bigint::BigInt::from(0);
                let g = gcd(m, n);
                for d in 1..=g {
                    if g % d == 0 && (m * n) % (d * d) == 0 {
                        rhs += num_bigint::BigInt::from(d).pow(w - 1) * e.a(m * n / (d * d));
                    }
                }
                check(e.a(m) * e.a(n) == rhs, "exact Hecke relation")?;
            }
        }
    }
    let spf = primes::build_spf(2000)?;
    let ang = forms::satake_angles(&t)?;
    let s2 = forms::sym_power_table(&ang, 2, 2000, &spf)?;
    for p in [2u64, 3, 5, 7, 11, 13] {
        check(
            (s2.value(p) - (t.value(p) * t.value(p) - 1.0)).abs() < 1e-12,
            "sym² prime value",
        )?;
    }
    forms::rs_square_table(&ang, 2, 500, &spf).map(|_| ())
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn multfun_suite() -> Result<()> {
    let spf = primes::build_spf(100_000)?;
    let mu = multfun::materialize(&multfun::standard_rule(StandardRule::Moebius)?, 100_000, &spf)?;
    let q: f64 = (1..=100_000u64).map(|n| mu.value(n).norm_sqr()).sum();
    check(
        (q / 100_000.0 - 6.0 / std::f64::consts::PI.powi(2)).abs() < 0.005,
        "square-free density 6/π²",
    )?;
    for m in 1..=3u32 {
        let a = multfun::materialize(&multfun::standard_rule(StandardRule::TauM(m))?, 2000, &spf)?;
        let b = multfun::materialize(
            &multfun::standard_rule(StandardRule::TauZ(Complex64::new(m as f64, 0.0)))?,
            2000,
            &spf,
        )?;
        for n in 1..=2000u64 {
            check((a.value(n) - b.value(n)).norm() < 1e-9, "τ_z(m) = τ_m")?;
        }
    }
    let lam = Arc::new(forms::lambda_table(&EigenformSpec::delta(), 50_000, &spf)?);
    let lt = multfun::materialize(&multfun::table_rule(lam, "lambda"), 50_000, &spf)?;
    let rep = multfun::hypothesis_i_check(&lt, 0.0, &[10_000, 20_000, 50_000])?;
    check(rep.pass, "Hypothesis (i) for λ with c=0")?;
    let mut prev = f64::INFINITY;
    for z in [100.0, 1000.0, 10_000.0] {
        let r = multfun::hypothesis_ii_check(&lt, 10.0, z, 1.0, &[50_000], &spf)?;
        check(r.ratios[0] <= prev + 1e-12, "sifted sum monotone in Z")?;
        prev = r.ratios[0];
    }
    Ok(())
}

pub fn lseries_suite() -> Result<()> {
    let n = 3000u64;
    let spf = primes::build_spf(n)?;
    let zeta = lseries::TruncatedDirichletSeries::zeta(n);
    let inv = lseries::ds_invert(&zeta)?;
    for k in 1..=n {
        check(
            (inv.c(k).re - spf.moebius(k) as f64).abs() < 1e-11,
            "invert(ζ) = μ",
        )?;
    }
    let chars = lseries::character_table(12)?;
    let phi = chars.len();
    for (i, a) in chars.iter().enumerate() {
        for (j, b) in chars.iter().enumerate() {
            let s: Complex64 = (0..12u64).map(|m| a.value(m) * b.value(m).conj()).sum();
            let expect = if i == j { phi as f64 } else { 0.0 };
            check((s - Complex64::new(expect, 0.0)).norm() < 1e-10, "orthogonality")?;
        }
    }
    let spf6 = primes::build_spf(6000)?;
    let lam = forms::lambda_table(&EigenformSpec::delta(), 6000, &spf6)?;
    for chi in lseries::character_table(7)?.iter().filter(|c| c.primitive) {
        lseries::rs_twist_identity_check(&lam, chi, 2000)?;
    }
    lseries::hd_gq_check(&lam, 2, 3, 1000)?;
    lseries::hd_gq_check(&lam, 1, 1, 500)?;
    Ok(())
}

pub fn correlation_suite() -> Result<()> {
    let x = 2000u64;
    let spf = primes::build_spf(x)?;
    let lam = forms::lambda_table(&EigenformSpec::delta(), x + 1, &spf)?;
    let mu = multfun::materialize(&multfun::standard_rule(StandardRule::Moebius)?, x, &spf)?;
    let part = correlation::bksz_partition(x, 0.0, 0.04, Some((3.0, 9.0)))?;
    part.verify_set_laws()?;
    let dec = correlation::bksz_decompose(&mu, &lam, 1, &part)?;
    check(dec.identity_gap_rel <= 1e-9, "partition regrouping identity")?;
    let rep = correlation::corr_sum(&mu, &lam, 1, x, 1.0)?;
    let s = Complex64::new(rep.value.0, rep.value.1);
    check(s.norm() <= rep.trivial_bound + 1e-6, "triangle inequality")?;
    let w = correlation::wilton_sum(&lam, 0.25, x)?;
    check(w.ratio.unwrap_or(f64::INFINITY) < 5.0, "Wilton square-root scale")?;
    correlation::smoothed_shifted_convolution(&lam, 1, 2, 1, 20.0).map(|_| ())
}

pub fn sieve_suite() -> Result<()> {
    let spf = primes::build_spf(20_000)?;
    let lam = forms::lambda_table(&EigenformSpec::delta(), 12_000, &spf)?;
    let rep = sieve::sandwich_check(&lam, 1, 1, 3, 10_000, 50.0)?;
    check(rep.lower <= rep.sharp && rep.sharp <= rep.upper, "sandwich")?;
    for ell in [1u8, 2] {
        let wt = sieve::SmoothWeight::new(10_000.0, 50.0, ell)?;
        let v = sieve::smooth_weight_mellin(&wt, Complex64::new(1.0, 0.0))?;
        check((v.re - 10_000.0).abs() <= 100.0, "ŵ(1) = X + O(Y)")?;
    }
    let mut prev = f64::INFINITY;
    for z in [100.0, 1000.0, 10_000.0] {
        let r = sieve::sifted_rs_sum(&lam, 1, 10.0, z, 10_000, &spf)?;
        check(r.value <= prev + 1e-12, "sifted sum monotone")?;
        prev = r.value;
    }
    let q = 5u64;
    let mut total = 0.0;
    for a in 0..q {
        total += sieve::ap_rs_sum(&lam, 1, a, q, 9000, &spf)?.value;
    }
    let full: f64 = (1..=9000u64).map(|n| lam.value(n) * lam.value(n)).sum();
    check((total - full).abs() < 1e-9 * full, "residue classes partition the sum")?;
    sieve::sieve_density_product(&lam, 1, 100.0, 10_000.0).map(|_| ())
}

pub fn predict_suite() -> Result<()> {
    for r in 1..=20u32 {
        predict::delta_r(r)?;
    }
    let d1 = predict::delta_r(1)?;
    check(
        (d1.closed_form - (1.0 - 8.0 / (3.0 * std::f64::consts::PI))).abs() < 1e-12,
        "δ₁ closed form",
    )?;
    let xs = vec![1_000u64, 10_000, 100_000, 1_000_000];
    let sums: Vec<f64> = xs
        .iter()
        .map(|&x| 0.7 * x as f64 / (x as f64).ln().powf(0.2))
        .collect();
    let fit = predict::wirsing_fit_from_sums(&xs, &sums)?;
    check((fit.delta_hat - 0.2).abs() < 1e-3, "planted Wirsing exponent")?;
    let spf = primes::build_spf(20_000)?;
    let lam = forms::lambda_table(&EigenformSpec::delta(), 20_000, &spf)?;
    let s = predict::singular_series(&lam, &lam, 10_000)?;
    check(s.value.is_finite() && s.value > 0.0, "singular series finite")?;
    Ok(())
}

/// Trait-object-free registry used by the CLI.
pub fn run(module: &str) -> Result<()> {
    match module {
        "primes" => primes_suite(),
        "forms" => forms_suite(),
        "multfun" => multfun_suite(),
        "lseries" => lseries_suite(),
        "correlation" => correlation_suite(),
        "sieve" => sieve_suite(),
        "predict" => predict_suite(),
        other => Err(Error::precondition(format!("unknown module '{other}'"))),
    }
}
