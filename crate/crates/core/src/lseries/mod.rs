//! Truncated Dirichlet-series algebra and coefficient-level verification of
//! the L-function identities the correlation argument leans on: the twisted
//! Rankin–Selberg factorization, the `H_d`/`G_q` Euler-factor corrections for
//! `λ(dn)²` with coprimality constraints, and the residue of `L(s, φ⊗φ)` at
//! `s = 1` computed two independent ways.

pub mod character;

pub use character::{character_table, DirichletCharacter};

use crate::error::{Error, Result};
use crate::forms::CoefficientTable;
use crate::multfun::materialize_c64;
use crate::primes::{build_spf, SmallestPrimeFactorTable};
use crate::util::fit_line;
use num_complex::Complex64;
use serde::Serialize;
use std::collections::HashMap;

/// Complex coefficient vector `c(1..=limit)` of a Dirichlet series.
#[derive(Debug, Clone)]
pub struct TruncatedDirichletSeries {
    pub limit: u64,
    coeffs: Vec<Complex64>,
}

impl TruncatedDirichletSeries {
    pub fn from_fn(limit: u64, f: impl Fn(u64) -> Complex64) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); limit as usize + 1];
        for n in 1..=limit {
            coeffs[n as usize] = f(n);
        }
        TruncatedDirichletSeries { limit, coeffs }
    }

    /// Multiplicative identity: `(1, 0, 0, …)`.
    pub fn one(limit: u64) -> Self {
        Self::from_fn(limit, |n| Complex64::new(if n == 1 { 1.0 } else { 0.0 }, 0.0))
    }

    /// ζ-coefficients (all ones).
    pub fn zeta(limit: u64) -> Self {
        Self::from_fn(limit, |_| Complex64::new(1.0, 0.0))
    }

    pub fn from_table(table: &CoefficientTable, limit: u64) -> Result<Self> {
        if table.limit < limit {
            return Err(Error::precondition("series: table too short"));
        }
        Ok(Self::from_fn(limit, |n| Complex64::new(table.value(n), 0.0)))
    }

    pub fn from_character(chi: &DirichletCharacter, limit: u64) -> Self {
        Self::from_fn(limit, |n| chi.value(n))
    }

    #[inline]
    pub fn c(&self, n: u64) -> Complex64 {
        self.coeffs[n as usize]
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }
}

/// Dirichlet convolution `c(n) = Σ_{d|n} a(d) b(n/d)`, exact over the
/// hyperbola `d·m ≤ N`.
pub fn ds_multiply(
    a: &TruncatedDirichletSeries,
    b: &TruncatedDirichletSeries,
) -> Result<TruncatedDirichletSeries> {
    if a.limit != b.limit {
        return Err(Error::precondition("ds_multiply: limit mismatch"));
    }
    let n = a.limit;
    let mut out = vec![Complex64::new(0.0, 0.0); n as usize + 1];
    for d in 1..=n {
        let ad = a.coeffs[d as usize];
        if ad.norm_sqr() == 0.0 {
            continue;
        }
        for m in 1..=n / d {
            out[(d * m) as usize] += ad * b.coeffs[m as usize];
        }
    }
    Ok(TruncatedDirichletSeries { limit: n, coeffs: out })
}

/// Dirichlet inverse: `ds_multiply(a, inv) = one` up to the limit.
pub fn ds_invert(a: &TruncatedDirichletSeries) -> Result<TruncatedDirichletSeries> {
    let a1 = a.coeffs[1];
    if a1.norm() == 0.0 {
        return Err(Error::precondition("ds_invert: c(1) = 0 is not invertible"));
    }
    let n = a.limit;
    let mut b = vec![Complex64::new(0.0, 0.0); n as usize + 1];
    b[1] = Complex64::new(1.0, 0.0) / a1;
    for d in 1..=n {
        if d > 1 {
            b[d as usize] = -b[d as usize] / a1;
        }
        let bd = b[d as usize];
        if bd.norm_sqr() == 0.0 {
            continue;
        }
        for m in 2..=n / d {
            let t = bd * a.coeffs[m as usize];
            b[(d * m) as usize] += t;
        }
    }
    Ok(TruncatedDirichletSeries { limit: n, coeffs: b })
}

/// Argument dilation realizing `L(k·s)`: coefficient at `n` moves to `n^k`.
pub fn ds_dilate(a: &TruncatedDirichletSeries, k: u32) -> Result<TruncatedDirichletSeries> {
    if k < 1 {
        return Err(Error::precondition("ds_dilate: k >= 1"));
    }
    let n = a.limit;
    let mut out = vec![Complex64::new(0.0, 0.0); n as usize + 1];
    for m in 1..=n {
        let mk = m.checked_pow(k).filter(|&v| v <= n);
        match mk {
            Some(idx) => out[idx as usize] = a.coeffs[m as usize],
            None => break,
        }
    }
    Ok(TruncatedDirichletSeries { limit: n, coeffs: out })
}

// ---------------------------------------------------------------------------
// Local Euler factors
// ---------------------------------------------------------------------------

/// A local Euler factor `L_p(s) = 1 / poly(p^{−s})`; `poly[0] = 1`.
#[derive(Debug, Clone)]
pub struct LocalFactor {
    pub prime: u64,
    pub poly: Vec<Complex64>,
}

impl LocalFactor {
    pub fn new(prime: u64, poly: Vec<Complex64>) -> Result<Self> {
        if poly.is_empty() || (poly[0] - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
            return Err(Error::precondition("LocalFactor: constant term must be 1"));
        }
        Ok(LocalFactor { prime, poly })
    }

    /// Series expansion of `1/poly(x)` to `x^{e_max}`.
    pub fn expand(&self, e_max: u32) -> Vec<Complex64> {
        let mut c = vec![Complex64::new(0.0, 0.0); e_max as usize + 1];
        c[0] = Complex64::new(1.0, 0.0);
        for e in 1..=e_max as usize {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 1..=e.min(self.poly.len() - 1) {
                acc += self.poly[t] * c[e - t];
            }
            c[e] = -acc;
        }
        c
    }
}

/// Hecke local polynomial `1 − λ(p)x + x²`.
pub fn hecke_local_factor(p: u64, lambda_p: f64) -> LocalFactor {
    LocalFactor {
        prime: p,
        poly: vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(-lambda_p, 0.0),
            Complex64::new(1.0, 0.0),
        ],
    }
}

/// Twisted symmetric-square local polynomial
/// `(1−α²χ(p)x)(1−χ(p)x)(1−β²χ(p)x)` with `α = e^{iθ_p}`.
pub fn sym2_twist_local_factor(p: u64, lambda_p: f64, chi_p: Complex64) -> LocalFactor {
    let theta = (lambda_p / 2.0).clamp(-1.0, 1.0).acos();
    let a2 = Complex64::from_polar(1.0, 2.0 * theta);
    let b2 = Complex64::from_polar(1.0, -2.0 * theta);
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    for root in [a2 * chi_p, chi_p, b2 * chi_p] {
        let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
        for (i, &c) in poly.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c * root;
        }
        poly = next;
    }
    LocalFactor { prime: p, poly }
}

/// Expand `∏_p L_p` into Dirichlet coefficients up to `limit`.
pub fn ds_from_local_factors(
    factory: impl Fn(u64) -> LocalFactor,
    limit: u64,
    spf: &SmallestPrimeFactorTable,
) -> Result<TruncatedDirichletSeries> {
    let cache = std::cell::RefCell::new(HashMap::<u64, Vec<Complex64>>::new());
    let expansion = |p: u64, e: u32| -> Complex64 {
        let mut c = cache.borrow_mut();
        let entry = c.entry(p).or_insert_with(|| {
            let e_max = (limit as f64).log(p as f64).floor() as u32 + 1;
            factory(p).expand(e_max)
        });
        entry[e as usize]
    };
    let values = materialize_c64(
        limit,
        spf,
        |p| Ok(expansion(p, 1)),
        |p, e, _| Ok(expansion(p, e)),
    )?;
    Ok(TruncatedDirichletSeries { limit, coeffs: values })
}

// ---------------------------------------------------------------------------
// Identity checks
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct DeviationReport {
    pub limit: u64,
    pub max_abs_deviation: f64,
    pub argmax: u64,
    pub tolerance: f64,
}

fn deviation_report(
    limit: u64,
    lhs: impl Fn(u64) -> Complex64,
    rhs: impl Fn(u64) -> Complex64,
    tolerance: f64,
    what: &str,
) -> Result<DeviationReport> {
    let mut max_abs = 0.0f64;
    let mut argmax = 1u64;
    for n in 1..=limit {
        let d = (lhs(n) - rhs(n)).norm();
        if d > max_abs {
            max_abs = d;
            argmax = n;
        }
    }
    let report = DeviationReport { limit, max_abs_deviation: max_abs, argmax, tolerance };
    if max_abs > tolerance {
        return Err(Error::invariant(format!(
            "{what}: max deviation {max_abs:.3e} at n={argmax} exceeds {tolerance:.1e}"
        )));
    }
    Ok(report)
}

/// Coefficient-level check of the twisted Rankin–Selberg factorization
/// `L(s, φ_χ⊗φ) = L(2s, χ)^{−1} L(s, χ) L(s, sym²φ⊗χ)`:
/// the right side's n-th coefficient must equal `λ(n)²·χ(n)`.
pub fn rs_twist_identity_check(
    table: &CoefficientTable,
    chi: &DirichletCharacter,
    limit: u64,
) -> Result<DeviationReport> {
    if limit > 100_000 {
        return Err(Error::precondition("rs_twist_identity_check: limit <= 10^5"));
    }
    if table.limit < limit {
        return Err(Error::precondition("rs_twist_identity_check: table too short"));
    }
    let spf = build_spf(limit.max(2))?;
    let chi_series = TruncatedDirichletSeries::from_character(chi, limit);
    let l2_inv = ds_dilate(&ds_invert(&chi_series)?, 2)?;
    let sym2 = ds_from_local_factors(
        |p| sym2_twist_local_factor(p, table.value(p), chi.value(p)),
        limit,
        &spf,
    )?;
    let rhs = ds_multiply(&ds_multiply(&l2_inv, &chi_series)?, &sym2)?;
    deviation_report(
        limit,
        |n| {
            let l = table.value(n);
            chi.value(n) * (l * l)
        },
        |n| rhs.c(n),
        1e-8,
        "decomposition of L(s, φ_χ⊗φ)",
    )
}

/// `H_d(s)` as a Dirichlet series supported on divisors built of `p | d`:
/// `∏_{p|d} (1+p^{−s})^{−1} (λ(p)² − λ(p²)p^{−s} + p^{−2s})`.
fn hd_series(
    table: &CoefficientTable,
    d: u64,
    limit: u64,
    spf: &SmallestPrimeFactorTable,
) -> Result<TruncatedDirichletSeries> {
    let mut series = TruncatedDirichletSeries::one(limit);
    for (p, _) in spf.factorize(d) {
        let lp = table.value(p);
        let lp2 = lp * lp - 1.0;
        let num = [
            Complex64::new(lp * lp, 0.0),
            Complex64::new(-lp2, 0.0),
            Complex64::new(1.0, 0.0),
        ];
        series = ds_multiply(&series, &local_rational_series(p, &num, limit))?;
    }
    Ok(series)
}

/// `G_q(s) = ∏_{p|q} (1+p^{−s})^{−1} (1 − λ(p²)p^{−s} + λ(p²)p^{−2s} − p^{−3s})`.
fn gq_series(
    table: &CoefficientTable,
    q: u64,
    limit: u64,
    spf: &SmallestPrimeFactorTable,
) -> Result<TruncatedDirichletSeries> {
    let mut series = TruncatedDirichletSeries::one(limit);
    for (p, _) in spf.factorize(q) {
        let lp = table.value(p);
        let lp2 = lp * lp - 1.0;
        let num = [
            Complex64::new(1.0, 0.0),
            Complex64::new(-lp2, 0.0),
            Complex64::new(lp2, 0.0),
            Complex64::new(-1.0, 0.0),
        ];
        series = ds_multiply(&series, &local_rational_series(p, &num, limit))?;
    }
    Ok(series)
}

/// Expand `num(x)/(1+x)` at `x = p^{−s}` into a series supported on powers
/// of `p`.
fn local_rational_series(p: u64, num: &[Complex64], limit: u64) -> TruncatedDirichletSeries {
    let e_max = (limit as f64).log(p as f64).floor() as u32;
    // num(x)·Σ(−x)^e: c[e] = Σ_t num[t]·(−1)^{e−t}
    let mut c = vec![Complex64::new(0.0, 0.0); e_max as usize + 1];
    for e in 0..=e_max as usize {
        let mut acc = Complex64::new(0.0, 0.0);
        for (t, &nt) in num.iter().enumerate() {
            if t <= e {
                acc += nt * if (e - t) % 2 == 0 { 1.0 } else { -1.0 };
            }
        }
        c[e] = acc;
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); limit as usize + 1];
    let mut pe = 1u64;
    for e in 0..=e_max as usize {
        coeffs[pe as usize] = c[e];
        pe = pe.saturating_mul(p);
        if pe > limit {
            break;
        }
    }
    TruncatedDirichletSeries { limit, coeffs }
}

/// Verifies `Σ_{(n,q)=1} λ(dn)²/n^s = L(s, φ⊗φ)·H_d(s)·G_q(s)` at the
/// coefficient level (d square-free, gcd(d, q) = 1).
pub fn hd_gq_check(
    table: &CoefficientTable,
    d: u64,
    q: u64,
    limit: u64,
) -> Result<DeviationReport> {
    if limit > 10_000 {
        return Err(Error::precondition("hd_gq_check: limit <= 10^4"));
    }
    let spf = build_spf((limit * d).max(q).max(2))?;
    if spf.factorize(d).iter().any(|&(_, e)| e > 1) {
        return Err(Error::precondition("hd_gq_check: d must be square-free"));
    }
    if num_gcd(d, q) != 1 {
        return Err(Error::precondition("hd_gq_check: gcd(d, q) = 1 required"));
    }
    if table.limit < d * limit {
        return Err(Error::precondition("hd_gq_check: table must cover d·limit"));
    }
    let lhs = TruncatedDirichletSeries::from_fn(limit, |n| {
        if num_gcd(n, q) != 1 {
            Complex64::new(0.0, 0.0)
        } else {
            let v = table.value(d * n);
            Complex64::new(v * v, 0.0)
        }
    });
    let rs = TruncatedDirichletSeries::from_fn(limit, |n| {
        let v = table.value(n);
        Complex64::new(v * v, 0.0)
    });
    let rhs = ds_multiply(
        &ds_multiply(&rs, &hd_series(table, d, limit, &spf)?)?,
        &gq_series(table, q, limit, &spf)?,
    )?;
    deviation_report(
        limit,
        |n| lhs.c(n),
        |n| rhs.c(n),
        1e-8,
        "H_d/G_q factorization",
    )
}

fn num_gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// `H_d(1, φ⊗φ)` (numeric value at `s = 1`).
pub fn hd_at_one(table: &CoefficientTable, d: u64, spf: &SmallestPrimeFactorTable) -> f64 {
    let mut v = 1.0f64;
    for (p, _) in spf.factorize(d) {
        let pf = p as f64;
        let lp = table.value(p);
        let lp2 = lp * lp - 1.0;
        v *= (lp * lp - lp2 / pf + 1.0 / (pf * pf)) / (1.0 + 1.0 / pf);
    }
    v
}

/// `G_q(1, φ⊗φ)`.
pub fn gq_at_one(table: &CoefficientTable, q: u64, spf: &SmallestPrimeFactorTable) -> f64 {
    let mut v = 1.0f64;
    for (p, _) in spf.factorize(q) {
        let pf = p as f64;
        let lp = table.value(p);
        let lp2 = lp * lp - 1.0;
        v *= (1.0 - lp2 / pf + lp2 / (pf * pf) - 1.0 / (pf * pf * pf)) / (1.0 + 1.0 / pf);
    }
    v
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidueEstimate {
    pub euler_value: f64,
    pub empirical_slope: f64,
    pub relative_gap: f64,
    pub prime_cut: u64,
    /// Crude multiplicative envelope for the truncated Euler tail:
    /// factors beyond the cut lie within `1 ± tail_bound` each in aggregate.
    pub tail_bound: f64,
}

/// Euler-product value of `Res_{s=1} L(s, φ⊗φ) = L(1, sym²φ)/ζ(2)`,
/// truncated at `prime_cut`.
pub fn rs_residue_euler(table: &CoefficientTable, prime_cut: u64) -> Result<f64> {
    if !table.is_eigenvalue_kind() {
        return Err(Error::precondition(
            "rs_residue_euler: need a normalized eigenform table",
        ));
    }
    if prime_cut > table.limit {
        return Err(Error::precondition("rs_residue_euler: cut beyond table"));
    }
    let primes = crate::primes::primes_up_to(prime_cut);
    let mut euler = 6.0 / (std::f64::consts::PI * std::f64::consts::PI);
    for &p in &primes {
        let pf = p as f64;
        let lp = table.value(p);
        // L_p(1, sym²φ)⁻¹ = (1−α²/p)(1−1/p)(1−β²/p)
        //                 = (1 − (λ²−2)/p + 1/p²)(1 − 1/p).
        let quad = 1.0 - (lp * lp - 2.0) / pf + 1.0 / (pf * pf);
        euler /= quad * (1.0 - 1.0 / pf);
    }
    Ok(euler)
}

/// Residue of `L(s, φ⊗φ)` at `s = 1` two ways: the Euler product
/// `L(1, sym²φ)/ζ(2)` truncated at `prime_cut`, and the least-squares slope
/// of `Σ_{n≤X} λ(n)²` over the sampled ladder.
pub fn residue_estimate(
    table: &CoefficientTable,
    prime_cut: u64,
    fit_xs: &[u64],
) -> Result<ResidueEstimate> {
    if fit_xs.iter().any(|&x| x > table.limit) || fit_xs.is_empty() {
        return Err(Error::precondition("residue_estimate: inputs beyond table"));
    }
    let euler = rs_residue_euler(table, prime_cut)?;
    // Truncation honesty: each omitted factor is 1 + O(1/p); report the
    // per-factor envelope at the cut, not a rigorous tail bound.
    let tail_bound = 4.0 / prime_cut as f64;

    let mut xs_sorted: Vec<u64> = fit_xs.to_vec();
    xs_sorted.sort_unstable();
    let mut sums = Vec::with_capacity(xs_sorted.len());
    let mut acc = 0.0f64;
    let mut xi = 0usize;
    for n in 1..=*xs_sorted.last().unwrap() {
        let v = table.value(n);
        acc += v * v;
        while xi < xs_sorted.len() && n == xs_sorted[xi] {
            sums.push(acc);
            xi += 1;
        }
    }
    let xsf: Vec<f64> = xs_sorted.iter().map(|&x| x as f64).collect();
    let (_, slope, _) = fit_line(&xsf, &sums)?;
    let gap = (euler - slope).abs() / euler.abs().max(1e-300);
    Ok(ResidueEstimate {
        euler_value: euler,
        empirical_slope: slope,
        relative_gap: gap,
        prime_cut,
        tail_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{lambda_table, EigenformSpec};

    fn delta_table(n: u64) -> CoefficientTable {
        let spf = build_spf(n).unwrap();
        lambda_table(&EigenformSpec::delta(), n, &spf).unwrap()
    }

    #[test]
    fn zeta_times_moebius_is_one() {
        let spf = build_spf(2000).unwrap();
        let zeta = TruncatedDirichletSeries::zeta(2000);
        let mu = TruncatedDirichletSeries::from_fn(2000, |n| {
            Complex64::new(spf.moebius(n) as f64, 0.0)
        });
        let prod = ds_multiply(&zeta, &mu).unwrap();
        let one = TruncatedDirichletSeries::one(2000);
        for n in 1..=2000u64 {
            assert!((prod.c(n) - one.c(n)).norm() < 1e-14, "n={n}");
        }
        // invert(ζ) = μ
        let inv = ds_invert(&zeta).unwrap();
        for n in 1..=2000u64 {
            assert!((inv.c(n) - mu.c(n)).norm() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn identity_series_neutral() {
        let a = TruncatedDirichletSeries::from_fn(500, |n| {
            Complex64::new((n as f64).sin(), (n as f64).cos())
        });
        let one = TruncatedDirichletSeries::one(500);
        let prod = ds_multiply(&one, &a).unwrap();
        for n in 1..=500u64 {
            assert_eq!(prod.c(n), a.c(n));
        }
        assert!((ds_invert(&one).unwrap().c(1) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn convolution_square_oracle() {
        let t = delta_table(100);
        let s = TruncatedDirichletSeries::from_table(&t, 100).unwrap();
        let sq = ds_multiply(&s, &s).unwrap();
        // direct convolution at n = 6
        let direct: f64 = [1u64, 2, 3, 6]
            .iter()
            .map(|&d| t.value(d) * t.value(6 / d))
            .sum();
        assert!((sq.c(6).re - direct).abs() < 1e-14);
    }

    #[test]
    fn invert_roundtrip_lambda() {
        let t = delta_table(10_000);
        let s = TruncatedDirichletSeries::from_table(&t, 10_000).unwrap();
        let inv = ds_invert(&s).unwrap();
        let prod = ds_multiply(&s, &inv).unwrap();
        for n in 1..=10_000u64 {
            let expect = if n == 1 { 1.0 } else { 0.0 };
            assert!((prod.c(n).re - expect).abs() < 1e-11, "n={n}");
            assert!(prod.c(n).im.abs() < 1e-11);
        }
    }

    #[test]
    fn dilate_examples() {
        let one = TruncatedDirichletSeries::one(100);
        let d = ds_dilate(&one, 2).unwrap();
        for n in 1..=100u64 {
            assert_eq!(d.c(n), one.c(n));
        }
        let zeta = TruncatedDirichletSeries::zeta(100);
        let dz = ds_dilate(&zeta, 2).unwrap();
        assert_eq!(dz.c(4).re, 1.0);
        assert_eq!(dz.c(2).re, 0.0);
        // χ mod 5 dilated matches χ(√n) on squares.
        let chars = character_table(5).unwrap();
        let chi = chars.iter().find(|c| !c.is_principal()).unwrap();
        let cs = TruncatedDirichletSeries::from_character(chi, 100);
        let dc = ds_dilate(&cs, 2).unwrap();
        for m in 1..=10u64 {
            assert!((dc.c(m * m) - chi.value(m)).norm() < 1e-14);
        }
    }

    #[test]
    fn algebra_laws() {
        let a = TruncatedDirichletSeries::from_fn(300, |n| Complex64::new(1.0 / n as f64, 0.1));
        let b = TruncatedDirichletSeries::from_fn(300, |n| Complex64::new((n % 7) as f64, -0.3));
        let c = TruncatedDirichletSeries::from_fn(300, |n| Complex64::new(0.5, (n % 3) as f64));
        let ab = ds_multiply(&a, &b).unwrap();
        let ba = ds_multiply(&b, &a).unwrap();
        for n in 1..=300u64 {
            assert!((ab.c(n) - ba.c(n)).norm() < 1e-11);
        }
        let abc1 = ds_multiply(&ab, &c).unwrap();
        let abc2 = ds_multiply(&a, &ds_multiply(&b, &c).unwrap()).unwrap();
        for n in 1..=300u64 {
            assert!((abc1.c(n) - abc2.c(n)).norm() < 1e-9 * (1.0 + abc1.c(n).norm()));
        }
    }

    #[test]
    fn local_factors_reproduce_hecke() {
        let t = delta_table(1000);
        let spf = build_spf(1000).unwrap();
        let s = ds_from_local_factors(|p| hecke_local_factor(p, t.value(p)), 1000, &spf).unwrap();
        for n in 1..=1000u64 {
            assert!((s.c(n).re - t.value(n)).abs() < 1e-10, "n={n}");
            assert!(s.c(n).im.abs() < 1e-12);
        }
        // All-one local factors give the multiplicative identity.
        let one = ds_from_local_factors(
            |p| LocalFactor::new(p, vec![Complex64::new(1.0, 0.0)]).unwrap(),
            100,
            &spf,
        )
        .unwrap();
        for n in 2..=100u64 {
            assert_eq!(one.c(n).norm(), 0.0);
        }
        assert_eq!(one.c(1).re, 1.0);
    }

    #[test]
    fn rs_twist_trivial_character() {
        let t = delta_table(2000);
        let chars = character_table(1).unwrap();
        let rep = rs_twist_identity_check(&t, &chars[0], 2000).unwrap();
        assert!(rep.max_abs_deviation <= 1e-8, "{rep:?}");
    }

    #[test]
    fn rs_twist_mod5() {
        let t = delta_table(10_000);
        let chars = character_table(5).unwrap();
        for chi in chars.iter().filter(|c| c.primitive) {
            let rep = rs_twist_identity_check(&t, chi, 10_000).unwrap();
            assert!(rep.max_abs_deviation <= 1e-8, "{rep:?}");
        }
    }

    #[test]
    fn hd_gq_examples() {
        let t = delta_table(4000);
        // d = q = 1 reduces to the definition.
        let rep = hd_gq_check(&t, 1, 1, 1000).unwrap();
        assert!(rep.max_abs_deviation < 1e-12);
        // d = 2, q = 3 full comparison.
        let rep2 = hd_gq_check(&t, 2, 3, 1000).unwrap();
        assert!(rep2.max_abs_deviation <= 1e-8, "{rep2:?}");
        // d must be square-free.
        assert!(hd_gq_check(&t, 4, 1, 100).is_err());
        assert!(hd_gq_check(&t, 2, 2, 100).is_err());
    }

    #[test]
    fn residue_two_routes_agree_smallscale() {
        let t = delta_table(200_000);
        let est = residue_estimate(&t, 20_000, &[50_000, 100_000, 150_000, 200_000]).unwrap();
        assert!(est.euler_value > 0.0 && est.empirical_slope > 0.0);
        assert!(est.relative_gap < 0.08, "{est:?}");
    }

    #[test]
    fn residue_rejects_non_eigenform() {
        let values = vec![1.0; 101];
        let t = CoefficientTable::from_values(
            100,
            crate::forms::TableKind::Multiplicative,
            "ones".into(),
            values,
        );
        assert!(residue_estimate(&t, 10, &[50, 100]).is_err());
    }
}
