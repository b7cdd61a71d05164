//! Generic multiplicative-function engine: prime-power rules, bulk
//! materialization over `[1, N]` through the SPF table, and the two growth
//! hypothesis checkers that delimit the admissible class of `f`.

use crate::error::{Error, Result};
use crate::forms::CoefficientTable;
use crate::primes::SmallestPrimeFactorTable;
use num_complex::Complex64;
use serde::Serialize;
use std::sync::Arc;

// ---------------------------------------------------------------------------
// Shared multiplicative materializer
// ---------------------------------------------------------------------------

fn materialize_generic<T, FP, FE>(
    limit: u64,
    spf: &SmallestPrimeFactorTable,
    one: T,
    zero: T,
    mut prime_val: FP,
    mut power_val: FE,
) -> Result<Vec<T>>
where
    T: Copy + std::ops::Mul<Output = T>,
    FP: FnMut(u64) -> Result<T>,
    FE: FnMut(u64, u32, T) -> Result<T>,
{
    if spf.limit < limit {
        return Err(Error::precondition("materialize: SPF table too short"));
    }
    let mut values = vec![zero; limit as usize + 1];
    if limit >= 1 {
        values[1] = one;
    }
    for n in 2..=limit {
        let p = spf.spf(n);
        if p == n {
            values[n as usize] = prime_val(n)?;
            continue;
        }
        let mut pe = p;
        let mut e = 1u32;
        let mut m = n / p;
        while m % p == 0 {
            pe *= p;
            e += 1;
            m /= p;
        }
        values[n as usize] = if m > 1 {
            values[pe as usize] * values[m as usize]
        } else {
            power_val(p, e, values[p as usize])?
        };
    }
    Ok(values)
}

/// Real-valued materializer used by the eigenform/symmetric-power tables.
/// Prime values arrive in ascending prime order (cursor-friendly).
pub(crate) fn materialize_f64<FP, FE>(
    limit: u64,
    spf: &SmallestPrimeFactorTable,
    prime_val: FP,
    power_val: FE,
) -> Result<Vec<f64>>
where
    FP: FnMut(u64) -> Result<f64>,
    FE: FnMut(u64, u32, f64) -> Result<f64>,
{
    materialize_generic(limit, spf, 1.0, 0.0, prime_val, power_val)
}

/// Complex materializer (Euler-product expansion in the L-series module).
pub(crate) fn materialize_c64<FP, FE>(
    limit: u64,
    spf: &SmallestPrimeFactorTable,
    prime_val: FP,
    power_val: FE,
) -> Result<Vec<Complex64>>
where
    FP: FnMut(u64) -> Result<Complex64>,
    FE: FnMut(u64, u32, Complex64) -> Result<Complex64>,
{
    materialize_generic(
        limit,
        spf,
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        prime_val,
        power_val,
    )
}

// ---------------------------------------------------------------------------
// Prime-power rules
// ---------------------------------------------------------------------------

/// A multiplicative function presented by its values at prime powers.
#[derive(Clone)]
pub struct PrimePowerRule {
    pub label: String,
    /// Claimed divisor bound: `|f(n)| ≤ τ_m(n)` when `Some(m)`.
    pub envelope: Option<u32>,
    eval: Arc<dyn Fn(u64, u32) -> Complex64 + Send + Sync>,
}

impl std::fmt::Debug for PrimePowerRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PrimePowerRule({})", self.label)
    }
}

impl PrimePowerRule {
    pub fn new(
        label: impl Into<String>,
        envelope: Option<u32>,
        eval: impl Fn(u64, u32) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        PrimePowerRule { label: label.into(), envelope, eval: Arc::new(eval) }
    }

    /// Value at `p^e`; `e = 0` is the empty factor and always evaluates to 1.
    pub fn eval(&self, p: u64, e: u32) -> Complex64 {
        if e == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            (self.eval)(p, e)
        }
    }
}

fn binom_real(m: u32, e: u32) -> f64 {
    // C(m+e−1, e)
    let mut v = 1.0f64;
    for i in 0..e {
        v = v * (m + e - 1 - i) as f64 / (i + 1) as f64;
    }
    v
}

/// The named standard rules.
pub enum StandardRule {
    Moebius,
    One,
    TauM(u32),
    TauZ(Complex64),
    /// `λ(p^e)^l` read off an eigenvalue table.
    EigenvaluePower { l: u32, table: Arc<CoefficientTable> },
}

pub fn standard_rule(kind: StandardRule) -> Result<PrimePowerRule> {
    Ok(match kind {
        StandardRule::Moebius => PrimePowerRule::new("mu", Some(1), |_p, e| {
            Complex64::new(if e == 1 { -1.0 } else { 0.0 }, 0.0)
        }),
        StandardRule::One => {
            PrimePowerRule::new("one", Some(1), |_p, _e| Complex64::new(1.0, 0.0))
        }
        StandardRule::TauM(m) => {
            if m < 1 {
                return Err(Error::precondition("tau_m needs m >= 1"));
            }
            PrimePowerRule::new(format!("tau_m:{m}"), Some(m), move |_p, e| {
                Complex64::new(binom_real(m, e), 0.0)
            })
        }
        StandardRule::TauZ(z) => PrimePowerRule::new(
            format!("tau_z:{}+{}i", z.re, z.im),
            None,
            move |_p, e| {
                // C(z+e−1, e) = ∏_{j=0}^{e−1}(z+j)/e!
                let mut v = Complex64::new(1.0, 0.0);
                for j in 0..e {
                    v *= (z + j as f64) / (j as f64 + 1.0);
                }
                v
            },
        ),
        StandardRule::EigenvaluePower { l, table } => {
            if l < 1 {
                return Err(Error::precondition("eigenvalue power needs l >= 1"));
            }
            let label = format!("pow:{l}");
            PrimePowerRule::new(label, None, move |p, e| {
                let pe = p.pow(e);
                Complex64::new(table.value(pe).powi(l as i32), 0.0)
            })
        }
    })
}

/// Rule reading a coefficient table directly at prime powers.
pub fn table_rule(table: Arc<CoefficientTable>, label: impl Into<String>) -> PrimePowerRule {
    PrimePowerRule::new(label, Some(2), move |p, e| {
        Complex64::new(table.value(p.pow(e)), 0.0)
    })
}

/// Pointwise product of two rules (a product of multiplicative functions).
pub fn product_rule(a: &PrimePowerRule, b: &PrimePowerRule) -> PrimePowerRule {
    let (ea, eb) = (a.eval.clone(), b.eval.clone());
    let envelope = match (a.envelope, b.envelope) {
        (Some(x), Some(y)) => Some(x * y),
        _ => None,
    };
    PrimePowerRule {
        label: format!("{}*{}", a.label, b.label),
        envelope,
        eval: Arc::new(move |p, e| ea(p, e) * eb(p, e)),
    }
}

/// Absolute value of a rule (still multiplicative).
pub fn abs_rule(a: &PrimePowerRule) -> PrimePowerRule {
    let ea = a.eval.clone();
    PrimePowerRule {
        label: format!("abs:{}", a.label),
        envelope: a.envelope,
        eval: Arc::new(move |p, e| Complex64::new(ea(p, e).norm(), 0.0)),
    }
}

// ---------------------------------------------------------------------------
// Materialized tables
// ---------------------------------------------------------------------------

/// Complex multiplicative values over `[1, limit]`.
#[derive(Debug, Clone)]
pub struct MultiplicativeTable {
    pub limit: u64,
    pub label: String,
    /// Set when some |value| exceeded 1e300 during materialization.
    pub overflow: bool,
    values: Vec<Complex64>,
}

impl MultiplicativeTable {
    #[inline]
    pub fn value(&self, n: u64) -> Complex64 {
        self.values[n as usize]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Test hook: overwrite a single entry (linearity probes).
    pub fn set_value(&mut self, n: u64, v: Complex64) {
        self.values[n as usize] = v;
    }

    pub fn abs_value(&self, n: u64) -> f64 {
        self.values[n as usize].norm()
    }
}

/// Materialize a rule over `[1, N]`: `value(n) = ∏ rule(p_i, e_i)`.
pub fn materialize(
    rule: &PrimePowerRule,
    limit: u64,
    spf: &SmallestPrimeFactorTable,
) -> Result<MultiplicativeTable> {
    let values = materialize_generic(
        limit,
        spf,
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        |p| Ok(rule.eval(p, 1)),
        |p, e, _| Ok(rule.eval(p, e)),
    )?;
    let overflow = values.iter().any(|v| v.norm() > 1e300);
    Ok(MultiplicativeTable {
        limit,
        label: rule.label.clone(),
        overflow,
        values,
    })
}

pub enum CombineOp {
    /// Pointwise product `a(n)·b(n)`.
    Product,
    /// `|a(n)·b(n)|` (absolute values, still multiplicative).
    Abs,
}

/// Pointwise combination of two tables of equal limit.
pub fn pointwise_combine(
    a: &MultiplicativeTable,
    b: &MultiplicativeTable,
    op: CombineOp,
) -> Result<MultiplicativeTable> {
    if a.limit != b.limit {
        return Err(Error::precondition("pointwise_combine: limit mismatch"));
    }
    let (values, label): (Vec<Complex64>, String) = match op {
        CombineOp::Product => (
            a.values.iter().zip(&b.values).map(|(x, y)| x * y).collect(),
            format!("{}*{}", a.label, b.label),
        ),
        CombineOp::Abs => (
            a.values
                .iter()
                .zip(&b.values)
                .map(|(x, y)| Complex64::new((x * y).norm(), 0.0))
                .collect(),
            format!("abs:{}*{}", a.label, b.label),
        ),
    };
    let overflow = a.overflow || b.overflow;
    Ok(MultiplicativeTable { limit: a.limit, label, overflow, values })
}

// ---------------------------------------------------------------------------
// Hypothesis checkers
// ---------------------------------------------------------------------------

/// Diagnostic report for the growth hypotheses. `pass` uses the bounded-ratio
/// heuristic: over the top half of the sampled ladder, `max R ≤ 2·min R`.
/// This is a desk-scale stand-in for `≪`, not a proof.
#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    pub c: f64,
    pub gamma: f64,
    pub delta: Option<f64>,
    pub sample_xs: Vec<u64>,
    pub ratios: Vec<f64>,
    pub pass: bool,
}

fn bounded_ratio_pass(ratios: &[f64]) -> bool {
    if ratios.iter().any(|r| !r.is_finite()) {
        return false;
    }
    let top = &ratios[ratios.len() / 2..];
    if top.is_empty() {
        return false;
    }
    let max = top.iter().cloned().fold(f64::MIN, f64::max);
    let min = top.iter().cloned().fold(f64::MAX, f64::min);
    max <= 2.0 * min
}

/// Hypothesis (i): `R(X) = Σ_{n≤X}|f(n)|² / (X (log X)^c)` over the ladder.
pub fn hypothesis_i_check(
    table: &MultiplicativeTable,
    c: f64,
    sample_xs: &[u64],
) -> Result<HypothesisReport> {
    let mut xs: Vec<u64> = sample_xs.to_vec();
    xs.sort_unstable();
    if xs.is_empty() || *xs.last().unwrap() > table.limit {
        return Err(Error::precondition(
            "hypothesis_i_check: samples empty or beyond table limit",
        ));
    }
    let mut ratios = Vec::with_capacity(xs.len());
    let mut acc = 0.0f64;
    let mut comp = 0.0f64;
    let mut xi = 0usize;
    for n in 1..=*xs.last().unwrap() {
        let v = table.value(n).norm_sqr();
        let t = acc + v;
        comp += if acc.abs() >= v.abs() { (acc - t) + v } else { (v - t) + acc };
        acc = t;
        while xi < xs.len() && n == xs[xi] {
            let x = xs[xi] as f64;
            ratios.push((acc + comp) / (x * x.ln().powf(c)));
            xi += 1;
        }
    }
    let pass = bounded_ratio_pass(&ratios);
    Ok(HypothesisReport { c, gamma: 0.0, delta: None, sample_xs: xs, ratios, pass })
}

/// Hypothesis (ii): sifted second moment
/// `R(X) = Σ_{n≤X, (n,P(Y,Z))=1}|f(n)|² · log X / (X (log log X)^γ)`,
/// the sieve condition `(n, P(Y,Z)) = 1` tested by SPF scan (no prime factor
/// of `n` in `[Y, Z]`).
pub fn hypothesis_ii_check(
    table: &MultiplicativeTable,
    y: f64,
    z: f64,
    gamma: f64,
    sample_xs: &[u64],
    spf: &SmallestPrimeFactorTable,
) -> Result<HypothesisReport> {
    if !(2.0 <= y && y < z) {
        return Err(Error::precondition("hypothesis_ii_check: need 2 <= Y < Z"));
    }
    let mut xs: Vec<u64> = sample_xs.to_vec();
    xs.sort_unstable();
    if xs.is_empty() || *xs.last().unwrap() > table.limit || *xs.last().unwrap() > spf.limit {
        return Err(Error::precondition(
            "hypothesis_ii_check: samples beyond table/SPF limit",
        ));
    }
    let mut ratios = Vec::with_capacity(xs.len());
    let mut acc = 0.0f64;
    let mut xi = 0usize;
    for n in 1..=*xs.last().unwrap() {
        if !spf.has_factor_in(n, y, z) {
            acc += table.value(n).norm_sqr();
        }
        while xi < xs.len() && n == xs[xi] {
            let x = xs[xi] as f64;
            ratios.push(acc * x.ln() / (x * x.ln().ln().powf(gamma)));
            xi += 1;
        }
    }
    let pass = bounded_ratio_pass(&ratios);
    Ok(HypothesisReport { c: 0.0, gamma, delta: None, sample_xs: xs, ratios, pass })
}

/// Hypothesis (ii) sifting interval in its direct parameterization:
/// `[(log X)^{16(c+2)}, X^δ]`.
pub fn hyp_interval_direct(c: f64, delta: f64, x: f64) -> (f64, f64) {
    (x.ln().powf(16.0 * (c + 2.0)), x.powf(delta))
}

/// The same interval as the bilinear decomposition sees it, through squares
/// of the cut parameters: `((H−1)², K²)` with `H = (log X)^{8c+16}`,
/// `K = X^{δ/2}`. Matches [`hyp_interval_direct`] up to the `(H−1)²` vs `H²`
/// edge because primes enter via squares.
pub fn hyp_interval_bksz(c: f64, delta: f64, x: f64) -> (f64, f64) {
    let h = x.ln().powf(8.0 * c + 16.0);
    let k = x.powf(delta / 2.0);
    ((h - 1.0) * (h - 1.0), k * k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{lambda_table, EigenformSpec};
    use crate::primes::build_spf;

    fn mu_table(n: u64, spf: &SmallestPrimeFactorTable) -> MultiplicativeTable {
        let rule = standard_rule(StandardRule::Moebius).unwrap();
        materialize(&rule, n, spf).unwrap()
    }

    #[test]
    fn moebius_small_values() {
        let spf = build_spf(10).unwrap();
        let t = mu_table(10, &spf);
        let got: Vec<f64> = [1u64, 2, 3, 4, 6].iter().map(|&n| t.value(n).re).collect();
        assert_eq!(got, vec![1.0, -1.0, -1.0, 0.0, 1.0]);
    }

    #[test]
    fn tau3_and_tau_half() {
        let spf = build_spf(100).unwrap();
        let t3 = materialize(&standard_rule(StandardRule::TauM(3)).unwrap(), 100, &spf).unwrap();
        assert_eq!(t3.value(4).re, 6.0); // C(4,2)
        let th = materialize(
            &standard_rule(StandardRule::TauZ(Complex64::new(0.5, 0.0))).unwrap(),
            100,
            &spf,
        )
        .unwrap();
        // τ_{1/2}(p²) = (1/2)(3/2)/2 = 0.375
        assert!((th.value(4).re - 0.375).abs() < 1e-15);
        assert!(th.value(4).im.abs() < 1e-15);
    }

    #[test]
    fn tau_z_at_integer_matches_tau_m() {
        let spf = build_spf(3000).unwrap();
        for m in 1..=4u32 {
            let a = materialize(&standard_rule(StandardRule::TauM(m)).unwrap(), 3000, &spf).unwrap();
            let b = materialize(
                &standard_rule(StandardRule::TauZ(Complex64::new(m as f64, 0.0))).unwrap(),
                3000,
                &spf,
            )
            .unwrap();
            for n in 1..=3000u64 {
                assert!((a.value(n) - b.value(n)).norm() < 1e-10, "m={m} n={n}");
            }
        }
    }

    #[test]
    fn eigenvalue_power_rule() {
        let spf = build_spf(1000).unwrap();
        let lam = Arc::new(lambda_table(&EigenformSpec::delta(), 1000, &spf).unwrap());
        let rule = standard_rule(StandardRule::EigenvaluePower { l: 2, table: lam.clone() }).unwrap();
        let v = rule.eval(2, 1).re;
        assert!((v - lam.value(2) * lam.value(2)).abs() < 1e-15);
        assert!((v - 0.28125).abs() < 1e-10);
    }

    #[test]
    fn combine_examples() {
        let spf = build_spf(1000).unwrap();
        let mu = mu_table(1000, &spf);
        let musq = pointwise_combine(&mu, &mu, CombineOp::Product).unwrap();
        for n in 1..=1000u64 {
            let sqfree = spf.moebius(n) != 0;
            assert_eq!(musq.value(n).re, if sqfree { 1.0 } else { 0.0 });
        }
        let lam = Arc::new(lambda_table(&EigenformSpec::delta(), 1000, &spf).unwrap());
        let lrule = table_rule(lam.clone(), "lambda");
        let lt = materialize(&lrule, 1000, &spf).unwrap();
        let mul = pointwise_combine(&mu, &lt, CombineOp::Product).unwrap();
        assert_eq!(mul.value(4).norm(), 0.0);
        let abs_mul = pointwise_combine(&mu, &lt, CombineOp::Abs).unwrap();
        assert!(
            (abs_mul.value(6).re - lam.value(2).abs() * lam.value(3).abs()).abs() < 1e-12
        );
    }

    #[test]
    fn multiplicativity_spot_check() {
        use rand::{Rng, SeedableRng};
        let spf = build_spf(100_000).unwrap();
        let rule = standard_rule(StandardRule::TauZ(Complex64::new(0.5, 0.3))).unwrap();
        let t = materialize(&rule, 100_000, &spf).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let mut checked = 0;
        while checked < 10_000 {
            let m = rng.random_range(2..=316u64);
            let n = rng.random_range(2..=100_000 / m);
            let g = num_integer_gcd(m, n);
            if g != 1 {
                continue;
            }
            let lhs = t.value(m * n);
            let rhs = t.value(m) * t.value(n);
            assert!(
                (lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1.0),
                "m={m} n={n}"
            );
            checked += 1;
        }
    }

    fn num_integer_gcd(mut a: u64, mut b: u64) -> u64 {
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    }

    #[test]
    fn squarefree_density_sanity() {
        let spf = build_spf(100_000).unwrap();
        let mu = mu_table(100_000, &spf);
        let q: f64 = (1..=100_000u64).map(|n| mu.value(n).norm_sqr()).sum();
        let density = q / 100_000.0;
        assert!((density - 6.0 / std::f64::consts::PI.powi(2)).abs() < 0.005);
    }

    #[test]
    fn hypothesis_i_examples() {
        let spf = build_spf(200_000).unwrap();
        let lam = Arc::new(lambda_table(&EigenformSpec::delta(), 200_000, &spf).unwrap());
        let lt = materialize(&table_rule(lam, "lambda"), 200_000, &spf).unwrap();
        let xs = vec![10_000, 20_000, 50_000, 100_000, 200_000];
        let rep = hypothesis_i_check(&lt, 0.0, &xs).unwrap();
        assert!(rep.pass, "Rankin–Selberg average stabilizes: {:?}", rep.ratios);

        let one = materialize(&standard_rule(StandardRule::One).unwrap(), 200_000, &spf).unwrap();
        let rep1 = hypothesis_i_check(&one, 0.0, &xs).unwrap();
        assert!(rep1.pass);
        assert!((rep1.ratios.last().unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn hypothesis_ii_examples() {
        let spf = build_spf(50_000).unwrap();
        let one = materialize(&standard_rule(StandardRule::One).unwrap(), 50_000, &spf).unwrap();
        // Y=2, Z=X: survivors are n=1 only.
        let rep = hypothesis_ii_check(&one, 2.0, 50_000.0, 0.0, &[50_000], &spf).unwrap();
        let expect = 1.0 * (50_000f64).ln() / 50_000.0;
        assert!((rep.ratios[0] - expect).abs() < 1e-12);

        // Precondition: Y < Z.
        assert!(hypothesis_ii_check(&one, 50.0, 10.0, 0.0, &[100], &spf).is_err());

        // Survivor count against a brute-force oracle for moderate Y, Z.
        let (y, z) = (10.0, 100.0);
        let rep2 = hypothesis_ii_check(&one, y, z, 0.0, &[50_000], &spf).unwrap();
        let brute: u64 = (1..=50_000u64)
            .filter(|&n| {
                let mut m = n;
                let mut ok = true;
                let mut d = 2u64;
                while d * d <= m {
                    if m % d == 0 {
                        if (d as f64) >= y && (d as f64) <= z {
                            ok = false;
                        }
                        while m % d == 0 {
                            m /= d;
                        }
                    }
                    d += 1;
                }
                if m > 1 && (m as f64) >= y && (m as f64) <= z {
                    ok = false;
                }
                ok
            })
            .count() as u64;
        let expect2 = brute as f64 * (50_000f64).ln() / 50_000.0;
        assert!((rep2.ratios[0] - expect2).abs() < 1e-9);
    }

    #[test]
    fn hypothesis_ii_monotone_in_z() {
        let spf = build_spf(30_000).unwrap();
        let lam = Arc::new(lambda_table(&EigenformSpec::delta(), 30_000, &spf).unwrap());
        let lt = materialize(&table_rule(lam, "lambda"), 30_000, &spf).unwrap();
        let mut prev = f64::INFINITY;
        for z in [50.0, 200.0, 1000.0, 20_000.0] {
            let rep = hypothesis_ii_check(&lt, 10.0, z, 1.0, &[30_000], &spf).unwrap();
            assert!(rep.ratios[0] <= prev + 1e-12, "sifted sum must not grow with Z");
            prev = rep.ratios[0];
        }
    }

    #[test]
    fn interval_parameterizations_consistent() {
        let (y1, z1) = hyp_interval_direct(0.0, 0.04, 1e6);
        let (y2, z2) = hyp_interval_bksz(0.0, 0.04, 1e6);
        assert!((z1 - z2).abs() < 1e-6 * z1);
        // (H−1)² vs H² = (log X)^{16(c+2)}: same order, below it.
        assert!(y2 < y1 && y2 > 0.5 * y1);
    }
}
