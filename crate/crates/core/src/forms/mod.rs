//! Level-1 Hecke eigenforms: exact integer q-expansions, normalized
//! eigenvalue tables, Satake angles, symmetric-power and Rankin–Selberg
//! square coefficients.
//!
//! The six weights with one-dimensional cusp space are built from Eisenstein
//! series (`Δ = (E₄³−E₆²)/1728`, heavier weights as `Δ·E₄ᵃE₆ᵇ`), with the
//! pentagonal-recursion eta product kept as an independent construction of Δ.
//! Large coefficient tables go through faster exact routes (sparse eta
//! convolution for Δ, trace formula at primes for the rest) that the series
//! products cross-check on their common range.

pub mod eisenstein;
pub mod series;
pub mod trace;

use crate::error::{Error, Result};
use crate::multfun::materialize_f64;
use crate::primes::{build_spf, primes_up_to, SmallestPrimeFactorTable};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// The level-1 weights whose cusp space is one-dimensional.
pub const WEIGHTS: [u32; 6] = [12, 16, 18, 20, 22, 26];

/// Size cap for the Eisenstein-product expansion route.
pub const Q_EXPANSION_CAP: u64 = series::PENTAGONAL_CAP;

/// Size cap for exact expansions of the non-Δ weights (Hurwitz table budget).
pub const TRACE_LAMBDA_CAP: u64 = 4_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EigenformSpec {
    pub weight: u32,
    pub label: String,
}

impl EigenformSpec {
    pub fn new(weight: u32) -> Result<Self> {
        if !WEIGHTS.contains(&weight) {
            return Err(Error::precondition(format!(
                "weight {weight} has no one-dimensional level-1 cusp space (need one of {WEIGHTS:?})"
            )));
        }
        let label = if weight == 12 {
            "delta".to_string()
        } else {
            format!("delta{weight}")
        };
        Ok(EigenformSpec { weight, label })
    }

    pub fn delta() -> Self {
        EigenformSpec::new(12).expect("weight 12 is valid")
    }

    pub fn by_label(label: &str) -> Result<Self> {
        match label {
            "delta" | "delta12" => EigenformSpec::new(12),
            "delta16" => EigenformSpec::new(16),
            "delta18" => EigenformSpec::new(18),
            "delta20" => EigenformSpec::new(20),
            "delta22" => EigenformSpec::new(22),
            "delta26" => EigenformSpec::new(26),
            other => Err(Error::parse(format!("unknown form label '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QExpansionKind {
    Eigenform { weight: u32 },
    Eisenstein { weight: u32 },
}

/// Exact arbitrary-precision q-expansion; `coeffs[n]` is the coefficient of
/// `qⁿ` (index 0 is 0 for cusp forms, 1 for Eisenstein series).
#[derive(Debug, Clone)]
pub struct IntegerQExpansion {
    pub kind: QExpansionKind,
    pub limit: u64,
    pub coeffs: Vec<BigInt>,
}

impl IntegerQExpansion {
    pub fn a(&self, n: u64) -> &BigInt {
        &self.coeffs[n as usize]
    }

    pub fn weight(&self) -> u32 {
        match self.kind {
            QExpansionKind::Eigenform { weight } | QExpansionKind::Eisenstein { weight } => weight,
        }
    }
}

/// `E4` or `E6` with exact integer coefficients.
pub fn eisenstein_series(weight: u32, limit: u64) -> Result<IntegerQExpansion> {
    let coeffs = match weight {
        4 => eisenstein::e4_coeffs(limit),
        6 => eisenstein::e6_coeffs(limit),
        _ => {
            return Err(Error::precondition(
                "eisenstein_series: only E4 and E6 are materialized",
            ))
        }
    };
    Ok(IntegerQExpansion {
        kind: QExpansionKind::Eisenstein { weight },
        limit,
        coeffs,
    })
}

/// Δ by the independent pentagonal-recursion eta route: `q·∏(1−qⁿ)²⁴`.
pub fn eta24_q_expansion(limit: u64) -> Result<IntegerQExpansion> {
    if limit < 1 {
        return Err(Error::precondition("eta24_q_expansion: limit >= 1"));
    }
    let euler = series::euler24_pentagonal_i128(limit - 1)?;
    let mut coeffs = Vec::with_capacity(limit as usize + 1);
    coeffs.push(BigInt::zero());
    for n in 1..=limit as usize {
        coeffs.push(BigInt::from(euler[n - 1]));
    }
    Ok(IntegerQExpansion {
        kind: QExpansionKind::Eigenform { weight: 12 },
        limit,
        coeffs,
    })
}

fn delta_from_eisenstein(limit: u64) -> Result<Vec<BigInt>> {
    let e4 = eisenstein::e4_coeffs(limit);
    let e6 = eisenstein::e6_coeffs(limit);
    let out_len = limit as usize + 1;
    let e4sq = series::bigint_poly_mul_trunc(&e4, &e4, out_len)?;
    let e4cub = series::bigint_poly_mul_trunc(&e4sq, &e4, out_len)?;
    let e6sq = series::bigint_poly_mul_trunc(&e6, &e6, out_len)?;
    let scale = BigInt::from(1728);
    let mut delta = Vec::with_capacity(out_len);
    for (a, b) in e4cub.into_iter().zip(e6sq) {
        let d = a - b;
        let q: BigInt = &d / &scale;
        if &q * &scale != d {
            return Err(Error::invariant("E4^3 - E6^2 not divisible by 1728"));
        }
        delta.push(q);
    }
    Ok(delta)
}

/// Exact integer q-expansion by the Eisenstein-product construction.
///
/// For Δ the result is additionally compared coefficient-for-coefficient with
/// the pentagonal eta-product recursion; the heavier weights are `Δ·E₄ᵃE₆ᵇ`.
pub fn integer_q_expansion(spec: &EigenformSpec, limit: u64) -> Result<IntegerQExpansion> {
    if limit < 1 {
        return Err(Error::precondition("integer_q_expansion: limit >= 1"));
    }
    if limit > Q_EXPANSION_CAP {
        return Err(Error::capacity(format!(
            "integer_q_expansion: limit {limit} exceeds cap {Q_EXPANSION_CAP}"
        )));
    }
    let delta = delta_from_eisenstein(limit)?;
    let eta = eta24_q_expansion(limit)?;
    if delta != eta.coeffs {
        return Err(Error::invariant(
            "Δ constructions disagree: (E4^3−E6^2)/1728 vs pentagonal eta product",
        ));
    }
    let out_len = limit as usize + 1;
    let coeffs = match spec.weight {
        12 => delta,
        16 | 18 | 20 | 22 | 26 => {
            let e4 = eisenstein::e4_coeffs(limit);
            let e6 = eisenstein::e6_coeffs(limit);
            match spec.weight {
                16 => series::bigint_poly_mul_trunc(&delta, &e4, out_len)?,
                18 => series::bigint_poly_mul_trunc(&delta, &e6, out_len)?,
                20 => {
                    let w16 = series::bigint_poly_mul_trunc(&delta, &e4, out_len)?;
                    series::bigint_poly_mul_trunc(&w16, &e4, out_len)?
                }
                22 => {
                    let w16 = series::bigint_poly_mul_trunc(&delta, &e4, out_len)?;
                    series::bigint_poly_mul_trunc(&w16, &e6, out_len)?
                }
                26 => {
                    let w16 = series::bigint_poly_mul_trunc(&delta, &e4, out_len)?;
                    let w20 = series::bigint_poly_mul_trunc(&w16, &e4, out_len)?;
                    series::bigint_poly_mul_trunc(&w20, &e6, out_len)?
                }
                _ => unreachable!(),
            }
        }
        w => return Err(Error::precondition(format!("unsupported weight {w}"))),
    };
    Ok(IntegerQExpansion {
        kind: QExpansionKind::Eigenform { weight: spec.weight },
        limit,
        coeffs,
    })
}

/// Process-level cache for the Hurwitz table (monotone: keeps the largest).
fn hurwitz_cached(limit: u64) -> Result<Arc<Vec<u32>>> {
    static CACHE: OnceLock<Mutex<Option<(u64, Arc<Vec<u32>>)>>> = OnceLock::new();
    let cell = CACHE.get_or_init(|| Mutex::new(None));
    let mut guard = cell.lock().unwrap();
    if let Some((have, ref table)) = *guard {
        if have >= limit {
            return Ok(table.clone());
        }
    }
    let table = Arc::new(trace::hurwitz_6h(limit)?);
    *guard = Some((limit, table.clone()));
    Ok(table)
}

/// Exact prime coefficients `a_k(p)` for all `p ≤ limit`, one vector per
/// requested weight (trace formula + CRT).
pub fn exact_prime_coefficients(
    weights: &[u32],
    limit: u64,
) -> Result<(Vec<u64>, Vec<Vec<BigInt>>)> {
    let primes = primes_up_to(limit);
    let hur = hurwitz_cached(4 * limit)?;
    let coeffs = trace::prime_coefficients(weights, &primes, &hur)?;
    Ok((primes, coeffs))
}

/// Fast exact expansion: Δ through the sparse Jacobi-cube eta route, other
/// weights through trace-formula primes completed multiplicatively.
pub fn exact_q_expansion(spec: &EigenformSpec, limit: u64) -> Result<IntegerQExpansion> {
    if limit < 1 {
        return Err(Error::precondition("exact_q_expansion: limit >= 1"));
    }
    let coeffs = if spec.weight == 12 {
        let euler = series::euler24_jacobi_i128(limit - 1)?;
        let mut c = Vec::with_capacity(limit as usize + 1);
        c.push(BigInt::zero());
        for n in 1..=limit as usize {
            c.push(BigInt::from(euler[n - 1]));
        }
        c
    } else {
        if limit > TRACE_LAMBDA_CAP {
            return Err(Error::capacity(format!(
                "exact_q_expansion: limit {limit} exceeds trace-route cap {TRACE_LAMBDA_CAP}"
            )));
        }
        let (primes, coeffs) = exact_prime_coefficients(&[spec.weight], limit)?;
        complete_multiplicatively(spec.weight, limit, &primes, &coeffs[0])?
    };
    Ok(IntegerQExpansion {
        kind: QExpansionKind::Eigenform { weight: spec.weight },
        limit,
        coeffs,
    })
}

fn complete_multiplicatively(
    weight: u32,
    limit: u64,
    primes: &[u64],
    prime_coeffs: &[BigInt],
) -> Result<Vec<BigInt>> {
    let spf = build_spf(limit.max(2))?;
    let mut a = vec![BigInt::zero(); limit as usize + 1];
    if limit >= 1 {
        a[1] = BigInt::from(1);
    }
    let mut cursor = 0usize;
    for n in 2..=limit {
        let p = spf.spf(n);
        if p == n {
            debug_assert_eq!(primes[cursor], n);
            a[n as usize] = prime_coeffs[cursor].clone();
            cursor += 1;
            continue;
        }
        let mut pe = p;
        let mut m = n / p;
        while m % p == 0 {
            pe *= p;
            m /= p;
        }
        if m > 1 {
            a[n as usize] = &a[pe as usize] * &a[m as usize];
        } else {
            // n = p^e with e >= 2: a(p^e) = a(p)a(p^{e-1}) - p^{k-1} a(p^{e-2})
            let pk1 = BigInt::from(p).pow(weight - 1);
            a[n as usize] = &a[p as usize] * &a[(n / p) as usize] - pk1 * &a[(n / p / p) as usize];
        }
    }
    Ok(a)
}

// ---------------------------------------------------------------------------
// Normalized coefficient tables
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum TableKind {
    /// λ_φ(n) of a holomorphic eigenform (arithmetic normalization).
    Eigenvalue { weight: u32 },
    /// λ_{sym^r}(n) built from Satake angles.
    SymPower { r: u32 },
    /// Coefficients of the Rankin–Selberg square of sym^r.
    RankinSquare { r: u32 },
    /// Generic multiplicative values (file ingestion, derived tables).
    Multiplicative,
    /// User-supplied Maass coefficients, trusted as-is.
    Maass { spectral: f64 },
}

/// Double-precision multiplicative values over `[1, limit]`.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    pub limit: u64,
    pub kind: TableKind,
    pub source: String,
    values: Vec<f64>,
}

impl CoefficientTable {
    pub fn from_values(limit: u64, kind: TableKind, source: String, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len() as u64, limit + 1);
        CoefficientTable { limit, kind, source, values }
    }

    #[inline]
    pub fn value(&self, n: u64) -> f64 {
        self.values[n as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_eigenvalue_kind(&self) -> bool {
        matches!(self.kind, TableKind::Eigenvalue { .. })
    }

    pub fn weight(&self) -> Option<u32> {
        match self.kind {
            TableKind::Eigenvalue { weight } => Some(weight),
            _ => None,
        }
    }
}

/// Divisor-count table (τ = number of divisors) up to `limit`.
pub fn tau_count_table(limit: u64) -> Vec<u32> {
    let n = limit as usize;
    let mut tau = vec![0u32; n + 1];
    for d in 1..=n {
        let mut m = d;
        while m <= n {
            tau[m] += 1;
            m += d;
        }
    }
    tau
}

/// `n^{(k−1)/2}` in double precision ((k−1) odd: integer power times √n).
fn half_weight_pow(n: u64, weight: u32) -> f64 {
    let j = ((weight - 2) / 2) as i32;
    (n as f64).powi(j) * (n as f64).sqrt()
}

/// Normalize an exact eigenform expansion: `v(n) = a(n)·n^{−(k−1)/2}`.
///
/// The Deligne envelope `|v(n)| ≤ τ(n)` is verified during the build; any
/// near-boundary entry is re-checked in exact integer arithmetic
/// (`a(n)² ≤ τ(n)²·n^{k−1}`) so a violation really is a construction bug.
pub fn normalize(exp: &IntegerQExpansion) -> Result<CoefficientTable> {
    let weight = match exp.kind {
        QExpansionKind::Eigenform { weight } => weight,
        QExpansionKind::Eisenstein { .. } => {
            return Err(Error::precondition(
                "normalize: Eisenstein series are not eigenform-normalized",
            ))
        }
    };
    let tau = tau_count_table(exp.limit);
    let mut values = vec![0.0f64; exp.limit as usize + 1];
    for n in 1..=exp.limit {
        let v = exp.coeffs[n as usize].to_f64().ok_or_else(|| {
            Error::invariant("normalize: coefficient out of double range")
        })? / half_weight_pow(n, weight);
        let bound = tau[n as usize] as f64;
        if v.abs() > bound - 1e-6 {
            // Exact comparison: a(n)² ≤ τ(n)²·n^{k−1}.
            let a2 = exp.coeffs[n as usize].clone() * &exp.coeffs[n as usize];
            let t2 = BigInt::from(tau[n as usize]) * BigInt::from(tau[n as usize]);
            let cap = t2 * BigInt::from(n).pow(weight - 1);
            if a2 > cap {
                return Err(Error::invariant(format!(
                    "Deligne bound violated at n={n} (weight {weight})"
                )));
            }
        }
        values[n as usize] = v;
    }
    Ok(CoefficientTable {
        limit: exp.limit,
        kind: TableKind::Eigenvalue { weight },
        source: format!("normalize({}, weight {})", exp.limit, weight),
        values,
    })
}

/// λ(p^j) from λ(p) by the Hecke recursion
/// `λ(p^{j+1}) = λ(p)λ(p^j) − λ(p^{j−1})`.
pub fn hecke_prime_power(lambda_p: f64, j: u32) -> f64 {
    debug_assert!(lambda_p.abs() <= 2.0 + 1e-9);
    debug_assert!(j <= 64);
    let mut prev = 1.0f64;
    if j == 0 {
        return 1.0;
    }
    let mut cur = lambda_p;
    for _ in 1..j {
        let next = lambda_p * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

// ---------------------------------------------------------------------------
// Lambda tables at scale
// ---------------------------------------------------------------------------

fn delta_lambda_values(limit: u64) -> Result<Vec<f64>> {
    let mut values = vec![0.0f64; limit as usize + 1];
    if limit <= series::ETA_I128_CAP {
        let euler = series::euler24_jacobi_i128(limit - 1)?;
        values[1..]
            .par_iter_mut()
            .enumerate()
            .for_each(|(i, v)| {
                let n = i as u64 + 1;
                *v = euler[i] as f64 / half_weight_pow(n, 12);
            });
    } else {
        let euler = series::euler24_jacobi_f64(limit - 1);
        values[1..]
            .par_iter_mut()
            .enumerate()
            .for_each(|(i, v)| {
                let n = i as u64 + 1;
                *v = euler[i] / half_weight_pow(n, 12);
            });
    }
    Ok(values)
}

/// Normalized eigenvalue table for any supported weight and any `limit` the
/// routes can reach (Δ: eta convolution, exact below ~2·10⁶ and floating
/// above; other weights: exact trace-formula primes + Hecke materialization).
pub fn lambda_table(
    spec: &EigenformSpec,
    limit: u64,
    spf: &SmallestPrimeFactorTable,
) -> Result<CoefficientTable> {
    if limit < 1 {
        return Err(Error::precondition("lambda_table: limit >= 1"));
    }
    let values = if spec.weight == 12 {
        delta_lambda_values(limit)?
    } else {
        if limit > TRACE_LAMBDA_CAP {
            return Err(Error::capacity(format!(
                "lambda_table: weight {} capped at limit {TRACE_LAMBDA_CAP}",
                spec.weight
            )));
        }
        if spf.limit < limit {
            return Err(Error::precondition("lambda_table: SPF table too short"));
        }
        let (primes, coeffs) = exact_prime_coefficients(&[spec.weight], limit)?;
        let lambda_p: Vec<f64> = primes
            .iter()
            .zip(&coeffs[0])
            .map(|(&p, a)| a.to_f64().unwrap() / half_weight_pow(p, spec.weight))
            .collect();
        let mut cursor = 0usize;
        materialize_f64(
            limit,
            spf,
            |_p| {
                let v = lambda_p[cursor];
                cursor += 1;
                Ok(v)
            },
            |_p, e, lp| Ok(hecke_prime_power(lp, e)),
        )?
    };
    // Holomorphic normalization: primes must sit inside the Deligne disc.
    for n in 2..=limit.min(spf.limit) {
        if spf.is_prime(n) && values[n as usize].abs() > 2.0 + 1e-9 {
            return Err(Error::invariant(format!(
                "lambda_table: |λ(p)| > 2 at p={n} (weight {})",
                spec.weight
            )));
        }
    }
    Ok(CoefficientTable {
        limit,
        kind: TableKind::Eigenvalue { weight: spec.weight },
        source: format!("{} table to {}", spec.label, limit),
        values,
    })
}

// ---------------------------------------------------------------------------
// Satake angles and symmetric powers
// ---------------------------------------------------------------------------

/// θ_p ∈ [0, π] for every prime `p ≤ limit`, aligned with `primes`.
#[derive(Debug, Clone)]
pub struct SatakeAngleTable {
    pub limit: u64,
    pub primes: Arc<Vec<u64>>,
    pub angles: Vec<f64>,
}

impl SatakeAngleTable {
    pub fn lambda_p(&self, idx: usize) -> f64 {
        2.0 * self.angles[idx].cos()
    }
}

/// Satake angles `θ_p = arccos(λ(p)/2)` of a normalized holomorphic table.
pub fn satake_angles(table: &CoefficientTable) -> Result<SatakeAngleTable> {
    if !table.is_eigenvalue_kind() {
        return Err(Error::precondition(
            "satake_angles: need a normalized holomorphic eigenform table",
        ));
    }
    let primes = Arc::new(primes_up_to(table.limit));
    let mut angles = Vec::with_capacity(primes.len());
    for &p in primes.iter() {
        let lp = table.value(p);
        if lp.abs() > 2.0 + 1e-9 {
            return Err(Error::invariant(format!(
                "satake_angles: |λ({p})| = {} > 2",
                lp.abs()
            )));
        }
        angles.push((lp / 2.0).clamp(-1.0, 1.0).acos());
    }
    Ok(SatakeAngleTable { limit: table.limit, primes, angles })
}

/// Local expansion of `∏_j (1 − α_j x)^{−1}` to `x^{e_max}` given the Satake
/// parameters `α_j`; imaginary residues above 1e−9 are a bug signal.
fn invert_local_poly(alphas: &[Complex64], e_max: u32) -> Result<Vec<f64>> {
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    for &a in alphas {
        let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
        for (i, &c) in poly.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c * a;
        }
        poly = next;
    }
    let mut series = vec![Complex64::new(0.0, 0.0); e_max as usize + 1];
    series[0] = Complex64::new(1.0, 0.0);
    for e in 1..=e_max as usize {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in 1..=e.min(poly.len() - 1) {
            acc += poly[t] * series[e - t];
        }
        series[e] = -acc;
    }
    series
        .iter()
        .map(|z| {
            if z.im.abs() > 1e-9 {
                Err(Error::invariant(format!(
                    "local factor expansion has imaginary residue {}",
                    z.im
                )))
            } else {
                Ok(z.re)
            }
        })
        .collect()
}

fn binomial_f64(top: u32, k: u32) -> f64 {
    let mut v = 1.0f64;
    for i in 0..k {
        v = v * (top - i) as f64 / (i + 1) as f64;
    }
    v
}

/// Coefficients of the r-th symmetric power lift, multiplicative with local
/// Satake parameters `e^{i(r−2j)θ_p}`.
pub fn sym_power_table(
    angles: &SatakeAngleTable,
    r: u32,
    limit: u64,
    spf: &SmallestPrimeFactorTable,
) -> Result<CoefficientTable> {
    if r == 0 || r > 16 {
        return Err(Error::precondition("sym_power_table: need 1 <= r <= 16"));
    }
    if angles.limit < limit {
        return Err(Error::precondition(
            "sym_power_table: angle table does not cover the limit",
        ));
    }
    if spf.limit < limit {
        return Err(Error::precondition("sym_power_table: SPF table too short"));
    }
    let mut cursor = 0usize;
    let mut cache: HashMap<u64, Vec<f64>> = HashMap::new();
    let angle_of: Vec<f64> = angles.angles.clone();
    let primes = angles.primes.clone();
    let values = materialize_f64(
        limit,
        spf,
        |p| {
            debug_assert_eq!(primes[cursor], p);
            let lp = 2.0 * angle_of[cursor].cos();
            cursor += 1;
            Ok(hecke_prime_power(lp, r))
        },
        |p, e, _| {
            let idx = primes.binary_search(&p).map_err(|_| {
                Error::invariant(format!("prime {p} missing from angle table"))
            })?;
            let theta = angle_of[idx];
            let entry = cache.entry(p).or_insert_with(|| {
                let e_max = (limit as f64).log(p as f64).floor() as u32 + 1;
                let alphas: Vec<Complex64> = (0..=r)
                    .map(|j| Complex64::from_polar(1.0, (r as f64 - 2.0 * j as f64) * theta))
                    .collect();
                invert_local_poly(&alphas, e_max).expect("sym local expansion")
            });
            Ok(entry[e as usize])
        },
    )?;
    // Ramanujan envelope for the lift: |λ_{sym^r}(n)| ≤ τ_{r+1}(n).
    for n in 1..=limit {
        let mut env = 1.0f64;
        for (_, e) in spf.factorize(n) {
            env *= binomial_f64(r + e, e);
        }
        if values[n as usize].abs() > env + 1e-6 {
            return Err(Error::invariant(format!(
                "sym^{r} value exceeds τ_{}(n) at n={n}",
                r + 1
            )));
        }
    }
    Ok(CoefficientTable {
        limit,
        kind: TableKind::SymPower { r },
        source: format!("sym^{r} lift to {limit}"),
        values,
    })
}

/// Coefficients of `L(s, π×π̃)` for `π = sym^r`, verified to dominate
/// `|λ_π(n)|²` pointwise (the inequality is a theorem; failure is a bug).
pub fn rs_square_table(
    angles: &SatakeAngleTable,
    r: u32,
    limit: u64,
    spf: &SmallestPrimeFactorTable,
) -> Result<CoefficientTable> {
    if r == 0 || r > 8 {
        return Err(Error::precondition("rs_square_table: need 1 <= r <= 8"));
    }
    if limit > 10_000_000 {
        return Err(Error::capacity("rs_square_table: limit capped at 10^7"));
    }
    let sym = sym_power_table(angles, r, limit, spf)?;
    let mut cursor = 0usize;
    let mut cache: HashMap<u64, Vec<f64>> = HashMap::new();
    let angle_of: Vec<f64> = angles.angles.clone();
    let primes = angles.primes.clone();
    let values = materialize_f64(
        limit,
        spf,
        |p| {
            debug_assert_eq!(primes[cursor], p);
            let lp = 2.0 * angle_of[cursor].cos();
            cursor += 1;
            let s = hecke_prime_power(lp, r);
            Ok(s * s)
        },
        |p, e, _| {
            let idx = primes.binary_search(&p).map_err(|_| {
                Error::invariant(format!("prime {p} missing from angle table"))
            })?;
            let theta = angle_of[idx];
            let entry = cache.entry(p).or_insert_with(|| {
                let e_max = (limit as f64).log(p as f64).floor() as u32 + 1;
                let mut alphas = Vec::with_capacity(((r + 1) * (r + 1)) as usize);
                for j in 0..=r {
                    for l in 0..=r {
                        let phase = (r as f64 - 2.0 * j as f64) * theta
                            - (r as f64 - 2.0 * l as f64) * theta;
                        alphas.push(Complex64::from_polar(1.0, phase));
                    }
                }
                invert_local_poly(&alphas, e_max).expect("rs-square local expansion")
            });
            Ok(entry[e as usize])
        },
    )?;
    for n in 1..=limit {
        let s = sym.value(n);
        if s * s > values[n as usize] + 1e-6 {
            return Err(Error::invariant(format!(
                "|λ_π(n)|² > λ_{{π×π̃}}(n) at n={n} (r={r})"
            )));
        }
    }
    Ok(CoefficientTable {
        limit,
        kind: TableKind::RankinSquare { r },
        source: format!("sym^{r} Rankin–Selberg square to {limit}"),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spf1e4() -> SmallestPrimeFactorTable {
        build_spf(10_000).unwrap()
    }

    #[test]
    fn delta_known_coefficients() {
        let exp = integer_q_expansion(&EigenformSpec::delta(), 100).unwrap();
        let a: Vec<i64> = (1..=10).map(|n| exp.a(n).to_f64().unwrap() as i64).collect();
        assert_eq!(a, vec![1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920]);
        // Hecke multiplicativity at coprime arguments.
        assert_eq!(exp.a(6), &(exp.a(2) * exp.a(3)));
    }

    #[test]
    fn e4_leading_coefficient() {
        let e4 = eisenstein_series(4, 5).unwrap();
        assert_eq!(e4.a(1).to_f64().unwrap(), 240.0);
    }

    #[test]
    fn exact_route_matches_construction_route() {
        for &w in &WEIGHTS {
            let spec = EigenformSpec::new(w).unwrap();
            let slow = integer_q_expansion(&spec, 600).unwrap();
            let fast = exact_q_expansion(&spec, 600).unwrap();
            assert_eq!(slow.coeffs, fast.coeffs, "weight {w}");
        }
    }

    #[test]
    fn normalize_known_values() {
        let exp = exact_q_expansion(&EigenformSpec::delta(), 1000).unwrap();
        let t = normalize(&exp).unwrap();
        assert_eq!(t.value(1), 1.0);
        assert!((t.value(2) - (-0.530_330_085_889_910_6)).abs() < 1e-12);
        assert!((t.value(4) - (-0.71875)).abs() < 1e-12);
        // λ(4) = λ(2)² − 1 exactly (−1472/4^{5.5}).
        assert!((t.value(4) - (t.value(2) * t.value(2) - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn hecke_prime_power_examples() {
        assert_eq!(hecke_prime_power(0.7, 0), 1.0);
        let lp = -1.3;
        assert!((hecke_prime_power(lp, 2) - (lp * lp - 1.0)).abs() < 1e-15);
        // Degenerate angle θ=0 → limit value j+1.
        assert!((hecke_prime_power(2.0, 5) - 6.0).abs() < 1e-12);
        assert!((hecke_prime_power(-2.0, 5) - (-6.0)).abs() < 1e-12);
        // Against sin((j+1)θ)/sin θ for a generic angle.
        let theta = 1.234f64;
        let lp = 2.0 * theta.cos();
        for j in 0..=20u32 {
            let expect = ((j as f64 + 1.0) * theta).sin() / theta.sin();
            assert!((hecke_prime_power(lp, j) - expect).abs() < 1e-10, "j={j}");
        }
    }

    #[test]
    fn satake_angle_examples() {
        let spf = spf1e4();
        let t = lambda_table(&EigenformSpec::delta(), 10_000, &spf).unwrap();
        let ang = satake_angles(&t).unwrap();
        // p=2 is the first prime.
        let theta2 = ang.angles[0];
        assert!((theta2 - (-0.265_165_042_944_955_3f64).acos()).abs() < 1e-12);
        assert!((theta2 - 1.839_15).abs() < 1e-5);
        for (i, &p) in ang.primes.iter().enumerate().take(400) {
            assert!((2.0 * ang.angles[i].cos() - t.value(p)).abs() < 1e-12);
        }
    }

    #[test]
    fn sym_power_examples() {
        let spf = spf1e4();
        let t = lambda_table(&EigenformSpec::delta(), 10_000, &spf).unwrap();
        let ang = satake_angles(&t).unwrap();
        // r=1 reproduces the eigenvalue table.
        let s1 = sym_power_table(&ang, 1, 10_000, &spf).unwrap();
        for n in 1..=10_000u64 {
            assert!((s1.value(n) - t.value(n)).abs() < 1e-12, "n={n}");
        }
        // r=2 prime value is λ(p)²−1.
        let s2 = sym_power_table(&ang, 2, 1_000, &spf).unwrap();
        for p in [2u64, 3, 5, 7, 11, 97] {
            assert!((s2.value(p) - (t.value(p) * t.value(p) - 1.0)).abs() < 1e-12);
        }
        // r=3 prime value: sin(4θ)/sin(θ) = λ(p)³ − 2λ(p); at p=2 this equals
        // λ(8) = 84480/2^{16.5}.
        let s3 = sym_power_table(&ang, 3, 100, &spf).unwrap();
        let l2 = t.value(2);
        let oracle = (4.0 * (l2 / 2.0).acos()).sin() / (l2 / 2.0).acos().sin();
        assert!((s3.value(2) - (l2 * l2 * l2 - 2.0 * l2)).abs() < 1e-12);
        assert!((s3.value(2) - oracle).abs() < 1e-10);
        assert!((s3.value(2) - 84480.0 / (2f64).powf(16.5)).abs() < 1e-12);
    }

    #[test]
    fn rs_square_examples() {
        let spf = spf1e4();
        let t = lambda_table(&EigenformSpec::delta(), 10_000, &spf).unwrap();
        let ang = satake_angles(&t).unwrap();
        let rs1 = rs_square_table(&ang, 1, 2_000, &spf).unwrap();
        assert_eq!(rs1.value(1), 1.0);
        for p in [2u64, 3, 5, 101] {
            assert!((rs1.value(p) - t.value(p) * t.value(p)).abs() < 1e-10);
        }
        // r=2: prime value two ways (power-sum square vs local expansion).
        let rs2 = rs_square_table(&ang, 2, 2_000, &spf).unwrap();
        let s2 = sym_power_table(&ang, 2, 2_000, &spf).unwrap();
        for p in [2u64, 3, 5, 7] {
            assert!((rs2.value(p) - s2.value(p) * s2.value(p)).abs() < 1e-10);
        }
    }

    #[test]
    fn trace_primes_match_expansions_all_weights() {
        let (primes, coeffs) = exact_prime_coefficients(&WEIGHTS, 1_000).unwrap();
        for (wi, &w) in WEIGHTS.iter().enumerate() {
            let spec = EigenformSpec::new(w).unwrap();
            let exp = integer_q_expansion(&spec, 1_000).unwrap();
            for (pi, &p) in primes.iter().enumerate() {
                assert_eq!(
                    &coeffs[wi][pi],
                    exp.a(p),
                    "weight {w}, p={p}: trace vs series product"
                );
            }
        }
    }

    #[test]
    fn eisenstein_normalize_rejected() {
        let e4 = eisenstein_series(4, 10).unwrap();
        assert!(normalize(&e4).is_err());
    }
}
