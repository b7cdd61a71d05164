//! Fast exact Hecke eigenvalues at primes via the Eichler–Selberg trace
//! formula on `SL₂(Z)`.
//!
//! Each of the six weights in play has a one-dimensional cusp space, so the
//! prime coefficient is exactly the trace of the Hecke operator:
//!
//! `a_k(p) = Tr T_p = −(1/2) Σ_{t² ≤ 4p} P_k(t,p) H(4p − t²) − 1`,
//!
//! with `H` the Hurwitz class numbers and `P_k(t,n)` the degree-(k−2)
//! Gegenbauer-type polynomial defined by `P_0 = 1`, `P_1 = t`,
//! `P_m = t·P_{m−1} − n·P_{m−2}`. The trace sum is accumulated modulo a CRT
//! stack of word-size primes and reconstructed exactly; the series-product
//! expansions cross-check the result on their common range in tests.

use crate::error::{Error, Result};
use crate::util::is_prime_u64;
use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use std::sync::OnceLock;

/// Largest 4p the Hurwitz table construction will materialize (u32 entries).
pub const HURWITZ_CAP: u64 = 1 << 26;

/// Table of `6·H(n)` for `0 ≤ n ≤ limit` (zero where no form of discriminant
/// `−n` exists, i.e. `n ≢ 0, 3 mod 4`).
///
/// Built by enumerating reduced positive-definite forms `(a, b, c)` with
/// `0 ≤ b ≤ a ≤ c` and `n = 4ac − b²`; boundary forms carry the classical
/// fractional weights (1/2 for `a(x²+y²)`, 1/3 for `a(x²+xy+y²)`).
pub fn hurwitz_6h(limit: u64) -> Result<Vec<u32>> {
    if limit > HURWITZ_CAP {
        return Err(Error::capacity(format!(
            "hurwitz_6h: limit {limit} exceeds cap {HURWITZ_CAP}"
        )));
    }
    let m = limit as usize;
    let mut h = vec![0u32; m + 1];
    let mut a: u64 = 1;
    while 3 * a * a <= limit {
        for b in 0..=a {
            let nmin = 4 * a * a - b * b;
            if nmin > limit {
                break;
            }
            let cmax = (limit + b * b) / (4 * a);
            for c in a..=cmax {
                let n = (4 * a * c - b * b) as usize;
                let w = if b == a && a == c {
                    2 // (a,a,a): weight 1/3
                } else if b == 0 && a == c {
                    3 // (a,0,a): weight 1/2
                } else if b == 0 || b == a || a == c {
                    6
                } else {
                    12 // ±b are distinct reduced forms
                };
                h[n] += w;
            }
        }
        a += 1;
    }
    Ok(h)
}

fn trace_moduli() -> &'static [u64; 6] {
    static MODULI: OnceLock<[u64; 6]> = OnceLock::new();
    MODULI.get_or_init(|| {
        let mut out = [0u64; 6];
        let mut found = 0;
        // Distinct from the series CRT stack; any word-size primes do.
        let mut candidate = (1u64 << 62) - 1;
        while found < 6 {
            if is_prime_u64(candidate) {
                out[found] = candidate;
                found += 1;
            }
            candidate -= 2;
        }
        out
    })
}

#[inline]
fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
fn submod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

/// Exact `a_k(p)` for every prime in `primes` and every requested weight.
///
/// Returns one coefficient vector per weight, aligned with `primes`.
/// `hur6` must cover `4·max(primes)`.
pub fn prime_coefficients(
    weights: &[u32],
    primes: &[u64],
    hur6: &[u32],
) -> Result<Vec<Vec<BigInt>>> {
    for &k in weights {
        if !(k >= 4 && k % 2 == 0 && k <= 26) {
            return Err(Error::precondition(format!(
                "prime_coefficients: unsupported weight {k}"
            )));
        }
    }
    if let Some(&pmax) = primes.last() {
        if (hur6.len() as u64) < 4 * pmax + 1 {
            return Err(Error::precondition(
                "prime_coefficients: Hurwitz table too short",
            ));
        }
    }
    let moduli = trace_moduli();
    let max_m = weights.iter().map(|&k| k - 2).max().unwrap_or(0) as usize;
    let max_6h = hur6.iter().copied().max().unwrap_or(0) as u64;

    // Accumulated trace sums per prime per weight, one residue per modulus.
    let per_prime: Vec<Vec<[u64; 6]>> = primes
        .par_iter()
        .map(|&p| {
            let tmax = (4.0 * p as f64).sqrt() as u64;
            let tmax = if (tmax + 1) * (tmax + 1) <= 4 * p {
                tmax + 1
            } else if tmax * tmax > 4 * p {
                tmax - 1
            } else {
                tmax
            };
            debug_assert!(tmax * tmax <= 4 * p && (tmax + 1) * (tmax + 1) > 4 * p);
            debug_assert!(tmax * tmax < 4 * p, "4p is never a square for prime p");
            let mut acc = vec![[0u64; 6]; weights.len()];
            for t in 0..=tmax {
                let h = hur6[(4 * p - t * t) as usize] as u64;
                if h == 0 {
                    continue;
                }
                let double = if t == 0 { 1u64 } else { 2 };
                for (mi, &q) in moduli.iter().enumerate() {
                    // Chebyshev-type recursion for P_m(t, p) mod q, reading
                    // off P_{k−2} for each requested weight as m passes it.
                    let tq = t % q;
                    let pq = p % q;
                    let hq = (h * double) % q;
                    let mut pm2 = 1u64; // P_0
                    let mut pm1 = tq; // P_1
                    for (wi, &k) in weights.iter().enumerate() {
                        match k - 2 {
                            0 => acc[wi][mi] = (acc[wi][mi] + hq) % q,
                            1 => acc[wi][mi] = (acc[wi][mi] + mulmod(tq, hq, q)) % q,
                            _ => {}
                        }
                    }
                    for m in 2..=max_m {
                        let pm = submod(mulmod(tq, pm1, q), mulmod(pq, pm2, q), q);
                        pm2 = pm1;
                        pm1 = pm;
                        for (wi, &k) in weights.iter().enumerate() {
                            if (k - 2) as usize == m {
                                acc[wi][mi] = (acc[wi][mi] + mulmod(pm, hq, q)) % q;
                            }
                        }
                    }
                }
            }
            acc
        })
        .collect();

    // CRT reconstruction. |A| ≤ (2·⌊2√p⌋+1) · (k−1)·p^{(k−2)/2} · max(6H).
    let total: BigInt = moduli.iter().map(|&m| BigInt::from(m)).product();
    let half: BigInt = &total >> 1;
    let mut inv = [[0u64; 6]; 6];
    for i in 1..6 {
        for j in 0..i {
            inv[i][j] = powmod(moduli[j] % moduli[i], moduli[i] - 2, moduli[i]);
        }
    }
    let prefix: Vec<BigInt> = (0..6)
        .map(|i| moduli[..i].iter().map(|&m| BigInt::from(m)).product())
        .collect();

    if let Some(&pmax) = primes.last() {
        let kmax = *weights.iter().max().unwrap() as u32;
        let mut bound = BigInt::from(4 * ((4 * pmax) as f64).sqrt() as u64 + 4);
        bound *= BigInt::from((kmax - 1) as u64);
        bound *= BigInt::from(pmax).pow((kmax - 2) / 2);
        bound *= BigInt::from(max_6h);
        if bound >= half {
            return Err(Error::capacity(
                "prime_coefficients: trace bound exceeds CRT range",
            ));
        }
    }

    let mut out: Vec<Vec<BigInt>> = vec![Vec::with_capacity(primes.len()); weights.len()];
    for (pi, acc) in per_prime.iter().enumerate() {
        let _ = pi;
        for (wi, res) in acc.iter().enumerate() {
            let mut digits = [0u64; 6];
            for i in 0..6 {
                let q = moduli[i];
                let mut t = res[i] % q;
                for j in 0..i {
                    t = submod(t, digits[j] % q, q);
                    t = mulmod(t, inv[i][j], q);
                }
                digits[i] = t;
            }
            let mut a = BigInt::zero();
            for i in (0..6).rev() {
                a += &prefix[i] * BigInt::from(digits[i]);
            }
            if a > half {
                a -= &total;
            }
            // Tr T_p = −A/12 − 1 where A = Σ_t P_k·6H; exact divisibility is a
            // consistency check on the whole pipeline.
            let num = -(a + BigInt::from(12));
            let (q12, r12) = num_integer_div_rem(&num, 12);
            if !r12.is_zero() {
                return Err(Error::invariant(
                    "trace sum not divisible by 12; Hurwitz/recursion bug",
                ));
            }
            out[wi].push(q12);
        }
    }
    Ok(out)
}

fn num_integer_div_rem(x: &BigInt, d: i64) -> (BigInt, BigInt) {
    let dd = BigInt::from(d);
    let q = x / &dd;
    let r = x - &q * &dd;
    (q, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn hurwitz_small_values() {
        let h = hurwitz_6h(50).unwrap();
        // 6·H(n) for the classical small discriminants.
        assert_eq!(h[3], 2);
        assert_eq!(h[4], 3);
        assert_eq!(h[7], 6);
        assert_eq!(h[8], 6);
        assert_eq!(h[11], 6);
        assert_eq!(h[12], 8);
        assert_eq!(h[15], 12);
        assert_eq!(h[16], 9);
        assert_eq!(h[19], 6);
        assert_eq!(h[20], 12);
        assert_eq!(h[23], 18);
        assert_eq!(h[24], 12);
        assert_eq!(h[0], 0);
        assert_eq!(h[1], 0);
        assert_eq!(h[5], 0);
    }

    #[test]
    fn kronecker_hurwitz_relation() {
        // Σ_{t²≤4n} H(4n−t²) = Σ_{d|n} max(d, n/d), with H(0) = −1/12.
        let h = hurwitz_6h(810).unwrap();
        for n in 1u64..=200 {
            let mut lhs = 0i64; // 6·Σ H
            let tmax = (4.0 * n as f64).sqrt() as u64 + 1;
            for t in 0..=tmax {
                let tt = t * t;
                if tt > 4 * n {
                    break;
                }
                let mult = if t == 0 { 1 } else { 2 };
                let v = if tt == 4 * n {
                    -1i64 // 6·H(0) = −1/2 → in twelfths: handled below
                } else {
                    2 * h[(4 * n - tt) as usize] as i64
                };
                // Work in units of 1/12 to keep everything integral:
                // 12·H(m) = 2·(6H(m)); 12·H(0) = −1.
                lhs += mult * v;
            }
            let rhs: i64 = (1..=n)
                .filter(|d| n % d == 0)
                .map(|d| std::cmp::max(d, n / d) as i64)
                .sum();
            assert_eq!(lhs, 12 * rhs, "Kronecker–Hurwitz at n={n}");
        }
    }

    #[test]
    fn trace_gives_tau_at_small_primes() {
        let h = hurwitz_6h(4 * 13).unwrap();
        let primes = vec![2u64, 3, 5, 7, 11, 13];
        let out = prime_coefficients(&[12], &primes, &h).unwrap();
        let tau: Vec<i64> = out[0].iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(tau, vec![-24, 252, 4830, -16744, 534612, -577738]);
    }

    #[test]
    fn trace_known_weight16_values() {
        let h = hurwitz_6h(4 * 5).unwrap();
        let out = prime_coefficients(&[16, 18, 20, 22, 26], &[2, 3], &h).unwrap();
        let a2: Vec<i64> = out.iter().map(|v| v[0].to_i64().unwrap()).collect();
        // a(2) for weights 16,18,20,22,26 from the Δ·E₄ᵃE₆ᵇ products:
        // −24+240, −24−504, −24+480, −24−264, −24−24.
        assert_eq!(a2, vec![216, -528, 456, -288, -48]);
    }
}
