//! Prime generation and smallest-prime-factor sieving.
//!
//! Everything downstream (multiplicative materialization, sifted sums, the
//! bilinear decomposition) factors integers through a
//! [`SmallestPrimeFactorTable`], so construction speed matters: the table is
//! filled segment by segment (segments of `2^20`) and segments are processed
//! in parallel.

use crate::error::{Error, Result};
use crate::util::neumaier_sum;
use rayon::prelude::*;

/// Segment length for sieving; chosen to fit comfortably in L2.
const SEGMENT: u64 = 1 << 20;

/// Hard cap on dense SPF storage (u32 entries). Tables beyond this would not
/// fit the memory budget of a desk machine; requests above it fail with a
/// capacity error rather than thrash.
pub const SPF_CAPACITY: u64 = 1 << 31;

/// Dense table of least prime divisors for `2 ≤ n ≤ limit`.
///
/// `spf(p) = p` exactly when `p` is prime; entries are 32-bit since the table
/// is only materialized for `limit < 2^31`.
pub struct SmallestPrimeFactorTable {
    pub limit: u64,
    spf: Vec<u32>,
}

impl SmallestPrimeFactorTable {
    pub fn spf(&self, n: u64) -> u64 {
        debug_assert!(n >= 2 && n <= self.limit);
        self.spf[n as usize] as u64
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && self.spf[n as usize] as u64 == n
    }

    /// Factorization of `n` as ascending `(prime, exponent)` pairs.
    pub fn factorize(&self, n: u64) -> Vec<(u64, u32)> {
        debug_assert!(n >= 1 && n <= self.limit);
        let mut out = Vec::with_capacity(8);
        let mut m = n;
        while m > 1 {
            let p = self.spf[m as usize] as u64;
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        out
    }

    /// Does `n` have a prime factor in the closed interval `[lo, hi]`?
    pub fn has_factor_in(&self, n: u64, lo: f64, hi: f64) -> bool {
        let mut m = n;
        while m > 1 {
            let p = self.spf[m as usize] as u64;
            let pf = p as f64;
            if pf >= lo && pf <= hi {
                return true;
            }
            while m % p == 0 {
                m /= p;
            }
        }
        false
    }

    /// Number of divisors of `n`.
    pub fn tau(&self, n: u64) -> u64 {
        self.factorize(n).iter().map(|&(_, e)| e as u64 + 1).product()
    }

    /// Möbius function of `n`.
    pub fn moebius(&self, n: u64) -> i64 {
        let mut m = n;
        let mut sign = 1i64;
        while m > 1 {
            let p = self.spf[m as usize] as u64;
            m /= p;
            if m % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        sign
    }
}

/// Build the dense SPF table for `2 ≤ n ≤ limit`.
pub fn build_spf(limit: u64) -> Result<SmallestPrimeFactorTable> {
    if limit < 2 {
        return Err(Error::precondition("build_spf: limit must be >= 2"));
    }
    if limit > SPF_CAPACITY {
        return Err(Error::capacity(format!(
            "build_spf: limit {limit} exceeds dense-table budget {SPF_CAPACITY}"
        )));
    }
    let root = (limit as f64).sqrt() as u64 + 1;
    let base = simple_primes(root.max(2));
    let mut spf = vec![0u32; limit as usize + 1];

    // Parallel over segments: each segment is written by exactly one task.
    spf[2..].par_chunks_mut(SEGMENT as usize).enumerate().for_each(|(si, seg)| {
        let lo = 2 + si as u64 * SEGMENT; // absolute index of seg[0]
        let hi = lo + seg.len() as u64 - 1;
        for &p in &base {
            if p * p > hi {
                break;
            }
            let start = std::cmp::max(p * p, lo.div_ceil(p) * p);
            let mut m = start;
            while m <= hi {
                let cell = &mut seg[(m - lo) as usize];
                if *cell == 0 {
                    *cell = p as u32;
                }
                m += p;
            }
        }
        for (i, cell) in seg.iter_mut().enumerate() {
            if *cell == 0 {
                *cell = (lo + i as u64) as u32;
            }
        }
    });

    Ok(SmallestPrimeFactorTable { limit, spf })
}

/// Simple sieve of Eratosthenes collecting primes `<= n`.
fn simple_primes(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            primes.push(p as u64);
            let mut m = p * p;
            while m <= n {
                composite[m] = true;
                m += p;
            }
        }
    }
    primes
}

/// Ascending primes in the half-open-from-below interval `(lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimeInterval {
    pub lo: u64,
    pub hi: u64,
    pub primes: Vec<u64>,
}

impl PrimeInterval {
    pub fn empty() -> Self {
        PrimeInterval { lo: 1, hi: 1, primes: Vec::new() }
    }

    pub fn contains(&self, p: u64) -> bool {
        p > self.lo && p <= self.hi && self.primes.binary_search(&p).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }
}

/// Exactly the primes in `(lo, hi]`, via a segmented Eratosthenes sieve that
/// is independent of the SPF machinery (the two cross-validate each other).
pub fn primes_in(lo: u64, hi: u64) -> Result<PrimeInterval> {
    if lo < 1 || lo >= hi {
        return Err(Error::precondition(format!(
            "primes_in: need 1 <= lo < hi, got ({lo}, {hi}]"
        )));
    }
    let root = (hi as f64).sqrt() as u64 + 1;
    let base = simple_primes(root.max(2));
    let mut primes = Vec::new();
    let mut seg_lo = lo + 1;
    let mut mark = vec![false; SEGMENT as usize];
    while seg_lo <= hi {
        let seg_hi = (seg_lo + SEGMENT - 1).min(hi);
        let len = (seg_hi - seg_lo + 1) as usize;
        mark[..len].fill(false);
        for &p in &base {
            if p * p > seg_hi {
                break;
            }
            let mut m = std::cmp::max(p * p, seg_lo.div_ceil(p) * p);
            while m <= seg_hi {
                mark[(m - seg_lo) as usize] = true;
                m += p;
            }
        }
        for i in 0..len {
            let n = seg_lo + i as u64;
            if n >= 2 && !mark[i] {
                primes.push(n);
            }
        }
        seg_lo = seg_hi + 1;
    }
    Ok(PrimeInterval { lo, hi, primes })
}

/// Convenience: all primes `<= n` as a vector.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    primes_in(1, n).expect("1 < n").primes
}

/// `Σ_{p ≤ x, p ∉ excluded} 1/p` with compensated summation.
///
/// This is the Mertens-type quantity controlling the sifted divisor bound:
/// removing the primes of `[Y, Z]` lowers the sum by `log log Z − log log Y`.
pub fn prime_reciprocal_sum(x: u64, excluded: &PrimeInterval) -> Result<f64> {
    if x < 2 {
        return Err(Error::precondition("prime_reciprocal_sum: x must be >= 2"));
    }
    let all = primes_in(1, x)?;
    Ok(neumaier_sum(
        all.primes
            .iter()
            .filter(|&&p| !excluded.contains(p))
            .map(|&p| 1.0 / p as f64),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent Eratosthenes oracle used only in tests.
    fn eratosthenes(n: u64) -> Vec<u64> {
        let n = n as usize;
        let mut is_p = vec![true; n + 1];
        is_p[0] = false;
        if n >= 1 {
            is_p[1] = false;
        }
        for p in 2..=n {
            if is_p[p] {
                for m in (p * p..=n).step_by(p) {
                    is_p[m] = false;
                }
            }
        }
        (2..=n).filter(|&i| is_p[i]).map(|i| i as u64).collect()
    }

    fn trial_division_is_prime(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn spf_small_values() {
        let t = build_spf(12).unwrap();
        assert_eq!(t.spf(12), 2);
        assert_eq!(t.spf(9), 3);
        assert_eq!(t.spf(11), 11);
        let t2 = build_spf(2).unwrap();
        assert_eq!(t2.spf(2), 2);
    }

    #[test]
    fn spf_prime_count_at_1e6() {
        let t = build_spf(1_000_000).unwrap();
        let count = (2..=1_000_000u64).filter(|&n| t.spf(n) == n).count();
        assert_eq!(count, 78_498, "pi(10^6) via SPF");
        // Cross-check against the independent oracle on a smaller range.
        let oracle = eratosthenes(100_000);
        let got: Vec<u64> = (2..=100_000u64).filter(|&n| t.is_prime(n)).collect();
        assert_eq!(got, oracle);
    }

    #[test]
    fn spf_invariants_and_refactorization() {
        let t = build_spf(100_000).unwrap();
        for n in 2..=100_000u64 {
            let p = t.spf(n);
            assert_eq!(n % p, 0, "spf divides n");
            assert!(p * p <= n || p == n, "spf <= sqrt(n) or n prime");
        }
        for n in 1..=100_000u64 {
            let prod: u64 = t
                .factorize(n)
                .iter()
                .map(|&(p, e)| p.pow(e))
                .product();
            assert_eq!(prod, n);
        }
    }

    #[test]
    fn primes_in_examples() {
        assert_eq!(primes_in(1, 10).unwrap().primes, vec![2, 3, 5, 7]);
        assert_eq!(primes_in(24, 29).unwrap().primes, vec![29]);
        // Derived via the trial-division oracle.
        let iv = primes_in(1_000_000, 1_000_100).unwrap();
        let oracle: Vec<u64> = (1_000_001..=1_000_100)
            .filter(|&n| trial_division_is_prime(n))
            .collect();
        assert_eq!(iv.primes, oracle);
        assert_eq!(
            iv.primes,
            vec![1_000_003, 1_000_033, 1_000_037, 1_000_039, 1_000_081, 1_000_099]
        );
    }

    #[test]
    fn primes_in_union_property() {
        for (a, b, c) in [(1u64, 50, 200), (10, 97, 1000), (3, 4, 5)] {
            let left = primes_in(a, b).unwrap().primes;
            let right = primes_in(b, c).unwrap().primes;
            let mut joined = left;
            joined.extend(right);
            assert_eq!(joined, primes_in(a, c).unwrap().primes);
        }
    }

    #[test]
    fn reciprocal_sum_examples() {
        let none = PrimeInterval::empty();
        let s = prime_reciprocal_sum(10, &none).unwrap();
        assert!((s - (0.5 + 1.0 / 3.0 + 0.2 + 1.0 / 7.0)).abs() < 1e-15);
        assert!((s - 1.176190).abs() < 1e-6);

        let all = primes_in(1, 10).unwrap();
        assert_eq!(prime_reciprocal_sum(10, &all).unwrap(), 0.0);

        // Mertens: sum ~ log log x + M with M ≈ 0.26149.
        let s6 = prime_reciprocal_sum(1_000_000, &none).unwrap();
        let mertens = 0.26149_72128_47643;
        let predicted = (1_000_000f64).ln().ln() + mertens;
        assert!((s6 - predicted).abs() < 0.01, "{s6} vs {predicted}");
    }

    #[test]
    fn reciprocal_sum_exclusion_identity() {
        let excluded = primes_in(100, 10_000).unwrap();
        let full = prime_reciprocal_sum(100_000, &PrimeInterval::empty()).unwrap();
        let sifted = prime_reciprocal_sum(100_000, &excluded).unwrap();
        let removed: f64 = excluded.primes.iter().map(|&p| 1.0 / p as f64).sum();
        assert!((sifted - (full - removed)).abs() < 1e-12);
    }
}
