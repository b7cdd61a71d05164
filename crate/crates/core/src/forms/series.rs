//! Dense and sparse power-series arithmetic for integer q-expansions.
//!
//! Exact dense products (the Eisenstein-series route) run over a CRT stack of
//! word-size prime moduli with Karatsuba multiplication per modulus; the
//! coefficient bound is checked in advance so reconstruction is provably
//! exact. The eta-product routes use the sparse pentagonal/Jacobi series and
//! blocked dense-by-sparse convolutions, in checked `i128` (exact, capped) or
//! `f64` (large ranges).

use crate::error::{Error, Result};
use crate::util::is_prime_u64;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use std::sync::OnceLock;

/// Exact eta-route coefficients stay below the checked-`i128` headroom up to
/// this many q-coefficients.
pub const ETA_I128_CAP: u64 = 2_200_000;

/// The 24-fold pentagonal product is quadratic-ish in practice; keep it for
/// oracle duty at moderate sizes.
pub const PENTAGONAL_CAP: u64 = 1 << 20;

// ---------------------------------------------------------------------------
// CRT moduli
// ---------------------------------------------------------------------------

/// Primes just below 2^60, so a 64-term schoolbook base case accumulates in
/// u128 without overflow.
fn crt_moduli() -> &'static [u64; 8] {
    static MODULI: OnceLock<[u64; 8]> = OnceLock::new();
    MODULI.get_or_init(|| {
        let mut out = [0u64; 8];
        let mut found = 0;
        let mut candidate = (1u64 << 60) - 1;
        while found < 8 {
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
fn addmod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b; // < 2^61, no overflow
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
fn submod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

#[inline]
fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
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

// ---------------------------------------------------------------------------
// Karatsuba over Z/p
// ---------------------------------------------------------------------------

const KARATSUBA_BASE: usize = 64;

fn schoolbook_modp(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    // p < 2^60 keeps 64 accumulated products inside u128.
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        let ai = ai as u128;
        for (j, &bj) in b.iter().enumerate() {
            let t = (ai * bj as u128) % p as u128;
            out[i + j] = addmod(out[i + j], t as u64, p);
        }
    }
    out
}

fn add_into(dst: &mut Vec<u64>, src: &[u64], offset: usize, p: u64) {
    if dst.len() < offset + src.len() {
        dst.resize(offset + src.len(), 0);
    }
    for (i, &v) in src.iter().enumerate() {
        dst[offset + i] = addmod(dst[offset + i], v, p);
    }
}

fn karatsuba_modp(a: &[u64], b: &[u64], p: u64, depth: u32) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    if a.len().min(b.len()) <= KARATSUBA_BASE {
        return schoolbook_modp(a, b, p);
    }
    let half = a.len().max(b.len()) / 2;
    let (a0, a1) = a.split_at(half.min(a.len()));
    let (b0, b1) = b.split_at(half.min(b.len()));

    let sa: Vec<u64> = (0..a0.len().max(a1.len()))
        .map(|i| addmod(*a0.get(i).unwrap_or(&0), *a1.get(i).unwrap_or(&0), p))
        .collect();
    let sb: Vec<u64> = (0..b0.len().max(b1.len()))
        .map(|i| addmod(*b0.get(i).unwrap_or(&0), *b1.get(i).unwrap_or(&0), p))
        .collect();

    let (z0, (z2, zs)) = if depth < 3 {
        rayon::join(
            || karatsuba_modp(a0, b0, p, depth + 1),
            || {
                rayon::join(
                    || karatsuba_modp(a1, b1, p, depth + 1),
                    || karatsuba_modp(&sa, &sb, p, depth + 1),
                )
            },
        )
    } else {
        (
            karatsuba_modp(a0, b0, p, depth + 1),
            (
                karatsuba_modp(a1, b1, p, depth + 1),
                karatsuba_modp(&sa, &sb, p, depth + 1),
            ),
        )
    };

    // z1 = zs - z0 - z2
    let mut z1 = zs;
    for (i, v) in z0.iter().enumerate() {
        if i < z1.len() {
            z1[i] = submod(z1[i], *v, p);
        }
    }
    for (i, v) in z2.iter().enumerate() {
        if i < z1.len() {
            z1[i] = submod(z1[i], *v, p);
        }
    }

    let mut out = vec![0u64; a.len() + b.len() - 1];
    let mut acc = Vec::new();
    std::mem::swap(&mut out, &mut acc);
    add_into(&mut acc, &z0, 0, p);
    add_into(&mut acc, &z1, half, p);
    add_into(&mut acc, &z2, 2 * half, p);
    acc.truncate(a.len() + b.len() - 1);
    acc
}

fn residues(x: &BigInt, m: u64) -> u64 {
    let mb = BigInt::from(m);
    let mut r = x % &mb;
    if r.is_negative() {
        r += &mb;
    }
    r.to_u64().expect("residue fits u64")
}

/// Exact truncated product of two integer coefficient vectors.
///
/// `out[k] = Σ_{i+j=k} a[i] b[j]` for `k < out_len`. Moduli are added until
/// the CRT range provably covers `min(len)·max|a|·max|b|`.
pub fn bigint_poly_mul_trunc(a: &[BigInt], b: &[BigInt], out_len: usize) -> Result<Vec<BigInt>> {
    if a.is_empty() || b.is_empty() || out_len == 0 {
        return Ok(vec![BigInt::zero(); out_len]);
    }
    let max_a = a.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero);
    let max_b = b.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero);
    let bound: BigInt = max_a * max_b * BigInt::from(a.len().min(b.len()) as u64);

    let all = crt_moduli();
    let mut k = 1usize;
    let mut range = BigInt::from(all[0]);
    while &range < &(&bound * 2 + 1) {
        k += 1;
        if k > all.len() {
            return Err(Error::capacity(
                "bigint_poly_mul_trunc: coefficient bound exceeds CRT range",
            ));
        }
        range *= BigInt::from(all[k - 1]);
    }
    let moduli = &all[..k];

    let a_trim = &a[..a.len().min(out_len)];
    let b_trim = &b[..b.len().min(out_len)];

    let per_mod: Vec<Vec<u64>> = moduli
        .par_iter()
        .map(|&p| {
            let ra: Vec<u64> = a_trim.iter().map(|x| residues(x, p)).collect();
            let rb: Vec<u64> = b_trim.iter().map(|x| residues(x, p)).collect();
            let mut prod = karatsuba_modp(&ra, &rb, p, 0);
            prod.truncate(out_len);
            prod.resize(out_len, 0);
            prod
        })
        .collect();

    // Garner reconstruction, centered representative.
    let mut inv = vec![vec![0u64; k]; k];
    for i in 1..k {
        for j in 0..i {
            inv[i][j] = powmod(moduli[j] % moduli[i], moduli[i] - 2, moduli[i]);
        }
    }
    let total: BigInt = moduli.iter().map(|&m| BigInt::from(m)).product();
    let half_range: BigInt = &total >> 1;
    let prefix: Vec<BigInt> = (0..k)
        .map(|i| moduli[..i].iter().map(|&m| BigInt::from(m)).product())
        .collect();

    let out: Vec<BigInt> = (0..out_len)
        .into_par_iter()
        .map(|idx| {
            let mut digits = vec![0u64; k];
            for i in 0..k {
                let mut t = per_mod[i][idx] % moduli[i];
                for j in 0..i {
                    t = submod(t, digits[j] % moduli[i], moduli[i]);
                    t = mulmod(t, inv[i][j], moduli[i]);
                }
                digits[i] = t;
            }
            let mut x = BigInt::zero();
            for i in (0..k).rev() {
                // Horner over the mixed radix would need running products;
                // direct assembly keeps it simple.
                x += &prefix[i] * BigInt::from(digits[i]);
            }
            if x > half_range {
                x -= &total;
            }
            x
        })
        .collect();
    Ok(out)
}

// ---------------------------------------------------------------------------
// Sparse eta-product convolutions
// ---------------------------------------------------------------------------

/// Euler-function taps: `∏(1−q^n) = Σ_k (−1)^k q^{k(3k−1)/2}`, exponents `≤ max_exp`.
pub fn pentagonal_taps(max_exp: u64) -> Vec<(u32, i64)> {
    let mut taps = Vec::new();
    taps.push((0u32, 1i64));
    let mut k: i64 = 1;
    loop {
        let mut pushed = false;
        for kk in [k, -k] {
            let g = kk * (3 * kk - 1) / 2;
            if g >= 0 && (g as u64) <= max_exp {
                let sign = if k % 2 == 0 { 1 } else { -1 };
                taps.push((g as u32, sign));
                pushed = true;
            }
        }
        if !pushed {
            break;
        }
        k += 1;
    }
    taps.sort_unstable_by_key(|t| t.0);
    taps
}

/// Jacobi cube taps: `∏(1−q^n)³ = Σ_{k≥0} (−1)^k (2k+1) q^{k(k+1)/2}`.
pub fn jacobi_cube_taps(max_exp: u64) -> Vec<(u32, i64)> {
    let mut taps = Vec::new();
    let mut k: i64 = 0;
    loop {
        let g = k * (k + 1) / 2;
        if g as u64 > max_exp {
            break;
        }
        let c = if k % 2 == 0 { 2 * k + 1 } else { -(2 * k + 1) };
        taps.push((g as u32, c));
        k += 1;
    }
    taps
}

const CONV_BLOCK: usize = 1 << 15;

/// `out[n] = Σ_{(g,c), g≤n} c · input[n−g]`, checked i128.
fn sparse_mul_i128(input: &[i128], taps: &[(u32, i64)], out: &mut [i128]) -> Result<()> {
    out.par_chunks_mut(CONV_BLOCK)
        .enumerate()
        .try_for_each(|(bi, chunk)| -> Result<()> {
            let base = bi * CONV_BLOCK;
            chunk.fill(0);
            for &(g, c) in taps {
                let g = g as usize;
                if g >= base + chunk.len() {
                    break;
                }
                let off = g.saturating_sub(base);
                let src = &input[base + off - g..base + chunk.len() - g];
                let dst = &mut chunk[off..];
                let c = c as i128;
                for (d, &s) in dst.iter_mut().zip(src) {
                    *d = c
                        .checked_mul(s)
                        .and_then(|t| t.checked_add(*d))
                        .ok_or_else(|| {
                            Error::capacity("eta product overflows i128; reduce the limit")
                        })?;
                }
            }
            Ok(())
        })
}

/// f64 variant for large ranges; the absolute error per coefficient is at the
/// level of a few ulps of the running magnitudes (validated against the exact
/// route on the overlap in tests).
fn sparse_mul_f64(input: &[f64], taps: &[(u32, i64)], out: &mut [f64]) {
    out.par_chunks_mut(CONV_BLOCK).enumerate().for_each(|(bi, chunk)| {
        let base = bi * CONV_BLOCK;
        chunk.fill(0.0);
        for &(g, c) in taps {
            let g = g as usize;
            if g >= base + chunk.len() {
                break;
            }
            let off = g.saturating_sub(base);
            let src = &input[base + off - g..base + chunk.len() - g];
            let dst = &mut chunk[off..];
            let c = c as f64;
            for (d, &s) in dst.iter_mut().zip(src) {
                *d += c * s;
            }
        }
    });
}

/// Coefficients of `∏(1−q^n)^24` up to degree `deg`, exact (checked i128),
/// via three squarings' worth of Jacobi-cube factors: J² then six more J's.
pub fn euler24_jacobi_i128(deg: u64) -> Result<Vec<i128>> {
    if deg > ETA_I128_CAP {
        return Err(Error::capacity(format!(
            "euler24_jacobi_i128: degree {deg} exceeds exact cap {ETA_I128_CAP}"
        )));
    }
    let n = deg as usize + 1;
    let taps = jacobi_cube_taps(deg);
    // J².
    let mut cur = vec![0i128; n];
    for (i, &(g1, c1)) in taps.iter().enumerate() {
        for &(g2, c2) in &taps[i..] {
            let g = g1 as usize + g2 as usize;
            if g >= n {
                break;
            }
            let prod = (c1 as i128) * (c2 as i128) * if g1 == g2 { 1 } else { 2 };
            cur[g] += prod;
        }
    }
    let mut other = vec![0i128; n];
    for _ in 0..6 {
        sparse_mul_i128(&cur, &taps, &mut other)?;
        std::mem::swap(&mut cur, &mut other);
    }
    Ok(cur)
}

/// f64 twin of [`euler24_jacobi_i128`], no size cap beyond memory.
pub fn euler24_jacobi_f64(deg: u64) -> Vec<f64> {
    let n = deg as usize + 1;
    let taps = jacobi_cube_taps(deg);
    let mut cur = vec![0f64; n];
    for (i, &(g1, c1)) in taps.iter().enumerate() {
        for &(g2, c2) in &taps[i..] {
            let g = g1 as usize + g2 as usize;
            if g >= n {
                break;
            }
            cur[g] += (c1 as f64) * (c2 as f64) * if g1 == g2 { 1.0 } else { 2.0 };
        }
    }
    let mut other = vec![0f64; n];
    for _ in 0..6 {
        sparse_mul_f64(&cur, &taps, &mut other);
        std::mem::swap(&mut cur, &mut other);
    }
    cur
}

/// Coefficients of `∏(1−q^n)^24` up to degree `deg` by 24 successive
/// multiplications with the pentagonal series. Slower; kept as the
/// independent recursion the dual-construction check compares against.
pub fn euler24_pentagonal_i128(deg: u64) -> Result<Vec<i128>> {
    if deg > PENTAGONAL_CAP {
        return Err(Error::capacity(format!(
            "euler24_pentagonal_i128: degree {deg} exceeds cap {PENTAGONAL_CAP}"
        )));
    }
    let n = deg as usize + 1;
    let taps = pentagonal_taps(deg);
    let mut cur = vec![0i128; n];
    cur[0] = 1;
    let mut other = vec![0i128; n];
    for _ in 0..24 {
        sparse_mul_i128(&cur, &taps, &mut other)?;
        std::mem::swap(&mut cur, &mut other);
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schoolbook_big(a: &[BigInt], b: &[BigInt], out_len: usize) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); out_len];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                if i + j < out_len {
                    out[i + j] += x * y;
                }
            }
        }
        out
    }

    #[test]
    fn crt_karatsuba_matches_schoolbook() {
        // Coefficients large enough to need several moduli, both signs.
        let a: Vec<BigInt> = (0..300)
            .map(|i| BigInt::from(i as i64 - 150) * BigInt::from(10u64).pow(25) + BigInt::from(7 * i))
            .collect();
        let b: Vec<BigInt> = (0..211)
            .map(|i| BigInt::from((i * i) as i64 - 999) * BigInt::from(10u64).pow(24))
            .collect();
        let fast = bigint_poly_mul_trunc(&a, &b, 400).unwrap();
        let slow = schoolbook_big(&a, &b, 400);
        assert_eq!(fast, slow);
    }

    #[test]
    fn pentagonal_and_jacobi_routes_agree() {
        let a = euler24_pentagonal_i128(3000).unwrap();
        let b = euler24_jacobi_i128(3000).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn euler24_known_tau_values() {
        // Δ = q·∏(1−q^n)^24, so τ(n) = coefficient n−1.
        let e = euler24_jacobi_i128(10).unwrap();
        let tau: Vec<i128> = (1..=10).map(|n| e[n - 1]).collect();
        assert_eq!(
            tau,
            vec![1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920]
        );
    }

    #[test]
    fn euler24_f64_tracks_exact() {
        let exact = euler24_jacobi_i128(20_000).unwrap();
        let float = euler24_jacobi_f64(20_000);
        // Compare in normalized units λ(n) = τ(n)/n^{11/2}.
        for n in 1..=20_000usize {
            let scale = (n as f64).powf(5.5);
            let d = (exact[n - 1] as f64 - float[n - 1]).abs() / scale;
            assert!(d < 1e-11, "n={n}: |Δλ|={d}");
        }
    }
}
