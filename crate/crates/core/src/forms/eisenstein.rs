//! Eisenstein series `E4 = 1 + 240 Σ σ₃(n) qⁿ` and `E6 = 1 − 504 Σ σ₅(n) qⁿ`
//! with exact integer coefficients.

use num_bigint::BigInt;

/// Divisor power sums `σ_k(n)` for `1 ≤ n ≤ limit`, `k ∈ {3, 5}` fit u128
/// far beyond any limit the expansion engine accepts.
pub fn sigma_table(limit: u64, k: u32) -> Vec<u128> {
    let n = limit as usize;
    let mut s = vec![0u128; n + 1];
    for d in 1..=n {
        let dk = (d as u128).pow(k);
        let mut m = d;
        while m <= n {
            s[m] += dk;
            m += d;
        }
    }
    s
}

/// Coefficient vector (index = q-power) of E4 up to degree `limit`.
pub fn e4_coeffs(limit: u64) -> Vec<BigInt> {
    let sig = sigma_table(limit, 3);
    let mut c = Vec::with_capacity(limit as usize + 1);
    c.push(BigInt::from(1));
    for n in 1..=limit as usize {
        c.push(BigInt::from(240u32) * BigInt::from(sig[n]));
    }
    c
}

/// Coefficient vector of E6 up to degree `limit`.
pub fn e6_coeffs(limit: u64) -> Vec<BigInt> {
    let sig = sigma_table(limit, 5);
    let mut c = Vec::with_capacity(limit as usize + 1);
    c.push(BigInt::from(1));
    for n in 1..=limit as usize {
        c.push(BigInt::from(-504i32) * BigInt::from(sig[n]));
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn sigma_small() {
        let s3 = sigma_table(12, 3);
        assert_eq!(s3[1], 1);
        assert_eq!(s3[2], 9);
        assert_eq!(s3[6], 1 + 8 + 27 + 216);
        let s5 = sigma_table(4, 5);
        assert_eq!(s5[4], 1 + 32 + 1024);
    }

    #[test]
    fn eisenstein_leading_terms() {
        let e4 = e4_coeffs(3);
        assert_eq!(e4[1].to_i64().unwrap(), 240);
        assert_eq!(e4[2].to_i64().unwrap(), 240 * 9);
        let e6 = e6_coeffs(2);
        assert_eq!(e6[1].to_i64().unwrap(), -504);
        assert_eq!(e6[2].to_i64().unwrap(), -504 * 33);
    }
}
