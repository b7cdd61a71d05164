//! Numerical utilities shared across modules: deterministic compensated
//! summation, Gauss–Legendre quadrature, small least-squares fits, and a
//! deterministic Miller–Rabin test used to pick CRT moduli.

use num_complex::Complex64;
use rayon::prelude::*;

/// Block length for compensated block sums. Fixed so that the reduction tree
/// (and therefore the floating result) is independent of thread count.
pub const SUM_BLOCK: u64 = 4096;

/// Neumaier-compensated sequential sum.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Reduce block partials with a fixed pairwise tree (adjacent pairs, repeated).
fn pairwise_tree(mut parts: Vec<f64>) -> f64 {
    if parts.is_empty() {
        return 0.0;
    }
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        for pair in parts.chunks(2) {
            next.push(pair.iter().sum());
        }
        parts = next;
    }
    parts[0]
}

/// Deterministic parallel sum of `f(n)` over the inclusive range `lo..=hi`.
///
/// The range is cut into fixed blocks of [`SUM_BLOCK`]; each block is summed
/// with Neumaier compensation and the block results are combined with a fixed
/// pairwise tree, so the result is bit-identical for any thread count.
pub fn sum_range_f64<F: Fn(u64) -> f64 + Sync>(lo: u64, hi: u64, f: F) -> f64 {
    if lo > hi {
        return 0.0;
    }
    let nblocks = (hi - lo) / SUM_BLOCK + 1;
    let parts: Vec<f64> = (0..nblocks)
        .into_par_iter()
        .map(|b| {
            let s = lo + b * SUM_BLOCK;
            let e = (s + SUM_BLOCK - 1).min(hi);
            neumaier_sum((s..=e).map(&f))
        })
        .collect();
    pairwise_tree(parts)
}

/// Complex variant of [`sum_range_f64`] (componentwise compensation).
pub fn sum_range_c64<F: Fn(u64) -> Complex64 + Sync>(lo: u64, hi: u64, f: F) -> Complex64 {
    if lo > hi {
        return Complex64::new(0.0, 0.0);
    }
    let nblocks = (hi - lo) / SUM_BLOCK + 1;
    let parts: Vec<(f64, f64)> = (0..nblocks)
        .into_par_iter()
        .map(|b| {
            let s = lo + b * SUM_BLOCK;
            let e = (s + SUM_BLOCK - 1).min(hi);
            let re = neumaier_sum((s..=e).map(|n| f(n).re));
            let im = neumaier_sum((s..=e).map(|n| f(n).im));
            (re, im)
        })
        .collect();
    let re = pairwise_tree(parts.iter().map(|p| p.0).collect());
    let im = pairwise_tree(parts.iter().map(|p| p.1).collect());
    Complex64::new(re, im)
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes via Newton iteration on the Legendre polynomial.
    pub fn new(n: usize) -> Self {
        assert!(n >= 2);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                // Evaluate P_n and P_n' by recurrence.
                let (mut p0, mut p1) = (1.0f64, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
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
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let c = 0.5 * (b - a);
        let d = 0.5 * (b + a);
        neumaier_sum(
            self.nodes
                .iter()
                .zip(&self.weights)
                .map(|(&x, &w)| w * f(c * x + d)),
        ) * c
    }

    pub fn integrate_c64<F: Fn(f64) -> Complex64>(&self, a: f64, b: f64, f: F) -> Complex64 {
        let c = 0.5 * (b - a);
        let d = 0.5 * (b + a);
        let vals: Vec<Complex64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| f(c * x + d) * w)
            .collect();
        let re = neumaier_sum(vals.iter().map(|z| z.re));
        let im = neumaier_sum(vals.iter().map(|z| z.im));
        Complex64::new(re, im) * c
    }
}

fn gl16() -> &'static GaussLegendre {
    static GL: std::sync::OnceLock<GaussLegendre> = std::sync::OnceLock::new();
    GL.get_or_init(|| GaussLegendre::new(16))
}

fn gl32() -> &'static GaussLegendre {
    static GL: std::sync::OnceLock<GaussLegendre> = std::sync::OnceLock::new();
    GL.get_or_init(|| GaussLegendre::new(32))
}

fn adaptive_rec<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let coarse = gl16().integrate(a, b, f);
    let fine = gl32().integrate(a, b, f);
    if (fine - coarse).abs() <= tol || depth >= 48 {
        return fine;
    }
    let m = 0.5 * (a + b);
    adaptive_rec(f, a, m, 0.5 * tol, depth + 1) + adaptive_rec(f, m, b, 0.5 * tol, depth + 1)
}

/// Adaptive Gauss–Legendre quadrature with interval bisection, absolute
/// tolerance `tol`.
pub fn integrate_adaptive<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    adaptive_rec(f, a, b, tol, 0)
}

fn simpson_rec<F: Fn(f64) -> f64 + Copy>(
    f: F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || depth >= 52 {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)
}

/// Adaptive Simpson quadrature. Kept as an independent scheme so smooth-weight
/// constants can be cross-checked against [`integrate_adaptive`].
pub fn integrate_simpson<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 0)
}

// ---------------------------------------------------------------------------
// Least squares
// ---------------------------------------------------------------------------

/// Ordinary least squares for `y ≈ intercept + slope·x`.
/// Returns `(intercept, slope, residual_l2)`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> crate::Result<(f64, f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(crate::Error::precondition("fit_line needs >= 2 points"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(crate::Error::precondition(
            "fit_line: degenerate design matrix (all x equal)",
        ));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let resid = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum::<f64>()
        .sqrt();
    Ok((intercept, slope, resid))
}

// ---------------------------------------------------------------------------
// Deterministic primality for u64 (used to pick CRT moduli and in oracles)
// ---------------------------------------------------------------------------

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for all `u64` (fixed witness set).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_sum_matches_naive() {
        let s = sum_range_f64(1, 100_000, |n| 1.0 / n as f64);
        let naive: f64 = (1..=100_000u64).map(|n| 1.0 / n as f64).sum();
        assert!((s - naive).abs() < 1e-10);
    }

    #[test]
    fn block_sum_thread_invariant() {
        let f = |n: u64| ((n as f64).sin() * 1e-3).exp() / (n as f64 + 0.5);
        let full = sum_range_f64(1, 200_000, f);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let single = pool.install(|| sum_range_f64(1, 200_000, f));
        assert_eq!(full.to_bits(), single.to_bits());
    }

    #[test]
    fn gauss_legendre_exactness() {
        // GL-16 integrates degree-31 polynomials exactly.
        let gl = GaussLegendre::new(16);
        let v = gl.integrate(0.0, 1.0, |x| x.powi(20));
        assert!((v - 1.0 / 21.0).abs() < 1e-15);
    }

    #[test]
    fn quadrature_schemes_agree() {
        let f = |x: f64| (-x * x).exp();
        let a = integrate_adaptive(f, 0.0, 3.0, 1e-13);
        let b = integrate_simpson(f, 0.0, 3.0, 1e-13);
        assert!((a - b).abs() < 1e-11, "{a} vs {b}");
        // erf(3)·sqrt(pi)/2
        assert!((a - 0.886_226_911_789_569).abs() < 1e-9);
    }

    #[test]
    fn fit_line_recovers_exact() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.5 - 2.0 * x).collect();
        let (a, b, r) = fit_line(&xs, &ys).unwrap();
        assert!((a - 3.5).abs() < 1e-12 && (b + 2.0).abs() < 1e-12 && r < 1e-10);
    }

    #[test]
    fn miller_rabin_small() {
        let primes: Vec<u64> = (2..100).filter(|&n| is_prime_u64(n)).collect();
        assert_eq!(
            primes,
            vec![
                2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73,
                79, 83, 89, 97
            ]
        );
        assert!(is_prime_u64(1_000_003));
        assert!(!is_prime_u64(1_000_001));
        assert!(is_prime_u64((1u64 << 61) - 1));
    }
}
