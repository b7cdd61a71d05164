//! Correlation sums `Σ_{n≤X} f(n) λ(n+h)`, Wilton sums, smoothed shifted
//! convolutions, and the bilinear-sieve decomposition harness: the split of
//! `[1, X]` into the prime-times-rough set `ℐ = ∪_ν 𝒫_ν𝓜_ν` and its
//! complement, with diagonal/off-diagonal diagnostics per dyadic-root block.

use crate::error::{Error, Result};
use crate::forms::CoefficientTable;
use crate::multfun::MultiplicativeTable;
use crate::primes::{build_spf, primes_up_to};
use crate::util::{neumaier_sum, sum_range_c64, sum_range_f64};
use num_complex::Complex64;
use serde::Serialize;

/// Truncation for `e^{−n/X}`-weighted tails: beyond `X·ln(10^18)` the weight
/// is below 1e−18.
const EXP_TAIL_LOG: f64 = 41.446_531_673_892_82; // ln(1e18)

fn c64_pair(z: Complex64) -> (f64, f64) {
    (z.re, z.im)
}

// ---------------------------------------------------------------------------
// Correlation sum
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct CorrelationReport {
    pub x: u64,
    pub h: i64,
    pub f_label: String,
    pub form_label: String,
    /// Σ f(n)λ(n+h) as (re, im).
    pub value: (f64, f64),
    /// Trivial bound Σ |f(n)λ(n+h)|.
    pub trivial_bound: f64,
    /// X (log log X)^{(γ+1)/2} / log X.
    pub envelope: f64,
    pub gamma: f64,
    pub ratio_vs_trivial: f64,
    pub ratio_vs_envelope: f64,
    pub seconds: f64,
}

/// `Σ_{n≤X} f(n) λ(n+h)` with compensated block summation.
///
/// Support clipping: terms with `n+h < 1` are absent, so the sum starts at
/// `max(1, 1−h)`. Both signs of `h` are allowed; `h = 0` is rejected.
pub fn corr_sum(
    f: &MultiplicativeTable,
    lambda: &CoefficientTable,
    h: i64,
    x: u64,
    gamma: f64,
) -> Result<CorrelationReport> {
    if h == 0 {
        return Err(Error::precondition("corr_sum: h must be nonzero"));
    }
    if x < 2 {
        return Err(Error::precondition("corr_sum: X >= 2"));
    }
    if h.unsigned_abs() > x {
        return Err(Error::precondition("corr_sum: |h| <= X enforced"));
    }
    if f.limit < x {
        return Err(Error::precondition("corr_sum: f table too short"));
    }
    let max_shift = if h > 0 { x + h as u64 } else { x };
    if lambda.limit < max_shift {
        return Err(Error::precondition("corr_sum: eigenvalue table too short"));
    }
    let start = if h >= 1 { 1u64 } else { (1 - h) as u64 };
    let t0 = std::time::Instant::now();
    let value = sum_range_c64(start, x, |n| {
        f.value(n) * lambda.value((n as i64 + h) as u64)
    });
    let trivial = sum_range_f64(start, x, |n| {
        (f.value(n) * lambda.value((n as i64 + h) as u64)).norm()
    });
    let seconds = t0.elapsed().as_secs_f64();
    if value.norm() > trivial + 1e-6 {
        return Err(Error::invariant(
            "corr_sum: |S| exceeds the trivial bound (summation bug)",
        ));
    }
    let xf = x as f64;
    let envelope = xf * xf.ln().ln().powf((gamma + 1.0) / 2.0) / xf.ln();
    Ok(CorrelationReport {
        x,
        h,
        f_label: f.label.clone(),
        form_label: lambda.source.clone(),
        value: c64_pair(value),
        trivial_bound: trivial,
        envelope,
        gamma,
        ratio_vs_trivial: if trivial > 0.0 { value.norm() / trivial } else { 0.0 },
        ratio_vs_envelope: value.norm() / envelope,
        seconds,
    })
}

// ---------------------------------------------------------------------------
// Wilton sum
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct WiltonReport {
    pub alpha: f64,
    pub x: u64,
    pub value: (f64, f64),
    /// |S| / (√X log X); square-root cancellation keeps this O(1).
    pub ratio: Option<f64>,
}

/// `Σ_{n≤X} λ(n) e(nα)` with `e(t) = exp(2πit)`.
pub fn wilton_sum(lambda: &CoefficientTable, alpha: f64, x: u64) -> Result<WiltonReport> {
    if x < 1 || x > lambda.limit {
        return Err(Error::precondition("wilton_sum: need 1 <= X <= table limit"));
    }
    let tau = 2.0 * std::f64::consts::PI * alpha;
    let value = sum_range_c64(1, x, |n| {
        let phase = tau * n as f64;
        Complex64::new(phase.cos(), phase.sin()) * lambda.value(n)
    });
    let ratio = if x >= 2 {
        Some(value.norm() / ((x as f64).sqrt() * (x as f64).ln()))
    } else {
        None
    };
    Ok(WiltonReport { alpha, x, value: c64_pair(value), ratio })
}

// ---------------------------------------------------------------------------
// Smoothed shifted convolution
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct ShiftedConvolutionResult {
    pub m1: u64,
    pub m2: u64,
    pub h: i64,
    pub x: f64,
    pub value: f64,
    pub truncation: u64,
    pub tail_estimate: f64,
    /// value / (e^{(m1+m2)h/(2X m1 m2)} (m1 m2)^{4/5} X^{9/10}).
    pub bound_ratio: f64,
}

/// `Σ_{n≥1} λ(m₁n+h) λ(m₂n+h) e^{−n/X}`, truncated where the exponential
/// weight reaches 1e−18 (or at table coverage, with the tail reported).
pub fn smoothed_shifted_convolution(
    lambda: &CoefficientTable,
    m1: u64,
    m2: u64,
    h: i64,
    x: f64,
) -> Result<ShiftedConvolutionResult> {
    if m1 == 0 || m2 == 0 || gcd(m1, m2) != 1 {
        return Err(Error::precondition(
            "smoothed_shifted_convolution: need coprime m1, m2 >= 1",
        ));
    }
    if h == 0 {
        return Err(Error::precondition("smoothed_shifted_convolution: h != 0"));
    }
    if !(x > 0.0) {
        return Err(Error::precondition("smoothed_shifted_convolution: X > 0"));
    }
    let m_max = m1.max(m2);
    let want = (x * EXP_TAIL_LOG).ceil() as u64;
    let coverage = ((lambda.limit as i64 - h).max(0) as u64) / m_max;
    let n_trunc = want.min(coverage).max(1);
    let value = sum_range_f64(1, n_trunc, |n| {
        let k1 = m1 as i64 * n as i64 + h;
        let k2 = m2 as i64 * n as i64 + h;
        if k1 < 1 || k2 < 1 {
            return 0.0;
        }
        lambda.value(k1 as u64) * lambda.value(k2 as u64) * (-(n as f64) / x).exp()
    });
    // Tail envelope: |λλ| ≤ τ·τ ≪ (mn)^ε; a generous polylog envelope times
    // the geometric tail of the weight.
    let log_top = ((m_max * n_trunc) as f64 + h.abs() as f64 + 2.0).ln();
    let tail = x * (-(n_trunc as f64) / x).exp() * log_top.powi(4);
    if tail > 1e-9 * value.abs() + 1e-9 {
        return Err(Error::precondition(format!(
            "smoothed_shifted_convolution: table truncates the sum too early \
             (tail estimate {tail:.3e}); extend the table"
        )));
    }
    let mf = (m1 * m2) as f64;
    let bound = ((m1 + m2) as f64 * h as f64 / (2.0 * x * mf)).exp()
        * mf.powf(0.8)
        * x.powf(0.9);
    Ok(ShiftedConvolutionResult {
        m1,
        m2,
        h,
        x,
        value,
        truncation: n_trunc,
        tail_estimate: tail,
        bound_ratio: value.abs() / bound,
    })
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

// ---------------------------------------------------------------------------
// Bilinear decomposition partition
// ---------------------------------------------------------------------------

/// Per-ν data: `I_ν = ((ν−1)², ν²]`, its primes `𝒫_ν`, and the rough set
/// `𝓜_ν = {m ≤ X/ν² : (m, P_ν) = 1}` with `P_ν = ∏_{(H−1)² < p ≤ ν²} p`.
#[derive(Debug, Clone, Serialize)]
pub struct NuBlock {
    pub nu: u64,
    pub interval: (u64, u64),
    pub primes: Vec<u64>,
    /// Sifting range of P_ν as a half-open prime interval (lo, hi].
    pub p_range: (f64, f64),
    pub m_set: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct BkszPartition {
    pub x: u64,
    pub c: f64,
    pub delta: f64,
    /// (log X)^{8c+16} and X^{δ/2} from the paper-formula parameters.
    pub h_formula: f64,
    pub k_formula: f64,
    /// Effective cut parameters actually used (overrides, else the formulas).
    pub h_eff: f64,
    pub k_eff: f64,
    /// Set when no integer ν lies in [H, K]: ℐ is empty and the whole sum
    /// sits in 𝒥.
    pub degenerate: bool,
    pub nus: Vec<NuBlock>,
    /// For n ∈ ℐ: (ν-index, prime) of its unique factorization n = p·m.
    i_member: Vec<Option<(u32, u64)>>,
    /// For n ∈ 𝒥₁: index of the ν with exactly one prime-power occurrence.
    j1_nu: Vec<Option<u32>>,
    /// n has at least one prime factor in ∪𝒫_ν.
    in_j2: Vec<bool>,
}

impl BkszPartition {
    pub fn in_i(&self, n: u64) -> bool {
        self.i_member[n as usize].is_some()
    }
    pub fn in_j1(&self, n: u64) -> bool {
        self.j1_nu[n as usize].is_some()
    }
    pub fn in_j2(&self, n: u64) -> bool {
        self.in_j2[n as usize]
    }
    pub fn in_j3(&self, n: u64) -> bool {
        !self.in_j2[n as usize]
    }
    pub fn i_factorization(&self, n: u64) -> Option<(u64, u64, u64)> {
        self.i_member[n as usize].map(|(vi, p)| (self.nus[vi as usize].nu, p, n / p))
    }

    /// Exhaustive re-verification of the §-structure set laws over [1, X].
    pub fn verify_set_laws(&self) -> Result<()> {
        for n in 1..=self.x {
            let i = self.in_i(n);
            let j1 = self.in_j1(n);
            let j2 = self.in_j2(n);
            let j3 = self.in_j3(n);
            if i && !j1 {
                return Err(Error::invariant(format!("ℐ ⊄ 𝒥₁ at n={n}")));
            }
            if j2 == j3 {
                return Err(Error::invariant(format!("𝒥₂/𝒥₃ not a partition at n={n}")));
            }
            if j1 && !j2 {
                return Err(Error::invariant(format!("𝒥₁ ⊄ 𝒥₂ at n={n}")));
            }
            // 𝒥 ⊆ (𝒥₁∖ℐ) ∪ (𝒥₂∖𝒥₁) ∪ 𝒥₃
            if !i && !((j1 && !i) || (j2 && !j1) || j3) {
                return Err(Error::invariant(format!("𝒥 not covered at n={n}")));
            }
        }
        // 𝒥₁^{(ν)} ∖ 𝒫_ν𝓜_ν ⊆ 𝒫_ν·(X/ν², X/(ν−1)²]. This needs the P_ν
        // sifting range to start exactly at the first interval's lower edge,
        // which holds for integer cut overrides.
        let aligned = if let Some(first) = self.nus.first() {
            (self.h_eff - 1.0) * (self.h_eff - 1.0) == ((first.nu - 1) * (first.nu - 1)) as f64
        } else {
            true
        };
        if aligned {
            for n in 1..=self.x {
                if let (Some(vi), None) = (self.j1_nu[n as usize], self.i_member[n as usize]) {
                    let blk = &self.nus[vi as usize];
                    let nu = blk.nu;
                    let p = blk
                        .primes
                        .iter()
                        .copied()
                        .find(|&p| n % p == 0)
                        .ok_or_else(|| Error::invariant(format!("j1 witness missing at n={n}")))?;
                    let m = n / p;
                    let lo_ok = (m as u128) * (nu as u128 * nu as u128) > self.x as u128;
                    let hi_ok =
                        (m as u128) * ((nu - 1) as u128 * (nu - 1) as u128) <= self.x as u128;
                    if !(lo_ok && hi_ok) {
                        return Err(Error::invariant(format!(
                            "𝒥₁^(ν)∖𝒫𝓜 element n={n} not in 𝒫_ν·(X/ν², X/(ν−1)²]"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Build the decomposition sets for the cut parameters
/// `H = (log X)^{8c+16}`, `K = X^{δ/2}`, or explicit overrides.
///
/// With the paper-formula parameters every desk-scale X gives `H ≥ K`; the
/// partition is then degenerate (`ℐ = ∅`) and the flag is set. Overrides let
/// the nontrivial set structure be exercised.
pub fn bksz_partition(
    x: u64,
    c: f64,
    delta: f64,
    overrides: Option<(f64, f64)>,
) -> Result<BkszPartition> {
    if !(delta > 0.0 && delta < 1.0 / 22.0) {
        return Err(Error::precondition("bksz_partition: need 0 < δ < 1/22"));
    }
    if x < 16 {
        return Err(Error::precondition("bksz_partition: X >= 16"));
    }
    let xf = x as f64;
    let h_formula = xf.ln().powf(8.0 * c + 16.0);
    let k_formula = xf.powf(delta / 2.0);
    let (h_eff, k_eff) = overrides.unwrap_or((h_formula, k_formula));
    if h_eff < 1.0 {
        return Err(Error::precondition("bksz_partition: H >= 1"));
    }

    let nu_lo = h_eff.ceil() as u64;
    let nu_hi = k_eff.floor() as u64;
    let degenerate = nu_lo > nu_hi;
    let nu_list: Vec<u64> = if degenerate { Vec::new() } else { (nu_lo..=nu_hi).collect() };

    let spf = build_spf(x.max(2))?;
    // Sifting range of P_ν starts just above (H−1)².
    let sift_lo = {
        let v = (h_eff - 1.0) * (h_eff - 1.0);
        v.floor() + 1.0
    };

    let all_primes = if let Some(&top) = nu_list.last() {
        primes_up_to(top * top)
    } else {
        Vec::new()
    };

    let mut nus = Vec::with_capacity(nu_list.len());
    let mut i_member: Vec<Option<(u32, u64)>> = vec![None; x as usize + 1];
    for (vi, &nu) in nu_list.iter().enumerate() {
        let lo = (nu - 1) * (nu - 1);
        let hi = nu * nu;
        let start = all_primes.partition_point(|&p| p <= lo);
        let end = all_primes.partition_point(|&p| p <= hi);
        let primes: Vec<u64> = all_primes[start..end].to_vec();
        let m_cap = x / (nu * nu);
        let mut m_set = Vec::new();
        for m in 1..=m_cap {
            if !spf.has_factor_in(m, sift_lo, hi as f64) {
                m_set.push(m);
            }
        }
        for &p in &primes {
            for &m in &m_set {
                let n = p * m;
                debug_assert!(n <= x, "𝒫_ν𝓜_ν ⊂ [1,X] by construction");
                if i_member[n as usize].is_some() {
                    return Err(Error::invariant(format!(
                        "𝒫_ν𝓜_ν sets are not disjoint at n={n}"
                    )));
                }
                i_member[n as usize] = Some((vi as u32, p));
            }
        }
        nus.push(NuBlock {
            nu,
            interval: (lo, hi),
            primes,
            p_range: (sift_lo - 1.0, hi as f64),
            m_set,
        });
    }

    // 𝒥 classification by factorization: map each prime factor to its root
    // interval ν = ⌈√p⌉ and record occurrence multiplicities.
    let mut j1_nu: Vec<Option<u32>> = vec![None; x as usize + 1];
    let mut in_j2 = vec![false; x as usize + 1];
    if !degenerate {
        for n in 1..=x {
            let mut first_nu: Option<u32> = None;
            let mut first_mult = 0u32;
            let mut any = false;
            for (p, e) in spf.factorize(n) {
                let r = p.isqrt();
                let nu = if r * r == p { r } else { r + 1 };
                if nu < nu_lo || nu > nu_hi {
                    continue;
                }
                any = true;
                let vi = (nu - nu_lo) as u32;
                match first_nu {
                    None => {
                        first_nu = Some(vi);
                        first_mult = e;
                    }
                    Some(cur) if vi < cur => {
                        first_nu = Some(vi);
                        first_mult = e;
                    }
                    Some(cur) if vi == cur => first_mult += e,
                    _ => {}
                }
            }
            in_j2[n as usize] = any;
            // Exactly one occurrence counted with multiplicity in the first
            // touched 𝒫_ν, none earlier.
            if let Some(vi) = first_nu {
                if first_mult == 1 {
                    j1_nu[n as usize] = Some(vi);
                }
            }
        }
        // Constructive cross-check: ℐ ⊆ 𝒥₁ with matching ν.
        for n in 1..=x {
            if let Some((vi, _)) = i_member[n as usize] {
                if j1_nu[n as usize] != Some(vi) {
                    return Err(Error::invariant(format!(
                        "ℐ member n={n} not classified in 𝒥₁^(ν)"
                    )));
                }
            }
        }
    }

    Ok(BkszPartition {
        x,
        c,
        delta,
        h_formula,
        k_formula,
        h_eff,
        k_eff,
        degenerate,
        nus,
        i_member,
        j1_nu,
        in_j2,
    })
}

// ---------------------------------------------------------------------------
// Decomposition of the correlation sum
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct NuDiagnostics {
    pub nu: u64,
    /// Σ_{p∈𝒫_ν} |f(p)|² Σ_{n≡h (mod p)} λ(n)² e^{−n/X}.
    pub diagonal: f64,
    /// Σ_{p₁≠p₂∈𝒫_ν} |f(p₁)f(p₂)| |Σ_m λ(p₁m+h)λ(p₂m+h) e^{−ν²m/X}|.
    pub off_diagonal: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BkszDecomposition {
    pub x: u64,
    pub h: i64,
    pub degenerate: bool,
    pub s_i: (f64, f64),
    pub s_j: (f64, f64),
    pub total: (f64, f64),
    /// |S_ℐ + S_𝒥 − S| / (|S| + 1): same multiset of terms, regrouped.
    pub identity_gap_rel: f64,
    pub sum_j1_minus_i: (f64, f64),
    pub sum_j2_minus_j1: (f64, f64),
    pub sum_j3: (f64, f64),
    /// Second moments Σ |λ(n+h)|² over the 𝒥-refinement.
    pub j1_minus_i_second_moment: f64,
    pub j2_minus_j1_second_moment: f64,
    pub j3_second_moment: f64,
    /// Σ_{n∈𝒥₃} |f(n)|² (the sifted mass Hypothesis (ii) controls).
    pub j3_f_second_moment: f64,
    pub per_nu: Vec<NuDiagnostics>,
    /// The displayed bilinear form writes f(p) for the pair f(p₁)f(p₂);
    /// diagnostics follow it with |f(p₁)f(p₂)|.
    pub off_diagonal_convention: String,
}

/// Split the correlation sum over the partition and report the §-structure
/// diagnostics. The regrouping identity `S_ℐ + S_𝒥 = S` must hold to 1e−9
/// relative.
pub fn bksz_decompose(
    f: &MultiplicativeTable,
    lambda: &CoefficientTable,
    h: i64,
    part: &BkszPartition,
) -> Result<BkszDecomposition> {
    let x = part.x;
    if f.limit < x {
        return Err(Error::precondition("bksz_decompose: f table too short"));
    }
    let max_shift = if h > 0 { x + h as u64 } else { x };
    if lambda.limit < max_shift {
        return Err(Error::precondition("bksz_decompose: λ table too short"));
    }
    let term = |n: u64| -> Complex64 {
        let k = n as i64 + h;
        if k < 1 {
            Complex64::new(0.0, 0.0)
        } else {
            f.value(n) * lambda.value(k as u64)
        }
    };
    let lam2 = |n: u64| -> f64 {
        let k = n as i64 + h;
        if k < 1 {
            0.0
        } else {
            let v = lambda.value(k as u64);
            v * v
        }
    };

    let mut s_i = Complex64::new(0.0, 0.0);
    let mut s_j = Complex64::new(0.0, 0.0);
    let mut sum_j1_minus_i = Complex64::new(0.0, 0.0);
    let mut sum_j2_minus_j1 = Complex64::new(0.0, 0.0);
    let mut sum_j3 = Complex64::new(0.0, 0.0);
    let (mut m1, mut m2, mut m3, mut mf3) = (0.0f64, 0.0, 0.0, 0.0);
    for n in 1..=x {
        let t = term(n);
        if part.in_i(n) {
            s_i += t;
        } else {
            s_j += t;
        }
        if part.in_j1(n) && !part.in_i(n) {
            sum_j1_minus_i += t;
            m1 += lam2(n);
        } else if part.in_j2(n) && !part.in_j1(n) {
            sum_j2_minus_j1 += t;
            m2 += lam2(n);
        } else if part.in_j3(n) {
            sum_j3 += t;
            m3 += lam2(n);
            mf3 += f.value(n).norm_sqr();
        }
    }
    let total = sum_range_c64(1, x, term);
    let gap = (s_i + s_j - total).norm() / (total.norm() + 1.0);
    if gap > 1e-9 {
        return Err(Error::invariant(format!(
            "bksz_decompose: regrouping identity broken (gap {gap:.2e})"
        )));
    }
    // S_𝒥 must also equal the sum of its three refinement pieces.
    let refine_gap = (sum_j1_minus_i + sum_j2_minus_j1 + sum_j3 - s_j).norm()
        / (s_j.norm() + 1.0);
    if refine_gap > 1e-9 {
        return Err(Error::invariant(format!(
            "bksz_decompose: 𝒥 refinement identity broken (gap {refine_gap:.2e})"
        )));
    }

    let xf = x as f64;
    let mut per_nu = Vec::with_capacity(part.nus.len());
    for blk in &part.nus {
        let mut diagonal = 0.0f64;
        for &p in &blk.primes {
            let fp2 = f.value(p).norm_sqr();
            if fp2 == 0.0 {
                continue;
            }
            // Σ_{n≡h (mod p), n≥1} λ(n)² e^{−n/X}
            let n_top = ((xf * EXP_TAIL_LOG) as u64).min(lambda.limit);
            let hm = h.rem_euclid(p as i64) as u64;
            let first = if hm == 0 { p } else { hm };
            let mut inner = 0.0f64;
            let mut n = first;
            while n <= n_top {
                let v = lambda.value(n);
                inner += v * v * (-(n as f64) / xf).exp();
                n += p;
            }
            diagonal += fp2 * inner;
        }
        let mut off_diagonal = 0.0f64;
        let x_eff = xf / (blk.nu * blk.nu) as f64;
        for (i, &p1) in blk.primes.iter().enumerate() {
            for &p2 in &blk.primes[i + 1..] {
                let w = (f.value(p1) * f.value(p2)).norm();
                if w == 0.0 {
                    continue;
                }
                let m_top = ((x_eff * EXP_TAIL_LOG).ceil() as u64)
                    .min((lambda.limit as i64 - h).max(0) as u64 / p2);
                let inner = neumaier_sum((1..=m_top).map(|m| {
                    let k1 = (p1 * m) as i64 + h;
                    let k2 = (p2 * m) as i64 + h;
                    if k1 < 1 || k2 < 1 {
                        0.0
                    } else {
                        lambda.value(k1 as u64)
                            * lambda.value(k2 as u64)
                            * (-(m as f64) / x_eff).exp()
                    }
                }));
                // both (p1,p2) and (p2,p1)
                off_diagonal += 2.0 * w * inner.abs();
            }
        }
        per_nu.push(NuDiagnostics { nu: blk.nu, diagonal, off_diagonal });
    }

    Ok(BkszDecomposition {
        x,
        h,
        degenerate: part.degenerate,
        s_i: c64_pair(s_i),
        s_j: c64_pair(s_j),
        total: c64_pair(total),
        identity_gap_rel: gap,
        sum_j1_minus_i: c64_pair(sum_j1_minus_i),
        sum_j2_minus_j1: c64_pair(sum_j2_minus_j1),
        sum_j3: c64_pair(sum_j3),
        j1_minus_i_second_moment: m1,
        j2_minus_j1_second_moment: m2,
        j3_second_moment: m3,
        j3_f_second_moment: mf3,
        per_nu,
        off_diagonal_convention: "|f(p1)f(p2)| per displayed bilinear form".to_string(),
    })
}
