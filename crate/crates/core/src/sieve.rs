//! Sifted second-moment sums, `λ(dn)²` in arithmetic progressions with
//! main-term comparison, the sieve density function with its dimension-one
//! Mertens product, and the smooth sandwich weights `w₁ ≤ 1_{[0,X]} ≤ w₂`
//! with numerical Mellin transforms.

use crate::error::{Error, Result};
use crate::forms::CoefficientTable;
use crate::lseries::rs_residue_euler;
use crate::primes::{primes_up_to, SmallestPrimeFactorTable};
use crate::util::{integrate_adaptive, integrate_simpson, GaussLegendre};
use num_complex::Complex64;
use serde::Serialize;
use std::sync::OnceLock;

const EXP_TAIL_LOG: f64 = 41.446_531_673_892_82;

// ---------------------------------------------------------------------------
// Sifted Rankin–Selberg sums
// ---------------------------------------------------------------------------

/// A closed prime interval `[Y, Z]` acting as the sifting set `P(Y, Z)`.
#[derive(Debug, Clone, Serialize)]
pub struct SiftingSet {
    pub y: f64,
    pub z: f64,
}

impl SiftingSet {
    pub fn new(y: f64, z: f64) -> Result<Self> {
        if !(2.0 <= y && y < z) {
            return Err(Error::precondition("SiftingSet: need 2 <= Y < Z"));
        }
        Ok(SiftingSet { y, z })
    }

    /// `(n, P(Y,Z)) = 1` ⇔ no prime factor of `n` lies in `[Y, Z]`.
    pub fn coprime(&self, n: u64, spf: &SmallestPrimeFactorTable) -> bool {
        n == 0 || !spf.has_factor_in(n, self.y, self.z)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SiftedSumReport {
    pub x: u64,
    pub a: i64,
    pub y: f64,
    pub z: f64,
    pub value: f64,
    /// value / (X · log Y / log Z).
    pub ratio: f64,
}

/// `Σ_{n ≤ X, (n−a, P(Y,Z)) = 1} λ(n)²`.
///
/// Edge cases follow the shifted-sequence convention: the term `n = a` is
/// excluded (gcd against the infinite product is not defined at 0) and
/// negative `n−a` are sifted through `|n−a|`.
pub fn sifted_rs_sum(
    lambda: &CoefficientTable,
    a: i64,
    y: f64,
    z: f64,
    x: u64,
    spf: &SmallestPrimeFactorTable,
) -> Result<SiftedSumReport> {
    let set = SiftingSet::new(y, z)?;
    if lambda.limit < x {
        return Err(Error::precondition("sifted_rs_sum: table too short"));
    }
    let max_shift = (1 - a).unsigned_abs().max((x as i64 - a).unsigned_abs());
    if spf.limit < max_shift.max(2) {
        return Err(Error::precondition("sifted_rs_sum: SPF table too short"));
    }
    let mut acc = 0.0f64;
    for n in 1..=x {
        let m = n as i64 - a;
        if m == 0 {
            continue;
        }
        if set.coprime(m.unsigned_abs(), spf) {
            let v = lambda.value(n);
            acc += v * v;
        }
    }
    let xf = x as f64;
    let ratio = acc / (xf * y.ln() / z.ln());
    Ok(SiftedSumReport { x, a, y, z, value: acc, ratio })
}

// ---------------------------------------------------------------------------
// Arithmetic progressions
// ---------------------------------------------------------------------------

fn euler_phi(mut q: u64) -> u64 {
    let mut phi = 1u64;
    let mut p = 2u64;
    while p * p <= q {
        if q % p == 0 {
            let mut pe = 1u64;
            while q % p == 0 {
                q /= p;
                pe *= p;
            }
            phi *= pe - pe / p;
        }
        p += 1;
    }
    if q > 1 {
        phi *= q - 1;
    }
    phi
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn is_squarefree(mut n: u64) -> bool {
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

#[derive(Debug, Clone, Serialize)]
pub struct ApRsReport {
    pub x: u64,
    pub d: u64,
    pub a: u64,
    pub q: u64,
    pub value: f64,
    pub main_term: f64,
    pub relative_gap: f64,
    /// Which reduction produced the main term.
    pub route: String,
}

/// `Σ_{n≤X, n≡a (mod q)} λ(dn)²` with the predicted main term
/// `(1/φ(q)) H_d(1) G_q(1) Res_{s=1} L(s,φ⊗φ) · X` (coprime case), or the
/// `q₀ = (a,q)` reduction for general residues (then `d = 1`, `q`
/// square-free).
pub fn ap_rs_sum(
    lambda: &CoefficientTable,
    d: u64,
    a: u64,
    q: u64,
    x: u64,
    spf: &SmallestPrimeFactorTable,
) -> Result<ApRsReport> {
    if d == 0 || q == 0 {
        return Err(Error::precondition("ap_rs_sum: d, q >= 1"));
    }
    if !is_squarefree(d) {
        return Err(Error::precondition("ap_rs_sum: d must be square-free"));
    }
    if lambda.limit < d.saturating_mul(x) {
        return Err(Error::precondition("ap_rs_sum: table must cover d·X"));
    }
    if spf.limit < d.max(q).max(2) {
        return Err(Error::precondition("ap_rs_sum: SPF table too short"));
    }
    let a_red = a % q;
    let mut value = 0.0f64;
    let mut n = if a_red == 0 { q } else { a_red };
    while n <= x {
        let v = lambda.value(d * n);
        value += v * v;
        n += q;
    }
    let res = rs_residue_euler(lambda, lambda.limit.min(100_000))?;
    let (main, route) = if gcd(a_red.max(1) * d % q, q) == 1 && gcd(d, q) == 1 && a_red != 0 {
        let h = crate::lseries::hd_at_one(lambda, d, spf);
        let g = crate::lseries::gq_at_one(lambda, q, spf);
        (
            h * g * res * x as f64 / euler_phi(q) as f64,
            "proposition (gcd(ad,q)=1)".to_string(),
        )
    } else {
        if d != 1 {
            return Err(Error::precondition(
                "ap_rs_sum: general residues need d = 1 (corollary route)",
            ));
        }
        if !is_squarefree(q) {
            return Err(Error::precondition(
                "ap_rs_sum: corollary route needs square-free q",
            ));
        }
        let q0 = if a_red == 0 { q } else { gcd(a_red, q) };
        let q1 = q / q0;
        let h = crate::lseries::hd_at_one(lambda, q0, spf);
        let g = crate::lseries::gq_at_one(lambda, q1, spf);
        (
            h * g * res * x as f64 / (q0 as f64 * euler_phi(q1) as f64),
            format!("corollary (q0={q0})"),
        )
    };
    let gap = (value - main).abs() / main.abs().max(1e-300);
    Ok(ApRsReport { x, d, a: a_red, q, value, main_term: main, relative_gap: gap, route })
}

#[derive(Debug, Clone, Serialize)]
pub struct SmoothedApReport {
    pub p: u64,
    pub h: i64,
    pub x: f64,
    pub value: f64,
    pub truncation: u64,
    /// value / (ν^{−25/16} X) with ν = √p.
    pub ratio_exp_25_16: f64,
    /// value / (ν^{−41/16} X): both displayed exponents are reported because
    /// the source uses each once.
    pub ratio_exp_41_16: f64,
}

/// `Σ_{n≡h (mod p), n≥1} λ(n)² e^{−n/X}` with a 1e−9-relative tail.
pub fn smoothed_ap_rs(
    lambda: &CoefficientTable,
    h: i64,
    p: u64,
    x: f64,
) -> Result<SmoothedApReport> {
    if !crate::util::is_prime_u64(p) {
        return Err(Error::precondition("smoothed_ap_rs: p must be prime"));
    }
    if !(x > 0.0) {
        return Err(Error::precondition("smoothed_ap_rs: X > 0"));
    }
    let want = (x * EXP_TAIL_LOG).ceil() as u64;
    let top = want.min(lambda.limit).max(1);
    let hm = h.rem_euclid(p as i64) as u64;
    let first = if hm == 0 { p } else { hm };
    let mut value = 0.0f64;
    let mut n = first;
    while n <= top {
        let v = lambda.value(n);
        value += v * v * (-(n as f64) / x).exp();
        n += p;
    }
    let tail = (x / p as f64 + 1.0)
        * (-(top as f64) / x).exp()
        * ((top as f64 / x) + 1.0)
        * ((top as f64) + 2.0).ln().powi(2);
    if tail > 1e-9 * value.abs() + 1e-9 {
        return Err(Error::precondition(format!(
            "smoothed_ap_rs: table truncates the weighted sum early \
             (tail estimate {tail:.3e}); extend the table"
        )));
    }
    let nu = (p as f64).sqrt();
    Ok(SmoothedApReport {
        p,
        h,
        x,
        value,
        truncation: top,
        ratio_exp_25_16: value / (nu.powf(-25.0 / 16.0) * x),
        ratio_exp_41_16: value / (nu.powf(-41.0 / 16.0) * x),
    })
}

// ---------------------------------------------------------------------------
// Sieve density
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct DensityProductReport {
    pub w: f64,
    pub z: f64,
    pub a: i64,
    pub product: f64,
    /// product / (log z / log w); dimension one means this is ~1.
    pub ratio: f64,
    pub min_g: f64,
    pub max_g: f64,
}

/// Density at a prime: `g(p)` for the sequence `λ(n)²` sifted along `n ≡ a`.
pub fn sieve_density(lambda_p: f64, p: u64, divides_a: bool) -> f64 {
    let pf = p as f64;
    let lp2 = lambda_p * lambda_p - 1.0; // λ(p²)
    if divides_a {
        (lambda_p * lambda_p - lp2 / pf + 1.0 / (pf * pf)) / (pf + 1.0)
    } else {
        (pf / (pf * pf - 1.0)) * (1.0 - lp2 / pf + lp2 / (pf * pf) - 1.0 / (pf * pf * pf))
    }
}

/// `∏_{w ≤ p < z} (1 − g(p))^{−1}` with the dimension diagnostic ratio
/// against `log z / log w`. Every `g(p)` must land in `(0, 1)`.
pub fn sieve_density_product(
    lambda: &CoefficientTable,
    a: i64,
    w: f64,
    z: f64,
) -> Result<DensityProductReport> {
    if !(2.0 <= w && w <= z) {
        return Err(Error::precondition("sieve_density_product: need 2 <= w <= z"));
    }
    if z > lambda.limit as f64 + 1.0 {
        return Err(Error::precondition("sieve_density_product: z beyond table"));
    }
    let primes = primes_up_to(z.ceil() as u64);
    let mut log_acc = 0.0f64;
    let mut min_g = f64::INFINITY;
    let mut max_g = f64::NEG_INFINITY;
    let mut seen = false;
    for &p in &primes {
        let pf = p as f64;
        if pf < w || pf >= z {
            continue;
        }
        let divides = a == 0 || a.unsigned_abs() % p == 0;
        let g = sieve_density(lambda.value(p), p, divides);
        if !(g > 0.0 && g < 1.0) {
            return Err(Error::invariant(format!(
                "sieve density g({p}) = {g} outside (0,1)"
            )));
        }
        min_g = min_g.min(g);
        max_g = max_g.max(g);
        seen = true;
        log_acc += -(1.0 - g).ln();
    }
    let product = log_acc.exp();
    let ratio = if w == z || !seen {
        product // empty range: product = 1
    } else {
        product / (z.ln() / w.ln())
    };
    Ok(DensityProductReport {
        w,
        z,
        a,
        product,
        ratio,
        min_g: if seen { min_g } else { 0.0 },
        max_g: if seen { max_g } else { 0.0 },
    })
}

// ---------------------------------------------------------------------------
// Smooth sandwich weights
// ---------------------------------------------------------------------------

/// `g(x) = exp(−1/(x(1−x)))` on (0,1), 0 elsewhere.
pub fn bump(x: f64) -> f64 {
    if x > 0.0 && x < 1.0 {
        (-1.0 / (x * (1.0 - x))).exp()
    } else {
        0.0
    }
}

/// The normalization constant `C = ∫₀¹ g`, computed by two independent
/// quadrature schemes that must agree to 1e−12.
pub fn bump_mass() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| {
        let a = integrate_adaptive(bump, 0.0, 1.0, 1e-14);
        let b = integrate_simpson(bump, 0.0, 1.0, 1e-14);
        assert!((a - b).abs() < 1e-12, "quadrature schemes disagree: {a} vs {b}");
        a
    })
}

struct GTable {
    cum: Vec<f64>, // cum[i] = ∫₀^{i/M} g
    gl: GaussLegendre,
    mass: f64,
}

const G_PANELS: usize = 2048;

fn g_table() -> &'static GTable {
    static T: OnceLock<GTable> = OnceLock::new();
    T.get_or_init(|| {
        let gl = GaussLegendre::new(16);
        let mut cum = Vec::with_capacity(G_PANELS + 1);
        cum.push(0.0);
        let mut acc = 0.0;
        for i in 0..G_PANELS {
            let a = i as f64 / G_PANELS as f64;
            let b = (i + 1) as f64 / G_PANELS as f64;
            acc += gl.integrate(a, b, bump);
            cum.push(acc);
        }
        GTable { cum, gl, mass: bump_mass() }
    })
}

/// `G(y) = (1/C)∫_{−∞}^y g`: 0 below 0, 1 above 1, smooth ramp between.
pub fn bump_cdf(y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    if y >= 1.0 {
        return 1.0;
    }
    let t = g_table();
    let idx = ((y * G_PANELS as f64).floor() as usize).min(G_PANELS - 1);
    let a = idx as f64 / G_PANELS as f64;
    (t.cum[idx] + t.gl.integrate(a, y, bump)) / t.mass
}

/// Sandwich weight pair for the window `[0, X]` with transition scale `Y`:
/// `w₁` is the minorant (1 on `[Y, X−Y]`, 0 outside `(0, X)`), `w₂` the
/// majorant (1 on `[0, X]`, 0 outside `(−Y, X+Y)`).
#[derive(Debug, Clone, Copy)]
pub struct SmoothWeight {
    pub x: f64,
    pub y: f64,
    pub ell: u8,
}

impl SmoothWeight {
    pub fn new(x: f64, y: f64, ell: u8) -> Result<Self> {
        if !(y > 0.0 && y < x / 2.0) {
            return Err(Error::precondition("SmoothWeight: need 0 < Y < X/2"));
        }
        if ell != 1 && ell != 2 {
            return Err(Error::precondition("SmoothWeight: ell in {1, 2}"));
        }
        Ok(SmoothWeight { x, y, ell })
    }

    /// Pointwise evaluation; the plateau and support hold exactly because
    /// `bump_cdf` clamps outside (0, 1).
    pub fn eval(&self, u: f64) -> f64 {
        match self.ell {
            1 => bump_cdf(u / self.y) - bump_cdf((u - self.x + self.y) / self.y),
            _ => bump_cdf((u + self.y) / self.y) - bump_cdf((u - self.x) / self.y),
        }
    }
}

pub fn smooth_weight_eval(wt: &SmoothWeight, u: f64) -> f64 {
    wt.eval(u)
}

/// Numerical Mellin transform `ŵ(s) = ∫₀^∞ w(u) u^{s−1} du`, Re s > 0.
///
/// The plateau contributes analytically (`(b^s − a^s)/s`); the two transition
/// bands are integrated adaptively. At `s = 1` the result is `X + O(Y)` and
/// is asserted to lie in `[X − 2Y, X + 2Y]`.
pub fn smooth_weight_mellin(wt: &SmoothWeight, s: Complex64) -> Result<Complex64> {
    if s.re <= 0.0 {
        return Err(Error::precondition("smooth_weight_mellin: Re s > 0"));
    }
    let pow = |u: f64| -> Complex64 {
        // u^{s−1}
        ((s - 1.0) * u.ln()).exp()
    };
    let anti = |a: f64, b: f64| -> Complex64 {
        // ∫_a^b u^{s−1} du = (b^s − a^s)/s, with 0^s = 0 for Re s > 0.
        let bs = (s * b.ln()).exp();
        let as_ = if a == 0.0 { Complex64::new(0.0, 0.0) } else { (s * a.ln()).exp() };
        (bs - as_) / s
    };
    let band = |a: f64, b: f64| -> Complex64 {
        if a >= b {
            return Complex64::new(0.0, 0.0);
        }
        let scale = b.powf(s.re).max(1e-300);
        let tol = 1e-11 * scale.max(1.0);
        let re = integrate_adaptive(|u| (wt.eval(u) * pow(u)).re, a, b, tol);
        let im = integrate_adaptive(|u| (wt.eval(u) * pow(u)).im, a, b, tol);
        Complex64::new(re, im)
    };
    let (x, y) = (wt.x, wt.y);
    let value = match wt.ell {
        1 => band(0.0, y) + anti(y, x - y) + band(x - y, x),
        _ => anti(0.0, x) + band(x, x + y),
    };
    // ŵ(1) = X + O(Y) sanity window.
    if (s - Complex64::new(1.0, 0.0)).norm() < 1e-12 {
        let v = value.re;
        if !(x - 2.0 * y <= v && v <= x + 2.0 * y) {
            return Err(Error::invariant(format!(
                "ŵ_{}(1) = {v} outside [X−2Y, X+2Y]",
                wt.ell
            )));
        }
    }
    Ok(value)
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub lower: f64,
    pub sharp: f64,
    pub upper: f64,
    pub x: u64,
    pub y: f64,
    pub d: u64,
    pub a: u64,
    pub q: u64,
}

/// `S(w₁;q,a;d) ≤ Σ_{n≤X, n≡a(q)} λ(dn)² ≤ S(w₂;q,a;d)`, asserted with 1e−9
/// slack. The smoothed sums run over the full support of each weight.
pub fn sandwich_check(
    lambda: &CoefficientTable,
    d: u64,
    a: u64,
    q: u64,
    x: u64,
    y: f64,
) -> Result<SandwichReport> {
    if d == 0 || q == 0 {
        return Err(Error::precondition("sandwich_check: d, q >= 1"));
    }
    let w1 = SmoothWeight::new(x as f64, y, 1)?;
    let w2 = SmoothWeight::new(x as f64, y, 2)?;
    let top = (x as f64 + y).floor() as u64;
    if lambda.limit < d * top {
        return Err(Error::precondition("sandwich_check: table must cover d(X+Y)"));
    }
    let a_red = a % q;
    let start = if a_red == 0 { q } else { a_red };
    let mut lower = 0.0f64;
    let mut sharp = 0.0f64;
    let mut upper = 0.0f64;
    let mut n = start;
    while n <= top {
        let v = lambda.value(d * n);
        let v2 = v * v;
        lower += v2 * w1.eval(n as f64);
        upper += v2 * w2.eval(n as f64);
        if n <= x {
            sharp += v2;
        }
        n += q;
    }
    let slack = 1e-9 * (1.0 + sharp.abs());
    if !(lower <= sharp + slack && sharp <= upper + slack) {
        return Err(Error::invariant(format!(
            "sandwich violated: {lower} ≤ {sharp} ≤ {upper} fails"
        )));
    }
    Ok(SandwichReport { lower, sharp, upper, x, y, d, a: a_red, q })
}
