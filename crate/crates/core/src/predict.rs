//! The probabilistic model for the absolute-value correlation: local
//! expectations of the square-free-weighted coefficient magnitudes, the
//! singular series correcting for local dependence between `n` and `n+1`,
//! the Sato–Tate mean-value exponents `δ_r` (closed form against kink-split
//! quadrature), and Wirsing-type mean-value fits.

use crate::error::{Error, Result};
use crate::forms::CoefficientTable;
use crate::primes::{primes_up_to, SmallestPrimeFactorTable};
use crate::util::{fit_line, GaussLegendre};
use serde::Serialize;
use std::sync::OnceLock;

/// Local expectations of `X_p = |μ(p^{ord_p n}) λ_π(p^{ord_p n})|` and its
/// φ-twin: `E(X_p) = 1 + (1/p − 1/p²)(a_π − 1)`, and the joint
/// `E(X_p Y_p) = 1 + (1/p − 1/p²)(a_π + a_φ − 2)`.
pub fn local_expectations(p: u64, a_pi: f64, a_phi: f64) -> (f64, f64, f64) {
    let pf = p as f64;
    let w = 1.0 / pf - 1.0 / (pf * pf);
    (
        1.0 + w * (a_pi - 1.0),
        1.0 + w * (a_phi - 1.0),
        1.0 + w * (a_pi + a_phi - 2.0),
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct SingularSeriesResult {
    pub prime_cut: u64,
    /// Running partial products at decade checkpoints (cut, value).
    pub checkpoints: Vec<(u64, f64)>,
    /// Conservative tail envelope `Σ_{p>P₀} 25/p² < 25/P₀`.
    pub tail_bound: f64,
    pub value: f64,
}

/// `𝔖_{π,φ} = ∏_p E(X_p Y_p) / (E(X_p) E(Y_p))`, truncated at `P₀`.
pub fn singular_series(
    pi_table: &CoefficientTable,
    phi_table: &CoefficientTable,
    p0: u64,
) -> Result<SingularSeriesResult> {
    if p0 < 100 {
        return Err(Error::precondition("singular_series: P0 >= 100"));
    }
    if pi_table.limit < p0 || phi_table.limit < p0 {
        return Err(Error::precondition("singular_series: tables must cover P0"));
    }
    let mut value = 1.0f64;
    let mut checkpoints = Vec::new();
    let marks = [100u64, 1_000, 10_000, 100_000];
    let mut mark_idx = 0usize;
    for &p in &primes_up_to(p0) {
        while mark_idx < marks.len() && marks[mark_idx] < p {
            if marks[mark_idx] <= p0 {
                checkpoints.push((marks[mark_idx], value));
            }
            mark_idx += 1;
        }
        let a_pi = pi_table.value(p).abs();
        let a_phi = phi_table.value(p).abs();
        let (ex, ey, exy) = local_expectations(p, a_pi, a_phi);
        let denom = ex * ey;
        if !(denom > 0.0) || !(exy / denom > 0.0) {
            return Err(Error::invariant(format!(
                "singular series: nonpositive local factor at p={p} \
                 (E_X={ex}, E_Y={ey}, E_XY={exy})"
            )));
        }
        value *= exy / denom;
    }
    while mark_idx < marks.len() {
        if marks[mark_idx] <= p0 {
            checkpoints.push((marks[mark_idx], value));
        }
        mark_idx += 1;
    }
    checkpoints.push((p0, value));
    Ok(SingularSeriesResult {
        prime_cut: p0,
        checkpoints,
        tail_bound: 25.0 / p0 as f64,
        value,
    })
}

// ---------------------------------------------------------------------------
// Sato–Tate exponents
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct SatoTateExponent {
    pub r: u32,
    pub closed_form: f64,
    pub quadrature: f64,
    pub difference: f64,
}

fn gl32() -> &'static GaussLegendre {
    static GL: OnceLock<GaussLegendre> = OnceLock::new();
    GL.get_or_init(|| GaussLegendre::new(32))
}

/// `δ_r = 1 − (2/π) ∫₀^π |sin((r+1)θ)| sin θ dθ` (the Sato–Tate mean of
/// `|λ_{sym^r}(p)|`), with the integral split at the kinks `θ = kπ/(r+1)`
/// of the absolute value, against the closed form
/// `δ_r = 1 − 4(r+1)/(r(r+2)π) · cot(π/(2(r+1)))`.
pub fn delta_r(r: u32) -> Result<SatoTateExponent> {
    if r < 1 || r > 100 {
        return Err(Error::precondition("delta_r: need 1 <= r <= 100"));
    }
    let rf = r as f64;
    let pi = std::f64::consts::PI;
    let closed = 1.0 - 4.0 * (rf + 1.0) / (rf * (rf + 2.0) * pi) / (pi / (2.0 * (rf + 1.0))).tan();

    // |sin((r+1)θ)|/sinθ · sin²θ = |sin((r+1)θ)| · sinθ, smooth between kinks.
    let pieces = r + 1;
    let mut integral = 0.0f64;
    for k in 0..pieces {
        let a = k as f64 * pi / (pieces as f64);
        let b = (k + 1) as f64 * pi / (pieces as f64);
        integral += gl32().integrate(a, b, |t| ((rf + 1.0) * t).sin().abs() * t.sin());
    }
    let quad = 1.0 - (2.0 / pi) * integral;
    let difference = (closed - quad).abs();
    if difference > 1e-10 {
        return Err(Error::invariant(format!(
            "delta_r({r}): closed form and quadrature disagree by {difference:.3e}"
        )));
    }
    Ok(SatoTateExponent { r, closed_form: closed, quadrature: quad, difference })
}

// ---------------------------------------------------------------------------
// Conjectural main term
// ---------------------------------------------------------------------------

/// Model prediction
/// `𝔖 · (Σ_{n≤X}|μ(n)λ_π(n)|)(Σ_{n≤X}|μ(n)λ_φ(n)|) / X`.
pub fn predicted_correlation(
    pi_table: &CoefficientTable,
    phi_table: &CoefficientTable,
    s: &SingularSeriesResult,
    x: u64,
    spf: &SmallestPrimeFactorTable,
) -> Result<f64> {
    if pi_table.limit < x || phi_table.limit < x || spf.limit < x.max(2) {
        return Err(Error::precondition("predicted_correlation: tables too short"));
    }
    let mut sum_pi = 0.0f64;
    let mut sum_phi = 0.0f64;
    for n in 1..=x {
        if n == 1 || spf.moebius(n) != 0 {
            sum_pi += pi_table.value(n).abs();
            sum_phi += phi_table.value(n).abs();
        }
    }
    Ok(s.value * sum_pi * sum_phi / x as f64)
}

// ---------------------------------------------------------------------------
// Wirsing-type mean-value fit
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct WirsingFit {
    pub delta_hat: f64,
    pub c: f64,
    pub residual: f64,
    pub sample_xs: Vec<u64>,
    pub means: Vec<f64>,
}

/// Fit `Σ_{n≤X} v(n) ≈ c·X/(log X)^δ` by least squares on
/// `log(Σ/X) = log c − δ·log log X`, given the pre-computed sums.
pub fn wirsing_fit_from_sums(sample_xs: &[u64], sums: &[f64]) -> Result<WirsingFit> {
    if sample_xs.len() != sums.len() || sample_xs.len() < 4 {
        return Err(Error::precondition("wirsing_fit: need >= 4 sample points"));
    }
    let xmin = *sample_xs.iter().min().unwrap() as f64;
    let xmax = *sample_xs.iter().max().unwrap() as f64;
    if xmax / xmin < 1e3 {
        return Err(Error::precondition(
            "wirsing_fit: samples must span at least 3 decades",
        ));
    }
    if sums.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::precondition("wirsing_fit: sums must be positive"));
    }
    let xs: Vec<f64> = sample_xs.iter().map(|&x| (x as f64).ln().ln()).collect();
    let ys: Vec<f64> = sample_xs
        .iter()
        .zip(sums)
        .map(|(&x, &s)| (s / x as f64).ln())
        .collect();
    let (logc, slope, residual) = fit_line(&xs, &ys)?;
    Ok(WirsingFit {
        delta_hat: -slope,
        c: logc.exp(),
        residual,
        sample_xs: sample_xs.to_vec(),
        means: sums.iter().zip(sample_xs).map(|(&s, &x)| s / x as f64).collect(),
    })
}

/// Fit the mean value of `|values(n)|` over a geometric ladder.
pub fn wirsing_fit(
    abs_values: &crate::multfun::MultiplicativeTable,
    sample_xs: &[u64],
) -> Result<WirsingFit> {
    let mut xs: Vec<u64> = sample_xs.to_vec();
    xs.sort_unstable();
    if xs.is_empty() || *xs.last().unwrap() > abs_values.limit {
        return Err(Error::precondition("wirsing_fit: samples beyond table"));
    }
    let mut sums = Vec::with_capacity(xs.len());
    let mut acc = 0.0f64;
    let mut xi = 0usize;
    for n in 1..=*xs.last().unwrap() {
        acc += abs_values.value(n).norm();
        while xi < xs.len() && n == xs[xi] {
            sums.push(acc);
            xi += 1;
        }
    }
    wirsing_fit_from_sums(&xs, &sums)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{lambda_table, satake_angles, sym_power_table, EigenformSpec, TableKind};
    use crate::primes::build_spf;

    #[test]
    fn expectations_examples() {
        let (ex, ey, exy) = local_expectations(7, 1.0, 1.0);
        assert_eq!((ex, ey, exy), (1.0, 1.0, 1.0));
        let (ex, _, _) = local_expectations(2, 0.0, 1.0);
        assert!((ex - 0.75).abs() < 1e-15);
    }

    #[test]
    fn local_ratio_close_to_one() {
        // |E_XY/(E_X E_Y) − 1| ≤ 25/p² over a grid of magnitudes ≤ 4.
        for &p in &primes_up_to(1000) {
            for i in 0..=8 {
                for j in 0..=8 {
                    let a = i as f64 * 0.5;
                    let b = j as f64 * 0.5;
                    let (ex, ey, exy) = local_expectations(p, a, b);
                    let ratio = exy / (ex * ey);
                    assert!(
                        (ratio - 1.0).abs() <= 25.0 / (p * p) as f64,
                        "p={p} a={a} b={b}: {ratio}"
                    );
                }
            }
        }
    }

    #[test]
    fn singular_series_trivial_cases() {
        let ones = CoefficientTable::from_values(
            200,
            TableKind::Multiplicative,
            "ones".into(),
            vec![1.0; 201],
        );
        let s = singular_series(&ones, &ones, 150).unwrap();
        assert_eq!(s.value, 1.0);
        // Single-prime toy factor at p=2 with a_π = a_φ = 0:
        // E_XY/(E_X E_Y) = 0.5/(0.75·0.75).
        let (ex, ey, exy) = local_expectations(2, 0.0, 0.0);
        assert!((exy / (ex * ey) - 0.888_888_888_888_888_8).abs() < 1e-12);
    }

    #[test]
    fn singular_series_checkpoint_cauchy() {
        let spf = build_spf(100_000).unwrap();
        let lam = lambda_table(&EigenformSpec::delta(), 100_000, &spf).unwrap();
        let ang = satake_angles(&lam).unwrap();
        let sym3 = sym_power_table(&ang, 3, 100_000, &spf).unwrap();
        let s = singular_series(&sym3, &lam, 100_000).unwrap();
        // |𝔖(10⁴) − 𝔖(10⁵)| within the tail bound at 10⁴.
        let at = |cut: u64| -> f64 {
            s.checkpoints.iter().find(|c| c.0 == cut).unwrap().1
        };
        assert!((at(10_000) - at(100_000)).abs() <= 25.0 / 10_000.0);
        assert!(s.value > 0.0 && s.value.is_finite());
    }

    #[test]
    fn delta_r_known_values() {
        let pi = std::f64::consts::PI;
        let d1 = delta_r(1).unwrap();
        assert!((d1.closed_form - (1.0 - 8.0 / (3.0 * pi))).abs() < 1e-12);
        assert!(d1.difference <= 1e-10);
        let d2 = delta_r(2).unwrap();
        assert!((d2.closed_form - (1.0 - 3.0 * 3f64.sqrt() / (2.0 * pi))).abs() < 1e-12);
        assert!((d2.closed_form - 0.173_003).abs() < 1e-5);
    }

    #[test]
    fn delta_r_monotone_and_bounded() {
        let limit = 1.0 - 8.0 / std::f64::consts::PI.powi(2);
        let mut prev = 0.0;
        for r in 1..=100u32 {
            let d = delta_r(r).unwrap();
            assert!(d.closed_form > prev, "r={r} not increasing");
            assert!(d.closed_form > 0.15 && d.closed_form < 0.19, "r={r}");
            assert!(d.closed_form < limit + 1e-12);
            prev = d.closed_form;
        }
        // Large-r values approach 1 − 8/π².
        assert!((prev - limit).abs() < 1e-3);
    }

    #[test]
    fn predicted_correlation_at_x1() {
        let ones = CoefficientTable::from_values(
            200,
            TableKind::Multiplicative,
            "ones".into(),
            vec![1.0; 201],
        );
        let s = singular_series(&ones, &ones, 150).unwrap();
        let spf = build_spf(10).unwrap();
        let p = predicted_correlation(&ones, &ones, &s, 1, &spf).unwrap();
        assert!((p - s.value).abs() < 1e-15);
    }

    #[test]
    fn wirsing_planted_model_recovery() {
        // Sums generated exactly from S(X) = c·X/(log X)^δ.
        let xs: Vec<u64> = vec![1_000, 10_000, 100_000, 1_000_000, 10_000_000];
        let (c, delta) = (0.83, 0.1512);
        let sums: Vec<f64> = xs
            .iter()
            .map(|&x| c * x as f64 / (x as f64).ln().powf(delta))
            .collect();
        let fit = wirsing_fit_from_sums(&xs, &sums).unwrap();
        assert!((fit.delta_hat - delta).abs() < 1e-3, "{}", fit.delta_hat);
        assert!((fit.c - c).abs() < 1e-3);
    }

    #[test]
    fn wirsing_squarefree_indicator_flat() {
        let spf = build_spf(1_000_000).unwrap();
        let mu = crate::multfun::materialize(
            &crate::multfun::standard_rule(crate::multfun::StandardRule::Moebius).unwrap(),
            1_000_000,
            &spf,
        )
        .unwrap();
        let fit = wirsing_fit(&mu, &[1_000, 10_000, 100_000, 500_000, 1_000_000]).unwrap();
        assert!(fit.delta_hat.abs() < 0.05, "δ̂ = {}", fit.delta_hat);
    }

    #[test]
    fn wirsing_preconditions() {
        assert!(wirsing_fit_from_sums(&[10, 100], &[1.0, 2.0]).is_err());
        assert!(
            wirsing_fit_from_sums(&[10, 20, 30, 40], &[1.0, 2.0, 3.0, 4.0]).is_err(),
            "span < 3 decades"
        );
    }
}
