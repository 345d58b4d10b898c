//! Numerical integration helpers.
//!
//! These back the verification suite: normalization checks, quadrature CDFs
//! for goodness-of-fit statistics, and the marginal-likelihood oracles that
//! exact runs are compared against. Nothing in the sampling path depends on
//! this module.

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, fa, b, fb, m, fm, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
}

/// Log of the integral of `exp(log_f)` over the positive half-line.
///
/// Substitutes `v = exp(w)` and integrates the shifted integrand
/// `exp(log_f(e^w) + w - peak)` over the region where it is non-negligible,
/// so widely scaled and sharply peaked integrands are handled alike.
pub fn log_integral_positive<F: Fn(f64) -> f64>(log_f: F, tol: f64) -> f64 {
    let g = |w: f64| log_f(w.exp()) + w;
    // Coarse scan for the peak in log coordinates.
    let (lo, hi, step) = (-60.0_f64, 60.0_f64, 0.125_f64);
    let n = ((hi - lo) / step) as usize;
    let mut w_peak = lo;
    let mut g_peak = f64::NEG_INFINITY;
    let mut values = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let w = lo + step * i as f64;
        let gv = g(w);
        values.push((w, gv));
        if gv > g_peak {
            g_peak = gv;
            w_peak = w;
        }
    }
    assert!(
        g_peak.is_finite(),
        "integrand vanishes on the scanned range"
    );
    let cutoff = g_peak - 45.0;
    let w_lo = values
        .iter()
        .rev()
        .find(|(w, gv)| *w < w_peak && *gv < cutoff)
        .map(|(w, _)| *w)
        .unwrap_or(lo);
    let w_hi = values
        .iter()
        .skip_while(|(w, _)| *w <= w_peak)
        .find(|(_, gv)| *gv < cutoff)
        .map(|(w, _)| *w)
        .unwrap_or(hi);
    let integral = adaptive_simpson(|w| (g(w) - g_peak).exp(), w_lo, w_hi, tol);
    g_peak + integral.ln()
}

/// Two-sided Kolmogorov-Smirnov statistic of a sorted sample against the
/// distribution with density `pdf` supported on `[support_lo, inf)`.
///
/// The reference CDF is accumulated by quadrature between consecutive order
/// statistics, so only a density is needed.
pub fn ks_statistic<F: Fn(f64) -> f64>(sorted: &[f64], pdf: F, support_lo: f64) -> f64 {
    assert!(!sorted.is_empty());
    let n = sorted.len() as f64;
    let mut cdf = adaptive_simpson(&pdf, support_lo, sorted[0], 1e-11);
    let mut stat: f64 = 0.0;
    for (i, pair) in sorted.windows(2).enumerate() {
        let lo_rank = i as f64 / n;
        let hi_rank = (i + 1) as f64 / n;
        stat = stat.max((cdf - lo_rank).abs()).max((cdf - hi_rank).abs());
        cdf += adaptive_simpson(&pdf, pair[0], pair[1], 1e-11);
    }
    let last = sorted.len() - 1;
    stat.max((cdf - last as f64 / n).abs()).max((cdf - 1.0).abs())
}

/// Critical value of the two-sided KS statistic at significance `alpha`.
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    ((-(alpha / 2.0).ln()) / 2.0).sqrt() / (n as f64).sqrt()
}
