//! Small statistical helpers for the ensemble checks.

use statrs::distribution::{Beta, ContinuousCDF};

/// CDF of one coordinate of a uniform point on `S^{r-1}` (r >= 2).
///
/// `x₁²` follows `Beta(1/2, (r-1)/2)` and the law is symmetric about zero.
pub fn sphere_marginal_cdf(r: usize, x: f64) -> f64 {
    let x = x.clamp(-1.0, 1.0);
    let beta = Beta::new(0.5, (r as f64 - 1.0) / 2.0).expect("valid beta shape");
    let half = 0.5 * beta.cdf(x * x);
    if x >= 0.0 {
        0.5 + half
    } else {
        0.5 - half
    }
}

/// One-sample Kolmogorov–Smirnov statistic and asymptotic p-value.
pub fn ks_test<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> (f64, f64) {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i as f64 + 1.0) / n - f)
        })
        .fold(0.0, f64::max);
    let sqrt_n = n.sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    (d, kolmogorov_survival(lambda))
}

/// `Q_KS(λ) = 2 Σ_{k≥1} (-1)^{k-1} exp(-2k²λ²)`
fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=200 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}
