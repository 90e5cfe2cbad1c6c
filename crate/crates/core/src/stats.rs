//! Summation and small-sample statistics used by the Monte Carlo drivers.

use serde::{Deserialize, Serialize};

/// Pairwise summation; the result depends only on the order of `xs`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    pairwise_sum(xs) / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    let d: Vec<f64> = xs.iter().map(|x| (x - m) * (x - m)).collect();
    pairwise_sum(&d) / (n - 1) as f64
}

/// Standard error of the mean.
pub fn std_error(xs: &[f64]) -> f64 {
    (variance(xs) / xs.len() as f64).sqrt()
}

/// Jackknife standard error of the unbiased sample variance.
pub fn variance_jackknife_se(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 3 {
        return f64::NAN;
    }
    let nf = n as f64;
    let s1 = pairwise_sum(xs);
    let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
    let s2 = pairwise_sum(&sq);
    let loo: Vec<f64> = xs
        .iter()
        .map(|x| {
            let a = s1 - x;
            let b = s2 - x * x;
            let m = a / (nf - 1.0);
            (b - (nf - 1.0) * m * m) / (nf - 2.0)
        })
        .collect();
    let lm = mean(&loo);
    let d: Vec<f64> = loo.iter().map(|v| (v - lm) * (v - lm)).collect();
    ((nf - 1.0) / nf * pairwise_sum(&d)).sqrt()
}

/// Summary of one Monte Carlo sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub se: f64,
    pub variance: f64,
    pub variance_se: f64,
}

impl Summary {
    pub fn of(xs: &[f64]) -> Self {
        Self { count: xs.len(), mean: mean(xs), se: std_error(xs), variance: variance(xs), variance_se: variance_jackknife_se(xs) }
    }
}

/// Least-squares line `y = intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> LineFit {
    let n = xs.len() as f64;
    let mx = mean(xs);
    let my = mean(ys);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let slope_se = if n > 2.0 { (rss / (n - 2.0) / sxx).sqrt() } else { f64::NAN };
    LineFit { slope, intercept, slope_se }
}

/// Asymptotic Kolmogorov tail `P(K > t)`.
pub fn kolmogorov_sf(t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    if t < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * t * t).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// One-sample KS test against a continuous CDF; returns `(D, p)`.
pub fn ks_one_sample<F: Fn(f64) -> f64>(xs: &[f64], cdf: F) -> (f64, f64) {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in v.iter().enumerate() {
        let f = cdf(*x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    let en = n.sqrt();
    (d, kolmogorov_sf((en + 0.12 + 0.11 / en) * d))
}

/// Two-sample KS test; returns `(D, p)`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let t = x[i].min(y[j]);
        while i < n && x[i] <= t {
            i += 1;
        }
        while j < m && y[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n * m) as f64 / (n + m) as f64;
    let en = ne.sqrt();
    (d, kolmogorov_sf((en + 0.12 + 0.11 / en) * d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn jackknife_matches_normal_theory() {
        // for Gaussian data, SE(s²) ≈ σ² √(2/(n-1))
        let mut rng = crate::rng::stream(3, "jk", &[]);
        let xs: Vec<f64> = (0..4000).map(|_| rand::Rng::sample(&mut rng, rand_distr::StandardNormal)).collect();
        let se = variance_jackknife_se(&xs);
        let theory = (2.0 / 3999.0f64).sqrt();
        assert!((se / theory - 1.0).abs() < 0.15, "{se} vs {theory}");
    }

    #[test]
    fn line_fit_exact() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 2.0 * x).collect();
        let f = fit_line(&xs, &ys);
        assert!((f.slope + 2.0).abs() < 1e-14 && (f.intercept - 3.0).abs() < 1e-13);
    }

    #[test]
    fn ks_uniform_accepts() {
        let mut rng = crate::rng::stream(4, "ks", &[]);
        let xs: Vec<f64> = (0..5000).map(|_| rand::Rng::random::<f64>(&mut rng)).collect();
        let (_, p) = ks_one_sample(&xs, |x| x.clamp(0.0, 1.0));
        assert!(p > 0.01);
        let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let (_, p) = ks_one_sample(&sq, |x| x.clamp(0.0, 1.0));
        assert!(p < 1e-6);
    }

    #[test]
    fn ks_two_sample_same_law() {
        let mut rng = crate::rng::stream(5, "ks2", &[]);
        let a: Vec<f64> = (0..3000).map(|_| rand::Rng::random::<f64>(&mut rng)).collect();
        let b: Vec<f64> = (0..2000).map(|_| rand::Rng::random::<f64>(&mut rng)).collect();
        assert!(ks_two_sample(&a, &b).1 > 0.01);
    }

    proptest! {
        #[test]
        fn pairwise_sum_close_to_naive(xs in proptest::collection::vec(-1e3f64..1e3, 0..300)) {
            let naive: f64 = xs.iter().sum();
            prop_assert!((pairwise_sum(&xs) - naive).abs() <= 1e-9 * (1.0 + naive.abs()));
        }
    }
}
