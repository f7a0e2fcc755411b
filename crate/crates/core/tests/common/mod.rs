//! Independent reference implementations used by the integration and
//! acceptance tests. None of these call into the library's numerics.

#![allow(dead_code)]

/// CDF of `pdf ∝ E^gamma` on `[lo, hi]` by composite Simpson integration in
/// `ln E`, tabulated on `n` (odd) log-spaced nodes.
pub struct PowerLawCdf {
    ln_e: Vec<f64>,
    cdf: Vec<f64>,
}

impl PowerLawCdf {
    pub fn new(gamma: f64, lo: f64, hi: f64, n: usize) -> Self {
        assert!(n % 2 == 1 && n >= 3);
        let (a, b) = (lo.ln(), hi.ln());
        let h = (b - a) / (n - 1) as f64;
        let ln_e: Vec<f64> = (0..n).map(|k| a + h * k as f64).collect();
        // Integrand in ln E: E^(gamma + 1).
        let f: Vec<f64> = ln_e.iter().map(|&x| ((gamma + 1.0) * x).exp()).collect();
        let mut cdf = vec![0.0; n];
        // Simpson on each pair of panels, trapezoid-corrected midpoints.
        for k in (2..n).step_by(2) {
            let s = h / 3.0 * (f[k - 2] + 4.0 * f[k - 1] + f[k]);
            // Value at the odd node from Simpson's 3/8-free half-panel rule.
            let half = h / 12.0 * (5.0 * f[k - 2] + 8.0 * f[k - 1] - f[k]);
            cdf[k - 1] = cdf[k - 2] + half;
            cdf[k] = cdf[k - 2] + s;
        }
        let total = cdf[n - 1];
        for c in &mut cdf {
            *c /= total;
        }
        Self { ln_e, cdf }
    }

    pub fn eval(&self, e: f64) -> f64 {
        let x = e.ln();
        let n = self.ln_e.len();
        if x <= self.ln_e[0] {
            return 0.0;
        }
        if x >= self.ln_e[n - 1] {
            return 1.0;
        }
        let h = self.ln_e[1] - self.ln_e[0];
        let k = (((x - self.ln_e[0]) / h) as usize).min(n - 2);
        let t = (x - self.ln_e[k]) / h;
        self.cdf[k] + t * (self.cdf[k + 1] - self.cdf[k])
    }
}

/// Two-sided Kolmogorov distance between a sample and a CDF.
pub fn ks_distance(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic Kolmogorov p-value with the Stephens small-sample correction.
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    let mut sum = 0.0;
    for k in 1..200 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Klein–Nishina `dσ/dcosθ` up to a constant, written from the textbook
/// formula with the scattered-to-incident energy ratio.
pub fn kn_pdf(energy_kev: f64, cos_theta: f64) -> f64 {
    let k = energy_kev / 510.998_95;
    let p = 1.0 / (1.0 + k * (1.0 - cos_theta));
    p * p * (p + 1.0 / p - (1.0 - cos_theta * cos_theta))
}

/// Simpson integral of `f` on `[a, b]` with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += f(a + h * k as f64) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Row-major 2-D Gaussian-windowed SSIM written directly from the published
/// definition: every fully contained window, explicit weighted sums.
pub fn ssim_oracle(a: &[f64], b: &[f64], w: usize, h: usize) -> f64 {
    let size = 11usize;
    let sigma = 1.5f64;
    let c = 5.0;
    let mut win = [[0.0f64; 11]; 11];
    let mut tot = 0.0;
    for (y, row) in win.iter_mut().enumerate() {
        for (x, v) in row.iter_mut().enumerate() {
            *v = (-(((x as f64 - c).powi(2) + (y as f64 - c).powi(2)) / (2.0 * sigma * sigma))).exp();
            tot += *v;
        }
    }
    let (c1, c2) = (0.01f64.powi(2), 0.03f64.powi(2));
    let mut acc = 0.0;
    let mut count = 0usize;
    for y0 in 0..=h - size {
        for x0 in 0..=w - size {
            let (mut ma, mut mb) = (0.0, 0.0);
            for y in 0..size {
                for x in 0..size {
                    let g = win[y][x] / tot;
                    ma += g * a[(y0 + y) * w + x0 + x];
                    mb += g * b[(y0 + y) * w + x0 + x];
                }
            }
            let (mut va, mut vb, mut cab) = (0.0, 0.0, 0.0);
            for y in 0..size {
                for x in 0..size {
                    let g = win[y][x] / tot;
                    let da = a[(y0 + y) * w + x0 + x] - ma;
                    let db = b[(y0 + y) * w + x0 + x] - mb;
                    va += g * da * da;
                    vb += g * db * db;
                    cab += g * da * db;
                }
            }
            acc += ((2.0 * ma * mb + c1) * (2.0 * cab + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            count += 1;
        }
    }
    acc / count as f64
}

/// `1 / (1 + (E/mc²)(1 − cos θ))` scaled by `E`, written independently of
/// the library.
pub fn compton_scattered(e: f64, theta: f64) -> f64 {
    e / (1.0 + e / 510.998_95 * (1.0 - theta.cos()))
}

/// Sample median of a copy of `v`.
pub fn median_of(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}
