//! Map-quality metrics (MSE, SSIM, centroid peak offset) and run summaries.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::reconstruction::{pixel_uv, SkyMap, MAP_SIZE};
use crate::{Error, Result, Vec3};

/// Mean squared difference over all pixels.
pub fn mse(a: &SkyMap, b: &SkyMap) -> Result<f64> {
    check_dims(a, b)?;
    let n = a.data().len() as f64;
    Ok(a.data().iter().zip(b.data()).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / n)
}

fn check_dims(a: &SkyMap, b: &SkyMap) -> Result<()> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::DimensionMismatch(format!("{}x{} vs {}x{}", a.width(), a.height(), b.width(), b.height())));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SsimParams {
    pub window: usize,
    pub sigma: f64,
    pub k1: f64,
    pub k2: f64,
    pub dynamic_range: f64,
}

impl Default for SsimParams {
    fn default() -> Self {
        Self { window: 11, sigma: 1.5, k1: 0.01, k2: 0.03, dynamic_range: 1.0 }
    }
}

fn gaussian_kernel(size: usize, sigma: f64) -> Vec<f64> {
    let c = (size as f64 - 1.0) / 2.0;
    let g: Vec<f64> = (0..size).map(|k| (-(k as f64 - c).powi(2) / (2.0 * sigma * sigma)).exp()).collect();
    let s: f64 = g.iter().sum();
    g.into_iter().map(|v| v / s).collect()
}

/// Separable "valid" filtering of a row-major `w × h` image.
fn filter_valid(img: &[f64], w: usize, h: usize, k: &[f64]) -> (Vec<f64>, usize, usize) {
    let n = k.len();
    let (ow, oh) = (w + 1 - n, h + 1 - n);
    let mut rows = vec![0.0; ow * h];
    for y in 0..h {
        let line = &img[y * w..(y + 1) * w];
        for x in 0..ow {
            rows[y * ow + x] = k.iter().zip(&line[x..x + n]).map(|(a, b)| a * b).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = k.iter().enumerate().map(|(t, a)| a * rows[(y + t) * ow + x]).sum();
        }
    }
    (out, ow, oh)
}

/// Mean structural similarity over all fully-contained Gaussian windows.
pub fn ssim(a: &SkyMap, b: &SkyMap, params: &SsimParams) -> Result<f64> {
    check_dims(a, b)?;
    if !(params.dynamic_range > 0.0) {
        return Err(Error::Parameter("SSIM dynamic range must be positive".into()));
    }
    if params.window == 0 || params.window > MAP_SIZE || !(params.sigma > 0.0) {
        return Err(Error::Parameter(format!("bad SSIM window {} / sigma {}", params.window, params.sigma)));
    }
    let (w, h) = (a.width(), a.height());
    let k = gaussian_kernel(params.window, params.sigma);
    let (x, y) = (a.data(), b.data());
    let prod = |f: &dyn Fn(f64, f64) -> f64| -> Vec<f64> { x.iter().zip(y).map(|(p, q)| f(*p, *q)).collect() };
    let (mx, ow, oh) = filter_valid(x, w, h, &k);
    let (my, ..) = filter_valid(y, w, h, &k);
    let (mxx, ..) = filter_valid(&prod(&|p, _| p * p), w, h, &k);
    let (myy, ..) = filter_valid(&prod(&|_, q| q * q), w, h, &k);
    let (mxy, ..) = filter_valid(&prod(&|p, q| p * q), w, h, &k);
    let c1 = (params.k1 * params.dynamic_range).powi(2);
    let c2 = (params.k2 * params.dynamic_range).powi(2);
    let mut total = 0.0;
    for i in 0..ow * oh {
        let (ux, uy) = (mx[i], my[i]);
        let vx = mxx[i] - ux * ux;
        let vy = myy[i] - uy * uy;
        let cxy = mxy[i] - ux * uy;
        let num = (2.0 * ux * uy + c1) * (2.0 * cxy + c2);
        let den = (ux * ux + uy * uy + c1) * (vx + vy + c2);
        total += num / den;
    }
    Ok(total / (ow * oh) as f64)
}

/// Centroid options. Pixels below `floor_fraction × max` are ignored, which
/// keeps a broad low-level pedestal from dragging the centroid towards the
/// map center; `0.0` gives the plain intensity-weighted centroid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CentroidParams {
    pub floor_fraction: f64,
}

impl Default for CentroidParams {
    fn default() -> Self {
        Self { floor_fraction: 0.5 }
    }
}

impl CentroidParams {
    pub const PLAIN: Self = Self { floor_fraction: 0.0 };
}

/// Intensity-weighted centroid in direction-cosine space, lifted back to a
/// unit vector on the upper hemisphere.
pub fn weighted_centroid(map: &SkyMap, params: &CentroidParams) -> Result<Vec3> {
    let max = map.max();
    if !(max > 0.0) {
        return Err(Error::EmptyMap);
    }
    if !(0.0..1.0).contains(&params.floor_fraction) {
        return Err(Error::Parameter(format!("centroid floor {} outside [0, 1)", params.floor_fraction)));
    }
    let floor = params.floor_fraction * max;
    let (mut sw, mut su, mut sv) = (0.0, 0.0, 0.0);
    for j in 0..MAP_SIZE {
        for i in 0..MAP_SIZE {
            let w = map.get(i, j);
            if w > 0.0 && w >= floor {
                let (u, v) = pixel_uv(i, j);
                sw += w;
                su += w * u;
                sv += w * v;
            }
        }
    }
    let (mut u, mut v) = (su / sw, sv / sw);
    let r2 = u * u + v * v;
    if r2 > 1.0 {
        let r = r2.sqrt();
        u /= r;
        v /= r;
    }
    Ok(Vec3::new(u, v, (1.0 - u * u - v * v).max(0.0).sqrt()))
}

/// Angle in degrees between a map's centroid and the true direction.
pub fn peak_offset(pred: &SkyMap, truth: &Vec3, params: &CentroidParams) -> Result<f64> {
    let c = weighted_centroid(pred, params)?;
    let t = truth.normalize();
    Ok(c.dot(&t).clamp(-1.0, 1.0).acos().to_degrees())
}

/// Linearly interpolated quantile of sorted data.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn sorted(values: &[f64]) -> Result<Vec<f64>> {
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Parameter("NaN in metric values".into()));
    }
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(s)
}

/// 25th and 75th percentiles.
pub fn iqr(values: &[f64]) -> Result<(f64, f64)> {
    if values.len() < 2 {
        return Err(Error::TooFewValues { needed: 2, got: values.len() });
    }
    let s = sorted(values)?;
    Ok((quantile_sorted(&s, 0.25), quantile_sorted(&s, 0.75)))
}

pub fn median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::TooFewValues { needed: 1, got: 0 });
    }
    Ok(quantile_sorted(&sorted(values)?, 0.5))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Sample (n − 1) standard deviation; 0 for a single value.
    pub std: f64,
    pub q25: f64,
    pub q75: f64,
    pub n: usize,
}

impl Summary {
    pub fn of(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::TooFewValues { needed: 1, got: 0 });
        }
        let s = sorted(values)?;
        let n = s.len();
        let mean = s.iter().sum::<f64>() / n as f64;
        let std = if n > 1 { (s.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt() } else { 0.0 };
        let (q25, q75) = if n > 1 { (quantile_sorted(&s, 0.25), quantile_sorted(&s, 0.75)) } else { (s[0], s[0]) };
        Ok(Self { mean, std, q25, q75, n })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub id: String,
    pub mse: f64,
    pub ssim: f64,
    pub peak_offset_deg: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub runs: Vec<RunMetrics>,
    pub aggregate: BTreeMap<String, Summary>,
}

/// Per-metric summary over runs. Runs are reported sorted by id so the
/// result does not depend on input order.
pub fn summarize_runs(runs: &[RunMetrics]) -> Result<MetricReport> {
    if runs.is_empty() {
        return Err(Error::TooFewValues { needed: 1, got: 0 });
    }
    let mut runs = runs.to_vec();
    runs.sort_by(|a, b| a.id.cmp(&b.id));
    let col = |f: fn(&RunMetrics) -> f64| runs.iter().map(f).collect::<Vec<_>>();
    let mut aggregate = BTreeMap::new();
    aggregate.insert("mse".to_string(), Summary::of(&col(|r| r.mse))?);
    aggregate.insert("ssim".to_string(), Summary::of(&col(|r| r.ssim))?);
    aggregate.insert("peak_offset_deg".to_string(), Summary::of(&col(|r| r.peak_offset_deg))?);
    Ok(MetricReport { runs, aggregate })
}

impl MetricReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Aligned plain-text table: per-run rows followed by the aggregates.
    pub fn to_table(&self) -> String {
        let idw = self.runs.iter().map(|r| r.id.len()).max().unwrap_or(0).max(15);
        let mut s = String::new();
        let _ = writeln!(s, "{:<idw$}  {:>12}  {:>10}  {:>12}", "run", "mse", "ssim", "offset_deg");
        for r in &self.runs {
            let _ = writeln!(s, "{:<idw$}  {:>12.6e}  {:>10.6}  {:>12.4}", r.id, r.mse, r.ssim, r.peak_offset_deg);
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "{:<idw$}  {:>12}  {:>12}  {:>12}  {:>12}", "metric", "mean", "std", "q25", "q75");
        for (name, a) in &self.aggregate {
            let _ = writeln!(s, "{:<idw$}  {:>12.6}  {:>12.6}  {:>12.6}  {:>12.6}", name, a.mean, a.std, a.q25, a.q75);
        }
        s
    }
}
