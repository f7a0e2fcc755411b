use std::sync::OnceLock;

use crate::{Error, Result, Vec3};

/// Sky maps are square with this many pixels per side.
pub const MAP_SIZE: usize = 256;

const HALF: f64 = (MAP_SIZE / 2) as f64;

/// Angular size of one pixel at the map center, in degrees.
pub fn pixel_angle_deg() -> f64 {
    (1.0 / HALF).to_degrees()
}

/// Intensity grid over the upper hemisphere in direction-cosine projection.
///
/// Pixel `(i, j)` (column `i`, row `j`) has center `u = (i + 0.5)/128 - 1`,
/// `v = (j + 0.5)/128 - 1` and looks along `(u, v, sqrt(1 - u² - v²))`.
/// Pixels whose center lies outside the unit disk are invalid and always 0.
/// Storage is row-major: index `j * 256 + i`.
#[derive(Clone, Debug, PartialEq)]
pub struct SkyMap {
    data: Vec<f64>,
}

impl Default for SkyMap {
    fn default() -> Self {
        Self::zeros()
    }
}

struct PixelTable {
    /// `(linear index, direction)` for every valid pixel.
    valid: Vec<(usize, Vec3)>,
    mask: Vec<bool>,
}

fn pixel_table() -> &'static PixelTable {
    static TABLE: OnceLock<PixelTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut valid = Vec::new();
        let mut mask = vec![false; MAP_SIZE * MAP_SIZE];
        for j in 0..MAP_SIZE {
            for i in 0..MAP_SIZE {
                let (u, v) = pixel_uv(i, j);
                let r2 = u * u + v * v;
                if r2 <= 1.0 {
                    let idx = j * MAP_SIZE + i;
                    mask[idx] = true;
                    valid.push((idx, Vec3::new(u, v, (1.0 - r2).sqrt())));
                }
            }
        }
        PixelTable { valid, mask }
    })
}

/// Direction cosines of a pixel center.
pub fn pixel_uv(i: usize, j: usize) -> (f64, f64) {
    ((i as f64 + 0.5) / HALF - 1.0, (j as f64 + 0.5) / HALF - 1.0)
}

pub fn is_valid_pixel(i: usize, j: usize) -> bool {
    i < MAP_SIZE && j < MAP_SIZE && pixel_table().mask[j * MAP_SIZE + i]
}

/// Unit direction through a valid pixel center.
pub fn pixel_direction(i: usize, j: usize) -> Option<Vec3> {
    if !is_valid_pixel(i, j) {
        return None;
    }
    let (u, v) = pixel_uv(i, j);
    Some(Vec3::new(u, v, (1.0 - u * u - v * v).sqrt()))
}

/// Valid pixel containing the projection of `direction`, if the direction is
/// in the upper hemisphere.
pub fn direction_to_pixel(direction: &Vec3) -> Option<(usize, usize)> {
    let n = direction.norm();
    if !(n > 0.0) || direction.z < 0.0 {
        return None;
    }
    let (u, v) = (direction.x / n, direction.y / n);
    let i = ((u + 1.0) * HALF).floor();
    let j = ((v + 1.0) * HALF).floor();
    if !(0.0..MAP_SIZE as f64).contains(&i) || !(0.0..MAP_SIZE as f64).contains(&j) {
        return None;
    }
    let (i, j) = (i as usize, j as usize);
    is_valid_pixel(i, j).then_some((i, j))
}

/// All valid pixels as `(linear index, direction)`.
pub(crate) fn valid_pixels() -> &'static [(usize, Vec3)] {
    &pixel_table().valid
}

impl SkyMap {
    pub fn zeros() -> Self {
        Self { data: vec![0.0; MAP_SIZE * MAP_SIZE] }
    }

    /// Builds a map from row-major data. Values must be finite and
    /// non-negative; pixels outside the valid disk are forced to zero.
    pub fn from_vec(mut data: Vec<f64>) -> Result<Self> {
        if data.len() != MAP_SIZE * MAP_SIZE {
            return Err(Error::DimensionMismatch(format!(
                "expected {} pixels, got {}",
                MAP_SIZE * MAP_SIZE,
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Parameter(format!("sky map intensities must be finite and non-negative, got {bad}")));
        }
        let mask = &pixel_table().mask;
        for (v, &ok) in data.iter_mut().zip(mask) {
            if !ok {
                *v = 0.0;
            }
        }
        Ok(Self { data })
    }

    pub fn width(&self) -> usize {
        MAP_SIZE
    }

    pub fn height(&self) -> usize {
        MAP_SIZE
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * MAP_SIZE + i]
    }

    pub(crate) fn add_at(&mut self, index: usize, w: f64) {
        self.data[index] += w;
    }

    /// Adds `w` to a pixel; invalid pixels are left at zero.
    pub fn add(&mut self, i: usize, j: usize, w: f64) {
        if is_valid_pixel(i, j) {
            self.data[j * MAP_SIZE + i] += w;
        }
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    pub fn add_map(&mut self, other: &SkyMap) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for v in &mut self.data {
            *v *= factor;
        }
    }

    /// Divides by the maximum so the peak is exactly 1; all-zero maps stay zero.
    pub fn normalize_max(&mut self) {
        let m = self.max();
        if m > 0.0 {
            for v in &mut self.data {
                *v /= m;
            }
        }
    }

    pub fn normalized(&self) -> Self {
        let mut out = self.clone();
        out.normalize_max();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pixel_direction_roundtrip() {
        let mut n = 0;
        for j in 0..MAP_SIZE {
            for i in 0..MAP_SIZE {
                if let Some(d) = pixel_direction(i, j) {
                    assert_eq!(direction_to_pixel(&d), Some((i, j)));
                    n += 1;
                }
            }
        }
        assert_eq!(n, valid_pixels().len());
    }

    #[test]
    fn zenith_near_center() {
        let (i, j) = direction_to_pixel(&Vec3::z()).unwrap();
        assert_eq!((i, j), (128, 128));
        assert!(direction_to_pixel(&-Vec3::z()).is_none());
    }

    #[test]
    fn corners_invalid() {
        assert!(!is_valid_pixel(0, 0));
        assert!(!is_valid_pixel(255, 255));
        let mut m = SkyMap::zeros();
        m.add(0, 0, 1.0);
        assert!(m.is_empty());
    }

    #[test]
    fn from_vec_checks() {
        assert!(SkyMap::from_vec(vec![0.0; 10]).is_err());
        let mut d = vec![0.0; MAP_SIZE * MAP_SIZE];
        d[5] = -1.0;
        assert!(SkyMap::from_vec(d).is_err());
        let m = SkyMap::from_vec(vec![1.0; MAP_SIZE * MAP_SIZE]).unwrap();
        assert_eq!(m.get(0, 0), 0.0);
        assert_eq!(m.get(128, 128), 1.0);
    }

    #[test]
    fn normalization() {
        let mut m = SkyMap::zeros();
        m.normalize_max();
        assert!(m.is_empty());
        m.add(100, 120, 4.0);
        m.add(101, 120, 2.0);
        m.normalize_max();
        assert_eq!(m.max(), 1.0);
        assert_eq!(m.get(101, 120), 0.5);
    }
}
