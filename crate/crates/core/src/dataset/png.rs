use std::path::Path;

use image::{GrayImage, Luma, Rgb, RgbImage};
use serde::{Deserialize, Serialize};

use crate::reconstruction::{SkyMap, MAP_SIZE};
use crate::Result;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Colormap {
    #[default]
    Gray,
    Hot,
}

impl std::str::FromStr for Colormap {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "gray" | "grey" => Ok(Self::Gray),
            "hot" => Ok(Self::Hot),
            other => Err(format!("unknown colormap '{other}' (expected gray or hot)")),
        }
    }
}

/// Black → red → yellow → white.
fn hot(level: u8) -> [u8; 3] {
    let t = f64::from(level) / 255.0;
    let ch = |lo: f64| (((t - lo) * 3.0).clamp(0.0, 1.0) * 255.0).round() as u8;
    [ch(0.0), ch(1.0 / 3.0), ch(2.0 / 3.0)]
}

/// 8-bit levels, `[0, max]` mapped linearly onto `[0, 255]`. Image row 0 is
/// the top of the map (largest `v`).
pub fn map_levels(map: &SkyMap) -> Vec<u8> {
    let max = map.max();
    let mut out = vec![0u8; MAP_SIZE * MAP_SIZE];
    if max <= 0.0 {
        return out;
    }
    for j in 0..MAP_SIZE {
        for i in 0..MAP_SIZE {
            let row = MAP_SIZE - 1 - j;
            out[row * MAP_SIZE + i] = (map.get(i, j) / max * 255.0).round().clamp(0.0, 255.0) as u8;
        }
    }
    out
}

pub fn export_png(map: &SkyMap, path: &Path, colormap: Colormap) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let levels = map_levels(map);
    let side = MAP_SIZE as u32;
    match colormap {
        Colormap::Gray => {
            GrayImage::from_fn(side, side, |x, y| Luma([levels[(y * side + x) as usize]])).save(path)?;
        }
        Colormap::Hot => {
            RgbImage::from_fn(side, side, |x, y| Rgb(hot(levels[(y * side + x) as usize]))).save(path)?;
        }
    }
    Ok(())
}
