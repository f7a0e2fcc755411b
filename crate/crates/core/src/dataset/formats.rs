//! Little-endian binary containers shared with the learning component.
//!
//! ```text
//! events: b"CCEVT001" | u32 count  | count × 16 × f32   (normalized features)
//! image:  b"CCIMG001" | u32 width  | u32 height | width × height × f32 (row-major)
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::events::N_FEATURES;
use crate::reconstruction::{SkyMap, MAP_SIZE};
use crate::{Error, Result};

pub const EVENTS_MAGIC: &[u8; 8] = b"CCEVT001";
pub const IMAGE_MAGIC: &[u8; 8] = b"CCIMG001";

pub type FeatureRow = [f32; N_FEATURES];

fn u32_at(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes"))
}

fn f32s(bytes: &[u8]) -> impl Iterator<Item = f32> + '_ {
    bytes.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
}

fn check_magic(bytes: &[u8], magic: &[u8; 8], what: &str) -> Result<()> {
    if bytes.len() < 8 || &bytes[..8] != magic {
        return Err(Error::Format(format!("not a {what} file: bad magic")));
    }
    Ok(())
}

pub fn encode_events(rows: &[FeatureRow]) -> Result<Vec<u8>> {
    let count = u32::try_from(rows.len()).map_err(|_| Error::Format("too many events for a u32 count".into()))?;
    let mut out = Vec::with_capacity(12 + rows.len() * N_FEATURES * 4);
    out.extend_from_slice(EVENTS_MAGIC);
    out.extend_from_slice(&count.to_le_bytes());
    for row in rows {
        for v in row {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

pub fn decode_events(bytes: &[u8]) -> Result<Vec<FeatureRow>> {
    check_magic(bytes, EVENTS_MAGIC, "CCEVT001 events")?;
    if bytes.len() < 12 {
        return Err(Error::Format("events file truncated in header".into()));
    }
    let count = u32_at(bytes, 8) as usize;
    let payload = &bytes[12..];
    let expected = count.checked_mul(N_FEATURES * 4).ok_or_else(|| Error::Format("event count overflows".into()))?;
    if payload.len() != expected {
        return Err(Error::Format(format!(
            "header says {count} events ({expected} bytes) but payload has {} bytes",
            payload.len()
        )));
    }
    let mut rows = Vec::with_capacity(count);
    let mut it = f32s(payload);
    for _ in 0..count {
        let mut row = [0f32; N_FEATURES];
        for v in &mut row {
            *v = it.next().expect("length checked");
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Raw image container contents; no constraints on the values.
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    pub width: u32,
    pub height: u32,
    pub data: Vec<f32>,
}

impl Image {
    pub fn from_map(map: &SkyMap) -> Self {
        Self { width: MAP_SIZE as u32, height: MAP_SIZE as u32, data: map.data().iter().map(|&v| v as f32).collect() }
    }

    fn check_sky_dims(&self) -> Result<()> {
        if self.width as usize != MAP_SIZE || self.height as usize != MAP_SIZE {
            return Err(Error::DimensionMismatch(format!(
                "expected a {MAP_SIZE}x{MAP_SIZE} sky map, got {}x{}",
                self.width, self.height
            )));
        }
        Ok(())
    }

    /// Strict conversion: values must be finite and non-negative.
    pub fn to_map(&self) -> Result<SkyMap> {
        self.check_sky_dims()?;
        SkyMap::from_vec(self.data.iter().map(|&v| f64::from(v)).collect())
    }

    /// Conversion for externally produced maps (e.g. network predictions):
    /// negative values are clipped to 0 and pixels outside the valid disk are
    /// zeroed. Non-finite values are still an error.
    pub fn to_map_clipped(&self) -> Result<SkyMap> {
        self.check_sky_dims()?;
        if self.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Format("image contains non-finite values".into()));
        }
        SkyMap::from_vec(self.data.iter().map(|&v| f64::from(v.max(0.0))).collect())
    }
}

pub fn encode_image(image: &Image) -> Result<Vec<u8>> {
    let n = image.width as usize * image.height as usize;
    if image.data.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} image with {} values",
            image.width,
            image.height,
            image.data.len()
        )));
    }
    let mut out = Vec::with_capacity(16 + 4 * n);
    out.extend_from_slice(IMAGE_MAGIC);
    out.extend_from_slice(&image.width.to_le_bytes());
    out.extend_from_slice(&image.height.to_le_bytes());
    for v in &image.data {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_image(bytes: &[u8]) -> Result<Image> {
    check_magic(bytes, IMAGE_MAGIC, "CCIMG001 image")?;
    if bytes.len() < 16 {
        return Err(Error::Format("image file truncated in header".into()));
    }
    let (width, height) = (u32_at(bytes, 8), u32_at(bytes, 12));
    let payload = &bytes[16..];
    let expected = (width as usize)
        .checked_mul(height as usize)
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| Error::Format("image dimensions overflow".into()))?;
    if payload.len() != expected {
        return Err(Error::Format(format!(
            "{width}x{height} image needs {expected} payload bytes, found {}",
            payload.len()
        )));
    }
    Ok(Image { width, height, data: f32s(payload).collect() })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut f = fs::File::create(path)?;
    f.write_all(bytes)?;
    f.sync_all().ok();
    Ok(())
}

pub fn write_events(path: &Path, rows: &[FeatureRow]) -> Result<()> {
    write_file(path, &encode_events(rows)?)
}

pub fn read_events(path: &Path) -> Result<Vec<FeatureRow>> {
    decode_events(&fs::read(path)?)
}

pub fn write_image(path: &Path, image: &Image) -> Result<()> {
    write_file(path, &encode_image(image)?)
}

pub fn read_image(path: &Path) -> Result<Image> {
    decode_image(&fs::read(path)?)
}

/// Stores a map as f32; maps whose values are already f32-representable
/// read back bit-identically.
pub fn write_map(path: &Path, map: &SkyMap) -> Result<()> {
    write_image(path, &Image::from_map(map))
}

pub fn read_map(path: &Path) -> Result<SkyMap> {
    read_image(path)?.to_map()
}
