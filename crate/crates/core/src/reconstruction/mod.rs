//! Analytic sky-map reconstruction: Compton-cone and pinhole back-projection
//! and ARM-based event filtering.

mod kinematics;
mod skymap;

pub use kinematics::{
    cone_axis, cone_from_event, cos_scattering_angle, scattering_angle, ConeParams, COS_TOLERANCE, MIN_AXIS_LENGTH_MM,
};
pub use skymap::{direction_to_pixel, is_valid_pixel, pixel_angle_deg, pixel_direction, pixel_uv, SkyMap, MAP_SIZE};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::events::{classify_event, EventClass, EventRecord, SelectionThresholds};
use crate::geometry::{DetectorGeometry, Segment};
use crate::{Result, Vec3};

/// Cones are truncated beyond this many widths from the ring.
pub const CONE_TRUNCATION: f64 = 3.0;

/// Far-field cone accumulation: every valid pixel at angular distance `δ`
/// from the axis gains `exp(-(δ - θ)² / 2σ²)`, zero beyond 3σ.
pub fn backproject_cone(map: &mut SkyMap, cone: &ConeParams) {
    let reach = CONE_TRUNCATION * cone.width;
    let cos_inner = (cone.half_angle - reach).max(0.0).cos();
    let cos_outer = (cone.half_angle + reach).min(std::f64::consts::PI).cos();
    let inv_two_var = 0.5 / (cone.width * cone.width);
    for &(idx, d) in skymap::valid_pixels() {
        let c = d.dot(&cone.axis);
        if c > cos_inner || c < cos_outer {
            continue;
        }
        let delta = c.clamp(-1.0, 1.0).acos() - cone.half_angle;
        if delta.abs() > reach {
            continue;
        }
        map.add_at(idx, (-delta * delta * inv_two_var).exp());
    }
}

/// Adds one count along the ray from the rear hit through the pinhole center.
pub fn backproject_pinhole(map: &mut SkyMap, event: &EventRecord, geometry: &DetectorGeometry) {
    let dir = geometry.pinhole_center() - event.hit(Segment::Rear).position;
    if dir.z <= 0.0 {
        return;
    }
    if let Some((i, j)) = direction_to_pixel(&dir.normalize()) {
        map.add(i, j, 1.0);
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Compton,
    Pinhole,
    #[default]
    Both,
}

impl Mode {
    pub fn compton(self) -> bool {
        matches!(self, Mode::Compton | Mode::Both)
    }

    pub fn pinhole(self) -> bool {
        matches!(self, Mode::Pinhole | Mode::Both)
    }
}

/// How cones are summed. `Sequential` is bit-reproducible; `Parallel` sums
/// per-thread partial maps and agrees to floating-point reassociation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Accumulation {
    #[default]
    Sequential,
    Parallel,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReconstructionConfig {
    /// Gaussian ring width in degrees.
    pub cone_sigma_deg: f64,
    pub thresholds: SelectionThresholds,
    #[serde(skip)]
    pub accumulation: Accumulation,
}

impl Default for ReconstructionConfig {
    fn default() -> Self {
        Self { cone_sigma_deg: 2.0, thresholds: SelectionThresholds::default(), accumulation: Accumulation::Sequential }
    }
}

impl ReconstructionConfig {
    pub fn cone_sigma(&self) -> f64 {
        self.cone_sigma_deg.to_radians()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReconstructedMaps {
    pub compton: SkyMap,
    pub pinhole: SkyMap,
}

impl ReconstructedMaps {
    /// Sum of the two max-normalized maps, renormalized to a unit peak.
    pub fn combined(&self) -> SkyMap {
        combine_maps(&self.compton, &self.pinhole)
    }
}

pub fn combine_maps(compton: &SkyMap, pinhole: &SkyMap) -> SkyMap {
    let mut out = compton.normalized();
    out.add_map(&pinhole.normalized());
    out.normalize_max();
    out
}

fn accumulate_cones(cones: &[ConeParams], accumulation: Accumulation) -> SkyMap {
    match accumulation {
        Accumulation::Sequential => {
            let mut map = SkyMap::zeros();
            for cone in cones {
                backproject_cone(&mut map, cone);
            }
            map
        }
        Accumulation::Parallel => cones
            .par_chunks(64)
            .map(|chunk| {
                let mut map = SkyMap::zeros();
                for cone in chunk {
                    backproject_cone(&mut map, cone);
                }
                map
            })
            .reduce(SkyMap::zeros, |mut a, b| {
                a.add_map(&b);
                a
            }),
    }
}

/// Un-normalized back-projections of the accepted events.
pub fn accumulate<'a, I>(
    events: I,
    mode: Mode,
    config: &ReconstructionConfig,
    geometry: &DetectorGeometry,
) -> ReconstructedMaps
where
    I: IntoIterator<Item = &'a EventRecord>,
{
    let sigma = config.cone_sigma();
    let mut cones = Vec::new();
    let mut pinhole = SkyMap::zeros();
    for event in events {
        match classify_event(event, &config.thresholds) {
            EventClass::ComptonCandidate if mode.compton() => {
                if let Ok(cone) = cone_from_event(event, sigma) {
                    cones.push(cone);
                }
            }
            EventClass::PinholeCandidate if mode.pinhole() => backproject_pinhole(&mut pinhole, event, geometry),
            _ => {}
        }
    }
    ReconstructedMaps { compton: accumulate_cones(&cones, config.accumulation), pinhole }
}

/// Classifies the events, back-projects every candidate into its map and
/// normalizes each map by its maximum.
pub fn reconstruct<'a, I>(
    events: I,
    mode: Mode,
    config: &ReconstructionConfig,
    geometry: &DetectorGeometry,
) -> ReconstructedMaps
where
    I: IntoIterator<Item = &'a EventRecord>,
{
    let mut maps = accumulate(events, mode, config, geometry);
    maps.compton.normalize_max();
    maps.pinhole.normalize_max();
    maps
}

fn angle_between(a: &Vec3, b: &Vec3) -> f64 {
    let c = a.dot(b) / (a.norm() * b.norm());
    c.clamp(-1.0, 1.0).acos()
}

/// Angular Resolution Measure: geometric angle between the hypothesized
/// source direction and the cone axis minus the kinematic scattering angle.
pub fn arm(event: &EventRecord, source: &Vec3) -> Result<f64> {
    let axis = cone_axis(event)?;
    let theta = scattering_angle(event.hit(Segment::Front).energy, event.hit(Segment::Rear).energy)?;
    Ok(angle_between(source, &axis) - theta)
}

/// Drops Compton candidates with `|ARM| > window` (or no defined ARM);
/// every other event passes unchanged.
pub fn arm_filter(
    events: &[EventRecord],
    source: &Vec3,
    window: f64,
    thresholds: &SelectionThresholds,
) -> Vec<EventRecord> {
    events
        .iter()
        .filter(|e| match classify_event(e, thresholds) {
            EventClass::ComptonCandidate => arm(e, source).is_ok_and(|a| a.abs() <= window),
            _ => true,
        })
        .copied()
        .collect()
}
