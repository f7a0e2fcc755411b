//! Parametric model of the Compton-camera box.
//!
//! Coordinates are millimetres with the top face of the front layer at
//! `z = 0` and `+z` pointing to zenith. Every sensitive volume is an
//! axis-aligned box; the front layer is stored as a four-box frame around the
//! pinhole aperture so that the aperture itself is empty space.

mod materials;

pub use materials::{Attenuation, Material, MaterialTable, Materials};

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vec3};

/// Detector segment classes, in feature-vector order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Segment {
    Front,
    Rear,
    Side,
    Bgo,
}

impl Segment {
    pub const ALL: [Segment; 4] = [Segment::Front, Segment::Rear, Segment::Side, Segment::Bgo];

    pub fn index(self) -> usize {
        match self {
            Segment::Front => 0,
            Segment::Rear => 1,
            Segment::Side => 2,
            Segment::Bgo => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Segment::Front => "front",
            Segment::Rear => "rear",
            Segment::Side => "side",
            Segment::Bgo => "bgo",
        }
    }
}

/// Axis-aligned box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn new(min: Vec3, max: Vec3) -> Self {
        Self { min, max }
    }

    pub fn center(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    pub fn size(&self) -> Vec3 {
        self.max - self.min
    }

    pub fn volume(&self) -> f64 {
        let s = self.size();
        s.x * s.y * s.z
    }

    /// Closed containment test.
    pub fn contains(&self, p: &Vec3) -> bool {
        (0..3).all(|k| p[k] >= self.min[k] && p[k] <= self.max[k])
    }

    /// True when the interiors of the two boxes intersect.
    pub fn overlaps(&self, other: &Aabb) -> bool {
        (0..3).all(|k| self.min[k] < other.max[k] && other.min[k] < self.max[k])
    }

    /// Slab-method ray intersection.
    ///
    /// Returns `(t_in, t_out)` when the ray `origin + t * direction` crosses
    /// the box with `t_out > max(t_in, 0)`. `t_in` is negative when the
    /// origin is inside.
    pub fn intersect(&self, origin: &Vec3, direction: &Vec3) -> Option<(f64, f64)> {
        let mut t_in = f64::NEG_INFINITY;
        let mut t_out = f64::INFINITY;
        for k in 0..3 {
            let d = direction[k];
            if d.abs() < 1e-300 {
                if origin[k] < self.min[k] || origin[k] > self.max[k] {
                    return None;
                }
                continue;
            }
            let inv = 1.0 / d;
            let mut t0 = (self.min[k] - origin[k]) * inv;
            let mut t1 = (self.max[k] - origin[k]) * inv;
            if t0 > t1 {
                std::mem::swap(&mut t0, &mut t1);
            }
            t_in = t_in.max(t0);
            t_out = t_out.min(t1);
        }
        (t_out > t_in.max(0.0)).then_some((t_in, t_out))
    }
}

/// How a volume reports interaction positions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Readout {
    /// Square pixels on a lateral grid anchored at `origin`; depth collapses
    /// to `z_center` (one DOI layer or the whole front layer).
    Pixelated { origin: [f64; 2], pitch: f64, z_center: f64 },
    /// Single channel; every hit reports the box center.
    Monolithic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Volume {
    pub name: String,
    pub bounds: Aabb,
    pub segment: Segment,
    pub material: Material,
    pub readout: Readout,
}

impl Volume {
    /// Position reported by the readout for a hit at `p`.
    ///
    /// Pixel cells are clipped to the volume, so partial pixels at the
    /// pinhole edge report the center of the part that is crystal.
    pub fn quantize(&self, p: &Vec3) -> Vec3 {
        match self.readout {
            Readout::Monolithic => self.bounds.center(),
            Readout::Pixelated { origin, pitch, z_center } => {
                let mut out = Vec3::new(0.0, 0.0, z_center);
                for k in 0..2 {
                    let (lo, hi) = pixel_cell(p[k], origin[k], pitch);
                    let lo = lo.max(self.bounds.min[k]);
                    let hi = hi.min(self.bounds.max[k]);
                    out[k] = 0.5 * (lo + hi);
                }
                out
            }
        }
    }
}

/// Bounds of the grid cell containing `x` on a grid anchored at `origin`.
pub fn pixel_cell(x: f64, origin: f64, pitch: f64) -> (f64, f64) {
    let k = ((x - origin) / pitch).floor();
    let lo = origin + k * pitch;
    (lo, lo + pitch)
}

/// Center of the grid cell containing `x`.
pub fn pixel_center(x: f64, origin: f64, pitch: f64) -> f64 {
    let (lo, hi) = pixel_cell(x, origin, pitch);
    0.5 * (lo + hi)
}

/// User-facing geometry configuration (the JSON form of [`DetectorGeometry`]).
///
/// The default layout gives 100 mm square front and rear footprints
/// (2 x 2 modules of 50 x 50 front pixels at 1 mm and 25 x 25 rear pixels at
/// 2 mm), i.e. a 100 cm^2 geometric area.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryParams {
    pub modules_per_side: u32,
    pub front_pixels_per_module: u32,
    pub front_pitch_mm: f64,
    pub front_thickness_mm: f64,
    pub pinhole_side_mm: f64,
    pub rear_layers: u32,
    pub rear_layer_thickness_mm: f64,
    pub rear_pixels_per_module: u32,
    pub rear_pitch_mm: f64,
    pub front_to_rear_gap_mm: f64,
    pub side_thickness_mm: f64,
    pub bgo_thickness_mm: f64,
}

impl Default for GeometryParams {
    fn default() -> Self {
        Self {
            modules_per_side: 2,
            front_pixels_per_module: 50,
            front_pitch_mm: 1.0,
            front_thickness_mm: 5.0,
            pinhole_side_mm: 5.5,
            rear_layers: 4,
            rear_layer_thickness_mm: 20.0,
            rear_pixels_per_module: 25,
            rear_pitch_mm: 2.0,
            front_to_rear_gap_mm: 10.0,
            side_thickness_mm: 5.0,
            bgo_thickness_mm: 10.0,
        }
    }
}

/// Built detector: the parameter set plus the derived volume list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GeometryParams", into = "GeometryParams")]
pub struct DetectorGeometry {
    params: GeometryParams,
    volumes: Vec<Volume>,
    pinhole: Aabb,
    bounds: Aabb,
}

impl From<DetectorGeometry> for GeometryParams {
    fn from(g: DetectorGeometry) -> Self {
        g.params
    }
}

impl TryFrom<GeometryParams> for DetectorGeometry {
    type Error = Error;

    fn try_from(params: GeometryParams) -> Result<Self> {
        Self::from_params(params)
    }
}

/// The reference CC-Box layout.
pub fn build_default_geometry() -> DetectorGeometry {
    DetectorGeometry::from_params(GeometryParams::default()).expect("default geometry parameters are valid")
}

impl DetectorGeometry {
    pub fn from_params(params: GeometryParams) -> Result<Self> {
        let p = &params;
        let positive = [
            ("front_pitch_mm", p.front_pitch_mm),
            ("front_thickness_mm", p.front_thickness_mm),
            ("pinhole_side_mm", p.pinhole_side_mm),
            ("rear_layer_thickness_mm", p.rear_layer_thickness_mm),
            ("rear_pitch_mm", p.rear_pitch_mm),
            ("front_to_rear_gap_mm", p.front_to_rear_gap_mm),
            ("side_thickness_mm", p.side_thickness_mm),
            ("bgo_thickness_mm", p.bgo_thickness_mm),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Geometry(format!("{name} must be positive, got {v}")));
            }
        }
        if p.modules_per_side == 0
            || p.front_pixels_per_module == 0
            || p.rear_pixels_per_module == 0
            || p.rear_layers == 0
        {
            return Err(Error::Geometry("module, pixel and layer counts must be non-zero".into()));
        }

        let front_half = 0.5 * f64::from(p.modules_per_side * p.front_pixels_per_module) * p.front_pitch_mm;
        let rear_half = 0.5 * f64::from(p.modules_per_side * p.rear_pixels_per_module) * p.rear_pitch_mm;
        let hole = 0.5 * p.pinhole_side_mm;
        if hole >= front_half {
            return Err(Error::Geometry(format!(
                "pinhole side {} mm does not fit inside the {} mm front layer",
                p.pinhole_side_mm,
                2.0 * front_half
            )));
        }

        let front_bottom = -p.front_thickness_mm;
        let rear_top = front_bottom - p.front_to_rear_gap_mm;
        let rear_bottom = rear_top - f64::from(p.rear_layers) * p.rear_layer_thickness_mm;
        let inner = front_half.max(rear_half);
        let side_outer = inner + p.side_thickness_mm;
        let bgo_outer = side_outer + p.bgo_thickness_mm;
        let bgo_bottom = rear_bottom - p.bgo_thickness_mm;

        let v = Vec3::new;
        let mut volumes = Vec::new();

        let front_readout = Readout::Pixelated {
            origin: [-front_half, -front_half],
            pitch: p.front_pitch_mm,
            z_center: 0.5 * front_bottom,
        };
        let frame = [
            ("front_west", v(-front_half, -front_half, front_bottom), v(-hole, front_half, 0.0)),
            ("front_east", v(hole, -front_half, front_bottom), v(front_half, front_half, 0.0)),
            ("front_south", v(-hole, -front_half, front_bottom), v(hole, -hole, 0.0)),
            ("front_north", v(-hole, hole, front_bottom), v(hole, front_half, 0.0)),
        ];
        for (name, lo, hi) in frame {
            volumes.push(Volume {
                name: name.into(),
                bounds: Aabb::new(lo, hi),
                segment: Segment::Front,
                material: Material::Gagg,
                readout: front_readout,
            });
        }

        for layer in 0..p.rear_layers {
            let top = rear_top - f64::from(layer) * p.rear_layer_thickness_mm;
            let bottom = top - p.rear_layer_thickness_mm;
            volumes.push(Volume {
                name: format!("rear_layer_{layer}"),
                bounds: Aabb::new(v(-rear_half, -rear_half, bottom), v(rear_half, rear_half, top)),
                segment: Segment::Rear,
                material: Material::Gagg,
                readout: Readout::Pixelated {
                    origin: [-rear_half, -rear_half],
                    pitch: p.rear_pitch_mm,
                    z_center: 0.5 * (top + bottom),
                },
            });
        }

        // Ring of four panels: x-facing panels span the inner square, y-facing
        // panels also cover the corners.
        let ring = |inner: f64, outer: f64, z_lo: f64, z_hi: f64| {
            [
                ("east", v(inner, -inner, z_lo), v(outer, inner, z_hi)),
                ("west", v(-outer, -inner, z_lo), v(-inner, inner, z_hi)),
                ("north", v(-outer, inner, z_lo), v(outer, outer, z_hi)),
                ("south", v(-outer, -outer, z_lo), v(outer, -inner, z_hi)),
            ]
        };
        for (face, lo, hi) in ring(inner, side_outer, rear_bottom, 0.0) {
            volumes.push(Volume {
                name: format!("side_{face}"),
                bounds: Aabb::new(lo, hi),
                segment: Segment::Side,
                material: Material::Gagg,
                readout: Readout::Monolithic,
            });
        }
        for (face, lo, hi) in ring(side_outer, bgo_outer, rear_bottom, 0.0) {
            volumes.push(Volume {
                name: format!("bgo_{face}"),
                bounds: Aabb::new(lo, hi),
                segment: Segment::Bgo,
                material: Material::Bgo,
                readout: Readout::Monolithic,
            });
        }
        volumes.push(Volume {
            name: "bgo_bottom".into(),
            bounds: Aabb::new(v(-bgo_outer, -bgo_outer, bgo_bottom), v(bgo_outer, bgo_outer, rear_bottom)),
            segment: Segment::Bgo,
            material: Material::Bgo,
            readout: Readout::Monolithic,
        });

        for (i, a) in volumes.iter().enumerate() {
            for b in &volumes[i + 1..] {
                if a.bounds.overlaps(&b.bounds) {
                    return Err(Error::Geometry(format!("volumes {} and {} overlap", a.name, b.name)));
                }
            }
        }

        let pinhole = Aabb::new(v(-hole, -hole, front_bottom), v(hole, hole, 0.0));
        let bounds = Aabb::new(v(-bgo_outer, -bgo_outer, bgo_bottom), v(bgo_outer, bgo_outer, 0.0));
        Ok(Self { params, volumes, pinhole, bounds })
    }

    pub fn params(&self) -> &GeometryParams {
        &self.params
    }

    pub fn volumes(&self) -> &[Volume] {
        &self.volumes
    }

    pub fn volume(&self, index: usize) -> &Volume {
        &self.volumes[index]
    }

    /// The empty aperture prism through the front layer.
    pub fn pinhole(&self) -> &Aabb {
        &self.pinhole
    }

    /// Aperture center at mid-thickness of the front layer.
    pub fn pinhole_center(&self) -> Vec3 {
        self.pinhole.center()
    }

    /// Bounding box of the whole instrument.
    pub fn bounds(&self) -> &Aabb {
        &self.bounds
    }

    /// Radius of the sphere around [`Self::bounds`] centered on its center.
    pub fn bounding_radius(&self) -> f64 {
        0.5 * self.bounds.size().norm()
    }

    /// Index of the volume containing `p`, if any.
    pub fn locate(&self, p: &Vec3) -> Option<usize> {
        self.volumes.iter().position(|v| v.bounds.contains(p))
    }

    pub fn front_volumes(&self) -> impl Iterator<Item = (usize, &Volume)> {
        self.segment_volumes(Segment::Front)
    }

    pub fn rear_volumes(&self) -> impl Iterator<Item = (usize, &Volume)> {
        self.segment_volumes(Segment::Rear)
    }

    pub fn segment_volumes(&self, segment: Segment) -> impl Iterator<Item = (usize, &Volume)> {
        self.volumes.iter().enumerate().filter(move |(_, v)| v.segment == segment)
    }

    /// Bounding box of the rear stack.
    pub fn rear_stack(&self) -> Aabb {
        let mut it = self.rear_volumes().map(|(_, v)| v.bounds);
        let first = it.next().expect("at least one rear layer");
        it.fold(first, |acc, b| Aabb::new(acc.min.inf(&b.min), acc.max.sup(&b.max)))
    }

    /// Geometric area of the rear stack footprint in cm^2.
    pub fn rear_footprint_cm2(&self) -> f64 {
        let s = self.rear_stack().size();
        s.x * s.y / 100.0
    }
}
