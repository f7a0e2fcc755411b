//! Photon generation from burst and background sources, and analog transport
//! through the detector.

mod resolution;
mod sampling;
mod tracking;

pub use resolution::{apply_resolution, ResolutionModel};
pub use sampling::{
    compton_outgoing_energy, klein_nishina_shape, rotate_direction, sample_hemisphere, sample_klein_nishina,
    sample_power_law, sample_source_direction,
};
pub use tracking::{transport_photon, Interaction, Photon, PhotonHistory, Process, TRACKING_CUTOFF_KEV};

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::events::{build_event, EventRecord};
use crate::geometry::{DetectorGeometry, Materials};
use crate::rng::{rng_from_seed, SimRng};
use crate::{Error, Result, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    GrbPoint,
    Cxb,
    Albedo,
}

/// One photon source for a run.
///
/// `flux` is photons cm^-2 s^-1 through the generation disk over the energy
/// band. For the diffuse backgrounds it is the hemisphere-integrated rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    pub kind: SourceKind,
    pub flux: f64,
    pub photon_index: f64,
    /// Unit vector pointing from the detector towards the source; point sources only.
    pub direction: Option<Vec3>,
    pub duration_s: f64,
    pub energy_band_kev: [f64; 2],
}

impl SourceSpec {
    pub fn grb(direction: Vec3, flux: f64, photon_index: f64, duration_s: f64, band: [f64; 2]) -> Self {
        Self {
            kind: SourceKind::GrbPoint,
            flux,
            photon_index,
            direction: Some(direction),
            duration_s,
            energy_band_kev: band,
        }
    }

    pub fn diffuse(kind: SourceKind, flux: f64, photon_index: f64, duration_s: f64, band: [f64; 2]) -> Self {
        Self { kind, flux, photon_index, direction: None, duration_s, energy_band_kev: band }
    }

    pub fn validate(&self, fov_half_angle_deg: f64) -> Result<()> {
        let [lo, hi] = self.energy_band_kev;
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            return Err(Error::Parameter(format!("energy band [{lo}, {hi}] is invalid")));
        }
        if !self.photon_index.is_finite() {
            return Err(Error::Parameter("photon index must be finite".into()));
        }
        if !(self.flux >= 0.0 && self.flux.is_finite()) {
            return Err(Error::Parameter(format!("flux must be non-negative, got {}", self.flux)));
        }
        if !(self.duration_s >= 0.0 && self.duration_s.is_finite()) {
            return Err(Error::Parameter(format!("duration must be non-negative, got {}", self.duration_s)));
        }
        match (self.kind, self.direction) {
            (SourceKind::GrbPoint, Some(d)) => {
                if (d.norm() - 1.0).abs() > 1e-9 {
                    return Err(Error::Parameter("source direction must be a unit vector".into()));
                }
                let cos_cap = fov_half_angle_deg.to_radians().cos();
                if d.z < cos_cap - 1e-12 {
                    return Err(Error::Parameter(format!(
                        "source direction {:.2} deg off-axis is outside the {fov_half_angle_deg} deg cap",
                        d.z.clamp(-1.0, 1.0).acos().to_degrees()
                    )));
                }
            }
            (SourceKind::GrbPoint, None) => {
                return Err(Error::Parameter("point source needs a direction".into()));
            }
            _ => {}
        }
        Ok(())
    }
}

/// Disk normal to each photon's arrival direction from which photons start.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenerationDisk {
    pub center: Vec3,
    pub radius_mm: f64,
    /// Distance from `center` at which photons start.
    pub standoff_mm: f64,
}

impl GenerationDisk {
    /// Disk around the detector's bounding sphere with a fractional margin.
    pub fn enclosing(geometry: &DetectorGeometry, margin: f64) -> Self {
        let r = geometry.bounding_radius();
        Self { center: geometry.bounds().center(), radius_mm: r * (1.0 + margin), standoff_mm: 2.0 * r }
    }

    pub fn with_radius(geometry: &DetectorGeometry, radius_mm: f64) -> Self {
        let r = geometry.bounding_radius();
        Self { center: geometry.bounds().center(), radius_mm, standoff_mm: 2.0 * r.max(radius_mm) }
    }

    pub fn area_cm2(&self) -> f64 {
        PI * self.radius_mm * self.radius_mm / 100.0
    }

    /// Starting photon for a source seen in direction `towards_source`.
    pub fn launch<R: Rng + ?Sized>(&self, towards_source: &Vec3, energy: f64, rng: &mut R) -> Photon {
        let helper = if towards_source.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
        let e1 = towards_source.cross(&helper).normalize();
        let e2 = towards_source.cross(&e1);
        let r = self.radius_mm * rng.random::<f64>().sqrt();
        let phi = 2.0 * PI * rng.random::<f64>();
        let offset = (e1 * phi.cos() + e2 * phi.sin()) * r;
        Photon {
            position: self.center + towards_source * self.standoff_mm + offset,
            direction: -towards_source,
            energy,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub sources: Vec<SourceSpec>,
    pub resolution: ResolutionModel,
    /// Minimum total deposit for an event to be recorded (keV).
    pub trigger_threshold_kev: f64,
    /// Generation disk radius; `None` encloses the detector with a 20% margin.
    pub generation_radius_mm: Option<f64>,
    pub fov_half_angle_deg: f64,
}

impl RunConfig {
    pub fn new(sources: Vec<SourceSpec>) -> Self {
        Self {
            sources,
            resolution: ResolutionModel::default(),
            trigger_threshold_kev: 30.0,
            generation_radius_mm: None,
            fov_half_angle_deg: 30.0,
        }
    }

    pub fn generation_disk(&self, geometry: &DetectorGeometry) -> GenerationDisk {
        match self.generation_radius_mm {
            Some(r) => GenerationDisk::with_radius(geometry, r),
            None => GenerationDisk::enclosing(geometry, 0.2),
        }
    }
}

/// A recorded event together with the source that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectedEvent {
    pub record: EventRecord,
    pub origin: SourceKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulatedRun {
    pub seed: u64,
    pub sources: Vec<SourceSpec>,
    /// Photons launched per source, in `sources` order.
    pub generated: Vec<u64>,
    pub events: Vec<DetectedEvent>,
}

impl SimulatedRun {
    pub fn point_source(&self) -> Option<&SourceSpec> {
        self.sources.iter().find(|s| s.kind == SourceKind::GrbPoint)
    }

    pub fn records(&self) -> impl Iterator<Item = &EventRecord> {
        self.events.iter().map(|e| &e.record)
    }
}

/// Simulates one observation: Poisson photon counts per source, transport,
/// detector response and event building, all from a single seeded stream.
pub fn simulate_run(
    config: &RunConfig,
    geometry: &DetectorGeometry,
    materials: &Materials,
    seed: u64,
) -> Result<SimulatedRun> {
    if config.sources.is_empty() {
        return Err(Error::Parameter("run configuration has no sources".into()));
    }
    let n_point = config.sources.iter().filter(|s| s.kind == SourceKind::GrbPoint).count();
    if n_point > 1 {
        return Err(Error::Parameter(format!("at most one point source per run, got {n_point}")));
    }
    for s in &config.sources {
        s.validate(config.fov_half_angle_deg)?;
    }

    let disk = config.generation_disk(geometry);
    let mut rng: SimRng = rng_from_seed(seed);
    let mut generated = Vec::with_capacity(config.sources.len());
    let mut events = Vec::new();

    for source in &config.sources {
        let mean = source.flux * disk.area_cm2() * source.duration_s;
        let count = if mean > 0.0 {
            Poisson::new(mean).map_err(|e| Error::Parameter(e.to_string()))?.sample(&mut rng) as u64
        } else {
            0
        };
        generated.push(count);
        let [e_min, e_max] = source.energy_band_kev;
        for _ in 0..count {
            let energy = sample_power_law(source.photon_index, e_min, e_max, &mut rng)?;
            let towards = match source.kind {
                SourceKind::GrbPoint => source.direction.expect("validated"),
                SourceKind::Cxb => sample_hemisphere(true, &mut rng),
                SourceKind::Albedo => sample_hemisphere(false, &mut rng),
            };
            let photon = disk.launch(&towards, energy, &mut rng);
            let history = transport_photon(&photon, geometry, materials, &mut rng);
            if history.interactions.is_empty() {
                continue;
            }
            let smeared = apply_resolution(&history, &config.resolution, geometry, &mut rng);
            if let Ok(record) = build_event(&smeared, config.trigger_threshold_kev) {
                events.push(DetectedEvent { record, origin: source.kind });
            }
        }
    }

    Ok(SimulatedRun { seed, sources: config.sources.clone(), generated, events })
}
