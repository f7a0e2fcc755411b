//! Detector events: the 16-feature record (E, x, y, z for each of the front,
//! rear, side and BGO segment classes), its [0, 1] normalization and event
//! selection with the BGO veto.

use serde::{Deserialize, Serialize};

use crate::geometry::{DetectorGeometry, Segment};
use crate::reconstruction::cos_scattering_angle;
use crate::transport::Interaction;
use crate::{Error, Result, Vec3};

pub const N_FEATURES: usize = 16;

/// Summed deposit and representative position for one segment class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SegmentHit {
    pub energy: f64,
    pub position: Vec3,
}

impl SegmentHit {
    pub fn is_present(&self) -> bool {
        self.energy > 0.0
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    /// Indexed by [`Segment::index`]. Absent segments are zero energy at the origin.
    pub hits: [SegmentHit; 4],
}

impl EventRecord {
    pub fn hit(&self, segment: Segment) -> &SegmentHit {
        &self.hits[segment.index()]
    }

    pub fn hit_mut(&mut self, segment: Segment) -> &mut SegmentHit {
        &mut self.hits[segment.index()]
    }

    pub fn total_energy(&self) -> f64 {
        self.hits.iter().map(|h| h.energy).sum()
    }

    /// Raw feature vector in `(E, x, y, z)` blocks per segment class.
    pub fn features(&self) -> [f64; N_FEATURES] {
        let mut out = [0.0; N_FEATURES];
        for (k, h) in self.hits.iter().enumerate() {
            out[4 * k] = h.energy;
            out[4 * k + 1] = h.position.x;
            out[4 * k + 2] = h.position.y;
            out[4 * k + 3] = h.position.z;
        }
        out
    }

    pub fn from_features(f: &[f64; N_FEATURES]) -> Self {
        let mut rec = Self::default();
        for (k, h) in rec.hits.iter_mut().enumerate() {
            if f[4 * k] > 0.0 {
                *h = SegmentHit { energy: f[4 * k], position: Vec3::new(f[4 * k + 1], f[4 * k + 2], f[4 * k + 3]) };
            }
        }
        rec
    }

    /// Scatter (front) and absorber (rear) hits.
    pub fn compton_pair(&self) -> (&SegmentHit, &SegmentHit) {
        (self.hit(Segment::Front), self.hit(Segment::Rear))
    }
}

/// Collapses a list of (smeared) interactions into one record: per segment
/// class the deposits are summed and the position of the largest single
/// deposit is kept, the earliest one on ties.
pub fn build_event(interactions: &[Interaction], trigger_threshold_kev: f64) -> Result<EventRecord> {
    let total: f64 = interactions.iter().map(|i| i.deposit).sum();
    if interactions.is_empty() || total < trigger_threshold_kev {
        return Err(Error::SubThreshold(total));
    }
    let mut rec = EventRecord::default();
    let mut best = [f64::NEG_INFINITY; 4];
    for i in interactions {
        let k = i.segment.index();
        rec.hits[k].energy += i.deposit;
        if i.deposit > best[k] {
            best[k] = i.deposit;
            rec.hits[k].position = i.position;
        }
    }
    for h in &mut rec.hits {
        if h.energy <= 0.0 {
            *h = SegmentHit::default();
        }
    }
    Ok(rec)
}

/// Per-feature affine bounds used to map features onto [0, 1].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationBounds {
    pub min: [f64; N_FEATURES],
    pub max: [f64; N_FEATURES],
}

impl NormalizationBounds {
    pub fn new(min: [f64; N_FEATURES], max: [f64; N_FEATURES]) -> Result<Self> {
        if let Some(k) = (0..N_FEATURES).find(|&k| !(min[k] < max[k])) {
            return Err(Error::Parameter(format!("feature {k}: min {} >= max {}", min[k], max[k])));
        }
        Ok(Self { min, max })
    }

    /// Energies on [0, `max_energy_kev`], positions on the instrument's
    /// bounding box.
    pub fn for_geometry(geometry: &DetectorGeometry, max_energy_kev: f64) -> Self {
        let b = geometry.bounds();
        let mut min = [0.0; N_FEATURES];
        let mut max = [0.0; N_FEATURES];
        for k in 0..4 {
            min[4 * k] = 0.0;
            max[4 * k] = max_energy_kev;
            for axis in 0..3 {
                min[4 * k + 1 + axis] = b.min[axis];
                max[4 * k + 1 + axis] = b.max[axis];
            }
        }
        Self { min, max }
    }

    /// The identity bounds.
    pub fn unit() -> Self {
        Self { min: [0.0; N_FEATURES], max: [1.0; N_FEATURES] }
    }

    /// Affine map onto [0, 1] with clamping. A segment with zero energy is
    /// encoded as four zeros.
    pub fn normalize(&self, features: &[f64; N_FEATURES]) -> [f64; N_FEATURES] {
        let mut out = [0.0; N_FEATURES];
        for seg in 0..4 {
            if features[4 * seg] <= 0.0 {
                continue;
            }
            for k in 4 * seg..4 * seg + 4 {
                out[k] = ((features[k] - self.min[k]) / (self.max[k] - self.min[k])).clamp(0.0, 1.0);
            }
        }
        out
    }

    pub fn denormalize(&self, normalized: &[f64; N_FEATURES]) -> [f64; N_FEATURES] {
        let mut out = [0.0; N_FEATURES];
        for seg in 0..4 {
            if normalized[4 * seg] <= 0.0 {
                continue;
            }
            for k in 4 * seg..4 * seg + 4 {
                out[k] = self.min[k] + normalized[k] * (self.max[k] - self.min[k]);
            }
        }
        out
    }
}

pub fn normalize_event(record: &EventRecord, bounds: &NormalizationBounds) -> [f64; N_FEATURES] {
    bounds.normalize(&record.features())
}

pub fn denormalize_event(normalized: &[f64; N_FEATURES], bounds: &NormalizationBounds) -> EventRecord {
    EventRecord::from_features(&bounds.denormalize(normalized))
}

/// Event-selection thresholds (keV).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectionThresholds {
    /// Events with more than this in the BGO shields are vetoed.
    pub veto_kev: f64,
    /// Accepted total GAGG energy for Compton candidates.
    pub compton_band_kev: [f64; 2],
    /// Accepted rear energy for pinhole candidates.
    pub pinhole_band_kev: [f64; 2],
}

impl Default for SelectionThresholds {
    fn default() -> Self {
        Self { veto_kev: 50.0, compton_band_kev: [30.0, 3000.0], pinhole_band_kev: [30.0, 200.0] }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    Veto,
    Unphysical,
    OutOfBand,
    NoImagingSignature,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventClass {
    ComptonCandidate,
    PinholeCandidate,
    Rejected(RejectReason),
}

impl EventClass {
    pub fn is_accepted(self) -> bool {
        !matches!(self, EventClass::Rejected(_))
    }
}

pub fn classify_event(record: &EventRecord, thresholds: &SelectionThresholds) -> EventClass {
    let front = record.hit(Segment::Front).energy;
    let rear = record.hit(Segment::Rear).energy;
    let side = record.hit(Segment::Side).energy;
    let bgo = record.hit(Segment::Bgo).energy;
    let in_band = |e: f64, [lo, hi]: [f64; 2]| e >= lo && e <= hi;

    if bgo > thresholds.veto_kev {
        return EventClass::Rejected(RejectReason::Veto);
    }
    if front > 0.0 && rear > 0.0 {
        if cos_scattering_angle(front, rear).is_err() {
            return EventClass::Rejected(RejectReason::Unphysical);
        }
        return if in_band(front + rear + side, thresholds.compton_band_kev) {
            EventClass::ComptonCandidate
        } else {
            EventClass::Rejected(RejectReason::OutOfBand)
        };
    }
    if rear > 0.0 && front <= 0.0 && side <= 0.0 {
        return if in_band(rear, thresholds.pinhole_band_kev) {
            EventClass::PinholeCandidate
        } else {
            EventClass::Rejected(RejectReason::OutOfBand)
        };
    }
    EventClass::Rejected(RejectReason::NoImagingSignature)
}
