//! Analog photon tracking through the detector volumes.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sampling::{compton_outgoing_energy, rotate_direction, sample_klein_nishina};
use crate::geometry::{DetectorGeometry, Materials, Segment};
use crate::Vec3;

/// Photons below this energy deposit their remaining energy locally.
pub const TRACKING_CUTOFF_KEV: f64 = 10.0;

const MAX_INTERACTIONS: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Process {
    Photoelectric,
    Compton,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interaction {
    pub position: Vec3,
    /// Energy deposit in keV.
    pub deposit: f64,
    pub segment: Segment,
    pub process: Process,
    /// Index of the volume in [`DetectorGeometry::volumes`].
    pub volume: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Photon {
    pub position: Vec3,
    /// Unit direction of travel.
    pub direction: Vec3,
    pub energy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhotonHistory {
    pub initial_energy: f64,
    pub initial_direction: Vec3,
    /// Interactions in tracking order.
    pub interactions: Vec<Interaction>,
    pub escaped_energy: f64,
}

impl PhotonHistory {
    pub fn deposited_energy(&self) -> f64 {
        self.interactions.iter().map(|i| i.deposit).sum()
    }
}

/// Tracks one photon until it is absorbed, escapes, or falls below the
/// tracking cutoff.
///
/// Each step intersects the current ray with every volume, walks the
/// resulting path segments in order and samples the interaction point from
/// the exponential attenuation law with the segment materials' total
/// coefficient. Photoabsorption ends the history; Compton scattering
/// deposits the recoil energy and continues with a Klein–Nishina angle and a
/// uniform azimuth.
pub fn transport_photon<R: Rng + ?Sized>(
    photon: &Photon,
    geometry: &DetectorGeometry,
    materials: &Materials,
    rng: &mut R,
) -> PhotonHistory {
    let mut history = PhotonHistory {
        initial_energy: photon.energy,
        initial_direction: photon.direction,
        interactions: Vec::new(),
        escaped_energy: 0.0,
    };
    let mut pos = photon.position;
    let mut dir = photon.direction;
    let mut energy = photon.energy;
    let mut segments: Vec<(f64, f64, usize)> = Vec::with_capacity(geometry.volumes().len());

    loop {
        if history.interactions.len() >= MAX_INTERACTIONS {
            history.escaped_energy = energy;
            break;
        }
        segments.clear();
        for (i, v) in geometry.volumes().iter().enumerate() {
            if let Some((t_in, t_out)) = v.bounds.intersect(&pos, &dir) {
                segments.push((t_in.max(0.0), t_out, i));
            }
        }
        segments.sort_by(|a, b| a.0.total_cmp(&b.0));

        // Optical depth to the next interaction.
        let mut tau = -(1.0 - rng.random::<f64>()).ln();
        let mut hit = None;
        for &(t_in, t_out, idx) in &segments {
            let material = geometry.volume(idx).material;
            let att = materials.lookup(material, energy).expect("tracked energies stay inside the attenuation tables");
            let mu = att.total();
            let step = mu * (t_out - t_in);
            if tau < step {
                hit = Some((t_in + tau / mu, idx, att.photoelectric / mu));
                break;
            }
            tau -= step;
        }

        let Some((t, idx, pe_fraction)) = hit else {
            history.escaped_energy = energy;
            break;
        };
        pos += dir * t;
        let segment = geometry.volume(idx).segment;

        if rng.random::<f64>() < pe_fraction {
            history.interactions.push(Interaction {
                position: pos,
                deposit: energy,
                segment,
                process: Process::Photoelectric,
                volume: idx,
            });
            break;
        }

        let theta = sample_klein_nishina(energy, rng);
        let phi = 2.0 * PI * rng.random::<f64>();
        let scattered = compton_outgoing_energy(energy, theta);
        let absorbed = scattered < TRACKING_CUTOFF_KEV;
        let deposit = if absorbed { energy } else { energy - scattered };
        if deposit > 0.0 {
            history.interactions.push(Interaction {
                position: pos,
                deposit,
                segment,
                process: Process::Compton,
                volume: idx,
            });
        }
        if absorbed {
            break;
        }
        energy = scattered;
        dir = rotate_direction(&dir, theta, phi);
    }
    history
}
