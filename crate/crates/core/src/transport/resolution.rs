use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::tracking::{Interaction, PhotonHistory};
use crate::geometry::DetectorGeometry;

const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949_3;

/// Gaussian energy resolution scaling as `FWHM(E) = r662 * sqrt(662 / E) * E`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResolutionModel {
    /// Fractional FWHM at 662 keV.
    pub fwhm_at_662: f64,
}

impl Default for ResolutionModel {
    fn default() -> Self {
        Self { fwhm_at_662: 0.08 }
    }
}

impl ResolutionModel {
    pub fn fwhm(&self, energy: f64) -> f64 {
        if energy <= 0.0 {
            return 0.0;
        }
        self.fwhm_at_662 * (662.0 * energy).sqrt()
    }

    pub fn sigma(&self, energy: f64) -> f64 {
        self.fwhm(energy) / FWHM_PER_SIGMA
    }

    pub fn smear<R: Rng + ?Sized>(&self, energy: f64, rng: &mut R) -> f64 {
        let sigma = self.sigma(energy);
        if sigma <= 0.0 {
            return energy;
        }
        let normal = Normal::new(energy, sigma).expect("finite positive sigma");
        normal.sample(rng).max(0.0)
    }
}

/// Applies detector response to a history: each deposit is Gaussian-smeared
/// (floored at zero) and each position is replaced by the readout position of
/// its volume.
pub fn apply_resolution<R: Rng + ?Sized>(
    history: &PhotonHistory,
    model: &ResolutionModel,
    geometry: &DetectorGeometry,
    rng: &mut R,
) -> Vec<Interaction> {
    history
        .interactions
        .iter()
        .map(|i| Interaction {
            position: geometry.volume(i.volume).quantize(&i.position),
            deposit: model.smear(i.deposit, rng),
            ..*i
        })
        .collect()
}
