use serde::{Deserialize, Serialize};

use crate::events::EventRecord;
use crate::geometry::Segment;
use crate::{Error, Result, Vec3, ELECTRON_MASS_KEV};

/// Slack allowed on |cos θ| before an event counts as unphysical. Covers
/// energies quoted to a few decimals at exact backscatter.
pub const COS_TOLERANCE: f64 = 1e-5;

/// Minimum scatter/absorber separation for a usable cone axis (mm).
pub const MIN_AXIS_LENGTH_MM: f64 = 0.5;

/// `1 - cos θ` from the Compton formula, written to avoid cancellation.
fn one_minus_cos(e_scatter: f64, e_absorb: f64) -> f64 {
    ELECTRON_MASS_KEV * e_scatter / (e_absorb * (e_scatter + e_absorb))
}

/// `cos θ = 1 - mc²/E2 + mc²/(E1 + E2)`, range-checked.
pub fn cos_scattering_angle(e_scatter: f64, e_absorb: f64) -> Result<f64> {
    if !(e_scatter >= 0.0 && e_absorb > 0.0) {
        return Err(Error::Parameter(format!("need E1 >= 0 and E2 > 0, got E1 = {e_scatter}, E2 = {e_absorb}")));
    }
    let c = 1.0 - one_minus_cos(e_scatter, e_absorb);
    if !(-1.0 - COS_TOLERANCE..=1.0 + COS_TOLERANCE).contains(&c) {
        return Err(Error::Unphysical(c));
    }
    Ok(c.clamp(-1.0, 1.0))
}

/// Compton scattering angle (radians) from the scatter-layer deposit `E1` and
/// the absorber deposit `E2`, both in keV.
pub fn scattering_angle(e_scatter: f64, e_absorb: f64) -> Result<f64> {
    cos_scattering_angle(e_scatter, e_absorb)?;
    let half = (0.5 * one_minus_cos(e_scatter, e_absorb)).clamp(0.0, 1.0);
    Ok(2.0 * half.sqrt().atan2((1.0 - half).sqrt()))
}

/// One Compton cone on the far-field sky: every direction at angle
/// `half_angle` from `axis`, blurred with Gaussian width `width`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeParams {
    pub axis: Vec3,
    pub half_angle: f64,
    pub width: f64,
}

impl ConeParams {
    pub fn new(axis: Vec3, half_angle: f64, width: f64) -> Result<Self> {
        if (axis.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::Parameter("cone axis must be a unit vector".into()));
        }
        if !(half_angle > 0.0 && half_angle < std::f64::consts::PI) {
            return Err(Error::Parameter(format!("cone half-angle {half_angle} outside (0, pi)")));
        }
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::Parameter(format!("cone width must be positive, got {width}")));
        }
        Ok(Self { axis, half_angle, width })
    }
}

/// Unit vector from the absorber hit to the scatter hit, i.e. back along
/// the scattered photon towards the source side.
pub fn cone_axis(event: &EventRecord) -> Result<Vec3> {
    let d = event.hit(Segment::Front).position - event.hit(Segment::Rear).position;
    let len = d.norm();
    if len < MIN_AXIS_LENGTH_MM {
        return Err(Error::DegenerateAxis(len));
    }
    Ok(d / len)
}

pub fn cone_from_event(event: &EventRecord, width: f64) -> Result<ConeParams> {
    let axis = cone_axis(event)?;
    let theta = scattering_angle(event.hit(Segment::Front).energy, event.hit(Segment::Rear).energy)?;
    ConeParams::new(axis, theta, width)
}
