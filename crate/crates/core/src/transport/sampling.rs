//! Random variate generators for source spectra, directions and Compton
//! scattering.

use std::f64::consts::PI;

use rand::Rng;

use crate::{Error, Result, Vec3, ELECTRON_MASS_KEV};

/// Draws an energy from `pdf(E) ∝ E^photon_index` on `[e_min, e_max]` by
/// inverting the CDF. An index of -1 uses the log-uniform closed form.
pub fn sample_power_law<R: Rng + ?Sized>(photon_index: f64, e_min: f64, e_max: f64, rng: &mut R) -> Result<f64> {
    if !photon_index.is_finite() {
        return Err(Error::Parameter(format!("photon index must be finite, got {photon_index}")));
    }
    if !(e_min > 0.0 && e_min < e_max && e_max.is_finite()) {
        return Err(Error::Parameter(format!("invalid energy band [{e_min}, {e_max}]")));
    }
    let u: f64 = rng.random();
    let a = photon_index + 1.0;
    let e = if a.abs() < 1e-12 {
        e_min * (e_max / e_min).powf(u)
    } else {
        let lo = e_min.powf(a);
        let hi = e_max.powf(a);
        (lo + u * (hi - lo)).powf(1.0 / a)
    };
    Ok(e.clamp(e_min, e_max))
}

/// Uniform direction on the spherical cap of the given half-angle around +z.
pub fn sample_source_direction<R: Rng + ?Sized>(half_angle_deg: f64, rng: &mut R) -> Vec3 {
    let cos_max = half_angle_deg.clamp(0.0, 180.0).to_radians().cos();
    let cos_theta = 1.0 - rng.random::<f64>() * (1.0 - cos_max);
    let phi = 2.0 * PI * rng.random::<f64>();
    from_polar(cos_theta, phi)
}

/// Uniform direction on the upper (`+z`) or lower hemisphere.
pub fn sample_hemisphere<R: Rng + ?Sized>(upper: bool, rng: &mut R) -> Vec3 {
    // Strictly inside the open hemisphere.
    let c = 1.0 - rng.random::<f64>();
    let phi = 2.0 * PI * rng.random::<f64>();
    from_polar(if upper { c } else { -c }, phi)
}

fn from_polar(cos_theta: f64, phi: f64) -> Vec3 {
    let sin_theta = (1.0 - cos_theta * cos_theta).max(0.0).sqrt();
    Vec3::new(sin_theta * phi.cos(), sin_theta * phi.sin(), cos_theta)
}

/// Scattered photon energy for a Compton scatter of a photon of energy
/// `energy` (keV) through `theta` radians.
pub fn compton_outgoing_energy(energy: f64, theta: f64) -> f64 {
    let half = 0.5 * theta;
    let one_minus_cos = 2.0 * half.sin() * half.sin();
    energy / (1.0 + energy / ELECTRON_MASS_KEV * one_minus_cos)
}

/// Klein–Nishina differential cross-section shape (per unit cos θ),
/// normalized so that forward scattering gives 2.
pub fn klein_nishina_shape(energy: f64, cos_theta: f64) -> f64 {
    let ratio = 1.0 / (1.0 + energy / ELECTRON_MASS_KEV * (1.0 - cos_theta));
    ratio * ratio * (ratio + 1.0 / ratio - (1.0 - cos_theta * cos_theta))
}

/// Samples a Compton scattering angle in `(0, π]` from the Klein–Nishina
/// distribution by rejection against a flat envelope in cos θ.
pub fn sample_klein_nishina<R: Rng + ?Sized>(energy: f64, rng: &mut R) -> f64 {
    loop {
        // cos θ in [-1, 1) keeps θ in (0, π].
        let cos_theta = 2.0 * rng.random::<f64>() - 1.0;
        if 2.0 * rng.random::<f64>() <= klein_nishina_shape(energy, cos_theta) {
            return cos_theta.acos();
        }
    }
}

/// Rotates unit vector `dir` by polar angle `theta` about itself with
/// azimuth `phi`.
pub fn rotate_direction(dir: &Vec3, theta: f64, phi: f64) -> Vec3 {
    let helper = if dir.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e1 = dir.cross(&helper).normalize();
    let e2 = dir.cross(&e1);
    let (s, c) = theta.sin_cos();
    (dir * c + (e1 * phi.cos() + e2 * phi.sin()) * s).normalize()
}
