//! Noiseless forward-model events: exact interaction positions, no energy
//! smearing, no secondary physics. Used to validate the reconstruction chain
//! independently of transport.

use rand::Rng;

use crate::events::{EventRecord, SegmentHit};
use crate::geometry::{Aabb, DetectorGeometry, Segment};
use crate::transport::compton_outgoing_energy;
use crate::{Error, Result, Vec3};

fn uniform_in<R: Rng + ?Sized>(b: &Aabb, rng: &mut R) -> Vec3 {
    Vec3::new(
        rng.random_range(b.min.x..b.max.x),
        rng.random_range(b.min.y..b.max.y),
        rng.random_range(b.min.z..b.max.z),
    )
}

/// Uniform point inside the front scatter crystals (the pinhole excluded).
fn sample_front<R: Rng + ?Sized>(geometry: &DetectorGeometry, rng: &mut R) -> Vec3 {
    let vols: Vec<&Aabb> = geometry.front_volumes().map(|(_, v)| &v.bounds).collect();
    let total: f64 = vols.iter().map(|b| b.volume()).sum();
    let mut pick = rng.random::<f64>() * total;
    for b in &vols {
        if pick < b.volume() {
            return uniform_in(b, rng);
        }
        pick -= b.volume();
    }
    uniform_in(vols[vols.len() - 1], rng)
}

/// A self-consistent Compton event from a photon of energy `e0` arriving
/// from `source`: scatter point uniform in the front layer, absorption point
/// uniform in the rear stack, scatter angle fixed by the two points and the
/// deposits split by the Compton formula.
pub fn compton_event<R: Rng + ?Sized>(
    geometry: &DetectorGeometry,
    source: &Vec3,
    e0: f64,
    rng: &mut R,
) -> Result<EventRecord> {
    if !(e0 > 0.0) {
        return Err(Error::Parameter(format!("photon energy must be positive, got {e0}")));
    }
    let incoming = -source.normalize();
    let stack = geometry.rear_stack();
    loop {
        let p1 = sample_front(geometry, rng);
        let p2 = uniform_in(&stack, rng);
        let out = (p2 - p1).normalize();
        let theta = incoming.dot(&out).clamp(-1.0, 1.0).acos();
        if theta < 1e-3 {
            continue;
        }
        let e2 = compton_outgoing_energy(e0, theta);
        let mut rec = EventRecord::default();
        *rec.hit_mut(Segment::Front) = SegmentHit { energy: e0 - e2, position: p1 };
        *rec.hit_mut(Segment::Rear) = SegmentHit { energy: e2, position: p2 };
        return Ok(rec);
    }
}

/// A photo-absorption in the rear stack of a photon that entered through the
/// pinhole from `source` without touching the front crystals.
pub fn pinhole_event<R: Rng + ?Sized>(
    geometry: &DetectorGeometry,
    source: &Vec3,
    energy: f64,
    rng: &mut R,
) -> Result<EventRecord> {
    let s = source.normalize();
    if s.z <= 0.0 {
        return Err(Error::Parameter("pinhole source must be above the horizon".into()));
    }
    let d = -s;
    let hole = geometry.pinhole();
    let stack = geometry.rear_stack();
    for _ in 0..100_000 {
        let entry =
            Vec3::new(rng.random_range(hole.min.x..hole.max.x), rng.random_range(hole.min.y..hole.max.y), hole.max.z);
        // Still inside the aperture at the bottom of the front layer?
        let exit = entry + d * ((hole.min.z - hole.max.z) / d.z);
        if !(exit.x.abs() <= hole.max.x && exit.y.abs() <= hole.max.y) {
            continue;
        }
        let Some((t0, t1)) = stack.intersect(&entry, &d) else { continue };
        let t = rng.random_range(t0.max(0.0)..t1);
        let mut rec = EventRecord::default();
        *rec.hit_mut(Segment::Rear) = SegmentHit { energy, position: entry + d * t };
        return Ok(rec);
    }
    Err(Error::Geometry("no unobstructed path through the pinhole for this direction".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_default_geometry;
    use crate::reconstruction::{arm, cone_from_event};
    use crate::rng::rng_from_seed;

    #[test]
    fn compton_events_have_zero_arm() {
        let g = build_default_geometry();
        let mut rng = rng_from_seed(7);
        let s = Vec3::new(0.2, -0.1, 1.0).normalize();
        for _ in 0..1000 {
            let e = compton_event(&g, &s, 662.0, &mut rng).unwrap();
            assert!((e.total_energy() - 662.0).abs() < 1e-9);
            assert!(arm(&e, &s).unwrap().abs() < 1e-6);
        }
    }

    #[test]
    fn zenith_thirty_degree_cone() {
        let g = build_default_geometry();
        let mut rng = rng_from_seed(3);
        let target = 30f64.to_radians();
        let mut found = 0;
        for _ in 0..20_000 {
            let e = compton_event(&g, &Vec3::z(), 500.0, &mut rng).unwrap();
            let cone = cone_from_event(&e, 0.01).unwrap();
            if (cone.half_angle - target).abs() < 0.01 {
                let geo = cone.axis.dot(&Vec3::z()).acos();
                assert!((geo - cone.half_angle).abs() < 1e-6);
                found += 1;
            }
        }
        assert!(found > 0);
    }

    #[test]
    fn pinhole_events_land_in_rear() {
        let g = build_default_geometry();
        let mut rng = rng_from_seed(11);
        let s = Vec3::new(20f64.to_radians().sin(), 0.0, 20f64.to_radians().cos());
        let stack = g.rear_stack();
        for _ in 0..200 {
            let e = pinhole_event(&g, &s, 100.0, &mut rng).unwrap();
            assert!(stack.contains(&e.hit(Segment::Rear).position));
        }
        assert!(pinhole_event(&g, &-Vec3::z(), 100.0, &mut rng).is_err());
        // Too oblique for a 5.5 mm hole in a 5 mm slab.
        let grazing = Vec3::new(1.0, 0.0, 0.2).normalize();
        assert!(pinhole_event(&g, &grazing, 100.0, &mut rng).is_err());
    }
}
