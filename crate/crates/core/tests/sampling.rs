mod common;

use ccbox::rng::rng_from_seed;
use ccbox::transport::{
    compton_outgoing_energy, sample_hemisphere, sample_klein_nishina, sample_power_law, sample_source_direction,
};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use common::{kn_pdf, ks_distance, simpson, PowerLawCdf};

const BAND: [f64; 2] = [30.0, 3000.0];

#[test]
fn power_law_ks_for_run_indices() {
    for (k, gamma) in [-2.88, -1.35, -2.5, -1.3].into_iter().enumerate() {
        let mut rng = rng_from_seed(100 + k as u64);
        let mut xs: Vec<f64> =
            (0..1_000_000).map(|_| sample_power_law(gamma, BAND[0], BAND[1], &mut rng).unwrap()).collect();
        let cdf = PowerLawCdf::new(gamma, BAND[0], BAND[1], 20_001);
        let d = ks_distance(&mut xs, |e| cdf.eval(e));
        assert!(d < 0.005, "gamma {gamma}: KS distance {d}");
    }
}

#[test]
fn power_law_mean_index_two() {
    let mut rng = rng_from_seed(5);
    let n = 1_000_000;
    let mean = (0..n).map(|_| sample_power_law(-2.0, 30.0, 3000.0, &mut rng).unwrap()).sum::<f64>() / n as f64;
    let expected = 100f64.ln() / (1.0 / 30.0 - 1.0 / 3000.0);
    assert!((expected - 139.56).abs() < 0.01);
    assert!((mean / expected - 1.0).abs() < 0.01, "{mean} vs {expected}");
}

#[test]
fn power_law_edge_cases() {
    let mut rng = rng_from_seed(6);
    for gamma in [-3.0, -1.0, 0.0, 1.5] {
        for _ in 0..1000 {
            let e = sample_power_law(gamma, 100.0, 100.0 + 1e-9, &mut rng).unwrap();
            assert!((100.0..=100.0 + 1e-9).contains(&e));
        }
    }
    assert!(sample_power_law(f64::NAN, 30.0, 3000.0, &mut rng).is_err());
    assert!(sample_power_law(-2.0, 300.0, 30.0, &mut rng).is_err());
}

#[test]
fn log_uniform_at_index_minus_one() {
    let mut rng = rng_from_seed(8);
    let mut xs: Vec<f64> = (0..200_000).map(|_| sample_power_law(-1.0, 30.0, 3000.0, &mut rng).unwrap()).collect();
    let d = ks_distance(&mut xs, |e| (e / 30.0).ln() / 100f64.ln());
    assert!(d < 0.005, "{d}");
}

#[test]
fn cap_directions() {
    let mut rng = rng_from_seed(9);
    for _ in 0..1000 {
        assert_eq!(sample_source_direction(0.0, &mut rng), ccbox::Vec3::z());
    }
    let cos30 = 30f64.to_radians().cos();
    let n = 1_000_000;
    let mut sum = 0.0;
    for _ in 0..n {
        let d = sample_source_direction(30.0, &mut rng);
        assert!(d.z >= cos30 - 1e-15);
        sum += d.z.clamp(-1.0, 1.0).acos();
    }
    let mean = (sum / n as f64).to_degrees();
    // Mean polar angle over the cap measure sin θ dθ.
    let cap = 30f64.to_radians();
    let oracle = (simpson(|t| t * t.sin(), 0.0, cap, 2000) / simpson(f64::sin, 0.0, cap, 2000)).to_degrees();
    assert!((mean - oracle).abs() < 0.1, "{mean} vs {oracle}");
}

#[test]
fn hemispheres_respected() {
    let mut rng = rng_from_seed(10);
    for _ in 0..100_000 {
        assert!(sample_hemisphere(true, &mut rng).z > 0.0);
        assert!(sample_hemisphere(false, &mut rng).z < 0.0);
    }
}

#[test]
fn klein_nishina_at_511_chi_square() {
    let e = 511.0;
    let bins = 40;
    let n = 1_000_000;
    let mut counts = vec![0u64; bins];
    let mut rng = rng_from_seed(12);
    for _ in 0..n {
        let theta = sample_klein_nishina(e, &mut rng);
        assert!(theta > 0.0 && theta <= std::f64::consts::PI);
        let c = theta.cos();
        let b = (((c + 1.0) / 2.0) * bins as f64).floor().clamp(0.0, (bins - 1) as f64) as usize;
        counts[b] += 1;
    }
    let norm = simpson(|c| kn_pdf(e, c), -1.0, 1.0, 20_000);
    let mut chi2 = 0.0;
    for (b, &obs) in counts.iter().enumerate() {
        let lo = -1.0 + 2.0 * b as f64 / bins as f64;
        let hi = lo + 2.0 / bins as f64;
        let p = simpson(|c| kn_pdf(e, c), lo, hi, 200) / norm;
        let exp = p * n as f64;
        chi2 += (obs as f64 - exp).powi(2) / exp;
    }
    let pval = 1.0 - ChiSquared::new((bins - 1) as f64).unwrap().cdf(chi2);
    assert!(pval > 0.01, "chi2 {chi2}, p {pval}");
}

#[test]
fn thomson_limit_symmetric() {
    let mut rng = rng_from_seed(13);
    let n = 1_000_000;
    let mean = (0..n).map(|_| sample_klein_nishina(1.0, &mut rng).cos()).sum::<f64>() / n as f64;
    assert!(mean.abs() < 0.01, "{mean}");
}

#[test]
fn compton_energy_closed_forms() {
    assert_eq!(compton_outgoing_energy(662.0, 0.0), 662.0);
    assert!(
        (compton_outgoing_energy(511.0, std::f64::consts::PI) - 511.0 / (1.0 + 2.0 * 511.0 / 510.998_95)).abs() < 1e-12
    );
    assert!((compton_outgoing_energy(510.998_95, std::f64::consts::PI) - 510.998_95 / 3.0).abs() < 1e-9);
    let mut rng = rng_from_seed(14);
    for _ in 0..10_000 {
        let e = 60.0 + 2940.0 * rand::Rng::random::<f64>(&mut rng);
        let t = std::f64::consts::PI * rand::Rng::random::<f64>(&mut rng);
        let ours = compton_outgoing_energy(e, t);
        assert!((ours / common::compton_scattered(e, t) - 1.0).abs() < 1e-12);
    }
}
