//! Dataset generation: seeded runs, ground-truth targets and the on-disk
//! layout
//!
//! ```text
//! <out>/manifest.json
//! <out>/runs/<split>/<id>/{events.bin, truth.json, compton.img, pinhole.img, target.img}
//! ```

pub mod formats;
mod png;

pub use formats::{read_events, read_image, read_map, write_events, write_image, write_map, FeatureRow, Image};
pub use png::{export_png, map_levels, Colormap};

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::events::{denormalize_event, normalize_event, EventRecord, NormalizationBounds, N_FEATURES};
use crate::geometry::{DetectorGeometry, GeometryParams, Materials};
use crate::reconstruction::{
    direction_to_pixel, reconstruct, Accumulation, Mode, ReconstructionConfig, SkyMap, MAP_SIZE,
};
use crate::rng::{derive_seed, rng_from_seed};
use crate::transport::{sample_source_direction, simulate_run, ResolutionModel, RunConfig, SourceKind, SourceSpec};
use crate::{Error, Result, Vec3};

pub const FORMAT_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";
pub const EVENTS_FILE: &str = "events.bin";
pub const TRUTH_FILE: &str = "truth.json";
pub const COMPTON_FILE: &str = "compton.img";
pub const PINHOLE_FILE: &str = "pinhole.img";
pub const TARGET_FILE: &str = "target.img";

const STAGING_DIR: &str = ".runs.partial";

/// Diffuse background sources. Normalizations are photons cm^-2 s^-1 over
/// the energy band, counted through the generation disk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackgroundConfig {
    pub enabled: bool,
    pub cxb_flux: f64,
    pub cxb_photon_index: f64,
    pub albedo_flux: f64,
    pub albedo_photon_index: f64,
}

impl Default for BackgroundConfig {
    fn default() -> Self {
        Self { enabled: true, cxb_flux: 1.0, cxb_photon_index: -2.88, albedo_flux: 1.0, albedo_photon_index: -1.35 }
    }
}

impl BackgroundConfig {
    pub fn sources(&self, duration_s: f64, band: [f64; 2]) -> Vec<SourceSpec> {
        if !self.enabled {
            return Vec::new();
        }
        vec![
            SourceSpec::diffuse(SourceKind::Cxb, self.cxb_flux, self.cxb_photon_index, duration_s, band),
            SourceSpec::diffuse(SourceKind::Albedo, self.albedo_flux, self.albedo_photon_index, duration_s, band),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub durations_s: Vec<f64>,
    /// Runs per duration.
    pub runs: usize,
    /// Burst flux, photons cm^-2 s^-1 over the energy band.
    pub flux: f64,
    /// Per-run photon index is uniform on this interval.
    pub photon_index_range: [f64; 2],
    pub fov_half_angle_deg: f64,
    pub energy_band_kev: [f64; 2],
    pub background: BackgroundConfig,
    pub resolution: ResolutionModel,
    pub trigger_threshold_kev: f64,
    pub generation_radius_mm: Option<f64>,
    pub reconstruction: ReconstructionConfig,
    /// Width of the Gaussian target blob in pixels.
    pub truth_sigma_px: f64,
    /// Upper energy bound of the feature normalization.
    pub max_energy_kev: f64,
    pub geometry: GeometryParams,
    pub master_seed: u64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            durations_s: vec![1.0, 3.0, 10.0, 30.0, 100.0],
            runs: 1000,
            flux: 1.0,
            photon_index_range: [-2.5, -1.3],
            fov_half_angle_deg: 30.0,
            energy_band_kev: [30.0, 3000.0],
            background: BackgroundConfig::default(),
            resolution: ResolutionModel::default(),
            trigger_threshold_kev: 30.0,
            generation_radius_mm: None,
            reconstruction: ReconstructionConfig::default(),
            truth_sigma_px: 2.0,
            max_energy_kev: 3000.0,
            geometry: GeometryParams::default(),
            master_seed: 0,
        }
    }
}

impl SimulationConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Parameter(m));
        if self.durations_s.is_empty() {
            return bad("at least one duration is required".into());
        }
        let mut seen = HashSet::new();
        for &d in &self.durations_s {
            if !(d > 0.0 && d.is_finite()) {
                return bad(format!("durations must be positive, got {d}"));
            }
            if !seen.insert(d.to_bits()) {
                return bad(format!("duration {d} listed twice"));
            }
        }
        if self.runs == 0 {
            return bad("runs must be at least 1".into());
        }
        if !(self.flux >= 0.0 && self.flux.is_finite()) {
            return bad(format!("flux must be non-negative, got {}", self.flux));
        }
        let [lo, hi] = self.photon_index_range;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return bad(format!("photon index range [{lo}, {hi}] is invalid"));
        }
        if !(0.0..=90.0).contains(&self.fov_half_angle_deg) {
            return bad(format!("field-of-view half-angle {} outside [0, 90]", self.fov_half_angle_deg));
        }
        let [elo, ehi] = self.energy_band_kev;
        if !(elo > 0.0 && elo < ehi && ehi.is_finite()) {
            return bad(format!("energy band [{elo}, {ehi}] is invalid"));
        }
        let b = &self.background;
        for (name, v) in [("cxb_flux", b.cxb_flux), ("albedo_flux", b.albedo_flux)] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{name} must be non-negative, got {v}"));
            }
        }
        if !(self.resolution.fwhm_at_662 >= 0.0 && self.resolution.fwhm_at_662.is_finite()) {
            return bad("resolution must be non-negative".into());
        }
        if !(self.reconstruction.cone_sigma_deg > 0.0 && self.reconstruction.cone_sigma_deg.is_finite()) {
            return bad("cone_sigma_deg must be positive".into());
        }
        if !(self.truth_sigma_px >= 0.0 && self.truth_sigma_px.is_finite()) {
            return bad("truth_sigma_px must be non-negative".into());
        }
        if !(self.max_energy_kev > 0.0) {
            return bad("max_energy_kev must be positive".into());
        }
        if let Some(r) = self.generation_radius_mm {
            if !(r > 0.0 && r.is_finite()) {
                return bad(format!("generation radius must be positive, got {r}"));
            }
        }
        DetectorGeometry::from_params(self.geometry.clone())?;
        Ok(())
    }

    pub fn normalization(&self, geometry: &DetectorGeometry) -> NormalizationBounds {
        NormalizationBounds::for_geometry(geometry, self.max_energy_kev)
    }

    /// The reconstruction settings used for stored maps (always the
    /// bit-reproducible sequential path).
    pub fn stored_map_config(&self) -> ReconstructionConfig {
        ReconstructionConfig { accumulation: Accumulation::Sequential, ..self.reconstruction }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

impl std::str::FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "train" => Ok(Split::Train),
            "val" => Ok(Split::Val),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split '{other}' (expected train, val or test)")),
        }
    }
}

/// Train/val/test sizes in the 64/16/20 proportion; 1000 runs give
/// exactly 640/160/200. Fractional parts are rounded half up, the test split
/// takes the remainder.
pub fn split_sizes(n: usize) -> [usize; 3] {
    let round = |f: f64| (f * n as f64 + 0.5).floor() as usize;
    let train = round(0.64).min(n);
    let val = round(0.16).min(n - train);
    [train, val, n - train - val]
}

/// Split of run `index` when runs are assigned to train, val and test in
/// index order.
pub fn split_for_index(index: usize, n: usize) -> Split {
    let [train, val, _] = split_sizes(n);
    if index < train {
        Split::Train
    } else if index < train + val {
        Split::Val
    } else {
        Split::Test
    }
}

/// Isotropic Gaussian blob in pixel space centered on the projected
/// direction, scaled to a peak of exactly 1. `sigma_px = 0` gives a delta at
/// the containing pixel.
pub fn make_truth_map(direction: &Vec3, sigma_px: f64) -> Result<SkyMap> {
    if !(sigma_px >= 0.0 && sigma_px.is_finite()) {
        return Err(Error::Parameter(format!("target width must be non-negative, got {sigma_px}")));
    }
    let (i0, j0) = direction_to_pixel(direction)
        .ok_or_else(|| Error::Parameter("target direction must be above the horizon".into()))?;
    let mut map = SkyMap::zeros();
    if sigma_px == 0.0 {
        map.add(i0, j0, 1.0);
        return Ok(map);
    }
    let (ci, cj) = direction_pixel_coords(direction);
    let reach = (6.0 * sigma_px).ceil() as isize + 1;
    let inv = 0.5 / (sigma_px * sigma_px);
    for j in (j0 as isize - reach).max(0)..=(j0 as isize + reach).min(MAP_SIZE as isize - 1) {
        for i in (i0 as isize - reach).max(0)..=(i0 as isize + reach).min(MAP_SIZE as isize - 1) {
            let r2 = (i as f64 - ci).powi(2) + (j as f64 - cj).powi(2);
            map.add(i as usize, j as usize, (-r2 * inv).exp());
        }
    }
    map.normalize_max();
    Ok(map)
}

/// Pixel-space center `(i, j)` of a direction, continuous coordinates.
pub fn direction_pixel_coords(direction: &Vec3) -> (f64, f64) {
    let d = direction.normalize();
    let half = MAP_SIZE as f64 / 2.0;
    ((d.x + 1.0) * half - 0.5, (d.y + 1.0) * half - 0.5)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackgroundState {
    On,
    Off,
}

/// Per-run ground truth (`truth.json`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunTruth {
    pub id: String,
    pub split: Split,
    /// Unit vector towards the burst.
    pub direction: Vec3,
    pub photon_index: f64,
    pub duration_s: f64,
    pub flux: f64,
    pub seed: u64,
    pub background: BackgroundState,
    /// Photons launched from the burst and from all sources.
    pub generated_burst: u64,
    pub generated_total: u64,
    pub n_events: usize,
}

/// One run in memory, with everything that gets written to disk.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub truth: RunTruth,
    /// Normalized features exactly as stored.
    pub features: Vec<FeatureRow>,
    /// Events decoded from `features`; the maps are built from these.
    pub events: Vec<EventRecord>,
    /// Source of each event, in event order.
    pub origins: Vec<SourceKind>,
    pub compton: SkyMap,
    pub pinhole: SkyMap,
    pub target: SkyMap,
}

/// Decodes stored feature rows back into physical units.
pub fn records_from_rows(rows: &[FeatureRow], bounds: &NormalizationBounds) -> Vec<EventRecord> {
    rows.iter()
        .map(|row| {
            let mut f = [0.0; N_FEATURES];
            for (a, b) in f.iter_mut().zip(row) {
                *a = f64::from(*b);
            }
            denormalize_event(&f, bounds)
        })
        .collect()
}

pub fn run_id(duration_s: f64, index: usize) -> String {
    format!("t{}s_{index:05}", format!("{duration_s}").replace('.', "p"))
}

/// Simulates run `run_index` of duration `durations_s[duration_index]`.
pub fn simulate_dataset_run(
    config: &SimulationConfig,
    geometry: &DetectorGeometry,
    materials: &Materials,
    duration_index: usize,
    run_index: usize,
) -> Result<RunRecord> {
    let duration = *config
        .durations_s
        .get(duration_index)
        .ok_or_else(|| Error::Parameter(format!("no duration with index {duration_index}")))?;
    let seed = derive_seed(config.master_seed, &[duration_index as u64, run_index as u64]);
    let mut rng = rng_from_seed(seed);
    let direction = sample_source_direction(config.fov_half_angle_deg, &mut rng);
    let [lo, hi] = config.photon_index_range;
    let photon_index = if lo == hi { lo } else { rng.random_range(lo..=hi) };

    let mut sources = vec![SourceSpec::grb(direction, config.flux, photon_index, duration, config.energy_band_kev)];
    sources.extend(config.background.sources(duration, config.energy_band_kev));
    let run_config = RunConfig {
        sources,
        resolution: config.resolution,
        trigger_threshold_kev: config.trigger_threshold_kev,
        generation_radius_mm: config.generation_radius_mm,
        fov_half_angle_deg: config.fov_half_angle_deg,
    };
    let sim = simulate_run(&run_config, geometry, materials, derive_seed(seed, &[0]))?;

    let bounds = config.normalization(geometry);
    let features: Vec<FeatureRow> = sim.records().map(|r| normalize_event(r, &bounds).map(|v| v as f32)).collect();
    let events = records_from_rows(&features, &bounds);
    let maps = reconstruct(events.iter(), Mode::Both, &config.stored_map_config(), geometry);
    let target = make_truth_map(&direction, config.truth_sigma_px)?;

    let id = run_id(duration, run_index);
    let truth = RunTruth {
        id,
        split: split_for_index(run_index, config.runs),
        direction,
        photon_index,
        duration_s: duration,
        flux: config.flux,
        seed,
        background: if config.background.enabled { BackgroundState::On } else { BackgroundState::Off },
        generated_burst: sim.generated[0],
        generated_total: sim.generated.iter().sum(),
        n_events: features.len(),
    };
    Ok(RunRecord {
        truth,
        features,
        events,
        origins: sim.events.iter().map(|e| e.origin).collect(),
        compton: maps.compton,
        pinhole: maps.pinhole,
        target,
    })
}

/// Manifest index entry for one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunEntry {
    pub id: String,
    pub split: Split,
    pub duration_s: f64,
    pub seed: u64,
    /// Run directory relative to the dataset root.
    pub path: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format_version: u32,
    pub map_size: usize,
    pub n_features: usize,
    pub durations_s: Vec<f64>,
    pub runs_per_duration: usize,
    pub split_sizes: [usize; 3],
    pub flux: f64,
    pub photon_index_range: [f64; 2],
    pub background: BackgroundConfig,
    pub master_seed: u64,
    /// Per-feature bounds used for the stored normalized events.
    pub normalization: NormalizationBounds,
    /// Full generating configuration.
    pub config: SimulationConfig,
    pub runs: Vec<RunEntry>,
}

impl DatasetManifest {
    /// Reads and checks `manifest.json` under `root`: supported version, no
    /// duplicate ids, every referenced file present.
    pub fn load(root: &Path) -> Result<Self> {
        let path = root.join(MANIFEST_FILE);
        let text =
            fs::read_to_string(&path).map_err(|e| Error::Format(format!("cannot read {}: {e}", path.display())))?;
        let m: Self = serde_json::from_str(&text)?;
        if m.format_version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported dataset format version {}", m.format_version)));
        }
        let mut ids = HashSet::new();
        for r in &m.runs {
            if !ids.insert(r.id.as_str()) {
                return Err(Error::Format(format!("duplicate run id {}", r.id)));
            }
            for f in [EVENTS_FILE, TRUTH_FILE, COMPTON_FILE, PINHOLE_FILE, TARGET_FILE] {
                let p = root.join(&r.path).join(f);
                if !p.is_file() {
                    return Err(Error::Format(format!("missing dataset file {}", p.display())));
                }
            }
        }
        Ok(m)
    }

    pub fn run_dir(&self, root: &Path, entry: &RunEntry) -> PathBuf {
        root.join(&entry.path)
    }

    pub fn runs_in(&self, split: Option<Split>) -> impl Iterator<Item = &RunEntry> {
        self.runs.iter().filter(move |r| split.is_none_or(|s| r.split == s))
    }
}

pub fn read_truth(run_dir: &Path) -> Result<RunTruth> {
    Ok(serde_json::from_str(&fs::read_to_string(run_dir.join(TRUTH_FILE))?)?)
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(value)?;
    v.push(b'\n');
    Ok(v)
}

/// Writes one run's five files into `dir`.
pub fn write_run(dir: &Path, run: &RunRecord) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_events(&dir.join(EVENTS_FILE), &run.features)?;
    fs::write(dir.join(TRUTH_FILE), json_bytes(&run.truth)?)?;
    write_map(&dir.join(COMPTON_FILE), &run.compton)?;
    write_map(&dir.join(PINHOLE_FILE), &run.pinhole)?;
    write_map(&dir.join(TARGET_FILE), &run.target)?;
    Ok(())
}

fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    if jobs == 0 {
        return Err(Error::Parameter("jobs must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Parameter(format!("cannot start worker pool: {e}")))
}

/// Runs `f` on a pool of `jobs` threads.
pub fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    Ok(thread_pool(jobs)?.install(f))
}

fn check_output_dir(out: &Path) -> Result<()> {
    if !out.exists() {
        return Ok(());
    }
    if !out.is_dir() {
        return Err(Error::Parameter(format!("{} exists and is not a directory", out.display())));
    }
    for entry in fs::read_dir(out)? {
        let name = entry?.file_name();
        let name = name.to_string_lossy();
        if !matches!(name.as_ref(), MANIFEST_FILE | "runs" | STAGING_DIR) {
            return Err(Error::Parameter(format!(
                "{} is not empty and does not look like a dataset (found {name})",
                out.display()
            )));
        }
    }
    Ok(())
}

/// Generates every run of every duration into `out`, replacing any dataset
/// already there. Runs are written to a staging directory that is removed on
/// failure; the manifest is written last. The output bytes depend only on
/// `config`, not on `jobs`.
pub fn generate_dataset(config: &SimulationConfig, out: &Path, jobs: usize) -> Result<DatasetManifest> {
    config.validate()?;
    check_output_dir(out)?;
    let pool = thread_pool(jobs)?;
    let geometry = DetectorGeometry::from_params(config.geometry.clone())?;
    let materials = Materials::bundled();

    fs::create_dir_all(out)?;
    let staging = out.join(STAGING_DIR);
    if staging.exists() {
        fs::remove_dir_all(&staging)?;
    }
    let tasks: Vec<(usize, usize)> =
        (0..config.durations_s.len()).flat_map(|d| (0..config.runs).map(move |r| (d, r))).collect();

    let result: Result<Vec<RunEntry>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(d, r)| {
                let run = simulate_dataset_run(config, &geometry, &materials, d, r)?;
                let rel = format!("{}/{}", run.truth.split.name(), run.truth.id);
                write_run(&staging.join(&rel), &run)?;
                Ok(RunEntry {
                    id: run.truth.id.clone(),
                    split: run.truth.split,
                    duration_s: run.truth.duration_s,
                    seed: run.truth.seed,
                    path: format!("runs/{rel}"),
                })
            })
            .collect()
    });
    let runs = match result {
        Ok(r) => r,
        Err(e) => {
            let _ = fs::remove_dir_all(&staging);
            return Err(e);
        }
    };

    let manifest = DatasetManifest {
        format_version: FORMAT_VERSION,
        map_size: MAP_SIZE,
        n_features: N_FEATURES,
        durations_s: config.durations_s.clone(),
        runs_per_duration: config.runs,
        split_sizes: split_sizes(config.runs),
        flux: config.flux,
        photon_index_range: config.photon_index_range,
        background: config.background,
        master_seed: config.master_seed,
        normalization: config.normalization(&geometry),
        config: config.clone(),
        runs,
    };
    let finish = || -> Result<()> {
        let manifest_path = out.join(MANIFEST_FILE);
        if manifest_path.exists() {
            fs::remove_file(&manifest_path)?;
        }
        let runs_dir = out.join("runs");
        if runs_dir.exists() {
            fs::remove_dir_all(&runs_dir)?;
        }
        fs::rename(&staging, &runs_dir)?;
        fs::write(&manifest_path, json_bytes(&manifest)?)?;
        Ok(())
    };
    if let Err(e) = finish() {
        let _ = fs::remove_dir_all(&staging);
        return Err(e);
    }
    Ok(manifest)
}

/// Direction cosines of the continuous pixel coordinates, inverse of
/// [`direction_pixel_coords`].
pub fn pixel_coords_direction(i: f64, j: f64) -> Option<Vec3> {
    let half = MAP_SIZE as f64 / 2.0;
    let (u, v) = ((i + 0.5) / half - 1.0, (j + 0.5) / half - 1.0);
    let r2 = u * u + v * v;
    (r2 <= 1.0).then(|| Vec3::new(u, v, (1.0 - r2).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{peak_offset, CentroidParams};
    use crate::reconstruction::pixel_angle_deg;

    #[test]
    fn split_rule() {
        assert_eq!(split_sizes(1000), [640, 160, 200]);
        assert_eq!(split_sizes(10), [6, 2, 2]);
        assert_eq!(split_sizes(1), [1, 0, 0]);
        assert_eq!(split_sizes(3), [2, 0, 1]);
        for n in 1..200 {
            let s = split_sizes(n);
            assert_eq!(s.iter().sum::<usize>(), n);
            let counts = Split::ALL.map(|sp| (0..n).filter(|&i| split_for_index(i, n) == sp).count());
            assert_eq!(counts, s);
        }
    }

    #[test]
    fn zenith_target() {
        let m = make_truth_map(&Vec3::z(), 2.0).unwrap();
        assert_eq!(m.max(), 1.0);
        let (i, j) = direction_to_pixel(&Vec3::z()).unwrap();
        assert!(m.get(i, j) > 0.8);
        assert_eq!(m.get(127, 127), m.get(128, 128));
    }

    #[test]
    fn delta_target() {
        let d = Vec3::new(0.3, -0.2, 0.9).normalize();
        let m = make_truth_map(&d, 0.0).unwrap();
        let (i, j) = direction_to_pixel(&d).unwrap();
        assert_eq!(m.get(i, j), 1.0);
        assert_eq!(m.sum(), 1.0);
        let thin = make_truth_map(&d, 0.05).unwrap();
        assert_eq!(thin.get(i, j), 1.0);
        assert!(thin.sum() < 1.0 + 1e-6);
        assert!(make_truth_map(&-Vec3::z(), 2.0).is_err());
    }

    #[test]
    fn target_centroid_matches_direction() {
        let mut rng = rng_from_seed(99);
        for _ in 0..50 {
            let d = sample_source_direction(30.0, &mut rng);
            let m = make_truth_map(&d, 2.0).unwrap();
            for p in [CentroidParams::PLAIN, CentroidParams::default()] {
                let off = peak_offset(&m, &d, &p).unwrap();
                assert!(off < 0.25 * pixel_angle_deg(), "{off}");
            }
        }
    }

    #[test]
    fn run_ids() {
        assert_eq!(run_id(30.0, 7), "t30s_00007");
        assert_eq!(run_id(0.5, 12), "t0p5s_00012");
    }

    #[test]
    fn config_validation() {
        assert!(SimulationConfig::default().validate().is_ok());
        let c = SimulationConfig { durations_s: vec![0.0], ..Default::default() };
        assert!(c.validate().is_err());
        let c = SimulationConfig { durations_s: vec![1.0, 1.0], ..Default::default() };
        assert!(c.validate().is_err());
        assert!(SimulationConfig::from_json(r#"{"runs": 5, "bogus": 1}"#).is_err());
        let c = SimulationConfig::from_json(r#"{"runs": 5, "durations_s": [2]}"#).unwrap();
        assert_eq!((c.runs, c.durations_s.clone()), (5, vec![2.0]));
    }

    #[test]
    fn pixel_coords_roundtrip() {
        let d = Vec3::new(-0.4, 0.25, 0.8).normalize();
        let (i, j) = direction_pixel_coords(&d);
        assert!((pixel_coords_direction(i, j).unwrap() - d).norm() < 1e-12);
    }
}
