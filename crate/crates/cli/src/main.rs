//! `ccbox`: simulate datasets, back-project sky maps, score predictions and
//! export PNGs.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 1 runtime failure.

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use ccbox::dataset::{
    export_png, generate_dataset, read_events, read_image, read_map, read_truth, records_from_rows, split_sizes,
    with_jobs, write_map, Colormap, DatasetManifest, RunEntry, SimulationConfig, Split, COMPTON_FILE, EVENTS_FILE,
    MANIFEST_FILE, PINHOLE_FILE, TARGET_FILE,
};
use ccbox::geometry::DetectorGeometry;
use ccbox::metrics::{mse, peak_offset, ssim, summarize_runs, CentroidParams, RunMetrics, SsimParams};
use ccbox::reconstruction::{arm_filter, combine_maps, reconstruct, Mode, SkyMap};

#[derive(Parser)]
#[command(name = "ccbox", version, about = "Compton-camera simulation, back-projection and evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a dataset of burst runs.
    Simulate(SimulateArgs),
    /// Re-run back-projection over every run of a dataset.
    Reconstruct(ReconstructArgs),
    /// Score predicted maps (default: back-projection maps) against targets.
    Evaluate(EvaluateArgs),
    /// Export sky maps as PNG images.
    Plot(PlotArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON simulation config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Burst duration(s) in seconds; repeat or comma-separate.
    #[arg(long = "duration", value_delimiter = ',', value_parser = positive_f64)]
    durations: Vec<f64>,
    /// Runs per duration.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    runs: Option<u64>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Burst flux in photons/cm²/s.
    #[arg(long, value_parser = non_negative_f64)]
    flux: Option<f64>,
    /// Disable the CXB and albedo backgrounds.
    #[arg(long)]
    no_background: bool,
    /// Output dataset directory (created if absent).
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    jobs: Jobs,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Dataset directory.
    dataset: PathBuf,
    /// Which maps to rebuild; the other kind is left untouched.
    #[arg(long, default_value = "both", value_parser = parse_mode)]
    mode: Mode,
    /// Keep Compton events whose ARM is within this window, e.g. `10deg`,
    /// `0.1rad`; a bare number is in degrees. Needs `--source-from-truth`.
    #[arg(long, value_parser = parse_angle)]
    arm_window: Option<f64>,
    /// Use the true burst direction of each run as the ARM reference.
    #[arg(long)]
    source_from_truth: bool,
    /// Only this split.
    #[arg(long, value_parser = parse_split)]
    split: Option<Split>,
    #[command(flatten)]
    jobs: Jobs,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Dataset directory.
    dataset: PathBuf,
    /// Directory of CCIMG001 predictions named `<run id>.img` (or
    /// `<split>/<run id>.img`). Without it the stored back-projection maps
    /// are scored.
    #[arg(long)]
    predictions: Option<PathBuf>,
    /// Back-projection map to score when no predictions are given.
    #[arg(long, default_value = "both", value_parser = parse_mode)]
    mode: Mode,
    /// Only this split (default: all runs).
    #[arg(long, value_parser = parse_split)]
    split: Option<Split>,
    /// Write the JSON report here (parents created if absent).
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    jobs: Jobs,
}

#[derive(Args)]
struct PlotArgs {
    /// CCIMG001 map files.
    #[arg(long = "map", required = true)]
    maps: Vec<PathBuf>,
    /// Output directory; each map becomes `<file stem>.png`.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "gray")]
    colormap: Colormap,
}

#[derive(Args)]
struct Jobs {
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,
}

impl Jobs {
    fn get(&self) -> usize {
        self.jobs.map_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()), |j| j as usize)
    }
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("must be positive, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

fn non_negative_f64(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("must be non-negative, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    match s {
        "compton" => Ok(Mode::Compton),
        "pinhole" => Ok(Mode::Pinhole),
        "both" => Ok(Mode::Both),
        _ => Err(format!("expected compton, pinhole or both, got '{s}'")),
    }
}

fn parse_split(s: &str) -> Result<Split, String> {
    s.parse::<Split>().map_err(|e| e.to_string())
}

/// Angle with an optional `deg` or `rad` suffix, returned in radians.
fn parse_angle(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let (num, to_rad) = if let Some(n) = s.strip_suffix("deg") {
        (n, true)
    } else if let Some(n) = s.strip_suffix("rad") {
        (n, false)
    } else {
        (s, true)
    };
    let v: f64 = num.trim().parse().map_err(|e| format!("bad angle '{s}': {e}"))?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(format!("angle must be positive, got '{s}'"));
    }
    Ok(if to_rad { v.to_radians() } else { v })
}

/// Error carrying its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

type CmdResult<T = ()> = Result<T, Failure>;

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 2, error: e.into() }
}

fn runtime(e: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 1, error: e.into() }
}

/// Bad inputs are usage errors; everything else is a runtime failure.
fn classify(e: ccbox::Error) -> Failure {
    use ccbox::Error::*;
    match e {
        Parameter(_) | Geometry(_) | DimensionMismatch(_) | Format(_) | Json(_) => usage(e),
        _ => runtime(e),
    }
}

trait Classify<T> {
    fn or_fail(self, what: impl Display) -> CmdResult<T>;
}

impl<T> Classify<T> for ccbox::Result<T> {
    fn or_fail(self, what: impl Display) -> CmdResult<T> {
        self.map_err(|e| {
            let f = classify(e);
            Failure { code: f.code, error: f.error.context(what.to_string()) }
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Reconstruct(a) => reconstruct_cmd(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Plot(a) => plot(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn simulate(args: SimulateArgs) -> CmdResult {
    let mut config = match &args.config {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(usage)?;
            let value: SimulationConfig =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display())).map_err(usage)?;
            value
        }
        None => SimulationConfig::default(),
    };
    if !args.durations.is_empty() {
        config.durations_s = args.durations.clone();
    }
    if let Some(r) = args.runs {
        config.runs = r as usize;
    }
    if let Some(s) = args.seed {
        config.master_seed = s;
    }
    if let Some(f) = args.flux {
        config.flux = f;
    }
    if args.no_background {
        config.background.enabled = false;
    }
    config.validate().or_fail("invalid configuration")?;

    let manifest = generate_dataset(&config, &args.out, args.jobs.get()).or_fail("simulation failed")?;
    let [tr, va, te] = split_sizes(config.runs);
    println!(
        "wrote {} runs ({} per duration: {tr} train / {va} val / {te} test) to {}",
        manifest.runs.len(),
        config.runs,
        args.out.display()
    );
    Ok(())
}

fn load_dataset(root: &Path) -> CmdResult<DatasetManifest> {
    if !root.join(MANIFEST_FILE).is_file() {
        return Err(usage(anyhow!("{} is not a dataset (no {MANIFEST_FILE})", root.display())));
    }
    DatasetManifest::load(root).or_fail(format!("loading {}", root.display()))
}

fn reconstruct_cmd(args: ReconstructArgs) -> CmdResult {
    if args.arm_window.is_some() && !args.source_from_truth {
        return Err(usage(anyhow!("--arm-window needs a reference direction; pass --source-from-truth")));
    }
    let manifest = load_dataset(&args.dataset)?;
    let geometry = DetectorGeometry::from_params(manifest.config.geometry.clone()).or_fail("dataset geometry")?;
    let cfg = manifest.config.stored_map_config();
    let thresholds = cfg.thresholds;
    let runs: Vec<&RunEntry> = manifest.runs_in(args.split).collect();

    let work = |entry: &RunEntry| -> CmdResult<(usize, usize)> {
        let dir = manifest.run_dir(&args.dataset, entry);
        let rows = read_events(&dir.join(EVENTS_FILE)).or_fail(format!("run {}", entry.id))?;
        let mut events = records_from_rows(&rows, &manifest.normalization);
        let total = events.len();
        if let Some(window) = args.arm_window {
            let truth = read_truth(&dir).or_fail(format!("run {}", entry.id))?;
            events = arm_filter(&events, &truth.direction, window, &thresholds);
        }
        let maps = reconstruct(events.iter(), args.mode, &cfg, &geometry);
        if args.mode.compton() {
            write_map(&dir.join(COMPTON_FILE), &maps.compton).or_fail(format!("run {}", entry.id))?;
        }
        if args.mode.pinhole() {
            write_map(&dir.join(PINHOLE_FILE), &maps.pinhole).or_fail(format!("run {}", entry.id))?;
        }
        Ok((events.len(), total))
    };
    let counts = with_jobs(args.jobs.get(), || runs.par_iter().map(|e| work(e)).collect::<CmdResult<Vec<_>>>())
        .or_fail("thread pool")??;
    let (kept, total) = counts.iter().fold((0, 0), |(a, b), (k, t)| (a + k, b + t));
    println!(
        "reconstructed {} runs ({} maps): {kept} of {total} events accepted",
        runs.len(),
        match args.mode {
            Mode::Compton => "compton",
            Mode::Pinhole => "pinhole",
            Mode::Both => "compton and pinhole",
        }
    );
    Ok(())
}

fn prediction_path(dir: &Path, entry: &RunEntry) -> Option<PathBuf> {
    let flat = dir.join(format!("{}.img", entry.id));
    let nested = dir.join(entry.split.name()).join(format!("{}.img", entry.id));
    [flat, nested].into_iter().find(|p| p.is_file())
}

fn evaluate(args: EvaluateArgs) -> CmdResult {
    let manifest = load_dataset(&args.dataset)?;
    if let Some(p) = &args.predictions {
        if !p.is_dir() {
            return Err(usage(anyhow!("prediction directory {} does not exist", p.display())));
        }
    }
    let runs: Vec<&RunEntry> = manifest.runs_in(args.split).collect();
    if runs.is_empty() {
        return Err(usage(anyhow!("no runs selected")));
    }
    let ssim_params = SsimParams::default();
    let centroid = CentroidParams::default();

    let score = |entry: &RunEntry| -> CmdResult<RunMetrics> {
        let dir = manifest.run_dir(&args.dataset, entry);
        let ctx = || format!("run {}", entry.id);
        let target = read_map(&dir.join(TARGET_FILE)).or_fail(ctx())?;
        let truth = read_truth(&dir).or_fail(ctx())?;
        let pred: SkyMap = match &args.predictions {
            Some(p) => {
                let path = prediction_path(p, entry)
                    .ok_or_else(|| usage(anyhow!("no prediction for run {} in {}", entry.id, p.display())))?;
                let image = read_image(&path).or_fail(path.display())?;
                image.to_map_clipped().or_fail(path.display())?
            }
            None => {
                let c = read_map(&dir.join(COMPTON_FILE)).or_fail(ctx())?;
                let p = read_map(&dir.join(PINHOLE_FILE)).or_fail(ctx())?;
                match args.mode {
                    Mode::Compton => c.normalized(),
                    Mode::Pinhole => p.normalized(),
                    Mode::Both => combine_maps(&c, &p),
                }
            }
        };
        // An empty prediction points nowhere: score it as maximally wrong.
        let offset = match peak_offset(&pred, &truth.direction, &centroid) {
            Ok(o) => o,
            Err(ccbox::Error::EmptyMap) => 180.0,
            Err(e) => return Err(classify(e)),
        };
        Ok(RunMetrics {
            id: entry.id.clone(),
            mse: mse(&pred, &target).or_fail(ctx())?,
            ssim: ssim(&pred, &target, &ssim_params).or_fail(ctx())?,
            peak_offset_deg: offset,
        })
    };
    let metrics = with_jobs(args.jobs.get(), || runs.par_iter().map(|e| score(e)).collect::<CmdResult<Vec<_>>>())
        .or_fail("thread pool")??;
    let report = summarize_runs(&metrics).or_fail("summarizing")?;
    print!("{}", report.to_table());
    if let Some(path) = &args.report {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).map_err(runtime)?;
        }
        let json = report.to_json().or_fail("serializing report")?;
        fs::write(path, json).with_context(|| format!("writing {}", path.display())).map_err(runtime)?;
    }
    Ok(())
}

fn plot(args: PlotArgs) -> CmdResult {
    for path in &args.maps {
        if !path.is_file() {
            return Err(usage(anyhow!("map {} does not exist", path.display())));
        }
    }
    fs::create_dir_all(&args.out).map_err(runtime)?;
    for path in &args.maps {
        let map = read_map(path).or_fail(path.display())?;
        let stem = path.file_stem().map_or_else(|| "map".into(), |s| s.to_string_lossy().into_owned());
        let out = args.out.join(format!("{stem}.png"));
        export_png(&map, &out, args.colormap).or_fail(out.display())?;
        println!("{}", out.display());
    }
    Ok(())
}
