//! Command-line driver.
//!
//! Every subcommand writes its artifacts into `--out` together with a
//! `manifest.txt` echoing the configuration, the seed, and the library
//! version, so any stochastic output can be reproduced byte for byte by
//! re-running with the recorded values.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use crate::covariance::CovarianceModel;
use crate::envelope::{
    informative_grid, run_gof_pipeline, thinning_sensitivity, FittedModel, GofConfig,
};
use crate::error::{Error, Result};
use crate::fitting::{default_lgcp_init, default_thomas_init, fit_lgcp, fit_thomas, ContrastSpec};
use crate::geometry::{GridMesh, Window};
use crate::io::{
    read_curves, read_pattern, write_curves, write_envelope, write_fit_report, write_fit_trace,
    write_manifest, write_pattern, write_sweep,
};
use crate::process::{
    independent_thinning, simulate_poisson, simulate_thomas, IntensityModel, LgcpParams,
    LgcpSimulator, PointPattern, ThomasParams,
};
use crate::rng::root_rng;
use crate::summaries::{estimate_fgj, estimate_k_inhom, CurveKind, DistanceGrid};

/// Parsed command line.
#[derive(Parser, Debug)]
#[command(
    name = "lgcp-sphere",
    version,
    about = "Point processes on the unit sphere: simulate, summarize, fit, and test"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Simulate a point pattern from a model specification.
    Simulate(SimulateArgs),
    /// Fit Thomas or LGCP parameters to a K curve by minimum contrast.
    Fit(FitArgs),
    /// Estimate K, F, G, and J for a pattern.
    Summarize(SummarizeArgs),
    /// Global rank envelope goodness-of-fit test.
    Envelope(EnvelopeArgs),
    /// Thin a pattern to homogeneity.
    Thin(ThinArgs),
    /// Verify sample-continuity certificates across all covariance families.
    Certify(CertifyArgs),
}

/// Observation window selection shared by the pattern subcommands.
#[derive(Args, Debug)]
pub struct WindowArgs {
    /// Excluded colatitude band `lo,hi` in radians; the window is its
    /// complement. Without it the window is the full sphere.
    #[arg(long, value_name = "LO,HI")]
    pub window_band: Option<String>,
}

impl WindowArgs {
    fn window(&self) -> Result<Window> {
        match &self.window_band {
            None => Ok(Window::full_sphere()),
            Some(pair) => format!("band-complement:{pair}").parse(),
        }
    }

    fn echo(&self) -> String {
        match &self.window_band {
            None => "full-sphere".into(),
            Some(pair) => format!("band-complement:{pair}"),
        }
    }
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Model: `poisson`, `thomas:kappa=..,xi=..`, or
    /// `lgcp:<family>:<params>,sigma2=..`.
    #[arg(long)]
    pub model: String,
    /// Intensity surface `beta0,betax,betay,betaz,gamma`.
    #[arg(long)]
    pub intensity: String,
    #[command(flatten)]
    pub window: WindowArgs,
    /// Mesh nodes for simulating an LGCP driving field.
    #[arg(long, default_value_t = 4098)]
    pub mesh_n: usize,
    #[arg(long)]
    pub seed: u64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// Curve CSV holding a K block (as written by `summarize`).
    pub curve: PathBuf,
    /// Model family to fit: `thomas` or `lgcp`.
    #[arg(long)]
    pub model: String,
    /// Contrast interval: `short`, `long`, or `a,b` in radians.
    #[arg(long, default_value = "long")]
    pub interval: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SummarizeArgs {
    /// Pattern CSV (`theta,phi`).
    pub pattern: PathBuf,
    #[command(flatten)]
    pub window: WindowArgs,
    /// Points per summary grid.
    #[arg(long, default_value_t = 512)]
    pub grid_n: usize,
    /// Intensity surface for the K estimate; defaults to the pattern's
    /// average intensity.
    #[arg(long)]
    pub intensity: Option<String>,
    /// Reference locations for the empty-space function.
    #[arg(long, default_value_t = 2048)]
    pub n_ref: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct EnvelopeArgs {
    /// Pattern CSV (`theta,phi`).
    pub pattern: PathBuf,
    /// Fitted model to test, same grammar as `simulate --model`.
    #[arg(long)]
    pub model: String,
    /// Fitted intensity surface `beta0,betax,betay,betaz,gamma`.
    #[arg(long)]
    pub intensity: String,
    #[command(flatten)]
    pub window: WindowArgs,
    #[arg(long)]
    pub seed: u64,
    /// Simulated replicates (use 7497 for the finer p-interval).
    #[arg(long, default_value_t = 2499)]
    pub n_sims: usize,
    /// Points per F/G/J grid; the range adapts to the pattern intensity.
    #[arg(long, default_value_t = 64)]
    pub grid_n: usize,
    /// Test level.
    #[arg(long, default_value_t = 0.05)]
    pub level: f64,
    /// Reference locations for the empty-space function.
    #[arg(long, default_value_t = 2048)]
    pub n_ref: usize,
    /// Mesh nodes for simulating an LGCP model.
    #[arg(long, default_value_t = 4098)]
    pub mesh_n: usize,
    /// Repeat the data thinning this many times and report the p-interval
    /// distribution instead of a single test.
    #[arg(long, value_name = "N")]
    pub sweep: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ThinArgs {
    /// Pattern CSV (`theta,phi`).
    pub pattern: PathBuf,
    /// Intensity surface whose minimum sets the homogeneous target rate.
    #[arg(long)]
    pub intensity: String,
    #[command(flatten)]
    pub window: WindowArgs,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    /// Monte Carlo distances per certificate check.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Random parameter draws per family.
    #[arg(long, default_value_t = 3)]
    pub draws: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Model grammar shared by `simulate` and `envelope`.
fn parse_model(spec: &str) -> Result<FittedModel> {
    if spec == "poisson" {
        return Ok(FittedModel::Poisson);
    }
    if let Some(rest) = spec.strip_prefix("thomas:") {
        return Ok(FittedModel::Thomas(rest.parse::<ThomasParams>()?));
    }
    if let Some(rest) = spec.strip_prefix("lgcp:") {
        return Ok(FittedModel::Lgcp(rest.parse::<CovarianceModel>()?));
    }
    Err(Error::InvalidArgument(format!(
        "model '{spec}': expected 'poisson', 'thomas:kappa=..,xi=..', or \
         'lgcp:<family>:<params>'"
    )))
}

fn create_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn open_writer(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn load_pattern(path: &Path, window: Window) -> Result<(PointPattern, usize)> {
    let file = File::open(path)?;
    read_pattern(BufReader::new(file), window)
}

fn base_manifest<'a>(command: &'a str, seed: Option<u64>) -> Vec<(&'a str, String)> {
    let mut entries = vec![
        ("command", command.to_string()),
        ("version", env!("CARGO_PKG_VERSION").to_string()),
    ];
    if let Some(seed) = seed {
        entries.push(("seed", seed.to_string()));
    }
    entries
}

/// Executes one subcommand, writing artifacts into its `--out` directory.
pub fn run(config: &RunConfig) -> Result<()> {
    match &config.command {
        Command::Simulate(args) => simulate(args),
        Command::Fit(args) => fit(args),
        Command::Summarize(args) => summarize(args),
        Command::Envelope(args) => envelope(args),
        Command::Thin(args) => thin(args),
        Command::Certify(args) => certify(args),
    }
}

fn simulate(args: &SimulateArgs) -> Result<()> {
    let window = args.window.window()?;
    let intensity: IntensityModel = args.intensity.parse()?;
    let model = parse_model(&args.model)?;
    let mut rng = root_rng(args.seed);
    let pattern = match &model {
        FittedModel::Poisson => simulate_poisson(
            |u| intensity.evaluate(u),
            intensity.max_intensity(),
            &window,
            &mut rng,
        )?,
        FittedModel::Thomas(params) => simulate_thomas(params, &intensity, &window, &mut rng)?,
        FittedModel::Lgcp(cov) => {
            let mesh = Arc::new(GridMesh::build(args.mesh_n)?);
            let params = LgcpParams::new(intensity, cov.clone());
            LgcpSimulator::new(&params, mesh)?.simulate(&window, &mut rng)?
        }
    };

    create_out_dir(&args.out)?;
    write_pattern(&mut open_writer(&args.out, "pattern.csv")?, &pattern)?;
    let mut entries = base_manifest("simulate", Some(args.seed));
    entries.push(("model", args.model.clone()));
    entries.push(("intensity", args.intensity.clone()));
    entries.push(("window", args.window.echo()));
    entries.push(("mesh_n", args.mesh_n.to_string()));
    entries.push(("n_points", pattern.len().to_string()));
    write_manifest(&mut open_writer(&args.out, "manifest.txt")?, &entries)
}

fn fit(args: &FitArgs) -> Result<()> {
    let curves = read_curves(BufReader::new(File::open(&args.curve)?))?;
    let k_hat = curves
        .iter()
        .find(|c| c.kind() == CurveKind::K)
        .ok_or_else(|| {
            Error::InvalidArgument(format!("{}: no K curve found", args.curve.display()))
        })?;
    let spec = ContrastSpec::from_str(&args.interval)?;
    let result = match args.model.as_str() {
        "thomas" => fit_thomas(k_hat, &spec, &default_thomas_init())?,
        "lgcp" => fit_lgcp(k_hat, &spec, &default_lgcp_init())?,
        other => {
            return Err(Error::InvalidArgument(format!(
                "fit model '{other}': expected 'thomas' or 'lgcp'"
            )))
        }
    };

    create_out_dir(&args.out)?;
    write_fit_report(&mut open_writer(&args.out, "fit.txt")?, &result)?;
    write_fit_trace(&mut open_writer(&args.out, "trace.csv")?, &result)?;
    let mut entries = base_manifest("fit", None);
    entries.push(("model", args.model.clone()));
    entries.push(("interval", spec.to_string()));
    entries.push(("input", args.curve.display().to_string()));
    write_manifest(&mut open_writer(&args.out, "manifest.txt")?, &entries)
}

fn summarize(args: &SummarizeArgs) -> Result<()> {
    let window = args.window.window()?;
    let (pattern, omitted) = load_pattern(&args.pattern, window)?;
    let (intensity, intensity_echo) = match &args.intensity {
        Some(spec) => (spec.parse::<IntensityModel>()?, spec.clone()),
        None => {
            let lambda = pattern.len() as f64 / pattern.window().area();
            (
                IntensityModel::constant(lambda.max(f64::MIN_POSITIVE))?,
                format!("average:{lambda}"),
            )
        }
    };

    let k_grid = DistanceGrid::uniform(0.0, std::f64::consts::FRAC_PI_2, args.grid_n)?;
    let k_hat = estimate_k_inhom(&pattern, |u| intensity.evaluate(u), &k_grid)?;
    let fgj_grid = informative_grid(&pattern, args.grid_n)?;
    let (f, g, j) = estimate_fgj(&pattern, &fgj_grid, args.n_ref)?;

    create_out_dir(&args.out)?;
    write_curves(&mut open_writer(&args.out, "curves.csv")?, &[&k_hat, &f, &g, &j])?;
    let mut entries = base_manifest("summarize", None);
    entries.push(("input", args.pattern.display().to_string()));
    entries.push(("window", args.window.echo()));
    entries.push(("grid_n", args.grid_n.to_string()));
    entries.push(("n_ref", args.n_ref.to_string()));
    entries.push(("intensity", intensity_echo));
    entries.push(("n_points", pattern.len().to_string()));
    entries.push(("n_omitted", omitted.to_string()));
    write_manifest(&mut open_writer(&args.out, "manifest.txt")?, &entries)
}

fn envelope(args: &EnvelopeArgs) -> Result<()> {
    let window = args.window.window()?;
    let (pattern, omitted) = load_pattern(&args.pattern, window)?;
    let intensity: IntensityModel = args.intensity.parse()?;
    let model = parse_model(&args.model)?;
    let config = GofConfig {
        n_sims: args.n_sims,
        level: args.level,
        grid: informative_grid(&pattern, args.grid_n)?,
        n_ref: args.n_ref,
        mesh_nodes: args.mesh_n,
        seed: args.seed,
    };

    create_out_dir(&args.out)?;
    let mut entries = base_manifest("envelope", Some(args.seed));
    entries.push(("model", args.model.clone()));
    entries.push(("intensity", args.intensity.clone()));
    entries.push(("window", args.window.echo()));
    entries.push(("input", args.pattern.display().to_string()));
    entries.push(("n_points", pattern.len().to_string()));
    entries.push(("n_omitted", omitted.to_string()));
    entries.push(("n_sims", args.n_sims.to_string()));
    entries.push(("grid_n", args.grid_n.to_string()));
    entries.push(("level", args.level.to_string()));
    entries.push(("n_ref", args.n_ref.to_string()));
    entries.push(("mesh_n", args.mesh_n.to_string()));

    match args.sweep {
        Some(n_thinnings) => {
            let sweep =
                thinning_sensitivity(&model, &intensity, &pattern, &config, n_thinnings)?;
            write_sweep(&mut open_writer(&args.out, "sweep.csv")?, &sweep)?;
            entries.push(("sweep", n_thinnings.to_string()));
            entries.push(("variance_p_hi", sweep.variance_p_hi().to_string()));
            entries.push(("variance_p_lo", sweep.variance_p_lo().to_string()));
        }
        None => {
            let outcome = run_gof_pipeline(&model, &intensity, &pattern, &config)?;
            write_envelope(
                &mut open_writer(&args.out, "envelope.csv")?,
                &outcome.curves,
                &outcome.envelope,
            )?;
            let mut summary = open_writer(&args.out, "summary.txt")?;
            let lines = [
                ("p_lo", outcome.envelope.p_lo.to_string()),
                ("p_hi", outcome.envelope.p_hi.to_string()),
                ("k_level", outcome.envelope.k_level.to_string()),
                ("level", outcome.envelope.level.to_string()),
                ("rejects", outcome.envelope.rejects().to_string()),
            ];
            write_manifest(&mut summary, &lines)?;
            entries.push(("p_lo", outcome.envelope.p_lo.to_string()));
            entries.push(("p_hi", outcome.envelope.p_hi.to_string()));
        }
    }
    write_manifest(&mut open_writer(&args.out, "manifest.txt")?, &entries)
}

fn thin(args: &ThinArgs) -> Result<()> {
    let window = args.window.window()?;
    let (pattern, omitted) = load_pattern(&args.pattern, window)?;
    let intensity: IntensityModel = args.intensity.parse()?;
    let mut rng = root_rng(args.seed);
    let thinned = independent_thinning(&pattern, &intensity, &mut rng)?;

    create_out_dir(&args.out)?;
    write_pattern(&mut open_writer(&args.out, "thinned.csv")?, &thinned)?;
    let mut entries = base_manifest("thin", Some(args.seed));
    entries.push(("intensity", args.intensity.clone()));
    entries.push(("window", args.window.echo()));
    entries.push(("input", args.pattern.display().to_string()));
    entries.push(("n_before", pattern.len().to_string()));
    entries.push(("n_after", thinned.len().to_string()));
    entries.push(("n_omitted", omitted.to_string()));
    write_manifest(&mut open_writer(&args.out, "manifest.txt")?, &entries)
}

fn certify(args: &CertifyArgs) -> Result<()> {
    if args.draws == 0 {
        return Err(Error::InvalidArgument("need at least one draw".into()));
    }
    create_out_dir(&args.out)?;
    let mut csv = open_writer(&args.out, "certificates.csv")?;
    {
        use std::io::Write;
        writeln!(csv, "family,draw,model,s,ell,m,verified")?;
    }
    let mut rng = root_rng(args.seed);
    let mut failures = 0usize;
    for family in CovarianceModel::FAMILY_NAMES {
        for draw in 0..args.draws {
            let model = CovarianceModel::sample_valid(family, &mut rng)?;
            let cert = model.holder_certificate();
            let ok = model.verify_certificate(&cert, args.samples);
            if !ok {
                failures += 1;
            }
            use std::io::Write;
            writeln!(
                csv,
                "{family},{draw},{model},{},{},{},{ok}",
                cert.s, cert.ell, cert.m
            )?;
        }
    }
    let mut entries = base_manifest("certify", Some(args.seed));
    entries.push(("samples", args.samples.to_string()));
    entries.push(("draws", args.draws.to_string()));
    entries.push(("failures", failures.to_string()));
    write_manifest(&mut open_writer(&args.out, "manifest.txt")?, &entries)?;
    if failures > 0 {
        return Err(Error::InvalidModel(format!(
            "{failures} certificate checks failed; see certificates.csv"
        )));
    }
    Ok(())
}
