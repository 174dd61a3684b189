//! Command-line surface for fractal transformations between IFS attractors.
//!
//! Every subcommand prints a run manifest as `key=value` lines on standard
//! output, including a sha256 of each written file, so runs can be compared
//! byte-for-byte. Exit status: 0 on success, 1 on configuration or usage
//! problems, 2 on numeric failures (mask gaps, degenerate denominators,
//! points without a usable inverse).

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use ifswarp::config::{self, BuiltConfig, PRESET_NAMES};
use ifswarp::error::{Error, Result};
use ifswarp::imaging::{
    color_steal, decode_measure, encode_measure, fractal_filter, pack_masked, unpack_masked,
    MeasureSource, Picture,
};
use ifswarp::render::{render_attractor_density, render_repeller_escape};
use ifswarp::transform::compute_p_star;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "ifswarp",
    version,
    about = "Fractal transformations between IFS attractors",
    max_term_width = 100
)]
struct Cli {
    /// Cap the data-parallel raster loops at this many threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Warp a picture through a named transform pair.
    Transform(TransformArgs),
    /// Paint a drawing attractor with colors stolen from a palette picture.
    Steal(StealArgs),
    /// Apply the idempotent fractal filter: warp, discretize, warp back.
    Filter(FilterArgs),
    /// Pack pictures into one canvas, one mask threshold per picture.
    Pack(PackArgs),
    /// Recover one packed picture by its mask threshold.
    Unpack(UnpackArgs),
    /// Encode pictures onto a carrier attractor with coupled chaos games.
    Encode(EncodeArgs),
    /// Decode a measure-encoded picture by replaying a coupled chaos game.
    Decode(DecodeArgs),
    /// Escape-time render of the overlap repeller for ratios (a, b).
    RenderRepeller(RenderRepellerArgs),
    /// Grayscale chaos-game density render of a configured system.
    RenderAttractor(RenderAttractorArgs),
    /// Estimate the measure-balancing mask threshold for ratios (a, b).
    Pstar(PstarArgs),
    /// Parse and build a config, reporting the first problem found.
    ValidateConfig(ValidateArgs),
}

/// Where the systems come from: a config file or a built-in preset.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct ConfigSource {
    /// Config file declaring systems, masks, probabilities, and pairs.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Name of a built-in preset (see `validate-config --preset help`).
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
}

impl ConfigSource {
    fn load(&self) -> Result<(String, BuiltConfig)> {
        let (label, text) = match (&self.config, &self.preset) {
            (Some(path), None) => {
                (path.display().to_string(), std::fs::read_to_string(path)?)
            }
            (None, Some(name)) => match config::preset(name) {
                Some(text) => (format!("preset:{name}"), text.to_string()),
                None => {
                    return Err(Error::InvalidConfig(format!(
                        "unknown preset '{name}'; available: {}",
                        PRESET_NAMES.join(", ")
                    )))
                }
            },
            _ => unreachable!("clap enforces exactly one source"),
        };
        let built = config::parse_config(&text)?.build()?;
        Ok((label, built))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Direction {
    Forward,
    Backward,
}

#[derive(Args)]
struct TransformArgs {
    #[command(flatten)]
    source: ConfigSource,
    /// Transform pair name within the config.
    #[arg(long, default_value = "main")]
    pair: String,
    /// Which of the pair's two directions moves the picture.
    #[arg(long, value_enum, default_value_t = Direction::Forward)]
    direction: Direction,
    #[arg(long, value_name = "PNG")]
    input: PathBuf,
    /// Output resolution; defaults to the input width.
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long, value_name = "PNG")]
    out: PathBuf,
}

#[derive(Args)]
struct StealArgs {
    #[command(flatten)]
    source: ConfigSource,
    /// Drawing system name.
    #[arg(long, default_value = "drawing")]
    system: String,
    /// Mask name for the drawing system's section.
    #[arg(long, default_value = "drawing")]
    mask: String,
    /// Palette system name.
    #[arg(long, default_value = "palette")]
    palette_system: String,
    /// Palette picture.
    #[arg(long, value_name = "PNG")]
    palette: PathBuf,
    #[arg(long, default_value_t = 512)]
    resolution: usize,
    #[arg(long, value_name = "PNG")]
    out: PathBuf,
}

#[derive(Args)]
struct FilterArgs {
    #[command(flatten)]
    source: ConfigSource,
    #[arg(long, default_value = "main")]
    pair: String,
    #[arg(long, value_name = "PNG")]
    input: PathBuf,
    /// Discretization grid; defaults to the input resolution.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, value_name = "PNG")]
    out: PathBuf,
}

#[derive(Args)]
struct PackArgs {
    #[command(flatten)]
    source: ConfigSource,
    /// Mask-template system name.
    #[arg(long, default_value = "f")]
    f: String,
    /// Coding-side system name.
    #[arg(long, default_value = "g")]
    g: String,
    /// Source pictures, one per threshold, in matching order.
    #[arg(long, value_name = "PNG", required = true)]
    input: Vec<PathBuf>,
    /// Mask thresholds, one per input picture.
    #[arg(long, value_name = "REAL", required = true)]
    p: Vec<f64>,
    #[arg(long, default_value_t = 512)]
    resolution: usize,
    #[arg(long, default_value_t = 4)]
    supersample: usize,
    #[arg(long, value_name = "PNG")]
    out: PathBuf,
}

#[derive(Args)]
struct UnpackArgs {
    #[command(flatten)]
    source: ConfigSource,
    #[arg(long, default_value = "f")]
    f: String,
    #[arg(long, default_value = "g")]
    g: String,
    /// The packed canvas.
    #[arg(long, value_name = "PNG")]
    combined: PathBuf,
    /// Mask threshold the wanted picture was packed under.
    #[arg(long, value_name = "REAL")]
    p: f64,
    /// Output resolution; defaults to the canvas width.
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long, value_name = "PNG")]
    out: PathBuf,
}

#[derive(Args)]
struct EncodeArgs {
    #[command(flatten)]
    source: ConfigSource,
    /// Carrier system name.
    #[arg(long, default_value = "h")]
    carrier: String,
    /// Source pictures, in the order they paint the carrier.
    #[arg(long, value_name = "PNG", required = true)]
    input: Vec<PathBuf>,
    /// Source system names, one per input.
    #[arg(long, value_name = "NAME", required = true)]
    system: Vec<String>,
    /// Probability vector names, one per input.
    #[arg(long, value_name = "NAME", required = true)]
    probs: Vec<String>,
    /// Orbit lengths, one per input.
    #[arg(long, value_name = "N", required = true)]
    iterations: Vec<usize>,
    #[arg(long, default_value_t = 512)]
    resolution: usize,
    /// Orbit seed; defaults to the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_name = "PNG")]
    out: PathBuf,
}

#[derive(Args)]
struct DecodeArgs {
    #[command(flatten)]
    source: ConfigSource,
    /// The encoded carrier picture.
    #[arg(long, value_name = "PNG")]
    encoded: PathBuf,
    /// Source system to decode through.
    #[arg(long, value_name = "NAME")]
    system: String,
    /// Probability vector name.
    #[arg(long, value_name = "NAME")]
    probs: String,
    #[arg(long, default_value = "h")]
    carrier: String,
    #[arg(long, value_name = "N")]
    iterations: usize,
    /// Orbit seed; defaults to the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 512)]
    resolution: usize,
    #[arg(long, value_name = "PNG")]
    out: PathBuf,
}

#[derive(Args)]
struct RenderRepellerArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long, default_value_t = 512)]
    resolution: usize,
    #[arg(long, default_value_t = 64)]
    max_iter: usize,
    #[arg(long, value_name = "PNG")]
    out: PathBuf,
}

#[derive(Args)]
struct RenderAttractorArgs {
    #[command(flatten)]
    source: ConfigSource,
    #[arg(long, value_name = "NAME")]
    system: String,
    /// Probability vector name; uniform weights when absent.
    #[arg(long, value_name = "NAME")]
    probs: Option<String>,
    /// Chaos-game orbit length.
    #[arg(long, default_value_t = 1_000_000)]
    n: usize,
    /// Orbit seed; defaults to the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 512)]
    resolution: usize,
    #[arg(long, value_name = "PNG")]
    out: PathBuf,
}

#[derive(Args)]
struct PstarArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long, default_value_t = 4096)]
    resolution: usize,
    #[arg(long, default_value_t = 40)]
    iterations: usize,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    source: ConfigSource,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let line = e.to_string();
            eprintln!("error: {}", line.lines().next().unwrap_or("bad arguments"));
            return ExitCode::from(1);
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 || rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("error: cannot build a {n}-thread pool");
            return ExitCode::from(1);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numeric() { 2 } else { 1 })
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Transform(args) => run_transform(args),
        Command::Steal(args) => run_steal(args),
        Command::Filter(args) => run_filter(args),
        Command::Pack(args) => run_pack(args),
        Command::Unpack(args) => run_unpack(args),
        Command::Encode(args) => run_encode(args),
        Command::Decode(args) => run_decode(args),
        Command::RenderRepeller(args) => run_render_repeller(args),
        Command::RenderAttractor(args) => run_render_attractor(args),
        Command::Pstar(args) => run_pstar(args),
        Command::ValidateConfig(args) => run_validate(args),
    }
}

/// Writes the picture, then prints `out=` and `out_sha256=` manifest lines
/// hashing the bytes actually on disk.
fn save_output(picture: &Picture, path: &Path) -> Result<()> {
    picture.save_png(path)?;
    let bytes = std::fs::read(path)?;
    println!("out={}", path.display());
    println!("out_sha256={:x}", Sha256::digest(&bytes));
    Ok(())
}

fn join<T: ToString>(values: &[T]) -> String {
    values.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn run_transform(args: TransformArgs) -> Result<()> {
    let (label, built) = args.source.load()?;
    let pair = built.pair(&args.pair)?;
    let input = Picture::load_png(&args.input)?;
    let resolution = args.resolution.unwrap_or_else(|| input.width());
    let out = match args.direction {
        Direction::Forward => pair.warp_picture(&input, resolution),
        Direction::Backward => pair.unwarp_picture(&input, resolution),
    };
    println!("command=transform");
    println!("config={label}");
    println!("pair={}", args.pair);
    println!(
        "direction={}",
        match args.direction {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        }
    );
    println!("depth={}", pair.depth());
    println!("resolution={resolution}");
    save_output(&out, &args.out)
}

fn run_steal(args: StealArgs) -> Result<()> {
    let (label, built) = args.source.load()?;
    let drawing = built.section(&args.system, &args.mask)?;
    let palette_ifs = built.system(&args.palette_system)?;
    let palette = Picture::load_png(&args.palette)?;
    let out = color_steal(&drawing, palette_ifs, &palette, args.resolution)?;
    println!("command=steal");
    println!("config={label}");
    println!("system={}", args.system);
    println!("mask={}", args.mask);
    println!("palette_system={}", args.palette_system);
    println!("depth={}", drawing.depth());
    println!("resolution={}", args.resolution);
    save_output(&out, &args.out)
}

fn run_filter(args: FilterArgs) -> Result<()> {
    let (label, built) = args.source.load()?;
    let pair = built.pair(&args.pair)?;
    let input = Picture::load_png(&args.input)?;
    let grid = args.grid.unwrap_or_else(|| input.width());
    let out = fractal_filter(&input, pair, grid)?;
    println!("command=filter");
    println!("config={label}");
    println!("pair={}", args.pair);
    println!("depth={}", pair.depth());
    println!("grid={grid}");
    save_output(&out, &args.out)
}

fn run_pack(args: PackArgs) -> Result<()> {
    let (label, built) = args.source.load()?;
    if args.input.len() != args.p.len() {
        return Err(Error::InvalidConfig(format!(
            "{} inputs but {} thresholds",
            args.input.len(),
            args.p.len()
        )));
    }
    let f = built.system(&args.f)?;
    let g = built.system(&args.g)?;
    let mut sources = Vec::with_capacity(args.input.len());
    for (path, &p) in args.input.iter().zip(&args.p) {
        sources.push((Picture::load_png(path)?, p));
    }
    let (canvas, collisions) =
        pack_masked(&sources, f, g, args.resolution, args.supersample)?;
    println!("command=pack");
    println!("config={label}");
    println!("f={}", args.f);
    println!("g={}", args.g);
    println!("thresholds={}", join(&args.p));
    println!("resolution={}", args.resolution);
    println!("supersample={}", args.supersample);
    println!("collisions={collisions:.6}");
    save_output(&canvas, &args.out)
}

fn run_unpack(args: UnpackArgs) -> Result<()> {
    let (label, built) = args.source.load()?;
    let f = built.system(&args.f)?;
    let g = built.system(&args.g)?;
    let combined = Picture::load_png(&args.combined)?;
    let resolution = args.resolution.unwrap_or_else(|| combined.width());
    let out = unpack_masked(&combined, args.p, f, g, resolution)?;
    println!("command=unpack");
    println!("config={label}");
    println!("f={}", args.f);
    println!("g={}", args.g);
    println!("threshold={}", args.p);
    println!("resolution={resolution}");
    save_output(&out, &args.out)
}

fn run_encode(args: EncodeArgs) -> Result<()> {
    let (label, built) = args.source.load()?;
    let count = args.input.len();
    if args.system.len() != count || args.probs.len() != count || args.iterations.len() != count
    {
        return Err(Error::InvalidConfig(format!(
            "encode needs matching flag counts: {} inputs, {} systems, {} probs, {} iterations",
            count,
            args.system.len(),
            args.probs.len(),
            args.iterations.len()
        )));
    }
    let seed = args.seed.unwrap_or(built.seed);
    let mut sources = Vec::with_capacity(count);
    for i in 0..count {
        sources.push(MeasureSource {
            picture: Picture::load_png(&args.input[i])?,
            ifs: built.system(&args.system[i])?.clone(),
            probs: built.probs(&args.probs[i])?.clone(),
            iterations: args.iterations[i],
        });
    }
    let carrier = built.system(&args.carrier)?;
    let out = encode_measure(&sources, carrier, args.resolution, seed)?;
    println!("command=encode");
    println!("config={label}");
    println!("carrier={}", args.carrier);
    println!("systems={}", join(&args.system));
    println!("probs={}", join(&args.probs));
    println!("iterations={}", join(&args.iterations));
    println!("seed={seed}");
    println!("resolution={}", args.resolution);
    save_output(&out, &args.out)
}

fn run_decode(args: DecodeArgs) -> Result<()> {
    let (label, built) = args.source.load()?;
    let encoded = Picture::load_png(&args.encoded)?;
    let seed = args.seed.unwrap_or(built.seed);
    let out = decode_measure(
        &encoded,
        built.system(&args.system)?,
        built.probs(&args.probs)?,
        built.system(&args.carrier)?,
        args.iterations,
        seed,
        args.resolution,
    )?;
    println!("command=decode");
    println!("config={label}");
    println!("system={}", args.system);
    println!("probs={}", args.probs);
    println!("carrier={}", args.carrier);
    println!("iterations={}", args.iterations);
    println!("seed={seed}");
    println!("resolution={}", args.resolution);
    save_output(&out, &args.out)
}

fn run_render_repeller(args: RenderRepellerArgs) -> Result<()> {
    let out = render_repeller_escape(args.a, args.b, args.resolution, args.max_iter)?;
    println!("command=render-repeller");
    println!("a={}", args.a);
    println!("b={}", args.b);
    println!("resolution={}", args.resolution);
    println!("max_iter={}", args.max_iter);
    save_output(&out, &args.out)
}

fn run_render_attractor(args: RenderAttractorArgs) -> Result<()> {
    let (label, built) = args.source.load()?;
    let ifs = built.system(&args.system)?;
    let probs = match &args.probs {
        Some(name) => built.probs(name)?.clone(),
        None => ifswarp::ifs::ProbabilityVector::uniform(ifs.len()),
    };
    let seed = args.seed.unwrap_or(built.seed);
    let out = render_attractor_density(ifs, &probs, args.n, seed, args.resolution)?;
    println!("command=render-attractor");
    println!("config={label}");
    println!("system={}", args.system);
    println!(
        "probs={}",
        args.probs.as_deref().unwrap_or("uniform")
    );
    println!("n={}", args.n);
    println!("seed={seed}");
    println!("resolution={}", args.resolution);
    save_output(&out, &args.out)
}

fn run_pstar(args: PstarArgs) -> Result<()> {
    let p = compute_p_star(args.a, args.b, args.resolution, args.iterations)?;
    println!("command=pstar");
    println!("a={}", args.a);
    println!("b={}", args.b);
    println!("resolution={}", args.resolution);
    println!("iterations={}", args.iterations);
    println!("p_star={p:.6}");
    Ok(())
}

fn run_validate(args: ValidateArgs) -> Result<()> {
    let (label, built) = args.source.load()?;
    println!("command=validate-config");
    println!("config={label}");
    println!("systems={}", join(&built.systems.keys().collect::<Vec<_>>()));
    println!("masks={}", join(&built.masks.keys().collect::<Vec<_>>()));
    println!("probs={}", join(&built.probs.keys().collect::<Vec<_>>()));
    println!("pairs={}", join(&built.pairs.keys().collect::<Vec<_>>()));
    println!("ok=true");
    Ok(())
}
