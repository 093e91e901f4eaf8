use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use radsim_core::dataset::{augment_dataset, generate_dataset, AugmentConfig, GenerateOptions, GenerationConfig};
use radsim_core::imaging::{matched_filter, max_project};
use radsim_core::raytracer::trace_paths;
use radsim_core::scene::{build_planar_array, ArrayLayout, MeshFormat};
use radsim_core::signal::synthesize_if;
use radsim_core::{
    AntennaArray, IfDataCube, MaterialParams, PathSet, RigidPose, Scene, SfcwConfig, TraceConfig, TriangleMesh, Vec3,
    VoxelGrid,
};

mod scaffold;

/// Millimetre-wave radar image simulator.
#[derive(Parser)]
#[command(name = "radsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labelled dataset from a JSON config.
    Generate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides the config's `output_dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write PNG previews next to each image pair.
        #[arg(long)]
        preview_png: bool,
        /// Reuse image files from an interrupted run.
        #[arg(long)]
        resume: bool,
    },
    /// Write augmented copies of a generated dataset.
    Augment {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// JSON augmentation config; defaults are used when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Trace one posed mesh and write its propagation paths.
    Trace(TraceArgs),
    /// Turn a paths file into an IF data cube.
    Synth {
        #[arg(long)]
        paths: PathBuf,
        /// JSON SFCW config; the 72-82 GHz, 128-step default otherwise.
        #[arg(long)]
        sfcw: Option<PathBuf>,
        #[arg(long)]
        spreading_loss: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reconstruct an image pair from an IF cube.
    Image {
        #[arg(long)]
        cube: PathBuf,
        #[command(flatten)]
        array: ArraySource,
        /// JSON voxel grid `{origin, spacing, counts}`.
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        preview_png: bool,
    },
    /// Write the default planar array as JSON.
    Layout {
        #[arg(long)]
        out: PathBuf,
    },
    /// Write eight toy class meshes and a matching small config.
    Scaffold {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ArraySource {
    /// Antenna array JSON (`{tx, rx}`); the default planar array otherwise.
    #[arg(long)]
    array: Option<PathBuf>,
}

impl ArraySource {
    fn load(&self) -> Result<AntennaArray> {
        Ok(match &self.array {
            Some(p) => AntennaArray::load_json(p)?,
            None => build_planar_array(&ArrayLayout::default())?,
        })
    }
}

#[derive(Args)]
struct TraceArgs {
    #[arg(long)]
    mesh: PathBuf,
    #[command(flatten)]
    array: ArraySource,
    /// Azimuth, elevation, roll in degrees, comma separated.
    #[arg(long, value_parser = parse_view, default_value = "0,0,0", allow_hyphen_values = true)]
    view: [f64; 3],
    /// Distance from the array centroid to the mesh center, metres.
    #[arg(long, default_value_t = 0.30)]
    standoff: f64,
    #[arg(long, default_value_t = 0.3)]
    alpha: f64,
    #[arg(long, default_value_t = 100_000)]
    rays: u64,
    #[arg(long, default_value_t = 3)]
    bounces: u32,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn parse_view(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    parts
        .try_into()
        .map_err(|_| "expected three comma-separated angles".to_string())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn run_trace(args: &TraceArgs) -> Result<()> {
    let Some(format) = MeshFormat::from_path(&args.mesh) else {
        bail!("{}: expected a .obj or .stl mesh", args.mesh.display());
    };
    let mesh = TriangleMesh::load(&args.mesh, format)?.centered();
    let array = args.array.load()?;
    let target = array.centroid() + Vec3::new(0.0, 0.0, args.standoff);
    let pose = RigidPose::from_view_angles_deg(args.view[0], args.view[1], args.view[2], target);
    let scene = Scene::new(mesh.transformed(&pose)?, array, MaterialParams::new(args.alpha)?)?;
    let config = TraceConfig {
        rays_per_tx: args.rays,
        max_bounces: args.bounces,
        perception_radius: args.radius,
        rng_seed: args.seed,
    };
    let paths = trace_paths(&scene, &config)?;
    for w in &paths.meta().warnings {
        eprintln!("warning: {w}");
    }
    paths.write(&args.out)?;
    println!("{} paths from {} rays", paths.len(), paths.meta().rays_launched);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate {
            config,
            out,
            preview_png,
            resume,
        } => {
            let cfg = GenerationConfig::load(&config)?;
            let opts = GenerateOptions {
                output_dir: out,
                preview_png,
                resume,
            };
            let report = generate_dataset(&cfg, &opts)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            println!(
                "wrote {} samples to {} ({} reused)",
                report.entries.len(),
                report.output_dir.display(),
                report.reused
            );
        }
        Command::Augment {
            input,
            out,
            seed,
            config,
        } => {
            let cfg = match config {
                Some(p) => read_json(&p)?,
                None => AugmentConfig::default(),
            };
            let entries = augment_dataset(&input, &out, &cfg, seed)?;
            println!("augmented {} samples into {}", entries.len(), out.display());
        }
        Command::Trace(args) => run_trace(&args)?,
        Command::Synth {
            paths,
            sfcw,
            spreading_loss,
            out,
        } => {
            let cfg: SfcwConfig = match sfcw {
                Some(p) => read_json(&p)?,
                None => SfcwConfig::default(),
            };
            let cube = synthesize_if(&PathSet::read(&paths)?, &cfg.with_spreading_loss(spreading_loss))?;
            cube.write(&out)?;
        }
        Command::Image {
            cube,
            array,
            grid,
            out,
            preview_png,
        } => {
            let cube = IfDataCube::read(&cube)?;
            let grid: VoxelGrid = read_json(&grid)?;
            let pair = max_project(&matched_filter(&cube, &array.load()?, &grid)?);
            pair.write(&out)?;
            if preview_png {
                pair.write_previews(&out)?;
            }
        }
        Command::Layout { out } => {
            let array = build_planar_array(&ArrayLayout::default())?;
            std::fs::write(&out, array.to_json_pretty() + "\n")
                .with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Scaffold { out } => scaffold::write(&out)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
