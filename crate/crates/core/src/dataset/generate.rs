use std::path::PathBuf;

use rand::Rng;
use rayon::prelude::*;

use super::config::GenerationConfig;
use super::manifest::{write_manifest, ManifestEntry, MANIFEST_FILE};
use crate::imaging::{matched_filter, max_project, Provenance, RadarImagePair};
use crate::raytracer::{trace_paths, MaterialParams, TraceConfig};
use crate::rng::{counter_rng, Domain};
use crate::scene::{build_planar_array, AntennaArray, MeshFormat, RigidPose, Scene, TriangleMesh};
use crate::signal::synthesize_if;
use crate::{Error, Result, Vec3};

/// Random draws for one sample, fixed by `(base_seed, class, sample)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleDraw {
    pub seed: u64,
    pub alpha: f64,
    pub azimuth_deg: f64,
    pub elevation_deg: f64,
    pub roll_deg: f64,
}

fn symmetric<R: Rng>(rng: &mut R, half_width: f64) -> f64 {
    if half_width == 0.0 {
        0.0
    } else {
        rng.random_range(-half_width..=half_width)
    }
}

pub fn draw_sample(cfg: &GenerationConfig, class_index: usize, sample_index: usize) -> SampleDraw {
    let mut rng = counter_rng(
        cfg.base_seed,
        Domain::Sample,
        class_index as u64,
        sample_index as u64,
        0,
    );
    let seed = rng.random::<u64>();
    let [lo, hi] = cfg.alpha_range;
    let alpha = if lo == hi { lo } else { rng.random_range(lo..=hi) };
    SampleDraw {
        seed,
        alpha,
        azimuth_deg: symmetric(&mut rng, cfg.pose.azimuth_deg),
        elevation_deg: symmetric(&mut rng, cfg.pose.elevation_deg),
        roll_deg: symmetric(&mut rng, cfg.pose.roll_deg),
    }
}

#[derive(Clone, Debug, Default)]
pub struct GenerateOptions {
    /// Overrides `GenerationConfig::output_dir`.
    pub output_dir: Option<PathBuf>,
    pub preview_png: bool,
    /// Keep existing image files whose header seed matches the planned sample.
    pub resume: bool,
}

#[derive(Clone, Debug)]
pub struct GenerateReport {
    pub output_dir: PathBuf,
    pub entries: Vec<ManifestEntry>,
    /// Samples reused from a previous run.
    pub reused: usize,
    pub warnings: Vec<String>,
}

/// Trace → synthesize → image for one posed mesh.
pub fn simulate(
    mesh: &TriangleMesh,
    array: &AntennaArray,
    cfg: &GenerationConfig,
    draw: &SampleDraw,
) -> Result<(RadarImagePair, Vec<String>)> {
    let target = array.centroid() + Vec3::new(0.0, 0.0, cfg.pose.standoff_m);
    let pose = RigidPose::from_view_angles_deg(draw.azimuth_deg, draw.elevation_deg, draw.roll_deg, target);
    let posed = mesh.transformed(&pose)?;
    let grid = cfg.grid.around(&posed.bounding_box())?;
    let scene = Scene::new(posed, array.clone(), MaterialParams::new(draw.alpha)?)?;
    let trace = TraceConfig {
        rng_seed: draw.seed,
        ..cfg.trace.clone()
    };
    let paths = trace_paths(&scene, &trace)?;
    let cube = synthesize_if(&paths, &cfg.sfcw)?;
    let mut pair = max_project(&matched_filter(&cube, array, &grid)?);
    pair.provenance = Some(Provenance {
        seed: draw.seed,
        alpha: draw.alpha,
        pose,
        view: Some([draw.azimuth_deg, draw.elevation_deg, draw.roll_deg, cfg.pose.standoff_m]),
        path_count: paths.len(),
        zero_paths: paths.is_empty(),
        augment_seed: None,
    });
    Ok((pair, paths.meta().warnings.clone()))
}

fn entry_for(file: String, label: &str, prov: &Provenance) -> ManifestEntry {
    ManifestEntry {
        file,
        label: label.to_string(),
        seed: prov.seed,
        alpha: prov.alpha,
        pose: prov.pose,
        view: prov.view.unwrap_or_default(),
        path_count: prov.path_count,
        zero_paths: prov.zero_paths,
        augment_seed: prov.augment_seed,
    }
}

struct Job {
    class: usize,
    sample: usize,
    file: String,
}

/// Generates `samples_per_class` image pairs per class and writes
/// `manifest.jsonl` in sample order. Output is identical for a fixed
/// `base_seed` regardless of thread count.
pub fn generate_dataset(cfg: &GenerationConfig, opts: &GenerateOptions) -> Result<GenerateReport> {
    cfg.validate()?;
    let out_dir = opts
        .output_dir
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .ok_or_else(|| Error::Config("no output directory given".into()))?;
    std::fs::create_dir_all(&out_dir).map_err(|e| Error::io(&out_dir, e))?;

    let meshes: Vec<TriangleMesh> = cfg
        .classes
        .iter()
        .map(|c| {
            let format = MeshFormat::from_path(&c.mesh).expect("validated extension");
            TriangleMesh::load(&c.mesh, format).map(|m| m.centered())
        })
        .collect::<Result<_>>()?;
    let array = build_planar_array(&cfg.array)?;

    let jobs: Vec<Job> = (0..cfg.classes.len())
        .flat_map(|class| (0..cfg.samples_per_class).map(move |sample| (class, sample)))
        .map(|(class, sample)| Job {
            class,
            sample,
            file: format!("{}_{:05}.rimg", cfg.classes[class].label, sample),
        })
        .collect();

    let outcomes: Vec<Result<(ManifestEntry, bool, Vec<String>)>> = jobs
        .par_iter()
        .map(|job| {
            let label = &cfg.classes[job.class].label;
            let draw = draw_sample(cfg, job.class, job.sample);
            let path = out_dir.join(&job.file);
            if opts.resume && path.exists() {
                if let Ok(Some(prov)) = RadarImagePair::read_provenance(&path) {
                    if prov.seed == draw.seed {
                        return Ok((entry_for(job.file.clone(), label, &prov), true, Vec::new()));
                    }
                }
            }
            let (mut pair, mut warnings) = simulate(&meshes[job.class], &array, cfg, &draw)?;
            pair.label = Some(label.clone());
            let prov = pair.provenance.clone().expect("simulate sets provenance");
            if prov.zero_paths {
                warnings.push(format!("{}: trace captured no paths", job.file));
            }
            pair.write(&path)?;
            if opts.preview_png {
                pair.write_previews(&path)?;
            }
            Ok((entry_for(job.file.clone(), label, &prov), false, warnings))
        })
        .collect();

    let mut report = GenerateReport {
        output_dir: out_dir.clone(),
        entries: Vec::with_capacity(jobs.len()),
        reused: 0,
        warnings: Vec::new(),
    };
    for (job, outcome) in jobs.iter().zip(outcomes) {
        match outcome {
            Ok((entry, reused, warnings)) => {
                report.entries.push(entry);
                report.reused += reused as usize;
                for w in warnings {
                    if !report.warnings.contains(&w) {
                        report.warnings.push(w);
                    }
                }
            }
            Err(e) => {
                let partial = out_dir.join("manifest.partial.jsonl");
                write_manifest(&partial, &report.entries)?;
                return Err(Error::Config(format!(
                    "sample {} failed: {e}; {} completed samples listed in {}",
                    job.file,
                    report.entries.len(),
                    partial.display()
                )));
            }
        }
    }
    write_manifest(&out_dir.join(MANIFEST_FILE), &report.entries)?;
    Ok(report)
}
