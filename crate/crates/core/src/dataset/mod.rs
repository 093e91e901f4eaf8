//! Labeled dataset generation and image augmentation.

mod augment;
mod config;
mod generate;
mod manifest;

pub use augment::{
    augment, augment_dataset, flip_horizontal, flip_vertical, gaussian_blur, rotate_scale, AugmentConfig,
};
pub use config::{ClassSpec, GenerationConfig, GridConfig, PoseSampler, CLASS_LABELS};
pub use generate::{draw_sample, generate_dataset, simulate, GenerateOptions, GenerateReport, SampleDraw};
pub use manifest::{read_manifest, write_manifest, ManifestEntry, MANIFEST_FILE};
