use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::scene::RigidPose;
use crate::{io, Error, Result};

pub const MANIFEST_FILE: &str = "manifest.jsonl";

/// One line of `manifest.jsonl`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Image-pair file, relative to the manifest's directory.
    pub file: String,
    pub label: String,
    pub seed: u64,
    pub alpha: f64,
    pub pose: RigidPose,
    /// `[azimuth_deg, elevation_deg, roll_deg, standoff_m]`.
    pub view: [f64; 4],
    pub path_count: usize,
    pub zero_paths: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub augment_seed: Option<u64>,
}

pub fn write_manifest(path: &Path, entries: &[ManifestEntry]) -> Result<()> {
    let mut text = String::new();
    for e in entries {
        let _ = writeln!(text, "{}", serde_json::to_string(e)?);
    }
    io::write_atomic(path, text.as_bytes())
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let bytes = io::read_file(path)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::Format(e.to_string()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::Parse {
                path: path.into(),
                line: i + 1,
                msg: e.to_string(),
            })
        })
        .collect()
}
