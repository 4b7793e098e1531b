//! Library side of the `terrasect` command: rendering, reports, benchmarks
//! and oracle checks.

pub mod bench;
pub mod oracle;
pub mod report;
pub mod svg;

use std::path::Path;

use anyhow::{Context, Result};
use terrasect::map::{load_map, MapData, MapFormat};

/// Loads a map file; ASCII maps are named after the file stem.
pub fn load_map_file(path: &Path) -> Result<MapData> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let format = MapFormat::from_path(path);
    let mut map = load_map(&bytes, format).with_context(|| format!("cannot load {}", path.display()))?;
    if map.name.is_empty() {
        map.name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    }
    Ok(map)
}

/// Map files (`.txt`, `.map`, `.json`) in a directory, sorted by name.
pub fn map_files(dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .with_context(|| format!("cannot list {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("txt" | "map" | "json")))
        .collect();
    out.sort();
    Ok(out)
}
