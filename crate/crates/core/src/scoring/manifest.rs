//! Evaluation manifest: one JSON line per generated image.

use crate::masks::{mask_file_name, neg_mask_file_name, slug};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectRecord {
    pub name: String,
    /// Presence-gate answer.
    pub present: bool,
    pub mask_path: Option<String>,
    #[serde(default)]
    pub neg_mask_paths: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageRecord {
    pub prompt_id: String,
    pub image_index: u32,
    /// Relative to the images root.
    pub image_path: String,
    pub objects: Vec<ObjectRecord>,
}

impl ImageRecord {
    pub fn key(&self) -> (String, u32) {
        (self.prompt_id.clone(), self.image_index)
    }
}

impl ObjectRecord {
    /// Record for an object whose masks follow the standard naming next to
    /// `image_path` (`<dir>/<stem>.<object>.mask.png`).
    pub fn conventional(image_path: &str, name: &str, present: bool, neg_labels: &[&str]) -> Self {
        let p = Path::new(image_path);
        let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
        let dir = p.parent().map(|d| d.to_string_lossy().into_owned()).unwrap_or_default();
        let join = |f: String| if dir.is_empty() { f } else { format!("{dir}/{f}") };
        ObjectRecord {
            name: name.to_string(),
            present,
            mask_path: present.then(|| join(mask_file_name(stem, name))),
            neg_mask_paths: if present {
                neg_labels.iter().map(|l| join(neg_mask_file_name(stem, name, l))).collect()
            } else {
                Vec::new()
            },
        }
    }
}

/// Negative label encoded in a mask file name, or the file stem.
pub fn neg_label_from_path(path: &str) -> String {
    let file = Path::new(path).file_name().and_then(|f| f.to_str()).unwrap_or(path);
    match (file.find(".neg."), file.strip_suffix(".mask.png")) {
        (Some(i), Some(head)) if i + 5 <= head.len() => head[i + 5..].to_string(),
        _ => slug(file),
    }
}

pub fn read_manifest(path: &Path) -> Result<Vec<ImageRecord>> {
    let file = File::open(path).map_err(Error::io(path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(Error::io(path))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.into(),
            line: i + 1,
            msg: e.to_string(),
        })?);
    }
    Ok(out)
}

pub fn write_manifest(records: &[ImageRecord], path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).map_err(Error::io(path))?);
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n").map_err(Error::io(path))?;
    }
    w.flush().map_err(Error::io(path))
}
