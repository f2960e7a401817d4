use super::PromptSpec;
use crate::{Error, Result};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

/// One JSON object per line.
pub fn write_corpus_to<W: Write>(prompts: &[PromptSpec], mut w: W) -> Result<()> {
    for p in prompts {
        serde_json::to_writer(&mut w, p)?;
        w.write_all(b"\n").map_err(Error::io("<writer>"))?;
    }
    w.flush().map_err(Error::io("<writer>"))
}

pub fn write_corpus(prompts: &[PromptSpec], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(Error::io(path))?;
    write_corpus_to(prompts, BufWriter::new(file))
}

/// Reads a corpus file. Blank lines are skipped.
pub fn read_corpus(path: &Path) -> Result<Vec<PromptSpec>> {
    let file = File::open(path).map_err(Error::io(path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(Error::io(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let p = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.into(),
            line: i + 1,
            msg: e.to_string(),
        })?;
        out.push(p);
    }
    Ok(out)
}
