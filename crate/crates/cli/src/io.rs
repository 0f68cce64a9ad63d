//! File output helpers: every artifact is written to a temporary file in
//! the target directory and renamed into place, so readers never observe
//! a half-written file.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let file_name = path
        .file_name()
        .context("output path has no file name")?
        .to_string_lossy()
        .into_owned();
    let tmp = match dir {
        Some(d) => {
            fs::create_dir_all(d)
                .with_context(|| format!("creating directory {}", d.display()))?;
            d.join(format!(".{file_name}.tmp"))
        }
        None => Path::new(&format!(".{file_name}.tmp")).to_path_buf(),
    };
    fs::write(&tmp, content).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path)
        .with_context(|| format!("renaming {} into place", tmp.display()))?;
    Ok(())
}

pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}
