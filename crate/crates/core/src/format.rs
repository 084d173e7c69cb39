//! Line-based resource file plumbing shared by every loader.
//!
//! All resource files start with the version header `#g2p-v1`. Lines
//! starting with `#` are comments, except a line whose first tab-separated
//! field is exactly `#` (the phrase-edge label in connectivity tables).

use std::path::{Path, PathBuf};

use thiserror::Error;

pub const HEADER: &str = "#g2p-v1";

#[derive(Debug, Error)]
pub enum ResourceError {
    #[error("{}: {source}", file.display())]
    Io { file: PathBuf, source: std::io::Error },
    #[error("{file}: first line must be the version header '{HEADER}'")]
    MissingHeader { file: String },
    #[error("{file}:{line}: {message}")]
    Parse { file: String, line: usize, message: String },
}

impl ResourceError {
    pub fn parse(file: &str, line: usize, message: impl Into<String>) -> Self {
        ResourceError::Parse { file: file.to_string(), line, message: message.into() }
    }
}

pub fn read_file(path: &Path) -> Result<String, ResourceError> {
    std::fs::read_to_string(path).map_err(|source| ResourceError::Io { file: path.to_path_buf(), source })
}

/// Data lines of a resource file as `(line number, content)`, header checked.
pub fn data_lines<'a>(
    file: &str,
    text: &'a str,
) -> Result<impl Iterator<Item = (usize, &'a str)>, ResourceError> {
    let mut lines = text.lines();
    if lines.next().map(str::trim_end) != Some(HEADER) {
        return Err(ResourceError::MissingHeader { file: file.to_string() });
    }
    Ok(lines.enumerate().filter_map(|(i, raw)| {
        let line = raw.trim_end_matches(['\r', '\n']);
        let is_comment = line.starts_with('#') && !line.starts_with("#\t");
        (!line.trim().is_empty() && !is_comment).then_some((i + 2, line))
    }))
}
