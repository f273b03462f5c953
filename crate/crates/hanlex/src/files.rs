//! Atomic file output.

use std::path::Path;

use crate::error::{Error, Result};

/// Writes via a temporary file in the target directory followed by a
/// rename, so readers never observe a half-written file and a failed run
/// never clobbers an existing one.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_owned(),
        source,
    };
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or_else(|| Path::new(".")))
        .map_err(io_err)?;
    std::io::Write::write_all(&mut tmp, contents).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}
