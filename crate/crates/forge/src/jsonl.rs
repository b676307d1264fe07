//! Line-delimited JSON reading and atomic file output.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use tempfile::NamedTempFile;

use crate::error::{ForgeError, Result};

pub fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| ForgeError::io(path, e))
}

/// Iterates `(line_number, record)` over non-blank lines.
pub fn records<T: DeserializeOwned>(path: &Path) -> Result<impl Iterator<Item = Result<(usize, T)>>> {
    let reader = open(path)?;
    let path = path.to_path_buf();
    Ok(reader.lines().enumerate().filter_map(move |(i, line)| {
        let line_no = i + 1;
        match line {
            Err(e) => Some(Err(ForgeError::io(&path, e))),
            Ok(l) if l.trim().is_empty() => None,
            Ok(l) => Some(
                serde_json::from_str(&l)
                    .map(|r| (line_no, r))
                    .map_err(|e| ForgeError::parse(&path, line_no, e)),
            ),
        }
    }))
}

pub fn read<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    records(path)?.map(|r| r.map(|(_, t)| t)).collect()
}

pub fn count_records(path: &Path) -> Result<usize> {
    let mut n = 0;
    for line in open(path)?.lines() {
        if !line.map_err(|e| ForgeError::io(path, e))?.trim().is_empty() {
            n += 1;
        }
    }
    Ok(n)
}

/// Writes to a temporary file beside `path`; the rename on [`commit`]
/// makes the output visible all at once.
///
/// [`commit`]: AtomicFile::commit
pub struct AtomicFile {
    path: PathBuf,
    writer: BufWriter<NamedTempFile>,
}

impl AtomicFile {
    pub fn create(path: &Path) -> Result<Self> {
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        std::fs::create_dir_all(dir).map_err(|e| ForgeError::io(dir, e))?;
        let tmp = NamedTempFile::new_in(dir).map_err(|e| ForgeError::io(dir, e))?;
        Ok(AtomicFile {
            path: path.to_path_buf(),
            writer: BufWriter::new(tmp),
        })
    }

    pub fn write_record<T: Serialize>(&mut self, record: &T) -> Result<()> {
        serde_json::to_writer(&mut self.writer, record).map_err(|e| ForgeError::Input(e.to_string()))?;
        self.write_str("\n")
    }

    pub fn write_str(&mut self, s: &str) -> Result<()> {
        self.writer
            .write_all(s.as_bytes())
            .map_err(|e| ForgeError::io(&self.path, e))
    }

    pub fn commit(self) -> Result<()> {
        let tmp = self
            .writer
            .into_inner()
            .map_err(|e| ForgeError::io(&self.path, e.into_error()))?;
        tmp.persist(&self.path)
            .map_err(|e| ForgeError::io(&self.path, e.error))?;
        Ok(())
    }
}

pub fn write<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let mut out = AtomicFile::create(path)?;
    for r in records {
        out.write_record(r)?;
    }
    out.commit()
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = AtomicFile::create(path)?;
    let text = serde_json::to_string_pretty(value).map_err(|e| ForgeError::Input(e.to_string()))?;
    out.write_str(&text)?;
    out.write_str("\n")?;
    out.commit()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_blank_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.jsonl");
        write(&path, &[1, 2, 3]).unwrap();
        std::fs::write(&path, "1\n\n2\n  \n3\n").unwrap();
        assert_eq!(read::<i32>(&path).unwrap(), [1, 2, 3]);
        assert_eq!(count_records(&path).unwrap(), 3);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.jsonl");
        std::fs::write(&path, "1\n2\nnope\n").unwrap();
        match read::<i32>(&path) {
            Err(ForgeError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn uncommitted_output_is_invisible() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.jsonl");
        let mut f = AtomicFile::create(&path).unwrap();
        f.write_record(&1).unwrap();
        assert!(!path.exists());
        f.commit().unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "1\n");
    }
}
