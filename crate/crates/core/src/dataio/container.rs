//! Section container used for model bundles.
//!
//! Layout (little-endian):
//!
//! ```text
//! magic          4 bytes  "PQSR"
//! version        u16
//! section_count  u16
//! per section:
//!   name         u16 length + UTF-8
//!   offset       u64   from the start of the file
//!   length       u64
//!   crc32        u32   of the section bytes
//! section data, in table order
//! ```

use std::io::Write as _;
use std::path::Path;

use crate::codec::{Reader, Writer};

use super::DataError;

pub const BUNDLE_MAGIC: &[u8; 4] = b"PQSR";
pub const BUNDLE_VERSION: u16 = 1;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Container {
    sections: Vec<(String, Vec<u8>)>,
}

impl Container {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: &str, data: Vec<u8>) {
        self.sections.push((name.to_owned(), data));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.sections.iter().map(|(n, _)| n.as_str())
    }

    pub fn get(&self, name: &str) -> Result<&[u8], DataError> {
        self.sections
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, d)| d.as_slice())
            .ok_or_else(|| DataError::CorruptFile(format!("missing section `{name}`")))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let table_len: usize = self.sections.iter().map(|(n, _)| 2 + n.len() + 8 + 8 + 4).sum();
        let mut offset = (4 + 2 + 2 + table_len) as u64;
        let mut w = Writer::new();
        w.bytes(BUNDLE_MAGIC)
            .u16(BUNDLE_VERSION)
            .u16(self.sections.len() as u16);
        for (name, data) in &self.sections {
            w.str(name)
                .u64(offset)
                .u64(data.len() as u64)
                .u32(crc32fast::hash(data));
            offset += data.len() as u64;
        }
        for (_, data) in &self.sections {
            w.bytes(data);
        }
        w.into_bytes()
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self, DataError> {
        let corrupt = |what: String| DataError::CorruptFile(what);
        let truncated = |_| corrupt("truncated header".into());
        let mut r = Reader::new(data);
        if r.take(4).map_err(truncated)? != BUNDLE_MAGIC {
            return Err(corrupt("not a model bundle (bad magic)".into()));
        }
        let version = r.u16().map_err(truncated)?;
        if version != BUNDLE_VERSION {
            return Err(DataError::VersionMismatch {
                found: version,
                expected: BUNDLE_VERSION,
            });
        }
        let count = r.u16().map_err(truncated)?;
        let mut table = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let name = r.str().map_err(truncated)?;
            let offset = r.u64().map_err(truncated)?;
            let len = r.u64().map_err(truncated)?;
            let crc = r.u32().map_err(truncated)?;
            table.push((name, offset, len, crc));
        }
        let mut sections = Vec::with_capacity(table.len());
        for (name, offset, len, crc) in table {
            let range = usize::try_from(offset)
                .ok()
                .zip(usize::try_from(len).ok())
                .and_then(|(o, l)| Some(o..o.checked_add(l)?))
                .filter(|r| r.end <= data.len())
                .ok_or_else(|| corrupt(format!("section `{name}` extends past the end of the file")))?;
            let bytes = &data[range];
            if crc32fast::hash(bytes) != crc {
                return Err(corrupt(format!("checksum mismatch in section `{name}`")));
            }
            sections.push((name, bytes.to_vec()));
        }
        Ok(Self { sections })
    }
}

/// Writes to a sibling temporary file, then renames over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), DataError> {
    let io = |source| DataError::Io {
        path: path.to_owned(),
        source,
    };
    let mut tmp_name = path.file_name().unwrap_or_default().to_owned();
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let mut f = std::fs::File::create(&tmp).map_err(io)?;
    f.write_all(bytes).and_then(|_| f.sync_all()).map_err(io)?;
    drop(f);
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        io(e)
    })
}
