//! Streaming reader for header-first, tab-separated dumps without quoting.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use serde::{Deserialize, Serialize};

use super::IngestError;

/// Row counters of one parsed table. `read == yielded + malformed` always holds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseStats {
    pub read: u64,
    pub yielded: u64,
    pub malformed: u64,
}

/// Opens `path` for buffered reading, decompressing when it ends in `.gz`.
pub fn open_input(path: &Path) -> Result<Box<dyn BufRead + Send>, IngestError> {
    let file = File::open(path).map_err(|source| IngestError::Open {
        path: path.display().to_string(),
        source,
    })?;
    let gz = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("gz"));
    Ok(if gz {
        Box::new(BufReader::new(MultiGzDecoder::new(file)))
    } else {
        Box::new(BufReader::new(file))
    })
}

/// Lazily converts each data row into `T` through `parse`.
///
/// Rows whose field count differs from the header's, that are not UTF-8, or
/// that `parse` rejects are skipped and counted as malformed. Only one line
/// buffer is held at a time.
pub struct TableReader<R, F> {
    reader: R,
    buf: Vec<u8>,
    width: usize,
    selected: Vec<usize>,
    parse: F,
    stats: ParseStats,
}

/// Reads the header of `reader` and resolves `columns` against it.
pub fn parse_table<R, T, F>(mut reader: R, columns: &[&str], parse: F) -> Result<TableReader<R, F>, IngestError>
where
    R: BufRead,
    F: FnMut(&[&str]) -> Option<T>,
{
    let mut buf = Vec::new();
    if reader.read_until(b'\n', &mut buf)? == 0 {
        return Err(IngestError::NoHeader);
    }
    let header = std::str::from_utf8(trim_eol(&buf)).map_err(|_| IngestError::NoHeader)?;
    let header = header.strip_prefix('\u{feff}').unwrap_or(header);
    let names: Vec<&str> = header.split('\t').map(str::trim).collect();
    let selected = columns
        .iter()
        .map(|col| {
            names
                .iter()
                .position(|n| n == col)
                .ok_or_else(|| IngestError::MissingColumn { column: col.to_string() })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let width = names.len();
    buf.clear();
    Ok(TableReader {
        reader,
        buf,
        width,
        selected,
        parse,
        stats: ParseStats::default(),
    })
}

impl<R, F> TableReader<R, F> {
    pub fn stats(&self) -> ParseStats {
        self.stats
    }

    /// Capacity of the internal line buffer; bounded by the longest line.
    pub fn buffer_capacity(&self) -> usize {
        self.buf.capacity()
    }
}

impl<R, T, F> Iterator for TableReader<R, F>
where
    R: BufRead,
    F: FnMut(&[&str]) -> Option<T>,
{
    type Item = Result<T, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            match self.reader.read_until(b'\n', &mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => return Some(Err(e.into())),
            }
            self.stats.read += 1;
            let parsed = std::str::from_utf8(trim_eol(&self.buf)).ok().and_then(|line| {
                let all: Vec<&str> = line.split('\t').collect();
                if all.len() != self.width {
                    return None;
                }
                let fields: Vec<&str> = self.selected.iter().map(|&i| all[i]).collect();
                (self.parse)(&fields)
            });
            match parsed {
                Some(row) => {
                    self.stats.yielded += 1;
                    return Some(Ok(row));
                }
                None => self.stats.malformed += 1,
            }
        }
    }
}

fn trim_eol(line: &[u8]) -> &[u8] {
    let line = line.strip_suffix(b"\n").unwrap_or(line);
    line.strip_suffix(b"\r").unwrap_or(line)
}
