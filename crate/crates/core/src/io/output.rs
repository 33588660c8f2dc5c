//! Artifact writers: CSV, JSON, binary field snapshots and the manifest.
//!
//! Floats are written with 17 significant digits. Every file goes to a
//! temporary name first and is renamed into place.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::grid::GridField;

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Pretty JSON with every float written as a 17-digit literal.
struct Formatter17(PrettyFormatter<'static>);

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*)),* $(,)?) => {
        $(fn $name<W: ?Sized + std::io::Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> std::io::Result<()> {
            self.0.$name(w $(, $arg)*)
        })*
    };
}

impl Formatter for Formatter17 {
    delegate!(
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        begin_object_value(),
        end_object_value(),
    );

    fn write_f64<W: ?Sized + std::io::Write>(&mut self, w: &mut W, value: f64) -> std::io::Result<()> {
        w.write_all(fmt_float(value).as_bytes())
    }

    fn write_f32<W: ?Sized + std::io::Write>(&mut self, w: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(w, value as f64)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Formatter17(PrettyFormatter::new()));
    value.serialize(&mut ser).map_err(|e| Error::Io(e.to_string()))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}

/// A CSV cell.
pub enum Cell {
    F(f64),
    U(u64),
    S(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(x) => fmt_float(*x),
            Cell::U(u) => u.to_string(),
            Cell::S(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileEntry {
    pub file: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Output directory that records everything written through it.
#[derive(Debug)]
pub struct OutputDir {
    dir: PathBuf,
    files: Vec<FileEntry>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[FileEntry] {
        &self.files
    }

    fn write_raw(&self, name: &str, bytes: &[u8]) -> Result<()> {
        let target = self.dir.join(name);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(bytes)?;
        tmp.as_file().sync_all()?;
        tmp.persist(&target).map_err(|e| Error::Io(format!("cannot write {}: {e}", target.display())))?;
        Ok(())
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        self.write_raw(name, bytes)?;
        let digest = Sha256::digest(bytes);
        let sha256 = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.files.retain(|f| f.file != name);
        self.files.push(FileEntry { file: name.to_string(), bytes: bytes.len() as u64, sha256 });
        Ok(())
    }

    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<Cell>]) -> Result<()> {
        let mut text = header.join(",");
        text.push('\n');
        for row in rows {
            let line: Vec<String> = row.iter().map(Cell::render).collect();
            text.push_str(&line.join(","));
            text.push('\n');
        }
        self.write_bytes(name, text.as_bytes())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let text = to_json(value)?;
        self.write_bytes(name, text.as_bytes())
    }

    /// `<stem>.bin` holds interleaved little-endian (re, im) pairs; `<stem>.json`
    /// describes the grid plus `extra`.
    pub fn write_field<T: Serialize>(&mut self, stem: &str, field: &GridField, extra: &T) -> Result<()> {
        let mut bytes = Vec::with_capacity(16 * field.values().len());
        for v in field.values() {
            bytes.extend_from_slice(&v.re.to_le_bytes());
            bytes.extend_from_slice(&v.im.to_le_bytes());
        }
        self.write_bytes(&format!("{stem}.bin"), &bytes)?;
        let spec = field.spec();
        #[derive(Serialize)]
        struct Sidecar<'a, E> {
            file: String,
            dims: Vec<usize>,
            n: usize,
            side: f64,
            layout: &'static str,
            carrier: Option<[f64; 2]>,
            #[serde(flatten)]
            extra: &'a E,
        }
        let side = Sidecar {
            file: format!("{stem}.bin"),
            dims: vec![spec.n; spec.dim],
            n: spec.n,
            side: spec.side,
            layout: "f64 little-endian (re, im) pairs, row-major, x fastest",
            carrier: field.carrier(),
            extra,
        };
        self.write_json(&format!("{stem}.json"), &side)
    }

    /// Writes `manifest.json`; it lists every other file but not itself.
    pub fn finish<T: Serialize>(self, manifest: &T) -> Result<Vec<FileEntry>> {
        #[derive(Serialize)]
        struct Manifest<'a, M> {
            #[serde(flatten)]
            body: &'a M,
            outputs: &'a [FileEntry],
        }
        let text = to_json(&Manifest { body: manifest, outputs: &self.files })?;
        self.write_raw("manifest.json", text.as_bytes())?;
        Ok(self.files)
    }
}

/// Read a binary field written by [`OutputDir::write_field`].
pub fn read_field_values(path: &Path, expected: usize) -> Result<Vec<crate::Complex64>> {
    let bytes = std::fs::read(path).map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
    if bytes.len() != 16 * expected {
        return Err(Error::ConfigInvalid(vec![format!(
            "{} holds {} bytes, grid needs {}",
            path.display(),
            bytes.len(),
            16 * expected
        )]));
    }
    let f = |c: &[u8]| f64::from_le_bytes(c.try_into().expect("8-byte chunk"));
    Ok(bytes.chunks_exact(16).map(|c| crate::Complex64::new(f(&c[..8]), f(&c[8..]))).collect())
}
