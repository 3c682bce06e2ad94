//! File formats: point-cloud CSV, intensity-grid CSV, MNIST IDX, and manifests.
//!
//! Point clouds carry a header `x1,...,xn,mass` and one point per row. Grid
//! CSVs have no header; each line is one image row. Manifests list one entry
//! per line (blank lines and `#` comments are skipped) with paths resolved
//! relative to the manifest's directory.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::image::GridImage;
use super::synthetic::LabeledImage;
use crate::error::{OtError, Result};
use crate::Distribution;

fn parse_err(line: usize, message: impl Into<String>) -> OtError {
    OtError::ParseError { line, message: message.into() }
}

fn csv_err(e: csv::Error) -> OtError {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => OtError::Io(io),
        kind => parse_err(line, format!("{kind:?}")),
    }
}

fn parse_field(field: &str, line: usize) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|_| parse_err(line, format!("not a number: {field:?}")))
}

pub fn load_point_cloud(path: impl AsRef<Path>) -> Result<Distribution> {
    let mut rdr =
        csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_path(path.as_ref()).map_err(csv_err)?;
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let cols = headers.len();
    if cols < 2 || &headers[cols - 1] != "mass" {
        return Err(parse_err(1, "header must be x1,...,xn,mass"));
    }
    for (k, h) in headers.iter().take(cols - 1).enumerate() {
        if h != format!("x{}", k + 1) {
            return Err(parse_err(1, format!("expected column x{}, found {h:?}", k + 1)));
        }
    }
    let dim = cols - 1;
    let mut coords = Vec::new();
    let mut masses = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if rec.len() != cols {
            return Err(parse_err(line, format!("expected {cols} fields, found {}", rec.len())));
        }
        for field in rec.iter().take(dim) {
            coords.push(parse_field(field, line)?);
        }
        let w = parse_field(&rec[dim], line)?;
        if !(w >= 0.0) || !w.is_finite() {
            return Err(parse_err(line, format!("invalid mass {w}")));
        }
        masses.push(w);
    }
    Distribution::from_flat(dim, coords, masses)
}

pub fn write_point_cloud<W: Write>(d: &Distribution, out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=d.dim()).map(|k| format!("x{k}")).collect();
    header.push("mass".into());
    wtr.write_record(&header).map_err(csv_err)?;
    for (p, w) in d.points().zip(d.masses()) {
        let mut row: Vec<String> = p.iter().map(|x| x.to_string()).collect();
        row.push(w.to_string());
        wtr.write_record(&row).map_err(csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn save_point_cloud(d: &Distribution, path: impl AsRef<Path>) -> Result<()> {
    write_point_cloud(d, fs::File::create(path)?)
}

pub fn load_grid_image(path: impl AsRef<Path>) -> Result<GridImage> {
    let text = fs::read_to_string(path.as_ref())?;
    let mut rows = Vec::new();
    for (k, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line.split(',').map(|f| parse_field(f, k + 1)).collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first().map(Vec::len) {
            if row.len() != first {
                return Err(parse_err(k + 1, format!("expected {first} columns, found {}", row.len())));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_err(0, "no rows"));
    }
    GridImage::from_rows(rows)
}

pub fn save_grid_image(img: &GridImage, path: impl AsRef<Path>) -> Result<()> {
    let mut f = fs::File::create(path)?;
    for row in img.intensities().chunks_exact(img.width()) {
        let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        writeln!(f, "{}", line.join(","))?;
    }
    Ok(())
}

fn read_idx(path: &Path, magic: u32) -> Result<(Vec<usize>, Vec<u8>)> {
    let bytes = fs::read(path)?;
    let be = |off: usize| -> Result<u32> {
        bytes
            .get(off..off + 4)
            .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
            .ok_or_else(|| parse_err(0, "truncated IDX header"))
    };
    let found = be(0)?;
    if found != magic {
        return Err(parse_err(0, format!("IDX magic {found:#010x}, expected {magic:#010x}")));
    }
    let ndim = (magic & 0xff) as usize;
    let dims = (0..ndim).map(|k| be(4 + 4 * k).map(|d| d as usize)).collect::<Result<Vec<_>>>()?;
    let start = 4 + 4 * ndim;
    let len: usize = dims.iter().product();
    let data =
        bytes.get(start..start + len).ok_or_else(|| parse_err(0, format!("IDX payload shorter than {len} bytes")))?;
    Ok((dims, data.to_vec()))
}

/// MNIST-format image file (`0x00000803`). All-black images are rejected.
pub fn load_idx_images(path: impl AsRef<Path>) -> Result<Vec<GridImage>> {
    let (dims, data) = read_idx(path.as_ref(), 0x0000_0803)?;
    let (rows, cols) = (dims[1], dims[2]);
    data.chunks_exact(rows * cols)
        .map(|px| GridImage::new(cols, rows, px.iter().map(|&b| b as f64).collect()))
        .collect()
}

/// MNIST-format label file (`0x00000801`).
pub fn load_idx_labels(path: impl AsRef<Path>) -> Result<Vec<usize>> {
    let (_, data) = read_idx(path.as_ref(), 0x0000_0801)?;
    Ok(data.into_iter().map(usize::from).collect())
}

fn manifest_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let text = fs::read_to_string(path)?;
    Ok(text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim().to_string()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect())
}

fn resolve(manifest: &Path, entry: &str) -> PathBuf {
    let p = Path::new(entry);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        manifest.parent().unwrap_or(Path::new(".")).join(p)
    }
}

/// Time-ordered frames listed one path per line.
pub fn load_sequence_manifest(path: impl AsRef<Path>) -> Result<Vec<GridImage>> {
    let path = path.as_ref();
    manifest_lines(path)?.into_iter().map(|(_, entry)| load_grid_image(resolve(path, &entry))).collect()
}

/// Lines of `label,path` pointing at grid CSVs.
pub fn load_labeled_manifest(path: impl AsRef<Path>) -> Result<Vec<LabeledImage>> {
    let path = path.as_ref();
    manifest_lines(path)?
        .into_iter()
        .map(|(line, entry)| {
            let (label, file) = entry.split_once(',').ok_or_else(|| parse_err(line, "expected label,path"))?;
            let label = label.trim().parse::<usize>().map_err(|_| parse_err(line, format!("bad label {label:?}")))?;
            Ok(LabeledImage { label, image: load_grid_image(resolve(path, file.trim()))? })
        })
        .collect()
}

/// Lines of `id,path` or bare `path` (the id is then the file stem).
pub fn load_named_manifest(path: impl AsRef<Path>) -> Result<Vec<(String, PathBuf)>> {
    let path = path.as_ref();
    Ok(manifest_lines(path)?
        .into_iter()
        .map(|(_, entry)| match entry.split_once(',') {
            Some((id, file)) => (id.trim().to_string(), resolve(path, file.trim())),
            None => {
                let p = resolve(path, &entry);
                let id = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or(entry);
                (id, p)
            }
        })
        .collect())
}
