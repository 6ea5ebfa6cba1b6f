//! File formats.
//!
//! Sinogram binary (`.mrts`), all little-endian:
//!
//! ```text
//! b"MRTS"  u32 version=1  u32 M  u32 K  u32 K'  f64 Ω  f64 T  f64 λ
//! M·(K'+K+1) f64 samples, row-major by angle, k = -K'..=K within a row
//! ```
//!
//! Sinogram CSV: one header line
//! `# mrts-csv v1 M=.. K=.. K_prime=.. omega=.. T=.. lambda=..` followed by
//! one comma-separated row per angle. Floats are written in shortest
//! round-trip form so the CSV is lossless.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::forward::{SamplingParams, Sinogram};
use crate::ops::SampleSeq;
use crate::phantom::ImageGrid;

pub const MAGIC: &[u8; 4] = b"MRTS";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 * 4 + 3 * 8;

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn to_u32(v: usize, what: &str) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::Size(format!("{what} = {v} does not fit the header")))
}

pub fn encode_sinogram(s: &Sinogram) -> Result<Vec<u8>> {
    let p = &s.params;
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * p.angles * p.row_len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    for (v, what) in [(p.angles, "M"), (p.k, "K"), (p.k_prime, "K'")] {
        out.extend_from_slice(&to_u32(v, what)?.to_le_bytes());
    }
    for v in [p.omega, p.spacing, p.lambda] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for r in &s.rows {
        for v in r.values() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

pub fn decode_sinogram(bytes: &[u8]) -> Result<Sinogram> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::parse(1, 1, format!("{} bytes is shorter than the header", bytes.len())));
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::parse(1, 1, "missing MRTS magic"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let version = u32_at(4);
    if version != VERSION {
        return Err(Error::parse(1, 5, format!("unsupported version {version}")));
    }
    let (m, k, kp) = (u32_at(8) as usize, u32_at(12) as usize, u32_at(16) as usize);
    let (omega, spacing, lambda) = (f64_at(20), f64_at(28), f64_at(36));
    let params = SamplingParams::new(omega, spacing, lambda, k, kp, m)?;
    let n = params.row_len();
    let expected = HEADER_LEN + 8 * m * n;
    if bytes.len() != expected {
        return Err(Error::parse(
            1,
            HEADER_LEN + 1,
            format!("payload is {} bytes, header implies {}", bytes.len() - HEADER_LEN, expected - HEADER_LEN),
        ));
    }
    let rows = bytes[HEADER_LEN..]
        .chunks_exact(8 * n)
        .map(|chunk| {
            let v = chunk.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap())).collect();
            SampleSeq::new(-(kp as i64), v)
        })
        .collect::<Result<Vec<_>>>()?;
    Sinogram::new(params, rows)
}

pub fn write_sinogram_binary(path: impl AsRef<Path>, s: &Sinogram) -> Result<()> {
    write_file(path.as_ref(), &encode_sinogram(s)?)
}

pub fn read_sinogram_binary(path: impl AsRef<Path>) -> Result<Sinogram> {
    decode_sinogram(&read_file(path.as_ref())?)
}

pub fn sinogram_to_csv(s: &Sinogram) -> String {
    let p = &s.params;
    let mut out = format!(
        "# mrts-csv v1 M={} K={} K_prime={} omega={} T={} lambda={}\n",
        p.angles, p.k, p.k_prime, p.omega, p.spacing, p.lambda
    );
    for r in &s.rows {
        let mut first = true;
        for v in r.values() {
            if !first {
                out.push(',');
            }
            first = false;
            write!(out, "{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

fn parse_f64(text: &str, row: usize, column: usize) -> Result<f64> {
    let t = text.trim();
    t.parse::<f64>()
        .map_err(|_| Error::parse(row, column, format!("{t:?} is not a number")))
}

fn header_fields(line: &str) -> Result<std::collections::HashMap<&str, &str>> {
    let rest = line
        .strip_prefix("# mrts-csv v1")
        .ok_or_else(|| Error::parse(1, 1, "expected '# mrts-csv v1' header"))?;
    Ok(rest.split_whitespace().filter_map(|kv| kv.split_once('=')).collect())
}

pub fn sinogram_from_csv(text: &str) -> Result<Sinogram> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::parse(1, 1, "empty file"))?;
    let fields = header_fields(header)?;
    let get = |key: &str| {
        fields
            .get(key)
            .copied()
            .ok_or_else(|| Error::parse(1, 1, format!("header lacks {key}")))
    };
    let int = |key: &str| -> Result<usize> {
        get(key)?
            .parse()
            .map_err(|_| Error::parse(1, 1, format!("{key} is not an integer")))
    };
    let params = SamplingParams::new(
        parse_f64(get("omega")?, 1, 1)?,
        parse_f64(get("T")?, 1, 1)?,
        parse_f64(get("lambda")?, 1, 1)?,
        int("K")?,
        int("K_prime")?,
        int("M")?,
    )?;
    let rows = parse_matrix(lines, 2, Some(params.row_len()))?;
    if rows.len() != params.angles {
        return Err(Error::parse(rows.len() + 2, 1, format!("{} rows, header says M = {}", rows.len(), params.angles)));
    }
    let base = -(params.k_prime as i64);
    let rows = rows.into_iter().map(|v| SampleSeq::new(base, v)).collect::<Result<Vec<_>>>()?;
    Sinogram::new(params, rows)
}

/// Comma-separated numeric rows; blank and `#` lines are skipped.
/// `first_row` is the 1-based line number of the first line given.
fn parse_matrix<'a>(
    lines: impl Iterator<Item = &'a str>,
    first_row: usize,
    width: Option<usize>,
) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    let mut width = width;
    for (i, line) in lines.enumerate() {
        let row = first_row + i;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cells: Vec<&str> = if line.contains(',') {
            line.split(',').collect()
        } else {
            line.split_whitespace().collect()
        };
        let values = cells
            .into_iter()
            .enumerate()
            .map(|(j, cell)| parse_f64(cell, row, j + 1))
            .collect::<Result<Vec<_>>>()?;
        match width {
            Some(w) if w != values.len() => {
                return Err(Error::parse(row, values.len().min(w) + 1, format!("{} columns, expected {w}", values.len())))
            }
            None => width = Some(values.len()),
            _ => {}
        }
        rows.push(values);
    }
    Ok(rows)
}

pub fn write_sinogram_csv(path: impl AsRef<Path>, s: &Sinogram) -> Result<()> {
    write_file(path.as_ref(), sinogram_to_csv(s).as_bytes())
}

pub fn read_sinogram_csv(path: impl AsRef<Path>) -> Result<Sinogram> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    sinogram_from_csv(&text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SinogramFormat {
    Binary,
    Csv,
    /// Bare comma-separated matrix, one row per angle of `2K+1` samples,
    /// with the geometry supplied separately.
    Matrix,
}

impl std::str::FromStr for SinogramFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bin" | "binary" | "mrts" => Ok(SinogramFormat::Binary),
            "csv" => Ok(SinogramFormat::Csv),
            "matrix" => Ok(SinogramFormat::Matrix),
            other => Err(Error::Config(format!("unknown sinogram format {other:?}"))),
        }
    }
}

impl SinogramFormat {
    /// Guesses from the file extension: `.csv` is CSV, anything else binary.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => SinogramFormat::Csv,
            _ => SinogramFormat::Binary,
        }
    }
}

/// Geometry of a bare matrix: `T`, `Ω` and `λ`; `M` and `K` follow from its shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixGeometry {
    pub omega: f64,
    pub spacing: f64,
    pub lambda: f64,
}

pub fn sinogram_from_matrix(text: &str, geometry: MatrixGeometry) -> Result<Sinogram> {
    let rows = parse_matrix(text.lines(), 1, None)?;
    let width = rows.first().map(Vec::len).ok_or_else(|| Error::parse(1, 1, "no data rows"))?;
    if width % 2 == 0 {
        return Err(Error::parse(1, width, format!("{width} columns; need 2K+1")));
    }
    let k = width / 2;
    let params = SamplingParams::new(geometry.omega, geometry.spacing, geometry.lambda, k, k, rows.len())?;
    let rows = rows.into_iter().map(|v| SampleSeq::new(-(k as i64), v)).collect::<Result<Vec<_>>>()?;
    Sinogram::new(params, rows)
}

pub fn write_sinogram(path: impl AsRef<Path>, s: &Sinogram, format: SinogramFormat) -> Result<()> {
    match format {
        SinogramFormat::Binary => write_sinogram_binary(path, s),
        SinogramFormat::Csv => write_sinogram_csv(path, s),
        SinogramFormat::Matrix => {
            let text = sinogram_to_csv(s);
            let body = text.split_once('\n').map_or("", |(_, b)| b);
            write_file(path.as_ref(), body.as_bytes())
        }
    }
}

/// Reads a sinogram; `geometry` is required for bare matrices.
pub fn read_sinogram(path: impl AsRef<Path>, format: SinogramFormat, geometry: Option<MatrixGeometry>) -> Result<Sinogram> {
    let path = path.as_ref();
    match format {
        SinogramFormat::Binary => read_sinogram_binary(path),
        SinogramFormat::Csv => read_sinogram_csv(path),
        SinogramFormat::Matrix => {
            let g = geometry.ok_or_else(|| Error::Config("matrix input needs omega, T and lambda".into()))?;
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            sinogram_from_matrix(&text, g)
        }
    }
}

/// Loads an external sinogram and optionally scales it to `‖p‖∞ = 1`.
pub fn ingest(
    path: impl AsRef<Path>,
    format: SinogramFormat,
    geometry: Option<MatrixGeometry>,
    normalize: bool,
) -> Result<Sinogram> {
    let s = read_sinogram(path, format, geometry)?;
    if s.rows.iter().flat_map(|r| r.values()).any(|v| !v.is_finite()) {
        return Err(Error::Domain("sinogram has non-finite samples".into()));
    }
    Ok(if normalize { s.normalized() } else { s })
}

/// 16-bit binary PGM, min-max scaled; the range is kept in a header comment.
pub fn encode_pgm16(img: &ImageGrid) -> Vec<u8> {
    let (lo, hi) = (img.min(), img.max());
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut out = format!(
        "P5\n# min={lo} max={hi} extent=-1,1,-1,1\n{} {}\n65535\n",
        img.width(),
        img.height()
    )
    .into_bytes();
    for &v in img.pixels() {
        let q = (((v - lo) / span) * 65535.0).round().clamp(0.0, 65535.0) as u16;
        out.extend_from_slice(&q.to_be_bytes());
    }
    out
}

/// Reads back an image written by [`encode_pgm16`], undoing the scaling.
pub fn decode_pgm16(bytes: &[u8]) -> Result<ImageGrid> {
    let mut pos = 0;
    let mut tokens = Vec::new();
    let mut range = None;
    while tokens.len() < 4 {
        if pos >= bytes.len() {
            return Err(Error::parse(1, pos + 1, "truncated PGM header"));
        }
        match bytes[pos] {
            b'#' => {
                let end = bytes[pos..].iter().position(|&b| b == b'\n').map_or(bytes.len(), |e| pos + e);
                let comment = String::from_utf8_lossy(&bytes[pos + 1..end]).to_string();
                let find = |key: &str| {
                    comment
                        .split_whitespace()
                        .find_map(|kv| kv.strip_prefix(key))
                        .and_then(|v| v.parse::<f64>().ok())
                };
                if let (Some(lo), Some(hi)) = (find("min="), find("max=")) {
                    range = Some((lo, hi));
                }
                pos = end + 1;
            }
            b if b.is_ascii_whitespace() => pos += 1,
            _ => {
                let end = bytes[pos..]
                    .iter()
                    .position(|b| b.is_ascii_whitespace())
                    .map_or(bytes.len(), |e| pos + e);
                tokens.push(String::from_utf8_lossy(&bytes[pos..end]).to_string());
                pos = end;
            }
        }
    }
    if tokens[0] != "P5" || tokens[3] != "65535" {
        return Err(Error::parse(1, 1, "not a 16-bit binary PGM"));
    }
    let dim = |s: &str| s.parse::<usize>().map_err(|_| Error::parse(1, 1, format!("bad dimension {s:?}")));
    let (w, h) = (dim(&tokens[1])?, dim(&tokens[2])?);
    pos += 1;
    let data = &bytes[pos.min(bytes.len())..];
    if data.len() != 2 * w * h {
        return Err(Error::parse(1, pos + 1, format!("{} data bytes for {w}x{h}", data.len())));
    }
    let (lo, hi) = range.unwrap_or((0.0, 65535.0));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let pixels = data
        .chunks_exact(2)
        .map(|b| lo + span * u16::from_be_bytes([b[0], b[1]]) as f64 / 65535.0)
        .collect();
    ImageGrid::from_pixels(w, h, pixels)
}

pub fn write_pgm16(path: impl AsRef<Path>, img: &ImageGrid) -> Result<()> {
    write_file(path.as_ref(), &encode_pgm16(img))
}

pub fn read_pgm16(path: impl AsRef<Path>) -> Result<ImageGrid> {
    decode_pgm16(&read_file(path.as_ref())?)
}

/// Sidecar header path for a raw dump: `<path>.hdr`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".hdr");
    PathBuf::from(s)
}

/// Raw little-endian `f64` pixels, row-major from the top row, plus a
/// text sidecar with `width`, `height` and `extent`.
pub fn write_raw_image(path: impl AsRef<Path>, img: &ImageGrid) -> Result<()> {
    let path = path.as_ref();
    let bytes: Vec<u8> = img.pixels().iter().flat_map(|v| v.to_le_bytes()).collect();
    write_file(path, &bytes)?;
    let header = format!(
        "width={}\nheight={}\nextent=-1,1,-1,1\ndtype=f64le\norder=row-major,top-down\n",
        img.width(),
        img.height()
    );
    write_file(&sidecar_path(path), header.as_bytes())
}

pub fn read_raw_image(path: impl AsRef<Path>) -> Result<ImageGrid> {
    let path = path.as_ref();
    let side = sidecar_path(path);
    let header = fs::read_to_string(&side).map_err(|e| Error::io(&side, e))?;
    let mut dims = (None, None);
    for (i, line) in header.lines().enumerate() {
        if let Some((key, value)) = line.split_once('=') {
            let parse = || {
                value
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| Error::parse(i + 1, key.len() + 2, format!("bad {key}")))
            };
            match key.trim() {
                "width" => dims.0 = Some(parse()?),
                "height" => dims.1 = Some(parse()?),
                _ => {}
            }
        }
    }
    let (w, h) = match dims {
        (Some(w), Some(h)) => (w, h),
        _ => return Err(Error::parse(1, 1, "sidecar lacks width or height")),
    };
    let bytes = read_file(path)?;
    if bytes.len() != 8 * w * h {
        return Err(Error::Size(format!("{} bytes for {w}x{h} f64 pixels", bytes.len())));
    }
    let pixels = bytes.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap())).collect();
    ImageGrid::from_pixels(w, h, pixels)
}

/// One value per line. `#` lines are comments; a `# base=<k>` comment sets
/// the index of the first value (default 0).
pub fn samples_from_text(text: &str) -> Result<SampleSeq> {
    let mut base = 0i64;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if let Some(comment) = line.strip_prefix('#') {
            for kv in comment.split_whitespace() {
                if let Some(v) = kv.strip_prefix("base=") {
                    base = v.parse().map_err(|_| Error::parse(i + 1, 1, format!("bad base {v:?}")))?;
                }
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        values.push(parse_f64(line, i + 1, 1)?);
    }
    if values.is_empty() {
        return Err(Error::parse(1, 1, "no samples"));
    }
    SampleSeq::new(base, values)
}

pub fn samples_to_text(seq: &SampleSeq, comment: &str) -> String {
    let mut out = String::new();
    for line in comment.lines() {
        writeln!(out, "# {line}").unwrap();
    }
    writeln!(out, "# base={}", seq.base()).unwrap();
    for v in seq.values() {
        writeln!(out, "{v}").unwrap();
    }
    out
}

pub fn read_samples(path: impl AsRef<Path>) -> Result<SampleSeq> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    samples_from_text(&text)
}

pub fn write_samples(path: impl AsRef<Path>, seq: &SampleSeq, comment: &str) -> Result<()> {
    write_file(path.as_ref(), samples_to_text(seq, comment).as_bytes())
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    write_file(path.as_ref(), text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Sinogram {
        let params = SamplingParams::new(30.0, 0.01, 0.05, 3, 5, 2).unwrap();
        let rows = (0..2)
            .map(|m| SampleSeq::from_fn(-5, 3, |k| (k as f64 * 0.37 + m as f64).sin() / 3.0).unwrap())
            .collect();
        Sinogram::new(params, rows).unwrap()
    }

    #[test]
    fn binary_header_layout() {
        let b = encode_sinogram(&small()).unwrap();
        assert_eq!(&b[..4], b"MRTS");
        assert_eq!(u32::from_le_bytes(b[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(b[8..12].try_into().unwrap()), 2);
        assert_eq!(u32::from_le_bytes(b[12..16].try_into().unwrap()), 3);
        assert_eq!(u32::from_le_bytes(b[16..20].try_into().unwrap()), 5);
        assert_eq!(f64::from_le_bytes(b[20..28].try_into().unwrap()), 30.0);
        assert_eq!(b.len(), 44 + 8 * 2 * 9);
    }

    #[test]
    fn binary_rejects_corruption() {
        let mut b = encode_sinogram(&small()).unwrap();
        b.pop();
        assert!(matches!(decode_sinogram(&b), Err(Error::Parse { .. })));
        b[0] = b'X';
        assert!(matches!(decode_sinogram(&b), Err(Error::Parse { row: 1, column: 1, .. })));
        assert!(matches!(decode_sinogram(&[]), Err(Error::Parse { .. })));
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let s = small();
        let text = sinogram_to_csv(&s);
        assert!(text.starts_with("# mrts-csv v1 M=2 K=3 K_prime=5 omega=30 T=0.01 lambda=0.05\n"));
        assert_eq!(sinogram_from_csv(&text).unwrap().rows, s.rows);
        let bad = text.replacen(",", ",x", 1);
        assert!(matches!(sinogram_from_csv(&bad), Err(Error::Parse { row: 2, column: 2, .. })));
        assert!(matches!(sinogram_from_csv(""), Err(Error::Parse { row: 1, .. })));
    }

    #[test]
    fn matrix_ingest_and_normalize() {
        let text = "0,0.5,2,0.5,0\n0,1,-4,1,0\n";
        let g = MatrixGeometry {
            omega: 300.0,
            spacing: 0.1,
            lambda: 0.025,
        };
        let s = sinogram_from_matrix(text, g).unwrap();
        assert_eq!((s.params.angles, s.params.k, s.params.k_prime), (2, 2, 2));
        assert_eq!(s.normalized().sup_norm(), 1.0);
        assert!(matches!(
            sinogram_from_matrix("1,2,3\n1,2\n", g),
            Err(Error::Parse { row: 2, column: 3, .. })
        ));
        assert!(matches!(sinogram_from_matrix("", g), Err(Error::Parse { .. })));
    }

    #[test]
    fn pgm_keeps_range() {
        let img = ImageGrid::from_pixels(3, 2, vec![-1.0, 0.0, 1.0, 0.5, 0.25, 3.0]).unwrap();
        let back = decode_pgm16(&encode_pgm16(&img)).unwrap();
        assert_eq!((back.width(), back.height()), (3, 2));
        for (a, b) in img.pixels().iter().zip(back.pixels()) {
            assert!((a - b).abs() <= 4.0 / 65535.0);
        }
    }

    #[test]
    fn samples_text_round_trip() {
        let seq = SampleSeq::new(-3, vec![0.1, -2.5, 1e-17, 4.0]).unwrap();
        let text = samples_to_text(&seq, "demo\nsecond line");
        assert_eq!(samples_from_text(&text).unwrap(), seq);
        assert!(matches!(samples_from_text("# only\n"), Err(Error::Parse { .. })));
        assert!(matches!(samples_from_text("1\nfoo\n"), Err(Error::Parse { row: 2, .. })));
    }
}
