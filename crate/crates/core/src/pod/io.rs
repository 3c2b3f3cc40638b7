use super::SnapshotMatrix;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

pub const MAGIC: &[u8; 6] = b"SNAP1\x01";
const HEADER: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SnapshotFormat {
    Bin,
    Csv,
}

impl SnapshotFormat {
    /// `.csv` means CSV, anything else binary.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => SnapshotFormat::Csv,
            _ => SnapshotFormat::Bin,
        }
    }
}

impl FromStr for SnapshotFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bin" => Ok(SnapshotFormat::Bin),
            "csv" => Ok(SnapshotFormat::Csv),
            other => Err(Error::Config(format!("unknown snapshot format '{other}'"))),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn load_snapshots(path: &Path, format: SnapshotFormat) -> Result<SnapshotMatrix<f64>> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    let data = match format {
        SnapshotFormat::Bin => parse_bin(&bytes)?,
        SnapshotFormat::Csv => parse_csv(&bytes)?,
    };
    SnapshotMatrix::new(data)
}

fn parse_err(offset: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        offset,
        message: message.into(),
    }
}

/// Decodes the binary layout (column-major payload) into a row-major matrix.
pub fn parse_bin(bytes: &[u8]) -> Result<Matrix<f64>> {
    if bytes.len() < HEADER {
        return Err(parse_err(
            bytes.len(),
            format!("header needs {HEADER} bytes, file has {}", bytes.len()),
        ));
    }
    if &bytes[..6] != MAGIC {
        return Err(parse_err(0, "bad magic, expected \"SNAP1\" version 1"));
    }
    let m = u32::from_le_bytes(bytes[6..10].try_into().unwrap()) as usize;
    let n = u32::from_le_bytes(bytes[10..14].try_into().unwrap()) as usize;
    let expected = HEADER + 8 * m * n;
    if bytes.len() != expected {
        return Err(parse_err(
            bytes.len().min(expected),
            format!(
                "expected {expected} bytes for {m}x{n}, file has {}",
                bytes.len()
            ),
        ));
    }
    let mut out = Matrix::zeros(m, n);
    let dst = out.as_mut_slice();
    for (idx, chunk) in bytes[HEADER..].chunks_exact(8).enumerate() {
        let x = f64::from_le_bytes(chunk.try_into().unwrap());
        if !x.is_finite() {
            return Err(parse_err(HEADER + 8 * idx, format!("non-finite value {x}")));
        }
        let (j, i) = (idx / m, idx % m);
        dst[i * n + j] = x;
    }
    Ok(out)
}

pub fn parse_csv(bytes: &[u8]) -> Result<Matrix<f64>> {
    let text =
        std::str::from_utf8(bytes).map_err(|e| parse_err(e.valid_up_to(), "invalid UTF-8"))?;
    let mut offset = 0;
    let mut lines = text.split_inclusive('\n').map(|l| {
        let start = offset;
        offset += l.len();
        (start, l.trim_end_matches(['\n', '\r']))
    });
    let (hoff, header) = lines.next().ok_or_else(|| parse_err(0, "empty file"))?;
    let dims: Vec<&str> = header.split(',').map(str::trim).collect();
    if dims.len() != 2 {
        return Err(parse_err(hoff, "header must be \"m,n\""));
    }
    let parse_dim = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| parse_err(hoff, format!("bad dimension '{s}'")))
    };
    let (m, n) = (parse_dim(dims[0])?, parse_dim(dims[1])?);
    let mut out = Matrix::zeros(m, n);
    let mut row = 0;
    for (loff, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        if row == m {
            return Err(parse_err(loff, format!("more than {m} data rows")));
        }
        let mut col = 0;
        let mut foff = loff;
        for field in line.split(',') {
            if col == n {
                return Err(parse_err(
                    foff,
                    format!("row {} has more than {n} values", row + 1),
                ));
            }
            let x: f64 = field
                .trim()
                .parse()
                .map_err(|_| parse_err(foff, format!("bad number '{}'", field.trim())))?;
            if !x.is_finite() {
                return Err(parse_err(foff, format!("non-finite value {x}")));
            }
            out[(row, col)] = x;
            col += 1;
            foff += field.len() + 1;
        }
        if col != n {
            return Err(parse_err(
                loff,
                format!("row {} has {col} values, expected {n}", row + 1),
            ));
        }
        row += 1;
    }
    if row != m {
        return Err(parse_err(
            text.len(),
            format!("expected {m} data rows, found {row}"),
        ));
    }
    Ok(out)
}

pub fn encode_bin(x: &Matrix<f64>) -> Vec<u8> {
    let (m, n) = x.shape();
    let mut out = Vec::with_capacity(HEADER + 8 * m * n);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(m as u32).to_le_bytes());
    out.extend_from_slice(&(n as u32).to_le_bytes());
    for j in 0..n {
        for i in 0..m {
            out.extend_from_slice(&x[(i, j)].to_le_bytes());
        }
    }
    out
}

pub fn encode_csv(x: &Matrix<f64>) -> String {
    let (m, n) = x.shape();
    let mut s = format!("{m},{n}\n");
    for i in 0..m {
        for j in 0..n {
            if j > 0 {
                s.push(',');
            }
            let _ = write!(s, "{:e}", x[(i, j)]);
        }
        s.push('\n');
    }
    s
}

pub fn save_matrix(path: &Path, x: &Matrix<f64>, format: SnapshotFormat) -> Result<()> {
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    match format {
        SnapshotFormat::Bin => f.write_all(&encode_bin(x)),
        SnapshotFormat::Csv => f.write_all(encode_csv(x).as_bytes()),
    }
    .map_err(io_err(path))
}
