use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::problems::{InstanceParams, MatrixKind};

/// Plain text: a line `m n` followed by `m` lines of `n` numbers, each
/// written with 17 significant digits.
pub fn format_matrix(a: &DenseMatrix) -> String {
    let mut out = format!("{} {}\n", a.rows(), a.cols());
    for i in 0..a.rows() {
        push_numbers(&mut out, a.row(i));
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<DenseMatrix> {
    let mut tokens = numeric_tokens(text);
    let mut dim = |what: &str| -> Result<usize> {
        let t = tokens.next().ok_or_else(|| Error::Parse(format!("missing {what}")))?;
        t.parse().map_err(|e| Error::Parse(format!("bad {what} '{t}': {e}")))
    };
    let m = dim("row count")?;
    let n = dim("column count")?;
    let data = tokens.map(parse_f64).collect::<Result<Vec<_>>>()?;
    if data.len() != m * n {
        return Err(Error::Parse(format!("expected {} entries for {m}x{n}, found {}", m * n, data.len())));
    }
    DenseMatrix::from_row_major(m, n, data)
}

/// Whitespace-separated numbers, written one per line.
pub fn format_vector(v: &[f64]) -> String {
    let mut out = String::new();
    for x in v {
        let _ = writeln!(out, "{x:.16e}");
    }
    out
}

pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let v = numeric_tokens(text).map(parse_f64).collect::<Result<Vec<_>>>()?;
    if v.is_empty() {
        return Err(Error::Parse("empty vector".into()));
    }
    Ok(v)
}

pub fn read_matrix(path: &Path) -> Result<DenseMatrix> {
    parse_matrix(&std::fs::read_to_string(path)?)
}

pub fn write_matrix(path: &Path, a: &DenseMatrix) -> Result<()> {
    std::fs::write(path, format_matrix(a))?;
    Ok(())
}

pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    parse_vector(&std::fs::read_to_string(path)?)
}

pub fn write_vector(path: &Path, v: &[f64]) -> Result<()> {
    std::fs::write(path, format_vector(v))?;
    Ok(())
}

fn push_numbers(out: &mut String, xs: &[f64]) {
    for (k, x) in xs.iter().enumerate() {
        if k > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{x:.16e}");
    }
    out.push('\n');
}

fn numeric_tokens(text: &str) -> impl Iterator<Item = &str> {
    text.lines().map(|l| l.split('#').next().unwrap_or("")).flat_map(str::split_whitespace)
}

fn parse_f64(t: &str) -> Result<f64> {
    let v: f64 = t.parse().map_err(|e| Error::Parse(format!("bad number '{t}': {e}")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("non-finite number '{t}'")));
    }
    Ok(v)
}

/// Where a matrix comes from: a file, or a generator written as
/// `gen:<kind>:<m>x<n>[:key=value]...` with kind `gaussian`, `bernoulli` or
/// `structured` and keys `rank`, `kappa`, `seed`, `lambda`, `q`, `nnz`.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixSource {
    File(PathBuf),
    Generated(InstanceParams),
}

impl FromStr for MatrixSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let Some(rest) = s.strip_prefix("gen:") else {
            return Ok(Self::File(PathBuf::from(s)));
        };
        let mut parts = rest.split(':');
        let kind = parts.next().unwrap_or("");
        let dims = parts.next().ok_or_else(|| Error::Parse(format!("missing MxN in '{s}'")))?;
        let (m, n) = dims
            .split_once(['x', 'X'])
            .ok_or_else(|| Error::Parse(format!("dimensions '{dims}' must look like 200x100")))?;
        let m: usize = m.parse().map_err(|e| Error::Parse(format!("bad row count '{m}': {e}")))?;
        let n: usize = n.parse().map_err(|e| Error::Parse(format!("bad column count '{n}': {e}")))?;

        let mut params = InstanceParams::gaussian(m, n);
        let (mut rank, mut kappa) = (None, None);
        for kv in parts {
            let (k, v) = kv.split_once('=').ok_or_else(|| Error::Parse(format!("expected key=value, got '{kv}'")))?;
            let num = |v: &str| v.parse::<f64>().map_err(|e| Error::Parse(format!("bad value for {k}: {e}")));
            let int = |v: &str| v.parse::<u64>().map_err(|e| Error::Parse(format!("bad value for {k}: {e}")));
            match k {
                "rank" => rank = Some(int(v)? as usize),
                "kappa" => kappa = Some(num(v)?),
                "seed" => params.seed = int(v)?,
                "lambda" => params.lambda = num(v)?,
                "q" => params.q = num(v)?,
                "nnz" => params.nnz = Some(int(v)? as usize),
                other => return Err(Error::Parse(format!("unknown generator key '{other}'"))),
            }
        }
        params.kind = match kind {
            "gaussian" => MatrixKind::Gaussian,
            "bernoulli" => MatrixKind::Bernoulli,
            "structured" => MatrixKind::Structured {
                rank: rank.unwrap_or(m.min(n)),
                kappa: kappa.ok_or_else(|| Error::Parse("structured generator needs kappa=".into()))?,
            },
            other => return Err(Error::Parse(format!("unknown generator kind '{other}'"))),
        };
        Ok(Self::Generated(params))
    }
}
