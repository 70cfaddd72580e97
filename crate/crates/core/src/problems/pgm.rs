//! Plain (ASCII, `P2`) portable graymap reading and writing.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Bundled 28x28 grayscale digit used by the image-recovery experiment.
pub const BUNDLED_DIGIT: &str = include_str!("../../assets/digit3_28x28.pgm");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graymap {
    width: usize,
    height: usize,
    maxval: u16,
    pixels: Vec<u16>,
}

impl Graymap {
    pub fn new(width: usize, height: usize, maxval: u16, pixels: Vec<u16>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument("empty image".into()));
        }
        if maxval == 0 {
            return Err(Error::InvalidArgument("maxval must be positive".into()));
        }
        if pixels.len() != width * height {
            return Err(Error::InvalidArgument(format!(
                "{} pixels for a {width}x{height} image",
                pixels.len()
            )));
        }
        if let Some(p) = pixels.iter().find(|&&p| p > maxval) {
            return Err(Error::InvalidArgument(format!("pixel {p} exceeds maxval {maxval}")));
        }
        Ok(Self { width, height, maxval, pixels })
    }

    pub fn bundled() -> Self {
        Self::parse(BUNDLED_DIGIT).expect("bundled image is valid")
    }

    /// Scales `[0, 1]` values to `0..=maxval`, clamping and rounding.
    pub fn from_unit_values(width: usize, height: usize, maxval: u16, values: &[f64]) -> Result<Self> {
        let pixels = values
            .iter()
            .map(|v| (v.clamp(0.0, 1.0) * f64::from(maxval)).round() as u16)
            .collect();
        Self::new(width, height, maxval, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn maxval(&self) -> u16 {
        self.maxval
    }

    pub fn pixels(&self) -> &[u16] {
        &self.pixels
    }

    /// Row-major pixel values divided by `maxval`.
    pub fn to_unit_values(&self) -> Vec<f64> {
        let scale = f64::from(self.maxval);
        self.pixels.iter().map(|&p| f64::from(p) / scale).collect()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut tokens = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .flat_map(str::split_whitespace);
        match tokens.next() {
            Some("P2") => {}
            other => return Err(Error::Parse(format!("expected P2 magic, found {other:?}"))),
        }
        let mut header = |what: &str| -> Result<usize> {
            tokens
                .next()
                .ok_or_else(|| Error::Parse(format!("missing {what}")))?
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("bad {what}: {e}")))
        };
        let width = header("width")?;
        let height = header("height")?;
        let maxval = header("maxval")?;
        let maxval = u16::try_from(maxval).map_err(|_| Error::Parse(format!("maxval {maxval} too large")))?;
        let pixels = tokens
            .map(|t| t.parse::<u16>().map_err(|e| Error::Parse(format!("bad pixel '{t}': {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(width, height, maxval, pixels)
    }

    /// Canonical P2 text: header lines then one image row per line.
    pub fn to_pgm_string(&self) -> String {
        let mut out = format!("P2\n{} {}\n{}\n", self.width, self.height, self.maxval);
        for row in self.pixels.chunks(self.width) {
            let mut first = true;
            for p in row {
                if !first {
                    out.push(' ');
                }
                first = false;
                let _ = write!(out, "{p}");
            }
            out.push('\n');
        }
        out
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_pgm_string())?;
        Ok(())
    }
}
