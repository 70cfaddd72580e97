use log::info;

use crate::error::{invalid, Error, Result};
use crate::linalg::{norm2, DenseMatrix};
use crate::rng::RandomStream;

use super::generators::{bernoulli_from, default_nnz, gaussian_from, noise_from, sparse_from, structured_from};
use super::pgm::Graymap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatrixKind {
    Gaussian,
    Bernoulli,
    Structured { rank: usize, kappa: f64 },
}

impl MatrixKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Gaussian => "gaussian",
            Self::Bernoulli => "bernoulli",
            Self::Structured { .. } => "structured",
        }
    }
}

/// Generator parameters. `lambda` and `q` default to 5.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceParams {
    pub kind: MatrixKind,
    pub m: usize,
    pub n: usize,
    pub lambda: f64,
    pub q: f64,
    pub nnz: Option<usize>,
    pub seed: u64,
}

impl InstanceParams {
    pub fn new(kind: MatrixKind, m: usize, n: usize) -> Self {
        Self { kind, m, n, lambda: 5.0, q: 5.0, nnz: None, seed: 0 }
    }

    pub fn gaussian(m: usize, n: usize) -> Self {
        Self::new(MatrixKind::Gaussian, m, n)
    }

    pub fn bernoulli(m: usize, n: usize) -> Self {
        Self::new(MatrixKind::Bernoulli, m, n)
    }

    pub fn structured(m: usize, n: usize, rank: usize, kappa: f64) -> Self {
        Self::new(MatrixKind::Structured { rank, kappa }, m, n)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_q(mut self, q: f64) -> Self {
        self.q = q;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_nnz(mut self, nnz: usize) -> Self {
        self.nnz = Some(nnz);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceMetadata {
    pub generator: String,
    pub seed: u64,
    pub rank: Option<usize>,
    pub kappa: Option<f64>,
    pub q: f64,
    /// False when `q > 0` was requested but `N(Aᵀ)` is trivial, so `e = 0`.
    pub noise_applied: bool,
}

/// `b = ŷ + e`, `ŷ = A x̂`, `e ∈ N(Aᵀ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub a: DenseMatrix,
    pub b: Vec<f64>,
    pub x_hat: Vec<f64>,
    pub y_hat: Vec<f64>,
    pub e: Vec<f64>,
    pub lambda: f64,
    pub metadata: InstanceMetadata,
}

/// Builds a full instance from one seeded stream: matrix, then ground
/// truth, then noise.
pub fn build_instance(p: &InstanceParams) -> Result<ProblemInstance> {
    if p.m == 0 || p.n == 0 {
        return Err(invalid("matrix dimensions must be positive"));
    }
    let mut rng = RandomStream::new(p.seed);
    let a = match p.kind {
        MatrixKind::Gaussian => gaussian_from(p.m, p.n, &mut rng)?,
        MatrixKind::Bernoulli => bernoulli_from(p.m, p.n, &mut rng)?,
        MatrixKind::Structured { rank, kappa } => structured_from(p.m, p.n, rank, kappa, &mut rng)?,
    };
    let x_hat = sparse_from(p.n, p.nnz.unwrap_or_else(|| default_nnz(p.n)), &mut rng)?;
    let (rank, kappa) = match p.kind {
        MatrixKind::Structured { rank, kappa } => (Some(rank), Some(kappa)),
        _ => (None, None),
    };
    let metadata = InstanceMetadata {
        generator: p.kind.name().to_string(),
        seed: p.seed,
        rank,
        kappa,
        q: p.q,
        noise_applied: p.q > 0.0,
    };
    assemble(a, x_hat, p.lambda, metadata, &mut rng)
}

/// Image recovery instance: `x̂` is the row-major image scaled to `[0, 1]`,
/// `A` is `m x (width*height)` Gaussian.
pub fn load_image_instance(image: &Graymap, m: usize, q: f64, lambda: f64, seed: u64) -> Result<ProblemInstance> {
    if image.pixels().is_empty() {
        return Err(invalid("empty image"));
    }
    let x_hat = image.to_unit_values();
    if x_hat.iter().all(|&v| v == 0.0) {
        return Err(invalid("all-zero image: relative error would be undefined"));
    }
    let mut rng = RandomStream::new(seed);
    let a = gaussian_from(m, x_hat.len(), &mut rng)?;
    let metadata = InstanceMetadata {
        generator: "image".to_string(),
        seed,
        rank: None,
        kappa: None,
        q,
        noise_applied: q > 0.0,
    };
    assemble(a, x_hat, lambda, metadata, &mut rng)
}

fn assemble(
    a: DenseMatrix,
    x_hat: Vec<f64>,
    lambda: f64,
    mut metadata: InstanceMetadata,
    rng: &mut RandomStream,
) -> Result<ProblemInstance> {
    if !(lambda >= 0.0) {
        return Err(invalid(format!("lambda must be >= 0, got {lambda}")));
    }
    let y_hat = a.mul_vec(&x_hat);
    let e = match noise_from(&a, metadata.q, &y_hat, rng) {
        Ok(e) => e,
        Err(Error::InfeasibleNoise(msg)) => {
            // Full row rank: b is already in R(A); the noise term vanishes.
            info!("{msg}; using e = 0");
            metadata.noise_applied = false;
            vec![0.0; a.rows()]
        }
        Err(other) => return Err(other),
    };
    let b = y_hat.iter().zip(&e).map(|(y, n)| y + n).collect();
    debug_assert!(norm2(&x_hat) > 0.0);
    Ok(ProblemInstance { a, b, x_hat, y_hat, e, lambda, metadata })
}
