//! Synthetic and image-based test problems `b = A x̂ + e` with `e ∈ N(Aᵀ)`.

mod generators;
mod instance;
mod pgm;

pub use generators::{
    default_nnz, gen_bernoulli, gen_gaussian, gen_sparse_solution, gen_structured, null_space_noise,
    NULL_SPACE_RANK_TOL,
};
pub use instance::{
    build_instance, load_image_instance, InstanceMetadata, InstanceParams, MatrixKind, ProblemInstance,
};
pub use pgm::{Graymap, BUNDLED_DIGIT};
