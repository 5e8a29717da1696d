//! Dense complex matrices, real tensors, norms, SVD and norm derivatives.

mod derivative;
mod matrix;
mod norms;
mod smoothness;
mod svd;

pub use derivative::{lp_directional_derivative, schatten_directional_derivative, DerivativeFunctional};
pub use matrix::{ComplexMatrix, NnTensor};
pub use norms::{lp_norm, schatten_norm, schatten_quasinorm, singular_values, Entrywise};
pub use smoothness::{check_hanner, estimate_modulus_of_smoothness, smoothness_bound, random_complex_matrix, random_hermitian};
pub use svd::{hermitian_eigenvalues, svd, SvdResult, SVD_RELATIVE_CUTOFF};
