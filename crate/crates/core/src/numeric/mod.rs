//! Numerical building blocks shared by the physics modules.

pub mod eigen;
pub mod quadrature;
pub mod root;
pub mod special;

pub use eigen::{hermitian_eigen, hermitian_eigenvalues, HermitianEigen};
pub use quadrature::{gauss_hermite, NeumaierSum};
pub use root::bisect;
