//! Entanglement witnesses, local measurement decompositions and
//! separability certification for small multipartite quantum systems.

pub mod decomp;
pub mod error;
pub mod linalg;
pub mod measure;
pub mod montecarlo;
pub mod random;
pub mod seesaw;
pub mod states;
pub mod witness;

pub use decomp::{LocalDecomposition, ProductVectorDecomposition, Setting, TensorDecomposition};
pub use error::{Error, Result};
pub use linalg::{Operator, C64, CMatrix, CVector};
pub use measure::{Estimate, ShotRecord};
pub use montecarlo::ErrorCurve;
pub use states::{DensityMatrix, NoiseBallSpec};
pub use witness::Witness;
