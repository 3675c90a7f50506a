//! Rank-one quasicrystalline rings over real quadratic fields.
//!
//! Cut-and-project sets `{α ∈ 𝔄 : |α'| < w}` are enumerated exactly and fed to
//! the analytic machinery: zeta and L functions with continuation, theta
//! functions and the Poisson–Meyer functional equation, the modular invariant
//! `J = ζ(6)²/ζ(4)³` with its Diophantine counterpart, and the product-defined
//! trigonometric functions.

pub mod error;
pub mod modelset;
pub mod modular;
pub mod numberfield;
pub mod numeric;
pub mod qctrig;
pub mod theta;
pub mod zeta;

pub use error::{QcError, Result};
pub use modelset::{CloudPoint, ModelSetSpec, PointCloud, WindowBound, WindowSpec};
pub use numberfield::{FieldElement, OmegaKind, QuadraticField};
pub use zeta::{EvalResult, Method};

