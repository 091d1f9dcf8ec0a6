//! 6D spatial vector algebra and small dense order-3 tensors for rigid-body
//! dynamics: motion/force vectors, cross-product operators, Plücker
//! transforms, spatial inertia, and the tensor extensions used by the
//! derivative algorithms.

pub mod algebra;
pub mod suite;
pub mod tensor;

pub use algebra::*;
pub use tensor::*;
