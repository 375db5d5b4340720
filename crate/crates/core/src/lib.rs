//! Exact computations with connected cochain DG algebras and their modules.

pub mod algebra;
pub mod basis;
pub mod catalog;
pub mod complex;
pub mod error;
pub mod field;
pub mod linalg;
pub mod local_cohomology;
pub mod module;
pub mod regularity;
pub mod resolution;
pub mod tensor_hom;
pub mod torsion;
pub mod window;

pub use algebra::{DgAlgebra, SharedAlgebra};
pub use basis::{BasisRef, GradedBasis};
pub use error::{Error, Result};
pub use field::{Field, Scalar};
pub use module::{DgModule, ModuleMap, Side};
pub use window::Window;
