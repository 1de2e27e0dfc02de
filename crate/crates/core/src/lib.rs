//! Group calculus, mixed-Hessian verification and oscillatory operator norms on
//! Heisenberg-type groups.
//!
//! The algebraic layers are generic over [`Scalar`]; the aliases below fix
//! `f64`, which is what the numerical experiments use.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fields;
pub mod group;
pub mod jet;
pub mod linalg;
pub mod closed_forms;
pub mod norms;
pub mod oscillatory;
pub mod sampling;
pub mod scalar;
pub mod degeneracy;

pub use error::{Error, Result};
pub use fields::{FieldIndex, ScalarFn, Side};
pub use group::Variant;
pub use jet::Jet2;
pub use norms::NormKind;
pub use scalar::{Real, Scalar};

pub type GroupContext = group::GroupContext<f64>;
pub type GroupPoint = group::GroupPoint<f64>;
pub type QuasiNormSpec = norms::QuasiNormSpec<f64>;
pub type PhaseSpec = norms::PhaseSpec<f64>;
pub type Matrix = linalg::SquareMatrix<f64>;
