//! Encodings of ranked tree shapes and conversions between them.

pub mod code;
pub mod enumerate;
pub mod fmatrix;
pub mod hetero;

pub use code::{validate_code, RankedShapeCode};
pub use enumerate::{enumerate_shapes, enumerate_shapes_capped, for_each_shape, DEFAULT_ENUMERATION_CAP};
pub use fmatrix::{validate_fmatrix, Constraint, DMatrix, FMatrix, Violation};
pub use hetero::{validate_hetero_code, HeteroProperty, HeteroShapeCode, HeteroViolation};
