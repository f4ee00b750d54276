//! Packings and coverings of the plane by ellipses and discs.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod disc;
pub mod ellipse;
pub mod error;
pub mod geom;
pub mod inscription;
pub mod io;
pub mod periodic;
pub mod render;
pub mod tiler;
pub mod verify;

pub use ellipse::{Contact, Disc, Ellipse, Location};
pub use error::{Error, Result};
pub use geom::{AffineMap2, Aabb, ConvexPolygon, Mat2, Point2, Triangle, Vec2};
