//! Hierarchical symbolic and tiling structures with exact verification.
//!
//! The crate is organised bottom-up:
//!
//! - [`symbolic`]: alphabets, patterns, windows, periodic configurations.
//! - [`subst1d`] and [`subst2d`]: substitution rules, level-n letters and
//!   language enumeration.
//! - [`finite_type`]: window shifts of finite type, periodic points and
//!   separation certificates.
//! - [`sliding_block`]: block maps, their application and composition.
//! - [`golden`]: exact arithmetic in `Q[tau]`.
//! - [`tiling_line`]: one-dimensional Fibonacci tilings, the tiling metric and
//!   the hierarchical conjugacy between tile-length choices.
//! - [`tiling_plane`]: row tilings, neighbourhood censuses, product tilings and
//!   periodic frames.

pub mod error;
pub mod finite_type;
pub mod golden;
pub mod sliding_block;
pub mod subst1d;
pub mod subst2d;
pub mod symbolic;
pub mod tiling_line;
pub mod tiling_plane;

pub use error::{Error, Result};
pub use golden::GoldenNumber;
pub use symbolic::{Alphabet, Dimension, Pattern, PeriodicConfig, Point, Symbol, Window};
