//! Exact constructive solver for sparse colorful KKM covers on polytopes,
//! with colorful `d`-interval piercing and multi-cake division built on top.

pub mod bad_edge;
pub mod cake;
pub mod cover;
pub mod d_interval;
pub mod error;
pub mod exact_math;
pub mod hypergraph;
pub mod polytope;
pub mod solver;
pub mod triangulation;
pub mod wire;

pub use error::{Error, Result};
pub use exact_math::{Rat, RatPoint};
pub use polytope::{AnchorTable, FaceId, PolytopeModel};
pub use solver::{solve, SolveCertificate};
pub use triangulation::Triangulation;
