//! Exact rational arithmetic: points, small dense linear algebra, and a
//! Bland's-rule simplex solver used for hull membership and fractional matchings.

mod linalg;
mod lp;
mod point;
mod rat;

pub use linalg::{determinant, pivot_columns, rank};
pub use lp::{in_convex_hull, lp_max, Constraint, LinearProgram, LpOutcome, Relation};
pub use point::{iterated_barycenter, midpoint, RatPoint};
pub use rat::{int, rat, Rat};
