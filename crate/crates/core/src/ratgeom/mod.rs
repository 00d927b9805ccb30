//! Exact rational arithmetic, a deterministic rational simplex solver, and
//! the cone/hull predicates built on top of it.

mod geometry;
mod lp;
mod rational;

pub use geometry::{
    cone_ri_contains_zero, conv_contains_zero, convex_combination_for_zero, maximal_separator,
    GeomError, Separator,
};
pub use lp::{
    lp_solve, Bound, Constraint, FarkasCertificate, LinearProgram, LpError, LpResult, LpStatus,
    Relation,
};
pub use rational::{
    dot, int, is_zero_vector, max_abs, normalize_max, parse_rational, ratio, scale, sub, vector,
    DisplayVector, ParseRationalError, Rational, Vector,
};
