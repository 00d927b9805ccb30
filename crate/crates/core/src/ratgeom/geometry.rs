//! Convex-geometry predicates on finite point sets, each decided by one
//! exact linear program.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::lp::{lp_solve, Bound, LinearProgram, LpError, Relation};
use super::rational::{dot, normalize_max, DisplayVector, Rational, Vector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeomError {
    #[error("empty point set")]
    EmptyPointSet,
    #[error("point {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("anchor {anchor} out of range for {len} points")]
    AnchorOutOfRange { anchor: usize, len: usize },
    #[error("0 is not in the relative interior of the generated cone; separator {}", DisplayVector(&.separator.direction))]
    NotInRelativeInterior { separator: Separator },
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// A direction `H` with `H·x >= 0` on every point, strictly positive on `strict`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Separator {
    /// Scaled so that its largest absolute component is 1.
    pub direction: Vector,
    pub strict: BTreeSet<usize>,
}

fn dimension(points: &[Vector]) -> Result<usize, GeomError> {
    let first = points.first().ok_or(GeomError::EmptyPointSet)?;
    let d = first.len();
    for (index, p) in points.iter().enumerate() {
        if p.len() != d {
            return Err(GeomError::DimensionMismatch {
                index,
                expected: d,
                found: p.len(),
            });
        }
    }
    Ok(d)
}

/// Rows `Σ λ_i = 1` and `Σ λ_i x_i = 0` over nonnegative weights.
fn zero_combination_program(points: &[Vector], d: usize) -> LinearProgram {
    let n = points.len();
    let mut lp = LinearProgram::new(n);
    lp.add_constraint(vec![Rational::one(); n], Relation::Eq, Rational::one());
    for k in 0..d {
        let row = points.iter().map(|p| p[k].clone()).collect();
        lp.add_constraint(row, Relation::Eq, Rational::zero());
    }
    lp
}

/// Whether 0 is a convex combination of `points`.
pub fn conv_contains_zero(points: &[Vector]) -> Result<bool, GeomError> {
    let d = dimension(points)?;
    Ok(lp_solve(&zero_combination_program(points, d))?.is_optimal())
}

/// Whether 0 lies in the relative interior of the cone generated by `points`
/// (together with the origin). Equivalently, no direction is nonnegative on
/// every point and positive on one of them.
pub fn cone_ri_contains_zero(points: &[Vector]) -> Result<bool, GeomError> {
    Ok(maximal_separator(points)?.is_none())
}

/// The separator whose strict set is the union of the strict sets of all
/// valid separators, or `None` when no point can be strictly separated.
///
/// Solved as `max Σ s_i` subject to `H·x_i >= s_i`, `0 <= s_i <= 1` with `H`
/// free. The optimum equals the number of separable points and every
/// separable point attains `s_i = 1`, so the strict set at any optimal vertex
/// is the maximal one.
pub fn maximal_separator(points: &[Vector]) -> Result<Option<Separator>, GeomError> {
    let d = dimension(points)?;
    let n = points.len();
    let mut objective = vec![Rational::zero(); d];
    objective.extend(std::iter::repeat_n(Rational::one(), n));
    let mut lp = LinearProgram::new(d + n).maximize(objective);
    for k in 0..d {
        lp.set_bound(k, Bound::free());
    }
    for i in 0..n {
        lp.set_bound(d + i, Bound::between(Rational::zero(), Rational::one()));
        let mut row: Vec<Rational> = points[i].clone();
        row.extend((0..n).map(|j| {
            if j == i {
                -Rational::one()
            } else {
                Rational::zero()
            }
        }));
        lp.add_constraint(row, Relation::Ge, Rational::zero());
    }
    let res = lp_solve(&lp)?;
    let value = res.objective.expect("bounded and feasible by construction");
    if value.is_zero() {
        return Ok(None);
    }
    let solution = res.solution.expect("optimal");
    let direction = normalize_max(&solution[..d]);
    let strict = points
        .iter()
        .enumerate()
        .filter(|(_, p)| dot(&direction, p).is_positive())
        .map(|(i, _)| i)
        .collect();
    Ok(Some(Separator { direction, strict }))
}

/// Weights `λ >= 0`, `Σλ = 1`, `Σ λ_i x_i = 0` maximizing `λ_anchor`.
///
/// Requires 0 in the relative interior of the generated cone, which makes
/// `λ_anchor > 0`; otherwise the error carries the separating direction.
pub fn convex_combination_for_zero(
    points: &[Vector],
    anchor: usize,
) -> Result<Vec<Rational>, GeomError> {
    let d = dimension(points)?;
    if anchor >= points.len() {
        return Err(GeomError::AnchorOutOfRange {
            anchor,
            len: points.len(),
        });
    }
    if let Some(separator) = maximal_separator(points)? {
        return Err(GeomError::NotInRelativeInterior { separator });
    }
    let mut lp = zero_combination_program(points, d);
    lp.objective[anchor] = Rational::one();
    let res = lp_solve(&lp)?;
    let weights = res.solution.expect("0 in ri implies feasibility");
    debug_assert!(weights[anchor].is_positive());
    Ok(weights)
}
