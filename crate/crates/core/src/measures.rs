//! Martingale measures: the polytope they form, finitely supported measures
//! charging a chosen scenario, convex mixtures, and measures charging every
//! set of a class.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::market::{
    natural_filtration, DiscreteMeasure, Market, Partition, ScenarioSet, SignificantClass,
};
use crate::ratgeom::{
    convex_combination_for_zero, is_zero_vector, LinearProgram, Rational, Relation, Vector,
};
use crate::splitter::PolarAnalysis;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeasureError {
    #[error("scenario {id:?} is M-polar: no martingale measure charges it")]
    Polar { id: String },
    #[error("nothing to mix")]
    EmptyMix,
    #[error("{measures} measures but {weights} mixing weights")]
    MixArity { measures: usize, weights: usize },
    #[error("mixing weight {index} is not strictly positive")]
    NonPositiveWeight { index: usize },
    #[error("mixing weights sum to {total}, not 1")]
    WeightsNotNormalized { total: Rational },
    #[error("measure {index} has {found} weights, expected {expected}")]
    LengthMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
}

/// One martingale equality `Σ_{ω∈atom} q_ω (S_t(ω) - S_{t-1}(ω))_asset = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MartingaleRow {
    pub period: usize,
    pub atom: ScenarioSet,
    pub asset: usize,
    /// Dense over all scenarios (zero outside `atom`).
    pub coefficients: Vec<Rational>,
}

/// The martingale measures as the feasible set of `q >= 0`, `Σ q = 1` and the
/// rows below. Rows that vanish identically are omitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MartingalePolytope {
    pub scenarios: usize,
    pub rows: Vec<MartingaleRow>,
}

impl MartingalePolytope {
    /// The polytope as a linear program maximizing `objective`.
    pub fn program(&self, objective: Vec<Rational>) -> LinearProgram {
        let mut lp = LinearProgram::new(self.scenarios).maximize(objective);
        lp.add_constraint(
            vec![Rational::one(); self.scenarios],
            Relation::Eq,
            Rational::one(),
        );
        for row in &self.rows {
            lp.add_constraint(row.coefficients.clone(), Relation::Eq, Rational::zero());
        }
        lp
    }

    pub fn contains(&self, q: &DiscreteMeasure) -> bool {
        q.len() == self.scenarios
            && self
                .program(vec![Rational::zero(); self.scenarios])
                .is_feasible_point(q.weights())
    }
}

/// Martingale rows for `filtration`, ordered by period, atom, asset.
pub fn polytope_for(m: &Market, filtration: &[Partition]) -> MartingalePolytope {
    let mut rows = Vec::new();
    for t in 1..=m.horizon() {
        for atom in filtration[t - 1].atoms() {
            for asset in 0..m.assets() {
                let mut coefficients = vec![Rational::zero(); m.len()];
                for &w in atom {
                    let p = m.price(t, w);
                    let q = m.price(t - 1, w);
                    coefficients[w] = &p[asset] - &q[asset];
                }
                if coefficients.iter().any(|c| !c.is_zero()) {
                    rows.push(MartingaleRow {
                        period: t,
                        atom: atom.clone(),
                        asset,
                        coefficients,
                    });
                }
            }
        }
    }
    MartingalePolytope {
        scenarios: m.len(),
        rows,
    }
}

/// The martingale polytope of the natural filtration.
pub fn build_polytope(m: &Market) -> MartingalePolytope {
    polytope_for(m, &natural_filtration(m))
}

/// Exact check of every per-atom martingale equality of `filtration`.
pub fn check_martingale(m: &Market, q: &DiscreteMeasure, filtration: &[Partition]) -> bool {
    if q.len() != m.len() || filtration.len() < m.horizon() {
        return false;
    }
    (1..=m.horizon()).all(|t| {
        filtration[t - 1].atoms().iter().all(|atom| {
            let mut drift = vec![Rational::zero(); m.assets()];
            for &w in atom {
                let weight = q.weight(w);
                if weight.is_zero() {
                    continue;
                }
                for (k, dx) in m.increment(t, w).into_iter().enumerate() {
                    drift[k] += weight * dx;
                }
            }
            is_zero_vector(&drift)
        })
    })
}

/// A finitely supported martingale measure charging `target`, built forward
/// in time: each charged level set of the surviving scenarios distributes its
/// mass over its children with weights that make 0 a convex combination of
/// the increments, favouring the child on `target`'s path.
pub fn supporting_measure(
    m: &Market,
    pa: &PolarAnalysis,
    target: usize,
) -> Result<DiscreteMeasure, MeasureError> {
    if !pa.omega_star.contains(&target) {
        return Err(MeasureError::Polar {
            id: m.id(target).to_string(),
        });
    }
    let filtration = natural_filtration(m);
    let survivors = &pa.omega_star;

    // Charged level sets of the surviving scenarios at time t - 1, with mass.
    let start = filtration[0]
        .restrict(survivors)
        .atom_of(target)
        .cloned()
        .expect("target survives");
    let mut charged: Vec<(ScenarioSet, Rational)> = vec![(start, Rational::one())];
    for t in 1..=m.horizon() {
        let children = filtration[t].restrict(survivors);
        let mut next: BTreeMap<usize, Rational> = BTreeMap::new();
        for (level_set, mass) in &charged {
            let members: Vec<usize> = level_set.iter().copied().collect();
            let anchor_scenario = if level_set.contains(&target) {
                target
            } else {
                members[0]
            };
            let anchor = members.iter().position(|&w| w == anchor_scenario).unwrap();
            let points: Vec<Vector> = members.iter().map(|&w| m.increment(t, w)).collect();
            let lambda = convex_combination_for_zero(&points, anchor)
                .expect("surviving level sets contain 0 in the relative interior");
            for (&w, l) in members.iter().zip(lambda) {
                if l.is_positive() {
                    let child = children.atom_of(w).unwrap();
                    *next
                        .entry(*child.first().unwrap())
                        .or_insert_with(Rational::zero) += mass * l;
                }
            }
        }
        charged = next
            .into_iter()
            .map(|(first, mass)| (children.atom_of(first).unwrap().clone(), mass))
            .collect();
    }

    // Terminal atoms hold scenarios with identical paths; put each atom's mass
    // on the target when present, else on its first scenario.
    let mut weights = vec![Rational::zero(); m.len()];
    for (atom, mass) in charged {
        let w = if atom.contains(&target) {
            target
        } else {
            *atom.first().unwrap()
        };
        weights[w] = mass;
    }
    let q = DiscreteMeasure::new(weights).expect("masses are nonnegative and sum to 1");
    debug_assert!(check_martingale(m, &q, &filtration));
    debug_assert!(q.weight(target).is_positive());
    Ok(q)
}

/// The convex combination `Σ weights[i] · measures[i]`.
pub fn mix(
    measures: &[DiscreteMeasure],
    weights: &[Rational],
) -> Result<DiscreteMeasure, MeasureError> {
    let first = measures.first().ok_or(MeasureError::EmptyMix)?;
    if measures.len() != weights.len() {
        return Err(MeasureError::MixArity {
            measures: measures.len(),
            weights: weights.len(),
        });
    }
    if let Some(index) = weights.iter().position(|w| !w.is_positive()) {
        return Err(MeasureError::NonPositiveWeight { index });
    }
    let total: Rational = weights.iter().sum();
    if !total.is_one() {
        return Err(MeasureError::WeightsNotNormalized { total });
    }
    let n = first.len();
    let mut out = vec![Rational::zero(); n];
    for (index, (q, a)) in measures.iter().zip(weights).enumerate() {
        if q.len() != n {
            return Err(MeasureError::LengthMismatch {
                index,
                expected: n,
                found: q.len(),
            });
        }
        for (o, w) in out.iter_mut().zip(q.weights()) {
            *o += a * w;
        }
    }
    Ok(DiscreteMeasure::new(out).expect("convex combination of probabilities"))
}

/// Weights `2^-n / (1 - 2^-count)` for `n = 1..=count`: positive and summing to 1.
pub fn dyadic_weights(count: usize) -> Vec<Rational> {
    let two = Rational::from_integer(2.into());
    let mut raw = Vec::with_capacity(count);
    let mut w = Rational::one();
    for _ in 0..count {
        w /= &two;
        raw.push(w.clone());
    }
    let total: Rational = raw.iter().sum();
    raw.into_iter().map(|x| x / &total).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FullSupport {
    pub measure: DiscreteMeasure,
    /// Whether the support is every scenario.
    pub full: bool,
}

/// A martingale measure whose support is exactly the surviving set, or
/// `None` when no martingale measure exists.
pub fn full_support_measure(m: &Market, pa: &PolarAnalysis) -> Option<FullSupport> {
    if pa.omega_star.is_empty() {
        return None;
    }
    let parts: Vec<DiscreteMeasure> = pa
        .omega_star
        .iter()
        .map(|&w| supporting_measure(m, pa, w).expect("surviving scenario"))
        .collect();
    let measure = mix(&parts, &dyadic_weights(parts.len())).expect("dyadic weights are normalized");
    debug_assert_eq!(measure.support(), pa.omega_star);
    Some(FullSupport {
        full: pa.omega_star.len() == m.len(),
        measure,
    })
}

/// A martingale measure giving positive mass to every set of `class`, or
/// `None` when some set of the class is entirely polar.
pub fn class_measure(
    m: &Market,
    pa: &PolarAnalysis,
    class: &SignificantClass,
) -> Option<DiscreteMeasure> {
    let mut anchors = ScenarioSet::new();
    for c in class.sets() {
        anchors.insert(*c.intersection(&pa.omega_star).next()?);
    }
    let parts: Vec<DiscreteMeasure> = anchors
        .iter()
        .map(|&w| supporting_measure(m, pa, w).expect("anchor survives"))
        .collect();
    let share = Rational::new(1.into(), parts.len().into());
    let q = mix(&parts, &vec![share; parts.len()]).ok()?;
    debug_assert!(class.sets().iter().all(|c| q.mass(c).is_positive()));
    Some(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::ratgeom::{int, lp_solve, ratio};
    use crate::splitter::{backward_eliminate, universal_aggregator};

    fn set(xs: &[usize]) -> ScenarioSet {
        xs.iter().copied().collect()
    }

    fn singletons(m: &Market) -> SignificantClass {
        SignificantClass::new("1p", (0..m.len()).map(|w| set(&[w])).collect()).unwrap()
    }

    #[test]
    fn polytope_feasibility() {
        let svu = build_polytope(&fixtures::svu());
        assert!(lp_solve(&svu.program(vec![int(1), int(0), int(0), int(0)]))
            .unwrap()
            .is_infeasible());

        let multi = build_polytope(&fixtures::multi());
        assert!(lp_solve(&multi.program(vec![int(0); 4]))
            .unwrap()
            .is_infeasible());

        let constant = Market::from_integer_paths(1, &[("c", vec![vec![3], vec![3]])]).unwrap();
        let p = build_polytope(&constant);
        assert!(p.rows.is_empty());
        let r = lp_solve(&p.program(vec![int(1)])).unwrap();
        assert_eq!(r.solution, Some(vec![int(1)]));
    }

    #[test]
    fn polytope_rows_are_ordered() {
        let p = build_polytope(&fixtures::multi());
        let keys: Vec<(usize, usize, usize)> = p
            .rows
            .iter()
            .map(|r| (r.period, *r.atom.first().unwrap(), r.asset))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn martingale_check_examples() {
        let svu = fixtures::svu();
        let f = natural_filtration(&svu);
        assert!(!check_martingale(&svu, &DiscreteMeasure::uniform(4), &f));
        let flat = fixtures::constant();
        assert!(check_martingale(
            &flat,
            &DiscreteMeasure::dirac(1, 0),
            &natural_filtration(&flat)
        ));
    }

    #[test]
    fn supporting_measures() {
        let cna = fixtures::count_na();
        let pa = backward_eliminate(&cna);
        for w in [2, 3] {
            assert_eq!(
                supporting_measure(&cna, &pa, w).unwrap(),
                DiscreteMeasure::dirac(4, w)
            );
        }
        assert!(matches!(
            supporting_measure(&cna, &pa, 0),
            Err(MeasureError::Polar { .. })
        ));

        let pair = Market::from_integer_paths(
            1,
            &[
                ("up", vec![vec![5], vec![7]]),
                ("down", vec![vec![5], vec![4]]),
            ],
        )
        .unwrap();
        let pa = backward_eliminate(&pair);
        let q = supporting_measure(&pair, &pa, 0).unwrap();
        assert_eq!(q.weights(), &[ratio(1, 3), ratio(2, 3)]);

        let svu = fixtures::svu();
        let pa = backward_eliminate(&svu);
        assert!((0..4).all(|w| supporting_measure(&svu, &pa, w).is_err()));
    }

    #[test]
    fn measures_are_martingales_for_both_filtrations() {
        for (_, doc) in fixtures::ALL {
            let Ok(m) = crate::market::load_market(doc) else {
                continue;
            };
            let pa = backward_eliminate(&m);
            let enlarged = universal_aggregator(&m, &pa).enlarged;
            let natural = natural_filtration(&m);
            for &w in &pa.omega_star {
                let q = supporting_measure(&m, &pa, w).unwrap();
                assert!(q.weight(w).is_positive());
                assert!(q.support().is_subset(&pa.omega_star));
                assert!(check_martingale(&m, &q, &natural) && check_martingale(&m, &q, &enlarged));
            }
            if let Some(full) = full_support_measure(&m, &pa) {
                assert_eq!(full.measure.support(), pa.omega_star);
                assert!(check_martingale(&m, &full.measure, &natural));
                assert!(check_martingale(&m, &full.measure, &enlarged));
            }
        }
    }

    #[test]
    fn mixing() {
        let a = DiscreteMeasure::dirac(2, 0);
        assert_eq!(mix(std::slice::from_ref(&a), &[int(1)]).unwrap(), a);
        let b = DiscreteMeasure::dirac(2, 1);
        assert_eq!(
            mix(&[a.clone(), b.clone()], &[ratio(1, 2), ratio(1, 2)]).unwrap(),
            DiscreteMeasure::uniform(2)
        );
        assert!(matches!(
            mix(&[a.clone(), b.clone()], &[ratio(1, 2), ratio(1, 3)]),
            Err(MeasureError::WeightsNotNormalized { .. })
        ));
        assert!(matches!(
            mix(&[a.clone(), b], &[int(1), int(0)]),
            Err(MeasureError::NonPositiveWeight { index: 1 })
        ));
        assert!(matches!(mix(&[a], &[]), Err(MeasureError::MixArity { .. })));
        assert_eq!(mix(&[], &[]), Err(MeasureError::EmptyMix));
        assert_eq!(
            dyadic_weights(3),
            vec![ratio(4, 7), ratio(2, 7), ratio(1, 7)]
        );
    }

    #[test]
    fn full_support_cases() {
        let flat = fixtures::constant();
        let full = full_support_measure(&flat, &backward_eliminate(&flat)).unwrap();
        assert!(full.full);
        assert_eq!(full.measure, DiscreteMeasure::dirac(1, 0));

        let cna = fixtures::count_na();
        let part = full_support_measure(&cna, &backward_eliminate(&cna)).unwrap();
        assert!(!part.full);
        assert_eq!(part.measure.support(), set(&[2, 3]));

        let svu = fixtures::svu();
        assert_eq!(full_support_measure(&svu, &backward_eliminate(&svu)), None);
    }

    #[test]
    fn class_measures() {
        let cna = fixtures::count_na();
        let pa = backward_eliminate(&cna);
        let whole = SignificantClass::new("MI", vec![cna.all()]).unwrap();
        assert!(class_measure(&cna, &pa, &whole).is_some());
        assert_eq!(class_measure(&cna, &pa, &singletons(&cna)), None);
        let zero = &cna.classes()["zero_class"];
        let q = class_measure(&cna, &pa, zero).unwrap();
        assert!(q.weight(2).is_positive());
    }
}
