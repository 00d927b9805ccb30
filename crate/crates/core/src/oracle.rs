//! Brute-force ground truth by direct linear programming, independent of the
//! splitting machinery: the support of the martingale polytope and explicit
//! searches for arbitrage strategies.

use num_traits::{One, Signed, Zero};

use crate::market::{value_process, DiscreteMeasure, Market, Partition, ScenarioSet, Strategy};
use crate::measures::build_polytope;
use crate::ratgeom::{lp_solve, Bound, LinearProgram, Rational, Relation};

/// Scenarios to which some martingale measure gives positive mass: one LP per
/// scenario maximizing its weight over the polytope.
pub fn oracle_support(m: &Market) -> ScenarioSet {
    let polytope = build_polytope(m);
    let mut support = ScenarioSet::new();
    for w in 0..m.len() {
        if support.contains(&w) {
            continue;
        }
        let mut objective = vec![Rational::zero(); m.len()];
        objective[w] = Rational::one();
        let result = lp_solve(&polytope.program(objective)).expect("polytope rows are well-formed");
        if result.is_infeasible() {
            return ScenarioSet::new();
        }
        // Every scenario charged by the optimal vertex is in the support too.
        let q = result.solution.expect("optimal");
        support.extend(
            q.iter()
                .enumerate()
                .filter(|(_, x)| x.is_positive())
                .map(|(i, _)| i),
        );
    }
    support
}

/// Predictable strategies as LP variables: `d` free variables per atom of
/// `filtration[t-1]` for each allowed period.
struct StrategyProgram<'a> {
    m: &'a Market,
    filtration: &'a [Partition],
    /// `(t, atom index)` for each block of `d` variables.
    slots: Vec<(usize, usize)>,
}

impl<'a> StrategyProgram<'a> {
    fn new(m: &'a Market, filtration: &'a [Partition], periods: &[usize]) -> Self {
        let slots = periods
            .iter()
            .flat_map(|&t| (0..filtration[t - 1].atoms().len()).map(move |a| (t, a)))
            .collect();
        StrategyProgram {
            m,
            filtration,
            slots,
        }
    }

    fn num_vars(&self) -> usize {
        self.slots.len() * self.m.assets()
    }

    /// Coefficients of `V_T(ω)` in the strategy variables.
    fn terminal_value_row(&self, w: usize) -> Vec<Rational> {
        let d = self.m.assets();
        let mut row = vec![Rational::zero(); self.num_vars()];
        for (slot, &(t, a)) in self.slots.iter().enumerate() {
            if self.filtration[t - 1].atoms()[a].contains(&w) {
                for (k, dx) in self.m.increment(t, w).into_iter().enumerate() {
                    row[slot * d + k] = dx;
                }
            }
        }
        row
    }

    fn program(&self) -> LinearProgram {
        let mut lp = LinearProgram::new(self.num_vars());
        for v in 0..self.num_vars() {
            lp.set_bound(v, Bound::free());
        }
        lp
    }

    fn strategy(&self, x: &[Rational]) -> Strategy {
        let d = self.m.assets();
        let mut h = Strategy::zero(self.filtration, self.m.horizon(), d);
        for (slot, &(t, a)) in self.slots.iter().enumerate() {
            let atom = self.filtration[t - 1].atoms()[a].clone();
            h.set(t, atom, x[slot * d..(slot + 1) * d].to_vec());
        }
        h
    }
}

/// A strategy predictable for `filtration` with `V_T >= 0` everywhere and
/// `V_T >= 1` on `target`, if one exists. Positive homogeneity makes the
/// second condition equivalent to strict gain on `target`.
pub fn oracle_arbitrage(
    m: &Market,
    filtration: &[Partition],
    target: &ScenarioSet,
) -> Option<Strategy> {
    let periods: Vec<usize> = (1..=m.horizon()).collect();
    oracle_arbitrage_in_periods(m, filtration, target, &periods)
}

/// As [`oracle_arbitrage`], with positions forced to zero outside `periods`.
pub fn oracle_arbitrage_in_periods(
    m: &Market,
    filtration: &[Partition],
    target: &ScenarioSet,
    periods: &[usize],
) -> Option<Strategy> {
    assert!(!target.is_empty(), "arbitrage target must be nonempty");
    let sp = StrategyProgram::new(m, filtration, periods);
    let mut lp = sp.program();
    for w in 0..m.len() {
        let rhs = if target.contains(&w) {
            Rational::one()
        } else {
            Rational::zero()
        };
        lp.add_constraint(sp.terminal_value_row(w), Relation::Ge, rhs);
    }
    let x = lp_solve(&lp).expect("well-formed").solution?;
    let h = sp.strategy(&x);
    let v = value_process(m, filtration, &h).expect("built on the filtration's atoms");
    let terminal = &v[m.horizon()];
    assert!(
        (0..m.len()).all(|w| !terminal[w].is_negative()
            && (!target.contains(&w) || terminal[w] >= Rational::one())),
        "oracle strategy violates its own constraints"
    );
    Some(h)
}

/// A classical arbitrage for `p`: `V_T >= 0` on the support of `p` and
/// positive expected gain, if one exists.
pub fn oracle_p_arbitrage(
    m: &Market,
    filtration: &[Partition],
    p: &DiscreteMeasure,
) -> Option<Strategy> {
    let periods: Vec<usize> = (1..=m.horizon()).collect();
    let sp = StrategyProgram::new(m, filtration, &periods);
    let mut lp = sp.program();
    let mut expectation = vec![Rational::zero(); sp.num_vars()];
    for w in p.support() {
        let row = sp.terminal_value_row(w);
        for (e, c) in expectation.iter_mut().zip(&row) {
            *e += p.weight(w) * c;
        }
        lp.add_constraint(row, Relation::Ge, Rational::zero());
    }
    lp.add_constraint(expectation, Relation::Ge, Rational::one());
    let x = lp_solve(&lp).expect("well-formed").solution?;
    Some(sp.strategy(&x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::market::natural_filtration;
    use crate::splitter::{backward_eliminate, universal_aggregator};

    fn set(xs: &[usize]) -> ScenarioSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn support_on_fixtures() {
        assert!(oracle_support(&fixtures::svu()).is_empty());
        assert_eq!(oracle_support(&fixtures::constant()), set(&[0]));
        assert_eq!(oracle_support(&fixtures::count_na()), set(&[2, 3]));
        for (_, doc) in fixtures::ALL {
            let Ok(m) = crate::market::load_market(doc) else {
                continue;
            };
            assert_eq!(oracle_support(&m), backward_eliminate(&m).omega_star);
        }
    }

    #[test]
    fn svu_model_independent_arbitrage() {
        let m = fixtures::svu();
        let enlarged = universal_aggregator(&m, &backward_eliminate(&m)).enlarged;
        assert!(oracle_arbitrage(&m, &enlarged, &m.all()).is_some());
    }

    #[test]
    fn constant_market_has_no_arbitrage() {
        let m = fixtures::constant();
        let f = natural_filtration(&m);
        assert!(oracle_arbitrage(&m, &f, &set(&[0])).is_none());
        assert!(oracle_p_arbitrage(&m, &f, &DiscreteMeasure::dirac(1, 0)).is_none());
    }

    #[test]
    fn multi_needs_two_periods() {
        let m = fixtures::multi();
        let f = natural_filtration(&m);
        let target = m.classes()["openish"].sets()[0].clone();
        let h = oracle_arbitrage(&m, &f, &target).unwrap();
        let v = value_process(&m, &f, &h).unwrap();
        assert!(target.iter().all(|&w| v[2][w].is_positive()));
        assert!(oracle_arbitrage_in_periods(&m, &f, &target, &[1]).is_none());
        assert!(oracle_arbitrage_in_periods(&m, &f, &target, &[2]).is_none());
    }

    #[test]
    fn p_arbitrage_ignores_null_scenarios() {
        let m = fixtures::count_na();
        let f = natural_filtration(&m);
        assert!(oracle_p_arbitrage(&m, &f, &DiscreteMeasure::uniform(4)).is_some());
        assert!(oracle_p_arbitrage(&m, &f, &DiscreteMeasure::dirac(4, 2)).is_none());
    }
}
