use num_traits::Zero;

use super::PolarAnalysis;
use crate::market::{natural_filtration, Market, Partition, Strategy};
use crate::ratgeom::{Rational, Vector};

/// The aggregated arbitrage strategy together with the filtration that makes
/// it predictable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Aggregator {
    /// Period-`t` atoms are the atoms of `enlarged[t-1]`.
    pub strategy: Strategy,
    /// `enlarged[t]` for `t = 0..=T`: the natural partition at `t` refined by
    /// the aggregated positions of periods `1..=t+1` (`1..=T` at the horizon).
    pub enlarged: Vec<Partition>,
    /// `positions[t-1][ω]`, scenario by scenario.
    pub positions: Vec<Vec<Vector>>,
}

/// Builds the strategy that holds, at every period and on every level set,
/// the separator of the block each scenario was eliminated in, and zero on
/// scenarios that were not eliminated at that period.
///
/// Every eliminated scenario gains strictly at exactly one period and every
/// other position is zero, so the terminal value is nonnegative and strictly
/// positive exactly off the surviving set.
pub fn universal_aggregator(m: &Market, pa: &PolarAnalysis) -> Aggregator {
    let positions = scenario_positions(m, pa);
    let natural = natural_filtration(m);
    let horizon = m.horizon();
    let enlarged: Vec<Partition> = (0..=horizon)
        .map(|t| {
            let upto = (t + 1).min(horizon);
            let atom_index = |w: usize| {
                natural[t]
                    .atoms()
                    .iter()
                    .position(|a| a.contains(&w))
                    .expect("natural partitions cover every scenario")
            };
            Partition::by_key(0..m.len(), |w| {
                let held: Vec<&Vector> = (0..upto).map(|s| &positions[s][w]).collect();
                (atom_index(w), held)
            })
        })
        .collect();
    let strategy = Strategy::from_partitions(&enlarged, horizon, |t, atom| {
        positions[t - 1][*atom.first().expect("atoms are nonempty")].clone()
    });
    Aggregator {
        strategy,
        enlarged,
        positions,
    }
}

fn scenario_positions(m: &Market, pa: &PolarAnalysis) -> Vec<Vec<Vector>> {
    let zero = vec![Rational::zero(); m.assets()];
    let mut out = vec![vec![zero; m.len()]; m.horizon()];
    for s in &pa.splittings {
        for (block, h) in s.blocks.iter().zip(&s.separators) {
            for &w in block {
                debug_assert!(
                    out[..].iter().all(|row| row[w].iter().all(Zero::is_zero)),
                    "scenario eliminated twice"
                );
                out[s.period - 1][w] = h.clone();
            }
        }
    }
    out
}

/// Whether every period-`t` position of `h` is constant on each atom of
/// `filtration[t-1]` (and defined on all of it).
pub fn check_predictable(h: &Strategy, filtration: &[Partition]) -> bool {
    if filtration.len() < h.horizon() {
        return false;
    }
    (1..=h.horizon()).all(|t| {
        filtration[t - 1].atoms().iter().all(|atom| {
            let mut held = atom.iter().map(|&w| h.position(t, w));
            match held.next() {
                Some(Some(first)) => held.all(|p| p == Some(first)),
                _ => false,
            }
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::market::{natural_filtration, value_process, ScenarioSet};
    use crate::ratgeom::{int, vector};
    use crate::splitter::backward_eliminate;
    use num_traits::Signed;

    fn positive_set(v: &[Rational]) -> ScenarioSet {
        v.iter()
            .enumerate()
            .filter(|(_, x)| x.is_positive())
            .map(|(i, _)| i)
            .collect()
    }

    #[test]
    fn svu_gains_everywhere() {
        let m = fixtures::svu();
        let pa = backward_eliminate(&m);
        let agg = universal_aggregator(&m, &pa);
        assert_eq!(agg.positions[1][2], vector(&[1]));
        assert_eq!(agg.positions[1][3], vector(&[1]));
        assert_eq!(agg.positions[0][0], vector(&[1]));
        let v = value_process(&m, &agg.enlarged, &agg.strategy).unwrap();
        // 7→8 on ω1, ω2; 3→5 and 3→4 on ω3, ω4.
        assert_eq!(v[2], vec![int(1), int(1), int(2), int(1)]);
        assert!(check_predictable(&agg.strategy, &agg.enlarged));
    }

    #[test]
    fn no_polar_set_means_zero_and_same_filtration() {
        let m = fixtures::constant();
        let pa = backward_eliminate(&m);
        let agg = universal_aggregator(&m, &pa);
        assert_eq!(agg.enlarged, natural_filtration(&m));
        assert!(agg.positions.iter().flatten().flatten().all(Zero::is_zero));
    }

    #[test]
    fn ex3d_aggregator_is_not_naturally_predictable() {
        let m = fixtures::ex3d();
        let pa = backward_eliminate(&m);
        let agg = universal_aggregator(&m, &pa);
        let nonzero: ScenarioSet = (0..m.len())
            .filter(|&w| !agg.positions[0][w].iter().all(Zero::is_zero))
            .collect();
        assert_eq!(nonzero, pa.polar_complement());
        let v = value_process(&m, &agg.enlarged, &agg.strategy).unwrap();
        assert_eq!(positive_set(&v[1]), pa.polar_complement());
        assert!(check_predictable(&agg.strategy, &agg.enlarged));
        let natural = natural_filtration(&m);
        assert!(!check_predictable(&agg.strategy, &natural));
    }

    #[test]
    fn constant_strategies_are_predictable_everywhere() {
        let m = fixtures::multi();
        let natural = natural_filtration(&m);
        let h = Strategy::from_partitions(&natural, 2, |_, _| vector(&[3, -1]));
        assert!(check_predictable(&h, &natural));
        let coarse = vec![Partition::trivial(m.all()); 3];
        assert!(!check_predictable(&h, &coarse[..0]));
        let mut g = Strategy::new(2);
        g.set(1, m.all(), vector(&[1, 0]));
        g.set(2, m.all(), vector(&[0, 1]));
        assert!(check_predictable(&g, &coarse));
        assert!(check_predictable(&g, &natural));
    }
}
