use num_traits::Zero;
use thiserror::Error;

use super::{Market, Partition, ScenarioSet};
use crate::ratgeom::{dot, Rational, Vector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("strategy has {found} periods, market has {expected}")]
    Horizon { expected: usize, found: usize },
    #[error("period {t}: strategy atom {atom:?} is not an atom of the time-{} partition", t - 1)]
    ForeignAtom { t: usize, atom: Vec<usize> },
    #[error("period {t}: scenario {scenario} has no position")]
    Uncovered { t: usize, scenario: usize },
    #[error("period {t}: position has dimension {found}, expected {expected}")]
    Dimension {
        t: usize,
        expected: usize,
        found: usize,
    },
}

/// A trading strategy stored as one position per atom of the partition that
/// governs each period. Period `t` (1-based) is decided at time `t-1`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Strategy {
    periods: Vec<Vec<(ScenarioSet, Vector)>>,
}

impl Strategy {
    pub fn new(horizon: usize) -> Self {
        Strategy {
            periods: vec![Vec::new(); horizon],
        }
    }

    /// A strategy whose period-`t` atoms are those of `filtration[t-1]`.
    pub fn from_partitions(
        filtration: &[Partition],
        horizon: usize,
        mut position: impl FnMut(usize, &ScenarioSet) -> Vector,
    ) -> Self {
        let mut s = Strategy::new(horizon);
        for t in 1..=horizon {
            for atom in filtration[t - 1].atoms() {
                let p = position(t, atom);
                s.set(t, atom.clone(), p);
            }
        }
        s
    }

    pub fn zero(filtration: &[Partition], horizon: usize, assets: usize) -> Self {
        Strategy::from_partitions(filtration, horizon, |_, _| vec![Rational::zero(); assets])
    }

    pub fn horizon(&self) -> usize {
        self.periods.len()
    }

    /// Sets the period-`t` position on `atom`, replacing any atom equal to it.
    pub fn set(&mut self, t: usize, atom: ScenarioSet, position: Vector) {
        let period = &mut self.periods[t - 1];
        match period.iter_mut().find(|(a, _)| *a == atom) {
            Some(slot) => slot.1 = position,
            None => {
                period.push((atom, position));
                period.sort_by_key(|(a, _)| a.first().copied());
            }
        }
    }

    pub fn period(&self, t: usize) -> &[(ScenarioSet, Vector)] {
        &self.periods[t - 1]
    }

    pub fn position(&self, t: usize, scenario: usize) -> Option<&Vector> {
        self.periods[t - 1]
            .iter()
            .find(|(a, _)| a.contains(&scenario))
            .map(|(_, p)| p)
    }

    /// The partition formed by the strategy's own period-`t` atoms.
    pub fn governing_partition(&self, t: usize) -> Partition {
        Partition::new(self.periods[t - 1].iter().map(|(a, _)| a.clone()).collect())
    }

    /// `V[t][ω] = Σ_{s<=t} H_s(ω)·(S_s(ω) - S_{s-1}(ω))`, evaluated on the
    /// strategy's own atoms. `V[0]` is identically zero.
    pub fn values(&self, m: &Market) -> Result<Vec<Vec<Rational>>, StrategyError> {
        if self.horizon() != m.horizon() {
            return Err(StrategyError::Horizon {
                expected: m.horizon(),
                found: self.horizon(),
            });
        }
        let mut v = vec![vec![Rational::zero(); m.len()]];
        for t in 1..=m.horizon() {
            let mut row = v[t - 1].clone();
            for (w, value) in row.iter_mut().enumerate() {
                let h = self
                    .position(t, w)
                    .ok_or(StrategyError::Uncovered { t, scenario: w })?;
                if h.len() != m.assets() {
                    return Err(StrategyError::Dimension {
                        t,
                        expected: m.assets(),
                        found: h.len(),
                    });
                }
                *value += dot(h, &m.increment(t, w));
            }
            v.push(row);
        }
        Ok(v)
    }

    /// Scenarios where the terminal value is strictly positive.
    pub fn positive_set(&self, m: &Market) -> Result<ScenarioSet, StrategyError> {
        let v = self.values(m)?;
        Ok(v[m.horizon()]
            .iter()
            .enumerate()
            .filter(|(_, x)| *x > &Rational::zero())
            .map(|(i, _)| i)
            .collect())
    }
}

/// Value process of `h`, which must be predictable for `filtration`: every
/// period-`t` atom of `h` is an atom of `filtration[t-1]` and the atoms cover
/// all scenarios.
pub fn value_process(
    m: &Market,
    filtration: &[Partition],
    h: &Strategy,
) -> Result<Vec<Vec<Rational>>, StrategyError> {
    if h.horizon() != m.horizon() {
        return Err(StrategyError::Horizon {
            expected: m.horizon(),
            found: h.horizon(),
        });
    }
    for t in 1..=m.horizon() {
        for (atom, _) in h.period(t) {
            if !filtration[t - 1].contains_atom(atom) {
                return Err(StrategyError::ForeignAtom {
                    t,
                    atom: atom.iter().copied().collect(),
                });
            }
        }
    }
    h.values(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::natural_filtration;
    use crate::ratgeom::{int, vector};

    fn multi() -> Market {
        Market::from_integer_paths(
            2,
            &[
                ("A1", vec![vec![2, 2], vec![3, 7], vec![3, 7]]),
                ("A2", vec![vec![2, 2], vec![2, 2], vec![5, 3]]),
                ("A3", vec![vec![2, 2], vec![2, 2], vec![1, 1]]),
                ("A4", vec![vec![2, 2], vec![1, 1], vec![1, 1]]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn multi_period_payoffs() {
        let m = multi();
        let f = natural_filtration(&m);
        let h1 = Strategy::from_partitions(&f, 2, |t, _| {
            if t == 1 {
                vector(&[-1, 1])
            } else {
                vector(&[0, 0])
            }
        });
        let v = value_process(&m, &f, &h1).unwrap();
        assert_eq!(v[2], vec![int(4), int(0), int(0), int(0)]);

        let a23: ScenarioSet = [1, 2].into();
        let h2 = Strategy::from_partitions(&f, 2, |t, atom| {
            if t == 2 && *atom == a23 {
                vector(&[1, -1])
            } else {
                vector(&[0, 0])
            }
        });
        let v = value_process(&m, &f, &h2).unwrap();
        assert_eq!(v[2], vec![int(0), int(2), int(0), int(0)]);
    }

    #[test]
    fn zero_strategy_has_zero_value() {
        let m = multi();
        let f = natural_filtration(&m);
        let v = value_process(&m, &f, &Strategy::zero(&f, 2, 2)).unwrap();
        assert!(v.iter().flatten().all(Zero::is_zero));
    }

    #[test]
    fn foreign_atoms_are_rejected() {
        let m = multi();
        let f = natural_filtration(&m);
        let mut h = Strategy::zero(&f, 2, 2);
        h.set(2, [0, 1].into(), vector(&[1, 1]));
        assert!(matches!(
            value_process(&m, &f, &h),
            Err(StrategyError::ForeignAtom { t: 2, .. })
        ));
    }
}
