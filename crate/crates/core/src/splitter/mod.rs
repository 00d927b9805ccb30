//! Level-set splitting, backward elimination of martingale-polar scenarios,
//! and the universal arbitrage aggregator.

mod aggregator;

use thiserror::Error;

use crate::market::{natural_filtration, Market, ScenarioSet};
use crate::ratgeom::{cone_ri_contains_zero, maximal_separator, GeomError, Vector};

pub use aggregator::{check_predictable, universal_aggregator, Aggregator};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SplitError {
    #[error("empty level set")]
    EmptyLevelSet,
    #[error("period {t} outside 1..={horizon}")]
    PeriodOutOfRange { t: usize, horizon: usize },
    #[error("scenarios {first} and {other} have different price histories up to time {}", t - 1)]
    NotALevelSet {
        t: usize,
        first: usize,
        other: usize,
    },
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

/// The decomposition of one level set at one period into arbitrage blocks
/// `B¹…Bᵝ` with their separators and the residual `B*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Splitting {
    pub period: usize,
    pub level_set: ScenarioSet,
    pub blocks: Vec<ScenarioSet>,
    /// `separators[i]` is nonnegative on `blocks[i..]` and the residual, and
    /// strictly positive on `blocks[i]`.
    pub separators: Vec<Vector>,
    pub residual: ScenarioSet,
    /// Elimination sweep (1-based) that produced this splitting.
    pub round: usize,
}

impl Splitting {
    pub fn beta(&self) -> usize {
        self.blocks.len()
    }

    /// Union of all blocks.
    pub fn eliminated(&self) -> ScenarioSet {
        self.blocks.iter().flatten().copied().collect()
    }

    /// Index of the block containing `scenario`.
    pub fn block_of(&self, scenario: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(&scenario))
    }
}

/// Splits `gamma`, a subset of one time-`(t-1)` level set, by repeatedly
/// peeling off the maximal strictly separable block.
pub fn split_level_set(m: &Market, t: usize, gamma: &ScenarioSet) -> Result<Splitting, SplitError> {
    if t == 0 || t > m.horizon() {
        return Err(SplitError::PeriodOutOfRange {
            t,
            horizon: m.horizon(),
        });
    }
    let first = *gamma.first().ok_or(SplitError::EmptyLevelSet)?;
    if let Some(&other) = gamma
        .iter()
        .find(|&&w| m.history(t - 1, w) != m.history(t - 1, first))
    {
        return Err(SplitError::NotALevelSet { t, first, other });
    }
    Ok(split_unchecked(m, t, gamma, 1)?)
}

fn split_unchecked(
    m: &Market,
    t: usize,
    gamma: &ScenarioSet,
    round: usize,
) -> Result<Splitting, GeomError> {
    let mut remaining: Vec<usize> = gamma.iter().copied().collect();
    let mut blocks = Vec::new();
    let mut separators = Vec::new();
    while !remaining.is_empty() {
        let points: Vec<Vector> = remaining.iter().map(|&w| m.increment(t, w)).collect();
        let Some(sep) = maximal_separator(&points)? else {
            break;
        };
        let block: ScenarioSet = sep.strict.iter().map(|&i| remaining[i]).collect();
        remaining.retain(|w| !block.contains(w));
        blocks.push(block);
        separators.push(sep.direction);
    }
    debug_assert!(blocks.len() <= m.assets());
    Ok(Splitting {
        period: t,
        level_set: gamma.clone(),
        blocks,
        separators,
        residual: remaining.into_iter().collect(),
        round,
    })
}

/// Result of backward elimination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarAnalysis {
    /// `survivors[t]` for `t = 0..=T`: scenarios left after the first sweep
    /// has processed periods `T, …, t+1`. `survivors[T]` is everything.
    pub survivors: Vec<ScenarioSet>,
    /// Scenarios charged by some martingale measure.
    pub omega_star: ScenarioSet,
    /// Every splitting of the first sweep, plus any later splitting that
    /// still removed scenarios, in sweep order.
    pub splittings: Vec<Splitting>,
    /// `eliminated[t-1]`: level sets at time `t-1` removed entirely at period `t`.
    pub eliminated: Vec<Vec<ScenarioSet>>,
    /// Number of sweeps run, including the final one that changed nothing.
    pub rounds: usize,
    scenario_count: usize,
}

impl PolarAnalysis {
    /// The maximal polar set: scenarios no martingale measure charges.
    pub fn polar_complement(&self) -> ScenarioSet {
        (0..self.scenario_count)
            .filter(|w| !self.omega_star.contains(w))
            .collect()
    }

    pub fn scenario_count(&self) -> usize {
        self.scenario_count
    }

    /// The splitting and block index that removed `scenario`.
    pub fn removal(&self, scenario: usize) -> Option<(&Splitting, usize)> {
        self.splittings
            .iter()
            .find_map(|s| s.block_of(scenario).map(|i| (s, i)))
    }

    /// Union of all blocks removed at period `t`.
    pub fn blocks_at(&self, t: usize) -> ScenarioSet {
        self.splittings
            .iter()
            .filter(|s| s.period == t)
            .flat_map(|s| s.eliminated())
            .collect()
    }

    pub fn splittings_at(&self, t: usize) -> impl Iterator<Item = &Splitting> {
        self.splittings.iter().filter(move |s| s.period == t)
    }
}

/// Backward elimination to a fixpoint: sweep `t = T, …, 1`, split every
/// level set of the surviving scenarios, drop every block, and repeat until a
/// sweep removes nothing.
pub fn backward_eliminate(m: &Market) -> PolarAnalysis {
    let horizon = m.horizon();
    let filtration = natural_filtration(m);
    let mut alive = m.all();
    let mut survivors = vec![ScenarioSet::new(); horizon + 1];
    let mut eliminated = vec![Vec::new(); horizon];
    let mut splittings = Vec::new();
    let mut rounds = 0;

    loop {
        rounds += 1;
        let mut changed = false;
        if rounds == 1 {
            survivors[horizon] = alive.clone();
        }
        for t in (1..=horizon).rev() {
            let level_sets = filtration[t - 1].restrict(&alive);
            for gamma in level_sets.atoms() {
                let split = split_unchecked(m, t, gamma, rounds)
                    .expect("level sets are nonempty and well-shaped");
                if split.beta() > 0 {
                    changed = true;
                    for block in &split.blocks {
                        alive.retain(|w| !block.contains(w));
                    }
                    if split.residual.is_empty() {
                        eliminated[t - 1].push(gamma.clone());
                    }
                }
                if rounds == 1 || split.beta() > 0 {
                    splittings.push(split);
                }
            }
            if rounds == 1 {
                survivors[t - 1] = alive.clone();
            }
        }
        if !changed {
            break;
        }
    }

    debug_assert!((1..=horizon).all(|t| {
        filtration[t - 1].restrict(&alive).atoms().iter().all(|a| {
            let pts: Vec<Vector> = a.iter().map(|&w| m.increment(t, w)).collect();
            cone_ri_contains_zero(&pts).unwrap()
        })
    }));

    PolarAnalysis {
        survivors,
        omega_star: alive,
        splittings,
        eliminated,
        rounds,
        scenario_count: m.len(),
    }
}
