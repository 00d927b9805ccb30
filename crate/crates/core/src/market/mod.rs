//! The market model: scenarios, price paths, filtrations as partitions,
//! predictable strategies and their value processes.

mod load;
mod partition;
mod strategy;

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::ratgeom::{sub, Rational, Vector};

pub use load::{load_market, load_strategy, rational_from_json, strategy_atom_key};
pub use partition::{natural_filtration, refine, Partition};
pub use strategy::{value_process, Strategy};

/// Scenario indices, in input order.
pub type ScenarioSet = BTreeSet<usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub id: String,
    /// Row `t` is the price vector at time `t`.
    pub path: Vec<Vector>,
}

/// A named family of nonempty scenario sets deemed significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignificantClass {
    name: String,
    sets: Vec<ScenarioSet>,
}

impl SignificantClass {
    pub fn new(name: impl Into<String>, sets: Vec<ScenarioSet>) -> Result<Self, MarketError> {
        let name = name.into();
        if sets.iter().any(BTreeSet::is_empty) {
            return Err(MarketError::EmptySetInClass { class: name });
        }
        Ok(SignificantClass { name, sets })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sets(&self) -> &[ScenarioSet] {
        &self.sets
    }
}

/// A probability on the scenarios, stored densely by scenario index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteMeasure {
    weights: Vec<Rational>,
}

impl DiscreteMeasure {
    pub fn new(weights: Vec<Rational>) -> Result<Self, MeasureValueError> {
        if let Some(index) = weights.iter().position(Signed::is_negative) {
            return Err(MeasureValueError::Negative { index });
        }
        let total: Rational = weights.iter().sum();
        if !total.is_one() {
            return Err(MeasureValueError::NotNormalized { total });
        }
        Ok(DiscreteMeasure { weights })
    }

    pub fn dirac(n: usize, at: usize) -> Self {
        let mut weights = vec![Rational::zero(); n];
        weights[at] = Rational::one();
        DiscreteMeasure { weights }
    }

    pub fn uniform(n: usize) -> Self {
        let w = Rational::new(1.into(), (n as i64).into());
        DiscreteMeasure {
            weights: vec![w; n],
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, scenario: usize) -> &Rational {
        &self.weights[scenario]
    }

    pub fn support(&self) -> ScenarioSet {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| w.is_positive())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn mass<'a>(&self, set: impl IntoIterator<Item = &'a usize>) -> Rational {
        set.into_iter().map(|&i| &self.weights[i]).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeasureValueError {
    #[error("negative weight at scenario index {index}")]
    Negative { index: usize },
    #[error("weights sum to {total}, not 1")]
    NotNormalized { total: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MarketError {
    #[error("malformed market document: {0}")]
    Parse(String),
    #[error("market must have at least one asset")]
    NoAssets,
    #[error("horizon T must be at least 1")]
    ZeroHorizon,
    #[error("market has no scenarios")]
    NoScenarios,
    #[error("duplicate scenario id {0:?}")]
    DuplicateId(String),
    #[error("scenario {id:?}: expected {expected} price rows, found {found}")]
    PathLength {
        id: String,
        expected: usize,
        found: usize,
    },
    #[error("scenario {id:?}: row {row} has {found} prices, expected {expected}")]
    RaggedRow {
        id: String,
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("invalid rational {value} in {context}")]
    BadRational { context: String, value: String },
    #[error("class {class} contains the empty set; a significant class must exclude ∅")]
    EmptySetInClass { class: String },
    #[error("{context} references unknown scenario id {id:?}")]
    UnknownScenario { context: String, id: String },
    #[error("probability {name} has a negative weight on {id:?}")]
    NegativeProbability { name: String, id: String },
    #[error("probability {name} does not sum to 1 (total {total})")]
    ProbabilityNotNormalized { name: String, total: Rational },
    #[error("invalid strategy: {0}")]
    BadStrategy(String),
}

/// A finite discrete-time market in discounted prices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Market {
    assets: usize,
    horizon: usize,
    scenarios: Vec<Scenario>,
    classes: BTreeMap<String, SignificantClass>,
    probabilities: BTreeMap<String, DiscreteMeasure>,
    warnings: Vec<String>,
}

impl Market {
    /// Validates shapes and ids. Emits a warning, not an error, when the
    /// scenarios disagree at time 0.
    pub fn new(
        assets: usize,
        horizon: usize,
        scenarios: Vec<Scenario>,
    ) -> Result<Self, MarketError> {
        if assets == 0 {
            return Err(MarketError::NoAssets);
        }
        if horizon == 0 {
            return Err(MarketError::ZeroHorizon);
        }
        if scenarios.is_empty() {
            return Err(MarketError::NoScenarios);
        }
        let mut seen = BTreeSet::new();
        for s in &scenarios {
            if !seen.insert(s.id.as_str()) {
                return Err(MarketError::DuplicateId(s.id.clone()));
            }
            if s.path.len() != horizon + 1 {
                return Err(MarketError::PathLength {
                    id: s.id.clone(),
                    expected: horizon + 1,
                    found: s.path.len(),
                });
            }
            for (row, prices) in s.path.iter().enumerate() {
                if prices.len() != assets {
                    return Err(MarketError::RaggedRow {
                        id: s.id.clone(),
                        row,
                        expected: assets,
                        found: prices.len(),
                    });
                }
            }
        }
        let mut warnings = Vec::new();
        if scenarios.iter().any(|s| s.path[0] != scenarios[0].path[0]) {
            warnings.push("initial prices differ across scenarios; F_0 is not trivial".to_string());
        }
        Ok(Market {
            assets,
            horizon,
            scenarios,
            classes: BTreeMap::new(),
            probabilities: BTreeMap::new(),
            warnings,
        })
    }

    /// Convenience constructor from integer paths: `paths[k] = (id, rows)`.
    pub fn from_integer_paths(
        assets: usize,
        paths: &[(&str, Vec<Vec<i64>>)],
    ) -> Result<Self, MarketError> {
        let horizon = paths.first().map_or(1, |p| p.1.len().saturating_sub(1));
        let scenarios = paths
            .iter()
            .map(|(id, rows)| Scenario {
                id: id.to_string(),
                path: rows.iter().map(|r| crate::ratgeom::vector(r)).collect(),
            })
            .collect();
        Market::new(assets, horizon, scenarios)
    }

    pub fn with_class(mut self, class: SignificantClass) -> Self {
        self.classes.insert(class.name().to_string(), class);
        self
    }

    pub fn with_probability(mut self, name: impl Into<String>, measure: DiscreteMeasure) -> Self {
        self.probabilities.insert(name.into(), measure);
        self
    }

    pub fn assets(&self) -> usize {
        self.assets
    }

    /// Number of trading periods `T`.
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.scenarios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenarios.is_empty()
    }

    pub fn scenarios(&self) -> &[Scenario] {
        &self.scenarios
    }

    pub fn classes(&self) -> &BTreeMap<String, SignificantClass> {
        &self.classes
    }

    pub fn probabilities(&self) -> &BTreeMap<String, DiscreteMeasure> {
        &self.probabilities
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn all(&self) -> ScenarioSet {
        (0..self.len()).collect()
    }

    pub fn id(&self, scenario: usize) -> &str {
        &self.scenarios[scenario].id
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.scenarios.iter().position(|s| s.id == id)
    }

    pub fn ids<'a>(&self, set: impl IntoIterator<Item = &'a usize>) -> Vec<String> {
        set.into_iter()
            .map(|&i| self.scenarios[i].id.clone())
            .collect()
    }

    pub fn price(&self, t: usize, scenario: usize) -> &Vector {
        &self.scenarios[scenario].path[t]
    }

    /// `S_t - S_{t-1}` on one scenario, for `t >= 1`.
    pub fn increment(&self, t: usize, scenario: usize) -> Vector {
        let path = &self.scenarios[scenario].path;
        sub(&path[t], &path[t - 1])
    }

    /// The price history `S_0, …, S_t` of one scenario.
    pub fn history(&self, t: usize, scenario: usize) -> &[Vector] {
        &self.scenarios[scenario].path[..=t]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratgeom::{int, ratio};

    #[test]
    fn measure_validation() {
        assert!(DiscreteMeasure::new(vec![ratio(1, 2), ratio(1, 2)]).is_ok());
        assert!(matches!(
            DiscreteMeasure::new(vec![ratio(1, 2); 3]),
            Err(MeasureValueError::NotNormalized { .. })
        ));
        assert!(matches!(
            DiscreteMeasure::new(vec![int(2), int(-1)]),
            Err(MeasureValueError::Negative { index: 1 })
        ));
        let u = DiscreteMeasure::uniform(4);
        assert_eq!(u.mass(&BTreeSet::from([0, 3])), ratio(1, 2));
        assert_eq!(DiscreteMeasure::dirac(3, 1).support(), BTreeSet::from([1]));
    }

    #[test]
    fn shape_validation() {
        let ok = Market::from_integer_paths(1, &[("a", vec![vec![1], vec![2]])]);
        assert!(ok.is_ok());
        assert_eq!(
            Market::from_integer_paths(1, &[("a", vec![vec![1]])]),
            Err(MarketError::ZeroHorizon)
        );
        assert_eq!(
            Market::from_integer_paths(
                1,
                &[("a", vec![vec![1], vec![2]]), ("a", vec![vec![1], vec![3]])]
            ),
            Err(MarketError::DuplicateId("a".into()))
        );
        assert!(matches!(
            Market::from_integer_paths(2, &[("a", vec![vec![1, 1], vec![2]])]),
            Err(MarketError::RaggedRow { row: 1, .. })
        ));
        assert!(matches!(
            SignificantClass::new("S", vec![BTreeSet::new()]),
            Err(MarketError::EmptySetInClass { .. })
        ));
    }

    #[test]
    fn differing_initial_prices_only_warn() {
        let m = Market::from_integer_paths(
            1,
            &[("a", vec![vec![1], vec![2]]), ("b", vec![vec![2], vec![2]])],
        )
        .unwrap();
        assert_eq!(m.warnings().len(), 1);
    }
}
