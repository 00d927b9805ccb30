//! JSON market documents.
//!
//! ```json
//! { "d": 1, "T": 2,
//!   "scenarios": [ { "id": "w1", "prices": [[7], [8], [9]] } ],
//!   "classes": { "MI": [["w1"]] },
//!   "probabilities": { "P": { "w1": "1" } } }
//! ```
//!
//! Prices and weights are integers, decimal strings or `"p/q"` strings.
//!
//! Strategy documents hold one position per atom and period, keyed by the
//! atom's scenario ids joined with `,`:
//!
//! ```json
//! { "positions": { "1": { "w1,w2": ["1"], "w3": [0] } } }
//! ```

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::Deserialize;
use serde_json::Value;

use super::{
    DiscreteMeasure, Market, MarketError, Scenario, ScenarioSet, SignificantClass, Strategy,
};
use crate::ratgeom::{parse_rational, Rational};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMarket {
    d: usize,
    #[serde(rename = "T")]
    horizon: usize,
    scenarios: Vec<RawScenario>,
    #[serde(default)]
    classes: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default)]
    probabilities: BTreeMap<String, BTreeMap<String, Value>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    id: String,
    prices: Vec<Vec<Value>>,
}

/// Reads a rational from a JSON integer, decimal string or `"p/q"` string.
/// Non-integer JSON numbers are taken at their literal decimal text.
pub fn rational_from_json(value: &Value) -> Option<Rational> {
    match value {
        Value::Number(n) => parse_rational(&n.to_string()).ok(),
        Value::String(s) => parse_rational(s).ok(),
        _ => None,
    }
}

fn rational(value: &Value, context: impl FnOnce() -> String) -> Result<Rational, MarketError> {
    rational_from_json(value).ok_or_else(|| MarketError::BadRational {
        context: context(),
        value: value.to_string(),
    })
}

/// Parses and validates a market document.
pub fn load_market(document: &str) -> Result<Market, MarketError> {
    let raw: RawMarket =
        serde_json::from_str(document).map_err(|e| MarketError::Parse(e.to_string()))?;
    build(raw)
}

fn build(raw: RawMarket) -> Result<Market, MarketError> {
    let mut scenarios = Vec::with_capacity(raw.scenarios.len());
    for s in raw.scenarios {
        let mut path = Vec::with_capacity(s.prices.len());
        for (t, row) in s.prices.iter().enumerate() {
            let prices = row
                .iter()
                .enumerate()
                .map(|(k, v)| rational(v, || format!("scenario {:?} time {t} asset {k}", s.id)))
                .collect::<Result<Vec<_>, _>>()?;
            path.push(prices);
        }
        scenarios.push(Scenario { id: s.id, path });
    }
    let mut market = Market::new(raw.d, raw.horizon, scenarios)?;

    for (name, sets) in raw.classes {
        let mut resolved = Vec::with_capacity(sets.len());
        for ids in sets {
            let set = ids
                .iter()
                .map(|id| {
                    market
                        .index_of(id)
                        .ok_or_else(|| MarketError::UnknownScenario {
                            context: format!("class {name}"),
                            id: id.clone(),
                        })
                })
                .collect::<Result<ScenarioSet, _>>()?;
            resolved.push(set);
        }
        market = market.with_class(SignificantClass::new(name, resolved)?);
    }

    for (name, weights) in raw.probabilities {
        let mut dense = vec![Rational::zero(); market.len()];
        for (id, w) in &weights {
            let i = market
                .index_of(id)
                .ok_or_else(|| MarketError::UnknownScenario {
                    context: format!("probability {name}"),
                    id: id.clone(),
                })?;
            let w = rational(w, || format!("probability {name} at {id:?}"))?;
            if w.is_negative() {
                return Err(MarketError::NegativeProbability {
                    name,
                    id: id.clone(),
                });
            }
            dense[i] = w;
        }
        let total: Rational = dense.iter().sum();
        let measure =
            DiscreteMeasure::new(dense).map_err(|_| MarketError::ProbabilityNotNormalized {
                name: name.clone(),
                total,
            })?;
        market = market.with_probability(name, measure);
    }
    Ok(market)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStrategy {
    positions: BTreeMap<String, BTreeMap<String, Vec<Value>>>,
}

/// The key of an atom in strategy documents: its ids in input order, joined by `,`.
pub fn strategy_atom_key(m: &Market, atom: &ScenarioSet) -> String {
    m.ids(atom).join(",")
}

/// Parses a strategy document against `m`. Periods absent from the document
/// hold zero everywhere; scenarios no atom of a period mentions form one
/// extra atom holding zero.
pub fn load_strategy(m: &Market, document: &str) -> Result<Strategy, MarketError> {
    let raw: RawStrategy =
        serde_json::from_str(document).map_err(|e| MarketError::Parse(e.to_string()))?;
    let bad = |msg: String| MarketError::BadStrategy(msg);
    let mut h = Strategy::new(m.horizon());
    let mut covered = vec![ScenarioSet::new(); m.horizon()];
    for (period, atoms) in &raw.positions {
        let t: usize = period
            .parse()
            .ok()
            .filter(|t| (1..=m.horizon()).contains(t))
            .ok_or_else(|| bad(format!("period {period:?} outside 1..={}", m.horizon())))?;
        for (key, position) in atoms {
            let atom = key
                .split(',')
                .map(|id| {
                    m.index_of(id.trim())
                        .ok_or_else(|| MarketError::UnknownScenario {
                            context: format!("strategy period {t}"),
                            id: id.trim().to_string(),
                        })
                })
                .collect::<Result<ScenarioSet, _>>()?;
            if !atom.is_disjoint(&covered[t - 1]) {
                return Err(bad(format!(
                    "period {t}: atom {key:?} overlaps another atom"
                )));
            }
            if position.len() != m.assets() {
                return Err(bad(format!(
                    "period {t}: atom {key:?} has {} components, expected {}",
                    position.len(),
                    m.assets()
                )));
            }
            let position = position
                .iter()
                .map(|v| rational(v, || format!("strategy period {t} atom {key:?}")))
                .collect::<Result<Vec<_>, _>>()?;
            covered[t - 1].extend(atom.iter().copied());
            h.set(t, atom, position);
        }
    }
    for (t, covered) in covered.iter().enumerate() {
        let rest: ScenarioSet = m.all().difference(covered).copied().collect();
        if !rest.is_empty() {
            h.set(t + 1, rest, vec![Rational::zero(); m.assets()]);
        }
    }
    Ok(h)
}
