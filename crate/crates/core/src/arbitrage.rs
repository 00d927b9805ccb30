//! Arbitrage verdicts relative to a class of significant sets, single-step
//! arbitrage, defragmentation of multi-period arbitrages, extraction of
//! classical arbitrages for a given probability, and market feasibility.

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::market::{
    natural_filtration, DiscreteMeasure, Market, Partition, ScenarioSet, SignificantClass, Strategy,
};
use crate::measures::{class_measure, full_support_measure, FullSupport};
use crate::oracle::{oracle_arbitrage, oracle_p_arbitrage};
use crate::ratgeom::{dot, maximal_separator, Rational, Vector};
use crate::splitter::{universal_aggregator, PolarAnalysis};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArbitrageError {
    #[error(
        "unknown class {0:?} (declare it in the market file, or use MI, 1p or qs:<probability>)"
    )]
    UnknownClass(String),
    #[error("terminal value is negative on scenario {id:?}")]
    NegativeTerminal { id: String },
    #[error("strategy does not fit the market: {0}")]
    Strategy(String),
    #[error("measure has {found} weights, market has {expected} scenarios")]
    MeasureLength { expected: usize, found: usize },
}

/// Which filtration strategies may be predictable for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FiltrationKind {
    Natural,
    Enlarged,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictKind {
    NoArbitrage,
    Arbitrage,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub class: String,
    pub filtration: FiltrationKind,
    /// Present iff `kind` is `Arbitrage`: `V_T >= 0` everywhere, strictly
    /// positive on `cited_set`.
    pub witness: Option<Strategy>,
    /// The filtration `witness` is predictable for.
    pub witness_filtration: Option<Vec<Partition>>,
    pub cited_set: Option<ScenarioSet>,
    /// A martingale measure charging every set of the class, when one exists.
    pub measure: Option<DiscreteMeasure>,
}

impl Verdict {
    pub fn is_arbitrage(&self) -> bool {
        self.kind == VerdictKind::Arbitrage
    }
}

/// Looks up a declared class, or builds one of the built-ins:
/// `MI` (the whole space), `1p` (every singleton), and `qs:NAME` (the sets
/// charged by the declared probability `NAME`, represented by the singletons
/// of its support — a set is charged iff it contains one of them).
pub fn resolve_class(m: &Market, name: &str) -> Result<SignificantClass, ArbitrageError> {
    if let Some(c) = m.classes().get(name) {
        return Ok(c.clone());
    }
    let singletons = |set: ScenarioSet| set.into_iter().map(|w| ScenarioSet::from([w])).collect();
    let sets = match name {
        "MI" => vec![m.all()],
        "1p" => singletons(m.all()),
        _ => {
            let p = name
                .strip_prefix("qs:")
                .and_then(|p| m.probabilities().get(p))
                .ok_or_else(|| ArbitrageError::UnknownClass(name.to_string()))?;
            singletons(p.support())
        }
    };
    SignificantClass::new(name, sets).map_err(|_| ArbitrageError::UnknownClass(name.to_string()))
}

/// Arbitrage verdict for `class`.
///
/// Enlarged filtration: arbitrage iff no martingale measure exists or some
/// set of the class is polar; the aggregator is the witness. Natural
/// filtration: decided by an LP search per set of the class.
pub fn classify(
    m: &Market,
    pa: &PolarAnalysis,
    class: &SignificantClass,
    filtration: FiltrationKind,
) -> Verdict {
    let measure = class_measure(m, pa, class);
    let mut verdict = Verdict {
        kind: VerdictKind::NoArbitrage,
        class: class.name().to_string(),
        filtration,
        witness: None,
        witness_filtration: None,
        cited_set: None,
        measure,
    };
    match filtration {
        FiltrationKind::Enlarged => {
            let polar = pa.polar_complement();
            let cited = class
                .sets()
                .iter()
                .find(|c| pa.omega_star.is_empty() || c.is_subset(&polar));
            if let Some(c) = cited {
                let agg = universal_aggregator(m, pa);
                verdict.kind = VerdictKind::Arbitrage;
                verdict.cited_set = Some(c.clone());
                verdict.witness = Some(agg.strategy);
                verdict.witness_filtration = Some(agg.enlarged);
            }
        }
        FiltrationKind::Natural => {
            let natural = natural_filtration(m);
            for c in class.sets() {
                if let Some(h) = oracle_arbitrage(m, &natural, c) {
                    verdict.kind = VerdictKind::Arbitrage;
                    verdict.cited_set = Some(c.clone());
                    verdict.witness = Some(h);
                    verdict.witness_filtration = Some(natural);
                    break;
                }
            }
        }
    }
    debug_assert!(
        !verdict.is_arbitrage()
            || verdict.measure.is_none()
            || filtration == FiltrationKind::Natural
    );
    verdict
}

/// A one-period arbitrage on one level set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneStepArbitrage {
    pub period: usize,
    /// The full time-`(period-1)` level set the position is held on.
    pub level_set: ScenarioSet,
    pub position: Vector,
    /// Scenarios of the level set where the position gains strictly.
    pub gains_on: ScenarioSet,
}

/// Every single-period arbitrage opportunity: for each period and each full
/// level set of the natural filtration, the maximal separator of its
/// increments when one exists. Empty iff the market has no 1p-arbitrage.
pub fn one_step_1p_check(m: &Market) -> Vec<OneStepArbitrage> {
    let natural = natural_filtration(m);
    let mut out = Vec::new();
    for t in 1..=m.horizon() {
        for atom in natural[t - 1].atoms() {
            let members: Vec<usize> = atom.iter().copied().collect();
            let points: Vec<Vector> = members.iter().map(|&w| m.increment(t, w)).collect();
            if let Some(sep) = maximal_separator(&points).expect("level sets are nonempty") {
                out.push(OneStepArbitrage {
                    period: t,
                    level_set: atom.clone(),
                    position: sep.direction,
                    gains_on: sep.strict.iter().map(|&i| members[i]).collect(),
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Defragmentation {
    /// `pieces[t-1]`: scenarios whose value first turns positive at time `t`
    /// (at the horizon: positive terminal value not positive before).
    pub pieces: Vec<ScenarioSet>,
    /// The strategy stopped after its first strict gain.
    pub masked: Strategy,
}

/// Splits an arbitrage into the periods where each scenario first gains, and
/// stops trading on a scenario once it has.
pub fn defragment(m: &Market, h: &Strategy) -> Result<Defragmentation, ArbitrageError> {
    let v = h
        .values(m)
        .map_err(|e| ArbitrageError::Strategy(e.to_string()))?;
    let horizon = m.horizon();
    if let Some(w) = (0..m.len()).find(|&w| v[horizon][w].is_negative()) {
        return Err(ArbitrageError::NegativeTerminal {
            id: m.id(w).to_string(),
        });
    }
    let mut done = ScenarioSet::new();
    let mut pieces = Vec::with_capacity(horizon);
    let mut masked = Strategy::new(horizon);
    for t in 1..=horizon {
        for (atom, position) in h.period(t) {
            let active: ScenarioSet = atom.difference(&done).copied().collect();
            let stopped: ScenarioSet = atom.intersection(&done).copied().collect();
            if !active.is_empty() {
                masked.set(t, active, position.clone());
            }
            if !stopped.is_empty() {
                masked.set(t, stopped, vec![Rational::zero(); position.len()]);
            }
        }
        let piece: ScenarioSet = (0..m.len())
            .filter(|w| !done.contains(w) && v[t][*w].is_positive())
            .collect();
        done.extend(piece.iter().copied());
        pieces.push(piece);
    }
    let result = Defragmentation { pieces, masked };
    debug_assert!(result.masked.values(m).unwrap()[horizon]
        .iter()
        .all(|x| !x.is_negative()));
    Ok(result)
}

/// `P = P_c + P_s` with `P_s` the part of `P` on polar scenarios.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub continuous: Vec<Rational>,
    pub singular: Vec<Rational>,
    /// Polar scenarios charged by `P`; carries `singular`.
    pub carrier: ScenarioSet,
}

pub fn lebesgue_decompose(
    m: &Market,
    pa: &PolarAnalysis,
    p: &DiscreteMeasure,
) -> Result<Decomposition, ArbitrageError> {
    check_length(m, p)?;
    let carrier: ScenarioSet = p
        .support()
        .into_iter()
        .filter(|w| !pa.omega_star.contains(w))
        .collect();
    let (continuous, singular) = p
        .weights()
        .iter()
        .enumerate()
        .map(|(w, x)| {
            if carrier.contains(&w) {
                (Rational::zero(), x.clone())
            } else {
                (x.clone(), Rational::zero())
            }
        })
        .unzip();
    Ok(Decomposition {
        continuous,
        singular,
        carrier,
    })
}

fn check_length(m: &Market, p: &DiscreteMeasure) -> Result<(), ArbitrageError> {
    if p.len() != m.len() {
        return Err(ArbitrageError::MeasureLength {
            expected: m.len(),
            found: p.len(),
        });
    }
    Ok(())
}

/// A classical arbitrage for `P` holding one block separator on one level
/// set for one period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extraction {
    /// Predictable for the natural filtration; zero outside `period` and
    /// `level_set`.
    pub strategy: Strategy,
    pub period: usize,
    pub level_set: ScenarioSet,
    pub position: Vector,
    /// Charged scenarios with strictly positive terminal value.
    pub gains_on: ScenarioSet,
    /// `P` of `gains_on`.
    pub gain_probability: Rational,
}

/// A `P`-classical arbitrage built from the block separators, or `None` when
/// `P` charges no polar scenario.
///
/// Candidates are the blocks of every splitting, earliest period first, with
/// the first charged block of each splitting; the first candidate that is
/// nonnegative on the support of `P` is returned. The splitting that first
/// removed a charged scenario during elimination always qualifies: nothing
/// charged had been removed before it, so the rest of the support lies in its
/// later blocks or residual.
pub fn extract_p_arbitrage(
    m: &Market,
    pa: &PolarAnalysis,
    p: &DiscreteMeasure,
) -> Result<Option<Extraction>, ArbitrageError> {
    check_length(m, p)?;
    let support = p.support();
    if support.is_subset(&pa.omega_star) {
        return Ok(None);
    }
    let natural = natural_filtration(m);
    let mut candidates: Vec<(usize, &crate::splitter::Splitting)> = pa
        .splittings
        .iter()
        .enumerate()
        .filter(|(_, s)| s.blocks.iter().any(|b| !b.is_disjoint(&support)))
        .collect();
    let guaranteed = candidates.first().map(|(i, _)| *i);
    candidates.sort_by_key(|(i, s)| (s.period, *i));

    for (index, s) in candidates {
        let j = s
            .blocks
            .iter()
            .position(|b| !b.is_disjoint(&support))
            .unwrap();
        let position = &s.separators[j];
        let t = s.period;
        let level_set = natural[t - 1]
            .atom_of(*s.level_set.first().unwrap())
            .unwrap()
            .clone();
        let gains: Vec<(usize, Rational)> = level_set
            .iter()
            .filter(|w| support.contains(w))
            .map(|&w| (w, dot(position, &m.increment(t, w))))
            .collect();
        let admissible = gains.iter().all(|(_, g)| !g.is_negative());
        debug_assert!(admissible || Some(index) != guaranteed);
        if !admissible {
            continue;
        }
        let gains_on: ScenarioSet = gains
            .iter()
            .filter(|(_, g)| g.is_positive())
            .map(|(w, _)| *w)
            .collect();
        let gain_probability = p.mass(&gains_on);
        let zero = vec![Rational::zero(); m.assets()];
        let strategy = Strategy::from_partitions(&natural, m.horizon(), |u, atom| {
            if u == t && *atom == level_set {
                position.clone()
            } else {
                zero.clone()
            }
        });
        debug_assert!(gain_probability.is_positive());
        return Ok(Some(Extraction {
            strategy,
            period: t,
            level_set,
            position: position.clone(),
            gains_on,
            gain_probability,
        }));
    }
    unreachable!("the first splitting to remove a charged scenario is admissible")
}

/// Whether each step of `No 1p ⟹ No arbitrage of class S ⟹ No model
/// independent arbitrage` holds, per declared class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ladder {
    pub no_one_point: bool,
    /// `(class name, no arbitrage of that class)` for each declared class.
    pub no_class: Vec<(String, bool)>,
    pub no_model_independent: bool,
}

impl Ladder {
    /// No implication of the chain is inverted.
    pub fn is_monotone(&self) -> bool {
        self.no_class
            .iter()
            .all(|(_, ok)| (!self.no_one_point || *ok) && (!ok || self.no_model_independent))
            && (!self.no_one_point || self.no_model_independent)
    }
}

/// The four equivalent characterizations of a feasible market, each computed
/// on its own.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Feasibility {
    /// No scenario is polar.
    pub no_polar_scenarios: bool,
    /// The uniform probability (full support) admits no classical arbitrage;
    /// decided by LP over the natural filtration.
    pub no_arbitrage_under_full_support_p: bool,
    /// A martingale measure charging every scenario exists.
    pub full_support_martingale_measure: bool,
    /// No arbitrage of the open class (every singleton plus every declared
    /// set) for the enlarged filtration.
    pub no_open_arbitrage: bool,
    pub measure: Option<FullSupport>,
    pub p_arbitrage: Option<Strategy>,
    pub open_arbitrage: Verdict,
    pub ladder: Ladder,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        self.no_polar_scenarios
    }

    pub fn is_consistent(&self) -> bool {
        let f = self.no_polar_scenarios;
        self.no_arbitrage_under_full_support_p == f
            && self.full_support_martingale_measure == f
            && self.no_open_arbitrage == f
    }
}

pub fn feasibility(m: &Market, pa: &PolarAnalysis) -> Feasibility {
    let measure = full_support_measure(m, pa);
    let p_arbitrage = oracle_p_arbitrage(
        m,
        &natural_filtration(m),
        &DiscreteMeasure::uniform(m.len()),
    );

    let mut open_sets: Vec<ScenarioSet> = (0..m.len()).map(|w| ScenarioSet::from([w])).collect();
    for class in m.classes().values() {
        open_sets.extend(class.sets().iter().cloned());
    }
    let open = SignificantClass::new("open", open_sets).expect("declared sets are nonempty");
    let open_arbitrage = classify(m, pa, &open, FiltrationKind::Enlarged);

    let no_arbitrage = |name: &str| {
        let class = resolve_class(m, name).expect("built-in or declared");
        !classify(m, pa, &class, FiltrationKind::Enlarged).is_arbitrage()
    };
    let ladder = Ladder {
        no_one_point: no_arbitrage("1p"),
        no_class: m
            .classes()
            .keys()
            .map(|name| (name.clone(), no_arbitrage(name)))
            .collect(),
        no_model_independent: no_arbitrage("MI"),
    };

    Feasibility {
        no_polar_scenarios: pa.omega_star.len() == m.len(),
        no_arbitrage_under_full_support_p: p_arbitrage.is_none(),
        full_support_martingale_measure: measure.as_ref().is_some_and(|f| f.full),
        no_open_arbitrage: !open_arbitrage.is_arbitrage(),
        measure,
        p_arbitrage,
        open_arbitrage,
        ladder,
    }
}
