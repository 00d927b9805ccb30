//! JSON rendering. Rationals are strings (`"3"`, `"-7/2"`), scenario lists
//! follow input order, and object keys keep insertion order, so identical
//! inputs give byte-identical output.

use mpolar_core::arbitrage::{
    Decomposition, Defragmentation, Extraction, Feasibility, Verdict, VerdictKind,
};
use mpolar_core::market::{
    strategy_atom_key, DiscreteMeasure, Market, Partition, ScenarioSet, Strategy,
};
use mpolar_core::ratgeom::Rational;
use mpolar_core::splitter::{Aggregator, PolarAnalysis, Splitting};
use num_traits::Zero;
use serde_json::{json, Map, Value};

pub fn rational(x: &Rational) -> Value {
    Value::String(x.to_string())
}

pub fn vector(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational).collect())
}

pub fn ids(m: &Market, set: &ScenarioSet) -> Value {
    json!(m.ids(set))
}

pub fn digest(m: &Market) -> Value {
    json!({ "d": m.assets(), "T": m.horizon(), "scenarios": m.len() })
}

/// Positions in the strategy-file layout: period → atom key → vector.
pub fn strategy(m: &Market, h: &Strategy) -> Value {
    let mut periods = Map::new();
    for t in 1..=h.horizon() {
        let atoms: Map<String, Value> = h
            .period(t)
            .iter()
            .map(|(atom, p)| (strategy_atom_key(m, atom), vector(p)))
            .collect();
        periods.insert(t.to_string(), Value::Object(atoms));
    }
    json!({ "positions": periods })
}

/// The charged scenarios with their weights.
pub fn measure(m: &Market, q: &DiscreteMeasure) -> Value {
    let weights: Map<String, Value> = q
        .support()
        .into_iter()
        .map(|w| (m.id(w).to_string(), rational(q.weight(w))))
        .collect();
    Value::Object(weights)
}

fn dense(m: &Market, weights: &[Rational]) -> Value {
    let map: Map<String, Value> = weights
        .iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(w, x)| (m.id(w).to_string(), rational(x)))
        .collect();
    Value::Object(map)
}

pub fn partition(m: &Market, p: &Partition) -> Value {
    Value::Array(p.atoms().iter().map(|a| ids(m, a)).collect())
}

pub fn splitting(m: &Market, s: &Splitting) -> Value {
    let first = *s.level_set.first().expect("level sets are nonempty");
    let key: Vec<Value> = m
        .history(s.period - 1, first)
        .iter()
        .map(|row| vector(row))
        .collect();
    json!({
        "t": s.period,
        "round": s.round,
        "history": key,
        "level_set": ids(m, &s.level_set),
        "beta": s.beta(),
        "blocks": s.blocks.iter().map(|b| ids(m, b)).collect::<Vec<_>>(),
        "separators": s.separators.iter().map(|h| vector(h)).collect::<Vec<_>>(),
        "residual": ids(m, &s.residual),
    })
}

pub fn polar_analysis(m: &Market, pa: &PolarAnalysis) -> Value {
    let eliminated: Vec<Value> = pa
        .eliminated
        .iter()
        .enumerate()
        .map(|(i, sets)| json!({ "t": i + 1, "level_sets": sets.iter().map(|s| ids(m, s)).collect::<Vec<_>>() }))
        .collect();
    json!({
        "omega_star": ids(m, &pa.omega_star),
        "polar": ids(m, &pa.polar_complement()),
        "rounds": pa.rounds,
        "survivors": pa.survivors.iter().map(|s| ids(m, s)).collect::<Vec<_>>(),
        "splittings": pa.splittings.iter().map(|s| splitting(m, s)).collect::<Vec<_>>(),
        "eliminated": eliminated,
    })
}

pub fn aggregator(m: &Market, agg: &Aggregator) -> Value {
    strategy(m, &agg.strategy)
}

pub fn enlarged_filtration(m: &Market, agg: &Aggregator) -> Value {
    Value::Array(agg.enlarged.iter().map(|p| partition(m, p)).collect())
}

pub fn verdict(m: &Market, v: &Verdict) -> Value {
    json!({
        "class": v.class,
        "filtration": filtration_name(v),
        "verdict": match v.kind {
            VerdictKind::Arbitrage => "Arbitrage",
            VerdictKind::NoArbitrage => "NoArbitrage",
        },
        "cited_set": v.cited_set.as_ref().map(|c| ids(m, c)),
        "witness": v.witness.as_ref().map(|h| strategy(m, h)),
        "measure": v.measure.as_ref().map(|q| measure(m, q)),
    })
}

fn filtration_name(v: &Verdict) -> &'static str {
    match v.filtration {
        mpolar_core::arbitrage::FiltrationKind::Natural => "natural",
        mpolar_core::arbitrage::FiltrationKind::Enlarged => "enlarged",
    }
}

pub fn feasibility(m: &Market, f: &Feasibility) -> Value {
    let classes: Map<String, Value> = f
        .ladder
        .no_class
        .iter()
        .map(|(name, ok)| (name.clone(), Value::Bool(*ok)))
        .collect();
    json!({
        "feasible": f.is_feasible(),
        "facets": {
            "no_polar_scenarios": f.no_polar_scenarios,
            "no_arbitrage_under_full_support_p": f.no_arbitrage_under_full_support_p,
            "full_support_martingale_measure": f.full_support_martingale_measure,
            "no_open_arbitrage": f.no_open_arbitrage,
        },
        "consistent": f.is_consistent(),
        "measure": f.measure.as_ref().map(|s| json!({ "full": s.full, "weights": measure(m, &s.measure) })),
        "p_arbitrage": f.p_arbitrage.as_ref().map(|h| strategy(m, h)),
        "open_arbitrage": verdict(m, &f.open_arbitrage),
        "ladder": {
            "no_1p": f.ladder.no_one_point,
            "no_class": classes,
            "no_model_independent": f.ladder.no_model_independent,
            "monotone": f.ladder.is_monotone(),
        },
    })
}

pub fn decomposition(m: &Market, d: &Decomposition) -> Value {
    json!({
        "continuous": dense(m, &d.continuous),
        "singular": dense(m, &d.singular),
        "carrier": ids(m, &d.carrier),
    })
}

pub fn extraction(m: &Market, e: &Extraction) -> Value {
    json!({
        "t": e.period,
        "level_set": ids(m, &e.level_set),
        "position": vector(&e.position),
        "gains_on": ids(m, &e.gains_on),
        "gain_probability": rational(&e.gain_probability),
        "strategy": strategy(m, &e.strategy),
    })
}

pub fn defragmentation(m: &Market, d: &Defragmentation) -> Value {
    let pieces: Map<String, Value> = d
        .pieces
        .iter()
        .enumerate()
        .map(|(i, u)| ((i + 1).to_string(), ids(m, u)))
        .collect();
    json!({ "U": pieces, "masked": strategy(m, &d.masked) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use mpolar_core::fixtures;

    #[test]
    fn rationals_render_reduced() {
        let x = Rational::new((-14).into(), 4.into());
        assert_eq!(rational(&x), json!("-7/2"));
        assert_eq!(rational(&Rational::from_integer(3.into())), json!("3"));
    }

    #[test]
    fn measure_lists_support_only() {
        let m = fixtures::count_na();
        let q = DiscreteMeasure::dirac(m.len(), 2);
        assert_eq!(measure(&m, &q), json!({ "q1": "1" }));
    }
}
