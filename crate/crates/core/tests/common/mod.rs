//! Random scenario-tree markets for property and acceptance tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use mpolar_core::market::{DiscreteMeasure, Market, Scenario, ScenarioSet, SignificantClass};
use mpolar_core::ratgeom::{int, Rational};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A market of at most `max_scenarios` paths in `[0, 20]^d` generated as a
/// tree: at each time every node branches into up to three children, each a
/// lattice step of size at most 3 per asset (a flat step a quarter of the
/// time).
pub fn random_market(
    rng: &mut TestRng,
    max_scenarios: usize,
    max_horizon: usize,
    max_assets: usize,
) -> Market {
    let n = rng.gen_range(1..=max_scenarios);
    let horizon = rng.gen_range(1..=max_horizon);
    let d = rng.gen_range(1..=max_assets);
    let start: Vec<i64> = (0..d).map(|_| rng.gen_range(3..=17)).collect();
    let mut paths: Vec<Vec<Vec<i64>>> = vec![vec![start]; n];

    for _ in 1..=horizon {
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for w in 0..n {
            match groups.iter_mut().find(|g| paths[g[0]] == paths[w]) {
                Some(g) => g.push(w),
                None => groups.push(vec![w]),
            }
        }
        for group in groups {
            let children = rng.gen_range(1..=group.len().min(3));
            let last = paths[group[0]].last().unwrap().clone();
            let steps: Vec<Vec<i64>> = (0..children)
                .map(|_| {
                    if rng.gen_bool(0.25) {
                        last.clone()
                    } else {
                        last.iter()
                            .map(|&x| (x + rng.gen_range(-3..=3)).clamp(0, 20))
                            .collect()
                    }
                })
                .collect();
            let mut order = group.clone();
            order.shuffle(rng);
            for (k, &w) in order.iter().enumerate() {
                // Every child gets at least one scenario.
                let child = if k < children {
                    k
                } else {
                    rng.gen_range(0..children)
                };
                paths[w].push(steps[child].clone());
            }
        }
    }

    let scenarios = paths
        .into_iter()
        .enumerate()
        .map(|(i, rows)| Scenario {
            id: format!("s{i}"),
            path: rows
                .iter()
                .map(|r| r.iter().map(|&x| int(x)).collect())
                .collect(),
        })
        .collect();
    Market::new(d, horizon, scenarios).expect("generated markets are well-formed")
}

pub fn random_subset(rng: &mut TestRng, n: usize) -> ScenarioSet {
    loop {
        let s: ScenarioSet = (0..n).filter(|_| rng.gen_bool(0.35)).collect();
        if !s.is_empty() {
            return s;
        }
        if n == 1 {
            return BTreeSet::from([0]);
        }
    }
}

pub fn random_class(rng: &mut TestRng, name: &str, n: usize) -> SignificantClass {
    let k = rng.gen_range(1..=3);
    SignificantClass::new(name, (0..k).map(|_| random_subset(rng, n)).collect()).unwrap()
}

/// A probability with random small integer weights, some of them zero.
pub fn random_measure(rng: &mut TestRng, n: usize) -> DiscreteMeasure {
    let mut raw: Vec<i64> = (0..n)
        .map(|_| {
            if rng.gen_bool(0.4) {
                0
            } else {
                rng.gen_range(1..=5)
            }
        })
        .collect();
    if raw.iter().all(|&x| x == 0) {
        let i = rng.gen_range(0..n);
        raw[i] = 1;
    }
    let total: i64 = raw.iter().sum();
    DiscreteMeasure::new(
        raw.into_iter()
            .map(|x| Rational::new(x.into(), total.into()))
            .collect(),
    )
    .unwrap()
}

pub fn corpus(seed: u64, count: usize) -> Vec<Market> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| random_market(&mut r, 10, 3, 3))
        .collect()
}
