//! Small reference markets shipped with the crate.

use crate::market::{load_market, Market};

pub const SVU: &str = include_str!("../fixtures/svu.json");
pub const MULTI: &str = include_str!("../fixtures/multi.json");
pub const MULTI_STRATEGY: &str = include_str!("../fixtures/multi_H.json");
pub const EX3D: &str = include_str!("../fixtures/ex3d.json");
pub const EX1000: &str = include_str!("../fixtures/ex1000.json");
pub const EX1001: &str = include_str!("../fixtures/ex1001.json");
pub const COUNT_NA: &str = include_str!("../fixtures/countna.json");
pub const CONSTANT: &str = include_str!("../fixtures/constant.json");

/// Every bundled market document, by name.
pub const ALL: &[(&str, &str)] = &[
    ("svu", SVU),
    ("multi", MULTI),
    ("ex3d", EX3D),
    ("ex1000", EX1000),
    ("ex1001", EX1001),
    ("countna", COUNT_NA),
    ("constant", CONSTANT),
];

fn load(doc: &str) -> Market {
    load_market(doc).expect("bundled fixture is valid")
}

/// One asset, two periods; a later-time polar set empties the whole market.
pub fn svu() -> Market {
    load(SVU)
}

/// Two assets, two periods; the significant set {A1, A2} needs both periods.
pub fn multi() -> Market {
    load(MULTI)
}

/// Three assets, one period; two separation layers collapse into one.
pub fn ex3d() -> Market {
    load(EX3D)
}

pub fn ex1000() -> Market {
    load(EX1000)
}

pub fn ex1001() -> Market {
    load(EX1001)
}

/// One asset with increments 1 and 0: martingale measures exist alongside a
/// one-point arbitrage.
pub fn count_na() -> Market {
    load(COUNT_NA)
}

pub fn constant() -> Market {
    load(CONSTANT)
}
