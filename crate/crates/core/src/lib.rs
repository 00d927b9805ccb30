//! Exact analysis of finite, probability-free, multi-period markets.
//!
//! Given a finite set of price scenarios the crate computes the set of
//! scenarios that some martingale measure can charge, the strategy that
//! aggregates every arbitrage available on its complement, martingale
//! measure witnesses, and arbitrage verdicts relative to a declared class of
//! significant events. Every quantity is an exact rational; every geometric
//! answer can be cross-checked against the brute-force LP [`oracle`].

pub mod arbitrage;
pub mod fixtures;
pub mod market;
pub mod measures;
pub mod oracle;
pub mod ratgeom;
pub mod splitter;
