//! Exact homomorphism counts of the small configurations into `G[U]`.
//!
//! Every count is labelled and possibly degenerate: repeated vertices and
//! loop traversals are included unless a [`Pattern`] distinctness pair rules
//! them out. Each fast kernel has a [`Pattern`] whose brute-force count it
//! must reproduce exactly.

mod brute;
mod kernels;
mod pattern;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use serde::{Serialize, Serializer};

pub use brute::{count_pattern_bruteforce, count_pattern_with_domains, DEFAULT_BUDGET};
pub use kernels::{
    count_cycles, count_h1, count_h2, count_h3, count_h3_minus, count_h3_plus, count_h4,
    count_paths, count_star, max_common_neighbors,
};
pub use pattern::Pattern;

use crate::error::{Error, Result};
use crate::graph::{DenseGraph, VertexSet};

/// The named configurations with dedicated kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Config {
    /// Walks with the given number of edges.
    Path(usize),
    /// Closed walks of the given length.
    Cycle(usize),
    H1,
    H2,
    H3,
    H3Plus,
    H3Minus,
    H4,
    K13,
    K14,
    K23,
}

impl Config {
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("unknown configuration {s:?}"));
        let num = |t: &str| t.parse::<usize>().map_err(|_| bad());
        Ok(match s {
            "H1" => Config::H1,
            "H2" => Config::H2,
            "H3" => Config::H3,
            "H3plus" => Config::H3Plus,
            "H3minus" => Config::H3Minus,
            "H4" => Config::H4,
            "K13" => Config::K13,
            "K14" => Config::K14,
            "K23" => Config::K23,
            _ => {
                if let Some(k) = s.strip_prefix("Pk:").or_else(|| s.strip_prefix('P')) {
                    Config::Path(num(k)?)
                } else if let Some(m) = s.strip_prefix("Cm:").or_else(|| s.strip_prefix('C')) {
                    let m = num(m)?;
                    if m == 0 {
                        return Err(bad());
                    }
                    Config::Cycle(m)
                } else {
                    return Err(bad());
                }
            }
        })
    }

    pub fn pattern(&self) -> Pattern {
        match *self {
            Config::Path(k) => Pattern::path(k),
            Config::Cycle(m) => Pattern::cycle(m),
            Config::H1 => Pattern::h1(),
            Config::H2 => Pattern::h2(),
            Config::H3 => Pattern::h3(),
            Config::H3Plus => Pattern::h3_plus(),
            Config::H3Minus => Pattern::h3_minus(),
            Config::H4 => Pattern::h4(),
            Config::K13 => Pattern::star(3),
            Config::K14 => Pattern::star(4),
            Config::K23 => Pattern::k23(),
        }
    }

    /// Count via the dedicated kernel.
    pub fn count(&self, g: &DenseGraph, set: &VertexSet, budget: u64) -> Result<BigUint> {
        match *self {
            Config::Path(k) => count_paths(g, set, k),
            Config::Cycle(m) => count_cycles(g, set, m),
            Config::H1 => count_h1(g, set),
            Config::H2 | Config::K23 => count_h2(g, set),
            Config::H3 => count_h3(g, set, budget),
            Config::H3Plus => count_h3_plus(g, set, budget),
            Config::H3Minus => count_h3_minus(g, set),
            Config::H4 => count_h4(g, set),
            Config::K13 => count_star(g, set, 3),
            Config::K14 => count_star(g, set, 4),
        }
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Config::Path(k) => write!(f, "P{k}"),
            Config::Cycle(m) => write!(f, "C{m}"),
            Config::H1 => f.write_str("H1"),
            Config::H2 => f.write_str("H2"),
            Config::H3 => f.write_str("H3"),
            Config::H3Plus => f.write_str("H3plus"),
            Config::H3Minus => f.write_str("H3minus"),
            Config::H4 => f.write_str("H4"),
            Config::K13 => f.write_str("K13"),
            Config::K14 => f.write_str("K14"),
            Config::K23 => f.write_str("K23"),
        }
    }
}

/// Exact counts keyed by configuration name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigCensus {
    counts: BTreeMap<String, BigUint>,
}

impl ConfigCensus {
    pub fn insert(&mut self, config: Config, value: BigUint) {
        self.counts.insert(config.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<&BigUint> {
        self.counts.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &BigUint)> {
        self.counts.iter()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

impl Serialize for ConfigCensus {
    /// Counts are written as decimal strings so they survive JSON readers
    /// limited to 64-bit numbers.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let as_text: BTreeMap<&str, String> = self
            .counts
            .iter()
            .map(|(k, v)| (k.as_str(), v.to_string()))
            .collect();
        as_text.serialize(s)
    }
}

/// Counts every configuration in `configs`, stopping at the first error.
pub fn census(
    g: &DenseGraph,
    set: &VertexSet,
    configs: &[Config],
    budget: u64,
) -> Result<ConfigCensus> {
    let mut out = ConfigCensus::default();
    for &c in configs {
        out.insert(c, c.count(g, set, budget)?);
    }
    Ok(out)
}

/// The full census: `P1..P4`, `C3..C6`, the H-configurations and the stars.
pub fn standard_configs() -> Vec<Config> {
    let mut v: Vec<Config> = (1..=4).map(Config::Path).collect();
    v.extend((3..=6).map(Config::Cycle));
    v.extend([
        Config::H1,
        Config::H2,
        Config::H3,
        Config::H3Plus,
        Config::H3Minus,
        Config::H4,
        Config::K13,
        Config::K14,
        Config::K23,
    ]);
    v
}
