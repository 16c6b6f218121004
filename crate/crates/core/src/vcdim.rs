//! Shattering of vertex sets by the adjacency functions `h_v(u) = [u ~ v]`,
//! `v in U`.
//!
//! Witnesses may coincide with members of `X` and loops count, so a looped
//! vertex in `X` sets its own bit in its signature.

use std::collections::{BTreeMap, HashSet};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{bits, DenseGraph, VertexSet};

/// Hard cap on `|X|`; signatures are kept in a `u32` and witness tables have
/// `2^|X|` slots.
pub const MAX_SHATTER_K: usize = 20;

/// Default number of retained shattered sets per level in the exact search.
pub const DEFAULT_RETENTION: usize = 1_000_000;

/// Adjacency pattern of one vertex against an ordered set `X`: bit `i` is set
/// iff the vertex is adjacent to `X[i]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdjacencySignature {
    pub mask: u32,
    pub k: usize,
}

impl AdjacencySignature {
    /// Binary string with `X[0]` as the least significant (rightmost) bit.
    pub fn to_bits(&self) -> String {
        if self.k == 0 {
            String::new()
        } else {
            format!("{:0width$b}", self.mask, width = self.k)
        }
    }
}

fn check_x(g: &DenseGraph, x: &[u32]) -> Result<()> {
    if x.len() > MAX_SHATTER_K {
        return Err(Error::InvalidArgument(format!(
            "|X| = {} exceeds cap {MAX_SHATTER_K}",
            x.len()
        )));
    }
    let mut seen = HashSet::with_capacity(x.len());
    for &v in x {
        if v as usize >= g.n() {
            return Err(Error::InvalidVertexSet(format!("vertex {v} out of range")));
        }
        if !seen.insert(v) {
            return Err(Error::InvalidVertexSet(format!("duplicate vertex {v} in X")));
        }
    }
    Ok(())
}

#[inline]
fn raw_signature(g: &DenseGraph, v: usize, x: &[u32]) -> u32 {
    let row = g.row(v);
    x.iter()
        .enumerate()
        .fold(0u32, |m, (i, &xi)| m | (bits::get(row, xi as usize) as u32) << i)
}

pub fn signature(g: &DenseGraph, v: usize, x: &[u32]) -> Result<AdjacencySignature> {
    check_x(g, x)?;
    if v >= g.n() {
        return Err(Error::InvalidVertexSet(format!("vertex {v} out of range")));
    }
    Ok(AdjacencySignature {
        mask: raw_signature(g, v, x),
        k: x.len(),
    })
}

/// A set `X` together with one witness vertex per adjacency pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShatterWitness {
    pub x: Vec<u32>,
    /// `witnesses[mask]` realises `mask`.
    pub witnesses: Vec<u32>,
}

impl ShatterWitness {
    pub fn k(&self) -> usize {
        self.x.len()
    }

    /// Re-derives every witness signature; true iff each reproduces its key
    /// and lies in `set`.
    pub fn validate(&self, g: &DenseGraph, set: &VertexSet) -> bool {
        self.witnesses.len() == 1 << self.x.len()
            && self.x.iter().all(|&v| set.contains(v))
            && self.witnesses.iter().enumerate().all(|(mask, &w)| {
                set.contains(w) && raw_signature(g, w as usize, &self.x) == mask as u32
            })
    }

    pub fn witness_map(&self) -> BTreeMap<String, u32> {
        self.witnesses
            .iter()
            .enumerate()
            .map(|(mask, &w)| {
                let sig = AdjacencySignature {
                    mask: mask as u32,
                    k: self.x.len(),
                };
                (sig.to_bits(), w)
            })
            .collect()
    }
}

impl Serialize for ShatterWitness {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(2))?;
        map.serialize_entry("X", &self.x)?;
        map.serialize_entry("witnesses", &self.witness_map())?;
        map.end()
    }
}

fn shatter_unchecked(g: &DenseGraph, set: &VertexSet, x: &[u32]) -> Option<ShatterWitness> {
    let slots = 1usize << x.len();
    if set.len() < slots {
        return None;
    }
    let mut witnesses = vec![u32::MAX; slots];
    let mut missing = slots;
    for &v in set.members() {
        let m = raw_signature(g, v as usize, x) as usize;
        if witnesses[m] == u32::MAX {
            witnesses[m] = v;
            missing -= 1;
            if missing == 0 {
                return Some(ShatterWitness {
                    x: x.to_vec(),
                    witnesses,
                });
            }
        }
    }
    None
}

/// Witness table if `{h_v : v in set}` realises all `2^|X|` patterns on `X`;
/// the first vertex in index order wins each pattern.
pub fn is_shattered(g: &DenseGraph, set: &VertexSet, x: &[u32]) -> Result<Option<ShatterWitness>> {
    check_x(g, x)?;
    if let Some(&v) = x.iter().find(|&&v| !set.contains(v)) {
        return Err(Error::InvalidVertexSet(format!("X member {v} not in U")));
    }
    Ok(shatter_unchecked(g, set, x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactSearchOptions {
    pub max_k: usize,
    /// Cap on work, counted as signature evaluations (one per vertex of `U`
    /// per candidate set).
    pub budget: u64,
    /// Shattered sets kept per level before the run degrades to a lower bound.
    pub retention: usize,
}

impl Default for ExactSearchOptions {
    fn default() -> Self {
        Self {
            max_k: MAX_SHATTER_K,
            budget: 1_000_000_000,
            retention: DEFAULT_RETENTION,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VcResult {
    pub dimension: usize,
    pub witness: ShatterWitness,
    /// False when a level was truncated at the retention cap; `dimension` is
    /// then only a certified lower bound.
    pub exact: bool,
}

/// Largest `k <= max_k` with a shattered `X ⊆ U`, by levelwise search.
///
/// Level `k + 1` candidates extend a shattered `k`-set by a larger vertex and
/// are tested only when every `k`-subset is shattered, which is sound because
/// shattering is inherited by subsets.
pub fn vc_dimension_exact(
    g: &DenseGraph,
    set: &VertexSet,
    opts: ExactSearchOptions,
) -> Result<VcResult> {
    if set.is_empty() {
        return Err(Error::InvalidVertexSet("U is empty".into()));
    }
    let max_k = opts.max_k.min(MAX_SHATTER_K);
    let witness0 = shatter_unchecked(g, set, &[]).expect("nonempty U shatters the empty set");
    let mut best = (0usize, witness0);
    let mut exact = true;
    let mut level: Vec<Vec<u32>> = vec![Vec::new()];
    let mut work = 0u64;
    let u = set.len() as u64;

    for k in 1..=max_k {
        if (1usize << k) > set.len() {
            break;
        }
        let previous: HashSet<&[u32]> = level.iter().map(Vec::as_slice).collect();
        let mut candidates: Vec<Vec<u32>> = Vec::new();
        for s in &level {
            let start = s.last().map_or(0, |&l| l + 1);
            for &c in set.members().iter().filter(|&&c| c >= start) {
                let mut ext = s.clone();
                ext.push(c);
                let all_subsets = k == 1
                    || (0..ext.len() - 1).all(|drop| {
                        let sub: Vec<u32> = ext
                            .iter()
                            .enumerate()
                            .filter(|&(i, _)| i != drop)
                            .map(|(_, &v)| v)
                            .collect();
                        previous.contains(sub.as_slice())
                    });
                if all_subsets {
                    candidates.push(ext);
                }
            }
        }
        let cost = candidates.len() as u64 * u;
        if work.saturating_add(cost) > opts.budget {
            return Err(Error::VcBudgetExceeded {
                budget: opts.budget,
                lower_bound: best.0,
            });
        }
        work += cost;
        let results: Vec<Option<ShatterWitness>> = candidates
            .par_iter()
            .map(|x| shatter_unchecked(g, set, x))
            .collect();
        let mut next: Vec<Vec<u32>> = Vec::new();
        let mut first: Option<ShatterWitness> = None;
        for w in results.into_iter().flatten() {
            if next.len() == opts.retention {
                exact = false;
                break;
            }
            if first.is_none() {
                first = Some(w.clone());
            }
            next.push(w.x);
        }
        match first {
            Some(w) => best = (k, w),
            None => break,
        }
        level = next;
    }
    Ok(VcResult {
        dimension: best.0,
        witness: best.1,
        exact,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleMode {
    Uniform,
    /// Alternate uniform draws with draws from vertices whose degree into `U`
    /// lies in the interquartile range.
    MedianBiased,
}

const BATCH: usize = 4096;

/// Randomised search for a shattered `k`-subset of `U` within `trials`
/// candidates. `None` does not certify that the VC-dimension is below `k`.
pub fn vc_at_least(
    g: &DenseGraph,
    set: &VertexSet,
    k: usize,
    trials: u64,
    seed: u64,
    mode: SampleMode,
) -> Result<Option<ShatterWitness>> {
    if k > MAX_SHATTER_K {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds cap {MAX_SHATTER_K}")));
    }
    if k == 0 {
        return Ok(shatter_unchecked(g, set, &[]));
    }
    if set.len() < k || set.len() < 1 << k {
        return Ok(None);
    }
    let members = set.members();
    let median_pool: Vec<u32> = match mode {
        SampleMode::Uniform => Vec::new(),
        SampleMode::MedianBiased => {
            let mask = g.mask(set);
            let mut degs: Vec<(usize, u32)> = members
                .iter()
                .map(|&v| (g.degree_into(v as usize, &mask), v))
                .collect();
            degs.sort_unstable();
            let (lo, hi) = (degs[degs.len() / 4].0, degs[(3 * degs.len()) / 4].0);
            let mut pool: Vec<u32> = degs
                .into_iter()
                .filter(|&(d, _)| d >= lo && d <= hi)
                .map(|(_, v)| v)
                .collect();
            pool.sort_unstable();
            if pool.len() < k {
                Vec::new()
            } else {
                pool
            }
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut drawn = 0u64;
    while drawn < trials {
        let batch = (trials - drawn).min(BATCH as u64) as usize;
        let candidates: Vec<Vec<u32>> = (0..batch)
            .map(|i| {
                let biased = !median_pool.is_empty() && (drawn as usize + i) % 2 == 1;
                let pool: &[u32] = if biased { &median_pool } else { members };
                let mut x: Vec<u32> = sample(&mut rng, pool.len(), k)
                    .into_iter()
                    .map(|j| pool[j])
                    .collect();
                x.sort_unstable();
                x
            })
            .collect();
        let hit = candidates
            .par_iter()
            .enumerate()
            .filter_map(|(i, x)| shatter_unchecked(g, set, x).map(|w| (i, w)))
            .min_by_key(|(i, _)| *i);
        if let Some((_, w)) = hit {
            return Ok(Some(w));
        }
        drawn += batch as u64;
        // keep the stream position independent of batch boundaries
        let _: u32 = rng.gen();
    }
    Ok(None)
}

/// Vertices `u1, u2, u3 ∈ U` with `u_i ~ v_j` exactly when `i = j`, each the
/// smallest admissible index.
pub fn find_selector_triple(
    g: &DenseGraph,
    set: &VertexSet,
    v: [u32; 3],
) -> Result<Option<[u32; 3]>> {
    for &vi in &v {
        if !set.contains(vi) {
            return Err(Error::InvalidVertexSet(format!("{vi} not in U")));
        }
    }
    if v[0] == v[1] || v[0] == v[2] || v[1] == v[2] {
        return Err(Error::InvalidVertexSet("selector targets must be distinct".into()));
    }
    let mut out = [0u32; 3];
    for (i, slot) in out.iter_mut().enumerate() {
        let found = set.members().iter().copied().find(|&u| {
            v.iter().enumerate().all(|(j, &vj)| g.has_edge(u as usize, vj as usize) == (i == j))
        });
        match found {
            Some(u) => *slot = u,
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_from_relation;

    fn k(n: usize) -> DenseGraph {
        build_from_relation(n, |i, j| i != j).unwrap()
    }

    fn cycle(n: usize) -> DenseGraph {
        build_from_relation(n, |i, j| (i + 1) % n == j || (j + 1) % n == i).unwrap()
    }

    #[test]
    fn signature_examples() {
        let k3 = k(3);
        assert_eq!(signature(&k3, 0, &[1, 2]).unwrap().mask, 0b11);
        let s = signature(&k3, 1, &[1, 2]).unwrap();
        assert_eq!(s.mask, 0b10);
        assert_eq!(s.to_bits(), "10");
        let e = DenseGraph::empty(4).unwrap();
        assert_eq!(signature(&e, 2, &[0, 1, 3]).unwrap().mask, 0);
        assert!(signature(&k3, 0, &[1, 1]).is_err());
    }

    #[test]
    fn loops_contribute_to_own_bit() {
        let g = DenseGraph::from_edges(2, &[(0, 0)]).unwrap();
        assert_eq!(signature(&g, 0, &[0]).unwrap().mask, 1);
    }

    #[test]
    fn shattering_examples() {
        let c5 = cycle(5);
        let all = VertexSet::all(5);
        let w = is_shattered(&c5, &all, &[0, 2]).unwrap().expect("shattered");
        assert_eq!(w.witnesses[0b00], 0);
        assert!(w.validate(&c5, &all));
        assert!(is_shattered(&k(3), &VertexSet::all(3), &[0, 1]).unwrap().is_none());
        let w = is_shattered(&k(3), &VertexSet::all(3), &[]).unwrap().unwrap();
        assert_eq!(w.witnesses, vec![0]);
        assert!(is_shattered(&c5, &VertexSet::new(vec![0, 1], 5).unwrap(), &[2]).is_err());
        assert!(is_shattered(&c5, &all, &(0..21).collect::<Vec<_>>()).is_err());
    }

    #[test]
    fn witness_serialization() {
        let c5 = cycle(5);
        let w = is_shattered(&c5, &VertexSet::all(5), &[0, 2]).unwrap().unwrap();
        let text = serde_json::to_string(&w).unwrap();
        assert_eq!(text, r#"{"X":[0,2],"witnesses":{"00":0,"01":4,"10":3,"11":1}}"#);
    }

    #[test]
    fn exact_small_graphs() {
        let e = DenseGraph::empty(6).unwrap();
        assert_eq!(vc_dimension_exact(&e, &VertexSet::all(6), Default::default()).unwrap().dimension, 0);
        let r = vc_dimension_exact(&k(4), &VertexSet::all(4), Default::default()).unwrap();
        assert_eq!(r.dimension, 1);
        assert!(r.exact);
        let r = vc_dimension_exact(&cycle(5), &VertexSet::all(5), Default::default()).unwrap();
        assert_eq!(r.dimension, 2);
        assert!(r.witness.validate(&cycle(5), &VertexSet::all(5)));
    }

    #[test]
    fn exact_search_budget_and_retention() {
        let g = cycle(12);
        let all = VertexSet::all(12);
        let opts = ExactSearchOptions {
            budget: 20,
            ..Default::default()
        };
        match vc_dimension_exact(&g, &all, opts) {
            Err(Error::VcBudgetExceeded { lower_bound, .. }) => assert_eq!(lower_bound, 0),
            other => panic!("{other:?}"),
        }
        let opts = ExactSearchOptions {
            retention: 1,
            ..Default::default()
        };
        let r = vc_dimension_exact(&g, &all, opts).unwrap();
        assert!(!r.exact);
        assert!(r.dimension >= 1);
    }

    #[test]
    fn randomized_examples() {
        let c5 = cycle(5);
        let all = VertexSet::all(5);
        let w = vc_at_least(&c5, &all, 2, 200, 7, SampleMode::Uniform).unwrap().unwrap();
        assert!(w.validate(&c5, &all));
        assert!(vc_at_least(&k(4), &VertexSet::all(4), 2, 500, 1, SampleMode::MedianBiased)
            .unwrap()
            .is_none());
        let w = vc_at_least(&k(4), &VertexSet::all(4), 0, 0, 1, SampleMode::Uniform).unwrap();
        assert_eq!(w.unwrap().k(), 0);
        let a = vc_at_least(&cycle(11), &VertexSet::all(11), 2, 100, 3, SampleMode::MedianBiased).unwrap();
        let b = vc_at_least(&cycle(11), &VertexSet::all(11), 2, 100, 3, SampleMode::MedianBiased).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn selector_examples() {
        let e = DenseGraph::empty(5).unwrap();
        assert_eq!(find_selector_triple(&e, &VertexSet::all(5), [0, 1, 2]).unwrap(), None);
        let c12 = cycle(12);
        let t = find_selector_triple(&c12, &VertexSet::all(12), [0, 4, 8]).unwrap().unwrap();
        assert_eq!(t, [1, 3, 7]);
        for v in [[0, 1, 2], [1, 2, 3], [0, 2, 3]] {
            assert_eq!(find_selector_triple(&k(4), &VertexSet::all(4), v).unwrap(), None);
        }
        assert!(find_selector_triple(&c12, &VertexSet::all(12), [0, 0, 1]).is_err());
    }
}
