//! Dense symmetric graphs stored as packed bit rows.
//!
//! Loops are kept on the diagonal exactly as the defining relation produces
//! them; a loop contributes one to its row sum.

pub mod bits;
pub mod cache;
mod spectral;

pub use spectral::{spectral_profile, SpectralProfile, MAX_SPECTRAL_VERTICES};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ffield::FieldVector;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseGraph {
    n: usize,
    words: usize,
    adj: Vec<u64>,
    labels: Option<Vec<FieldVector>>,
}

impl DenseGraph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("graph needs at least one vertex".into()));
        }
        let words = bits::words_for(n);
        Ok(Self {
            n,
            words,
            adj: vec![0; n * words],
            labels: None,
        })
    }

    /// Builds from an edge list; each pair is inserted symmetrically and
    /// `(i, i)` inserts a loop.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidArgument(format!("edge ({i}, {j}) out of range")));
            }
            g.set_edge(i, j);
        }
        Ok(g)
    }

    pub(crate) fn from_packed(n: usize, adj: Vec<u64>) -> Result<Self> {
        let words = bits::words_for(n);
        if n == 0 || adj.len() != n * words {
            return Err(Error::InvalidArgument("packed adjacency has wrong size".into()));
        }
        let g = Self {
            n,
            words,
            adj,
            labels: None,
        };
        for i in 0..n {
            for j in bits::ones(g.row(i)) {
                if j >= n {
                    return Err(Error::InvalidArgument(format!("bit beyond n in row {i}")));
                }
                if !g.has_edge(j, i) {
                    return Err(Error::Asymmetric(i, j));
                }
            }
        }
        Ok(g)
    }

    fn set_edge(&mut self, i: usize, j: usize) {
        let w = self.words;
        bits::set(&mut self.adj[i * w..(i + 1) * w], j);
        bits::set(&mut self.adj[j * w..(j + 1) * w], i);
    }

    pub fn with_labels(mut self, labels: Vec<FieldVector>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "{} labels for {} vertices",
                labels.len(),
                self.n
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> usize {
        self.words
    }

    pub fn labels(&self) -> Option<&[FieldVector]> {
        self.labels.as_deref()
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.adj[i * self.words..(i + 1) * self.words]
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        bits::get(self.row(i), j)
    }

    pub fn has_loop(&self, i: usize) -> bool {
        self.has_edge(i, i)
    }

    pub fn loop_count(&self) -> usize {
        (0..self.n).filter(|&i| self.has_loop(i)).count()
    }

    /// Row sum of the adjacency matrix (a loop counts once).
    pub fn degree(&self, i: usize) -> usize {
        bits::popcount(self.row(i)) as usize
    }

    /// Number of undirected non-loop edges.
    pub fn edge_count(&self) -> usize {
        let total: usize = (0..self.n).map(|i| self.degree(i)).sum();
        (total - self.loop_count()) / 2
    }

    /// The common degree if every row sum agrees.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.degree(0);
        (1..self.n).all(|i| self.degree(i) == d).then_some(d)
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        bits::ones(self.row(i))
    }

    /// Copy with the diagonal cleared.
    pub fn without_loops(&self) -> Self {
        let mut g = self.clone();
        let w = self.words;
        for i in 0..self.n {
            bits::clear(&mut g.adj[i * w..(i + 1) * w], i);
        }
        g
    }

    /// Bitmask of the members of `u`.
    pub fn mask(&self, u: &VertexSet) -> Vec<u64> {
        let mut m = vec![0u64; self.words];
        for &v in u.members() {
            bits::set(&mut m, v as usize);
        }
        m
    }

    /// Number of neighbours of `v` inside `u`.
    pub fn degree_into(&self, v: usize, u_mask: &[u64]) -> usize {
        bits::and_popcount(self.row(v), u_mask) as usize
    }
}

/// Builds a graph from a symmetric predicate. The predicate is evaluated on
/// every pair `i <= j`; symmetry is spot-checked on a deterministic sample of
/// pairs (all pairs for small `n`).
pub fn build_from_relation<F>(n: usize, rel: F) -> Result<DenseGraph>
where
    F: Fn(usize, usize) -> bool + Sync,
{
    let mut g = DenseGraph::empty(n)?;
    let words = g.words;
    let upper: Vec<Vec<u64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![0u64; words];
            for j in i..n {
                if rel(i, j) {
                    bits::set(&mut row, j);
                }
            }
            row
        })
        .collect();
    for (i, row) in upper.iter().enumerate() {
        for j in bits::ones(row) {
            g.set_edge(i, j);
        }
    }
    verify_symmetric_sample(n, &rel, &g)?;
    Ok(g)
}

const SYMMETRY_SAMPLE: usize = 4096;

fn verify_symmetric_sample<F>(n: usize, rel: &F, g: &DenseGraph) -> Result<()>
where
    F: Fn(usize, usize) -> bool,
{
    let check = |i: usize, j: usize| {
        if rel(i, j) != g.has_edge(i, j) {
            Err(Error::Asymmetric(i, j))
        } else {
            Ok(())
        }
    };
    if n * n <= SYMMETRY_SAMPLE {
        for i in 0..n {
            for j in 0..i {
                check(i, j)?;
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f5e_11ed);
        for _ in 0..SYMMETRY_SAMPLE {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            check(i.max(j), i.min(j))?;
        }
    }
    Ok(())
}

/// Sorted set of distinct vertex indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    members: Vec<u32>,
}

impl VertexSet {
    /// Validates that `members` are distinct and below `n`; the input order
    /// does not matter.
    pub fn new(mut members: Vec<u32>, n: usize) -> Result<Self> {
        members.sort_unstable();
        if let Some(w) = members.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidVertexSet(format!("duplicate vertex {}", w[0])));
        }
        if let Some(&last) = members.last() {
            if last as usize >= n {
                return Err(Error::InvalidVertexSet(format!("vertex {last} out of range")));
            }
        }
        Ok(Self { members })
    }

    pub fn all(n: usize) -> Self {
        Self {
            members: (0..n as u32).collect(),
        }
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    pub fn is_subset_of(&self, other: &VertexSet) -> bool {
        self.members.iter().all(|&v| other.contains(v))
    }
}

/// `|{w in U : w ~ u and w ~ v}|`; with `u == v` this is the degree into `U`.
pub fn common_neighbors(g: &DenseGraph, u: usize, v: usize, set: &VertexSet) -> usize {
    let mask = g.mask(set);
    bits::and3_popcount(g.row(u), g.row(v), &mask) as usize
}

/// Multipliers for the degree window `[lower |U|d/n, upper |U|d/n]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PruneBounds {
    pub lower: f64,
    pub upper: f64,
}

impl Default for PruneBounds {
    fn default() -> Self {
        Self {
            lower: 0.5,
            upper: 2.0,
        }
    }
}

/// Drops every vertex of `set` whose number of neighbours inside `set` lies
/// outside `[|U|d/2n, 2|U|d/n]`.
pub fn prune_by_degree(g: &DenseGraph, set: &VertexSet, d: usize, n: usize) -> VertexSet {
    prune_against(g, set, set, d, n, PruneBounds::default())
}

/// Keeps the members of `candidates` whose degree into `reference` lies in
/// the window defined by `|reference|`, `d`, `n` and `bounds`.
pub fn prune_against(
    g: &DenseGraph,
    candidates: &VertexSet,
    reference: &VertexSet,
    d: usize,
    n: usize,
    bounds: PruneBounds,
) -> VertexSet {
    let mask = g.mask(reference);
    let expected = reference.len() as f64 * d as f64 / n as f64;
    let (lo, hi) = (bounds.lower * expected, bounds.upper * expected);
    let members = candidates
        .members()
        .iter()
        .copied()
        .filter(|&v| {
            let deg = g.degree_into(v as usize, &mask) as f64;
            deg >= lo && deg <= hi
        })
        .collect();
    VertexSet { members }
}

/// Pruning driven by a spectral profile; refuses irregular graphs.
pub fn prune_with_profile(
    g: &DenseGraph,
    set: &VertexSet,
    profile: &SpectralProfile,
) -> Result<VertexSet> {
    let d = profile.d.ok_or(Error::NotRegular)?;
    Ok(prune_by_degree(g, set, d, g.n()))
}

/// Induced subgraph `G[U]` re-indexed to `0..|U|`, with packed rows and
/// neighbour lists. Shared by the counting and shattering kernels.
#[derive(Debug, Clone)]
pub struct Induced {
    m: usize,
    words: usize,
    rows: Vec<u64>,
    nbrs: Vec<Vec<u32>>,
    members: Vec<u32>,
}

impl Induced {
    pub fn new(g: &DenseGraph, set: &VertexSet) -> Self {
        let members = set.members().to_vec();
        let m = members.len();
        let words = bits::words_for(m.max(1));
        let mut rows = vec![0u64; m.max(1) * words];
        let mut nbrs = vec![Vec::new(); m];
        for (a, &va) in members.iter().enumerate() {
            let row = g.row(va as usize);
            for (b, &vb) in members.iter().enumerate() {
                if bits::get(row, vb as usize) {
                    bits::set(&mut rows[a * words..(a + 1) * words], b);
                    nbrs[a].push(b as u32);
                }
            }
        }
        Self {
            m,
            words,
            rows,
            nbrs,
            members,
        }
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn words(&self) -> usize {
        self.words
    }

    #[inline]
    pub fn row(&self, a: usize) -> &[u64] {
        &self.rows[a * self.words..(a + 1) * self.words]
    }

    #[inline]
    pub fn nbrs(&self, a: usize) -> &[u32] {
        &self.nbrs[a]
    }

    #[inline]
    pub fn adj(&self, a: usize, b: usize) -> bool {
        bits::get(self.row(a), b)
    }

    #[inline]
    pub fn cn(&self, a: usize, b: usize) -> u32 {
        bits::and_popcount(self.row(a), self.row(b))
    }

    pub fn degree(&self, a: usize) -> usize {
        self.nbrs[a].len()
    }

    /// Original vertex index of local index `a`.
    pub fn original(&self, a: usize) -> u32 {
        self.members[a]
    }

    pub fn edge_total(&self) -> usize {
        self.nbrs.iter().map(Vec::len).sum()
    }
}
