use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// A small configuration counted by homomorphisms: `required` pairs must be
/// edges, `forbidden` pairs must be non-edges and `distinct` pairs must map
/// to different vertices. A pair `(i, i)` in `required`/`forbidden` asks for
/// (or forbids) a loop at the image of `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    k: usize,
    required: BTreeSet<(usize, usize)>,
    forbidden: BTreeSet<(usize, usize)>,
    distinct: BTreeSet<(usize, usize)>,
}

fn norm(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl Pattern {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            required: BTreeSet::new(),
            forbidden: BTreeSet::new(),
            distinct: BTreeSet::new(),
        }
    }

    fn check(&self, a: usize, b: usize) -> Result<()> {
        if a >= self.k || b >= self.k {
            return Err(Error::InvalidArgument(format!(
                "pair ({a}, {b}) outside a {}-vertex pattern",
                self.k
            )));
        }
        Ok(())
    }

    pub fn require(mut self, a: usize, b: usize) -> Result<Self> {
        self.check(a, b)?;
        let p = norm(a, b);
        if self.forbidden.contains(&p) {
            return Err(Error::InvalidArgument(format!("{p:?} both required and forbidden")));
        }
        self.required.insert(p);
        Ok(self)
    }

    pub fn forbid(mut self, a: usize, b: usize) -> Result<Self> {
        self.check(a, b)?;
        let p = norm(a, b);
        if self.required.contains(&p) {
            return Err(Error::InvalidArgument(format!("{p:?} both required and forbidden")));
        }
        self.forbidden.insert(p);
        Ok(self)
    }

    pub fn distinct(mut self, a: usize, b: usize) -> Result<Self> {
        self.check(a, b)?;
        if a == b {
            return Err(Error::InvalidArgument(format!("vertex {a} cannot differ from itself")));
        }
        self.distinct.insert(norm(a, b));
        Ok(self)
    }

    pub fn with_edges(k: usize, edges: &[(usize, usize)]) -> Self {
        edges
            .iter()
            .try_fold(Self::new(k), |p, &(a, b)| p.require(a, b))
            .expect("static pattern edges are valid")
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn required(&self) -> &BTreeSet<(usize, usize)> {
        &self.required
    }

    pub fn forbidden(&self) -> &BTreeSet<(usize, usize)> {
        &self.forbidden
    }

    pub fn distinct_pairs(&self) -> &BTreeSet<(usize, usize)> {
        &self.distinct
    }

    /// Path with `k` edges on `k + 1` vertices.
    pub fn path(k: usize) -> Self {
        let edges: Vec<_> = (0..k).map(|i| (i, i + 1)).collect();
        Self::with_edges(k + 1, &edges)
    }

    /// Closed walk of length `m >= 1`; `m = 1` is a loop and `m = 2` a single
    /// edge.
    pub fn cycle(m: usize) -> Self {
        assert!(m >= 1, "cycle length must be positive");
        match m {
            1 => Self::with_edges(1, &[(0, 0)]),
            2 => Self::with_edges(2, &[(0, 1)]),
            _ => {
                let edges: Vec<_> = (0..m).map(|i| (i, (i + 1) % m)).collect();
                Self::with_edges(m, &edges)
            }
        }
    }

    /// Star `K_{1,s}` with centre 0.
    pub fn star(s: usize) -> Self {
        let edges: Vec<_> = (1..=s).map(|i| (0, i)).collect();
        Self::with_edges(s + 1, &edges)
    }

    /// Vertices `(x, y, z, u, v)`: 4-cycle `x y z u` with `v` pendant at `u`.
    pub fn h1() -> Self {
        Self::with_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (3, 0)])
    }

    /// Vertices `(x, y, z, u, v)`: `K_{2,3}` with parts `{u, y}`, `{x, z, v}`.
    pub fn h2() -> Self {
        Self::with_edges(5, &[(0, 3), (3, 2), (2, 1), (0, 1), (3, 4), (4, 1)])
    }

    /// Same graph as [`Pattern::h2`], labelled with parts `{0, 1}` and `{2, 3, 4}`.
    pub fn k23() -> Self {
        Self::with_edges(5, &[(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)])
    }

    /// Vertices `(x, y, z, u, v, u', x')`.
    pub fn h3() -> Self {
        Self::with_edges(
            7,
            &[
                (0, 1),
                (1, 2),
                (2, 3),
                (3, 0),
                (3, 4),
                (4, 5),
                (5, 2),
                (5, 6),
                (6, 1),
            ],
        )
    }

    /// [`Pattern::h3`] plus `x ~ u'`.
    pub fn h3_plus() -> Self {
        Self::h3().require(0, 5).expect("valid pair")
    }

    /// `H3` with `x` and `u'` identified: vertices `(x, y, z, u, v, x')`.
    pub fn h3_minus() -> Self {
        Self::with_edges(
            6,
            &[
                (0, 1),
                (1, 2),
                (2, 3),
                (3, 0),
                (0, 5),
                (5, 1),
                (0, 4),
                (4, 3),
                (0, 2),
            ],
        )
    }

    /// Vertices `(y, z, u, v, u', x)`: 6-cycle with chord `z ~ u'`.
    pub fn h4() -> Self {
        Self::with_edges(
            6,
            &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (1, 4)],
        )
    }
}
