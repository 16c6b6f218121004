//! Constructions of the finite-field graph families and Erdős–Rényi baselines.
//!
//! Vertices of the field graphs are the vectors of `F_q^t` in lexicographic
//! coordinate order; when the origin is excluded it is removed after
//! enumeration, so vertex `i` of the dot-product graph is vector `i + 1`.

mod poly;

pub use poly::{Monomial, Polynomial};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ffield::{dot_raw, enumerate_vectors, sqdist_raw, FieldVector, PrimeField};
use crate::graph::cache::GraphMeta;
use crate::graph::{build_from_relation, DenseGraph};

/// Upper bound on `q^t` for the field builders.
pub const MAX_BUILD_VERTICES: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Distance,
    DotProduct,
    Polynomial,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Distance => "distance",
            Family::DotProduct => "dotproduct",
            Family::Polynomial => "polynomial",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "distance" => Ok(Family::Distance),
            "dotproduct" => Ok(Family::DotProduct),
            "polynomial" => Ok(Family::Polynomial),
            other => Err(Error::InvalidArgument(format!("unknown family {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldGraphSpec {
    pub family: Family,
    pub q: u32,
    pub t: usize,
    pub polynomial: Option<Polynomial>,
    /// Only consulted for the polynomial family; dot-product graphs always
    /// drop the origin and distance graphs never do.
    pub exclude_origin: bool,
}

impl FieldGraphSpec {
    pub fn distance(q: u32, t: usize) -> Self {
        Self {
            family: Family::Distance,
            q,
            t,
            polynomial: None,
            exclude_origin: false,
        }
    }

    pub fn dot_product(q: u32, t: usize) -> Self {
        Self {
            family: Family::DotProduct,
            q,
            t,
            polynomial: None,
            exclude_origin: true,
        }
    }

    pub fn polynomial(q: u32, t: usize, poly: Polynomial, exclude_origin: bool) -> Self {
        Self {
            family: Family::Polynomial,
            q,
            t,
            polynomial: Some(poly),
            exclude_origin,
        }
    }

    pub fn validate(&self) -> Result<PrimeField> {
        let field = PrimeField::new(self.q)?;
        if self.t < 2 {
            return Err(Error::InvalidArgument(format!("dimension t={} < 2", self.t)));
        }
        if self.family == Family::Polynomial {
            let p = self.polynomial.as_ref().ok_or_else(|| {
                Error::InvalidArgument("polynomial family needs a polynomial".into())
            })?;
            if p.dim() != self.t {
                return Err(Error::InvalidArgument(format!(
                    "polynomial is in dimension {}, spec has t={}",
                    p.dim(),
                    self.t
                )));
            }
        }
        let total = (self.q as u64).checked_pow(self.t as u32).unwrap_or(u64::MAX);
        if total > MAX_BUILD_VERTICES as u64 {
            return Err(Error::TooLarge {
                requested: total,
                limit: MAX_BUILD_VERTICES,
            });
        }
        Ok(field)
    }

    fn drops_origin(&self) -> bool {
        match self.family {
            Family::Distance => false,
            Family::DotProduct => true,
            Family::Polynomial => self.exclude_origin,
        }
    }

    /// Vertex labels in index order.
    pub fn vertex_labels(&self) -> Result<Vec<FieldVector>> {
        let field = self.validate()?;
        let mut vs = enumerate_vectors(field, self.t);
        if self.drops_origin() {
            vs.remove(0);
        }
        Ok(vs)
    }

    pub fn meta(&self) -> GraphMeta {
        GraphMeta {
            family: self.family.name().to_string(),
            q: Some(self.q),
            t: Some(self.t),
            polynomial: self.polynomial.as_ref().map(|p| p.to_string()),
            exclude_origin: Some(self.drops_origin()),
        }
    }

    /// Reconstructs a spec from cache metadata; `None` for non-field graphs.
    pub fn from_meta(meta: &GraphMeta) -> Result<Option<Self>> {
        let (Some(q), Some(t)) = (meta.q, meta.t) else {
            return Ok(None);
        };
        let spec = match meta.family.as_str() {
            "distance" => Self::distance(q, t),
            "dotproduct" => Self::dot_product(q, t),
            "polynomial" => {
                let src = meta.polynomial.as_deref().ok_or_else(|| {
                    Error::Cache("polynomial family without polynomial".into())
                })?;
                Self::polynomial(
                    q,
                    t,
                    Polynomial::parse(src, t)?,
                    meta.exclude_origin.unwrap_or(false),
                )
            }
            _ => return Ok(None),
        };
        Ok(Some(spec))
    }
}

fn relation_graph<F>(spec: &FieldGraphSpec, pred: F) -> Result<DenseGraph>
where
    F: Fn(&[u32], &[u32]) -> bool + Sync,
{
    let labels = spec.vertex_labels()?;
    let g = build_from_relation(labels.len(), |i, j| {
        pred(labels[i].coords(), labels[j].coords())
    })?;
    g.with_labels(labels)
}

/// `F_q^t` with `x ~ y` iff `sum (x_i - y_i)^2 = 1`. Loopless and regular.
pub fn distance_graph(q: u32, t: usize) -> Result<DenseGraph> {
    relation_graph(&FieldGraphSpec::distance(q, t), |x, y| sqdist_raw(q, x, y) == 1)
}

/// `F_q^t \ {0}` with `x ~ y` iff `x . y = 1`; vertices with `x . x = 1`
/// carry loops, and every row sum is exactly `q^(t-1)`.
pub fn dot_product_graph(q: u32, t: usize) -> Result<DenseGraph> {
    relation_graph(&FieldGraphSpec::dot_product(q, t), |x, y| dot_raw(q, x, y) == 1)
}

/// Edge iff `P(x, y) = 1`, diagonal included.
pub fn polynomial_graph(spec: &FieldGraphSpec) -> Result<DenseGraph> {
    if spec.family != Family::Polynomial {
        return build(spec);
    }
    spec.validate()?;
    let poly = spec.polynomial.clone().expect("validated");
    let q = spec.q;
    relation_graph(spec, move |x, y| poly.eval(q, x, y) == 1)
}

pub fn build(spec: &FieldGraphSpec) -> Result<DenseGraph> {
    match spec.family {
        Family::Distance => distance_graph(spec.q, spec.t),
        Family::DotProduct => dot_product_graph(spec.q, spec.t),
        Family::Polynomial => polynomial_graph(spec),
    }
}

/// Loopless G(n, p); pairs `i < j` are drawn in row-major order from a
/// ChaCha8 stream seeded with `seed`.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Result<DenseGraph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("edge probability {p} not in [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    DenseGraph::from_edges(n, &edges)
}

pub fn random_meta() -> GraphMeta {
    GraphMeta {
        family: "random".into(),
        ..GraphMeta::default()
    }
}
