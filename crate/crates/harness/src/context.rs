use std::path::Path;

use vclab_core::builders::{build, FieldGraphSpec};
use vclab_core::graph::cache::{graph_hash, read_graph, GraphMeta};
use vclab_core::graph::{spectral_profile, DenseGraph, SpectralProfile};

use crate::error::Result;

pub const SPECTRAL_TOL: f64 = 1e-8;

/// A built graph together with its spectrum and provenance.
#[derive(Debug, Clone)]
pub struct GraphContext {
    pub family: String,
    pub q: Option<u32>,
    pub t: Option<usize>,
    pub graph: DenseGraph,
    pub profile: SpectralProfile,
    pub hash: String,
}

impl GraphContext {
    pub fn build(spec: &FieldGraphSpec) -> Result<Self> {
        let graph = build(spec)?;
        let meta = spec.meta();
        Self::from_graph(graph, &meta)
    }

    pub fn from_graph(graph: DenseGraph, meta: &GraphMeta) -> Result<Self> {
        let profile = spectral_profile(&graph, SPECTRAL_TOL)?;
        Ok(Self {
            family: meta.family.clone(),
            q: meta.q,
            t: meta.t,
            hash: graph_hash(&graph),
            graph,
            profile,
        })
    }

    /// Loads a cached graph. Field-family graphs are rebuilt and must match
    /// the cached adjacency bit for bit.
    pub fn load(path: &Path) -> Result<Self> {
        let (graph, meta) = read_graph(path)?;
        if let Some(spec) = FieldGraphSpec::from_meta(&meta)? {
            let fresh = build(&spec)?;
            if graph_hash(&fresh) != graph_hash(&graph) {
                return Err(vclab_core::Error::Cache(format!(
                    "{} does not match a fresh build of its spec",
                    path.display()
                ))
                .into());
            }
        }
        Self::from_graph(graph, &meta)
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn regular_degree(&self) -> Result<usize> {
        self.profile.d.ok_or(vclab_core::Error::NotRegular.into())
    }
}
