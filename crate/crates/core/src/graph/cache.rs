//! On-disk graph and spectrum documents (`vclab-graph-v1`, `vclab-spectrum-v1`).
//!
//! Adjacency is stored row-major, each row packed into `ceil(n / 8)` bytes
//! with column `j` at bit `7 - j % 8` of byte `j / 8`, and the whole buffer
//! base64 encoded (standard alphabet, padded).

use std::fs;
use std::path::Path;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{bits, DenseGraph, SpectralProfile};
use crate::error::{Error, Result};

pub const GRAPH_SCHEMA: &str = "vclab-graph-v1";
pub const SPECTRUM_SCHEMA: &str = "vclab-spectrum-v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub schema: String,
    pub family: String,
    pub q: Option<u32>,
    pub t: Option<usize>,
    pub n: usize,
    pub loops: bool,
    pub edges: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polynomial: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exclude_origin: Option<bool>,
}

/// Provenance carried alongside a cached adjacency matrix.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GraphMeta {
    pub family: String,
    pub q: Option<u32>,
    pub t: Option<usize>,
    pub polynomial: Option<String>,
    pub exclude_origin: Option<bool>,
}

pub fn pack_rows(g: &DenseGraph) -> Vec<u8> {
    let n = g.n();
    let row_bytes = n.div_ceil(8);
    let mut out = vec![0u8; n * row_bytes];
    for i in 0..n {
        for j in bits::ones(g.row(i)) {
            out[i * row_bytes + j / 8] |= 0x80 >> (j % 8);
        }
    }
    out
}

pub fn unpack_rows(n: usize, bytes: &[u8]) -> Result<DenseGraph> {
    let row_bytes = n.div_ceil(8);
    if n == 0 || bytes.len() != n * row_bytes {
        return Err(Error::Cache(format!(
            "expected {} adjacency bytes for n={n}, got {}",
            n * row_bytes,
            bytes.len()
        )));
    }
    let words = bits::words_for(n);
    let mut adj = vec![0u64; n * words];
    for i in 0..n {
        for j in 0..n {
            if bytes[i * row_bytes + j / 8] & (0x80 >> (j % 8)) != 0 {
                bits::set(&mut adj[i * words..(i + 1) * words], j);
            }
        }
        // padding bits beyond n must be clear
        for j in n..row_bytes * 8 {
            if bytes[i * row_bytes + j / 8] & (0x80 >> (j % 8)) != 0 {
                return Err(Error::Cache(format!("padding bit set in row {i}")));
            }
        }
    }
    DenseGraph::from_packed(n, adj).map_err(|e| Error::Cache(e.to_string()))
}

/// SHA-256 over the vertex count (u64 little-endian) followed by the packed
/// rows, as lowercase hex.
pub fn graph_hash(g: &DenseGraph) -> String {
    let mut h = Sha256::new();
    h.update((g.n() as u64).to_le_bytes());
    h.update(pack_rows(g));
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn encode_graph(g: &DenseGraph, meta: &GraphMeta) -> GraphDocument {
    GraphDocument {
        schema: GRAPH_SCHEMA.to_string(),
        family: meta.family.clone(),
        q: meta.q,
        t: meta.t,
        n: g.n(),
        loops: g.loop_count() > 0,
        edges: STANDARD.encode(pack_rows(g)),
        polynomial: meta.polynomial.clone(),
        exclude_origin: meta.exclude_origin,
    }
}

/// Decodes the adjacency matrix; labels are not part of the document.
pub fn decode_graph(doc: &GraphDocument) -> Result<(DenseGraph, GraphMeta)> {
    if doc.schema != GRAPH_SCHEMA {
        return Err(Error::Cache(format!("unknown schema {:?}", doc.schema)));
    }
    let bytes = STANDARD
        .decode(doc.edges.as_bytes())
        .map_err(|e| Error::Cache(format!("bad base64: {e}")))?;
    let g = unpack_rows(doc.n, &bytes)?;
    if (g.loop_count() > 0) != doc.loops {
        return Err(Error::Cache("loops flag disagrees with adjacency".into()));
    }
    let meta = GraphMeta {
        family: doc.family.clone(),
        q: doc.q,
        t: doc.t,
        polynomial: doc.polynomial.clone(),
        exclude_origin: doc.exclude_origin,
    };
    Ok((g, meta))
}

pub fn write_graph(path: &Path, g: &DenseGraph, meta: &GraphMeta) -> Result<()> {
    let doc = encode_graph(g, meta);
    fs::write(path, serde_json::to_string_pretty(&doc)? + "\n")?;
    Ok(())
}

pub fn read_graph(path: &Path) -> Result<(DenseGraph, GraphMeta)> {
    let doc: GraphDocument = serde_json::from_str(&fs::read_to_string(path)?)?;
    decode_graph(&doc)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDocument {
    pub schema: String,
    #[serde(rename = "graph-hash")]
    pub graph_hash: String,
    pub eigenvalues: Vec<f64>,
    pub d: Option<usize>,
    pub lambda: f64,
    /// λ of the adjacency matrix with the diagonal cleared; present only
    /// when the graph has loops.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_loopless: Option<f64>,
}

/// Rounds to 12 significant decimal digits.
pub fn round_sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

pub fn encode_spectrum(
    g: &DenseGraph,
    profile: &SpectralProfile,
    lambda_loopless: Option<f64>,
) -> SpectrumDocument {
    SpectrumDocument {
        schema: SPECTRUM_SCHEMA.to_string(),
        graph_hash: graph_hash(g),
        eigenvalues: profile.eigenvalues.iter().map(|&x| round_sig12(x)).collect(),
        d: profile.d,
        lambda: round_sig12(profile.lambda),
        lambda_loopless: lambda_loopless.map(round_sig12),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_from_relation;

    #[test]
    fn pack_layout_is_msb_first() {
        // path 0-1-2 plus loop at 2
        let g = DenseGraph::from_edges(3, &[(0, 1), (1, 2), (2, 2)]).unwrap();
        assert_eq!(pack_rows(&g), vec![0b0100_0000, 0b1010_0000, 0b0110_0000]);
    }

    #[test]
    fn document_round_trip_is_bit_identical() {
        let g = build_from_relation(70, |i, j| (i * j) % 7 == 1).unwrap();
        let meta = GraphMeta {
            family: "polynomial".into(),
            q: Some(7),
            t: Some(2),
            polynomial: Some("x1*y1".into()),
            exclude_origin: Some(false),
        };
        let doc = encode_graph(&g, &meta);
        let text = serde_json::to_string(&doc).unwrap();
        let back: GraphDocument = serde_json::from_str(&text).unwrap();
        let (h, m) = decode_graph(&back).unwrap();
        assert_eq!(h, g);
        assert_eq!(m, meta);
        assert_eq!(graph_hash(&h), graph_hash(&g));
    }

    #[test]
    fn rejects_corrupt_documents() {
        let g = DenseGraph::from_edges(3, &[(0, 1)]).unwrap();
        let mut doc = encode_graph(&g, &GraphMeta::default());
        doc.schema = "other".into();
        assert!(decode_graph(&doc).is_err());
        let mut doc = encode_graph(&g, &GraphMeta::default());
        doc.loops = true;
        assert!(decode_graph(&doc).is_err());
        // asymmetric bytes
        assert!(unpack_rows(2, &[0b0100_0000, 0]).is_err());
        // padding bit
        assert!(unpack_rows(2, &[0b0000_0001, 0]).is_err());
    }

    #[test]
    fn hash_distinguishes_graphs() {
        let a = DenseGraph::from_edges(4, &[(0, 1)]).unwrap();
        let b = DenseGraph::from_edges(4, &[(0, 2)]).unwrap();
        assert_ne!(graph_hash(&a), graph_hash(&b));
        assert_eq!(graph_hash(&a).len(), 64);
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(round_sig12(1.0 / 3.0), 0.333333333333);
        assert_eq!(round_sig12(-2.0000000000004), -2.0);
        assert_eq!(round_sig12(0.0), 0.0);
    }
}
