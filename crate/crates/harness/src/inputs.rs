//! Small text formats accepted by the CLI.
//!
//! Subset file: vertex indices separated by whitespace or commas; `#` starts
//! a comment.
//!
//! Pattern file, one directive per line, `#` comments:
//!
//! ```text
//! vertices = 5
//! edge 0 1        # required adjacency; `edge 2 2` requires a loop
//! nonedge 0 2     # forbidden adjacency
//! distinct 1 3    # the two roles must map to different vertices
//! ```

use std::path::Path;

use vclab_core::graph::VertexSet;
use vclab_core::homcount::Pattern;

use crate::error::{config_err, Result};

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

pub fn parse_subset(src: &str, n: usize) -> Result<VertexSet> {
    let mut members = Vec::new();
    for line in src.lines() {
        for tok in strip_comment(line).split(|c: char| c.is_whitespace() || c == ',') {
            if tok.is_empty() {
                continue;
            }
            members.push(
                tok.parse::<u32>()
                    .map_err(|_| config_err(format!("bad vertex index {tok:?}")))?,
            );
        }
    }
    Ok(VertexSet::new(members, n)?)
}

pub fn parse_pattern(src: &str) -> Result<Pattern> {
    let mut pat: Option<Pattern> = None;
    for (i, line) in src.lines().enumerate() {
        let line = strip_comment(line);
        if line.is_empty() {
            continue;
        }
        let err = |m: &str| config_err(format!("pattern line {}: {m}", i + 1));
        if let Some((key, value)) = line.split_once('=') {
            if key.trim() != "vertices" || pat.is_some() {
                return Err(err("expected a single `vertices = K` before directives"));
            }
            let k: usize = value.trim().parse().map_err(|_| err("bad vertex count"))?;
            if k == 0 {
                return Err(err("pattern needs at least one vertex"));
            }
            pat = Some(Pattern::new(k));
            continue;
        }
        let p = pat.take().ok_or_else(|| err("`vertices = K` must come first"))?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        let [op, a, b] = toks[..] else {
            return Err(err("expected `<edge|nonedge|distinct> A B`"));
        };
        let a: usize = a.parse().map_err(|_| err("bad role index"))?;
        let b: usize = b.parse().map_err(|_| err("bad role index"))?;
        pat = Some(match op {
            "edge" => p.require(a, b)?,
            "nonedge" => p.forbid(a, b)?,
            "distinct" => p.distinct(a, b)?,
            _ => return Err(err("unknown directive")),
        });
    }
    pat.ok_or_else(|| config_err("empty pattern file"))
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_files() {
        let s = parse_subset("0, 3 5\n# skip 9\n7 # tail\n", 8).unwrap();
        assert_eq!(s.members(), &[0, 3, 5, 7]);
        assert!(parse_subset("1 1", 8).is_err());
        assert!(parse_subset("8", 8).is_err());
        assert!(parse_subset("x", 8).is_err());
    }

    #[test]
    fn pattern_files() {
        let p = parse_pattern("# triangle\nvertices = 3\nedge 0 1\nedge 1 2\nedge 2 0\n").unwrap();
        assert_eq!(p, Pattern::cycle(3));
        let p = parse_pattern("vertices = 2\nnonedge 0 1\ndistinct 0 1\n").unwrap();
        assert_eq!(p.forbidden().len(), 1);
        assert!(parse_pattern("edge 0 1\n").is_err());
        assert!(parse_pattern("vertices = 2\nedge 0 5\n").is_err());
        assert!(parse_pattern("vertices = 2\nedge 0 1\nnonedge 0 1\n").is_err());
        assert!(parse_pattern("vertices = 2\nloop 0\n").is_err());
        assert!(parse_pattern("").is_err());
    }
}
