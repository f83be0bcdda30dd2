//! JSON and DOT forms of a graph.
//!
//! ```json
//! {"vertices": ["v", "w"],
//!  "edges": [{"src": "v", "dst": "w", "mult": 3},
//!            {"src": "v", "dst": "v", "mult": "inf"}]}
//! ```
//!
//! Pairs that are not listed have multiplicity 0. A pair listed twice is an
//! error.

use std::collections::HashSet;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{ExtNat, Graph};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeEntry {
    pub src: String,
    pub dst: String,
    pub mult: ExtNat,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: Vec<String>,
    #[serde(default)]
    pub edges: Vec<EdgeEntry>,
}

impl TryFrom<GraphFile> for Graph {
    type Error = Error;

    fn try_from(file: GraphFile) -> Result<Graph> {
        let mut g = Graph::new(file.vertices)?;
        let mut seen = HashSet::new();
        for e in file.edges {
            if !seen.insert((e.src.clone(), e.dst.clone())) {
                return Err(Error::DuplicateEdge {
                    src: e.src,
                    dst: e.dst,
                });
            }
            g.set_mult(&e.src, &e.dst, e.mult)?;
        }
        Ok(g)
    }
}

impl From<&Graph> for GraphFile {
    fn from(g: &Graph) -> GraphFile {
        let n = g.len();
        let edges = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !g.mult_at(i, j).is_zero())
            .map(|(i, j)| EdgeEntry {
                src: g.name(i).to_string(),
                dst: g.name(j).to_string(),
                mult: g.mult_at(i, j),
            })
            .collect();
        GraphFile {
            vertices: g.vertices().to_vec(),
            edges,
        }
    }
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = GraphFile::deserialize(d)?;
        Graph::try_from(file).map_err(serde::de::Error::custom)
    }
}

impl Graph {
    pub fn from_json(text: &str) -> Result<Graph> {
        let file: GraphFile = serde_json::from_str(text)?;
        Graph::try_from(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&GraphFile::from(self)).expect("graph serializes")
    }

    /// Graphviz rendering: one node per vertex, one edge per non-zero pair
    /// labelled with its multiplicity. ω edges are drawn bold and dashed.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph G {\n");
        for v in self.vertices() {
            writeln!(out, "  {};", quote(v)).unwrap();
        }
        let n = self.len();
        for i in 0..n {
            for j in 0..n {
                let m = self.mult_at(i, j);
                let (src, dst) = (quote(self.name(i)), quote(self.name(j)));
                match m {
                    ExtNat::Finite(0) => {}
                    ExtNat::Finite(k) => {
                        writeln!(out, "  {src} -> {dst} [label=\"{k}\"];").unwrap()
                    }
                    ExtNat::Omega => writeln!(
                        out,
                        "  {src} -> {dst} [label=\"ω\", style=\"bold,dashed\"];"
                    )
                    .unwrap(),
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

pub(crate) fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}
