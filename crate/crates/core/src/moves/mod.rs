//! Graph moves: the Cuntz splice, single-vertex contraction, truncated
//! desingularization, and a small-graph isomorphism search used to compare
//! their results.

mod desing;
mod iso;

use serde::Serialize;

pub use desing::{
    desingularize_truncated, verify_desing_splice_commutes, CommuteReport, EdgeEnumeration,
    TruncatedDesing,
};
pub use iso::graphs_isomorphic;

use crate::error::{Error, Result};
use crate::graph::{ExtNat, Graph, ReturnPathClass, VertexClass};

/// A graph with a Cuntz splice attached at `v`. The original vertices keep
/// their indices; `u1` and `u2` are appended after them.
#[derive(Debug, Clone, Serialize)]
pub struct SpliceResult {
    pub graph: Graph,
    #[serde(skip)]
    pub v: usize,
    #[serde(skip)]
    pub u1: usize,
    #[serde(skip)]
    pub u2: usize,
    #[serde(rename = "v")]
    v_name: String,
    #[serde(rename = "u1")]
    u1_name: String,
    #[serde(rename = "u2")]
    u2_name: String,
}

impl SpliceResult {
    pub fn v_name(&self) -> &str {
        &self.v_name
    }

    pub fn u1_name(&self) -> &str {
        &self.u1_name
    }

    pub fn u2_name(&self) -> &str {
        &self.u2_name
    }
}

/// Attaches the two-vertex segment
///
/// ```text
/// v ⇄ u₁ ⇄ u₂,  with one loop at u₁ and one loop at u₂
/// ```
///
/// at `v`, which must support at least two return paths.
pub fn cuntz_splice(g: &Graph, v: &str) -> Result<SpliceResult> {
    cuntz_splice_at(g, g.index_of(v)?)
}

pub fn cuntz_splice_at(g: &Graph, v: usize) -> Result<SpliceResult> {
    let class = g.return_path_class_at(v, &g.reachability());
    if class != ReturnPathClass::TwoOrMore {
        return Err(Error::SpliceVertex {
            vertex: g.name(v).to_string(),
            class,
        });
    }
    let mut out = g.clone();
    let u1_name = out.fresh_name("u1");
    let u1 = out.add_vertex(u1_name.clone())?;
    let u2_name = out.fresh_name("u2");
    let u2 = out.add_vertex(u2_name.clone())?;
    let one = ExtNat::Finite(1);
    for (s, d) in [(v, u1), (u1, v), (u1, u1), (u1, u2), (u2, u1), (u2, u2)] {
        out.set_mult_at(s, d, one);
    }
    Ok(SpliceResult {
        graph: out,
        v,
        u1,
        u2,
        v_name: g.name(v).to_string(),
        u1_name,
        u2_name,
    })
}

/// Removes a regular, loop-free vertex `w`, replacing every two-step path
/// `u → w → x` by a direct edge: `mult'(u, x) = mult(u, x) + mult(u, w)·mult(w, x)`.
pub fn contract_vertex(g: &Graph, w: &str) -> Result<Graph> {
    contract_vertex_at(g, g.index_of(w)?)
}

pub fn contract_vertex_at(g: &Graph, w: usize) -> Result<Graph> {
    let class = g.class_at(w);
    if class != VertexClass::Regular {
        return Err(Error::NotRegular {
            vertex: g.name(w).to_string(),
            class,
        });
    }
    if !g.mult_at(w, w).is_zero() {
        return Err(Error::HasLoop(g.name(w).to_string()));
    }
    let keep: Vec<usize> = (0..g.len()).filter(|&i| i != w).collect();
    let mut out = g.induced(&keep);
    for (a, &u) in keep.iter().enumerate() {
        let into = g.mult_at(u, w);
        if into.is_zero() {
            continue;
        }
        for (b, &x) in keep.iter().enumerate() {
            out.add_mult_at(a, b, into * g.mult_at(w, x));
        }
    }
    Ok(out)
}
