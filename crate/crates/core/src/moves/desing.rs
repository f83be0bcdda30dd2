use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{contract_vertex_at, cuntz_splice_at, graphs_isomorphic};
use crate::error::{Error, Result};
use crate::graph::{ExtNat, Graph, ReturnPathClass, VertexClass};
use crate::Limits;

/// Smallest depth accepted by [`verify_desing_splice_commutes`].
pub const MIN_COMMUTE_DEPTH: usize = 3;

/// An eventually periodic listing `e₁, e₂, …` of the edges leaving an
/// infinite emitter, recorded by their targets.
///
/// Entries `pattern[..period_start]` are listed once; `pattern[period_start..]`
/// then repeats forever.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeEnumeration {
    pub vertex: String,
    pub pattern: Vec<String>,
    pub period_start: usize,
}

impl EdgeEnumeration {
    /// Finite targets first (each repeated by its multiplicity, in vertex
    /// order), then the ω targets cycling in vertex order.
    pub fn canonical(g: &Graph, v: &str) -> Result<Self> {
        let i = g.index_of(v)?;
        let mut pattern = Vec::new();
        let mut cycle = Vec::new();
        for j in g.successors(i) {
            match g.mult_at(i, j) {
                ExtNat::Finite(k) => pattern.extend((0..k).map(|_| g.name(j).to_string())),
                ExtNat::Omega => cycle.push(g.name(j).to_string()),
            }
        }
        let period_start = pattern.len();
        pattern.extend(cycle);
        Ok(EdgeEnumeration {
            vertex: v.to_string(),
            pattern,
            period_start,
        })
    }

    /// Target of the edge at 0-based position `i`.
    pub fn target(&self, i: usize) -> &str {
        if i < self.pattern.len() {
            return &self.pattern[i];
        }
        let period = self.pattern.len() - self.period_start;
        &self.pattern[self.period_start + (i - self.period_start) % period]
    }

    /// Checks that the listing visits every edge out of `vertex` exactly once.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let fail = |reason: String| Error::Enumeration {
            vertex: self.vertex.clone(),
            reason,
        };
        let v = g.index_of(&self.vertex)?;
        if g.class_at(v) != VertexClass::InfiniteEmitter {
            return Err(fail("vertex is not an infinite emitter".into()));
        }
        if self.period_start >= self.pattern.len() {
            return Err(fail("the periodic part is empty".into()));
        }
        let mut prefix: HashMap<usize, u64> = HashMap::new();
        let mut periodic: HashMap<usize, u64> = HashMap::new();
        for (pos, name) in self.pattern.iter().enumerate() {
            let t = g
                .index_of(name)
                .map_err(|_| fail(format!("unknown target {name:?}")))?;
            let slot = if pos < self.period_start { &mut prefix } else { &mut periodic };
            *slot.entry(t).or_default() += 1;
        }
        for t in 0..g.len() {
            let (pre, per) = (prefix.get(&t).copied().unwrap_or(0), periodic.get(&t).copied().unwrap_or(0));
            let name = g.name(t);
            match g.mult_at(v, t) {
                ExtNat::Finite(k) => {
                    if per > 0 {
                        return Err(fail(format!("finite target {name:?} occurs in the periodic part")));
                    }
                    if pre != k {
                        return Err(fail(format!("target {name:?} listed {pre} times, multiplicity is {k}")));
                    }
                }
                ExtNat::Omega => {
                    if per == 0 {
                        return Err(fail(format!("ω target {name:?} is missing from the periodic part")));
                    }
                }
            }
        }
        Ok(())
    }

    fn with_first(&self, first: &str) -> Self {
        let mut pattern = Vec::with_capacity(self.pattern.len() + 1);
        pattern.push(first.to_string());
        pattern.extend(self.pattern.iter().cloned());
        EdgeEnumeration {
            vertex: self.vertex.clone(),
            pattern,
            period_start: self.period_start + 1,
        }
    }
}

/// A desingularization cut off after `depth` tail vertices per singular
/// vertex. The last tail vertex of each tail (the frontier) emits nothing.
#[derive(Debug, Clone, Serialize)]
pub struct TruncatedDesing {
    pub graph: Graph,
    pub depth: usize,
    pub frontier: Vec<String>,
    /// Tail vertices `v₁, …, v_d` added for each singular vertex `v`.
    pub tail_map: BTreeMap<String, Vec<String>>,
}

impl TruncatedDesing {
    /// The graph with every frontier vertex removed.
    pub fn strip_frontier(&self) -> Graph {
        let drop = self
            .frontier
            .iter()
            .map(|f| self.graph.index_of(f).expect("frontier vertex exists"))
            .collect();
        self.graph.without(&drop)
    }
}

/// Adds a tail `v → v₁ → ⋯ → v_d` to every sink and every infinite emitter.
/// An infinite emitter additionally loses its original edges, and edge
/// `e_{i+1}` of its enumeration is re-attached at `v_i` (with `v₀ = v`).
pub fn desingularize_truncated(
    g: &Graph,
    orders: &[EdgeEnumeration],
    depth: usize,
) -> Result<TruncatedDesing> {
    desingularize_with(g, orders, |_| depth)
}

fn desingularize_with(
    g: &Graph,
    orders: &[EdgeEnumeration],
    depth_of: impl Fn(usize) -> usize,
) -> Result<TruncatedDesing> {
    let mut by_vertex: HashMap<usize, &EdgeEnumeration> = HashMap::new();
    for e in orders {
        e.validate(g)?;
        if by_vertex.insert(g.index_of(&e.vertex)?, e).is_some() {
            return Err(Error::Enumeration {
                vertex: e.vertex.clone(),
                reason: "more than one enumeration given".into(),
            });
        }
    }

    let one = ExtNat::Finite(1);
    let mut out = g.clone();
    let mut frontier = Vec::new();
    let mut tail_map = BTreeMap::new();
    let mut min_depth = usize::MAX;
    for v in g.singular_vertices() {
        let d = depth_of(v);
        if d == 0 {
            return Err(Error::Depth { depth: d, min: 1 });
        }
        min_depth = min_depth.min(d);
        let order = match g.class_at(v) {
            VertexClass::InfiniteEmitter => {
                let e = by_vertex.get(&v).ok_or_else(|| Error::Enumeration {
                    vertex: g.name(v).to_string(),
                    reason: "no enumeration given for infinite emitter".into(),
                })?;
                Some(*e)
            }
            _ => None,
        };
        if order.is_some() {
            for j in 0..g.len() {
                out.set_mult_at(v, j, ExtNat::ZERO);
            }
        }
        let mut tail = Vec::with_capacity(d);
        let mut prev = v;
        for i in 0..d {
            let name = out.fresh_name(&format!("{}_{}", g.name(v), i + 1));
            let t = out.add_vertex(name.clone())?;
            out.set_mult_at(prev, t, one);
            if let Some(e) = order {
                let target = g.index_of(e.target(i))?;
                out.add_mult_at(prev, target, one);
            }
            tail.push(name);
            prev = t;
        }
        frontier.push(tail.last().expect("depth is positive").clone());
        tail_map.insert(g.name(v).to_string(), tail);
    }

    Ok(TruncatedDesing {
        graph: out,
        depth: if min_depth == usize::MAX { depth_of(0) } else { min_depth },
        frontier,
        tail_map,
    })
}

/// Outcome of comparing "desingularize, then splice" with "splice, then
/// desingularize" on truncated graphs.
#[derive(Debug, Clone, Serialize)]
pub struct CommuteReport {
    pub vertex: String,
    pub depth: usize,
    pub infinite_emitter: bool,
    /// `v` still has two or more return paths in the truncated
    /// desingularization of `E`.
    pub two_return_paths_after_desing: bool,
    /// Vertex counts of the two stripped graphs being compared.
    pub compared_sizes: (usize, usize),
    pub isomorphic: bool,
    /// Pairs `(x, y)` of the bijection found, `x` in the spliced
    /// desingularization and `y` in the desingularized splice.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bijection: Option<Vec<(String, String)>>,
    pub verdict: bool,
}

/// Checks that splicing at `v` commutes with truncated desingularization.
///
/// `F` is `E` desingularized to `depth`; `G` is `E_C` desingularized with the
/// same enumerations, except that if `v` is an infinite emitter its
/// enumeration in `E_C` starts with the new edge to `u₁` and its tail is one
/// longer. Contracting the first tail vertex of `v` in `G`, the frontiers are
/// stripped from `F_C` and `G` and the two are compared up to isomorphism.
pub fn verify_desing_splice_commutes(
    g: &Graph,
    v: &str,
    orders: &[EdgeEnumeration],
    depth: usize,
    limits: &Limits,
) -> Result<CommuteReport> {
    if depth < MIN_COMMUTE_DEPTH {
        return Err(Error::Depth {
            depth,
            min: MIN_COMMUTE_DEPTH,
        });
    }
    let vi = g.index_of(v)?;
    let class = g.return_path_class_at(vi, &g.reachability());
    if class != ReturnPathClass::TwoOrMore {
        return Err(Error::SpliceVertex {
            vertex: v.to_string(),
            class,
        });
    }
    let infinite_emitter = g.class_at(vi) == VertexClass::InfiniteEmitter;

    let f = desingularize_truncated(g, orders, depth)?;
    let fv = f.graph.index_of(v)?;
    let two_paths = f.graph.return_path_class_at(fv, &f.graph.reachability()) == ReturnPathClass::TwoOrMore;
    let mut report = CommuteReport {
        vertex: v.to_string(),
        depth,
        infinite_emitter,
        two_return_paths_after_desing: two_paths,
        compared_sizes: (0, 0),
        isomorphic: false,
        bijection: None,
        verdict: false,
    };
    if !two_paths {
        return Ok(report);
    }

    let fc = cuntz_splice_at(&f.graph, fv)?;
    let fc_stripped = TruncatedDesing {
        graph: fc.graph,
        depth,
        frontier: f.frontier.clone(),
        tail_map: f.tail_map.clone(),
    }
    .strip_frontier();

    let ec = cuntz_splice_at(g, vi)?;
    let ec_orders: Vec<EdgeEnumeration> = orders
        .iter()
        .map(|e| if e.vertex == v { e.with_first(ec.u1_name()) } else { e.clone() })
        .collect();
    let gd = desingularize_with(&ec.graph, &ec_orders, |i| {
        if i == vi && infinite_emitter {
            depth + 1
        } else {
            depth
        }
    })?;
    let mut frontier = gd.frontier.clone();
    let mut contracted = gd.graph.clone();
    if infinite_emitter {
        let first = &gd.tail_map[v][0];
        contracted = contract_vertex_at(&contracted, contracted.index_of(first)?)?;
        frontier.retain(|x| x != first);
    }
    let g_stripped = TruncatedDesing {
        graph: contracted,
        depth,
        frontier,
        tail_map: BTreeMap::new(),
    }
    .strip_frontier();

    report.compared_sizes = (fc_stripped.len(), g_stripped.len());
    if let Some(bij) = graphs_isomorphic(&fc_stripped, &g_stripped, limits)? {
        report.isomorphic = true;
        report.bijection = Some(
            bij.iter()
                .enumerate()
                .map(|(a, &b)| (fc_stripped.name(a).to_string(), g_stripped.name(b).to_string()))
                .collect(),
        );
    }
    report.verdict = report.two_return_paths_after_desing && report.isomorphic;
    Ok(report)
}
