//! Finite directed graphs with edge multiplicities in ℕ ∪ {ω}.
//!
//! Edges are not stored individually: a graph is its vertex list together with
//! the multiplicity of every ordered vertex pair. All structural questions
//! (vertex classes, reachability, return paths, Condition (K), breaking
//! vertices, maximal tails) are answered from that table.

mod extnat;
pub mod io;

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;

pub use extnat::ExtNat;

use crate::error::{Error, Result};
use crate::linalg::IntMatrix;
use crate::Limits;

/// A set of vertex indices.
pub type VertexSet = BTreeSet<usize>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum VertexClass {
    Regular,
    Sink,
    InfiniteEmitter,
}

/// How many return paths are based at a vertex, saturating at two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ReturnPathClass {
    Zero,
    One,
    TwoOrMore,
}

#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    /// Row-major `n × n` multiplicity table.
    mult: Vec<ExtNat>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (i, src) in self.names.iter().enumerate() {
            for (j, dst) in self.names.iter().enumerate() {
                let k = self.mult_at(i, j);
                if !k.is_zero() {
                    m.entry(&format_args!("{src}->{dst}"), &format_args!("{k}"));
                }
            }
        }
        m.finish()
    }
}

impl Graph {
    /// A graph on the given vertices with no edges.
    pub fn new<I, S>(vertices: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut g = Graph {
            names: Vec::new(),
            index: HashMap::new(),
            mult: Vec::new(),
        };
        for v in vertices {
            g.add_vertex(v)?;
        }
        Ok(g)
    }

    /// Builds a graph from `(src, dst, multiplicity)` triples. Later entries
    /// for the same pair overwrite earlier ones.
    pub fn from_edges<S: AsRef<str>>(
        vertices: &[S],
        edges: &[(S, S, ExtNat)],
    ) -> Result<Self> {
        let mut g = Graph::new(vertices.iter().map(|s| s.as_ref().to_string()))?;
        for (s, d, m) in edges {
            g.set_mult(s.as_ref(), d.as_ref(), *m)?;
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn vertices(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names_of<'a>(&self, set: impl IntoIterator<Item = &'a usize>) -> Vec<String> {
        set.into_iter().map(|&i| self.names[i].clone()).collect()
    }

    pub fn index_of(&self, v: &str) -> Result<usize> {
        self.index
            .get(v)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(v.to_string()))
    }

    pub fn contains(&self, v: &str) -> bool {
        self.index.contains_key(v)
    }

    /// Appends a vertex with no incident edges and returns its index.
    pub fn add_vertex(&mut self, name: impl Into<String>) -> Result<usize> {
        let name = name.into();
        if self.index.contains_key(&name) {
            return Err(Error::DuplicateVertex(name));
        }
        let n = self.names.len();
        let mut mult = Vec::with_capacity((n + 1) * (n + 1));
        for i in 0..n {
            mult.extend_from_slice(&self.mult[i * n..(i + 1) * n]);
            mult.push(ExtNat::ZERO);
        }
        mult.extend(std::iter::repeat_n(ExtNat::ZERO, n + 1));
        self.mult = mult;
        self.index.insert(name.clone(), n);
        self.names.push(name);
        Ok(n)
    }

    /// A vertex name derived from `base` that is not yet used in the graph.
    pub fn fresh_name(&self, base: &str) -> String {
        if !self.contains(base) {
            return base.to_string();
        }
        (1..)
            .map(|k| format!("{base}_{k}"))
            .find(|c| !self.contains(c))
            .expect("unbounded search")
    }

    pub fn mult(&self, src: &str, dst: &str) -> Result<ExtNat> {
        Ok(self.mult_at(self.index_of(src)?, self.index_of(dst)?))
    }

    pub fn mult_at(&self, i: usize, j: usize) -> ExtNat {
        self.mult[i * self.len() + j]
    }

    pub fn set_mult(&mut self, src: &str, dst: &str, m: ExtNat) -> Result<()> {
        let (i, j) = (self.index_of(src)?, self.index_of(dst)?);
        self.set_mult_at(i, j, m);
        Ok(())
    }

    pub fn set_mult_at(&mut self, i: usize, j: usize, m: ExtNat) {
        let n = self.len();
        self.mult[i * n + j] = m;
    }

    pub fn add_mult_at(&mut self, i: usize, j: usize, m: ExtNat) {
        let cur = self.mult_at(i, j);
        self.set_mult_at(i, j, cur + m);
    }

    /// The subgraph induced on `keep`, in the order given.
    pub fn induced(&self, keep: &[usize]) -> Graph {
        let mut g = Graph::new(keep.iter().map(|&i| self.names[i].clone()))
            .expect("vertex names are already distinct");
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                g.set_mult_at(a, b, self.mult_at(i, j));
            }
        }
        g
    }

    /// Removes the given vertices and all incident edges.
    pub fn without(&self, drop: &VertexSet) -> Graph {
        let keep: Vec<usize> = (0..self.len()).filter(|i| !drop.contains(i)).collect();
        self.induced(&keep)
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&j| !self.mult_at(i, j).is_zero())
    }

    pub fn out_total(&self, i: usize) -> ExtNat {
        (0..self.len()).map(|j| self.mult_at(i, j)).sum()
    }

    pub fn class_at(&self, i: usize) -> VertexClass {
        match self.out_total(i) {
            ExtNat::Omega => VertexClass::InfiniteEmitter,
            ExtNat::Finite(0) => VertexClass::Sink,
            ExtNat::Finite(_) => VertexClass::Regular,
        }
    }

    pub fn vertex_class(&self, v: &str) -> Result<VertexClass> {
        Ok(self.class_at(self.index_of(v)?))
    }

    pub fn is_regular(&self) -> bool {
        (0..self.len()).all(|i| self.class_at(i) == VertexClass::Regular)
    }

    /// Indices of sinks and infinite emitters.
    pub fn singular_vertices(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.class_at(i) != VertexClass::Regular)
            .collect()
    }

    pub fn reachability(&self) -> Reachability {
        Reachability::of(self)
    }

    /// Whether there is a path with at least one edge from `v` to `w`.
    pub fn reaches(&self, v: &str, w: &str) -> Result<bool> {
        let (i, j) = (self.index_of(v)?, self.index_of(w)?);
        Ok(self.reachability().reaches(i, j))
    }

    /// Like [`Graph::reaches`], but every vertex also reaches itself.
    pub fn reaches_refl(&self, v: &str, w: &str) -> Result<bool> {
        let (i, j) = (self.index_of(v)?, self.index_of(w)?);
        Ok(self.reachability().reaches_refl(i, j))
    }

    pub fn return_path_class(&self, v: &str) -> Result<ReturnPathClass> {
        let i = self.index_of(v)?;
        Ok(self.return_path_class_at(i, &self.reachability()))
    }

    /// A vertex has exactly one return path iff its strongly connected
    /// component is a bare cycle: as many edges (with multiplicity) as
    /// vertices. Any extra internal edge yields a second return path.
    pub fn return_path_class_at(&self, i: usize, reach: &Reachability) -> ReturnPathClass {
        if !reach.reaches(i, i) {
            return ReturnPathClass::Zero;
        }
        let scc = reach.component(i);
        let internal: ExtNat = scc
            .iter()
            .flat_map(|&a| scc.iter().map(move |&b| (a, b)))
            .map(|(a, b)| self.mult_at(a, b))
            .sum();
        if internal == ExtNat::Finite(scc.len() as u64) {
            ReturnPathClass::One
        } else {
            ReturnPathClass::TwoOrMore
        }
    }

    /// First vertex (in vertex order) with exactly one return path.
    pub fn condition_k_witness(&self) -> Option<usize> {
        let reach = self.reachability();
        (0..self.len()).find(|&i| self.return_path_class_at(i, &reach) == ReturnPathClass::One)
    }

    pub fn condition_k(&self) -> bool {
        self.condition_k_witness().is_none()
    }

    /// Infinite emitters with a finite, non-zero number of emitted edges whose
    /// range is the vertex itself or reaches it.
    pub fn breaking_vertices(&self) -> VertexSet {
        let reach = self.reachability();
        (0..self.len())
            .filter(|&v| self.class_at(v) == VertexClass::InfiniteEmitter)
            .filter(|&v| {
                let back: ExtNat = (0..self.len())
                    .filter(|&w| reach.reaches_refl(w, v))
                    .map(|w| self.mult_at(v, w))
                    .sum();
                matches!(back, ExtNat::Finite(k) if k > 0)
            })
            .collect()
    }

    /// All maximal tails, by exhaustive search over vertex subsets.
    ///
    /// Condition three uses the reflexive order, so `v ≥ y` admits `y = v`.
    pub fn maximal_tails(&self, limits: &Limits) -> Result<Vec<VertexSet>> {
        let n = self.len();
        limits.check_brute_force("maximal tails", n)?;
        let reach = self.reachability();
        let pred: Vec<u64> = (0..n)
            .map(|w| mask((0..n).filter(|&v| reach.reaches(v, w))))
            .collect();
        let below: Vec<u64> = (0..n)
            .map(|v| mask((0..n).filter(|&y| reach.reaches_refl(v, y))))
            .collect();
        let succ: Vec<u64> = (0..n).map(|v| mask(self.successors(v))).collect();
        let regular: Vec<bool> = (0..n)
            .map(|v| self.class_at(v) == VertexClass::Regular)
            .collect();

        let mut tails = Vec::new();
        for m in 1u64..(1u64 << n) {
            let members: Vec<usize> = (0..n).filter(|&i| m >> i & 1 == 1).collect();
            let closed_up = members.iter().all(|&w| pred[w] & !m == 0);
            let extendable = members
                .iter()
                .all(|&v| !regular[v] || succ[v] & m != 0);
            let directed = closed_up
                && extendable
                && members.iter().enumerate().all(|(a, &v)| {
                    members[a + 1..]
                        .iter()
                        .all(|&w| below[v] & below[w] & m != 0)
                });
            if directed {
                tails.push(members.into_iter().collect());
            }
        }
        tails.sort_by(canonical_order);
        Ok(tails)
    }

    pub fn purely_infinite_report(&self, limits: &Limits) -> Result<PureInfinitenessReport> {
        let k_witness = self.condition_k_witness();
        let breaking = self.breaking_vertices();
        let reach = self.reachability();
        let mut tail_witness = None;
        for tail in self.maximal_tails(limits)? {
            let on_cycle: Vec<usize> = tail.iter().copied().filter(|&c| reach.reaches(c, c)).collect();
            // Paths between members of a tail stay inside it (tails are closed
            // under predecessors), so reachability in the whole graph suffices.
            if let Some(&bad) = tail
                .iter()
                .find(|&&w| !on_cycle.iter().any(|&c| reach.reaches_refl(w, c)))
            {
                tail_witness = Some(TailWitness {
                    tail: self.names_of(&tail),
                    vertex: self.names[bad].clone(),
                });
                break;
            }
        }
        let condition_k = k_witness.is_none();
        let no_breaking_vertices = breaking.is_empty();
        let tails_connect_to_cycles = tail_witness.is_none();
        Ok(PureInfinitenessReport {
            condition_k,
            single_return_path_vertex: k_witness.map(|i| self.names[i].clone()),
            no_breaking_vertices,
            breaking_vertices: self.names_of(&breaking),
            tails_connect_to_cycles,
            tail_witness,
            verdict: condition_k && no_breaking_vertices && tails_connect_to_cycles,
        })
    }

    /// Submatrix of the adjacency matrix with the given row and column order.
    pub fn adjacency_matrix(&self, rows: &[usize], cols: &[usize]) -> Result<IntMatrix> {
        let mut out = IntMatrix::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                match self.mult_at(i, j) {
                    ExtNat::Finite(k) => out.set(a, b, BigInt::from(k)),
                    ExtNat::Omega => {
                        return Err(Error::InfiniteMultiplicity {
                            src: self.names[i].clone(),
                            dst: self.names[j].clone(),
                        })
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn adjacency_matrix_named(&self, rows: &[&str], cols: &[&str]) -> Result<IntMatrix> {
        let r = rows.iter().map(|v| self.index_of(v)).collect::<Result<Vec<_>>>()?;
        let c = cols.iter().map(|v| self.index_of(v)).collect::<Result<Vec<_>>>()?;
        self.adjacency_matrix(&r, &c)
    }

    pub fn full_adjacency(&self) -> Result<IntMatrix> {
        let all: Vec<usize> = (0..self.len()).collect();
        self.adjacency_matrix(&all, &all)
    }
}

fn mask(it: impl Iterator<Item = usize>) -> u64 {
    it.fold(0, |m, i| m | 1 << i)
}

/// Orders vertex sets by size, then lexicographically.
pub fn canonical_order(a: &VertexSet, b: &VertexSet) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.iter().cmp(b.iter()))
}

#[derive(Debug, Clone, Serialize)]
pub struct TailWitness {
    pub tail: Vec<String>,
    pub vertex: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct PureInfinitenessReport {
    pub condition_k: bool,
    pub single_return_path_vertex: Option<String>,
    pub no_breaking_vertices: bool,
    pub breaking_vertices: Vec<String>,
    pub tails_connect_to_cycles: bool,
    pub tail_witness: Option<TailWitness>,
    pub verdict: bool,
}

impl PureInfinitenessReport {
    /// Name of the first failing criterion, if any.
    pub fn failing_criterion(&self) -> Option<&'static str> {
        if !self.condition_k {
            Some("Condition (K)")
        } else if !self.no_breaking_vertices {
            Some("no breaking vertices")
        } else if !self.tails_connect_to_cycles {
            Some("every maximal-tail vertex connects to a cycle in the tail")
        } else {
            None
        }
    }
}

/// Path-of-length-at-least-one reachability between all vertex pairs.
#[derive(Debug, Clone)]
pub struct Reachability {
    n: usize,
    table: Vec<bool>,
}

impl Reachability {
    pub fn of(g: &Graph) -> Self {
        let n = g.len();
        let mut table = vec![false; n * n];
        for s in 0..n {
            let mut queue: VecDeque<usize> = g.successors(s).collect();
            while let Some(w) = queue.pop_front() {
                if !table[s * n + w] {
                    table[s * n + w] = true;
                    queue.extend(g.successors(w));
                }
            }
        }
        Reachability { n, table }
    }

    pub fn reaches(&self, v: usize, w: usize) -> bool {
        self.table[v * self.n + w]
    }

    pub fn reaches_refl(&self, v: usize, w: usize) -> bool {
        v == w || self.reaches(v, w)
    }

    /// The strongly connected component of `v` (just `{v}` when `v` lies on
    /// no cycle).
    pub fn component(&self, v: usize) -> VertexSet {
        (0..self.n)
            .filter(|&w| w == v || (self.reaches(v, w) && self.reaches(w, v)))
            .collect()
    }
}
