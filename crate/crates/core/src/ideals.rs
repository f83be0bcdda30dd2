//! Hereditary saturated sets, admissible pairs, the lattice they form, and
//! the finite poset of join-irreducible pairs standing in for the primitive
//! ideal space.

use std::fmt::Write as _;

use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{canonical_order, io::quote, ExtNat, Graph, VertexClass, VertexSet};
use crate::moves::cuntz_splice;
use crate::Limits;

pub fn is_hereditary(g: &Graph, h: &VertexSet) -> bool {
    h.iter().all(|&v| g.successors(v).all(|w| h.contains(&w)))
}

/// Every regular vertex whose edges all land in `h` belongs to `h`.
pub fn is_saturated(g: &Graph, h: &VertexSet) -> bool {
    (0..g.len()).all(|v| {
        h.contains(&v) || g.class_at(v) != VertexClass::Regular || !g.successors(v).all(|w| h.contains(&w))
    })
}

/// Smallest hereditary and saturated set containing `s`.
pub fn hs_closure(g: &Graph, s: &VertexSet) -> VertexSet {
    let mut h = s.clone();
    loop {
        let before = h.len();
        let mut stack: Vec<usize> = h.iter().copied().collect();
        while let Some(v) = stack.pop() {
            for w in g.successors(v) {
                if h.insert(w) {
                    stack.push(w);
                }
            }
        }
        let forced: Vec<usize> = (0..g.len())
            .filter(|v| !h.contains(v))
            .filter(|&v| g.class_at(v) == VertexClass::Regular && g.successors(v).all(|w| h.contains(&w)))
            .collect();
        h.extend(forced);
        if h.len() == before {
            return h;
        }
    }
}

/// All hereditary saturated subsets, ordered by size and then
/// lexicographically.
pub fn enumerate_hs(g: &Graph, limits: &Limits) -> Result<Vec<VertexSet>> {
    let n = g.len();
    limits.check_brute_force("hereditary saturated sets", n)?;
    let succ: Vec<u64> = (0..n).map(|v| g.successors(v).fold(0u64, |m, w| m | 1 << w)).collect();
    let regular: Vec<bool> = (0..n).map(|v| g.class_at(v) == VertexClass::Regular).collect();
    let mut out = Vec::new();
    for mask in 0u64..1 << n {
        let hereditary = (0..n).all(|v| mask >> v & 1 == 0 || succ[v] & !mask == 0);
        let saturated = (0..n).all(|v| mask >> v & 1 == 1 || !regular[v] || succ[v] & !mask != 0);
        if hereditary && saturated {
            out.push((0..n).filter(|v| mask >> v & 1 == 1).collect::<VertexSet>());
        }
    }
    out.sort_by(canonical_order);
    Ok(out)
}

/// Infinite emitters outside `h` sending a finite, non-zero number of edges
/// to the complement of `h`.
pub fn h_infinity_fin(g: &Graph, h: &VertexSet) -> Result<VertexSet> {
    if !is_hereditary(g, h) || !is_saturated(g, h) {
        return Err(Error::NotHereditarySaturated(g.names_of(h)));
    }
    Ok((0..g.len())
        .filter(|v| !h.contains(v) && g.class_at(*v) == VertexClass::InfiniteEmitter)
        .filter(|&v| {
            let out: ExtNat = (0..g.len()).filter(|w| !h.contains(w)).map(|w| g.mult_at(v, w)).sum();
            matches!(out, ExtNat::Finite(k) if k > 0)
        })
        .collect())
}

/// A hereditary saturated `h` together with `b ⊆ H_∞^fin(h)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AdmissiblePair {
    pub h: VertexSet,
    pub b: VertexSet,
}

impl AdmissiblePair {
    /// `h ⊆ h′` and `b ⊆ h′ ∪ b′`.
    pub fn leq(&self, other: &AdmissiblePair) -> bool {
        self.h.is_subset(&other.h) && self.b.iter().all(|x| other.h.contains(x) || other.b.contains(x))
    }

    pub fn describe(&self, g_names: &[String]) -> String {
        let list = |s: &VertexSet| s.iter().map(|&i| g_names[i].as_str()).collect::<Vec<_>>().join(",");
        format!("({{{}}}, {{{}}})", list(&self.h), list(&self.b))
    }
}

/// The admissible pairs of a graph, ordered as the ideals they represent.
#[derive(Debug, Clone)]
pub struct IdealLattice {
    pub vertices: Vec<String>,
    pub pairs: Vec<AdmissiblePair>,
    /// `leq[i][j]` iff `pairs[i] ≤ pairs[j]`.
    pub leq: Vec<Vec<bool>>,
}

impl IdealLattice {
    fn from_pairs(vertices: Vec<String>, pairs: Vec<AdmissiblePair>) -> Self {
        let leq = pairs
            .iter()
            .map(|p| pairs.iter().map(|q| p.leq(q)).collect())
            .collect();
        IdealLattice { vertices, pairs, leq }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn position(&self, p: &AdmissiblePair) -> Option<usize> {
        self.pairs.iter().position(|q| q == p)
    }

    /// The least element, if there is one.
    pub fn bottom(&self) -> Option<usize> {
        (0..self.len()).find(|&i| (0..self.len()).all(|j| self.leq[i][j]))
    }

    /// The greatest element, if there is one.
    pub fn top(&self) -> Option<usize> {
        (0..self.len()).find(|&i| (0..self.len()).all(|j| self.leq[j][i]))
    }

    /// Least upper bound of `i` and `j`, if it exists.
    pub fn join(&self, i: usize, j: usize) -> Option<usize> {
        let upper: Vec<usize> = (0..self.len()).filter(|&k| self.leq[i][k] && self.leq[j][k]).collect();
        upper.iter().copied().find(|&k| upper.iter().all(|&u| self.leq[k][u]))
    }

    /// Greatest lower bound of `i` and `j`, if it exists.
    pub fn meet(&self, i: usize, j: usize) -> Option<usize> {
        let lower: Vec<usize> = (0..self.len()).filter(|&k| self.leq[k][i] && self.leq[k][j]).collect();
        lower.iter().copied().find(|&k| lower.iter().all(|&l| self.leq[l][k]))
    }

    /// Covering relations `(i, j)` with `i < j` and nothing strictly between.
    pub fn hasse_edges(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let lt = |a: usize, b: usize| a != b && self.leq[a][b];
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if lt(i, j) && !(0..n).any(|k| lt(i, k) && lt(k, j)) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn describe(&self, i: usize) -> String {
        self.pairs[i].describe(&self.vertices)
    }

    /// Hasse diagram in DOT, bottom element at the bottom.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph Lattice {\n  rankdir=BT;\n");
        for i in 0..self.len() {
            let _ = writeln!(s, "  p{i} [label={}];", quote(&self.describe(i)));
        }
        for (i, j) in self.hasse_edges() {
            let _ = writeln!(s, "  p{i} -> p{j};");
        }
        s.push_str("}\n");
        s
    }

    fn names(&self, set: &VertexSet) -> Vec<&str> {
        set.iter().map(|&i| self.vertices[i].as_str()).collect()
    }
}

#[derive(Serialize)]
struct NamedPair<'a> {
    #[serde(rename = "H")]
    h: Vec<&'a str>,
    #[serde(rename = "B")]
    b: Vec<&'a str>,
}

impl Serialize for IdealLattice {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<NamedPair> = self
            .pairs
            .iter()
            .map(|p| NamedPair {
                h: self.names(&p.h),
                b: self.names(&p.b),
            })
            .collect();
        let order: Vec<(usize, usize)> = (0..self.len())
            .flat_map(|i| (0..self.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && self.leq[i][j])
            .collect();
        let mut st = s.serialize_struct("IdealLattice", 2)?;
        st.serialize_field("pairs", &pairs)?;
        st.serialize_field("strictly_below", &order)?;
        st.end()
    }
}

/// All admissible pairs of a graph satisfying Condition (K).
pub fn ideal_lattice(g: &Graph, limits: &Limits) -> Result<IdealLattice> {
    if let Some(w) = g.condition_k_witness() {
        return Err(Error::ConditionK(g.name(w).to_string()));
    }
    let mut pairs = Vec::new();
    for h in enumerate_hs(g, limits)? {
        let fin: Vec<usize> = h_infinity_fin(g, &h)?.into_iter().collect();
        let mut bs: Vec<VertexSet> = (0u64..1 << fin.len())
            .map(|m| (0..fin.len()).filter(|k| m >> k & 1 == 1).map(|k| fin[k]).collect())
            .collect();
        bs.sort_by(canonical_order);
        pairs.extend(bs.into_iter().map(|b| AdmissiblePair { h: h.clone(), b }));
    }
    Ok(IdealLattice::from_pairs(g.vertices().to_vec(), pairs))
}

/// The splice-induced correspondence between admissible pairs.
#[derive(Debug, Clone, Serialize)]
pub struct LatticeMap {
    pub source: IdealLattice,
    pub target: IdealLattice,
    /// `map[i]` is the index in `target` of the image of `source.pairs[i]`.
    pub map: Vec<usize>,
}

/// `(H, B) ↦ (H ∪ {u₁, u₂}, B)` when `v ∈ H`, identity otherwise; checked to
/// be an order isomorphism onto the lattice of the spliced graph.
pub fn splice_lattice_map(g: &Graph, v: &str, limits: &Limits) -> Result<LatticeMap> {
    let spliced = cuntz_splice(g, v)?;
    let source = ideal_lattice(g, limits)?;
    let target = ideal_lattice(&spliced.graph, limits)?;
    let mut map = Vec::with_capacity(source.len());
    for p in &source.pairs {
        let mut image = p.clone();
        if p.h.contains(&spliced.v) {
            image.h.extend([spliced.u1, spliced.u2]);
        }
        let j = target.position(&image).ok_or_else(|| {
            Error::Inconsistent(format!(
                "image {} of {} is not an admissible pair of the spliced graph",
                image.describe(spliced.graph.vertices()),
                p.describe(g.vertices())
            ))
        })?;
        map.push(j);
    }
    let mut hit = vec![false; target.len()];
    for &j in &map {
        hit[j] = true;
    }
    if source.len() != target.len() || hit.iter().any(|h| !h) {
        return Err(Error::Inconsistent(format!(
            "splice map is not a bijection ({} pairs before, {} after)",
            source.len(),
            target.len()
        )));
    }
    for a in 0..source.len() {
        for b in 0..source.len() {
            if source.leq[a][b] != target.leq[map[a]][map[b]] {
                return Err(Error::Inconsistent(format!(
                    "splice map does not preserve the order between {} and {}",
                    source.describe(a),
                    source.describe(b)
                )));
            }
        }
    }
    Ok(LatticeMap { source, target, map })
}

/// Non-bottom join-irreducible admissible pairs, ordered by specialization:
/// `x ≥ y` iff `pair(x) ≤ pair(y)`.
#[derive(Debug, Clone)]
pub struct PrimSpace {
    pub vertices: Vec<String>,
    /// Lattice index of each point's pair.
    pub lattice_index: Vec<usize>,
    pub pairs: Vec<AdmissiblePair>,
    /// `geq[x][y]` iff `x ≥ y`.
    pub geq: Vec<Vec<bool>>,
}

impl PrimSpace {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pair_of(&self, x: usize) -> &AdmissiblePair {
        &self.pairs[x]
    }

    /// `H_x`.
    pub fn h_of(&self, x: usize) -> &VertexSet {
        &self.pairs[x].h
    }

    pub fn h_names(&self, x: usize) -> Vec<String> {
        self.h_of(x).iter().map(|&i| self.vertices[i].clone()).collect()
    }

    /// All pairs `(x, y)` with `x ≥ y` and `x ≠ y`.
    pub fn strict_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .flat_map(|x| (0..self.len()).map(move |y| (x, y)))
            .filter(|&(x, y)| x != y && self.geq[x][y])
            .collect()
    }

    /// Points reordered so that new point `k` is old point `order[k]`.
    pub fn reordered(&self, order: &[usize]) -> PrimSpace {
        PrimSpace {
            vertices: self.vertices.clone(),
            lattice_index: order.iter().map(|&x| self.lattice_index[x]).collect(),
            pairs: order.iter().map(|&x| self.pairs[x].clone()).collect(),
            geq: order
                .iter()
                .map(|&x| order.iter().map(|&y| self.geq[x][y]).collect())
                .collect(),
        }
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph Prim {\n  rankdir=BT;\n");
        for x in 0..self.len() {
            let label = format!("x{x}: H={{{}}}", self.h_names(x).join(","));
            let _ = writeln!(s, "  x{x} [label={}];", quote(&label));
        }
        let n = self.len();
        let gt = |a: usize, b: usize| a != b && self.geq[a][b];
        for x in 0..n {
            for y in 0..n {
                if gt(x, y) && !(0..n).any(|k| gt(x, k) && gt(k, y)) {
                    let _ = writeln!(s, "  x{y} -> x{x};");
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Serialize)]
struct NamedPoint<'a> {
    point: usize,
    #[serde(rename = "H")]
    h: Vec<&'a str>,
    #[serde(rename = "B")]
    b: Vec<&'a str>,
}

impl Serialize for PrimSpace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let names = |set: &VertexSet| -> Vec<&str> { set.iter().map(|&i| self.vertices[i].as_str()).collect() };
        let points: Vec<NamedPoint> = self
            .pairs
            .iter()
            .enumerate()
            .map(|(x, p)| NamedPoint {
                point: x,
                h: names(&p.h),
                b: names(&p.b),
            })
            .collect();
        let mut st = s.serialize_struct("PrimSpace", 2)?;
        st.serialize_field("points", &points)?;
        st.serialize_field("strictly_above", &self.strict_pairs())?;
        st.end()
    }
}

/// The poset of non-bottom join-irreducible elements. Refuses posets that are
/// not distributive lattices.
pub fn prim_space(lat: &IdealLattice) -> Result<PrimSpace> {
    let n = lat.len();
    let bottom = lat
        .bottom()
        .ok_or_else(|| Error::Structure("the ideal poset has no least element".into()))?;
    lat.top()
        .ok_or_else(|| Error::Structure("the ideal poset has no greatest element".into()))?;
    let mut join = vec![vec![0usize; n]; n];
    let mut meet = vec![vec![0usize; n]; n];
    for i in 0..n {
        for j in i..n {
            let jn = lat.join(i, j).ok_or_else(|| {
                Error::Structure(format!("{} and {} have no join", lat.describe(i), lat.describe(j)))
            })?;
            let mt = lat.meet(i, j).ok_or_else(|| {
                Error::Structure(format!("{} and {} have no meet", lat.describe(i), lat.describe(j)))
            })?;
            join[i][j] = jn;
            join[j][i] = jn;
            meet[i][j] = mt;
            meet[j][i] = mt;
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if meet[a][join[b][c]] != join[meet[a][b]][meet[a][c]] {
                    return Err(Error::Structure(format!(
                        "the ideal lattice is not distributive at {}, {}, {}",
                        lat.describe(a),
                        lat.describe(b),
                        lat.describe(c)
                    )));
                }
            }
        }
    }

    let points: Vec<usize> = (0..n)
        .filter(|&x| x != bottom)
        .filter(|&x| {
            let below = (0..n)
                .filter(|&y| y != x && lat.leq[y][x])
                .fold(bottom, |acc, y| join[acc][y]);
            below != x
        })
        .collect();
    Ok(PrimSpace {
        vertices: lat.vertices.clone(),
        pairs: points.iter().map(|&x| lat.pairs[x].clone()).collect(),
        geq: points
            .iter()
            .map(|&x| points.iter().map(|&y| lat.leq[x][y]).collect())
            .collect(),
        lattice_index: points,
    })
}

/// The splice-induced bijection of primitive ideal spaces.
#[derive(Debug, Clone, Serialize)]
pub struct PrimHomeo {
    pub source: PrimSpace,
    pub target: PrimSpace,
    /// `sigma[x]` is the point of `target` corresponding to point `x`.
    pub sigma: Vec<usize>,
}

impl PrimHomeo {
    /// The target space with its points listed in source order.
    pub fn aligned_target(&self) -> PrimSpace {
        self.target.reordered(&self.sigma)
    }
}

pub fn prim_homeo_under_splice(g: &Graph, v: &str, limits: &Limits) -> Result<PrimHomeo> {
    let lm = splice_lattice_map(g, v, limits)?;
    let source = prim_space(&lm.source)?;
    let target = prim_space(&lm.target)?;
    let sigma: Vec<usize> = source
        .lattice_index
        .iter()
        .map(|&i| {
            target
                .lattice_index
                .iter()
                .position(|&j| j == lm.map[i])
                .ok_or_else(|| {
                    Error::Inconsistent(format!(
                        "image of point {} is not join-irreducible",
                        lm.source.describe(i)
                    ))
                })
        })
        .collect::<Result<_>>()?;
    if sigma.len() != target.len() {
        return Err(Error::Inconsistent(format!(
            "{} points before the splice, {} after",
            source.len(),
            target.len()
        )));
    }
    for x in 0..source.len() {
        for y in 0..source.len() {
            if source.geq[x][y] != target.geq[sigma[x]][sigma[y]] {
                return Err(Error::Inconsistent("point bijection does not preserve the order".into()));
            }
        }
    }
    Ok(PrimHomeo { source, target, sigma })
}
