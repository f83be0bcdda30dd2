use std::collections::BTreeMap;

use crate::error::Result;
use crate::graph::{ExtNat, Graph};
use crate::Limits;

/// A multiplicity-preserving bijection `g1 → g2` (as `bij[i] = j`), if one
/// exists.
///
/// Candidates are first separated by colour refinement run jointly on both
/// graphs; the remaining choices are resolved by backtracking in a fixed
/// vertex order, so the result is deterministic.
pub fn graphs_isomorphic(g1: &Graph, g2: &Graph, limits: &Limits) -> Result<Option<Vec<usize>>> {
    limits.check_isomorphism(g1.len())?;
    limits.check_isomorphism(g2.len())?;
    let n = g1.len();
    if g2.len() != n || entry_multiset(g1) != entry_multiset(g2) {
        return Ok(None);
    }
    let (c1, c2) = refine(g1, g2);
    let mut counts1 = BTreeMap::new();
    let mut counts2 = BTreeMap::new();
    for c in &c1 {
        *counts1.entry(*c).or_insert(0usize) += 1;
    }
    for c in &c2 {
        *counts2.entry(*c).or_insert(0usize) += 1;
    }
    if counts1 != counts2 {
        return Ok(None);
    }

    let order = search_order(g1, &c1, &counts1);
    let mut search = Search {
        g1,
        g2,
        c1: &c1,
        c2: &c2,
        order: &order,
        map: vec![usize::MAX; n],
        used: vec![false; n],
    };
    if search.extend(0) {
        debug_assert!(is_isomorphism(g1, g2, &search.map));
        Ok(Some(search.map))
    } else {
        Ok(None)
    }
}

pub(crate) fn is_isomorphism(g1: &Graph, g2: &Graph, bij: &[usize]) -> bool {
    let n = g1.len();
    g2.len() == n
        && bij.len() == n
        && (0..n).all(|i| (0..n).all(|j| g1.mult_at(i, j) == g2.mult_at(bij[i], bij[j])))
}

fn entry_multiset(g: &Graph) -> Vec<ExtNat> {
    let n = g.len();
    let mut v: Vec<ExtNat> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| g.mult_at(i, j))
        .filter(|m| !m.is_zero())
        .collect();
    v.sort();
    v
}

type Signature = (usize, Vec<(ExtNat, usize)>, Vec<(ExtNat, usize)>);

/// Joint colour refinement; colours are comparable across the two graphs.
fn refine(g1: &Graph, g2: &Graph) -> (Vec<usize>, Vec<usize>) {
    let initial = |g: &Graph| -> Vec<ExtNat> { (0..g.len()).map(|i| g.mult_at(i, i)).collect() };
    let (l1, l2) = (initial(g1), initial(g2));
    let mut palette: BTreeMap<ExtNat, usize> = BTreeMap::new();
    for m in l1.iter().chain(&l2) {
        let next = palette.len();
        palette.entry(*m).or_insert(next);
    }
    let mut c1: Vec<usize> = l1.iter().map(|m| palette[m]).collect();
    let mut c2: Vec<usize> = l2.iter().map(|m| palette[m]).collect();
    let mut classes = palette.len();

    loop {
        let sig = |g: &Graph, c: &[usize], i: usize| -> Signature {
            let mut out: Vec<(ExtNat, usize)> = g
                .successors(i)
                .filter(|&j| j != i)
                .map(|j| (g.mult_at(i, j), c[j]))
                .collect();
            let mut inc: Vec<(ExtNat, usize)> = (0..g.len())
                .filter(|&j| j != i && !g.mult_at(j, i).is_zero())
                .map(|j| (g.mult_at(j, i), c[j]))
                .collect();
            out.sort();
            inc.sort();
            (c[i], out, inc)
        };
        let s1: Vec<Signature> = (0..g1.len()).map(|i| sig(g1, &c1, i)).collect();
        let s2: Vec<Signature> = (0..g2.len()).map(|i| sig(g2, &c2, i)).collect();
        let mut ids: BTreeMap<&Signature, usize> = BTreeMap::new();
        for s in s1.iter().chain(&s2) {
            let next = ids.len();
            ids.entry(s).or_insert(next);
        }
        let n1: Vec<usize> = s1.iter().map(|s| ids[s]).collect();
        let n2: Vec<usize> = s2.iter().map(|s| ids[s]).collect();
        let done = ids.len() == classes;
        classes = ids.len();
        c1 = n1;
        c2 = n2;
        if done {
            return (c1, c2);
        }
    }
}

/// Vertices of `g1` ordered so that each one is, where possible, adjacent
/// to vertices placed before it; ties go to smaller colour classes.
fn search_order(g: &Graph, colours: &[usize], counts: &BTreeMap<usize, usize>) -> Vec<usize> {
    let n = g.len();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let next = (0..n)
            .filter(|&i| !placed[i])
            .min_by_key(|&i| {
                let links = order
                    .iter()
                    .filter(|&&p| !g.mult_at(i, p).is_zero() || !g.mult_at(p, i).is_zero())
                    .count();
                (std::cmp::Reverse(links), counts[&colours[i]], i)
            })
            .expect("an unplaced vertex remains");
        placed[next] = true;
        order.push(next);
    }
    order
}

struct Search<'a> {
    g1: &'a Graph,
    g2: &'a Graph,
    c1: &'a [usize],
    c2: &'a [usize],
    order: &'a [usize],
    map: Vec<usize>,
    used: Vec<bool>,
}

impl Search<'_> {
    fn extend(&mut self, depth: usize) -> bool {
        let Some(&a) = self.order.get(depth) else {
            return true;
        };
        for b in 0..self.g2.len() {
            if self.used[b] || self.c1[a] != self.c2[b] || !self.consistent(a, b, depth) {
                continue;
            }
            self.map[a] = b;
            self.used[b] = true;
            if self.extend(depth + 1) {
                return true;
            }
            self.used[b] = false;
            self.map[a] = usize::MAX;
        }
        false
    }

    fn consistent(&self, a: usize, b: usize, depth: usize) -> bool {
        if self.g1.mult_at(a, a) != self.g2.mult_at(b, b) {
            return false;
        }
        self.order[..depth].iter().all(|&p| {
            let q = self.map[p];
            self.g1.mult_at(a, p) == self.g2.mult_at(b, q) && self.g1.mult_at(p, a) == self.g2.mult_at(q, b)
        })
    }
}
