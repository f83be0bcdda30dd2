//! K-theory of graphs and the filtered invariant over the primitive ideal
//! space.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexClass};
use crate::ideals::PrimSpace;
use crate::linalg::{kernel_basis, solve_columns, CokernelPresentation, FgAbelianGroup, IntMatrix};

/// `(K₀, K₁)` of the complex `ℤ^cols → ℤ^rows` given by a matrix, with the
/// data needed to map between such groups.
#[derive(Debug, Clone, Serialize)]
pub struct GradedGroup {
    pub k0: FgAbelianGroup,
    pub k1: FgAbelianGroup,
    /// Relations of the `K₀` presentation; its row count is the ambient rank.
    pub presentation: IntMatrix,
    /// Columns form a basis of the kernel computing `K₁`.
    pub kernel: IntMatrix,
}

impl GradedGroup {
    pub fn of_matrix(m: &IntMatrix) -> Self {
        let kernel = kernel_basis(m);
        GradedGroup {
            k0: CokernelPresentation::new(m.clone()).group(),
            k1: FgAbelianGroup::free(kernel.cols()),
            presentation: m.clone(),
            kernel,
        }
    }

    pub fn cokernel(&self) -> CokernelPresentation {
        CokernelPresentation::new(self.presentation.clone())
    }
}

/// Same invariant factors and free ranks in both degrees.
pub fn graded_groups_isomorphic(a: &GradedGroup, b: &GradedGroup) -> bool {
    a.k0 == b.k0 && a.k1 == b.k1
}

/// `(Aᴱ − 1)ᵗ` with rows for all vertices and columns for the regular ones.
pub fn k_matrix(g: &Graph) -> IntMatrix {
    let regular: Vec<usize> = (0..g.len())
        .filter(|&j| g.class_at(j) == VertexClass::Regular)
        .collect();
    transposed_minus_identity(g, &(0..g.len()).collect::<Vec<_>>(), &regular)
}

/// Entry `(a, b)` is `mult(cols[b], rows[a]) − [cols[b] = rows[a]]`. Every
/// vertex in `cols` must emit finitely many edges.
pub(crate) fn transposed_minus_identity(g: &Graph, rows: &[usize], cols: &[usize]) -> IntMatrix {
    let mut m = IntMatrix::zeros(rows.len(), cols.len());
    for (b, &j) in cols.iter().enumerate() {
        for (a, &i) in rows.iter().enumerate() {
            let k = g.mult_at(j, i).finite().expect("column vertex emits finitely many edges");
            let x = i64::try_from(k).expect("multiplicity fits in i64") - i64::from(i == j);
            m.set(a, b, x.into());
        }
    }
    m
}

/// K-theory from the kernel and cokernel of [`k_matrix`]. For graphs with
/// singular vertices this is the unfiltered formula only.
pub fn k_theory(g: &Graph) -> GradedGroup {
    GradedGroup::of_matrix(&k_matrix(g))
}

/// Maps of a transition `x → y` (with `x ≥ y`).
#[derive(Debug, Clone, Serialize)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    /// Coordinate inclusion `ℤ^{H_x} → ℤ^{H_y}`.
    pub k0: IntMatrix,
    /// Included kernel basis of `x` in the kernel basis of `y`.
    pub k1: IntMatrix,
}

/// The filtered invariant: a graded group at every point of `X` and
/// transition maps along the specialization order.
#[derive(Debug, Clone, Serialize)]
pub struct XkModule {
    pub space: PrimSpace,
    /// Vertex order used for `ℤ^{H_x}` at each point.
    pub enumeration: Vec<Vec<String>>,
    pub at: Vec<GradedGroup>,
    pub transitions: Vec<Transition>,
}

impl XkModule {
    pub fn transition(&self, x: usize, y: usize) -> Option<&Transition> {
        self.transitions.iter().find(|t| t.from == x && t.to == y)
    }

    /// Plain-text table, one line per point and per transition.
    pub fn table(&self) -> String {
        let mut s = String::new();
        for x in 0..self.space.len() {
            let _ = writeln!(
                s,
                "x{x}  H = {{{}}}  K0 = {}  K1 = {}",
                self.space.h_names(x).join(", "),
                self.at[x].k0,
                self.at[x].k1
            );
        }
        for t in &self.transitions {
            let _ = writeln!(
                s,
                "x{} -> x{}  K0: {} -> {}  K1: {} -> {}",
                t.from, t.to, self.at[t.from].k0, self.at[t.to].k0, self.at[t.from].k1, self.at[t.to].k1
            );
        }
        s
    }

    /// `trans(x,z) = trans(y,z) ∘ trans(x,y)` for all `x ≥ y ≥ z` in both
    /// degrees.
    #[allow(clippy::needless_range_loop)]
    pub fn is_functorial(&self) -> bool {
        let n = self.space.len();
        let geq = &self.space.geq;
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if x == y || y == z || !geq[x][y] || !geq[y][z] {
                        continue;
                    }
                    let (Some(a), Some(b)) = (self.transition(x, y), self.transition(y, z)) else {
                        return false;
                    };
                    if x == z {
                        return false;
                    }
                    let Some(c) = self.transition(x, z) else {
                        return false;
                    };
                    if &b.k0 * &a.k0 != c.k0 || &b.k1 * &a.k1 != c.k1 {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Points of `X` enumerated with `lead` first (when contained) and the rest
/// of `H_x` in vertex order.
pub(crate) fn point_enumeration(space: &PrimSpace, x: usize, lead: &[usize]) -> Result<Vec<usize>> {
    let h = space.h_of(x);
    let present = lead.iter().filter(|l| h.contains(l)).count();
    if present != 0 && present != lead.len() {
        return Err(Error::Structure(format!(
            "point x{x} contains only part of the leading vertices"
        )));
    }
    let mut out: Vec<usize> = if present == 0 { Vec::new() } else { lead.to_vec() };
    out.extend(h.iter().filter(|i| !lead.contains(i)));
    Ok(out)
}

/// 0/1 matrix sending coordinate `a` of `from` to the position of the same
/// vertex in `to`.
pub(crate) fn inclusion(from: &[usize], to: &[usize]) -> Result<IntMatrix> {
    let mut m = IntMatrix::zeros(to.len(), from.len());
    for (b, v) in from.iter().enumerate() {
        let a = to.iter().position(|w| w == v).ok_or_else(|| {
            Error::Inconsistent("H_x is not contained in H_y although x ≥ y".into())
        })?;
        m.set(a, b, 1.into());
    }
    Ok(m)
}

pub(crate) fn first_singular(g: &Graph) -> Option<usize> {
    (0..g.len()).find(|&i| g.class_at(i) != VertexClass::Regular)
}

/// Builds the filtered invariant of an all-regular graph. `v_first`, when
/// given, comes first in every `H_x` containing it.
pub fn filtered_xk(g: &Graph, space: &PrimSpace, v_first: Option<usize>) -> Result<XkModule> {
    if let Some(s) = first_singular(g) {
        return Err(Error::SingularVertex(g.name(s).to_string()));
    }
    let lead: Vec<usize> = v_first.into_iter().collect();
    let enums: Vec<Vec<usize>> = (0..space.len())
        .map(|x| point_enumeration(space, x, &lead))
        .collect::<Result<_>>()?;
    let phis: Vec<IntMatrix> = enums.iter().map(|e| transposed_minus_identity(g, e, e)).collect();
    let at: Vec<GradedGroup> = phis.iter().map(GradedGroup::of_matrix).collect();

    let mut transitions = Vec::new();
    for (x, y) in space.strict_pairs() {
        let k0 = inclusion(&enums[x], &enums[y])?;
        if &k0 * &phis[x] != &phis[y] * &k0 {
            return Err(Error::Inconsistent(format!(
                "inclusion x{x} -> x{y} does not commute with the differentials"
            )));
        }
        let included = &k0 * &at[x].kernel;
        let k1 = solve_columns(&at[y].kernel, &included)?.ok_or_else(|| {
            Error::Inconsistent(format!("kernel of x{x} does not land in the kernel of x{y}"))
        })?;
        transitions.push(Transition { from: x, to: y, k0, k1 });
    }

    let module = XkModule {
        space: space.clone(),
        enumeration: enums.iter().map(|e| g.names_of(e)).collect(),
        at,
        transitions,
    };
    if !module.is_functorial() {
        return Err(Error::Inconsistent("transition maps are not functorial".into()));
    }
    Ok(module)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ExtNat::Finite;
    use crate::ideals::{ideal_lattice, prim_space};
    use crate::Limits;
    use num_bigint::BigInt;

    fn w_chain() -> Graph {
        Graph::from_edges(
            &["w1", "w2"],
            &[("w1", "w1", Finite(3)), ("w1", "w2", Finite(1)), ("w2", "w2", Finite(3))],
        )
        .unwrap()
    }

    fn loops(k: u64) -> Graph {
        Graph::from_edges(&["v"], &[("v", "v", Finite(k))]).unwrap()
    }

    #[test]
    fn k_matrices() {
        assert_eq!(k_matrix(&loops(2)), IntMatrix::from_rows(&[[1]]));
        let sink = Graph::new(["s"]).unwrap();
        assert_eq!(k_matrix(&sink).shape(), (1, 0));
        assert_eq!(k_matrix(&w_chain()), IntMatrix::from_rows(&[[2, 0], [1, 2]]));
    }

    #[test]
    fn k_groups() {
        let k = k_theory(&loops(2));
        assert!(k.k0.is_trivial() && k.k1.is_trivial());
        let k = k_theory(&loops(3));
        assert_eq!(k.k0, FgAbelianGroup::cyclic(2));
        assert!(k.k1.is_trivial());
        let k = k_theory(&Graph::new(["s"]).unwrap());
        assert_eq!(k.k0, FgAbelianGroup::free(1));
        assert!(k.k1.is_trivial());
    }

    #[test]
    fn filtered_w_chain() {
        let g = w_chain();
        let x = prim_space(&ideal_lattice(&g, &Limits::default()).unwrap()).unwrap();
        let m = filtered_xk(&g, &x, None).unwrap();
        assert_eq!(m.at[0].k0, FgAbelianGroup::cyclic(2));
        assert_eq!(m.at[1].k0, FgAbelianGroup::cyclic(4));
        let t = m.transition(0, 1).unwrap();
        let image = t.k0.column(0);
        let target = m.at[1].cokernel();
        assert_eq!(target.class_order(&image), Some(BigInt::from(2)));
        assert_eq!(m.at[0].cokernel().class_order(&[BigInt::from(1)]), Some(BigInt::from(2)));
    }

    #[test]
    fn filtered_o3_and_top_point() {
        let g = loops(3);
        let x = prim_space(&ideal_lattice(&g, &Limits::default()).unwrap()).unwrap();
        let m = filtered_xk(&g, &x, Some(0)).unwrap();
        assert_eq!(m.at.len(), 1);
        assert!(graded_groups_isomorphic(&m.at[0], &k_theory(&g)));
    }

    #[test]
    fn filtered_rejects_sinks() {
        let g = Graph::from_edges(&["a", "s"], &[("a", "a", Finite(2)), ("a", "s", Finite(1))]).unwrap();
        let x = prim_space(&ideal_lattice(&g, &Limits::default()).unwrap()).unwrap();
        assert!(matches!(filtered_xk(&g, &x, None), Err(Error::SingularVertex(s)) if s == "s"));
    }

    #[test]
    fn graded_comparison() {
        let mk = |k0: FgAbelianGroup, k1: FgAbelianGroup| GradedGroup {
            k0,
            k1,
            presentation: IntMatrix::zeros(0, 0),
            kernel: IntMatrix::zeros(0, 0),
        };
        let z2 = FgAbelianGroup::cyclic(2);
        let z4 = FgAbelianGroup::cyclic(4);
        let z2z2 = FgAbelianGroup::from_chain([BigInt::from(2), BigInt::from(2)], 0);
        let zero = FgAbelianGroup::trivial();
        let z = FgAbelianGroup::free(1);
        assert!(graded_groups_isomorphic(&mk(z2.clone(), zero.clone()), &mk(z2, zero.clone())));
        assert!(!graded_groups_isomorphic(&mk(z4, zero.clone()), &mk(z2z2, zero.clone())));
        assert!(!graded_groups_isomorphic(&mk(zero.clone(), z.clone()), &mk(z, zero)));
    }
}
