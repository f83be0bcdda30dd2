use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{smith, IntMatrix, SmithDecomposition};
use crate::error::{Error, Result};

/// A finitely generated abelian group `ℤ^r ⊕ ℤ/d₁ ⊕ … ⊕ ℤ/d_k` in invariant
/// factor form: every `dᵢ ≥ 2` and `dᵢ | dᵢ₊₁`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FgAbelianGroup {
    pub free_rank: usize,
    #[serde(with = "bigint_list")]
    pub torsion: Vec<BigInt>,
}

impl FgAbelianGroup {
    pub fn trivial() -> Self {
        FgAbelianGroup {
            free_rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn free(rank: usize) -> Self {
        FgAbelianGroup {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    /// Builds the canonical form from a divisibility chain of diagonal
    /// entries, discarding units.
    pub fn from_chain(diagonal: impl IntoIterator<Item = BigInt>, free_rank: usize) -> Self {
        FgAbelianGroup {
            free_rank,
            torsion: diagonal
                .into_iter()
                .map(|d| d.abs())
                .filter(|d| !d.is_one())
                .collect(),
        }
    }

    pub fn cyclic(order: u64) -> Self {
        Self::from_chain([BigInt::from(order)], 0)
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Group order, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0).then(|| self.torsion.iter().product())
    }
}

impl fmt::Display for FgAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return f.write_str("0");
        }
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("ℤ/{d}")).collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("ℤ".into()),
            r => parts.push(format!("ℤ^{r}")),
        }
        f.write_str(&parts.join(" ⊕ "))
    }
}

mod bigint_list {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Columns form a ℤ-basis of `{x : m·x = 0}`.
pub fn kernel_basis(m: &IntMatrix) -> IntMatrix {
    let d = smith(m);
    let r = d.rank();
    let cols: Vec<usize> = (r..m.cols()).collect();
    let all_rows: Vec<usize> = (0..m.cols()).collect();
    d.v.select(&all_rows, &cols)
}

/// `ℤ^rows / colspan(m)`.
pub fn cokernel_group(m: &IntMatrix) -> FgAbelianGroup {
    let d = smith(m);
    let r = d.rank();
    FgAbelianGroup::from_chain(d.diagonal().into_iter().take(r), m.rows() - r)
}

/// An integer solution of `m·x = b`, if one exists.
pub fn solve(m: &IntMatrix, b: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    if b.len() != m.rows() {
        return Err(Error::Dimension {
            op: "solve",
            detail: format!("{}x{} system with right-hand side of length {}", m.rows(), m.cols(), b.len()),
        });
    }
    Ok(solve_with(&smith(m), b))
}

fn solve_with(d: &SmithDecomposition, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let c = d.u.mul_vec(b);
    let diag = d.diagonal();
    let r = d.rank();
    let mut y = vec![BigInt::zero(); d.v.rows()];
    for (i, ci) in c.iter().enumerate() {
        if i < r {
            let (q, rem) = ci.div_rem(&diag[i]);
            if !rem.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !ci.is_zero() {
            return None;
        }
    }
    Some(d.v.mul_vec(&y))
}

/// Solves `m·X = rhs` column by column.
pub fn solve_columns(m: &IntMatrix, rhs: &IntMatrix) -> Result<Option<IntMatrix>> {
    if rhs.rows() != m.rows() {
        return Err(Error::Dimension {
            op: "solve",
            detail: format!("{}x{} system with {}-row right-hand side", m.rows(), m.cols(), rhs.rows()),
        });
    }
    let d = smith(m);
    let mut cols = Vec::with_capacity(rhs.cols());
    for b in rhs.columns() {
        match solve_with(&d, &b) {
            Some(x) => cols.push(x),
            None => return Ok(None),
        }
    }
    Ok(Some(IntMatrix::from_columns(m.cols(), &cols)))
}

/// The presentation `ℤ^n / colspan(m)` with coordinates for its elements.
#[derive(Debug, Clone)]
pub struct CokernelPresentation {
    relations: IntMatrix,
    snf: SmithDecomposition,
}

impl CokernelPresentation {
    pub fn new(relations: IntMatrix) -> Self {
        let snf = smith(&relations);
        CokernelPresentation { relations, snf }
    }

    pub fn ambient_rank(&self) -> usize {
        self.relations.rows()
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    pub fn group(&self) -> FgAbelianGroup {
        let r = self.snf.rank();
        FgAbelianGroup::from_chain(self.snf.diagonal().into_iter().take(r), self.ambient_rank() - r)
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        solve_with(&self.snf, x).is_some()
    }

    /// Order of the class of `x`; `None` when it has infinite order.
    pub fn class_order(&self, x: &[BigInt]) -> Option<BigInt> {
        let c = self.snf.u.mul_vec(x);
        let diag = self.snf.diagonal();
        let r = self.snf.rank();
        let mut order = BigInt::one();
        for (i, ci) in c.iter().enumerate() {
            if i < r {
                let di = &diag[i];
                order = order.lcm(&(di / ci.gcd(di)));
            } else if !ci.is_zero() {
                return None;
            }
        }
        Some(order)
    }
}

fn require_rows(op: &'static str, what: &str, m: &IntMatrix, rows: usize) -> Result<()> {
    if m.rows() != rows {
        return Err(Error::Dimension {
            op,
            detail: format!("{what} has {} rows, expected {rows}", m.rows()),
        });
    }
    Ok(())
}

fn coker_preconditions(q: &IntMatrix, m: &IntMatrix, n: &IntMatrix) -> Result<()> {
    require_rows("induced cokernel map", "source relations", m, q.cols())?;
    require_rows("induced cokernel map", "target relations", n, q.rows())?;
    let image = q * m;
    if solve_columns(n, &image)?.is_none() {
        return Err(Error::NotWellDefined(
            "Q maps a source relation outside the target relations".into(),
        ));
    }
    Ok(())
}

/// Surjectivity of `ℤ^a / im m → ℤ^b / im n` induced by `q`.
pub fn induced_coker_surjective(q: &IntMatrix, m: &IntMatrix, n: &IntMatrix) -> Result<bool> {
    coker_preconditions(q, m, n)?;
    Ok(cokernel_group(&q.hcat(n)).is_trivial())
}

/// Injectivity of `ℤ^a / im m → ℤ^b / im n` induced by `q`: the preimage
/// `{x : q·x ∈ im n}` must lie in `im m`.
pub fn induced_coker_injective(q: &IntMatrix, m: &IntMatrix, n: &IntMatrix) -> Result<bool> {
    coker_preconditions(q, m, n)?;
    let k = kernel_basis(&q.hcat(&-n));
    let x_block = k.row_range(0..q.cols());
    Ok(solve_columns(m, &x_block)?.is_some())
}

pub fn induced_coker_iso(q: &IntMatrix, m: &IntMatrix, n: &IntMatrix) -> Result<bool> {
    Ok(induced_coker_surjective(q, m, n)? && induced_coker_injective(q, m, n)?)
}

/// The matrix `R` of `ker m → ker n` induced by `q`, in the kernel bases
/// returned by [`kernel_basis`]: `q · K_m = K_n · R`.
pub fn induced_kernel_map(q: &IntMatrix, m: &IntMatrix, n: &IntMatrix) -> Result<IntMatrix> {
    if m.cols() != q.cols() || n.cols() != q.rows() {
        return Err(Error::Dimension {
            op: "induced kernel map",
            detail: format!(
                "Q is {}x{}, domain matrix has {} columns, target matrix has {} columns",
                q.rows(),
                q.cols(),
                m.cols(),
                n.cols()
            ),
        });
    }
    let km = kernel_basis(m);
    let image = q * &km;
    if !(n * &image).is_zero() {
        return Err(Error::NotWellDefined(
            "Q maps a kernel vector of the source outside the target kernel".into(),
        ));
    }
    let kn = kernel_basis(n);
    solve_columns(&kn, &image)?.ok_or_else(|| {
        Error::Inconsistent("image of a kernel vector is not an integer combination of the target kernel basis".into())
    })
}

/// Whether `q` restricts to an isomorphism `ker m → ker n`.
pub fn induced_ker_iso(q: &IntMatrix, m: &IntMatrix, n: &IntMatrix) -> Result<bool> {
    Ok(induced_kernel_map(q, m, n)?.is_unimodular())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_basis(&IntMatrix::from_rows(&[[1]])).shape(), (1, 0));
        assert_eq!(kernel_basis(&IntMatrix::from_rows(&[[0]])), IntMatrix::from_rows(&[[1]]));
        let k = kernel_basis(&IntMatrix::from_rows(&[[1, 1], [1, 1]]));
        assert_eq!(k.shape(), (2, 1));
        let col = k.column(0);
        assert!(col == ints(&[1, -1]) || col == ints(&[-1, 1]));
        // empty domain and empty codomain
        assert_eq!(kernel_basis(&IntMatrix::zeros(2, 0)).shape(), (0, 0));
        assert_eq!(kernel_basis(&IntMatrix::zeros(0, 2)), IntMatrix::identity(2));
    }

    #[test]
    fn cokernel_examples() {
        assert!(cokernel_group(&IntMatrix::from_rows(&[[1]])).is_trivial());
        assert_eq!(cokernel_group(&IntMatrix::from_rows(&[[2]])), FgAbelianGroup::cyclic(2));
        assert_eq!(
            cokernel_group(&IntMatrix::from_rows(&[[2, 0], [1, 2]])),
            FgAbelianGroup::cyclic(4)
        );
        assert_eq!(cokernel_group(&IntMatrix::zeros(1, 0)), FgAbelianGroup::free(1));
        assert_eq!(cokernel_group(&IntMatrix::zeros(1, 0)).to_string(), "ℤ");
        assert_eq!(
            FgAbelianGroup::from_chain(ints(&[1, 2, 4]), 2).to_string(),
            "ℤ/2 ⊕ ℤ/4 ⊕ ℤ^2"
        );
    }

    #[test]
    fn solve_examples() {
        let m = IntMatrix::from_rows(&[[2]]);
        assert_eq!(solve(&m, &ints(&[4])).unwrap(), Some(ints(&[2])));
        assert_eq!(solve(&m, &ints(&[3])).unwrap(), None);
        assert_eq!(solve(&IntMatrix::zeros(0, 0), &[]).unwrap(), Some(vec![]));
        assert!(matches!(solve(&m, &ints(&[1, 2])), Err(Error::Dimension { .. })));
    }

    #[test]
    fn class_orders() {
        let p = CokernelPresentation::new(IntMatrix::from_rows(&[[2, 0], [1, 2]]));
        assert_eq!(p.class_order(&ints(&[0, 1])), Some(BigInt::from(2)));
        assert_eq!(p.class_order(&ints(&[1, 0])), Some(BigInt::from(4)));
        assert_eq!(p.class_order(&ints(&[2, 1])), Some(BigInt::from(1)));
        let free = CokernelPresentation::new(IntMatrix::zeros(1, 0));
        assert_eq!(free.class_order(&ints(&[3])), None);
    }

    #[test]
    fn coker_iso_examples() {
        let m = IntMatrix::from_rows(&[[3, 1], [0, 2]]);
        assert!(induced_coker_iso(&IntMatrix::identity(2), &m, &m).unwrap());

        let z = IntMatrix::from_rows(&[[0]]);
        let two = IntMatrix::from_rows(&[[2]]);
        assert!(!induced_coker_surjective(&two, &z, &z).unwrap());
        assert!(induced_coker_injective(&two, &z, &z).unwrap());

        // spliced O₂ in the order (u₂, u₁, v) against O₂
        let spliced = IntMatrix::from_rows(&[[0, 1, 0], [1, 0, 1], [0, 1, 1]]);
        let q = IntMatrix::from_rows(&[[-1, 0, 1]]);
        assert!(induced_coker_iso(&q, &spliced, &IntMatrix::from_rows(&[[1]])).unwrap());

        // ×1 from ℤ/4 to ℤ/2 is well defined but not injective
        let four = IntMatrix::from_rows(&[[4]]);
        assert!(!induced_coker_iso(&IntMatrix::from_rows(&[[1]]), &four, &two).unwrap());
        // ×1 from ℤ/2 to ℤ/4 is not well defined
        assert!(matches!(
            induced_coker_iso(&IntMatrix::from_rows(&[[1]]), &two, &four),
            Err(Error::NotWellDefined(_))
        ));
    }

    #[test]
    fn ker_iso_examples() {
        let m = IntMatrix::from_rows(&[[1, -1], [2, -2]]);
        assert!(induced_ker_iso(&IntMatrix::identity(2), &m, &m).unwrap());

        let z = IntMatrix::from_rows(&[[0]]);
        assert!(!induced_ker_iso(&IntMatrix::from_rows(&[[2]]), &z, &z).unwrap());

        let z2 = IntMatrix::zeros(2, 2);
        assert!(induced_ker_iso(&IntMatrix::from_rows(&[[0, 1], [1, 0]]), &z2, &z2).unwrap());

        let n = IntMatrix::from_rows(&[[1, 0]]);
        assert!(matches!(
            induced_ker_iso(&IntMatrix::identity(2), &z2, &n),
            Err(Error::NotWellDefined(_))
        ));
    }
}
