use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::IntMatrix;

/// `s = u · m · v` with `u`, `v` unimodular and `s` diagonal, its diagonal
/// entries non-negative and forming a divisibility chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.s.rows().min(self.s.cols());
        (0..n).map(|i| self.s.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|d| !d.is_zero()).count()
    }
}

/// Smith normal form with transforms.
///
/// Pivots are chosen as the entry of smallest non-zero absolute value in the
/// remaining block, ties broken by lowest row then lowest column, so the
/// output is a deterministic function of the input.
pub fn smith(m: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = m.shape();
    let mut s = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    'diag: for t in 0..rows.min(cols) {
        loop {
            let Some((pi, pj)) = pivot(&s, t) else {
                break 'diag;
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let p = s.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..rows {
                if s.get(i, t).is_zero() {
                    continue;
                }
                let q = -s.get(i, t).div_floor(&p);
                s.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                clean &= s.get(i, t).is_zero();
            }
            for j in t + 1..cols {
                if s.get(t, j).is_zero() {
                    continue;
                }
                let q = -s.get(t, j).div_floor(&p);
                s.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                clean &= s.get(t, j).is_zero();
            }
            if !clean {
                // a non-zero remainder is now smaller than the pivot
                continue;
            }

            let offender = (t + 1..rows).find(|&i| {
                (t + 1..cols).any(|j| !s.get(i, j).is_multiple_of(&p))
            });
            match offender {
                Some(i) => {
                    let one = BigInt::from(1);
                    s.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }

    SmithDecomposition { u, s, v }
}

fn pivot(s: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..s.rows() {
        for j in t..s.cols() {
            let x = s.get(i, j);
            if x.is_zero() {
                continue;
            }
            let better = match best {
                None => true,
                Some((bi, bj)) => x.abs() < s.get(bi, bj).abs(),
            };
            if better {
                best = Some((i, j));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check(m: &IntMatrix) -> SmithDecomposition {
        let d = smith(m);
        assert_eq!(&(&d.u * m) * &d.v, d.s, "u·m·v = s for {m:?}");
        assert!(d.u.is_unimodular() && d.v.is_unimodular());
        for i in 0..d.s.rows() {
            for j in 0..d.s.cols() {
                if i != j {
                    assert!(d.s.get(i, j).is_zero());
                }
            }
        }
        let diag = d.diagonal();
        assert!(diag.iter().all(|x| !x.is_negative()));
        for w in diag.windows(2) {
            assert!(w[0].is_zero() && w[1].is_zero() || (!w[0].is_zero() && w[1].is_multiple_of(&w[0])));
        }
        d
    }

    #[test]
    fn worked_examples() {
        let id = IntMatrix::identity(3);
        assert_eq!(check(&id).s, id);

        let d = check(&IntMatrix::from_rows(&[[2, 0], [1, 2]]));
        assert_eq!(d.s, IntMatrix::from_rows(&[[1, 0], [0, 4]]));

        let z = IntMatrix::zeros(2, 3);
        assert_eq!(check(&z).s, z);

        let d = check(&IntMatrix::from_rows(&[[0, 1, 0], [1, 0, 1], [0, 1, 2]]));
        assert_eq!(d.diagonal(), vec![1.into(), 1.into(), 2.into()]);

        assert_eq!(check(&IntMatrix::zeros(0, 4)).s.shape(), (0, 4));
        assert_eq!(check(&IntMatrix::zeros(3, 0)).u, IntMatrix::identity(3));
    }

    #[test]
    fn deterministic() {
        let m = IntMatrix::from_rows(&[[4, 6, -2], [3, 9, 12], [0, 5, 5]]);
        assert_eq!(smith(&m), smith(&m));
    }

    fn small_matrix() -> impl Strategy<Value = IntMatrix> {
        (1usize..=6, 1usize..=6).prop_flat_map(|(r, c)| {
            prop::collection::vec(-9i64..=9, r * c).prop_map(move |v| {
                let rows: Vec<Vec<i64>> = v.chunks(c).map(<[i64]>::to_vec).collect();
                IntMatrix::from_rows(&rows)
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn smith_invariants(m in small_matrix()) {
            check(&m);
        }
    }
}
