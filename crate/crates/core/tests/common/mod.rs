//! Brute-force reference implementations shared by the integration tests.
//! None of these call into the library's algorithms; they only read the
//! multiplicity table.

#![allow(dead_code, clippy::too_many_arguments, clippy::needless_range_loop)]

use gsplice::{ExtNat, Graph, IntMatrix};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn mult(g: &Graph, i: usize, j: usize) -> u64 {
    match g.mult_at(i, j) {
        ExtNat::Finite(k) => k,
        ExtNat::Omega => u64::MAX,
    }
}

/// Transitive closure of the edge relation (paths with at least one edge).
pub fn closure(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.len();
    let mut r: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| mult(g, i, j) > 0).collect()).collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if r[i][k] && r[k][j] {
                    r[i][j] = true;
                }
            }
        }
    }
    r
}

/// Number of return paths at `v` (distinct edge sequences from `v` back to
/// `v`, not passing through `v` in between), counted up to `cap`.
///
/// If the component of `v` is not a bare cycle, an edge outside the
/// shortest return path can be reached and left along shortest paths, giving
/// a second return path of length at most `2n − 1`; longer paths are never
/// needed.
pub fn count_return_paths(g: &Graph, v: usize, cap: usize) -> usize {
    let n = g.len();
    let r = closure(g);
    let back: Vec<bool> = (0..n).map(|w| w == v || r[w][v]).collect();
    let max_len = 2 * n;
    let mut found = 0usize;
    fn dfs(
        g: &Graph,
        v: usize,
        at: usize,
        len: usize,
        max_len: usize,
        back: &[bool],
        found: &mut usize,
        cap: usize,
    ) {
        if *found >= cap || len >= max_len {
            return;
        }
        // try the edge home first
        let m = mult(g, at, v);
        if m > 0 {
            *found = (*found).saturating_add(m.min(cap as u64) as usize).min(cap);
            if *found >= cap {
                return;
            }
        }
        for w in 0..g.len() {
            if w == v || !back[w] {
                continue;
            }
            let k = mult(g, at, w);
            for _ in 0..k.min(cap as u64) {
                dfs(g, v, w, len + 1, max_len, back, found, cap);
                if *found >= cap {
                    return;
                }
            }
        }
    }
    dfs(g, v, v, 0, max_len, &back, &mut found, cap);
    found
}

/// Paths from `u` to `x` in `g` (finite multiplicities), grouped by how many
/// of their vertices after the start differ from `w`. Entry `l` counts paths
/// with exactly `l` such steps, for `l ≤ max`.
pub fn paths_skipping(g: &Graph, u: usize, x: usize, w: Option<usize>, max: usize) -> Vec<u128> {
    let mut counts = vec![0u128; max + 1];
    fn go(g: &Graph, at: usize, x: usize, w: Option<usize>, steps: usize, max: usize, weight: u128, counts: &mut [u128]) {
        for t in 0..g.len() {
            let m = mult(g, at, t) as u128;
            if m == 0 {
                continue;
            }
            let s = if Some(t) == w { steps } else { steps + 1 };
            if s > max {
                continue;
            }
            if t == x && Some(t) != w {
                counts[s] += weight * m;
            }
            go(g, t, x, w, s, max, weight * m, counts);
        }
    }
    go(g, u, x, w, 0, max, 1, &mut counts);
    counts
}

pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn det(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return m[0][0];
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i128>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| *x).collect())
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] * det(&minor)
        })
        .sum()
}

/// Adjugate: `adj(m) · m = det(m) · 1`.
pub fn adjugate(m: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let n = m.len();
    if n == 1 {
        return vec![vec![1]];
    }
    let mut adj = vec![vec![0i128; n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<i128>> = (0..n)
                .filter(|&r| r != i)
                .map(|r| (0..n).filter(|&c| c != j).map(|c| m[r][c]).collect())
                .collect();
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            adj[j][i] = sign * det(&minor);
        }
    }
    adj
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Invariant factors from determinantal divisors: `d_k` is the gcd of all
/// `k × k` minors, and the `k`-th factor is `d_k / d_{k−1}`. Trailing zeros
/// mark the rank deficiency.
pub fn invariant_factors(m: &[Vec<i128>], rows: usize, cols: usize) -> Vec<i128> {
    let mut prev = 1i128;
    let mut out = Vec::new();
    for k in 1..=rows.min(cols) {
        let mut d = 0i128;
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let minor: Vec<Vec<i128>> = rs.iter().map(|&r| cs.iter().map(|&c| m[r][c]).collect()).collect();
                d = gcd(d, det(&minor));
            }
        }
        if d == 0 {
            out.extend(std::iter::repeat_n(0, rows.min(cols) - out.len()));
            return out;
        }
        out.push(d / prev);
        prev = d;
    }
    out
}

pub fn to_i128(m: &IntMatrix) -> Vec<Vec<i128>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| i128::try_from(m.get(i, j)).expect("small entry")).collect())
        .collect()
}

pub fn from_i128(m: &[Vec<i128>], cols: usize) -> IntMatrix {
    let rows: Vec<Vec<i64>> = m.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect();
    if rows.is_empty() {
        return IntMatrix::zeros(0, cols);
    }
    IntMatrix::from_rows(&rows)
}

pub fn mat_mul(a: &[Vec<i128>], b: &[Vec<i128>], inner: usize, cols: usize) -> Vec<Vec<i128>> {
    a.iter()
        .map(|row| (0..cols).map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum()).collect())
        .collect()
}

pub fn mat_vec(a: &[Vec<i128>], x: &[i128]) -> Vec<i128> {
    a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

pub fn ints(v: &[i128]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Membership in the column span of a square nonsingular matrix.
pub fn in_lattice(m: &[Vec<i128>], x: &[i128]) -> bool {
    let d = det(m);
    mat_vec(&adjugate(m), x).iter().all(|y| y % d == 0)
}

/// Coset representatives of `ℤ^n / colspan(m)`, by breadth-first search
/// over unit steps.
pub fn coset_reps(m: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let n = m.len();
    let mut reps: Vec<Vec<i128>> = vec![vec![0; n]];
    let mut frontier = 0;
    while frontier < reps.len() {
        let base = reps[frontier].clone();
        frontier += 1;
        for i in 0..n {
            let mut x = base.clone();
            x[i] += 1;
            let known = reps.iter().any(|r| {
                let diff: Vec<i128> = x.iter().zip(r).map(|(a, b)| a - b).collect();
                in_lattice(m, &diff)
            });
            if !known {
                reps.push(x);
            }
        }
    }
    reps
}

/// Random graph on up to `max_n` vertices: finite multiplicities up to
/// `max_mult`, occasional ω entries and sinks.
pub fn random_graph(rng: &mut ChaCha8Rng, max_n: usize, max_mult: u64, omega_prob: f64) -> Graph {
    let n = rng.gen_range(1..=max_n);
    let density = rng.gen_range(0.1..0.5);
    let mut g = Graph::new((0..n).map(|k| format!("g{k}"))).unwrap();
    for a in 0..n {
        for b in 0..n {
            if rng.gen_bool(density) {
                let m = if rng.gen_bool(omega_prob) {
                    ExtNat::Omega
                } else {
                    ExtNat::Finite(rng.gen_range(1..=max_mult))
                };
                g.set_mult_at(a, b, m);
            }
        }
    }
    g
}

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}
