#![allow(clippy::needless_range_loop)]

mod common;

use std::collections::BTreeSet;

use common::*;
use gsplice::graph::canonical_order;
use gsplice::ideals::{enumerate_hs, h_infinity_fin, ideal_lattice, prim_space};
use gsplice::linalg::{cokernel_group, kernel_basis, smith, solve};
use gsplice::moves::contract_vertex_at;
use gsplice::{ExtNat, FgAbelianGroup, Graph, Limits, ReturnPathClass, VertexClass, VertexSet};
use num_bigint::BigInt;
use rand::Rng;

#[test]
fn return_path_class_matches_enumeration() {
    let mut checked = [0usize; 3];
    for i in 0..3000 {
        let mut r = rng(11, i);
        let g = random_graph(&mut r, 5, 2, 0.0);
        let reach = g.reachability();
        for v in 0..g.len() {
            let expected = match count_return_paths(&g, v, 2) {
                0 => ReturnPathClass::Zero,
                1 => ReturnPathClass::One,
                _ => ReturnPathClass::TwoOrMore,
            };
            let got = g.return_path_class_at(v, &reach);
            assert_eq!(got, expected, "vertex {v} of {g:?}");
            checked[got as usize] += 1;
        }
    }
    assert!(checked.iter().all(|&c| c > 100), "{checked:?}");
}

#[test]
fn second_return_path_can_be_long() {
    // shortest two return paths at v have lengths 4 and 6
    let g = Graph::from_edges(
        &["v", "a", "b", "c"],
        &[
            ("v", "a", ExtNat::Finite(1)),
            ("a", "b", ExtNat::Finite(1)),
            ("b", "c", ExtNat::Finite(1)),
            ("c", "v", ExtNat::Finite(1)),
            ("c", "b", ExtNat::Finite(1)),
        ],
    )
    .unwrap();
    assert_eq!(count_return_paths(&g, 0, 2), 2);
    assert_eq!(g.return_path_class("v").unwrap(), ReturnPathClass::TwoOrMore);
}

#[test]
fn reachability_matches_closure() {
    for i in 0..500 {
        let g = random_graph(&mut rng(12, i), 7, 2, 0.2);
        let c = closure(&g);
        let r = g.reachability();
        for a in 0..g.len() {
            for b in 0..g.len() {
                assert_eq!(r.reaches(a, b), c[a][b]);
            }
        }
    }
}

#[test]
fn contraction_preserves_path_counts() {
    let mut contracted = 0;
    for i in 0..2000 {
        let g = random_graph(&mut rng(13, i), 5, 2, 0.0);
        for w in 0..g.len() {
            if g.class_at(w) != VertexClass::Regular || g.mult_at(w, w) != ExtNat::Finite(0) {
                continue;
            }
            let c = contract_vertex_at(&g, w).unwrap();
            contracted += 1;
            let keep: Vec<usize> = (0..g.len()).filter(|&k| k != w).collect();
            for (a, &u) in keep.iter().enumerate() {
                for (b, &x) in keep.iter().enumerate() {
                    let before = paths_skipping(&g, u, x, Some(w), 3);
                    let after = paths_skipping(&c, a, b, None, 3);
                    assert_eq!(before, after, "w = {w}, {u} -> {x} in {g:?}");
                }
            }
        }
    }
    assert!(contracted > 500);
}

fn mask_set(mask: u32, n: usize) -> VertexSet {
    (0..n).filter(|i| mask >> i & 1 == 1).collect()
}

/// Hereditary and saturated by direct reading of the definitions.
fn is_hs(g: &Graph, h: &VertexSet) -> bool {
    let n = g.len();
    let c = closure(g);
    let hereditary = h.iter().all(|&v| (0..n).all(|w| !c[v][w] || h.contains(&w)));
    let saturated = (0..n).all(|v| {
        let out: Vec<usize> = (0..n).filter(|&w| mult(g, v, w) > 0).collect();
        let regular = !out.is_empty() && out.iter().all(|&w| mult(g, v, w) != u64::MAX);
        h.contains(&v) || !regular || out.iter().any(|w| !h.contains(w))
    });
    hereditary && saturated
}

#[test]
fn lattice_matches_brute_force() {
    let lim = Limits::default();
    let mut lattices = 0;
    let mut nonempty_b = 0;
    for i in 0..1500 {
        let g = random_graph(&mut rng(14, i), 6, 2, 0.25);
        let n = g.len();
        let mut hs: Vec<VertexSet> = (0u32..1 << n).map(|m| mask_set(m, n)).filter(|h| is_hs(&g, h)).collect();
        hs.sort_by(canonical_order);
        assert_eq!(enumerate_hs(&g, &lim).unwrap(), hs);

        let mut pairs = Vec::new();
        for h in &hs {
            let fin: VertexSet = (0..n)
                .filter(|v| !h.contains(v))
                .filter(|&v| {
                    let infinite = (0..n).any(|w| mult(&g, v, w) == u64::MAX);
                    let out: u64 = (0..n)
                        .filter(|w| !h.contains(w))
                        .map(|w| mult(&g, v, w))
                        .fold(0u64, |a, b| a.saturating_add(b));
                    infinite && out > 0 && out != u64::MAX
                })
                .collect();
            assert_eq!(h_infinity_fin(&g, h).unwrap(), fin);
            let fin: Vec<usize> = fin.into_iter().collect();
            for m in 0u32..1 << fin.len() {
                let b: VertexSet = (0..fin.len()).filter(|k| m >> k & 1 == 1).map(|k| fin[k]).collect();
                nonempty_b += usize::from(!b.is_empty());
                pairs.push((h.clone(), b));
            }
        }

        let Ok(lat) = ideal_lattice(&g, &lim) else {
            assert!(!g.condition_k());
            continue;
        };
        lattices += 1;
        let got: BTreeSet<(Vec<usize>, Vec<usize>)> = lat
            .pairs
            .iter()
            .map(|p| (p.h.iter().copied().collect(), p.b.iter().copied().collect()))
            .collect();
        let want: BTreeSet<(Vec<usize>, Vec<usize>)> = pairs
            .iter()
            .map(|(h, b)| (h.iter().copied().collect(), b.iter().copied().collect()))
            .collect();
        assert_eq!(got, want);
        for (a, p) in lat.pairs.iter().enumerate() {
            for (b, q) in lat.pairs.iter().enumerate() {
                let brute = p.h.is_subset(&q.h) && p.b.iter().all(|x| q.h.contains(x) || q.b.contains(x));
                assert_eq!(lat.leq[a][b], brute);
            }
        }
        let all: VertexSet = (0..n).collect();
        let bottom = lat.bottom().unwrap();
        let top = lat.top().unwrap();
        assert!(lat.pairs[bottom].h.is_empty() && lat.pairs[bottom].b.is_empty());
        assert!(lat.pairs[top].h == all && lat.pairs[top].b.is_empty());
    }
    assert!(lattices > 300 && nonempty_b > 20, "{lattices} lattices, {nonempty_b} non-empty B");
}

/// A lattice element is join-irreducible iff it has exactly one lower cover.
#[test]
fn prim_points_are_single_cover_elements() {
    let lim = Limits::default();
    let mut spaces = 0;
    for i in 0..800 {
        let g = random_graph(&mut rng(15, i), 6, 2, 0.1);
        let Ok(lat) = ideal_lattice(&g, &lim) else { continue };
        let Ok(x) = prim_space(&lat) else { continue };
        spaces += 1;
        let covers = lat.hasse_edges();
        let single: Vec<usize> = (0..lat.len())
            .filter(|&j| covers.iter().filter(|(_, t)| *t == j).count() == 1)
            .collect();
        assert_eq!(x.lattice_index, single);
        for a in 0..x.len() {
            for b in 0..x.len() {
                if x.geq[a][b] {
                    assert!(x.h_of(a).is_subset(x.h_of(b)));
                }
            }
        }
    }
    assert!(spaces > 300);
}

#[test]
fn prim_points_match_maximal_tails_for_regular_purely_infinite_graphs() {
    let lim = Limits::default();
    let mut seen = 0;
    for i in 0..1500 {
        let g = random_graph(&mut rng(16, i), 6, 3, 0.0);
        if !g.is_regular() || !g.purely_infinite_report(&lim).unwrap().verdict {
            continue;
        }
        seen += 1;
        let x = prim_space(&ideal_lattice(&g, &lim).unwrap()).unwrap();
        assert_eq!(x.len(), g.maximal_tails(&lim).unwrap().len(), "{g:?}");
    }
    assert!(seen > 50, "{seen}");
}

fn random_matrix(r: &mut rand_chacha::ChaCha8Rng, rows: usize, cols: usize, bound: i64) -> Vec<Vec<i128>> {
    (0..rows)
        .map(|_| (0..cols).map(|_| r.gen_range(-bound..=bound) as i128).collect())
        .collect()
}

#[test]
fn smith_matches_determinantal_divisors() {
    for i in 0..1500 {
        let mut r = rng(17, i);
        let (rows, cols) = (r.gen_range(1..=4), r.gen_range(1..=4));
        let m = random_matrix(&mut r, rows, cols, 9);
        let d = smith(&from_i128(&m, cols)).diagonal();
        let want = invariant_factors(&m, rows, cols);
        let got: Vec<i128> = d.iter().map(|x| i128::try_from(x).unwrap()).collect();
        assert_eq!(got, want, "{m:?}");
    }
}

#[test]
fn cokernel_order_is_determinant() {
    for i in 0..500 {
        let mut r = rng(18, i);
        let n = r.gen_range(1..=4);
        let m = random_matrix(&mut r, n, n, 5);
        let d = det(&m);
        let g = cokernel_group(&from_i128(&m, n));
        if d == 0 {
            assert!(g.free_rank > 0);
        } else {
            assert_eq!(g.order(), Some(BigInt::from(d.abs())));
        }
    }
}

#[test]
fn kernel_basis_is_complete_and_independent() {
    for i in 0..800 {
        let mut r = rng(19, i);
        let (rows, cols) = (r.gen_range(1..=4), r.gen_range(1..=5));
        let m = random_matrix(&mut r, rows, cols, 4);
        let mm = from_i128(&m, cols);
        let k = kernel_basis(&mm);
        assert!((&mm * &k).is_zero());
        let rank = invariant_factors(&m, rows, cols).iter().filter(|&&d| d != 0).count();
        assert_eq!(k.cols(), cols - rank);
        if k.cols() > 0 {
            let kk = to_i128(&k);
            let f = invariant_factors(&kk, cols, k.cols());
            // independent and saturated: all invariant factors are 1
            assert!(f.iter().all(|&x| x == 1), "{kk:?}");
        }
    }
}

#[test]
fn solve_matches_lattice_membership() {
    let mut solvable = 0;
    for i in 0..800 {
        let mut r = rng(20, i);
        let n = r.gen_range(1..=3);
        let m = random_matrix(&mut r, n, n, 4);
        if det(&m) == 0 {
            continue;
        }
        let b: Vec<i128> = (0..n).map(|_| r.gen_range(-6..=6)).collect();
        let x = solve(&from_i128(&m, n), &ints(&b)).unwrap();
        assert_eq!(x.is_some(), in_lattice(&m, &b));
        if let Some(x) = x {
            solvable += 1;
            let xi: Vec<i128> = x.iter().map(|v| i128::try_from(v).unwrap()).collect();
            assert_eq!(mat_vec(&m, &xi), b);
        }
    }
    assert!(solvable > 50);
}

#[test]
fn coset_enumeration_sanity() {
    let m = vec![vec![2, 0], vec![1, 2]];
    assert_eq!(coset_reps(&m).len(), 4);
    assert_eq!(cokernel_group(&from_i128(&m, 2)), FgAbelianGroup::cyclic(4));
}
