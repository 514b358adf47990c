//! Independent recomputations checked against the library.

use std::collections::HashSet;

use conftc::certificates::{verify_with_complex, ChainCheck, ChainPolicy, VerifyOptions};
use conftc::chains::ChainComplexF2;
use conftc::cohomology::{witness_factors, witness_value, AmbientClass, TensorLayout};
use conftc::f2::dense_rank;
use conftc::symbols::{enumerate_cells, ComplexParams, Symbol};

/// Expands the zeta product over every choice of side, keeping the choices
/// whose generators fill the torus, with the permutation sign by inversions.
fn brute_force_witness(m: usize, l: usize, r: usize, order: &[usize]) -> i64 {
    let slots = |f: usize| if f == 1 { l } else { m };
    let position = |f: usize, s: usize| -> usize {
        let before: usize = order.iter().take_while(|&&g| g != f).map(|&g| slots(g)).sum();
        before + s - 1
    };
    let mut factors: Vec<(AmbientClass, usize, usize)> = (1..=l).map(|q| (AmbientClass::Z(q), 1, 2)).collect();
    factors.extend((1..=m).map(|p| (AmbientClass::Y(p), 1, 2)));
    for k in 3..=r {
        factors.extend((1..=m).map(|p| (AmbientClass::Y(p), k - 1, k)));
    }
    let k = factors.len();
    let mut total = 0i64;
    for choice in 0u32..(1 << k) {
        let mut sign = 1i64;
        let mut seq = Vec::with_capacity(k);
        let mut dead = false;
        for (t, &(a, i, j)) in factors.iter().enumerate() {
            let second = choice >> t & 1 == 1;
            let f = if second { j } else { i };
            if second {
                sign = -sign;
            }
            let slot = match a {
                AmbientClass::Y(p) if f != 1 => p,
                AmbientClass::Z(q) if f == 1 => q,
                _ => {
                    dead = true;
                    break;
                }
            };
            seq.push(position(f, slot));
        }
        if dead || seq.iter().collect::<HashSet<_>>().len() != k {
            continue;
        }
        let inversions = (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).filter(|&(a, b)| seq[a] > seq[b]).count();
        if inversions % 2 == 1 {
            sign = -sign;
        }
        total += sign;
    }
    total
}

#[test]
fn witness_matches_brute_force() {
    for m in 1..=4 {
        for l in 1..=m {
            for r in 2..=4 {
                let identity: Vec<usize> = (1..=r).collect();
                let layout = TensorLayout::new(m, l, r).unwrap();
                assert_eq!(witness_factors(&layout).len(), (r - 1) * m + l);
                let value = witness_value::<i64>(&layout).unwrap();
                assert_eq!(value, brute_force_witness(m, l, r, &identity), "m={m} l={l} r={r}");
                assert_eq!(value.abs(), 1);

                let reversed: Vec<usize> = (1..=r).rev().collect();
                let layout = TensorLayout::new(m, l, r).unwrap().with_order(reversed.clone()).unwrap();
                assert_eq!(witness_value::<i64>(&layout).unwrap(), brute_force_witness(m, l, r, &reversed));
            }
        }
    }
}

fn compositions(total: usize, parts: usize, max: usize) -> u64 {
    if parts == 0 {
        return (total == 0) as u64;
    }
    (1..=max.min(total)).map(|first| compositions(total - first, parts - 1, max)).sum()
}

#[test]
fn cell_counts_are_permutations_times_compositions() {
    for n in 1..=7usize {
        let fact: u64 = (1..=n as u64).product();
        for w in 1..=n {
            let p = ComplexParams::new(n, w).unwrap();
            for d in 0..n {
                let expected = fact * compositions(n, n - d, w);
                assert_eq!(enumerate_cells(&p, d).len() as u64, expected, "n={n} w={w} d={d}");
                assert_eq!(p.cell_count(d), expected);
            }
        }
    }
}

#[test]
fn faces_and_cofaces_are_adjoint() {
    for n in 1..=5 {
        for w in 1..=n {
            let p = ComplexParams::new(n, w).unwrap();
            for d in 0..n {
                for s in enumerate_cells(&p, d) {
                    for t in s.cofaces(&p) {
                        assert_eq!(t.dimension(), d + 1);
                        assert!(t.faces().contains(&s), "{t} should have face {s}");
                    }
                    for f in s.faces() {
                        assert!(f.cofaces(&p).contains(&s), "{f} should have coface {s}");
                    }
                }
            }
        }
    }
}

#[test]
fn faces_are_distinct_and_one_dimension_down() {
    let p = ComplexParams::new(6, 3).unwrap();
    for d in 1..=p.top_dimension() {
        for s in enumerate_cells(&p, d) {
            let faces = s.faces();
            let unique: HashSet<Symbol> = faces.iter().copied().collect();
            assert_eq!(unique.len(), faces.len());
            assert!(faces.iter().all(|f| f.dimension() == d - 1 && f.fits(3)));
        }
    }
}

#[test]
fn sparse_betti_matches_dense_elimination() {
    for n in 1..=5 {
        for w in 1..=n {
            let complex = ChainComplexF2::build(ComplexParams::new(n, w).unwrap()).unwrap();
            let counts = complex.cell_counts();
            let ranks: Vec<usize> = (0..=counts.len())
                .map(|d| complex.boundary(d).map(dense_rank).unwrap_or(0))
                .collect();
            let dense: Vec<usize> = (0..counts.len())
                .map(|d| counts[d] - ranks[d] - ranks.get(d + 1).copied().unwrap_or(0))
                .collect();
            let mut sparse = complex.betti();
            sparse.resize(dense.len(), 0);
            assert_eq!(sparse, dense, "n={n} w={w}");
        }
    }
}

#[test]
fn symbolic_and_chain_verdicts_agree() {
    let mut grid: Vec<(usize, usize)> = (3..=7).flat_map(|n| (2..n).map(move |w| (n, w))).collect();
    grid.extend((2..=4).flat_map(|w| (2..=w).map(move |n| (n, w))));
    for (n, w) in grid {
        let p = ComplexParams::new(n, w).unwrap();
        let complex = ChainComplexF2::build(p).unwrap();
        let options = VerifyOptions {
            chain: ChainPolicy::Always,
            ..VerifyOptions::default()
        };
        let report = verify_with_complex(p, options, Some(&complex)).unwrap();
        assert_eq!(report.disjoint_chain, ChainCheck::Ran(report.disjoint_symbolic), "n={n} w={w}");
        assert!(report.consistent && report.passed(), "n={n} w={w}");
    }
}
