use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use saliency_core::graph::{AffinityGraph, Sides};
use saliency_core::ranking::{normalize, rank, QueryVector, Ranker, RankingParams};

/// Random connected graph: a random spanning tree plus extra edges, weights in (0, 1].
fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> AffinityGraph {
    let mut w = vec![0.0; n * n];
    let set = |w: &mut Vec<f64>, i: usize, j: usize, v: f64| {
        w[i * n + j] = v;
        w[j * n + i] = v;
    };
    for i in 1..n {
        let j = rng.random_range(0..i);
        let v = 1.0 - rng.random_range(0.0..1.0);
        set(&mut w, i, j, v);
    }
    for i in 0..n {
        for j in i + 1..n {
            if w[i * n + j] == 0.0 && rng.random_bool(0.3) {
                let v = 1.0 - rng.random_range(0.0..1.0);
                set(&mut w, i, j, v);
            }
        }
    }
    AffinityGraph::from_weights(n, w, vec![Sides::NONE; n]).unwrap()
}

fn dense_oracle(g: &AffinityGraph, y: &[f64], alpha: f64) -> Vec<f64> {
    let n = g.node_count();
    let m = DMatrix::from_fn(n, n, |i, j| {
        let d = if i == j { g.degrees()[i] } else { 0.0 };
        d - alpha * g.weight(i, j)
    });
    let inv = m.try_inverse().expect("invertible");
    (inv * DVector::from_column_slice(y)).iter().copied().collect()
}

fn random_query(rng: &mut ChaCha8Rng, n: usize) -> QueryVector {
    let mut flags: Vec<bool> = (0..n).map(|_| rng.random_bool(0.4)).collect();
    if !flags.iter().any(|&b| b) {
        flags[rng.random_range(0..n)] = true;
    }
    QueryVector::from_flags(flags)
}

#[test]
fn matches_dense_inverse_on_random_graphs() {
    let p = RankingParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let n = rng.random_range(2..=10);
        let g = random_graph(&mut rng, n);
        let q = random_query(&mut rng, n);
        let f = rank(&g, &q, &p).unwrap();
        let oracle = dense_oracle(&g, &q.as_reals(), p.alpha());
        for (a, b) in f.values().iter().zip(&oracle) {
            assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
        }
    }
}

#[test]
fn residual_within_tolerance() {
    let p = RankingParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let n = rng.random_range(2..=40);
        let g = random_graph(&mut rng, n);
        let q = random_query(&mut rng, n);
        let f = rank(&g, &q, &p).unwrap();
        let y = q.as_reals();
        for i in 0..n {
            let row: f64 = (0..n)
                .map(|j| {
                    let d = if i == j { g.degrees()[i] } else { 0.0 };
                    (d - p.alpha() * g.weight(i, j)) * f.values()[j]
                })
                .sum();
            assert!((row - y[i]).abs() <= 1e-8);
        }
    }
}

#[test]
fn linear_in_queries_and_nonnegative() {
    let p = RankingParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let n = rng.random_range(3..=10);
        let g = random_graph(&mut rng, n);
        let ranker = Ranker::new(&g, &p).unwrap();
        let a: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.3)).collect();
        let b: Vec<usize> = (0..n).filter(|i| !a.contains(i) && rng.random_bool(0.5)).collect();
        let fa = ranker.rank(&QueryVector::from_indices(n, a.clone())).unwrap();
        let fb = ranker.rank(&QueryVector::from_indices(n, b.clone())).unwrap();
        let fab = ranker
            .rank(&QueryVector::from_indices(n, a.into_iter().chain(b)))
            .unwrap();
        for i in 0..n {
            let sum = fa.values()[i] + fb.values()[i];
            assert!((fab.values()[i] - sum).abs() <= 1e-8);
            assert!(fab.values()[i] >= 0.0);
        }
    }
}

#[test]
fn two_node_closed_form() {
    let g = AffinityGraph::from_weights(2, vec![0.0, 1.0, 1.0, 0.0], vec![Sides::NONE; 2]).unwrap();
    let p = RankingParams { mu: 0.01 };
    let f = rank(&g, &QueryVector::from_indices(2, [0]), &p).unwrap();
    let a = 1.0 / 1.01;
    let expect = [1.0 / (1.0 - a * a), a / (1.0 - a * a)];
    assert!((f.values()[0] - expect[0]).abs() < 1e-9);
    assert!((f.values()[1] - expect[1]).abs() < 1e-9);
    assert!((f.values()[0] - 50.75124).abs() < 1e-4);
    assert!((f.values()[1] - 50.24876).abs() < 1e-4);
}

proptest! {
    #[test]
    fn normalize_lands_in_unit_interval(v in prop::collection::vec(-1e6f64..1e6, 1..50)) {
        let out = normalize(&v);
        prop_assert_eq!(out.len(), v.len());
        prop_assert!(out.iter().all(|x| (0.0..=1.0).contains(x)));
        let (lo, hi) = v.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
        let flat = hi - lo <= 1e-12 * lo.abs().max(hi.abs());
        if flat {
            prop_assert!(out.iter().all(|&x| x == 0.0));
        } else {
            prop_assert!(out.contains(&0.0));
            prop_assert!(out.iter().any(|&x| (x - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn normalize_preserves_order(v in prop::collection::vec(-100f64..100.0, 2..30)) {
        let out = normalize(&v);
        for i in 0..v.len() {
            for j in 0..v.len() {
                if v[i] < v[j] {
                    prop_assert!(out[i] <= out[j]);
                }
            }
        }
    }

    #[test]
    fn normalize_is_idempotent(v in prop::collection::vec(-10f64..10.0, 1..30)) {
        let once = normalize(&v);
        let twice = normalize(&once);
        for (a, b) in once.iter().zip(&twice) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
