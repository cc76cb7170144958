use nalgebra::{DMatrix, DVector};
use normloc::operators::{
    full_norm, iterative_norm, localized_ratio, operator_norm, random_band_operator, FiberedOperator, Side,
    StateVector,
};
use normloc::space::{build_graph_space, FiniteMetricSpace, Subset};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_graph_space(n: usize, rng: &mut ChaCha8Rng) -> FiniteMetricSpace<f64> {
    let mut edges: Vec<(usize, usize, u32)> = (1..n).map(|i| (rng.random_range(0..i), i, 1)).collect();
    for _ in 0..n / 2 {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        if a != b {
            edges.push((a, b, 1));
        }
    }
    build_graph_space(n, &edges).unwrap()
}

fn random_subset(n: usize, rng: &mut ChaCha8Rng) -> Subset {
    let mut idx: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.3)).collect();
    if idx.is_empty() {
        idx.push(rng.random_range(0..n));
    }
    Subset::new(n, idx).unwrap()
}

#[test]
fn laplacian_norm_matches_closed_form_spectrum() {
    // Oracle: the cycle Laplacian has eigenvalues 2(1 - cos(2πj/n)).
    for n in [4usize, 7, 10] {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1)).collect();
        let g = normloc::Multigraph::new(n, &edges).unwrap();
        let lap = normloc::expanders::laplacian::<f64>(&g);
        let closed = (0..n)
            .map(|j| 2.0 * (1.0 - (2.0 * std::f64::consts::PI * j as f64 / n as f64).cos()))
            .fold(0.0, f64::max);
        assert!((operator_norm(&lap).unwrap() - closed).abs() < 1e-12);
    }
}

#[test]
fn lemma_separated_blocks_vanish() {
    // P_U A P_{X \ [U]_k} = 0 whenever prop(A) ≤ k.
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for trial in 0..30 {
        let x = random_graph_space(25, &mut rng);
        let k = rng.random_range(0..4) as f64;
        let a = random_band_operator(&x, &k, 1 + trial % 2, trial as u64, 1.0).unwrap();
        let u = random_subset(25, &mut rng);
        let far = x.neighborhood(&u, &k).unwrap().complement();
        if far.is_empty() {
            continue;
        }
        let block = a.project(&u, Side::Left).unwrap().project(&far, Side::Right).unwrap();
        assert!(block.matrix().iter().all(|v| v.abs() <= 1e-14));
    }
}

#[test]
fn lemma_separated_pieces() {
    // Pieces more than m ≥ 2k apart stay m - 2k apart after A, and the
    // Rayleigh ratio of the sum is at most the best piece's.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x = FiniteMetricSpace::<f64>::path(80).unwrap();
    for trial in 0..20 {
        let k = rng.random_range(1..3) as f64;
        let m = 2.0 * k + rng.random_range(0..3) as f64;
        let a = random_band_operator(&x, &k, 1, 100 + trial, 1.0).unwrap();
        let starts = [0usize, 25, 50];
        let pieces: Vec<StateVector<f64>> = starts
            .iter()
            .map(|&s| {
                let len = rng.random_range(1..6);
                let mut v = DVector::zeros(80);
                for i in s..s + len {
                    v[i] = rng.random_range(-1.0..1.0);
                }
                StateVector::new(80, 1, v).unwrap()
            })
            .collect();
        let supports: Vec<Subset> = pieces.iter().map(|p| p.support(1e-12)).collect();
        for i in 0..3 {
            for j in i + 1..3 {
                assert!(x.set_distance(&supports[i], &supports[j]).unwrap() > m);
            }
        }
        let images: Vec<StateVector<f64>> = pieces.iter().map(|p| a.apply(p).unwrap()).collect();
        for i in 0..3 {
            for j in i + 1..3 {
                let (si, sj) = (images[i].support(1e-12), images[j].support(1e-12));
                if !si.is_empty() && !sj.is_empty() {
                    assert!(x.set_distance(&si, &sj).unwrap() >= m - 2.0 * k);
                }
            }
        }
        let sum = pieces.iter().skip(1).fold(pieces[0].clone(), |acc, p| acc.add(p).unwrap());
        let whole = a.apply(&sum).unwrap().norm() / sum.norm();
        let best = pieces
            .iter()
            .zip(&images)
            .map(|(p, q)| q.norm() / p.norm())
            .fold(0.0, f64::max);
        assert!(whole <= best + 1e-9);
    }
}

#[test]
fn iterative_and_full_norms_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for trial in 0..12u64 {
        let n = rng.random_range(20..250);
        let h = if n <= 128 { 2 } else { 1 };
        let x = FiniteMetricSpace::<f64>::path(n).unwrap();
        let t = random_band_operator(&x, &((trial % 4) as f64), h, trial, 1.0).unwrap();
        let full = full_norm(t.matrix());
        let iter = iterative_norm(t.matrix(), trial).unwrap();
        assert!((full - iter).abs() <= 1e-8 * full, "{full} vs {iter}");
    }
}

#[test]
fn single_precision_operators() {
    let x = FiniteMetricSpace::<f32>::path(40).unwrap();
    let t32 = random_band_operator(&x, &2.0f32, 1, 9, 1.0).unwrap();
    let t64 = FiberedOperator::new(40, 1, t32.matrix().map(f64::from)).unwrap();
    let (a, b) = (operator_norm(&t32).unwrap() as f64, operator_norm(&t64).unwrap());
    assert!((a - b).abs() < 1e-4 * b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn localized_ratio_is_a_fraction_of_the_norm(seed in 0u64..10_000, n in 3usize..30, r in 0usize..3, radius in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_graph_space(n, &mut rng);
        let t = random_band_operator(&x, &(r as f64), 1, seed, 1.0).unwrap();
        let norm = operator_norm(&t).unwrap();
        let u = random_subset(n, &mut rng);
        let tu = t.project(&u, Side::Right).unwrap();
        prop_assert!(full_norm(tu.matrix()) <= norm * (1.0 + 1e-12));
        let rep = localized_ratio(&x, &t, &(radius as f64)).unwrap();
        prop_assert!(rep.ratio > 0.0 && rep.ratio <= 1.0 + 1e-9);
        prop_assert!(rep.support_diameter <= radius as f64);
        let achieved = t.apply(&rep.witness).unwrap().norm() / (norm * rep.witness.norm());
        prop_assert!((achieved - rep.ratio).abs() < 1e-9);
    }

    #[test]
    fn projections_compose(seed in 0u64..10_000, n in 2usize..15) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = FiberedOperator::new(n, 1, DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0))).unwrap();
        let u = random_subset(n, &mut rng);
        let both = t.project(&u, Side::Both).unwrap();
        let seq = t.project(&u, Side::Left).unwrap().project(&u, Side::Right).unwrap();
        prop_assert_eq!(both, seq);
    }
}
