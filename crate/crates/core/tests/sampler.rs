use proptest::prelude::*;
use rand::Rng;
use wcmm_core::rng;
use wcmm_core::sampling::{
    build_unweighted_sketch, build_weighted_sketch, compute_distribution, estimate_product,
    variance_functional, BlockSampler, SampleMultiset, StoppingRule,
};
use wcmm_core::{matmul, BlockPartition, DenseMatrix};

/// Random `rows×cols` matrix with per-block scales along `blocks` slices of
/// the given axis, to make `Π` non-uniform.
fn skewed(rows: usize, cols: usize, blocks: usize, by_cols: bool, seed: u64) -> DenseMatrix {
    let mut r = rng::seeded(seed);
    let scales: Vec<f64> = (0..blocks).map(|_| r.random::<f64>().powi(2) + 0.01).collect();
    let data = (0..rows * cols)
        .map(|idx| {
            let (i, j) = (idx / cols, idx % cols);
            let blk = if by_cols { j / (cols / blocks) } else { i / (rows / blocks) };
            (r.random::<f64>() - 0.5) * scales[blk]
        })
        .collect();
    DenseMatrix::new(rows, cols, data).unwrap()
}

#[test]
fn unbiased_fixed_count_estimator() {
    let (l, k, tau, m) = (5, 8, 2, 4);
    let a = skewed(l, k * tau, k, true, 1);
    let b = skewed(k * tau, m, k, false, 2);
    let (pa, pb) = (
        BlockPartition::columns(&a, k).unwrap(),
        BlockPartition::rows(&b, k).unwrap(),
    );
    let dist = compute_distribution(&pa, &pb).unwrap();
    let sampler = BlockSampler::new(dist.pi()).unwrap();
    let exact = matmul(&a, &b).unwrap();
    for t in [2, 4] {
        let trials = 10_000u64;
        let mut sum = vec![0.0; l * m];
        let mut sq = vec![0.0; l * m];
        for s in 0..trials {
            let sample = sampler
                .draw(StoppingRule::Fixed { m: t }, &mut rng::stream(3, s))
                .unwrap();
            let y = estimate_product(&build_unweighted_sketch(&pa, &pb, dist.pi(), &sample).unwrap());
            for (i, v) in y.data().iter().enumerate() {
                sum[i] += v;
                sq[i] += v * v;
            }
        }
        let n = trials as f64;
        let inside = (0..l * m)
            .filter(|&i| {
                let mean = sum[i] / n;
                let var = (sq[i] / n - mean * mean) * n / (n - 1.0);
                (mean - exact.data()[i]).abs() <= 3.0 * (var / n).sqrt()
            })
            .count();
        assert!(inside as f64 >= 0.99 * (l * m) as f64, "t={t}: {inside}/{}", l * m);
    }
}

#[test]
fn mean_squared_error_within_bound() {
    let (l, k, tau, m) = (4, 8, 2, 4);
    let a = skewed(l, k * tau, k, true, 5);
    let b = skewed(k * tau, m, k, false, 6);
    let (pa, pb) = (
        BlockPartition::columns(&a, k).unwrap(),
        BlockPartition::rows(&b, k).unwrap(),
    );
    let dist = compute_distribution(&pa, &pb).unwrap();
    let sampler = BlockSampler::new(dist.pi()).unwrap();
    let exact = matmul(&a, &b).unwrap();
    let t = 4;
    let trials = 10_000u64;
    let mse: f64 = (0..trials)
        .map(|s| {
            let sample = sampler
                .draw(StoppingRule::until_distinct(t), &mut rng::stream(9, s))
                .unwrap();
            let y = estimate_product(&build_weighted_sketch(&pa, &pb, dist.pi(), &sample).unwrap());
            exact.sub(&y).unwrap().frobenius_norm_sq()
        })
        .sum::<f64>()
        / trials as f64;
    assert!(mse <= a.frobenius_norm_sq() * b.frobenius_norm_sq() / t as f64);
}

#[test]
fn optimal_distribution_beats_adversarial_candidates() {
    let mut r = rng::seeded(21);
    let k = 10;
    let a = skewed(3, 2 * k, k, true, 22);
    let b = skewed(2 * k, 3, k, false, 23);
    let (pa, pb) = (
        BlockPartition::columns(&a, k).unwrap(),
        BlockPartition::rows(&b, k).unwrap(),
    );
    let dist = compute_distribution(&pa, &pb).unwrap();
    let f_opt = variance_functional(dist.pi(), dist.norm_products()).unwrap();
    for _ in 0..1000 {
        // perturb the optimum multiplicatively so candidates stay close
        let raw: Vec<f64> = dist
            .pi()
            .iter()
            .map(|p| p * (1.0 + 0.5 * (r.random::<f64>() - 0.5)))
            .collect();
        let s: f64 = raw.iter().sum();
        let q: Vec<f64> = raw.iter().map(|v| v / s).collect();
        assert!(f_opt <= variance_functional(&q, dist.norm_products()).unwrap() * (1.0 + 1e-12));
    }
}

fn arb_instance() -> impl Strategy<Value = (usize, usize, u64, Vec<usize>)> {
    (1usize..=8, 1usize..=3, any::<u64>()).prop_flat_map(|(k, tau, seed)| {
        (
            Just(k),
            Just(tau),
            Just(seed),
            prop::collection::vec(0..k, 1..24),
        )
    })
}

proptest! {
    #[test]
    fn weighted_equals_unweighted((k, tau, seed, draws) in arb_instance()) {
        let a = skewed(3, k * tau, k, true, seed);
        let b = skewed(k * tau, 2, k, false, seed ^ 0xabc);
        let (pa, pb) = (BlockPartition::columns(&a, k).unwrap(), BlockPartition::rows(&b, k).unwrap());
        let dist = compute_distribution(&pa, &pb).unwrap();
        let sample = SampleMultiset::from_draws(k, draws).unwrap();
        let yu = estimate_product(&build_unweighted_sketch(&pa, &pb, dist.pi(), &sample).unwrap());
        let yw = estimate_product(&build_weighted_sketch(&pa, &pb, dist.pi(), &sample).unwrap());
        prop_assert!(yw.relative_error(&yu).unwrap() <= 1e-12);
    }

    #[test]
    fn multiset_invariants(k in 1usize..20, draws in prop::collection::vec(0usize..20, 1..50)) {
        let draws: Vec<usize> = draws.into_iter().map(|d| d % k).collect();
        let s = SampleMultiset::from_draws(k, draws.clone()).unwrap();
        let w = s.restricted_weights();
        prop_assert_eq!(w.iter().sum::<u64>() as usize, s.total_draws());
        prop_assert_eq!(w.len(), s.t());
        prop_assert!(w.iter().all(|&x| x > 0));
        for i in 0..k {
            prop_assert_eq!(s.weights()[i] > 0, s.distinct().contains(&i));
        }
    }

    #[test]
    fn submultiplicative(seed in any::<u64>(), l in 1usize..6, n in 1usize..6, m in 1usize..6) {
        let a = skewed(l, n, 1, true, seed);
        let b = skewed(n, m, 1, false, seed.wrapping_add(1));
        let ab = matmul(&a, &b).unwrap();
        prop_assert!(ab.frobenius_norm() <= a.frobenius_norm() * b.frobenius_norm() * (1.0 + 1e-12));
    }
}
