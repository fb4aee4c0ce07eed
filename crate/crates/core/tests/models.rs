use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ranked_shapes::models::{
    blum_francois_pmf, clt_standardize, kingman_mean_entry, sample_coalescent_genealogy, yule_pmf, BetaSplit,
    Covariance, KingmanMoments, PopSize,
};
use ranked_shapes::shape::enumerate_shapes;

#[test]
fn pmfs_sum_to_one() {
    for n in 3..=9 {
        let shapes = enumerate_shapes(n).unwrap();
        for beta in [-1.0, -0.5, 0.0, 2.0, 100.0] {
            let beta = BetaSplit::new(beta).unwrap();
            let total: f64 = shapes.iter().map(|f| blum_francois_pmf(&f.to_code(), beta)).sum();
            assert!((total - 1.0).abs() < 1e-10, "n = {n}, beta = {}: {total}", beta.value());
        }
        let total: f64 = shapes.iter().map(|f| blum_francois_pmf(&f.to_code(), BetaSplit::infinite())).sum();
        assert!((total - 1.0).abs() < 1e-10);
        for f in &shapes {
            let code = f.to_code();
            assert!((yule_pmf(&code) - blum_francois_pmf(&code, BetaSplit::YULE)).abs() < 1e-14);
        }
    }
}

#[test]
fn kingman_six_example() {
    let k = KingmanMoments::new(6).unwrap();
    assert_eq!(k.mean(4, 2), 1.5);
    assert_eq!(kingman_mean_entry(4, 2), 1.5);
    assert_eq!(k.mean(3, 3), 4.0);
}

#[test]
fn clt_residuals_are_standard() {
    let n = 6;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let sample: Vec<_> = (0..4000)
        .map(|_| sample_coalescent_genealogy(n, &PopSize::Constant(1.0), &mut rng).unwrap().fmatrix().clone())
        .collect();
    let r = clt_standardize(&sample, Covariance::Kingman).unwrap();
    // chi-square with `rank` degrees of freedom: mean rank, sd sqrt(2 rank)
    let z = (r.statistic - r.rank as f64) / (2.0 * r.rank as f64).sqrt();
    assert!(z.abs() < 4.0, "statistic {} with rank {}", r.statistic, r.rank);
}

#[test]
fn builtin_population_sizes() {
    for name in ["constant", "exponential", "logistic"] {
        let pop = PopSize::builtin(name).unwrap();
        let g = sample_coalescent_genealogy(10, &pop, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert!(g.times().windows(2).all(|w| w[0] > w[1]));
        assert!(*g.times().last().unwrap() > 0.0);
    }
    assert!(PopSize::builtin("nope").is_err());
}
