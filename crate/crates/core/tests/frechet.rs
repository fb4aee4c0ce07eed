use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ranked_shapes::frechet::{
    frechet_mean_exact, frechet_mean_exact_by, frechet_mean_sa, frechet_variance, medoid, Objective, SaConfig,
    TargetMatrix,
};
use ranked_shapes::metrics::{d_shape, d_shape_squared, pairwise_distance_matrix, Metric};
use ranked_shapes::models::{sample_blum_francois, yule_pmf, BetaSplit};
use ranked_shapes::shape::{enumerate_shapes, FMatrix};

fn sample(n: usize, m: usize, seed: u64) -> Vec<FMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m).map(|_| sample_blum_francois(n, BetaSplit::YULE, &mut rng).to_fmatrix()).collect()
}

#[test]
fn yule_five_mean_ties() {
    let shapes = enumerate_shapes(5).unwrap();
    let w: Vec<f64> = shapes.iter().map(|f| yule_pmf(&f.to_code())).collect();
    let exact = frechet_mean_exact(&Objective::L2(TargetMatrix::from_weighted(&shapes, &w).unwrap()), 12, true).unwrap();
    let codes: Vec<String> = exact.means.iter().map(|f| f.to_code().to_string()).collect();
    assert_eq!(codes, ["1 2 3 4", "1 2 3 3", "1 2 3 2"]);
}

#[test]
fn d1_mean_matches_direct_scan() {
    let s = sample(6, 30, 3);
    let direct = frechet_mean_exact_by(6, 12, false, |x| s.iter().map(|y| d_shape(x, y, Metric::L1).unwrap().powi(2)).sum())
        .unwrap();
    let via = frechet_mean_exact(&Objective::l1_from_sample(&s).unwrap(), 12, false).unwrap();
    assert_eq!(direct.means, via.means);
    assert!((direct.energy / 30.0 - via.energy).abs() < 1e-9 * via.energy.max(1.0));
}

#[test]
fn medoid_matches_brute_force() {
    let s = sample(8, 40, 11);
    for metric in [Metric::L1, Metric::L2] {
        let (k, sum) = medoid(&s, metric, true).unwrap();
        let sums: Vec<f64> =
            s.iter().map(|x| s.iter().map(|y| d_shape_squared(x, y, metric).unwrap()).sum()).collect();
        let best = sums.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(sum, best);
        assert_eq!(k, sums.iter().position(|&v| v == best).unwrap());
    }
}

#[test]
fn variance_identity() {
    let s = sample(7, 50, 5);
    let target = TargetMatrix::from_sample(&s).unwrap();
    let mean = frechet_mean_exact(&Objective::L2(target.clone()), 12, true).unwrap().first().clone();
    let v = frechet_variance(&s, None, &mean, Metric::L2).unwrap();
    let spread: f64 = s.iter().map(|f| f.to_f64().iter().map(|x| x * x).sum::<f64>()).sum::<f64>() / 50.0
        - target.entries().iter().map(|x| x * x).sum::<f64>();
    assert!((v - (target.energy(&mean) + spread)).abs() < 1e-9);
}

#[test]
fn parallel_equals_sequential() {
    let s = sample(9, 60, 8);
    let objective = Objective::l2_from_sample(&s).unwrap();
    assert_eq!(frechet_mean_exact(&objective, 12, true).unwrap(), frechet_mean_exact(&objective, 12, false).unwrap());
    let d = |a: &FMatrix, b: &FMatrix| d_shape(a, b, Metric::L2);
    assert_eq!(pairwise_distance_matrix(&s, true, d).unwrap(), pairwise_distance_matrix(&s, false, d).unwrap());
    assert_eq!(medoid(&s, Metric::L1, true).unwrap(), medoid(&s, Metric::L1, false).unwrap());
    let cfg = SaConfig { iterations: 5_000, ..SaConfig::with_seed(4) };
    let seq = SaConfig { parallel: false, ..cfg.clone() };
    let (a, b) = (frechet_mean_sa(&objective, None, &cfg).unwrap(), frechet_mean_sa(&objective, None, &seq).unwrap());
    assert_eq!((a.best, a.best_energy), (b.best, b.best_energy));
}

#[test]
fn annealing_finds_exact_mean_at_nine() {
    let s = sample(9, 200, 21);
    let objective = Objective::l2_from_sample(&s).unwrap();
    let exact = frechet_mean_exact(&objective, 12, true).unwrap();
    let sa = frechet_mean_sa(&objective, None, &SaConfig::with_seed(1)).unwrap();
    assert!(exact.means.contains(&sa.best.to_fmatrix()));
    assert!((sa.best_energy - exact.energy).abs() < 1e-9);
}
