use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ranked_shapes::metrics::{d1_exact, d2_squared_exact, d_shape, Metric};
use ranked_shapes::models::{sample_blum_francois, BetaSplit};
use ranked_shapes::shape::{validate_code, validate_fmatrix, DMatrix, FMatrix, RankedShapeCode};

fn shape(n: usize, seed: u64) -> FMatrix {
    let beta = BetaSplit::new([0.0, -0.5, 3.0][(seed % 3) as usize]).unwrap();
    sample_blum_francois(n, beta, &mut ChaCha8Rng::seed_from_u64(seed)).to_fmatrix()
}

proptest! {
    #[test]
    fn code_fmatrix_round_trip(n in 2usize..40, seed in any::<u64>()) {
        let f = shape(n, seed);
        let code = f.to_code();
        prop_assert!(validate_code(code.as_slice()).is_ok());
        prop_assert!(validate_fmatrix(&f.to_rows()).is_ok());
        prop_assert_eq!(code.to_fmatrix(), f.clone());
        prop_assert_eq!(DMatrix::from_code(&code).to_fmatrix(), f.clone());
        prop_assert_eq!(FMatrix::from_rows(&f.to_rows()).unwrap(), f);
    }

    #[test]
    fn metric_axioms(n in 3usize..30, s in any::<[u64; 3]>()) {
        let (x, y, z) = (shape(n, s[0]), shape(n, s[1]), shape(n, s[2]));
        for metric in [Metric::L1, Metric::L2] {
            let d = |a: &FMatrix, b: &FMatrix| d_shape(a, b, metric).unwrap();
            prop_assert_eq!(d(&x, &x), 0.0);
            prop_assert_eq!(d(&x, &y), d(&y, &x));
            prop_assert_eq!(d(&x, &y) == 0.0, x == y);
            prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z) + 1e-9);
        }
    }

    #[test]
    fn d2_below_d1_below_d2_squared(n in 3usize..30, s in any::<[u64; 2]>()) {
        let (x, y) = (shape(n, s[0]), shape(n, s[1]));
        let d1 = d1_exact(&x, &y);
        let d2sq = d2_squared_exact(&x, &y);
        prop_assert!(d1 * d1 >= d2sq);
        prop_assert!(d1 <= d2sq);
    }
}

#[test]
fn invalid_codes_are_rejected() {
    assert!(RankedShapeCode::new(vec![1, 3, 2]).is_err());
    assert!(RankedShapeCode::new(vec![1, 2, 2, 2]).is_err());
    assert!(RankedShapeCode::new(vec![2, 2]).is_err());
    assert!(FMatrix::from_rows(&[vec![2], vec![1, 2]]).is_err());
}

#[test]
fn caterpillar_and_balanced_at_five() {
    assert_eq!(FMatrix::unbalanced(5).to_code().as_slice(), &[1, 2, 3, 4]);
    assert_eq!(FMatrix::balanced(4).to_code().as_slice(), &[1, 2, 2]);
    let f = FMatrix::unbalanced(5);
    assert_eq!(f.to_rows(), vec![vec![2], vec![1, 3], vec![1, 2, 4], vec![1, 2, 3, 5]]);
}
