use crate::error::{Error, Result};
use crate::frechet::target::check_weights;
use crate::metrics::{d_shape_squared, Metric};
use crate::par::map_indices;
use crate::shape::FMatrix;

/// `sum_k w_k d(y_k, mean)^2`; uniform weights when `weights` is `None`.
pub fn frechet_variance(support: &[FMatrix], weights: Option<&[f64]>, mean: &FMatrix, metric: Metric) -> Result<f64> {
    if support.is_empty() {
        return Err(Error::EmptySample);
    }
    let uniform;
    let weights = match weights {
        Some(w) => {
            check_weights(support.len(), w)?;
            w
        }
        None => {
            uniform = vec![1.0 / support.len() as f64; support.len()];
            &uniform
        }
    };
    let mut total = 0.0;
    for (y, w) in support.iter().zip(weights) {
        total += w * d_shape_squared(y, mean, metric)?;
    }
    Ok(total)
}

/// In-sample minimizer of `sum_j sq_dist(x, y_j)`: returns its index
/// (lowest index on ties) and the minimal sum.
pub fn medoid_by<T, F>(items: &[T], parallel: bool, sq_dist: F) -> Result<(usize, f64)>
where
    T: Sync,
    F: Fn(&T, &T) -> Result<f64> + Sync + Send,
{
    if items.is_empty() {
        return Err(Error::EmptySample);
    }
    let sums = map_indices(items.len(), parallel, |i| {
        items.iter().map(|y| sq_dist(&items[i], y)).sum::<Result<f64>>()
    });
    let mut best = (0usize, f64::INFINITY);
    for (i, s) in sums.into_iter().enumerate() {
        let s = s?;
        if s < best.1 {
            best = (i, s);
        }
    }
    Ok(best)
}

/// Restricted Fréchet mean of a shape sample.
pub fn medoid(sample: &[FMatrix], metric: Metric, parallel: bool) -> Result<(usize, f64)> {
    medoid_by(sample, parallel, |a, b| d_shape_squared(a, b, metric))
}
