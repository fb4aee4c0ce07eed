use crate::error::Result;
use crate::frechet::anneal::{anneal, tie_tolerance, SaConfig, SaResult};
use crate::frechet::landscape::IsoLandscape;
use crate::frechet::target::Objective;
use crate::par::map_slice;
use crate::shape::{enumerate_shapes_capped, FMatrix, RankedShapeCode};

/// All minimizers of an objective, in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactMean {
    pub means: Vec<FMatrix>,
    pub energy: f64,
}

impl ExactMean {
    /// The representative used downstream: the first mean in canonical order.
    pub fn first(&self) -> &FMatrix {
        &self.means[0]
    }
}

/// Scans every shape with `n` leaves and keeps those within the tie
/// tolerance of the minimum energy.
pub fn frechet_mean_exact_by<F>(n: usize, cap: usize, parallel: bool, energy: F) -> Result<ExactMean>
where
    F: Fn(&FMatrix) -> f64 + Sync + Send,
{
    let shapes = enumerate_shapes_capped(n, cap)?;
    let energies = map_slice(&shapes, parallel, &energy);
    let min = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let tol = tie_tolerance(min);
    let mut means: Vec<FMatrix> =
        shapes.into_iter().zip(&energies).filter(|(_, &e)| e <= min + tol).map(|(f, _)| f).collect();
    means.sort();
    Ok(ExactMean { means, energy: min })
}

/// Exact Fréchet mean set for an objective.
pub fn frechet_mean_exact(objective: &Objective, cap: usize, parallel: bool) -> Result<ExactMean> {
    frechet_mean_exact_by(objective.leaves(), cap, parallel, |f| objective.energy(f))
}

/// Fréchet mean by simulated annealing, starting from `initial` (the
/// caterpillar by default).
pub fn frechet_mean_sa(
    objective: &Objective,
    initial: Option<&RankedShapeCode>,
    config: &SaConfig,
) -> Result<SaResult<RankedShapeCode>> {
    let land = IsoLandscape::new(objective);
    let start = match initial {
        Some(c) => {
            crate::metrics::check_same(objective.leaves(), c.leaves())?;
            c.clone()
        }
        None => RankedShapeCode::caterpillar(objective.leaves()),
    };
    let res = anneal(&land, &land.state(&start), config)?;
    Ok(res.map(|s| s.code()))
}
