use crate::error::{Error, Result};
use crate::simulate::PathSample;

/// Largest grid spacing accepted by [`ou_invert`].
pub const OU_MAX_DT: f64 = 0.1;

/// Driving increments of an OU process `dY = -Y dt + dX` read off a sampled
/// path: `ΔX̂_i = y_{i+1} - y_i + y_i dt`.
pub fn ou_invert(y: &PathSample) -> Result<Vec<f64>> {
    let dt = y.grid.dt();
    if dt > OU_MAX_DT {
        return Err(Error::GridTooCoarse { dt, max: OU_MAX_DT });
    }
    Ok(y.values.windows(2).map(|w| w[1] - w[0] + w[0] * dt).collect())
}
