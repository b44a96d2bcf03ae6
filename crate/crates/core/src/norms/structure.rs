//! Second-order structure functions `S₂(r; U) = ∫₀ᵀ ∫_U |u(x + r, t) − u(x, t)|² dx dt`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::shiftset::ShiftSet;
use crate::error::{Error, Result};
use crate::fields::shift::{grid_offset, shift_sample};
use crate::fields::{Components, RegionWeights, Subdomain};

/// Region over which increments are integrated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegrationRegion {
    /// All of `U` (shifted points stay in the channel because `|r| < dist(U, walls)`).
    Full,
    /// `U ∩ (U − r)`, the Besov convention.
    Overlap,
}

/// `∫ w |f(x + r) − f(x)|²` summed over components.
pub fn increment_energy<C: Components + ?Sized>(f: &C, r: [f64; 2], weights: &RegionWeights) -> Result<f64> {
    let d = *f.domain();
    let (nx, ny) = (d.nx, d.ny);
    let mut total = 0.0;
    match (grid_offset(r[0], d.dx()), grid_offset(r[1], d.dy())) {
        (Some(sx), Some(sy)) => {
            let sx = sx.rem_euclid(nx as i64) as usize;
            for comp in f.components() {
                let data = &comp.data;
                for (i, wx) in weights.wx.iter().enumerate() {
                    if *wx == 0.0 {
                        continue;
                    }
                    let src = ((i + sx) % nx) * ny;
                    let mut s = 0.0;
                    for (j, wy) in weights.wy.iter().enumerate() {
                        let js = j as i64 + sy;
                        if *wy == 0.0 || js < 0 || js >= ny as i64 {
                            continue;
                        }
                        let diff = data[src + js as usize] - data[i * ny + j];
                        s += wy * diff * diff;
                    }
                    total += wx * s;
                }
            }
        }
        _ => {
            for comp in f.components() {
                let sh = shift_sample(comp, r)?;
                let sq: Vec<f64> = sh.field.data.iter().zip(&comp.data).map(|(a, b)| (a - b) * (a - b)).collect();
                total += weights.integrate_masked(&sq, &sh.valid_rows);
            }
        }
    }
    Ok(total)
}

/// Trapezoidal rule over (possibly non-uniform) sample times; a single sample is returned as is.
pub fn trapezoid_in_time(times: &[f64], values: &[f64]) -> f64 {
    if values.len() == 1 {
        return values[0];
    }
    times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureFunctionTable {
    pub region: Subdomain,
    pub shifts: ShiftSet,
    /// `S₂` per entry of `shifts.shifts`.
    pub values: Vec<f64>,
    /// Direction average per magnitude.
    pub averaged: Vec<f64>,
    /// Mean realized `|r|` per magnitude.
    pub radii: Vec<f64>,
    pub time_window: [f64; 2],
    pub n_snapshots: usize,
    pub integration: IntegrationRegion,
}

impl StructureFunctionTable {
    /// `(|r|, S₂)` pairs of the direction-averaged column.
    pub fn averaged_pairs(&self) -> Vec<(f64, f64)> {
        self.radii.iter().copied().zip(self.averaged.iter().copied()).collect()
    }
}

/// Weights for one shift under the chosen integration convention.
pub fn region_weights_for(
    domain: &crate::fields::DomainSpec,
    region: &Subdomain,
    r: [f64; 2],
    mode: IntegrationRegion,
) -> Result<RegionWeights> {
    match mode {
        IntegrationRegion::Full => RegionWeights::new(domain, region),
        IntegrationRegion::Overlap => {
            let ov = region.overlap_with_shift(domain, r).ok_or_else(|| {
                Error::InvalidArgument(format!("U ∩ (U − r) is empty for r = {r:?}"))
            })?;
            Ok(RegionWeights::partial(domain, &ov))
        }
    }
}

/// `S₂(r; U)` over a snapshot series, trapezoidal in time.
pub fn structure_function<C: Components + Sync>(
    snapshots: &[C],
    region: &Subdomain,
    shifts: &ShiftSet,
    mode: IntegrationRegion,
) -> Result<StructureFunctionTable> {
    let first = snapshots
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty snapshot series".into()))?;
    let domain = *first.domain();
    if snapshots.iter().any(|s| !s.domain().same_grid(&domain)) {
        return Err(Error::InvalidArgument("snapshots do not share one grid".into()));
    }
    region.validate(&domain)?;
    shifts.validate_for(&domain, region)?;
    let times: Vec<f64> = snapshots.iter().map(|s| s.time()).collect();
    let values = shifts
        .shifts
        .par_iter()
        .map(|sh| {
            let w = region_weights_for(&domain, region, sh.r, mode)?;
            let per_t = snapshots
                .iter()
                .map(|s| increment_energy(s, sh.r, &w))
                .collect::<Result<Vec<f64>>>()?;
            Ok(trapezoid_in_time(&times, &per_t))
        })
        .collect::<Result<Vec<f64>>>()?;
    let m = shifts.magnitudes.len();
    let mut averaged = vec![0.0; m];
    let mut radii = vec![0.0; m];
    let mut counts = vec![0usize; m];
    for (sh, v) in shifts.shifts.iter().zip(&values) {
        averaged[sh.magnitude] += v;
        radii[sh.magnitude] += sh.norm();
        counts[sh.magnitude] += 1;
    }
    for k in 0..m {
        averaged[k] /= counts[k] as f64;
        radii[k] /= counts[k] as f64;
    }
    Ok(StructureFunctionTable {
        region: *region,
        shifts: shifts.clone(),
        values,
        averaged,
        radii,
        time_window: [times[0], *times.last().unwrap()],
        n_snapshots: snapshots.len(),
        integration: mode,
    })
}
