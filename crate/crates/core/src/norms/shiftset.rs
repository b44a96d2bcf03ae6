use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{DomainSpec, Subdomain};

/// One displacement of a [`ShiftSet`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Shift {
    pub direction: usize,
    pub magnitude: usize,
    pub r: [f64; 2],
}

impl Shift {
    pub fn norm(&self) -> f64 {
        self.r[0].hypot(self.r[1])
    }
}

/// Displacements `r = |r| e` for unit directions `e` and increasing nominal magnitudes.
///
/// Each vector is snapped to a grid displacement (toward zero), so sampling is exact and the
/// realized length never exceeds the nominal magnitude.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftSet {
    pub directions: Vec<[f64; 2]>,
    pub magnitudes: Vec<f64>,
    pub shifts: Vec<Shift>,
}

/// Nearest integer when within round-off, otherwise rounded toward zero (so `|r| ≤ m`).
fn snap(q: f64) -> f64 {
    let n = q.round();
    if (q - n).abs() < 1e-9 {
        n
    } else {
        q.trunc()
    }
}

/// The four axis directions.
pub fn axis_directions() -> Vec<[f64; 2]> {
    vec![[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]
}

/// Axes and diagonals.
pub fn eight_directions() -> Vec<[f64; 2]> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut d = axis_directions();
    d.extend([[s, s], [-s, s], [-s, -s], [s, -s]]);
    d
}

impl ShiftSet {
    pub fn new(domain: &DomainSpec, directions: Vec<[f64; 2]>, magnitudes: Vec<f64>) -> Result<Self> {
        if directions.is_empty() || magnitudes.is_empty() {
            return Err(Error::InvalidArgument("shift set needs directions and magnitudes".into()));
        }
        if magnitudes.windows(2).any(|w| w[1] <= w[0]) || magnitudes[0] <= 0.0 {
            return Err(Error::InvalidArgument("shift magnitudes must be positive and strictly increasing".into()));
        }
        let (dx, dy) = (domain.dx(), domain.dy());
        let mut shifts = Vec::with_capacity(directions.len() * magnitudes.len());
        for (di, e) in directions.iter().enumerate() {
            let n = e[0].hypot(e[1]);
            for (mi, m) in magnitudes.iter().enumerate() {
                let r = [snap(m * e[0] / n / dx) * dx, snap(m * e[1] / n / dy) * dy];
                shifts.push(Shift {
                    direction: di,
                    magnitude: mi,
                    r,
                });
            }
        }
        Ok(ShiftSet {
            directions,
            magnitudes,
            shifts,
        })
    }

    /// `count` log-spaced grid multiples of `h = min(Δx, Δy)` from `h` to `0.95 · margin(U)`,
    /// also kept below the extent of `U` so that `U ∩ (U − r)` is never empty.
    pub fn log_spaced(domain: &DomainSpec, region: &Subdomain, count: usize, directions: Vec<[f64; 2]>) -> Result<Self> {
        region.validate(domain)?;
        let mut extent = region.y_hi - region.y_lo;
        if !region.is_full_strip(domain) {
            extent = extent.min(region.width(domain));
        }
        let r_max = 0.95 * region.margin(domain).min(extent);
        let h = domain.dx().min(domain.dy());
        if r_max < h {
            return Err(Error::Subdomain(format!(
                "margin {} leaves no grid-aligned shift",
                region.margin(domain)
            )));
        }
        ShiftSet::log_spaced_range(domain, h, r_max, count, directions)
    }

    /// `count` log-spaced multiples of `h = min(Δx, Δy)` between `r_min` and `r_max`
    /// (rounded to the nearest multiple, duplicates dropped).
    pub fn log_spaced_range(
        domain: &DomainSpec,
        r_min: f64,
        r_max: f64,
        count: usize,
        directions: Vec<[f64; 2]>,
    ) -> Result<Self> {
        let h = domain.dx().min(domain.dy());
        let n_min = (r_min / h).round().max(1.0);
        let n_max = (r_max / h).floor();
        if n_max < n_min {
            return Err(Error::InvalidArgument(format!("no grid multiple of {h} in [{r_min}, {r_max}]")));
        }
        let mut mult: Vec<usize> = (0..count.max(1))
            .map(|k| {
                let t = if count > 1 { k as f64 / (count - 1) as f64 } else { 0.0 };
                (n_min * (n_max / n_min).powf(t)).round() as usize
            })
            .collect();
        mult.dedup();
        let magnitudes = mult.into_iter().map(|n| n as f64 * h).collect();
        ShiftSet::new(domain, directions, magnitudes)
    }

    /// Eight-direction default with 12 magnitudes.
    pub fn default_for(domain: &DomainSpec, region: &Subdomain) -> Result<Self> {
        ShiftSet::log_spaced(domain, region, 12, eight_directions())
    }

    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }

    /// Checks `|r_y| < margin(U)` for every shift, so shifted points of `U` stay in the channel.
    pub fn validate_for(&self, domain: &DomainSpec, region: &Subdomain) -> Result<()> {
        let margin = region.margin(domain);
        for s in &self.shifts {
            if s.norm() >= margin {
                return Err(Error::InvalidArgument(format!(
                    "shift |r| = {} not below dist(U, walls) = {}",
                    s.norm(),
                    margin
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::BcKind;
    use std::f64::consts::PI;

    #[test]
    fn log_spaced_is_increasing_and_inside_margin() {
        let d = DomainSpec::new(2.0 * PI, PI, 128, 65, 1.0, BcKind::NoSlip).unwrap();
        let u = Subdomain::strip(&d, 0.25 * PI, 0.75 * PI);
        let s = ShiftSet::default_for(&d, &u).unwrap();
        assert!(s.magnitudes.windows(2).all(|w| w[1] > w[0]));
        assert!(s.magnitudes.len() >= 8);
        s.validate_for(&d, &u).unwrap();
        assert_eq!(s.len(), 8 * s.magnitudes.len());
        assert!((s.magnitudes[0] - d.dx()).abs() < 1e-15);
    }
}
