//! Quadrature restricted to a rectangular subdomain.
//!
//! Node weights are integrals of the piecewise-linear hat functions over the region, so a
//! node deep inside gets the full cell weight, edge nodes get partial weights, and the
//! weights of a constant sum to the exact region length on each axis.

use super::domain::{DomainSpec, Subdomain};
use super::field::ScalarField;
use crate::error::{Error, Result};

/// `∫_{-∞}^{t}` of the unit hat supported on `[-1, 1]`.
fn hat_cdf(t: f64) -> f64 {
    if t <= -1.0 {
        0.0
    } else if t <= 0.0 {
        0.5 * (1.0 + t) * (1.0 + t)
    } else if t < 1.0 {
        1.0 - 0.5 * (1.0 - t) * (1.0 - t)
    } else {
        1.0
    }
}

fn hat_weight(node: f64, h: f64, a: f64, b: f64) -> f64 {
    h * (hat_cdf((b - node) / h) - hat_cdf((a - node) / h))
}

/// Weights of the bounded-axis hats (`y`), clipped to `[0, len]`.
pub fn hat_weights_bounded(a: f64, b: f64, n: usize, len: f64) -> Vec<f64> {
    let h = len / (n - 1) as f64;
    let (a, b) = (a.max(0.0), b.min(len));
    (0..n).map(|j| hat_weight(j as f64 * h, h, a, b)).collect()
}

/// Weights of the periodic-axis hats (`x`, period `len`, `n` nodes).
pub fn hat_weights_periodic(a: f64, b: f64, n: usize, len: f64) -> Vec<f64> {
    let h = len / n as f64;
    if b - a >= len * (1.0 - 1e-12) {
        return vec![h; n];
    }
    let shift = (a / len).floor() * len;
    let (a, b) = (a - shift, b - shift);
    (0..n)
        .map(|i| {
            let x = i as f64 * h;
            [-len, 0.0, len, 2.0 * len]
                .iter()
                .map(|off| hat_weight(x + off, h, a, b))
                .sum()
        })
        .collect()
}

/// Tensor-product quadrature weights for a subdomain.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionWeights {
    pub domain: DomainSpec,
    pub region: Subdomain,
    pub wx: Vec<f64>,
    pub wy: Vec<f64>,
}

impl RegionWeights {
    pub fn new(domain: &DomainSpec, region: &Subdomain) -> Result<Self> {
        region.validate(domain)?;
        let inside_x = (0..domain.nx).any(|i| {
            let x = domain.x(i);
            let off = ((x - region.x_lo) / domain.lx).floor() * domain.lx;
            let xs = x - off;
            region.is_full_strip(domain) || (xs > region.x_lo && xs < region.x_hi)
        });
        let inside_y = (0..domain.ny).any(|j| {
            let y = domain.y(j);
            y > region.y_lo && y < region.y_hi
        });
        if !(inside_x && inside_y) {
            return Err(Error::Subdomain(format!(
                "region {:?} contains no grid nodes",
                region
            )));
        }
        Ok(RegionWeights::partial(domain, region))
    }

    /// Weights without the node-containment check; regions thinner than a cell get the
    /// partial hat weights of their neighbours.
    pub fn partial(domain: &DomainSpec, region: &Subdomain) -> Self {
        let wx = if region.is_full_strip(domain) {
            vec![domain.dx(); domain.nx]
        } else {
            hat_weights_periodic(region.x_lo, region.x_hi, domain.nx, domain.lx)
        };
        let wy = hat_weights_bounded(region.y_lo, region.y_hi, domain.ny, domain.h);
        RegionWeights {
            domain: *domain,
            region: *region,
            wx,
            wy,
        }
    }

    /// Sum of all weights, equal to the region area up to round-off.
    pub fn measure(&self) -> f64 {
        self.wx.iter().sum::<f64>() * self.wy.iter().sum::<f64>()
    }

    pub fn integrate(&self, data: &[f64]) -> f64 {
        self.integrate_map(data, |v| v)
    }

    pub fn integrate_map(&self, data: &[f64], g: impl Fn(f64) -> f64) -> f64 {
        let ny = self.domain.ny;
        let mut total = 0.0;
        for (i, wx) in self.wx.iter().enumerate() {
            if *wx == 0.0 {
                continue;
            }
            let col = &data[i * ny..(i + 1) * ny];
            let mut s = 0.0;
            for (v, wy) in col.iter().zip(&self.wy) {
                if *wy != 0.0 {
                    s += wy * g(*v);
                }
            }
            total += wx * s;
        }
        total
    }

    /// Integral restricted to rows flagged valid.
    pub fn integrate_masked(&self, data: &[f64], valid_rows: &[bool]) -> f64 {
        let ny = self.domain.ny;
        let mut total = 0.0;
        for (i, wx) in self.wx.iter().enumerate() {
            if *wx == 0.0 {
                continue;
            }
            let mut s = 0.0;
            for j in 0..ny {
                if valid_rows[j] && self.wy[j] != 0.0 {
                    s += self.wy[j] * data[i * ny + j];
                }
            }
            total += wx * s;
        }
        total
    }
}

/// A field seen through the quadrature of a subdomain.
#[derive(Clone, Debug)]
pub struct RestrictedView<'a> {
    pub field: &'a ScalarField,
    pub weights: RegionWeights,
}

impl RestrictedView<'_> {
    pub fn integral(&self) -> f64 {
        self.weights.integrate(&self.field.data)
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.weights.integrate_map(&self.field.data, |v| v * v)
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        self.weights
            .integrate_map(&self.field.data, |v| v.abs().powf(p))
            .powf(1.0 / p)
    }
}

/// Restricts `f` to `U` for integration.
pub fn restrict<'a>(f: &'a ScalarField, region: &Subdomain) -> Result<RestrictedView<'a>> {
    Ok(RestrictedView {
        field: f,
        weights: RegionWeights::new(&f.domain, region)?,
    })
}
