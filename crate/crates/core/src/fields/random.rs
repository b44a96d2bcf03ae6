//! Seeded random fields with prescribed power-law spectra.
//!
//! Modes are Fourier in x and sine in y, `cos(k_x x + θ) sin(k_y y)` with
//! `k_x = 2π m_x / Lx`, `k_y = π m_y / H`. Phases are drawn for every mode the grid can
//! represent in a fixed order, so the same seed gives the same low modes whatever the band.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bump::{smooth_step, smooth_step_deriv};
use super::domain::DomainSpec;
use super::field::{ScalarField, VelocityField};
use super::ops;
use super::spectral::plan_inverse;
use crate::error::{Error, Result};

/// Band `[k_min, k_max]` of physical wavenumber magnitudes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub k_min: f64,
    pub k_max: f64,
}

impl Band {
    pub fn new(k_min: f64, k_max: f64) -> Self {
        Band { k_min, k_max }
    }

    pub fn validate(&self, domain: &DomainSpec) -> Result<()> {
        let nyquist = std::f64::consts::PI / domain.dx().max(domain.dy());
        if !(self.k_min > 0.0 && self.k_min <= self.k_max) {
            return Err(Error::InvalidArgument(format!(
                "band needs 0 < k_min <= k_max, got [{}, {}]",
                self.k_min, self.k_max
            )));
        }
        if self.k_max > nyquist {
            return Err(Error::InvalidArgument(format!(
                "band limit {} exceeds the grid Nyquist wavenumber {}",
                self.k_max, nyquist
            )));
        }
        Ok(())
    }
}

/// `y` profile paired with each mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum YBasis {
    Sine,
    Cosine,
}

/// `Σ A(|k|) cos(k_x x + θ) sin(k_y y)` over the modes in `band`.
pub fn random_mode_sum(
    domain: &DomainSpec,
    band: Band,
    seed: u64,
    amplitude: impl Fn(f64) -> f64,
) -> Result<ScalarField> {
    mode_sum(domain, band, seed, |k, _, _| Complex64::new(amplitude(k), 0.0), YBasis::Sine)
}

/// Shared mode loop: `Re Σ c(|k|, k_x, k_y) e^{i(k_x x + θ)} Y(k_y y)`.
fn mode_sum(
    domain: &DomainSpec,
    band: Band,
    seed: u64,
    coef_of: impl Fn(f64, f64, f64) -> Complex64,
    basis: YBasis,
) -> Result<ScalarField> {
    band.validate(domain)?;
    let (nx, ny) = (domain.nx, domain.ny);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mx_max = nx / 2;
    let my_max = ny - 1;
    // coefficient table [my][mx]
    let mut coef = vec![Complex64::default(); (my_max + 1) * nx];
    for mx in 0..mx_max {
        for my in 1..my_max {
            let theta = rng.random::<f64>() * 2.0 * std::f64::consts::PI;
            let kx = 2.0 * std::f64::consts::PI * mx as f64 / domain.lx;
            let ky = std::f64::consts::PI * my as f64 / domain.h;
            let k = kx.hypot(ky);
            if k < band.k_min || k > band.k_max {
                continue;
            }
            coef[my * nx + mx] = coef_of(k, kx, ky) * Complex64::from_polar(1.0, theta);
        }
    }
    let ifft = plan_inverse(nx);
    let mut data = vec![0.0; domain.len()];
    let mut buf = vec![Complex64::default(); nx];
    for my in 1..my_max {
        let row = &coef[my * nx..(my + 1) * nx];
        if row.iter().all(|c| c.norm_sqr() == 0.0) {
            continue;
        }
        buf.copy_from_slice(row);
        ifft.process(&mut buf);
        let ky = std::f64::consts::PI * my as f64 / domain.h;
        let sy: Vec<f64> = (0..ny)
            .map(|j| match basis {
                YBasis::Sine => (ky * domain.y(j)).sin(),
                YBasis::Cosine => (ky * domain.y(j)).cos(),
            })
            .collect();
        for i in 0..nx {
            let g = buf[i].re;
            for j in 0..ny {
                data[i * ny + j] += g * sy[j];
            }
        }
    }
    Ok(ScalarField {
        domain: *domain,
        time: 0.0,
        data,
    })
}

/// Flat-top wall window: 1 on `[0.2H, 0.8H]`, vanishing with all derivatives at the walls.
pub fn wall_window(domain: &DomainSpec, y: f64) -> f64 {
    let w = 0.2 * domain.h;
    smooth_step(y / w) * smooth_step((domain.h - y) / w)
}

/// Parameters of a random stream-function spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomSpectrum {
    /// Target structure-function exponent; the velocity energy spectrum decays like `k^{-1-ζ}`.
    pub zeta: f64,
    pub band: Band,
    pub seed: u64,
}

/// Windowed stream function whose velocity has energy spectrum `∝ k^{-1-ζ}` on the band.
///
/// The top octave carries the energy the truncated tail would have held, which keeps the
/// small-scale increments close to the untruncated power law.
fn stream_amplitude(spec: &RandomSpectrum) -> Result<impl Fn(f64) -> f64> {
    if !(spec.zeta > 0.0 && spec.zeta < 2.0) {
        return Err(Error::InvalidArgument(format!("spectral slope ζ = {} outside (0, 2)", spec.zeta)));
    }
    let Band { k_min, k_max } = spec.band;
    let boost = if k_max >= 2.0 * k_min {
        let q = 2f64.powf(spec.zeta);
        (q / (q - 1.0)).sqrt()
    } else {
        1.0
    };
    let zeta = spec.zeta;
    Ok(move |k: f64| {
        let a = k.powf(-2.0 - 0.5 * zeta);
        if k > 0.5 * k_max {
            a * boost
        } else {
            a
        }
    })
}

pub fn random_stream(domain: &DomainSpec, spec: &RandomSpectrum) -> Result<ScalarField> {
    let amp = stream_amplitude(spec)?;
    let mut psi = random_mode_sum(domain, spec.band, spec.seed, amp)?;
    let ny = domain.ny;
    let win: Vec<f64> = (0..ny).map(|j| wall_window(domain, domain.y(j))).collect();
    for (k, v) in psi.data.iter_mut().enumerate() {
        *v *= win[k % ny];
    }
    Ok(psi)
}

/// Derivative of [`wall_window`].
pub fn wall_window_deriv(domain: &DomainSpec, y: f64) -> f64 {
    let w = 0.2 * domain.h;
    let (a, b) = (y / w, (domain.h - y) / w);
    (smooth_step_deriv(a) * smooth_step(b) - smooth_step(a) * smooth_step_deriv(b)) / w
}

/// `∇⊥(ψ W)` sampled pointwise from the exact derivatives of the mode sum and the window.
///
/// Unlike [`random_velocity`] it is not discretely solenoidal, but every mode keeps its
/// amplitude up to the grid Nyquist wavenumber, so increments follow the target spectrum
/// down to the grid scale.
pub fn random_velocity_sampled(domain: &DomainSpec, spec: &RandomSpectrum, nu: f64) -> Result<VelocityField> {
    let amp = stream_amplitude(spec)?;
    let psi = mode_sum(domain, spec.band, spec.seed, |k, _, _| Complex64::new(amp(k), 0.0), YBasis::Sine)?;
    let psi_y = mode_sum(domain, spec.band, spec.seed, |k, _, ky| Complex64::new(amp(k) * ky, 0.0), YBasis::Cosine)?;
    // −∂x cos(k_x x + θ) = k_x sin(k_x x + θ) = Re(−i k_x e^{i(k_x x + θ)})
    let v = mode_sum(domain, spec.band, spec.seed, |k, kx, _| Complex64::new(0.0, -amp(k) * kx), YBasis::Sine)?;
    let ny = domain.ny;
    let win: Vec<f64> = (0..ny).map(|j| wall_window(domain, domain.y(j))).collect();
    let dwin: Vec<f64> = (0..ny).map(|j| wall_window_deriv(domain, domain.y(j))).collect();
    let mut u = psi_y;
    for (k, val) in u.data.iter_mut().enumerate() {
        *val = *val * win[k % ny] + psi.data[k] * dwin[k % ny];
    }
    let mut v = v;
    for (k, val) in v.data.iter_mut().enumerate() {
        *val *= win[k % ny];
    }
    Ok(VelocityField { u, v, nu })
}

/// `∇⊥` of [`random_stream`]: exactly solenoidal, vanishing (to round-off) near the walls.
pub fn random_velocity(domain: &DomainSpec, spec: &RandomSpectrum, nu: f64) -> Result<VelocityField> {
    let psi = random_stream(domain, spec)?;
    Ok(ops::perp_gradient(&psi, nu))
}
