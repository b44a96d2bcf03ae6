//! Localized `H^s` norms: multiply by a cutoff, extend by zero to the periodic box
//! `[0, Lx) × [0, 2H)` and weigh Fourier coefficients by `(1 + |k|²)^s`.

use super::cutoff::Cutoff;
use super::report::{NormDetail, NormKind, NormReport};
use super::structure::trapezoid_in_time;
use crate::error::{Error, Result};
use crate::fields::spectral::{fft2_real, signed_mode};
use crate::fields::{Components, DomainSpec};

fn check_s(s: f64) -> Result<()> {
    if !(s > -2.0 && s < 1.0) {
        return Err(Error::InvalidArgument(format!("Sobolev exponent s = {s} outside (-2, 1)")));
    }
    Ok(())
}

/// Rows of the extension box: `2 (ny − 1)`, grid spacing unchanged.
pub fn box_rows(domain: &DomainSpec) -> usize {
    2 * (domain.ny - 1)
}

/// Zero extension of channel data to the box; rejects data that does not vanish on the walls.
pub fn zero_extend(domain: &DomainSpec, data: &[f64]) -> Result<Vec<f64>> {
    let (nx, ny) = (domain.nx, domain.ny);
    let nb = box_rows(domain);
    let mut out = vec![0.0; nx * nb];
    for i in 0..nx {
        let col = &data[i * ny..(i + 1) * ny];
        if col[0] != 0.0 || col[ny - 1] != 0.0 {
            return Err(Error::InvalidArgument(format!(
                "cutoff field touches the extension seam at column {i}"
            )));
        }
        out[i * nb..i * nb + ny].copy_from_slice(col);
    }
    Ok(out)
}

/// `Σ (1 + |k|²)^s |ĝ_k|² · ΔxΔy / N` with shell contributions (unit-width shells in `|k|`).
pub fn box_sobolev_sq(domain: &DomainSpec, box_data: &[f64], s: f64) -> (f64, Vec<f64>) {
    let nx = domain.nx;
    let nb = box_rows(domain);
    let spec = fft2_real(box_data, nx, nb);
    let scale = domain.dx() * domain.dy() / (nx * nb) as f64;
    let mut shells: Vec<f64> = Vec::new();
    let mut total = 0.0;
    for m in 0..nx {
        let kx = 2.0 * std::f64::consts::PI * signed_mode(m, nx) as f64 / domain.lx;
        for n in 0..nb {
            let ky = std::f64::consts::PI * signed_mode(n, nb) as f64 / domain.h;
            let k2 = kx * kx + ky * ky;
            let c = (1.0 + k2).powf(s) * spec[m * nb + n].norm_sqr() * scale;
            total += c;
            let shell = k2.sqrt().round() as usize;
            if shells.len() <= shell {
                shells.resize(shell + 1, 0.0);
            }
            shells[shell] += c;
        }
    }
    (total, shells)
}

fn cutoff_sq<C: Components + ?Sized>(f: &C, s: f64, chi: &Cutoff) -> Result<(f64, Vec<f64>)> {
    let d = *f.domain();
    let c = chi.domain();
    if (d.nx, d.ny, d.lx, d.h) != (c.nx, c.ny, c.lx, c.h) {
        return Err(Error::Domain("cutoff and field live on different grids".into()));
    }
    let mut total = 0.0;
    let mut shells: Vec<f64> = Vec::new();
    for comp in f.components() {
        let g = chi.apply(comp);
        let (t, sh) = box_sobolev_sq(&d, &zero_extend(&d, &g.data)?, s);
        total += t;
        if shells.len() < sh.len() {
            shells.resize(sh.len(), 0.0);
        }
        for (a, b) in shells.iter_mut().zip(sh) {
            *a += b;
        }
    }
    Ok((total, shells))
}

fn shell_details(shells: Vec<f64>) -> Vec<NormDetail> {
    shells
        .into_iter()
        .enumerate()
        .filter(|(_, v)| *v > 0.0)
        .map(|(k, v)| NormDetail { at: k as f64, value: v })
        .collect()
}

/// `‖χ f‖_{H^s}`; vector fields sum the squares of their components.
pub fn sobolev_norm_cutoff<C: Components + ?Sized>(f: &C, s: f64, chi: &Cutoff) -> Result<NormReport> {
    check_s(s)?;
    let (sq, shells) = cutoff_sq(f, s, chi)?;
    Ok(NormReport {
        kind: NormKind::sobolev(s),
        region: chi.outer,
        value: sq.sqrt(),
        details: shell_details(shells),
    })
}

/// `‖χ f‖_{L²(0,T; H^s)}` with the trapezoidal rule in time.
pub fn sobolev_norm_cutoff_spacetime<C: Components>(snapshots: &[C], s: f64, chi: &Cutoff) -> Result<NormReport> {
    check_s(s)?;
    if snapshots.is_empty() {
        return Err(Error::InvalidArgument("empty snapshot series".into()));
    }
    let times: Vec<f64> = snapshots.iter().map(|f| f.time()).collect();
    let per_t = snapshots
        .iter()
        .map(|f| cutoff_sq(f, s, chi).map(|(t, _)| t))
        .collect::<Result<Vec<f64>>>()?;
    Ok(NormReport {
        kind: NormKind::sobolev(s),
        region: chi.outer,
        value: trapezoid_in_time(&times, &per_t).sqrt(),
        details: times
            .iter()
            .zip(&per_t)
            .map(|(t, v)| NormDetail { at: *t, value: v.sqrt() })
            .collect(),
    })
}
