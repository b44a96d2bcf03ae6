//! Solenoidal space-time test fields `φ = ∇⊥ψ` with bump-product stream functions, weak
//! pairings `∫∫ u·φ` and weak-form residuals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::bump::{bump, bump_deriv, bump_deriv2};
use crate::fields::spectral::XTransform;
use crate::fields::{ops, DomainSpec, VelocityField};
use crate::norms::trapezoid_in_time;

/// `ψ(x, y, t) = B((x − x_c)/ρ) B((y − y_c)/ρ) B((t − t_c)/τ)` with `x` periodic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestField {
    pub center: [f64; 3],
    pub rho: f64,
    pub tau: f64,
}

/// `φ`, `∂_t φ` and `∇φ` sampled on the grid at one time; `grad = [∂xφ₁, ∂yφ₁, ∂xφ₂, ∂yφ₂]`.
#[derive(Clone, Debug)]
pub struct TestSlice {
    pub phi: [Vec<f64>; 2],
    pub dphi_dt: [Vec<f64>; 2],
    pub grad: [Vec<f64>; 4],
}

impl TestField {
    fn offset_x(&self, domain: &DomainSpec, x: f64) -> f64 {
        let l = domain.lx;
        (x - self.center[0] + 0.5 * l).rem_euclid(l) - 0.5 * l
    }

    pub fn support_t(&self) -> [f64; 2] {
        [self.center[2] - self.tau, self.center[2] + self.tau]
    }

    /// Samples at time `t`; `None` outside the time support.
    pub fn sample(&self, domain: &DomainSpec, t: f64) -> Option<TestSlice> {
        let st = (t - self.center[2]) / self.tau;
        let (bt, bt1) = (bump(st), bump_deriv(st) / self.tau);
        if bt == 0.0 && bt1 == 0.0 {
            return None;
        }
        let n = domain.len();
        let ny = domain.ny;
        let z = || vec![0.0; n];
        let mut s = TestSlice {
            phi: [z(), z()],
            dphi_dt: [z(), z()],
            grad: [z(), z(), z(), z()],
        };
        let r = self.rho;
        let ys: Vec<[f64; 3]> = (0..ny)
            .map(|j| {
                let a = (domain.y(j) - self.center[1]) / r;
                [bump(a), bump_deriv(a) / r, bump_deriv2(a) / (r * r)]
            })
            .collect();
        for i in 0..domain.nx {
            let a = self.offset_x(domain, domain.x(i)) / r;
            if a.abs() >= 1.0 {
                continue;
            }
            let (bx, bx1, bx2) = (bump(a), bump_deriv(a) / r, bump_deriv2(a) / (r * r));
            for (j, &[by, by1, by2]) in ys.iter().enumerate() {
                if by == 0.0 && by1 == 0.0 {
                    continue;
                }
                let k = i * ny + j;
                let p1 = bx * by1;
                let p2 = -bx1 * by;
                s.phi[0][k] = p1 * bt;
                s.phi[1][k] = p2 * bt;
                s.dphi_dt[0][k] = p1 * bt1;
                s.dphi_dt[1][k] = p2 * bt1;
                let pxy = bx1 * by1 * bt;
                s.grad[0][k] = pxy;
                s.grad[1][k] = bx * by2 * bt;
                s.grad[2][k] = -bx2 * by * bt;
                s.grad[3][k] = -pxy;
            }
        }
        Some(s)
    }

    /// `max |φ| + max |∇φ|` (Frobenius), attained at the time center.
    pub fn w1_inf(&self, domain: &DomainSpec) -> f64 {
        let s = self.sample(domain, self.center[2]).expect("center lies in the support");
        let n = domain.len();
        let mut m0 = 0.0_f64;
        let mut m1 = 0.0_f64;
        for k in 0..n {
            m0 = m0.max(s.phi[0][k].hypot(s.phi[1][k]));
            let g: f64 = s.grad.iter().map(|c| c[k] * c[k]).sum();
            m1 = m1.max(g.sqrt());
        }
        m0 + m1
    }

    /// Analytic divergence `ψ_xy − ψ_yx` at every node and time sample; zero by construction.
    pub fn max_divergence(&self, domain: &DomainSpec, t: f64) -> f64 {
        self.sample(domain, t)
            .map(|s| {
                s.grad[0]
                    .iter()
                    .zip(&s.grad[3])
                    .map(|(a, b)| (a + b).abs())
                    .fold(0.0, f64::max)
            })
            .unwrap_or(0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFieldBank {
    pub fields: Vec<TestField>,
}

impl TestFieldBank {
    /// 4 space centers × 3 time windows: `x_c = (2k + 1) Lx / 8`, `y_c` alternating between
    /// `0.4 H` and `0.6 H`, `ρ = 0.3 H`; `t_c ∈ {T/4, T/2, 3T/4}`, `τ = T/5`.
    pub fn standard(domain: &DomainSpec, t_final: f64) -> Self {
        Self::with_widths(domain, t_final, 0.3, 0.2)
    }

    /// Same layout with `ρ = rho_frac · H` and `τ = tau_frac · T`.
    pub fn with_widths(domain: &DomainSpec, t_final: f64, rho_frac: f64, tau_frac: f64) -> Self {
        let mut fields = Vec::with_capacity(12);
        for tc in [0.25, 0.5, 0.75] {
            for k in 0..4 {
                let y = if k % 2 == 0 { 0.4 } else { 0.6 };
                fields.push(TestField {
                    center: [(2 * k + 1) as f64 * domain.lx / 8.0, y * domain.h, tc * t_final],
                    rho: rho_frac * domain.h,
                    tau: tau_frac * t_final,
                });
            }
        }
        TestFieldBank { fields }
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    /// Supports at least two cells from the walls and `time_margin` inside `[t0, t1]`.
    pub fn validate(&self, domain: &DomainSpec, t0: f64, t1: f64, time_margin: f64) -> Result<()> {
        let gap = 2.0 * domain.dy();
        for (j, f) in self.fields.iter().enumerate() {
            let [_, yc, _] = f.center;
            let [ta, tb] = f.support_t();
            if yc - f.rho < gap || yc + f.rho > domain.h - gap || 2.0 * f.rho >= domain.lx {
                return Err(Error::InvalidArgument(format!(
                    "test field {j}: spatial support within two cells of a wall"
                )));
            }
            if ta < t0 + time_margin * (1.0 - 1e-9) || tb > t1 - time_margin * (1.0 - 1e-9) {
                return Err(Error::InvalidArgument(format!(
                    "test field {j}: time support [{ta}, {tb}] not inside [{t0}, {t1}] with margin {time_margin}"
                )));
            }
        }
        Ok(())
    }
}

fn inner(domain: &DomainSpec, wy: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ny = domain.ny;
    domain.dx() * a.iter().zip(b).enumerate().map(|(k, (x, y))| wy[k % ny] * x * y).sum::<f64>()
}

fn times_of(snapshots: &[VelocityField]) -> Result<Vec<f64>> {
    if snapshots.is_empty() {
        return Err(Error::InvalidArgument("empty snapshot series".into()));
    }
    Ok(snapshots.iter().map(|s| s.time()).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairingMatrix {
    pub times: Vec<f64>,
    /// `⟨u(t_k), φ_j(t_k)⟩` as `rows[j][k]`.
    pub rows: Vec<Vec<f64>>,
    /// `∫₀ᵀ ⟨u, φ_j⟩ dt`.
    pub totals: Vec<f64>,
    /// `‖φ_j‖_{L²L²}` with the same quadrature.
    pub phi_l2l2: Vec<f64>,
    /// `‖u‖_{L²L²}`.
    pub u_l2l2: f64,
}

pub fn weak_pairing(snapshots: &[VelocityField], bank: &TestFieldBank) -> Result<PairingMatrix> {
    let times = times_of(snapshots)?;
    let d = *snapshots[0].domain();
    bank.validate(&d, times[0], times[times.len() - 1], 0.0)?;
    let wy = d.y_weights();
    let mut rows = Vec::with_capacity(bank.len());
    let mut phi_l2l2 = Vec::with_capacity(bank.len());
    for f in &bank.fields {
        let mut row = Vec::with_capacity(times.len());
        let mut nn = Vec::with_capacity(times.len());
        for s in snapshots {
            match f.sample(&d, s.time()) {
                Some(sl) => {
                    row.push(inner(&d, &wy, &s.u.data, &sl.phi[0]) + inner(&d, &wy, &s.v.data, &sl.phi[1]));
                    nn.push(inner(&d, &wy, &sl.phi[0], &sl.phi[0]) + inner(&d, &wy, &sl.phi[1], &sl.phi[1]));
                }
                None => {
                    row.push(0.0);
                    nn.push(0.0);
                }
            }
        }
        phi_l2l2.push(trapezoid_in_time(&times, &nn).sqrt());
        rows.push(row);
    }
    let totals = rows.iter().map(|r| trapezoid_in_time(&times, r)).collect();
    let usq: Vec<f64> = snapshots.iter().map(|s| s.dot(s)).collect();
    Ok(PairingMatrix {
        u_l2l2: trapezoid_in_time(&times, &usq).sqrt(),
        times,
        rows,
        totals,
        phi_l2l2,
    })
}

/// Weak-form residuals per test field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub nu: f64,
    /// `∫∫ u·∂_tφ + u⊗u : ∇φ + f·φ`.
    pub euler: Vec<f64>,
    /// `ν ∫∫ ∇u : ∇φ` with the quadratic form of the discrete diffusion operator.
    pub viscous: Vec<f64>,
    /// `‖∇φ_j‖_{L²L²}` in the same discrete form.
    pub grad_phi_l2l2: Vec<f64>,
    pub phi_w1_inf: Vec<f64>,
    /// `ν ∫₀ᵀ ‖∇u‖²` from the snapshots.
    pub snapshot_dissipation: f64,
    /// `∫₀ᵀ ‖u‖²`.
    pub u_l2l2_sq: f64,
}

impl Residuals {
    pub fn max_abs_viscous(&self) -> f64 {
        self.viscous.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `|R_j − V_j| / (‖φ_j‖_{W^{1,∞}} ∫₀ᵀ‖u‖²)`.
    pub fn scaled_defects(&self) -> Vec<f64> {
        self.euler
            .iter()
            .zip(&self.viscous)
            .zip(&self.phi_w1_inf)
            .map(|((r, v), w)| {
                let scale = w * self.u_l2l2_sq;
                if scale == 0.0 {
                    (r - v).abs()
                } else {
                    (r - v).abs() / scale
                }
            })
            .collect()
    }

    /// Largest `|V_j| / (√ν √D ‖∇φ_j‖)`; at most 1 by Cauchy–Schwarz when `D` is the
    /// snapshot dissipation.
    pub fn cauchy_schwarz_ratio(&self, dissipation: f64) -> f64 {
        self.viscous
            .iter()
            .zip(&self.grad_phi_l2l2)
            .map(|(v, g)| {
                let b = self.nu.sqrt() * dissipation.sqrt() * g;
                if b == 0.0 {
                    if *v == 0.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    v.abs() / b
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Spectral-x / edge-y bilinear form matching [`ops::dirichlet_form`].
fn dirichlet_pair(t: &mut XTransform, d: &DomainSpec, wy: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ny = d.ny;
    let ax = ops::dx_with(t, d, a);
    let bx = ops::dx_with(t, d, b);
    let sx: f64 = ax.iter().zip(&bx).enumerate().map(|(k, (p, q))| wy[k % ny] * p * q).sum();
    let mut sy = 0.0;
    for (ca, cb) in a.chunks(ny).zip(b.chunks(ny)) {
        for j in 0..ny - 1 {
            sy += (ca[j + 1] - ca[j]) * (cb[j + 1] - cb[j]);
        }
    }
    d.dx() * (sx + sy / d.dy())
}

/// `R_j` and `V_j` for every test field. Snapshots must resolve each time window with at
/// least 8 samples per `τ_j` and start and end at least two sampling intervals outside it.
pub fn euler_residual(snapshots: &[VelocityField], forcing: &VelocityField, bank: &TestFieldBank) -> Result<Residuals> {
    let times = times_of(snapshots)?;
    let d = *snapshots[0].domain();
    let nu = snapshots[0].nu;
    let interval = times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let tau_min = bank.fields.iter().map(|f| f.tau).fold(f64::INFINITY, f64::min);
    if times.len() < 2 || interval > tau_min / 8.0 * (1.0 + 1e-9) {
        return Err(Error::Cadence {
            interval,
            required: tau_min / 8.0,
        });
    }
    bank.validate(&d, times[0], times[times.len() - 1], 2.0 * interval)?;
    if (forcing.domain().nx, forcing.domain().ny) != (d.nx, d.ny) {
        return Err(Error::InvalidArgument("forcing and snapshots live on different grids".into()));
    }
    let wy = d.y_weights();
    let mut xt = XTransform::new(d.nx, d.ny);
    let mut euler = Vec::with_capacity(bank.len());
    let mut viscous = Vec::with_capacity(bank.len());
    let mut grad_phi = Vec::with_capacity(bank.len());
    let mut w1 = Vec::with_capacity(bank.len());
    for f in &bank.fields {
        let mut r_t = Vec::with_capacity(times.len());
        let mut v_t = Vec::with_capacity(times.len());
        let mut g_t = Vec::with_capacity(times.len());
        for s in snapshots {
            let Some(sl) = f.sample(&d, s.time()) else {
                r_t.push(0.0);
                v_t.push(0.0);
                g_t.push(0.0);
                continue;
            };
            let (u, v) = (&s.u.data, &s.v.data);
            let ny = d.ny;
            let mut acc = 0.0;
            for k in 0..d.len() {
                let w = wy[k % ny];
                if w == 0.0 {
                    continue;
                }
                let (a, b) = (u[k], v[k]);
                let adv = a * (a * sl.grad[0][k] + b * sl.grad[1][k]) + b * (a * sl.grad[2][k] + b * sl.grad[3][k]);
                let dt = a * sl.dphi_dt[0][k] + b * sl.dphi_dt[1][k];
                let frc = forcing.u.data[k] * sl.phi[0][k] + forcing.v.data[k] * sl.phi[1][k];
                acc += w * (adv + dt + frc);
            }
            r_t.push(acc * d.dx());
            v_t.push(
                nu * (dirichlet_pair(&mut xt, &d, &wy, u, &sl.phi[0]) + dirichlet_pair(&mut xt, &d, &wy, v, &sl.phi[1])),
            );
            g_t.push(
                dirichlet_pair(&mut xt, &d, &wy, &sl.phi[0], &sl.phi[0])
                    + dirichlet_pair(&mut xt, &d, &wy, &sl.phi[1], &sl.phi[1]),
            );
        }
        euler.push(trapezoid_in_time(&times, &r_t));
        viscous.push(trapezoid_in_time(&times, &v_t));
        grad_phi.push(trapezoid_in_time(&times, &g_t).sqrt());
        w1.push(f.w1_inf(&d));
    }
    let diss: Vec<f64> = snapshots.iter().map(|s| nu * ops::velocity_dirichlet(s)).collect();
    let usq: Vec<f64> = snapshots.iter().map(|s| s.dot(s)).collect();
    Ok(Residuals {
        nu,
        euler,
        viscous,
        grad_phi_l2l2: grad_phi,
        phi_w1_inf: w1,
        snapshot_dissipation: trapezoid_in_time(&times, &diss),
        u_l2l2_sq: trapezoid_in_time(&times, &usq),
    })
}
