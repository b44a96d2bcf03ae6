//! IMEX time stepping: Adams–Bashforth-2 advection, Crank–Nicolson diffusion per x-mode,
//! incremental pressure projection.

use std::collections::HashMap;

use rustfft::num_complex::Complex64;

use super::ledger::{EnergyLedger, LedgerIncrement};
use super::projection::Projector;
use crate::error::{Error, Result};
use crate::fields::linalg::Tridiag;
use crate::fields::ops::{dirichlet_form, dy_column_c, wall_slip_energy};
use crate::fields::spectral::{derivative_factor, hermitian_fill, signed_mode, wavenumber, XTransform};
use crate::fields::{BcKind, DomainSpec, ScalarField, VelocityField};

pub const CFL_MAX: f64 = 0.5;
const MAX_HALVINGS: u32 = 20;

/// Parameters the stepper needs beyond the state.
#[derive(Clone, Debug)]
pub struct StepperConfig {
    pub nu: f64,
    pub forcing: VelocityField,
    /// Rescale the new state whenever the step would create energy beyond the budget.
    pub energy_fix: bool,
    pub advection: AdvectionForm,
}

/// Discrete form of the nonlinear term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdvectionForm {
    /// `div(u ⊗ u)`.
    Conservative,
    /// `½ (div(u ⊗ u) + (u·∇)u)`.
    #[default]
    SkewSymmetric,
}

/// Implicit and explicit diffusion operators for one time step size.
struct CnOps {
    implicit_u: Vec<Tridiag>,
    implicit_v: Vec<Tridiag>,
}

pub struct Stepper {
    domain: DomainSpec,
    nu: f64,
    alpha: f64,
    energy_fix: bool,
    form: AdvectionForm,
    projector: Projector,
    xt: XTransform,
    force: VelocityField,
    force_h: (Vec<Complex64>, Vec<Complex64>),
    state: VelocityField,
    state_h: (Vec<Complex64>, Vec<Complex64>),
    prev_adv: Option<(Vec<Complex64>, Vec<Complex64>, f64)>,
    grad_p: (Vec<Complex64>, Vec<Complex64>),
    cn: HashMap<u64, CnOps>,
    pub ledger: EnergyLedger,
    steps: usize,
    fixes: usize,
    removed: f64,
}

/// Diffusion operator rows for one mode: `(lower, diag, upper)` of `Δ_k`, with the wall rows
/// either Dirichlet (`None` rows, handled by the caller) or the Robin ghost-node form.
fn diffusion_rows(ny: usize, dy: f64, k2: f64, robin_alpha: Option<f64>) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let c = 1.0 / (dy * dy);
    let mut lower = vec![c; ny];
    let mut diag = vec![-2.0 * c - k2; ny];
    let mut upper = vec![c; ny];
    lower[0] = 0.0;
    upper[ny - 1] = 0.0;
    match robin_alpha {
        Some(alpha) => {
            // ghost nodes u_{-1} = u_1 − 2Δy α u_0 and u_{N+1} = u_{N−1} − 2Δy α u_N
            diag[0] = (-2.0 - 2.0 * dy * alpha) * c - k2;
            upper[0] = 2.0 * c;
            diag[ny - 1] = diag[0];
            lower[ny - 1] = 2.0 * c;
        }
        None => {
            diag[0] = 0.0;
            upper[0] = 0.0;
            diag[ny - 1] = 0.0;
            lower[ny - 1] = 0.0;
        }
    }
    (lower, diag, upper)
}

fn apply_rows(rows: &(Vec<f64>, Vec<f64>, Vec<f64>), x: &[Complex64], out: &mut [Complex64]) {
    let n = x.len();
    for j in 0..n {
        let mut s = x[j] * rows.1[j];
        if j > 0 {
            s += x[j - 1] * rows.0[j];
        }
        if j + 1 < n {
            s += x[j + 1] * rows.2[j];
        }
        out[j] = s;
    }
}

impl Stepper {
    pub fn new(initial: VelocityField, cfg: StepperConfig) -> Result<Self> {
        let domain = *initial.domain();
        domain.validate()?;
        if !(cfg.nu > 0.0 && cfg.nu.is_finite()) {
            return Err(Error::InvalidArgument(format!("viscosity must be positive, got {}", cfg.nu)));
        }
        if !cfg.forcing.domain().same_grid(&domain) {
            return Err(Error::InvalidArgument("forcing lives on a different grid".into()));
        }
        initial.check_invariants()?;
        let mut xt = XTransform::new(domain.nx, domain.ny);
        let force_h = (xt.forward_vec(&cfg.forcing.u.data), xt.forward_vec(&cfg.forcing.v.data));
        let state_h = (xt.forward_vec(&initial.u.data), xt.forward_vec(&initial.v.data));
        let n = domain.len();
        let ledger = EnergyLedger::start(initial.time(), initial.kinetic_energy());
        let mut state = initial;
        state.nu = cfg.nu;
        Ok(Stepper {
            domain,
            nu: cfg.nu,
            alpha: domain.alpha(cfg.nu),
            energy_fix: cfg.energy_fix,
            form: cfg.advection,
            projector: Projector::new(&domain)?,
            xt,
            force: cfg.forcing,
            force_h,
            state,
            state_h,
            prev_adv: None,
            grad_p: (vec![Complex64::default(); n], vec![Complex64::default(); n]),
            cn: HashMap::new(),
            ledger,
            steps: 0,
            fixes: 0,
            removed: 0.0,
        })
    }

    pub fn state(&self) -> &VelocityField {
        &self.state
    }

    pub fn time(&self) -> f64 {
        self.state.time()
    }

    pub fn steps_taken(&self) -> usize {
        self.steps
    }

    /// Number of steps on which the energy rescaling was active.
    pub fn energy_fixes(&self) -> usize {
        self.fixes
    }

    /// Total kinetic energy removed by the rescaling.
    pub fn energy_removed(&self) -> f64 {
        self.removed
    }

    pub fn cfl(&self, dt: f64) -> f64 {
        let d = &self.domain;
        self.state.max_speed() * dt / d.dx().min(d.dy())
    }

    fn robin(&self) -> Option<f64> {
        match self.domain.bc {
            BcKind::NoSlip => None,
            BcKind::NavierFriction => Some(self.alpha),
        }
    }

    fn cn_ops(&mut self, dt: f64) -> Result<&CnOps> {
        let key = dt.to_bits();
        if !self.cn.contains_key(&key) {
            let d = self.domain;
            let (nx, ny, dy) = (d.nx, d.ny, d.dy());
            let h = 0.5 * dt * self.nu;
            let robin = self.robin();
            let build = |m: usize, robin: Option<f64>| -> Result<Tridiag> {
                let k = wavenumber(m, nx, d.lx);
                let (lo, di, up) = diffusion_rows(ny, dy, k * k, robin);
                let lo: Vec<f64> = lo.iter().map(|a| -h * a).collect();
                let up: Vec<f64> = up.iter().map(|a| -h * a).collect();
                let mut di: Vec<f64> = di.iter().map(|a| 1.0 - h * a).collect();
                if robin.is_none() {
                    di[0] = 1.0;
                    di[ny - 1] = 1.0;
                }
                Tridiag::new(&lo, &di, &up)
            };
            let mut implicit_u = Vec::with_capacity(nx / 2 + 1);
            let mut implicit_v = Vec::with_capacity(nx / 2 + 1);
            for m in 0..=nx / 2 {
                implicit_u.push(build(m, robin)?);
                implicit_v.push(build(m, None)?);
            }
            self.cn.insert(key, CnOps { implicit_u, implicit_v });
        }
        Ok(&self.cn[&key])
    }

    /// `−div(u ⊗ u)` in spectral form with two-thirds dealiasing in x.
    fn advection(&mut self) -> (Vec<Complex64>, Vec<Complex64>) {
        let d = self.domain;
        let (nx, ny, dy) = (d.nx, d.ny, d.dy());
        let cut = ((nx - 1) / 3) as i64;
        let truncate = |h: &mut [Complex64]| {
            for m in 0..nx {
                if signed_mode(m, nx).abs() > cut {
                    h[m * ny..(m + 1) * ny].iter_mut().for_each(|c| *c = Complex64::default());
                }
            }
        };
        let mut uh = self.state_h.0.clone();
        let mut vh = self.state_h.1.clone();
        truncate(&mut uh);
        truncate(&mut vh);
        let u = self.xt.inverse_vec(&uh);
        let v = self.xt.inverse_vec(&vh);
        let uu: Vec<f64> = u.iter().map(|a| a * a).collect();
        let uv: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a * b).collect();
        let vv: Vec<f64> = v.iter().map(|a| a * a).collect();
        let uuh = self.xt.forward_vec(&uu);
        let uvh = self.xt.forward_vec(&uv);
        let vvh = self.xt.forward_vec(&vv);
        let n = d.len();
        let mut nu_ = vec![Complex64::default(); n];
        let mut nv_ = vec![Complex64::default(); n];
        let mut t1 = vec![Complex64::default(); ny];
        let mut t2 = vec![Complex64::default(); ny];
        for m in 0..nx {
            if signed_mode(m, nx).abs() > cut {
                continue;
            }
            let ik = Complex64::new(0.0, derivative_factor(m, nx, d.lx));
            let r = m * ny..(m + 1) * ny;
            dy_column_c(&uvh[r.clone()], dy, &mut t1);
            dy_column_c(&vvh[r.clone()], dy, &mut t2);
            for j in 0..ny {
                nu_[m * ny + j] = -(ik * uuh[m * ny + j] + t1[j]);
                nv_[m * ny + j] = -(ik * uvh[m * ny + j] + t2[j]);
            }
        }
        if self.form == AdvectionForm::SkewSymmetric {
            let ux = crate::fields::ops::dx_with(&mut self.xt, &d, &u);
            let vx = crate::fields::ops::dx_with(&mut self.xt, &d, &v);
            let uy = crate::fields::ops::dy_data(&d, &u);
            let vy = crate::fields::ops::dy_data(&d, &v);
            let au: Vec<f64> = (0..n).map(|q| u[q] * ux[q] + v[q] * uy[q]).collect();
            let av: Vec<f64> = (0..n).map(|q| u[q] * vx[q] + v[q] * vy[q]).collect();
            let auh = self.xt.forward_vec(&au);
            let avh = self.xt.forward_vec(&av);
            for m in 0..nx {
                let keep = signed_mode(m, nx).abs() <= cut;
                for j in 0..ny {
                    let q = m * ny + j;
                    if keep {
                        nu_[q] = (nu_[q] - auh[q]) * 0.5;
                        nv_[q] = (nv_[q] - avh[q]) * 0.5;
                    }
                }
            }
        }
        (nu_, nv_)
    }

    /// Advances by `dt`, halving recursively while the CFL bound is violated.
    pub fn advance(&mut self, dt: f64) -> Result<()> {
        self.advance_inner(dt, 0)
    }

    fn advance_inner(&mut self, dt: f64, depth: u32) -> Result<()> {
        if self.cfl(dt) > CFL_MAX {
            if depth >= MAX_HALVINGS {
                return Err(Error::Numerical(format!(
                    "CFL {} still above {} after {} halvings at t = {}",
                    self.cfl(dt),
                    CFL_MAX,
                    depth,
                    self.time()
                )));
            }
            self.advance_inner(0.5 * dt, depth + 1)?;
            return self.advance_inner(0.5 * dt, depth + 1);
        }
        self.raw_step(dt)
    }

    /// One step of size `dt` without the CFL check.
    pub fn raw_step(&mut self, dt: f64) -> Result<()> {
        let d = self.domain;
        let (nx, ny) = (d.nx, d.ny);
        let robin = self.robin();
        let (adv_u, adv_v) = self.advection();
        let (cu, cp) = match &self.prev_adv {
            Some((_, _, dt_prev)) => {
                let w = dt / dt_prev;
                (1.0 + 0.5 * w, -0.5 * w)
            }
            None => (1.0, 0.0),
        };
        let h = 0.5 * dt * self.nu;
        let mut wu = vec![Complex64::default(); d.len()];
        let mut wv = vec![Complex64::default(); d.len()];
        {
            let prev = self.prev_adv.as_ref();
            let (su, sv) = (&self.state_h.0, &self.state_h.1);
            let (gu, gv) = (&self.grad_p.0, &self.grad_p.1);
            let (fu, fv) = (&self.force_h.0, &self.force_h.1);
            let mut au = vec![Complex64::default(); ny];
            let mut av = vec![Complex64::default(); ny];
            let dy = d.dy();
            for m in 0..=nx / 2 {
                let k = wavenumber(m, nx, d.lx);
                let rows_u = diffusion_rows(ny, dy, k * k, robin);
                let rows_v = diffusion_rows(ny, dy, k * k, None);
                let r = m * ny..(m + 1) * ny;
                apply_rows(&rows_u, &su[r.clone()], &mut au);
                apply_rows(&rows_v, &sv[r.clone()], &mut av);
                for j in 0..ny {
                    let q = m * ny + j;
                    let (mut nu_q, mut nv_q) = (adv_u[q] * cu, adv_v[q] * cu);
                    if let Some((pu, pv, _)) = prev {
                        nu_q += pu[q] * cp;
                        nv_q += pv[q] * cp;
                    }
                    wu[q] = su[q] + au[j] * h + (nu_q - gu[q] + fu[q]) * dt;
                    wv[q] = sv[q] + av[j] * h + (nv_q - gv[q] + fv[q]) * dt;
                }
                if robin.is_none() {
                    wu[m * ny] = Complex64::default();
                    wu[m * ny + ny - 1] = Complex64::default();
                }
                wv[m * ny] = Complex64::default();
                wv[m * ny + ny - 1] = Complex64::default();
            }
        }
        {
            let ops = self.cn_ops(dt)?;
            for m in 0..=nx / 2 {
                let r = m * ny..(m + 1) * ny;
                ops.implicit_u[m].solve_in_place(&mut wu[r.clone()]);
                ops.implicit_v[m].solve_in_place(&mut wv[r]);
            }
        }
        // the Nyquist mode carries no resolved derivative information
        for j in 0..ny {
            wu[(nx / 2) * ny + j] = Complex64::default();
            wv[(nx / 2) * ny + j] = Complex64::default();
        }
        hermitian_fill(&mut wu, nx, ny);
        hermitian_fill(&mut wv, nx, ny);

        let mut pu = wu.clone();
        let mut pv = wv.clone();
        self.projector.apply_spectral(&mut pu, &mut pv);
        let inv_dt = 1.0 / dt;
        for q in 0..d.len() {
            self.grad_p.0[q] += (wu[q] - pu[q]) * inv_dt;
            self.grad_p.1[q] += (wv[q] - pv[q]) * inv_dt;
        }

        // midpoint of the old state and the predictor for the ledger increments
        let w_u = self.xt.inverse_vec(&wu);
        let w_v = self.xt.inverse_vec(&wv);
        let t_new = self.time() + dt;
        let mid = VelocityField {
            u: ScalarField {
                domain: d,
                time: t_new,
                data: self.state.u.data.iter().zip(&w_u).map(|(a, b)| 0.5 * (a + b)).collect(),
            },
            v: ScalarField {
                domain: d,
                time: t_new,
                data: self.state.v.data.iter().zip(&w_v).map(|(a, b)| 0.5 * (a + b)).collect(),
            },
            nu: self.nu,
        };
        let bulk = dt * self.nu * (dirichlet_form(&mid.u) + dirichlet_form(&mid.v));
        let wall = match self.domain.bc {
            BcKind::NoSlip => 0.0,
            BcKind::NavierFriction => dt * self.nu * self.alpha * wall_slip_energy(&mid),
        };
        let work = dt * self.force.dot(&mid);

        let mut new_u = self.xt.inverse_vec(&pu);
        let mut new_v = self.xt.inverse_vec(&pv);
        for i in 0..nx {
            new_v[i * ny] = 0.0;
            new_v[i * ny + ny - 1] = 0.0;
            if robin.is_none() {
                new_u[i * ny] = 0.0;
                new_u[i * ny + ny - 1] = 0.0;
            }
        }
        let mut next = VelocityField {
            u: ScalarField {
                domain: d,
                time: t_new,
                data: new_u,
            },
            v: ScalarField {
                domain: d,
                time: t_new,
                data: new_v,
            },
            nu: self.nu,
        };
        if !next.is_finite() {
            return Err(Error::NonFinite {
                what: "velocity".into(),
                step: self.steps + 1,
                time: t_new,
            });
        }
        let e_old = self.state.kinetic_energy();
        let mut e_new = next.kinetic_energy();
        let allowed = e_old - bulk - wall + work;
        if self.energy_fix && e_new > allowed && e_new > 0.0 {
            let gamma = (allowed.max(0.0) / e_new).sqrt();
            next.scale(gamma);
            pu.iter_mut().chain(pv.iter_mut()).for_each(|c| *c *= gamma);
            let e_fixed = next.kinetic_energy();
            self.removed += e_new - e_fixed;
            e_new = e_fixed;
            self.fixes += 1;
        }

        self.prev_adv = Some((adv_u, adv_v, dt));
        self.state = next;
        self.state_h = (pu, pv);
        self.steps += 1;
        self.ledger.push(t_new, e_new, LedgerIncrement { bulk, wall, work });
        Ok(())
    }
}
