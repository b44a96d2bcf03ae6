use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use super::domain::{BcKind, DomainSpec};
use crate::error::{Error, Result};

/// Relative divergence tolerance for solenoidal fields.
pub const DIV_TOL: f64 = 1e-10;

/// Nodal scalar on the channel grid, stored row-major with shape `(nx, ny)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    pub domain: DomainSpec,
    pub time: f64,
    pub data: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(domain: &DomainSpec) -> Self {
        ScalarField {
            domain: *domain,
            time: 0.0,
            data: vec![0.0; domain.len()],
        }
    }

    pub fn from_vec(domain: &DomainSpec, data: Vec<f64>) -> Result<Self> {
        if data.len() != domain.len() {
            return Err(Error::InvalidArgument(format!(
                "field length {} does not match grid {}x{}",
                data.len(),
                domain.nx,
                domain.ny
            )));
        }
        Ok(ScalarField {
            domain: *domain,
            time: 0.0,
            data,
        })
    }

    pub fn from_fn(domain: &DomainSpec, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut data = Vec::with_capacity(domain.len());
        for i in 0..domain.nx {
            let x = domain.x(i);
            for j in 0..domain.ny {
                data.push(f(x, domain.y(j)));
            }
        }
        ScalarField {
            domain: *domain,
            time: 0.0,
            data,
        }
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn nx(&self) -> usize {
        self.domain.nx
    }

    pub fn ny(&self) -> usize {
        self.domain.ny
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn scale(&mut self, a: f64) {
        self.data.iter_mut().for_each(|v| *v *= a);
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: f64, other: &ScalarField) {
        for (s, o) in self.data.iter_mut().zip(&other.data) {
            *s += a * o;
        }
    }

    /// Trapezoidal inner product over the whole channel.
    pub fn dot(&self, other: &ScalarField) -> f64 {
        let wy = self.domain.y_weights();
        let dx = self.domain.dx();
        let ny = self.ny();
        let mut s = 0.0;
        for (k, (a, b)) in self.data.iter().zip(&other.data).enumerate() {
            s += wy[k % ny] * a * b;
        }
        s * dx
    }

    pub fn l2_norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn row(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        let ny = self.ny();
        (0..self.nx()).map(move |i| self.data[i * ny + j])
    }
}

impl Index<(usize, usize)> for ScalarField {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.domain.ny + j]
    }
}

impl IndexMut<(usize, usize)> for ScalarField {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.domain.ny + j]
    }
}

/// 2D velocity `(u, v)` with the viscosity of the run that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VelocityField {
    pub u: ScalarField,
    pub v: ScalarField,
    pub nu: f64,
}

impl VelocityField {
    pub fn zeros(domain: &DomainSpec, nu: f64) -> Self {
        VelocityField {
            u: ScalarField::zeros(domain),
            v: ScalarField::zeros(domain),
            nu,
        }
    }

    pub fn new(u: ScalarField, v: ScalarField, nu: f64) -> Result<Self> {
        if !u.domain.same_grid(&v.domain) {
            return Err(Error::InvalidArgument("u and v live on different grids".into()));
        }
        Ok(VelocityField { u, v, nu })
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.u.domain
    }

    pub fn time(&self) -> f64 {
        self.u.time
    }

    pub fn set_time(&mut self, t: f64) {
        self.u.time = t;
        self.v.time = t;
    }

    pub fn dot(&self, other: &VelocityField) -> f64 {
        self.u.dot(&other.u) + self.v.dot(&other.v)
    }

    pub fn l2_norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// `E = ½ ∫ |u|²`.
    pub fn kinetic_energy(&self) -> f64 {
        0.5 * self.dot(self)
    }

    pub fn max_speed(&self) -> f64 {
        self.u
            .data
            .iter()
            .zip(&self.v.data)
            .fold(0.0_f64, |m, (a, b)| m.max(a.hypot(*b)))
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }

    pub fn scale(&mut self, a: f64) {
        self.u.scale(a);
        self.v.scale(a);
    }

    pub fn axpy(&mut self, a: f64, other: &VelocityField) {
        self.u.axpy(a, &other.u);
        self.v.axpy(a, &other.v);
    }

    /// Checks finiteness, impermeability, the no-slip condition (if tagged) and discrete
    /// solenoidality.
    pub fn check_invariants(&self) -> Result<()> {
        if !self.is_finite() {
            return Err(Error::Invariant("non-finite velocity entries".into()));
        }
        let d = self.domain();
        for i in 0..d.nx {
            for j in [0, d.ny - 1] {
                if self.v[(i, j)] != 0.0 {
                    return Err(Error::Invariant(format!("v != 0 on wall node ({i}, {j})")));
                }
                if d.bc == BcKind::NoSlip && self.u[(i, j)] != 0.0 {
                    return Err(Error::Invariant(format!("u != 0 on no-slip wall node ({i}, {j})")));
                }
            }
        }
        let div = super::ops::divergence(self);
        let norm = self.l2_norm();
        if div.max_abs() > DIV_TOL * norm.max(f64::MIN_POSITIVE) {
            return Err(Error::Invariant(format!(
                "divergence {:e} exceeds {:e} * |u| = {:e}",
                div.max_abs(),
                DIV_TOL,
                DIV_TOL * norm
            )));
        }
        Ok(())
    }
}

impl std::ops::Index<usize> for VelocityField {
    type Output = ScalarField;
    fn index(&self, c: usize) -> &ScalarField {
        match c {
            0 => &self.u,
            1 => &self.v,
            _ => panic!("velocity component {c} out of range"),
        }
    }
}

/// Scalar vorticity `ω = ∂x v − ∂y u`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VorticityField {
    pub w: ScalarField,
}

/// Anything that can be viewed as a list of scalar components on one grid.
pub trait Components {
    fn components(&self) -> Vec<&ScalarField>;

    fn domain(&self) -> &DomainSpec {
        &self.components()[0].domain
    }

    fn time(&self) -> f64 {
        self.components()[0].time
    }
}

impl Components for ScalarField {
    fn components(&self) -> Vec<&ScalarField> {
        vec![self]
    }
}

impl Components for VelocityField {
    fn components(&self) -> Vec<&ScalarField> {
        vec![&self.u, &self.v]
    }
}

impl Components for VorticityField {
    fn components(&self) -> Vec<&ScalarField> {
        vec![&self.w]
    }
}
