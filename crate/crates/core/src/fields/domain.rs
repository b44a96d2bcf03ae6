use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Wall boundary condition of the channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BcKind {
    NoSlip,
    NavierFriction,
}

impl BcKind {
    pub fn as_u8(self) -> u8 {
        match self {
            BcKind::NoSlip => 0,
            BcKind::NavierFriction => 1,
        }
    }

    pub fn from_u8(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(BcKind::NoSlip),
            1 => Some(BcKind::NavierFriction),
            _ => None,
        }
    }
}

/// Periodic channel `[0, lx) x [0, h]` with walls at `y = 0` and `y = h`.
///
/// Nodes sit at `x_i = i lx / nx` and `y_j = j h / (ny - 1)`, so rows `0` and
/// `ny - 1` lie on the walls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub lx: f64,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    pub t_final: f64,
    pub bc: BcKind,
    /// Inverse slip coefficient `c0` in `alpha = c0 * nu^-beta`.
    pub alpha0: f64,
    pub beta: f64,
}

impl DomainSpec {
    pub fn new(lx: f64, h: f64, nx: usize, ny: usize, t_final: f64, bc: BcKind) -> Result<Self> {
        let d = DomainSpec {
            lx,
            h,
            nx,
            ny,
            t_final,
            bc,
            alpha0: 0.0,
            beta: 0.0,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn navier_friction(
        lx: f64,
        h: f64,
        nx: usize,
        ny: usize,
        t_final: f64,
        alpha0: f64,
        beta: f64,
    ) -> Result<Self> {
        let d = DomainSpec {
            lx,
            h,
            nx,
            ny,
            t_final,
            bc: BcKind::NavierFriction,
            alpha0,
            beta,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if !(self.lx > 0.0 && self.lx.is_finite()) {
            errs.push(format!("lx must be positive, got {}", self.lx));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            errs.push(format!("h must be positive, got {}", self.h));
        }
        if self.nx < 8 || self.nx % 2 != 0 {
            errs.push(format!("nx must be even and >= 8, got {}", self.nx));
        }
        if self.ny < 9 {
            errs.push(format!("ny must be >= 9, got {}", self.ny));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            errs.push(format!("t_final must be >= 0, got {}", self.t_final));
        }
        if self.bc == BcKind::NavierFriction {
            if !(self.alpha0 > 0.0 && self.alpha0.is_finite()) {
                errs.push(format!("alpha0 must be > 0 for navier friction, got {}", self.alpha0));
            }
            if !(0.0..=1.0).contains(&self.beta) {
                errs.push(format!("beta ∈ [0,1] required, got {}", self.beta));
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Domain(errs.join("; ")))
        }
    }

    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.h / (self.ny - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    pub fn y(&self, j: usize) -> f64 {
        j as f64 * self.dy()
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    /// Effective inverse slip length `alpha = alpha0 * nu^-beta`. Zero for no-slip walls.
    pub fn alpha(&self, nu: f64) -> f64 {
        match self.bc {
            BcKind::NoSlip => 0.0,
            BcKind::NavierFriction => self.alpha0 * nu.powf(-self.beta),
        }
    }

    /// Trapezoidal weights in y (half weight on the wall rows).
    pub fn y_weights(&self) -> Vec<f64> {
        let dy = self.dy();
        let mut w = vec![dy; self.ny];
        w[0] = 0.5 * dy;
        w[self.ny - 1] = 0.5 * dy;
        w
    }

    pub fn area(&self) -> f64 {
        self.lx * self.h
    }

    /// Same grid and geometry (ignores `t_final`).
    pub fn same_grid(&self, other: &DomainSpec) -> bool {
        self.nx == other.nx
            && self.ny == other.ny
            && self.lx == other.lx
            && self.h == other.h
            && self.bc == other.bc
    }
}

/// Open rectangle `U = (x_lo, x_hi) x (y_lo, y_hi)` compactly inside the channel.
///
/// `x` is periodic, so an x-extent of at least `lx` denotes a full strip.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Subdomain {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

impl Subdomain {
    pub fn new(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> Self {
        Subdomain { x_lo, x_hi, y_lo, y_hi }
    }

    /// Full-period strip `y_lo < y < y_hi`.
    pub fn strip(domain: &DomainSpec, y_lo: f64, y_hi: f64) -> Self {
        Subdomain::new(0.0, domain.lx, y_lo, y_hi)
    }

    pub fn validate(&self, domain: &DomainSpec) -> Result<()> {
        if !(self.x_hi > self.x_lo) {
            return Err(Error::Subdomain(format!("x_hi {} <= x_lo {}", self.x_hi, self.x_lo)));
        }
        if !(0.0 < self.y_lo && self.y_lo < self.y_hi && self.y_hi < domain.h) {
            return Err(Error::Subdomain(format!(
                "need 0 < y_lo < y_hi < H, got y_lo = {}, y_hi = {}, H = {}",
                self.y_lo, self.y_hi, domain.h
            )));
        }
        Ok(())
    }

    /// `dist(U, walls)`.
    pub fn margin(&self, domain: &DomainSpec) -> f64 {
        self.y_lo.min(domain.h - self.y_hi)
    }

    pub fn is_full_strip(&self, domain: &DomainSpec) -> bool {
        self.x_hi - self.x_lo >= domain.lx * (1.0 - 1e-12)
    }

    pub fn width(&self, domain: &DomainSpec) -> f64 {
        if self.is_full_strip(domain) {
            domain.lx
        } else {
            self.x_hi - self.x_lo
        }
    }

    pub fn area(&self, domain: &DomainSpec) -> f64 {
        self.width(domain) * (self.y_hi - self.y_lo)
    }

    /// `U ∩ (U - r)`, or `None` when empty.
    pub fn overlap_with_shift(&self, domain: &DomainSpec, r: [f64; 2]) -> Option<Subdomain> {
        let (x_lo, x_hi) = if self.is_full_strip(domain) {
            (self.x_lo, self.x_hi)
        } else {
            (self.x_lo.max(self.x_lo - r[0]), self.x_hi.min(self.x_hi - r[0]))
        };
        let y_lo = self.y_lo.max(self.y_lo - r[1]);
        let y_hi = self.y_hi.min(self.y_hi - r[1]);
        if x_hi > x_lo && y_hi > y_lo {
            Some(Subdomain { x_lo, x_hi, y_lo, y_hi })
        } else {
            None
        }
    }

    /// True when `inner` is contained in `self` with at least `gap` clearance on every
    /// bounded side.
    pub fn contains_with_gap(&self, domain: &DomainSpec, inner: &Subdomain, gap: f64) -> bool {
        let y_ok = inner.y_lo - self.y_lo >= gap && self.y_hi - inner.y_hi >= gap;
        let x_ok = if self.is_full_strip(domain) {
            true
        } else if inner.is_full_strip(domain) {
            false
        } else {
            inner.x_lo - self.x_lo >= gap && self.x_hi - inner.x_hi >= gap
        };
        x_ok && y_ok
    }
}
