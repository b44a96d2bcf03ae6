//! Smooth cutoffs `χ` with `χ = 1` on an inner box and support in an outer box.
//!
//! Each axis uses the bump profile `B(t) = exp(1 − 1/(1 − t²))` of the normalized distance
//! `t` from the inner edge, so `χ` falls from 1 at the inner edge to 0 at the outer edge.
//! `B` is flat to first order at `t = 0` but not to second order, so the profile is
//! `C^{1,1}` across the inner edge and `C^∞` elsewhere; every Hölder exponent below 1 is
//! covered.

use serde::{Deserialize, Serialize};

use super::shiftset::ShiftSet;
use crate::error::{Error, Result};
use crate::fields::bump::bump;
use crate::fields::shift::shift_sample;
use crate::fields::{DomainSpec, ScalarField, Subdomain};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderBound {
    pub s: f64,
    pub seminorm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub outer: Subdomain,
    pub inner: Subdomain,
    pub values: ScalarField,
    pub holder: Option<HolderBound>,
}

fn taper(dist_out: f64, width: f64) -> f64 {
    if dist_out <= 0.0 {
        1.0
    } else {
        bump(dist_out / width)
    }
}

fn axis_profile(p: f64, in_lo: f64, in_hi: f64, out_lo: f64, out_hi: f64) -> f64 {
    if p <= out_lo || p >= out_hi {
        0.0
    } else if p < in_lo {
        taper(in_lo - p, in_lo - out_lo)
    } else if p > in_hi {
        taper(p - in_hi, out_hi - in_hi)
    } else {
        1.0
    }
}

impl Cutoff {
    /// Requires at least one grid cell between `inner` and `outer` on every bounded side.
    pub fn new(domain: &DomainSpec, outer: &Subdomain, inner: &Subdomain) -> Result<Self> {
        outer.validate(domain)?;
        inner.validate(domain)?;
        let gap = domain.dx().max(domain.dy());
        if !outer.contains_with_gap(domain, inner, gap) {
            return Err(Error::Subdomain(format!(
                "cutoff needs inner {inner:?} inside outer {outer:?} with a gap of at least {gap}"
            )));
        }
        let full_x = outer.is_full_strip(domain);
        let values = ScalarField::from_fn(domain, |x, y| {
            let cy = axis_profile(y, inner.y_lo, inner.y_hi, outer.y_lo, outer.y_hi);
            if cy == 0.0 || full_x {
                return cy;
            }
            // periodic coordinate measured from the outer left edge
            let xs = outer.x_lo + (x - outer.x_lo).rem_euclid(domain.lx);
            let il = outer.x_lo + (inner.x_lo - outer.x_lo).rem_euclid(domain.lx);
            let ih = il + (inner.x_hi - inner.x_lo);
            cy * axis_profile(xs, il, ih, outer.x_lo, outer.x_hi)
        });
        Ok(Cutoff {
            outer: *outer,
            inner: *inner,
            values,
            holder: None,
        })
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.values.domain
    }

    pub fn sup(&self) -> f64 {
        self.values.max_abs()
    }

    /// Grid Hölder seminorm `max_r max_x |χ(x + r) − χ(x)| / |r|^s` over the shift set.
    pub fn holder_seminorm(&self, s: f64, shifts: &ShiftSet) -> Result<f64> {
        if !(s > 0.0 && s <= 1.0) {
            return Err(Error::InvalidArgument(format!("Hölder exponent {s} outside (0, 1]")));
        }
        let ny = self.values.domain.ny;
        let mut best = 0.0_f64;
        for sh in &shifts.shifts {
            let moved = shift_sample(&self.values, sh.r)?;
            let scale = sh.norm().powf(s);
            for (k, (a, b)) in moved.field.data.iter().zip(&self.values.data).enumerate() {
                if moved.valid_rows[k % ny] {
                    best = best.max((a - b).abs() / scale);
                }
            }
        }
        Ok(best)
    }

    /// `‖χ‖_{C^s} = sup |χ| + [χ]_s`.
    pub fn holder_norm(&self, s: f64, shifts: &ShiftSet) -> Result<f64> {
        Ok(self.sup() + self.holder_seminorm(s, shifts)?)
    }

    /// Computes and stores the Hölder seminorm.
    pub fn with_holder(mut self, s: f64, shifts: &ShiftSet) -> Result<Self> {
        let seminorm = self.holder_seminorm(s, shifts)?;
        self.holder = Some(HolderBound { s, seminorm });
        Ok(self)
    }

    /// Pointwise product `χ f`.
    pub fn apply(&self, f: &ScalarField) -> ScalarField {
        let mut out = f.clone();
        for (o, c) in out.data.iter_mut().zip(&self.values.data) {
            *o *= c;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::BcKind;
    use std::f64::consts::PI;

    fn dom() -> DomainSpec {
        DomainSpec::new(2.0 * PI, PI, 64, 33, 1.0, BcKind::NoSlip).unwrap()
    }

    #[test]
    fn one_on_inner_zero_outside_outer() {
        let d = dom();
        let outer = Subdomain::new(1.0, 5.0, 0.5, 2.6);
        let inner = Subdomain::new(2.0, 4.0, 1.0, 2.0);
        let c = Cutoff::new(&d, &outer, &inner).unwrap();
        for i in 0..d.nx {
            for j in 0..d.ny {
                let (x, y) = (d.x(i), d.y(j));
                let v = c.values[(i, j)];
                assert!((0.0..=1.0).contains(&v));
                if (2.0..=4.0).contains(&x) && (1.0..=2.0).contains(&y) {
                    assert_eq!(v, 1.0);
                }
                if !(x > 1.0 && x < 5.0 && y > 0.5 && y < 2.6) {
                    assert_eq!(v, 0.0);
                }
            }
        }
    }

    #[test]
    fn wrapping_outer_box() {
        let d = dom();
        let outer = Subdomain::new(-1.0, 1.0, 0.5, 2.6);
        let inner = Subdomain::new(-0.4, 0.4, 1.0, 2.0);
        let c = Cutoff::new(&d, &outer, &inner).unwrap();
        let j = 16;
        assert_eq!(c.values[(0, j)], 1.0);
        // x = 2π − 0.2 is inside the inner box through periodicity
        let i = ((d.lx - 0.2) / d.dx()).round() as usize;
        assert_eq!(c.values[(i, j)], 1.0);
        let i = (3.0 / d.dx()).round() as usize;
        assert_eq!(c.values[(i, j)], 0.0);
    }

    #[test]
    fn full_strip_is_flat_in_x() {
        let d = dom();
        let c = Cutoff::new(&d, &Subdomain::strip(&d, 0.5, 2.6), &Subdomain::strip(&d, 1.0, 2.0)).unwrap();
        for j in 0..d.ny {
            let v = c.values[(0, j)];
            for i in 0..d.nx {
                assert_eq!(c.values[(i, j)], v);
            }
        }
    }

    #[test]
    fn rejects_touching_boxes() {
        let d = dom();
        let u = Subdomain::strip(&d, 0.5, 2.6);
        assert!(Cutoff::new(&d, &u, &u).is_err());
    }

    #[test]
    fn holder_seminorm_bounded_by_lipschitz_estimate() {
        let d = dom();
        let outer = Subdomain::strip(&d, 0.5, 2.6);
        let c = Cutoff::new(&d, &outer, &Subdomain::strip(&d, 1.0, 2.0)).unwrap();
        let shifts = ShiftSet::default_for(&d, &outer).unwrap();
        let lip = c.holder_seminorm(1.0, &shifts).unwrap();
        // max |B'| on [0, 1] is about 2.1704, tapers are 0.5 and 0.6 wide
        assert!(lip > 0.0 && lip <= 2.1704 / 0.5);
        let half = c.holder_seminorm(0.5, &shifts).unwrap();
        assert!(half > 0.0 && half.is_finite());
    }
}
