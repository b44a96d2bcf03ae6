use std::f64::consts::PI;

use proptest::prelude::*;

use nslab::fields::ops::velocity_dirichlet;
use nslab::fields::{shift_sample, RegionWeights};
use nslab::io::snapshot::{decode, encode};
use nslab::io::ConfigFile;
use nslab::norms::{
    besov_norm, increment_energy, structure_function, trapezoid_in_time, IntegrationRegion, ShiftSet,
};
use nslab::{BcKind, DomainSpec, ScalarField, Subdomain, VelocityField};

const NX: usize = 32;
const NY: usize = 17;

fn domain() -> DomainSpec {
    DomainSpec::new(2.0 * PI, PI, NX, NY, 1.0, BcKind::NoSlip).unwrap()
}

fn region(d: &DomainSpec) -> Subdomain {
    Subdomain::strip(d, 0.35 * d.h, 0.65 * d.h)
}

fn field_from(d: &DomainSpec, data: Vec<f64>) -> VelocityField {
    let n = d.len();
    let u = ScalarField::from_vec(d, data[..n].to_vec()).unwrap();
    let v = ScalarField::from_vec(d, data[n..].to_vec()).unwrap();
    VelocityField::new(u, v, 1e-3).unwrap()
}

fn rough_field() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, 2 * NX * NY)
}

/// Few-mode trigonometric field; coefficients of `sin/cos(kx x) sin(ky y)`.
fn smooth_field() -> impl Strategy<Value = Vec<(f64, f64, usize, usize)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64, 0usize..4, 1usize..4), 1..5)
}

fn build_smooth(d: &DomainSpec, modes: &[(f64, f64, usize, usize)]) -> VelocityField {
    let eval = |x: f64, y: f64, phase: f64| {
        modes
            .iter()
            .map(|&(a, b, kx, ky)| (a * (kx as f64 * x + phase).sin() + b * (kx as f64 * x).cos()) * (ky as f64 * y).sin())
            .sum::<f64>()
    };
    let u = ScalarField::from_fn(d, |x, y| eval(x, y, 0.0));
    let v = ScalarField::from_fn(d, |x, y| eval(x, y, 0.7));
    VelocityField::new(u, v, 1e-3).unwrap()
}

fn shifts(d: &DomainSpec) -> ShiftSet {
    let mags: Vec<f64> = (1..=4).map(|m| m as f64 * d.dy()).collect();
    ShiftSet::new(d, vec![[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]], mags).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn structure_function_is_quadratically_homogeneous(data in rough_field(), a in -5.0..5.0f64) {
        let d = domain();
        let f = field_from(&d, data);
        let mut g = f.clone();
        g.scale(a);
        let s = shifts(&d);
        let t1 = structure_function(&[f], &region(&d), &s, IntegrationRegion::Full).unwrap();
        let t2 = structure_function(&[g], &region(&d), &s, IntegrationRegion::Full).unwrap();
        for (x, y) in t1.values.iter().zip(&t2.values) {
            prop_assert!((y - a * a * x).abs() <= 1e-12 * (a * a * x).abs().max(1e-300));
        }
    }

    #[test]
    fn besov_norm_is_subadditive_and_homogeneous(a in rough_field(), b in rough_field(), c in -3.0..3.0f64) {
        let d = domain();
        let (f, g) = (field_from(&d, a), field_from(&d, b));
        let mut sum = f.clone();
        sum.axpy(1.0, &g);
        let mut scaled = f.clone();
        scaled.scale(c);
        let (s, r) = (shifts(&d), region(&d));
        let nf = besov_norm(&f, 0.4, &r, &s).unwrap().value;
        let ng = besov_norm(&g, 0.4, &r, &s).unwrap().value;
        let ns = besov_norm(&sum, 0.4, &r, &s).unwrap().value;
        let nc = besov_norm(&scaled, 0.4, &r, &s).unwrap().value;
        prop_assert!(ns <= (nf + ng) * (1.0 + 1e-12));
        prop_assert!((nc - c.abs() * nf).abs() <= 1e-12 * nf);
    }

    #[test]
    fn besov_norm_grows_with_smoothness_index(data in rough_field(), s1 in 0.05..0.9f64, ds in 0.0..0.09f64) {
        // every shift is shorter than 1, so |r|^{-σ} increases with σ
        let d = domain();
        let f = field_from(&d, data);
        let (s, r) = (shifts(&d), region(&d));
        prop_assert!(s.shifts.iter().all(|sh| sh.norm() < 1.0));
        let lo = besov_norm(&f, s1, &r, &s).unwrap().value;
        let hi = besov_norm(&f, s1 + ds, &r, &s).unwrap().value;
        prop_assert!(lo <= hi * (1.0 + 1e-14));
    }

    #[test]
    fn besov_seminorm_matches_overlap_structure_function(data in rough_field(), sigma in 0.05..0.95f64) {
        let d = domain();
        let f = field_from(&d, data);
        let (s, r) = (shifts(&d), region(&d));
        let rep = besov_norm(&f, sigma, &r, &s).unwrap();
        let table = structure_function(&[f], &r, &s, IntegrationRegion::Overlap).unwrap();
        for (det, v) in rep.details.iter().zip(&table.values) {
            let expect = v.sqrt() / det.at.powf(sigma);
            prop_assert!((det.value - expect).abs() <= 1e-12 * expect.max(1e-300));
        }
    }

    #[test]
    fn structure_function_respects_gradient_bound(modes in smooth_field()) {
        let d = DomainSpec::new(2.0 * PI, PI, 64, 65, 1.0, BcKind::NoSlip).unwrap();
        let f = build_smooth(&d, &modes);
        let s = shifts(&d);
        let grad = velocity_dirichlet(&f);
        let table = structure_function(&[f], &region(&d), &s, IntegrationRegion::Full).unwrap();
        for (sh, v) in s.shifts.iter().zip(&table.values) {
            let bound = nslab::analysis::fit::GRADIENT_BOUND_FACTOR * sh.norm().powi(2) * grad;
            prop_assert!(*v <= bound, "{v} > {bound} at {:?}", sh.r);
        }
    }

    #[test]
    fn grid_aligned_shift_is_an_exact_index_shift(data in rough_field(), mx in -40i64..40, my in -3i64..4) {
        let d = domain();
        let f = field_from(&d, data).u;
        let r = [mx as f64 * d.dx(), my as f64 * d.dy()];
        let sh = shift_sample(&f, r).unwrap();
        for i in 0..NX {
            for j in 0..NY {
                let js = j as i64 + my;
                prop_assert_eq!(sh.is_valid(j), (0..NY as i64).contains(&js));
                if sh.is_valid(j) {
                    let is = (i as i64 + mx).rem_euclid(NX as i64) as usize;
                    prop_assert_eq!(sh.field[(i, j)].to_bits(), f[(is, js as usize)].to_bits());
                }
            }
        }
    }

    #[test]
    fn increment_energy_vanishes_for_constant_fields(c in -10.0..10.0f64, mx in 1i64..6) {
        let d = domain();
        let f = VelocityField::new(
            ScalarField::from_fn(&d, |_, _| c),
            ScalarField::from_fn(&d, |_, _| -c),
            1e-3,
        )
        .unwrap();
        let w = RegionWeights::new(&d, &region(&d)).unwrap();
        prop_assert_eq!(increment_energy(&f, [mx as f64 * d.dx(), 0.0], &w).unwrap(), 0.0);
    }

    #[test]
    fn trapezoid_integrates_affine_functions_exactly(
        gaps in prop::collection::vec(0.01..1.0f64, 1..20),
        a in -3.0..3.0f64,
        b in -3.0..3.0f64,
    ) {
        let mut t = vec![0.0];
        for g in &gaps {
            t.push(t.last().unwrap() + g);
        }
        let vals: Vec<f64> = t.iter().map(|x| a + b * x).collect();
        let end = *t.last().unwrap();
        let exact = a * end + 0.5 * b * end * end;
        prop_assert!((trapezoid_in_time(&t, &vals) - exact).abs() <= 1e-10 * (1.0 + exact.abs()));
    }

    #[test]
    fn snapshot_codec_round_trips_bitwise(data in rough_field(), t in 0.0..10.0f64, nu in 1e-6..1.0f64) {
        let d = domain();
        let mut f = field_from(&d, data);
        f.nu = nu;
        f.set_time(t);
        let bytes = encode(&f);
        let back = decode(&bytes).unwrap();
        prop_assert_eq!(encode(&back), bytes);
        prop_assert_eq!(back.time().to_bits(), t.to_bits());
        prop_assert!(back.domain().same_grid(f.domain()));
        prop_assert_eq!(back.nu.to_bits(), nu.to_bits());
        let bits = |v: &VelocityField| -> Vec<u64> { v.u.data.iter().chain(&v.v.data).map(|x| x.to_bits()).collect() };
        prop_assert_eq!(bits(&back), bits(&f));
    }

    #[test]
    fn config_echo_parses_back_to_itself(nx in 4usize..512, ny in 3usize..300, nu in 1e-6..1.0f64, seed in any::<u64>()) {
        let text = format!("nx = {}\nny = {ny}\nnu = {nu}\nseed = {seed}\n", 2 * nx);
        let a = ConfigFile::parse_str(&text).unwrap();
        let echo = a.resolved_text();
        let b = ConfigFile::parse_str(&echo).unwrap();
        prop_assert_eq!(b.resolved_text(), echo);
        prop_assert_eq!(a.run_config().ok(), b.run_config().ok());
    }
}
