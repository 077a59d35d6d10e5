//! Regression anchors. Each value is recomputed here by an independent route
//! (adaptive quadrature of the defining integral, a closed form, or a spectral
//! formula), compared with the library, and pinned.

use std::f64::consts::PI;
use std::sync::Arc;

use fracgreen_core::interp::ShellProfile;
use fracgreen_core::kernel::coords;
use fracgreen_core::ops::{frac_laplacian_pv, hls_ratio, DecayHint, PvOptions};
use fracgreen_core::solver::{dirichlet_solve, liouville_cascade};
use fracgreen_core::verify::oracle_bump;
use fracgreen_core::{
    adaptive_quad, AngularScheme, DomainKind, Field, Grid, Kernel, KernelCoords, ModelParams,
};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn kernel31() -> Kernel {
    Kernel::new(ModelParams::new(3, 1.0).unwrap())
}

/// `∫_0^∞ b^{-α/2}/(1+b) db` split at 1, with `b = 1/c` on the tail.
fn b_mass(alpha: f64) -> f64 {
    let f = |b: f64| b.powf(-alpha / 2.0) / (1.0 + b);
    let head = adaptive_quad(f, 0.0, 1.0, 1e-13).unwrap();
    let tail = adaptive_quad(
        |c: f64| c.powf(alpha / 2.0 - 1.0) / (1.0 + c),
        0.0,
        1.0,
        1e-13,
    )
    .unwrap();
    head + tail
}

/// `I_1(s,t)` for n = 3 from its definition, with `b = (s/t) sin² θ` removing
/// both endpoint singularities when α = 1.
fn inner_oracle_n3_alpha1(s: f64, t: f64) -> f64 {
    let rho = s / t;
    let f = |th: f64| {
        let sn = th.sin();
        let b = rho * sn * sn;
        // db = 2 ρ sin cos dθ; b^{-1/2} = (√ρ sin)^{-1}; (s - t b)^{1/2} = √s cos.
        2.0 * rho.sqrt() * th.cos() * s.sqrt() * th.cos() / (1.0 + b)
    };
    adaptive_quad(f, 0.0, PI / 2.0, 1e-13).unwrap() / (s + t).sqrt()
}

const B_ALPHA1: f64 = std::f64::consts::FRAC_1_PI;
const A_N3_ALPHA1: f64 = 0.05066059182116889;
const V_STAR: f64 = 0.9201511845106101;
const G_STAR: f64 = 0.17084397986302538;
const V_GAUSS: f64 = 2.2567583341910256;
const U0_STAR: f64 = 0.18820355222277085;
const R_STAR: f64 = 6.800396040029804;

#[test]
fn normalization_constants() {
    let k = kernel31();
    let c = k.constants();
    let b_oracle = 1.0 / b_mass(1.0);
    assert!(rel(c.b, b_oracle) < 1e-12);
    assert!(rel(c.b, B_ALPHA1) < 1e-15);
    assert!(rel(c.a, 1.0 / (2.0 * PI * PI)) < 1e-14);
    assert!(rel(c.a, A_N3_ALPHA1) < 1e-15);
    for alpha in [0.3, 0.7, 1.3, 1.9] {
        let k = Kernel::new(ModelParams::new(4, alpha).unwrap());
        assert!(
            rel(k.constants().b, 1.0 / b_mass(alpha)) < 1e-10,
            "alpha {alpha}"
        );
    }
}

#[test]
fn inner_integral_anchors() {
    let k = kernel31();
    let v = k.inner_integral(KernelCoords::new(1.0, 1.0)).unwrap().value;
    let oracle = inner_oracle_n3_alpha1(1.0, 1.0);
    assert!(rel(v, oracle) < 1e-10);
    assert!(rel(v, PI * (1.0 - 0.5f64.sqrt())) < 1e-12);
    assert!(rel(v, V_STAR) < 1e-13);
    // t → 0 with s = 1 tends to 1/B = π.
    let near = k
        .inner_integral(KernelCoords::new(1.0, 1e-8))
        .unwrap()
        .value;
    let oracle = inner_oracle_n3_alpha1(1.0, 1e-8);
    assert!(rel(near, oracle) < 1e-8);
    assert!(rel(near, PI) < 1e-3);
}

#[test]
fn green_anchor() {
    let k = kernel31();
    let x = [0.3, 0.0, 0.0];
    let y = [-0.2, 0.1, 0.0];
    let g = k.green(DomainKind::UnitBall, &x, &y).unwrap();
    let c = coords(DomainKind::UnitBall, &x, &y).unwrap();
    assert!(rel(c.s, 0.26) < 1e-15 && rel(c.t, 0.91 * 0.95) < 1e-15);
    let oracle = (1.0 / (2.0 * PI * PI)) / c.s * (1.0 - inner_oracle_n3_alpha1(c.s, c.t) / PI);
    assert!(rel(g, oracle) < 1e-10);
    assert!(rel(g, G_STAR) < 1e-13);
}

#[test]
fn partials_match_five_point_differences() {
    let k = kernel31();
    let c = KernelCoords::new(1.0, 1.0);
    let (ds, dt) = k.green_partials(c).unwrap();
    let h = |s: f64, t: f64| k.h(KernelCoords::new(s, t)).unwrap();
    let e = 1e-3;
    let fd = |f: &dyn Fn(f64) -> f64| {
        (-f(2.0 * e) + 8.0 * f(e) - 8.0 * f(-e) + f(-2.0 * e)) / (12.0 * e)
    };
    let fs = fd(&|d| h(1.0 + d, 1.0));
    let ft = fd(&|d| h(1.0, 1.0 + d));
    assert!(rel(ds, fs) < 1e-4, "{ds} {fs}");
    assert!(rel(dt, ft) < 1e-4, "{dt} {ft}");
    assert!(ds < 0.0 && dt > 0.0);
}

#[test]
fn gaussian_fractional_laplacian_at_origin() {
    // Spectral oracle: (2π)^{-n} ∫ |ξ|^α π^{n/2} e^{-|ξ|²/4} dξ, radial in ξ.
    let (n, alpha) = (3.0, 1.0);
    let radial = adaptive_quad(
        |r: f64| r.powf(n - 1.0 + alpha) * (-r * r / 4.0).exp(),
        0.0,
        40.0,
        1e-13,
    )
    .unwrap();
    let oracle = (2.0 * PI).powf(-n) * PI.powf(n / 2.0) * 4.0 * PI * radial;
    let params = ModelParams::new(3, 1.0).unwrap();
    let est = frac_laplacian_pv(
        |x: &[f64]| (-x.iter().map(|c| c * c).sum::<f64>()).exp(),
        &[0.0, 0.0, 0.0],
        &params,
        0.01,
        12.0,
        &DecayHint::everywhere(0.0),
        &PvOptions::default(),
    )
    .unwrap();
    assert!(rel(oracle, 4.0 / PI.sqrt()) < 1e-12);
    assert!(rel(est.value, oracle) < 1e-4);
    assert!(rel(oracle, V_GAUSS) < 1e-13);
}

fn ball(radial: usize, angular: usize) -> Arc<Grid> {
    Arc::new(Grid::ball(3, radial, angular, AngularScheme::IcosahedralOrbit).unwrap())
}

#[test]
fn dirichlet_solve_of_the_bump_at_the_centre() {
    // For n = 3, α = 1, G_1(0, y) = A |y|^{-2} (1 - |y|²)^{1/2}, so
    // u(0) = 4πA ∫_0^{1/2} (1 - r²)^{1/2} ψ(r) dr.
    let oracle = 4.0 * PI / (2.0 * PI * PI)
        * adaptive_quad(
            |r: f64| (1.0 - r * r).sqrt() * oracle_bump(&[r, 0.0, 0.0]),
            0.0,
            0.5,
            1e-14,
        )
        .unwrap();
    let k = kernel31();
    let mut errs = Vec::new();
    for (radial, angular) in [(16, 120), (24, 240)] {
        let grid = ball(radial, angular);
        let psi = Field::from_fn(grid, oracle_bump).unwrap();
        let u = dirichlet_solve(&k, &psi).unwrap();
        let centre = ShellProfile::from_field(&u, 0.5).unwrap().eval_radius(0.0);
        errs.push(rel(centre, oracle));
    }
    assert!(errs[1] < 2e-2, "{errs:?}");
    assert!(errs[1] < errs[0], "{errs:?}");
    assert!(rel(oracle, U0_STAR) < 1e-13);
}

#[test]
fn hls_ratio_is_stable_under_refinement() {
    let params = ModelParams::new(3, 1.0).unwrap();
    let ratio = |radial, angular| {
        let g = Field::from_fn(ball(radial, angular), oracle_bump).unwrap();
        hls_ratio(&g, 4.0, &params).unwrap()
    };
    let coarse = ratio(12, 120);
    let fine = ratio(16, 240);
    assert!(rel(coarse, fine) < 0.1);
    assert!(rel(fine, R_STAR) < 1e-2);
}

#[test]
fn cascade_anchor() {
    let rep = liouville_cascade(&ModelParams::with_exponent(3, 1.0, 2.0).unwrap()).unwrap();
    assert_eq!(rep.m_min, 3);
    assert_eq!(rep.exponents, vec![-0.5, 0.0, 1.0, 3.0]);
    assert_eq!(rep.tau_p, 6.5);
    assert!(rep.passes());
}
