//! Structural invariants of the kernels, reflections, Kelvin inversion and
//! solvers, checked on random inputs.

use std::sync::{Arc, OnceLock};

use fracgreen_core::geom::{
    kelvin_point, kelvin_transform, kelvin_weight_exponent, reflect, Hyperplane, InversionCenter,
};
use fracgreen_core::kernel::coords;
use fracgreen_core::params::beta_fn;
use fracgreen_core::solver::{liouville_cascade, GreenOperator};
use fracgreen_core::verify::MIXED_FLOOR;
use fracgreen_core::{
    jacobi_rule, AngularScheme, DomainKind, Grid, Kernel, KernelCoords, ModelParams,
};
use proptest::prelude::*;

const ALPHAS: [f64; 5] = [0.3, 0.5, 1.0, 1.5, 1.8];

fn kernels() -> &'static Vec<Kernel> {
    static K: OnceLock<Vec<Kernel>> = OnceLock::new();
    K.get_or_init(|| {
        (3..=5)
            .flat_map(|n| {
                ALPHAS
                    .iter()
                    .map(move |&a| Kernel::new(ModelParams::new(n, a).unwrap()))
            })
            .collect()
    })
}

fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum()
}

/// Kernel index plus two raw 5-vectors, cut to the kernel's dimension.
fn kernel_and_pair() -> impl Strategy<Value = (usize, Vec<f64>, Vec<f64>)> {
    (
        0..15usize,
        prop::collection::vec(-1.0..1.0f64, 5),
        prop::collection::vec(-1.0..1.0f64, 5),
    )
}

/// `v ↦ v/(1+|v|)` onto the open unit ball.
fn into_ball(v: &[f64]) -> Vec<f64> {
    let r = norm_sq(v).sqrt();
    v.iter().map(|c| c / (1.0 + r)).collect()
}

fn ball_pair(k: &Kernel, x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = k.params().n;
    (into_ball(&x[..n]), into_ball(&y[..n]))
}

/// Map `[-1,1]^n` into the half-space box `[-2,2]^{n-1} × (0, 3)`.
fn half_pair(k: &Kernel, x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = k.params().n;
    let lift = |v: &[f64]| -> Vec<f64> {
        let mut w: Vec<f64> = v[..n].iter().map(|c| 2.0 * c).collect();
        w[n - 1] = 1.5 * (v[n - 1] + 1.0) + 1e-3;
        w
    };
    (lift(x), lift(y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn green_is_symmetric((ki, x, y) in kernel_and_pair()) {
        let k = &kernels()[ki];
        let (bx, by) = ball_pair(k, &x, &y);
        prop_assume!(bx != by);
        prop_assert_eq!(
            k.green(DomainKind::UnitBall, &bx, &by).unwrap(),
            k.green(DomainKind::UnitBall, &by, &bx).unwrap()
        );
        let (hx, hy) = half_pair(k, &x, &y);
        prop_assume!(hx != hy);
        prop_assert_eq!(
            k.green(DomainKind::HalfSpace, &hx, &hy).unwrap(),
            k.green(DomainKind::HalfSpace, &hy, &hx).unwrap()
        );
    }

    #[test]
    fn green_is_positive_and_below_the_riesz_kernel((ki, x, y) in kernel_and_pair()) {
        let k = &kernels()[ki];
        for (domain, (p, q)) in [
            (DomainKind::UnitBall, ball_pair(k, &x, &y)),
            (DomainKind::HalfSpace, half_pair(k, &x, &y)),
        ] {
            if !(domain.contains_open(&p) && domain.contains_open(&q)) {
                continue;
            }
            let c = coords(domain, &p, &q).unwrap();
            prop_assume!(c.s > 1e-6 && c.t > 1e-6);
            let g = k.green(domain, &p, &q).unwrap();
            prop_assert!(g > 0.0, "{domain:?} {p:?} {q:?}");
            prop_assert!(g < k.riesz_bound(c.s), "{domain:?} {g} {}", k.riesz_bound(c.s));
        }
    }

    #[test]
    fn bracket_lies_strictly_between_zero_and_one(
        ki in 0..15usize, ls in -4.0..4.0f64, lt in -4.0..4.0f64,
    ) {
        let k = &kernels()[ki];
        let (s, t) = (10f64.powf(ls), 10f64.powf(lt));
        let b = k.bracket(KernelCoords::new(s, t)).unwrap();
        prop_assert!(b > 0.0 && b <= 1.0, "{b}");
        // 1 - bracket ~ (s/t)^{(n-α)/2}; below half an ulp of 1 it rounds away.
        let p = k.params();
        if (s / t).powf((p.dim() - p.alpha) / 2.0) > 1e-12 {
            prop_assert!(b < 1.0, "{b}");
        }
    }

    #[test]
    fn h_decreases_in_s_and_increases_in_t(
        ki in 0..15usize, ls in -3.0..3.0f64, lt in -3.0..3.0f64, step in 0.01..1.0f64,
    ) {
        let k = &kernels()[ki];
        let (s, t) = (10f64.powf(ls), 10f64.powf(lt));
        let f = 10f64.powf(step);
        let h = |s, t| k.h(KernelCoords::new(s, t)).unwrap();
        prop_assert!(h(s, t) > h(s * f, t));
        prop_assert!(h(s, t) < h(s, t * f));
    }

    #[test]
    fn mixed_difference_of_h_is_negative(
        ki in 0..15usize, ls in -3.0..3.0f64, lt in -3.0..3.0f64,
        ds in 0.05..1.0f64, dt in 0.05..1.0f64,
    ) {
        let k = &kernels()[ki];
        let (s1, t1) = (10f64.powf(ls), 10f64.powf(lt));
        let (s2, t2) = (s1 * 10f64.powf(ds), t1 * 10f64.powf(dt));
        let h = |s, t| k.h(KernelCoords::new(s, t)).unwrap();
        let terms = [h(s2, t2), h(s2, t1), h(s1, t2), h(s1, t1)];
        let mixed = terms[0] - terms[1] - terms[2] + terms[3];
        let scale: f64 = terms.iter().map(|v| v.abs()).sum();
        prop_assert!(mixed < MIXED_FLOOR * scale, "{mixed} at scale {scale}");
    }

    #[test]
    fn reflection_preserves_the_squared_distances(
        n in 3..6usize, axis in 1..6usize, lam in -3.0..3.0f64,
        x in prop::collection::vec(-3.0..3.0f64, 5),
        y in prop::collection::vec(-3.0..3.0f64, 5),
    ) {
        prop_assume!(axis <= n);
        let plane = Hyperplane::new(axis, lam);
        let (x, y) = (&x[..n], &y[..n]);
        let (xr, yr) = (reflect(x, plane), reflect(y, plane));
        let s = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>();
        let tol = 64.0 * f64::EPSILON * (1.0 + lam * lam + norm_sq(x) + norm_sq(y));
        prop_assert!((s(x, y) - s(&xr, &yr)).abs() <= tol);
        prop_assert!((s(&xr, y) - s(x, &yr)).abs() <= tol);
        let twice = reflect(&xr, plane)[axis - 1];
        prop_assert!((twice - x[axis - 1]).abs() <= 8.0 * f64::EPSILON * (lam.abs() + x[axis - 1].abs()));
    }

    #[test]
    fn domain_factor_orders_the_reflected_pairs_in_the_ball(
        axis in 1..4usize, lam in -0.95..-0.05f64,
        v in prop::collection::vec(-1.0..1.0f64, 3),
        w in prop::collection::vec(-1.0..1.0f64, 3),
        fx in 0.01..0.99f64, fy in 0.01..0.99f64,
    ) {
        let plane = Hyperplane::new(axis, lam);
        // Point of Σ_λ: the other coordinates inside radius sqrt(1-λ²), the
        // axis coordinate between the sphere and the plane.
        let place = |v: &[f64], f: f64| -> Vec<f64> {
            let mut rest = v.to_vec();
            rest[axis - 1] = 0.0;
            let r = norm_sq(&rest).sqrt();
            let cap = (1.0 - lam * lam).sqrt();
            let mut x: Vec<f64> = rest.iter().map(|c| c * cap / (1.0 + r)).collect();
            let low = -(1.0 - norm_sq(&x)).sqrt();
            x[axis - 1] = low + f * (lam - low);
            x
        };
        let (x, y) = (place(&v, fx), place(&w, fy));
        prop_assume!(x != y);
        let t = |a: &[f64], b: &[f64]| coords(DomainKind::UnitBall, a, b).unwrap().t;
        let (xr, yr) = (reflect(&x, plane), reflect(&y, plane));
        let both = t(&xr, &yr);
        let (one, two) = (t(&x, &yr), t(&xr, &y));
        prop_assert!(both > one.max(two));
        prop_assert!(one.min(two) > t(&x, &y));
    }

    #[test]
    fn domain_factor_orders_the_reflected_pairs_in_the_half_space(
        lam in 0.05..2.0f64, fx in 0.01..0.99f64, fy in 0.01..0.99f64,
        x in prop::collection::vec(-2.0..2.0f64, 2),
        y in prop::collection::vec(-2.0..2.0f64, 2),
    ) {
        let plane = Hyperplane::new(3, lam);
        let x = [x[0], x[1], fx * lam];
        let y = [y[0], y[1], fy * lam];
        let t = |a: &[f64], b: &[f64]| coords(DomainKind::HalfSpace, a, b).unwrap().t;
        let (xr, yr) = (reflect(&x, plane), reflect(&y, plane));
        prop_assert!(t(&xr, &yr) > t(&x, &yr).max(t(&xr, &y)));
        prop_assert!(t(&x, &yr).min(t(&xr, &y)) > t(&x, &y));
    }

    #[test]
    fn kelvin_inversion_is_an_involution_preserving_the_half_space(
        ki in 0..15usize, v in prop::collection::vec(-2.0..2.0f64, 5), z in -1.0..1.0f64,
        xn in 0.01..3.0f64,
    ) {
        let k = &kernels()[ki];
        let params = *k.params();
        let n = params.n;
        let mut z0 = vec![0.0; n];
        z0[0] = z;
        let c = InversionCenter::new(z0).unwrap();
        let mut x = v[..n].to_vec();
        x[n - 1] = xn;
        let xh = kelvin_point(&x, &c).unwrap();
        prop_assert!(xh[n - 1] > 0.0);
        let back = kelvin_point(&xh, &c).unwrap();
        for (a, b) in back.iter().zip(&x) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + norm_sq(&x)));
        }
        let u = |y: &[f64]| 1.0 + y[n - 1] * (-norm_sq(y)).exp();
        let once = kelvin_transform(u, &c, &params);
        let twice = kelvin_transform(|y: &[f64]| once(y).unwrap(), &c, &params);
        let got = twice(&x).unwrap();
        prop_assert!((got - u(&x)).abs() <= 1e-12 * u(&x), "{got} {}", u(&x));
    }

    #[test]
    fn kelvin_weight_exponent_vanishes_exactly_at_the_critical_power(
        n in 3..6usize, alpha in 0.05..1.95f64, frac in 0.0..1.0f64,
    ) {
        let crit = (n as f64 + alpha) / (n as f64 - alpha);
        let p = 1.0 + (crit - 1.0) * frac.max(1e-6);
        let beta = kelvin_weight_exponent(&ModelParams::with_exponent(n, alpha, p).unwrap()).unwrap();
        prop_assert!(beta >= 0.0);
        prop_assert!((beta - (n as f64 - alpha) * (crit - p)).abs() < 1e-12);
        let at_crit = kelvin_weight_exponent(&ModelParams::with_exponent(n, alpha, crit).unwrap()).unwrap();
        prop_assert!(at_crit.abs() < 1e-14);
    }

    #[test]
    fn jacobi_rule_integrates_one_to_the_beta_function(
        m in 1..60usize, a in -0.95..3.0f64, b in -0.95..3.0f64,
    ) {
        let rule = jacobi_rule(m, a, b).unwrap();
        let total = rule.integrate(|_| 1.0);
        let want = beta_fn(a + 1.0, b + 1.0);
        prop_assert!((total - want).abs() <= 1e-12 * want, "{total} {want}");
        prop_assert!(rule.nodes().iter().all(|&u| u > 0.0 && u < 1.0));
        prop_assert!(rule.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn cascade_recursion_matches_its_closed_form(
        n in 3..8usize, alpha in 0.05..1.95f64, frac in 0.001..1.0f64,
    ) {
        let crit = (n as f64 + alpha) / (n as f64 - alpha);
        let p = 1.0 + (crit - 1.0) * frac;
        let rep = liouville_cascade(&ModelParams::with_exponent(n, alpha, p).unwrap()).unwrap();
        prop_assert!(rep.passes(), "{rep:?}");
        prop_assert_eq!(rep.exponents.len(), rep.m_min + 1);
        prop_assert!(rep.f_identity_gap <= 1e-12 * (1.0 + rep.f_p.abs()));
    }

    #[test]
    fn scaled_ball_kernel_approaches_the_half_space_kernel(
        x in prop::collection::vec(-1.0..1.0f64, 2), y in prop::collection::vec(-1.0..1.0f64, 2),
        xn in 0.3..2.0f64, yn in 0.3..2.0f64,
    ) {
        let k = &kernels()[2];
        let (x, y) = ([x[0], x[1], xn], [y[0], y[1], yn]);
        let exact = k.green(DomainKind::HalfSpace, &x, &y).unwrap();
        let err = |r: f64| (k.green_scaled(r, &x, &y).unwrap() - exact).abs() / exact;
        let (e1, e2, e3) = (err(10.0), err(100.0), err(1000.0));
        prop_assert!(e1 > e2 && e2 > e3, "{e1} {e2} {e3}");
    }
}

fn operator() -> &'static GreenOperator {
    static OP: OnceLock<GreenOperator> = OnceLock::new();
    OP.get_or_init(|| {
        let grid = Arc::new(Grid::ball(3, 4, 120, AngularScheme::IcosahedralOrbit).unwrap());
        GreenOperator::assemble(&kernels()[2], grid).unwrap()
    })
}

/// Orthogonal 3×3 matrix from a Householder reflection times a rotation
/// about `x_3`.
fn orthogonal(v: &[f64], angle: f64) -> Vec<f64> {
    let nv = norm_sq(v);
    let mut h = [0.0; 9];
    for i in 0..3 {
        for j in 0..3 {
            h[i * 3 + j] = f64::from(u8::from(i == j)) - 2.0 * v[i] * v[j] / nv;
        }
    }
    let (c, s) = (angle.cos(), angle.sin());
    let r = [c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0];
    let mut q = vec![0.0; 9];
    for i in 0..3 {
        for j in 0..3 {
            q[i * 3 + j] = (0..3).map(|l| h[i * 3 + l] * r[l * 3 + j]).sum();
        }
    }
    q
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn dirichlet_solution_is_linear_in_the_source(
        a in -3.0..3.0f64, b in -3.0..3.0f64, seed in 0u64..1000,
    ) {
        let op = operator();
        let m = op.len();
        let f: Vec<f64> = (0..m).map(|i| ((i as u64 * 7919 + seed) % 101) as f64 / 50.0 - 1.0).collect();
        let g: Vec<f64> = (0..m).map(|i| ((i as u64 * 104729 + 3 * seed) % 97) as f64 / 48.0 - 1.0).collect();
        let combo: Vec<f64> = f.iter().zip(&g).map(|(x, y)| a * x + b * y).collect();
        let (uf, ug, uc) = (op.apply(&f), op.apply(&g), op.apply(&combo));
        let scale = uf.iter().chain(&ug).fold(0.0f64, |s, v| s.max(v.abs())) * (a.abs() + b.abs() + 1.0);
        for i in 0..m {
            prop_assert!((uc[i] - a * uf[i] - b * ug[i]).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn dirichlet_solution_commutes_with_rotations(
        v in prop::collection::vec(-1.0..1.0f64, 3), angle in 0.0..6.2f64,
    ) {
        prop_assume!(norm_sq(&v) > 1e-2);
        let op = operator();
        let rotated = Arc::new(op.grid().rotated(&orthogonal(&v, angle)).unwrap());
        let rop = GreenOperator::assemble(&kernels()[2], rotated).unwrap();
        let g: Vec<f64> = op.grid().points().map(|x| 1.0 + x[0] - 0.5 * x[1] * x[2]).collect();
        let (u, ur) = (op.apply(&g), rop.apply(&g));
        let scale = u.iter().fold(0.0f64, |s, x| s.max(x.abs()));
        for (p, q) in u.iter().zip(&ur) {
            prop_assert!((p - q).abs() <= 1e-10 * scale, "{p} {q}");
        }
    }
}
