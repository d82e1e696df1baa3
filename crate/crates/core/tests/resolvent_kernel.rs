use std::f64::consts::PI;

use cone_resonances::hankel_zeros::all_zeros;
use cone_resonances::link_spectrum::linear_fit;
use cone_resonances::resolvent_kernel::{
    apply_resolvent, bump, kernel, kernel_check, wronskian, wronskian_closed_form, KernelContext,
    Source,
};
use cone_resonances::specfun::{ComplexPoint, Order};
use cone_resonances::{Complex64, Error};
use proptest::prelude::*;

fn context(a: f64, n: usize, nu: f64, lambda: ComplexPoint) -> KernelContext {
    KernelContext::new(a, n, Order::new(nu).unwrap(), lambda).unwrap()
}

/// For `n = 3`, `ν = 1/2` the radial equation is `(ru)'' + λ²(ru) = r f`;
/// with `v(a) = 0` and `v ~ e^{iλr}` its Green's function is
/// `-sin(λ(x< - a)) e^{iλ(x> - a)} / λ`.
fn elementary_solution(a: f64, lambda: Complex64, f: &dyn Fn(f64) -> Complex64, lo: f64, hi: f64, r: f64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let green = |x: f64, y: f64| {
        let (s, l) = if x <= y { (x, y) } else { (y, x) };
        -(lambda * (s - a)).sin() * (i * lambda * (l - a)).exp() / lambda
    };
    // composite Simpson, split at r
    let simpson = |p: f64, q: f64| {
        let m = 4000;
        let h = (q - p) / m as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..=m {
            let y = p + k as f64 * h;
            let w = if k == 0 || k == m { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += green(r, y) * f(y) * y * w;
        }
        acc * (h / 3.0)
    };
    let v = if r > lo && r < hi {
        simpson(lo, r) + simpson(r, hi)
    } else {
        simpson(lo, hi)
    };
    v / r
}

#[test]
fn resolvent_matches_elementary_green_function() {
    let a = 1.0;
    let lambda = Complex64::new(2.5, 0.4);
    let ctx = context(a, 3, 0.5, ComplexPoint::from_complex(lambda));
    let (lo, hi) = (1.5, 3.5);
    let f = bump(lo, hi);
    let source = Source { lo, hi, f: &f };
    let points = [1.0, 1.2, 1.7, 2.5, 3.1, 3.5, 4.2, 6.0];
    let u = apply_resolvent(&ctx, &source, &points, 32).unwrap();
    for (&r, &got) in points.iter().zip(&u) {
        let expect = elementary_solution(a, lambda, &f, lo, hi, r);
        let scale = expect.norm().max(1e-3);
        assert!((got - expect).norm() <= 1e-9 * scale, "r = {r}: {got} vs {expect}");
    }
}

#[test]
fn second_order_convergence_and_boundary_value() {
    for (a, n, nu, lam) in [
        (1.0, 3, 2.5, Complex64::new(3.0, 0.7)),
        (0.5, 4, 3.0, Complex64::new(4.0, 0.3)),
        (0.0, 3, 1.5, Complex64::new(2.0, 0.5)),
    ] {
        let ctx = context(a, n, nu, ComplexPoint::from_complex(lam));
        let c = kernel_check(&ctx, 0.02).unwrap();
        assert!((3.0..=5.0).contains(&c.ratio), "{c:?}");
        assert!(c.boundary_value <= 10.0 * c.discretization_tolerance, "{c:?}");
        assert!(c.diagonal_jump <= 1e-9, "{c:?}");
        assert!(c.wronskian_deviation <= 1e-9, "{c:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wronskian_closed_form_holds(
        n in 2usize..7,
        nu in 0.0f64..20.0,
        modulus in 0.2f64..10.0,
        arg in 0.01f64..3.13,
        r in 0.2f64..5.0,
    ) {
        let ctx = context(1.0, n, nu, ComplexPoint::new(modulus, arg));
        let w = wronskian(&ctx, r).unwrap();
        let e = wronskian_closed_form(n, r);
        prop_assert!((w - e).norm() <= 1e-9 * e.norm(), "{:e}", (w - e).norm() / e.norm());
    }

    #[test]
    fn kernel_is_symmetric_and_continuous(
        nu in 0.0f64..10.0,
        modulus in 0.5f64..6.0,
        arg in 0.05f64..3.0,
        r in 1.0f64..4.0,
        rt in 1.0f64..4.0,
    ) {
        let ctx = context(1.0, 3, nu, ComplexPoint::new(modulus, arg));
        let k1 = kernel(&ctx, r, rt).unwrap();
        let k2 = kernel(&ctx, rt, r).unwrap();
        prop_assert!((k1 - k2).norm() <= 1e-13 * k1.norm().max(1e-300));
        let e = 1e-12 * r;
        let below = kernel(&ctx, r, r - e).unwrap();
        let above = kernel(&ctx, r, r + e).unwrap();
        let at = kernel(&ctx, r, r).unwrap();
        prop_assert!((above - below).norm() <= 1e-9 * at.norm());
    }
}

/// `|K|` against the distance to a refined resonance, on both adjacent
/// sheets.
#[test]
fn kernel_blows_up_like_inverse_distance_at_resonances() {
    let nu = 7.5;
    let a = 1.0;
    let zero = all_zeros(Order::new(nu).unwrap()).unwrap().zeros[1].refined;
    let sheets = [
        ComplexPoint::from_complex(zero.conj() / a),
        ComplexPoint::new(zero.norm() / a, PI + zero.arg()),
    ];
    for res in sheets {
        let distances = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4];
        let mut x = Vec::new();
        let mut y = Vec::new();
        for d in distances {
            let lam = ComplexPoint::new(res.modulus + d, res.argument);
            let k = kernel(&context(a, 3, nu, lam), 1.4, 2.2).unwrap();
            x.push(d.ln());
            y.push(k.norm().ln());
        }
        let (slope, _) = linear_fit(&x, &y).unwrap();
        assert!((slope + 1.0).abs() <= 0.1, "sheet arg {}: slope {slope}", res.argument);
        // at the resonance itself the pole is reported
        assert!(matches!(kernel(&context(a, 3, nu, res), 1.4, 2.2), Err(Error::Pole { .. })));
    }
}

#[test]
fn evaluation_below_the_boundary_is_rejected() {
    let ctx = context(1.0, 3, 1.0, ComplexPoint::new(2.0, 0.3));
    assert!(matches!(kernel(&ctx, 0.5, 2.0), Err(Error::Domain(_))));
    let f = bump(0.5, 2.0);
    let s = Source { lo: 0.5, hi: 2.0, f: &f };
    assert!(matches!(apply_resolvent(&ctx, &s, &[1.5], 16), Err(Error::Domain(_))));
}
