//! Cross-checks of the factorized and closed-form routes against generic
//! machinery: a dense eigen-solver, iterated 2-D quadrature and a discrete
//! Hankel transform.

use std::f64::consts::{E, LN_2, PI};

use nalgebra::Matrix4;
use spdc_ng::entropy::negentropy_1d;
use spdc_ng::quadrature::{integrate_1d, integrate_2d};
use spdc_ng::*;

fn tol() -> QuadTolerance {
    QuadTolerance::default()
}

/// Symplectic eigenvalues from the symmetric matrix `−V½ΩVΩV½`, whose
/// eigenvalues are `ν²`, each twice.
fn dense_symplectic(v: &TwoModeCov) -> [f64; 2] {
    let m = v.matrix();
    let v = Matrix4::from_fn(|i, j| m[i][j]);
    let omega = Matrix4::new(
        0.0, 1.0, 0.0, 0.0, //
        -1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, -1.0, 0.0,
    );
    let eig = v.symmetric_eigen();
    let root =
        eig.eigenvectors * Matrix4::from_diagonal(&eig.eigenvalues.map(f64::sqrt)) * eig.eigenvectors.transpose();
    let k = -(root * omega * v * omega * root);
    let mut nu: Vec<f64> = k.symmetric_eigen().eigenvalues.iter().map(|x| x.sqrt()).collect();
    nu.sort_by(f64::total_cmp);
    assert!((nu[0] - nu[1]).abs() < 1e-9 && (nu[2] - nu[3]).abs() < 1e-9, "{nu:?}");
    [nu[0], nu[2]]
}

#[test]
fn symplectic_spectrum_matches_dense_solver() {
    for p in [0.1, 1.0, 5.0] {
        let v = two_mode_cov(&Params::with_p(p).unwrap(), &tol()).unwrap();
        let s = symplectic_spectrum(&v).unwrap();
        let dense = dense_symplectic(&v);
        assert!((dense[0] - s.nu_plus).abs() < 1e-9, "{p}: {dense:?} {s:?}");
        assert!((dense[1] - s.nu_minus).abs() < 1e-9, "{p}: {dense:?} {s:?}");
    }
    let vacuum = TwoModeCov { a: 0.5, b: 0.5, c: 0.0, d: 0.0 };
    let nu = dense_symplectic(&vacuum);
    assert!((nu[0] - 0.5).abs() < 1e-12 && (nu[1] - 0.5).abs() < 1e-12);
}

#[test]
fn gaussian_joint_moments_by_2d_quadrature() {
    for (plane, alpha, p) in [(Plane::FarField, 0.72, 1.0), (Plane::NearField, 0.45, 2.0)] {
        let d =
            make_density(plane, Model::Gaussian { alpha }, Form::Joint, Params::with_p(p).unwrap(), &tol()).unwrap();
        let f = |x: f64, y: f64| d.eval(&[x, y]).unwrap();
        let line = Domain::full_line();
        let mass = integrate_2d(f, &line, &line, &tol()).unwrap();
        let var = integrate_2d(|x, y| x * x * f(x, y), &line, &line, &tol()).unwrap();
        let cov = integrate_2d(|x, y| x * y * f(x, y), &line, &line, &tol()).unwrap();
        let plogp = integrate_2d(
            |x, y| {
                let v = f(x, y);
                if v > 0.0 {
                    v * v.ln()
                } else {
                    0.0
                }
            },
            &line,
            &line,
            &tol(),
        )
        .unwrap();
        let c = covariance_numeric(plane, Model::Gaussian { alpha }, &d.params, &tol()).unwrap();
        assert!((mass.value - 1.0).abs() < 1e-8);
        assert!((var.value - c.var1).abs() < 1e-8 && (cov.value - c.cov).abs() < 1e-8, "{var:?} {cov:?} {c:?}");
        let h = differential_entropy(&d).unwrap();
        assert!((-plogp.value / LN_2 - h.value).abs() < 1e-7, "{plogp:?} {h:?}");
    }
}

#[test]
fn spdc_joint_entropy_by_iterated_quadrature() {
    // Far field, P = 1: S has unit scale, D = sinc²(((x₁−x₂)/2)²).
    let d = make_density(Plane::FarField, Model::Spdc, Form::Joint, Params::with_p(1.0).unwrap(), &tol()).unwrap();
    let loose = QuadTolerance::new(1e-12, 1e-9, 4000, 1e-12).unwrap();
    let ell = d.kernel.diff.scale;
    let inner = |x1: f64| -> f64 {
        let (lo, hi) = (-x1 - 9.0, -x1 + 9.0);
        let mut nodes = Vec::new();
        let mut k = 1.0;
        loop {
            let w = ell * (k * PI).sqrt();
            if x1 - w < lo && x1 + w > hi {
                break;
            }
            nodes.extend([x1 - w, x1 + w]);
            k += 1.0;
        }
        let dom = Domain::finite(lo, hi).unwrap().with_breakpoints(nodes);
        integrate_1d(
            |x2| {
                let v = d.eval(&[x1, x2]).unwrap();
                if v > 1e-300 {
                    v * v.ln()
                } else {
                    0.0
                }
            },
            &dom,
            &loose,
        )
        .unwrap()
        .value
    };
    let w_max: f64 = 40.0;
    let outer_nodes: Vec<f64> =
        (1..).map(|k| 0.5 * ell * (k as f64 * PI).sqrt()).take_while(|x| *x < w_max).flat_map(|x| [-x, x]).collect();
    let outer = Domain::finite(-w_max, w_max).unwrap().with_breakpoints(outer_nodes);
    let plogp = integrate_1d(inner, &outer, &QuadTolerance::new(1e-9, 1e-7, 2000, 1e-12).unwrap()).unwrap();
    let h = differential_entropy(&d).unwrap();
    // The box drops a tail of relative size ~1e-4.
    assert!((-plogp.value / LN_2 - h.value).abs() < 2e-3, "{} vs {}", -plogp.value / LN_2, h.value);
}

#[test]
fn covariances_match_closed_forms() {
    for p in [0.1, 0.5, 1.0, 2.0, 5.0] {
        for plane in [Plane::FarField, Plane::NearField] {
            let params = Params::with_p(p).unwrap();
            let n = covariance_numeric(plane, Model::Spdc, &params, &tol()).unwrap();
            let c = covariance_closed(plane, &params, &tol()).unwrap();
            assert!(n.max_abs_diff(&c) < 1e-5 * c.var1.max(1.0), "{plane:?} {p}: {n:?} {c:?}");
        }
    }
}

/// `J₀(x) = (1/π)∫₀^π cos(x sin θ) dθ` by the trapezoid rule, which converges
/// geometrically for this periodic integrand.
fn bessel_j0(x: f64) -> f64 {
    let m = (x.abs() / 1.5) as usize + 32;
    let h = PI / m as f64;
    let s: f64 = (1..m).map(|i| (x * (i as f64 * h).sin()).cos()).sum();
    (s + 0.5 * (1.0 + 1.0)) / m as f64
}

#[test]
fn sinc_and_sint_form_a_radial_fourier_pair() {
    // (1/2π)∫d²q sinc(b|q|²/2) e^{iq·ρ} = ∫₀^∞ q J₀(qρ) sinc(bq²/2) dq = (π/2b) sint(ρ²/2b)
    let b = 0.7;
    let discrete = |q_max: f64, rho: f64| -> f64 {
        let h = 0.02 * 2.0 * PI / (b * q_max);
        let n = (q_max / h) as usize;
        let f = |q: f64| q * bessel_j0(q * rho) * sinc(0.5 * b * q * q).unwrap();
        let inner: f64 = (1..n).map(|i| f(i as f64 * h)).sum();
        h * (inner + 0.5 * f(n as f64 * h))
    };
    for rho in [0.5, 1.0, 2.0, 3.0] {
        let exact = PI / (2.0 * b) * sint(rho * rho / (2.0 * b)).unwrap();
        let coarse = (discrete(30.0, rho) - exact).abs();
        let fine = (discrete(120.0, rho) - exact).abs();
        assert!(fine < coarse && fine < 5e-4, "ρ={rho}: {coarse} → {fine}");
    }
}

#[test]
fn negentropy_is_additive_on_product_densities() {
    let f = |x: f64| Shape::Sinc2.eval(x);
    let w = 8.0;
    let nodes: Vec<f64> = (1..).map(|k| (k as f64 * PI).sqrt()).take_while(|x| *x < w).flat_map(|x| [-x, x]).collect();
    let dom = Domain::finite(-w, w).unwrap().with_breakpoints(nodes.clone());
    let one = negentropy_1d(f, &dom, &tol()).unwrap();

    let g = |x: f64, y: f64| f(x) * f(y);
    let mass = integrate_2d(g, &dom, &dom, &tol()).unwrap().value;
    let m2 = integrate_2d(|x, y| x * x * g(x, y), &dom, &dom, &tol()).unwrap().value / mass;
    let mxy = integrate_2d(|x, y| x * y * g(x, y), &dom, &dom, &tol()).unwrap().value / mass;
    let plogp = integrate_2d(
        |x, y| {
            let v = g(x, y);
            if v > 1e-300 {
                v * v.ln()
            } else {
                0.0
            }
        },
        &dom,
        &dom,
        &tol(),
    )
    .unwrap()
    .value;
    let h = mass.ln() - plogp / mass;
    let hg = (2.0 * PI * E).ln() + 0.5 * (m2 * m2 - mxy * mxy).ln();
    let joint = (hg - h) / LN_2;
    assert!(one.value > 0.05);
    assert!((joint - 2.0 * one.value).abs() < 1e-4, "{joint} vs 2×{}", one.value);
}
