use proptest::prelude::*;
use spdc_ng::entropy::negentropy_1d;
use spdc_ng::gstate::von_neumann_entropy;
use spdc_ng::moments::epr_product_gaussian;
use spdc_ng::*;

fn tol() -> QuadTolerance {
    QuadTolerance::default()
}

fn plane() -> impl Strategy<Value = Plane> {
    prop_oneof![Just(Plane::FarField), Just(Plane::NearField)]
}

fn model() -> impl Strategy<Value = Model> {
    prop_oneof![Just(Model::Spdc), (0.2f64..2.0).prop_map(|alpha| Model::Gaussian { alpha }),]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn joint_densities_are_exchange_symmetric(
        plane in plane(), model in model(), p in 0.05f64..5.0, sigma in 1.0f64..2.0,
        x1 in -6.0f64..6.0, x2 in -6.0f64..6.0,
    ) {
        let d = make_density(plane, model, Form::Joint, Params::new(p, sigma).unwrap(), &tol()).unwrap();
        let a = d.eval(&[x1, x2]).unwrap();
        let b = d.eval(&[x2, x1]).unwrap();
        prop_assert!(a >= 0.0);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn gaussian_epr_is_bounded_by_the_schmidt_identity(alpha in 0.05f64..3.0, p in 0.02f64..10.0) {
        let params = Params::with_p(p).unwrap();
        let r = epr_product_gaussian(alpha, &params).unwrap();
        // Far-field widths: σ₊ = 1, δ₋ = 1/(P√α).
        let k = schmidt_number(1.0, 1.0 / (p * alpha.sqrt())).unwrap();
        prop_assert!(r.product <= 0.25 + 1e-9);
        prop_assert!((r.product - 0.25 / k).abs() < 1e-9);
        prop_assert!(!r.nongaussian_witness);
    }

    #[test]
    fn negentropy_is_scale_invariant(c in 0.1f64..10.0, shift in -3.0f64..3.0) {
        let f = |x: f64| (-x.powi(4)).exp() * (1.0 + 0.5 * (3.0 * x).cos().powi(2));
        let base = negentropy_1d(f, &Domain::full_line(), &tol()).unwrap();
        let scaled = negentropy_1d(
            |x| f((x - shift) / c),
            &Domain::full_line().with_breakpoints([shift]).with_transform(Transform::PowerLaw { scale: c }),
            &tol(),
        )
        .unwrap();
        prop_assert!(base.value > 0.01);
        prop_assert!((base.value - scaled.value).abs() < 1e-6, "{:?} {:?}", base, scaled);
    }

    #[test]
    fn covariance_is_positive_semidefinite(plane in plane(), model in model(), p in 0.05f64..10.0, sigma in 1.0f64..3.0) {
        let c = covariance_numeric(plane, model, &Params::new(p, sigma).unwrap(), &tol()).unwrap();
        prop_assert!(c.is_psd() && c.var1 > 0.0);
    }

    #[test]
    fn mancini_is_quadratic_in_p(p in 0.01f64..10.0) {
        let a = mancini_product(&Params::with_p(p).unwrap(), Model::Spdc, &tol()).unwrap();
        let b = mancini_product(&Params::with_p(2.0 * p).unwrap(), Model::Spdc, &tol()).unwrap();
        prop_assert!((b / a - 4.0).abs() < 1e-9);
    }

    #[test]
    fn spectrum_and_delta_b_do_not_depend_on_p(p in 0.01f64..20.0) {
        let s = symplectic_spectrum(&two_mode_cov(&Params::with_p(p).unwrap(), &tol()).unwrap()).unwrap();
        let r = symplectic_spectrum(&two_mode_cov(&Params::with_p(1.0).unwrap(), &tol()).unwrap()).unwrap();
        prop_assert!((s.nu_plus - r.nu_plus).abs() < 1e-9 && (s.nu_minus - r.nu_minus).abs() < 1e-9);
        prop_assert!(von_neumann_entropy(&s) >= 0.0);
    }

    #[test]
    fn gaussian_slices_have_zero_negentropy(plane in plane(), alpha in 0.2f64..2.0, p in 0.05f64..5.0, v in -2.0f64..2.0) {
        let d = make_density(plane, Model::Gaussian { alpha }, Form::ConditionalAt(v), Params::with_p(p).unwrap(), &tol()).unwrap();
        let n = negentropy(&d).unwrap();
        prop_assert!(n.value.abs() < 1e-6, "{:?}", n);
    }
}

#[test]
fn densities_are_normalized() {
    for p in [0.05, 0.5, 1.0, 2.0, 5.0] {
        for sigma in [1.0, 2.0] {
            let params = Params::new(p, sigma).unwrap();
            for plane in [Plane::FarField, Plane::NearField] {
                let joint = make_density(plane, Model::Spdc, Form::Joint, params, &tol()).unwrap();
                let m = joint.total_mass().unwrap();
                assert!((m.value - 1.0).abs() < 1e-6, "{plane:?} P={p} σ={sigma}: {m:?}");

                let marg = marginal_of(&joint, &tol()).unwrap();
                let m = marg.total_mass().unwrap();
                assert!((m.value - 1.0).abs() < 1e-6, "marginal {plane:?} P={p} σ={sigma}: {m:?}");

                // The slice through its own evaluator, not the stored integrals.
                let cond = conditional_of(&joint, 0.3, &tol()).unwrap();
                let reach = 9.0 * joint.kernel.sum.scale + 1.0;
                let mut nodes = vec![-0.3];
                let ell = joint.kernel.diff.scale;
                let mut k = 1.0;
                while ell * (k * std::f64::consts::PI).sqrt() < reach + 1.0 && k < 1e5 {
                    let w = ell * (k * std::f64::consts::PI).sqrt();
                    nodes.extend([0.3 + w, 0.3 - w]);
                    k += 1.0;
                }
                let dom = Domain::finite(-0.3 - reach, -0.3 + reach).unwrap().with_breakpoints(nodes);
                let m = integrate_1d(|x| cond.eval(&[x]).unwrap(), &dom, &tol()).unwrap();
                assert!((m.value - 1.0).abs() < 1e-6, "conditional {plane:?} P={p} σ={sigma}: {m:?}");
            }
        }
    }
}

fn integrate_1d<F: Fn(f64) -> f64 + Sync>(
    f: F,
    d: &Domain,
    t: &QuadTolerance,
) -> std::result::Result<Estimate, QuadError> {
    spdc_ng::quadrature::integrate_1d(f, d, t)
}

#[test]
fn joint_is_conditional_times_marginal() {
    let tight = QuadTolerance::new(1e-14, 1e-11, 4000, 1e-12).unwrap();
    for (plane, p) in [(Plane::FarField, 0.7), (Plane::NearField, 1.3), (Plane::FarField, 3.0)] {
        // The stored normalizations cancel; the check compares the slice mass
        // with the independently integrated marginal value.
        let joint = make_density(plane, Model::Spdc, Form::Joint, Params::with_p(p).unwrap(), &tol()).unwrap();
        let marg = marginal_of(&joint, &tol()).unwrap();
        for v in [-1.7, -0.45, 0.0, 0.8, 2.1] {
            let cond = conditional_of(&joint, v, &tight).unwrap();
            let mv = marg.eval(&[v]).unwrap();
            for x in [-2.3, -0.6, 0.15, 1.1, 2.7] {
                let j = joint.eval(&[x, v]).unwrap();
                let prod = cond.eval(&[x]).unwrap() * mv;
                assert!((prod - j).abs() <= 1e-9 * j, "{plane:?} P={p} ({x}, {v}): {prod} vs {j}");
            }
        }
    }
}

#[test]
fn gaussian_model_densities_have_zero_negentropy() {
    for alpha in [0.45, 0.72, 1.0] {
        for p in [0.3, 1.0, 3.0] {
            let params = Params::with_p(p).unwrap();
            for plane in [Plane::FarField, Plane::NearField] {
                for form in [Form::Joint, Form::ConditionalAt(0.0), Form::Marginal] {
                    let d = make_density(plane, Model::Gaussian { alpha }, form, params, &tol()).unwrap();
                    let n = negentropy(&d).unwrap();
                    assert!(n.value.abs() < 1e-5, "{plane:?} {form:?} α={alpha} P={p}: {n:?}");
                }
            }
        }
    }
}

#[test]
fn negentropies_are_non_negative() {
    for p in [0.05, 0.3, 1.0, 3.0] {
        let r = ng_report(&Params::with_p(p).unwrap(), &tol()).unwrap();
        for n in [r.n_ff_joint, r.n_nf_joint, r.n_ff_cond, r.n_nf_cond, r.n_ff_marg, r.n_nf_marg] {
            assert!(n >= -1e-6, "{r:?}");
        }
        assert!(r.ng_marg < r.ng_total);
    }
}

#[test]
fn conditional_trends_follow_p() {
    let grid: Vec<f64> = (0..8).map(|i| 0.01 * 300f64.powf(i as f64 / 7.0)).collect();
    let reports: Vec<_> = grid
        .iter()
        .map(|&p| {
            let params = Params::with_p(p).unwrap();
            let ff = negentropy(
                &make_density(Plane::FarField, Model::Spdc, Form::ConditionalAt(0.0), params, &tol()).unwrap(),
            )
            .unwrap();
            let nf = negentropy(
                &make_density(Plane::NearField, Model::Spdc, Form::ConditionalAt(0.0), params, &tol()).unwrap(),
            )
            .unwrap();
            (ff.value, nf.value)
        })
        .collect();
    for w in reports.windows(2) {
        assert!(w[1].0 >= w[0].0 - 1e-9, "{reports:?}");
        assert!(w[1].1 <= w[0].1 + 1e-9, "{reports:?}");
    }
}
