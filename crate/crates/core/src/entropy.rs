//! Differential entropies and negentropies (in bits) of the joint,
//! conditional and marginal densities, and the non-Gaussianity report.
//!
//! Joint entropies factorize in the rotated coordinates `ξ₁ ± ξ₂`; slices and
//! marginals are integrated directly.

use std::f64::consts::{E, LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::distributions::{make_density, matched_alpha, DensitySpec, Form, Model, Params, Plane};
use crate::error::{QuadContext, Result};
use crate::moments::gaussian_conditional_variances;
use crate::quadrature::{integrate_vec, Domain, Estimate, QuadTolerance};
use crate::specfun::constants::{table, xlnx, ShapeTable};
use crate::specfun::Shape;

/// `N = H[Gaussian with the same covariance] − H[p]`, all in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NegentropyValue {
    pub value: f64,
    pub h_actual: f64,
    pub h_gaussian: f64,
    pub err_estimate: f64,
}

impl NegentropyValue {
    fn from_nats(h: Estimate, hg: Estimate) -> Self {
        let (h_actual, h_gaussian) = (h.value / LN_2, hg.value / LN_2);
        NegentropyValue { value: h_gaussian - h_actual, h_actual, h_gaussian, err_estimate: (h.err + hg.err) / LN_2 }
    }
}

/// `½ ln(2πe·var)` for each of `dim` coordinates sharing `det`.
fn gaussian_nats(dim: usize, det: f64) -> f64 {
    0.5 * dim as f64 * (2.0 * PI * E).ln() + 0.5 * det.ln()
}

/// Relative error of a factor's variance, as carried by the shape table.
fn variance_rel_err(t: &ShapeTable, shape: Shape) -> f64 {
    let s = t.get(shape);
    s.second_moment.err / s.second_moment.value + s.mass.err / s.mass.value
}

/// `(H, H_G)` in nats.
fn entropies_nats(spec: &DensitySpec) -> Result<(Estimate, Estimate)> {
    let tol = &spec.tol;
    let t = spec.shape_table()?;
    let k = &spec.kernel;
    match spec.form {
        Form::Joint => {
            let h = k.entropy_nats(&t);
            let (var, cov) = k.covariance(&t);
            let rel = variance_rel_err(&t, k.sum.shape) + variance_rel_err(&t, k.diff.shape);
            Ok((h, Estimate::new(gaussian_nats(2, var * var - cov * cov), 0.5 * rel)))
        }
        Form::ConditionalAt(v) => {
            let s = k.slice_integrals(v, tol).context(format!("entropy of the slice at {v}"))?;
            let h = s.mass.ln() - s.plogp / s.mass;
            let mean = s.first / s.mass;
            let var = s.second / s.mass - mean * mean;
            Ok((h, Estimate::new(gaussian_nats(1, var.value), 0.5 * var.err / var.value)))
        }
        Form::Marginal => {
            let [z, mlnm] = k.marginal_integrals(&t, tol).context("entropy of the marginal")?;
            let h = z.ln() - mlnm / z;
            let var = k.covariance(&t).0;
            let rel = variance_rel_err(&t, k.sum.shape) + variance_rel_err(&t, k.diff.shape);
            Ok((h, Estimate::new(gaussian_nats(1, var), 0.5 * rel)))
        }
    }
}

/// `H = −∫ p log₂ p`, one- or two-dimensional per the form.
pub fn differential_entropy(spec: &DensitySpec) -> Result<Estimate> {
    Ok(entropies_nats(spec)?.0.scale(1.0 / LN_2))
}

/// Entropy of the Gaussian joint density with the SPDC covariance:
/// `log₂(πe√3/P)` (far field) and `log₂(2πe·σ√(A₂/A₁)·P)` (near field).
pub fn gaussian_entropy_closed(plane: Plane, params: &Params, tol: &QuadTolerance) -> Result<f64> {
    params.validate()?;
    let p = params.p;
    Ok(match plane {
        Plane::FarField => (PI * E * 3.0_f64.sqrt() / p).log2(),
        Plane::NearField => {
            let c = table(tol)?.constants();
            (2.0 * PI * E * params.sigma * (c.a2 / c.a1).sqrt() * p).log2()
        }
    })
}

/// Negentropy against the Gaussian with the density's own mean and covariance.
pub fn negentropy(spec: &DensitySpec) -> Result<NegentropyValue> {
    let (h, hg) = entropies_nats(spec)?;
    Ok(NegentropyValue::from_nats(h, hg))
}

/// Negentropy of an arbitrary 1-D density `f` (normalized internally),
/// integrated over `domain`.
pub fn negentropy_1d<F>(f: F, domain: &Domain, tol: &QuadTolerance) -> Result<NegentropyValue>
where
    F: Fn(f64) -> f64 + Sync,
{
    let [z, m1, m2, plogp] = integrate_vec(
        |x| {
            let v = f(x);
            [v, x * v, x * x * v, xlnx(v)]
        },
        domain,
        tol,
    )
    .context("1-D negentropy")?;
    let mean = m1 / z;
    let var = m2 / z - mean * mean;
    let h = z.ln() - plogp / z;
    Ok(NegentropyValue::from_nats(h, Estimate::new(gaussian_nats(1, var.value), 0.5 * var.err / var.value)))
}

/// `H[G(ξ₁|ξ₂=0)] − H[p(ξ₁|ξ₂=0)]` in bits, where `G` is the Gaussian joint
/// density with the same covariance as the SPDC joint. Unlike the negentropy
/// this is not sign-definite.
pub fn conditional_matched_diagnostic(plane: Plane, params: &Params, tol: &QuadTolerance) -> Result<f64> {
    let alpha = matched_alpha(plane, tol)?;
    let g = gaussian_conditional_variances(alpha, params)?;
    let var = match plane {
        Plane::FarField => g.var_q,
        Plane::NearField => g.var_x,
    };
    let slice = make_density(plane, Model::Spdc, Form::ConditionalAt(0.0), *params, tol)?;
    let h = differential_entropy(&slice)?;
    Ok(gaussian_nats(1, var) / LN_2 - h.value)
}

/// The three non-Gaussianity measures at one P, with their parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NgReport {
    pub p: f64,
    pub sigma: f64,
    pub n_ff_joint: f64,
    pub n_nf_joint: f64,
    pub ng_total: f64,
    pub n_ff_cond: f64,
    pub n_nf_cond: f64,
    pub ng_cond: f64,
    pub n_ff_marg: f64,
    pub n_nf_marg: f64,
    pub ng_marg: f64,
    /// `ng_total − ng_cond − ng_marg`
    pub decomposition_residual: f64,
    /// Conditional term with the joint-matched Gaussian as reference.
    pub ng_cond_matched: f64,
    /// `ng_total − ng_cond_matched − ng_marg`
    pub matched_residual: f64,
    /// Sum of the quadrature error estimates of all nine negentropies.
    pub err_estimate: f64,
}

/// All negentropies at `params`; conditionals are taken at the origin slice.
pub fn ng_report(params: &Params, tol: &QuadTolerance) -> Result<NgReport> {
    let n =
        |plane, form| -> Result<NegentropyValue> { negentropy(&make_density(plane, Model::Spdc, form, *params, tol)?) };
    let ffj = n(Plane::FarField, Form::Joint)?;
    let nfj = n(Plane::NearField, Form::Joint)?;
    let ffc = n(Plane::FarField, Form::ConditionalAt(0.0))?;
    let nfc = n(Plane::NearField, Form::ConditionalAt(0.0))?;
    let ffm = n(Plane::FarField, Form::Marginal)?;
    let nfm = n(Plane::NearField, Form::Marginal)?;
    let ng_cond_matched = conditional_matched_diagnostic(Plane::FarField, params, tol)?
        + conditional_matched_diagnostic(Plane::NearField, params, tol)?;
    let ng_total = ffj.value + nfj.value;
    let ng_cond = ffc.value + nfc.value;
    let ng_marg = ffm.value + nfm.value;
    Ok(NgReport {
        p: params.p,
        sigma: params.sigma,
        n_ff_joint: ffj.value,
        n_nf_joint: nfj.value,
        ng_total,
        n_ff_cond: ffc.value,
        n_nf_cond: nfc.value,
        ng_cond,
        n_ff_marg: ffm.value,
        n_nf_marg: nfm.value,
        ng_marg,
        decomposition_residual: ng_total - ng_cond - ng_marg,
        ng_cond_matched,
        matched_residual: ng_total - ng_cond_matched - ng_marg,
        err_estimate: [ffj, nfj, ffc, nfc, ffm, nfm].iter().map(|x| x.err_estimate).sum(),
    })
}

/// Marginal negentropy limits in bits: the far-field marginal tends to the
/// `sinc²(·²)` shape as P → 0 (the near-field one to a Gaussian), and the
/// near-field marginal to the `sint²(·²)` shape as P → ∞ (the far-field one
/// to a Gaussian).
pub fn marginal_negentropy_limits(tol: &QuadTolerance) -> Result<(f64, f64)> {
    let t = table(tol)?;
    Ok((t.sinc2.negentropy_bits().value, t.sint2.negentropy_bits().value))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> QuadTolerance {
        QuadTolerance::default()
    }

    fn joint(plane: Plane, model: Model, p: f64) -> DensitySpec {
        make_density(plane, model, Form::Joint, Params::with_p(p).unwrap(), &tol()).unwrap()
    }

    #[test]
    fn unit_normal_entropy() {
        let n = negentropy_1d(|x| (-0.5 * x * x).exp(), &Domain::full_line(), &tol()).unwrap();
        assert!((n.h_actual - 0.5 * (2.0 * PI * E).log2()).abs() < 1e-10, "{n:?}");
        assert!(n.value.abs() < 1e-10);
    }

    #[test]
    fn joint_entropies() {
        let c = crate::specfun::shape_constants(&tol()).unwrap();
        let ff = differential_entropy(&joint(Plane::FarField, Model::Spdc, 1.0)).unwrap();
        let ff_const = ff.value - (4.0 * 2.0_f64.sqrt() * PI / 3.0).log2();
        assert!((ff_const - 1.17).abs() < 5e-3, "{ff:?}");
        // 1/(2 ln 2)·[1 − 2 i_nf / A₁]
        let nf = differential_entropy(&joint(Plane::NearField, Model::Spdc, 1.0)).unwrap();
        let nf_const = nf.value - ((2.0 * PI).sqrt() * c.a1).log2();
        assert!((nf_const - (1.0 - 2.0 * c.i_nf / c.a1) / (2.0 * LN_2)).abs() < 1e-8);
        assert!((nf_const - 1.434).abs() < 2e-3, "{nf_const}");
    }

    #[test]
    fn gaussian_closed_matches_equivalent() {
        for plane in [Plane::FarField, Plane::NearField] {
            let spec = joint(plane, Model::Spdc, 1.3);
            let g = crate::distributions::gaussian_equivalent(&spec).unwrap();
            let h = differential_entropy(&g).unwrap().value;
            let closed = gaussian_entropy_closed(plane, &spec.params, &tol()).unwrap();
            assert!((h - closed).abs() < 1e-9, "{plane:?}: {h} {closed}");
            assert!(negentropy(&g).unwrap().value.abs() < 1e-12);
        }
    }

    #[test]
    fn joint_negentropies_are_p_independent() {
        for p in [0.05, 1.0, 2.0] {
            let ff = negentropy(&joint(Plane::FarField, Model::Spdc, p)).unwrap().value;
            let nf = negentropy(&joint(Plane::NearField, Model::Spdc, p)).unwrap().value;
            assert!((ff - 0.153_356).abs() < 1e-5 && (nf - 0.226_029).abs() < 1e-5, "{p}: {ff} {nf}");
        }
    }

    #[test]
    fn limits() {
        let (small, large) = marginal_negentropy_limits(&tol()).unwrap();
        assert!((small - 0.154).abs() < 2e-3, "{small}");
        // The reference 0.224 carries the rounded A₂ = 0.5897; with the
        // quadrature A₂ the same closed form gives 0.2260.
        let c = crate::specfun::shape_constants(&tol()).unwrap();
        let closed = (2.0 * PI * E * c.a2 / c.a1.powi(3)).sqrt().log2() + c.i_nf / (c.a1 * LN_2);
        assert!((large - closed).abs() < 1e-8, "{large} {closed}");
        assert!((large - 0.224).abs() < 3e-3, "{large}");
    }
}
