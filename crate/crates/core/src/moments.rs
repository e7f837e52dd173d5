//! Second moments, the EPR and Mancini criteria, and the Schmidt number.

use serde::{Deserialize, Serialize};

use crate::distributions::{joint_kernel, make_density, Form, Model, Params, Plane};
use crate::error::{Error, Result};
use crate::quadrature::QuadTolerance;
use crate::specfun::constants::table;

/// Covariance matrix of a pair of coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cov2 {
    pub var1: f64,
    pub var2: f64,
    pub cov: f64,
}

impl Cov2 {
    pub fn det(&self) -> f64 {
        self.var1 * self.var2 - self.cov * self.cov
    }

    pub fn is_psd(&self) -> bool {
        self.var1 >= 0.0 && self.var2 >= 0.0 && self.cov.abs() <= (self.var1 * self.var2).sqrt() + 1e-12
    }

    /// Largest absolute difference between corresponding entries.
    pub fn max_abs_diff(&self, other: &Cov2) -> f64 {
        (self.var1 - other.var1).abs().max((self.var2 - other.var2).abs()).max((self.cov - other.cov).abs())
    }
}

/// Covariance of a joint density from the quadrature moments of its two
/// factors. Means vanish because both factors are even.
pub fn covariance_numeric(plane: Plane, model: Model, params: &Params, tol: &QuadTolerance) -> Result<Cov2> {
    let kernel = joint_kernel(plane, model, params)?;
    let t = table(tol)?;
    let (var, cov) = kernel.covariance(&t);
    Ok(Cov2 { var1: var, var2: var, cov })
}

/// Closed forms `(1/4)(1 ± 3/P²)` (far field) and `(1/4)(σ² ± 4A₂P²/A₁)`
/// (near field) for the SPDC model.
pub fn covariance_closed(plane: Plane, params: &Params, tol: &QuadTolerance) -> Result<Cov2> {
    params.validate()?;
    let p2 = params.p * params.p;
    let (s, d) = match plane {
        Plane::FarField => (1.0, 3.0 / p2),
        Plane::NearField => {
            let c = table(tol)?.constants();
            (params.sigma * params.sigma, 4.0 * c.a2 / c.a1 * p2)
        }
    };
    Ok(Cov2 { var1: 0.25 * (s + d), var2: 0.25 * (s + d), cov: 0.25 * (s - d) })
}

/// Variances of the conditional densities at a common slice position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionalVariances {
    /// `(Δq̃₁|q̃₂)²`
    pub var_q: f64,
    /// `(Δx̃₁|x̃₂)²`
    pub var_x: f64,
    /// `(Δq̃₁|q̃₂)²·P²`, i.e. `(Δq₁|q₂)²L/k_p`.
    pub var_q_norm: f64,
    /// `(Δx̃₁|x̃₂)²/P²`, i.e. `(Δx₁|x₂)²k_p/L`.
    pub var_x_norm: f64,
    pub err_q: f64,
    pub err_x: f64,
}

impl ConditionalVariances {
    fn new(p: f64, var_q: f64, var_x: f64, err_q: f64, err_x: f64) -> Self {
        let p2 = p * p;
        ConditionalVariances { var_q, var_x, var_q_norm: var_q * p2, var_x_norm: var_x / p2, err_q, err_x }
    }
}

/// Conditional variances of a model at the origin slice, by quadrature.
pub fn conditional_variances(params: &Params, model: Model, tol: &QuadTolerance) -> Result<ConditionalVariances> {
    conditional_variances_at(params, model, 0.0, tol)
}

/// Conditional variances with photon 2 fixed at `at` in both planes.
pub fn conditional_variances_at(
    params: &Params,
    model: Model,
    at: f64,
    tol: &QuadTolerance,
) -> Result<ConditionalVariances> {
    let far = make_density(Plane::FarField, model, Form::ConditionalAt(at), *params, tol)?;
    let near = make_density(Plane::NearField, model, Form::ConditionalAt(at), *params, tol)?;
    let vq = far.variance()?;
    let vx = near.variance()?;
    Ok(ConditionalVariances::new(params.p, vq.value, vx.value, vq.err, vx.err))
}

/// Closed-form origin-slice variances of the Gaussian model:
/// `1/(1+αP²)` and `σ²αP²/(σ²+αP²)`.
pub fn gaussian_conditional_variances(alpha: f64, params: &Params) -> Result<ConditionalVariances> {
    params.validate()?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::domain("gaussian_conditional_variances", format!("alpha must be positive, got {alpha}")));
    }
    let ap2 = alpha * params.p * params.p;
    let s2 = params.sigma * params.sigma;
    Ok(ConditionalVariances::new(params.p, 1.0 / (1.0 + ap2), s2 * ap2 / (s2 + ap2), 0.0, 0.0))
}

/// `K = (1/4)(σ₊/δ₋ + δ₋/σ₊)²`
pub fn schmidt_number(sigma_plus: f64, delta_minus: f64) -> Result<f64> {
    if !(sigma_plus > 0.0 && delta_minus > 0.0 && sigma_plus.is_finite() && delta_minus.is_finite()) {
        return Err(Error::domain(
            "schmidt_number",
            format!("widths must be positive, got ({sigma_plus}, {delta_minus})"),
        ));
    }
    let r = sigma_plus / delta_minus;
    Ok(0.25 * (r + 1.0 / r).powi(2))
}

/// Product of conditional variances against the 1/4 threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EprResult {
    pub var_x_cond: f64,
    pub var_q_cond: f64,
    pub product: f64,
    pub err_estimate: f64,
    /// `product < 1/4`
    pub entangled: bool,
    /// `product > 1/4`, impossible for a Gaussian state.
    pub nongaussian_witness: bool,
}

impl EprResult {
    pub fn from_variances(v: &ConditionalVariances) -> Self {
        let product = v.var_x * v.var_q;
        EprResult {
            var_x_cond: v.var_x,
            var_q_cond: v.var_q,
            product,
            err_estimate: v.var_x * v.err_q + v.var_q * v.err_x,
            entangled: product < 0.25,
            nongaussian_witness: product > 0.25,
        }
    }
}

/// EPR product of the SPDC model at the origin slice.
pub fn epr_product(params: &Params, tol: &QuadTolerance) -> Result<EprResult> {
    Ok(EprResult::from_variances(&conditional_variances(params, Model::Spdc, tol)?))
}

/// EPR product of the Gaussian model (closed form).
pub fn epr_product_gaussian(alpha: f64, params: &Params) -> Result<EprResult> {
    Ok(EprResult::from_variances(&gaussian_conditional_variances(alpha, params)?))
}

/// `[Δ(q̃₁+q̃₂)]²·[Δ(x̃₁−x̃₂)]²`; entanglement is certified below 1.
pub fn mancini_product(params: &Params, model: Model, tol: &QuadTolerance) -> Result<f64> {
    let far = joint_kernel(Plane::FarField, model, params)?;
    let near = joint_kernel(Plane::NearField, model, params)?;
    let t = table(tol)?;
    let sum_var = far.sum.variance(&t);
    let diff_var = near.diff.variance(&t);
    Ok(sum_var * diff_var)
}

/// P at which the SPDC Mancini product equals 1: `√(A₁/(4A₂))`.
pub fn mancini_boundary(tol: &QuadTolerance) -> Result<f64> {
    let c = table(tol)?.constants();
    Ok((c.a1 / (4.0 * c.a2)).sqrt())
}

const CROSSING_BRACKETS: [(f64, f64); 2] = [(0.1, 1.0), (1.0, 5.0)];

/// P where the SPDC EPR product crosses 1/4, below and above its maximum.
///
/// Bisection to 1e-4 in P followed by one Newton step on a central difference.
pub fn find_epr_crossings(tol: &QuadTolerance) -> Result<(f64, f64)> {
    let g = |p: f64| -> Result<f64> { Ok(epr_product(&Params::with_p(p)?, tol)?.product - 0.25) };
    let roots: Vec<f64> =
        CROSSING_BRACKETS.iter().map(|&(lo, hi)| find_root(&g, lo, hi, 1e-4)).collect::<Result<_>>()?;
    Ok((roots[0], roots[1]))
}

fn find_root(g: &impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64> {
    let (f_lo, f_hi) = (g(lo)?, g(hi)?);
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Bracket { lo, hi, f_lo, f_hi });
    }
    let mut sign_lo = f_lo.signum();
    while hi - lo > xtol {
        let mid = 0.5 * (lo + hi);
        let fm = g(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == sign_lo {
            lo = mid;
            sign_lo = fm.signum();
        } else {
            hi = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    let h = 0.25 * xtol;
    let slope = (g(x + h)? - g(x - h)?) / (2.0 * h);
    let newton = x - g(x)? / slope;
    // Keep the bisection answer if the step leaves the bracket.
    Ok(if slope.is_finite() && newton > lo && newton < hi { newton } else { x })
}
