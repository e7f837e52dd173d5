//! Two-mode covariance matrix of the photon pair and the Gaussian-state
//! quantities derived from it: symplectic spectrum, purity, von Neumann
//! entropy and the relative-entropy non-Gaussianity δ_B.
//!
//! Position–momentum cross correlations are taken to vanish, so the matrix
//! over `(x̃₁, q̃₁, x̃₂, q̃₂)` is fixed by four scalars. Symplectic eigenvalues
//! are the moduli of the eigenvalues of `iΩV`; a minimum-uncertainty mode has
//! `ν = 1/2`.

use serde::{Deserialize, Serialize};

use crate::distributions::{Params, Plane};
use crate::error::{Error, Result};
use crate::moments::covariance_closed;
use crate::quadrature::QuadTolerance;

/// `V = [[a,0,c,0],[0,b,0,d],[c,0,a,0],[0,d,0,b]]` over `(x̃₁, q̃₁, x̃₂, q̃₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoModeCov {
    /// `Var x̃ᵢ`
    pub a: f64,
    /// `Var q̃ᵢ`
    pub b: f64,
    /// `Cov(x̃₁, x̃₂)`
    pub c: f64,
    /// `Cov(q̃₁, q̃₂)`
    pub d: f64,
}

impl TwoModeCov {
    pub fn matrix(&self) -> [[f64; 4]; 4] {
        let TwoModeCov { a, b, c, d } = *self;
        [[a, 0.0, c, 0.0], [0.0, b, 0.0, d], [c, 0.0, a, 0.0], [0.0, d, 0.0, b]]
    }

    /// `(a² − c²)(b² − d²)`
    pub fn det(&self) -> f64 {
        (self.a * self.a - self.c * self.c) * (self.b * self.b - self.d * self.d)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a - self.c.abs() > 0.0 && self.b - self.d.abs() > 0.0
    }
}

/// Covariance matrix of the SPDC pair from the closed-form moments.
pub fn two_mode_cov(params: &Params, tol: &QuadTolerance) -> Result<TwoModeCov> {
    let x = covariance_closed(Plane::NearField, params, tol)?;
    let q = covariance_closed(Plane::FarField, params, tol)?;
    Ok(TwoModeCov { a: x.var1, b: q.var1, c: x.cov, d: q.cov })
}

/// Symplectic eigenvalues of the `x̃₁ ± x̃₂`, `q̃₁ ± q̃₂` modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymplecticSpectrum {
    pub nu_plus: f64,
    pub nu_minus: f64,
}

impl SymplecticSpectrum {
    pub fn values(&self) -> [f64; 2] {
        [self.nu_plus, self.nu_minus]
    }
}

/// `ν± = √((a ± c)(b ± d))`. Rejects matrices that are not positive definite
/// or violate the uncertainty bound `ν ≥ 1/2`.
pub fn symplectic_spectrum(v: &TwoModeCov) -> Result<SymplecticSpectrum> {
    if !v.is_positive_definite() {
        return Err(Error::domain("symplectic_spectrum", format!("covariance matrix is not positive definite: {v:?}")));
    }
    let nu_plus = ((v.a + v.c) * (v.b + v.d)).sqrt();
    let nu_minus = ((v.a - v.c) * (v.b - v.d)).sqrt();
    if nu_plus < 0.5 - 1e-9 || nu_minus < 0.5 - 1e-9 {
        return Err(Error::domain(
            "symplectic_spectrum",
            format!("symplectic eigenvalues ({nu_plus}, {nu_minus}) violate the uncertainty bound 1/2"),
        ));
    }
    Ok(SymplecticSpectrum { nu_plus, nu_minus })
}

/// `μ = Π 1/(2νᵢ)`
pub fn purity(s: &SymplecticSpectrum) -> f64 {
    s.values().iter().map(|nu| 0.5 / nu).product()
}

/// `f(ν) = (ν+½)ln(ν+½) − (ν−½)ln(ν−½)`, with `f(½) = 0`.
fn mode_entropy(nu: f64) -> f64 {
    let hi = nu + 0.5;
    let lo = nu - 0.5;
    let lo_term = if lo <= 0.0 { 0.0 } else { lo * lo.ln() };
    hi * hi.ln() - lo_term
}

/// Von Neumann entropy of the Gaussian state with spectrum `s`, in nats.
pub fn von_neumann_entropy(s: &SymplecticSpectrum) -> f64 {
    s.values().iter().map(|&nu| mode_entropy(nu)).sum()
}

/// δ_B in nats. The two-photon state is pure, so δ_B equals the entropy of
/// its Gaussian reference state.
pub fn delta_b(params: &Params, tol: &QuadTolerance) -> Result<f64> {
    Ok(von_neumann_entropy(&symplectic_spectrum(&two_mode_cov(params, tol)?)?))
}

/// δ_B in bits.
pub fn delta_b_bits(params: &Params, tol: &QuadTolerance) -> Result<f64> {
    Ok(delta_b(params, tol)? / std::f64::consts::LN_2)
}
