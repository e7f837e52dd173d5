//! Two-photon densities in dimensionless transverse coordinates.
//!
//! Every joint density has the form `n·S(ξ₁+ξ₂)·D(ξ₁−ξ₂)` with a Gaussian
//! pump factor `S` and a phase-matching factor `D`:
//!
//! | plane, model      | `S` scale | `D`                        |
//! |-------------------|-----------|----------------------------|
//! | far, SPDC         | 1         | `sinc²` with scale `2/P`   |
//! | near, SPDC        | σ         | `sint²` with scale `2P`    |
//! | far, Gaussian(α)  | 1         | Gauss with scale `1/(P√α)` |
//! | near, Gaussian(α) | σ         | Gauss with scale `P√α`     |

mod kernel;

pub use kernel::{Factor, JointKernel};

use serde::{Deserialize, Serialize};

use crate::error::{Error, QuadContext, Result};
use crate::quadrature::{Estimate, QuadTolerance};
use crate::specfun::constants::{table, ShapeTable};
use crate::specfun::Shape;

/// Optional physical provenance of the dimensionless parameters (SI units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalSetup {
    pub crystal_length: f64,
    pub pump_wavenumber: f64,
    pub beam_waist: f64,
    /// Distance of the crystal center from the pump waist.
    pub plane_z: f64,
}

impl PhysicalSetup {
    /// `z₀ = k_p w₀²/2`
    pub fn diffraction_length(&self) -> f64 {
        0.5 * self.pump_wavenumber * self.beam_waist * self.beam_waist
    }
}

/// Dimensionless geometry: `P = √(L/2z₀)` and the near-field broadening `σ ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub p: f64,
    pub sigma: f64,
    pub physical: Option<PhysicalSetup>,
}

impl Params {
    pub fn new(p: f64, sigma: f64) -> Result<Self> {
        let params = Params { p, sigma, physical: None };
        params.validate()?;
        Ok(params)
    }

    /// `σ = 1`.
    pub fn with_p(p: f64) -> Result<Self> {
        Self::new(p, 1.0)
    }

    pub fn from_physical(setup: PhysicalSetup) -> Result<Self> {
        let PhysicalSetup { crystal_length, pump_wavenumber, beam_waist, plane_z } = setup;
        if ![crystal_length, pump_wavenumber, beam_waist].iter().all(|x| *x > 0.0 && x.is_finite())
            || !plane_z.is_finite()
        {
            return Err(Error::domain("Params::from_physical", format!("invalid physical setup {setup:?}")));
        }
        let z0 = setup.diffraction_length();
        let p = (crystal_length / (2.0 * z0)).sqrt();
        let sigma = (1.0 + (plane_z / z0).powi(2)).sqrt();
        let params = Params { p, sigma, physical: Some(setup) };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p.is_finite()) {
            return Err(Error::domain("Params", format!("P must be positive and finite, got {}", self.p)));
        }
        if !(self.sigma >= 1.0 && self.sigma.is_finite()) {
            return Err(Error::domain("Params", format!("sigma must be >= 1, got {}", self.sigma)));
        }
        if let Some(ph) = self.physical {
            let z0 = ph.diffraction_length();
            let p = (ph.crystal_length / (2.0 * z0)).sqrt();
            let sigma = (1.0 + (ph.plane_z / z0).powi(2)).sqrt();
            if (p - self.p).abs() > 1e-12 * p || (sigma - self.sigma).abs() > 1e-12 * sigma {
                return Err(Error::domain("Params", "P and sigma disagree with the physical setup"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Plane {
    /// Momentum correlations (Fourier plane).
    FarField,
    /// Position correlations (image plane of the crystal).
    NearField,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Spdc,
    Gaussian { alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Form {
    Joint,
    /// `p(ξ₁ | ξ₂ = fixed)`
    ConditionalAt(f64),
    /// `p(ξ₂) = ∫ p(ξ₁, ξ₂) dξ₁`
    Marginal,
}

/// Gaussian exponent α whose density has the same covariance as the SPDC
/// density on `plane`.
pub fn matched_alpha(plane: Plane, tol: &QuadTolerance) -> Result<f64> {
    let t = table(tol)?;
    Ok(match plane {
        // Var(d) = (2/P)²·(3/4) = 1/(αP²)
        Plane::FarField => 1.0 / (4.0 * t.sinc2.variance()),
        // Var(d) = (2P)²·A2/A1 = αP²
        Plane::NearField => 4.0 * t.sint2.variance(),
    })
}

pub(crate) fn joint_kernel(plane: Plane, model: Model, params: &Params) -> Result<JointKernel> {
    params.validate()?;
    let p = params.p;
    let sum = match plane {
        Plane::FarField => Factor::new(Shape::Gauss, 1.0),
        Plane::NearField => Factor::new(Shape::Gauss, params.sigma),
    };
    let diff = match (plane, model) {
        (Plane::FarField, Model::Spdc) => Factor::new(Shape::Sinc2, 2.0 / p),
        (Plane::NearField, Model::Spdc) => Factor::new(Shape::Sint2, 2.0 * p),
        (_, Model::Gaussian { alpha }) if !(alpha > 0.0 && alpha.is_finite()) => {
            return Err(Error::domain("make_density", format!("alpha must be positive, got {alpha}")))
        }
        (Plane::FarField, Model::Gaussian { alpha }) => Factor::new(Shape::Gauss, 1.0 / (p * alpha.sqrt())),
        (Plane::NearField, Model::Gaussian { alpha }) => Factor::new(Shape::Gauss, p * alpha.sqrt()),
    };
    Ok(JointKernel { sum, diff })
}

/// A fully specified density with its normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySpec {
    pub plane: Plane,
    pub model: Model,
    pub form: Form,
    pub params: Params,
    /// Multiplies the kernel (joint, conditional slice or marginal integral).
    pub norm: f64,
    pub kernel: JointKernel,
    /// Tolerance used for on-demand marginal evaluations.
    pub tol: QuadTolerance,
}

/// Build a density. Joint and marginal normalizations come from the
/// quadrature-derived shape integrals; a conditional slice is normalized by
/// integrating it.
pub fn make_density(
    plane: Plane,
    model: Model,
    form: Form,
    params: Params,
    tol: &QuadTolerance,
) -> Result<DensitySpec> {
    tol.validate().context("density construction")?;
    let kernel = joint_kernel(plane, model, &params)?;
    let norm = match form {
        Form::Joint | Form::Marginal => 1.0 / kernel.mass(&*table(tol)?).value,
        Form::ConditionalAt(v) => {
            if !v.is_finite() {
                return Err(Error::domain("make_density", format!("slice position must be finite, got {v}")));
            }
            let mass = kernel.slice_integrals(v, tol).context(format!("normalization of the slice at {v}"))?.mass.value;
            if mass.is_nan() || mass <= 0.0 {
                return Err(Error::DegenerateSlice { at: v });
            }
            1.0 / mass
        }
    };
    Ok(DensitySpec { plane, model, form, params, norm, kernel, tol: *tol })
}

/// `p(ξ₂)` of a joint density.
pub fn marginal_of(spec: &DensitySpec, tol: &QuadTolerance) -> Result<DensitySpec> {
    spec.require_joint("marginal_of")?;
    make_density(spec.plane, spec.model, Form::Marginal, spec.params, tol)
}

/// `p(ξ₁ | ξ₂ = v)` of a joint density.
pub fn conditional_of(spec: &DensitySpec, v: f64, tol: &QuadTolerance) -> Result<DensitySpec> {
    spec.require_joint("conditional_of")?;
    make_density(spec.plane, spec.model, Form::ConditionalAt(v), spec.params, tol)
}

/// The Gaussian-model joint density with the same (zero) mean and covariance.
pub fn gaussian_equivalent(spec: &DensitySpec) -> Result<DensitySpec> {
    spec.require_joint("gaussian_equivalent")?;
    let alpha = match spec.model {
        Model::Gaussian { alpha } => alpha,
        Model::Spdc => matched_alpha(spec.plane, &spec.tol)?,
    };
    make_density(spec.plane, Model::Gaussian { alpha }, Form::Joint, spec.params, &spec.tol)
}

impl DensitySpec {
    fn require_joint(&self, op: &str) -> Result<()> {
        if self.form == Form::Joint {
            Ok(())
        } else {
            Err(Error::Usage(format!("{op} needs a joint density, got {:?}", self.form)))
        }
    }

    /// Number of coordinates the density takes.
    pub fn arity(&self) -> usize {
        match self.form {
            Form::Joint => 2,
            _ => 1,
        }
    }

    pub(crate) fn shape_table(&self) -> Result<std::sync::Arc<ShapeTable>> {
        table(&self.tol)
    }

    /// Density value at `point` (one or two coordinates, per the form).
    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.arity() {
            return Err(Error::Usage(format!(
                "{:?} density takes {} coordinate(s), got {}",
                self.form,
                self.arity(),
                point.len()
            )));
        }
        if let Some(x) = point.iter().find(|x| !x.is_finite()) {
            return Err(Error::domain("eval", format!("non-finite coordinate {x}")));
        }
        Ok(match self.form {
            Form::Joint => self.norm * self.kernel.value(point[0], point[1]),
            Form::ConditionalAt(v) => self.norm * self.kernel.value(point[0], v),
            Form::Marginal => {
                let m = self
                    .kernel
                    .marginal_raw(point[0], &self.tol.tightened(0.1))
                    .context(format!("marginal at {}", point[0]))?;
                self.norm * m.value
            }
        })
    }

    /// Mean of a 1-D form (slices may be off-center), zero for joint and
    /// marginal forms by symmetry of both factors.
    pub fn mean(&self) -> Result<f64> {
        Ok(match self.form {
            Form::ConditionalAt(v) => {
                let s = self.kernel.slice_integrals(v, &self.tol).context("slice mean")?;
                s.first.value / s.mass.value
            }
            _ => 0.0,
        })
    }

    /// Variance of a 1-D form, or of either coordinate of a joint form.
    pub fn variance(&self) -> Result<Estimate> {
        match self.form {
            Form::ConditionalAt(v) => {
                let s = self.kernel.slice_integrals(v, &self.tol).context("slice variance")?;
                let mean = s.first / s.mass;
                Ok(s.second / s.mass - mean * mean)
            }
            _ => {
                let t = self.shape_table()?;
                Ok(Estimate::exact(self.kernel.covariance(&t).0))
            }
        }
    }

    /// `∫ p` computed independently of the stored normalization.
    pub fn total_mass(&self) -> Result<Estimate> {
        let t = self.shape_table()?;
        match self.form {
            Form::Joint => {
                let d = crate::quadrature::Domain::full_line();
                let (s, dd) = (self.kernel.sum, self.kernel.diff);
                let su = crate::quadrature::integrate_1d(|x| s.value(x), &d, &self.tol).context("∫ S")?;
                let du = crate::quadrature::integrate_1d(
                    |x| dd.value(x),
                    &d.clone()
                        .with_transform(crate::quadrature::Transform::Truncated {
                            coeff: dd.scale.powi(4),
                            exponent: 4.0,
                        })
                        .with_breakpoints(nodes_for(&dd, self.tol.tail_cutoff)),
                    &self.tol,
                )
                .context("∫ D")?;
                Ok((su * du).scale(0.5 * self.norm))
            }
            Form::ConditionalAt(v) => {
                let s = self.kernel.slice_integrals(v, &self.tol).context("slice mass")?;
                Ok(s.mass.scale(self.norm))
            }
            Form::Marginal => {
                let [m, _] = self.kernel.marginal_integrals(&t, &self.tol).context("marginal mass")?;
                Ok(m.scale(self.norm))
            }
        }
    }
}

/// Oscillation nodes of a factor centered at 0, out to where its envelope
/// drops below `cutoff`.
fn nodes_for(f: &Factor, cutoff: f64) -> Vec<f64> {
    if !f.shape.is_oscillatory() {
        return Vec::new();
    }
    let w = f.reach(cutoff) / f.scale;
    let kmax = (w * w / std::f64::consts::PI) as u64;
    (1..=kmax)
        .flat_map(|k| {
            let x = f.scale * Shape::node(k);
            [-x, x]
        })
        .collect()
}
