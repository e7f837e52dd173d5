//! Integrals of the canonical shapes over the full line, and the universal
//! constants derived from them. Computed on first use per tolerance and kept
//! for the life of the process.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::Shape;
use crate::error::{Error, QuadContext, Result};
use crate::quadrature::{
    integrate_1d, integrate_fourier_tail, integrate_panels, Domain, Estimate, QuadTolerance, Transform,
};

/// `∫φ`, `∫w²φ` and `∫φ ln φ` over the whole line for one shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeIntegrals {
    pub shape: Shape,
    pub mass: Estimate,
    pub second_moment: Estimate,
    pub log_integral: Estimate,
}

impl ShapeIntegrals {
    /// Variance of the density `φ/∫φ`.
    pub fn variance(&self) -> f64 {
        self.second_moment.value / self.mass.value
    }

    /// Differential entropy of `φ/∫φ`, in nats.
    pub fn entropy_nats(&self) -> Estimate {
        let m = self.mass;
        m.ln() - self.log_integral / m
    }

    /// Negentropy of `φ/∫φ`, in bits. Independent of any rescaling of `w`.
    pub fn negentropy_bits(&self) -> Estimate {
        let hg = 0.5 * (2.0 * PI * std::f64::consts::E * self.variance()).ln();
        let rel_var_err = self.second_moment.err / self.second_moment.value + self.mass.err / self.mass.value;
        let h = self.entropy_nats();
        Estimate::new(hg - h.value, h.err + 0.5 * rel_var_err).scale(1.0 / std::f64::consts::LN_2)
    }
}

/// Universal constants of the phase-matching kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeConstants {
    /// `∫ sint²(ξ²) dξ` over the full line.
    pub a1: f64,
    /// `∫ ξ² sint²(ξ²) dξ` over the full line.
    pub a2: f64,
    /// `∫₀^∞ sinc²(v²) ln sinc²(v²) dv` (half line).
    pub i_ff: f64,
    /// `∫ sint²(s²) ln sint²(s²) ds` over the full line. With these limits
    /// the near-field joint entropy constant comes out as 1.434 bits.
    pub i_nf: f64,
    /// `∫ξ² sinc²(ξ²) dξ / ∫ sinc²(ξ²) dξ`; exactly 3/4.
    pub sinc_moment_ratio: f64,
    pub errors: ShapeConstantErrors,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeConstantErrors {
    pub a1: f64,
    pub a2: f64,
    pub i_ff: f64,
    pub i_nf: f64,
    pub sinc_moment_ratio: f64,
}

pub(crate) struct ShapeTable {
    pub gauss: ShapeIntegrals,
    pub sinc2: ShapeIntegrals,
    pub sint2: ShapeIntegrals,
}

impl ShapeTable {
    pub fn get(&self, shape: Shape) -> &ShapeIntegrals {
        match shape {
            Shape::Gauss => &self.gauss,
            Shape::Sinc2 => &self.sinc2,
            Shape::Sint2 => &self.sint2,
        }
    }

    pub fn constants(&self) -> ShapeConstants {
        let (s, t) = (&self.sinc2, &self.sint2);
        let ratio = s.second_moment / s.mass;
        ShapeConstants {
            a1: t.mass.value,
            a2: t.second_moment.value,
            i_ff: 0.5 * s.log_integral.value,
            i_nf: t.log_integral.value,
            sinc_moment_ratio: ratio.value,
            errors: ShapeConstantErrors {
                a1: t.mass.err,
                a2: t.second_moment.err,
                i_ff: 0.5 * s.log_integral.err,
                i_nf: t.log_integral.err,
                sinc_moment_ratio: ratio.err,
            },
        }
    }
}

type Key = (u64, u64, usize, u64);
type Slot = Arc<OnceLock<Result<Arc<ShapeTable>>>>;

fn key(tol: &QuadTolerance) -> Key {
    (tol.abs_tol.to_bits(), tol.rel_tol.to_bits(), tol.max_subdivisions, tol.tail_cutoff.to_bits())
}

/// The memoized table for `tol`; each tolerance is computed exactly once even
/// under concurrent first access.
pub(crate) fn table(tol: &QuadTolerance) -> Result<Arc<ShapeTable>> {
    static CACHE: OnceLock<Mutex<HashMap<Key, Slot>>> = OnceLock::new();
    tol.validate().context("shape constants")?;
    let slot = {
        let mut map = CACHE.get_or_init(Default::default).lock().unwrap_or_else(|p| p.into_inner());
        map.entry(key(tol)).or_default().clone()
    };
    slot.get_or_init(|| compute_table(tol).map(Arc::new)).clone()
}

/// Shape constants at the requested tolerance (memoized).
pub fn shape_constants(tol: &QuadTolerance) -> Result<ShapeConstants> {
    Ok(table(tol)?.constants())
}

/// Full-line integrals of one canonical shape (memoized).
pub fn shape_integrals(shape: Shape, tol: &QuadTolerance) -> Result<ShapeIntegrals> {
    Ok(*table(tol)?.get(shape))
}

fn compute_table(tol: &QuadTolerance) -> Result<ShapeTable> {
    // The constants feed every downstream quantity; ask for two more digits.
    let tol = tol.tightened(1e-2);
    Ok(ShapeTable {
        gauss: gauss_integrals(&tol)?,
        sinc2: oscillatory_integrals(Shape::Sinc2, &tol)?,
        sint2: oscillatory_integrals(Shape::Sint2, &tol)?,
    })
}

fn gauss_integrals(tol: &QuadTolerance) -> Result<ShapeIntegrals> {
    let d = Domain::full_line();
    let phi = |w: f64| Shape::Gauss.eval(w);
    Ok(ShapeIntegrals {
        shape: Shape::Gauss,
        mass: integrate_1d(phi, &d, tol).context("∫ exp(−w²/2)")?,
        second_moment: integrate_1d(|w| w * w * phi(w), &d, tol).context("∫ w² exp(−w²/2)")?,
        log_integral: integrate_1d(|w| -0.5 * w * w * phi(w), &d, tol).context("∫ φ ln φ, Gauss")?,
    })
}

/// Number of kernel periods integrated directly before the tail split.
const HEAD_PERIODS: u64 = 16;

/// `x ln x` with the analytic limit at 0.
#[inline]
pub(crate) fn xlnx(x: f64) -> f64 {
    if x <= 1e-300 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `2∫₀^∞ w^m K(w²) dw` for `m ∈ {0, 2}`: direct over the first periods, then
/// in `t = w²` split into a smooth part and a Fourier tail.
fn moment(shape: Shape, m: i32, tol: &QuadTolerance) -> Result<Estimate> {
    let name = format!("∫ w^{m} φ(w) dw for {shape:?}");
    let nodes: Vec<f64> = (0..=HEAD_PERIODS).map(Shape::node).collect();
    let f = |w: f64| [w.powi(m) * shape.eval(w)];
    let [head] = integrate_panels(&f, &nodes, tol, [0.0]).context(name.clone())?;
    let t0 = HEAD_PERIODS as f64 * PI;
    let beta = 0.5 * (m - 1) as f64;
    let smooth = integrate_1d(
        |t| t.powf(beta) * shape.tail_parts(t).0,
        &Domain::half_line(t0).with_transform(Transform::PowerLaw { scale: t0 }),
        tol,
    )
    .context(name.clone())?;
    let osc = integrate_fourier_tail(
        |t| {
            let (_, c, s) = shape.tail_parts(t);
            let p = t.powf(beta);
            (p * c, p * s)
        },
        t0,
        2.0,
        tol,
    )
    .context(name)?;
    Ok(head.scale(2.0) + smooth + osc)
}

/// `∫ φ ln φ` over the full line, truncated where the envelope drops below
/// `tail_cutoff`; the envelope bound of the remainder is part of the error.
fn log_integral(shape: Shape, tol: &QuadTolerance) -> Result<Estimate> {
    let name = format!("∫ φ ln φ for {shape:?}");
    // Envelope c/w⁴ beyond the cut.
    let c_env = match shape {
        Shape::Sinc2 => 1.0,
        _ => 4.0 / (PI * PI) * 1.001,
    };
    let w_cut = (c_env / tol.tail_cutoff).powf(0.25).max(10.0);
    let k_cut = ((w_cut * w_cut) / PI).ceil() as u64;
    let w_cut = Shape::node(k_cut);
    let w3 = w_cut.powi(3);
    let remainder = c_env * ((4.0 * w_cut.ln() - c_env.ln()) / (3.0 * w3) + 4.0 / (9.0 * w3));

    let head_nodes = [0.0, Shape::node(1)];
    let fw = |w: f64| [xlnx(shape.eval(w))];
    let [head] = integrate_panels(&fw, &head_nodes, tol, [0.0]).context(name.clone())?;
    let body_nodes: Vec<f64> = (1..=k_cut).map(|k| k as f64 * PI).collect();
    let ft = |t: f64| [xlnx(shape.kernel(t)) / t.sqrt()];
    let [body] = integrate_panels(&ft, &body_nodes, tol, [0.0]).context(name)?;
    // body is 2∫ dw over [√π, w_cut] already (dw = dt / 2√t).
    Ok(head.scale(2.0) + body + Estimate::new(0.0, 2.0 * remainder))
}

fn oscillatory_integrals(shape: Shape, tol: &QuadTolerance) -> Result<ShapeIntegrals> {
    let mass = moment(shape, 0, tol)?;
    let second_moment = moment(shape, 2, tol)?;
    let log_integral = log_integral(shape, tol)?;
    if !(mass.value > 0.0 && second_moment.value > 0.0 && log_integral.value < 0.0) {
        return Err(Error::domain("shape_constants", format!("implausible integrals for {shape:?}")));
    }
    Ok(ShapeIntegrals { shape, mass, second_moment, log_integral })
}
