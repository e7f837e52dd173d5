//! Elementary kernels: sinc, the sine integral, sint, the Gaussian matching
//! exponent and the canonical phase-matching shapes.

pub(crate) mod constants;

pub use constants::{shape_constants, shape_integrals, ShapeConstants, ShapeIntegrals};

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Power series below this argument, auxiliary functions above.
const SERIES_LIMIT: f64 = 4.0;
/// Continued fraction below this argument, asymptotic series above.
const ASYMPTOTIC_LIMIT: f64 = 40.0;

fn check_finite(op: &'static str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, format!("non-finite argument {x}")))
    }
}

/// `sin(x)/x` with the removable singularity at 0.
pub fn sinc(x: f64) -> Result<f64> {
    check_finite("sinc", x)?;
    Ok(sinc_raw(x))
}

#[inline]
pub(crate) fn sinc_raw(x: f64) -> f64 {
    if x.abs() < 1e-5 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Sine integral `Si(x) = ∫₀ˣ sin t / t dt`.
pub fn sine_integral(x: f64) -> Result<f64> {
    check_finite("sine_integral", x)?;
    Ok(si_raw(x))
}

pub(crate) fn si_raw(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= SERIES_LIMIT {
        si_series(ax)
    } else {
        let (f, g) = aux_fg(ax);
        FRAC_PI_2 - f * ax.cos() - g * ax.sin()
    };
    v.copysign(x)
}

fn si_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x; // x^(2n+1) / (2n+1)!
    let mut sum = x;
    for n in 1..60 {
        let k = (2 * n) as f64;
        term *= -x2 / (k * (k + 1.0));
        let add = term / (k + 1.0);
        sum += add;
        if add.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// `sint(x) = 1 − (2/π) Si(x)` for `x ≥ 0`.
pub fn sint(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 || x.is_infinite() {
        return Err(Error::domain("sint", format!("argument must be finite and >= 0, got {x}")));
    }
    Ok(sint_raw(x))
}

/// Above the series limit the value is assembled from the auxiliary
/// functions directly, avoiding the cancellation in `1 − (2/π)Si`.
#[inline]
pub(crate) fn sint_raw(x: f64) -> f64 {
    if x <= SERIES_LIMIT {
        1.0 - FRAC_2_PI * si_series(x)
    } else {
        let (f, g) = aux_fg(x);
        FRAC_2_PI * (f * x.cos() + g * x.sin())
    }
}

/// Auxiliary functions of the sine/cosine integrals for `x > 0`:
/// `f(x) = ∫₀^∞ e^{−xt}/(1+t²) dt`, `g(x) = ∫₀^∞ t e^{−xt}/(1+t²) dt`.
/// Both are positive with `f < 1/x` and `g < 1/x²`.
pub(crate) fn aux_fg(x: f64) -> (f64, f64) {
    debug_assert!(x > 0.0);
    if x >= ASYMPTOTIC_LIMIT {
        aux_asymptotic(x)
    } else {
        aux_continued_fraction(x)
    }
}

fn aux_asymptotic(x: f64) -> (f64, f64) {
    let y = 1.0 / (x * x);
    // f ~ (1/x) Σ (−1)^k (2k)! y^k,  g ~ y Σ (−1)^k (2k+1)! y^k
    let (mut tf, mut tg) = (1.0_f64, 1.0_f64);
    let (mut sf, mut sg) = (1.0_f64, 1.0_f64);
    for k in 1..40 {
        let kk = (2 * k) as f64;
        let nf = -tf * (kk - 1.0) * kk * y;
        let ng = -tg * kk * (kk + 1.0) * y;
        if nf.abs() >= tf.abs() {
            break;
        }
        tf = nf;
        tg = ng;
        sf += tf;
        sg += tg;
        if tf.abs() < 1e-17 && tg.abs() < 1e-17 {
            break;
        }
    }
    (sf / x, sg * y)
}

/// Modified Lentz evaluation of `e^{z}E₁(z)` at `z = ix`, which equals `g − i f`.
fn aux_continued_fraction(x: f64) -> (f64, f64) {
    const TINY: f64 = 1e-300;
    #[derive(Clone, Copy)]
    struct C(f64, f64);
    impl C {
        fn add(self, o: C) -> C {
            C(self.0 + o.0, self.1 + o.1)
        }
        fn mul(self, o: C) -> C {
            C(self.0 * o.0 - self.1 * o.1, self.0 * o.1 + self.1 * o.0)
        }
        fn scale(self, s: f64) -> C {
            C(self.0 * s, self.1 * s)
        }
        fn inv(self) -> C {
            let d = self.0 * self.0 + self.1 * self.1;
            C(self.0 / d, -self.1 / d)
        }
    }
    let mut b = C(1.0, x);
    let mut c = C(1.0 / TINY, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 2..10_000 {
        let a = -((i - 1) as f64).powi(2);
        b = b.add(C(2.0, 0.0));
        d = d.scale(a).add(b).inv();
        c = b.add(c.inv().scale(a));
        let del = c.mul(d);
        h = h.mul(del);
        if (del.0 - 1.0).abs() + del.1.abs() < 1e-16 {
            break;
        }
    }
    (-h.1, h.0)
}

/// Exponent α of the Gaussian `exp(−α u)` that meets `sinc(u)` at the given
/// fraction of the peak, `α = −ln(level)/u*` with `u*` the first crossing.
pub fn matching_alpha(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::domain("matching_alpha", format!("level must lie in (0,1), got {level}")));
    }
    // sinc decreases from 1 to 0 on [0, π].
    let (mut lo, mut hi) = (0.0_f64, PI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sinc_raw(mid) > level {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    let u = 0.5 * (lo + hi);
    Ok(-level.ln() / u)
}

/// Canonical phase-matching profiles `φ(w)` with `φ(0) = 1`; each is a
/// function of `t = w²`, `φ(w) = K(w²)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// `exp(−w²/2)`
    Gauss,
    /// `sinc²(w²)`, the far-field difference kernel.
    Sinc2,
    /// `sint²(w²)`, the near-field difference kernel.
    Sint2,
}

impl Shape {
    /// `φ(w)`.
    #[inline]
    pub fn eval(self, w: f64) -> f64 {
        self.kernel(w * w)
    }

    /// `K(t)` with `φ(w) = K(w²)`.
    #[inline]
    pub fn kernel(self, t: f64) -> f64 {
        match self {
            Shape::Gauss => (-0.5 * t).exp(),
            Shape::Sinc2 => {
                let s = sinc_raw(t);
                s * s
            }
            Shape::Sint2 => {
                let s = sint_raw(t);
                s * s
            }
        }
    }

    /// An upper bound on `|φ(w)|`, non-increasing in `|w|`.
    #[inline]
    pub fn envelope(self, w: f64) -> f64 {
        let w2 = w * w;
        match self {
            Shape::Gauss => (-0.5 * w2).exp(),
            Shape::Sinc2 => (1.0 / (w2 * w2)).min(1.0),
            Shape::Sint2 => {
                let inv = 1.0 / (w2 * w2);
                (4.0 / (PI * PI) * inv * (1.0 + inv)).min(1.0)
            }
        }
    }

    /// Whether the kernel oscillates (has a chirped `cos 2t` tail).
    pub fn is_oscillatory(self) -> bool {
        !matches!(self, Shape::Gauss)
    }

    /// Split of the kernel for `t ≥ 4`:
    /// `K(t) = smooth(t) + c(t) cos 2t + s(t) sin 2t` with smooth,
    /// non-oscillating `smooth`, `c`, `s`. Returns `(smooth, c, s)`.
    pub(crate) fn tail_parts(self, t: f64) -> (f64, f64, f64) {
        match self {
            Shape::Gauss => ((-0.5 * t).exp(), 0.0, 0.0),
            Shape::Sinc2 => {
                let h = 0.5 / (t * t);
                (h, -h, 0.0)
            }
            Shape::Sint2 => {
                let (f, g) = aux_fg(t);
                let k = 2.0 / (PI * PI);
                (k * (f * f + g * g), k * (f * f - g * g), 2.0 * k * f * g)
            }
        }
    }

    /// Location of the `k`-th oscillation node in `w`: `√(kπ)`.
    #[inline]
    pub(crate) fn node(k: u64) -> f64 {
        (k as f64 * PI).sqrt()
    }
}
