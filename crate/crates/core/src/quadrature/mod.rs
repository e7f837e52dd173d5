//! Adaptive Gauss–Kronrod quadrature on finite and unbounded domains, a
//! Filon-type rule for oscillatory tails, and iterated/rotated 2-D integrals.

pub(crate) mod adaptive;
mod fourier;
mod gk;

pub use fourier::{integrate_fourier, integrate_fourier_tail};

use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use adaptive::{intervals_from_nodes, Extra};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("no convergence after {subdivisions} subdivisions (partial value {value}, error estimate {err_estimate})")]
    NonConvergence { value: f64, err_estimate: f64, subdivisions: usize },
    #[error("integrand is not finite at x = {x}")]
    NonFinite { x: f64 },
}

/// Accuracy request for every quadrature in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadTolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Bisections allowed inside each initial panel.
    pub max_subdivisions: usize,
    /// Improper integrals with a known envelope are truncated where the
    /// envelope drops below this absolute level.
    pub tail_cutoff: f64,
}

impl Default for QuadTolerance {
    fn default() -> Self {
        QuadTolerance { abs_tol: 1e-10, rel_tol: 1e-8, max_subdivisions: 2000, tail_cutoff: 1e-12 }
    }
}

impl QuadTolerance {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize, tail_cutoff: f64) -> Result<Self, QuadError> {
        let t = QuadTolerance { abs_tol, rel_tol, max_subdivisions, tail_cutoff };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), QuadError> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !positive(self.abs_tol) || !positive(self.rel_tol) || !positive(self.tail_cutoff) {
            return Err(QuadError::InvalidTolerance(format!(
                "abs_tol, rel_tol and tail_cutoff must be positive (got {}, {}, {})",
                self.abs_tol, self.rel_tol, self.tail_cutoff
            )));
        }
        if self.max_subdivisions < 10 {
            return Err(QuadError::InvalidTolerance(format!(
                "max_subdivisions must be at least 10 (got {})",
                self.max_subdivisions
            )));
        }
        Ok(())
    }

    /// Error allowed for an integral of size `value`.
    #[inline]
    pub fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }

    /// Same tolerance with both accuracy targets scaled by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        QuadTolerance { abs_tol: self.abs_tol * factor, rel_tol: self.rel_tol * factor, ..*self }
    }
}

/// A value with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub err: f64,
}

impl Estimate {
    pub fn new(value: f64, err: f64) -> Self {
        Estimate { value, err }
    }

    pub fn exact(value: f64) -> Self {
        Estimate { value, err: 0.0 }
    }

    pub fn scale(self, s: f64) -> Estimate {
        Estimate::new(self.value * s, self.err * s.abs())
    }

    /// Natural logarithm with first-order error propagation.
    pub fn ln(self) -> Estimate {
        Estimate::new(self.value.ln(), self.err / self.value.abs())
    }
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, o: Estimate) -> Estimate {
        Estimate::new(self.value + o.value, self.err + o.err)
    }
}

impl std::ops::Sub for Estimate {
    type Output = Estimate;
    fn sub(self, o: Estimate) -> Estimate {
        Estimate::new(self.value - o.value, self.err + o.err)
    }
}

impl std::ops::Mul for Estimate {
    type Output = Estimate;
    fn mul(self, o: Estimate) -> Estimate {
        Estimate::new(self.value * o.value, self.value.abs() * o.err + o.value.abs() * self.err + self.err * o.err)
    }
}

/// Quotient with first-order error propagation.
impl std::ops::Div for Estimate {
    type Output = Estimate;
    fn div(self, o: Estimate) -> Estimate {
        let q = self.value / o.value;
        Estimate::new(q, (self.err + q.abs() * o.err) / o.value.abs())
    }
}

/// Variable change used on unbounded domains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Transform {
    /// `x = t/(1−t²)` on the full line, `x = a + t/(1−t)` on a half line.
    Algebraic,
    /// Identity on `[0, scale]` from the origin of the domain, `scale/u²` beyond;
    /// suited to tails decaying like a power of `x`.
    PowerLaw { scale: f64 },
    /// Truncate where the envelope `coeff·|x|^(−exponent)` falls below
    /// `tail_cutoff`; the integral of the envelope beyond the cut is added to
    /// the error estimate.
    Truncated { coeff: f64, exponent: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DomainKind {
    Finite {
        a: f64,
        b: f64,
    },
    /// `[a, ∞)`
    HalfLine {
        a: f64,
    },
    FullLine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub kind: DomainKind,
    pub transform: Transform,
    /// Interior points where the integrand changes character.
    pub breakpoints: Vec<f64>,
}

impl Domain {
    pub fn finite(a: f64, b: f64) -> Result<Self, QuadError> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(QuadError::InvalidDomain(format!("finite bounds must satisfy a < b, got [{a}, {b}]")));
        }
        Ok(Domain { kind: DomainKind::Finite { a, b }, transform: Transform::Algebraic, breakpoints: Vec::new() })
    }

    pub fn half_line(a: f64) -> Self {
        Domain { kind: DomainKind::HalfLine { a }, transform: Transform::Algebraic, breakpoints: Vec::new() }
    }

    pub fn full_line() -> Self {
        Domain { kind: DomainKind::FullLine, transform: Transform::Algebraic, breakpoints: Vec::new() }
    }

    pub fn with_transform(mut self, transform: Transform) -> Self {
        self.transform = transform;
        self
    }

    pub fn with_breakpoints(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.breakpoints.extend(points);
        self
    }

    fn check(&self) -> Result<(), QuadError> {
        match self.kind {
            DomainKind::Finite { a, b } if !(a.is_finite() && b.is_finite() && a < b) => {
                return Err(QuadError::InvalidDomain(format!("finite bounds must satisfy a < b, got [{a}, {b}]")))
            }
            DomainKind::HalfLine { a } if !a.is_finite() => {
                return Err(QuadError::InvalidDomain(format!("half-line start must be finite, got {a}")))
            }
            _ => {}
        }
        match self.transform {
            Transform::PowerLaw { scale } if !(scale > 0.0 && scale.is_finite()) => {
                Err(QuadError::InvalidDomain(format!("power-law scale must be positive, got {scale}")))
            }
            Transform::Truncated { coeff, exponent } if !(coeff > 0.0 && exponent > 1.0) => {
                Err(QuadError::InvalidDomain(format!(
                    "truncation envelope needs coeff > 0, exponent > 1 (got {coeff}, {exponent})"
                )))
            }
            _ => Ok(()),
        }
    }
}

/// A domain reduced to a finite parameter interval plus a map `t ↦ (x, dx/dt)`.
struct Mapped {
    nodes: Vec<f64>,
    map: Box<dyn Fn(f64) -> (f64, f64) + Sync>,
    truncation: f64,
}

fn power_map(origin: f64, scale: f64, dir: f64) -> impl Fn(f64) -> (f64, f64) {
    // t ∈ [0, 2): identity on [0, 1], scale/u² with u = 2 − t beyond.
    move |t: f64| {
        if t <= 1.0 {
            (origin + dir * scale * t, scale)
        } else {
            let u = 2.0 - t;
            (origin + dir * scale / (u * u), 2.0 * scale / (u * u * u))
        }
    }
}

fn power_inverse(origin: f64, scale: f64, x: f64) -> f64 {
    let s = (x - origin).abs() / scale;
    if s <= 1.0 {
        s
    } else {
        2.0 - 1.0 / s.sqrt()
    }
}

fn map_domain(domain: &Domain, tol: &QuadTolerance) -> Result<Mapped, QuadError> {
    domain.check()?;
    let bps = |lo: f64, hi: f64| -> Vec<f64> {
        let mut v: Vec<f64> = domain.breakpoints.iter().copied().filter(|&x| x > lo && x < hi).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    };
    let with_ends = |lo: f64, inner: Vec<f64>, hi: f64| -> Vec<f64> {
        let mut v = vec![lo];
        v.extend(inner);
        v.push(hi);
        v
    };
    let identity: Box<dyn Fn(f64) -> (f64, f64) + Sync> = Box::new(|t| (t, 1.0));
    Ok(match (domain.kind, domain.transform) {
        (DomainKind::Finite { a, b }, _) => {
            Mapped { nodes: with_ends(a, bps(a, b), b), map: identity, truncation: 0.0 }
        }
        (kind, Transform::Truncated { coeff, exponent }) => {
            let cut = (coeff / tol.tail_cutoff).powf(1.0 / exponent);
            let far = domain.breakpoints.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
            let (lo, hi, sides) = match kind {
                DomainKind::HalfLine { a } => (a, far.max(cut), 1.0),
                _ => {
                    let x = far.max(cut);
                    (-x, x, 2.0)
                }
            };
            let hi = if hi <= lo { lo + cut.max(1.0) } else { hi };
            let edge = hi.abs().max(lo.abs());
            let bound = sides * coeff * edge.powf(1.0 - exponent) / (exponent - 1.0);
            Mapped { nodes: with_ends(lo, bps(lo, hi), hi), map: identity, truncation: bound }
        }
        (DomainKind::HalfLine { a }, Transform::Algebraic) => {
            let inner: Vec<f64> = bps(a, f64::INFINITY).into_iter().map(|x| (x - a) / (1.0 + x - a)).collect();
            Mapped {
                nodes: with_ends(0.0, inner, 1.0),
                map: Box::new(move |t| {
                    let u = 1.0 - t;
                    (a + t / u, 1.0 / (u * u))
                }),
                truncation: 0.0,
            }
        }
        (DomainKind::FullLine, Transform::Algebraic) => {
            let inner: Vec<f64> = bps(f64::NEG_INFINITY, f64::INFINITY)
                .into_iter()
                .map(|x| if x == 0.0 { 0.0 } else { (-1.0 + (1.0 + 4.0 * x * x).sqrt()) / (2.0 * x) })
                .collect();
            Mapped {
                nodes: with_ends(-1.0, inner, 1.0),
                map: Box::new(|t| {
                    let d = 1.0 - t * t;
                    (t / d, (1.0 + t * t) / (d * d))
                }),
                truncation: 0.0,
            }
        }
        (DomainKind::HalfLine { a }, Transform::PowerLaw { scale }) => {
            let inner: Vec<f64> = bps(a, f64::INFINITY).into_iter().map(|x| power_inverse(a, scale, x)).collect();
            let mut nodes = with_ends(0.0, inner, 2.0);
            nodes.push(1.0);
            nodes.sort_by(f64::total_cmp);
            nodes.dedup();
            Mapped { nodes, map: Box::new(power_map(a, scale, 1.0)), truncation: 0.0 }
        }
        (DomainKind::FullLine, Transform::PowerLaw { scale }) => {
            // Parameter s ∈ (−2, 2), odd around the origin.
            let pos = power_map(0.0, scale, 1.0);
            let mut nodes: Vec<f64> = bps(f64::NEG_INFINITY, f64::INFINITY)
                .into_iter()
                .map(|x| power_inverse(0.0, scale, x).copysign(x))
                .collect();
            nodes.extend([-2.0, -1.0, 0.0, 1.0, 2.0]);
            nodes.sort_by(f64::total_cmp);
            nodes.dedup();
            Mapped {
                nodes,
                map: Box::new(move |s| {
                    let (x, d) = pos(s.abs());
                    (x.copysign(s), d)
                }),
                truncation: 0.0,
            }
        }
    })
}

/// `∫ f` over a domain. Returns the value and an error estimate that
/// includes any truncation bound.
pub fn integrate_1d<F>(f: F, domain: &Domain, tol: &QuadTolerance) -> Result<Estimate, QuadError>
where
    F: Fn(f64) -> f64 + Sync,
{
    let [e] = integrate_vec(|x| [f(x)], domain, tol)?;
    Ok(e)
}

/// Componentwise `∫ f` over a domain; every component must meet the
/// tolerance. A `Truncated` bound is added to every component.
pub fn integrate_vec<const N: usize, F>(f: F, domain: &Domain, tol: &QuadTolerance) -> Result<[Estimate; N], QuadError>
where
    F: Fn(f64) -> [f64; N] + Sync,
{
    tol.validate()?;
    let m = map_domain(domain, tol)?;
    let g = |t: f64| {
        let (x, dx) = (m.map)(t);
        if dx == 0.0 || !x.is_finite() {
            return [0.0; N];
        }
        // A decaying integrand times an exploding Jacobian at the far end:
        // exact zeros stay zero.
        f(x).map(|v| if v == 0.0 { 0.0 } else { v * dx })
    };
    let rule = |a: f64, b: f64| gk::gk21(&g, a, b);
    adaptive::integrate(&rule, &intervals_from_nodes(&m.nodes), tol, Extra([m.truncation; N]))
}

/// Vector-valued adaptive integration over consecutive panels given by sorted
/// `nodes`. Every component must meet the tolerance.
pub(crate) fn integrate_panels<const N: usize, F>(
    f: &F,
    nodes: &[f64],
    tol: &QuadTolerance,
    extra: [f64; N],
) -> Result<[Estimate; N], QuadError>
where
    F: Fn(f64) -> [f64; N] + Sync,
{
    let rule = |a: f64, b: f64| gk::gk21(f, a, b);
    adaptive::integrate(&rule, &intervals_from_nodes(nodes), tol, Extra(extra))
}

/// Iterated integral `∫ dx ∫ dy f(x, y)`. The inner error estimates are
/// integrated alongside the values and added to the result.
pub fn integrate_2d<F>(f: F, dx: &Domain, dy: &Domain, tol: &QuadTolerance) -> Result<Estimate, QuadError>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    tol.validate()?;
    let outer = map_domain(dx, tol)?;
    let inner_tol = tol.tightened(0.1);
    let failure: Mutex<Option<QuadError>> = Mutex::new(None);
    let g = |t: f64| -> [f64; 2] {
        let (x, jac) = (outer.map)(t);
        if jac == 0.0 || !x.is_finite() {
            return [0.0, 0.0];
        }
        match integrate_1d(|y| f(x, y), dy, &inner_tol) {
            Ok(e) => [e.value * jac, e.err * jac],
            Err(err) => {
                let mut slot = failure.lock().unwrap_or_else(|p| p.into_inner());
                slot.get_or_insert(err);
                [f64::NAN, f64::NAN]
            }
        }
    };
    // Only the value component drives refinement.
    let rule = |a: f64, b: f64| {
        gk::gk21(&g, a, b).map(|(v, mut e)| {
            e[1] = 0.0;
            (v, e)
        })
    };
    let res = adaptive::integrate(&rule, &intervals_from_nodes(&outer.nodes), tol, Extra([outer.truncation, 0.0]));
    if let Some(e) = failure.into_inner().unwrap_or_else(|p| p.into_inner()) {
        return Err(e);
    }
    let [v, e] = res?;
    Ok(Estimate::new(v.value, v.err + e.value.abs() + e.err))
}

/// `∫∫ g((x+y)/√2) · h((x−y)/√2) dx dy` over the plane, evaluated in the
/// rotated coordinates where it factorizes (unit Jacobian).
pub fn integrate_rotated<G, H>(g: G, h: H, du: &Domain, dv: &Domain, tol: &QuadTolerance) -> Result<Estimate, QuadError>
where
    G: Fn(f64) -> f64 + Sync,
    H: Fn(f64) -> f64 + Sync,
{
    let a = integrate_1d(g, du, tol)?;
    let b = integrate_1d(h, dv, tol)?;
    Ok(a * b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn trivial_examples() {
        let tol = QuadTolerance::default();
        let v = integrate_1d(|x| x, &Domain::finite(0.0, 1.0).unwrap(), &tol).unwrap();
        assert!((v.value - 0.5).abs() < 1e-14);
        let v = integrate_1d(|x| (-x * x).exp(), &Domain::full_line(), &tol).unwrap();
        assert!((v.value - PI.sqrt()).abs() < 1e-10, "{v:?}");
        let v = integrate_2d(|x, y| (-x * x - y * y).exp(), &Domain::full_line(), &Domain::full_line(), &tol).unwrap();
        assert!((v.value - PI).abs() < 1e-9, "{v:?}");
    }

    #[test]
    fn half_line_maps() {
        let tol = QuadTolerance::default();
        let v = integrate_1d(|x| (-x).exp(), &Domain::half_line(1.0), &tol).unwrap();
        assert!((v.value - (-1.0_f64).exp()).abs() < 1e-12);
        let d = Domain::half_line(1.0).with_transform(Transform::PowerLaw { scale: 2.0 });
        let v = integrate_1d(|x| 1.0 / (x * x * x), &d, &tol).unwrap();
        assert!((v.value - 0.5).abs() < 1e-12, "{v:?}");
        let d = Domain::full_line().with_transform(Transform::PowerLaw { scale: 1.0 });
        let v = integrate_1d(|x| 1.0 / (1.0 + x * x), &d, &tol).unwrap();
        assert!((v.value - PI).abs() < 1e-10, "{v:?}");
    }

    #[test]
    fn truncated_tail_adds_bound() {
        let tol = QuadTolerance { tail_cutoff: 1e-6, ..Default::default() };
        let d = Domain::full_line()
            .with_transform(Transform::Truncated { coeff: 1.0, exponent: 2.0 })
            .with_breakpoints([-1.0, 1.0]);
        let v = integrate_1d(|x| 1.0 / (1.0 + x * x), &d, &tol).unwrap();
        assert!(v.err >= 2.0 * 1e-3 * 0.99);
        assert!((v.value - PI).abs() <= v.err);
    }

    #[test]
    fn invalid_inputs() {
        assert!(Domain::finite(1.0, 0.0).is_err());
        assert!(QuadTolerance::new(0.0, 1e-8, 100, 1e-12).is_err());
        assert!(QuadTolerance::new(1e-10, 1e-8, 5, 1e-12).is_err());
        let tol = QuadTolerance { max_subdivisions: 10, ..Default::default() };
        let r = integrate_1d(|x| (1.0 / x).sin() / x.sqrt(), &Domain::finite(1e-12, 1.0).unwrap(), &tol);
        assert!(matches!(r, Err(QuadError::NonConvergence { .. })));
    }
}
