//! Joint kernels `S(ξ₁+ξ₂)·D(ξ₁−ξ₂)` and the 1-D integrals over their
//! slices and marginals.

use std::f64::consts::PI;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::quadrature::integrate_fourier;
use crate::quadrature::{
    adaptive::intervals_from_nodes, integrate_1d, integrate_panels, Domain, Estimate, QuadError, QuadTolerance,
    Transform,
};
use crate::specfun::constants::{xlnx, ShapeTable};
use crate::specfun::Shape;

/// Half-width of a Gaussian window in units of its scale; `exp(−W²/2) ≈ 2.6e-18`.
const GAUSS_WINDOW: f64 = 9.0;
/// Oscillatory windows with more nodes than this use the smooth/Fourier split.
const DIRECT_NODE_LIMIT: usize = 64;
/// Periods integrated directly before the smooth/Fourier split.
const HEAD_PERIODS: u64 = 16;
/// Shortest outer marginal panel, in units of the sum-factor scale.
const MIN_OUTER_PANEL: f64 = 10.0;

/// One factor `φ(x/scale)` of a joint kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    pub shape: Shape,
    pub scale: f64,
}

impl Factor {
    pub fn new(shape: Shape, scale: f64) -> Self {
        Factor { shape, scale }
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        self.shape.eval(x / self.scale)
    }

    /// Upper bound on the factor at distance `|x|` from its center.
    #[inline]
    pub fn envelope(&self, x: f64) -> f64 {
        self.shape.envelope(x / self.scale)
    }

    /// `∫ φ(x/scale) dx`
    pub(crate) fn integral(&self, t: &ShapeTable) -> Estimate {
        t.get(self.shape).mass.scale(self.scale)
    }

    /// Variance of the normalized factor.
    pub(crate) fn variance(&self, t: &ShapeTable) -> f64 {
        self.scale * self.scale * t.get(self.shape).variance()
    }

    /// Entropy in nats of the normalized factor.
    pub(crate) fn entropy_nats(&self, t: &ShapeTable) -> Estimate {
        t.get(self.shape).entropy_nats() + Estimate::exact(self.scale.ln())
    }

    /// Radius beyond which the envelope stays below `cutoff`.
    pub(crate) fn reach(&self, cutoff: f64) -> f64 {
        let w = match self.shape {
            Shape::Gauss => (2.0 * (1.0 / cutoff).ln()).sqrt().max(GAUSS_WINDOW),
            Shape::Sinc2 => (1.0 / cutoff).powf(0.25),
            Shape::Sint2 => (4.0 / (PI * PI) * 1.001 / cutoff).powf(0.25),
        };
        w * self.scale
    }

    /// Panel boundaries for this factor centered at `center`, within `[lo, hi]`:
    /// oscillation nodes for the chirped shapes, a uniform grid for Gauss.
    fn push_nodes(&self, center: f64, lo: f64, hi: f64, out: &mut Vec<f64>) {
        if hi <= lo {
            return;
        }
        match self.shape {
            Shape::Gauss => push_uniform(lo, hi, 2.0 * self.scale, out),
            _ => {
                for sign in [-1.0, 1.0] {
                    // Nodes center + sign·scale·√(kπ) inside [lo, hi].
                    let (near, far) = if sign > 0.0 { (lo - center, hi - center) } else { (center - hi, center - lo) };
                    if far < 0.0 {
                        continue;
                    }
                    let w_near = (near.max(0.0)) / self.scale;
                    let w_far = far / self.scale;
                    let k0 = (w_near * w_near / PI).ceil() as u64;
                    let k1 = (w_far * w_far / PI).floor() as u64;
                    for k in k0..=k1 {
                        out.push(center + sign * self.scale * Shape::node(k));
                    }
                }
            }
        }
    }

    /// Number of oscillation nodes inside `[lo, hi]` for a factor centered at `center`.
    fn node_count(&self, center: f64, lo: f64, hi: f64) -> usize {
        if !self.shape.is_oscillatory() || hi <= lo {
            return 0;
        }
        let count = |a: f64, b: f64| -> f64 {
            let ka = (a.max(0.0) / self.scale).powi(2) / PI;
            let kb = (b.max(0.0) / self.scale).powi(2) / PI;
            (kb - ka).max(0.0)
        };
        let right = count(lo - center, hi - center);
        let left = count(center - hi, center - lo);
        (right + left) as usize
    }
}

fn push_uniform(lo: f64, hi: f64, width: f64, out: &mut Vec<f64>) {
    let n = ((hi - lo) / width).ceil().clamp(1.0, 1e6) as usize;
    for i in 0..=n {
        out.push(lo + (hi - lo) * i as f64 / n as f64);
    }
}

/// Insert equally spaced points into gaps wider than `max_width`.
fn fill_gaps(nodes: Vec<f64>, max_width: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(nodes.len());
    for w in nodes.windows(2) {
        out.push(w[0]);
        let n = ((w[1] - w[0]) / max_width).ceil();
        if n > 1.0 && n.is_finite() {
            let n = n.min(1e6) as usize;
            for i in 1..n {
                out.push(w[0] + (w[1] - w[0]) * i as f64 / n as f64);
            }
        }
    }
    if let Some(&l) = nodes.last() {
        out.push(l);
    }
    out
}

fn finish_nodes(mut v: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    v.push(lo);
    v.push(hi);
    v.retain(|x| *x >= lo && *x <= hi);
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// `K(ξ₁, ξ₂) = S(ξ₁+ξ₂)·D(ξ₁−ξ₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointKernel {
    pub sum: Factor,
    pub diff: Factor,
}

/// Raw integrals over a slice `f(x) = K(x, v)`: `∫f`, `∫x f`, `∫x² f`, `∫f ln f`.
pub(crate) struct SliceIntegrals {
    pub mass: Estimate,
    pub first: Estimate,
    pub second: Estimate,
    pub plogp: Estimate,
}

impl JointKernel {
    #[inline]
    pub fn value(&self, x1: f64, x2: f64) -> f64 {
        self.sum.value(x1 + x2) * self.diff.value(x1 - x2)
    }

    /// `∫∫ K`, using `dξ₁dξ₂ = ds dd / 2`.
    pub(crate) fn mass(&self, t: &ShapeTable) -> Estimate {
        (self.sum.integral(t) * self.diff.integral(t)).scale(0.5)
    }

    /// `(var ξ₁ = var ξ₂, cov ξ₁ξ₂)` of the normalized kernel.
    pub(crate) fn covariance(&self, t: &ShapeTable) -> (f64, f64) {
        let vs = self.sum.variance(t);
        let vd = self.diff.variance(t);
        (0.25 * (vs + vd), 0.25 * (vs - vd))
    }

    /// Joint entropy in nats: the map `(ξ₁,ξ₂) ↦ (s,d)` has determinant 2.
    pub(crate) fn entropy_nats(&self, t: &ShapeTable) -> Estimate {
        self.sum.entropy_nats(t) + self.diff.entropy_nats(t) - Estimate::exact(std::f64::consts::LN_2)
    }

    /// Integrals over the slice `x ↦ K(x, v)`.
    pub(crate) fn slice_integrals(&self, v: f64, tol: &QuadTolerance) -> Result<SliceIntegrals, QuadError> {
        let (s, d) = (self.sum, self.diff);
        // S(x+v) is centered at −v, D(x−v) at v.
        let s_reach = GAUSS_WINDOW * s.scale;
        let d_reach = d.reach(tol.tail_cutoff);
        let lo = (-v - s_reach).max(v - d_reach);
        let hi = (-v + s_reach).min(v + d_reach);
        if hi <= lo {
            let zero = Estimate::exact(0.0);
            return Ok(SliceIntegrals { mass: zero, first: zero, second: zero, plogp: zero });
        }
        let mut nodes = vec![-v];
        d.push_nodes(v, lo, hi, &mut nodes);
        let nodes = fill_gaps(finish_nodes(nodes, lo, hi), 2.5 * s.scale);

        // Envelope bound of what lies beyond the D cut: f ≤ E_D there.
        let extra = if d.shape.is_oscillatory() && d_reach < s_reach + 2.0 * v.abs() {
            let w = d_reach / d.scale;
            let c = if d.shape == Shape::Sinc2 { 1.0 } else { 4.0 / (PI * PI) * 1.001 };
            let w3 = w.powi(3);
            let mass = 2.0 * d.scale * c / (3.0 * w3);
            let plogp = 2.0 * d.scale * c * ((4.0 * w.ln() - c.ln()) / (3.0 * w3) + 4.0 / (9.0 * w3));
            let x2 = (v.abs() + d_reach).powi(2);
            [mass, mass * (v.abs() + d_reach), mass * x2, plogp]
        } else {
            [0.0; 4]
        };
        let f = |x: f64| {
            let k = s.value(x + v) * d.value(x - v);
            [k, x * k, x * x * k, xlnx(k)]
        };
        let [mass, first, second, plogp] = integrate_panels(&f, &nodes, tol, extra)?;
        Ok(SliceIntegrals { mass, first, second, plogp })
    }

    /// Unnormalized marginal `m(v) = ∫ K(x, v) dx = ∫ S(d + 2v) D(d) dd`.
    pub(crate) fn marginal_raw(&self, v: f64, tol: &QuadTolerance) -> Result<Estimate, QuadError> {
        let (s, d) = (self.sum, self.diff);
        let u = 2.0 * v;
        let s_reach = GAUSS_WINDOW * s.scale;
        let (mut lo, mut hi) = (-u - s_reach, -u + s_reach);
        if d.shape == Shape::Gauss {
            let r = GAUSS_WINDOW * d.scale;
            lo = lo.max(-r);
            hi = hi.min(r);
            if hi <= lo {
                return Ok(Estimate::exact(0.0));
            }
        }
        let f = |x: f64| [s.value(x + u) * d.value(x)];
        if d.node_count(0.0, lo, hi) <= DIRECT_NODE_LIMIT {
            let mut nodes = vec![-u];
            d.push_nodes(0.0, lo, hi, &mut nodes);
            let nodes = fill_gaps(finish_nodes(nodes, lo, hi), 2.5 * s.scale);
            let [m] = integrate_panels(&f, &nodes, tol, [0.0])?;
            return Ok(m);
        }
        // Split each side d = ±scale·w into head periods plus
        // smooth + Fourier parts of the chirped tail.
        let mut total = Estimate::exact(0.0);
        let w0 = Shape::node(HEAD_PERIODS);
        let width = s.scale / d.scale;
        for sign in [1.0, -1.0] {
            // Window in w ≥ 0 where S(sign·scale·w + u) is non-negligible.
            let center = -sign * u / d.scale;
            let w_lo = (center - GAUSS_WINDOW * width).max(0.0);
            let w_hi = center + GAUSS_WINDOW * width;
            if w_hi <= 0.0 {
                continue;
            }
            let g = |w: f64| s.value(sign * d.scale * w + u);
            if w_lo < w0 {
                let top = w_hi.min(w0);
                let nodes: Vec<f64> = (0..=HEAD_PERIODS).map(Shape::node).collect();
                let nodes = fill_gaps(finish_nodes(nodes, w_lo, top), 2.5 * width);
                let fh = |w: f64| [g(w) * d.shape.eval(w)];
                let [h] = integrate_panels(&fh, &nodes, tol, [0.0])?;
                total = total + h.scale(d.scale);
            }
            if w_hi > w0 {
                let a = w_lo.max(w0);
                let mut nodes = Vec::new();
                push_uniform(a, w_hi, 2.0 * width, &mut nodes);
                let mut x = a;
                while x < w_hi {
                    nodes.push(x);
                    x *= 1.5;
                }
                let nodes = finish_nodes(nodes, a, w_hi);
                let fs = |w: f64| [g(w) * d.shape.tail_parts(w * w).0];
                let [sm] = integrate_panels(&fs, &nodes, tol, [0.0])?;
                // Oscillatory part in t = w², dw = dt / (2√t).
                let tn: Vec<f64> = nodes.iter().map(|w| w * w).collect();
                let amp = |t: f64| {
                    let (_, c, sn) = d.shape.tail_parts(t);
                    let q = g(t.sqrt()) / (2.0 * t.sqrt());
                    (q * c, q * sn)
                };
                let mut osc = Estimate::exact(0.0);
                for (ta, tb) in intervals_from_nodes(&tn) {
                    osc = osc + integrate_fourier(amp, ta, tb, 2.0, tol)?;
                }
                total = total + (sm + osc).scale(d.scale);
            }
        }
        Ok(total)
    }

    /// Bound on the marginal at `|v|`, non-increasing in `|v|`:
    /// `m(v) ≤ I_S·E_D(|v|) + I_D·exp(−v²/2ℓ_s²)`.
    pub(crate) fn marginal_envelope(&self, v: f64, t: &ShapeTable) -> f64 {
        let i_s = self.sum.integral(t).value;
        let i_d = self.diff.integral(t).value;
        i_s * self.diff.envelope(v.abs()) + i_d * (-0.5 * (v / self.sum.scale).powi(2)).exp()
    }

    /// `[∫ m, ∫ m ln m]` over the marginal axis.
    pub(crate) fn marginal_integrals(&self, t: &ShapeTable, tol: &QuadTolerance) -> Result<[Estimate; 2], QuadError> {
        let (s, d) = (self.sum, self.diff);
        let peak = self.marginal_raw(0.0, tol)?.value;
        // Truncation radius from the envelope.
        let env = |v: f64| self.marginal_envelope(v, t);
        let mut x = 0.5 * (s.scale + d.scale);
        while env(x) > tol.tail_cutoff * peak || env(x) > 0.3 {
            x *= 1.25;
        }
        let tail_mass = integrate_1d(env, &Domain::half_line(x).with_transform(Transform::PowerLaw { scale: x }), tol)?;
        // |m ln m| ≤ E|ln E| once the envelope is below 1/e.
        let tail_ent = integrate_1d(
            |v| xlnx(env(v)).abs(),
            &Domain::half_line(x).with_transform(Transform::PowerLaw { scale: x }),
            tol,
        )?;

        // Breakpoints: the Gaussian core of the sum factor (scale ℓ_s/2 in v),
        // oscillation nodes of D (evaluated near d = −2v, at least
        // MIN_OUTER_PANEL·ℓ_s apart) while its period in d exceeds 0.8ℓ_s,
        // geometric growth beyond. Past that point the smoothing by S leaves
        // ripples below 1e-13 of the local value.
        let mut nodes = Vec::new();
        let mut last;
        if d.shape == Shape::Gauss {
            let sd = 0.5 * (s.scale * s.scale + d.scale * d.scale).sqrt();
            last = (GAUSS_WINDOW * sd).min(x);
            push_uniform(0.0, last, sd, &mut nodes);
        } else {
            last = (GAUSS_WINDOW * 0.5 * s.scale).min(x);
            push_uniform(0.0, last, 0.5 * s.scale, &mut nodes);
            let mut k = 1u64;
            loop {
                let vk = 0.5 * d.scale * Shape::node(k);
                let spacing = 0.5 * d.scale * (Shape::node(k + 1) - Shape::node(k));
                if vk >= x || spacing < 0.4 * s.scale {
                    break;
                }
                if vk - last >= MIN_OUTER_PANEL * s.scale || vk <= last {
                    nodes.push(vk);
                    last = last.max(vk);
                }
                k += 1;
            }
        }
        let mut y = last.max(0.5 * s.scale);
        while y < x {
            nodes.push(y);
            y *= 1.25;
        }
        let nodes = fill_gaps(finish_nodes(nodes, 0.0, x), f64::INFINITY);

        let failure: Mutex<Option<QuadError>> = Mutex::new(None);
        let inner_tol = tol.tightened(0.1);
        let f = |v: f64| match self.marginal_raw(v, &inner_tol) {
            Ok(m) => [m.value, xlnx(m.value)],
            Err(e) => {
                failure.lock().unwrap_or_else(|p| p.into_inner()).get_or_insert(e);
                [f64::NAN, f64::NAN]
            }
        };
        // m is even in v.
        let res = integrate_panels(&f, &nodes, tol, [0.0, 0.0]);
        if let Some(e) = failure.into_inner().unwrap_or_else(|p| p.into_inner()) {
            return Err(e);
        }
        let [m, mlnm] = res?;
        Ok([
            (m + Estimate::new(0.0, tail_mass.value + tail_mass.err)).scale(2.0),
            (mlnm + Estimate::new(0.0, tail_ent.value + tail_ent.err)).scale(2.0),
        ])
    }
}
