//! Oscillatory integrals `∫ [hc(t) cos ωt + hs(t) sin ωt] dt` with smooth
//! amplitudes, by a Filon-type rule: the complex amplitude `hc − i·hs` is
//! expanded in Legendre polynomials on each panel and the products with
//! `e^{iωt}` are integrated exactly through spherical Bessel functions,
//! `∫₋₁¹ P_k(x) e^{izx} dx = 2 iᵏ j_k(z)`. Panel sizes follow the smoothness
//! of the amplitude, not the period of the oscillation.

use std::sync::OnceLock;

use super::adaptive::{self, Extra, RuleResult};
use super::{Estimate, QuadError, QuadTolerance};

const ORDER: usize = 24;

struct Legendre {
    nodes: [f64; ORDER],
    weights: [f64; ORDER],
    /// `poly[k][j] = P_k(nodes[j])`
    poly: Vec<[f64; ORDER]>,
}

#[allow(clippy::needless_range_loop)]
fn legendre_table() -> &'static Legendre {
    static TABLE: OnceLock<Legendre> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = ORDER;
        let mut nodes = [0.0; ORDER];
        let mut weights = [0.0; ORDER];
        for i in 0..n {
            // Newton iteration from the Chebyshev-like initial guess.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        let mut poly = vec![[0.0; ORDER]; ORDER];
        for j in 0..n {
            let x = nodes[j];
            let (mut p0, mut p1) = (1.0, x);
            poly[0][j] = 1.0;
            if n > 1 {
                poly[1][j] = x;
            }
            for k in 2..n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                poly[k][j] = p2;
                p0 = p1;
                p1 = p2;
            }
        }
        Legendre { nodes, weights, poly }
    })
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Spherical Bessel functions `j_0(z) … j_{ORDER−1}(z)` for `z ≥ 0`.
#[allow(clippy::needless_range_loop)]
fn spherical_bessel(z: f64) -> [f64; ORDER] {
    let mut j = [0.0; ORDER];
    if z < 0.5 {
        // Power series: j_k(z) = z^k/(2k+1)!! Σ_m (−z²/2)^m / (m! Π_{i=1..m}(2k+2i+1)).
        let mut lead = 1.0;
        for k in 0..ORDER {
            if k > 0 {
                lead *= z / (2 * k + 1) as f64;
            }
            let mut term = 1.0;
            let mut sum = 1.0;
            for m in 1..30 {
                term *= -0.5 * z * z / (m as f64 * (2 * k + 2 * m + 1) as f64);
                sum += term;
                if term.abs() < 1e-18 * sum.abs() {
                    break;
                }
            }
            j[k] = lead * sum;
            if lead == 0.0 {
                break;
            }
        }
        return j;
    }
    let (s, c) = z.sin_cos();
    let j0 = s / z;
    let j1 = s / (z * z) - c / z;
    if z > ORDER as f64 {
        j[0] = j0;
        j[1] = j1;
        for k in 1..ORDER - 1 {
            j[k + 1] = (2 * k + 1) as f64 / z * j[k] - j[k - 1];
        }
        return j;
    }
    // Miller's backward recurrence, normalized against j0 or j1.
    let start = ORDER + 30 + z as usize;
    let mut next = 0.0_f64;
    let mut cur = 1e-280_f64;
    let mut tmp = vec![0.0; start + 1];
    tmp[start] = cur;
    for k in (1..=start).rev() {
        let prev = (2 * k + 1) as f64 / z * cur - next;
        next = cur;
        cur = prev;
        tmp[k - 1] = cur;
        if cur.abs() > 1e250 {
            for v in tmp[k - 1..].iter_mut() {
                *v *= 1e-250;
            }
            next *= 1e-250;
            cur *= 1e-250;
        }
    }
    let scale = if j0.abs() >= j1.abs() { j0 / tmp[0] } else { j1 / tmp[1] };
    for k in 0..ORDER {
        j[k] = tmp[k] * scale;
    }
    j
}

/// Filon–Legendre rule on one panel. Returns value and error of
/// `∫_a^b hc cos ωt + hs sin ωt dt`.
fn filon_panel<H>(h: &H, a: f64, b: f64, omega: f64) -> RuleResult<1>
where
    H: Fn(f64) -> (f64, f64) + ?Sized,
{
    let tab = legendre_table();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut re = [0.0; ORDER];
    let mut im = [0.0; ORDER];
    let mut amp = 0.0_f64;
    for j in 0..ORDER {
        let t = mid + half * tab.nodes[j];
        let (hc, hs) = h(t);
        if !(hc.is_finite() && hs.is_finite()) {
            return Err(t);
        }
        re[j] = hc;
        im[j] = -hs;
        amp = amp.max(hc.abs() + hs.abs());
    }
    let mut cre = [0.0; ORDER];
    let mut cim = [0.0; ORDER];
    for k in 0..ORDER {
        let (mut sr, mut si) = (0.0, 0.0);
        for j in 0..ORDER {
            let w = tab.weights[j] * tab.poly[k][j];
            sr += w * re[j];
            si += w * im[j];
        }
        let norm = 0.5 * (2 * k + 1) as f64;
        cre[k] = sr * norm;
        cim[k] = si * norm;
    }
    let z = omega * half;
    let jb = spherical_bessel(z.abs());
    let sign = if z < 0.0 { -1.0 } else { 1.0 };
    // Σ c_k · 2 iᵏ j_k(z); for negative z, j_k(−z) = (−1)^k j_k(z).
    let (mut sr, mut si) = (0.0, 0.0);
    for k in 0..ORDER {
        let jk = 2.0 * jb[k] * if k % 2 == 1 { sign } else { 1.0 };
        // iᵏ cycles through 1, i, −1, −i.
        let (pr, pi) = match k % 4 {
            0 => (jk, 0.0),
            1 => (0.0, jk),
            2 => (-jk, 0.0),
            _ => (0.0, -jk),
        };
        sr += cre[k] * pr - cim[k] * pi;
        si += cre[k] * pi + cim[k] * pr;
    }
    let (s, c) = (omega * mid).sin_cos();
    let value = half * (c * sr - s * si);
    let tail = cre[ORDER - 1].hypot(cim[ORDER - 1]) + cre[ORDER - 2].hypot(cim[ORDER - 2]);
    let err = (2.0 * half.abs() * tail).max(100.0 * f64::EPSILON * half.abs() * amp);
    Ok(([value], [err]))
}

/// `∫_a^b [hc(t) cos ωt + hs(t) sin ωt] dt` with `h(t) = (hc, hs)` smooth.
pub fn integrate_fourier<H>(h: H, a: f64, b: f64, omega: f64, tol: &QuadTolerance) -> Result<Estimate, QuadError>
where
    H: Fn(f64) -> (f64, f64) + Sync,
{
    if !(a.is_finite() && b.is_finite() && a < b) || !omega.is_finite() {
        return Err(QuadError::InvalidDomain(format!("fourier panel [{a}, {b}] with ω = {omega}")));
    }
    integrate_fourier_panels(&h, &[(a, b)], omega, tol, 0.0)
}

pub(crate) fn integrate_fourier_panels<H>(
    h: &H,
    intervals: &[(f64, f64)],
    omega: f64,
    tol: &QuadTolerance,
    extra: f64,
) -> Result<Estimate, QuadError>
where
    H: Fn(f64) -> (f64, f64) + Sync,
{
    let rule = |a: f64, b: f64| filon_panel(h, a, b, omega);
    let [e] = adaptive::integrate(&rule, intervals, tol, Extra([extra]))?;
    Ok(e)
}

/// `∫_a^∞ [hc cos ωt + hs sin ωt] dt` for amplitudes that are smooth on the
/// scale of `t` itself and eventually monotone and decaying. Panels grow
/// geometrically; the remainder beyond the last panel is bounded by
/// integration by parts, `2(|hc(X)| + |hs(X)|)/ω`, and included in the error.
pub fn integrate_fourier_tail<H>(h: H, a: f64, omega: f64, tol: &QuadTolerance) -> Result<Estimate, QuadError>
where
    H: Fn(f64) -> (f64, f64) + Sync,
{
    if !(a > 0.0 && a.is_finite()) || !(omega > 0.0 && omega.is_finite()) {
        return Err(QuadError::InvalidDomain(format!("fourier tail needs a > 0 and ω > 0, got a = {a}, ω = {omega}")));
    }
    let bound = |x: f64| {
        let (hc, hs) = h(x);
        2.0 * (hc.abs() + hs.abs()) / omega
    };
    let mut intervals = Vec::new();
    let mut x = a;
    let mut rest = bound(x);
    while rest > 0.1 * tol.abs_tol && intervals.len() < 400 {
        let next = 2.0 * x;
        intervals.push((x, next));
        x = next;
        rest = bound(x);
    }
    integrate_fourier_panels(&h, &intervals, omega, tol, rest)
}
