//! Global adaptive subdivision driven by a panel rule.
//!
//! Initial panels are evaluated through [`crate::exec::map`]; refinement always
//! bisects the panel with the largest (normalized) error. Final values are
//! pairwise sums over panels in positional order, so the result does not
//! depend on the execution mode.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{Estimate, QuadError, QuadTolerance};
use crate::exec;

/// Outcome of a panel rule on one interval.
pub(crate) type RuleResult<const N: usize> = Result<([f64; N], [f64; N]), f64>;

#[derive(Clone, Copy)]
struct Panel<const N: usize> {
    a: f64,
    b: f64,
    val: [f64; N],
    err: [f64; N],
    origin: usize,
}

struct Entry {
    priority: f64,
    a: f64,
    idx: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority.total_cmp(&other.priority).then_with(|| other.a.total_cmp(&self.a))
    }
}

const ROUNDING_FLOOR: f64 = 1e3 * f64::EPSILON;

/// Extra absolute error (e.g. a truncation bound) per component. It is added
/// to the reported estimate; refinement cannot reduce it, so it does not take
/// part in the convergence test.
pub(crate) struct Extra<const N: usize>(pub [f64; N]);

impl<const N: usize> Default for Extra<N> {
    fn default() -> Self {
        Extra([0.0; N])
    }
}

/// Integrate over the union of `intervals` (consecutive, non-overlapping).
///
/// `max_subdivisions` bounds the number of bisections made inside each of
/// the initial intervals.
pub(crate) fn integrate<const N: usize, R>(
    rule: &R,
    intervals: &[(f64, f64)],
    tol: &QuadTolerance,
    extra: Extra<N>,
) -> Result<[Estimate; N], QuadError>
where
    R: Fn(f64, f64) -> RuleResult<N> + Sync,
{
    if intervals.is_empty() {
        return Ok(std::array::from_fn(|c| Estimate::new(0.0, extra.0[c])));
    }
    let first: Vec<RuleResult<N>> = exec::map(intervals, |&(a, b)| rule(a, b));
    let mut panels: Vec<Panel<N>> = Vec::with_capacity(intervals.len() * 2);
    for (origin, (&(a, b), r)) in intervals.iter().zip(first).enumerate() {
        let (val, err) = r.map_err(|x| QuadError::NonFinite { x })?;
        panels.push(Panel { a, b, val, err, origin });
    }

    let totals = |panels: &[Panel<N>]| -> ([f64; N], [f64; N], [f64; N]) {
        let mut v = [0.0; N];
        let mut e = [0.0; N];
        let mut a = [0.0; N];
        for p in panels.iter() {
            for c in 0..N {
                v[c] += p.val[c];
                e[c] += p.err[c];
                a[c] += p.val[c].abs();
            }
        }
        (v, e, a)
    };
    let (mut tv, mut te, mut ta) = totals(&panels);
    let scale: [f64; N] = std::array::from_fn(|c| tol.target(tv[c]).max(f64::MIN_POSITIVE));
    let priority = |p: &Panel<N>| -> f64 { (0..N).map(|c| p.err[c] / scale[c]).fold(0.0, f64::max) };

    let mut heap: BinaryHeap<Entry> =
        panels.iter().enumerate().map(|(idx, p)| Entry { priority: priority(p), a: p.a, idx }).collect();
    let mut splits = vec![0usize; intervals.len()];
    let mut total_splits = 0usize;
    // Errors below the rounding level of ∫|f| cannot be reduced; this matters
    // for components that cancel to zero.
    let converged = |tv: &[f64; N], te: &[f64; N], ta: &[f64; N]| -> bool {
        (0..N).all(|c| te[c] <= tol.target(tv[c]).max(ROUNDING_FLOOR * ta[c]))
    };

    let mut since_resum = 0usize;
    let mut ok = converged(&tv, &te, &ta);
    while !ok {
        let Some(top) = heap.pop() else { break };
        let p = panels[top.idx];
        let mid = 0.5 * (p.a + p.b);
        let tiny = (p.b - p.a) <= 64.0 * f64::EPSILON * p.a.abs().max(p.b.abs()).max(f64::MIN_POSITIVE);
        if splits[p.origin] >= tol.max_subdivisions || tiny || !(p.a < mid && mid < p.b) {
            // Cannot refine further; leave it out of the heap.
            if heap.is_empty() {
                break;
            }
            continue;
        }
        splits[p.origin] += 1;
        total_splits += 1;
        let (lv, le) = rule(p.a, mid).map_err(|x| QuadError::NonFinite { x })?;
        let (rv, re) = rule(mid, p.b).map_err(|x| QuadError::NonFinite { x })?;
        for c in 0..N {
            tv[c] += lv[c] + rv[c] - p.val[c];
            te[c] += le[c] + re[c] - p.err[c];
            ta[c] += lv[c].abs() + rv[c].abs() - p.val[c].abs();
        }
        let left = Panel { a: p.a, b: mid, val: lv, err: le, origin: p.origin };
        let right = Panel { a: mid, b: p.b, val: rv, err: re, origin: p.origin };
        panels[top.idx] = left;
        heap.push(Entry { priority: priority(&left), a: left.a, idx: top.idx });
        panels.push(right);
        heap.push(Entry { priority: priority(&right), a: right.a, idx: panels.len() - 1 });

        since_resum += 1;
        if since_resum >= 4096 {
            (tv, te, ta) = totals(&panels);
            since_resum = 0;
        }
        ok = converged(&tv, &te, &ta);
        if ok {
            (tv, te, ta) = totals(&panels);
            ok = converged(&tv, &te, &ta);
        }
    }

    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let result: [Estimate; N] = std::array::from_fn(|c| {
        let vals: Vec<f64> = panels.iter().map(|p| p.val[c]).collect();
        let errs: Vec<f64> = panels.iter().map(|p| p.err[c]).collect();
        Estimate::new(exec::pairwise_sum(&vals), exec::pairwise_sum(&errs) + extra.0[c])
    });
    if !ok {
        let worst = (0..N)
            .max_by(|&i, &j| {
                ((result[i].err - extra.0[i]) / tol.target(result[i].value))
                    .total_cmp(&((result[j].err - extra.0[j]) / tol.target(result[j].value)))
            })
            .unwrap_or(0);
        return Err(QuadError::NonConvergence {
            value: result[worst].value,
            err_estimate: result[worst].err,
            subdivisions: total_splits,
        });
    }
    Ok(result)
}

/// Turn sorted breakpoints into consecutive intervals, dropping empty ones.
pub(crate) fn intervals_from_nodes(nodes: &[f64]) -> Vec<(f64, f64)> {
    nodes.windows(2).filter(|w| w[1] > w[0]).map(|w| (w[0], w[1])).collect()
}
