//! Vector-valued adaptive Simpson quadrature.
//!
//! Two strategies share the same panel rule (Simpson on the whole panel
//! against Simpson on its halves, error taken as their difference without
//! the 1/15 factor). The recursive form splits the tolerance between halves
//! and keeps memory at O(depth·len), which suits long vectors of continuous
//! integrands. The global form always refines the worst panel and so also
//! converges across jumps, where halving the local tolerance would not.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

const MAX_DEPTH: u32 = 50;

/// Componentwise integral with the accumulated |S₂ − S₁| per component.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadrature {
    pub value: Vec<f64>,
    pub error: Vec<f64>,
    pub evals: u64,
    pub converged: bool,
}

impl Quadrature {
    pub fn max_error(&self) -> f64 {
        self.error.iter().copied().fold(0.0, f64::max)
    }

    pub fn error_norm(&self) -> f64 {
        self.error.iter().map(|e| e * e).sum::<f64>().sqrt()
    }
}

/// The right end of a piece is evaluated just inside it, so that a jump at
/// the break point is seen from the left.
fn panels(pieces: &[(f64, f64)], per_piece: usize) -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    for &(lo, hi) in pieces.iter().filter(|p| p.1 > p.0) {
        let n = per_piece.max(1);
        let w = (hi - lo) / n as f64;
        for i in 0..n {
            let a = lo + i as f64 * w;
            let b = if i + 1 == n {
                hi
            } else {
                lo + (i + 1) as f64 * w
            };
            let b_eval = if i + 1 == n { hi.next_down().max(a) } else { b };
            out.push((a, b, b_eval));
        }
    }
    out
}

fn simpson(a: f64, b: f64, fa: &[f64], fm: &[f64], fb: &[f64]) -> Vec<f64> {
    let h = (b - a) / 6.0;
    fa.iter()
        .zip(fm)
        .zip(fb)
        .map(|((x, y), z)| h * (x + 4.0 * y + z))
        .collect()
}

fn add_into(acc: &mut [f64], x: &[f64]) {
    acc.iter_mut().zip(x).for_each(|(a, b)| *a += b);
}

/// Recursive vector adaptive Simpson over the pieces, each first split
/// into `per_piece` panels. The total tolerance is a bound per component.
pub fn adaptive_simpson<F>(f: &F, pieces: &[(f64, f64)], tol: f64, per_piece: usize) -> Quadrature
where
    F: Fn(f64) -> Vec<f64> + Sync,
{
    let ps = panels(pieces, per_piece);
    if ps.is_empty() {
        let len = f(0.0).len();
        return Quadrature {
            value: vec![0.0; len],
            error: vec![0.0; len],
            evals: 1,
            converged: true,
        };
    }
    let each = tol / ps.len() as f64;
    let parts: Vec<Quadrature> = ps
        .par_iter()
        .map(|&(a, b, b_eval)| {
            let (fa, fb) = (f(a), f(b_eval));
            let m = 0.5 * (a + b);
            let fm = f(m);
            let whole = simpson(a, b, &fa, &fm, &fb);
            let mut q = Quadrature {
                value: vec![0.0; fa.len()],
                error: vec![0.0; fa.len()],
                evals: 3,
                converged: true,
            };
            recurse(f, a, b, &fa, &fm, &fb, &whole, each, 0, &mut q);
            q
        })
        .collect();
    let len = parts[0].value.len();
    let mut total = Quadrature {
        value: vec![0.0; len],
        error: vec![0.0; len],
        evals: 0,
        converged: true,
    };
    for p in &parts {
        add_into(&mut total.value, &p.value);
        add_into(&mut total.error, &p.error);
        total.evals += p.evals;
        total.converged &= p.converged;
    }
    total
}

#[allow(clippy::too_many_arguments)]
fn recurse<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: &[f64],
    fm: &[f64],
    fb: &[f64],
    whole: &[f64],
    tol: f64,
    depth: u32,
    q: &mut Quadrature,
) where
    F: Fn(f64) -> Vec<f64> + Sync,
{
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    q.evals += 2;
    let left = simpson(a, m, fa, &flm, fm);
    let right = simpson(m, b, fm, &frm, fb);
    let mut worst = 0.0f64;
    let diff: Vec<f64> = left
        .iter()
        .zip(&right)
        .zip(whole)
        .map(|((l, r), w)| {
            let d = (l + r - w).abs();
            // Differences at the rounding level of the panel sum count as zero.
            let floor = 8.0 * f64::EPSILON * (l.abs() + r.abs());
            worst = worst.max(d - floor);
            d
        })
        .collect();
    let tiny = b - a <= 1e-13 * (1.0 + a.abs());
    if worst <= tol || depth >= MAX_DEPTH || tiny {
        if worst > tol && !tiny {
            q.converged = false;
        }
        add_into(&mut q.value, &left);
        add_into(&mut q.value, &right);
        add_into(&mut q.error, &diff);
        return;
    }
    recurse(f, a, m, fa, &flm, fm, &left, 0.5 * tol, depth + 1, q);
    recurse(f, m, b, fm, &frm, fb, &right, 0.5 * tol, depth + 1, q);
}

struct Panel {
    a: f64,
    b: f64,
    /// f at a, a + w/4, a + w/2, a + 3w/4, b.
    nodes: [Vec<f64>; 5],
    value: Vec<f64>,
    error: Vec<f64>,
    worst: f64,
}

impl Panel {
    fn new(a: f64, b: f64, nodes: [Vec<f64>; 5]) -> Self {
        let m = 0.5 * (a + b);
        let whole = simpson(a, b, &nodes[0], &nodes[2], &nodes[4]);
        let left = simpson(a, m, &nodes[0], &nodes[1], &nodes[2]);
        let right = simpson(m, b, &nodes[2], &nodes[3], &nodes[4]);
        let value: Vec<f64> = left.iter().zip(&right).map(|(l, r)| l + r).collect();
        let error: Vec<f64> = value
            .iter()
            .zip(&whole)
            .map(|(v, w)| (v - w).abs())
            .collect();
        let worst = if b - a <= 1e-13 * (1.0 + a.abs()) {
            0.0
        } else {
            error.iter().copied().fold(0.0, f64::max)
        };
        Self {
            a,
            b,
            nodes,
            value,
            error,
            worst,
        }
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.worst
            .total_cmp(&other.worst)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Globally adaptive vector Simpson: refine the panel with the largest
/// error until every component's total error is ≤ `tol`, or `max_evals`
/// evaluations have been spent.
pub fn adaptive_simpson_global<F>(
    f: &F,
    pieces: &[(f64, f64)],
    tol: f64,
    per_piece: usize,
    max_evals: u64,
) -> Quadrature
where
    F: Fn(f64) -> Vec<f64>,
{
    let evals = std::cell::Cell::new(0u64);
    let eval = |t: f64| {
        evals.set(evals.get() + 1);
        f(t)
    };
    let mut heap = BinaryHeap::new();
    for (a, b, b_eval) in panels(pieces, per_piece) {
        let w = b - a;
        let nodes = [
            eval(a),
            eval(a + 0.25 * w),
            eval(a + 0.5 * w),
            eval(a + 0.75 * w),
            eval(b_eval),
        ];
        heap.push(Panel::new(a, b, nodes));
    }
    if heap.is_empty() {
        let len = f(0.0).len();
        return Quadrature {
            value: vec![0.0; len],
            error: vec![0.0; len],
            evals: 1,
            converged: true,
        };
    }
    let len = heap.peek().map(|p| p.value.len()).unwrap_or(0);
    let mut total = vec![0.0; len];
    heap.iter().for_each(|p| add_into(&mut total, &p.error));
    let over = |t: &[f64]| t.iter().any(|&e| e > tol);

    while over(&total) && evals.get() < max_evals {
        let Some(p) = heap.pop() else { break };
        if p.worst == 0.0 {
            heap.push(p);
            break;
        }
        let (a, b) = (p.a, p.b);
        let m = 0.5 * (a + b);
        let [f0, f1, f2, f3, f4] = p.nodes;
        let (q1, q3) = (0.5 * (a + m), 0.5 * (m + b));
        let left = Panel::new(
            a,
            m,
            [
                f0,
                eval(0.5 * (a + q1)),
                f1,
                eval(0.5 * (q1 + m)),
                f2.clone(),
            ],
        );
        let right = Panel::new(
            m,
            b,
            [f2, eval(0.5 * (m + q3)), f3, eval(0.5 * (q3 + b)), f4],
        );
        total.iter_mut().zip(&p.error).for_each(|(t, e)| *t -= e);
        add_into(&mut total, &left.error);
        add_into(&mut total, &right.error);
        heap.push(left);
        heap.push(right);
    }

    let mut done: Vec<Panel> = heap.into_vec();
    done.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut value = vec![0.0; len];
    let mut error = vec![0.0; len];
    for p in &done {
        add_into(&mut value, &p.value);
        add_into(&mut error, &p.error);
    }
    let converged = !over(&error);
    Quadrature {
        value,
        error,
        evals: evals.get(),
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_of_degree_three_are_exact() {
        let f = |t: f64| vec![t * t * t - 2.0 * t + 1.0, 4.0];
        let q = adaptive_simpson(&f, &[(0.0, 1.0)], 1e-12, 4);
        assert!((q.value[0] - 0.25).abs() < 1e-15);
        assert!((q.value[1] - 4.0).abs() < 1e-15);
        assert!(q.converged);
    }

    #[test]
    fn kinks_converge_recursively() {
        let f = |t: f64| vec![(t - 0.3).abs(), (std::f64::consts::PI * t).sin()];
        let q = adaptive_simpson(&f, &[(0.0, 1.0)], 1e-9, 16);
        assert!(q.converged);
        assert!((q.value[0] - (0.045 + 0.245)).abs() < 1e-9);
        assert!((q.value[1] - 2.0 / std::f64::consts::PI).abs() < 1e-9);
    }

    #[test]
    fn jump_at_break_point_is_exact() {
        let f = |t: f64| vec![if t < 0.5 { 1.0 } else { 3.0 }];
        let q = adaptive_simpson(&f, &[(0.0, 0.5), (0.5, 1.0)], 1e-12, 2);
        assert!((q.value[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn global_strategy_handles_undeclared_jumps() {
        let f = |t: f64| vec![if t < 1.0 / 3.0 { -1.0 } else { 1.0 }, t];
        let q = adaptive_simpson_global(&f, &[(0.0, 1.0)], 1e-6, 4, 100_000);
        assert!(q.converged);
        assert!((q.value[0] - 1.0 / 3.0).abs() < 1e-6, "{}", q.value[0]);
        assert!((q.value[1] - 0.5).abs() < 1e-15);
    }
}
