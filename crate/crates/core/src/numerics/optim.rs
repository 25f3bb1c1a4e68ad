//! Minimizers: L-BFGS (two-loop recursion, strong-Wolfe line search) and
//! Powell's derivative-free direction-set method, plus central
//! finite-difference gradients.
//!
//! The optimizers are deterministic given identical inputs and report a trace
//! of accepted iterates; both return the best point seen across *all*
//! evaluations, which guards against a final line-search overshoot.

use rayon::prelude::*;
use std::collections::VecDeque;

#[derive(Debug, Clone)]
pub struct OptimizerOptions {
    pub max_iter: usize,
    /// Convergence threshold on max |∂f/∂x_i| (L-BFGS).
    pub gtol: f64,
    /// L-BFGS history length (curvature pairs retained).
    pub memory: usize,
    /// Armijo (sufficient-decrease) constant.
    pub c1: f64,
    /// Curvature constant for the strong Wolfe condition.
    pub c2: f64,
    /// Relative objective-decrease threshold per cycle (Powell).
    pub ftol: f64,
    /// Default finite-difference step for callers that tie gradients to these
    /// options; `fd_gradient` itself takes the step explicitly.
    pub fd_step: f64,
    /// When set, the Wolfe line search estimates directional derivatives at
    /// trial steps by central differences of the objective (step scaled by
    /// the direction norm) instead of evaluating the full gradient there; the
    /// gradient is then computed only at accepted iterates. Intended for
    /// objectives whose gradient is itself a finite-difference loop and costs
    /// ~2·dim objective evaluations.
    pub line_search_fd: Option<f64>,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        OptimizerOptions {
            max_iter: 200,
            gtol: 1e-7,
            memory: 10,
            c1: 1e-4,
            c2: 0.9,
            ftol: 1e-10,
            fd_step: 0.01,
            line_search_fd: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub iter: usize,
    pub value: f64,
    /// max |g_i| at the iterate; `None` for gradient-free methods.
    pub grad_inf: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimOutcome {
    Converged,
    MaxIterations,
    LineSearchFailed,
}

#[derive(Debug, Clone)]
pub struct OptimResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub outcome: OptimOutcome,
    pub trace: Vec<TraceEntry>,
    pub n_evals: usize,
    pub n_grad_evals: usize,
}

/// Central finite-difference gradient: component i is
/// (f(x+Δe_i) − f(x−Δe_i)) / (2Δ). Components are independent and evaluated
/// in parallel; each component is a single subtraction, so the result is
/// deterministic regardless of thread count.
pub fn fd_gradient<F>(f: &F, x: &[f64], step: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    assert!(step > 0.0, "finite-difference step must be positive");
    (0..x.len())
        .into_par_iter()
        .map(|i| {
            let mut xp = x.to_vec();
            xp[i] += step;
            let mut xm = x.to_vec();
            xm[i] -= step;
            (f(&xp) - f(&xm)) / (2.0 * step)
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn l2_norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Bookkeeping shared by both optimizers: evaluation counts and the best
/// point seen anywhere (including line-search probes).
struct Tracker {
    n_evals: usize,
    n_grad_evals: usize,
    best_x: Vec<f64>,
    best_f: f64,
}

impl Tracker {
    fn new(x0: &[f64]) -> Self {
        Tracker {
            n_evals: 0,
            n_grad_evals: 0,
            best_x: x0.to_vec(),
            best_f: f64::INFINITY,
        }
    }

    fn note(&mut self, x: &[f64], f: f64) {
        self.n_evals += 1;
        if f < self.best_f {
            self.best_f = f;
            self.best_x = x.to_vec();
        }
    }
}

/// L-BFGS minimization. `grad` is typically a finite-difference closure; it
/// is treated as exact. Terminates when max |g| ≤ `opts.gtol` or at the
/// iteration cap; a failed line search returns the best-seen point flagged
/// with [`OptimOutcome::LineSearchFailed`].
pub fn lbfgs<F, G>(mut f: F, mut grad: G, x0: &[f64], opts: &OptimizerOptions) -> OptimResult
where
    F: FnMut(&[f64]) -> f64,
    G: FnMut(&[f64]) -> Vec<f64>,
{
    let mut tr = Tracker::new(x0);
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    tr.note(&x, fx);
    let mut g = grad(&x);
    tr.n_grad_evals += 1;

    let mut trace = vec![TraceEntry {
        iter: 0,
        value: fx,
        grad_inf: Some(inf_norm(&g)),
    }];
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut outcome = OptimOutcome::MaxIterations;

    for iter in 1..=opts.max_iter {
        if inf_norm(&g) <= opts.gtol {
            outcome = OptimOutcome::Converged;
            break;
        }

        let mut d = two_loop_direction(&g, &history);
        let mut dg = dot(&d, &g);
        if dg >= 0.0 {
            // Stale curvature produced an ascent direction; restart steepest.
            history.clear();
            d = g.iter().map(|x| -x).collect();
            dg = -dot(&g, &g);
        }
        let alpha0 = if history.is_empty() {
            (1.0 / l2_norm(&g).max(1e-12)).min(1.0)
        } else {
            1.0
        };

        let step = if let Some(delta) = opts.line_search_fd {
            wolfe_search_fd(&mut f, &mut tr, &x, &d, fx, dg, alpha0, delta, opts)
                .map(|(alpha, f_new)| (alpha, f_new, None))
        } else {
            wolfe_search(&mut f, &mut grad, &mut tr, &x, &d, fx, dg, alpha0, opts)
                .map(|(alpha, f_new, g_new)| (alpha, f_new, Some(g_new)))
        };
        match step {
            Some((alpha, f_new, maybe_g)) => {
                let s: Vec<f64> = d.iter().map(|di| alpha * di).collect();
                let g_new = maybe_g.unwrap_or_else(|| {
                    let xt: Vec<f64> = x.iter().zip(&s).map(|(xi, si)| xi + si).collect();
                    tr.n_grad_evals += 1;
                    grad(&xt)
                });
                let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
                let sy = dot(&s, &y);
                if sy > 1e-10 * l2_norm(&s) * l2_norm(&y) {
                    history.push_back((s.clone(), y, 1.0 / sy));
                    if history.len() > opts.memory.max(1) {
                        history.pop_front();
                    }
                }
                for (xi, si) in x.iter_mut().zip(&s) {
                    *xi += si;
                }
                fx = f_new;
                g = g_new;
                trace.push(TraceEntry {
                    iter,
                    value: fx,
                    grad_inf: Some(inf_norm(&g)),
                });
            }
            None => {
                outcome = OptimOutcome::LineSearchFailed;
                break;
            }
        }
    }
    if outcome == OptimOutcome::MaxIterations && inf_norm(&g) <= opts.gtol {
        outcome = OptimOutcome::Converged;
    }

    OptimResult {
        x: tr.best_x,
        value: tr.best_f,
        outcome,
        trace,
        n_evals: tr.n_evals,
        n_grad_evals: tr.n_grad_evals,
    }
}

/// Two-loop recursion: returns −H·g where H approximates the inverse Hessian
/// from the stored (s, y) pairs, scaled by γ = sᵀy/yᵀy of the newest pair.
fn two_loop_direction(g: &[f64], history: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = history.back() {
        let gamma = dot(s, y) / dot(y, y);
        for qi in q.iter_mut() {
            *qi *= gamma;
        }
    }
    for ((s, y, rho), a) in history.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (a - b) * si;
        }
    }
    q.iter_mut().for_each(|qi| *qi = -*qi);
    q
}

/// Strong-Wolfe line search (bracket + zoom). Evaluates f and g jointly at
/// each trial step; the gradient at the accepted point is handed back so the
/// main loop never re-evaluates it.
#[allow(clippy::too_many_arguments)]
fn wolfe_search<F, G>(
    f: &mut F,
    grad: &mut G,
    tr: &mut Tracker,
    x: &[f64],
    d: &[f64],
    f0: f64,
    dphi0: f64,
    alpha0: f64,
    opts: &OptimizerOptions,
) -> Option<(f64, f64, Vec<f64>)>
where
    F: FnMut(&[f64]) -> f64,
    G: FnMut(&[f64]) -> Vec<f64>,
{
    const ALPHA_MAX: f64 = 1e6;
    const MAX_BRACKET: usize = 20;

    let mut alpha_prev = 0.0;
    let mut f_prev = f0;
    let mut dphi_prev = dphi0;
    let mut alpha = alpha0.min(ALPHA_MAX);

    for i in 1..=MAX_BRACKET {
        let (ft, gt, dpt) = probe(f, grad, tr, x, d, alpha);
        if ft > f0 + opts.c1 * alpha * dphi0 || (i > 1 && ft >= f_prev) {
            return zoom(
                f, grad, tr, x, d, f0, dphi0, alpha_prev, f_prev, dphi_prev, alpha, ft, opts,
            );
        }
        if dpt.abs() <= -opts.c2 * dphi0 {
            return Some((alpha, ft, gt));
        }
        if dpt >= 0.0 {
            return zoom(
                f, grad, tr, x, d, f0, dphi0, alpha, ft, dpt, alpha_prev, f_prev, opts,
            );
        }
        alpha_prev = alpha;
        f_prev = ft;
        dphi_prev = dpt;
        if alpha >= ALPHA_MAX {
            return None;
        }
        alpha = (2.0 * alpha).min(ALPHA_MAX);
    }
    None
}

/// Strong-Wolfe search using objective values only: the directional
/// derivative φ'(α) is estimated by a central difference with an α-step
/// scaled so the x-space perturbation has magnitude `delta`. Used when the
/// caller's gradient is itself a finite-difference loop (see
/// [`OptimizerOptions::line_search_fd`]). Each trial step costs 3 objective
/// evaluations; zoom reuses the same probe.
#[allow(clippy::too_many_arguments)]
fn wolfe_search_fd<F>(
    f: &mut F,
    tr: &mut Tracker,
    x: &[f64],
    d: &[f64],
    f0: f64,
    dphi0: f64,
    alpha0: f64,
    delta: f64,
    opts: &OptimizerOptions,
) -> Option<(f64, f64)>
where
    F: FnMut(&[f64]) -> f64,
{
    const ALPHA_MAX: f64 = 1e6;
    const MAX_BRACKET: usize = 20;
    let eta = delta / l2_norm(d).max(1.0);

    let value = |alpha: f64, f: &mut F, tr: &mut Tracker| -> f64 {
        let xt: Vec<f64> = x.iter().zip(d).map(|(xi, di)| xi + alpha * di).collect();
        let ft = f(&xt);
        tr.note(&xt, ft);
        ft
    };
    let probe = |alpha: f64, f: &mut F, tr: &mut Tracker| -> (f64, f64) {
        let ft = value(alpha, f, tr);
        let dpt = (value(alpha + eta, f, tr) - value(alpha - eta, f, tr)) / (2.0 * eta);
        (ft, dpt)
    };

    let zoom = |mut alo: f64,
                    mut flo: f64,
                    mut dplo: f64,
                    mut ahi: f64,
                    mut fhi: f64,
                    f: &mut F,
                    tr: &mut Tracker|
     -> Option<(f64, f64)> {
        for _ in 0..30 {
            let dalpha = ahi - alo;
            let denom = fhi - flo - dplo * dalpha;
            let mut at = if denom.abs() > 1e-300 {
                alo - 0.5 * dplo * dalpha * dalpha / denom
            } else {
                alo + 0.5 * dalpha
            };
            let g1 = alo + 0.1 * dalpha;
            let g2 = alo + 0.9 * dalpha;
            let (lo_guard, hi_guard) = if g1 <= g2 { (g1, g2) } else { (g2, g1) };
            if !at.is_finite() || at < lo_guard || at > hi_guard {
                at = alo + 0.5 * dalpha;
            }
            let (ft, dpt) = probe(at, f, tr);
            if ft > f0 + opts.c1 * at * dphi0 || ft >= flo {
                ahi = at;
                fhi = ft;
            } else {
                if dpt.abs() <= -opts.c2 * dphi0 {
                    return Some((at, ft));
                }
                if dpt * (ahi - alo) >= 0.0 {
                    ahi = alo;
                    fhi = flo;
                }
                alo = at;
                flo = ft;
                dplo = dpt;
            }
            if (ahi - alo).abs() <= 1e-14 * alo.abs().max(1.0) {
                break;
            }
        }
        None
    };

    let mut alpha_prev = 0.0;
    let mut f_prev = f0;
    let mut dphi_prev = dphi0;
    let mut alpha = alpha0.min(ALPHA_MAX);

    for i in 1..=MAX_BRACKET {
        let (ft, dpt) = probe(alpha, f, tr);
        if ft > f0 + opts.c1 * alpha * dphi0 || (i > 1 && ft >= f_prev) {
            return zoom(alpha_prev, f_prev, dphi_prev, alpha, ft, f, tr);
        }
        if dpt.abs() <= -opts.c2 * dphi0 {
            return Some((alpha, ft));
        }
        if dpt >= 0.0 {
            return zoom(alpha, ft, dpt, alpha_prev, f_prev, f, tr);
        }
        alpha_prev = alpha;
        f_prev = ft;
        dphi_prev = dpt;
        if alpha >= ALPHA_MAX {
            return None;
        }
        alpha = (2.0 * alpha).min(ALPHA_MAX);
    }
    None
}

/// Evaluate f, g, and the directional derivative at x + α·d.
fn probe<F, G>(
    f: &mut F,
    grad: &mut G,
    tr: &mut Tracker,
    x: &[f64],
    d: &[f64],
    alpha: f64,
) -> (f64, Vec<f64>, f64)
where
    F: FnMut(&[f64]) -> f64,
    G: FnMut(&[f64]) -> Vec<f64>,
{
    let xt: Vec<f64> = x.iter().zip(d).map(|(xi, di)| xi + alpha * di).collect();
    let ft = f(&xt);
    tr.note(&xt, ft);
    let gt = grad(&xt);
    tr.n_grad_evals += 1;
    let dpt = dot(&gt, d);
    (ft, gt, dpt)
}

/// Zoom phase of the strong-Wolfe search: shrink [alo, ahi] (which brackets
/// a point satisfying both conditions) until a trial satisfies them.
#[allow(clippy::too_many_arguments)]
fn zoom<F, G>(
    f: &mut F,
    grad: &mut G,
    tr: &mut Tracker,
    x: &[f64],
    d: &[f64],
    f0: f64,
    dphi0: f64,
    mut alo: f64,
    mut flo: f64,
    mut dplo: f64,
    mut ahi: f64,
    mut fhi: f64,
    opts: &OptimizerOptions,
) -> Option<(f64, f64, Vec<f64>)>
where
    F: FnMut(&[f64]) -> f64,
    G: FnMut(&[f64]) -> Vec<f64>,
{
    for _ in 0..30 {
        // Quadratic interpolation from (alo, flo, dplo) and (ahi, fhi),
        // safeguarded toward bisection.
        let dalpha = ahi - alo;
        let denom = fhi - flo - dplo * dalpha;
        let mut at = if denom.abs() > 1e-300 {
            alo - 0.5 * dplo * dalpha * dalpha / denom
        } else {
            alo + 0.5 * dalpha
        };
        let lo_guard = alo + 0.1 * dalpha;
        let hi_guard = alo + 0.9 * dalpha;
        let (lo_guard, hi_guard) = if lo_guard <= hi_guard {
            (lo_guard, hi_guard)
        } else {
            (hi_guard, lo_guard)
        };
        if !at.is_finite() || at < lo_guard || at > hi_guard {
            at = alo + 0.5 * dalpha;
        }
        let (ft, gt, dpt) = probe(f, grad, tr, x, d, at);
        if ft > f0 + opts.c1 * at * dphi0 || ft >= flo {
            ahi = at;
            fhi = ft;
        } else {
            if dpt.abs() <= -opts.c2 * dphi0 {
                return Some((at, ft, gt));
            }
            if dpt * (ahi - alo) >= 0.0 {
                ahi = alo;
                fhi = flo;
            }
            alo = at;
            flo = ft;
            dplo = dpt;
        }
        if (ahi - alo).abs() <= 1e-14 * alo.abs().max(1.0) {
            break;
        }
    }
    None
}

/// Powell's conjugate-direction method: cycles of 1-D Brent minimizations
/// along a direction set, replacing the direction of largest decrease with
/// the cycle displacement when the standard acceptance test passes.
/// Terminates when a full cycle's relative decrease falls below `opts.ftol`.
pub fn powell<F>(mut f: F, x0: &[f64], opts: &OptimizerOptions) -> OptimResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut tr = Tracker::new(x0);
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    tr.note(&x, fx);

    let mut dirs: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut trace = vec![TraceEntry {
        iter: 0,
        value: fx,
        grad_inf: None,
    }];
    let mut outcome = OptimOutcome::MaxIterations;

    for iter in 1..=opts.max_iter {
        let f_start = fx;
        let x_start = x.clone();
        let mut biggest_drop = 0.0;
        let mut biggest_idx = 0;

        for (i, dir) in dirs.iter().enumerate() {
            let f_before = fx;
            let (x_new, f_new) = line_minimize(&mut f, &mut tr, &x, dir, fx);
            x = x_new;
            fx = f_new;
            if f_before - fx > biggest_drop {
                biggest_drop = f_before - fx;
                biggest_idx = i;
            }
        }
        trace.push(TraceEntry {
            iter,
            value: fx,
            grad_inf: None,
        });

        if 2.0 * (f_start - fx) <= opts.ftol * (f_start.abs() + fx.abs()) + 1e-25 {
            outcome = OptimOutcome::Converged;
            break;
        }

        // Powell's test for adopting the cycle displacement as a direction.
        let x_extrap: Vec<f64> = x.iter().zip(&x_start).map(|(a, b)| 2.0 * a - b).collect();
        let f_extrap = f(&x_extrap);
        tr.note(&x_extrap, f_extrap);
        if f_extrap < f_start {
            let df = f_start - fx;
            let t = 2.0 * (f_start - 2.0 * fx + f_extrap) * (df - biggest_drop).powi(2)
                - biggest_drop * (f_start - f_extrap).powi(2);
            if t < 0.0 {
                let u_new: Vec<f64> = x.iter().zip(&x_start).map(|(a, b)| a - b).collect();
                if l2_norm(&u_new) > 1e-300 {
                    let (x_new, f_new) = line_minimize(&mut f, &mut tr, &x, &u_new, fx);
                    x = x_new;
                    fx = f_new;
                    dirs.remove(biggest_idx);
                    dirs.push(u_new);
                }
            }
        }
    }

    OptimResult {
        x: tr.best_x,
        value: tr.best_f,
        outcome,
        trace,
        n_evals: tr.n_evals,
        n_grad_evals: 0,
    }
}

/// Minimize f along x + α·u: geometric bracketing then Brent.
fn line_minimize<F>(
    f: &mut F,
    tr: &mut Tracker,
    x: &[f64],
    u: &[f64],
    f0: f64,
) -> (Vec<f64>, f64)
where
    F: FnMut(&[f64]) -> f64,
{
    let g = |alpha: f64, f: &mut F, tr: &mut Tracker| -> f64 {
        let xt: Vec<f64> = x.iter().zip(u).map(|(xi, ui)| xi + alpha * ui).collect();
        let ft = f(&xt);
        tr.note(&xt, ft);
        ft
    };

    // Bracket a minimum: walk downhill from α=0 doubling the step.
    let mut h = 1.0;
    let f_plus = g(h, f, tr);
    let (mut a, mut fa, mut b, mut fb);
    if f_plus < f0 {
        a = 0.0;
        fa = f0;
        b = h;
        fb = f_plus;
    } else {
        let f_minus = g(-h, f, tr);
        if f_minus < f0 {
            h = -h;
            a = 0.0;
            fa = f0;
            b = h;
            fb = f_minus;
        } else {
            // Already bracketed: (−h, 0, +h) with the middle lowest.
            let (alpha, fmin) = brent(|al, f, tr| g(al, f, tr), f, tr, -h, 0.0, h, f0);
            let xt: Vec<f64> = x.iter().zip(u).map(|(xi, ui)| xi + alpha * ui).collect();
            return (xt, fmin);
        }
    }
    let (mut c, mut fc) = (b + (b - a), g(b + (b - a), f, tr));
    let mut expansions = 0;
    while fc < fb && expansions < 80 {
        a = b;
        fa = fb;
        b = c;
        fb = fc;
        c = b + 2.0 * (b - a);
        fc = g(c, f, tr);
        expansions += 1;
    }
    let _ = fa;
    let (alpha, fmin) = brent(|al, f, tr| g(al, f, tr), f, tr, a, b, c, fb);
    let xt: Vec<f64> = x.iter().zip(u).map(|(xi, ui)| xi + alpha * ui).collect();
    (xt, fmin)
}

/// Brent's parabolic-interpolation/golden-section scalar minimizer on a
/// bracketing triple (ax, bx, cx) with f(bx) below both ends.
fn brent<F, G>(
    mut g: G,
    f: &mut F,
    tr: &mut Tracker,
    ax: f64,
    bx: f64,
    cx: f64,
    fbx: f64,
) -> (f64, f64)
where
    F: FnMut(&[f64]) -> f64,
    G: FnMut(f64, &mut F, &mut Tracker) -> f64,
{
    const CGOLD: f64 = 0.381_966_0;
    const ZEPS: f64 = 1e-18;
    const TOL: f64 = 1e-10;
    const MAX_ITER: usize = 100;

    let (mut a, mut b) = (ax.min(cx), ax.max(cx));
    let (mut x, mut w, mut v) = (bx, bx, bx);
    let (mut fx, mut fw, mut fv) = (fbx, fbx, fbx);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;

    for _ in 0..MAX_ITER {
        let xm = 0.5 * (a + b);
        let tol1 = TOL * x.abs() + ZEPS;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            return (x, fx);
        }
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if p.abs() >= (0.5 * q * etemp).abs() || p <= q * (a - x) || p >= q * (b - x) {
                e = if x >= xm { a - x } else { b - x };
                d = CGOLD * e;
            } else {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
            }
        } else {
            e = if x >= xm { a - x } else { b - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else {
            x + tol1.copysign(d)
        };
        let fu = g(u, f, tr);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            #[allow(clippy::float_cmp)]
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, fx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }

    fn rosenbrock_grad(x: &[f64]) -> Vec<f64> {
        vec![
            -2.0 * (1.0 - x[0]) - 400.0 * x[0] * (x[1] - x[0] * x[0]),
            200.0 * (x[1] - x[0] * x[0]),
        ]
    }

    #[test]
    fn fd_gradient_exact_on_quadratics() {
        // Central differences are analytically exact for quadratics; only
        // float roundoff remains.
        let f = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
        let g = fd_gradient(&f, &[1.0, 2.0], 0.01);
        assert!((g[0] - 2.0).abs() < 1e-12);
        assert!((g[1] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn fd_gradient_error_scales_quadratically() {
        let f = |x: &[f64]| x[0].sin();
        let exact = 0.3f64.cos();
        let err = |step: f64| (fd_gradient(&f, &[0.3], step)[0] - exact).abs();
        let e2 = err(1e-2);
        let e3 = err(1e-3);
        // Central-difference truncation error is (Δ²/6)·|f'''|.
        assert!((e2 - 1e-4 / 6.0 * exact).abs() < 1e-7);
        let ratio = e2 / e3;
        assert!(
            (90.0..110.0).contains(&ratio),
            "O(Δ²) scaling violated: ratio {ratio}"
        );
    }

    #[test]
    fn lbfgs_solves_a_shifted_sphere_quickly() {
        let c = [0.3, -0.7, 1.1];
        let f = |x: &[f64]| -> f64 { x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum() };
        let g = |x: &[f64]| -> Vec<f64> { x.iter().zip(&c).map(|(a, b)| 2.0 * (a - b)).collect() };
        let out = lbfgs(f, g, &[0.0, 0.0, 0.0], &OptimizerOptions::default());
        assert_eq!(out.outcome, OptimOutcome::Converged);
        assert!(
            out.trace.len() <= 4,
            "sphere should converge within 3 iterations, took {}",
            out.trace.len() - 1
        );
        for (xi, ci) in out.x.iter().zip(&c) {
            assert!((xi - ci).abs() < 1e-8);
        }
    }

    #[test]
    fn lbfgs_solves_rosenbrock_from_the_classic_start() {
        let opts = OptimizerOptions {
            gtol: 1e-9,
            max_iter: 300,
            ..Default::default()
        };
        let out = lbfgs(rosenbrock, rosenbrock_grad, &[-1.2, 1.0], &opts);
        assert_eq!(out.outcome, OptimOutcome::Converged);
        assert!((out.x[0] - 1.0).abs() < 1e-6, "x0 = {}", out.x[0]);
        assert!((out.x[1] - 1.0).abs() < 1e-6, "x1 = {}", out.x[1]);
    }

    #[test]
    fn lbfgs_accepted_iterates_never_increase() {
        let opts = OptimizerOptions {
            gtol: 1e-9,
            max_iter: 300,
            ..Default::default()
        };
        let out = lbfgs(rosenbrock, rosenbrock_grad, &[-1.2, 1.0], &opts);
        for w in out.trace.windows(2) {
            assert!(
                w[1].value <= w[0].value,
                "objective rose between accepted iterates: {} → {}",
                w[0].value,
                w[1].value
            );
        }
        // Best-seen is at least as good as every accepted iterate.
        for entry in &out.trace {
            assert!(out.value <= entry.value + 1e-15);
        }
    }

    #[test]
    fn lbfgs_with_fd_gradient_matches_analytic_route() {
        let opts = OptimizerOptions {
            gtol: 1e-6,
            ..Default::default()
        };
        let f = |x: &[f64]| (x[0] - 2.0).powi(2) + 3.0 * (x[1] + 1.0).powi(2) + x[0] * x[1] * 0.1;
        let analytic = lbfgs(
            f,
            |x| vec![2.0 * (x[0] - 2.0) + 0.1 * x[1], 6.0 * (x[1] + 1.0) + 0.1 * x[0]],
            &[0.0, 0.0],
            &opts,
        );
        let fd = lbfgs(f, |x| fd_gradient(&f, x, 1e-4), &[0.0, 0.0], &opts);
        for (a, b) in analytic.x.iter().zip(&fd.x) {
            assert!((a - b).abs() < 1e-5);
        }
    }

    #[test]
    fn powell_nails_a_quadratic_bowl() {
        let f = |x: &[f64]| (x[0] - 0.5).powi(2) + 3.0 * (x[1] + 2.0).powi(2);
        let out = powell(f, &[4.0, 4.0], &OptimizerOptions::default());
        assert_eq!(out.outcome, OptimOutcome::Converged);
        assert!((out.x[0] - 0.5).abs() < 1e-8);
        assert!((out.x[1] + 2.0).abs() < 1e-8);
        assert!(out.n_grad_evals == 0, "Powell must not use gradients");
    }

    #[test]
    fn powell_matches_lbfgs_on_a_convex_function() {
        let f = |x: &[f64]| x[0] * x[0] + x[0] * x[1] + 2.0 * x[1] * x[1] - 3.0 * x[0];
        let p = powell(f, &[0.0, 0.0], &OptimizerOptions::default());
        let l = lbfgs(
            f,
            |x| vec![2.0 * x[0] + x[1] - 3.0, x[0] + 4.0 * x[1]],
            &[0.0, 0.0],
            &OptimizerOptions::default(),
        );
        for (a, b) in p.x.iter().zip(&l.x) {
            assert!((a - b).abs() < 1e-6, "powell {a} vs lbfgs {b}");
        }
    }

    #[test]
    fn powell_handles_rosenbrock() {
        let opts = OptimizerOptions {
            max_iter: 500,
            ftol: 1e-14,
            ..Default::default()
        };
        let out = powell(rosenbrock, &[-1.2, 1.0], &opts);
        assert!(out.value < 1e-10, "f = {}", out.value);
        assert!((out.x[0] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn powell_trace_is_bounded_and_non_increasing() {
        let out = powell(rosenbrock, &[-1.2, 1.0], &OptimizerOptions::default());
        assert!(out.trace.len() <= out.trace.capacity().max(201));
        for w in out.trace.windows(2) {
            assert!(w[1].value <= w[0].value + 1e-15);
        }
        assert!(out.trace.iter().all(|t| t.grad_inf.is_none()));
    }

    #[test]
    fn optimizers_are_deterministic() {
        let opts = OptimizerOptions::default();
        let a = lbfgs(rosenbrock, rosenbrock_grad, &[-1.2, 1.0], &opts);
        let b = lbfgs(rosenbrock, rosenbrock_grad, &[-1.2, 1.0], &opts);
        assert_eq!(a.x, b.x);
        assert_eq!(a.n_evals, b.n_evals);
        let p1 = powell(rosenbrock, &[-1.2, 1.0], &opts);
        let p2 = powell(rosenbrock, &[-1.2, 1.0], &opts);
        assert_eq!(p1.x, p2.x);
    }

    #[test]
    fn fd_line_search_mode_still_converges() {
        // Probes estimate φ' from objective values; the full gradient is only
        // evaluated at accepted iterates.
        let opts = OptimizerOptions {
            gtol: 1e-7,
            max_iter: 300,
            line_search_fd: Some(1e-5),
            ..Default::default()
        };
        let out = lbfgs(
            rosenbrock,
            |x| fd_gradient(&rosenbrock, x, 1e-6),
            &[-1.2, 1.0],
            &opts,
        );
        assert_eq!(out.outcome, OptimOutcome::Converged);
        assert!((out.x[0] - 1.0).abs() < 1e-5, "x0 = {}", out.x[0]);
        assert!((out.x[1] - 1.0).abs() < 1e-5, "x1 = {}", out.x[1]);
        // One gradient call per accepted iterate plus the start point.
        assert!(
            out.n_grad_evals <= out.trace.len(),
            "grad evals {} should not exceed accepted iterates {}",
            out.n_grad_evals,
            out.trace.len()
        );
        for w in out.trace.windows(2) {
            assert!(w[1].value <= w[0].value + 1e-15);
        }
    }

    #[test]
    fn zero_gradient_start_converges_immediately() {
        let f = |x: &[f64]| x[0] * x[0];
        let g = |x: &[f64]| vec![2.0 * x[0]];
        let out = lbfgs(f, g, &[0.0], &OptimizerOptions::default());
        assert_eq!(out.outcome, OptimOutcome::Converged);
        assert_eq!(out.trace.len(), 1, "should stop at iteration 0");
    }
}
