//! Pseudo-arclength continuation of critical points in the plane
//! separation h, with eigenvalue-crossing detection, bisection event
//! localization, and branch switching at symmetry-breaking points.

use crate::critical::{
    bounding_rectangle, evaluate_critical, newton_solve, CriticalKind, CriticalPoint,
    NewtonOptions,
};
use crate::error::{ContinuationError, SolveError};
use crate::functional::{Configuration, State};
use crate::symmetry::fixed_lines;

/// One accepted point along a branch.
#[derive(Debug, Clone, Copy)]
pub struct BranchPoint {
    /// Cumulative arclength in (x, y, h).
    pub s: f64,
    pub state: State,
    pub f: f64,
    /// Hessian eigenvalues, ascending.
    pub eig: [f64; 2],
    pub kind: CriticalKind,
}

/// Why a branch trace stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    ReachedTarget,
    StepUnderflow,
    Diverged,
    MaxSteps,
}

/// An arclength-ordered critical-point path with its detected events.
#[derive(Debug, Clone)]
pub struct Branch {
    pub points: Vec<BranchPoint>,
    pub events: Vec<BifurcationEvent>,
    pub termination: Termination,
}

impl Branch {
    pub fn h_span(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for p in &self.points {
            lo = lo.min(p.state.h);
            hi = hi.max(p.state.h);
        }
        (lo, hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    SimpleCrossing,
    DoubleDegenerate,
    Fold,
}

impl EventKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EventKind::SimpleCrossing => "SimpleCrossing",
            EventKind::DoubleDegenerate => "DoubleDegenerate",
            EventKind::Fold => "Fold",
        }
    }
}

/// A localized eigenvalue-crossing (or fold) along a branch.
#[derive(Debug, Clone)]
pub struct BifurcationEvent {
    pub state: State,
    pub kind: EventKind,
    /// Unit null directions of the Hessian at the event (1, or 2 when both
    /// eigenvalues vanish).
    pub null_dirs: Vec<[f64; 2]>,
    /// Width of the final h bracket.
    pub h_accuracy: f64,
}

/// Step-control and tolerance settings for a branch trace.
#[derive(Debug, Clone, Copy)]
pub struct ContinuationOptions {
    pub ds0: f64,
    pub ds_min: f64,
    pub ds_max: f64,
    /// Step growth factor applied after fast corrector convergence.
    pub grow: f64,
    /// Corrector iteration count at or under which the step grows.
    pub grow_iters: usize,
    pub corrector_max_iter: usize,
    /// Gradient max-norm tolerance; `None` selects 1e-12 * max(1, n * m).
    pub tol: Option<f64>,
    pub max_steps: usize,
    pub detect_events: bool,
    /// Offset factor for branch-switch seeds relative to problem scale.
    pub switch_eps: f64,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self {
            ds0: 1e-2,
            ds_min: 1e-8,
            ds_max: 1e-1,
            grow: 1.3,
            grow_iters: 3,
            corrector_max_iter: 20,
            tol: None,
            max_steps: 200_000,
            detect_events: true,
            switch_eps: 1e-3,
        }
    }
}

impl ContinuationOptions {
    fn tolerance(&self, cfg: &Configuration) -> f64 {
        self.tol
            .unwrap_or_else(|| 1e-12 * (cfg.len() as f64 * cfg.m()).max(1.0))
    }
}

/// Unit tangent of the solution curve of F(x, y, h) = 0: the null vector
/// of the 2x3 matrix [DF | dF/dh], oriented along `prior` when given and
/// toward decreasing h otherwise.
pub fn tangent(
    cfg: &Configuration,
    state: &State,
    prior: Option<[f64; 3]>,
) -> Result<[f64; 3], ContinuationError> {
    let hess = cfg.hessian(state);
    let fh = cfg.gradient_dh(state);
    let r1 = [hess.xx, hess.xy, fh[0]];
    let r2 = [hess.xy, hess.yy, fh[1]];
    let t = [
        r1[1] * r2[2] - r1[2] * r2[1],
        r1[2] * r2[0] - r1[0] * r2[2],
        r1[0] * r2[1] - r1[1] * r2[0],
    ];
    let n1 = (r1[0] * r1[0] + r1[1] * r1[1] + r1[2] * r1[2]).sqrt();
    let n2 = (r2[0] * r2[0] + r2[1] * r2[1] + r2[2] * r2[2]).sqrt();
    let nt = (t[0] * t[0] + t[1] * t[1] + t[2] * t[2]).sqrt();
    // rank drops when the rows are parallel, or when both rows vanish
    // together (measured against a characteristic Hessian magnitude; the
    // row norms themselves are no yardstick at a degenerate point)
    let h_char = cfg.m() * (cfg.m() + 2.0) * cfg.value(state) / (state.h * state.h);
    if nt <= 1e-12 * (n1 * n2).max(f64::MIN_POSITIVE)
        || n1.max(n2) <= 1e-11 * h_char.max(f64::MIN_POSITIVE)
    {
        return Err(ContinuationError::RankDeficientTangent);
    }
    let mut unit = [t[0] / nt, t[1] / nt, t[2] / nt];
    let flip = match prior {
        Some(p) => unit[0] * p[0] + unit[1] * p[1] + unit[2] * p[2] < 0.0,
        None => unit[2] > 0.0,
    };
    if flip {
        for c in &mut unit {
            *c = -*c;
        }
    }
    Ok(unit)
}

/// Solves a 3x3 linear system by Gaussian elimination with partial
/// pivoting. Returns `None` on a vanishing pivot.
fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let mut m = [
        [a[0][0], a[0][1], a[0][2], b[0]],
        [a[1][0], a[1][1], a[1][2], b[1]],
        [a[2][0], a[2][1], a[2][2], b[2]],
    ];
    for col in 0..3 {
        let mut piv = col;
        for row in col + 1..3 {
            if m[row][col].abs() > m[piv][col].abs() {
                piv = row;
            }
        }
        if m[piv][col].abs() <= f64::MIN_POSITIVE {
            return None;
        }
        m.swap(col, piv);
        for row in col + 1..3 {
            let factor = m[row][col] / m[col][col];
            for k in col..4 {
                m[row][k] -= factor * m[col][k];
            }
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut acc = m[row][3];
        for k in row + 1..3 {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}

/// Newton corrector for the augmented system {F = 0, t . (u - u_pred) = 0}.
fn correct(
    cfg: &Configuration,
    u_pred: [f64; 3],
    t: [f64; 3],
    tol: f64,
    max_iter: usize,
) -> Option<(State, usize)> {
    let mut u = u_pred;
    for it in 0..max_iter {
        if u[2] <= 0.0 || !u.iter().all(|c| c.is_finite()) {
            return None;
        }
        let s = State {
            x: u[0],
            y: u[1],
            h: u[2],
        };
        let g = cfg.gradient(&s);
        let c = t[0] * (u[0] - u_pred[0]) + t[1] * (u[1] - u_pred[1]) + t[2] * (u[2] - u_pred[2]);
        if g[0].abs().max(g[1].abs()) <= tol {
            return Some((s, it));
        }
        let hess = cfg.hessian(&s);
        let fh = cfg.gradient_dh(&s);
        let jac = [
            [hess.xx, hess.xy, fh[0]],
            [hess.xy, hess.yy, fh[1]],
            [t[0], t[1], t[2]],
        ];
        let step = solve3(jac, [-g[0], -g[1], -c])?;
        u = [u[0] + step[0], u[1] + step[1], u[2] + step[2]];
    }
    None
}

/// Traces the branch through `start` until h reaches `h_target`, the step
/// underflows, or the iterate diverges. Euler prediction along the tangent,
/// pseudo-arclength Newton correction, adaptive step, eigenvalues monitored
/// at every accepted point with events localized by bisection.
pub fn continue_branch(
    cfg: &Configuration,
    start: &CriticalPoint,
    h_target: f64,
    opts: &ContinuationOptions,
) -> Result<Branch, ContinuationError> {
    let tol = opts.tolerance(cfg);
    if start.residual > 100.0 * tol {
        return Err(ContinuationError::StartResidualTooLarge {
            residual: start.residual,
            tol: 100.0 * tol,
        });
    }
    if h_target == start.state.h {
        return Err(ContinuationError::TargetEqualsStart);
    }
    if h_target <= 0.0 {
        return Err(ContinuationError::Solve(SolveError::Diverged {
            x: start.state.x,
            y: start.state.y,
        }));
    }
    let escape = {
        let r = bounding_rectangle(cfg);
        r.padded(10.0 * r.diameter() + 1.0)
    };
    let dir = (h_target - start.state.h).signum();
    let mut t = tangent(cfg, &start.state, None)?;
    if t[2] * dir < 0.0 {
        for c in &mut t {
            *c = -*c;
        }
    }

    let mut points = vec![BranchPoint {
        s: 0.0,
        state: start.state,
        f: start.f,
        eig: start.eig,
        kind: start.kind,
    }];
    let mut events: Vec<BifurcationEvent> = Vec::new();
    let mut ds = opts.ds0;
    let mut first_step = true;
    let termination = loop {
        if points.len() > opts.max_steps {
            break Termination::MaxSteps;
        }
        let prev = *points.last().unwrap();
        let u = [prev.state.x, prev.state.y, prev.state.h];

        // land exactly on the target once the remaining gap is within reach
        let remaining = (h_target - prev.state.h) * dir;
        if remaining <= 0.0 || (t[2].abs() > 1e-10 && remaining <= ds * t[2].abs()) {
            match newton_solve(cfg, h_target, [prev.state.x, prev.state.y], &newton_opts(tol)) {
                Ok(cp) => {
                    accept_point(cfg, &mut points, &mut events, cp, &prev, &mut t, opts, tol)?;
                    break Termination::ReachedTarget;
                }
                Err(_) if ds > opts.ds_min => {
                    ds = (0.5 * ds).max(opts.ds_min * 0.5);
                    if ds < opts.ds_min {
                        break Termination::StepUnderflow;
                    }
                    // fall through to an ordinary reduced step
                }
                Err(_) => break Termination::StepUnderflow,
            }
            if remaining <= 0.0 {
                break Termination::ReachedTarget;
            }
        }

        let u_pred = [u[0] + ds * t[0], u[1] + ds * t[1], u[2] + ds * t[2]];
        match correct(cfg, u_pred, t, tol, opts.corrector_max_iter) {
            Some((s_new, iters)) => {
                if !escape.contains(s_new.x, s_new.y) {
                    break Termination::Diverged;
                }
                let cp = evaluate_critical(cfg, &s_new);
                accept_point(cfg, &mut points, &mut events, cp, &prev, &mut t, opts, tol)?;
                if iters <= opts.grow_iters {
                    ds = (ds * opts.grow).min(opts.ds_max);
                }
                first_step = false;
            }
            None => {
                ds *= 0.5;
                if ds < opts.ds_min {
                    if first_step {
                        return Err(ContinuationError::ImmediateCorrectorFailure(format!(
                            "no corrector convergence from ds0 = {} at h = {}",
                            opts.ds0, start.state.h
                        )));
                    }
                    break Termination::StepUnderflow;
                }
            }
        }
    };
    Ok(Branch {
        points,
        events,
        termination,
    })
}

fn newton_opts(tol: f64) -> NewtonOptions {
    NewtonOptions {
        tol: Some(tol),
        ..NewtonOptions::default()
    }
}

/// Pushes an accepted point, updates the tangent, and records any
/// eigenvalue sign change or fold between the previous and new points.
#[allow(clippy::too_many_arguments)]
fn accept_point(
    cfg: &Configuration,
    points: &mut Vec<BranchPoint>,
    events: &mut Vec<BifurcationEvent>,
    cp: CriticalPoint,
    prev: &BranchPoint,
    t: &mut [f64; 3],
    opts: &ContinuationOptions,
    tol: f64,
) -> Result<(), ContinuationError> {
    let ds_actual = dist3(
        [prev.state.x, prev.state.y, prev.state.h],
        [cp.state.x, cp.state.y, cp.state.h],
    );
    let new_point = BranchPoint {
        s: prev.s + ds_actual,
        state: cp.state,
        f: cp.f,
        eig: cp.eig,
        kind: cp.kind,
    };
    let t_prev = *t;
    match tangent(cfg, &cp.state, Some(t_prev)) {
        Ok(t_new) => *t = t_new,
        // rank-deficient exactly at a bifurcation point: keep the prior
        // tangent so the trace can pass through
        Err(ContinuationError::RankDeficientTangent) => {}
        Err(e) => return Err(e),
    }
    if opts.detect_events {
        let crossed = (prev.eig[0].signum() != new_point.eig[0].signum())
            || (prev.eig[1].signum() != new_point.eig[1].signum());
        let folded = t_prev[2].signum() != t[2].signum() && t_prev[2] != 0.0;
        if crossed || folded {
            if let Ok(ev) = locate_bifurcation(cfg, prev, &new_point, tol) {
                let duplicate = events.iter().any(|e| {
                    (e.state.h - ev.state.h).abs() <= 1e-7 * ev.state.h.max(1.0)
                });
                if !duplicate {
                    events.push(ev);
                }
            }
        }
    }
    points.push(new_point);
    Ok(())
}

fn dist3(a: [f64; 3], b: [f64; 3]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

/// Localizes an eigenvalue crossing inside a bracket of accepted branch
/// points by bisection on h, re-solving the critical point at each probe
/// height. Classifies the event as `DoubleDegenerate` when both eigenvalues
/// vanish within tolerance, `Fold` when the tangent's h-component reverses,
/// and `SimpleCrossing` otherwise.
pub fn locate_bifurcation(
    cfg: &Configuration,
    a: &BranchPoint,
    b: &BranchPoint,
    tol: f64,
) -> Result<BifurcationEvent, ContinuationError> {
    let cross_idx = if a.eig[0].signum() != b.eig[0].signum() {
        Some(0)
    } else if a.eig[1].signum() != b.eig[1].signum() {
        Some(1)
    } else {
        None
    };

    // fold bracket: h interval too thin to bisect, or no sign change at all
    let h_gap = (a.h() - b.h()).abs();
    if cross_idx.is_none() || h_gap <= 1e-12 * a.h().max(b.h()) {
        return locate_fold_like(cfg, a, b, cross_idx, tol);
    }
    let idx = cross_idx.unwrap();

    let mut lo = *a;
    let mut hi = *b;
    let nopts = newton_opts(tol);
    let mut width = h_gap;
    let mut probe = None;
    while width > 1e-9 {
        let h_mid = 0.5 * (lo.h() + hi.h());
        let frac = (h_mid - lo.h()) / (hi.h() - lo.h());
        let seed = [
            lo.state.x + frac * (hi.state.x - lo.state.x),
            lo.state.y + frac * (hi.state.y - lo.state.y),
        ];
        let cp = newton_solve(cfg, h_mid, seed, &nopts)?;
        let mid_point = BranchPoint {
            s: 0.5 * (lo.s + hi.s),
            state: cp.state,
            f: cp.f,
            eig: cp.eig,
            kind: cp.kind,
        };
        if lo.eig[idx].signum() != mid_point.eig[idx].signum() {
            hi = mid_point;
        } else {
            lo = mid_point;
        }
        probe = Some(cp);
        width = (hi.h() - lo.h()).abs();
    }
    let best = match probe {
        Some(cp) => cp,
        None => newton_solve(cfg, 0.5 * (lo.h() + hi.h()), [lo.state.x, lo.state.y], &nopts)?,
    };
    let hess = cfg.hessian(&best.state);
    let (eig, vecs) = hess.eigen();
    let eps = 1e-9 * hess.scale().max(f64::MIN_POSITIVE);
    let mut null_dirs = Vec::new();
    // crossing eigenvalue direction first
    let (crossing_vec, other_vec, other_eig) = if eig[0].abs() <= eig[1].abs() {
        (vecs[0], vecs[1], eig[1])
    } else {
        (vecs[1], vecs[0], eig[0])
    };
    null_dirs.push(crossing_vec);
    let kind = if other_eig.abs() <= eps {
        null_dirs.push(other_vec);
        EventKind::DoubleDegenerate
    } else if tangent_h_flips(cfg, a, b) {
        EventKind::Fold
    } else {
        EventKind::SimpleCrossing
    };
    Ok(BifurcationEvent {
        state: best.state,
        kind,
        null_dirs,
        h_accuracy: width,
    })
}

fn locate_fold_like(
    cfg: &Configuration,
    a: &BranchPoint,
    b: &BranchPoint,
    cross_idx: Option<usize>,
    _tol: f64,
) -> Result<BifurcationEvent, ContinuationError> {
    if cross_idx.is_none() && !tangent_h_flips(cfg, a, b) {
        return Err(ContinuationError::NoCrossingInBracket {
            h_lo: a.h().min(b.h()),
            h_hi: a.h().max(b.h()),
        });
    }
    let side = if a.eig[0].abs().min(a.eig[1].abs()) <= b.eig[0].abs().min(b.eig[1].abs()) {
        a
    } else {
        b
    };
    let hess = cfg.hessian(&side.state);
    let (eig, vecs) = hess.eigen();
    let null = if eig[0].abs() <= eig[1].abs() {
        vecs[0]
    } else {
        vecs[1]
    };
    Ok(BifurcationEvent {
        state: side.state,
        kind: EventKind::Fold,
        null_dirs: vec![null],
        h_accuracy: (a.h() - b.h()).abs(),
    })
}

fn tangent_h_flips(cfg: &Configuration, a: &BranchPoint, b: &BranchPoint) -> bool {
    let ta = tangent(cfg, &a.state, None);
    let tb = ta
        .as_ref()
        .ok()
        .and_then(|t| tangent(cfg, &b.state, Some(*t)).ok());
    match (ta, tb) {
        (Ok(ta), Some(tb)) => ta[2].signum() != tb[2].signum() && ta[2] != 0.0,
        _ => false,
    }
}

impl BranchPoint {
    fn h(&self) -> f64 {
        self.state.h
    }
}

/// Finds the post-bifurcation branches at h just below the event.
///
/// For a `DoubleDegenerate` event with a known dihedral order, seeds run
/// outward along both rays of every fixed line; otherwise along both signs
/// of each null direction. Each ray is scanned outward from eps for a sign
/// change of the directional gradient component, the bracket is bisected,
/// and the bracketed root is corrected by the full planar Newton solver.
/// A plain eps-offset seed collapses back onto the trivial branch here
/// (the corrector's linearization at the seed still points at it), so the
/// scan is what makes switching reliable near pitchforks.
pub fn switch_branches(
    cfg: &Configuration,
    event: &BifurcationEvent,
    dihedral_order: Option<usize>,
    opts: &ContinuationOptions,
) -> Result<Vec<CriticalPoint>, ContinuationError> {
    let tol = opts.tolerance(cfg);
    let h_star = event.state.h;
    let h_below = h_star * (1.0 - 1e-3);
    let rect = bounding_rectangle(cfg);
    let scale = rect.diameter().max(h_star);
    let eps = opts.switch_eps * scale;
    let anchor = [event.state.x, event.state.y];

    let mut rays: Vec<[f64; 2]> = Vec::new();
    if event.kind == EventKind::DoubleDegenerate {
        if let Some(n) = dihedral_order {
            for line in fixed_lines(n) {
                rays.push(line.direction);
                rays.push([-line.direction[0], -line.direction[1]]);
            }
        }
    }
    if rays.is_empty() {
        for d in &event.null_dirs {
            rays.push(*d);
            rays.push([-d[0], -d[1]]);
        }
    }

    let nopts = newton_opts(tol);
    let mut out: Vec<CriticalPoint> = Vec::new();
    for ray in rays {
        let phi = |s: f64| {
            let st = State {
                x: anchor[0] + s * ray[0],
                y: anchor[1] + s * ray[1],
                h: h_below,
            };
            let g = cfg.gradient(&st);
            ray[0] * g[0] + ray[1] * g[1]
        };
        let s_max = 2.0 * scale + 1.0;
        let mut s_prev = eps;
        let mut v_prev = phi(s_prev);
        let mut bracket = None;
        let mut s = eps;
        while s < s_max {
            s *= 1.2;
            let v = phi(s);
            if v_prev.signum() != v.signum() {
                bracket = Some((s_prev, s));
                break;
            }
            s_prev = s;
            v_prev = v;
        }
        let Some((mut lo, mut hi)) = bracket else {
            continue;
        };
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if phi(lo).signum() != phi(mid).signum() {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let s_root = 0.5 * (lo + hi);
        let seed = [anchor[0] + s_root * ray[0], anchor[1] + s_root * ray[1]];
        if let Ok(cp) = newton_solve(cfg, h_below, seed, &nopts) {
            let off = f64::hypot(cp.state.x - anchor[0], cp.state.y - anchor[1]);
            if off > 0.5 * eps {
                let duplicate = out.iter().any(|q| {
                    f64::hypot(q.state.x - cp.state.x, q.state.y - cp.state.y) <= 1e-8 * scale
                });
                if !duplicate {
                    out.push(cp);
                }
            }
        }
    }
    if out.is_empty() {
        return Err(ContinuationError::AllSeedsTrivial);
    }
    out.sort_by(|p, q| {
        q.f.total_cmp(&p.f)
            .then(p.state.x.total_cmp(&q.state.x))
            .then(p.state.y.total_cmp(&q.state.y))
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::lambertian_exponent;
    use crate::symmetry::circle_critical_height;

    fn circle(n: usize, r: f64) -> Configuration {
        let m = lambertian_exponent(70.0).unwrap();
        let pts = (0..n)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                [r * a.cos(), r * a.sin()]
            })
            .collect();
        Configuration::new(pts, m).unwrap()
    }

    fn solve(cfg: &Configuration, h: f64, seed: [f64; 2]) -> CriticalPoint {
        newton_solve(cfg, h, seed, &NewtonOptions::default()).unwrap()
    }

    #[test]
    fn tangent_is_vertical_on_single_point_branch() {
        let cfg = Configuration::new(vec![[0.3, -0.2]], 3.5).unwrap();
        let s = State::new(0.3, -0.2, 1.7).unwrap();
        let t = tangent(&cfg, &s, None).unwrap();
        assert!(t[0].abs() < 1e-12);
        assert!(t[1].abs() < 1e-12);
        assert!((t[2].abs() - 1.0).abs() < 1e-12);
        assert!(t[2] < 0.0, "default orientation is decreasing h");
    }

    #[test]
    fn tangent_rank_deficient_at_degeneracy() {
        let cfg = circle(20, 1.2);
        let h0 = circle_critical_height(1.2, cfg.m());
        let s = State::new(0.0, 0.0, h0).unwrap();
        assert!(matches!(
            tangent(&cfg, &s, None),
            Err(ContinuationError::RankDeficientTangent)
        ));
    }

    #[test]
    fn straight_branch_single_point() {
        let cfg = Configuration::new(vec![[0.3, -0.2]], 3.5).unwrap();
        let start = solve(&cfg, 3.0, [0.3, -0.2]);
        let branch = continue_branch(&cfg, &start, 0.01, &ContinuationOptions::default()).unwrap();
        assert_eq!(branch.termination, Termination::ReachedTarget);
        assert!(branch.events.is_empty());
        for p in &branch.points {
            assert!((p.state.x - 0.3).abs() < 1e-9);
            assert!((p.state.y + 0.2).abs() < 1e-9);
            assert_eq!(p.kind, CriticalKind::Maximum);
        }
        let last = branch.points.last().unwrap();
        assert!((last.state.h - 0.01).abs() < 1e-12);
    }

    #[test]
    fn circle_central_branch_has_double_degenerate_event() {
        let cfg = circle(20, 1.2);
        let h0 = circle_critical_height(1.2, cfg.m());
        let start = solve(&cfg, 3.0, [0.0, 0.0]);
        let branch = continue_branch(&cfg, &start, 0.5, &ContinuationOptions::default()).unwrap();
        assert_eq!(branch.termination, Termination::ReachedTarget);
        assert_eq!(branch.events.len(), 1);
        let ev = &branch.events[0];
        assert_eq!(ev.kind, EventKind::DoubleDegenerate);
        assert_eq!(ev.null_dirs.len(), 2);
        assert!(
            (ev.state.h - h0).abs() / h0 < 1e-6,
            "h* = {} vs analytic {}",
            ev.state.h,
            h0
        );
        let (lo, hi) = branch.h_span();
        assert!(ev.state.h >= lo && ev.state.h <= hi);
    }

    #[test]
    fn event_height_insensitive_to_initial_step() {
        let cfg = circle(8, 1.0);
        let start = solve(&cfg, 2.5, [0.0, 0.0]);
        let mut located = Vec::new();
        for ds0 in [1e-3, 1e-2, 1e-1] {
            let opts = ContinuationOptions {
                ds0,
                ..ContinuationOptions::default()
            };
            let branch = continue_branch(&cfg, &start, 0.6, &opts).unwrap();
            assert_eq!(branch.events.len(), 1);
            located.push(branch.events[0].state.h);
        }
        for w in located.windows(2) {
            assert!((w[0] - w[1]).abs() < 1e-8, "{:?}", located);
        }
    }

    #[test]
    fn branch_reversal_returns_to_start() {
        let cfg = circle(20, 1.2);
        let start = solve(&cfg, 2.8, [0.0, 0.0]);
        let fwd = continue_branch(&cfg, &start, 1.9, &ContinuationOptions::default()).unwrap();
        let end = fwd.points.last().unwrap();
        let end_cp = evaluate_critical(&cfg, &end.state);
        let back = continue_branch(&cfg, &end_cp, 2.8, &ContinuationOptions::default()).unwrap();
        let home = back.points.last().unwrap();
        assert!((home.state.x - start.state.x).abs() < 1e-6);
        assert!((home.state.y - start.state.y).abs() < 1e-6);
        assert!((home.state.h - 2.8).abs() < 1e-10);
    }

    #[test]
    fn branch_points_resolve_under_plain_newton() {
        let cfg = circle(20, 1.2);
        let start = solve(&cfg, 2.2, [0.0, 0.0]);
        let branch = continue_branch(&cfg, &start, 1.8, &ContinuationOptions::default()).unwrap();
        for p in branch.points.iter().step_by(5) {
            let again = newton_solve(
                &cfg,
                p.state.h,
                [p.state.x, p.state.y],
                &NewtonOptions::default(),
            )
            .unwrap();
            assert!((again.state.x - p.state.x).abs() < 1e-9);
            assert!((again.state.y - p.state.y).abs() < 1e-9);
        }
    }

    #[test]
    fn locate_requires_a_crossing() {
        let cfg = circle(20, 1.2);
        let a = evaluate_critical(&cfg, &State::new(0.0, 0.0, 2.9).unwrap());
        let b = evaluate_critical(&cfg, &State::new(0.0, 0.0, 2.7).unwrap());
        let pa = BranchPoint {
            s: 0.0,
            state: a.state,
            f: a.f,
            eig: a.eig,
            kind: a.kind,
        };
        let pb = BranchPoint {
            s: 0.2,
            state: b.state,
            f: b.f,
            eig: b.eig,
            kind: b.kind,
        };
        assert!(matches!(
            locate_bifurcation(&cfg, &pa, &pb, 1e-11),
            Err(ContinuationError::NoCrossingInBracket { .. })
        ));
    }

    #[test]
    fn switch_finds_all_forty_descendants() {
        let cfg = circle(20, 1.2);
        let start = solve(&cfg, 3.0, [0.0, 0.0]);
        let branch = continue_branch(&cfg, &start, 0.9, &ContinuationOptions::default()).unwrap();
        let ev = &branch.events[0];
        let kids = switch_branches(&cfg, ev, Some(20), &ContinuationOptions::default()).unwrap();
        assert_eq!(kids.len(), 40);
        let maxima: Vec<_> = kids
            .iter()
            .filter(|c| c.kind == CriticalKind::Maximum)
            .collect();
        let saddles: Vec<_> = kids
            .iter()
            .filter(|c| c.kind == CriticalKind::Saddle)
            .collect();
        assert_eq!(maxima.len(), 20);
        assert_eq!(saddles.len(), 20);
        for c in &kids {
            assert!(f64::hypot(c.state.x, c.state.y) > 1e-3);
        }
    }

    #[test]
    fn switch_seeds_along_null_direction_differ_in_that_direction() {
        // a simple-crossing event fabricated on the x axis: seeds must
        // differ only along (1, 0)
        let cfg = circle(20, 1.2);
        let h0 = circle_critical_height(1.2, cfg.m());
        let ev = BifurcationEvent {
            state: State::new(0.0, 0.0, h0).unwrap(),
            kind: EventKind::SimpleCrossing,
            null_dirs: vec![[1.0, 0.0]],
            h_accuracy: 1e-10,
        };
        let kids = switch_branches(&cfg, &ev, None, &ContinuationOptions::default()).unwrap();
        assert!(!kids.is_empty());
        for c in &kids {
            assert!(c.state.y.abs() < 1e-8);
            assert!(c.state.x.abs() > 1e-3);
        }
    }
}
