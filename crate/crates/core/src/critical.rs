//! Critical-point location and classification at fixed plane separation,
//! plus the confinement and uniqueness machinery: every maximizer lives in
//! the bounding rectangle of the emitters, and above a computable height
//! the Hessian is negative definite on that whole rectangle, so the global
//! maximizer is unique.

use crate::error::SolveError;
use crate::functional::{Configuration, State};

/// Relative threshold separating genuinely degenerate Hessians from roundoff.
pub const DEGENERACY_EPS: f64 = 1e-9;

/// Axis-aligned bounding rectangle of the emitter positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rectangle {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rectangle {
    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    /// Diagonal length; zero for a single point.
    pub fn diameter(&self) -> f64 {
        f64::hypot(self.width(), self.height())
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x_min && x <= self.x_max && y >= self.y_min && y <= self.y_max
    }

    pub fn corners(&self) -> [[f64; 2]; 4] {
        [
            [self.x_min, self.y_min],
            [self.x_min, self.y_max],
            [self.x_max, self.y_min],
            [self.x_max, self.y_max],
        ]
    }

    /// Grows each side by `frac` of its extent (degenerate sides stay put).
    pub fn inflated(&self, frac: f64) -> Rectangle {
        let dx = 0.5 * frac * self.width();
        let dy = 0.5 * frac * self.height();
        Rectangle {
            x_min: self.x_min - dx,
            x_max: self.x_max + dx,
            y_min: self.y_min - dy,
            y_max: self.y_max + dy,
        }
    }

    /// Grows each side by the absolute margin `pad` on every edge.
    pub fn padded(&self, pad: f64) -> Rectangle {
        Rectangle {
            x_min: self.x_min - pad,
            x_max: self.x_max + pad,
            y_min: self.y_min - pad,
            y_max: self.y_max + pad,
        }
    }
}

/// [min x_i, max x_i] x [min y_i, max y_i]; all maximizers and minimizers
/// of f lie inside it.
pub fn bounding_rectangle(cfg: &Configuration) -> Rectangle {
    let mut r = Rectangle {
        x_min: f64::INFINITY,
        x_max: f64::NEG_INFINITY,
        y_min: f64::INFINITY,
        y_max: f64::NEG_INFINITY,
    };
    for p in cfg.points() {
        r.x_min = r.x_min.min(p[0]);
        r.x_max = r.x_max.max(p[0]);
        r.y_min = r.y_min.min(p[1]);
        r.y_max = r.y_max.max(p[1]);
    }
    r
}

/// Exterior cases for a state outside the bounding rectangle, each with the
/// strict gradient sign it forces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExteriorCase {
    /// x below every x_i, hence dF/dx > 0.
    LeftOfAll,
    /// x above every x_i, hence dF/dx < 0.
    RightOfAll,
    /// y below every y_i, hence dF/dy > 0.
    BelowAll,
    /// y above every y_i, hence dF/dy < 0.
    AboveAll,
}

/// Which exterior cases hold at a state and whether the implied gradient
/// signs were confirmed against the analytic gradient.
#[derive(Debug, Clone)]
pub struct ExteriorSignReport {
    pub cases: Vec<(ExteriorCase, bool)>,
    pub gradient: [f64; 2],
}

impl ExteriorSignReport {
    pub fn all_hold(&self) -> bool {
        !self.cases.is_empty() && self.cases.iter().all(|(_, ok)| *ok)
    }
}

/// Evaluates the exterior sign assertions at a state strictly outside the
/// bounding rectangle in at least one coordinate.
pub fn exterior_sign(cfg: &Configuration, s: &State) -> Result<ExteriorSignReport, SolveError> {
    let r = bounding_rectangle(cfg);
    let g = cfg.gradient(s);
    let mut cases = Vec::new();
    if s.x < r.x_min {
        cases.push((ExteriorCase::LeftOfAll, g[0] > 0.0));
    }
    if s.x > r.x_max {
        cases.push((ExteriorCase::RightOfAll, g[0] < 0.0));
    }
    if s.y < r.y_min {
        cases.push((ExteriorCase::BelowAll, g[1] > 0.0));
    }
    if s.y > r.y_max {
        cases.push((ExteriorCase::AboveAll, g[1] < 0.0));
    }
    if cases.is_empty() {
        return Err(SolveError::StateInsideRectangle { x: s.x, y: s.y });
    }
    Ok(ExteriorSignReport { cases, gradient: g })
}

/// Sufficient height for a unique global maximizer: sqrt(m+1) * rho_max,
/// where rho_max is the largest distance from a rectangle corner to an
/// emitter. The distance-to-a-point map is convex, so the maximum over the
/// rectangle is attained at a corner; above the returned height the Hessian
/// is negative definite on the whole rectangle.
pub fn uniqueness_bound(cfg: &Configuration) -> f64 {
    let r = bounding_rectangle(cfg);
    let mut rho_max: f64 = 0.0;
    for c in r.corners() {
        for p in cfg.points() {
            rho_max = rho_max.max(f64::hypot(c[0] - p[0], c[1] - p[1]));
        }
    }
    (cfg.m() + 1.0).sqrt() * rho_max
}

/// Classification of a critical point by Hessian eigenvalue signs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalKind {
    Maximum,
    Minimum,
    Saddle,
    Degenerate,
}

impl CriticalKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CriticalKind::Maximum => "Maximum",
            CriticalKind::Minimum => "Minimum",
            CriticalKind::Saddle => "Saddle",
            CriticalKind::Degenerate => "Degenerate",
        }
    }

    pub fn positive_eigenvalues(eig: [f64; 2], scale: f64) -> usize {
        let eps = DEGENERACY_EPS * scale.max(f64::MIN_POSITIVE);
        eig.iter().filter(|&&l| l > eps).count()
    }
}

/// Assigns a kind from sorted eigenvalues and the Hessian entry scale.
pub fn classify(eig: [f64; 2], scale: f64) -> CriticalKind {
    let eps = DEGENERACY_EPS * scale.max(f64::MIN_POSITIVE);
    if eig[0].abs() <= eps || eig[1].abs() <= eps {
        CriticalKind::Degenerate
    } else if eig[1] < 0.0 {
        CriticalKind::Maximum
    } else if eig[0] > 0.0 {
        CriticalKind::Minimum
    } else {
        CriticalKind::Saddle
    }
}

/// A converged zero of the gradient with its local classification.
#[derive(Debug, Clone, Copy)]
pub struct CriticalPoint {
    pub state: State,
    pub f: f64,
    /// Hessian eigenvalues, ascending.
    pub eig: [f64; 2],
    pub kind: CriticalKind,
    /// Max-norm of the gradient at convergence.
    pub residual: f64,
}

/// Newton iteration controls.
#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    /// Convergence tolerance on the gradient max-norm; `None` selects
    /// 1e-12 * max(1, n * m).
    pub tol: Option<f64>,
    pub max_iter: usize,
    /// Step halvings allowed when the residual increases.
    pub max_halvings: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: None,
            max_iter: 50,
            max_halvings: 8,
        }
    }
}

impl NewtonOptions {
    pub fn tolerance(&self, cfg: &Configuration) -> f64 {
        self.tol
            .unwrap_or_else(|| 1e-12 * (cfg.len() as f64 * cfg.m()).max(1.0))
    }
}

/// Plain damped Newton on F(x, y) = 0 at fixed h.
///
/// Fails with `SingularHessian` when |det DF| drops below 1e-14 of the
/// squared entry scale, `Diverged` when the iterate leaves the bounding
/// rectangle inflated by ten diameters plus one meter, `MaxIterations`
/// or `DampingExhausted` otherwise.
pub fn newton_solve(
    cfg: &Configuration,
    h: f64,
    x0: [f64; 2],
    opts: &NewtonOptions,
) -> Result<CriticalPoint, SolveError> {
    let tol = opts.tolerance(cfg);
    let escape = bounding_rectangle(cfg).padded(10.0 * bounding_rectangle(cfg).diameter() + 1.0);
    let mut x = x0[0];
    let mut y = x0[1];
    for _ in 0..opts.max_iter {
        let s = State { x, y, h };
        let g = cfg.gradient(&s);
        let res = g[0].abs().max(g[1].abs());
        if res <= tol {
            return Ok(finish(cfg, s, res));
        }
        if !escape.contains(x, y) {
            return Err(SolveError::Diverged { x, y });
        }
        let hess = cfg.hessian(&s);
        let det = hess.det();
        let scale2 = hess.scale() * hess.scale();
        if det.abs() <= 1e-14 * scale2.max(f64::MIN_POSITIVE) {
            return Err(SolveError::SingularHessian { x, y, det });
        }
        // full Newton step from the symmetric 2x2 inverse
        let dx = (hess.yy * g[0] - hess.xy * g[1]) / det;
        let dy = (-hess.xy * g[0] + hess.xx * g[1]) / det;
        let mut lambda = 1.0;
        let mut halvings = 0;
        loop {
            let xn = x - lambda * dx;
            let yn = y - lambda * dy;
            let gn = cfg.gradient(&State { x: xn, y: yn, h });
            let rn = gn[0].abs().max(gn[1].abs());
            if rn < res || rn <= tol {
                x = xn;
                y = yn;
                break;
            }
            halvings += 1;
            if halvings > opts.max_halvings {
                return Err(SolveError::DampingExhausted { halvings });
            }
            lambda *= 0.5;
        }
    }
    let g = cfg.gradient(&State { x, y, h });
    Err(SolveError::MaxIterations {
        max_iter: opts.max_iter,
        residual: g[0].abs().max(g[1].abs()),
    })
}

fn finish(cfg: &Configuration, s: State, residual: f64) -> CriticalPoint {
    let hess = cfg.hessian(&s);
    let eig = hess.eigenvalues();
    CriticalPoint {
        state: s,
        f: cfg.value(&s),
        eig,
        kind: classify(eig, hess.scale()),
        residual,
    }
}

/// Re-evaluates a state as a critical point without iterating.
pub fn evaluate_critical(cfg: &Configuration, s: &State) -> CriticalPoint {
    let g = cfg.gradient(s);
    finish(cfg, *s, g[0].abs().max(g[1].abs()))
}

/// Seed layout for the multistart census.
#[derive(Debug, Clone, Copy)]
pub struct SeedGrid {
    pub nx: usize,
    pub ny: usize,
    /// Fractional inflation of the bounding rectangle the grid spans.
    pub inflate: f64,
}

impl Default for SeedGrid {
    fn default() -> Self {
        Self {
            nx: 32,
            ny: 32,
            inflate: 0.1,
        }
    }
}

impl SeedGrid {
    pub fn seeds(&self, cfg: &Configuration) -> Vec<[f64; 2]> {
        let r = bounding_rectangle(cfg).inflated(self.inflate);
        let mut out = Vec::with_capacity(self.nx * self.ny);
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                let fx = if self.nx > 1 {
                    ix as f64 / (self.nx - 1) as f64
                } else {
                    0.5
                };
                let fy = if self.ny > 1 {
                    iy as f64 / (self.ny - 1) as f64
                } else {
                    0.5
                };
                out.push([
                    r.x_min + fx * r.width(),
                    r.y_min + fy * r.height(),
                ]);
            }
        }
        out
    }
}

/// Newton from every seed; failures are discarded, results deduplicated at
/// 1e-6 of the problem scale and sorted by descending f, then x, then y.
pub fn find_critical_points(cfg: &Configuration, h: f64, grid: &SeedGrid) -> Vec<CriticalPoint> {
    let opts = NewtonOptions::default();
    let rect = bounding_rectangle(cfg);
    // diameter degenerates to zero for a single emitter; fall back to h
    let dedup = 1e-6 * rect.diameter().max(h);
    let mut found: Vec<CriticalPoint> = Vec::new();
    for seed in grid.seeds(cfg) {
        if let Ok(cp) = newton_solve(cfg, h, seed, &opts) {
            let duplicate = found.iter().any(|q| {
                f64::hypot(q.state.x - cp.state.x, q.state.y - cp.state.y) <= dedup
            });
            if !duplicate {
                found.push(cp);
            }
        }
    }
    found.sort_by(|a, b| {
        b.f.total_cmp(&a.f)
            .then(a.state.x.total_cmp(&b.state.x))
            .then(a.state.y.total_cmp(&b.state.y))
    });
    found
}
