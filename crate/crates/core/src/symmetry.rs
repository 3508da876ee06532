//! Dihedral and two-reflection group actions on the plane, numerical
//! equivariance certification, fixed-line enumeration, the analytic
//! degeneracy height for circular configurations, and continuation
//! restricted to a fixed line.
//!
//! Group membership of a configuration is certified numerically rather
//! than declared: generated layouts carry exact symmetry only up to
//! floating-point placement.

use crate::error::{SolveError, SymmetryError};
use crate::functional::{Configuration, State};

/// Relative tolerance certifying equivariance on a sample.
pub const EQUIVARIANCE_TOL: f64 = 1e-10;

/// One orthogonal plane map from a dihedral group: reflect^a compose
/// rotation^k, stored with its 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    /// Group order parameter (rotations by 2*pi/n).
    pub n: usize,
    /// Rotation power, 0..n-1.
    pub k: usize,
    /// Whether the axis reflection is composed in.
    pub reflect: bool,
    pub matrix: [[f64; 2]; 2],
}

impl GroupElement {
    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.matrix[0][0] * v[0] + self.matrix[0][1] * v[1],
            self.matrix[1][0] * v[0] + self.matrix[1][1] * v[1],
        ]
    }

    pub fn det(&self) -> f64 {
        self.matrix[0][0] * self.matrix[1][1] - self.matrix[0][1] * self.matrix[1][0]
    }

    /// Max-norm departure of matrix^T matrix from the identity.
    pub fn orthogonality_defect(&self) -> f64 {
        let m = &self.matrix;
        let g00 = m[0][0] * m[0][0] + m[1][0] * m[1][0] - 1.0;
        let g11 = m[0][1] * m[0][1] + m[1][1] * m[1][1] - 1.0;
        let g01 = m[0][0] * m[0][1] + m[1][0] * m[1][1];
        g00.abs().max(g11.abs()).max(g01.abs())
    }
}

/// All 2n elements of the dihedral group of order n: rotations by
/// 2*pi*k/n and their compositions with the reflection (x, y) -> (x, -y).
pub fn dn_elements(n: usize) -> Vec<GroupElement> {
    assert!(n >= 1, "group order parameter must be at least 1");
    let mut out = Vec::with_capacity(2 * n);
    for reflect in [false, true] {
        for k in 0..n {
            let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            let (s, c) = a.sin_cos();
            // rotation, optionally followed by the x-axis reflection
            let matrix = if reflect {
                [[c, -s], [-s, -c]]
            } else {
                [[c, -s], [s, c]]
            };
            out.push(GroupElement {
                n,
                k,
                reflect,
                matrix,
            });
        }
    }
    out
}

/// The four elements {1, kx, ky, kx*ky} of the two-axis reflection group,
/// with kx: (x, y) -> (-x, y) and ky: (x, y) -> (x, -y).
pub fn z2z2_elements() -> Vec<GroupElement> {
    let mats = [
        [[1.0, 0.0], [0.0, 1.0]],
        [[-1.0, 0.0], [0.0, 1.0]],
        [[1.0, 0.0], [0.0, -1.0]],
        [[-1.0, 0.0], [0.0, -1.0]],
    ];
    mats.iter()
        .enumerate()
        .map(|(i, &matrix)| GroupElement {
            n: 2,
            k: i / 2,
            reflect: i % 2 == 1,
            matrix,
        })
        .collect()
}

/// Residual report of the equivariance check F(g x) = g F(x).
#[derive(Debug, Clone, Copy)]
pub struct EquivarianceReport {
    /// Max over samples and elements of |F(g x) - g F(x)|.
    pub residual: f64,
    /// Max gradient norm over the samples; the certification scale.
    pub gradient_scale: f64,
}

impl EquivarianceReport {
    pub fn certified(&self) -> bool {
        self.residual <= EQUIVARIANCE_TOL * self.gradient_scale.max(1.0)
    }
}

/// Evaluates the equivariance residual of the gradient field over the
/// given group elements and sample states.
pub fn equivariance_residual(
    cfg: &Configuration,
    elements: &[GroupElement],
    h: f64,
    samples: &[[f64; 2]],
) -> EquivarianceReport {
    let mut residual: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for &xy in samples {
        let fx = cfg.gradient(&State { x: xy[0], y: xy[1], h });
        scale = scale.max(f64::hypot(fx[0], fx[1]));
        for g in elements {
            let gx = g.apply(xy);
            let fgx = cfg.gradient(&State { x: gx[0], y: gx[1], h });
            let gfx = g.apply(fx);
            residual = residual.max(f64::hypot(fgx[0] - gfx[0], fgx[1] - gfx[1]));
        }
    }
    EquivarianceReport {
        residual,
        gradient_scale: scale,
    }
}

/// Deterministic sample states on two rings, used when the caller has no
/// preferred sample set.
pub fn default_samples(scale: f64, count: usize) -> Vec<[f64; 2]> {
    let r1 = 0.41 * scale;
    let r2 = 0.97 * scale;
    (0..count)
        .map(|i| {
            let a = 2.399963229728653 * i as f64 + 0.7; // golden-angle spacing
            let r = if i % 2 == 0 { r1 } else { r2 };
            [r * a.cos(), r * a.sin()]
        })
        .collect()
}

/// A one-dimensional fixed-point subspace of a reflection in the dihedral
/// group: the line through the origin at angle -k*pi/n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedLine {
    /// Unit direction (cos(k*pi/n), -sin(k*pi/n)).
    pub direction: [f64; 2],
    pub k: usize,
}

impl FixedLine {
    /// The reflection fixing this line: 2 d d^T - I.
    pub fn reflection(&self) -> GroupElement {
        let [dx, dy] = self.direction;
        GroupElement {
            n: 2,
            k: 0,
            reflect: true,
            matrix: [
                [2.0 * dx * dx - 1.0, 2.0 * dx * dy],
                [2.0 * dx * dy, 2.0 * dy * dy - 1.0],
            ],
        }
    }

    pub fn point_at(&self, s: f64) -> [f64; 2] {
        [s * self.direction[0], s * self.direction[1]]
    }
}

/// The n fixed lines of the dihedral group's reflections, k = 0..n-1.
pub fn fixed_lines(n: usize) -> Vec<FixedLine> {
    assert!(n >= 1);
    (0..n)
        .map(|k| {
            let a = std::f64::consts::PI * k as f64 / n as f64;
            FixedLine {
                direction: [a.cos(), -a.sin()],
                k,
            }
        })
        .collect()
}

/// Height at which the origin Hessian of an evenly spaced circular
/// configuration of radius r becomes the zero matrix: r * sqrt(m / 2),
/// independent of the point count.
pub fn circle_critical_height(r: f64, m: f64) -> f64 {
    r * (0.5 * m).sqrt()
}

/// Mixed height derivatives (d^2 F1/dx dh, d^2 F2/dy dh) at the origin;
/// for a circular configuration both entries agree and being nonzero at
/// the degeneracy height certifies transversal eigenvalue crossing.
pub fn cross_derivative_at_center(cfg: &Configuration, h: f64) -> [f64; 2] {
    cfg.hessian_diag_dh(&State { x: 0.0, y: 0.0, h })
}

/// One accepted point of a line-restricted branch.
#[derive(Debug, Clone, Copy)]
pub struct LinePoint {
    /// Signed coordinate along the line direction.
    pub s: f64,
    pub h: f64,
    /// Max-norm of the full planar gradient at (s * direction, h).
    pub full_residual: f64,
}

/// A branch of the scalar problem g(s, h) = direction . F(s * direction, h).
#[derive(Debug, Clone)]
pub struct LineBranch {
    pub line: FixedLine,
    pub points: Vec<LinePoint>,
}

/// Options for line-restricted continuation.
#[derive(Debug, Clone, Copy)]
pub struct RestrictedOptions {
    pub steps: usize,
    pub newton_tol: Option<f64>,
    pub max_iter: usize,
    /// Skip the equivariance certification (for already-certified callers).
    pub assume_certified: bool,
}

impl Default for RestrictedOptions {
    fn default() -> Self {
        Self {
            steps: 100,
            newton_tol: None,
            max_iter: 40,
            assume_certified: false,
        }
    }
}

/// Scalar Newton continuation of the line-restricted gradient from
/// (s0, h_range.0) to h_range.1, keeping s within s_range.
///
/// The configuration must be equivariant under the line's reflection; the
/// off-line gradient component then vanishes on the line, which the
/// per-point full residual check enforces.
pub fn restricted_continue(
    cfg: &Configuration,
    line: &FixedLine,
    s0: f64,
    s_range: (f64, f64),
    h_range: (f64, f64),
    opts: &RestrictedOptions,
) -> Result<LineBranch, SymmetryError> {
    let tol = opts
        .newton_tol
        .unwrap_or_else(|| 1e-12 * (cfg.len() as f64 * cfg.m()).max(1.0));
    if !opts.assume_certified {
        let rect = crate::critical::bounding_rectangle(cfg);
        let samples = default_samples(rect.diameter().max(h_range.0), 12);
        let report = equivariance_residual(cfg, &[line.reflection()], h_range.0, &samples);
        if !report.certified() {
            return Err(SymmetryError::EquivarianceNotCertified {
                residual: report.residual,
                tol: EQUIVARIANCE_TOL,
            });
        }
    }

    let dir = line.direction;
    let g = |s: f64, h: f64| {
        let p = line.point_at(s);
        let f = cfg.gradient(&State { x: p[0], y: p[1], h });
        dir[0] * f[0] + dir[1] * f[1]
    };
    let dg = |s: f64, h: f64| {
        let p = line.point_at(s);
        let hess = cfg.hessian(&State { x: p[0], y: p[1], h });
        let hv = hess.apply(dir);
        dir[0] * hv[0] + dir[1] * hv[1]
    };
    let solve_at = |h: f64, mut s: f64| -> Result<f64, SolveError> {
        for _ in 0..opts.max_iter {
            let gv = g(s, h);
            if gv.abs() <= tol {
                return Ok(s);
            }
            let slope = dg(s, h);
            if slope.abs() <= f64::MIN_POSITIVE {
                return Err(SolveError::SingularHessian { x: s, y: 0.0, det: slope });
            }
            s -= gv / slope;
            if s < s_range.0 || s > s_range.1 {
                return Err(SolveError::Diverged { x: s, y: 0.0 });
            }
        }
        Err(SolveError::MaxIterations {
            max_iter: opts.max_iter,
            residual: g(s, h).abs(),
        })
    };

    let mut points = Vec::with_capacity(opts.steps + 1);
    let mut s = solve_at(h_range.0, s0)?;
    let mut h = h_range.0;
    push_line_point(cfg, line, s, h, &mut points);
    let span = h_range.1 - h_range.0;
    let base_step = span / opts.steps as f64;
    let mut step = base_step;
    while (h - h_range.1).abs() > 1e-15 * h_range.0.abs().max(h_range.1.abs()) {
        let mut h_next = h + step;
        if (span > 0.0 && h_next > h_range.1) || (span < 0.0 && h_next < h_range.1) {
            h_next = h_range.1;
        }
        match solve_at(h_next, s) {
            Ok(s_next) => {
                s = s_next;
                h = h_next;
                push_line_point(cfg, line, s, h, &mut points);
                if step.abs() < base_step.abs() {
                    step *= 2.0;
                }
            }
            Err(e) => {
                step *= 0.5;
                if step.abs() < 1e-9 * base_step.abs().max(f64::MIN_POSITIVE) {
                    return Err(SymmetryError::Solve(e));
                }
            }
        }
    }
    Ok(LineBranch {
        line: *line,
        points,
    })
}

fn push_line_point(
    cfg: &Configuration,
    line: &FixedLine,
    s: f64,
    h: f64,
    points: &mut Vec<LinePoint>,
) {
    let p = line.point_at(s);
    let f = cfg.gradient(&State { x: p[0], y: p[1], h });
    points.push(LinePoint {
        s,
        h,
        full_residual: f[0].abs().max(f[1].abs()),
    });
}
