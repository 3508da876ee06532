//! Problem instances and closed-form evaluation of the energy-supply
//! functional f = sum_i d_i^(-m) with d_i^2 = (x-x_i)^2 + (y-y_i)^2 + h^2,
//! together with every derivative the solvers and continuation need:
//! gradient, Hessian, height/source/exponent sensitivities, and the
//! third-derivative tensor used for bifurcation diagnostics.
//!
//! All evaluation is stateless and pure; a `Configuration` is freely
//! shareable across threads once constructed. Powers of d_i are computed
//! as exp(-(m/2 + k) * ln d_i^2) from the squared distance, so no square
//! root is taken except implicitly where ln d_i itself is required.
//! Accumulation follows the configuration's point order; determinism is
//! preferred over last-bit accuracy.

use crate::eig::SymMat2;
use crate::error::ConfigError;

/// Exclusive exponent range accepted without an override.
pub const M_RANGE: (f64, f64) = (3.0, 4.0);

/// A planar emitter layout plus the distance exponent `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    points: Vec<[f64; 2]>,
    m: f64,
    label: Option<String>,
}

impl Configuration {
    /// Builds a configuration, enforcing 3 < m < 4.
    pub fn new(points: Vec<[f64; 2]>, m: f64) -> Result<Self, ConfigError> {
        if !(m > M_RANGE.0 && m < M_RANGE.1) {
            return Err(ConfigError::ExponentOutOfRange { m });
        }
        Self::with_m_override(points, m)
    }

    /// Builds a configuration without the exponent range check. Intended
    /// for fixtures (integer exponents make hand oracles exact); the
    /// formulas are valid for any m > 0.
    pub fn with_m_override(points: Vec<[f64; 2]>, m: f64) -> Result<Self, ConfigError> {
        if points.is_empty() {
            return Err(ConfigError::EmptyConfiguration);
        }
        for (index, p) in points.iter().enumerate() {
            if !p[0].is_finite() || !p[1].is_finite() {
                return Err(ConfigError::NonFiniteCoordinate { index });
            }
        }
        if !m.is_finite() || m <= 0.0 {
            return Err(ConfigError::ExponentOutOfRange { m });
        }
        Ok(Self {
            points,
            m,
            label: None,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// f(s) = sum_i d_i^(-m). Strictly positive for h > 0.
    pub fn value(&self, s: &State) -> f64 {
        let m = self.m;
        let mut acc = 0.0;
        for p in &self.points {
            let d2 = dist2(p, s);
            acc += pow_d(d2, 0.5 * m);
        }
        acc
    }

    /// Gradient F = (df/dx, df/dy) = -m * sum_i (x - x_i, y - y_i) / d_i^(m+2).
    pub fn gradient(&self, s: &State) -> [f64; 2] {
        let m = self.m;
        let mut gx = 0.0;
        let mut gy = 0.0;
        for p in &self.points {
            let ux = s.x - p[0];
            let uy = s.y - p[1];
            let d2 = ux * ux + uy * uy + s.h * s.h;
            let w = pow_d(d2, 0.5 * (m + 2.0));
            gx += ux * w;
            gy += uy * w;
        }
        [-m * gx, -m * gy]
    }

    /// Hessian DF(s), symmetric by construction.
    pub fn hessian(&self, s: &State) -> SymMat2 {
        let m = self.m;
        let mut axx = 0.0;
        let mut ayy = 0.0;
        let mut axy = 0.0;
        for p in &self.points {
            let ux = s.x - p[0];
            let uy = s.y - p[1];
            let d2 = ux * ux + uy * uy + s.h * s.h;
            let w2 = pow_d(d2, 0.5 * (m + 2.0));
            axx += w2 * (1.0 - (m + 2.0) * ux * ux / d2);
            ayy += w2 * (1.0 - (m + 2.0) * uy * uy / d2);
            axy += w2 / d2 * ux * uy;
        }
        SymMat2::new(-m * axx, m * (m + 2.0) * axy, -m * ayy)
    }

    /// dF/dh = m(m+2) h * sum_i (x - x_i, y - y_i) / d_i^(m+4).
    pub fn gradient_dh(&self, s: &State) -> [f64; 2] {
        let m = self.m;
        let mut gx = 0.0;
        let mut gy = 0.0;
        for p in &self.points {
            let ux = s.x - p[0];
            let uy = s.y - p[1];
            let d2 = ux * ux + uy * uy + s.h * s.h;
            let w = pow_d(d2, 0.5 * (m + 4.0));
            gx += ux * w;
            gy += uy * w;
        }
        let c = m * (m + 2.0) * s.h;
        [c * gx, c * gy]
    }

    /// The 2x2 block of dF with respect to the j-th source position,
    /// laid out as [[dF1/dx_j, dF1/dy_j], [dF2/dx_j, dF2/dy_j]].
    ///
    /// Equals the negated j-th summand of the Hessian: f depends on the
    /// sources only through the differences x - x_j.
    pub fn source_jacobian(&self, s: &State, j: usize) -> Result<[[f64; 2]; 2], ConfigError> {
        let p = self
            .points
            .get(j)
            .ok_or(ConfigError::SourceIndexOutOfRange {
                index: j,
                len: self.points.len(),
            })?;
        let m = self.m;
        let ux = s.x - p[0];
        let uy = s.y - p[1];
        let d2 = ux * ux + uy * uy + s.h * s.h;
        let w2 = pow_d(d2, 0.5 * (m + 2.0));
        let diag_x = m * w2 * (1.0 - (m + 2.0) * ux * ux / d2);
        let diag_y = m * w2 * (1.0 - (m + 2.0) * uy * uy / d2);
        let off = -m * (m + 2.0) * w2 / d2 * ux * uy;
        Ok([[diag_x, off], [off, diag_y]])
    }

    /// dF/dm = sum_i (x - x_i, y - y_i) / d_i^(m+2) * (-1 + m ln d_i).
    pub fn gradient_dm(&self, s: &State) -> [f64; 2] {
        let m = self.m;
        let mut gx = 0.0;
        let mut gy = 0.0;
        for p in &self.points {
            let ux = s.x - p[0];
            let uy = s.y - p[1];
            let d2 = ux * ux + uy * uy + s.h * s.h;
            let w = pow_d(d2, 0.5 * (m + 2.0));
            let factor = -1.0 + m * 0.5 * d2.ln();
            gx += ux * w * factor;
            gy += uy * w * factor;
        }
        [gx, gy]
    }

    /// The four independent components of the third-derivative tensor of f.
    pub fn third_tensor(&self, s: &State) -> ThirdTensor {
        let m = self.m;
        let mut xxx = 0.0;
        let mut xxy = 0.0;
        let mut xyy = 0.0;
        let mut yyy = 0.0;
        for p in &self.points {
            let ux = s.x - p[0];
            let uy = s.y - p[1];
            let d2 = ux * ux + uy * uy + s.h * s.h;
            let w4 = pow_d(d2, 0.5 * (m + 4.0));
            let qx = (m + 4.0) * ux * ux / d2;
            let qy = (m + 4.0) * uy * uy / d2;
            xxx += ux * w4 * (3.0 - qx);
            xxy += uy * w4 * (1.0 - qx);
            xyy += ux * w4 * (1.0 - qy);
            yyy += uy * w4 * (3.0 - qy);
        }
        let c = m * (m + 2.0);
        ThirdTensor {
            xxx: c * xxx,
            xxy: c * xxy,
            xyy: c * xyy,
            yyy: c * yyy,
        }
    }

    /// Mixed height derivatives of the Hessian diagonal,
    /// (d^2 F1 / dx dh, d^2 F2 / dy dh). The first entry is the c'(h)
    /// transversality monitor for symmetric degeneracies at the origin.
    pub fn hessian_diag_dh(&self, s: &State) -> [f64; 2] {
        let m = self.m;
        let mut cx = 0.0;
        let mut cy = 0.0;
        for p in &self.points {
            let ux = s.x - p[0];
            let uy = s.y - p[1];
            let d2 = ux * ux + uy * uy + s.h * s.h;
            let w4 = pow_d(d2, 0.5 * (m + 4.0));
            cx += w4 * (1.0 - (m + 4.0) * ux * ux / d2);
            cy += w4 * (1.0 - (m + 4.0) * uy * uy / d2);
        }
        let c = m * (m + 2.0) * s.h;
        [c * cx, c * cy]
    }

    /// Full derivative bundle at a state.
    pub fn derivatives(&self, s: &State) -> Derivatives {
        Derivatives {
            f: self.value(s),
            grad: self.gradient(s),
            hess: self.hessian(s),
            df_dh: self.gradient_dh(s),
            df_dm: self.gradient_dm(s),
        }
    }
}

/// Receiver-plane state (x, y) at plane separation h > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub x: f64,
    pub y: f64,
    pub h: f64,
}

impl State {
    pub fn new(x: f64, y: f64, h: f64) -> Result<Self, ConfigError> {
        if !(x.is_finite() && y.is_finite() && h.is_finite() && h > 0.0) {
            return Err(ConfigError::InvalidState { x, y, h });
        }
        Ok(Self { x, y, h })
    }

    pub fn xy(&self) -> [f64; 2] {
        [self.x, self.y]
    }
}

/// Value and first/second derivatives at one state.
#[derive(Debug, Clone, Copy)]
pub struct Derivatives {
    pub f: f64,
    pub grad: [f64; 2],
    pub hess: SymMat2,
    pub df_dh: [f64; 2],
    pub df_dm: [f64; 2],
}

/// Third derivatives of f; full symmetry leaves four components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThirdTensor {
    pub xxx: f64,
    pub xxy: f64,
    pub xyy: f64,
    pub yyy: f64,
}

/// Distance exponent from an emitter's semi-angle at half illuminance:
/// m = 3 - ln 2 / ln cos(angle).
pub fn lambertian_exponent(semi_angle_deg: f64) -> Result<f64, ConfigError> {
    if !(semi_angle_deg > 0.0 && semi_angle_deg < 90.0) {
        return Err(ConfigError::SemiAngleOutOfRange {
            deg: semi_angle_deg,
        });
    }
    let ml = -std::f64::consts::LN_2 / semi_angle_deg.to_radians().cos().ln();
    Ok(3.0 + ml)
}

/// d^(-2p) computed from d^2 as exp(-p ln d^2); one transcendental call
/// per point per power, stable for d near h.
#[inline]
fn pow_d(d2: f64, p: f64) -> f64 {
    (-p * d2.ln()).exp()
}

#[inline]
fn dist2(p: &[f64; 2], s: &State) -> f64 {
    let ux = s.x - p[0];
    let uy = s.y - p[1];
    ux * ux + uy * uy + s.h * s.h
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_point() -> Configuration {
        Configuration::new(vec![[0.0, 0.0]], 3.5).unwrap()
    }

    fn circle(n: usize, r: f64, m: f64) -> Configuration {
        let pts = (0..n)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                [r * a.cos(), r * a.sin()]
            })
            .collect();
        Configuration::new(pts, m).unwrap()
    }

    #[test]
    fn value_single_point_unit_height() {
        let cfg = single_point();
        let s = State::new(0.0, 0.0, 1.0).unwrap();
        assert_eq!(cfg.value(&s), 1.0);
    }

    #[test]
    fn value_single_point_offset() {
        let cfg = single_point();
        let s = State::new(1.0, 0.0, 1.0).unwrap();
        let expect = 2.0_f64.powf(-1.75);
        assert!((cfg.value(&s) - expect).abs() < 1e-15);
        assert!((expect - 0.29730).abs() < 1e-5);
    }

    #[test]
    fn value_circle_center_closed_form() {
        let m = lambertian_exponent(70.0).unwrap();
        let cfg = circle(20, 1.2, m);
        let s = State::new(0.0, 0.0, 1.6).unwrap();
        // all d_i^2 = r^2 + h^2 at the center
        let closed = 20.0 * (1.2_f64 * 1.2 + 1.6 * 1.6).powf(-m / 2.0);
        let v = cfg.value(&s);
        assert!((v - closed).abs() / closed < 1e-13);
        assert!((v - 1.5975591237085713).abs() < 1e-12);
    }

    #[test]
    fn value_positive_and_decays() {
        let m = lambertian_exponent(70.0).unwrap();
        let cfg = circle(7, 1.0, m);
        let center = State::new(0.0, 0.0, 0.8).unwrap();
        let far = State::new(2000.0, 0.0, 0.8).unwrap();
        assert!(cfg.value(&center) > 0.0);
        assert!(cfg.value(&far) > 0.0);
        assert!(cfg.value(&far) < 1e-6 * cfg.value(&center));
    }

    #[test]
    fn gradient_single_point_closed_form() {
        let cfg = single_point();
        let s = State::new(1.0, 0.0, 1.0).unwrap();
        let g = cfg.gradient(&s);
        let expect = -3.5 / 2.0_f64.powf(2.75);
        assert!((g[0] - expect).abs() < 1e-15);
        assert_eq!(g[1], 0.0);
        assert!((expect + 0.52027).abs() < 1e-4);
    }

    #[test]
    fn gradient_vanishes_at_symmetry_center() {
        let m = lambertian_exponent(70.0).unwrap();
        let cfg = circle(20, 1.2, m);
        let g = cfg.gradient(&State::new(0.0, 0.0, 0.7).unwrap());
        assert!(g[0].abs() < 1e-13);
        assert!(g[1].abs() < 1e-13);
    }

    #[test]
    fn hessian_single_point_above_source() {
        let cfg = single_point();
        let h = cfg.hessian(&State::new(0.0, 0.0, 1.0).unwrap());
        assert!((h.xx + 3.5).abs() < 1e-14);
        assert!((h.yy + 3.5).abs() < 1e-14);
        assert_eq!(h.xy, 0.0);
    }

    #[test]
    fn hessian_circle_center_is_scalar() {
        let m = lambertian_exponent(70.0).unwrap();
        let cfg = circle(20, 1.2, m);
        for h in [0.3, 0.9, 1.62, 2.5] {
            let hess = cfg.hessian(&State::new(0.0, 0.0, h).unwrap());
            assert!(hess.xy.abs() < 1e-12 * hess.scale().max(1.0));
            assert!((hess.xx - hess.yy).abs() < 1e-11 * hess.scale().max(1.0));
        }
    }

    #[test]
    fn gradient_dh_single_point_closed_form() {
        let cfg = single_point();
        let g = cfg.gradient_dh(&State::new(1.0, 0.0, 1.0).unwrap());
        let expect = 3.5 * 5.5 / 2.0_f64.powf(3.75);
        assert!((g[0] - expect).abs() < 1e-14);
        assert_eq!(g[1], 0.0);
    }

    #[test]
    fn gradient_dm_single_point_closed_form() {
        let cfg = single_point();
        let g = cfg.gradient_dm(&State::new(1.0, 0.0, 1.0).unwrap());
        let expect = (-1.0 + 3.5 * 2.0_f64.sqrt().ln()) / 2.0_f64.powf(2.75);
        assert!((g[0] - expect).abs() < 1e-15);
        assert!((expect - 0.031664).abs() < 1e-6);
        assert_eq!(g[1], 0.0);
    }

    #[test]
    fn source_jacobian_is_negated_hessian_summand() {
        let cfg = single_point();
        let s = State::new(0.4, -0.3, 0.9).unwrap();
        let block = cfg.source_jacobian(&s, 0).unwrap();
        let hess = cfg.hessian(&s);
        assert!((block[0][0] + hess.xx).abs() < 1e-14 * hess.scale());
        assert!((block[0][1] + hess.xy).abs() < 1e-14 * hess.scale());
        assert!((block[1][1] + hess.yy).abs() < 1e-14 * hess.scale());
    }

    #[test]
    fn source_jacobian_index_out_of_range() {
        let cfg = single_point();
        let s = State::new(0.0, 0.0, 1.0).unwrap();
        assert!(matches!(
            cfg.source_jacobian(&s, 1),
            Err(ConfigError::SourceIndexOutOfRange { .. })
        ));
    }

    #[test]
    fn third_tensor_vanishes_above_single_source() {
        let cfg = single_point();
        let t = cfg.third_tensor(&State::new(0.0, 0.0, 0.7).unwrap());
        assert_eq!(t.xxx, 0.0);
        assert_eq!(t.xxy, 0.0);
        assert_eq!(t.xyy, 0.0);
        assert_eq!(t.yyy, 0.0);
    }

    #[test]
    fn lambertian_exponent_values() {
        let m70 = lambertian_exponent(70.0).unwrap();
        assert!((m70 - 3.646058770348734).abs() < 1e-12);
        let m60 = lambertian_exponent(60.0).unwrap();
        assert!((m60 - 4.0).abs() < 1e-12);
        let m45 = lambertian_exponent(45.0).unwrap();
        assert!((m45 - 5.0).abs() < 1e-12);
        assert!(Configuration::new(vec![[0.0, 0.0]], m60).is_err());
        assert!(Configuration::new(vec![[0.0, 0.0]], m45).is_err());
        assert!(Configuration::with_m_override(vec![[0.0, 0.0]], m60).is_ok());
        assert!(lambertian_exponent(0.0).is_err());
        assert!(lambertian_exponent(90.0).is_err());
    }

    #[test]
    fn construction_rejects_bad_inputs() {
        assert!(matches!(
            Configuration::new(vec![], 3.5),
            Err(ConfigError::EmptyConfiguration)
        ));
        assert!(Configuration::new(vec![[f64::NAN, 0.0]], 3.5).is_err());
        assert!(Configuration::new(vec![[0.0, 0.0]], 3.0).is_err());
        assert!(Configuration::new(vec![[0.0, 0.0]], 4.0).is_err());
        assert!(State::new(0.0, 0.0, 0.0).is_err());
        assert!(State::new(0.0, 0.0, -1.0).is_err());
        assert!(State::new(f64::INFINITY, 0.0, 1.0).is_err());
    }
}
