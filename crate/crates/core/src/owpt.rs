//! Optical wireless power transfer layer: per-link line-of-sight DC gain,
//! array totals, received-power maps over the receiver plane, and sweeps
//! of the transmitting distance.
//!
//! For parallel planes the incidence and irradiance angles coincide and
//! cos(angle) = h / d, so the aggregate power is proportional to the core
//! functional with exponent m = m_l + 3; `prefactor` exposes the constant
//! of proportionality and every map records where the field-of-view cutoff
//! breaks that identity.

use crate::error::ConfigError;
use crate::functional::{lambertian_exponent, Configuration, State};

/// Emitter and receiver parameters of the optical link model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OwptParams {
    /// Physical receiver area A in square meters.
    pub area_m2: f64,
    /// Semi-angle at half illuminance, degrees.
    pub semi_angle_deg: f64,
    /// Receiver field of view, degrees (links beyond it have zero gain).
    pub fov_deg: f64,
    /// Output power per emitter, watts.
    pub led_power_w: f64,
}

impl OwptParams {
    pub fn new(
        area_m2: f64,
        semi_angle_deg: f64,
        fov_deg: f64,
        led_power_w: f64,
    ) -> Result<Self, ConfigError> {
        if !(semi_angle_deg > 0.0 && semi_angle_deg < 90.0) {
            return Err(ConfigError::SemiAngleOutOfRange {
                deg: semi_angle_deg,
            });
        }
        if !(area_m2 > 0.0 && led_power_w > 0.0 && fov_deg > 0.0 && fov_deg <= 90.0) {
            return Err(ConfigError::InvalidState {
                x: area_m2,
                y: fov_deg,
                h: led_power_w,
            });
        }
        Ok(Self {
            area_m2,
            semi_angle_deg,
            fov_deg,
            led_power_w,
        })
    }

    /// Lambertian order m_l = -ln 2 / ln cos(semi-angle).
    pub fn lambertian_order(&self) -> f64 {
        lambertian_exponent(self.semi_angle_deg).expect("validated at construction") - 3.0
    }

    /// Distance exponent of the matching energy functional, m_l + 3.
    pub fn exponent(&self) -> f64 {
        self.lambertian_order() + 3.0
    }

    /// Proportionality constant between total received power and the
    /// energy functional where no link is cut off:
    /// led_power * (m_l + 1) * A * h^(m_l + 1) / (2 pi).
    pub fn prefactor(&self, h: f64) -> f64 {
        let ml = self.lambertian_order();
        self.led_power_w * (ml + 1.0) * self.area_m2 * h.powf(ml + 1.0)
            / (2.0 * std::f64::consts::PI)
    }
}

/// LOS DC gain of a single emitter-receiver link between parallel planes:
/// (m_l + 1) A / (2 pi d^2) * (h / d)^(m_l + 1) inside the field of view,
/// zero otherwise.
pub fn los_gain(params: &OwptParams, led: [f64; 2], recv: [f64; 2], h: f64) -> f64 {
    let ml = params.lambertian_order();
    let dx = recv[0] - led[0];
    let dy = recv[1] - led[1];
    let d2 = dx * dx + dy * dy + h * h;
    let d = d2.sqrt();
    let cos_phi = h / d;
    if cos_phi < params.fov_deg.to_radians().cos() {
        return 0.0;
    }
    (ml + 1.0) * params.area_m2 / (2.0 * std::f64::consts::PI * d2) * cos_phi.powf(ml + 1.0)
}

/// Whether any emitter falls outside the receiver's field of view.
pub fn any_cutoff(params: &OwptParams, points: &[[f64; 2]], recv: [f64; 2], h: f64) -> bool {
    let cos_fov = params.fov_deg.to_radians().cos();
    points.iter().any(|led| {
        let dx = recv[0] - led[0];
        let dy = recv[1] - led[1];
        let d2 = dx * dx + dy * dy + h * h;
        h / d2.sqrt() < cos_fov
    })
}

/// Total received power in watts: led_power times the summed link gains.
pub fn total_power(params: &OwptParams, points: &[[f64; 2]], recv: [f64; 2], h: f64) -> f64 {
    let mut acc = 0.0;
    for led in points {
        acc += los_gain(params, *led, recv, h);
    }
    params.led_power_w * acc
}

/// Rectangular grid of received power over the receiver plane.
#[derive(Debug, Clone)]
pub struct PowerMap {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    /// Row-major (y-major) received power per cell center, watts.
    pub values: Vec<f64>,
    /// Cells where at least one emitter is outside the field of view; the
    /// functional-proportionality identity only holds off these cells.
    pub cutoff: Vec<bool>,
}

impl PowerMap {
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.nx + ix]
    }

    pub fn is_cutoff(&self, ix: usize, iy: usize) -> bool {
        self.cutoff[iy * self.nx + ix]
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> [f64; 2] {
        [
            self.x_min + (ix as f64 + 0.5) * (self.x_max - self.x_min) / self.nx as f64,
            self.y_min + (iy as f64 + 0.5) * (self.y_max - self.y_min) / self.ny as f64,
        ]
    }

    /// Grid indices of strict 8-neighbor interior local maxima with
    /// positive power.
    pub fn strict_local_maxima(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for iy in 1..self.ny.saturating_sub(1) {
            for ix in 1..self.nx.saturating_sub(1) {
                let v = self.at(ix, iy);
                if v <= 0.0 {
                    continue;
                }
                let mut is_max = true;
                'scan: for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        if dx == 0 && dy == 0 {
                            continue;
                        }
                        let nx = (ix as i64 + dx) as usize;
                        let ny = (iy as i64 + dy) as usize;
                        if self.at(nx, ny) >= v {
                            is_max = false;
                            break 'scan;
                        }
                    }
                }
                if is_max {
                    out.push((ix, iy));
                }
            }
        }
        out
    }
}

/// Evaluates `total_power` at every cell center of a centered rectangular
/// grid, row-major in y then x.
pub fn power_map(
    params: &OwptParams,
    cfg: &Configuration,
    h: f64,
    extents: [f64; 2],
    resolution: [usize; 2],
) -> PowerMap {
    let [ex, ey] = extents;
    let [nx, ny] = resolution;
    assert!(nx >= 2 && ny >= 2, "resolution must be at least 2 per axis");
    let mut values = Vec::with_capacity(nx * ny);
    let mut cutoff = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        // cell centers formed from the half-extent so mirrored cells are
        // exact negations
        let y = (iy as f64 + 0.5 - 0.5 * ny as f64) * (ey / ny as f64);
        for ix in 0..nx {
            let x = (ix as f64 + 0.5 - 0.5 * nx as f64) * (ex / nx as f64);
            values.push(total_power(params, cfg.points(), [x, y], h));
            cutoff.push(any_cutoff(params, cfg.points(), [x, y], h));
        }
    }
    PowerMap {
        x_min: -0.5 * ex,
        x_max: 0.5 * ex,
        y_min: -0.5 * ey,
        y_max: 0.5 * ey,
        nx,
        ny,
        h,
        values,
        cutoff,
    }
}

/// Received power at a fixed receiver as the plane separation varies.
#[derive(Debug, Clone)]
pub struct HSweep {
    pub recv: [f64; 2],
    /// Strictly increasing h with the corresponding received watts.
    pub series: Vec<(f64, f64)>,
}

impl HSweep {
    /// The h of the largest sampled power when it is strictly interior to
    /// the sweep range.
    pub fn interior_argmax(&self) -> Option<f64> {
        let (idx, _) = self
            .series
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))?;
        if idx == 0 || idx + 1 == self.series.len() {
            None
        } else {
            Some(self.series[idx].0)
        }
    }
}

/// Samples `total_power` on a linear or geometric grid of `steps` heights
/// spanning `h_range` inclusively.
pub fn h_sweep(
    params: &OwptParams,
    points: &[[f64; 2]],
    recv: [f64; 2],
    h_range: (f64, f64),
    steps: usize,
    geometric: bool,
) -> HSweep {
    assert!(steps >= 2);
    assert!(h_range.0 > 0.0 && h_range.1 > h_range.0);
    let mut series = Vec::with_capacity(steps);
    for i in 0..steps {
        let frac = i as f64 / (steps - 1) as f64;
        let h = if geometric {
            h_range.0 * (h_range.1 / h_range.0).powf(frac)
        } else {
            h_range.0 + frac * (h_range.1 - h_range.0)
        };
        series.push((h, total_power(params, points, recv, h)));
    }
    HSweep { recv, series }
}

/// Relative deviation of total power from prefactor * f at one state;
/// meaningful only where no link is cut off.
pub fn identity_residual(params: &OwptParams, cfg: &Configuration, s: &State) -> f64 {
    let p = total_power(params, cfg.points(), [s.x, s.y], s.h);
    let reference = params.prefactor(s.h) * cfg.value(s);
    (p - reference).abs() / reference.abs().max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> OwptParams {
        OwptParams::new(2.5e-4, 70.0, 60.0, 0.1).unwrap()
    }

    #[test]
    fn aligned_gain_closed_form() {
        let p = params();
        let g = los_gain(&p, [0.0, 0.0], [0.0, 0.0], 1.6);
        let ml = p.lambertian_order();
        let expect = (ml + 1.0) * 2.5e-4 / (2.0 * std::f64::consts::PI * 2.56);
        assert!((g - expect).abs() < 1e-18);
        assert!((g - 2.5584e-5).abs() < 1e-9);
        let tp = total_power(&p, &[[0.0, 0.0]], [0.0, 0.0], 1.6);
        assert!((tp - 2.5584e-6).abs() < 1e-10);
    }

    #[test]
    fn gain_zero_beyond_fov() {
        let p = params();
        // incidence angle 63.4 deg > 60 deg fov
        let g = los_gain(&p, [0.0, 0.0], [2.0, 0.0], 1.0);
        assert_eq!(g, 0.0);
        // exactly sqrt(3) h away is 60 deg, still inside
        let on_edge = los_gain(&p, [0.0, 0.0], [3.0_f64.sqrt() * 0.999, 0.0], 1.0);
        assert!(on_edge > 0.0);
    }

    #[test]
    fn gain_length_scaling() {
        let p = params();
        let ml = p.lambertian_order();
        let g1 = los_gain(&p, [0.0, 0.0], [0.3, 0.1], 0.8);
        let g2 = los_gain(&p, [0.0, 0.0], [0.6, 0.2], 1.6);
        // gain ~ h^(ml+1) / d^(ml+3): doubling all lengths scales by 1/4
        assert!((g2 - 0.25 * g1).abs() < 1e-15 * g1.max(1.0));
        let _ = ml;
    }

    #[test]
    fn power_linear_in_led_power() {
        let p = params();
        let double = OwptParams {
            led_power_w: 0.2,
            ..p
        };
        let pts = [[0.1, 0.2], [-0.4, 0.0], [0.0, -0.3]];
        let a = total_power(&p, &pts, [0.05, 0.05], 0.7);
        let b = total_power(&double, &pts, [0.05, 0.05], 0.7);
        assert!((b - 2.0 * a).abs() <= 1e-15 * b);
    }

    #[test]
    fn identity_with_functional_inside_fov() {
        let p = params();
        let m = p.exponent();
        let pts: Vec<[f64; 2]> = (0..12)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / 12.0;
                [0.3 * a.cos(), 0.3 * a.sin()]
            })
            .collect();
        let cfg = Configuration::new(pts, m).unwrap();
        // receiver close to the array center at large h: no cutoffs
        let s = State::new(0.05, -0.02, 1.3).unwrap();
        assert!(!any_cutoff(&p, cfg.points(), [s.x, s.y], s.h));
        assert!(identity_residual(&p, &cfg, &s) < 1e-12);
    }

    #[test]
    fn receiver_outside_every_fov_gets_nothing() {
        let p = params();
        let pts = [[0.0, 0.0], [0.2, 0.0]];
        assert_eq!(total_power(&p, &pts, [50.0, 0.0], 0.5), 0.0);
    }

    #[test]
    fn map_dimensions_and_symmetry() {
        let p = params();
        let pts = vec![[-0.2, 0.0], [0.2, 0.0], [0.0, 0.1], [0.0, -0.1]];
        let cfg = Configuration::new(pts, p.exponent()).unwrap();
        let map = power_map(&p, &cfg, 0.4, [1.0, 1.0], [21, 21]);
        assert_eq!(map.values.len(), 21 * 21);
        for iy in 0..21 {
            for ix in 0..21 {
                let v = map.at(ix, iy);
                assert!(v >= 0.0);
                // the layout is exactly mirror symmetric, so mirrored
                // cells match to roundoff
                let mx = map.at(20 - ix, iy);
                let my = map.at(ix, 20 - iy);
                assert!((v - mx).abs() <= 1e-13 * v.max(1e-30));
                assert!((v - my).abs() <= 1e-13 * v.max(1e-30));
            }
        }
    }

    #[test]
    fn single_emitter_sweep_is_monotone_decreasing() {
        let p = params();
        let sweep = h_sweep(&p, &[[0.0, 0.0]], [0.0, 0.0], (0.05, 3.0), 200, false);
        assert!(sweep.interior_argmax().is_none());
        for w in sweep.series.windows(2) {
            assert!(w[0].0 < w[1].0);
            assert!(w[0].1 > w[1].1);
        }
    }

    #[test]
    fn params_validation() {
        assert!(OwptParams::new(2.5e-4, 95.0, 60.0, 0.1).is_err());
        assert!(OwptParams::new(-1.0, 70.0, 60.0, 0.1).is_err());
        assert!(OwptParams::new(2.5e-4, 70.0, 0.0, 0.1).is_err());
    }
}
