//! Closed-form eigen decomposition for symmetric 2x2 matrices.

/// Symmetric 2x2 matrix with a single stored off-diagonal entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymMat2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl SymMat2 {
    pub fn new(xx: f64, xy: f64, yy: f64) -> Self {
        Self { xx, xy, yy }
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    /// Largest absolute entry; used to scale degeneracy thresholds.
    pub fn scale(&self) -> f64 {
        self.xx.abs().max(self.yy.abs()).max(self.xy.abs())
    }

    /// Eigenvalues in ascending order. Always real.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let mean = 0.5 * (self.xx + self.yy);
        let disc = f64::hypot(0.5 * (self.xx - self.yy), self.xy);
        [mean - disc, mean + disc]
    }

    /// Eigenvalues with orthonormal eigenvectors, ascending by eigenvalue.
    ///
    /// The vector for the larger eigenvalue is built from whichever of
    /// (b, lam - a) and (lam - c, b) has the larger norm; a degenerate
    /// (scalar) matrix falls back to the coordinate axes.
    pub fn eigen(&self) -> ([f64; 2], [[f64; 2]; 2]) {
        let [lo, hi] = self.eigenvalues();
        let c1 = [self.xy, hi - self.xx];
        let c2 = [hi - self.yy, self.xy];
        let n1 = c1[0] * c1[0] + c1[1] * c1[1];
        let n2 = c2[0] * c2[0] + c2[1] * c2[1];
        let v_hi = if n1 >= n2 && n1 > 0.0 {
            normalize(c1)
        } else if n2 > 0.0 {
            normalize(c2)
        } else {
            [1.0, 0.0]
        };
        let v_lo = [-v_hi[1], v_hi[0]];
        ([lo, hi], [v_lo, v_hi])
    }

    pub fn negative_definite(&self) -> bool {
        self.trace() < 0.0 && self.det() > 0.0
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.xx * v[0] + self.xy * v[1],
            self.xy * v[0] + self.yy * v[1],
        ]
    }
}

fn normalize(v: [f64; 2]) -> [f64; 2] {
    let n = f64::hypot(v[0], v[1]);
    [v[0] / n, v[1] / n]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix() {
        let m = SymMat2::new(-2.0, 0.0, 3.0);
        assert_eq!(m.eigenvalues(), [-2.0, 3.0]);
        let (_, [v_lo, v_hi]) = m.eigen();
        assert!((v_lo[0].abs() - 1.0).abs() < 1e-15);
        assert!((v_hi[1].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eigen_residual_is_small() {
        let m = SymMat2::new(1.3, -0.7, -2.1);
        let ([lo, hi], [v_lo, v_hi]) = m.eigen();
        for (lam, v) in [(lo, v_lo), (hi, v_hi)] {
            let mv = m.apply(v);
            let r = f64::hypot(mv[0] - lam * v[0], mv[1] - lam * v[1]);
            assert!(r < 1e-12, "residual {r}");
        }
        // orthonormality
        assert!((v_lo[0] * v_hi[0] + v_lo[1] * v_hi[1]).abs() < 1e-14);
    }

    #[test]
    fn scalar_matrix_yields_axes() {
        let m = SymMat2::new(2.0, 0.0, 2.0);
        let ([lo, hi], _) = m.eigen();
        assert_eq!(lo, 2.0);
        assert_eq!(hi, 2.0);
    }
}
