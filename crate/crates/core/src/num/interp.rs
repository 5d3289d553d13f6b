//! Cubic (4-point Lagrange) interpolation on uniform tensor grids in one,
//! two, and three dimensions, with analytic first and second derivatives and
//! optional periodic axes.

/// A uniformly spaced axis.
///
/// Non-periodic axes place `n` nodes on `[a, b]` inclusive; periodic axes
/// treat `b` as identified with `a` and place `n` nodes with spacing
/// `(b − a)/n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformAxis {
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub periodic: bool,
}

impl UniformAxis {
    pub fn new(a: f64, b: f64, n: usize) -> Self {
        assert!(n >= 4, "cubic interpolation needs at least 4 nodes");
        Self {
            a,
            b,
            n,
            periodic: false,
        }
    }

    pub fn periodic(a: f64, b: f64, n: usize) -> Self {
        assert!(n >= 4, "cubic interpolation needs at least 4 nodes");
        Self {
            a,
            b,
            n,
            periodic: true,
        }
    }

    /// Node spacing.
    pub fn h(&self) -> f64 {
        if self.periodic {
            (self.b - self.a) / self.n as f64
        } else {
            (self.b - self.a) / (self.n - 1) as f64
        }
    }

    /// Coordinate of node `i`.
    pub fn node(&self, i: usize) -> f64 {
        self.a + self.h() * i as f64
    }

    /// Returns the 4 stencil indices and the local coordinate ξ ∈ ℝ measured
    /// from the first stencil node in units of `h`.
    fn stencil(&self, x: f64) -> ([usize; 4], f64) {
        let h = self.h();
        let t = (x - self.a) / h;
        if self.periodic {
            let n = self.n as isize;
            let j = t.floor() as isize;
            let xi = t - j as f64 + 1.0;
            let wrap = |k: isize| -> usize { (((k % n) + n) % n) as usize };
            ([wrap(j - 1), wrap(j), wrap(j + 1), wrap(j + 2)], xi)
        } else {
            let t = t.clamp(0.0, (self.n - 1) as f64);
            let start = ((t.floor() as isize) - 1).clamp(0, self.n as isize - 4) as usize;
            let xi = t - start as f64;
            ([start, start + 1, start + 2, start + 3], xi)
        }
    }
}

/// Lagrange cubic basis over nodes {0,1,2,3} evaluated at ξ; `order` selects
/// the value (0), first (1) or second (2) derivative with respect to ξ.
pub fn lagrange_weights(xi: f64, order: u8) -> [f64; 4] {
    match order {
        0 => [
            -(xi - 1.0) * (xi - 2.0) * (xi - 3.0) / 6.0,
            xi * (xi - 2.0) * (xi - 3.0) / 2.0,
            -xi * (xi - 1.0) * (xi - 3.0) / 2.0,
            xi * (xi - 1.0) * (xi - 2.0) / 6.0,
        ],
        1 => [
            -((xi - 2.0) * (xi - 3.0) + (xi - 1.0) * (xi - 3.0) + (xi - 1.0) * (xi - 2.0)) / 6.0,
            ((xi - 2.0) * (xi - 3.0) + xi * (xi - 3.0) + xi * (xi - 2.0)) / 2.0,
            -((xi - 1.0) * (xi - 3.0) + xi * (xi - 3.0) + xi * (xi - 1.0)) / 2.0,
            ((xi - 1.0) * (xi - 2.0) + xi * (xi - 2.0) + xi * (xi - 1.0)) / 6.0,
        ],
        2 => [-(xi - 2.0), 3.0 * xi - 5.0, -(3.0 * xi - 4.0), xi - 1.0],
        _ => panic!("derivative order {order} not supported"),
    }
}

/// Cubic interpolation through 4 arbitrary abscissae (used when resampling
/// flow output onto a uniform grid).
pub fn lagrange4_nonuniform(xs: &[f64; 4], ys: &[f64; 4], x: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..4 {
        let mut w = 1.0;
        for j in 0..4 {
            if j != i {
                w *= (x - xs[j]) / (xs[i] - xs[j]);
            }
        }
        acc += w * ys[i];
    }
    acc
}

/// 1-D table.
#[derive(Debug, Clone)]
pub struct Table1 {
    pub axis: UniformAxis,
    pub data: Vec<f64>,
}

impl Table1 {
    pub fn new(axis: UniformAxis, data: Vec<f64>) -> Self {
        assert_eq!(axis.n, data.len());
        Self { axis, data }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_deriv(x, 0)
    }

    pub fn eval_deriv(&self, x: f64, order: u8) -> f64 {
        let (idx, xi) = self.axis.stencil(x);
        let w = lagrange_weights(xi, order);
        let raw: f64 = (0..4).map(|i| w[i] * self.data[idx[i]]).sum();
        raw / self.axis.h().powi(order as i32)
    }
}

/// 2-D table, row-major `data[ix * ny + iy]`.
#[derive(Debug, Clone)]
pub struct Table2 {
    pub ax: UniformAxis,
    pub ay: UniformAxis,
    pub data: Vec<f64>,
}

impl Table2 {
    pub fn new(ax: UniformAxis, ay: UniformAxis, data: Vec<f64>) -> Self {
        assert_eq!(ax.n * ay.n, data.len());
        Self { ax, ay, data }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.eval_deriv(x, y, 0, 0)
    }

    pub fn eval_deriv(&self, x: f64, y: f64, dx: u8, dy: u8) -> f64 {
        let (ix, xix) = self.ax.stencil(x);
        let (iy, xiy) = self.ay.stencil(y);
        let wx = lagrange_weights(xix, dx);
        let wy = lagrange_weights(xiy, dy);
        let ny = self.ay.n;
        let mut acc = 0.0;
        for i in 0..4 {
            let row = ix[i] * ny;
            let mut rowacc = 0.0;
            for j in 0..4 {
                rowacc += wy[j] * self.data[row + iy[j]];
            }
            acc += wx[i] * rowacc;
        }
        acc / (self.ax.h().powi(dx as i32) * self.ay.h().powi(dy as i32))
    }
}

/// 3-D table, layout `data[(ix * ny + iy) * nz + iz]`.
#[derive(Debug, Clone)]
pub struct Table3 {
    pub ax: UniformAxis,
    pub ay: UniformAxis,
    pub az: UniformAxis,
    pub data: Vec<f64>,
}

impl Table3 {
    pub fn new(ax: UniformAxis, ay: UniformAxis, az: UniformAxis, data: Vec<f64>) -> Self {
        assert_eq!(ax.n * ay.n * az.n, data.len());
        Self { ax, ay, az, data }
    }

    pub fn eval(&self, x: f64, y: f64, z: f64) -> f64 {
        self.eval_deriv(x, y, z, 0, 0, 0)
    }

    pub fn eval_deriv(&self, x: f64, y: f64, z: f64, dx: u8, dy: u8, dz: u8) -> f64 {
        let (ix, xix) = self.ax.stencil(x);
        let (iy, xiy) = self.ay.stencil(y);
        let (iz, xiz) = self.az.stencil(z);
        let wx = lagrange_weights(xix, dx);
        let wy = lagrange_weights(xiy, dy);
        let wz = lagrange_weights(xiz, dz);
        let (ny, nz) = (self.ay.n, self.az.n);
        let mut acc = 0.0;
        for i in 0..4 {
            let plane = ix[i] * ny;
            let mut plane_acc = 0.0;
            for j in 0..4 {
                let row = (plane + iy[j]) * nz;
                let mut row_acc = 0.0;
                for k in 0..4 {
                    row_acc += wz[k] * self.data[row + iz[k]];
                }
                plane_acc += wy[j] * row_acc;
            }
            acc += wx[i] * plane_acc;
        }
        acc / (self.ax.h().powi(dx as i32)
            * self.ay.h().powi(dy as i32)
            * self.az.h().powi(dz as i32))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_reproduces_cubics_exactly() {
        let axis = UniformAxis::new(0.0, 1.0, 11);
        let f = |x: f64| 1.0 + 2.0 * x - x * x + 0.5 * x * x * x;
        let data: Vec<f64> = (0..11).map(|i| f(axis.node(i))).collect();
        let t = Table1::new(axis, data);
        for &x in &[0.0, 0.031, 0.5, 0.77, 1.0] {
            assert!((t.eval(x) - f(x)).abs() < 1e-14);
            let df = 2.0 - 2.0 * x + 1.5 * x * x;
            assert!((t.eval_deriv(x, 1) - df).abs() < 1e-12);
            let d2f = -2.0 + 3.0 * x;
            assert!((t.eval_deriv(x, 2) - d2f).abs() < 1e-11);
        }
    }

    #[test]
    fn periodic_axis_wraps() {
        let axis = UniformAxis::periodic(0.0, 1.0, 32);
        let f = |x: f64| (2.0 * std::f64::consts::PI * x).sin();
        let data: Vec<f64> = (0..32).map(|i| f(axis.node(i))).collect();
        let t = Table1::new(axis, data);
        for &x in &[-0.3, 0.01, 0.99, 1.7] {
            assert!((t.eval(x) - f(x)).abs() < 5e-5);
        }
    }

    #[test]
    fn table3_smoke() {
        let ax = UniformAxis::periodic(0.0, 1.0, 8);
        let ay = UniformAxis::new(0.0, 1.0, 9);
        let az = UniformAxis::new(0.0, 2.0, 7);
        let f = |x: f64, y: f64, z: f64| {
            (2.0 * std::f64::consts::PI * x).cos() * (1.0 + y * y) * (0.3 + 0.1 * z)
        };
        let mut data = Vec::with_capacity(8 * 9 * 7);
        for i in 0..8 {
            for j in 0..9 {
                for k in 0..7 {
                    data.push(f(ax.node(i), ay.node(j), az.node(k)));
                }
            }
        }
        let t = Table3::new(ax, ay, az, data);
        let (x, y, z) = (0.23, 0.41, 1.13);
        assert!((t.eval(x, y, z) - f(x, y, z)).abs() < 5e-3);
        // y-dependence is quadratic, so the y-derivative is near-exact.
        let dy = (2.0 * std::f64::consts::PI * x).cos() * 2.0 * y * (0.3 + 0.1 * z);
        assert!((t.eval_deriv(x, y, z, 0, 1, 0) - dy).abs() < 5e-3);
    }

    #[test]
    fn nonuniform_lagrange_matches_polynomial() {
        let xs = [0.0, 0.1, 0.35, 0.5];
        let f = |x: f64| 1.0 - x + 3.0 * x * x - 2.0 * x * x * x;
        let ys = [f(xs[0]), f(xs[1]), f(xs[2]), f(xs[3])];
        assert!((lagrange4_nonuniform(&xs, &ys, 0.27) - f(0.27)).abs() < 1e-14);
    }
}
