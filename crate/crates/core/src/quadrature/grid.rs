//! Radial (but possibly non-separable) functions of two radii, sampled on
//! a tensor grid, and their 2-D cumulative (summed-area) integrals.

use super::profile::GL8;
use super::QuadratureSpec;
use crate::error::{HardyError, Result};
use std::io::Write;

/// Values of a nonnegative function of `(r1, r2)` on a tensor product of
/// strictly increasing positive grids, tagged with the axis dimensions
/// `(n1, n2)` of the underlying product space.
///
/// Between nodes the function is interpolated bilinearly in
/// `(ln r1, ln r2)` — on the logarithm of the values when the panel's four
/// corners are positive, on the values themselves otherwise. Below the
/// first node of either axis the edge value extends as a constant; the
/// grid is expected to cover the support (callers declare adequacy).
#[derive(Debug, Clone)]
pub struct TensorGridFunction {
    nodes1: Vec<f64>,
    nodes2: Vec<f64>,
    values: Vec<f64>, // row-major: [i1 * nodes2.len() + i2]
    n1: u32,
    n2: u32,
}

impl TensorGridFunction {
    pub fn new(
        nodes1: Vec<f64>,
        nodes2: Vec<f64>,
        values: Vec<f64>,
        n1: u32,
        n2: u32,
    ) -> Result<Self> {
        for (name, nodes) in [("nodes1", &nodes1), ("nodes2", &nodes2)] {
            if nodes.len() < 2 {
                return Err(HardyError::GridMismatch(format!(
                    "{name}: need at least 2 nodes"
                )));
            }
            if nodes[0] <= 0.0 || !nodes.windows(2).all(|w| w[1] > w[0] && w[1].is_finite()) {
                return Err(HardyError::GridMismatch(format!(
                    "{name} must be strictly increasing and positive"
                )));
            }
        }
        if values.len() != nodes1.len() * nodes2.len() {
            return Err(HardyError::GridMismatch(format!(
                "value matrix has {} entries for a {}x{} grid",
                values.len(),
                nodes1.len(),
                nodes2.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(HardyError::GridMismatch(
                "values must be finite and nonnegative".into(),
            ));
        }
        if n1 < 1 || n2 < 1 {
            return Err(HardyError::GridMismatch("dimensions must be >= 1".into()));
        }
        Ok(TensorGridFunction {
            nodes1,
            nodes2,
            values,
            n1,
            n2,
        })
    }

    /// Sample a function of the two radii on a tensor grid.
    pub fn from_fn(
        nodes1: Vec<f64>,
        nodes2: Vec<f64>,
        n1: u32,
        n2: u32,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(nodes1.len() * nodes2.len());
        for &r1 in &nodes1 {
            for &r2 in &nodes2 {
                values.push(f(r1, r2));
            }
        }
        Self::new(nodes1, nodes2, values, n1, n2)
    }

    pub fn nodes1(&self) -> &[f64] {
        &self.nodes1
    }

    pub fn nodes2(&self) -> &[f64] {
        &self.nodes2
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.n1, self.n2)
    }

    pub fn value(&self, i1: usize, i2: usize) -> f64 {
        self.values[i1 * self.nodes2.len() + i2]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Same grid, transformed values.
    pub fn map(&self, f: impl Fn(f64, f64, f64) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(self.values.len());
        for (i1, &r1) in self.nodes1.iter().enumerate() {
            for (i2, &r2) in self.nodes2.iter().enumerate() {
                values.push(f(r1, r2, self.value(i1, i2)));
            }
        }
        Self::new(
            self.nodes1.clone(),
            self.nodes2.clone(),
            values,
            self.n1,
            self.n2,
        )
    }

    /// CSV serialization: `r1,r2,value` rows.
    pub fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        writeln!(out, "r1,r2,value")?;
        for (i1, &r1) in self.nodes1.iter().enumerate() {
            for (i2, &r2) in self.nodes2.iter().enumerate() {
                writeln!(
                    out,
                    "{},{},{}",
                    super::profile::fmt_float(r1),
                    super::profile::fmt_float(r2),
                    super::profile::fmt_float(self.value(i1, i2))
                )?;
            }
        }
        Ok(())
    }

    /// Integral of `value^power * r1^{w1+n1-1} r2^{w2+n2-1}` over the grid
    /// span (with the constant extension below the first nodes), by the
    /// same panel rule as [`tensor_prefix_2d`]. Used for weighted norms of
    /// grid functions.
    pub(crate) fn weighted_power_integral(&self, power: f64, w1: f64, w2: f64) -> f64 {
        let mut total = 0.0;
        for j in 0..self.nodes1.len() {
            for k in 0..self.nodes2.len() {
                total += self.panel(j, k, power, w1, w2);
            }
        }
        total
    }

    /// Integral over the panel whose upper-right corner is node `(j, k)`;
    /// `j = 0` / `k = 0` denote the extension strips from 0 to the first
    /// node. The integrand is `value^power r1^{w1+n1-1} r2^{w2+n2-1}`.
    fn panel(&self, j: usize, k: usize, power: f64, w1: f64, w2: f64) -> f64 {
        let e1 = self.n1 as f64 + w1;
        let e2 = self.n2 as f64 + w2;
        // Corner values of the panel (constant extension on edge strips).
        let ja = j.saturating_sub(1);
        let ka = k.saturating_sub(1);
        let c00 = self.value(ja, ka);
        let c01 = self.value(ja, k);
        let c10 = self.value(j, ka);
        let c11 = self.value(j, k);
        if c00 == 0.0 && c01 == 0.0 && c10 == 0.0 && c11 == 0.0 {
            return 0.0;
        }

        // Axis factors: either a genuine log-interval or the (0, first]
        // extension, over which the interpolant is constant in that axis.
        let axis = |nodes: &[f64], idx: usize| -> (f64, f64, bool) {
            if idx == 0 {
                (nodes[0], f64::NAN, false)
            } else {
                (nodes[idx - 1], nodes[idx], true)
            }
        };
        let (a1, b1, real1) = axis(&self.nodes1, j);
        let (a2, b2, real2) = axis(&self.nodes2, k);

        let log_lin = c00 > 0.0 && c01 > 0.0 && c10 > 0.0 && c11 > 0.0;
        let corner = |v: f64| if log_lin { v.ln() } else { v };
        let (d00, d01, d10, d11) = (corner(c00), corner(c01), corner(c10), corner(c11));
        let interp = |u1: f64, u2: f64| -> f64 {
            let v = d00 * (1.0 - u1) * (1.0 - u2)
                + d01 * (1.0 - u1) * u2
                + d10 * u1 * (1.0 - u2)
                + d11 * u1 * u2;
            if log_lin {
                v.exp()
            } else {
                v
            }
        };

        // Edge strips are constant along the extended axis, so they reduce
        // to a 1-D rule times an exact moment of r^{e-1}.
        let moment0 = |r0: f64, e: f64| -> f64 {
            if e <= 0.0 {
                // Non-integrable under this weight; the caller's weight
                // hypotheses exclude this, but stay finite regardless.
                f64::INFINITY
            } else {
                r0.powf(e) / e
            }
        };

        match (real1, real2) {
            (false, false) => c00.powf(power) * moment0(a1, e1) * moment0(a2, e2),
            (false, true) => {
                let (ta, tb) = (a2.ln(), b2.ln());
                let (mid, half) = (0.5 * (ta + tb), 0.5 * (tb - ta));
                let mut sum = 0.0;
                for (xi, wi) in GL8 {
                    let tau = mid + half * xi;
                    let u2 = (tau - ta) / (tb - ta);
                    sum += wi * interp(0.0, u2).powf(power) * (e2 * tau).exp();
                }
                sum * half * moment0(a1, e1)
            }
            (true, false) => {
                let (ta, tb) = (a1.ln(), b1.ln());
                let (mid, half) = (0.5 * (ta + tb), 0.5 * (tb - ta));
                let mut sum = 0.0;
                for (xi, wi) in GL8 {
                    let tau = mid + half * xi;
                    let u1 = (tau - ta) / (tb - ta);
                    sum += wi * interp(u1, 0.0).powf(power) * (e1 * tau).exp();
                }
                sum * half * moment0(a2, e2)
            }
            (true, true) => {
                let (t1a, t1b) = (a1.ln(), b1.ln());
                let (t2a, t2b) = (a2.ln(), b2.ln());
                let (mid1, half1) = (0.5 * (t1a + t1b), 0.5 * (t1b - t1a));
                let (mid2, half2) = (0.5 * (t2a + t2b), 0.5 * (t2b - t2a));
                let mut sum = 0.0;
                for (x1, w1g) in GL8 {
                    let tau1 = mid1 + half1 * x1;
                    let u1 = (tau1 - t1a) / (t1b - t1a);
                    let f1 = (e1 * tau1).exp();
                    for (x2, w2g) in GL8 {
                        let tau2 = mid2 + half2 * x2;
                        let u2 = (tau2 - t2a) / (t2b - t2a);
                        sum += w1g * w2g * interp(u1, u2).powf(power) * f1 * (e2 * tau2).exp();
                    }
                }
                sum * half1 * half2
            }
        }
    }
}

/// The 2-D cumulative integral
/// `G(s1, s2) = int_0^{s1} int_0^{s2} f(r1, r2) r1^{n1-1} r2^{n2-1} dr`
/// at every grid node: separable panel quadrature followed by a 2-D
/// inclusive prefix sum. Monotone in each argument since panels are
/// nonnegative.
pub fn tensor_prefix_2d(
    grid: &TensorGridFunction,
    _spec: &QuadratureSpec,
) -> Result<TensorGridFunction> {
    let len1 = grid.nodes1.len();
    let len2 = grid.nodes2.len();
    let mut g = vec![0.0f64; len1 * len2];
    for j in 0..len1 {
        for k in 0..len2 {
            let panel = grid.panel(j, k, 1.0, 0.0, 0.0);
            let left = if k > 0 { g[j * len2 + k - 1] } else { 0.0 };
            let up = if j > 0 { g[(j - 1) * len2 + k] } else { 0.0 };
            let diag = if j > 0 && k > 0 {
                g[(j - 1) * len2 + k - 1]
            } else {
                0.0
            };
            g[j * len2 + k] = panel + left + up - diag;
        }
    }
    // Clamp the roundoff of the inclusion-exclusion update.
    for v in &mut g {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    TensorGridFunction::new(
        grid.nodes1.clone(),
        grid.nodes2.clone(),
        g,
        grid.n1,
        grid.n2,
    )
}

#[cfg(test)]
mod tests {
    use super::super::{cumulative, log_grid, QuadratureSpec, RadialProfile};
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn assert_rel(actual: f64, expected: f64, tol: f64) {
        assert!(
            (actual - expected).abs() <= tol * expected.abs().max(1e-300),
            "expected {expected:.17e}, got {actual:.17e}"
        );
    }

    #[test]
    fn zero_grid_has_zero_prefix() {
        let nodes = log_grid(1e-2, 1e2, 16);
        let grid =
            TensorGridFunction::from_fn(nodes.clone(), nodes, 1, 1, |_, _| 0.0).unwrap();
        let g = tensor_prefix_2d(&grid, &spec()).unwrap();
        assert!(g.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn separable_prefix_factorizes() {
        // For f(r1, r2) = f1(r1) f2(r2), G = F1 x F2 when both sides use
        // the same sampled panel rule.
        let nodes1 = log_grid(1e-6, 1e6, 96);
        let nodes2 = log_grid(1e-6, 1e6, 80);
        let f1 = |r: f64| 1.0 / (1.0 + r.powf(1.5));
        let f2 = |r: f64| r.powf(0.25) / (1.0 + r * r);
        let grid = TensorGridFunction::from_fn(nodes1.clone(), nodes2.clone(), 1, 2, |r1, r2| {
            f1(r1) * f2(r2)
        })
        .unwrap();
        let g = tensor_prefix_2d(&grid, &spec()).unwrap();

        let p1 = RadialProfile::sampled(nodes1.clone(), nodes1.iter().map(|&r| f1(r)).collect(), 0.0, 1.5)
            .unwrap();
        let p2 = RadialProfile::sampled(nodes2.clone(), nodes2.iter().map(|&r| f2(r)).collect(), 0.25, 1.75)
            .unwrap();
        let c1 = cumulative(&p1, 1, &spec()).unwrap();
        let c2 = cumulative(&p2, 2, &spec()).unwrap();

        for (j, k) in [(5, 7), (40, 33), (95, 79), (60, 10)] {
            let expected = c1.node_values()[j] * c2.node_values()[k];
            assert_rel(g.value(j, k), expected, 1e-8);
        }
    }

    #[test]
    fn indicator_grid_prefix_is_product_of_mins() {
        // Indicator of (0,1)^2 with n1 = n2 = 1, on a grid with a node at
        // exactly 1: G(s1, s2) = min(s1,1) min(s2,1) at the nodes.
        let nodes = log_grid(1e-4, 1e4, 129); // odd count puts 1.0 mid-grid
        let grid = TensorGridFunction::from_fn(nodes.clone(), nodes.clone(), 1, 1, |r1, r2| {
            if r1 < 1.0 && r2 < 1.0 {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let g = tensor_prefix_2d(&grid, &spec()).unwrap();
        // Sampled data cannot see inside the panel that straddles the jump:
        // agreement there is limited by the grid resolution (~7% here).
        for (j, k) in [(10, 64), (64, 64), (100, 20), (128, 128)] {
            let expected = nodes[j].min(1.0) * nodes[k].min(1.0);
            assert_rel(g.value(j, k), expected, 0.15);
        }
        // Strictly below the jump panel every panel is exact.
        for (j, k) in [(5, 30), (40, 63), (63, 63)] {
            assert_rel(g.value(j, k), nodes[j] * nodes[k], 1e-9);
        }
    }

    #[test]
    fn prefix_is_monotone_in_each_argument() {
        let nodes = log_grid(1e-3, 1e3, 48);
        let grid = TensorGridFunction::from_fn(nodes.clone(), nodes, 2, 1, |r1, r2| {
            (-(r1.ln().powi(2) + r2.ln().powi(2)) / 4.0).exp() * (1.0 + (r1 * r2).sin().abs())
        })
        .unwrap();
        let g = tensor_prefix_2d(&grid, &spec()).unwrap();
        for j in 1..48 {
            for k in 1..48 {
                assert!(g.value(j, k) >= g.value(j - 1, k) - 1e-12);
                assert!(g.value(j, k) >= g.value(j, k - 1) - 1e-12);
            }
        }
    }

    #[test]
    fn grid_csv_has_full_matrix() {
        let nodes = log_grid(0.5, 2.0, 3);
        let grid =
            TensorGridFunction::from_fn(nodes.clone(), nodes, 1, 2, |r1, r2| r1 + r2).unwrap();
        let mut buf = Vec::new();
        grid.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("r1,r2,value"));
        assert_eq!(text.lines().count(), 1 + 9);
    }

    #[test]
    fn grid_construction_errors() {
        assert!(TensorGridFunction::new(vec![1.0], vec![1.0, 2.0], vec![0.0; 2], 1, 1).is_err());
        assert!(
            TensorGridFunction::new(vec![1.0, 2.0], vec![1.0, 2.0], vec![0.0; 3], 1, 1).is_err()
        );
        assert!(TensorGridFunction::new(
            vec![2.0, 1.0],
            vec![1.0, 2.0],
            vec![0.0; 4],
            1,
            1
        )
        .is_err());
        assert!(TensorGridFunction::new(
            vec![1.0, 2.0],
            vec![1.0, 2.0],
            vec![0.0, 1.0, -0.5, 2.0],
            1,
            1
        )
        .is_err());
    }
}
