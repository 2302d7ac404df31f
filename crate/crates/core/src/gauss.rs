//! Gauss–Legendre rules on the unit interval.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights mapped to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// `order`-point rule, exact for polynomials of degree `2 order - 1`.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss rule needs at least one point");
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let n = order as f64;
        for k in 0..order.div_ceil(2) {
            // Newton iteration on P_n from the Chebyshev-like initial guess
            let mut x = (PI * (k as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(order, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // map [-1, 1] -> [0, 1]
            nodes[k] = 0.5 * (1.0 - x);
            nodes[order - 1 - k] = 0.5 * (1.0 + x);
            weights[k] = 0.5 * w;
            weights[order - 1 - k] = 0.5 * w;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// `∫_lo^hi f`.
    pub fn integrate(&self, lo: f64, hi: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let len = hi - lo;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(lo + len * t))
            .sum::<f64>()
            * len
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
