//! Uniform meshes of `Ω = (a, b)` and continuous piecewise-linear functions
//! extended by zero outside `Ω`.

use std::fmt::Write as _;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::GaussRule;

/// Zero tolerance for boundary values in [`interpolate`].
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

/// Gauss order used for all element integrals of `|u|^p`.
pub const ELEMENT_GAUSS_ORDER: usize = 8;

pub(crate) fn element_rule() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| GaussRule::new(ELEMENT_GAUSS_ORDER))
}

/// `|z|^p`
#[inline]
pub(crate) fn abs_pow(z: f64, p: f64) -> f64 {
    if p == 2.0 {
        z * z
    } else {
        z.abs().powf(p)
    }
}

/// `|z|^{p-2} z`, continuous at zero for every `p > 1`.
#[inline]
pub(crate) fn signed_pow(z: f64, p: f64) -> f64 {
    if p == 2.0 {
        z
    } else {
        z.abs().powf(p - 1.0).copysign(z)
    }
}

/// Uniform partition of `(a, b)` into `num_elements` elements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mesh1D {
    a: f64,
    b: f64,
    num_elements: usize,
}

impl Mesh1D {
    pub fn new(a: f64, b: f64, num_elements: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::domain(format!("interval ({a}, {b}) must satisfy a < b")));
        }
        if num_elements < 2 {
            return Err(Error::domain("mesh needs at least two elements"));
        }
        Ok(Self { a, b, num_elements })
    }

    /// Mesh of the unit interval.
    pub fn unit(num_elements: usize) -> Result<Self> {
        Self::new(0.0, 1.0, num_elements)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn num_elements(&self) -> usize {
        self.num_elements
    }

    pub fn num_interior(&self) -> usize {
        self.num_elements - 1
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / self.num_elements as f64
    }

    /// Coordinate of node `i`, `0 ≤ i ≤ num_elements`.
    pub fn node(&self, i: usize) -> f64 {
        if i == self.num_elements {
            self.b
        } else {
            self.a + i as f64 * self.h()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.num_elements).map(|i| self.node(i)).collect()
    }
}

/// Piecewise-linear function on a [`Mesh1D`], zero at `a`, `b` and outside.
///
/// `coefficients[i]` is the value at interior node `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteFunction {
    mesh: Mesh1D,
    coefficients: Vec<f64>,
}

impl DiscreteFunction {
    pub fn new(mesh: Mesh1D, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() != mesh.num_interior() {
            return Err(Error::domain(format!(
                "expected {} interior coefficients, got {}",
                mesh.num_interior(),
                coefficients.len()
            )));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::domain("coefficients must be finite"));
        }
        Ok(Self { mesh, coefficients })
    }

    pub(crate) fn from_parts(mesh: Mesh1D, coefficients: Vec<f64>) -> Self {
        debug_assert_eq!(coefficients.len(), mesh.num_interior());
        Self { mesh, coefficients }
    }

    pub fn zeros(mesh: Mesh1D) -> Self {
        Self::from_parts(mesh, vec![0.0; mesh.num_interior()])
    }

    /// Hat function of interior node `node` (`1 ≤ node ≤ num_elements - 1`).
    pub fn hat(mesh: Mesh1D, node: usize) -> Result<Self> {
        if node == 0 || node >= mesh.num_elements() {
            return Err(Error::domain(format!("node {node} is not an interior node")));
        }
        let mut coefficients = vec![0.0; mesh.num_interior()];
        coefficients[node - 1] = 1.0;
        Ok(Self::from_parts(mesh, coefficients))
    }

    pub fn mesh(&self) -> &Mesh1D {
        &self.mesh
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn into_coefficients(self) -> Vec<f64> {
        self.coefficients
    }

    /// Values at all `num_elements + 1` nodes, boundary zeros included.
    pub fn nodal_values(&self) -> Vec<f64> {
        let mut values = Vec::with_capacity(self.coefficients.len() + 2);
        values.push(0.0);
        values.extend_from_slice(&self.coefficients);
        values.push(0.0);
        values
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|&c| c == 0.0)
    }

    /// Point evaluation; zero outside `(a, b)`.
    pub fn eval(&self, x: f64) -> f64 {
        let m = &self.mesh;
        if x <= m.a() || x >= m.b() {
            return 0.0;
        }
        let t = (x - m.a()) / m.h();
        let e = (t.floor() as usize).min(m.num_elements() - 1);
        let xi = t - e as f64;
        let v = |i: usize| {
            if i == 0 || i == m.num_elements() {
                0.0
            } else {
                self.coefficients[i - 1]
            }
        };
        v(e) * (1.0 - xi) + v(e + 1) * xi
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self::from_parts(self.mesh, self.coefficients.iter().map(|c| t * c).collect())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x - y)
    }

    /// `self + t·other`.
    pub fn axpy(&self, t: f64, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x + t * y)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        check_same_mesh(self, other)?;
        let coefficients = self
            .coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(&x, &y)| f(x, y))
            .collect();
        Ok(Self::from_parts(self.mesh, coefficients))
    }

    /// `∫_Ω u dx`, exact for piecewise-linear `u`.
    pub fn integral(&self) -> f64 {
        self.mesh.h() * self.coefficients.iter().sum::<f64>()
    }

    /// CSV rows `x,value` over all nodes, boundary nodes included.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,value\n");
        for (i, v) in self.nodal_values().iter().enumerate() {
            let _ = writeln!(out, "{:.16e},{:.16e}", self.mesh.node(i), v);
        }
        out
    }
}

pub(crate) fn check_same_mesh(u: &DiscreteFunction, v: &DiscreteFunction) -> Result<()> {
    if u.mesh != v.mesh {
        return Err(Error::MeshMismatch);
    }
    Ok(())
}

/// Nodal interpolant of `f`; `f` must vanish at both endpoints.
pub fn interpolate(f: impl Fn(f64) -> f64, mesh: Mesh1D) -> Result<DiscreteFunction> {
    for x in [mesh.a(), mesh.b()] {
        let fx = f(x);
        if !(fx.abs() <= BOUNDARY_TOLERANCE) {
            return Err(Error::domain(format!(
                "f({x}) = {fx} violates the zero exterior condition"
            )));
        }
    }
    let coefficients: Vec<f64> = (1..mesh.num_elements()).map(|i| f(mesh.node(i))).collect();
    DiscreteFunction::new(mesh, coefficients)
}

/// Critical Sobolev exponents `p*_s = np / (n - sp)` (or `+∞` when `sp ≥ n`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevLimits {
    pub n: usize,
    pub p: f64,
}

impl SobolevLimits {
    pub fn new(p: f64) -> Self {
        Self { n: 1, p }
    }

    pub fn critical_exponent(&self, s: f64) -> f64 {
        let n = self.n as f64;
        if s * self.p < n {
            n * self.p / (n - s * self.p)
        } else {
            f64::INFINITY
        }
    }
}

/// Quadrature points `(ξ, w)` on `[0, 1]` for integrands `|ℓ(ξ)|^p g(ξ)`
/// with `ℓ` linear, `ℓ(0) = u0`, `ℓ(1) = u1`.
///
/// The interval is split where `ℓ` changes sign, and each piece is graded
/// quadratically (`ξ = t²`) towards the zero of `ℓ`, which turns `ξ^p` into
/// `2 t^{2p+1}`. Without a sign change the rule is graded towards the
/// endpoint nearer the zero, so the points vary continuously with
/// `(u0, u1)` as the zero enters or leaves the interval.
/// Nothing is emitted when `ℓ ≡ 0`. For even integer `p` the integrand
/// is a polynomial and the plain rule is used throughout.
#[inline]
pub(crate) fn linear_power_points(u0: f64, u1: f64, p: f64, rule: &GaussRule, mut f: impl FnMut(f64, f64)) {
    let graded = |lo: f64, hi: f64, zero_at_lo: bool, f: &mut dyn FnMut(f64, f64)| {
        let len = hi - lo;
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            let t2 = t * t;
            let jac = 2.0 * t * w * len;
            if zero_at_lo {
                f(lo + len * t2, jac);
            } else {
                f(hi - len * t2, jac);
            }
        }
    };
    if u0 == 0.0 && u1 == 0.0 {
        return;
    }
    if p % 2.0 == 0.0 || u0 == u1 {
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            f(t, w);
        }
    } else if u0 * u1 < 0.0 {
        let xi0 = u0 / (u0 - u1);
        graded(0.0, xi0, false, &mut f);
        graded(xi0, 1.0, true, &mut f);
    } else {
        graded(0.0, 1.0, u0.abs() < u1.abs(), &mut f);
    }
}

/// `∫_Ω |u|^p w(x) dx` with the element rule.
pub(crate) fn integrate_abs_pow(u: &DiscreteFunction, p: f64, mut weight: impl FnMut(f64) -> f64) -> f64 {
    let mesh = u.mesh();
    let h = mesh.h();
    let values = u.nodal_values();
    let rule = element_rule();
    let mut total = 0.0;
    for e in 0..mesh.num_elements() {
        let (u0, u1) = (values[e], values[e + 1]);
        let x0 = mesh.node(e);
        let mut sum = 0.0;
        linear_power_points(u0, u1, p, rule, |xi, w| {
            sum += w * abs_pow(u0 + (u1 - u0) * xi, p) * weight(x0 + h * xi);
        });
        total += h * sum;
    }
    total
}

/// Entry `i` is `∫_Ω |u|^{p-2} u w φ_i dx` for the hat `φ_i` of interior node `i + 1`.
pub(crate) fn power_dual(u: &DiscreteFunction, p: f64, weight: impl Fn(f64) -> f64) -> Vec<f64> {
    let mesh = u.mesh();
    let h = mesh.h();
    let values = u.nodal_values();
    let rule = element_rule();
    let mut nodal = vec![0.0; values.len()];
    for e in 0..mesh.num_elements() {
        let (u0, u1) = (values[e], values[e + 1]);
        let x0 = mesh.node(e);
        let (mut left, mut right) = (0.0, 0.0);
        linear_power_points(u0, u1, p, rule, |xi, w| {
            let g = w * signed_pow(u0 + (u1 - u0) * xi, p) * weight(x0 + h * xi);
            left += g * (1.0 - xi);
            right += g * xi;
        });
        nodal[e] += h * left;
        nodal[e + 1] += h * right;
    }
    nodal[1..values.len() - 1].to_vec()
}

/// `∫_Ω |u|^p dx`.
pub fn lp_power(u: &DiscreteFunction, p: f64) -> f64 {
    integrate_abs_pow(u, p, |_| 1.0)
}

/// `‖u‖_{L^p(Ω)}`.
pub fn lp_norm(u: &DiscreteFunction, p: f64) -> f64 {
    lp_power(u, p).powf(1.0 / p)
}

/// `∫_Ω g(u(x)) dx` on the points used for `|u|^exponent`, so that
/// `g(z) = |z|^exponent` reproduces [`lp_power`].
pub(crate) fn integrate_composed(u: &DiscreteFunction, exponent: f64, mut g: impl FnMut(f64) -> f64) -> f64 {
    let values = u.nodal_values();
    let rule = element_rule();
    let mut total = 0.0;
    for e in 0..u.mesh().num_elements() {
        let (u0, u1) = (values[e], values[e + 1]);
        let mut sum = 0.0;
        linear_power_points(u0, u1, exponent, rule, |xi, w| sum += w * g(u0 + (u1 - u0) * xi));
        total += sum;
    }
    u.mesh().h() * total
}

/// `∫_Ω |u|^p V(x) dx` for a nonnegative potential `V`.
pub fn weighted_lp_power(u: &DiscreteFunction, p: f64, potential: impl Fn(f64) -> f64) -> Result<f64> {
    let mut negative = None;
    let value = integrate_abs_pow(u, p, |x| {
        let v = potential(x);
        if !(v >= 0.0 && v.is_finite()) && negative.is_none() {
            negative = Some((x, v));
        }
        v
    });
    match negative {
        Some((x, v)) => Err(Error::domain(format!("potential V({x}) = {v} must be finite and >= 0"))),
        None => Ok(value),
    }
}
