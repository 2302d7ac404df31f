//! Normalized Gagliardo energy `J_{s,p}`, the pairing `⟨(-Δ_p)^s u, v⟩`
//! and its nodal gradient for piecewise-linear functions on a uniform mesh.
//!
//! With `u = 0` outside `Ω = (a, b)`,
//!
//! ```text
//! [u]^p = K ( ∬_{Ω×Ω} |u(x)-u(y)|^p |x-y|^{-1-sp} + 2 ∫_Ω |u|^p τ_s )
//! τ_s(x) = ((b-x)^{-sp} + (x-a)^{-sp}) / (sp)
//! ```
//!
//! and `J_{s,p}(u) = [u]^p / p`. The pairing is the Fréchet derivative of
//! `J_{s,p}`, so `⟨(-Δ_p)^s u, u⟩ = p J_{s,p}(u)`.
//!
//! Element pairs are treated by class:
//!
//! - coincident: `u` is linear on the element, so the integrand is
//!   `|σ|^p |x-y|^{p-1-sp}` and integrates in closed form;
//! - adjacent: in the coordinates `α = x_m - x`, `β = y - x_m` around the
//!   shared node the integrand is homogeneous of degree `p-1-sp`; splitting
//!   the square along its diagonal and substituting `β = αt` (resp.
//!   `α = βt`) factors the radial part out exactly, leaving a smooth 1D
//!   integral in `t` that is split where `u(x)-u(y)` changes sign;
//! - separated: tensor Gauss rules, order 8 up to offset
//!   [`NEAR_OFFSET`], order 4 beyond.
//!
//! The exterior tail is integrated analytically in `y`; in `x` the
//! singular part of `τ_s` on the two boundary elements is integrated in
//! closed form against the linear `u`, the rest with a 16-point rule.

use crate::error::{Error, Result};
use crate::gauss::GaussRule;
use crate::kernel::{gagliardo_scale, KernelParams};
use crate::mesh::{abs_pow, linear_power_points, signed_pow, DiscreteFunction, Mesh1D};

/// Largest element offset integrated with the 8-point tensor rule.
pub const NEAR_OFFSET: usize = 4;

const NEAR_ORDER: usize = 8;
const FAR_ORDER: usize = 4;
const ADJACENT_ORDER: usize = 8;
const TAIL_ORDER: usize = 16;

/// Number of unordered element pairs of each class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCounts {
    pub coincident: usize,
    pub adjacent: usize,
    pub separated: usize,
}

#[derive(Debug, Clone)]
struct PairTable {
    order: usize,
    /// `h² w_a w_b |x_a - y_b|^{-1-sp}` for `x` in element `e`, `y` in `e + k`.
    weights: Vec<f64>,
}

/// Geometry-dependent quadrature data for one `(mesh, s, p)`.
#[derive(Debug, Clone)]
pub struct GagliardoQuadrature {
    mesh: Mesh1D,
    s: f64,
    p: f64,
    scale: f64,
    coincident_factor: f64,
    adjacent_factor: f64,
    boundary_factor: f64,
    adjacent_rule: GaussRule,
    near_rule: GaussRule,
    far_rule: GaussRule,
    tail_rule: GaussRule,
    /// Indexed by `offset - 2`.
    separated: Vec<PairTable>,
    /// `w h τ̃_s(x)` per element and tail point, where `τ̃_s` omits the
    /// singular term handled in closed form on the boundary elements.
    tail_weights: Vec<f64>,
}

impl GagliardoQuadrature {
    pub fn new(mesh: Mesh1D, s: f64, p: f64) -> Result<Self> {
        let scale = gagliardo_scale(KernelParams::new(1, s, p)?)?;
        let h = mesh.h();
        let sp = s * p;
        // exponent of the radial integral on coincident and adjacent pairs
        let beta = p - sp + 1.0;
        let coincident_factor = 2.0 * h.powf(beta) / ((p - sp) * beta);
        let adjacent_factor = h.powf(beta) / beta;
        let boundary_factor = h.powf(1.0 - sp) / (sp * beta);

        let near_rule = GaussRule::new(NEAR_ORDER);
        let far_rule = GaussRule::new(FAR_ORDER);
        let n = mesh.num_elements();
        let separated = (2..n)
            .map(|k| {
                let rule = if k <= NEAR_OFFSET { &near_rule } else { &far_rule };
                let order = rule.order();
                let mut weights = Vec::with_capacity(order * order);
                for (xa, wa) in rule.nodes.iter().zip(&rule.weights) {
                    for (yb, wb) in rule.nodes.iter().zip(&rule.weights) {
                        let dist = h * (k as f64 + yb - xa);
                        weights.push(h * h * wa * wb * dist.powf(-1.0 - sp));
                    }
                }
                PairTable { order, weights }
            })
            .collect();

        let tail_rule = GaussRule::new(TAIL_ORDER);
        let mut tail_weights = Vec::with_capacity(n * TAIL_ORDER);
        for e in 0..n {
            for (&t, &w) in tail_rule.nodes.iter().zip(&tail_rule.weights) {
                let x = mesh.node(e) + h * t;
                tail_weights.push(w * h * regular_tail(&mesh, e, x, sp));
            }
        }

        Ok(Self {
            mesh,
            s,
            p,
            scale,
            coincident_factor,
            adjacent_factor,
            boundary_factor,
            adjacent_rule: GaussRule::new(ADJACENT_ORDER),
            near_rule,
            far_rule,
            tail_rule,
            separated,
            tail_weights,
        })
    }

    pub fn mesh(&self) -> &Mesh1D {
        &self.mesh
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `K(1, s, p)`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn pair_counts(&self) -> PairCounts {
        let n = self.mesh.num_elements();
        PairCounts {
            coincident: n,
            adjacent: n - 1,
            separated: (n - 1) * (n - 2) / 2,
        }
    }

    /// `τ_s(x)`, the exterior weight `∫_{ℝ∖Ω} |x-y|^{-1-sp} dy` for `x ∈ Ω`.
    pub fn exterior_weight(&self, x: f64) -> f64 {
        let sp = self.s * self.p;
        ((self.mesh.b() - x).powf(-sp) + (x - self.mesh.a()).powf(-sp)) / sp
    }

    /// `J_{s,p}(u) = [u]_{s,p}^p / p`.
    pub fn gagliardo_energy(&self, u: &DiscreteFunction) -> Result<f64> {
        self.check(u)?;
        Ok(self.energy_unchecked(u))
    }

    pub(crate) fn energy_unchecked(&self, u: &DiscreteFunction) -> f64 {
        let values = u.nodal_values();
        self.scale * self.raw_energy(&values) / self.p
    }

    /// `⟨(-Δ_p)^s u, v⟩`.
    pub fn nonlocal_pairing(&self, u: &DiscreteFunction, v: &DiscreteFunction) -> Result<f64> {
        self.check(u)?;
        self.check(v)?;
        let uv = u.nodal_values();
        let vv = v.nodal_values();
        Ok(self.scale * self.raw_pairing(&uv, &vv))
    }

    /// Entry `i` is `⟨(-Δ_p)^s u, φ_i⟩` for the hat of interior node `i + 1`.
    pub fn nonlocal_gradient(&self, u: &DiscreteFunction) -> Result<Vec<f64>> {
        self.check(u)?;
        Ok(self.gradient_unchecked(u))
    }

    pub(crate) fn gradient_unchecked(&self, u: &DiscreteFunction) -> Vec<f64> {
        let values = u.nodal_values();
        let nodal = self.raw_gradient(&values);
        nodal[1..nodal.len() - 1].iter().map(|g| self.scale * g).collect()
    }

    fn check(&self, u: &DiscreteFunction) -> Result<()> {
        if *u.mesh() != self.mesh {
            return Err(Error::MeshMismatch);
        }
        Ok(())
    }

    fn slopes(&self, values: &[f64]) -> Vec<f64> {
        let h = self.mesh.h();
        values.windows(2).map(|w| (w[1] - w[0]) / h).collect()
    }

    /// Values of `u` at the points of `rule` in every element.
    fn point_values(values: &[f64], rule: &GaussRule) -> Vec<f64> {
        let mut out = Vec::with_capacity((values.len() - 1) * rule.order());
        for w in values.windows(2) {
            for &t in &rule.nodes {
                out.push(w[0] + (w[1] - w[0]) * t);
            }
        }
        out
    }

    /// Points `(t, w (1+t)^{-1-sp})` for `∫_0^1 |a + bt|^p ... dt`.
    fn adjacent_points(&self, a: f64, b: f64, mut f: impl FnMut(f64, f64)) {
        let sp = self.s * self.p;
        linear_power_points(a, a + b, self.p, &self.adjacent_rule, |t, w| f(t, w * (1.0 + t).powf(-1.0 - sp)));
    }

    /// `∫_0^1 |a + bt|^p (1+t)^{-1-sp} dt`
    fn adjacent_energy(&self, a: f64, b: f64) -> f64 {
        let mut sum = 0.0;
        self.adjacent_points(a, b, |t, w| sum += w * abs_pow(a + b * t, self.p));
        sum
    }

    /// `(∫_0^1 φ(a+bt) w dt, ∫_0^1 φ(a+bt) t w dt)` with `φ(z) = |z|^{p-2} z`.
    fn adjacent_moments(&self, a: f64, b: f64) -> (f64, f64) {
        let (mut m0, mut m1) = (0.0, 0.0);
        self.adjacent_points(a, b, |t, w| {
            let g = w * signed_pow(a + b * t, self.p);
            m0 += g;
            m1 += g * t;
        });
        (m0, m1)
    }

    /// Tail points `(ξ, weight)` of element `e`, the weight including
    /// `h τ̃_s(x)`. Precomputed weights serve elements where `u` keeps a
    /// strict sign.
    fn tail_points(&self, e: usize, u0: f64, u1: f64, mut f: impl FnMut(f64, f64)) {
        if u0 * u1 > 0.0 || (self.p % 2.0 == 0.0 && (u0 != 0.0 || u1 != 0.0)) {
            let ws = &self.tail_weights[e * TAIL_ORDER..(e + 1) * TAIL_ORDER];
            for (&t, &w) in self.tail_rule.nodes.iter().zip(ws) {
                f(t, w);
            }
            return;
        }
        let h = self.mesh.h();
        let sp = self.s * self.p;
        let x0 = self.mesh.node(e);
        linear_power_points(u0, u1, self.p, &self.tail_rule, |xi, w| {
            f(xi, w * h * regular_tail(&self.mesh, e, x0 + h * xi, sp))
        });
    }

    /// `∬_{Ω×Ω} |u(x)-u(y)|^p k + 2 ∫_Ω |u|^p τ_s`, i.e. `[u]^p / K`.
    fn raw_energy(&self, values: &[f64]) -> f64 {
        let p = self.p;
        let n = self.mesh.num_elements();
        let slopes = self.slopes(values);

        let mut local = 0.0;
        for e in 0..n {
            local += self.coincident_factor * abs_pow(slopes[e], p);
        }
        let mut adjacent = 0.0;
        for e in 0..n - 1 {
            let (a, b) = (slopes[e], slopes[e + 1]);
            if a == 0.0 && b == 0.0 {
                continue;
            }
            adjacent += self.adjacent_energy(a, b) + self.adjacent_energy(b, a);
        }
        let separated = self.separated_energy(values);

        let mut tail = 0.0;
        for e in 0..n {
            let (u0, u1) = (values[e], values[e + 1]);
            if u0 == 0.0 && u1 == 0.0 {
                continue;
            }
            self.tail_points(e, u0, u1, |xi, w| tail += w * abs_pow(u0 + (u1 - u0) * xi, p));
        }
        tail += self.boundary_factor * (abs_pow(values[1], p) + abs_pow(values[n - 1], p));

        local + 2.0 * self.adjacent_factor * adjacent + 2.0 * separated + 2.0 * tail
    }

    /// `⟨(-Δ_p)^s u, v⟩ / K`.
    fn raw_pairing(&self, uv: &[f64], vv: &[f64]) -> f64 {
        let p = self.p;
        let n = self.mesh.num_elements();
        let su = self.slopes(uv);
        let sv = self.slopes(vv);

        let mut local = 0.0;
        for e in 0..n {
            local += self.coincident_factor * signed_pow(su[e], p) * sv[e];
        }
        let mut adjacent = 0.0;
        for e in 0..n - 1 {
            let (a, b) = (su[e], su[e + 1]);
            let (c, d) = (sv[e], sv[e + 1]);
            let (m0, m1) = self.adjacent_moments(a, b);
            let (r0, r1) = self.adjacent_moments(b, a);
            adjacent += m0 * c + m1 * d + r0 * d + r1 * c;
        }

        let separated = self.separated_pairing(uv, vv);

        let mut tail = 0.0;
        for e in 0..n {
            let (u0, u1) = (uv[e], uv[e + 1]);
            let (v0, v1) = (vv[e], vv[e + 1]);
            if (u0 == 0.0 && u1 == 0.0) || (v0 == 0.0 && v1 == 0.0) {
                continue;
            }
            self.tail_points(e, u0, u1, |xi, w| {
                tail += w * signed_pow(u0 + (u1 - u0) * xi, p) * (v0 + (v1 - v0) * xi)
            });
        }
        tail += self.boundary_factor
            * (signed_pow(uv[1], p) * vv[1] + signed_pow(uv[n - 1], p) * vv[n - 1]);

        local + 2.0 * self.adjacent_factor * adjacent + 2.0 * separated + 2.0 * tail
    }

    /// `Σ_{e<f separated} Σ_{a,b} W |u(x_a) - u(y_b)|^p`.
    fn separated_energy(&self, values: &[f64]) -> f64 {
        let p = self.p;
        let mut total = 0.0;
        self.for_each_separated(values, |table, ue, uf| {
            let o = table.order;
            let mut acc = 0.0;
            for a in 0..o {
                let wrow = &table.weights[a * o..(a + 1) * o];
                for b in 0..o {
                    acc += wrow[b] * abs_pow(ue[a] - uf[b], p);
                }
            }
            total += acc;
        });
        total
    }

    /// `Σ_{e<f separated} Σ_{a,b} W φ(u(x_a) - u(y_b)) (v(x_a) - v(y_b))`.
    fn separated_pairing(&self, uv: &[f64], vv: &[f64]) -> f64 {
        let p = self.p;
        let n = self.mesh.num_elements();
        let near_v = Self::point_values(vv, &self.near_rule);
        let far_v = Self::point_values(vv, &self.far_rule);
        let near_u = Self::point_values(uv, &self.near_rule);
        let far_u = Self::point_values(uv, &self.far_rule);
        let mut total = 0.0;
        for e in 0..n {
            for k in 2..n - e {
                let f = e + k;
                let table = &self.separated[k - 2];
                let o = table.order;
                let (pu, pv) = if o == NEAR_ORDER { (&near_u, &near_v) } else { (&far_u, &far_v) };
                for a in 0..o {
                    let wrow = &table.weights[a * o..(a + 1) * o];
                    for b in 0..o {
                        let du = pu[e * o + a] - pu[f * o + b];
                        let dv = pv[e * o + a] - pv[f * o + b];
                        total += wrow[b] * signed_pow(du, p) * dv;
                    }
                }
            }
        }
        total
    }

    /// Calls `visit(table, u at points of e, u at points of f)` for every
    /// separated pair `e < f` on which `u` does not vanish identically.
    fn for_each_separated(&self, values: &[f64], mut visit: impl FnMut(&PairTable, &[f64], &[f64])) {
        let n = self.mesh.num_elements();
        let near = Self::point_values(values, &self.near_rule);
        let far = Self::point_values(values, &self.far_rule);
        let zero: Vec<bool> = values.windows(2).map(|w| w[0] == 0.0 && w[1] == 0.0).collect();
        for e in 0..n {
            for k in 2..n - e {
                let f = e + k;
                if zero[e] && zero[f] {
                    continue;
                }
                let table = &self.separated[k - 2];
                let o = table.order;
                let pts = if o == NEAR_ORDER { &near } else { &far };
                visit(table, &pts[e * o..(e + 1) * o], &pts[f * o..(f + 1) * o]);
            }
        }
    }

    /// Nodal gradient of `[u]^p / (pK)` including the boundary nodes.
    fn raw_gradient(&self, values: &[f64]) -> Vec<f64> {
        let p = self.p;
        let n = self.mesh.num_elements();
        let h = self.mesh.h();
        let slopes = self.slopes(values);
        let mut nodal = vec![0.0; n + 1];

        // slope duals: coefficient of each element slope of the test function
        let mut slope_dual = vec![0.0; n];
        for e in 0..n {
            slope_dual[e] += self.coincident_factor * signed_pow(slopes[e], p);
        }
        for e in 0..n - 1 {
            let (a, b) = (slopes[e], slopes[e + 1]);
            if a == 0.0 && b == 0.0 {
                continue;
            }
            let (m0, m1) = self.adjacent_moments(a, b);
            let (r0, r1) = self.adjacent_moments(b, a);
            let c = 2.0 * self.adjacent_factor;
            slope_dual[e] += c * (m0 + r1);
            slope_dual[e + 1] += c * (m1 + r0);
        }
        for e in 0..n {
            nodal[e + 1] += slope_dual[e] / h;
            nodal[e] -= slope_dual[e] / h;
        }

        // separated pairs: duals of point values
        let near = Self::point_values(values, &self.near_rule);
        let far = Self::point_values(values, &self.far_rule);
        let mut near_dual = vec![0.0; near.len()];
        let mut far_dual = vec![0.0; far.len()];
        let zero: Vec<bool> = values.windows(2).map(|w| w[0] == 0.0 && w[1] == 0.0).collect();
        for e in 0..n {
            for k in 2..n - e {
                let f = e + k;
                if zero[e] && zero[f] {
                    continue;
                }
                let table = &self.separated[k - 2];
                let o = table.order;
                let (pts, dual) = if o == NEAR_ORDER {
                    (&near, &mut near_dual)
                } else {
                    (&far, &mut far_dual)
                };
                for a in 0..o {
                    let ua = pts[e * o + a];
                    let wrow = &table.weights[a * o..(a + 1) * o];
                    let mut acc = 0.0;
                    for b in 0..o {
                        let g = 2.0 * wrow[b] * signed_pow(ua - pts[f * o + b], p);
                        acc += g;
                        dual[f * o + b] -= g;
                    }
                    dual[e * o + a] += acc;
                }
            }
        }
        for (pts_dual, rule) in [(&near_dual, &self.near_rule), (&far_dual, &self.far_rule)] {
            let o = rule.order();
            for e in 0..n {
                for (a, &t) in rule.nodes.iter().enumerate() {
                    let d = pts_dual[e * o + a];
                    nodal[e] += d * (1.0 - t);
                    nodal[e + 1] += d * t;
                }
            }
        }

        // exterior tail
        for e in 0..n {
            let (u0, u1) = (values[e], values[e + 1]);
            if u0 == 0.0 && u1 == 0.0 {
                continue;
            }
            let (mut left, mut right) = (0.0, 0.0);
            self.tail_points(e, u0, u1, |xi, w| {
                let g = 2.0 * w * signed_pow(u0 + (u1 - u0) * xi, p);
                left += g * (1.0 - xi);
                right += g * xi;
            });
            nodal[e] += left;
            nodal[e + 1] += right;
        }
        nodal[1] += 2.0 * self.boundary_factor * signed_pow(values[1], p);
        nodal[n - 1] += 2.0 * self.boundary_factor * signed_pow(values[n - 1], p);

        nodal
    }
}

/// `τ_s(x)` without the singular term of the boundary element `e` (the
/// left term on the first element, the right term on the last).
fn regular_tail(mesh: &Mesh1D, e: usize, x: f64, sp: f64) -> f64 {
    let n = mesh.num_elements();
    let left = if e == 0 { 0.0 } else { (x - mesh.a()).powf(-sp) };
    let right = if e == n - 1 { 0.0 } else { (mesh.b() - x).powf(-sp) };
    (left + right) / sp
}
