//! Ground states of `(-Δ_p)^s u + V |u|^{p-2} u = f(u)` in `Ω`, `u = 0`
//! outside, for the pure power `f(z) = |z|^{q-2} z`.
//!
//! With `‖u‖_s^p = [u]_{s,p}^p + ∫ V |u|^p` the level of the Nehari
//! manifold is `c_s = (1/p - 1/q) R^{q/(q-p)}`, where `R` is the minimum of
//! `‖u‖_s^p / ‖u‖_q^p`. The quotient is minimized on the unit sphere of
//! `L^q` and the minimizer is scaled onto the Nehari manifold.

use std::fmt;
use std::sync::Arc;

use crate::descent::{minimize, HomogeneousQuotient};
use crate::eigen::EigenConfig;
use crate::error::{Error, Result};
use crate::form::EnergyForm;
use crate::mesh::{integrate_composed, lp_power, power_dual, weighted_lp_power, DiscreteFunction, Mesh1D, SobolevLimits};

/// Nonnegative potential `V` on `Ω`.
#[derive(Clone)]
pub enum Potential {
    Zero,
    Constant(f64),
    /// `Σ_k c_k x^k`.
    Polynomial(Vec<f64>),
    Function(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Potential {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Constant(c) => *c,
            Potential::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck),
            Potential::Function(f) => f(x),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Potential::Zero => true,
            Potential::Constant(c) => *c == 0.0,
            Potential::Polynomial(c) => c.iter().all(|&ck| ck == 0.0),
            Potential::Function(_) => false,
        }
    }
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::Zero => write!(f, "Zero"),
            Potential::Constant(c) => write!(f, "Constant({c})"),
            Potential::Polynomial(c) => write!(f, "Polynomial({c:?})"),
            Potential::Function(_) => write!(f, "Function(..)"),
        }
    }
}

/// A nonlinearity `f(z)` with `f(z)/|z|^{p-1}` strictly increasing in `|z|`.
pub trait Nonlinearity {
    fn value(&self, z: f64) -> f64;

    /// `F(z) = ∫_0^z f`.
    fn primitive(&self, z: f64) -> f64;

    /// Power that governs the quadrature near zeros of `u`.
    fn growth_exponent(&self) -> f64;
}

/// `f(z) = |z|^{q-2} z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurePower {
    pub q: f64,
}

impl Nonlinearity for PurePower {
    fn value(&self, z: f64) -> f64 {
        z.abs().powf(self.q - 1.0).copysign(z)
    }

    fn primitive(&self, z: f64) -> f64 {
        z.abs().powf(self.q) / self.q
    }

    fn growth_exponent(&self) -> f64 {
        self.q
    }
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub p: f64,
    pub q: f64,
    pub potential: Potential,
}

impl Problem {
    pub fn new(p: f64, q: f64, potential: Potential) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::domain(format!("exponent p = {p} must be a finite real > 1")));
        }
        if !(q > p && q.is_finite()) {
            return Err(Error::domain(format!("exponent q = {q} must be finite and exceed p = {p}")));
        }
        if let Potential::Constant(c) = potential {
            if !(c >= 0.0 && c.is_finite()) {
                return Err(Error::domain(format!("potential V = {c} must be finite and >= 0")));
            }
        }
        Ok(Self { p, q, potential })
    }

    /// Ambrosetti–Rabinowitz exponent; `μ F = z f` holds with `μ = q`.
    pub fn mu(&self) -> f64 {
        self.q
    }

    pub fn nonlinearity(&self) -> PurePower {
        PurePower { q: self.q }
    }

    /// Checks `q < p*_s`.
    pub fn validate_for(&self, s: f64) -> Result<()> {
        let critical = SobolevLimits::new(self.p).critical_exponent(s);
        if self.q >= critical {
            return Err(Error::domain(format!(
                "q = {} is not below the critical exponent {critical} for s = {s}",
                self.q
            )));
        }
        Ok(())
    }
}

struct Schrodinger<'a> {
    form: EnergyForm,
    problem: &'a Problem,
}

impl<'a> Schrodinger<'a> {
    fn new(mesh: Mesh1D, s: f64, problem: &'a Problem) -> Result<Self> {
        problem.validate_for(s)?;
        Ok(Self {
            form: EnergyForm::new(mesh, s, problem.p)?,
            problem,
        })
    }

    fn check(&self, u: &DiscreteFunction) -> Result<()> {
        if u.mesh() != self.form.mesh() {
            return Err(Error::MeshMismatch);
        }
        Ok(())
    }

    fn potential_power(&self, u: &DiscreteFunction) -> Result<f64> {
        if self.problem.potential.is_zero() {
            return Ok(0.0);
        }
        weighted_lp_power(u, self.problem.p, |x| self.problem.potential.eval(x))
    }

    /// `‖u‖_s^p`
    fn norm_power(&self, u: &DiscreteFunction) -> Result<f64> {
        Ok(self.form.seminorm_power(u)? + self.potential_power(u)?)
    }

    /// `∇(‖u‖_s^p) / p`
    fn norm_gradient(&self, u: &DiscreteFunction) -> Result<Vec<f64>> {
        let mut g = self.form.gradient(u)?;
        if !self.problem.potential.is_zero() {
            let v = power_dual(u, self.problem.p, |x| self.problem.potential.eval(x));
            for (gi, vi) in g.iter_mut().zip(v) {
                *gi += vi;
            }
        }
        Ok(g)
    }

    fn nehari_time(&self, u: &DiscreteFunction) -> Result<f64> {
        self.check(u)?;
        if u.is_zero() {
            return Err(Error::ZeroFunction);
        }
        let (p, q) = (self.problem.p, self.problem.q);
        Ok((self.norm_power(u)? / lp_power(u, q)).powf(1.0 / (q - p)))
    }

    /// Relative sup norm of `⟨I'(u), φ_i⟩` over the basis.
    fn euler_lagrange_residual(&self, u: &DiscreteFunction) -> Result<f64> {
        let linear = self.norm_gradient(u)?;
        let nonlinear = power_dual(u, self.problem.q, |_| 1.0);
        let scale = linear.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let defect = linear.iter().zip(&nonlinear).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        Ok(if scale > 0.0 { defect / scale } else { 0.0 })
    }
}

impl HomogeneousQuotient for Schrodinger<'_> {
    fn mesh(&self) -> &Mesh1D {
        self.form.mesh()
    }

    fn degree(&self) -> f64 {
        self.problem.p
    }

    fn constraint_exponent(&self) -> f64 {
        self.problem.q
    }

    fn numerator(&self, u: &DiscreteFunction) -> f64 {
        self.norm_power(u).expect("potential checked before the descent")
    }

    fn numerator_gradient(&self, u: &DiscreteFunction) -> Vec<f64> {
        self.norm_gradient(u).expect("mesh checked by the solver")
    }
}

/// `‖u‖_s = ([u]_{s,p}^p + ∫ V |u|^p)^{1/p}`, with `‖u'‖_p^p` at `s = 1`.
pub fn schrodinger_norm(u: &DiscreteFunction, s: f64, problem: &Problem) -> Result<f64> {
    let sch = Schrodinger::new(*u.mesh(), s, problem)?;
    Ok(sch.norm_power(u)?.powf(1.0 / problem.p))
}

/// `I(u) = ‖u‖_s^p / p - ∫ F(u)`.
pub fn energy_i(u: &DiscreteFunction, s: f64, problem: &Problem) -> Result<f64> {
    let sch = Schrodinger::new(*u.mesh(), s, problem)?;
    let f = problem.nonlinearity();
    let nonlinear = integrate_composed(u, f.growth_exponent(), |z| f.primitive(z));
    Ok(sch.norm_power(u)? / problem.p - nonlinear)
}

/// The `t > 0` with `t u` on the Nehari manifold:
/// `(‖u‖_s^p / ‖u‖_q^q)^{1/(q-p)}`.
pub fn nehari_time(u: &DiscreteFunction, s: f64, problem: &Problem) -> Result<f64> {
    Schrodinger::new(*u.mesh(), s, problem)?.nehari_time(u)
}

/// Relative width at which [`nehari_time_bisection`] stops.
const BISECTION_TOLERANCE: f64 = 1e-13;

/// The `t > 0` with `⟨I'(t u), t u⟩ = t^p ‖u‖_s^p - ∫ f(t u) t u = 0`,
/// found by bisection in `log t` for a general nonlinearity.
pub fn nehari_time_bisection(
    u: &DiscreteFunction,
    s: f64,
    problem: &Problem,
    f: &dyn Nonlinearity,
) -> Result<f64> {
    let sch = Schrodinger::new(*u.mesh(), s, problem)?;
    if u.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let linear = sch.norm_power(u)?;
    let p = problem.p;
    // positive below the Nehari time, negative above; divided by t^p
    let defect = |t: f64| {
        let nonlinear = integrate_composed(u, f.growth_exponent(), |z| f.value(t * z) * t * z);
        linear - nonlinear / t.powf(p)
    };
    let (mut lo, mut hi) = (1.0, 1.0);
    let mut expansions = 0;
    while defect(lo) <= 0.0 {
        lo *= 0.5;
        expansions += 1;
        if expansions > 2000 {
            return Err(Error::domain("no sign change of the Nehari defect below t = 1"));
        }
    }
    while defect(hi) >= 0.0 {
        hi *= 2.0;
        expansions += 1;
        if expansions > 2000 {
            return Err(Error::domain("no sign change of the Nehari defect above t = 1"));
        }
    }
    while hi - lo > BISECTION_TOLERANCE * lo {
        let mid = (lo * hi).sqrt();
        if defect(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo * hi).sqrt())
}

#[derive(Debug, Clone)]
pub struct GroundStateResult {
    /// On the Nehari manifold, `∫ u ≥ 0`.
    pub u: DiscreteFunction,
    /// `c_s = I(u)`.
    pub level: f64,
    pub s: f64,
    /// `|‖u‖_s^p - ‖u‖_q^q| / ‖u‖_s^p`.
    pub nehari_residual: f64,
    /// `‖u‖_s`.
    pub vnorm: f64,
    /// Relative sup norm of `⟨I'(u), φ_i⟩`.
    pub residual: f64,
    pub iterations: usize,
    /// `‖u‖_s^p / ‖u‖_q^p` after each accepted step.
    pub history: Vec<f64>,
}

pub fn solve_ground_state(mesh: Mesh1D, s: f64, problem: &Problem, config: &EigenConfig) -> Result<GroundStateResult> {
    config.validate()?;
    let sch = Schrodinger::new(mesh, s, problem)?;
    let initial = config.initial_function(mesh)?;
    sch.potential_power(&initial)?;
    let outcome = minimize(&sch, &initial, &config.descent_options())?;

    let mut u = outcome.u;
    if u.integral() < 0.0 {
        u = u.scaled(-1.0);
    }
    let u = u.scaled(sch.nehari_time(&u)?);
    let norm_power = sch.norm_power(&u)?;
    let nehari_residual = (norm_power - lp_power(&u, problem.q)).abs() / norm_power;
    Ok(GroundStateResult {
        level: energy_i(&u, s, problem)?,
        s,
        nehari_residual,
        vnorm: norm_power.powf(1.0 / problem.p),
        residual: sch.euler_lagrange_residual(&u)?,
        iterations: outcome.iterations,
        history: outcome.history,
        u,
    })
}

/// `max_{t>0} I(t w) = (1/p - 1/q) (‖w‖_s^p / ‖w‖_q^p)^{q/(q-p)}`.
pub fn ray_maximum(w: &DiscreteFunction, s: f64, problem: &Problem) -> Result<f64> {
    let sch = Schrodinger::new(*w.mesh(), s, problem)?;
    if w.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let (p, q) = (problem.p, problem.q);
    let ratio = sch.norm_power(w)? / lp_power(w, q).powf(p / q);
    Ok((1.0 / p - 1.0 / q) * ratio.powf(q / (q - p)))
}
