//! Minimization of `R(u) = A(u) / ‖u‖_r^p` over the discrete space, where
//! `A` is positively `p`-homogeneous. Iterates are kept on the unit sphere
//! of `L^r(Ω)`.
//!
//! Search directions are the residual `∇A/p - A·∇(‖u‖_r^r)/r` (the
//! Euclidean gradient of `R/p` at a normalized point) preconditioned by the
//! `P1` stiffness matrix, combined Polak–Ribière style with the previous
//! direction. The trial step comes from a secant on the directional
//! derivative and is accepted by Armijo backtracking on `R`, so the
//! quotient history is nonincreasing.
//!
//! Close to a minimizer the decrease `R(u + αd) - R(u)` falls below the
//! rounding noise of `R` itself. There the difference is obtained instead by
//! integrating the directional derivative `⟨∇R(u + td), d⟩` over `[0, α]`,
//! which does not cancel against `R`.

use crate::error::{Error, Result};
use crate::gauss::GaussRule;
use crate::mesh::{lp_norm, power_dual, DiscreteFunction, Mesh1D};

/// A `p`-homogeneous numerator together with its gradient.
pub trait HomogeneousQuotient {
    fn mesh(&self) -> &Mesh1D;

    /// Homogeneity degree of the numerator.
    fn degree(&self) -> f64;

    /// Exponent `r` of the `L^r` constraint.
    fn constraint_exponent(&self) -> f64;

    fn numerator(&self, u: &DiscreteFunction) -> f64;

    /// `∇A / p` in nodal coordinates.
    fn numerator_gradient(&self, u: &DiscreteFunction) -> Vec<f64>;

    fn quotient(&self, u: &DiscreteFunction) -> f64 {
        self.numerator(u) / lp_norm(u, self.constraint_exponent()).powf(self.degree())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentOptions {
    pub max_iterations: usize,
    pub step_tolerance: f64,
    pub residual_tolerance: f64,
    pub armijo_factor: f64,
    pub armijo_slope: f64,
}

#[derive(Debug, Clone)]
pub struct DescentOutcome {
    /// Minimizer, normalized with `‖u‖_r = 1`.
    pub u: DiscreteFunction,
    pub quotient: f64,
    /// `‖∇A/p - A m‖_∞ / ‖∇A/p‖_∞` at `u`.
    pub residual: f64,
    pub iterations: usize,
    /// Quotient after each accepted step, starting with the initial guess;
    /// entries past the initial one accumulate the accepted decreases.
    pub history: Vec<f64>,
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `T z = r` for the `P1` stiffness matrix `T = (1/h) tridiag(-1, 2, -1)`.
pub(crate) fn stiffness_solve(h: f64, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let (diag, off) = (2.0 / h, -1.0 / h);
    c[0] = off / diag;
    d[0] = rhs[0] / diag;
    for i in 1..n {
        let m = diag - off * c[i - 1];
        c[i] = off / m;
        d[i] = (rhs[i] - off * d[i - 1]) / m;
    }
    let mut z = vec![0.0; n];
    z[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        z[i] = d[i] - c[i] * z[i + 1];
    }
    z
}

/// Direct differences of `R` smaller than this (relative) are treated as noise.
const DIFFERENCE_NOISE: f64 = 1e-11;

/// Consecutive sub-tolerance steps after which the iteration is declared stagnant.
const STAGNATION_WINDOW: usize = 10;

/// Gauss order for integrating the directional derivative along a step.
const PATH_GAUSS_ORDER: usize = 3;

/// `⟨∇R(w), d⟩` at a point `w` not necessarily on the sphere.
fn directional_derivative<Q: HomogeneousQuotient + ?Sized>(problem: &Q, w: &DiscreteFunction, d: &[f64]) -> f64 {
    let (p, r) = (problem.degree(), problem.constraint_exponent());
    let b = lp_norm(w, r).powf(r);
    let ratio = problem.numerator(w) / b;
    let grad = problem.numerator_gradient(w);
    let mass = power_dual(w, r, |_| 1.0);
    let inner: f64 = grad.iter().zip(&mass).zip(d).map(|((g, m), di)| (g - ratio * m) * di).sum();
    p * inner / b.powf(p / r)
}

fn shifted(u: &DiscreteFunction, direction: &[f64], alpha: f64) -> DiscreteFunction {
    let c = u.coefficients().iter().zip(direction).map(|(c, d)| c + alpha * d).collect();
    DiscreteFunction::from_parts(*u.mesh(), c)
}

fn normalized(u: DiscreteFunction, r: f64) -> Result<DiscreteFunction> {
    let norm = lp_norm(&u, r);
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::ZeroFunction);
    }
    Ok(u.scaled(1.0 / norm))
}

struct Residual {
    vector: Vec<f64>,
    relative: f64,
}

fn residual<Q: HomogeneousQuotient + ?Sized>(problem: &Q, u: &DiscreteFunction, numerator: f64) -> Residual {
    let grad = problem.numerator_gradient(u);
    let mass = power_dual(u, problem.constraint_exponent(), |_| 1.0);
    let vector: Vec<f64> = grad.iter().zip(&mass).map(|(g, m)| g - numerator * m).collect();
    let scale = sup_norm(&grad);
    let relative = if scale > 0.0 { sup_norm(&vector) / scale } else { 0.0 };
    Residual { vector, relative }
}

/// Minimizes `problem.quotient` starting from `initial`.
///
/// Returns [`Error::NonConvergence`] carrying the best iterate when the
/// residual tolerance is not met within the iteration budget or when the
/// line search can no longer make progress, or after `STAGNATION_WINDOW`
/// consecutive steps shorter than the step tolerance.
pub fn minimize<Q: HomogeneousQuotient + ?Sized>(
    problem: &Q,
    initial: &DiscreteFunction,
    options: &DescentOptions,
) -> Result<DescentOutcome> {
    if initial.mesh() != problem.mesh() {
        return Err(Error::MeshMismatch);
    }
    let r = problem.constraint_exponent();
    let p = problem.degree();
    let h = problem.mesh().h();

    let mut u = normalized(initial.clone(), r)?;
    let mut value = problem.numerator(&u);
    let mut history = vec![value];
    let mut res = residual(problem, &u, value);
    let mut prev: Option<(Vec<f64>, Vec<f64>, Vec<f64>)> = None; // (direction, z, residual)
    let mut step = 1.0;
    let mut iterations = 0;
    let mut small_steps = 0;

    while res.relative > options.residual_tolerance && iterations < options.max_iterations {
        let z = stiffness_solve(h, &res.vector);
        let mut direction: Vec<f64> = z.iter().map(|x| -x).collect();
        if let Some((d_prev, z_prev, r_prev)) = &prev {
            let denom = dot(z_prev, r_prev);
            let diff: Vec<f64> = res.vector.iter().zip(r_prev).map(|(a, b)| a - b).collect();
            let beta = if denom > 0.0 { (dot(&z, &diff) / denom).max(0.0) } else { 0.0 };
            if beta > 0.0 {
                for (d, dp) in direction.iter_mut().zip(d_prev) {
                    *d += beta * dp;
                }
            }
        }
        let mut slope = p * dot(&res.vector, &direction);
        if slope >= 0.0 {
            direction = z.iter().map(|x| -x).collect();
            slope = p * dot(&res.vector, &direction);
        }

        let first = secant_step(problem, &u, &direction, slope, step);
        let accepted = line_search(problem, &u, value, &direction, slope, first, options)
            .or_else(|| {
                // retry along the preconditioned residual alone
                let steepest: Vec<f64> = z.iter().map(|x| -x).collect();
                let s = p * dot(&res.vector, &steepest);
                let found = line_search(problem, &u, value, &steepest, s, 1.0, options);
                if found.is_some() {
                    direction = steepest;
                }
                found
            });
        let Some((alpha, decrease, trial)) = accepted else {
            break;
        };

        let moved = alpha * sup_norm(&direction);
        // R is 0-homogeneous, so the accepted decrease carries over to the
        // normalized iterate
        u = normalized(trial, r)?;
        value += decrease;
        history.push(value);
        iterations += 1;
        step = alpha;

        let new_res = residual(problem, &u, problem.numerator(&u));
        prev = Some((direction, z, std::mem::replace(&mut res, new_res).vector));

        if moved <= options.step_tolerance * sup_norm(u.coefficients()) {
            small_steps += 1;
            if small_steps >= STAGNATION_WINDOW {
                break;
            }
        } else {
            small_steps = 0;
        }
    }

    let quotient = problem.numerator(&u);
    if res.relative <= options.residual_tolerance {
        Ok(DescentOutcome {
            u,
            quotient,
            residual: res.relative,
            iterations,
            history,
        })
    } else {
        Err(Error::NonConvergence {
            iterations,
            quotient,
            residual: res.relative,
            best: u.into_coefficients(),
        })
    }
}

/// Secant estimate of the minimizer of `R(u + αd)` from the directional
/// derivatives at `0` and `guess`, kept within a factor 10 of `guess`.
fn secant_step<Q: HomogeneousQuotient + ?Sized>(
    problem: &Q,
    u: &DiscreteFunction,
    direction: &[f64],
    slope: f64,
    guess: f64,
) -> f64 {
    let at_guess = directional_derivative(problem, &shifted(u, direction, guess), direction);
    if at_guess.is_finite() && at_guess > slope {
        (guess * slope / (slope - at_guess)).clamp(0.1 * guess, 10.0 * guess)
    } else {
        10.0 * guess
    }
}

/// Armijo backtracking from `initial_step`; returns the accepted step, the
/// change `R(trial) - R(u)` and the (unnormalized) trial point.
fn line_search<Q: HomogeneousQuotient + ?Sized>(
    problem: &Q,
    u: &DiscreteFunction,
    value: f64,
    direction: &[f64],
    slope: f64,
    initial_step: f64,
    options: &DescentOptions,
) -> Option<(f64, f64, DiscreteFunction)> {
    if !(slope < 0.0) {
        return None;
    }
    let path_rule = GaussRule::new(PATH_GAUSS_ORDER);
    let dir_norm = sup_norm(direction);
    let u_norm = sup_norm(u.coefficients());
    let mut alpha = initial_step;
    while alpha * dir_norm > 1e-3 * options.step_tolerance * u_norm {
        let trial = shifted(u, direction, alpha);
        let q = problem.quotient(&trial);
        if q.is_finite() {
            let mut change = q - value;
            if change.abs() <= DIFFERENCE_NOISE * value.abs() {
                change = path_rule.integrate(0.0, alpha, |t| {
                    directional_derivative(problem, &shifted(u, direction, t), direction)
                });
            }
            if change <= options.armijo_slope * alpha * slope {
                return Some((alpha, change, trial));
            }
        }
        alpha *= options.armijo_factor;
    }
    None
}
