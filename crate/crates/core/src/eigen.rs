//! First eigenpair of `(-Δ_p)^s u = λ |u|^{p-2} u` in `Ω` with `u = 0`
//! outside, as the minimum of the Rayleigh quotient `[u]_{s,p}^p / ‖u‖_p^p`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::descent::{minimize, DescentOptions, HomogeneousQuotient};
use crate::error::{Error, Result};
use crate::form::EnergyForm;
use crate::mesh::{interpolate, lp_power, DiscreteFunction, Mesh1D};

#[derive(Debug, Clone, PartialEq)]
pub enum InitialGuess {
    /// Interpolant of `sin(π (x - a) / (b - a))`.
    FirstLocalMode,
    Function(DiscreteFunction),
    /// Uniform random coefficients in `[0, 1)` drawn from `random_seed`.
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenConfig {
    pub max_iterations: usize,
    pub step_tolerance: f64,
    pub residual_tolerance: f64,
    pub initial_guess: InitialGuess,
    pub armijo_factor: f64,
    pub armijo_slope: f64,
    pub random_seed: u64,
}

impl Default for EigenConfig {
    fn default() -> Self {
        Self {
            max_iterations: 5000,
            step_tolerance: 1e-10,
            residual_tolerance: 1e-8,
            initial_guess: InitialGuess::FirstLocalMode,
            armijo_factor: 0.5,
            armijo_slope: 1e-4,
            random_seed: 0,
        }
    }
}

impl EigenConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::domain("max_iterations must be positive"));
        }
        if !(self.step_tolerance > 0.0 && self.residual_tolerance > 0.0) {
            return Err(Error::domain("tolerances must be positive"));
        }
        for (name, v) in [("armijo_factor", self.armijo_factor), ("armijo_slope", self.armijo_slope)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::domain(format!("{name} = {v} must lie in (0, 1)")));
            }
        }
        Ok(())
    }

    pub fn with_initial_guess(mut self, guess: InitialGuess) -> Self {
        self.initial_guess = guess;
        self
    }

    pub(crate) fn descent_options(&self) -> DescentOptions {
        DescentOptions {
            max_iterations: self.max_iterations,
            step_tolerance: self.step_tolerance,
            residual_tolerance: self.residual_tolerance,
            armijo_factor: self.armijo_factor,
            armijo_slope: self.armijo_slope,
        }
    }

    pub(crate) fn initial_function(&self, mesh: Mesh1D) -> Result<DiscreteFunction> {
        match &self.initial_guess {
            InitialGuess::FirstLocalMode => first_local_mode(mesh),
            InitialGuess::Function(u) => {
                if *u.mesh() != mesh {
                    return Err(Error::MeshMismatch);
                }
                if u.is_zero() {
                    return Err(Error::ZeroFunction);
                }
                Ok(u.clone())
            }
            InitialGuess::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.random_seed);
                let c = (0..mesh.num_interior()).map(|_| rng.gen::<f64>()).collect();
                DiscreteFunction::new(mesh, c)
            }
        }
    }
}

pub(crate) fn first_local_mode(mesh: Mesh1D) -> Result<DiscreteFunction> {
    let (a, len) = (mesh.a(), mesh.length());
    // sin(π) is ~1e-16, below the boundary tolerance
    interpolate(|x| (PI * (x - a) / len).sin(), mesh)
}

#[derive(Debug, Clone)]
pub struct EigenResult {
    pub lambda: f64,
    /// `‖u‖_p = 1`, `∫ u ≥ 0`.
    pub eigenfunction: DiscreteFunction,
    pub residual: f64,
    pub iterations: usize,
    pub s: f64,
    /// Rayleigh quotient after each accepted step.
    pub history: Vec<f64>,
}

struct RayleighQuotient<'a> {
    form: &'a EnergyForm,
}

impl HomogeneousQuotient for RayleighQuotient<'_> {
    fn mesh(&self) -> &Mesh1D {
        self.form.mesh()
    }

    fn degree(&self) -> f64 {
        self.form.p()
    }

    fn constraint_exponent(&self) -> f64 {
        self.form.p()
    }

    fn numerator(&self, u: &DiscreteFunction) -> f64 {
        self.form.p() * self.form.energy(u).expect("mesh checked by the solver")
    }

    fn numerator_gradient(&self, u: &DiscreteFunction) -> Vec<f64> {
        self.form.gradient(u).expect("mesh checked by the solver")
    }
}

/// `[u]_{s,p}^p / ‖u‖_p^p` for a prebuilt energy form.
pub fn rayleigh_quotient_with(form: &EnergyForm, u: &DiscreteFunction) -> Result<f64> {
    if u.is_zero() {
        return Err(Error::ZeroFunction);
    }
    Ok(form.seminorm_power(u)? / lp_power(u, form.p()))
}

/// `[u]_{s,p}^p / ‖u‖_p^p`, with `‖u'‖_p^p` in the numerator at `s = 1`.
pub fn rayleigh_quotient(u: &DiscreteFunction, s: f64, p: f64) -> Result<f64> {
    if u.is_zero() {
        return Err(Error::ZeroFunction);
    }
    rayleigh_quotient_with(&EnergyForm::new(*u.mesh(), s, p)?, u)
}

pub fn solve_first_eigenpair(mesh: Mesh1D, s: f64, p: f64, config: &EigenConfig) -> Result<EigenResult> {
    let form = EnergyForm::new(mesh, s, p)?;
    solve_first_eigenpair_with(&form, config)
}

/// As [`solve_first_eigenpair`], reusing a prebuilt energy form.
pub fn solve_first_eigenpair_with(form: &EnergyForm, config: &EigenConfig) -> Result<EigenResult> {
    config.validate()?;
    let initial = config.initial_function(*form.mesh())?;
    let outcome = minimize(&RayleighQuotient { form }, &initial, &config.descent_options())?;
    let mut u = outcome.u;
    if u.integral() < 0.0 {
        u = u.scaled(-1.0);
    }
    let lambda = rayleigh_quotient_with(form, &u)?;
    Ok(EigenResult {
        lambda,
        eigenfunction: u,
        residual: outcome.residual,
        iterations: outcome.iterations,
        s: form.s(),
        history: outcome.history,
    })
}

/// First Dirichlet eigenvalue of the one-dimensional `p`-Laplacian on an
/// interval of length `len`: `(p - 1) (π_p / len)^p` with
/// `π_p = 2π / (p sin(π/p))`.
pub fn local_first_eigenvalue(p: f64, len: f64) -> f64 {
    let pi_p = 2.0 * PI / (p * (PI / p).sin());
    (p - 1.0) * (pi_p / len).powf(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize) -> Mesh1D {
        Mesh1D::unit(n).unwrap()
    }

    #[test]
    fn quotient_examples() {
        let m = unit(512);
        let u = interpolate(|x| (PI * x).sin(), m).unwrap();
        let r = rayleigh_quotient(&u, 1.0, 2.0).unwrap();
        assert!((r - PI * PI).abs() / (PI * PI) < 1e-3);

        let hat = DiscreteFunction::hat(unit(2), 1).unwrap();
        assert!((rayleigh_quotient(&hat, 1.0, 2.0).unwrap() - 12.0).abs() < 1e-12);

        let v = interpolate(|x| x * (1.0 - x) * (2.0 - x), unit(32)).unwrap();
        for (s, p) in [(0.4, 2.0), (0.8, 3.0), (1.0, 1.5)] {
            let base = rayleigh_quotient(&v, s, p).unwrap();
            for t in [2.0, -0.5] {
                let scaled = rayleigh_quotient(&v.scaled(t), s, p).unwrap();
                assert!((scaled - base).abs() <= 1e-10 * base);
            }
        }
        let zero = DiscreteFunction::zeros(unit(8));
        assert!(matches!(rayleigh_quotient(&zero, 0.5, 2.0), Err(Error::ZeroFunction)));
        assert!(rayleigh_quotient(&v, 0.0, 2.0).is_err());
        assert!(rayleigh_quotient(&v, 0.5, 1.0).is_err());
    }

    #[test]
    fn local_laplacian_eigenvalue() {
        let result = solve_first_eigenpair(unit(256), 1.0, 2.0, &EigenConfig::default()).unwrap();
        assert!((result.lambda - PI * PI).abs() / (PI * PI) < 5e-3);
        assert!(result.residual <= 1e-8);
        assert!((lp_norm_of(&result) - 1.0).abs() <= 1e-10);
        assert!(result.eigenfunction.integral() >= 0.0);
        assert_eq!(result.s, 1.0);
    }

    fn lp_norm_of(result: &EigenResult) -> f64 {
        crate::mesh::lp_norm(&result.eigenfunction, 2.0)
    }

    #[test]
    fn local_p_laplacian_eigenvalue() {
        let p = 3.0;
        let result = solve_first_eigenpair(unit(128), 1.0, p, &EigenConfig::default()).unwrap();
        let exact = local_first_eigenvalue(p, 1.0);
        assert!((result.lambda - exact).abs() / exact < 1e-3);
        assert!((crate::mesh::lp_norm(&result.eigenfunction, p) - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn local_first_eigenvalue_reduces_to_pi_squared() {
        assert!((local_first_eigenvalue(2.0, 1.0) - PI * PI).abs() < 1e-12);
        assert!((local_first_eigenvalue(2.0, 2.0) - PI * PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn descent_properties() {
        let mesh = unit(32);
        let config = EigenConfig::default().with_initial_guess(InitialGuess::Random);
        let result = solve_first_eigenpair(mesh, 0.6, 2.0, &config).unwrap();
        assert!(result.history.windows(2).all(|w| w[1] <= w[0]));
        let start = rayleigh_quotient(&config.initial_function(mesh).unwrap(), 0.6, 2.0).unwrap();
        assert!(result.lambda <= start);
        let again = rayleigh_quotient(&result.eigenfunction, 0.6, 2.0).unwrap();
        assert!((again - result.lambda).abs() <= 1e-10 * result.lambda);
        assert_eq!(result.iterations + 1, result.history.len());
    }

    #[test]
    fn sign_flip_of_guess() {
        let mesh = unit(32);
        let guess = interpolate(|x| x * (1.0 - x) * (1.0 + x), mesh).unwrap();
        let solve = |g: DiscreteFunction| {
            let config = EigenConfig::default().with_initial_guess(InitialGuess::Function(g));
            solve_first_eigenpair(mesh, 0.7, 2.0, &config).unwrap()
        };
        let plus = solve(guess.clone());
        let minus = solve(guess.scaled(-1.0));
        assert!((plus.lambda - minus.lambda).abs() <= 1e-10 * plus.lambda);
        assert!(minus.eigenfunction.integral() >= 0.0);
    }

    #[test]
    fn warm_start_is_not_slower() {
        let mesh = unit(64);
        let config = EigenConfig::default();
        let first = solve_first_eigenpair(mesh, 0.8, 2.0, &config).unwrap();
        let cold = solve_first_eigenpair(mesh, 0.82, 2.0, &config).unwrap();
        let warm_config = config.with_initial_guess(InitialGuess::Function(first.eigenfunction));
        let warm = solve_first_eigenpair(mesh, 0.82, 2.0, &warm_config).unwrap();
        assert!(warm.iterations <= cold.iterations);
        assert!((warm.lambda - cold.lambda).abs() <= 1e-8 * cold.lambda);
    }

    #[test]
    fn errors() {
        let mesh = unit(16);
        let zero = EigenConfig::default().with_initial_guess(InitialGuess::Function(DiscreteFunction::zeros(mesh)));
        assert!(matches!(solve_first_eigenpair(mesh, 0.5, 2.0, &zero), Err(Error::ZeroFunction)));

        let other = EigenConfig::default().with_initial_guess(InitialGuess::Function(first_local_mode(unit(8)).unwrap()));
        assert!(matches!(solve_first_eigenpair(mesh, 0.5, 2.0, &other), Err(Error::MeshMismatch)));

        let short = EigenConfig { max_iterations: 2, ..EigenConfig::default() };
        match solve_first_eigenpair(mesh, 0.5, 2.0, &short) {
            Err(Error::NonConvergence { iterations, best, .. }) => {
                assert_eq!(iterations, 2);
                assert_eq!(best.len(), mesh.num_interior());
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }

        let bad = EigenConfig { armijo_factor: 1.0, ..EigenConfig::default() };
        assert!(solve_first_eigenpair(mesh, 0.5, 2.0, &bad).is_err());
        let bad = EigenConfig { residual_tolerance: 0.0, ..EigenConfig::default() };
        assert!(solve_first_eigenpair(mesh, 0.5, 2.0, &bad).is_err());
    }
}
