//! Browser bindings: eigenfunction and ground-state profiles on (0, 1), and
//! the energy of `sin(πx)` as a function of `s`.

use std::f64::consts::PI;

use wasm_bindgen::prelude::*;

use fracplap::ground_state::{solve_ground_state, Potential, Problem};
use fracplap::mesh::interpolate;
use fracplap::{solve_first_eigenpair, DiscreteFunction, EigenConfig, EnergyForm, Mesh1D};

/// Largest mesh the page may request.
pub const MAX_ELEMENTS: usize = 512;

#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct Profile {
    value: f64,
    iterations: usize,
    residual: f64,
    nodes: Vec<f64>,
    values: Vec<f64>,
}

#[wasm_bindgen]
impl Profile {
    /// `λ^s` or `c_s`.
    #[wasm_bindgen(getter)]
    pub fn value(&self) -> f64 {
        self.value
    }

    #[wasm_bindgen(getter)]
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    #[wasm_bindgen(getter)]
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// All mesh nodes, endpoints included.
    #[wasm_bindgen(getter)]
    pub fn nodes(&self) -> Vec<f64> {
        self.nodes.clone()
    }

    /// Nodal values matching `nodes`.
    #[wasm_bindgen(getter)]
    pub fn values(&self) -> Vec<f64> {
        self.values.clone()
    }
}

fn mesh(n: usize) -> Result<Mesh1D, String> {
    if n > MAX_ELEMENTS {
        return Err(format!("at most {MAX_ELEMENTS} elements"));
    }
    Mesh1D::unit(n).map_err(|e| e.to_string())
}

fn profile(u: &DiscreteFunction, value: f64, iterations: usize, residual: f64) -> Profile {
    Profile {
        value,
        iterations,
        residual,
        nodes: u.mesh().nodes(),
        values: u.nodal_values(),
    }
}

pub fn eigen(s: f64, p: f64, n: usize) -> Result<Profile, String> {
    let r = solve_first_eigenpair(mesh(n)?, s, p, &EigenConfig::default()).map_err(|e| e.to_string())?;
    Ok(profile(&r.eigenfunction, r.lambda, r.iterations, r.residual))
}

pub fn ground_state(s: f64, p: f64, q: f64, n: usize) -> Result<Profile, String> {
    let problem = Problem::new(p, q, Potential::Zero).map_err(|e| e.to_string())?;
    let r = solve_ground_state(mesh(n)?, s, &problem, &EigenConfig::default()).map_err(|e| e.to_string())?;
    Ok(profile(&r.u, r.level, r.iterations, r.residual))
}

/// `J_{s,p}(sin πx)` for each `s` in `(0, 1]`.
pub fn energies(p: f64, n: usize, s_values: &[f64]) -> Result<Vec<f64>, String> {
    let mesh = mesh(n)?;
    let u = interpolate(|x| (PI * x).sin(), mesh).map_err(|e| e.to_string())?;
    s_values
        .iter()
        .map(|&s| {
            EnergyForm::new(mesh, s, p)
                .and_then(|form| form.energy(&u))
                .map_err(|e| e.to_string())
        })
        .collect()
}

#[wasm_bindgen(js_name = eigenProfile)]
pub fn eigen_profile(s: f64, p: f64, n: usize) -> Result<Profile, JsError> {
    eigen(s, p, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = groundStateProfile)]
pub fn ground_state_profile(s: f64, p: f64, q: f64, n: usize) -> Result<Profile, JsError> {
    ground_state(s, p, q, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = energyCurve)]
pub fn energy_curve(p: f64, n: usize, s_values: Vec<f64>) -> Result<Vec<f64>, JsError> {
    energies(p, n, &s_values).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_profile_shape() {
        let r = eigen(1.0, 2.0, 32).unwrap();
        assert_eq!(r.nodes.len(), 33);
        assert_eq!(r.values.len(), 33);
        assert_eq!((r.values[0], r.values[32]), (0.0, 0.0));
        assert!((r.value - PI * PI).abs() / (PI * PI) < 5e-3);
    }

    #[test]
    fn ground_state_positive() {
        let r = ground_state(0.8, 2.0, 4.0, 32).unwrap();
        assert!(r.value > 0.0);
        assert!(r.values.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn energies_approach_local_value() {
        let e = energies(2.0, 128, &[0.9, 0.99, 1.0]).unwrap();
        assert!((e[1] - e[2]).abs() < (e[0] - e[2]).abs());
        assert!((e[2] - PI * PI / 4.0).abs() < 1e-3 * e[2]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(eigen(0.5, 0.5, 16).is_err());
        assert!(eigen(0.5, 2.0, MAX_ELEMENTS + 1).is_err());
        assert!(ground_state(0.5, 2.0, 1.5, 16).is_err());
        assert!(energies(2.0, 16, &[1.5]).is_err());
    }
}
