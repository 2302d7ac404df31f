//! Normalizing constants of the Gagliardo seminorm.
//!
//! The seminorm carries the factor `K(n,s,p) = (1 - s) 𝒦(n,p)` where
//! `𝒦(n,p)⁻¹ = (1/p) ∫_{S^{n-1}} |w_n|^p dS_w`. With this choice
//! `[u]_{s,p}^p → ‖∇u‖_p^p` as `s ↑ 1`.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Parameters of the fractional kernel `|x - y|^{-(n + sp)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub n: usize,
    pub s: f64,
    pub p: f64,
}

impl KernelParams {
    pub fn new(n: usize, s: f64, p: f64) -> Result<Self> {
        check_np(n, p)?;
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::domain(format!("fractional order s = {s} must lie in (0, 1)")));
        }
        Ok(Self { n, s, p })
    }
}

fn check_np(n: usize, p: f64) -> Result<()> {
    if n < 1 {
        return Err(Error::domain("spatial dimension must be at least 1"));
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::domain(format!("exponent p = {p} must be a finite real > 1")));
    }
    Ok(())
}

/// `∫_{S^{n-1}} |w_n|^p dS_w`.
///
/// For `n = 1` the sphere is `{-1, +1}` with counting measure, so the
/// moment is 2 for every `p`.
pub fn sphere_moment(n: usize, p: f64) -> Result<f64> {
    check_np(n, p)?;
    if n == 1 {
        return Ok(2.0);
    }
    let nf = n as f64;
    let log_ratio = ln_gamma(0.5 * (p + 1.0)) - ln_gamma(0.5 * (nf + p));
    Ok(2.0 * PI.powf(0.5 * (nf - 1.0)) * log_ratio.exp())
}

/// `𝒦(n,p) = p / ∫_{S^{n-1}} |w_n|^p`.
pub fn bbm_constant(n: usize, p: f64) -> Result<f64> {
    Ok(p / sphere_moment(n, p)?)
}

/// `K(n,s,p) = (1 - s) 𝒦(n,p)`.
pub fn gagliardo_scale(params: KernelParams) -> Result<f64> {
    let KernelParams { n, s, p } = params;
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::domain(format!("fractional order s = {s} must lie in (0, 1)")));
    }
    Ok((1.0 - s) * bbm_constant(n, p)?)
}
