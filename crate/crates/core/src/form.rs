use crate::error::{Error, Result};
use crate::local;
use crate::mesh::{DiscreteFunction, Mesh1D};
use crate::nonlocal::GagliardoQuadrature;

/// `J_{s,p}` for `s ∈ (0, 1]`: the Gagliardo energy for `s < 1`, the local
/// `p`-Dirichlet energy at `s = 1`.
#[derive(Debug, Clone)]
pub enum EnergyForm {
    Local { mesh: Mesh1D, p: f64 },
    Fractional(GagliardoQuadrature),
}

impl EnergyForm {
    pub fn new(mesh: Mesh1D, s: f64, p: f64) -> Result<Self> {
        if s == 1.0 {
            if !(p > 1.0 && p.is_finite()) {
                return Err(Error::domain(format!("exponent p = {p} must be a finite real > 1")));
            }
            Ok(EnergyForm::Local { mesh, p })
        } else if s > 0.0 && s < 1.0 {
            Ok(EnergyForm::Fractional(GagliardoQuadrature::new(mesh, s, p)?))
        } else {
            Err(Error::domain(format!("order s = {s} must lie in (0, 1]")))
        }
    }

    pub fn mesh(&self) -> &Mesh1D {
        match self {
            EnergyForm::Local { mesh, .. } => mesh,
            EnergyForm::Fractional(q) => q.mesh(),
        }
    }

    pub fn s(&self) -> f64 {
        match self {
            EnergyForm::Local { .. } => 1.0,
            EnergyForm::Fractional(q) => q.s(),
        }
    }

    pub fn p(&self) -> f64 {
        match self {
            EnergyForm::Local { p, .. } => *p,
            EnergyForm::Fractional(q) => q.p(),
        }
    }

    fn check(&self, u: &DiscreteFunction) -> Result<()> {
        if u.mesh() != self.mesh() {
            return Err(Error::MeshMismatch);
        }
        Ok(())
    }

    pub fn energy(&self, u: &DiscreteFunction) -> Result<f64> {
        self.check(u)?;
        Ok(match self {
            EnergyForm::Local { p, .. } => local::local_energy(u, *p),
            EnergyForm::Fractional(q) => q.energy_unchecked(u),
        })
    }

    pub fn pairing(&self, u: &DiscreteFunction, v: &DiscreteFunction) -> Result<f64> {
        self.check(u)?;
        match self {
            EnergyForm::Local { p, .. } => local::local_pairing(u, v, *p),
            EnergyForm::Fractional(q) => q.nonlocal_pairing(u, v),
        }
    }

    pub fn gradient(&self, u: &DiscreteFunction) -> Result<Vec<f64>> {
        self.check(u)?;
        Ok(match self {
            EnergyForm::Local { p, .. } => local::local_gradient(u, *p),
            EnergyForm::Fractional(q) => q.gradient_unchecked(u),
        })
    }

    /// `[u]_{s,p}^p`, or `‖u'‖_p^p` at `s = 1`.
    pub fn seminorm_power(&self, u: &DiscreteFunction) -> Result<f64> {
        Ok(self.p() * self.energy(u)?)
    }
}
