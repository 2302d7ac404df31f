//! The `s = 1` objects: `J_{1,p}(u) = ‖u'‖_p^p / p`, the pairing
//! `∫ |u'|^{p-2} u' v'` and its nodal gradient.
//!
//! Derivatives of piecewise-linear functions are piecewise constant, so
//! every quantity here is an exact finite sum.

use crate::error::Result;
use crate::mesh::{abs_pow, check_same_mesh, signed_pow, DiscreteFunction};

fn slopes(u: &DiscreteFunction) -> Vec<f64> {
    let h = u.mesh().h();
    u.nodal_values().windows(2).map(|w| (w[1] - w[0]) / h).collect()
}

pub fn local_energy(u: &DiscreteFunction, p: f64) -> f64 {
    let h = u.mesh().h();
    slopes(u).iter().map(|&s| abs_pow(s, p)).sum::<f64>() * h / p
}

pub fn local_pairing(u: &DiscreteFunction, v: &DiscreteFunction, p: f64) -> Result<f64> {
    check_same_mesh(u, v)?;
    let h = u.mesh().h();
    let sum: f64 = slopes(u)
        .iter()
        .zip(slopes(v))
        .map(|(&su, sv)| signed_pow(su, p) * sv)
        .sum();
    Ok(h * sum)
}

/// Entry `i` is `∫ |u'|^{p-2} u' φ_i'` for the hat of interior node `i + 1`.
pub fn local_gradient(u: &DiscreteFunction, p: f64) -> Vec<f64> {
    let fluxes: Vec<f64> = slopes(u).iter().map(|&s| signed_pow(s, p)).collect();
    // φ_i' is 1/h on element i-1 and -1/h on element i
    fluxes.windows(2).map(|w| w[0] - w[1]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{interpolate, Mesh1D};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random(mesh: Mesh1D, rng: &mut ChaCha8Rng) -> DiscreteFunction {
        let c = (0..mesh.num_interior()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        DiscreteFunction::new(mesh, c).unwrap()
    }

    #[test]
    fn hat_values() {
        let m = Mesh1D::unit(8).unwrap();
        let h = m.h();
        let hat = DiscreteFunction::hat(m, 3).unwrap();
        assert!((local_energy(&hat, 2.0) - 1.0 / h).abs() < 1e-12);
        assert!((local_pairing(&hat, &hat, 2.0).unwrap() - 2.0 / h).abs() < 1e-12);
        let far = DiscreteFunction::hat(m, 5).unwrap();
        assert_eq!(local_pairing(&hat, &far, 2.0).unwrap(), 0.0);

        let g = local_gradient(&hat, 2.0);
        let mut expected = vec![0.0; 7];
        expected[1] = -1.0 / h;
        expected[2] = 2.0 / h;
        expected[3] = -1.0 / h;
        for (a, b) in g.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(local_gradient(&DiscreteFunction::zeros(m), 3.0).iter().all(|&x| x == 0.0));
        assert_eq!(local_energy(&DiscreteFunction::zeros(m), 3.0), 0.0);
    }

    #[test]
    fn sine_energy() {
        let m = Mesh1D::unit(512).unwrap();
        let u = interpolate(|x| (PI * x).sin(), m).unwrap();
        let target = PI * PI / 4.0;
        assert!((local_energy(&u, 2.0) - target).abs() / target < 1e-3);
    }

    #[test]
    fn euler_homogeneity_symmetry_monotonicity() {
        let m = Mesh1D::unit(20).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for p in [1.5, 2.0, 3.0] {
            for _ in 0..20 {
                let u = random(m, &mut rng);
                let v = random(m, &mut rng);
                let e = local_energy(&u, p);
                let pair = local_pairing(&u, &u, p).unwrap();
                assert!((pair - p * e).abs() <= 1e-12 * pair.abs().max(1.0));
                let grad_dot: f64 = local_gradient(&u, p).iter().zip(u.coefficients()).map(|(g, c)| g * c).sum();
                assert!((grad_dot - p * e).abs() <= 1e-12 * e.max(1.0));
                let grad_v: f64 = local_gradient(&u, p).iter().zip(v.coefficients()).map(|(g, c)| g * c).sum();
                assert!((grad_v - local_pairing(&u, &v, p).unwrap()).abs() < 1e-10);

                let t: f64 = rng.gen_range(-3.0..3.0);
                let scaled = local_energy(&u.scaled(t), p);
                assert!((scaled - t.abs().powf(p) * e).abs() <= 1e-12 * scaled.max(1.0));

                let diff = u.try_sub(&v).unwrap();
                let mono = local_pairing(&u, &diff, p).unwrap() - local_pairing(&v, &diff, p).unwrap();
                assert!(mono >= -1e-12);

                if p == 2.0 {
                    let a = local_pairing(&u, &v, p).unwrap();
                    let b = local_pairing(&v, &u, p).unwrap();
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn mesh_mismatch() {
        let u = DiscreteFunction::zeros(Mesh1D::unit(4).unwrap());
        let v = DiscreteFunction::zeros(Mesh1D::unit(5).unwrap());
        assert!(local_pairing(&u, &v, 2.0).is_err());
    }
}
