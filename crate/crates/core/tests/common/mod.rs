//! Test oracles that share no code path with the library's assembly.
#![allow(dead_code)]

use fracplap::gauss::GaussRule;
use fracplap::{DiscreteFunction, Mesh1D};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dense tensor-grid approximation of
/// `K ∬_{Ω×Ω} F(x, y) |x-y|^{-1-sp} + 2K ∫_Ω G(x) τ_s(x)`
/// where `F` and `G` are built from `u`, `v` by `pair` and `tail`.
///
/// Ω×Ω is cut into `cells × cells` squares aligned with the mesh nodes and
/// each square gets a 4×4 Gauss rule; the diagonal is never sampled. The
/// tail uses `cells` sub-intervals graded towards both endpoints.
fn brute_force(
    u: &DiscreteFunction,
    v: &DiscreteFunction,
    s: f64,
    p: f64,
    per_element: usize,
    pair: impl Fn(f64, f64, f64, f64) -> f64,
    tail: impl Fn(f64, f64) -> f64,
) -> f64 {
    let mesh = u.mesh();
    let (a, b) = (mesh.a(), mesh.b());
    let sp = s * p;
    let scale = (1.0 - s) * p / 2.0;
    let rule = GaussRule::new(4);
    let cells = mesh.num_elements() * per_element;
    let dx = (b - a) / cells as f64;
    let mut pts = Vec::with_capacity(cells * 4);
    for c in 0..cells {
        for (t, w) in rule.nodes.iter().zip(&rule.weights) {
            let x = a + (c as f64 + t) * dx;
            pts.push((x, w * dx, u.eval(x), v.eval(x)));
        }
    }
    // on coincident sample points the integrand is replaced by its limit
    // |u'|^p |x-y|^{p-1-sp}, which is |u'|^p when p - 1 - sp = 0 and 0 when
    // the exponent is positive
    let exponent = p - 1.0 - sp;
    let delta = 1e-7 * dx;
    let mut double = 0.0;
    for &(x, wx, ux, vx) in &pts {
        for &(y, wy, uy, vy) in &pts {
            if x == y {
                if exponent.abs() < 1e-14 {
                    let du = (u.eval(x + delta) - u.eval(x - delta)) / (2.0 * delta);
                    let dv = (v.eval(x + delta) - v.eval(x - delta)) / (2.0 * delta);
                    double += wx * wy * pair(du, 0.0, dv, 0.0);
                }
                continue;
            }
            double += wx * wy * pair(ux, uy, vx, vy) * (x - y).abs().powf(-1.0 - sp);
        }
    }
    // graded tail: x = a + L (k/m)^3 near each end
    let half = 0.5 * (a + b);
    let m = 4000;
    let mut single = 0.0;
    for (start, sign) in [(a, 1.0), (b, -1.0)] {
        for k in 0..m {
            let r0 = (half - a) * (k as f64 / m as f64).powi(3);
            let r1 = (half - a) * ((k + 1) as f64 / m as f64).powi(3);
            for (t, w) in rule.nodes.iter().zip(&rule.weights) {
                let r = r0 + (r1 - r0) * t;
                let x = start + sign * r;
                let tau = ((b - x).powf(-sp) + (x - a).powf(-sp)) / sp;
                single += w * (r1 - r0) * tail(u.eval(x), v.eval(x)) * tau;
            }
        }
    }
    scale * (double + 2.0 * single)
}

/// `J_{s,p}(u)` by brute force.
pub fn brute_energy(u: &DiscreteFunction, s: f64, p: f64, per_element: usize) -> f64 {
    brute_force(
        u,
        u,
        s,
        p,
        per_element,
        |ux, uy, _, _| (ux - uy).abs().powf(p),
        |ux, _| ux.abs().powf(p),
    ) / p
}

/// `⟨(-Δ_p)^s u, v⟩` by brute force.
pub fn brute_pairing(u: &DiscreteFunction, v: &DiscreteFunction, s: f64, p: f64, per_element: usize) -> f64 {
    let phi = move |z: f64| z.abs().powf(p - 2.0) * z;
    brute_force(
        u,
        v,
        s,
        p,
        per_element,
        move |ux, uy, vx, vy| if ux == uy { 0.0 } else { phi(ux - uy) * (vx - vy) },
        move |ux, vx| if ux == 0.0 { 0.0 } else { phi(ux) * vx },
    )
}

pub fn random_function(mesh: Mesh1D, rng: &mut ChaCha8Rng) -> DiscreteFunction {
    let c = (0..mesh.num_interior()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    DiscreteFunction::new(mesh, c).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

/// Dense generalized symmetric eigenproblem `A x = λ M x`; smallest λ.
pub fn smallest_generalized_eigenvalue(a: &nalgebra::DMatrix<f64>, m: &nalgebra::DMatrix<f64>) -> f64 {
    let chol = nalgebra::Cholesky::new(m.clone()).expect("mass matrix is SPD");
    let l = chol.l();
    let linv = l.clone().try_inverse().unwrap();
    let c = &linv * a * linv.transpose();
    let c = 0.5 * (&c + c.transpose());
    let eig = nalgebra::SymmetricEigen::new(c);
    eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// P1 mass matrix on the interior nodes.
pub fn mass_matrix(mesh: Mesh1D) -> nalgebra::DMatrix<f64> {
    let n = mesh.num_interior();
    let h = mesh.h();
    nalgebra::DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            2.0 * h / 3.0
        } else if i.abs_diff(j) == 1 {
            h / 6.0
        } else {
            0.0
        }
    })
}

/// Matrix of a quadratic form given its gradient map, column by column.
pub fn assemble_from_gradient(mesh: Mesh1D, gradient: impl Fn(&DiscreteFunction) -> Vec<f64>) -> nalgebra::DMatrix<f64> {
    let n = mesh.num_interior();
    let mut a = nalgebra::DMatrix::zeros(n, n);
    for j in 0..n {
        let col = gradient(&DiscreteFunction::hat(mesh, j + 1).unwrap());
        for i in 0..n {
            a[(i, j)] = col[i];
        }
    }
    0.5 * (&a + a.transpose())
}
