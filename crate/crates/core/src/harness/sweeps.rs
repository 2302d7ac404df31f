use std::f64::consts::PI;
use std::time::Instant;

use super::config::{Mode, SweepConfig};
use super::report::{successive_ratios, Check, GammaRecord, SweepRecord, SweepReport};
use crate::eigen::{local_first_eigenvalue, solve_first_eigenpair_with, EigenResult, InitialGuess};
use crate::error::{Error, Result};
use crate::form::EnergyForm;
use crate::ground_state::{nehari_time, nehari_time_bisection, solve_ground_state, GroundStateResult, Problem};
use crate::mesh::{interpolate, lp_norm, DiscreteFunction};

/// Relative envelope on `|λ^1 - λ_exact|` and on `|c_{s_max} - c_1|`.
pub const REFERENCE_TOLERANCE: f64 = 0.005;
pub const LEVEL_TOLERANCE: f64 = 0.05;
pub const NEHARI_TOLERANCE: f64 = 1e-6;
pub const BISECTION_AGREEMENT: f64 = 1e-8;
pub const VNORM_ENVELOPE: f64 = 10.0;
pub const DEVELOPMENT_STEPS: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// Number of trailing grid points on which errors must not increase.
const MONOTONE_WINDOW: usize = 3;
/// Gap checks against `s = 1` run only when the grid reaches this far.
pub const GAP_CHECK_FROM: f64 = 0.99;

struct Stopwatch {
    start: Option<Instant>,
}

impl Stopwatch {
    fn start(enabled: bool) -> Self {
        Self {
            start: enabled.then(Instant::now),
        }
    }

    fn millis(&self) -> f64 {
        self.start.map_or(0.0, |t| t.elapsed().as_secs_f64() * 1e3)
    }
}

fn at(s: f64) -> impl FnOnce(Error) -> Error {
    move |e| Error::Sweep { s, source: Box::new(e) }
}

/// `values` nonincreasing over the last `MONOTONE_WINDOW` entries.
fn tail_nonincreasing(values: &[f64]) -> bool {
    let start = values.len().saturating_sub(MONOTONE_WINDOW);
    values[start..].windows(2).all(|w| w[1] <= w[0])
}

fn monotone_check(name: &str, values: &[f64]) -> Check {
    let start = values.len().saturating_sub(MONOTONE_WINDOW);
    Check::new(
        name,
        tail_nonincreasing(values),
        format!("last values {:?}", &values[start..]),
    )
}

fn report_skeleton(config: &SweepConfig, mode: Mode, records: Vec<SweepRecord>, reference: SweepRecord) -> SweepReport {
    let errors: Vec<f64> = records.iter().map(|r| (r.value - reference.value).abs()).collect();
    let distances: Vec<f64> = records.iter().map(|r| r.lp_distance).collect();
    SweepReport {
        mode,
        a: config.a,
        b: config.b,
        num_elements: config.num_elements,
        p: config.p,
        q: (mode == Mode::GroundState).then_some(config.q),
        potential: config.potential.clone(),
        error_ratios: successive_ratios(&errors),
        distance_ratios: successive_ratios(&distances),
        records,
        reference,
        gamma: Vec::new(),
        checks: Vec::new(),
    }
}

fn distance(u: &DiscreteFunction, reference: &DiscreteFunction, p: f64) -> Result<f64> {
    Ok(lp_norm(&u.try_sub(reference)?, p))
}

/// First eigenpairs along the grid, each warm-started from the previous one,
/// and a cold solve at `s = 1`.
pub fn run_eigen_sweep(config: &SweepConfig) -> Result<SweepReport> {
    config.validate()?;
    let mesh = config.mesh()?;
    let p = config.p;

    let solve = |s: f64, guess: InitialGuess| -> Result<(EigenResult, f64)> {
        let clock = Stopwatch::start(config.timing);
        let form = EnergyForm::new(mesh, s, p).map_err(at(s))?;
        let solver = config.solver.clone().with_initial_guess(guess);
        let result = solve_first_eigenpair_with(&form, &solver).map_err(at(s))?;
        Ok((result, clock.millis()))
    };

    let (local, local_ms) = solve(1.0, config.solver.initial_guess.clone())?;
    let mut guess = config.solver.initial_guess.clone();
    let mut solved = Vec::with_capacity(config.s_grid.len());
    for &s in &config.s_grid {
        let (result, ms) = solve(s, guess)?;
        guess = InitialGuess::Function(result.eigenfunction.clone());
        solved.push((result, ms));
    }

    let record = |r: &EigenResult, ms: f64| -> Result<SweepRecord> {
        Ok(SweepRecord {
            s: r.s,
            value: r.lambda,
            lp_distance: distance(&r.eigenfunction, &local.eigenfunction, p)?,
            vnorm: r.lambda.powf(1.0 / p),
            iterations: r.iterations,
            wall_time_ms: ms,
        })
    };
    let records = solved.iter().map(|(r, ms)| record(r, *ms)).collect::<Result<Vec<_>>>()?;
    let reference = record(&local, local_ms)?;

    let exact = local_first_eigenvalue(p, config.b - config.a);
    let reference_error = (reference.value - exact).abs() / exact;
    let errors: Vec<f64> = records.iter().map(|r| (r.value - reference.value).abs()).collect();
    let distances: Vec<f64> = records.iter().map(|r| r.lp_distance).collect();

    let mut report = report_skeleton(config, Mode::Eigen, records, reference);
    report.checks = vec![
        Check::new(
            "local eigenvalue",
            reference_error <= REFERENCE_TOLERANCE,
            format!("lambda_1 = {:.12e}, exact {exact:.12e}, relative error {reference_error:.3e}", report.reference.value),
        ),
        monotone_check("eigenvalue error nonincreasing", &errors),
        monotone_check("eigenfunction distance nonincreasing", &distances),
    ];
    Ok(report)
}

/// Ground states along the grid, warm-started, and at `s = 1`.
pub fn run_groundstate_sweep(config: &SweepConfig) -> Result<SweepReport> {
    config.validate()?;
    let mesh = config.mesh()?;
    let problem = Problem::new(config.p, config.q, config.potential.to_potential())?;

    let solve = |s: f64, guess: InitialGuess| -> Result<(GroundStateResult, f64)> {
        let clock = Stopwatch::start(config.timing);
        let solver = config.solver.clone().with_initial_guess(guess);
        let result = solve_ground_state(mesh, s, &problem, &solver).map_err(at(s))?;
        Ok((result, clock.millis()))
    };

    let (local, local_ms) = solve(1.0, config.solver.initial_guess.clone())?;
    let mut guess = config.solver.initial_guess.clone();
    let mut solved = Vec::with_capacity(config.s_grid.len());
    for &s in &config.s_grid {
        let (result, ms) = solve(s, guess)?;
        guess = InitialGuess::Function(result.u.clone());
        solved.push((result, ms));
    }

    let record = |r: &GroundStateResult, ms: f64| -> Result<SweepRecord> {
        Ok(SweepRecord {
            s: r.s,
            value: r.level,
            lp_distance: distance(&r.u, &local.u, config.p)?,
            vnorm: r.vnorm,
            iterations: r.iterations,
            wall_time_ms: ms,
        })
    };
    let records = solved.iter().map(|(r, ms)| record(r, *ms)).collect::<Result<Vec<_>>>()?;
    let reference = record(&local, local_ms)?;

    let all: Vec<&GroundStateResult> = solved.iter().map(|(r, _)| r).chain(std::iter::once(&local)).collect();
    let min_level = all.iter().map(|r| r.level).fold(f64::INFINITY, f64::min);
    let worst_nehari = all.iter().map(|r| r.nehari_residual).fold(0.0, f64::max);
    let mut worst_bisection: f64 = 0.0;
    for r in &all {
        // off the manifold, so that both routes have work to do
        let probe = r.u.scaled(0.5);
        let closed = nehari_time(&probe, r.s, &problem).map_err(at(r.s))?;
        let bisected = nehari_time_bisection(&probe, r.s, &problem, &problem.nonlinearity()).map_err(at(r.s))?;
        worst_bisection = worst_bisection.max((closed - bisected).abs() / closed);
    }
    let vnorms: Vec<f64> = all.iter().map(|r| r.vnorm).collect();
    let (vmin, vmax) = vnorms
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));

    let last = records.last().expect("grid is nonempty");
    let c1 = reference.value;
    let gap = (last.value - c1).abs() / c1;
    let (s_max, c_max) = (last.s, last.value);

    let mut report = report_skeleton(config, Mode::GroundState, records, reference);
    report.checks = vec![
        Check::new("levels positive", min_level > 0.0, format!("min level {min_level:.12e}")),
        Check::new(
            "limsup bound",
            c_max <= c1 * (1.0 + LEVEL_TOLERANCE),
            format!("c_{s_max} = {c_max:.12e}, c_1 = {c1:.12e}"),
        ),
        Check::new(
            "nehari residual",
            worst_nehari <= NEHARI_TOLERANCE,
            format!("max residual {worst_nehari:.3e}"),
        ),
        Check::new(
            "nehari time bisection",
            worst_bisection <= BISECTION_AGREEMENT,
            format!("max relative disagreement {worst_bisection:.3e}"),
        ),
        Check::new(
            "vnorm envelope",
            vmin > 0.0 && vmax <= VNORM_ENVELOPE * vmin,
            format!("vnorm in [{vmin:.6e}, {vmax:.6e}]"),
        ),
    ];
    if s_max >= GAP_CHECK_FROM {
        report.checks.push(Check::new(
            "level gap at largest s",
            gap <= LEVEL_TOLERANCE,
            format!("|c_{s_max} - c_1| / c_1 = {gap:.3e}"),
        ));
    }
    Ok(report)
}

/// Least-squares slope of `log y` against `log x`.
pub(crate) fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

/// The fixed pair used by [`run_gamma_checks`]: `u = sin(πξ)` and
/// `v = ξ(1 - ξ)(1 + ξ)` with `ξ = (x - a)/(b - a)`.
pub fn gamma_test_pair(config: &SweepConfig) -> Result<(DiscreteFunction, DiscreteFunction)> {
    let mesh = config.mesh()?;
    let (a, len) = (config.a, config.b - config.a);
    let u = interpolate(|x| (PI * (x - a) / len).sin(), mesh)?;
    let v = interpolate(
        |x| {
            let xi = (x - a) / len;
            xi * (1.0 - xi) * (1.0 + xi)
        },
        mesh,
    )?;
    Ok((u, v))
}

/// `|J(u + t v) - J(u) - t ⟨J'(u), v⟩|` for each `t`.
pub fn development_defects(form: &EnergyForm, u: &DiscreteFunction, v: &DiscreteFunction, steps: &[f64]) -> Result<Vec<f64>> {
    let base = form.energy(u)?;
    let slope = form.pairing(u, v)?;
    steps
        .iter()
        .map(|&t| Ok((form.energy(&u.axpy(t, v)?)? - base - t * slope).abs()))
        .collect()
}

/// Energies and pairings of a fixed smooth pair as `s ↑ 1`.
pub fn run_gamma_checks(config: &SweepConfig) -> Result<SweepReport> {
    config.validate()?;
    let mesh = config.mesh()?;
    let p = config.p;
    let (u, v) = gamma_test_pair(config)?;
    let zero = DiscreteFunction::zeros(mesh);

    let local = EnergyForm::new(mesh, 1.0, p)?;
    let local_energy = local.energy(&u)?;
    let local_pairing = local.pairing(&u, &v)?;
    let local_self = local.pairing(&u, &u)?;

    let mut records = Vec::with_capacity(config.s_grid.len());
    let mut gamma = Vec::with_capacity(config.s_grid.len());
    let mut zero_ok = local.energy(&zero)? == 0.0 && local.pairing(&zero, &v)? == 0.0;
    let mut euler_worst: f64 = 0.0;
    let mut exponent_worst = f64::INFINITY;
    for &s in &config.s_grid {
        let clock = Stopwatch::start(config.timing);
        let form = EnergyForm::new(mesh, s, p).map_err(at(s))?;
        let energy = form.energy(&u)?;
        let pairing_gap = (form.pairing(&u, &v)? - local_pairing).abs();
        let self_pairing_gap = (form.pairing(&u, &u)? - local_self).abs();
        let energy_gap = (energy - local_energy).abs();
        let defects = development_defects(&form, &u, &v, &DEVELOPMENT_STEPS)?;
        let exponent = log_log_slope(&DEVELOPMENT_STEPS, &defects);

        zero_ok &= form.energy(&zero)? == 0.0 && form.pairing(&zero, &v)? == 0.0;
        let euler_scale = (p * energy_gap).max(1e-300);
        euler_worst = euler_worst.max((self_pairing_gap - p * energy_gap).abs() / euler_scale);
        exponent_worst = exponent_worst.min(exponent);

        records.push(SweepRecord {
            s,
            value: energy,
            lp_distance: 0.0,
            vnorm: (p * energy).powf(1.0 / p),
            iterations: 0,
            wall_time_ms: clock.millis(),
        });
        gamma.push(GammaRecord {
            s,
            energy_gap,
            pairing_gap,
            self_pairing_gap,
            development_defects: defects,
            development_exponent: exponent,
        });
    }
    let reference = SweepRecord {
        s: 1.0,
        value: local_energy,
        lp_distance: 0.0,
        vnorm: (p * local_energy).powf(1.0 / p),
        iterations: 0,
        wall_time_ms: 0.0,
    };

    let energy_gaps: Vec<f64> = gamma.iter().map(|g| g.energy_gap).collect();
    let pairing_gaps: Vec<f64> = gamma.iter().map(|g| g.pairing_gap).collect();
    let required = 0.9 * p.min(2.0);
    let last = gamma.last().expect("grid is nonempty");
    let relative_gap = last.energy_gap / local_energy;

    let mut report = report_skeleton(config, Mode::GammaCheck, records, reference);
    report.checks = vec![
        monotone_check("energy gap nonincreasing", &energy_gaps),
        monotone_check("pairing gap nonincreasing", &pairing_gaps),
        Check::new(
            "development exponent",
            exponent_worst >= required,
            format!("min fitted exponent {exponent_worst:.4} (required {required:.4})"),
        ),
        Check::new(
            "self pairing gap equals p times energy gap",
            euler_worst <= 1e-10 || gamma.iter().all(|g| g.energy_gap == 0.0),
            format!("max relative mismatch {euler_worst:.3e}"),
        ),
        Check::new("zero function", zero_ok, "energies and pairings of u = 0"),
    ];
    if last.s >= GAP_CHECK_FROM {
        report.checks.push(Check::new(
            "energy gap at largest s",
            relative_gap <= LEVEL_TOLERANCE,
            format!("|J_{} - J_1| / J_1 = {relative_gap:.3e}", last.s),
        ));
    }
    report.gamma = gamma;
    Ok(report)
}

/// Dispatches on `config.mode`.
pub fn run(config: &SweepConfig) -> Result<SweepReport> {
    match config.mode {
        Mode::Eigen => run_eigen_sweep(config),
        Mode::GroundState => run_groundstate_sweep(config),
        Mode::GammaCheck => run_gamma_checks(config),
    }
}
