//! Tightness certificates: minimize the signed variance sum over pure states
//! with projected gradient descent on the unit sphere of the representation
//! space, and compare the minimum with the analytic bound.

use num_complex::Complex64;
use rand::Rng as _;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebras::GeneratorSet;
use crate::error::{Error, Result};
use crate::matcore::{inner, moments_from_image, norm_sq, ComplexMatrix, StateVector, ZERO};
use crate::rng::{stream, Rng};
use crate::sur::{gaussian_amplitudes, nearest_coherent_fidelity, random_support, saturating_state, tail_levels};
use crate::tol;
use crate::weights::{algebra_bound, to_f64};

const INITIAL_STEP: f64 = 0.1;
const BACKTRACK: f64 = 0.5;
const MIN_STEP: f64 = 1e-12;
const ARMIJO: f64 = 1e-4;
const PERTURBATION: f64 = 0.1;

/// `f(psi) = w sum_k s_k (psi^dag e_k^2 psi - (psi^dag e_k psi)^2)` and its
/// Euclidean gradient, for unnormalized `psi`. On the unit sphere `f` is the
/// variance sum.
pub struct Objective<'a> {
    gs: &'a GeneratorSet,
    /// `w sum_k s_k e_k^2`.
    quadratic: ComplexMatrix,
}

impl<'a> Objective<'a> {
    pub fn new(gs: &'a GeneratorSet) -> Self {
        let mut quadratic = ComplexMatrix::zeros(gs.rep_dim());
        for (e, &s) in gs.generators().zip(gs.signature()) {
            quadratic = &quadratic + &(e * e).scale_real(s as f64);
        }
        Objective {
            gs,
            quadratic: quadratic.scale_real(gs.variance_weight()),
        }
    }

    pub fn value(&self, psi: &[Complex64]) -> f64 {
        let w = self.gs.variance_weight();
        let mut means = 0.0;
        for (e, &s) in self.gs.generators().zip(self.gs.signature()) {
            let mean = inner(psi, &e.apply(psi)).re;
            means += s as f64 * mean * mean;
        }
        inner(psi, &self.quadratic.apply(psi)).re - w * means
    }

    /// Returns `(f, g)` with `df = Re <g, dpsi>`:
    /// `g = 2 Q psi - 4 w sum_k s_k <e_k> e_k psi`.
    pub fn value_and_gradient(&self, psi: &[Complex64]) -> (f64, Vec<Complex64>) {
        let w = self.gs.variance_weight();
        let qpsi = self.quadratic.apply(psi);
        let mut value = inner(psi, &qpsi).re;
        let mut grad: Vec<Complex64> = qpsi.iter().map(|z| z * 2.0).collect();
        for (e, &s) in self.gs.generators().zip(self.gs.signature()) {
            let image = e.apply(psi);
            let (mean, _) = moments_from_image(psi, &image);
            value -= w * s as f64 * mean * mean;
            let coef = -4.0 * w * s as f64 * mean;
            for (g, u) in grad.iter_mut().zip(&image) {
                *g += u * coef;
            }
        }
        (value, grad)
    }
}

/// Removes the radial component: `g - Re<psi, g> psi`.
pub fn project_tangent(psi: &[Complex64], grad: &[Complex64]) -> Vec<Complex64> {
    let radial = inner(psi, grad).re;
    grad.iter().zip(psi).map(|(g, p)| g - p * radial).collect()
}

pub fn tangent_gradient_norm(gs: &GeneratorSet, s: &StateVector) -> f64 {
    let (_, g) = Objective::new(gs).value_and_gradient(s.amplitudes());
    norm_sq(&project_tangent(s.amplitudes(), &g)).sqrt()
}

/// Central finite differences of the objective along `2 * dim` random
/// directions against the analytic directional derivative. Returns the
/// largest `|fd - analytic| / max(|analytic|, 1)`.
pub fn gradient_check(gs: &GeneratorSet, s: &StateVector, h: f64) -> Result<f64> {
    if !(1e-7..=1e-3).contains(&h) {
        return Err(Error::InvalidParameter(format!("step {h} outside [1e-7, 1e-3]")));
    }
    if s.dim() != gs.rep_dim() {
        return Err(Error::DimensionMismatch {
            expected: gs.rep_dim(),
            found: s.dim(),
        });
    }
    let obj = Objective::new(gs);
    let psi = s.amplitudes();
    let (_, grad) = obj.value_and_gradient(psi);
    let mut rng = stream(0x9e37_79b9, s.dim() as u64);
    let mut worst = 0.0_f64;
    for _ in 0..2 * s.dim() {
        let mut d = gaussian_amplitudes(&mut rng, s.dim());
        let n = norm_sq(&d).sqrt();
        d.iter_mut().for_each(|z| *z /= n);
        let shifted = |t: f64| -> Vec<Complex64> { psi.iter().zip(&d).map(|(p, q)| p + q * t).collect() };
        let fd = (obj.value(&shifted(h)) - obj.value(&shifted(-h))) / (2.0 * h);
        let analytic = inner(&grad, &d).re;
        worst = worst.max((fd - analytic).abs() / analytic.abs().max(1.0));
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimizeOptions {
    pub restarts: usize,
    pub max_iters: usize,
    /// Convergence threshold on the tangent-gradient norm.
    pub tol: f64,
    pub seed: u64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            restarts: 8,
            max_iters: 20_000,
            tol: tol::OPTIMIZER,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MinimizeResult {
    pub best_value: f64,
    pub best_state: StateVector,
    pub bound: f64,
    pub gap: f64,
    pub restarts_used: usize,
    /// Index of the winning restart.
    pub best_restart: usize,
    /// Accepted steps taken by the winning restart.
    pub iterations: usize,
    pub total_iterations: usize,
    pub converged: bool,
    /// Tangent-gradient norm at the returned state.
    pub gradient_norm: f64,
    /// Objective after each accepted step of the winning restart.
    #[serde(skip)]
    pub history: Vec<f64>,
}

struct Run {
    value: f64,
    psi: Vec<Complex64>,
    iterations: usize,
    converged: bool,
    gradient_norm: f64,
    history: Vec<f64>,
}

/// Zeroes amplitudes outside the faithful region of a truncated ladder.
fn enforce_tail(gs: &GeneratorSet, psi: &mut [Complex64]) {
    if let Some(cutoff) = gs.spec().cutoff() {
        for z in &mut psi[cutoff - tail_levels(cutoff)..] {
            *z = ZERO;
        }
    }
}

fn normalize(psi: &mut [Complex64]) {
    let n = norm_sq(psi).sqrt();
    psi.iter_mut().for_each(|z| *z /= n);
}

/// Even restarts start Haar-random on the allowed support, odd restarts from a
/// weight-basis state plus a small Gaussian perturbation.
fn initial_state(gs: &GeneratorSet, restart: usize, rng: &mut Rng) -> Vec<Complex64> {
    let support = random_support(gs);
    let mut psi = vec![ZERO; gs.rep_dim()];
    if restart.is_multiple_of(2) {
        psi[..support].copy_from_slice(&gaussian_amplitudes(rng, support));
    } else {
        let index = (restart / 2) % support;
        for z in &mut psi[..support] {
            *z = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)) * PERTURBATION;
        }
        psi[index] += Complex64::new(1.0, 0.0);
    }
    enforce_tail(gs, &mut psi);
    normalize(&mut psi);
    psi
}

fn descend(gs: &GeneratorSet, obj: &Objective, mut psi: Vec<Complex64>, opts: &MinimizeOptions) -> Run {
    let (mut value, mut grad) = obj.value_and_gradient(&psi);
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    let mut gradient_norm;
    loop {
        let mut tangent = project_tangent(&psi, &grad);
        enforce_tail(gs, &mut tangent);
        let gnorm_sq = norm_sq(&tangent);
        gradient_norm = gnorm_sq.sqrt();
        if gradient_norm < opts.tol {
            converged = true;
            break;
        }
        if iterations >= opts.max_iters {
            break;
        }
        let mut step = INITIAL_STEP;
        let mut accepted = None;
        while step >= MIN_STEP {
            let mut trial: Vec<Complex64> = psi.iter().zip(&tangent).map(|(p, g)| p - g * step).collect();
            enforce_tail(gs, &mut trial);
            normalize(&mut trial);
            let trial_value = obj.value(&trial);
            if trial_value <= value - ARMIJO * step * gnorm_sq {
                accepted = Some(trial);
                break;
            }
            step *= BACKTRACK;
        }
        let Some(next) = accepted else { break };
        psi = next;
        (value, grad) = obj.value_and_gradient(&psi);
        history.push(value);
        iterations += 1;
    }
    Run {
        value,
        psi,
        iterations,
        converged,
        gradient_norm,
        history,
    }
}

/// Projected-gradient minimization of the variance sum over pure states.
/// Restarts run independently on streams `(seed, restart)`; the winner is the
/// lowest value, ties going to the lowest restart index.
pub fn minimize_variance_sum(gs: &GeneratorSet, opts: &MinimizeOptions) -> Result<MinimizeResult> {
    if opts.restarts == 0 {
        return Err(Error::InvalidParameter("restarts must be at least 1".into()));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    let bound = to_f64(algebra_bound(gs.spec())?);
    let obj = Objective::new(gs);
    let runs: Vec<Run> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream(opts.seed, r as u64);
            let start = initial_state(gs, r, &mut rng);
            descend(gs, &obj, start, opts)
        })
        .collect();
    let total_iterations = runs.iter().map(|r| r.iterations).sum();
    let (best_restart, best) = runs
        .into_iter()
        .enumerate()
        .reduce(|a, b| if b.1.value < a.1.value { b } else { a })
        .expect("at least one restart");
    let best_state = StateVector::normalized(best.psi)?;
    Ok(MinimizeResult {
        best_value: best.value,
        best_state,
        bound,
        gap: best.value - bound,
        restarts_used: opts.restarts,
        best_restart,
        iterations: best.iterations,
        total_iterations,
        converged: best.converged,
        gradient_norm: best.gradient_norm,
        history: best.history,
    })
}

/// Fidelity of the minimizer with the analytic saturating weight state.
pub fn overlap_with_saturating(gs: &GeneratorSet, result: &MinimizeResult) -> f64 {
    result.best_state.fidelity(&saturating_state(gs))
}

/// Fidelity of the minimizer with the coherent state sharing its first
/// moments; the whole coherent orbit saturates, so this is the meaningful
/// overlap for algebras whose minimizers are not unique.
pub fn overlap_with_coherent(gs: &GeneratorSet, result: &MinimizeResult) -> Result<f64> {
    nearest_coherent_fidelity(gs, &result.best_state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebras::{build_gellmann, build_su11, build_su2, build_wh, Bargmann};
    use crate::sur::{random_state_for, variance_sum};

    #[test]
    fn objective_matches_variance_sum_on_sphere() {
        for gs in [
            build_su2(3).unwrap(),
            build_wh(24).unwrap(),
            build_gellmann(4).unwrap(),
            build_su11(Bargmann::from_two_kappa(1).unwrap(), 24).unwrap(),
        ] {
            let s = random_state_for(&gs, 2, 0);
            let f = Objective::new(&gs).value(s.amplitudes());
            assert!((f - variance_sum(&s, &gs).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let gs = build_su2(4).unwrap();
        let s = random_state_for(&gs, 7, 0);
        assert!(gradient_check(&gs, &s, 1e-5).unwrap() < 1e-5);
        let wh = build_wh(32).unwrap();
        let s = random_state_for(&wh, 7, 1);
        assert!(gradient_check(&wh, &s, 1e-5).unwrap() < 1e-5);
        assert!(gradient_check(&wh, &s, 1e-2).is_err());
    }

    #[test]
    fn highest_weight_is_stationary() {
        for gs in [build_su2(4).unwrap(), build_wh(32).unwrap(), build_gellmann(3).unwrap()] {
            assert!(tangent_gradient_norm(&gs, &saturating_state(&gs)) < 1e-8);
        }
    }

    #[test]
    fn constant_objective_needs_no_steps() {
        let gs = build_gellmann(3).unwrap();
        let res = minimize_variance_sum(&gs, &MinimizeOptions { restarts: 2, ..Default::default() }).unwrap();
        assert!((res.best_value - 2.0).abs() < 1e-9);
        assert_eq!(res.iterations, 0);
        assert!(res.converged);
    }

    #[test]
    fn spin_one_minimum() {
        let gs = build_su2(2).unwrap();
        let res = minimize_variance_sum(&gs, &MinimizeOptions { restarts: 4, seed: 3, ..Default::default() }).unwrap();
        assert!(res.gap.abs() < 1e-6, "{res:?}");
        assert!(res.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn rejects_bad_options() {
        let gs = build_su2(1).unwrap();
        let bad = MinimizeOptions { restarts: 0, ..Default::default() };
        assert!(minimize_variance_sum(&gs, &bad).is_err());
        let bad = MinimizeOptions { tol: 0.0, ..Default::default() };
        assert!(minimize_variance_sum(&gs, &bad).is_err());
    }
}
