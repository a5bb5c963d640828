//! Checking variance-sum relations on states: the state-independent bounds,
//! the stronger su(1,1) inequality, the state-dependent Robertson product for
//! contrast, random states, and Born-rule sampling of observables.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng as _;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebras::{AlgebraSpec, GeneratorSet};
use crate::error::{Error, Result};
use crate::matcore::{
    clip_variance, commutator, inner, moments_unchecked, norm_sq, ComplexMatrix, StateVector, ZERO,
};
use crate::rng::{stream, Rng};
use crate::tol;
use crate::weights::{algebra_bound, to_f64};

/// Outcome of comparing one state against one relation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurReport {
    pub algebra: AlgebraSpec,
    pub relation: Relation,
    pub state: String,
    pub lhs: f64,
    pub bound: f64,
    pub bound_exact: String,
    pub margin: f64,
    pub satisfied: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_mass: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// Weighted, signed sum of generator variances against the irrep bound.
    VarianceSum,
    /// `<K_z>^2 - <K_x>^2 - <K_y>^2 >= kappa^2`.
    Su11Strong,
}

impl SurReport {
    fn new(
        algebra: AlgebraSpec,
        relation: Relation,
        lhs: f64,
        bound_exact: num_rational::Rational64,
        tail_mass: Option<f64>,
    ) -> Self {
        let bound = to_f64(bound_exact);
        let margin = lhs - bound;
        SurReport {
            algebra,
            relation,
            state: String::new(),
            lhs,
            bound,
            bound_exact: bound_exact.to_string(),
            margin,
            satisfied: margin >= -tol::MARGIN,
            tail_mass,
            seed: None,
        }
    }

    pub fn with_state(mut self, label: impl Into<String>, seed: Option<u64>) -> Self {
        self.state = label.into();
        self.seed = seed;
        self
    }
}

/// Number of levels making up the top decile of a truncated ladder.
pub fn tail_levels(cutoff: usize) -> usize {
    cutoff.div_ceil(10)
}

/// Probability in the top decile of levels, for truncated algebras.
pub fn tail_mass(gs: &GeneratorSet, s: &StateVector) -> Option<f64> {
    let cutoff = gs.spec().cutoff()?;
    let start = cutoff - tail_levels(cutoff);
    Some(norm_sq(&s.amplitudes()[start..]))
}

fn guard(gs: &GeneratorSet, s: &StateVector) -> Result<Option<f64>> {
    if s.dim() != gs.rep_dim() {
        return Err(Error::DimensionMismatch {
            expected: gs.rep_dim(),
            found: s.dim(),
        });
    }
    match (gs.spec().cutoff(), tail_mass(gs, s)) {
        (Some(cutoff), Some(mass)) if mass >= tol::TAIL_MASS => Err(Error::TailMass {
            mass,
            levels: tail_levels(cutoff),
            cutoff,
            threshold: tol::TAIL_MASS,
        }),
        (_, mass) => Ok(mass),
    }
}

pub(crate) fn variance_sum_unguarded(psi: &[Complex64], gs: &GeneratorSet) -> Result<f64> {
    let mut total = 0.0;
    for (e, &sign) in gs.generators().zip(gs.signature()) {
        let (_, var) = moments_unchecked(psi, e);
        total += sign as f64 * clip_variance(var)?;
    }
    Ok(gs.variance_weight() * total)
}

/// The quantity each relation bounds: `Var x + Var p` (wh),
/// `Var J_x + Var J_y + Var J_z` (su(2)), `Var K_x + Var K_y - Var K_z`
/// (su(1,1)), `(1/2) sum_a Var e_a` (su(n)).
pub fn variance_sum(s: &StateVector, gs: &GeneratorSet) -> Result<f64> {
    guard(gs, s)?;
    variance_sum_unguarded(s.amplitudes(), gs)
}

/// Compares [`variance_sum`] with the irrep's state-independent bound.
pub fn check_sur(s: &StateVector, gs: &GeneratorSet) -> Result<SurReport> {
    let tail = guard(gs, s)?;
    let lhs = variance_sum_unguarded(s.amplitudes(), gs)?;
    Ok(SurReport::new(
        *gs.spec(),
        Relation::VarianceSum,
        lhs,
        algebra_bound(gs.spec())?,
        tail,
    ))
}

/// `<K_z>^2 - <K_x>^2 - <K_y>^2` against `kappa^2`.
pub fn check_su11_strong(s: &StateVector, gs: &GeneratorSet) -> Result<SurReport> {
    let AlgebraSpec::Su11 { kappa, .. } = *gs.spec() else {
        return Err(Error::WrongAlgebra {
            expected: "su11",
            found: gs.spec().to_string(),
        });
    };
    let tail = guard(gs, s)?;
    let mut lhs = 0.0;
    for (e, &sign) in gs.generators().zip(gs.signature()) {
        let (mean, _) = moments_unchecked(s.amplitudes(), e);
        lhs -= sign as f64 * mean * mean;
    }
    Ok(SurReport::new(
        *gs.spec(),
        Relation::Su11Strong,
        lhs,
        kappa.value() * kappa.value(),
        tail,
    ))
}

/// Both sides of `Var A Var B >= |<[A, B]>|^2 / 4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobertsonPair {
    pub product: f64,
    pub bound: f64,
}

pub fn robertson_product(s: &StateVector, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<RobertsonPair> {
    let var_a = crate::matcore::variance(s, a)?;
    let var_b = crate::matcore::variance(s, b)?;
    let comm = commutator(a, b)?;
    let z = inner(s.amplitudes(), &comm.apply(s.amplitudes()));
    Ok(RobertsonPair {
        product: var_a * var_b,
        bound: z.norm_sqr() / 4.0,
    })
}

/// A weight state attaining the bound: the Fock vacuum, the lowest su(1,1)
/// state, the highest su(2) weight `|m = 2j>`, or the highest weight of the
/// su(n) defining irrep.
pub fn saturating_state(gs: &GeneratorSet) -> StateVector {
    let index = match *gs.spec() {
        AlgebraSpec::Su2 { two_j } => two_j as usize,
        _ => 0,
    };
    StateVector::basis(gs.rep_dim(), index).expect("index within representation")
}

pub(crate) fn gaussian_amplitudes(rng: &mut Rng, dim: usize) -> Vec<Complex64> {
    (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

pub fn haar_state_from(rng: &mut Rng, dim: usize) -> StateVector {
    loop {
        if let Ok(s) = StateVector::normalized(gaussian_amplitudes(rng, dim)) {
            return s;
        }
    }
}

/// Haar-distributed pure state: normalized i.i.d. standard complex Gaussians.
pub fn haar_random_state(dim: usize, seed: u64) -> Result<StateVector> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    Ok(haar_state_from(&mut stream(seed, 0), dim))
}

/// Number of levels random states may occupy: all of them for
/// finite-dimensional irreps, the bottom half of a truncated ladder.
pub fn random_support(gs: &GeneratorSet) -> usize {
    match gs.spec().cutoff() {
        Some(cutoff) => cutoff / 2,
        None => gs.rep_dim(),
    }
}

/// Random state for `gs` drawn from the `(seed, index)` stream; Haar on the
/// finite irrep or on the bottom half of a truncated ladder, zero-padded.
pub fn random_state_for(gs: &GeneratorSet, seed: u64, index: u64) -> StateVector {
    let mut rng = stream(seed, index);
    let support = random_support(gs);
    let mut amps = haar_state_from(&mut rng, support).into_amplitudes();
    amps.resize(gs.rep_dim(), ZERO);
    StateVector::new(amps).expect("padding preserves the norm")
}

/// Haar-random unitary: Gram-Schmidt on a complex Ginibre matrix.
pub fn haar_unitary(rng: &mut Rng, dim: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v = gaussian_amplitudes(rng, dim);
        for u in &cols {
            let proj = inner(u, &v);
            for (x, y) in v.iter_mut().zip(u) {
                *x -= proj * y;
            }
        }
        let n = norm_sq(&v).sqrt();
        if n > 1e-8 {
            cols.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    ComplexMatrix::from_fn(dim, |r, c| cols[c][r])
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<Complex64>>,
}

pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<HermitianEigen> {
    let deviation = m.hermiticity_deviation();
    if deviation > tol::STRUCTURAL {
        return Err(Error::NotHermitian { deviation });
    }
    let n = m.dim();
    let dm = DMatrix::from_fn(n, n, |r, c| m.get(r, c));
    let eig = dm.symmetric_eigen();
    let mut pairs: Vec<(f64, Vec<Complex64>)> = (0..n)
        .map(|k| (eig.eigenvalues[k], eig.eigenvectors.column(k).iter().copied().collect()))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let scale = m.max_abs().max(1.0);
    for (val, vec) in &pairs {
        let mv = m.apply(vec);
        let residual = mv
            .iter()
            .zip(vec)
            .map(|(a, b)| (a - b * *val).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if residual > tol::EIGEN_RESIDUAL * scale {
            return Err(Error::EigenResidual { residual });
        }
    }
    let (values, vectors) = pairs.into_iter().unzip();
    Ok(HermitianEigen { values, vectors })
}

/// `exp(-i sum_a theta_a e_a)` over the generators of `gs`.
pub fn group_element(gs: &GeneratorSet, theta: &[f64]) -> Result<ComplexMatrix> {
    if theta.len() != gs.len() {
        return Err(Error::DimensionMismatch {
            expected: gs.len(),
            found: theta.len(),
        });
    }
    let mut h = ComplexMatrix::zeros(gs.rep_dim());
    for (e, &t) in gs.generators().zip(theta) {
        h = &h + &e.scale_real(t);
    }
    let eig = hermitian_eigen(&h)?;
    let dim = gs.rep_dim();
    Ok(ComplexMatrix::from_fn(dim, |r, c| {
        eig.values
            .iter()
            .zip(&eig.vectors)
            .map(|(&l, v)| Complex64::from_polar(1.0, -l) * v[r] * v[c].conj())
            .sum()
    }))
}

/// Group-orbit image of [`saturating_state`]: a generalized coherent state.
pub fn coherent_state(gs: &GeneratorSet, theta: &[f64]) -> Result<StateVector> {
    let u = group_element(gs, theta)?;
    saturating_state(gs).apply(&u)
}

/// Fidelity of `s` with the coherent state sharing its first moments: the
/// displaced vacuum `|alpha>`, `alpha = <a>` (wh); the top eigenvector of
/// `n . J` along `<J>` (su(2)); the lowest eigenvector of the boost
/// `n_z K_z - n_x K_x - n_y K_y` along `<K>` (su(1,1)). Every pure state of
/// the su(n) defining irrep is coherent, so that case returns 1.
///
/// Saturating states of the variance-sum relations are exactly these coherent
/// states, so a value near 1 certifies that a minimizer sits on the orbit.
pub fn nearest_coherent_fidelity(gs: &GeneratorSet, s: &StateVector) -> Result<f64> {
    if s.dim() != gs.rep_dim() {
        return Err(Error::DimensionMismatch {
            expected: gs.rep_dim(),
            found: s.dim(),
        });
    }
    let psi = s.amplitudes();
    let mean = |m: &ComplexMatrix| inner(psi, &m.apply(psi)).re;
    match *gs.spec() {
        AlgebraSpec::Sun { .. } => Ok(1.0),
        AlgebraSpec::Wh { cutoff } => {
            let a = gs.lowering().expect("wh has a ladder");
            let alpha = inner(psi, &a.apply(psi));
            let mut amps = Vec::with_capacity(cutoff);
            let mut c = Complex64::new(1.0, 0.0);
            for m in 0..cutoff {
                amps.push(c);
                c = c * alpha / ((m + 1) as f64).sqrt();
            }
            Ok(s.fidelity(&StateVector::normalized(amps)?))
        }
        AlgebraSpec::Su2 { .. } => {
            let j = gs.spin_components().expect("su2 components");
            let v: Vec<f64> = j.iter().map(mean).collect();
            let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if len < tol::STRUCTURAL {
                return Ok(0.0);
            }
            let mut axis = ComplexMatrix::zeros(gs.rep_dim());
            for (m, x) in j.iter().zip(&v) {
                axis = &axis + &m.scale_real(x / len);
            }
            let eig = hermitian_eigen(&axis)?;
            let top = eig.vectors.last().expect("nonempty").clone();
            Ok(s.fidelity(&StateVector::normalized(top)?))
        }
        AlgebraSpec::Su11 { .. } => {
            let k: Vec<f64> = gs.generators().map(mean).collect();
            let norm = (k[2] * k[2] - k[0] * k[0] - k[1] * k[1]).sqrt();
            if !(norm > 0.0) {
                return Ok(0.0);
            }
            let boost = &(&gs.generator(2).scale_real(k[2] / norm) - &gs.generator(0).scale_real(k[0] / norm))
                - &gs.generator(1).scale_real(k[1] / norm);
            let eig = hermitian_eigen(&boost)?;
            Ok(s.fidelity(&StateVector::normalized(eig.vectors[0].clone())?))
        }
    }
}

/// Born-rule measurement record of one observable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleEstimate {
    pub shots: usize,
    pub seed: u64,
    /// Distinct eigenvalues and how often each was observed.
    pub outcomes: Vec<(f64, usize)>,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// Standard error of the sample variance.
    pub standard_error: f64,
    #[serde(skip)]
    pub samples: Vec<f64>,
}

impl SampleEstimate {
    /// `|variance - exact| <= k * standard_error`.
    pub fn within(&self, exact: f64, k: f64) -> bool {
        (self.variance - exact).abs() <= k * self.standard_error
    }
}

/// Measures `m` on `s` `shots` times: eigendecompose, draw eigenvalues with
/// probabilities `|<v|s>|^2`, and estimate the variance with its standard error.
pub fn sample_observable(s: &StateVector, m: &ComplexMatrix, shots: usize, seed: u64) -> Result<SampleEstimate> {
    if m.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: s.dim(),
        });
    }
    if shots < 2 {
        return Err(Error::InvalidParameter("need at least two shots".into()));
    }
    let eig = hermitian_eigen(m)?;
    let weights: Vec<f64> = eig
        .vectors
        .iter()
        .map(|v| inner(v, s.amplitudes()).norm_sqr())
        .collect();
    let dist = WeightedIndex::new(&weights).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut rng = stream(seed, 0);
    let mut counts = vec![0usize; eig.values.len()];
    let samples: Vec<f64> = (0..shots)
        .map(|_| {
            let k = dist.sample(&mut rng);
            counts[k] += 1;
            eig.values[k]
        })
        .collect();

    let n = shots as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let (m2, m4) = samples.iter().fold((0.0, 0.0), |(a, b), x| {
        let d = (x - mean) * (x - mean);
        (a + d, b + d * d)
    });
    let variance = m2 / (n - 1.0);
    let (c2, c4) = (m2 / n, m4 / n);
    // Var(s^2) = (mu_4 - sigma^4) / n + 2 sigma^4 / (n (n - 1)); the second term
    // is kept separate so two-point distributions (mu_4 = sigma^4) keep a floor
    let var_of_var = (c4 - c2 * c2).max(0.0) / n + 2.0 * variance * variance / (n * (n - 1.0));
    let standard_error = var_of_var.sqrt();

    let mut outcomes: Vec<(f64, usize)> = Vec::new();
    for (&val, &count) in eig.values.iter().zip(&counts) {
        match outcomes.last_mut() {
            Some((last, c)) if (val - *last).abs() <= tol::STRUCTURAL * val.abs().max(1.0) => *c += count,
            _ => outcomes.push((val, count)),
        }
    }
    outcomes.retain(|&(_, c)| c > 0);
    Ok(SampleEstimate {
        shots,
        seed,
        outcomes,
        mean,
        variance,
        standard_error,
        samples,
    })
}

/// Aggregate of a batch of [`check_sur`] runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSummary {
    pub trials: usize,
    pub min_margin: f64,
    pub max_margin: f64,
    pub all_satisfied: bool,
}

impl SweepSummary {
    pub fn of(reports: &[SurReport]) -> Self {
        SweepSummary {
            trials: reports.len(),
            min_margin: reports.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min),
            max_margin: reports.iter().map(|r| r.margin).fold(f64::NEG_INFINITY, f64::max),
            all_satisfied: reports.iter().all(|r| r.satisfied),
        }
    }
}

/// `check_sur` on `trials` random states, state `i` drawn from stream `(seed, i)`.
pub fn sweep(gs: &GeneratorSet, trials: usize, seed: u64) -> Result<Vec<SurReport>> {
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let s = random_state_for(gs, seed, i as u64);
            Ok(check_sur(&s, gs)?.with_state(format!("random:{i}"), Some(seed)))
        })
        .collect()
}

/// Exact rational bound as an `f64`, for callers that only need the number.
pub fn bound_value(spec: &AlgebraSpec) -> Result<f64> {
    Ok(algebra_bound(spec)?.to_f64().unwrap())
}
