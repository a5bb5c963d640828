//! Collective su(n) operators on `N` particles in the defining irrep and two
//! separability tests built from them.
//!
//! * The Cartan-versus-rest inequality
//!   `(N - 1) sum_k Var(E_k) >= sum_m <E_m^2> - 2 (n - 1) N`, evaluated exactly
//!   as written (Cartan index `k`, off-diagonal index `m`).
//! * The total-variance criterion: for product states variances add, so
//!   `(1/2) sum_a Var(E_a) >= N (n - 1)`; falling below certifies entanglement.
//!
//! Collective operators act structurally (one site at a time) so states of up
//! to `MAX_DIM` amplitudes never need a dense `n^N x n^N` matrix; dense
//! matrices are built on request for small systems.

use num_complex::Complex64;
use num_rational::Rational64;
use rand::Rng as _;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebras::{build_gellmann, AlgebraSpec, GeneratorSet};
use crate::error::{Error, Result};
use crate::exact::{gellmann_exact, ExactMatrix};
use crate::matcore::{inner, kron, kron_states, norm_sq, ComplexMatrix, StateVector, ZERO};
use crate::rng::{stream, Rng};
use crate::sur::{haar_state_from, haar_unitary};
use crate::tol;
use crate::weights::{sur_bound, to_f64, DynkinLabel};

/// Largest many-body dimension `n^N` accepted.
pub const MAX_DIM: usize = 4096;

/// `E_a = sum_i 1 (x) ... (x) e_a (x) ... (x) 1` for every single-particle generator `e_a`.
#[derive(Debug, Clone)]
pub struct CollectiveSet {
    n: usize,
    particles: usize,
    single: GeneratorSet,
}

impl CollectiveSet {
    /// Lifts an su(n) defining-irrep generator set (possibly conjugated by a
    /// unitary) to `particles` sites.
    pub fn from_generators(single: GeneratorSet, particles: usize) -> Result<Self> {
        let AlgebraSpec::Sun { n } = *single.spec() else {
            return Err(Error::WrongAlgebra {
                expected: "su(n) defining irrep",
                found: single.spec().to_string(),
            });
        };
        if particles < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 particles, got {particles}")));
        }
        let dim = checked_dim(n, particles)?;
        let _ = dim;
        Ok(CollectiveSet { n, particles, single })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn dim(&self) -> usize {
        self.n.pow(self.particles as u32)
    }

    pub fn single(&self) -> &GeneratorSet {
        &self.single
    }

    pub fn cartan_count(&self) -> usize {
        self.single.cartan().len()
    }

    pub fn offdiag_count(&self) -> usize {
        self.single.offdiag().len()
    }

    /// `E_a psi` for generator `a` in contract order (off-diagonal, then Cartan).
    pub fn apply(&self, alpha: usize, psi: &[Complex64]) -> Vec<Complex64> {
        let op = self.single.generator(alpha);
        let mut out = vec![ZERO; psi.len()];
        for site in 0..self.particles {
            accumulate_site(op, site, self.n, self.particles, psi, &mut out);
        }
        out
    }

    /// Dense `n^N x n^N` matrix of `E_a`.
    pub fn matrix(&self, alpha: usize) -> ComplexMatrix {
        let op = self.single.generator(alpha);
        let id = ComplexMatrix::identity(self.n);
        let mut total = ComplexMatrix::zeros(self.dim());
        for site in 0..self.particles {
            let mut term = if site == 0 { op.clone() } else { id.clone() };
            for j in 1..self.particles {
                term = kron(&term, if j == site { op } else { &id });
            }
            total = &total + &term;
        }
        total
    }

    pub fn cartan(&self) -> Vec<ComplexMatrix> {
        let off = self.offdiag_count();
        (off..off + self.cartan_count()).map(|a| self.matrix(a)).collect()
    }

    pub fn offdiag(&self) -> Vec<ComplexMatrix> {
        (0..self.offdiag_count()).map(|a| self.matrix(a)).collect()
    }
}

fn checked_dim(n: usize, particles: usize) -> Result<usize> {
    let dim = (n as u128).checked_pow(particles as u32).unwrap_or(u128::MAX);
    if dim > MAX_DIM as u128 {
        return Err(Error::SizeCap {
            dim: dim.min(usize::MAX as u128) as usize,
            cap: MAX_DIM,
        });
    }
    Ok(dim as usize)
}

/// `out += (1 (x) .. op_site .. (x) 1) psi`, site 0 most significant.
fn accumulate_site(op: &ComplexMatrix, site: usize, n: usize, particles: usize, psi: &[Complex64], out: &mut [Complex64]) {
    let stride = n.pow((particles - 1 - site) as u32);
    let block = stride * n;
    for base in (0..psi.len()).step_by(block) {
        for offset in 0..stride {
            for col in 0..n {
                let amp = psi[base + offset + col * stride];
                if amp == ZERO {
                    continue;
                }
                for row in 0..n {
                    let m = op.get(row, col);
                    if m != ZERO {
                        out[base + offset + row * stride] += m * amp;
                    }
                }
            }
        }
    }
}

/// `(U (x) U (x) ... (x) U) psi`.
pub fn apply_product_unitary(u: &ComplexMatrix, n: usize, particles: usize, psi: &[Complex64]) -> Vec<Complex64> {
    let mut cur = psi.to_vec();
    for site in 0..particles {
        let mut next = vec![ZERO; cur.len()];
        accumulate_site(u, site, n, particles, &cur, &mut next);
        cur = next;
    }
    cur
}

/// Collective generators of su(n) on `particles` sites in the Gell-Mann basis.
pub fn collective_operators(n: usize, particles: usize) -> Result<CollectiveSet> {
    checked_dim(n.max(2), particles)?;
    CollectiveSet::from_generators(build_gellmann(n)?, particles)
}

/// Convex combination of pure states, `rho = sum_i p_i |psi_i><psi_i|`.
#[derive(Debug, Clone)]
pub struct Mixture {
    weights: Vec<f64>,
    states: Vec<StateVector>,
}

impl Mixture {
    pub fn new(weights: Vec<f64>, states: Vec<StateVector>) -> Result<Self> {
        if weights.is_empty() || weights.len() != states.len() {
            return Err(Error::InvalidParameter("mixture needs one weight per state".into()));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) || (weights.iter().sum::<f64>() - 1.0).abs() > tol::STRUCTURAL {
            return Err(Error::InvalidParameter("mixture weights must be a probability vector".into()));
        }
        let dim = states[0].dim();
        if let Some(s) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: s.dim() });
        }
        Ok(Mixture { weights, states })
    }

    pub fn pure(s: StateVector) -> Self {
        Mixture {
            weights: vec![1.0],
            states: vec![s],
        }
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn components(&self) -> impl Iterator<Item = (f64, &StateVector)> {
        self.weights.iter().copied().zip(&self.states)
    }

    /// `(<E_a>, <E_a^2>)` in the mixture.
    fn moments(&self, set: &CollectiveSet, alpha: usize) -> (f64, f64) {
        self.components().fold((0.0, 0.0), |(m1, m2), (p, s)| {
            let image = set.apply(alpha, s.amplitudes());
            (m1 + p * inner(s.amplitudes(), &image).re, m2 + p * norm_sq(&image))
        })
    }

    /// `Var(E_a)` in the mixture.
    pub fn variance(&self, set: &CollectiveSet, alpha: usize) -> f64 {
        let (m1, m2) = self.moments(set, alpha);
        m2 - m1 * m1
    }
}

/// Both separability tests on one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub n: usize,
    pub particles: usize,
    /// `(N - 1) sum_k Var(E_k)` over Cartan generators.
    pub lhs: f64,
    /// `sum_m <E_m^2> - 2 (n - 1) N` over off-diagonal generators.
    pub rhs: f64,
    /// `lhs < rhs - 1e-9`.
    pub violated: bool,
    /// `(1/2) sum_a Var(E_a)` over all generators.
    pub total_variance: f64,
    /// `N * 2 <Lambda_fund|delta>`.
    pub total_variance_bound: f64,
    pub total_violated: bool,
}

impl WitnessReport {
    pub fn margin(&self) -> f64 {
        self.lhs - self.rhs
    }

    pub fn total_margin(&self) -> f64 {
        self.total_variance - self.total_variance_bound
    }

    pub fn entangled(&self) -> bool {
        self.violated || self.total_violated
    }
}

pub fn witness_mixture(rho: &Mixture, set: &CollectiveSet) -> Result<WitnessReport> {
    if rho.dim() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            found: rho.dim(),
        });
    }
    let (n, particles) = (set.n(), set.particles());
    let off = set.offdiag_count();
    let mut cartan_var = 0.0;
    let mut offdiag_sq = 0.0;
    let mut total = 0.0;
    for alpha in 0..off + set.cartan_count() {
        let (m1, m2) = rho.moments(set, alpha);
        let var = (m2 - m1 * m1).max(0.0);
        total += var;
        if alpha < off {
            offdiag_sq += m2;
        } else {
            cartan_var += var;
        }
    }
    let lhs = (particles - 1) as f64 * cartan_var;
    let rhs = offdiag_sq - (2 * (n - 1) * particles) as f64;
    let total_variance = 0.5 * total;
    let total_variance_bound = particles as f64 * to_f64(sur_bound(n, &DynkinLabel::fundamental(n))?);
    Ok(WitnessReport {
        n,
        particles,
        lhs,
        rhs,
        violated: lhs < rhs - tol::MARGIN,
        total_variance,
        total_variance_bound,
        total_violated: total_variance < total_variance_bound - tol::MARGIN,
    })
}

pub fn witness_with(s: &StateVector, set: &CollectiveSet) -> Result<WitnessReport> {
    witness_mixture(&Mixture::pure(s.clone()), set)
}

/// Evaluates both separability tests for `particles` copies of the su(n)
/// defining irrep.
pub fn witness(s: &StateVector, n: usize, particles: usize) -> Result<WitnessReport> {
    let set = collective_operators(n, particles)?;
    witness_with(s, &set)
}

/// All permutations of `0..n` with their signs.
fn signed_permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    if n == 0 {
        return vec![(Vec::new(), 1.0)];
    }
    let mut out = Vec::new();
    for (perm, sign) in signed_permutations(n - 1) {
        // inserting n-1 at position p from the right adds p inversions
        for p in 0..n {
            let mut v = perm.clone();
            v.insert(n - 1 - p, n - 1);
            out.push((v, if p % 2 == 0 { sign } else { -sign }));
        }
    }
    out
}

/// Normalized antisymmetrization of `|0> (x) |1> (x) ... (x) |n-1>`: the
/// scalar-irrep state of `n` particles in the su(n) defining irrep.
pub fn slater_state(n: usize) -> Result<StateVector> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need n >= 2, got {n}")));
    }
    let dim = checked_dim(n, n)?;
    let perms = signed_permutations(n);
    let norm = (perms.len() as f64).sqrt().recip();
    let mut amps = vec![ZERO; dim];
    for (perm, sign) in perms {
        let index = perm.iter().fold(0, |acc, &d| acc * n + d);
        amps[index] = Complex64::new(sign * norm, 0.0);
    }
    StateVector::new(amps)
}

/// Tensor product of independent Haar states, one per particle.
pub fn random_product_state(rng: &mut Rng, n: usize, particles: usize) -> StateVector {
    let mut s = haar_state_from(rng, n);
    for _ in 1..particles {
        s = kron_states(&s, &haar_state_from(rng, n));
    }
    s
}

/// Mixture of `components` random product states with Dirichlet(1, ..., 1) weights.
pub fn random_separable_mixture(rng: &mut Rng, n: usize, particles: usize, components: usize) -> Mixture {
    let raw: Vec<f64> = (0..components).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    let states = (0..components).map(|_| random_product_state(rng, n, particles)).collect();
    Mixture::new(raw.iter().map(|w| w / total).collect(), states).expect("valid mixture")
}

/// Random product state number `index` of the stream family `seed`.
pub fn random_product_for(n: usize, particles: usize, seed: u64, index: u64) -> StateVector {
    random_product_state(&mut stream(seed, index), n, particles)
}

/// Random separable mixture number `index` of the stream family `seed`, with
/// `components` product states or, when `None`, a uniform draw from 2 to 4.
pub fn random_mixture_for(n: usize, particles: usize, components: Option<usize>, seed: u64, index: u64) -> Mixture {
    let mut rng = stream(seed, index);
    let k = components.unwrap_or_else(|| rng.random_range(2..=4));
    random_separable_mixture(&mut rng, n, particles, k)
}

/// `I / n^N` as an equal-weight mixture of product basis states.
pub fn maximally_mixed(n: usize, particles: usize) -> Result<Mixture> {
    let dim = checked_dim(n, particles)?;
    if dim > 256 {
        return Err(Error::SizeCap { dim, cap: 256 });
    }
    let states = (0..dim).map(|i| StateVector::basis(dim, i)).collect::<Result<Vec<_>>>()?;
    Mixture::new(vec![1.0 / dim as f64; dim], states)
}

/// The single-particle operator identities behind the separability inequality.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityReport {
    pub n: usize,
    /// `sum_k e_k^2 = c I` over Cartan generators: the factor `c`.
    pub cartan_square: f64,
    pub cartan_square_exact: String,
    /// `sum_m e_m^2 = c I` over off-diagonal generators.
    pub offdiag_square: f64,
    pub offdiag_square_exact: String,
    /// `sum_a <e_a>^2` on pure states, averaged over the random trials.
    pub bloch_sum: f64,
    pub bloch_exact: String,
    pub bloch_max_deviation: f64,
    /// Constant `2 (n - 1)` multiplying `N` in the inequality.
    pub witness_constant: u64,
    pub holds: bool,
}

fn exact_square_sum(mats: &[ExactMatrix]) -> Option<Rational64> {
    let n = mats.first()?.dim();
    let mut sum = ExactMatrix::zeros(n);
    for m in mats {
        for r in 0..n {
            for c in 0..n {
                let mut acc = sum.get(r, c).clone();
                for k in 0..n {
                    acc = &acc + &(m.get(r, k) * m.get(k, c));
                }
                sum.set(r, c, acc);
            }
        }
    }
    let diag = sum.get(0, 0).clone();
    let scalar = (0..n).all(|r| (0..n).all(|c| if r == c { *sum.get(r, c) == diag } else { sum.get(r, c).is_zero() }));
    if !scalar || !diag.im.is_zero() {
        return None;
    }
    diag.re.as_rational()
}

/// Checks, for the su(n) Gell-Mann basis, `sum_k e_k^2 = (2(n-1)/n) I`,
/// `sum_m e_m^2 = 2(n-1) I` (exactly) and `sum_a <e_a>^2 = 2(n-1)/n` on
/// `trials` random pure states drawn from `seed`.
pub fn identity_checks(n: usize, trials: usize, seed: u64) -> Result<IdentityReport> {
    let exact = gellmann_exact(n)?;
    let pairs = n * (n - 1);
    let (off, cartan) = exact.split_at(pairs);
    let want_cartan = Rational64::new(2 * (n as i64 - 1), n as i64);
    let want_off = Rational64::from_integer(2 * (n as i64 - 1));
    let cartan_exact = exact_square_sum(cartan);
    let off_exact = exact_square_sum(off);

    let gs = build_gellmann(n)?;
    let square_factor = |mats: &[ComplexMatrix]| -> f64 {
        let mut sum = ComplexMatrix::zeros(n);
        for m in mats {
            sum = &sum + &(m * m);
        }
        sum.identity_factor(tol::STRUCTURAL).map_or(f64::NAN, |c| c.re)
    };
    let cartan_square = square_factor(gs.cartan());
    let offdiag_square = square_factor(gs.offdiag());

    let target = to_f64(want_cartan);
    let blochs: Vec<f64> = (0..trials.max(1))
        .into_par_iter()
        .map(|i| {
            let s = haar_state_from(&mut stream(seed, i as u64), n);
            gs.generators()
                .map(|e| inner(s.amplitudes(), &e.apply(s.amplitudes())).re.powi(2))
                .sum()
        })
        .collect();
    let bloch_sum = blochs.iter().sum::<f64>() / blochs.len() as f64;
    let bloch_max_deviation = blochs.iter().map(|b| (b - target).abs()).fold(0.0, f64::max);

    let holds = cartan_exact == Some(want_cartan)
        && off_exact == Some(want_off)
        && (cartan_square - target).abs() < tol::STRUCTURAL
        && (offdiag_square - to_f64(want_off)).abs() < tol::STRUCTURAL
        && bloch_max_deviation < tol::MARGIN;
    Ok(IdentityReport {
        n,
        cartan_square,
        cartan_square_exact: cartan_exact.map_or_else(|| "not scalar".into(), |q| q.to_string()),
        offdiag_square,
        offdiag_square_exact: off_exact.map_or_else(|| "not scalar".into(), |q| q.to_string()),
        bloch_sum,
        bloch_exact: want_cartan.to_string(),
        bloch_max_deviation,
        witness_constant: 2 * (n as u64 - 1),
        holds,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub trials: usize,
    /// Smallest `Var(E_1)(rho) - sum_i p_i Var(E_1)(psi_i)` seen.
    pub min_convexity_gap: f64,
    pub min_witness_margin: f64,
    pub min_total_margin: f64,
    pub convexity_holds: bool,
    pub never_violated: bool,
}

/// Random separable mixtures (2 to 4 product components each): checks the
/// concavity of the variance of the first collective Cartan generator and that
/// neither separability test fires.
pub fn mixed_state_convexity_check(n: usize, particles: usize, trials: usize, seed: u64) -> Result<ConvexityReport> {
    convexity_check_with(n, particles, trials, None, seed)
}

/// As [`mixed_state_convexity_check`], with a fixed component count when `components` is given.
pub fn convexity_check_with(
    n: usize,
    particles: usize,
    trials: usize,
    components: Option<usize>,
    seed: u64,
) -> Result<ConvexityReport> {
    let set = collective_operators(n, particles)?;
    let first_cartan = set.offdiag_count();
    let results: Vec<Result<(f64, f64, f64)>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let rho = random_mixture_for(n, particles, components, seed, i as u64);
            let mixed_var = rho.variance(&set, first_cartan);
            let averaged: f64 = rho
                .components()
                .map(|(p, s)| p * Mixture::pure(s.clone()).variance(&set, first_cartan))
                .sum();
            let report = witness_mixture(&rho, &set)?;
            Ok((mixed_var - averaged, report.margin(), report.total_margin()))
        })
        .collect();
    let mut out = ConvexityReport {
        trials,
        min_convexity_gap: f64::INFINITY,
        min_witness_margin: f64::INFINITY,
        min_total_margin: f64::INFINITY,
        convexity_holds: true,
        never_violated: true,
    };
    for r in results {
        let (gap, margin, total) = r?;
        out.min_convexity_gap = out.min_convexity_gap.min(gap);
        out.min_witness_margin = out.min_witness_margin.min(margin);
        out.min_total_margin = out.min_total_margin.min(total);
    }
    out.convexity_holds = out.min_convexity_gap >= -tol::MARGIN;
    out.never_violated = out.min_witness_margin >= -tol::MARGIN && out.min_total_margin >= -tol::MARGIN;
    Ok(out)
}

/// Conjugates the single-particle basis by a Haar-random unitary drawn from `seed`.
pub fn conjugated_set(n: usize, particles: usize, seed: u64) -> Result<(CollectiveSet, ComplexMatrix)> {
    let u = haar_unitary(&mut stream(seed, 0), n);
    let gs = build_gellmann(n)?.conjugated(&u)?;
    Ok((CollectiveSet::from_generators(gs, particles)?, u))
}
