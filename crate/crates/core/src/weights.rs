//! Weight theory for su(n) in exact rational arithmetic: metric matrix on the
//! fundamental-weight basis, the Weyl vector, the variance-sum lower bound
//! `2 <Lambda|delta>` and the quadratic Casimir eigenvalue.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::algebras::{AlgebraSpec, GeneratorSet};
use crate::error::{Error, Result};
use crate::matcore::ComplexMatrix;

/// Highest weight `(lambda_1, ..., lambda_r)` in the fundamental-weight basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DynkinLabel(Vec<u32>);

impl DynkinLabel {
    pub fn new(labels: Vec<u32>) -> Self {
        Self(labels)
    }

    /// `(1, 0, ..., 0)` of rank `n - 1`.
    pub fn fundamental(n: usize) -> Self {
        let mut v = vec![0; n.saturating_sub(1)];
        if let Some(first) = v.first_mut() {
            *first = 1;
        }
        Self(v)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn labels(&self) -> &[u32] {
        &self.0
    }

    /// Label of the conjugate irrep.
    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    fn as_rationals(&self) -> Vec<Rational64> {
        self.0.iter().map(|&l| Rational64::from_integer(l as i64)).collect()
    }

    /// Every label of rank `rank` with entries in `0..=max`, lexicographic.
    pub fn grid(rank: usize, max: u32) -> impl Iterator<Item = DynkinLabel> {
        let total = (max as usize + 1).pow(rank as u32);
        (0..total).map(move |mut idx| {
            let mut v = vec![0; rank];
            for slot in v.iter_mut().rev() {
                *slot = (idx % (max as usize + 1)) as u32;
                idx /= max as usize + 1;
            }
            DynkinLabel(v)
        })
    }
}

impl fmt::Display for DynkinLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for DynkinLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('(').trim_end_matches(')');
        if body.is_empty() {
            return Ok(Self(Vec::new()));
        }
        body.split(',')
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("Dynkin labels must be non-negative integers: `{s}`")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

/// Gram matrix of the su(n) fundamental weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricMatrix {
    n: usize,
    entries: Vec<Rational64>,
}

impl MetricMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.n - 1
    }

    /// 0-based access.
    pub fn get(&self, i: usize, j: usize) -> Rational64 {
        self.entries[i * self.rank() + j]
    }

    pub fn row_sums(&self) -> Vec<Rational64> {
        (0..self.rank())
            .map(|i| (0..self.rank()).map(|j| self.get(i, j)).sum())
            .collect()
    }
}

/// `G_ij = min(i, j) (n - max(i, j)) / n` with 1-based `i, j`.
pub fn metric(n: usize) -> Result<MetricMatrix> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("su(n) needs n >= 2, got {n}")));
    }
    let r = n - 1;
    let mut entries = Vec::with_capacity(r * r);
    for i in 1..=r {
        for j in 1..=r {
            let num = (i.min(j) * (n - i.max(j))) as i64;
            entries.push(Rational64::new(num, n as i64));
        }
    }
    Ok(MetricMatrix { n, entries })
}

/// `<mu|tau> = mu . G . tau`.
pub fn inner(mu: &[Rational64], tau: &[Rational64], g: &MetricMatrix) -> Result<Rational64> {
    let r = g.rank();
    for len in [mu.len(), tau.len()] {
        if len != r {
            return Err(Error::DimensionMismatch { expected: r, found: len });
        }
    }
    let mut acc = Rational64::zero();
    for i in 0..r {
        for j in 0..r {
            acc += mu[i] * g.get(i, j) * tau[j];
        }
    }
    Ok(acc)
}

/// Half the sum of positive roots: all Dynkin labels equal to one.
pub fn weyl_root(n: usize) -> Result<DynkinLabel> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("su(n) needs n >= 2, got {n}")));
    }
    Ok(DynkinLabel(vec![1; n - 1]))
}

fn check_label(n: usize, lam: &DynkinLabel) -> Result<MetricMatrix> {
    let g = metric(n)?;
    if lam.rank() != g.rank() {
        return Err(Error::InvalidParameter(format!(
            "su({n}) labels have {} entries, got {}",
            g.rank(),
            lam
        )));
    }
    Ok(g)
}

/// Lower bound `2 <Lambda|delta>` on `(1/2) sum_a Var(e_a)` in the irrep `lam`.
pub fn sur_bound(n: usize, lam: &DynkinLabel) -> Result<Rational64> {
    let g = check_label(n, lam)?;
    let delta = weyl_root(n)?.as_rationals();
    Ok(inner(&lam.as_rationals(), &delta, &g)? * 2)
}

/// Quadratic Casimir eigenvalue `c_2 = 2 <Lambda|delta> + <Lambda|Lambda>`.
pub fn casimir_eigenvalue(n: usize, lam: &DynkinLabel) -> Result<Rational64> {
    let g = check_label(n, lam)?;
    let l = lam.as_rationals();
    Ok(sur_bound(n, lam)? + inner(&l, &l, &g)?)
}

/// Casimir operator of a represented algebra: `(1/2) sum_a e_a^2` for su(n),
/// `J_x^2 + J_y^2 + J_z^2` for su(2), `K_z^2 - K_x^2 - K_y^2` for su(1,1) and
/// the identity for wh.
pub fn casimir_matrix(gs: &GeneratorSet) -> ComplexMatrix {
    let dim = gs.rep_dim();
    match gs.spec() {
        AlgebraSpec::Wh { .. } => ComplexMatrix::identity(dim),
        AlgebraSpec::Su11 { .. } => {
            let mut c = ComplexMatrix::zeros(dim);
            for (e, &s) in gs.generators().zip(gs.signature()) {
                // signature is (+, +, -); the Casimir carries the opposite sign
                c = &c - &(e * e).scale_real(s as f64);
            }
            c
        }
        AlgebraSpec::Su2 { .. } | AlgebraSpec::Sun { .. } => {
            let mut c = ComplexMatrix::zeros(dim);
            for e in gs.generators() {
                c = &c + &(e * e);
            }
            c.scale_real(gs.variance_weight())
        }
    }
}

/// The Casimir eigenvalue a [`casimir_matrix`] should be proportional to.
pub fn expected_casimir(spec: &AlgebraSpec) -> Result<Rational64> {
    match *spec {
        AlgebraSpec::Wh { .. } => Ok(Rational64::from_integer(1)),
        AlgebraSpec::Su2 { two_j } => {
            let j = Rational64::new(two_j as i64, 2);
            Ok(j * (j + 1))
        }
        AlgebraSpec::Su11 { kappa, .. } => {
            let k = kappa.value();
            Ok(k * (k - 1))
        }
        AlgebraSpec::Sun { n } => casimir_eigenvalue(n, &DynkinLabel::fundamental(n)),
    }
}

/// Bound of each algebra's variance-sum relation for a constructed irrep:
/// 1 (wh), j (su(2)), kappa (su(1,1)), `2 <Lambda|delta>` (su(n) fundamental).
pub fn algebra_bound(spec: &AlgebraSpec) -> Result<Rational64> {
    match *spec {
        AlgebraSpec::Wh { .. } => Ok(Rational64::from_integer(1)),
        AlgebraSpec::Su2 { two_j } => Ok(Rational64::new(two_j as i64, 2)),
        AlgebraSpec::Su11 { kappa, .. } => Ok(kappa.value()),
        AlgebraSpec::Sun { n } => sur_bound(n, &DynkinLabel::fundamental(n)),
    }
}

pub fn to_f64(q: Rational64) -> f64 {
    q.to_f64().expect("rational fits in f64")
}
