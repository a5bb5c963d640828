//! Matrix representations: truncated Weyl-Heisenberg, spin-j su(2), truncated
//! positive discrete series of su(1,1), and generalized Gell-Mann bases of su(n).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{gellmann_exact, parse_rational};
use crate::matcore::{ComplexMatrix, StateVector, I, ONE, ZERO};

/// Smallest cutoff accepted for truncated ladders.
pub const MIN_CUTOFF: usize = 8;

/// Bargmann index of a positive-discrete-series su(1,1) irrep: `k/2` for
/// `k >= 1`, or one of the two limit labels `1/4`, `3/4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bargmann(Rational64);

impl Bargmann {
    pub fn new(kappa: Rational64) -> Result<Self> {
        let half_integer = (kappa * 2).is_integer() && kappa > Rational64::from_integer(0);
        let quarter = kappa == Rational64::new(1, 4) || kappa == Rational64::new(3, 4);
        if half_integer || quarter {
            Ok(Self(kappa))
        } else {
            Err(Error::InvalidParameter(format!(
                "Bargmann index must be 1/4, 3/4 or a positive half-integer, got {kappa}"
            )))
        }
    }

    pub fn from_two_kappa(two_kappa: u32) -> Result<Self> {
        Self::new(Rational64::new(two_kappa as i64, 2))
    }

    pub fn value(self) -> Rational64 {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        self.0.to_f64().unwrap()
    }
}

impl fmt::Display for Bargmann {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Bargmann {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let q = parse_rational(s.trim())
            .ok_or_else(|| Error::Parse(format!("bad Bargmann index `{s}`")))?;
        Bargmann::new(q)
    }
}

/// Which algebra and which (truncated) irrep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlgebraSpec {
    Wh { cutoff: usize },
    Su2 { two_j: u32 },
    Su11 { kappa: Bargmann, cutoff: usize },
    /// Defining (fundamental) irrep of su(n).
    Sun { n: usize },
}

impl AlgebraSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            AlgebraSpec::Wh { cutoff } | AlgebraSpec::Su11 { cutoff, .. } if cutoff < MIN_CUTOFF => {
                Err(Error::InvalidParameter(format!(
                    "cutoff {cutoff} below minimum {MIN_CUTOFF}"
                )))
            }
            AlgebraSpec::Sun { n } if n < 2 => {
                Err(Error::InvalidParameter(format!("su(n) needs n >= 2, got {n}")))
            }
            _ => Ok(()),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            AlgebraSpec::Wh { .. } => "wh",
            AlgebraSpec::Su2 { .. } => "su2",
            AlgebraSpec::Su11 { .. } => "su11",
            AlgebraSpec::Sun { .. } => "su",
        }
    }

    pub fn cutoff(&self) -> Option<usize> {
        match *self {
            AlgebraSpec::Wh { cutoff } | AlgebraSpec::Su11 { cutoff, .. } => Some(cutoff),
            _ => None,
        }
    }

    pub fn is_truncated(&self) -> bool {
        self.cutoff().is_some()
    }

    pub fn is_compact(&self) -> bool {
        matches!(self, AlgebraSpec::Su2 { .. } | AlgebraSpec::Sun { .. })
    }

    pub fn build(&self) -> Result<GeneratorSet> {
        match *self {
            AlgebraSpec::Wh { cutoff } => build_wh(cutoff),
            AlgebraSpec::Su2 { two_j } => build_su2(two_j),
            AlgebraSpec::Su11 { kappa, cutoff } => build_su11(kappa, cutoff),
            AlgebraSpec::Sun { n } => build_gellmann(n),
        }
    }
}

/// `wh:cutoff=K`, `su2:j=3/2`, `su11:kappa=1/2,cutoff=K`, `su:3`.
impl fmt::Display for AlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraSpec::Wh { cutoff } => write!(f, "wh:cutoff={cutoff}"),
            AlgebraSpec::Su2 { two_j } => {
                write!(f, "su2:j={}", Rational64::new(*two_j as i64, 2))
            }
            AlgebraSpec::Su11 { kappa, cutoff } => {
                write!(f, "su11:kappa={kappa},cutoff={cutoff}")
            }
            AlgebraSpec::Sun { n } => write!(f, "su:{n}"),
        }
    }
}

impl FromStr for AlgebraSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, rest) = s.split_once(':').unwrap_or((s, ""));
        let bad = |msg: &str| Error::Parse(format!("algebra `{s}`: {msg}"));
        let params = |text: &str| -> Result<Vec<(String, String)>> {
            text.split(',')
                .filter(|p| !p.is_empty())
                .map(|p| {
                    p.split_once('=')
                        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                        .ok_or_else(|| bad("expected key=value"))
                })
                .collect()
        };
        let spec = match head {
            "wh" => {
                let mut cutoff = 64;
                for (k, v) in params(rest)? {
                    match k.as_str() {
                        "cutoff" => cutoff = v.parse().map_err(|_| bad("bad cutoff"))?,
                        _ => return Err(bad("unknown key")),
                    }
                }
                AlgebraSpec::Wh { cutoff }
            }
            "su2" => {
                let mut two_j = None;
                for (k, v) in params(rest)? {
                    match k.as_str() {
                        "j" => two_j = Some(parse_two_j(&v)?),
                        _ => return Err(bad("unknown key")),
                    }
                }
                AlgebraSpec::Su2 {
                    two_j: two_j.ok_or_else(|| bad("missing j"))?,
                }
            }
            "su11" => {
                let mut kappa = None;
                let mut cutoff = 200;
                for (k, v) in params(rest)? {
                    match k.as_str() {
                        "kappa" => kappa = Some(v.parse()?),
                        "cutoff" => cutoff = v.parse().map_err(|_| bad("bad cutoff"))?,
                        _ => return Err(bad("unknown key")),
                    }
                }
                AlgebraSpec::Su11 {
                    kappa: kappa.ok_or_else(|| bad("missing kappa"))?,
                    cutoff,
                }
            }
            "su" => {
                let n_text = rest.split(':').next().unwrap_or("");
                let n = n_text.parse().map_err(|_| bad("expected su:<n>"))?;
                AlgebraSpec::Sun { n }
            }
            _ => return Err(bad("unknown algebra family")),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl Serialize for AlgebraSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AlgebraSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a spin `j` given as `1`, `3/2`, or `1.5` into `2j`.
pub fn parse_two_j(s: &str) -> Result<u32> {
    let bad = || Error::Parse(format!("spin `{s}` is not a non-negative half-integer"));
    let q = match parse_rational(s.trim()) {
        Some(q) => q,
        None => {
            let x: f64 = s.trim().parse().map_err(|_| bad())?;
            let twice = (2.0 * x).round();
            if (2.0 * x - twice).abs() > 1e-12 {
                return Err(bad());
            }
            Rational64::new(twice as i64, 2)
        }
    };
    let twice = q * 2;
    if !twice.is_integer() || *twice.numer() < 0 {
        return Err(bad());
    }
    Ok(*twice.numer() as u32)
}

/// Ordered operator basis of a represented algebra.
///
/// Generators are exposed in contract order: off-diagonal first, then Cartan.
/// `signature` follows the same order.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    spec: AlgebraSpec,
    names: Vec<String>,
    offdiag: Vec<ComplexMatrix>,
    cartan: Vec<ComplexMatrix>,
    signature: Vec<i8>,
    rep_dim: usize,
    raising: Option<ComplexMatrix>,
}

impl GeneratorSet {
    pub fn spec(&self) -> &AlgebraSpec {
        &self.spec
    }

    pub fn rep_dim(&self) -> usize {
        self.rep_dim
    }

    pub fn cartan(&self) -> &[ComplexMatrix] {
        &self.cartan
    }

    pub fn offdiag(&self) -> &[ComplexMatrix] {
        &self.offdiag
    }

    pub fn len(&self) -> usize {
        self.offdiag.len() + self.cartan.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn generators(&self) -> impl Iterator<Item = &ComplexMatrix> {
        self.offdiag.iter().chain(self.cartan.iter())
    }

    pub fn generator(&self, index: usize) -> &ComplexMatrix {
        if index < self.offdiag.len() {
            &self.offdiag[index]
        } else {
            &self.cartan[index - self.offdiag.len()]
        }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn signature(&self) -> &[i8] {
        &self.signature
    }

    /// Factor turning the signed sum of variances of the stored generators
    /// into the quantity bounded by each algebra's relation: 1 for wh and
    /// su(1,1), 1/2 for su(n), 1/4 for su(2) (stored generators are `2 J_a`).
    pub fn variance_weight(&self) -> f64 {
        match self.spec {
            AlgebraSpec::Wh { .. } | AlgebraSpec::Su11 { .. } => 1.0,
            AlgebraSpec::Su2 { .. } => 0.25,
            AlgebraSpec::Sun { .. } => 0.5,
        }
    }

    /// Ladder raising operator (`a^dagger`, `J_+`, `K_+`), absent for su(n).
    pub fn raising(&self) -> Option<&ComplexMatrix> {
        self.raising.as_ref()
    }

    pub fn lowering(&self) -> Option<ComplexMatrix> {
        self.raising.as_ref().map(ComplexMatrix::adjoint)
    }

    /// `a^dagger a` for wh.
    pub fn number_operator(&self) -> Option<ComplexMatrix> {
        match self.spec {
            AlgebraSpec::Wh { .. } => {
                let up = self.raising.as_ref()?;
                Some(up * &up.adjoint())
            }
            _ => None,
        }
    }

    /// su(2) generators in the physics convention `J_x, J_y, J_z`.
    pub fn spin_components(&self) -> Option<[ComplexMatrix; 3]> {
        match self.spec {
            AlgebraSpec::Su2 { .. } => Some([
                self.offdiag[0].scale_real(0.5),
                self.offdiag[1].scale_real(0.5),
                self.cartan[0].scale_real(0.5),
            ]),
            _ => None,
        }
    }

    /// Every generator replaced by `U e U^dagger`.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Result<GeneratorSet> {
        let conj = |ms: &[ComplexMatrix]| -> Result<Vec<ComplexMatrix>> {
            ms.iter().map(|m| m.conjugate_by(u)).collect()
        };
        Ok(GeneratorSet {
            spec: self.spec,
            names: self.names.clone(),
            offdiag: conj(&self.offdiag)?,
            cartan: conj(&self.cartan)?,
            signature: self.signature.clone(),
            rep_dim: self.rep_dim,
            raising: self.raising.as_ref().map(|r| r.conjugate_by(u)).transpose()?,
        })
    }
}

fn ladder(dim: usize, coeff: impl Fn(usize) -> f64) -> ComplexMatrix {
    let mut up = ComplexMatrix::zeros(dim);
    for m in 0..dim.saturating_sub(1) {
        up.set(m + 1, m, Complex64::new(coeff(m), 0.0));
    }
    up
}

/// `((up + down) / 2, (up - down) / 2i)` for `down = up^dagger`.
fn cartesian_pair(up: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let down = up.adjoint();
    let x = (up + &down).scale_real(0.5);
    let y = (up - &down).scale(Complex64::new(0.0, -0.5));
    (x, y)
}

/// Truncated Fock representation: `a^dagger |m> = sqrt(m+1) |m+1>` below the cutoff.
pub fn build_wh(cutoff: usize) -> Result<GeneratorSet> {
    let spec = AlgebraSpec::Wh { cutoff };
    spec.validate()?;
    let up = ladder(cutoff, |m| ((m + 1) as f64).sqrt());
    let down = up.adjoint();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let x = (&down + &up).scale_real(s);
    // p = (a - a^dagger) / (i sqrt 2)
    let p = (&down - &up).scale(Complex64::new(0.0, -s));
    Ok(GeneratorSet {
        spec,
        names: vec!["x".into(), "p".into()],
        offdiag: vec![x, p],
        cartan: Vec::new(),
        signature: vec![1, 1],
        rep_dim: cutoff,
        raising: Some(up),
    })
}

/// Spin-j irrep in the weight basis `J_z |m> = (m - j) |m>`, `0 <= m <= 2j`.
/// Stored generators are `2 J_x, 2 J_y, 2 J_z`.
pub fn build_su2(two_j: u32) -> Result<GeneratorSet> {
    let dim = two_j as usize + 1;
    let tj = two_j as f64;
    let up = ladder(dim, |m| (((m + 1) as f64) * (tj - m as f64)).sqrt());
    let (jx, jy) = cartesian_pair(&up);
    let jz = ComplexMatrix::from_diag(&(0..dim).map(|m| m as f64 - tj / 2.0).collect::<Vec<_>>());
    Ok(GeneratorSet {
        spec: AlgebraSpec::Su2 { two_j },
        names: vec!["2Jx".into(), "2Jy".into(), "2Jz".into()],
        offdiag: vec![jx.scale_real(2.0), jy.scale_real(2.0)],
        cartan: vec![jz.scale_real(2.0)],
        signature: vec![1, 1, 1],
        rep_dim: dim,
        raising: Some(up),
    })
}

/// Truncated positive discrete series: `K_+ |m> = sqrt((m+1)(2 kappa + m)) |m+1>`,
/// `K_z |m> = (m + kappa) |m>`.
pub fn build_su11(kappa: Bargmann, cutoff: usize) -> Result<GeneratorSet> {
    let spec = AlgebraSpec::Su11 { kappa, cutoff };
    spec.validate()?;
    let k = kappa.to_f64();
    let up = ladder(cutoff, |m| (((m + 1) as f64) * (2.0 * k + m as f64)).sqrt());
    let (kx, ky) = cartesian_pair(&up);
    let kz = ComplexMatrix::from_diag(&(0..cutoff).map(|m| m as f64 + k).collect::<Vec<_>>());
    Ok(GeneratorSet {
        spec,
        names: vec!["Kx".into(), "Ky".into(), "Kz".into()],
        offdiag: vec![kx, ky],
        cartan: vec![kz],
        signature: vec![1, 1, -1],
        rep_dim: cutoff,
        raising: Some(up),
    })
}

/// Generalized Gell-Mann basis of the su(n) defining irrep.
pub fn build_gellmann(n: usize) -> Result<GeneratorSet> {
    let exact = gellmann_exact(n)?;
    let pairs = n * (n - 1) / 2;
    let mut names = Vec::with_capacity(n * n - 1);
    for kind in ["s", "a"] {
        for j in 1..=n {
            for k in j + 1..=n {
                names.push(format!("{kind}{j}{k}"));
            }
        }
    }
    for l in 1..n {
        names.push(format!("h{l}"));
    }
    let mut mats: Vec<ComplexMatrix> = exact.iter().map(|m| m.to_complex()).collect();
    let cartan = mats.split_off(2 * pairs);
    Ok(GeneratorSet {
        spec: AlgebraSpec::Sun { n },
        names,
        offdiag: mats,
        cartan,
        signature: vec![1; n * n - 1],
        rep_dim: n,
        raising: None,
    })
}

/// Weight-basis vector `|m>`. For su(n) index 0 is the highest-weight state of
/// the defining irrep (largest eigenvalue of every Cartan element).
pub fn weight_basis_state(gs: &GeneratorSet, m: usize) -> Result<StateVector> {
    StateVector::basis(gs.rep_dim(), m)
}

/// The Pauli matrices `sigma_x, sigma_y, sigma_z` in the standard basis.
pub fn pauli() -> [ComplexMatrix; 3] {
    [
        ComplexMatrix::from_row_major(vec![ZERO, ONE, ONE, ZERO]).unwrap(),
        ComplexMatrix::from_row_major(vec![ZERO, -I, I, ZERO]).unwrap(),
        ComplexMatrix::from_diag(&[1.0, -1.0]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{commutator, expectation, variance};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn fock_ladder_elements() {
        let gs = build_wh(40).unwrap();
        let up = gs.raising().unwrap();
        assert_eq!(up.get(1, 0), c(1.0));
        let n = gs.number_operator().unwrap();
        for m in 0..40 {
            assert!((n.get(m, m) - c(m as f64)).norm() < 1e-12);
        }
    }

    #[test]
    fn truncated_canonical_commutator() {
        let gs = build_wh(40).unwrap();
        let up = gs.raising().unwrap();
        let down = gs.lowering().unwrap();
        let comm = commutator(&down, up).unwrap();
        for m in 0..39 {
            assert!((comm.get(m, m) - c(1.0)).norm() < 1e-12);
        }
        // defect only at the last level
        assert!((comm.get(39, 39) - c(-39.0)).norm() < 1e-12);
        let mut off = comm.clone();
        for m in 0..40 {
            off.set(m, m, ZERO);
        }
        assert!(off.max_abs() < 1e-12);
    }

    #[test]
    fn vacuum_position_variance() {
        let gs = build_wh(40).unwrap();
        let vac = weight_basis_state(&gs, 0).unwrap();
        assert!((variance(&vac, &gs.offdiag()[0]).unwrap() - 0.5).abs() < 1e-12);
        assert!((variance(&vac, &gs.offdiag()[1]).unwrap() - 0.5).abs() < 1e-12);
        assert!(expectation(&vac, &gs.number_operator().unwrap()).unwrap().abs() < 1e-15);
    }

    #[test]
    fn wh_rejects_small_cutoff() {
        assert!(build_wh(7).is_err());
        assert!(build_su11(Bargmann::from_two_kappa(1).unwrap(), 4).is_err());
    }

    #[test]
    fn spin_half_is_pauli_up_to_basis_order() {
        // Weight basis orders J_z ascending; conjugating by sigma_x restores
        // the standard descending Pauli basis.
        let gs = build_su2(1).unwrap();
        let [sx, sy, sz] = pauli();
        let stored: Vec<_> = gs.generators().cloned().collect();
        assert!(stored[0].max_abs_diff(&sx) < 1e-15);
        for (e, p) in stored.iter().zip([&sx, &sy, &sz]) {
            assert!(e.conjugate_by(&sx).unwrap().max_abs_diff(p) < 1e-15);
        }
        for a in &stored {
            for b in &stored {
                let t = (a * b).trace();
                let expect = if std::ptr::eq(a, b) { 2.0 } else { 0.0 };
                assert!((t - c(expect)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn su2_ladder_and_weights() {
        let gs = build_su2(2).unwrap();
        assert!((gs.raising().unwrap().get(2, 1) - c(2f64.sqrt())).norm() < 1e-15);
        let [_, _, jz] = gs.spin_components().unwrap();
        let m1 = weight_basis_state(&gs, 1).unwrap();
        assert!(expectation(&m1, &jz).unwrap().abs() < 1e-15);
        let m2 = weight_basis_state(&gs, 2).unwrap();
        assert!((expectation(&m2, &jz).unwrap() - 1.0).abs() < 1e-15);
        // j = 2: index 2 is the J_z = 0 state
        let gs4 = build_su2(4).unwrap();
        let [_, _, jz4] = gs4.spin_components().unwrap();
        let mid = weight_basis_state(&gs4, 2).unwrap();
        assert!(expectation(&mid, &jz4).unwrap().abs() < 1e-15);
    }

    #[test]
    fn su2_casimir_three_halves() {
        let gs = build_su2(3).unwrap();
        let [jx, jy, jz] = gs.spin_components().unwrap();
        let c2 = &(&(&jx * &jx) + &(&jy * &jy)) + &(&jz * &jz);
        assert!(c2.max_abs_diff(&ComplexMatrix::identity(4).scale_real(15.0 / 4.0)) < 1e-12);
    }

    #[test]
    fn su2_commutation_relations() {
        for two_j in 0..=8 {
            let [jx, jy, jz] = build_su2(two_j).unwrap().spin_components().unwrap();
            let check = |a: &ComplexMatrix, b: &ComplexMatrix, cc: &ComplexMatrix| {
                commutator(a, b).unwrap().max_abs_diff(&cc.scale(I)) < 1e-10
            };
            assert!(check(&jx, &jy, &jz), "two_j={two_j}");
            assert!(check(&jy, &jz, &jx), "two_j={two_j}");
            assert!(check(&jz, &jx, &jy), "two_j={two_j}");
        }
    }

    #[test]
    fn su11_lowest_state() {
        let gs = build_su11(Bargmann::from_two_kappa(1).unwrap(), 40).unwrap();
        let zero = weight_basis_state(&gs, 0).unwrap();
        let kz = &gs.cartan()[0];
        assert!((expectation(&zero, kz).unwrap() - 0.5).abs() < 1e-15);
        let lowered = gs.lowering().unwrap().apply(zero.amplitudes());
        assert!(lowered.iter().all(|z| z.norm() == 0.0));
        let sum = variance(&zero, &gs.offdiag()[0]).unwrap() + variance(&zero, &gs.offdiag()[1]).unwrap()
            - variance(&zero, kz).unwrap();
        assert!((sum - 0.5).abs() < 1e-12);
    }

    #[test]
    fn su11_commutators_except_last_level() {
        for two_kappa in [1u32, 2, 3] {
            let cutoff = 30;
            let gs = build_su11(Bargmann::from_two_kappa(two_kappa).unwrap(), cutoff).unwrap();
            let up = gs.raising().unwrap();
            let down = gs.lowering().unwrap();
            let kz = &gs.cartan()[0];
            let a = commutator(up, &down).unwrap();
            let b = commutator(kz, up).unwrap();
            for r in 0..cutoff {
                for col in 0..cutoff {
                    let want_a = if r == col { kz.get(r, r) * -2.0 } else { ZERO };
                    if r < cutoff - 1 && col < cutoff - 1 {
                        assert!((a.get(r, col) - want_a).norm() < 1e-10);
                    }
                    assert!((b.get(r, col) - up.get(r, col)).norm() < 1e-10);
                }
            }
            assert!((a.get(cutoff - 1, cutoff - 1) - kz.get(cutoff - 1, cutoff - 1) * -2.0).norm() > 1.0);
        }
    }

    #[test]
    fn bargmann_labels() {
        for ok in ["1/4", "3/4", "1/2", "1", "3/2", "2"] {
            assert!(ok.parse::<Bargmann>().is_ok(), "{ok}");
        }
        for bad in ["0", "1/3", "-1/2", "5/4", "x"] {
            assert!(bad.parse::<Bargmann>().is_err(), "{bad}");
        }
    }

    #[test]
    fn gellmann_su3_matches_named_basis() {
        let gs = build_gellmann(3).unwrap();
        let e = |r: usize, col: usize, z: Complex64| {
            let mut m = ComplexMatrix::zeros(3);
            m.set(r, col, z);
            m.set(col, r, z.conj());
            m
        };
        let a_plus = e(0, 1, ONE);
        let c_plus = e(0, 2, ONE);
        let b_plus = e(1, 2, ONE);
        let a_minus = e(0, 1, -I);
        let c_minus = e(0, 2, -I);
        let b_minus = e(1, 2, -I);
        let h1 = ComplexMatrix::from_diag(&[1.0, -1.0, 0.0]);
        let h2 = ComplexMatrix::from_diag(&[1.0, 1.0, -2.0]).scale_real(1.0 / 3f64.sqrt());
        let expected = [a_plus, c_plus, b_plus, a_minus, c_minus, b_minus, h1, h2];
        for (got, want) in gs.generators().zip(&expected) {
            assert!(got.max_abs_diff(want) < 1e-15);
        }
        let hw = weight_basis_state(&gs, 0).unwrap();
        assert!((expectation(&hw, &gs.cartan()[0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((expectation(&hw, &gs.cartan()[1]).unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn gellmann_cartan_tails() {
        let g4 = build_gellmann(4).unwrap();
        let want = ComplexMatrix::from_diag(&[1.0, 1.0, 1.0, -3.0]).scale_real(1.0 / 6f64.sqrt());
        assert!(g4.cartan()[2].max_abs_diff(&want) < 1e-15);
        let g5 = build_gellmann(5).unwrap();
        let want = ComplexMatrix::from_diag(&[1.0, 1.0, 1.0, 1.0, -4.0]).scale_real(1.0 / 10f64.sqrt());
        assert!(g5.cartan()[3].max_abs_diff(&want) < 1e-15);
        let g2 = build_gellmann(2).unwrap();
        for (got, want) in g2.generators().zip(pauli().iter()) {
            assert_eq!(got, want);
        }
    }

    #[test]
    fn gellmann_structure() {
        for n in 2..=6 {
            let gs = build_gellmann(n).unwrap();
            assert_eq!(gs.len(), n * n - 1);
            assert_eq!(gs.cartan().len(), n - 1);
            for a in gs.generators() {
                assert!(a.is_hermitian(1e-12));
                assert!(a.trace().norm() < 1e-12);
            }
            for (i, a) in gs.generators().enumerate() {
                for (j, b) in gs.generators().enumerate() {
                    let want = if i == j { 2.0 } else { 0.0 };
                    assert!(((a * b).trace() - c(want)).norm() < 1e-12);
                }
            }
            for a in gs.cartan() {
                for b in gs.cartan() {
                    assert!(commutator(a, b).unwrap().max_abs() < 1e-14);
                }
            }
            let mut sum = ComplexMatrix::zeros(n);
            for a in gs.generators() {
                sum = &sum + &(a * a);
            }
            let want = (n * n - 1) as f64 / n as f64;
            assert!(sum.scale_real(0.5).max_abs_diff(&ComplexMatrix::identity(n).scale_real(want)) < 1e-10);
        }
    }

    #[test]
    fn weight_state_index_checked() {
        let gs = build_wh(8).unwrap();
        assert!(weight_basis_state(&gs, 8).is_err());
        assert_eq!(weight_basis_state(&gs, 0).unwrap().amplitudes()[0], ONE);
    }

    #[test]
    fn grammar_round_trip() {
        for s in ["wh:cutoff=64", "su2:j=3/2", "su2:j=1", "su11:kappa=1/2,cutoff=200", "su:5"] {
            let spec: AlgebraSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert_eq!("wh".parse::<AlgebraSpec>().unwrap(), AlgebraSpec::Wh { cutoff: 64 });
        assert_eq!("su:3:irrep=1,1".parse::<AlgebraSpec>().unwrap(), AlgebraSpec::Sun { n: 3 });
        for bad in ["", "su2", "su11:cutoff=10", "wh:cutoff=4", "su:1", "so:3", "su2:j=1/3"] {
            assert!(bad.parse::<AlgebraSpec>().is_err(), "{bad}");
        }
        assert_eq!(parse_two_j("1.5").unwrap(), 3);
    }
}
