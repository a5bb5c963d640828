//! Exact arithmetic in the field generated by rationals and square roots of
//! integers, enough to write down generalized Gell-Mann matrices and compare
//! them against fixtures without floating-point slack.
//!
//! An [`ExactReal`] is a finite sum `sum_r c_r * sqrt(r)` over square-free
//! radicands `r`. Square roots of distinct square-free integers are linearly
//! independent over the rationals, so the canonical map is a unique
//! representation and structural equality is exact equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::matcore::ComplexMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExactReal {
    terms: BTreeMap<u64, Rational64>,
}

impl ExactReal {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn rational(q: Rational64) -> Self {
        Self::radical(q, Rational64::one())
    }

    pub fn int(v: i64) -> Self {
        Self::rational(Rational64::from_integer(v))
    }

    /// `coeff * sqrt(radicand)` for a non-negative rational radicand.
    pub fn radical(coeff: Rational64, radicand: Rational64) -> Self {
        assert!(!radicand.is_negative(), "negative radicand");
        let mut out = Self::zero();
        if coeff.is_zero() || radicand.is_zero() {
            return out;
        }
        // sqrt(p/q) = sqrt(p*q) / q
        let p = *radicand.numer() as u64;
        let q = *radicand.denom() as u64;
        let (outer, square_free) = split_square(p * q);
        let c = coeff * Rational64::new(outer as i64, q as i64);
        out.terms.insert(square_free, c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Returns the rational value when no irrational part is present.
    pub fn as_rational(&self) -> Option<Rational64> {
        match self.terms.len() {
            0 => Some(Rational64::zero()),
            1 => self.terms.get(&1).copied(),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(&r, c)| c.to_f64().unwrap() * (r as f64).sqrt())
            .sum()
    }

    fn add_term(&mut self, radicand: u64, c: Rational64) {
        let entry = self.terms.entry(radicand).or_insert_with(Rational64::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&radicand);
        }
    }
}

/// Writes `n = outer^2 * square_free`.
fn split_square(mut n: u64) -> (u64, u64) {
    let mut outer = 1;
    let mut square_free = 1;
    let mut f = 2;
    while f * f <= n {
        while n.is_multiple_of(f * f) {
            n /= f * f;
            outer *= f;
        }
        if n.is_multiple_of(f) {
            n /= f;
            square_free *= f;
        }
        f += 1;
    }
    (outer, square_free * n)
}

impl Add for &ExactReal {
    type Output = ExactReal;
    fn add(self, rhs: &ExactReal) -> ExactReal {
        let mut out = self.clone();
        for (&r, &c) in &rhs.terms {
            out.add_term(r, c);
        }
        out
    }
}

impl Neg for &ExactReal {
    type Output = ExactReal;
    fn neg(self) -> ExactReal {
        ExactReal {
            terms: self.terms.iter().map(|(&r, &c)| (r, -c)).collect(),
        }
    }
}

impl Sub for &ExactReal {
    type Output = ExactReal;
    fn sub(self, rhs: &ExactReal) -> ExactReal {
        self + &(-rhs)
    }
}

impl Mul for &ExactReal {
    type Output = ExactReal;
    fn mul(self, rhs: &ExactReal) -> ExactReal {
        let mut out = ExactReal::zero();
        for (&r1, &c1) in &self.terms {
            for (&r2, &c2) in &rhs.terms {
                let (outer, sf) = split_square(r1 * r2);
                out.add_term(sf, c1 * c2 * Rational64::from_integer(outer as i64));
            }
        }
        out
    }
}

impl fmt::Display for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (&r, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            if r == 1 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*sqrt({r})")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExactComplex {
    pub re: ExactReal,
    pub im: ExactReal,
}

impl ExactComplex {
    pub fn real(re: ExactReal) -> Self {
        Self {
            re,
            im: ExactReal::zero(),
        }
    }

    pub fn imag(im: ExactReal) -> Self {
        Self {
            re: ExactReal::zero(),
            im,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl Add for &ExactComplex {
    type Output = ExactComplex;
    fn add(self, rhs: &ExactComplex) -> ExactComplex {
        ExactComplex {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Mul for &ExactComplex {
    type Output = ExactComplex;
    fn mul(self, rhs: &ExactComplex) -> ExactComplex {
        ExactComplex {
            re: &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            im: &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        }
    }
}

impl fmt::Display for ExactComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "({})i", self.im),
            (false, false) => write!(f, "{}+({})i", self.re, self.im),
        }
    }
}

/// Square matrix with exact entries, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    dim: usize,
    entries: Vec<ExactComplex>,
}

impl ExactMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![ExactComplex::default(); dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &ExactComplex {
        &self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: ExactComplex) {
        self.entries[row * self.dim + col] = v;
    }

    /// `Tr(A^dagger B)`.
    pub fn trace_inner(&self, other: &ExactMatrix) -> ExactComplex {
        assert_eq!(self.dim, other.dim);
        let mut acc = ExactComplex::default();
        for (a, b) in self.entries.iter().zip(&other.entries) {
            acc = &acc + &(&a.conj() * b);
        }
        acc
    }

    pub fn trace(&self) -> ExactComplex {
        let mut acc = ExactComplex::default();
        for i in 0..self.dim {
            acc = &acc + self.get(i, i);
        }
        acc
    }

    pub fn is_hermitian(&self) -> bool {
        (0..self.dim).all(|r| (0..self.dim).all(|c| *self.get(r, c) == self.get(c, r).conj()))
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim, |r, c| self.get(r, c).to_complex())
    }
}

/// Generalized Gell-Mann basis of `su(n)` in the crate's ordering contract:
/// symmetric off-diagonal, antisymmetric off-diagonal, then diagonal Cartan
/// elements, each block lexicographic in the upper-triangular `(row, col)`.
/// Normalized so `Tr(e_a e_b) = 2 delta_ab`.
pub fn gellmann_exact(n: usize) -> Result<Vec<ExactMatrix>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("su(n) needs n >= 2, got {n}")));
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|j| (j + 1..n).map(move |k| (j, k)))
        .collect();
    let one = ExactReal::int(1);
    let mut out = Vec::with_capacity(n * n - 1);
    for &(j, k) in &pairs {
        let mut m = ExactMatrix::zeros(n);
        m.set(j, k, ExactComplex::real(one.clone()));
        m.set(k, j, ExactComplex::real(one.clone()));
        out.push(m);
    }
    for &(j, k) in &pairs {
        let mut m = ExactMatrix::zeros(n);
        m.set(j, k, ExactComplex::imag(-&one));
        m.set(k, j, ExactComplex::imag(one.clone()));
        out.push(m);
    }
    for l in 1..n {
        // sqrt(2 / (l (l + 1))) * diag(1, ..., 1, -l, 0, ..., 0)
        let scale = Rational64::new(2, (l * (l + 1)) as i64);
        let mut m = ExactMatrix::zeros(n);
        for i in 0..l {
            m.set(i, i, ExactComplex::real(ExactReal::radical(Rational64::one(), scale)));
        }
        m.set(
            l,
            l,
            ExactComplex::real(ExactReal::radical(Rational64::from_integer(-(l as i64)), scale)),
        );
        out.push(m);
    }
    Ok(out)
}

/// Parses entries such as `0`, `-1`, `i`, `-i`, `3/4`, `1/sqrt(6)`,
/// `-sqrt(3/2)`, `-2*sqrt(2/5)`, `2*i`.
pub fn parse_entry(s: &str) -> Result<ExactComplex> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(&s)),
    };
    let (imag, real_part) = if body == "i" {
        (true, "1")
    } else if let Some(coef) = body.strip_suffix("*i") {
        (true, coef)
    } else {
        (false, body)
    };
    let mut value = parse_real(real_part)?;
    if neg {
        value = -&value;
    }
    Ok(if imag {
        ExactComplex::imag(value)
    } else {
        ExactComplex::real(value)
    })
}

fn parse_real(s: &str) -> Result<ExactReal> {
    let bad = || Error::Parse(format!("unrecognized exact entry `{s}`"));
    let Some(pos) = s.find("sqrt(") else {
        return Ok(ExactReal::rational(parse_rational(s).ok_or_else(bad)?));
    };
    let inner = s[pos + 5..].strip_suffix(')').ok_or_else(bad)?;
    let radicand = parse_rational(inner).ok_or_else(bad)?;
    if radicand.is_negative() {
        return Err(bad());
    }
    let prefix = &s[..pos];
    if prefix.is_empty() {
        Ok(ExactReal::radical(Rational64::one(), radicand))
    } else if let Some(c) = prefix.strip_suffix('*') {
        Ok(ExactReal::radical(parse_rational(c).ok_or_else(bad)?, radicand))
    } else if let Some(c) = prefix.strip_suffix('/') {
        if radicand.is_zero() {
            return Err(bad());
        }
        Ok(ExactReal::radical(parse_rational(c).ok_or_else(bad)?, radicand.recip()))
    } else {
        Err(bad())
    }
}

pub(crate) fn parse_rational(s: &str) -> Option<Rational64> {
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.parse().ok()?;
            let q: i64 = q.parse().ok()?;
            (q != 0).then(|| Rational64::new(p, q))
        }
        None => Some(Rational64::from_integer(s.parse().ok()?)),
    }
}

/// On-disk fixture: named matrices whose entries are exact strings.
#[derive(Debug, Clone, Deserialize)]
pub struct MatrixFixture {
    pub n: usize,
    pub names: Vec<String>,
    pub matrices: Vec<Vec<Vec<String>>>,
}

impl MatrixFixture {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_exact(&self) -> Result<Vec<ExactMatrix>> {
        self.matrices
            .iter()
            .map(|rows| {
                if rows.len() != self.n || rows.iter().any(|r| r.len() != self.n) {
                    return Err(Error::Parse(format!("fixture matrix is not {0}x{0}", self.n)));
                }
                let mut m = ExactMatrix::zeros(self.n);
                for (r, row) in rows.iter().enumerate() {
                    for (c, entry) in row.iter().enumerate() {
                        m.set(r, c, parse_entry(entry)?);
                    }
                }
                Ok(m)
            })
            .collect()
    }
}

/// Transcribed reference bases for su(4) and su(5).
pub fn bundled_fixture(n: usize) -> Option<&'static str> {
    match n {
        4 => Some(include_str!("../fixtures/gellmann_su4.json")),
        5 => Some(include_str!("../fixtures/gellmann_su5.json")),
        _ => None,
    }
}

/// Exact comparison of a fixture against [`gellmann_exact`].
#[derive(Debug, Clone, serde::Serialize)]
pub struct FixtureReport {
    pub n: usize,
    pub matrices: usize,
    /// Indices (0-based) whose generated matrix differs from the fixture.
    pub mismatches: Vec<usize>,
    /// `Tr(e_a e_b) = 2 delta_ab` holds exactly for the fixture.
    pub orthonormal: bool,
    pub hermitian: bool,
    pub traceless: bool,
}

impl FixtureReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.orthonormal && self.hermitian && self.traceless
    }
}

pub fn compare_fixture(fixture: &MatrixFixture) -> Result<FixtureReport> {
    let given = fixture.to_exact()?;
    let generated = gellmann_exact(fixture.n)?;
    if given.len() != generated.len() {
        return Err(Error::DimensionMismatch {
            expected: generated.len(),
            found: given.len(),
        });
    }
    let mismatches = given
        .iter()
        .zip(&generated)
        .enumerate()
        .filter(|(_, (a, b))| a != b)
        .map(|(i, _)| i)
        .collect();
    let two = ExactComplex::real(ExactReal::int(2));
    let zero = ExactComplex::default();
    let orthonormal = given.iter().enumerate().all(|(a, ea)| {
        given
            .iter()
            .enumerate()
            .all(|(b, eb)| ea.trace_inner(eb) == if a == b { two.clone() } else { zero.clone() })
    });
    Ok(FixtureReport {
        n: fixture.n,
        matrices: given.len(),
        mismatches,
        orthonormal,
        hermitian: given.iter().all(ExactMatrix::is_hermitian),
        traceless: given.iter().all(|m| m.trace().is_zero()),
    })
}
