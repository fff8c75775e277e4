//! Brute-force point counts of stable point configurations on the projective
//! line over small prime fields.
//!
//! For `r` points of equal weight and odd `r`, a tuple is stable iff no point
//! occurs at least `r/2` times. `PGL_2(F_p)` (order `p^3 - p`) acts freely on
//! stable tuples, so the quotient has `count / (p^3 - p)` rational points.
//! When all cohomology of the quotient sits in even degree and the count is
//! polynomial, that number is `sum_i b_{2i} p^i`. This is an assumption of the
//! oracle, not something it proves; any disagreement is reported as a failure.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::engine::QuotientReport;
use crate::series::{FieldTag, Polynomial};
use crate::strata::Flavor;

pub const MAX_PRIME: u64 = 97;
pub const MAX_ENUMERATION_PRIME: u64 = 13;
pub const MAX_POINTS: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{0} is not an odd prime <= {MAX_PRIME}")]
    NotOddPrime(u64),
    #[error("prime {0} is too large to enumerate (limit {MAX_ENUMERATION_PRIME})")]
    PrimeTooLarge(u64),
    #[error("r = {0} is unsupported: need odd r with 3 <= r <= {MAX_POINTS}")]
    UnsupportedPointCount(usize),
    #[error("{count} stable tuples over F_{p} is not divisible by |PGL_2| = {group}")]
    InexactDivision { p: u64, count: u64, group: u64 },
    #[error("report does not satisfy the oracle preconditions: {0}")]
    Preconditions(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, OracleError> {
        let is_prime = p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d));
        if !is_prime || p == 2 || p > MAX_PRIME {
            return Err(OracleError::NotOddPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a * b) % self.p
    }

    /// Inverse by Fermat; `a` must be nonzero mod `p`.
    pub fn inv(&self, a: u64) -> u64 {
        assert!(!a.is_multiple_of(self.p), "zero has no inverse");
        let (mut base, mut exp, mut acc) = (a % self.p, self.p - 2, 1);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// `|PGL_2(F_p)| = p^3 - p`.
    pub fn pgl2_order(&self) -> u64 {
        self.p * self.p * self.p - self.p
    }
}

/// A point of `P^1(F_p)`, normalized to `(a : 1)` or `(1 : 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProjLinePoint {
    Affine(u64),
    Infinity,
}

impl ProjLinePoint {
    /// Normalizes a nonzero homogeneous pair `(a : b)`.
    pub fn from_homogeneous(field: &PrimeField, a: u64, b: u64) -> Option<Self> {
        let (a, b) = (a % field.p, b % field.p);
        match (a, b) {
            (0, 0) => None,
            (_, 0) => Some(ProjLinePoint::Infinity),
            (a, b) => Some(ProjLinePoint::Affine(field.mul(a, field.inv(b)))),
        }
    }
}

/// All `p + 1` points, collected by normalizing every nonzero pair.
pub fn projective_line(field: &PrimeField) -> Vec<ProjLinePoint> {
    let mut pts: Vec<ProjLinePoint> = (0..field.p)
        .flat_map(|a| (0..field.p).map(move |b| (a, b)))
        .filter_map(|(a, b)| ProjLinePoint::from_homogeneous(field, a, b))
        .collect();
    pts.sort();
    pts.dedup();
    debug_assert_eq!(pts.len() as u64, field.p + 1);
    pts
}

fn check_r(r: usize) -> Result<(), OracleError> {
    if r < 3 || r.is_multiple_of(2) || r > MAX_POINTS {
        return Err(OracleError::UnsupportedPointCount(r));
    }
    Ok(())
}

/// Ordered `r`-tuples in `P^1(F_p)` with every multiplicity below `r/2`.
pub fn count_stable_tuples(field: &PrimeField, r: usize) -> Result<u64, OracleError> {
    check_r(r)?;
    if field.p > MAX_ENUMERATION_PRIME {
        return Err(OracleError::PrimeTooLarge(field.p));
    }
    let points = projective_line(field);
    let base = points.len();
    let mut digits = vec![0usize; r];
    let mut mult = vec![0usize; base];
    let mut count = 0u64;
    loop {
        mult.iter_mut().for_each(|m| *m = 0);
        for &d in &digits {
            mult[d] += 1;
        }
        if mult.iter().all(|&m| 2 * m < r) {
            count += 1;
        }
        // Odometer over base^r tuples.
        let mut pos = 0;
        loop {
            if pos == r {
                return Ok(count);
            }
            digits[pos] += 1;
            if digits[pos] < base {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

pub fn quotient_point_count(field: &PrimeField, r: usize) -> Result<u64, OracleError> {
    divide_by_group(field, count_stable_tuples(field, r)?)
}

fn divide_by_group(field: &PrimeField, count: u64) -> Result<u64, OracleError> {
    let group = field.pgl2_order();
    if !count.is_multiple_of(group) {
        return Err(OracleError::InexactDivision {
            p: field.p,
            count,
            group,
        });
    }
    Ok(count / group)
}

/// Exact Lagrange interpolation through `(x_i, y_i)`.
pub fn interpolate(points: &[(i64, i64)]) -> Polynomial {
    let q = FieldTag::Rationals;
    let mut acc = Polynomial::from_coeffs(q, vec![]);
    for (i, &(xi, yi)) in points.iter().enumerate() {
        let mut basis = Polynomial::one(q);
        let mut denom = BigRational::one();
        for (j, &(xj, _)) in points.iter().enumerate() {
            if i != j {
                basis = basis.mul(&Polynomial::from_ints(q, &[-xj, 1])).expect("same field");
                denom *= BigRational::from_integer(BigInt::from(xi - xj));
            }
        }
        let scale = BigRational::from_integer(yi.into()) / denom;
        let term: Vec<BigRational> = basis.coeffs().iter().map(|c| c * &scale).collect();
        let len = term.len().max(acc.coeffs().len());
        let sum = (0..len).map(|d| acc.coeff(d) + term.get(d).cloned().unwrap_or_else(BigRational::zero));
        acc = Polynomial::from_coeffs(q, sum.collect());
    }
    acc
}

/// Quotient point counts for each prime together with their interpolant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    pub r: usize,
    pub rows: Vec<CountRow>,
    pub interpolant: Polynomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountRow {
    pub p: u64,
    pub stable_tuples: u64,
    pub quotient_points: u64,
}

pub fn count_table(r: usize, primes: &[u64]) -> Result<CountTable, OracleError> {
    let rows = primes
        .iter()
        .map(|&p| {
            let field = PrimeField::new(p)?;
            let stable_tuples = count_stable_tuples(&field, r)?;
            let quotient_points = divide_by_group(&field, stable_tuples)?;
            Ok(CountRow {
                p,
                stable_tuples,
                quotient_points,
            })
        })
        .collect::<Result<Vec<_>, OracleError>>()?;
    let samples: Vec<(i64, i64)> = rows
        .iter()
        .map(|row| (row.p as i64, row.quotient_points as i64))
        .collect();
    Ok(CountTable {
        r,
        interpolant: interpolate(&samples),
        rows,
    })
}

/// Substitutes `t^2 = p` into a polynomial in `t`; `None` if an odd-degree
/// coefficient is nonzero.
pub fn evaluate_at_t_squared(poly: &Polynomial, p: u64) -> Option<BigRational> {
    let halved = poly.halve_exponents().ok()?;
    Some(halved.eval(&BigRational::from_integer(p.into())))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeComparison {
    pub p: u64,
    pub point_count: u64,
    pub poincare_value: Option<BigRational>,
    pub pass: bool,
}

/// Compares a rank-2, all-weights-one complex quotient against point counts.
pub fn compare_with_poincare(report: &QuotientReport, primes: &[u64]) -> Result<Vec<PrimeComparison>, OracleError> {
    let spec = &report.spec;
    if spec.flavor() != Flavor::Complex || spec.rank() != 2 {
        return Err(OracleError::Preconditions("need a complex rank-2 system".into()));
    }
    if spec.weights().iter().any(|&l| l != 1) {
        return Err(OracleError::Preconditions("all weights must equal 1".into()));
    }
    let poly = report
        .quotient
        .as_ref()
        .ok_or_else(|| OracleError::Preconditions("report has no quotient polynomial".into()))?;
    let r = spec.weights().len();
    primes
        .iter()
        .map(|&p| {
            let field = PrimeField::new(p)?;
            let point_count = quotient_point_count(&field, r)?;
            let poincare_value = evaluate_at_t_squared(poly, p);
            let pass = poincare_value == Some(BigRational::from_integer(point_count.into()));
            Ok(PrimeComparison {
                p,
                point_count,
                poincare_value,
                pass,
            })
        })
        .collect()
}
