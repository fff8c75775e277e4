//! Truncated formal power series in one variable `t` with exact coefficients.
//!
//! A [`PowerSeries`] stores the coefficients of `t^0 ..= t^cap`. Binary
//! operations truncate to the smaller cap of their operands; nothing is ever
//! silently extended. Coefficients are [`BigRational`] values; series tagged
//! [`FieldTag::GF2`] keep every coefficient in `{0, 1}` and reduce mod 2 after
//! each operation.
//!
//! Poincaré series are always computed over [`FieldTag::Rationals`], since
//! they count dimensions even when the underlying cohomology has `Z_2`
//! coefficients (see [`crate::catalog`]).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Field the series arithmetic takes place in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FieldTag {
    Rationals,
    GF2,
}

impl FieldTag {
    /// Maps a rational into the field. Fails for GF2 when the denominator is
    /// even, i.e. the value is not 2-integral.
    fn embed(self, c: BigRational) -> Result<BigRational, SeriesError> {
        match self {
            FieldTag::Rationals => Ok(c),
            FieldTag::GF2 => {
                if c.denom().is_even() {
                    return Err(SeriesError::NotInField(c.to_string()));
                }
                Ok(if c.numer().is_odd() {
                    BigRational::one()
                } else {
                    BigRational::zero()
                })
            }
        }
    }

    fn reduce(self, c: BigRational) -> BigRational {
        // Every value reaching here is already 2-integral.
        self.embed(c).expect("coefficient left the field")
    }

    fn inv(self, c: &BigRational) -> BigRational {
        debug_assert!(!c.is_zero());
        match self {
            FieldTag::Rationals => c.recip(),
            FieldTag::GF2 => BigRational::one(),
        }
    }
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldTag::Rationals => f.write_str("Q"),
            FieldTag::GF2 => f.write_str("Z2"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(FieldTag, FieldTag),
    #[error("divisor has zero constant term")]
    ZeroConstantTerm,
    #[error("nonzero coefficient in odd degree {0}; series is not a series in t^2")]
    OddDegreeTerm(usize),
    #[error("substitution exponent must be positive")]
    ZeroExponent,
    #[error("coefficient {0} is not an element of GF2")]
    NotInField(String),
}

fn same_field(a: FieldTag, b: FieldTag) -> Result<FieldTag, SeriesError> {
    if a == b {
        Ok(a)
    } else {
        Err(SeriesError::FieldMismatch(a, b))
    }
}

/// Truncated power series `c_0 + c_1 t + ... + c_cap t^cap`.
#[derive(Debug, Clone)]
pub struct PowerSeries {
    field: FieldTag,
    coeffs: Vec<BigRational>,
}

impl PowerSeries {
    pub fn new(field: FieldTag, cap: usize, coeffs: Vec<BigRational>) -> Result<Self, SeriesError> {
        let mut out = Vec::with_capacity(cap + 1);
        for c in coeffs.into_iter().take(cap + 1) {
            out.push(field.embed(c)?);
        }
        out.resize(cap + 1, BigRational::zero());
        Ok(PowerSeries { field, coeffs: out })
    }

    /// Series from integer coefficients; missing high terms are zero.
    pub fn from_ints(field: FieldTag, cap: usize, coeffs: &[i64]) -> Self {
        let mut out: Vec<BigRational> = coeffs
            .iter()
            .take(cap + 1)
            .map(|&c| field.reduce(BigRational::from_integer(c.into())))
            .collect();
        out.resize(cap + 1, BigRational::zero());
        PowerSeries { field, coeffs: out }
    }

    pub fn zero(field: FieldTag, cap: usize) -> Self {
        PowerSeries {
            field,
            coeffs: vec![BigRational::zero(); cap + 1],
        }
    }

    pub fn one(field: FieldTag, cap: usize) -> Self {
        Self::monomial(field, cap, 0)
    }

    /// `t^degree`, or zero when `degree > cap`.
    pub fn monomial(field: FieldTag, cap: usize, degree: usize) -> Self {
        let mut s = Self::zero(field, cap);
        if degree <= cap {
            s.coeffs[degree] = BigRational::one();
        }
        s
    }

    /// `1 / (1 - t^p) = 1 + t^p + t^{2p} + ...`
    pub fn geometric(field: FieldTag, cap: usize, p: usize) -> Self {
        assert!(p > 0, "geometric series needs a positive step");
        let mut s = Self::zero(field, cap);
        for d in (0..=cap).step_by(p) {
            s.coeffs[d] = BigRational::one();
        }
        s
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn cap(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of `t^d`; zero beyond the cap.
    pub fn coeff(&self, d: usize) -> BigRational {
        self.coeffs.get(d).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Highest degree with a nonzero coefficient, if any.
    pub fn top_degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn truncate(&self, cap: usize) -> Self {
        let cap = cap.min(self.cap());
        PowerSeries {
            field: self.field,
            coeffs: self.coeffs[..=cap].to_vec(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        let field = same_field(self.field, other.field)?;
        let cap = self.cap().min(other.cap());
        let coeffs = (0..=cap)
            .map(|d| field.reduce(&self.coeffs[d] + &other.coeffs[d]))
            .collect();
        Ok(PowerSeries { field, coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        PowerSeries {
            field: self.field,
            coeffs: self.coeffs.iter().map(|c| self.field.reduce(-c)).collect(),
        }
    }

    /// Cauchy product truncated at the smaller cap.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        let field = same_field(self.field, other.field)?;
        let cap = self.cap().min(other.cap());
        let mut coeffs = vec![BigRational::zero(); cap + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(cap + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(cap + 1 - i) {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        let coeffs = coeffs.into_iter().map(|c| field.reduce(c)).collect();
        Ok(PowerSeries { field, coeffs })
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        PowerSeries {
            field: self.field,
            coeffs: self.coeffs.iter().map(|c| self.field.reduce(c * k)).collect(),
        }
    }

    /// Multiplies by `t^k`, keeping the cap.
    pub fn shift(&self, k: usize) -> Self {
        let mut out = Self::zero(self.field, self.cap());
        for d in 0..=self.cap() {
            if d + k > self.cap() {
                break;
            }
            out.coeffs[d + k] = self.coeffs[d].clone();
        }
        out
    }

    /// Multiplies by `(1 - t^p)` in place of a full `mul`.
    pub fn mul_one_minus(&self, p: usize) -> Self {
        let mut out = self.clone();
        for d in (p..=self.cap()).rev() {
            let v = &out.coeffs[d] - &self.coeffs[d - p];
            out.coeffs[d] = self.field.reduce(v);
        }
        out
    }

    /// Divides by `(1 - t^p)`: running sums with stride `p`.
    pub fn div_one_minus(&self, p: usize) -> Self {
        assert!(p > 0);
        let mut out = self.clone();
        for d in p..=self.cap() {
            let v = &out.coeffs[d] + &out.coeffs[d - p];
            out.coeffs[d] = self.field.reduce(v);
        }
        out
    }

    /// The unique `q` with `q * divisor = self` up to the smaller cap.
    pub fn divide(&self, divisor: &Self) -> Result<Self, SeriesError> {
        let field = same_field(self.field, divisor.field)?;
        if divisor.coeffs[0].is_zero() {
            return Err(SeriesError::ZeroConstantTerm);
        }
        let cap = self.cap().min(divisor.cap());
        let inv0 = field.inv(&divisor.coeffs[0]);
        let mut q: Vec<BigRational> = Vec::with_capacity(cap + 1);
        for d in 0..=cap {
            let mut acc = self.coeffs[d].clone();
            for j in 1..=d {
                let b = &divisor.coeffs[j];
                if !b.is_zero() {
                    acc -= b * &q[d - j];
                }
            }
            q.push(field.reduce(acc * &inv0));
        }
        Ok(PowerSeries { field, coeffs: q })
    }

    /// `a(t) -> a(t^e)`; terms pushed past the cap are dropped.
    pub fn substitute_t_power(&self, e: usize) -> Result<Self, SeriesError> {
        if e == 0 {
            return Err(SeriesError::ZeroExponent);
        }
        let mut out = Self::zero(self.field, self.cap());
        for d in 0..=self.cap() / e {
            out.coeffs[d * e] = self.coeffs[d].clone();
        }
        Ok(out)
    }

    /// `a(t) -> a(t^{1/2})`, requiring every odd coefficient to vanish.
    pub fn halve_exponents(&self) -> Result<Self, SeriesError> {
        if let Some(d) = (1..=self.cap()).step_by(2).find(|&d| !self.coeffs[d].is_zero()) {
            return Err(SeriesError::OddDegreeTerm(d));
        }
        Ok(PowerSeries {
            field: self.field,
            coeffs: self.coeffs.iter().step_by(2).cloned().collect(),
        })
    }

    /// Reads off the polynomial of degree at most `max_degree`; `None` is a
    /// negative bound and requires the series to vanish. Returns the first
    /// nonzero degree beyond the bound as an error.
    pub fn to_polynomial(&self, max_degree: Option<usize>) -> Result<Polynomial, usize> {
        let keep = match max_degree {
            Some(m) => m.min(self.cap()) + 1,
            None => 0,
        };
        if let Some(d) = (keep..=self.cap()).find(|&d| !self.coeffs[d].is_zero()) {
            return Err(d);
        }
        Ok(Polynomial::from_coeffs(self.field, self.coeffs[..keep].to_vec()))
    }

    pub fn all_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }
}

/// Equality up to the smaller of the two caps, on matching fields.
impl PartialEq for PowerSeries {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.coeffs.iter().zip(other.coeffs.iter()).all(|(a, b)| a == b)
    }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render_terms(f, self.field, &self.coeffs)
    }
}

/// Exact polynomial in `t` with trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    field: FieldTag,
    coeffs: Vec<BigRational>,
}

impl Polynomial {
    pub fn from_coeffs(field: FieldTag, coeffs: Vec<BigRational>) -> Self {
        let mut coeffs: Vec<BigRational> = coeffs.into_iter().map(|c| field.reduce(c)).collect();
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { field, coeffs }
    }

    pub fn from_ints(field: FieldTag, coeffs: &[i64]) -> Self {
        Self::from_coeffs(
            field,
            coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect(),
        )
    }

    pub fn one(field: FieldTag) -> Self {
        Self::from_ints(field, &[1])
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, d: usize) -> BigRational {
        self.coeffs.get(d).cloned().unwrap_or_else(BigRational::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn series(&self, cap: usize) -> PowerSeries {
        let mut coeffs: Vec<BigRational> = self.coeffs.iter().take(cap + 1).cloned().collect();
        coeffs.resize(cap + 1, BigRational::zero());
        PowerSeries {
            field: self.field,
            coeffs,
        }
    }

    /// Coefficients read the same from both ends of `0..=degree`.
    pub fn is_palindromic(&self) -> bool {
        let n = self.coeffs.len();
        (0..n / 2).all(|i| self.coeffs[i] == self.coeffs[n - 1 - i])
    }

    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        let field = same_field(self.field, other.field)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Polynomial { field, coeffs: vec![] });
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Ok(Self::from_coeffs(field, out))
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn halve_exponents(&self) -> Result<Self, SeriesError> {
        let cap = self.coeffs.len().max(1) - 1;
        let halved = self.series(cap).halve_exponents()?;
        Ok(Self::from_coeffs(self.field, halved.coeffs))
    }

    pub fn substitute_t_power(&self, e: usize) -> Result<Self, SeriesError> {
        let cap = (self.coeffs.len().max(1) - 1) * e;
        let s = self.series(cap).substitute_t_power(e)?;
        Ok(Self::from_coeffs(self.field, s.coeffs))
    }

    /// Coefficients as machine integers, if all are integral and fit.
    pub fn integer_coeffs(&self) -> Option<Vec<i64>> {
        self.coeffs
            .iter()
            .map(|c| if c.is_integer() { c.to_integer().to_i64() } else { None })
            .collect()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render_terms(f, self.field, &self.coeffs)
    }
}

/// `numerator / prod (1 - t^p)` over a multiset of positive `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclotomicProductForm {
    pub field: FieldTag,
    pub numerator: Polynomial,
    pub denom_factors: Vec<usize>,
}

impl CyclotomicProductForm {
    pub fn new(numerator: Polynomial, mut denom_factors: Vec<usize>) -> Self {
        assert!(
            denom_factors.iter().all(|&p| p > 0),
            "factor (1 - t^0) is not invertible"
        );
        denom_factors.sort_unstable();
        CyclotomicProductForm {
            field: numerator.field(),
            numerator,
            denom_factors,
        }
    }

    /// `1 / prod (1 - t^p)`.
    pub fn inverse_product(field: FieldTag, denom_factors: Vec<usize>) -> Self {
        Self::new(Polynomial::one(field), denom_factors)
    }

    pub fn expand(&self, cap: usize) -> PowerSeries {
        self.denom_factors
            .iter()
            .fold(self.numerator.series(cap), |acc, &p| acc.div_one_minus(p))
    }
}

impl fmt::Display for CyclotomicProductForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom_factors.is_empty() {
            return write!(f, "{}", self.numerator);
        }
        if self.numerator.degree() == Some(0) {
            write!(f, "{}", self.numerator)?;
        } else {
            write!(f, "({})", self.numerator)?;
        }
        f.write_str(" / ")?;
        for (i, p) in self.denom_factors.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            match p {
                1 => f.write_str("(1 - t)")?,
                p => write!(f, "(1 - t^{p})")?,
            }
        }
        Ok(())
    }
}

/// Shared `c0 + c1*t + c2*t^2` rendering; zero terms omitted, `0` if empty.
fn render_terms(f: &mut fmt::Formatter<'_>, field: FieldTag, coeffs: &[BigRational]) -> fmt::Result {
    let mut first = true;
    for (d, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let negative = field == FieldTag::Rationals && c.is_negative();
        match (first, negative) {
            (true, true) => f.write_str("-")?,
            (true, false) => {}
            (false, true) => f.write_str(" - ")?,
            (false, false) => f.write_str(" + ")?,
        }
        first = false;
        let mag = c.abs();
        let unit = mag.is_one() || field == FieldTag::GF2;
        match d {
            0 => write!(
                f,
                "{}",
                if field == FieldTag::GF2 {
                    BigRational::one()
                } else {
                    mag
                }
            )?,
            _ => {
                if !unit {
                    write!(f, "{mag}*")?;
                }
                if d == 1 {
                    f.write_str("t")?;
                } else {
                    write!(f, "t^{d}")?;
                }
            }
        }
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

/// Renders a coefficient for JSON and CSV: `p/q` in lowest terms, `p` when integral.
pub fn coeff_string(c: &BigRational) -> String {
    c.to_string()
}

/// Parses the `p/q` or `p` form written by [`coeff_string`].
pub fn parse_coeff(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(BigRational::new(p, q))
        }
        None => Some(BigRational::from_integer(s.trim().parse().ok()?)),
    }
}
