//! Kirwan-style recursions for equivariant Poincaré series.
//!
//! For the diagonal action on `M = prod_j Gr_{l_j}(C^n)` the series of the
//! zero level set is obtained by subtracting every unstable stratum from the
//! equivariantly formal total:
//!
//! ```text
//! P^{U(n)}(M_0) = P(M) P(BU(n)) - sum_{(beta,l) != min} t^{codim} prod_i P^{U(m_i)}(M_0 of block i)
//! ```
//!
//! The real flavor runs the same recursion with mod-2 Grassmannians, `BO(n)`
//! and half the codimension. The minimal term is always the unknown, so
//! empty zero level sets come out as the exact zero series.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{self, CatalogError};
use crate::oracle;
use crate::series::{coeff_string, FieldTag, Polynomial, PowerSeries};
use crate::strata::{self, Flavor, StrataError, StratumIndex, SystemSpec};

const Q: FieldTag = FieldTag::Rationals;

/// Extra degrees past the quotient dimension inspected by default.
pub const DEFAULT_SLACK: usize = 8;

/// Primes used by the report's built-in oracle check.
pub const REPORT_ORACLE_PRIMES: [u64; 3] = [3, 5, 7];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Strata(#[from] StrataError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("index {index} has negative codimension {codim} but a nonzero contribution")]
    NegativeCodimension { index: StratumIndex, codim: i64 },
    #[error("gcd obstruction: gcd({n}, {total}) = {gcd} != 1, the action on the zero level set is not free")]
    GcdObstruction {
        n: usize,
        total: usize,
        gcd: usize,
        report: Box<QuotientReport>,
    },
    #[error("parity obstruction: rank {n} is even; the real quotient needs gcd(n, l_1+...+l_r) = 1 and n odd")]
    ParityObstruction { n: usize, report: Box<QuotientReport> },
    #[error("not a polynomial: coefficient {coefficient} at degree {degree} beyond dimension {dimension}")]
    NotPolynomial {
        degree: usize,
        dimension: i64,
        coefficient: String,
    },
    #[error("cap {cap} too small; extraction needs at least {needed}")]
    CapTooSmall { cap: usize, needed: usize },
    #[error("expected a {expected} system, got {got}")]
    FlavorMismatch { expected: Flavor, got: Flavor },
}

impl EngineError {
    /// Gcd or parity obstruction: the quotient is not covered by the theory.
    pub fn is_obstruction(&self) -> bool {
        matches!(
            self,
            EngineError::GcdObstruction { .. } | EngineError::ParityObstruction { .. }
        )
    }

    /// The partial report carried by an obstruction.
    pub fn report(&self) -> Option<&QuotientReport> {
        match self {
            EngineError::GcdObstruction { report, .. } | EngineError::ParityObstruction { report, .. } => Some(report),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct QuotientFlags {
    pub gcd_free: bool,
    pub n_odd: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        CheckResult {
            name: name.to_string(),
            pass,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuotientReport {
    pub spec: SystemSpec,
    pub equivariant: PowerSeries,
    pub quotient: Option<Polynomial>,
    pub dimension: i64,
    pub flags: QuotientFlags,
    pub checks: Vec<CheckResult>,
}

impl QuotientReport {
    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json_model(&self) -> ReportJson {
        let quotient = match &self.quotient {
            Some(p) => QuotientJson {
                present: true,
                coeffs: p.coeffs().iter().map(coeff_string).collect(),
                dimension: self.dimension,
            },
            None => QuotientJson {
                present: false,
                coeffs: vec![],
                dimension: self.dimension,
            },
        };
        ReportJson {
            system: SystemJson {
                n: self.spec.rank(),
                weights: self.spec.weights().to_vec(),
                flavor: self.spec.flavor(),
            },
            equivariant: SeriesJson {
                cap: self.equivariant.cap(),
                coeffs: self.equivariant.coeffs().iter().map(coeff_string).collect(),
            },
            quotient,
            flags: self.flags,
            checks: self.checks.clone(),
        }
    }
}

/// Serialized form of a [`QuotientReport`]; rationals are `"p/q"` strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportJson {
    pub system: SystemJson,
    pub equivariant: SeriesJson,
    pub quotient: QuotientJson,
    pub flags: QuotientFlags,
    pub checks: Vec<CheckResult>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemJson {
    pub n: usize,
    pub weights: Vec<usize>,
    pub flavor: Flavor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub cap: usize,
    pub coeffs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientJson {
    pub present: bool,
    pub coeffs: Vec<String>,
    pub dimension: i64,
}

/// Outcome of comparing the real quotient with the halved complex one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalvingCheck {
    pub pass: bool,
    pub complex: Polynomial,
    pub real: Polynomial,
}

/// `real(t) == complex(t^{1/2})`.
pub fn halving_matches(complex: &Polynomial, real: &Polynomial) -> bool {
    complex.halve_exponents().is_ok_and(|h| &h == real)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct MemoKey {
    flavor: Flavor,
    rank: usize,
    weights: Vec<usize>,
    cap: usize,
}

/// Recursion driver with a memo table keyed by rank, sorted weights, flavor
/// and cap. Safe to share between threads; values are deterministic, so a
/// racing duplicate insert is harmless.
#[derive(Debug, Default)]
pub struct Engine {
    memo: RwLock<HashMap<MemoKey, PowerSeries>>,
}

impl Engine {
    pub fn new() -> Self {
        Self::default()
    }

    /// Process-wide shared engine.
    pub fn global() -> &'static Engine {
        static ENGINE: OnceLock<Engine> = OnceLock::new();
        ENGINE.get_or_init(Engine::new)
    }

    pub fn memo_len(&self) -> usize {
        self.memo.read().unwrap().len()
    }

    /// `P^{U(n)}(M_0)` or `P^{O(n)}(M_0^sigma; Z_2)` depending on the flavor.
    pub fn equivariant_series(&self, spec: &SystemSpec, cap: usize) -> Result<PowerSeries, EngineError> {
        self.series(spec.flavor(), spec.rank(), spec.weights(), cap)
    }

    pub fn equivariant_series_complex(
        &self,
        rank: usize,
        weights: &[usize],
        cap: usize,
    ) -> Result<PowerSeries, EngineError> {
        let spec = SystemSpec::complex(rank, weights.to_vec())?;
        self.equivariant_series(&spec, cap)
    }

    pub fn equivariant_series_real(
        &self,
        rank: usize,
        weights: &[usize],
        cap: usize,
    ) -> Result<PowerSeries, EngineError> {
        let spec = SystemSpec::real(rank, weights.to_vec())?;
        self.equivariant_series(&spec, cap)
    }

    fn series(&self, flavor: Flavor, rank: usize, weights: &[usize], cap: usize) -> Result<PowerSeries, EngineError> {
        let mut sorted = weights.to_vec();
        sorted.sort_unstable();
        let key = MemoKey {
            flavor,
            rank,
            weights: sorted,
            cap,
        };
        if let Some(hit) = self.memo.read().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let value = self.compute(flavor, rank, weights, cap)?;
        let mut memo = self.memo.write().unwrap();
        Ok(memo.entry(key).or_insert(value).clone())
    }

    fn compute(&self, flavor: Flavor, rank: usize, weights: &[usize], cap: usize) -> Result<PowerSeries, EngineError> {
        let mut acc = match flavor {
            Flavor::Complex => catalog::poincare_bu(rank),
            Flavor::Real => catalog::poincare_bo_mod2(rank),
        }
        .expand(cap);
        for &l in weights {
            let grass = match flavor {
                Flavor::Complex => catalog::grass_c(rank, l)?,
                Flavor::Real => catalog::grass_r_mod2(rank, l)?,
            };
            acc = acc.mul(&grass.series(cap)).expect("rational series");
        }

        for index in strata::enumerate_for(rank, weights) {
            if index.is_minimal() {
                continue;
            }
            let data = match strata::codims(&index, rank) {
                Ok(data) => data,
                Err(StrataError::NegativeCodimension { index, codim }) => {
                    // Only an empty stratum may carry a negative codimension.
                    if self.block_product(flavor, &index, cap)?.is_zero() {
                        log::warn!("dropping empty index {index} with codimension {codim}");
                        continue;
                    }
                    return Err(EngineError::NegativeCodimension { index, codim });
                }
                Err(e) => return Err(e.into()),
            };
            let exponent = match flavor {
                Flavor::Complex => data.codim_complex,
                Flavor::Real => data.codim_real,
            };
            if exponent > cap {
                continue;
            }
            let contribution = self.block_product(flavor, &index, cap)?.shift(exponent);
            acc = acc.sub(&contribution).expect("rational series");
        }
        Ok(acc)
    }

    /// `prod_i P^{G(m_i)}` over the block subsystems of `index`, i.e. the
    /// contribution of its stratum before the `t^codim` shift. Zero exactly
    /// when the stratum is empty.
    pub fn stratum_contribution(
        &self,
        flavor: Flavor,
        rank: usize,
        index: &StratumIndex,
        cap: usize,
    ) -> Result<PowerSeries, EngineError> {
        // An index carries its own weights as column sums.
        let columns = index.matrix.first().map_or(0, Vec::len);
        let weights: Vec<usize> = (0..columns)
            .map(|j| index.matrix.iter().map(|row| row[j]).sum())
            .collect();
        index.validate(rank, &weights).map_err(StrataError::InvalidSpec)?;
        self.block_product(flavor, index, cap)
    }

    fn block_product(&self, flavor: Flavor, index: &StratumIndex, cap: usize) -> Result<PowerSeries, EngineError> {
        let mut acc = PowerSeries::one(Q, cap);
        for (block, row) in index.blocks.iter().zip(&index.matrix) {
            let factor = self.series(flavor, block.m, row, cap)?;
            acc = acc.mul(&factor).expect("rational series");
            if acc.is_zero() {
                break;
            }
        }
        Ok(acc)
    }

    /// Extracts `P(M//U(n))` from `P^{U(n)}(M_0) = P(M//U(n)) / (1 - t^2)`.
    /// `cap` defaults to the quotient dimension plus [`DEFAULT_SLACK`].
    pub fn quotient_complex(&self, spec: &SystemSpec, cap: Option<usize>) -> Result<QuotientReport, EngineError> {
        expect_flavor(spec, Flavor::Complex)?;
        let n = spec.rank();
        let dimension: i64 =
            spec.weights().iter().map(|&l| 2 * (l * (n - l)) as i64).sum::<i64>() - 2 * (n * n - 1) as i64;
        self.extract(spec, dimension, 2, cap)
    }

    /// Extracts `P(M^sigma//O(n); Z_2)` from `P^{O(n)}(M_0^sigma) = P(quotient) / (1 - t)`;
    /// requires odd rank.
    pub fn quotient_real(&self, spec: &SystemSpec, cap: Option<usize>) -> Result<QuotientReport, EngineError> {
        expect_flavor(spec, Flavor::Real)?;
        let n = spec.rank();
        let dimension: i64 = spec.weights().iter().map(|&l| (l * (n - l)) as i64).sum::<i64>() - (n * n - 1) as i64;
        self.extract(spec, dimension, 1, cap)
    }

    pub fn quotient(&self, spec: &SystemSpec, cap: Option<usize>) -> Result<QuotientReport, EngineError> {
        match spec.flavor() {
            Flavor::Complex => self.quotient_complex(spec, cap),
            Flavor::Real => self.quotient_real(spec, cap),
        }
    }

    fn extract(
        &self,
        spec: &SystemSpec,
        dimension: i64,
        bu1_degree: usize,
        cap: Option<usize>,
    ) -> Result<QuotientReport, EngineError> {
        let n = spec.rank();
        let total = spec.total_weight();
        let needed = dimension.max(0) as usize + 1;
        let cap = cap.unwrap_or(needed - 1 + DEFAULT_SLACK);
        if cap < needed {
            return Err(EngineError::CapTooSmall { cap, needed });
        }
        let equivariant = self.equivariant_series(spec, cap)?;
        let gcd = n.gcd(&total);
        let flags = QuotientFlags {
            gcd_free: gcd == 1,
            n_odd: n % 2 == 1,
        };
        let mut report = QuotientReport {
            spec: spec.clone(),
            equivariant,
            quotient: None,
            dimension,
            flags,
            checks: vec![],
        };
        if !flags.gcd_free {
            return Err(EngineError::GcdObstruction {
                n,
                total,
                gcd,
                report: Box::new(report),
            });
        }
        if spec.flavor() == Flavor::Real && !flags.n_odd {
            return Err(EngineError::ParityObstruction {
                n,
                report: Box::new(report),
            });
        }

        let candidate = report.equivariant.mul_one_minus(bu1_degree);
        let max_degree = usize::try_from(dimension).ok();
        let poly = candidate
            .to_polynomial(max_degree)
            .map_err(|degree| EngineError::NotPolynomial {
                degree,
                dimension,
                coefficient: coeff_string(&candidate.coeff(degree)),
            })?;
        report.checks = structural_checks(&poly, dimension, spec.flavor());
        report.quotient = Some(poly);

        match spec.flavor() {
            Flavor::Complex => {
                if let Some(check) = self.oracle_check(&report) {
                    report.checks.push(check);
                }
            }
            Flavor::Real => {
                let complex = self.quotient_complex(&spec.with_flavor(Flavor::Complex), None)?;
                let complex_poly = complex.quotient.expect("extracted above");
                let real_poly = report.quotient.as_ref().expect("set above");
                let pass = halving_matches(&complex_poly, real_poly);
                report.checks.push(CheckResult::new(
                    "halving",
                    pass,
                    format!("complex quotient {complex_poly}"),
                ));
            }
        }
        Ok(report)
    }

    fn oracle_check(&self, report: &QuotientReport) -> Option<CheckResult> {
        let spec = &report.spec;
        let r = spec.weights().len();
        let applies = spec.rank() == 2
            && spec.weights().iter().all(|&l| l == 1)
            && r % 2 == 1
            && (3..=oracle::MAX_POINTS).contains(&r);
        if !applies {
            return None;
        }
        Some(match oracle::compare_with_poincare(report, &REPORT_ORACLE_PRIMES) {
            Ok(rows) => {
                let detail: Vec<String> = rows
                    .iter()
                    .map(|row| format!("p={}: {}", row.p, row.point_count))
                    .collect();
                CheckResult::new("oracle", rows.iter().all(|row| row.pass), detail.join(", "))
            }
            Err(e) => CheckResult::new("oracle", false, e.to_string()),
        })
    }

    /// Extracts both quotients and compares them.
    pub fn check_halving(&self, rank: usize, weights: &[usize]) -> Result<HalvingCheck, EngineError> {
        let complex = self.quotient_complex(&SystemSpec::complex(rank, weights.to_vec())?, None)?;
        let real = self.quotient_real(&SystemSpec::real(rank, weights.to_vec())?, None)?;
        let complex = complex.quotient.expect("present on success");
        let real = real.quotient.expect("present on success");
        Ok(HalvingCheck {
            pass: halving_matches(&complex, &real),
            complex,
            real,
        })
    }
}

fn expect_flavor(spec: &SystemSpec, expected: Flavor) -> Result<(), EngineError> {
    if spec.flavor() != expected {
        return Err(EngineError::FlavorMismatch {
            expected,
            got: spec.flavor(),
        });
    }
    Ok(())
}

fn structural_checks(poly: &Polynomial, dimension: i64, flavor: Flavor) -> Vec<CheckResult> {
    let nonneg = poly.coeffs().iter().all(|c| c.is_integer() && !c.is_negative());
    let mut checks = vec![CheckResult::new(
        "non-negativity",
        nonneg,
        if nonneg {
            "all coefficients are non-negative integers"
        } else {
            "negative or fractional coefficient"
        },
    )];
    if poly.is_zero() {
        checks.push(CheckResult::new("palindrome", true, "empty quotient"));
        checks.push(CheckResult::new("degree", true, "empty quotient"));
        return checks;
    }
    checks.push(CheckResult::new("palindrome", poly.is_palindromic(), poly.to_string()));
    let degree = poly.degree().unwrap_or(0) as i64;
    let constant_one = poly.coeff(0) == BigRational::from_integer(1.into());
    let even = flavor == Flavor::Real || poly.coeffs().iter().skip(1).step_by(2).all(Zero::is_zero);
    checks.push(CheckResult::new(
        "degree",
        degree == dimension && constant_one && even,
        format!("degree {degree}, dimension {dimension}"),
    ));
    checks
}

/// Grassmannian series from the matrix-space recursion
/// `P(Gr_k(C^n)) = prod_{p<=k} 1/(1-t^{2p}) - sum_{i=1}^{k} P(Gr_{k-i}(C^n)) t^{2i(n-k+i)} prod_{p<=i} 1/(1-t^{2p})`.
pub fn matrix_grass_complex(n: usize, k: usize, cap: usize) -> Result<PowerSeries, EngineError> {
    matrix_grass(n, k, cap, 2)
}

/// Real analogue of [`matrix_grass_complex`] with every exponent halved.
pub fn matrix_grass_real(n: usize, k: usize, cap: usize) -> Result<PowerSeries, EngineError> {
    matrix_grass(n, k, cap, 1)
}

fn matrix_grass(n: usize, k: usize, cap: usize, step: usize) -> Result<PowerSeries, EngineError> {
    if k > n {
        return Err(CatalogError::KOutOfRange { n, k }.into());
    }
    let classifying =
        |i: usize| -> PowerSeries { (1..=i).fold(PowerSeries::one(Q, cap), |acc, p| acc.div_one_minus(step * p)) };
    // solved[j] = P(Gr_j), bottom-up in j.
    let mut solved: Vec<PowerSeries> = Vec::with_capacity(k + 1);
    for j in 0..=k {
        let mut acc = classifying(j);
        for i in 1..=j {
            let codim = step * i * (n - j + i);
            if codim > cap {
                continue;
            }
            let term = solved[j - i]
                .mul(&classifying(i))
                .expect("rational series")
                .shift(codim);
            acc = acc.sub(&term).expect("rational series");
        }
        solved.push(acc);
    }
    Ok(solved.pop().expect("k + 1 entries"))
}
