//! Batch verification suites.
//!
//! Every check is expanded into independent cases, run serially or on the
//! rayon pool, and folded back into rows in a fixed order, so the rendered
//! table is byte-identical either way.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::catalog;
use crate::engine::{self, Engine};
use crate::oracle::{self, PrimeField};
use crate::series::PowerSeries;
use crate::strata::{self, Block, Flavor, StratumIndex, SystemSpec};

/// Largest rank used by the catalog suite.
pub const CATALOG_MAX_N: usize = 8;
/// Largest weight count used for quotient checks.
pub const ENGINE_MAX_R: usize = 5;
/// Largest weight count used for the brute-force enumeration check.
pub const STRATA_MAX_R: usize = 4;
pub const ORACLE_PRIMES: [u64; 4] = [3, 5, 7, 11];

const MATRIX_CAP: usize = 40;
const SERIES_CAP: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Catalog,
    Strata,
    Engine,
    Oracle,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Catalog, Suite::Strata, Suite::Engine, Suite::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Catalog => "catalog",
            Suite::Strata => "strata",
            Suite::Engine => "engine",
            Suite::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyScope {
    pub suites: Vec<Suite>,
    /// Bound on the rank of the systems fed to the strata and engine suites.
    /// Zero selects nothing.
    pub max_n: usize,
    pub parallel: bool,
    /// Test hook: every case of the named row reports a failure.
    pub inject_fault: Option<String>,
}

impl VerifyScope {
    pub fn all(max_n: usize) -> Self {
        VerifyScope {
            suites: Suite::ALL.to_vec(),
            max_n,
            parallel: false,
            inject_fault: None,
        }
    }

    pub fn only(suite: Suite, max_n: usize) -> Self {
        VerifyScope {
            suites: vec![suite],
            ..Self::all(max_n)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub case: String,
    pub detail: String,
    pub repro: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub name: String,
    pub cases: usize,
    pub passed: usize,
    pub failures: Vec<Failure>,
}

impl Row {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VerifyReport {
    pub rows: Vec<Row>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(Row::pass)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let width = self.rows.iter().map(|r| r.name.len()).max().unwrap_or(0).max(5);
        writeln!(out, "{:<width$}  {:>6}  {:>6}  status", "check", "cases", "passed").unwrap();
        for row in &self.rows {
            let status = if row.pass() { "PASS" } else { "FAIL" };
            writeln!(
                out,
                "{:<width$}  {:>6}  {:>6}  {status}",
                row.name, row.cases, row.passed
            )
            .unwrap();
        }
        for row in self.rows.iter().filter(|r| !r.pass()) {
            let f = &row.failures[0];
            writeln!(out, "FAIL {} [{}]: {}", row.name, f.case, f.detail).unwrap();
            writeln!(out, "  repro: {}", f.repro).unwrap();
        }
        let failed = self.rows.iter().filter(|r| !r.pass()).count();
        writeln!(out, "summary: {} checks, {} failed", self.rows.len(), failed).unwrap();
        out
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn check(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

type CaseFn = Box<dyn Fn(&Engine) -> Outcome + Send + Sync>;

struct Case {
    row: String,
    label: String,
    repro: String,
    run: CaseFn,
}

fn case(row: &str, label: String, repro: String, run: impl Fn(&Engine) -> Outcome + Send + Sync + 'static) -> Case {
    Case {
        row: row.to_string(),
        label,
        repro,
        run: Box::new(run),
    }
}

pub fn run(scope: &VerifyScope) -> VerifyReport {
    let mut cases = Vec::new();
    if scope.max_n > 0 {
        for suite in &scope.suites {
            match suite {
                Suite::Catalog => catalog_cases(&mut cases),
                Suite::Strata => strata_cases(scope.max_n, &mut cases),
                Suite::Engine => engine_cases(scope.max_n, &mut cases),
                Suite::Oracle if scope.max_n >= 2 => oracle_cases(&mut cases),
                Suite::Oracle => {}
            }
        }
    }

    let engine = Engine::new();
    let evaluate = |c: &Case| -> Outcome {
        if scope.inject_fault.as_deref() == Some(c.row.as_str()) {
            return Outcome::check(false, "injected fault");
        }
        (c.run)(&engine)
    };
    let outcomes: Vec<Outcome> = if scope.parallel {
        cases.par_iter().map(evaluate).collect()
    } else {
        cases.iter().map(evaluate).collect()
    };

    let mut rows: Vec<Row> = Vec::new();
    for (c, o) in cases.iter().zip(outcomes) {
        if rows.last().map(|r| &r.name) != Some(&c.row) {
            rows.push(Row {
                name: c.row.clone(),
                cases: 0,
                passed: 0,
                failures: vec![],
            });
        }
        let row = rows.last_mut().expect("pushed above");
        row.cases += 1;
        if o.pass {
            row.passed += 1;
        } else {
            row.failures.push(Failure {
                case: c.label.clone(),
                detail: o.detail,
                repro: c.repro.clone(),
            });
        }
    }
    VerifyReport { rows }
}

fn grass_repro(n: usize, k: usize) -> String {
    format!("quotbetti grassmann -n {n} -k {k} --field q && quotbetti grassmann -n {n} -k {k} --field z2")
}

fn catalog_cases(out: &mut Vec<Case>) {
    for n in 0..=CATALOG_MAX_N {
        out.push(case(
            "catalog/symmetry",
            format!("n={n}"),
            grass_repro(n, 0),
            move |_| {
                let bad = (0..=n).find(|&k| {
                    catalog::grass_c(n, k) != catalog::grass_c(n, n - k)
                        || catalog::grass_r_mod2(n, k) != catalog::grass_r_mod2(n, n - k)
                });
                Outcome::check(bad.is_none(), format!("asymmetric at k={bad:?}"))
            },
        ));
    }
    for n in 0..=CATALOG_MAX_N {
        out.push(case(
            "catalog/halving",
            format!("n={n}"),
            grass_repro(n, n / 2),
            move |_| {
                let bad = (0..=n).find(|&k| {
                    let c = catalog::grass_c(n, k).expect("k in range");
                    let r = catalog::grass_r_mod2(n, k).expect("k in range");
                    c.halve_exponents().ok() != Some(r)
                });
                Outcome::check(bad.is_none(), format!("halving fails at k={bad:?}"))
            },
        ));
    }
    for n in 0..=CATALOG_MAX_N {
        out.push(case(
            "catalog/degree-palindrome",
            format!("n={n}"),
            grass_repro(n, n / 2),
            move |_| {
                let bad = (0..=n).find(|&k| {
                    let c = catalog::grass_c(n, k).expect("k in range");
                    let r = catalog::grass_r_mod2(n, k).expect("k in range");
                    c.degree() != Some(2 * k * (n - k))
                        || r.degree() != Some(k * (n - k))
                        || !c.is_palindromic()
                        || !r.is_palindromic()
                });
                Outcome::check(bad.is_none(), format!("degree or palindrome fails at k={bad:?}"))
            },
        ));
    }
    for n in 0..=6 {
        out.push(case(
            "catalog/classifying-halving",
            format!("n={n}"),
            format!("quotbetti catalog 'BU({n})' && quotbetti catalog 'BO({n})'"),
            move |_| {
                let bo = catalog::poincare_bo_mod2(n).expand(SERIES_CAP);
                let bu = catalog::poincare_bu(n).expand(2 * SERIES_CAP);
                let pass = bu.halve_exponents().ok().as_ref() == Some(&bo);
                Outcome::check(pass, "P(BO(n)) differs from P(BU(n)) at t^{1/2}")
            },
        ));
    }
    for n in 0..=CATALOG_MAX_N {
        for flavor in [Flavor::Complex, Flavor::Real] {
            out.push(case(
                "catalog/matrix-recursion",
                format!("n={n} {flavor}"),
                grass_repro(n, n / 2),
                move |_| {
                    let bad = (0..=n).find(|&k| {
                        let (rec, closed) = match flavor {
                            Flavor::Complex => (engine::matrix_grass_complex(n, k, MATRIX_CAP), catalog::grass_c(n, k)),
                            Flavor::Real => (engine::matrix_grass_real(n, k, MATRIX_CAP), catalog::grass_r_mod2(n, k)),
                        };
                        rec.ok() != closed.ok().map(|p| p.series(MATRIX_CAP))
                    });
                    Outcome::check(
                        bad.is_none(),
                        format!("recursion differs from closed form at k={bad:?}"),
                    )
                },
            ));
        }
    }
}

/// Every vector in `{0..=n}^r`.
pub fn weight_vectors(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut w = vec![0; r];
    loop {
        out.push(w.clone());
        let mut i = 0;
        while i < r {
            w[i] += 1;
            if w[i] <= n {
                break;
            }
            w[i] = 0;
            i += 1;
        }
        if i == r {
            return out;
        }
    }
}

/// Non-decreasing vectors in `{0..=n}^r`, one per multiset.
pub fn weight_multisets(n: usize, r: usize) -> Vec<Vec<usize>> {
    weight_vectors(n, r)
        .into_iter()
        .filter(|w| w.windows(2).all(|p| p[0] <= p[1]))
        .collect()
}

fn join(w: &[usize]) -> String {
    w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn strata_repro(n: usize, w: &[usize]) -> String {
    format!("quotbetti strata -n {n} --weights {}", join(w))
}

fn quotient_repro(n: usize, w: &[usize], flavor: Flavor) -> String {
    format!("quotbetti quotient -n {n} --weights {} --flavor {flavor}", join(w))
}

/// Independent generator: every composition of `n` (via cut sets), every
/// matrix with entries up to `max m_i`, filtered by all index constraints.
pub fn brute_force_indices(n: usize, weights: &[usize]) -> Vec<StratumIndex> {
    let r = weights.len();
    let total: usize = weights.iter().sum();
    let mut out = Vec::new();
    for cuts in 0u32..(1 << (n - 1)) {
        let mut sizes = Vec::new();
        let mut start = 0;
        for pos in 1..=n {
            if pos == n || cuts & (1 << (pos - 1)) != 0 {
                sizes.push(pos - start);
                start = pos;
            }
        }
        let s = sizes.len();
        let bound = *sizes.iter().max().expect("n >= 1") + 1;
        let cells = s * r;
        let mut digits = vec![0usize; cells];
        'matrices: loop {
            let matrix: Vec<Vec<usize>> = digits.chunks(r).map(<[usize]>::to_vec).collect();
            let blocks: Vec<Block> = sizes
                .iter()
                .zip(&matrix)
                .map(|(&m, row)| Block { k: row.iter().sum(), m })
                .collect();
            let ok = blocks.iter().map(|b| b.k).sum::<usize>() == total
                && blocks.windows(2).all(|p| p[0].k * p[1].m > p[1].k * p[0].m)
                && (0..r).all(|j| matrix.iter().map(|row| row[j]).sum::<usize>() == weights[j])
                && blocks.iter().zip(&matrix).all(|(b, row)| row.iter().all(|&x| x <= b.m));
            if ok {
                out.push(StratumIndex { blocks, matrix });
            }
            let mut i = 0;
            loop {
                if i == cells {
                    break 'matrices;
                }
                digits[i] += 1;
                if digits[i] < bound {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
        }
    }
    out.sort();
    out
}

fn strata_cases(max_n: usize, out: &mut Vec<Case>) {
    let top = max_n.min(3);
    let mut systems = Vec::new();
    for n in 1..=top {
        for r in 1..=STRATA_MAX_R {
            systems.extend(weight_vectors(n, r).into_iter().map(|w| (n, w)));
        }
    }
    for (n, w) in &systems {
        let (n, w) = (*n, w.clone());
        out.push(case(
            "strata/completeness",
            format!("n={n} l={}", join(&w)),
            strata_repro(n, &w),
            move |_| {
                let spec = SystemSpec::complex(n, w.clone()).expect("valid grid");
                let fast = strata::enumerate_indices(&spec);
                let brute = brute_force_indices(n, &w);
                Outcome::check(
                    fast == brute,
                    format!("{} enumerated vs {} brute force", fast.len(), brute.len()),
                )
            },
        ));
    }
    for (n, w) in &systems {
        let (n, w) = (*n, w.clone());
        out.push(case(
            "strata/minimal-unique",
            format!("n={n} l={}", join(&w)),
            strata_repro(n, &w),
            move |_| {
                let spec = SystemSpec::complex(n, w.clone()).expect("valid grid");
                let all = strata::enumerate_indices(&spec);
                let minimal: Vec<_> = all.iter().filter(|x| x.is_minimal()).collect();
                let pass = minimal.len() == 1
                    && minimal[0].blocks
                        == vec![Block {
                            k: w.iter().sum(),
                            m: n,
                        }]
                    && minimal[0].matrix == vec![w.clone()]
                    && strata::signed_codim_complex(minimal[0], n) == 0;
                Outcome::check(pass, format!("{} minimal indices", minimal.len()))
            },
        ));
    }
    for (n, w) in &systems {
        let (n, w) = (*n, w.clone());
        out.push(case(
            "strata/codimension",
            format!("n={n} l={}", join(&w)),
            strata_repro(n, &w),
            move |engine| {
                let spec = SystemSpec::complex(n, w.clone()).expect("valid grid");
                for index in strata::enumerate_indices(&spec) {
                    let codim = strata::signed_codim_complex(&index, n);
                    if codim % 2 != 0 {
                        return Outcome::check(false, format!("odd codimension {codim} at {index}"));
                    }
                    if codim < 0 {
                        match engine.stratum_contribution(Flavor::Complex, n, &index, SERIES_CAP) {
                            Ok(c) if c.is_zero() => {}
                            _ => {
                                return Outcome::check(
                                    false,
                                    format!("nonempty stratum {index} with codimension {codim}"),
                                )
                            }
                        }
                    }
                }
                Outcome::check(true, "")
            },
        ));
    }
}

fn engine_cases(max_n: usize, out: &mut Vec<Case>) {
    for n in 2..=max_n {
        for l in 1..n {
            for flavor in [Flavor::Complex, Flavor::Real] {
                let w = vec![l];
                out.push(case(
                    "engine/vanishing",
                    format!("n={n} l={l} {flavor}"),
                    quotient_repro(n, &w, flavor),
                    move |engine| {
                        let spec = SystemSpec::new(n, w.clone(), flavor).expect("valid");
                        let s = engine.equivariant_series(&spec, SERIES_CAP);
                        Outcome::check(s.as_ref().is_ok_and(PowerSeries::is_zero), format!("{s:?}"))
                    },
                ));
            }
        }
    }

    let mut grid = Vec::new();
    for n in 1..=max_n {
        for r in 1..=ENGINE_MAX_R {
            grid.extend(weight_multisets(n, r).into_iter().map(|w| (n, w)));
        }
    }

    for (n, w) in grid.iter().filter(|(_, w)| w.len() >= 2) {
        let (n, w) = (*n, w.clone());
        out.push(case(
            "engine/permutation",
            format!("n={n} l={}", join(&w)),
            quotient_repro(n, &w, Flavor::Complex),
            move |_| {
                // Fresh engines so the memo cannot canonicalize the answer.
                let base = Engine::new().equivariant_series_complex(n, &w, SERIES_CAP);
                let mut reversed = w.clone();
                reversed.reverse();
                let mut rotated = w.clone();
                rotated.rotate_left(1);
                let pass = [reversed, rotated].iter().all(|p| {
                    Engine::new()
                        .equivariant_series_complex(n, p, SERIES_CAP)
                        .map(|s| s.coeffs().to_vec())
                        .ok()
                        == base.as_ref().map(|s| s.coeffs().to_vec()).ok()
                });
                Outcome::check(pass, "series depends on weight order")
            },
        ));
    }

    for n in 1..=max_n {
        for r in 1..=3 {
            for mask in 0..(1u32 << r) {
                let w: Vec<usize> = (0..r).map(|j| if mask & (1 << j) != 0 { n } else { 0 }).collect();
                out.push(case(
                    "engine/formality",
                    format!("n={n} l={}", join(&w)),
                    quotient_repro(n, &w, Flavor::Complex),
                    move |engine| {
                        let c = engine.equivariant_series_complex(n, &w, SERIES_CAP);
                        let r = engine.equivariant_series_real(n, &w, SERIES_CAP);
                        let pass = c.ok() == Some(catalog::poincare_bu(n).expand(SERIES_CAP))
                            && r.ok() == Some(catalog::poincare_bo_mod2(n).expand(SERIES_CAP));
                        Outcome::check(pass, "point system is not equivariantly formal")
                    },
                ));
            }
        }
    }

    let coprime: Vec<(usize, Vec<usize>)> = grid
        .iter()
        .filter(|(n, w)| num_integer::gcd(*n, w.iter().sum()) == 1)
        .cloned()
        .collect();
    for (n, w) in &coprime {
        let flavors: &[Flavor] = if n % 2 == 1 {
            &[Flavor::Complex, Flavor::Real]
        } else {
            &[Flavor::Complex]
        };
        for &flavor in flavors {
            let (n, w) = (*n, w.clone());
            out.push(case(
                "engine/structure",
                format!("n={n} l={} {flavor}", join(&w)),
                quotient_repro(n, &w, flavor),
                move |engine| {
                    let spec = SystemSpec::new(n, w.clone(), flavor).expect("valid");
                    match engine.quotient(&spec, None) {
                        Ok(report) => {
                            let failed: Vec<&str> = report
                                .checks
                                .iter()
                                .filter(|c| !c.pass)
                                .map(|c| c.name.as_str())
                                .collect();
                            Outcome::check(failed.is_empty(), format!("failed checks: {}", failed.join(",")))
                        }
                        Err(e) => Outcome::check(false, e.to_string()),
                    }
                },
            ));
        }
    }
    for (n, w) in coprime.iter().filter(|(n, _)| n % 2 == 1) {
        let (n, w) = (*n, w.clone());
        out.push(case(
            "engine/halving",
            format!("n={n} l={}", join(&w)),
            quotient_repro(n, &w, Flavor::Real),
            move |engine| match engine.check_halving(n, &w) {
                Ok(h) => Outcome::check(h.pass, format!("real {} vs complex {}", h.real, h.complex)),
                Err(e) => Outcome::check(false, e.to_string()),
            },
        ));
    }
}

fn oracle_cases(out: &mut Vec<Case>) {
    let primes = ORACLE_PRIMES.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
    for r in [3usize, 5] {
        for p in ORACLE_PRIMES {
            out.push(case(
                "oracle/free-action",
                format!("r={r} p={p}"),
                format!("quotbetti oracle -r {r} --primes {p}"),
                move |_| {
                    let field = PrimeField::new(p).expect("odd prime");
                    match oracle::quotient_point_count(&field, r) {
                        Ok(_) => Outcome::check(true, ""),
                        Err(e) => Outcome::check(false, e.to_string()),
                    }
                },
            ));
        }
    }
    for r in [3usize, 5] {
        let repro = format!("quotbetti oracle -r {r} --primes {primes}");
        out.push(case(
            "oracle/polynomiality",
            format!("r={r}"),
            repro,
            move |_| match oracle::count_table(r, &ORACLE_PRIMES) {
                Ok(table) => Outcome::check(
                    table.interpolant.degree() == Some(r - 3),
                    format!("interpolant {} has wrong degree", table.interpolant),
                ),
                Err(e) => Outcome::check(false, e.to_string()),
            },
        ));
    }
    for r in [3usize, 5] {
        let w = vec![1; r];
        out.push(case(
            "oracle/agreement",
            format!("r={r}"),
            quotient_repro(2, &w, Flavor::Complex),
            move |engine| {
                let spec = SystemSpec::complex(2, w.clone()).expect("valid");
                let report = match engine.quotient_complex(&spec, None) {
                    Ok(report) => report,
                    Err(e) => return Outcome::check(false, e.to_string()),
                };
                match oracle::compare_with_poincare(&report, &ORACLE_PRIMES) {
                    Ok(rows) => Outcome::check(rows.iter().all(|row| row.pass), format!("{rows:?}")),
                    Err(e) => Outcome::check(false, e.to_string()),
                }
            },
        ));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_force_matches_hand_counts() {
        assert_eq!(brute_force_indices(2, &[1]).len(), 2);
        assert_eq!(brute_force_indices(2, &[1, 1, 1]).len(), 5);
        assert_eq!(brute_force_indices(1, &[1, 0]).len(), 1);
    }

    #[test]
    fn weight_grids() {
        assert_eq!(weight_vectors(2, 3).len(), 27);
        assert_eq!(weight_multisets(2, 3).len(), 10);
    }

    #[test]
    fn empty_scope_is_empty() {
        let report = run(&VerifyScope::all(0));
        assert!(report.rows.is_empty());
        assert!(report.all_pass());
        assert_eq!(
            report.render(),
            "check   cases  passed  status\nsummary: 0 checks, 0 failed\n"
        );
    }

    #[test]
    fn injected_fault_names_the_row() {
        let mut scope = VerifyScope::only(Suite::Oracle, 2);
        scope.inject_fault = Some("oracle/polynomiality".into());
        let report = run(&scope);
        assert!(!report.all_pass());
        let failing: Vec<_> = report
            .rows
            .iter()
            .filter(|r| !r.pass())
            .map(|r| r.name.as_str())
            .collect();
        assert_eq!(failing, vec!["oracle/polynomiality"]);
        assert!(report.render().contains("repro: quotbetti oracle -r 3"));
    }
}
