//! Acceptance suite: one line per criterion, non-zero exit on any failure.
//!
//! Every criterion is exact; there are no tolerances to tune.

use std::process::ExitCode;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use quotbetti::engine::{matrix_grass_complex, matrix_grass_real};
use quotbetti::oracle::{self, PrimeField};
use quotbetti::strata::{self, Block, StratumIndex};
use quotbetti::verify::{self, VerifyScope};
use quotbetti::{catalog, Engine, FieldTag, Flavor, Polynomial, PowerSeries, SystemSpec};

const Q: FieldTag = FieldTag::Rationals;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// AC1: matrix-space recursion equals the Gaussian closed forms, n <= 8, cap 40.
fn closed_form_equivalence() -> Verdict {
    let mut cases = 0;
    for n in 0..=8 {
        for k in 0..=n {
            let c = matrix_grass_complex(n, k, 40).map_err(|e| e.to_string())?;
            let r = matrix_grass_real(n, k, 40).map_err(|e| e.to_string())?;
            let gc = catalog::grass_c(n, k).unwrap().series(40);
            let gr = catalog::grass_r_mod2(n, k).unwrap().series(40);
            ensure(c.coeffs() == gc.coeffs(), || format!("complex ({n},{k}): {c} vs {gc}"))?;
            ensure(r.coeffs() == gr.coeffs(), || format!("real ({n},{k}): {r} vs {gr}"))?;
            cases += 2;
        }
    }
    Ok(format!("{cases} comparisons"))
}

/// AC2: grassRmod2(n,k) = halveExponents(grassC(n,k)), n <= 10.
fn grassmannian_halving() -> Verdict {
    let mut cases = 0;
    for n in 0..=10 {
        for k in 0..=n {
            let c = catalog::grass_c(n, k).unwrap();
            let r = catalog::grass_r_mod2(n, k).unwrap();
            let cap = 2 * k * (n - k);
            let halved = c.series(cap).halve_exponents().map_err(|e| e.to_string())?;
            ensure(halved == r.series(cap / 2), || format!("({n},{k}): {halved} vs {r}"))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} Grassmannians"))
}

/// AC3: single-Grassmannian systems have identically zero equivariant series.
fn empty_quotient_vanishing() -> Verdict {
    let engine = Engine::new();
    let mut cases = 0;
    for n in 2..=5 {
        for l in 1..n {
            let c = engine
                .equivariant_series_complex(n, &[l], 60)
                .map_err(|e| e.to_string())?;
            let r = engine.equivariant_series_real(n, &[l], 60).map_err(|e| e.to_string())?;
            ensure(c.cap() == 60 && c.is_zero(), || format!("complex ({n},{l}) = {c}"))?;
            ensure(r.cap() == 60 && r.is_zero(), || format!("real ({n},{l}) = {r}"))?;
            cases += 2;
        }
    }
    Ok(format!("{cases} zero series at cap 60"))
}

/// AC4: three points on the projective line.
fn rigid_configuration() -> Verdict {
    let engine = Engine::new();
    let report = engine
        .quotient_complex(&SystemSpec::complex(2, vec![1, 1, 1]).unwrap(), None)
        .map_err(|e| e.to_string())?;
    ensure(report.quotient == Some(Polynomial::one(Q)), || {
        format!("quotient {:?}", report.quotient)
    })?;
    ensure(report.dimension == 0, || format!("dimension {}", report.dimension))?;
    let real = engine
        .equivariant_series_real(2, &[1, 1, 1], 60)
        .map_err(|e| e.to_string())?;
    ensure(real.cap() == 60 && real == PowerSeries::geometric(Q, 60, 1), || {
        format!("real series {real}")
    })?;
    Ok("P(M//U(2)) = 1, P^O(2) = 1/(1-t)".into())
}

/// AC5: five points on the line against finite-field point counts.
fn oracle_agreement() -> Verdict {
    let primes = [3u64, 5, 7, 11];
    let engine = Engine::new();
    let report = engine
        .quotient_complex(&SystemSpec::complex(2, vec![1; 5]).unwrap(), None)
        .map_err(|e| e.to_string())?;
    let poly = report.quotient.clone().ok_or("no quotient polynomial")?;
    let mut samples = Vec::new();
    for p in primes {
        let count = oracle::quotient_point_count(&PrimeField::new(p).unwrap(), 5).map_err(|e| e.to_string())?;
        let value = oracle::evaluate_at_t_squared(&poly, p).ok_or("odd-degree term in quotient")?;
        ensure(value == BigRational::from_integer(count.into()), || {
            format!("p={p}: count {count} vs {value}")
        })?;
        samples.push((p as i64, count as i64));
    }
    let interpolant = oracle::interpolate(&samples);
    let halved = poly.halve_exponents().map_err(|e| e.to_string())?;
    ensure(interpolant == halved, || {
        format!("interpolant {interpolant} vs {halved}")
    })?;
    let rows = oracle::compare_with_poincare(&report, &primes).map_err(|e| e.to_string())?;
    ensure(rows.iter().all(|r| r.pass), || format!("{rows:?}"))?;
    Ok(format!(
        "counts {:?}, interpolant {interpolant}",
        samples.iter().map(|s| s.1).collect::<Vec<_>>()
    ))
}

/// AC6: real quotient = complex quotient at t^{1/2} for odd coprime rank 3.
fn real_complex_halving() -> Verdict {
    let engine = Engine::new();
    let mut systems = vec![vec![1, 1, 1, 1]];
    for r in 1..=5 {
        systems.extend(
            verify::weight_vectors(1, r)
                .into_iter()
                .map(|w| w.into_iter().map(|x| x + 1).collect::<Vec<_>>())
                .filter(|w: &Vec<usize>| num_integer::gcd(3, w.iter().sum::<usize>()) == 1),
        );
    }
    for w in &systems {
        let h = engine.check_halving(3, w).map_err(|e| format!("{w:?}: {e}"))?;
        ensure(h.pass, || format!("{w:?}: real {} vs complex {}", h.real, h.complex))?;
    }
    Ok(format!("{} systems", systems.len()))
}

/// AC7: structure of every extractable quotient on n <= 3, r <= 5.
fn structural_properties() -> Verdict {
    let engine = Engine::new();
    let mut extracted = 0;
    let mut nonempty = 0;
    for n in 1..=3 {
        for r in 1..=5 {
            for w in verify::weight_vectors(n, r) {
                if num_integer::gcd(n, w.iter().sum()) != 1 {
                    continue;
                }
                let flavors: &[Flavor] = if n % 2 == 1 {
                    &[Flavor::Complex, Flavor::Real]
                } else {
                    &[Flavor::Complex]
                };
                for &flavor in flavors {
                    let spec = SystemSpec::new(n, w.clone(), flavor).unwrap();
                    let report = engine.quotient(&spec, None).map_err(|e| format!("{spec:?}: {e}"))?;
                    let poly = report.quotient.clone().ok_or("missing quotient")?;
                    extracted += 1;
                    ensure(poly.coeffs().iter().all(|c| c.is_integer() && !c.is_negative()), || {
                        format!("{spec:?}: negative or fractional {poly}")
                    })?;
                    if poly.is_zero() {
                        continue;
                    }
                    nonempty += 1;
                    ensure(poly.is_palindromic(), || format!("{spec:?}: not palindromic {poly}"))?;
                    ensure(poly.degree() == usize::try_from(report.dimension).ok(), || {
                        format!("{spec:?}: degree {:?} vs dimension {}", poly.degree(), report.dimension)
                    })?;
                    ensure(poly.coeff(0) == BigRational::from_integer(1.into()), || {
                        format!("{spec:?}: constant term {}", poly.coeff(0))
                    })?;
                }
            }
        }
    }
    Ok(format!("{extracted} quotients, {nonempty} nonempty"))
}

/// Brute force for AC8: compositions by cut sets, all matrices with entries
/// up to `max m_i`, block weights read off as row sums, then every constraint.
fn brute_indices(n: usize, weights: &[usize]) -> Vec<StratumIndex> {
    let r = weights.len();
    let mut out = Vec::new();
    for cuts in 0..(1usize << (n - 1)) {
        let mut sizes = vec![1usize];
        for bit in 0..n - 1 {
            if cuts >> bit & 1 == 1 {
                sizes.push(1);
            } else {
                *sizes.last_mut().unwrap() += 1;
            }
        }
        let s = sizes.len();
        let base = sizes.iter().max().unwrap() + 1;
        let total = base.pow((s * r) as u32);
        for code in 0..total {
            let mut c = code;
            let matrix: Vec<Vec<usize>> = (0..s)
                .map(|_| {
                    (0..r)
                        .map(|_| {
                            let d = c % base;
                            c /= base;
                            d
                        })
                        .collect()
                })
                .collect();
            let blocks: Vec<Block> = matrix
                .iter()
                .zip(&sizes)
                .map(|(row, &m)| Block { k: row.iter().sum(), m })
                .collect();
            let fits = blocks.iter().zip(&matrix).all(|(b, row)| row.iter().all(|&x| x <= b.m));
            let columns = (0..r).all(|j| matrix.iter().map(|row| row[j]).sum::<usize>() == weights[j]);
            let slopes = blocks.windows(2).all(|p| p[0].k * p[1].m > p[1].k * p[0].m);
            if fits && columns && slopes {
                out.push(StratumIndex { blocks, matrix });
            }
        }
    }
    out.sort();
    out
}

/// AC8: enumeration completeness, unique minimal index, codimension parity and sign.
fn enumeration_completeness() -> Verdict {
    let engine = Engine::new();
    let (mut systems, mut indices, mut empty_negative) = (0, 0, 0);
    for n in 1..=3 {
        for r in 1..=4 {
            for w in verify::weight_vectors(n, r) {
                let spec = SystemSpec::complex(n, w.clone()).unwrap();
                let fast = strata::enumerate_indices(&spec);
                let brute = brute_indices(n, &w);
                ensure(fast == brute, || {
                    format!("n={n} {w:?}: {} vs {} indices", fast.len(), brute.len())
                })?;
                ensure(fast.iter().filter(|x| x.is_minimal()).count() == 1, || {
                    format!("n={n} {w:?}: minimal count")
                })?;
                for index in &fast {
                    let codim = strata::signed_codim_complex(index, n);
                    ensure(codim % 2 == 0, || format!("odd codimension {codim} at {index}"))?;
                    if codim < 0 {
                        // Only empty strata may have a formally negative codimension.
                        let contribution = engine
                            .stratum_contribution(Flavor::Complex, n, index, 40)
                            .map_err(|e| e.to_string())?;
                        ensure(contribution.is_zero(), || {
                            format!("nonempty stratum {index} has codimension {codim}")
                        })?;
                        empty_negative += 1;
                    }
                    if index.is_minimal() {
                        ensure(codim == 0, || format!("minimal index codimension {codim}"))?;
                    }
                }
                systems += 1;
                indices += fast.len();
            }
        }
    }
    Ok(format!(
        "{systems} systems, {indices} indices; {empty_negative} empty indices with formal codimension < 0"
    ))
}

fn series_strategy(field: FieldTag, cap: usize, unit: bool) -> impl Strategy<Value = PowerSeries> {
    let coeff = match field {
        FieldTag::Rationals => (-9i64..=9, 1i64..=5)
            .prop_map(|(p, q)| BigRational::new(p.into(), q.into()))
            .boxed(),
        FieldTag::GF2 => (0i64..=1).prop_map(|b| BigRational::from_integer(b.into())).boxed(),
    };
    proptest::collection::vec(coeff, cap + 1).prop_map(move |mut c| {
        if unit && c[0].is_zero() {
            c[0] = BigRational::from_integer(1.into());
        }
        PowerSeries::new(field, cap, c).unwrap()
    })
}

/// AC9: ring laws and divide round-trip on 1000 random inputs at cap 32.
fn series_algebra_laws() -> Verdict {
    let mut runner = TestRunner::new_with_rng(
        Config {
            cases: 1000,
            failure_persistence: None,
            ..Config::default()
        },
        proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha),
    );
    let strategy = prop_oneof![Just(FieldTag::Rationals), Just(FieldTag::GF2)].prop_flat_map(|field| {
        (
            series_strategy(field, 32, false),
            series_strategy(field, 32, false),
            series_strategy(field, 32, true),
        )
    });
    runner
        .run(&strategy, |(a, b, c)| {
            let ab_c = a.add(&b).unwrap().add(&c).unwrap();
            prop_assert_eq!(&ab_c, &a.add(&b.add(&c).unwrap()).unwrap());
            prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
            let m1 = a.mul(&b).unwrap().mul(&c).unwrap();
            prop_assert_eq!(&m1, &a.mul(&b.mul(&c).unwrap()).unwrap());
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
            let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            let prod = a.mul(&c).unwrap();
            prop_assert_eq!(prod.divide(&c).unwrap(), a);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok("1000 cases over Q and GF2".into())
}

/// AC10: `verify all` renders identical bytes serially, again, and in parallel.
fn determinism() -> Verdict {
    let scope = VerifyScope::all(3);
    let first = verify::run(&scope);
    ensure(first.all_pass(), || first.render())?;
    let second = verify::run(&scope).render();
    let parallel = verify::run(&VerifyScope {
        parallel: true,
        ..scope.clone()
    })
    .render();
    let first = first.render();
    ensure(first == second, || "serial runs differ".into())?;
    ensure(first == parallel, || "parallel run differs".into())?;
    Ok(format!("{} bytes, {} checks", first.len(), first.lines().count() - 2))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (
            "AC1 closed-form equivalence (matrix recursion, n<=8, cap 40)",
            closed_form_equivalence,
        ),
        ("AC2 Grassmannian halving identity (n<=10)", grassmannian_halving),
        ("AC3 empty-quotient vanishing (n<=5, cap 60)", empty_quotient_vanishing),
        ("AC4 rigid configuration (2,(1,1,1))", rigid_configuration),
        (
            "AC5 finite-field oracle agreement (2,(1^5)), p in {3,5,7,11}",
            oracle_agreement,
        ),
        ("AC6 real/complex halving (n=3, r<=5)", real_complex_halving),
        ("AC7 quotient structure (n<=3, r<=5)", structural_properties),
        (
            "AC8 stratum enumeration completeness (n<=3, r<=4)",
            enumeration_completeness,
        ),
        ("AC9 series algebra laws (1000 cases, cap 32)", series_algebra_laws),
        ("AC10 verify determinism (serial x2, parallel)", determinism),
    ];
    let mut failed = 0;
    for (name, criterion) in criteria {
        let start = Instant::now();
        let verdict = criterion();
        let ms = start.elapsed().as_millis();
        match verdict {
            Ok(detail) => println!("PASS  {name}: {detail} [{ms} ms]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail} [{ms} ms]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
