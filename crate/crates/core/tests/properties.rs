use num_rational::BigRational;
use proptest::prelude::*;

use quotbetti::series::{coeff_string, parse_coeff};
use quotbetti::strata::{self, morse_half_index, signed_codim_complex};
use quotbetti::{catalog, CyclotomicProductForm, Engine, FieldTag, Polynomial, PowerSeries, SystemSpec};

const Q: FieldTag = FieldTag::Rationals;

fn field() -> impl Strategy<Value = FieldTag> {
    prop_oneof![Just(FieldTag::Rationals), Just(FieldTag::GF2)]
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-20i64..=20, 1i64..=12).prop_map(|(p, q)| BigRational::new(p.into(), q.into()))
}

fn series(field: FieldTag, cap: usize) -> impl Strategy<Value = PowerSeries> {
    let coeff = match field {
        FieldTag::Rationals => rational().boxed(),
        FieldTag::GF2 => (0i64..=1).prop_map(|b| BigRational::from_integer(b.into())).boxed(),
    };
    proptest::collection::vec(coeff, cap + 1).prop_map(move |c| PowerSeries::new(field, cap, c).unwrap())
}

/// Two series over the same random field and cap.
fn series_pair(max_cap: usize) -> impl Strategy<Value = (PowerSeries, PowerSeries)> {
    (field(), 0..=max_cap).prop_flat_map(|(f, cap)| (series(f, cap), series(f, cap)))
}

/// Blocks, half-index and codimension of one stratum index.
type Profile = (Vec<(usize, usize)>, usize, i64);

fn weights(n: usize, max_len: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::vec(0..=n, 1..=max_len)
}

proptest! {
    #[test]
    fn expansion_is_consistent_under_truncation(
        factors in proptest::collection::vec(1usize..6, 0..5),
        small in 0usize..20,
        extra in 0usize..20,
    ) {
        let form = CyclotomicProductForm::inverse_product(Q, factors);
        let long = form.expand(small + extra).truncate(small);
        let short = form.expand(small);
        prop_assert_eq!(long.coeffs(), short.coeffs());
    }

    #[test]
    fn halving_undoes_doubling((a, _) in series_pair(24)) {
        let doubled = a.substitute_t_power(2).unwrap();
        prop_assert_eq!(doubled.cap(), a.cap());
        let halved = doubled.halve_exponents().unwrap();
        let expected = a.truncate(a.cap() / 2);
        prop_assert_eq!(halved.coeffs(), expected.coeffs());
    }

    #[test]
    fn coefficients_are_in_lowest_terms(a in series(Q, 10), b in series(Q, 10)) {
        let product = a.mul(&b).unwrap();
        for c in product.coeffs() {
            prop_assert_eq!(num_integer::gcd(c.numer().clone(), c.denom().clone()), 1.into());
            prop_assert!(c.denom() > &0.into());
            let reparsed = parse_coeff(&coeff_string(c));
            prop_assert_eq!(reparsed.as_ref(), Some(c));
        }
    }

    #[test]
    fn division_inverts_multiplication((a, b) in series_pair(16)) {
        let mut unit = b.coeffs().to_vec();
        unit[0] = BigRational::from_integer(1.into());
        let unit = PowerSeries::new(b.field(), b.cap(), unit).unwrap();
        prop_assert_eq!(a.mul(&unit).unwrap().divide(&unit).unwrap(), a);
    }

    #[test]
    fn gf2_characteristic_two(a in (0usize..16).prop_flat_map(|cap| series(FieldTag::GF2, cap))) {
        let doubled = a.add(&a).unwrap();
        prop_assert!(doubled.is_zero());
    }

    #[test]
    fn grassmannian_duality_and_euler_characteristic(n in 0usize..12, k in 0usize..12) {
        prop_assume!(k <= n);
        let g = catalog::grass_c(n, k).unwrap();
        prop_assert_eq!(&g, &catalog::grass_c(n, n - k).unwrap());
        let one = BigRational::from_integer(1.into());
        let binomial = (0..k).fold(BigRational::from_integer(1.into()), |acc, i| {
            acc * BigRational::from_integer((n - i).into()) / BigRational::from_integer((i + 1).into())
        });
        prop_assert_eq!(g.eval(&one), binomial);
        prop_assert_eq!(catalog::grass_r_mod2(n, k).unwrap().substitute_t_power(2).unwrap(), g);
    }

    #[test]
    fn strata_are_permutation_invariant(n in 1usize..=3, w in weights(3, 4), rot in 0usize..4) {
        let w: Vec<usize> = w.into_iter().map(|x| x.min(n)).collect();
        let mut rotated = w.clone();
        rotated.rotate_left(rot % w.len());
        let profile = |w: &[usize]| {
            let spec = SystemSpec::complex(n, w.to_vec()).unwrap();
            let mut p: Vec<Profile> = strata::enumerate_indices(&spec)
                .iter()
                .map(|i| (i.blocks.iter().map(|b| (b.k, b.m)).collect(), morse_half_index(i), signed_codim_complex(i, n)))
                .collect();
            p.sort();
            p
        };
        prop_assert_eq!(profile(&w), profile(&rotated));
    }

    #[test]
    fn equivariant_series_is_permutation_invariant(n in 1usize..=3, w in weights(3, 4), rot in 0usize..4) {
        let w: Vec<usize> = w.into_iter().map(|x| x.min(n)).collect();
        let mut rotated = w.clone();
        rotated.rotate_left(rot % w.len());
        let a = Engine::new().equivariant_series_complex(n, &w, 24).unwrap();
        let b = Engine::new().equivariant_series_complex(n, &rotated, 24).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn polynomial_series_round_trip(coeffs in proptest::collection::vec(-5i64..=5, 0..12), slack in 0usize..6) {
        let p = Polynomial::from_ints(Q, &coeffs);
        let cap = p.degree().unwrap_or(0) + slack;
        prop_assert_eq!(p.series(cap).to_polynomial(Some(cap)).unwrap(), p.clone());
        if !p.is_zero() {
            prop_assert!(p.series(cap).to_polynomial(None).is_err());
        }
    }
}
