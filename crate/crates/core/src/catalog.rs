//! Closed-form Poincaré series of classifying spaces and Grassmannians.
//!
//! Every form here counts Betti numbers, so its arithmetic field is
//! [`FieldTag::Rationals`] even for spaces whose cohomology is taken with
//! `Z_2` coefficients; [`CatalogEntry::cohomology`] records the latter.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{OnceLock, RwLock};

use thiserror::Error;

use crate::series::{CyclotomicProductForm, FieldTag, Polynomial};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("Grassmannian index k = {k} out of range 0..={n}")]
    KOutOfRange { n: usize, k: usize },
    #[error("cannot parse space id {0:?}; expected e.g. BU(3), BO(2), BSO(3), BT(2), BE2(2), GrassC(4,2), GrassR(4,2), Point")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceId {
    BU(usize),
    BO(usize),
    BSO(usize),
    BT(usize),
    BE2(usize),
    GrassC { n: usize, k: usize },
    GrassR { n: usize, k: usize },
    Point,
}

impl fmt::Display for SpaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceId::BU(n) => write!(f, "BU({n})"),
            SpaceId::BO(n) => write!(f, "BO({n})"),
            SpaceId::BSO(n) => write!(f, "BSO({n})"),
            SpaceId::BT(n) => write!(f, "BT({n})"),
            SpaceId::BE2(n) => write!(f, "BE2({n})"),
            SpaceId::GrassC { n, k } => write!(f, "GrassC({n},{k})"),
            SpaceId::GrassR { n, k } => write!(f, "GrassR({n},{k})"),
            SpaceId::Point => f.write_str("Point"),
        }
    }
}

impl FromStr for SpaceId {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || CatalogError::Parse(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.eq_ignore_ascii_case("point") {
            return Ok(SpaceId::Point);
        }
        let (name, rest) = compact.split_once('(').ok_or_else(err)?;
        let args = rest.strip_suffix(')').ok_or_else(err)?;
        let args: Vec<usize> = args
            .split(',')
            .map(|a| a.parse().map_err(|_| err()))
            .collect::<Result<_, _>>()?;
        let id = match (name.to_ascii_uppercase().as_str(), args.as_slice()) {
            ("BU", &[n]) => SpaceId::BU(n),
            ("BO", &[n]) => SpaceId::BO(n),
            ("BSO", &[n]) => SpaceId::BSO(n),
            ("BT", &[n]) => SpaceId::BT(n),
            ("BE2", &[n]) => SpaceId::BE2(n),
            ("GRASSC", &[n, k]) => SpaceId::GrassC { n, k },
            ("GRASSR", &[n, k]) => SpaceId::GrassR { n, k },
            _ => return Err(err()),
        };
        Ok(id)
    }
}

/// A catalog space together with the coefficient field of its cohomology.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub space: SpaceId,
    pub cohomology: FieldTag,
    pub form: CyclotomicProductForm,
}

pub fn entry(space: SpaceId) -> Result<CatalogEntry, CatalogError> {
    let (cohomology, form) = match space {
        SpaceId::BU(n) => (FieldTag::Rationals, poincare_bu(n)),
        SpaceId::BO(n) => (FieldTag::GF2, poincare_bo_mod2(n)),
        SpaceId::BSO(n) => (FieldTag::GF2, poincare_bso_mod2(n)),
        SpaceId::BT(n) => (FieldTag::Rationals, poincare_bt(n)),
        SpaceId::BE2(n) => (FieldTag::GF2, poincare_be2(n)),
        SpaceId::GrassC { n, k } => (FieldTag::Rationals, CyclotomicProductForm::new(grass_c(n, k)?, vec![])),
        SpaceId::GrassR { n, k } => (FieldTag::GF2, CyclotomicProductForm::new(grass_r_mod2(n, k)?, vec![])),
        SpaceId::Point => (
            FieldTag::Rationals,
            CyclotomicProductForm::inverse_product(FieldTag::Rationals, vec![]),
        ),
    };
    Ok(CatalogEntry {
        space,
        cohomology,
        form,
    })
}

/// `prod_{p=1}^{n} 1/(1 - t^{2p})`; `n = 0` gives 1.
pub fn poincare_bu(n: usize) -> CyclotomicProductForm {
    CyclotomicProductForm::inverse_product(FieldTag::Rationals, (1..=n).map(|p| 2 * p).collect())
}

/// Mod-2 Betti numbers of `BO(n)`: `prod_{p=1}^{n} 1/(1 - t^p)`.
pub fn poincare_bo_mod2(n: usize) -> CyclotomicProductForm {
    CyclotomicProductForm::inverse_product(FieldTag::Rationals, (1..=n).collect())
}

/// Mod-2 Betti numbers of `BSO(n)`: factors `2..=n` (Stiefel-Whitney classes
/// `w_2, ..., w_n`). Not used by any recursion.
pub fn poincare_bso_mod2(n: usize) -> CyclotomicProductForm {
    CyclotomicProductForm::inverse_product(FieldTag::Rationals, (2..=n).collect())
}

/// Rank-`n` torus: `n` degree-2 generators.
pub fn poincare_bt(n: usize) -> CyclotomicProductForm {
    CyclotomicProductForm::inverse_product(FieldTag::Rationals, vec![2; n])
}

/// Elementary abelian 2-group of rank `n`: `n` degree-1 generators mod 2.
pub fn poincare_be2(n: usize) -> CyclotomicProductForm {
    CyclotomicProductForm::inverse_product(FieldTag::Rationals, vec![1; n])
}

type GaussianKey = (usize, usize, usize);

fn gaussian_cache() -> &'static RwLock<HashMap<GaussianKey, Polynomial>> {
    static CACHE: OnceLock<RwLock<HashMap<GaussianKey, Polynomial>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Gaussian binomial `prod_{p=n-k+1}^{n} (1 - t^{step p}) / prod_{p=1}^{k} (1 - t^{step p})`.
fn gaussian_binomial(n: usize, k: usize, step: usize) -> Result<Polynomial, CatalogError> {
    if k > n {
        return Err(CatalogError::KOutOfRange { n, k });
    }
    let key = (n, k, step);
    if let Some(p) = gaussian_cache().read().unwrap().get(&key) {
        return Ok(p.clone());
    }
    let degree = step * k * (n - k);
    let numerator = ((n - k + 1)..=n).fold(Polynomial::one(FieldTag::Rationals), |acc, p| {
        let mut factor = vec![0i64; step * p + 1];
        factor[0] = 1;
        factor[step * p] = -1;
        acc.mul(&Polynomial::from_ints(FieldTag::Rationals, &factor))
            .expect("same field")
    });
    let form = CyclotomicProductForm::new(numerator, (1..=k).map(|p| step * p).collect());
    let poly = form
        .expand(degree)
        .to_polynomial(Some(degree))
        .expect("truncated at its own degree");
    gaussian_cache().write().unwrap().insert(key, poly.clone());
    Ok(poly)
}

/// Poincaré polynomial of the complex Grassmannian `Gr_k(C^n)`, degree `2k(n-k)`.
pub fn grass_c(n: usize, k: usize) -> Result<Polynomial, CatalogError> {
    gaussian_binomial(n, k, 2)
}

/// Mod-2 Poincaré polynomial of the real Grassmannian `Gr_k(R^n)`, degree `k(n-k)`.
pub fn grass_r_mod2(n: usize, k: usize) -> Result<Polynomial, CatalogError> {
    gaussian_binomial(n, k, 1)
}
