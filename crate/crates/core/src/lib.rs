//! Exact equivariant Poincaré series for products of Grassmannians under the
//! diagonal unitary action, and for their real loci under the orthogonal
//! action with `Z_2` coefficients.
//!
//! - [`series`]: truncated power series and cyclotomic product forms.
//! - [`catalog`]: closed forms for classifying spaces and Grassmannians.
//! - [`strata`]: stratification indices, Morse indices and codimensions.
//! - [`engine`]: the memoized recursions and quotient extraction.
//! - [`oracle`]: finite-field point counts for rank-2 configurations.
//! - [`verify`]: batch suites that cross-check all of the above.

pub mod catalog;
pub mod engine;
pub mod oracle;
pub mod series;
pub mod strata;
pub mod verify;

pub use catalog::{grass_c, grass_r_mod2, CatalogEntry, SpaceId};
pub use engine::{Engine, EngineError, QuotientReport};
pub use series::{CyclotomicProductForm, FieldTag, Polynomial, PowerSeries, SeriesError};
pub use strata::{Flavor, StratumData, StratumIndex, SystemSpec};
