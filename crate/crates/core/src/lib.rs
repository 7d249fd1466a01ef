//! Computational toolkit for symplectic semifield spreads of `PG(5, q)`:
//! finite field towers, projective subspaces, the quadric Veronese surface
//! and its secant variety, `F_q`-linear sets of `PG(5, q^2)`, spread sets, and
//! the exhaustive censuses built on them.

pub mod field;
pub mod linalg;
pub mod proj;
pub mod veronese;
pub mod linset;
pub mod spread;
pub mod census;

pub use census::{CensusError, CensusReport};
pub use field::{Elem, Field, FieldError, Tower};
pub use linalg::{LinalgError, Matrix};
pub use linset::{LinearSetSpec, LinsetContext, LinsetError};
pub use proj::{ProjError, ProjPoint, Subspace};
pub use spread::{SpreadError, SpreadSet};
pub use veronese::{GeomContext, GeomError, ProfileTag, SymPoint};

use thiserror::Error;

/// Any error raised by this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Proj(#[from] ProjError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Linset(#[from] LinsetError),
    #[error(transparent)]
    Spread(#[from] SpreadError),
    #[error(transparent)]
    Census(#[from] CensusError),
}
