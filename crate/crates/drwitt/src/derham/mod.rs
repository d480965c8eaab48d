//! Kähler differentials, de Rham cohomology and inverse Cartier maps for
//! graded `F_q`-algebras.

mod cartier;
mod complex;
pub mod forms;
mod spec;

pub use cartier::{
    base_change_check, cartier_blocks, cartier_smooth_check, cohomology_by_weight, derham_cohomology,
    inverse_cartier, kaehler, relative_cartier_check, BaseChangeReport, CartierBlock, CartierReport, IsoEntry,
    RelativeReport, Verdict, Witness,
};
pub(crate) use complex::multidegrees;
pub use complex::{build_complex, DeRhamComplex, Piece, PieceKey, PERFECTION_DEPTH};
pub use spec::{parse_ringspec, Kind, RelTerm, RingSpec};
