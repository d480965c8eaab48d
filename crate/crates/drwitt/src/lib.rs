pub mod error;
pub mod derham;
pub mod dieudonne;
pub mod synlog;
pub mod exactcore;
pub mod filtspec;
pub mod kpredict;
pub mod polyparse;
pub mod witt;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/witt.md")]
    mod witt {}
    #[doc = include_str!("../../../book/src/derham.md")]
    mod derham {}
    #[doc = include_str!("../../../book/src/drw.md")]
    mod drw {}
    #[doc = include_str!("../../../book/src/syntomic.md")]
    mod syntomic {}
    #[doc = include_str!("../../../book/src/spectral.md")]
    mod spectral {}
    #[doc = include_str!("../../../book/src/ktheory.md")]
    mod ktheory {}
}
