//! Exact variation-of-GIT computations for complete intersections of k
//! degree-d hypersurfaces in Pⁿ together with m hyperplanes, plus Segre
//! symbols of pencils of quadrics and a few closed-form invariants.

pub mod binary_form;
pub mod cache;
pub mod error;
pub mod families;
pub mod form_matrix;
pub mod formulas;
pub mod lp;
pub mod matching;
pub mod monomial;
pub mod poly;
pub mod rat;
pub mod report;
pub mod segre;
pub mod stability;
pub mod subgroup;
pub mod walls;

pub use error::{Error, Result};
pub use rat::Rat;
