//! Schottky groups, truncated Selberg zeta functions and Sunada covers.
//!
//! The pieces fit together as follows. [`schottky`] builds a free group of
//! Möbius maps from circle pairings and enumerates its primitive conjugacy
//! classes. [`groups`] supplies `PSL(3, p)`, subgroups, Gassmann checks and
//! homomorphisms from free groups. [`zeta::cover`] lifts length spectra to
//! the covers attached to subgroups, and [`zeta`] evaluates the truncated
//! zeta product and locates its zeros by the argument principle.
//! [`transplant`] builds integer intertwiners between coset modules and
//! [`homology`] checks curve systems on surfaces.
//!
//! ```
//! use isoscatter_core::groups::{build_psl3, sunada_check};
//!
//! let g = build_psl3(2).unwrap();
//! let k1 = g.stabilizer_of_point([1, 0, 0]).unwrap();
//! let k2 = g.stabilizer_of_hyperplane([1, 0, 0]).unwrap();
//! let triple = sunada_check(&k1, &k2).unwrap();
//! assert!(triple.sunada_ok && !triple.conj_in_g);
//! ```

pub mod groups;
pub mod homology;
pub mod intmat;
pub mod io;
pub mod moebius;
pub mod schottky;
pub mod transplant;
pub mod zeta;

pub use groups::{FiniteGroup, GroupError, SubgroupHandle};
pub use homology::{HomologyClass, HomologyError};
pub use intmat::IntMatrix;
pub use io::ConfigError;
pub use moebius::{ComplexLength, MoebiusMap};
pub use schottky::{ReducedWord, SchottkyData, SchottkyError};
pub use transplant::TransplantError;
pub use zeta::{Rect, SpectrumEntry, ZetaError, ZetaTruncation};
