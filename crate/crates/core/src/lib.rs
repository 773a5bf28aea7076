//! Exact computations with free commutative differential graded algebras over Q:
//! homotopies through the interval algebra, obstruction classes for elementary
//! extensions, representative spaces, and integral counting of mapping classes.

pub mod algebra;
pub mod error;
pub mod growth;
pub mod homotopy;
pub mod interval;
pub mod linalg;
pub mod map;
pub mod obstruction;
pub mod polyhedral;
pub mod quant;
pub mod rational;
pub mod repro;
pub mod smith;
pub mod wspace;
pub mod zoo;

pub use algebra::{check_cdga, Element, FreeCDGA, Generator, Monomial};
pub use error::{Error, Result};
pub use homotopy::{boxplus, iota_k, is_homotopy, restrict, ClassElement, Homotopy};
pub use interval::{Interval, IntervalElement};
pub use linalg::{cohomology, relative_cohomology, solve_d, CohomologySpace, QMatrix};
pub use map::{weight_scaling, DGAMap};
pub use obstruction::{
    extend_with_primitive, homotopy_between, obstruction, solve_primitive, Between, ElementaryExtension, ObstructionClass,
    ObstructionProblem,
};
pub use rational::Q;
pub use wspace::{construct_w, homotope_into_w, RepresentativeSpace};
