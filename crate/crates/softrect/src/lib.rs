//! Exact solvers for splitting a rectangular region into soft rectangles
//! of prescribed areas using two-stage guillotine cuts: horizontal cuts
//! form full-width layers, vertical cuts split each layer.
//!
//! Three objectives are supported: total perimeter (solved exactly in
//! `O(n log n)` through a concave least-weight subsequence reduction),
//! largest perimeter, and largest aspect ratio (both NP-hard, solved by
//! branch-and-bound and a bisection over feasibility decisions). The
//! crate also builds the corresponding mixed-integer models and emits
//! LP files for external solvers, generates benchmark instances,
//! constructs hardness-reduction instances, and renders layouts as SVG.

pub mod clws;
pub mod domain;
pub mod error;
pub mod exact;
pub mod instances;
pub mod mip;
pub mod report;
pub mod scalar;

pub use domain::{
    evaluate, realize, swap_delta, Instance, Layout, ObjectiveKind, ObjectiveValue, Partition,
};
pub use error::{Error, Result};
pub use scalar::{Int, Rational};
