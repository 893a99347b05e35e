//! Paperfolding (dragon) polygons for arbitrary unfolding angles.
//!
//! The crate builds the polygons `Q_n`, models the logarithmic-spiral hull
//! that contains all of them, evaluates the numeric conditions behind the
//! non-intersection thresholds, and detects self-contacts of finite
//! polygons.

// `!(a < b)` is used deliberately so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod error;
pub mod hull;
pub mod intersect;
pub mod params;
pub mod polygon;
pub mod sequence;

pub use checks::{condition_catalog, evaluate_condition, find_threshold, Condition, ThresholdResult, VerificationReport};
pub use error::{DragonError, Result};
pub use hull::{build_hull, membership, HullModel, MembershipResult, Region, Spiral};
pub use intersect::{find_contacts, ContactEvent, ContactKind, CrossingReport};
pub use params::{params_from_alpha, params_from_q, AngleParams};
pub use polygon::{generate_inflation, generate_recursive, FoldPolygon, Point, Similarity};
pub use sequence::FoldSymbol;
