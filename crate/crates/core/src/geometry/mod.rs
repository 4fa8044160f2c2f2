//! Recurrence layers: ellipse discs and inscribed parallelograms centred at
//! periodic points, membership, separation and vertical slices.

pub mod area;
pub mod config;
pub mod layer;
pub mod membership;
pub mod separation;
pub mod slice;

pub use area::{layer_area, LayerArea};
pub use config::{RateRule, RecurrenceConfig};
pub use layer::{build_layer, radii, Axes, EllipseDisc, Layer, LayerGeometry, LayerKind, Radii};
pub use membership::membership;
pub use separation::{pairwise_separation, Separation};
pub use slice::{line_slice, segment_count, SliceFamily, Slicer};
