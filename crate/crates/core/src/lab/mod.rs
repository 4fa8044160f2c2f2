pub mod boxcount;
pub mod covering;
pub mod disintegration;
pub mod energy1d;
pub mod energy2d;
pub mod formula;
pub mod measure;
pub mod quadrature;
pub mod uniformity;

pub use boxcount::{boxcount_estimate, BoxCountResult, DeltaGrid, LayerBoxes};
pub use covering::{covering_upper_counts, CoveringTerms};
pub use disintegration::{disintegration_bound, DisintegrationReport, Fibration, PointCheck};
pub use energy1d::{pair_integral, riesz_energy_1d, ArcMeasure, SliceEnergy};
pub use energy2d::{parallelogram_self_energy, riesz_energy_2d, EnergyResult, Sampler};
pub use formula::{dim_formula, Branch, DimFormula};
pub use measure::{kernel, torus_dist, OddMeasure, HALF_DIAMETER};
pub use uniformity::{measure_uniformity, BallRatio, BallSpec, MeasureCheck};
