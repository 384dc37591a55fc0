//! Propagation on a curved circle through charts.
//!
//! The flow: a metric field on S^1 determines a Laplace-Beltrami generator;
//! a chart atlas with a squared partition of unity splits it into localized
//! pieces whose pushforwards quantize on small periodic boxes; glued local
//! steps approximate the global semigroup, with pullback corrections keeping
//! the per-step defect at the order the calculus predicts.

mod atlas;
mod operator;

pub use atlas::{
    bump, circle_ten_chart, circle_two_chart, lift, plateau, Chart, ChartAtlas, CoarseAtlas,
    SmoothFn,
};
pub use operator::{
    build_laplace_beltrami, build_q, chart_symbol, CoeffFn, DiffCoeffs, GluedGenerator,
    MetricField,
};
