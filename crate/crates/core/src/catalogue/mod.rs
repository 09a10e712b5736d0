//! Charts of parametrized projective varieties and the example catalogue.

mod chart;
mod constructors;
mod registry;

pub use chart::{
    Chart, ChartMap, ExpectedInvariants, ExprMap, RuledChart, Ruling, MIN_VALUE_NORM,
    RICHARDSON_STEP,
};
pub use constructors::{
    make_cone, make_cone_over_segre, make_cone_with_new_vertex, make_curve_chart, make_join,
    make_segre, make_symmetroid, make_torse, make_veronese, span_dimension, CurveKind,
};
pub use registry::{catalogue, resolve, resolve_raw, TableEntry, CATALOGUE, TABLE};
