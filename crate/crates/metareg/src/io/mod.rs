//! File formats: study/design/prior CSVs, fit JSON, and SVG plots.

pub mod csv;
pub mod json;
pub mod svg;

pub use csv::{
    read_design_csv, read_study_csv, read_tabulated_csv, write_escalc_csv, Measure, StudyTable,
};
pub use json::{load_fit_json, write_fit_json, FitJson, LoadedFit};
pub use svg::{render_forest_svg, render_trend_svg, ForestSpec, TrendEntry, TrendSpec};
