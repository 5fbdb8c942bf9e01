//! Reproducible experiments on fractal and convergence examples, with JSON/CSV reports.

mod cantor;
mod experiments;
mod koch;
mod pixel;
mod report;

pub use cantor::{build_cantor, Cantor, MAX_CANTOR_DEPTH};
pub use experiments::{
    evaluate, quantize_forms, random_dyadic_chain, run_experiment, EXPERIMENTS, PIXEL_RESOLUTION,
    WHITNEY_KOCH_POLYGON_DEPTH,
};
pub use koch::{
    build_koch, koch_bump_mass, koch_bumps, koch_cauchy_bound, koch_region, koch_vertices, Koch, MAX_KOCH_DEPTH,
    SNOWFLAKE_AREA,
};
pub use pixel::pixel_area;
pub use report::{Check, ExperimentReport, Num, Params, Table, Verdict};
