//! Regression with responses on the sphere `S^k`: geodesic and Fréchet
//! estimators, the contracted-uniform noise model, and a Monte-Carlo
//! evaluation harness.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimators;
pub mod eval;
pub mod metric;
pub mod optimize;
pub mod sampling;
pub mod sphere;
pub mod weights;

pub use error::{Error, Result};
pub use estimators::{fit, predict_at, CurveEstimate, FitConfig, Hyper, LinCosModel, Method, TriGeoModel};
pub use eval::{
    ise, loocv_select, rate_check, run_mise, CurveSpec, ExperimentConfig, HyperPolicy, MiseResult, RateCheckConfig,
    RateResult,
};
pub use metric::{Point, SpaceKind};
pub use optimize::OptOptions;
pub use sampling::{CntrUnifParams, CurveModel, Dataset};
pub use sphere::{AnglePair, SpherePoint, TangentPair};
pub use weights::{KernelKind, KernelSpec, LocalPolyConfig};
