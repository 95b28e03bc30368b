//! Numerical laboratory for harmonic function spaces on the upper
//! half-space and the unit ball: kernels, Whitney decompositions,
//! weighted quadrature, norms, integral operators, Carleson-measure
//! diagnostics and spherical-harmonic multiplier machinery.

pub mod ball;
pub mod carleson;
pub mod error;
pub mod halfspace;
pub mod kernels;
pub mod operators;
pub mod poly;
pub mod quad;
pub mod spaces;
pub mod special;
pub mod testfns;

pub use ball::{CoeffTable, FunctionalResult, MultiplierSeq, SphericalBasis};
pub use carleson::{CarlesonEstimate, CarlesonParams, DiscreteMeasure};
pub use error::{Error, Result};
pub use halfspace::{
    cells_covering, enlarged_cell, in_truncated_halfspace, weighted_box_measure,
    whitney_cell_containing, AxisBox, Cube, HPoint, WeightSpec, WhitneyCell,
};
pub use kernels::{BallKernelParams, HalfspaceKernelParams, KernelValue};
pub use operators::{OpResult, VecExponents};
pub use quad::{
    integrate_ball, integrate_halfspace, integrate_product_halfspace, integrate_sphere,
    HalfspaceQuadSpec, QuadResult, SphereQuadSpec,
};
pub use spaces::MixedNormParams;
pub use testfns::{parse_testfn, Domain, GradMode, GradientRequest, TestFunction};
