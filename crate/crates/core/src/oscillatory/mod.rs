//! Discretized oscillatory integral operators and their operator norms.

pub mod experiments;
pub mod grid;
pub mod kernel;
pub mod operator;
pub mod partition;
pub mod power;

pub use experiments::{
    almost_orthogonality, companion_points, decay_fit, dyadic_norm, kernel_envelope, measure_dyadic_series,
    measure_euclidean_decay, measure_generic_decay, measure_point, DecayPoint, DecaySeries, DyadicGeometry,
    DyadicReport, EnvelopeReport, ExperimentSettings, GenericGeometry, OrthogonalityReport,
};
pub use grid::{BoxSpec, GridSpec};
pub use kernel::{check_resolution, Amplitude, OscKernelSpec, OscMode, RadialProfile, Resolution, TwoPointPhase};
pub use operator::{discretize, AdjointProduct, ConvolutionOperator, DenseOperator, LinearOperator, MatrixFreeOperator};
pub use partition::{dyadic_weight, theta_partition};
pub use power::{operator_norm, power_norm, NormEstimate};
