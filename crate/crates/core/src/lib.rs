//! Locates, classifies, and continues the maximizers of the planar
//! energy-supply functional f = sum_i d_i^(-m) as the plane separation h
//! varies: closed-form derivatives, Newton solving with Hessian
//! classification, a provable uniqueness-height bound, pseudo-arclength
//! continuation with symmetry-breaking bifurcation detection under
//! dihedral equivariance, and the optical wireless power transfer model
//! the functional describes.

pub mod continuation;
pub mod critical;
pub mod eig;
pub mod error;
pub mod functional;
pub mod owpt;
pub mod symmetry;

pub use continuation::{
    continue_branch, locate_bifurcation, switch_branches, tangent, BifurcationEvent, Branch,
    BranchPoint, ContinuationOptions, EventKind, Termination,
};
pub use critical::{
    bounding_rectangle, classify, evaluate_critical, exterior_sign, find_critical_points,
    newton_solve, uniqueness_bound, CriticalKind, CriticalPoint, ExteriorCase, NewtonOptions,
    Rectangle, SeedGrid,
};
pub use eig::SymMat2;
pub use error::{ConfigError, ContinuationError, SolveError, SymmetryError};
pub use functional::{lambertian_exponent, Configuration, Derivatives, State, ThirdTensor};
pub use owpt::{
    h_sweep, los_gain, power_map, total_power, HSweep, OwptParams, PowerMap,
};
pub use symmetry::{
    circle_critical_height, cross_derivative_at_center, dn_elements, equivariance_residual,
    fixed_lines, restricted_continue, z2z2_elements, EquivarianceReport, FixedLine, GroupElement,
    LineBranch, RestrictedOptions,
};
