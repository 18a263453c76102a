//! Numerical tolerances used across the crate.
//!
//! All thresholds are collected here so that contract checks, tests, and
//! documentation agree on a single value.

/// Hermiticity tolerance for operators constructed with the `Hermitian` kind.
pub const HERMITIAN: f64 = 1e-12;

/// Hermiticity tolerance accepted by the eigensolver and by operations that
/// take a generic Hermitian argument.
pub const HERMITIAN_LOOSE: f64 = 1e-9;

/// Unitarity tolerance: max |U†U - 1|.
pub const UNITARY: f64 = 1e-10;

/// Projector tolerance: max |P² - P| and max |P - P†|.
pub const PROJECTOR: f64 = 1e-10;

/// Density-operator tolerances: |Tr ρ - 1| and the eigenvalue floor.
pub const DENSITY_TRACE: f64 = 1e-10;
pub const DENSITY_EIGENVALUE_FLOOR: f64 = -1e-10;

/// State-vector normalization tolerance.
pub const STATE_NORM: f64 = 1e-10;

/// Relative eigenvalue-gap threshold for degeneracy grouping:
/// |λᵢ - λⱼ| ≤ `DEGENERACY_REL` · max(1, ‖H‖).
pub const DEGENERACY_REL: f64 = 1e-9;

/// Residual bound for the eigensolver: ‖Hv - λv‖ ≤ `EIG_RESIDUAL_REL` · max(1, ‖H‖).
pub const EIG_RESIDUAL_REL: f64 = 1e-9;

/// Floor below which a postselection probability is treated as vanishing.
pub const P_PS_FLOOR: f64 = 1e-12;

/// Floor on λⱼ + λₖ in the symmetric-logarithmic-derivative kernel.
pub const SLD_KERNEL_FLOOR: f64 = 1e-12;

/// Floor on outcome probabilities in the classical Fisher information sum.
pub const PROB_FLOOR: f64 = 1e-12;

/// Probability-derivative threshold above which a vanishing outcome means
/// divergent information.
pub const PROB_DERIVATIVE_FLOOR: f64 = 1e-9;

/// Floor on |<f|a>| below which the quasiprobability expansion of ρ is singular.
pub const OVERLAP_FLOOR: f64 = 1e-12;

/// Classicality thresholds for quasiprobability distributions: entries are
/// classical when min Re q ≥ -`CLASSICALITY` and max |Im q| ≤ `CLASSICALITY`.
pub const CLASSICALITY: f64 = 1e-10;

/// Floor for closed-form denominators before a value is reported divergent.
pub const DIVERGENCE_DENOMINATOR: f64 = 1e-14;

/// Fisher values in [-`FISHER_CLAMP`, 0) are clamped to 0; below that they
/// are a numerical failure.
pub const FISHER_CLAMP: f64 = 1e-9;

/// Variance values in [-`VARIANCE_CLAMP`, 0) are clamped to 0.
pub const VARIANCE_CLAMP: f64 = 1e-12;

/// Spectral range at or below this is a totally degenerate generator.
pub const DEGENERATE_RANGE: f64 = 1e-12;

/// Commutation threshold: ‖AF - FA‖max ≤ `COMMUTE_REL` · max(1, ‖A‖max·‖F‖max).
pub const COMMUTE_REL: f64 = 1e-9;

/// Default finite-difference step scale: h = `FD_STEP_SCALE` · max(1, |θ|).
pub const FD_STEP_SCALE: f64 = 1e-5;

/// Basis-rotation angle used when perturbing a basis away from singular overlaps.
pub const PERTURBATION_ANGLE: f64 = 1e-7;
