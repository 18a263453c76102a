//! Classical and quantum Fisher information.
//!
//! Three independent routes to the quantum Fisher information are provided:
//! the generator form 4·Var(A), the tangent form 4⟨ψ̇|ψ̇⟩ - 4|⟨ψ̇|ψ⟩|², and the
//! symmetric-logarithmic-derivative form Tr(ρΛ²). They agree on pure-state
//! families and serve as cross-oracles for one another in the test suites.

use std::fmt;

use crate::error::{Error, Result};
use crate::qcore::{eig_hermitian, C64, Operator, StateVector};
use crate::tol;

/// Which formula produced a Fisher value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FisherMethod {
    ClosedForm,
    Sld,
    PureState,
    FiniteDifference,
    Quasiprobability,
}

impl fmt::Display for FisherMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            FisherMethod::ClosedForm => "closed_form",
            FisherMethod::Sld => "sld",
            FisherMethod::PureState => "pure_state",
            FisherMethod::FiniteDifference => "finite_difference",
            FisherMethod::Quasiprobability => "quasiprobability",
        };
        f.write_str(name)
    }
}

/// A Fisher value with provenance.
#[derive(Debug, Clone)]
pub struct FisherReport {
    pub value: f64,
    pub method: FisherMethod,
    pub step: Option<f64>,
    pub sld_operator: Option<Operator>,
}

impl FisherReport {
    /// Clamps values in [-1e-9, 0) to zero; anything lower is a numerical
    /// failure rather than an information value.
    pub(crate) fn clamped(value: f64, method: FisherMethod, step: Option<f64>) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::NonFinite {
                context: "fisher information".into(),
            });
        }
        if value < -tol::FISHER_CLAMP {
            return Err(Error::Numerical(format!(
                "fisher value {value:.3e} below the clamping floor"
            )));
        }
        Ok(FisherReport {
            value: value.max(0.0),
            method,
            step,
            sld_operator: None,
        })
    }
}

/// A classical outcome model: θ ↦ (p₁(θ), …, p_n(θ)).
///
/// The probability callable must be reentrant; models are queried at several
/// stencil points per Fisher evaluation.
pub struct ClassicalModel {
    outcome_count: usize,
    prob: Box<dyn Fn(f64) -> Vec<f64> + Send + Sync>,
}

impl ClassicalModel {
    pub fn new<F>(outcome_count: usize, prob: F) -> Self
    where
        F: Fn(f64) -> Vec<f64> + Send + Sync + 'static,
    {
        ClassicalModel {
            outcome_count,
            prob: Box::new(prob),
        }
    }

    /// Born-rule model: measure e^{-iAθ}|ψ₀⟩ in a complete orthonormal basis.
    pub fn born_rule(
        psi0: &StateVector,
        a: &Operator,
        basis: &[StateVector],
    ) -> Result<ClassicalModel> {
        let dim = psi0.dim();
        if a.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: a.dim(),
                right: dim,
            });
        }
        if basis.len() != dim {
            return Err(Error::InvalidConfig(format!(
                "measurement basis has {} states for dimension {dim}",
                basis.len()
            )));
        }
        for (i, b) in basis.iter().enumerate() {
            if b.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: b.dim(),
                    right: dim,
                });
            }
            for (j, other) in basis.iter().enumerate() {
                let overlap = b.inner(other).norm();
                let expected = if i == j { 1.0 } else { 0.0 };
                if (overlap - expected).abs() > tol::STATE_NORM {
                    return Err(Error::InvalidConfig(
                        "measurement basis is not orthonormal".into(),
                    ));
                }
            }
        }
        let sys = eig_hermitian(a)?;
        // p_i(θ) = |Σ_j ⟨b_i|a_j⟩ e^{-i a_j θ} ⟨a_j|ψ₀⟩|²
        let coeffs: Vec<C64> = (0..dim).map(|j| sys.eigenvector(j).inner(psi0)).collect();
        let overlaps: Vec<Vec<C64>> = basis
            .iter()
            .map(|b| (0..dim).map(|j| b.inner(&sys.eigenvector(j))).collect())
            .collect();
        let values = sys.values().to_vec();
        Ok(ClassicalModel::new(dim, move |theta| {
            overlaps
                .iter()
                .map(|row| {
                    let mut amp = C64::new(0.0, 0.0);
                    for j in 0..dim {
                        amp += row[j] * C64::from_polar(1.0, -values[j] * theta) * coeffs[j];
                    }
                    amp.norm_sqr()
                })
                .collect()
        }))
    }

    pub fn outcome_count(&self) -> usize {
        self.outcome_count
    }

    /// Evaluates and validates the distribution at θ.
    pub fn probabilities(&self, theta: f64) -> Result<Vec<f64>> {
        let p = (self.prob)(theta);
        if p.len() != self.outcome_count {
            return Err(Error::NotAProbability {
                reason: format!(
                    "model returned {} outcomes, declared {}",
                    p.len(),
                    self.outcome_count
                ),
            });
        }
        let mut sum = 0.0;
        for (i, &pi) in p.iter().enumerate() {
            if !pi.is_finite() || pi < -tol::STATE_NORM {
                return Err(Error::NotAProbability {
                    reason: format!("outcome {i} has probability {pi}"),
                });
            }
            sum += pi;
        }
        if (sum - 1.0).abs() > tol::STATE_NORM {
            return Err(Error::NotAProbability {
                reason: format!("probabilities sum to {sum}"),
            });
        }
        Ok(p.into_iter().map(|pi| pi.max(0.0)).collect())
    }
}

impl fmt::Debug for ClassicalModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClassicalModel")
            .field("outcome_count", &self.outcome_count)
            .finish_non_exhaustive()
    }
}

/// Default finite-difference step: 1e-5·max(1, |θ|).
pub fn default_fd_step(theta: f64) -> f64 {
    tol::FD_STEP_SCALE * theta.abs().max(1.0)
}

/// Classical Fisher information Σᵢ (∂θpᵢ)²/pᵢ with central differences.
///
/// Outcomes whose probability vanishes at θ contribute the limit value of the
/// summand (2·p″ at a quadratic zero, hence 0 for θ-independent outcomes);
/// a vanishing probability with a non-vanishing derivative means the
/// information genuinely diverges and is an error.
pub fn classical_fisher(model: &ClassicalModel, theta: f64, step: f64) -> Result<FisherReport> {
    classical_fisher_opts(model, theta, step, false)
}

/// As [`classical_fisher`], with optional Richardson extrapolation of the
/// probability derivatives.
pub fn classical_fisher_opts(
    model: &ClassicalModel,
    theta: f64,
    step: f64,
    richardson: bool,
) -> Result<FisherReport> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "finite-difference step must be positive, got {step}"
        )));
    }
    let p0 = model.probabilities(theta)?;
    let pp = model.probabilities(theta + step)?;
    let pm = model.probabilities(theta - step)?;
    let derivatives: Vec<f64> = if richardson {
        let ph = model.probabilities(theta + step / 2.0)?;
        let mh = model.probabilities(theta - step / 2.0)?;
        (0..model.outcome_count)
            .map(|i| {
                let d_h = (pp[i] - pm[i]) / (2.0 * step);
                let d_half = (ph[i] - mh[i]) / step;
                (4.0 * d_half - d_h) / 3.0
            })
            .collect()
    } else {
        (0..model.outcome_count)
            .map(|i| (pp[i] - pm[i]) / (2.0 * step))
            .collect()
    };

    let mut total = 0.0;
    for i in 0..model.outcome_count {
        let dp = derivatives[i];
        if p0[i] < tol::PROB_FLOOR {
            if dp.abs() >= tol::PROB_DERIVATIVE_FLOOR {
                return Err(Error::SingularOutcome {
                    index: i,
                    prob: p0[i],
                    derivative: dp,
                });
            }
            let curvature = (pp[i] - 2.0 * p0[i] + pm[i]) / (step * step);
            total += (2.0 * curvature).max(0.0);
        } else {
            total += dp * dp / p0[i];
        }
    }
    FisherReport::clamped(total, FisherMethod::FiniteDifference, Some(step))
}

/// Quantum Fisher information of the pure family e^{-iAθ}|ψ₀⟩: 4·Var(A)_ψ₀.
pub fn qfi_pure_generator(psi0: &StateVector, a: &Operator) -> Result<FisherReport> {
    if !psi0.is_normalized() || (psi0.norm() - 1.0).abs() > tol::STATE_NORM {
        return Err(Error::NotNormalized { norm: psi0.norm() });
    }
    if a.dim() != psi0.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: psi0.dim(),
        });
    }
    let dev = a.hermiticity_deviation();
    if dev > tol::HERMITIAN_LOOSE {
        return Err(Error::NotHermitian {
            deviation: dev,
            tolerance: tol::HERMITIAN_LOOSE,
        });
    }
    let a_psi = a.apply(psi0);
    let second_moment = a_psi.norm_sq();
    let mean = psi0.inner(&a_psi).re;
    FisherReport::clamped(
        4.0 * (second_moment - mean * mean),
        FisherMethod::ClosedForm,
        None,
    )
}

/// Quantum Fisher information from a state and its θ-tangent:
/// 4⟨ψ̇|ψ̇⟩ - 4|⟨ψ̇|ψ⟩|².
pub fn qfi_pure_tangent(psi: &StateVector, dpsi: &StateVector) -> Result<FisherReport> {
    if psi.dim() != dpsi.dim() {
        return Err(Error::DimensionMismatch {
            left: psi.dim(),
            right: dpsi.dim(),
        });
    }
    let value = 4.0 * dpsi.norm_sq() - 4.0 * dpsi.inner(psi).norm_sqr();
    FisherReport::clamped(value, FisherMethod::PureState, None)
}

/// -i[A, ρ]: the θ-derivative of the family U(θ)ρU†(θ) at ρ. Hermitian and
/// traceless by construction.
pub fn density_derivative(rho: &Operator, a: &Operator) -> Result<Operator> {
    if rho.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: a.dim(),
        });
    }
    let comm = &(a * rho) - &(rho * a);
    let scaled = comm.scale(C64::new(0.0, -1.0));
    Ok(scaled.symmetrized())
}

/// Quantum Fisher information of a mixed family via the symmetric logarithmic
/// derivative: Λ entries 2⟨j|∂ρ|k⟩/(λⱼ+λₖ) on the support, value Tr(ρΛ²).
pub fn qfi_mixed_sld(rho: &Operator, drho: &Operator) -> Result<FisherReport> {
    if rho.dim() != drho.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: drho.dim(),
        });
    }
    let dev = drho.hermiticity_deviation();
    if dev > tol::HERMITIAN_LOOSE {
        return Err(Error::NotHermitian {
            deviation: dev,
            tolerance: tol::HERMITIAN_LOOSE,
        });
    }
    let trace = drho.trace().norm();
    if trace > tol::HERMITIAN_LOOSE {
        return Err(Error::NotTraceless { trace });
    }
    let n = rho.dim();
    let sys = eig_hermitian(rho)?;
    let rho_trace: f64 = sys.values().iter().sum();
    if (rho_trace - 1.0).abs() > tol::DENSITY_TRACE {
        return Err(Error::NotDensity {
            reason: format!("trace {rho_trace} is not 1"),
        });
    }
    if sys.values()[0] < tol::DENSITY_EIGENVALUE_FLOOR {
        return Err(Error::NotDensity {
            reason: format!("negative eigenvalue {:.3e}", sys.values()[0]),
        });
    }
    let v = sys.vectors();
    // ∂ρ in the eigenbasis of ρ.
    let dtilde = &(&v.dagger() * drho) * v;
    let mut lambda_entries = vec![C64::new(0.0, 0.0); n * n];
    for j in 0..n {
        for k in 0..n {
            let denom = sys.values()[j] + sys.values()[k];
            if denom > tol::SLD_KERNEL_FLOOR {
                lambda_entries[j * n + k] = dtilde.at(j, k) * C64::new(2.0 / denom, 0.0);
            }
        }
    }
    let lambda_eig = Operator::raw(n, lambda_entries, crate::qcore::OperatorKind::General);
    let sld = (&(v * &lambda_eig) * &v.dagger()).symmetrized();
    let value = (&(rho * &sld) * &sld).trace().re;
    let mut report = FisherReport::clamped(value, FisherMethod::Sld, None)?;
    report.sld_operator = Some(sld);
    Ok(report)
}

/// The input-optimized quantum Fisher information (Δa)² and the state that
/// attains it: the equal superposition of an extreme-eigenvalue pair.
#[derive(Debug, Clone)]
pub struct MaxQfi {
    pub value: f64,
    pub optimal_state: StateVector,
}

pub fn max_qfi(a: &Operator) -> Result<MaxQfi> {
    let sys = eig_hermitian(a)?;
    let (lo, hi) = sys.extremes();
    let range = hi - lo;
    if range <= tol::DEGENERATE_RANGE {
        return Err(Error::DegenerateGenerator { range });
    }
    let vmin = sys.eigenvector(0);
    let vmax = sys.eigenvector(sys.dim() - 1);
    let half = C64::new(1.0 / 2.0_f64.sqrt(), 0.0);
    let optimal_state = vmin.scale(half).add(&vmax.scale(half)).renormalized()?;
    Ok(MaxQfi {
        value: range * range,
        optimal_state,
    })
}

/// Cramér-Rao bound on the estimator variance: 1/(N·I).
pub fn cramer_rao_bound(fisher_value: f64, trials: u64) -> Result<f64> {
    if trials < 1 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    if !(fisher_value > 0.0) {
        return Err(Error::NonpositiveInformation {
            value: fisher_value,
        });
    }
    Ok(1.0 / (trials as f64 * fisher_value))
}

/// Central-difference tangent of a state family, optionally Richardson
/// extrapolated. The family must return normalized states.
pub fn state_tangent_fd<F>(family: F, theta: f64, step: f64, richardson: bool) -> Result<StateVector>
where
    F: Fn(f64) -> Result<StateVector>,
{
    let central = |h: f64| -> Result<StateVector> {
        let plus = family(theta + h)?;
        let minus = family(theta - h)?;
        Ok(plus
            .sub(&minus)
            .scale(C64::new(1.0 / (2.0 * h), 0.0)))
    };
    if richardson {
        let d_h = central(step)?;
        let d_half = central(step / 2.0)?;
        Ok(d_half
            .scale(C64::new(4.0 / 3.0, 0.0))
            .sub(&d_h.scale(C64::new(1.0 / 3.0, 0.0))))
    } else {
        central(step)
    }
}
