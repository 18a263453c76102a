//! Projective postselection: success probabilities, renormalized states, and
//! the postselected quantum Fisher information.

use crate::error::{Error, Result};
use crate::fisher::{
    density_derivative, qfi_mixed_sld, qfi_pure_tangent, FisherMethod, FisherReport,
};
use crate::qcore::{
    eig_hermitian, evolve, evolve_state, spectral_range, C64, Operator, OperatorKind, StateVector,
};
use crate::tol;

/// A projective postselection F = Σ_f |f⟩⟨f| together with the orthonormal
/// states spanning it.
#[derive(Debug, Clone)]
pub struct Postselection {
    projector: Operator,
    basis: Vec<StateVector>,
}

impl Postselection {
    /// Builds the postselection from the orthonormal states it accepts.
    pub fn from_states(basis: Vec<StateVector>) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::InvalidConfig(
                "postselection needs at least one basis state".into(),
            ));
        }
        let dim = basis[0].dim();
        for (i, f) in basis.iter().enumerate() {
            if f.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: f.dim(),
                    right: dim,
                });
            }
            for (j, g) in basis.iter().enumerate() {
                let overlap = f.inner(g).norm();
                let expected = if i == j { 1.0 } else { 0.0 };
                if (overlap - expected).abs() > tol::STATE_NORM {
                    return Err(Error::InvalidConfig(
                        "postselection basis is not orthonormal".into(),
                    ));
                }
            }
        }
        let mut entries = vec![C64::new(0.0, 0.0); dim * dim];
        for f in &basis {
            let a = f.amplitudes();
            for i in 0..dim {
                for j in 0..dim {
                    entries[i * dim + j] += a[i] * a[j].conj();
                }
            }
        }
        let projector = Operator::new(dim, entries, OperatorKind::Projector)?;
        Ok(Postselection { projector, basis })
    }

    /// Builds the postselection from a projector, taking its eigenvalue-one
    /// eigenvectors as the accepted set.
    pub fn from_projector(f: &Operator) -> Result<Self> {
        let checked = if f.kind() == OperatorKind::Projector {
            f.clone()
        } else {
            Operator::projector(f.dim(), f.entries().to_vec())?
        };
        let sys = eig_hermitian(&checked)?;
        let basis: Vec<StateVector> = (0..sys.dim())
            .filter(|&j| sys.values()[j] > 0.5)
            .map(|j| sys.eigenvector(j))
            .collect();
        if basis.is_empty() {
            return Err(Error::InvalidConfig(
                "projector has rank zero: nothing can pass the postselection".into(),
            ));
        }
        Ok(Postselection {
            projector: checked,
            basis,
        })
    }

    /// The trivial postselection that accepts everything.
    pub fn identity(dim: usize) -> Self {
        let basis = (0..dim).map(|j| StateVector::basis_state(dim, j)).collect();
        Postselection {
            projector: Operator::identity(dim),
            basis,
        }
    }

    pub fn dim(&self) -> usize {
        self.projector.dim()
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn projector(&self) -> &Operator {
        &self.projector
    }

    pub fn basis(&self) -> &[StateVector] {
        &self.basis
    }
}

/// Result of postselecting a pure state.
#[derive(Debug, Clone)]
pub struct PostselectedOutcome {
    pub p_ps: f64,
    pub raw_state: StateVector,
    state: Option<StateVector>,
}

impl PostselectedOutcome {
    /// The renormalized state; errors when the postselection probability is
    /// below the floor.
    pub fn state(&self) -> Result<&StateVector> {
        self.state
            .as_ref()
            .ok_or(Error::VanishingPostselection { p_ps: self.p_ps })
    }

    pub fn state_opt(&self) -> Option<&StateVector> {
        self.state.as_ref()
    }
}

/// F|Ψθ⟩, its success probability ‖F|Ψθ⟩‖², and the renormalized state when
/// the probability clears the 1e-12 floor.
pub fn apply_postselection(
    psi_theta: &StateVector,
    ps: &Postselection,
) -> Result<PostselectedOutcome> {
    if psi_theta.dim() != ps.dim() {
        return Err(Error::DimensionMismatch {
            left: psi_theta.dim(),
            right: ps.dim(),
        });
    }
    if !psi_theta.is_normalized() {
        return Err(Error::NotNormalized {
            norm: psi_theta.norm(),
        });
    }
    let raw_state = ps.projector().apply(psi_theta);
    let p_ps = raw_state.norm_sq();
    let state = if p_ps > tol::P_PS_FLOOR {
        Some(raw_state.renormalized()?)
    } else {
        None
    };
    Ok(PostselectedOutcome {
        p_ps,
        raw_state,
        state,
    })
}

/// Tr(Fρθ) for a mixed input.
pub fn postselection_probability_mixed(rho_theta: &Operator, ps: &Postselection) -> Result<f64> {
    if rho_theta.dim() != ps.dim() {
        return Err(Error::DimensionMismatch {
            left: rho_theta.dim(),
            right: ps.dim(),
        });
    }
    Ok((ps.projector() * rho_theta).trace().re)
}

/// FρθF / Tr(Fρθ) and the success probability.
pub fn postselect_density(rho_theta: &Operator, ps: &Postselection) -> Result<(Operator, f64)> {
    let p_ps = postselection_probability_mixed(rho_theta, ps)?;
    if p_ps <= tol::P_PS_FLOOR {
        return Err(Error::VanishingPostselection { p_ps });
    }
    let f = ps.projector();
    let projected = &(f * rho_theta) * f;
    let renorm = projected.scale(C64::new(1.0 / p_ps, 0.0)).symmetrized();
    let rho_ps = Operator::density(renorm.dim(), renorm.entries().to_vec())?;
    Ok((rho_ps, p_ps))
}

/// Postselected quantum Fisher information of the pure family
/// e^{-iAθ}|ψ₀⟩, from the trace forms
/// 4·Tr(FAρθA)/p - 4·|Tr(FρθA)|²/p².
pub fn postselected_qfi(
    psi0: &StateVector,
    a: &Operator,
    ps: &Postselection,
    theta: f64,
) -> Result<FisherReport> {
    if !psi0.is_normalized() {
        return Err(Error::NotNormalized { norm: psi0.norm() });
    }
    let range = spectral_range(a)?;
    if range <= tol::DEGENERATE_RANGE {
        return Err(Error::DegenerateGenerator { range });
    }
    if ps.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            left: ps.dim(),
            right: a.dim(),
        });
    }
    let psi_theta = evolve_state(psi0, a, theta)?;
    let f = ps.projector();
    let f_psi = f.apply(&psi_theta);
    let p_ps = f_psi.norm_sq();
    if p_ps <= tol::P_PS_FLOOR {
        return Err(Error::VanishingPostselection { p_ps });
    }
    let a_psi = a.apply(&psi_theta);
    let f_a_psi = f.apply(&a_psi);
    // Tr(FAρθA) = ⟨Aψθ|F|Aψθ⟩ and Tr(FρθA) = ⟨Aψθ|F|ψθ⟩.
    let term1 = 4.0 * a_psi.inner(&f_a_psi).re / p_ps;
    let term2 = 4.0 * a_psi.inner(&f_psi).norm_sqr() / (p_ps * p_ps);
    FisherReport::clamped(term1 - term2, FisherMethod::ClosedForm, None)
}

/// Independent finite-difference route: renormalized postselected states are
/// built on the stencil θ, θ±h and pushed through the tangent form.
pub fn postselected_qfi_fd(
    psi0: &StateVector,
    a: &Operator,
    ps: &Postselection,
    theta: f64,
    step: f64,
) -> Result<FisherReport> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "finite-difference step must be positive, got {step}"
        )));
    }
    let renormalized_at = |th: f64| -> Result<StateVector> {
        let psi_theta = evolve_state(psi0, a, th)?;
        let outcome = apply_postselection(&psi_theta, ps)?;
        outcome.state().cloned()
    };
    let center = renormalized_at(theta)?;
    let plus = renormalized_at(theta + step)?;
    let minus = renormalized_at(theta - step)?;
    let dpsi = plus
        .sub(&minus)
        .scale(C64::new(1.0 / (2.0 * step), 0.0));
    let report = qfi_pure_tangent(&center, &dpsi)?;
    Ok(FisherReport {
        method: FisherMethod::FiniteDifference,
        step: Some(step),
        ..report
    })
}

/// Postselected Fisher information for a mixed input, via the symmetric
/// logarithmic derivative of the renormalized family FρθF/pθ.
pub fn postselected_qfi_mixed_sld(
    rho0: &Operator,
    a: &Operator,
    ps: &Postselection,
    theta: f64,
) -> Result<FisherReport> {
    let rho_theta = evolve(rho0, a, theta)?;
    let (rho_ps, p_ps) = postselect_density(&rho_theta, ps)?;
    let f = ps.projector();
    let drho = density_derivative(&rho_theta, a)?;
    let dp = (f * &drho).trace().re;
    // d/dθ [FρF/p] = (F dρ F)/p - (FρF) dp/p².
    let fdf = (&(f * &drho) * f).scale(C64::new(1.0 / p_ps, 0.0));
    let correction = rho_ps.scale(C64::new(dp / p_ps, 0.0));
    let drho_ps = (&fdf - &correction).symmetrized();
    let mut report = qfi_mixed_sld(&rho_ps, &drho_ps)?;
    report.method = FisherMethod::Sld;
    Ok(report)
}
