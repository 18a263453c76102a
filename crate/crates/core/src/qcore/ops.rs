//! Unitary evolution and spectral utilities for Hermitian generators.

use crate::error::{Error, Result};
use crate::qcore::eigen::{eig_hermitian, Eigensystem};
use crate::qcore::matrix::{Operator, OperatorKind};
use crate::qcore::state::StateVector;
use crate::qcore::C64;
use crate::tol;

fn ensure_same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { left: a, right: b });
    }
    Ok(())
}

fn ensure_density(rho: &Operator) -> Result<Operator> {
    if rho.kind() == OperatorKind::Density {
        return Ok(rho.clone());
    }
    Operator::density(rho.dim(), rho.entries().to_vec())
}

/// e^{-iAθ}, computed through the spectral decomposition of A.
pub fn evolution_unitary(a: &Operator, theta: f64) -> Result<Operator> {
    Ok(unitary_from_eigensystem(&eig_hermitian(a)?, theta))
}

pub(crate) fn unitary_from_eigensystem(sys: &Eigensystem, theta: f64) -> Operator {
    let n = sys.dim();
    let v = sys.vectors();
    let phases: Vec<C64> = sys
        .values()
        .iter()
        .map(|&a| C64::from_polar(1.0, -a * theta))
        .collect();
    // V · diag(e^{-iaθ}) · V†
    let mut entries = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                acc += v.at(i, k) * phases[k] * v.at(j, k).conj();
            }
            entries[i * n + j] = acc;
        }
    }
    Operator::raw(n, entries, OperatorKind::General)
}

/// U(θ) ρ₀ U†(θ) with U(θ) = e^{-iAθ}.
pub fn evolve(rho0: &Operator, a: &Operator, theta: f64) -> Result<Operator> {
    ensure_same_dim(rho0.dim(), a.dim())?;
    let rho0 = ensure_density(rho0)?;
    let u = evolution_unitary(a, theta)?;
    let rotated = &(&u * &rho0) * &u.dagger();
    Operator::density(rotated.dim(), rotated.entries().to_vec())
}

/// e^{-iAθ}|ψ₀⟩. Preserves the normalization flag of the input.
pub fn evolve_state(psi0: &StateVector, a: &Operator, theta: f64) -> Result<StateVector> {
    ensure_same_dim(psi0.dim(), a.dim())?;
    let u = evolution_unitary(a, theta)?;
    let out = u.apply(psi0);
    if psi0.is_normalized() {
        out.renormalized()
    } else {
        Ok(out)
    }
}

/// Var(A)_ρ = Tr(ρA²) - (Tr ρA)², clamped to 0 near the rounding floor.
pub fn variance(rho: &Operator, a: &Operator) -> Result<f64> {
    ensure_same_dim(rho.dim(), a.dim())?;
    let rho = ensure_density(rho)?;
    let dev = a.hermiticity_deviation();
    if dev > tol::HERMITIAN_LOOSE {
        return Err(Error::NotHermitian {
            deviation: dev,
            tolerance: tol::HERMITIAN_LOOSE,
        });
    }
    let ra = &rho * a;
    let mean = ra.trace().re;
    let second_moment = (&ra * a).trace().re;
    let var = second_moment - mean * mean;
    if var < -tol::VARIANCE_CLAMP {
        return Err(Error::Numerical(format!(
            "variance {var:.3e} below the clamping floor"
        )));
    }
    Ok(var.max(0.0))
}

/// a_max - a_min of a Hermitian operator.
pub fn spectral_range(a: &Operator) -> Result<f64> {
    let sys = eig_hermitian(a)?;
    let (lo, hi) = sys.extremes();
    Ok(hi - lo)
}
