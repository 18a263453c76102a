//! State vectors over small Hilbert spaces.

use crate::error::{Error, Result};
use crate::qcore::C64;
use crate::tol;

/// A complex state vector.
///
/// Normalized states carry `unnormalized = false` and satisfy ‖ψ‖ = 1 within
/// [`tol::STATE_NORM`]. Unnormalized vectors are explicitly flagged; they show
/// up as intermediate projected states and numerical tangents.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    dim: usize,
    amplitudes: Vec<C64>,
    unnormalized: bool,
}

impl StateVector {
    /// A normalized state; errors unless ‖ψ‖ = 1 within tolerance.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let state = Self::unnormalized(amplitudes)?;
        let norm = state.norm();
        if (norm - 1.0).abs() > tol::STATE_NORM {
            return Err(Error::NotNormalized { norm });
        }
        Ok(StateVector {
            unnormalized: false,
            ..state
        })
    }

    /// An explicitly unnormalized vector (any finite amplitudes).
    pub fn unnormalized(amplitudes: Vec<C64>) -> Result<Self> {
        let dim = amplitudes.len();
        super::matrix::check_dim(dim)?;
        if !amplitudes
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
        {
            return Err(Error::NonFinite {
                context: "state amplitudes".into(),
            });
        }
        Ok(StateVector {
            dim,
            amplitudes,
            unnormalized: true,
        })
    }

    /// Scales the vector to unit norm.
    pub fn normalize(amplitudes: Vec<C64>) -> Result<Self> {
        Self::unnormalized(amplitudes)?.renormalized()
    }

    /// Computational basis state |j⟩.
    pub fn basis_state(dim: usize, j: usize) -> Self {
        assert!(j < dim, "basis index out of range");
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[j] = C64::new(1.0, 0.0);
        StateVector {
            dim,
            amplitudes,
            unnormalized: false,
        }
    }

    pub(crate) fn raw_unnormalized(amplitudes: Vec<C64>) -> Self {
        StateVector {
            dim: amplitudes.len(),
            amplitudes,
            unnormalized: true,
        }
    }

    pub(crate) fn raw_normalized(amplitudes: Vec<C64>) -> Self {
        StateVector {
            dim: amplitudes.len(),
            amplitudes,
            unnormalized: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn is_normalized(&self) -> bool {
        !self.unnormalized
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> C64 {
        assert_eq!(self.dim, other.dim, "state dimensions must match");
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scale(&self, factor: C64) -> StateVector {
        StateVector {
            dim: self.dim,
            amplitudes: self.amplitudes.iter().map(|&c| c * factor).collect(),
            unnormalized: true,
        }
    }

    pub fn add(&self, other: &StateVector) -> StateVector {
        assert_eq!(self.dim, other.dim, "state dimensions must match");
        StateVector {
            dim: self.dim,
            amplitudes: self
                .amplitudes
                .iter()
                .zip(other.amplitudes.iter())
                .map(|(a, b)| a + b)
                .collect(),
            unnormalized: true,
        }
    }

    pub fn sub(&self, other: &StateVector) -> StateVector {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// The unit vector along this one; errors when the norm vanishes.
    pub fn renormalized(&self) -> Result<StateVector> {
        let norm = self.norm();
        if norm <= tol::P_PS_FLOOR.sqrt() {
            return Err(Error::Numerical(format!(
                "cannot normalize a vector of norm {norm:.3e}"
            )));
        }
        let inv = C64::new(1.0 / norm, 0.0);
        Ok(StateVector {
            dim: self.dim,
            amplitudes: self.amplitudes.iter().map(|&c| c * inv).collect(),
            unnormalized: false,
        })
    }
}
