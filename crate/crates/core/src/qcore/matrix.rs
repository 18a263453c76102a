//! Dense complex square matrices with validated operator kinds.

use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::qcore::state::StateVector;
use crate::qcore::C64;
use crate::tol;

/// Smallest and largest supported Hilbert-space dimensions.
pub const MIN_DIM: usize = 1;
pub const MAX_DIM: usize = 64;

/// Structural class of an [`Operator`], checked at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    General,
    Hermitian,
    Unitary,
    Projector,
    Density,
}

/// Dense complex square matrix, row-major, dimension at most [`MAX_DIM`].
///
/// Values are immutable after construction; every constructor validates the
/// invariants of the requested [`OperatorKind`].
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<C64>,
    kind: OperatorKind,
}

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if !(MIN_DIM..=MAX_DIM).contains(&dim) {
        return Err(Error::InvalidDim {
            dim,
            min: MIN_DIM,
            max: MAX_DIM,
        });
    }
    Ok(())
}

impl Operator {
    /// Builds an operator of the requested kind, validating its invariants.
    pub fn new(dim: usize, entries: Vec<C64>, kind: OperatorKind) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: entries.len(),
                right: dim * dim,
            });
        }
        if !entries.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::NonFinite {
                context: "operator entries".into(),
            });
        }
        let op = Operator { dim, entries, kind };
        op.validate_kind()?;
        Ok(op)
    }

    pub fn general(dim: usize, entries: Vec<C64>) -> Result<Self> {
        Self::new(dim, entries, OperatorKind::General)
    }

    pub fn hermitian(dim: usize, entries: Vec<C64>) -> Result<Self> {
        Self::new(dim, entries, OperatorKind::Hermitian)
    }

    pub fn unitary(dim: usize, entries: Vec<C64>) -> Result<Self> {
        Self::new(dim, entries, OperatorKind::Unitary)
    }

    pub fn projector(dim: usize, entries: Vec<C64>) -> Result<Self> {
        Self::new(dim, entries, OperatorKind::Projector)
    }

    pub fn density(dim: usize, entries: Vec<C64>) -> Result<Self> {
        Self::new(dim, entries, OperatorKind::Density)
    }

    pub fn zeros(dim: usize) -> Self {
        Operator {
            dim,
            entries: vec![C64::new(0.0, 0.0); dim * dim],
            kind: OperatorKind::General,
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![C64::new(0.0, 0.0); dim * dim];
        for j in 0..dim {
            entries[j * dim + j] = C64::new(1.0, 0.0);
        }
        Operator {
            dim,
            entries,
            kind: OperatorKind::Projector,
        }
    }

    /// Real diagonal matrix; Hermitian by construction.
    pub fn from_diagonal(diagonal: &[f64]) -> Result<Self> {
        let dim = diagonal.len();
        check_dim(dim)?;
        let mut entries = vec![C64::new(0.0, 0.0); dim * dim];
        for (j, &d) in diagonal.iter().enumerate() {
            entries[j * dim + j] = C64::new(d, 0.0);
        }
        Self::hermitian(dim, entries)
    }

    /// |ψ⟩⟨ψ| for a normalized state.
    pub fn pure_density(psi: &StateVector) -> Result<Self> {
        let dim = psi.dim();
        let a = psi.amplitudes();
        let mut entries = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                entries[i * dim + j] = a[i] * a[j].conj();
            }
        }
        Self::density(dim, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.dim + col]
    }

    /// Conjugate transpose. Self-adjoint kinds are preserved.
    pub fn dagger(&self) -> Operator {
        let mut entries = vec![C64::new(0.0, 0.0); self.dim * self.dim];
        for i in 0..self.dim {
            for j in 0..self.dim {
                entries[j * self.dim + i] = self.at(i, j).conj();
            }
        }
        Operator {
            dim: self.dim,
            entries,
            kind: self.kind,
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|j| self.at(j, j)).sum()
    }

    pub fn scale(&self, factor: C64) -> Operator {
        Operator {
            dim: self.dim,
            entries: self.entries.iter().map(|&c| c * factor).collect(),
            kind: OperatorKind::General,
        }
    }

    /// Max-modulus norm over entries.
    pub fn max_norm(&self) -> f64 {
        self.entries.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim, other.dim, "operator dimensions must match");
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// max |M - M†| over entries.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                dev = dev.max((self.at(i, j) - self.at(j, i).conj()).norm());
            }
        }
        dev
    }

    /// (M + M†)/2, tagged Hermitian.
    pub fn symmetrized(&self) -> Operator {
        let mut entries = vec![C64::new(0.0, 0.0); self.dim * self.dim];
        for i in 0..self.dim {
            for j in 0..self.dim {
                entries[i * self.dim + j] =
                    (self.at(i, j) + self.at(j, i).conj()) * C64::new(0.5, 0.0);
            }
        }
        Operator {
            dim: self.dim,
            entries,
            kind: OperatorKind::Hermitian,
        }
    }

    /// M|ψ⟩; the result carries the `unnormalized` flag.
    pub fn apply(&self, psi: &StateVector) -> StateVector {
        assert_eq!(self.dim, psi.dim(), "operator/state dimensions must match");
        let a = psi.amplitudes();
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        for i in 0..self.dim {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..self.dim {
                acc += self.at(i, j) * a[j];
            }
            out[i] = acc;
        }
        StateVector::raw_unnormalized(out)
    }

    /// ⟨ψ|M|ψ⟩.
    pub fn expectation(&self, psi: &StateVector) -> C64 {
        psi.inner(&self.apply(psi))
    }

    pub(crate) fn raw(dim: usize, entries: Vec<C64>, kind: OperatorKind) -> Operator {
        debug_assert_eq!(entries.len(), dim * dim);
        Operator { dim, entries, kind }
    }

    fn validate_kind(&self) -> Result<()> {
        match self.kind {
            OperatorKind::General => Ok(()),
            OperatorKind::Hermitian => {
                let dev = self.hermiticity_deviation();
                if dev > tol::HERMITIAN {
                    return Err(Error::NotHermitian {
                        deviation: dev,
                        tolerance: tol::HERMITIAN,
                    });
                }
                Ok(())
            }
            OperatorKind::Unitary => {
                let gram = &self.dagger() * self;
                let dev = gram.max_abs_diff(&Operator::identity(self.dim));
                if dev > tol::UNITARY {
                    return Err(Error::NotUnitary { deviation: dev });
                }
                Ok(())
            }
            OperatorKind::Projector => {
                let herm = self.hermiticity_deviation();
                let idem = (self * self).max_abs_diff(self);
                let dev = herm.max(idem);
                if dev > tol::PROJECTOR {
                    return Err(Error::NotProjector { deviation: dev });
                }
                Ok(())
            }
            OperatorKind::Density => {
                let herm = self.hermiticity_deviation();
                if herm > tol::PROJECTOR {
                    return Err(Error::NotDensity {
                        reason: format!("not Hermitian: deviation {herm:.3e}"),
                    });
                }
                let tr = self.trace();
                if (tr.re - 1.0).abs() > tol::DENSITY_TRACE || tr.im.abs() > tol::DENSITY_TRACE {
                    return Err(Error::NotDensity {
                        reason: format!("trace {} is not 1", tr),
                    });
                }
                let eigenvalues = crate::qcore::eigen::hermitian_eigenvalues(self);
                if let Some(&lowest) = eigenvalues.first() {
                    if lowest < tol::DENSITY_EIGENVALUE_FLOOR {
                        return Err(Error::NotDensity {
                            reason: format!("negative eigenvalue {lowest:.3e}"),
                        });
                    }
                }
                Ok(())
            }
        }
    }
}

fn matmul(a: &Operator, b: &Operator) -> Operator {
    assert_eq!(a.dim, b.dim, "operator dimensions must match");
    let n = a.dim;
    let mut entries = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a.entries[i * n + k];
            if aik.re == 0.0 && aik.im == 0.0 {
                continue;
            }
            for j in 0..n {
                entries[i * n + j] += aik * b.entries[k * n + j];
            }
        }
    }
    Operator::raw(n, entries, OperatorKind::General)
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        matmul(self, rhs)
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimensions must match");
        let entries = self
            .entries
            .iter()
            .zip(rhs.entries.iter())
            .map(|(a, b)| a + b)
            .collect();
        Operator::raw(self.dim, entries, OperatorKind::General)
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimensions must match");
        let entries = self
            .entries
            .iter()
            .zip(rhs.entries.iter())
            .map(|(a, b)| a - b)
            .collect();
        Operator::raw(self.dim, entries, OperatorKind::General)
    }
}

/// ‖AF - FA‖max.
pub fn commutator_norm(a: &Operator, f: &Operator) -> f64 {
    (&(a * f) - &(f * a)).max_norm()
}

/// True when A and F commute within the crate-wide threshold.
pub fn commutes(a: &Operator, f: &Operator) -> bool {
    let scale = (a.max_norm() * f.max_norm()).max(1.0);
    commutator_norm(a, f) <= tol::COMMUTE_REL * scale
}
