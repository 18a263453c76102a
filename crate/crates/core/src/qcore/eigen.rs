//! Hermitian eigendecomposition with deterministic ordering conventions.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::qcore::matrix::{Operator, OperatorKind};
use crate::qcore::state::StateVector;
use crate::qcore::C64;
use crate::tol;

/// Sorted eigenvalues and orthonormal eigenvectors of a Hermitian operator.
///
/// Eigenvalues are ascending. Within each degenerate block (grouped by
/// |λᵢ - λⱼ| ≤ 1e-9·max(1, ‖H‖)) the eigenvectors are phase-fixed (first
/// nonzero amplitude made positive real) and ordered lexicographically by
/// amplitude sequence, which makes the decomposition deterministic for a
/// fixed input. `multiplicity_index` labels positions inside each block.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigensystem {
    values: Vec<f64>,
    vectors: Operator,
    multiplicity_index: Vec<usize>,
}

impl Eigensystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column-orthonormal eigenvector matrix; column j pairs with `values()[j]`.
    pub fn vectors(&self) -> &Operator {
        &self.vectors
    }

    pub fn multiplicity_index(&self) -> &[usize] {
        &self.multiplicity_index
    }

    pub fn eigenvector(&self, j: usize) -> StateVector {
        let n = self.dim();
        let amplitudes = (0..n).map(|i| self.vectors.at(i, j)).collect();
        StateVector::raw_normalized(amplitudes)
    }

    /// Min and max eigenvalue.
    pub fn extremes(&self) -> (f64, f64) {
        (self.values[0], self.values[self.dim() - 1])
    }

    /// Ranges of indices sharing a degenerate eigenvalue.
    pub fn blocks(&self) -> Vec<std::ops::Range<usize>> {
        let mut blocks = Vec::new();
        let mut start = 0;
        for j in 1..=self.dim() {
            if j == self.dim() || self.multiplicity_index[j] == 0 {
                blocks.push(start..j);
                start = j;
            }
        }
        blocks
    }

    pub(crate) fn from_parts(
        values: Vec<f64>,
        vectors: Operator,
        multiplicity_index: Vec<usize>,
    ) -> Self {
        Eigensystem {
            values,
            vectors,
            multiplicity_index,
        }
    }
}

fn to_nalgebra(op: &Operator) -> DMatrix<C64> {
    DMatrix::from_row_slice(op.dim(), op.dim(), op.entries())
}

/// Phase-fixes a column in place: first amplitude with modulus above 1e-12
/// is rotated to the positive real axis.
fn fix_phase(column: &mut [C64]) {
    if let Some(&pivot) = column.iter().find(|c| c.norm() > 1e-12) {
        let phase = pivot.conj() / C64::new(pivot.norm(), 0.0);
        for c in column.iter_mut() {
            *c *= phase;
        }
    }
}

fn lex_compare(a: &[C64], b: &[C64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let re = x.re.total_cmp(&y.re);
        if re != std::cmp::Ordering::Equal {
            return re;
        }
        let im = x.im.total_cmp(&y.im);
        if im != std::cmp::Ordering::Equal {
            return im;
        }
    }
    std::cmp::Ordering::Equal
}

/// Eigendecomposition of a Hermitian operator.
///
/// Accepts any operator whose Hermiticity deviation is at most 1e-9 and works
/// on the symmetrized matrix (H + H†)/2.
pub fn eig_hermitian(h: &Operator) -> Result<Eigensystem> {
    let dev = h.hermiticity_deviation();
    if dev > tol::HERMITIAN_LOOSE {
        return Err(Error::NotHermitian {
            deviation: dev,
            tolerance: tol::HERMITIAN_LOOSE,
        });
    }
    let n = h.dim();
    let sym = h.symmetrized();
    let se = to_nalgebra(&sym).symmetric_eigen();

    let mut pairs: Vec<(f64, Vec<C64>)> = (0..n)
        .map(|j| {
            let mut col: Vec<C64> = se.eigenvectors.column(j).iter().copied().collect();
            fix_phase(&mut col);
            (se.eigenvalues[j], col)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Group degenerate eigenvalues by chaining consecutive gaps, then order
    // each block lexicographically.
    let gap_tol = tol::DEGENERACY_REL * sym.max_norm().max(1.0);
    let mut multiplicity_index = vec![0usize; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (pairs[end].0 - pairs[end - 1].0).abs() <= gap_tol {
            end += 1;
        }
        pairs[start..end].sort_by(|a, b| lex_compare(&a.1, &b.1));
        for (offset, slot) in multiplicity_index[start..end].iter_mut().enumerate() {
            *slot = offset;
        }
        start = end;
    }

    let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut entries = vec![C64::new(0.0, 0.0); n * n];
    for (j, (_, col)) in pairs.iter().enumerate() {
        for i in 0..n {
            entries[i * n + j] = col[i];
        }
    }
    let vectors = Operator::new(n, entries, OperatorKind::Unitary)?;

    let residual_tol = tol::EIG_RESIDUAL_REL * sym.max_norm().max(1.0);
    let system = Eigensystem::from_parts(values, vectors, multiplicity_index);
    let worst = residual(&sym, &system);
    if worst > residual_tol {
        return Err(Error::Numerical(format!(
            "eigendecomposition residual {worst:.3e} exceeds {residual_tol:.3e}"
        )));
    }
    Ok(system)
}

fn residual(h: &Operator, sys: &Eigensystem) -> f64 {
    let n = h.dim();
    let mut worst = 0.0f64;
    for j in 0..n {
        let v = sys.eigenvector(j);
        let hv = h.apply(&v);
        let lv = v.scale(C64::new(sys.values()[j], 0.0));
        worst = worst.max(
            hv.sub(&lv)
                .amplitudes()
                .iter()
                .map(|c| c.norm())
                .fold(0.0, f64::max),
        );
    }
    worst
}

/// Ascending eigenvalues only; used for density validation.
pub(crate) fn hermitian_eigenvalues(op: &Operator) -> Vec<f64> {
    let se = to_nalgebra(&op.symmetrized()).symmetric_eigen();
    let mut values: Vec<f64> = se.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}
