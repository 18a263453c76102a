//! Doubly extended and standard Kirkwood-Dirac quasiprobability distributions,
//! the quasiprobability form of the postselected Fisher information, and
//! negativity witnesses.
//!
//! The tensor `q[a][a'][f] = ⟨f|a⟩⟨a|ρ|a'⟩⟨a'|f⟩` is built over an eigenbasis
//! {|a⟩} of the generator (shared by both primed and unprimed indices) and an
//! eigenbasis {|f⟩} of the postselection observable. When the two operators
//! commute, the f-basis is chosen to diagonalize both, so the distribution
//! collapses to an ordinary probability distribution; the basis choice is
//! deterministic either way.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fisher::{FisherMethod, FisherReport};
use crate::qcore::{
    commutes, eig_hermitian, gue_hermitian, C64, Eigensystem, Operator, OperatorKind, StateVector,
};
use crate::tol;

/// The doubly extended Kirkwood-Dirac distribution of a state.
#[derive(Debug, Clone)]
pub struct KDTensor {
    dim: usize,
    values: Vec<C64>,
    basis_a: Operator,
    basis_f: Operator,
    eigs_a: Vec<f64>,
    eigs_f: Vec<f64>,
}

impl KDTensor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn idx(&self, a: usize, ap: usize, f: usize) -> usize {
        (a * self.dim + ap) * self.dim + f
    }

    /// `q[a][a'][f]`.
    pub fn value(&self, a: usize, ap: usize, f: usize) -> C64 {
        self.values[self.idx(a, ap, f)]
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Eigenvector matrix of the generator (columns are |a⟩).
    pub fn basis_a(&self) -> &Operator {
        &self.basis_a
    }

    /// Eigenvector matrix of the postselection observable (columns are |f⟩).
    pub fn basis_f(&self) -> &Operator {
        &self.basis_f
    }

    pub fn eigs_a(&self) -> &[f64] {
        &self.eigs_a
    }

    pub fn eigs_f(&self) -> &[f64] {
        &self.eigs_f
    }

    /// Σ over all entries (the trace of ρ).
    pub fn total(&self) -> C64 {
        self.values.iter().sum()
    }

    /// Marginal over a': the standard Kirkwood-Dirac matrix `q[a][f]`.
    pub fn standard_marginal(&self) -> StandardKd {
        let mut values = vec![C64::new(0.0, 0.0); self.dim * self.dim];
        for a in 0..self.dim {
            for ap in 0..self.dim {
                for f in 0..self.dim {
                    values[a * self.dim + f] += self.value(a, ap, f);
                }
            }
        }
        StandardKd {
            dim: self.dim,
            values,
            eigs_a: self.eigs_a.clone(),
            eigs_f: self.eigs_f.clone(),
        }
    }

    /// Indices of f-basis states with eigenvalue above 1/2: the accepted set
    /// when the observable is a projector.
    pub fn projector_indices(&self) -> Vec<usize> {
        (0..self.dim).filter(|&f| self.eigs_f[f] > 0.5).collect()
    }

    /// CSV rows `a_index,ap_index,f_index,a_value,ap_value,re_q,im_q`.
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "a_index,ap_index,f_index,a_value,ap_value,re_q,im_q")?;
        for a in 0..self.dim {
            for ap in 0..self.dim {
                for f in 0..self.dim {
                    let q = self.value(a, ap, f);
                    writeln!(
                        w,
                        "{},{},{},{},{},{},{}",
                        a,
                        ap,
                        f,
                        crate::io::fmt_f64(self.eigs_a[a]),
                        crate::io::fmt_f64(self.eigs_a[ap]),
                        crate::io::fmt_f64(q.re),
                        crate::io::fmt_f64(q.im),
                    )?;
                }
            }
        }
        Ok(())
    }
}

/// The standard Kirkwood-Dirac matrix `q[a][f] = ⟨f|a⟩⟨a|ρ|f⟩`.
#[derive(Debug, Clone)]
pub struct StandardKd {
    dim: usize,
    values: Vec<C64>,
    eigs_a: Vec<f64>,
    eigs_f: Vec<f64>,
}

impl StandardKd {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self, a: usize, f: usize) -> C64 {
        self.values[a * self.dim + f]
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn eigs_a(&self) -> &[f64] {
        &self.eigs_a
    }

    pub fn eigs_f(&self) -> &[f64] {
        &self.eigs_f
    }

    pub fn total(&self) -> C64 {
        self.values.iter().sum()
    }

    /// Marginal over a: ⟨f|ρ|f⟩ per f.
    pub fn f_marginal(&self) -> Vec<C64> {
        (0..self.dim)
            .map(|f| (0..self.dim).map(|a| self.value(a, f)).sum())
            .collect()
    }

    /// Marginal over f: ⟨a|ρ|a⟩ per a.
    pub fn a_marginal(&self) -> Vec<C64> {
        (0..self.dim)
            .map(|a| (0..self.dim).map(|f| self.value(a, f)).sum())
            .collect()
    }
}

/// Negativity and nonreality summary of a quasiprobability distribution.
#[derive(Debug, Clone, Copy)]
pub struct NegativityReport {
    pub min_real: f64,
    /// Σ over entries of max(0, -Re q).
    pub negativity_mass: f64,
    pub max_imag_abs: f64,
    pub is_classical: bool,
}

fn scan_entries<'a>(entries: impl Iterator<Item = &'a C64>) -> NegativityReport {
    let mut min_real = f64::INFINITY;
    let mut negativity_mass = 0.0;
    let mut max_imag_abs = 0.0f64;
    for q in entries {
        min_real = min_real.min(q.re);
        negativity_mass += (-q.re).max(0.0);
        max_imag_abs = max_imag_abs.max(q.im.abs());
    }
    if !min_real.is_finite() {
        min_real = 0.0;
    }
    NegativityReport {
        min_real,
        negativity_mass,
        max_imag_abs,
        is_classical: min_real >= -tol::CLASSICALITY && max_imag_abs <= tol::CLASSICALITY,
    }
}

struct KdBases {
    eigs_a: Vec<f64>,
    basis_a: Operator,
    eigs_f: Vec<f64>,
    basis_f: Operator,
}

/// Eigenbases for the tensor. For commuting pairs the f-basis refines the
/// a-basis (diagonalizing F inside each degenerate block of A) and is sorted
/// by F-eigenvalue, so both operators are diagonal in it.
fn kd_bases(a: &Operator, f: &Operator) -> Result<KdBases> {
    let a_sys = eig_hermitian(a)?;
    let (eigs_f, basis_f) = if commutes(a, f) {
        shared_f_basis(&a_sys, f)?
    } else {
        let f_sys = eig_hermitian(f)?;
        (f_sys.values().to_vec(), f_sys.vectors().clone())
    };
    Ok(KdBases {
        eigs_a: a_sys.values().to_vec(),
        basis_a: a_sys.vectors().clone(),
        eigs_f,
        basis_f,
    })
}

fn shared_f_basis(a_sys: &Eigensystem, f: &Operator) -> Result<(Vec<f64>, Operator)> {
    let n = a_sys.dim();
    let mut columns: Vec<(f64, Vec<C64>)> = Vec::with_capacity(n);
    for block in a_sys.blocks() {
        let k = block.len();
        if k == 1 {
            let v = a_sys.eigenvector(block.start);
            let fv = f.expectation(&v).re;
            columns.push((fv, v.amplitudes().to_vec()));
            continue;
        }
        // Diagonalize the block projection of F and rotate the block basis.
        let block_vectors: Vec<StateVector> =
            block.clone().map(|j| a_sys.eigenvector(j)).collect();
        let mut g = vec![C64::new(0.0, 0.0); k * k];
        for (r, vr) in block_vectors.iter().enumerate() {
            let f_vr = f.apply(vr);
            for (c, vc) in block_vectors.iter().enumerate() {
                g[c * k + r] = vc.inner(&f_vr);
            }
        }
        let g_op = Operator::raw(k, g, OperatorKind::General).symmetrized();
        let g_sys = eig_hermitian(&g_op)?;
        for idx in 0..k {
            let w = g_sys.eigenvector(idx);
            let mut col = vec![C64::new(0.0, 0.0); n];
            for (r, vr) in block_vectors.iter().enumerate() {
                let weight = w.amplitudes()[r];
                for (i, &amp) in vr.amplitudes().iter().enumerate() {
                    col[i] += weight * amp;
                }
            }
            columns.push((g_sys.values()[idx], col));
        }
    }
    // Stable sort by F-eigenvalue keeps the a-ordering inside ties.
    columns.sort_by(|x, y| x.0.total_cmp(&y.0));
    let eigs_f: Vec<f64> = columns.iter().map(|c| c.0).collect();
    let mut entries = vec![C64::new(0.0, 0.0); n * n];
    for (j, (_, col)) in columns.iter().enumerate() {
        for i in 0..n {
            entries[i * n + j] = col[i];
        }
    }
    Ok((eigs_f, Operator::new(n, entries, OperatorKind::Unitary)?))
}

fn check_kd_dims(rho: &Operator, a: &Operator, f: &Operator) -> Result<()> {
    if rho.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: a.dim(),
        });
    }
    if rho.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: f.dim(),
        });
    }
    let dev = f.hermiticity_deviation();
    if dev > tol::HERMITIAN_LOOSE {
        return Err(Error::NotHermitian {
            deviation: dev,
            tolerance: tol::HERMITIAN_LOOSE,
        });
    }
    Ok(())
}

fn build_tensor(rho: &Operator, bases: &KdBases) -> KDTensor {
    let n = rho.dim();
    // overlaps[f][a] = ⟨f|a⟩, rho_a[a][a'] = ⟨a|ρ|a'⟩.
    let overlaps = &bases.basis_f.dagger() * &bases.basis_a;
    let rho_a = &(&bases.basis_a.dagger() * rho) * &bases.basis_a;
    let mut values = vec![C64::new(0.0, 0.0); n * n * n];
    for a in 0..n {
        for ap in 0..n {
            let r = rho_a.at(a, ap);
            for f in 0..n {
                values[(a * n + ap) * n + f] =
                    overlaps.at(f, a) * r * overlaps.at(f, ap).conj();
            }
        }
    }
    KDTensor {
        dim: n,
        values,
        basis_a: bases.basis_a.clone(),
        basis_f: bases.basis_f.clone(),
        eigs_a: bases.eigs_a.clone(),
        eigs_f: bases.eigs_f.clone(),
    }
}

/// The doubly extended distribution `q[a][a'][f]` of ρ over the eigenbases of
/// A and F.
pub fn kd_doubly_extended(rho: &Operator, a: &Operator, f: &Operator) -> Result<KDTensor> {
    check_kd_dims(rho, a, f)?;
    let bases = kd_bases(a, f)?;
    Ok(build_tensor(rho, &bases))
}

/// As [`kd_doubly_extended`], but with caller-supplied orthonormal bases.
/// Exists for basis-sensitivity checks (for example rotating eigenvectors
/// inside a degenerate block).
pub fn kd_with_bases(
    rho: &Operator,
    eigs_a: Vec<f64>,
    basis_a: &Operator,
    eigs_f: Vec<f64>,
    basis_f: &Operator,
) -> Result<KDTensor> {
    let n = rho.dim();
    if basis_a.dim() != n || basis_f.dim() != n || eigs_a.len() != n || eigs_f.len() != n {
        return Err(Error::DimensionMismatch {
            left: basis_a.dim(),
            right: n,
        });
    }
    let basis_a = Operator::unitary(n, basis_a.entries().to_vec())?;
    let basis_f = Operator::unitary(n, basis_f.entries().to_vec())?;
    let bases = KdBases {
        eigs_a,
        basis_a,
        eigs_f,
        basis_f,
    };
    Ok(build_tensor(rho, &bases))
}

/// Builds the tensor with an f-basis nudged away from singular overlaps: when
/// some ⟨f|a⟩ vanishes, the basis is rotated by a random unitary e^{iεG}
/// (ε = 1e-7, preserving orthonormality) and rebuilt, up to 3 retries. Use
/// this when the tensor must support [`reconstruct_rho`].
pub fn kd_doubly_extended_perturbed(
    rho: &Operator,
    a: &Operator,
    f: &Operator,
    seed: u64,
) -> Result<KDTensor> {
    check_kd_dims(rho, a, f)?;
    let mut bases = kd_bases(a, f)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..=3 {
        let overlaps = &bases.basis_f.dagger() * &bases.basis_a;
        let min_overlap = (0..rho.dim() * rho.dim())
            .map(|i| overlaps.entries()[i].norm())
            .fold(f64::INFINITY, f64::min);
        if min_overlap >= tol::OVERLAP_FLOOR {
            return Ok(build_tensor(rho, &bases));
        }
        bases.basis_f = rotate_basis(&bases.basis_f, &mut rng)?;
    }
    let overlaps = &bases.basis_f.dagger() * &bases.basis_a;
    let (f_idx, a_idx) = argmin_overlap(&overlaps);
    Err(Error::SingularOverlap { f: f_idx, a: a_idx })
}

fn argmin_overlap(overlaps: &Operator) -> (usize, usize) {
    let n = overlaps.dim();
    let mut best = (0, 0);
    let mut best_val = f64::INFINITY;
    for f in 0..n {
        for a in 0..n {
            let v = overlaps.at(f, a).norm();
            if v < best_val {
                best_val = v;
                best = (f, a);
            }
        }
    }
    best
}

/// basis · e^{iεG} for a random Hermitian G with unit max-norm.
fn rotate_basis(basis: &Operator, rng: &mut ChaCha8Rng) -> Result<Operator> {
    let n = basis.dim();
    let g_raw = gue_hermitian(n, rng);
    let scale = 1.0 / g_raw.max_norm().max(1e-12);
    let g = Operator::hermitian(
        n,
        g_raw
            .entries()
            .iter()
            .map(|&c| c * C64::new(scale, 0.0))
            .collect(),
    )?;
    let rotation = crate::qcore::evolution_unitary(&g, -tol::PERTURBATION_ANGLE)?;
    let rotated = basis * &rotation;
    Operator::unitary(n, rotated.entries().to_vec())
}

/// The standard Kirkwood-Dirac matrix `q[a][f] = ⟨f|a⟩⟨a|ρ|f⟩`, computed
/// directly (not through the doubly extended marginal).
pub fn kd_standard(rho: &Operator, a: &Operator, f: &Operator) -> Result<StandardKd> {
    check_kd_dims(rho, a, f)?;
    let bases = kd_bases(a, f)?;
    let n = rho.dim();
    let overlaps = &bases.basis_f.dagger() * &bases.basis_a;
    let cross = &(&bases.basis_a.dagger() * rho) * &bases.basis_f;
    let mut values = vec![C64::new(0.0, 0.0); n * n];
    for ai in 0..n {
        for fi in 0..n {
            values[ai * n + fi] = overlaps.at(fi, ai) * cross.at(ai, fi);
        }
    }
    Ok(StandardKd {
        dim: n,
        values,
        eigs_a: bases.eigs_a,
        eigs_f: bases.eigs_f,
    })
}

/// Inverts the tensor back to ρ through the expansion over |a⟩⟨f|/⟨f|a⟩.
/// Errors when any overlap is below the singularity floor; build the tensor
/// with [`kd_doubly_extended_perturbed`] if that can happen.
pub fn reconstruct_rho(kd: &KDTensor) -> Result<Operator> {
    let n = kd.dim;
    let overlaps = &kd.basis_f.dagger() * &kd.basis_a;
    for f in 0..n {
        for a in 0..n {
            if overlaps.at(f, a).norm() < tol::OVERLAP_FLOOR {
                return Err(Error::SingularOverlap { f, a });
            }
        }
    }
    let mut entries = vec![C64::new(0.0, 0.0); n * n];
    for a in 0..n {
        for ap in 0..n {
            for f in 0..n {
                let weight = kd.value(a, ap, f) / overlaps.at(f, a);
                // |a⟩⟨f| outer product accumulated entrywise.
                for i in 0..n {
                    let ai = kd.basis_a.at(i, a);
                    for j in 0..n {
                        entries[i * n + j] += weight * ai * kd.basis_f.at(j, f).conj();
                    }
                }
            }
        }
    }
    let sym = Operator::raw(n, entries, OperatorKind::General).symmetrized();
    Operator::density(n, sym.entries().to_vec())
}

/// The conditional distribution q/p_ps restricted to an accepted f-set.
#[derive(Debug, Clone)]
pub struct ConditionalKd {
    dim: usize,
    f_indices: Vec<usize>,
    /// Entries `q[a][a'][f]/p_ps` for f in `f_indices`, laid out (a, a', f).
    values: Vec<C64>,
    eigs_a: Vec<f64>,
    pub p_ps: f64,
}

impl ConditionalKd {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn f_indices(&self) -> &[usize] {
        &self.f_indices
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn value(&self, a: usize, ap: usize, slot: usize) -> C64 {
        self.values[(a * self.dim + ap) * self.f_indices.len() + slot]
    }

    pub fn eigs_a(&self) -> &[f64] {
        &self.eigs_a
    }

    pub fn total(&self) -> C64 {
        self.values.iter().sum()
    }
}

fn validate_ps_indices(kd: &KDTensor, ps_indices: &[usize]) -> Result<Vec<usize>> {
    if ps_indices.is_empty() {
        return Err(Error::InvalidConfig("empty postselection index set".into()));
    }
    let mut sorted = ps_indices.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != ps_indices.len() {
        return Err(Error::InvalidConfig(
            "postselection indices must be distinct".into(),
        ));
    }
    if let Some(&bad) = sorted.iter().find(|&&f| f >= kd.dim) {
        return Err(Error::InvalidConfig(format!(
            "postselection index {bad} out of range for dimension {}",
            kd.dim
        )));
    }
    Ok(sorted)
}

/// Restricts the tensor to the accepted f-set and divides by the
/// postselection probability.
pub fn conditional_kd(kd: &KDTensor, ps_indices: &[usize]) -> Result<ConditionalKd> {
    let f_indices = validate_ps_indices(kd, ps_indices)?;
    let mut p = C64::new(0.0, 0.0);
    for a in 0..kd.dim {
        for ap in 0..kd.dim {
            for &f in &f_indices {
                p += kd.value(a, ap, f);
            }
        }
    }
    let p_ps = p.re;
    if p_ps <= tol::P_PS_FLOOR {
        return Err(Error::VanishingPostselection { p_ps });
    }
    let inv = C64::new(1.0 / p_ps, 0.0);
    let k = f_indices.len();
    let mut values = vec![C64::new(0.0, 0.0); kd.dim * kd.dim * k];
    for a in 0..kd.dim {
        for ap in 0..kd.dim {
            for (slot, &f) in f_indices.iter().enumerate() {
                values[(a * kd.dim + ap) * k + slot] = kd.value(a, ap, f) * inv;
            }
        }
    }
    Ok(ConditionalKd {
        dim: kd.dim,
        f_indices,
        values,
        eigs_a: kd.eigs_a.clone(),
        p_ps,
    })
}

/// Postselected Fisher information in quasiprobability form:
/// 4·Σ (q/p)·a·a' - 4·|Σ (q/p)·a|², summed over the accepted f-set.
pub fn qfi_from_kd(kd: &KDTensor, ps_indices: &[usize]) -> Result<FisherReport> {
    let cond = conditional_kd(kd, ps_indices)?;
    qfi_from_conditional(&cond)
}

pub fn qfi_from_conditional(cond: &ConditionalKd) -> Result<FisherReport> {
    let n = cond.dim;
    let k = cond.f_indices.len();
    let mut weighted_aa = C64::new(0.0, 0.0);
    let mut weighted_a = C64::new(0.0, 0.0);
    for a in 0..n {
        for ap in 0..n {
            let mut sum_f = C64::new(0.0, 0.0);
            for slot in 0..k {
                sum_f += cond.value(a, ap, slot);
            }
            weighted_aa += sum_f * C64::new(cond.eigs_a[a] * cond.eigs_a[ap], 0.0);
            weighted_a += sum_f * C64::new(cond.eigs_a[a], 0.0);
        }
    }
    // Hermitian symmetry makes the first sum real; a residue is a failure.
    if weighted_aa.im.abs() > tol::FISHER_CLAMP {
        return Err(Error::Numerical(format!(
            "imaginary residue {:.3e} in the quasiprobability sum",
            weighted_aa.im
        )));
    }
    let value = 4.0 * weighted_aa.re - 4.0 * weighted_a.norm_sqr();
    FisherReport::clamped(value, FisherMethod::Quasiprobability, None)
}

/// Scans the full tensor.
pub fn negativity(kd: &KDTensor) -> NegativityReport {
    scan_entries(kd.values.iter())
}

/// Scans the conditional distribution q/p_ps over an accepted f-set.
pub fn negativity_conditional(kd: &KDTensor, ps_indices: &[usize]) -> Result<NegativityReport> {
    let cond = conditional_kd(kd, ps_indices)?;
    Ok(scan_entries(cond.values.iter()))
}

/// The weak value ⟨f|a⟩⟨a|Ψ⟩/⟨f|Ψ⟩.
pub fn weak_value(
    a_state: &StateVector,
    f_state: &StateVector,
    psi: &StateVector,
) -> Result<C64> {
    if a_state.dim() != psi.dim() || f_state.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            left: a_state.dim(),
            right: psi.dim(),
        });
    }
    let f_psi = f_state.inner(psi);
    if f_psi.norm() <= tol::OVERLAP_FLOOR {
        return Err(Error::OrthogonalPostselection {
            overlap: f_psi.norm(),
        });
    }
    Ok(f_state.inner(a_state) * a_state.inner(psi) / f_psi)
}

/// For pure ρ the tensor factorizes through the standard distribution:
/// `q[a][a'][f] = q[a][f]·conj(q[a'][f])/p_f`. Returns the largest deviation
/// from that identity, skipping f with p_f ≤ 1e-12.
pub fn pure_factorization_residual(kd: &KDTensor, rho: &Operator) -> Result<f64> {
    let sys = eig_hermitian(rho)?;
    let largest = sys.values()[sys.dim() - 1];
    if largest < 1.0 - 1e-8 {
        return Err(Error::NotPure { largest });
    }
    let marginal = kd.standard_marginal();
    let p_f: Vec<f64> = marginal.f_marginal().iter().map(|p| p.re).collect();
    let mut residual = 0.0f64;
    for f in 0..kd.dim {
        if p_f[f] <= tol::P_PS_FLOOR {
            continue;
        }
        for a in 0..kd.dim {
            for ap in 0..kd.dim {
                let predicted =
                    marginal.value(a, f) * marginal.value(ap, f).conj() / C64::new(p_f[f], 0.0);
                residual = residual.max((kd.value(a, ap, f) - predicted).norm());
            }
        }
    }
    Ok(residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{evolve, haar_state, haar_unitary, random_instance};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn plus_state() -> StateVector {
        let s = 1.0 / 2.0_f64.sqrt();
        StateVector::normalized(vec![c(s, 0.0), c(s, 0.0)]).unwrap()
    }

    fn pauli_x() -> Operator {
        Operator::hermitian(2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap()
    }

    #[test]
    fn commuting_bases_collapse_to_iverson_form() {
        // A and F diagonal in the same basis: only a = a' = f entries survive.
        let a = Operator::from_diagonal(&[-1.0, 1.0, 3.0]).unwrap();
        let f = Operator::from_diagonal(&[0.0, 1.0, 1.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = Operator::pure_density(&haar_state(3, &mut rng)).unwrap();
        let kd = kd_doubly_extended(&rho, &a, &f).unwrap();
        for ai in 0..3 {
            for ap in 0..3 {
                for fi in 0..3 {
                    let q = kd.value(ai, ap, fi);
                    if ai == ap && ap == fi {
                        assert!(q.im.abs() < 1e-12);
                        assert!(q.re > -1e-12);
                    } else {
                        assert!(q.norm() < 1e-12, "({ai},{ap},{fi}) = {q}");
                    }
                }
            }
        }
        assert!(negativity(&kd).is_classical);
    }

    #[test]
    fn plus_state_tensor_by_hand() {
        // ρ = |+⟩⟨+|, A = σz, F = σx: all entries are real with modulus 1/4
        // or 0, enumerable from the amplitude products.
        let a = Operator::from_diagonal(&[1.0, -1.0]).unwrap();
        let f = pauli_x();
        let rho = Operator::pure_density(&plus_state()).unwrap();
        let kd = kd_doubly_extended(&rho, &a, &f).unwrap();
        assert!((kd.total() - c(1.0, 0.0)).norm() < 1e-12);
        for v in kd.values() {
            assert!(v.im.abs() < 1e-12);
        }
        // ⟨a|ρ|a'⟩ = 1/2 for every pair in the σz basis; the |−⟩ row kills
        // half the products, and ⟨f|a⟩⟨a'|f⟩ = ±1/2.
        let plus_f = 1usize; // f-eigenvalues sorted ascending: index 1 is +1.
        let q = kd.value(0, 0, plus_f);
        assert!((q.re - 0.25).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_state_is_classical_in_any_bases() {
        for (dim, seed) in [(2usize, 9u64), (4, 10)] {
            let inst = random_instance(dim, seed, false).unwrap();
            let entries: Vec<C64> = Operator::identity(dim)
                .entries()
                .iter()
                .map(|&e| e * c(1.0 / dim as f64, 0.0))
                .collect();
            let rho = Operator::density(dim, entries).unwrap();
            let kd = kd_doubly_extended(&rho, &inst.generator, &inst.projector).unwrap();
            let report = negativity(&kd);
            assert!(report.is_classical, "dim {dim}: {report:?}");
            assert!((kd.total() - c(1.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn standard_kd_is_the_marginal() {
        let inst = random_instance(4, 21, false).unwrap();
        let rho = evolve(
            &Operator::pure_density(&inst.input_state).unwrap(),
            &inst.generator,
            0.6,
        )
        .unwrap();
        let kd = kd_doubly_extended(&rho, &inst.generator, &inst.projector).unwrap();
        let direct = kd_standard(&rho, &inst.generator, &inst.projector).unwrap();
        let marginal = kd.standard_marginal();
        for a in 0..4 {
            for f in 0..4 {
                assert!((direct.value(a, f) - marginal.value(a, f)).norm() < 1e-12);
            }
        }
        assert!((direct.total() - c(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn standard_kd_is_nonnegative_for_a_diagonal_state() {
        // ρ diagonal in the A-basis: q[a][f] = ρ_aa·|⟨f|a⟩|² ≥ 0.
        let a = Operator::from_diagonal(&[-1.0, 0.5, 2.0]).unwrap();
        let rho = Operator::density(
            3,
            Operator::from_diagonal(&[0.2, 0.3, 0.5]).unwrap().entries().to_vec(),
        )
        .unwrap();
        let f = {
            let mut rng = ChaCha8Rng::seed_from_u64(77);
            haar_projector_for_test(3, 2, &mut rng)
        };
        let kd = kd_standard(&rho, &a, &f).unwrap();
        for v in kd.values() {
            assert!(v.re >= -1e-12 && v.im.abs() < 1e-12, "{v}");
        }
    }

    fn haar_projector_for_test(dim: usize, rank: usize, rng: &mut ChaCha8Rng) -> Operator {
        crate::qcore::haar_projector(dim, rank, rng)
    }

    #[test]
    fn full_acceptance_set_reduces_to_plain_qfi() {
        let inst = random_instance(4, 29, false).unwrap();
        let rho = Operator::pure_density(&inst.input_state).unwrap();
        let kd = kd_doubly_extended(&rho, &inst.generator, &inst.projector).unwrap();
        let all: Vec<usize> = (0..4).collect();
        let from_kd = qfi_from_kd(&kd, &all).unwrap().value;
        let plain = crate::fisher::qfi_pure_generator(&inst.input_state, &inst.generator)
            .unwrap()
            .value;
        assert!((from_kd - plain).abs() < 1e-9 * plain.max(1.0));
    }

    #[test]
    fn standard_kd_sign_by_hand() {
        // ψ = cos(0.3)|0⟩ + sin(0.3)|1⟩, A = σz basis, F = σx basis.
        let (cos, sin) = (0.3f64.cos(), 0.3f64.sin());
        let psi = StateVector::normalized(vec![c(cos, 0.0), c(sin, 0.0)]).unwrap();
        let rho = Operator::pure_density(&psi).unwrap();
        let a = Operator::from_diagonal(&[1.0, -1.0]).unwrap();
        let kd = kd_standard(&rho, &a, &pauli_x()).unwrap();
        let s = 1.0 / 2.0_f64.sqrt();
        // a-basis ascending: index 0 is |1⟩ (eigenvalue -1); f-basis ascending:
        // index 0 is |−⟩. q_{1,−} = ⟨−|1⟩⟨1|ψ⟩⟨ψ|−⟩.
        let by_hand = (-s) * sin * (s * (cos - sin));
        assert!((kd.value(0, 0).re - by_hand).abs() < 1e-12);
        assert!(kd.value(0, 0).re < 0.0, "negative for cos > sin");
    }

    #[test]
    fn reconstruction_round_trips_on_haar_bases() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let ua = haar_unitary(4, &mut rng);
        let a = {
            let d = Operator::from_diagonal(&[0.1, 0.7, 1.3, 2.9]).unwrap();
            (&(&ua * &d) * &ua.dagger()).symmetrized()
        };
        let uf = haar_unitary(4, &mut rng);
        let f = {
            let d = Operator::from_diagonal(&[0.0, 0.4, 1.1, 3.0]).unwrap();
            (&(&uf * &d) * &uf.dagger()).symmetrized()
        };
        let rho = Operator::pure_density(&haar_state(4, &mut rng)).unwrap();
        let kd = kd_doubly_extended(&rho, &a, &f).unwrap();
        let back = reconstruct_rho(&kd).unwrap();
        assert!(back.max_abs_diff(&rho) < 1e-8);
    }

    #[test]
    fn mutually_unbiased_bases_reconstruct_exactly() {
        let a = Operator::from_diagonal(&[1.0, -1.0]).unwrap();
        let rho = Operator::pure_density(&plus_state()).unwrap();
        let kd = kd_doubly_extended(&rho, &a, &pauli_x()).unwrap();
        let back = reconstruct_rho(&kd).unwrap();
        assert!(back.max_abs_diff(&rho) < 1e-10);
    }

    #[test]
    fn shared_basis_needs_perturbation_to_reconstruct() {
        let a = Operator::from_diagonal(&[0.0, 1.0]).unwrap();
        let f = Operator::from_diagonal(&[0.0, 1.0]).unwrap();
        let rho = Operator::pure_density(&plus_state()).unwrap();
        let kd = kd_doubly_extended(&rho, &a, &f).unwrap();
        assert!(matches!(
            reconstruct_rho(&kd),
            Err(Error::SingularOverlap { .. })
        ));
        let kd = kd_doubly_extended_perturbed(&rho, &a, &f, 5).unwrap();
        let back = reconstruct_rho(&kd).unwrap();
        assert!(back.max_abs_diff(&rho) < 1e-7);
    }

    #[test]
    fn conditional_distribution_normalizes() {
        let inst = random_instance(3, 17, false).unwrap();
        let rho = Operator::pure_density(&inst.input_state).unwrap();
        let kd = kd_doubly_extended(&rho, &inst.generator, &inst.projector).unwrap();
        let all: Vec<usize> = (0..3).collect();
        let cond = conditional_kd(&kd, &all).unwrap();
        assert!((cond.p_ps - 1.0).abs() < 1e-10);
        assert!((cond.total() - c(1.0, 0.0)).norm() < 1e-9);

        let accepted = kd.projector_indices();
        let cond = conditional_kd(&kd, &accepted).unwrap();
        assert!((cond.total() - c(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn commuting_conditional_entries_are_the_proof_probabilities() {
        // With [A, F] = 0 the conditional tensor collapses onto diagonal
        // weights q_a = ⟨a|ρθ F|a⟩ / p_ps.
        let inst = random_instance(4, 23, true).unwrap();
        let rho = evolve(
            &Operator::pure_density(&inst.input_state).unwrap(),
            &inst.generator,
            0.51,
        )
        .unwrap();
        let kd = kd_doubly_extended(&rho, &inst.generator, &inst.projector).unwrap();
        let accepted = kd.projector_indices();
        let cond = conditional_kd(&kd, &accepted).unwrap();

        let v = kd.basis_a();
        let rho_f_in_a = &(&v.dagger() * &(&rho * &inst.projector)) * v;
        for a in 0..4 {
            let expected = rho_f_in_a.at(a, a).re / cond.p_ps;
            let mut summed = c(0.0, 0.0);
            for slot in 0..accepted.len() {
                summed += cond.value(a, a, slot);
            }
            assert!(
                (summed.re - expected).abs() < 1e-10 && summed.im.abs() < 1e-10,
                "a = {a}: {summed} vs {expected}"
            );
        }
    }

    #[test]
    fn weak_value_examples() {
        let psi = plus_state();
        let wv = weak_value(&psi, &psi, &psi).unwrap();
        assert!((wv - c(1.0, 0.0)).norm() < 1e-12);

        let zero = StateVector::basis_state(2, 0);
        let wv = weak_value(&zero, &plus_state(), &plus_state()).unwrap();
        assert!((wv - c(0.5, 0.0)).norm() < 1e-12);

        // Anomalous weak value beyond the spectrum of |0⟩⟨0|.
        let (cos, sin) = (0.7f64.cos(), 0.7f64.sin());
        let psi = StateVector::normalized(vec![c(cos, 0.0), c(sin, 0.0)]).unwrap();
        let s = 1.0 / 2.0_f64.sqrt();
        let minus = StateVector::normalized(vec![c(s, 0.0), c(-s, 0.0)]).unwrap();
        let wv = weak_value(&zero, &minus, &psi).unwrap();
        let expected = cos / (cos - sin);
        assert!((wv.re - expected).abs() < 1e-12);
        assert!(wv.re > 1.0);

        let orth = weak_value(&zero, &minus, &plus_state());
        assert!(matches!(orth, Err(Error::OrthogonalPostselection { .. })));
    }

    #[test]
    fn pure_factorization_residual_vanishes_for_pure_states() {
        let a = Operator::from_diagonal(&[1.0, -1.0]).unwrap();
        let rho = Operator::pure_density(&plus_state()).unwrap();
        let kd = kd_doubly_extended(&rho, &a, &pauli_x()).unwrap();
        assert!(pure_factorization_residual(&kd, &rho).unwrap() < 1e-12);

        let mixed =
            Operator::density(2, vec![c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)])
                .unwrap();
        let kd = kd_doubly_extended(&mixed, &a, &pauli_x()).unwrap();
        assert!(matches!(
            pure_factorization_residual(&kd, &mixed),
            Err(Error::NotPure { .. })
        ));
    }

    #[test]
    fn csv_export_has_exact_header() {
        let a = Operator::from_diagonal(&[0.0, 1.0]).unwrap();
        let rho = Operator::pure_density(&plus_state()).unwrap();
        let kd = kd_doubly_extended(&rho, &a, &pauli_x()).unwrap();
        let mut buf = Vec::new();
        kd.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "a_index,ap_index,f_index,a_value,ap_value,re_q,im_q"
        );
        assert_eq!(lines.count(), 8);
    }
}
