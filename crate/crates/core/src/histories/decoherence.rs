use nalgebra::DMatrix;

use super::family::{Branch, HistoryFamily};
use crate::hilbert::C64;

/// Gram matrix `D(α, β) = ⟨C_β Ψ | C_α Ψ⟩` over every branch of a family.
#[derive(Clone, Debug)]
pub struct DecoherenceMatrix {
    branches: Vec<Branch>,
    entries: DMatrix<C64>,
}

impl DecoherenceMatrix {
    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn get(&self, alpha: usize, beta: usize) -> C64 {
        self.entries[(alpha, beta)]
    }

    /// Diagonal entries, the branch weights.
    pub fn weights(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.entries[(i, i)].re).collect()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        (&self.entries - self.entries.adjoint()).norm()
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let hermitian = (&self.entries + self.entries.adjoint()).scale(0.5);
        hermitian
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Sum over all entries; equals `⟨Ψ|Ψ⟩` when every sample space is complete.
    pub fn total(&self) -> C64 {
        self.entries.iter().sum()
    }

    /// Largest off-diagonal modulus and where it occurs.
    pub fn max_offdiagonal(&self) -> (f64, Option<(usize, usize)>) {
        let mut worst = (0.0, None);
        for a in 0..self.len() {
            for b in (a + 1)..self.len() {
                let m = self.entries[(a, b)].norm();
                if m > worst.0 {
                    worst = (m, Some((a, b)));
                }
            }
        }
        worst
    }
}

pub fn decoherence_functional(fam: &HistoryFamily) -> DecoherenceMatrix {
    let chains = fam.chain_vectors();
    let n = chains.len();
    let entries = DMatrix::from_fn(n, n, |a, b| {
        chains[b].1.amplitudes().dotc(chains[a].1.amplitudes())
    });
    DecoherenceMatrix {
        branches: chains.into_iter().map(|(b, _)| b).collect(),
        entries,
    }
}

/// Medium consistency: every off-diagonal entry, real and imaginary part,
/// within `tolerance` of zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ConsistencyVerdict {
    pub consistent: bool,
    pub max_offdiagonal: f64,
    pub tolerance: f64,
    pub worst_pair: Option<(Branch, Branch)>,
}

pub fn check_consistency(fam: &HistoryFamily, tol: f64) -> ConsistencyVerdict {
    verdict(&decoherence_functional(fam), tol)
}

pub(crate) fn verdict(d: &DecoherenceMatrix, tol: f64) -> ConsistencyVerdict {
    let (max_offdiagonal, at) = d.max_offdiagonal();
    ConsistencyVerdict {
        consistent: max_offdiagonal <= tol,
        max_offdiagonal,
        tolerance: tol,
        worst_pair: at.map(|(a, b)| (d.branches[a].clone(), d.branches[b].clone())),
    }
}
