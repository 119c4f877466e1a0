//! Correlation measures: negativity, purity, Schmidt and operator-Schmidt
//! (Hilbert–Schmidt) spectra, and local energies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::full::FullState;
use crate::ladder::{LadderState, OscillatorSpec};
use crate::linops::{hermitian_eigenvalues_blocked, singular_values, CMatrix};

/// Relative cutoff below which a singular value counts as zero.
pub const RANK_TOL: f64 = 1e-10;

/// Default residual for the effective HS-rank.
pub const DEFAULT_EPS: f64 = 0.01;

/// Partial transpose on the first subsystem.
pub fn partial_transpose(fs: &FullState) -> CMatrix {
    let (n1, n2) = (fs.n1, fs.n2);
    let mut out = CMatrix::zeros(n1 * n2, n1 * n2);
    for i in 0..n1 {
        for j in 0..n1 {
            for k in 0..n2 {
                for l in 0..n2 {
                    out[(j * n2 + k, i * n2 + l)] = fs.rho[(i * n2 + k, j * n2 + l)];
                }
            }
        }
    }
    out
}

/// Sum of the magnitudes of the negative eigenvalues of the partial
/// transpose.
pub fn negativity_full(fs: &FullState) -> Result<f64> {
    let ev = hermitian_eigenvalues_blocked(&partial_transpose(fs))?;
    Ok(ev.iter().filter(|&&x| x < 0.0).map(|x| -x).sum())
}

/// `Σ_{m<n} |ρ_mn|`, exact for Schmidt-correlated states.
pub fn negativity_ladder(ls: &LadderState) -> f64 {
    let d = ls.dim();
    let mut sum = 0.0;
    for i in 0..d {
        for j in i + 1..d {
            sum += ls.rho[(i, j)].norm();
        }
    }
    sum
}

/// `Tr ρ²`.
pub fn purity(rho: &CMatrix) -> f64 {
    // Tr ρ² = Σ |ρ_ij|² for Hermitian ρ
    rho.as_slice().iter().map(|z| z.norm_sqr()).sum()
}

/// Schmidt data of a pure bipartite state given by its coefficient matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtData {
    pub sigmas: Vec<f64>,
    pub rank: usize,
    /// `(Σσ²)² / Σσ⁴`.
    pub participation: f64,
}

/// Schmidt rank and participation number of `Σ C_ij |i⟩|j⟩`.
pub fn schmidt_rank_pure(c: &CMatrix, tol: f64) -> Result<SchmidtData> {
    let sigmas = singular_values(c);
    if sigmas.first().is_none_or(|&s| s == 0.0) {
        return Err(Error::InvalidSpec("zero coefficient matrix".into()));
    }
    let rank = count_above(&sigmas, tol);
    let participation = participation(&sigmas);
    Ok(SchmidtData { sigmas, rank, participation })
}

fn count_above(sigmas: &[f64], tol: f64) -> usize {
    let cut = tol * sigmas.first().copied().unwrap_or(0.0);
    sigmas.iter().filter(|&&s| s > cut).count()
}

fn participation(sigmas: &[f64]) -> f64 {
    let s2: f64 = sigmas.iter().map(|s| s * s).sum();
    let s4: f64 = sigmas.iter().map(|s| s.powi(4)).sum();
    s2 * s2 / s4
}

/// Operator-Schmidt coefficients of a density operator viewed as a vector
/// in Hilbert–Schmidt space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HsSpectrum {
    /// Descending.
    pub sigmas: Vec<f64>,
    /// `√(Σσ²) = √Tr ρ²`.
    pub hs_norm: f64,
}

impl HsSpectrum {
    fn from_sigmas(mut sigmas: Vec<f64>) -> Self {
        sigmas.sort_unstable_by(|a, b| b.total_cmp(a));
        let hs_norm = sigmas.iter().map(|s| s * s).sum::<f64>().sqrt();
        Self { sigmas, hs_norm }
    }

    /// Number of coefficients above `tol · σ₁`.
    pub fn rank(&self, tol: f64) -> usize {
        count_above(&self.sigmas, tol)
    }
}

/// For a ladder state the reshaped superket has a single nonzero entry
/// `ρ_mn` per row `(m, n)` and column `(l_m, l_n)`, so its singular values
/// are the magnitudes `|ρ_mn|`.
pub fn hs_spectrum_ladder(ls: &LadderState) -> HsSpectrum {
    HsSpectrum::from_sigmas(ls.rho.as_slice().iter().map(|z| z.norm()).collect())
}

/// Dense operator-Schmidt decomposition: singular values of
/// `M[(i,j),(k,l)] = ρ[(i·n2+k),(j·n2+l)]`.
pub fn hs_spectrum_full(fs: &FullState) -> HsSpectrum {
    let m = hs_reshape(&fs.rho, fs.n1, fs.n2);
    HsSpectrum::from_sigmas(singular_values(&m))
}

/// Rearranges `ρ` so that rows index operators on the first subsystem and
/// columns operators on the second.
pub fn hs_reshape(rho: &CMatrix, n1: usize, n2: usize) -> CMatrix {
    CMatrix::from_fn(n1 * n1, n2 * n2, |row, col| {
        let (i, j) = (row / n1, row % n1);
        let (k, l) = (col / n2, col % n2);
        rho[(i * n2 + k, j * n2 + l)]
    })
}

/// `(Σσ²)² / Σσ⁴`, i.e. the participation number of the normalized superket.
pub fn hs_participation(spec: &HsSpectrum) -> Result<f64> {
    if !(spec.hs_norm > 0.0) {
        return Err(Error::InvalidSpec("HS spectrum is zero".into()));
    }
    Ok(participation(&spec.sigmas))
}

/// Smallest `n ≥ 1` with `√(Σ_{i>n} σᵢ²) / hs_norm < eps`.
pub fn effective_hs_rank(spec: &HsSpectrum, eps: f64) -> usize {
    effective_rank(&spec.sigmas, eps)
}

/// Smallest number of leading coefficients of a descending spectrum whose
/// discarded tail has relative 2-norm below `eps`; 0 for a zero spectrum.
pub fn effective_rank(sigmas: &[f64], eps: f64) -> usize {
    let norm2: f64 = sigmas.iter().map(|s| s * s).sum();
    if !(norm2 > 0.0) {
        return 0;
    }
    let limit = eps * eps * norm2;
    // tail sums from the small end to avoid cancellation
    let mut tail = 0.0;
    let mut n = sigmas.len();
    while n > 1 {
        let next = tail + sigmas[n - 1].powi(2);
        if next >= limit {
            break;
        }
        tail = next;
        n -= 1;
    }
    n
}

/// `(ω₁ Σ m ρ_mm, ω₂ Σ l_m ρ_mm)`.
pub fn local_energies(ls: &LadderState, osc: &OscillatorSpec) -> (f64, f64) {
    let lad = &ls.ladder;
    let (mut e1, mut e2) = (0.0, 0.0);
    for i in 0..ls.dim() {
        let p = ls.rho[(i, i)].re;
        e1 += lad.m_values[i] as f64 * p;
        e2 += lad.l_values[i] as f64 * p;
    }
    (osc.omega1 * e1, osc.omega2 * e2)
}

/// All measures at one trajectory sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRecord {
    pub t: f64,
    pub negativity: f64,
    pub purity: f64,
    pub hs_participation: f64,
    pub effective_hs_rank: usize,
    pub energy1: f64,
    pub energy2: f64,
}

impl CorrelationRecord {
    pub fn from_state(t: f64, ls: &LadderState, osc: &OscillatorSpec, eps: f64) -> Result<Self> {
        let spec = hs_spectrum_ladder(ls);
        let (energy1, energy2) = local_energies(ls, osc);
        Ok(Self {
            t,
            negativity: negativity_ladder(ls),
            purity: purity(&ls.rho),
            hs_participation: hs_participation(&spec)?,
            effective_hs_rank: effective_hs_rank(&spec, eps),
            energy1,
            energy2,
        })
    }
}
