//! The conserved-charge ("ladder") representation of two coupled oscillators.
//!
//! Both interactions conserve an additive charge (`m + l` for the band-limited
//! hopping, `r·m + s·l` for the nonlinear coupling) that the local dephasing
//! baths also conserve. Starting from `|k, 0⟩` the state therefore stays in
//! the span of the product states `|m, l_m⟩` sharing that charge, and the
//! density operator is fully described by a `d × d` coefficient matrix
//! `ρ_mn` in the `|m l_m⟩⟨n l_n|` basis, with `d` the ladder length.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linops::{hermitian_eigenvalues, CMatrix};

/// Pure-dephasing bath model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BathKind {
    /// Double-commutator dissipator `[H, [H, ρ]]`.
    Gaussian,
    /// Random phase kicks: `ρ − e^{−iφH} ρ e^{iφH}`.
    Poissonian,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    pub kind: BathKind,
    pub gamma1: f64,
    pub gamma2: f64,
    /// Kick phase; only used by the Poissonian model.
    #[serde(default)]
    pub phi: f64,
}

impl BathSpec {
    pub fn gaussian(gamma1: f64, gamma2: f64) -> Self {
        Self { kind: BathKind::Gaussian, gamma1, gamma2, phi: 0.0 }
    }

    pub fn poissonian(gamma1: f64, gamma2: f64, phi: f64) -> Self {
        Self { kind: BathKind::Poissonian, gamma1, gamma2, phi }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma1 >= 0.0
            && self.gamma2 >= 0.0
            && self.gamma1.is_finite()
            && self.gamma2.is_finite())
        {
            return Err(Error::InvalidSpec(format!(
                "bath rates must be finite and non-negative, got Γ₁={} Γ₂={}",
                self.gamma1, self.gamma2
            )));
        }
        if !self.phi.is_finite() {
            return Err(Error::InvalidSpec(format!("kick phase must be finite, got {}", self.phi)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InteractionKind {
    /// `A₁†A₂ + A₂†A₁` with unit-amplitude shift operators.
    BandLimited,
    /// `(a₁†)^s (a₂)^r + h.c.`
    Nonlinear,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionSpec {
    pub kind: InteractionKind,
    /// Coupling strength γ.
    pub gamma: f64,
    #[serde(default = "one")]
    pub r: u32,
    #[serde(default = "one")]
    pub s: u32,
}

fn one() -> u32 {
    1
}

impl InteractionSpec {
    pub fn band_limited(gamma: f64) -> Self {
        Self { kind: InteractionKind::BandLimited, gamma, r: 1, s: 1 }
    }

    pub fn nonlinear(gamma: f64, r: u32, s: u32) -> Self {
        Self { kind: InteractionKind::Nonlinear, gamma, r, s }
    }

    /// Weights `(r, s)` of the conserved charge `r·m + s·l`.
    pub fn charge_weights(&self) -> (u32, u32) {
        match self.kind {
            InteractionKind::BandLimited => (1, 1),
            InteractionKind::Nonlinear => (self.r, self.s),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "coupling must be finite and non-negative, got {}",
                self.gamma
            )));
        }
        if self.r == 0 || self.s == 0 {
            return Err(Error::InvalidSpec(format!(
                "exponents must be positive, got r={} s={}",
                self.r, self.s
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillatorSpec {
    pub omega1: f64,
    pub omega2: f64,
}

impl OscillatorSpec {
    pub fn new(omega1: f64, omega2: f64) -> Self {
        Self { omega1, omega2 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega1 > 0.0
            && self.omega2 > 0.0
            && self.omega1.is_finite()
            && self.omega2.is_finite())
        {
            return Err(Error::InvalidSpec(format!(
                "frequencies must be positive, got ω₁={} ω₂={}",
                self.omega1, self.omega2
            )));
        }
        Ok(())
    }
}

/// Product states `|m, l_m⟩` sharing the charge of `|k, 0⟩`, ascending in `m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ladder {
    pub k: u32,
    pub m_values: Vec<u32>,
    pub l_values: Vec<u32>,
    pub interaction: InteractionKind,
    pub r: u32,
    pub s: u32,
}

impl Ladder {
    pub fn len(&self) -> usize {
        self.m_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m_values.is_empty()
    }

    /// Conserved charge `r·m + s·l`, identical for every ladder entry.
    pub fn charge(&self) -> u64 {
        self.r as u64 * self.m_values[0] as u64 + self.s as u64 * self.l_values[0] as u64
    }

    /// Ladder index of the entry with oscillator-1 number `m`.
    pub fn position(&self, m: u32) -> Option<usize> {
        self.m_values.binary_search(&m).ok()
    }

    pub fn max_m(&self) -> u32 {
        *self.m_values.iter().max().unwrap_or(&0)
    }

    pub fn max_l(&self) -> u32 {
        *self.l_values.iter().max().unwrap_or(&0)
    }
}

/// Enumerates the ladder reached from `|k, 0⟩`.
///
/// The nonlinear coupling moves `(m, l) → (m − s, l + r)`, so the ladder is
/// `m = k − j·s`, `l = j·r`. For coprime `(r, s)` this is exactly the set of
/// `m ≤ k` with `s | r(k − m)`.
pub fn build_ladder(k: u32, inter: &InteractionSpec) -> Result<Ladder> {
    if k < 1 {
        return Err(Error::InvalidSpec("k must be at least 1".into()));
    }
    inter.validate()?;
    let (r, s) = inter.charge_weights();
    let mut pairs: Vec<(u32, u32)> = (0..=k / s).map(|j| (k - j * s, j * r)).collect();
    pairs.sort_unstable();
    assert!(!pairs.is_empty());
    let (m_values, l_values) = pairs.into_iter().unzip();
    Ok(Ladder { k, m_values, l_values, interaction: inter.kind, r, s })
}

/// `∏_{p=1}^{s} (m+p) · ∏_{q=0}^{r−1} (l−q)`, the squared matrix element of
/// `(a₁†)^s (a₂)^r` between `|m, l⟩` and `|m+s, l−r⟩`, in exact integers.
pub fn nonlinear_element_squared(m: u32, l: u32, r: u32, s: u32) -> u128 {
    let up: u128 = (1..=s as u128).map(|p| m as u128 + p).product();
    let down: u128 = (0..r as u128).map(|q| (l as u128).saturating_sub(q)).product();
    up * down
}

/// Generators of the ladder dynamics: `dρ/dt = −i[h_eff, ρ] − deph ∘ ρ`.
#[derive(Clone, Debug, PartialEq)]
pub struct LadderGenerators {
    pub h_eff: CMatrix,
    /// Element-wise decay exponents `z_mn`; zero on the diagonal, `Re ≥ 0`.
    pub deph: CMatrix,
}

/// Element-wise dephasing exponent for a coherence between local energy
/// differences `dm = m − n` and `dl = l_m − l_n`.
pub fn dephasing_exponent(osc: &OscillatorSpec, bath: &BathSpec, dm: i64, dl: i64) -> C64 {
    let (dm, dl) = (dm as f64, dl as f64);
    match bath.kind {
        BathKind::Gaussian => C64::new(
            bath.gamma1 * (osc.omega1 * dm).powi(2) + bath.gamma2 * (osc.omega2 * dl).powi(2),
            0.0,
        ),
        BathKind::Poissonian => {
            let one = C64::new(1.0, 0.0);
            (one - C64::from_polar(1.0, -osc.omega1 * dm * bath.phi)) * bath.gamma1
                + (one - C64::from_polar(1.0, -osc.omega2 * dl * bath.phi)) * bath.gamma2
        }
    }
}

/// Builds `h_eff` and the dephasing exponents on `lad`.
///
/// `bath = None` means an isolated system.
pub fn build_generators(
    lad: &Ladder,
    osc: &OscillatorSpec,
    bath: Option<&BathSpec>,
    inter: &InteractionSpec,
) -> Result<LadderGenerators> {
    osc.validate()?;
    inter.validate()?;
    if let Some(b) = bath {
        b.validate()?;
    }
    if inter.kind != lad.interaction || inter.charge_weights() != (lad.r, lad.s) {
        return Err(Error::InvalidSpec(
            "interaction does not match the ladder it is applied to".into(),
        ));
    }
    let d = lad.len();
    let mut h = CMatrix::zeros(d, d);
    for i in 0..d {
        let (m, l) = (lad.m_values[i], lad.l_values[i]);
        h[(i, i)] = C64::new(osc.omega1 * m as f64 + osc.omega2 * l as f64, 0.0);
    }
    // Entries are ascending in m and consecutive ones differ by one quantum
    // of the interaction, so the coupling sits on the first off-diagonal.
    for i in 0..d.saturating_sub(1) {
        let (m, l) = (lad.m_values[i], lad.l_values[i]);
        let amp = match inter.kind {
            InteractionKind::BandLimited => 1.0,
            InteractionKind::Nonlinear => {
                (nonlinear_element_squared(m, l, inter.r, inter.s) as f64).sqrt()
            }
        };
        let v = C64::new(inter.gamma * amp, 0.0);
        h[(i, i + 1)] = v;
        h[(i + 1, i)] = v;
    }
    let deph = match bath {
        None => CMatrix::zeros(d, d),
        Some(b) => CMatrix::from_fn(d, d, |i, j| {
            let dm = lad.m_values[i] as i64 - lad.m_values[j] as i64;
            let dl = lad.l_values[i] as i64 - lad.l_values[j] as i64;
            dephasing_exponent(osc, b, dm, dl)
        }),
    };
    Ok(LadderGenerators { h_eff: h, deph })
}

/// Density operator restricted to a ladder.
#[derive(Clone, Debug, PartialEq)]
pub struct LadderState {
    pub ladder: Ladder,
    pub rho: CMatrix,
}

/// Tolerances used by [`LadderState::check`].
pub const STATE_TOL: f64 = 1e-9;

impl LadderState {
    pub fn new(ladder: Ladder, rho: CMatrix) -> Result<Self> {
        if rho.rows() != ladder.len() || !rho.is_square() {
            return Err(Error::Dimension(format!(
                "ladder of length {} cannot hold a {}x{} matrix",
                ladder.len(),
                rho.rows(),
                rho.cols()
            )));
        }
        Ok(Self { ladder, rho })
    }

    pub fn dim(&self) -> usize {
        self.ladder.len()
    }

    /// Verifies Hermiticity, unit trace and positivity to `tol`.
    pub fn check(&self, tol: f64) -> Result<()> {
        check_density(&self.rho, tol, tol)
    }
}

pub(crate) fn check_density(rho: &CMatrix, herm_tol: f64, eig_tol: f64) -> Result<()> {
    let defect = rho.hermitian_defect();
    if defect > herm_tol {
        return Err(Error::Integrity { t: f64::NAN, what: "hermiticity defect", value: defect });
    }
    let tr = rho.trace();
    if (tr - 1.0).norm() > herm_tol {
        return Err(Error::Integrity {
            t: f64::NAN,
            what: "trace error",
            value: (tr - 1.0).norm(),
        });
    }
    let min = hermitian_eigenvalues(&rho.hermitian_part())?[0];
    if min < -eig_tol {
        return Err(Error::Integrity { t: f64::NAN, what: "minimum eigenvalue", value: min });
    }
    Ok(())
}

/// The product state `|k, 0⟩⟨k, 0|`.
pub fn initial_state(lad: &Ladder) -> Result<LadderState> {
    let i = lad
        .position(lad.k)
        .filter(|&i| lad.l_values[i] == 0)
        .ok_or_else(|| Error::InvalidSpec("ladder does not contain |k, 0⟩".into()))?;
    let mut rho = CMatrix::zeros(lad.len(), lad.len());
    rho[(i, i)] = C64::new(1.0, 0.0);
    LadderState::new(lad.clone(), rho)
}

/// `|ψ⟩ = (k+1)^{-1/2} Σ_n |n⟩|k−n⟩`, defined for the band-limited ladder.
pub fn maximally_correlated_state(lad: &Ladder) -> Result<LadderState> {
    if lad.interaction != InteractionKind::BandLimited {
        return Err(Error::Unsupported(
            "the maximally correlated initial state is defined on the band-limited ladder only"
                .into(),
        ));
    }
    let d = lad.len();
    let rho = CMatrix::from_fn(d, d, |_, _| C64::new(1.0 / d as f64, 0.0));
    LadderState::new(lad.clone(), rho)
}
