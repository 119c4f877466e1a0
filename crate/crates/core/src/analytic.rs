//! Closed-form limits: bath-only dynamics, the single dephased oscillator,
//! the isolated linear (beam-splitter) coupling, and the width of the
//! interaction-dominated band around the diagonal.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ladder::{
    build_ladder, dephasing_exponent, BathKind, BathSpec, InteractionKind, InteractionSpec,
    LadderState, OscillatorSpec,
};
use crate::linops::CMatrix;

/// Bath-only evolution of the maximally correlated state on the
/// band-limited ladder `l = k − m`: `ρ_mn(t) = e^{−z_mn t} / (k+1)`.
///
/// The free Hamiltonian phase `e^{−i(E_m − E_n)t}` vanishes when
/// `ω₁ = ω₂`; otherwise it is included.
pub fn bath_driven_state(
    t: f64,
    k: u32,
    osc: &OscillatorSpec,
    bath: &BathSpec,
) -> Result<LadderState> {
    check_time(t)?;
    osc.validate()?;
    bath.validate()?;
    let lad = build_ladder(k, &InteractionSpec::band_limited(0.0))?;
    let d = lad.len();
    let norm = 1.0 / d as f64;
    let rho = CMatrix::from_fn(d, d, |i, j| {
        let (mi, mj) = (lad.m_values[i] as i64, lad.m_values[j] as i64);
        let (li, lj) = (lad.l_values[i] as i64, lad.l_values[j] as i64);
        let z = dephasing_exponent(osc, bath, mi - mj, li - lj);
        let de = osc.omega1 * (mi - mj) as f64 + osc.omega2 * (li - lj) as f64;
        (C64::new(0.0, -de * t) - z * t).exp() * norm
    });
    LadderState::new(lad, rho)
}

/// `Σ_{m<n} |ρ_mn(t)|` of [`bath_driven_state`].
pub fn bath_driven_negativity(
    t: f64,
    k: u32,
    osc: &OscillatorSpec,
    bath: &BathSpec,
) -> Result<f64> {
    check_time(t)?;
    osc.validate()?;
    bath.validate()?;
    let norm = 1.0 / (k + 1) as f64;
    let mut sum = 0.0;
    for m in 0..=k as i64 {
        for n in m + 1..=k as i64 {
            // l = k − m, so Δl = −Δm
            let z = dephasing_exponent(osc, bath, m - n, n - m);
            sum += (-z.re * t).exp();
        }
    }
    Ok(norm * sum)
}

/// Propagator factor of the element `|m⟩⟨n|` of a single dephased
/// oscillator: `e^{−iω_mn t − Γω_mn² t}` (Gaussian) or
/// `e^{−iω_mn t + Γ(e^{−iω_mn φ} − 1)t}` (Poissonian), with `ω_mn = ω(m − n)`.
pub fn single_oscillator_element(
    t: f64,
    m: u32,
    n: u32,
    omega: f64,
    kind: BathKind,
    gamma: f64,
    phi: f64,
) -> C64 {
    let w = omega * (m as f64 - n as f64);
    let decay = match kind {
        BathKind::Gaussian => C64::new(gamma * w * w, 0.0),
        BathKind::Poissonian => (C64::new(1.0, 0.0) - C64::from_polar(1.0, -w * phi)) * gamma,
    };
    (C64::new(0.0, -w * t) - decay * t).exp()
}

/// `ln C(k, n)`, accumulated as a sum of logarithms.
fn ln_binomial(k: u32, n: u32) -> f64 {
    let n = n.min(k - n);
    (1..=n).map(|i| ((k - n + i) as f64 / i as f64).ln()).sum()
}

fn binomial(k: u32, n: u32) -> f64 {
    if k > 30 {
        return ln_binomial(k, n).exp();
    }
    let n = n.min(k - n) as u64;
    let mut c: u64 = 1;
    for i in 1..=n {
        c = c * (k as u64 - n + i) / i;
    }
    c as f64
}

/// Amplitudes `c_n(t)` of `|n, k−n⟩` for the isolated linear coupling
/// `γ(a₁†a₂ + a₂†a₁)` started from `|k, 0⟩`, with `ω₁ = ω₂ = ω`:
/// `c_n = √C(k,n) cos^n(γt) (−i sin γt)^{k−n} e^{−iωkt}`.
pub fn isolated_linear_state(t: f64, k: u32, omega: f64, gamma: f64) -> Vec<C64> {
    let (s, c) = (gamma * t).sin_cos();
    let global = C64::from_polar(1.0, -omega * k as f64 * t);
    let minus_i = C64::new(0.0, -1.0);
    (0..=k)
        .map(|n| {
            let mag = binomial(k, n).sqrt() * c.powi(n as i32) * s.powi((k - n) as i32);
            minus_i.powu(k - n) * global * mag
        })
        .collect()
}

/// `½((Σ|c_n|)² − 1)`, the negativity of a pure Schmidt-form state.
pub fn pure_state_negativity(coeffs: &[C64]) -> f64 {
    let l1: f64 = coeffs.iter().map(|c| c.norm()).sum();
    0.5 * (l1 * l1 - 1.0)
}

/// Estimated effective Schmidt rank `√k` of the isolated linear state at
/// `t = π/4γ`.
pub fn isolated_linear_schmidt_width(k: u32) -> f64 {
    (k as f64).sqrt()
}

/// Width `Δ = 2|m − n|` of the band in which the interaction dominates
/// the dephasing, per diagonal position.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WidthProfile {
    pub k: u32,
    /// Ladder `m` values the widths refer to.
    pub m_values: Vec<u32>,
    pub widths: Vec<f64>,
    /// Closed-form upper bound on the widths, where one is known.
    pub bound: Option<f64>,
}

impl WidthProfile {
    pub fn max_width(&self) -> f64 {
        self.widths.iter().copied().fold(0.0, f64::max)
    }
}

/// Solves the interaction-vs-dephasing boundary equation.
///
/// `gamma_over_gamma` is `γ/(Γω²)`. For the band-limited coupling the width
/// is `√(2γ/Γ)` everywhere. For the nonlinear coupling the bracket
/// `(k−m)^r m^s + n^s (k−n)^r` is evaluated at `n = m`, giving
/// `(m−n)² = (γ/2Γ)(r/s)^{r/2} √(2(k−m)^r m^s) / 2`.
pub fn width_boundary(
    k: u32,
    gamma_over_gamma: f64,
    inter: &InteractionSpec,
) -> Result<WidthProfile> {
    if !(gamma_over_gamma > 0.0 && gamma_over_gamma.is_finite()) {
        return Err(Error::InvalidSpec(format!("γ/Γ must be positive, got {gamma_over_gamma}")));
    }
    let lad = build_ladder(k, inter)?;
    let g = gamma_over_gamma;
    let (widths, bound) = match inter.kind {
        InteractionKind::BandLimited => (vec![(2.0 * g).sqrt(); lad.len()], Some((2.0 * g).sqrt())),
        InteractionKind::Nonlinear => {
            let (r, s) = (inter.r as i32, inter.s as i32);
            let pref = 0.5 * g * (r as f64 / s as f64).powf(r as f64 / 2.0);
            let widths = lad
                .m_values
                .iter()
                .map(|&m| {
                    let bracket = 2.0 * ((k - m) as f64).powi(r) * (m as f64).powi(s);
                    2.0 * (pref * bracket.sqrt() / 2.0).sqrt()
                })
                .collect();
            let kf = k as f64;
            let bound = match (r, s) {
                (1, 1) => Some(2f64.powf(0.75) * (g * kf).sqrt()),
                (1, 2) => Some(g.sqrt() * kf.powf(0.75)),
                _ => None,
            };
            (widths, bound)
        }
    };
    Ok(WidthProfile { k, m_values: lad.m_values, widths, bound })
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("time must be finite and non-negative, got {t}")))
    }
}
