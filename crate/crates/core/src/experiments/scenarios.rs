use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{bath_driven_state, isolated_linear_state, width_boundary, WidthProfile};
use crate::error::{Error, Result};
use crate::evolve::{evolve_full, evolve_ladder, TimeGrid, Tolerances, Trajectory};
use crate::full::{build_full_rhs, embed, full_dims, project};
use crate::ladder::{
    build_generators, build_ladder, initial_state, maximally_correlated_state, BathKind, BathSpec,
    InteractionKind, InteractionSpec, LadderState, OscillatorSpec,
};
use crate::linops::{hermitian_eigenvalues, CMatrix};
use crate::measures::{CorrelationRecord, DEFAULT_EPS};

/// Samples per trajectory unless overridden.
pub const DEFAULT_SAMPLES: usize = 600;

/// Built-in scenario names: bath type (`G`aussian, `P`oissonian, none)
/// crossed with the interaction (`A` band-limited, `B1` linear, `B2`
/// second-harmonic), plus the two bath-only relaxations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScenarioName {
    AG,
    AP,
    A,
    BG1,
    BP1,
    B1,
    BG2,
    BP2,
    B2,
    BathOnlyG,
    BathOnlyP,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 11] = [
        ScenarioName::AG,
        ScenarioName::AP,
        ScenarioName::A,
        ScenarioName::BG1,
        ScenarioName::BP1,
        ScenarioName::B1,
        ScenarioName::BG2,
        ScenarioName::BP2,
        ScenarioName::B2,
        ScenarioName::BathOnlyG,
        ScenarioName::BathOnlyP,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioName::AG => "AG",
            ScenarioName::AP => "AP",
            ScenarioName::A => "A",
            ScenarioName::BG1 => "BG1",
            ScenarioName::BP1 => "BP1",
            ScenarioName::B1 => "B1",
            ScenarioName::BG2 => "BG2",
            ScenarioName::BP2 => "BP2",
            ScenarioName::B2 => "B2",
            ScenarioName::BathOnlyG => "BathOnlyG",
            ScenarioName::BathOnlyP => "BathOnlyP",
        }
    }

    fn expected_bath(self) -> Option<BathKind> {
        use ScenarioName::*;
        match self {
            AG | BG1 | BG2 | BathOnlyG => Some(BathKind::Gaussian),
            AP | BP1 | BP2 | BathOnlyP => Some(BathKind::Poissonian),
            A | B1 | B2 => None,
        }
    }

    fn expected_interaction(self) -> (InteractionKind, u32, u32) {
        use ScenarioName::*;
        match self {
            AG | AP | A | BathOnlyG | BathOnlyP => (InteractionKind::BandLimited, 1, 1),
            BG1 | BP1 | B1 => (InteractionKind::Nonlinear, 1, 1),
            BG2 | BP2 | B2 => (InteractionKind::Nonlinear, 1, 2),
        }
    }

    fn is_bath_only(self) -> bool {
        matches!(self, ScenarioName::BathOnlyG | ScenarioName::BathOnlyP)
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioName::ALL.into_iter().find(|n| n.as_str() == s).ok_or_else(|| {
            let names: Vec<_> = ScenarioName::ALL.iter().map(|n| n.as_str()).collect();
            Error::InvalidSpec(format!(
                "unknown scenario '{s}', expected one of {}",
                names.join(", ")
            ))
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitialState {
    /// `|k, 0⟩`.
    KZero,
    /// `(k+1)^{-1/2} Σ_n |n, k−n⟩`.
    MaxCorrelated,
}

/// Everything needed to reproduce one family of trajectories.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: ScenarioName,
    pub osc: OscillatorSpec,
    pub bath: Option<BathSpec>,
    pub inter: InteractionSpec,
    pub k_list: Vec<u32>,
    pub grid: TimeGrid,
    pub initial: InitialState,
    /// Residual for the effective HS-rank.
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default)]
    pub tolerances: Tolerances,
}

/// Integrator tolerances of the isolated scenarios.
pub const ISOLATED_TOLERANCES: Tolerances = Tolerances { atol: 1e-12, rtol: 1e-11 };

fn default_eps() -> f64 {
    DEFAULT_EPS
}

fn even(lo: u32, hi: u32) -> Vec<u32> {
    (lo..=hi).step_by(2).collect()
}

fn grid_for(gamma: f64) -> TimeGrid {
    let t_end = if gamma > 0.0 { 12.0 / gamma } else { 5.0 };
    TimeGrid::new(t_end, DEFAULT_SAMPLES).expect("static grid is valid")
}

/// The eleven built-in configurations, in units where `ω = 1`.
pub fn builtin_scenarios() -> Vec<ScenarioConfig> {
    ScenarioName::ALL.into_iter().map(builtin).collect()
}

/// One built-in configuration.
pub fn builtin(name: ScenarioName) -> ScenarioConfig {
    use ScenarioName::*;
    let kick = 2.0 * PI / 7.0;
    let unit = OscillatorSpec::new(1.0, 1.0);
    let half = OscillatorSpec::new(0.5, 1.0);
    let band = InteractionSpec::band_limited(0.2);
    let lin = InteractionSpec::nonlinear(0.2, 1, 1);
    let shg = InteractionSpec::nonlinear(0.1, 1, 2);
    let (osc, bath, inter, k_list) = match name {
        AG => (unit, Some(BathSpec::gaussian(1.0 / 15.0, 1.0 / 15.0)), band, even(4, 14)),
        AP => (unit, Some(BathSpec::poissonian(1.0 / 75.0, 1.0 / 75.0, kick)), band, even(4, 14)),
        A => (unit, None, band, even(4, 14)),
        BG1 => (unit, Some(BathSpec::gaussian(1.0 / 15.0, 1.0 / 15.0)), lin, even(4, 24)),
        BP1 => (unit, Some(BathSpec::poissonian(0.02, 0.02, kick)), lin, even(4, 18)),
        B1 => (unit, None, lin, even(4, 24)),
        // Γ₁ω₁² = Γ₂ω₂² = 1/30 with ω₁ = 1/2
        BG2 => (half, Some(BathSpec::gaussian(2.0 / 15.0, 1.0 / 30.0)), shg, even(4, 28)),
        BP2 => (half, Some(BathSpec::poissonian(0.025, 0.025, kick)), shg, even(4, 20)),
        B2 => (half, None, shg, even(4, 28)),
        BathOnlyG => (
            unit,
            Some(BathSpec::gaussian(1.0, 1.0)),
            InteractionSpec::band_limited(0.0),
            even(2, 12),
        ),
        BathOnlyP => (
            unit,
            Some(BathSpec::poissonian(1.0, 1.0, 1.0)),
            InteractionSpec::band_limited(0.0),
            even(2, 12),
        ),
    };
    let initial =
        if name.is_bath_only() { InitialState::MaxCorrelated } else { InitialState::KZero };
    // pure states have zero eigenvalues that integration error pushes negative
    let tolerances = if bath.is_none() { ISOLATED_TOLERANCES } else { Tolerances::default() };
    ScenarioConfig {
        name,
        osc,
        bath,
        inter,
        k_list,
        grid: grid_for(inter.gamma),
        initial,
        eps: DEFAULT_EPS,
        tolerances,
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.osc.validate()?;
        self.inter.validate()?;
        self.grid.validate()?;
        if let Some(b) = &self.bath {
            b.validate()?;
        }
        let bad =
            |what: &str| Err(Error::InvalidSpec(format!("scenario {} requires {what}", self.name)));
        if self.bath.map(|b| b.kind) != self.name.expected_bath() {
            return bad(match self.name.expected_bath() {
                Some(BathKind::Gaussian) => "a Gaussian bath",
                Some(BathKind::Poissonian) => "a Poissonian bath",
                None => "no bath",
            });
        }
        let (kind, r, s) = self.name.expected_interaction();
        if self.inter.kind != kind || self.inter.charge_weights() != (r, s) {
            return bad(match kind {
                InteractionKind::BandLimited => "the band-limited interaction",
                InteractionKind::Nonlinear if s == 1 => "the nonlinear interaction with r = s = 1",
                InteractionKind::Nonlinear => "the nonlinear interaction with r = 1, s = 2",
            });
        }
        let want = if self.name.is_bath_only() {
            InitialState::MaxCorrelated
        } else {
            InitialState::KZero
        };
        if self.initial != want {
            return bad(if want == InitialState::KZero {
                "the |k,0> initial state"
            } else {
                "the maximally correlated initial state"
            });
        }
        if self.k_list.contains(&0) {
            return Err(Error::InvalidSpec("k values must be positive".into()));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::InvalidSpec(format!("eps must lie in (0, 1), got {}", self.eps)));
        }
        if !(self.tolerances.atol > 0.0 && self.tolerances.rtol > 0.0) {
            return Err(Error::InvalidSpec("integrator tolerances must be positive".into()));
        }
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v: f64 = value.trim().parse().map_err(|_| {
            Error::InvalidSpec(format!("value for '{key}' is not a number: '{value}'"))
        })?;
        let positive = |v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(Error::InvalidSpec(format!("'{key}' must be positive, got {v}")))
            }
        };
        let non_negative = |v: f64| {
            if v >= 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(Error::InvalidSpec(format!("'{key}' must be non-negative, got {v}")))
            }
        };
        let name = self.name;
        fn bath<'a>(
            b: &'a mut Option<BathSpec>,
            name: ScenarioName,
            key: &str,
        ) -> Result<&'a mut BathSpec> {
            b.as_mut().ok_or_else(|| {
                Error::InvalidSpec(format!("scenario {name} has no bath to set '{key}' on"))
            })
        }
        match key {
            "gamma" => self.inter.gamma = non_negative(v)?,
            "Gamma1" => bath(&mut self.bath, name, key)?.gamma1 = non_negative(v)?,
            "Gamma2" => bath(&mut self.bath, name, key)?.gamma2 = non_negative(v)?,
            "phi" => {
                let b = bath(&mut self.bath, name, key)?;
                if b.kind != BathKind::Poissonian {
                    return Err(Error::InvalidSpec(format!("'phi' applies to Poissonian baths only, not {name}")));
                }
                b.phi = if v.is_finite() { v } else { return Err(Error::InvalidSpec("'phi' must be finite".into())) };
            }
            "omega1" => self.osc.omega1 = positive(v)?,
            "omega2" => self.osc.omega2 = positive(v)?,
            "t_end" => self.grid = TimeGrid::new(positive(v)?, self.grid.samples)?,
            "samples" => {
                if v.fract() != 0.0 || v < 2.0 {
                    return Err(Error::InvalidSpec(format!("'samples' must be an integer ≥ 2, got {value}")));
                }
                self.grid = TimeGrid::new(self.grid.t_end, v as usize)?;
            }
            "eps" => {
                if !(v > 0.0 && v < 1.0) {
                    return Err(Error::InvalidSpec(format!("'eps' must lie in (0, 1), got {v}")));
                }
                self.eps = v;
            }
            _ => {
                return Err(Error::InvalidSpec(format!(
                    "unknown override '{key}', expected one of gamma, Gamma1, Gamma2, phi, omega1, omega2, t_end, samples, eps"
                )))
            }
        }
        Ok(())
    }

    /// `γ / max(Γ₁ω₁², Γ₂ω₂²)` for Gaussian baths.
    pub fn gamma_over_gamma(&self) -> Option<f64> {
        let b = self.bath.filter(|b| b.kind == BathKind::Gaussian)?;
        let rate = (b.gamma1 * self.osc.omega1.powi(2)).max(b.gamma2 * self.osc.omega2.powi(2));
        (rate > 0.0 && self.inter.gamma > 0.0).then(|| self.inter.gamma / rate)
    }

    /// Width profile of the interaction-dominated band, for Gaussian baths.
    pub fn width_profile(&self, k: u32) -> Result<WidthProfile> {
        let g = self.gamma_over_gamma().ok_or_else(|| {
            Error::Unsupported(format!("scenario {} has no Gaussian width boundary", self.name))
        })?;
        width_boundary(k, g, &self.inter)
    }

    pub fn initial_state(&self, k: u32) -> Result<LadderState> {
        let lad = build_ladder(k, &self.inter)?;
        match self.initial {
            InitialState::KZero => initial_state(&lad),
            InitialState::MaxCorrelated => maximally_correlated_state(&lad),
        }
    }
}

/// Integrates scenario `cfg` at `k`.
pub fn run_trajectory(cfg: &ScenarioConfig, k: u32) -> Result<Trajectory<LadderState>> {
    cfg.validate()?;
    let init = cfg.initial_state(k)?;
    let gen = build_generators(&init.ladder, &cfg.osc, cfg.bath.as_ref(), &cfg.inter)?;
    evolve_ladder(&gen, &init, &cfg.grid, &cfg.tolerances)
}

pub fn records_from(
    cfg: &ScenarioConfig,
    traj: &Trajectory<LadderState>,
) -> Result<Vec<CorrelationRecord>> {
    traj.iter().map(|(t, s)| CorrelationRecord::from_state(t, s, &cfg.osc, cfg.eps)).collect()
}

/// Integrates and evaluates every measure at each sample.
pub fn run_scenario(cfg: &ScenarioConfig, k: u32) -> Result<Vec<CorrelationRecord>> {
    records_from(cfg, &run_trajectory(cfg, k)?)
}

/// Runs every `k` in parallel, returning results in input order.
pub fn sweep(cfg: &ScenarioConfig, ks: &[u32]) -> Result<Vec<(u32, Vec<CorrelationRecord>)>> {
    ks.par_iter().map(|&k| Ok((k, run_scenario(cfg, k)?))).collect()
}

/// Closed-form trajectory, where one exists: bath-only relaxation of the
/// maximally correlated state, or the isolated linear coupling at
/// `ω₁ = ω₂`.
pub fn analytic_trajectory(cfg: &ScenarioConfig, k: u32) -> Result<Trajectory<LadderState>> {
    cfg.validate()?;
    let times = cfg.grid.times();
    let states = match cfg.name {
        ScenarioName::BathOnlyG | ScenarioName::BathOnlyP if cfg.inter.gamma == 0.0 => {
            let bath = cfg.bath.expect("validated");
            times
                .iter()
                .map(|&t| bath_driven_state(t, k, &cfg.osc, &bath))
                .collect::<Result<Vec<_>>>()?
        }
        ScenarioName::B1 if cfg.osc.omega1 == cfg.osc.omega2 => {
            let lad = build_ladder(k, &cfg.inter)?;
            times
                .iter()
                .map(|&t| {
                    let c = isolated_linear_state(t, k, cfg.osc.omega1, cfg.inter.gamma);
                    LadderState::new(lad.clone(), CMatrix::outer(&c, &c))
                })
                .collect::<Result<Vec<_>>>()?
        }
        _ => {
            return Err(Error::Unsupported(format!(
                "no closed-form trajectory for scenario {}",
                cfg.name
            )))
        }
    };
    Ok(Trajectory { times, states })
}

/// Ladder versus full tensor-product evolution of the same scenario.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub k: u32,
    /// Largest element-wise difference between the ladder state and the
    /// projection of the full state.
    pub max_deviation: f64,
    /// Largest absolute weight of the full state outside the ladder block.
    pub max_leakage: f64,
}

/// Largest `k` accepted by [`oracle_check`].
pub const ORACLE_MAX_K: u32 = 6;

/// Tolerances used on both sides of [`oracle_check`].
pub const ORACLE_TOLERANCES: Tolerances = Tolerances { atol: 1e-13, rtol: 1e-12 };

/// Evolves scenario `cfg` at `k` both on the ladder and in the truncated
/// full space and compares them at every grid sample.
pub fn oracle_check(cfg: &ScenarioConfig, k: u32) -> Result<OracleReport> {
    cfg.validate()?;
    if k > ORACLE_MAX_K {
        return Err(Error::InvalidSpec(format!(
            "oracle comparison is limited to k ≤ {ORACLE_MAX_K}, got {k}"
        )));
    }
    let init = cfg.initial_state(k)?;
    let lad = &init.ladder;
    let gen = build_generators(lad, &cfg.osc, cfg.bath.as_ref(), &cfg.inter)?;
    let ladder = evolve_ladder(&gen, &init, &cfg.grid, &ORACLE_TOLERANCES)?;
    let (n1, n2) = full_dims(k, &cfg.inter);
    let rhs = build_full_rhs(&cfg.osc, cfg.bath.as_ref(), &cfg.inter, n1, n2)?;
    let full = evolve_full(&rhs, &embed(&init, n1, n2)?, &cfg.grid, &ORACLE_TOLERANCES)?;
    let mut rep = OracleReport { k, max_deviation: 0.0, max_leakage: 0.0 };
    for (a, b) in ladder.states.iter().zip(&full.states) {
        let (proj, leak) = project(b, lad)?;
        rep.max_deviation = rep.max_deviation.max(a.rho.sub(&proj.rho)?.max_abs());
        rep.max_leakage = rep.max_leakage.max(leak);
    }
    Ok(rep)
}

/// `cfg` on the grid `[0, 5/γ]` (or its own horizon when `γ = 0`) with
/// `samples` points, as used for oracle comparisons.
pub fn oracle_grid(cfg: &ScenarioConfig, samples: usize) -> Result<TimeGrid> {
    let t_end = if cfg.inter.gamma > 0.0 { 5.0 / cfg.inter.gamma } else { cfg.grid.t_end };
    TimeGrid::new(t_end, samples)
}

/// Worst-case deviations from the physical invariants along a trajectory.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub max_trace_error: f64,
    pub max_hermiticity_defect: f64,
    pub min_eigenvalue: f64,
    pub max_charge_drift: f64,
}

impl InvariantReport {
    /// Trace and Hermiticity within `tol`, eigenvalues above `−eig_tol`,
    /// charge drift below `charge_tol`.
    pub fn holds(&self, tol: f64, eig_tol: f64, charge_tol: f64) -> bool {
        self.max_trace_error < tol
            && self.max_hermiticity_defect < tol
            && self.min_eigenvalue >= -eig_tol
            && self.max_charge_drift < charge_tol
    }
}

pub fn check_invariants(traj: &Trajectory<LadderState>) -> Result<InvariantReport> {
    let mut rep = InvariantReport { min_eigenvalue: f64::INFINITY, ..Default::default() };
    for (_, s) in traj.iter() {
        let lad = &s.ladder;
        rep.max_trace_error = rep.max_trace_error.max((s.rho.trace() - 1.0).norm());
        rep.max_hermiticity_defect = rep.max_hermiticity_defect.max(s.rho.hermitian_defect());
        let ev = hermitian_eigenvalues(&s.rho.hermitian_part())?;
        rep.min_eigenvalue = rep.min_eigenvalue.min(ev[0]);
        let charge: f64 = (0..s.dim())
            .map(|i| {
                (lad.r as f64 * lad.m_values[i] as f64 + lad.s as f64 * lad.l_values[i] as f64)
                    * s.rho[(i, i)].re
            })
            .sum();
        rep.max_charge_drift = rep.max_charge_drift.max((charge - lad.charge() as f64).abs());
    }
    Ok(rep)
}
