//! Time integration of the master equations.
//!
//! [`integrate`] is an adaptive Dormand–Prince 5(4) integrator over dense
//! complex matrices. Steps are clamped to land on every output sample, so no
//! interpolation is involved in the recorded states. After each sample the
//! state's trace and Hermiticity are checked: drift below [`DRIFT_LIMIT`] is
//! corrected, anything larger aborts the run.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::full::{FullRhs, FullState};
use crate::ladder::{LadderGenerators, LadderState};
use crate::linops::CMatrix;

/// Largest trace or Hermiticity drift that is silently corrected.
pub const DRIFT_LIMIT: f64 = 1e-8;

/// Uniform output grid on `[0, t_end]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_end: f64,
    pub samples: usize,
    pub max_step: f64,
}

impl TimeGrid {
    /// Grid with `max_step` equal to the sample spacing.
    pub fn new(t_end: f64, samples: usize) -> Result<Self> {
        let grid = Self { t_end, samples, max_step: t_end / (samples.max(2) - 1) as f64 };
        grid.validate()?;
        Ok(grid)
    }

    pub fn with_max_step(mut self, max_step: f64) -> Result<Self> {
        self.max_step = max_step;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidSpec(format!("t_end must be positive, got {}", self.t_end)));
        }
        if self.samples < 2 {
            return Err(Error::InvalidSpec(format!(
                "need at least 2 samples, got {}",
                self.samples
            )));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "max_step must be positive, got {}",
                self.max_step
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        self.t_end / (self.samples - 1) as f64
    }

    pub fn times(&self) -> Vec<f64> {
        let dt = self.spacing();
        (0..self.samples)
            .map(|i| if i + 1 == self.samples { self.t_end } else { i as f64 * dt })
            .collect()
    }
}

/// Absolute and relative local error tolerances.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub atol: f64,
    pub rtol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { atol: 1e-10, rtol: 1e-9 }
    }
}

impl Tolerances {
    pub fn new(atol: f64, rtol: f64) -> Self {
        Self { atol, rtol }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { atol: self.atol * factor, rtol: self.rtol * factor }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
}

impl<S> Trajectory<S> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &S)> {
        self.times.iter().copied().zip(&self.states)
    }

    pub fn last(&self) -> Option<&S> {
        self.states.last()
    }
}

/// Precomputed ladder right-hand side: `h_eff` kept as triplets, since it is
/// tridiagonal.
#[derive(Clone, Debug)]
pub struct LadderDynamics {
    d: usize,
    h: Vec<(usize, usize, C64)>,
    deph: Vec<C64>,
}

impl LadderDynamics {
    pub fn new(gen: &LadderGenerators) -> Self {
        let d = gen.h_eff.rows();
        let mut h = Vec::new();
        for r in 0..d {
            for c in 0..d {
                let z = gen.h_eff[(r, c)];
                if z != C64::new(0.0, 0.0) {
                    h.push((r, c, z));
                }
            }
        }
        Self { d, h, deph: gen.deph.as_slice().to_vec() }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn apply(&self, rho: &CMatrix, out: &mut CMatrix) {
        let d = self.d;
        let src = rho.as_slice();
        let dst = out.as_mut_slice();
        for ((o, &r), &z) in dst.iter_mut().zip(src).zip(&self.deph) {
            *o = -z * r;
        }
        let minus_i = C64::new(0.0, -1.0);
        for &(a, b, v) in &self.h {
            let w = minus_i * v;
            // (hρ)_{a j} += h_ab ρ_bj ; (ρh)_{i b} += ρ_ia h_ab
            for j in 0..d {
                dst[a * d + j] += w * src[b * d + j];
            }
            for i in 0..d {
                dst[i * d + b] -= w * src[i * d + a];
            }
        }
    }
}

/// `(dρ/dt)_mn = −i[h_eff, ρ]_mn − z_mn ρ_mn`.
pub fn ladder_rhs(gen: &LadderGenerators, rho: &CMatrix) -> Result<CMatrix> {
    let d = gen.h_eff.rows();
    if rho.rows() != d || rho.cols() != d {
        return Err(Error::Dimension(format!(
            "{}x{} state for a ladder of length {d}",
            rho.rows(),
            rho.cols()
        )));
    }
    let mut out = CMatrix::zeros(d, d);
    LadderDynamics::new(gen).apply(rho, &mut out);
    Ok(out)
}

// Dormand–Prince 5(4) tableau. The system is autonomous, so the nodes
// c_i are not needed.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// 5th-order weights minus the embedded 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

fn error_norm(err: &[C64], y0: &[C64], y1: &[C64], tol: &Tolerances) -> f64 {
    let sum: f64 = err
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let sc = tol.atol + tol.rtol * a.norm().max(b.norm());
            (e.norm() / sc).powi(2)
        })
        .sum();
    (sum / err.len().max(1) as f64).sqrt()
}

fn scaled_norm(v: &[C64], y: &[C64], tol: &Tolerances) -> f64 {
    let sum: f64 =
        v.iter().zip(y).map(|(x, y)| (x.norm() / (tol.atol + tol.rtol * y.norm())).powi(2)).sum();
    (sum / v.len().max(1) as f64).sqrt()
}

/// Checks and repairs trace and Hermiticity drift of a sampled density matrix.
fn correct_drift(y: &mut CMatrix, t: f64) -> Result<()> {
    let trace = y.trace();
    let trace_err = (trace - 1.0).norm();
    if trace_err >= DRIFT_LIMIT {
        return Err(Error::Integrity { t, what: "trace drift", value: trace_err });
    }
    let defect = y.hermitian_defect();
    if defect >= DRIFT_LIMIT {
        return Err(Error::Integrity { t, what: "hermiticity drift", value: defect });
    }
    *y = y.hermitian_part().scale(C64::new(1.0 / trace.re, 0.0));
    Ok(())
}

/// Integrates `dy/dt = rhs(y)` from a density matrix `initial` and samples
/// it on `grid`.
pub fn integrate<F>(
    mut rhs: F,
    initial: &CMatrix,
    grid: &TimeGrid,
    tol: &Tolerances,
) -> Result<Trajectory<CMatrix>>
where
    F: FnMut(&CMatrix, &mut CMatrix),
{
    grid.validate()?;
    let (rows, cols) = (initial.rows(), initial.cols());
    let n = rows * cols;
    let mut y = initial.clone();
    correct_drift(&mut y, 0.0)?;

    let mut k: Vec<CMatrix> = (0..7).map(|_| CMatrix::zeros(rows, cols)).collect();
    let mut stage = CMatrix::zeros(rows, cols);
    let mut y_new = CMatrix::zeros(rows, cols);
    let mut err = vec![C64::new(0.0, 0.0); n];

    rhs(&y, &mut k[0]);
    let times = grid.times();
    let mut states = Vec::with_capacity(times.len());
    states.push(y.clone());

    let mut h = {
        let d0 = scaled_norm(y.as_slice(), y.as_slice(), tol);
        let d1 = scaled_norm(k[0].as_slice(), y.as_slice(), tol);
        let guess = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        guess.min(grid.max_step)
    };
    let mut t = 0.0;

    for &target in &times[1..] {
        while t < target {
            let remaining = target - t;
            let landing = h >= remaining * (1.0 - 1e-12);
            let step = if landing { remaining } else { h.min(grid.max_step) };

            #[allow(clippy::needless_range_loop)]
            for s in 1..7 {
                let ys = stage.as_mut_slice();
                ys.copy_from_slice(y.as_slice());
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        let w = a * step;
                        for (dst, src) in ys.iter_mut().zip(kj.as_slice()) {
                            *dst += src * w;
                        }
                    }
                }
                let (_, tail) = k.split_at_mut(s);
                rhs(&stage, &mut tail[0]);
            }
            // the seventh stage was evaluated at the 5th-order solution
            y_new.as_mut_slice().copy_from_slice(stage.as_slice());
            for (i, e) in err.iter_mut().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (j, kj) in k.iter().enumerate() {
                    if E[j] != 0.0 {
                        acc += kj.as_slice()[i] * E[j];
                    }
                }
                *e = acc * step;
            }
            let en = error_norm(&err, y.as_slice(), y_new.as_slice(), tol);

            if en <= 1.0 {
                t = if landing { target } else { t + step };
                std::mem::swap(&mut y, &mut y_new);
                k.swap(0, 6);
                let factor = if en == 0.0 {
                    MAX_FACTOR
                } else {
                    (SAFETY * en.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
                };
                // a landing step may have been shortened; keep the larger proposal
                h = (step * factor).max(if landing { h } else { 0.0 });
            } else {
                h = step * (SAFETY * en.powf(-0.2)).clamp(MIN_FACTOR, 1.0);
            }
            // also catches accepted steps too short to ever reach t_end
            if !h.is_finite() || h < 1e-14 * t.max(grid.t_end) {
                return Err(Error::Integration { t });
            }
        }
        correct_drift(&mut y, t)?;
        rhs(&y, &mut k[0]);
        states.push(y.clone());
    }
    Ok(Trajectory { times, states })
}

/// Integrates the ladder master equation.
pub fn evolve_ladder(
    gen: &LadderGenerators,
    initial: &LadderState,
    grid: &TimeGrid,
    tol: &Tolerances,
) -> Result<Trajectory<LadderState>> {
    let dynamics = LadderDynamics::new(gen);
    if dynamics.dim() != initial.dim() {
        return Err(Error::Dimension(format!(
            "generator of size {} given a state of size {}",
            dynamics.dim(),
            initial.dim()
        )));
    }
    let traj = integrate(|y, out| dynamics.apply(y, out), &initial.rho, grid, tol)?;
    let states = traj
        .states
        .into_iter()
        .map(|rho| LadderState { ladder: initial.ladder.clone(), rho })
        .collect();
    Ok(Trajectory { times: traj.times, states })
}

/// Integrates the full tensor-product master equation.
pub fn evolve_full(
    rhs: &FullRhs,
    initial: &FullState,
    grid: &TimeGrid,
    tol: &Tolerances,
) -> Result<Trajectory<FullState>> {
    if rhs.n1 != initial.n1 || rhs.n2 != initial.n2 {
        return Err(Error::Dimension("state and generator truncations differ".into()));
    }
    let traj = integrate(|y, out| rhs.apply(y, out), &initial.rho, grid, tol)?;
    let states = traj
        .states
        .into_iter()
        .map(|rho| FullState { n1: initial.n1, n2: initial.n2, rho })
        .collect();
    Ok(Trajectory { times: traj.times, states })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ladder::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_density(rng: &mut impl Rng, n: usize) -> CMatrix {
        let g = CMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let p = g.matmul(&g.adjoint()).unwrap();
        let tr = p.trace();
        p.scale(tr.inv())
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(0.0, 10).is_err());
        assert!(TimeGrid::new(1.0, 1).is_err());
        assert!(TimeGrid::new(1.0, 3).unwrap().with_max_step(0.0).is_err());
        let g = TimeGrid::new(2.0, 5).unwrap();
        assert_eq!(g.times(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    }

    #[test]
    fn rhs_is_traceless_and_decoupled_solution_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let inter = InteractionSpec::nonlinear(0.0, 1, 2);
        let lad = build_ladder(8, &inter).unwrap();
        let osc = OscillatorSpec::new(0.5, 1.3);
        let bath = BathSpec::gaussian(0.05, 0.02);
        let gen = build_generators(&lad, &osc, Some(&bath), &inter).unwrap();
        let rho0 = random_density(&mut rng, lad.len());
        let d = ladder_rhs(&gen, &rho0).unwrap();
        assert!(d.trace().norm() < 1e-14);

        // γ = 0: each element evolves as e^{−iΔE t − z t}
        let grid = TimeGrid::new(3.0, 7).unwrap();
        let init = LadderState::new(lad.clone(), rho0.clone()).unwrap();
        let traj = evolve_ladder(&gen, &init, &grid, &Tolerances::default()).unwrap();
        for (t, s) in traj.iter() {
            for i in 0..lad.len() {
                for j in 0..lad.len() {
                    let de = gen.h_eff[(i, i)].re - gen.h_eff[(j, j)].re;
                    let expected =
                        rho0[(i, j)] * (C64::new(0.0, -de * t) - gen.deph[(i, j)] * t).exp();
                    assert!((s.rho[(i, j)] - expected).norm() < 1e-9, "t={t}");
                }
            }
        }
    }

    #[test]
    fn diagonal_state_without_coupling_has_no_diagonal_rhs() {
        let inter = InteractionSpec::band_limited(0.0);
        let lad = build_ladder(4, &inter).unwrap();
        let gen = build_generators(
            &lad,
            &OscillatorSpec::new(1.0, 2.0),
            Some(&BathSpec::gaussian(1.0, 1.0)),
            &inter,
        )
        .unwrap();
        let rho = CMatrix::from_diag(&[0.1, 0.2, 0.3, 0.15, 0.25].map(|x| C64::new(x, 0.0)));
        assert_eq!(ladder_rhs(&gen, &rho).unwrap().max_abs(), 0.0);
        assert!(ladder_rhs(&gen, &CMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn free_evolution_only_rotates_phases() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let inter = InteractionSpec::band_limited(0.0);
        let lad = build_ladder(5, &inter).unwrap();
        let gen = build_generators(&lad, &OscillatorSpec::new(1.0, 0.3), None, &inter).unwrap();
        let init = LadderState::new(lad.clone(), random_density(&mut rng, 6)).unwrap();
        let grid = TimeGrid::new(10.0, 11).unwrap();
        let traj = evolve_ladder(&gen, &init, &grid, &Tolerances::new(1e-13, 1e-12)).unwrap();
        let t = 10.0;
        let last = traj.last().unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let de = gen.h_eff[(i, i)].re - gen.h_eff[(j, j)].re;
                let expected = init.rho[(i, j)] * C64::from_polar(1.0, -de * t);
                assert!((last.rho[(i, j)] - expected).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn rabi_oscillation_of_single_excitation() {
        let g = 0.3;
        let inter = InteractionSpec::band_limited(g);
        let lad = build_ladder(1, &inter).unwrap();
        let gen = build_generators(&lad, &OscillatorSpec::new(1.0, 1.0), None, &inter).unwrap();
        let grid = TimeGrid::new(20.0, 81).unwrap();
        let traj =
            evolve_ladder(&gen, &initial_state(&lad).unwrap(), &grid, &Tolerances::default())
                .unwrap();
        for (t, s) in traj.iter() {
            // 2x2 exact solution: P(|1,0⟩) = cos²(γt), i.e. frequency 2γ
            assert!((s.rho[(1, 1)].re - (g * t).cos().powi(2)).abs() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn drift_is_an_error() {
        let init = CMatrix::identity(2).scale(C64::new(0.5, 0.0));
        let grid = TimeGrid::new(1.0, 3).unwrap();
        // a generator that pumps the trace
        let res = integrate(|y, out| *out = y.clone(), &init, &grid, &Tolerances::default());
        assert!(matches!(res, Err(Error::Integrity { what: "trace drift", .. })));
    }

    #[test]
    fn stiff_underflow_is_reported() {
        let init = CMatrix::identity(1);
        let grid = TimeGrid::new(1.0, 2).unwrap();
        let res = integrate(
            |y, out| {
                let v = y[(0, 0)];
                out[(0, 0)] = if v.re.is_finite() { v * v * 1e30 } else { v };
            },
            &init,
            &grid,
            &Tolerances::default(),
        );
        assert!(res.is_err());
    }

    #[test]
    fn hopeless_oscillation_stops() {
        let init = CMatrix::identity(1);
        let grid = TimeGrid::new(60.0, 3).unwrap();
        let res = integrate(
            |y, out| out[(0, 0)] = y[(0, 0)] * C64::new(0.0, -1e200),
            &init,
            &grid,
            &Tolerances::default(),
        );
        assert!(matches!(res, Err(Error::Integration { .. })));
    }
}
