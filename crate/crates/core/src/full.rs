//! Brute-force model on the truncated tensor-product space.
//!
//! Nothing here uses the conservation law: the Hamiltonian, the interaction
//! and both dissipators are assembled from truncated ladder operators and
//! applied to the full `(n₁n₂) × (n₁n₂)` density matrix. Its only purpose is
//! to cross-check the ladder reduction at small `k`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::ladder::{
    BathKind, BathSpec, InteractionKind, InteractionSpec, Ladder, LadderState, OscillatorSpec,
};
use crate::linops::{hermitian_eigen, CMatrix};

/// Density matrix in the product basis `|i⟩⊗|j⟩`, flat index `i·n₂ + j`.
#[derive(Clone, Debug, PartialEq)]
pub struct FullState {
    pub n1: usize,
    pub n2: usize,
    pub rho: CMatrix,
}

impl FullState {
    pub fn new(n1: usize, n2: usize, rho: CMatrix) -> Result<Self> {
        if !rho.is_square() || rho.rows() != n1 * n2 {
            return Err(Error::Dimension(format!(
                "a {}x{} matrix is not a state on {n1}x{n2} levels",
                rho.rows(),
                rho.cols()
            )));
        }
        Ok(Self { n1, n2, rho })
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n2 + j
    }
}

/// Truncations that hold the whole ladder reached from `|k, 0⟩`.
pub fn full_dims(k: u32, inter: &InteractionSpec) -> (usize, usize) {
    let k = k as usize;
    match inter.kind {
        InteractionKind::BandLimited => (k + 1, k + 1),
        InteractionKind::Nonlinear => {
            let (r, s) = (inter.r as usize, inter.s as usize);
            (k + 1, (r * k).div_ceil(s) + 1)
        }
    }
}

/// Sparse triplet view of an operator, used to apply the mostly-empty
/// Hamiltonian pieces to a dense state.
#[derive(Clone, Debug)]
struct SparseOp {
    entries: Vec<(usize, usize, C64)>,
}

impl SparseOp {
    fn from_dense(m: &CMatrix) -> Self {
        let mut entries = Vec::new();
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                let z = m[(r, c)];
                if z != C64::new(0.0, 0.0) {
                    entries.push((r, c, z));
                }
            }
        }
        Self { entries }
    }

    /// `out += coeff · A ρ`
    fn left_acc(&self, rho: &CMatrix, coeff: C64, out: &mut CMatrix) {
        let n = rho.cols();
        let src = rho.as_slice();
        let dst = out.as_mut_slice();
        for &(r, c, v) in &self.entries {
            let w = v * coeff;
            for j in 0..n {
                dst[r * n + j] += w * src[c * n + j];
            }
        }
    }

    /// `out += coeff · ρ A`
    fn right_acc(&self, rho: &CMatrix, coeff: C64, out: &mut CMatrix) {
        let n = rho.cols();
        let rows = rho.rows();
        let src = rho.as_slice();
        let dst = out.as_mut_slice();
        for &(r, c, v) in &self.entries {
            let w = v * coeff;
            for i in 0..rows {
                dst[i * n + c] += w * src[i * n + r];
            }
        }
    }

    /// `out += coeff · [A, ρ]`
    fn commutator_acc(&self, rho: &CMatrix, coeff: C64, out: &mut CMatrix) {
        self.left_acc(rho, coeff, out);
        self.right_acc(rho, -coeff, out);
    }
}

fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (br, bc) = (b.rows(), b.cols());
    CMatrix::from_fn(a.rows() * br, a.cols() * bc, |r, c| a[(r / br, c / bc)] * b[(r % br, c % bc)])
}

/// Truncated annihilation operator, `a|n⟩ = √n |n−1⟩`.
pub fn annihilation(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |r, c| {
        if c == r + 1 {
            C64::new((c as f64).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Unit-amplitude lowering shift, `(A)_{mn} = δ_{m,n−1}`.
pub fn shift(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |r, c| if c == r + 1 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

fn power(m: &CMatrix, p: u32) -> CMatrix {
    (0..p).fold(CMatrix::identity(m.rows()), |acc, _| acc.matmul(m).expect("square"))
}

/// Local dissipator of one oscillator, already lifted to the product space.
#[derive(Clone, Debug)]
enum LocalDissipator {
    /// `[H_j, [H_j, ρ]]`
    Gaussian { h: SparseOp },
    /// `ρ − U ρ U†` with `U = e^{−iφH_j}`
    Poissonian { u: SparseOp, u_adj: SparseOp },
}

/// Right-hand side of the full master equation
/// `dρ/dt = −i[H₁ + H₂ + γH₁₂, ρ] − Γ₁D₁(ρ) − Γ₂D₂(ρ)`.
#[derive(Clone, Debug)]
pub struct FullRhs {
    pub n1: usize,
    pub n2: usize,
    /// The total Hamiltonian, dense, for inspection.
    pub hamiltonian: CMatrix,
    h: SparseOp,
    dissipators: Vec<(f64, LocalDissipator)>,
}

impl FullRhs {
    pub fn dim(&self) -> usize {
        self.n1 * self.n2
    }

    /// Writes `dρ/dt` into `out`.
    pub fn apply(&self, rho: &CMatrix, out: &mut CMatrix) {
        out.as_mut_slice().fill(C64::new(0.0, 0.0));
        let minus_i = C64::new(0.0, -1.0);
        self.h.commutator_acc(rho, minus_i, out);
        for (rate, diss) in &self.dissipators {
            let rate = C64::new(*rate, 0.0);
            match diss {
                LocalDissipator::Gaussian { h } => {
                    let mut inner = CMatrix::zeros(rho.rows(), rho.cols());
                    h.commutator_acc(rho, C64::new(1.0, 0.0), &mut inner);
                    h.commutator_acc(&inner, -rate, out);
                }
                LocalDissipator::Poissonian { u, u_adj } => {
                    let mut left = CMatrix::zeros(rho.rows(), rho.cols());
                    u.left_acc(rho, C64::new(1.0, 0.0), &mut left);
                    for (o, r) in out.as_mut_slice().iter_mut().zip(rho.as_slice()) {
                        *o -= rate * r;
                    }
                    u_adj.right_acc(&left, rate, out);
                }
            }
        }
    }

    pub fn eval(&self, state: &FullState) -> Result<FullState> {
        if state.n1 != self.n1 || state.n2 != self.n2 {
            return Err(Error::Dimension(format!(
                "state on {}x{} levels given to a {}x{} generator",
                state.n1, state.n2, self.n1, self.n2
            )));
        }
        let mut out = CMatrix::zeros(self.dim(), self.dim());
        self.apply(&state.rho, &mut out);
        FullState::new(self.n1, self.n2, out)
    }
}

/// Assembles the full generator on `n1 × n2` levels.
pub fn build_full_rhs(
    osc: &OscillatorSpec,
    bath: Option<&BathSpec>,
    inter: &InteractionSpec,
    n1: usize,
    n2: usize,
) -> Result<FullRhs> {
    osc.validate()?;
    inter.validate()?;
    if n1 == 0 || n2 == 0 {
        return Err(Error::Dimension("truncations must be positive".into()));
    }
    let (id1, id2) = (CMatrix::identity(n1), CMatrix::identity(n2));
    let (a1, a2) = (annihilation(n1), annihilation(n2));
    let num1 = a1.adjoint().matmul(&a1)?;
    let num2 = a2.adjoint().matmul(&a2)?;
    let h1 = kron(&num1, &id2).scale(C64::new(osc.omega1, 0.0));
    let h2 = kron(&id1, &num2).scale(C64::new(osc.omega2, 0.0));

    let coupling = match inter.kind {
        InteractionKind::BandLimited => kron(&shift(n1).adjoint(), &shift(n2)),
        InteractionKind::Nonlinear => kron(&power(&a1.adjoint(), inter.s), &power(&a2, inter.r)),
    };
    let h12 = coupling.add(&coupling.adjoint())?;
    let hamiltonian = h1.add(&h2)?.add(&h12.scale(C64::new(inter.gamma, 0.0)))?;

    let mut dissipators = Vec::new();
    if let Some(b) = bath {
        b.validate()?;
        for (rate, h) in [(b.gamma1, &h1), (b.gamma2, &h2)] {
            let diss = match b.kind {
                BathKind::Gaussian => LocalDissipator::Gaussian { h: SparseOp::from_dense(h) },
                BathKind::Poissonian => {
                    let (vals, v) = hermitian_eigen(h)?;
                    let phases: Vec<C64> =
                        vals.iter().map(|&e| C64::from_polar(1.0, -b.phi * e)).collect();
                    let u = v.matmul(&CMatrix::from_diag(&phases))?.matmul(&v.adjoint())?;
                    // drop rounding dust so the sparse form stays sparse
                    let u = CMatrix::from_fn(u.rows(), u.cols(), |r, c| {
                        let z = u[(r, c)];
                        if z.norm() < 1e-14 {
                            C64::new(0.0, 0.0)
                        } else {
                            z
                        }
                    });
                    LocalDissipator::Poissonian {
                        u_adj: SparseOp::from_dense(&u.adjoint()),
                        u: SparseOp::from_dense(&u),
                    }
                }
            };
            dissipators.push((rate, diss));
        }
    }
    Ok(FullRhs { n1, n2, h: SparseOp::from_dense(&hamiltonian), hamiltonian, dissipators })
}

fn ladder_indices(lad: &Ladder, n1: usize, n2: usize) -> Result<Vec<usize>> {
    if lad.max_m() as usize >= n1 || lad.max_l() as usize >= n2 {
        return Err(Error::Dimension(format!(
            "ladder needs {}x{} levels, truncation is {n1}x{n2}",
            lad.max_m() + 1,
            lad.max_l() + 1
        )));
    }
    Ok(lad
        .m_values
        .iter()
        .zip(&lad.l_values)
        .map(|(&m, &l)| m as usize * n2 + l as usize)
        .collect())
}

/// Places a ladder state into the product space.
pub fn embed(ls: &LadderState, n1: usize, n2: usize) -> Result<FullState> {
    let idx = ladder_indices(&ls.ladder, n1, n2)?;
    let mut rho = CMatrix::zeros(n1 * n2, n1 * n2);
    for (i, &a) in idx.iter().enumerate() {
        for (j, &b) in idx.iter().enumerate() {
            rho[(a, b)] = ls.rho[(i, j)];
        }
    }
    FullState::new(n1, n2, rho)
}

/// Extracts the ladder block of a full state and reports the total modulus
/// `Σ|ρ_ab|` of everything outside it.
pub fn project(fs: &FullState, lad: &Ladder) -> Result<(LadderState, f64)> {
    let idx = ladder_indices(lad, fs.n1, fs.n2)?;
    let d = idx.len();
    let rho = CMatrix::from_fn(d, d, |i, j| fs.rho[(idx[i], idx[j])]);
    let mut in_ladder = vec![false; fs.n1 * fs.n2];
    for &a in &idx {
        in_ladder[a] = true;
    }
    let n = fs.n1 * fs.n2;
    let mut leakage = 0.0;
    for a in 0..n {
        for b in 0..n {
            if !(in_ladder[a] && in_ladder[b]) {
                leakage += fs.rho[(a, b)].norm();
            }
        }
    }
    Ok((LadderState::new(lad.clone(), rho)?, leakage))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolve::ladder_rhs;
    use crate::ladder::{build_generators, build_ladder, initial_state};
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
    fn dims() {
        assert_eq!(full_dims(4, &InteractionSpec::band_limited(1.0)), (5, 5));
        assert_eq!(full_dims(4, &InteractionSpec::nonlinear(1.0, 1, 2)), (5, 3));
        assert_eq!(full_dims(5, &InteractionSpec::nonlinear(1.0, 1, 2)), (6, 4));
        assert_eq!(full_dims(3, &InteractionSpec::nonlinear(1.0, 2, 1)), (4, 7));
    }

    #[test]
    fn free_diagonal_state_is_stationary() {
        let osc = OscillatorSpec::new(1.0, 0.7);
        let inter = InteractionSpec::band_limited(0.0);
        let rhs = build_full_rhs(&osc, None, &inter, 3, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let diag: Vec<C64> = (0..9).map(|_| C64::new(rng.gen_range(0.0..1.0), 0.0)).collect();
        let fs = FullState::new(3, 3, CMatrix::from_diag(&diag)).unwrap();
        assert_eq!(rhs.eval(&fs).unwrap().rho.max_abs(), 0.0);

        // and a generic state evolves by the bare commutator
        let rho = random_density(&mut rng, 9);
        let out = rhs.eval(&FullState::new(3, 3, rho.clone()).unwrap()).unwrap();
        let h = &rhs.hamiltonian;
        let expected = h
            .matmul(&rho)
            .unwrap()
            .sub(&rho.matmul(h).unwrap())
            .unwrap()
            .scale(C64::new(0.0, -1.0));
        assert!(out.rho.sub(&expected).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn dephasing_leaves_populations_alone() {
        let osc = OscillatorSpec::new(1.0, 1.0);
        let inter = InteractionSpec::band_limited(0.0);
        for bath in [BathSpec::gaussian(0.3, 0.5), BathSpec::poissonian(0.3, 0.5, 0.9)] {
            let rhs = build_full_rhs(&osc, Some(&bath), &inter, 4, 4).unwrap();
            let mut rho = CMatrix::zeros(16, 16);
            rho[(3 * 4, 3 * 4)] = C64::new(1.0, 0.0);
            let out = rhs.eval(&FullState::new(4, 4, rho).unwrap()).unwrap();
            assert!(out.rho.max_abs() < 1e-15, "{bath:?}");
        }
    }

    #[test]
    fn poissonian_matches_elementwise_factor() {
        // the full dissipator acts on ρ_ab as Γ(1 − e^{−iφ(E_a − E_b)})
        let osc = OscillatorSpec::new(1.0, 1.0);
        let bath = BathSpec::poissonian(0.4, 0.0, 0.8);
        let rhs =
            build_full_rhs(&osc, Some(&bath), &InteractionSpec::band_limited(0.0), 3, 1).unwrap();
        let mut rho = CMatrix::zeros(3, 3);
        rho[(2, 0)] = C64::new(1.0, 0.0);
        let out = rhs.eval(&FullState::new(3, 1, rho).unwrap()).unwrap();
        let expected =
            C64::new(0.0, -2.0) - (C64::new(1.0, 0.0) - C64::from_polar(1.0, -0.8 * 2.0)) * 0.4;
        assert!((out.rho[(2, 0)] - expected).norm() < 1e-14);
    }

    #[test]
    fn rhs_agrees_with_ladder_rhs() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let osc = OscillatorSpec::new(1.0, 1.0);
        let cases = [
            (InteractionSpec::band_limited(0.2), Some(BathSpec::gaussian(0.1, 0.1))),
            (InteractionSpec::band_limited(0.2), Some(BathSpec::poissonian(0.1, 0.2, 0.9))),
            (InteractionSpec::nonlinear(0.2, 1, 1), None),
            (InteractionSpec::nonlinear(0.1, 1, 2), Some(BathSpec::gaussian(0.13, 0.03))),
            (InteractionSpec::nonlinear(0.1, 1, 2), Some(BathSpec::poissonian(0.02, 0.02, 0.9))),
        ];
        for (inter, bath) in cases {
            for k in [2, 3, 4] {
                let lad = build_ladder(k, &inter).unwrap();
                let (n1, n2) = full_dims(k, &inter);
                let gen = build_generators(&lad, &osc, bath.as_ref(), &inter).unwrap();
                let full = build_full_rhs(&osc, bath.as_ref(), &inter, n1, n2).unwrap();
                let ls =
                    LadderState::new(lad.clone(), random_density(&mut rng, lad.len())).unwrap();
                let fast = ladder_rhs(&gen, &ls.rho).unwrap();
                let slow = full.eval(&embed(&ls, n1, n2).unwrap()).unwrap();
                let (projected, leak) = project(&slow, &lad).unwrap();
                assert!(leak < 1e-14, "leak {leak}");
                assert!(
                    projected.rho.sub(&fast).unwrap().max_abs() < 1e-13,
                    "{inter:?} {bath:?} k={k}"
                );
            }
        }
    }

    #[test]
    fn embed_project_roundtrip() {
        let inter = InteractionSpec::band_limited(1.0);
        let lad = build_ladder(2, &inter).unwrap();
        let s = initial_state(&lad).unwrap();
        let fs = embed(&s, 3, 3).unwrap();
        assert_eq!(fs.rho[(6, 6)], C64::new(1.0, 0.0));
        assert_eq!(fs.rho.trace(), C64::new(1.0, 0.0));
        let (back, leak) = project(&fs, &lad).unwrap();
        assert_eq!(back, s);
        assert_eq!(leak, 0.0);
        assert!(embed(&s, 2, 3).is_err());
    }

    #[test]
    fn leakage_of_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let inter = InteractionSpec::band_limited(1.0);
        let lad = build_ladder(2, &inter).unwrap();

        // classical mixture: leakage is the population outside the ladder
        let diag: Vec<f64> = (0..9).map(|_| rng.gen_range(0.0..1.0)).collect();
        let total: f64 = diag.iter().sum();
        let diag: Vec<C64> = diag.iter().map(|x| C64::new(x / total, 0.0)).collect();
        let fs = FullState::new(3, 3, CMatrix::from_diag(&diag)).unwrap();
        let (block, leak) = project(&fs, &lad).unwrap();
        assert!((leak - (1.0 - block.rho.trace().re)).abs() < 1e-14);

        // generic state: everything outside the block, coherences included
        let fs = FullState::new(3, 3, random_density(&mut rng, 9)).unwrap();
        let (block, leak) = project(&fs, &lad).unwrap();
        let all: f64 = fs.rho.as_slice().iter().map(|z| z.norm()).sum();
        let inside: f64 = block.rho.as_slice().iter().map(|z| z.norm()).sum();
        assert!((leak - (all - inside)).abs() < 1e-13);
    }
}
