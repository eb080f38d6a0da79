//! Hypotheses of the strong analytic controllability theorem, checked on the
//! truncated model: the `B₁` recursion vanishes, `[B, C] ⊂ B`, and the orbit
//! dimension `dim C ψ` is the same at every probed orbit point.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::algebra::{generated_subalgebra_exact, span_residual, AlgebraElement, GeneratorId, StructureTable};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, OperatorMatrix, SymmetryTag, C64, I};
use crate::representation::{heisenberg_evolve, BasisState, RepSet};
use crate::simulator::matrix_exponential;

pub const B1_TOL: f64 = 1e-6;
pub const IDEAL_TOL: f64 = 1e-10;
pub const GAP_RATIO: f64 = 1e3;

/// `i ψ̇ = (H + Σ u_k G_k(t)) ψ` in skew-Hermitian form.
///
/// With `time_dependent` set the controls evolve as
/// `G(t) = e^{−iHt} G(0) e^{iHt}`, which is the spectrum-generating system;
/// otherwise they are frozen at `G(0)`.
#[derive(Debug, Clone)]
pub struct ControlSystem {
    rep: Arc<RepSet>,
    controls: Vec<GeneratorId>,
    control_mats: Vec<OperatorMatrix>,
    drift: OperatorMatrix,
    pub time_dependent: bool,
}

fn skew(h: &OperatorMatrix) -> OperatorMatrix {
    h.scale(-I)
        .with_verified_tag(SymmetryTag::SkewHermitian)
        .expect("−i times a Hermitian matrix is skew-Hermitian")
}

impl ControlSystem {
    pub fn new(rep: Arc<RepSet>, controls: &[GeneratorId]) -> Result<Self> {
        let mut seen = Vec::new();
        for &g in controls {
            if seen.contains(&g) {
                return Err(Error::InvalidArgument(format!("control {g} listed twice")));
            }
            seen.push(g);
        }
        let control_mats = seen.iter().map(|&g| skew(rep.generator(g))).collect();
        let drift = skew(&rep.hamiltonian);
        Ok(ControlSystem {
            rep,
            controls: seen,
            control_mats,
            drift,
            time_dependent: true,
        })
    }

    pub fn full(rep: Arc<RepSet>) -> Self {
        Self::new(rep, &GeneratorId::ALL).expect("distinct generators")
    }

    /// The five-control system `u₁L₁ + u₂L₂ + u₃A₃ + u₄S + u₅C`.
    pub fn reduced(rep: Arc<RepSet>) -> Self {
        use GeneratorId::*;
        Self::new(rep, &[L1, L2, A3, S, C]).expect("distinct generators")
    }

    pub fn drift_only(rep: Arc<RepSet>) -> Self {
        Self::new(rep, &[]).expect("empty control list")
    }

    /// Same controls, frozen in time.
    pub fn with_static_controls(mut self) -> Self {
        self.time_dependent = false;
        self
    }

    pub fn rep(&self) -> &RepSet {
        &self.rep
    }

    pub fn rep_arc(&self) -> Arc<RepSet> {
        self.rep.clone()
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }

    pub fn n_max(&self) -> usize {
        self.rep.n_max()
    }

    pub fn controls(&self) -> &[GeneratorId] {
        &self.controls
    }

    /// `H′ = −iH`.
    pub fn drift(&self) -> &OperatorMatrix {
        &self.drift
    }

    /// `G′_k(0)` for the `k`-th control.
    pub fn control_matrix(&self, k: usize) -> &OperatorMatrix {
        &self.control_mats[k]
    }

    pub fn control_index(&self, g: GeneratorId) -> Option<usize> {
        self.controls.iter().position(|&c| c == g)
    }

    /// `G′(t)` for a skew matrix given at `t = 0`.
    pub fn evolve(&self, m: &OperatorMatrix, t: f64) -> OperatorMatrix {
        if self.time_dependent {
            heisenberg_evolve(&self.rep, m, t)
        } else {
            m.clone()
        }
    }

    /// Unit basis vector for `|n l m⟩`.
    pub fn basis_state(&self, s: BasisState) -> Result<CVector> {
        let i = self
            .rep
            .basis
            .index_of(s)
            .ok_or_else(|| Error::Index(format!("{s} lies outside n ≤ {}", self.n_max())))?;
        let mut v = CVector::zeros(self.dim());
        v[i] = C64::new(1.0, 0.0);
        Ok(v)
    }
}

/// The Lie algebra `B` generated by the controls, abstractly and as matrices.
#[derive(Debug, Clone)]
pub struct LieSpan {
    pub basis: Vec<AlgebraElement<f64>>,
    pub dim: usize,
    pub depth: usize,
    /// Skew-Hermitian realizations `−i ρ(X)` of the basis.
    pub matrices: Vec<OperatorMatrix>,
}

/// Exact bracket closure of the control generators.
pub fn lie_span_controls(sys: &ControlSystem) -> Result<LieSpan> {
    if sys.controls.is_empty() {
        return Err(Error::InvalidArgument("the system has no controls".into()));
    }
    let seeds: Vec<AlgebraElement<BigRational>> = sys
        .controls
        .iter()
        .map(|&g| {
            let mut c: [BigRational; 15] = std::array::from_fn(|_| BigRational::zero());
            c[g.index()] = BigRational::one();
            AlgebraElement::from_coeffs(c)
        })
        .collect();
    let closure = generated_subalgebra_exact(&seeds);
    let basis: Vec<AlgebraElement<f64>> = closure.basis.iter().map(|x| x.to_f64()).collect();
    let matrices = basis.iter().map(|x| skew(&sys.rep.realize(x))).collect();
    Ok(LieSpan {
        dim: basis.len(),
        depth: closure.depth,
        basis,
        matrices,
    })
}

/// `max_X ‖(X(t+h) − X(t−h))/(2h) − [H′, X(t)]‖_max` over the basis of `B`.
///
/// This is `B₁ = ∂B/∂t − [H′, B]` by central differences. For drift-only
/// systems the basis is empty and the residual is `0`.
pub fn b1_residual(sys: &ControlSystem, t: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument("finite-difference step must be positive".into()));
    }
    if sys.controls.is_empty() {
        return Ok(0.0);
    }
    let span = lie_span_controls(sys)?;
    Ok(span
        .matrices
        .iter()
        .map(|x| b1_of(sys, x, t, h))
        .fold(0.0, f64::max))
}

fn b1_of(sys: &ControlSystem, x: &OperatorMatrix, t: f64, h: f64) -> f64 {
    let up = sys.evolve(x, t + h);
    let dn = sys.evolve(x, t - h);
    let dxdt = up.sub(&dn).scale(C64::new(0.5 / h, 0.0));
    dxdt.sub(&sys.drift.commutator(&sys.evolve(x, t))).max_abs()
}

/// Per-generator `B₁` residuals for single generators (used by the
/// spectrum-generating check).
pub fn generator_b1_residuals(sys: &ControlSystem, t: f64, h: f64) -> Result<Vec<(GeneratorId, f64)>> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument("finite-difference step must be positive".into()));
    }
    Ok(GeneratorId::ALL
        .iter()
        .map(|&g| (g, b1_of(sys, &skew(sys.rep.generator(g)), t, h)))
        .collect())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdealCondition {
    pub ok: bool,
    /// `"conforming"` when `B₁ = 0` and `C = B`; `"matrix-closure"` otherwise.
    pub path: String,
    pub b_dim: usize,
    pub c_dim: usize,
    pub max_residual: f64,
}

/// Real vectorization of a complex matrix.
fn vec_of(m: &CMatrix) -> Vec<f64> {
    m.iter().flat_map(|z| [z.re, z.im]).collect()
}

/// Orthonormal real basis of a matrix span with incremental Gram-Schmidt.
#[derive(Debug, Clone, Default)]
struct MatrixSpan {
    ortho: Vec<Vec<f64>>,
    elems: Vec<CMatrix>,
}

impl MatrixSpan {
    fn residual(&self, v: &[f64]) -> Vec<f64> {
        let mut r = v.to_vec();
        // two passes for numerical orthogonality
        for _ in 0..2 {
            for q in &self.ortho {
                let c: f64 = q.iter().zip(&r).map(|(a, b)| a * b).sum();
                r.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
        r
    }

    fn relative_residual(&self, m: &CMatrix) -> f64 {
        let v = vec_of(m);
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n == 0.0 {
            return 0.0;
        }
        let r = self.residual(&v);
        r.iter().map(|x| x * x).sum::<f64>().sqrt() / n
    }

    fn insert(&mut self, m: CMatrix, tol: f64) -> bool {
        let v = vec_of(&m);
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n == 0.0 {
            return false;
        }
        let r = self.residual(&v);
        let rn = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if rn / n <= tol {
            return false;
        }
        self.ortho.push(r.into_iter().map(|x| x / rn).collect());
        self.elems.push(m);
        true
    }

    fn dim(&self) -> usize {
        self.ortho.len()
    }
}

/// Lie closure of matrix seeds: brackets with the seeds span the generated
/// algebra, so only `[seed, new]` is formed.
fn matrix_closure(seeds: &[CMatrix], tol: f64, max_dim: usize) -> MatrixSpan {
    let mut span = MatrixSpan::default();
    let gens: Vec<CMatrix> = seeds.iter().filter(|s| span.insert((*s).clone(), tol)).cloned().collect();
    let mut next = 0;
    while next < span.elems.len() && span.dim() < max_dim {
        let x = span.elems[next].clone();
        for g in &gens {
            let z = g * &x - &x * g;
            span.insert(z, tol);
        }
        next += 1;
    }
    span
}

/// Verifies `[B, C] ⊂ B`.
///
/// When `B₁` vanishes at `t` (tolerance `b1_tol`), `C = B` and the check is
/// done in the abstract algebra, where the truncation cannot interfere.
/// Otherwise `C = L(B, B₁, B₂, …)` is built from matrices with
/// `B_{k+1} = ∂B_k/∂t − [H′, B_k]` evaluated at `t = 0`; this path is costly
/// beyond `n_max = 3`.
pub fn check_ideal_condition(sys: &ControlSystem, b1_tol: f64) -> Result<IdealCondition> {
    if sys.controls.is_empty() {
        return Ok(IdealCondition {
            ok: true,
            path: "conforming".into(),
            b_dim: 0,
            c_dim: 0,
            max_residual: 0.0,
        });
    }
    let span = lie_span_controls(sys)?;
    let b1 = span
        .matrices
        .iter()
        .map(|x| b1_of(sys, x, 0.0, 1e-5))
        .fold(0.0, f64::max);
    if b1 < b1_tol {
        let table = StructureTable::so42();
        let mut worst: f64 = 0.0;
        for x in &span.basis {
            for y in &span.basis {
                worst = worst.max(span_residual(&span.basis, &table.bracket(x, y)));
            }
        }
        return Ok(IdealCondition {
            ok: worst < IDEAL_TOL,
            path: "conforming".into(),
            b_dim: span.dim,
            c_dim: span.dim,
            max_residual: worst,
        });
    }

    let d = sys.dim();
    let cap = d * d;
    let b_seeds: Vec<CMatrix> = span.matrices.iter().map(|m| m.dense().into_owned()).collect();
    let b_span = matrix_closure(&b_seeds, IDEAL_TOL, cap);
    let drift = sys.drift.dense().into_owned();
    let h = 1e-5;
    let mut c_seeds = b_span.elems.clone();
    let mut layer: Vec<OperatorMatrix> = b_span.elems.iter().map(|m| OperatorMatrix::from_dense(m.clone())).collect();
    let mut probe = b_span.clone();
    for _ in 0..d {
        let next: Vec<OperatorMatrix> = layer
            .iter()
            .map(|x| {
                let up = sys.evolve(x, h);
                let dn = sys.evolve(x, -h);
                let dxdt = up.sub(&dn).scale(C64::new(0.5 / h, 0.0));
                let xd = x.dense().into_owned();
                let comm = &drift * &xd - &xd * &drift;
                OperatorMatrix::from_dense(dxdt.dense().into_owned() - comm)
            })
            .collect();
        let mut grew = false;
        for m in &next {
            if probe.insert(m.dense().into_owned(), IDEAL_TOL) {
                c_seeds.push(m.dense().into_owned());
                grew = true;
            }
        }
        if !grew {
            break;
        }
        layer = next;
    }
    let c_span = matrix_closure(&c_seeds, IDEAL_TOL, cap);
    let mut worst: f64 = 0.0;
    for g in &b_seeds {
        for c in &c_span.elems {
            worst = worst.max(b_span.relative_residual(&(g * c - c * g)));
        }
    }
    Ok(IdealCondition {
        ok: worst < IDEAL_TOL.sqrt(),
        path: "matrix-closure".into(),
        b_dim: b_span.dim(),
        c_dim: c_span.dim(),
        max_residual: worst,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankResult {
    pub rank: usize,
    /// `s_rank / s_{rank+1}`; infinite when the discarded values vanish.
    pub gap_ratio: f64,
}

/// Numerical rank from the largest singular-value gap, which must reach
/// `tol_ratio`. Values below `1e−13 · s_max` count as exact zeros.
pub fn rank_by_gap(mut s: Vec<f64>, tol_ratio: f64) -> Result<RankResult> {
    s.sort_by(|a, b| b.total_cmp(a));
    let smax = s.first().copied().unwrap_or(0.0);
    if smax <= 1e-12 {
        return Ok(RankResult {
            rank: 0,
            gap_ratio: f64::INFINITY,
        });
    }
    // Values below the floor count as exact zeros; the floor also bounds the
    // gap after the last retained value. The rank is the first index whose
    // gap reaches the ratio, so small truncation-induced singular values
    // well above the floor are discarded together.
    let floor = 1e-13 * smax;
    let mut best = (0usize, 0.0f64);
    for i in 0..s.len() {
        if s[i] < floor {
            break;
        }
        let next = s.get(i + 1).copied().unwrap_or(0.0).max(floor);
        let ratio = s[i] / next;
        if ratio >= tol_ratio {
            best = (i + 1, ratio);
            break;
        }
        if ratio > best.1 {
            best = (i + 1, ratio);
        }
    }
    if best.1 < tol_ratio {
        return Err(Error::RankAmbiguous(format!(
            "largest singular-value gap {:.3e} is below {tol_ratio:.1e}",
            best.1
        )));
    }
    Ok(RankResult {
        rank: best.0,
        gap_ratio: best.1,
    })
}

fn orbit_rank(mats: &[OperatorMatrix], psi: &CVector, tol_ratio: f64) -> Result<RankResult> {
    if mats.is_empty() {
        return Ok(RankResult {
            rank: 0,
            gap_ratio: f64::INFINITY,
        });
    }
    let d = psi.len();
    let cols: Vec<CVector> = mats.iter().map(|m| m.apply(psi)).collect();
    let m = DMatrix::from_fn(2 * d, cols.len(), |i, j| if i < d { cols[j][i].re } else { cols[j][i - d].im });
    rank_by_gap(m.singular_values().iter().copied().collect(), tol_ratio)
}

fn check_unit(psi: &CVector, dim: usize) -> Result<()> {
    if psi.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: psi.len() });
    }
    let n = psi.norm();
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!("state has norm {n}, expected 1")));
    }
    Ok(())
}

/// `dim_R span{Xψ : X ∈ basis of C}`, with `C = B` (conforming systems).
pub fn orbit_dimension(sys: &ControlSystem, psi: &CVector, tol_ratio: f64) -> Result<RankResult> {
    orbit_dimension_at(sys, psi, 0.0, tol_ratio)
}

/// Orbit dimension with the basis of `C(t)`; `C(t)ψ(t)` is the Heisenberg
/// image of `C(0)ψ(0)`, so the rank is independent of `t` along drift motion.
pub fn orbit_dimension_at(sys: &ControlSystem, psi: &CVector, t: f64, tol_ratio: f64) -> Result<RankResult> {
    check_unit(psi, sys.dim())?;
    if sys.controls.is_empty() {
        return Ok(RankResult {
            rank: 0,
            gap_ratio: f64::INFINITY,
        });
    }
    let span = lie_span_controls(sys)?;
    let mats: Vec<OperatorMatrix> = span.matrices.iter().map(|m| sys.evolve(m, t)).collect();
    orbit_rank(&mats, psi, tol_ratio)
}

/// Parameters of the orbit probes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeOptions {
    pub min_exponentials: usize,
    pub max_exponentials: usize,
    pub segment_duration: f64,
    /// Required population on `n ≤ n_max − 2`.
    pub interior_population: f64,
    pub max_attempts: usize,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            min_exponentials: 3,
            max_exponentials: 6,
            segment_duration: 0.02,
            interior_population: 0.99,
            max_attempts: 1000,
        }
    }
}

/// Random orbit points `Π exp(Δt Σ u_k G′_k) ψ` with `u ~ N(0, 1)`, kept
/// only if they stay in the interior.
pub fn orbit_probes(sys: &ControlSystem, psi: &CVector, count: usize, opts: &ProbeOptions, rng: &mut impl Rng) -> Result<Vec<CVector>> {
    check_unit(psi, sys.dim())?;
    if sys.controls.is_empty() {
        return Ok(vec![psi.clone(); count]);
    }
    let interior = sys.rep.interior_dim();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > opts.max_attempts {
            return Err(Error::InvalidArgument("could not place orbit probes inside the interior".into()));
        }
        let reps = rng.random_range(opts.min_exponentials..=opts.max_exponentials);
        let mut v = psi.clone();
        for _ in 0..reps {
            let mut k = OperatorMatrix::zeros(sys.dim());
            for m in &sys.control_mats {
                let u: f64 = rng.sample(StandardNormal);
                k = k.lin_comb(C64::new(1.0, 0.0), m, C64::new(u * opts.segment_duration, 0.0));
            }
            let k = k.with_verified_tag(SymmetryTag::SkewHermitian)?;
            v = matrix_exponential(&k)?.apply(&v);
        }
        let inside: f64 = v.iter().take(interior).map(|z| z.norm_sqr()).sum();
        if inside >= opts.interior_population {
            out.push(v);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ControllabilityReport {
    pub n_max: usize,
    pub controls: Vec<GeneratorId>,
    pub seed: u64,
    pub lie_span_dim: usize,
    pub closure_depth: usize,
    pub b1_residual: f64,
    pub b1_times: Vec<f64>,
    pub ideal_condition_ok: bool,
    pub ideal_condition: IdealCondition,
    /// Rank at the seed state; `None` if ambiguous.
    pub orbit_dim: Option<usize>,
    /// Rank at the seed state followed by each probe.
    pub probe_dims: Vec<Option<usize>>,
    pub orbit_dim_constant: bool,
    /// Smallest gap ratio seen over all probes.
    pub rank_gap: f64,
    pub verdict: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportOptions {
    pub b1_step: f64,
    pub b1_tol: f64,
    pub gap_ratio: f64,
    pub b1_times: usize,
    pub probe: ProbeOptions,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            b1_step: 1e-5,
            b1_tol: B1_TOL,
            gap_ratio: GAP_RATIO,
            b1_times: 5,
            probe: ProbeOptions::default(),
        }
    }
}

pub const VERDICT_OK: &str = "conditions-satisfied";
pub const VERDICT_FAIL: &str = "not-satisfied";

/// Aggregates the three checks from the ground state `|1 0 0⟩`.
pub fn controllability_report(sys: &ControlSystem, probes: usize, seed: u64) -> Result<ControllabilityReport> {
    let psi = sys.basis_state(BasisState::new(1, 0, 0))?;
    controllability_report_with(sys, &psi, probes, seed, &ReportOptions::default())
}

/// Verdict `"conditions-satisfied"` requires at least one control,
/// `B₁ < b1_tol` at every sampled time, the ideal condition, and one
/// unambiguous positive orbit dimension shared by every probe.
pub fn controllability_report_with(
    sys: &ControlSystem,
    psi: &CVector,
    probes: usize,
    seed: u64,
    opts: &ReportOptions,
) -> Result<ControllabilityReport> {
    check_unit(psi, sys.dim())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b1_times: Vec<f64> = (0..opts.b1_times).map(|_| rng.random_range(0.0..10.0)).collect();
    let (lie_span_dim, closure_depth, mats) = if sys.controls.is_empty() {
        (0, 0, Vec::new())
    } else {
        let span = lie_span_controls(sys)?;
        (span.dim, span.depth, span.matrices)
    };
    let mut b1: f64 = 0.0;
    for &t in &b1_times {
        for m in &mats {
            b1 = b1.max(b1_of(sys, m, t, opts.b1_step));
        }
    }
    let ideal = check_ideal_condition(sys, opts.b1_tol)?;

    let mut states = vec![psi.clone()];
    states.extend(orbit_probes(sys, psi, probes, &opts.probe, &mut rng)?);
    let mut dims = Vec::with_capacity(states.len());
    let mut rank_gap = f64::INFINITY;
    for s in &states {
        match orbit_rank(&mats, s, opts.gap_ratio) {
            Ok(r) => {
                rank_gap = rank_gap.min(r.gap_ratio);
                dims.push(Some(r.rank));
            }
            Err(Error::RankAmbiguous(_)) => dims.push(None),
            Err(e) => return Err(e),
        }
    }
    let orbit_dim = dims[0];
    let constant = orbit_dim.is_some() && dims.iter().all(|d| *d == orbit_dim);
    let ok = !sys.controls.is_empty()
        && b1 < opts.b1_tol
        && ideal.ok
        && constant
        && orbit_dim.is_some_and(|m| m > 0);
    Ok(ControllabilityReport {
        n_max: sys.n_max(),
        controls: sys.controls.clone(),
        seed,
        lie_span_dim,
        closure_depth,
        b1_residual: b1,
        b1_times,
        ideal_condition_ok: ideal.ok,
        ideal_condition: ideal,
        orbit_dim,
        probe_dims: dims,
        orbit_dim_constant: constant,
        rank_gap,
        verdict: if ok { VERDICT_OK } else { VERDICT_FAIL }.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_rule() {
        assert_eq!(rank_by_gap(vec![0.0, 0.0], 1e3).unwrap().rank, 0);
        assert_eq!(rank_by_gap(vec![1.0, 2.0, 1e-9], 1e3).unwrap().rank, 2);
        assert_eq!(rank_by_gap(vec![1.0, 2.0], 1e3).unwrap().rank, 2);
        assert_eq!(rank_by_gap(vec![3.0, 1.0, 0.0], 1e3).unwrap().rank, 2);
        assert_eq!(rank_by_gap(vec![1.0, 0.5, 0.1], 1e3).unwrap().rank, 3);
        let graded: Vec<f64> = (0..=14).map(|k| 10f64.powi(-k)).collect();
        assert!(matches!(rank_by_gap(graded, 1e3), Err(Error::RankAmbiguous(_))));
    }

    #[test]
    fn duplicate_controls_rejected() {
        let rep = Arc::new(RepSet::build(3).unwrap());
        assert!(ControlSystem::new(rep, &[GeneratorId::L1, GeneratorId::L1]).is_err());
    }
}
